use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qlego::codelib::{self, CodeRecord};
use qlego::enumerator::{sweep, EnumConfig, Enumerators, NoiseModel, DEFAULT_CAP};
use qlego::envproto::{self, Session};
use qlego::game::{Game, GameConfig, Objective};
use qlego::parallel::Parallelism;
use qlego::script::{build_code, parse_script, write_script};
use qlego::search::{self, RtdpConfig, SearchReport};
use qlego::{mcsim, report};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "qlego", version, about = "Build and evaluate stabilizer codes from lego tensors")]
struct Cli {
    /// Worker threads for parallel sections (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a move script and summarize the resulting code.
    Build {
        script: PathBuf,
        /// Write the check matrix in the text format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight enumerators of a code (built-in id or file).
    Enumerate {
        code: String,
        /// Double enumerators A(wx, wz), B, C.
        #[arg(long)]
        double: bool,
        /// Scalar enumerators by total weight.
        #[arg(long)]
        scalar: bool,
        /// Full (wx, wz, w) histograms as CSV.
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Logical error rates under independent X/Z noise.
    Errorrate {
        code: String,
        #[arg(long, default_value_t = 0.01)]
        px: f64,
        #[arg(long, default_value_t = 0.05)]
        pz: f64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Tables over the built-in codes and noise sweeps.
    Report {
        /// Error rates and distances against the published values.
        #[arg(long)]
        table1: bool,
        /// Logical-operator counts at low weight.
        #[arg(long)]
        table2: bool,
        /// Error rates of two codes over a noise grid, as CSV.
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
        sweep: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.0075, 0.01, 0.0125, 0.015])]
        px_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.025, 0.0375, 0.05, 0.0625, 0.075])]
        pz_grid: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        px: f64,
        #[arg(long, default_value_t = 0.05)]
        pz: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run a search agent on the construction game.
    Search {
        #[arg(long, value_enum)]
        agent: Agent,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.99)]
        gamma: f64,
        #[arg(long, default_value_t = search::DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Write report.json, learning_curve.csv and best.jsonl here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the logical error rates.
    Mc {
        code: String,
        #[arg(long, default_value_t = 0.01)]
        px: f64,
        #[arg(long, default_value_t = 0.05)]
        pz: f64,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the exact enumerator values.
        #[arg(long)]
        exact: bool,
    },
    /// Serve the game over newline-delimited JSON.
    Serve {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = Transport::Stdio)]
        transport: Transport,
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
    },
}

#[derive(clap::Args)]
struct GameArgs {
    /// Game config as JSON; the flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_legos: Option<usize>,
    #[arg(long)]
    max_actions: Option<usize>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Distance,
    Biased,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Agent {
    Random,
    Rtdp,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transport {
    Stdio,
    Tcp,
}

impl GameArgs {
    fn resolve(&self) -> Result<GameConfig> {
        let mut cfg = match &self.config {
            Some(p) => GameConfig::from_json(&read(p)?)?,
            None => GameConfig::default(),
        };
        if let Some(v) = self.max_legos {
            cfg.max_legos = v;
        }
        if let Some(v) = self.max_actions {
            cfg.max_actions = v;
        }
        match self.objective {
            Some(ObjectiveArg::Distance) => cfg.objective = Objective::DistanceMax,
            Some(ObjectiveArg::Biased) if matches!(cfg.objective, Objective::DistanceMax) => {
                cfg.objective = GameConfig::default().objective
            }
            _ => {}
        }
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn load(code: &str) -> Result<CodeRecord> {
    codelib::load(code).with_context(|| format!("loading code {code}"))
}

fn summary(name: &str, e: &Enumerators) -> serde_json::Value {
    let d = e.distances();
    let params = match d.d {
        Some(d) => format!("[[{},{},{}]]", e.n, e.k, d),
        None => format!("[[{},{}]]", e.n, e.k),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "code": name,
        "params": params,
        "n": e.n,
        "k": e.k,
        "d": d.d,
        "d_x": d.d_x,
        "d_z": d.d_z,
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    let par = if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    };
    let enum_cfg = |cap| EnumConfig {
        cap,
        parallelism: par,
    };
    match cli.cmd {
        Cmd::Build { script, out } => {
            let moves = parse_script(&read(&script)?)?;
            let name = script
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let code = build_code(&name, &moves)?;
            let e = Enumerators::compute(&code, &enum_cfg(DEFAULT_CAP))?;
            if let Some(out) = out {
                std::fs::write(&out, codelib::serialize(&code))
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            print_json(&summary(&name, &e))?;
        }
        Cmd::Enumerate {
            code,
            double,
            scalar,
            csv,
            cap,
        } => {
            let rec = load(&code)?;
            let e = Enumerators::compute(&rec.code, &enum_cfg(cap))?;
            if csv {
                print!("{}", e.to_csv());
                return Ok(());
            }
            let mut v = summary(&rec.id, &e);
            let all = !double && !scalar;
            if scalar || all {
                v["scalar"] = json!({ "A": e.a.scalar(), "B": e.b.scalar(), "C": e.c.scalar() });
            }
            if double || all {
                let d = |h: &qlego::enumerator::WeightHistogram| -> Vec<[u64; 3]> {
                    h.double()
                        .entries()
                        .map(|(x, z, c)| [x as u64, z as u64, c])
                        .collect()
                };
                v["double"] = json!({ "A": d(&e.a), "B": d(&e.b), "C": d(&e.c) });
            }
            print_json(&v)?;
        }
        Cmd::Errorrate { code, px, pz, cap } => {
            let rec = load(&code)?;
            let noise = NoiseModel::new(px, pz)?;
            let e = Enumerators::compute(&rec.code, &enum_cfg(cap))?;
            let r = e.error_rates(&noise)?;
            let mut v = summary(&rec.id, &e);
            v["noise"] = json!(noise);
            v["p_l"] = json!(r.p_l);
            v["p_s0"] = json!(r.p_s0);
            v["p_l_norm"] = json!(r.p_l_norm);
            print_json(&v)?;
        }
        Cmd::Report {
            table1,
            table2,
            sweep: pair,
            px_grid,
            pz_grid,
            px,
            pz,
            format,
        } => {
            let cfg = enum_cfg(DEFAULT_CAP);
            if !table1 && !table2 && pair.is_none() {
                bail!("nothing to report: pass --table1, --table2 or --sweep");
            }
            if table1 {
                let rows = report::error_rate_table(&NoiseModel::new(px, pz)?, &cfg)?;
                match format {
                    Format::Json => print_json(&json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))?,
                    Format::Csv => {
                        println!("code,n,k,d_x,d_z,p_l,p_l_norm,published_p_l,published_p_l_norm");
                        for r in &rows {
                            let (a, b) = r
                                .published
                                .as_ref()
                                .map(|p| (p.p_l.to_string(), p.p_l_norm.to_string()))
                                .unwrap_or_default();
                            println!(
                                "{},{},{},{},{},{},{},{},{}",
                                r.code,
                                r.n,
                                r.k,
                                opt(r.d_x),
                                opt(r.d_z),
                                r.p_l,
                                r.p_l_norm,
                                a,
                                b
                            );
                        }
                    }
                    Format::Table => {
                        println!(
                            "{:<16} {:>10} {:>9} {:>12} {:>12} {:>8} {:>8}",
                            "code", "params", "d_x/d_z", "p_L/1e-5", "p_norm/1e-5", "dp_L", "dp_norm"
                        );
                        for r in &rows {
                            let pct = |x: Option<f64>| {
                                x.map(|x| format!("{:+.2}%", 100.0 * x)).unwrap_or_default()
                            };
                            println!(
                                "{:<16} {:>10} {:>9} {:>12.4} {:>12.4} {:>8} {:>8}",
                                r.code,
                                format!("[[{},{}]]", r.n, r.k),
                                format!("{}/{}", opt(r.d_x), opt(r.d_z)),
                                r.p_l * 1e5,
                                r.p_l_norm * 1e5,
                                pct(r.rel_err_p_l),
                                pct(r.rel_err_p_l_norm)
                            );
                        }
                    }
                }
            }
            if table2 {
                let rows = report::logical_count_table(&cfg)?;
                match format {
                    Format::Json => print_json(&json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))?,
                    _ => {
                        println!("code,weight,count,published");
                        for r in &rows {
                            for i in 0..r.weights.len() {
                                println!("{},{},{},{}", r.code, r.weights[i], r.counts[i], r.published[i]);
                            }
                        }
                    }
                }
            }
            if let Some(pair) = pair {
                let a = Enumerators::compute(&load(&pair[0])?.code, &cfg)?;
                let b = Enumerators::compute(&load(&pair[1])?.code, &cfg)?;
                let grid: Vec<(f64, f64)> = px_grid
                    .iter()
                    .flat_map(|&x| pz_grid.iter().map(move |&z| (x, z)))
                    .collect();
                let rows = sweep(&a, &b, &grid)?;
                if format == Format::Json {
                    print_json(&json!({ "schema_version": SCHEMA_VERSION, "first": pair[0], "second": pair[1], "rows": rows }))?;
                } else {
                    println!("p_x,p_z,first_p_l,first_p_l_norm,second_p_l,second_p_l_norm,delta_p_l,delta_p_l_norm");
                    for r in &rows {
                        println!(
                            "{},{},{},{},{},{},{},{}",
                            r.p_x,
                            r.p_z,
                            r.first.p_l,
                            r.first.p_l_norm,
                            r.second.p_l,
                            r.second.p_l_norm,
                            r.delta_p_l,
                            r.delta_p_l_norm
                        );
                    }
                }
            }
        }
        Cmd::Search {
            agent,
            game,
            episodes,
            seed,
            gamma,
            node_budget,
            out_dir,
        } => {
            let g = Game::new(game.resolve()?)?;
            let report: SearchReport = match agent {
                Agent::Random => search::random_agent(&g, episodes, seed, par)?,
                Agent::Exhaustive => search::exhaustive_search(&g, node_budget)?,
                Agent::Rtdp => {
                    let cfg = RtdpConfig {
                        episodes,
                        gamma,
                        seed,
                        ..Default::default()
                    };
                    search::rtdp_train(&g, &cfg)?.1
                }
            };
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("report.json"), report.to_json()?)?;
                std::fs::write(dir.join("learning_curve.csv"), report.learning_curve_csv())?;
                std::fs::write(dir.join("best.jsonl"), write_script(&report.best.moves))?;
            }
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "agent": report.agent,
                "seed": report.seed,
                "episodes": report.returns.len(),
                "mean_return": report.mean_return(),
                "best": report.best,
                "states_explored": report.states_explored,
                "wall_clock_s": report.wall_clock_s,
            }))?;
        }
        Cmd::Mc {
            code,
            px,
            pz,
            shots,
            seed,
            exact,
        } => {
            let rec = load(&code)?;
            let noise = NoiseModel::new(px, pz)?;
            let mut r = mcsim::estimate(&rec.code, &noise, shots, seed, par)?;
            if exact {
                let e = Enumerators::compute(&rec.code, &enum_cfg(DEFAULT_CAP))?;
                r = r.with_exact(e.error_rates(&noise)?);
            }
            let mut v = serde_json::to_value(&r)?;
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["code"] = json!(rec.id);
            print_json(&v)?;
        }
        Cmd::Serve {
            game,
            transport,
            addr,
        } => {
            let mut session = Session::new(game.resolve()?)?;
            match transport {
                Transport::Stdio => {
                    let stdin = io::stdin();
                    envproto::serve(&mut session, BufReader::new(stdin.lock()), io::stdout().lock())?
                }
                Transport::Tcp => envproto::serve_tcp(&mut session, &addr)?,
            }
        }
    }
    Ok(())
}

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}
