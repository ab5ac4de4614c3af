//! Agents for the construction game: uniform random, greedy with respect to a
//! value table, RTDP, and a memoized exhaustive search used as an oracle on
//! small configurations.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, GameState, Objective, StateKey};
use crate::parallel::{map_indexed, Parallelism};
use crate::script::Move;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Summary of the code at the end of an episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub p_l_norm: Option<f64>,
    pub final_reward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestEpisode {
    pub actions: Vec<usize>,
    pub moves: Vec<Move>,
    #[serde(rename = "return")]
    pub ret: f64,
    pub code: CodeSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub agent: String,
    pub seed: Option<u64>,
    pub returns: Vec<f64>,
    pub best: BestEpisode,
    pub states_explored: Option<u64>,
    pub wall_clock_s: f64,
}

impl SearchReport {
    pub fn mean_return(&self) -> f64 {
        mean(&self.returns)
    }

    /// Mean over the last `count` episodes (all of them if fewer).
    pub fn tail_mean(&self, count: usize) -> f64 {
        let start = self.returns.len().saturating_sub(count);
        mean(&self.returns[start..])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `episode,return,cumulative_mean`
    pub fn learning_curve_csv(&self) -> String {
        let mut out = String::from("episode,return,cumulative_mean\n");
        let mut total = 0.0;
        for (i, r) in self.returns.iter().enumerate() {
            total += r;
            out.push_str(&format!("{},{},{}\n", i, r, total / (i + 1) as f64));
        }
        out
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn best_episode(game: &Game, state: &GameState) -> BestEpisode {
    let eval = game.evaluate(state);
    BestEpisode {
        actions: state.ledger.iter().map(|e| e.action).collect(),
        moves: game.to_moves(state),
        ret: state.cumulative_reward,
        code: CodeSummary {
            n: eval.n,
            k: eval.k,
            d: eval.d,
            p_l_norm: eval.p_l_norm,
            final_reward: eval.reward,
        },
    }
}

/// Pick the highest-return episode, earliest on ties.
fn pick_best<'a>(episodes: impl Iterator<Item = &'a GameState>) -> Option<&'a GameState> {
    let mut best: Option<&GameState> = None;
    for s in episodes {
        if best.is_none_or(|b| s.cumulative_reward > b.cumulative_reward) {
            best = Some(s);
        }
    }
    best
}

fn episode_rng(seed: u64, episode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode as u64);
    rng
}

/// One episode choosing uniformly among legal actions.
pub fn random_episode(game: &Game, rng: &mut impl Rng) -> GameState {
    let mut s = game.reset();
    while !s.done {
        let legal = game.legal_actions(&s);
        let a = legal[rng.gen_range(0..legal.len())];
        s = game.step(&s, a).expect("legal action").state;
    }
    s
}

/// Uniform random play. Episode `i` draws from stream `i` of the seed, so
/// results do not depend on `par`.
pub fn random_agent(game: &Game, episodes: usize, seed: u64, par: Parallelism) -> Result<SearchReport> {
    if episodes == 0 {
        return Err(Error::InvalidConfig("episodes must be >= 1".into()));
    }
    let start = Instant::now();
    let finals = map_indexed(par, episodes, |i| random_episode(game, &mut episode_rng(seed, i)));
    let best = pick_best(finals.iter()).unwrap();
    Ok(SearchReport {
        schema_version: 1,
        agent: "random".into(),
        seed: Some(seed),
        returns: finals.iter().map(|s| s.cumulative_reward).collect(),
        best: best_episode(game, best),
        states_explored: None,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Memoized search over all action sequences, deduplicated by canonical
/// state key. Returns the optimal undiscounted return and a witness.
pub fn exhaustive_search(game: &Game, node_budget: u64) -> Result<SearchReport> {
    struct Dfs<'g> {
        game: &'g Game,
        memo: HashMap<StateKey, (f64, usize)>,
        budget: u64,
    }
    impl Dfs<'_> {
        fn best(&mut self, s: &GameState) -> Result<f64> {
            let key = s.key();
            if let Some(&(v, _)) = self.memo.get(&key) {
                return Ok(v);
            }
            if self.memo.len() as u64 >= self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for a in self.game.legal_actions(s) {
                let o = self.game.step(s, a)?;
                let v = o.reward + if o.done { 0.0 } else { self.best(&o.state)? };
                if v > best.0 {
                    best = (v, a);
                }
            }
            self.memo.insert(key, best);
            Ok(best.0)
        }
    }
    let start = Instant::now();
    let mut dfs = Dfs {
        game,
        memo: HashMap::new(),
        budget: node_budget,
    };
    let root = game.reset();
    let opt = dfs.best(&root)?;
    let mut s = root;
    while !s.done {
        let a = dfs.memo[&s.key()].1;
        s = game.step(&s, a)?.state;
    }
    Ok(SearchReport {
        schema_version: 1,
        agent: "exhaustive".into(),
        seed: None,
        returns: vec![opt],
        best: best_episode(game, &s),
        states_explored: Some(dfs.memo.len() as u64),
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Upper bound on the return still available from a state, used to
/// initialize unvisited states optimistically. Shaping is bounded by the
/// best per-step reward over the remaining actions; the final reward by the
/// Singleton bound `d <= (n + 1) / 2` on the largest code still reachable
/// (`DistanceMax`) or by a fixed constant (`BiasedNoise`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heuristic {
    pub step_max: f64,
    pub terminate: f64,
    pub penalty: f64,
    pub max_actions: usize,
    pub max_legos: usize,
    pub max_legs: usize,
    /// `None` uses the Singleton bound.
    pub final_bound: Option<f64>,
}

impl Heuristic {
    pub fn new(game: &Game, biased_final_bound: f64) -> Self {
        let cfg = game.config();
        let r = &cfg.rewards;
        Heuristic {
            step_max: [r.add, r.contraction, r.self_contraction, 0.0]
                .into_iter()
                .fold(f64::MIN, f64::max),
            terminate: r.terminate,
            penalty: cfg.invalid_code_penalty,
            max_actions: cfg.max_actions,
            max_legos: cfg.max_legos,
            max_legs: game.max_legs(),
            final_bound: match cfg.objective {
                Objective::DistanceMax => None,
                Objective::BiasedNoise { .. } => Some(biased_final_bound),
            },
        }
    }

    pub fn bound(&self, s: &GameState) -> f64 {
        if s.done {
            return 0.0;
        }
        let rem = self.max_actions.saturating_sub(s.actions_taken).max(1);
        let adds = (self.max_legos - s.legos.len()).min(rem - 1);
        let n_max = s.dangling().len() - 1 + adds * self.max_legs;
        let fin = self
            .final_bound
            .unwrap_or((n_max + 1) as f64 / 2.0)
            .max(self.penalty);
        (rem - 1) as f64 * self.step_max + self.terminate.max(self.step_max) + fin
    }
}

/// State values with visit counts. Unvisited states read as the heuristic
/// bound, or as a constant when one is given.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueTable {
    pub values: HashMap<StateKey, f64>,
    pub visits: HashMap<StateKey, u64>,
    pub heuristic: Heuristic,
    pub constant_init: Option<f64>,
}

impl ValueTable {
    pub fn new(heuristic: Heuristic, constant_init: Option<f64>) -> Self {
        ValueTable {
            values: HashMap::new(),
            visits: HashMap::new(),
            heuristic,
            constant_init,
        }
    }

    /// Terminal states have value 0.
    pub fn value(&self, s: &GameState) -> f64 {
        if s.done {
            return 0.0;
        }
        match self.values.get(&s.key()) {
            Some(&v) => v,
            None => self
                .constant_init
                .unwrap_or_else(|| self.heuristic.bound(s)),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(action, r + γ V(s'), s')` for every legal action, in index order.
fn q_values(game: &Game, table: &ValueTable, s: &GameState, gamma: f64) -> Vec<(usize, f64, GameState)> {
    game.legal_actions(s)
        .into_iter()
        .map(|a| {
            let o = game.step(s, a).expect("legal action");
            let q = o.reward + gamma * table.value(&o.state);
            (a, q, o.state)
        })
        .collect()
}

/// Index of the maximum, lowest index on ties.
fn argmax(qs: &[(usize, f64, GameState)]) -> usize {
    let mut best = 0;
    for (i, q) in qs.iter().enumerate() {
        if q.1 > qs[best].1 {
            best = i;
        }
    }
    best
}

/// Play greedily with respect to `table` from reset.
pub fn greedy_rollout(game: &Game, table: &ValueTable, gamma: f64) -> GameState {
    let mut s = game.reset();
    while !s.done {
        let mut qs = q_values(game, table, &s, gamma);
        let i = argmax(&qs);
        s = qs.swap_remove(i).2;
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RtdpConfig {
    pub episodes: usize,
    pub gamma: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Fraction of episodes over which ε decays linearly.
    pub decay_fraction: f64,
    pub seed: u64,
    /// Constant initial value for unvisited states; `None` uses [`Heuristic`].
    pub init_value: Option<f64>,
    /// Final-reward bound used by the heuristic under `BiasedNoise`.
    pub biased_final_bound: f64,
}

impl Default for RtdpConfig {
    fn default() -> Self {
        RtdpConfig {
            episodes: 2000,
            gamma: 0.99,
            eps_start: 1.0,
            eps_end: 0.05,
            decay_fraction: 0.8,
            seed: 0,
            init_value: None,
            biased_final_bound: 10.0,
        }
    }
}

impl RtdpConfig {
    pub fn epsilon(&self, episode: usize) -> f64 {
        let horizon = (self.episodes as f64 * self.decay_fraction).max(1.0);
        let t = (episode as f64 / horizon).min(1.0);
        self.eps_start + (self.eps_end - self.eps_start) * t
    }
}

/// Real-time dynamic programming: ε-greedy play with a Bellman backup at
/// every visited state. Transitions are deterministic, so the backup is a
/// max over successors.
pub fn rtdp_train(game: &Game, cfg: &RtdpConfig) -> Result<(ValueTable, SearchReport)> {
    if !(cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(Error::InvalidConfig(format!("gamma {} not in (0, 1]", cfg.gamma)));
    }
    let eps_ok = |e: f64| (0.0..=1.0).contains(&e);
    if !eps_ok(cfg.eps_start) || !eps_ok(cfg.eps_end) {
        return Err(Error::InvalidConfig("epsilon not in [0, 1]".into()));
    }
    if cfg.episodes == 0 {
        return Err(Error::InvalidConfig("episodes must be >= 1".into()));
    }
    let start = Instant::now();
    let mut table = ValueTable::new(Heuristic::new(game, cfg.biased_final_bound), cfg.init_value);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut returns = Vec::with_capacity(cfg.episodes);
    let mut best: Option<GameState> = None;
    for ep in 0..cfg.episodes {
        let eps = cfg.epsilon(ep);
        let mut s = game.reset();
        while !s.done {
            let mut qs = q_values(game, &table, &s, cfg.gamma);
            let g = argmax(&qs);
            let key = s.key();
            table.values.insert(key.clone(), qs[g].1);
            *table.visits.entry(key).or_insert(0) += 1;
            let i = if rng.gen::<f64>() < eps {
                rng.gen_range(0..qs.len())
            } else {
                g
            };
            s = qs.swap_remove(i).2;
        }
        returns.push(s.cumulative_reward);
        if best.as_ref().is_none_or(|b| s.cumulative_reward > b.cumulative_reward) {
            best = Some(s);
        }
    }
    let report = SearchReport {
        schema_version: 1,
        agent: "rtdp".into(),
        seed: Some(cfg.seed),
        returns,
        best: best_episode(game, best.as_ref().unwrap()),
        states_explored: Some(table.len() as u64),
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    Ok((table, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameConfig;

    fn game(max_legos: usize, max_actions: usize) -> Game {
        Game::new(GameConfig::distance(max_legos, max_actions)).unwrap()
    }

    #[test]
    fn single_lego_optimum() {
        let g = game(1, 4);
        let r = exhaustive_search(&g, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.best.code.d, Some(2));
        assert_eq!(r.best.code.n, Some(5));
        assert!((r.returns[0] - 2.15).abs() < 1e-12);
        let s = g.replay(&r.best.actions).unwrap();
        assert_eq!(s.cumulative_reward, r.best.ret);
    }

    #[test]
    fn random_is_reproducible_and_mode_free() {
        let g = game(3, 8);
        let a = random_agent(&g, 40, 7, Parallelism::Sequential).unwrap();
        let b = random_agent(&g, 40, 7, Parallelism::Parallel).unwrap();
        assert_eq!(a.returns, b.returns);
        assert_eq!(a.best, b.best);
        let s = g.replay(&a.best.actions).unwrap();
        assert_eq!(s.cumulative_reward, a.best.ret);
    }

    #[test]
    fn epsilon_schedule() {
        let c = RtdpConfig {
            episodes: 100,
            ..Default::default()
        };
        assert_eq!(c.epsilon(0), 1.0);
        assert!((c.epsilon(40) - 0.525).abs() < 1e-12);
        assert!((c.epsilon(80) - 0.05).abs() < 1e-12);
        assert!((c.epsilon(99) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rtdp_bellman_consistent_on_small_game() {
        let g = game(1, 3);
        let cfg = RtdpConfig {
            episodes: 400,
            gamma: 1.0,
            ..Default::default()
        };
        let (table, report) = rtdp_train(&g, &cfg).unwrap();
        let opt = exhaustive_search(&g, DEFAULT_NODE_BUDGET).unwrap().returns[0];
        let greedy = greedy_rollout(&g, &table, 1.0);
        assert!((greedy.cumulative_reward - opt).abs() < 1e-9);
        assert!(report.best.ret <= opt + 1e-12);
        // V(s) = max_a Q(s, a) wherever every successor has been backed up
        for key in table.values.keys() {
            let s = replay_key(&g, key);
            let qs = q_values(&g, &table, &s, 1.0);
            let complete = qs
                .iter()
                .all(|(_, _, n)| n.done || table.values.contains_key(&n.key()));
            if complete {
                let best = qs.iter().map(|q| q.1).fold(f64::MIN, f64::max);
                assert!((table.values[key] - best).abs() < 1e-9);
            }
        }
    }

    fn replay_key(g: &Game, key: &StateKey) -> GameState {
        let mut s = g.reset();
        for _ in 1..key.legos.len() {
            s = g.step(&s, 0).unwrap().state;
        }
        for &(a, b) in &key.edges {
            let i = g
                .index_of(crate::game::Action::Contract {
                    a: a as usize,
                    b: b as usize,
                })
                .unwrap();
            s = g.step(&s, i).unwrap().state;
        }
        assert_eq!(&s.key(), key);
        s
    }
}
