//! Built-in codes, code family generators and the check-matrix text format.
//!
//! Text format: `#` comments, then a `[stabilizers]` section and an optional
//! `[logicals]` section. Each row holds `2n` bits, X half then Z half;
//! whitespace and `|` inside a row are ignored, and a leading `-` marks a
//! negative sign. Logical rows come in `X̄, Z̄` pairs.
//!
//! ```text
//! [stabilizers]
//! 1111|0000
//! 0000|1111
//! ```

use std::collections::BTreeMap;

use crate::code::{Provenance, StabilizerCode};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::gf2::{CheckMatrix, PauliString};
use crate::script::{build_code, parse_script};

/// Where a built-in code's data comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    AppendixMatrix,
    Generator,
    File,
    MoveScript,
}

#[derive(Clone, Debug)]
pub struct CodeRecord {
    pub id: String,
    pub code: StabilizerCode,
    pub source: Source,
}

/// Ids accepted by [`builtin`] (parametrized families shown with their
/// Table-1 sizes).
pub const BUILTIN_IDS: &[&str] = &[
    "DM13",
    "BN13A",
    "BN13B",
    "BN17",
    "t422",
    "t512",
    "t642",
    "steane_7",
    "concat_21",
    "reed_muller_15",
    "color_19",
    "surface(4,4)",
    "surface(4,5)",
    "surface(5,4)",
    "xzzx(4,4)",
    "xzzx(4,5)",
    "xzzx(5,4)",
];

/// Ids of the T6 codes shipped as check matrices.
pub const APPENDIX_IDS: &[&str] = &["DM13", "BN13A", "BN13B", "BN17"];

pub fn builtin(id: &str) -> Result<CodeRecord> {
    let id = id.trim();
    let rec = |code: StabilizerCode, source| CodeRecord {
        id: id.to_string(),
        code,
        source,
    };
    if APPENDIX_IDS.contains(&id) {
        let text = fixtures::read(&format!("appendix/{id}.txt"))?;
        let printed = PrintedMatrix::parse(&text)?;
        let code = printed.to_code(id)?;
        return Ok(rec(code, Source::AppendixMatrix));
    }
    match id {
        "reed_muller_15" => return Ok(rec(reed_muller_15()?, Source::Generator)),
        "color_19" => return Ok(rec(color(5)?, Source::Generator)),
        _ => {}
    }
    if let Some((family, w, h)) = parse_family(id) {
        let code = match family {
            "surface" => surface(w, h)?,
            "xzzx" => xzzx(w, h)?,
            "color" => color(w)?,
            _ => unreachable!(),
        };
        return Ok(rec(code, Source::Generator));
    }
    match id {
        "t422" | "t512" | "t642" | "steane_7" | "concat_21" => {
            let text = fixtures::read(&format!("scripts/{id}.jsonl"))?;
            let moves = parse_script(&text)?;
            Ok(rec(build_code(id, &moves)?, Source::MoveScript))
        }
        other => Err(Error::UnknownCode(other.to_string())),
    }
}

/// A built-in id, or a path to a check-matrix file or a `.jsonl` move script.
pub fn load(reference: &str) -> Result<CodeRecord> {
    let path = std::path::Path::new(reference);
    if !path.is_file() {
        return builtin(reference);
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{reference}: {e}")))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| reference.to_string());
    let (code, source) = if path.extension().is_some_and(|e| e == "jsonl") {
        (build_code(&name, &parse_script(&text)?)?, Source::MoveScript)
    } else {
        (parse_check_matrix(&name, &text)?, Source::File)
    };
    Ok(CodeRecord {
        id: name,
        code,
        source,
    })
}

/// `surface(4,5)`, `surface_4x5`, `xzzx(4,4)`, `color(7)`.
fn parse_family(id: &str) -> Option<(&'static str, usize, usize)> {
    for family in ["surface", "xzzx", "color"] {
        let Some(rest) = id.strip_prefix(family) else {
            continue;
        };
        let args = if let Some(r) = rest.strip_prefix('(') {
            r.strip_suffix(')')?.to_string()
        } else {
            rest.strip_prefix('_')?.replace('x', ",")
        };
        let nums: Vec<usize> = args
            .split(',')
            .map(|s| s.trim().parse().ok())
            .collect::<Option<_>>()?;
        return match (family, nums.as_slice()) {
            ("color", [d]) => Some(("color", *d, *d)),
            ("surface" | "xzzx", [w, h]) => Some((family, *w, *h)),
            _ => None,
        };
    }
    None
}

/// A CSS check matrix given as separate `H_X` / `H_Z` blocks, with a column
/// reordering applied to `H_Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedMatrix {
    pub h_x: Vec<String>,
    pub h_z: Vec<String>,
    pub z_columns: Vec<usize>,
}

impl PrintedMatrix {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = "";
        let (mut h_x, mut h_z, mut z_columns) = (Vec::new(), Vec::new(), None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                section = match line {
                    "[h_x]" => "x",
                    "[h_z]" => "z",
                    "[z_columns]" => "p",
                    _ => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("unknown section {line}"),
                        })
                    }
                };
                continue;
            }
            match section {
                "x" => h_x.push(line.to_string()),
                "z" => h_z.push(line.to_string()),
                "p" => {
                    let p: std::result::Result<Vec<usize>, _> =
                        line.split_whitespace().map(str::parse).collect();
                    z_columns = Some(p.map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: e.to_string(),
                    })?);
                }
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "row outside a section".into(),
                    })
                }
            }
        }
        let n = h_x.first().map_or(0, String::len);
        let z_columns = z_columns.unwrap_or_else(|| (0..n).collect());
        let mut seen = z_columns.clone();
        seen.sort_unstable();
        if seen != (0..n).collect::<Vec<_>>() {
            return Err(Error::Parse {
                line: 0,
                msg: "z_columns is not a permutation".into(),
            });
        }
        Ok(PrintedMatrix { h_x, h_z, z_columns })
    }

    pub fn num_qubits(&self) -> usize {
        self.z_columns.len()
    }

    /// Stabilizer rows: `(h_x | 0)` then `(0 | h_z permuted)`.
    pub fn check_matrix(&self) -> Result<CheckMatrix> {
        let n = self.num_qubits();
        let mut rows = Vec::new();
        let bits = |s: &str, line: usize| -> Result<Vec<bool>> {
            if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse {
                    line,
                    msg: format!("row `{s}` is not {n} bits"),
                });
            }
            Ok(s.chars().map(|c| c == '1').collect())
        };
        for (i, r) in self.h_x.iter().enumerate() {
            let x = bits(r, i + 1)?;
            rows.push(PauliString::from_bits(&x, &vec![false; n])?);
        }
        for (i, r) in self.h_z.iter().enumerate() {
            let z = bits(r, i + 1)?;
            let z: Vec<bool> = self.z_columns.iter().map(|&c| z[c]).collect();
            rows.push(PauliString::from_bits(&vec![false; n], &z)?);
        }
        CheckMatrix::new(n, rows)
    }

    pub fn to_code(&self, name: &str) -> Result<StabilizerCode> {
        StabilizerCode::from_stabilizer(
            name,
            self.check_matrix()?,
            Provenance::AppendixMatrix(name.to_string()),
        )
    }
}

fn row_bits(row: &PauliString) -> String {
    let n = row.num_qubits();
    let mut s = String::with_capacity(2 * n + 1);
    for q in 0..n {
        s.push(if row.x_bit(q) { '1' } else { '0' });
    }
    s.push('|');
    for q in 0..n {
        s.push(if row.z_bit(q) { '1' } else { '0' });
    }
    s
}

/// One parsed row: source line, sign, and symbols.
type Row = (usize, bool, Vec<u8>);

/// Parse the check-matrix text format. Validates commutation and rank;
/// logical representatives are derived when the section is absent.
pub fn parse_check_matrix(name: &str, text: &str) -> Result<StabilizerCode> {
    let mut sections: BTreeMap<&str, Vec<Row>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            let s = match line {
                "[stabilizers]" => "stabilizers",
                "[logicals]" => "logicals",
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unknown section {other}"),
                    })
                }
            };
            current = Some(s);
            sections.entry(s).or_default();
            continue;
        }
        let Some(sec) = current else {
            return Err(Error::Parse {
                line: i + 1,
                msg: "row before any section".into(),
            });
        };
        let (neg, body) = match line.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, line.strip_prefix('+').unwrap_or(line)),
        };
        let mut bits = Vec::new();
        for c in body.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                '|' | ' ' | '\t' => {}
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        if bits.len() % 2 != 0 || *width.get_or_insert(bits.len()) != bits.len() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("ragged row of {} bits", bits.len()),
            });
        }
        sections.get_mut(sec).unwrap().push((i + 1, neg, bits));
    }
    let n = width.unwrap_or(0) / 2;
    let stab_rows = sections.remove("stabilizers").unwrap_or_default();
    let signed = stab_rows.iter().any(|r| r.1);
    let rows: Vec<PauliString> = stab_rows
        .iter()
        .map(|r| PauliString::from_bit_row(&r.2))
        .collect::<Result<_>>()?;
    let signs: Vec<bool> = stab_rows.iter().map(|r| r.1).collect();
    let stabilizer = CheckMatrix::new(n, rows)?;
    if let Err(Error::NonCommuting(a, b)) = stabilizer.check_commuting() {
        return Err(Error::Parse {
            line: stab_rows[b].0,
            msg: format!("stabilizer rows {} and {} anticommute", a + 1, b + 1),
        });
    }
    let stabilizer = if signed {
        CheckMatrix::with_signs(n, stabilizer.rows().to_vec(), signs)?
    } else {
        stabilizer
    };
    let provenance = Provenance::File(name.to_string());
    match sections.remove("logicals") {
        Some(l) if !l.is_empty() => {
            let logicals = l
                .iter()
                .map(|r| PauliString::from_bit_row(&r.2))
                .collect::<Result<_>>()?;
            StabilizerCode::new(name, stabilizer, logicals, provenance)
        }
        _ => StabilizerCode::from_stabilizer(name, stabilizer, provenance),
    }
}

/// Canonical text form: stabilizers as stored, then logical pairs.
pub fn serialize(code: &StabilizerCode) -> String {
    let mut out = format!("# {} {}\n[stabilizers]\n", code.name, code.label());
    let s = code.stabilizer();
    for (i, r) in s.rows().iter().enumerate() {
        if s.sign(i) {
            out.push('-');
        }
        out.push_str(&row_bits(r));
        out.push('\n');
    }
    out.push_str("[logicals]\n");
    for l in code.logicals() {
        out.push_str(&row_bits(l));
        out.push('\n');
    }
    out
}

fn css_from_supports(n: usize, xs: &[Vec<usize>], zs: &[Vec<usize>]) -> Result<CheckMatrix> {
    let mut rows = Vec::new();
    for (support, is_x) in xs.iter().map(|s| (s, true)).chain(zs.iter().map(|s| (s, false))) {
        let mut p = PauliString::identity(n);
        for &q in support {
            p.set(q, is_x, !is_x);
        }
        rows.push(p);
    }
    CheckMatrix::new(n, rows)
}

/// Rotated surface code on a `w × h` grid of qubits (`q = r·w + c`).
/// Weight-2 boundary checks are X on the left/right sides and Z on the
/// top/bottom, so `d_X = w` and `d_Z = h`.
pub fn surface(w: usize, h: usize) -> Result<StabilizerCode> {
    let stab = rotated_lattice(w, h, false)?;
    StabilizerCode::from_stabilizer(
        format!("surface({w},{h})"),
        stab,
        Provenance::Generator(format!("surface({w},{h})")),
    )
}

/// The rotated lattice with X and Z exchanged on every other qubit, giving
/// uniform XZZX plaquettes.
pub fn xzzx(w: usize, h: usize) -> Result<StabilizerCode> {
    let stab = rotated_lattice(w, h, true)?;
    StabilizerCode::from_stabilizer(
        format!("xzzx({w},{h})"),
        stab,
        Provenance::Generator(format!("xzzx({w},{h})")),
    )
}

fn rotated_lattice(w: usize, h: usize, twist: bool) -> Result<CheckMatrix> {
    if w < 2 || h < 2 {
        return Err(Error::InvalidConfig(format!("lattice {w}x{h} is too small")));
    }
    let n = w * h;
    let mut rows = Vec::new();
    for r in -1..h as i64 {
        for c in -1..w as i64 {
            let mut qs = Vec::new();
            for (rr, cc) in [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)] {
                if rr >= 0 && cc >= 0 && rr < h as i64 && cc < w as i64 {
                    qs.push((rr as usize, cc as usize));
                }
            }
            let is_x = (r + c).rem_euclid(2) == 0;
            match qs.len() {
                4 => {}
                2 => {
                    let vertical = qs[0].1 == qs[1].1;
                    if vertical != is_x {
                        continue;
                    }
                }
                _ => continue,
            }
            let mut p = PauliString::identity(n);
            for (rr, cc) in qs {
                let flip = twist && (rr + cc) % 2 == 1;
                let x = is_x != flip;
                p.set(rr * w + cc, x, !x);
            }
            rows.push(p);
        }
    }
    CheckMatrix::new(n, rows)
}

/// Triangular 6.6.6 color code of odd distance `d`; every face is both an X
/// and a Z check.
pub fn color(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("color code distance {d} must be odd and >= 3")));
    }
    let half = (d - 1) / 2;
    let mut faces: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut order = Vec::new();
    for row in 0..half as i64 {
        for col in 0..(half as i64 - row) {
            let (gi, gj) = (1 + 3 * row, 3 * col);
            for ij in [(gi, gj), (gi - 1, gj + 2), (gi + 1, gj + 1)] {
                faces.insert(ij, order.len());
                order.push(ij);
            }
        }
    }
    let limit = (3 * (d as i64 - 1)) / 2;
    let inside = |i: i64, j: i64| i >= 0 && j >= 0 && i + j <= limit;
    let rows = 3 * half as i64 + 1;
    let mut supports = vec![Vec::new(); order.len()];
    let mut n = 0;
    for di in 0..rows {
        for dj in 0..rows - di {
            let class = (di + 2 * dj) % 3;
            if class == 1 {
                continue;
            }
            let dirs = if class == 0 {
                [(0, -1), (1, 0), (-1, 1)]
            } else {
                [(1, -1), (-1, 0), (0, 1)]
            };
            for (a, b) in dirs {
                let s = (di + a, dj + b);
                if inside(s.0, s.1) {
                    supports[faces[&s]].push(n);
                }
            }
            n += 1;
        }
    }
    let stab = css_from_supports(n, &supports, &supports)?;
    StabilizerCode::from_stabilizer(
        format!("color_{n}"),
        stab,
        Provenance::Generator(format!("color({d})")),
    )
}

/// Quantum Reed–Muller `[[15,1,3]]` on the nonzero points of `F_2^4`.
/// X checks: the four weight-8 hyperplane complements and the six weight-4
/// pairwise intersections; Z checks: the four weight-8 rows. `d_X = 3`,
/// `d_Z = 7`.
pub fn reed_muller_15() -> Result<StabilizerCode> {
    let n = 15;
    let on = |p: usize, i: usize| (p >> i) & 1 == 1;
    let big: Vec<Vec<usize>> = (0..4)
        .map(|i| (1..16).filter(|&p| on(p, i)).map(|p| p - 1).collect())
        .collect();
    let mut small = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            small.push((1..16).filter(|&p| on(p, i) && on(p, j)).map(|p| p - 1).collect());
        }
    }
    let mut xs = big.clone();
    xs.extend(small);
    let stab = css_from_supports(n, &xs, &big)?;
    StabilizerCode::from_stabilizer(
        "reed_muller_15",
        stab,
        Provenance::Generator("reed_muller_15".into()),
    )
}
