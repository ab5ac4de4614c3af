//! Independent oracles: brute-force Pauli scans, exact rational error rates,
//! and frozen enumerator values.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use qlego::codelib;
use qlego::enumerator::{EnumConfig, Enumerators, NoiseModel};
use qlego::fixtures;
use qlego::{PauliString, StabilizerCode};

fn masks(p: &PauliString) -> (u32, u32) {
    let mut x = 0;
    let mut z = 0;
    for q in 0..p.num_qubits() {
        x |= (p.x_bit(q) as u32) << q;
        z |= (p.z_bit(q) as u32) << q;
    }
    (x, z)
}

fn anticommute(a: (u32, u32), b: (u32, u32)) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1
}

type Hist = BTreeMap<(usize, usize, usize), u64>;

struct Scan {
    a: Hist,
    b: Hist,
    c: Hist,
    d: Option<usize>,
}

/// Walk all 4^n Paulis; group membership by explicit product closure.
fn brute_force(code: &StabilizerCode) -> Scan {
    let n = code.n();
    let gens: Vec<(u32, u32)> = code.stabilizer().rows().iter().map(masks).collect();
    let mut group = HashSet::new();
    for sel in 0u32..(1 << gens.len()) {
        let mut e = (0, 0);
        for (i, g) in gens.iter().enumerate() {
            if sel >> i & 1 == 1 {
                e = (e.0 ^ g.0, e.1 ^ g.1);
            }
        }
        group.insert(e);
    }
    let mut scan = Scan {
        a: Hist::new(),
        b: Hist::new(),
        c: Hist::new(),
        d: None,
    };
    for x in 0u32..(1 << n) {
        for z in 0u32..(1 << n) {
            let p = (x, z);
            if gens.iter().any(|&g| anticommute(p, g)) {
                continue;
            }
            let key = (
                x.count_ones() as usize,
                z.count_ones() as usize,
                (x | z).count_ones() as usize,
            );
            *scan.b.entry(key).or_default() += 1;
            if group.contains(&p) {
                *scan.a.entry(key).or_default() += 1;
            } else {
                *scan.c.entry(key).or_default() += 1;
                scan.d = Some(scan.d.map_or(key.2, |d: usize| d.min(key.2)));
            }
        }
    }
    scan
}

#[test]
fn small_codes_match_brute_force() {
    let expected = [("t422", 4, 2, 2), ("t512", 5, 1, 2), ("t642", 6, 4, 2), ("steane_7", 7, 1, 3)];
    for (id, n, k, d) in expected {
        let code = codelib::builtin(id).unwrap().code;
        assert_eq!((code.n(), code.k()), (n, k), "{id}");
        let e = Enumerators::compute(&code, &EnumConfig::default()).unwrap();
        let scan = brute_force(&code);
        assert_eq!(e.a.to_map(), scan.a, "{id} A");
        assert_eq!(e.b.to_map(), scan.b, "{id} B");
        assert_eq!(e.c.to_map(), scan.c, "{id} C");
        assert_eq!(e.distances().d, scan.d, "{id} d");
        assert_eq!(scan.d, Some(d), "{id}");
    }
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn pow(base: &BigRational, e: usize) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= base;
    }
    r
}

/// Exact `sum_{wx,wz} h[wx][wz] p_x^wx (1-p_x)^(n-wx) p_z^wz (1-p_z)^(n-wz)`.
fn exact_sum(n: usize, h: &qlego::enumerator::DoubleEnumerator, px: &BigRational, pz: &BigRational) -> BigRational {
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for (wx, wz, c) in h.entries() {
        let term = pow(px, wx) * pow(&(&one - px), n - wx) * pow(pz, wz) * pow(&(&one - pz), n - wz);
        total += term * BigRational::from_integer(BigInt::from(c));
    }
    total
}

#[test]
fn error_rates_match_exact_rationals() {
    let (px, pz) = (rational(1, 100), rational(1, 20));
    let noise = NoiseModel { p_x: 0.01, p_z: 0.05 };
    for id in ["steane_7", "BN13A", "DM13", "reed_muller_15", "BN17", "color_19", "surface(4,5)"] {
        let code = codelib::builtin(id).unwrap().code;
        let e = Enumerators::compute(&code, &EnumConfig::default()).unwrap();
        let r = e.error_rates(&noise).unwrap();
        let p_l = exact_sum(e.n, &e.c.double(), &px, &pz);
        let p_s0 = exact_sum(e.n, &e.b.double(), &px, &pz);
        let norm = &p_l / &p_s0;
        for (got, want) in [(r.p_l, p_l), (r.p_s0, p_s0), (r.p_l_norm, norm)] {
            let want = want.to_f64().unwrap();
            assert!(((got - want) / want).abs() <= 1e-12, "{id}: {got} vs {want}");
        }
    }
}

#[test]
fn bn17_scalar_enumerators() {
    let code = codelib::builtin("BN17").unwrap().code;
    let e = Enumerators::compute(&code, &EnumConfig::default()).unwrap();
    assert_eq!(
        e.a.scalar(),
        vec![1, 0, 0, 3, 13, 24, 54, 253, 689, 1638, 4004, 8189, 12787, 14876, 12550, 7331, 2670, 454]
    );
    assert_eq!(
        e.b.scalar(),
        vec![1, 0, 0, 7, 25, 56, 198, 809, 2565, 6934, 16644, 33209, 51079, 58588, 49494, 29559, 11066, 1910]
    );
}

#[test]
fn appendix_matrices_as_printed() {
    let shapes = [("DM13", 13, 6, 6), ("BN13A", 13, 6, 6), ("BN13B", 13, 6, 6), ("BN17", 17, 8, 8)];
    for (id, n, rx, rz) in shapes {
        let text = fixtures::read(&format!("appendix/{id}.txt")).unwrap();
        let printed = codelib::PrintedMatrix::parse(&text).unwrap();
        assert_eq!(printed.num_qubits(), n, "{id}");
        assert_eq!((printed.h_x.len(), printed.h_z.len()), (rx, rz), "{id}");
        let code = codelib::builtin(id).unwrap().code;
        assert_eq!((code.n(), code.k()), (n, 1), "{id}");
        assert!(code.is_css(), "{id}");
    }
}

#[test]
fn fixture_checksums() {
    let sums = include_str!("../fixtures/checksums.sha256");
    let mut seen = 0;
    for line in sums.lines().filter(|l| !l.trim().is_empty()) {
        let (hash, name) = line.split_once("  ").unwrap();
        let path = format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
        let bytes = std::fs::read(&path).unwrap();
        let got: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(got, hash, "{name}");
        seen += 1;
    }
    assert!(seen >= fixtures::EMBEDDED.len());
}

#[test]
fn text_format_round_trip() {
    for id in codelib::BUILTIN_IDS {
        let code = codelib::builtin(id).unwrap().code;
        let text = codelib::serialize(&code);
        let back = codelib::parse_check_matrix(id, &text).unwrap();
        assert!(back.stabilizer().same_span(code.stabilizer()), "{id}");
        assert_eq!(back.logicals(), code.logicals(), "{id}");
    }
}
