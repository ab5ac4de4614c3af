//! Dense state-vector oracle for contraction, signs included.

use proptest::prelude::*;

use qlego::lego::{Lego, TensorNetwork};
use qlego::{CheckMatrix, Error, PauliString};

type C = (f64, f64);

/// `P |v>` with Hermitian `Y = iXZ`; qubit `q` is bit `q` of the index.
fn apply(p: &PauliString, v: &[C]) -> Vec<C> {
    let mut out = vec![(0.0, 0.0); v.len()];
    for (i, &(re, im)) in v.iter().enumerate() {
        let mut j = i;
        let mut phase = 0u32;
        for q in 0..p.num_qubits() {
            let bit = (i >> q) & 1;
            match (p.x_bit(q), p.z_bit(q)) {
                (true, false) => j ^= 1 << q,
                (false, true) => phase += 2 * bit as u32,
                (true, true) => {
                    j ^= 1 << q;
                    phase += if bit == 0 { 1 } else { 3 };
                }
                (false, false) => {}
            }
        }
        let (re, im) = match phase % 4 {
            0 => (re, im),
            1 => (-im, re),
            2 => (-re, -im),
            _ => (im, -re),
        };
        out[j].0 += re;
        out[j].1 += im;
    }
    out
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.0 * c.0 + c.1 * c.1).sum::<f64>().sqrt()
}

/// The state stabilized by the signed rows of `m`.
fn state(m: &CheckMatrix) -> Vec<C> {
    let dim = 1 << m.num_qubits();
    for start in 0..dim {
        let mut v = vec![(0.0, 0.0); dim];
        v[start] = (1.0, 0.0);
        for (i, g) in m.rows().iter().enumerate() {
            let s = if m.sign(i) { -1.0 } else { 1.0 };
            let gv = apply(g, &v);
            for k in 0..dim {
                v[k] = (0.5 * (v[k].0 + s * gv[k].0), 0.5 * (v[k].1 + s * gv[k].1));
            }
        }
        if norm(&v) > 1e-6 {
            return v;
        }
    }
    unreachable!("stabilizer state has a nonzero projection on some basis vector")
}

fn tensor(a: &[C], a_qubits: usize, b: &[C]) -> Vec<C> {
    let mut out = vec![(0.0, 0.0); a.len() * b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i | (j << a_qubits)] = (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
        }
    }
    out
}

/// `<Φ+|_{ab} v`, unnormalized.
fn bell(v: &[C], m: usize, a: usize, b: usize) -> Vec<C> {
    let keep: Vec<usize> = (0..m).filter(|&q| q != a && q != b).collect();
    let mut out = vec![(0.0, 0.0); 1 << (m - 2)];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut base = 0;
        for (k, &q) in keep.iter().enumerate() {
            base |= ((r >> k) & 1) << q;
        }
        for j in 0..2 {
            let c = v[base | (j << a) | (j << b)];
            slot.0 += c.0;
            slot.1 += c.1;
        }
    }
    out
}

fn network() -> impl Strategy<Value = (Vec<&'static str>, Vec<usize>, usize)> {
    let lego = prop_oneof![Just("T6"), Just("H"), Just("S")];
    prop::collection::vec(lego, 1..=5)
        .prop_filter("at most 12 legs", |ids| legs(ids) <= 12)
        .prop_flat_map(|ids| {
            let total = legs(&ids);
            let order: Vec<usize> = (1..=total).collect();
            (Just(ids), Just(order).prop_shuffle(), 0..=total / 2)
        })
}

fn legs(ids: &[&str]) -> usize {
    ids.iter().map(|id| if *id == "T6" { 6 } else { 2 }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contraction_matches_state_vector((ids, order, pairs) in network()) {
        let legos: Vec<Lego> = ids.iter().map(|id| Lego::by_id(id).unwrap()).collect();
        let mut v = vec![(1.0, 0.0)];
        let mut qubits = 0;
        let mut net = TensorNetwork::new();
        for l in &legos {
            v = tensor(&v, qubits, &state(l.state()));
            qubits += l.num_legs();
            net.push_lego(l.clone());
        }
        let mut dangling: Vec<usize> = (1..=qubits).collect();
        for pair in order.chunks(2).take(pairs) {
            let [a, b] = [pair[0], pair[1]];
            let ia = dangling.iter().position(|&x| x == a).unwrap();
            let ib = dangling.iter().position(|&x| x == b).unwrap();
            v = bell(&v, dangling.len(), ia, ib);
            dangling.retain(|&x| x != a && x != b);
            let null = norm(&v) < 1e-9;
            match net.push_edge(a, b) {
                Err(Error::ContractionInconsistent(..)) => {
                    prop_assert!(null, "reported null, amplitude {}", norm(&v));
                    return Ok(());
                }
                Err(e) => prop_assert!(false, "{e}"),
                Ok(()) => prop_assert!(!null, "missed a null contraction"),
            }
            let s = net.signed_state();
            for (i, g) in s.rows().iter().enumerate() {
                let sign = if s.sign(i) { -1.0 } else { 1.0 };
                let gv = apply(g, &v);
                for k in 0..v.len() {
                    prop_assert!((gv[k].0 - sign * v[k].0).abs() < 1e-9);
                    prop_assert!((gv[k].1 - sign * v[k].1).abs() < 1e-9);
                }
            }
        }
    }
}
