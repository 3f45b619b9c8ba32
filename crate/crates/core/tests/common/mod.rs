#![allow(dead_code)]

use emz_spectral::catalog::{Family, OperatorSpec, OrderedRepData};
use emz_spectral::realset::{Interval, RealSet, SpectralMeasureClass, WeightedPPMeasure, Window};
use emz_spectral::schema::SystemFile;
use emz_spectral::vectorop::EMZSystem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> EMZSystem {
    SystemFile::from_json(&fixture_text(name))
        .unwrap()
        .system(None)
        .unwrap()
}

pub fn window() -> Window {
    Window::new(-10.0, 10.0).unwrap()
}

/// Operator with integer atoms and half-integer interval endpoints in [-10, 10],
/// with `1..=max_levels` nested multiplicity sets.
pub fn random_symbolic(rng: &mut ChaCha8Rng, id: &str, max_levels: usize, with_ac: bool) -> OperatorSpec {
    let w = window();
    loop {
        let mut ivs = Vec::new();
        if with_ac && rng.random_bool(0.6) {
            for _ in 0..rng.random_range(1..=2) {
                let lo = f64::from(rng.random_range(-20..16)) / 2.0;
                let len = f64::from(rng.random_range(1..=8)) / 2.0;
                ivs.push(Interval::open(lo, (lo + len).min(10.0)));
            }
        }
        let atoms: Vec<f64> = (-10..=10).filter(|_| rng.random_bool(0.3)).map(f64::from).collect();
        let ac = RealSet::new(w, ivs, Vec::new()).unwrap();
        let pp = RealSet::from_atoms(w, atoms).unwrap();
        let Ok(theta) = SpectralMeasureClass::new(ac, pp) else {
            continue;
        };
        if theta.is_zero() {
            continue;
        }
        let mut sets = vec![theta.support().closure()];
        let levels = rng.random_range(1..=max_levels);
        while sets.len() < levels {
            let prev = sets.last().unwrap();
            let mut ivs = Vec::new();
            for iv in prev.intervals() {
                if rng.random_bool(0.7) {
                    let cut = iv.lo + iv.length() * f64::from(rng.random_range(1..=4)) / 4.0;
                    ivs.push(Interval::closed(iv.lo, cut));
                }
            }
            let atoms: Vec<f64> = prev
                .atoms()
                .iter()
                .copied()
                .filter(|a| theta.pp_support().contains(*a) && rng.random_bool(0.6))
                .collect();
            let next = RealSet::new(w, ivs, atoms).unwrap().intersect(prev).unwrap();
            if !theta.sign(&next).unwrap().is_positive() {
                break;
            }
            sets.push(next);
        }
        let weights = (!theta.pp_support().is_empty()).then(|| {
            let atoms = theta.pp_support().atoms();
            WeightedPPMeasure::new(atoms.iter().map(|a| (*a, 1.0 / atoms.len() as f64)).collect(), 1e-9).unwrap()
        });
        let data = OrderedRepData::new(theta, sets, weights).unwrap();
        return OperatorSpec::new(id, Family::Symbolic(data)).unwrap();
    }
}

pub fn random_system(rng: &mut ChaCha8Rng, max_ops: usize, max_levels: usize, with_ac: bool) -> EMZSystem {
    let n = rng.random_range(1..=max_ops);
    let ops = (0..n)
        .map(|j| random_symbolic(rng, &format!("S{j}"), max_levels, with_ac))
        .collect();
    EMZSystem::new(window(), ops).unwrap()
}

/// All set partitions of `0..n` as restricted-growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=used {
            cur.push(c);
            go(n, cur, used.max(c + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}

/// Minimum number of blocks over all partitions of the nodes into independent sets.
pub fn brute_force_min_partition(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    set_partitions(n)
        .into_iter()
        .filter(|p| (0..n).all(|a| (a + 1..n).all(|b| !(adj[a][b] && p[a] == p[b]))))
        .map(|p| p.iter().max().unwrap() + 1)
        .min()
        .unwrap()
}

/// Superposition decided from raw supports: an atom of one slot inside the
/// other's support, or a common interval of positive length.
pub fn oracle_adjacency(sys: &EMZSystem) -> Vec<Vec<bool>> {
    let slots = sys.slots();
    let n = slots.len();
    let mut adj = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (sa, sb) = (&slots[a].class, &slots[b].class);
            let atom_hit = sa.pp_support().atoms().iter().any(|x| sb.support().contains(*x));
            let ac_hit = sa.ac_support().intervals().iter().any(|i| {
                sb.ac_support()
                    .intervals()
                    .iter()
                    .any(|j| i.hi.min(j.hi) - i.lo.max(j.lo) > 0.0)
            });
            if atom_hit || ac_hit {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    adj
}
