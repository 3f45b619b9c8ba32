use crate::catalog::OrderedRepData;
use crate::error::{Error, Result};
use crate::realset::RealSet;
use crate::vectorop::EMZSystem;

/// Default cap on the number of band intersections evaluated.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Level sets of one operator split by spectral type: `pp[k]` holds the atoms
/// of `θ_i` in `e_{k+1}`, `ac[k]` the intervals of `e_{k+1}` inside the closed
/// continuous support.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSets {
    pub pp: Vec<RealSet>,
    pub ac: Vec<RealSet>,
}

impl LevelSets {
    pub fn new(rep: &OrderedRepData) -> Result<Self> {
        let atoms = rep.theta.pp_support();
        let cont = rep.theta.ac_support().closure();
        let mut pp = Vec::new();
        let mut ac = Vec::new();
        for e in &rep.mult_sets {
            pp.push(e.intersect(atoms)?);
            ac.push(e.intersect(&cont)?.intervals_only());
        }
        Ok(LevelSets { pp, ac })
    }
}

fn level_of(sets: &[RealSet], lambda: f64) -> usize {
    sets.iter().take_while(|e| e.contains(lambda)).count()
}

/// Whether `λ` is an atom of some coordinate measure.
pub fn is_theta_atom(sys: &EMZSystem, lambda: f64) -> bool {
    sys.operator_reps()
        .iter()
        .any(|r| r.theta.pp_support().contains(lambda))
}

/// `Σ_i max{k : λ ∈ e_k^i}`, counted over point levels at atoms of the
/// measure and over continuous levels elsewhere (the two parts are mutually
/// singular, so they never add up at one point).
pub fn pointwise_multiplicity(sys: &EMZSystem, lambda: f64) -> usize {
    let atom = is_theta_atom(sys, lambda);
    sys.operator_reps()
        .iter()
        .map(|rep| {
            let sets: Vec<RealSet> = if atom {
                rep.mult_sets
                    .iter()
                    .map(|e| e.intersect(rep.theta.pp_support()).expect("same window"))
                    .collect()
            } else {
                let cont = rep.theta.ac_support().closure();
                rep.mult_sets
                    .iter()
                    .map(|e| e.intersect(&cont).expect("same window"))
                    .collect()
            };
            level_of(&sets, lambda)
        })
        .sum()
}

struct Enumerator<'a> {
    levels: &'a [&'a [RealSet]],
    n: usize,
    budget: usize,
    used: &'a mut usize,
    out: RealSet,
}

impl Enumerator<'_> {
    fn band(&self, i: usize, m: usize) -> Result<RealSet> {
        let sets = self.levels[i];
        match sets.get(m) {
            Some(next) => sets[m - 1].difference(next),
            None => Ok(sets[m - 1].clone()),
        }
    }

    fn charge(&mut self) -> Result<()> {
        *self.used += 1;
        if *self.used > self.budget {
            return Err(Error::EnumerationBudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Subsets of operators `i..` with one exact level each, intersected into `acc`.
    fn go(&mut self, i: usize, acc: Option<RealSet>, size: usize, sum: usize) -> Result<()> {
        let remaining: usize = self.levels[i..].iter().map(|l| l.len()).sum();
        if sum + remaining < self.n {
            return Ok(());
        }
        if i == self.levels.len() {
            if size >= 2 && sum >= self.n {
                if let Some(acc) = acc {
                    self.out = self.out.union(&acc)?;
                }
            }
            return Ok(());
        }
        self.go(i + 1, acc.clone(), size, sum)?;
        for m in 1..=self.levels[i].len() {
            self.charge()?;
            let band = self.band(i, m)?;
            let next = match &acc {
                Some(a) => a.intersect(&band)?,
                None => band,
            };
            if next.is_empty() {
                continue;
            }
            self.go(i + 1, Some(next), size + 1, sum + m)?;
        }
        Ok(())
    }
}

/// `[⋃_i e_n^i] ∪ [⋃_{|S|≥2, Σ m_i ≥ n} ⋂_{i∈S} (e^i_{m_i} \ e^i_{m_i+1})]`.
pub fn mult_set_formula(levels: &[&[RealSet]], n: usize, budget: usize, used: &mut usize) -> Result<RealSet> {
    let window = levels
        .iter()
        .find_map(|l| l.first())
        .map(RealSet::window)
        .ok_or_else(|| Error::Schema("no level sets".into()))?;
    let mut out = RealSet::empty(window);
    for l in levels {
        if let Some(e) = l.get(n - 1) {
            out = out.union(e)?;
        }
    }
    let mut en = Enumerator {
        levels,
        n,
        budget,
        used,
        out,
    };
    en.go(0, None, 0, 0)?;
    Ok(en.out)
}

/// Outcome of [`build_multiplicity_sets`]: on budget exhaustion the sets
/// completed so far are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicitySets {
    pub sets: Vec<RealSet>,
    pub combinations: usize,
}

/// `s_1, …, s_{n_max}` with `s_1` the window.
pub fn build_multiplicity_sets(sys: &EMZSystem, n_max: usize, budget: usize) -> Result<Vec<RealSet>> {
    build_multiplicity_sets_partial(sys, n_max, budget)
        .map_err(|(e, _)| e)
        .map(|m| m.sets)
}

/// As [`build_multiplicity_sets`], returning the completed prefix alongside an error.
pub fn build_multiplicity_sets_partial(
    sys: &EMZSystem,
    n_max: usize,
    budget: usize,
) -> std::result::Result<MultiplicitySets, (Error, MultiplicitySets)> {
    let window = sys.window();
    let mut done = MultiplicitySets {
        sets: Vec::new(),
        combinations: 0,
    };
    if n_max == 0 {
        return Ok(done);
    }
    done.sets.push(RealSet::full(window));
    let level_sets: Vec<LevelSets> = match sys.operator_reps().iter().map(LevelSets::new).collect() {
        Ok(l) => l,
        Err(e) => return Err((e, done)),
    };
    let pp: Vec<&[RealSet]> = level_sets.iter().map(|l| l.pp.as_slice()).collect();
    let ac: Vec<&[RealSet]> = level_sets.iter().map(|l| l.ac.as_slice()).collect();
    let atoms: Vec<f64> = sys
        .operator_reps()
        .iter()
        .flat_map(|r| r.theta.pp_support().atoms().iter().copied())
        .collect();
    let mut used = 0;
    for n in 2..=n_max {
        let step = (|| -> Result<RealSet> {
            let p = mult_set_formula(&pp, n, budget, &mut used)?;
            let c = mult_set_formula(&ac, n, budget, &mut used)?
                .intervals_only()
                .remove_points(&atoms);
            c.union(&p)
        })();
        done.combinations = used;
        match step {
            Ok(s) => done.sets.push(s),
            Err(e) => return Err((e, done)),
        }
    }
    Ok(done)
}
