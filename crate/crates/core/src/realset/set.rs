use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default identification tolerance for atoms and interval endpoints.
pub const DEFAULT_EPS_ATOM: f64 = 1e-9;

/// Closed working window `[lo, hi]` on the spectral axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidWindow(lo, hi));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl TryFrom<[f64; 2]> for Window {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Window::new(v[0], v[1])
    }
}

impl From<Window> for [f64; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

/// An interval with independent open/closed endpoint flags.
///
/// Endpoints may be infinite before truncation to a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    /// Point membership with endpoint snapping at `eps`.
    fn contains_point(&self, x: f64, eps: f64) -> bool {
        if self.hi - self.lo <= eps {
            return (self.lo_closed || self.hi_closed) && (x - self.lo).abs() <= eps;
        }
        if (x - self.lo).abs() <= eps {
            self.lo_closed
        } else if (x - self.hi).abs() <= eps {
            self.hi_closed
        } else {
            self.lo < x && x < self.hi
        }
    }

    fn contains_strict(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Boolean operation selector for [`RealSet::combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Diff,
}

impl SetOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersect => a && b,
            SetOp::Diff => a && !b,
        }
    }
}

/// A finite union of intervals and isolated atoms inside a closed window.
///
/// Values are always in canonical form: intervals sorted, disjoint and
/// non-touching; atoms sorted, separated by more than `eps`, and never inside
/// an interval; an atom sitting on an interval endpoint closes that endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealSetRepr", into = "RealSetRepr")]
pub struct RealSet {
    window: Window,
    intervals: Vec<Interval>,
    atoms: Vec<f64>,
    generator: Option<String>,
    eps: f64,
}

#[derive(Serialize, Deserialize)]
struct RealSetRepr {
    window: Window,
    #[serde(default)]
    intervals: Vec<Interval>,
    #[serde(default)]
    atoms: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
}

impl TryFrom<RealSetRepr> for RealSet {
    type Error = Error;

    fn try_from(r: RealSetRepr) -> Result<Self> {
        let mut set = RealSet::new(r.window, r.intervals, r.atoms)?;
        set.generator = r.generator;
        Ok(set)
    }
}

impl From<RealSet> for RealSetRepr {
    fn from(s: RealSet) -> Self {
        RealSetRepr {
            window: s.window,
            intervals: s.intervals,
            atoms: s.atoms,
            generator: s.generator,
        }
    }
}

impl RealSet {
    pub fn new(window: Window, intervals: Vec<Interval>, atoms: Vec<f64>) -> Result<Self> {
        Self::with_eps(window, intervals, atoms, DEFAULT_EPS_ATOM)
    }

    pub fn with_eps(window: Window, intervals: Vec<Interval>, atoms: Vec<f64>, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidSet(format!("atom tolerance {eps} must be positive")));
        }
        for iv in &intervals {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                return Err(Error::InvalidSet(format!(
                    "interval ({}, {}) is not ordered",
                    iv.lo, iv.hi
                )));
            }
        }
        if let Some(a) = atoms.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidSet(format!("atom {a} is not finite")));
        }
        let mut points: Vec<f64> = atoms.clone();
        for iv in &intervals {
            points.push(iv.lo);
            points.push(iv.hi);
        }
        let (intervals_out, atoms_out) = sweep(window, eps, points, |x, strict| {
            if strict {
                intervals.iter().any(|iv| iv.contains_strict(x))
            } else {
                atoms.iter().any(|a| (a - x).abs() <= eps) || intervals.iter().any(|iv| iv.contains_point(x, eps))
            }
        });
        Ok(RealSet {
            window,
            intervals: intervals_out,
            atoms: atoms_out,
            generator: None,
            eps,
        })
    }

    pub fn empty(window: Window) -> Self {
        Self::empty_with_eps(window, DEFAULT_EPS_ATOM)
    }

    pub fn empty_with_eps(window: Window, eps: f64) -> Self {
        RealSet {
            window,
            intervals: Vec::new(),
            atoms: Vec::new(),
            generator: None,
            eps,
        }
    }

    /// The whole window as a closed interval.
    pub fn full(window: Window) -> Self {
        Self::full_with_eps(window, DEFAULT_EPS_ATOM)
    }

    pub fn full_with_eps(window: Window, eps: f64) -> Self {
        RealSet {
            window,
            intervals: vec![Interval::closed(window.lo, window.hi)],
            atoms: Vec::new(),
            generator: None,
            eps,
        }
    }

    pub fn from_atoms(window: Window, atoms: Vec<f64>) -> Result<Self> {
        Self::new(window, Vec::new(), atoms)
    }

    pub fn from_interval(window: Window, interval: Interval) -> Result<Self> {
        Self::new(window, vec![interval], Vec::new())
    }

    pub fn with_generator(mut self, generator: impl Into<String>) -> Self {
        self.generator = Some(generator.into());
        self
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn generator(&self) -> Option<&str> {
        self.generator.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.atoms.is_empty()
    }

    /// True when some interval of positive length is present.
    pub fn has_interval(&self) -> bool {
        !self.intervals.is_empty()
    }

    pub fn lebesgue_measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.atoms.iter().any(|a| (a - x).abs() <= self.eps)
            || self.intervals.iter().any(|iv| iv.contains_point(x, self.eps))
    }

    /// Whether `x` lies within `eps` of an interval endpoint or an atom.
    pub fn is_boundary_point(&self, x: f64) -> bool {
        self.atoms.iter().any(|a| (a - x).abs() <= self.eps)
            || self
                .intervals
                .iter()
                .any(|iv| (iv.lo - x).abs() <= self.eps || (iv.hi - x).abs() <= self.eps)
    }

    pub fn combine(&self, other: &RealSet, op: SetOp) -> Result<RealSet> {
        if self.window != other.window {
            return Err(Error::WindowMismatch(
                self.window.lo,
                self.window.hi,
                other.window.lo,
                other.window.hi,
            ));
        }
        let eps = self.eps.max(other.eps);
        let mut points = self.breakpoints();
        points.extend(other.breakpoints());
        let (intervals, atoms) = sweep(self.window, eps, points, |x, strict| {
            let (a, b) = if strict {
                (self.contains_strict(x), other.contains_strict(x))
            } else {
                (self.contains(x), other.contains(x))
            };
            op.apply(a, b)
        });
        Ok(RealSet {
            window: self.window,
            intervals,
            atoms,
            generator: None,
            eps,
        })
    }

    pub fn union(&self, other: &RealSet) -> Result<RealSet> {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &RealSet) -> Result<RealSet> {
        self.combine(other, SetOp::Intersect)
    }

    pub fn difference(&self, other: &RealSet) -> Result<RealSet> {
        self.combine(other, SetOp::Diff)
    }

    /// Complement relative to the window.
    pub fn complement(&self) -> RealSet {
        RealSet::full_with_eps(self.window, self.eps)
            .difference(self)
            .expect("same window")
    }

    pub fn closure(&self) -> RealSet {
        let intervals = self.intervals.iter().map(|iv| Interval::closed(iv.lo, iv.hi)).collect();
        let mut out = RealSet::with_eps(self.window, intervals, self.atoms.clone(), self.eps).expect("canonical input");
        out.generator = self.generator.clone();
        out
    }

    /// The atoms of this set as a set of their own.
    pub fn atoms_only(&self) -> RealSet {
        RealSet {
            window: self.window,
            intervals: Vec::new(),
            atoms: self.atoms.clone(),
            generator: self.generator.clone(),
            eps: self.eps,
        }
    }

    /// The interval part, dropping isolated atoms.
    pub fn intervals_only(&self) -> RealSet {
        RealSet {
            window: self.window,
            intervals: self.intervals.clone(),
            atoms: Vec::new(),
            generator: None,
            eps: self.eps,
        }
    }

    /// Removes the given points (punching holes into intervals where needed).
    pub fn remove_points(&self, points: &[f64]) -> RealSet {
        let holes = RealSet::with_eps(self.window, Vec::new(), points.to_vec(), self.eps).expect("finite points");
        self.difference(&holes).expect("same window")
    }

    pub fn is_subset_of(&self, other: &RealSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Structural equality with endpoint and atom positions compared at `eps`.
    pub fn approx_eq(&self, other: &RealSet) -> bool {
        let eps = self.eps.max(other.eps);
        let close = |a: f64, b: f64| (a - b).abs() <= eps;
        self.window == other.window
            && self.atoms.len() == other.atoms.len()
            && self.intervals.len() == other.intervals.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| close(*a, *b))
            && self.intervals.iter().zip(&other.intervals).all(|(a, b)| {
                close(a.lo, b.lo) && close(a.hi, b.hi) && a.lo_closed == b.lo_closed && a.hi_closed == b.hi_closed
            })
    }

    fn contains_strict(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains_strict(x))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.atoms.clone();
        for iv in &self.intervals {
            pts.push(iv.lo);
            pts.push(iv.hi);
        }
        pts
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut parts: Vec<(f64, String)> = self
            .intervals
            .iter()
            .map(|iv| {
                (
                    iv.lo,
                    format!(
                        "{}{}, {}{}",
                        if iv.lo_closed { '[' } else { '(' },
                        iv.lo,
                        iv.hi,
                        if iv.hi_closed { ']' } else { ')' }
                    ),
                )
            })
            .collect();
        parts.extend(self.atoms.iter().map(|a| (*a, format!("{{{a}}}"))));
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let joined: Vec<String> = parts.into_iter().map(|p| p.1).collect();
        write!(f, "{}", joined.join(" ∪ "))
    }
}

/// Rebuilds a canonical set from a membership oracle.
///
/// `member(x, false)` answers point membership (with endpoint snapping);
/// `member(x, true)` answers strict interior membership and is only queried
/// at gap midpoints, which lie strictly between clustered breakpoints.
fn sweep<F>(window: Window, eps: f64, mut points: Vec<f64>, member: F) -> (Vec<Interval>, Vec<f64>)
where
    F: Fn(f64, bool) -> bool,
{
    points.retain(|p| p.is_finite() && *p >= window.lo - eps && *p <= window.hi + eps);
    points.push(window.lo);
    points.push(window.hi);
    points.sort_by(f64::total_cmp);

    // clusters: (representative, max member)
    let mut clusters: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        let p = p.clamp(window.lo, window.hi);
        match clusters.last_mut() {
            Some(last) if p - last.1 <= eps => last.1 = p,
            _ => clusters.push((p, p)),
        }
    }
    if let Some(last) = clusters.last_mut() {
        if window.hi - last.0 <= eps {
            last.0 = window.hi;
            last.1 = window.hi;
        }
    }

    let point_in: Vec<bool> = clusters.iter().map(|c| member(c.0, false)).collect();
    let gap_in: Vec<bool> = clusters
        .windows(2)
        .map(|w| member(0.5 * (w[0].1 + w[1].0), true))
        .collect();

    let mut intervals = Vec::new();
    let mut atoms = Vec::new();
    // (start, start_closed, covers_a_gap)
    let mut current: Option<(f64, bool, bool)> = None;
    let m = clusters.len() - 1;
    for j in 0..=m {
        let p = clusters[j].0;
        if point_in[j] {
            if current.is_none() {
                current = Some((p, true, false));
            }
        } else if let Some((start, sc, _)) = current.take() {
            intervals.push(Interval::new(start, p, sc, false));
        }
        if j == m {
            break;
        }
        if gap_in[j] {
            match current.as_mut() {
                None => current = Some((p, false, true)),
                Some(c) => c.2 = true,
            }
        } else if let Some((start, sc, has_gap)) = current.take() {
            if has_gap {
                intervals.push(Interval::new(start, p, sc, true));
            } else {
                atoms.push(p);
            }
        }
    }
    if let Some((start, sc, has_gap)) = current {
        let p = clusters[m].0;
        if has_gap {
            intervals.push(Interval::new(start, p, sc, point_in[m]));
        } else {
            atoms.push(p);
        }
    }
    (intervals, atoms)
}
