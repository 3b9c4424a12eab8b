//! Finite-dimensional models of the sequence spaces the laboratory works in.
//!
//! A model space is `R^n` equipped with one of four (quasi-)norms selected by
//! [`Space`]: the `l_p` quasi-norm for any `p > 0`, the summing-type norm
//! `max(l2, sup_m |sum_{j<=m} a_j/sqrt(j)|)` (here called [`Space::Kt`]), the
//! interleaved direct sum under the max norm, and the finite section of `c0`
//! (the sup norm). Coordinates are numbered `1..=n` throughout; [`IndexSet`]
//! holds 1-based indices, and the canonical coordinate vectors play the role
//! of the basis, so the coefficient functionals are exact coordinate reads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used by the axiom checker.
pub const AXIOM_REL_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// CoefVector
// ---------------------------------------------------------------------------

/// A finite coefficient sequence: the coordinates of an element of a model
/// space. Entries are finite `f64`s and the dimension is at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CoefVector {
    coeffs: Vec<f64>,
}

impl CoefVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index: i + 1 });
            }
        }
        Ok(CoefVector { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        CoefVector {
            coeffs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coordinate read by 1-based index.
    pub fn coeff(&self, index: usize) -> f64 {
        assert!(index >= 1 && index <= self.dim(), "1-based index in range");
        self.coeffs[index - 1]
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> IndexSet {
        IndexSet {
            indices: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, _)| i + 1)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Keep the coordinates indexed by `set`, zero out the rest.
    ///
    /// This is the coordinate projection `P_A`; it is idempotent and
    /// `x.project(A) + x.project(A complement) == x` coordinate-wise.
    pub fn project(&self, set: &IndexSet) -> Result<CoefVector> {
        set.check_dim(self.dim())?;
        let mut out = vec![0.0; self.dim()];
        for pos in set.positions() {
            out[pos] = self.coeffs[pos];
        }
        Ok(CoefVector { coeffs: out })
    }

    pub fn add(&self, other: &CoefVector) -> Result<CoefVector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CoefVector) -> Result<CoefVector> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, t: f64) -> CoefVector {
        CoefVector {
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    fn zip_with(&self, other: &CoefVector, f: impl Fn(f64, f64) -> f64) -> Result<CoefVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(CoefVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }
}

impl TryFrom<Vec<f64>> for CoefVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        CoefVector::new(v)
    }
}

impl From<CoefVector> for Vec<f64> {
    fn from(v: CoefVector) -> Vec<f64> {
        v.coeffs
    }
}

// ---------------------------------------------------------------------------
// IndexSet and SignPattern
// ---------------------------------------------------------------------------

/// A finite set of 1-based coordinate indices, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Build from arbitrary order; rejects zeros and duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateIndex { index: pair[0] });
            }
        }
        if indices.first() == Some(&0) {
            return Err(Error::ZeroIndex);
        }
        Ok(IndexSet { indices })
    }

    pub fn empty() -> Self {
        IndexSet { indices: vec![] }
    }

    /// The interval `{lo, lo+1, ..., hi}` (empty if `hi < lo`).
    pub fn range(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 {
            return Err(Error::ZeroIndex);
        }
        Ok(IndexSet {
            indices: (lo..=hi).collect(),
        })
    }

    /// `{1, 3, 5, ...}` of cardinality `m`.
    pub fn odds(m: usize) -> Self {
        IndexSet {
            indices: (0..m).map(|i| 2 * i + 1).collect(),
        }
    }

    /// `{2, 4, 6, ...}` of cardinality `m`.
    pub fn evens(m: usize) -> Self {
        IndexSet {
            indices: (1..=m).map(|i| 2 * i).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// 0-based positions into a coefficient slice.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|i| i - 1)
    }

    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet {
            indices: (1..=n).filter(|i| !self.contains(*i)).collect(),
        }
    }

    pub(crate) fn max_index(&self) -> usize {
        self.indices.last().copied().unwrap_or(0)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.max_index() > n {
            return Err(Error::IndexOutOfRange {
                index: self.max_index(),
                dim: n,
            });
        }
        Ok(())
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.first() != Some(&0));
        IndexSet { indices }
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Vec<usize> {
        s.indices
    }
}

/// A choice of signs over an index set, aligned entry by entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPattern {
    set: IndexSet,
    signs: Vec<f64>,
}

impl SignPattern {
    pub fn new(set: IndexSet, signs: Vec<f64>) -> Result<Self> {
        if signs.len() != set.len() {
            return Err(Error::SignPatternMismatch {
                reason: format!("{} signs for {} indices", signs.len(), set.len()),
            });
        }
        for s in &signs {
            if *s != 1.0 && *s != -1.0 {
                return Err(Error::SignPatternMismatch {
                    reason: format!("sign value {s} is not +1 or -1"),
                });
            }
        }
        Ok(SignPattern { set, signs })
    }

    pub fn all_plus(set: IndexSet) -> Self {
        let signs = vec![1.0; set.len()];
        SignPattern { set, signs }
    }

    /// `+1, -1, +1, ...` along the set in increasing index order.
    pub fn alternating(set: IndexSet) -> Self {
        let signs = (0..set.len())
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        SignPattern { set, signs }
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }
}

/// The signed indicator `1_{eps A} = sum_{n in A} eps_n e_n` in dimension `n`.
pub fn indicator(eps: &SignPattern, n: usize) -> Result<CoefVector> {
    eps.set.check_dim(n)?;
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let mut coeffs = vec![0.0; n];
    for (pos, sign) in eps.set.positions().zip(&eps.signs) {
        coeffs[pos] = *sign;
    }
    Ok(CoefVector { coeffs })
}

/// The plain indicator `1_A` in dimension `n`.
pub fn indicator_plus(set: &IndexSet, n: usize) -> Result<CoefVector> {
    indicator(&SignPattern::all_plus(set.clone()), n)
}

// ---------------------------------------------------------------------------
// Space
// ---------------------------------------------------------------------------

/// Selector for the concrete (quasi-)norm governing a model space.
///
/// Serializes as `{"kind":"lp","p":0.5}`, `{"kind":"kt"}`,
/// `{"kind":"dsum","left":...,"right":...}` or `{"kind":"c0"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "SpaceRepr")]
pub enum Space {
    Lp { p: f64 },
    Kt,
    Dsum { left: Box<Space>, right: Box<Space> },
    C0,
}

/// Deserialization mirror; validation happens in `TryFrom`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpaceRepr {
    Lp { p: f64 },
    Kt,
    Dsum {
        left: Box<SpaceRepr>,
        right: Box<SpaceRepr>,
    },
    C0,
}

impl TryFrom<SpaceRepr> for Space {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Space> {
        match r {
            SpaceRepr::Lp { p } => Space::lp(p),
            SpaceRepr::Kt => Ok(Space::Kt),
            SpaceRepr::Dsum { left, right } => Ok(Space::dsum(
                Space::try_from(*left)?,
                Space::try_from(*right)?,
            )),
            SpaceRepr::C0 => Ok(Space::C0),
        }
    }
}

impl Space {
    pub fn lp(p: f64) -> Result<Space> {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::out_of_range("lp exponent p", p, "p > 0"));
        }
        Ok(Space::Lp { p })
    }

    pub fn dsum(left: Space, right: Space) -> Space {
        Space::Dsum {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// The largest `q` in `(0, 1]` for which the norm is `q`-subadditive:
    /// `min(p, 1)` for `l_p`, 1 for the norms, the minimum over the factors
    /// for a direct sum.
    pub fn convexity_exponent(&self) -> f64 {
        match self {
            Space::Lp { p } => p.min(1.0),
            Space::Kt | Space::C0 => 1.0,
            Space::Dsum { left, right } => left
                .convexity_exponent()
                .min(right.convexity_exponent()),
        }
    }

    /// Whether the norm is a convex function (true norm), i.e. admits
    /// subgradients everywhere.
    pub fn is_convex(&self) -> bool {
        match self {
            Space::Lp { p } => *p >= 1.0,
            Space::Kt | Space::C0 => true,
            Space::Dsum { left, right } => left.is_convex() && right.is_convex(),
        }
    }

    /// Whether the norm is coordinate-separable, so that coefficient
    /// re-optimization decouples coordinate by coordinate.
    pub fn is_separable(&self) -> bool {
        matches!(self, Space::Lp { .. } | Space::C0)
    }

    /// Evaluate the model norm of `x`.
    pub fn norm(&self, x: &CoefVector) -> f64 {
        self.norm_slice(x.as_slice())
    }

    /// Norm of a raw coordinate slice; empty slices have norm 0 (they occur
    /// as the short half of an odd-dimensional direct sum).
    pub fn norm_slice(&self, xs: &[f64]) -> f64 {
        match self {
            Space::Lp { p } => lp_norm(xs, *p),
            Space::Kt => kt_norm(xs),
            Space::C0 => xs.iter().fold(0.0, |acc, v| acc.max(v.abs())),
            Space::Dsum { left, right } => {
                let (l, r) = split_interleaved(xs);
                left.norm_slice(&l).max(right.norm_slice(&r))
            }
        }
    }

    /// A subgradient of the norm at `xs`. Only defined for convex spaces;
    /// returns the zero vector at the origin.
    pub(crate) fn norm_subgradient(&self, xs: &[f64]) -> Vec<f64> {
        debug_assert!(self.is_convex());
        match self {
            Space::Lp { p } => lp_subgradient(xs, *p),
            Space::Kt => kt_subgradient(xs),
            Space::C0 => {
                let mut g = vec![0.0; xs.len()];
                let mut best = 0.0;
                let mut arg = None;
                for (i, v) in xs.iter().enumerate() {
                    if v.abs() > best {
                        best = v.abs();
                        arg = Some(i);
                    }
                }
                if let Some(i) = arg {
                    g[i] = xs[i].signum();
                }
                g
            }
            Space::Dsum { left, right } => {
                let (l, r) = split_interleaved(xs);
                let nl = left.norm_slice(&l);
                let nr = right.norm_slice(&r);
                let mut g = vec![0.0; xs.len()];
                // Ties go to the left factor.
                if nl >= nr {
                    for (k, gv) in left.norm_subgradient(&l).into_iter().enumerate() {
                        g[2 * k] = gv;
                    }
                } else {
                    for (k, gv) in right.norm_subgradient(&r).into_iter().enumerate() {
                        g[2 * k + 1] = gv;
                    }
                }
                g
            }
        }
    }

    /// Semi-normalization constants `(c1, c2)`: the extreme norms of the
    /// canonical coordinate vectors `e_1..e_n`, computed by evaluation.
    pub fn seminormalization(&self, n: usize) -> (f64, f64) {
        assert!(n >= 1);
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0f64;
        let mut e = vec![0.0; n];
        for i in 0..n {
            e[i] = 1.0;
            let v = self.norm_slice(&e);
            c1 = c1.min(v);
            c2 = c2.max(v);
            e[i] = 0.0;
        }
        (c1, c2)
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Space::Lp { p } => write!(f, "lp:{p}"),
            Space::Kt => write!(f, "kt"),
            Space::C0 => write!(f, "c0"),
            Space::Dsum { left, right } => write!(f, "dsum({left},{right})"),
        }
    }
}

fn lp_norm(xs: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return xs.iter().map(|v| v.abs()).sum();
    }
    let mut sum = 0.0;
    for v in xs {
        if *v != 0.0 {
            sum += v.abs().powf(p);
        }
    }
    if sum == 0.0 {
        0.0
    } else {
        sum.powf(1.0 / p)
    }
}

fn lp_subgradient(xs: &[f64], p: f64) -> Vec<f64> {
    debug_assert!(p >= 1.0);
    if p == 1.0 {
        return xs.iter().map(|v| v.signum() * f64::from(*v != 0.0)).collect();
    }
    let norm = lp_norm(xs, p);
    if norm == 0.0 {
        return vec![0.0; xs.len()];
    }
    xs.iter()
        .map(|v| {
            if *v == 0.0 {
                0.0
            } else {
                v.signum() * (v.abs() / norm).powf(p - 1.0)
            }
        })
        .collect()
}

/// `max(l2 norm, sup over m of |sum_{j<=m} x_j / sqrt(j)|)` with 1-based `j`.
fn kt_norm(xs: &[f64]) -> f64 {
    let l2 = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut partial = 0.0;
    let mut best = 0.0f64;
    for (j, v) in xs.iter().enumerate() {
        partial += v / ((j + 1) as f64).sqrt();
        best = best.max(partial.abs());
    }
    l2.max(best)
}

fn kt_subgradient(xs: &[f64]) -> Vec<f64> {
    let l2 = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut partial = 0.0;
    let mut best = 0.0f64;
    let mut best_m = 0usize;
    for (j, v) in xs.iter().enumerate() {
        partial += v / ((j + 1) as f64).sqrt();
        if partial.abs() > best {
            best = partial.abs();
            best_m = j + 1;
        }
    }
    if l2 >= best {
        if l2 == 0.0 {
            return vec![0.0; xs.len()];
        }
        xs.iter().map(|v| v / l2).collect()
    } else {
        let sigma = {
            let s: f64 = xs
                .iter()
                .take(best_m)
                .enumerate()
                .map(|(j, v)| v / ((j + 1) as f64).sqrt())
                .sum();
            s.signum()
        };
        (0..xs.len())
            .map(|j| {
                if j < best_m {
                    sigma / ((j + 1) as f64).sqrt()
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Odd 1-based positions (1, 3, ...) feed the left factor, even the right.
fn split_interleaved(xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut left = Vec::with_capacity(xs.len().div_ceil(2));
    let mut right = Vec::with_capacity(xs.len() / 2);
    for (i, v) in xs.iter().enumerate() {
        if i % 2 == 0 {
            left.push(*v);
        } else {
            right.push(*v);
        }
    }
    (left, right)
}

// ---------------------------------------------------------------------------
// Axiom verification
// ---------------------------------------------------------------------------

/// Outcome of one family of axiom checks over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    /// Largest relative violation observed (negative values mean the
    /// inequality held with room to spare).
    pub worst_slack: f64,
    /// Index of the sample pair realizing `worst_slack`.
    pub worst_pair: Option<usize>,
}

impl AxiomCheck {
    fn new() -> Self {
        AxiomCheck {
            passed: true,
            worst_slack: f64::NEG_INFINITY,
            worst_pair: None,
        }
    }

    fn record(&mut self, pair: usize, slack: f64) {
        if slack > self.worst_slack {
            self.worst_slack = slack;
            self.worst_pair = Some(pair);
        }
        if slack > AXIOM_REL_TOL {
            self.passed = false;
        }
    }
}

/// Report of the homogeneity, `q`-subadditivity and reverse-triangle checks.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub exponent: f64,
    pub homogeneity: AxiomCheck,
    pub subadditivity: AxiomCheck,
    pub reverse_triangle: AxiomCheck,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.homogeneity.passed && self.subadditivity.passed && self.reverse_triangle.passed
    }
}

const HOMOGENEITY_FACTORS: [f64; 6] = [0.0, 1.0, -1.0, 2.5, -0.75, 1000.0];

/// Check the norm axioms on sample pairs with the space's own convexity
/// exponent: homogeneity, `q`-subadditivity and the reverse triangle law
/// `| ||f||^q - ||g||^q | <= ||f - g||^q`.
pub fn verify_space_axioms(space: &Space, samples: &[(CoefVector, CoefVector)]) -> Result<AxiomReport> {
    verify_space_axioms_with_exponent(space, samples, space.convexity_exponent())
}

/// Same checks with a caller-chosen subadditivity exponent `q`; useful to
/// demonstrate that `l_p` with `p < 1` fails plain (`q = 1`) subadditivity.
pub fn verify_space_axioms_with_exponent(
    space: &Space,
    samples: &[(CoefVector, CoefVector)],
    q: f64,
) -> Result<AxiomReport> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("axiom check needs samples".into()));
    }
    if !q.is_finite() || q <= 0.0 || q > 1.0 {
        return Err(Error::out_of_range("subadditivity exponent q", q, "0 < q <= 1"));
    }
    let mut homogeneity = AxiomCheck::new();
    let mut subadditivity = AxiomCheck::new();
    let mut reverse = AxiomCheck::new();
    for (k, (f, g)) in samples.iter().enumerate() {
        let nf = space.norm(f);
        let ng = space.norm(g);
        for t in HOMOGENEITY_FACTORS {
            let lhs = space.norm(&f.scale(t));
            let rhs = t.abs() * nf;
            let slack = (lhs - rhs).abs() / rhs.max(1.0);
            homogeneity.record(k, slack);
        }
        let sum = f.add(g)?;
        let lhs = space.norm(&sum).powf(q);
        let rhs = nf.powf(q) + ng.powf(q);
        subadditivity.record(k, (lhs - rhs) / rhs.max(1.0));

        let diff = f.sub(g)?;
        let lhs = (nf.powf(q) - ng.powf(q)).abs();
        let rhs = space.norm(&diff).powf(q);
        reverse.record(k, (lhs - rhs) / rhs.max(1.0));
    }
    Ok(AxiomReport {
        exponent: q,
        homogeneity,
        subadditivity,
        reverse_triangle: reverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> CoefVector {
        CoefVector::new(xs.to_vec()).unwrap()
    }

    fn set(is: &[usize]) -> IndexSet {
        IndexSet::new(is.to_vec()).unwrap()
    }

    #[test]
    fn lp2_is_euclidean() {
        let s = Space::lp(2.0).unwrap();
        assert_eq!(s.norm(&v(&[3.0, 4.0, 0.0])), 5.0);
    }

    #[test]
    fn lp_half_quasi_norm() {
        let s = Space::lp(0.5).unwrap();
        assert!((s.norm(&v(&[1.0, 1.0])) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kt_norm_takes_the_larger_branch() {
        // l2 branch sqrt(2); partial sums max(1, |1 - 1/sqrt(2)|) = 1.
        let n = Space::Kt.norm(&v(&[1.0, -1.0]));
        assert!((n - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dsum_indicator_of_odd_set() {
        // Odd positions feed the l2 factor: indicator of {1,3,...,17} has
        // 9 ones there, norm sqrt(9) = 3.
        let s = Space::dsum(Space::lp(2.0).unwrap(), Space::C0);
        let x = indicator_plus(&IndexSet::odds(9), 18).unwrap();
        assert_eq!(s.norm(&x), 3.0);
        let y = indicator_plus(&IndexSet::evens(9), 18).unwrap();
        assert_eq!(s.norm(&y), 1.0);
    }

    #[test]
    fn norm_zero_iff_zero_vector() {
        for s in [
            Space::lp(0.5).unwrap(),
            Space::lp(1.0).unwrap(),
            Space::lp(2.0).unwrap(),
            Space::Kt,
            Space::C0,
            Space::dsum(Space::Kt, Space::C0),
        ] {
            assert_eq!(s.norm(&CoefVector::zeros(7)), 0.0);
            assert!(s.norm(&v(&[0.0, 1e-30, 0.0])) > 0.0);
        }
    }

    #[test]
    fn project_examples() {
        let x = v(&[1.0, 2.0, 3.0]);
        assert_eq!(x.project(&set(&[2])).unwrap().as_slice(), &[0.0, 2.0, 0.0]);
        assert_eq!(
            x.project(&IndexSet::empty()).unwrap().as_slice(),
            &[0.0, 0.0, 0.0]
        );
        assert_eq!(x.project(&set(&[1, 2, 3])).unwrap(), x);
        assert!(matches!(
            x.project(&set(&[4])),
            Err(Error::IndexOutOfRange { index: 4, dim: 3 })
        ));
    }

    #[test]
    fn indicator_examples() {
        let eps = SignPattern::new(set(&[1, 2]), vec![1.0, -1.0]).unwrap();
        let x = indicator(&eps, 3).unwrap();
        assert_eq!(x.as_slice(), &[1.0, -1.0, 0.0]);
        assert_eq!(Space::lp(1.0).unwrap().norm(&x), 2.0);

        let zero = indicator_plus(&IndexSet::empty(), 4).unwrap();
        assert!(zero.is_zero());

        // Indicator of {1..m} in the summing space: between sqrt(m) and 2 sqrt(m).
        for m in [1usize, 4, 16, 100] {
            let x = indicator_plus(&IndexSet::range(1, m).unwrap(), m).unwrap();
            let norm = Space::Kt.norm(&x);
            let sqrt_m = (m as f64).sqrt();
            assert!(norm >= sqrt_m && norm <= 2.0 * sqrt_m, "m={m} norm={norm}");
        }
    }

    #[test]
    fn sign_pattern_must_match_set() {
        assert!(SignPattern::new(set(&[1, 2]), vec![1.0]).is_err());
        assert!(SignPattern::new(set(&[1]), vec![0.5]).is_err());
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            CoefVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 2 })
        ));
        assert!(matches!(CoefVector::new(vec![]), Err(Error::EmptyVector)));
    }

    #[test]
    fn convexity_exponents() {
        assert_eq!(Space::lp(0.5).unwrap().convexity_exponent(), 0.5);
        assert_eq!(Space::lp(3.0).unwrap().convexity_exponent(), 1.0);
        assert_eq!(Space::Kt.convexity_exponent(), 1.0);
        let d = Space::dsum(Space::lp(0.25).unwrap(), Space::C0);
        assert_eq!(d.convexity_exponent(), 0.25);
    }

    #[test]
    fn space_json_round_trip() {
        let d = Space::dsum(Space::lp(0.5).unwrap(), Space::C0);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"dsum","left":{"kind":"lp","p":0.5},"right":{"kind":"c0"}}"#);
        let back: Space = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Space>(r#"{"kind":"lp","p":-1.0}"#).is_err());
    }

    fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<(CoefVector, CoefVector)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (v(&a), v(&b))
            })
            .collect()
    }

    #[test]
    fn axioms_hold_for_lp2() {
        let s = Space::lp(2.0).unwrap();
        let report = verify_space_axioms(&s, &random_pairs(6, 100, 1)).unwrap();
        assert_eq!(report.exponent, 1.0);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn lp_half_passes_q_half_but_fails_q_one() {
        let s = Space::lp(0.5).unwrap();
        let mut pairs = random_pairs(6, 100, 2);
        pairs.push((v(&[1.0, 0.0]), v(&[0.0, 1.0])));
        let ok = verify_space_axioms(&s, &pairs).unwrap();
        assert_eq!(ok.exponent, 0.5);
        assert!(ok.all_pass(), "{ok:?}");
        let bad = verify_space_axioms_with_exponent(&s, &pairs, 1.0).unwrap();
        assert!(!bad.subadditivity.passed);
    }

    #[test]
    fn kt_homogeneity() {
        let f = v(&[1.0, 0.0]);
        let s = Space::Kt;
        assert_eq!(s.norm(&f.scale(2.0)), 2.0 * s.norm(&f));
    }

    #[test]
    fn axioms_hold_for_kt_and_dsum() {
        for s in [Space::Kt, Space::dsum(Space::Kt, Space::C0)] {
            let report = verify_space_axioms(&s, &random_pairs(9, 100, 3)).unwrap();
            assert!(report.all_pass(), "{s}: {report:?}");
        }
    }

    #[test]
    fn seminormalization_is_one_for_model_spaces() {
        for s in [
            Space::lp(0.5).unwrap(),
            Space::lp(2.0).unwrap(),
            Space::Kt,
            Space::C0,
            Space::dsum(Space::lp(2.0).unwrap(), Space::C0),
        ] {
            let (c1, c2) = s.seminormalization(12);
            assert!((c1 - 1.0).abs() < 1e-12, "{s}");
            assert!((c2 - 1.0).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn subgradients_support_the_norm() {
        // A subgradient g at x of a norm N satisfies <g, x> = N(x) and
        // N(y) >= <g, y> for all y; spot-check the second on random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in [
            Space::lp(1.0).unwrap(),
            Space::lp(2.0).unwrap(),
            Space::lp(3.5).unwrap(),
            Space::Kt,
            Space::C0,
            Space::dsum(Space::Kt, Space::lp(2.0).unwrap()),
        ] {
            for _ in 0..50 {
                let x: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let g = s.norm_subgradient(&x);
                let gx: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
                let gy: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
                assert!((gx - s.norm_slice(&x)).abs() < 1e-9, "{s}");
                assert!(gy <= s.norm_slice(&y) + 1e-9, "{s}");
            }
        }
    }

    proptest! {
        #[test]
        fn projection_partition(xs in proptest::collection::vec(-100.0f64..100.0, 1..12), mask in 0usize..4096) {
            let x = v(&xs);
            let n = x.dim();
            let a = IndexSet::from_sorted_unchecked(
                (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect());
            let pa = x.project(&a).unwrap();
            let pc = x.project(&a.complement(n)).unwrap();
            prop_assert_eq!(pa.add(&pc).unwrap(), x.clone());
            prop_assert_eq!(pa.project(&a).unwrap(), pa);
        }

        #[test]
        fn reverse_triangle_law(xs in proptest::collection::vec(-10.0f64..10.0, 2..10),
                                ys in proptest::collection::vec(-10.0f64..10.0, 2..10)) {
            let n = xs.len().min(ys.len());
            let f = v(&xs[..n]);
            let g = v(&ys[..n]);
            for s in [Space::lp(0.5).unwrap(), Space::lp(2.0).unwrap(), Space::Kt] {
                let q = s.convexity_exponent();
                let lhs = (s.norm(&f).powf(q) - s.norm(&g).powf(q)).abs();
                let rhs = s.norm(&f.sub(&g).unwrap()).powf(q);
                prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
            }
        }

        #[test]
        fn dsum_is_max_of_interleaved_parts(xs in proptest::collection::vec(-10.0f64..10.0, 2..12)) {
            let s = Space::dsum(Space::Kt, Space::C0);
            let x = v(&xs);
            let (l, r) = split_interleaved(&xs);
            let expect = Space::Kt.norm_slice(&l).max(Space::C0.norm_slice(&r));
            prop_assert_eq!(s.norm(&x), expect);
        }
    }
}
