//! The thresholding greedy algorithm over model spaces, with brute-force
//! approximation oracles.
//!
//! Greedy orderings sort coordinates by decreasing modulus (ties broken by
//! lower index), greedy sums are the corresponding projections, and
//! Chebyshev sums re-optimize the coefficients on a given support. The
//! oracles ([`sigma_m_oracle`], [`best_projection_error`]) enumerate supports
//! exhaustively behind capacity guards and serve as ground truth for the
//! constant estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{CoefVector, IndexSet, Space};

/// Enumeration guards for the oracles.
pub const SIGMA_MAX_N: usize = 16;
pub const SIGMA_MAX_M: usize = 5;
pub const PROJECTION_MAX_N: usize = 20;

/// Iteration cap for the subgradient solver behind non-separable Chebyshev
/// sums.
pub const CHEBYSHEV_MAX_ITERS: usize = 10_000;

// ---------------------------------------------------------------------------
// Greedy orderings and sums
// ---------------------------------------------------------------------------

/// A permutation of `1..=n` sorting coefficient moduli non-increasingly.
#[derive(Debug, Clone)]
pub struct GreedyOrdering {
    /// 1-based coordinate indices, largest modulus first; equal moduli are
    /// listed lower index first.
    pub permutation: Vec<usize>,
    /// Adjacent pairs in the ordering whose nonzero moduli coincide; empty
    /// exactly when the nonzero moduli are pairwise distinct.
    pub tie_events: Vec<(usize, usize)>,
}

impl GreedyOrdering {
    /// The canonical greedy set of size `m`: first `m` entries, as a set.
    pub fn prefix(&self, m: usize) -> IndexSet {
        let mut v: Vec<usize> = self.permutation[..m].to_vec();
        v.sort_unstable();
        IndexSet::from_sorted_unchecked(v)
    }

    pub fn has_ties(&self) -> bool {
        !self.tie_events.is_empty()
    }
}

/// Sort coordinates by decreasing modulus, ties by lower index first.
pub fn greedy_ordering(x: &CoefVector) -> GreedyOrdering {
    let xs = x.as_slice();
    let mut permutation: Vec<usize> = (1..=xs.len()).collect();
    permutation.sort_by(|a, b| {
        xs[b - 1]
            .abs()
            .total_cmp(&xs[a - 1].abs())
            .then(a.cmp(b))
    });
    let mut tie_events = Vec::new();
    for w in permutation.windows(2) {
        let (i, j) = (w[0], w[1]);
        let vi = xs[i - 1].abs();
        if vi != 0.0 && vi == xs[j - 1].abs() {
            tie_events.push((i, j));
        }
    }
    GreedyOrdering {
        permutation,
        tie_events,
    }
}

/// Whether all nonzero coefficient moduli of `x` are pairwise distinct (the
/// class where greedy sets are unique).
pub fn has_distinct_moduli(x: &CoefVector) -> bool {
    !greedy_ordering(x).has_ties()
}

/// The greedy sum of order `m` under the canonical ordering, together with
/// its greedy set.
pub fn greedy_sum(x: &CoefVector, m: usize) -> Result<(CoefVector, IndexSet)> {
    if m > x.dim() {
        return Err(Error::out_of_range("m", m, "0 <= m <= dimension"));
    }
    let set = greedy_ordering(x).prefix(m);
    Ok((x.project(&set)?, set))
}

/// All greedy sets of size `m`: sets containing every coordinate whose
/// modulus beats the threshold and any admissible completion from the tie
/// group, in lexicographic order, truncated at `cap`.
pub fn greedy_sets_of_size(x: &CoefVector, m: usize, cap: usize) -> Result<Vec<IndexSet>> {
    if m > x.dim() {
        return Err(Error::out_of_range("m", m, "0 <= m <= dimension"));
    }
    if m == 0 {
        return Ok(vec![IndexSet::empty()]);
    }
    let xs = x.as_slice();
    let ordering = greedy_ordering(x);
    let threshold = xs[ordering.permutation[m - 1] - 1].abs();
    let mut mandatory: Vec<usize> = Vec::new();
    let mut ties: Vec<usize> = Vec::new();
    for i in 1..=x.dim() {
        let v = xs[i - 1].abs();
        if v > threshold {
            mandatory.push(i);
        } else if v == threshold {
            ties.push(i);
        }
    }
    let choose = m - mandatory.len();
    let mut out = Vec::new();
    for combo in Combinations::new(ties.len(), choose) {
        if out.len() >= cap {
            break;
        }
        let mut set = mandatory.clone();
        set.extend(combo.iter().map(|k| ties[*k]));
        set.sort_unstable();
        out.push(IndexSet::from_sorted_unchecked(set));
    }
    Ok(out)
}

/// Greedy sets of every size `0..=n`, at most `cap` in total.
pub fn all_greedy_sets(x: &CoefVector, cap: usize) -> Vec<(usize, IndexSet)> {
    let mut out = Vec::new();
    for m in 0..=x.dim() {
        let remaining = cap.saturating_sub(out.len());
        if remaining == 0 {
            break;
        }
        for set in greedy_sets_of_size(x, m, remaining).expect("m <= n") {
            out.push((m, set));
        }
    }
    out
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let state = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, state }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        let k = current.len();
        let mut next = current.clone();
        let mut advanced = false;
        for i in (0..k).rev() {
            if next[i] < self.n - (k - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        self.state = if advanced { Some(next) } else { None };
        Some(current)
    }
}

// ---------------------------------------------------------------------------
// Chebyshev sums
// ---------------------------------------------------------------------------

/// Coefficients minimizing `|| x - sum_{i in A} a_i e_i ||` over the support
/// `A`, with the residual value achieved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebyshevSolution {
    /// Optimal coefficients aligned with the index set, increasing order.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// Subgradient iterations spent (0 on the exact separable path).
    pub iterations: usize,
}

/// Best coefficient re-optimization supported on `set`.
///
/// Coordinate-separable norms (`l_p`, `c0`) are solved exactly by keeping the
/// projected coordinates. Direct sums split into their factors (the max of
/// two independent objectives is minimized factor-wise). The summing norm
/// is minimized numerically: subgradient descent with step `c/sqrt(k)`,
/// iterate averaging and best-iterate tracking, initialized at the
/// projection coefficients, capped at [`CHEBYSHEV_MAX_ITERS`] iterations.
pub fn chebyshev_sum(
    space: &Space,
    x: &CoefVector,
    set: &IndexSet,
    tol: f64,
) -> Result<ChebyshevSolution> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "tol > 0"));
    }
    set.check_dim(x.dim())?;
    chebyshev_inner(space, x.as_slice(), &set.positions().collect::<Vec<_>>(), tol)
}

/// `positions` are 0-based coordinate positions into `xs`.
fn chebyshev_inner(
    space: &Space,
    xs: &[f64],
    positions: &[usize],
    tol: f64,
) -> Result<ChebyshevSolution> {
    if positions.is_empty() {
        return Ok(ChebyshevSolution {
            coefficients: vec![],
            residual_norm: space.norm_slice(xs),
            iterations: 0,
        });
    }
    match space {
        Space::Lp { .. } | Space::C0 => {
            // Separable: the projected coordinates are optimal.
            let mut residual = xs.to_vec();
            let mut coefficients = Vec::with_capacity(positions.len());
            for p in positions {
                coefficients.push(xs[*p]);
                residual[*p] = 0.0;
            }
            Ok(ChebyshevSolution {
                coefficients,
                residual_norm: space.norm_slice(&residual),
                iterations: 0,
            })
        }
        Space::Dsum { left, right } => {
            // The two factors act on disjoint interleaved blocks, so the max
            // is minimized by minimizing each factor separately.
            let (l, r) = split_with_positions(xs, positions);
            let sol_l = chebyshev_inner(left, &l.block, &l.positions, tol)?;
            let sol_r = chebyshev_inner(right, &r.block, &r.positions, tol)?;
            let mut coefficients = vec![0.0; positions.len()];
            for (k, slot) in l.slots.iter().enumerate() {
                coefficients[*slot] = sol_l.coefficients[k];
            }
            for (k, slot) in r.slots.iter().enumerate() {
                coefficients[*slot] = sol_r.coefficients[k];
            }
            Ok(ChebyshevSolution {
                coefficients,
                residual_norm: sol_l.residual_norm.max(sol_r.residual_norm),
                iterations: sol_l.iterations + sol_r.iterations,
            })
        }
        Space::Kt => {
            if !space.is_convex() {
                return Err(Error::NonConvex {
                    space: space.to_string(),
                });
            }
            Ok(subgradient_chebyshev(space, xs, positions, tol))
        }
    }
}

struct Block {
    /// Coordinates of this factor, in factor-local order.
    block: Vec<f64>,
    /// Factor-local 0-based positions of the optimized coefficients.
    positions: Vec<usize>,
    /// For each optimized coefficient, its slot in the original `positions`.
    slots: Vec<usize>,
}

fn split_with_positions(xs: &[f64], positions: &[usize]) -> (Block, Block) {
    let mut left = Block {
        block: Vec::new(),
        positions: Vec::new(),
        slots: Vec::new(),
    };
    let mut right = Block {
        block: Vec::new(),
        positions: Vec::new(),
        slots: Vec::new(),
    };
    for (i, v) in xs.iter().enumerate() {
        if i % 2 == 0 {
            left.block.push(*v);
        } else {
            right.block.push(*v);
        }
    }
    for (slot, p) in positions.iter().enumerate() {
        if p % 2 == 0 {
            left.positions.push(p / 2);
            left.slots.push(slot);
        } else {
            right.positions.push(p / 2);
            right.slots.push(slot);
        }
    }
    (left, right)
}

fn subgradient_chebyshev(
    space: &Space,
    xs: &[f64],
    positions: &[usize],
    tol: f64,
) -> ChebyshevSolution {
    let mut residual = xs.to_vec();
    let mut a: Vec<f64> = positions.iter().map(|p| xs[*p]).collect();
    for p in positions {
        residual[*p] = 0.0;
    }
    let mut best_a = a.clone();
    let mut best_val = space.norm_slice(&residual);

    let scale = 1.0 + xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let step_base = 0.3 * scale;

    let mut avg = vec![0.0; a.len()];
    let mut avg_count = 0usize;
    let tail_start = CHEBYSHEV_MAX_ITERS / 2;
    let mut iterations = 0;
    let mut stale = 0usize;

    for k in 1..=CHEBYSHEV_MAX_ITERS {
        iterations = k;
        let sub = space.norm_subgradient(&residual);
        let step = step_base / (k as f64).sqrt();
        for (j, p) in positions.iter().enumerate() {
            // d/d a_j of ||x - sum a_i e_i|| is minus the subgradient entry.
            a[j] += step * sub[*p];
            residual[*p] = xs[*p] - a[j];
        }
        let val = space.norm_slice(&residual);
        if val < best_val * (1.0 - 1e-15) {
            best_val = val;
            best_a.copy_from_slice(&a);
            stale = 0;
        } else {
            stale += 1;
        }
        if k >= tail_start {
            for (s, aj) in avg.iter_mut().zip(&a) {
                *s += aj;
            }
            avg_count += 1;
        }
        // No further progress at the requested tolerance for a long window.
        if stale > 2_000 && best_val > 0.0 && step / best_val < tol * 1e-2 {
            break;
        }
        if best_val <= f64::MIN_POSITIVE {
            break;
        }
    }

    if avg_count > 0 {
        let avg_a: Vec<f64> = avg.iter().map(|s| s / avg_count as f64).collect();
        let mut r = xs.to_vec();
        for (j, p) in positions.iter().enumerate() {
            r[*p] = xs[*p] - avg_a[j];
        }
        let val = space.norm_slice(&r);
        if val < best_val {
            best_val = val;
            best_a = avg_a;
        }
    }

    ChebyshevSolution {
        coefficients: best_a,
        residual_norm: best_val,
        iterations,
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Result of a support-enumeration oracle, exportable as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub m: usize,
    pub value: f64,
    pub witness_set: IndexSet,
    pub solver_iters: usize,
}

/// Best `m`-term approximation error: minimize
/// `|| x - sum_{n in B} b_n e_n ||` over all `|B| <= m` and free scalars.
///
/// Supports range over the whole ambient index set, not only `supp(x)`;
/// for summing-type norms off-support coefficients can lower the norm via
/// partial-sum cancellation. Ties go to the lexicographically smallest `B`.
pub fn sigma_m_oracle(space: &Space, x: &CoefVector, m: usize) -> Result<OracleResult> {
    let n = x.dim();
    let supp = x.support();
    if m >= supp.len() {
        // Supporting the whole of x reproduces it exactly.
        return Ok(OracleResult {
            m,
            value: 0.0,
            witness_set: supp,
            solver_iters: 0,
        });
    }
    if n > SIGMA_MAX_N || m > SIGMA_MAX_M {
        return Err(Error::Capacity(format!(
            "sigma_m enumeration needs n <= {SIGMA_MAX_N} and m <= {SIGMA_MAX_M} \
             (got n = {n}, m = {m}); consider best_projection_error instead"
        )));
    }
    let tol = 1e-6;
    let mut best_value = space.norm(x);
    let mut best_set = IndexSet::empty();
    let mut iters = 0usize;
    for size in 1..=m.min(n) {
        for combo in Combinations::new(n, size) {
            let positions: Vec<usize> = combo.clone();
            let sol = chebyshev_inner(space, x.as_slice(), &positions, tol)?;
            iters += sol.iterations;
            let set =
                IndexSet::from_sorted_unchecked(combo.iter().map(|p| p + 1).collect());
            if sol.residual_norm < best_value
                || (sol.residual_norm == best_value && set < best_set)
            {
                best_value = sol.residual_norm;
                best_set = set;
            }
        }
    }
    Ok(OracleResult {
        m,
        value: best_value,
        witness_set: best_set,
        solver_iters: iters,
    })
}

/// Best projection error: minimize `|| x - P_B(x) ||` over `|B| <= m`.
///
/// All sizes up to `m` are enumerated because projections are not monotone
/// in non-unconditional norms. Ties go to the lexicographically smallest `B`.
pub fn best_projection_error(space: &Space, x: &CoefVector, m: usize) -> Result<(f64, IndexSet)> {
    let profile = projection_error_profile(space, x, m)?;
    let mut best = profile[0].clone();
    for cand in &profile[1..] {
        if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand.clone();
        }
    }
    Ok(best)
}

/// For each size `s <= m`, the best projection error over `|B| = s` with its
/// witness set (entry `s` of the result). Shares one enumeration pass.
pub fn projection_error_profile(
    space: &Space,
    x: &CoefVector,
    m: usize,
) -> Result<Vec<(f64, IndexSet)>> {
    let n = x.dim();
    if n > PROJECTION_MAX_N {
        return Err(Error::Capacity(format!(
            "projection-error enumeration needs n <= {PROJECTION_MAX_N} (got {n})"
        )));
    }
    let m = m.min(n);
    let mut out: Vec<(f64, IndexSet)> = vec![(space.norm(x), IndexSet::empty())];
    let xs = x.as_slice();
    let mut residual = vec![0.0; n];
    for size in 1..=m {
        let mut best_value = f64::INFINITY;
        let mut best_set = IndexSet::empty();
        for combo in Combinations::new(n, size) {
            residual.copy_from_slice(xs);
            for p in &combo {
                residual[*p] = 0.0;
            }
            let value = space.norm_slice(&residual);
            let set =
                IndexSet::from_sorted_unchecked(combo.iter().map(|p| p + 1).collect());
            if value < best_value || (value == best_value && set < best_set) {
                best_value = value;
                best_set = set;
            }
        }
        out.push((best_value, best_set));
    }
    Ok(out)
}

/// `ceil(lambda * m)` guarded against float fuzz on exact products.
pub fn oversampled_size(lambda: f64, m: usize) -> usize {
    let t = lambda * m as f64;
    let r = t.round();
    if (t - r).abs() < 1e-9 {
        r as usize
    } else {
        t.ceil() as usize
    }
}

/// Ratio `|| x - P_A(x) || / sigma_m(x)` where `A` is the canonical greedy
/// set of the inflated size `ceil(lambda m)`. Returns 0 when both vanish and
/// infinity when only `sigma_m` does.
pub fn oversampled_greedy_error(
    space: &Space,
    x: &CoefVector,
    m: usize,
    lambda: f64,
) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 1.0 {
        return Err(Error::out_of_range("lambda", lambda, "lambda > 1"));
    }
    let k = oversampled_size(lambda, m);
    if k > x.dim() {
        return Err(Error::out_of_range(
            "ceil(lambda * m)",
            k,
            "at most the dimension",
        ));
    }
    let (_, set) = greedy_sum(x, k)?;
    let numerator = space.norm(&x.project(&set.complement(x.dim()))?);
    let sigma = sigma_m_oracle(space, x, m)?.value;
    if sigma == 0.0 {
        return Ok(if numerator == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(numerator / sigma)
}
