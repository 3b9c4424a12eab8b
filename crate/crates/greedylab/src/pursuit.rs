//! Greedy pursuits over dictionaries in the Euclidean model `R^d`.
//!
//! A [`Dictionary`] is a finite family of unit atoms that spans the ambient
//! space; negation closure is a convention (one stored representative per
//! `+/-` pair, the sign is resolved during selection). Three pursuits are
//! provided: the pure greedy algorithm (matching pursuit), the relaxed
//! greedy algorithm mixing the new atom with weight `1/m`, and its
//! power-relaxed generalization with weight `1/m^alpha`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::format_g12;
use crate::spaces::CoefVector;

/// Pursuits stop early once the Euclidean residual drops to this threshold;
/// below it the argmax atom selection is ill-defined.
pub const RESIDUAL_STOP: f64 = 1e-13;

const UNIT_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Dictionary
// ---------------------------------------------------------------------------

/// A finite dictionary of unit-norm atoms spanning `R^d`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    dim: usize,
    atoms: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct DictionaryFile {
    d: usize,
    atoms: Vec<Vec<f64>>,
}

impl Dictionary {
    /// Validates unit norms (within 1e-12), one representative per `+/-`
    /// pair, and that the atoms span `R^d`.
    pub fn new(dim: usize, atoms: Vec<Vec<f64>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            for v in a {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index: i + 1 });
                }
            }
            let norm = euclid(a);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::AtomNotUnit { index: i, norm });
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if dot(&atoms[i], &atoms[j]).abs() >= 1.0 - UNIT_TOL {
                    return Err(Error::DuplicateAtom { first: i, second: j });
                }
            }
        }
        let rank = rank(&atoms, dim);
        if rank < dim {
            return Err(Error::RankDeficient { rank, dim });
        }
        Ok(Dictionary { dim, atoms })
    }

    /// The standard orthonormal basis of `R^d`.
    pub fn orthonormal(dim: usize) -> Self {
        assert!(dim >= 1);
        let atoms = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Dictionary { dim, atoms }
    }

    /// `count` independent uniformly random unit atoms.
    pub fn random_unit(dim: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(count);
        while atoms.len() < count {
            let cand = random_direction(dim, &mut rng);
            // Resample near-duplicates so the +/- pair convention holds.
            if atoms.iter().all(|a| dot(a, &cand).abs() < 1.0 - 1e-6) {
                atoms.push(cand);
            }
        }
        Dictionary::new(dim, atoms)
    }

    /// A mutually coherent family: unit atoms bunched around one direction.
    pub fn coherent(dim: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = random_direction(dim, &mut rng);
        let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(count);
        while atoms.len() < count {
            let w = random_direction(dim, &mut rng);
            let mut cand: Vec<f64> = center
                .iter()
                .zip(&w)
                .map(|(c, w)| c + 0.35 * w)
                .collect();
            let norm = euclid(&cand);
            cand.iter_mut().for_each(|v| *v /= norm);
            if atoms.iter().all(|a| dot(a, &cand).abs() < 1.0 - 1e-6) {
                atoms.push(cand);
            }
        }
        Dictionary::new(dim, atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, index: usize) -> &[f64] {
        &self.atoms[index]
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&DictionaryFile {
            d: self.dim,
            atoms: self.atoms.clone(),
        })
        .expect("dictionary serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DictionaryFile = serde_json::from_str(s).map_err(|e| Error::Json {
            path: "<string>".into(),
            source: e,
        })?;
        Dictionary::new(file.d, file.atoms)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let file: DictionaryFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        Dictionary::new(file.d, file.atoms)
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclid(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        // Box-Muller pairs; rejection only guards against a zero vector.
        let mut v: Vec<f64> = Vec::with_capacity(dim + 1);
        while v.len() < dim {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            v.push(r * (2.0 * std::f64::consts::PI * u2).cos());
            v.push(r * (2.0 * std::f64::consts::PI * u2).sin());
        }
        v.truncate(dim);
        let norm = euclid(&v);
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Row rank by Gaussian elimination with partial pivoting.
fn rank(rows: &[Vec<f64>], dim: usize) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..m.len())
            .max_by(|a, b| m[*a][col].abs().total_cmp(&m[*b][col].abs()));
        let Some(p) = pivot else { break };
        if m[p][col].abs() < 1e-10 {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let factor = m[r][col] / m[rank][col];
            for c in col..dim {
                m[r][c] -= factor * m[rank][c];
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// Atom selection
// ---------------------------------------------------------------------------

/// Result of the argmax atom search for a residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomChoice {
    pub index: usize,
    pub sign: f64,
    /// The maximized inner product `sign * <f, atom>`; always >= 0.
    pub value: f64,
    /// Set when the residual is orthogonal to every atom (e.g. zero input);
    /// the tie rule then returns atom 0 with sign +1.
    pub degenerate: bool,
}

/// Pick the signed atom maximizing `s * <f, g>` over stored atoms and
/// `s in {+1, -1}`. Ties go to the lowest atom index, then to sign +1.
pub fn best_atom(dict: &Dictionary, f: &CoefVector) -> Result<AtomChoice> {
    if dict.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    if f.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            got: f.dim(),
        });
    }
    let mut best = AtomChoice {
        index: 0,
        sign: 1.0,
        value: f64::NEG_INFINITY,
        degenerate: false,
    };
    for (i, atom) in dict.atoms.iter().enumerate() {
        let ip = dot(f.as_slice(), atom);
        // Sign +1 on an exact zero inner product implements the tie rule.
        let (sign, value) = if ip >= 0.0 { (1.0, ip) } else { (-1.0, -ip) };
        if value > best.value {
            best = AtomChoice {
                index: i,
                sign,
                value,
                degenerate: false,
            };
        }
    }
    best.degenerate = best.value == 0.0;
    Ok(best)
}

// ---------------------------------------------------------------------------
// Pursuit runs
// ---------------------------------------------------------------------------

/// Which pursuit produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase")]
pub enum Algorithm {
    Pga,
    Rga,
    PowerRga { alpha: f64 },
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Pga => write!(f, "pga"),
            Algorithm::Rga => write!(f, "rga"),
            Algorithm::PowerRga { alpha } => write!(f, "power-rga(alpha={alpha})"),
        }
    }
}

/// Why a pursuit run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum StopReason {
    /// All `m_max` steps were taken.
    StepBudgetExhausted,
    /// The Euclidean residual fell to [`RESIDUAL_STOP`] after `after_step`
    /// steps, where the atom argmax becomes ill-defined.
    ResidualVanished { after_step: usize },
}

/// One recorded pursuit step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PursuitStep {
    /// Step number, starting at 1.
    pub m: usize,
    /// 0-based index of the chosen atom.
    pub atom: usize,
    pub sign: f64,
    /// Coefficient applied to the signed atom: the inner product for the
    /// pure algorithm, the mixing weight `1/m^alpha` for relaxed ones.
    pub weight: f64,
    /// Euclidean norm of the residual after the step.
    pub residual: f64,
}

/// Per-iteration record of one pursuit run.
#[derive(Debug, Clone, Serialize)]
pub struct PursuitTrace {
    pub algorithm: Algorithm,
    pub steps: Vec<PursuitStep>,
    pub approximant: CoefVector,
    pub stop: StopReason,
}

impl PursuitTrace {
    /// Residual norms in step order.
    pub fn residuals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.residual).collect()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.steps.last().map(|s| s.residual)
    }

    /// CSV export with columns `m,atom,sign,weight,residual`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("m,atom,sign,weight,residual\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.m,
                s.atom,
                format_g12(s.sign),
                format_g12(s.weight),
                format_g12(s.residual)
            ));
        }
        out
    }
}

/// Pure greedy algorithm: subtract the full inner-product component of the
/// best atom at every step.
pub fn run_pga(f: &CoefVector, dict: &Dictionary, m_max: usize) -> Result<PursuitTrace> {
    if f.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            got: f.dim(),
        });
    }
    let d = f.dim();
    let mut residual = f.as_slice().to_vec();
    let mut approx = vec![0.0; d];
    let mut steps = Vec::new();
    let mut stop = StopReason::StepBudgetExhausted;
    for m in 1..=m_max {
        if euclid(&residual) <= RESIDUAL_STOP {
            stop = StopReason::ResidualVanished { after_step: m - 1 };
            break;
        }
        let choice = best_atom(dict, &CoefVector::new(residual.clone())?)?;
        let atom = dict.atom(choice.index);
        let coef = choice.sign * choice.value;
        for i in 0..d {
            approx[i] += coef * atom[i];
            residual[i] -= coef * atom[i];
        }
        steps.push(PursuitStep {
            m,
            atom: choice.index,
            sign: choice.sign,
            weight: choice.value,
            residual: euclid(&residual),
        });
    }
    Ok(PursuitTrace {
        algorithm: Algorithm::Pga,
        steps,
        approximant: CoefVector::new(approx)?,
        stop,
    })
}

/// Relaxed greedy algorithm: first step is a pure step, then the approximant
/// is the convex combination `(1 - 1/m) G_{m-1} + (1/m) g`.
pub fn run_rga(f: &CoefVector, dict: &Dictionary, m_max: usize) -> Result<PursuitTrace> {
    let mut trace = run_power_rga(f, dict, m_max, 1.0)?;
    trace.algorithm = Algorithm::Rga;
    Ok(trace)
}

/// Power-relaxed greedy algorithm with mixing weight `1/m^alpha`; `alpha = 1`
/// is the relaxed algorithm, `alpha = 0` replaces the approximant by the
/// newly chosen signed atom at every step.
pub fn run_power_rga(
    f: &CoefVector,
    dict: &Dictionary,
    m_max: usize,
    alpha: f64,
) -> Result<PursuitTrace> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::out_of_range("alpha", alpha, "alpha >= 0"));
    }
    if m_max < 1 {
        return Err(Error::out_of_range("m_max", m_max, "m_max >= 1"));
    }
    if f.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            got: f.dim(),
        });
    }
    let d = f.dim();
    let fx = f.as_slice();
    let mut residual = fx.to_vec();
    let mut approx = vec![0.0; d];
    let mut steps = Vec::new();
    let mut stop = StopReason::StepBudgetExhausted;
    for m in 1..=m_max {
        if euclid(&residual) <= RESIDUAL_STOP {
            stop = StopReason::ResidualVanished { after_step: m - 1 };
            break;
        }
        let choice = best_atom(dict, &CoefVector::new(residual.clone())?)?;
        let atom = dict.atom(choice.index);
        let weight;
        if m == 1 {
            // The first relaxed step is defined as the pure greedy step.
            let coef = choice.sign * choice.value;
            for i in 0..d {
                approx[i] = coef * atom[i];
            }
            weight = choice.value;
        } else {
            let w = 1.0 / power(m, alpha);
            for i in 0..d {
                approx[i] = (1.0 - w) * approx[i] + w * choice.sign * atom[i];
            }
            weight = w;
        }
        for i in 0..d {
            residual[i] = fx[i] - approx[i];
        }
        steps.push(PursuitStep {
            m,
            atom: choice.index,
            sign: choice.sign,
            weight,
            residual: euclid(&residual),
        });
    }
    Ok(PursuitTrace {
        algorithm: Algorithm::PowerRga { alpha },
        steps,
        approximant: CoefVector::new(approx)?,
        stop,
    })
}

/// `m^alpha` with exact integer handling of `alpha = 0` and `alpha = 1`.
fn power(m: usize, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        m as f64
    } else {
        (m as f64).powf(alpha)
    }
}

// ---------------------------------------------------------------------------
// A_1(D) sampling and rate verification
// ---------------------------------------------------------------------------

/// Draw `f = sum a_i g_i` with `k` distinct atoms, signs uniform, and
/// `sum |a_i| = 1` sampled uniformly from the simplex (sorted-uniform-gaps).
/// Returns the element and its combination as `(atom index, signed weight)`.
pub fn sample_a1(
    dict: &Dictionary,
    k: usize,
    seed: u64,
) -> Result<(CoefVector, Vec<(usize, f64)>)> {
    if k < 1 || k > dict.len() {
        return Err(Error::out_of_range("k", k, "1 <= k <= number of atoms"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = rand::seq::index::sample(&mut rng, dict.len(), k).into_vec();
    indices.sort_unstable();

    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(k);
    let mut prev = 0.0;
    for c in &cuts {
        weights.push(c - prev);
        prev = *c;
    }
    weights.push(1.0 - prev);

    let mut combo = Vec::with_capacity(k);
    let mut f = vec![0.0; dict.dim()];
    for (idx, w) in indices.iter().zip(&weights) {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let coef = sign * w;
        for (i, a) in dict.atom(*idx).iter().enumerate() {
            f[i] += coef * a;
        }
        combo.push((*idx, coef));
    }
    Ok((CoefVector::new(f)?, combo))
}

/// Outcome of checking `residual_m <= c / m^alpha` along a trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateCheck {
    pub holds: bool,
    /// Tightest normalized ratio `residual_m * m^alpha / c` observed.
    pub max_ratio: f64,
    /// First step index violating the bound, if any.
    pub first_violation: Option<usize>,
}

/// Check the decay bound `residual_m <= c / m^alpha` for every recorded step.
pub fn verify_rate(trace: &PursuitTrace, c: f64, alpha: f64) -> RateCheck {
    let mut max_ratio = 0.0f64;
    let mut first_violation = None;
    for step in &trace.steps {
        let scale = (step.m as f64).powf(alpha);
        max_ratio = max_ratio.max(step.residual * scale / c);
        if step.residual > c / scale && first_violation.is_none() {
            first_violation = Some(step.m);
        }
    }
    RateCheck {
        holds: first_violation.is_none(),
        max_ratio,
        first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> CoefVector {
        CoefVector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn best_atom_picks_largest_signed_inner_product() {
        let dict = Dictionary::orthonormal(2);
        let c = best_atom(&dict, &v(&[0.6, 0.8])).unwrap();
        assert_eq!((c.index, c.sign), (1, 1.0));
        assert!((c.value - 0.8).abs() < 1e-15);

        let c = best_atom(&dict, &v(&[-1.0, 0.0])).unwrap();
        assert_eq!((c.index, c.sign), (0, -1.0));
        assert_eq!(c.value, 1.0);
        assert!(!c.degenerate);

        let c = best_atom(&dict, &v(&[0.0, 0.0])).unwrap();
        assert_eq!((c.index, c.sign, c.value), (0, 1.0, 0.0));
        assert!(c.degenerate);
    }

    #[test]
    fn pga_recovers_a_basis_vector_in_one_step() {
        let dict = Dictionary::orthonormal(3);
        let trace = run_pga(&v(&[1.0, 0.0, 0.0]), &dict, 5).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].residual, 0.0);
        assert_eq!(trace.stop, StopReason::ResidualVanished { after_step: 1 });
    }

    #[test]
    fn pga_first_step_on_mixed_input() {
        let dict = Dictionary::orthonormal(2);
        let trace = run_pga(&v(&[0.6, 0.8]), &dict, 1).unwrap();
        assert_eq!(trace.steps[0].atom, 1);
        assert_eq!(trace.approximant.as_slice(), &[0.0, 0.8]);
        assert!((trace.steps[0].residual - 0.6).abs() < 1e-15);
    }

    #[test]
    fn pga_on_orthonormal_dict_drops_largest_coordinates() {
        // With an orthonormal dictionary the PGA zeroes one coordinate per
        // step, largest modulus first; the remaining residual squared is the
        // sum of the d-m smallest squares. Cross-check against a sort.
        let coords = [0.3, -0.9, 0.05, 0.6, -0.2, 0.44];
        let dict = Dictionary::orthonormal(coords.len());
        let x = v(&coords);
        for m in 0..=coords.len() {
            let trace = run_pga(&x, &dict, m).unwrap();
            let mut sq: Vec<f64> = coords.iter().map(|c| c * c).collect();
            sq.sort_by(f64::total_cmp);
            let expect: f64 = sq[..coords.len() - m].iter().sum();
            let got = match trace.steps.last() {
                Some(s) => s.residual,
                None => x.euclidean_norm(),
            };
            assert!(
                (got * got - expect).abs() < 1e-12,
                "m={m} got={got} expect^2={expect}"
            );
        }
    }

    #[test]
    fn pga_residuals_monotone_and_orthogonal_to_chosen_atom() {
        let dict = Dictionary::random_unit(8, 24, 99).unwrap();
        let (f, _) = sample_a1(&dict, 10, 5).unwrap();
        let trace = run_pga(&f, &dict, 30).unwrap();
        let mut residual = f.as_slice().to_vec();
        let mut prev = f.euclidean_norm();
        for step in &trace.steps {
            let atom = dict.atom(step.atom);
            let coef = step.sign * step.weight;
            for i in 0..residual.len() {
                residual[i] -= coef * atom[i];
            }
            let ip: f64 = residual
                .iter()
                .zip(atom)
                .map(|(r, a)| r * a * step.sign)
                .sum();
            assert!(ip.abs() < 1e-9, "orthogonality after step {}", step.m);
            assert!(step.residual <= prev + 1e-12, "monotone at step {}", step.m);
            prev = step.residual;
        }
    }

    #[test]
    fn rga_single_step_equals_pga() {
        let dict = Dictionary::random_unit(6, 12, 3).unwrap();
        let (f, _) = sample_a1(&dict, 4, 11).unwrap();
        let pga = run_pga(&f, &dict, 1).unwrap();
        let rga = run_rga(&f, &dict, 1).unwrap();
        assert_eq!(pga.approximant, rga.approximant);
        assert_eq!(pga.steps[0].residual, rga.steps[0].residual);
    }

    #[test]
    fn rga_recovers_single_atom_and_stops() {
        let dict = Dictionary::orthonormal(4);
        let trace = run_rga(&v(&[0.0, -1.0, 0.0, 0.0]), &dict, 10).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.stop, StopReason::ResidualVanished { after_step: 1 });
    }

    #[test]
    fn power_alpha_one_matches_rga_exactly() {
        let dict = Dictionary::random_unit(10, 40, 17).unwrap();
        let (f, _) = sample_a1(&dict, 8, 23).unwrap();
        let rga = run_rga(&f, &dict, 64).unwrap();
        let prga = run_power_rga(&f, &dict, 64, 1.0).unwrap();
        assert_eq!(rga.approximant, prga.approximant);
        let a: Vec<f64> = rga.residuals();
        let b: Vec<f64> = prga.residuals();
        assert_eq!(a, b);
    }

    #[test]
    fn power_alpha_zero_replaces_approximant_by_new_atom() {
        let dict = Dictionary::random_unit(5, 15, 77).unwrap();
        let (f, _) = sample_a1(&dict, 5, 31).unwrap();
        let trace = run_power_rga(&f, &dict, 12, 0.0).unwrap();
        // Replay: from step 2 on the approximant is exactly the signed atom.
        for step in trace.steps.iter().skip(1) {
            assert_eq!(step.weight, 1.0);
        }
        if let Some(last) = trace.steps.last() {
            if last.m >= 2 {
                let atom = dict.atom(last.atom);
                for (a, b) in trace.approximant.as_slice().iter().zip(atom) {
                    assert!((a - last.sign * b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn rga_rate_bound_on_a1_samples() {
        let dict = Dictionary::random_unit(16, 48, 5).unwrap();
        for seed in 0..20 {
            let k = 1 + (seed as usize % 12);
            let (f, combo) = sample_a1(&dict, k, seed).unwrap();
            let l1: f64 = combo.iter().map(|(_, c)| c.abs()).sum();
            assert!((l1 - 1.0).abs() < 1e-12);
            assert!(f.euclidean_norm() <= 1.0 + 1e-9);
            let trace = run_rga(&f, &dict, 64).unwrap();
            let check = verify_rate(&trace, 2.0, 0.5);
            assert!(check.holds, "seed {seed}: {check:?}");
            // The relaxed approximant stays in the unit ball on A_1 inputs.
            assert!(trace.approximant.euclidean_norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rga_inner_product_inequality_from_the_rate_proof() {
        // <f - G_{m-1}, G_{m-1} - g(R_{m-1})> <= -||f - G_{m-1}||^2 on A_1.
        let dict = Dictionary::random_unit(8, 20, 13).unwrap();
        for seed in 0..10 {
            let (f, _) = sample_a1(&dict, 6, 100 + seed).unwrap();
            let mut approx = vec![0.0; 8];
            for m in 1..=32usize {
                let residual: Vec<f64> = f
                    .as_slice()
                    .iter()
                    .zip(&approx)
                    .map(|(a, b)| a - b)
                    .collect();
                let rn2: f64 = residual.iter().map(|r| r * r).sum();
                if rn2.sqrt() <= RESIDUAL_STOP {
                    break;
                }
                let choice = best_atom(&dict, &v(&residual)).unwrap();
                let atom = dict.atom(choice.index);
                let ip: f64 = residual
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r * (approx[i] - choice.sign * atom[i]))
                    .sum();
                assert!(ip <= -rn2 + 1e-9, "seed {seed} m {m}");
                let w = if m == 1 { choice.value } else { 1.0 / m as f64 };
                for i in 0..8 {
                    if m == 1 {
                        approx[i] = w * choice.sign * atom[i];
                    } else {
                        approx[i] = (1.0 - w) * approx[i] + w * choice.sign * atom[i];
                    }
                }
            }
        }
    }

    #[test]
    fn verify_rate_flags_constant_residuals() {
        let steps = (1..=8)
            .map(|m| PursuitStep {
                m,
                atom: 0,
                sign: 1.0,
                weight: 0.0,
                residual: 1.0,
            })
            .collect();
        let trace = PursuitTrace {
            algorithm: Algorithm::Rga,
            steps,
            approximant: CoefVector::zeros(2),
            stop: StopReason::StepBudgetExhausted,
        };
        let check = verify_rate(&trace, 2.0, 0.5);
        assert!(!check.holds);
        assert_eq!(check.first_violation, Some(5));
    }

    #[test]
    fn sample_a1_is_deterministic() {
        let dict = Dictionary::random_unit(6, 18, 42).unwrap();
        let a = sample_a1(&dict, 3, 42).unwrap();
        let b = sample_a1(&dict, 3, 42).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let (f, combo) = sample_a1(&dict, 1, 9).unwrap();
        assert_eq!(combo.len(), 1);
        assert!((f.euclidean_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn approximant_plus_residual_reconstructs_input() {
        let dict = Dictionary::random_unit(7, 21, 55).unwrap();
        let (f, _) = sample_a1(&dict, 5, 8).unwrap();
        for trace in [
            run_pga(&f, &dict, 20).unwrap(),
            run_rga(&f, &dict, 20).unwrap(),
            run_power_rga(&f, &dict, 20, 2.0).unwrap(),
        ] {
            let residual = f.sub(&trace.approximant).unwrap();
            let last = trace.final_residual().unwrap();
            assert!((residual.euclidean_norm() - last).abs() < 1e-9);
        }
    }

    #[test]
    fn dictionary_validation() {
        assert!(matches!(
            Dictionary::new(2, vec![]),
            Err(Error::EmptyDictionary)
        ));
        assert!(matches!(
            Dictionary::new(2, vec![vec![0.5, 0.0], vec![0.0, 1.0]]),
            Err(Error::AtomNotUnit { index: 0, .. })
        ));
        assert!(matches!(
            Dictionary::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]),
            Err(Error::DuplicateAtom { .. })
        ));
        assert!(matches!(
            Dictionary::new(2, vec![vec![1.0, 0.0]]),
            Err(Error::RankDeficient { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn dictionary_json_round_trip() {
        let dict = Dictionary::random_unit(4, 9, 1).unwrap();
        let s = dict.to_json_string();
        let back = Dictionary::from_json_str(&s).unwrap();
        assert_eq!(back.dim(), 4);
        assert_eq!(back.len(), 9);
        for i in 0..dict.len() {
            assert_eq!(dict.atom(i), back.atom(i));
        }
    }

    #[test]
    fn trace_csv_header_and_shape() {
        let dict = Dictionary::orthonormal(2);
        let trace = run_pga(&v(&[0.6, 0.8]), &dict, 2).unwrap();
        let csv = trace.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,atom,sign,weight,residual");
        assert_eq!(lines.len(), 1 + trace.steps.len());
    }
}
