//! Extremal sequences of the scalar recursion behind the relaxed-greedy rate.
//!
//! The recursion under study is
//! `a_m <= (1 - 2/m^alpha) a_{m-1} + A/m^(2 alpha)` with `a_1 <= A`, and the
//! question is for which powers the bound `a_m <= A/m^alpha` survives. The
//! extremal sequence here runs the recursion with equality (clamped at zero,
//! see [`extremal_sequence`]); checking the power bound on it exhibits the
//! threshold: every `alpha <= 1` holds, every `alpha > 1` fails at a finite
//! index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfmt::format_g12;

/// Violations must exceed this relative slack; `f64` round-off across a
/// million-step recursion stays orders of magnitude below it.
pub const VIOLATION_REL_TOL: f64 = 1e-12;

/// The clamped equality recursion `a_1 = A`,
/// `a_m = max(0, (1 - 2/m^alpha) a_{m-1} + A/m^(2 alpha))`.
///
/// For small `m` and small `alpha` the factor `1 - 2/m^alpha` is negative
/// and the plain equality recursion would leave the class of nonnegative
/// sequences the recursion hypothesis speaks about; the clamp keeps the
/// sequence admissible and can only lower it. Once `2/m^alpha <= 1` the
/// clamp never engages, so failures for `alpha > 1` are produced in the
/// clamp-free regime.
///
/// The update is accumulated in compensated (Kahan) form so the track is
/// reliable at the `1e-12` tolerance over `10^6` steps.
pub fn extremal_sequence(a_cap: f64, alpha: f64, m_max: usize) -> Result<Vec<f64>> {
    if !a_cap.is_finite() || a_cap <= 0.0 {
        return Err(Error::out_of_range("A", a_cap, "A > 0"));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::out_of_range("alpha", alpha, "alpha >= 0"));
    }
    if m_max < 1 {
        return Err(Error::out_of_range("m_max", m_max, "m_max >= 1"));
    }
    let mut seq = Vec::with_capacity(m_max);
    let mut a = a_cap;
    let mut comp = 0.0f64; // Kahan compensation for the running value
    seq.push(a);
    for m in 2..=m_max {
        let mf = m as f64;
        let pow = mf.powf(alpha);
        let delta = -(2.0 / pow) * a + a_cap / (pow * pow);
        let y = delta - comp;
        let t = a + y;
        comp = (t - a) - y;
        a = t;
        if a < 0.0 {
            a = 0.0;
            comp = 0.0;
        }
        seq.push(a);
    }
    Ok(seq)
}

/// Outcome of checking `a_m <= A/m^alpha` along a sequence.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerBoundCheck {
    pub holds: bool,
    /// First index `m` (1-based) where the bound fails, if any.
    pub first_violation: Option<usize>,
    /// Max of `a_m * m^alpha / A` across the sequence.
    pub max_ratio: f64,
}

/// Check `a_m <= A/m^alpha` for every entry; a violation needs relative
/// slack beyond [`VIOLATION_REL_TOL`].
pub fn check_power_bound(seq: &[f64], a_cap: f64, alpha: f64) -> PowerBoundCheck {
    let mut max_ratio = 0.0f64;
    let mut first_violation = None;
    for (i, a) in seq.iter().enumerate() {
        let m = (i + 1) as f64;
        let ratio = a * m.powf(alpha) / a_cap;
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        if first_violation.is_none() && ratio > 1.0 + VIOLATION_REL_TOL {
            first_violation = Some(i + 1);
        }
    }
    PowerBoundCheck {
        holds: first_violation.is_none(),
        first_violation,
        max_ratio,
    }
}

/// One row of an [`alpha_sweep`] table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub holds: bool,
    pub first_violation: Option<usize>,
    pub max_ratio: f64,
    pub m_max: usize,
}

impl SweepRow {
    /// An `alpha > 1` row that still holds means the horizon was too short
    /// to exhibit the failure.
    pub fn m_max_insufficient(&self) -> bool {
        self.alpha > 1.0 && self.holds
    }
}

/// Run the extremal sequence for each `alpha` and check the power bound.
pub fn alpha_sweep(a_cap: f64, alphas: &[f64], m_max: usize) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("alpha sweep needs at least one alpha".into()));
    }
    alphas
        .iter()
        .map(|alpha| {
            let seq = extremal_sequence(a_cap, *alpha, m_max)?;
            let check = check_power_bound(&seq, a_cap, *alpha);
            Ok(SweepRow {
                alpha: *alpha,
                holds: check.holds,
                first_violation: check.first_violation,
                max_ratio: check.max_ratio,
                m_max,
            })
        })
        .collect()
}

/// CSV export with columns `alpha,holds,first_violation,max_ratio,m_max`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("alpha,holds,first_violation,max_ratio,m_max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_g12(r.alpha),
            r.holds,
            r.first_violation.map_or(String::new(), |v| v.to_string()),
            format_g12(r.max_ratio),
            r.m_max
        ));
    }
    out
}
