use serde::{Deserialize, Serialize};

use super::measurement::canonical_state;
use super::seesaw::{seesaw, SeesawConfig};
use super::{bell_operator, box_from, classical_value, BellFunctional, MeasurementFamily};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qmat::{op_norm, trace_norm, CMatrix};
use crate::states::private_bit;

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub context: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: bool,
    /// Intermediate term of a two-link chain `lhs ≤ mid ≤ rhs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mid: Option<f64>,
}

impl BoundReport {
    pub fn new(context: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            context: context.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            verdict: lhs <= rhs + tol,
            mid: None,
        }
    }

    /// Chain report: the verdict requires both `lhs ≤ mid` and `mid ≤ rhs`.
    pub fn chain(context: impl Into<String>, lhs: f64, mid: f64, rhs: f64, tol: f64) -> Self {
        let verdict = lhs <= mid + tol && mid <= rhs + tol;
        Self {
            context: context.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            verdict,
            mid: Some(mid),
        }
    }

    /// Conjoins an extra side condition into the verdict.
    pub fn require(mut self, ok: bool, note: &str) -> Self {
        if !ok {
            self.verdict = false;
        }
        self.context = format!("{}; {note}={}", self.context, if ok { "ok" } else { "FAILED" });
        self
    }

    pub const CSV_HEADER: [&'static str; 5] = ["context", "lhs", "rhs", "slack", "verdict"];

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.context.clone(),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.slack.to_string(),
            self.verdict.to_string(),
        ]
    }
}

/// `|S(ρ) − S(σ)| ≤ ‖S^Γ‖∞ · ‖ρ^Γ − σ^Γ‖₁` at fixed measurements.
pub fn thm1_bound(f: &BellFunctional, meas: &MeasurementFamily, rho: &CMatrix, sigma: &CMatrix) -> Result<BoundReport> {
    let (rho, _, _) = canonical_state(rho)?;
    let (sigma, _, _) = canonical_state(sigma)?;
    if rho.layout() != sigma.layout() {
        return Err(Error::Structural("rho and sigma have different layouts".into()));
    }
    let s_rho = f.value(&box_from(&rho, meas)?)?;
    let s_sigma = f.value(&box_from(&sigma, meas)?)?;
    let s_gamma = bell_operator(f, meas, true)?;
    let dist = trace_norm(&(&rho.partial_transpose()? - &sigma.partial_transpose()?));
    let rhs = op_norm(&s_gamma)? * dist;
    Ok(BoundReport::new(
        "thm1: |S(rho)-S(sigma)| <= ||S^G||_inf ||rho^G - sigma^G||_1",
        (s_rho - s_sigma).abs(),
        rhs,
        Tolerances::default().assert,
    ))
}

/// Certified upper bound `‖ρ^Γ − σ^Γ‖₁` on the `D(ε)` level of `ρ`, for a separable `σ`.
pub fn d_eps_membership(rho: &CMatrix, sigma_cand: &CMatrix) -> Result<f64> {
    let (rho, _, _) = canonical_state(rho)?;
    let (sigma, _, _) = canonical_state(sigma_cand)?;
    if rho.layout() != sigma.layout() {
        return Err(Error::Structural("rho and sigma have different layouts".into()));
    }
    Ok(trace_norm(&(&rho.partial_transpose()? - &sigma.partial_transpose()?)))
}

/// `Q_S(ρ) ≤ C(S) + Q(S) · ‖ρ^Γ − σ^Γ‖₁` with an explicit separable candidate in place of
/// the infimum over separable states; the left side is the best seesaw value.
pub fn cor1_bound(
    f: &BellFunctional,
    rho: &CMatrix,
    sigma_cand: &CMatrix,
    q_value: f64,
    cfg: &SeesawConfig,
) -> Result<BoundReport> {
    let eps = d_eps_membership(rho, sigma_cand)?;
    let rhs = classical_value(f)? + q_value * eps;
    let lhs = seesaw(rho, f, cfg)?.value;
    Ok(BoundReport::new(
        format!("cor1 (candidate-relaxed): seesaw <= C + Q*eps, eps={eps:.12}"),
        lhs,
        rhs,
        Tolerances::default().assert,
    ))
}

/// `Q_S(γ_X) ≤ C(S) + Q(S) · ‖X^Γ‖₁`, valid when `√(XX†)` and `√(X†X)` are separable
/// (asserted by the caller).
pub fn pbit_observation_bound(x: &CMatrix, f: &BellFunctional, q_value: f64, cfg: &SeesawConfig) -> Result<BoundReport> {
    let gamma = private_bit(x)?;
    let x_gamma = match x.layout() {
        Some(_) => x.partial_transpose()?,
        None => {
            let d = (x.dim() as f64).sqrt().round() as usize;
            x.clone().with_layout(crate::qmat::SystemLayout::bipartite(d, d)?)?.partial_transpose()?
        }
    };
    let rhs = classical_value(f)? + q_value * trace_norm(&x_gamma);
    let lhs = seesaw(&gamma, f, cfg)?.value;
    Ok(BoundReport::new(
        "pbit observation: seesaw(gamma_X) <= C + Q*||X^G||_1",
        lhs,
        rhs,
        Tolerances::default().assert,
    ))
}
