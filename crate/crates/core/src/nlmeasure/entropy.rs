use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qmat::{rel_entropy, CMatrix};

fn check_distribution(name: &str, p: &[f64], tol: f64) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Validation(format!("{name} has invalid entry {v}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(Error::Validation(format!("{name} sums to {s}")));
    }
    Ok(())
}

/// Kullback-Leibler divergence `Σ P log₂(P/Q)` without validation. Terms with `P = 0`
/// vanish; `P > 0 = Q` gives `+∞`.
pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        acc += pi * (pi / qi).log2();
    }
    acc.max(0.0)
}

/// Relative entropy of two distributions over the same index set, in bits.
pub fn kl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Structural(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let tol = Tolerances::default().assert;
    check_distribution("P", p, tol)?;
    check_distribution("Q", q, tol)?;
    Ok(kl_unchecked(p, q))
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.log2() };
    term(x) + term(1.0 - x)
}

/// Asymptotic-continuity bound `4ε log₂ d + 2h(ε)` for `0 ≤ ε < ½`.
pub fn continuity_bound(eps: f64, d: usize) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::Validation(format!("epsilon {eps} outside [0, 1/2)")));
    }
    if d < 2 {
        return Err(Error::Validation(format!("dimension {d} < 2")));
    }
    Ok(4.0 * eps * (d as f64).log2() + 2.0 * binary_entropy(eps))
}

/// `S(ρ‖σ)` for a separable-by-construction `σ`: an upper bound on the relative entropy
/// of entanglement of `ρ`. Returns `+∞` when the supports are incompatible.
pub fn er_upper(rho: &CMatrix, sigma_cand: &CMatrix) -> Result<f64> {
    rel_entropy(rho, sigma_cand)
}
