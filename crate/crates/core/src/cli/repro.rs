//! The reproduction targets behind `ptbound repro`.
//!
//! Every parameter point yields one [`BoundReport`] whose `lhs` is the seesaw lower
//! bound on the Bell value (or the trivial lower bound 0 for the continuity target) and
//! whose `rhs` is the closed-form bound. Side conditions on the constructed states are
//! folded into the verdict with [`BoundReport::require`].

use std::f64::consts::SQRT_2;

use super::RunConfig;
use crate::bell::{chsh, classical_value, d_eps_membership, seesaw, BoundReport, SeesawConfig};
use crate::error::Result;
use crate::nlmeasure::continuity_bound;
use crate::qmat::{min_eigenvalue, trace_norm, validate_density, CMatrix};
use crate::states::{hiding_state, ppt_pbit, private_bit, swap_x, HidingParams};

const TSIRELSON: f64 = 2.0 * SQRT_2;
const PSD_TOL: f64 = 1e-10;

fn seesaw_cfg(cfg: &RunConfig) -> SeesawConfig {
    SeesawConfig::new(cfg.restarts, cfg.seed)
}

pub(super) fn eq8(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let f = chsh();
    let c = classical_value(&f)?;
    cfg.d.iter()
        .map(|&d| {
            let x = swap_x(d)?;
            let gamma = private_bit(&x)?;
            let value = seesaw(&gamma, &f, &seesaw_cfg(cfg))?.value;
            let df = d as f64;
            let rhs = c + (SQRT_2 + 1.0) / (2.0 * SQRT_2 * df);
            let observation = c + TSIRELSON * trace_norm(&x.partial_transpose()?);
            Ok(BoundReport::new(
                format!("eq8 d={d}: seesaw CHSH(gamma_swap) <= 2 + (sqrt2+1)/(2 sqrt2 d)"),
                value,
                rhs,
                cfg.tol,
            )
            .require(value <= observation + cfg.tol, "observation bound 2 + 2sqrt2 ||X^G||_1"))
        })
        .collect()
}

pub(super) fn eq10(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let f = chsh();
    let c = classical_value(&f)?;
    cfg.ds
        .iter()
        .map(|&d_s| {
            let fam = ppt_pbit(d_s)?;
            let rho = &fam.rho;
            let sigma = fam.sigma_candidate.as_ref().expect("family has a candidate");
            let valid = validate_density(rho, cfg.tol.min(1e-9)).is_ok();
            let ppt = min_eigenvalue(&rho.partial_transpose()?) >= -PSD_TOL;
            let eps = d_eps_membership(rho, sigma)?;
            let inv_sqrt = 1.0 / (d_s as f64).sqrt();
            let value = seesaw(rho, &f, &seesaw_cfg(cfg))?.value;
            Ok(BoundReport::new(
                format!("eq10 d_s={d_s}: seesaw CHSH(rho_p) <= C + Q/sqrt(d_s), eps={eps:.12}"),
                value,
                c + TSIRELSON * inv_sqrt,
                cfg.tol,
            )
            .require(valid, "rho_p valid state")
            .require(ppt, "PPT")
            .require(eps <= inv_sqrt + 1e-9, "candidate distance <= 1/sqrt(d_s)")
            .require(value <= c + TSIRELSON * eps + cfg.tol, "cor1 with candidate"))
        })
        .collect()
}

/// Weight of `ρ` on key blocks with unequal key bits; for the hiding state this is `2δ`.
fn off_key_weight(rho: &CMatrix) -> Result<f64> {
    let rho = rho.canonicalize()?;
    let (da, db) = rho.party_dims()?;
    let (sa, sb) = (da / 2, db / 2);
    Ok((0..rho.dim())
        .filter(|&i| (i / db) / sa != (i % db) / sb)
        .map(|i| rho.get(i, i).re)
        .sum())
}

pub(super) fn prop1(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let f = chsh();
    let c = classical_value(&f)?;
    let params = HidingParams {
        m: cfg.m,
        q: cfg.q,
        ..HidingParams::default()
    };
    let fam = hiding_state(params)?;
    let rho = &fam.rho;
    let sigma = fam.sigma_candidate.as_ref().expect("family has a candidate");
    let delta = params.delta();
    let level = 0.5f64.powi(cfg.m as i32);

    let rho_g = rho.partial_transpose()?;
    let valid = validate_density(rho, 1e-9).is_ok();
    let ppt = min_eigenvalue(&rho_g) >= -PSD_TOL;
    let delta_matches = (off_key_weight(rho)? / 2.0 - delta).abs() <= 1e-12;

    let doubled = rho.kron(&rho_g).canonicalize()?;
    let doubled_sigma = sigma.kron(&sigma.partial_transpose()?).canonicalize()?;
    let eps = d_eps_membership(&doubled, &doubled_sigma)?;
    let rhs = c + TSIRELSON * 2.0 * level;
    let value = seesaw(&doubled, &f, &seesaw_cfg(cfg))?.value;
    Ok(vec![BoundReport::new(
        format!(
            "prop1 m={} q={}: seesaw CHSH(rho^ (x) rho^G) <= C + Q/2^(m-1), delta={delta:.12}, eps={eps:.12}",
            cfg.m, cfg.q
        ),
        value,
        rhs,
        cfg.tol,
    )
    .require(valid, "rho valid state")
    .require(ppt, "rho^G PSD")
    .require(delta_matches, "delta matches off-key weight")
    .require(delta <= level + 1e-12, "delta <= 1/2^m")
    .require(value <= c + TSIRELSON * eps + cfg.tol, "cor1 with candidate")])
}

pub(super) fn eq13(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &eps in &cfg.eps {
        for &d in &cfg.d {
            let rhs = continuity_bound(eps, d)?;
            out.push(BoundReport::new(
                format!("eq13 eps={eps} d={d}: 0 <= 4 eps log2 d + 2 h(eps)"),
                0.0,
                rhs,
                cfg.tol,
            ));
        }
    }
    Ok(out)
}
