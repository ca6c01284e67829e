//! State families: maximally entangled states, Werner states, private bits, the PPT
//! private-bit mixture and the recursive hiding states, each with an explicit
//! separable companion where one is available.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::dim_cap;
use crate::error::{Error, Result};
use crate::qmat::{sqrt_psd, trace_norm, CMatrix, SystemLayout, C64};

/// A constructed state together with its candidate separable companion.
#[derive(Debug, Clone)]
pub struct StateFamilyResult {
    pub rho: CMatrix,
    pub sigma_candidate: Option<CMatrix>,
    pub params: BTreeMap<String, f64>,
    pub notes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WernerKind {
    Symmetric,
    Antisymmetric,
}

fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Validation(format!("local dimension {d} < 2")));
    }
    Ok(())
}

fn check_cap(dim: Option<usize>, cap: usize) -> Result<usize> {
    match dim {
        Some(d) if d <= cap => Ok(d),
        Some(d) => Err(Error::DimensionCap { dim: d, cap }),
        None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
    }
}

/// `|Φ_d⟩⟨Φ_d|` with `|Φ_d⟩ = Σ_i |ii⟩ / √d`, on `A(d) ⊗ B(d)`.
pub fn max_entangled(d: usize) -> Result<CMatrix> {
    check_local_dim(d)?;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut psi = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = amp;
    }
    CMatrix::projector(&psi)?.with_layout(SystemLayout::bipartite(d, d)?)
}

/// Unnormalized swap `F = Σ_ij |ij⟩⟨ji|` on `A(d) ⊗ B(d)`.
pub fn swap_operator(d: usize) -> Result<CMatrix> {
    let mut f = CMatrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            f.set(i * d + j, j * d + i, C64::new(1.0, 0.0));
        }
    }
    f.with_layout(SystemLayout::bipartite(d, d)?)
}

/// Normalized projector onto the symmetric or antisymmetric subspace of `C^d ⊗ C^d`.
pub fn werner_state(d: usize, kind: WernerKind) -> Result<CMatrix> {
    check_local_dim(d)?;
    let id = CMatrix::identity(d * d).with_layout(SystemLayout::bipartite(d, d)?)?;
    let f = swap_operator(d)?;
    let df = d as f64;
    Ok(match kind {
        WernerKind::Symmetric => (&id + &f).scale(1.0 / (df * (df + 1.0))),
        WernerKind::Antisymmetric => (&id - &f).scale(1.0 / (df * (df - 1.0))),
    })
}

/// Normalized swap `X = F / d²`, an operator of unit trace norm.
pub fn swap_x(d: usize) -> Result<CMatrix> {
    check_local_dim(d)?;
    Ok(swap_operator(d)?.scale(1.0 / (d * d) as f64))
}

fn perfect_square_root(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Fourier-phase operators `X = (1/(d_s√d_s)) Σ u_ij |ij⟩⟨ji|` and `Y = √d_s X^Γ`, with
/// `u` the unitary discrete Fourier matrix (`|u_ij| = 1/√d_s`).
pub fn fourier_xy(d_s: usize) -> Result<(CMatrix, CMatrix)> {
    if d_s < 4 || perfect_square_root(d_s).is_none() {
        return Err(Error::Validation(format!("d_s = {d_s} must be a perfect square ≥ 4")));
    }
    let n = d_s as f64;
    let prefactor = 1.0 / (n * n.sqrt());
    let mut x = CMatrix::zeros(d_s * d_s);
    for i in 0..d_s {
        for j in 0..d_s {
            let phase = 2.0 * std::f64::consts::PI * ((i * j) % d_s) as f64 / n;
            let u = C64::from_polar(1.0 / n.sqrt(), phase);
            x.set(i * d_s + j, j * d_s + i, u * prefactor);
        }
    }
    let x = x.with_layout(SystemLayout::bipartite(d_s, d_s)?)?;
    let y = x.partial_transpose()?.scale(n.sqrt());
    Ok((x, y))
}

/// Shield layout of an operator: its own layout when bipartite, else `d ⊗ d`.
fn shield_layout(x: &CMatrix) -> Result<SystemLayout> {
    if let Some(l) = x.layout() {
        if l.has_both_parties() {
            return Ok(l.clone());
        }
    }
    match perfect_square_root(x.dim()) {
        Some(d) => SystemLayout::bipartite(d, d),
        None => Err(Error::Structural(format!(
            "shield operator of dimension {} has no bipartite layout",
            x.dim()
        ))),
    }
}

/// Key basis index of `|ab⟩` with `a` on A and `b` on B.
const K00: usize = 0;
const K01: usize = 1;
const K10: usize = 2;
const K11: usize = 3;

/// `Σ |k⟩⟨l| ⊗ block` over key pairs, reordered so that the layout reads
/// `(A-key, A-shield…) | (B-key, B-shield…)`.
fn assemble_key_shield(blocks: &[(usize, usize, &CMatrix)], shield: &SystemLayout) -> Result<CMatrix> {
    let key_layout = SystemLayout::bipartite(2, 2)?;
    let shield_dim = shield.total_dim();
    let mut total = CMatrix::zeros(4 * shield_dim).with_layout(key_layout.concat(shield))?;
    for &(k, l, block) in blocks {
        if block.dim() != shield_dim {
            return Err(Error::Structural(format!(
                "shield block of dimension {} where {shield_dim} expected",
                block.dim()
            )));
        }
        let key = CMatrix::unit(4, k, l).with_layout(key_layout.clone())?;
        let block = block.clone().with_layout(shield.clone())?;
        total = &total + &key.kron(&block);
    }
    total.canonicalize()
}

/// Private bit
/// `γ_X = ½[|00⟩⟨00|⊗√(XX†) + |00⟩⟨11|⊗X + |11⟩⟨00|⊗X† + |11⟩⟨11|⊗√(X†X)]`.
pub fn private_bit(x: &CMatrix) -> Result<CMatrix> {
    let tn = trace_norm(x);
    if (tn - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("private bit needs ‖X‖₁ = 1, got {tn}")));
    }
    let shield = shield_layout(x)?;
    let x = x.clone().without_layout();
    let xd = x.adjoint();
    let top = sqrt_psd(&x.matmul(&xd)?).scale(0.5);
    let bottom = sqrt_psd(&xd.matmul(&x)?).scale(0.5);
    let x_half = x.scale(0.5);
    let xd_half = xd.scale(0.5);
    assemble_key_shield(
        &[
            (K00, K00, &top),
            (K00, K11, &x_half),
            (K11, K00, &xd_half),
            (K11, K11, &bottom),
        ],
        &shield,
    )
}

/// Key-block-diagonal part of a private bit: the off-diagonal `|00⟩⟨11|` blocks removed.
fn private_bit_dephased(x: &CMatrix) -> Result<CMatrix> {
    let shield = shield_layout(x)?;
    let x = x.clone().without_layout();
    let xd = x.adjoint();
    let top = sqrt_psd(&x.matmul(&xd)?).scale(0.5);
    let bottom = sqrt_psd(&xd.matmul(&x)?).scale(0.5);
    assemble_key_shield(&[(K00, K00, &top), (K11, K11, &bottom)], &shield)
}

/// PPT mixture `ρ_p = (1−p) γ_X + (p/2)[|01⟩⟨01|⊗√(YY†) + |10⟩⟨10|⊗√(Y†Y)]` with the
/// Fourier-phase `X, Y` and `p = 1/(√d_s + 1)`.
pub fn ppt_pbit(d_s: usize) -> Result<StateFamilyResult> {
    let (x, y) = fourier_xy(d_s)?;
    check_cap((d_s * d_s).checked_mul(4), dim_cap())?;
    let p = 1.0 / ((d_s as f64).sqrt() + 1.0);
    let shield = shield_layout(&x)?;

    let y_plain = y.clone().without_layout();
    let yd = y_plain.adjoint();
    let side_01 = sqrt_psd(&y_plain.matmul(&yd)?).scale(p / 2.0);
    let side_10 = sqrt_psd(&yd.matmul(&y_plain)?).scale(p / 2.0);
    let side = assemble_key_shield(&[(K01, K01, &side_01), (K10, K10, &side_10)], &shield)?;

    let rho = &private_bit(&x)?.scale(1.0 - p) + &side;
    let sigma = &private_bit_dephased(&x)?.scale(1.0 - p) + &side;
    let sigma = renormalize(sigma);

    let mut params = BTreeMap::new();
    params.insert("d_s".into(), d_s as f64);
    params.insert("p".into(), p);
    Ok(StateFamilyResult {
        rho,
        sigma_candidate: Some(sigma),
        params,
        notes: "PPT private-bit mixture; sigma = key-block-diagonal companion".into(),
    })
}

fn renormalize(m: CMatrix) -> CMatrix {
    let tr = m.trace().re;
    m.scale(1.0 / tr)
}

/// Parameters of the recursive hiding state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HidingParams {
    /// Number of recursion levels.
    pub m: usize,
    /// Local dimension of each Werner factor.
    pub d_shield: usize,
    /// Tensor power inside `τ₁`, `τ₂`.
    pub k: usize,
    /// Mixing weight, in `(0, ½)`.
    pub q: f64,
}

impl Default for HidingParams {
    fn default() -> Self {
        Self {
            m: 1,
            d_shield: 2,
            k: 1,
            q: 1.0 / 3.0,
        }
    }
}

impl HidingParams {
    pub fn total_dim(&self) -> Option<usize> {
        let local = self.d_shield.checked_pow(u32::try_from(self.k).ok()?)?;
        let pair = local.checked_mul(local)?;
        pair.checked_pow(u32::try_from(self.m).ok()?)?.checked_mul(4)
    }

    /// Normalization `N_m = 2q^m + 2(½−q)^m`.
    pub fn normalization(&self) -> f64 {
        let m = self.m as i32;
        2.0 * self.q.powi(m) + 2.0 * (0.5 - self.q).powi(m)
    }

    /// Distance parameter `δ = (½−q)^m / N_m`.
    pub fn delta(&self) -> f64 {
        (0.5 - self.q).powi(self.m as i32) / self.normalization()
    }
}

fn tensor_power(m: &CMatrix, n: usize) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kron(m);
    }
    out
}

/// Recursive hiding state built from tensor powers of Werner states, with the
/// corner-blocks-zeroed separable companion. Uses the dimension cap from the
/// environment.
pub fn hiding_state(params: HidingParams) -> Result<StateFamilyResult> {
    hiding_state_with_cap(params, dim_cap())
}

pub fn hiding_state_with_cap(params: HidingParams, cap: usize) -> Result<StateFamilyResult> {
    let HidingParams { m, d_shield, k, q } = params;
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::Validation(format!("q = {q} outside (0, 1/2)")));
    }
    if m < 1 || k < 1 {
        return Err(Error::Validation("m and k must be at least 1".into()));
    }
    check_local_dim(d_shield)?;
    check_cap(params.total_dim(), cap)?;

    let rho_s = werner_state(d_shield, WernerKind::Symmetric)?;
    let rho_a = werner_state(d_shield, WernerKind::Antisymmetric)?;
    let tau1 = tensor_power(&(&rho_a + &rho_s).scale(0.5), k);
    let tau2 = tensor_power(&rho_s, k);

    let diag = tensor_power(&(&tau1 + &tau2).scale(q / 2.0), m);
    let corner = tensor_power(&(&tau1 - &tau2).scale(q / 2.0), m);
    let side = tensor_power(&tau2.scale(0.5 - q), m);
    let shield = diag.layout().expect("Werner factors carry layouts").clone();

    let norm = params.normalization();
    let corner_t = corner.adjoint();
    let rho = assemble_key_shield(
        &[
            (K00, K00, &diag),
            (K00, K11, &corner),
            (K11, K00, &corner_t),
            (K01, K01, &side),
            (K10, K10, &side),
            (K11, K11, &diag),
        ],
        &shield,
    )?
    .scale(1.0 / norm);
    let sigma = assemble_key_shield(
        &[(K00, K00, &diag), (K01, K01, &side), (K10, K10, &side), (K11, K11, &diag)],
        &shield,
    )?;
    let sigma = renormalize(sigma);

    let mut out = BTreeMap::new();
    out.insert("m".into(), m as f64);
    out.insert("d_shield".into(), d_shield as f64);
    out.insert("k".into(), k as f64);
    out.insert("q".into(), q);
    out.insert("delta".into(), params.delta());
    out.insert("normalization".into(), norm);
    Ok(StateFamilyResult {
        rho,
        sigma_candidate: Some(sigma),
        params: out,
        notes: "recursive hiding state; sigma = corner-blocks-zeroed companion".into(),
    })
}
