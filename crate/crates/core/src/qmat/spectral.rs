//! Spectra, norms and entropies of Hermitian matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{CMatrix, C64, ZERO};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Eigendecomposition `M = V diag(λ) V†` with eigenvalues ascending and eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.dim();
        let mut out = CMatrix::zeros(n);
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let data = out.data_mut();
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors.get(i, k) * w;
                if vi == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += vi * self.vectors.get(j, k).conj();
                }
            }
        }
        out.hermitian_part()
    }

    /// `⟨v_k|M|v_k⟩` for every eigenvector.
    pub fn diagonal_of(&self, m: &CMatrix) -> Vec<f64> {
        let n = self.vectors.dim();
        (0..n)
            .map(|k| {
                let v = self.vector(k);
                let mut acc = ZERO;
                for i in 0..n {
                    if v[i] == ZERO {
                        continue;
                    }
                    let mut row = ZERO;
                    for j in 0..n {
                        row += m.get(i, j) * v[j];
                    }
                    acc += v[i].conj() * row;
                }
                acc.re
            })
            .collect()
    }
}

/// Hermitian eigensolver. The input is symmetrized first, so tiny asymmetries from
/// floating-point assembly do not leak into the spectrum. Deterministic for fixed input.
pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.dim();
    let h = m.hermitian_part();
    let dm = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    let se = SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for &k in &order {
            data.push(se.eigenvectors[(i, k)]);
        }
    }
    let vectors = CMatrix::from_vec(n, data).expect("square eigenvector matrix");
    Eigh { values, vectors }
}

pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    eigh(m).values
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    dm.singular_values().iter().copied().collect()
}

fn hermitian_within(m: &CMatrix, tol: f64) -> bool {
    m.hermiticity_error() <= tol * m.max_abs().max(1.0)
}

/// Trace norm `Σ|λ_i|`. Hermitian inputs go through the eigensolver, anything else
/// through singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if hermitian_within(m, Tolerances::default().structural) {
        eigenvalues(m).iter().map(|l| l.abs()).sum()
    } else {
        singular_values(m).iter().sum()
    }
}

/// Largest eigenvalue modulus of a Hermitian matrix.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    let tol = Tolerances::default().assert;
    if !hermitian_within(m, tol) {
        return Err(Error::Validation(format!(
            "operator norm needs a Hermitian operator (asymmetry {:.3e})",
            m.hermiticity_error()
        )));
    }
    Ok(eigenvalues(m).iter().fold(0.0_f64, |acc, l| acc.max(l.abs())))
}

/// Largest singular value; valid for any square matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Square root of a PSD matrix. Eigenvalues at rounding level relative to the largest
/// one are treated as zero, since their square roots would otherwise be amplified to
/// `~1e-8`.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let e = eigh(m);
    let scale = e.values.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let floor = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE) * m.dim() as f64;
    let mut out = e.reconstruct_with(|l| if l > floor { l.sqrt() } else { 0.0 });
    if let Some(layout) = m.layout() {
        out = out.with_layout(layout.clone()).expect("same dimension");
    }
    out
}

/// Checks that `m` is a density matrix: Hermitian, unit trace, PSD, within `tol`.
pub fn validate_density(m: &CMatrix, tol: f64) -> Result<()> {
    if !hermitian_within(m, tol) {
        return Err(Error::Validation(format!("state is not Hermitian (asymmetry {:.3e})", m.hermiticity_error())));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Validation(format!("state trace {tr} differs from 1")));
    }
    let lmin = min_eigenvalue(m);
    if lmin < -tol {
        return Err(Error::Validation(format!("state has negative eigenvalue {lmin:.3e}")));
    }
    Ok(())
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    let floor = Tolerances::default().eig_floor;
    -eigenvalues(rho).iter().filter(|&&l| l > floor).map(|&l| xlog2x(l)).sum::<f64>()
}

/// Quantum relative entropy `S(ρ‖σ) = Tr ρ log ρ − Tr ρ log σ` in bits, or
/// `f64::INFINITY` when the support of `ρ` is not contained in that of `σ`.
pub fn rel_entropy(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    rel_entropy_with(rho, sigma, &Tolerances::default())
}

pub fn rel_entropy_with(rho: &CMatrix, sigma: &CMatrix, tol: &Tolerances) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Structural(format!(
            "relative entropy of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    validate_density(rho, tol.assert)?;
    validate_density(sigma, tol.assert)?;

    let sig = eigh(sigma);
    let weights = sig.diagonal_of(rho);
    let mut outside = 0.0;
    let mut cross = 0.0;
    for (&lambda, &w) in sig.values.iter().zip(&weights) {
        if lambda > tol.eig_floor {
            cross += w * lambda.log2();
        } else {
            outside += w;
        }
    }
    if outside > tol.support {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = eigenvalues(rho).iter().filter(|&&l| l > tol.eig_floor).map(|&l| xlog2x(l)).sum();
    Ok((neg_entropy - cross).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::layout::SystemLayout;

    fn phi_plus() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
        CMatrix::projector(&v).unwrap().with_layout(SystemLayout::bipartite(2, 2).unwrap()).unwrap()
    }

    #[test]
    fn phi_plus_partial_transpose_spectrum() {
        // Φ⁺^Γ = F/2 with F the swap: eigenvalues ½ (symmetric, ×3) and −½ (singlet).
        let pt = phi_plus().partial_transpose().unwrap();
        let ev = eigenvalues(&pt);
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        assert!((trace_norm(&pt) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_of_state_is_one() {
        assert!((trace_norm(&phi_plus()) - 1.0).abs() < 1e-12);
        let mixed = CMatrix::identity(4).scale(0.25);
        assert!((trace_norm(&mixed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_non_hermitian_uses_singular_values() {
        // |0⟩⟨1| has a single unit singular value.
        let m = CMatrix::unit(2, 0, 1);
        assert!((trace_norm(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn op_norm_identity_and_homogeneity() {
        assert_eq!(op_norm(&CMatrix::identity(5)).unwrap(), 1.0);
        let m = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        let a = op_norm(&m).unwrap();
        let b = op_norm(&m.scale(3.0)).unwrap();
        assert!((b / a - 3.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_rejects_non_hermitian() {
        assert!(matches!(op_norm(&CMatrix::unit(2, 0, 1)), Err(Error::Validation(_))));
    }

    #[test]
    fn rel_entropy_closed_forms() {
        let zero = CMatrix::unit(2, 0, 0);
        let mixed = CMatrix::identity(2).scale(0.5);
        assert!((rel_entropy(&zero, &mixed).unwrap() - 1.0).abs() < 1e-12);
        assert!(rel_entropy(&mixed, &zero).unwrap().is_infinite());
        assert!(rel_entropy(&mixed, &mixed).unwrap().abs() < 1e-12);

        let dephased = CMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!((rel_entropy(&phi_plus(), &dephased).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rel_entropy_validates_inputs() {
        let bad = CMatrix::diagonal(&[1.5, -0.5]);
        let mixed = CMatrix::identity(2).scale(0.5);
        assert!(matches!(rel_entropy(&bad, &mixed), Err(Error::Validation(_))));
        let unnorm = CMatrix::identity(2);
        assert!(matches!(rel_entropy(&mixed, &unnorm), Err(Error::Validation(_))));
        assert!(matches!(rel_entropy(&mixed, &CMatrix::identity(3).scale(1.0 / 3.0)), Err(Error::Structural(_))));
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let m = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = sqrt_psd(&m);
        let back = r.matmul(&r).unwrap();
        assert!((&back - &m).max_abs() < 1e-12);
    }
}
