//! Seeded random matrices for initialization and property sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{CMatrix, C64};
use super::spectral::eigh;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let data = (0..dim * dim).map(|_| gaussian(rng)).collect();
    CMatrix::from_vec(dim, data).expect("square")
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    ginibre(dim, rng).hermitian_part()
}

/// Density matrix `G G† / Tr(G G†)` of full rank with probability one.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rng);
    let w = g.matmul(&g.adjoint()).expect("square");
    let tr = w.trace().re;
    w.scale(1.0 / tr).hermitian_part()
}

/// Random pure-state density matrix.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
    CMatrix::projector(&v).expect("square")
}

/// Projector onto the positive eigenspace of a GUE matrix: a random projector of
/// random rank.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let e = eigh(&random_hermitian(dim, rng));
    e.reconstruct_with(|l| if l > 0.0 { 1.0 } else { 0.0 })
}

/// Random two-outcome POVM element: a GUE eigenbasis with eigenvalues squashed into `(0, 1)`.
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let e = eigh(&random_hermitian(dim, rng));
    e.reconstruct_with(|l| 1.0 / (1.0 + (-2.0 * l).exp()))
}

/// Random matrix of spectral norm at most one, usable as a local filter element.
pub fn random_contraction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rng);
    let s = super::spectral::spectral_norm(&g);
    g.scale(1.0 / s)
}
