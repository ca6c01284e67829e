use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::layout::{check_permutation, Party, SystemLayout};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major, optionally carrying a tensor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
    layout: Option<SystemLayout>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
            layout: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Structural(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data, layout: None })
    }

    /// Builds from nested rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Structural(format!("non-square input: row of length {} in {dim} rows", r.len())));
        }
        Self::from_vec(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(v, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalized) vector.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::Structural("outer product of vectors with different lengths".into()));
        }
        let dim = ket.len();
        let mut data = Vec::with_capacity(dim * dim);
        for k in ket {
            for b in bra {
                data.push(k * b.conj());
            }
        }
        Self::from_vec(dim, data)
    }

    pub fn projector(psi: &[C64]) -> Result<Self> {
        Self::outer(psi, psi)
    }

    /// Single basis element `|i⟩⟨j|`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[i * dim + j] = ONE;
        m
    }

    pub fn with_layout(mut self, layout: SystemLayout) -> Result<Self> {
        if layout.total_dim() != self.dim {
            return Err(Error::Structural(format!(
                "layout dimension {} does not match matrix dimension {}",
                layout.total_dim(),
                self.dim
            )));
        }
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn without_layout(mut self) -> Self {
        self.layout = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn layout(&self) -> Option<&SystemLayout> {
        self.layout.as_ref()
    }

    pub(crate) fn require_layout(&self) -> Result<&SystemLayout> {
        let layout = self
            .layout
            .as_ref()
            .ok_or_else(|| Error::Structural("operation requires a system layout".into()))?;
        if layout.total_dim() != self.dim {
            return Err(Error::Structural("layout/dimension mismatch".into()));
        }
        Ok(layout)
    }

    /// Local dimensions `(d_A, d_B)` of a canonical bipartite layout.
    pub fn party_dims(&self) -> Result<(usize, usize)> {
        let layout = self.require_layout()?;
        if !layout.has_both_parties() {
            return Err(Error::Structural("bipartite operation needs factors for both parties".into()));
        }
        if !layout.is_canonical() {
            return Err(Error::Structural("layout must list all A factors before B factors".into()));
        }
        Ok((layout.party_dim(Party::A), layout.party_dim(Party::B)))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out.layout = self.layout.clone();
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out.layout = self.layout.clone();
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
            layout: self.layout.clone(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.scale_c(C64::new(c, 0.0))
    }

    pub fn scale_c(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
            layout: self.layout.clone(),
        }
    }

    /// `max_ij |M_ij − conj(M_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Result<C64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix {
            dim: n,
            data: out,
            layout: self.layout.clone().or_else(|| other.layout.clone()),
        })
    }

    /// `self · other · self†`.
    pub fn conjugate_by(&self, other: &CMatrix) -> Result<CMatrix> {
        self.matmul(other)?.matmul(&self.adjoint())
    }

    /// Kronecker product; the layout is the concatenation of both layouts when present.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * dim + j * m;
                    for l in 0..m {
                        data[row + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        let layout = match (&self.layout, &other.layout) {
            (Some(a), Some(b)) => Some(a.concat(b)),
            _ => None,
        };
        CMatrix { dim, data, layout }
    }

    /// Partial transposition over every party-B factor, as a pure index permutation.
    pub fn partial_transpose(&self) -> Result<CMatrix> {
        let layout = self.require_layout()?;
        let split_a = layout.party_split(Party::A);
        let split_b = layout.party_split(Party::B);
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            let (ra, rb) = (split_a[r].0, split_b[r].0);
            for c in 0..n {
                let (ca, cb) = (split_a[c].0, split_b[c].0);
                data[(ra + cb) * n + (ca + rb)] = self.data[r * n + c];
            }
        }
        Ok(CMatrix {
            dim: n,
            data,
            layout: self.layout.clone(),
        })
    }

    /// Reorders tensor factors: new factor `k` is old factor `order[k]`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<CMatrix> {
        let layout = self.require_layout()?;
        check_permutation(order, layout.factors().len())?;
        let new_layout = layout.permuted(order)?;
        let old_strides = layout.strides();
        let new_factors = new_layout.factors();
        let n = self.dim;
        // new basis index -> old basis index
        let mut map = vec![0usize; n];
        for (new_idx, slot) in map.iter_mut().enumerate() {
            let mut rem = new_idx;
            let mut old_idx = 0;
            for k in (0..new_factors.len()).rev() {
                let d = new_factors[k].0;
                old_idx += (rem % d) * old_strides[order[k]];
                rem /= d;
            }
            *slot = old_idx;
        }
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = self.data[map[r] * n + map[c]];
            }
        }
        Ok(CMatrix {
            dim: n,
            data,
            layout: Some(new_layout),
        })
    }

    /// Moves all A factors in front of the B factors.
    pub fn canonicalize(&self) -> Result<CMatrix> {
        let layout = self.require_layout()?;
        if layout.is_canonical() {
            return Ok(self.clone());
        }
        self.permute_factors(&layout.canonical_order())
    }

    /// Traces out every factor belonging to `party`, keeping the other party.
    pub fn partial_trace(&self, traced: Party) -> Result<CMatrix> {
        let layout = self.require_layout()?;
        let kept = match traced {
            Party::A => Party::B,
            Party::B => Party::A,
        };
        let keep_split = layout.party_split(kept);
        let drop_split = layout.party_split(traced);
        let kd = layout.party_dim(kept);
        let n = self.dim;
        let mut out = CMatrix::zeros(kd);
        for r in 0..n {
            for c in 0..n {
                if drop_split[r].0 == drop_split[c].0 {
                    out.data[keep_split[r].1 * kd + keep_split[c].1] += self.data[r * n + c];
                }
            }
        }
        let kept_factors: Vec<(usize, Party)> = layout.factors().iter().copied().filter(|(_, p)| *p == kept).collect();
        if !kept_factors.is_empty() {
            out.layout = Some(SystemLayout::new(kept_factors)?);
        }
        Ok(out)
    }

    fn check_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Structural(format!("dimension mismatch: {} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }
}

fn zip_with(a: &CMatrix, b: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
    assert_eq!(a.dim, b.dim, "dimension mismatch in elementwise operation");
    CMatrix {
        dim: a.dim,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f(*x, *y)).collect(),
        layout: a.layout.clone().or_else(|| b.layout.clone()),
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: f64) -> CMatrix {
        self.scale(rhs)
    }
}
