use serde::{Deserialize, Serialize};

use super::BellFunctional;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qmat::{min_eigenvalue, CMatrix, SystemLayout, C64, MatrixJson};

/// Local POVMs: `alice[x][a]` and `bob[y][b]`, each acting on that party's full space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    alice: Vec<Vec<CMatrix>>,
    bob: Vec<Vec<CMatrix>>,
}

fn check_povms(side: &str, povms: &[Vec<CMatrix>]) -> Result<usize> {
    let tol = Tolerances::default();
    let dim = povms
        .first()
        .and_then(|p| p.first())
        .map(CMatrix::dim)
        .ok_or_else(|| Error::Validation(format!("{side} has no measurements")))?;
    let outcomes = povms[0].len();
    for (x, povm) in povms.iter().enumerate() {
        if povm.len() != outcomes {
            return Err(Error::Validation(format!("{side} input {x} has {} outcomes, expected {outcomes}", povm.len())));
        }
        let mut sum = CMatrix::zeros(dim);
        for (a, e) in povm.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::Structural(format!("{side} element ({x},{a}) has dimension {}", e.dim())));
            }
            if !e.is_hermitian(tol.assert) {
                return Err(Error::Validation(format!("{side} element ({x},{a}) is not Hermitian")));
            }
            let lmin = min_eigenvalue(e);
            if lmin < -tol.psd {
                return Err(Error::Validation(format!("{side} element ({x},{a}) has eigenvalue {lmin:.3e}")));
            }
            sum = &sum + e;
        }
        let dev = (&sum - &CMatrix::identity(dim)).max_abs();
        if dev > tol.assert {
            return Err(Error::Validation(format!("{side} input {x} elements sum to identity only within {dev:.3e}")));
        }
    }
    Ok(dim)
}

impl MeasurementFamily {
    pub fn new(alice: Vec<Vec<CMatrix>>, bob: Vec<Vec<CMatrix>>) -> Result<Self> {
        let strip = |v: Vec<Vec<CMatrix>>| -> Vec<Vec<CMatrix>> {
            v.into_iter()
                .map(|p| p.into_iter().map(|e| e.without_layout().hermitian_part()).collect())
                .collect()
        };
        let (alice, bob) = (strip(alice), strip(bob));
        check_povms("alice", &alice)?;
        check_povms("bob", &bob)?;
        Ok(Self { alice, bob })
    }

    /// Two-outcome measurements `{P, I − P}` per input.
    pub fn from_projectors(alice: Vec<CMatrix>, bob: Vec<CMatrix>) -> Result<Self> {
        let binary = |ps: Vec<CMatrix>| -> Vec<Vec<CMatrix>> {
            ps.into_iter()
                .map(|p| {
                    let comp = &CMatrix::identity(p.dim()) - &p;
                    vec![p, comp]
                })
                .collect()
        };
        Self::new(binary(alice), binary(bob))
    }

    /// Qubit observables `A₀ = Z`, `A₁ = X`, `B₀ = (Z+X)/√2`, `B₁ = (Z−X)/√2`; outcome 0 is
    /// the +1 eigenspace. Optimal for CHSH on `Φ⁺`.
    pub fn tsirelson_chsh() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let proj = |z: f64, x: f64| {
            CMatrix::from_real_rows(&[vec![0.5 * (1.0 + z), 0.5 * x], vec![0.5 * x, 0.5 * (1.0 - z)]]).unwrap()
        };
        Self::from_projectors(vec![proj(1.0, 0.0), proj(0.0, 1.0)], vec![proj(s, s), proj(s, -s)])
            .expect("valid qubit projectors")
    }

    /// Embeds every element as `E ⊗ I` on a larger local space (extra factor appended).
    pub fn tensor_identity(&self, extra_a: usize, extra_b: usize) -> Self {
        let ext = |side: &[Vec<CMatrix>], extra: usize| -> Vec<Vec<CMatrix>> {
            let id = CMatrix::identity(extra);
            side.iter().map(|p| p.iter().map(|e| e.kron(&id)).collect()).collect()
        };
        Self {
            alice: ext(&self.alice, extra_a),
            bob: ext(&self.bob, extra_b),
        }
    }

    /// Same family with every Bob element transposed; `box_from(ρ^Γ, m.transpose_bob())`
    /// equals `box_from(ρ, m)`.
    pub fn transpose_bob(&self) -> Self {
        Self {
            alice: self.alice.clone(),
            bob: self.bob.iter().map(|p| p.iter().map(CMatrix::transpose).collect()).collect(),
        }
    }

    pub fn alice(&self) -> &[Vec<CMatrix>] {
        &self.alice
    }

    pub fn bob(&self) -> &[Vec<CMatrix>] {
        &self.bob
    }

    pub fn dim_a(&self) -> usize {
        self.alice[0][0].dim()
    }

    pub fn dim_b(&self) -> usize {
        self.bob[0][0].dim()
    }

    /// `(nx, ny, na, nb)`.
    pub fn scenario(&self) -> (usize, usize, usize, usize) {
        (self.alice.len(), self.bob.len(), self.alice[0].len(), self.bob[0].len())
    }

    pub(crate) fn check_matches(&self, f: &BellFunctional) -> Result<()> {
        if self.scenario() != (f.nx, f.ny, f.na, f.nb) {
            return Err(Error::Structural(format!(
                "measurements have scenario {:?}, functional {:?}",
                self.scenario(),
                (f.nx, f.ny, f.na, f.nb)
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(alice: Vec<Vec<CMatrix>>, bob: Vec<Vec<CMatrix>>) -> Self {
        Self { alice, bob }
    }
}

/// JSON view of a measurement family: `alice[x][a]`, `bob[y][b]` as matrix documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub alice: Vec<Vec<MatrixJson>>,
    pub bob: Vec<Vec<MatrixJson>>,
}

impl From<&MeasurementFamily> for MeasurementJson {
    fn from(m: &MeasurementFamily) -> Self {
        let conv = |side: &[Vec<CMatrix>]| side.iter().map(|p| p.iter().map(CMatrix::to_json).collect()).collect();
        Self {
            alice: conv(&m.alice),
            bob: conv(&m.bob),
        }
    }
}

/// Conditional distribution `P(ab|xy)` stored flat in `[x][y][a][b]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellBox {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
    pub p: Vec<f64>,
}

impl BellBox {
    pub fn new(nx: usize, ny: usize, na: usize, nb: usize, p: Vec<f64>) -> Result<Self> {
        let b = Self { nx, ny, na, nb, p };
        b.validate(Tolerances::default().assert)?;
        Ok(b)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if [self.nx, self.ny, self.na, self.nb].contains(&0) {
            return Err(Error::Validation("box cardinalities must be positive".into()));
        }
        if self.p.len() != self.nx * self.ny * self.na * self.nb {
            return Err(Error::Validation(format!("box table has {} entries", self.p.len())));
        }
        if let Some(v) = self.p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Validation(format!("box entry {v} is not a probability")));
        }
        for x in 0..self.nx {
            for y in 0..self.ny {
                let s: f64 = self.block(x, y).iter().sum();
                if (s - 1.0).abs() > tol {
                    return Err(Error::Validation(format!("P(·|{x}{y}) sums to {s}")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let b: Self = serde_json::from_str(s)?;
        b.validate(Tolerances::default().assert)?;
        Ok(b)
    }

    /// Outcome distribution for one input pair, indexed `a * nb + b`.
    pub fn block(&self, x: usize, y: usize) -> &[f64] {
        let k = self.na * self.nb;
        let start = (x * self.ny + y) * k;
        &self.p[start..start + k]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[((x * self.ny + y) * self.na + a) * self.nb + b]
    }

    /// Deterministic box `P(ab|xy) = [a = α(x)][b = β(y)]`.
    pub fn deterministic(na: usize, nb: usize, alice: &[usize], bob: &[usize]) -> Self {
        let (nx, ny) = (alice.len(), bob.len());
        let mut p = vec![0.0; nx * ny * na * nb];
        for x in 0..nx {
            for y in 0..ny {
                p[((x * ny + y) * na + alice[x]) * nb + bob[y]] = 1.0;
            }
        }
        Self { nx, ny, na, nb, p }
    }

    /// Convex mixture `Σ w_i boxes_i` (weights are not renormalized).
    pub fn mixture(boxes: &[BellBox], weights: &[f64]) -> Result<Self> {
        let first = boxes.first().ok_or_else(|| Error::Validation("empty mixture".into()))?;
        if boxes.len() != weights.len() {
            return Err(Error::Structural("mixture weights and boxes differ in length".into()));
        }
        let mut p = vec![0.0; first.p.len()];
        for (b, &w) in boxes.iter().zip(weights) {
            if b.p.len() != p.len() {
                return Err(Error::Structural("mixture of boxes from different scenarios".into()));
            }
            p.iter_mut().zip(&b.p).for_each(|(acc, v)| *acc += w * v);
        }
        Ok(Self { p, ..first.clone() })
    }
}

/// `Tr_B[(I ⊗ B) ρ]` for a canonical bipartite `ρ` with local dimensions `(da, db)`.
pub(crate) fn reduce_with_b(rho: &CMatrix, b: &CMatrix, da: usize, db: usize) -> CMatrix {
    let n = da * db;
    let data = rho.data();
    let bd = b.data();
    let mut out = CMatrix::zeros(da);
    for i in 0..da {
        for j in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..db {
                let row = (i * db + k) * n + j * db;
                for l in 0..db {
                    acc += data[row + l] * bd[l * db + k];
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `Tr_A[(A ⊗ I) ρ]` for a canonical bipartite `ρ` with local dimensions `(da, db)`.
pub(crate) fn reduce_with_a(rho: &CMatrix, a: &CMatrix, da: usize, db: usize) -> CMatrix {
    let n = da * db;
    let data = rho.data();
    let ad = a.data();
    let mut out = CMatrix::zeros(db);
    for i in 0..da {
        for j in 0..da {
            let w = ad[j * da + i];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * n + j * db;
                for l in 0..db {
                    let v = out.get(k, l) + w * data[row + l];
                    out.set(k, l, v);
                }
            }
        }
    }
    out
}

/// Canonical form of a bipartite state plus its local dimensions.
pub(crate) fn canonical_state(rho: &CMatrix) -> Result<(CMatrix, usize, usize)> {
    let rho = rho.canonicalize()?;
    let (da, db) = rho.party_dims()?;
    Ok((rho, da, db))
}

fn check_dims(meas: &MeasurementFamily, da: usize, db: usize) -> Result<()> {
    if meas.dim_a() != da || meas.dim_b() != db {
        return Err(Error::Structural(format!(
            "measurements act on {}x{}, state has local dimensions {da}x{db}",
            meas.dim_a(),
            meas.dim_b()
        )));
    }
    Ok(())
}

/// Box `P(ab|xy) = Tr[(A_{a|x} ⊗ B_{b|y}) ρ]`.
pub fn box_from(rho: &CMatrix, meas: &MeasurementFamily) -> Result<BellBox> {
    let (rho, da, db) = canonical_state(rho)?;
    check_dims(meas, da, db)?;
    let tol = Tolerances::default();
    let (nx, ny, na, nb) = meas.scenario();
    let mut p = vec![0.0; nx * ny * na * nb];
    for (y, povm_b) in meas.bob.iter().enumerate() {
        for (b, eb) in povm_b.iter().enumerate() {
            let reduced = reduce_with_b(&rho, eb, da, db);
            for (x, povm_a) in meas.alice.iter().enumerate() {
                for (a, ea) in povm_a.iter().enumerate() {
                    let v = ea.trace_product(&reduced)?.re;
                    if v < -tol.psd {
                        return Err(Error::Validation(format!(
                            "negative probability {v:.3e}; state is not PSD"
                        )));
                    }
                    p[((x * ny + y) * na + a) * nb + b] = v.max(0.0);
                }
            }
        }
    }
    let out = BellBox { nx, ny, na, nb, p };
    out.validate(tol.assert)?;
    Ok(out)
}

/// Bell operator `S = Σ s^{ab}_{xy} A_{a|x} ⊗ B_{b|y}` on `A(d_A) ⊗ B(d_B)`. With
/// `transpose_b` every `B_{b|y}` is replaced by its transpose, which yields `S^Γ`.
pub fn bell_operator(f: &BellFunctional, meas: &MeasurementFamily, transpose_b: bool) -> Result<CMatrix> {
    meas.check_matches(f)?;
    let (da, db) = (meas.dim_a(), meas.dim_b());
    let mut s = CMatrix::zeros(da * db);
    for x in 0..f.nx {
        for y in 0..f.ny {
            for b in 0..f.nb {
                // Σ_a s A_{a|x}, then one Kronecker product per (x, y, b).
                let mut left = CMatrix::zeros(da);
                for a in 0..f.na {
                    let c = f.coeff(x, y, a, b);
                    if c != 0.0 {
                        left = &left + &meas.alice[x][a].scale(c);
                    }
                }
                let eb = if transpose_b {
                    meas.bob[y][b].transpose()
                } else {
                    meas.bob[y][b].clone()
                };
                s = &s + &left.kron(&eb);
            }
        }
    }
    s.with_layout(SystemLayout::bipartite(da, db)?)
}
