//! Seesaw lower bounds on `Q_S(ρ)` for two-outcome scenarios.
//!
//! Each half-step freezes one party and replaces every input of the other party by the
//! projector onto the positive eigenspace of `R_{0|x} − R_{1|x}`, where `R_{a|x}` is the
//! operator the frozen side induces on the free side. That choice is the exact optimum
//! of the half-step, so the objective never decreases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::measurement::{canonical_state, reduce_with_a, reduce_with_b};
use super::{box_from, BellFunctional, MeasurementFamily};
use crate::error::{Error, Result};
use crate::qmat::{eigh, random, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once a full iteration improves the value by less than this.
    pub tol: f64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 7,
            max_iter: 2000,
            tol: 1e-14,
        }
    }
}

impl SeesawConfig {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    /// `Tr Sρ` at `meas`.
    pub value: f64,
    pub meas: MeasurementFamily,
    /// Objective after every half-step of the winning restart.
    pub history: Vec<f64>,
    /// Final value of every restart, in restart order.
    pub restart_values: Vec<f64>,
    pub best_restart: usize,
    pub iterations: usize,
}

/// Projector onto the strictly positive eigenspace of a Hermitian matrix.
fn positive_projector(m: &CMatrix) -> CMatrix {
    eigh(m).reconstruct_with(|l| if l > 0.0 { 1.0 } else { 0.0 })
}

/// Alice elements, Bob elements, per-half-step history and iteration count of one restart.
type Run = (Vec<Vec<CMatrix>>, Vec<Vec<CMatrix>>, Vec<f64>, usize);

struct Problem<'a> {
    rho: CMatrix,
    f: &'a BellFunctional,
    da: usize,
    db: usize,
}

impl Problem<'_> {
    /// Best Alice projectors against fixed Bob elements; returns them with the objective.
    fn update_alice(&self, bob: &[Vec<CMatrix>]) -> (Vec<CMatrix>, f64) {
        let reduced: Vec<Vec<CMatrix>> = bob
            .iter()
            .map(|p| p.iter().map(|e| reduce_with_b(&self.rho, e, self.da, self.db)).collect())
            .collect();
        let mut total = 0.0;
        let projectors = (0..self.f.nx)
            .map(|x| {
                let mut r = [CMatrix::zeros(self.da), CMatrix::zeros(self.da)];
                for (y, per_b) in reduced.iter().enumerate() {
                    for (b, red) in per_b.iter().enumerate() {
                        for (a, slot) in r.iter_mut().enumerate() {
                            let c = self.f.coeff(x, y, a, b);
                            if c != 0.0 {
                                *slot = &*slot + &red.scale(c);
                            }
                        }
                    }
                }
                let proj = positive_projector(&(&r[0] - &r[1]));
                total += r[1].trace().re + proj.trace_product(&(&r[0] - &r[1])).unwrap().re;
                proj
            })
            .collect();
        (projectors, total)
    }

    fn update_bob(&self, alice: &[Vec<CMatrix>]) -> (Vec<CMatrix>, f64) {
        let reduced: Vec<Vec<CMatrix>> = alice
            .iter()
            .map(|p| p.iter().map(|e| reduce_with_a(&self.rho, e, self.da, self.db)).collect())
            .collect();
        let mut total = 0.0;
        let projectors = (0..self.f.ny)
            .map(|y| {
                let mut r = [CMatrix::zeros(self.db), CMatrix::zeros(self.db)];
                for (x, per_a) in reduced.iter().enumerate() {
                    for (a, red) in per_a.iter().enumerate() {
                        for (b, slot) in r.iter_mut().enumerate() {
                            let c = self.f.coeff(x, y, a, b);
                            if c != 0.0 {
                                *slot = &*slot + &red.scale(c);
                            }
                        }
                    }
                }
                let proj = positive_projector(&(&r[0] - &r[1]));
                total += r[1].trace().re + proj.trace_product(&(&r[0] - &r[1])).unwrap().re;
                proj
            })
            .collect();
        (projectors, total)
    }

    fn run(&self, rng: &mut ChaCha8Rng, cfg: &SeesawConfig) -> Run {
        let binary = |ps: Vec<CMatrix>| -> Vec<Vec<CMatrix>> {
            ps.into_iter()
                .map(|p| {
                    let comp = &CMatrix::identity(p.dim()) - &p;
                    vec![p, comp]
                })
                .collect()
        };
        let mut bob = binary((0..self.f.ny).map(|_| random::random_projector(self.db, rng)).collect());
        let mut alice;
        let mut history = Vec::new();
        let mut last = f64::NEG_INFINITY;
        let mut iterations = 0;
        loop {
            iterations += 1;
            let (pa, va) = self.update_alice(&bob);
            alice = binary(pa);
            let (pb, vb) = self.update_bob(&alice);
            bob = binary(pb);
            history.push(va);
            history.push(vb);
            if vb - last < cfg.tol || iterations >= cfg.max_iter {
                break;
            }
            last = vb;
        }
        (alice, bob, history, iterations)
    }
}

/// Seesaw over `restarts` seeded random starts; restarts run in parallel and the result
/// depends only on `(rho, f, cfg)`.
pub fn seesaw(rho: &CMatrix, f: &BellFunctional, cfg: &SeesawConfig) -> Result<SeesawResult> {
    f.validate()?;
    if f.na != 2 || f.nb != 2 {
        return Err(Error::Unsupported(format!(
            "seesaw supports two-outcome measurements only (got {} and {} outcomes)",
            f.na, f.nb
        )));
    }
    if cfg.restarts == 0 {
        return Err(Error::Validation("seesaw needs at least one restart".into()));
    }
    let (rho, da, db) = canonical_state(rho)?;
    let problem = Problem { rho, f, da, db };

    let runs: Vec<_> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            problem.run(&mut rng, cfg)
        })
        .collect();

    let mut restart_values = Vec::with_capacity(runs.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, (_, _, history, _)) in runs.iter().enumerate() {
        let v = *history.last().expect("at least one iteration");
        restart_values.push(v);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    let (best_restart, _) = best.expect("at least one restart");
    let (alice, bob, history, iterations) = runs.into_iter().nth(best_restart).expect("index in range");
    let meas = MeasurementFamily::from_parts_unchecked(alice, bob);
    // Report the value recomputed from the box so it is exactly Tr Sρ at `meas`.
    let value = f.value(&box_from(&problem.rho, &meas)?)?;
    Ok(SeesawResult {
        value,
        meas,
        history,
        restart_values,
        best_restart,
        iterations,
    })
}
