//! Relative entropy of nonlocality
//! `N(P) = sup_p inf_{L ∈ local} Σ_xy p(x,y) D(P_xy ‖ L_xy)`.
//!
//! The inner infimum runs pairwise conditional gradient over mixtures of the
//! deterministic vertices, with exact line search, until the linearization gap drops
//! below [`INNER_GAP`]. The outer supremum is projected supergradient ascent on the
//! input simplex; the inner value is a pointwise infimum of functions linear in `p`,
//! hence concave.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::entropy::kl_unchecked;
use crate::bell::{next_assignment, BellBox};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Stopping threshold on the conditional-gradient gap, in bits.
pub const INNER_GAP: f64 = 1e-8;
/// Largest number of vertices handled.
pub const VERTEX_LIMIT: usize = 100_000;

const INNER_MAX_ITER: usize = 200_000;
const OUTER_RESTARTS: usize = 16;
const OUTER_STEPS: usize = 60;
const OUTER_SEED: u64 = 0x5eed_0f1e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NlMode {
    /// Fixed uniform input distribution.
    Uniform,
    /// Supremum over input distributions.
    Optimize,
}

/// Deterministic boxes of a scenario.
#[derive(Debug, Clone)]
pub struct LocalPolytope {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
    pub vertices: Vec<BellBox>,
}

impl LocalPolytope {
    pub fn new(nx: usize, ny: usize, na: usize, nb: usize) -> Result<Self> {
        let count = (na as u128)
            .checked_pow(nx as u32)
            .and_then(|a| (nb as u128).checked_pow(ny as u32).and_then(|b| a.checked_mul(b)));
        match count {
            Some(c) if c <= VERTEX_LIMIT as u128 => {}
            _ => {
                return Err(Error::Unsupported(format!(
                    "local polytope of {na}^{nx} x {nb}^{ny} vertices exceeds {VERTEX_LIMIT}"
                )))
            }
        }
        let mut vertices = Vec::new();
        let mut alice = vec![0usize; nx];
        loop {
            let mut bob = vec![0usize; ny];
            loop {
                vertices.push(BellBox::deterministic(na, nb, &alice, &bob));
                if !next_assignment(&mut bob, nb) {
                    break;
                }
            }
            if !next_assignment(&mut alice, na) {
                break;
            }
        }
        Ok(Self { nx, ny, na, nb, vertices })
    }

    pub fn for_box(p: &BellBox) -> Result<Self> {
        Self::new(p.nx, p.ny, p.na, p.nb)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlResult {
    /// `N(P)` in bits.
    pub value: f64,
    /// Mixture over polytope vertices attaining the inner infimum at `input_dist`.
    pub inner_weights: Vec<f64>,
    /// Input distribution `p(x, y)`, flat in `[x][y]` order.
    pub input_dist: Vec<f64>,
    /// Local box `Σ w_v V_v` attaining the inner infimum, flat `[x][y][a][b]`.
    pub local_box: Vec<f64>,
    /// `D(P_xy ‖ L_xy)` at `local_box`, per input pair.
    pub pair_divergences: Vec<f64>,
    /// Final conditional-gradient gap of the inner problem.
    pub gap: f64,
    pub converged: bool,
    /// Total inner iterations across all outer steps.
    pub iterations: usize,
}

/// Sparse view of a deterministic vertex: the single nonzero entry of every `(x, y)` block.
struct Vertex {
    entries: Vec<usize>,
}

#[derive(Clone)]
pub(crate) struct InnerSolution {
    pub value: f64,
    pub weights: Vec<f64>,
    pub local: Vec<f64>,
    pub pair_divergences: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct InnerSolver<'a> {
    target: &'a BellBox,
    vertices: Vec<Vertex>,
    block: usize,
}

impl<'a> InnerSolver<'a> {
    fn new(target: &'a BellBox, polytope: &LocalPolytope) -> Self {
        let vertices = polytope
            .vertices
            .iter()
            .map(|v| Vertex {
                entries: v.p.iter().enumerate().filter(|(_, &x)| x > 0.5).map(|(i, _)| i).collect(),
            })
            .collect();
        Self {
            target,
            vertices,
            block: target.na * target.nb,
        }
    }

    fn pair_weight(&self, input: &[f64], i: usize) -> f64 {
        input[i / self.block]
    }

    fn objective(&self, input: &[f64], local: &[f64]) -> f64 {
        let p = &self.target.p;
        input
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(xy, &w)| {
                let r = xy * self.block..(xy + 1) * self.block;
                w * kl_unchecked(&p[r.clone()], &local[r])
            })
            .sum()
    }

    /// Gradient of the objective with respect to the local box entries.
    fn box_gradient(&self, input: &[f64], local: &[f64]) -> Vec<f64> {
        let ln2 = std::f64::consts::LN_2;
        self.target
            .p
            .iter()
            .zip(local)
            .enumerate()
            .map(|(i, (&pi, &qi))| {
                if pi <= 0.0 {
                    0.0
                } else {
                    -self.pair_weight(input, i) * pi / (qi * ln2)
                }
            })
            .collect()
    }

    /// Derivative of the objective along `local + t·dir`, `+∞` past the domain.
    fn directional_derivative(&self, input: &[f64], local: &[f64], dir: &[(usize, f64)], t: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let mut acc = 0.0;
        for &(i, d) in dir {
            let pi = self.target.p[i];
            if pi <= 0.0 || d == 0.0 {
                continue;
            }
            let q = local[i] + t * d;
            if q <= 0.0 {
                return f64::INFINITY;
            }
            acc -= self.pair_weight(input, i) * pi * d / (q * ln2);
        }
        acc
    }

    fn solve(&self, input: &[f64], warm: Option<&[f64]>) -> InnerSolution {
        let nv = self.vertices.len();
        let mut weights: Vec<f64> = match warm {
            Some(w) => w.to_vec(),
            None => vec![1.0 / nv as f64; nv],
        };
        let mut local = vec![0.0; self.target.p.len()];
        for (v, &w) in self.vertices.iter().zip(&weights) {
            for &i in &v.entries {
                local[i] += w;
            }
        }

        let mut gap = f64::INFINITY;
        let mut iterations = 0;
        while iterations < INNER_MAX_ITER {
            let grad = self.box_gradient(input, &local);
            let vg: Vec<f64> = self.vertices.iter().map(|v| v.entries.iter().map(|&i| grad[i]).sum()).collect();
            let (fw, fw_val) = argmin(&vg);
            let current: f64 = weights.iter().zip(&vg).map(|(w, g)| w * g).sum();
            gap = current - fw_val;
            if gap <= INNER_GAP {
                break;
            }
            iterations += 1;

            let (away, _) = vg
                .iter()
                .enumerate()
                .filter(|(k, _)| weights[*k] > 0.0)
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, (k, &g)| if g > acc.1 { (k, g) } else { acc });
            let max_step = weights[away];

            // Sparse direction V_fw − V_away.
            let mut dir: Vec<(usize, f64)> = Vec::with_capacity(2 * self.vertices[fw].entries.len());
            for &i in &self.vertices[fw].entries {
                dir.push((i, 1.0));
            }
            for &i in &self.vertices[away].entries {
                match dir.iter_mut().find(|(j, _)| *j == i) {
                    Some(slot) => slot.1 -= 1.0,
                    None => dir.push((i, -1.0)),
                }
            }

            let step = if self.directional_derivative(input, &local, &dir, max_step) <= 0.0 {
                max_step
            } else {
                let (mut lo, mut hi) = (0.0, max_step);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if self.directional_derivative(input, &local, &dir, mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-17 {
                        break;
                    }
                }
                lo
            };
            if step <= 0.0 {
                // No progress possible along the pairwise direction; fall back to a
                // plain conditional-gradient step toward the best vertex.
                let mut fw_dir: Vec<(usize, f64)> = local.iter().enumerate().map(|(i, &q)| (i, -q)).collect();
                for &i in &self.vertices[fw].entries {
                    fw_dir[i].1 += 1.0;
                }
                let (mut lo, mut hi) = (0.0, 1.0);
                if self.directional_derivative(input, &local, &fw_dir, 1.0) <= 0.0 {
                    lo = 1.0;
                } else {
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if self.directional_derivative(input, &local, &fw_dir, mid) > 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                }
                if lo <= 0.0 {
                    break;
                }
                weights.iter_mut().for_each(|w| *w *= 1.0 - lo);
                weights[fw] += lo;
                local.iter_mut().zip(&fw_dir).for_each(|(q, &(_, d))| *q += lo * d);
                continue;
            }
            weights[fw] += step;
            weights[away] -= step;
            if step == max_step {
                weights[away] = 0.0;
            }
            for &(i, d) in &dir {
                local[i] += step * d;
            }
        }

        let pair_divergences = (0..input.len())
            .map(|xy| {
                let r = xy * self.block..(xy + 1) * self.block;
                kl_unchecked(&self.target.p[r.clone()], &local[r])
            })
            .collect();
        InnerSolution {
            value: self.objective(input, &local),
            weights,
            local,
            pair_divergences,
            gap,
            iterations,
            converged: gap <= INNER_GAP,
        }
    }
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &x)| if x < acc.1 { (k, x) } else { acc })
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Relative entropy of nonlocality of a box, in bits.
#[allow(non_snake_case)]
pub fn nonlocality_N(target: &BellBox, mode: NlMode) -> Result<NlResult> {
    target.validate(Tolerances::default().assert)?;
    let polytope = LocalPolytope::for_box(target)?;
    let solver = InnerSolver::new(target, &polytope);
    let pairs = target.nx * target.ny;
    let uniform = vec![1.0 / pairs as f64; pairs];

    let mut best_input = uniform.clone();
    let mut best = solver.solve(&uniform, None);
    let mut iterations = best.iterations;

    if mode == NlMode::Optimize && pairs > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(OUTER_SEED);
        for restart in 0..OUTER_RESTARTS {
            let mut input = if restart == 0 {
                uniform.clone()
            } else {
                let raw: Vec<f64> = (0..pairs).map(|_| Exp1.sample(&mut rng)).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / s).collect()
            };
            let mut warm: Option<Vec<f64>> = None;
            for step in 0..OUTER_STEPS {
                let sol = solver.solve(&input, warm.as_deref());
                iterations += sol.iterations;
                if sol.value > best.value {
                    best_input = input.clone();
                    best = sol.clone();
                }
                let sg = &sol.pair_divergences;
                let mean = sg.iter().sum::<f64>() / pairs as f64;
                let centered: Vec<f64> = sg.iter().map(|g| g - mean).collect();
                let norm = centered.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm < 1e-15 {
                    break;
                }
                let eta = 0.25 / ((step + 1) as f64).sqrt() / norm;
                let moved: Vec<f64> = input.iter().zip(&centered).map(|(p, g)| p + eta * g).collect();
                input = project_simplex(&moved);
                warm = Some(sol.weights);
            }
        }
    }

    Ok(NlResult {
        value: best.value,
        inner_weights: best.weights,
        input_dist: best_input,
        local_box: best.local,
        pair_divergences: best.pair_divergences,
        gap: best.gap,
        converged: best.converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsirelson_box() -> BellBox {
        let e = std::f64::consts::FRAC_1_SQRT_2;
        let mut p = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                let sign = if x * y == 1 { -1.0 } else { 1.0 };
                for a in 0..2 {
                    for b in 0..2 {
                        let corr = if a == b { 1.0 } else { -1.0 };
                        p.push(0.25 * (1.0 + sign * corr * e));
                    }
                }
            }
        }
        BellBox::new(2, 2, 2, 2, p).unwrap()
    }

    #[test]
    fn polytope_vertex_count() {
        assert_eq!(LocalPolytope::new(2, 2, 2, 2).unwrap().len(), 16);
        assert_eq!(LocalPolytope::new(3, 2, 2, 3).unwrap().len(), 8 * 9);
        assert!(LocalPolytope::new(20, 20, 2, 2).is_err());
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn vertex_has_zero_nonlocality() {
        let v = BellBox::deterministic(2, 2, &[0, 1], &[1, 1]);
        let r = nonlocality_N(&v, NlMode::Optimize).unwrap();
        assert!(r.value.abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn tsirelson_box_positive() {
        let r = nonlocality_N(&tsirelson_box(), NlMode::Uniform).unwrap();
        assert!(r.converged);
        // Closed form at the isotropic local box with E = 1/2.
        let p = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        let expected = p * (p / 0.75).log2() + (1.0 - p) * ((1.0 - p) / 0.25).log2();
        assert!((r.value - expected).abs() < 1e-6, "{} vs {expected}", r.value);
    }

    #[test]
    fn optimize_dominates_uniform() {
        let t = tsirelson_box();
        let u = nonlocality_N(&t, NlMode::Uniform).unwrap();
        let o = nonlocality_N(&t, NlMode::Optimize).unwrap();
        assert!(o.value >= u.value - 1e-9);
        assert!((o.input_dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
