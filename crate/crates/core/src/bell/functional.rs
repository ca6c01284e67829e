use serde::{Deserialize, Serialize};

use super::BellBox;
use crate::error::{Error, Result};

/// Maximum number of deterministic strategy pairs `na^nx · nb^ny` enumerated exactly.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Linear functional `Σ s^{ab}_{xy} P(ab|xy)` on boxes. Coefficients are stored flat in
/// `[x][y][a][b]` order. `offset` accumulates the constant added by [`nonnegativize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl BellFunctional {
    pub fn new(nx: usize, ny: usize, na: usize, nb: usize, coeffs: Vec<f64>) -> Result<Self> {
        let f = Self {
            nx,
            ny,
            na,
            nb,
            coeffs,
            offset: 0.0,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn zeros(nx: usize, ny: usize, na: usize, nb: usize) -> Result<Self> {
        Self::new(nx, ny, na, nb, vec![0.0; nx * ny * na * nb])
    }

    pub fn validate(&self) -> Result<()> {
        if [self.nx, self.ny, self.na, self.nb].contains(&0) {
            return Err(Error::Validation("scenario cardinalities must be positive".into()));
        }
        if self.coeffs.len() != self.nx * self.ny * self.na * self.nb {
            return Err(Error::Validation(format!(
                "coefficient table has {} entries, scenario needs {}",
                self.coeffs.len(),
                self.nx * self.ny * self.na * self.nb
            )));
        }
        if !self.offset.is_finite() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("non-finite coefficient or offset".into()));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.ny + y) * self.na + a) * self.nb + b
    }

    #[inline]
    pub fn coeff(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.coeffs[self.index(x, y, a, b)]
    }

    pub fn same_scenario(&self, p: &BellBox) -> bool {
        (self.nx, self.ny, self.na, self.nb) == (p.nx, p.ny, p.na, p.nb)
    }

    /// `Σ s^{ab}_{xy} P(ab|xy)`; the offset is bookkeeping and is not subtracted.
    pub fn value(&self, p: &BellBox) -> Result<f64> {
        if !self.same_scenario(p) {
            return Err(Error::Structural("functional and box have different scenarios".into()));
        }
        Ok(self.coeffs.iter().zip(&p.p).map(|(s, q)| s * q).sum())
    }
}

/// CHSH with coefficients `s^{ab}_{xy} = (−1)^{a+b+xy}`: the value on a box is
/// `E₀₀ + E₀₁ + E₁₀ − E₁₁`, so the classical maximum is 2 and the quantum one 2√2.
pub fn chsh() -> BellFunctional {
    let mut coeffs = Vec::with_capacity(16);
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let parity = (a + b + x * y) % 2;
                    coeffs.push(if parity == 0 { 1.0 } else { -1.0 });
                }
            }
        }
    }
    BellFunctional::new(2, 2, 2, 2, coeffs).expect("CHSH table is well formed")
}

/// Shifts each `(x, y)` block by `c_xy = −min_ab s^{ab}_{xy}` so that all coefficients
/// become nonnegative. On normalized boxes the value moves by exactly `Σ c_xy`, which
/// is added to `offset`.
pub fn nonnegativize(f: &BellFunctional) -> BellFunctional {
    let mut out = f.clone();
    let block = f.na * f.nb;
    let mut shift_total = 0.0;
    for xy in 0..f.nx * f.ny {
        let slice = &mut out.coeffs[xy * block..(xy + 1) * block];
        let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = (-min).max(0.0);
        if shift > 0.0 {
            slice.iter_mut().for_each(|s| *s += shift);
            shift_total += shift;
        }
    }
    out.offset += shift_total;
    out
}

/// Exact classical maximum over deterministic strategies. Alice's strategies are
/// enumerated and Bob plays the best response for each `y` separately, which is exact
/// because the objective separates over `y` once Alice is fixed.
pub fn classical_value(f: &BellFunctional) -> Result<f64> {
    f.validate()?;
    let pairs = (f.na as u128)
        .checked_pow(f.nx as u32)
        .and_then(|a| (f.nb as u128).checked_pow(f.ny as u32).and_then(|b| a.checked_mul(b)));
    match pairs {
        Some(n) if n <= ENUMERATION_LIMIT => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "{}^{} x {}^{} deterministic strategies exceed the enumeration limit {ENUMERATION_LIMIT}; scenario too large",
                f.na, f.nx, f.nb, f.ny
            )))
        }
    }

    let mut alice = vec![0usize; f.nx];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut total = 0.0;
        for y in 0..f.ny {
            let mut best_b = f64::NEG_INFINITY;
            for b in 0..f.nb {
                let v: f64 = (0..f.nx).map(|x| f.coeff(x, y, alice[x], b)).sum();
                best_b = best_b.max(v);
            }
            total += best_b;
        }
        best = best.max(total);
        if !next_assignment(&mut alice, f.na) {
            break;
        }
    }
    Ok(best)
}

/// Odometer increment over `{0..base}^n`; false once all assignments are exhausted.
pub(crate) fn next_assignment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over every (Alice, Bob) deterministic strategy pair.
    fn brute_force_classical(f: &BellFunctional) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut a = vec![0; f.nx];
        loop {
            let mut b = vec![0; f.ny];
            loop {
                let v: f64 = (0..f.nx)
                    .flat_map(|x| (0..f.ny).map(move |y| (x, y)))
                    .map(|(x, y)| f.coeff(x, y, a[x], b[y]))
                    .sum();
                best = best.max(v);
                if !next_assignment(&mut b, f.nb) {
                    break;
                }
            }
            if !next_assignment(&mut a, f.na) {
                break;
            }
        }
        best
    }

    #[test]
    fn chsh_classical_value_is_two() {
        assert_eq!(classical_value(&chsh()).unwrap(), 2.0);
        assert_eq!(brute_force_classical(&chsh()), 2.0);
    }

    #[test]
    fn trivial_functionals() {
        assert_eq!(classical_value(&BellFunctional::zeros(3, 2, 2, 3).unwrap()).unwrap(), 0.0);
        let single = BellFunctional::new(1, 1, 1, 1, vec![7.0]).unwrap();
        assert_eq!(classical_value(&single).unwrap(), 7.0);
    }

    #[test]
    fn enumeration_guard() {
        let f = BellFunctional::zeros(12, 12, 4, 4).unwrap();
        assert!(matches!(classical_value(&f), Err(Error::Unsupported(_))));
    }

    #[test]
    fn nonnegativize_chsh() {
        let g = nonnegativize(&chsh());
        assert!(g.coeffs.iter().all(|&c| c >= 0.0));
        assert_eq!(g.offset, 4.0);
        assert_eq!(classical_value(&g).unwrap(), 2.0 + g.offset);
        let again = nonnegativize(&g);
        assert_eq!(again, g);
    }

    #[test]
    fn classical_value_matches_brute_force_on_irregular_scenarios() {
        // Deterministic pseudo-random coefficients in a 3x2 inputs, 2x3 outputs scenario.
        let coeffs: Vec<f64> = (0..3 * 2 * 2 * 3).map(|k| ((k as f64) * 1.618).sin() * 3.0).collect();
        let f = BellFunctional::new(3, 2, 2, 3, coeffs).unwrap();
        let fast = classical_value(&f).unwrap();
        assert!((fast - brute_force_classical(&f)).abs() < 1e-12);
        let g = nonnegativize(&f);
        assert!((classical_value(&g).unwrap() - fast - g.offset).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = serde_json::to_string(&chsh()).unwrap();
        assert_eq!(BellFunctional::from_json_str(&s).unwrap(), chsh());
        let bad = r#"{"nx":2,"ny":2,"na":2,"nb":2,"coeffs":[1,2,3]}"#;
        assert!(BellFunctional::from_json_str(bad).is_err());
    }
}
