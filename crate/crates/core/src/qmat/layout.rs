use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the bipartite cut a tensor factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Ordered tensor factors `(dim, party)`; the first factor is the most significant
/// digit of a row-major basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemLayout {
    factors: Vec<(usize, Party)>,
}

impl SystemLayout {
    pub fn new(factors: Vec<(usize, Party)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Structural("layout needs at least one factor".into()));
        }
        if let Some((d, _)) = factors.iter().find(|(d, _)| *d == 0) {
            return Err(Error::Structural(format!("factor dimension {d} < 1")));
        }
        Ok(Self { factors })
    }

    /// One factor for each party: `A(da) ⊗ B(db)`.
    pub fn bipartite(da: usize, db: usize) -> Result<Self> {
        Self::new(vec![(da, Party::A), (db, Party::B)])
    }

    pub fn factors(&self) -> &[(usize, Party)] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(d, _)| d).product()
    }

    /// Product of the dimensions of all factors held by `party`.
    pub fn party_dim(&self, party: Party) -> usize {
        self.factors
            .iter()
            .filter(|(_, p)| *p == party)
            .map(|(d, _)| d)
            .product()
    }

    pub fn has_both_parties(&self) -> bool {
        self.factors.iter().any(|(_, p)| *p == Party::A) && self.factors.iter().any(|(_, p)| *p == Party::B)
    }

    /// True when every A factor precedes every B factor.
    pub fn is_canonical(&self) -> bool {
        let first_b = self.factors.iter().position(|(_, p)| *p == Party::B);
        match first_b {
            None => true,
            Some(i) => self.factors[i..].iter().all(|(_, p)| *p == Party::B),
        }
    }

    /// Factor order that moves all A factors in front of all B factors, preserving
    /// the relative order within each party.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.factors.len()).filter(|&i| self.factors[i].1 == Party::A).collect();
        order.extend((0..self.factors.len()).filter(|&i| self.factors[i].1 == Party::B));
        order
    }

    /// Layout of `self ⊗ other`.
    pub fn concat(&self, other: &SystemLayout) -> SystemLayout {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SystemLayout { factors }
    }

    pub fn permuted(&self, order: &[usize]) -> Result<SystemLayout> {
        check_permutation(order, self.factors.len())?;
        Ok(SystemLayout {
            factors: order.iter().map(|&i| self.factors[i]).collect(),
        })
    }

    /// Row-major strides of each factor.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].0;
        }
        strides
    }

    /// For every basis index, the part of the index carried by `party`'s factors
    /// (as an offset in the full index) and its compact index within that party.
    pub(crate) fn party_split(&self, party: Party) -> Vec<(usize, usize)> {
        let strides = self.strides();
        let dim = self.total_dim();
        let mut out = Vec::with_capacity(dim);
        for idx in 0..dim {
            let mut offset = 0;
            let mut compact = 0;
            for (k, &(d, p)) in self.factors.iter().enumerate() {
                if p != party {
                    continue;
                }
                let digit = (idx / strides[k]) % d;
                offset += digit * strides[k];
                compact = compact * d + digit;
            }
            out.push((offset, compact));
        }
        out
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Structural(format!("permutation of length {} for {n} factors", order.len())));
    }
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::Structural(format!("invalid factor permutation {order:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}
