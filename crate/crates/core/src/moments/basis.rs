//! Enumeration of the normally-ordered moment basis ⟨a†ʲ aᵏ b†ˡ bᵐ⟩.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use crate::error::MomentError;

/// Exponents (j, k, l, m) of a normally-ordered moment ⟨a†ʲ aᵏ b†ˡ bᵐ⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentIndex {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

impl MomentIndex {
    pub const fn new(j: usize, k: usize, l: usize, m: usize) -> Self {
        Self { j, k, l, m }
    }

    /// Total order n = j + k + l + m.
    pub fn order(&self) -> usize {
        self.j + self.k + self.l + self.m
    }

    /// Index of the complex-conjugate moment: (j,k,l,m) -> (k,j,m,l).
    pub fn conj(&self) -> Self {
        Self {
            j: self.k,
            k: self.j,
            l: self.m,
            m: self.l,
        }
    }

    /// Net excitation imbalance (j − k) + (l − m) under joint mode rotation.
    pub fn rotation_charge(&self) -> i64 {
        (self.j as i64 - self.k as i64) + (self.l as i64 - self.m as i64)
    }
}

impl std::fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.j, self.k, self.l, self.m)
    }
}

/// Largest supported total order. Block sizes grow like n³; order 8 keeps the
/// largest dense block at 165×165.
pub const MAX_SUPPORTED_ORDER: usize = 8;

#[derive(Debug)]
struct BasisInner {
    max_order: usize,
    indices: Vec<MomentIndex>,
    lookup: HashMap<MomentIndex, usize>,
    /// `group_start[n]` is the flat offset of the first order-n index;
    /// has `max_order + 2` entries so that group n is
    /// `group_start[n]..group_start[n+1]`.
    group_start: Vec<usize>,
}

/// All moment indices with total order ≤ `max_order`, grouped by order and
/// lexicographic within each group. Cheap to clone (shared storage).
#[derive(Debug, Clone)]
pub struct MomentBasis(Arc<BasisInner>);

impl MomentBasis {
    pub fn new(max_order: usize) -> Result<Self, MomentError> {
        if max_order > MAX_SUPPORTED_ORDER {
            return Err(MomentError::OrderTooLarge(max_order));
        }
        let mut indices = Vec::new();
        let mut group_start = vec![0];
        for n in 0..=max_order {
            for j in 0..=n {
                for k in 0..=n - j {
                    for l in 0..=n - j - k {
                        let m = n - j - k - l;
                        indices.push(MomentIndex::new(j, k, l, m));
                    }
                }
            }
            group_start.push(indices.len());
        }
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, &idx)| (idx, i))
            .collect();
        Ok(Self(Arc::new(BasisInner {
            max_order,
            indices,
            lookup,
            group_start,
        })))
    }

    pub fn max_order(&self) -> usize {
        self.0.max_order
    }

    pub fn len(&self) -> usize {
        self.0.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.indices.is_empty()
    }

    pub fn indices(&self) -> &[MomentIndex] {
        &self.0.indices
    }

    pub fn index_of(&self, idx: MomentIndex) -> Option<usize> {
        self.0.lookup.get(&idx).copied()
    }

    /// Flat range of the order-n group.
    pub fn order_range(&self, n: usize) -> Range<usize> {
        self.0.group_start[n]..self.0.group_start[n + 1]
    }

    /// Number of indices of total order exactly n: C(n+3, 3).
    pub fn group_len(&self, n: usize) -> usize {
        let r = self.order_range(n);
        r.end - r.start
    }
}
