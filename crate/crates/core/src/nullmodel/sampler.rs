//! Exact integer categorical sampling.
//!
//! A draw picks `u` uniformly from `[0, total)` and returns the first member
//! whose cumulative weight exceeds `u`, so member `k` is chosen with
//! probability exactly `w_k / total`.

use rand::Rng;

/// Sampler over a fixed weight vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalSampler {
    cumulative: Vec<u64>,
}

impl CategoricalSampler {
    /// `None` if the weights sum to zero (or overflow).
    pub fn new(weights: &[u64]) -> Option<Self> {
        let mut acc = 0u64;
        let mut cumulative = Vec::with_capacity(weights.len());
        for &w in weights {
            acc = acc.checked_add(w)?;
            cumulative.push(acc);
        }
        (acc > 0).then_some(CategoricalSampler { cumulative })
    }

    pub fn total(&self) -> u64 {
        *self.cumulative.last().expect("non-empty by construction")
    }

    /// Member owning point `u` of `[0, total)`.
    #[inline]
    pub fn index_of(&self, u: u64) -> usize {
        debug_assert!(u < self.total());
        self.cumulative.partition_point(|&c| c <= u)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index_of(rng.random_range(0..self.total()))
    }
}

/// Fenwick tree of non-negative weights with point updates and
/// inverse-prefix lookup. The rewiring sweep keeps live-project weights here.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    total: u64,
    top_bit: usize,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        let top_bit = if len == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - len.leading_zeros())
        };
        Fenwick {
            tree: vec![0; len + 1],
            total: 0,
            top_bit,
        }
    }

    pub(crate) fn add(&mut self, idx: usize, w: u64) {
        self.total += w;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += w;
            i += i & i.wrapping_neg();
        }
    }

    pub(crate) fn remove(&mut self, idx: usize, w: u64) {
        self.total -= w;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] -= w;
            i += i & i.wrapping_neg();
        }
    }

    #[inline]
    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    /// Smallest index whose inclusive prefix sum exceeds `u`. Requires `u < total`.
    pub(crate) fn find(&self, mut u: u64) -> usize {
        debug_assert!(u < self.total);
        let mut pos = 0usize;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_all_zero_weights() {
        assert!(CategoricalSampler::new(&[0, 0]).is_none());
        assert!(CategoricalSampler::new(&[]).is_none());
    }

    #[test]
    fn zero_weight_members_are_unreachable() {
        let s = CategoricalSampler::new(&[3, 0, 1]).unwrap();
        let picks: Vec<usize> = (0..4).map(|u| s.index_of(u)).collect();
        assert_eq!(picks, vec![0, 0, 0, 2]);
    }

    proptest! {
        #[test]
        fn fenwick_matches_cumulative_search(
            weights in prop::collection::vec(0u64..20, 1..80),
            active in prop::collection::vec(any::<bool>(), 80),
        ) {
            let masked: Vec<u64> = weights
                .iter()
                .zip(&active)
                .map(|(&w, &a)| if a { w } else { 0 })
                .collect();
            let mut fw = Fenwick::new(weights.len());
            for (i, &w) in weights.iter().enumerate() {
                fw.add(i, w);
            }
            for (i, &w) in weights.iter().enumerate() {
                if !active[i] {
                    fw.remove(i, w);
                }
            }
            match CategoricalSampler::new(&masked) {
                None => prop_assert_eq!(fw.total(), 0),
                Some(s) => {
                    prop_assert_eq!(fw.total(), s.total());
                    for u in 0..s.total() {
                        prop_assert_eq!(fw.find(u), s.index_of(u));
                    }
                }
            }
        }
    }
}
