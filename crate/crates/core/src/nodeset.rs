//! Fixed-universe bit sets over node indices.

use std::fmt;

const WORD: usize = 64;

/// A set of node indices drawn from `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    words: Vec<u64>,
    universe: usize,
}

impl NodeSet {
    pub fn empty(universe: usize) -> Self {
        NodeSet {
            words: vec![0; universe.div_ceil(WORD)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for idx in 0..universe {
            set.insert(idx);
        }
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for idx in indices {
            set.insert(idx);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Returns `true` if the index was not already present.
    pub fn insert(&mut self, idx: usize) -> bool {
        assert!(idx < self.universe, "node index {idx} out of range");
        let (w, b) = (idx / WORD, idx % WORD);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, idx: usize) {
        if idx < self.universe {
            self.words[idx / WORD] &= !(1 << (idx % WORD));
        }
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx < self.universe && self.words[idx / WORD] & (1 << (idx % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn complement(&self) -> NodeSet {
        let mut out = NodeSet::empty(self.universe);
        for idx in 0..self.universe {
            if !self.contains(idx) {
                out.insert(idx);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD + b)
            })
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = NodeSet::from_indices(130, [0, 64, 129]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(129));
        assert!(!a.contains(1));
        assert!(!a.insert(64));
        a.remove(64);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 129]);

        let b = NodeSet::from_indices(130, [0, 5]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![0]);
        assert!(!a.is_disjoint(&b));
        assert_eq!(a.complement().len(), 128);
        assert!(NodeSet::empty(130).is_subset(&a));
    }
}
