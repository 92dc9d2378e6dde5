use super::state::{dominates_raw, VisitedSet};

#[derive(Debug, Clone, Copy)]
struct Entry {
    g: f64,
    visited: VisitedSet,
}

/// Mutually non-dominated `(g, visited)` pairs retained at one vertex.
///
/// A dominator never has a smaller visited set than the state it
/// dominates, so entries are bucketed by visited-set size and each query only
/// scans the buckets that can matter.
#[derive(Debug, Clone, Default)]
pub struct FrontierSet {
    buckets: Vec<Vec<Entry>>,
    len: usize,
}

impl FrontierSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// True if some retained entry dominates `(g, visited)`.
    pub fn is_dominated(&self, g: f64, visited: &VisitedSet) -> bool {
        let size = visited.len();
        self.buckets
            .iter()
            .skip(size)
            .flatten()
            .any(|e| dominates_raw(e.g, &e.visited, g, visited))
    }

    /// Removes every entry dominated by `(g, visited)`, then inserts it.
    /// Returns the number of entries removed.
    pub fn filter_and_add(&mut self, g: f64, visited: VisitedSet) -> usize {
        let size = visited.len();
        if self.buckets.len() <= size {
            self.buckets.resize_with(size + 1, Vec::new);
        }
        let mut removed = 0;
        for bucket in &mut self.buckets[..=size] {
            let before = bucket.len();
            bucket.retain(|e| !dominates_raw(g, &visited, e.g, &e.visited));
            removed += before - bucket.len();
        }
        self.buckets[size].push(Entry { g, visited });
        self.len = self.len + 1 - removed;
        removed
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &VisitedSet)> {
        self.buckets.iter().flatten().map(|e| (e.g, &e.visited))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> VisitedSet {
        v.iter().copied().collect()
    }

    #[test]
    fn incomparable_states_both_kept() {
        let mut f = FrontierSet::new();
        f.filter_and_add(4.0, set(&[0, 1]));
        assert!(!f.is_dominated(5.0, &set(&[0, 1, 2])));
        assert_eq!(f.filter_and_add(5.0, set(&[0, 1, 2])), 0);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn superset_cheaper_state_evicts() {
        let mut f = FrontierSet::new();
        f.filter_and_add(5.0, set(&[0, 1]));
        f.filter_and_add(6.0, set(&[0, 2, 1]));
        assert_eq!(f.filter_and_add(4.0, set(&[0, 1, 2])), 2);
        assert_eq!(f.len(), 1);
        assert!(f.is_dominated(4.5, &set(&[0, 1])));
        assert!(!f.is_dominated(3.0, &set(&[0, 1])));
    }

    proptest! {
        #[test]
        fn retained_entries_are_mutually_non_dominated(
            items in proptest::collection::vec((0u8..20, proptest::collection::vec(0usize..6, 0..6)), 1..40)
        ) {
            let mut f = FrontierSet::new();
            for (g, vs) in items {
                let vis = set(&vs);
                let g = g as f64;
                if !f.is_dominated(g, &vis) {
                    f.filter_and_add(g, vis);
                }
            }
            let all: Vec<_> = f.iter().map(|(g, v)| (g, *v)).collect();
            prop_assert_eq!(all.len(), f.len());
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    if i != j {
                        prop_assert!(!dominates_raw(a.0, &a.1, b.0, &b.1));
                    }
                }
            }
        }
    }
}
