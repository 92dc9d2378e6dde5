use serde::Serialize;

use super::SolveError;

const WORDS: usize = 4;

/// Largest vertex count a [`VisitedSet`] can represent.
pub const MAX_VERTICES: usize = WORDS * 64;

/// Fixed-capacity bit set of visited vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VisitedSet([u64; WORDS]);

impl VisitedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        let mut s = Self::new();
        for (w, word) in s.0.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    pub fn with(mut self, v: usize) -> Self {
        self.insert(v);
        self
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.0[v >> 6] & (1 << (v & 63)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn is_superset(&self, other: &VisitedSet) -> bool {
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|(a, b)| b & !a == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_VERTICES).filter(move |&v| self.contains(v))
    }
}

impl FromIterator<usize> for VisitedSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VisitedSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl Serialize for VisitedSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Index of a state in the search arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StateId(pub u32);

/// A partial path summarised by its end vertex, expected cost-to-come `g`,
/// survival probability `q` and visited set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchState {
    pub vertex: u32,
    pub g: f64,
    pub q: f64,
    pub visited: VisitedSet,
    pub h: f64,
    pub f: f64,
    pub parent: Option<StateId>,
}

impl SearchState {
    pub fn vertex(&self) -> usize {
        self.vertex as usize
    }

    /// Number of vertices still to visit on an `n`-vertex instance.
    pub fn remaining(&self, n: usize) -> usize {
        n - self.visited.len()
    }
}

/// Absolute slack on `g` when testing dominance.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

#[inline]
pub(crate) fn dominates_raw(g1: f64, a1: &VisitedSet, g2: f64, a2: &VisitedSet) -> bool {
    g1 <= g2 + DOMINANCE_TOLERANCE && a1.is_superset(a2)
}

/// `s1` dominates `s2` when both end at the same vertex, `s1` is no more
/// expensive (within [`DOMINANCE_TOLERANCE`]) and has visited a superset.
pub fn dominates(s1: &SearchState, s2: &SearchState) -> Result<bool, SolveError> {
    if s1.vertex != s2.vertex {
        return Err(SolveError::InvalidArgument(format!(
            "dominance compares states at vertices {} and {}",
            s1.vertex, s2.vertex
        )));
    }
    let d = dominates_raw(s1.g, &s1.visited, s2.g, &s2.visited);
    // a superset visited set can only have survived more vertices
    debug_assert!(!d || s1.q <= s2.q * (1.0 + 1e-12));
    Ok(d)
}
