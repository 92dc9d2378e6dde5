use crate::instance::Instance;

use super::state::SearchState;

/// `gamma(v, k)`: a lower bound on the survival-weighted cost of making `k`
/// more moves from `v`, scaled by the survival factor of `v` itself.
///
/// The recurrence relaxes the visit-once constraint (any vertex other than
/// the current one may be chosen next, including already visited ones), which
/// is what makes it a lower bound:
///
/// ```text
/// gamma(v, 0)     = 0
/// gamma(v, i + 1) = (1 - p(v)) * min_{u != v} (c(v, u) + gamma(u, i))
/// ```
#[derive(Debug, Clone)]
pub struct HeuristicTable {
    n: usize,
    gamma: Vec<f64>,
}

impl HeuristicTable {
    pub fn build(inst: &Instance) -> Self {
        let n = inst.n();
        let mut gamma = vec![0.0; n * n];
        for k in 1..n {
            for v in 0..n {
                let row = inst.row(v);
                let best = (0..n)
                    .filter(|&u| u != v)
                    .map(|u| row[u] + gamma[u * n + k - 1])
                    .fold(f64::INFINITY, f64::min);
                gamma[v * n + k] = (1.0 - inst.prob(v)) * best;
            }
        }
        HeuristicTable { n, gamma }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `gamma(v, k)` for `k` in `0..n`.
    #[inline]
    pub fn gamma(&self, v: usize, k: usize) -> f64 {
        self.gamma[v * self.n + k]
    }

    /// Heuristic for a state at `v` with survival `q` and `remaining` unvisited vertices.
    #[inline]
    pub(crate) fn value(&self, inst: &Instance, v: usize, q: f64, remaining: usize) -> f64 {
        if remaining == 0 {
            return 0.0;
        }
        // q / (1 - p(v)) is the survival before v was reached
        q / (1.0 - inst.prob(v)) * self.gamma(v, remaining)
    }
}

/// Estimated expected cost-to-go of `state`; zero once every vertex is visited.
pub fn heuristic_value(table: &HeuristicTable, inst: &Instance, state: &SearchState) -> f64 {
    table.value(inst, state.vertex(), state.q, state.remaining(inst.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::state::VisitedSet;

    fn three() -> Instance {
        Instance::from_matrix(
            "three",
            vec![
                vec![0.0, 1.0, 4.0],
                vec![1.0, 0.0, 2.0],
                vec![4.0, 2.0, 0.0],
            ],
            vec![0.2, 0.5, 0.3],
            0,
        )
        .unwrap()
    }

    #[test]
    fn hand_evaluated_entries() {
        let t = HeuristicTable::build(&three());
        for v in 0..3 {
            assert_eq!(t.gamma(v, 0), 0.0);
        }
        assert!((t.gamma(0, 1) - 0.8).abs() < 1e-12);
        assert!((t.gamma(1, 1) - 0.5).abs() < 1e-12);
        assert!((t.gamma(2, 1) - 1.4).abs() < 1e-12);
        assert!((t.gamma(0, 2) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn initial_state_value() {
        let inst = three();
        let t = HeuristicTable::build(&inst);
        let s0 = SearchState {
            vertex: 0,
            g: 0.0,
            q: 0.8,
            visited: VisitedSet::singleton(0),
            h: 0.0,
            f: 0.0,
            parent: None,
        };
        assert!((heuristic_value(&t, &inst, &s0) - 1.2).abs() < 1e-12);
        let done = SearchState {
            visited: VisitedSet::full(3),
            ..s0
        };
        assert_eq!(heuristic_value(&t, &inst, &done), 0.0);
    }

    #[test]
    fn single_vertex_table() {
        let inst = Instance::from_matrix("one", vec![vec![0.0]], vec![0.3], 0).unwrap();
        let t = HeuristicTable::build(&inst);
        assert_eq!(t.gamma(0, 0), 0.0);
    }
}
