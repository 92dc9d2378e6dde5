//! Problem instances: a complete directed graph with edge costs, a
//! termination probability per vertex and a start vertex.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when checking the triangle inequality on floating costs.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Seed driving every stochastic generator in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent sub-seed for stream `stream`; the mapping is fixed per (seed, stream).
    pub fn derive(self, stream: u64) -> Seed {
        use rand::RngCore;
        let mut rng = self.rng();
        rng.set_stream(stream);
        Seed(rng.next_u64())
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// A vertex visiting order. Solution paths start at the instance start vertex
/// and visit every vertex exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn new(order: Vec<usize>) -> Self {
        Path(order)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that the path is a (possibly partial) simple path from the start vertex.
    pub fn validate_prefix(&self, inst: &Instance) -> Result<()> {
        let Some(&first) = self.0.first() else {
            return Ok(());
        };
        if first != inst.start() {
            return Err(Error::InvalidArgument(format!(
                "path starts at {first}, instance start is {}",
                inst.start()
            )));
        }
        let mut seen = vec![false; inst.n()];
        for &v in &self.0 {
            if v >= inst.n() {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} out of range for n = {}",
                    inst.n()
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!("vertex {v} repeats")));
            }
        }
        Ok(())
    }

    pub fn validate_solution(&self, inst: &Instance) -> Result<()> {
        self.validate_prefix(inst)?;
        if self.0.len() != inst.n() {
            return Err(Error::InvalidArgument(format!(
                "path visits {} of {} vertices",
                self.0.len(),
                inst.n()
            )));
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Path {
    fn from(order: Vec<usize>) -> Self {
        Path(order)
    }
}

/// Graph with probabilistic terminals.
///
/// Instances are immutable once built; every constructor validates the basic
/// invariants (`n >= 1`, `0 <= p < 1`, zero diagonal, positive finite
/// off-diagonal costs). The triangle inequality is checked separately by
/// [`Instance::check_metric`] because callers differ in how they want to react.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    n: usize,
    cost: Vec<f64>,
    prob: Vec<f64>,
    start: usize,
    coords: Option<Vec<[f64; 2]>>,
    euclidean: bool,
    seed: Option<Seed>,
}

impl Instance {
    /// Builds an instance from an explicit cost matrix.
    pub fn from_matrix(
        name: impl Into<String>,
        matrix: Vec<Vec<f64>>,
        prob: Vec<f64>,
        start: usize,
    ) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance("cost matrix is not square".into()));
        }
        let cost = matrix.into_iter().flatten().collect();
        Self::from_flat(name.into(), n, cost, prob, start)
    }

    /// Builds an instance whose costs are exact Euclidean distances between `coords`.
    pub fn from_coords(
        name: impl Into<String>,
        coords: Vec<[f64; 2]>,
        prob: Vec<f64>,
        start: usize,
    ) -> Result<Self> {
        let n = coords.len();
        let mut cost = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cost[i * n + j] = euclidean(coords[i], coords[j]);
                }
            }
        }
        let mut inst = Self::from_flat(name.into(), n, cost, prob, start)?;
        inst.coords = Some(coords);
        inst.euclidean = true;
        Ok(inst)
    }

    pub(crate) fn from_flat(
        name: String,
        n: usize,
        cost: Vec<f64>,
        prob: Vec<f64>,
        start: usize,
    ) -> Result<Self> {
        let inst = Instance {
            name,
            n,
            cost,
            prob,
            start,
            coords: None,
            euclidean: false,
            seed: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidInstance("instance has no vertices".into()));
        }
        if self.cost.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "cost matrix has {} entries, expected {}",
                self.cost.len(),
                n * n
            )));
        }
        if self.prob.len() != n {
            return Err(Error::InvalidInstance(format!(
                "probability vector has {} entries, expected {n}",
                self.prob.len()
            )));
        }
        if self.start >= n {
            return Err(Error::InvalidInstance(format!(
                "start vertex {} out of range for n = {n}",
                self.start
            )));
        }
        for (v, &p) in self.prob.iter().enumerate() {
            // Strict: p = 1 would zero every later q-value.
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidInstance(format!(
                    "probability of vertex {v} is {p}, must lie in [0, 1)"
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.cost[i * n + j];
                if i == j {
                    if c != 0.0 {
                        return Err(Error::InvalidInstance(format!(
                            "cost({i},{i}) = {c}, diagonal must be zero"
                        )));
                    }
                } else if !(c.is_finite() && c > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "cost({i},{j}) = {c}, off-diagonal costs must be positive and finite"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.cost[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn prob(&self, v: usize) -> f64 {
        self.prob[v]
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    /// True when costs are the exact Euclidean distances of the stored coordinates.
    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.cost(i, j) == self.cost(j, i)))
    }

    pub fn cost_matrix(&self) -> Vec<Vec<f64>> {
        self.cost.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_seed(mut self, seed: Option<Seed>) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn with_coords_metadata(mut self, coords: Option<Vec<[f64; 2]>>) -> Self {
        self.coords = coords;
        self
    }

    pub fn with_probabilities(mut self, prob: Vec<f64>) -> Result<Self> {
        self.prob = prob;
        self.validate()?;
        Ok(self)
    }

    pub fn with_start(mut self, start: usize) -> Result<Self> {
        self.start = start;
        self.validate()?;
        Ok(self)
    }

    /// Sub-instance induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]` of `self`, and the start is `vertices[0]`.
    pub fn induced(&self, vertices: &[usize], prob: Vec<f64>) -> Result<Self> {
        let m = vertices.len();
        let mut cost = Vec::with_capacity(m * m);
        for &a in vertices {
            for &b in vertices {
                cost.push(self.cost(a, b));
            }
        }
        let mut sub = Self::from_flat(self.name.clone(), m, cost, prob, 0)?;
        if let Some(coords) = &self.coords {
            sub.coords = Some(vertices.iter().map(|&v| coords[v]).collect());
            sub.euclidean = self.euclidean;
        }
        Ok(sub)
    }

    /// Returns the first violated triple, scanning `i, j, k` in index order.
    pub fn check_metric(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                let cij = self.cost(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let direct = self.cost(i, k);
                    let detour = cij + self.cost(j, k);
                    if direct > detour + METRIC_TOLERANCE * detour.max(1.0) {
                        return Err(Error::NotMetric {
                            i,
                            j,
                            k,
                            direct,
                            detour,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_metric(&self) -> bool {
        self.check_metric().is_ok()
    }

    /// Replaces every cost by the all-pairs shortest-path distance (Floyd–Warshall).
    ///
    /// Metric inputs come back unchanged, and the operation is idempotent.
    pub fn metric_closure(&self) -> Instance {
        let n = self.n;
        let mut d = self.cost.clone();
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                        changed = true;
                    }
                }
            }
        }
        let mut out = self.clone();
        if changed {
            out.cost = d;
            out.euclidean = false;
        }
        out
    }
}

pub(crate) fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
