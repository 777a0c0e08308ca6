//! Geometric inhomogeneous random graphs.
//!
//! Vertices come from a homogeneous Poisson point process of intensity `n`
//! on the torus, each carrying an independent power-law weight. Two
//! vertices `u, v` at ∞-norm distance `r` connect independently with
//! probability
//!
//! * finite `alpha`:  `min(c * (w_u w_v / (r^d n))^alpha, 1)`,
//! * `alpha = inf`:   `1` iff `r <= C (w_u w_v / n)^(1/d)`.
//!
//! Two edge samplers are provided: a quadratic reference sampler that draws
//! one pair-keyed Bernoulli per vertex pair, and a cell-partitioned sampler
//! with the same per-pair marginals and pair independence that runs in
//! expected near-linear time (see [`sample_edges_fast`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{torus_distance_unchecked, Point};
use crate::rng::{tag, PairUnit, Stream};
use crate::weights::WeightDist;

mod fast;

/// Long-range parameter of the edge kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinity,
}

impl Alpha {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Alpha::Infinity)
    }
}

// Serialized as a plain number or the string "inf".
impl Serialize for Alpha {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => s.serialize_f64(*a),
            Alpha::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(a) => Ok(Alpha::Finite(a)),
            Repr::Text(t) if t == "inf" => Ok(Alpha::Infinity),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "alpha must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// All model constants governing sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct GirgParams {
    /// Poisson intensity; the expected vertex count.
    pub n: f64,
    pub d: usize,
    pub alpha: Alpha,
    pub beta: f64,
    pub w_min: f64,
    /// Multiplicative kernel constant applied before clipping at 1
    /// (finite alpha).
    pub kernel_c: f64,
    /// Threshold-radius constant (alpha = inf).
    pub threshold_c: f64,
}

impl GirgParams {
    pub fn new(
        n: f64,
        d: usize,
        alpha: Alpha,
        beta: f64,
        w_min: f64,
        kernel_c: f64,
        threshold_c: f64,
    ) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid(format!("intensity n must be positive, got {n}")));
        }
        if d == 0 || d > 8 {
            return Err(Error::invalid(format!("dimension must lie in 1..=8, got {d}")));
        }
        if let Alpha::Finite(a) = alpha {
            if !(a > 1.0) || !a.is_finite() {
                return Err(Error::invalid(format!(
                    "alpha must exceed 1 or be infinite, got {a}"
                )));
            }
        }
        WeightDist::new(beta, w_min)?;
        if !(kernel_c > 0.0) || !kernel_c.is_finite() {
            return Err(Error::invalid("kernel constant must be positive"));
        }
        if !(threshold_c > 0.0) || !threshold_c.is_finite() {
            return Err(Error::invalid("threshold constant must be positive"));
        }
        Ok(GirgParams {
            n,
            d,
            alpha,
            beta,
            w_min,
            kernel_c,
            threshold_c,
        })
    }

    pub fn weight_dist(&self) -> WeightDist {
        WeightDist::new(self.beta, self.w_min).expect("validated on construction")
    }
}

/// A sampled vertex: position on the torus plus power-law weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub position: Point,
    pub weight: f64,
}

/// Flat storage for a vertex cloud: positions are `dim`-strided.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    dim: usize,
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl VertexSet {
    pub fn from_parts(dim: usize, positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if positions.len() != weights.len() * dim {
            return Err(Error::invalid(format!(
                "positions/weights mismatch: {} coordinates for {} weights in dimension {dim}",
                positions.len(),
                weights.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("positions must be finite"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be positive and finite"));
        }
        let positions = positions.into_iter().map(crate::geometry::wrap01).collect();
        Ok(VertexSet {
            dim,
            positions,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> Point {
        Point::new(self.position(i).to_vec()).expect("stored coordinates are valid")
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        Vertex {
            id: i,
            position: self.point(i),
            weight: self.weight(i),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).map(|i| self.vertex(i))
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Raw kernel evaluation on `dist^d` and the weight product.
///
/// Zero distance connects with probability 1 under either kernel (the limit
/// of the finite-alpha expression).
#[inline]
pub(crate) fn edge_prob_raw(dist_pow_d: f64, weight_product: f64, p: &GirgParams) -> f64 {
    match p.alpha {
        Alpha::Finite(a) => {
            if dist_pow_d <= 0.0 {
                return 1.0;
            }
            let x = weight_product / (dist_pow_d * p.n);
            let pow = if a == 2.0 {
                x * x
            } else {
                x.powf(a)
            };
            (p.kernel_c * pow).min(1.0)
        }
        Alpha::Infinity => {
            let cutoff = p.threshold_c.powi(p.d as i32) * weight_product / p.n;
            if dist_pow_d <= cutoff {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Connection probability of two distinct vertices.
pub fn edge_probability(u: &Vertex, v: &Vertex, params: &GirgParams) -> Result<f64> {
    if u.id == v.id {
        return Err(Error::invalid("edge probability of a vertex with itself"));
    }
    if u.position.dim() != params.d || v.position.dim() != params.d {
        return Err(Error::DimensionMismatch(u.position.dim(), params.d));
    }
    let dist = torus_distance_unchecked(u.position.coords(), v.position.coords());
    Ok(edge_prob_raw(
        dist.powi(params.d as i32),
        u.weight * v.weight,
        params,
    ))
}

/// Sample the Poisson vertex cloud. The count is Poisson(`n`) (drawn by
/// counting unit-exponential arrivals), positions are i.i.d. uniform and
/// weights i.i.d. Pareto, all fully determined by `seed`.
pub fn sample_vertices(params: &GirgParams, seed: u64) -> VertexSet {
    let mut count_stream = Stream::new(seed, tag::VERTEX_COUNT, &[]);
    let mut acc = 0.0f64;
    let mut count: usize = 0;
    loop {
        acc += count_stream.next_exp();
        if acc > params.n {
            break;
        }
        count += 1;
    }

    let mut pos_stream = Stream::new(seed, tag::POSITION, &[]);
    let mut positions = Vec::with_capacity(count * params.d);
    for _ in 0..count * params.d {
        positions.push(pos_stream.next_unit());
    }

    let dist = params.weight_dist();
    let mut w_stream = Stream::new(seed, tag::WEIGHT, &[]);
    let weights: Vec<f64> = (0..count)
        .map(|_| dist.sample_unchecked(w_stream.next_unit_open_closed()))
        .collect();

    VertexSet {
        dim: params.d,
        positions,
        weights,
    }
}

/// Reference sampler: one Bernoulli per unordered pair, keyed by
/// `(seed, min(id), max(id))`. Bitwise reproducible; O(|V|^2) time.
pub fn sample_edges_naive(vertices: &VertexSet, params: &GirgParams, seed: u64) -> Vec<(u32, u32)> {
    let pair = PairUnit::new(seed, tag::EDGE);
    let m = vertices.len();
    let mut edges = Vec::new();
    for i in 0..m {
        let pi = vertices.position(i);
        let wi = vertices.weight(i);
        for j in (i + 1)..m {
            let dist = torus_distance_unchecked(pi, vertices.position(j));
            let p = edge_prob_raw(
                dist.powi(params.d as i32),
                wi * vertices.weight(j),
                params,
            );
            if pair.unit(i as u32, j as u32) < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

/// Cell-partitioned sampler with the same per-pair marginals and pair
/// independence as [`sample_edges_naive`] (distributional, not bitwise,
/// equivalence) in expected `O((|V| + |E|) polylog |V|)` time.
pub fn sample_edges_fast(vertices: &VertexSet, params: &GirgParams, seed: u64) -> Vec<(u32, u32)> {
    fast::sample_edges(vertices, params, seed)
}

/// Immutable sampled graph: vertex cloud plus symmetric adjacency in CSR
/// form, neighbour lists sorted.
#[derive(Clone, Debug)]
pub struct Graph {
    params: GirgParams,
    vertices: VertexSet,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    num_edges: usize,
}

impl Graph {
    /// Build a graph from an explicit edge list. Edges are validated:
    /// ids in range, no self-loops, no duplicates.
    pub fn from_parts(
        params: GirgParams,
        vertices: VertexSet,
        edges: &[(u32, u32)],
    ) -> Result<Self> {
        if vertices.dim() != params.d {
            return Err(Error::DimensionMismatch(vertices.dim(), params.d));
        }
        let m = vertices.len();
        let mut degree = vec![0usize; m];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            let (u, v) = (u as usize, v as usize);
            if u >= m || v >= m {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{m}"
                )));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(m + 1);
        offsets.push(0usize);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; 2 * edges.len()];
        for &(u, v) in edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for i in 0..m {
            let row = &mut targets[offsets[i]..offsets[i + 1]];
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("duplicate edge at vertex {i}")));
            }
        }
        Ok(Graph {
            params,
            vertices,
            offsets,
            targets,
            num_edges: edges.len(),
        })
    }

    pub fn params(&self) -> &GirgParams {
        &self.params
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Iterate the unordered edge list as `(u, v)` with `u < v`, sorted
    /// lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| (u as u32) < v)
                .map(move |v| (u as u32, v))
        })
    }
}

/// Sample a complete GIRG: vertex cloud plus fast edge sampling.
/// Deterministic in `seed` for any worker count.
pub fn sample_girg(params: &GirgParams, seed: u64) -> Graph {
    let vertices = sample_vertices(params, seed);
    let edges = sample_edges_fast(&vertices, params, seed);
    Graph::from_parts(params.clone(), vertices, &edges).expect("sampled edges are valid")
}
