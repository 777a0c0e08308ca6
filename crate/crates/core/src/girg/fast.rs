//! Cell-partitioned edge sampling in expected near-linear time.
//!
//! Vertices are bucketed into weight layers `[w_min 2^a, w_min 2^(a+1))`.
//! For a layer pair `(a, b)` the kernel clips to probability 1 within
//! distance `q_ab = (kappa W_ab / n)^(1/d)`, where `W_ab` bounds the weight
//! product of the pair and `kappa = c^(1/alpha)` (threshold model:
//! `kappa = C^d`). The torus is cut into `2^(ld)` cells per level `l`:
//!
//! * at the pair's base level (largest `l` with cell side `>= q_ab`), all
//!   vertex pairs in same-or-neighbouring cells are enumerated directly and
//!   decided by their pair-keyed uniform, exactly like the naive sampler;
//! * every remaining pair belongs to the unique coarsest level at which its
//!   cells stop being neighbours (separation is monotone in the level).
//!   Within such a separated cell pair every distance is at least one cell
//!   side, so the kernel is bounded by a constant `p_bar < 1`; the pair
//!   sequence is scanned with geometric jumps of rate `p_bar` and each
//!   candidate is accepted with the exact correction `p_uv / p_bar`.
//!
//! Both mechanisms give every unordered pair its exact marginal, decisions
//! are independent across pairs, and each pair is covered by exactly one
//! mechanism. All randomness is keyed by `(seed, cell pair)` or
//! `(seed, id pair)`, so the output is deterministic in the seed for any
//! worker count.

use std::ops::Range;

use rayon::prelude::*;

use super::{edge_prob_raw, Alpha, GirgParams, VertexSet};
use crate::geometry::torus_distance_unchecked;
use crate::rng::{tag, PairUnit, Stream};

const MAX_D: usize = 8;

/// Per-layer vertex data in morton order, so every grid cell at every level
/// is a contiguous slice.
struct Layer {
    morton: Vec<u64>,
    ids: Vec<u32>,
    weights: Vec<f64>,
    coords: Vec<f64>,
}

impl Layer {
    fn len(&self) -> usize {
        self.ids.len()
    }
}

#[inline]
fn interleave(idx: &[u64; MAX_D], depth: u32, d: usize) -> u64 {
    let mut m = 0u64;
    for bit in (0..depth).rev() {
        for ax in 0..d {
            m = (m << 1) | ((idx[ax] >> bit) & 1);
        }
    }
    m
}

#[inline]
fn deinterleave(cell: u64, level: u32, d: usize) -> [u64; MAX_D] {
    let mut idx = [0u64; MAX_D];
    for bit in (0..level).rev() {
        for ax in 0..d {
            let pos = bit * d as u32 + (d - 1 - ax) as u32;
            idx[ax] = (idx[ax] << 1) | ((cell >> pos) & 1);
        }
    }
    idx
}

/// Wrapped per-axis index distance on a ring of `side` cells.
#[inline]
fn ring_distance(a: u64, b: u64, side: u64) -> u64 {
    let diff = a.abs_diff(b);
    diff.min(side - diff)
}

/// Sorted, deduplicated morton indices of the 3^d wrapped neighbour cells
/// (including the cell itself).
fn neighbor_cells(idx: &[u64; MAX_D], level: u32, d: usize) -> Vec<u64> {
    let side = 1u64 << level;
    let mut out = Vec::with_capacity(3usize.pow(d as u32));
    let mut deltas = [-1i64; MAX_D];
    'outer: loop {
        let mut nb = [0u64; MAX_D];
        for ax in 0..d {
            nb[ax] = (idx[ax] as i64 + deltas[ax]).rem_euclid(side as i64) as u64;
        }
        out.push(interleave(&nb, level, d));
        // next delta vector in {-1,0,1}^d
        let mut ax = 0;
        loop {
            if ax == d {
                break 'outer;
            }
            if deltas[ax] < 1 {
                deltas[ax] += 1;
                break;
            }
            deltas[ax] = -1;
            ax += 1;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Contiguous runs of one layer's entries grouped by cell at a level.
fn runs_at_level(morton: &[u64], shift: u32) -> Vec<(u64, Range<usize>)> {
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < morton.len() {
        let cell = morton[i] >> shift;
        let hi = (cell + 1) << shift;
        let end = i + morton[i..].partition_point(|&m| m < hi);
        out.push((cell, i..end));
        i = end;
    }
    out
}

#[inline]
fn cell_range(morton: &[u64], cell: u64, shift: u32) -> Range<usize> {
    let lo = cell << shift;
    let hi = (cell + 1) << shift;
    let a = morton.partition_point(|&m| m < lo);
    let b = a + morton[a..].partition_point(|&m| m < hi);
    a..b
}

pub(super) fn sample_edges(vertices: &VertexSet, params: &GirgParams, seed: u64) -> Vec<(u32, u32)> {
    let m = vertices.len();
    if m < 2 {
        return Vec::new();
    }
    let d = params.d;
    let n = params.n;
    let kappa = match params.alpha {
        Alpha::Finite(a) => params.kernel_c.powf(1.0 / a),
        Alpha::Infinity => params.threshold_c.powi(d as i32),
    };

    // Weight layers: powers of two above w_min.
    let layer_of = |w: f64| -> usize {
        let l = (w / params.w_min).log2().floor();
        if l < 0.0 {
            0
        } else {
            l as usize
        }
    };
    let num_layers = (0..m).map(|i| layer_of(vertices.weight(i))).max().unwrap() + 1;

    // Upper bound on the weight product of a layer pair.
    let wprod_cap =
        |a: usize, b: usize| -> f64 { params.w_min * params.w_min * ((a + b + 2) as f64).exp2() };
    // dist^d below which the kernel clips to 1 for this layer pair.
    let clip_dist_pow_d = |a: usize, b: usize| -> f64 { kappa * wprod_cap(a, b) / n };

    // Deepest grid level any pair needs; cell side at the base level stays
    // at or above the pair's clip distance.
    let ideal_level = |a: usize, b: usize| -> u32 {
        let q_d = clip_dist_pow_d(a, b);
        if q_d >= 1.0 {
            0
        } else {
            ((-q_d.log2()) / d as f64).floor() as u32
        }
    };
    let max_depth = ideal_level(0, 0).min((63 / d) as u32).min(32);

    // Bucket vertices into layers in morton order.
    let mut entries: Vec<Vec<(u64, u32)>> = vec![Vec::new(); num_layers];
    let mut axes = [0u64; MAX_D];
    for i in 0..m {
        let pos = vertices.position(i);
        for ax in 0..d {
            let cell = (pos[ax] * (1u64 << max_depth) as f64) as u64;
            axes[ax] = cell.min((1u64 << max_depth) - 1);
        }
        entries[layer_of(vertices.weight(i))].push((interleave(&axes, max_depth, d), i as u32));
    }
    let layers: Vec<Layer> = entries
        .into_iter()
        .map(|mut es| {
            es.sort_unstable();
            let mut layer = Layer {
                morton: Vec::with_capacity(es.len()),
                ids: Vec::with_capacity(es.len()),
                weights: Vec::with_capacity(es.len()),
                coords: Vec::with_capacity(es.len() * d),
            };
            for (code, id) in es {
                layer.morton.push(code);
                layer.ids.push(id);
                layer.weights.push(vertices.weight(id as usize));
                layer.coords.extend_from_slice(vertices.position(id as usize));
            }
            layer
        })
        .collect();

    let pair_rand = PairUnit::new(seed, tag::EDGE);
    let mut edges: Vec<(u32, u32)> = Vec::new();

    for a in 0..num_layers {
        if layers[a].len() == 0 {
            continue;
        }
        for b in a..num_layers {
            if layers[b].len() == 0 {
                continue;
            }
            // Iterate cells of the smaller layer, look up the other.
            let (pl, sl) = if layers[a].len() <= layers[b].len() {
                (a, b)
            } else {
                (b, a)
            };
            let prim = &layers[pl];
            let sec = &layers[sl];
            let same_layer = a == b;
            let level = ideal_level(a, b).min(max_depth);
            let shift = (max_depth - level) * d as u32;
            let cap = wprod_cap(a, b);

            // Direct enumeration of same-or-neighbouring cell pairs.
            let runs = runs_at_level(&prim.morton, shift);
            let type1 = |(cell, range): &(u64, Range<usize>)| -> Vec<(u32, u32)> {
                let mut local = Vec::new();
                let idx = deinterleave(*cell, level, d);
                for &nb in &neighbor_cells(&idx, level, d) {
                    if same_layer && nb < *cell {
                        continue;
                    }
                    let srange = cell_range(&sec.morton, nb, shift);
                    if srange.is_empty() {
                        continue;
                    }
                    let diag = same_layer && nb == *cell;
                    for i in range.clone() {
                        let pu = &prim.coords[i * d..i * d + d];
                        let wu = prim.weights[i];
                        let u = prim.ids[i];
                        for j in srange.clone() {
                            let v = sec.ids[j];
                            if diag && v <= u {
                                continue;
                            }
                            let dist =
                                torus_distance_unchecked(pu, &sec.coords[j * d..j * d + d]);
                            let p = edge_prob_raw(dist.powi(d as i32), wu * sec.weights[j], params);
                            if pair_rand.unit(u, v) < p {
                                local.push((u.min(v), u.max(v)));
                            }
                        }
                    }
                }
                local
            };
            if prim.len() >= 4096 {
                edges.par_extend(runs.par_iter().flat_map_iter(type1));
            } else {
                edges.extend(runs.iter().flat_map(type1));
            }

            // Separated cell pairs, coarsest separation level first. The
            // threshold kernel is zero beyond the clip distance, so it has
            // no separated contribution at all.
            if params.alpha.is_infinite() || level < 2 {
                continue;
            }
            for lvl in 2..=level {
                let shift = (max_depth - lvl) * d as u32;
                let side = 1u64 << lvl;
                // Distance within a separated pair is at least one cell side.
                let p_bar = edge_prob_raw((-((lvl * d as u32) as f64)).exp2(), cap, params);
                let ln_q = (-p_bar).ln_1p();
                let pack = ((a as u64) << 48) | ((b as u64) << 32) | lvl as u64;
                let runs = runs_at_level(&prim.morton, shift);
                let type2 = |(cell, range): &(u64, Range<usize>)| -> Vec<(u32, u32)> {
                    let mut local = Vec::new();
                    let idx = deinterleave(*cell, lvl, d);
                    let mut parent = [0u64; MAX_D];
                    for ax in 0..d {
                        parent[ax] = idx[ax] >> 1;
                    }
                    let ca = range.len() as u64;
                    for &pcell in &neighbor_cells(&parent, lvl - 1, d) {
                        let pidx = deinterleave(pcell, lvl - 1, d);
                        for child_bits in 0..(1u32 << d) {
                            let mut cidx = [0u64; MAX_D];
                            for ax in 0..d {
                                cidx[ax] = (pidx[ax] << 1) | ((child_bits >> ax) & 1) as u64;
                            }
                            // keep only cells first separated at this level
                            if (0..d).all(|ax| ring_distance(idx[ax], cidx[ax], side) <= 1) {
                                continue;
                            }
                            let other = interleave(&cidx, lvl, d);
                            if same_layer && other < *cell {
                                continue;
                            }
                            let srange = cell_range(&sec.morton, other, shift);
                            let cb = srange.len() as u64;
                            if cb == 0 {
                                continue;
                            }
                            let total = ca * cb;
                            let mut jump =
                                Stream::new(seed, tag::CELL_JUMP, &[pack, *cell, other]);
                            let mut cursor = 0u64;
                            loop {
                                let skip = if p_bar >= 1.0 {
                                    0
                                } else {
                                    let draw = jump.next_unit_open().ln() / ln_q;
                                    if draw >= total as f64 {
                                        break;
                                    }
                                    draw as u64
                                };
                                cursor = cursor.saturating_add(skip);
                                if cursor >= total {
                                    break;
                                }
                                let i = range.start + (cursor / cb) as usize;
                                let j = srange.start + (cursor % cb) as usize;
                                let u = prim.ids[i];
                                let v = sec.ids[j];
                                let dist = torus_distance_unchecked(
                                    &prim.coords[i * d..i * d + d],
                                    &sec.coords[j * d..j * d + d],
                                );
                                let p = edge_prob_raw(
                                    dist.powi(d as i32),
                                    prim.weights[i] * sec.weights[j],
                                    params,
                                );
                                if pair_rand.unit(u, v) < p / p_bar {
                                    local.push((u.min(v), u.max(v)));
                                }
                                cursor += 1;
                            }
                        }
                    }
                    local
                };
                if prim.len() >= 4096 {
                    edges.par_extend(runs.par_iter().flat_map_iter(type2));
                } else {
                    edges.extend(runs.iter().flat_map(type2));
                }
            }
        }
    }

    edges.par_sort_unstable();
    debug_assert!(edges.windows(2).all(|w| w[0] != w[1]), "pair covered twice");
    edges
}
