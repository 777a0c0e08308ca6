//! Quarantine by boundary cut: after a chosen round, remove every edge
//! crossing the boundary of the round's upper envelope ball and let the
//! process continue. If no active vertex had escaped the ball by the cut
//! round, the infection can never leave it afterwards.

use crate::bootstrap::{run_with_cut, BootstrapParams, EdgeCutSet};
use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::girg::Graph;
use crate::predictions::{envelope_ball_upper, ModelConstants};

/// Outcome of one quarantine experiment.
#[derive(Clone, Debug)]
pub struct QuarantineReport {
    pub round_i: u32,
    pub ball: Ball,
    /// Edges crossing the ball boundary (removed after round `round_i`).
    pub cut_size: usize,
    /// Edges with both endpoints inside the ball.
    pub interior_edge_count: usize,
    /// No vertex outside the ball was activated after the cut.
    pub contained: bool,
    /// Some vertex outside the ball was already active by the cut round
    /// (the envelope event failed).
    pub escaped_before_cut: bool,
}

fn inside_flags(graph: &Graph, ball: &Ball) -> Result<Vec<bool>> {
    if ball.dim() != graph.params().d {
        return Err(Error::DimensionMismatch(ball.dim(), graph.params().d));
    }
    let vs = graph.vertices();
    Ok((0..vs.len())
        .map(|i| ball.contains_coords(vs.position(i)))
        .collect())
}

/// Exactly the edges with one endpoint inside the ball and one outside.
pub fn boundary_cut(graph: &Graph, ball: &Ball) -> Result<Vec<(u32, u32)>> {
    let inside = inside_flags(graph, ball)?;
    Ok(graph
        .edges()
        .filter(|&(u, v)| inside[u as usize] != inside[v as usize])
        .collect())
}

/// Number of edges with both endpoints inside the ball.
pub fn interior_edge_count(graph: &Graph, ball: &Ball) -> Result<usize> {
    let inside = inside_flags(graph, ball)?;
    Ok(graph
        .edges()
        .filter(|&(u, v)| inside[u as usize] && inside[v as usize])
        .count())
}

/// Quarantine with the upper envelope ball of round `i`, centred at the
/// starting ball's center.
pub fn quarantine(
    graph: &Graph,
    bootstrap: &BootstrapParams,
    i: u32,
    c: &ModelConstants,
    seed: u64,
) -> Result<QuarantineReport> {
    let origin_ball = envelope_ball_upper(i, c, graph.params().d)?;
    let ball = Ball::new(bootstrap.start_ball.center().clone(), origin_ball.radius())?;
    quarantine_with_ball(graph, bootstrap, i, &ball, seed)
}

/// Quarantine with an explicit ball: replay the run deterministically
/// through round `i` (same seed, same coins), remove the boundary cut, and
/// continue to fixpoint.
pub fn quarantine_with_ball(
    graph: &Graph,
    bootstrap: &BootstrapParams,
    i: u32,
    ball: &Ball,
    seed: u64,
) -> Result<QuarantineReport> {
    let cut = boundary_cut(graph, ball)?;
    let inside = inside_flags(graph, ball)?;
    let cut_set = EdgeCutSet::from_edges(&cut);
    let run = run_with_cut(graph, bootstrap, seed, Some((i, &cut_set)))?;

    let mut escaped_before_cut = false;
    let mut contained = true;
    for (v, round) in run.infection_round.iter().enumerate() {
        if let Some(r) = round {
            if !inside[v] {
                if *r <= i {
                    escaped_before_cut = true;
                } else {
                    contained = false;
                }
            }
        }
    }

    Ok(QuarantineReport {
        round_i: i,
        ball: ball.clone(),
        cut_size: cut.len(),
        interior_edge_count: interior_edge_count(graph, ball)?,
        contained,
        escaped_before_cut,
    })
}

/// Fitted scaling of mean cut size against the envelope mass.
#[derive(Clone, Debug)]
pub struct CutScalingReport {
    /// Log-log regression slope of mean cut size vs. mass.
    pub slope: f64,
    /// Predicted exponent `max(3 - beta, 1 - 1/d)`.
    pub predicted_exponent: f64,
    pub points_used: usize,
}

/// Exponent predicted for the boundary-cut size of a ball holding an
/// expected mass `mu`: the cut grows like `mu^(max(3-beta, 1-1/d))`.
pub fn predicted_cut_exponent(beta: f64, d: usize) -> f64 {
    (3.0 - beta).max(1.0 - 1.0 / d as f64)
}

/// Log-log regression of mean cut size against envelope mass. Needs at
/// least 4 masses spanning two decades.
pub fn cut_scaling_estimate(
    points: &[(f64, f64)],
    beta: f64,
    d: usize,
) -> Result<CutScalingReport> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(mass, cut)| mass > 0.0 && cut > 0.0)
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "cut scaling needs at least 4 positive points, got {}",
            usable.len()
        )));
    }
    let lo = usable.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = usable.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::InsufficientData(format!(
            "cut scaling needs masses spanning two decades, got {lo}..{hi}"
        )));
    }
    let slope = crate::stats::loglog_slope(&usable)
        .ok_or_else(|| Error::InsufficientData("cut sizes have no spread".into()))?;
    Ok(CutScalingReport {
        slope,
        predicted_exponent: predicted_cut_exponent(beta, d),
        points_used: usable.len(),
    })
}
