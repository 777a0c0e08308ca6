//! Experiment drivers behind the CLI, plus the statistical validation
//! suite. Drivers are deterministic given the configuration: seeds are
//! processed in configuration order and CSV rows are emitted in that order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::bootstrap::{self, PercolationRun};
use crate::config::ExperimentConfig;
use crate::containment::{self};
use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::girg::{self, GirgParams, Graph, VertexSet};
use crate::io::{self, fmt_float};
use crate::predictions::{self, CapSign, Ell, ModelConstants};
use crate::rng::{tag, Stream};
use crate::stats;
use crate::weights::{validate_tail, WeightDist};

#[derive(Clone, Debug)]
pub struct GenerateSummary {
    pub vertices: usize,
    pub edges: usize,
    pub max_weight: f64,
}

pub fn cmd_generate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<GenerateSummary> {
    cfg.validate()?;
    let params = cfg.girg_params()?;
    let graph = girg::sample_girg(&params, cfg.seeds[0]);
    io::write_graph(out_dir, &graph)?;
    Ok(GenerateSummary {
        vertices: graph.num_vertices(),
        edges: graph.num_edges(),
        max_weight: graph.vertices().max_weight(),
    })
}

/// Use an existing graph directory when given, otherwise sample from the
/// configuration with the given seed.
pub fn load_or_generate(
    cfg: &ExperimentConfig,
    graph_dir: Option<&Path>,
    seed: u64,
) -> Result<Graph> {
    let params = cfg.girg_params()?;
    match graph_dir {
        Some(dir) => {
            if !dir.join("vertices.csv").is_file() {
                return Err(Error::Config(format!(
                    "no graph found at {}",
                    dir.display()
                )));
            }
            io::read_graph(dir, &params)
        }
        None => Ok(girg::sample_girg(&params, seed)),
    }
}

#[derive(Clone, Debug)]
pub struct PercolateSummary {
    pub vertices: usize,
    pub final_fraction: f64,
    pub rounds_executed: u32,
    pub hit_max_rounds: bool,
}

pub fn cmd_percolate(
    cfg: &ExperimentConfig,
    graph_dir: Option<&Path>,
    out_dir: &Path,
) -> Result<PercolateSummary> {
    cfg.validate()?;
    let seed = cfg.seeds[0];
    let graph = load_or_generate(cfg, graph_dir, seed)?;
    let bp = cfg.bootstrap_params()?;
    let run = bootstrap::run(&graph, &bp, seed)?;
    std::fs::create_dir_all(out_dir)?;
    io::write_infection_csv(&out_dir.join("infection.csv"), &run)?;
    io::write_trace_csv(&out_dir.join("trace.csv"), &run)?;
    Ok(PercolateSummary {
        vertices: graph.num_vertices(),
        final_fraction: bootstrap::infection_fraction(&run, &graph),
        rounds_executed: run.rounds_executed,
        hit_max_rounds: run.hit_max_rounds,
    })
}

#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub rho_multiplier: f64,
    pub seed: u64,
    pub fraction: f64,
    pub stalled: bool,
    pub rounds_to_10pct: Option<u32>,
}

/// Run the process at `rho = m * rho_c` for every sweep multiplier and
/// seed. One graph is sampled per seed and reused across multipliers.
pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let multipliers = cfg
        .sweep_multipliers
        .clone()
        .filter(|m| !m.is_empty())
        .ok_or_else(|| Error::Config("sweep needs a non-empty sweep_multipliers list".into()))?;
    let params = cfg.girg_params()?;
    let rho_c = cfg.rho_c()?;

    let per_seed: Vec<Vec<SweepRecord>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<SweepRecord>> {
            let graph = girg::sample_girg(&params, seed);
            let mut out = Vec::with_capacity(multipliers.len());
            for &m in &multipliers {
                let bp = cfg.bootstrap_params_with_rho((m * rho_c).min(1.0))?;
                let run = bootstrap::run(&graph, &bp, seed)?;
                out.push(SweepRecord {
                    rho_multiplier: m,
                    seed,
                    fraction: bootstrap::infection_fraction(&run, &graph),
                    stalled: run.stalled(),
                    rounds_to_10pct: run.rounds_to_fraction(graph.num_vertices(), 0.1),
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    // emit grouped by multiplier, seeds in configuration order
    let mut records = Vec::with_capacity(cfg.seeds.len() * multipliers.len());
    for mi in 0..multipliers.len() {
        for row in &per_seed {
            records.push(row[mi].clone());
        }
    }

    std::fs::create_dir_all(out_dir)?;
    let mut out = BufWriter::new(File::create(out_dir.join("sweep.csv"))?);
    writeln!(out, "rho_multiplier,seed,fraction,stalled,rounds_to_10pct")?;
    for r in &records {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.rho_multiplier),
            r.seed,
            fmt_float(r.fraction),
            r.stalled,
            r.rounds_to_10pct.map_or(String::new(), |x| x.to_string())
        )?;
    }
    out.flush()?;
    Ok(records)
}

#[derive(Clone, Debug)]
pub struct EnvelopeTableRow {
    pub i: u32,
    pub nu_lower_raw: f64,
    pub nu_lower_clipped: f64,
    pub nu_upper_raw: f64,
    pub nu_upper_clipped: f64,
}

#[derive(Clone, Debug)]
pub struct PredictReport {
    pub rho_c: f64,
    pub i_infinity: Option<f64>,
    /// Scaled distance `|x|^d n` when a query point was given.
    pub scaled_distance: Option<f64>,
    pub ell: Option<Ell>,
    /// Whether the queried vertex satisfies the infection-time law's
    /// technical domain condition.
    pub domain_ok: Option<bool>,
    pub envelope: Vec<EnvelopeTableRow>,
}

/// Closed-form prediction table; `distance` is the torus distance from the
/// starting ball's center.
pub fn cmd_predict(
    cfg: &ExperimentConfig,
    distance: Option<f64>,
    weight: Option<f64>,
) -> Result<PredictReport> {
    cfg.validate()?;
    let c = cfg.model_constants()?;
    let rho_c = predictions::critical_density(&c);
    let i_inf = predictions::i_infinity(&c).ok();

    let (scaled, ell, domain_ok) = match (distance, weight) {
        (Some(x), Some(w)) => {
            if !(0.0..=0.5).contains(&x) {
                return Err(Error::invalid(format!(
                    "distance must lie in [0, 0.5] on the torus, got {x}"
                )));
            }
            let r = x.powi(cfg.d as i32) * cfg.n;
            let e = predictions::ell_from_scaled_distance(r, w, cfg.d, &c);
            let dom = e
                .value()
                .map(|v| predictions::within_prediction_domain(v, r, &c));
            (Some(r), Some(e), dom)
        }
        (None, None) => (None, None, None),
        _ => {
            return Err(Error::invalid(
                "distance and weight must be provided together",
            ))
        }
    };

    let mut envelope = Vec::new();
    for i in 0..=64u32 {
        let lo = predictions::nu_lower(i, &c);
        let hi = predictions::nu_upper(i, &c);
        envelope.push(EnvelopeTableRow {
            i,
            nu_lower_raw: lo.raw,
            nu_lower_clipped: lo.clipped,
            nu_upper_raw: hi.raw,
            nu_upper_clipped: hi.clipped,
        });
        if lo.raw >= cfg.n {
            break;
        }
    }

    Ok(PredictReport {
        rho_c,
        i_infinity: i_inf,
        scaled_distance: scaled,
        ell,
        domain_ok,
        envelope,
    })
}

#[derive(Clone, Debug)]
pub struct InfectionTimeRow {
    pub id: u32,
    pub distance: f64,
    pub weight: f64,
    pub ell: f64,
    pub empirical_round: u32,
}

/// In-domain comparison rows for one finished run: infected vertices
/// outside the starting ball, at or above the weight floor, with a defined
/// prediction satisfying the technical domain condition.
pub fn infection_time_rows(
    graph: &Graph,
    run: &PercolationRun,
    c: &ModelConstants,
    start_ball: &Ball,
    weight_floor: f64,
) -> Vec<InfectionTimeRow> {
    let vs = graph.vertices();
    let d = graph.params().d;
    let center = start_ball.center().coords();
    let mut rows = Vec::new();
    for (v, round) in run.infection_round.iter().enumerate() {
        let Some(round) = round else { continue };
        let w = vs.weight(v);
        if w < weight_floor {
            continue;
        }
        let pos = vs.position(v);
        if start_ball.contains_coords(pos) {
            continue;
        }
        let dist = crate::geometry::torus_distance_unchecked(center, pos);
        let r = dist.powi(d as i32) * c.n;
        if let Ell::Value(ell) = predictions::ell_from_scaled_distance(r, w, d, c) {
            if predictions::within_prediction_domain(ell, r, c) {
                rows.push(InfectionTimeRow {
                    id: v as u32,
                    distance: dist,
                    weight: w,
                    ell,
                    empirical_round: *round,
                });
            }
        }
    }
    rows
}

#[derive(Clone, Debug)]
pub struct InfectionTimesSummary {
    pub weight_floor: f64,
    /// Weight floor at or below 1 admits bounded-weight vertices, which the
    /// infection-time law excludes; flagged rather than rejected.
    pub bounded_weight_warning: bool,
    pub pooled_rows: usize,
    pub median_abs_error: f64,
    pub p90_abs_error: f64,
    pub spearman: Option<f64>,
}

/// Compare predicted against empirical infection rounds over all seeds.
/// The per-vertex CSV is written for the first seed; the summary statistics
/// pool every seed.
pub fn cmd_infection_times(
    cfg: &ExperimentConfig,
    weight_floor: Option<f64>,
    graph_dir: Option<&Path>,
    out_dir: &Path,
) -> Result<InfectionTimesSummary> {
    cfg.validate()?;
    let c = cfg.model_constants()?;
    let ball = cfg.start_ball()?;
    let bp = cfg.bootstrap_params()?;
    let floor = weight_floor.unwrap_or_else(|| cfg.n.ln().ln().max(0.0));
    let warn = floor <= 1.0;

    let loaded = match graph_dir {
        Some(dir) => Some(load_or_generate(cfg, Some(dir), cfg.seeds[0])?),
        None => None,
    };
    let params = cfg.girg_params()?;

    let mut pooled: Vec<InfectionTimeRow> = Vec::new();
    let mut first_rows: Option<Vec<InfectionTimeRow>> = None;
    for &seed in &cfg.seeds {
        let sampled;
        let graph = match &loaded {
            Some(g) => g,
            None => {
                sampled = girg::sample_girg(&params, seed);
                &sampled
            }
        };
        let run = bootstrap::run(graph, &bp, seed)?;
        let rows = infection_time_rows(graph, &run, &c, &ball, floor);
        if first_rows.is_none() {
            first_rows = Some(rows.clone());
        }
        pooled.extend(rows);
    }

    std::fs::create_dir_all(out_dir)?;
    let mut out = BufWriter::new(File::create(out_dir.join("infection_times.csv"))?);
    writeln!(out, "id,distance,weight,ell_prediction,empirical_round")?;
    for r in first_rows.unwrap_or_default() {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.id,
            fmt_float(r.distance),
            fmt_float(r.weight),
            fmt_float(r.ell),
            r.empirical_round
        )?;
    }
    out.flush()?;

    let errors: Vec<f64> = pooled
        .iter()
        .map(|r| (r.empirical_round as f64 - r.ell).abs())
        .collect();
    let ells: Vec<f64> = pooled.iter().map(|r| r.ell).collect();
    let rounds: Vec<f64> = pooled.iter().map(|r| r.empirical_round as f64).collect();
    Ok(InfectionTimesSummary {
        weight_floor: floor,
        bounded_weight_warning: warn,
        pooled_rows: pooled.len(),
        median_abs_error: stats::median(&errors),
        p90_abs_error: stats::percentile(&errors, 0.9),
        spearman: stats::spearman(&ells, &rounds),
    })
}

#[derive(Clone, Debug)]
pub struct EnvelopeRow {
    pub seed: u64,
    pub round: u32,
    pub max_active_distance: f64,
    pub radius_upper: f64,
    pub radius_lower: f64,
    /// Fraction of the lower envelope's heavy vertices active by round
    /// `i + 3`; vacuously 1 when the envelope holds no heavy vertex.
    pub heavy_fraction: f64,
}

/// Envelope rows for one finished run.
pub fn speed_trace_rows(
    graph: &Graph,
    run: &PercolationRun,
    c: &ModelConstants,
) -> Result<Vec<EnvelopeRow>> {
    let d = graph.params().d;
    let vs = graph.vertices();
    let mut rows = Vec::new();
    for rec in &run.per_round {
        let i = rec.round;
        let upper = predictions::envelope_ball_upper(i, c, d)?;
        let lower = predictions::envelope_ball_lower(i, c, d)?;
        let mass = predictions::nu_lower(i, c).clipped;
        let heavy_floor = predictions::weight_cap(mass, c.beta, c.eta, CapSign::Lower)?;
        let mut heavy = 0usize;
        let mut heavy_active = 0usize;
        for v in 0..vs.len() {
            if vs.weight(v) >= heavy_floor && lower.contains_coords(vs.position(v)) {
                heavy += 1;
                if run.infection_round[v].is_some_and(|r| r <= i + 3) {
                    heavy_active += 1;
                }
            }
        }
        rows.push(EnvelopeRow {
            seed: 0,
            round: i,
            max_active_distance: rec.max_active_distance,
            radius_upper: upper.radius(),
            radius_lower: lower.radius(),
            heavy_fraction: if heavy == 0 {
                1.0
            } else {
                heavy_active as f64 / heavy as f64
            },
        });
    }
    Ok(rows)
}

/// Per-round speed trace against the growth envelopes, one block of rows
/// per seed.
pub fn cmd_speed_trace(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<EnvelopeRow>> {
    cfg.validate()?;
    let c = cfg.model_constants()?;
    let params = cfg.girg_params()?;
    let bp = cfg.bootstrap_params()?;

    let per_seed: Vec<Vec<EnvelopeRow>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<EnvelopeRow>> {
            let graph = girg::sample_girg(&params, seed);
            let run = bootstrap::run(&graph, &bp, seed)?;
            let mut rows = speed_trace_rows(&graph, &run, &c)?;
            for row in &mut rows {
                row.seed = seed;
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<EnvelopeRow> = per_seed.into_iter().flatten().collect();

    std::fs::create_dir_all(out_dir)?;
    let mut out = BufWriter::new(File::create(out_dir.join("envelope.csv"))?);
    writeln!(
        out,
        "seed,round,max_active_distance,radius_upper,radius_lower,heavy_fraction"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.seed,
            r.round,
            fmt_float(r.max_active_distance),
            fmt_float(r.radius_upper),
            fmt_float(r.radius_lower),
            fmt_float(r.heavy_fraction)
        )?;
    }
    out.flush()?;
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct QuarantineRow {
    pub seed: u64,
    pub nu_upper_clipped: f64,
    pub report: containment::QuarantineReport,
}

/// Quarantine at round `i` for every seed.
pub fn cmd_contain(cfg: &ExperimentConfig, i: u32, out_dir: &Path) -> Result<Vec<QuarantineRow>> {
    cfg.validate()?;
    let c = cfg.model_constants()?;
    let params = cfg.girg_params()?;
    let bp = cfg.bootstrap_params()?;

    let rows: Vec<QuarantineRow> = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<QuarantineRow> {
            let graph = girg::sample_girg(&params, seed);
            let report = containment::quarantine(&graph, &bp, i, &c, seed)?;
            Ok(QuarantineRow {
                seed,
                nu_upper_clipped: predictions::nu_upper(i, &c).clipped,
                report,
            })
        })
        .collect::<Result<_>>()?;

    std::fs::create_dir_all(out_dir)?;
    let mut out = BufWriter::new(File::create(out_dir.join("quarantine.csv"))?);
    writeln!(
        out,
        "seed,round_i,nu_upper_i,cut_size,interior_edges,contained,escaped_before_cut"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.seed,
            r.report.round_i,
            fmt_float(r.nu_upper_clipped),
            r.report.cut_size,
            r.report.interior_edge_count,
            r.report.contained,
            r.report.escaped_before_cut
        )?;
    }
    out.flush()?;
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Validation suite
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Mean degree per power-of-two weight bucket: `(arithmetic bucket middle,
/// mean degree, bucket size)`, buckets covering `[w_min, w_hi)`.
pub fn degree_weight_buckets(graph: &Graph, w_hi: f64) -> Vec<(f64, f64, usize)> {
    let w_min = graph.params().w_min;
    let vs = graph.vertices();
    let nb = ((w_hi / w_min).log2().ceil() as usize).max(1);
    let mut sum = vec![0.0f64; nb];
    let mut cnt = vec![0usize; nb];
    for v in 0..vs.len() {
        let w = vs.weight(v);
        if w >= w_hi {
            continue;
        }
        let b = (w / w_min).log2().floor().max(0.0) as usize;
        if b < nb {
            sum[b] += graph.degree(v) as f64;
            cnt[b] += 1;
        }
    }
    (0..nb)
        .filter(|&b| cnt[b] > 0)
        .map(|b| {
            let lo = w_min * (b as f64).exp2();
            (1.5 * lo, sum[b] / cnt[b] as f64, cnt[b])
        })
        .collect()
}

/// Log-log slope of mean degree against weight over `[w_min, n^0.3)`,
/// using buckets holding at least 30 vertices.
pub fn degree_weight_slope(graph: &Graph) -> Option<f64> {
    let w_hi = graph.params().n.powf(0.3);
    let pts: Vec<(f64, f64)> = degree_weight_buckets(graph, w_hi)
        .into_iter()
        .filter(|&(_, mean_deg, count)| count >= 30 && mean_deg > 0.0)
        .map(|(mid, mean_deg, _)| (mid, mean_deg))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    stats::loglog_slope(&pts)
}

/// Mean-degree-to-bucket-middle ratios for buckets of at least 100
/// vertices.
pub fn degree_weight_factors(graph: &Graph) -> Vec<(f64, f64, usize)> {
    let w_hi = graph.params().n.powf(0.3);
    degree_weight_buckets(graph, w_hi)
        .into_iter()
        .filter(|&(_, _, count)| count >= 100)
        .map(|(mid, mean_deg, count)| (mid, mean_deg / mid, count))
        .collect()
}

/// Log-log slope of the edge-endpoint weight tail over mid-range weights.
pub fn neighbor_weight_tail_slope(graph: &Graph) -> Option<f64> {
    let vs = graph.vertices();
    let mut endpoint_weights: Vec<f64> = Vec::with_capacity(2 * graph.num_edges());
    for (u, v) in graph.edges() {
        endpoint_weights.push(vs.weight(u as usize));
        endpoint_weights.push(vs.weight(v as usize));
    }
    if endpoint_weights.len() < 1000 {
        return None;
    }
    endpoint_weights.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let total = endpoint_weights.len() as f64;
    let w_min = graph.params().w_min;
    let w_hi = graph.params().n.powf(0.2).max(8.0 * w_min);
    let mut pts = Vec::new();
    let mut w = 2.0 * w_min;
    while w <= w_hi {
        let below = endpoint_weights.partition_point(|&x| x < w);
        let surv = (endpoint_weights.len() - below) as f64 / total;
        if surv * total >= 50.0 {
            pts.push((w, surv));
        }
        w *= 2f64.sqrt();
    }
    if pts.len() < 4 {
        return None;
    }
    stats::loglog_slope(&pts)
}

/// Count vertices outside the starting ball whose weight exceeds the cap
/// `(|x|^d n)^(1/(beta-1-eta))`. Vertex cloud only; no edges needed.
pub fn oversized_weight_count(
    params: &GirgParams,
    start_ball: &Ball,
    eta: f64,
    seed: u64,
) -> usize {
    let vs = girg::sample_vertices(params, seed);
    let center = start_ball.center().coords();
    let expo = 1.0 / (params.beta - 1.0 - eta);
    let mut count = 0usize;
    for v in 0..vs.len() {
        let pos = vs.position(v);
        if start_ball.contains_coords(pos) {
            continue;
        }
        let dist = crate::geometry::torus_distance_unchecked(center, pos);
        let r = dist.powi(params.d as i32) * params.n;
        if r > 1.0 && vs.weight(v) >= r.powf(expo) {
            count += 1;
        }
    }
    count
}

#[derive(Clone, Debug)]
pub struct SamplerComparison {
    pub seeds: usize,
    pub mean_edges_naive: f64,
    pub mean_edges_fast: f64,
    pub t_statistic: f64,
    pub count_pass: bool,
    pub worst_bucket_z: f64,
    pub buckets_compared: usize,
    pub bucket_pass: bool,
}

/// Distributional comparison of the two edge samplers on small instances:
/// a two-sample mean test on total edge counts (significance 0.01) and
/// per-weight-bucket mean degrees within 3 sigma.
pub fn compare_fast_naive(params: &GirgParams, num_seeds: usize, base_seed: u64) -> SamplerComparison {
    #[derive(Default, Clone)]
    struct Acc {
        sum: f64,
        sumsq: f64,
        count: usize,
    }
    impl Acc {
        fn push(&mut self, x: f64) {
            self.sum += x;
            self.sumsq += x * x;
            self.count += 1;
        }
        fn mean(&self) -> f64 {
            self.sum / self.count as f64
        }
        fn var(&self) -> f64 {
            let m = self.mean();
            (self.sumsq / self.count as f64 - m * m).max(0.0)
        }
    }

    let results: Vec<(f64, f64, Vec<(usize, f64, f64)>)> = (0..num_seeds as u64)
        .into_par_iter()
        .map(|offset| {
            let seed = base_seed.wrapping_add(offset);
            let vs = girg::sample_vertices(params, seed);
            // fast and naive share the same pair coins, so decorrelate the
            // comparison by giving them different edge seeds
            let naive = girg::sample_edges_naive(&vs, params, seed);
            let fast = girg::sample_edges_fast(&vs, params, seed.wrapping_add(0x5eed));
            let mut deg_n = vec![0u32; vs.len()];
            let mut deg_f = vec![0u32; vs.len()];
            for &(u, v) in &naive {
                deg_n[u as usize] += 1;
                deg_n[v as usize] += 1;
            }
            for &(u, v) in &fast {
                deg_f[u as usize] += 1;
                deg_f[v as usize] += 1;
            }
            let rows: Vec<(usize, f64, f64)> = (0..vs.len())
                .map(|v| {
                    let bucket = (vs.weight(v) / params.w_min).log2().floor().max(0.0) as usize;
                    (bucket, deg_n[v] as f64, deg_f[v] as f64)
                })
                .collect();
            (naive.len() as f64, fast.len() as f64, rows)
        })
        .collect();

    let counts_naive: Vec<f64> = results.iter().map(|r| r.0).collect();
    let counts_fast: Vec<f64> = results.iter().map(|r| r.1).collect();
    let (t, count_pass) =
        stats::two_sample_mean_test_pass(&counts_naive, &counts_fast).unwrap_or((f64::NAN, false));

    let mut buckets_n: Vec<Acc> = vec![Acc::default(); 64];
    let mut buckets_f: Vec<Acc> = vec![Acc::default(); 64];
    for (_, _, rows) in &results {
        for &(b, dn, df) in rows {
            let b = b.min(63);
            buckets_n[b].push(dn);
            buckets_f[b].push(df);
        }
    }
    let mut worst_z = 0.0f64;
    let mut compared = 0usize;
    for (an, af) in buckets_n.iter().zip(&buckets_f) {
        if an.count >= 200 && af.count >= 200 {
            let se = (an.var() / an.count as f64 + af.var() / af.count as f64).sqrt();
            if se > 0.0 {
                let z = (an.mean() - af.mean()).abs() / se;
                worst_z = worst_z.max(z);
                compared += 1;
            }
        }
    }

    SamplerComparison {
        seeds: num_seeds,
        mean_edges_naive: stats::mean(&counts_naive),
        mean_edges_fast: stats::mean(&counts_fast),
        t_statistic: t,
        count_pass,
        worst_bucket_z: worst_z,
        buckets_compared: compared,
        bucket_pass: compared > 0 && worst_z <= 3.0,
    }
}

/// The synchronous update rule against a per-vertex brute-force recount on
/// small random graphs. Exact equality.
pub fn bootstrap_step_matches_recount(trials: usize, base_seed: u64) -> bool {
    use crate::girg::Alpha;
    let mut s = Stream::new(base_seed, tag::EDGE, &[41]);
    for trial in 0..trials {
        let v = 50usize;
        let mut edges = Vec::new();
        for i in 0..v as u32 {
            for j in (i + 1)..v as u32 {
                if s.next_unit() < 0.08 {
                    edges.push((i, j));
                }
            }
        }
        let params = GirgParams::new(v as f64, 1, Alpha::Finite(2.0), 2.5, 1.0, 1.0, 1.0)
            .expect("valid parameters");
        let positions: Vec<f64> = (0..v).map(|i| i as f64 / v as f64).collect();
        let vs = VertexSet::from_parts(1, positions, vec![1.0; v]).expect("valid vertices");
        let graph = Graph::from_parts(params, vs, &edges).expect("valid graph");
        let active: Vec<bool> = (0..v).map(|_| s.next_unit() < 0.3).collect();
        let k = 2 + (trial % 2) as u32;
        let got = bootstrap::step(&graph, &active, k);
        let want: Vec<u32> = (0..v)
            .filter(|&i| {
                !active[i]
                    && graph
                        .neighbors(i)
                        .iter()
                        .filter(|&&nb| active[nb as usize])
                        .count()
                        >= k as usize
            })
            .map(|i| i as u32)
            .collect();
        if got != want {
            return false;
        }
    }
    true
}

/// Statistical validation suite: weight-tail law, degree laws, absence of
/// oversized weights, and fast-vs-naive sampler agreement.
pub fn cmd_validate(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    let seed0 = cfg.seeds[0];

    // Weight distribution.
    let dist = WeightDist::new(cfg.beta, cfg.w_min)?;
    let mut ws = Stream::new(seed0, tag::WEIGHT, &[0x7A11]);
    let samples: Vec<f64> = (0..1_000_000)
        .map(|_| dist.sample(ws.next_unit_open_closed()).unwrap())
        .collect();

    let report = validate_tail(&samples, &dist, 0.1)?;
    checks.push(Check::new(
        "weight_tail_fit",
        report.pass,
        format!(
            "slope={:?} expected={} gamma={}",
            report.slope, report.expected_slope, report.gamma
        ),
    ));

    let mut pointwise_ok = true;
    let mut w = dist.w_min();
    let mut detail = String::new();
    while dist.tail_probability(w) * samples.len() as f64 >= 50.0 {
        let p = dist.tail_probability(w);
        let hits = samples.iter().filter(|&&x| x >= w).count() as f64;
        let sigma = (p * (1.0 - p) * samples.len() as f64).sqrt().max(1.0);
        if (hits - p * samples.len() as f64).abs() > 3.0 * sigma {
            pointwise_ok = false;
            detail = format!("w={w}: hits={hits} expected={}", p * samples.len() as f64);
            break;
        }
        w *= 2.0;
    }
    checks.push(Check::new("weight_tail_pointwise", pointwise_ok, detail));

    let mean = stats::mean(&samples);
    let mean_ok = (mean - dist.mean()).abs() / dist.mean() <= 0.05;
    checks.push(Check::new(
        "weight_mean",
        mean_ok,
        format!("mean={mean:.4} expected={:.4}", dist.mean()),
    ));

    // Degree laws on one sampled graph.
    let params = cfg.girg_params()?;
    let graph = girg::sample_girg(&params, seed0);

    let slope = degree_weight_slope(&graph);
    let slope_ok = slope.is_some_and(|s| (s - 1.0).abs() <= 0.15);
    checks.push(Check::new(
        "degree_weight_slope",
        slope_ok,
        format!("slope={slope:?} target=1±0.15"),
    ));

    let factors = degree_weight_factors(&graph);
    let factor_ok = !factors.is_empty()
        && factors
            .iter()
            .all(|&(_, f, _)| (1.0 / 8.0..=8.0).contains(&f));
    let worst = factors
        .iter()
        .map(|&(_, f, _)| f)
        .fold(f64::NAN, |a, b| if a.is_nan() { b } else { a.max(b) });
    checks.push(Check::new(
        "degree_weight_factor",
        factor_ok,
        format!("buckets={} worst_factor={worst:.3}", factors.len()),
    ));

    let ntail = neighbor_weight_tail_slope(&graph);
    let ntail_ok = ntail.is_some_and(|s| (s - (2.0 - cfg.beta)).abs() <= 0.3);
    checks.push(Check::new(
        "neighbor_weight_tail",
        ntail_ok,
        format!("slope={ntail:?} target={}±0.3", 2.0 - cfg.beta),
    ));

    // Oversized weights, vertex clouds only.
    let ball = cfg.start_ball()?;
    let zero_seeds = cfg
        .seeds
        .iter()
        .filter(|&&s| oversized_weight_count(&params, &ball, cfg.eta, s) == 0)
        .count();
    let frac = zero_seeds as f64 / cfg.seeds.len() as f64;
    checks.push(Check::new(
        "oversized_weight_vertices",
        frac >= 0.9,
        format!("{zero_seeds}/{} seeds clean", cfg.seeds.len()),
    ));

    // Fast vs naive samplers on small instances.
    let small = GirgParams::new(
        500.0,
        cfg.d,
        cfg.alpha,
        cfg.beta,
        cfg.w_min,
        cfg.kernel_c,
        cfg.threshold_c,
    )?;
    let cmp = compare_fast_naive(&small, 200, seed0);
    checks.push(Check::new(
        "fast_naive_edge_count",
        cmp.count_pass,
        format!(
            "t={:.3} mean_naive={:.1} mean_fast={:.1}",
            cmp.t_statistic, cmp.mean_edges_naive, cmp.mean_edges_fast
        ),
    ));
    checks.push(Check::new(
        "fast_naive_degree_buckets",
        cmp.bucket_pass,
        format!(
            "buckets={} worst_z={:.3}",
            cmp.buckets_compared, cmp.worst_bucket_z
        ),
    ));

    checks.push(Check::new(
        "bootstrap_step_recount",
        bootstrap_step_matches_recount(100, seed0),
        "100 random 50-vertex graphs".into(),
    ));

    Ok(ValidationReport { checks })
}
