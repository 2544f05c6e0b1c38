//! End-to-end constructions: group model → partition → tensor → amalgam →
//! Latin square → map `α` into the group, with verification reports.

use serde_json::{json, Value};
use thiserror::Error;

use crate::group::{CellBox, CompactWindow, GroupElement, GroupError, GroupKind, GroupModel};
use crate::latin::{
    amalgamation, complete_partial, gqq_of, loop_isotopy, loopify, realize_amalgamation, realize_partial,
    round_to_amalgam, GroupedPartition, IntegerAmalgam, LatinError, LatinSquare, PartialLatinSquare, RoundingMode,
};
use crate::partition::{box_partition, lattice_partition, singleton_partition, Cell, Partition, PartitionError};
use crate::scalar::{common_denominator, Scalar};
use crate::tensor::{
    line_disparity, support_geometry_violations, support_sets, verify_line_laws, w_exact, w_montecarlo, LawViolation,
    LineAxis, SupportSets, TensorError, WTensor,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Latin(#[from] LatinError),
    #[error(transparent)]
    Law(#[from] LawViolation),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// The finite quasigroup together with its map into the group.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMap<T> {
    pub square: LatinSquare,
    pub groups: GroupedPartition,
    pub alpha: Vec<GroupElement<T>>,
    /// Whether `α(q)` lies in the window `C`.
    pub in_window: Vec<bool>,
}

impl<T: Scalar> ApproxMap<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.square.order(),
            "groups": self.groups.groups,
            "alpha": self.alpha.iter().map(GroupElement::to_json).collect::<Vec<_>>(),
            "in_window": self.in_window,
            "table": self.square.rows().collect::<Vec<_>>(),
        })
    }
}

/// Loop-specific measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopReport {
    pub unit: usize,
    pub unit_laws_hold: bool,
    /// `max_x dist(α(a(x)), α(x))`.
    pub a_displacement: f64,
    /// `max_x dist(α(b(x)), α(x))`.
    pub b_displacement: f64,
}

/// Measurements specific to windows of non-compact groups.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalReport {
    pub window: (f64, f64),
    pub inner: (f64, f64),
    pub partial_order: usize,
    pub completed_order: usize,
    /// Every block `Q_i × Q_j` with `(i,j) ∈ S` was filled before completion.
    pub s_blocks_defined: bool,
    pub s_pairs: usize,
    /// Number of filled cells in the partial square.
    pub partial_filled: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationReport {
    pub model: String,
    pub n_cells: usize,
    pub t: i64,
    pub order: usize,
    /// Every cell holds exactly `t` images of `α`.
    pub density_ok: bool,
    pub injective: bool,
    pub max_product_error: f64,
    pub mean_product_error: f64,
    /// `3 ×` the largest cell diameter.
    pub epsilon_bound: f64,
    pub pair_count: usize,
    /// Generalized quotient contained in the tensor support.
    pub gqq_in_support: bool,
    /// Every quotient triple has `P_i·P_j ∩ P_k` of positive measure.
    pub intersections_ok: bool,
    /// Block counts of the realized square equal `t ×` the amalgam.
    pub amalgamation_exact: bool,
    pub loop_report: Option<LoopReport>,
    pub local: Option<LocalReport>,
}

impl ApproximationReport {
    pub fn within_bound(&self) -> bool {
        self.max_product_error <= self.epsilon_bound + 1e-12
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "model": self.model,
            "n_cells": self.n_cells,
            "t": self.t,
            "order": self.order,
            "density_ok": self.density_ok,
            "injective": self.injective,
            "max_product_error": self.max_product_error,
            "mean_product_error": self.mean_product_error,
            "epsilon_bound": self.epsilon_bound,
            "within_bound": self.within_bound(),
            "pair_count": self.pair_count,
            "gqq_in_support": self.gqq_in_support,
            "intersections_ok": self.intersections_ok,
            "amalgamation_exact": self.amalgamation_exact,
        });
        if let Some(l) = &self.loop_report {
            v["loop"] = json!({
                "unit": l.unit,
                "unit_laws_hold": l.unit_laws_hold,
                "a_displacement": l.a_displacement,
                "b_displacement": l.b_displacement,
            });
        }
        if let Some(l) = &self.local {
            v["locally_compact"] = json!({
                "window": [l.window.0, l.window.1],
                "inner": [l.inner.0, l.inner.1],
                "partial_order": l.partial_order,
                "completed_order": l.completed_order,
                "s_blocks_defined": l.s_blocks_defined,
                "s_pairs": l.s_pairs,
                "partial_filled": l.partial_filled,
            });
        }
        v
    }

    pub fn summary(&self) -> String {
        let mut rows = vec![
            ("model", self.model.clone()),
            ("cells", self.n_cells.to_string()),
            ("t", self.t.to_string()),
            ("order", self.order.to_string()),
            ("density", self.density_ok.to_string()),
            ("max product error", format!("{:.6}", self.max_product_error)),
            ("mean product error", format!("{:.6}", self.mean_product_error)),
            ("error bound", format!("{:.6}", self.epsilon_bound)),
            ("pairs", self.pair_count.to_string()),
            ("quotient in support", self.gqq_in_support.to_string()),
        ];
        if let Some(l) = &self.loop_report {
            rows.push(("unit", l.unit.to_string()));
            rows.push(("unit laws", l.unit_laws_hold.to_string()));
            rows.push(("a displacement", format!("{:.6}", l.a_displacement)));
            rows.push(("b displacement", format!("{:.6}", l.b_displacement)));
        }
        if let Some(l) = &self.local {
            rows.push(("partial order", l.partial_order.to_string()));
            rows.push(("completed order", l.completed_order.to_string()));
            rows.push(("S blocks defined", l.s_blocks_defined.to_string()));
        }
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

/// Smallest multiple of the common denominator of `w / l` that is at least `t_hint`.
pub fn choose_t<T: Scalar>(w: &WTensor<T>, window_measure: &T, t_hint: usize) -> usize {
    let n = w.n;
    let l = window_measure.clone() * window_measure.clone() / T::of_usize(n * n);
    let hint = t_hint.max(1);
    match common_denominator(w.entries.iter().filter(|x| x.is_positive()).map(|x| x.clone() / l.clone())) {
        Some(d) => {
            let d = d as usize;
            hint.div_ceil(d) * d
        }
        None => hint,
    }
}

/// `t` distinct points in the interior of each cell, on a sub-lattice.
fn cell_points<T: Scalar>(
    model: &GroupModel<T>,
    p: &Partition<T>,
    t: usize,
) -> Result<Vec<GroupElement<T>>, PipelineError> {
    let mut out = Vec::with_capacity(p.len() * t);
    for cell in &p.cells {
        match cell {
            Cell::Box(b) => {
                let d = b.dim();
                let per_axis = (1..=t).find(|m| m.pow(d as u32) >= t).unwrap_or(t);
                for x in 0..t {
                    let mut rest = x;
                    let coords = (0..d)
                        .map(|a| {
                            let idx = rest % per_axis;
                            rest /= per_axis;
                            let width = b.hi[a].clone() - b.lo[a].clone();
                            b.lo[a].clone()
                                + width * (T::of_usize(2 * idx + 1)) / T::of_usize(2 * per_axis)
                        })
                        .collect();
                    out.push(model.element(coords)?);
                }
            }
            Cell::Elements(es) => {
                if es.len() < t {
                    return Err(PipelineError::Unsupported(format!(
                        "a cell with {} elements cannot hold {t} distinct images",
                        es.len()
                    )));
                }
                for &e in es.iter().take(t) {
                    out.push(model.finite_element(e)?);
                }
            }
            Cell::Atoms(_) => return Err(PipelineError::Unsupported("atom cells have no explicit points".into())),
        }
    }
    Ok(out)
}

fn max_cell_diameter<T: Scalar>(model: &GroupModel<T>, p: &Partition<T>) -> f64 {
    p.cells
        .iter()
        .map(|c| match (c, model.kind()) {
            (Cell::Box(b), GroupKind::Torus { .. } | GroupKind::RealLine) => {
                b.widths().iter().map(Scalar::to_f64_lossy).fold(0.0, f64::max)
            }
            (Cell::Box(b), GroupKind::AffineLine) => {
                let lo = model.element(b.lo.clone());
                let hi = model.element(b.hi.clone());
                match (lo, hi) {
                    (Ok(lo), Ok(hi)) => model.dist(&lo, &hi).map(|d| d.to_f64_lossy()).unwrap_or(f64::INFINITY),
                    _ => f64::INFINITY,
                }
            }
            (Cell::Elements(es), _) => {
                if es.len() > 1 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

struct ErrorStats {
    max: f64,
    mean: f64,
    pairs: usize,
}

fn product_errors<T: Scalar>(
    model: &GroupModel<T>,
    sq: &LatinSquare,
    alpha: &[GroupElement<T>],
    include: impl Fn(usize) -> bool,
) -> Result<ErrorStats, PipelineError> {
    let n = sq.order();
    let mut max: f64 = 0.0;
    let mut sum = 0.0;
    let mut pairs = 0;
    for q1 in (0..n).filter(|&q| include(q)) {
        for q2 in (0..n).filter(|&q| include(q)) {
            let prod = model.mul(&alpha[q1], &alpha[q2])?;
            let d = model.dist(&alpha[sq.get(q1, q2)], &prod)?.to_f64_lossy();
            max = max.max(d);
            sum += d;
            pairs += 1;
        }
    }
    Ok(ErrorStats { max, mean: if pairs > 0 { sum / pairs as f64 } else { 0.0 }, pairs })
}

fn density<T: Scalar>(p: &Partition<T>, groups: &GroupedPartition, alpha: &[GroupElement<T>]) -> bool {
    groups.groups.iter().enumerate().all(|(i, members)| {
        members.iter().all(|&q| p.locate(&alpha[q], None) == Some(i))
    }) && groups.groups.iter().all(|g| !g.is_empty())
}

fn injective<T: Scalar>(alpha: &[GroupElement<T>]) -> bool {
    let strs: std::collections::BTreeSet<String> = alpha.iter().map(|g| g.to_string()).collect();
    strs.len() == alpha.len()
}

/// Rounds with `t`, doubling on [`LatinError::RoundingInfeasible`] a few times.
fn round_with_retry<T: Scalar>(
    w: &WTensor<T>,
    s: &SupportSets,
    measure: &T,
    t: usize,
    mode: RoundingMode,
) -> Result<IntegerAmalgam, PipelineError> {
    let mut t = t as i64;
    let mut last = None;
    for _ in 0..4 {
        match round_to_amalgam(w, s, measure, t, mode) {
            Ok(m) => return Ok(m),
            Err(e @ LatinError::RoundingInfeasible { .. }) => {
                last = Some(e);
                t *= 2;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("loop ran").into())
}

fn compact_partition<T: Scalar>(model: &GroupModel<T>, n_cells: usize) -> Result<Partition<T>, PipelineError> {
    Ok(match model.kind() {
        GroupKind::Torus { .. } => lattice_partition(model, n_cells)?,
        GroupKind::Finite(_) => singleton_partition(model)?,
        _ => {
            return Err(PipelineError::Unsupported(format!(
                "{} is not compact; use the locally compact pipeline",
                model.kind().name()
            )))
        }
    })
}

/// Compact pipeline.
///
/// Tori are cut into `n_cells` boxes per axis; finite groups into
/// singletons (then `n_cells` is ignored and `t = 1`). `t` is the smallest
/// multiple of the common denominator of `w / l` that is at least `t_hint`.
pub fn approximate_compact<T: Scalar>(
    model: &GroupModel<T>,
    n_cells: usize,
    t_hint: usize,
) -> Result<(ApproxMap<T>, ApproximationReport), PipelineError> {
    let window = CompactWindow::whole_group();
    let p = compact_partition(model, n_cells)?;
    let w = w_exact(&p, model, &window)?;
    let s = support_sets(&p, model, &window)?;
    let measure = window.measure(model);
    verify_line_laws(&w, &s, &measure)?;
    let t = if matches!(model.kind(), GroupKind::Finite(_)) { 1 } else { choose_t(&w, &measure, t_hint) };
    let m = round_with_retry(&w, &s, &measure, t, RoundingMode::Compact)?;
    let (square, groups) = realize_amalgamation(&m)?;
    let alpha = cell_points(model, &p, m.t as usize)?;
    let errors = product_errors(model, &square, &alpha, |_| true)?;
    let quotient = gqq_of(&square, &groups);
    let bad_geometry = support_geometry_violations(&w, &p, model)?;
    let outline: Vec<i64> = m.entries.iter().map(|&x| x * m.t).collect();
    let report = ApproximationReport {
        model: describe(model),
        n_cells: p.len(),
        t: m.t,
        order: square.order(),
        density_ok: density(&p, &groups, &alpha),
        injective: injective(&alpha),
        max_product_error: errors.max,
        mean_product_error: errors.mean,
        epsilon_bound: 3.0 * max_cell_diameter(model, &p),
        pair_count: errors.pairs,
        gqq_in_support: quotient.is_subset_of_support(w.n, |i, j, k| w.get(i, j, k).is_positive()),
        intersections_ok: quotient.triples.iter().all(|tr| !bad_geometry.contains(tr)),
        amalgamation_exact: amalgamation(&square, &groups) == outline,
        loop_report: None,
        local: None,
    };
    let in_window = vec![true; square.order()];
    Ok((ApproxMap { square, groups, alpha, in_window }, report))
}

/// Window `C = [3·b0, 3·b1]` used for an inner target `B = [b0, b1]`.
pub fn inflate_window<T: Scalar>(b: &CellBox<T>) -> CellBox<T> {
    let three = T::ratio(3, 1);
    CellBox::new(
        b.lo.iter().map(|x| x.clone() * three.clone()).collect(),
        b.hi.iter().map(|x| x.clone() * three.clone()).collect(),
    )
}

/// Locally compact pipeline on the real line.
///
/// `C` is `B` inflated threefold about the identity and cut into `n_cells`
/// equal intervals. The partial square realizing the rounded tensor is
/// embedded into a full square of twice its order; indices added by the
/// completion are mapped to distinct points outside `C`. Product errors
/// are measured over pairs whose images lie in `B`.
pub fn approximate_locally_compact<T: Scalar>(
    model: &GroupModel<T>,
    inner: &CellBox<T>,
    n_cells: usize,
    t_hint: usize,
) -> Result<(ApproxMap<T>, ApproximationReport), PipelineError> {
    if !matches!(model.kind(), GroupKind::RealLine) {
        return Err(PipelineError::Unsupported(format!(
            "the locally compact pipeline runs on the real line, not {}",
            model.kind().name()
        )));
    }
    if inner.lo[0].is_positive() || inner.hi[0].is_negative() {
        return Err(PipelineError::Unsupported("the inner target must contain the identity".into()));
    }
    let c = inflate_window(inner);
    let window = CompactWindow::boxed(model, c.clone(), Some(inner.clone()))?;
    let p = box_partition(model, &window, n_cells)?;
    let w = w_exact(&p, model, &window)?;
    let s = support_sets(&p, model, &window)?;
    let measure = window.measure(model);
    verify_line_laws(&w, &s, &measure)?;
    let t = choose_t(&w, &measure, t_hint);
    let m = round_with_retry(&w, &s, &measure, t, RoundingMode::Partial { loops: false })?;
    let (partial, groups) = realize_partial(&m)?;
    let tt = m.t as usize;
    let s_blocks_defined = s.s.iter().all(|&(i, j)| {
        groups.groups[i].iter().all(|&r| groups.groups[j].iter().all(|&col| partial.get(r, col).is_some()))
    });
    let square = complete_partial(&partial)?;
    let base = partial.order();

    let mut alpha = cell_points(model, &p, tt)?;
    let outside = c.hi[0].clone() + T::one();
    for x in 0..square.order() - base {
        alpha.push(model.element(vec![outside.clone() + T::of_usize(x)])?);
    }
    let in_window: Vec<bool> = alpha.iter().map(|g| c.contains_coords(&g.coordinates())).collect();
    let in_inner = |q: usize| {
        let x = &alpha[q].coordinates()[0];
        *x >= inner.lo[0] && *x <= inner.hi[0]
    };
    let errors = product_errors(model, &square, &alpha, in_inner)?;
    let quotient = gqq_of(&partial, &groups);
    let bad_geometry = support_geometry_violations(&w, &p, model)?;
    let outline: Vec<i64> = m.entries.iter().map(|&x| x * m.t).collect();
    let all_groups = GroupedPartition::new(
        square.order(),
        groups
            .groups
            .iter()
            .cloned()
            .chain(std::iter::once((base..square.order()).collect()))
            .collect(),
    )?;
    let report = ApproximationReport {
        model: describe(model),
        n_cells: p.len(),
        t: m.t,
        order: square.order(),
        density_ok: density(&p, &groups, &alpha),
        injective: injective(&alpha),
        max_product_error: errors.max,
        mean_product_error: errors.mean,
        epsilon_bound: 3.0 * max_cell_diameter(model, &p),
        pair_count: errors.pairs,
        gqq_in_support: quotient.is_subset_of_support(w.n, |i, j, k| w.get(i, j, k).is_positive()),
        intersections_ok: quotient.triples.iter().all(|tr| !bad_geometry.contains(tr)),
        amalgamation_exact: amalgamation(&partial, &groups) == outline,
        loop_report: None,
        local: Some(LocalReport {
            window: (c.lo[0].to_f64_lossy(), c.hi[0].to_f64_lossy()),
            inner: (inner.lo[0].to_f64_lossy(), inner.hi[0].to_f64_lossy()),
            partial_order: base,
            completed_order: square.order(),
            s_blocks_defined,
            s_pairs: s.s.len(),
            partial_filled: partial.filled_count(),
        }),
    };
    Ok((ApproxMap { square, groups: all_groups, alpha, in_window }, report))
}

/// The partial square and amalgam of the locally compact pipeline, before completion.
pub fn locally_compact_partial<T: Scalar>(
    model: &GroupModel<T>,
    inner: &CellBox<T>,
    n_cells: usize,
    t_hint: usize,
) -> Result<(PartialLatinSquare, GroupedPartition, IntegerAmalgam, SupportSets), PipelineError> {
    let c = inflate_window(inner);
    let window = CompactWindow::boxed(model, c, Some(inner.clone()))?;
    let p = box_partition(model, &window, n_cells)?;
    let w = w_exact(&p, model, &window)?;
    let s = support_sets(&p, model, &window)?;
    let measure = window.measure(model);
    let t = choose_t(&w, &measure, t_hint);
    let m = round_with_retry(&w, &s, &measure, t, RoundingMode::Partial { loops: false })?;
    let (partial, groups) = realize_partial(&m)?;
    Ok((partial, groups, m, s))
}

/// Compact pipeline followed by conversion to a loop whose unit is the
/// index mapped nearest the identity (lowest index on ties).
pub fn loop_approximate<T: Scalar>(
    model: &GroupModel<T>,
    n_cells: usize,
    t_hint: usize,
) -> Result<(ApproxMap<T>, ApproximationReport), PipelineError> {
    let (map, mut report) = approximate_compact(model, n_cells, t_hint)?;
    let e = model.identity();
    let mut q0 = 0;
    let mut best: Option<T> = None;
    for (q, g) in map.alpha.iter().enumerate() {
        let d = model.dist(g, &e)?;
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
            q0 = q;
        }
    }
    let iso = loop_isotopy(&map.square, q0)?;
    let square = loopify(&map.square, q0)?;
    let displacement = |perm: &[usize]| -> Result<f64, PipelineError> {
        let mut worst: f64 = 0.0;
        for (x, &y) in perm.iter().enumerate() {
            worst = worst.max(model.dist(&map.alpha[y], &map.alpha[x])?.to_f64_lossy());
        }
        Ok(worst)
    };
    let errors = product_errors(model, &square, &map.alpha, |_| true)?;
    report.max_product_error = errors.max;
    report.mean_product_error = errors.mean;
    report.pair_count = errors.pairs;
    let quotient = gqq_of(&square, &map.groups);
    let p = compact_partition(model, n_cells)?;
    let w = w_exact(&p, model, &CompactWindow::whole_group())?;
    report.gqq_in_support = quotient.is_subset_of_support(w.n, |i, j, k| w.get(i, j, k).is_positive());
    report.amalgamation_exact = false;
    report.loop_report = Some(LoopReport {
        unit: q0,
        unit_laws_hold: square.is_unit(q0),
        a_displacement: displacement(&iso.a)?,
        b_displacement: displacement(&iso.b)?,
    });
    let map = ApproxMap { square, ..map };
    Ok((map, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub model: String,
    pub n_cells: usize,
    pub samples: usize,
    pub seed: u64,
    pub mode: &'static str,
    /// `max |s_L - median| / median` over the lines the line laws force equal.
    pub disparity: f64,
    /// Largest relative standard error of those lines.
    pub noise: f64,
    pub median: f64,
    pub lines: usize,
    pub worst_line: Option<(LineAxis, (usize, usize))>,
    /// `disparity > 4 · noise`.
    pub exceeds_noise: bool,
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model,
            "n_cells": self.n_cells,
            "samples": self.samples,
            "seed": self.seed,
            "mode": self.mode,
            "disparity": self.disparity,
            "noise": self.noise,
            "threshold": 4.0 * self.noise,
            "median_line_sum": self.median,
            "lines": self.lines,
            "worst_line": self.worst_line.map(|(axis, (a, b))| json!({"axis": axis.to_string(), "line": [a, b]})),
            "exceeds_noise": self.exceeds_noise,
        })
    }
}

fn probe_partition(
    model: &GroupModel<f64>,
    window: &CompactWindow<f64>,
    n_cells: usize,
) -> Result<Partition<f64>, PipelineError> {
    if let GroupKind::Finite(_) = model.kind() {
        return Ok(singleton_partition(model)?);
    }
    let d = model.dim() as u32;
    let per_axis = (1..=n_cells)
        .find(|m| m.pow(d) == n_cells)
        .ok_or_else(|| PipelineError::Unsupported(format!("{n_cells} cells is not a perfect power of {d}")))?;
    Ok(match (model.kind(), &window.outer) {
        (GroupKind::Torus { .. }, None) => lattice_partition(model, per_axis)?,
        _ => box_partition(model, window, per_axis)?,
    })
}

/// Line-sum disparity of the tensor against the noise of its estimate.
///
/// Finite groups use the exact tensor; other models are sampled with
/// `samples` draws. `n_cells` is the total number of cells and must be a
/// perfect power of the dimension.
pub fn unimodularity_probe(
    model: &GroupModel<f64>,
    window: &CompactWindow<f64>,
    n_cells: usize,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, PipelineError> {
    let p = probe_partition(model, window, n_cells)?;
    let (w, mode) = match model.kind() {
        GroupKind::Finite(_) => (w_exact(&p, model, window)?, "exact"),
        _ => (w_montecarlo(&p, model, window, samples, seed)?, "montecarlo"),
    };
    let s = support_sets(&p, model, window)?;
    let d = line_disparity(&w, &s);
    Ok(ProbeReport {
        model: describe(model),
        n_cells: p.len(),
        samples: if mode == "exact" { 0 } else { samples },
        seed,
        mode,
        disparity: d.disparity,
        noise: d.noise,
        median: d.median,
        lines: d.lines,
        worst_line: d.worst,
        exceeds_noise: d.disparity > 4.0 * d.noise,
    })
}

pub fn describe<T: Scalar>(model: &GroupModel<T>) -> String {
    match model.kind() {
        GroupKind::Torus { dim } => format!("torus:{dim}"),
        GroupKind::Finite(t) => format!("finite:{}", t.order()),
        GroupKind::RealLine => "real_line".into(),
        GroupKind::AffineLine => "affine".into(),
    }
}
