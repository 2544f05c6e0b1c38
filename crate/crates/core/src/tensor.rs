//! The measure tensor `w_ijk = ν⊗ν{(x, y) : x·y⁻¹ ∈ P_i, y ∈ P_j, x ∈ P_k}`
//! of a partition, its support sets and the line-sum laws.
//!
//! Entries are stored flattened with `i` fastest: `index = i + n(j + n·k)`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::group::{CellBox, CompactWindow, GroupKind, GroupModel};
use crate::partition::{Cell, CellLocator, Partition};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("Monte Carlo estimation needs at least 10^4 samples, got {0}")]
    TooFewSamples(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorMode {
    Exact,
    MonteCarlo,
}

impl TensorMode {
    pub fn name(self) -> &'static str {
        match self {
            TensorMode::Exact => "exact",
            TensorMode::MonteCarlo => "montecarlo",
        }
    }
}

/// Which index a line sum runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LineAxis {
    /// `Σ_i w_ijk`, indexed by `(j, k)`.
    OverI,
    /// `Σ_j w_ijk`, indexed by `(i, k)`.
    OverJ,
    /// `Σ_k w_ijk`, indexed by `(i, j)`.
    OverK,
}

impl fmt::Display for LineAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineAxis::OverI => "sum over i",
            LineAxis::OverJ => "sum over j",
            LineAxis::OverK => "sum over k",
        })
    }
}

/// The three `n × n` line-sum matrices, each flattened first-index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSums<T> {
    pub n: usize,
    /// `Σ_i w_ijk` at `j + n·k`.
    pub over_i: Vec<T>,
    /// `Σ_j w_ijk` at `i + n·k`.
    pub over_j: Vec<T>,
    /// `Σ_k w_ijk` at `i + n·j`.
    pub over_k: Vec<T>,
}

impl<T> LineSums<T> {
    pub fn get(&self, axis: LineAxis, a: usize, b: usize) -> &T {
        let m = match axis {
            LineAxis::OverI => &self.over_i,
            LineAxis::OverJ => &self.over_j,
            LineAxis::OverK => &self.over_k,
        };
        &m[a + self.n * b]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WTensor<T> {
    pub n: usize,
    pub mode: TensorMode,
    pub entries: Vec<T>,
    /// Standard error of each entry (Monte Carlo only).
    pub mc_stddev: Option<Vec<f64>>,
    /// Standard error of each line sum (Monte Carlo only).
    pub line_stddev: Option<LineSums<f64>>,
}

impl<T: Scalar> WTensor<T> {
    pub fn zeros(n: usize, mode: TensorMode) -> Self {
        WTensor { n, mode, entries: vec![T::zero(); n * n * n], mc_stddev: None, line_stddev: None }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.entries[self.index(i, j, k)]
    }

    pub fn total(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    /// Triples with a positive entry, in storage order.
    pub fn support(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n;
        (0..self.entries.len())
            .filter(|&x| self.entries[x].is_positive())
            .map(|x| (x % n, (x / n) % n, x / (n * n)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "n": self.n,
            "mode": self.mode.name(),
            "entries": self.entries.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        });
        if let Some(sd) = &self.mc_stddev {
            v["mc_stddev"] = json!(sd);
        }
        v
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let n = v.get("n")?.as_u64()? as usize;
        let mode = match v.get("mode")?.as_str()? {
            "exact" => TensorMode::Exact,
            "montecarlo" => TensorMode::MonteCarlo,
            _ => return None,
        };
        let entries: Vec<T> = v.get("entries")?.as_array()?.iter().map(T::from_json).collect::<Option<_>>()?;
        if entries.len() != n * n * n {
            return None;
        }
        let mc_stddev = match v.get("mc_stddev") {
            Some(sd) => Some(sd.as_array()?.iter().map(Value::as_f64).collect::<Option<Vec<_>>>()?),
            None => None,
        };
        Some(WTensor { n, mode, entries, mc_stddev, line_stddev: None })
    }
}

/// `Σ_i`, `Σ_j`, `Σ_k` of the tensor.
pub fn line_sums<T: Scalar>(w: &WTensor<T>) -> LineSums<T> {
    let n = w.n;
    let mut sums = LineSums {
        n,
        over_i: vec![T::zero(); n * n],
        over_j: vec![T::zero(); n * n],
        over_k: vec![T::zero(); n * n],
    };
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let x = w.get(i, j, k);
                if x.is_zero() {
                    continue;
                }
                sums.over_i[j + n * k] = sums.over_i[j + n * k].clone() + x.clone();
                sums.over_j[i + n * k] = sums.over_j[i + n * k].clone() + x.clone();
                sums.over_k[i + n * j] = sums.over_k[i + n * j].clone() + x.clone();
            }
        }
    }
    sums
}

/// `∫_{y ∈ [j0,j1)} λ([k0,k1) ∩ ([i0,i1) + y))`, optionally modulo 1.
fn overlap_integral<T: Scalar>(pi: (&T, &T), pj: (&T, &T), pk: (&T, &T), wrap: bool) -> T {
    let shifts: &[i64] = if wrap { &[-2, -1, 0, 1, 2] } else { &[0] };
    let mut total = T::zero();
    for &m in shifts {
        let m = T::ratio(m, 1);
        let lo = pi.0.clone() + m.clone();
        let hi = pi.1.clone() + m;
        let f = |y: &T| {
            let a = T::max_of(pk.0.clone(), lo.clone() + y.clone());
            let b = T::min_of(pk.1.clone(), hi.clone() + y.clone());
            T::max_of(b - a, T::zero())
        };
        let mut ys = vec![pj.0.clone(), pj.1.clone()];
        for c in [
            pk.0.clone() - lo.clone(),
            pk.1.clone() - lo.clone(),
            pk.0.clone() - hi.clone(),
            pk.1.clone() - hi.clone(),
        ] {
            if c > *pj.0 && c < *pj.1 {
                ys.push(c);
            }
        }
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.dedup();
        for pair in ys.windows(2) {
            let (f0, f1) = (f(&pair[0]), f(&pair[1]));
            if f0.is_zero() && f1.is_zero() {
                continue;
            }
            total = total + (pair[1].clone() - pair[0].clone()) * (f0 + f1) * T::half();
        }
    }
    total
}

fn boxes_of<T: Scalar>(p: &Partition<T>) -> Result<Vec<&CellBox<T>>, TensorError> {
    p.cells
        .iter()
        .map(|c| match c {
            Cell::Box(b) => Ok(b),
            _ => Err(TensorError::UnsupportedGeometry("expected box cells".into())),
        })
        .collect()
}

fn element_cells<T: Scalar>(p: &Partition<T>) -> Result<Vec<&Vec<usize>>, TensorError> {
    p.cells
        .iter()
        .map(|c| match c {
            Cell::Elements(es) => Ok(es),
            _ => Err(TensorError::UnsupportedGeometry("expected element cells".into())),
        })
        .collect()
}

/// Exact tensor for box partitions of tori and the real line, and for
/// element partitions of finite groups.
pub fn w_exact<T: Scalar>(
    p: &Partition<T>,
    model: &GroupModel<T>,
    _window: &CompactWindow<T>,
) -> Result<WTensor<T>, TensorError> {
    let n = p.len();
    let mut w = WTensor::zeros(n, TensorMode::Exact);
    match model.kind() {
        GroupKind::Torus { .. } | GroupKind::RealLine => {
            let wrap = matches!(model.kind(), GroupKind::Torus { .. });
            let boxes = boxes_of(p)?;
            let dim = model.dim();
            // per-axis integrals depend only on the axis intervals, so cache them
            let mut cache = std::collections::HashMap::new();
            let mut axis_id: Vec<Vec<usize>> = vec![Vec::with_capacity(n); dim];
            let mut intervals: Vec<Vec<(T, T)>> = vec![Vec::new(); dim];
            for b in &boxes {
                for a in 0..dim {
                    let iv = (b.lo[a].clone(), b.hi[a].clone());
                    let id = match intervals[a].iter().position(|x| *x == iv) {
                        Some(id) => id,
                        None => {
                            intervals[a].push(iv);
                            intervals[a].len() - 1
                        }
                    };
                    axis_id[a].push(id);
                }
            }
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        let mut value = T::one();
                        for a in 0..dim {
                            let key = (a, axis_id[a][i], axis_id[a][j], axis_id[a][k]);
                            let v = cache
                                .entry(key)
                                .or_insert_with(|| {
                                    let iv = &intervals[a];
                                    let (pi, pj, pk) = (&iv[key.1], &iv[key.2], &iv[key.3]);
                                    overlap_integral((&pi.0, &pi.1), (&pj.0, &pj.1), (&pk.0, &pk.1), wrap)
                                })
                                .clone();
                            if v.is_zero() {
                                value = T::zero();
                                break;
                            }
                            value = value * v;
                        }
                        let idx = w.index(i, j, k);
                        w.entries[idx] = value;
                    }
                }
            }
        }
        GroupKind::Finite(table) => {
            let cells = element_cells(p)?;
            let mut cell_of = vec![usize::MAX; table.order()];
            for (id, es) in cells.iter().enumerate() {
                for &e in es.iter() {
                    cell_of[e] = id;
                }
            }
            let unit = T::one() / T::of_usize(table.order() * table.order());
            for (i, pi) in cells.iter().enumerate() {
                for (j, pj) in cells.iter().enumerate() {
                    for &x in pi.iter() {
                        for &y in pj.iter() {
                            let k = cell_of[table.mul(x, y)];
                            if k != usize::MAX {
                                let idx = w.index(i, j, k);
                                w.entries[idx] = w.entries[idx].clone() + unit.clone();
                            }
                        }
                    }
                }
            }
        }
        GroupKind::AffineLine => {
            return Err(TensorError::UnsupportedGeometry(
                "no closed form for the affine group; use Monte Carlo".into(),
            ))
        }
    }
    Ok(w)
}

/// Number of batches used for Monte Carlo variance estimates.
pub const MC_BATCHES: usize = 32;

#[derive(Clone, Copy)]
enum Sampler {
    Uniform,
    InverseUniformFirst,
}

fn sample_box(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64], sampler: Sampler, out: &mut [f64]) {
    for a in 0..lo.len() {
        out[a] = match (sampler, a) {
            (Sampler::InverseUniformFirst, 0) => {
                // da/a² is uniform in 1/a
                let u = rng.gen_range(1.0 / hi[0]..=1.0 / lo[0]);
                1.0 / u
            }
            _ => rng.gen_range(lo[a]..hi[a]),
        };
    }
}

/// Coordinates of `x·y⁻¹`.
fn quotient(kind: &GroupKind, x: &[f64], y: &[f64], out: &mut [f64]) {
    match kind {
        GroupKind::Torus { .. } => {
            for a in 0..x.len() {
                let d = x[a] - y[a];
                let r = d - d.floor();
                out[a] = if r >= 1.0 { 0.0 } else { r };
            }
        }
        GroupKind::RealLine => out[0] = x[0] - y[0],
        GroupKind::AffineLine => {
            // (a,b)(c,d)⁻¹ = (a/c, b - a·d/c)
            out[0] = x[0] / y[0];
            out[1] = x[1] - x[0] * y[1] / y[0];
        }
        GroupKind::Finite(_) => unreachable!("finite groups use table lookups"),
    }
}

/// Stratified Monte Carlo estimate of the tensor.
///
/// Every `(j, k)` pair gets `samples / n²` draws `(x, y) ∈ P_k × P_j` from
/// its own ChaCha stream, split into [`MC_BATCHES`] batches for the
/// variance estimate. Results are independent of the thread count.
pub fn w_montecarlo(
    p: &Partition<f64>,
    model: &GroupModel<f64>,
    _window: &CompactWindow<f64>,
    samples: usize,
    seed: u64,
) -> Result<WTensor<f64>, TensorError> {
    if samples < 10_000 {
        return Err(TensorError::TooFewSamples(samples));
    }
    let n = p.len();
    let locator = CellLocator::new(p)
        .ok_or_else(|| TensorError::UnsupportedGeometry("cells must form a grid or element sets".into()))?;
    let per_batch = (samples / (n * n) / MC_BATCHES).max(1);
    let kind = model.kind();
    let finite = match kind {
        GroupKind::Finite(t) => Some((t, element_cells(p)?)),
        _ => None,
    };
    let boxes = if finite.is_none() { boxes_of(p)? } else { Vec::new() };
    let bounds: Vec<(Vec<f64>, Vec<f64>)> = boxes.iter().map(|b| (b.lo.clone(), b.hi.clone())).collect();
    let sampler = if matches!(kind, GroupKind::AffineLine) { Sampler::InverseUniformFirst } else { Sampler::Uniform };
    let dim = model.dim();

    // per stratum: batch estimates for each i
    let strata: Vec<Vec<[f64; MC_BATCHES]>> = (0..n * n)
        .into_par_iter()
        .map(|s| {
            let (j, k) = (s % n, s / n);
            let scale = p.measures[j] * p.measures[k];
            let mut counts = vec![vec![0u32; n]; MC_BATCHES];
            if scale > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s as u64);
                let (mut x, mut y, mut q) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
                for batch in counts.iter_mut() {
                    for _ in 0..per_batch {
                        let i = match &finite {
                            Some((table, cells)) => {
                                let xe = cells[k][rng.gen_range(0..cells[k].len())];
                                let ye = cells[j][rng.gen_range(0..cells[j].len())];
                                locator.locate_element(table.mul(xe, table.inv(ye)))
                            }
                            None => {
                                sample_box(&mut rng, &bounds[k].0, &bounds[k].1, sampler, &mut x);
                                sample_box(&mut rng, &bounds[j].0, &bounds[j].1, sampler, &mut y);
                                quotient(kind, &x, &y, &mut q);
                                locator.locate(&q)
                            }
                        };
                        if let Some(i) = i {
                            batch[i] += 1;
                        }
                    }
                }
            }
            (0..n)
                .map(|i| std::array::from_fn(|b| scale * f64::from(counts[b][i]) / per_batch as f64))
                .collect::<Vec<[f64; MC_BATCHES]>>()
        })
        .collect();

    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let std_err = |xs: &[f64]| {
        let m = mean(xs);
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        (var / xs.len() as f64).sqrt()
    };

    let mut w = WTensor::<f64>::zeros(n, TensorMode::MonteCarlo);
    let mut sd = vec![0.0; n * n * n];
    let mut line_var = LineSums { n, over_i: vec![0.0; n * n], over_j: vec![0.0; n * n], over_k: vec![0.0; n * n] };
    for (s, per_i) in strata.iter().enumerate() {
        let (j, k) = (s % n, s / n);
        let mut batch_totals = [0.0; MC_BATCHES];
        for (i, est) in per_i.iter().enumerate() {
            let idx = w.index(i, j, k);
            w.entries[idx] = mean(est);
            sd[idx] = std_err(est);
            for b in 0..MC_BATCHES {
                batch_totals[b] += est[b];
            }
            // strata are independent, so variances add across j and k
            line_var.over_j[i + n * k] += sd[idx].powi(2);
            line_var.over_k[i + n * j] += sd[idx].powi(2);
        }
        line_var.over_i[j + n * k] = std_err(&batch_totals).powi(2);
    }
    for v in line_var.over_i.iter_mut().chain(&mut line_var.over_j).chain(&mut line_var.over_k) {
        *v = v.sqrt();
    }
    w.mc_stddev = Some(sd);
    w.line_stddev = Some(line_var);
    Ok(w)
}

/// `S = {(i,j) : P_i·P_j ⊆ C}`, `S′ = {(i,k) : P_i⁻¹·P_k ⊆ C}`,
/// `S″ = {(j,k) : P_k·P_j⁻¹ ⊆ C}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSets {
    pub n: usize,
    pub s: BTreeSet<(usize, usize)>,
    pub s_prime: BTreeSet<(usize, usize)>,
    pub s_double: BTreeSet<(usize, usize)>,
}

impl SupportSets {
    pub fn full(n: usize) -> Self {
        let all: BTreeSet<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        SupportSets { n, s: all.clone(), s_prime: all.clone(), s_double: all }
    }

    pub fn is_full(&self) -> bool {
        let m = self.n * self.n;
        self.s.len() == m && self.s_prime.len() == m && self.s_double.len() == m
    }

    /// The set governing lines along `axis`.
    pub fn for_axis(&self, axis: LineAxis) -> &BTreeSet<(usize, usize)> {
        match axis {
            LineAxis::OverK => &self.s,
            LineAxis::OverJ => &self.s_prime,
            LineAxis::OverI => &self.s_double,
        }
    }

    pub fn to_json(&self) -> Value {
        let pairs = |s: &BTreeSet<(usize, usize)>| s.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>();
        json!({ "n": self.n, "S": pairs(&self.s), "S_prime": pairs(&self.s_prime), "S_double": pairs(&self.s_double) })
    }
}

#[derive(Clone, Copy)]
enum Product {
    /// `A·B`
    Direct,
    /// `A⁻¹·B`
    LeftInverse,
    /// `A·B⁻¹`
    RightInverse,
}

fn corners<T: Scalar>(b: &CellBox<T>) -> Vec<Vec<T>> {
    let d = b.dim();
    (0..1usize << d)
        .map(|mask| (0..d).map(|a| if mask >> a & 1 == 1 { b.hi[a].clone() } else { b.lo[a].clone() }).collect())
        .collect()
}

/// Coordinate hull `[lo, hi]` of a product of two boxes, without torus
/// reduction.
fn product_hull<T: Scalar>(kind: &GroupKind, a: &CellBox<T>, b: &CellBox<T>, op: Product) -> (Vec<T>, Vec<T>) {
    match kind {
        GroupKind::AffineLine => {
            let mut lo: Option<Vec<T>> = None;
            let mut hi: Option<Vec<T>> = None;
            let inv = |g: &[T]| vec![T::one() / g[0].clone(), -(g[1].clone()) / g[0].clone()];
            let mul = |g: &[T], h: &[T]| vec![g[0].clone() * h[0].clone(), g[0].clone() * h[1].clone() + g[1].clone()];
            // the coordinates of the product are multilinear in (a or 1/a, b) of each factor
            for g in corners(a) {
                for h in corners(b) {
                    let v = match op {
                        Product::Direct => mul(&g, &h),
                        Product::LeftInverse => mul(&inv(&g), &h),
                        Product::RightInverse => mul(&g, &inv(&h)),
                    };
                    lo = Some(match lo {
                        None => v.clone(),
                        Some(l) => l.into_iter().zip(&v).map(|(x, y)| T::min_of(x, y.clone())).collect(),
                    });
                    hi = Some(match hi {
                        None => v,
                        Some(h) => h.into_iter().zip(v).map(|(x, y)| T::max_of(x, y)).collect(),
                    });
                }
            }
            (lo.unwrap(), hi.unwrap())
        }
        _ => {
            let d = a.dim();
            let mut lo = Vec::with_capacity(d);
            let mut hi = Vec::with_capacity(d);
            for x in 0..d {
                let (a0, a1, b0, b1) = (&a.lo[x], &a.hi[x], &b.lo[x], &b.hi[x]);
                let (l, h) = match op {
                    Product::Direct => (a0.clone() + b0.clone(), a1.clone() + b1.clone()),
                    Product::LeftInverse => (b0.clone() - a1.clone(), b1.clone() - a0.clone()),
                    Product::RightInverse => (a0.clone() - b1.clone(), a1.clone() - b0.clone()),
                };
                lo.push(l);
                hi.push(h);
            }
            (lo, hi)
        }
    }
}

fn hull_within<T: Scalar>(kind: &GroupKind, hull: &(Vec<T>, Vec<T>), c: &CellBox<T>) -> bool {
    let torus = matches!(kind, GroupKind::Torus { .. });
    (0..c.dim()).all(|a| {
        let shifts: &[i64] = if torus { &[-2, -1, 0, 1, 2] } else { &[0] };
        shifts.iter().any(|&m| {
            let m = T::ratio(m, 1);
            hull.0[a].clone() + m.clone() >= c.lo[a] && hull.1[a].clone() + m <= c.hi[a]
        })
    })
}

/// Support sets by interval arithmetic on cell bounds; anything not
/// certified to lie in the window is left out.
pub fn support_sets<T: Scalar>(
    p: &Partition<T>,
    model: &GroupModel<T>,
    window: &CompactWindow<T>,
) -> Result<SupportSets, TensorError> {
    let n = p.len();
    let Some(c) = &window.outer else {
        return Ok(SupportSets::full(n));
    };
    let boxes = boxes_of(p)?;
    let kind = model.kind();
    let mut sets = SupportSets { n, s: BTreeSet::new(), s_prime: BTreeSet::new(), s_double: BTreeSet::new() };
    for a in 0..n {
        for b in 0..n {
            if hull_within(kind, &product_hull(kind, boxes[a], boxes[b], Product::Direct), c) {
                sets.s.insert((a, b));
            }
            // (i,k): P_i⁻¹ P_k
            if hull_within(kind, &product_hull(kind, boxes[a], boxes[b], Product::LeftInverse), c) {
                sets.s_prime.insert((a, b));
            }
            // (j,k): P_k P_j⁻¹
            if hull_within(kind, &product_hull(kind, boxes[b], boxes[a], Product::RightInverse), c) {
                sets.s_double.insert((a, b));
            }
        }
    }
    Ok(sets)
}

/// Triples `(i,j,k)` of the tensor support for which `P_i·P_j ∩ P_k` has
/// empty interior. Exact for torus, line and finite partitions.
pub fn support_geometry_violations<T: Scalar>(
    w: &WTensor<T>,
    p: &Partition<T>,
    model: &GroupModel<T>,
) -> Result<Vec<(usize, usize, usize)>, TensorError> {
    let support = w.support();
    match model.kind() {
        GroupKind::Finite(table) => {
            let cells = element_cells(p)?;
            Ok(support
                .into_iter()
                .filter(|&(i, j, k)| {
                    !cells[i].iter().any(|&x| cells[j].iter().any(|&y| cells[k].contains(&table.mul(x, y))))
                })
                .collect())
        }
        kind => {
            let boxes = boxes_of(p)?;
            let torus = matches!(kind, GroupKind::Torus { .. });
            Ok(support
                .into_iter()
                .filter(|&(i, j, k)| {
                    let hull = product_hull(kind, boxes[i], boxes[j], Product::Direct);
                    let pk = boxes[k];
                    let meets = (0..pk.dim()).all(|a| {
                        let shifts: &[i64] = if torus { &[-2, -1, 0, 1, 2] } else { &[0] };
                        shifts.iter().any(|&m| {
                            let m = T::ratio(m, 1);
                            hull.0[a].clone() + m.clone() < pk.hi[a] && hull.1[a].clone() + m > pk.lo[a]
                        })
                    });
                    !meets
                })
                .collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineLawReport {
    /// Expected line sum `ν(C)²/n²`, rendered exactly.
    pub line_value: String,
    pub lines_checked: usize,
    pub equality_lines: usize,
    pub max_abs_deviation: f64,
    pub max_relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A line on its support set does not sum to the expected value.
    NotEqual,
    /// A line sum exceeds the expected value.
    Exceeds,
    /// A pair of `S` has no positive entry in its line.
    EmptyLine,
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line law violated ({kind:?}) on {axis} at {line:?}: sum {sum}, expected {expected}, relative deviation {relative_deviation:.3e}")]
pub struct LawViolation {
    pub kind: ViolationKind,
    pub axis: LineAxis,
    pub line: (usize, usize),
    pub sum: String,
    pub expected: String,
    pub relative_deviation: f64,
}

/// Checks every line sum `≤ ν(C)²/n²`, with equality on the support set
/// governing that line, and that every pair of `S` has a positive entry.
///
/// Exact tensors are compared exactly; Monte Carlo tensors within four
/// standard errors of the line sum.
pub fn verify_line_laws<T: Scalar>(
    w: &WTensor<T>,
    s: &SupportSets,
    window_measure: &T,
) -> Result<LineLawReport, LawViolation> {
    let n = w.n;
    let l = window_measure.clone() * window_measure.clone() / T::of_usize(n * n);
    let lf = l.to_f64_lossy();
    let sums = line_sums(w);
    let mut report = LineLawReport {
        line_value: l.to_string(),
        lines_checked: 0,
        equality_lines: 0,
        max_abs_deviation: 0.0,
        max_relative_deviation: 0.0,
    };
    for axis in [LineAxis::OverK, LineAxis::OverJ, LineAxis::OverI] {
        let required = s.for_axis(axis);
        for b in 0..n {
            for a in 0..n {
                let sum = sums.get(axis, a, b);
                let tol = match &w.line_stddev {
                    Some(sd) if w.mode == TensorMode::MonteCarlo => 4.0 * sd.get(axis, a, b),
                    _ => 0.0,
                };
                let deviation = sum.to_f64_lossy() - lf;
                let relative = if lf > 0.0 { deviation.abs() / lf } else { deviation.abs() };
                let violation = |kind| LawViolation {
                    kind,
                    axis,
                    line: (a, b),
                    sum: sum.to_string(),
                    expected: l.to_string(),
                    relative_deviation: relative,
                };
                report.lines_checked += 1;
                let exceeds = if T::EXACT && w.mode == TensorMode::Exact { *sum > l } else { deviation > tol };
                if exceeds {
                    return Err(violation(ViolationKind::Exceeds));
                }
                if required.contains(&(a, b)) {
                    report.equality_lines += 1;
                    let unequal =
                        if T::EXACT && w.mode == TensorMode::Exact { *sum != l } else { deviation.abs() > tol };
                    if unequal {
                        return Err(violation(ViolationKind::NotEqual));
                    }
                    report.max_abs_deviation = report.max_abs_deviation.max(deviation.abs());
                    report.max_relative_deviation = report.max_relative_deviation.max(relative);
                }
            }
        }
    }
    for &(i, j) in &s.s {
        if !(0..n).any(|k| w.get(i, j, k).is_positive()) {
            return Err(LawViolation {
                kind: ViolationKind::EmptyLine,
                axis: LineAxis::OverK,
                line: (i, j),
                sum: "0".into(),
                expected: l.to_string(),
                relative_deviation: 1.0,
            });
        }
    }
    Ok(report)
}

/// Spread of the line sums that the line laws force to be equal.
#[derive(Clone, Debug, PartialEq)]
pub struct LineDisparity {
    /// `max |s_L - median| / median` over the governed lines.
    pub disparity: f64,
    /// Largest relative standard error of a line sum (0 for exact tensors).
    pub noise: f64,
    pub median: f64,
    pub lines: usize,
    /// Worst line.
    pub worst: Option<(LineAxis, (usize, usize))>,
}

pub fn line_disparity<T: Scalar>(w: &WTensor<T>, s: &SupportSets) -> LineDisparity {
    let sums = line_sums(w);
    let mut values: Vec<(LineAxis, (usize, usize), f64, f64)> = Vec::new();
    for axis in [LineAxis::OverK, LineAxis::OverJ, LineAxis::OverI] {
        for &(a, b) in s.for_axis(axis) {
            let sd = w.line_stddev.as_ref().map_or(0.0, |sd| *sd.get(axis, a, b));
            values.push((axis, (a, b), sums.get(axis, a, b).to_f64_lossy(), sd));
        }
    }
    if values.is_empty() {
        return LineDisparity { disparity: 0.0, noise: 0.0, median: 0.0, lines: 0, worst: None };
    }
    let mut sorted: Vec<f64> = values.iter().map(|v| v.2).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0 };
    let mut disparity = 0.0;
    let mut worst = None;
    for (axis, line, v, _) in &values {
        let d = if median > 0.0 { (v - median).abs() / median } else { (v - median).abs() };
        if d > disparity || worst.is_none() {
            disparity = d;
            worst = Some((*axis, *line));
        }
    }
    let largest = values.iter().map(|v| v.3).fold(0.0, f64::max);
    let noise = if median > 0.0 { largest / median } else { largest };
    LineDisparity { disparity, noise, median, lines: m, worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{box_partition, lattice_partition, singleton_partition};
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn overlap_integral_matches_triangle() {
        // unit arcs of width 1/4: x - y has a triangular density on (-1/4, 1/4)
        let q = |a: i64| (r(a, 4), r(a + 1, 4));
        let (c0, c1, c2) = (q(0), q(1), q(3));
        let v = overlap_integral((&c0.0, &c0.1), (&c0.0, &c0.1), (&c0.0, &c0.1), true);
        assert_eq!(v, r(1, 32));
        let v = overlap_integral((&c2.0, &c2.1), (&c0.0, &c0.1), (&c0.0, &c0.1), true);
        assert_eq!(v, r(1, 32));
        let v = overlap_integral((&c1.0, &c1.1), (&c0.0, &c0.1), (&c0.0, &c0.1), true);
        assert_eq!(v, r(0, 1));
    }

    #[test]
    fn z3_tensor() {
        let m = GroupModel::<Rational>::cyclic(3);
        let p = singleton_partition(&m).unwrap();
        let w = w_exact(&p, &m, &CompactWindow::whole_group()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expect = if (i + j) % 3 == k { r(1, 9) } else { r(0, 1) };
                    assert_eq!(*w.get(i, j, k), expect);
                }
            }
        }
        let sums = line_sums(&w);
        assert!(sums.over_i.iter().chain(&sums.over_j).chain(&sums.over_k).all(|x| *x == r(1, 9)));
    }

    #[test]
    fn single_cell_has_total_mass() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 1).unwrap();
        let w = w_exact(&p, &m, &CompactWindow::whole_group()).unwrap();
        assert_eq!(w.entries, vec![r(1, 1)]);
    }

    #[test]
    fn zero_tensor_line_sums() {
        let w = WTensor::<Rational>::zeros(3, TensorMode::Exact);
        let sums = line_sums(&w);
        assert!(sums.over_k.iter().all(|x| *x == r(0, 1)));
    }

    #[test]
    fn torus_support_is_full() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 4).unwrap();
        assert!(support_sets(&p, &m, &CompactWindow::whole_group()).unwrap().is_full());
    }

    #[test]
    fn line_support_by_intervals() {
        let m = GroupModel::<Rational>::real_line();
        let w = CompactWindow::boxed(&m, CellBox::interval(r(-3, 1), r(3, 1)), None).unwrap();
        let p = box_partition(&m, &w, 12).unwrap();
        let s = support_sets(&p, &m, &w).unwrap();
        // cells 5 = [-1/2, 0), 6 = [0, 1/2)
        assert!(s.s.contains(&(5, 6)) && s.s.contains(&(6, 6)));
        // [2.5,3) + [0.5,1) reaches 4
        assert!(!s.s.contains(&(11, 7)));
        // [2.5,3) + [0,0.5) reaches 3.5 > 3
        assert!(!s.s.contains(&(11, 6)));
        assert!(s.s.contains(&(11, 5)));
    }

    #[test]
    fn json_round_trip() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 3).unwrap();
        let w = w_exact(&p, &m, &CompactWindow::whole_group()).unwrap();
        let back = WTensor::<Rational>::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn montecarlo_is_reproducible() {
        let m = GroupModel::<f64>::torus(1);
        let p = lattice_partition(&m, 4).unwrap();
        let a = w_montecarlo(&p, &m, &CompactWindow::whole_group(), 20_000, 3).unwrap();
        let b = w_montecarlo(&p, &m, &CompactWindow::whole_group(), 20_000, 3).unwrap();
        assert_eq!(a, b);
        assert!(w_montecarlo(&p, &m, &CompactWindow::whole_group(), 100, 3).is_err());
    }
}
