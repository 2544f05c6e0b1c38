//! Fine equisize partitions of compact windows.
//!
//! Two routes are provided: exact lattice/box constructions for tori, the
//! line and the affine group, and a flow-based allocator that realizes a
//! prescribed-measure partition subordinate to a cover of an atomized space
//! whenever the Hall–Rado inequalities hold.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::flow::{BoundedFlow, FlowNetwork};
use crate::group::{CellBox, CompactWindow, GroupElement, GroupError, GroupKind, GroupModel, NeighborhoodSpec};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("cell count per axis must be at least 1")]
    InvalidCount,
    #[error("unsupported geometry: {0}")]
    Unsupported(String),
    #[error("cover infeasible: {0}")]
    CoverInfeasible(String),
    #[error("invalid Rado instance: {0}")]
    InvalidInstance(String),
    #[error("Hall condition violated on {subset:?}: union measure {union_measure} < target sum {target_sum}")]
    HallViolation { subset: Vec<usize>, union_measure: String, target_sum: String },
    #[error("atoms too coarse: cell {cell} has measure {measure}, target {target}, max atom weight {max_atom}")]
    AtomTooCoarse { cell: usize, measure: String, target: String, max_atom: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One cell of a partition.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell<T> {
    /// Half-open coordinate box.
    Box(CellBox<T>),
    /// Set of finite-group elements.
    Elements(Vec<usize>),
    /// Set of atoms of an [`AtomizedSpace`].
    Atoms(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition<T> {
    pub cells: Vec<Cell<T>>,
    pub representatives: Vec<GroupElement<T>>,
    /// Nominal common measure of the cells.
    pub cell_measure: T,
    /// Actual measure of each cell (equal to `cell_measure` for exact
    /// constructions, within one atom of it for allocator output).
    pub measures: Vec<T>,
    /// For each cell a `g` with `cell ⊆ g·U`.
    pub fineness_witness: Vec<GroupElement<T>>,
}

impl<T: Scalar> Partition<T> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_box(&self, i: usize) -> Option<&CellBox<T>> {
        match &self.cells[i] {
            Cell::Box(b) => Some(b),
            _ => None,
        }
    }

    /// Index of the cell containing `g` (linear scan; see [`CellLocator`]).
    pub fn locate(&self, g: &GroupElement<T>, space: Option<&AtomizedSpace<T>>) -> Option<usize> {
        let coords = g.coordinates();
        self.cells.iter().position(|cell| match (cell, g) {
            (Cell::Box(b), _) => b.contains_coords(&coords),
            (Cell::Elements(es), GroupElement::Finite(x)) => es.contains(x),
            (Cell::Atoms(ids), _) => space.is_some_and(|s| {
                ids.iter().any(|&a| match &s.atoms[a].cell {
                    Some(b) => b.contains_coords(&coords),
                    None => s.atoms[a].point == *g,
                })
            }),
            _ => false,
        })
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .enumerate()
            .map(|(id, cell)| {
                let mut obj = json!({
                    "id": id,
                    "representative": self.representatives[id].to_json(),
                    "measure": self.measures[id].to_json(),
                    "witness": self.fineness_witness[id].to_json(),
                });
                match cell {
                    Cell::Box(b) => obj["bounds"] = b.to_json(),
                    Cell::Elements(es) => obj["elements"] = json!(es),
                    Cell::Atoms(ids) => obj["atom_ids"] = json!(ids),
                }
                obj
            })
            .collect();
        json!({ "cell_measure": self.cell_measure.to_json(), "cells": cells })
    }

    pub fn from_json(model: &GroupModel<T>, v: &Value) -> Option<Self> {
        let element = |e: &Value| -> Option<GroupElement<T>> {
            match e {
                Value::Number(n) => model.finite_element(n.as_u64()? as usize).ok(),
                Value::Array(xs) => model.element(xs.iter().map(T::from_json).collect::<Option<_>>()?).ok(),
                _ => None,
            }
        };
        let index_list = |e: &Value| -> Option<Vec<usize>> {
            e.as_array()?.iter().map(|x| x.as_u64().map(|x| x as usize)).collect()
        };
        let mut p = Partition {
            cells: Vec::new(),
            representatives: Vec::new(),
            cell_measure: T::from_json(v.get("cell_measure")?)?,
            measures: Vec::new(),
            fineness_witness: Vec::new(),
        };
        for c in v.get("cells")?.as_array()? {
            let cell = if let Some(b) = c.get("bounds") {
                Cell::Box(CellBox::from_json(b)?)
            } else if let Some(es) = c.get("elements") {
                Cell::Elements(index_list(es)?)
            } else {
                Cell::Atoms(index_list(c.get("atom_ids")?)?)
            };
            p.cells.push(cell);
            p.representatives.push(element(c.get("representative")?)?);
            p.measures.push(T::from_json(c.get("measure")?)?);
            p.fineness_witness.push(element(c.get("witness")?)?);
        }
        Some(p)
    }
}

/// Fast point location for partitions whose box cells form a product grid.
#[derive(Clone, Debug)]
pub struct CellLocator {
    /// Sorted breakpoints per axis.
    breaks: Vec<Vec<f64>>,
    /// Grid multi-index (axis 0 fastest) to cell id.
    cell_of: Vec<Option<usize>>,
    elements: Option<Vec<Option<usize>>>,
}

impl CellLocator {
    pub fn new<T: Scalar>(p: &Partition<T>) -> Option<Self> {
        if p.cells.iter().all(|c| matches!(c, Cell::Elements(_))) {
            let max = p
                .cells
                .iter()
                .flat_map(|c| match c {
                    Cell::Elements(es) => es.clone(),
                    _ => Vec::new(),
                })
                .max()
                .map_or(0, |m| m + 1);
            let mut elements = vec![None; max];
            for (id, c) in p.cells.iter().enumerate() {
                if let Cell::Elements(es) = c {
                    for &e in es {
                        elements[e] = Some(id);
                    }
                }
            }
            return Some(CellLocator { breaks: Vec::new(), cell_of: Vec::new(), elements: Some(elements) });
        }
        let boxes: Vec<&CellBox<T>> = p
            .cells
            .iter()
            .map(|c| match c {
                Cell::Box(b) => Some(b),
                _ => None,
            })
            .collect::<Option<_>>()?;
        let dim = boxes.first()?.dim();
        let mut breaks = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut xs: Vec<f64> = boxes
                .iter()
                .flat_map(|b| [b.lo[a].to_f64_lossy(), b.hi[a].to_f64_lossy()])
                .collect();
            xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            xs.dedup();
            breaks.push(xs);
        }
        let size: usize = breaks.iter().map(|b| b.len() - 1).product();
        let mut cell_of = vec![None; size];
        for (id, b) in boxes.iter().enumerate() {
            let mut flat = 0;
            let mut stride = 1;
            for (a, axis) in breaks.iter().enumerate().take(dim) {
                let lo = b.lo[a].to_f64_lossy();
                let hi = b.hi[a].to_f64_lossy();
                let k = axis.iter().position(|&x| x == lo)?;
                // cells must not span several grid slabs
                if axis[k + 1] != hi {
                    return None;
                }
                flat += k * stride;
                stride *= axis.len() - 1;
            }
            cell_of[flat] = Some(id);
        }
        Some(CellLocator { breaks, cell_of, elements: None })
    }

    /// Cell containing the given coordinates.
    pub fn locate(&self, coords: &[f64]) -> Option<usize> {
        let mut flat = 0;
        let mut stride = 1;
        for (a, x) in coords.iter().enumerate() {
            let b = &self.breaks[a];
            if *x < b[0] || *x >= b[b.len() - 1] {
                return None;
            }
            let k = b.partition_point(|&v| v <= *x) - 1;
            flat += k * stride;
            stride *= b.len() - 1;
        }
        self.cell_of[flat]
    }

    pub fn locate_element(&self, e: usize) -> Option<usize> {
        self.elements.as_ref()?.get(e).copied().flatten()
    }
}

fn grid_cells<T: Scalar>(axes: &[Vec<T>]) -> Vec<CellBox<T>> {
    // axes[a] holds the n_a + 1 breakpoints of axis a; axis 0 varies fastest
    let counts: Vec<usize> = axes.iter().map(|b| b.len() - 1).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut flat| {
            let mut lo = Vec::with_capacity(axes.len());
            let mut hi = Vec::with_capacity(axes.len());
            for (a, &c) in counts.iter().enumerate() {
                let k = flat % c;
                flat /= c;
                lo.push(axes[a][k].clone());
                hi.push(axes[a][k + 1].clone());
            }
            CellBox::new(lo, hi)
        })
        .collect()
}

fn uniform_breaks<T: Scalar>(lo: &T, hi: &T, n: usize) -> Vec<T> {
    let width = hi.clone() - lo.clone();
    (0..=n)
        .map(|k| lo.clone() + width.clone() * T::of_usize(k) / T::of_usize(n))
        .collect()
}

/// Breakpoints splitting `[lo, hi)` into pieces of equal `da / a²` measure.
fn affine_scale_breaks<T: Scalar>(lo: &T, hi: &T, n: usize) -> Vec<T> {
    let inv_lo = T::one() / lo.clone();
    let inv_hi = T::one() / hi.clone();
    let step = (inv_lo.clone() - inv_hi) / T::of_usize(n);
    (0..=n)
        .map(|k| T::one() / (inv_lo.clone() - step.clone() * T::of_usize(k)))
        .collect()
}

fn box_partition_from_cells<T: Scalar>(model: &GroupModel<T>, boxes: Vec<CellBox<T>>) -> Result<Partition<T>, PartitionError> {
    let measures: Vec<T> = boxes.iter().map(|b| model.box_measure(b)).collect();
    let representatives = boxes
        .iter()
        .map(|b| model.element(b.center()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Partition {
        cell_measure: measures[0].clone(),
        measures,
        fineness_witness: representatives.clone(),
        representatives,
        cells: boxes.into_iter().map(Cell::Box).collect(),
    })
}

/// `n^d` half-open boxes of side `1/n` tiling the torus; representatives
/// and fineness witnesses are the box centers.
pub fn lattice_partition<T: Scalar>(model: &GroupModel<T>, n_per_axis: usize) -> Result<Partition<T>, PartitionError> {
    if n_per_axis < 1 {
        return Err(PartitionError::InvalidCount);
    }
    let GroupKind::Torus { dim } = model.kind() else {
        return Err(PartitionError::Unsupported(format!(
            "lattice partitions need a torus, got {}",
            model.kind().name()
        )));
    };
    let axes = vec![uniform_breaks(&T::zero(), &T::one(), n_per_axis); *dim];
    box_partition_from_cells(model, grid_cells(&axes))
}

/// Equal-measure grid partition of a box window: uniform on torus and line
/// axes, uniform in `1/a` on the affine scale axis.
pub fn box_partition<T: Scalar>(
    model: &GroupModel<T>,
    window: &CompactWindow<T>,
    n_per_axis: usize,
) -> Result<Partition<T>, PartitionError> {
    if n_per_axis < 1 {
        return Err(PartitionError::InvalidCount);
    }
    let wbox = window
        .outer_box(model)
        .ok_or_else(|| PartitionError::Unsupported("box partitions need a box window".into()))?;
    let axes: Vec<Vec<T>> = (0..wbox.dim())
        .map(|a| match (model.kind(), a) {
            (GroupKind::AffineLine, 0) => affine_scale_breaks(&wbox.lo[0], &wbox.hi[0], n_per_axis),
            _ => uniform_breaks(&wbox.lo[a], &wbox.hi[a], n_per_axis),
        })
        .collect();
    box_partition_from_cells(model, grid_cells(&axes))
}

/// Partition of a finite group into singletons.
pub fn singleton_partition<T: Scalar>(model: &GroupModel<T>) -> Result<Partition<T>, PartitionError> {
    let GroupKind::Finite(table) = model.kind() else {
        return Err(PartitionError::Unsupported("singleton partitions need a finite group".into()));
    };
    let n = table.order();
    let reps: Vec<GroupElement<T>> = (0..n).map(GroupElement::Finite).collect();
    Ok(Partition {
        cells: (0..n).map(|i| Cell::Elements(vec![i])).collect(),
        cell_measure: model.elements_measure(&[0]),
        measures: vec![model.elements_measure(&[0]); n],
        fineness_witness: reps.clone(),
        representatives: reps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub point: GroupElement<T>,
    pub weight: T,
    /// Region of the window the atom stands for, when known.
    pub cell: Option<CellBox<T>>,
}

/// Finite stand-in for a non-atomic measure space.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomizedSpace<T> {
    pub atoms: Vec<Atom<T>>,
    /// Upper bound on the coordinate width of every atom cell.
    pub resolution: T,
}

impl<T: Scalar> AtomizedSpace<T> {
    pub fn total_weight(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.weight.clone())
    }

    pub fn max_weight(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| T::max_of(acc, a.weight.clone()))
    }

    pub fn measure_of(&self, ids: impl IntoIterator<Item = usize>) -> T {
        ids.into_iter().fold(T::zero(), |acc, i| acc + self.atoms[i].weight.clone())
    }

    /// Atoms from explicit weights, without geometry.
    pub fn from_weights(points: Vec<GroupElement<T>>, weights: Vec<T>, resolution: T) -> Self {
        let atoms = points
            .into_iter()
            .zip(weights)
            .map(|(point, weight)| Atom { point, weight, cell: None })
            .collect();
        AtomizedSpace { atoms, resolution }
    }
}

/// Grid atoms of a box window, `atoms_per_axis` per axis, weighted by Haar
/// measure and located at the grid-cell centers.
pub fn atomize<T: Scalar>(
    model: &GroupModel<T>,
    window: &CompactWindow<T>,
    atoms_per_axis: usize,
) -> Result<AtomizedSpace<T>, PartitionError> {
    if atoms_per_axis < 1 {
        return Err(PartitionError::InvalidCount);
    }
    let grid = box_partition(model, window, atoms_per_axis)?;
    let mut resolution = T::zero();
    let atoms = grid
        .cells
        .into_iter()
        .zip(grid.representatives)
        .zip(grid.measures)
        .map(|((cell, point), weight)| {
            let Cell::Box(b) = cell else { unreachable!("box partition") };
            for w in b.widths() {
                resolution = T::max_of(resolution.clone(), w);
            }
            Atom { point, weight, cell: Some(b) }
        })
        .collect();
    Ok(AtomizedSpace { atoms, resolution })
}

/// Cover sets `S_i` (atom ids) with target measures `ε_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadoInstance<T> {
    pub cover_sets: Vec<Vec<usize>>,
    pub targets: Vec<T>,
    /// Optional translates `h_i` with `S_i ⊆ h_i·U`, used as fineness witnesses.
    pub centers: Vec<GroupElement<T>>,
}

impl<T: Scalar> RadoInstance<T> {
    pub fn new(cover_sets: Vec<Vec<usize>>, targets: Vec<T>) -> Self {
        RadoInstance { cover_sets, targets, centers: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `μ(∪_{i∈I} S_i) - Σ_{i∈I} ε_i`; negative means the Hall condition fails on `I`.
    pub fn hall_slack(&self, space: &AtomizedSpace<T>, subset: &[usize]) -> T {
        let union: BTreeSet<usize> = subset.iter().flat_map(|&i| self.cover_sets[i].iter().copied()).collect();
        let target = subset.iter().fold(T::zero(), |acc, &i| acc + self.targets[i].clone());
        space.measure_of(union) - target
    }

    /// Exhaustive Hall check over all `2^n` subsets; returns a violating
    /// subset if any. Intended for `n ≤ 20`.
    pub fn hall_violation_exhaustive(&self, space: &AtomizedSpace<T>) -> Option<Vec<usize>> {
        let n = self.len();
        assert!(n <= 20, "exhaustive Hall check is exponential");
        (1u32..(1 << n)).find_map(|mask| {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            self.hall_slack(space, &subset).is_negative().then_some(subset)
        })
    }
}

/// Centers, atoms and Rado instance produced by [`build_cover`].
#[derive(Clone, Debug)]
pub struct Cover<T> {
    pub centers: Vec<GroupElement<T>>,
    pub space: AtomizedSpace<T>,
    pub instance: RadoInstance<T>,
}

fn ceil_usize<T: Scalar>(x: T) -> usize {
    let c = -((-x).floor_value());
    c.to_usize().unwrap_or(0).max(1)
}

/// Lattice of translates `h·U` covering the window, with the Rado instance
/// `S_h = {atoms inside h·U}`, `ε_h = μ(window)/|H|`.
///
/// Translates are spaced by the radius of `U` (anchored at the identity on
/// tori, centered in line windows); a window that already fits in one
/// translate gets a single center.
pub fn build_cover<T: Scalar>(
    model: &GroupModel<T>,
    window: &CompactWindow<T>,
    u: &NeighborhoodSpec<T>,
    atoms_per_axis: usize,
) -> Result<Cover<T>, PartitionError> {
    if !matches!(model.kind(), GroupKind::Torus { .. } | GroupKind::RealLine) {
        return Err(PartitionError::Unsupported(format!("covers for {}", model.kind().name())));
    }
    let wbox = window
        .outer_box(model)
        .ok_or_else(|| PartitionError::Unsupported("covers need a box window".into()))?;
    let space = atomize(model, window, atoms_per_axis)?;
    let radius = u.radius().clone();

    let center = model.element(wbox.center())?;
    let centers: Vec<GroupElement<T>> = if model.box_in_ball(&wbox, &center, &radius) {
        vec![center]
    } else {
        let torus = matches!(model.kind(), GroupKind::Torus { .. });
        let axes: Vec<Vec<T>> = (0..wbox.dim())
            .map(|a| {
                let len = wbox.hi[a].clone() - wbox.lo[a].clone();
                let m = ceil_usize(len.clone() / radius.clone());
                let step = len / T::of_usize(m);
                (0..m)
                    .map(|k| {
                        let offset = if torus { T::zero() } else { step.clone() * T::half() };
                        wbox.lo[a].clone() + offset + step.clone() * T::of_usize(k)
                    })
                    .collect()
            })
            .collect();
        grid_points(&axes)
            .into_iter()
            .map(|c| model.element(c))
            .collect::<Result<_, _>>()?
    };

    let cover_sets: Vec<Vec<usize>> = centers
        .iter()
        .map(|h| {
            space
                .atoms
                .iter()
                .enumerate()
                .filter(|(_, atom)| atom.cell.as_ref().is_some_and(|b| model.box_in_ball(b, h, &radius)))
                .map(|(id, _)| id)
                .collect()
        })
        .collect();
    let mut covered = vec![false; space.atoms.len()];
    for &a in cover_sets.iter().flatten() {
        covered[a] = true;
    }
    if let Some(a) = covered.iter().position(|c| !c) {
        return Err(PartitionError::CoverInfeasible(format!(
            "atom {a} at {} lies in no translate; refine the resolution",
            space.atoms[a].point
        )));
    }
    let target = space.total_weight() / T::of_usize(centers.len());
    let instance = RadoInstance {
        cover_sets,
        targets: vec![target; centers.len()],
        centers: centers.clone(),
    };

    // singletons and the full set exactly, intermediate subsets by sampling
    let n = instance.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut subsets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    subsets.push((0..n).collect());
    let mut ids: Vec<usize> = (0..n).collect();
    for _ in 0..64 {
        ids.shuffle(&mut rng);
        let k = rng.gen_range(1..=n);
        let mut s = ids[..k].to_vec();
        s.sort_unstable();
        subsets.push(s);
    }
    for s in subsets {
        if instance.hall_slack(&space, &s).is_negative() {
            return Err(PartitionError::CoverInfeasible(format!("Hall condition fails on {s:?}")));
        }
    }
    Ok(Cover { centers, space, instance })
}

fn grid_points<T: Scalar>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    let total: usize = axes.iter().map(Vec::len).product();
    (0..total)
        .map(|mut flat| {
            axes.iter()
                .map(|pts| {
                    let k = flat % pts.len();
                    flat /= pts.len();
                    pts[k].clone()
                })
                .collect()
        })
        .collect()
}

/// Splits the atoms into cells `P_i ⊆ S_i` with `|μ(P_i) - ε_i| ≤ max atom weight`.
///
/// A max-flow (source → set `i` with capacity `ε_i`, set → its atoms, atom →
/// sink with the atom weight) yields a fractional allocation; a saturated
/// flow exists iff the Hall inequalities hold, and a min cut otherwise
/// exhibits a violating subset. The fractional allocation is then rounded
/// by slot matching: each set's atoms, heaviest first, are packed into unit
/// slots and atoms are matched integrally to slots, every full slot
/// receiving exactly one atom. Ties go to the lowest atom index.
pub fn rado_allocate<T: Scalar>(space: &AtomizedSpace<T>, inst: &RadoInstance<T>) -> Result<Partition<T>, PartitionError> {
    let n = inst.len();
    let n_atoms = space.atoms.len();
    if inst.cover_sets.len() != n {
        return Err(PartitionError::InvalidInstance("cover sets and targets differ in length".into()));
    }
    if n == 0 {
        return Err(PartitionError::InvalidInstance("no cover sets".into()));
    }
    if let Some(&bad) = inst.cover_sets.iter().flatten().find(|&&a| a >= n_atoms) {
        return Err(PartitionError::InvalidInstance(format!("atom id {bad} out of range")));
    }
    let total = space.total_weight();
    let target_sum = inst.targets.iter().fold(T::zero(), |acc, e| acc + e.clone());
    if target_sum != total {
        return Err(PartitionError::InvalidInstance(format!(
            "targets sum to {target_sum}, space has measure {total}"
        )));
    }

    let (source, sink) = (0, 1 + n + n_atoms);
    let mut net = FlowNetwork::<T>::new(n_atoms + n + 2);
    for (i, eps) in inst.targets.iter().enumerate() {
        net.add_edge(source, 1 + i, eps.clone());
    }
    let mut pieces: Vec<Vec<(usize, crate::flow::EdgeId)>> = vec![Vec::new(); n];
    for (i, set) in inst.cover_sets.iter().enumerate() {
        let mut atoms = set.clone();
        atoms.sort_unstable();
        atoms.dedup();
        for a in atoms {
            let e = net.add_edge(1 + i, 1 + n + a, space.atoms[a].weight.clone());
            pieces[i].push((a, e));
        }
    }
    for (a, atom) in space.atoms.iter().enumerate() {
        net.add_edge(1 + n + a, sink, atom.weight.clone());
    }
    let value = net.max_flow(source, sink);
    if value < target_sum {
        let reach = net.residual_reachable(source);
        let subset: Vec<usize> = (0..n).filter(|&i| reach[1 + i]).collect();
        let union: BTreeSet<usize> = subset.iter().flat_map(|&i| inst.cover_sets[i].iter().copied()).collect();
        let sum = subset.iter().fold(T::zero(), |acc, &i| acc + inst.targets[i].clone());
        return Err(PartitionError::HallViolation {
            subset,
            union_measure: space.measure_of(union).to_string(),
            target_sum: sum.to_string(),
        });
    }

    // slot packing per set
    let mut slot_owner: Vec<usize> = Vec::new();
    let mut slot_full: Vec<bool> = Vec::new();
    let mut atom_slot_edges: Vec<(usize, usize)> = Vec::new();
    for (i, list) in pieces.iter().enumerate() {
        let mut fractional: Vec<(usize, T)> = list
            .iter()
            .filter_map(|&(a, e)| {
                let f = net.flow(e);
                f.is_positive().then(|| (a, f / space.atoms[a].weight.clone()))
            })
            .collect();
        fractional.sort_by(|(a, _), (b, _)| {
            space.atoms[*b]
                .weight
                .partial_cmp(&space.atoms[*a].weight)
                .unwrap()
                .then(a.cmp(b))
        });
        let mut fill = T::zero();
        let mut slot: Option<usize> = None;
        for (a, mut mass) in fractional {
            while mass.is_positive() {
                let s = match slot {
                    Some(s) if fill < T::one() => s,
                    _ => {
                        slot_owner.push(i);
                        slot_full.push(false);
                        fill = T::zero();
                        let s = slot_owner.len() - 1;
                        slot = Some(s);
                        s
                    }
                };
                let room = T::one() - fill.clone();
                let take = T::min_of(room, mass.clone());
                fill = fill + take.clone();
                mass = mass - take;
                atom_slot_edges.push((a, s));
                if fill >= T::one() {
                    slot_full[s] = true;
                }
            }
        }
    }

    let n_slots = slot_owner.len();
    let (src, snk) = (0, 1 + n_atoms + n_slots);
    let mut bounded = BoundedFlow::new(snk + 1);
    for a in 0..n_atoms {
        bounded.add_edge(src, 1 + a, 1, 1);
    }
    let first_pair = n_atoms;
    for &(a, s) in &atom_slot_edges {
        bounded.add_edge(1 + a, 1 + n_atoms + s, 0, 1);
    }
    for (s, &full) in slot_full.iter().enumerate() {
        bounded.add_edge(1 + n_atoms + s, snk, i64::from(full), 1);
    }
    let flows = bounded
        .solve(src, snk)
        .expect("fractional slot matching exists, so an integral one does too");

    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(a, s)) in atom_slot_edges.iter().enumerate() {
        if flows[first_pair + k] == 1 {
            cells[slot_owner[s]].push(a);
        }
    }

    let max_atom = space.max_weight();
    let mut measures = Vec::with_capacity(n);
    let mut representatives = Vec::with_capacity(n);
    for (i, cell) in cells.iter_mut().enumerate() {
        cell.sort_unstable();
        let measure = space.measure_of(cell.iter().copied());
        let deviation = (measure.clone() - inst.targets[i].clone()).abs();
        if cell.is_empty() || deviation > max_atom {
            return Err(PartitionError::AtomTooCoarse {
                cell: i,
                measure: measure.to_string(),
                target: inst.targets[i].to_string(),
                max_atom: max_atom.to_string(),
            });
        }
        representatives.push(space.atoms[cell[0]].point.clone());
        measures.push(measure);
    }
    let witnesses = if inst.centers.len() == n { inst.centers.clone() } else { representatives.clone() };
    Ok(Partition {
        cells: cells.into_iter().map(Cell::Atoms).collect(),
        representatives,
        cell_measure: inst.targets[0].clone(),
        measures,
        fineness_witness: witnesses,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport<T> {
    pub disjoint: bool,
    /// Every cell lies in the `U`-translate named by its witness.
    pub fine: bool,
    pub equisize: bool,
    /// `max_i |μ(P_i) - cell_measure|`.
    pub max_deviation: T,
    pub representatives_inside: bool,
    pub total_measure: T,
}

/// Checks disjointness, fineness and equal measure of a partition.
pub fn verify_partition<T: Scalar>(
    p: &Partition<T>,
    u: &NeighborhoodSpec<T>,
    model: &GroupModel<T>,
    space: Option<&AtomizedSpace<T>>,
) -> PartitionReport<T> {
    let radius = u.radius();
    let mut disjoint = true;
    let mut seen_ids = BTreeSet::new();
    for (i, cell) in p.cells.iter().enumerate() {
        match cell {
            Cell::Box(b) => {
                for other in &p.cells[i + 1..] {
                    if let Cell::Box(c) = other {
                        disjoint &= !b.interiors_meet(c);
                    }
                }
            }
            Cell::Elements(ids) | Cell::Atoms(ids) => {
                for &x in ids {
                    disjoint &= seen_ids.insert(x);
                }
            }
        }
    }
    let fine = p.cells.iter().zip(&p.fineness_witness).all(|(cell, g)| match cell {
        Cell::Box(b) => model.box_in_ball(b, g, radius),
        Cell::Elements(es) => match g {
            GroupElement::Finite(c) => model.elements_in_ball(es, *c, radius),
            _ => false,
        },
        Cell::Atoms(ids) => space.is_some_and(|s| {
            ids.iter().all(|&a| match &s.atoms[a].cell {
                Some(b) => model.box_in_ball(b, g, radius),
                None => model.dist(g, &s.atoms[a].point).is_ok_and(|d| d <= *radius),
            })
        }),
    });
    let max_deviation = p
        .measures
        .iter()
        .map(|m| (m.clone() - p.cell_measure.clone()).abs())
        .fold(T::zero(), T::max_of);
    let representatives_inside = p
        .representatives
        .iter()
        .enumerate()
        .all(|(i, r)| match &p.cells[i] {
            Cell::Atoms(ids) => space.is_some_and(|s| ids.iter().any(|&a| s.atoms[a].point == *r)),
            _ => p.locate(r, space) == Some(i),
        });
    PartitionReport {
        disjoint,
        fine,
        equisize: max_deviation.is_zero(),
        max_deviation,
        representatives_inside,
        total_measure: p.measures.iter().fold(T::zero(), |acc, m| acc + m.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Signed;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn torus_lattice_examples() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 4).unwrap();
        assert_eq!(p.len(), 4);
        for (k, cell) in p.cells.iter().enumerate() {
            let Cell::Box(b) = cell else { panic!() };
            assert_eq!(b.lo[0], r(k as i64, 4));
            assert_eq!(b.hi[0], r(k as i64 + 1, 4));
        }
        assert!(p.measures.iter().all(|x| *x == r(1, 4)));

        let t2 = GroupModel::<Rational>::torus(2);
        let p2 = lattice_partition(&t2, 2).unwrap();
        assert_eq!(p2.len(), 4);
        assert!(p2.measures.iter().all(|x| *x == r(1, 4)));
        assert!(matches!(lattice_partition(&m, 0), Err(PartitionError::InvalidCount)));
        assert!(lattice_partition(&GroupModel::<Rational>::real_line(), 2).is_err());
    }

    #[test]
    fn degenerate_single_cell() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 1).unwrap();
        let fine = |rad| verify_partition(&p, &NeighborhoodSpec::new(rad).unwrap(), &m, None).fine;
        assert!(fine(r(1, 2)));
        assert!(!fine(r(1, 3)));
    }

    #[test]
    fn verify_lattice_fineness() {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, 4).unwrap();
        let rep = verify_partition(&p, &NeighborhoodSpec::new(r(1, 4)).unwrap(), &m, None);
        assert!(rep.fine && rep.disjoint && rep.equisize && rep.representatives_inside);
        assert_eq!(rep.max_deviation, r(0, 1));
        assert_eq!(rep.total_measure, r(1, 1));
        let coarse = verify_partition(&p, &NeighborhoodSpec::new(r(1, 16)).unwrap(), &m, None);
        assert!(!coarse.fine);
    }

    #[test]
    fn fineness_whenever_radius_at_least_side() {
        for d in 1..=2 {
            let m = GroupModel::<Rational>::torus(d);
            for n in 1..=6 {
                let p = lattice_partition(&m, n).unwrap();
                let u = NeighborhoodSpec::new(r(1, n as i64)).unwrap();
                assert!(verify_partition(&p, &u, &m, None).fine, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn affine_box_partition_is_equisize() {
        let m = GroupModel::<Rational>::affine_line();
        let w = CompactWindow::boxed(&m, CellBox::new(vec![r(1, 2), r(-1, 1)], vec![r(2, 1), r(1, 1)]), None).unwrap();
        let p = box_partition(&m, &w, 3).unwrap();
        assert_eq!(p.len(), 9);
        assert!(p.measures.iter().all(|x| *x == r(1, 3)));
        let Cell::Box(b) = &p.cells[1] else { panic!() };
        assert_eq!(b.lo[0], r(2, 3));
        assert_eq!(b.hi[0], r(1, 1));
    }

    #[test]
    fn cover_on_circle() {
        let m = GroupModel::<Rational>::torus(1);
        let u = NeighborhoodSpec::new(r(1, 8)).unwrap();
        let cover = build_cover(&m, &CompactWindow::whole_group(), &u, 128).unwrap();
        assert_eq!(cover.centers.len(), 8);
        for (k, c) in cover.centers.iter().enumerate() {
            assert_eq!(*c, GroupElement::Torus(vec![r(k as i64, 8)]));
        }
        assert!(cover.instance.targets.iter().all(|e| *e == r(1, 8)));
        // independent check: each arc holds 32 atoms, consecutive unions grow by 1/8
        for set in &cover.instance.cover_sets {
            assert_eq!(set.len(), 32);
        }
        assert!(cover.instance.hall_violation_exhaustive(&cover.space).is_none());
    }

    #[test]
    fn cover_on_line() {
        let m = GroupModel::<Rational>::real_line();
        let w = CompactWindow::boxed(&m, CellBox::interval(r(-3, 1), r(3, 1)), None).unwrap();
        let u = NeighborhoodSpec::new(r(1, 2)).unwrap();
        let cover = build_cover(&m, &w, &u, 96).unwrap();
        assert_eq!(cover.centers.len(), 12);
        assert!(cover.instance.targets.iter().all(|e| *e == r(1, 2)));
        assert!(cover.instance.hall_violation_exhaustive(&cover.space).is_none());
    }

    #[test]
    fn cover_single_translate() {
        let m = GroupModel::<Rational>::real_line();
        let w = CompactWindow::boxed(&m, CellBox::interval(r(-1, 2), r(1, 2)), None).unwrap();
        let u = NeighborhoodSpec::new(r(1, 2)).unwrap();
        let cover = build_cover(&m, &w, &u, 8).unwrap();
        assert_eq!(cover.centers, vec![GroupElement::Line(r(0, 1))]);
        assert_eq!(cover.instance.targets, vec![r(1, 1)]);
    }

    #[test]
    fn allocate_circle_cover() {
        let m = GroupModel::<Rational>::torus(1);
        let u = NeighborhoodSpec::new(r(1, 8)).unwrap();
        let cover = build_cover(&m, &CompactWindow::whole_group(), &u, 128).unwrap();
        let p = rado_allocate(&cover.space, &cover.instance).unwrap();
        assert_eq!(p.len(), 8);
        for (i, cell) in p.cells.iter().enumerate() {
            let Cell::Atoms(ids) = cell else { panic!() };
            assert!(ids.iter().all(|a| cover.instance.cover_sets[i].contains(a)));
            assert!((p.measures[i].clone() - r(1, 8)).abs() <= r(1, 128));
        }
        let rep = verify_partition(&p, &u, &m, Some(&cover.space));
        assert!(rep.disjoint && rep.fine && rep.representatives_inside);
        assert!(rep.max_deviation <= r(1, 128));
        assert_eq!(rep.total_measure, r(1, 1));
    }

    #[test]
    fn disjoint_sets_are_forced() {
        let pts: Vec<GroupElement<Rational>> = (0..4).map(|k| GroupElement::Line(r(k, 1))).collect();
        let space = AtomizedSpace::from_weights(pts, vec![r(1, 4); 4], r(1, 1));
        let inst = RadoInstance::new(vec![vec![0, 1], vec![2, 3]], vec![r(1, 2), r(1, 2)]);
        let p = rado_allocate(&space, &inst).unwrap();
        assert_eq!(p.cells, vec![Cell::Atoms(vec![0, 1]), Cell::Atoms(vec![2, 3])]);
    }

    #[test]
    fn single_heavy_atom_is_too_coarse() {
        let space = AtomizedSpace::from_weights(vec![GroupElement::Line(r(0, 1))], vec![r(1, 1)], r(1, 1));
        let inst = RadoInstance::new(vec![vec![0], vec![0]], vec![r(1, 2), r(1, 2)]);
        assert!(inst.hall_violation_exhaustive(&space).is_none());
        assert!(matches!(rado_allocate(&space, &inst), Err(PartitionError::AtomTooCoarse { .. })));
    }

    #[test]
    fn hall_violation_names_subset() {
        let pts: Vec<GroupElement<Rational>> = (0..4).map(|k| GroupElement::Line(r(k, 1))).collect();
        let space = AtomizedSpace::from_weights(pts, vec![r(1, 4); 4], r(1, 1));
        // sets 0 and 1 share one atom but want 1/4 + 1/4... plus set 2 wants the rest
        let inst = RadoInstance::new(vec![vec![0], vec![0], vec![1, 2, 3]], vec![r(1, 4), r(1, 4), r(1, 2)]);
        match rado_allocate(&space, &inst) {
            Err(PartitionError::HallViolation { subset, .. }) => {
                assert_eq!(subset, vec![0, 1]);
                assert!(inst.hall_slack(&space, &subset).is_negative());
            }
            other => panic!("expected Hall violation, got {other:?}"),
        }
    }

    #[test]
    fn partition_json_round_trip() {
        let m = GroupModel::<Rational>::torus(2);
        let p = lattice_partition(&m, 2).unwrap();
        let back = Partition::from_json(&m, &p.to_json()).unwrap();
        assert_eq!(back, p);
        let z = GroupModel::<Rational>::cyclic(3);
        let s = singleton_partition(&z).unwrap();
        assert_eq!(Partition::from_json(&z, &s.to_json()).unwrap(), s);
    }

    #[test]
    fn locator_matches_linear_scan() {
        let m = GroupModel::<Rational>::affine_line();
        let w = CompactWindow::boxed(&m, CellBox::new(vec![r(1, 2), r(-1, 1)], vec![r(2, 1), r(1, 1)]), None).unwrap();
        let p = box_partition(&m, &w, 3).unwrap();
        let loc = CellLocator::new(&p).unwrap();
        for a in 0..40 {
            for b in 0..40 {
                let g = m.element(vec![r(1, 2) + r(3 * a, 80), r(-1, 1) + r(2 * b, 40)]).unwrap();
                let coords: Vec<f64> = g.coordinates().iter().map(|x| x.to_f64_lossy()).collect();
                assert_eq!(loc.locate(&coords), p.locate(&g, None));
            }
        }
    }
}
