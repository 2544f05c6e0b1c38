//! Concrete groups with their Haar measures: tori, finite groups given by a
//! Cayley table, the real line, and the affine group `x ↦ ax + b` of the line.
//!
//! Continuous groups expose coordinates so that cells can be described as
//! half-open boxes. Torus coordinates live in `[0, 1)` per axis, affine
//! coordinates are `(scale, shift)` with `scale > 0`.

use std::fmt;
use std::marker::PhantomData;

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("element of kind {found} used with a {expected} model")]
    KindMismatch { expected: String, found: String },
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid neighborhood: {0}")]
    InvalidNeighborhood(String),
}

/// Multiplication table of a finite group, rows indexed by the left factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
}

impl CayleyTable {
    /// Validates the group axioms (closure, identity, inverses, associativity).
    pub fn new(order: usize, table: Vec<usize>) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::InvalidTable("empty group".into()));
        }
        if table.len() != order * order {
            return Err(GroupError::InvalidTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= order) {
            return Err(GroupError::InvalidTable(format!("entry {bad} out of range")));
        }
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| GroupError::InvalidTable(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::InvalidTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(CayleyTable { order, table, identity, inverses })
    }

    /// The cyclic group `Z_n` with elements `0..n` under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|idx| (idx / n + idx % n) % n).collect();
        CayleyTable::new(n, table).expect("cyclic table is a group")
    }

    /// The symmetric group on `k` letters. Elements are permutations listed
    /// lexicographically (element 0 is the identity); `p·q` applies `q` first.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index_of = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
        let order = perms.len();
        let mut table = Vec::with_capacity(order * order);
        for p in &perms {
            for q in &perms {
                let composed: Vec<usize> = (0..k).map(|x| p[q[x]]).collect();
                table.push(index_of(&composed));
            }
        }
        CayleyTable::new(order, table).expect("symmetric table is a group")
    }

    /// Parses a row-major, 0-indexed CSV table.
    pub fn from_csv(text: &str) -> Result<Self, GroupError> {
        let mut table = Vec::new();
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            rows += 1;
            for field in line.split(',') {
                let v: usize = field.trim().parse().map_err(|_| {
                    GroupError::InvalidTable(format!("line {}: bad entry {field:?}", lineno + 1))
                })?;
                table.push(v);
            }
        }
        CayleyTable::new(rows, table)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.table.chunks(self.order) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Torus { dim: usize },
    Finite(CayleyTable),
    RealLine,
    AffineLine,
}

impl GroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::Torus { .. } => "torus",
            GroupKind::Finite(_) => "finite",
            GroupKind::RealLine => "real_line",
            GroupKind::AffineLine => "affine_line",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement<T> {
    Torus(Vec<T>),
    Finite(usize),
    Line(T),
    Affine { scale: T, shift: T },
}

impl<T: Scalar> GroupElement<T> {
    fn kind_name(&self) -> &'static str {
        match self {
            GroupElement::Torus(_) => "torus",
            GroupElement::Finite(_) => "finite",
            GroupElement::Line(_) => "real_line",
            GroupElement::Affine { .. } => "affine_line",
        }
    }

    /// Continuous coordinates (empty for finite elements).
    pub fn coordinates(&self) -> Vec<T> {
        match self {
            GroupElement::Torus(c) => c.clone(),
            GroupElement::Finite(_) => Vec::new(),
            GroupElement::Line(x) => vec![x.clone()],
            GroupElement::Affine { scale, shift } => vec![scale.clone(), shift.clone()],
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GroupElement::Finite(i) => json!(i),
            other => Value::Array(other.coordinates().iter().map(Scalar::to_json).collect()),
        }
    }
}

impl<T: Scalar> fmt::Display for GroupElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Finite(i) => write!(f, "#{i}"),
            GroupElement::Line(x) => write!(f, "{x}"),
            GroupElement::Affine { scale, shift } => write!(f, "({scale}, {shift})"),
            GroupElement::Torus(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

/// Half-open box `[lo, hi)` in group coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CellBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> CellBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        CellBox { lo, hi }
    }

    pub fn interval(lo: T, hi: T) -> Self {
        CellBox { lo: vec![lo], hi: vec![hi] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn widths(&self) -> Vec<T> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h.clone() - l.clone()).collect()
    }

    pub fn center(&self) -> Vec<T> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (l.clone() + h.clone()) * T::half())
            .collect()
    }

    pub fn contains_coords(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| l <= v && v < h)
    }

    /// Closed-hull containment `[lo, hi] ⊆ [other.lo, other.hi]`.
    pub fn within(&self, other: &CellBox<T>) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|a| self.lo[a] >= other.lo[a] && self.hi[a] <= other.hi[a])
    }

    /// Whether the open interiors intersect.
    pub fn interiors_meet(&self, other: &CellBox<T>) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|a| self.lo[a] < other.hi[a] && other.lo[a] < self.hi[a])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lo": self.lo.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "hi": self.hi.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let parse = |key: &str| -> Option<Vec<T>> {
            v.get(key)?.as_array()?.iter().map(T::from_json).collect()
        };
        let lo = parse("lo")?;
        let hi = parse("hi")?;
        (lo.len() == hi.len()).then_some(CellBox { lo, hi })
    }
}

/// Closed metric ball `{g : dist(e, g) ≤ radius}` around the identity.
///
/// All metrics used here satisfy `dist(e, g) = dist(e, g⁻¹)`, so the ball is
/// symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodSpec<T> {
    radius: T,
}

impl<T: Scalar> NeighborhoodSpec<T> {
    pub fn new(radius: T) -> Result<Self, GroupError> {
        if radius.is_positive() {
            Ok(NeighborhoodSpec { radius })
        } else {
            Err(GroupError::InvalidNeighborhood(format!("radius {radius} must be positive")))
        }
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    pub fn symmetric(&self) -> bool {
        true
    }

    pub fn contains(&self, model: &GroupModel<T>, g: &GroupElement<T>) -> Result<bool, GroupError> {
        Ok(model.dist(&model.identity(), g)? <= self.radius)
    }
}

/// A compact set `C` together with an inner target `B ⊆ C`.
///
/// `outer == None` means the whole (compact) group.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactWindow<T> {
    pub outer: Option<CellBox<T>>,
    pub inner: Option<CellBox<T>>,
}

impl<T: Scalar> CompactWindow<T> {
    pub fn whole_group() -> Self {
        CompactWindow { outer: None, inner: None }
    }

    pub fn boxed(model: &GroupModel<T>, outer: CellBox<T>, inner: Option<CellBox<T>>) -> Result<Self, GroupError> {
        if outer.dim() != model.dim() {
            return Err(GroupError::InvalidWindow(format!(
                "window has {} axes, model has {}",
                outer.dim(),
                model.dim()
            )));
        }
        if outer.lo.iter().zip(&outer.hi).any(|(l, h)| l >= h) {
            return Err(GroupError::InvalidWindow("empty window".into()));
        }
        if let GroupKind::AffineLine = model.kind() {
            if !outer.lo[0].is_positive() {
                return Err(GroupError::InvalidWindow("affine scale must stay positive".into()));
            }
        }
        if let GroupKind::Torus { .. } = model.kind() {
            let ok = outer.lo.iter().zip(&outer.hi).all(|(l, h)| !l.is_negative() && *h <= T::one());
            if !ok {
                return Err(GroupError::InvalidWindow("torus windows must lie in [0, 1)".into()));
            }
        }
        if let Some(b) = &inner {
            if !b.within(&outer) {
                return Err(GroupError::InvalidWindow("inner target not contained in window".into()));
            }
        }
        Ok(CompactWindow { outer: Some(outer), inner })
    }

    pub fn measure(&self, model: &GroupModel<T>) -> T {
        match &self.outer {
            Some(b) => model.box_measure(b),
            None => T::one(),
        }
    }

    /// Box describing the window, using `[0,1)^d` for the whole torus.
    pub fn outer_box(&self, model: &GroupModel<T>) -> Option<CellBox<T>> {
        match (&self.outer, model.kind()) {
            (Some(b), _) => Some(b.clone()),
            (None, GroupKind::Torus { dim }) => {
                Some(CellBox::new(vec![T::zero(); *dim], vec![T::one(); *dim]))
            }
            _ => None,
        }
    }
}

/// A group together with its metric and Haar measure.
///
/// * torus: Lebesgue measure on `[0,1)^d`, max-of-circle-distances metric;
/// * finite: normalized counting measure, discrete metric;
/// * real line: Lebesgue measure, `|x - y|`;
/// * affine line: left Haar measure `da db / a²`, the hyperbolic metric of
///   the upper half plane (`(a, b) ↦ b + ia`), which is left invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupModel<T> {
    kind: GroupKind,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> GroupModel<T> {
    pub fn new(kind: GroupKind) -> Self {
        GroupModel { kind, _scalar: PhantomData }
    }

    pub fn torus(dim: usize) -> Self {
        assert!(dim >= 1, "torus dimension must be positive");
        Self::new(GroupKind::Torus { dim })
    }

    pub fn finite(table: CayleyTable) -> Self {
        Self::new(GroupKind::Finite(table))
    }

    pub fn cyclic(n: usize) -> Self {
        Self::finite(CayleyTable::cyclic(n))
    }

    pub fn real_line() -> Self {
        Self::new(GroupKind::RealLine)
    }

    pub fn affine_line() -> Self {
        Self::new(GroupKind::AffineLine)
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// Number of continuous coordinates.
    pub fn dim(&self) -> usize {
        match &self.kind {
            GroupKind::Torus { dim } => *dim,
            GroupKind::Finite(_) => 0,
            GroupKind::RealLine => 1,
            GroupKind::AffineLine => 2,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, GroupKind::Torus { .. } | GroupKind::Finite(_))
    }

    pub fn is_unimodular(&self) -> bool {
        !matches!(self.kind, GroupKind::AffineLine)
    }

    pub fn haar_description(&self) -> &'static str {
        match &self.kind {
            GroupKind::Torus { .. } => "normalized Lebesgue",
            GroupKind::Finite(_) => "normalized counting",
            GroupKind::RealLine => "Lebesgue",
            GroupKind::AffineLine => "left Haar da db / a^2",
        }
    }

    pub fn identity(&self) -> GroupElement<T> {
        match &self.kind {
            GroupKind::Torus { dim } => GroupElement::Torus(vec![T::zero(); *dim]),
            GroupKind::Finite(t) => GroupElement::Finite(t.identity()),
            GroupKind::RealLine => GroupElement::Line(T::zero()),
            GroupKind::AffineLine => GroupElement::Affine { scale: T::one(), shift: T::zero() },
        }
    }

    /// Builds an element from coordinates, reducing torus coordinates mod 1.
    pub fn element(&self, coords: Vec<T>) -> Result<GroupElement<T>, GroupError> {
        match &self.kind {
            GroupKind::Torus { dim } => {
                if coords.len() != *dim {
                    return Err(GroupError::InvalidElement(format!(
                        "expected {dim} torus coordinates, got {}",
                        coords.len()
                    )));
                }
                Ok(GroupElement::Torus(coords.iter().map(Scalar::fract_unit).collect()))
            }
            GroupKind::RealLine => match coords.as_slice() {
                [x] => Ok(GroupElement::Line(x.clone())),
                _ => Err(GroupError::InvalidElement("real line elements have one coordinate".into())),
            },
            GroupKind::AffineLine => match coords.as_slice() {
                [a, b] if a.is_positive() => Ok(GroupElement::Affine { scale: a.clone(), shift: b.clone() }),
                [_, _] => Err(GroupError::InvalidElement("affine scale must be positive".into())),
                _ => Err(GroupError::InvalidElement("affine elements have two coordinates".into())),
            },
            GroupKind::Finite(_) => Err(GroupError::InvalidElement(
                "finite elements are indices, use finite_element".into(),
            )),
        }
    }

    pub fn finite_element(&self, index: usize) -> Result<GroupElement<T>, GroupError> {
        match &self.kind {
            GroupKind::Finite(t) if index < t.order() => Ok(GroupElement::Finite(index)),
            GroupKind::Finite(t) => Err(GroupError::InvalidElement(format!(
                "index {index} outside group of order {}",
                t.order()
            ))),
            _ => Err(self.mismatch("finite")),
        }
    }

    /// Checks kind and coordinate invariants.
    pub fn contains(&self, g: &GroupElement<T>) -> bool {
        match (&self.kind, g) {
            (GroupKind::Torus { dim }, GroupElement::Torus(c)) => {
                c.len() == *dim && c.iter().all(|x| !x.is_negative() && *x < T::one())
            }
            (GroupKind::Finite(t), GroupElement::Finite(i)) => *i < t.order(),
            (GroupKind::RealLine, GroupElement::Line(_)) => true,
            (GroupKind::AffineLine, GroupElement::Affine { scale, .. }) => scale.is_positive(),
            _ => false,
        }
    }

    fn mismatch(&self, found: &str) -> GroupError {
        GroupError::KindMismatch { expected: self.kind.name().into(), found: found.into() }
    }

    fn check(&self, g: &GroupElement<T>) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else if g.kind_name() == self.kind.name() {
            Err(GroupError::InvalidElement(format!("{g} violates the {} invariants", self.kind.name())))
        } else {
            Err(self.mismatch(g.kind_name()))
        }
    }

    pub fn mul(&self, g: &GroupElement<T>, h: &GroupElement<T>) -> Result<GroupElement<T>, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (&self.kind, g, h) {
            (GroupKind::Torus { .. }, GroupElement::Torus(a), GroupElement::Torus(b)) => {
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| (x.clone() + y.clone()).fract_unit()).collect())
            }
            (GroupKind::Finite(t), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(t.mul(*a, *b))
            }
            (GroupKind::RealLine, GroupElement::Line(a), GroupElement::Line(b)) => {
                GroupElement::Line(a.clone() + b.clone())
            }
            (
                GroupKind::AffineLine,
                GroupElement::Affine { scale: a, shift: b },
                GroupElement::Affine { scale: c, shift: d },
            ) => GroupElement::Affine {
                scale: a.clone() * c.clone(),
                shift: a.clone() * d.clone() + b.clone(),
            },
            _ => unreachable!("checked above"),
        })
    }

    pub fn inv(&self, g: &GroupElement<T>) -> Result<GroupElement<T>, GroupError> {
        self.check(g)?;
        Ok(match (&self.kind, g) {
            (GroupKind::Torus { .. }, GroupElement::Torus(a)) => {
                GroupElement::Torus(a.iter().map(|x| (-x.clone()).fract_unit()).collect())
            }
            (GroupKind::Finite(t), GroupElement::Finite(a)) => GroupElement::Finite(t.inv(*a)),
            (GroupKind::RealLine, GroupElement::Line(a)) => GroupElement::Line(-a.clone()),
            (GroupKind::AffineLine, GroupElement::Affine { scale, shift }) => GroupElement::Affine {
                scale: T::one() / scale.clone(),
                shift: -shift.clone() / scale.clone(),
            },
            _ => unreachable!("checked above"),
        })
    }

    /// Left-invariant distance. Exact for torus, finite and line models.
    pub fn dist(&self, g: &GroupElement<T>, h: &GroupElement<T>) -> Result<T, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (g, h) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| circle_dist(x, y))
                .fold(T::zero(), T::max_of),
            (GroupElement::Finite(a), GroupElement::Finite(b)) => {
                if a == b {
                    T::zero()
                } else {
                    T::one()
                }
            }
            (GroupElement::Line(a), GroupElement::Line(b)) => (a.clone() - b.clone()).abs(),
            (GroupElement::Affine { scale: a1, shift: b1 }, GroupElement::Affine { scale: a2, shift: b2 }) => {
                T::from_f64_lossy(hyperbolic_dist(
                    a1.to_f64_lossy(),
                    b1.to_f64_lossy(),
                    a2.to_f64_lossy(),
                    b2.to_f64_lossy(),
                ))
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Haar measure of a half-open coordinate box.
    pub fn box_measure(&self, b: &CellBox<T>) -> T {
        match &self.kind {
            GroupKind::AffineLine => {
                let (a0, a1) = (&b.lo[0], &b.hi[0]);
                let scale_part = T::one() / a0.clone() - T::one() / a1.clone();
                scale_part * (b.hi[1].clone() - b.lo[1].clone())
            }
            _ => b.widths().into_iter().fold(T::one(), |acc, w| acc * w),
        }
    }

    /// Haar measure of a set of finite-group elements.
    pub fn elements_measure(&self, elems: &[usize]) -> T {
        match &self.kind {
            GroupKind::Finite(t) => T::of_usize(elems.len()) / T::of_usize(t.order()),
            _ => T::zero(),
        }
    }

    /// Total Haar measure for compact models.
    pub fn total_measure(&self) -> Option<T> {
        self.is_compact().then(T::one)
    }

    /// Whether the box lies inside the closed ball of the given radius
    /// around `center`.
    pub fn box_in_ball(&self, b: &CellBox<T>, center: &GroupElement<T>, radius: &T) -> bool {
        match (&self.kind, center) {
            (GroupKind::Torus { .. }, GroupElement::Torus(c)) => {
                if *radius >= T::half() {
                    return true;
                }
                (0..b.dim()).all(|a| {
                    let width = b.hi[a].clone() - b.lo[a].clone();
                    let start = (b.lo[a].clone() - (c[a].clone() - radius.clone())).fract_unit();
                    start + width <= radius.clone() + radius.clone()
                })
            }
            (GroupKind::RealLine, GroupElement::Line(c)) => {
                b.lo[0] >= c.clone() - radius.clone() && b.hi[0] <= c.clone() + radius.clone()
            }
            (GroupKind::AffineLine, GroupElement::Affine { scale, shift }) => {
                // hyperbolic balls are Euclidean disks, so corners suffice
                let r = radius.to_f64_lossy() + 1e-12;
                let (ca, cb) = (scale.to_f64_lossy(), shift.to_f64_lossy());
                [(&b.lo[0], &b.lo[1]), (&b.lo[0], &b.hi[1]), (&b.hi[0], &b.lo[1]), (&b.hi[0], &b.hi[1])]
                    .iter()
                    .all(|(a, s)| hyperbolic_dist(ca, cb, a.to_f64_lossy(), s.to_f64_lossy()) <= r)
            }
            _ => false,
        }
    }

    /// Whether a set of finite-group elements lies in the ball around `center`.
    pub fn elements_in_ball(&self, elems: &[usize], center: usize, radius: &T) -> bool {
        *radius >= T::one() || elems.iter().all(|&e| e == center)
    }
}

fn circle_dist<T: Scalar>(x: &T, y: &T) -> T {
    let d = (x.clone() - y.clone()).fract_unit();
    T::min_of(d.clone(), T::one() - d)
}

fn hyperbolic_dist(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let num = (b1 - b2).powi(2) + (a1 - a2).powi(2);
    let arg = 1.0 + num / (2.0 * a1 * a2);
    arg.max(1.0).acosh()
}
