use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::LatinError;
use crate::group::CayleyTable;

/// A full Latin square of order `N`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    order: usize,
    table: Vec<usize>,
}

impl LatinSquare {
    pub fn new(order: usize, table: Vec<usize>) -> Result<Self, LatinError> {
        if table.len() != order * order {
            return Err(LatinError::InvalidSquare(format!("expected {} entries, got {}", order * order, table.len())));
        }
        let sq = LatinSquare { order, table };
        if let Some(msg) = sq.latin_defect() {
            return Err(LatinError::InvalidSquare(msg));
        }
        Ok(sq)
    }

    /// `i + j mod n`.
    pub fn cyclic(n: usize) -> Self {
        LatinSquare { order: n, table: (0..n * n).map(|x| (x / n + x % n) % n).collect() }
    }

    pub fn from_cayley(t: &CayleyTable) -> Self {
        let n = t.order();
        LatinSquare { order: n, table: (0..n * n).map(|x| t.mul(x / n, x % n)).collect() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> usize {
        self.table[r * self.order + c]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.table.chunks(self.order.max(1))
    }

    fn latin_defect(&self) -> Option<String> {
        let n = self.order;
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                let s = self.get(r, c);
                if s >= n {
                    return Some(format!("symbol {s} out of range at ({r},{c})"));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Some(format!("symbol {s} repeats in row {r}"));
                }
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                if std::mem::replace(&mut seen[self.get(r, c)], true) {
                    return Some(format!("symbol {} repeats in column {c}", self.get(r, c)));
                }
            }
        }
        None
    }

    pub fn is_latin(&self) -> bool {
        self.latin_defect().is_none()
    }

    /// Whether `e` is a two-sided identity.
    pub fn is_unit(&self, e: usize) -> bool {
        (0..self.order).all(|x| self.get(e, x) == x && self.get(x, e) == x)
    }

    pub fn to_partial(&self) -> PartialLatinSquare {
        PartialLatinSquare { order: self.order, table: self.table.iter().map(|&s| Some(s)).collect() }
    }

    pub fn to_csv(&self) -> String {
        self.to_partial().to_csv()
    }

    pub fn from_csv(text: &str) -> Result<Self, LatinError> {
        let p = PartialLatinSquare::from_csv(text)?;
        let table = p
            .table
            .iter()
            .map(|s| s.ok_or_else(|| LatinError::InvalidSquare("empty cell in a full square".into())))
            .collect::<Result<Vec<_>, _>>()?;
        LatinSquare::new(p.order, table)
    }

    pub fn to_json(&self, groups: Option<&GroupedPartition>) -> Value {
        let rows: Vec<&[usize]> = self.rows().collect();
        json!({ "order": self.order, "groups": groups.map(|g| g.groups.clone()), "table": rows })
    }

    pub fn from_json(v: &Value) -> Result<(Self, Option<GroupedPartition>), LatinError> {
        let (p, g) = PartialLatinSquare::from_json(v)?;
        let table = p
            .table
            .iter()
            .map(|s| s.ok_or_else(|| LatinError::InvalidSquare("empty cell in a full square".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((LatinSquare::new(p.order, table)?, g))
    }

    /// Whether the two squares differ only by renaming rows, columns and symbols.
    pub fn is_isotopic_to(&self, other: &LatinSquare) -> bool {
        super::oracle::isotopic(self, other)
    }
}

/// A partial Latin square; `None` marks an empty cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialLatinSquare {
    order: usize,
    table: Vec<Option<usize>>,
}

impl PartialLatinSquare {
    pub fn new(order: usize, table: Vec<Option<usize>>) -> Result<Self, LatinError> {
        if table.len() != order * order {
            return Err(LatinError::InvalidSquare(format!("expected {} entries, got {}", order * order, table.len())));
        }
        let p = PartialLatinSquare { order, table };
        for r in 0..order {
            let mut seen = BTreeSet::new();
            for c in 0..order {
                if let Some(s) = p.get(r, c) {
                    if s >= order {
                        return Err(LatinError::InvalidSquare(format!("symbol {s} out of range at ({r},{c})")));
                    }
                    if !seen.insert(s) {
                        return Err(LatinError::InvalidSquare(format!("symbol {s} repeats in row {r}")));
                    }
                }
            }
        }
        for c in 0..order {
            let mut seen = BTreeSet::new();
            for r in 0..order {
                if let Some(s) = p.get(r, c) {
                    if !seen.insert(s) {
                        return Err(LatinError::InvalidSquare(format!("symbol {s} repeats in column {c}")));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn empty(order: usize) -> Self {
        PartialLatinSquare { order, table: vec![None; order * order] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.table[r * self.order + c]
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn filled(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(x, s)| s.map(|s| (x / self.order, x % self.order, s)))
    }

    pub fn filled_count(&self) -> usize {
        self.table.iter().filter(|s| s.is_some()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.table.chunks(self.order.max(1)) {
            let cells: Vec<String> = row.iter().map(|s| s.map_or("-1".to_string(), |s| s.to_string())).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, LatinError> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|x| {
                    let v: i64 = x.trim().parse().map_err(|_| {
                        LatinError::InvalidSquare(format!("line {}: cannot parse {:?}", line_no + 1, x.trim()))
                    })?;
                    Ok(if v < 0 { None } else { Some(v as usize) })
                })
                .collect::<Result<Vec<_>, LatinError>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatinError::InvalidSquare("table is not square".into()));
        }
        PartialLatinSquare::new(n, rows.into_iter().flatten().collect())
    }

    pub fn to_json(&self, groups: Option<&GroupedPartition>) -> Value {
        let rows: Vec<Vec<i64>> = self
            .table
            .chunks(self.order.max(1))
            .map(|r| r.iter().map(|s| s.map_or(-1, |s| s as i64)).collect())
            .collect();
        json!({ "order": self.order, "groups": groups.map(|g| g.groups.clone()), "table": rows })
    }

    pub fn from_json(v: &Value) -> Result<(Self, Option<GroupedPartition>), LatinError> {
        let bad = |m: &str| LatinError::InvalidSquare(m.to_string());
        let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| bad("missing order"))? as usize;
        let rows = v.get("table").and_then(Value::as_array).ok_or_else(|| bad("missing table"))?;
        let mut table = Vec::with_capacity(order * order);
        for row in rows {
            for x in row.as_array().ok_or_else(|| bad("table rows must be arrays"))? {
                let x = x.as_i64().ok_or_else(|| bad("entries must be integers"))?;
                table.push(if x < 0 { None } else { Some(x as usize) });
            }
        }
        let p = PartialLatinSquare::new(order, table)?;
        let groups = match v.get("groups") {
            None | Some(Value::Null) => None,
            Some(g) => {
                let groups: Vec<Vec<usize>> =
                    serde_json::from_value(g.clone()).map_err(|e| bad(&format!("groups: {e}")))?;
                Some(GroupedPartition::new(order, groups)?)
            }
        };
        Ok((p, groups))
    }
}

/// Partition of `{0..N-1}` into index classes `Q_1…Q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupedPartition {
    pub order: usize,
    pub groups: Vec<Vec<usize>>,
}

impl GroupedPartition {
    /// Classes must be disjoint and cover `{0..order-1}`.
    pub fn new(order: usize, groups: Vec<Vec<usize>>) -> Result<Self, LatinError> {
        let mut seen = vec![false; order];
        for &x in groups.iter().flatten() {
            if x >= order || std::mem::replace(&mut seen[x], true) {
                return Err(LatinError::InvalidGroups(format!("index {x} repeated or out of range")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(LatinError::InvalidGroups("classes do not cover the order".into()));
        }
        Ok(GroupedPartition { order, groups })
    }

    /// `Q_i = {i·t, …, i·t + t - 1}`.
    pub fn contiguous(n: usize, t: usize) -> Self {
        GroupedPartition { order: n * t, groups: (0..n).map(|i| (i * t..(i + 1) * t).collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Whether all classes have the same size.
    pub fn is_equisized(&self) -> bool {
        self.groups.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Class index of every element.
    pub fn class_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.order];
        for (i, g) in self.groups.iter().enumerate() {
            for &x in g {
                out[x] = i;
            }
        }
        out
    }
}

/// Generalized quotient: `(i,j,k)` such that some `q ∈ Q_i`, `q′ ∈ Q_j`
/// have `q∘q′ ∈ Q_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Gqq {
    pub triples: BTreeSet<(usize, usize, usize)>,
}

impl Gqq {
    pub fn is_subset_of_support(&self, n: usize, support: impl Fn(usize, usize, usize) -> bool) -> bool {
        self.triples.iter().all(|&(i, j, k)| i < n && j < n && k < n && support(i, j, k))
    }
}

/// Anything with an (optionally partial) multiplication table.
pub trait SquareTable {
    fn order(&self) -> usize;
    fn cell(&self, r: usize, c: usize) -> Option<usize>;
}

impl SquareTable for LatinSquare {
    fn order(&self) -> usize {
        self.order
    }
    fn cell(&self, r: usize, c: usize) -> Option<usize> {
        Some(self.get(r, c))
    }
}

impl SquareTable for PartialLatinSquare {
    fn order(&self) -> usize {
        self.order
    }
    fn cell(&self, r: usize, c: usize) -> Option<usize> {
        self.get(r, c)
    }
}

pub fn gqq_of(sq: &impl SquareTable, g: &GroupedPartition) -> Gqq {
    let class = g.class_of();
    let n = sq.order();
    let mut triples = BTreeSet::new();
    for r in 0..n {
        for c in 0..n {
            if let Some(s) = sq.cell(r, c) {
                triples.insert((class[r], class[c], class[s]));
            }
        }
    }
    Gqq { triples }
}

/// Block counts `A_ijk = #{(r,c) : r ∈ Q_i, c ∈ Q_j, table[r][c] ∈ Q_k}`,
/// flattened `i + n(j + n·k)`.
pub fn amalgamation(sq: &impl SquareTable, g: &GroupedPartition) -> Vec<i64> {
    let class = g.class_of();
    let n = g.len();
    let mut out = vec![0; n * n * n];
    for r in 0..sq.order() {
        for c in 0..sq.order() {
            if let Some(s) = sq.cell(r, c) {
                out[class[r] + n * (class[c] + n * class[s])] += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(LatinSquare::new(2, vec![0, 1, 1, 0]).is_ok());
        assert!(LatinSquare::new(2, vec![0, 1, 0, 1]).is_err());
        assert!(PartialLatinSquare::new(2, vec![Some(0), None, None, Some(0)]).is_ok());
        assert!(PartialLatinSquare::new(2, vec![Some(0), Some(0), None, None]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = PartialLatinSquare::new(3, vec![Some(0), None, Some(2), None, Some(0), None, None, None, None]).unwrap();
        let text = p.to_csv();
        assert_eq!(text.lines().next().unwrap(), "0,-1,2");
        assert_eq!(PartialLatinSquare::from_csv(&text).unwrap(), p);
        let sq = LatinSquare::cyclic(4);
        assert_eq!(LatinSquare::from_csv(&sq.to_csv()).unwrap(), sq);
    }

    #[test]
    fn json_round_trip() {
        let sq = LatinSquare::cyclic(4);
        let g = GroupedPartition::contiguous(2, 2);
        let (back, groups) = LatinSquare::from_json(&sq.to_json(Some(&g))).unwrap();
        assert_eq!(back, sq);
        assert_eq!(groups, Some(g));
    }

    #[test]
    fn gqq_examples() {
        let z3 = LatinSquare::cyclic(3);
        let q = gqq_of(&z3, &GroupedPartition::contiguous(3, 1));
        let expect: BTreeSet<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j, (i + j) % 3))).collect();
        assert_eq!(q.triples, expect);
        let one = gqq_of(&LatinSquare::cyclic(5), &GroupedPartition::contiguous(1, 5));
        assert_eq!(one.triples, BTreeSet::from([(0, 0, 0)]));
    }

    #[test]
    fn amalgamation_of_z4_mod_2() {
        // classes {0,1},{2,3}: the (0,0) block holds symbols 0,1,1,2
        let a = amalgamation(&LatinSquare::cyclic(4), &GroupedPartition::contiguous(2, 2));
        assert_eq!(a.iter().sum::<i64>(), 16);
        assert_eq!(a[0], 3);
        assert_eq!(a[7], 1);
    }

    #[test]
    fn groups_validation() {
        assert!(GroupedPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(GroupedPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(GroupedPartition::new(3, vec![vec![0, 2], vec![1]]).is_ok());
    }
}
