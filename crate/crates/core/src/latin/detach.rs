//! Detachment of outline squares: from block counts over grouped rows,
//! columns and symbols to a concrete Latin square.
//!
//! Rows are split off first, then columns, then symbols. Each split is an
//! equitable edge colouring of a bipartite multigraph whose vertex degrees
//! are all divisible by the number of colours, so every colour class gets
//! exactly `degree / colours` at every vertex.

use std::collections::BTreeMap;

use super::amalgam::IntegerAmalgam;
use super::square::{amalgamation, GroupedPartition, LatinSquare, PartialLatinSquare};
use super::LatinError;
use crate::flow::BoundedFlow;

/// Bipartite multigraph: `(left, right) -> multiplicity`.
pub type Multigraph = BTreeMap<(usize, usize), i64>;

fn degrees(edges: &Multigraph) -> (BTreeMap<usize, i64>, BTreeMap<usize, i64>) {
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (&(u, v), &m) in edges {
        *left.entry(u).or_insert(0) += m;
        *right.entry(v).or_insert(0) += m;
    }
    (left, right)
}

/// Splits a multigraph with even degrees into two halves with exactly half
/// the degree at every vertex.
pub fn euler_halve(edges: &Multigraph) -> (Multigraph, Multigraph) {
    let mut a = Multigraph::new();
    let mut b = Multigraph::new();
    let mut odd: Vec<(usize, usize)> = Vec::new();
    for (&e, &m) in edges {
        if m / 2 > 0 {
            a.insert(e, m / 2);
            b.insert(e, m / 2);
        }
        if m % 2 == 1 {
            odd.push(e);
        }
    }
    // the odd edges form a simple graph with even degrees; walk closed trails
    // and alternate halves along them
    let mut ids: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    for &(u, v) in &odd {
        let next = ids.len();
        ids.entry((false, u)).or_insert(next);
        let next = ids.len();
        ids.entry((true, v)).or_insert(next);
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ids.len()];
    for (x, &(u, v)) in odd.iter().enumerate() {
        let (iu, iv) = (ids[&(false, u)], ids[&(true, v)]);
        adj[iu].push((x, iv));
        adj[iv].push((x, iu));
    }
    let mut used = vec![false; odd.len()];
    let mut ptr = vec![0usize; adj.len()];
    for start in 0..odd.len() {
        if used[start] {
            continue;
        }
        let mut cur = ids[&(false, odd[start].0)];
        let mut to_a = true;
        loop {
            while ptr[cur] < adj[cur].len() && used[adj[cur][ptr[cur]].0] {
                ptr[cur] += 1;
            }
            if ptr[cur] == adj[cur].len() {
                break;
            }
            let (x, other) = adj[cur][ptr[cur]];
            used[x] = true;
            let half = if to_a { &mut a } else { &mut b };
            *half.entry(odd[x]).or_insert(0) += 1;
            to_a = !to_a;
            cur = other;
        }
    }
    (a, b)
}

/// A subgraph with degree `d(v) / colours` at every vertex.
fn extract_factor(edges: &Multigraph, colours: i64) -> Option<Multigraph> {
    let (left, right) = degrees(edges);
    let lid: BTreeMap<usize, usize> = left.keys().enumerate().map(|(x, &u)| (u, x)).collect();
    let rid: BTreeMap<usize, usize> = right.keys().enumerate().map(|(x, &v)| (v, x)).collect();
    let (s, t) = (0, 1 + lid.len() + rid.len());
    let mut f = BoundedFlow::new(t + 1);
    for (&u, &d) in &left {
        f.add_edge(s, 1 + lid[&u], d / colours, d / colours);
    }
    for (&v, &d) in &right {
        f.add_edge(1 + lid.len() + rid[&v], t, d / colours, d / colours);
    }
    let first = left.len() + right.len();
    for (&(u, v), &m) in edges {
        f.add_edge(1 + lid[&u], 1 + lid.len() + rid[&v], 0, m);
    }
    let flows = f.solve(s, t)?;
    Some(
        edges
            .keys()
            .enumerate()
            .filter(|&(x, _)| flows[first + x] > 0)
            .map(|(x, &e)| (e, flows[first + x]))
            .collect(),
    )
}

/// Splits `edges` into `colours` classes, each with degree `d(v)/colours`
/// at every vertex. `None` when some degree is not divisible.
pub fn equitable_coloring(edges: &Multigraph, colours: usize) -> Option<Vec<Multigraph>> {
    if colours == 0 {
        return edges.values().all(|&m| m == 0).then(Vec::new);
    }
    let (left, right) = degrees(edges);
    if left.values().chain(right.values()).any(|&d| d % colours as i64 != 0) {
        return None;
    }
    let edges: Multigraph = edges.iter().filter(|(_, &m)| m > 0).map(|(&e, &m)| (e, m)).collect();
    color_rec(edges, colours)
}

fn color_rec(edges: Multigraph, colours: usize) -> Option<Vec<Multigraph>> {
    if colours == 1 {
        return Some(vec![edges]);
    }
    if colours.is_multiple_of(2) {
        let (a, b) = euler_halve(&edges);
        let mut out = color_rec(a, colours / 2)?;
        out.extend(color_rec(b, colours / 2)?);
        Some(out)
    } else {
        let factor = extract_factor(&edges, colours as i64)?;
        let mut rest = edges;
        for (e, m) in &factor {
            let r = rest.get_mut(e).expect("factor edges come from the graph");
            *r -= m;
            if *r == 0 {
                rest.remove(e);
            }
        }
        let mut out = vec![factor];
        out.extend(color_rec(rest, colours - 1)?);
        Some(out)
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Detaches an outline square with group sizes `sizes` (same for rows,
/// columns and symbols). `outline` is flattened `i + g(j + g·k)` over the
/// `g` groups and must satisfy the outline conditions
/// `Σ_k A_ijk = r_i r_j`, `Σ_j A_ijk = r_i r_k`, `Σ_i A_ijk = r_j r_k`.
pub fn detach(outline: &[i64], sizes: &[usize]) -> Result<Vec<usize>, LatinError> {
    let g = sizes.len();
    let at = |i: usize, j: usize, k: usize| outline[i + g * (j + g * k)];
    let off = offsets(sizes);
    let order = off[g];
    for i in 0..g {
        for j in 0..g {
            let (rk, rj, ri) = (
                (0..g).map(|k| at(i, j, k)).sum::<i64>(),
                (0..g).map(|x| at(i, x, j)).sum::<i64>(),
                (0..g).map(|x| at(x, i, j)).sum::<i64>(),
            );
            let target = (sizes[i] * sizes[j]) as i64;
            if rk != target || rj != target || ri != target {
                return Err(LatinError::RealizationFailed(format!(
                    "outline line sums at ({i},{j}) are {rk}/{rj}/{ri}, expected {target}"
                )));
            }
        }
    }
    let fail = |phase: &str, group: usize| {
        LatinError::RealizationFailed(format!("equitable colouring failed in the {phase} phase for group {group}"))
    };

    // rows: per concrete row, counts over (column group, symbol group)
    let mut row_counts: Vec<Multigraph> = vec![Multigraph::new(); order];
    for i in 0..g {
        let edges: Multigraph = (0..g)
            .flat_map(|j| (0..g).map(move |k| (j, k)))
            .filter(|&(j, k)| at(i, j, k) > 0)
            .map(|(j, k)| ((j, k), at(i, j, k)))
            .collect();
        let classes = equitable_coloring(&edges, sizes[i]).ok_or_else(|| fail("row", i))?;
        for (x, class) in classes.into_iter().enumerate() {
            row_counts[off[i] + x] = class;
        }
    }

    // columns: symbol group of every cell
    let mut cell_group = vec![usize::MAX; order * order];
    for j in 0..g {
        let mut edges = Multigraph::new();
        for (rho, counts) in row_counts.iter().enumerate() {
            for k in 0..g {
                if let Some(&m) = counts.get(&(j, k)) {
                    if m > 0 {
                        edges.insert((rho, k), m);
                    }
                }
            }
        }
        let classes = equitable_coloring(&edges, sizes[j]).ok_or_else(|| fail("column", j))?;
        for (x, class) in classes.into_iter().enumerate() {
            let col = off[j] + x;
            for ((rho, k), m) in class {
                if m != 1 {
                    return Err(fail("column", j));
                }
                cell_group[rho * order + col] = k;
            }
        }
    }
    if cell_group.contains(&usize::MAX) {
        return Err(LatinError::RealizationFailed("some cell received no symbol group".into()));
    }

    // symbols: a perfect matching per concrete symbol
    let mut table = vec![usize::MAX; order * order];
    for k in 0..g {
        let edges: Multigraph = (0..order * order)
            .filter(|&x| cell_group[x] == k)
            .map(|x| ((x / order, x % order), 1))
            .collect();
        let classes = equitable_coloring(&edges, sizes[k]).ok_or_else(|| fail("symbol", k))?;
        for (x, class) in classes.into_iter().enumerate() {
            for ((r, c), _) in class {
                table[r * order + c] = off[k] + x;
            }
        }
    }
    Ok(table)
}

/// Latin square of order `n·t` with contiguous groups of size `t` whose
/// amalgamation is exactly `t·m`.
pub fn realize_amalgamation(m: &IntegerAmalgam) -> Result<(LatinSquare, GroupedPartition), LatinError> {
    m.validate()?;
    if !m.is_compact() {
        return Err(LatinError::InvalidAmalgam("realize_amalgamation needs every line sum equal to t".into()));
    }
    let t = m.t as usize;
    let outline: Vec<i64> = m.entries.iter().map(|&x| x * m.t).collect();
    let table = detach(&outline, &vec![t; m.n])?;
    let sq = LatinSquare::new(m.n * t, table).map_err(|e| LatinError::RealizationFailed(e.to_string()))?;
    let groups = GroupedPartition::contiguous(m.n, t);
    if amalgamation(&sq, &groups) != outline {
        return Err(LatinError::RealizationFailed("amalgamation differs from t·m".into()));
    }
    Ok((sq, groups))
}

/// Size of the slack group used by [`realize_partial`].
pub fn slack_size(m: &IntegerAmalgam) -> Option<usize> {
    let n = m.n;
    let t = m.t;
    let sums = m.line_sums();
    let total: i64 = m.entries.iter().sum();
    let deficit = (n * n) as i64 * t - total;
    let row_def = (0..n).map(|i| (0..n).map(|j| t - sums.over_k[i + n * j]).sum::<i64>());
    let col_def = (0..n).map(|j| (0..n).map(|i| t - sums.over_k[i + n * j]).sum::<i64>());
    let sym_def = (0..n).map(|k| (0..n).map(|i| t - sums.over_j[i + n * k]).sum::<i64>());
    let lower = row_def.chain(col_def).chain(sym_def).max().unwrap_or(0).max(0);
    let nt = n as i64 * t;
    (lower..=nt)
        .find(|&sigma| sigma * sigma - sigma * nt + t * deficit >= 0)
        .map(|s| s as usize)
}

/// Partial Latin square of order `n·t` realizing a partial-mode amalgam.
///
/// One slack group of size `σ` is added on every axis so that all line
/// sums can be completed, the padded outline is detached, and every cell
/// whose row, column or symbol is slack is erased. Blocks `(i,j)` whose
/// `k`-line is full therefore stay completely filled; likewise full
/// `j`-lines and `i`-lines leave every (row, symbol) and (column, symbol)
/// pair of their blocks present.
pub fn realize_partial(m: &IntegerAmalgam) -> Result<(PartialLatinSquare, GroupedPartition), LatinError> {
    let n = m.n;
    let t = m.t;
    m.validate().map_err(|e| LatinError::PaddingInfeasible(e.to_string()))?;
    let sigma = slack_size(m).ok_or_else(|| LatinError::PaddingInfeasible("no slack size balances the outline".into()))?;
    let g = n + 1;
    let s = n;
    let sums = m.line_sums();
    let idx = |i: usize, j: usize, k: usize| i + g * (j + g * k);
    let mut outline = vec![0i64; g * g * g];
    let sg = sigma as i64;
    let (mut row_def, mut col_def, mut sym_def) = (vec![0; n], vec![0; n], vec![0; n]);
    for a in 0..n {
        for b in 0..n {
            let d = t - sums.over_k[a + n * b]; // block (a,b) rows × cols
            let e = t - sums.over_j[a + n * b]; // row group a, symbol group b
            let f = t - sums.over_i[a + n * b]; // column group a, symbol group b
            outline[idx(a, b, s)] = t * d;
            outline[idx(a, s, b)] = t * e;
            outline[idx(s, a, b)] = t * f;
            row_def[a] += d;
            col_def[b] += d;
            sym_def[b] += e;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                outline[idx(i, j, k)] = t * m.get(i, j, k);
            }
        }
    }
    let deficit: i64 = row_def.iter().sum();
    for a in 0..n {
        outline[idx(a, s, s)] = t * sg - t * row_def[a];
        outline[idx(s, a, s)] = t * sg - t * col_def[a];
        outline[idx(s, s, a)] = t * sg - t * sym_def[a];
    }
    outline[idx(s, s, s)] = sg * sg - sg * n as i64 * t + t * deficit;
    if outline.iter().any(|&x| x < 0) {
        return Err(LatinError::PaddingInfeasible(format!("negative slack entry with σ = {sigma}")));
    }
    let mut sizes = vec![t as usize; n];
    sizes.push(sigma);
    let table = detach(&outline, &sizes)?;
    let order = n * t as usize;
    let full = order + sigma;
    let mut partial = vec![None; order * order];
    for r in 0..order {
        for c in 0..order {
            let x = table[r * full + c];
            if x < order {
                partial[r * order + c] = Some(x);
            }
        }
    }
    let p = PartialLatinSquare::new(order, partial).map_err(|e| LatinError::RealizationFailed(e.to_string()))?;
    let groups = GroupedPartition::contiguous(n, t as usize);
    let real: Vec<i64> = m.entries.iter().map(|&x| x * t).collect();
    if amalgamation(&p, &groups) != real {
        return Err(LatinError::RealizationFailed("partial amalgamation differs from t·m".into()));
    }
    Ok((p, groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::square::gqq_of;
    use std::collections::BTreeSet;

    fn check_classes(edges: &Multigraph, classes: &[Multigraph]) {
        let colours = classes.len() as i64;
        let (l, r) = degrees(edges);
        let mut total = Multigraph::new();
        for c in classes {
            let (cl, cr) = degrees(c);
            for (v, d) in &l {
                assert_eq!(cl.get(v).copied().unwrap_or(0), d / colours);
            }
            for (v, d) in &r {
                assert_eq!(cr.get(v).copied().unwrap_or(0), d / colours);
            }
            for (e, m) in c {
                *total.entry(*e).or_insert(0) += m;
            }
        }
        assert_eq!(&total, edges);
    }

    #[test]
    fn coloring_even_and_odd() {
        let edges: Multigraph = [((0, 0), 3), ((0, 1), 3), ((1, 0), 3), ((1, 1), 3)].into_iter().collect();
        for c in [1, 2, 3, 6] {
            check_classes(&edges, &equitable_coloring(&edges, c).unwrap());
        }
        assert!(equitable_coloring(&edges, 4).is_none());
        let odd: Multigraph = [((0, 0), 1), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1)].into_iter().collect();
        check_classes(&odd, &equitable_coloring(&odd, 2).unwrap());
    }

    #[test]
    fn single_block() {
        let m = IntegerAmalgam::compact(1, 2, vec![2]).unwrap();
        let (sq, g) = realize_amalgamation(&m).unwrap();
        assert_eq!(sq.order(), 2);
        assert_eq!(amalgamation(&sq, &g), vec![4]);
    }

    #[test]
    fn xor_quotient() {
        let mut e = vec![0; 8];
        for i in 0..2 {
            for j in 0..2 {
                e[i + 2 * (j + 2 * (i ^ j))] = 2;
            }
        }
        let m = IntegerAmalgam::compact(2, 2, e.clone()).unwrap();
        let (sq, g) = realize_amalgamation(&m).unwrap();
        assert_eq!(amalgamation(&sq, &g), e.iter().map(|x| 2 * x).collect::<Vec<_>>());
    }

    #[test]
    fn z3_cayley() {
        let e: Vec<i64> = (0..27).map(|x| i64::from((x % 3 + (x / 3) % 3) % 3 == x / 9)).collect();
        let m = IntegerAmalgam::compact(3, 1, e).unwrap();
        let (sq, _) = realize_amalgamation(&m).unwrap();
        assert_eq!(sq, LatinSquare::cyclic(3));
    }

    #[test]
    fn partial_with_empty_line() {
        // only the diagonal blocks are required; the off-diagonal lines are empty
        let mut e = vec![0; 8];
        e[0] = 1; // (0,0,0)
        e[7] = 1; // (1,1,1)
        let req: BTreeSet<_> = [(0, 0), (1, 1)].into_iter().collect();
        let m = IntegerAmalgam::partial(2, 1, e, req, BTreeSet::new(), BTreeSet::new()).unwrap();
        let (p, g) = realize_partial(&m).unwrap();
        assert_eq!(p.get(0, 0), Some(0));
        assert_eq!(p.get(1, 1), Some(1));
        assert_eq!(p.get(0, 1), None);
        assert!(gqq_of(&p, &g).triples.iter().all(|&(i, j, k)| m.get(i, j, k) > 0));
    }

    #[test]
    fn partial_compact_input_needs_no_slack() {
        let m = IntegerAmalgam::compact(1, 3, vec![3]).unwrap();
        assert_eq!(slack_size(&m), Some(0));
        let (p, _) = realize_partial(&m).unwrap();
        assert_eq!(p.filled_count(), 9);
    }
}
