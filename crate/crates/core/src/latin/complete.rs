use super::square::{LatinSquare, PartialLatinSquare};
use super::LatinError;
use crate::flow::BoundedFlow;

/// Embeds a partial Latin square of order `N` into a Latin square of order
/// `2N` that agrees with it on every filled cell of the top-left corner.
///
/// The corner is filled greedily with the smallest symbol of `0..2N` free
/// in its row and column (always possible, since at most `2N - 2` symbols
/// are blocked). The resulting `N × N` rectangle is extended column by
/// column and then row by row through bipartite matchings.
pub fn complete_partial(p: &PartialLatinSquare) -> Result<LatinSquare, LatinError> {
    let n = p.order();
    let big = 2 * n;
    if n == 0 {
        return LatinSquare::new(0, Vec::new());
    }
    let mut table = vec![usize::MAX; big * big];
    for (r, c, s) in p.filled() {
        table[r * big + c] = s;
    }
    for r in 0..n {
        for c in 0..n {
            if table[r * big + c] == usize::MAX {
                let s = (0..big)
                    .find(|&s| !in_row_has(&table, big, r, s, n) && !in_col_has(&table, big, c, s, n))
                    .ok_or_else(|| LatinError::CompletionFailed(format!("no free symbol at ({r},{c})")))?;
                table[r * big + c] = s;
            }
        }
    }

    // extend rows 0..n to full length; a symbol missing from as many rows
    // as columns remain must be placed now
    for c in n..big {
        let remaining = (big - c) as i64;
        let mut count = vec![0i64; big];
        for r in 0..n {
            for x in 0..c {
                count[table[r * big + x]] += 1;
            }
        }
        let (s, t) = (0, 1 + n + big);
        let mut f = BoundedFlow::new(t + 1);
        for r in 0..n {
            f.add_edge(s, 1 + r, 1, 1);
        }
        let mut pairs = Vec::new();
        for r in 0..n {
            let row: Vec<usize> = (0..c).map(|x| table[r * big + x]).collect();
            for sym in 0..big {
                if !row.contains(&sym) {
                    pairs.push((r, sym, f.add_edge(1 + r, 1 + n + sym, 0, 1)));
                }
            }
        }
        for (sym, &seen) in count.iter().enumerate() {
            let critical = n as i64 - seen == remaining;
            f.add_edge(1 + n + sym, t, i64::from(critical), 1);
        }
        let flows = f
            .solve(s, t)
            .ok_or_else(|| LatinError::CompletionFailed(format!("column {c} cannot be added")))?;
        for (r, sym, e) in pairs {
            if flows[e] == 1 {
                table[r * big + c] = sym;
            }
        }
    }

    // rows n..2n: perfect matchings of columns to their missing symbols
    for r in n..big {
        let (s, t) = (0, 1 + 2 * big);
        let mut f = BoundedFlow::new(t + 1);
        let mut pairs = Vec::new();
        for c in 0..big {
            f.add_edge(s, 1 + c, 1, 1);
            let col: Vec<usize> = (0..r).map(|x| table[x * big + c]).collect();
            for sym in 0..big {
                if !col.contains(&sym) {
                    pairs.push((c, sym, f.add_edge(1 + c, 1 + big + sym, 0, 1)));
                }
            }
        }
        for sym in 0..big {
            f.add_edge(1 + big + sym, t, 1, 1);
        }
        let flows = f
            .solve(s, t)
            .ok_or_else(|| LatinError::CompletionFailed(format!("row {r} cannot be added")))?;
        for (c, sym, e) in pairs {
            if flows[e] == 1 {
                table[r * big + c] = sym;
            }
        }
    }
    LatinSquare::new(big, table).map_err(|e| LatinError::CompletionFailed(e.to_string()))
}

fn in_row_has(table: &[usize], big: usize, r: usize, s: usize, n: usize) -> bool {
    (0..n).any(|c| table[r * big + c] == s)
}

fn in_col_has(table: &[usize], big: usize, c: usize, s: usize, n: usize) -> bool {
    (0..n).any(|r| table[r * big + c] == s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn embeds(p: &PartialLatinSquare, sq: &LatinSquare) -> bool {
        p.filled().all(|(r, c, s)| sq.get(r, c) == s)
    }

    #[test]
    fn empty_order_two() {
        let p = PartialLatinSquare::empty(2);
        let sq = complete_partial(&p).unwrap();
        assert_eq!(sq.order(), 4);
    }

    #[test]
    fn z3_embeds() {
        let p = LatinSquare::cyclic(3).to_partial();
        let sq = complete_partial(&p).unwrap();
        assert_eq!(sq.order(), 6);
        assert!(embeds(&p, &sq));
    }

    #[test]
    fn single_cell() {
        let p = PartialLatinSquare::new(2, vec![Some(0), None, None, None]).unwrap();
        let sq = complete_partial(&p).unwrap();
        assert_eq!(sq.get(0, 0), 0);
    }
}
