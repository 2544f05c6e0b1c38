//! Exhaustive search, used as an independent check on the constructive
//! routines for small orders.

use super::amalgam::IntegerAmalgam;
use super::square::{GroupedPartition, LatinSquare};
use super::LatinError;

/// Largest order the brute-force realizer accepts.
pub const ORACLE_MAX_ORDER: usize = 8;

/// Lexicographically least Latin square (row-major) of order `n·t` with
/// contiguous groups of size `t` whose amalgamation is `t·m`, or `None`
/// when none exists.
pub fn brute_force_realize(m: &IntegerAmalgam) -> Result<Option<(LatinSquare, GroupedPartition)>, LatinError> {
    let n = m.n;
    let t = m.t as usize;
    let order = n * t;
    if order > ORACLE_MAX_ORDER {
        return Err(LatinError::InvalidAmalgam(format!("oracle limited to order {ORACLE_MAX_ORDER}")));
    }
    let mut remaining: Vec<i64> = m.entries.iter().map(|&x| x * m.t).collect();
    let mut table = vec![usize::MAX; order * order];
    let mut row_used = vec![vec![false; order]; order];
    let mut col_used = vec![vec![false; order]; order];
    let found = search(0, order, t, n, &mut remaining, &mut table, &mut row_used, &mut col_used);
    if !found {
        return Ok(None);
    }
    let sq = LatinSquare::new(order, table)?;
    Ok(Some((sq, GroupedPartition::contiguous(n, t))))
}

#[allow(clippy::too_many_arguments)]
fn search(
    cell: usize,
    order: usize,
    t: usize,
    n: usize,
    remaining: &mut [i64],
    table: &mut [usize],
    row_used: &mut [Vec<bool>],
    col_used: &mut [Vec<bool>],
) -> bool {
    if cell == order * order {
        return true;
    }
    let (r, c) = (cell / order, cell % order);
    let (i, j) = (r / t, c / t);
    for s in 0..order {
        let x = i + n * (j + n * (s / t));
        if row_used[r][s] || col_used[c][s] || remaining[x] == 0 {
            continue;
        }
        row_used[r][s] = true;
        col_used[c][s] = true;
        remaining[x] -= 1;
        table[cell] = s;
        if search(cell + 1, order, t, n, remaining, table, row_used, col_used) {
            return true;
        }
        row_used[r][s] = false;
        col_used[c][s] = false;
        remaining[x] += 1;
    }
    table[cell] = usize::MAX;
    false
}

/// Whether `b[α(r)][β(c)] = γ(a[r][c])` for some permutations α, β, γ.
/// Exhaustive over β, so meant for orders up to about 9.
pub fn isotopic(a: &LatinSquare, b: &LatinSquare) -> bool {
    let n = a.order();
    if n != b.order() {
        return false;
    }
    if n == 0 {
        return true;
    }
    let mut beta: Vec<usize> = (0..n).collect();
    for r0 in 0..n {
        // Heap's algorithm over column maps
        let mut c = vec![0usize; n];
        if isotopy_with(a, b, r0, &beta) {
            return true;
        }
        let mut k = 1;
        while k < n {
            if c[k] < k {
                if k % 2 == 0 {
                    beta.swap(0, k);
                } else {
                    beta.swap(c[k], k);
                }
                if isotopy_with(a, b, r0, &beta) {
                    return true;
                }
                c[k] += 1;
                k = 1;
            } else {
                c[k] = 0;
                k += 1;
            }
        }
    }
    false
}

fn isotopy_with(a: &LatinSquare, b: &LatinSquare, r0: usize, beta: &[usize]) -> bool {
    let n = a.order();
    // row 0 of `a` maps to row r0 of `b`, which fixes γ
    let mut gamma = vec![0; n];
    for c in 0..n {
        gamma[a.get(0, c)] = b.get(r0, beta[c]);
    }
    // column 0 then fixes α
    let mut row_of = vec![0; n];
    for r in 0..n {
        row_of[b.get(r, beta[0])] = r;
    }
    let alpha: Vec<usize> = (0..n).map(|r| row_of[gamma[a.get(r, 0)]]).collect();
    (0..n).all(|r| (0..n).all(|c| b.get(alpha[r], beta[c]) == gamma[a.get(r, c)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_single_block() {
        let m = IntegerAmalgam::compact(1, 2, vec![2]).unwrap();
        let (sq, _) = brute_force_realize(&m).unwrap().unwrap();
        assert_eq!(sq.table(), &[0, 1, 1, 0]);
    }

    #[test]
    fn isotopy_of_cyclic_squares() {
        let z4 = LatinSquare::cyclic(4);
        let shuffled = LatinSquare::new(4, (0..16).map(|x| (3 * (x / 4) + x % 4 + 1) % 4).collect()).unwrap();
        assert!(isotopic(&z4, &shuffled));
        // Klein four-group is not isotopic to Z4
        let klein = LatinSquare::new(4, (0..16).map(|x| (x / 4) ^ (x % 4)).collect()).unwrap();
        assert!(!isotopic(&z4, &klein));
    }
}
