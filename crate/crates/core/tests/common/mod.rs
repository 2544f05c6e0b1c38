#![allow(dead_code)]

use latinapprox::{IntegerAmalgam, LatinSquare, PartialLatinSquare};
use rand::seq::SliceRandom;
use rand::Rng;

fn augment(c: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &s in &adj[c] {
        if !seen[s] {
            seen[s] = true;
            if owner[s].is_none_or(|o| augment(o, adj, owner, seen)) {
                owner[s] = Some(c);
                return true;
            }
        }
    }
    false
}

/// Latin square built row by row from shuffled perfect matchings.
pub fn random_latin<R: Rng>(n: usize, rng: &mut R) -> LatinSquare {
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut adj: Vec<Vec<usize>> = (0..n)
            .map(|c| (0..n).filter(|&s| rows.iter().all(|row| row[c] != s)).collect())
            .collect();
        for list in &mut adj {
            list.shuffle(rng);
        }
        let mut owner = vec![None; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for &c in &order {
            let mut seen = vec![false; n];
            assert!(augment(c, &adj, &mut owner, &mut seen), "Latin rectangles always extend");
        }
        let mut row = vec![0; n];
        for (s, c) in owner.iter().enumerate() {
            row[c.unwrap()] = s;
        }
        rows.push(row);
    }
    LatinSquare::new(n, rows.concat()).unwrap()
}

/// Erases each cell of a random Latin square with probability `p`.
pub fn random_partial<R: Rng>(n: usize, p: f64, rng: &mut R) -> (PartialLatinSquare, LatinSquare) {
    let sq = random_latin(n, rng);
    let cells = (0..n * n).map(|x| (!rng.gen_bool(p)).then(|| sq.get(x / n, x % n))).collect();
    (PartialLatinSquare::new(n, cells).unwrap(), sq)
}

/// Sum of `t` random Latin squares of order `n`, read as a 0/1 tensor each.
pub fn random_amalgam<R: Rng>(n: usize, t: usize, rng: &mut R) -> IntegerAmalgam {
    let mut entries = vec![0i64; n * n * n];
    for _ in 0..t {
        let sq = random_latin(n, rng);
        for i in 0..n {
            for j in 0..n {
                entries[i + n * (j + n * sq.get(i, j))] += 1;
            }
        }
    }
    IntegerAmalgam::compact(n, t as i64, entries).unwrap()
}

pub fn has_unit(sq: &LatinSquare, q0: usize) -> bool {
    (0..sq.order()).all(|x| sq.get(q0, x) == x && sq.get(x, q0) == x)
}
