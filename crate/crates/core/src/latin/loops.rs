use super::square::LatinSquare;
use super::LatinError;

/// The permutations used to turn a quasigroup into a loop with unit `q0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopIsotopy {
    pub unit: usize,
    /// `a(x)`: the column where row `q0` holds `x`, so `q0∘a(x) = x`.
    pub a: Vec<usize>,
    /// `b(x)`: the row where column `a(q0)` holds `x`, so `b(x)∘a(q0) = x`.
    pub b: Vec<usize>,
}

pub fn loop_isotopy(sq: &LatinSquare, q0: usize) -> Result<LoopIsotopy, LatinError> {
    let n = sq.order();
    if q0 >= n {
        return Err(LatinError::InvalidIndex(q0));
    }
    let mut a = vec![0; n];
    for c in 0..n {
        a[sq.get(q0, c)] = c;
    }
    let mut b = vec![0; n];
    for r in 0..n {
        b[sq.get(r, a[q0])] = r;
    }
    Ok(LoopIsotopy { unit: q0, a, b })
}

/// `x * y = b(x) ∘ a(y)`, a Latin square in which `q0` is a two-sided unit.
pub fn loopify(sq: &LatinSquare, q0: usize) -> Result<LatinSquare, LatinError> {
    let iso = loop_isotopy(sq, q0)?;
    let n = sq.order();
    let table = (0..n * n).map(|x| sq.get(iso.b[x / n], iso.a[x % n])).collect();
    LatinSquare::new(n, table)
}
