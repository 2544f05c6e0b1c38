use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::LatinError;
use crate::scalar::Scalar;
use crate::tensor::{LineAxis, LineSums, SupportSets, WTensor};

/// Nonnegative integer `n × n × n` tensor with line sums at most `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerAmalgam {
    pub n: usize,
    pub t: i64,
    /// Flattened `i + n(j + n·k)`.
    pub entries: Vec<i64>,
    pub support_mask: Vec<bool>,
    /// `(i,j)` whose `k`-line must sum to `t`.
    pub required_s: BTreeSet<(usize, usize)>,
    /// `(i,k)` whose `j`-line must sum to `t`.
    pub required_s_prime: BTreeSet<(usize, usize)>,
    /// `(j,k)` whose `i`-line must sum to `t`.
    pub required_s_double: BTreeSet<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundingMode {
    /// Every line sums to `t`.
    Compact,
    /// Lines sum to at most `t`, with equality on `S`, and also on `S′`,
    /// `S″` when `loops` is set.
    Partial { loops: bool },
}

fn all_pairs(n: usize) -> BTreeSet<(usize, usize)> {
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
}

impl IntegerAmalgam {
    /// Amalgam whose lines must all sum to `t`; the support mask is the
    /// support of `entries`.
    pub fn compact(n: usize, t: i64, entries: Vec<i64>) -> Result<Self, LatinError> {
        if entries.len() != n * n * n {
            return Err(LatinError::InvalidAmalgam(format!("expected {} entries", n * n * n)));
        }
        let m = IntegerAmalgam {
            n,
            t,
            support_mask: entries.iter().map(|&x| x > 0).collect(),
            entries,
            required_s: all_pairs(n),
            required_s_prime: all_pairs(n),
            required_s_double: all_pairs(n),
        };
        m.validate()?;
        Ok(m)
    }

    /// Amalgam with the given required sets; lines outside them may fall short of `t`.
    pub fn partial(
        n: usize,
        t: i64,
        entries: Vec<i64>,
        required_s: BTreeSet<(usize, usize)>,
        required_s_prime: BTreeSet<(usize, usize)>,
        required_s_double: BTreeSet<(usize, usize)>,
    ) -> Result<Self, LatinError> {
        if entries.len() != n * n * n {
            return Err(LatinError::InvalidAmalgam(format!("expected {} entries", n * n * n)));
        }
        let m = IntegerAmalgam {
            n,
            t,
            support_mask: entries.iter().map(|&x| x > 0).collect(),
            entries,
            required_s,
            required_s_prime,
            required_s_double,
        };
        m.validate()?;
        Ok(m)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> i64 {
        self.entries[self.index(i, j, k)]
    }

    pub fn line_sums(&self) -> LineSums<i64> {
        let n = self.n;
        let mut s = LineSums { n, over_i: vec![0; n * n], over_j: vec![0; n * n], over_k: vec![0; n * n] };
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let x = self.get(i, j, k);
                    s.over_i[j + n * k] += x;
                    s.over_j[i + n * k] += x;
                    s.over_k[i + n * j] += x;
                }
            }
        }
        s
    }

    pub fn required(&self, axis: LineAxis) -> &BTreeSet<(usize, usize)> {
        match axis {
            LineAxis::OverK => &self.required_s,
            LineAxis::OverJ => &self.required_s_prime,
            LineAxis::OverI => &self.required_s_double,
        }
    }

    /// Whether every line sums to exactly `t`.
    pub fn is_compact(&self) -> bool {
        let s = self.line_sums();
        s.over_i.iter().chain(&s.over_j).chain(&s.over_k).all(|&x| x == self.t)
    }

    /// Checks nonnegativity, support, `≤ t` on every line and `= t` on required lines.
    pub fn validate(&self) -> Result<(), LatinError> {
        if self.t < 1 {
            return Err(LatinError::InvalidAmalgam("t must be positive".into()));
        }
        if self.support_mask.len() != self.entries.len() {
            return Err(LatinError::InvalidAmalgam("support mask has the wrong size".into()));
        }
        for (x, (&v, &allowed)) in self.entries.iter().zip(&self.support_mask).enumerate() {
            if v < 0 {
                return Err(LatinError::InvalidAmalgam(format!("negative entry at {x}")));
            }
            if v > 0 && !allowed {
                return Err(LatinError::InvalidAmalgam(format!("entry {x} outside the support mask")));
            }
        }
        let sums = self.line_sums();
        for axis in [LineAxis::OverK, LineAxis::OverJ, LineAxis::OverI] {
            for b in 0..self.n {
                for a in 0..self.n {
                    let v = *sums.get(axis, a, b);
                    if v > self.t {
                        return Err(LatinError::InvalidAmalgam(format!("{axis} at ({a},{b}) is {v} > t = {}", self.t)));
                    }
                    if v != self.t && self.required(axis).contains(&(a, b)) {
                        return Err(LatinError::InvalidAmalgam(format!(
                            "required {axis} at ({a},{b}) is {v}, expected {}",
                            self.t
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON `{n, t, entries}` plus the required sets and mask when they
    /// differ from the compact defaults.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "n": self.n, "t": self.t, "entries": self.entries });
        let full = all_pairs(self.n);
        if self.required_s != full || self.required_s_prime != full || self.required_s_double != full {
            let pairs = |s: &BTreeSet<(usize, usize)>| s.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>();
            v["required_s"] = json!(pairs(&self.required_s));
            v["required_s_prime"] = json!(pairs(&self.required_s_prime));
            v["required_s_double"] = json!(pairs(&self.required_s_double));
        }
        if self.support_mask.iter().zip(&self.entries).any(|(&m, &e)| m != (e > 0)) {
            v["support_mask"] = json!(self.support_mask);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, LatinError> {
        let bad = |m: String| LatinError::InvalidAmalgam(m);
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n".into()))? as usize;
        let t = v.get("t").and_then(Value::as_i64).ok_or_else(|| bad("missing t".into()))?;
        let entries: Vec<i64> = serde_json::from_value(v.get("entries").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(format!("entries: {e}")))?;
        if entries.len() != n * n * n {
            return Err(bad(format!("expected {} entries, got {}", n * n * n, entries.len())));
        }
        let pairs = |key: &str| -> Result<BTreeSet<(usize, usize)>, LatinError> {
            match v.get(key) {
                None => Ok(all_pairs(n)),
                Some(p) => serde_json::from_value::<Vec<(usize, usize)>>(p.clone())
                    .map(|x| x.into_iter().collect())
                    .map_err(|e| bad(format!("{key}: {e}"))),
            }
        };
        let support_mask = match v.get("support_mask") {
            None => entries.iter().map(|&x| x > 0).collect(),
            Some(m) => serde_json::from_value(m.clone()).map_err(|e| bad(format!("support_mask: {e}")))?,
        };
        let m = IntegerAmalgam {
            n,
            t,
            entries,
            support_mask,
            required_s: pairs("required_s")?,
            required_s_prime: pairs("required_s_prime")?,
            required_s_double: pairs("required_s_double")?,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Scales `w` so that a full line sums to `t`, floors, and repairs the
/// deficit of required lines one unit at a time on `supp(w)`.
///
/// A unit goes to a support cell all three of whose lines are below `t`
/// and one of whose lines is a deficient required line; candidates are
/// tried by largest fractional part, then index. Lines along `k` are
/// repaired first, then along `j`, then along `i`, until a fixpoint.
pub fn round_to_amalgam<T: Scalar>(
    w: &WTensor<T>,
    s: &SupportSets,
    window_measure: &T,
    t: i64,
    mode: RoundingMode,
) -> Result<IntegerAmalgam, LatinError> {
    if t < 1 {
        return Err(LatinError::InvalidAmalgam("t must be positive".into()));
    }
    let n = w.n;
    let l = window_measure.clone() * window_measure.clone() / T::of_usize(n * n);
    let scale = T::ratio(t, 1) / l;
    let mut entries = vec![0i64; n * n * n];
    let mut frac = vec![0.0f64; n * n * n];
    let mut mask = vec![false; n * n * n];
    for (x, v) in w.entries.iter().enumerate() {
        if v.is_positive() {
            mask[x] = true;
            let scaled = v.clone() * scale.clone();
            let fl = scaled.floor_value();
            entries[x] = fl.to_i64().unwrap_or(0).clamp(0, t);
            frac[x] = (scaled - fl).to_f64_lossy();
        }
    }
    let (required_s, required_s_prime, required_s_double) = match mode {
        RoundingMode::Compact => (all_pairs(n), all_pairs(n), all_pairs(n)),
        RoundingMode::Partial { loops: false } => (s.s.clone(), BTreeSet::new(), BTreeSet::new()),
        RoundingMode::Partial { loops: true } => (s.s.clone(), s.s_prime.clone(), s.s_double.clone()),
    };

    let idx = |i: usize, j: usize, k: usize| i + n * (j + n * k);
    let mut sums = LineSums { n, over_i: vec![0; n * n], over_j: vec![0; n * n], over_k: vec![0; n * n] };
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let x = entries[idx(i, j, k)];
                sums.over_i[j + n * k] += x;
                sums.over_j[i + n * k] += x;
                sums.over_k[i + n * j] += x;
            }
        }
    }
    // noisy inputs can overshoot after flooring; trim the smallest remainders first
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                while entries[idx(i, j, k)] > 0
                    && (sums.over_i[j + n * k] > t || sums.over_j[i + n * k] > t || sums.over_k[i + n * j] > t)
                {
                    entries[idx(i, j, k)] -= 1;
                    sums.over_i[j + n * k] -= 1;
                    sums.over_j[i + n * k] -= 1;
                    sums.over_k[i + n * j] -= 1;
                }
            }
        }
    }

    let budget = 3 * t as usize * n * n + 1;
    for _ in 0..budget {
        let mut progress = false;
        let mut deficient = false;
        for axis in [LineAxis::OverK, LineAxis::OverJ, LineAxis::OverI] {
            let required = match axis {
                LineAxis::OverK => &required_s,
                LineAxis::OverJ => &required_s_prime,
                LineAxis::OverI => &required_s_double,
            };
            for &(a, b) in required {
                let line_cells: Vec<(usize, usize, usize)> = (0..n)
                    .map(|c| match axis {
                        LineAxis::OverK => (a, b, c),
                        LineAxis::OverJ => (a, c, b),
                        LineAxis::OverI => (c, a, b),
                    })
                    .collect();
                let current = |sums: &LineSums<i64>| *sums.get(axis, a, b);
                if current(&sums) >= t {
                    continue;
                }
                let mut candidates: Vec<(usize, usize, usize)> = line_cells
                    .into_iter()
                    .filter(|&(i, j, k)| mask[idx(i, j, k)])
                    .collect();
                candidates.sort_by(|x, y| {
                    frac[idx(y.0, y.1, y.2)]
                        .partial_cmp(&frac[idx(x.0, x.1, x.2)])
                        .unwrap()
                        .then(idx(x.0, x.1, x.2).cmp(&idx(y.0, y.1, y.2)))
                });
                for (i, j, k) in candidates {
                    if current(&sums) >= t {
                        break;
                    }
                    if sums.over_i[j + n * k] < t && sums.over_j[i + n * k] < t && sums.over_k[i + n * j] < t {
                        entries[idx(i, j, k)] += 1;
                        frac[idx(i, j, k)] = 0.0;
                        sums.over_i[j + n * k] += 1;
                        sums.over_j[i + n * k] += 1;
                        sums.over_k[i + n * j] += 1;
                        progress = true;
                    }
                }
                deficient |= current(&sums) < t;
            }
        }
        if !deficient {
            let m = IntegerAmalgam {
                n,
                t,
                entries,
                support_mask: mask,
                required_s,
                required_s_prime,
                required_s_double,
            };
            if mode == RoundingMode::Compact && !m.is_compact() {
                return Err(LatinError::RoundingInfeasible { t, detail: "a line stayed below t".into() });
            }
            return Ok(m);
        }
        if !progress {
            break;
        }
    }
    let stuck = [LineAxis::OverK, LineAxis::OverJ, LineAxis::OverI]
        .into_iter()
        .find_map(|axis| {
            let required = match axis {
                LineAxis::OverK => &required_s,
                LineAxis::OverJ => &required_s_prime,
                LineAxis::OverI => &required_s_double,
            };
            required
                .iter()
                .find(|&&(a, b)| *sums.get(axis, a, b) < t)
                .map(|&(a, b)| format!("{axis} at ({a},{b}) is {} < {t}", sums.get(axis, a, b)))
        })
        .unwrap_or_default();
    Err(LatinError::RoundingInfeasible { t, detail: stuck })
}
