//! Hausdorff distance between configuration spaces of an inclusion.
//!
//! For `X ⊆ Y` the direction `X → Y` is zero, so the distance is
//! `max_u min_v max_i d(u_i, v_i)` over ordered tuples `u` of `k + 1`
//! distinct points of `Y` and `v` of `X`. The inner minimum is a bottleneck
//! assignment of the coordinates of `u` to distinct points of `X`, so by
//! Hall's theorem the distance is at most `h` exactly when every set `S` of
//! at most `k + 1` points of `Y` has at least `|S|` points of `X` within
//! `h` of it. The search below walks the sorted candidate values of `h` and
//! looks for such a deficient set, only ever growing sets whose
//! neighbourhood is still smaller than `k + 1`.

use super::{Inclusion, MetricError, Result};

pub const DEFAULT_TUPLE_BUDGET: u64 = 2_000_000;

struct Meter {
    used: u64,
    budget: u64,
}

impl Meter {
    fn charge(&mut self, units: u64) -> Result<()> {
        self.used = self.used.saturating_add(units);
        if self.used > self.budget {
            Err(MetricError::BudgetExceeded {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

/// Hausdorff distance between the spaces of ordered `(k + 1)`-tuples of
/// distinct points of `pair.sub()` and `pair.sup()` under the max-product
/// metric, measured in the metric of the superspace.
///
/// `budget` caps the number of tuple evaluations; the computation stops
/// with [`MetricError::BudgetExceeded`] once it is spent.
pub fn hausdorff_config(pair: &Inclusion, k: usize, budget: u64) -> Result<f64> {
    let tuple_len = k + 1;
    let n = pair.sub().len();
    if n < tuple_len {
        return Err(MetricError::EmptyConfigSpace {
            tuple_len,
            points: n,
        });
    }
    let sup = pair.sup();
    let m = sup.len();
    let table: Vec<f64> = (0..m)
        .flat_map(|y| pair.embed().iter().map(move |&x| sup.dist(y, x)))
        .collect();
    let mut levels = table.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let mut meter = Meter { used: 0, budget };
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_deficient_set(&table, m, n, tuple_len, levels[mid], &mut meter)? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(levels[lo])
}

fn has_deficient_set(
    table: &[f64],
    m: usize,
    n: usize,
    tuple_len: usize,
    h: f64,
    meter: &mut Meter,
) -> Result<bool> {
    meter.charge((m * n) as u64)?;
    // Points with `tuple_len` or more neighbours can never sit in a
    // deficient set of size at most `tuple_len`.
    let mut small: Vec<Vec<usize>> = Vec::new();
    for y in 0..m {
        let row = &table[y * n..(y + 1) * n];
        let mut hood = Vec::with_capacity(tuple_len);
        for (x, &d) in row.iter().enumerate() {
            if d <= h {
                hood.push(x);
                if hood.len() == tuple_len {
                    break;
                }
            }
        }
        if hood.is_empty() {
            return Ok(true);
        }
        if hood.len() < tuple_len {
            small.push(hood);
        }
    }
    let union = Vec::with_capacity(tuple_len);
    grow(&small, 0, &union, 0, tuple_len, meter)
}

fn grow(
    small: &[Vec<usize>],
    start: usize,
    union: &[usize],
    size: usize,
    tuple_len: usize,
    meter: &mut Meter,
) -> Result<bool> {
    for idx in start..small.len() {
        meter.charge(1)?;
        let mut merged = union.to_vec();
        for &x in &small[idx] {
            if let Err(pos) = merged.binary_search(&x) {
                merged.insert(pos, x);
            }
        }
        let size = size + 1;
        if merged.len() < size {
            return Ok(true);
        }
        if merged.len() >= tuple_len || size == tuple_len {
            continue;
        }
        if grow(small, idx + 1, &merged, size, tuple_len, meter)? {
            return Ok(true);
        }
    }
    Ok(false)
}
