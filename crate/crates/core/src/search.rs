//! Seeded restart driver and the single-site reassignment hill climber
//! used for extremal ratio searches over maps `Z_m^n -> M` with `M` finite.
//!
//! Objectives have the form `L(f)/R(f)` where both sides are weighted sums
//! of `d(f(x+s), f(x))^p` over a fixed list of shifts `s`. Changing `f` at
//! one site `x0` only touches the terms at `x0` and `x0 - s`, so each
//! candidate move is scored in `O(#shifts)`.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_budget, Result};
use crate::metric::{Metric, TorusDomain};
use crate::numeric::{derived_rng, pairwise_sum, powp};

/// Largest codomain whose `d^p` table is materialized.
pub const MAX_CODOMAIN: usize = 4096;

/// Runs `count` independent restarts, restart `i` drawing from stream `i`
/// of `seed`. Results come back in restart order whatever the thread count.
pub fn run_restarts<T, F>(count: usize, seed: u64, run: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| run(i, &mut derived_rng(seed, i as u64)))
        .collect()
}

/// `d(a, b)^p` for every pair of codomain points.
#[derive(Debug, Clone)]
pub struct PowerTable {
    size: usize,
    values: Vec<f64>,
}

impl PowerTable {
    pub fn new<M: Metric + ?Sized>(space: &M, p: f64) -> Result<Self> {
        let size = space.len();
        check_budget(size as u128, MAX_CODOMAIN as u128)?;
        let mut values = vec![0.0; size * size];
        for a in 0..size {
            for b in 0..size {
                if a != b {
                    values[a * size + b] = powp(space.dist(a, b), p);
                }
            }
        }
        Ok(Self { size, values })
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.size + b]
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }
}

#[derive(Debug, Clone)]
struct ShiftTerm {
    forward: Vec<usize>,
    backward: Vec<usize>,
    weight: f64,
}

/// `L(f) / R(f)` with `L`, `R` weighted shift sums.
#[derive(Debug, Clone)]
pub struct ShiftRatio {
    sites: usize,
    lhs: Vec<ShiftTerm>,
    rhs: Vec<ShiftTerm>,
}

fn terms(domain: &TorusDomain, shifts: &[(Vec<i64>, f64)]) -> Vec<ShiftTerm> {
    shifts
        .iter()
        .filter(|(s, _)| domain.shift(0, s) != 0)
        .map(|(s, w)| {
            let neg: Vec<i64> = s.iter().map(|c| -c).collect();
            ShiftTerm { forward: domain.shift_table(s), backward: domain.shift_table(&neg), weight: *w }
        })
        .collect()
}

/// Outcome of one climb.
#[derive(Debug, Clone, PartialEq)]
pub struct Climb {
    pub lhs: f64,
    pub rhs: f64,
    pub witness: Vec<usize>,
    pub sweeps: usize,
}

impl Climb {
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs > 0.0).then(|| self.lhs / self.rhs)
    }
}

impl ShiftRatio {
    /// Shifts congruent to zero contribute nothing and are dropped.
    pub fn new(domain: &TorusDomain, lhs: &[(Vec<i64>, f64)], rhs: &[(Vec<i64>, f64)]) -> Self {
        Self { sites: domain.size(), lhs: terms(domain, lhs), rhs: terms(domain, rhs) }
    }

    fn side(terms: &[ShiftTerm], f: &[usize], table: &PowerTable) -> f64 {
        let parts: Vec<f64> = terms
            .iter()
            .map(|t| {
                let row: Vec<f64> = (0..f.len()).map(|x| table.get(f[t.forward[x]], f[x])).collect();
                t.weight * pairwise_sum(&row)
            })
            .collect();
        pairwise_sum(&parts)
    }

    /// Exact `(L(f), R(f))`.
    pub fn totals(&self, f: &[usize], table: &PowerTable) -> (f64, f64) {
        (Self::side(&self.lhs, f, table), Self::side(&self.rhs, f, table))
    }

    fn local(terms: &[ShiftTerm], f: &[usize], x0: usize, table: &PowerTable, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for t in terms {
            let u = f[t.forward[x0]];
            let v = f[t.backward[x0]];
            for (b, slot) in out.iter_mut().enumerate() {
                *slot += t.weight * (table.get(u, b) + table.get(b, v));
            }
        }
    }

    /// Sweeps the sites in random order, moving each to the codomain point
    /// that most increases the ratio, until a sweep makes no move or
    /// `max_sweeps` is reached. Only strict improvements are taken.
    pub fn climb(&self, mut f: Vec<usize>, table: &PowerTable, max_sweeps: usize, rng: &mut ChaCha8Rng) -> Climb {
        let size = table.len();
        let (mut lhs, mut rhs) = self.totals(&f, table);
        let mut order: Vec<usize> = (0..self.sites).collect();
        let mut local_l = vec![0.0; size];
        let mut local_r = vec![0.0; size];
        let mut sweeps = 0;
        while sweeps < max_sweeps {
            sweeps += 1;
            order.shuffle(rng);
            let mut moved = false;
            for &x0 in &order {
                Self::local(&self.lhs, &f, x0, table, &mut local_l);
                Self::local(&self.rhs, &f, x0, table, &mut local_r);
                let a = f[x0];
                let current = if rhs > 0.0 { lhs / rhs } else { f64::NEG_INFINITY };
                let mut best = current;
                let mut choice = None;
                for b in 0..size {
                    if b == a {
                        continue;
                    }
                    let l = lhs + local_l[b] - local_l[a];
                    let r = rhs + local_r[b] - local_r[a];
                    if r <= 1e-300 {
                        continue;
                    }
                    let ratio = l / r;
                    if ratio > best + 1e-12 * best.abs().max(1e-300) {
                        best = ratio;
                        choice = Some((b, l, r));
                    }
                }
                if let Some((b, l, r)) = choice {
                    f[x0] = b;
                    lhs = l.max(0.0);
                    rhs = r.max(0.0);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        let (lhs, rhs) = self.totals(&f, table);
        Climb { lhs, rhs, witness: f, sweeps }
    }
}

/// Picks the largest ratio; ties go to the lexicographically smallest
/// witness table. Degenerate climbs (`R = 0`) are skipped.
pub fn best_climb(climbs: Vec<Climb>) -> Option<Climb> {
    let mut best: Option<Climb> = None;
    for c in climbs {
        let Some(r) = c.ratio() else { continue };
        let better = match &best {
            None => true,
            Some(b) => {
                let br = b.ratio().unwrap();
                r > br || (r == br && c.witness < b.witness)
            }
        };
        if better {
            best = Some(c);
        }
    }
    best
}
