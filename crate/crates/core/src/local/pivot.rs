//! Prime avoidance: vectors whose form value is a unit of the ring.

use num_traits::{One, Zero};

use super::SemiLocalRing;
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::scalar::Scalar;

/// Search limits: entry degree, integer coefficient height, and the total
/// number of candidate vectors evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PivotBudget {
    pub max_degree: usize,
    pub max_height: i64,
    pub max_candidates: usize,
}

impl Default for PivotBudget {
    fn default() -> Self {
        PivotBudget {
            max_degree: 2,
            max_height: 2,
            max_candidates: 60_000,
        }
    }
}

/// `v* B v`.
pub(crate) fn form_value<S: Scalar>(b: &RatMatrix<S>, v: &[Poly<S>]) -> RatFn<S> {
    let n = v.len();
    let mut acc = RatFn::zero();
    for j in 0..n {
        if v[j].is_zero() {
            continue;
        }
        let mut col = RatFn::zero();
        for i in 0..n {
            if !v[i].is_zero() && !b.get(i, j).is_zero() {
                col = &col + &(&RatFn::from_poly(v[i].star()) * b.get(i, j));
            }
        }
        acc = &acc + &(&col * &RatFn::from_poly(v[j].clone()));
    }
    acc
}

/// Scalars `a + b i` with `|a|, |b| <= h`, smallest first; only integers for
/// a real field.
fn coefficient_values<S: Scalar>(h: i64) -> Vec<S> {
    let ints: Vec<i64> = std::iter::once(0).chain((1..=h).flat_map(|k| [k, -k])).collect();
    match S::imag_unit() {
        None => ints.iter().map(|&k| S::from_i64(k)).collect(),
        Some(i) => {
            let mut pairs: Vec<(i64, i64)> = ints.iter().flat_map(|&a| ints.iter().map(move |&b| (a, b))).collect();
            pairs.sort_by_key(|&(a, b)| a.abs().max(b.abs()));
            pairs
                .into_iter()
                .map(|(a, b)| S::from_i64(a) + i.clone() * S::from_i64(b))
                .collect()
        }
    }
}

/// Candidate vectors for one (degree, height) level: one entry equal to 1,
/// the others polynomials of degree at most `deg`, sorted by support size.
fn level<S: Scalar>(n: usize, deg: usize, h: i64, cap: usize) -> Vec<Vec<Poly<S>>> {
    let values = coefficient_values::<S>(h);
    let slots = (n - 1) * (deg + 1);
    let base = values.len();
    let mut out = Vec::new();
    for k in 0..n {
        let mut idx = vec![0usize; slots];
        loop {
            let mut v = Vec::with_capacity(n);
            let mut slot = 0;
            for i in 0..n {
                if i == k {
                    v.push(Poly::one());
                } else {
                    let cs = (0..=deg).map(|d| values[idx[slot + d]].clone()).collect();
                    slot += deg + 1;
                    v.push(Poly::new(cs));
                }
            }
            out.push(v);
            if out.len() >= cap {
                return sort_level(out);
            }
            // odometer
            let mut p = slots;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < base {
                    break;
                }
                idx[p] = 0;
            }
            if idx.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    sort_level(out)
}

fn sort_level<S: Scalar>(mut vs: Vec<Vec<Poly<S>>>) -> Vec<Vec<Poly<S>>> {
    vs.sort_by_key(|v| v.iter().filter(|p| !p.is_zero()).count());
    vs
}

fn levels(budget: &PivotBudget) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for d in 0..=budget.max_degree {
        for h in 1..=budget.max_height {
            out.push((d, h));
        }
    }
    out
}

fn check_precondition<S: Scalar>(b: &RatMatrix<S>, ring: &SemiLocalRing<S>) -> Result<()> {
    let mut g = ring.modulus().clone();
    for e in b.entries() {
        if !ring.contains(e) {
            return Err(Error::PreconditionViolated("entry outside the ring".into()));
        }
        g = g.gcd(e.num());
    }
    if g.is_constant() {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!("all entries divisible by {g}")))
    }
}

/// First vector, in degree-then-height order, with `v* B v` a unit.
pub fn pivot_search<S: Scalar>(b: &RatMatrix<S>, ring: &SemiLocalRing<S>) -> Result<Vec<Poly<S>>> {
    pivot_search_tiered(b, ring, &PivotBudget::default(), 1, |_| 0).map(|mut c| c.remove(0).0)
}

/// Unit-valued candidates ranked by `rank` (lower is better). Stops at the
/// first rank-0 hit; otherwise finishes the level where units first appear
/// (searching at least the two constant levels) and returns up to `keep`
/// candidates, best rank first.
pub fn pivot_search_tiered<S: Scalar>(
    b: &RatMatrix<S>,
    ring: &SemiLocalRing<S>,
    budget: &PivotBudget,
    keep: usize,
    rank: impl Fn(&RatFn<S>) -> u32,
) -> Result<Vec<(Vec<Poly<S>>, RatFn<S>)>> {
    let n = b.rows();
    check_precondition(b, ring)?;
    if n == 0 {
        return Err(Error::PreconditionViolated("empty form".into()));
    }
    let mut found: Vec<(u32, Vec<Poly<S>>, RatFn<S>)> = Vec::new();
    let mut evaluated = 0usize;
    for (li, (d, h)) in levels(budget).into_iter().enumerate() {
        if d > 0 && n == 1 {
            break;
        }
        for v in level::<S>(n, d, h, budget.max_candidates) {
            evaluated += 1;
            if evaluated > budget.max_candidates {
                break;
            }
            let val = form_value(b, &v);
            if !ring.is_unit(&val) {
                continue;
            }
            let r = rank(&val);
            if r == 0 {
                return Ok(vec![(v, val)]);
            }
            if !found.iter().any(|(_, w, _)| *w == v) {
                found.push((r, v, val));
            }
        }
        let best = found.iter().map(|(r, _, _)| *r).min();
        if best.is_some_and(|r| r < 3) && (found.len() >= keep || li >= 1) {
            break;
        }
        if n == 1 {
            break;
        }
    }
    if found.is_empty() {
        return Err(Error::SearchExhausted(format!(
            "no unit-valued pivot within degree {} and height {}",
            budget.max_degree, budget.max_height
        )));
    }
    found.sort_by_key(|(r, _, _)| *r);
    found.truncate(keep);
    Ok(found.into_iter().map(|(_, v, val)| (v, val)).collect())
}
