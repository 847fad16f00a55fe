//! Representing 1 by a binary diagonal form over the rational function field.

use num_traits::{One, Signed, Zero};

use super::SemiLocalRing;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::{poly_sqrt, psd_check};
use crate::scalar::{Gauss, Rat, Scalar};
use crate::twosquares::scalar_fejer_riesz;

/// `a x^2 + b y^2 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicSolution {
    pub x: RatFn<Rat>,
    pub y: RatFn<Rat>,
    pub a: RatFn<Rat>,
    pub b: RatFn<Rat>,
}

impl ConicSolution {
    pub fn holds(&self) -> bool {
        &(&self.a * &(&self.x * &self.x)) + &(&self.b * &(&self.y * &self.y)) == RatFn::one()
    }
}

/// Limits for the brute-force stage of [`represent_one`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConicBudget {
    pub max_degree: usize,
    pub max_height: i64,
    pub max_candidates: usize,
}

impl Default for ConicBudget {
    fn default() -> Self {
        ConicBudget {
            max_degree: 2,
            max_height: 6,
            max_candidates: 200_000,
        }
    }
}

/// Exact square root of a rational function.
pub(crate) fn ratfn_sqrt<S: Scalar>(f: &RatFn<S>) -> Option<RatFn<S>> {
    if f.is_zero() {
        return Some(RatFn::zero());
    }
    Some(RatFn::new(poly_sqrt(f.num())?, poly_sqrt(f.den())?))
}

fn is_psd(f: &RatFn<Rat>) -> Result<bool> {
    psd_check(&(f.num() * f.den()))
}

/// Sign-normalized solution: leading coefficients of both numerators
/// nonnegative.
fn canonical(x: RatFn<Rat>, y: RatFn<Rat>) -> (RatFn<Rat>, RatFn<Rat>) {
    let fix = |f: RatFn<Rat>| if f.num().lc().is_negative() { -f } else { f };
    (fix(x), fix(y))
}

/// Find `x, y` with `a x^2 + b y^2 = 1`, inside `ring` when one is given.
/// Closed forms are tried before a bounded search over `x = p/r, y = q/r`.
pub fn represent_one(
    a: &RatFn<Rat>,
    b: &RatFn<Rat>,
    ring: Option<&SemiLocalRing<Rat>>,
    budget: &ConicBudget,
) -> Result<ConicSolution> {
    if a.is_zero() || b.is_zero() || !is_psd(a)? || !is_psd(b)? {
        return Err(Error::NotPsd);
    }
    let ok = |x: &RatFn<Rat>, y: &RatFn<Rat>| ring.is_none_or(|r| r.contains(x) && r.contains(y));
    let done = |x: RatFn<Rat>, y: RatFn<Rat>| {
        let (x, y) = canonical(x, y);
        ConicSolution {
            x,
            y,
            a: a.clone(),
            b: b.clone(),
        }
    };
    if let Some(s) = ratfn_sqrt(a) {
        let x = s.inv();
        if ok(&x, &RatFn::zero()) {
            return Ok(done(x, RatFn::zero()));
        }
    }
    if let Some(s) = ratfn_sqrt(b) {
        let y = s.inv();
        if ok(&RatFn::zero(), &y) {
            return Ok(done(RatFn::zero(), y));
        }
    }
    if let Some(r) = ratfn_sqrt(&(a + b)) {
        let x = r.inv();
        if ok(&x, &x) {
            return Ok(done(x.clone(), x));
        }
    }
    if let Some(sol) = same_class(a, b) {
        if ok(&sol.0, &sol.1) {
            let (x, y) = sol;
            // symmetric in x and y when a = b; list the lower degree first
            let (x, y) = if a == b && x.num().degree() > y.num().degree() { (y, x) } else { (x, y) };
            return Ok(done(x, y));
        }
    }
    search(a, b, ring, budget).map(|(x, y)| done(x, y))
}

/// `b = a s^2` and `a` a norm from the Gaussian field: `x + i s y = 1/g*`.
fn same_class(a: &RatFn<Rat>, b: &RatFn<Rat>) -> Option<(RatFn<Rat>, RatFn<Rat>)> {
    let s = ratfn_sqrt(&(b / a))?;
    let p = a.num() * a.den();
    let g = scalar_fejer_riesz(&p).ok()?.as_complex();
    // w = g den / p has |w|^2 = den^2 / p = 1/a
    let wn = &g * &a.den().to_gauss();
    let re = RatFn::new(re_part(&wn), p.clone());
    let im = RatFn::new(im_part(&wn), p);
    Some((re, &im / &s))
}

fn re_part(p: &Poly<Gauss>) -> Poly<Rat> {
    Poly::new(p.coeffs().iter().map(|c| c.re.clone()).collect())
}

fn im_part(p: &Poly<Gauss>) -> Poly<Rat> {
    Poly::new(p.coeffs().iter().map(|c| c.im.clone()).collect())
}

fn small_polys(deg: usize, h: i64) -> Vec<Poly<Rat>> {
    let ints: Vec<i64> = std::iter::once(0).chain((1..=h).flat_map(|k| [k, -k])).collect();
    let mut out = vec![Vec::<i64>::new()];
    for _ in 0..=deg {
        out = out
            .into_iter()
            .flat_map(|pre| {
                ints.iter().map(move |&c| {
                    let mut v = pre.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out.iter().map(|cs| Poly::from_i64s(cs)).collect()
}

fn search(
    a: &RatFn<Rat>,
    b: &RatFn<Rat>,
    ring: Option<&SemiLocalRing<Rat>>,
    budget: &ConicBudget,
) -> Result<(RatFn<Rat>, RatFn<Rat>)> {
    let mut tried = 0usize;
    for deg in 0..=budget.max_degree {
        for h in 1..=budget.max_height {
            let ps = small_polys(deg, h);
            for p in &ps {
                for q in &ps {
                    if p.is_zero() && q.is_zero() {
                        continue;
                    }
                    tried += 1;
                    if tried > budget.max_candidates {
                        return Err(exhausted(budget));
                    }
                    let (pf, qf) = (RatFn::from_poly(p.clone()), RatFn::from_poly(q.clone()));
                    let val = &(a * &(&pf * &pf)) + &(b * &(&qf * &qf));
                    let Some(r) = ratfn_sqrt(&val) else { continue };
                    if r.is_zero() {
                        continue;
                    }
                    let (x, y) = (&pf / &r, &qf / &r);
                    if ring.is_none_or(|rg| rg.contains(&x) && rg.contains(&y)) {
                        return Ok((x, y));
                    }
                }
            }
        }
    }
    Err(exhausted(budget))
}

fn exhausted(budget: &ConicBudget) -> Error {
    Error::SearchExhausted(format!(
        "no representation of 1 within degree {} and height {}",
        budget.max_degree, budget.max_height
    ))
}
