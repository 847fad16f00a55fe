//! Fixed-precision root approximation and approximate scalar Fejér–Riesz.
//!
//! Numbers are kept as exact rationals rounded to a binary mantissa of the
//! configured width after every operation, so residuals can be evaluated
//! exactly on the rounded output.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::{aberth_f64, count_real_roots, psd_check, squarefree_decomposition};
use crate::scalar::{gauss_cmp, Gauss, Rat, Scalar};

pub const DEFAULT_PRECISION: u32 = 256;

/// Round `q` to `prec` significant bits.
pub fn round_rat(q: &Rat, prec: u32) -> Rat {
    if q.is_zero() {
        return Rat::zero();
    }
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let s = e - prec as i64;
    let two = BigInt::from(2);
    let scaled = if s >= 0 {
        q / Rat::from_integer(num_traits::pow(two.clone(), s as usize))
    } else {
        q * Rat::from_integer(num_traits::pow(two.clone(), (-s) as usize))
    };
    let m = scaled.round();
    if s >= 0 {
        m * Rat::from_integer(num_traits::pow(two, s as usize))
    } else {
        m / Rat::from_integer(num_traits::pow(two, (-s) as usize))
    }
}

fn round_gauss(z: &Gauss, prec: u32) -> Gauss {
    Gauss::new(round_rat(&z.re, prec), round_rat(&z.im, prec))
}

pub(crate) fn from_c64(z: Complex64) -> Gauss {
    let conv = |x: f64| Rat::from_float(x).unwrap_or_else(Rat::zero);
    Gauss::new(conv(z.re), conv(z.im))
}

pub fn to_c64(z: &Gauss) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Upper bound for `sqrt(q)`, `q >= 0`.
fn sqrt_upper(q: &Rat) -> Rat {
    if q.is_zero() {
        return Rat::zero();
    }
    let n = q.numer() * q.denom();
    let r = n.sqrt() + BigInt::one();
    Rat::new(r, q.denom().clone())
}

fn eval_rounded(f: &Poly<Gauss>, z: &Gauss, prec: u32) -> (Gauss, Gauss) {
    let mut p = Gauss::zero();
    let mut dp = Gauss::zero();
    for c in f.coeffs().iter().rev() {
        dp = round_gauss(&(&dp * z + &p), prec);
        p = round_gauss(&(&p * z + c), prec);
    }
    (p, dp)
}

/// Refine simple-root approximations of a square-free `f` by Aberth steps in
/// `prec`-bit arithmetic, starting from double-precision seeds.
pub fn refine_roots(f: &Poly<Gauss>, seeds: &[Complex64], prec: u32) -> Vec<Gauss> {
    let n = seeds.len();
    let mut z: Vec<Gauss> = seeds.iter().map(|s| from_c64(*s)).collect();
    let tol = Rat::new(BigInt::one(), num_traits::pow(BigInt::from(2), 2 * prec as usize));
    for _ in 0..4 * (prec as usize) {
        let mut done = true;
        for i in 0..n {
            let (p, dp) = eval_rounded(f, &z[i], prec);
            if p.is_zero() || dp.is_zero() {
                continue;
            }
            let ratio = round_gauss(&(&p / &dp), prec);
            let mut s = Gauss::zero();
            for j in 0..n {
                if j != i {
                    let diff = &z[i] - &z[j];
                    if !diff.is_zero() {
                        s = round_gauss(&(s + Gauss::one() / diff), prec);
                    }
                }
            }
            let denom = Gauss::one() - &ratio * &s;
            if denom.is_zero() {
                continue;
            }
            let w = round_gauss(&(&ratio / &denom), prec);
            z[i] = round_gauss(&(&z[i] - &w), prec);
            let scale = Rat::one() + z[i].norm_sqr();
            if w.norm_sqr() > &tol * &scale {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    z
}

/// A root enclosed in the disc `|x - center| <= radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRoot {
    pub center: Gauss,
    pub radius: Rat,
    pub multiplicity: usize,
}

fn squarefree_roots_approx(f: &Poly<Gauss>, prec: u32) -> Vec<ApproxRoot> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let seeds: Vec<Complex64> = f.coeffs().iter().map(to_c64).collect();
    let zs = refine_roots(f, &aberth_f64(&seeds), prec);
    let df = f.derivative();
    zs.into_iter()
        .map(|z| {
            // Inclusion disc: some root lies within n |f(z)/f'(z)| of z.
            let fz = f.eval(&z).norm_sqr();
            let dz = df.eval(&z).norm_sqr();
            let radius = if dz.is_zero() {
                Rat::from_integer(BigInt::from(u64::MAX))
            } else {
                let nn = Rat::from_integer(BigInt::from(n * n));
                sqrt_upper(&(nn * fz / dz))
            };
            ApproxRoot {
                center: z,
                radius,
                multiplicity: 1,
            }
        })
        .collect()
}

/// Approximate roots of any nonzero polynomial with inclusion discs.
pub fn approx_roots<S: Scalar>(p: &Poly<S>, prec: u32) -> Result<Vec<ApproxRoot>> {
    if p.is_zero() {
        return Err(Error::PreconditionViolated("roots of the zero polynomial".into()));
    }
    let g = p.to_gauss();
    let mut out = Vec::new();
    for (f, m) in squarefree_decomposition(&g) {
        for mut r in squarefree_roots_approx(&f, prec) {
            r.multiplicity = m;
            out.push(r);
        }
    }
    out.sort_by(|a, b| gauss_cmp(&a.center, &b.center));
    Ok(out)
}

/// Result of the approximate scalar factorization `d ~ g* g`.
#[derive(Clone, Debug)]
pub struct ApproxFactor {
    pub g: Poly<Gauss>,
    /// Largest coefficient magnitude of `g* g - d`, rounded up.
    pub residual: Rat,
}

/// Fejér–Riesz factor of a real psd polynomial in `prec`-bit arithmetic.
/// Roots need not lie in Q(i).
pub fn approx_fejer_riesz(d: &Poly<Rat>, prec: u32) -> Result<ApproxFactor> {
    if d.is_zero() || !psd_check(d)? {
        return Err(Error::NotPsd);
    }
    let lc = d.lc();
    let mut g = Poly::constant(Gauss::from_rat(round_rat(&sqrt_upper_precise(&lc, prec), prec)));
    for (f, m) in squarefree_decomposition(d) {
        let real_count = count_real_roots(&f);
        let mut roots = squarefree_roots_approx(&f.to_gauss(), prec);
        // the real roots are the ones closest to the axis
        roots.sort_by(|a, b| a.center.im.abs().cmp(&b.center.im.abs()));
        for (k, r) in roots.into_iter().enumerate() {
            let (root, power) = if k < real_count {
                (Gauss::from_rat(r.center.re.clone()), m / 2)
            } else if r.center.im.is_positive() {
                (r.center.clone(), m)
            } else {
                continue;
            };
            for _ in 0..power {
                g = &g * &Poly::linear(root.clone());
            }
        }
    }
    let resid = &(&g.star() * &g) - &d.to_gauss();
    let residual = resid
        .coeffs()
        .iter()
        .map(|c| sqrt_upper(&c.norm_sqr()))
        .max()
        .unwrap_or_else(Rat::zero);
    Ok(ApproxFactor { g, residual })
}

/// `sqrt(q)` to about `prec` bits via integer square root.
fn sqrt_upper_precise(q: &Rat, prec: u32) -> Rat {
    let shift = num_traits::pow(BigInt::from(2), 2 * prec as usize);
    let n = q.numer() * q.denom() * &shift;
    let r = n.sqrt();
    Rat::new(r, q.denom() * num_traits::pow(BigInt::from(2), prec as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ri};

    #[test]
    fn rounding_keeps_mantissa_width() {
        let q = rat(1, 3);
        let r = round_rat(&q, 64);
        assert!((&r - &q).abs() < rat(1, 1 << 60));
        assert_eq!(round_rat(&ri(5), 64), ri(5));
    }

    #[test]
    fn irrational_factor_has_tiny_residual() {
        // t^2 + 2 and t^4 + t^2 + 1 have roots outside Q(i)
        for d in [
            Poly::from_i64s(&[2, 0, 1]),
            Poly::from_i64s(&[1, 0, 1, 0, 1]),
            Poly::from_i64s(&[3, 0, 0, 0, 0, 0, 2]),
        ] {
            let f = approx_fejer_riesz(&d, DEFAULT_PRECISION).unwrap();
            assert!(f.residual < rat(1, 1) / Rat::from_integer(num_traits::pow(BigInt::from(10), 30)));
            assert_eq!(f.g.degree(), Some(d.degree().unwrap() / 2));
        }
    }

    #[test]
    fn discs_contain_known_roots() {
        let p: Poly<Rat> = Poly::from_i64s(&[-2, 0, 1]);
        let rs = approx_roots(&p, 128).unwrap();
        assert_eq!(rs.len(), 2);
        for r in &rs {
            // |c^2 - 2| small means c near ±sqrt 2
            let c2 = &r.center * &r.center;
            assert!((c2.re - ri(2)).abs() < rat(1, 1 << 40));
            assert!(r.radius < rat(1, 1 << 40));
        }
    }
}
