//! Smith normal form over `K[t]` with unimodular transforms.

use num_traits::{One, Zero};

use crate::matrix::{Coeff, Matrix, PolyMatrix};
use crate::poly::Poly;

/// `S M T = D` with `D` diagonal carrying the monic invariant factors.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithData<S: Coeff> {
    pub invariant_factors: Vec<Poly<S>>,
    pub s: PolyMatrix<S>,
    pub t: PolyMatrix<S>,
    pub d: PolyMatrix<S>,
}

impl<S: Coeff> SmithData<S> {
    /// Exact check of `S M T = D`, unimodularity, and the divisibility chain.
    pub fn verify(&self, m: &PolyMatrix<S>) -> bool {
        let unimodular = |x: &PolyMatrix<S>| {
            let d = x.det();
            !d.is_zero() && d.is_constant()
        };
        let chain = self
            .invariant_factors
            .windows(2)
            .all(|w| w[0].divides(&w[1]));
        self.s.mul(m).mul(&self.t) == self.d
            && unimodular(&self.s)
            && unimodular(&self.t)
            && chain
            && self.invariant_factors.iter().all(Poly::is_monic)
    }
}

/// Smallest-degree nonzero entry in the trailing block, lowest index first.
fn pivot<S: Coeff>(a: &PolyMatrix<S>, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, (usize, usize))> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            if let Some(d) = a.get(i, j).degree() {
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, (i, j)));
                }
            }
        }
    }
    best.map(|(_, p)| p)
}

pub fn smith_normal_form<S: Coeff>(m: &PolyMatrix<S>) -> SmithData<S> {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut s = PolyMatrix::<S>::identity(r);
    let mut t = PolyMatrix::<S>::identity(c);
    let mut factors = Vec::new();
    for k in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = pivot(&a, k) else {
                break;
            };
            a.swap_rows(k, pi);
            s.swap_rows(k, pi);
            a.swap_cols(k, pj);
            t.swap_cols(k, pj);
            let p = a.get(k, k).clone();
            let mut clean = true;
            for i in k + 1..r {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let (q, rem) = a.get(i, k).div_rem(&p);
                let q = -q;
                a.add_row(i, k, &q);
                s.add_row(i, k, &q);
                clean &= rem.is_zero();
            }
            for j in k + 1..c {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let (q, rem) = a.get(k, j).div_rem(&p);
                let q = -q;
                a.add_col(j, k, &q);
                t.add_col(j, k, &q);
                clean &= rem.is_zero();
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (k + 1..r).find(|&i| (k + 1..c).any(|j| !p.divides(a.get(i, j))));
            match bad {
                Some(i) => {
                    let one = Poly::one();
                    a.add_row(k, i, &one);
                    s.add_row(k, i, &one);
                }
                None => break,
            }
        }
        let p = a.get(k, k).clone();
        if p.is_zero() {
            break;
        }
        let inv = Poly::constant(p.lc().inv());
        a.scale_row(k, &inv);
        s.scale_row(k, &inv);
        factors.push(a.get(k, k).clone());
    }
    SmithData {
        invariant_factors: factors,
        s,
        t,
        d: a,
    }
}

/// Diagonal matrix with the given entries padded by zeros to `rows x cols`.
pub fn padded_diag<S: Coeff>(entries: &[Poly<S>], rows: usize, cols: usize) -> PolyMatrix<S> {
    Matrix::from_fn(rows, cols, |i, j| {
        if i == j && i < entries.len() {
            entries[i].clone()
        } else {
            Poly::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    type P = Poly<Rat>;

    fn pm(rows: Vec<Vec<&[i64]>>) -> PolyMatrix<Rat> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(P::from_i64s).collect()).collect())
    }

    #[test]
    fn examples() {
        let m = pm(vec![vec![&[0, 1], &[]], vec![&[], &[0, 0, 0, 1]]]);
        let sd = smith_normal_form(&m);
        assert_eq!(sd.invariant_factors, vec![P::t(), P::from_i64s(&[0, 0, 0, 1])]);
        assert!(sd.verify(&m));
        let m = pm(vec![vec![&[1, 0, 1], &[0, 1]], vec![&[0, 1], &[1]]]);
        let sd = smith_normal_form(&m);
        assert_eq!(sd.invariant_factors, vec![P::one(), P::one()]);
        assert!(sd.verify(&m));
        let m = pm(vec![vec![&[1, 0, 1], &[0, 0, 0, 1]], vec![&[0, 0, 0, 1], &[1, 0, 0, 0, 1]]]);
        let sd = smith_normal_form(&m);
        assert_eq!(sd.invariant_factors, vec![P::one(), P::from_i64s(&[1, 0, 1, 0, 1])]);
        assert!(sd.verify(&m));
        let z = PolyMatrix::<Rat>::zeros(2, 2);
        assert!(smith_normal_form(&z).invariant_factors.is_empty());
    }

    #[test]
    fn divisibility_fixup() {
        // diag(t, t+1) has factors (1, t(t+1))
        let m = pm(vec![vec![&[0, 1], &[]], vec![&[], &[1, 1]]]);
        let sd = smith_normal_form(&m);
        assert_eq!(sd.invariant_factors, vec![P::one(), P::from_i64s(&[0, 1, 1])]);
        assert!(sd.verify(&m));
        let r = pm(vec![vec![&[1, 1], &[0, 1], &[2]], vec![&[0, 0, 1], &[3], &[1, 1]]]);
        let sd = smith_normal_form(&r);
        assert!(sd.verify(&r));
    }
}
