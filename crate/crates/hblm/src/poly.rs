//! Polynomials over the base ring and the division-free characteristic
//! polynomial.
//!
//! The Berkowitz scheme is used for every charpol: it needs no division
//! by ring elements at all, so it is valid over `Z/p^n` and the
//! dual-number bases where Faddeev-LeVerrier style divisions by integers
//! vanish.  The "for all x" determinant condition is decided through
//! [`generic_charpol`]: one characteristic polynomial of the generic
//! element `sum t_k mu_k` in indeterminates `t_0..t_{g-1}`, compared as an
//! exact polynomial identity.

use crate::linalg::RMat;
use crate::rings::BaseRing;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Minimal commutative-ring interface for the Berkowitz recursion.
pub trait CRing {
    type El: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
}

impl CRing for BaseRing {
    type El = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        BaseRing::add(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        BaseRing::mul(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        BaseRing::neg(self, *a)
    }
}

/// Characteristic polynomial coefficients of an `n x n` matrix given by an
/// entry accessor, highest power first (`out[0] = 1`).
pub fn berkowitz_desc<R: CRing>(ring: &R, n: usize, entry: &dyn Fn(usize, usize) -> R::El) -> Vec<R::El> {
    if n == 0 {
        return vec![ring.one()];
    }
    let mut c = vec![ring.one(), ring.neg(&entry(0, 0))];
    for r in 2..=n {
        // first column of the (r+1) x r Toeplitz factor
        let mut t = Vec::with_capacity(r + 1);
        t.push(ring.one());
        t.push(ring.neg(&entry(r - 1, r - 1)));
        let s: Vec<R::El> = (0..r - 1).map(|i| entry(i, r - 1)).collect();
        let rrow: Vec<R::El> = (0..r - 1).map(|j| entry(r - 1, j)).collect();
        let mut w = s;
        for k in 2..=r {
            let mut acc = ring.zero();
            for (x, y) in rrow.iter().zip(w.iter()) {
                acc = ring.add(&acc, &ring.mul(x, y));
            }
            t.push(ring.neg(&acc));
            if k < r {
                let mut nw = Vec::with_capacity(r - 1);
                for i in 0..r - 1 {
                    let mut acc = ring.zero();
                    for (j, wj) in w.iter().enumerate() {
                        acc = ring.add(&acc, &ring.mul(&entry(i, j), wj));
                    }
                    nw.push(acc);
                }
                w = nw;
            }
        }
        let mut cn = Vec::with_capacity(r + 1);
        for i in 0..=r {
            let mut acc = ring.zero();
            for (j, cj) in c.iter().enumerate().take(i + 1) {
                acc = ring.add(&acc, &ring.mul(&t[i - j], cj));
            }
            cn.push(acc);
        }
        c = cn;
    }
    c
}

/// Univariate polynomial over the base ring, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    pub c: Vec<u64>,
}

impl UniPoly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        UniPoly { c }
    }

    pub fn zero() -> Self {
        UniPoly { c: Vec::new() }
    }

    pub fn x_pow_minus(ring: &BaseRing, e: usize, low: u64) -> Self {
        // X^e - low
        let mut c = vec![0; e + 1];
        c[0] = ring.neg(low);
        c[e] = 1;
        UniPoly::new(c)
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn add(&self, ring: &BaseRing, other: &UniPoly) -> UniPoly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0; n];
        for (i, x) in c.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = other.c.get(i).copied().unwrap_or(0);
            *x = ring.add(a, b);
        }
        UniPoly::new(c)
    }

    pub fn sub(&self, ring: &BaseRing, other: &UniPoly) -> UniPoly {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &BaseRing) -> UniPoly {
        UniPoly::new(self.c.iter().map(|&x| ring.neg(x)).collect())
    }

    pub fn mul(&self, ring: &BaseRing, other: &UniPoly) -> UniPoly {
        if self.c.is_empty() || other.c.is_empty() {
            return UniPoly::zero();
        }
        let mut c = vec![0; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if b != 0 {
                    c[i + j] = ring.add(c[i + j], ring.mul(a, b));
                }
            }
        }
        UniPoly::new(c)
    }

    /// Evaluate at an extension element (coefficients embed through the
    /// base).
    pub fn eval_ext(&self, ctx: &crate::rings::RingCtx, x: &[u64]) -> Vec<u64> {
        let mut acc = ctx.zero(crate::rings::Level::Ext).coeffs;
        for &coef in self.c.iter().rev() {
            acc = ctx.ext_mul(&acc, x);
            acc[0] = ctx.base.add(acc[0], coef);
        }
        acc
    }

    /// Evaluate at a square matrix over the base.
    pub fn eval_mat(&self, ring: &BaseRing, a: &RMat) -> RMat {
        let n = a.rows;
        let mut acc = RMat::zeros(n, n);
        for &coef in self.c.iter().rev() {
            acc = acc.mul(ring, a);
            for i in 0..n {
                acc[(i, i)] = ring.add(acc[(i, i)], coef);
            }
        }
        acc
    }

    /// Monic display `X^d - b_{d-1}*X^{d-1} - ...` where `b = -coeff`;
    /// matches the convention used by the CLI charpol output.
    pub fn fmt_monic(&self, ring: &BaseRing) -> String {
        let Some(d) = self.deg() else { return "0".to_string() };
        let head = if d == 0 {
            return ring.fmt_elem(self.c[0]);
        } else if d == 1 {
            "X".to_string()
        } else {
            format!("X^{d}")
        };
        let mut out = head;
        for k in (0..d).rev() {
            let b = ring.neg(self.c[k]);
            if b == 0 {
                continue;
            }
            let coef = ring.fmt_elem(b);
            let coef = if coef.contains('+') { format!("({coef})") } else { coef };
            let term = if k == 0 {
                coef
            } else {
                let xs = if k == 1 { "X".to_string() } else { format!("X^{k}") };
                if coef == "1" {
                    xs
                } else {
                    format!("{coef}*{xs}")
                }
            };
            out.push_str(&format!(" - {term}"));
        }
        out
    }
}

/// Characteristic polynomial of a square matrix over the base ring,
/// ascending coefficients, monic of degree `a.rows`.
pub fn charpol(ring: &BaseRing, a: &RMat) -> UniPoly {
    assert_eq!(a.rows, a.cols);
    let mut c = berkowitz_desc(ring, a.rows, &|i, j| a[(i, j)]);
    c.reverse();
    UniPoly { c }
}

/// Multivariate polynomial in `nv` named indeterminates over the base
/// ring; canonical form drops zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub nv: usize,
    pub terms: BTreeMap<Vec<u16>, u64>,
}

impl MultiPoly {
    pub fn zero(nv: usize) -> Self {
        MultiPoly { nv, terms: BTreeMap::new() }
    }

    pub fn constant(nv: usize, c: u64) -> Self {
        let mut t = BTreeMap::new();
        if c != 0 {
            t.insert(vec![0; nv], c);
        }
        MultiPoly { nv, terms: t }
    }

    pub fn var(nv: usize, i: usize, coeff: u64) -> Self {
        let mut exp = vec![0u16; nv];
        exp[i] = 1;
        let mut t = BTreeMap::new();
        if coeff != 0 {
            t.insert(exp, coeff);
        }
        MultiPoly { nv, terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn fmt_with(&self, ring: &BaseRing, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (exp, &coeff) in &self.terms {
            let mut factors = Vec::new();
            let cs = ring.fmt_elem(coeff);
            if cs != "1" || exp.iter().all(|&x| x == 0) {
                let cs = if cs.contains('+') { format!("({cs})") } else { cs };
                factors.push(cs);
            }
            for (i, &x) in exp.iter().enumerate() {
                if x == 1 {
                    factors.push(names(i));
                } else if x > 1 {
                    factors.push(format!("{}^{}", names(i), x));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// The polynomial ring `R[t_0..t_{nv-1}]` as a coefficient ring for the
/// Berkowitz recursion.
pub struct MPolyRing {
    pub base: BaseRing,
    pub nv: usize,
}

impl CRing for MPolyRing {
    type El = MultiPoly;
    fn zero(&self) -> MultiPoly {
        MultiPoly::zero(self.nv)
    }
    fn one(&self) -> MultiPoly {
        MultiPoly::constant(self.nv, 1)
    }
    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let mut out = a.terms.clone();
        for (exp, &coeff) in &b.terms {
            let entry = out.entry(exp.clone()).or_insert(0);
            *entry = self.base.add(*entry, coeff);
            if *entry == 0 {
                out.remove(exp);
            }
        }
        MultiPoly { nv: self.nv, terms: out }
    }
    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let mut out: BTreeMap<Vec<u16>, u64> = BTreeMap::new();
        for (ea, &ca) in &a.terms {
            for (eb, &cb) in &b.terms {
                let prod = self.base.mul(ca, cb);
                if prod == 0 {
                    continue;
                }
                let exp: Vec<u16> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                let entry = out.entry(exp.clone()).or_insert(0);
                *entry = self.base.add(*entry, prod);
                if *entry == 0 {
                    out.remove(&exp);
                }
            }
        }
        MultiPoly { nv: self.nv, terms: out }
    }
    fn neg(&self, a: &MultiPoly) -> MultiPoly {
        let terms = a.terms.iter().map(|(e, &c)| (e.clone(), self.base.neg(c))).collect();
        MultiPoly { nv: self.nv, terms }
    }
}

/// Characteristic polynomial of the generic element `sum t_k A_k`, as
/// X-coefficients (ascending) in `R[t_0..t_{g-1}]`.  The family must
/// commute pairwise (it is the action of a commutative ring).
pub fn generic_charpol(ring: &BaseRing, mats: &[RMat]) -> Result<Vec<MultiPoly>> {
    let nv = mats.len();
    assert!(nv > 0);
    let n = mats[0].rows;
    for m in mats {
        assert!(m.rows == n && m.cols == n);
    }
    for a in 0..nv {
        for b in a + 1..nv {
            if mats[a].mul(ring, &mats[b]) != mats[b].mul(ring, &mats[a]) {
                return Err(Error::NonCommutingFamily);
            }
        }
    }
    let pring = MPolyRing { base: *ring, nv };
    let entry = |i: usize, j: usize| {
        let mut acc = pring.zero();
        for (k, m) in mats.iter().enumerate() {
            let c = m[(i, j)];
            if c != 0 {
                acc = pring.add(&acc, &MultiPoly::var(nv, k, c));
            }
        }
        acc
    };
    let mut c = berkowitz_desc(&pring, n, &entry);
    c.reverse();
    Ok(c)
}
