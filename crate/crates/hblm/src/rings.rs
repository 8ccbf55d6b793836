//! The coefficient rings: a finite chain ring `R` (`Z/p^n`, `F_p` or
//! `F_p[eps]`) and the extension `O_R = R[w]/(m(w))[pi]/(pi^e - p*u)`.
//!
//! Base-ring elements are packed into a single `u64` (`c0 + c1*p^n` with
//! `c1` the eps-coefficient); extension elements are coefficient vectors
//! over the base, one slot per monomial `w^b * pi^c`.  All arithmetic is
//! exact and every operation is a pure function of its inputs, so a built
//! [`RingCtx`] can be shared freely between threads.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ring level of an [`Elem`]: the base chain ring `R` or the extension `O_R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Base,
    Ext,
}

/// Construction data for the ring tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    /// Residue characteristic.
    pub p: u64,
    /// Base precision: the chain ring starts from `Z/p^n`.
    pub n: u32,
    /// Unramified degree; `f > 1` adjoins a root `w` of `m`.
    pub f: u32,
    /// Adjoin a square-zero generator `eps` to the base (dual numbers).
    pub eps: bool,
    /// Eisenstein degree: `pi^e = p*u`.
    pub e: u32,
    /// Unit constant of the Eisenstein relation.
    pub u: u64,
    /// Monic minimal polynomial of `w` over `F_p`, ascending coefficients
    /// including the leading 1 (length `f + 1`); `None` when `f = 1`.
    pub m: Option<Vec<u64>>,
}

impl RingSpec {
    pub fn new(p: u64, n: u32, f: u32, eps: bool, e: u32, u: u64) -> Self {
        let m = if f > 1 { default_min_poly(p, f) } else { None };
        RingSpec { p, n, f, eps, e, u, m }
    }

    /// Single-line `key=value` serialization, e.g.
    /// `p=3 n=1 f=1 eps=0 e=2 u=1 m=-`.
    pub fn to_line(&self) -> String {
        let m = match &self.m {
            None => "-".to_string(),
            Some(c) => c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        };
        format!(
            "p={} n={} f={} eps={} e={} u={} m={}",
            self.p,
            self.n,
            self.f,
            if self.eps { 1 } else { 0 },
            self.e,
            self.u,
            m
        )
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let mut spec = RingSpec { p: 0, n: 1, f: 1, eps: false, e: 1, u: 1, m: None };
        for tok in line.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{tok}`")))?;
            let bad = |_| Error::Parse(format!("bad value for {key}: `{val}`"));
            match key {
                "p" => spec.p = val.parse().map_err(bad)?,
                "n" => spec.n = val.parse().map_err(bad)?,
                "f" => spec.f = val.parse().map_err(bad)?,
                "eps" => spec.eps = val == "1" || val == "true",
                "e" => spec.e = val.parse().map_err(bad)?,
                "u" => spec.u = val.parse().map_err(bad)?,
                "m" => {
                    spec.m = if val == "-" {
                        None
                    } else {
                        Some(
                            val.split(',')
                                .map(|c| c.parse().map_err(|_| Error::Parse(format!("bad m coefficient `{c}`"))))
                                .collect::<Result<Vec<u64>>>()?,
                        )
                    }
                }
                _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
            }
        }
        if spec.p == 0 {
            return Err(Error::Parse("missing p".into()));
        }
        if spec.f > 1 && spec.m.is_none() {
            spec.m = default_min_poly(spec.p, spec.f);
        }
        Ok(spec)
    }

    /// Short slug usable in file names: `p2_n1_f1_eps0_e2_u1`.
    pub fn slug(&self) -> String {
        format!(
            "p{}_n{}_f{}_eps{}_e{}_u{}",
            self.p,
            self.n,
            self.f,
            if self.eps { 1 } else { 0 },
            self.e,
            self.u
        )
    }

    /// Human name of the base ring, e.g. `F3[eps]` or `Z/9`.
    pub fn base_name(&self) -> String {
        if self.eps {
            format!("F{}[eps]", self.p)
        } else if self.n == 1 {
            format!("F{}", self.p)
        } else {
            format!("Z/{}", self.p.pow(self.n))
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial remainder over `F_p`, both operands ascending, divisor monic.
fn poly_rem_fp(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|c| c % p).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let k = r.len() - 1 - db;
        if lead != 0 {
            for (s, &bc) in b.iter().enumerate() {
                r[k + s] = (r[k + s] + p * p - lead * (bc % p) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_is_zero(r: &[u64]) -> bool {
    r.iter().all(|&c| c == 0)
}

/// Irreducibility of a monic polynomial over `F_p` by trial division with
/// all monic divisors of degree up to `deg/2`.
fn irreducible_mod_p(p: u64, m: &[u64]) -> bool {
    let deg = m.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        // monic candidates of degree d, low coefficients counted in base p
        let total = p.pow(d as u32);
        for idx in 0..total {
            let mut cand = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                cand.push(t % p);
                t /= p;
            }
            cand.push(1);
            if poly_is_zero(&poly_rem_fp(p, m, &cand)) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `f`
/// over `F_p`; deterministic default for the unramified part.
pub fn default_min_poly(p: u64, f: u32) -> Option<Vec<u64>> {
    let d = f as usize;
    let total = p.checked_pow(f)?;
    for idx in 0..total {
        let mut cand = Vec::with_capacity(d + 1);
        let mut t = idx;
        for _ in 0..d {
            cand.push(t % p);
            t /= p;
        }
        cand.push(1);
        if irreducible_mod_p(p, &cand) {
            return Some(cand);
        }
    }
    None
}

/// The finite chain ring `R`.  Elements are encoded as `c0 + c1 * p^n`
/// where `c1` is the `eps`-coefficient (always 0 without `eps`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseRing {
    pub p: u64,
    pub n: u32,
    pub eps: bool,
    pn: u64,
}

impl BaseRing {
    pub fn new(p: u64, n: u32, eps: bool) -> Self {
        BaseRing { p, n, eps, pn: p.pow(n) }
    }

    pub fn size(&self) -> u64 {
        if self.eps {
            self.pn * self.pn
        } else {
            self.pn
        }
    }

    /// Nilpotency degree of the maximal ideal generator.
    pub fn chain_len(&self) -> u32 {
        if self.eps {
            2
        } else {
            self.n
        }
    }

    pub fn is_field(&self) -> bool {
        self.chain_len() == 1
    }

    pub fn split(&self, x: u64) -> (u64, u64) {
        (x % self.pn, x / self.pn)
    }

    pub fn join(&self, c0: u64, c1: u64) -> u64 {
        debug_assert!(c0 < self.pn && (c1 == 0 || self.eps));
        c0 + c1 * self.pn
    }

    pub fn from_int(&self, x: i64) -> u64 {
        let m = self.pn as i64;
        (((x % m) + m) % m) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (a0, a1) = self.split(a);
        let (b0, b1) = self.split(b);
        self.join((a0 + b0) % self.pn, (a1 + b1) % self.pn)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let (a0, a1) = self.split(a);
        self.join((self.pn - a0) % self.pn, (self.pn - a1) % self.pn)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let (a0, a1) = self.split(a);
        let (b0, b1) = self.split(b);
        // eps^2 = 0
        self.join((a0 * b0) % self.pn, (a0 * b1 + a1 * b0) % self.pn)
    }

    /// Valuation with respect to the maximal ideal generator; zero maps to
    /// the chain length (the annihilator convention `pi^len = 0`).
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.chain_len();
        }
        let (a0, a1) = self.split(a);
        if self.eps {
            if a0 % self.p != 0 {
                0
            } else {
                debug_assert!(a0 == 0 && a1 != 0);
                1
            }
        } else {
            let mut v = 0;
            let mut x = a0;
            while x % self.p == 0 {
                x /= self.p;
                v += 1;
            }
            v
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        self.val(a) == 0
    }

    /// Image in the residue field `F_p`.
    pub fn residue(&self, a: u64) -> u64 {
        self.split(a).0 % self.p
    }

    /// Maximal ideal generator (`p` or `eps`); fields have none and the
    /// value is only meaningful when `chain_len() > 1`.
    pub fn uniformizer(&self) -> u64 {
        if self.eps {
            self.join(0, 1)
        } else {
            self.from_int(self.p as i64)
        }
    }

    pub fn uniformizer_pow(&self, v: u32) -> u64 {
        if v == 0 {
            return 1;
        }
        if v >= self.chain_len() {
            return 0;
        }
        if self.eps {
            self.join(0, 1)
        } else {
            self.p.pow(v) % self.pn
        }
    }

    /// `a = unit_part(a) * uniformizer^val(a)` with a unit cofactor.
    pub fn unit_part(&self, a: u64) -> u64 {
        if a == 0 {
            return 1;
        }
        if self.eps {
            let (a0, a1) = self.split(a);
            if a0 % self.p != 0 {
                a
            } else {
                a1
            }
        } else {
            a / self.p.pow(self.val(a))
        }
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let (a0, a1) = self.split(a);
        let i0 = inv_mod(a0, self.pn);
        if !self.eps {
            return Ok(i0);
        }
        // (a0 + a1 eps)^-1 = a0^-1 - a0^-2 a1 eps
        let c1 = (self.pn - (i0 * i0 % self.pn) * a1 % self.pn) % self.pn;
        Ok(self.join(i0, c1))
    }

    /// Exact division when `val(a) >= val(b)`; `0 / b = 0`.
    pub fn div_exact(&self, a: u64, b: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        let (va, vb) = (self.val(a), self.val(b));
        debug_assert!(va >= vb && b != 0);
        let q = self.mul(self.unit_part(a), self.inv(self.unit_part(b)).unwrap());
        self.mul(q, self.uniformizer_pow(va - vb))
    }

    /// Canonical `a = q * uniformizer^v + r` with `r` in the fixed
    /// transversal of `(uniformizer^v)`.
    pub fn divmod_pow(&self, a: u64, v: u32) -> (u64, u64) {
        if v == 0 {
            return (a, 0);
        }
        if v >= self.chain_len() {
            return (0, a);
        }
        if self.eps {
            let (a0, a1) = self.split(a);
            (a1, a0)
        } else {
            let pv = self.p.pow(v);
            (a / pv, a % pv)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.size()
    }

    /// Render with the `eps` symbol, e.g. `1+2*eps`.
    pub fn fmt_elem(&self, a: u64) -> String {
        let (a0, a1) = self.split(a);
        if a1 == 0 {
            return a0.to_string();
        }
        let eps_part = if a1 == 1 { "eps".to_string() } else { format!("{a1}*eps") };
        if a0 == 0 {
            eps_part
        } else {
            format!("{a0}+{eps_part}")
        }
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid; caller guarantees gcd(a, m) = 1
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert!(r0 == 1);
    (((t0 % m as i128) + m as i128) % m as i128) as u64
}

/// An element of the tower, tagged with its level.  Base elements store a
/// single packed coefficient, extension elements one per `w^b pi^c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem {
    pub level: Level,
    pub coeffs: Vec<u64>,
}

impl Elem {
    pub fn base(c: u64) -> Self {
        Elem { level: Level::Base, coeffs: vec![c] }
    }

    pub fn ext(c: Vec<u64>) -> Self {
        Elem { level: Level::Ext, coeffs: c }
    }

    pub fn as_base(&self) -> u64 {
        debug_assert!(self.level == Level::Base);
        self.coeffs[0]
    }
}

/// Arithmetic selector for [`RingCtx::ring_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// The generator `d = (e * pi^(e-1))^-1` of the inverse different,
/// represented as a unit times a formal power of `pi`.  Only the trace
/// form construction consumes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Different {
    /// Unit factor (`e^-1` in the base, embedded into `O_R`).
    pub unit: Elem,
    /// Formal exponent `1 - e`.
    pub pi_exponent: i64,
}

/// Immutable description plus arithmetic of the full tower.
#[derive(Clone, Debug)]
pub struct RingCtx {
    pub spec: RingSpec,
    pub base: BaseRing,
    pub e: usize,
    pub f: usize,
    /// `g = e * f`, the base rank of `O_R`.
    pub g: usize,
    /// `p * u` in the base: the value of `pi^e`.
    pub pu: u64,
    /// Reduction row: `w^f = sum mred[s] * w^s` (negated `m` tail).
    mred: Vec<u64>,
}

/// Validate a spec and build its arithmetic context.
pub fn build_ring(spec: &RingSpec) -> Result<RingCtx> {
    if spec.p > 10_000 {
        return Err(Error::InvalidSpec("p beyond desk scale (max 10000)".into()));
    }
    if !is_prime(spec.p) {
        return Err(Error::NotPrime(spec.p));
    }
    if spec.n < 1 || spec.e < 1 || spec.f < 1 {
        return Err(Error::InvalidSpec("n, e, f must all be >= 1".into()));
    }
    if (spec.p as u128).pow(spec.n) > u64::from(u32::MAX) as u128 {
        return Err(Error::InvalidSpec("p^n beyond desk scale".into()));
    }
    if spec.f > 1 && spec.n > 1 {
        return Err(Error::UnsupportedCombination("f > 1 requires n = 1".into()));
    }
    if spec.eps && spec.n > 1 {
        return Err(Error::UnsupportedCombination("eps requires n = 1".into()));
    }
    if spec.u % spec.p == 0 {
        return Err(Error::InvalidSpec("u must be a unit of the base".into()));
    }
    let base = BaseRing::new(spec.p, spec.n, spec.eps);
    let mred = if spec.f > 1 {
        let m = spec
            .m
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec("f > 1 needs a minimal polynomial m".into()))?;
        if m.len() != spec.f as usize + 1 || m[spec.f as usize] % spec.p != 1 {
            return Err(Error::InvalidSpec("m must be monic of degree f".into()));
        }
        if !irreducible_mod_p(spec.p, &m.iter().map(|c| c % spec.p).collect::<Vec<_>>()) {
            return Err(Error::ReducibleMinPoly);
        }
        m[..spec.f as usize]
            .iter()
            .map(|&c| base.from_int(-((c % spec.p) as i64)))
            .collect()
    } else {
        if let Some(m) = &spec.m {
            if !m.is_empty() && m.len() != 2 {
                return Err(Error::InvalidSpec("m given but f = 1".into()));
            }
        }
        Vec::new()
    };
    let e = spec.e as usize;
    let f = spec.f as usize;
    let pu = base.mul(base.from_int(spec.p as i64), base.from_int(spec.u as i64));
    Ok(RingCtx { spec: spec.clone(), base, e, f, g: e * f, pu, mred })
}

impl RingCtx {
    pub fn level_rank(&self, level: Level) -> usize {
        match level {
            Level::Base => 1,
            Level::Ext => self.g,
        }
    }

    pub fn level_size(&self, level: Level) -> u128 {
        (self.base.size() as u128).pow(self.level_rank(level) as u32)
    }

    pub fn zero(&self, level: Level) -> Elem {
        Elem { level, coeffs: vec![0; self.level_rank(level)] }
    }

    pub fn one(&self, level: Level) -> Elem {
        let mut z = self.zero(level);
        z.coeffs[0] = 1;
        z
    }

    /// Monomial `w^b * pi^c` at the extension level.
    pub fn monomial(&self, b: usize, c: usize) -> Elem {
        debug_assert!(b < self.f && c < self.e);
        let mut z = self.zero(Level::Ext);
        z.coeffs[b * self.e + c] = 1;
        z
    }

    pub fn pi(&self) -> Elem {
        if self.e > 1 {
            self.monomial(0, 1)
        } else {
            // e = 1: pi = p*u lives in the base image
            let mut z = self.zero(Level::Ext);
            z.coeffs[0] = self.pu;
            z
        }
    }

    pub fn omega(&self) -> Option<Elem> {
        (self.f > 1).then(|| self.monomial(1, 0))
    }

    pub fn embed(&self, c: u64) -> Elem {
        let mut z = self.zero(Level::Ext);
        z.coeffs[0] = c;
        z
    }

    fn slot(&self, b: usize, c: usize) -> usize {
        b * self.e + c
    }

    pub fn ext_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    pub fn ext_neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }

    pub fn ext_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }

    pub fn ext_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (e, f) = (self.e, self.f);
        let wb = 2 * f - 1;
        let wc = 2 * e - 1;
        let mut acc = vec![0u64; wb * wc];
        for b1 in 0..f {
            for c1 in 0..e {
                let x = a[self.slot(b1, c1)];
                if x == 0 {
                    continue;
                }
                for b2 in 0..f {
                    for c2 in 0..e {
                        let y = b[self.slot(b2, c2)];
                        if y == 0 {
                            continue;
                        }
                        let idx = (b1 + b2) * wc + (c1 + c2);
                        acc[idx] = self.base.add(acc[idx], self.base.mul(x, y));
                    }
                }
            }
        }
        // pi^(e+t) = p*u * pi^t
        for b in 0..wb {
            for c in (e..wc).rev() {
                let x = acc[b * wc + c];
                if x != 0 {
                    acc[b * wc + c] = 0;
                    let idx = b * wc + (c - e);
                    acc[idx] = self.base.add(acc[idx], self.base.mul(self.pu, x));
                }
            }
        }
        // w^(f+s) folds through the reduction row of m
        for b in (f..wb).rev() {
            for c in 0..e {
                let x = acc[b * wc + c];
                if x != 0 {
                    acc[b * wc + c] = 0;
                    for (s, &ms) in self.mred.iter().enumerate() {
                        let idx = (b - f + s) * wc + c;
                        acc[idx] = self.base.add(acc[idx], self.base.mul(ms, x));
                    }
                }
            }
        }
        let mut out = vec![0u64; self.g];
        for b in 0..f {
            for c in 0..e {
                out[self.slot(b, c)] = acc[b * wc + c];
            }
        }
        out
    }

    /// `add/sub/mul/neg` of tagged elements; both must share a level.
    pub fn ring_arith(&self, a: &Elem, b: &Elem, op: ArithOp) -> Result<Elem> {
        if a.level != b.level && op != ArithOp::Neg {
            return Err(Error::LevelMismatch);
        }
        let level = a.level;
        let coeffs = match (level, op) {
            (Level::Base, ArithOp::Add) => vec![self.base.add(a.coeffs[0], b.coeffs[0])],
            (Level::Base, ArithOp::Sub) => vec![self.base.sub(a.coeffs[0], b.coeffs[0])],
            (Level::Base, ArithOp::Mul) => vec![self.base.mul(a.coeffs[0], b.coeffs[0])],
            (Level::Base, ArithOp::Neg) => vec![self.base.neg(a.coeffs[0])],
            (Level::Ext, ArithOp::Add) => self.ext_add(&a.coeffs, &b.coeffs),
            (Level::Ext, ArithOp::Sub) => self.ext_sub(&a.coeffs, &b.coeffs),
            (Level::Ext, ArithOp::Mul) => self.ext_mul(&a.coeffs, &b.coeffs),
            (Level::Ext, ArithOp::Neg) => self.ext_neg(&a.coeffs),
        };
        Ok(Elem { level, coeffs })
    }

    /// Residue image in `F_{p^f}` as `f` coefficients mod p; an element is
    /// a unit exactly when this is nonzero.
    pub fn ext_residue(&self, a: &[u64]) -> Vec<u64> {
        (0..self.f).map(|b| self.base.residue(a[self.slot(b, 0)])).collect()
    }

    pub fn is_unit(&self, a: &Elem) -> bool {
        match a.level {
            Level::Base => self.base.is_unit(a.coeffs[0]),
            Level::Ext => self.ext_residue(&a.coeffs).iter().any(|&c| c != 0),
        }
    }

    /// Order of the unit group of the extension.
    fn ext_unit_group_order(&self) -> u128 {
        let size = self.level_size(Level::Ext);
        let q = (self.spec.p as u128).pow(self.f as u32);
        size / q * (q - 1)
    }

    pub fn invert(&self, a: &Elem) -> Result<Elem> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        match a.level {
            Level::Base => Ok(Elem::base(self.base.inv(a.coeffs[0])?)),
            Level::Ext => {
                // a^(|O^x| - 1): the unit group is finite
                let mut exp = self.ext_unit_group_order() - 1;
                let mut acc = self.one(Level::Ext).coeffs;
                let mut sq = a.coeffs.clone();
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = self.ext_mul(&acc, &sq);
                    }
                    sq = self.ext_mul(&sq, &sq);
                    exp >>= 1;
                }
                Ok(Elem::ext(acc))
            }
        }
    }

    /// Every element of the level exactly once, counting coefficient
    /// vectors little-endian in the canonical monomial order (eps, w, pi).
    pub fn enumerate_elements(&self, level: Level) -> impl Iterator<Item = Elem> + '_ {
        let total = self.level_size(level);
        (0..total).map(move |idx| self.elem_from_index(level, idx))
    }

    pub fn elem_from_index(&self, level: Level, idx: u128) -> Elem {
        let rank = self.level_rank(level);
        let pn = self.base.p.pow(self.base.n) as u128;
        let mut digits = vec![0u64; rank * if self.base.eps { 2 } else { 1 }];
        let mut t = idx;
        for d in digits.iter_mut() {
            *d = (t % pn) as u64;
            t /= pn;
        }
        // eps-free digits come first (lexicographic in eps, then w, pi)
        let coeffs = (0..rank)
            .map(|s| {
                if self.base.eps {
                    self.base.join(digits[s], digits[rank + s])
                } else {
                    digits[s]
                }
            })
            .collect();
        Elem { level, coeffs }
    }

    pub fn elem_to_index(&self, a: &Elem) -> u128 {
        let rank = self.level_rank(a.level);
        let pn = self.base.p.pow(self.base.n) as u128;
        let mut digits = vec![0u64; rank * if self.base.eps { 2 } else { 1 }];
        for (s, &c) in a.coeffs.iter().enumerate() {
            let (c0, c1) = self.base.split(c);
            digits[s] = c0;
            if self.base.eps {
                digits[rank + s] = c1;
            }
        }
        digits.iter().rev().fold(0u128, |acc, &d| acc * pn + d as u128)
    }

    /// Matrix of multiplication by `a` on `O_R` as a free base module,
    /// columns indexed by the monomial basis.
    pub fn regular_matrix(&self, a: &[u64]) -> crate::linalg::RMat {
        let mut m = crate::linalg::RMat::zeros(self.g, self.g);
        for b in 0..self.f {
            for c in 0..self.e {
                let mono = self.monomial(b, c);
                let col = self.ext_mul(a, &mono.coeffs);
                for (r, &x) in col.iter().enumerate() {
                    m[(r, self.slot(b, c))] = x;
                }
            }
        }
        m
    }

    /// Trace of the regular representation, landing in the base.
    pub fn trace_reg(&self, a: &Elem) -> Elem {
        debug_assert!(a.level == Level::Ext);
        let m = self.regular_matrix(&a.coeffs);
        let mut t = 0u64;
        for i in 0..self.g {
            t = self.base.add(t, m[(i, i)]);
        }
        Elem::base(t)
    }

    pub fn is_tame(&self) -> bool {
        (self.e as u64) % self.spec.p != 0
    }

    /// `d = (e * pi^(e-1))^-1`, as a unit together with the formal
    /// exponent `1 - e`; requires tame ramification.
    pub fn different_generator(&self) -> Result<Different> {
        if !self.is_tame() {
            return Err(Error::WildRamification);
        }
        let e_inv = self.base.inv(self.base.from_int(self.e as i64))?;
        Ok(Different { unit: self.embed(e_inv), pi_exponent: 1 - self.e as i64 })
    }

    /// Trace of `d * a` for the tame different generator: only the
    /// `pi^(e-1)` column of `a` survives the shift.
    pub fn trace_d(&self, a: &[u64]) -> Result<u64> {
        let d = self.different_generator()?;
        let e_inv = d.unit.coeffs[0];
        let mut t = 0u64;
        for b in 0..self.f {
            let coeff = a[self.slot(b, self.e - 1)];
            if coeff == 0 {
                continue;
            }
            let tr_b = self.trace_reg(&self.monomial(b, 0)).as_base();
            t = self.base.add(t, self.base.mul(coeff, self.base.mul(e_inv, tr_b)));
        }
        Ok(t)
    }

    /// Format an extension element with `w`/`pi`/`eps` symbols.
    pub fn fmt_ext(&self, a: &[u64]) -> String {
        let mut terms = Vec::new();
        for b in 0..self.f {
            for c in 0..self.e {
                let x = a[self.slot(b, c)];
                if x == 0 {
                    continue;
                }
                let (c0, c1) = self.base.split(x);
                let mono = {
                    let mut parts = Vec::new();
                    if b == 1 {
                        parts.push("w".to_string());
                    } else if b > 1 {
                        parts.push(format!("w^{b}"));
                    }
                    if c == 1 {
                        parts.push("pi".to_string());
                    } else if c > 1 {
                        parts.push(format!("pi^{c}"));
                    }
                    parts.join("*")
                };
                for (coef, sym) in [(c0, ""), (c1, "eps")] {
                    if coef == 0 {
                        continue;
                    }
                    let mut pieces = Vec::new();
                    if coef != 1 || (sym.is_empty() && mono.is_empty()) {
                        pieces.push(coef.to_string());
                    }
                    if !sym.is_empty() {
                        pieces.push(sym.to_string());
                    }
                    if !mono.is_empty() {
                        pieces.push(mono.clone());
                    }
                    terms.push(pieces.join("*"));
                }
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Residue-field context: same tower over `F_p` (used to type the
    /// reduction of a lattice over a non-field base).
    pub fn residue_ctx(&self) -> RingCtx {
        let mut spec = self.spec.clone();
        spec.n = 1;
        spec.eps = false;
        spec.u %= spec.p;
        build_ring(&spec).expect("residue spec of a valid spec is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32, f: u32, eps: bool, e: u32, u: u64) -> RingCtx {
        build_ring(&RingSpec::new(p, n, f, eps, e, u)).unwrap()
    }

    #[test]
    fn build_ring_examples() {
        let c = ctx(5, 1, 1, false, 2, 1);
        assert_eq!(c.level_size(Level::Ext), 25);

        let c = ctx(3, 2, 1, false, 2, 1);
        // pi * pi = 3 in (Z/9)[pi]/(pi^2 - 3)
        let pi = c.pi();
        let sq = c.ring_arith(&pi, &pi, ArithOp::Mul).unwrap();
        assert_eq!(sq, c.embed(3));

        let c = ctx(2, 1, 2, true, 1, 1);
        assert_eq!(c.level_size(Level::Ext), 16); // F4[eps]
    }

    #[test]
    fn build_ring_errors() {
        assert_eq!(build_ring(&RingSpec::new(4, 1, 1, false, 2, 1)).unwrap_err(), Error::NotPrime(4));
        let mut s = RingSpec::new(2, 2, 2, false, 1, 1);
        s.m = default_min_poly(2, 2);
        assert!(matches!(build_ring(&s).unwrap_err(), Error::UnsupportedCombination(_)));
        let mut s = RingSpec::new(2, 1, 2, false, 1, 1);
        s.m = Some(vec![1, 0, 1]); // x^2 + 1 = (x+1)^2 mod 2
        assert_eq!(build_ring(&s).unwrap_err(), Error::ReducibleMinPoly);
    }

    #[test]
    fn arith_examples() {
        // pi^2 = 0 in F2[pi]/(pi^2)
        let c = ctx(2, 1, 1, false, 2, 1);
        let pi = c.pi();
        assert_eq!(c.ring_arith(&pi, &pi, ArithOp::Mul).unwrap(), c.zero(Level::Ext));

        // eps * eps = 0 in F3[eps]
        let c = ctx(3, 1, 1, true, 1, 1);
        let eps = Elem::base(c.base.join(0, 1));
        assert_eq!(c.ring_arith(&eps, &eps, ArithOp::Mul).unwrap(), Elem::base(0));

        let a = c.zero(Level::Ext);
        let b = Elem::base(1);
        assert_eq!(c.ring_arith(&a, &b, ArithOp::Add).unwrap_err(), Error::LevelMismatch);
    }

    #[test]
    fn units_and_inverses() {
        // brute-force oracle: the inverse is the unique b with a*b = 1
        let c = ctx(2, 1, 1, false, 2, 1);
        let one_pi = Elem::ext(vec![1, 1]);
        assert!(c.is_unit(&one_pi));
        let inv = c.invert(&one_pi).unwrap();
        let mut found = Vec::new();
        for b in c.enumerate_elements(Level::Ext) {
            if c.ring_arith(&one_pi, &b, ArithOp::Mul).unwrap() == c.one(Level::Ext) {
                found.push(b);
            }
        }
        assert_eq!(found, vec![inv.clone()]);
        assert_eq!(inv, one_pi); // (1+pi)^2 = 1 + pi^2 = 1

        assert!(!c.is_unit(&c.pi()));

        let z9 = BaseRing::new(3, 2, false);
        assert_eq!(z9.inv(2).unwrap(), 5);
    }

    #[test]
    fn enumeration_order_and_count() {
        let c = ctx(2, 1, 1, false, 2, 1);
        let elems: Vec<_> = c.enumerate_elements(Level::Ext).collect();
        assert_eq!(
            elems,
            vec![
                Elem::ext(vec![0, 0]),
                Elem::ext(vec![1, 0]),
                Elem::ext(vec![0, 1]),
                Elem::ext(vec![1, 1]),
            ]
        );

        let z9 = ctx(3, 2, 1, false, 1, 1);
        let elems: Vec<_> = z9.enumerate_elements(Level::Base).collect();
        assert_eq!(elems.len(), 9);
        assert_eq!(elems[8], Elem::base(8));

        // F2[eps] base of an e=2 tower has 16 extension elements
        let c = ctx(2, 1, 1, true, 2, 1);
        assert_eq!(c.enumerate_elements(Level::Ext).count(), 16);
        for (i, a) in c.enumerate_elements(Level::Ext).enumerate() {
            assert_eq!(c.elem_to_index(&a), i as u128);
        }
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        // associativity, commutativity, distributivity on every triple
        for c in [ctx(2, 1, 1, false, 2, 1), ctx(2, 1, 1, true, 2, 1), ctx(2, 2, 1, false, 2, 1)] {
            if c.level_size(Level::Ext) > 64 {
                continue;
            }
            let elems: Vec<_> = c.enumerate_elements(Level::Ext).collect();
            for a in &elems {
                for b in &elems {
                    let ab = c.ext_mul(&a.coeffs, &b.coeffs);
                    let ba = c.ext_mul(&b.coeffs, &a.coeffs);
                    assert_eq!(ab, ba);
                    for d in &elems {
                        let lhs = c.ext_mul(&ab, &d.coeffs);
                        let rhs = c.ext_mul(&a.coeffs, &c.ext_mul(&b.coeffs, &d.coeffs));
                        assert_eq!(lhs, rhs);
                        let dist_l = c.ext_mul(&a.coeffs, &c.ext_add(&b.coeffs, &d.coeffs));
                        let dist_r = c.ext_add(&ab, &c.ext_mul(&a.coeffs, &d.coeffs));
                        assert_eq!(dist_l, dist_r);
                    }
                }
            }
        }
    }

    #[test]
    fn ring_axioms_sampled_larger() {
        for c in [ctx(3, 2, 1, false, 2, 1), ctx(5, 1, 1, false, 3, 1), ctx(3, 1, 2, false, 1, 1)] {
            let total = c.level_size(Level::Ext);
            let mut seed = 0x9e3779b97f4a7c15u64;
            let mut next = || {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                (seed as u128) % total
            };
            for _ in 0..200 {
                let a = c.elem_from_index(Level::Ext, next());
                let b = c.elem_from_index(Level::Ext, next());
                let d = c.elem_from_index(Level::Ext, next());
                let ab = c.ext_mul(&a.coeffs, &b.coeffs);
                assert_eq!(ab, c.ext_mul(&b.coeffs, &a.coeffs));
                assert_eq!(
                    c.ext_mul(&ab, &d.coeffs),
                    c.ext_mul(&a.coeffs, &c.ext_mul(&b.coeffs, &d.coeffs))
                );
                assert_eq!(
                    c.ext_mul(&a.coeffs, &c.ext_add(&b.coeffs, &d.coeffs)),
                    c.ext_add(&ab, &c.ext_mul(&a.coeffs, &d.coeffs))
                );
            }
        }
    }

    #[test]
    fn unit_iff_residue_nonzero() {
        for c in [ctx(2, 1, 1, true, 2, 1), ctx(3, 2, 1, false, 2, 2), ctx(2, 1, 2, false, 1, 1)] {
            for a in c.enumerate_elements(Level::Ext) {
                let residue_zero = c.ext_residue(&a.coeffs).iter().all(|&x| x == 0);
                assert!(c.is_unit(&a) ^ residue_zero);
                if c.is_unit(&a) {
                    let inv = c.invert(&a).unwrap();
                    assert_eq!(c.ext_mul(&a.coeffs, &inv.coeffs), c.one(Level::Ext).coeffs);
                }
            }
        }
    }

    // oracle: trace of multiplication by pi^k straight from the monomial
    // shift rule pi^k * w^b pi^c = (pu)^wraps * w^b pi^((c+k) mod e),
    // independent of ext_mul
    fn regular_oracle_trace(c: &RingCtx, k: usize) -> u64 {
        let mut t = 0u64;
        for _b in 0..c.f {
            for col in 0..c.e {
                let cc = (col + k) % c.e;
                if cc != col {
                    continue;
                }
                let mut scale = 1u64;
                for _ in 0..(col + k) / c.e {
                    scale = c.base.mul(scale, c.pu);
                }
                t = c.base.add(t, scale);
            }
        }
        t
    }

    #[test]
    fn trace_examples() {
        for c in [ctx(3, 2, 1, false, 2, 1), ctx(5, 1, 1, false, 3, 2), ctx(2, 1, 2, false, 1, 1)] {
            assert_eq!(c.trace_reg(&c.one(Level::Ext)).as_base(), c.base.from_int(c.g as i64));
            for k in 1..c.e {
                let mut pik = c.one(Level::Ext);
                for _ in 0..k {
                    pik = c.ring_arith(&pik, &c.pi(), ArithOp::Mul).unwrap();
                }
                assert_eq!(c.trace_reg(&pik).as_base(), regular_oracle_trace(&c, k));
                assert_eq!(c.trace_reg(&pik).as_base(), 0);
            }
            // trace(pi^e) = e * f * p * u
            let mut pie = c.one(Level::Ext);
            for _ in 0..c.e {
                pie = c.ring_arith(&pie, &c.pi(), ArithOp::Mul).unwrap();
            }
            let expect = (0..c.g).fold(0u64, |acc, _| c.base.add(acc, c.pu));
            assert_eq!(c.trace_reg(&pie).as_base(), expect);
        }
    }

    #[test]
    fn trace_is_linear() {
        let c = ctx(3, 2, 1, false, 2, 1);
        let mut seed = 42u64;
        let total = c.level_size(Level::Ext);
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 16) as u128 % total
        };
        for _ in 0..100 {
            let a = c.elem_from_index(Level::Ext, next());
            let b = c.elem_from_index(Level::Ext, next());
            let sum = c.ring_arith(&a, &b, ArithOp::Add).unwrap();
            assert_eq!(
                c.trace_reg(&sum).as_base(),
                c.base.add(c.trace_reg(&a).as_base(), c.trace_reg(&b).as_base())
            );
        }
    }

    #[test]
    fn different_examples() {
        let c = ctx(3, 1, 1, false, 1, 1);
        let d = c.different_generator().unwrap();
        assert_eq!(d.unit, c.one(Level::Ext));
        assert_eq!(d.pi_exponent, 0);

        let c = ctx(3, 1, 1, false, 2, 1);
        let d = c.different_generator().unwrap();
        assert_eq!(d.unit, c.embed(2)); // 2^-1 = 2 mod 3
        assert_eq!(d.pi_exponent, -1);

        let c = ctx(2, 1, 1, false, 2, 1);
        assert_eq!(c.different_generator().unwrap_err(), Error::WildRamification);
    }

    #[test]
    fn spec_line_roundtrip() {
        let specs = [
            RingSpec::new(3, 1, 1, false, 2, 1),
            RingSpec::new(2, 1, 2, true, 1, 1),
            RingSpec::new(3, 2, 1, false, 2, 2),
        ];
        for s in specs {
            let line = s.to_line();
            assert_eq!(RingSpec::parse_line(&line).unwrap(), s);
        }
        assert_eq!(
            RingSpec::parse_line("p=3 n=1 f=1 eps=0 e=2 u=1 m=-").unwrap(),
            RingSpec::new(3, 1, 1, false, 2, 1)
        );
    }
}
