//! Candidate points of the local model: base-module sublattices of
//! `M = (O_R)^2` with canonical forms, O-invariance, action matrices and
//! reduction types.
//!
//! Lattices are stored by base-ring generators; the O-structure enters
//! only through the action matrices of `pi` and `w`, so all elimination
//! happens over the chain ring even when `O_R` itself is not one.

use crate::linalg::{self, RMat};
use crate::poly::{charpol, UniPoly};
use crate::rings::RingCtx;
use crate::{Error, Result};

/// Base rank of the ambient module `M = (O_R)^2`.
pub fn module_rank(ctx: &RingCtx) -> usize {
    2 * ctx.g
}

/// Coordinate slot of the basis vector `w^b pi^c f_k` (`k` is 0 or 1).
pub fn coord(ctx: &RingCtx, k: usize, b: usize, c: usize) -> usize {
    k * ctx.g + b * ctx.e + c
}

/// Matrix of multiplication by `pi` on `M` in the standard coordinates.
pub fn module_pi_matrix(ctx: &RingCtx) -> RMat {
    let n = module_rank(ctx);
    let mut m = RMat::zeros(n, n);
    for k in 0..2 {
        for b in 0..ctx.f {
            for c in 0..ctx.e {
                let src = coord(ctx, k, b, c);
                if c + 1 < ctx.e {
                    m[(coord(ctx, k, b, c + 1), src)] = 1;
                } else {
                    m[(coord(ctx, k, b, 0), src)] = ctx.pu;
                }
            }
        }
    }
    m
}

/// Matrix of multiplication by `w` on `M`; `None` when `f = 1`.
pub fn module_omega_matrix(ctx: &RingCtx) -> Option<RMat> {
    ctx.omega().map(|omega| {
        let n = module_rank(ctx);
        let reg = ctx.regular_matrix(&omega.coeffs);
        let mut m = RMat::zeros(n, n);
        for k in 0..2 {
            for col in 0..ctx.g {
                for row in 0..ctx.g {
                    let x = reg[(row, col)];
                    if x != 0 {
                        m[(k * ctx.g + row, k * ctx.g + col)] = x;
                    }
                }
            }
        }
        m
    })
}

/// Matrix of multiplication by the basis monomial `w^b pi^c` on `M`.
pub fn module_monomial_matrix(ctx: &RingCtx, b: usize, c: usize) -> RMat {
    let n = module_rank(ctx);
    let mono = ctx.monomial(b, c);
    let reg = ctx.regular_matrix(&mono.coeffs);
    let mut m = RMat::zeros(n, n);
    for k in 0..2 {
        for col in 0..ctx.g {
            for row in 0..ctx.g {
                let x = reg[(row, col)];
                if x != 0 {
                    m[(k * ctx.g + row, k * ctx.g + col)] = x;
                }
            }
        }
    }
    m
}

/// Split a module vector into its two `O_R`-coordinates.
pub fn to_o_pair(ctx: &RingCtx, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
    (v[..ctx.g].to_vec(), v[ctx.g..].to_vec())
}

/// Reduction profile of a point over a field: the chart pair `(i, j)` per
/// unramified factor (all factors carry the same pair over `F_p`), with
/// the Lie-algebra convention `(e1, e2) = (e - j, e - i)` also exposed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReductionType {
    pub factors: usize,
    /// Chart exponents `(i, j)`, `i <= j`: generators reduce to
    /// `pi^i f1, pi^j f2` per factor.
    pub chart: (u32, u32),
}

impl ReductionType {
    /// The pair `(e1, e2)` of the Lie-algebra decomposition.
    pub fn lie(&self, e: u32) -> (u32, u32) {
        (e - self.chart.1, e - self.chart.0)
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.chart.0, self.chart.1)
    }
}

/// A canonicalized sublattice of `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    /// Howell normal form of the span: rows generate, membership reduces.
    pub howell: RMat,
    /// Minimal canonical generating rows (redundant Howell rows pruned).
    pub gens: RMat,
}

impl Lattice {
    /// Canonicalize the span of the given generator rows.
    pub fn from_rows(ctx: &RingCtx, rows: &RMat) -> Lattice {
        assert_eq!(rows.cols, module_rank(ctx));
        let h = linalg::howell(&ctx.base, rows);
        let gens = prune_redundant(ctx, &h);
        Lattice { howell: h, gens }
    }

    /// Canonicalize the span of generator columns (`2g x r`).
    pub fn from_generators(ctx: &RingCtx, cols: &RMat) -> Lattice {
        Lattice::from_rows(ctx, &cols.transpose())
    }

    pub fn zero(ctx: &RingCtx) -> Lattice {
        Lattice::from_rows(ctx, &RMat::zeros(0, module_rank(ctx)))
    }

    pub fn full(ctx: &RingCtx) -> Lattice {
        Lattice::from_rows(ctx, &RMat::identity(module_rank(ctx)))
    }

    /// Number of minimal generators.
    pub fn rank(&self) -> usize {
        self.gens.rows
    }

    pub fn contains(&self, ctx: &RingCtx, v: &[u64]) -> bool {
        linalg::howell_contains(&ctx.base, &self.howell, v)
    }

    pub fn is_sublattice_of(&self, ctx: &RingCtx, other: &Lattice) -> bool {
        (0..self.gens.rows).all(|r| other.contains(ctx, self.gens.row(r)))
    }

    /// Exact number of elements, from the Howell pivot valuations.
    pub fn size(&self, ctx: &RingCtx) -> u128 {
        let ring = &ctx.base;
        let mut total = 1u128;
        for r in 0..self.howell.rows {
            let col = (0..self.howell.cols).find(|&c| self.howell[(r, c)] != 0).unwrap();
            let v = ring.val(self.howell[(r, col)]);
            total *= ring.size() as u128 / (ring.p as u128).pow(v);
        }
        total
    }

    /// Deterministic ordering/dedup key.
    pub fn key(&self) -> (usize, Vec<u64>) {
        (self.howell.rows, self.howell.data().to_vec())
    }

    /// Free direct summand of rank `r`: the generators stay independent in
    /// the residue module and the size is exactly `|R|^r`.
    pub fn is_summand_of_rank(&self, ctx: &RingCtx, r: usize) -> bool {
        linalg::residue_rank(&ctx.base, &self.gens) == r && self.size(ctx) == (ctx.base.size() as u128).pow(r as u32)
    }

    /// Stability under the full `O_R`-action (`pi` and, when present, `w`).
    pub fn is_o_invariant(&self, ctx: &RingCtx) -> bool {
        let pi = module_pi_matrix(ctx);
        let w = module_omega_matrix(ctx);
        for r in 0..self.gens.rows {
            let v = self.gens.row(r);
            if !self.contains(ctx, &pi.mul_vec(&ctx.base, v)) {
                return false;
            }
            if let Some(wm) = &w {
                if !self.contains(ctx, &wm.mul_vec(&ctx.base, v)) {
                    return false;
                }
            }
        }
        true
    }

    /// Matrix `A` of the pi-action on the canonical generators:
    /// `P * G = G * A` for the column matrix `G` of generators; unique
    /// when the lattice is a summand.
    pub fn pi_action(&self, ctx: &RingCtx) -> Result<RMat> {
        self.action_matrix(ctx, &module_pi_matrix(ctx))
    }

    /// Action matrix of an arbitrary module endomorphism that stabilizes
    /// the lattice.
    pub fn action_matrix(&self, ctx: &RingCtx, op: &RMat) -> Result<RMat> {
        let r = self.gens.rows;
        let gt = self.gens.transpose(); // 2g x r, columns are generators
        let mut a = RMat::zeros(r, r);
        for i in 0..r {
            let w = op.mul_vec(&ctx.base, self.gens.row(i));
            let x = linalg::solve(&ctx.base, &gt, &w).ok_or(Error::NotInvariant)?;
            for j in 0..r {
                a[(j, i)] = x[j];
            }
        }
        Ok(a)
    }

    /// Action matrices of every basis monomial of `O_R` on the generators.
    pub fn monomial_actions(&self, ctx: &RingCtx) -> Result<Vec<RMat>> {
        let mut out = Vec::with_capacity(ctx.g);
        for b in 0..ctx.f {
            for c in 0..ctx.e {
                out.push(self.action_matrix(ctx, &module_monomial_matrix(ctx, b, c))?);
            }
        }
        Ok(out)
    }

    /// Characteristic polynomial of the pi-action.
    pub fn pi_charpol(&self, ctx: &RingCtx) -> Result<UniPoly> {
        Ok(charpol(&ctx.base, &self.pi_action(ctx)?))
    }

    /// Entrywise reduction to the residue field, as a lattice over the
    /// residue context.
    pub fn residue_lattice(&self, ctx: &RingCtx, res_ctx: &RingCtx) -> Lattice {
        let reduced = self.gens.residue(&ctx.base);
        Lattice::from_rows(res_ctx, &reduced)
    }

    /// Elementary-divisor profile over a field base: `(i, j)` with the
    /// span isomorphic to `pi^i . (free) + pi^j . (free)` per factor.
    pub fn reduction_type(&self, ctx: &RingCtx) -> Result<ReductionType> {
        if !ctx.base.is_field() {
            return Err(Error::NotAPoint);
        }
        let e = ctx.e as u32;
        let pi = module_pi_matrix(ctx);
        // d_t = dim over F_p of pi^t . L
        let mut dims = Vec::with_capacity(ctx.e + 1);
        let mut cur = self.gens.clone();
        for _ in 0..=ctx.e {
            dims.push(linalg::residue_rank(&ctx.base, &cur));
            cur = cur.mul(&ctx.base, &pi.transpose());
        }
        for i in 0..=e {
            for j in i..=e {
                let ok = (0..=e).all(|t| {
                    let di = e - (i + t).min(e);
                    let dj = e - (j + t).min(e);
                    dims[t as usize] == ctx.f * (di + dj) as usize
                });
                if ok {
                    return Ok(ReductionType { factors: ctx.f, chart: (i, j) });
                }
            }
        }
        Err(Error::NotAPoint)
    }
}

fn prune_redundant(ctx: &RingCtx, h: &RMat) -> RMat {
    let ring = &ctx.base;
    let mut keep: Vec<usize> = (0..h.rows).collect();
    loop {
        let mut changed = false;
        let mut t = keep.len();
        while t > 0 {
            t -= 1;
            let others: Vec<usize> = keep.iter().copied().filter(|&i| i != keep[t]).collect();
            if others.is_empty() {
                continue;
            }
            let sub = linalg::howell(ring, &h.select_rows(&others));
            if linalg::howell_contains(ring, &sub, h.row(keep[t])) {
                keep.remove(t);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    h.select_rows(&keep)
}

/// The `O_R`-span of a set of module vectors.
pub fn o_span(ctx: &RingCtx, vectors: &[Vec<u64>]) -> Lattice {
    let mut rows = Vec::new();
    for b in 0..ctx.f {
        for c in 0..ctx.e {
            let m = module_monomial_matrix(ctx, b, c);
            for v in vectors {
                rows.push(m.mul_vec(&ctx.base, v));
            }
        }
    }
    Lattice::from_rows(ctx, &RMat::from_rows(rows, module_rank(ctx)))
}

/// Module vector with a single unit coordinate.
pub fn basis_vector(ctx: &RingCtx, k: usize, b: usize, c: usize) -> Vec<u64> {
    let mut v = vec![0u64; module_rank(ctx)];
    v[coord(ctx, k, b, c)] = 1;
    v
}
