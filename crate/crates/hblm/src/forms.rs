//! The bilinear forms on `M = (O_R)^2`: the canonical O-valued alternating
//! form, its base-valued coordinate expansion, the trace form twisted by
//! the inverse different, the symmetric chart form beta, and orthogonal
//! complements.
//!
//! Chart machinery (beta, the J matrix, the block pi-matrix) exists for
//! totally ramified factors (`f = 1`); general rings go through the
//! coordinate expansion, which needs no different and is valid at wild p.

use crate::lattices::{self, Lattice};
use crate::linalg::{self, RMat};
use crate::rings::{Elem, RingCtx};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Alternating,
    Symmetric,
}

/// A base-valued bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    pub gram: RMat,
    pub kind: FormKind,
}

impl GramForm {
    pub fn new(ctx: &RingCtx, gram: RMat, kind: FormKind) -> Self {
        let ring = &ctx.base;
        debug_assert!({
            let t = gram.transpose();
            match kind {
                FormKind::Symmetric => t == gram,
                FormKind::Alternating => {
                    t == gram.neg(ring) && (0..gram.rows).all(|i| gram[(i, i)] == 0)
                }
            }
        });
        GramForm { gram, kind }
    }

    /// `x^T G y` over the base ring.
    pub fn eval(&self, ctx: &RingCtx, x: &[u64], y: &[u64]) -> u64 {
        let gy = self.gram.mul_vec(&ctx.base, y);
        x.iter().zip(&gy).fold(0u64, |acc, (&a, &b)| ctx.base.add(acc, ctx.base.mul(a, b)))
    }

    pub fn is_perfect(&self, ctx: &RingCtx) -> bool {
        linalg::invert(&ctx.base, &self.gram).is_some()
    }
}

/// The canonical alternating O-valued form: `<(x1,x2),(y1,y2)> = x1 y2 - x2 y1`.
pub fn eval_alt_form(ctx: &RingCtx, x: &[u64], y: &[u64]) -> Elem {
    let (x1, x2) = lattices::to_o_pair(ctx, x);
    let (y1, y2) = lattices::to_o_pair(ctx, y);
    let a = ctx.ext_mul(&x1, &y2);
    let b = ctx.ext_mul(&x2, &y1);
    Elem::ext(ctx.ext_sub(&a, &b))
}

/// The `g` base-valued coordinate forms of the O-valued form: form `t`
/// reads off the `w^b pi^c` coefficient (`t = b*e + c`).  A vector is
/// orthogonal to a set under the O-valued form iff it is under all of
/// these.
pub fn coordinate_grams(ctx: &RingCtx) -> Vec<GramForm> {
    let n = lattices::module_rank(ctx);
    let mut grams = vec![RMat::zeros(n, n); ctx.g];
    for b1 in 0..ctx.f {
        for c1 in 0..ctx.e {
            for b2 in 0..ctx.f {
                for c2 in 0..ctx.e {
                    let prod = ctx.ext_mul(&ctx.monomial(b1, c1).coeffs, &ctx.monomial(b2, c2).coeffs);
                    let a1 = lattices::coord(ctx, 0, b1, c1);
                    let a2 = lattices::coord(ctx, 1, b2, c2);
                    let b1i = lattices::coord(ctx, 1, b1, c1);
                    let b2i = lattices::coord(ctx, 0, b2, c2);
                    for (t, &coeff) in prod.iter().enumerate() {
                        if coeff != 0 {
                            grams[t][(a1, a2)] = coeff;
                            grams[t][(b1i, b2i)] = ctx.base.neg(coeff);
                        }
                    }
                }
            }
        }
    }
    grams.into_iter().map(|g| GramForm::new(ctx, g, FormKind::Alternating)).collect()
}

/// Gram of the perfect alternating trace form
/// `<x, y>' = trace(d * <x, y>)` in the standard basis; tame only.
pub fn trace_form_gram(ctx: &RingCtx) -> Result<GramForm> {
    if !ctx.is_tame() {
        return Err(Error::WildRamification);
    }
    let n = lattices::module_rank(ctx);
    let mut gram = RMat::zeros(n, n);
    for b1 in 0..ctx.f {
        for c1 in 0..ctx.e {
            for b2 in 0..ctx.f {
                for c2 in 0..ctx.e {
                    let prod = ctx.ext_mul(&ctx.monomial(b1, c1).coeffs, &ctx.monomial(b2, c2).coeffs);
                    let tr = ctx.trace_d(&prod)?;
                    if tr != 0 {
                        gram[(lattices::coord(ctx, 0, b1, c1), lattices::coord(ctx, 1, b2, c2))] = tr;
                        gram[(lattices::coord(ctx, 1, b1, c1), lattices::coord(ctx, 0, b2, c2))] =
                            ctx.base.neg(tr);
                    }
                }
            }
        }
    }
    let form = GramForm::new(ctx, gram, FormKind::Alternating);
    assert!(form.is_perfect(ctx), "trace form must be perfect on tame rings");
    Ok(form)
}

/// Chart type `(i, j)`: reductions generated by `pi^i f1, pi^j f2`,
/// `i <= j`, `i + j = e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChartType {
    pub i: usize,
    pub j: usize,
}

impl ChartType {
    pub fn new(ctx: &RingCtx, i: usize, j: usize) -> Result<ChartType> {
        if i > j || i + j != ctx.e {
            return Err(Error::BadType(format!("(i,j) = ({i},{j}) needs i <= j and i + j = e = {}", ctx.e)));
        }
        Ok(ChartType { i, j })
    }

    /// All chart types of the ring.
    pub fn all(ctx: &RingCtx) -> Vec<ChartType> {
        (0..=ctx.e / 2).map(|i| ChartType { i, j: ctx.e - i }).collect()
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.i, self.j)
    }
}

fn require_totally_ramified(ctx: &RingCtx) -> Result<()> {
    if ctx.f != 1 {
        return Err(Error::BadType("chart machinery needs a totally ramified factor (f = 1)".into()));
    }
    Ok(())
}

/// Standard-coordinate indices of the chart basis, F0 block then F1 block:
/// `F0 = (pi^(e-1) f1 .. pi^i f1, pi^(e-1) f2 .. pi^j f2)`,
/// `F1 = (pi^(i-1) f1 .. f1, pi^(j-1) f2 .. f2)`.
pub fn chart_basis(ctx: &RingCtx, ty: ChartType) -> Result<Vec<usize>> {
    require_totally_ramified(ctx)?;
    let e = ctx.e;
    let mut idx = Vec::with_capacity(2 * e);
    for c in (ty.i..e).rev() {
        idx.push(lattices::coord(ctx, 0, 0, c));
    }
    for c in (ty.j..e).rev() {
        idx.push(lattices::coord(ctx, 1, 0, c));
    }
    for c in (0..ty.i).rev() {
        idx.push(lattices::coord(ctx, 0, 0, c));
    }
    for c in (0..ty.j).rev() {
        idx.push(lattices::coord(ctx, 1, 0, c));
    }
    Ok(idx)
}

fn conjugate_by_basis(m: &RMat, perm: &[usize]) -> RMat {
    let n = perm.len();
    let mut out = RMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(a, b)] = m[(perm[a], perm[b])];
        }
    }
    out
}

/// The symmetric chart form beta in standard coordinates: mixed pairs
/// `beta(pi^a f1, pi^b f2) = 1` exactly when `a + b = e - 1`, same-side
/// pairs zero.  Its chart-basis Gram is the antidiagonal block matrix
/// `(0 T; T 0)`.
pub fn beta_gram(ctx: &RingCtx) -> Result<GramForm> {
    require_totally_ramified(ctx)?;
    let e = ctx.e;
    let n = 2 * e;
    let mut gram = RMat::zeros(n, n);
    for a in 0..e {
        let b = e - 1 - a;
        gram[(lattices::coord(ctx, 0, 0, a), lattices::coord(ctx, 1, 0, b))] = 1;
        gram[(lattices::coord(ctx, 1, 0, b), lattices::coord(ctx, 0, 0, a))] = 1;
    }
    Ok(GramForm::new(ctx, gram, FormKind::Symmetric))
}

/// Beta in the chart basis of the given type; equals `(0 T; T 0)` with `T`
/// the antidiagonal identity.
pub fn beta_gram_chart(ctx: &RingCtx, ty: ChartType) -> Result<GramForm> {
    let beta = beta_gram(ctx)?;
    let perm = chart_basis(ctx, ty)?;
    Ok(GramForm::new(ctx, conjugate_by_basis(&beta.gram, &perm), FormKind::Symmetric))
}

/// Trace form in the chart basis; equals `(0 J; -J^T 0)` with `J` as in
/// [`j_matrix`].
pub fn trace_gram_chart(ctx: &RingCtx, ty: ChartType) -> Result<GramForm> {
    let tf = trace_form_gram(ctx)?;
    let perm = chart_basis(ctx, ty)?;
    Ok(GramForm::new(ctx, conjugate_by_basis(&tf.gram, &perm), FormKind::Alternating))
}

/// The `e x e` antidiagonal matrix `J` of the trace form on a chart:
/// `j` entries `+1` (rows 0..j) followed by `i` entries `-1`.
pub fn j_matrix(ctx: &RingCtx, ty: ChartType) -> Result<RMat> {
    require_totally_ramified(ctx)?;
    if !ctx.is_tame() {
        return Err(Error::WildRamification);
    }
    let e = ctx.e;
    let mut j = RMat::zeros(e, e);
    for s in 0..e {
        j[(s, e - 1 - s)] = if s < ty.j { 1 } else { ctx.base.from_int(-1) };
    }
    Ok(j)
}

/// The matrix of pi-multiplication in the chart basis ordering; for
/// `i >= 1` this is the block matrix with nilpotent Jordan blocks `K_j`,
/// `K_i` and corner blocks `B_ji`, `B_ij`, `p*u*B`.
pub fn pi_matrix_chart(ctx: &RingCtx, ty: ChartType) -> Result<RMat> {
    let perm = chart_basis(ctx, ty)?;
    Ok(conjugate_by_basis(&lattices::module_pi_matrix(ctx), &perm))
}

/// Orthogonal complement `{v : form(v, w) = 0 for all w in L}` for all
/// supplied forms, canonicalized.
pub fn orth_complement(ctx: &RingCtx, l: &Lattice, forms: &[GramForm]) -> Lattice {
    let n = lattices::module_rank(ctx);
    let mut rows = Vec::new();
    for form in forms {
        for r in 0..l.gens.rows {
            rows.push(form.gram.mul_vec(&ctx.base, l.gens.row(r)));
        }
    }
    if rows.is_empty() {
        return Lattice::full(ctx);
    }
    let a = RMat::from_rows(rows, n);
    let k = linalg::kernel(&ctx.base, &a);
    Lattice::from_generators(ctx, &k)
}

/// Complement under the coordinate expansion of the O-valued form — the
/// default route, valid for every ring in the suite.
pub fn alt_complement(ctx: &RingCtx, l: &Lattice) -> Lattice {
    orth_complement(ctx, l, &coordinate_grams(ctx))
}
