//! The three point conditions on lattices — isotropy (DP), the
//! determinant condition (K), rank-one freeness (R) — together with the
//! affine-chart operations: graph embedding, the beta-involution
//! `C -> -T C^T T`, the pi-action matrix `A'` on the image, the companion
//! matrix and polynomial of the pairing, and the `C^T = J C J` criterion.

use crate::forms::{self, ChartType};
use crate::lattices::{self, Lattice};
use crate::linalg::RMat;
use crate::poly::{charpol, generic_charpol, MultiPoly, UniPoly};
use crate::rings::RingCtx;
use crate::{Error, Result};

/// Membership in `N(R)`: an O-stable free direct summand of rank `g`.
pub fn is_point_of_n(ctx: &RingCtx, l: &Lattice) -> bool {
    l.is_summand_of_rank(ctx, ctx.g) && l.is_o_invariant(ctx)
}

/// Total isotropy under the O-valued alternating form (equivalently all
/// of its coordinate forms).
pub fn is_isotropic(ctx: &RingCtx, l: &Lattice) -> bool {
    for a in 0..l.gens.rows {
        for b in a..l.gens.rows {
            let v = forms::eval_alt_form(ctx, l.gens.row(a), l.gens.row(b));
            if v.coeffs.iter().any(|&x| x != 0) {
                return false;
            }
        }
    }
    true
}

/// The isotropy condition `L = L^perp` on points of `N`.
pub fn is_dp(ctx: &RingCtx, l: &Lattice) -> Result<bool> {
    if !is_point_of_n(ctx, l) {
        return Err(Error::NotAPoint);
    }
    Ok(forms::alt_complement(ctx, l) == *l)
}

/// Cached data for the determinant condition: the generic charpol of the
/// regular representation and the pi-charpol used as a cheap pre-check.
pub struct KChecker {
    reg_generic: Vec<MultiPoly>,
    reg_pi: UniPoly,
}

impl KChecker {
    pub fn new(ctx: &RingCtx) -> KChecker {
        let mats: Vec<RMat> = (0..ctx.f)
            .flat_map(|b| (0..ctx.e).map(move |c| (b, c)))
            .map(|(b, c)| ctx.regular_matrix(&ctx.monomial(b, c).coeffs))
            .collect();
        let reg_generic = generic_charpol(&ctx.base, &mats).expect("regular representation commutes");
        let reg_pi = charpol(&ctx.base, &ctx.regular_matrix(&ctx.pi().coeffs));
        KChecker { reg_generic, reg_pi }
    }

    /// Exact determinant condition: the generic element acts on the point
    /// with the same characteristic polynomial as on `O_R` itself.
    pub fn is_k(&self, ctx: &RingCtx, l: &Lattice) -> Result<bool> {
        if !is_point_of_n(ctx, l) {
            return Err(Error::NotAPoint);
        }
        if !self.is_k_pi_only(ctx, l)? {
            return Ok(false);
        }
        let actions = l.monomial_actions(ctx)?;
        let gp = generic_charpol(&ctx.base, &actions)?;
        Ok(gp == self.reg_generic)
    }

    /// The pi-specialization of the condition: a necessary check, and the
    /// probe for whether pi alone decides (K) on a given ring.
    pub fn is_k_pi_only(&self, ctx: &RingCtx, l: &Lattice) -> Result<bool> {
        if !is_point_of_n(ctx, l) {
            return Err(Error::NotAPoint);
        }
        Ok(l.pi_charpol(ctx)? == self.reg_pi)
    }

    /// Generic charpol of the O-action on a point, for report witnesses.
    pub fn generic_action_charpol(&self, ctx: &RingCtx, l: &Lattice) -> Result<Vec<MultiPoly>> {
        let actions = l.monomial_actions(ctx)?;
        generic_charpol(&ctx.base, &actions)
    }

    pub fn regular_generic(&self) -> &[MultiPoly] {
        &self.reg_generic
    }
}

/// One-shot determinant condition.
pub fn is_k(ctx: &RingCtx, l: &Lattice) -> Result<bool> {
    KChecker::new(ctx).is_k(ctx, l)
}

/// Rapoport's condition: some element generates the point as an
/// `O_R`-module.  Exhaustive search with a residue pre-filter.
pub fn is_r_point(ctx: &RingCtx, l: &Lattice) -> Result<bool> {
    if !is_point_of_n(ctx, l) {
        return Err(Error::NotAPoint);
    }
    let r = l.gens.rows;
    let size = ctx.base.size();
    let total = (size as u128).pow(r as u32);
    let n = lattices::module_rank(ctx);
    for idx in 0..total {
        let mut t = idx;
        let mut v = vec![0u64; n];
        let mut any = false;
        for i in 0..r {
            let a = (t % size as u128) as u64;
            t /= size as u128;
            if a != 0 {
                any = true;
                for (x, &gi) in v.iter_mut().zip(l.gens.row(i)) {
                    *x = ctx.base.add(*x, ctx.base.mul(a, gi));
                }
            }
        }
        if !any {
            continue;
        }
        // a generator must have a unit coordinate somewhere
        if v.iter().all(|&x| ctx.base.residue(x) == 0) {
            continue;
        }
        if lattices::o_span(ctx, &[v]) == *l {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A type-(i,j) chart datum: the matrix `C` of the linear map `F0 -> F1`,
/// with the stability of its graph recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub ty: ChartType,
    pub c: RMat,
    /// Whether the graph lattice is pi-stable (solvability of the
    /// pi-action relation on the graph).
    pub invariant: bool,
}

/// Upper blocks of the chart pi-matrix: the graph of `C` is pi-stable iff
/// `C (UL + UR C) = LL + LR C`, and then `UL + UR C` is the pi-action.
fn chart_pi_blocks(ctx: &RingCtx, ty: ChartType) -> Result<(RMat, RMat, RMat, RMat)> {
    let p = forms::pi_matrix_chart(ctx, ty)?;
    let e = ctx.e;
    let mut ul = RMat::zeros(e, e);
    let mut ur = RMat::zeros(e, e);
    let mut ll = RMat::zeros(e, e);
    let mut lr = RMat::zeros(e, e);
    for a in 0..e {
        for b in 0..e {
            ul[(a, b)] = p[(a, b)];
            ur[(a, b)] = p[(a, e + b)];
            ll[(a, b)] = p[(e + a, b)];
            lr[(a, b)] = p[(e + a, e + b)];
        }
    }
    Ok((ul, ur, ll, lr))
}

pub fn chart_point(ctx: &RingCtx, ty: ChartType, c: RMat) -> Result<ChartPoint> {
    if c.rows != ctx.e || c.cols != ctx.e {
        return Err(Error::BadType(format!("chart matrix must be {0} x {0}", ctx.e)));
    }
    let (ul, ur, ll, lr) = chart_pi_blocks(ctx, ty)?;
    let a = ul.add(&ctx.base, &ur.mul(&ctx.base, &c));
    let invariant = c.mul(&ctx.base, &a) == ll.add(&ctx.base, &lr.mul(&ctx.base, &c));
    Ok(ChartPoint { ty, c, invariant })
}

/// The graph lattice `{x + h(x) : x in F0}` in standard coordinates.
pub fn chart_embed(ctx: &RingCtx, cp: &ChartPoint) -> Result<Lattice> {
    let perm = forms::chart_basis(ctx, cp.ty)?;
    let e = ctx.e;
    let n = lattices::module_rank(ctx);
    let mut rows = Vec::with_capacity(e);
    for s in 0..e {
        let mut v = vec![0u64; n];
        v[perm[s]] = 1;
        for t in 0..e {
            v[perm[e + t]] = cp.c[(t, s)];
        }
        rows.push(v);
    }
    Ok(Lattice::from_rows(ctx, &RMat::from_rows(rows, n)))
}

/// Left inverse of [`chart_embed`]: recover `C` from a lattice that
/// projects isomorphically onto `F0`.
pub fn chart_extract(ctx: &RingCtx, l: &Lattice, ty: ChartType) -> Result<ChartPoint> {
    let perm = forms::chart_basis(ctx, ty)?;
    let e = ctx.e;
    if l.gens.rows != e {
        return Err(Error::NotInChart);
    }
    // generators in chart coordinates, rows = generators
    let mut a = RMat::zeros(e, e);
    let mut b = RMat::zeros(e, e);
    for r in 0..e {
        let row = l.gens.row(r);
        for s in 0..e {
            a[(r, s)] = row[perm[s]];
            b[(r, s)] = row[perm[e + s]];
        }
    }
    let ainv = crate::linalg::invert(&ctx.base, &a).ok_or(Error::NotInChart)?;
    // rows satisfy w_F1 = w_F0 C^T, so C = (A^-1 B)^T
    let c = ainv.mul(&ctx.base, &b).transpose();
    let cp = chart_point(ctx, ty, c)?;
    debug_assert_eq!(&chart_embed(ctx, &cp)?, l);
    Ok(cp)
}

/// The chart matrix of the beta-orthogonal complement: `C' = -T C^T T`.
pub fn beta_involution(ctx: &RingCtx, cp: &ChartPoint) -> Result<ChartPoint> {
    let e = ctx.e;
    let ct = cp.c.transpose();
    let mut cprime = RMat::zeros(e, e);
    for a in 0..e {
        for b in 0..e {
            cprime[(a, b)] = ctx.base.neg(ct[(e - 1 - a, e - 1 - b)]);
        }
    }
    chart_point(ctx, cp.ty, cprime)
}

/// Matrix of the pi-multiplication on the beta-complement graph, per the
/// block relation `A' = (K_j + K_i) + (B_ji + B_ij) C'`.
pub fn a_prime(ctx: &RingCtx, cp: &ChartPoint) -> Result<RMat> {
    let cprime = beta_involution(ctx, cp)?;
    let (ul, ur, _, _) = chart_pi_blocks(ctx, cp.ty)?;
    Ok(ul.add(&ctx.base, &ur.mul(&ctx.base, &cprime.c)))
}

/// The two-block companion matrix of the pairing polynomial and the
/// polynomial itself:
/// `g = [X^i + sum c_(l,j) X^(i-l)][X^j + sum c_(k+i,e) X^(j-k)]
///      - (sum c_(k+i,j) X^(j-k))(sum c_(l,e) X^(i-l))`.
/// Requires `i >= 1` (for `i = 0` both conditions trivialize).
pub fn companion_g(ctx: &RingCtx, cp: &ChartPoint) -> Result<(RMat, UniPoly)> {
    let (i, j) = (cp.ty.i, cp.ty.j);
    if i == 0 {
        return Err(Error::BadType("companion construction needs i >= 1".into()));
    }
    let e = ctx.e;
    let ring = &ctx.base;
    let c = &cp.c;
    // column j (1-based) carries h(pi^i f1), column e carries h(pi^j f2)
    let col_j = j - 1;
    let col_e = e - 1;
    let mut poly1 = vec![0u64; i + 1]; // X^i + sum c_(l,j) X^(i-l)
    poly1[i] = 1;
    for l in 1..=i {
        poly1[i - l] = c[(l - 1, col_j)];
    }
    let mut poly2 = vec![0u64; j + 1];
    poly2[j] = 1;
    for k in 1..=j {
        poly2[j - k] = c[(k + i - 1, col_e)];
    }
    let mut cross1 = vec![0u64; j];
    for k in 1..=j {
        cross1[j - k] = c[(k + i - 1, col_j)];
    }
    let mut cross2 = vec![0u64; i];
    for l in 1..=i {
        cross2[i - l] = c[(l - 1, col_e)];
    }
    let g = UniPoly::new(poly1)
        .mul(ring, &UniPoly::new(poly2))
        .sub(ring, &UniPoly::new(cross1).mul(ring, &UniPoly::new(cross2)));

    // companion block assembly: shifts plus the two coefficient rows
    let mut m = RMat::zeros(e, e);
    for (off, size) in [(0, j), (j, i)] {
        for s in 1..size {
            m[(off + s - 1, off + s)] = 1;
        }
    }
    for b in 0..e {
        m[(j - 1, b)] = ring.neg(c[(e - 1 - b, col_e)]);
        m[(e - 1, b)] = ring.neg(c[(e - 1 - b, col_j)]);
    }
    let ap = a_prime(ctx, cp)?;
    debug_assert_eq!(m, ap, "companion matrix must be the pi-action on the beta-complement");
    let cp_m = charpol(ring, &m);
    debug_assert_eq!(cp_m, g, "companion charpol must equal the pairing polynomial");
    let _ = (ap, cp_m);
    Ok((m, g))
}

/// The `C^T = J C J` criterion for isotropy of the graph under the trace
/// form; tame and totally ramified only.
pub fn jcj_criterion(ctx: &RingCtx, cp: &ChartPoint) -> Result<bool> {
    let jm = forms::j_matrix(ctx, cp.ty)?;
    let jcj = jm.mul(&ctx.base, &cp.c).mul(&ctx.base, &jm);
    Ok(cp.c.transpose() == jcj)
}

/// The two O-module generators of a graph lattice: the images of
/// `pi^i f1` and `pi^j f2`.
pub fn chart_o_generators(ctx: &RingCtx, cp: &ChartPoint) -> Result<(Vec<u64>, Vec<u64>)> {
    let perm = forms::chart_basis(ctx, cp.ty)?;
    let e = ctx.e;
    let n = lattices::module_rank(ctx);
    let mut gen = |s: usize| {
        let mut v = vec![0u64; n];
        v[perm[s]] = 1;
        for t in 0..e {
            v[perm[e + t]] = cp.c[(t, s)];
        }
        v
    };
    Ok((gen(cp.ty.j - 1), gen(e - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{basis_vector, coord, o_span};
    use crate::rings::{build_ring, RingSpec};

    fn ctx(p: u64, n: u32, f: u32, eps: bool, e: u32, u: u64) -> RingCtx {
        build_ring(&RingSpec::new(p, n, f, eps, e, u)).unwrap()
    }

    fn deformation_lattice(c: &RingCtx) -> Lattice {
        let eps = c.base.join(0, 1);
        let mut g1 = vec![0u64; lattices::module_rank(c)];
        g1[coord(c, 0, 0, 1)] = 1;
        g1[coord(c, 0, 0, 0)] = eps;
        let mut g2 = vec![0u64; lattices::module_rank(c)];
        g2[coord(c, 1, 0, 1)] = 1;
        Lattice::from_rows(c, &RMat::from_rows(vec![g1, g2], lattices::module_rank(c)))
    }

    #[test]
    fn point_of_n_examples() {
        let c = ctx(3, 1, 1, false, 2, 1);
        assert!(is_point_of_n(&c, &o_span(&c, &[basis_vector(&c, 0, 0, 0)])));

        let cz = ctx(2, 2, 1, false, 2, 1);
        let pim = o_span(&cz, &[basis_vector(&cz, 0, 0, 1), basis_vector(&cz, 1, 0, 1)]);
        assert!(!is_point_of_n(&cz, &pim));

        let cf = ctx(2, 1, 1, false, 2, 1);
        let pim = o_span(&cf, &[basis_vector(&cf, 0, 0, 1), basis_vector(&cf, 1, 0, 1)]);
        assert!(is_point_of_n(&cf, &pim));
    }

    #[test]
    fn isotropy_and_dp_examples() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let of1 = o_span(&c, &[basis_vector(&c, 0, 0, 0)]);
        assert!(is_isotropic(&c, &of1));
        assert!(is_dp(&c, &of1).unwrap());

        let cd = ctx(2, 1, 1, true, 2, 1);
        let l = deformation_lattice(&cd);
        assert!(!is_isotropic(&cd, &l));
        assert!(!is_dp(&cd, &l).unwrap());

        let cf = ctx(2, 1, 1, false, 2, 1);
        let pim = o_span(&cf, &[basis_vector(&cf, 0, 0, 1), basis_vector(&cf, 1, 0, 1)]);
        assert!(is_dp(&cf, &pim).unwrap());

        // not-a-point guard
        assert_eq!(is_dp(&cf, &Lattice::full(&cf)).unwrap_err(), Error::NotAPoint);
    }

    #[test]
    fn k_condition_examples() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let of1 = o_span(&c, &[basis_vector(&c, 0, 0, 0)]);
        assert!(is_k(&c, &of1).unwrap());
        assert_eq!(of1.pi_charpol(&c).unwrap(), UniPoly::x_pow_minus(&c.base, 2, c.pu));

        // the deformation lattice fails (K): charpol(pi) = X^2 - eps X
        let cd = ctx(2, 1, 1, true, 2, 1);
        let l = deformation_lattice(&cd);
        assert!(!is_k(&cd, &l).unwrap());
        let eps = cd.base.join(0, 1);
        assert_eq!(l.pi_charpol(&cd).unwrap(), UniPoly::new(vec![0, eps, 1]));

        // pi M over F_3 satisfies (K): the generic element acts as t0
        let pim = o_span(&c, &[basis_vector(&c, 0, 0, 1), basis_vector(&c, 1, 0, 1)]);
        assert!(is_k(&c, &pim).unwrap());
    }

    #[test]
    fn r_condition_examples() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let of1 = o_span(&c, &[basis_vector(&c, 0, 0, 0)]);
        assert!(is_r_point(&c, &of1).unwrap());

        let pim = o_span(&c, &[basis_vector(&c, 0, 0, 1), basis_vector(&c, 1, 0, 1)]);
        assert!(!is_r_point(&c, &pim).unwrap());

        // type (1,2) point at e = 3 is not free
        let c3 = ctx(2, 1, 1, false, 3, 1);
        let l = o_span(&c3, &[basis_vector(&c3, 0, 0, 1), basis_vector(&c3, 1, 0, 2)]);
        assert!(is_point_of_n(&c3, &l));
        assert!(!is_r_point(&c3, &l).unwrap());
        // (R) implies (DP) and (K)
        assert!(is_dp(&c3, &l).unwrap() || !is_r_point(&c3, &l).unwrap());
    }

    #[test]
    fn chart_embed_extract_roundtrip() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        // C = 0 embeds to F0, which is pi-invariant in characteristic p
        let cp = chart_point(&c, ty, RMat::zeros(2, 2)).unwrap();
        assert!(cp.invariant);
        let l = chart_embed(&c, &cp).unwrap();
        let pim = o_span(&c, &[basis_vector(&c, 0, 0, 1), basis_vector(&c, 1, 0, 1)]);
        assert_eq!(l, pim);

        // roundtrip on every invariant chart matrix over F3
        let size = c.base.size();
        for idx in 0..size.pow(4) {
            let mut m = RMat::zeros(2, 2);
            let mut t = idx;
            for s in 0..4 {
                m[(s / 2, s % 2)] = t % size;
                t /= size;
            }
            let cp = chart_point(&c, ty, m).unwrap();
            let l = chart_embed(&c, &cp).unwrap();
            let back = chart_extract(&c, &l, ty).unwrap();
            assert_eq!(back, cp);
        }
    }

    #[test]
    fn deformation_lattice_is_a_chart_point() {
        let c = ctx(2, 1, 1, true, 2, 1);
        let l = deformation_lattice(&c);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        let cp = chart_extract(&c, &l, ty).unwrap();
        let eps = c.base.join(0, 1);
        let expect = RMat::from_rows(vec![vec![eps, 0], vec![0, 0]], 2);
        assert_eq!(cp.c, expect);
        assert!(cp.invariant);
    }

    #[test]
    fn beta_involution_formula_and_order_two() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        let size = c.base.size();
        for idx in 0..size.pow(4) {
            let mut m = RMat::zeros(2, 2);
            let mut t = idx;
            for s in 0..4 {
                m[(s / 2, s % 2)] = t % size;
                t /= size;
            }
            let cp = chart_point(&c, ty, m.clone()).unwrap();
            let inv = beta_involution(&c, &cp).unwrap();
            // e = 2, (1,1): C' = [[-d,-b],[-c,-a]]
            let neg = |x| c.base.neg(x);
            let expect = RMat::from_rows(
                vec![vec![neg(m[(1, 1)]), neg(m[(0, 1)])], vec![neg(m[(1, 0)]), neg(m[(0, 0)])]],
                2,
            );
            assert_eq!(inv.c, expect);
            assert_eq!(beta_involution(&c, &inv).unwrap().c, cp.c);
        }
    }

    #[test]
    fn beta_involution_is_beta_complement() {
        // chart_embed(involution(cp)) = beta-orthogonal complement of the
        // graph, on every invariant chart point over F2 and F3 (e = 2)
        for p in [2u64, 3] {
            let c = ctx(p, 1, 1, false, 2, 1);
            let beta = forms::beta_gram(&c).unwrap();
            let size = c.base.size();
            for ty in ChartType::all(&c) {
                for idx in 0..size.pow(4) {
                    let mut m = RMat::zeros(2, 2);
                    let mut t = idx;
                    for s in 0..4 {
                        m[(s / 2, s % 2)] = t % size;
                        t /= size;
                    }
                    let cp = chart_point(&c, ty, m).unwrap();
                    if !cp.invariant {
                        continue;
                    }
                    let graph = chart_embed(&c, &cp).unwrap();
                    let inv = beta_involution(&c, &cp).unwrap();
                    let inv_graph = chart_embed(&c, &inv).unwrap();
                    let complement = forms::orth_complement(&c, &graph, std::slice::from_ref(&beta));
                    assert_eq!(inv_graph, complement);
                }
            }
        }
    }

    #[test]
    fn a_prime_values() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        // C = 0: A' = K_j + K_i (zero for e = 2)
        let cp = chart_point(&c, ty, RMat::zeros(2, 2)).unwrap();
        assert!(a_prime(&c, &cp).unwrap().is_zero());

        // e = 2, (1,1): K blocks vanish, B blocks are the identity, so
        // A' = C'
        let m = RMat::from_rows(vec![vec![1, 2], vec![0, 1]], 2);
        let cp = chart_point(&c, ty, m).unwrap();
        let ap = a_prime(&c, &cp).unwrap();
        assert_eq!(ap, beta_involution(&c, &cp).unwrap().c);
    }

    #[test]
    fn a_prime_is_pi_action_on_complement_graph() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        let p_chart = forms::pi_matrix_chart(&c, ty).unwrap();
        let size = c.base.size();
        for idx in 0..size.pow(4) {
            let mut m = RMat::zeros(2, 2);
            let mut t = idx;
            for s in 0..4 {
                m[(s / 2, s % 2)] = t % size;
                t /= size;
            }
            let cp = chart_point(&c, ty, m).unwrap();
            let inv = beta_involution(&c, &cp).unwrap();
            if !inv.invariant {
                continue;
            }
            // defining relation [1; C'] A' = P [1; C']
            let ap = a_prime(&c, &cp).unwrap();
            let e = c.e;
            let mut graph = RMat::zeros(2 * e, e);
            for s in 0..e {
                graph[(s, s)] = 1;
                for t2 in 0..e {
                    graph[(e + t2, s)] = inv.c[(t2, s)];
                }
            }
            assert_eq!(graph.mul(&c.base, &ap), p_chart.mul(&c.base, &graph));
            // and the charpol agrees with the pi-action on the embedded
            // lattice
            let l = chart_embed(&c, &inv).unwrap();
            assert_eq!(charpol(&c.base, &ap), l.pi_charpol(&c).unwrap());
        }
    }

    #[test]
    fn companion_polynomial() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        // C = 0: g = X^e, M nilpotent
        let cp = chart_point(&c, ty, RMat::zeros(2, 2)).unwrap();
        let (m, g) = companion_g(&c, &cp).unwrap();
        assert_eq!(g, UniPoly::new(vec![0, 0, 1]));
        assert!(m.mul(&c.base, &m).is_zero());

        // e = 2, (1,1), C = [[a,b],[c,d]]: g = (X+a)(X+d) - cb, checked
        // against the hand formula on every C over F3
        let size = c.base.size();
        for idx in 0..size.pow(4) {
            let mut cm = RMat::zeros(2, 2);
            let mut t = idx;
            for s in 0..4 {
                cm[(s / 2, s % 2)] = t % size;
                t /= size;
            }
            let (a, b, cc, d) = (cm[(0, 0)], cm[(0, 1)], cm[(1, 0)], cm[(1, 1)]);
            let cp = chart_point(&c, ty, cm).unwrap();
            let (_, g) = companion_g(&c, &cp).unwrap();
            let hand = UniPoly::new(vec![a, 1]).mul(&c.base, &UniPoly::new(vec![d, 1])).sub(
                &c.base,
                &UniPoly::new(vec![c.base.mul(cc, b)]),
            );
            assert_eq!(g, hand);

            // phi(g) = <e1, e2>: the pairing of the O-module generators
            let (g1, g2) = chart_o_generators(&c, &cp).unwrap();
            let pairing = forms::eval_alt_form(&c, &g1, &g2);
            assert_eq!(g.eval_ext(&c, &c.pi().coeffs), pairing.coeffs);
        }

        // i = 0 is rejected
        let ty0 = ChartType::new(&c, 0, 2).unwrap();
        let cp0 = chart_point(&c, ty0, RMat::zeros(2, 2)).unwrap();
        assert!(matches!(companion_g(&c, &cp0), Err(Error::BadType(_))));
    }

    #[test]
    fn jcj_examples() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let ty = ChartType::new(&c, 1, 1).unwrap();
        let cp = chart_point(&c, ty, RMat::zeros(2, 2)).unwrap();
        assert!(jcj_criterion(&c, &cp).unwrap());

        // the deformation chart point over F3[eps] is not isotropic
        let cd = ctx(3, 1, 1, true, 2, 1);
        let eps = cd.base.join(0, 1);
        let tyd = ChartType::new(&cd, 1, 1).unwrap();
        let cpd = chart_point(&cd, tyd, RMat::from_rows(vec![vec![eps, 0], vec![0, 0]], 2)).unwrap();
        assert!(!jcj_criterion(&cd, &cpd).unwrap());
        assert!(!is_isotropic(&cd, &chart_embed(&cd, &cpd).unwrap()));

        // wild ramification is rejected
        let cw = ctx(2, 1, 1, false, 2, 1);
        let tyw = ChartType::new(&cw, 1, 1).unwrap();
        let cpw = chart_point(&cw, tyw, RMat::zeros(2, 2)).unwrap();
        assert_eq!(jcj_criterion(&cw, &cpw).unwrap_err(), Error::WildRamification);
    }

    #[test]
    fn jcj_matches_isotropy_on_invariant_points() {
        for (p, e) in [(3u64, 2u32), (5, 2), (2, 3), (3, 3)] {
            let c = ctx(p, 1, 1, false, e, 1);
            if !c.is_tame() {
                continue;
            }
            for ty in ChartType::all(&c) {
                let size = c.base.size();
                let cells = (e * e) as u32;
                for idx in 0..size.pow(cells) {
                    let mut m = RMat::zeros(e as usize, e as usize);
                    let mut t = idx;
                    for s in 0..(cells as usize) {
                        m[(s / e as usize, s % e as usize)] = t % size;
                        t /= size;
                    }
                    let cp = chart_point(&c, ty, m).unwrap();
                    if !cp.invariant {
                        continue;
                    }
                    let l = chart_embed(&c, &cp).unwrap();
                    assert_eq!(jcj_criterion(&c, &cp).unwrap(), is_isotropic(&c, &l));
                }
            }
        }
    }
}
