//! Exhaustive enumeration of `N(R)` by the standard chart cover of the
//! Grassmannian: every rank-g summand is the column span of a matrix that
//! is the identity on some g-subset of coordinates, so scanning all
//! subsets and all complementary blocks visits every point.  A point is
//! emitted only from its lexicographically least covering chart, which
//! makes deduplication local and the parallel merge order-independent.

use crate::conditions::{self, KChecker};
use crate::lattices::{self, Lattice};
use crate::linalg::{self, RMat};
use crate::literal;
use crate::rings::RingCtx;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Enumeration limits and parallelism.
#[derive(Clone, Debug)]
pub struct EnumConfig {
    /// Upper bound on the raw candidate count `C(2g, g) * |R|^(g^2)`.
    pub budget: u64,
    /// Worker threads; 0 picks the machine default.
    pub workers: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { budget: 100_000_000, workers: 0 }
    }
}

/// Raw candidate count of the chart cover.
pub fn candidate_count(ctx: &RingCtx) -> u128 {
    let g = ctx.g as u128;
    let binom = {
        let mut b: u128 = 1;
        for k in 0..g {
            b = b * (2 * g - k) / (k + 1);
        }
        b
    };
    binom * (ctx.base.size() as u128).pow((ctx.g * ctx.g) as u32)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Sparse row view of an action matrix: `out[r] = sum coeff * in[col]`.
type SparseRows = Vec<Vec<(usize, u64)>>;

fn sparse_rows(m: &RMat) -> SparseRows {
    (0..m.rows)
        .map(|r| (0..m.cols).filter_map(|c| (m[(r, c)] != 0).then(|| (c, m[(r, c)]))).collect())
        .collect()
}

struct ChartScan<'a> {
    ctx: &'a RingCtx,
    subset: Vec<usize>,
    complement: Vec<usize>,
    /// position of each coordinate: Ok(row in subset) or Err(row in complement)
    place: Vec<std::result::Result<usize, usize>>,
    actions: Vec<SparseRows>,
}

impl<'a> ChartScan<'a> {
    fn new(ctx: &'a RingCtx, subset: Vec<usize>, actions: Vec<SparseRows>) -> Self {
        let n = lattices::module_rank(ctx);
        let complement: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
        let mut place = vec![Ok(0); n];
        for (q, &i) in subset.iter().enumerate() {
            place[i] = Ok(q);
        }
        for (q, &i) in complement.iter().enumerate() {
            place[i] = Err(q);
        }
        ChartScan { ctx, subset, complement, place, actions }
    }

    /// Candidate columns: identity on the subset rows, `B` on the rest.
    /// Invariance of the span under an action `A` amounts to
    /// `(A G)_complement = B * (A G)_subset` column by column.
    fn is_invariant(&self, b: &[u64]) -> bool {
        let g = self.ctx.g;
        let ring = &self.ctx.base;
        for action in &self.actions {
            // ag_s[q][col], ag_t[q][col]
            let mut ag_s = vec![0u64; g * g];
            let mut ag_t = vec![0u64; g * g];
            for col in 0..g {
                // column `col` of G: unit at subset[col], B[.][col] on complement
                for (coord, rows) in [(true, &mut ag_s), (false, &mut ag_t)] {
                    let target: &[usize] = if coord { &self.subset } else { &self.complement };
                    for (q, &row) in target.iter().enumerate() {
                        let mut acc = 0u64;
                        for &(src, coeff) in self.actions_row(action, row) {
                            let gv = match self.place[src] {
                                Ok(qs) => u64::from(qs == col),
                                Err(qt) => b[qt * g + col],
                            };
                            if gv != 0 {
                                acc = ring.add(acc, ring.mul(coeff, gv));
                            }
                        }
                        rows[q * g + col] = acc;
                    }
                }
            }
            // B * ag_s == ag_t
            for t in 0..g {
                for col in 0..g {
                    let mut acc = 0u64;
                    for q in 0..g {
                        let bv = b[t * g + q];
                        if bv != 0 && ag_s[q * g + col] != 0 {
                            acc = ring.add(acc, ring.mul(bv, ag_s[q * g + col]));
                        }
                    }
                    if acc != ag_t[t * g + col] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn actions_row<'b>(&self, action: &'b SparseRows, row: usize) -> &'b Vec<(usize, u64)> {
        &action[row]
    }

    fn lattice_of(&self, b: &[u64]) -> Lattice {
        let g = self.ctx.g;
        let n = lattices::module_rank(self.ctx);
        let mut rows = Vec::with_capacity(g);
        for col in 0..g {
            let mut v = vec![0u64; n];
            v[self.subset[col]] = 1;
            for (t, &coord) in self.complement.iter().enumerate() {
                v[coord] = b[t * g + col];
            }
            rows.push(v);
        }
        Lattice::from_rows(self.ctx, &RMat::from_rows(rows, n))
    }
}

/// Lexicographically least chart whose coordinate subset carries a unit
/// minor of the point's generator matrix.
fn least_covering_chart(ctx: &RingCtx, charts: &[Vec<usize>], l: &Lattice) -> usize {
    for (idx, subset) in charts.iter().enumerate() {
        let sub = l.gens.transpose().select_rows(subset);
        if linalg::residue_rank(&ctx.base, &sub) == ctx.g {
            return idx;
        }
    }
    unreachable!("a rank-g summand has a unit minor on some coordinate subset")
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        pool.install(job)
    }
}

/// All points of `N(R)`, each exactly once, sorted by canonical key.
pub fn enum_points(ctx: &RingCtx, cfg: &EnumConfig) -> Result<Vec<Lattice>> {
    let candidates = candidate_count(ctx);
    if candidates > cfg.budget as u128 {
        return Err(Error::BudgetExceeded { candidates, budget: cfg.budget });
    }
    let n = lattices::module_rank(ctx);
    let charts = subsets(n, ctx.g);
    let mut actions = vec![sparse_rows(&lattices::module_pi_matrix(ctx))];
    if let Some(w) = lattices::module_omega_matrix(ctx) {
        actions.push(sparse_rows(&w));
    }
    let size = ctx.base.size();
    let cells = ctx.g * ctx.g;
    let per_chart = (size as u128).pow(cells as u32);
    // chunked work units keep the scan parallel within a single chart
    let chunk = (per_chart / 64).max(4096).min(per_chart);
    let mut units = Vec::new();
    for (ci, subset) in charts.iter().enumerate() {
        let mut start = 0u128;
        while start < per_chart {
            units.push((ci, start, (start + chunk).min(per_chart)));
            start += chunk;
        }
        let _ = subset;
    }
    let found: Vec<Vec<Lattice>> = with_pool(cfg.workers, || {
        units
            .par_iter()
            .map(|&(ci, lo, hi)| {
                let scan = ChartScan::new(ctx, charts[ci].clone(), actions.clone());
                let mut out = Vec::new();
                let mut b = vec![0u64; cells];
                for idx in lo..hi {
                    let mut t = idx;
                    for cell in b.iter_mut() {
                        *cell = (t % size as u128) as u64;
                        t /= size as u128;
                    }
                    if !scan.is_invariant(&b) {
                        continue;
                    }
                    let l = scan.lattice_of(&b);
                    if least_covering_chart(ctx, &charts, &l) == ci {
                        out.push(l);
                    }
                }
                out
            })
            .collect()
    });
    let mut points: Vec<Lattice> = found.into_iter().flatten().collect();
    points.sort_by(|a, b| a.key().cmp(&b.key()));
    // chart attribution guarantees uniqueness; make it an invariant
    let mut keys: Vec<_> = points.iter().map(|l| l.key()).collect();
    keys.dedup();
    assert_eq!(keys.len(), points.len(), "duplicate canonical keys in enumeration");
    Ok(points)
}

/// Exhaustive classification of the points of `N(R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub total: u64,
    pub dp: u64,
    pub k: u64,
    pub r: u64,
    /// Point counts by the reduction type of the residue point.
    pub by_type: BTreeMap<String, u64>,
    /// Literals of points in the symmetric difference of DP and K
    /// (expected empty).
    pub dp_k_witnesses: Vec<String>,
    /// Points where the pi-only determinant check disagrees with the
    /// generic one (diagnostic; counted, not expected).
    pub pi_generic_disagreements: u64,
}

impl Classification {
    pub fn dp_eq_k(&self) -> bool {
        self.dp_k_witnesses.is_empty()
    }
}

/// Flags of one classified point.
#[derive(Clone, Debug)]
pub struct PointInfo {
    pub lattice: Lattice,
    pub dp: bool,
    pub k: bool,
    pub r: bool,
    pub ty: String,
}

/// Classify every point; the per-point data is returned sorted by
/// canonical key so downstream reports are deterministic.
pub fn classify_points(ctx: &RingCtx, cfg: &EnumConfig) -> Result<Vec<PointInfo>> {
    let points = enum_points(ctx, cfg)?;
    let checker = KChecker::new(ctx);
    let res_ctx = ctx.residue_ctx();
    let infos: Vec<PointInfo> = with_pool(cfg.workers, || {
        points
            .into_par_iter()
            .map(|l| {
                let dp = conditions::is_dp(ctx, &l).expect("enumerated point");
                let k = checker.is_k(ctx, &l).expect("enumerated point");
                let r = conditions::is_r_point(ctx, &l).expect("enumerated point");
                let ty = if ctx.base.is_field() {
                    l.reduction_type(ctx).expect("point of N over a field").label()
                } else {
                    l.residue_lattice(ctx, &res_ctx)
                        .reduction_type(&res_ctx)
                        .expect("residue of a point is a point")
                        .label()
                };
                PointInfo { lattice: l, dp, k, r, ty }
            })
            .collect()
    });
    Ok(infos)
}

pub fn classify(ctx: &RingCtx, cfg: &EnumConfig) -> Result<Classification> {
    let infos = classify_points(ctx, cfg)?;
    let checker = KChecker::new(ctx);
    let mut out = Classification {
        total: infos.len() as u64,
        dp: 0,
        k: 0,
        r: 0,
        by_type: BTreeMap::new(),
        dp_k_witnesses: Vec::new(),
        pi_generic_disagreements: 0,
    };
    for info in &infos {
        out.dp += u64::from(info.dp);
        out.k += u64::from(info.k);
        out.r += u64::from(info.r);
        *out.by_type.entry(info.ty.clone()).or_insert(0) += 1;
        if info.dp != info.k {
            out.dp_k_witnesses.push(literal::format_lattice(ctx, &info.lattice));
        }
        let pi_only = checker.is_k_pi_only(ctx, &info.lattice).expect("point");
        if pi_only != info.k {
            out.pi_generic_disagreements += 1;
        }
    }
    debug_assert!(out.r <= out.dp && out.dp <= out.total && out.k <= out.total);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{build_ring, RingSpec};

    fn ctx(p: u64, n: u32, f: u32, eps: bool, e: u32, u: u64) -> RingCtx {
        build_ring(&RingSpec::new(p, n, f, eps, e, u)).unwrap()
    }

    #[test]
    fn projective_line_counts_unramified() {
        // e = 1, f = 1: all of P^1(F_p)
        for p in [2u64, 3, 5] {
            let c = ctx(p, 1, 1, false, 1, 1);
            let pts = enum_points(&c, &EnumConfig::default()).unwrap();
            assert_eq!(pts.len() as u64, p + 1);
        }
        // e = 1, f = 2 over F2: P^1(F4) has 5 points
        let c = ctx(2, 1, 2, false, 1, 1);
        let pts = enum_points(&c, &EnumConfig::default()).unwrap();
        assert_eq!(pts.len(), 5);
    }

    #[test]
    fn f2_e2_point_count_and_classes() {
        // oracle (independent scan of all 2-dim subspaces of F2^4): the
        // seven pi-stable planes are p^2 + p free points plus pi M
        let c = ctx(2, 1, 1, false, 2, 1);
        let cls = classify(&c, &EnumConfig::default()).unwrap();
        assert_eq!(cls.total, 7);
        assert_eq!(cls.dp, 7);
        assert_eq!(cls.k, 7);
        assert_eq!(cls.r, 6);
        assert!(cls.dp_eq_k());
        assert_eq!(cls.by_type.get("(0,2)"), Some(&6));
        assert_eq!(cls.by_type.get("(1,1)"), Some(&1));
    }

    #[test]
    fn chart_cover_matches_full_subspace_scan_f2() {
        // independent oracle: enumerate all 2x4 matrices over F2, keep
        // rank-2 row spans, filter O-invariance by direct membership
        let c = ctx(2, 1, 1, false, 2, 1);
        let n = lattices::module_rank(&c);
        let pi = lattices::module_pi_matrix(&c);
        let mut keys = std::collections::BTreeSet::new();
        let mut subspace_count = 0usize;
        let mut seen_spans = std::collections::BTreeSet::new();
        for idx in 0..(1u32 << 8) {
            let mut rows = vec![vec![0u64; 4], vec![0u64; 4]];
            for bit in 0..8 {
                rows[bit / 4][bit % 4] = u64::from(idx >> bit & 1 == 1);
            }
            let l = Lattice::from_rows(&c, &RMat::from_rows(rows, n));
            if l.gens.rows != 2 || !l.is_summand_of_rank(&c, 2) {
                continue;
            }
            if seen_spans.insert(l.key()) {
                subspace_count += 1;
            }
            let stable = (0..l.gens.rows).all(|r| l.contains(&c, &pi.mul_vec(&c.base, l.gens.row(r))));
            if stable {
                keys.insert(l.key());
            }
        }
        assert_eq!(subspace_count, 35); // all 2-dim subspaces of F2^4
        let pts = enum_points(&c, &EnumConfig::default()).unwrap();
        let chart_keys: std::collections::BTreeSet<_> = pts.iter().map(|l| l.key()).collect();
        assert_eq!(chart_keys, keys);
    }

    #[test]
    fn counts_stable_under_eisenstein_unit() {
        // Z/9 with u = 1 and u = 2 give different rings but identical
        // classification counts
        let c1 = classify(&ctx(3, 2, 1, false, 2, 1), &EnumConfig::default()).unwrap();
        let c2 = classify(&ctx(3, 2, 1, false, 2, 2), &EnumConfig::default()).unwrap();
        assert_eq!(c1.total, c2.total);
        assert_eq!(c1.dp, c2.dp);
        assert_eq!(c1.k, c2.k);
        assert_eq!(c1.r, c2.r);
        assert_eq!(c1.by_type, c2.by_type);
    }

    #[test]
    fn worker_count_independence() {
        let c = ctx(3, 1, 1, false, 2, 1);
        let base = classify(&c, &EnumConfig { workers: 1, ..Default::default() }).unwrap();
        for workers in [2, 4] {
            let other = classify(&c, &EnumConfig { workers, ..Default::default() }).unwrap();
            assert_eq!(base, other);
        }
    }

    #[test]
    fn budget_guard() {
        let c = ctx(7, 1, 1, false, 3, 1);
        let err = enum_points(&c, &EnumConfig { budget: 1000, workers: 0 }).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn no_r_points_missed_small() {
        // every point satisfying (R) is a free orbit O.v of some module
        // vector: crosscheck by generating all O-spans of single vectors
        let c = ctx(2, 1, 1, false, 2, 1);
        let mut from_orbits = std::collections::BTreeSet::new();
        for idx in 0..16u64 {
            let v: Vec<u64> = (0..4).map(|k| (idx >> k) & 1).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let l = lattices::o_span(&c, &[v]);
            if conditions::is_point_of_n(&c, &l) && conditions::is_r_point(&c, &l).unwrap() {
                from_orbits.insert(l.key());
            }
        }
        let infos = classify_points(&c, &EnumConfig::default()).unwrap();
        let r_keys: std::collections::BTreeSet<_> =
            infos.iter().filter(|i| i.r).map(|i| i.lattice.key()).collect();
        assert_eq!(from_orbits, r_keys);
    }
}
