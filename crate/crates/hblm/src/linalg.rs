//! Exact linear algebra over the base chain ring: dense matrices, a
//! Smith-like diagonalization, the Howell normal form (the canonical
//! generating matrix of a row span), kernels and inverses.
//!
//! Every nonzero element of a chain ring is a unit times a power of the
//! maximal-ideal generator, which is what makes all of this work without
//! fractions.

use crate::rings::BaseRing;
use std::ops::{Index, IndexMut};

/// Dense row-major matrix with packed base-ring entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    d: Vec<u64>,
}

impl Index<(usize, usize)> for RMat {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        &self.d[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        &mut self.d[r * self.cols + c]
    }
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMat { rows, cols, d: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, cols: usize) -> Self {
        let n = rows.len();
        let mut m = RMat::zeros(n, cols);
        for (r, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, x) in row.into_iter().enumerate() {
                m[(r, c)] = x;
            }
        }
        m
    }

    pub fn data(&self) -> &[u64] {
        &self.d
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.d[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> RMat {
        let mut t = RMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, ring: &BaseRing, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other[(k, c)];
                    if b != 0 {
                        out[(r, c)] = ring.add(out[(r, c)], ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, ring: &BaseRing, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.d.len() {
            out.d[i] = ring.add(self.d[i], other.d[i]);
        }
        out
    }

    pub fn sub(&self, ring: &BaseRing, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.d.len() {
            out.d[i] = ring.sub(self.d[i], other.d[i]);
        }
        out
    }

    pub fn neg(&self, ring: &BaseRing) -> RMat {
        let mut out = self.clone();
        for x in out.d.iter_mut() {
            *x = ring.neg(*x);
        }
        out
    }

    pub fn scale(&self, ring: &BaseRing, s: u64) -> RMat {
        let mut out = self.clone();
        for x in out.d.iter_mut() {
            *x = ring.mul(*x, s);
        }
        out
    }

    pub fn mul_vec(&self, ring: &BaseRing, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = 0;
                for c in 0..self.cols {
                    let a = self[(r, c)];
                    if a != 0 && v[c] != 0 {
                        acc = ring.add(acc, ring.mul(a, v[c]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Keep the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> RMat {
        let mut out = RMat::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for c in 0..self.cols {
                out[(r, c)] = self[(i, c)];
            }
        }
        out
    }

    pub fn hstack(&self, other: &RMat) -> RMat {
        assert_eq!(self.rows, other.rows);
        let mut out = RMat::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)];
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)];
            }
        }
        out
    }

    pub fn vstack(&self, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.cols);
        let mut out = RMat::zeros(self.rows + other.rows, self.cols);
        out.d[..self.d.len()].copy_from_slice(&self.d);
        out.d[self.d.len()..].copy_from_slice(&other.d);
        out
    }

    /// Entrywise image in the residue field `F_p` (entries stay packed,
    /// the resulting matrix is over the field base).
    pub fn residue(&self, ring: &BaseRing) -> RMat {
        let mut out = self.clone();
        for x in out.d.iter_mut() {
            *x = ring.residue(*x);
        }
        out
    }

    pub fn fmt_with(&self, ring: &BaseRing) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let entries: Vec<String> = (0..self.cols).map(|c| ring.fmt_elem(self[(r, c)])).collect();
                format!("[{}]", entries.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

/// Rank of the residue image over `F_p` (plain Gaussian elimination).
pub fn residue_rank(ring: &BaseRing, a: &RMat) -> usize {
    let p = ring.p;
    let fp = BaseRing::new(p, 1, false);
    let mut m: Vec<Vec<u64>> = (0..a.rows).map(|r| a.row(r).iter().map(|&x| ring.residue(x)).collect()).collect();
    let mut rank = 0;
    for c in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(piv) = (rank..a.rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = fp.inv(m[rank][c]).unwrap();
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..a.rows {
            if r != rank && m[r][c] != 0 {
                let s = m[r][c];
                for j in 0..a.cols {
                    m[r][j] = (m[r][j] + p - s * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Smith-like decomposition `A = U * D * V` over a chain ring: `U`, `V`
/// invertible, `D` diagonal with entries `uniformizer^a` sorted by
/// valuation (pivot selection by minimal valuation).
pub struct SmithForm {
    pub u: RMat,
    pub d: RMat,
    pub v: RMat,
    /// Valuation of each diagonal entry, `None` for a zero diagonal.
    pub profile: Vec<Option<u32>>,
}

pub fn chain_echelon(ring: &BaseRing, a: &RMat) -> SmithForm {
    let (rows, cols) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = RMat::identity(rows);
    let mut v = RMat::identity(cols);
    let len = ring.chain_len();
    let steps = rows.min(cols);
    for k in 0..steps {
        // minimal-valuation pivot in the trailing block
        let mut best: Option<(usize, usize, u32)> = None;
        for r in k..rows {
            for c in k..cols {
                let x = d[(r, c)];
                if x == 0 {
                    continue;
                }
                let val = ring.val(x);
                if best.map_or(true, |(_, _, bv)| val < bv) {
                    best = Some((r, c, val));
                }
                if val == 0 {
                    break;
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((pr, pc, pv)) = best else { break };
        // move pivot to (k, k); row swaps act on U columns, col swaps on V rows
        if pr != k {
            for c in 0..cols {
                d.d.swap(k * cols + c, pr * cols + c);
            }
            for r in 0..rows {
                d_swap(&mut u, r, k, pr);
            }
        }
        if pc != k {
            for r in 0..rows {
                d.d.swap(r * cols + k, r * cols + pc);
            }
            for c in 0..cols {
                let t = v[(k, c)];
                v[(k, c)] = v[(pc, c)];
                v[(pc, c)] = t;
            }
        }
        // normalize pivot to uniformizer^pv
        let unit = ring.unit_part(d[(k, k)]);
        let unit_inv = ring.inv(unit).expect("unit part is a unit");
        for c in k..cols {
            d[(k, c)] = ring.mul(d[(k, c)], unit_inv);
        }
        for r in 0..rows {
            u[(r, k)] = ring.mul(u[(r, k)], unit);
        }
        debug_assert_eq!(d[(k, k)], ring.uniformizer_pow(pv));
        // clear the rest of row k and column k
        for r in k + 1..rows {
            let x = d[(r, k)];
            if x == 0 {
                continue;
            }
            let q = ring.div_exact(x, d[(k, k)]);
            for c in k..cols {
                d[(r, c)] = ring.sub(d[(r, c)], ring.mul(q, d[(k, c)]));
            }
            // row_r -= q row_k  =>  u_col_k += q u_col_r
            for rr in 0..rows {
                u[(rr, k)] = ring.add(u[(rr, k)], ring.mul(q, u[(rr, r)]));
            }
        }
        for c in k + 1..cols {
            let x = d[(k, c)];
            if x == 0 {
                continue;
            }
            let q = ring.div_exact(x, d[(k, k)]);
            for r in k..rows {
                d[(r, c)] = ring.sub(d[(r, c)], ring.mul(q, d[(r, k)]));
            }
            for cc in 0..cols {
                v[(k, cc)] = ring.add(v[(k, cc)], ring.mul(q, v[(c, cc)]));
            }
        }
        let _ = len;
    }
    let profile = (0..steps)
        .map(|k| {
            let x = d[(k, k)];
            (x != 0).then(|| ring.val(x))
        })
        .collect();
    SmithForm { u, d, v, profile }
}

fn d_swap(m: &mut RMat, r: usize, c1: usize, c2: usize) {
    let t = m[(r, c1)];
    m[(r, c1)] = m[(r, c2)];
    m[(r, c2)] = t;
}

/// Columns generating `{v : A v = 0}` over the chain ring.
pub fn kernel(ring: &BaseRing, a: &RMat) -> RMat {
    let sf = chain_echelon(ring, a);
    let len = ring.chain_len();
    // D v' = 0 with v = V^-1 v'; generators: ann(uniformizer^a) * e_k for
    // diagonal entries and free e_k beyond the profile
    let mut gens: Vec<Vec<u64>> = Vec::new();
    for (k, entry) in sf.profile.iter().enumerate() {
        match entry {
            Some(0) => {}
            Some(v) => {
                let mut g = vec![0u64; a.cols];
                g[k] = ring.uniformizer_pow(len - v);
                gens.push(g);
            }
            None => {
                let mut g = vec![0u64; a.cols];
                g[k] = 1;
                gens.push(g);
            }
        }
    }
    for k in sf.profile.len()..a.cols {
        let mut g = vec![0u64; a.cols];
        g[k] = 1;
        gens.push(g);
    }
    let vinv = invert(ring, &sf.v).expect("V invertible");
    let g = RMat::from_rows(gens, a.cols);
    // columns vinv * g^T
    vinv.mul(ring, &g.transpose())
}

/// One solution of `A x = b` over the chain ring, if any exists.
pub fn solve(ring: &BaseRing, a: &RMat, b: &[u64]) -> Option<Vec<u64>> {
    assert_eq!(a.rows, b.len());
    let sf = chain_echelon(ring, a);
    let uinv = invert(ring, &sf.u).expect("U invertible");
    let c = uinv.mul_vec(ring, b);
    let mut y = vec![0u64; a.cols];
    for (k, &ck) in c.iter().enumerate() {
        match sf.profile.get(k).copied().flatten() {
            Some(v) => {
                if ck == 0 {
                    continue;
                }
                if ring.val(ck) < v {
                    return None;
                }
                y[k] = ring.div_exact(ck, sf.d[(k, k)]);
            }
            None => {
                if ck != 0 {
                    return None;
                }
            }
        }
    }
    let vinv = invert(ring, &sf.v).expect("V invertible");
    let x = vinv.mul_vec(ring, &y);
    debug_assert_eq!(a.mul_vec(ring, &x), b);
    Some(x)
}

/// Inverse of a square matrix, if it exists (all residue pivots found).
pub fn invert(ring: &BaseRing, a: &RMat) -> Option<RMat> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = RMat::identity(n);
    for k in 0..n {
        let piv = (k..n).find(|&r| ring.is_unit(m[(r, k)]))?;
        if piv != k {
            for c in 0..n {
                m.d.swap(k * n + c, piv * n + c);
                inv.d.swap(k * n + c, piv * n + c);
            }
        }
        let s = ring.inv(m[(k, k)]).unwrap();
        for c in 0..n {
            m[(k, c)] = ring.mul(m[(k, c)], s);
            inv[(k, c)] = ring.mul(inv[(k, c)], s);
        }
        for r in 0..n {
            if r != k && m[(r, k)] != 0 {
                let q = m[(r, k)];
                for c in 0..n {
                    m[(r, c)] = ring.sub(m[(r, c)], ring.mul(q, m[(k, c)]));
                    inv[(r, c)] = ring.sub(inv[(r, c)], ring.mul(q, inv[(k, c)]));
                }
            }
        }
    }
    Some(inv)
}

/// Howell normal form of the row span: the canonical generating matrix.
/// Two matrices have equal row spans over the chain ring iff their Howell
/// forms are identical.  Zero rows are dropped, pivots are normalized
/// powers of the uniformizer, entries above a pivot are reduced into the
/// canonical transversal, and annihilator completions are included.
pub fn howell(ring: &BaseRing, a: &RMat) -> RMat {
    let cols = a.cols;
    let len = ring.chain_len();
    let mut work: Vec<Vec<u64>> = (0..a.rows).map(|r| a.row(r).to_vec()).collect();
    let mut result: Vec<(usize, u32, Vec<u64>)> = Vec::new(); // (pivot col, val, row)
    for col in 0..cols {
        // rows in `work` are zero left of `col` by induction
        let mut best: Option<(usize, u32)> = None;
        for (i, row) in work.iter().enumerate() {
            if row[col] == 0 {
                continue;
            }
            let v = ring.val(row[col]);
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        let Some((pi, pv)) = best else { continue };
        let mut pivot_row = work.swap_remove(pi);
        let unit_inv = ring.inv(ring.unit_part(pivot_row[col])).unwrap();
        for x in pivot_row.iter_mut() {
            *x = ring.mul(*x, unit_inv);
        }
        debug_assert_eq!(pivot_row[col], ring.uniformizer_pow(pv));
        for row in work.iter_mut() {
            if row[col] != 0 {
                let q = ring.div_exact(row[col], pivot_row[col]);
                for (x, &pxc) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = ring.sub(*x, ring.mul(q, pxc));
                }
            }
        }
        if pv > 0 {
            // annihilator completion keeps leading-term reduction total
            let ann = ring.uniformizer_pow(len - pv);
            let extra: Vec<u64> = pivot_row.iter().map(|&x| ring.mul(x, ann)).collect();
            if extra.iter().any(|&x| x != 0) {
                debug_assert_eq!(extra[col], 0);
                work.push(extra);
            }
        }
        work.retain(|row| row.iter().any(|&x| x != 0));
        result.push((col, pv, pivot_row));
    }
    // reduce entries above each pivot into the transversal of (pivot)
    for k in 0..result.len() {
        let (col, pv, row_k) = {
            let (c, v, r) = &result[k];
            (*c, *v, r.clone())
        };
        for i in 0..k {
            let x = result[i].2[col];
            if x == 0 {
                continue;
            }
            let (q, rem) = ring.divmod_pow(x, pv);
            if q == 0 {
                continue;
            }
            let row_i = &mut result[i].2;
            for (y, &rk) in row_i.iter_mut().zip(row_k.iter()) {
                *y = ring.sub(*y, ring.mul(q, rk));
            }
            debug_assert_eq!(row_i[col], rem);
        }
    }
    RMat::from_rows(result.into_iter().map(|(_, _, r)| r).collect(), cols)
}

/// Express `v` over the rows of a Howell form; returns the coefficient
/// vector when `v` lies in the span.
pub fn howell_solve(ring: &BaseRing, h: &RMat, v: &[u64]) -> Option<Vec<u64>> {
    let mut rem = v.to_vec();
    let mut coeffs = vec![0u64; h.rows];
    for r in 0..h.rows {
        let col = (0..h.cols).find(|&c| h[(r, c)] != 0)?;
        if rem[col] == 0 {
            continue;
        }
        let pv = ring.val(h[(r, col)]);
        if ring.val(rem[col]) < pv {
            return None;
        }
        let q = ring.div_exact(rem[col], h[(r, col)]);
        coeffs[r] = q;
        for (x, &hc) in rem.iter_mut().zip(h.row(r)) {
            *x = ring.sub(*x, ring.mul(q, hc));
        }
    }
    rem.iter().all(|&x| x == 0).then_some(coeffs)
}

pub fn howell_contains(ring: &BaseRing, h: &RMat, v: &[u64]) -> bool {
    howell_solve(ring, h, v).is_some()
}
