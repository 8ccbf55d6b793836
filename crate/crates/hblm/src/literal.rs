//! The textual lattice syntax used by the CLI and by report witnesses:
//! generators separated by `;`, each a sum of terms `coeff*mono*fk` with
//! `mono` a product drawn from `pi^a`, `w^b`, `eps` and `fk` one of
//! `f1`, `f2`.  Example: `pi*f1+eps*f1 ; pi*f2`.

use crate::lattices::{self, Lattice};
use crate::linalg::RMat;
use crate::rings::RingCtx;
use crate::{Error, Result};

/// Parse one module vector, e.g. `pi*f1+eps*f1` or `2*w*pi^2*f2-f1`.
pub fn parse_vector(ctx: &RingCtx, s: &str) -> Result<Vec<u64>> {
    let n = lattices::module_rank(ctx);
    let mut v = vec![0u64; n];
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                if !cur.trim().is_empty() {
                    terms.push((neg, cur.trim().to_string()));
                }
                cur = String::new();
                neg = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((neg, cur.trim().to_string()));
    }
    if terms.is_empty() {
        return Err(Error::Parse("empty generator".into()));
    }
    for (negated, term) in terms {
        let mut coeff: i64 = if negated { -1 } else { 1 };
        let mut eps_pow = 0usize;
        let mut pi_pow = 0usize;
        let mut w_pow = 0usize;
        let mut fk: Option<usize> = None;
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{term}`")));
            }
            if let Ok(x) = factor.parse::<i64>() {
                coeff = coeff.wrapping_mul(x);
            } else if factor == "f1" {
                if fk.replace(0).is_some() {
                    return Err(Error::Parse(format!("two basis symbols in `{term}`")));
                }
            } else if factor == "f2" {
                if fk.replace(1).is_some() {
                    return Err(Error::Parse(format!("two basis symbols in `{term}`")));
                }
            } else if factor == "eps" {
                eps_pow += 1;
            } else if factor == "pi" {
                pi_pow += 1;
            } else if factor == "w" {
                w_pow += 1;
            } else if let Some(exp) = factor.strip_prefix("pi^") {
                pi_pow += exp.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
            } else if let Some(exp) = factor.strip_prefix("w^") {
                w_pow += exp.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
            } else {
                return Err(Error::Parse(format!("unknown symbol `{factor}`")));
            }
        }
        let Some(k) = fk else {
            return Err(Error::Parse(format!("term `{term}` has no f1/f2 symbol")));
        };
        if eps_pow > 0 && !ctx.base.eps {
            return Err(Error::Parse("eps used over a base without dual numbers".into()));
        }
        if w_pow >= ctx.f && ctx.f == 1 && w_pow > 0 {
            return Err(Error::Parse("w used over a totally ramified ring".into()));
        }
        if w_pow >= ctx.f && w_pow > 0 {
            return Err(Error::Parse(format!("w^{w_pow} exceeds the unramified degree")));
        }
        // pi^a with a >= e folds through pi^e = p*u
        let mut scalar = ctx.base.from_int(coeff);
        let mut c = pi_pow;
        while c >= ctx.e {
            scalar = ctx.base.mul(scalar, ctx.pu);
            c -= ctx.e;
        }
        if eps_pow >= 2 {
            continue; // eps^2 = 0
        }
        if eps_pow == 1 {
            let (c0, c1) = ctx.base.split(scalar);
            if c1 != 0 {
                continue; // eps * eps component
            }
            scalar = ctx.base.join(0, c0);
        }
        if scalar == 0 {
            continue;
        }
        let slot = lattices::coord(ctx, k, w_pow, c);
        v[slot] = ctx.base.add(v[slot], scalar);
    }
    Ok(v)
}

/// Parse a full lattice literal (generators separated by `;`).
pub fn parse_lattice(ctx: &RingCtx, s: &str) -> Result<Lattice> {
    let mut rows = Vec::new();
    for part in s.split(';') {
        if part.trim().is_empty() {
            continue;
        }
        rows.push(parse_vector(ctx, part)?);
    }
    if rows.is_empty() {
        return Err(Error::Parse("lattice literal has no generators".into()));
    }
    let n = lattices::module_rank(ctx);
    Ok(Lattice::from_rows(ctx, &RMat::from_rows(rows, n)))
}

fn fmt_term(_ctx: &RingCtx, scalar_c0: u64, with_eps: bool, k: usize, b: usize, c: usize) -> String {
    let mut factors = Vec::new();
    if scalar_c0 != 1 {
        factors.push(scalar_c0.to_string());
    }
    if with_eps {
        factors.push("eps".to_string());
    }
    if b == 1 {
        factors.push("w".to_string());
    } else if b > 1 {
        factors.push(format!("w^{b}"));
    }
    if c == 1 {
        factors.push("pi".to_string());
    } else if c > 1 {
        factors.push(format!("pi^{c}"));
    }
    factors.push(if k == 0 { "f1".to_string() } else { "f2".to_string() });
    factors.join("*")
}

/// Render one module vector in the literal syntax.
pub fn format_vector(ctx: &RingCtx, v: &[u64]) -> String {
    let mut terms = Vec::new();
    for k in 0..2 {
        for b in 0..ctx.f {
            for c in 0..ctx.e {
                let x = v[lattices::coord(ctx, k, b, c)];
                if x == 0 {
                    continue;
                }
                let (c0, c1) = ctx.base.split(x);
                if c0 != 0 {
                    terms.push(fmt_term(ctx, c0, false, k, b, c));
                }
                if c1 != 0 {
                    terms.push(fmt_term(ctx, c1, true, k, b, c));
                }
            }
        }
    }
    if terms.is_empty() {
        "0*f1".to_string()
    } else {
        terms.join("+")
    }
}

/// Render the canonical generators of a lattice; used as the stable
/// witness key in reports.
pub fn format_lattice(ctx: &RingCtx, l: &Lattice) -> String {
    if l.gens.rows == 0 {
        return "0*f1".to_string();
    }
    (0..l.gens.rows).map(|r| format_vector(ctx, l.gens.row(r))).collect::<Vec<_>>().join(" ; ")
}
