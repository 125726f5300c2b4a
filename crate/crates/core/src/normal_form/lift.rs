//! Fallback search for the starting vector `X`.
//!
//! The conditions on `X` are quadratic in its `Z_p`-coordinates. A residue
//! vector satisfying them mod `p` is lifted one digit at a time, picking a
//! random solution of the linearized system, until the residual is small
//! enough against the Jacobian for Newton's method to converge.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{solve_fp_affine, Ops};
use crate::dieudonne::DieudonneModule;
use crate::witt::{Residue, WittElement};

const ATTEMPTS: usize = 200;
const CANDIDATE_POOL: u64 = 4096;

pub(super) struct Conditions<'a> {
    ops: Ops<'a>,
    /// Exponents `k` with `⟨X, F^k X⟩ = 0` required.
    ks: Vec<usize>,
    g: usize,
    piece0: Vec<usize>,
}

impl<'a> Conditions<'a> {
    pub(super) fn new(module: &'a DieudonneModule) -> Self {
        let (f, r, g) = (module.f(), module.r(), module.g());
        let mut ks: Vec<usize> = (1..r).map(|i| i * f).collect();
        if f == 1 && g >= 2 {
            ks.push(g + 1);
        }
        Conditions {
            ops: Ops {
                module,
                ctx: module.ctx(),
            },
            ks,
            g,
            piece0: module.piece_indices(0),
        }
    }

    fn residual(&self, x: &[WittElement]) -> Vec<WittElement> {
        let ops = &self.ops;
        let mut out: Vec<WittElement> = self.ks.iter().map(|&k| ops.pair(x, &ops.f_pow(x, k))).collect();
        out.push(ops.pair(x, &ops.f_pow(x, self.g)) - WittElement::one(ops.ctx));
        out
    }

    fn linearized(&self, x: &[WittElement], d: &[WittElement]) -> Vec<WittElement> {
        let ops = &self.ops;
        self.ks
            .iter()
            .copied()
            .chain(std::iter::once(self.g))
            .map(|k| ops.pair(d, &ops.f_pow(x, k)) + ops.pair(x, &ops.f_pow(d, k)))
            .collect()
    }

    pub(super) fn satisfied(&self, x: &[WittElement]) -> bool {
        self.residual(x).iter().all(WittElement::is_zero)
    }

    fn coords(v: &[WittElement]) -> Vec<BigUint> {
        v.iter().flat_map(|e| e.coeffs().iter().cloned()).collect()
    }

    /// Adds `Σ s_{i,l} ζ^l e_i` over the piece-0 indices `i`.
    fn shift(&self, x: &[WittElement], s: &[BigUint]) -> Vec<WittElement> {
        let ctx = self.ops.ctx;
        let m = ctx.m();
        let mut out = x.to_vec();
        for (slot, &i) in self.piece0.iter().enumerate() {
            let d = WittElement::from_coeffs(ctx, s[slot * m..(slot + 1) * m].to_vec())
                .expect("m coordinates");
            out[i] = &out[i] + &d;
        }
        out
    }

    fn jacobian(&self, x: &[WittElement]) -> Vec<Vec<BigUint>> {
        let ctx = self.ops.ctx;
        let m = ctx.m();
        let rank = self.ops.module.rank();
        let mut cols = Vec::with_capacity(self.piece0.len() * m);
        for &i in &self.piece0 {
            for l in 0..m {
                let mut e = vec![BigUint::zero(); m];
                e[l] = BigUint::one();
                let mut d = vec![WittElement::zero(ctx); rank];
                d[i] = WittElement::from_coeffs(ctx, e).expect("m coordinates");
                cols.push(Self::coords(&self.linearized(x, &d)));
            }
        }
        cols
    }

    /// Residue-level vectors of piece 0 satisfying the conditions mod `p`.
    fn candidates(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<WittElement>> {
        let ctx = self.ops.ctx;
        let q = ctx.field_size();
        let dim = self.piece0.len() as u32;
        let total = q.checked_pow(dim).filter(|&t| t <= CANDIDATE_POOL);
        let rank = self.ops.module.rank();
        let mut build = |mut index: Option<u64>| {
            let mut v = vec![WittElement::zero(ctx); rank];
            for &i in &self.piece0 {
                let digit = match index.as_mut() {
                    Some(idx) => {
                        let d = *idx % q;
                        *idx /= q;
                        d
                    }
                    None => rng.gen_range(0..q),
                };
                v[i] = Residue::from_index(ctx, digit).lift(ctx);
            }
            v
        };
        let vectors: Vec<Vec<WittElement>> = match total {
            Some(t) => (1..t).map(|i| build(Some(i))).collect(),
            None => (0..CANDIDATE_POOL).map(|_| build(None)).collect(),
        };
        vectors
            .into_iter()
            .filter(|v| self.residual(v).iter().all(|c| !c.is_unit()))
            .collect()
    }

    /// Seeded randomized lifting; `None` when the attempt budget runs out.
    pub(super) fn search(&self, seed: u64) -> Option<Vec<WittElement>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = self.candidates(&mut rng);
        if pool.is_empty() {
            return None;
        }
        for _ in 0..ATTEMPTS {
            let start = pool.choose(&mut rng).expect("nonempty");
            if let Some(x) = self.lift(start.clone(), &mut rng) {
                return Some(x);
            }
        }
        None
    }

    fn lift(&self, mut x: Vec<WittElement>, rng: &mut ChaCha8Rng) -> Option<Vec<WittElement>> {
        let ctx = self.ops.ctx;
        let (p, n_prec) = (ctx.p(), ctx.precision());
        let modulus = BigUint::from(p).pow(n_prec);
        let mut last = 0;
        for _ in 0..3 * n_prec as usize + 8 {
            let phi = Self::coords(&self.residual(&x));
            let n = phi.iter().map(|c| valuation(c, p, n_prec)).min().unwrap_or(n_prec);
            if n >= n_prec {
                return Some(x);
            }
            let cols = self.jacobian(&x);
            let neg_phi: Vec<BigUint> = phi.iter().map(|c| (&modulus - c) % &modulus).collect();
            if let Some((s, v)) = solve_local(&cols, &neg_phi, p, n_prec) {
                if n > 2 * v && n > last {
                    last = n;
                    x = self.shift(&x, &s);
                    continue;
                }
            }
            // one digit: J δ ≡ -Φ/p^n (mod p), with δ random among solutions
            let pn = BigUint::from(p).pow(n);
            let small: Vec<Vec<u64>> = cols.iter().map(|c| c.iter().map(|e| residue_u64(e, p)).collect()).collect();
            let rhs: Vec<u64> = neg_phi.iter().map(|c| residue_u64(&(c / &pn), p)).collect();
            let (mut delta, kernel) = solve_fp_affine(&small, &rhs, p)?;
            for k in &kernel {
                let t = rng.gen_range(0..p);
                for (d, e) in delta.iter_mut().zip(k) {
                    *d = (*d + t * e) % p;
                }
            }
            let s: Vec<BigUint> = delta.iter().map(|&d| BigUint::from(d) * &pn).collect();
            x = self.shift(&x, &s);
        }
        None
    }
}

fn residue_u64(x: &BigUint, p: u64) -> u64 {
    (x % p).iter_u64_digits().next().unwrap_or(0)
}

fn valuation(x: &BigUint, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut y = x.clone();
    let mut v = 0;
    while v < cap && (&y % p).is_zero() {
        y /= p;
        v += 1;
    }
    v
}

/// Solves `A s = b` over `Z/p^n`, `A` given by columns, by elimination with
/// pivots of least valuation. Returns a solution and the largest pivot
/// valuation.
fn solve_local(cols: &[Vec<BigUint>], rhs: &[BigUint], p: u64, n: u32) -> Option<(Vec<BigUint>, u32)> {
    let modulus = BigInt::from(p).pow(n);
    let rows = rhs.len();
    let d = cols.len();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            cols.iter()
                .map(|c| BigInt::from(c[i].clone()))
                .chain(std::iter::once(BigInt::from(rhs[i].clone())))
                .collect()
        })
        .collect();
    let val = |x: &BigInt| valuation(x.magnitude(), p, n);
    let inv = |u: &BigInt| {
        let e = u.extended_gcd(&modulus);
        e.x.mod_floor(&modulus)
    };
    let mut perm: Vec<usize> = (0..d).collect();
    let mut pivot_vals = Vec::new();
    let mut rank = 0;
    while rank < rows.min(d) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, e) in row.iter().enumerate().take(d).skip(rank) {
                let v = val(e);
                if v < n && best.map_or(true, |b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, i, j)) = best else { break };
        a.swap(rank, i);
        for row in a.iter_mut() {
            row.swap(rank, j);
        }
        perm.swap(rank, j);
        let pv = BigInt::from(p).pow(v);
        let u_inv = inv(&(&a[rank][rank] / &pv));
        for i2 in 0..rows {
            if i2 == rank || a[i2][rank].is_zero() {
                continue;
            }
            let factor = (&a[i2][rank] / &pv * &u_inv).mod_floor(&modulus);
            for c in rank..=d {
                let t = &a[i2][c] - &factor * &a[rank][c];
                a[i2][c] = t.mod_floor(&modulus);
            }
        }
        pivot_vals.push(v);
        rank += 1;
    }
    if a[rank..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut s = vec![BigUint::zero(); d];
    for (k, &v) in pivot_vals.iter().enumerate() {
        let pv = BigInt::from(p).pow(v);
        let b = &a[k][d];
        if !(b % &pv).is_zero() {
            return None;
        }
        let u_inv = inv(&(&a[k][k] / &pv));
        s[perm[k]] = (b / &pv * u_inv).mod_floor(&modulus).to_biguint().expect("nonnegative");
    }
    Some((s, pivot_vals.into_iter().max().unwrap_or(0)))
}
