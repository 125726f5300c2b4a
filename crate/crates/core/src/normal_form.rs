//! Symplectic normal form of a local-local module of a-type `(1, 0, …, 0)`.
//!
//! The search is for a single vector `X ∈ M^0` with
//! `⟨X, F^k X⟩ = 0` for `0 < k < g` and `⟨X, F^g X⟩ = 1`, built digit by
//! digit. Given such an `X`, the basis
//!
//! ```text
//! X_i = F^i X,  Y_0 = F^g X,  Y_{g-1} = -V X,  Y_j ≡ -V^{g-j} X (mod p)
//! ```
//!
//! completed to a symplectic basis puts `F` in normal form; the completion
//! is plain linear algebra and loses no precision.

use std::sync::Arc;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cayley_hamilton::MainPart;
use crate::dieudonne::{standard_gram, DieudonneModule, ModuleFile, NormalFormCoeffs};
use crate::error::{Error, Result};
use crate::matrix::WittMatrix;
mod lift;

use crate::witt::{make_context, teichmuller, Embedding, Residue, WittContext, WittElement};

/// Seed of the generator used when scanning for a starting vector.
pub const SCAN_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub coeffs: NormalFormCoeffs,
    /// Columns are the new basis `X_0, …, Y_{g-1}` in the coordinates of the
    /// (possibly base-extended) input.
    pub change_of_basis: WittMatrix,
    /// Residue degree of the field the result lives over.
    pub field_extension_used: usize,
    /// Every residue degree tried, in order.
    pub ladder: Vec<usize>,
    /// The input, base-extended to the final field and truncated to the
    /// target precision.
    pub input: DieudonneModule,
}

impl NormalFormResult {
    pub fn module(&self) -> Result<DieudonneModule> {
        DieudonneModule::from_normal_form(&self.coeffs)
    }

    /// Checks that `U^T G U = J`, that `U` respects the grading, and that
    /// `U^{-1} A σ(U)` is the matrix of the normal form.
    pub fn verify(&self) -> Result<()> {
        let u = &self.change_of_basis;
        let input = &self.input;
        let ctx = input.ctx();
        let n = input.rank();
        let f = input.f();
        for s in 0..n {
            for t in 0..n {
                if !u[(s, t)].is_zero() && s % f != t % f {
                    return Err(Error::InvalidBaseChange(format!(
                        "change of basis mixes graded pieces at ({s},{t})"
                    )));
                }
            }
        }
        if &(&u.transpose() * input.gram()) * u != standard_gram(ctx, input.g()) {
            return Err(Error::InvalidBaseChange("change of basis is not symplectic".into()));
        }
        let u_inv = u
            .inverse()
            .ok_or_else(|| Error::InvalidBaseChange("change of basis is singular".into()))?;
        let moved = &(&u_inv * input.frob_matrix()) * &u.frobenius();
        if moved != *self.module()?.frob_matrix() {
            return Err(Error::InvalidModule(
                "transformed Frobenius matrix differs from the normal form".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ResultRepr<'a> {
    coeffs: ModuleFile,
    field_extension_used: usize,
    ladder: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    change_of_basis: Option<Vec<Vec<String>>>,
}

impl NormalFormResult {
    /// JSON report; the change of basis is included on request, each entry
    /// as its power-basis coordinates joined by `:`.
    pub fn to_json(&self, with_basis: bool) -> serde_json::Value {
        let basis = with_basis.then(|| {
            let u = &self.change_of_basis;
            (0..u.rows())
                .map(|i| (0..u.cols()).map(|j| u[(i, j)].to_string()).collect())
                .collect()
        });
        serde_json::to_value(ResultRepr {
            coeffs: ModuleFile::from_coeffs(&self.coeffs),
            field_extension_used: self.field_extension_used,
            ladder: &self.ladder,
            change_of_basis: basis,
        })
        .expect("serializable")
    }
}

/// Solves `b + b^{p^g} = -a` over the residue field, if possible.
pub fn solve_additive(a: &Residue, g: usize) -> Option<Residue> {
    let ctx = a.ctx();
    let (p, m) = (ctx.p(), ctx.m());
    // the map is F_p-linear: write it in the power basis
    let image = |b: &Residue| {
        let mut t = b.clone();
        for _ in 0..g % m {
            t = t.frobenius();
        }
        b.add(&t)
    };
    let columns: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut e = vec![0; m];
            e[i] = 1;
            image(&Residue::from_coeffs(ctx, e)).coeffs().to_vec()
        })
        .collect();
    let rhs = a.neg();
    let x = solve_fp(&columns, rhs.coeffs(), p)?;
    Some(Residue::from_coeffs(ctx, x))
}

/// Solves `c^{1+p^g} = u^{-1}` over the residue field, if possible.
pub fn solve_norm_like(u: &Residue, g: usize) -> Option<Residue> {
    let ctx = u.ctx();
    let target = u.inverse()?;
    if target == Residue::one(ctx) {
        return Some(target);
    }
    let order = ctx.field_size() - 1;
    let e = (1 + pow_mod(ctx.p(), g as u64, order)) % order;
    let d = e.gcd(&order);
    if d == 1 {
        return Some(target.pow(mod_inverse(e, order)?));
    }
    if target.pow(order / d) != Residue::one(ctx) {
        return None;
    }
    Residue::all(ctx).skip(1).find(|c| c.pow(e) == target)
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn mod_inverse(a: u64, modulus: u64) -> Option<u64> {
    if modulus == 1 {
        return Some(0);
    }
    let ext = (a as i128).extended_gcd(&(modulus as i128));
    (ext.gcd == 1).then(|| ext.x.rem_euclid(modulus as i128) as u64)
}

/// Solves `Σ_j x_j · columns[j] = rhs` over `F_p`; returns any solution.
fn solve_fp(columns: &[Vec<u64>], rhs: &[u64], p: u64) -> Option<Vec<u64>> {
    solve_fp_affine(columns, rhs, p).map(|(x, _)| x)
}

/// All solutions of a linear system over `F_p`: one particular solution and
/// a basis of the kernel.
fn solve_fp_affine(columns: &[Vec<u64>], rhs: &[u64], p: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let n = columns.len();
    let rows = rhs.len();
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = columns.iter().map(|c| c[i] % p).collect();
            row.push(rhs[i] % p);
            row
        })
        .collect();
    let inv = |x: u64| pow_mod(x, p - 2, p);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let s = inv(a[rank][col]);
        for v in a[rank].iter_mut() {
            *v = *v * s % p;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let factor = a[r][col];
                for c in 0..=n {
                    a[r][c] = (a[r][c] + (p - factor) * a[rank][c]) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if a[rank..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut x = vec![0; n];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = a[r][n];
    }
    let kernel = (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; n];
            v[free] = 1;
            for (r, &col) in pivots.iter().enumerate() {
                v[col] = (p - a[r][free]) % p;
            }
            v
        })
        .collect();
    Some((x, kernel))
}

/// Brings `module` into normal form modulo `p^{n_target}`.
///
/// Requires a local-local module of a-type `(1, 0, …, 0)`. When an
/// auxiliary equation has no solution over the current residue field, the
/// field degree is doubled (up to `4fg`) and the search restarts.
pub fn normalize(module: &DieudonneModule, n_target: u32) -> Result<NormalFormResult> {
    let (f, g) = (module.f(), module.g());
    let ctx = module.ctx();
    if n_target == 0 || n_target > ctx.precision() {
        return Err(Error::PrecisionInsufficient(format!(
            "target precision {n_target} must lie in 1..={}",
            ctx.precision()
        )));
    }
    let a_type = module.a_type();
    let mut expected = vec![0; f];
    expected[0] = 1;
    if a_type.pieces != expected {
        return Err(Error::HypothesisViolation(format!(
            "a-type is {:?}, expected {:?}",
            a_type.pieces, expected
        )));
    }
    if !module.is_local_local() {
        return Err(Error::HypothesisViolation("module is not local-local".into()));
    }
    let mut current = truncate_module(module, n_target)?;
    if let Some(res) = already_normal(&current)? {
        return Ok(res);
    }
    let cap = 4 * f * g;
    let mut ladder = vec![current.ctx().m()];
    loop {
        match find_basis(&current) {
            Ok(u) => {
                let res = finish(current, u, ladder)?;
                res.verify()?;
                return Ok(res);
            }
            Err(NoSolution) => {
                let m = current.ctx().m();
                if 2 * m > cap {
                    return Err(Error::FieldTooSmall { ladder });
                }
                let big = make_context(ctx.p(), 2 * m, n_target)?;
                let emb = Embedding::new(current.ctx(), &big)?;
                current = current.base_extend(&emb)?;
                ladder.push(2 * m);
            }
        }
    }
}

struct NoSolution;

fn truncate_module(module: &DieudonneModule, n: u32) -> Result<DieudonneModule> {
    if n == module.ctx().precision() {
        return Ok(module.clone());
    }
    let ctx = module.ctx().with_precision(n)?;
    let cut = |m: &WittMatrix| m.map_into(&ctx, |x| x.change_precision(&ctx));
    DieudonneModule::new(&ctx, module.f(), module.r(), cut(module.frob_matrix()), cut(module.gram()))
}

fn already_normal(module: &DieudonneModule) -> Result<Option<NormalFormResult>> {
    let ctx = module.ctx();
    if *module.gram() != standard_gram(ctx, module.g()) {
        return Ok(None);
    }
    let Ok(mp) = MainPart::from_frobenius(module.frob_matrix()) else {
        return Ok(None);
    };
    let Ok(coeffs) = NormalFormCoeffs::from_main_part(&mp, module.f(), module.r()) else {
        return Ok(None);
    };
    Ok(Some(NormalFormResult {
        coeffs,
        change_of_basis: WittMatrix::identity(ctx, module.rank()),
        field_extension_used: ctx.m(),
        ladder: vec![ctx.m()],
        input: module.clone(),
    }))
}

fn finish(module: DieudonneModule, u: WittMatrix, ladder: Vec<usize>) -> Result<NormalFormResult> {
    let u_inv = u
        .inverse()
        .ok_or_else(|| Error::InvalidBaseChange("constructed basis is singular".into()))?;
    let moved = module.conjugate_unchecked(&u, &u_inv);
    let mp = MainPart::from_frobenius(&moved)?;
    let coeffs = NormalFormCoeffs::from_main_part(&mp, module.f(), module.r())?;
    Ok(NormalFormResult {
        coeffs,
        change_of_basis: u,
        field_extension_used: module.ctx().m(),
        ladder,
        input: module,
    })
}

#[derive(Clone, Copy)]
struct Ops<'a> {
    module: &'a DieudonneModule,
    ctx: &'a Arc<WittContext>,
}

impl Ops<'_> {
    fn f_pow(&self, v: &[WittElement], k: usize) -> Vec<WittElement> {
        let mut out = v.to_vec();
        for _ in 0..k {
            out = self.module.apply_f(&out);
        }
        out
    }

    fn v_pow(&self, v: &[WittElement], k: usize) -> Vec<WittElement> {
        let mut out = v.to_vec();
        for _ in 0..k {
            out = self.module.apply_v(&out);
        }
        out
    }

    fn pair(&self, x: &[WittElement], y: &[WittElement]) -> WittElement {
        self.module.pairing(x, y)
    }

    fn scale(&self, c: &WittElement, v: &[WittElement]) -> Vec<WittElement> {
        v.iter().map(|x| c * x).collect()
    }

    fn axpy(&self, c: &WittElement, x: &[WittElement], y: &[WittElement]) -> Vec<WittElement> {
        y.iter().zip(x).map(|(b, a)| b + &(c * a)).collect()
    }

    fn neg(&self, v: &[WittElement]) -> Vec<WittElement> {
        v.iter().map(|x| -x).collect()
    }

    fn basis_vector(&self, i: usize) -> Vec<WittElement> {
        let mut v = vec![WittElement::zero(self.ctx); self.module.rank()];
        v[i] = WittElement::one(self.ctx);
        v
    }
}

/// Digit `n` of an element known to be divisible by `p^n`.
fn digit(x: &WittElement, n: u32) -> Residue {
    x.div_p_pow(n).expect("divisible by p^n").reduce()
}

fn find_basis(module: &DieudonneModule) -> std::result::Result<WittMatrix, NoSolution> {
    if module.g() == 1 {
        return find_basis_rank_two(module);
    }
    let conds = lift::Conditions::new(module);
    let x = match digit_search(module) {
        Some(x) if conds.satisfied(&x) => x,
        _ => conds.search(SCAN_SEED).ok_or(NoSolution)?,
    };
    complete_basis(module, &x)
}

/// The digit-by-digit search; `None` when an auxiliary equation has no
/// solution over the residue field.
fn digit_search(module: &DieudonneModule) -> Option<Vec<WittElement>> {
    let ctx = module.ctx();
    let ops = Ops { module, ctx };
    let (f, r, g) = (module.f(), module.r(), module.g());
    let n_prec = ctx.precision();
    let p_pow = |k: u32| WittElement::p_power(ctx, k);

    // a vector of piece 0 pairing to a unit with its g-th Frobenius image
    let piece0 = module.piece_indices(0);
    let unit_pairing = |x: &[WittElement]| ops.pair(x, &ops.f_pow(x, g)).is_unit();
    let mut x = piece0
        .iter()
        .map(|&i| ops.basis_vector(i))
        .find(|v| unit_pairing(v));
    if x.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(SCAN_SEED);
        for _ in 0..256 {
            let mut v = vec![WittElement::zero(ctx); module.rank()];
            for &i in &piece0 {
                v[i] = teichmuller(ctx, &Residue::random_nonzero(ctx, &mut rng));
            }
            if unit_pairing(&v) {
                x = Some(v);
                break;
            }
        }
    }
    let mut x = x?;

    let u = ops.pair(&x, &ops.f_pow(&x, g)).reduce();
    let c = solve_norm_like(&u, g)?;
    x = ops.scale(&teichmuller(ctx, &c), &x);

    for n in 0..n_prec {
        // kill ⟨X, F^{if} X⟩ for 0 < i < r with multiples of Y_{kf}
        if r > 1 {
            let xs: Vec<Vec<WittElement>> = (1..r).map(|i| ops.f_pow(&x, i * f)).collect();
            let ys: Vec<Vec<WittElement>> =
                (1..r).map(|k| ops.neg(&ops.v_pow(&x, g - k * f))).collect();
            let rhs: Vec<Residue> = xs.iter().map(|xi| digit(&ops.pair(&x, xi), n).neg()).collect();
            if rhs.iter().any(|v| !v.is_zero()) {
                let mut entries = Vec::with_capacity((r - 1) * (r - 1));
                for xi in &xs {
                    for yk in &ys {
                        entries.push(ops.pair(yk, xi));
                    }
                }
                let system = WittMatrix::from_rows(
                    ctx,
                    entries.chunks(r - 1).map(<[WittElement]>::to_vec).collect(),
                )
                .reduce();
                let coeffs = system.solve(&rhs)?;
                for (a, yk) in coeffs.iter().zip(&ys) {
                    let scaled = &p_pow(n) * &teichmuller(ctx, a);
                    x = ops.axpy(&scaled, yk, &x);
                }
            }
        }
        if n == 0 {
            continue;
        }
        // ⟨X, F^g X⟩ ≡ 1 + a p^n: rescale by 1 + b p^n with b + b^{p^g} = -a
        let pairing = ops.pair(&x, &ops.f_pow(&x, g)) - WittElement::one(ctx);
        let a = digit(&pairing, n);
        if !a.is_zero() {
            let b = solve_additive(&a, g)?;
            let s = WittElement::one(ctx) + &p_pow(n) * &teichmuller(ctx, &b);
            x = ops.scale(&s, &x);
        }
    }
    Some(x)
}

/// Completes `X` to a symplectic basis putting `F` in normal form.
fn complete_basis(
    module: &DieudonneModule,
    x: &[WittElement],
) -> std::result::Result<WittMatrix, NoSolution> {
    let ctx = module.ctx();
    let ops = Ops { module, ctx };
    let g = module.g();
    let x = x.to_vec();
    let mut basis_x: Vec<Vec<WittElement>> = Vec::with_capacity(g);
    basis_x.push(x.clone());
    for i in 1..g {
        let next = module.apply_f(&basis_x[i - 1]);
        basis_x.push(next);
    }
    let y0 = module.apply_f(&basis_x[g - 1]);
    let y_last = ops.neg(&module.apply_v(&x));

    // middle Y_j ≡ -V^{g-j} X, made dual to the X_i
    let mid: Vec<usize> = (1..g - 1).collect();
    let hats: Vec<Vec<WittElement>> = mid.iter().map(|&j| ops.neg(&ops.v_pow(&x, g - j))).collect();
    let mut ys: Vec<Vec<WittElement>> = Vec::with_capacity(g);
    if !mid.is_empty() {
        let q_mid = WittMatrix::from_rows(
            ctx,
            mid.iter()
                .map(|&i| hats.iter().map(|h| ops.pair(&basis_x[i], h)).collect())
                .collect(),
        );
        let t = q_mid.inverse().ok_or(NoSolution)?;
        for (col, _) in mid.iter().enumerate() {
            let mut y = vec![WittElement::zero(ctx); module.rank()];
            for (k, h) in hats.iter().enumerate() {
                if !t[(k, col)].is_zero() {
                    y = ops.axpy(&t[(k, col)], h, &y);
                }
            }
            let alpha = -ops.pair(&basis_x[0], &y);
            let beta = -ops.pair(&basis_x[g - 1], &y);
            y = ops.axpy(&alpha, &y0, &y);
            y = ops.axpy(&beta, &y_last, &y);
            ys.push(y);
        }
        // isotropy: add X-combinations, triangular in the middle block
        let gram_rows: Vec<Vec<WittElement>> = ys
            .iter()
            .map(|yj| ys.iter().map(|yk| ops.pair(yj, yk)).collect())
            .collect();
        let mut fixed = Vec::with_capacity(ys.len());
        for (jj, yj) in ys.iter().enumerate() {
            let mut y = yj.clone();
            let s0 = -ops.pair(yj, &y0);
            let s_last = -ops.pair(yj, &y_last);
            y = ops.axpy(&s0, &basis_x[0], &y);
            y = ops.axpy(&s_last, &basis_x[g - 1], &y);
            for kk in jj + 1..ys.len() {
                let s = -&gram_rows[jj][kk];
                if !s.is_zero() {
                    y = ops.axpy(&s, &basis_x[mid[kk]], &y);
                }
            }
            fixed.push(y);
        }
        ys = fixed;
    }
    let mut columns = basis_x;
    columns.push(y0);
    columns.extend(ys);
    columns.push(y_last);
    Ok(columns_to_matrix(ctx, &columns))
}

/// Rank two: the basis `X, FX` needs `F^2 X = -p X` on top of
/// `⟨X, FX⟩ = 1`, i.e. `X` fixed by `T = -F^2/p`. Both conditions are lifted
/// together, one digit at a time, by an `F_p`-linear solve.
fn find_basis_rank_two(module: &DieudonneModule) -> std::result::Result<WittMatrix, NoSolution> {
    let ctx = module.ctx();
    let (p, m) = (ctx.p(), ctx.m());
    let one = WittElement::one(ctx);
    let t_map = |v: &[WittElement]| -> Vec<WittElement> {
        let ffv = module.apply_f(&module.apply_f(v));
        ffv.iter().map(|x| -x.div_p().expect("F^2 M lies in pM")).collect()
    };
    let pair_fx = |v: &[WittElement]| module.pairing(v, &module.apply_f(v));
    let lift = |v: &[Residue]| -> Vec<WittElement> { v.iter().map(|r| r.lift(ctx)).collect() };

    let q = ctx.field_size();
    let mut x = (1..q * q)
        .map(|i| lift(&[Residue::from_index(ctx, i % q), Residue::from_index(ctx, i / q)]))
        .find(|v| {
            let tv = t_map(v);
            tv.iter().zip(v).all(|(a, b)| a.reduce() == b.reduce())
                && (pair_fx(v) - one.clone()).reduce().is_zero()
        })
        .ok_or(NoSolution)?;

    // F_p basis of the residue space F_q^2
    let basis: Vec<[Residue; 2]> = (0..2)
        .flat_map(|slot| {
            (0..m).map(move |i| {
                let mut e = vec![0; m];
                e[i] = 1;
                let r = Residue::from_coeffs(ctx, e);
                if slot == 0 {
                    [r, Residue::zero(ctx)]
                } else {
                    [Residue::zero(ctx), r]
                }
            })
        })
        .collect();
    for n in 1..ctx.precision() {
        let tx = t_map(&x);
        let e: Vec<Residue> = tx.iter().zip(&x).map(|(a, b)| digit(&(a - b), n)).collect();
        let d = digit(&(pair_fx(&x) - one.clone()), n);
        if e.iter().all(Residue::is_zero) && d.is_zero() {
            continue;
        }
        let fx = module.apply_f(&x);
        let columns: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| {
                let dv = lift(b);
                let tdv = t_map(&dv);
                let mut col = Vec::with_capacity(3 * m);
                for (a, c) in tdv.iter().zip(&dv) {
                    col.extend_from_slice((a - c).reduce().coeffs());
                }
                let lin = module.pairing(&dv, &fx) + module.pairing(&x, &module.apply_f(&dv));
                col.extend_from_slice(lin.reduce().coeffs());
                col
            })
            .collect();
        let mut rhs = Vec::with_capacity(3 * m);
        for r in e.iter().chain(std::iter::once(&d)) {
            rhs.extend_from_slice(r.neg().coeffs());
        }
        let sol = solve_fp(&columns, &rhs, p).ok_or(NoSolution)?;
        let mut delta = [Residue::zero(ctx), Residue::zero(ctx)];
        for (k, b) in basis.iter().enumerate() {
            for _ in 0..sol[k] {
                delta = [delta[0].add(&b[0]), delta[1].add(&b[1])];
            }
        }
        let pn = WittElement::p_power(ctx, n);
        x = x.iter().zip(lift(&delta)).map(|(a, b)| a + &(&pn * &b)).collect();
    }
    let fx = module.apply_f(&x);
    Ok(columns_to_matrix(ctx, &[x, fx]))
}

fn columns_to_matrix(ctx: &Arc<WittContext>, columns: &[Vec<WittElement>]) -> WittMatrix {
    let n = columns.len();
    let mut u = WittMatrix::zeros(ctx, n, n);
    for (j, col) in columns.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dieudonne::random_symplectic_base_change;

    fn ctx(p: u64, m: usize) -> Arc<WittContext> {
        make_context(p, m, 4).unwrap()
    }

    #[test]
    fn additive_equation_over_f8() {
        let k = ctx(2, 3);
        // b + b^{2^3} = 2b = 0 on F_8
        for a in Residue::all(&k) {
            let sol = solve_additive(&a, 3);
            assert_eq!(sol.is_some(), a.is_zero());
        }
        assert_eq!(solve_additive(&Residue::zero(&k), 3), Some(Residue::zero(&k)));
    }

    #[test]
    fn additive_equation_over_f9() {
        let k = ctx(3, 2);
        let image: Vec<Residue> = Residue::all(&k).map(|b| b.add(&b.frobenius())).collect();
        for a in Residue::all(&k) {
            let target = a.neg();
            match solve_additive(&a, 1) {
                Some(b) => assert_eq!(b.add(&b.frobenius()), target),
                None => assert!(!image.contains(&target)),
            }
        }
    }

    #[test]
    fn norm_equation_over_f8_always_solvable() {
        let k = ctx(2, 3);
        for u in Residue::all(&k).skip(1) {
            let c = solve_norm_like(&u, 3).unwrap();
            assert_eq!(c.pow(9).mul(&u), Residue::one(&k));
        }
    }

    #[test]
    fn norm_equation_over_f4() {
        let k = ctx(2, 2);
        for u in Residue::all(&k).skip(1) {
            let sol = solve_norm_like(&u, 1);
            assert_eq!(sol.is_some(), u == Residue::one(&k));
            if let Some(c) = sol {
                assert_eq!(c.pow(3).mul(&u), Residue::one(&k));
            }
        }
        assert_eq!(solve_norm_like(&Residue::one(&k), 1), Some(Residue::one(&k)));
    }

    #[test]
    fn normal_form_input_is_fixed() {
        let k = make_context(2, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = NormalFormCoeffs::random(&k, 3, 2, &mut rng);
        let m = DieudonneModule::from_normal_form(&c).unwrap();
        let res = normalize(&m, 10).unwrap();
        assert_eq!(res.change_of_basis, WittMatrix::identity(&k, 12));
        assert_eq!(res.module().unwrap(), m);
    }

    #[test]
    fn round_trip_after_base_change() {
        for &(p, f, r, m) in &[(2u64, 1usize, 2usize, 1usize), (2, 3, 1, 3), (3, 2, 1, 2), (2, 1, 3, 1), (3, 1, 2, 1)] {
            let n = (2 * m * f * r + 4) as u32;
            let k = make_context(p, m, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p * 100 + f as u64 * 10 + r as u64);
            for _ in 0..4 {
                let c = NormalFormCoeffs::random(&k, f, r, &mut rng);
                let base = DieudonneModule::from_normal_form(&c).unwrap();
                let u = random_symplectic_base_change(&k, f, r, &mut rng);
                let moved = base.apply_base_change(&u).unwrap();
                let res = normalize(&moved, n).unwrap_or_else(|e| panic!("{p} {f} {r}: {e}"));
                res.verify().unwrap();
                let out = res.module().unwrap();
                assert_eq!(out.a_type(), base.a_type());
                assert_eq!(out.slopes_oracle().unwrap(), base.slopes_oracle().unwrap());
            }
        }
    }

    #[test]
    fn wrong_a_type_is_rejected() {
        let k = make_context(2, 2, 8).unwrap();
        let ord = DieudonneModule::ordinary(&k, 2, 1).unwrap();
        assert!(matches!(normalize(&ord, 8), Err(Error::HypothesisViolation(_))));
    }
}
