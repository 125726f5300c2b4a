//! Quasi-polarized Dieudonné O-modules given by a σ-semilinear Frobenius
//! matrix and an alternating pairing.
//!
//! The basis is ordered `X_0, …, X_{g-1}, Y_0, …, Y_{g-1}`; basis vector
//! `n` lies in graded piece `n mod f`. A column vector `v` of coordinates
//! is sent to `A · σ(v)` by `F` and to `B · σ^{-1}(v)` by `V`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cayley_hamilton::MainPart;
use crate::error::{Error, Result};
use crate::matrix::WittMatrix;
use crate::newton::{polygon_from_valuation_points, NewtonPolygon, Rational};
use crate::witt::{make_context, teichmuller, Residue, Valuation, WittContext, WittElement, WittElementRepr};

/// The coefficients `a_{i,j}` (`2 ≤ i, j ≤ g`) of the normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormCoeffs {
    f: usize,
    r: usize,
    entries: BTreeMap<(usize, usize), WittElement>,
    ctx: Arc<WittContext>,
}

impl NormalFormCoeffs {
    pub fn zero(ctx: &Arc<WittContext>, f: usize, r: usize) -> Self {
        NormalFormCoeffs {
            f,
            r,
            entries: BTreeMap::new(),
            ctx: ctx.clone(),
        }
    }

    /// Builds and validates coefficients from `(i, j, value)` triples; each
    /// unordered pair may be given once or twice (consistently).
    pub fn from_entries(
        ctx: &Arc<WittContext>,
        f: usize,
        r: usize,
        entries: impl IntoIterator<Item = (usize, usize, WittElement)>,
    ) -> Result<Self> {
        let mut c = Self::zero(ctx, f, r);
        for (i, j, v) in entries {
            if let Some(prev) = c.entries.get(&(i, j)) {
                if *prev != v {
                    return Err(Error::InvalidModule(format!(
                        "conflicting values for a[{i},{j}]"
                    )));
                }
                continue;
            }
            c.set(i, j, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn g(&self) -> usize {
        self.f * self.r
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    /// Sets `a_{i,j}` and `a_{j,i}` together.
    pub fn set(&mut self, i: usize, j: usize, v: WittElement) -> Result<()> {
        let g = self.g();
        if !(2..=g).contains(&i) || !(2..=g).contains(&j) {
            return Err(Error::InvalidModule(format!(
                "a[{i},{j}] outside 2..={g}"
            )));
        }
        if (i + self.f - j % self.f) % self.f != 0 && !v.is_zero() {
            return Err(Error::InvalidModule(format!(
                "a[{i},{j}] must vanish: {i} ≢ {j} (mod {})",
                self.f
            )));
        }
        if v.is_zero() {
            self.entries.remove(&(i, j));
            self.entries.remove(&(j, i));
        } else {
            self.entries.insert((i, j), v.clone());
            self.entries.insert((j, i), v);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> WittElement {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| WittElement::zero(&self.ctx))
    }

    /// Nonzero entries with `i ≤ j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &WittElement)> {
        self.entries
            .iter()
            .filter(|((i, j), _)| i <= j)
            .map(|((i, j), v)| (*i, *j, v))
    }

    /// Congruence (`a_{i,j} = 0` unless `i ≡ j mod f`) and symmetry.
    pub fn validate(&self) -> Result<()> {
        for (&(i, j), v) in &self.entries {
            if (i as i64 - j as i64).rem_euclid(self.f as i64) != 0 && !v.is_zero() {
                return Err(Error::InvalidModule(format!(
                    "a[{i},{j}] must vanish for i ≢ j (mod {})",
                    self.f
                )));
            }
            if self.get(j, i) != *v {
                return Err(Error::InvalidModule(format!("a[{i},{j}] ≠ a[{j},{i}]")));
            }
        }
        Ok(())
    }

    /// Random coefficients: every allowed slot is independently zero or a
    /// Teichmüller unit.
    pub fn random_unit_or_zero<R: Rng + ?Sized>(
        ctx: &Arc<WittContext>,
        f: usize,
        r: usize,
        rng: &mut R,
    ) -> Self {
        let mut c = Self::zero(ctx, f, r);
        let g = f * r;
        for i in 2..=g {
            for j in i..=g {
                if (j - i) % f == 0 && rng.gen_bool(0.5) {
                    let t = teichmuller(ctx, &Residue::random_nonzero(ctx, rng));
                    c.set(i, j, t).expect("allowed slot");
                }
            }
        }
        c
    }

    /// Random coefficients with arbitrary values in the allowed slots.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<WittContext>, f: usize, r: usize, rng: &mut R) -> Self {
        let mut c = Self::zero(ctx, f, r);
        let g = f * r;
        for i in 2..=g {
            for j in i..=g {
                if (j - i) % f == 0 {
                    c.set(i, j, WittElement::random(ctx, rng)).expect("allowed slot");
                }
            }
        }
        c
    }

    /// The main part with zero first row and column.
    pub fn to_main_part(&self) -> MainPart {
        let g = self.g();
        let mut mp = MainPart::zero(&self.ctx, g);
        for (&(i, j), v) in &self.entries {
            mp.set(i, j, v.clone());
        }
        mp
    }

    /// Reads coefficients back from a main part; fails unless the first row
    /// and column vanish.
    pub fn from_main_part(mp: &MainPart, f: usize, r: usize) -> Result<Self> {
        let g = mp.g();
        for k in 1..=g {
            if !mp.get(1, k).is_zero() || !mp.get(k, 1).is_zero() {
                return Err(Error::InvalidModule(format!(
                    "main part has a nonzero entry in the first row or column (index {k})"
                )));
            }
        }
        let mut entries = Vec::new();
        for i in 2..=g {
            for j in 2..=g {
                let v = mp.get(i, j);
                if !v.is_zero() {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_entries(mp.ctx(), f, r, entries)
    }
}

/// `(a_0, …, a_{f-1})` together with the a-number `Σ a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AType {
    pub pieces: Vec<usize>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneModule {
    ctx: Arc<WittContext>,
    f: usize,
    r: usize,
    frob: WittMatrix,
    gram: WittMatrix,
    /// Matrix of V, obtained as the adjoint of F under the pairing.
    ver: WittMatrix,
}

/// `J = [[0, I], [-I, 0]]`, i.e. `⟨X_i, Y_i⟩ = 1`.
pub fn standard_gram(ctx: &Arc<WittContext>, g: usize) -> WittMatrix {
    let mut j = WittMatrix::zeros(ctx, 2 * g, 2 * g);
    for i in 0..g {
        j[(i, g + i)] = WittElement::one(ctx);
        j[(g + i, i)] = WittElement::from_int(ctx, -1);
    }
    j
}

impl DieudonneModule {
    /// Validates every module invariant: grading, alternating perfect
    /// pairing with orthogonal pieces, and `FV = VF = p` with `V` the
    /// pairing adjoint of `F` (which is the pairing contract).
    pub fn new(
        ctx: &Arc<WittContext>,
        f: usize,
        r: usize,
        frob: WittMatrix,
        gram: WittMatrix,
    ) -> Result<Self> {
        if f == 0 || r == 0 {
            return Err(Error::InvalidParams("f and r must be positive".into()));
        }
        if ctx.m() % f != 0 {
            return Err(Error::InvalidParams(format!(
                "residue degree m = {} is not a multiple of f = {f}",
                ctx.m()
            )));
        }
        let n = 2 * f * r;
        if frob.rows() != n || frob.cols() != n || gram.rows() != n || gram.cols() != n {
            return Err(Error::InvalidModule(format!("matrices must be {n}x{n}")));
        }
        let piece = |k: usize| k % f;
        for s in 0..n {
            for t in 0..n {
                if !frob[(s, t)].is_zero() && piece(s) != (piece(t) + 1) % f {
                    return Err(Error::InvalidModule(format!(
                        "F does not respect the grading at entry ({s},{t})"
                    )));
                }
                if !gram[(s, t)].is_zero() && piece(s) != piece(t) {
                    return Err(Error::InvalidModule(format!(
                        "graded pieces are not orthogonal at ({s},{t})"
                    )));
                }
                if gram[(s, t)] != -&gram[(t, s)] || (s == t && !gram[(s, s)].is_zero()) {
                    return Err(Error::InvalidModule("pairing is not alternating".into()));
                }
            }
        }
        let gram_inv = gram.inverse().ok_or_else(|| {
            Error::InvalidModule("pairing is not perfect (determinant is not a unit)".into())
        })?;
        // σ(B) = σ(G)^{-1} A^T G
        let ver = &(&gram_inv * &frob.transpose().inverse_frobenius()) * &gram.inverse_frobenius();
        let p_id = WittMatrix::identity(ctx, n).scale(&WittElement::p_power(ctx, 1));
        if &frob * &ver.frobenius() != p_id {
            return Err(Error::InvalidModule(
                "FV ≠ p: the pairing contract ⟨Fx,y⟩ = ⟨x,Vy⟩^σ fails".into(),
            ));
        }
        if &ver * &frob.inverse_frobenius() != p_id {
            return Err(Error::InvalidModule("VF ≠ p".into()));
        }
        Ok(DieudonneModule {
            ctx: ctx.clone(),
            f,
            r,
            frob,
            gram,
            ver,
        })
    }

    /// The module whose Frobenius matrix has the normal form with the given
    /// coefficients, paired by the standard symplectic form.
    pub fn from_normal_form(coeffs: &NormalFormCoeffs) -> Result<Self> {
        coeffs.validate()?;
        Self::from_main_part(coeffs.ctx(), coeffs.f(), coeffs.r(), &coeffs.to_main_part())
    }

    pub fn from_main_part(ctx: &Arc<WittContext>, f: usize, r: usize, mp: &MainPart) -> Result<Self> {
        if mp.g() != f * r {
            return Err(Error::InvalidParams(format!(
                "main part has size {} but f·r = {}",
                mp.g(),
                f * r
            )));
        }
        Self::new(ctx, f, r, mp.frobenius_matrix(), standard_gram(ctx, f * r))
    }

    /// An ordinary module: `F` cycles the `X_i` and sends `Y_i` to `p Y_{i+1}`.
    pub fn ordinary(ctx: &Arc<WittContext>, f: usize, r: usize) -> Result<Self> {
        let g = f * r;
        let mut a = WittMatrix::zeros(ctx, 2 * g, 2 * g);
        for i in 0..g {
            a[((i + 1) % g, i)] = WittElement::one(ctx);
            a[(g + (i + 1) % g, g + i)] = WittElement::p_power(ctx, 1);
        }
        Self::new(ctx, f, r, a, standard_gram(ctx, g))
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn g(&self) -> usize {
        self.f * self.r
    }

    pub fn rank(&self) -> usize {
        2 * self.g()
    }

    pub fn frob_matrix(&self) -> &WittMatrix {
        &self.frob
    }

    pub fn ver_matrix(&self) -> &WittMatrix {
        &self.ver
    }

    pub fn gram(&self) -> &WittMatrix {
        &self.gram
    }

    /// Basis indices of graded piece `i`.
    pub fn piece_indices(&self, i: usize) -> Vec<usize> {
        (0..self.rank()).filter(|k| k % self.f == i).collect()
    }

    pub fn apply_f(&self, v: &[WittElement]) -> Vec<WittElement> {
        let sv: Vec<WittElement> = v.iter().map(WittElement::frobenius).collect();
        self.frob.mul_vec(&sv)
    }

    pub fn apply_v(&self, v: &[WittElement]) -> Vec<WittElement> {
        let sv: Vec<WittElement> = v.iter().map(WittElement::inverse_frobenius).collect();
        self.ver.mul_vec(&sv)
    }

    /// `⟨x, y⟩ = xᵀ G y`.
    pub fn pairing(&self, x: &[WittElement], y: &[WittElement]) -> WittElement {
        let gy = self.gram.mul_vec(y);
        let mut acc = WittElement::zero(&self.ctx);
        for (a, b) in x.iter().zip(&gy) {
            if !a.is_zero() && !b.is_zero() {
                acc = &acc + &(a * b);
            }
        }
        acc
    }

    /// Dimensions of `(M / (F, V) M)^i` over the residue field.
    pub fn a_type(&self) -> AType {
        let combined = self.frob.reduce().hstack(&self.ver.reduce());
        let pieces: Vec<usize> = (0..self.f)
            .map(|i| {
                let rows = self.piece_indices(i);
                2 * self.r - combined.select_rows(&rows).rank()
            })
            .collect();
        let total = pieces.iter().sum();
        AType { pieces, total }
    }

    /// `F` and `V` both nilpotent on `M / pM`.
    pub fn is_local_local(&self) -> bool {
        let n = self.rank();
        let mut fpow = self.frob.clone();
        let mut vpow = self.ver.clone();
        for k in 1..n {
            fpow = &fpow * &self.frob.frobenius_pow(k as i64);
            vpow = &vpow * &self.ver.frobenius_pow(-(k as i64));
        }
        fpow.reduce().is_zero() && vpow.reduce().is_zero()
    }

    /// The matrix of the linear map `F^m`: `A · σ(A) ⋯ σ^{m-1}(A)`.
    pub fn linearized_frobenius(&self) -> WittMatrix {
        let m = self.ctx.m();
        let mut prod = self.frob.clone();
        for k in 1..m {
            prod = &prod * &self.frob.frobenius_pow(k as i64);
        }
        prod
    }

    /// Newton polygon of `F` computed by linearization: the hull of the
    /// coefficient valuations of the characteristic polynomial of `F^m`,
    /// with slopes divided by `m`.
    ///
    /// Fails with a precision error when a coefficient that is zero modulo
    /// `p^N` could still lower the hull.
    pub fn slopes_oracle(&self) -> Result<NewtonPolygon> {
        let m = self.ctx.m() as i64;
        let n = self.rank();
        let cp = self.linearized_frobenius().charpoly();
        let vals: Vec<Valuation> = cp.iter().map(WittElement::valuation).collect();
        let height = m * self.g() as i64;
        match vals[n] {
            Valuation::Finite(v) if v as i64 == height => {}
            Valuation::Finite(v) => {
                return Err(Error::InvalidModule(format!(
                    "determinant of F^m has valuation {v}, expected {height}"
                )))
            }
            Valuation::AtLeast(_) => {
                return Err(Error::PrecisionInsufficient(format!(
                    "determinant of F^m vanishes modulo p^{}; need N > {height}",
                    self.ctx.precision()
                )))
            }
        }
        let points: Vec<(u32, Option<Rational>)> = vals
            .iter()
            .enumerate()
            .map(|(k, v)| (k as u32, v.finite().map(|v| Rational::from(v as i64))))
            .collect();
        let hull = polygon_from_valuation_points(&points, n as u32, Rational::from(height))?;
        for (k, v) in vals.iter().enumerate() {
            if let Valuation::AtLeast(bound) = v {
                if Rational::from(*bound as i64) < hull.value_at_int(k as u32) {
                    return Err(Error::PrecisionInsufficient(format!(
                        "coefficient of X^{} vanishes modulo p^{bound} below the hull; retry with larger N",
                        n - k
                    )));
                }
            }
        }
        Ok(hull.scale_slopes(m as u32))
    }

    /// `U^{-1} A σ(U)` without validating `U`.
    pub(crate) fn conjugate_unchecked(&self, u: &WittMatrix, u_inv: &WittMatrix) -> WittMatrix {
        &(u_inv * &self.frob) * &u.frobenius()
    }

    /// Changes basis by `U` (columns are the new basis vectors in old
    /// coordinates). `U` must be invertible, grading-preserving and preserve
    /// the pairing.
    pub fn apply_base_change(&self, u: &WittMatrix) -> Result<Self> {
        let n = self.rank();
        if u.rows() != n || u.cols() != n {
            return Err(Error::InvalidBaseChange(format!("expected a {n}x{n} matrix")));
        }
        for s in 0..n {
            for t in 0..n {
                if !u[(s, t)].is_zero() && s % self.f != t % self.f {
                    return Err(Error::InvalidBaseChange(format!(
                        "entry ({s},{t}) mixes graded pieces"
                    )));
                }
            }
        }
        let u_inv = u
            .inverse()
            .ok_or_else(|| Error::InvalidBaseChange("not invertible modulo p".into()))?;
        if &(&u.transpose() * &self.gram) * u != self.gram {
            return Err(Error::InvalidBaseChange("does not preserve the pairing".into()));
        }
        Self::new(
            &self.ctx,
            self.f,
            self.r,
            self.conjugate_unchecked(u, &u_inv),
            self.gram.clone(),
        )
    }

    /// Re-expresses the module over a larger residue field through a
    /// σ-equivariant embedding.
    pub fn base_extend(&self, emb: &crate::witt::Embedding) -> Result<Self> {
        let ctx = emb.target();
        Self::new(
            ctx,
            self.f,
            self.r,
            self.frob.map_into(ctx, |x| emb.apply(x)),
            self.gram.map_into(ctx, |x| emb.apply(x)),
        )
    }
}

/// A random symplectic, grading-preserving change of basis for the
/// standard pairing: a product of block-diagonal `diag(P, P^{-T})` and
/// symmetric shears `[[I, S], [0, I]]`, `[[I, 0], [S, I]]`.
pub fn random_symplectic_base_change<R: Rng + ?Sized>(
    ctx: &Arc<WittContext>,
    f: usize,
    r: usize,
    rng: &mut R,
) -> WittMatrix {
    let g = f * r;
    let n = 2 * g;
    let same_piece = |a: usize, b: usize| a % f == b % f;
    let random_unit = |rng: &mut R| loop {
        let x = WittElement::random(ctx, rng);
        if x.is_unit() {
            break x;
        }
    };
    // P: unit lower-triangular within pieces times a diagonal of units.
    let mut p = WittMatrix::identity(ctx, g);
    for i in 0..g {
        p[(i, i)] = random_unit(rng);
        for j in 0..i {
            if same_piece(i, j) {
                p[(i, j)] = WittElement::random(ctx, rng);
            }
        }
    }
    let p_inv_t = p.inverse().expect("triangular with unit diagonal").transpose();
    let mut diag = WittMatrix::zeros(ctx, n, n);
    for i in 0..g {
        for j in 0..g {
            diag[(i, j)] = p[(i, j)].clone();
            diag[(g + i, g + j)] = p_inv_t[(i, j)].clone();
        }
    }
    let mut upper = WittMatrix::identity(ctx, n);
    let mut lower = WittMatrix::identity(ctx, n);
    for i in 0..g {
        for j in i..g {
            if same_piece(i, j) {
                let s = WittElement::random(ctx, rng);
                upper[(i, g + j)] = s.clone();
                upper[(j, g + i)] = s;
                let t = WittElement::random(ctx, rng);
                lower[(g + i, j)] = t.clone();
                lower[(g + j, i)] = t;
            }
        }
    }
    &(&diag * &upper) * &lower
}

/// On-disk module description: either normal-form coefficients (`a`) or a
/// full Frobenius matrix (`frob`), with an optional pairing (`gram`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleFile {
    pub p: u64,
    pub f: usize,
    pub r: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<(usize, usize, Value)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frob: Option<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<Value>>>,
}

/// Parses a matrix entry: an integer, a decimal string, or a full Witt
/// element object.
pub fn element_from_json(ctx: &Arc<WittContext>, v: &Value) -> Result<WittElement> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| WittElement::from_int(ctx, i))
            .ok_or_else(|| Error::Parse(format!("entry {n} is not an integer"))),
        Value::String(s) => {
            let (neg, digits) = match s.trim().strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, s.trim()),
            };
            let mag: num_bigint::BigUint = digits
                .parse()
                .map_err(|e| Error::Parse(format!("entry {s:?}: {e}")))?;
            let mut coeffs = vec![num_bigint::BigUint::default(); ctx.m()];
            coeffs[0] = mag;
            let x = WittElement::from_coeffs(ctx, coeffs)?;
            Ok(if neg { -x } else { x })
        }
        Value::Object(_) => {
            let repr: WittElementRepr = serde_json::from_value(v.clone())?;
            WittElement::from_repr(ctx, &repr)
        }
        other => Err(Error::Parse(format!("unsupported entry {other}"))),
    }
}

fn matrix_from_json(ctx: &Arc<WittContext>, rows: &[Vec<Value>]) -> Result<WittMatrix> {
    let parsed = rows
        .iter()
        .map(|row| row.iter().map(|v| element_from_json(ctx, v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if parsed.iter().any(|row| row.len() != parsed.len()) {
        return Err(Error::Parse("matrix is not square".into()));
    }
    Ok(WittMatrix::from_rows(ctx, parsed))
}

fn matrix_to_json(m: &WittMatrix) -> Vec<Vec<Value>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| serde_json::to_value(&m[(i, j)]).expect("serializable"))
                .collect()
        })
        .collect()
}

impl ModuleFile {
    pub fn context(&self) -> Result<Arc<WittContext>> {
        make_context(self.p, self.m, self.n)
    }

    pub fn to_module(&self) -> Result<DieudonneModule> {
        let ctx = self.context()?;
        match (&self.a, &self.frob) {
            (Some(a), None) => {
                let entries = a
                    .iter()
                    .map(|(i, j, v)| Ok((*i, *j, element_from_json(&ctx, v)?)))
                    .collect::<Result<Vec<_>>>()?;
                let coeffs = NormalFormCoeffs::from_entries(&ctx, self.f, self.r, entries)?;
                DieudonneModule::from_normal_form(&coeffs)
            }
            (None, Some(frob)) => {
                let frob = matrix_from_json(&ctx, frob)?;
                let gram = match &self.gram {
                    Some(g) => matrix_from_json(&ctx, g)?,
                    None => standard_gram(&ctx, self.f * self.r),
                };
                DieudonneModule::new(&ctx, self.f, self.r, frob, gram)
            }
            (None, None) => DieudonneModule::from_normal_form(&NormalFormCoeffs::zero(
                &ctx, self.f, self.r,
            )),
            (Some(_), Some(_)) => Err(Error::Parse(
                "module file must give either \"a\" or \"frob\", not both".into(),
            )),
        }
    }

    pub fn from_coeffs(coeffs: &NormalFormCoeffs) -> Self {
        let ctx = coeffs.ctx();
        ModuleFile {
            p: ctx.p(),
            f: coeffs.f(),
            r: coeffs.r(),
            m: ctx.m(),
            n: ctx.precision(),
            a: Some(
                coeffs
                    .upper_entries()
                    .map(|(i, j, v)| (i, j, serde_json::to_value(v).expect("serializable")))
                    .collect(),
            ),
            frob: None,
            gram: None,
        }
    }

    pub fn from_module(module: &DieudonneModule) -> Self {
        let ctx = module.ctx();
        ModuleFile {
            p: ctx.p(),
            f: module.f(),
            r: module.r(),
            m: ctx.m(),
            n: ctx.precision(),
            a: None,
            frob: Some(matrix_to_json(module.frob_matrix())),
            gram: Some(matrix_to_json(module.gram())),
        }
    }
}
