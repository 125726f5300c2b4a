//! Truncated Witt vectors of a finite field, `W(F_{p^m}) / p^N`.
//!
//! Elements are stored in the power basis of a root `ζ` of the Teichmüller
//! modulus: the Hensel lift of an irreducible factor of `x^(p^m - 1) - 1`.
//! Because `ζ` is itself a Teichmüller element, the Frobenius lift acts on
//! the basis by `ζ ↦ ζ^p` and never needs Witt-coordinate formulas.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest residue field size `p^m` for which the canonical irreducible is
/// found by enumeration.
pub const FIELD_ENUMERATION_BOUND: u64 = 1 << 24;

/// Multiplication in `(Z/p^N)[x] / (modulus)` for a monic modulus.
#[derive(Clone, Debug)]
struct PolyRing {
    pn: BigUint,
    degree: usize,
    /// `p^N - c_i` for the low coefficients `c_i` of the monic modulus.
    neg_low: Vec<BigUint>,
}

impl PolyRing {
    fn new(pn: BigUint, modulus: &[BigUint]) -> Self {
        let degree = modulus.len() - 1;
        let neg_low = modulus[..degree]
            .iter()
            .map(|c| (&pn - (c % &pn)) % &pn)
            .collect();
        PolyRing { pn, degree, neg_low }
    }

    fn mul(&self, a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
        let m = self.degree;
        if m == 1 {
            return vec![(&a[0] * &b[0]) % &self.pn];
        }
        let mut prod = vec![BigUint::zero(); 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = std::mem::take(&mut prod[d]) % &self.pn;
            if c.is_zero() {
                continue;
            }
            for (i, nl) in self.neg_low.iter().enumerate() {
                prod[d - m + i] += &c * nl;
            }
        }
        prod.truncate(m);
        for c in prod.iter_mut() {
            *c %= &self.pn;
        }
        prod
    }

    fn pow(&self, base: &[BigUint], exp: &BigUint) -> Vec<BigUint> {
        let mut result = vec![BigUint::zero(); self.degree];
        result[0] = BigUint::one() % &self.pn;
        let bits = exp.bits();
        for i in (0..bits).rev() {
            result = self.mul(&result, &result);
            if exp.bit(i) {
                result = self.mul(&result, base);
            }
        }
        result
    }
}

/// The ring `W(F_{p^m}) / p^N` together with its Frobenius lift.
#[derive(Debug)]
pub struct WittContext {
    p: u64,
    m: usize,
    precision: u32,
    pn: BigUint,
    /// Monic Teichmüller modulus over `Z/p^N`, low-to-high, length `m + 1`.
    modulus: Vec<BigUint>,
    /// The same modulus reduced mod `p`: the canonical irreducible.
    residue_modulus: Vec<u64>,
    ring: PolyRing,
    /// Coordinates of `σ(ζ^i)` and `σ^{-1}(ζ^i)`.
    frob_images: Vec<Vec<BigUint>>,
    inv_frob_images: Vec<Vec<BigUint>>,
}

impl PartialEq for WittContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.precision == other.precision
    }
}

impl Eq for WittContext {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds `W(F_{p^m}) / p^N`.
///
/// The residue modulus is the irreducible monic degree-`m` polynomial over
/// `F_p` (other than `x`) whose coefficient vector, read as base-`p` digits
/// with the constant term least significant, is smallest.
pub fn make_context(p: u64, m: usize, precision: u32) -> Result<Arc<WittContext>> {
    if !is_prime(p) {
        return Err(Error::InvalidParams(format!("{p} is not prime")));
    }
    if m == 0 || precision == 0 {
        return Err(Error::InvalidParams(
            "residue degree and precision must be positive".into(),
        ));
    }
    let q = (p as u128).checked_pow(m as u32);
    match q {
        Some(q) if q <= FIELD_ENUMERATION_BOUND as u128 => {}
        _ => {
            return Err(Error::FieldTooLarge {
                p,
                m,
                bound: FIELD_ENUMERATION_BOUND,
            })
        }
    }
    let residue_modulus = least_irreducible(p, m);
    let pn = BigUint::from(p).pow(precision);
    let lifted: Vec<BigUint> = residue_modulus.iter().map(|&c| BigUint::from(c)).collect();
    let modulus = teichmuller_modulus(p, m, precision, &pn, &lifted);
    Ok(Arc::new(WittContext::from_modulus(
        p,
        m,
        precision,
        pn,
        modulus,
        residue_modulus,
    )))
}

/// Lifts the residue modulus to the minimal polynomial of the Teichmüller
/// root: `∏_{i<m} (X - t^{p^i})` where `t = x^{q^{N-1}}` in `(Z/p^N)[x]/(F)`.
fn teichmuller_modulus(
    p: u64,
    m: usize,
    precision: u32,
    pn: &BigUint,
    lifted: &[BigUint],
) -> Vec<BigUint> {
    if m == 1 {
        // Z/p^N itself: the root is the Teichmüller lift of -c0.
        let c0 = &lifted[0];
        let root = (pn - c0) % pn;
        let q = BigUint::from(p);
        let t = root.modpow(&q.pow(precision - 1), pn);
        return vec![(pn - &t) % pn, BigUint::one()];
    }
    let ring = PolyRing::new(pn.clone(), lifted);
    let q = BigUint::from(p).pow(m as u32);
    let mut x = vec![BigUint::zero(); m];
    x[1] = BigUint::one();
    let t = ring.pow(&x, &q.pow(precision - 1));
    let p_big = BigUint::from(p);
    let mut conjugates = vec![t];
    for i in 1..m {
        let next = ring.pow(&conjugates[i - 1], &p_big);
        conjugates.push(next);
    }
    // Polynomial in X with coefficients in the ring, low-to-high.
    let mut poly: Vec<Vec<BigUint>> = vec![one_vec(m, pn)];
    for c in &conjugates {
        let neg_c: Vec<BigUint> = c.iter().map(|v| (pn - v) % pn).collect();
        let mut next = vec![vec![BigUint::zero(); m]; poly.len() + 1];
        for (k, coeff) in poly.iter().enumerate() {
            for (s, v) in coeff.iter().enumerate() {
                next[k + 1][s] = (&next[k + 1][s] + v) % pn;
            }
            let prod = ring.mul(coeff, &neg_c);
            for (s, v) in prod.iter().enumerate() {
                next[k][s] = (&next[k][s] + v) % pn;
            }
        }
        poly = next;
    }
    poly.into_iter()
        .map(|coeff| {
            debug_assert!(coeff[1..].iter().all(Zero::is_zero));
            coeff[0].clone()
        })
        .collect()
}

fn one_vec(m: usize, pn: &BigUint) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); m];
    v[0] = BigUint::one() % pn;
    v
}

impl WittContext {
    fn from_modulus(
        p: u64,
        m: usize,
        precision: u32,
        pn: BigUint,
        modulus: Vec<BigUint>,
        residue_modulus: Vec<u64>,
    ) -> Self {
        let ring = PolyRing::new(pn.clone(), &modulus);
        let mut ctx = WittContext {
            p,
            m,
            precision,
            pn,
            modulus,
            residue_modulus,
            ring,
            frob_images: Vec::new(),
            inv_frob_images: Vec::new(),
        };
        let mut zeta = vec![BigUint::zero(); m];
        if m == 1 {
            // The power basis is {1}; σ is the identity on Z/p^N.
            ctx.frob_images = vec![one_vec(1, &ctx.pn)];
            ctx.inv_frob_images = ctx.frob_images.clone();
            return ctx;
        }
        zeta[1] = BigUint::one();
        let zp = ctx.ring.pow(&zeta, &BigUint::from(p));
        let zpinv = ctx
            .ring
            .pow(&zeta, &BigUint::from(p).pow(m as u32 - 1));
        let mut images = vec![one_vec(m, &ctx.pn)];
        let mut inv_images = vec![one_vec(m, &ctx.pn)];
        for i in 1..m {
            images.push(ctx.ring.mul(&images[i - 1], &zp));
            inv_images.push(ctx.ring.mul(&inv_images[i - 1], &zpinv));
        }
        ctx.frob_images = images;
        ctx.inv_frob_images = inv_images;
        ctx
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The precision exponent `N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus_power(&self) -> &BigUint {
        &self.pn
    }

    /// The Teichmüller modulus over `Z/p^N`, low-to-high.
    pub fn modulus(&self) -> &[BigUint] {
        &self.modulus
    }

    /// The canonical irreducible over `F_p`, low-to-high.
    pub fn residue_modulus(&self) -> &[u64] {
        &self.residue_modulus
    }

    /// Size of the residue field.
    pub fn field_size(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    /// The same field at a different precision. The Teichmüller modulus is
    /// canonical, so elements reduce compatibly between the two.
    pub fn with_precision(&self, precision: u32) -> Result<Arc<WittContext>> {
        make_context(self.p, self.m, precision)
    }
}

/// Valuation of a truncated element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    /// Zero modulo `p^N`: the valuation is at least `N`.
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound on the true valuation.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(n) => write!(f, "{n}+"),
        }
    }
}

/// An element of `W(F_{p^m}) / p^N`.
#[derive(Clone)]
pub struct WittElement {
    coeffs: Vec<BigUint>,
    ctx: Arc<WittContext>,
}

impl PartialEq for WittElement {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.coeffs == other.coeffs
    }
}

impl Eq for WittElement {}

impl fmt::Debug for WittElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WittElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.m == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl WittElement {
    pub fn zero(ctx: &Arc<WittContext>) -> Self {
        WittElement {
            coeffs: vec![BigUint::zero(); ctx.m],
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &Arc<WittContext>) -> Self {
        WittElement {
            coeffs: one_vec(ctx.m, &ctx.pn),
            ctx: ctx.clone(),
        }
    }

    pub fn from_int(ctx: &Arc<WittContext>, value: i64) -> Self {
        let mut e = Self::zero(ctx);
        let mag = BigUint::from(value.unsigned_abs()) % &ctx.pn;
        e.coeffs[0] = if value < 0 {
            (&ctx.pn - mag) % &ctx.pn
        } else {
            mag
        };
        e
    }

    /// Element with the given power-basis coordinates (reduced mod `p^N`).
    pub fn from_coeffs(ctx: &Arc<WittContext>, coeffs: Vec<BigUint>) -> Result<Self> {
        if coeffs.len() != ctx.m {
            return Err(Error::InvalidParams(format!(
                "expected {} coordinates, got {}",
                ctx.m,
                coeffs.len()
            )));
        }
        Ok(WittElement {
            coeffs: coeffs.into_iter().map(|c| c % &ctx.pn).collect(),
            ctx: ctx.clone(),
        })
    }

    /// The root `ζ` of the modulus.
    pub fn generator(ctx: &Arc<WittContext>) -> Self {
        if ctx.m == 1 {
            let mut e = Self::zero(ctx);
            e.coeffs[0] = (&ctx.pn - &ctx.modulus[0]) % &ctx.pn;
            return e;
        }
        let mut e = Self::zero(ctx);
        e.coeffs[1] = BigUint::one();
        e
    }

    /// `p^k` (zero once `k ≥ N`).
    pub fn p_power(ctx: &Arc<WittContext>, k: u32) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = BigUint::from(ctx.p).pow(k) % &ctx.pn;
        e
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Arc<WittContext>, rng: &mut R) -> Self {
        let bytes = (ctx.pn.bits() / 8 + 2) as usize;
        let coeffs = (0..ctx.m)
            .map(|_| {
                let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
                BigUint::from_bytes_le(&raw) % &ctx.pn
            })
            .collect();
        WittElement {
            coeffs,
            ctx: ctx.clone(),
        }
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.reduce().is_zero()
    }

    /// True when every coordinate lies in the prime subring, i.e. the
    /// element is fixed by σ.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn same_ctx(&self, other: &Self) {
        assert!(
            *self.ctx == *other.ctx,
            "Witt elements from different contexts"
        );
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        WittElement {
            coeffs: self.ctx.ring.pow(&self.coeffs, exp),
            ctx: self.ctx.clone(),
        }
    }

    pub fn pow_u64(&self, exp: u64) -> Self {
        self.pow(&BigUint::from(exp))
    }

    fn apply_images(&self, images: &[Vec<BigUint>]) -> Self {
        let m = self.ctx.m;
        let pn = &self.ctx.pn;
        let mut out = vec![BigUint::zero(); m];
        for (c, img) in self.coeffs.iter().zip(images) {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(img) {
                *o += c * v;
            }
        }
        for o in out.iter_mut() {
            *o %= pn;
        }
        WittElement {
            coeffs: out,
            ctx: self.ctx.clone(),
        }
    }

    /// The Frobenius lift σ.
    pub fn frobenius(&self) -> Self {
        if self.ctx.m == 1 {
            return self.clone();
        }
        self.apply_images(&self.ctx.frob_images)
    }

    /// σ^{-1}.
    pub fn inverse_frobenius(&self) -> Self {
        if self.ctx.m == 1 {
            return self.clone();
        }
        self.apply_images(&self.ctx.inv_frob_images)
    }

    /// σ^k for any integer `k` (negative powers use σ^{-1}).
    pub fn frobenius_pow(&self, k: i64) -> Self {
        let m = self.ctx.m as i64;
        let k = k.rem_euclid(m);
        let mut out = self.clone();
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }

    pub fn valuation(&self) -> Valuation {
        let n = self.ctx.precision;
        let p = BigUint::from(self.ctx.p);
        let mut best = n;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0;
            let mut x = c.clone();
            while v < best {
                let (q, r) = x.div_rem(&p);
                if !r.is_zero() {
                    break;
                }
                x = q;
                v += 1;
            }
            best = best.min(v);
        }
        if best >= n {
            Valuation::AtLeast(n)
        } else {
            Valuation::Finite(best)
        }
    }

    /// Exact division by `p`, when every coordinate is divisible by `p`.
    /// The result is only meaningful modulo `p^{N-1}`.
    pub fn div_p(&self) -> Option<Self> {
        let p = BigUint::from(self.ctx.p);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(&p);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(WittElement {
            coeffs: out,
            ctx: self.ctx.clone(),
        })
    }

    /// Repeated exact division by `p`.
    pub fn div_p_pow(&self, k: u32) -> Option<Self> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.div_p()?;
        }
        Some(out)
    }

    /// Multiplicative inverse, when the element is a unit.
    pub fn inverse(&self) -> Option<Self> {
        let r = self.reduce();
        let rinv = r.inverse()?;
        let mut y = rinv.lift(&self.ctx);
        let two = WittElement::from_int(&self.ctx, 2);
        // Newton iteration doubles the number of correct digits.
        let mut correct = 1u32;
        while correct < self.ctx.precision {
            y = &y * &(&two - &(self * &y));
            correct *= 2;
        }
        Some(y)
    }

    /// Reduction modulo `p` to the residue field.
    pub fn reduce(&self) -> Residue {
        let p = self.ctx.p;
        let pb = BigUint::from(p);
        Residue {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (c % &pb).to_u64().expect("residue fits in u64"))
                .collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// Reduction modulo `p^k`, still represented in the same context.
    pub fn truncate(&self, k: u32) -> Self {
        let pk = BigUint::from(self.ctx.p).pow(k);
        WittElement {
            coeffs: self.coeffs.iter().map(|c| c % &pk).collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn eq_mod_p_pow(&self, other: &Self, k: u32) -> bool {
        (self - other).truncate(k).is_zero()
    }

    /// Re-expresses this element in a context with the same `(p, m)` and a
    /// different precision (lifting by the canonical representative when
    /// the target is larger).
    pub fn change_precision(&self, target: &Arc<WittContext>) -> Self {
        assert!(target.p == self.ctx.p && target.m == self.ctx.m);
        WittElement {
            coeffs: self.coeffs.iter().map(|c| c % &target.pn).collect(),
            ctx: target.clone(),
        }
    }

    pub fn to_repr(&self) -> WittElementRepr {
        WittElementRepr {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            p: self.ctx.p,
            m: self.ctx.m,
            n: self.ctx.precision,
        }
    }

    pub fn from_repr(ctx: &Arc<WittContext>, repr: &WittElementRepr) -> Result<Self> {
        if repr.p != ctx.p || repr.m != ctx.m {
            return Err(Error::ContextMismatch);
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<BigUint>()
                    .map_err(|e| Error::Parse(format!("coordinate {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(ctx, coeffs)
    }
}

/// JSON form of a [`WittElement`]: decimal-string coordinates plus the
/// context parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittElementRepr {
    pub coeffs: Vec<String>,
    pub p: u64,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: u32,
}

impl Serialize for WittElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a WittElement> for &'a WittElement {
            type Output = WittElement;
            fn $method(self, rhs: &'a WittElement) -> WittElement {
                self.same_ctx(rhs);
                let f: fn(&WittElement, &WittElement) -> Vec<BigUint> = $body;
                WittElement {
                    coeffs: f(self, rhs),
                    ctx: self.ctx.clone(),
                }
            }
        }
        impl $tr<WittElement> for WittElement {
            type Output = WittElement;
            fn $method(self, rhs: WittElement) -> WittElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a WittElement> for WittElement {
            type Output = WittElement;
            fn $method(self, rhs: &'a WittElement) -> WittElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let pn = &a.ctx.pn;
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x + y) % pn)
        .collect()
});

binop!(Sub, sub, |a, b| {
    let pn = &a.ctx.pn;
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x + (pn - y)) % pn)
        .collect()
});

binop!(Mul, mul, |a, b| a.ctx.ring.mul(&a.coeffs, &b.coeffs));

impl Neg for &WittElement {
    type Output = WittElement;
    fn neg(self) -> WittElement {
        let pn = &self.ctx.pn;
        WittElement {
            coeffs: self.coeffs.iter().map(|x| (pn - x) % pn).collect(),
            ctx: self.ctx.clone(),
        }
    }
}

impl Neg for WittElement {
    type Output = WittElement;
    fn neg(self) -> WittElement {
        -&self
    }
}

/// Teichmüller lift of a residue-field element: the unique `t ≡ a (mod p)`
/// with `t^{p^m} = t`.
pub fn teichmuller(ctx: &Arc<WittContext>, a: &Residue) -> WittElement {
    let lift = a.lift(ctx);
    if a.is_zero() {
        return lift;
    }
    let q = BigUint::from(ctx.field_size());
    lift.pow(&q.pow(ctx.precision - 1))
}

/// An element of the residue field `F_{p^m}`, in the power basis of the
/// reduced generator.
#[derive(Clone)]
pub struct Residue {
    coeffs: Vec<u64>,
    ctx: Arc<WittContext>,
}

impl PartialEq for Residue {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.ctx.p == other.ctx.p && self.ctx.m == other.ctx.m
    }
}

impl Eq for Residue {}

impl std::hash::Hash for Residue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Residue {
    pub fn zero(ctx: &Arc<WittContext>) -> Self {
        Residue {
            coeffs: vec![0; ctx.m],
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &Arc<WittContext>) -> Self {
        let mut r = Self::zero(ctx);
        r.coeffs[0] = 1 % ctx.p;
        r
    }

    pub fn from_coeffs(ctx: &Arc<WittContext>, coeffs: Vec<u64>) -> Self {
        assert_eq!(coeffs.len(), ctx.m);
        Residue {
            coeffs: coeffs.into_iter().map(|c| c % ctx.p).collect(),
            ctx: ctx.clone(),
        }
    }

    /// The element whose coordinates are the base-`p` digits of `index`.
    pub fn from_index(ctx: &Arc<WittContext>, mut index: u64) -> Self {
        let mut coeffs = vec![0; ctx.m];
        for c in coeffs.iter_mut() {
            *c = index % ctx.p;
            index /= ctx.p;
        }
        Residue {
            coeffs,
            ctx: ctx.clone(),
        }
    }

    /// All `p^m` elements, in index order.
    pub fn all(ctx: &Arc<WittContext>) -> impl Iterator<Item = Residue> + '_ {
        (0..ctx.field_size()).map(move |i| Residue::from_index(ctx, i))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(ctx: &Arc<WittContext>, rng: &mut R) -> Self {
        let q = ctx.field_size();
        Residue::from_index(ctx, rng.gen_range(1..q))
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    /// Canonical lift with coordinates in `[0, p)`.
    pub fn lift(&self, ctx: &Arc<WittContext>) -> WittElement {
        WittElement {
            coeffs: self.coeffs.iter().map(|&c| BigUint::from(c)).collect(),
            ctx: ctx.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.ctx.p;
        Residue {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) % p)
                .collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p;
        Residue {
            coeffs: self.coeffs.iter().map(|a| (p - a) % p).collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Residue {
            coeffs: fp_mulmod(
                &self.coeffs,
                &other.coeffs,
                &self.ctx.residue_modulus,
                self.ctx.p,
            ),
            ctx: self.ctx.clone(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Residue::one(&self.ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// The absolute Frobenius `x ↦ x^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.ctx.p)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(self.pow(self.ctx.field_size() - 2))
    }
}

/// `a · b mod f` over `F_p`, for `f` monic of degree `m` and `a`, `b` of
/// length `m`.
fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    let p128 = p as u128;
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p128;
        }
    }
    for d in (m..prod.len()).rev() {
        let c = prod[d] % p128;
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for i in 0..m {
            prod[d - m + i] = (prod[d - m + i] + (p128 - c) * f[i] as u128) % p128;
        }
    }
    let mut out: Vec<u64> = prod.into_iter().map(|c| (c % p128) as u64).collect();
    out.resize(m, 0);
    out
}

/// Trimmed polynomial helpers over `F_p`, used only to select the modulus.
mod fp_poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        let mut acc = 1u128;
        let mut base = a as u128 % p as u128;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        acc as u64
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let b = trim(b.to_vec());
        let lead_inv = inv(*b.last().unwrap(), p);
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c as u128 * bi as u128 % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; (a.len() + b.len()).max(1)];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        rem(&prod, f, p)
    }

    /// `x^{p^k} mod f`.
    pub fn x_pow_p_pow(k: usize, f: &[u64], p: u64) -> Vec<u64> {
        let mut cur = rem(&[0, 1], f, p);
        for _ in 0..k {
            let mut acc = vec![1u64];
            let mut base = cur.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, f, p);
                }
                base = mulmod(&base, &base, f, p);
                e >>= 1;
            }
            cur = acc;
        }
        cur
    }

    /// Rabin's irreducibility test for monic `f` of degree `m`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let m = f.len() - 1;
        let x = rem(&[0, 1], f, p);
        if x_pow_p_pow(m, f, p) != x {
            return false;
        }
        let mut primes = Vec::new();
        let mut n = m;
        let mut d = 2;
        while d <= n {
            if n % d == 0 {
                primes.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        for q in primes {
            let mut h = x_pow_p_pow(m / q, f, p);
            h.resize(h.len().max(2), 0);
            h[1] = (h[1] + p - 1) % p;
            let g = gcd(f, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// The canonical irreducible: least coefficient vector (constant term least
/// significant) among irreducible monic polynomials of degree `m` with a
/// nonzero constant term.
fn least_irreducible(p: u64, m: usize) -> Vec<u64> {
    let q = p.pow(m as u32);
    for n in 0..q {
        let mut f = vec![0u64; m + 1];
        let mut k = n;
        for c in f.iter_mut().take(m) {
            *c = k % p;
            k /= p;
        }
        f[m] = 1;
        if f[0] == 0 {
            continue;
        }
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

/// A σ-equivariant ring embedding `W(F_{p^m})/p^N → W(F_{p^{m'}})/p^N`
/// for `m | m'`, determined by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Arc<WittContext>,
    target: Arc<WittContext>,
    generator_powers: Vec<WittElement>,
}

impl Embedding {
    pub fn new(source: &Arc<WittContext>, target: &Arc<WittContext>) -> Result<Self> {
        if source.p != target.p
            || target.m % source.m != 0
            || target.precision != source.precision
        {
            return Err(Error::InvalidParams(format!(
                "cannot embed m = {} into m = {} (p {} vs {}, N {} vs {})",
                source.m, target.m, source.p, target.p, source.precision, target.precision
            )));
        }
        let residue_mod = &source.residue_modulus;
        let root = Residue::all(target)
            .find(|cand| {
                let mut val = Residue::zero(target);
                for &c in residue_mod.iter().rev() {
                    val = val.mul(cand).add(&Residue::from_index(target, c));
                }
                val.is_zero()
            })
            .expect("residue modulus splits in the larger field");
        let theta = teichmuller(target, &root);
        let mut generator_powers = vec![WittElement::one(target)];
        for i in 1..source.m {
            let next = &generator_powers[i - 1] * &theta;
            generator_powers.push(next);
        }
        if source.m == 1 {
            generator_powers = vec![WittElement::one(target)];
        }
        Ok(Embedding {
            source: source.clone(),
            target: target.clone(),
            generator_powers,
        })
    }

    pub fn target(&self) -> &Arc<WittContext> {
        &self.target
    }

    pub fn apply(&self, x: &WittElement) -> WittElement {
        assert!(*x.ctx == *self.source);
        let mut acc = WittElement::zero(&self.target);
        for (c, g) in x.coeffs.iter().zip(&self.generator_powers) {
            if c.is_zero() {
                continue;
            }
            let scalar = WittElement::from_coeffs(&self.target, {
                let mut v = vec![BigUint::zero(); self.target.m];
                v[0] = c.clone();
                v
            })
            .expect("length matches");
            acc = &acc + &(&scalar * g);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degree_one_context_is_integers_mod_pn() {
        let ctx = make_context(2, 1, 8).unwrap();
        assert_eq!(ctx.modulus()[0], BigUint::from(255u32));
        assert_eq!(ctx.modulus()[1], BigUint::one());
        let a = WittElement::from_int(&ctx, 200);
        let b = WittElement::from_int(&ctx, 100);
        assert_eq!(&a + &b, WittElement::from_int(&ctx, 44));
    }

    #[test]
    fn canonical_residue_moduli() {
        assert_eq!(make_context(2, 3, 6).unwrap().residue_modulus(), &[1, 1, 0, 1]);
        assert_eq!(make_context(3, 2, 4).unwrap().residue_modulus(), &[1, 0, 1]);
        assert_eq!(make_context(2, 2, 4).unwrap().residue_modulus(), &[1, 1, 1]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(make_context(4, 1, 3), Err(Error::InvalidParams(_))));
        assert!(matches!(make_context(2, 0, 3), Err(Error::InvalidParams(_))));
        assert!(matches!(make_context(2, 30, 3), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn generator_order_divides_q_minus_one() {
        let ctx = make_context(3, 2, 5).unwrap();
        let z = WittElement::generator(&ctx);
        assert_eq!(z.pow_u64(8), WittElement::one(&ctx));
    }

    #[test]
    fn frobenius_of_generator_is_its_pth_power() {
        let ctx = make_context(2, 3, 6).unwrap();
        let z = WittElement::generator(&ctx);
        assert_eq!(z.frobenius(), &z * &z);
        assert_eq!(z.frobenius().inverse_frobenius(), z);
    }

    #[test]
    fn valuation_examples() {
        let ctx = make_context(3, 2, 6).unwrap();
        let u = &WittElement::generator(&ctx) + &WittElement::from_int(&ctx, 1);
        let x = &WittElement::p_power(&ctx, 2) * &u;
        assert_eq!(x.valuation(), Valuation::Finite(2));
        assert_eq!(WittElement::zero(&ctx).valuation(), Valuation::AtLeast(6));
        assert_eq!(WittElement::p_power(&ctx, 7).valuation(), Valuation::AtLeast(6));
    }

    #[test]
    fn inverse_of_units_only() {
        let ctx = make_context(5, 2, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = WittElement::random(&ctx, &mut rng);
            match x.inverse() {
                Some(y) => assert_eq!(&x * &y, WittElement::one(&ctx)),
                None => assert!(!x.is_unit()),
            }
        }
    }

    #[test]
    fn embedding_is_a_frobenius_equivariant_homomorphism() {
        let small = make_context(2, 3, 5).unwrap();
        let big = make_context(2, 6, 5).unwrap();
        let emb = Embedding::new(&small, &big).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = WittElement::random(&small, &mut rng);
            let b = WittElement::random(&small, &mut rng);
            assert_eq!(emb.apply(&(&a * &b)), &emb.apply(&a) * &emb.apply(&b));
            assert_eq!(emb.apply(&(&a + &b)), &emb.apply(&a) + &emb.apply(&b));
            assert_eq!(emb.apply(&a.frobenius()), emb.apply(&a).frobenius());
        }
    }

    #[test]
    fn json_round_trip() {
        let ctx = make_context(3, 2, 4).unwrap();
        let x = WittElement::generator(&ctx);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"N\":4"));
        let repr: WittElementRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(WittElement::from_repr(&ctx, &repr).unwrap(), x);
    }
}
