use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dieudonne::witt::{make_context, teichmuller, Residue, Valuation, WittContext, WittElement};

/// Remainder of `x^e - 1` modulo a monic `f` over `Z/n`, by repeated
/// squaring with schoolbook polynomial arithmetic.
fn x_pow_minus_one_mod(f: &[BigInt], e: u64, n: &BigInt) -> Vec<BigInt> {
    let d = f.len() - 1;
    let reduce = |mut a: Vec<BigInt>| -> Vec<BigInt> {
        while a.len() > d {
            let lead = a.pop().unwrap();
            let off = a.len() - d;
            for (k, c) in f[..d].iter().enumerate() {
                a[off + k] = (&a[off + k] - &lead * c).mod_floor(n);
            }
        }
        a.resize(d, BigInt::zero());
        a
    };
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (&out[i + j] + x * y).mod_floor(n);
            }
        }
        reduce(out)
    };
    let mut result = reduce(vec![BigInt::one()]);
    let mut base = reduce(vec![BigInt::zero(), BigInt::one()]);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    result[0] = (&result[0] - BigInt::one()).mod_floor(n);
    result
}

#[test]
fn teichmuller_modulus_divides_x_q_minus_one() {
    for &(p, m, n) in &[(2u64, 2usize, 10u32), (2, 3, 12), (3, 2, 8), (5, 3, 6), (7, 2, 5), (2, 5, 9)] {
        let ctx = make_context(p, m, n).unwrap();
        let f: Vec<BigInt> = ctx.modulus().iter().map(|c| BigInt::from(c.clone())).collect();
        assert_eq!(f.len(), m + 1);
        assert!(f[m].is_one());
        let pn = BigInt::from(p).pow(n);
        let rem = x_pow_minus_one_mod(&f, p.pow(m as u32) - 1, &pn);
        assert!(rem.iter().all(Zero::is_zero), "p={p} m={m}");
        let reduced: Vec<u64> = f.iter().map(|c| c.mod_floor(&BigInt::from(p)).try_into().unwrap()).collect();
        assert_eq!(reduced, ctx.residue_modulus());
    }
}

#[test]
fn moduli_known_in_closed_form() {
    // cube roots of unity and fourth roots of unity lift exactly
    let k = make_context(2, 2, 9).unwrap();
    let expect: Vec<String> = vec!["1".into(), "1".into(), "1".into()];
    assert_eq!(k.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>(), expect);
    let k = make_context(3, 2, 7).unwrap();
    let expect: Vec<String> = vec!["1".into(), "0".into(), "1".into()];
    assert_eq!(k.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>(), expect);
}

fn small_fields() -> Vec<Arc<WittContext>> {
    vec![
        make_context(2, 2, 3).unwrap(),
        make_context(2, 3, 3).unwrap(),
        make_context(3, 2, 3).unwrap(),
    ]
}

/// Every element of `W(F_q)/p^n`.
fn all_elements(ctx: &Arc<WittContext>, n: u32) -> Vec<WittElement> {
    let k = ctx.with_precision(n).unwrap();
    let p = WittElement::p_power(&k, 1);
    let mut out = vec![WittElement::zero(&k)];
    for _ in 0..n {
        let mut next = Vec::new();
        for x in &out {
            for r in Residue::all(&k) {
                next.push(&(x * &p) + &teichmuller(&k, &r));
            }
        }
        out = next;
    }
    out
}

#[test]
fn frobenius_has_order_m_exhaustively() {
    for ctx in small_fields() {
        let m = ctx.m() as i64;
        for x in all_elements(&ctx, 2) {
            assert_eq!(x.frobenius_pow(m), x);
            assert_eq!(x.frobenius().inverse_frobenius(), x);
            let mut y = x.clone();
            for _ in 0..m {
                y = y.frobenius();
            }
            assert_eq!(y, x);
        }
    }
}

#[test]
fn teichmuller_is_multiplicative_exhaustively() {
    for ctx in small_fields() {
        let k = ctx.with_precision(6).unwrap();
        let all: Vec<Residue> = Residue::all(&k).collect();
        for a in &all {
            let ta = teichmuller(&k, a);
            assert_eq!(ta.reduce(), *a);
            assert_eq!(ta.frobenius(), ta.pow_u64(k.p()));
            for b in &all {
                assert_eq!(teichmuller(&k, &a.mul(b)), &ta * &teichmuller(&k, b));
            }
        }
    }
}

fn check_valuation_additive(x: &WittElement, y: &WittElement, n: u32) {
    let prod = x * y;
    match (x.valuation(), y.valuation()) {
        (Valuation::Finite(a), Valuation::Finite(b)) if a + b < n => {
            assert_eq!(prod.valuation(), Valuation::Finite(a + b));
        }
        _ => assert!(prod.is_zero()),
    }
    assert_eq!(x.frobenius().valuation(), x.valuation());
}

#[test]
fn valuation_is_additive_exhaustively() {
    for ctx in small_fields() {
        let all = all_elements(&ctx, 2);
        for x in &all {
            for y in &all {
                check_valuation_additive(x, y, 2);
            }
        }
    }
}

#[test]
fn ten_thousand_random_samples() {
    let contexts = [
        make_context(5, 3, 6).unwrap(),
        make_context(7, 2, 5).unwrap(),
        make_context(2, 5, 9).unwrap(),
        make_context(3, 4, 7).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p_pow = |ctx: &Arc<WittContext>, k: u32| WittElement::p_power(ctx, k);
    for ctx in &contexts {
        let n = ctx.precision();
        for i in 0..2500u32 {
            let x = &WittElement::random(ctx, &mut rng) * &p_pow(ctx, i % 3);
            let y = &WittElement::random(ctx, &mut rng) * &p_pow(ctx, (i / 3) % 4);
            assert_eq!(x.frobenius_pow(ctx.m() as i64), x);
            check_valuation_additive(&x, &y, n);
            let a = Residue::random_nonzero(ctx, &mut rng);
            let b = Residue::random_nonzero(ctx, &mut rng);
            assert_eq!(teichmuller(ctx, &a.mul(&b)), &teichmuller(ctx, &a) * &teichmuller(ctx, &b));
            if x.is_unit() {
                assert_eq!(&x * &x.inverse().unwrap(), WittElement::one(ctx));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_is_a_ring_homomorphism(seed in any::<u64>(), which in 0usize..3) {
        let ctx = [make_context(2, 4, 8).unwrap(), make_context(3, 3, 6).unwrap(), make_context(5, 2, 5).unwrap()][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = WittElement::random(&ctx, &mut rng);
        let y = WittElement::random(&ctx, &mut rng);
        prop_assert_eq!((&x * &y).frobenius(), &x.frobenius() * &y.frobenius());
        prop_assert_eq!((&x + &y).frobenius(), &x.frobenius() + &y.frobenius());
        prop_assert_eq!(x.frobenius().reduce(), x.reduce().frobenius());
    }

    #[test]
    fn repr_round_trips(seed in any::<u64>()) {
        let ctx = make_context(3, 2, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = WittElement::random(&ctx, &mut rng);
        prop_assert_eq!(WittElement::from_repr(&ctx, &x.to_repr()).unwrap(), x);
    }
}
