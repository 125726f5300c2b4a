use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dieudonne::deformation::{ss_dimension, stratum_spec, Specialization, TIndex, UniversalDisplay};
use dieudonne::dieudonne::{random_symplectic_base_change, DieudonneModule, NormalFormCoeffs};
use dieudonne::matrix::WittMatrix;
use dieudonne::newton::{
    compare, enumerate_admissible, is_above_or_equal, is_admissible, multiplicity_gcd, AdmissibleParams,
    NewtonPolygon, PolygonOrder,
};
use dieudonne::witt::{make_context, Residue, WittElement};

fn params(f: usize, r: usize) -> AdmissibleParams {
    AdmissibleParams::new(f as u32, r as u32).unwrap()
}

#[test]
fn strata_are_monotone() {
    for f in 1..=4 {
        for r in 1..=4 {
            let all = enumerate_admissible(params(f, r)).unwrap();
            let specs: Vec<_> = all.iter().map(|b| stratum_spec(b, f, r).unwrap()).collect();
            for (a, sa) in all.iter().zip(&specs) {
                for (b, sb) in all.iter().zip(&specs) {
                    if is_above_or_equal(a, b).unwrap() {
                        assert!(sa.s.is_subset(&sb.s), "f={f} r={r}: {a} vs {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn supersingular_dimension_by_rule_and_formula() {
    for f in 1..=8 {
        for r in 1..=6 {
            let spec = stratum_spec(&NewtonPolygon::supersingular((f * r) as u32), f, r).unwrap();
            assert_eq!(spec.dim, ss_dimension(f, r), "f={f} r={r}");
        }
    }
}

#[test]
fn enumerated_polygons_are_admissible_and_distinct() {
    for f in 1..=4 {
        for r in 1..=4 {
            let all = enumerate_admissible(params(f, r)).unwrap();
            assert_eq!(all.first(), Some(&NewtonPolygon::supersingular((f * r) as u32)));
            assert_eq!(all.last(), Some(&NewtonPolygon::ordinary((f * r) as u32)));
            for (k, a) in all.iter().enumerate() {
                assert!(is_admissible(a, params(f, r)));
                assert_eq!(multiplicity_gcd(a) % f as u32, 0);
                for b in &all[k + 1..] {
                    // maximal first: a later polygon never lies above an earlier one
                    assert_ne!(compare(a, b).unwrap(), PolygonOrder::Below);
                    assert_ne!(a, b);
                }
            }
        }
    }
}

/// `A σ(B) = p` and `B σ^{-1}(A) = p`.
fn fv_is_p(m: &DieudonneModule) -> bool {
    let ctx = m.ctx();
    let p = WittMatrix::identity(ctx, m.rank()).scale(&WittElement::p_power(ctx, 1));
    let a = m.frob_matrix();
    let b = m.ver_matrix();
    &(a * &b.frobenius()) == &p && &(b * &a.inverse_frobenius()) == &p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn slopes_and_a_type_survive_base_change(seed in any::<u64>(), which in 0usize..4) {
        let (p, f, r) = [(2u64, 1usize, 2usize), (3, 2, 1), (2, 3, 1), (5, 1, 2)][which];
        let g = f * r;
        let ctx = make_context(p, f, (2 * f * g + 4) as u32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = DieudonneModule::from_normal_form(&NormalFormCoeffs::random(&ctx, f, r, &mut rng)).unwrap();
        let u = random_symplectic_base_change(&ctx, f, r, &mut rng);
        let moved = base.apply_base_change(&u).unwrap();
        prop_assert_eq!(moved.a_type(), base.a_type());
        prop_assert_eq!(moved.slopes_oracle().unwrap(), base.slopes_oracle().unwrap());
        prop_assert!(fv_is_p(&moved));
    }

    #[test]
    fn specializations_are_dieudonne_modules(seed in any::<u64>(), which in 0usize..3) {
        let (f, r) = [(3usize, 2usize), (2, 2), (1, 3)][which];
        let ctx = make_context(2, f, (2 * f * f * r + 4) as u32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ud = UniversalDisplay::new(NormalFormCoeffs::random_unit_or_zero(&ctx, f, r, &mut rng));
        let mut s = Specialization::zero(&ctx, f, r);
        for t in TIndex::all(f, r) {
            if rand::Rng::gen_bool(&mut rng, 0.5) {
                s.set(t, &Residue::random_nonzero(&ctx, &mut rng));
            }
        }
        let m = ud.specialize(&s).unwrap();
        prop_assert!(fv_is_p(&m));
        let np = m.slopes_oracle().unwrap();
        prop_assert!(is_admissible(&np, params(f, r)));
    }
}
