use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use tauconv::algebra::{conv_k, involution_tau, lconv, norm, rconv, standard_conv_g, tconv, tilde};
use tauconv::function::GFunction;
use tauconv::group::{semidirect, AutomorphismAction, FiniteGroup, SemidirectGroup};
use tauconv::io::{gfunction_json, parse_function, spec_of, GroupRef};
use tauconv::norm::Exponent;
use tauconv::random;
use tauconv::scalar::GaussQ;
use tauconv::spectral;
use tauconv::verify::Oracle;

fn group(h: usize, k: usize, k_kind: u8) -> Arc<SemidirectGroup> {
    let hg = FiniteGroup::cyclic(h).unwrap();
    let kg = match k_kind {
        0 => FiniteGroup::cyclic(k).unwrap(),
        1 => FiniteGroup::dihedral(k.max(3)).unwrap(),
        _ => FiniteGroup::symmetric(3).unwrap(),
    };
    let action = if h.is_multiple_of(2) && k_kind == 0 {
        AutomorphismAction::inversion(&hg, &kg)
    } else if h.is_multiple_of(2) && k_kind == 2 {
        // element 1 of S3 is a transposition
        AutomorphismAction::conjugation(&hg, &kg, 1).unwrap()
    } else {
        AutomorphismAction::trivial(&hg, &kg)
    };
    Arc::new(semidirect(hg, kg, action).unwrap())
}

fn groups() -> impl Strategy<Value = Arc<SemidirectGroup>> {
    (1usize..=4, 1usize..=6, 0u8..3).prop_map(|(h, k, kind)| group(h, k, kind))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tilde_is_multiplicative(g in groups(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let h = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let expect = conv_k(&tilde(&f), &tilde(&h)).unwrap();
        prop_assert_eq!(&tilde(&rconv(&f, &h).unwrap()), &expect);
        prop_assert_eq!(&tilde(&lconv(&f, &h).unwrap()), &expect);
        prop_assert_eq!(&tilde(&tconv(&f, &h).unwrap()), &expect);
    }

    #[test]
    fn involution_reverses_products(g in groups(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let h = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let lhs = involution_tau(&tconv(&f, &h).unwrap());
        let rhs = tconv(&involution_tau(&h), &involution_tau(&f)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(involution_tau(&involution_tau(&f)), f);
    }

    #[test]
    fn oracle_agrees(g in groups(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let h = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let o = Oracle::new(&g);
        prop_assert_eq!(o.rconv(&f, &h), rconv(&f, &h).unwrap());
        prop_assert_eq!(o.lconv(&f, &h), lconv(&f, &h).unwrap());
        prop_assert_eq!(o.tconv(&f, &h), tconv(&f, &h).unwrap());
    }

    #[test]
    fn trivial_h_coincides_with_standard(k in 1usize..=6, kind in 0u8..3, seed in any::<u64>()) {
        let g = group(1, k, kind);
        let mut rng = random::rng(seed);
        let f = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let h = random::gfunction::<GaussQ, _>(&g, &mut rng);
        prop_assert_eq!(tconv(&f, &h).unwrap(), standard_conv_g(&f, &h).unwrap());
    }

    #[test]
    fn float_submultiplicative(g in groups(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::gfunction::<Complex64, _>(&g, &mut rng);
        let h = random::gfunction::<Complex64, _>(&g, &mut rng);
        let bound = norm(&f, Exponent::ONE).value * norm(&h, Exponent::ONE).value;
        for prod in [rconv(&f, &h), lconv(&f, &h), tconv(&f, &h), standard_conv_g(&f, &h)] {
            prop_assert!(norm(&prod.unwrap(), Exponent::ONE).value <= bound * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn fft_matches_naive(h in 1usize..=3, k in 1usize..=300, seed in any::<u64>()) {
        let g = group(h, k, 0);
        let mut rng = random::rng(seed);
        let f = random::gfunction::<Complex64, _>(&g, &mut rng);
        let u = random::gfunction::<Complex64, _>(&g, &mut rng);
        let tol = spectral::agreement_tol(&f, &u);
        prop_assert!(spectral::tconv_fft(&f, &u).unwrap().max_deviation(&tconv(&f, &u).unwrap()) <= tol);
    }

    #[test]
    fn function_files_round_trip(g in groups(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::gfunction::<GaussQ, _>(&g, &mut rng);
        let v = gfunction_json(&f, &GroupRef::Inline(spec_of(&g)), None);
        let back: GFunction<GaussQ> = parse_function(&v, Path::new(".")).unwrap().into_gfunction(&g).unwrap();
        prop_assert_eq!(back, f);
    }
}
