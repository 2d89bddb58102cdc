use fgl_core::endo::*;
use fgl_core::fgl::{FormalGroupLaw, LawOrigin};
use fgl_core::gf::Gf;
use fgl_core::lift;
use fgl_core::ring::Ring;
use fgl_core::series::{TruncSeries, Valuation};
use num_rational::BigRational;

fn honda(p: u64, h: u32, n: usize, deg: u32) -> FormalGroupLaw {
    let f = Gf::standard(p, deg).unwrap();
    let g = lift::reduced_group_law(p, h, n, &f).unwrap();
    FormalGroupLaw::validate(g, LawOrigin::Honda { p, h }, 24).unwrap()
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn growth_below_boundary() {
    // x +_G x^2 on (2,3): w = 2, 2 < 8
    let law = honda(2, 3, 64, 3);
    let f = law.field().clone();
    let fr = TruncSeries::monomial(&f, 64, 1, 2);
    let u = law.g_add(&law.identity(), &fr).unwrap();
    let g = iterate_growth(&law, &u, 1).unwrap();
    assert_eq!(g.entries[0].w, Valuation::Finite(2));
    assert_eq!(g.entries[1].case, Some(GrowthCase::Below));
    assert_eq!(g.entries[1].w, Valuation::Finite(4));
    assert_eq!(g.entries[1].holds, Some(true));
}

#[test]
fn growth_on_the_boundary() {
    let law = honda(2, 2, 40, 2);
    let g = iterate_growth(&law, &law.bracket_int(3), 1).unwrap();
    assert_eq!(g.entries[0].w, Valuation::Finite(4));
    assert_eq!(g.entries[1].case, Some(GrowthCase::Boundary));
    assert!(g.entries[1].w.lower_bound() >= 16);
    assert_eq!(g.entries[1].holds, Some(true));
}

#[test]
fn growth_of_identity_is_empty() {
    let law = honda(2, 2, 16, 2);
    let g = iterate_growth(&law, &law.identity(), 4).unwrap();
    assert_eq!(g.entries.len(), 1);
    assert!(g.exhausted);
}

#[test]
fn height_from_one_automorphism() {
    for (p, h, a, n, deg) in [(2, 2, 5, 256, 2), (3, 1, 10, 81, 1), (5, 1, 26, 625, 1)] {
        let f = Gf::standard(p, deg).unwrap();
        let u = lift::reduced_multiplication(p, h, a, n, &f).unwrap();
        let est = estimate_height(&u).unwrap();
        assert_eq!(est.h, h, "p={p} h={h}");
        assert_eq!(est.ratio, p.pow(h));
    }
}

#[test]
fn height_needs_two_ratios() {
    let f = Gf::standard(2, 2).unwrap();
    let u = lift::reduced_multiplication(2, 2, 5, 64, &f).unwrap();
    assert_eq!(estimate_height(&u), Err(EndoError::NotStabilized { w: vec![16, 64] }));
}

#[test]
fn height_rejects_identity_and_torsion() {
    let law = honda(3, 1, 27, 1);
    assert_eq!(estimate_height(&law.identity()), Err(EndoError::IdentityToPrecision));
    let inv = law.inverse_series().clone();
    assert_eq!(estimate_height(&inv), Err(EndoError::TorsionToPrecision { iterate: 2 }));
}

#[test]
fn height_with_unit_part() {
    // t x +_G ... has u'(0) of order 3 in F_4
    let law = honda(2, 2, 256, 2);
    let f = law.field().clone();
    let e = solve_endomorphism(&law, f.generator(), 0, &FreeChoicePolicy::zero()).unwrap().series;
    let u = e.compose(&law.bracket_int(5)).unwrap();
    let est = estimate_height(&u).unwrap();
    assert_eq!((est.h, est.torsion_removed), (2, 3));
}

#[test]
fn ramification_height_one() {
    let law = honda(3, 1, 300, 1);
    let r = ramification_number(&law.bracket_int(4), 4).unwrap();
    for t in &r.terms {
        let w = 3u64.pow(t.n + 1);
        assert_eq!(t.w, w);
        assert_eq!(t.e, rat(2 * (w as i64 - 1), w as i64));
    }
    assert_eq!(r.terms.len(), 4);
    assert_eq!(r.limit, Some(rat(2, 1)));

    let law = honda(2, 1, 80, 1);
    let r = ramification_number(&law.bracket_int(3), 4).unwrap();
    // v_2(3 - 1) = 1, and v_2(3^(2^n) - 1) = n + 2 from n = 1 on
    assert_eq!((r.terms[0].w, r.terms[0].e.clone()), (2, rat(1, 2)));
    for t in &r.terms[1..] {
        let w = 2i64.pow(t.n + 2);
        assert_eq!(t.e, rat(w - 1, 2i64.pow(t.n + 1)));
    }
    assert_eq!(r.limit, Some(rat(2, 1)));
}

#[test]
fn padic_half_squares_back() {
    let law = honda(3, 1, 81, 1);
    let rho = law.bracket_int(4);
    let digits = zp_digits(1, 2, 3, 4).unwrap();
    let r = padic_iterate(&rho, &digits, None).unwrap();
    // w(rho^(81)) = 243 lies past N
    assert_eq!(r.window, 81);
    let sq = r.series.compose(&r.series).unwrap();
    assert!(sq.agrees_with(&rho.truncate(r.window)));
    let one = padic_iterate(&rho, &[1], None).unwrap();
    assert!(one.series.agrees_with(&rho));
    let two = padic_iterate(&rho, &[2], None).unwrap();
    assert!(two.series.agrees_with(&rho.compose(&rho).unwrap()));
    assert!(matches!(padic_iterate(&rho, &[1], Some(81)), Err(EndoError::WindowTooSmall { .. })));
}

#[test]
fn torsion_orders() {
    let law = honda(2, 2, 64, 2);
    // [5]^(4) = [625] has w = 4^4 = 256, invisible at N = 64
    assert_eq!(torsion_order(&law.bracket_int(5), 16).unwrap(), TorsionOrder::Finite { order: 4 });
    assert_eq!(
        torsion_order(&law.bracket_int(5), 3).unwrap(),
        TorsionOrder::NontorsionToPrecision { bound: 3 }
    );
    let deep = honda(2, 2, 300, 2);
    assert_eq!(torsion_order(&deep.bracket_int(5), 4).unwrap(), TorsionOrder::NontorsionToPrecision { bound: 4 });
    let f = law.field().clone();
    let t = f.generator();
    let e = solve_endomorphism(&law, t, 0, &FreeChoicePolicy::zero()).unwrap().series;
    let u = e.compose(&law.bracket_int(5)).unwrap();
    let tm = teichmuller_automorphism(&law, &u).unwrap();
    assert_eq!(*tm.series.coeff(1), t);
    assert_eq!(torsion_order(&tm.series, 10).unwrap(), TorsionOrder::Finite { order: 3 });
    let stable = teichmuller_automorphism(&law, &law.bracket_int(5)).unwrap();
    assert_eq!(stable.series, law.identity());
}

#[test]
fn endomorphism_coefficients_in_fph() {
    let law = honda(2, 2, 48, 4);
    let f = law.field().clone();
    for a in f.subfield_elements(2).unwrap() {
        for r in 0..3 {
            let e = solve_endomorphism(&law, a, r, &FreeChoicePolicy::zero()).unwrap();
            assert!(e.gate.holds);
            assert!(e.series.defined_over(2));
        }
    }
    let outside = f.generator();
    assert!(matches!(
        solve_endomorphism(&law, outside, 0, &FreeChoicePolicy::zero()),
        Err(EndoError::NotInField { .. })
    ));
}

#[test]
fn decomposition_is_idempotent() {
    let law = honda(2, 2, 40, 2);
    let f = law.field().clone();
    let mut psi = law.bracket_int(7);
    psi.set_coeff(13, f.add(psi.coeff(13), &1));
    let d = nearest_endomorphism(&law, &psi).unwrap();
    assert_eq!(d.v_delta, Valuation::Finite(13));
    let back = law.g_add(&d.g, &d.delta).unwrap();
    assert!(back.agrees_with(&psi));
    let again = nearest_endomorphism(&law, &back).unwrap();
    assert_eq!((again.g, again.delta), (d.g, d.delta));
}

#[test]
fn unit_outside_fph_gives_no_endomorphism_part() {
    let law = honda(2, 2, 32, 4);
    let f = law.field().clone();
    let psi = TruncSeries::monomial(&f, 32, f.generator(), 1);
    let d = nearest_endomorphism(&law, &psi).unwrap();
    assert!(d.g.is_zero());
    assert_eq!(d.delta, psi);
    assert_eq!(d.stop, StopReason::CoefficientNotInField);
}

#[test]
fn commutant_positive_controls() {
    let law = honda(3, 2, 90, 2);
    let u = law.bracket_int(10);
    for psi in [u.clone(), law.bracket_int(7), law.bracket_int(2), u.iterate(2).unwrap()] {
        assert!(commutant_residual(&u, &psi).unwrap().is_zero());
    }
    let sol = solve_commutant(&law, &u, &CommutantConfig::new(90).prescribe(1, 2)).unwrap();
    assert!(sol.is_consistent() && sol.unit_in_fph);
}

#[test]
fn v_endo_matches_frobenius() {
    let law = honda(3, 2, 30, 2);
    let fr = TruncSeries::monomial(law.field(), 30, 1, 3);
    assert_eq!(v_endo(&law, &fr).unwrap(), rat(1, 2));
    assert_eq!(v_endo(&law, law.p_series()).unwrap(), rat(1, 1));
}

#[test]
fn height_rejects_involution_in_char_two() {
    let law = honda(2, 2, 64, 2);
    let inv = law.inverse_series().clone();
    assert_eq!(estimate_height(&inv), Err(EndoError::TorsionToPrecision { iterate: 2 }));
}
