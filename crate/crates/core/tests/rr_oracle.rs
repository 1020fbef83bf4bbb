use g2strata::field_curve::registry;
use g2strata::field_curve::{CurvePoint, EllipticCurve};
use g2strata::picard::{class_of, h0_h1, Divisor};
use g2strata::rr_spaces::{combine, multiply_sections, rr_basis, zero_divisor, SectionFn};
use proptest::prelude::*;

fn curves() -> Vec<EllipticCurve> {
    registry::builtin().into_iter().map(|c| c.curve).collect()
}

fn divisor_from(e: &EllipticCurve, picks: &[(usize, i64)]) -> Divisor {
    let pts = e.points();
    Divisor::from_terms(picks.iter().map(|&(i, n)| (pts[i % pts.len()], n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_dimension_is_riemann_roch(
        ci in 0usize..5,
        picks in prop::collection::vec((0usize..400, -2i64..4), 1..5),
    ) {
        let e = curves()[ci];
        let d = divisor_from(&e, &picks);
        prop_assume!(d.degree() >= 0 && d.degree() <= 8);
        let basis = rr_basis(&e, &d).unwrap();
        prop_assert_eq!(basis.len() as i64, h0_h1(&class_of(&e, &d)).0);
        for s in &basis {
            prop_assert!(s.is_regular(&e));
        }
    }

    #[test]
    fn zero_divisor_has_the_class_of_the_bundle(
        ci in 0usize..5,
        picks in prop::collection::vec((0usize..400, 1i64..3), 1..3),
        coeffs in prop::collection::vec(1i64..1000, 5),
    ) {
        let e = curves()[ci];
        let d = divisor_from(&e, &picks);
        prop_assume!(d.degree() <= 5);
        let basis = rr_basis(&e, &d).unwrap();
        let c: Vec<_> = coeffs.iter().take(basis.len()).map(|&v| e.field.from_i64(v)).collect();
        let s = combine(&e, &d, &basis[..c.len()], &c);
        prop_assume!(!s.is_zero());
        let z = zero_divisor(&e, &s, 6).unwrap();
        prop_assert!(z.divisor.is_effective());
        prop_assert_eq!(z.divisor.degree(), d.degree());
        prop_assert_eq!(z.class(), class_of(&z.curve, &d));
    }
}

#[test]
fn products_add_zero_divisors() {
    let e = curves()[0];
    let pts = e.points();
    let (tau, q) = (pts[4], pts[11]);
    let o = CurvePoint::Infinity;
    let l = Divisor::from_terms([(tau, 2), (o, 1)]);
    let m = Divisor::from_terms([(q, 1), (o, 1)]);
    let s = rr_basis(&e, &l).unwrap().pop().unwrap();
    let t = rr_basis(&e, &m).unwrap().pop().unwrap();
    let st = multiply_sections(&e, &s, &t);
    let zs = zero_divisor(&e, &s, 6).unwrap();
    let zt = zero_divisor(&e, &t, 6).unwrap();
    let zst = zero_divisor(&e, &st, 6).unwrap();
    assert_eq!(zst.divisor.degree(), zs.divisor.degree() + zt.divisor.degree());
    if zs.extension_degree == 1 && zt.extension_degree == 1 {
        assert_eq!(zst.divisor, zs.divisor.add(&zt.divisor));
    }
    let unit = SectionFn::unit(&e, Divisor::zero());
    assert_eq!(multiply_sections(&e, &s, &unit), s);
}
