use g2strata::bundle_calc::{BundleExpr, FibreKind, HorikawaCounts};
use g2strata::classifier::StratumLabel;
use g2strata::field_curve::{registry, CurvePoint, EllipticCurve};
use g2strata::picard::{class_of, Divisor, LineClass};
use g2strata::rr_spaces::rr_basis;
use g2strata::strata_engine::{fibration_invariants, horikawa_k2, moduli_lower_bound, moduli_table, subcases, Bound};
use proptest::prelude::*;

#[test]
fn w_parameters_are_sections_minus_one() {
    for label in StratumLabel::ALL {
        for s in subcases(label).unwrap() {
            assert_eq!(s.budget.w, Bound { value: s.a6.h0.value - 1, exact: s.a6.h0.exact }, "{label} {}", s.imposed);
        }
    }
}

#[test]
fn quotient_has_rank_seven_and_additive_degree() {
    for label in StratumLabel::ALL {
        for s in subcases(label).unwrap() {
            let a = &s.a6;
            assert_eq!(a.g2.rank() - a.g1.rank(), 7, "{label}");
            if let Some(q) = &a.a6 {
                assert_eq!(q.rank(), 7);
                assert_eq!(q.deg(), a.g2.deg() - a.g1.deg(), "{label}");
            }
        }
    }
}

#[test]
fn table_shape() {
    let t = moduli_table().unwrap();
    let lower = moduli_lower_bound(2, 5, 2);
    assert_eq!(t.lower_bound, lower);
    assert!(t.rows.iter().all(|r| r.dimension.value <= 13));
    assert_eq!(t.rows.iter().filter(|r| r.dimension.value == 13).count(), 1);
    for r in &t.rows {
        assert_eq!(r.disregard, r.dimension.value < lower, "{}", r.name);
    }
    // the two rows that are exact are the only ones with a computed fibre dimension
    for r in &t.rows {
        let corrected = r.subcases.iter().filter(|s| s.excluded.is_none()).any(|s| s.budget.fibre_correction.is_some());
        assert_eq!(r.dimension.exact, corrected, "{}", r.name);
    }
    assert!(t.components_at_least >= 2);
    assert!(t.component_dimensions.iter().all(|d| *d == 12 || *d == 13));
    assert!(t.at_most_one_top_dimensional);
}

#[test]
fn kept_strata_are_exactly_the_expected_ones() {
    let t = moduli_table().unwrap();
    let kept: Vec<&str> = t.rows.iter().filter(|r| !r.disregard).map(|r| r.name.as_str()).collect();
    assert_eq!(kept, ["I", "IIa", "IIb", "IIIa=IIIb", "IIIc", "V,2", "VI"]);
}

#[test]
fn table_is_deterministic() {
    assert_eq!(moduli_table().unwrap().tsv(), moduli_table().unwrap().tsv());
}

fn curves() -> Vec<EllipticCurve> {
    registry::builtin().into_iter().map(|c| c.curve).collect()
}

/// `(d - 1) o + P`, the obvious divisor in the class `(d, P)`.
fn representative(l: &LineClass) -> Divisor {
    Divisor::point(l.point).plus_point(CurvePoint::Infinity, l.deg - 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Over an elliptic base the `K^2` from the bundle degrees agrees with
    /// the count over singular fibres when every fibre of the trigonal
    /// locus is of the simplest kind.
    #[test]
    fn invariants_agree_with_fibre_count(d in 1i64..6, t in 0i64..6) {
        let (chi, k2) = fibration_invariants(d, t, 1);
        let nu = HorikawaCounts::new().with(FibreKind::V, 1, t as u64);
        prop_assert_eq!(k2, horikawa_k2(chi - 1, 1, &nu));
        prop_assert_eq!(k2 - 2 * chi, t);
    }

    #[test]
    fn line_sum_cohomology_matches_section_spaces(
        ci in 0usize..5,
        summands in prop::collection::vec((0i64..4, 0usize..400), 1..4),
        twist in (-2i64..3, 0usize..400),
    ) {
        let e = curves()[ci];
        let pts = e.points();
        let ls: Vec<LineClass> = summands.iter().map(|&(d, i)| LineClass { deg: d, point: pts[i % pts.len()] }).collect();
        let tw = LineClass { deg: twist.0, point: pts[twist.1 % pts.len()] };
        let (h0, _) = BundleExpr::lines(ls.clone()).cohomology(&e, &tw).unwrap();
        let mut oracle = 0;
        for l in &ls {
            let lt = l.tensor(&e, &tw);
            let d = representative(&lt);
            prop_assert_eq!(class_of(&e, &d), lt);
            oracle += if lt.deg < 0 { 0 } else { rr_basis(&e, &d).unwrap().len() as i64 };
        }
        prop_assert_eq!(h0, oracle);
    }
}
