use std::collections::BTreeSet;

use g2strata::fibration_lab::{
    automorphism_pairs, bicanonical_kernel, build_case_v, build_case_v_with, case_one_invariant_conic,
    order_three_point, zeuthen_segre_check, LabOptions, SingularityKind, NORMALIZED_COEFFICIENTS,
};
use g2strata::field_curve::{registry, CurvePoint, EllipticCurve, Fe, Field};
use g2strata::Error;
use proptest::prelude::*;

fn curve(name: &str) -> EllipticCurve {
    registry::resolve(name).unwrap().curve
}

fn two_torsion(e: &EllipticCurve) -> Vec<CurvePoint> {
    e.points().into_iter().filter(|p| !p.is_infinity() && e.mul(p, 2).is_infinity()).collect()
}

/// Scales the first nonzero coordinate to 1.
fn normalize(f: &Field, c: [Fe; 3]) -> [Fe; 3] {
    let lead = c.iter().copied().find(|x| !x.is_zero()).expect("nonzero coordinates");
    let inv = f.inv(lead).unwrap();
    c.map(|x| f.mul(x, inv))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_passing_seed_gives_nineteen_distinct_points(ci in 0usize..5, seed in 0u64..1000, ti in 0usize..3) {
        let e = registry::builtin()[ci].curve;
        let tau = two_torsion(&e)[ti];
        let inst = match build_case_v(&e, &tau, seed, &LabOptions::default()) {
            Ok(i) => i,
            Err(Error::Genericity { .. }) => return Ok(()),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let rep = inst.crit_points(2).unwrap();
        prop_assert_eq!(rep.family_sizes(), vec![1, 3, 3, 3, 3, 3, 3]);
        let f = &rep.curve.field;
        let pts: BTreeSet<_> = rep.points().iter().map(|p| (p.base, normalize(f, p.coords))).collect();
        prop_assert_eq!(pts.len(), 19);
        for p in rep.points() {
            prop_assert!(rep.curve.contains(&p.base));
        }
        // the node sits at the vertex of the fibre over tau
        prop_assert_eq!(rep.node.base, inst.tau);
        prop_assert_eq!(normalize(f, rep.node.coords), [f.zero(), f.zero(), f.one()]);
        let zs = zeuthen_segre_check(&rep).unwrap();
        prop_assert!(zs.holds);
        prop_assert_eq!(zs.sum, 19);
    }
}

#[test]
fn families_lie_over_distinct_base_points() {
    for nc in registry::builtin() {
        let e = nc.curve;
        let inst = build_case_v(&e, &two_torsion(&e)[0], 7, &LabOptions::default()).unwrap();
        let rep = inst.crit_points(2).unwrap();
        let bases: BTreeSet<_> = rep.points().iter().map(|p| p.base).collect();
        assert_eq!(bases.len(), 19, "{}", nc.name);
        assert!(rep.empty_loci.iter().all(|l| l.solutions == 0 && l.fibres_scanned > 0), "{}", nc.name);
    }
}

#[test]
fn explicit_coefficients_reproduce_the_seeded_build() {
    let e = curve("b73");
    let tau = two_torsion(&e)[1];
    let coeffs = NORMALIZED_COEFFICIENTS.map(|r| r.map(|v| e.field.from_i64(v)));
    let a = build_case_v(&e, &tau, 3, &LabOptions::default()).unwrap();
    let b = build_case_v_with(&e, &tau, coeffs, 3, &LabOptions::default()).unwrap();
    assert_eq!(a.json(), b.json());
}

#[test]
fn bicanonical_record() {
    let e = curve("b193");
    let inst = build_case_v(&e, &two_torsion(&e)[0], 7, &LabOptions::default()).unwrap();
    let rep = inst.crit_points(2).unwrap();
    let bk = bicanonical_kernel(&inst, &rep).unwrap();
    assert_eq!((bk.coefficient_dimension, bk.points, bk.kernel), (7, 19, 0));
    assert_eq!(bk.rank, 7);
    assert!(bk.witness.is_none());
    assert_eq!((bk.bezout.value, bk.bezout.h_cubed), (3, 7));
    assert_eq!(bk.h1_tangent, Some(12));
    assert_eq!(bk.stratum_dimension, Some(12));
}

#[test]
fn conic_bundle_has_one_node_over_tau() {
    let e = curve("b61");
    let tau = two_torsion(&e)[2];
    let inst = build_case_v(&e, &tau, 1, &LabOptions::default()).unwrap();
    let sing = inst.conic_singularities(2).unwrap();
    let nodes: Vec<_> = sing.singular_points().collect();
    assert_eq!(nodes.len(), 1);
    assert_eq!(nodes[0].base, tau);
    assert_eq!(nodes[0].kind, Some(SingularityKind::A1));
    assert_eq!(sing.generic_fibre_rank, Some(3));
}

#[test]
fn symbolic_and_brute_force_automorphisms_agree() {
    for p in [5, 7] {
        let r = automorphism_pairs(p).unwrap();
        assert!(r.agrees(), "p = {p}");
        assert_eq!(r.solutions, r.family_pairs);
        assert_eq!(r.fibre_dimension, 1);
        assert_eq!(r.dim_z, 2);
    }
}

#[test]
fn invariant_conic_nodes_form_one_kernel_orbit() {
    for name in ["b61", "b73", "b97", "b193"] {
        let e = curve(name);
        let t = order_three_point(&e).unwrap();
        let r = case_one_invariant_conic(&e, &t, 7, &LabOptions::default()).unwrap();
        assert!(r.passes(), "{name}");
        let bases: Vec<CurvePoint> = r.singularities.singular_points().map(|d| d.base).collect();
        assert_eq!(bases.len(), 3);
        // differences of node bases lie in the kernel, so all map to one point
        let phi = &r.instance.isogeny;
        let images: BTreeSet<_> = bases.iter().map(|b| phi.map(b)).collect();
        assert_eq!(images.len(), 1, "{name}");
        for a in &bases {
            for b in &bases {
                assert!(phi.kernel.contains(&e.sub(a, b)), "{name}");
            }
        }
    }
}

#[test]
fn too_small_field_is_reported() {
    let e = curve("b37");
    let t = order_three_point(&e).unwrap();
    let err = case_one_invariant_conic(&e, &t, 7, &LabOptions::default()).unwrap_err();
    assert!(matches!(err, Error::FieldTooSmall(_)), "{err}");
}
