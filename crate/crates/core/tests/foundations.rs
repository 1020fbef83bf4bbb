//! Property checks on the base layers, against oracles that do not share code
//! with the implementation: naive point enumeration, direct summation of
//! divisors through the group law, and the closed-form rank, degree and
//! determinant of symmetric powers.

use g2strata::bundle_calc::{sym_power, two_torsion_classes, BundleExpr};
use g2strata::field_curve::{registry, velu_3_isogeny, CurvePoint, EllipticCurve, Field};
use g2strata::picard::{class_of, h0_h1, Divisor, LineClass};
use g2strata::rr_spaces::rr_basis;
use proptest::prelude::*;

fn curves() -> Vec<EllipticCurve> {
    registry::builtin().into_iter().map(|c| c.curve).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sum of the divisor in the group, computed term by term.
fn abel_jacobi(e: &EllipticCurve, d: &Divisor) -> CurvePoint {
    d.terms().fold(CurvePoint::Infinity, |acc, (p, n)| {
        let mut acc = acc;
        for _ in 0..n.unsigned_abs() {
            acc = if *n > 0 { e.add(&acc, p) } else { e.sub(&acc, p) };
        }
        acc
    })
}

#[test]
fn point_count_matches_naive_enumeration() {
    for e in curves() {
        let f = &e.field;
        let p = f.characteristic() as i64;
        let mut naive = 1u64;
        for x in 0..p {
            for y in 0..p {
                let (xf, yf) = (f.from_i64(x), f.from_i64(y));
                if f.square(yf) == e.rhs(xf) {
                    naive += 1;
                }
            }
        }
        assert_eq!(e.count_points(), naive, "{}", e.spec());
        assert_eq!(e.points().len() as u64, naive);
        let hasse = (naive as i64 - p - 1).pow(2);
        assert!(hasse <= 4 * p);
    }
}

#[test]
fn group_law_axioms_hold_exhaustively_for_small_primes() {
    for e in curves().into_iter().filter(|e| e.field.characteristic() <= 101) {
        let pts = e.points();
        let o = CurvePoint::Infinity;
        for a in &pts {
            assert_eq!(e.add(a, &o), *a);
            assert!(e.add(a, &e.neg(a)).is_infinity());
            for b in &pts {
                let ab = e.add(a, b);
                assert!(e.contains(&ab));
                assert_eq!(ab, e.add(b, a));
                for c in &pts {
                    assert_eq!(e.add(&ab, c), e.add(a, &e.add(b, c)), "{} {a:?} {b:?} {c:?}", e.spec());
                }
            }
        }
    }
}

#[test]
fn point_orders_divide_the_group_order() {
    for e in curves() {
        let n = e.count_points();
        for p in e.points() {
            let k = e.order_of(&p);
            assert_eq!(n % k, 0);
            assert!(e.mul(&p, k as i64).is_infinity());
        }
    }
}

#[test]
fn riemann_roch_for_every_class_of_small_degree() {
    for e in curves() {
        for d in -8i64..=8 {
            for p in e.points() {
                let l = LineClass { deg: d, point: p };
                let (h0, h1) = h0_h1(&l);
                assert_eq!(h0 - h1, d);
                assert!(h0 >= 0 && h1 >= 0);
                if d != 0 {
                    assert_eq!(h0 * h1, 0);
                }
            }
        }
    }
}

#[test]
fn three_isogenies_are_homomorphisms_with_the_right_kernel() {
    for e in curves() {
        let Some(t) = e.points().into_iter().find(|p| e.order_of(p) == 3) else { continue };
        let phi = velu_3_isogeny(&e, &t).unwrap();
        let pts = e.points();
        assert_eq!(phi.codomain.count_points(), pts.len() as u64);
        for k in &phi.kernel {
            assert!(phi.map(k).is_infinity());
        }
        for a in pts.iter().step_by(3) {
            assert!(phi.codomain.contains(&phi.map(a)));
            for b in pts.iter().step_by(5) {
                assert_eq!(phi.map(&e.add(a, b)), phi.codomain.add(&phi.map(a), &phi.map(b)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_field_axioms(p_idx in 0usize..5, a in 0i64..100_000, b in 0i64..100_000, c in 0i64..100_000) {
        let f = curves()[p_idx].field;
        let (a, b, c) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        if let Some(inv) = f.inv(a) {
            prop_assert_eq!(f.mul(a, inv), f.one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn quadratic_extension_axioms(p in prop::sample::select(vec![37u32, 61, 73, 97, 193]), seed in any::<u64>()) {
        use rand::SeedableRng;
        let f = Field::extension_of_degree(p, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (f.random_nonzero(&mut rng), f.random(&mut rng));
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        prop_assert_eq!(f.pow(a, f.order() - 1), f.one());
        // Frobenius is additive and multiplicative
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        let sq = f.square(b);
        let r = f.sqrt(sq).unwrap();
        prop_assert_eq!(f.square(r), sq);
    }

    #[test]
    fn rr_dimension_and_abel_jacobi(
        ci in 0usize..5,
        picks in prop::collection::vec((0usize..400, -3i64..4), 1..5),
    ) {
        let e = curves()[ci];
        let pts = e.points();
        let d = Divisor::from_terms(picks.iter().map(|&(i, n)| (pts[i % pts.len()], n)));
        prop_assume!(d.degree().abs() <= 8);
        let expected = match d.degree() {
            n if n < 0 => 0,
            0 => i64::from(abel_jacobi(&e, &d).is_infinity()),
            n => n,
        };
        prop_assert_eq!(h0_h1(&class_of(&e, &d)).0, expected);
        match rr_basis(&e, &d) {
            Ok(basis) => prop_assert_eq!(basis.len() as i64, expected),
            Err(_) => prop_assert!(d.degree() < 0),
        }
        prop_assert_eq!(class_of(&e, &d).is_trivial(), d.degree() == 0 && abel_jacobi(&e, &d).is_infinity());
    }

    #[test]
    fn symmetric_square_of_f2_and_of_indecomposables(ci in 0usize..5, pi in 0usize..400, twist_deg in -3i64..4, ti in 0usize..400) {
        let e = curves()[ci];
        let pts = e.points();
        let x = pts[pi % pts.len()];
        let twist = LineClass { deg: twist_deg, point: pts[ti % pts.len()] };

        let f2 = BundleExpr::f(2, LineClass::trivial());
        prop_assert_eq!(sym_power(&e, &f2, 2).unwrap(), BundleExpr::f(3, LineClass::trivial()));

        // S^2 of a rank-2 indecomposable of odd degree
        let w = BundleExpr::e_at(2, x);
        let s2 = sym_power(&e, &w, 2).unwrap();
        let lx = LineClass::of_point(x);
        let lines = two_torsion_classes(&e).unwrap().map(|l| l.tensor(&e, &lx));
        prop_assert_eq!(&s2, &BundleExpr::lines(lines));
        prop_assert_eq!(s2.rank(), 3);
        prop_assert_eq!(s2.deg(), 3);
        prop_assert_eq!(s2.det(&e), lx.pow(&e, 3));
        // cohomology is additive over the summands
        let (h0, h1) = s2.cohomology(&e, &twist).unwrap();
        let sum = lines.iter().map(|l| h0_h1(&l.tensor(&e, &twist))).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        prop_assert_eq!((h0, h1), sum);

        let s3 = sym_power(&e, &w, 3).unwrap();
        let wx = w.tensor_line(&e, &lx);
        prop_assert_eq!(&s3, &wx.direct_sum(&wx));
        prop_assert_eq!(s3.rank(), 4);
        prop_assert_eq!(s3.deg(), 6);
        prop_assert_eq!(s3.det(&e), lx.pow(&e, 6));
        let (h0, h1) = s3.cohomology(&e, &twist).unwrap();
        let half = wx.cohomology(&e, &twist).unwrap();
        prop_assert_eq!((h0, h1), (2 * half.0, 2 * half.1));
    }

    #[test]
    fn symmetric_powers_of_line_sums(
        ci in 0usize..5,
        summands in prop::collection::vec((-3i64..4, 0usize..400), 1..4),
        k in 1u32..4,
    ) {
        let e = curves()[ci];
        let pts = e.points();
        let ls: Vec<LineClass> = summands.iter().map(|&(d, i)| LineClass { deg: d, point: pts[i % pts.len()] }).collect();
        let v = BundleExpr::lines(ls.clone());
        let s = sym_power(&e, &v, k).unwrap();
        let r = ls.len() as u64;
        prop_assert_eq!(s.rank(), binomial(r + k as u64 - 1, k as u64));
        let exponent = binomial(r + k as u64 - 1, r) as i64;
        prop_assert_eq!(s.deg(), v.deg() * exponent);
        prop_assert_eq!(s.det(&e), v.det(&e).pow(&e, exponent));
        prop_assert!(s.is_sum_of_lines());
    }
}
