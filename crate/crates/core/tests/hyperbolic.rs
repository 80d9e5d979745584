use alk_core::hyperbolic::{self, Motion, RatMotion, RealMotion, UHPoint};
use alk_core::numutil::{self, Rational};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn pt(xn: i64, xd: i64, yn: i64, yd: i64) -> UHPoint {
    UHPoint::new(numutil::rat(xn, xd), numutil::rat(yn, yd)).unwrap()
}

/// Integral `SL_2(Z)` element from a short word in `T^k` and `S`.
fn integral_motion(word: &[i64]) -> RatMotion {
    let r = |v: i64| Rational::from_integer(BigInt::from(v));
    let mut g = RatMotion::identity();
    for &k in word {
        let t = Motion::new(r(1), r(k), r(0), r(1));
        let s = Motion::new(r(0), r(-1), r(1), r(0));
        g = g.compose(&t).compose(&s);
    }
    g
}

/// Arc-length integral of `|dz| / Im z` along the geodesic through two points,
/// computed as the integral over the circle (or vertical line) joining them.
fn numeric_distance(z: Complex<f64>, w: Complex<f64>) -> f64 {
    if (z.re - w.re).abs() < 1e-15 {
        return (w.im / z.im).ln().abs();
    }
    // centre on the real axis equidistant from z and w
    let c = (w.norm_sqr() - z.norm_sqr()) / (2.0 * (w.re - z.re));
    let rad = (z - c).norm();
    let t0 = (z.im).atan2(z.re - c);
    let t1 = (w.im).atan2(w.re - c);
    let steps = 200_000;
    let h = (t1 - t0) / steps as f64;
    let mut acc = 0.0;
    for k in 0..steps {
        let t = t0 + (k as f64 + 0.5) * h;
        acc += rad * h.abs() / (rad * t.sin());
    }
    acc
}

#[test]
fn point_pair_matches_numeric_distance() {
    let cases = [(pt(0, 1, 1, 1), pt(1, 1, 1, 1)), (pt(0, 1, 1, 1), pt(0, 1, 2, 1)), (pt(-1, 3, 1, 2), pt(2, 5, 3, 1))];
    for (z, w) in cases {
        let d = numeric_distance(z.to_c64(), w.to_c64());
        assert!((d - hyperbolic::hyp_dist(&z, &w)).abs() < 1e-8, "{d}");
    }
    assert_eq!(hyperbolic::point_pair_u(&pt(0, 1, 1, 1), &pt(1, 1, 1, 1)), numutil::rat(1, 4));
}

#[test]
fn cayley_matches_explicit_conjugation() {
    // phi(z) = (z - i)/(z + i) has matrix (1 -i; 1 i); conjugate and read off (conj F, conj E; E, F).
    let g: RealMotion = Motion::new(2.0, 3.0, 1.0, 2.0);
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let mul = |x: [Complex<f64>; 4], y: [Complex<f64>; 4]| {
        [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
    };
    let phi = [one, -i, one, i];
    let det = phi[0] * phi[3] - phi[1] * phi[2];
    let phi_inv = [phi[3] / det, -phi[1] / det, -phi[2] / det, phi[0] / det];
    let gm = [g.a, g.b, g.c, g.d].map(|v| Complex::new(v, 0.0));
    let m = mul(mul(phi, gm), phi_inv);
    let dm = hyperbolic::cayley_motion(&g);
    assert!((m[2] - dm.e).norm() < 1e-12);
    assert!((m[3] - dm.f).norm() < 1e-12);
    assert!((m[0] - dm.f.conj()).norm() < 1e-12);
}

#[test]
fn dirichlet_membership_examples() {
    let ball = hyperbolic::integer_ball(200);
    let w = pt(0, 1, 2, 1);
    assert!(hyperbolic::dirichlet_member(&w, &w, &ball).unwrap());
    assert!(!hyperbolic::dirichlet_member(&pt(10, 1, 2, 1), &w, &ball).unwrap());
    assert!(hyperbolic::dirichlet_member(&pt(0, 1, 21, 10), &w, &ball).unwrap());
    assert!(hyperbolic::dirichlet_member(&w, &w, &[]).is_err());
}

#[test]
fn radius_bound_at_log_three() {
    let b = hyperbolic::radius_to_norm_bound(3f64.ln());
    assert!((b - (64.0 / 9.0 + 2.0)).abs() < 1e-12);
}

fn word_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 0..6)
}

fn point_strategy() -> impl Strategy<Value = UHPoint> {
    (-50i64..50, 1i64..20, 1i64..50, 1i64..20).prop_map(|(a, b, c, d)| pt(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn u_is_isometry_invariant(word in word_strategy(), z in point_strategy(), w in point_strategy()) {
        let g = integral_motion(&word);
        let gz = hyperbolic::mobius_act(&g, &z).unwrap();
        let gw = hyperbolic::mobius_act(&g, &w).unwrap();
        prop_assert_eq!(hyperbolic::point_pair_u(&gz, &gw), hyperbolic::point_pair_u(&z, &w));
    }

    #[test]
    fn cosh_distance_identity(z in point_strategy(), w in point_strategy()) {
        let u = hyperbolic::point_pair_u(&z, &w).to_f64().unwrap();
        let d = hyperbolic::hyp_dist(&z, &w);
        prop_assert!((d.cosh() - (1.0 + 2.0 * u)).abs() <= 1e-12 * (1.0 + u));
    }

    #[test]
    fn distance_is_symmetric_and_triangular(a in point_strategy(), b in point_strategy(), c in point_strategy()) {
        let d = hyperbolic::hyp_dist;
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-12);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn disk_norm_is_frobenius(word in word_strategy()) {
        let g = integral_motion(&word);
        let m = hyperbolic::cayley_motion(&g);
        prop_assert!(m.determinant().is_one());
        prop_assert_eq!(hyperbolic::norm_from_disk(&m), g.frobenius_sq());
    }

    #[test]
    fn circle_centre_identity(word in word_strategy()) {
        let g = integral_motion(&word);
        let m = hyperbolic::cayley_motion(&g);
        if m.e.re.is_zero() && m.e.im.is_zero() {
            prop_assert!(hyperbolic::isometric_circle(&m).is_err());
        } else {
            let c = hyperbolic::isometric_circle(&m).unwrap();
            prop_assert_eq!(c.center.norm_sqr(), c.radius_sq + Rational::one());
        }
    }

    #[test]
    fn motion_u_matches_point_pair(word in word_strategy()) {
        let g = integral_motion(&word);
        let i = pt(0, 1, 1, 1);
        let gi = hyperbolic::mobius_act(&g, &i).unwrap();
        prop_assert_eq!(hyperbolic::motion_u(&g), hyperbolic::point_pair_u(&i, &gi));
    }

    #[test]
    fn meets_ball_agrees_with_norm_bound(word in word_strategy(), r in 0.05f64..4.0) {
        // A circle meeting the ball forces the norm bound; the converse may fail.
        let g = integral_motion(&word).to_real();
        let m = hyperbolic::cayley_motion(&g);
        if let Ok(c) = hyperbolic::isometric_circle(&m) {
            if c.meets_ball(r) {
                prop_assert!(hyperbolic::norm_from_disk(&m) <= hyperbolic::radius_to_norm_bound(r) * (1.0 + 1e-9));
            }
        }
    }
}
