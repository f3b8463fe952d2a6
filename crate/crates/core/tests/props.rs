//! Property-based invariants of the geometric kernel.

use proptest::prelude::*;

use wcl::contact::{
    alpha_eval, contact_vector_field, dalpha_eval, ClosureField, ContactPoint, TangentVector,
};
use wcl::push::EscapeProfile;
use wcl::util::fmt_f64;
use wcl::verifier::VerificationReport;
use wcl::wrinkle::{front_family, front_static, lift_family, u_from_y1, u_from_y2, ParamPoint};

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn tangent2() -> impl Strategy<Value = TangentVector> {
    (coord(), coord(), coord(), coord(), coord()).prop_map(|(a, b, c, d, e)| TangentVector {
        dx: vec![a, b],
        dy: vec![c, d],
        dz: e,
    })
}

fn point2() -> impl Strategy<Value = ContactPoint> {
    (coord(), coord(), coord(), coord(), coord())
        .prop_map(|(a, b, c, d, e)| ContactPoint::new(vec![a, b], vec![c, d], e).unwrap())
}

proptest! {
    #[test]
    fn dalpha_antisymmetric(w1 in tangent2(), w2 in tangent2()) {
        let ab = dalpha_eval(&w1, &w2).unwrap();
        let ba = dalpha_eval(&w2, &w1).unwrap();
        prop_assert!((ab + ba).abs() < 1e-12 * (1.0 + ab.abs()));
    }

    #[test]
    fn dalpha_bilinear(w1 in tangent2(), w2 in tangent2(), w3 in tangent2(), c in -3.0..3.0f64) {
        // dα(w1 + c·w3, w2) = dα(w1, w2) + c·dα(w3, w2).
        let sum = TangentVector {
            dx: w1.dx.iter().zip(&w3.dx).map(|(a, b)| a + c * b).collect(),
            dy: w1.dy.iter().zip(&w3.dy).map(|(a, b)| a + c * b).collect(),
            dz: w1.dz + c * w3.dz,
        };
        let lhs = dalpha_eval(&sum, &w2).unwrap();
        let rhs = dalpha_eval(&w1, &w2).unwrap() + c * dalpha_eval(&w3, &w2).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn contact_field_reproduces_hamiltonian(p in point2()) {
        // α(X_H) = H for a generic polynomial Hamiltonian.
        let h = ClosureField {
            f: |q: &ContactPoint| q.x[0] * q.y[1] - 0.5 * q.z * q.x[1] + q.y[0],
        };
        let x = contact_vector_field(&h, &p).unwrap();
        let a = alpha_eval(&p, &x).unwrap();
        let expect = p.x[0] * p.y[1] - 0.5 * p.z * p.x[1] + p.y[0];
        prop_assert!((a - expect).abs() < 1e-11 * (1.0 + expect.abs()));
    }

    #[test]
    fn legendrian_lift_kills_alpha(u in coord(), x2 in coord(), t in -1.0..1.0f64) {
        let p = lift_family(u, x2, t, 2);
        let [ru, rx] = wcl::wrinkle::jacobian(u, x2, t, 2);
        prop_assert!(alpha_eval(&p, &ru).unwrap().abs() < 1e-10);
        prop_assert!(alpha_eval(&p, &rx).unwrap().abs() < 1e-10);
    }

    #[test]
    fn family_front_matches_static_model(u in coord(), vnorm in 0.05..1.5f64, c in -1.0..1.0f64) {
        // t = 1 − c and x₂² = |v|² − c give the same profile w.
        prop_assume!(vnorm * vnorm - c > 1e-6);
        let x2 = (vnorm * vnorm - c).sqrt();
        let t = 1.0 - c;
        let fam = front_family(u, x2, t);
        let stat = front_static(&ParamPoint { u, v: vec![vnorm] });
        prop_assert!((fam[1] - stat[1]).abs() < 1e-9);
        prop_assert!((fam[0] - stat[2]).abs() < 1e-9);
    }

    #[test]
    fn u_inversions_recover(u in coord(), x2 in coord(), t in -1.0..1.0f64) {
        let p = lift_family(u, x2, t, 2);
        if u.abs() > 1e-4 {
            let rec = u_from_y1(p.y[0], x2, t, u >= 0.0).unwrap();
            prop_assert!((rec - u).abs() / u.abs().max(1.0) < 1e-8);
        }
        let w = t - x2 * x2;
        if (x2 * w).abs() > 1e-4 {
            let rec = u_from_y2(p.x[0], x2, p.y[1], t).unwrap();
            prop_assert!((rec - u).abs() / u.abs().max(1.0) < 1e-6);
        }
    }

    #[test]
    fn escape_profile_shape(t in -2.99..2.99f64, g_cap in 0.5..40.0f64) {
        let prof = EscapeProfile::new(1.0, g_cap).unwrap();
        let g = prof.g_eval(t).unwrap();
        prop_assert!((0.0..=g_cap).contains(&g));
        if t.abs() <= 1.0 {
            prop_assert!(g == g_cap);
        }
        if t.abs() >= 2.0 {
            prop_assert!(g == 0.0);
        }
        // Monotone on the ramps.
        if (1.0..1.99).contains(&t.abs()) {
            let further = prof.g_eval(t.signum() * (t.abs() + 0.01)).unwrap();
            prop_assert!(further <= g + 1e-12);
        }
    }

    #[test]
    fn report_floats_round_trip(res in any::<f64>(), tol in any::<f64>()) {
        prop_assume!(res.is_finite() && tol.is_finite());
        let mut rep = VerificationReport::new();
        rep.push(wcl::verifier::CheckEntry::residual_entry("prop", res, tol, 3, 1));
        let text = rep.serialize();
        let parsed = VerificationReport::parse(&text).unwrap();
        prop_assert_eq!(parsed.serialize(), text);
        let e = &parsed.entries[0];
        prop_assert!(e.residual == res || (e.residual.is_nan() && res.is_nan()));
        prop_assert!(e.tolerance == tol || (e.tolerance.is_nan() && tol.is_nan()));
    }

    #[test]
    fn fmt_f64_round_trips(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let s = fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back, x);
    }
}
