use std::f64::consts::{PI, SQRT_2};

use star_steiner::analytic::{
    c_d_quadrature, c_d_recurrence, theorem3_envelope, uniform_constant, wallis_partial,
};

#[test]
fn c_d_increases_towards_sqrt2() {
    let mut prev = 0.0;
    for d in 1..=2000 {
        let c = uniform_constant(d).unwrap();
        assert!(c > prev, "d = {d}");
        assert!(c < SQRT_2, "d = {d}");
        if d >= 500 {
            assert!(SQRT_2 - c <= 1e-3, "d = {d}");
        }
        prev = c;
    }
}

#[test]
fn squeeze_between_wallis_products() {
    for d in 3..=50 {
        let c = uniform_constant(d).unwrap();
        let lo = (4.0 / PI * wallis_partial(d - 2).map_or(1.0, |w| w.w)).sqrt();
        let hi = (4.0 / PI * wallis_partial(d - 1).unwrap().w).sqrt();
        assert!(
            lo <= c * (1.0 + 1e-14) && c <= hi * (1.0 + 1e-14),
            "d = {d}: {lo} {c} {hi}"
        );
    }
}

#[test]
fn closed_form_envelope_contains_rho_upper() {
    for d in 4..=200 {
        let env = theorem3_envelope(d).unwrap();
        let c = uniform_constant(d).unwrap();
        let rho = star_steiner::analytic::rho_upper(c).unwrap();
        assert!(env.lower <= env.upper);
        assert!(env.contains(rho), "d = {d}: {rho} not in {env:?}");
        assert!(env.lower <= c, "d = {d}");
    }
}

#[test]
fn quadrature_tracks_recurrence_in_higher_dimensions() {
    for d in [40, 64, 100] {
        let r = c_d_recurrence(d).unwrap().value;
        let q = c_d_quadrature(d, 1e-13).unwrap().value;
        assert!((r - q).abs() <= 1e-9, "d = {d}");
    }
}
