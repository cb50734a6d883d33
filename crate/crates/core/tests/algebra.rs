//! Randomized sweeps over the exact layers: the Laurent ring operations, the
//! derivative, evaluation, and the rational string forms.

mod support;

use cohom1::laurent::LaurentPoly;
use cohom1::rational::{format_rational, parse_rational, rat, rat_int, to_f64};
use support::Rng;

fn random_poly(rng: &mut Rng) -> LaurentPoly {
    let n = rng.int_in(0, 5);
    LaurentPoly::from_terms((0..n).map(|_| {
        (
            rng.int_in(-4, 4),
            rat(rng.int_in(-9, 9), rng.int_in(1, 9)),
        )
    }))
}

#[test]
fn ring_axioms_hold_on_random_polynomials() {
    let mut rng = Rng::new(11);
    for _ in 0..300 {
        let a = random_poly(&mut rng);
        let b = random_poly(&mut rng);
        let c = random_poly(&mut rng);
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.sub(&a), LaurentPoly::zero());
        assert_eq!(a.add(&a.neg()), LaurentPoly::zero());
        assert_eq!(a.mul(&LaurentPoly::one()), a);
        assert_eq!(a.mul(&LaurentPoly::zero()), LaurentPoly::zero());
    }
}

#[test]
fn derivative_is_linear_and_satisfies_leibniz() {
    let mut rng = Rng::new(23);
    for _ in 0..300 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        assert_eq!(f.add(&g).ddx(), f.ddx().add(&g.ddx()));
        let product_rule = f.ddx().mul(&g).add(&f.mul(&g.ddx()));
        assert_eq!(f.mul(&g).ddx(), product_rule);
    }
    // constants die, x^-1 maps to -x^-2
    assert_eq!(LaurentPoly::constant(rat(7, 3)).ddx(), LaurentPoly::zero());
    assert_eq!(
        LaurentPoly::monomial(rat_int(1), -1).ddx(),
        LaurentPoly::monomial(rat_int(-1), -2)
    );
}

#[test]
fn evaluation_is_a_ring_homomorphism() {
    let mut rng = Rng::new(37);
    for _ in 0..200 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let x = rat(rng.int_in(1, 40) * if rng.int_in(0, 1) == 0 { 1 } else { -1 }, rng.int_in(1, 12));
        let fx = f.eval_rat(&x).unwrap();
        let gx = g.eval_rat(&x).unwrap();
        assert_eq!(f.add(&g).eval_rat(&x).unwrap(), &fx + &gx);
        assert_eq!(f.mul(&g).eval_rat(&x).unwrap(), &fx * &gx);
    }
}

#[test]
fn float_eval_tracks_exact_eval() {
    let mut rng = Rng::new(41);
    for _ in 0..200 {
        let f = random_poly(&mut rng);
        let xf = rng.uniform(0.2, 3.0);
        // snap to an exactly representable rational so both paths see one x
        let xr = rat((xf * 1024.0).round() as i64, 1024);
        let x = to_f64(&xr);
        let exact = to_f64(&f.eval_rat(&xr).unwrap());
        let float = f.eval_at(x).unwrap();
        assert!(
            (float - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
            "{float} vs {exact}"
        );
    }
}

#[test]
fn shift_matches_monomial_multiplication() {
    let mut rng = Rng::new(53);
    for _ in 0..200 {
        let f = random_poly(&mut rng);
        let k = rng.int_in(-3, 3);
        assert_eq!(f.shift(k), f.mul(&LaurentPoly::monomial(rat_int(1), k)));
        assert_eq!(f.shift(k).shift(-k), f);
    }
}

#[test]
fn pow_is_repeated_multiplication() {
    let mut rng = Rng::new(59);
    for _ in 0..100 {
        let f = random_poly(&mut rng);
        assert_eq!(f.pow(0), LaurentPoly::one());
        assert_eq!(f.pow(1), f);
        assert_eq!(f.pow(3), f.mul(&f).mul(&f));
    }
}

#[test]
fn rational_strings_round_trip() {
    let mut rng = Rng::new(61);
    for _ in 0..300 {
        let v = rat(rng.int_in(-400, 400), rng.int_in(1, 60));
        assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
    }
    // decimals convert exactly, never through a float
    assert_eq!(parse_rational("0.2").unwrap(), rat(1, 5));
    assert_eq!(parse_rational("-3.125").unwrap(), rat(-25, 8));
}
