//! The first ten critical-line zeros against published ordinates, sign
//! structure of the Hardy Z function between them, and the modulus identity
//! tying Z to the zeta engine.

use hzeta::ball::RealBall;
use hzeta::bigfloat::BigFloat;
use hzeta::complex::ComplexBall;
use hzeta::zero::{hardy_z, refine_zero, IsolatingInterval};
use hzeta::zeta::hurwitz_value;
use num_bigint::BigInt;

/// Leading digits of the ordinates of the first ten zeros.
const ORDINATES: [&str; 10] = [
    "14.13472514173",
    "21.02203963877",
    "25.01085758014",
    "30.42487612585",
    "32.93506158773",
    "37.58617815882",
    "40.91871901214",
    "43.32707328091",
    "48.00515088116",
    "49.77383247767",
];

fn dec_ball(dec: &str, prec: u32) -> RealBall {
    let (int, frac) = dec.split_once('.').unwrap_or((dec, ""));
    let p: BigInt = format!("{int}{frac}").parse().unwrap();
    let q = BigInt::from(10).pow(frac.len() as u32);
    RealBall::from_bigint_ratio(&p, &q, prec)
}

#[test]
fn first_ten_zeros_match_published_ordinates() {
    let mut prev = RealBall::zero();
    for (i, lit) in ORDINATES.iter().enumerate() {
        let g: f64 = lit.parse().unwrap();
        let iv = IsolatingInterval::new(BigFloat::from_f64(g - 0.05), BigFloat::from_f64(g + 0.05));
        let root = refine_zero(&iv, 128, 1).unwrap();
        let reference = dec_ball(lit, 160).add_error(&BigFloat::from_f64(1e-11));
        assert!(root.sub(&reference, 160).contains_zero(), "zero {}", i + 1);
        assert!(
            root.rad().cmp_value(&BigFloat::pow2(-120)) == Some(std::cmp::Ordering::Less),
            "zero {} too wide",
            i + 1
        );
        assert!(root.sub(&prev, 160).is_positive(), "ordering at zero {}", i + 1);
        prev = root;
    }
}

#[test]
fn z_sign_alternates_between_consecutive_zeros() {
    // Z(0) = zeta(1/2) < 0 and every zero below 52 is simple, so the sign
    // on the k-th gap is (-1)^(k+1).
    let sample = [10.0f64, 18.0, 23.0, 28.0, 31.5, 35.0, 39.0, 42.0, 45.0, 49.0, 51.0];
    for (k, t) in sample.iter().enumerate() {
        let z = hardy_z(&RealBall::exact(BigFloat::from_f64(*t)), 96, 1).unwrap();
        let expect_negative = k % 2 == 0;
        assert_eq!(z.is_negative(), expect_negative, "t = {t}");
        assert_eq!(z.is_positive(), !expect_negative, "t = {t}");
    }
}

#[test]
fn z_modulus_matches_zeta_on_the_critical_line() {
    // |Z(t)| = |zeta(1/2 + it)|: Z as computed is 2 Re(e^(i theta) zeta
    // rotated), so a wrong phase function would break this identity.
    for t in [7i64, 13, 26, 33, 47, 58] {
        let tb = RealBall::from_i64(t);
        let z = hardy_z(&tb, 128, 1).unwrap();
        let s = ComplexBall::new(RealBall::from_ratio(1, 2, 128), tb);
        let v = hurwitz_value(&s, &ComplexBall::one(), 128).unwrap();
        let d = z.sqr(160).sub(&v.abs_sq(160), 160);
        assert!(d.contains_zero(), "t = {t}");
    }
}
