//! A built-in diagnostic suite exercising every subsystem end to end at
//! desk scale: enclosure quality of zeta values, certified zero refinement,
//! soundness of the truncation remainder bound against high-precision
//! references, functional identities, agreement of independently derived
//! evaluation strategies, coefficient tables, jets versus finite
//! differences, precision scaling, and determinism across worker counts.
//!
//! Each check reports pass/fail plus a one-line measurement summary, so a
//! failed run says what broke and by how much. `quick` trims sizes for a
//! seconds-scale smoke run; the full suite stays under a few minutes.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};

use crate::ball::RealBall;
use crate::bernoulli::bernoulli_balls;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;
use crate::constants::{euler_gamma, keiper_li, stieltjes};
use crate::elem::{log_ball, pi_ball};
use crate::error::Result;
use crate::fmt::{ball_to_hex, decimal_parts};
use crate::series::BallSeries;
use crate::zero::{hardy_z, refine_zero, IsolatingInterval};
use crate::zeta::power_sum::{power_sum_direct, power_sum_sieved, TermCtx};
use crate::zeta::tail::tail_binary_split;
use crate::zeta::{hurwitz_jet, hurwitz_value, zeta_value, EMParams, JetOptions};

/// Outcome of one diagnostic check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Measured figures: radii, accurate bits, counts, timings.
    pub detail: String,
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|c| c.passed)
}

/// Runs the whole suite; never panics on a failing check, the failure is
/// reported in the outcome. `workers` threads the power-sum stage of the
/// heavier checks; the determinism check always compares 1 against 4.
pub fn run_selftest(quick: bool, workers: usize) -> Vec<CheckOutcome> {
    let checks: [(&'static str, CheckFn); 10] = [
        ("zeta2-enclosure", check_zeta2),
        ("zero1-refinement", check_zero1),
        ("remainder-soundness", check_remainder),
        ("hurwitz-identities", check_identities),
        ("stage-oracles", check_stage_oracles),
        ("keiper-li-table", check_keiper_li),
        ("stieltjes-table", check_stieltjes),
        ("jet-derivatives", check_jets),
        ("precision-scaling", check_scaling),
        ("worker-determinism", check_determinism),
    ];
    let mut out = Vec::with_capacity(checks.len());
    for (name, f) in checks {
        let start = Instant::now();
        let (passed, detail) = match f(quick, workers) {
            Ok((p, d)) => (p, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let dt = start.elapsed().as_secs_f64();
        out.push(CheckOutcome {
            name,
            passed,
            detail: format!("{detail} [{dt:.2}s]"),
        });
    }
    out
}

type CheckFn = fn(bool, usize) -> Result<(bool, String)>;

/// Deterministic splitmix64; the suite must behave identically everywhere.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    /// Uniform dyadic-denominator rational in [lo/den, hi/den].
    fn ratio(&mut self, lo: i64, hi: i64, den: i64, prec: u32) -> RealBall {
        let k = lo + self.below((hi - lo + 1) as u64) as i64;
        RealBall::from_ratio(k, den, prec)
    }
}

fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

/// Certified accurate bits: msb(mid) - msb(rad), saturating for exact balls.
fn accurate_bits(x: &RealBall) -> i64 {
    match (x.mid().msb_exp(), x.rad().msb_exp()) {
        (_, None) => i64::MAX / 2,
        (Some(m), Some(r)) => m - r,
        (None, Some(r)) => -r,
    }
}

/// True when rad(x) * 10^digits <= 1.
fn rad_below_pow10(x: &RealBall, digits: u32) -> bool {
    let scale = BigFloat::from_biguint(BigUint::from(10u32).pow(digits));
    let t = x.rad().mul(&scale, 64, Rounding::Up).0;
    t.cmp_value(&BigFloat::one()) != Some(std::cmp::Ordering::Greater)
}

/// Exact rational ball for a decimal literal.
fn dec_ball(dec: &str, prec: u32) -> RealBall {
    let neg = dec.starts_with('-');
    let t = dec.trim_start_matches('-');
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let p: BigInt = format!("{int}{frac}").parse().unwrap();
    let p = if neg { -p } else { p };
    let q = BigInt::from(10).pow(frac.len() as u32);
    RealBall::from_bigint_ratio(&p, &q, prec)
}

fn overlaps(x: &ComplexBall, y: &ComplexBall, prec: u32) -> bool {
    x.sub(y, prec).contains_zero()
}

fn check_zeta2(quick: bool, _workers: usize) -> Result<(bool, String)> {
    let digits = if quick { 120 } else { 1000 };
    let prec = bits_for_digits(digits) + 30;
    let z = hurwitz_value(&ComplexBall::from_i64(2, 0), &ComplexBall::one(), prec)?;
    let p = pi_ball(prec + 40);
    let oracle = p.sqr(prec + 40).div_u64(6, prec + 40);
    let ok = z.re.contains(&oracle) && z.im.contains_zero() && rad_below_pow10(&z.re, digits - 10);
    Ok((ok, format!("{digits} digits, rad 2^{}", z.re.rad().msb_exp().unwrap_or(i64::MIN))))
}

fn check_zero1(quick: bool, workers: usize) -> Result<(bool, String)> {
    let digits = if quick { 150 } else { 1000 };
    let prec = bits_for_digits(digits) + 2;
    let iv = IsolatingInterval::new(BigFloat::from_f64(14.10), BigFloat::from_f64(14.17));
    let root = refine_zero(&iv, prec, workers)?;
    let prefix_ok = decimal_parts(&root, 12).0 == "14.1347251417";
    let z = hardy_z(&root, 128, workers)?;
    let ok = prefix_ok && rad_below_pow10(&root, digits) && z.contains_zero();
    Ok((ok, format!("{digits} digits, rad 2^{}", root.rad().msb_exp().unwrap_or(i64::MIN))))
}

fn check_remainder(quick: bool, _workers: usize) -> Result<(bool, String)> {
    let trials = if quick { 8 } else { 40 };
    let mut rng = Rng(0x5eed_0003);
    let mut violations = 0usize;
    let mut coeffs_checked = 0usize;
    for _ in 0..trials {
        let sigma = rng.ratio(-16, 32, 8, 96);
        let tau = rng.ratio(-120, 120, 8, 96);
        if sigma.mid() == &BigFloat::one() && tau.mid().is_zero() {
            continue;
        }
        let s = ComplexBall::new(sigma, tau);
        let a = ComplexBall::new(rng.ratio(1, 32, 8, 96), rng.ratio(-16, 16, 8, 96));
        let d = 1 + rng.below(4) as usize;
        let force = EMParams { n: 6 + rng.below(43), m: 3 + rng.below(22), attained: true };
        let out = hurwitz_jet(&s, &a, d, 96, false, &JetOptions { workers: 1, force: Some(force) })?;
        let reference = hurwitz_jet(&s, &a, d, 384, false, &JetOptions::default())?;
        for k in 0..d {
            // |reference - raw| encloses the true truncation error, so its
            // lower end must sit at or below the claimed bound.
            let diff = reference.jet.coeff(k).sub(&out.raw.coeff(k), 384);
            let err_lo = diff.abs_sq(384).sqrt(384).lo(64);
            if err_lo.cmp_value(&out.remainder.upper(k)) == Some(std::cmp::Ordering::Greater) {
                violations += 1;
            }
            coeffs_checked += 1;
        }
    }
    Ok((violations == 0, format!("{coeffs_checked} coefficients, {violations} violations")))
}

fn check_identities(quick: bool, _workers: usize) -> Result<(bool, String)> {
    let trials = if quick { 10 } else { 50 };
    let prec = 300;
    let mut rng = Rng(0x5eed_0004);
    let mut failures = 0usize;
    let two = ComplexBall::from_i64(2, 0);
    let half = ComplexBall::from_real(RealBall::from_ratio(1, 2, prec));
    for _ in 0..trials {
        let sigma = rng.ratio(-48, 64, 16, prec);
        let tau = rng.ratio(-400, 400, 16, prec);
        if sigma.mid() == &BigFloat::one() && tau.mid().is_zero() {
            continue;
        }
        let s = ComplexBall::new(sigma, tau);
        let two_s = two.pow(&s, prec);

        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let lhs = hurwitz_value(&s, &half, prec)?;
        let rhs = two_s.sub(&ComplexBall::one(), prec).mul(&zeta_value(&s, prec)?, prec);
        if !overlaps(&lhs, &rhs, prec) {
            failures += 1;
        }

        // zeta(s, a/2) + zeta(s, (a+1)/2) = 2^s zeta(s, a)
        let a = ComplexBall::new(rng.ratio(1, 64, 16, prec), rng.ratio(-32, 32, 16, prec));
        let a1 = a.add(&ComplexBall::one(), prec);
        let lhs2 = hurwitz_value(&s, &a.mul_2exp(-1), prec)?
            .add(&hurwitz_value(&s, &a1.mul_2exp(-1), prec)?, prec);
        let rhs2 = two_s.mul(&hurwitz_value(&s, &a, prec)?, prec);
        if !overlaps(&lhs2, &rhs2, prec) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{trials} samples x 2 identities, {failures} failures")))
}

/// Term-by-term evaluation of the Bernoulli tail, kept as an independent
/// reference for the balanced-split version.
fn iterative_tail(s: &ComplexBall, a: &ComplexBall, params: &EMParams, d: usize, prec: u32) -> BallSeries {
    let apn = a.add(&ComplexBall::from_i64(params.n as i64, 0), prec);
    let pref = TermCtx::new(s, d, prec).jet(&apn, None);
    let half = ComplexBall::from_real(RealBall::exact(BigFloat::pow2(-1)));
    let inv_apn2 = apn.sqr(prec).recip(prec);
    let bern = bernoulli_balls(2 * params.m as usize, prec);
    let mut rising = BallSeries::from_coeffs(vec![s.clone(), ComplexBall::one()]).resize(d);
    let mut scale = apn.recip(prec);
    let mut fact = BigUint::from(2u32);
    let mut sum = BallSeries::zero(d);
    for j in 1..=params.m {
        if j > 1 {
            let s0 = s.add(&ComplexBall::from_i64(2 * j as i64 - 3, 0), prec);
            let s1 = s.add(&ComplexBall::from_i64(2 * j as i64 - 2, 0), prec);
            rising = rising
                .mul(&BallSeries::from_coeffs(vec![s0, ComplexBall::one()]).resize(d), d, prec)
                .mul(&BallSeries::from_coeffs(vec![s1, ComplexBall::one()]).resize(d), d, prec);
            scale = scale.mul(&inv_apn2, prec);
            fact *= BigUint::from(2 * j - 1) * BigUint::from(2 * j);
        }
        let w = RealBall::one().div(&RealBall::exact(BigFloat::from_biguint(fact.clone())), prec);
        let term = rising
            .mul_real(&bern[2 * j as usize], prec)
            .mul_real(&w, prec)
            .mul_scalar(&scale, prec);
        sum = sum.add(&term, prec);
    }
    pref.mul(&sum.add(&BallSeries::constant(half, d), prec), d, prec)
}

fn radius_ratio_ok(x: &ComplexBall, y: &ComplexBall) -> bool {
    let parts = [
        (x.re.rad().to_f64(), y.re.rad().to_f64()),
        (x.im.rad().to_f64(), y.im.rad().to_f64()),
    ];
    parts.iter().all(|&(a, b)| {
        let (a, b) = (a.max(1e-300), b.max(1e-300));
        a / b <= 1024.0 && b / a <= 1024.0
    })
}

fn check_stage_oracles(quick: bool, workers: usize) -> Result<(bool, String)> {
    let mut rng = Rng(0x5eed_0005);
    let mut failures = 0usize;

    // Sieved multiplicative power sum against direct summation.
    let n = if quick { 2000 } else { 10_000 };
    let s_trials = if quick { 5 } else { 20 };
    for _ in 0..s_trials {
        let s = ComplexBall::new(rng.ratio(4, 24, 8, 128), rng.ratio(0, 240, 8, 128));
        let d = 1 + rng.below(4) as usize;
        let sieved = power_sum_sieved(&s, n, d, 128);
        let direct = power_sum_direct(&s, &ComplexBall::one(), n, d, 128, workers);
        for k in 0..d {
            let (cs, cd) = (sieved.coeff(k), direct.coeff(k));
            if !overlaps(&cs, &cd, 160) || !radius_ratio_ok(&cs, &cd) {
                failures += 1;
            }
        }
    }

    // Balanced-split Bernoulli tail against the term-by-term recurrence.
    let t_trials = if quick { 4 } else { 12 };
    for _ in 0..t_trials {
        let s = ComplexBall::new(rng.ratio(-16, 32, 8, 192), rng.ratio(-80, 80, 8, 192));
        let a = ComplexBall::new(rng.ratio(1, 24, 8, 192), rng.ratio(-8, 8, 8, 192));
        let params = EMParams { n: 10 + rng.below(20), m: 1 + rng.below(64), attained: true };
        let d = 1 + rng.below(8) as usize;
        let split = tail_binary_split(&s, &a, &params, d, 192);
        let iter = iterative_tail(&s, &a, &params, d, 192);
        for k in 0..d {
            let (cs, ci) = (split.coeff(k), iter.coeff(k));
            if !overlaps(&cs, &ci, 224) || !radius_ratio_ok(&cs, &ci) {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("power sum N={n}, tail M<=64, {failures} failures")))
}

fn check_keiper_li(quick: bool, workers: usize) -> Result<(bool, String)> {
    let n = if quick { 128 } else { 1000 };
    let t = keiper_li(n, None, workers)?;
    let v = t.real_values().expect("real table");
    let all_pos = v.iter().skip(1).all(|x| x.is_positive());
    let p = t.working_prec;
    let gamma = euler_gamma(p)?;
    let ln_4pi = log_ball(&pi_ball(p).mul_2exp(2), p);
    let lam1 = RealBall::one().add(&gamma.mul_2exp(-1), p).sub(&ln_4pi.mul_2exp(-1), p);
    let lam1_ok = v[1].sub(&lam1, p).contains_zero();
    let acc = accurate_bits(&v[n]);
    let acc_ok = acc >= (n as i64) / 20;
    let ok = all_pos && t.undetermined.is_empty() && lam1_ok && v[0].contains_zero() && acc_ok;
    Ok((ok, format!("n={n}, lambda_n accurate to {acc} bits, {} undetermined", t.undetermined.len())))
}

fn check_stieltjes(quick: bool, workers: usize) -> Result<(bool, String)> {
    let n = if quick { 32 } else { 100 };
    let t = stieltjes(n, &ComplexBall::one(), 64, workers)?;
    let v = t.complex_values().expect("complex table");
    let g0 = dec_ball("0.57721566490153286060651209008240243", 192)
        .add_error(&BigFloat::from_f64(1e-34));
    let g1 = dec_ball("-0.0728158", 192).add_error(&BigFloat::from_f64(5e-8));
    let g0_ok = v[0].re.sub(&g0, 192).contains_zero() && accurate_bits(&v[0].re) >= 64;
    let g1_ok = v[1].re.sub(&g1, 192).contains_zero();
    let real_ok = v.iter().all(|z| z.im.contains_zero());
    let acc_n = accurate_bits(&v[n].re);

    // Shift identity: gamma_k(a) - gamma_k(a+1) = (log a)^k / a at a = 3/2.
    let p = 128;
    let a = ComplexBall::from_real(RealBall::from_ratio(3, 2, p));
    let a1 = ComplexBall::from_real(RealBall::from_ratio(5, 2, p));
    let ta = stieltjes(6, &a, p, workers)?;
    let tb = stieltjes(6, &a1, p, workers)?;
    let (va, vb) = (ta.complex_values().unwrap(), tb.complex_values().unwrap());
    let ln_a = log_ball(&RealBall::from_ratio(3, 2, p), p);
    let mut pow = RealBall::one();
    let mut shift_ok = true;
    for k in 0..=6 {
        let want = pow.div(&RealBall::from_ratio(3, 2, p), p);
        let got = va[k].sub(&vb[k], p);
        shift_ok &= got.re.sub(&want, p).contains_zero() && got.im.contains_zero();
        pow = pow.mul(&ln_a, p);
    }
    let ok = g0_ok && g1_ok && real_ok && shift_ok && acc_n >= 64;
    Ok((ok, format!("n={n}, gamma_n accurate to {acc_n} bits, shift identity {}", if shift_ok { "ok" } else { "failed" })))
}

fn check_jets(quick: bool, _workers: usize) -> Result<(bool, String)> {
    let trials = if quick { 8 } else { 30 };
    let prec = 160;
    let mut rng = Rng(0x5eed_0008);
    let h = BigFloat::pow2(-40);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let sigma = rng.ratio(-16, 24, 8, prec);
        let tau = rng.ratio(-80, 80, 8, prec);
        if sigma.mid().sub(&BigFloat::one(), 32, Rounding::Nearest).0.msb_exp().unwrap_or(i64::MIN) < -2
            && tau.mid().msb_exp().unwrap_or(i64::MIN) < -2
        {
            continue; // too close to the pole for the centered difference
        }
        let s = ComplexBall::new(sigma, tau);
        let a = ComplexBall::new(rng.ratio(1, 32, 8, prec), rng.ratio(-16, 16, 8, prec));
        let jet = hurwitz_jet(&s, &a, 2, prec, false, &JetOptions::default())?.jet;
        let c1 = jet.coeff(1);

        let sp = ComplexBall::new(s.re.add(&RealBall::exact(h.clone()), prec), s.im.clone());
        let sm = ComplexBall::new(s.re.sub(&RealBall::exact(h.clone()), prec), s.im.clone());
        let fd = hurwitz_value(&sp, &a, prec)?
            .sub(&hurwitz_value(&sm, &a, prec)?, prec)
            .mul_2exp(39); // divide by 2h = 2^-39
        let dev = fd.sub(&c1, prec).upper_abs().to_f64();
        let scale = c1.lower_abs().to_f64().max(1e-290);
        worst = worst.max(dev / scale);
    }
    Ok((worst <= 1e-6, format!("{trials} samples, worst relative deviation {worst:.2e}")))
}

fn check_scaling(_quick: bool, _workers: usize) -> Result<(bool, String)> {
    let s = ComplexBall::new(RealBall::from_ratio(1, 2, 64), RealBall::from_i64(14));
    let mut times = Vec::new();
    for digits in [100u32, 200, 400, 800] {
        let prec = bits_for_digits(digits) + 10;
        let mut best = f64::MAX;
        for _ in 0..3 {
            let t0 = Instant::now();
            let v = hurwitz_value(&s, &ComplexBall::one(), prec)?;
            best = best.min(t0.elapsed().as_secs_f64());
            if !rad_below_pow10(&v.re, digits - 5) {
                return Ok((false, format!("{digits}-digit result too wide")));
            }
        }
        times.push(best);
    }
    let ok = times.windows(2).all(|w| w[1] <= 8.0 * w[0].max(0.002));
    let shown: Vec<String> = times.iter().map(|t| format!("{:.0}ms", t * 1e3)).collect();
    Ok((ok, format!("100/200/400/800 digits: {}", shown.join("/"))))
}

fn check_determinism(quick: bool, _workers: usize) -> Result<(bool, String)> {
    // A power sum long enough to span many parallel blocks.
    let s = ComplexBall::new(RealBall::from_ratio(5, 2, 200), RealBall::from_i64(3));
    let a = ComplexBall::from_real(RealBall::from_ratio(3, 2, 200));
    let force = EMParams { n: 2000, m: 40, attained: true };
    let hex_of = |workers: usize| -> Result<String> {
        let out = hurwitz_jet(&s, &a, 3, 200, false, &JetOptions { workers, force: Some(force.clone()) })?;
        let mut acc = String::new();
        for c in out.jet.coeffs() {
            acc.push_str(&ball_to_hex(&c.re));
            acc.push(';');
            acc.push_str(&ball_to_hex(&c.im));
            acc.push('\n');
        }
        Ok(acc)
    };
    let jet_match = hex_of(1)? == hex_of(4)? && hex_of(1)? == hex_of(1)?;

    let n = if quick { 24 } else { 64 };
    let t1 = keiper_li(n, None, 1)?.to_csv(20);
    let t4 = keiper_li(n, None, 4)?.to_csv(20);
    let table_match = t1 == t4;
    Ok((jet_match && table_match, format!("jet bytes {}, table bytes {}",
        if jet_match { "identical" } else { "differ" },
        if table_match { "identical" } else { "differ" })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let outcomes = run_selftest(true, 2);
        for c in &outcomes {
            eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        assert_eq!(outcomes.len(), 10);
        assert!(all_passed(&outcomes));
    }
}
