//! Euler-Maclaurin evaluation of the Hurwitz zeta function and its
//! derivative jets.
//!
//! The value computed is the order-D jet of `zeta(s+x, a)` in the formal
//! variable x, i.e. the Taylor coefficients at the expansion point s, which
//! carry the derivatives with respect to s. The evaluation splits into
//!
//! ```text
//!   zeta(s+x, a) = S + I + T + R
//! ```
//!
//! where S is the finite power sum over a+k for k < N ([`power_sum`]), I is
//! the integral term `(a+N)^{1-s-x}/(s+x-1)` ([`prefix_integral`]), T is the
//! Bernoulli tail with M terms ([`tail`]), and R is the truncation remainder,
//! never computed but rigorously bounded coefficient by coefficient
//! ([`bound`]) and folded into the radii of the result.
//!
//! At the pole s = 1 the expansion of `zeta(s+x, a) - 1/x` is returned
//! instead: the integral term contributes `(a+N)^{-x}/x`, whose regular part
//! has coefficients `(-log(a+N))^{i+1}/(i+1)!`.
//!
//! Parameter selection ties M = N and grows N until an inexpensive estimate
//! of the remainder bound clears the accuracy target, then confirms the
//! choice with the rigorous bound at full jet order.

pub mod bound;
pub mod power_sum;
pub mod tail;

use crate::bigfloat::BigFloat;
use crate::complex::ComplexBall;
use crate::error::{Error, Result};
use crate::series::{BallSeries, RealSeries};
use std::cmp::Ordering;

use bound::{bound_context, remainder_bound, BOUND_PREC};
use power_sum::{exact_int_complex, log_of, power_sum_direct, power_sum_sieved};
use tail::tail_binary_split;

/// Euler-Maclaurin truncation parameters: N power-sum terms, M tail terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EMParams {
    pub n: u64,
    pub m: u64,
    /// False when the parameter search gave up before reaching the accuracy
    /// target; the enclosure is still valid, only wider than requested.
    pub attained: bool,
}

/// Evaluation options beyond the mathematical inputs.
#[derive(Clone, Debug, Default)]
pub struct JetOptions {
    /// Worker threads for the power sum; 0 and 1 both mean single-threaded.
    pub workers: usize,
    /// Skip parameter selection and use these (N, M) as given.
    pub force: Option<EMParams>,
}

/// A jet evaluation together with the pieces needed to audit it.
pub struct HurwitzOutput {
    /// Final enclosure: remainder bound folded in, rounded to the requested
    /// precision.
    pub jet: BallSeries,
    /// The truncated sum S + I + T at working precision, before the
    /// remainder bound is added. Its distance from the true jet is the
    /// actual truncation error.
    pub raw: BallSeries,
    /// Per-coefficient remainder bound for the parameters used.
    pub remainder: RealSeries,
    pub params: EMParams,
    /// Working precision the stages ran at.
    pub wp: u32,
}

pub(crate) fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Guard bits on top of the target precision: covers the accumulation of
/// N + 2 roundings and the jet order.
pub(crate) fn guard_bits(n: u64, d: usize) -> u32 {
    20 + ceil_log2(n + 2) + ceil_log2(d as u64)
}

fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Chooses (N, M) with M = N so that the remainder bound clears
/// `2^-(prec + guard)` relative to the expected result magnitude.
///
/// The search runs on a cheap floating-point estimate of the bound
/// (log-domain, so huge intermediate magnitudes cost nothing), probing the
/// first `min(d, 24)` coefficients: doubling until the estimate clears the
/// target, then bisecting to the smallest passing N. The returned choice is
/// confirmed against the rigorous bound at full jet order, doubling further
/// if the estimate was optimistic. `attained` reports whether the target was
/// met; the enclosure stays valid either way.
pub fn select_params(s: &ComplexBall, a: &ComplexBall, d: usize, prec: u32) -> EMParams {
    const CAP: u64 = 1 << 24;
    let d = d.max(1);
    let ln2 = std::f64::consts::LN_2;

    if !s.is_bounded() || !a.is_bounded() {
        return EMParams { n: 16, m: 16, attained: false };
    }

    let sigma = s.re.mid().to_f64();
    let tau = s.im.mid().to_f64();
    let alpha = a.re.mid().to_f64();
    let beta = a.im.mid().to_f64();
    let pole = exact_int_complex(s) == Some(1);

    // Expected result magnitude, as log2: the size of the integral term, or
    // of log(a+N) at the pole. Only shifts the accuracy target.
    let mag_log2 = |n: u64| -> f64 {
        let ax = alpha + n as f64;
        let r = f64::hypot(ax, beta).max(1e-300);
        if pole {
            f64::hypot(r.ln(), f64::atan2(beta, ax)).max(1.0).log2()
        } else {
            let arg = f64::atan2(beta, ax);
            let sm1 = f64::hypot(sigma - 1.0, tau).max(1e-300);
            ((1.0 - sigma) * r.ln() + tau * arg - sm1.ln()) / ln2
        }
    };

    // Smallest n with alpha + n > 1 and sigma + 2n > 1 over the whole balls.
    let lo_a = a.re.lo(64).to_f64();
    let lo_s = s.re.lo(64).to_f64();
    let need = ((1.0 - lo_a).floor() + 1.0).max(((1.0 - lo_s) / 2.0).floor() + 1.0);
    if !(need <= CAP as f64) {
        return EMParams { n: 16, m: 16, attained: false };
    }
    let mut n_min = (need.max(1.0)) as u64;
    while bound_context(s, a, n_min, n_min).is_none() && n_min < CAP {
        n_min += 1;
    }

    // Floating-point estimate of the rigorous per-coefficient bound.
    let probe = |n: u64| -> bool {
        let nf = n as f64;
        let big_a = alpha + nf;
        let big_b = sigma + 2.0 * nf;
        if !(big_a > 1.0 && big_b > 1.0) {
            return false;
        }
        let q = beta / big_a;
        let c = (0.5 * (1.0 + q * q).ln() + q.abs().atan()).min(0.5 * q * q + q.abs());
        let ln_k = (tau * q.atan()).max(0.0);
        let bm1 = big_b - 1.0;
        let ln_a = big_a.ln();
        let jd = bm1 * (c + ln_a);
        let ds = d.min(24);

        // ln of (K / k!) J_k.
        let mut r = vec![0.0f64; ds];
        let mut ln_l = 0.0;
        let mut ln_fact = 0.0;
        for (k, rk) in r.iter_mut().enumerate() {
            if k > 0 {
                let kf = k as f64;
                ln_l = logaddexp(ln_l + kf.ln(), kf * jd.ln());
                ln_fact += kf.ln();
            }
            let ln_j = ln_l - (k as f64 + 1.0) * bm1.ln() - bm1 * ln_a;
            *rk = ln_k + ln_j - ln_fact;
        }

        // ln of the rising-factorial majorant coefficients: elementary
        // symmetric sums of |s+i| over i < 2n. A zero factor (integer
        // sigma <= 0) enters as -inf and shifts the sums, as it should.
        let mut e = vec![f64::NEG_INFINITY; ds];
        e[0] = 0.0;
        for i in 0..(2 * n) {
            let v = f64::hypot(sigma + i as f64, tau);
            let ln_v = if v == 0.0 { f64::NEG_INFINITY } else { v.ln() };
            for j in (1..ds).rev() {
                e[j] = logaddexp(e[j] + ln_v, e[j - 1]);
            }
            e[0] += ln_v;
        }

        let ln_pref = 4.0f64.ln() - 2.0 * nf * (2.0 * std::f64::consts::PI).ln();
        let ln_target = ln2 * (mag_log2(n) - (prec as f64) - (guard_bits(n, d) as f64));
        for k in 0..ds {
            let mut acc = f64::NEG_INFINITY;
            for i in 0..=k {
                acc = logaddexp(acc, e[i] + r[k - i]);
            }
            if ln_pref + acc > ln_target {
                return false;
            }
        }
        true
    };

    let mut attained = true;
    let mut n = n_min;
    if !probe(n_min) {
        let mut lo = n_min;
        let mut hi = n_min.max(8) * 2;
        while !probe(hi) {
            lo = hi;
            if hi >= CAP {
                attained = false;
                break;
            }
            hi = (hi * 2).min(CAP);
        }
        if attained {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if probe(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        n = hi;
    }

    // Confirm against the rigorous bound at full jet order.
    let confirm = |n: u64| -> bool {
        let params = EMParams { n, m: n, attained: true };
        let rb = remainder_bound(s, a, &params, d, BOUND_PREC);
        let t_exp = mag_log2(n).floor() as i64 - (prec + guard_bits(n, d)) as i64;
        let target = BigFloat::pow2(t_exp);
        (0..d).all(|k| {
            rb.upper(k)
                .cmp_value(&target)
                .is_some_and(|o| o != Ordering::Greater)
        })
    };
    let mut ok = confirm(n);
    while !ok && n < CAP {
        n = (n * 2).min(CAP);
        ok = confirm(n);
    }
    EMParams { n, m: n, attained: attained && ok }
}

/// The integral term `I = (a+N)^{1-(s+x)} / (s+x-1) mod x^d`, or, with
/// `at_pole` (s = 1 exactly), the regular part of `(a+N)^{-x}/x`, whose
/// coefficients are `(-L)^{i+1}/(i+1)!` with `L = log(a+N)`.
pub fn prefix_integral(
    s: &ComplexBall,
    a: &ComplexBall,
    n: u64,
    d: usize,
    prec: u32,
    at_pole: bool,
) -> BallSeries {
    assert!(d >= 1 && n <= i64::MAX as u64);
    let apn = a.add(&ComplexBall::from_i64(n as i64, 0), prec);
    let l = log_of(&apn, prec);
    let neg_l = l.clone().neg();
    if at_pole {
        // e-jet of exp(-Lx) to order d+1, shifted down by one.
        let mut e = Vec::with_capacity(d + 1);
        e.push(ComplexBall::one());
        for i in 1..=d {
            let t = e[i - 1].mul(&neg_l, prec).div_u64(i as u64, prec);
            e.push(t);
        }
        return BallSeries::from_coeffs(e[1..].to_vec());
    }
    let one_minus_s = ComplexBall::one().sub(s, prec);
    let c0 = match exact_int_complex(&one_minus_s) {
        Some(k) if k.abs() <= 1 << 20 => apn.pow_i64(k, prec),
        _ => one_minus_s.mul(&l, prec).exp(prec),
    };
    let mut num = Vec::with_capacity(d);
    num.push(c0);
    for i in 1..d {
        let t = num[i - 1].mul(&neg_l, prec).div_u64(i as u64, prec);
        num.push(t);
    }
    let den = BallSeries::from_coeffs(vec![
        s.sub(&ComplexBall::one(), prec),
        ComplexBall::one(),
    ])
    .resize(d);
    BallSeries::from_coeffs(num).div(&den, d, prec)
}

fn validate(s: &ComplexBall, a: &ComplexBall, d: usize, prec: u32, at_pole: bool) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidInput("jet order must be at least 1".into()));
    }
    if !(2..=1 << 26).contains(&prec) {
        return Err(Error::InvalidInput(format!(
            "precision {prec} outside supported range [2, 2^26]"
        )));
    }
    if !a.re.is_positive() {
        return Err(Error::InvalidInput(
            "Re(a) must be strictly positive over the whole input ball".into(),
        ));
    }
    if at_pole && exact_int_complex(s) != Some(1) {
        return Err(Error::InvalidInput(
            "pole expansion requires s exactly equal to 1".into(),
        ));
    }
    Ok(())
}

/// Order-d jet of `zeta(s+x, a)` (or of `zeta(s+x, a) - 1/x` with
/// `at_pole`) with every truncation and rounding error enclosed.
pub fn hurwitz_jet(
    s: &ComplexBall,
    a: &ComplexBall,
    d: usize,
    prec: u32,
    at_pole: bool,
    opts: &JetOptions,
) -> Result<HurwitzOutput> {
    validate(s, a, d, prec, at_pole)?;
    let params = match &opts.force {
        Some(p) => {
            if p.n > i64::MAX as u64 || p.m >= u32::MAX as u64 {
                return Err(Error::InvalidInput("forced N or M out of range".into()));
            }
            p.clone()
        }
        None => select_params(s, a, d, prec),
    };
    let wp = prec.saturating_add(guard_bits(params.n, d));
    let workers = opts.workers.max(1);

    let sum = if d <= 4 && exact_int_complex(a) == Some(1) {
        power_sum_sieved(s, params.n, d, wp)
    } else {
        power_sum_direct(s, a, params.n, d, wp, workers)
    };
    let i_jet = prefix_integral(s, a, params.n, d, wp, at_pole);
    let t_jet = tail_binary_split(s, a, &params, d, wp);
    let raw = sum.add(&i_jet, wp).add(&t_jet, wp);

    let remainder = remainder_bound(s, a, &params, d, BOUND_PREC);
    let folded: Vec<ComplexBall> = raw
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.add_error(&remainder.upper(k)))
        .collect();
    let jet = BallSeries::from_coeffs(folded).round_to(prec);
    Ok(HurwitzOutput { jet, raw, remainder, params, wp })
}

/// Enclosure of `zeta(s, a)`.
pub fn hurwitz_value(s: &ComplexBall, a: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    Ok(hurwitz_jet(s, a, 1, prec, false, &JetOptions::default())?
        .jet
        .coeff(0))
}

/// Order-d jet of the Riemann zeta function (`a = 1`).
pub fn zeta_jet(
    s: &ComplexBall,
    d: usize,
    prec: u32,
    at_pole: bool,
    opts: &JetOptions,
) -> Result<HurwitzOutput> {
    hurwitz_jet(s, &ComplexBall::one(), d, prec, at_pole, opts)
}

/// Enclosure of `zeta(s)`.
pub fn zeta_value(s: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    Ok(zeta_jet(s, 1, prec, false, &JetOptions::default())?.jet.coeff(0))
}
