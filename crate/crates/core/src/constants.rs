//! Batch tables of Keiper-Li coefficients and generalized Stieltjes
//! constants, both read off Hurwitz zeta jets.
//!
//! The Keiper-Li coefficients are the power series coefficients of
//! log xi(x/(x-1)) around x = 0, where xi is the completed zeta function;
//! they are assembled from a zeta jet at s = 0 through
//!
//! ```text
//! log xi(s) = log(-zeta(s)) + log Gamma(1 + s/2) + log(1 - s) - s log(pi)/2
//! ```
//!
//! followed by the Mobius substitution s = x/(x-1). Every step stays in
//! ball arithmetic, so each table entry is a certified enclosure. The
//! constant term of the composed series must contain -log 2; the residual
//! of that check is stored in slot 0 and doubles as a health indicator.
//!
//! The generalized Stieltjes constants gamma_n(a) are the Laurent
//! coefficients of zeta(s, a) at s = 1; they come from the pole-regularized
//! jet with an exact factorial rescaling. Their conditioning degrades
//! linearly in n, so the working precision grows as n plus the requested
//! target.

use num_bigint::BigUint;
use num_traits::One;

use crate::ball::RealBall;
use crate::bigfloat::BigFloat;
use crate::complex::ComplexBall;
use crate::elem::{log2_ball, log_ball, pi_ball};
use crate::error::{Error, Result};
use crate::fmt::decimal_parts;
use crate::series::BallSeries;
use crate::zeta::{hurwitz_jet, hurwitz_value, zeta_jet, JetOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    KeiperLi,
    Stieltjes,
}

/// Entries of a coefficient table: Keiper-Li coefficients are provably
/// real, Stieltjes constants are complex for general a.
#[derive(Clone, Debug)]
pub enum TableValues {
    Real(Vec<RealBall>),
    Complex(Vec<ComplexBall>),
}

/// A batch of certified coefficient enclosures, index 0 through n.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub kind: TableKind,
    /// Expansion point of the Hurwitz zeta; present for Stieltjes tables.
    pub a: Option<ComplexBall>,
    pub values: TableValues,
    pub working_prec: u32,
    /// Indices whose enclosure straddles zero, so the sign could not be
    /// certified at this precision. Slot 0 of a Keiper-Li table is exempt:
    /// it holds the constant-term residual, which contains zero by design.
    pub undetermined: Vec<usize>,
}

/// Which derived series `plot_data` emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotSeries {
    /// n * (lambda_n - li_reference(n)): bounded oscillation around zero.
    ScaledDeviation,
    /// (lambda_n - li_reference(n)) / |li_reference(n)|.
    RelativeDeviation,
}

/// Euler's constant as the 0th Stieltjes constant, self-hosted from the
/// pole-regularized zeta jet.
pub(crate) fn euler_gamma(prec: u32) -> Result<RealBall> {
    let one = ComplexBall::one();
    let out = hurwitz_jet(&one, &one, 1, prec, true, &JetOptions::default())?;
    let c0 = out.jet.coeff(0);
    if !c0.im.contains_zero() {
        return Err(Error::Internal("gamma jet has nonreal constant term".into()));
    }
    Ok(c0.re)
}

/// Direct summation of zeta(k) for k large enough that a handful of terms
/// reaches the target: sum j^-k for j < J plus the rigorous tail bound
/// `J^-k (1 + J/(k-1)) <= 2^(1 - k floor(log2 J))` (valid for J <= k-1).
/// The working precision grows with k so the enclosure width stays at the
/// scale of the tail, around 3^-k; mantissas are up to ~1.6k bits.
fn zeta_int_direct(k: u64, prec: u32) -> Result<RealBall> {
    let kk: u32 = k.try_into().map_err(|_| Error::InvalidInput("k too large".into()))?;
    let wp = ((prec as u64).max(8 * k / 5 + 1).min(1 << 26) + 16) as u32;
    let mut sum = RealBall::one();
    let mut j = 2u64;
    loop {
        let fl = 63 - j.leading_zeros() as u64; // floor(log2 j)
        if fl * k > wp as u64 && j < k {
            sum = sum.add_error(&BigFloat::pow2(1 - (fl * k) as i64));
            return Ok(sum);
        }
        let term = if j.is_power_of_two() {
            RealBall::exact(BigFloat::pow2(-((fl * k) as i64)))
        } else {
            RealBall::exact(BigFloat::from_biguint(BigUint::from(j).pow(kk))).recip(wp)
        };
        sum = sum.add(&term, wp);
        j += 1;
    }
}

/// Enclosures of zeta(k) for k = k_min ..= k_max, each to about `prec`
/// bits. Large k (beyond prec / log2(3)) go through direct summation with
/// a geometric tail bound; smaller k through the Euler-Maclaurin engine.
///
/// Requires k_min >= 2. An empty range returns an empty table.
pub fn zeta_int_values(k_min: u64, k_max: u64, prec: u32) -> Result<Vec<RealBall>> {
    if k_min < 2 {
        return Err(Error::InvalidInput("zeta values start at k = 2".into()));
    }
    // direct summation becomes optimal once 3^-k clears 2^-prec
    let crossover = (prec as f64 / 3f64.log2()).ceil() as u64;
    let one = ComplexBall::one();
    let mut out = Vec::new();
    for k in k_min..=k_max {
        if k >= crossover {
            out.push(zeta_int_direct(k, prec)?);
        } else {
            let s = ComplexBall::from_i64(k as i64, 0);
            let v = hurwitz_value(&s, &one, prec)?;
            if !v.im.contains_zero() {
                return Err(Error::Internal("zeta(k) has nonreal enclosure".into()));
            }
            out.push(v.re);
        }
    }
    Ok(out)
}

/// The asymptotic reference value (1/2)(log n - log(2 pi) + gamma - 1)
/// that the Keiper-Li coefficients approach from a bounded oscillation.
pub fn li_reference(n: u64) -> RealBall {
    let p = 160;
    let gamma = euler_gamma(p).expect("fixed-precision gamma");
    let ln_n = log_ball(&RealBall::from_i64(n as i64), p);
    let ln_2pi = log_ball(&pi_ball(p).mul_2exp(1), p);
    ln_n.sub(&ln_2pi, p).add(&gamma, p).sub(&RealBall::one(), p).mul_2exp(-1)
}

/// Keiper-Li coefficients lambda_0 ..= lambda_n as certified real
/// enclosures.
///
/// Default working precision is ceil(1.1 n) + 50 bits, enough in practice
/// for roughly 0.1 n accurate bits in lambda_n; `prec_override` replaces
/// it. Entry 0 holds the constant-check residual (the composed constant
/// term plus log 2), which is verified to contain zero. Entries whose sign
/// the enclosure cannot certify are listed in `undetermined`; re-running
/// at higher precision is the caller's call.
pub fn keiper_li(n: usize, prec_override: Option<u32>, workers: usize) -> Result<CoefficientTable> {
    if n < 1 {
        return Err(Error::InvalidInput("table needs n >= 1".into()));
    }
    let wp = prec_override.unwrap_or(((11 * n).div_ceil(10) + 50) as u32);
    let d = n + 1;
    let opts = JetOptions { workers, force: None };

    let gamma = euler_gamma(wp)?;
    let zeta_k = if n >= 2 { zeta_int_values(2, n as u64, wp)? } else { Vec::new() };

    // log(-zeta) jet at s = 0; zeta(0) = -1/2 keeps the log real
    let zjet = zeta_jet(&ComplexBall::zero(), d, wp, false, &opts)?.jet;
    let log_neg_zeta = zjet.neg().log(d, wp);

    // log Gamma(1 + x/2) + log(1 - x) - x log(pi)/2, coefficient by
    // coefficient: order 1 is -gamma/2 - 1 - log(pi)/2, order k >= 2 is
    // ((-1)^k zeta(k) 2^-k - 1) / k
    let ln_pi = log_ball(&pi_ball(wp), wp);
    let mut extra = Vec::with_capacity(d);
    extra.push(ComplexBall::zero());
    let c1 = gamma
        .add(&ln_pi, wp)
        .mul_2exp(-1)
        .add(&RealBall::one(), wp)
        .neg();
    extra.push(ComplexBall::from_real(c1));
    for k in 2..d {
        let mut t = zeta_k[k - 2].mul_2exp(-(k as i64));
        if k % 2 == 1 {
            t = t.neg();
        }
        let ck = t.sub(&RealBall::one(), wp).div_u64(k as u64, wp);
        extra.push(ComplexBall::from_real(ck));
    }

    let f = log_neg_zeta.add(&BallSeries::from_coeffs(extra), wp);
    let g = f.compose_mobius(wp);

    let mut values = Vec::with_capacity(d);
    let mut undetermined = Vec::new();
    for (k, c) in g.coeffs().iter().enumerate() {
        if !c.im.contains_zero() {
            return Err(Error::Internal(format!("lambda_{k} has nonreal enclosure")));
        }
        if k == 0 {
            let residual = c.re.add(&log2_ball(wp), wp);
            if !residual.contains_zero() {
                return Err(Error::Internal("constant term check missed -log 2".into()));
            }
            values.push(residual);
        } else {
            if c.re.contains_zero() {
                undetermined.push(k);
            }
            values.push(c.re.clone());
        }
    }
    Ok(CoefficientTable {
        kind: TableKind::KeiperLi,
        a: None,
        values: TableValues::Real(values),
        working_prec: wp,
        undetermined,
    })
}

/// Generalized Stieltjes constants gamma_0(a) ..= gamma_n(a).
///
/// Computed from the pole-regularized Hurwitz jet at s = 1, order n + 1,
/// with an exact factorial rescaling: gamma_k = (-1)^k k! c_k. The
/// constants are ill-conditioned in n: beyond the inherent n bits, the
/// summation and integral stages of the jet cancel against each other at
/// high orders, costing up to about 0.4 n further bits (measured; the
/// rate tapers as the constants themselves start growing). The working
/// precision is therefore n + prec_target plus a guard of n/2 + 48,
/// leaving at least prec_target certified bits in gamma_n.
pub fn stieltjes(
    n: usize,
    a: &ComplexBall,
    prec_target: u32,
    workers: usize,
) -> Result<CoefficientTable> {
    let nn: u32 = n.try_into().map_err(|_| Error::InvalidInput("n too large".into()))?;
    let wp = prec_target
        .checked_add(nn)
        .and_then(|p| p.checked_add(nn / 2 + 48))
        .ok_or_else(|| Error::InvalidInput("requested precision overflows".into()))?;
    let opts = JetOptions { workers, force: None };
    let out = hurwitz_jet(&ComplexBall::one(), a, n + 1, wp, true, &opts)?;

    let mut fact = BigUint::one();
    let mut values = Vec::with_capacity(n + 1);
    for (k, c) in out.jet.coeffs().iter().enumerate() {
        if k > 0 {
            fact *= k as u64;
        }
        let scale = RealBall::exact(BigFloat::from_biguint(fact.clone()));
        let mut g = c.mul_real(&scale, wp);
        if k % 2 == 1 {
            g = g.neg();
        }
        values.push(g);
    }
    Ok(CoefficientTable {
        kind: TableKind::Stieltjes,
        a: Some(a.clone()),
        values: TableValues::Complex(values),
        working_prec: wp,
        undetermined: Vec::new(),
    })
}

impl CoefficientTable {
    pub fn len(&self) -> usize {
        match &self.values {
            TableValues::Real(v) => v.len(),
            TableValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn real_values(&self) -> Option<&[RealBall]> {
        match &self.values {
            TableValues::Real(v) => Some(v),
            TableValues::Complex(_) => None,
        }
    }

    pub fn complex_values(&self) -> Option<&[ComplexBall]> {
        match &self.values {
            TableValues::Complex(v) => Some(v),
            TableValues::Real(_) => None,
        }
    }

    /// CSV rows `index,midpoint,radius` (real tables) or
    /// `index,midpoint_re,radius_re,midpoint_im,radius_im` (complex), with
    /// a header line.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut s = String::new();
        match &self.values {
            TableValues::Real(v) => {
                s.push_str("index,midpoint,radius\n");
                for (k, x) in v.iter().enumerate() {
                    let (m, r) = decimal_parts(x, digits);
                    s.push_str(&format!("{k},{m},{r}\n"));
                }
            }
            TableValues::Complex(v) => {
                s.push_str("index,midpoint_re,radius_re,midpoint_im,radius_im\n");
                for (k, z) in v.iter().enumerate() {
                    let (mr, rr) = decimal_parts(&z.re, digits);
                    let (mi, ri) = decimal_parts(&z.im, digits);
                    s.push_str(&format!("{k},{mr},{rr},{mi},{ri}\n"));
                }
            }
        }
        s
    }

    /// JSON object with the table metadata and one value record per index.
    /// Complex entries carry two-element `[re, im]` arrays for midpoint
    /// and radius; real entries carry plain strings.
    pub fn to_json(&self, digits: usize) -> String {
        let kind = match self.kind {
            TableKind::KeiperLi => "keiper_li",
            TableKind::Stieltjes => "stieltjes",
        };
        let mut s = format!("{{\n  \"kind\": \"{kind}\",\n  \"working_prec\": {},\n", self.working_prec);
        if let Some(a) = &self.a {
            let (ar, _) = decimal_parts(&a.re, digits);
            let (ai, _) = decimal_parts(&a.im, digits);
            s.push_str(&format!("  \"a\": [\"{ar}\", \"{ai}\"],\n"));
        }
        let flags: Vec<String> = self.undetermined.iter().map(|k| k.to_string()).collect();
        s.push_str(&format!("  \"undetermined\": [{}],\n  \"values\": [\n", flags.join(", ")));
        let rows: Vec<String> = match &self.values {
            TableValues::Real(v) => v
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let (m, r) = decimal_parts(x, digits);
                    format!("    {{\"index\": {k}, \"midpoint\": \"{m}\", \"radius\": \"{r}\"}}")
                })
                .collect(),
            TableValues::Complex(v) => v
                .iter()
                .enumerate()
                .map(|(k, z)| {
                    let (mr, rr) = decimal_parts(&z.re, digits);
                    let (mi, ri) = decimal_parts(&z.im, digits);
                    format!(
                        "    {{\"index\": {k}, \"midpoint\": [\"{mr}\", \"{mi}\"], \"radius\": [\"{rr}\", \"{ri}\"]}}"
                    )
                })
                .collect(),
        };
        s.push_str(&rows.join(",\n"));
        s.push_str("\n  ]\n}\n");
        s
    }

    /// Plot-ready CSV `index,value,radius` for the deviation of a
    /// Keiper-Li table from its asymptotic reference. Errors on Stieltjes
    /// tables.
    pub fn plot_data(&self, series: PlotSeries, digits: usize) -> Result<String> {
        let v = self
            .real_values()
            .filter(|_| self.kind == TableKind::KeiperLi)
            .ok_or_else(|| Error::InvalidInput("plot data is defined for Keiper-Li tables".into()))?;
        let p = self.working_prec;
        let mut s = String::from("index,value,radius\n");
        for (k, lam) in v.iter().enumerate().skip(1) {
            let reference = li_reference(k as u64);
            let dev = lam.sub(&reference, p);
            let val = match series {
                PlotSeries::ScaledDeviation => dev.mul_i64(k as i64, p),
                PlotSeries::RelativeDeviation => dev.div(&reference.abs(), p),
            };
            let (m, r) = decimal_parts(&val, digits);
            s.push_str(&format!("{k},{m},{r}\n"));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn assert_contains_decimal(x: &RealBall, dec: &str, slack: f64) {
        // reference = exact rational of `dec` widened by `slack`
        let neg = dec.starts_with('-');
        let t = dec.trim_start_matches('-');
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        let p: BigInt = format!("{int}{frac}").parse().unwrap();
        let p = if neg { -p } else { p };
        let q = BigInt::from(10).pow(frac.len() as u32);
        let r = RealBall::from_bigint_ratio(&p, &q, 192).add_error(&BigFloat::from_f64(slack));
        assert!(
            x.sub(&r, 192).contains_zero(),
            "enclosure {:?} does not meet {dec} +/- {slack}",
            x.mid().to_f64()
        );
    }

    #[test]
    fn integer_zeta_values_match_pi_powers() {
        let vals = zeta_int_values(2, 4, 128).unwrap();
        let pi = pi_ball(160);
        let z2 = pi.sqr(160).div_u64(6, 160);
        let z4 = pi.sqr(160).sqr(160).div_u64(90, 160);
        assert!(vals[0].sub(&z2, 160).contains_zero());
        assert!(vals[2].sub(&z4, 160).contains_zero());
        // zeta(3) has no closed form; Apery's constant to 20 digits
        assert_contains_decimal(&vals[1], "1.20205690315959428540", 1e-19);
    }

    #[test]
    fn direct_summation_width_is_geometric() {
        // k = 64 >= 64/log2(3): the direct branch with tail ~ 3^-k
        let v = zeta_int_direct(64, 64).unwrap();
        let thr = BigFloat::one()
            .div(&BigFloat::from_biguint(BigUint::from(3u32).pow(64)), 64, crate::bigfloat::Rounding::Down)
            .0;
        assert!(v.rad().cmp_value(&thr) == Some(std::cmp::Ordering::Less));
        // and it encloses 1 + 2^-64 + 3^-64 + ...
        let em = hurwitz_value(&ComplexBall::from_i64(64, 0), &ComplexBall::one(), 160).unwrap();
        assert!(v.sub(&em.re, 192).contains_zero());
    }

    #[test]
    fn crossover_paths_agree() {
        let vals = zeta_int_values(59, 63, 96).unwrap();
        for (i, k) in (59..=63).enumerate() {
            let em = hurwitz_value(&ComplexBall::from_i64(k, 0), &ComplexBall::one(), 200).unwrap();
            assert!(vals[i].sub(&em.re, 224).contains_zero(), "k = {k}");
        }
        assert!(zeta_int_values(1, 4, 64).is_err());
        assert!(zeta_int_values(5, 4, 64).unwrap().is_empty());
    }

    #[test]
    fn small_keiper_li_table_is_positive_and_matches_closed_form() {
        let t = keiper_li(12, None, 1).unwrap();
        let v = t.real_values().unwrap();
        assert_eq!(v.len(), 13);
        assert!(v[0].contains_zero());
        assert!(t.undetermined.is_empty());
        for (k, lam) in v.iter().enumerate().skip(1) {
            assert!(lam.is_positive(), "lambda_{k} not certified positive");
        }
        // lambda_1 = 1 + gamma/2 - log(4 pi)/2
        let p = t.working_prec;
        let gamma = euler_gamma(p).unwrap();
        let ln_4pi = log_ball(&pi_ball(p).mul_2exp(2), p);
        let lam1 = RealBall::one().add(&gamma.mul_2exp(-1), p).sub(&ln_4pi.mul_2exp(-1), p);
        assert!(v[1].sub(&lam1, p).contains_zero());
        assert_contains_decimal(&v[1], "0.0230957", 1e-7);
    }

    #[test]
    fn tables_of_different_order_overlap() {
        let small = keiper_li(6, None, 1).unwrap();
        let big = keiper_li(12, Some(120), 1).unwrap();
        let (vs, vb) = (small.real_values().unwrap(), big.real_values().unwrap());
        for k in 1..=6 {
            assert!(vs[k].sub(&vb[k], 160).contains_zero(), "k = {k}");
        }
    }

    #[test]
    fn stieltjes_constants_match_references() {
        let t = stieltjes(3, &ComplexBall::one(), 128, 1).unwrap();
        let v = t.complex_values().unwrap();
        assert_eq!(v.len(), 4);
        for z in v {
            assert!(z.im.contains_zero());
        }
        assert_contains_decimal(&v[0].re, "0.57721566490153286060651209008240243", 1e-33);
        assert_contains_decimal(&v[1].re, "-0.07281584548367672486058637587490131", 1e-33);
        assert_contains_decimal(&v[2].re, "-0.0096903631928723184", 1e-17);
        assert_contains_decimal(&v[3].re, "0.0020538344203033458", 1e-17);
    }

    #[test]
    fn stieltjes_shift_identity_has_log_power_closed_form() {
        // gamma_k(a) - gamma_k(a+1) = (log a)^k / a for the defining shift
        let p = 128;
        let a = ComplexBall::from_real(RealBall::from_ratio(3, 2, p));
        let a1 = ComplexBall::from_real(RealBall::from_ratio(5, 2, p));
        let ta = stieltjes(2, &a, p, 1).unwrap();
        let tb = stieltjes(2, &a1, p, 1).unwrap();
        let (va, vb) = (ta.complex_values().unwrap(), tb.complex_values().unwrap());
        let ln_a = log_ball(&RealBall::from_ratio(3, 2, p), p);
        let mut pow = RealBall::one();
        for k in 0..=2 {
            let want = pow.div(&RealBall::from_ratio(3, 2, p), p);
            let got = va[k].sub(&vb[k], p);
            assert!(got.re.sub(&want, p).contains_zero(), "k = {k}");
            assert!(got.im.contains_zero());
            pow = pow.mul(&ln_a, p);
        }
    }

    #[test]
    fn reference_curve_hits_quoted_value() {
        assert_contains_decimal(&li_reference(100000), "4.626132", 1e-5);
        assert!(li_reference(1).is_negative());
        assert!(li_reference(100).is_positive());
    }

    #[test]
    fn exports_have_expected_shape() {
        let t = keiper_li(4, None, 1).unwrap();
        let csv = t.to_csv(12);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("index,midpoint,radius\n0,"));
        let json = t.to_json(12);
        assert!(json.contains("\"kind\": \"keiper_li\""));
        assert!(json.contains("\"index\": 4"));
        let plot = t.plot_data(PlotSeries::ScaledDeviation, 8).unwrap();
        assert_eq!(plot.lines().count(), 5);
        let st = stieltjes(2, &ComplexBall::from_i64(1, 1), 64, 1).unwrap();
        assert!(st.to_csv(10).starts_with("index,midpoint_re,"));
        assert!(st.to_json(10).contains("\"a\": "));
        assert!(st.plot_data(PlotSeries::ScaledDeviation, 8).is_err());
    }
}
