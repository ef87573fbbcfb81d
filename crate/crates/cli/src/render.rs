//! Serialization of evaluation results in the three output formats.
//!
//! Schemas are fixed. Value results (zeta, hurwitz, zero) in JSON carry
//! `midpoint`, `radius`, `prec_used`, `N`, `M`, `wall_time`; complex values
//! use two-element `[re, im]` string arrays, real ones plain strings, and
//! absent metadata is `null`. `wall_time` is `null` unless timing was
//! requested, so default output is byte-reproducible. CSV uses the same
//! column layout as the library's coefficient tables.

use hzeta::complex::ComplexBall;
use hzeta::fmt::{decimal, decimal_complex, decimal_parts};
use hzeta::zeta::EMParams;
use hzeta::RealBall;

pub struct ValueMeta {
    pub prec_used: u32,
    pub params: Option<EMParams>,
    pub wall_time: Option<f64>,
}

fn opt_u64(v: Option<u64>) -> String {
    v.map_or_else(|| "null".to_string(), |x| x.to_string())
}

fn opt_time(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_string(), |x| format!("{x:.3}"))
}

fn meta_lines(out: &mut String, meta: &ValueMeta) {
    out.push_str(&format!("prec_used = {}\n", meta.prec_used));
    if let Some(p) = &meta.params {
        out.push_str(&format!("N = {}\nM = {}\n", p.n, p.m));
    }
    if let Some(t) = meta.wall_time {
        out.push_str(&format!("wall_time = {t:.3} s\n"));
    }
}

pub fn jet_text(coeffs: &[ComplexBall], digits: usize, meta: &ValueMeta) -> String {
    let mut out = String::new();
    if coeffs.len() == 1 {
        out.push_str(&format!("value = {}\n", decimal_complex(&coeffs[0], digits)));
    } else {
        for (k, c) in coeffs.iter().enumerate() {
            out.push_str(&format!("c{k} = {}\n", decimal_complex(c, digits)));
        }
    }
    meta_lines(&mut out, meta);
    out
}

fn complex_pair(z: &ComplexBall, digits: usize) -> (String, String) {
    let (mr, rr) = decimal_parts(&z.re, digits);
    let (mi, ri) = decimal_parts(&z.im, digits);
    (format!("[\"{mr}\", \"{mi}\"]"), format!("[\"{rr}\", \"{ri}\"]"))
}

pub fn jet_json(coeffs: &[ComplexBall], digits: usize, meta: &ValueMeta) -> String {
    let (n, m) = match &meta.params {
        Some(p) => (Some(p.n), Some(p.m)),
        None => (None, None),
    };
    let (mid0, rad0) = complex_pair(&coeffs[0], digits);
    let mut out = format!(
        "{{\n  \"midpoint\": {mid0},\n  \"radius\": {rad0},\n  \"prec_used\": {},\n  \"N\": {},\n  \"M\": {}",
        meta.prec_used,
        opt_u64(n),
        opt_u64(m)
    );
    if coeffs.len() > 1 {
        let rows: Vec<String> = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let (mid, rad) = complex_pair(c, digits);
                format!("    {{\"index\": {k}, \"midpoint\": {mid}, \"radius\": {rad}}}")
            })
            .collect();
        out.push_str(&format!(",\n  \"coefficients\": [\n{}\n  ]", rows.join(",\n")));
    }
    out.push_str(&format!(",\n  \"wall_time\": {}\n}}\n", opt_time(meta.wall_time)));
    out
}

pub fn jet_csv(coeffs: &[ComplexBall], digits: usize) -> String {
    let mut out = String::from("index,midpoint_re,radius_re,midpoint_im,radius_im\n");
    for (k, z) in coeffs.iter().enumerate() {
        let (mr, rr) = decimal_parts(&z.re, digits);
        let (mi, ri) = decimal_parts(&z.im, digits);
        out.push_str(&format!("{k},{mr},{rr},{mi},{ri}\n"));
    }
    out
}

pub fn real_text(x: &RealBall, digits: usize, meta: &ValueMeta) -> String {
    let mut out = format!("value = {}\n", decimal(x, digits));
    meta_lines(&mut out, meta);
    out
}

pub fn real_json(x: &RealBall, digits: usize, meta: &ValueMeta) -> String {
    let (mid, rad) = decimal_parts(x, digits);
    format!(
        "{{\n  \"midpoint\": \"{mid}\",\n  \"radius\": \"{rad}\",\n  \"prec_used\": {},\n  \"N\": null,\n  \"M\": null,\n  \"wall_time\": {}\n}}\n",
        meta.prec_used,
        opt_time(meta.wall_time)
    )
}

pub fn real_csv(x: &RealBall, digits: usize) -> String {
    let (mid, rad) = decimal_parts(x, digits);
    format!("midpoint,radius\n{mid},{rad}\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use hzeta::zeta::EMParams;

    fn meta() -> ValueMeta {
        ValueMeta {
            prec_used: 160,
            params: Some(EMParams { n: 33, m: 21, attained: true }),
            wall_time: None,
        }
    }

    #[test]
    fn text_and_csv_shapes() {
        let z = ComplexBall::new(RealBall::from_f64(1.5), RealBall::zero());
        let t = jet_text(std::slice::from_ref(&z), 5, &meta());
        assert!(t.contains("value = 1.5000 +/- 0"));
        assert!(t.contains("N = 33") && t.contains("M = 21") && !t.contains("wall_time"));
        let c = jet_csv(&[z.clone(), z], 5);
        assert_eq!(c.lines().count(), 3);
        assert!(c.starts_with("index,midpoint_re,radius_re,midpoint_im,radius_im\n0,1.5000,0,0,0\n"));
    }

    #[test]
    fn json_has_fixed_fields_and_null_timing() {
        let z = ComplexBall::new(RealBall::from_f64(2.0), RealBall::from_f64(-1.0));
        let s = jet_json(&[z], 4, &meta());
        for key in ["\"midpoint\"", "\"radius\"", "\"prec_used\": 160", "\"N\": 33", "\"M\": 21", "\"wall_time\": null"] {
            assert!(s.contains(key), "{key} missing in {s}");
        }
        assert!(!s.contains("coefficients"));
        let with_t = ValueMeta { wall_time: Some(0.5), ..meta() };
        assert!(jet_json(&[ComplexBall::zero()], 4, &with_t).contains("\"wall_time\": 0.500"));
    }

    #[test]
    fn real_value_forms() {
        let x = RealBall::from_f64(14.25);
        let m = ValueMeta { prec_used: 64, params: None, wall_time: None };
        assert!(real_text(&x, 4, &m).starts_with("value = 14.25 +/- 0\nprec_used = 64\n"));
        let j = real_json(&x, 4, &m);
        assert!(j.contains("\"N\": null") && j.contains("\"midpoint\": \"14.25\""));
        assert_eq!(real_csv(&x, 4), "midpoint,radius\n14.25,0\n");
    }
}
