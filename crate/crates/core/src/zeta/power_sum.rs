//! The power-sum stage: `S = sum_{k=0}^{N-1} (a+k)^{-(s+x)} mod x^D`.
//!
//! Each term is a jet with coefficients
//! `c_0 = (a+k)^{-s}`, `c_{i+1} = -log(a+k)/(i+1) * c_i`.
//!
//! Two evaluation strategies:
//!
//! * direct summation, optionally split across worker threads by fixed
//!   k-blocks that are always combined in ascending order, so the result is
//!   bit-identical for every worker count;
//! * a sieved path for the Riemann case a = 1 at small jet order, where the
//!   terms are completely multiplicative in k: values are computed from
//!   scratch only at primes, composites cost one jet multiplication, and
//!   powers of two are folded by a Horner loop.
//!
//! At high precision, logs of consecutive integers are produced by a ladder:
//! `log q = log p + 2 atanh((q-p)/(q+p))`, with the atanh evaluated by exact
//! binary splitting, which is much cheaper than a from-scratch log.

use crate::ball::RealBall;
use crate::complex::ComplexBall;
use crate::elem::{atanh_ratio, log_ball};
use crate::series::BallSeries;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;

/// Below this precision a from-scratch log is cheaper than the atanh ladder.
const LADDER_MIN_PREC: u32 = 4096;

/// Extracts an exact small-integer value, if the ball is one.
pub(crate) fn exact_i64(b: &RealBall) -> Option<i64> {
    if !b.is_exact() {
        return None;
    }
    b.mid().to_i64_exact()
}

pub(crate) fn exact_int_complex(z: &ComplexBall) -> Option<i64> {
    if !(z.im.is_exact() && z.im.mid().is_zero()) {
        return None;
    }
    exact_i64(&z.re)
}

/// log(a+k) with a real fast path (complex log costs an extra arctangent).
pub(crate) fn log_of(base: &ComplexBall, prec: u32) -> ComplexBall {
    if base.im.is_exact() && base.im.mid().is_zero() && base.re.is_positive() {
        ComplexBall::from_real(log_ball(&base.re, prec))
    } else {
        base.log(prec)
    }
}

/// Logs of an ascending integer sequence; entries after the first are
/// produced from their predecessor via `log q = log p + 2 atanh((q-p)/(q+p))`.
pub fn log_ladder(values: &[u64], prec: u32) -> Vec<RealBall> {
    let mut out = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        assert!(v >= 2, "ladder inputs must be >= 2");
        if i == 0 {
            out.push(log_ball(&RealBall::from_i64(v as i64), prec));
        } else {
            let p = values[i - 1];
            assert!(v > p, "ladder inputs must be strictly ascending");
            out.push(ladder_step(&out[i - 1], p, v, prec));
        }
    }
    out
}

fn ladder_step(log_p: &RealBall, p: u64, q: u64, prec: u32) -> RealBall {
    let num = q - p;
    let den = q + p;
    if 2 * num <= den {
        log_p.add(&atanh_ratio(num, den, prec).mul_2exp(1), prec)
    } else {
        // Gap too wide for the series domain; fall back to a direct log.
        log_ball(&RealBall::from_i64(q as i64), prec)
    }
}

/// Per-term jet construction context.
pub(crate) struct TermCtx<'a> {
    s: &'a ComplexBall,
    /// `s` as an exact small integer, when it is one: enables exact powers.
    s_int: Option<i64>,
    d: usize,
    prec: u32,
}

impl TermCtx<'_> {
    pub(crate) fn new(s: &ComplexBall, d: usize, prec: u32) -> TermCtx<'_> {
        let s_int = exact_int_complex(s).filter(|v| v.abs() <= 1 << 20);
        TermCtx { s, s_int, d, prec }
    }

    /// `(base)^{-(s+x)} mod x^D` given `log base` (which may be skipped for
    /// D = 1 with integer s).
    pub(crate) fn jet(&self, base: &ComplexBall, log_b: Option<&ComplexBall>) -> BallSeries {
        let prec = self.prec;
        let computed;
        let log_b = match log_b {
            Some(l) => Some(l),
            None if self.d > 1 || self.s_int.is_none() => {
                computed = log_of(base, prec);
                Some(&computed)
            }
            None => None,
        };
        let c0 = match self.s_int {
            Some(si) => base.pow_i64(-si, prec),
            None => {
                let e = self.s.mul(log_b.unwrap(), prec);
                e.neg().exp(prec)
            }
        };
        let mut c = Vec::with_capacity(self.d);
        c.push(c0);
        if self.d > 1 {
            let neg_l = log_b.unwrap().clone().neg();
            for i in 1..self.d {
                let t = c[i - 1].mul(&neg_l, prec).div_u64(i as u64, prec);
                c.push(t);
            }
        }
        BallSeries::from_coeffs(c)
    }
}

/// Direct summation of `sum_{k=0}^{N-1} (a+k)^{-(s+x)}`, partitioned into
/// fixed k-blocks. Blocks are independent; their partial sums are combined
/// in ascending order regardless of which worker produced them.
pub fn power_sum_direct(
    s: &ComplexBall,
    a: &ComplexBall,
    n: u64,
    d: usize,
    prec: u32,
    workers: usize,
) -> BallSeries {
    assert!(d >= 1);
    if n == 0 {
        return BallSeries::zero(d);
    }
    let block = (n / 64).max(256);
    let nblocks = n.div_ceil(block);
    let ctx = TermCtx::new(s, d, prec);
    let a_int = if a.im.is_exact() && a.im.mid().is_zero() {
        exact_i64(&a.re)
    } else {
        None
    };

    let sum_block = |b: u64| -> BallSeries {
        let k_lo = b * block;
        let k_hi = ((b + 1) * block).min(n);
        let mut acc = BallSeries::zero(d);
        // The ladder applies when a+k runs over exact positive integers.
        let ladder = prec >= LADDER_MIN_PREC
            && (d > 1 || ctx.s_int.is_none())
            && a_int.is_some_and(|ai| ai + k_lo as i64 >= 1 && ai.checked_add(k_hi as i64).is_some());
        let mut prev: Option<(u64, RealBall)> = None;
        for k in k_lo..k_hi {
            let base = a.add(&ComplexBall::from_i64(k as i64, 0), prec);
            let log_b = if let Some(ai) = a_int.filter(|_| ladder) {
                let v = (ai + k as i64) as u64;
                let l = if v == 1 {
                    RealBall::zero()
                } else {
                    let l = match &prev {
                        None => log_ball(&RealBall::from_i64(v as i64), prec),
                        Some((p, lp)) => ladder_step(lp, *p, v, prec),
                    };
                    prev = Some((v, l.clone()));
                    l
                };
                Some(ComplexBall::from_real(l))
            } else {
                None
            };
            let t = ctx.jet(&base, log_b.as_ref());
            acc = acc.add(&t, prec);
        }
        acc
    };

    let workers = workers.max(1).min(nblocks as usize);
    if workers == 1 {
        let mut acc = BallSeries::zero(d);
        for b in 0..nblocks {
            acc = acc.add(&sum_block(b), prec);
        }
        return acc;
    }

    let slots: Vec<Mutex<Option<BallSeries>>> = (0..nblocks).map(|_| Mutex::new(None)).collect();
    let next = AtomicU64::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let b = next.fetch_add(1, AtomicOrdering::Relaxed);
                if b >= nblocks {
                    break;
                }
                let r = sum_block(b);
                *slots[b as usize].lock().unwrap() = Some(r);
            });
        }
    });
    let mut acc = BallSeries::zero(d);
    for slot in &slots {
        let r = slot.lock().unwrap().take().unwrap();
        acc = acc.add(&r, prec);
    }
    acc
}

/// Control flow of the sieved multiplicative summation, generic over the
/// value type: `sum_{k=1}^{n} f(k)` for completely multiplicative f.
/// `eval` is called for k = 1, 2, and odd primes in ascending order only;
/// composites are produced by `mul`. Powers of two are folded by a Horner
/// loop over the partial sums of odd terms.
pub(crate) fn sieved_sum<T: Clone>(
    n: u64,
    mut eval: impl FnMut(u64) -> T,
    mut mul: impl FnMut(&T, &T) -> T,
    mut add: impl FnMut(&T, &T) -> T,
    zero: T,
) -> T {
    if n == 0 {
        return zero;
    }
    if n == 1 {
        return eval(1);
    }

    // divisor[(k-1)/2] = smallest odd prime factor of odd k, or 0 if k is
    // 1 or prime.
    let half = ((n + 1) / 2) as usize;
    let mut divisor = vec![0u32; half];
    let mut k = 3u64;
    while k * k <= n {
        if divisor[((k - 1) / 2) as usize] == 0 {
            let mut j = k * k;
            while j <= n {
                let slot = ((j - 1) / 2) as usize;
                if divisor[slot] == 0 {
                    divisor[slot] = k as u32;
                }
                j += 2 * k;
            }
        }
        k += 2;
    }

    let f2 = eval(2);
    // Cached odd values f(k) for 3k <= n, indexed by (k-1)/2.
    let cache_len = ((n / 3 + 1) / 2 + 1) as usize;
    let mut cache: Vec<Option<T>> = vec![None; cache_len];

    let mut p = 1u64 << (63 - n.leading_zeros());
    let mut h = 1u64;
    let mut z = zero.clone();
    let mut u = zero;

    let mut k = 1u64;
    while k <= n {
        let slot = ((k - 1) / 2) as usize;
        let t = if divisor[slot] == 0 {
            eval(k)
        } else {
            let d = divisor[slot] as u64;
            let lhs = cache[((d - 1) / 2) as usize].as_ref().unwrap();
            let rhs = cache[((k / d - 1) / 2) as usize].as_ref().unwrap();
            mul(lhs, rhs)
        };
        if 3 * k <= n {
            cache[slot] = Some(t.clone());
        }
        u = add(&u, &t);
        while k == h && p != 1 {
            z = add(&u, &mul(&f2, &z));
            p /= 2;
            h = n / p;
            if h % 2 == 0 {
                h -= 1;
            }
        }
        k += 2;
    }
    add(&u, &mul(&f2, &z))
}

/// Sieved evaluation of `sum_{k=1}^{N} k^{-(s+x)} mod x^D` (the a = 1 case).
/// Worth it only for small D, where a jet multiplication beats a from-scratch
/// term evaluation.
pub fn power_sum_sieved(s: &ComplexBall, n: u64, d: usize, prec: u32) -> BallSeries {
    assert!(d >= 1 && d <= 4, "sieved path is restricted to jet order <= 4");
    let ctx = TermCtx::new(s, d, prec);
    let ladder = prec >= LADDER_MIN_PREC && (d > 1 || ctx.s_int.is_none());
    let mut prev: Option<(u64, RealBall)> = None;
    let eval = |k: u64| -> BallSeries {
        if k == 1 {
            return BallSeries::one(d);
        }
        let base = ComplexBall::from_i64(k as i64, 0);
        let log_b = if ladder {
            let l = match &prev {
                Some((p, lp)) if *p < k => ladder_step(lp, *p, k, prec),
                _ => log_ball(&RealBall::from_i64(k as i64), prec),
            };
            prev = Some((k, l.clone()));
            Some(ComplexBall::from_real(l))
        } else {
            None
        };
        ctx.jet(&base, log_b.as_ref())
    };
    sieved_sum(
        n,
        eval,
        |x, y| x.mul(y, d, prec),
        |x, y| x.add(y, prec),
        BallSeries::zero(d),
    )
}
