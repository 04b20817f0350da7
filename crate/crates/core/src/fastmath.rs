//! Branch-free sine/cosine for slices.
//!
//! Cody-Waite reduction by pi/2 followed by the Cephes minimax polynomials on
//! [-pi/4, pi/4]. Arguments above `REDUCTION_LIMIT` in magnitude fall back to
//! `libm`. Results agree with `libm` to a few ulp.
#![allow(clippy::excessive_precision)]

const FRAC_2_PI: f64 = core::f64::consts::FRAC_2_PI;
const PIO2_1: f64 = 1.570_796_251_296_997_07;
const PIO2_2: f64 = 7.549_789_415_861_596_35e-8;
const PIO2_3: f64 = 5.390_302_858_158_119e-15;
// adding and subtracting 1.5 * 2^52 rounds to the nearest integer
const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;
const REDUCTION_LIMIT: f64 = 1.0e6;

#[inline(always)]
fn sin_cos_reduced(x: f64) -> (f64, f64) {
    let shifted = x * FRAC_2_PI + ROUND_MAGIC;
    // the low mantissa bits of `shifted` hold the quadrant
    let quadrant = shifted.to_bits();
    let q = shifted - ROUND_MAGIC;
    let r = ((x - q * PIO2_1) - q * PIO2_2) - q * PIO2_3;
    let z = r * r;
    let s = r + r
        * z
        * (-1.666_666_666_666_663_07e-1
            + z * (8.333_333_333_322_118_59e-3
                + z * (-1.984_126_982_958_953_86e-4
                    + z * (2.755_731_362_138_572_45e-6
                        + z * (-2.505_074_776_285_780_73e-8 + z * 1.589_623_015_765_465_68e-10)))));
    let c = 1.0 - 0.5 * z
        + z * z
            * (4.166_666_666_666_659_29e-2
                + z * (-1.388_888_888_887_305_64e-3
                    + z * (2.480_158_728_885_170_45e-5
                        + z * (-2.755_731_417_929_673_88e-7
                            + z * (2.087_570_084_197_473_17e-9 + z * -1.135_853_652_138_768_17e-11)))));
    let swap = (quadrant & 1).wrapping_neg();
    let (sb, cb) = (s.to_bits(), c.to_bits());
    let sin_bits = (cb & swap) | (sb & !swap);
    let cos_bits = (sb & swap) | (cb & !swap);
    let sin_sign = (quadrant & 2) << 62;
    let cos_sign = (quadrant.wrapping_add(1) & 2) << 62;
    (f64::from_bits(sin_bits ^ sin_sign), f64::from_bits(cos_bits ^ cos_sign))
}

#[inline]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    if libm::fabs(x) > REDUCTION_LIMIT {
        (libm::sin(x), libm::cos(x))
    } else {
        sin_cos_reduced(x)
    }
}

/// Writes `sin(args[i])` and `cos(args[i])`.
pub(crate) fn sin_cos_slice(args: &[f64], sin_out: &mut [f64], cos_out: &mut [f64]) {
    debug_assert!(args.len() == sin_out.len() && args.len() == cos_out.len());
    for ((&x, s), c) in args.iter().zip(sin_out.iter_mut()).zip(cos_out.iter_mut()) {
        let (sv, cv) = sin_cos_reduced(x);
        *s = sv;
        *c = cv;
    }
    for ((&x, s), c) in args.iter().zip(sin_out.iter_mut()).zip(cos_out.iter_mut()) {
        if libm::fabs(x) > REDUCTION_LIMIT {
            *s = libm::sin(x);
            *c = libm::cos(x);
        }
    }
}
