//! Standard normal distribution: CDF, log-CDF and quantile.
//!
//! The CDF is built on Cody's rational Chebyshev approximations of the
//! complementary error function (W. J. Cody, Math. Comp. 23, 1969), in the
//! scaled form `erfcx(y) = exp(y²)·erfc(y)`. Keeping the Gaussian factor
//! separate lets [`log_norm_cdf`] stay finite far below the point where
//! `Φ(x)` itself underflows. The quantile is Wichura's AS241 followed by one
//! Halley step against [`norm_cdf`].

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use super::NumericsError;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

const ERF_THRESHOLD: f64 = 0.468_75;
// erfc(y) underflows to zero beyond this point.
const ERFC_XBIG: f64 = 26.543;

#[allow(clippy::excessive_precision)]
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_156,
    377.485_237_685_302_021,
    3_209.377_589_138_469_47,
    0.185_777_706_184_603_153,
];
#[allow(clippy::excessive_precision)]
const ERF_B: [f64; 4] = [
    23.601_290_952_344_120_9,
    244.024_637_934_444_173,
    1_282.616_526_077_372_28,
    2_844.236_833_439_170_62,
];
#[allow(clippy::excessive_precision)]
const ERFC_C: [f64; 9] = [
    0.564_188_496_988_670_089,
    8.883_149_794_388_375_94,
    66.119_190_637_141_629_5,
    298.635_138_197_400_131,
    881.952_221_241_769_09,
    1_712.047_612_634_070_58,
    2_051.078_377_826_071_47,
    1_230.339_354_797_997_25,
    2.153_115_354_744_038_46e-8,
];
#[allow(clippy::excessive_precision)]
const ERFC_D: [f64; 8] = [
    15.744_926_110_709_834_7,
    117.693_950_891_312_499,
    537.181_101_862_009_858,
    1_621.389_574_566_690_19,
    3_290.799_235_733_459_63,
    4_362.619_090_143_247_16,
    3_439.367_674_143_721_64,
    1_230.339_354_803_749_42,
];
#[allow(clippy::excessive_precision)]
const ERFC_P: [f64; 6] = [
    0.305_326_634_961_232_344,
    0.360_344_899_949_804_439,
    0.125_781_726_111_229_246,
    0.016_083_785_148_742_276_6,
    6.587_491_615_298_378_03e-4,
    0.016_315_387_137_302_097_8,
];
#[allow(clippy::excessive_precision)]
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_42,
    1.872_952_849_923_460_47,
    0.527_905_102_951_428_412,
    0.060_518_341_312_441_319_1,
    0.002_335_204_976_268_691_85,
];

/// `erf(x)/x` for `|x| ≤ 0.46875`, as a rational function of `z = x²`.
#[inline]
fn erf_small_ratio(z: f64) -> f64 {
    let a = &ERF_A;
    let b = &ERF_B;
    ((((a[4] * z + a[0]) * z + a[1]) * z + a[2]) * z + a[3])
        / ((((z + b[0]) * z + b[1]) * z + b[2]) * z + b[3])
}

/// `erfcx(y)` for `0.46875 < y ≤ 4`.
#[inline]
fn erfcx_mid(y: f64) -> f64 {
    let c = &ERFC_C;
    let d = &ERFC_D;
    let mut num = c[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + c[i]) * y;
        den = (den + d[i]) * y;
    }
    (num + c[7]) / (den + d[7])
}

/// `erfcx(y)` for `y > 4`: the asymptotic expansion
/// `erfcx(y) ~ (1/√π)(1/y)(1 − 1/(2y²) + 3/(4y⁴) − …)` in rational form.
#[inline]
fn erfcx_tail(y: f64) -> f64 {
    let p = &ERFC_P;
    let q = &ERFC_Q;
    let z = 1.0 / (y * y);
    let num = z * (((((p[5] * z + p[0]) * z + p[1]) * z + p[2]) * z + p[3]) * z + p[4]);
    let den = ((((z + q[0]) * z + q[1]) * z + q[2]) * z + q[3]) * z + q[4];
    (FRAC_1_SQRT_PI - num / den) / y
}

/// `exp(-y²)` with the square split at a multiple of 1/16 so the rounding of
/// `y²` does not get amplified for large `y`.
#[inline]
fn exp_neg_square(y: f64) -> f64 {
    let y_hi = (y * 16.0).trunc() / 16.0;
    let y_lo = y - y_hi;
    (-y_hi * y_hi).exp() * (-y_lo * (y + y_hi)).exp()
}

/// Scaled complementary error function for `y > 0.46875`.
#[inline]
fn erfcx_positive(y: f64) -> f64 {
    if y <= 4.0 {
        erfcx_mid(y)
    } else {
        erfcx_tail(y)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= ERF_THRESHOLD {
        return 1.0 - x * erf_small_ratio(y * y);
    }
    let upper = if y >= ERFC_XBIG {
        0.0
    } else {
        erfcx_positive(y) * exp_neg_square(y)
    };
    if x < 0.0 {
        2.0 - upper
    } else {
        upper
    }
}

/// Scaled complementary error function `exp(x²)·erfc(x)` for `x ≥ 0`.
///
/// Negative arguments are not needed by the normal-distribution routines
/// and are rejected by a debug assertion.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "erfcx is only defined here for x >= 0");
    if x <= ERF_THRESHOLD {
        (x * x).exp() * (1.0 - x * erf_small_ratio(x * x))
    } else {
        erfcx_positive(x)
    }
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF `Φ(x)`.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Natural log of the standard normal CDF, `ln Φ(x)`.
///
/// For `x < -1` the result is `ln(erfcx(-x/√2)/2) - x²/2`, which never forms
/// `Φ(x)` and so stays accurate where `Φ` underflows. Below `x ≈ -5.66` this
/// is the asymptotic Mills-ratio tail expansion carried by [`erfcx`].
pub fn log_norm_cdf(x: f64) -> f64 {
    if x < -1.0 {
        let y = -x * FRAC_1_SQRT_2;
        erfcx(y).ln() - LN_2 - 0.5 * x * x
    } else if x <= 0.0 {
        norm_cdf(x).ln()
    } else {
        // Φ(x) = 1 - Φ(-x); keep the small complement exact.
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    }
}

#[allow(clippy::excessive_precision)]
fn as241(p: f64) -> f64 {
    const SPLIT1: f64 = 0.425;
    const SPLIT2: f64 = 5.0;
    const CONST1: f64 = 0.180625;
    const CONST2: f64 = 1.6;
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34e0,
        4.630_337_846_156_545_295_90e0,
        5.769_497_221_460_691_405_50e0,
        3.647_848_324_763_204_605_04e0,
        1.270_458_252_452_368_382_58e0,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87e0,
        1.676_384_830_183_803_849_40e0,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20e0,
        5.463_784_911_164_114_369_90e0,
        1.784_826_539_917_291_335_80e0,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn ratio(num: &[f64; 8], den: &[f64; 8], r: f64) -> f64 {
        let n = num.iter().rev().fold(0.0, |acc, &c| acc * r + c);
        let d = den.iter().rev().fold(0.0, |acc, &c| acc * r + c);
        n / d
    }

    let q = p - 0.5;
    if q.abs() <= SPLIT1 {
        let r = CONST1 - q * q;
        return q * ratio(&A, &B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let x = if r <= SPLIT2 {
        ratio(&C, &D, r - CONST2)
    } else {
        ratio(&E, &F, r - SPLIT2)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Inverse standard normal CDF `Φ⁻¹(p)` for `0 < p < 1`.
pub fn norm_cdf_inv(p: f64) -> Result<f64, NumericsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericsError::ProbabilityOutOfRange(p));
    }
    let x = as241(p);
    // Residual taken on the smaller tail; 1 - p is exact for p ≥ 0.5.
    let residual = if p < 0.5 {
        norm_cdf(x) - p
    } else {
        (1.0 - p) - norm_cdf(-x)
    };
    let density = norm_pdf(x);
    if residual == 0.0 || !density.is_normal() {
        return Ok(x);
    }
    let u = residual / density;
    Ok(x - u / (1.0 + 0.5 * x * u))
}
