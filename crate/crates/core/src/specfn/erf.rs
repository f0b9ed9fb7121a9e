//! Error function family.
//!
//! `erf`/`erfc` use the SunPro rational approximations (piecewise on |x|,
//! with an asymptotic rational form past 1.25). Inverses start from a
//! closed-form guess and are polished with Halley steps on `erfc` itself.

use crate::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const ERX: f64 = 8.450_629_115_104_675_292_97e-01;
const EFX: f64 = 1.283_791_670_955_125_863_16e-01;

const PP: [f64; 5] = [
    1.283_791_670_955_125_585_61e-01,
    -3.250_421_072_470_014_993_70e-01,
    -2.848_174_957_559_851_047_66e-02,
    -5.770_270_296_489_441_591_57e-03,
    -2.376_301_665_665_016_260_84e-05,
];
const QQ: [f64; 5] = [
    3.979_172_239_591_553_528_19e-01,
    6.502_224_998_876_729_444_85e-02,
    5.081_306_281_875_765_627_76e-03,
    1.324_947_380_043_216_445_26e-04,
    -3.960_228_278_775_368_123_20e-06,
];

const PA: [f64; 7] = [
    -2.362_118_560_752_659_440_77e-03,
    4.148_561_186_837_483_316_66e-01,
    -3.722_078_760_357_013_238_47e-01,
    3.183_466_199_011_617_536_74e-01,
    -1.108_946_942_823_966_774_76e-01,
    3.547_830_432_561_823_593_71e-02,
    -2.166_375_594_868_790_843_00e-03,
];
const QA: [f64; 6] = [
    1.064_208_804_008_442_282_86e-01,
    5.403_979_177_021_710_489_37e-01,
    7.182_865_441_419_626_628_68e-02,
    1.261_712_198_087_616_421_12e-01,
    1.363_708_391_202_905_073_62e-02,
    1.198_449_984_679_910_741_70e-02,
];

const RA: [f64; 8] = [
    -9.864_944_034_847_148_227_05e-03,
    -6.938_585_727_071_817_643_72e-01,
    -1.055_862_622_532_329_098_14e+01,
    -6.237_533_245_032_600_603_96e+01,
    -1.623_966_694_625_734_703_55e+02,
    -1.846_050_929_067_110_359_94e+02,
    -8.128_743_550_630_659_342_46e+01,
    -9.814_329_344_169_145_485_92e+00,
];
const SA: [f64; 8] = [
    1.965_127_166_743_925_712_92e+01,
    1.376_577_541_435_190_426_00e+02,
    4.345_658_774_752_292_288_21e+02,
    6.453_872_717_332_678_803_36e+02,
    4.290_081_400_275_678_333_86e+02,
    1.086_350_055_417_794_351_34e+02,
    6.570_249_770_319_281_701_35e+00,
    -6.042_441_521_485_809_874_38e-02,
];

const RB: [f64; 7] = [
    -9.864_942_924_700_099_285_97e-03,
    -7.992_832_376_805_230_065_74e-01,
    -1.775_795_491_775_475_198_89e+01,
    -1.606_363_848_558_219_160_62e+02,
    -6.375_664_433_683_896_277_22e+02,
    -1.025_095_131_611_077_249_54e+03,
    -4.835_191_916_086_513_970_19e+02,
];
const SB: [f64; 7] = [
    3.033_806_074_348_245_829_24e+01,
    3.257_925_129_965_739_188_26e+02,
    1.536_729_586_084_436_959_94e+03,
    3.199_858_219_508_595_539_08e+03,
    2.553_050_406_433_164_425_83e+03,
    4.745_285_412_069_553_672_15e+02,
    -2.244_095_244_658_581_833_62e+01,
];

/// Horner evaluation of `c[0] + c[1] z + ...`.
fn poly(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * z + k)
}

/// `1 + c[0] z + c[1] z^2 + ...`
fn poly1(c: &[f64], z: f64) -> f64 {
    1.0 + z * poly(c, z)
}

/// `R(x^2)` on `|x| < 0.84375`, where `erf(x) = x + x R`.
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    poly(&PP, z) / poly1(&QQ, z)
}

/// `P/Q` on `0.84375 <= |x| < 1.25`.
fn near_one_ratio(ax: f64) -> f64 {
    let s = ax - 1.0;
    poly(&PA, s) / poly1(&QA, s)
}

/// `erfc(|x|)` for `1.25 <= |x| < 28` via `exp(-x^2 - 0.5625 + R/S) / x`.
fn tail(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (poly(&RA, s), poly1(&SA, s))
    } else {
        (poly(&RB, s), poly1(&SB, s))
    };
    // split x so that -x^2 is formed without rounding loss
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / q).exp() / ax
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 0.84375 {
        if ax < 3.725_290_298_461_914e-9 {
            ax + EFX * ax
        } else {
            ax + ax * small_ratio(ax)
        }
    } else if ax < 1.25 {
        ERX + near_one_ratio(ax)
    } else if ax < 6.0 {
        1.0 - tail(ax)
    } else {
        1.0
    };
    v.copysign(x)
}

/// Complementary error function without argument checks.
pub(crate) fn erfc_raw(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let neg = x < 0.0;
    if ax < 0.84375 {
        if ax < 1.387_778_780_781_445_7e-17 {
            return 1.0 - x;
        }
        let y = small_ratio(ax);
        let e = if ax < 0.25 {
            ax + ax * y
        } else {
            0.5 + (ax * y + (ax - 0.5))
        };
        return if neg { 1.0 + e } else { 1.0 - e };
    }
    if ax < 1.25 {
        let pq = near_one_ratio(ax);
        return if neg { 1.0 + ERX + pq } else { 1.0 - ERX - pq };
    }
    if ax < 28.0 {
        if neg && ax >= 6.0 {
            return 2.0;
        }
        let r = tail(ax);
        return if neg { 2.0 - r } else { r };
    }
    if neg {
        2.0
    } else {
        0.0
    }
}

/// Complementary error function, `1 - erf(x)`.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("erfc", format!("non-finite argument {x}")));
    }
    Ok(erfc_raw(x))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc_raw(-x * FRAC_1_SQRT_2)
}

/// Inverse of [`erfc`] on `(0, 2)`.
pub fn erfc_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 2.0) {
        return Err(Error::domain("erfc_inv", format!("need 0 < y < 2, got {y}")));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    // reflect into (0, 1]; 2 - y is exact for y in [1, 2)
    if y > 1.0 {
        return Ok(-erfc_inv_lower(2.0 - y));
    }
    Ok(erfc_inv_lower(y))
}

/// `erfc_inv` for `0 < y < 1`.
fn erfc_inv_lower(y: f64) -> f64 {
    let mut x = initial_guess(y);
    // Halley on f(x) = erfc(x) - y; f'' / f' = -2x
    const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;
    for _ in 0..8 {
        let f = erfc_raw(x) - y;
        let fp = -TWO_OVER_SQRT_PI * (-x * x).exp();
        if fp == 0.0 {
            break;
        }
        let u = f / fp;
        let step = u / (1.0 + x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Rough `erfc_inv(y)` for `0 < y < 1` (absolute error below ~1e-3).
fn initial_guess(y: f64) -> f64 {
    // erfc_inv(y) = -Φ⁻¹(y/2)/√2; rational guess for the normal quantile
    let p = 0.5 * y;
    let q = acklam_lower(p);
    -q * FRAC_1_SQRT_2
}

/// Acklam's rational approximation to Φ⁻¹(p) for `0 < p <= 1/2`.
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Standard normal quantile Φ⁻¹(z) on `(0, 1)`.
///
/// Odd about 1/2: for `z >= 1/2` the result is `-normal_quantile(1 - z)`,
/// and `1 - z` is exact there.
pub fn normal_quantile(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(
            "normal_quantile",
            format!("need 0 < z < 1, got {z}"),
        ));
    }
    if z == 0.5 {
        return Ok(0.0);
    }
    if z > 0.5 {
        return Ok(-lower_quantile(1.0 - z));
    }
    Ok(lower_quantile(z))
}

fn lower_quantile(z: f64) -> f64 {
    // Φ⁻¹(z) = -√2 erfc⁻¹(2z); 2z is exact
    -SQRT_2 * erfc_inv_lower(2.0 * z)
}
