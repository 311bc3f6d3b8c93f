//! Mathematical constants shared by the special-function and asymptotic code.

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

pub const PI: f64 = std::f64::consts::PI;

/// `π²/6 = ζ(2)`.
pub const PI_SQ_OVER_6: f64 = 1.644_934_066_848_226_436_47;

/// `ζ(k)` for `k = 2..=31`, indexed by `k - 2`.
pub const ZETA: [f64; 30] = [
    1.644_934_066_848_226_436_472,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_516,
    1.036_927_755_143_369_926_331,
    1.017_343_061_984_449_139_715,
    1.008_349_277_381_922_826_84,
    1.004_077_356_197_944_339_379,
    1.002_008_392_826_082_214_418,
    1.000_994_575_127_818_085_337,
    1.000_494_188_604_119_464_559,
    1.000_246_086_553_308_048_299,
    1.000_122_713_347_578_489_147,
    1.000_061_248_135_058_704_829,
    1.000_030_588_236_307_020_494,
    1.000_015_282_259_408_651_872,
    1.000_007_637_197_637_899_762,
    1.000_003_817_293_264_999_84,
    1.000_001_908_212_716_553_939,
    1.000_000_953_962_033_872_796,
    1.000_000_476_932_986_787_806,
    1.000_000_238_450_502_727_733,
    1.000_000_119_219_925_965_311,
    1.000_000_059_608_189_051_259,
    1.000_000_029_803_503_514_652,
    1.000_000_014_901_554_828_365,
    1.000_000_007_450_711_789_835,
    1.000_000_003_725_334_024_788,
    1.000_000_001_862_659_723_513,
    1.000_000_000_931_327_432_42,
    1.000_000_000_465_662_906_503,
];

/// Largest `k` with `ζ(k)` in [`ZETA`].
pub const ZETA_MAX_ARG: usize = 31;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        assert!((ZETA[0] - PI * PI / 6.0).abs() < 1e-15);
        assert_eq!(ZETA[0], PI_SQ_OVER_6);
    }

    #[test]
    fn zeta_tail_approaches_one() {
        for (i, z) in ZETA.iter().enumerate().skip(10) {
            let k = (i + 2) as i32;
            // ζ(k) - 1 ≈ 2^{-k} for large k
            let excess = z - 1.0;
            assert!((excess / 0.5f64.powi(k) - 1.0).abs() < 0.1, "k = {k}");
        }
    }
}
