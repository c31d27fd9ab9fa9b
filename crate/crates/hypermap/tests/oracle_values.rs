//! Reference values computed independently in 120-digit arithmetic (mpmath)
//! at `h = 1/8`: disk weights by summing `#T_{n,p} λ^n`, `θ` and `π` as Taylor
//! coefficients of their generating functions, and `x_k` by iterating `g`.

#![allow(clippy::excessive_precision)] // digits are kept exactly as computed

use hypermap::model::{ModelParams, LAMBDA_C};
use hypermap::samplers::Sampler;

fn h8() -> ModelParams {
    ModelParams::from_h(0.125).unwrap()
}

fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    assert!(
        err <= tol,
        "{what}: got {got:e}, want {want:e} (relative error {err:e})"
    );
}

#[test]
fn constants() {
    let p = h8();
    assert_rel(LAMBDA_C, 0.048_112_522_432_468_813_709, 1e-15, "λ_c");
    assert_rel(p.lambda, 0.044_194_173_824_159_220_275, 1e-15, "λ");
    assert_rel(p.m, 0.171_572_875_253_809_902_397, 1e-15, "m");
    assert_rel(p.b, 0.881_373_587_019_543_025_233, 1e-15, "b");
    assert_rel(p.pi_at_theta0(), 1.171_572_875_253_809_902_397, 1e-14, "Π(θ(0))");
}

#[test]
fn disk_weights() {
    let want = [
        0.058_058_261_758_407_797_249,
        1.237_436_867_076_458_167_701,
        2.121_320_343_559_642_573_203,
        7.778_174_593_052_022_768_409,
        36.769_552_621_700_471_268_844,
        197.989_898_732_233_306_832_236,
    ];
    let p = h8();
    for (i, &w) in want.iter().enumerate() {
        assert_rel(p.disk_weight(i as u64 + 1), w, 1e-13, &format!("w({})", i + 1));
    }
}

#[test]
fn offspring_law() {
    let want = [
        0.875,
        0.093_75,
        0.021_484_375,
        0.006_347_656_25,
        0.002_136_230_468_75,
        0.000_778_198_242_187_5,
        0.000_298_976_898_193_359_375,
        0.000_119_328_498_840_332_031_25,
        0.000_049_009_919_166_564_941_406_25,
    ];
    let p = h8();
    for (i, &t) in want.iter().enumerate() {
        assert_rel(p.theta(i as u64), t, 1e-13, &format!("θ({i})"));
    }
}

#[test]
fn quasi_stationary_coefficients() {
    let want = [
        1.0,
        0.271_446_609_406_726_237_800,
        0.089_308_261_758_407_797_249,
        0.032_390_028_118_308_284_578,
        0.012_468_646_344_273_455_142,
        0.004_998_128_179_010_394_104,
        0.002_063_281_756_942_762_982,
        0.000_871_000_397_977_787_839,
        0.000_374_216_498_409_048_196,
        0.000_163_083_341_092_333_847,
    ];
    let p = h8();
    let series = p.big_pi_series(11);
    for (i, &v) in want.iter().enumerate() {
        assert_rel(series.coeff(i + 1), v, 1e-12, &format!("π({})", i + 1));
    }
}

#[test]
fn iterate_complements() {
    let want = [
        (1, 0.125),
        (2, 0.020_408_163_265_306_122_449),
        (5, 0.000_102_040_816_326_530_612_245),
        (10, 1.517_032_612_605_803_732_905e-8),
        (20, 3.353_367_933_876_951_369_677e-16),
        (30, 7.412_547_688_038_337_048_966e-24),
        (40, 1.638_527_722_304_470_836_626e-31),
        (50, 3.621_930_285_983_465_614_804e-39),
    ];
    let p = h8();
    for (k, c) in want {
        assert_rel(p.g_iter_complement(k, 0.0), c, 1e-12, &format!("c_{k}"));
    }
}

#[test]
fn reverse_tree_level_law() {
    let want = [
        (0, 1, 0.746_859_216_769_114_541_925),
        (0, 2, 0.177_390_851_834_121_903_023),
        (0, 3, 0.051_067_722_233_857_501_141),
        (0, 5, 0.005_458_713_033_763_483_789),
        (3, 1, 0.486_268_031_739_636_736_210),
        (3, 2, 0.263_454_775_983_556_954_685),
        (3, 3, 0.129_754_010_791_883_362_150),
        (3, 5, 0.030_069_803_849_565_720_994),
        (25, 1, 0.485_281_374_238_570_292_824),
        (25, 2, 0.263_455_967_290_593_061_219),
        (25, 3, 0.130_018_907_990_934_270_175),
        (25, 5, 0.030_254_009_164_218_739_760),
    ];
    let p = h8();
    for (r, k, v) in want {
        assert_rel(p.y_probability(r, k), v, 1e-11, &format!("P(Y({r}) = {k})"));
    }
}

#[test]
fn spine_means() {
    let p = h8();
    assert_rel(p.expected_lr(4), 0.825_311_973_241_841_002_512, 1e-11, "E[L_4 + R_4]");
    assert_rel(p.expected_lr(1), 0.300_813_008_130_081_300_813, 1e-11, "E[L_1 + R_1]");
}

#[test]
fn geodesic_offspring() {
    let want = [
        0.171_572_875_253_809_902_397,
        0.142_135_623_730_950_488_017,
        0.117_749_006_091_437_657_519,
        0.097_546_470_558_051_321_992,
    ];
    let p = h8();
    for (i, &v) in want.iter().enumerate() {
        assert_rel(p.mu(i as u64 + 1), v, 1e-14, &format!("μ({})", i + 1));
    }
}

#[test]
fn cone_weights() {
    let want = [
        22.627_416_997_969_520_780_827,
        452.548_339_959_390_415_616_540,
        7_783.831_447_301_515_148_604,
        128_161.689_876_499_365_702_604,
        2_075_929.745_061_715_714_516,
        33_397_343.411_659_077_647_836,
    ];
    let p = h8();
    for (i, &v) in want.iter().enumerate() {
        assert_rel(p.cone_weight(i as u64 + 1), v, 1e-13, &format!("c({})", i + 1));
    }
}

#[test]
fn perimeter_transitions() {
    let want = [
        (1, 0.002_459_490_740_740_740_741),
        (2, 0.003_063_688_552_919_238_683),
        (3, 0.003_282_029_551_352_111_509),
        (10, 0.003_370_260_525_882_259_255),
    ];
    let p = h8();
    for (q, v) in want {
        assert_rel(
            p.perimeter_transition(1, q, 3),
            v,
            1e-11,
            &format!("P(1 → {q} in 3 steps)"),
        );
    }
}

#[test]
fn critical_values() {
    let c = ModelParams::critical();
    assert_rel(c.pi_at_theta0(), 2.0, 1e-14, "Π(θ(0)) at λ_c");
    assert_rel(c.prob_y0_one(), 0.375, 1e-14, "P(Y(0) = 1) at λ_c");
}

#[test]
fn peeling_probabilities_match_weights() {
    // λ w(3)/w(2), w(1)w(2)/w(2) = w(1), and 1/w(2) at p = 2.
    let p = h8();
    let mut s = Sampler::new(p);
    let probs = s.peel_probabilities(2);
    assert_rel(
        probs[0],
        0.044_194_173_824_159_220_275 * 2.121_320_343_559_642_573_203 / 1.237_436_867_076_458_167_701,
        1e-13,
        "new vertex",
    );
    assert_rel(probs[1], 0.058_058_261_758_407_797_249, 1e-13, "split k = 1");
    assert_rel(probs[3], 1.0 / 1.237_436_867_076_458_167_701, 1e-13, "degenerate");
}

#[test]
fn mean_top_size_at_radius_zero() {
    // Both closed forms for E[Y(0)] agree with the mean of the law itself.
    let p = h8();
    let direct: f64 = (1..=400).map(|k| k as f64 * p.y_probability(0, k)).sum();
    assert_rel(p.expected_y0(), direct, 1e-10, "E[Y(0)] via Π'");
    assert_rel(p.expected_y0_ratio_form(), direct, 1e-10, "E[Y(0)] ratio form");
}
