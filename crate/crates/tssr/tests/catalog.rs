//! Catalog correctness against independently computed references and the
//! finite-difference oracle.

use proptest::prelude::*;
use tssr::rng::{Rng, Stream};
use tssr::{
    eval_batch, grad_batch, sign, tssr_backward, tssr_forward, ActivationKind, ActivationSpec,
    Tensor,
};

/// (x, f(x), f'(x)) computed with 50-digit arithmetic and rounded to the
/// nearest f64, for every catalog function at its default parameters.
const REFERENCE: &[(ActivationKind, &[(f64, f64, f64)])] = &[
    (
        ActivationKind::Sigmoid,
        &[
            (-3.5, 0.02931223075135632, 0.02845302387973556),
            (-1.5, 0.18242552380635635, 0.14914645207033286),
            (-0.75, 0.320821300824607, 0.21789499376181404),
            (0.6, 0.6456563062257955, 0.2287842404566573),
            (1.9, 0.8698915256370021, 0.11318025926193098),
            (3.2, 0.9608342772032357, 0.03763176895457137),
        ],
    ),
    (
        ActivationKind::Relu,
        &[
            (-3.5, 0.0, 0.0),
            (-0.75, 0.0, 0.0),
            (0.6, 0.6, 1.0),
            (3.2, 3.2, 1.0),
        ],
    ),
    (
        ActivationKind::Prelu,
        &[
            (-3.5, -0.875, 0.25),
            (-0.75, -0.1875, 0.25),
            (0.6, 0.6, 1.0),
            (1.9, 1.9, 1.0),
        ],
    ),
    (
        ActivationKind::Elu,
        &[
            (-3.5, -0.48490130828884076, 0.01509869171115925),
            (-1.5, -0.3884349199257851, 0.11156508007421491),
            (-0.75, -0.26381672362949266, 0.23618327637050734),
            (0.6, 0.6, 1.0),
            (3.2, 3.2, 1.0),
        ],
    ),
    (
        ActivationKind::Swish,
        &[
            (-3.5, -0.10259280762974711, -0.07027335282771814),
            (-1.5, -0.2736382857095345, -0.041294154299142946),
            (-0.75, -0.24061597561845527, 0.1574000555032465),
            (0.6, 0.3873937837354773, 0.7829268504997898),
            (1.9, 1.6527938987103041, 1.084934018234671),
            (3.2, 3.074669687050354, 1.0812559378578641),
        ],
    ),
    (
        ActivationKind::Tanh,
        &[
            (-3.5, -0.9981778976111987, 0.003640884720487306),
            (-1.5, -0.9051482536448664, 0.18070663892364852),
            (-0.75, -0.6351489523872873, 0.5965858082813315),
            (0.6, 0.5370495669980353, 0.7115777625872228),
            (1.9, 0.9562374581277391, 0.0856099236734005),
            (3.2, 0.9966823978396512, 0.006624197836603336),
        ],
    ),
    (
        ActivationKind::Softsign,
        &[
            (-3.5, -0.7777777777777778, 0.04938271604938271),
            (-1.5, -0.6, 0.16),
            (-0.75, -0.42857142857142855, 0.32653061224489793),
            (0.6, 0.375, 0.390625),
            (1.9, 0.6551724137931034, 0.11890606420927467),
            (3.2, 0.7619047619047619, 0.05668934240362812),
        ],
    ),
    (
        ActivationKind::SoftmaxReduced,
        &[
            (-1.5, 0.18242552380635635, 0.14914645207033286),
            (0.6, 0.6456563062257955, 0.2287842404566573),
            (3.2, 0.9608342772032357, 0.03763176895457137),
        ],
    ),
    (
        ActivationKind::Srs,
        &[
            (-3.5, -2.395175907978455, -0.25064808205041256),
            (-1.5, -1.6690380531791125, 1.0206273548863578),
            (-0.75, -0.8250594386379317, 1.1654209772807014),
            (0.6, 0.5363220760216079, 0.7850027828150884),
            (1.9, 1.2830733681131046, 0.39538249074552667),
            (3.2, 1.6459603255766133, 0.18817492699176694),
        ],
    ),
    (
        ActivationKind::Serf,
        &[
            (-3.5, -0.1174594776798823, -0.08210132049699291),
            (-1.5, -0.3363515085255326, -0.0722581951350012),
            (-0.75, -0.3117768652495991, 0.18193773819257866),
            (0.6, 0.514611824238282, 1.0066709364936974),
            (1.9, 1.892542525327414, 1.0252090254971666),
            (3.2, 3.199985261412566, 1.0000911874843392),
        ],
    ),
    (
        ActivationKind::Mish,
        &[
            (-3.5, -0.10409575448637122, -0.07276041344326704),
            (-1.5, -0.29809974216680674, -0.06409781589225864),
            (-0.75, -0.2764947145054652, 0.1607457404998387),
            (0.6, 0.46613648569432903, 0.9304707876297239),
            (1.9, 1.8367436005523152, 1.0749275910630463),
            (3.2, 3.1901977316371823, 1.0157446516214457),
        ],
    ),
    (
        ActivationKind::Tssr,
        &[
            (-3.5, -2.7416573867739413, 0.5345224838248488),
            (-1.5, -1.449489742783178, 0.816496580927726),
            (-0.75, -0.75, 1.0),
            (0.6, 0.6, 1.0),
            (1.9, 1.7568097504180444, 0.7254762501100117),
            (3.2, 2.5777087639996634, 0.5590169943749475),
        ],
    ),
];

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

#[test]
fn values_and_gradients_match_reference_table() {
    for &(kind, rows) in REFERENCE {
        let spec = ActivationSpec::new(kind);
        for &(x, f, fp) in rows {
            let got = spec.eval(x);
            assert!(
                rel_err(got, f) < 1e-12,
                "{kind} eval({x}): got {got}, want {f}"
            );
            let g = spec.grad(x).value;
            assert!(
                rel_err(g, fp) < 1e-12,
                "{kind} grad({x}): got {g}, want {fp}"
            );
        }
    }
}

#[test]
fn named_spot_values() {
    let eval = |k, x| ActivationSpec::new(k).eval(x);
    assert_eq!(eval(ActivationKind::Sigmoid, 0.0), 0.5);
    assert_eq!(eval(ActivationKind::Softsign, 1.0), 0.5);
    assert_eq!(eval(ActivationKind::Srs, 0.0), 0.0);
    assert_eq!(
        ActivationSpec::new(ActivationKind::Tanh).grad(0.0).value,
        1.0
    );
    assert_eq!(
        ActivationSpec::new(ActivationKind::Tssr).grad(100.0).value,
        0.1
    );
    assert!((eval(ActivationKind::Mish, 1.0) - 0.8650983882673103).abs() < 1e-14);
    assert!((eval(ActivationKind::Srs, 1.0) - 0.8220092580505305).abs() < 1e-14);
    assert!((eval(ActivationKind::Swish, 1.0) - 0.7310585786300049).abs() < 1e-14);
}

/// The log inside serf is the natural one: serf(1) has a distinct value
/// under ln vs log10, and serf(x) -> x as x -> +inf.
#[test]
fn serf_uses_natural_log() {
    let serf = ActivationSpec::new(ActivationKind::Serf);
    assert!((serf.eval(1.0) - 0.9367219154717153).abs() < 1e-14);
    assert_eq!(serf.eval(20.0), 20.0);
}

/// erf accuracy contract: absolute error at or below 1e-12.
#[test]
fn erf_reference_table() {
    const TABLE: &[(f64, f64)] = &[
        (0.1, 0.1124629160182849),
        (0.5, 0.5204998778130465),
        (1.0, 0.8427007929497149),
        (1.3133, 0.9367296203325075),
        (2.0, 0.9953222650189527),
        (3.0, 0.9999779095030014),
        (4.5, 0.9999999998033839),
        (-0.7, -0.6778011938374184),
        (-2.5, -0.999593047982555),
    ];
    for &(x, want) in TABLE {
        assert!(
            (tssr::math::erf(x) - want).abs() <= 1e-12,
            "erf({x}) = {}, want {want}",
            tssr::math::erf(x)
        );
    }
}

/// Central finite differences (h = 1e-6) against the analytic gradient at
/// 1000 seeded points per activation, kink neighborhoods excluded.
#[test]
fn finite_differences_agree_with_analytic_gradients() {
    let h = 1e-6;
    for kind in ActivationKind::ALL {
        let spec = ActivationSpec::new(kind);
        let kinks: &[f64] = match kind {
            ActivationKind::Relu | ActivationKind::Prelu | ActivationKind::Elu => &[0.0],
            _ => &[],
        };
        let mut rng = Rng::new(0x5eed + kind as u64, Stream::Probe);
        let mut checked = 0;
        while checked < 1000 {
            let x = rng.uniform_in(-4.0, 4.0);
            if kinks.iter().any(|&k| (x - k).abs() <= 1e-4) {
                continue;
            }
            checked += 1;
            let fd = (spec.eval(x + h) - spec.eval(x - h)) / (2.0 * h);
            let an = spec.grad(x).value;
            assert!(
                rel_err(fd, an) < 1e-5,
                "{kind} at x={x}: analytic {an} vs fd {fd}"
            );
        }
    }
}

/// No catalog function may produce a non-finite value or gradient anywhere
/// on the f64 axis, including the extreme magnitudes.
#[test]
fn overflow_policy_covers_extreme_inputs() {
    let probes = [
        -1e308, -1e100, -745.0, -700.0, -30.0, 0.0, 30.0, 700.0, 745.0, 1e100, 1e308,
    ];
    for kind in ActivationKind::ALL {
        let spec = ActivationSpec::new(kind);
        for &x in &probes {
            let f = spec.eval(x);
            let g = spec.grad(x).value;
            assert!(f.is_finite(), "{kind} eval({x}) = {f}");
            assert!(g.is_finite(), "{kind} grad({x}) = {g}");
        }
    }
}

#[test]
fn tssr_gradient_range_over_wide_samples() {
    let mut rng = Rng::new(99, Stream::Probe);
    for _ in 0..100_000 {
        let x = rng.uniform_in(-1e12, 1e12);
        let g = tssr_backward(x);
        assert!(g > 0.0 && g <= 1.0, "gradient {g} at {x}");
    }
}

#[test]
fn sign_and_branch_boundaries() {
    assert_eq!(sign(5.0), 1.0);
    assert_eq!(sign(-3.0), -1.0);
    assert_eq!(sign(0.0), 0.0);
    // both branch expressions give exactly the same value at |x| = 1
    assert_eq!(2.0 * libm::sqrt(1.0f64) - 1.0, tssr_forward(1.0));
    assert_eq!(-(2.0 * libm::sqrt(1.0f64) - 1.0), tssr_forward(-1.0));
    assert_eq!(1.0 / libm::sqrt(1.0f64), tssr_backward(1.0));
}

#[test]
fn batch_examples() {
    let tssr = ActivationSpec::new(ActivationKind::Tssr);
    let grads = grad_batch(&tssr, &Tensor::from_vec(vec![0.5, 1.0, 4.0]));
    assert_eq!(grads.values.data(), &[1.0, 1.0, 0.5]);
    assert_eq!(grads.kinks, vec![false, false, false]);

    let prelu = ActivationSpec::new(ActivationKind::Prelu);
    let g = grad_batch(&prelu, &Tensor::from_vec(vec![0.0]));
    assert_eq!(g.values.data(), &[1.0]);
    assert_eq!(g.kinks, vec![true]);
}

proptest! {
    /// Exact oddness: the two halves of the axis are bitwise mirrors.
    #[test]
    fn tssr_is_odd_bit_exactly(x in prop::num::f64::NORMAL.prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(
            tssr_forward(-x).to_bits(),
            (-tssr_forward(x)).to_bits()
        );
    }

    /// Strict monotonicity over well-separated pairs.
    #[test]
    fn tssr_is_strictly_increasing(a in -1e6f64..1e6, d in 1e-6f64..1e6) {
        let b = a + d;
        prop_assert!(tssr_forward(a) < tssr_forward(b));
    }

    /// Gradient stays in (0, 1] everywhere.
    #[test]
    fn tssr_gradient_in_unit_interval(x in -1e12f64..1e12) {
        let g = tssr_backward(x);
        prop_assert!(g > 0.0 && g <= 1.0);
    }

    /// Exact batch mode is bit-identical to scalar evaluation.
    #[test]
    fn batch_matches_scalar_bit_exactly(
        kind_idx in 0usize..12,
        xs in prop::collection::vec(-1e6f64..1e6, 0..64),
    ) {
        let spec = ActivationSpec::new(ActivationKind::ALL[kind_idx]);
        let out = eval_batch(&spec, &Tensor::from_vec(xs.clone()), false);
        for (o, x) in out.data().iter().zip(&xs) {
            prop_assert_eq!(o.to_bits(), spec.eval(*x).to_bits());
        }
    }

    /// Approximate TSSR stays within 1e-4 relative error of exact.
    #[test]
    fn approximate_tssr_within_bound(mag in 1.000001f64..1e12, neg in any::<bool>()) {
        let x = if neg { -mag } else { mag };
        let spec = ActivationSpec::new(ActivationKind::Tssr);
        let exact = eval_batch(&spec, &Tensor::from_vec(vec![x]), false);
        let approx = eval_batch(&spec, &Tensor::from_vec(vec![x]), true);
        let rel = (approx.data()[0] - exact.data()[0]).abs() / exact.data()[0].abs();
        prop_assert!(rel <= 1e-4, "x={} rel={}", x, rel);
    }
}
