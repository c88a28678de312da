//! Numeric audits of five activation-function properties: oddness,
//! monotonicity, differentiability, unbounded value range, and gradient
//! continuity.
//!
//! Every property is checked on a uniform grid with explicit tolerances
//! from [`AuditConfig`], so verdicts are reproducible and tunable. Each
//! verdict carries the worst-case witness found. [`audit_matrix`] measures
//! the whole catalog and [`claimed_row`] holds the reference claims the
//! measured matrix is compared against.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::activation::{ActivationKind, ActivationSpec};

/// Grid bounds, tolerances and probes for the five property checks.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditConfig {
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    /// max |f(x) + f(-x)| allowed for an odd verdict
    pub odd_tol: f64,
    /// largest allowed decrease between adjacent grid values (0 = non-decreasing)
    pub mono_tol: f64,
    /// left/right difference-quotient agreement required for differentiable
    pub diff_agree_tol: f64,
    pub unbounded_probe: f64,
    pub unbounded_threshold: f64,
    /// adjacent gradient jumps beyond `factor * dx * L_est` fail continuity
    pub grad_jump_factor: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            grid_lo: -50.0,
            grid_hi: 50.0,
            grid_points: 100_001,
            odd_tol: 1e-9,
            mono_tol: 0.0,
            diff_agree_tol: 1e-4,
            unbounded_probe: 1e9,
            unbounded_threshold: 1e3,
            grad_jump_factor: 10.0,
        }
    }
}

/// Step used for the left/right difference quotients.
pub const DIFF_QUOTIENT_H: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidAuditConfig(pub &'static str);

impl core::fmt::Display for InvalidAuditConfig {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid audit config: {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InvalidAuditConfig {}

impl AuditConfig {
    pub fn validate(&self) -> Result<(), InvalidAuditConfig> {
        if !(self.grid_lo < self.grid_hi) {
            return Err(InvalidAuditConfig("grid_lo must be < grid_hi"));
        }
        if self.grid_points < 3 {
            return Err(InvalidAuditConfig("grid_points must be >= 3"));
        }
        if !(self.odd_tol > 0.0
            && self.diff_agree_tol > 0.0
            && self.unbounded_probe > 0.0
            && self.unbounded_threshold > 0.0
            && self.grad_jump_factor > 0.0)
        {
            return Err(InvalidAuditConfig("tolerances and probes must be > 0"));
        }
        if !(self.mono_tol >= 0.0) {
            return Err(InvalidAuditConfig("mono_tol must be >= 0"));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        (self.grid_hi - self.grid_lo) / (self.grid_points - 1) as f64
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.step();
        (0..self.grid_points).map(move |i| self.grid_lo + i as f64 * step)
    }
}

/// Outcome of one property check. `Declared*` marks a verdict copied from
/// the reference claims instead of being measured (only the reduced
/// softmax row, whose vector-valued original cannot be measured as a
/// scalar without changing its properties).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Pass,
    Fail,
    DeclaredPass,
    DeclaredFail,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::DeclaredPass)
    }

    pub fn is_declared(self) -> bool {
        matches!(self, Verdict::DeclaredPass | Verdict::DeclaredFail)
    }

    fn measured(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn declared(ok: bool) -> Self {
        if ok {
            Verdict::DeclaredPass
        } else {
            Verdict::DeclaredFail
        }
    }
}

/// Worst case found while scanning: where, and how large the checked
/// quantity was there.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub x: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyCheck {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl PropertyCheck {
    fn measured(ok: bool, witness: Witness) -> Self {
        PropertyCheck {
            verdict: Verdict::measured(ok),
            witness: Some(witness),
        }
    }
}

/// The five audited properties, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PropertyKind {
    Odd,
    Monotone,
    Differentiable,
    Unbounded,
    ContinuousGradient,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 5] = [
        PropertyKind::Odd,
        PropertyKind::Monotone,
        PropertyKind::Differentiable,
        PropertyKind::Unbounded,
        PropertyKind::ContinuousGradient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::Odd => "odd",
            PropertyKind::Monotone => "monotone",
            PropertyKind::Differentiable => "differentiable",
            PropertyKind::Unbounded => "unbounded",
            PropertyKind::ContinuousGradient => "continuous_gradient",
        }
    }
}

/// Per-activation verdicts with their numeric evidence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyReport {
    pub spec: ActivationSpec,
    pub odd: PropertyCheck,
    pub monotone: PropertyCheck,
    pub differentiable: PropertyCheck,
    pub unbounded: PropertyCheck,
    pub continuous_gradient: PropertyCheck,
    /// Informational: whether every adjacent grid step strictly increased
    /// (monotone is only checked as non-decreasing). None for declared rows.
    pub strictly_increasing: Option<bool>,
    pub note: Option<String>,
}

impl PropertyReport {
    pub fn check(&self, p: PropertyKind) -> &PropertyCheck {
        match p {
            PropertyKind::Odd => &self.odd,
            PropertyKind::Monotone => &self.monotone,
            PropertyKind::Differentiable => &self.differentiable,
            PropertyKind::Unbounded => &self.unbounded,
            PropertyKind::ContinuousGradient => &self.continuous_gradient,
        }
    }

    pub fn verdicts(&self) -> [Verdict; 5] {
        [
            self.odd.verdict,
            self.monotone.verdict,
            self.differentiable.verdict,
            self.unbounded.verdict,
            self.continuous_gradient.verdict,
        ]
    }
}

/// Odd iff max over the grid of |f(x) + f(-x)| stays within `odd_tol`.
pub fn check_odd_fn<F: Fn(f64) -> f64>(f: F, cfg: &AuditConfig) -> PropertyCheck {
    let mut worst = Witness {
        x: cfg.grid_lo,
        magnitude: -1.0,
    };
    for x in cfg.grid() {
        let m = (f(x) + f(-x)).abs();
        if m > worst.magnitude {
            worst = Witness { x, magnitude: m };
        }
    }
    PropertyCheck::measured(worst.magnitude <= cfg.odd_tol, worst)
}

/// Non-decreasing iff no adjacent grid pair drops by more than `mono_tol`.
/// The second return is the informational strictness flag.
pub fn check_monotone_fn<F: Fn(f64) -> f64>(f: F, cfg: &AuditConfig) -> (PropertyCheck, bool) {
    let mut worst = Witness {
        x: cfg.grid_lo,
        magnitude: f64::INFINITY,
    };
    let mut strict = true;
    let mut prev_x = f64::NAN;
    let mut prev = f64::NAN;
    for x in cfg.grid() {
        let v = f(x);
        if !prev.is_nan() {
            let d = v - prev;
            if d <= 0.0 {
                strict = false;
            }
            if d < worst.magnitude {
                worst = Witness {
                    x: prev_x,
                    magnitude: d,
                };
            }
        }
        prev_x = x;
        prev = v;
    }
    (
        PropertyCheck::measured(worst.magnitude >= -cfg.mono_tol, worst),
        strict,
    )
}

/// Differentiable iff left and right difference quotients (h = 1e-6) agree
/// within `diff_agree_tol` at every grid point. Catches the ReLU-style
/// kink at the origin.
pub fn check_differentiable_fn<F: Fn(f64) -> f64>(f: F, cfg: &AuditConfig) -> PropertyCheck {
    let h = DIFF_QUOTIENT_H;
    let mut worst = Witness {
        x: cfg.grid_lo,
        magnitude: -1.0,
    };
    for x in cfg.grid() {
        let v = f(x);
        let left = (v - f(x - h)) / h;
        let right = (f(x + h) - v) / h;
        let m = (left - right).abs();
        if m > worst.magnitude {
            worst = Witness { x, magnitude: m };
        }
    }
    PropertyCheck::measured(worst.magnitude <= cfg.diff_agree_tol, worst)
}

/// Unbounded iff BOTH tails escape: |f(+-probe)| >= threshold. One-sided
/// functions such as ReLU fail on their bounded tail.
pub fn check_unbounded_fn<F: Fn(f64) -> f64>(f: F, cfg: &AuditConfig) -> PropertyCheck {
    let hi = f(cfg.unbounded_probe).abs();
    let lo = f(-cfg.unbounded_probe).abs();
    let worst = if lo <= hi {
        Witness {
            x: -cfg.unbounded_probe,
            magnitude: lo,
        }
    } else {
        Witness {
            x: cfg.unbounded_probe,
            magnitude: hi,
        }
    };
    PropertyCheck::measured(worst.magnitude >= cfg.unbounded_threshold, worst)
}

/// Gradient continuity from the analytic gradient: adjacent jumps must stay
/// under `factor * dx * L_est`, with L_est the median jump floored at 1.
/// A unit step (ReLU at 0) against dx = 1e-3 fails by orders of magnitude.
pub fn check_continuous_gradient_fn<G: Fn(f64) -> f64>(g: G, cfg: &AuditConfig) -> PropertyCheck {
    let mut jumps: Vec<f64> = Vec::with_capacity(cfg.grid_points - 1);
    let mut locs: Vec<f64> = Vec::with_capacity(cfg.grid_points - 1);
    let mut prev = f64::NAN;
    for x in cfg.grid() {
        let v = g(x);
        if !prev.is_nan() {
            jumps.push((v - prev).abs());
            locs.push(x);
        }
        prev = v;
    }
    let mut sorted = jumps.clone();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite jumps"));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let l_est = median.max(1.0);
    let bound = cfg.grad_jump_factor * cfg.step() * l_est;

    let (mut worst_i, mut worst) = (0, -1.0);
    for (i, &j) in jumps.iter().enumerate() {
        if j > worst {
            worst = j;
            worst_i = i;
        }
    }
    PropertyCheck::measured(
        worst <= bound,
        Witness {
            x: locs[worst_i],
            magnitude: worst,
        },
    )
}

pub fn check_odd(spec: &ActivationSpec, cfg: &AuditConfig) -> PropertyCheck {
    check_odd_fn(|x| spec.eval(x), cfg)
}

pub fn check_monotone(spec: &ActivationSpec, cfg: &AuditConfig) -> (PropertyCheck, bool) {
    check_monotone_fn(|x| spec.eval(x), cfg)
}

pub fn check_differentiable(spec: &ActivationSpec, cfg: &AuditConfig) -> PropertyCheck {
    check_differentiable_fn(|x| spec.eval(x), cfg)
}

pub fn check_unbounded(spec: &ActivationSpec, cfg: &AuditConfig) -> PropertyCheck {
    check_unbounded_fn(|x| spec.eval(x), cfg)
}

pub fn check_continuous_gradient(spec: &ActivationSpec, cfg: &AuditConfig) -> PropertyCheck {
    check_continuous_gradient_fn(|x| spec.grad(x).value, cfg)
}

/// The reference claims for each catalog function (odd, monotone,
/// differentiable, unbounded, continuous gradient). Mish has no claimed
/// row. These are the values the measured matrix is compared against; see
/// the ELU note on [`audit`] for the one known internal inconsistency.
pub fn claimed_row(kind: ActivationKind) -> Option<[bool; 5]> {
    use ActivationKind::*;
    Some(match kind {
        Sigmoid => [false, true, true, false, true],
        Relu => [false, true, false, false, false],
        Prelu => [false, true, false, true, false],
        Elu => [false, true, true, false, false],
        Swish => [false, false, true, false, true],
        Tanh => [true, true, true, false, true],
        Softsign => [true, true, true, false, true],
        SoftmaxReduced => [false, false, true, false, true],
        Srs => [false, false, true, false, true],
        Serf => [false, false, true, false, true],
        Mish => return None,
        Tssr => [true, true, true, true, true],
    })
}

/// Runs all five checks. The reduced softmax gets a declared row (its
/// claims describe the vector-valued original). Any measured verdict that
/// contradicts the claimed row is surfaced in `note` rather than hidden;
/// with the default alpha = 0.5 that happens for exactly one cell, ELU's
/// differentiable column (no single alpha satisfies both the claimed
/// differentiable = yes and continuous gradient = no: alpha = 1 gives
/// yes/yes, anything else no/no).
pub fn audit(spec: &ActivationSpec, cfg: &AuditConfig) -> PropertyReport {
    if spec.kind() == ActivationKind::SoftmaxReduced {
        let row = claimed_row(spec.kind()).expect("softmax has a claimed row");
        let declared = |ok: bool| PropertyCheck {
            verdict: Verdict::declared(ok),
            witness: None,
        };
        return PropertyReport {
            spec: *spec,
            odd: declared(row[0]),
            monotone: declared(row[1]),
            differentiable: declared(row[2]),
            unbounded: declared(row[3]),
            continuous_gradient: declared(row[4]),
            strictly_increasing: None,
            note: Some(String::from(
                "softmax is vector-valued; row declared from the reference claims, not \
                 measured (the scalar two-logit reduction is a sigmoid and would measure \
                 differently)",
            )),
        };
    }

    let (monotone, strict) = check_monotone(spec, cfg);
    let report = PropertyReport {
        spec: *spec,
        odd: check_odd(spec, cfg),
        monotone,
        differentiable: check_differentiable(spec, cfg),
        unbounded: check_unbounded(spec, cfg),
        continuous_gradient: check_continuous_gradient(spec, cfg),
        strictly_increasing: Some(strict),
        note: None,
    };

    let note = claimed_row(spec.kind()).and_then(|claims| {
        let mut disagree: Vec<&str> = Vec::new();
        for (p, &claim) in PropertyKind::ALL.iter().zip(claims.iter()) {
            if report.check(*p).verdict.holds() != claim {
                disagree.push(p.name());
            }
        }
        if disagree.is_empty() {
            None
        } else {
            Some(format!(
                "measured {{{}}} disagrees with the claimed row",
                disagree.join(", ")
            ))
        }
    });
    PropertyReport { note, ..report }
}

/// Audits the whole catalog with default parameters, in catalog order.
pub fn audit_matrix(cfg: &AuditConfig) -> Vec<PropertyReport> {
    ActivationKind::ALL
        .iter()
        .map(|&k| audit(&ActivationSpec::new(k), cfg))
        .collect()
}

/// One measured-vs-claimed cell difference.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discrepancy {
    pub kind: ActivationKind,
    pub property: PropertyKind,
    pub measured: bool,
    pub claimed: bool,
}

/// All cells where a measured verdict contradicts the claims. Declared
/// rows and kinds without a claimed row are skipped.
pub fn compare_with_claims(reports: &[PropertyReport]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for r in reports {
        let Some(claims) = claimed_row(r.spec.kind()) else {
            continue;
        };
        for (p, &claim) in PropertyKind::ALL.iter().zip(claims.iter()) {
            let v = r.check(*p).verdict;
            if v.is_declared() {
                continue;
            }
            if v.holds() != claim {
                out.push(Discrepancy {
                    kind: r.spec.kind(),
                    property: *p,
                    measured: v.holds(),
                    claimed: claim,
                });
            }
        }
    }
    out
}
