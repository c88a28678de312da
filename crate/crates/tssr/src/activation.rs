//! The scalar activation catalog: twelve functions with analytic gradients.
//!
//! The star of the crate is the truncated and signed square root (TSSR):
//! identity on [-1, 1], `sign(x) * (2*sqrt(|x|) - 1)` outside. Its gradient
//! is 1 inside the identity region and `1/sqrt(|x|)` outside, so it is
//! always in (0, 1].

use core::fmt;
use core::str::FromStr;

use crate::math;

/// Which activation function a spec selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ActivationKind {
    Sigmoid,
    Relu,
    Prelu,
    Elu,
    Swish,
    Tanh,
    Softsign,
    /// Two-logit reduction of softmax with the second logit pinned at 0,
    /// i.e. `e^x / (e^x + 1)`. Exposed for curve plotting; the vector
    /// original is out of scope.
    SoftmaxReduced,
    /// Soft-Root-Sign: `x / (x/alpha + e^(-x/beta))`.
    Srs,
    /// `x * erf(ln(1 + e^x))`.
    Serf,
    /// `x * tanh(ln(1 + e^x))`.
    Mish,
    /// Truncated and signed square root.
    Tssr,
}

impl ActivationKind {
    /// Catalog order used everywhere a full matrix is produced.
    pub const ALL: [ActivationKind; 12] = [
        ActivationKind::Sigmoid,
        ActivationKind::Relu,
        ActivationKind::Prelu,
        ActivationKind::Elu,
        ActivationKind::Swish,
        ActivationKind::Tanh,
        ActivationKind::Softsign,
        ActivationKind::SoftmaxReduced,
        ActivationKind::Srs,
        ActivationKind::Serf,
        ActivationKind::Mish,
        ActivationKind::Tssr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Relu => "relu",
            ActivationKind::Prelu => "prelu",
            ActivationKind::Elu => "elu",
            ActivationKind::Swish => "swish",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Softsign => "softsign",
            ActivationKind::SoftmaxReduced => "softmax_reduced",
            ActivationKind::Srs => "srs",
            ActivationKind::Serf => "serf",
            ActivationKind::Mish => "mish",
            ActivationKind::Tssr => "tssr",
        }
    }

    fn uses_alpha(self) -> bool {
        matches!(
            self,
            ActivationKind::Prelu | ActivationKind::Elu | ActivationKind::Srs
        )
    }

    fn uses_beta(self) -> bool {
        self == ActivationKind::Srs
    }

    /// Default shape parameters (alpha, beta). Only PReLU, ELU and SRS use
    /// them; the values are chosen so the measured property matrix is
    /// reproducible.
    pub fn default_params(self) -> (f64, f64) {
        match self {
            ActivationKind::Prelu => (0.25, 0.0),
            ActivationKind::Elu => (0.5, 0.0),
            ActivationKind::Srs => (2.0, 3.0),
            _ => (0.0, 0.0),
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = UnknownActivation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivationKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or(UnknownActivation)
    }
}

/// Error for parsing an activation name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownActivation;

impl fmt::Display for UnknownActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown activation name")
    }
}

/// Invalid shape parameter for an activation spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamError {
    pub kind: ActivationKind,
    pub param: &'static str,
    pub value: f64,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid {} for {}: {} (must be finite{})",
            self.param,
            self.kind,
            self.value,
            if self.kind == ActivationKind::Elu || self.kind == ActivationKind::Srs {
                " and > 0"
            } else {
                ""
            }
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

/// An activation function together with its shape parameters.
///
/// Parameters are validated on construction; kinds that take none ignore
/// the inputs and are normalized to their defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActivationSpec {
    kind: ActivationKind,
    alpha: f64,
    beta: f64,
}

impl ActivationSpec {
    /// A spec with the kind's default parameters.
    pub fn new(kind: ActivationKind) -> Self {
        let (alpha, beta) = kind.default_params();
        ActivationSpec { kind, alpha, beta }
    }

    /// A spec with explicit parameters. `alpha` must be finite (and > 0 for
    /// ELU and SRS); `beta` must be finite (> 0 for SRS). Parameters the
    /// kind does not use are replaced by defaults.
    pub fn with_params(kind: ActivationKind, alpha: f64, beta: f64) -> Result<Self, ParamError> {
        let (da, db) = kind.default_params();
        let alpha = if kind.uses_alpha() { alpha } else { da };
        let beta = if kind.uses_beta() { beta } else { db };
        if !alpha.is_finite()
            || ((kind == ActivationKind::Elu || kind == ActivationKind::Srs) && alpha <= 0.0)
        {
            return Err(ParamError {
                kind,
                param: "alpha",
                value: alpha,
            });
        }
        if !beta.is_finite() || (kind == ActivationKind::Srs && beta <= 0.0) {
            return Err(ParamError {
                kind,
                param: "beta",
                value: beta,
            });
        }
        Ok(ActivationSpec { kind, alpha, beta })
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Scalar forward evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            ActivationKind::Sigmoid | ActivationKind::SoftmaxReduced => math::sigmoid(x),
            ActivationKind::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            ActivationKind::Prelu => {
                if x > 0.0 {
                    x
                } else {
                    self.alpha * x
                }
            }
            ActivationKind::Elu => {
                if x > 0.0 {
                    x
                } else {
                    self.alpha * libm::expm1(x)
                }
            }
            ActivationKind::Swish => x * math::sigmoid(x),
            ActivationKind::Tanh => libm::tanh(x),
            ActivationKind::Softsign => x / (1.0 + x.abs()),
            ActivationKind::Srs => {
                let e = libm::exp(-x / self.beta);
                // e overflows for very negative x; the limit of f is 0.
                if e.is_infinite() {
                    return 0.0;
                }
                x / (x / self.alpha + e)
            }
            ActivationKind::Serf => x * math::erf(math::softplus(x)),
            ActivationKind::Mish => x * libm::tanh(math::softplus(x)),
            ActivationKind::Tssr => tssr_forward(x),
        }
    }

    /// Analytic derivative. At a declared kink (ReLU/PReLU at 0, ELU at 0
    /// for alpha != 1) the right-hand derivative is returned with
    /// `at_kink` set instead of failing.
    pub fn grad(&self, x: f64) -> Grad {
        let v = match self.kind {
            ActivationKind::Sigmoid | ActivationKind::SoftmaxReduced => {
                let s = math::sigmoid(x);
                s * (1.0 - s)
            }
            ActivationKind::Relu => {
                if x == 0.0 {
                    return Grad::kink(1.0);
                } else if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Prelu => {
                if x == 0.0 {
                    return if self.alpha == 1.0 {
                        Grad::smooth(1.0)
                    } else {
                        Grad::kink(1.0)
                    };
                } else if x > 0.0 {
                    1.0
                } else {
                    self.alpha
                }
            }
            ActivationKind::Elu => {
                if x == 0.0 {
                    return if self.alpha == 1.0 {
                        Grad::smooth(1.0)
                    } else {
                        Grad::kink(1.0)
                    };
                } else if x > 0.0 {
                    1.0
                } else {
                    self.alpha * libm::exp(x)
                }
            }
            ActivationKind::Swish => {
                let s = math::sigmoid(x);
                s * (1.0 + x * (1.0 - s))
            }
            ActivationKind::Tanh => {
                let t = libm::tanh(x);
                1.0 - t * t
            }
            ActivationKind::Softsign => {
                let d = 1.0 + x.abs();
                1.0 / (d * d)
            }
            ActivationKind::Srs => {
                let e = libm::exp(-x / self.beta);
                if e.is_infinite() {
                    return Grad::smooth(0.0);
                }
                let d = x / self.alpha + e;
                e * (1.0 + x / self.beta) / (d * d)
            }
            ActivationKind::Serf => {
                let sp = math::softplus(x);
                // inner factors first so huge |x| cannot overflow through
                // the x * ... product
                math::erf(sp)
                    + x * (core::f64::consts::FRAC_2_SQRT_PI
                        * libm::exp(-sp * sp)
                        * math::sigmoid(x))
            }
            ActivationKind::Mish => {
                let t = libm::tanh(math::softplus(x));
                t + x * ((1.0 - t * t) * math::sigmoid(x))
            }
            ActivationKind::Tssr => tssr_backward(x),
        };
        Grad::smooth(v)
    }
}

/// A derivative value plus a flag marking evaluation exactly at a kink,
/// where the value is the right-hand derivative by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grad {
    pub value: f64,
    pub at_kink: bool,
}

impl Grad {
    fn smooth(value: f64) -> Self {
        Grad {
            value,
            at_kink: false,
        }
    }

    fn kink(value: f64) -> Self {
        Grad {
            value,
            at_kink: true,
        }
    }
}

/// Sign of `x`: 1 for positive, -1 for negative, 0 at the origin (so the
/// truncated square root maps 0 to 0 on both code paths).
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Truncated and signed square root: `x` when |x| <= 1, else
/// `sign(x) * (2*sqrt(|x|) - 1)`. Odd, strictly increasing, unbounded.
#[inline]
pub fn tssr_forward(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        x
    } else {
        sign(x) * (2.0 * libm::sqrt(a) - 1.0)
    }
}

/// Gradient of [`tssr_forward`]: 1 when |x| <= 1, else `1/sqrt(|x|)`.
/// Always in (0, 1]; both branches give exactly 1 at |x| = 1.
#[inline]
pub fn tssr_backward(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else {
        1.0 / libm::sqrt(a)
    }
}
