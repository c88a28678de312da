//! Minimal deterministic reverse-mode network core: dense and 2-D
//! convolution layers, pluggable catalog activations, softmax
//! cross-entropy, SGD with momentum.
//!
//! Everything is a pure function of (spec, dataset, optimizer); identical
//! seeds give bit-identical runs. All transcendentals go through libm, so
//! runs reproduce across platforms too.

pub mod data;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::activation::ActivationSpec;
use crate::batch::{eval_batch, grad_batch};
use crate::rng::{Rng, Stream};
use crate::tensor::{ShapeError, Tensor};

use data::Dataset;

/// One layer in a declarative network description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LayerSpec {
    Dense {
        inputs: usize,
        outputs: usize,
    },
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
    },
    Activation(ActivationSpec),
    Flatten,
    /// Classification head; must be the last layer.
    SoftmaxCrossEntropy,
}

/// Weight init family. He is the usual choice after rectifier-style
/// activations; Xavier suits saturating ones. Xavier is additionally
/// scaled by 1/g'(0) of the following activation so small-slope functions
/// (sigmoid: 1/4) start with usable signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitScheme {
    He,
    Xavier,
}

impl InitScheme {
    /// Default family for an activation: He for the rectifier-like and
    /// unbounded kinds (the truncated square root is exactly linear in
    /// [-1, 1], so it needs He-scale inputs to engage its nonlinearity),
    /// Xavier for the saturating ones.
    pub fn default_for(kind: crate::ActivationKind) -> InitScheme {
        use crate::ActivationKind::*;
        match kind {
            Relu | Prelu | Elu | Swish | Serf | Mish | Tssr => InitScheme::He,
            Sigmoid | Tanh | Softsign | SoftmaxReduced | Srs => InitScheme::Xavier,
        }
    }
}

/// Declarative network: input shape (per sample), layer stack, seeded init.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkSpec {
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
    pub init_seed: u64,
    pub init_scheme: InitScheme,
}

impl NetworkSpec {
    /// Convenience MLP: dense/activation pairs over the hidden sizes, a
    /// final dense to `classes`, and the cross-entropy head.
    pub fn mlp(
        inputs: usize,
        hidden: &[usize],
        classes: usize,
        activation: ActivationSpec,
        init_seed: u64,
        init_scheme: InitScheme,
    ) -> NetworkSpec {
        let mut layers = Vec::new();
        let mut prev = inputs;
        for &h in hidden {
            layers.push(LayerSpec::Dense {
                inputs: prev,
                outputs: h,
            });
            layers.push(LayerSpec::Activation(activation));
            prev = h;
        }
        layers.push(LayerSpec::Dense {
            inputs: prev,
            outputs: classes,
        });
        layers.push(LayerSpec::SoftmaxCrossEntropy);
        NetworkSpec {
            input_shape: vec![inputs],
            layers,
            init_seed,
            init_scheme,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    BadLayer { index: usize, reason: &'static str },
    Shape(ShapeError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::BadLayer { index, reason } => {
                write!(f, "layer {index}: {reason}")
            }
            BuildError::Shape(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BuildError {}

/// A cache handed to [`Network::backward`] that does not match the network
/// it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct StaleCache;

impl fmt::Display for StaleCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("forward cache does not match this network")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StaleCache {}

enum Layer {
    Dense {
        w: Tensor,
        b: Tensor,
    },
    Conv2d {
        w: Tensor,
        b: Tensor,
        kernel: usize,
        stride: usize,
        pad: usize,
        in_shape: [usize; 3],
        out_shape: [usize; 3],
    },
    Activation(ActivationSpec),
    Flatten {
        from: Vec<usize>,
    },
}

/// A built network: validated shapes, initialized weights.
pub struct Network {
    spec: NetworkSpec,
    layers: Vec<Layer>,
}

/// Per-layer inputs captured by forward, as needed by backward.
pub struct ForwardCache {
    inputs: Vec<Tensor>,
    logits: Tensor,
    batch: usize,
}

impl ForwardCache {
    pub fn logits(&self) -> &Tensor {
        &self.logits
    }

    /// The tensor each layer consumed, in layer order (an activation
    /// layer's entry is its pre-activation).
    pub fn layer_inputs(&self) -> &[Tensor] {
        &self.inputs
    }
}

/// Parameter gradients, aligned with the network's parameter layers.
pub struct Gradients {
    per_layer: Vec<Option<(Tensor, Tensor)>>,
}

impl Gradients {
    /// All gradients in parameter order (per layer: weights then bias).
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in self.per_layer.iter().flatten() {
            out.extend_from_slice(g.0.data());
            out.extend_from_slice(g.1.data());
        }
        out
    }
}

/// Everything backward produces in one pass.
pub struct BackwardResult {
    pub loss: f64,
    pub grads: Gradients,
    /// Range of activation-layer local gradients seen in this pass
    /// (None when the network has no activation layers).
    pub act_grad_range: Option<(f64, f64)>,
    /// Elements that sat exactly on a declared activation kink.
    pub kink_hits: u64,
}

impl Network {
    /// Validates layer compatibility against the declared input shape and
    /// draws the initial weights.
    pub fn build(spec: &NetworkSpec) -> Result<Network, BuildError> {
        let bad = |index: usize, reason: &'static str| BuildError::BadLayer { index, reason };
        if spec.layers.is_empty() {
            return Err(bad(0, "network has no layers"));
        }
        match spec.layers.last() {
            Some(LayerSpec::SoftmaxCrossEntropy) => {}
            _ => {
                return Err(bad(
                    spec.layers.len() - 1,
                    "last layer must be softmax_cross_entropy",
                ))
            }
        }

        let mut shape: Vec<usize> = spec.input_shape.clone();
        if shape.iter().product::<usize>() == 0 {
            return Err(bad(0, "input shape must have positive extents"));
        }
        let mut layers = Vec::with_capacity(spec.layers.len() - 1);
        for (i, ls) in spec.layers.iter().enumerate() {
            match *ls {
                LayerSpec::Dense { inputs, outputs } => {
                    if inputs == 0 || outputs == 0 {
                        return Err(bad(i, "dense dimensions must be positive"));
                    }
                    if shape != [inputs] {
                        return Err(BuildError::Shape(ShapeError {
                            expected: vec![inputs],
                            got: shape.clone(),
                            context: "dense layer input",
                        }));
                    }
                    layers.push(Layer::Dense {
                        w: Tensor::zeros(vec![outputs, inputs]),
                        b: Tensor::zeros(vec![outputs]),
                    });
                    shape = vec![outputs];
                }
                LayerSpec::Conv2d {
                    in_channels,
                    out_channels,
                    kernel,
                    stride,
                    pad,
                } => {
                    if in_channels == 0 || out_channels == 0 || kernel == 0 || stride == 0 {
                        return Err(bad(i, "conv dimensions must be positive"));
                    }
                    if shape.len() != 3 || shape[0] != in_channels {
                        return Err(BuildError::Shape(ShapeError {
                            expected: vec![in_channels, 0, 0],
                            got: shape.clone(),
                            context: "conv layer input (channels, height, width)",
                        }));
                    }
                    let (h, w) = (shape[1], shape[2]);
                    if h + 2 * pad < kernel || w + 2 * pad < kernel {
                        return Err(bad(i, "kernel larger than padded input"));
                    }
                    let oh = (h + 2 * pad - kernel) / stride + 1;
                    let ow = (w + 2 * pad - kernel) / stride + 1;
                    layers.push(Layer::Conv2d {
                        w: Tensor::zeros(vec![out_channels, in_channels, kernel, kernel]),
                        b: Tensor::zeros(vec![out_channels]),
                        kernel,
                        stride,
                        pad,
                        in_shape: [in_channels, h, w],
                        out_shape: [out_channels, oh, ow],
                    });
                    shape = vec![out_channels, oh, ow];
                }
                LayerSpec::Activation(spec) => layers.push(Layer::Activation(spec)),
                LayerSpec::Flatten => {
                    let from = shape.clone();
                    shape = vec![shape.iter().product()];
                    layers.push(Layer::Flatten { from });
                }
                LayerSpec::SoftmaxCrossEntropy => {
                    if i != spec.layers.len() - 1 {
                        return Err(bad(i, "softmax_cross_entropy must be the last layer"));
                    }
                    if shape.len() != 1 || shape[0] < 2 {
                        return Err(bad(i, "classification head needs >= 2 logits"));
                    }
                }
            }
        }

        let mut net = Network {
            spec: spec.clone(),
            layers,
        };
        net.init_weights();
        Ok(net)
    }

    /// He: N(0, sqrt(2/fan_in)). Xavier: N(0, gain * sqrt(2/(fan_in+fan_out)))
    /// with gain = 1/g'(0) of the next activation layer (1 if none).
    /// Draw order is fixed by the layer stack, so two networks differing
    /// only in activation kind (same scheme) share identical weights.
    fn init_weights(&mut self) {
        let mut rng = Rng::new(self.spec.init_seed, Stream::Init);
        let scheme = self.spec.init_scheme;
        let gains: Vec<f64> = (0..self.layers.len())
            .map(|i| {
                if scheme == InitScheme::He {
                    return 1.0;
                }
                let next_act = self.layers[i + 1..].iter().find_map(|l| match l {
                    Layer::Activation(a) => Some(*a),
                    _ => None,
                });
                match next_act {
                    Some(a) => {
                        let slope = a.grad(0.0).value;
                        if slope.is_finite() && slope > 0.0 {
                            1.0 / slope
                        } else {
                            1.0
                        }
                    }
                    None => 1.0,
                }
            })
            .collect();
        for (layer, gain) in self.layers.iter_mut().zip(gains) {
            let (w, fan_in, fan_out) = match layer {
                Layer::Dense { w, .. } => {
                    let (o, i) = (w.shape()[0], w.shape()[1]);
                    (w, i, o)
                }
                Layer::Conv2d { w, kernel, .. } => {
                    let k2 = *kernel * *kernel;
                    let (oc, ic) = (w.shape()[0], w.shape()[1]);
                    (w, ic * k2, oc * k2)
                }
                _ => continue,
            };
            let std = match scheme {
                InitScheme::He => libm::sqrt(2.0 / fan_in as f64),
                InitScheme::Xavier => gain * libm::sqrt(2.0 / (fan_in + fan_out) as f64),
            };
            for v in w.data_mut() {
                *v = std * rng.normal();
            }
        }
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::Dense { w, b } | Layer::Conv2d { w, b, .. } => w.len() + b.len(),
                _ => 0,
            })
            .sum()
    }

    /// All parameters in a flat vector (per layer: weights then bias).
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            if let Layer::Dense { w, b } | Layer::Conv2d { w, b, .. } = l {
                out.extend_from_slice(w.data());
                out.extend_from_slice(b.data());
            }
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<(), ShapeError> {
        if params.len() != self.param_count() {
            return Err(ShapeError {
                expected: vec![self.param_count()],
                got: vec![params.len()],
                context: "flat parameter vector",
            });
        }
        let mut off = 0;
        for l in &mut self.layers {
            if let Layer::Dense { w, b } | Layer::Conv2d { w, b, .. } = l {
                let wl = w.len();
                w.data_mut().copy_from_slice(&params[off..off + wl]);
                off += wl;
                let bl = b.len();
                b.data_mut().copy_from_slice(&params[off..off + bl]);
                off += bl;
            }
        }
        Ok(())
    }

    fn expect_batch_shape(&self, batch: &Tensor) -> Result<usize, ShapeError> {
        let shape = batch.shape();
        if shape.len() != self.spec.input_shape.len() + 1
            || shape[1..] != self.spec.input_shape[..]
        {
            return Err(ShapeError {
                expected: self.spec.input_shape.clone(),
                got: shape.to_vec(),
                context: "network input batch",
            });
        }
        Ok(shape[0])
    }

    /// Runs the stack up to the logits, capturing every layer input the
    /// backward pass needs.
    pub fn forward(&self, batch: &Tensor) -> Result<(Tensor, ForwardCache), ShapeError> {
        let n = self.expect_batch_shape(batch)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut current = batch.clone();
        for layer in &self.layers {
            inputs.push(current.clone());
            current = match layer {
                Layer::Dense { w, b } => dense_forward(&current, w, b),
                Layer::Conv2d {
                    w,
                    b,
                    kernel,
                    stride,
                    pad,
                    in_shape,
                    out_shape,
                } => conv_forward(&current, w, b, *kernel, *stride, *pad, in_shape, out_shape),
                Layer::Activation(spec) => eval_batch(spec, &current, false),
                Layer::Flatten { .. } => {
                    let flat: usize = current.shape()[1..].iter().product();
                    current.reshaped(vec![n, flat]).expect("same element count")
                }
            };
        }
        let logits = current.clone();
        Ok((
            logits,
            ForwardCache {
                inputs,
                logits: current,
                batch: n,
            },
        ))
    }

    /// Cross-entropy loss and parameter gradients for the cached pass.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        labels: &[usize],
    ) -> Result<BackwardResult, StaleCache> {
        if cache.inputs.len() != self.layers.len() || labels.len() != cache.batch {
            return Err(StaleCache);
        }
        for (layer, input) in self.layers.iter().zip(&cache.inputs) {
            let ok = match layer {
                Layer::Dense { w, .. } => input.shape() == [cache.batch, w.shape()[1]],
                Layer::Conv2d { in_shape, .. } => {
                    input.shape()
                        == [cache.batch, in_shape[0], in_shape[1], in_shape[2]]
                }
                _ => input.shape()[0] == cache.batch,
            };
            if !ok {
                return Err(StaleCache);
            }
        }

        let classes = cache.logits.shape()[1];
        if labels.iter().any(|&l| l >= classes) {
            return Err(StaleCache);
        }

        let (loss, mut upstream) = softmax_cross_entropy(&cache.logits, labels);
        let mut per_layer: Vec<Option<(Tensor, Tensor)>> = vec![None; self.layers.len()];
        let mut act_min = f64::INFINITY;
        let mut act_max = f64::NEG_INFINITY;
        let mut kink_hits = 0u64;
        let mut saw_activation = false;

        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.inputs[i];
            upstream = match layer {
                Layer::Dense { w, .. } => {
                    let (dw, db, dx) = dense_backward(input, w, &upstream);
                    per_layer[i] = Some((dw, db));
                    dx
                }
                Layer::Conv2d {
                    w,
                    kernel,
                    stride,
                    pad,
                    in_shape,
                    out_shape,
                    ..
                } => {
                    let (dw, db, dx) = conv_backward(
                        input, w, &upstream, *kernel, *stride, *pad, in_shape, out_shape,
                    );
                    per_layer[i] = Some((dw, db));
                    dx
                }
                Layer::Activation(spec) => {
                    saw_activation = true;
                    let g = grad_batch(spec, input);
                    for &v in g.values.data() {
                        act_min = act_min.min(v);
                        act_max = act_max.max(v);
                    }
                    kink_hits += g.kinks.iter().filter(|&&k| k).count() as u64;
                    let data: Vec<f64> = upstream
                        .data()
                        .iter()
                        .zip(g.values.data())
                        .map(|(u, gv)| u * gv)
                        .collect();
                    Tensor::new(upstream.shape().to_vec(), data).expect("same shape")
                }
                Layer::Flatten { from } => {
                    let mut shape = vec![cache.batch];
                    shape.extend_from_slice(from);
                    upstream.reshaped(shape).expect("same element count")
                }
            };
        }

        Ok(BackwardResult {
            loss,
            grads: Gradients { per_layer },
            act_grad_range: saw_activation.then_some((act_min, act_max)),
            kink_hits,
        })
    }

    /// Forward plus cross-entropy, no gradients. Used by evaluation passes
    /// and finite-difference checks.
    pub fn loss(&self, batch: &Tensor, labels: &[usize]) -> Result<f64, ShapeError> {
        let (logits, _) = self.forward(batch)?;
        Ok(softmax_cross_entropy(&logits, labels).0)
    }

    fn sgd_step(&mut self, grads: &Gradients, velocity: &mut [Vec<f64>], lr: f64, momentum: f64) {
        let mut vi = 0;
        for (layer, g) in self.layers.iter_mut().zip(&grads.per_layer) {
            if let (Layer::Dense { w, b } | Layer::Conv2d { w, b, .. }, Some((dw, db))) = (layer, g)
            {
                let v = &mut velocity[vi];
                vi += 1;
                let (wl, _bl) = (w.len(), b.len());
                for (k, (p, d)) in w
                    .data_mut()
                    .iter_mut()
                    .zip(dw.data())
                    .chain(b.data_mut().iter_mut().zip(db.data()))
                    .enumerate()
                {
                    v[k] = momentum * v[k] + d;
                    *p -= lr * v[k];
                }
                debug_assert_eq!(v.len(), wl + _bl);
            }
        }
    }
}

/// Stable mean softmax cross-entropy over the batch; also returns
/// d(loss)/d(logits).
pub fn softmax_cross_entropy(logits: &Tensor, labels: &[usize]) -> (f64, Tensor) {
    let n = logits.shape()[0];
    let c = logits.shape()[1];
    debug_assert_eq!(labels.len(), n);
    let mut grad = vec![0.0; n * c];
    let mut loss = 0.0;
    for r in 0..n {
        let row = &logits.data()[r * c..(r + 1) * c];
        let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for &z in row {
            sum += libm::exp(z - mx);
        }
        let lse = mx + libm::log(sum);
        loss += lse - row[labels[r]];
        for k in 0..c {
            let p = libm::exp(row[k] - lse);
            grad[r * c + k] = (p - if k == labels[r] { 1.0 } else { 0.0 }) / n as f64;
        }
    }
    (
        loss / n as f64,
        Tensor::new(vec![n, c], grad).expect("logits shape"),
    )
}

fn dense_forward(x: &Tensor, w: &Tensor, b: &Tensor) -> Tensor {
    let n = x.shape()[0];
    let (out, inp) = (w.shape()[0], w.shape()[1]);
    let mut y = vec![0.0; n * out];
    for r in 0..n {
        let xr = &x.data()[r * inp..(r + 1) * inp];
        let yr = &mut y[r * out..(r + 1) * out];
        for o in 0..out {
            let wr = &w.data()[o * inp..(o + 1) * inp];
            let mut acc = b.data()[o];
            for i in 0..inp {
                acc += xr[i] * wr[i];
            }
            yr[o] = acc;
        }
    }
    Tensor::new(vec![n, out], y).expect("dense output shape")
}

fn dense_backward(x: &Tensor, w: &Tensor, dy: &Tensor) -> (Tensor, Tensor, Tensor) {
    let n = x.shape()[0];
    let (out, inp) = (w.shape()[0], w.shape()[1]);
    let mut dw = vec![0.0; out * inp];
    let mut db = vec![0.0; out];
    let mut dx = vec![0.0; n * inp];
    for r in 0..n {
        let xr = &x.data()[r * inp..(r + 1) * inp];
        let dyr = &dy.data()[r * out..(r + 1) * out];
        let dxr = &mut dx[r * inp..(r + 1) * inp];
        for o in 0..out {
            let g = dyr[o];
            db[o] += g;
            let wr = &w.data()[o * inp..(o + 1) * inp];
            let dwr = &mut dw[o * inp..(o + 1) * inp];
            for i in 0..inp {
                dwr[i] += g * xr[i];
                dxr[i] += g * wr[i];
            }
        }
    }
    (
        Tensor::new(vec![out, inp], dw).expect("dw shape"),
        Tensor::new(vec![out], db).expect("db shape"),
        Tensor::new(vec![n, inp], dx).expect("dx shape"),
    )
}

#[allow(clippy::too_many_arguments)]
fn conv_forward(
    x: &Tensor,
    w: &Tensor,
    b: &Tensor,
    kernel: usize,
    stride: usize,
    pad: usize,
    in_shape: &[usize; 3],
    out_shape: &[usize; 3],
) -> Tensor {
    let n = x.shape()[0];
    let [ic, h, wd] = *in_shape;
    let [oc, oh, ow] = *out_shape;
    let mut y = vec![0.0; n * oc * oh * ow];
    for r in 0..n {
        for o in 0..oc {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = b.data()[o];
                    for c in 0..ic {
                        for ky in 0..kernel {
                            let iy = oy * stride + ky;
                            if iy < pad || iy - pad >= h {
                                continue;
                            }
                            for kx in 0..kernel {
                                let ix = ox * stride + kx;
                                if ix < pad || ix - pad >= wd {
                                    continue;
                                }
                                let xv = x.data()
                                    [((r * ic + c) * h + (iy - pad)) * wd + (ix - pad)];
                                let wv =
                                    w.data()[((o * ic + c) * kernel + ky) * kernel + kx];
                                acc += xv * wv;
                            }
                        }
                    }
                    y[((r * oc + o) * oh + oy) * ow + ox] = acc;
                }
            }
        }
    }
    Tensor::new(vec![n, oc, oh, ow], y).expect("conv output shape")
}

#[allow(clippy::too_many_arguments)]
fn conv_backward(
    x: &Tensor,
    w: &Tensor,
    dy: &Tensor,
    kernel: usize,
    stride: usize,
    pad: usize,
    in_shape: &[usize; 3],
    out_shape: &[usize; 3],
) -> (Tensor, Tensor, Tensor) {
    let n = x.shape()[0];
    let [ic, h, wd] = *in_shape;
    let [oc, oh, ow] = *out_shape;
    let mut dwv = vec![0.0; w.len()];
    let mut dbv = vec![0.0; oc];
    let mut dxv = vec![0.0; x.len()];
    for r in 0..n {
        for o in 0..oc {
            for oy in 0..oh {
                for ox in 0..ow {
                    let g = dy.data()[((r * oc + o) * oh + oy) * ow + ox];
                    dbv[o] += g;
                    for c in 0..ic {
                        for ky in 0..kernel {
                            let iy = oy * stride + ky;
                            if iy < pad || iy - pad >= h {
                                continue;
                            }
                            for kx in 0..kernel {
                                let ix = ox * stride + kx;
                                if ix < pad || ix - pad >= wd {
                                    continue;
                                }
                                let xi = ((r * ic + c) * h + (iy - pad)) * wd + (ix - pad);
                                let wi = ((o * ic + c) * kernel + ky) * kernel + kx;
                                dwv[wi] += g * x.data()[xi];
                                dxv[xi] += g * w.data()[wi];
                            }
                        }
                    }
                }
            }
        }
    }
    (
        Tensor::new(w.shape().to_vec(), dwv).expect("dw shape"),
        Tensor::new(vec![oc], dbv).expect("db shape"),
        Tensor::new(x.shape().to_vec(), dxv).expect("dx shape"),
    )
}

/// SGD-with-momentum hyperparameters plus the epoch/batch plan.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerCfg {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochMetrics {
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RunStatus {
    Completed,
    Diverged { epoch: usize },
}

/// The seeded result record of one training run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainRun {
    pub spec: NetworkSpec,
    pub optimizer: OptimizerCfg,
    pub data_seed: u64,
    pub status: RunStatus,
    pub per_epoch: Vec<EpochMetrics>,
    /// Smallest / largest activation-layer local gradient recorded across
    /// every backward pass of the run.
    pub act_grad_min: Option<f64>,
    pub act_grad_max: Option<f64>,
    pub kink_hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    Build(BuildError),
    BadOptimizer(&'static str),
    Shape(ShapeError),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::Build(e) => write!(f, "{e}"),
            TrainError::BadOptimizer(r) => write!(f, "bad optimizer config: {r}"),
            TrainError::Shape(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TrainError {}

impl From<BuildError> for TrainError {
    fn from(e: BuildError) -> Self {
        TrainError::Build(e)
    }
}

impl From<ShapeError> for TrainError {
    fn from(e: ShapeError) -> Self {
        TrainError::Shape(e)
    }
}

/// Full-set forward evaluation in fixed order: mean loss and accuracy.
fn eval_pass(
    net: &Network,
    xs: &Tensor,
    labels: &[usize],
    batch_size: usize,
) -> Result<(f64, f64), ShapeError> {
    let n = xs.shape()[0];
    let sample_len: usize = xs.shape()[1..].iter().product();
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    let mut start = 0;
    while start < n {
        let end = (start + batch_size).min(n);
        let count = end - start;
        let mut shape = vec![count];
        shape.extend_from_slice(&xs.shape()[1..]);
        let batch = Tensor::new(
            shape,
            xs.data()[start * sample_len..end * sample_len].to_vec(),
        )
        .expect("contiguous slice");
        let (logits, _) = net.forward(&batch)?;
        let classes = logits.shape()[1];
        let (l, _) = softmax_cross_entropy(&logits, &labels[start..end]);
        loss_sum += l * count as f64;
        for r in 0..count {
            let row = &logits.data()[r * classes..(r + 1) * classes];
            let mut best = 0;
            for k in 1..classes {
                if row[k] > row[best] {
                    best = k;
                }
            }
            if best == labels[start + r] {
                correct += 1;
            }
        }
        start = end;
    }
    Ok((loss_sum / n as f64, correct as f64 / n as f64))
}

/// Seeded SGD-with-momentum training. A pure function of its arguments:
/// identical (spec, dataset, optimizer) give a bit-identical [`TrainRun`].
/// Non-finite loss stops the run with a `Diverged` status instead of
/// crashing. Epoch metrics come from a fixed-order evaluation pass, so a
/// zero learning rate yields identical metrics every epoch.
pub fn train(spec: &NetworkSpec, data: &Dataset, opt: &OptimizerCfg) -> Result<TrainRun, TrainError> {
    if !(opt.learning_rate >= 0.0) || !opt.learning_rate.is_finite() {
        return Err(TrainError::BadOptimizer("learning_rate must be finite and >= 0"));
    }
    if !(0.0..1.0).contains(&opt.momentum) {
        return Err(TrainError::BadOptimizer("momentum must be in [0, 1)"));
    }
    if opt.batch_size == 0 || opt.epochs == 0 {
        return Err(TrainError::BadOptimizer("batch_size and epochs must be >= 1"));
    }

    let mut net = Network::build(spec)?;
    let n = data.train_x.shape()[0];
    let sample_len: usize = data.train_x.shape()[1..].iter().product();
    let mut velocity: Vec<Vec<f64>> = net
        .layers
        .iter()
        .filter_map(|l| match l {
            Layer::Dense { w, b } | Layer::Conv2d { w, b, .. } => Some(vec![0.0; w.len() + b.len()]),
            _ => None,
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    let mut order_rng = Rng::new(data.meta.seed, Stream::EpochOrder);
    let mut per_epoch = Vec::with_capacity(opt.epochs);
    let mut status = RunStatus::Completed;
    let mut act_min = f64::INFINITY;
    let mut act_max = f64::NEG_INFINITY;
    let mut saw_act = false;
    let mut kink_hits = 0u64;

    'epochs: for epoch in 0..opt.epochs {
        order_rng.shuffle(&mut order);
        for chunk in order.chunks(opt.batch_size) {
            let mut shape = vec![chunk.len()];
            shape.extend_from_slice(&data.train_x.shape()[1..]);
            let mut buf = Vec::with_capacity(chunk.len() * sample_len);
            let mut labels = Vec::with_capacity(chunk.len());
            for &idx in chunk {
                buf.extend_from_slice(
                    &data.train_x.data()[idx * sample_len..(idx + 1) * sample_len],
                );
                labels.push(data.train_labels[idx]);
            }
            let batch = Tensor::new(shape, buf).expect("batch assembly");
            let (_, cache) = net.forward(&batch)?;
            let back = net.backward(&cache, &labels).expect("fresh cache");
            if !back.loss.is_finite() {
                status = RunStatus::Diverged { epoch };
                break 'epochs;
            }
            if let Some((lo, hi)) = back.act_grad_range {
                saw_act = true;
                act_min = act_min.min(lo);
                act_max = act_max.max(hi);
            }
            kink_hits += back.kink_hits;
            net.sgd_step(&back.grads, &mut velocity, opt.learning_rate, opt.momentum);
        }
        let (train_loss, train_acc) =
            eval_pass(&net, &data.train_x, &data.train_labels, opt.batch_size)?;
        if !train_loss.is_finite() {
            status = RunStatus::Diverged { epoch };
            break;
        }
        let (_, test_acc) = eval_pass(&net, &data.test_x, &data.test_labels, opt.batch_size)?;
        per_epoch.push(EpochMetrics {
            train_loss,
            train_acc,
            test_acc,
        });
    }

    Ok(TrainRun {
        spec: spec.clone(),
        optimizer: opt.clone(),
        data_seed: data.meta.seed,
        status,
        per_epoch,
        act_grad_min: saw_act.then_some(act_min),
        act_grad_max: saw_act.then_some(act_max),
        kink_hits,
    })
}
