//! Deterministic synthetic datasets: 2-D point sets for the MLP runs and
//! an 8x8 bar-image task for the convolution net. All are seeded, labeled,
//! and stratified-split 80/20 into train/test.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rng::{Rng, Stream};
use crate::tensor::Tensor;

/// Spiral arms reach radius 2 over one and a half turns; adjacent arms sit
/// 2/3 apart radially, comfortably wider than the default noise.
const SPIRAL_RADIUS: f64 = 2.0;
const SPIRAL_TURNS: f64 = 1.5;
const BLOB_CENTER: f64 = 1.0;
const XOR_EXTENT: f64 = 2.0;
pub const IMAGE_SIDE: usize = 8;

/// The built-in 2-D point datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DatasetKind {
    TwoSpirals,
    GaussianBlobs,
    XorGrid,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::TwoSpirals => "two_spirals",
            DatasetKind::GaussianBlobs => "gaussian_blobs",
            DatasetKind::XorGrid => "xor_grid",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unknown dataset name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownDataset(pub String);

impl fmt::Display for UnknownDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown dataset name: {:?}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UnknownDataset {}

impl FromStr for DatasetKind {
    type Err = UnknownDataset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_spirals" => Ok(DatasetKind::TwoSpirals),
            "gaussian_blobs" => Ok(DatasetKind::GaussianBlobs),
            "xor_grid" => Ok(DatasetKind::XorGrid),
            other => Err(UnknownDataset(String::from(other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataError {
    TooFewSamples { n: usize },
    NegativeNoise { noise: f64 },
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::TooFewSamples { n } => write!(f, "dataset needs n >= 4, got {n}"),
            DataError::NegativeNoise { noise } => write!(f, "noise must be >= 0, got {noise}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DataError {}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetMeta {
    pub name: String,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

/// A labeled, already-split dataset. Feature rows are samples; labels are
/// class indices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub train_x: Tensor,
    pub train_labels: Vec<usize>,
    pub test_x: Tensor,
    pub test_labels: Vec<usize>,
    pub meta: DatasetMeta,
}

impl Dataset {
    /// Per-sample feature shape.
    pub fn input_shape(&self) -> &[usize] {
        &self.train_x.shape()[1..]
    }

    pub fn classes(&self) -> usize {
        self.train_labels
            .iter()
            .chain(self.test_labels.iter())
            .copied()
            .max()
            .map_or(0, |m| m + 1)
    }
}

/// Builds one of the named 2-D point datasets: deterministic in
/// (kind, n, noise, seed), stratified 80/20 split.
pub fn make_dataset(
    kind: DatasetKind,
    n: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset, DataError> {
    if n < 4 {
        return Err(DataError::TooFewSamples { n });
    }
    if !(noise >= 0.0) {
        return Err(DataError::NegativeNoise { noise });
    }
    let mut rng = Rng::new(seed, Stream::DataNoise);
    let (samples, labels) = match kind {
        DatasetKind::TwoSpirals => two_spirals(n, noise, &mut rng),
        DatasetKind::GaussianBlobs => gaussian_blobs(n, noise, &mut rng),
        DatasetKind::XorGrid => xor_grid(n, noise, &mut rng),
    };
    Ok(split(samples, labels, 2, kind.name(), n, noise, seed))
}

/// 8x8 single-channel images of a horizontal (class 0) or vertical
/// (class 1) bar at a seeded position, plus pixel noise. The image-domain
/// stand-in used by the small convolution net.
pub fn make_bar_images(n: usize, noise: f64, seed: u64) -> Result<Dataset, DataError> {
    if n < 4 {
        return Err(DataError::TooFewSamples { n });
    }
    if !(noise >= 0.0) {
        return Err(DataError::NegativeNoise { noise });
    }
    let mut rng = Rng::new(seed, Stream::DataNoise);
    let side = IMAGE_SIDE;
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let pos = rng.below(side);
        let mut img = vec![0.0; side * side];
        for j in 0..side {
            let idx = if class == 0 { pos * side + j } else { j * side + pos };
            img[idx] = 1.0;
        }
        for p in img.iter_mut() {
            *p += noise * rng.normal();
        }
        samples.push(img);
        labels.push(class);
    }
    let mut ds = split(samples, labels, 2, "bar_images", n, noise, seed);
    let reshape = |t: &Tensor| {
        t.reshaped(vec![t.shape()[0], 1, side, side])
            .expect("side*side features")
    };
    ds.train_x = reshape(&ds.train_x);
    ds.test_x = reshape(&ds.test_x);
    Ok(ds)
}

/// Two interleaved spiral arms, one per class, exact 50/50 for even n.
fn two_spirals(n: usize, noise: f64, rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let m0 = n / 2;
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..2usize {
        let m = if class == 0 { m0 } else { n - m0 };
        for j in 0..m {
            let u = j as f64 / (m - 1) as f64;
            let theta = 2.0 * core::f64::consts::PI * SPIRAL_TURNS * u
                + core::f64::consts::PI * class as f64;
            let r = SPIRAL_RADIUS * u;
            samples.push(vec![
                r * libm::cos(theta) + noise * rng.normal(),
                r * libm::sin(theta) + noise * rng.normal(),
            ]);
            labels.push(class);
        }
    }
    (samples, labels)
}

/// Two isotropic blobs at (+1,+1) and (-1,-1); linearly separable for
/// small noise, identical points for noise = 0.
fn gaussian_blobs(n: usize, noise: f64, rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let m0 = n / 2;
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..2usize {
        let m = if class == 0 { m0 } else { n - m0 };
        let c = if class == 0 { BLOB_CENTER } else { -BLOB_CENTER };
        for _ in 0..m {
            samples.push(vec![c + noise * rng.normal(), c + noise * rng.normal()]);
            labels.push(class);
        }
    }
    (samples, labels)
}

/// Grid cells over [-2, 2]^2 labeled by quadrant parity (XOR pattern),
/// jittered by the noise level.
fn xor_grid(n: usize, noise: f64, rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut side = 2usize;
    while side * side < n {
        side += 1;
    }
    let cell = 2.0 * XOR_EXTENT / side as f64;
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    'outer: for row in 0..side {
        for col in 0..side {
            if samples.len() == n {
                break 'outer;
            }
            let x = -XOR_EXTENT + (col as f64 + 0.5) * cell;
            let y = -XOR_EXTENT + (row as f64 + 0.5) * cell;
            let label = usize::from((x > 0.0) != (y > 0.0));
            samples.push(vec![x + noise * rng.normal(), y + noise * rng.normal()]);
            labels.push(label);
        }
    }
    (samples, labels)
}

/// Stratified 80/20 split: within each class, a seeded shuffle then the
/// first 80% go to train.
fn split(
    samples: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classes: usize,
    name: &str,
    n: usize,
    noise: f64,
    seed: u64,
) -> Dataset {
    let mut rng = Rng::new(seed, Stream::Split);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in 0..classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut idx);
        let k = idx.len() * 4 / 5;
        train_idx.extend_from_slice(&idx[..k]);
        test_idx.extend_from_slice(&idx[k..]);
    }
    let dim = samples[0].len();
    let gather = |idx: &[usize]| {
        let mut buf = Vec::with_capacity(idx.len() * dim);
        let mut lab = Vec::with_capacity(idx.len());
        for &i in idx {
            buf.extend_from_slice(&samples[i]);
            lab.push(labels[i]);
        }
        (
            Tensor::new(vec![idx.len(), dim], buf).expect("gathered rows"),
            lab,
        )
    };
    let (train_x, train_labels) = gather(&train_idx);
    let (test_x, test_labels) = gather(&test_idx);
    Dataset {
        train_x,
        train_labels,
        test_x,
        test_labels,
        meta: DatasetMeta {
            name: String::from(name),
            n,
            noise,
            seed,
        },
    }
}
