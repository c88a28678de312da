//! Shape plus contiguous f64 buffer: the single numeric container used by
//! the batch kernels and the training core.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Shape/buffer mismatch or incompatible layer dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeError {
    pub expected: Vec<usize>,
    pub got: Vec<usize>,
    pub context: &'static str,
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "shape mismatch in {}: expected {:?}, got {:?}",
            self.context, self.expected, self.got
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ShapeError {}

/// Row-major tensor of 64-bit reals. The buffer length always equals the
/// product of the extents (empty shape = scalar, product 1).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, ShapeError> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(ShapeError {
                expected: vec![n],
                got: vec![data.len()],
                context: "tensor construction",
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    /// One-dimensional tensor over the given values.
    pub fn from_vec(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Same buffer under a new shape with equal element count.
    pub fn reshaped(&self, shape: Vec<usize>) -> Result<Self, ShapeError> {
        Tensor::new(shape, self.data.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_must_match_shape() {
        assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        // empty product = 1: a scalar holds one value
        assert!(Tensor::new(vec![], vec![1.5]).is_ok());
        assert!(Tensor::new(vec![], vec![]).is_err());
    }

    #[test]
    fn zero_extent_gives_empty_buffer() {
        let t = Tensor::zeros(vec![0, 4]);
        assert!(t.is_empty());
        assert_eq!(t.shape(), &[0, 4]);
    }
}
