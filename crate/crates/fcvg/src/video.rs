//! Dense real-valued image and video tensors.
//!
//! `Image` is a single C×H×W frame, `LatentVideo` an N×C×H×W clip. Both store
//! `f64` row-major (channel, then row, then column) and are plain value types:
//! every operation is elementwise and deterministic, so identical inputs give
//! bitwise-identical outputs regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// A single real-valued frame, C×H×W row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_vec(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::Structure(format!(
                "image data length {} does not match {}x{}x{}",
                data.len(),
                channels,
                height,
                width
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("image contains non-finite values".into()));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f64) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
}

/// An N×C×H×W video of latent (or pixel) frames, N ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVideo {
    frames: usize,
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl LatentVideo {
    pub fn zeros(frames: usize, channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::from_vec(
            frames,
            channels,
            height,
            width,
            vec![0.0; frames * channels * height * width],
        )
    }

    pub fn from_vec(
        frames: usize,
        channels: usize,
        height: usize,
        width: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        if frames < 2 {
            return Err(Error::Domain(format!(
                "a video needs at least 2 frames, got {frames}"
            )));
        }
        if data.len() != frames * channels * height * width {
            return Err(Error::Structure(format!(
                "video data length {} does not match {}x{}x{}x{}",
                data.len(),
                frames,
                channels,
                height,
                width
            )));
        }
        Ok(Self {
            frames,
            channels,
            height,
            width,
            data,
        })
    }

    pub fn from_frames(frames: &[Image]) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Structure("empty frame list".into()))?;
        let (c, h, w) = first.shape();
        let mut data = Vec::with_capacity(frames.len() * c * h * w);
        for (i, f) in frames.iter().enumerate() {
            if f.shape() != (c, h, w) {
                return Err(Error::Structure(format!(
                    "frame {i} has shape {:?}, expected {:?}",
                    f.shape(),
                    (c, h, w)
                )));
            }
            data.extend_from_slice(f.data());
        }
        Self::from_vec(frames.len(), c, h, w, data)
    }

    /// Standard normal draw, deterministic for a given seed and shape.
    pub fn standard_normal(
        frames: usize,
        channels: usize,
        height: usize,
        width: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = frames * channels * height * width;
        let data: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::from_vec(frames, channels, height, width, data)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.frames, self.channels, self.height, self.width)
    }

    pub fn frame_len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn frame_data(&self, i: usize) -> &[f64] {
        let len = self.frame_len();
        &self.data[i * len..(i + 1) * len]
    }

    pub fn frame_data_mut(&mut self, i: usize) -> &mut [f64] {
        let len = self.frame_len();
        &mut self.data[i * len..(i + 1) * len]
    }

    pub fn frame(&self, i: usize) -> Image {
        Image {
            channels: self.channels,
            height: self.height,
            width: self.width,
            data: self.frame_data(i).to_vec(),
        }
    }

    pub fn same_shape(&self, other: &LatentVideo) -> bool {
        self.shape() == other.shape()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Elementwise `a*self + b*other`.
    pub fn affine_combine(&self, a: f64, other: &LatentVideo, b: f64) -> Result<LatentVideo> {
        if !self.same_shape(other) {
            return Err(Error::Structure(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            data,
            ..*self
        })
    }

    pub fn scale(&self, a: f64) -> LatentVideo {
        let data = self.data.iter().map(|x| a * x).collect();
        Self { data, ..*self }
    }

    pub fn max_abs_diff(&self, other: &LatentVideo) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Reverses frame order. An involution: `flip(flip(v)) == v` bitwise.
    pub fn flip_time(&self) -> LatentVideo {
        let len = self.frame_len();
        let mut data = Vec::with_capacity(self.data.len());
        for i in (0..self.frames).rev() {
            data.extend_from_slice(&self.data[i * len..(i + 1) * len]);
        }
        Self { data, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_frame() {
        assert!(matches!(
            LatentVideo::zeros(1, 1, 2, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rejects_bad_length() {
        assert!(matches!(
            LatentVideo::from_vec(2, 1, 2, 2, vec![0.0; 7]),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn image_rejects_non_finite() {
        assert!(Image::from_vec(1, 1, 2, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn flip_reverses_frames() {
        let v = LatentVideo::from_vec(3, 1, 1, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let f = v.flip_time();
        assert_eq!(f.data(), &[3.0, 2.0, 1.0]);
        assert_eq!(f.flip_time().data(), v.data());
    }

    #[test]
    fn normal_draw_is_seed_deterministic() {
        let a = LatentVideo::standard_normal(2, 1, 3, 3, 42).unwrap();
        let b = LatentVideo::standard_normal(2, 1, 3, 3, 42).unwrap();
        let c = LatentVideo::standard_normal(2, 1, 3, 3, 43).unwrap();
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn frame_roundtrip() {
        let v = LatentVideo::standard_normal(3, 2, 4, 4, 7).unwrap();
        let frames: Vec<Image> = (0..3).map(|i| v.frame(i)).collect();
        let rebuilt = LatentVideo::from_frames(&frames).unwrap();
        assert_eq!(rebuilt.data(), v.data());
    }
}
