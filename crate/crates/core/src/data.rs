//! Coordinate grids and synthetic signals.
//!
//! Grid coordinates include both endpoints: `n` samples along an axis sit at
//! `-1 + 2i/(n-1)`. Occupancy grids are the exception and use voxel centers
//! `-1 + (2i+1)/n`.

use alloc::format;
use alloc::vec::Vec;

pub use crate::classical::SamplingInfo;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// Coordinates paired with target values.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalDataset {
    /// `n × d`, every entry in `[-1, 1]`.
    pub coords: Matrix,
    /// `n × c`
    pub targets: Matrix,
    pub sampling: SamplingInfo,
    /// Nominal value range; its width is the peak value for PSNR.
    pub value_range: (f64, f64),
}

impl SignalDataset {
    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    pub fn peak(&self) -> f64 {
        self.value_range.1 - self.value_range.0
    }
}

/// Evenly spaced points with both endpoints, last axis fastest.
pub fn make_grid(dims: &[usize]) -> Result<Matrix> {
    axis_product(dims, |i, n| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
}

/// Voxel/pixel centers `-1 + (2i+1)/n`, last axis fastest.
pub fn make_center_grid(dims: &[usize]) -> Result<Matrix> {
    axis_product(dims, |i, n| -1.0 + (2 * i + 1) as f64 / n as f64)
}

fn axis_product(dims: &[usize], coord: impl Fn(usize, usize) -> f64) -> Result<Matrix> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points per axis, got {dims:?}"
        )));
    }
    let axes: Vec<Vec<f64>> = dims.iter().map(|&n| (0..n).map(|i| coord(i, n)).collect()).collect();
    let total: usize = dims.iter().product();
    let d = dims.len();
    let mut data = Vec::with_capacity(total * d);
    let mut index = alloc::vec![0usize; d];
    for _ in 0..total {
        for (axis, &i) in index.iter().enumerate() {
            data.push(axes[axis][i]);
        }
        for axis in (0..d).rev() {
            index[axis] += 1;
            if index[axis] < dims[axis] {
                break;
            }
            index[axis] = 0;
        }
    }
    Matrix::new(total, d, data)
}

/// A sine component of a synthetic clip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tone {
    pub freq_hz: f64,
    pub amplitude: f64,
}

/// `Σ aᵢ sin(2π fᵢ t)` sampled at `rate` for `duration_s` seconds.
/// Components at or above `rate / 2` are rejected.
pub fn synth_audio(duration_s: f64, rate: f64, components: &[Tone]) -> Result<SignalDataset> {
    if !(rate > 0.0 && rate.is_finite()) || !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "duration {duration_s} s and rate {rate} Hz must be positive"
        )));
    }
    let nyquist = rate / 2.0;
    for tone in components {
        if !(tone.freq_hz >= 0.0 && tone.freq_hz < nyquist) {
            return Err(Error::Aliasing {
                freq: tone.freq_hz,
                nyquist,
            });
        }
    }
    let samples = libm::round(duration_s * rate) as usize;
    let coords = make_grid(&[samples])?;
    let two_pi = 2.0 * core::f64::consts::PI;
    let values = (0..samples)
        .map(|i| {
            let t = i as f64 / rate;
            components
                .iter()
                .map(|c| c.amplitude * libm::sin(two_pi * c.freq_hz * t))
                .sum()
        })
        .collect();
    Ok(SignalDataset {
        coords,
        targets: Matrix::column(values),
        sampling: SamplingInfo::audio(samples, rate),
        value_range: (-1.0, 1.0),
    })
}

/// Concentric rings `0.5 + 0.5 sin(rings · π · r)` on a `size × size` grid,
/// `r` the distance from the image center in normalized coordinates.
pub fn synth_circles_image(size: usize, ring_count: usize) -> Result<SignalDataset> {
    if size < 16 {
        return Err(Error::InvalidArgument(format!(
            "circles image needs size >= 16, got {size}"
        )));
    }
    let coords = make_grid(&[size, size])?;
    let k = ring_count as f64 * core::f64::consts::PI;
    let values = (0..coords.rows())
        .map(|i| {
            let (y, x) = (coords.get(i, 0), coords.get(i, 1));
            let r = libm::sqrt(x * x + y * y);
            (0.5 + 0.5 * libm::sin(k * r)).clamp(0.0, 1.0)
        })
        .collect();
    Ok(SignalDataset {
        coords,
        targets: Matrix::column(values),
        sampling: SamplingInfo::grid(alloc::vec![size, size]),
        value_range: (0.0, 1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Sphere {
        radius: f64,
    },
    /// Ring around the z axis.
    Torus {
        major: f64,
        minor: f64,
    },
}

impl Shape {
    fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            Shape::Sphere { radius } => p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= radius * radius,
            Shape::Torus { major, minor } => {
                let ring = libm::sqrt(p[0] * p[0] + p[1] * p[1]) - major;
                ring * ring + p[2] * p[2] <= minor * minor
            }
        }
    }
}

/// Binary voxel grid, 1 inside the shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupancyGrid {
    pub resolution: [usize; 3],
    /// Axis-0-major, last axis fastest.
    pub values: Vec<u8>,
}

impl OccupancyGrid {
    pub fn new(resolution: [usize; 3], values: Vec<u8>) -> Result<Self> {
        let n: usize = resolution.iter().product();
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} voxels for resolution {resolution:?}",
                values.len()
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(Error::InvalidArgument("occupancy values must be 0 or 1".into()));
        }
        Ok(Self { resolution, values })
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.values.iter().filter(|&&v| v == 1).count() as f64 / self.values.len() as f64
    }

    /// Voxel-center coordinates with 0/1 targets.
    pub fn to_dataset(&self) -> Result<SignalDataset> {
        let coords = make_center_grid(&self.resolution)?;
        let targets = Matrix::column(self.values.iter().map(|&v| v as f64).collect());
        Ok(SignalDataset {
            coords,
            targets,
            sampling: SamplingInfo::grid(self.resolution.to_vec()),
            value_range: (0.0, 1.0),
        })
    }
}

/// Marks every voxel whose center lies inside `shape`.
pub fn synth_occupancy(resolution: usize, shape: Shape) -> Result<OccupancyGrid> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!(
            "occupancy resolution must be >= 8, got {resolution}"
        )));
    }
    let ok = match shape {
        Shape::Sphere { radius } => radius > 0.0,
        Shape::Torus { major, minor } => major > 0.0 && minor > 0.0,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!("degenerate shape {shape:?}")));
    }
    let centers = make_center_grid(&[resolution; 3])?;
    let values = (0..centers.rows())
        .map(|i| {
            let r = centers.row(i);
            shape.contains([r[0], r[1], r[2]]) as u8
        })
        .collect();
    OccupancyGrid::new([resolution; 3], values)
}
