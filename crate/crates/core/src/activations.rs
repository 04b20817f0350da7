//! Activation families and the Nyquist-spaced per-neuron frequency ladder.
//!
//! Every activation is applied column-wise to a pre-activation matrix laid
//! out as `samples × neurons`; the FM kinds read neuron `k`'s frequency from
//! `multipliers[k]`, every other periodic kind uses the shared `omega0`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fastmath;
use crate::{Error, Matrix, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ActivationKind {
    /// `sin(ω₀ z)`
    Sine,
    /// `sin(ω₀ (|z| + 1) z)`
    Finer,
    /// `sin(ω_k z)` with a per-neuron multiplier.
    FmSine,
    /// `sin(ω_k (|z| + 1) z)` with a per-neuron multiplier.
    FmFiner,
    /// `exp(-(s z)²)`
    Gauss,
    /// `max(0, z)`, the hidden activation of positional-encoding MLPs.
    Relu,
    Linear,
}

impl ActivationKind {
    pub fn is_fm(self) -> bool {
        matches!(self, Self::FmSine | Self::FmFiner)
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Self::Sine | Self::Finer | Self::FmSine | Self::FmFiner)
    }

    pub fn is_finer_family(self) -> bool {
        matches!(self, Self::Finer | Self::FmFiner)
    }

    /// The shared-frequency kind an FM kind falls back to.
    pub fn fixed_frequency(self) -> Self {
        match self {
            Self::FmSine => Self::Sine,
            Self::FmFiner => Self::Finer,
            other => other,
        }
    }
}

/// One layer's nonlinearity.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    /// Shared frequency for `Sine`/`Finer`. FM kinds keep the configured value
    /// for weight initialization only.
    pub omega0: f64,
    /// Gaussian width `s`.
    pub scale: f64,
    /// Per-neuron `ω_k`, present iff the kind is an FM kind.
    pub multipliers: Option<Vec<f64>>,
}

impl ActivationSpec {
    pub fn sine(omega0: f64) -> Self {
        Self::fixed(ActivationKind::Sine, omega0)
    }

    pub fn finer(omega0: f64) -> Self {
        Self::fixed(ActivationKind::Finer, omega0)
    }

    pub fn gauss(scale: f64) -> Self {
        Self {
            kind: ActivationKind::Gauss,
            omega0: 0.0,
            scale,
            multipliers: None,
        }
    }

    pub fn relu() -> Self {
        Self::fixed(ActivationKind::Relu, 0.0)
    }

    pub fn linear() -> Self {
        Self::fixed(ActivationKind::Linear, 0.0)
    }

    pub fn fm_sine(multipliers: Vec<f64>, omega0: f64) -> Self {
        Self::fm(ActivationKind::FmSine, multipliers, omega0)
    }

    pub fn fm_finer(multipliers: Vec<f64>, omega0: f64) -> Self {
        Self::fm(ActivationKind::FmFiner, multipliers, omega0)
    }

    fn fixed(kind: ActivationKind, omega0: f64) -> Self {
        Self {
            kind,
            omega0,
            scale: 0.0,
            multipliers: None,
        }
    }

    fn fm(kind: ActivationKind, multipliers: Vec<f64>, omega0: f64) -> Self {
        Self {
            kind,
            omega0,
            scale: 0.0,
            multipliers: Some(multipliers),
        }
    }

    /// Checks the spec's own invariants and, when given, that it fits a layer
    /// of `width` neurons.
    pub fn validate(&self, width: Option<usize>) -> Result<()> {
        use ActivationKind::*;
        match (self.kind, &self.multipliers) {
            (FmSine | FmFiner, None) => {
                return Err(Error::Spec(format!("{:?} requires per-neuron multipliers", self.kind)))
            }
            (FmSine | FmFiner, Some(m)) => {
                if let Some(w) = width {
                    if m.len() != w {
                        return Err(Error::Spec(format!(
                            "{} multipliers for a layer of {w} neurons",
                            m.len()
                        )));
                    }
                }
                if m.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::Spec("multipliers must be finite and non-negative".into()));
                }
                if m.windows(2).any(|p| p[1] < p[0]) {
                    return Err(Error::Spec("multipliers must be non-decreasing".into()));
                }
            }
            (_, Some(_)) => return Err(Error::Spec(format!("{:?} does not take multipliers", self.kind))),
            (_, None) => {}
        }
        if matches!(self.kind, Sine | Finer) && !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Spec(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if self.kind == Gauss && !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Spec(format!("gauss scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    fn frequencies(&self, width: usize) -> Result<Frequencies<'_>> {
        self.validate(Some(width))?;
        Ok(match &self.multipliers {
            Some(m) => Frequencies::PerNeuron(m),
            None => Frequencies::Shared(self.omega0),
        })
    }
}

enum Frequencies<'a> {
    Shared(f64),
    PerNeuron(&'a [f64]),
}

impl Frequencies<'_> {
    fn fill(&self, out: &mut [f64]) {
        match self {
            Frequencies::Shared(w) => out.fill(*w),
            Frequencies::PerNeuron(m) => out.copy_from_slice(m),
        }
    }
}

/// How the FM ladder is derived from the Nyquist frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FmOptions {
    /// Fraction of the Nyquist frequency spanned by the ladder, in (0, 1].
    pub nyquist_factor: f64,
    /// Extra multiplier on every `ω_k` (1.0 keeps the ladder in
    /// cycles-per-signal units).
    pub angular_scale: f64,
    /// First ladder index; 0 keeps the zero-frequency neuron.
    pub k_offset: usize,
    /// Only the first hidden layer gets the ladder; deeper layers use the
    /// fixed-frequency kind.
    pub first_layer_only: bool,
}

impl FmOptions {
    pub fn with_factor(nyquist_factor: f64) -> Self {
        Self {
            nyquist_factor,
            ..Self::default()
        }
    }
}

impl Default for FmOptions {
    fn default() -> Self {
        Self {
            nyquist_factor: 1.0,
            angular_scale: 1.0,
            k_offset: 0,
            first_layer_only: false,
        }
    }
}

/// `ω_k = k · factor · f_nyquist / K` for `k = 0..K`.
pub fn make_fm_multipliers(width: usize, f_nyquist: f64, factor: f64) -> Result<Vec<f64>> {
    make_fm_multipliers_with(width, f_nyquist, &FmOptions::with_factor(factor))
}

/// Ladder with the offset and angular scale from `options` applied:
/// `ω_k = (k + offset) · factor · f_nyquist / K · angular_scale`.
pub fn make_fm_multipliers_with(width: usize, f_nyquist: f64, options: &FmOptions) -> Result<Vec<f64>> {
    if width == 0 {
        return Err(Error::InvalidWidth("FM layer needs at least one neuron".into()));
    }
    if !(f_nyquist > 0.0 && f_nyquist.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Nyquist frequency must be positive, got {f_nyquist}"
        )));
    }
    let factor = options.nyquist_factor;
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Nyquist factor must be in (0, 1], got {factor}"
        )));
    }
    if !(options.angular_scale > 0.0 && options.angular_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "angular scale must be positive, got {}",
            options.angular_scale
        )));
    }
    let k_total = width as f64;
    Ok((0..width)
        .map(|k| (k + options.k_offset) as f64 * factor * f_nyquist / k_total * options.angular_scale)
        .collect())
}

/// Applies `spec` element-wise.
pub fn activate(spec: &ActivationSpec, z: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(z.rows(), z.cols());
    apply(spec, z, out.data_mut(), None)?;
    Ok(out)
}

/// [`activate`] into an existing buffer.
pub fn activate_into(spec: &ActivationSpec, z: &Matrix, out: &mut Matrix) -> Result<()> {
    out.reshape_scratch(z.rows(), z.cols());
    apply(spec, z, out.data_mut(), None)
}

/// Element-wise derivative of `spec` with respect to the pre-activation.
pub fn activate_grad(spec: &ActivationSpec, z: &Matrix) -> Result<Matrix> {
    let mut value = Matrix::zeros(z.rows(), z.cols());
    let mut slope = Matrix::zeros(z.rows(), z.cols());
    apply(spec, z, value.data_mut(), Some(slope.data_mut()))?;
    Ok(slope)
}

/// Value and derivative in one pass; periodic kinds share one sine/cosine
/// evaluation between the two.
pub fn activate_with_grad(spec: &ActivationSpec, z: &Matrix) -> Result<(Matrix, Matrix)> {
    let mut value = Matrix::zeros(z.rows(), z.cols());
    let mut slope = Matrix::zeros(z.rows(), z.cols());
    apply(spec, z, value.data_mut(), Some(slope.data_mut()))?;
    Ok((value, slope))
}

/// [`activate_with_grad`] into existing buffers.
pub fn activate_with_grad_into(
    spec: &ActivationSpec,
    z: &Matrix,
    value: &mut Matrix,
    slope: &mut Matrix,
) -> Result<()> {
    value.reshape_scratch(z.rows(), z.cols());
    slope.reshape_scratch(z.rows(), z.cols());
    apply(spec, z, value.data_mut(), Some(slope.data_mut()))
}

fn apply(spec: &ActivationSpec, z: &Matrix, value: &mut [f64], mut slope: Option<&mut [f64]>) -> Result<()> {
    let width = z.cols();
    if width == 0 {
        return Ok(());
    }
    match spec.kind {
        ActivationKind::Linear => {
            spec.validate(Some(width))?;
            value.copy_from_slice(z.data());
            if let Some(s) = slope {
                s.fill(1.0);
            }
        }
        ActivationKind::Relu => {
            spec.validate(Some(width))?;
            for (i, &v) in z.data().iter().enumerate() {
                value[i] = if v > 0.0 { v } else { 0.0 };
                if let Some(s) = slope.as_deref_mut() {
                    s[i] = if v > 0.0 { 1.0 } else { 0.0 };
                }
            }
        }
        ActivationKind::Gauss => {
            spec.validate(Some(width))?;
            let s2 = spec.scale * spec.scale;
            for (i, &v) in z.data().iter().enumerate() {
                let e = libm::exp(-s2 * v * v);
                value[i] = e;
                if let Some(s) = slope.as_deref_mut() {
                    s[i] = -2.0 * s2 * v * e;
                }
            }
        }
        kind => {
            let freqs = spec.frequencies(width)?;
            let finer = kind.is_finer_family();
            let mut omega = vec![0.0; width];
            freqs.fill(&mut omega);
            let mut arg = vec![0.0; width];
            let mut cos = vec![0.0; width];
            for (r, zr) in z.data().chunks_exact(width).enumerate() {
                for ((a, &w), &v) in arg.iter_mut().zip(&omega).zip(zr) {
                    *a = if finer { w * (libm::fabs(v) + 1.0) * v } else { w * v };
                }
                let row = r * width..(r + 1) * width;
                fastmath::sin_cos_slice(&arg, &mut value[row.clone()], &mut cos);
                if let Some(s) = slope.as_deref_mut() {
                    let sr = &mut s[row];
                    for (((d, &w), &v), &c) in sr.iter_mut().zip(&omega).zip(zr).zip(&cos) {
                        *d = if finer {
                            w * (2.0 * libm::fabs(v) + 1.0) * c
                        } else {
                            w * c
                        };
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dyadic sin/cos lift of the input coordinates.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositionalEncodingSpec {
    pub levels_per_dim: usize,
    /// The ladder tops out at `2^(scale - 1)`.
    pub scale: usize,
    pub input_dim: usize,
    pub total_embed: usize,
}

impl PositionalEncodingSpec {
    pub fn new(input_dim: usize, levels_per_dim: usize, scale: usize) -> Result<Self> {
        if input_dim == 0 || levels_per_dim == 0 || scale == 0 {
            return Err(Error::InvalidArgument(format!(
                "positional encoding needs input_dim, levels and scale >= 1 (got {input_dim}, {levels_per_dim}, {scale})"
            )));
        }
        Ok(Self {
            levels_per_dim,
            scale,
            input_dim,
            total_embed: 2 * levels_per_dim * input_dim,
        })
    }

    /// Largest per-dimension level count whose embedding fits in
    /// `embed_size` columns.
    pub fn for_embedding(input_dim: usize, embed_size: usize, scale: usize) -> Result<Self> {
        let levels = embed_size / (2 * input_dim.max(1));
        Self::new(input_dim, levels, scale)
    }

    /// The ladder `2^(ℓ (scale-1) / (L-1))`, ℓ = 0..L.
    pub fn frequencies(&self) -> Vec<f64> {
        let levels = self.levels_per_dim;
        if levels == 1 {
            return vec![1.0];
        }
        let top = (self.scale - 1) as f64;
        (0..levels)
            .map(|l| libm::exp2(l as f64 * top / (levels - 1) as f64))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels_per_dim == 0 || self.input_dim == 0 || self.scale == 0 {
            return Err(Error::InvalidArgument("empty positional encoding".into()));
        }
        if self.total_embed != 2 * self.levels_per_dim * self.input_dim {
            return Err(Error::InvalidArgument(format!(
                "total_embed {} != 2 * {} * {}",
                self.total_embed, self.levels_per_dim, self.input_dim
            )));
        }
        Ok(())
    }
}

/// Columns are ordered dimension-major, level-minor, sine before cosine.
pub fn positional_encode(spec: &PositionalEncodingSpec, coords: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(0, 0);
    positional_encode_into(spec, coords, &mut out)?;
    Ok(out)
}

/// [`positional_encode`] into an existing buffer.
pub fn positional_encode_into(spec: &PositionalEncodingSpec, coords: &Matrix, out: &mut Matrix) -> Result<()> {
    spec.validate()?;
    if coords.cols() != spec.input_dim {
        return Err(Error::Shape {
            op: "positional_encode",
            left: coords.shape(),
            right: (coords.rows(), spec.input_dim),
        });
    }
    let freqs: Vec<f64> = spec.frequencies().iter().map(|f| f * core::f64::consts::PI).collect();
    out.reshape_scratch(coords.rows(), spec.total_embed);
    for r in 0..coords.rows() {
        let row = out.row_mut(r);
        for d in 0..spec.input_dim {
            let x = coords.get(r, d);
            for (l, f) in freqs.iter().enumerate() {
                let (s, c) = fastmath::sin_cos(f * x);
                let col = 2 * (d * spec.levels_per_dim + l);
                row[col] = s;
                row[col + 1] = c;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{finite_diff_grad, uniform_matrix, Rng};
    use proptest::prelude::*;

    fn one(v: f64) -> Matrix {
        Matrix::from_rows(&[[v]]).unwrap()
    }

    fn all_kinds(width: usize) -> Vec<ActivationSpec> {
        let ladder = make_fm_multipliers(width, 16.0, 1.0).unwrap();
        vec![
            ActivationSpec::sine(30.0),
            ActivationSpec::finer(5.0),
            ActivationSpec::fm_sine(ladder.clone(), 30.0),
            ActivationSpec::fm_finer(ladder, 30.0),
            ActivationSpec::gauss(16.0),
            ActivationSpec::relu(),
            ActivationSpec::linear(),
        ]
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(
            make_fm_multipliers(4, 2000.0, 1.0).unwrap(),
            vec![0.0, 500.0, 1000.0, 1500.0]
        );
        let m = make_fm_multipliers(3, 300.0, 2.0 / 3.0).unwrap();
        for (got, want) in m.iter().zip([0.0, 200.0 / 3.0, 400.0 / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(make_fm_multipliers(1, 12345.0, 1.0).unwrap(), vec![0.0]);
        assert!(matches!(make_fm_multipliers(0, 10.0, 1.0), Err(Error::InvalidWidth(_))));
        assert!(make_fm_multipliers(4, 10.0, 1.5).is_err());
        assert!(make_fm_multipliers(4, 0.0, 1.0).is_err());
    }

    #[test]
    fn ladder_options() {
        let opts = FmOptions {
            nyquist_factor: 1.0,
            angular_scale: 2.0,
            k_offset: 1,
            first_layer_only: false,
        };
        assert_eq!(
            make_fm_multipliers_with(4, 8.0, &opts).unwrap(),
            vec![4.0, 8.0, 12.0, 16.0]
        );
    }

    #[test]
    fn examples_at_zero_and_period() {
        assert_eq!(activate(&ActivationSpec::sine(30.0), &one(0.0)).unwrap().data(), &[0.0]);
        let fm = ActivationSpec::fm_finer(vec![core::f64::consts::PI], 30.0);
        assert!(activate(&fm, &one(1.0)).unwrap().data()[0].abs() < 1e-12);
        assert_eq!(
            activate(&ActivationSpec::gauss(16.0), &one(0.0)).unwrap().data(),
            &[1.0]
        );
        assert_eq!(
            activate_grad(&ActivationSpec::sine(30.0), &one(0.0)).unwrap().data(),
            &[30.0]
        );
        assert_eq!(
            activate_grad(&ActivationSpec::finer(5.0), &one(0.0)).unwrap().data(),
            &[5.0]
        );
    }

    #[test]
    fn fm_spec_errors() {
        let mut missing = ActivationSpec::fm_sine(vec![], 30.0);
        missing.multipliers = None;
        assert!(matches!(activate(&missing, &one(0.5)), Err(Error::Spec(_))));
        let mismatched = ActivationSpec::fm_sine(vec![0.0, 1.0, 2.0], 30.0);
        assert!(matches!(
            activate(&mismatched, &Matrix::zeros(2, 2)),
            Err(Error::Spec(_))
        ));
        let decreasing = ActivationSpec::fm_sine(vec![2.0, 1.0], 30.0);
        assert!(decreasing.validate(Some(2)).is_err());
        assert!(ActivationSpec::sine(0.0).validate(None).is_err());
    }

    #[test]
    fn fm_column_zero_is_dead() {
        let spec = ActivationSpec::fm_sine(make_fm_multipliers(4, 32.0, 1.0).unwrap(), 30.0);
        let z = uniform_matrix(&mut Rng::new(1), 100, 4, -3.0, 3.0).unwrap();
        let a = activate(&spec, &z).unwrap();
        assert!((0..100).all(|r| a.get(r, 0) == 0.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = Rng::new(2024);
        let width = 5;
        for spec in all_kinds(width) {
            let z = uniform_matrix(&mut rng, 200, width, -2.0, 2.0).unwrap();
            let analytic = activate_grad(&spec, &z).unwrap();
            for r in 0..z.rows() {
                for c in 0..width {
                    let v = z.get(r, c);
                    if spec.kind.is_finer_family() && v.abs() < 1e-8 {
                        continue;
                    }
                    if spec.kind == ActivationKind::Relu && v.abs() < 1e-4 {
                        continue;
                    }
                    let numeric = finite_diff_grad(
                        |t| {
                            let mut zz = Matrix::zeros(1, width);
                            zz.set(0, c, t[0]);
                            activate(&spec, &zz).unwrap().get(0, c)
                        },
                        &[v],
                        1e-6 / (1.0 + spec.omega0.max(spec.scale)),
                    )
                    .unwrap()[0];
                    let exact = analytic.get(r, c);
                    let err = (numeric - exact).abs() / exact.abs().max(1.0);
                    assert!(err < 1e-6, "{:?} z={v} analytic={exact} fd={numeric}", spec.kind);
                }
            }
        }
    }

    #[test]
    fn fused_pass_matches_separate_calls() {
        let z = uniform_matrix(&mut Rng::new(9), 13, 6, -2.0, 2.0).unwrap();
        for spec in all_kinds(6) {
            let (a, d) = activate_with_grad(&spec, &z).unwrap();
            assert_eq!(a, activate(&spec, &z).unwrap());
            assert_eq!(d, activate_grad(&spec, &z).unwrap());
        }
    }

    #[test]
    fn encoding_examples() {
        let spec = PositionalEncodingSpec::new(2, 3, 15).unwrap();
        let enc = positional_encode(&spec, &Matrix::zeros(1, 2)).unwrap();
        for (i, v) in enc.data().iter().enumerate() {
            assert_eq!(*v, if i % 2 == 0 { 0.0 } else { 1.0 });
        }
        let unit = PositionalEncodingSpec::new(1, 1, 15).unwrap();
        let enc = positional_encode(&unit, &one(1.0)).unwrap();
        assert!(enc.get(0, 0).abs() < 1e-12 && (enc.get(0, 1) + 1.0).abs() < 1e-12);
        let image = PositionalEncodingSpec::for_embedding(2, 256, 15).unwrap();
        assert_eq!(image.levels_per_dim, 64);
        assert_eq!(image.total_embed, 256);
        assert!(positional_encode(&image, &Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn encoding_column_order() {
        let spec = PositionalEncodingSpec::new(2, 2, 3).unwrap();
        let enc = positional_encode(&spec, &Matrix::from_rows(&[[0.25, -0.5]]).unwrap()).unwrap();
        let pi = core::f64::consts::PI;
        let want = [
            libm::sin(pi * 0.25),
            libm::cos(pi * 0.25),
            libm::sin(4.0 * pi * 0.25),
            libm::cos(4.0 * pi * 0.25),
            libm::sin(-pi * 0.5),
            libm::cos(-pi * 0.5),
            libm::sin(-4.0 * pi * 0.5),
            libm::cos(-4.0 * pi * 0.5),
        ];
        for (g, w) in enc.data().iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn ladder_endpoints() {
        let spec = PositionalEncodingSpec::new(1, 128, 15).unwrap();
        let f = spec.frequencies();
        assert_eq!(f[0], 1.0);
        assert!((f[127] - 16384.0).abs() < 1e-9);
        assert!(f.windows(2).all(|p| p[1] > p[0]));
        let exact = PositionalEncodingSpec::new(1, 15, 15).unwrap().frequencies();
        assert_eq!(exact, (0..15).map(|l| (1u64 << l) as f64).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn ladder_is_exact_and_increasing(width in 1usize..600, f in 0.5f64..5000.0, factor in 0.01f64..=1.0) {
            let m = make_fm_multipliers(width, f, factor).unwrap();
            for (k, v) in m.iter().enumerate() {
                prop_assert_eq!(*v, k as f64 * factor * f / width as f64);
            }
            prop_assert!(m.windows(2).all(|p| p[1] > p[0]));
            let top = (width - 1) as f64 / width as f64 * factor * f;
            prop_assert!((m[width - 1] - top).abs() <= 4.0 * f64::EPSILON * top);
        }

        #[test]
        fn outputs_are_bounded(seed in any::<u64>()) {
            let z = uniform_matrix(&mut Rng::new(seed), 20, 4, -50.0, 50.0).unwrap();
            for spec in all_kinds(4) {
                let a = activate(&spec, &z).unwrap();
                match spec.kind {
                    // exp(-(s z)²) underflows to 0 for large |z|
                    ActivationKind::Gauss => prop_assert!(a.data().iter().all(|v| (0.0..=1.0).contains(v))),
                    k if k.is_periodic() => prop_assert!(a.data().iter().all(|v| v.abs() <= 1.0)),
                    _ => {}
                }
            }
        }
    }
}
