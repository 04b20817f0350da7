//! Reconstruction metrics and hidden-feature redundancy.

use alloc::format;

use crate::network::Model;
use crate::numerics::{matmul_transpose_a, uniform_matrix, Matrix, Rng};
use crate::training::mse_loss;
use crate::{Error, Result};

pub const DEFAULT_REDUNDANCY_SAMPLES: usize = 10_000;

/// Mean squared error over every entry.
pub fn mse(a: &Matrix, b: &Matrix) -> Result<f64> {
    mse_loss(a, b).map(|(loss, _)| loss)
}

/// `10 log₁₀(max² / mse)`, `+∞` for a perfect match.
pub fn psnr(pred: &Matrix, target: &Matrix, max_value: f64) -> Result<f64> {
    if !(max_value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max value must be positive, got {max_value}"
        )));
    }
    Ok(psnr_from_mse(mse(pred, target)?, max_value))
}

pub fn psnr_from_mse(mse: f64, max_value: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(max_value * max_value / mse)
    }
}

/// Single-window SSIM from whole-signal mean, variance and covariance.
pub fn ssim_global(a: &Matrix, b: &Matrix, max_value: f64) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Shape {
            op: "ssim_global",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if !(max_value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max value must be positive, got {max_value}"
        )));
    }
    let n = a.data().len() as f64;
    let mu_a = a.data().iter().sum::<f64>() / n;
    let mu_b = b.data().iter().sum::<f64>() / n;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        let (dx, dy) = (x - mu_a, y - mu_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    let c1 = (0.01 * max_value) * (0.01 * max_value);
    let c2 = (0.03 * max_value) * (0.03 * max_value);
    Ok((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)))
}

/// Intersection over union with both grids thresholded at 0.5.
pub fn iou(pred: &[f64], gt: &[f64]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::Shape {
            op: "iou",
            left: (pred.len(), 1),
            right: (gt.len(), 1),
        });
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &g) in pred.iter().zip(gt) {
        let (p, g) = (p >= 0.5, g >= 0.5);
        inter += (p && g) as usize;
        union += (p || g) as usize;
    }
    if union == 0 {
        return Err(Error::EmptyUnion);
    }
    Ok(inter as f64 / union as f64)
}

/// Covariance of one layer's post-activations.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RedundancyReport {
    pub layer_index: usize,
    /// `K × K`, denominator `n − 1`.
    pub covariance: Matrix,
    pub frobenius: f64,
    pub n_samples: usize,
}

/// Sample covariance of the columns of `features` (`n × K`).
pub fn feature_covariance(features: &Matrix) -> Result<Matrix> {
    let (n, k) = features.shape();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "covariance needs at least 2 samples, got {n}"
        )));
    }
    let first: alloc::vec::Vec<f64> = features.row(0).to_vec();
    let mut centered = features.clone();
    for r in 0..n {
        for (v, f) in centered.row_mut(r).iter_mut().zip(&first) {
            *v -= f;
        }
    }
    let means: alloc::vec::Vec<f64> = centered.column_sums().into_iter().map(|s| s / n as f64).collect();
    for r in 0..n {
        for (v, m) in centered.row_mut(r).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    let mut cov = matmul_transpose_a(&centered, &centered)?;
    let denom = (n - 1) as f64;
    for i in 0..k {
        for j in i..k {
            let v = 0.5 * (cov.get(i, j) + cov.get(j, i)) / denom;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(cov)
}

pub fn covariance_report(features: &Matrix, layer_index: usize) -> Result<RedundancyReport> {
    let covariance = feature_covariance(features)?;
    Ok(RedundancyReport {
        layer_index,
        frobenius: covariance.frobenius_norm(),
        covariance,
        n_samples: features.rows(),
    })
}

/// Draws `n_samples` coordinates uniformly from `[-1, 1]^d` and reports the
/// covariance of hidden layer `layer_index`.
pub fn hidden_covariance(
    model: &Model,
    layer_index: usize,
    rng: &mut Rng,
    n_samples: usize,
) -> Result<RedundancyReport> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    if layer_index + 1 >= model.layers.len() {
        return Err(Error::InvalidArgument(format!(
            "layer {layer_index} is not a hidden layer of a {}-layer model",
            model.layers.len()
        )));
    }
    let coords = uniform_matrix(rng, n_samples, model.input_dim, -1.0, 1.0)?;
    let features = model.features(&coords, layer_index)?;
    covariance_report(&features, layer_index)
}

/// Percentage drop of the Frobenius norm from `baseline` to `fm`.
pub fn redundancy_reduction(baseline: &RedundancyReport, fm: &RedundancyReport) -> Result<f64> {
    if baseline.covariance.shape() != fm.covariance.shape() {
        return Err(Error::Shape {
            op: "redundancy_reduction",
            left: baseline.covariance.shape(),
            right: fm.covariance.shape(),
        });
    }
    if baseline.frobenius == 0.0 {
        return Err(Error::DegenerateBaseline);
    }
    Ok(100.0 * (baseline.frobenius - fm.frobenius) / baseline.frobenius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activations::ActivationSpec;
    use crate::network::Layer;
    use crate::numerics::Rng;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn col(v: &[f64]) -> Matrix {
        Matrix::column(v.to_vec())
    }

    fn report(frobenius: f64) -> RedundancyReport {
        RedundancyReport {
            layer_index: 0,
            covariance: Matrix::zeros(2, 2),
            frobenius,
            n_samples: 10,
        }
    }

    fn single_layer(weights: Matrix, bias: Vec<f64>, activation: ActivationSpec) -> Model {
        let out = weights.rows();
        Model {
            layers: vec![
                Layer {
                    weights,
                    bias: Some(bias),
                    activation,
                },
                Layer {
                    weights: Matrix::zeros(1, out),
                    bias: None,
                    activation: ActivationSpec::linear(),
                },
            ],
            input_dim: 1,
            encoder: None,
            outermost_linear: true,
        }
    }

    #[test]
    fn mse_examples() {
        let a = col(&[0.3, -1.2, 4.0]);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&col(&[1.0]), &col(&[0.0])).unwrap(), 1.0);
        let x = uniform_matrix(&mut Rng::new(1), 50, 3, -1.0, 1.0).unwrap();
        let y = uniform_matrix(&mut Rng::new(2), 50, 3, -1.0, 1.0).unwrap();
        let mut acc = 0.0;
        for i in 0..150 {
            let d = x.data()[i] - y.data()[i];
            acc += d * d;
        }
        assert!((mse(&x, &y).unwrap() - acc / 150.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_examples() {
        let a = col(&[0.1, 0.2]);
        assert_eq!(psnr(&a, &a, 1.0).unwrap(), f64::INFINITY);
        assert!((psnr_from_mse(0.01, 1.0) - 20.0).abs() < 1e-12);
        assert!(psnr_from_mse(255.0 * 255.0, 255.0).abs() < 1e-12);
        assert!(psnr(&a, &a, 0.0).is_err());
    }

    #[test]
    fn ssim_examples() {
        let a = Matrix::from_rows(&[vec![0.2, 0.9], vec![0.4, 0.1]]).unwrap();
        assert!((ssim_global(&a, &a, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let c = Matrix::from_rows(&[vec![0.3, 0.3], vec![0.3, 0.3]]).unwrap();
        assert!((ssim_global(&c, &c, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(ssim_global(&a, &Matrix::zeros(1, 4), 1.0).is_err());
    }

    #[test]
    fn ssim_checkerboard_oracle() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let b = a.map(|v| -v);
        // μ = 0, σ² = 1, σ_xy = −1 with max = 2: c₁ = 4e-4, c₂ = 3.6e-3
        let expected = (0.0 + 4e-4) * (-2.0 + 3.6e-3) / ((0.0 + 4e-4) * (2.0 + 3.6e-3));
        let got = ssim_global(&a, &b, 2.0).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - -0.996_406_468_356_957_5).abs() < 1e-12);
    }

    #[test]
    fn iou_examples() {
        let a = [1.0, 0.0, 1.0, 1.0];
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert_eq!(iou(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let bar = |lo: usize, hi: usize| {
            (0..20)
                .map(|i| ((lo..=hi).contains(&i)) as u8 as f64)
                .collect::<Vec<_>>()
        };
        assert!((iou(&bar(0, 9), &bar(5, 14)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(iou(&[0.0; 3], &[0.2; 3]), Err(Error::EmptyUnion));
        assert!(iou(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn constant_layer_has_zero_covariance() {
        let model = single_layer(Matrix::zeros(4, 1), vec![0.1, 0.2, 0.3, 0.4], ActivationSpec::sine(1.0));
        let rep = hidden_covariance(&model, 0, &mut Rng::new(3), 500).unwrap();
        assert_eq!(rep.frobenius, 0.0);
        assert_eq!(rep.n_samples, 500);
        assert!(hidden_covariance(&model, 1, &mut Rng::new(3), 500).is_err());
        assert!(hidden_covariance(&model, 0, &mut Rng::new(3), 1).is_err());
    }

    #[test]
    fn duplicated_neurons_are_perfectly_correlated() {
        let w = Matrix::from_rows(&[vec![2.0], vec![2.0], vec![0.7]]).unwrap();
        let model = single_layer(w, vec![0.1, 0.1, 0.0], ActivationSpec::sine(1.0));
        let rep = hidden_covariance(&model, 0, &mut Rng::new(4), 2000).unwrap();
        let c = &rep.covariance;
        assert!((c.get(0, 0) - c.get(1, 1)).abs() < 1e-12);
        assert!((c.get(0, 1) - c.get(0, 0)).abs() < 1e-12);
    }

    #[test]
    fn sinusoid_features_are_nearly_uncorrelated() {
        let w = Matrix::from_fn(8, 1, |k, _| (k + 1) as f64 * core::f64::consts::PI);
        let model = single_layer(w, vec![0.0; 8], ActivationSpec::sine(1.0));
        let rep = hidden_covariance(&model, 0, &mut Rng::new(5), 100_000).unwrap();
        // midpoint-rule integrals of sin(jπx) sin(kπx) / 2 over [-1, 1]
        let steps = 20_000;
        let h = 2.0 / steps as f64;
        for j in 0..8 {
            for k in 0..8 {
                let integral: f64 = (0..steps)
                    .map(|i| {
                        let x = -1.0 + (i as f64 + 0.5) * h;
                        libm::sin((j + 1) as f64 * core::f64::consts::PI * x)
                            * libm::sin((k + 1) as f64 * core::f64::consts::PI * x)
                    })
                    .sum::<f64>()
                    * h
                    / 2.0;
                assert!((rep.covariance.get(j, k) - integral).abs() < 0.01, "({j},{k})");
                if j != k {
                    let diag = rep.covariance.get(j, j).min(rep.covariance.get(k, k));
                    assert!(rep.covariance.get(j, k).abs() < 0.02 * diag, "({j},{k})");
                }
            }
        }
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(redundancy_reduction(&report(2.0), &report(2.0)).unwrap(), 0.0);
        assert_eq!(redundancy_reduction(&report(2.0), &report(1.0)).unwrap(), 50.0);
        assert_eq!(
            redundancy_reduction(&report(0.0), &report(1.0)),
            Err(Error::DegenerateBaseline)
        );
        let mut wide = report(1.0);
        wide.covariance = Matrix::zeros(3, 3);
        assert!(redundancy_reduction(&report(1.0), &wide).is_err());
    }

    proptest! {
        #[test]
        fn psnr_decreases_with_mse(a in 1e-9f64..10.0, b in 1e-9f64..10.0) {
            prop_assume!(a < b);
            prop_assert!(psnr_from_mse(a, 1.0) > psnr_from_mse(b, 1.0));
        }

        #[test]
        fn ssim_self_is_one(v in proptest::collection::vec(-100.0f64..100.0, 1..64)) {
            let m = Matrix::column(v);
            prop_assert!((ssim_global(&m, &m, 1.0).unwrap() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn iou_symmetric(a in proptest::collection::vec(0.0f64..1.0, 1..64), seed in 0u64..1000) {
            let b: Vec<f64> = uniform_matrix(&mut Rng::new(seed), 1, a.len(), 0.0, 1.0).unwrap().into_data();
            match (iou(&a, &b), iou(&b, &a)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (x, y) => prop_assert_eq!(x, y),
            }
        }

        #[test]
        fn covariance_invariants(seed in 0u64..500, k in 1usize..6) {
            let mut rng = Rng::new(seed);
            let feats = uniform_matrix(&mut rng, 40, k, -2.0, 2.0).unwrap();
            let rep = covariance_report(&feats, 0).unwrap();
            let c = &rep.covariance;
            let mut sq = 0.0;
            for i in 0..k {
                prop_assert!(c.get(i, i) >= 0.0);
                for j in 0..k {
                    prop_assert!((c.get(i, j) - c.get(j, i)).abs() < 1e-9);
                    sq += c.get(i, j) * c.get(i, j);
                }
            }
            prop_assert!((rep.frobenius - libm::sqrt(sq)).abs() < 1e-12);
            // positive semidefinite: xᵀ C x ≥ 0 for random directions
            for _ in 0..8 {
                let x = uniform_matrix(&mut rng, 1, k, -1.0, 1.0).unwrap();
                let mut q = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        q += x.data()[i] * c.get(i, j) * x.data()[j];
                    }
                }
                prop_assert!(q >= -1e-10);
            }
        }

        #[test]
        fn hidden_covariance_deterministic(seed in 0u64..50) {
            let w = Matrix::from_fn(3, 1, |k, _| k as f64 + 0.5);
            let model = single_layer(w, vec![0.0; 3], ActivationSpec::sine(1.0));
            let a = hidden_covariance(&model, 0, &mut Rng::new(seed), 100).unwrap();
            let b = hidden_covariance(&model, 0, &mut Rng::new(seed), 100).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
