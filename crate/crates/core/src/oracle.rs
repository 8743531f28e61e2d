//! Brute-force route: Gaussian entropies of finite stationary segments.
//!
//! A segment of length `n` has the Toeplitz covariance `R[i][j] = gamma_|i-j|`.
//! Conditional entropies of one sample given its neighbours converge to the
//! entropy rate (one-sided conditioning) and the erasure entropy rate
//! (two-sided conditioning). For AR(N) both the one-sided limit and the PIR
//! are reached exactly at finite length because the process is N-th order
//! Markov.

use std::io::Write;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::closed_form;
use crate::error::{Error, Result};
use crate::models::{ArModel, AutocovSequence, Process};
use crate::par::{self, Execution};
use crate::rates::LN_2PI_E;
use crate::spectral::SpectrumGrid;

/// Default truncation schedule: powers of two from 32 to 1024.
pub fn default_schedule(max_ell: usize) -> Vec<usize> {
    std::iter::successors(Some(32usize), |l| Some(l * 2))
        .take_while(|&l| l <= max_ell)
        .collect()
}

fn gaussian_entropy(variance: f64) -> f64 {
    0.5 * (LN_2PI_E + variance.ln())
}

/// The `dim x dim` covariance of a stationary segment.
#[derive(Debug, Clone)]
pub struct ToeplitzCov<'a> {
    acov: &'a AutocovSequence,
    dim: usize,
}

impl<'a> ToeplitzCov<'a> {
    pub fn new(acov: &'a AutocovSequence, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("Toeplitz dimension must be >= 1".into()));
        }
        if acov.max_lag() + 1 < dim {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} needs lags up to {}, sequence stops at {}",
                dim - 1,
                acov.max_lag()
            )));
        }
        Ok(Self { acov, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            self.acov.lag(i as isize - j as isize)
        })
    }

    fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        self.matrix()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { dim: self.dim })
    }

    /// Conditional variances `Var(X_i | X_0..X_{i-1})`, the squared Cholesky pivots.
    pub fn sequential_variances(&self) -> Result<Vec<f64>> {
        let l = self.cholesky()?;
        let l = l.l_dirty();
        Ok((0..self.dim).map(|i| l[(i, i)] * l[(i, i)]).collect())
    }

    /// Diagonal element `index` of the precision matrix `R^{-1}`, from one
    /// solve against the basis vector `e_index`.
    pub fn precision_diagonal(&self, index: usize) -> Result<f64> {
        let chol = self.cholesky()?;
        let mut e = DVector::<f64>::zeros(self.dim);
        e[index] = 1.0;
        Ok(chol.solve(&e)[index])
    }
}

/// `1/2 log((2 pi e)^n det R)`, the log-determinant taken from Cholesky pivots.
pub fn block_entropy(c: &ToeplitzCov<'_>) -> Result<f64> {
    Ok(c.sequential_variances()?
        .into_iter()
        .map(gaussian_entropy)
        .sum())
}

/// Levinson-Durbin prediction error variances `P_0..P_order`, where `P_k` is
/// the variance of `X_t` given the `k` preceding samples.
pub fn prediction_error_variances(acov: &AutocovSequence, order: usize) -> Result<Vec<f64>> {
    if order > acov.max_lag() {
        return Err(Error::InvalidArgument(format!(
            "prediction order {order} exceeds available lag {}",
            acov.max_lag()
        )));
    }
    let gamma = acov.gamma();
    let mut coeffs: Vec<f64> = Vec::with_capacity(order);
    let mut errors = Vec::with_capacity(order + 1);
    let mut error = gamma[0];
    errors.push(error);
    for m in 1..=order {
        let acc = gamma[m]
            - coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * gamma[m - 1 - i])
                .sum::<f64>();
        let k = acc / error;
        let previous = coeffs.clone();
        for (i, a) in coeffs.iter_mut().enumerate() {
            *a -= k * previous[m - 2 - i];
        }
        coeffs.push(k);
        error *= 1.0 - k * k;
        if !(error > 0.0) {
            return Err(Error::NotPositiveDefinite { dim: m + 1 });
        }
        errors.push(error);
    }
    Ok(errors)
}

/// `H(X_t | X_{t-ell..t-1})`, which decreases to the entropy rate.
///
/// Equal to `block_entropy(ell + 1) - block_entropy(ell)`; computed from the
/// Levinson-Durbin error variance to avoid cancellation.
pub fn cond_entropy_next(acov: &AutocovSequence, ell: usize) -> Result<f64> {
    let errors = prediction_error_variances(acov, ell)?;
    Ok(gaussian_entropy(errors[ell]))
}

/// `H(X_0 | X_{-ell..-1}, X_{1..ell}) = 1/2 log(2 pi e / K_00)` with `K_00` the
/// central element of the inverse of the `(2 ell + 1)` covariance.
pub fn cond_entropy_center(acov: &AutocovSequence, ell: usize) -> Result<f64> {
    let cov = ToeplitzCov::new(acov, 2 * ell + 1)?;
    let k_center = cov.precision_diagonal(ell)?;
    Ok(0.5 * (LN_2PI_E - k_center.ln()))
}

/// Same conditional entropy for the first sample of the `(2 ell + 1)` window,
/// which has neighbours on one side only.
pub fn cond_entropy_edge(acov: &AutocovSequence, ell: usize) -> Result<f64> {
    let cov = ToeplitzCov::new(acov, 2 * ell + 1)?;
    let k_edge = cov.precision_diagonal(0)?;
    Ok(0.5 * (LN_2PI_E - k_edge.ln()))
}

/// `b = H(X_{1:N} | X_{-N:-1}) - N h` for an AR(N) model. The two blocks
/// straddle `X_0`, which is left out of the joint covariance.
pub fn pir_markov_block(m: &ArModel) -> Result<f64> {
    let order = m.order();
    if order == 0 {
        return Ok(0.0);
    }
    let acov = m.autocovariance(2 * order)?;
    let times: Vec<isize> = (-(order as isize)..0).chain(1..=order as isize).collect();
    let joint = DMatrix::from_fn(2 * order, 2 * order, |i, j| acov.lag(times[i] - times[j]));
    let chol = joint
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { dim: 2 * order })?;
    let l = chol.l_dirty();
    let conditional: f64 = (order..2 * order).map(|i| gaussian_entropy(l[(i, i)] * l[(i, i)])).sum();
    Ok(conditional - order as f64 * closed_form::entropy_rate(m.sigma2()))
}

/// Convergence of a finite-segment estimate toward its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub lengths: Vec<usize>,
    pub values: Vec<f64>,
    pub target: f64,
    pub final_gap: f64,
}

impl ConvergenceReport {
    pub fn new(lengths: Vec<usize>, values: Vec<f64>, target: f64) -> Result<Self> {
        if lengths.is_empty() || lengths.len() != values.len() {
            return Err(Error::InvalidArgument(
                "convergence report needs one value per length".into(),
            ));
        }
        if lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "lengths must be strictly increasing: {lengths:?}"
            )));
        }
        let final_gap = (values[values.len() - 1] - target).abs();
        Ok(Self {
            lengths,
            values,
            target,
            final_gap,
        })
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.values.iter().map(|v| (v - self.target).abs()).collect()
    }

    /// `ell,value,target,gap` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ell,value,target,gap")?;
        self.write_rows(&mut w, None)
    }

    pub(crate) fn write_rows<W: Write>(&self, w: &mut W, prefix: Option<&str>) -> std::io::Result<()> {
        for ((l, v), g) in self.lengths.iter().zip(&self.values).zip(self.gaps()) {
            if let Some(p) = prefix {
                write!(w, "{p},")?;
            }
            writeln!(w, "{l},{v:.16e},{:.16e},{g:.16e}", self.target)?;
        }
        Ok(())
    }
}

fn report_over<F>(exec: Execution, ells: &[usize], target: f64, f: F) -> Result<ConvergenceReport>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    let values = par::try_map_indexed(exec, ells.len(), |i| f(ells[i]))?;
    ConvergenceReport::new(ells.to_vec(), values, target)
}

/// One Levinson pass covers every length in the schedule, so this one is
/// always sequential.
pub fn next_convergence(
    acov: &AutocovSequence,
    ells: &[usize],
    target: f64,
) -> Result<ConvergenceReport> {
    let max = ells.iter().copied().max().unwrap_or(0);
    let errors = prediction_error_variances(acov, max)?;
    let values = ells.iter().map(|&l| gaussian_entropy(errors[l])).collect();
    ConvergenceReport::new(ells.to_vec(), values, target)
}

pub fn center_convergence(
    acov: &AutocovSequence,
    ells: &[usize],
    target: f64,
    exec: Execution,
) -> Result<ConvergenceReport> {
    report_over(exec, ells, target, |l| cond_entropy_center(acov, l))
}

/// `(1/n) sum 1/r_k` over the eigenvalues of the `n = 2 ell + 1` covariance.
pub fn harmonic_eigen_statistic(acov: &AutocovSequence, ell: usize) -> Result<f64> {
    let cov = ToeplitzCov::new(acov, 2 * ell + 1)?;
    let dim = cov.dim();
    let eigen = SymmetricEigen::try_new(cov.matrix(), f64::EPSILON, 100_000)
        .ok_or(Error::EigenFailure { dim })?;
    if eigen.eigenvalues.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::NotPositiveDefinite { dim });
    }
    Ok(eigen.eigenvalues.iter().map(|r| 1.0 / r).sum::<f64>() / dim as f64)
}

/// Eigenvalue harmonic statistic against the spectral mean of `1/S`.
pub fn szego_harmonic_check(
    acov: &AutocovSequence,
    ells: &[usize],
    s: &SpectrumGrid,
    exec: Execution,
) -> Result<ConvergenceReport> {
    let target = s.means().mean_inv_s;
    report_over(exec, ells, target, |l| harmonic_eigen_statistic(acov, l))
}

/// One lag of a Monte Carlo autocovariance comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCheck {
    pub lag: usize,
    pub estimate: f64,
    pub target: f64,
    pub std_error: f64,
}

impl LagCheck {
    pub fn within(&self, bands: f64) -> bool {
        (self.estimate - self.target).abs() <= bands * self.std_error
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub n_samples: usize,
    pub seed: u64,
    pub lags: Vec<LagCheck>,
}

impl McReport {
    pub fn all_within(&self, bands: f64) -> bool {
        self.lags.iter().all(|l| l.within(bands))
    }
}

const MC_BATCHES: usize = 100;

/// Samples a path, estimates `gamma_0..gamma_max_lag` with the biased
/// estimator and attaches batch-means standard errors.
pub fn mc_cross_check(p: &Process, n_samples: usize, seed: u64, max_lag: usize) -> Result<McReport> {
    if n_samples < MC_BATCHES * (max_lag + 2) {
        return Err(Error::InvalidArgument(format!(
            "{n_samples} samples are too few for batch means at lag {max_lag}"
        )));
    }
    let path = p.sample_path(n_samples, seed);
    let estimates = crate::models::empirical_autocov(&path, max_lag)?;
    let targets = p.autocovariance(max_lag)?;
    let lags = (0..=max_lag)
        .map(|k| {
            let products: Vec<f64> = path[k..].iter().zip(&path).map(|(a, b)| a * b).collect();
            let size = products.len() / MC_BATCHES;
            let means: Vec<f64> = products
                .chunks_exact(size)
                .take(MC_BATCHES)
                .map(|c| c.iter().sum::<f64>() / size as f64)
                .collect();
            let grand = means.iter().sum::<f64>() / MC_BATCHES as f64;
            let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>()
                / (MC_BATCHES - 1) as f64;
            LagCheck {
                lag: k,
                estimate: estimates.gamma()[k],
                target: targets.gamma()[k],
                std_error: (var / MC_BATCHES as f64).sqrt(),
            }
        })
        .collect();
    Ok(McReport {
        n_samples,
        seed,
        lags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MaModel;
    use crate::spectral::erasure_rate_spectral;
    use approx::assert_relative_eq;

    const HALF_LN_2PI_E: f64 = 0.5 * LN_2PI_E;

    fn acov_of(p: &Process, lags: usize) -> AutocovSequence {
        p.autocovariance(lags).unwrap()
    }

    fn ar(psi: &[f64], s2: f64) -> Process {
        Process::Ar(ArModel::new(psi.to_vec(), s2).unwrap())
    }

    fn ma(b: &[f64], s2: f64) -> Process {
        Process::Ma(MaModel::new(b.to_vec(), s2).unwrap())
    }

    #[test]
    fn block_entropy_examples() {
        let unit = AutocovSequence::new(vec![1.0]).unwrap();
        assert_relative_eq!(block_entropy(&ToeplitzCov::new(&unit, 1).unwrap()).unwrap(), HALF_LN_2PI_E, epsilon = 1e-15);

        let white = acov_of(&ar(&[], 2.0), 9);
        let h = block_entropy(&ToeplitzCov::new(&white, 10).unwrap()).unwrap();
        assert_relative_eq!(h, 10.0 * 0.5 * (LN_2PI_E + 2f64.ln()), epsilon = 1e-13);

        let ar1 = acov_of(&ar(&[0.5], 0.75), 1);
        let h = block_entropy(&ToeplitzCov::new(&ar1, 2).unwrap()).unwrap();
        assert_relative_eq!(h, 0.5 * (2.0 * LN_2PI_E + 0.75f64.ln()), epsilon = 1e-14);
    }

    #[test]
    fn toeplitz_validation() {
        let g = AutocovSequence::new(vec![1.0, 0.5]).unwrap();
        assert!(ToeplitzCov::new(&g, 0).is_err());
        assert!(ToeplitzCov::new(&g, 3).is_err());
        // valid sequence whose 3x3 Toeplitz matrix is indefinite
        let bad = AutocovSequence::new(vec![1.0, 0.9, -0.9]).unwrap();
        assert_eq!(
            block_entropy(&ToeplitzCov::new(&bad, 3).unwrap()),
            Err(Error::NotPositiveDefinite { dim: 3 })
        );
    }

    #[test]
    fn next_matches_block_difference() {
        let g = acov_of(&ma(&[1.0, 0.6, -0.3], 1.3), 20);
        for ell in [0, 1, 5, 12] {
            let hi = block_entropy(&ToeplitzCov::new(&g, ell + 1).unwrap()).unwrap();
            let lo = if ell == 0 { 0.0 } else { block_entropy(&ToeplitzCov::new(&g, ell).unwrap()).unwrap() };
            assert_relative_eq!(cond_entropy_next(&g, ell).unwrap(), hi - lo, epsilon = 1e-12);
        }
    }

    #[test]
    fn next_examples() {
        let white = acov_of(&ar(&[], 1.5), 8);
        for ell in 0..=8 {
            assert_relative_eq!(cond_entropy_next(&white, ell).unwrap(), 0.5 * (LN_2PI_E + 1.5f64.ln()), epsilon = 1e-15);
        }
        let ar1 = acov_of(&ar(&[0.5], 0.75), 64);
        for ell in 1..=64 {
            assert!((cond_entropy_next(&ar1, ell).unwrap() - 0.5 * (LN_2PI_E + 0.75f64.ln())).abs() < 1e-14);
        }
        let ma1 = acov_of(&ma(&[1.0, 0.5], 1.0), 64);
        assert!((cond_entropy_next(&ma1, 64).unwrap() - HALF_LN_2PI_E).abs() < 1e-6);
        // non-increasing
        let values: Vec<f64> = (0..30).map(|l| cond_entropy_next(&ma1, l).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn center_examples() {
        let white = acov_of(&ar(&[], 2.0), 20);
        assert_relative_eq!(cond_entropy_center(&white, 10).unwrap(), 0.5 * (LN_2PI_E + 2f64.ln()), epsilon = 1e-14);

        let p = ma(&[1.0, 0.5], 1.0);
        let target = erasure_rate_spectral(&SpectrumGrid::from_process(&p, 4096).unwrap());
        let g = acov_of(&p, 2 * 64);
        assert!((cond_entropy_center(&g, 64).unwrap() - target).abs() < 1e-3);
    }

    #[test]
    fn markov_block_pir() {
        assert_eq!(pir_markov_block(&ArModel::white_noise(1.0).unwrap()).unwrap(), 0.0);
        let m = ArModel::new(vec![0.5], 0.75).unwrap();
        assert_relative_eq!(pir_markov_block(&m).unwrap(), 0.5 * 1.25f64.ln(), epsilon = 1e-10);
        let m = ArModel::new(vec![0.5, -0.3], 1.0).unwrap();
        assert_relative_eq!(pir_markov_block(&m).unwrap(), 0.5 * 1.34f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn harmonic_statistic_white_noise() {
        let white = acov_of(&ar(&[], 4.0), 40);
        let s = SpectrumGrid::constant(4.0, 64).unwrap();
        let report = szego_harmonic_check(&white, &[4, 8, 16], &s, Execution::Sequential).unwrap();
        for v in &report.values {
            assert_relative_eq!(*v, 0.25, epsilon = 1e-14);
        }
        assert!(report.final_gap < 1e-14);
    }

    #[test]
    fn report_validation_and_csv() {
        assert!(ConvergenceReport::new(vec![2, 1], vec![0.0, 0.0], 0.0).is_err());
        assert!(ConvergenceReport::new(vec![], vec![], 0.0).is_err());
        let r = ConvergenceReport::new(vec![1, 2], vec![1.5, 1.25], 1.0).unwrap();
        assert_eq!(r.final_gap, 0.25);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("ell,value,target,gap"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "1");
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.5);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.5);
    }

    #[test]
    fn schedule() {
        assert_eq!(default_schedule(1024), vec![32, 64, 128, 256, 512, 1024]);
        assert_eq!(default_schedule(100), vec![32, 64]);
        assert!(default_schedule(16).is_empty());
    }

    #[test]
    fn mc_rejects_short_paths() {
        assert!(mc_cross_check(&ar(&[0.5], 1.0), 100, 1, 2).is_err());
    }
}
