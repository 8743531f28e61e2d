//! Power spectral densities on a uniform frequency grid and the information
//! measures expressed as spectral integrals.
//!
//! Every measure is a function of three spectral means
//! `(1/2pi) int f(S(w)) dw` with `f` the identity, `log` and reciprocal. The
//! integrands are smooth and periodic for stable AR and strictly minimum-phase
//! MA models, so the rectangle rule on the periodic grid converges
//! geometrically and is what [`SpectrumGrid::means`] uses.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::models::{ArModel, MaModel, Process};
use crate::rates::{InfoRates, LN_2PI_E};

pub const DEFAULT_GRID_N: usize = 1 << 14;

/// Spectral values below this are treated as zeros of the spectrum.
pub const POSITIVITY_FLOOR: f64 = 1e-300;

/// Largest acceptable change in any measure between `n` and `n/2` points
/// before the estimate is flagged as unconverged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

/// Spectra narrower than this ratio of min to max are reported as likely
/// divergent in the log or reciprocal integral.
const DYNAMIC_RANGE_WARNING: f64 = 1e-12;

/// Samples `S(w_j)` at `w_j = -pi + 2 pi j / n`, `n` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    values: Vec<f64>,
}

/// `w_j = (2j - n) pi / n`; written this way so `w_{n-j} = -w_j` exactly.
pub fn grid_omega(j: usize, n: usize) -> f64 {
    (2.0 * j as f64 - n as f64) * PI / n as f64
}

fn check_grid_size(n: usize, order: usize) -> Result<()> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidGrid(format!("grid size {n} is not a power of two >= 2")));
    }
    if n < 2 * (order + 1) {
        return Err(Error::InvalidGrid(format!(
            "grid size {n} is too small for model order {order}"
        )));
    }
    Ok(())
}

/// `|sum_k c_k e^{-i w k}|^2`.
fn power_response(coeffs: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        let (s, cos) = (omega * k as f64).sin_cos();
        re += c * cos;
        im -= c * s;
    }
    re * re + im * im
}

impl SpectrumGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        check_grid_size(n, 0)?;
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= POSITIVITY_FLOOR && v.is_finite()))
        {
            return Err(Error::ZeroOnGrid {
                index,
                omega: grid_omega(index, n),
                value,
            });
        }
        Ok(Self { values })
    }

    pub fn constant(value: f64, n: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    /// `S(w) = sigma2 / |A(e^iw)|^2` with `a_0 = 1, a_k = -psi_k`.
    pub fn from_ar(m: &ArModel, n: usize) -> Result<Self> {
        check_grid_size(n, m.order())?;
        let a = m.denominator();
        let values = (0..n)
            .map(|j| m.sigma2() / power_response(&a, grid_omega(j, n)))
            .collect();
        Self::checked_even(values)
    }

    /// `S(w) = sigma2 |B(e^iw)|^2`; zeros of `B` on the grid are rejected.
    ///
    /// Besides the absolute floor, a value is treated as zero when it is
    /// within the rounding error of evaluating `B`, i.e. below
    /// `sigma2 (8 eps sum |b_k|)^2`.
    pub fn from_ma(m: &MaModel, n: usize) -> Result<Self> {
        check_grid_size(n, m.order())?;
        let l1: f64 = m.b().iter().map(|c| c.abs()).sum();
        let rounding_floor = m.sigma2() * (8.0 * f64::EPSILON * l1).powi(2);
        let values: Vec<f64> = (0..n)
            .map(|j| m.sigma2() * power_response(m.b(), grid_omega(j, n)))
            .collect();
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| v <= rounding_floor)
        {
            return Err(Error::ZeroOnGrid {
                index,
                omega: grid_omega(index, n),
                value,
            });
        }
        Self::checked_even(values)
    }

    pub fn from_process(p: &Process, n: usize) -> Result<Self> {
        match p {
            Process::Ar(m) => Self::from_ar(m, n),
            Process::Ma(m) => Self::from_ma(m, n),
        }
    }

    fn checked_even(values: Vec<f64>) -> Result<Self> {
        let grid = Self::new(values)?;
        let n = grid.n();
        for j in 1..n / 2 {
            let (a, b) = (grid.values[j], grid.values[n - j]);
            if (a - b).abs() > 1e-12 * a.max(b) {
                return Err(Error::InvalidGrid(format!(
                    "spectrum is not even at w = {}: {a} vs {b}",
                    grid_omega(j, n)
                )));
            }
        }
        Ok(grid)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise reciprocal: the spectrum of the dual process.
    pub fn inverted(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| 1.0 / v).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| c * v).collect())
    }

    pub fn means(&self) -> SpectralMeans {
        SpectralMeans::from_samples(self.values.iter().copied())
    }

    /// Largest change in `h`, `rho` or `b` when the grid is halved (every
    /// other sample). Used as a quadrature self-check.
    pub fn halving_gap(&self) -> f64 {
        if self.n() < 4 {
            return f64::INFINITY;
        }
        let full = self.means().rates();
        let half = SpectralMeans::from_samples(self.values.iter().step_by(2).copied()).rates();
        (full.h - half.h)
            .abs()
            .max((full.rho - half.rho).abs())
            .max((full.b - half.b).abs())
    }

    /// `omega,S` rows for plotting and debugging.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,S")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", grid_omega(j, self.n()), v)?;
        }
        Ok(())
    }
}

/// Arithmetic mean of `S`, mean of `log S`, and mean of `1/S` over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMeans {
    pub mean_s: f64,
    pub mean_log_s: f64,
    pub mean_inv_s: f64,
}

impl SpectralMeans {
    fn from_samples(samples: impl ExactSizeIterator<Item = f64>) -> Self {
        let n = samples.len() as f64;
        let (mut s, mut log_s, mut inv_s) = (0.0, 0.0, 0.0);
        for v in samples {
            s += v;
            log_s += v.ln();
            inv_s += 1.0 / v;
        }
        Self {
            mean_s: s / n,
            mean_log_s: log_s / n,
            mean_inv_s: inv_s / n,
        }
    }

    /// `h = (log 2 pi e + <log S>) / 2`.
    pub fn entropy_rate(&self) -> f64 {
        0.5 * (LN_2PI_E + self.mean_log_s)
    }

    /// `rho = (log <S> - <log S>) / 2`.
    pub fn multi_information_rate(&self) -> f64 {
        0.5 * (self.mean_s.ln() - self.mean_log_s)
    }

    /// `b = (log <1/S> + <log S>) / 2`.
    pub fn predictive_information_rate(&self) -> f64 {
        0.5 * (self.mean_inv_s.ln() + self.mean_log_s)
    }

    /// `r = (log 2 pi e - log <1/S>) / 2`.
    pub fn erasure_entropy_rate(&self) -> f64 {
        0.5 * LN_2PI_E - 0.5 * self.mean_inv_s.ln()
    }

    /// All four measures, each from its own spectral formula.
    pub fn rates(&self) -> InfoRates {
        InfoRates {
            h: self.entropy_rate(),
            rho: self.multi_information_rate(),
            b: self.predictive_information_rate(),
            r: self.erasure_entropy_rate(),
            units: Default::default(),
        }
    }
}

pub fn spectral_means(s: &SpectrumGrid) -> SpectralMeans {
    s.means()
}

pub fn entropy_rate_spectral(s: &SpectrumGrid) -> f64 {
    s.means().entropy_rate()
}

pub fn mir_spectral(s: &SpectrumGrid) -> f64 {
    s.means().multi_information_rate()
}

pub fn pir_spectral(s: &SpectrumGrid) -> f64 {
    s.means().predictive_information_rate()
}

pub fn erasure_rate_spectral(s: &SpectrumGrid) -> f64 {
    s.means().erasure_entropy_rate()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralWarning {
    /// Halving the grid moved a measure by more than [`CONVERGENCE_TOLERANCE`].
    QuadratureUnconverged { gap: f64 },
    /// The spectrum nearly vanishes or nearly blows up somewhere, so the
    /// log or reciprocal integral is close to divergent.
    DivergentMeasure { min_over_max: f64 },
}

/// Spectral-path rates plus the quadrature diagnostics behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub rates: InfoRates,
    pub halving_gap: f64,
    pub warnings: Vec<SpectralWarning>,
}

pub fn spectral_estimate(s: &SpectrumGrid) -> SpectralEstimate {
    let rates = s.means().rates();
    let halving_gap = s.halving_gap();
    let mut warnings = Vec::new();
    if !(halving_gap <= CONVERGENCE_TOLERANCE) {
        warnings.push(SpectralWarning::QuadratureUnconverged { gap: halving_gap });
    }
    let (lo, hi) = s
        .values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo / hi < DYNAMIC_RANGE_WARNING {
        warnings.push(SpectralWarning::DivergentMeasure {
            min_over_max: lo / hi,
        });
    }
    SpectralEstimate {
        rates,
        halving_gap,
        warnings,
    }
}
