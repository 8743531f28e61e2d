//! Autoregressive and moving-average Gaussian process models.
//!
//! An [`ArModel`] is driven by `X_t = U_t + sum_k psi_k X_{t-k}` and an
//! [`MaModel`] by `X_t = sum_k b_k U_{t-k}`, with i.i.d. `U_t ~ N(0, sigma2)`.
//! Constructors validate stability (AR) or normalise to minimum phase (MA),
//! so every value of these types describes a stationary process.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Characteristic roots must satisfy `|root| < 1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;

// Roots within this distance outside the circle are treated as lying on it.
const UNIT_CIRCLE_SLACK: f64 = 1e-10;

const MIN_BURN_IN: usize = 1000;
const MAX_BURN_IN: usize = 10_000_000;

fn check_variance(sigma2: f64) -> Result<()> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveVariance(sigma2))
    }
}

/// Stable AR(N) model: prediction coefficients `psi_1..psi_N` plus the
/// innovation variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    psi: Vec<f64>,
    sigma2: f64,
}

impl ArModel {
    /// Validates stability via the roots of `z^N - psi_1 z^(N-1) - .. - psi_N`.
    pub fn new(psi: Vec<f64>, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        if psi.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite prediction coefficient in {psi:?}"
            )));
        }
        let model = Self { psi, sigma2 };
        if let Some(root) = model
            .poles()?
            .into_iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        {
            if root.norm() >= 1.0 - STABILITY_MARGIN {
                return Err(Error::Unstable { root });
            }
        }
        Ok(model)
    }

    pub fn white_noise(sigma2: f64) -> Result<Self> {
        Self::new(Vec::new(), sigma2)
    }

    /// Builds the model whose transfer function is `z^N / prod (z - pole)`.
    ///
    /// The poles are given exactly, so no root finding is involved and the
    /// only requirement is `|pole| < 1`. This admits the near-degenerate
    /// clustered poles used to probe the PIR upper limit.
    pub fn from_poles(poles: &PoleSet, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        let expanded = poly::expand_roots(poles.values());
        let psi = expanded[1..].iter().map(|c| -c.re).collect();
        Ok(Self { psi, sigma2 })
    }

    /// AR model with the given coefficients, scaled so that `gamma_0 = 1`.
    pub fn unit_variance(psi: Vec<f64>) -> Result<Self> {
        let probe = Self::new(psi, 1.0)?;
        let gamma0 = probe.autocovariance(0)?.gamma0();
        Ok(Self {
            psi: probe.psi,
            sigma2: 1.0 / gamma0,
        })
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn order(&self) -> usize {
        self.psi.len()
    }

    /// Same coefficients, new innovation variance.
    pub fn with_sigma2(&self, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        Ok(Self {
            psi: self.psi.clone(),
            sigma2,
        })
    }

    /// Denominator coefficients `a_0 = 1, a_k = -psi_k`.
    pub fn denominator(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.psi.iter().map(|p| -p))
            .collect()
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        poly::roots(&self.denominator())
    }

    pub fn max_pole_modulus(&self) -> Result<f64> {
        Ok(self.poles()?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Autocovariance `gamma_0..gamma_max_lag`.
    ///
    /// Lags `0..=N` come from the Yule-Walker system
    /// `gamma_k - sum_i psi_i gamma_|k-i| = sigma2 delta_k`; longer lags from
    /// the recursion `gamma_k = sum_i psi_i gamma_{k-i}`.
    pub fn autocovariance(&self, max_lag: usize) -> Result<AutocovSequence> {
        let order = self.order();
        let mut system = DMatrix::<f64>::identity(order + 1, order + 1);
        for k in 0..=order {
            for (i, &p) in self.psi.iter().enumerate() {
                let lag = (k as isize - (i as isize + 1)).unsigned_abs();
                system[(k, lag)] -= p;
            }
        }
        let mut rhs = DVector::<f64>::zeros(order + 1);
        rhs[0] = self.sigma2;
        let solved = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
        if !solved.iter().all(|g| g.is_finite()) || solved[0] <= 0.0 {
            return Err(Error::SingularSystem);
        }

        let mut gamma: Vec<f64> = solved.iter().copied().collect();
        for k in (order + 1)..=max_lag {
            let next = self
                .psi
                .iter()
                .enumerate()
                .map(|(i, p)| p * gamma[k - i - 1])
                .sum();
            gamma.push(next);
        }
        gamma.truncate(max_lag + 1);
        AutocovSequence::new(gamma)
    }

    fn burn_in(&self) -> usize {
        let rho = self.max_pole_modulus().unwrap_or(0.0);
        if rho <= 0.0 {
            return MIN_BURN_IN;
        }
        let wanted = 50.0 * self.order() as f64 / -rho.ln();
        if wanted.is_finite() {
            (wanted.ceil() as usize).clamp(MIN_BURN_IN, MAX_BURN_IN)
        } else {
            MAX_BURN_IN
        }
    }
}

/// Minimum-phase MA(N) model with `b[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaModel {
    b: Vec<f64>,
    sigma2: f64,
}

impl MaModel {
    /// Normalises `b` to minimum phase with unit leading coefficient; the
    /// resulting gain is absorbed into `sigma2`, so the process (and its
    /// spectrum) is unchanged.
    pub fn new(b: Vec<f64>, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        if b.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite FIR coefficient in {b:?}"
            )));
        }
        let (b, gain) = ma_minimum_phase(&b)?;
        check_variance(sigma2 * gain)?;
        Ok(Self {
            b,
            sigma2: sigma2 * gain,
        })
    }

    /// FIR filter with the given zeros: `B(z) = z^-N prod (z - zero)`.
    pub fn from_zeros(zeros: &ZeroSet, sigma2: f64) -> Result<Self> {
        let b = poly::expand_roots(zeros.values())
            .iter()
            .map(|c| c.re)
            .collect();
        Self::new(b, sigma2)
    }

    pub fn white_noise(sigma2: f64) -> Result<Self> {
        Self::new(vec![1.0], sigma2)
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn order(&self) -> usize {
        self.b.len() - 1
    }

    pub fn with_sigma2(&self, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        Ok(Self {
            b: self.b.clone(),
            sigma2,
        })
    }

    /// Zeros of `B(z)`; numerically multiple zeros report the modulus of
    /// their cluster centre.
    pub fn zeros(&self) -> Result<ZeroSet> {
        let values = poly::roots(&self.b)?;
        let moduli = poly::effective_moduli(&self.b, &values);
        Ok(ZeroSet { values, moduli })
    }

    /// `gamma_m = sigma2 sum_{k=m}^N b_k b_{k-m}`, zero beyond lag N.
    pub fn autocovariance(&self, max_lag: usize) -> Result<AutocovSequence> {
        let gamma = (0..=max_lag)
            .map(|m| {
                let dot: f64 = self
                    .b
                    .iter()
                    .skip(m)
                    .zip(&self.b)
                    .map(|(hi, lo)| hi * lo)
                    .sum();
                self.sigma2 * dot
            })
            .collect();
        AutocovSequence::new(gamma)
    }
}

/// Reflects every root of `B(z)` lying outside the unit disk to `1 / conj(root)`
/// and rescales to `b[0] = 1`.
///
/// Returns the normalised coefficients and the variance gain: the input
/// spectrum equals `gain * |B'(e^iw)|^2`. Input that is already minimum phase
/// with `b[0] = 1` is returned untouched with `gain = 1`.
pub fn ma_minimum_phase(b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if b.iter().all(|&c| c == 0.0) {
        return Err(Error::DegeneratePolynomial);
    }
    let lead = b[0];
    if lead == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let monic: Vec<f64> = if lead == 1.0 {
        b.to_vec()
    } else {
        b.iter().map(|c| c / lead).collect()
    };
    let mut gain = lead * lead;
    let zeros = poly::roots(&monic)?;
    let moduli = poly::effective_moduli(&monic, &zeros);
    let outside = |m: f64| m > 1.0 + UNIT_CIRCLE_SLACK;
    if !moduli.iter().any(|&m| outside(m)) {
        return Ok((monic, gain));
    }
    let reflected: Vec<Complex64> = zeros
        .into_iter()
        .zip(moduli)
        .map(|(z, m)| {
            if outside(m) {
                gain *= z.norm_sqr();
                z.conj().inv()
            } else {
                z
            }
        })
        .collect();
    let coeffs = poly::expand_roots(&reflected).iter().map(|c| c.re).collect();
    Ok((coeffs, gain))
}

/// Multiset of poles strictly inside the unit disk, closed under conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    values: Vec<Complex64>,
}

impl PoleSet {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if let Some(&pole) = values.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::PoleOutsideDisk { pole });
        }
        if let Some(pole) = poly::find_unpaired(&values) {
            return Err(Error::ConjugateViolation { pole });
        }
        Ok(Self { values })
    }

    /// `count` copies of the real pole `at`.
    pub fn repeated(at: f64, count: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(at, 0.0); count])
    }

    /// Random conjugate-closed pole set of the given order.
    ///
    /// Each pair slot is, with equal probability, a complex-conjugate pair
    /// `r e^{+-i theta}` with `theta ~ U(0, pi)` and `r = u^(1 / (2 bias))`,
    /// or two independent real poles `+-u^(1 / bias)`. `bias = 1` is uniform in
    /// the disk (or interval); larger values push poles toward the circle.
    /// Odd orders get one extra real pole. Moduli are scaled by `max_modulus`.
    pub fn sample<R: Rng + ?Sized>(
        order: usize,
        radial_bias: f64,
        max_modulus: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(radial_bias > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radial bias must be positive, got {radial_bias}"
            )));
        }
        if !(max_modulus > 0.0 && max_modulus < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "max pole modulus must lie in (0, 1), got {max_modulus}"
            )));
        }
        let real_pole = |rng: &mut R| {
            let u: f64 = rng.random();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Complex64::new(sign * max_modulus * u.powf(1.0 / radial_bias), 0.0)
        };
        let mut values = Vec::with_capacity(order);
        for _ in 0..order / 2 {
            if rng.random::<bool>() {
                let u: f64 = rng.random();
                let theta = std::f64::consts::PI * rng.random::<f64>();
                let z = Complex64::from_polar(max_modulus * u.powf(0.5 / radial_bias), theta);
                values.push(z);
                values.push(z.conj());
            } else {
                values.push(real_pole(rng));
                values.push(real_pole(rng));
            }
        }
        if order % 2 == 1 {
            values.push(real_pole(rng));
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Zeros of a FIR polynomial; moduli may reach 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    values: Vec<Complex64>,
    moduli: Vec<f64>,
}

impl ZeroSet {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if let Some(pole) = poly::find_unpaired(&values) {
            return Err(Error::ConjugateViolation { pole });
        }
        let moduli = values.iter().map(|z| z.norm()).collect();
        Ok(Self { values, moduli })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_modulus(&self) -> f64 {
        self.moduli.iter().copied().fold(0.0, f64::max)
    }
}

/// Autocovariance lags `gamma_0..gamma_max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovSequence {
    gamma: Vec<f64>,
}

impl AutocovSequence {
    /// Requires `gamma_0 > 0` and `|gamma_k| <= gamma_0`.
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        let gamma0 = *gamma
            .first()
            .ok_or_else(|| Error::InvalidAutocov("empty sequence".into()))?;
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidAutocov(format!("gamma_0 = {gamma0}")));
        }
        // Slack for rounding in near-unit-root Yule-Walker solves.
        let bound = gamma0 * (1.0 + 1e-9);
        if let Some((k, g)) = gamma
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.abs() <= bound))
        {
            return Err(Error::InvalidAutocov(format!(
                "|gamma_{k}| = {} exceeds gamma_0 = {gamma0}",
                g.abs()
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma[0]
    }

    pub fn max_lag(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `gamma_|k|` for any signed lag within range.
    pub fn lag(&self, k: isize) -> f64 {
        self.gamma[k.unsigned_abs()]
    }
}

/// Biased estimator `(1/n) sum_t x_t x_{t-k}`, which keeps the estimated
/// sequence positive semidefinite.
pub fn empirical_autocov(path: &[f64], max_lag: usize) -> Result<AutocovSequence> {
    let n = path.len();
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, len: n });
    }
    let gamma = (0..=max_lag)
        .map(|k| {
            path[k..]
                .iter()
                .zip(path)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect();
    AutocovSequence::new(gamma)
}

/// Either model family, as accepted by the CLI and the aggregate routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Process {
    Ar(ArModel),
    Ma(MaModel),
}

impl Process {
    pub fn sigma2(&self) -> f64 {
        match self {
            Process::Ar(m) => m.sigma2(),
            Process::Ma(m) => m.sigma2(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Process::Ar(m) => m.order(),
            Process::Ma(m) => m.order(),
        }
    }

    pub fn autocovariance(&self, max_lag: usize) -> Result<AutocovSequence> {
        match self {
            Process::Ar(m) => m.autocovariance(max_lag),
            Process::Ma(m) => m.autocovariance(max_lag),
        }
    }

    /// Same coefficients with the innovation variance replaced.
    pub fn with_sigma2(&self, sigma2: f64) -> Result<Self> {
        Ok(match self {
            Process::Ar(m) => Process::Ar(m.with_sigma2(sigma2)?),
            Process::Ma(m) => Process::Ma(m.with_sigma2(sigma2)?),
        })
    }

    /// Realisation of length `n`, deterministic in `seed`. AR paths discard
    /// `max(1000, 50 N / -ln max|pole|)` warm-up samples (capped at 1e7).
    pub fn sample_path(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Process::Ar(m) => {
                let sd = m.sigma2.sqrt();
                let order = m.order();
                let burn = if order == 0 { 0 } else { m.burn_in() };
                let mut out = Vec::with_capacity(burn + n);
                for t in 0..burn + n {
                    let u: f64 = rng.sample(StandardNormal);
                    let feedback: f64 = m
                        .psi
                        .iter()
                        .take(t)
                        .enumerate()
                        .map(|(i, p)| p * out[t - i - 1])
                        .sum();
                    out.push(sd * u + feedback);
                }
                out.split_off(burn)
            }
            Process::Ma(m) => {
                let sd = m.sigma2.sqrt();
                let order = m.order();
                let innovations: Vec<f64> = (0..n + order)
                    .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                (0..n)
                    .map(|t| {
                        m.b.iter()
                            .enumerate()
                            .map(|(k, bk)| bk * innovations[t + order - k])
                            .sum()
                    })
                    .collect()
            }
        }
    }
}

/// On-disk model description: `{"type": "ar"|"ma", "coeffs": [...], "sigma2": ...}`.
///
/// For `"ar"` the coefficients are `psi_1..psi_N`; for `"ma"` they are
/// the full FIR vector `b_0..b_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    pub coeffs: Vec<f64>,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ar,
    Ma,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))
    }

    pub fn to_process(&self) -> Result<Process> {
        match self.kind {
            ModelKind::Ar => Ok(Process::Ar(ArModel::new(self.coeffs.clone(), self.sigma2)?)),
            ModelKind::Ma => Ok(Process::Ma(MaModel::new(self.coeffs.clone(), self.sigma2)?)),
        }
    }
}

impl From<&Process> for ModelFile {
    fn from(p: &Process) -> Self {
        match p {
            Process::Ar(m) => ModelFile {
                kind: ModelKind::Ar,
                coeffs: m.psi.clone(),
                sigma2: m.sigma2,
            },
            Process::Ma(m) => ModelFile {
                kind: ModelKind::Ma,
                coeffs: m.b.clone(),
                sigma2: m.sigma2,
            },
        }
    }
}
