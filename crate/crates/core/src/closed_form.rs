//! Coefficient-domain formulas for the information measures.
//!
//! For AR(N) the PIR is `1/2 log(1 + sum psi_k^2)` and for minimum-phase MA(N)
//! the multi-information rate is `1/2 log(1 + sum b_k^2)`. Both go through
//! [`half_log_one_plus_sum_sq`], so the AR/MA duality holds bit for bit.
//! The MA PIR is obtained from the dual AR process that has the inverse
//! spectrum: `1 / (sigma2 |B|^2)` is the spectrum of the AR model with
//! denominator `B`, and the PIR of a spectrum equals the multi-information
//! rate of its inverse.

use crate::error::{Error, Result};
use crate::models::{ArModel, MaModel, Process};
use crate::rates::{InfoRates, LN_2PI_E};

/// MA zeros closer than this to the unit circle make the PIR divergent.
pub const DIVERGENCE_MARGIN: f64 = 1e-6;

/// `1/2 log(1 + sum c_k^2)`.
pub fn half_log_one_plus_sum_sq(c: &[f64]) -> f64 {
    let sum_sq: f64 = c.iter().map(|v| v * v).sum();
    0.5 * sum_sq.ln_1p()
}

/// Predictive information rate of an AR model. Ignores `sigma2`.
pub fn pir_ar(m: &ArModel) -> f64 {
    half_log_one_plus_sum_sq(m.psi())
}

/// `1/2 log(2 pi e sigma2)`, the entropy rate of both AR and minimum-phase MA models.
pub fn entropy_rate(sigma2: f64) -> f64 {
    0.5 * (LN_2PI_E + sigma2.ln())
}

pub fn mir_ar1(psi1: f64) -> Result<f64> {
    if !(psi1.abs() < 1.0) {
        return Err(Error::OutOfRegion { params: vec![psi1] });
    }
    Ok(-0.5 * (-psi1 * psi1).ln_1p())
}

fn in_ar2_region(psi1: f64, psi2: f64) -> bool {
    psi2 > -1.0 && psi1 + psi2 < 1.0 && psi2 - psi1 < 1.0
}

/// `1/2 log[(1 - psi2) / (1 - (psi1^2 + psi2)(1 + psi2) + psi2^3)]`.
pub fn mir_ar2(psi1: f64, psi2: f64) -> Result<f64> {
    if !in_ar2_region(psi1, psi2) {
        return Err(Error::OutOfRegion {
            params: vec![psi1, psi2],
        });
    }
    let denom = 1.0 - (psi1 * psi1 + psi2) * (1.0 + psi2) + psi2 * psi2 * psi2;
    Ok(0.5 * ((1.0 - psi2) / denom).ln())
}

/// Marginal variance of an AR(2) (or lower order) model from its closed formula.
pub fn gamma0_ar2(m: &ArModel) -> Result<f64> {
    let (psi1, psi2) = match *m.psi() {
        [] => (0.0, 0.0),
        [p1] => (p1, 0.0),
        [p1, p2] => (p1, p2),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "gamma0_ar2 needs order <= 2, got {}",
                m.order()
            )))
        }
    };
    if !in_ar2_region(psi1, psi2) {
        return Err(Error::OutOfRegion {
            params: vec![psi1, psi2],
        });
    }
    let (p1s, p2s) = (psi1 * psi1, psi2 * psi2);
    Ok(m.sigma2() * (1.0 - psi2) / (1.0 - p1s - p1s * psi2 - psi2 - p2s + p2s * psi2))
}

/// `rho = H(X_t) - h = 1/2 log(gamma_0 / sigma2)` with `gamma_0` from
/// the Yule-Walker equations.
pub fn mir_ar_general(m: &ArModel) -> Result<f64> {
    let gamma0 = m.autocovariance(0)?.gamma0();
    Ok(0.5 * (gamma0 / m.sigma2()).ln())
}

pub fn mir_ma(m: &MaModel) -> f64 {
    half_log_one_plus_sum_sq(&m.b()[1..])
}

/// Fails with [`Error::DivergentPIR`] when a zero reaches within
/// [`DIVERGENCE_MARGIN`] of the unit circle.
pub fn pir_ma(m: &MaModel) -> Result<f64> {
    match *m.b() {
        [_] => Ok(0.0),
        [_, b1] => {
            if b1.abs() > 1.0 - DIVERGENCE_MARGIN {
                return Err(Error::DivergentPIR { modulus: b1.abs() });
            }
            Ok(-0.5 * (-b1 * b1).ln_1p())
        }
        _ => {
            let modulus = m.zeros()?.max_modulus();
            if modulus > 1.0 - DIVERGENCE_MARGIN {
                return Err(Error::DivergentPIR { modulus });
            }
            mir_ar_general(&dual_ar(m)?)
        }
    }
}

/// AR model with the inverse spectrum of `m`: denominator `B(z)`, variance `1/sigma2`.
pub fn dual_ar(m: &MaModel) -> Result<ArModel> {
    ArModel::new(m.b()[1..].iter().map(|b| -b).collect(), 1.0 / m.sigma2())
}

/// MA model with the inverse spectrum of `m`: numerator `A(z)`, variance `1/sigma2`.
pub fn dual_ma(m: &ArModel) -> Result<MaModel> {
    MaModel::new(m.denominator(), 1.0 / m.sigma2())
}

/// Closed-form rates for either model family, in nats.
pub fn info_rates(p: &Process) -> Result<InfoRates> {
    match p {
        Process::Ar(m) => Ok(InfoRates::from_nats(
            entropy_rate(m.sigma2()),
            mir_ar_general(m)?,
            pir_ar(m),
        )),
        Process::Ma(m) => Ok(InfoRates::from_nats(
            entropy_rate(m.sigma2()),
            mir_ma(m),
            pir_ma(m)?,
        )),
    }
}
