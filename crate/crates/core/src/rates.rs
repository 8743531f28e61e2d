use serde::{Deserialize, Serialize};

/// `ln(2 pi e)`, the constant in every Gaussian differential entropy.
pub const LN_2PI_E: f64 = 2.837_877_066_409_345_3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Multiplier taking a value in nats to these units.
    pub fn per_nat(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => std::f64::consts::LOG2_E,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(format!("unknown units {other:?}, expected nats or bits")),
        }
    }
}

impl std::fmt::Display for Units {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four per-sample information measures of a stationary process.
///
/// `h` is the entropy rate, `rho` the multi-information rate, `b` the
/// predictive information rate and `r` the erasure (residual) entropy rate.
/// They partition the marginal entropy as `H(X_0) = rho + b + r` with `h = b + r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoRates {
    pub h: f64,
    pub rho: f64,
    pub b: f64,
    pub r: f64,
    pub units: Units,
}

impl InfoRates {
    /// Rates in nats with `r` derived as `h - b`.
    pub fn from_nats(h: f64, rho: f64, b: f64) -> Self {
        Self {
            h,
            rho,
            b,
            r: h - b,
            units: Units::Nats,
        }
    }

    pub fn to_units(self, units: Units) -> Self {
        let scale = units.per_nat() / self.units.per_nat();
        Self {
            h: self.h * scale,
            rho: self.rho * scale,
            b: self.b * scale,
            r: self.r * scale,
            units,
        }
    }

    /// `H(X_0) = rho + h`.
    pub fn marginal_entropy(&self) -> f64 {
        self.rho + self.h
    }

    /// Largest violation of `h = b + r`, `rho >= 0`, `b >= 0`.
    pub fn invariant_violation(&self) -> f64 {
        let partition = (self.h - (self.b + self.r)).abs();
        partition.max(-self.rho).max(-self.b).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matches_definition() {
        let direct = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((LN_2PI_E - direct).abs() < 1e-15);
    }

    #[test]
    fn unit_conversion() {
        let r = InfoRates::from_nats(1.0, 2f64.ln(), 0.5, );
        let bits = r.to_units(Units::Bits);
        assert!((bits.rho - 1.0).abs() < 1e-15);
        let back = bits.to_units(Units::Nats);
        assert!((back.h - 1.0).abs() < 1e-15);
        assert_eq!(back.units, Units::Nats);
        assert_eq!(r.invariant_violation(), 0.0);
        assert_eq!("bits".parse::<Units>(), Ok(Units::Bits));
        assert!("bytes".parse::<Units>().is_err());
    }
}
