//! Parameter sweeps, the random-pole scatter and the multi-path reports
//! behind the `infodyn` CLI.
//!
//! Sweeps are normalised to unit marginal variance, so `H(X_0) = 1/2 log 2 pi e`
//! and `rho + b + r` is constant across a sweep. All values are held in nats
//! and converted at render time.
//!
//! CSV output: `#`-prefixed `key=value` metadata lines, one header line,
//! comma-separated rows with 17 significant digits and `inf` for divergent
//! values.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::closed_form::{self, half_log_one_plus_sum_sq};
use crate::error::{Error, Result};
use crate::models::{ArModel, PoleSet, Process};
use crate::oracle::{self, ConvergenceReport};
use crate::par::{self, Execution};
use crate::rates::{InfoRates, Units, LN_2PI_E};
use crate::spectral::{spectral_estimate, SpectralEstimate, SpectralWarning, SpectrumGrid};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Distance kept from the stability / minimum-phase boundary by the AR(1),
/// MA(1) and random-pole sweeps.
pub const SWEEP_MARGIN: f64 = 1e-3;

/// AR(2) accessible-region envelope: 200 bins over `rho` in `[0, 6]` bits.
pub const ENVELOPE_BINS: usize = 200;
pub const ENVELOPE_RHO_MAX_BITS: f64 = 6.0;

/// Pole modulus of the clustered-pole probe in the scatter metadata.
pub const PROBE_POLE: f64 = 1.0 - 1e-6;

const HALF_LN_2PI_E: f64 = 0.5 * LN_2PI_E;

/// `key=value` lines written ahead of every CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Self {
            entries: vec![
                ("command".into(), command.into()),
                ("version".into(), VERSION.into()),
            ],
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    /// Collects the leading `# key=value` lines of a CSV document.
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map_while(|l| l.strip_prefix("# "))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { entries }
    }
}

/// 17 significant digits, or `inf` / `-inf` / `nan`.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Ok,
    /// `b` (and with it `r`) diverges.
    DivergentPir,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Ok => "ok",
            Flag::DivergentPir => "divergent_b",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Flag::Ok),
            "divergent_b" => Some(Flag::DivergentPir),
            _ => None,
        }
    }
}

/// One sweep cell: its parameters and the resulting rates (in nats).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRecord {
    pub params: Vec<f64>,
    pub rates: InfoRates,
    pub flag: Flag,
}

impl MeasureRecord {
    /// Header for records with the given parameter columns.
    pub fn header(param_names: &[&str]) -> String {
        let mut cols: Vec<&str> = param_names.to_vec();
        cols.extend(["h", "rho", "b", "r", "flag"]);
        cols.join(",")
    }

    pub fn to_row(&self, units: Units) -> String {
        let rates = self.rates.to_units(units);
        let mut cols: Vec<String> = self.params.iter().map(|&p| format_value(p)).collect();
        cols.extend([rates.h, rates.rho, rates.b, rates.r].map(format_value));
        cols.push(self.flag.as_str().into());
        cols.join(",")
    }

    /// Inverse of [`MeasureRecord::to_row`]; the rates come back in `units`.
    pub fn parse_row(line: &str, param_count: usize, units: Units) -> Result<Self> {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != param_count + 5 {
            return Err(Error::InvalidArgument(format!(
                "expected {} columns, got {} in {line:?}",
                param_count + 5,
                cols.len()
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
        };
        let params = cols[..param_count].iter().map(|s| num(s)).collect::<Result<_>>()?;
        let v = cols[param_count..param_count + 4]
            .iter()
            .map(|s| num(s))
            .collect::<Result<Vec<f64>>>()?;
        let flag = Flag::parse(cols[param_count + 4])
            .ok_or_else(|| Error::InvalidArgument(format!("unknown flag in {line:?}")))?;
        Ok(Self {
            params,
            rates: InfoRates {
                h: v[0],
                rho: v[1],
                b: v[2],
                r: v[3],
                units,
            },
            flag,
        })
    }
}

pub fn write_records<W: Write>(
    w: &mut W,
    meta: &Metadata,
    param_names: &[&str],
    records: &[MeasureRecord],
    units: Units,
) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "{}", MeasureRecord::header(param_names))?;
    for r in records {
        writeln!(w, "{}", r.to_row(units))?;
    }
    Ok(())
}

/// `count` points evenly spaced over `[-(1 - margin), 1 - margin]`; the
/// middle point of an odd count is exactly zero and the ends are exact.
pub fn symmetric_grid(count: usize, margin: f64) -> Vec<f64> {
    let reach = 1.0 - margin;
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| (2.0 * i as f64 - last) * reach / last)
                .collect()
        }
    }
}

/// Unit-variance rates given `rho` and `b`: `h = 1/2 log 2 pi e - rho`.
fn unit_variance_rates(rho: f64, b: f64) -> InfoRates {
    InfoRates::from_nats(HALF_LN_2PI_E - rho, rho, b)
}

/// AR(1) family `psi_1` in `(-1, 1)`: `rho = -1/2 log(1 - psi^2)`, `b = 1/2 log(1 + psi^2)`.
pub fn sweep_ar1(count: usize) -> Result<Vec<MeasureRecord>> {
    symmetric_grid(count, SWEEP_MARGIN)
        .into_iter()
        .map(|psi| {
            let rho = closed_form::mir_ar1(psi)?;
            Ok(MeasureRecord {
                params: vec![psi],
                rates: unit_variance_rates(rho, half_log_one_plus_sum_sq(&[psi])),
                flag: Flag::Ok,
            })
        })
        .collect()
}

/// MA(1) family `b_1` in `(-1, 1)`, the dual of [`sweep_ar1`].
pub fn sweep_ma1(count: usize) -> Result<Vec<MeasureRecord>> {
    symmetric_grid(count, SWEEP_MARGIN)
        .into_iter()
        .map(|b1| {
            let m = crate::models::MaModel::new(vec![1.0, b1], 1.0)?;
            let rho = closed_form::mir_ma(&m);
            let (b, flag) = match closed_form::pir_ma(&m) {
                Ok(b) => (b, Flag::Ok),
                Err(Error::DivergentPIR { .. }) => (f64::INFINITY, Flag::DivergentPir),
                Err(e) => return Err(e),
            };
            Ok(MeasureRecord {
                params: vec![b1],
                rates: unit_variance_rates(rho, b),
                flag,
            })
        })
        .collect()
}

/// Per-bin range of `b` for AR(2) models whose `rho` falls in the bin.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBin {
    pub rho_lo_bits: f64,
    pub rho_hi_bits: f64,
    pub count: usize,
    pub b_min_bits: f64,
    pub b_max_bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ar2Sweep {
    pub records: Vec<MeasureRecord>,
    pub envelope: Vec<EnvelopeBin>,
    /// Grid nodes rejected by the root test.
    pub rejected: usize,
}

impl Ar2Sweep {
    pub fn max_b_bits(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.rates.b * Units::Bits.per_nat())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lower edge of the envelope in the highest populated bin.
    pub fn lower_edge_at_top_bits(&self) -> Option<f64> {
        self.envelope
            .iter()
            .rev()
            .find(|b| b.count > 0)
            .map(|b| b.b_min_bits)
    }

    pub fn write_envelope<W: Write>(&self, w: &mut W, meta: &Metadata) -> io::Result<()> {
        meta.write(w)?;
        writeln!(w, "rho_lo,rho_hi,count,b_min,b_max")?;
        for b in &self.envelope {
            writeln!(
                w,
                "{},{},{},{},{}",
                format_value(b.rho_lo_bits),
                format_value(b.rho_hi_bits),
                b.count,
                format_value(b.b_min_bits),
                format_value(b.b_max_bits)
            )?;
        }
        Ok(())
    }
}

/// Cosine nodes `cos(pi (i + 1/2) / n)`, dense toward `+-1`.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// AR(2) stability region sampled on a `density x density` grid of
/// reflection coefficients `(k1, k2)` in `(-1, 1)^2`, mapped by
/// `psi_1 = k1 (1 - k2)`, `psi_2 = k2` onto the interior of the region.
/// Cosine spacing resolves the boundary where `rho` diverges. Every node is
/// re-checked with the root test.
pub fn sweep_ar2(density: usize, exec: Execution) -> Result<Ar2Sweep> {
    let nodes = chebyshev_nodes(density);
    let cells = par::try_map_indexed(exec, density * density, |idx| {
        let (k1, k2) = (nodes[idx / density], nodes[idx % density]);
        let (psi1, psi2) = (k1 * (1.0 - k2), k2);
        match ArModel::new(vec![psi1, psi2], 1.0) {
            Err(Error::Unstable { .. }) => return Ok(None),
            Err(e) => return Err(e),
            Ok(_) => {}
        }
        let rho = closed_form::mir_ar2(psi1, psi2)?;
        Ok(Some(MeasureRecord {
            params: vec![psi1, psi2],
            rates: unit_variance_rates(rho, half_log_one_plus_sum_sq(&[psi1, psi2])),
            flag: Flag::Ok,
        }))
    })?;
    let rejected = cells.iter().filter(|c| c.is_none()).count();
    let records: Vec<MeasureRecord> = cells.into_iter().flatten().collect();
    let envelope = envelope(&records);
    Ok(Ar2Sweep {
        records,
        envelope,
        rejected,
    })
}

fn envelope(records: &[MeasureRecord]) -> Vec<EnvelopeBin> {
    let width = ENVELOPE_RHO_MAX_BITS / ENVELOPE_BINS as f64;
    let mut bins: Vec<EnvelopeBin> = (0..ENVELOPE_BINS)
        .map(|i| EnvelopeBin {
            rho_lo_bits: i as f64 * width,
            rho_hi_bits: (i + 1) as f64 * width,
            count: 0,
            b_min_bits: f64::INFINITY,
            b_max_bits: f64::NEG_INFINITY,
        })
        .collect();
    let per_nat = Units::Bits.per_nat();
    for r in records {
        let (rho, b) = (r.rates.rho * per_nat, r.rates.b * per_nat);
        if !(0.0..ENVELOPE_RHO_MAX_BITS).contains(&rho) {
            continue;
        }
        let bin = &mut bins[((rho / width) as usize).min(ENVELOPE_BINS - 1)];
        bin.count += 1;
        bin.b_min_bits = bin.b_min_bits.min(b);
        bin.b_max_bits = bin.b_max_bits.max(b);
    }
    bins
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleScatter {
    pub order: usize,
    /// Per sample: `params = [max pole modulus]`.
    pub records: Vec<MeasureRecord>,
    /// PIR of the model with every pole at [`PROBE_POLE`], in nats.
    pub probe_b: f64,
}

/// Random stable AR(`order`) models from conjugate-closed pole sets.
///
/// Sample `i` draws from ChaCha8 stream `i` under `seed`, so the output is
/// independent of scheduling.
pub fn scatter_poles(
    order: usize,
    count: usize,
    radial_bias: f64,
    seed: u64,
    exec: Execution,
) -> Result<PoleScatter> {
    let records = par::try_map_indexed(exec, count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let poles = PoleSet::sample(order, radial_bias, 1.0 - SWEEP_MARGIN, &mut rng)?;
        let max_modulus = poles.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let m = ArModel::from_poles(&poles, 1.0)?;
        let rho = closed_form::mir_ar_general(&m)?;
        Ok(MeasureRecord {
            params: vec![max_modulus],
            rates: unit_variance_rates(rho, closed_form::pir_ar(&m)),
            flag: Flag::Ok,
        })
    })?;
    let probe = ArModel::from_poles(&PoleSet::repeated(PROBE_POLE, order)?, 1.0)?;
    Ok(PoleScatter {
        order,
        records,
        probe_b: closed_form::pir_ar(&probe),
    })
}

fn rates_json(map: &mut Map<String, Value>, prefix: &str, rates: &InfoRates) {
    for (key, v) in [("h", rates.h), ("rho", rates.rho), ("b", rates.b), ("r", rates.r)] {
        map.insert(format!("{prefix}{key}"), number_or_string(v));
    }
}

fn number_or_string(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format_value(v)))
}

/// All four measures from the three routes, in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuresReport {
    pub closed: InfoRates,
    pub closed_flag: Flag,
    pub spectral: SpectralEstimate,
    pub oracle: InfoRates,
    /// AR only: the Markov-block PIR, exact at finite size.
    pub oracle_markov_b: Option<f64>,
    pub grid_n: usize,
    pub ell: usize,
}

impl MeasuresReport {
    pub fn spectral_gap(&self) -> f64 {
        max_gap(&self.closed, &self.spectral.rates)
    }

    pub fn oracle_gap(&self) -> f64 {
        max_gap(&self.closed, &self.oracle)
    }

    /// Flat JSON: closed-form values under `h, rho, b, r`, the other routes
    /// under `spectral_*` / `oracle_*`, and their distances from the closed
    /// form under `*_gap`.
    pub fn to_json(&self, units: Units) -> Value {
        let scale = units.per_nat();
        let closed = self.closed.to_units(units);
        let spectral = self.spectral.rates.to_units(units);
        let oracle = self.oracle.to_units(units);
        let mut map = Map::new();
        map.insert("units".into(), Value::String(units.to_string()));
        map.insert("grid_n".into(), self.grid_n.into());
        map.insert("ell".into(), self.ell.into());
        map.insert("flag".into(), Value::String(self.closed_flag.as_str().into()));
        rates_json(&mut map, "", &closed);
        rates_json(&mut map, "spectral_", &spectral);
        rates_json(&mut map, "oracle_", &oracle);
        for (key, c, s, o) in [
            ("h", closed.h, spectral.h, oracle.h),
            ("rho", closed.rho, spectral.rho, oracle.rho),
            ("b", closed.b, spectral.b, oracle.b),
            ("r", closed.r, spectral.r, oracle.r),
        ] {
            map.insert(format!("spectral_{key}_gap"), number_or_string((c - s).abs()));
            map.insert(format!("oracle_{key}_gap"), number_or_string((c - o).abs()));
        }
        if let Some(b) = self.oracle_markov_b {
            map.insert("oracle_markov_b".into(), number_or_string(b * scale));
            map.insert("oracle_markov_b_gap".into(), number_or_string((b - self.closed.b).abs() * scale));
        }
        map.insert("quadrature_halving_gap".into(), number_or_string(self.spectral.halving_gap * scale));
        let warnings: Vec<Value> = self
            .spectral
            .warnings
            .iter()
            .map(|w| Value::String(match w {
                SpectralWarning::QuadratureUnconverged { gap } => format!("quadrature_unconverged:{gap:e}"),
                SpectralWarning::DivergentMeasure { min_over_max } => format!("divergent_measure:{min_over_max:e}"),
            }))
            .collect();
        map.insert("warnings".into(), Value::Array(warnings));
        Value::Object(map)
    }
}

fn max_gap(a: &InfoRates, b: &InfoRates) -> f64 {
    [(a.h, b.h), (a.rho, b.rho), (a.b, b.b), (a.r, b.r)]
        .iter()
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Finite-segment estimate of all four rates: `h` from one-sided and `r` from
/// two-sided conditioning on `ell` neighbours.
pub fn oracle_rates(p: &Process, ell: usize) -> Result<InfoRates> {
    let acov = p.autocovariance(2 * ell)?;
    let h = oracle::cond_entropy_next(&acov, ell)?;
    let r = oracle::cond_entropy_center(&acov, ell)?;
    let marginal = 0.5 * (LN_2PI_E + acov.gamma0().ln());
    Ok(InfoRates {
        h,
        rho: marginal - h,
        b: h - r,
        r,
        units: Units::Nats,
    })
}

pub fn measures(p: &Process, grid_n: usize, ell: usize) -> Result<MeasuresReport> {
    let (closed, closed_flag) = match closed_form::info_rates(p) {
        Ok(r) => (r, Flag::Ok),
        Err(Error::DivergentPIR { .. }) => {
            let h = closed_form::entropy_rate(p.sigma2());
            let rho = match p {
                Process::Ma(m) => closed_form::mir_ma(m),
                Process::Ar(m) => closed_form::mir_ar_general(m)?,
            };
            (InfoRates::from_nats(h, rho, f64::INFINITY), Flag::DivergentPir)
        }
        Err(e) => return Err(e),
    };
    let spectral = spectral_estimate(&SpectrumGrid::from_process(p, grid_n)?);
    let oracle = oracle_rates(p, ell)?;
    let oracle_markov_b = match p {
        Process::Ar(m) => Some(oracle::pir_markov_block(m)?),
        Process::Ma(_) => None,
    };
    Ok(MeasuresReport {
        closed,
        closed_flag,
        spectral,
        oracle,
        oracle_markov_b,
        grid_n,
        ell,
    })
}

/// PIR/MIR exchange under spectrum inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub pir: f64,
    pub mir_of_inverse: f64,
    pub mir: f64,
    pub pir_of_inverse: f64,
}

impl DualityReport {
    pub fn pir_gap(&self) -> f64 {
        (self.pir - self.mir_of_inverse).abs()
    }

    pub fn mir_gap(&self) -> f64 {
        (self.mir - self.pir_of_inverse).abs()
    }

    pub fn to_json(&self, units: Units, grid_n: usize) -> Value {
        let s = units.per_nat();
        let mut map = Map::new();
        map.insert("units".into(), Value::String(units.to_string()));
        map.insert("grid_n".into(), grid_n.into());
        map.insert("b".into(), number_or_string(self.pir * s));
        map.insert("rho".into(), number_or_string(self.mir * s));
        map.insert("inverse_b".into(), number_or_string(self.pir_of_inverse * s));
        map.insert("inverse_rho".into(), number_or_string(self.mir_of_inverse * s));
        map.insert("b_gap".into(), number_or_string(self.pir_gap() * s));
        map.insert("rho_gap".into(), number_or_string(self.mir_gap() * s));
        Value::Object(map)
    }
}

pub fn duality(s: &SpectrumGrid) -> DualityReport {
    let direct = s.means();
    let inverse = s.inverted().means();
    DualityReport {
        pir: direct.predictive_information_rate(),
        mir_of_inverse: inverse.multi_information_rate(),
        mir: direct.multi_information_rate(),
        pir_of_inverse: inverse.predictive_information_rate(),
    }
}

/// Named convergence reports from the oracle study.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleStudy {
    pub reports: Vec<(&'static str, ConvergenceReport)>,
}

impl OracleStudy {
    pub fn get(&self, name: &str) -> Option<&ConvergenceReport> {
        self.reports.iter().find(|(n, _)| *n == name).map(|(_, r)| r)
    }

    /// `measure,ell,value,target,gap` rows. Entropies are converted to `units`;
    /// the eigenvalue statistic (`szego_harmonic`) is in inverse variance units.
    pub fn write_csv<W: Write>(&self, w: &mut W, meta: &Metadata, units: Units) -> io::Result<()> {
        meta.write(w)?;
        writeln!(w, "measure,ell,value,target,gap")?;
        for (name, report) in &self.reports {
            let scale = if *name == "szego_harmonic" { 1.0 } else { units.per_nat() };
            let scaled = ConvergenceReport {
                lengths: report.lengths.clone(),
                values: report.values.iter().map(|v| v * scale).collect(),
                target: report.target * scale,
                final_gap: report.final_gap * scale,
            };
            scaled.write_rows(w, Some(name))?;
        }
        Ok(())
    }
}

/// Conditional entropies (one-sided, two-sided) and the eigenvalue statistic
/// over a truncation schedule, each against its spectral limit.
pub fn oracle_study(p: &Process, ells: &[usize], grid_n: usize, exec: Execution) -> Result<OracleStudy> {
    let max = *ells
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("empty truncation schedule".into()))?;
    let grid = SpectrumGrid::from_process(p, grid_n)?;
    let means = grid.means();
    let acov = p.autocovariance(2 * max)?;
    let reports = vec![
        ("cond_entropy_next", oracle::next_convergence(&acov, ells, means.entropy_rate())?),
        ("cond_entropy_center", oracle::center_convergence(&acov, ells, means.erasure_entropy_rate(), exec)?),
        ("szego_harmonic", oracle::szego_harmonic_check(&acov, ells, &grid, exec)?),
    ];
    Ok(OracleStudy { reports })
}
