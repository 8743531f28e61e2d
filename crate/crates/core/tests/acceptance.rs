//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

use std::process::ExitCode;

use infodyn::closed_form;
use infodyn::experiments::{self, oracle_rates};
use infodyn::oracle;
use infodyn::spectral::{self, DEFAULT_GRID_N};
use infodyn::{ArModel, Execution, InfoRates, MaModel, PoleSet, Process, SpectrumGrid, Units};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BATTERY_SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn battery() -> Vec<ArModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    (0..100)
        .map(|i| {
            let order = 1 + i % 6;
            let poles = PoleSet::sample(order, 1.0, 0.9, &mut rng).unwrap();
            let sigma2 = rng.random_range(0.25..4.0);
            ArModel::from_poles(&poles, sigma2).unwrap()
        })
        .collect()
}

fn three_path_agreement() -> Outcome {
    let (mut spec_gap, mut markov_gap) = (0.0f64, 0.0f64);
    for m in battery() {
        let closed = closed_form::pir_ar(&m);
        let s = SpectrumGrid::from_ar(&m, DEFAULT_GRID_N).unwrap();
        spec_gap = spec_gap.max((spectral::pir_spectral(&s) - closed).abs());
        markov_gap = markov_gap.max((oracle::pir_markov_block(&m).unwrap() - closed).abs());
    }
    check(
        spec_gap <= 1e-8 && markov_gap <= 1e-10,
        format!("max |spectral - closed| = {spec_gap:.3e} (<= 1e-8), max |markov - closed| = {markov_gap:.3e} (<= 1e-10)"),
    )
}

fn ar1_endpoints() -> Outcome {
    let rows = experiments::sweep_ar1(1999).unwrap();
    let at = |psi: f64| rows.iter().find(|r| r.params[0] == psi).unwrap().rates.to_units(Units::Bits);
    let (zero, edge) = (at(0.0), at(0.999));
    let pass = zero.b == 0.0 && (edge.b - 0.5).abs() <= 2e-3 && edge.rho > 4.0;
    check(
        pass,
        format!("b(0) = {}, b(0.999) = {:.6} bits (0.5 +- 2e-3), rho(0.999) = {:.4} bits (> 4)", zero.b, edge.b, edge.rho),
    )
}

fn ar2_extremes() -> Outcome {
    let sweep = experiments::sweep_ar2(400, Execution::default()).unwrap();
    let max_b = sweep.max_b_bits();
    let edge = sweep.lower_edge_at_top_bits().unwrap_or(f64::NAN);
    let pass = (max_b - 1.2925).abs() <= 0.01 && (edge - 0.2925).abs() <= 0.05;
    check(
        pass,
        format!("max b = {max_b:.5} bits (1.2925 +- 0.01), lower edge at rho = 6 bits: {edge:.5} (0.2925 +- 0.05)"),
    )
}

fn ar8_binomial_limit() -> Outcome {
    let m = ArModel::from_poles(&PoleSet::repeated(1.0 - 1e-9, 8).unwrap(), 1.0).unwrap();
    let sum = 1.0 + m.psi().iter().map(|p| p * p).sum::<f64>();
    let rel = (sum - 12870.0).abs() / 12870.0;
    let b = closed_form::pir_ar(&m) * Units::Bits.per_nat();
    check(
        rel <= 1e-6 && (b - 6.8261).abs() <= 1e-3,
        format!("1 + sum psi^2 = {sum:.6} (rel err {rel:.2e} <= 1e-6), b = {b:.5} bits (6.8261 +- 1e-3)"),
    )
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED + 5);
    let mut gap = 0.0f64;
    for _ in 0..50 {
        let poles = PoleSet::sample(3, 1.0, 0.9, &mut rng).unwrap();
        let s = SpectrumGrid::from_ar(&ArModel::from_poles(&poles, rng.random_range(0.25..4.0)).unwrap(), DEFAULT_GRID_N).unwrap();
        gap = gap.max((spectral::pir_spectral(&s) - spectral::mir_spectral(&s.inverted())).abs());
    }
    let mut identical = 0;
    for _ in 0..50 {
        // sum |c| < 1 keeps the AR stable and the MA minimum phase
        let n = rng.random_range(1..=6);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let total: f64 = raw.iter().map(|c| c.abs()).sum();
        let c: Vec<f64> = raw.iter().map(|x| 0.95 * x / total).collect();
        let mut b = vec![1.0];
        b.extend(&c);
        let ma = MaModel::new(b, 1.0).unwrap();
        let ar = ArModel::new(c, 1.0).unwrap();
        if closed_form::mir_ma(&ma).to_bits() == closed_form::pir_ar(&ar).to_bits() {
            identical += 1;
        }
    }
    check(
        gap <= 1e-10 && identical == 50,
        format!("max |pir(S) - mir(1/S)| = {gap:.3e} (<= 1e-10), mir_ma == pir_ar bitwise in {identical}/50"),
    )
}

fn ma1_results() -> Outcome {
    let mut worst = 0.0f64;
    for b1 in [0.25, 0.5, 0.75] {
        let m = MaModel::new(vec![1.0, b1], 1.0).unwrap();
        let rho = 0.5 * (1.0f64 + b1 * b1).ln();
        let b = -0.5 * (1.0f64 - b1 * b1).ln();
        let s = SpectrumGrid::from_ma(&m, DEFAULT_GRID_N).unwrap();
        worst = worst
            .max((spectral::mir_spectral(&s) - rho).abs())
            .max((spectral::pir_spectral(&s) - b).abs())
            .max((closed_form::mir_ma(&m) - rho).abs())
            .max((closed_form::pir_ma(&m).unwrap() - b).abs());
    }
    check(worst <= 1e-8, format!("max gap over b1 in {{0.25, 0.5, 0.75}} = {worst:.3e} (<= 1e-8)"))
}

fn oracle_convergence() -> Outcome {
    let ar = Process::Ar(ArModel::new(vec![0.5], 0.75).unwrap());
    let ma = Process::Ma(MaModel::new(vec![1.0, 0.5], 1.0).unwrap());
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, p) in [("AR(1)", &ar), ("MA(1)", &ma)] {
        let s = SpectrumGrid::from_process(p, DEFAULT_GRID_N).unwrap();
        let acov = p.autocovariance(1024).unwrap();
        let center = (oracle::cond_entropy_center(&acov, 512).unwrap() - spectral::erasure_rate_spectral(&s)).abs();
        let inv = s.means().mean_inv_s;
        let szego = (oracle::harmonic_eigen_statistic(&acov, 256).unwrap() - inv).abs() / inv;
        pass &= center <= 1e-3 && szego <= 1e-2;
        parts.push(format!("{name}: center gap {center:.2e}, Szego rel gap {szego:.2e}"));
    }
    let target = closed_form::entropy_rate(0.75);
    let ar_acov = ar.autocovariance(64).unwrap();
    let next_ar = (1..=64)
        .map(|l| (oracle::cond_entropy_next(&ar_acov, l).unwrap() - target).abs())
        .fold(0.0f64, f64::max);
    let ma_acov = ma.autocovariance(64).unwrap();
    let next_ma = (oracle::cond_entropy_next(&ma_acov, 64).unwrap() - closed_form::entropy_rate(1.0)).abs();
    pass &= next_ar <= 1e-12 && next_ma <= 1e-6;
    parts.push(format!("AR next gap (ell 1..64) {next_ar:.2e}, MA next gap at 64 {next_ma:.2e}"));
    check(pass, parts.join("; "))
}

fn invariants() -> Outcome {
    let mut processes: Vec<Process> = battery().into_iter().map(Process::Ar).collect();
    for b1 in [-0.9, -0.5, 0.25, 0.5, 0.75, 0.95] {
        processes.push(Process::Ma(MaModel::new(vec![1.0, b1], 2.0).unwrap()));
    }
    processes.push(Process::Ma(MaModel::new(vec![1.0, -0.4, 0.3, 0.2], 0.5).unwrap()));
    let mut rates: Vec<InfoRates> = Vec::new();
    let mut scale_gap = 0.0f64;
    for p in &processes {
        let closed = closed_form::info_rates(p).unwrap();
        let spec = SpectrumGrid::from_process(p, DEFAULT_GRID_N).unwrap().means().rates();
        let scaled = p.with_sigma2(4.0 * p.sigma2()).unwrap();
        let closed4 = closed_form::info_rates(&scaled).unwrap();
        let spec4 = SpectrumGrid::from_process(&scaled, DEFAULT_GRID_N).unwrap().means().rates();
        for (a, b) in [(&closed, &closed4), (&spec, &spec4)] {
            scale_gap = scale_gap.max((a.rho - b.rho).abs()).max((a.b - b.b).abs());
        }
        rates.extend([closed, spec, closed4, spec4]);
    }
    for p in processes.iter().step_by(10) {
        rates.push(oracle_rates(p, 64).unwrap());
    }
    rates.extend(experiments::sweep_ar1(1999).unwrap().into_iter().map(|r| r.rates));
    rates.extend(experiments::sweep_ar2(100, Execution::default()).unwrap().records.into_iter().map(|r| r.rates));
    let partition = rates.iter().map(|r| (r.h - r.b - r.r).abs()).fold(0.0f64, f64::max);
    let min_rho = rates.iter().map(|r| r.rho).fold(f64::INFINITY, f64::min);
    let min_b = rates.iter().map(|r| r.b).fold(f64::INFINITY, f64::min);
    check(
        partition <= 1e-12 && min_rho >= -1e-12 && min_b >= -1e-12 && scale_gap <= 1e-12,
        format!(
            "{} rate sets: max |h - b - r| = {partition:.2e}, min rho = {min_rho:.2e}, min b = {min_b:.2e}, sigma2 x4 gap = {scale_gap:.2e}",
            rates.len()
        ),
    )
}

fn monte_carlo() -> Outcome {
    let p = Process::Ar(ArModel::unit_variance(vec![0.5]).unwrap());
    let report = oracle::mc_cross_check(&p, 1_000_000, 7, 1).unwrap();
    let targets_ok = (report.lags[0].target - 1.0).abs() < 1e-12 && (report.lags[1].target - 0.5).abs() < 1e-12;
    let detail = report
        .lags
        .iter()
        .map(|l| format!("gamma{} = {:.5} (target {}, SE {:.1e})", l.lag, l.estimate, l.target, l.std_error))
        .collect::<Vec<_>>()
        .join(", ");
    check(targets_ok && report.all_within(3.0), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("three-path agreement", three_path_agreement),
        ("AR(1) endpoints", ar1_endpoints),
        ("AR(2) extremes", ar2_extremes),
        ("AR(8) binomial limit", ar8_binomial_limit),
        ("duality", duality),
        ("MA(1) results", ma1_results),
        ("oracle convergence", oracle_convergence),
        ("decomposition and sign invariants", invariants),
        ("Monte Carlo sanity", monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!("{tag} [{}] {name}: {}", i + 1, outcome.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
