use netshare::analytic::{self, critical_schedule, predicted_s};
use netshare::network::{
    full_tensor_check, run_sequence, Scenario, SharingMode, FULL_TENSOR_MAX_M, FULL_TENSOR_MAX_N,
};
use netshare::sos::{certify, SosConfig, SosReport};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::output::{Cell, Report};
use crate::CliError;

/// Largest edge count accepted by `simulate` and `sweep`.
pub const MAX_SIM_N: usize = 64;
/// Largest input count accepted by `simulate` and `sweep`; the observable
/// dimension grows as `2^⌈(m−1)/2⌉` and Bob has `2^(m−1)` settings.
pub const MAX_SIM_M: usize = 10;

/// Functional tolerance for the bisection in `compare`.
pub const BISECTION_TOLERANCE: f64 = 1e-8;
/// `compare` flags quoted values further than this from the closed form.
pub const DISCREPANCY_THRESHOLD: f64 = 0.01;

pub const SOS_GAMMA_FLOOR: f64 = -1e-12;
pub const SOS_BOUND_SLACK: f64 = 1e-10;
pub const SOS_RESIDUAL_CEILING: f64 = 1e-10;

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command()? {
        Command::Simulate => simulate(cfg),
        Command::Critical => critical(cfg),
        Command::Sweep => sweep(cfg),
        Command::MaxObservers => max_observers(cfg),
        Command::SosCheck => sos_check(cfg),
        Command::Compare => compare(cfg),
    }
}

fn check_sim_caps(n: usize, m: usize) -> Result<(), CliError> {
    if n > MAX_SIM_N || m > MAX_SIM_M {
        return Err(CliError::Resource(format!(
            "simulation supports n <= {MAX_SIM_N} and m <= {MAX_SIM_M}, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

fn build_scenario(
    n: usize,
    m: usize,
    mode: SharingMode,
    schedules: &[Vec<f64>],
) -> Result<Scenario, CliError> {
    let scenario = match (mode, schedules) {
        (SharingMode::Symmetric, [single]) => Scenario::symmetric(n, m, single.clone())?,
        (SharingMode::Symmetric, many) => Scenario::new(n, m, mode, many.to_vec())?,
        (SharingMode::Asymmetric, [single]) => Scenario::asymmetric(n, m, single.clone())?,
        (SharingMode::Asymmetric, _) => {
            return Err(CliError::Config("asymmetric sharing takes a single schedule for edge 1".into()))
        }
    };
    Ok(scenario)
}

fn simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, m) = (cfg.n, cfg.m);
    check_sim_caps(n, m)?;
    let mut scenario = if cfg.sharp {
        Scenario::sharp(n, m)?
    } else if cfg.critical {
        let schedule = critical_schedule(n, m, cfg.mode)?;
        if schedule.max_observers == 0 {
            return Err(CliError::Config(format!("no feasible critical position for n = {n}, m = {m}")));
        }
        build_scenario(n, m, cfg.mode, &[schedule.feasible().to_vec()])?
    } else {
        build_scenario(n, m, cfg.mode, cfg.schedules.as_deref().unwrap_or_default())?
    };
    if cfg.final_sharp {
        scenario = scenario.with_final_sharp();
    }
    let reports = run_sequence(&scenario)?;
    let rows = 1usize << (m - 1);
    let mut header = vec!["k".to_string()];
    header.extend((1..=rows).map(|i| format!("j_{i}")));
    header.extend(["s_value", "bound", "violated"].map(String::from));
    let mut out = Report::new(header);
    for r in reports {
        let mut row: Vec<Cell> = vec![r.k.into()];
        row.extend(r.j_values.iter().map(|&j| Cell::Float(j)));
        row.extend([r.s_value.into(), r.bound.into(), r.violated.into()]);
        out.push(row);
    }
    Ok(out)
}

fn critical(cfg: &RunConfig) -> Result<Report, CliError> {
    let ns = cfg.sweep_n.clone().unwrap_or_else(|| vec![cfg.n]);
    let schedules =
        ns.par_iter().map(|&n| critical_schedule(n, cfg.m, cfg.mode)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Report::new(["n", "m", "mode", "k", "lambda_critical", "feasible"]);
    for s in schedules {
        for (i, &lambda) in s.criticals.iter().enumerate() {
            out.push(vec![
                s.n.into(),
                s.m.into(),
                Cell::text(s.mode.to_string()),
                (i + 1).into(),
                lambda.into(),
                (lambda <= 1.0).into(),
            ]);
        }
    }
    Ok(out)
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, m) = (cfg.n, cfg.m);
    check_sim_caps(n, m)?;
    let lambdas = linspace(cfg.lambda_min, cfg.lambda_max, cfg.steps);
    let blocks = lambdas
        .par_iter()
        .map(|&lambda| {
            let scenario = build_scenario(n, m, cfg.mode, &[vec![lambda; cfg.positions]])?;
            run_sequence(&scenario)?
                .into_iter()
                .map(|r| {
                    let predicted = predicted_s(&scenario, r.k)?;
                    Ok(vec![
                        lambda.into(),
                        r.k.into(),
                        r.s_value.into(),
                        predicted.into(),
                        r.bound.into(),
                        r.violated.into(),
                    ])
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = Report::new(["lambda", "k", "s_value", "predicted_s", "bound", "violated"]);
    for row in blocks.into_iter().flatten() {
        out.push(row);
    }
    Ok(out)
}

fn max_observers(cfg: &RunConfig) -> Result<Report, CliError> {
    let ns = cfg.n_values.clone().unwrap_or_else(|| vec![cfg.n]);
    let ms = cfg.m_values.clone().unwrap_or_else(|| vec![cfg.m]);
    let pairs: Vec<(usize, usize)> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (n, m))).collect();
    let counts = pairs
        .par_iter()
        .map(|&(n, m)| analytic::max_observers(n, m, cfg.mode))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Report::new(["n", "m", "mode", "max_observers"]);
    for (&(n, m), count) in pairs.iter().zip(counts) {
        out.push(vec![n.into(), m.into(), Cell::text(cfg.mode.to_string()), count.into()]);
    }
    Ok(out)
}

struct SosOutcome {
    seed: Option<u64>,
    result: Result<SosReport, netshare::Error>,
}

fn sos_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let outcomes: Vec<SosOutcome> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|i| {
            if cfg.optimal {
                SosOutcome { seed: None, result: certify(&SosConfig::optimal()) }
            } else {
                let seed = cfg.seed.wrapping_add(i);
                let config = SosConfig::random(&mut ChaCha8Rng::seed_from_u64(seed));
                SosOutcome { seed: Some(seed), result: certify(&config) }
            }
        })
        .collect();

    let mut failures = Vec::new();
    let mut stats = SosStats::default();
    for o in &outcomes {
        let label = o.seed.map_or("optimal configuration".to_string(), |s| format!("seed {s}"));
        match &o.result {
            Ok(r) => {
                stats.absorb(r);
                let mut broken = Vec::new();
                if r.gamma < SOS_GAMMA_FLOOR {
                    broken.push(format!("gamma = {:e}", r.gamma));
                }
                if r.identity_residual >= SOS_RESIDUAL_CEILING {
                    broken.push(format!("identity residual = {:e}", r.identity_residual));
                }
                if r.bound_excess() > SOS_BOUND_SLACK {
                    broken.push(format!("sqrt(w1)+sqrt(w2) exceeds 2*sqrt(2) by {:e}", r.bound_excess()));
                }
                if r.s2 > r.sqrt_omega_sum + SOS_BOUND_SLACK {
                    broken.push(format!("S2 = {} above sqrt(w1)+sqrt(w2) = {}", r.s2, r.sqrt_omega_sum));
                }
                if cfg.optimal && r.gamma.abs() >= SOS_RESIDUAL_CEILING {
                    broken.push(format!("optimal gamma = {:e}", r.gamma));
                }
                if !broken.is_empty() {
                    failures.push(format!("{label}: {}", broken.join("; ")));
                }
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }

    let status = |ok: bool| Cell::text(if ok { "PASS" } else { "FAIL" });
    let mut out = Report::new(["metric", "value", "threshold", "status"]);
    out.push(vec![Cell::text("configs"), cfg.count.into(), Cell::Empty, Cell::Empty]);
    out.push(vec![
        Cell::text("min_gamma"),
        stats.min_gamma.into(),
        Cell::text(">= -1e-12"),
        status(stats.min_gamma >= SOS_GAMMA_FLOOR),
    ]);
    out.push(vec![Cell::text("max_gamma"), stats.max_gamma.into(), Cell::Empty, Cell::Empty]);
    out.push(vec![
        Cell::text("max_identity_residual"),
        stats.max_residual.into(),
        Cell::text("< 1e-10"),
        status(stats.max_residual < SOS_RESIDUAL_CEILING),
    ]);
    out.push(vec![
        Cell::text("max_bound_excess"),
        stats.max_bound_excess.into(),
        Cell::text("<= 1e-10"),
        status(stats.max_bound_excess <= SOS_BOUND_SLACK),
    ]);
    out.push(vec![
        Cell::text("max_s2_minus_sqrt_omega_sum"),
        stats.max_certificate_gap.into(),
        Cell::text("<= 1e-10"),
        status(stats.max_certificate_gap <= SOS_BOUND_SLACK),
    ]);
    out.push(vec![Cell::text("max_s2"), stats.max_s2.into(), Cell::Empty, Cell::Empty]);
    out.push(vec![
        Cell::text("failures"),
        failures.len().into(),
        Cell::text("0"),
        status(failures.is_empty()),
    ]);
    out.failures = failures;
    Ok(out)
}

struct SosStats {
    min_gamma: f64,
    max_gamma: f64,
    max_residual: f64,
    max_bound_excess: f64,
    max_certificate_gap: f64,
    max_s2: f64,
}

impl Default for SosStats {
    fn default() -> Self {
        Self {
            min_gamma: f64::INFINITY,
            max_gamma: f64::NEG_INFINITY,
            max_residual: 0.0,
            max_bound_excess: f64::NEG_INFINITY,
            max_certificate_gap: f64::NEG_INFINITY,
            max_s2: f64::NEG_INFINITY,
        }
    }
}

impl SosStats {
    fn absorb(&mut self, r: &SosReport) {
        self.min_gamma = self.min_gamma.min(r.gamma);
        self.max_gamma = self.max_gamma.max(r.gamma);
        self.max_residual = self.max_residual.max(r.identity_residual);
        self.max_bound_excess = self.max_bound_excess.max(r.bound_excess());
        self.max_certificate_gap = self.max_certificate_gap.max(r.s2 - r.sqrt_omega_sum);
        self.max_s2 = self.max_s2.max(r.s2);
    }
}

/// Literature values for the critical unsharpness per position, rounded as
/// published.
#[allow(clippy::approx_constant)]
pub fn quoted_criticals(n: usize, m: usize, mode: SharingMode) -> &'static [f64] {
    match (n, m, mode) {
        (2, 2, SharingMode::Asymmetric) => &[0.50, 0.53, 0.58, 0.64, 0.72, 0.85, 1.13],
        (2, 2, SharingMode::Symmetric) | (3, 2, SharingMode::Symmetric) => &[0.7071, 0.8284, 1.0619],
        (2, 3, SharingMode::Asymmetric) => &[0.65, 0.77, 1.02],
        (2, 3, SharingMode::Symmetric) => &[0.96, 1.94],
        _ => &[],
    }
}

/// Unsharpness at position `prefix.len() + 1` at which the full tensor
/// simulation meets the classical bound, or `None` if even a sharp
/// measurement stays below it.
pub fn simulated_boundary(
    n: usize,
    m: usize,
    mode: SharingMode,
    prefix: &[f64],
) -> Result<Option<f64>, CliError> {
    let s_at = |lambda: f64| -> Result<(f64, f64), CliError> {
        let mut schedule = prefix.to_vec();
        schedule.push(lambda);
        let scenario = build_scenario(n, m, mode, &[schedule])?;
        let last = full_tensor_check(&scenario)?.pop().expect("nonempty schedule");
        Ok((last.s_value, last.bound))
    };
    let (top, bound) = s_at(1.0)?;
    if top < bound - BISECTION_TOLERANCE {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (s, _) = s_at(mid)?;
        if (s - bound).abs() < BISECTION_TOLERANCE {
            return Ok(Some(mid));
        }
        if s < bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, m, mode) = (cfg.n, cfg.m, cfg.mode);
    if n > FULL_TENSOR_MAX_N || m > FULL_TENSOR_MAX_M {
        return Err(CliError::Resource(format!(
            "compare simulates the full tensor state, which supports n <= {FULL_TENSOR_MAX_N} and m <= {FULL_TENSOR_MAX_M}"
        )));
    }
    let schedule = critical_schedule(n, m, mode)?;
    let quoted = quoted_criticals(n, m, mode);
    let positions = schedule.criticals.len().max(quoted.len());

    let mut simulated: Vec<Option<f64>> = Vec::with_capacity(positions);
    let mut prefix = Vec::new();
    for _ in 0..positions {
        let boundary =
            if prefix.len() == simulated.len() { simulated_boundary(n, m, mode, &prefix)? } else { None };
        if let Some(b) = boundary {
            prefix.push(b);
        }
        simulated.push(boundary);
    }

    let mut out =
        Report::new(["k", "analytic", "simulated", "quoted", "delta_simulated", "delta_quoted", "flag"]);
    for (k, &sim) in simulated.iter().enumerate() {
        let analytic = schedule.criticals.get(k).copied();
        let quoted = quoted.get(k).copied();
        let delta = |other: Option<f64>| analytic.zip(other).map(|(a, b)| (a - b).abs());
        let delta_quoted = delta(quoted);
        let flag = match delta_quoted {
            Some(d) if d > DISCREPANCY_THRESHOLD => "DISCREPANCY",
            Some(_) => "ok",
            None => "",
        };
        out.push(vec![
            (k + 1).into(),
            Cell::opt(analytic),
            Cell::opt(sim),
            Cell::opt(quoted),
            Cell::opt(delta(sim)),
            Cell::opt(delta_quoted),
            Cell::text(flag),
        ]);
    }

    out.notes.push(format!(
        "n = {n}, m = {m}, {mode}: max_observers = {}, classical bound = {}",
        schedule.max_observers,
        analytic::alpha(m)?
    ));
    out.notes.push("advantage ratio 2^(m-1) sqrt(m) / alpha_m:".into());
    for mm in 2..=12 {
        out.notes.push(format!("  m = {mm:>2}: {:.6}", analytic::advantage_ratio(mm)?));
    }
    let limit = (std::f64::consts::PI / 2.0).sqrt();
    out.notes.push(format!(
        "large-m limit sqrt(pi/2) = {limit:.6}; the rounded value 5/4 is off by {:.6}",
        limit - 1.25
    ));
    Ok(out)
}
