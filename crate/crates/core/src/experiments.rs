//! Parameter sweeps over drive statistics, interaction time and the number
//! of gate applications.
//!
//! Every grid point is independent. Rows come back in grid order whatever
//! the number of worker threads, so output depends only on the config.

use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::haar::SeededSampler;
use crate::jcdrive::{
    asymptotic_eigenerror_lower_bound, binomial_drive, build_channel_exact, custom_drive, fock_drive, poisson_drive,
    BinomialMode, DistributionFamily, DriveDistribution, JcConfig, DEFAULT_TAIL_TOL,
};
use crate::C64;

/// Drive family of a sweep; the grid supplies `n̄` and the Fano factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DriveSpec {
    Poisson,
    Binomial {
        #[serde(default)]
        mode: BinomialMode,
    },
    /// Number state `|round(n̄)⟩`.
    Fock,
    /// Fixed amplitudes `b_{n_min + k} = coeffs[k]` given as `[re, im]`;
    /// the `n̄` and Fano grids are ignored.
    Custom { n_min: usize, coeffs: Vec<[f64; 2]> },
}

impl DriveSpec {
    pub fn label(&self) -> &'static str {
        match self {
            DriveSpec::Poisson => "poisson",
            DriveSpec::Binomial { mode: BinomialMode::MomentMatched } => "binomial",
            DriveSpec::Binomial { mode: BinomialMode::HalfWidth } => "binomial_half_width",
            DriveSpec::Fock => "fock",
            DriveSpec::Custom { .. } => "custom",
        }
    }

    /// Drive with mean `nbar` and Fano factor `fano` (where applicable).
    pub fn build(&self, nbar: f64, fano: f64) -> Result<DriveDistribution> {
        match self {
            DriveSpec::Poisson => poisson_drive(nbar, DEFAULT_TAIL_TOL),
            DriveSpec::Binomial { mode } => binomial_drive(nbar, fano * nbar, *mode),
            DriveSpec::Fock => {
                if !(nbar >= 0.0) || (nbar - nbar.round()).abs() > 1e-9 {
                    return Err(Error::UnsupportedParameters(format!(
                        "Fock drive needs an integer photon number, got {nbar}"
                    )));
                }
                Ok(fock_drive(nbar.round() as usize))
            }
            DriveSpec::Custom { n_min, coeffs } => {
                custom_drive(*n_min, coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect())
            }
        }
    }

    /// Fano factors actually swept: only binomial drives use the grid.
    fn fano_grid(&self, grid: &[f64]) -> Vec<f64> {
        match self {
            DriveSpec::Binomial { .. } => grid.to_vec(),
            DriveSpec::Poisson => vec![1.0],
            DriveSpec::Fock | DriveSpec::Custom { .. } => vec![0.0],
        }
    }

    fn nbar_grid(&self, grid: &[f64]) -> Vec<f64> {
        match self {
            DriveSpec::Custom { .. } => vec![f64::NAN],
            _ => grid.to_vec(),
        }
    }

    /// Closed-form large-`n̄` eigenerror law; NaN where none applies.
    fn asymptote(&self, nbar: f64, variance: f64, tau: f64) -> f64 {
        let family = match self {
            DriveSpec::Poisson => DistributionFamily::Poisson,
            DriveSpec::Binomial { .. } => DistributionFamily::Binomial,
            _ => return f64::NAN,
        };
        asymptotic_eigenerror_lower_bound(family, nbar, variance, tau).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Scaling,
    Concat,
    Split,
}

/// How the reduced time of each of the `C` split pulses is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitConvention {
    /// Physical time `t/C` at the sub-pulse Rabi frequency: `τ_sub = τ / C^{3/2}`.
    PhysicalTime,
    /// `τ_sub = τ / C`, normalized by the sub-pulse mean `n̄/C`.
    PerPulse,
}

impl SplitConvention {
    pub fn label(self) -> &'static str {
        match self {
            SplitConvention::PhysicalTime => "physical_time",
            SplitConvention::PerPulse => "per_pulse",
        }
    }

    pub fn sub_tau(self, tau: f64, pulses: usize) -> f64 {
        let c = pulses as f64;
        match self {
            SplitConvention::PhysicalTime => tau / (c * c.sqrt()),
            SplitConvention::PerPulse => tau / c,
        }
    }
}

/// Grids and options of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub drive: DriveSpec,
    pub nbar: Vec<f64>,
    /// Fano factors `s = Δn²/n̄`; used by binomial drives only.
    pub fano: Vec<f64>,
    pub tau: Vec<f64>,
    /// Numbers of gate applications `C`; ignored in scaling mode.
    pub concatenations: Vec<usize>,
    /// Concat mode: extra rows at fixed total reduced time `C·τ`.
    pub total_tau: Vec<f64>,
    /// Split mode conventions to evaluate.
    pub split_conventions: Vec<SplitConvention>,
    pub coupling: f64,
    pub carrier: f64,
    pub seed: u64,
    /// Haar samples per row for the Monte Carlo column; 0 disables it.
    pub mc_samples: usize,
    /// Worker threads; 1 evaluates sequentially.
    pub jobs: usize,
}

impl SweepConfig {
    /// Config with the given mode and grids and defaults elsewhere.
    pub fn new(mode: SweepMode, drive: DriveSpec, nbar: Vec<f64>, fano: Vec<f64>, tau: Vec<f64>) -> Self {
        Self {
            mode,
            drive,
            nbar,
            fano,
            tau,
            concatenations: vec![1],
            total_tau: Vec::new(),
            split_conventions: vec![SplitConvention::PhysicalTime, SplitConvention::PerPulse],
            coupling: 1.0,
            carrier: 1.0,
            seed: 0,
            mc_samples: 0,
            jobs: 1,
        }
    }

    pub fn with_concatenations(mut self, c: Vec<usize>) -> Self {
        self.concatenations = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !matches!(self.drive, DriveSpec::Custom { .. }) {
            if self.nbar.is_empty() {
                return bad("nbar", "grid is empty");
            }
            if let Some(n) = self.nbar.iter().find(|n| !(**n > 0.0) || !n.is_finite()) {
                return bad("nbar", &format!("entries must be positive, got {n}"));
            }
        }
        if matches!(self.drive, DriveSpec::Binomial { .. }) {
            if self.fano.is_empty() {
                return bad("fano", "grid is empty");
            }
            if let Some(s) = self.fano.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
                return bad("fano", &format!("entries must lie in (0, 1], got {s}"));
            }
        }
        if self.tau.is_empty() && !(self.mode == SweepMode::Concat && !self.total_tau.is_empty()) {
            return bad("tau", "grid is empty");
        }
        if let Some(t) = self.tau.iter().chain(&self.total_tau).find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return bad("tau", &format!("entries must be non-negative, got {t}"));
        }
        if self.mode != SweepMode::Scaling {
            if self.concatenations.is_empty() {
                return bad("concatenations", "grid is empty");
            }
            if self.concatenations.contains(&0) {
                return bad("concatenations", "entries must be positive");
            }
        }
        if self.mode == SweepMode::Split {
            if self.split_conventions.is_empty() {
                return bad("split_conventions", "list is empty");
            }
            if matches!(self.drive, DriveSpec::Custom { .. }) {
                return bad("drive", "split mode needs a photon budget, not a custom drive");
            }
        }
        if self.jobs == 0 {
            return bad("jobs", "must be positive");
        }
        if self.mc_samples == 1 {
            return bad("mc_samples", "need 0 (disabled) or at least 2");
        }
        JcConfig::new(self.coupling, self.carrier, 0.0)?;
        Ok(())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mode: SweepMode,
    pub drive: &'static str,
    /// Photon budget (split) or drive mean per application.
    pub nbar: f64,
    pub fano: f64,
    /// Reduced time requested for the gate.
    pub tau: f64,
    pub concatenations: usize,
    /// `C · τ_applied`.
    pub total_tau: f64,
    pub convention: Option<SplitConvention>,
    /// Mean photon number of each application.
    pub sub_nbar: f64,
    /// Reduced time of each application.
    pub sub_tau: f64,
    /// `C · sub_nbar · ω`.
    pub energy: f64,
    /// `1 − r̄` by Bloch-sphere quadrature.
    pub eigenerror_exact: f64,
    /// `S̄_L / 2`.
    pub eigenerror_bound_lower: f64,
    /// `S̄_L`.
    pub eigenerror_bound_upper: f64,
    /// Single-application closed-form law at `(sub_nbar, Δn², sub_tau)`.
    pub asymptote: f64,
    pub mc_eigenerror: Option<f64>,
    pub mc_stderr: Option<f64>,
    #[serde(skip)]
    pub runtime_ms: f64,
}

/// CSV column names, in [`SweepRow::csv_fields`] order.
pub const CSV_HEADER: [&str; 17] = [
    "mode",
    "drive",
    "nbar",
    "fano",
    "tau",
    "concatenations",
    "total_tau",
    "convention",
    "sub_nbar",
    "sub_tau",
    "energy",
    "eigenerror_exact",
    "eigenerror_bound_lower",
    "eigenerror_bound_upper",
    "asymptote",
    "mc_eigenerror",
    "mc_stderr",
];

/// Locale-independent scientific notation with 12 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

impl SweepRow {
    /// Row bracketed by its bounds: `S̄_L/2 ≤ 1 − r̄ ≤ S̄_L` within `tol`.
    pub fn bounds_hold(&self, tol: f64) -> bool {
        self.eigenerror_bound_lower <= self.eigenerror_exact + tol
            && self.eigenerror_exact <= self.eigenerror_bound_upper + tol
    }

    pub fn csv_fields(&self) -> Vec<String> {
        let mode = match self.mode {
            SweepMode::Scaling => "scaling",
            SweepMode::Concat => "concat",
            SweepMode::Split => "split",
        };
        let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        vec![
            mode.into(),
            self.drive.into(),
            format_real(self.nbar),
            format_real(self.fano),
            format_real(self.tau),
            self.concatenations.to_string(),
            format_real(self.total_tau),
            self.convention.map(|c| c.label()).unwrap_or("").into(),
            format_real(self.sub_nbar),
            format_real(self.sub_tau),
            format_real(self.energy),
            format_real(self.eigenerror_exact),
            format_real(self.eigenerror_bound_lower),
            format_real(self.eigenerror_bound_upper),
            format_real(self.asymptote),
            opt(self.mc_eigenerror),
            opt(self.mc_stderr),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows matching a predicate, in grid order.
    pub fn select(&self, pred: impl Fn(&SweepRow) -> bool) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| pred(r)).collect()
    }
}

/// Grid point: single-application drive and time, applied `pulses` times.
#[derive(Debug, Clone, Copy)]
struct Task {
    nbar: f64,
    fano: f64,
    tau: f64,
    pulses: usize,
    convention: Option<SplitConvention>,
    sub_nbar: f64,
    sub_tau: f64,
}

fn evaluate(cfg: &SweepConfig, task: &Task, index: usize) -> Result<SweepRow> {
    let start = Instant::now();
    let drive = cfg.drive.build(task.sub_nbar, task.fano)?;
    let jc = JcConfig::new(cfg.coupling, cfg.carrier, task.sub_tau)?;
    let single = build_channel_exact(&drive, &jc)?;
    let channel: QubitChannel = single.power(task.pulses)?;
    let (lower, upper) = channel.eigenerror_bounds();
    let exact = 1.0 - channel.channel_eigenfidelity();
    let (mc_eigenerror, mc_stderr) = if cfg.mc_samples >= 2 {
        let mut sampler = SeededSampler::new(cfg.seed, 2).child(index as u64);
        let est = channel.channel_eigenfidelity_mc(&mut sampler, cfg.mc_samples)?;
        (Some(1.0 - est.mean), Some(est.stderr))
    } else {
        (None, None)
    };
    let nbar_used = if task.sub_nbar.is_nan() { drive.mean() } else { task.sub_nbar };
    let row = SweepRow {
        mode: cfg.mode,
        drive: cfg.drive.label(),
        nbar: if task.nbar.is_nan() { drive.mean() } else { task.nbar },
        fano: task.fano,
        tau: task.tau,
        concatenations: task.pulses,
        total_tau: task.pulses as f64 * task.sub_tau,
        convention: task.convention,
        sub_nbar: nbar_used,
        sub_tau: task.sub_tau,
        energy: task.pulses as f64 * nbar_used * cfg.carrier,
        eigenerror_exact: exact,
        eigenerror_bound_lower: lower,
        eigenerror_bound_upper: upper,
        asymptote: cfg.drive.asymptote(nbar_used, drive.variance(), task.sub_tau),
        mc_eigenerror,
        mc_stderr,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    debug!("row {index}: {row:?}");
    Ok(row)
}

fn run_tasks(cfg: &SweepConfig, tasks: Vec<Task>) -> Result<SweepResult> {
    cfg.validate()?;
    info!("{:?} sweep: {} grid points, {} worker(s)", cfg.mode, tasks.len(), cfg.jobs);
    let rows: Result<Vec<SweepRow>> = if cfg.jobs == 1 {
        tasks.iter().enumerate().map(|(i, t)| evaluate(cfg, t, i)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "jobs",
                reason: e.to_string(),
            })?;
        pool.install(|| {
            tasks
                .par_iter()
                .enumerate()
                .map(|(i, t)| evaluate(cfg, t, i))
                .collect()
        })
    };
    Ok(SweepResult {
        config: cfg.clone(),
        rows: rows?,
    })
}

fn drive_points(cfg: &SweepConfig) -> Vec<(f64, f64)> {
    let fanos = cfg.drive.fano_grid(&cfg.fano);
    cfg.drive
        .nbar_grid(&cfg.nbar)
        .into_iter()
        .flat_map(|n| fanos.iter().map(move |&s| (n, s)))
        .collect()
}

fn plain(nbar: f64, fano: f64, tau: f64, pulses: usize) -> Task {
    Task {
        nbar,
        fano,
        tau,
        pulses,
        convention: None,
        sub_nbar: nbar,
        sub_tau: tau,
    }
}

fn expect_mode(cfg: &SweepConfig, mode: SweepMode) -> Result<()> {
    if cfg.mode != mode {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: format!("expected {mode:?}, got {:?}", cfg.mode),
        });
    }
    cfg.validate()
}

/// One row per `(n̄, s, τ)` for a single gate application.
pub fn run_scaling(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_mode(cfg, SweepMode::Scaling)?;
    let mut tasks = Vec::new();
    for (n, s) in drive_points(cfg) {
        for &tau in &cfg.tau {
            tasks.push(plain(n, s, tau, 1));
        }
    }
    run_tasks(cfg, tasks)
}

/// `C`-fold composition of the single-use channel, each use with a fresh
/// drive. Rows over `(n̄, s, τ, C)`, then rows at fixed `C·τ` for each entry
/// of `total_tau`.
pub fn run_concat(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_mode(cfg, SweepMode::Concat)?;
    let mut tasks = Vec::new();
    for (n, s) in drive_points(cfg) {
        for &tau in &cfg.tau {
            for &c in &cfg.concatenations {
                tasks.push(plain(n, s, tau, c));
            }
        }
        for &total in &cfg.total_tau {
            for &c in &cfg.concatenations {
                tasks.push(plain(n, s, total / c as f64, c));
            }
        }
    }
    run_tasks(cfg, tasks)
}

/// Fixed photon budget `n̄` spread over `C` fresh drives of `n̄/C` photons.
pub fn run_split(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_mode(cfg, SweepMode::Split)?;
    let mut tasks = Vec::new();
    for (n, s) in drive_points(cfg) {
        for &tau in &cfg.tau {
            for &c in &cfg.concatenations {
                let sub_nbar = n / c as f64;
                if sub_nbar < 1.0 {
                    return Err(Error::BudgetTooSmall { nbar: n, pulses: c });
                }
                for &conv in &cfg.split_conventions {
                    tasks.push(Task {
                        nbar: n,
                        fano: s,
                        tau,
                        pulses: c,
                        convention: Some(conv),
                        sub_nbar,
                        sub_tau: conv.sub_tau(tau, c),
                    });
                }
            }
        }
    }
    run_tasks(cfg, tasks)
}

/// Dispatch on `cfg.mode`.
pub fn run(cfg: &SweepConfig) -> Result<SweepResult> {
    match cfg.mode {
        SweepMode::Scaling => run_scaling(cfg),
        SweepMode::Concat => run_concat(cfg),
        SweepMode::Split => run_split(cfg),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "slope fit needs paired samples");
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_time_has_no_error() {
        let cfg = SweepConfig::new(SweepMode::Scaling, DriveSpec::Poisson, vec![10.0, 30.0], vec![], vec![0.0]);
        let res = run_scaling(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2);
        for r in &res.rows {
            assert!(r.eigenerror_exact.abs() < 1e-14);
            assert!(r.eigenerror_bound_upper.abs() < 1e-14);
        }
    }

    #[test]
    fn mode_mismatch_and_budget() {
        let cfg = SweepConfig::new(SweepMode::Split, DriveSpec::Poisson, vec![4.0], vec![], vec![FRAC_PI_2])
            .with_concatenations(vec![1, 8]);
        assert!(run_scaling(&cfg).is_err());
        assert_eq!(run_split(&cfg).unwrap_err(), Error::BudgetTooSmall { nbar: 4.0, pulses: 8 });
    }

    #[test]
    fn empty_grid_rejected() {
        let cfg = SweepConfig::new(SweepMode::Scaling, DriveSpec::Poisson, vec![], vec![], vec![1.0]);
        assert!(matches!(run_scaling(&cfg), Err(Error::InvalidParameter { name: "nbar", .. })));
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(5.7791e-4), "5.77910000000e-4");
        assert_eq!(format_real(f64::NAN), "nan");
        assert_eq!(format_real(f64::INFINITY), "inf");
    }
}
