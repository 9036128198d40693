use std::path::Path;

use cnls_core::charge::{mass_identity_residual, reconstruct_field, solve_charge, MassIdentity};
use cnls_core::field::random_hs_field;
use cnls_core::io::{to_json_pretty, write_atomic, CsvTable, Float};
use cnls_core::kernels::{
    kernel_difference_norm, lorentzian_l2_sq, lorentzian_l2_sq_numeric,
    windowed_kernel_sobolev_norm, KernelNormRecord,
};
use cnls_core::limits::{
    charge_conservation, commuting_diagram, concentration_sweep, inviscid_sweep,
    trajectory_conservation, ConservationReport,
};
use cnls_core::solvers::{scgl_solve, snls_solve};
use cnls_core::validators::{
    combinatorial_bound, combinatorial_m_grid, full_summability_check, heat_smoothing_ratio,
    indicator_hs_norm, BoundCheck, SequenceSpec, COMBINATORIAL_CAP,
};
use cnls_core::{KernelSpec, SpectralField, TimeWindow};
use serde::Serialize;

use crate::config::{Ladder, RunConfig};
use crate::error::{io_error, CliError};

/// Failed assertions of a completed run; only acted on under `--check`.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: Vec<String>,
}

impl Outcome {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

struct Sink<'a> {
    dir: &'a Path,
}

impl Sink<'_> {
    fn text(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes()).map_err(io_error(path))
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.text(name, &to_json_pretty(value)?)
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    let sink = Sink { dir: &dir };
    sink.json("config.json", cfg)?;
    let name = RunConfig::need(&cfg.subcommand, "subcommand")?;
    match name.as_str() {
        "snls" | "scgl" => field_run(cfg, &sink, name == "scgl"),
        "charge" => charge_run(cfg, &sink),
        "sweep-eps" => sweep_eps(cfg, &sink),
        "sweep-gamma" => sweep_gamma(cfg, &sink),
        "diagram" => diagram(cfg, &sink),
        "kernels" => kernels(cfg, &sink),
        "validate" => validate(cfg, &sink),
        other => Err(CliError::Config(format!("unknown subcommand {other:?}"))),
    }
}

fn initial_field(cfg: &RunConfig) -> Result<SpectralField, CliError> {
    let n = RunConfig::need(&cfg.mode_cutoff, "N")?;
    cfg.initial_data()?.build(n, cfg.seed())
}

fn field_run(cfg: &RunConfig, sink: &Sink, damped: bool) -> Result<Outcome, CliError> {
    let u0 = initial_field(cfg)?;
    let solver = cfg.solver()?;
    let traj = if damped {
        scgl_solve(&u0, &solver)?
    } else {
        snls_solve(&u0, &solver)?
    };
    sink.text("trajectory.csv", &traj.to_csv())?;
    sink.text("final_field.json", &traj.final_field().to_json()?)?;
    let report = trajectory_conservation(&traj);
    sink.json("summary.json", &report)?;

    let mut outcome = Outcome::default();
    if damped {
        outcome.require(
            report.mass_violations == 0,
            format!("mass increased at {} steps", report.mass_violations),
        );
        outcome.require(
            report.energy_violations == 0,
            format!("energy increased at {} steps", report.energy_violations),
        );
    } else {
        outcome.require(
            report.mass_drift <= 1e-10,
            format!("relative mass drift {:e} > 1e-10", report.mass_drift),
        );
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct ChargeSummary {
    steps: usize,
    max_picard_iters: usize,
    final_wiener_norm: f64,
    conservation: ConservationReport,
    mass_identity: Option<MassIdentity>,
}

fn charge_run(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let u0 = initial_field(cfg)?;
    let vc = cfg.volterra()?;
    let charge = solve_charge(&u0, &vc)?;
    sink.text("charge.csv", &charge.to_csv())?;
    let t_end = *charge.times.last().expect("charge grid includes t = 0");
    let field = reconstruct_field(&u0, &charge, t_end, vc.mode_cutoff)?;
    sink.text("final_field.json", &field.to_json()?)?;
    let conservation = charge_conservation(&u0, &charge);
    let mass_identity = if vc.gamma == 0.0 {
        Some(mass_identity_residual(&u0, &charge, t_end)?)
    } else {
        None
    };
    let summary = ChargeSummary {
        steps: vc.steps(),
        max_picard_iters: charge.picard_iters.iter().copied().max().unwrap_or(0),
        final_wiener_norm: field.wiener_norm(),
        conservation,
        mass_identity,
    };
    sink.json("summary.json", &summary)?;

    let mut outcome = Outcome::default();
    match mass_identity {
        Some(mi) => {
            outcome.require(
                conservation.energy_drift <= 1e-4,
                format!(
                    "relative energy drift {:e} > 1e-4",
                    conservation.energy_drift
                ),
            );
            let relative_defect = if mi.free_mass > 0.0 {
                mi.residual / mi.free_mass
            } else {
                mi.residual
            };
            outcome.require(
                relative_defect <= 1e-6,
                format!("relative mass identity residual {relative_defect:e} > 1e-6"),
            );
        }
        None => {
            outcome.require(
                conservation.mass_violations == 0 && conservation.energy_violations == 0,
                "mass or energy increased under damping",
            );
        }
    }
    Ok(outcome)
}

fn sweep_eps(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let u0 = initial_field(cfg)?;
    let metric_s = RunConfig::need(&cfg.metric_s, "metric_s")?;
    let report = concentration_sweep(&u0, &cfg.ladder(Ladder::Epsilon)?, &cfg.solver()?, metric_s)?;
    sink.text("sweep_eps.csv", &report.to_csv())?;
    sink.json("sweep_eps.json", &report)?;
    let mut outcome = Outcome::default();
    outcome.require(report.monotone, "epsilon errors not strictly decreasing");
    if let (Some(r), Some(&first)) = (report.reference_error, report.errors.first()) {
        outcome.require(
            r < first,
            format!("reference error {r:e} not below coarsest error {first:e}"),
        );
    }
    Ok(outcome)
}

fn sweep_gamma(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let u0 = initial_field(cfg)?;
    let report = inviscid_sweep(&u0, &cfg.ladder(Ladder::Gamma)?, &cfg.volterra()?)?;
    sink.text("sweep_gamma.csv", &report.to_csv())?;
    sink.json("sweep_gamma.json", &report)?;
    let mut outcome = Outcome::default();
    outcome.require(report.monotone, "gamma errors not strictly decreasing");
    Ok(outcome)
}

fn diagram(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let u0 = initial_field(cfg)?;
    let report = commuting_diagram(
        &u0,
        &cfg.ladder(Ladder::Epsilon)?,
        &cfg.ladder(Ladder::Gamma)?,
        &cfg.solver()?,
    )?;
    sink.json("diagram.json", &report)?;
    let mut outcome = Outcome::default();
    outcome.require(
        report.consistent,
        format!(
            "path discrepancy {:e} exceeds extrapolated errors ({:e}, {:e})",
            report.discrepancy,
            report.gamma_path_extrapolated_error,
            report.eps_path_extrapolated_error
        ),
    );
    Ok(outcome)
}

/// Largest over smallest windowed norm allowed across the γ ladder.
const UNIFORMITY_CAP: f64 = 3.0;

fn kernels(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let ladder = cfg.ladder(Ladder::Gamma)?;
    let modes = RunConfig::need(&cfg.kernel_modes, "N_k")?;
    let s = RunConfig::need(&cfg.s, "s")?;
    let window = TimeWindow::default();
    let mut records = Vec::with_capacity(ladder.len());
    let mut table = CsvTable::new([
        "gamma",
        "N_k",
        "s",
        "norm",
        "difference_norm",
        "sample_count",
    ]);
    let mut differences = Vec::with_capacity(ladder.len());
    for &gamma in &ladder {
        let norm = windowed_kernel_sobolev_norm(&KernelSpec::new(gamma, modes)?, s, &window)?;
        let diff = kernel_difference_norm(gamma, modes, s, &window)?;
        table.push([
            Float(gamma).to_string(),
            modes.to_string(),
            Float(s).to_string(),
            Float(norm.value).to_string(),
            Float(diff).to_string(),
            norm.metadata.sample_count.to_string(),
        ]);
        records.push(KernelNormRecord {
            gamma,
            mode_cutoff: modes,
            s,
            norm: norm.value,
            metadata: norm.metadata,
        });
        differences.push(diff);
    }
    sink.text("kernels.csv", &table.render())?;
    sink.json("kernels.json", &records)?;

    let mut outcome = Outcome::default();
    outcome.require(
        differences.windows(2).all(|w| w[1] < w[0]),
        "kernel difference norms not strictly decreasing",
    );
    let max = records.iter().map(|r| r.norm).fold(f64::MIN, f64::max);
    let min = records.iter().map(|r| r.norm).fold(f64::MAX, f64::min);
    outcome.require(
        max / min <= UNIFORMITY_CAP,
        format!("norm spread {} > {UNIFORMITY_CAP}", max / min),
    );
    Ok(outcome)
}

#[derive(Serialize)]
struct CheckRow {
    suite: &'static str,
    case: String,
    #[serde(flatten)]
    check: BoundCheck,
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn indicator_suite(rows: &mut Vec<CheckRow>) -> Result<(), CliError> {
    for a in [0.1, 0.5, 1.0] {
        for s in [0.2, 0.3, 0.45] {
            let n = indicator_hs_norm(a, s)?;
            rows.push(CheckRow {
                suite: "indicator",
                case: format!("a={a} s={s}"),
                check: BoundCheck::new(relative(n.quadrature, n.closed_form), 1e-4, 1.0),
            });
        }
    }
    Ok(())
}

fn heat_suite(rows: &mut Vec<CheckRow>, modes: usize, seed: u64) -> Result<(), CliError> {
    let fields: Vec<SpectralField> = (0..4)
        .map(|i| random_hs_field(1.0, modes, seed + i))
        .collect::<Result<_, _>>()?;
    let times = [0.01, 0.1, 1.0, 10.0];
    for (s, s_prime) in [(0.0, 1.0), (0.5, 0.5), (0.0, 2.0)] {
        rows.push(CheckRow {
            suite: "heat",
            case: format!("gamma=0.1 s={s} s'={s_prime}"),
            check: heat_smoothing_ratio(0.1, s, s_prime, &times, &fields)?,
        });
    }
    Ok(())
}

fn lorentzian_suite(rows: &mut Vec<CheckRow>) -> Result<(), CliError> {
    for gamma in [0.05, 0.1, 0.5] {
        for n in [1i64, 2, 8] {
            let exact = lorentzian_l2_sq(gamma, n)?;
            let numeric = lorentzian_l2_sq_numeric(gamma, n, 1e6)?;
            rows.push(CheckRow {
                suite: "lorentzian",
                case: format!("gamma={gamma} n={n}"),
                check: BoundCheck::new(relative(numeric, exact), 1e-6, 1.0),
            });
        }
    }
    Ok(())
}

fn lattice_sum_suite(rows: &mut Vec<CheckRow>) -> Result<(), CliError> {
    let bound = combinatorial_bound(&combinatorial_m_grid(), 200_000)?;
    rows.push(CheckRow {
        suite: "lemmaB",
        case: "sup_m sum 1/|m^2-n^2| N=200000".into(),
        check: BoundCheck::new(bound, 1.0, COMBINATORIAL_CAP),
    });
    let coarse = full_summability_check(SequenceSpec::InverseSquare, 32, 3)?;
    let fine = full_summability_check(SequenceSpec::InverseSquare, 64, 3)?;
    rows.push(CheckRow {
        suite: "lemmaB",
        case: "full summability power 3 modes 32 vs 64".into(),
        check: BoundCheck::new(relative(fine, coarse), 0.02, 1.0),
    });
    Ok(())
}

fn validate(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let suite = RunConfig::need(&cfg.suite, "suite")?;
    let modes = RunConfig::need(&cfg.mode_cutoff, "N")?;
    let mut rows = Vec::new();
    let all = suite == "all";
    let mut matched = false;
    if all || suite == "indicator" {
        indicator_suite(&mut rows)?;
        matched = true;
    }
    if all || suite == "heat" {
        heat_suite(&mut rows, modes, cfg.seed())?;
        matched = true;
    }
    if all || suite == "lorentzian" {
        lorentzian_suite(&mut rows)?;
        matched = true;
    }
    if all || suite == "lemmaB" {
        lattice_sum_suite(&mut rows)?;
        matched = true;
    }
    if !matched {
        return Err(CliError::Config(format!(
            "unknown suite {suite:?} (expected indicator, heat, lorentzian, lemmaB or all)"
        )));
    }
    let mut table = CsvTable::new(["suite", "case", "quantity", "bound", "ratio", "cap", "pass"]);
    for r in &rows {
        let c = &r.check;
        table.push([
            r.suite.to_string(),
            r.case.clone(),
            Float(c.quantity).to_string(),
            Float(c.bound).to_string(),
            Float(c.ratio).to_string(),
            Float(c.cap).to_string(),
            c.pass.to_string(),
        ]);
    }
    sink.text(&format!("validate_{suite}.csv"), &table.render())?;
    sink.json(&format!("validate_{suite}.json"), &rows)?;
    let mut outcome = Outcome::default();
    for r in rows.iter().filter(|r| !r.check.pass) {
        outcome.failures.push(format!(
            "{} {}: ratio {} > cap {}",
            r.suite, r.case, r.check.ratio, r.check.cap
        ));
    }
    Ok(outcome)
}
