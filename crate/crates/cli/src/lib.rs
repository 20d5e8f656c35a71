//! Command implementations behind the `starkdisk` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags or configuration,
//! 3 solver failure, 4 no sign change over a crossing bracket.

pub mod config;
pub mod csv;
pub mod svg;

use std::fmt;
use std::io::Write;
use std::path::Path;

use starkdisk::analysis::{
    self, combined_radial_levels, detect_degeneracy, find_crossing, uniform_grid, RadialSolver,
    SectorSolver, StateLabel, SweepParameter, SweepResult,
};
use starkdisk::basis::Parity;
use starkdisk::reference::{bessel_zero, particle_in_box_energy, DiskLevel};
use starkdisk::scaling::ModelParams;

use config::{label_token, CommandKind, Format, RunConfig};
use csv::{num, CsvTable};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn exit_code(e: &starkdisk::Error) -> i32 {
    use starkdisk::Error as E;
    match e {
        E::Domain(_) | E::Range(_) => 2,
        E::Bracket { .. } => 4,
        E::Sweep { source, .. } => exit_code(source),
        _ => 3,
    }
}

impl From<starkdisk::Error> for CliError {
    fn from(e: starkdisk::Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Csv(CsvTable),
    Svg(String),
}

impl Output {
    pub fn text(&self) -> String {
        match self {
            Output::Csv(t) => t.render(),
            Output::Svg(s) => s.clone(),
        }
    }
}

fn with_config(cfg: &RunConfig, header: &[&str]) -> CsvTable {
    let mut t = CsvTable::new(header);
    for (k, v) in cfg.echo() {
        t.meta(k, v);
    }
    t
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command {
        CommandKind::Spectrum => spectrum(cfg).map(Output::Csv),
        CommandKind::Table1 => table1(cfg).map(Output::Csv),
        CommandKind::BesselZeros => bessel_zeros(cfg).map(Output::Csv),
        CommandKind::Crossing => crossing(cfg).map(Output::Csv),
        CommandKind::Sweep => {
            let grid = uniform_grid(cfg.from, cfg.to, cfg.step)?;
            let fixed = ModelParams {
                r0: cfg.r0,
                lambda: cfg.lambda,
            };
            let result = analysis::sweep(
                cfg.parameter,
                &grid,
                &fixed,
                cfg.sector,
                cfg.n_basis,
                cfg.levels,
            )?;
            Ok(sweep_output(
                cfg,
                &result,
                &format!("{} sweep", cfg.parameter),
            ))
        }
        CommandKind::Figure => {
            let setup = analysis::figure_setup(cfg.figure)?;
            let result = analysis::sweep(
                setup.parameter,
                &setup.grid,
                &setup.fixed,
                setup.sector,
                cfg.n_basis,
                cfg.levels,
            )?;
            Ok(sweep_output(
                cfg,
                &result,
                &format!("figure {}", cfg.figure),
            ))
        }
    }
}

pub fn curve_column(label: &StateLabel) -> String {
    format!("E_{}", label_token(label))
}

fn sweep_output(cfg: &RunConfig, result: &SweepResult, title: &str) -> Output {
    if cfg.format == Format::Svg {
        return Output::Svg(svg::render(result, title));
    }
    let columns: Vec<String> = std::iter::once(result.parameter_name().to_string())
        .chain(result.curves.iter().map(|c| curve_column(&c.label)))
        .collect();
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = with_config(cfg, &refs);
    for e in &result.events {
        t.meta(
            "event",
            format!(
                "{} {}={} a={} b={} gap={} energy={}",
                e.kind.as_str(),
                result.parameter_name(),
                e.location,
                label_token(&e.labels.0),
                label_token(&e.labels.1),
                e.gap,
                e.energy
            ),
        );
    }
    for (i, &x) in result.grid.iter().enumerate() {
        let mut row = vec![num(x)];
        row.extend(result.curves.iter().map(|c| num(c.energies[i])));
        t.push(row);
    }
    Output::Csv(t)
}

fn spectrum(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let mut t = with_config(cfg, &["sector", "index", "energy", "label_n", "label_nu"]);
    if cfg.levels == 0 {
        return Ok(t);
    }
    for &parity in cfg.sector.parities() {
        let levels = SectorSolver::new(parity, cfg.n_basis, cfg.r0)?.labelled_levels(cfg.lambda)?;
        if levels.len() < cfg.levels {
            return Err(CliError::usage(format!(
                "{} levels requested but the {parity} basis retains {}",
                cfg.levels,
                levels.len()
            )));
        }
        for (k, l) in levels.iter().take(cfg.levels).enumerate() {
            t.push(vec![
                parity.to_string(),
                k.to_string(),
                num(l.energy),
                l.label.n.to_string(),
                l.label.nu.to_string(),
            ]);
        }
    }
    Ok(t)
}

/// Columns of the published table, as `(n, ν)`.
pub const TABLE1_LEVELS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (0, 3), (1, 1)];
pub const TABLE1_RADII: [f64; 2] = [0.01, 0.001];

fn table1(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let columns: Vec<String> = std::iter::once("row".to_string())
        .chain(TABLE1_LEVELS.iter().map(|(n, nu)| format!("E_{n}_{nu}")))
        .collect();
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = with_config(cfg, &refs);
    for r0 in TABLE1_RADII {
        let levels = SectorSolver::new(Parity::Even, cfg.n_basis, r0)?.labelled_levels(1.0)?;
        let mut row = vec![format!("r0={r0}")];
        for (n, nu) in TABLE1_LEVELS {
            let label = StateLabel {
                parity: Parity::Even,
                n,
                nu,
            };
            let e = levels
                .iter()
                .find(|l| l.label == label)
                .ok_or_else(|| CliError::usage(format!("level {label} needs a larger basis")))?;
            row.push(num(r0 * r0 * e.energy));
        }
        t.push(row);
    }
    let mut row = vec!["PB".to_string()];
    for (n, nu) in TABLE1_LEVELS {
        row.push(num(particle_in_box_energy(DiskLevel::new(n, nu))?));
    }
    t.push(row);
    Ok(t)
}

fn bessel_zeros(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let mut t = with_config(cfg, &["nu", "k", "zero", "energy"]);
    for k in 1..=cfg.count {
        let z = bessel_zero(cfg.nu, k)?;
        t.push(vec![
            cfg.nu.to_string(),
            k.to_string(),
            num(z),
            num(0.5 * z * z),
        ]);
    }
    Ok(t)
}

/// Relative tolerance for counting coincident levels at a crossing.
pub const MULTIPLICITY_TOL: f64 = 1e-7;

fn crossing(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let fixed = ModelParams {
        r0: cfg.r0,
        lambda: cfg.lambda,
    };
    let c = find_crossing(
        cfg.label_a,
        cfg.label_b,
        cfg.parameter,
        (cfg.from, cfg.to),
        &fixed,
        cfg.n_basis,
    )?;

    // Count every level, both parities included, that coincides with the crossing.
    let mut energies: Vec<f64> = match cfg.parameter {
        SweepParameter::Beta => {
            let nu_max = cfg.label_a.nu.max(cfg.label_b.nu) + 1;
            combined_radial_levels(c.location, cfg.n_basis, nu_max)?
                .iter()
                .map(|l| l.energy)
                .collect()
        }
        _ => {
            let (r0, lambda) = match cfg.parameter {
                SweepParameter::R0 => (c.location, cfg.lambda),
                _ => (cfg.r0, c.location),
            };
            let mut all = Vec::new();
            for parity in Parity::BOTH {
                all.extend(
                    SectorSolver::new(parity, cfg.n_basis, r0)?
                        .solve(lambda)?
                        .eigenvalues,
                );
            }
            all
        }
    };
    energies.sort_by(f64::total_cmp);
    let multiplicity = detect_degeneracy(&energies, MULTIPLICITY_TOL)
        .iter()
        .filter(|g| {
            let member_energies = &energies[g.start..g.start + g.multiplicity];
            member_energies
                .iter()
                .any(|e| (e - c.energy).abs() <= MULTIPLICITY_TOL * c.energy.abs().max(1.0))
        })
        .map(|g| g.multiplicity)
        .max()
        .unwrap_or(0);

    let radial_size = if cfg.parameter == SweepParameter::Beta {
        cfg.n_basis
    } else {
        20
    };
    let ground = RadialSolver::new(0, radial_size)?.energies(0.75)?[0];

    let mut t = with_config(
        cfg,
        &[
            "parameter",
            "location",
            "energy",
            "difference",
            "multiplicity",
            "ground_beta34",
        ],
    );
    t.push(vec![
        cfg.parameter.to_string(),
        num(c.location),
        num(c.energy),
        num(c.difference),
        multiplicity.to_string(),
        num(ground),
    ]);
    Ok(t)
}

/// Write to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        CliError::io(format!(
            "cannot create a temporary file in {}: {e}",
            dir.display()
        ))
    })?;
    tmp.write_all(text.as_bytes())
        .map_err(|e| CliError::io(format!("write failed: {e}")))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Apply `STARKDISK_THREADS` (unset or 0 means one thread per core).
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("STARKDISK_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        CliError::usage(format!(
            "STARKDISK_THREADS must be a non-negative integer, got '{v}'"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}
