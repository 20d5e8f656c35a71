//! Parameter sweeps, state labelling, degeneracies and level crossings.
//!
//! Labels `(n, ν)` are exact at zero field: the overlap is whitened block by
//! block and the Jacobi solver never rotates exactly-zero couplings, so every
//! eigenvector lives in a single `j` block. With a field, no symmetry is left
//! inside a parity sector and levels of one sector do not cross; the labels
//! are carried from zero field by keeping the order of the levels, and only
//! degenerate zero-field groups need to be matched through eigenvector
//! overlaps as they split.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::assembly::{RadialMatrices, SectorMatrices};
use crate::basis::{BasisSpec, Parity, RadialBasisSpec};
use crate::dd::Dd;
use crate::eigensolver::{dominant_index, EigenSolution, Whitening, DEFAULT_CUTOFF};
use crate::error::{Error, Result};
use crate::scaling::ModelParams;

pub const DEGENERACY_REL_TOL: f64 = 1e-8;
/// Field used to decide how degenerate zero-field groups split.
pub const LABEL_STEP: f64 = 1e-3;
pub const CROSSING_TOL: f64 = 1e-10;
/// Energy tolerance for two tracked curves to count as touching.
pub const CURVE_TOUCH_TOL: f64 = 1e-9;
/// An interior gap minimum is reported as an avoided crossing when the gap
/// grows by at least this factor on both sides of it.
pub const AVOIDED_PROMINENCE: f64 = 2.0;
const AVOIDED_SCAN_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    Lambda,
    R0,
    Beta,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::R0 => "r0",
            SweepParameter::Beta => "beta",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParameter::Lambda),
            "r0" => Ok(SweepParameter::R0),
            "beta" => Ok(SweepParameter::Beta),
            _ => Err(Error::Domain(format!(
                "unknown sweep parameter '{s}' (expected lambda, r0 or beta)"
            ))),
        }
    }
}

/// One parity sector or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
    Both,
}

impl Sector {
    pub fn parities(self) -> &'static [Parity] {
        match self {
            Sector::Even => &[Parity::Even],
            Sector::Odd => &[Parity::Odd],
            Sector::Both => &Parity::BOTH,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
            Sector::Both => "both",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            "both" => Ok(Sector::Both),
            _ => Err(Error::Domain(format!(
                "unknown sector '{s}' (expected even, odd or both)"
            ))),
        }
    }
}

/// Zero-field quantum numbers carried by a level. For the radial problem the
/// parity picks the `cos νφ` or `sin νφ` member of a `±m` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateLabel {
    pub parity: Parity,
    pub n: usize,
    pub nu: usize,
}

impl StateLabel {
    pub fn new(parity: Parity, n: usize, nu: usize) -> Result<Self> {
        if nu < parity.min_j() {
            return Err(Error::Domain(format!(
                "odd states need nu >= 1, got nu = {nu}"
            )));
        }
        Ok(Self { parity, n, nu })
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.parity, self.n, self.nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelledLevel {
    pub label: StateLabel,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: StateLabel,
    /// One energy per grid point.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Crossing,
    AvoidedCrossing,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Crossing => "crossing",
            EventKind::AvoidedCrossing => "avoided-crossing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub location: f64,
    pub labels: (StateLabel, StateLabel),
    /// Zero for a crossing.
    pub gap: f64,
    /// Mean energy of the two levels at `location`.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub curves: Vec<Curve>,
    pub events: Vec<Event>,
}

impl SweepResult {
    pub fn parameter_name(&self) -> &'static str {
        self.parameter.as_str()
    }

    pub fn curve(&self, label: StateLabel) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateGroup {
    /// Index of the first member in the input list.
    pub start: usize,
    pub multiplicity: usize,
    pub energy: f64,
}

/// Group consecutive energies with `|ΔE| <= rel_tol · max(1, |E|)`.
pub fn detect_degeneracy(energies: &[f64], rel_tol: f64) -> Vec<DegenerateGroup> {
    let mut groups: Vec<DegenerateGroup> = Vec::new();
    for (k, &e) in energies.iter().enumerate() {
        if let Some(last) = groups.last_mut() {
            let prev = energies[k - 1];
            if (e - prev).abs() <= rel_tol * e.abs().max(prev.abs()).max(1.0) {
                last.multiplicity += 1;
                continue;
            }
        }
        groups.push(DegenerateGroup {
            start: k,
            multiplicity: 1,
            energy: e,
        });
    }
    groups
}

fn sweep_error(parameter: SweepParameter, value: f64, source: Error) -> Error {
    Error::Sweep {
        parameter: parameter.as_str().into(),
        value,
        source: Box::new(source),
    }
}

/// `|aᵀ S b|` for two coefficient columns.
fn s_overlap(s: &DMatrix<Dd>, a: &DMatrix<Dd>, ca: usize, b: &DMatrix<Dd>, cb: usize) -> f64 {
    let n = s.nrows();
    let mut total = Dd::ZERO;
    for r in 0..n {
        let mut acc = Dd::ZERO;
        for q in 0..n {
            let srq = s[(r, q)];
            if srq != Dd::ZERO {
                acc += srq * b[(q, cb)];
            }
        }
        total += a[(r, ca)] * acc;
    }
    total.to_f64().abs()
}

/// Solver for one parity sector at fixed `r0`; the overlap is whitened once
/// and reused for every field strength.
#[derive(Debug)]
pub struct SectorSolver {
    matrices: SectorMatrices,
    whitening: Whitening,
    /// Labels by rank for positive and negative fields.
    field_labels: [OnceLock<Vec<StateLabel>>; 2],
}

impl SectorSolver {
    pub fn new(parity: Parity, n_basis: usize, r0: f64) -> Result<Self> {
        let spec = BasisSpec::new(n_basis, parity, r0)?;
        let matrices = SectorMatrices::new(&spec)?;
        let whitening = Whitening::new(&matrices.overlap, DEFAULT_CUTOFF)?;
        Ok(Self {
            matrices,
            whitening,
            field_labels: [OnceLock::new(), OnceLock::new()],
        })
    }

    pub fn parity(&self) -> Parity {
        self.matrices.spec.parity
    }

    pub fn r0(&self) -> f64 {
        self.matrices.spec.r0
    }

    pub fn matrices(&self) -> &SectorMatrices {
        &self.matrices
    }

    pub fn solve(&self, lambda: f64) -> Result<EigenSolution> {
        self.whitening.solve(&self.matrices.hamiltonian(lambda))
    }

    /// Exact labels of a zero-field solution, in the order of its levels.
    pub fn zero_field_labels(&self, sol: &EigenSolution) -> Vec<StateLabel> {
        let parity = self.parity();
        let mut seen: Vec<usize> = Vec::new();
        (0..sol.len())
            .map(|k| {
                let row = dominant_index(sol.coefficients.column(k).iter().copied());
                let nu = self.matrices.basis[row].j;
                if seen.len() <= nu {
                    seen.resize(nu + 1, 0);
                }
                let n = seen[nu];
                seen[nu] += 1;
                StateLabel { parity, n, nu }
            })
            .collect()
    }

    /// Labels by rank for a field of the given sign.
    fn labels_for_field(&self, positive: bool) -> Result<Vec<StateLabel>> {
        let slot = &self.field_labels[usize::from(!positive)];
        if let Some(labels) = slot.get() {
            return Ok(labels.clone());
        }
        let zero = self.solve(0.0)?;
        let mut labels = self.zero_field_labels(&zero);
        let groups = detect_degeneracy(&zero.eigenvalues, DEGENERACY_REL_TOL);
        if groups.iter().any(|g| g.multiplicity > 1) {
            let step = if positive { LABEL_STEP } else { -LABEL_STEP };
            let split = self.solve(step)?;
            let zero_labels = labels.clone();
            for g in groups.iter().filter(|g| g.multiplicity > 1) {
                let members: Vec<usize> = (g.start..g.start + g.multiplicity).collect();
                let mut pairs = Vec::new();
                for &a in &members {
                    for &b in &members {
                        let o = s_overlap(
                            &self.matrices.overlap,
                            &zero.coefficients_dd,
                            a,
                            &split.coefficients_dd,
                            b,
                        );
                        pairs.push((o, a, b));
                    }
                }
                // Largest overlap first; ties fall back to index order.
                pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
                let mut used_a = vec![false; labels.len()];
                let mut used_b = vec![false; labels.len()];
                for (_, a, b) in pairs {
                    if !used_a[a] && !used_b[b] {
                        used_a[a] = true;
                        used_b[b] = true;
                        labels[b] = zero_labels[a];
                    }
                }
            }
        }
        let _ = slot.set(labels.clone());
        Ok(labels)
    }

    /// Every retained level at field `lambda`, ascending, with its label.
    pub fn labelled_levels(&self, lambda: f64) -> Result<Vec<LabelledLevel>> {
        let sol = self.solve(lambda)?;
        let labels = if lambda == 0.0 {
            self.zero_field_labels(&sol)
        } else {
            self.labels_for_field(lambda > 0.0)?
        };
        Ok(sol
            .eigenvalues
            .iter()
            .zip(labels)
            .map(|(&energy, label)| LabelledLevel { label, energy })
            .collect())
    }
}

/// Field-free radial solver for one `ν` on the unit disk, `H = K + β V`.
#[derive(Debug)]
pub struct RadialSolver {
    matrices: RadialMatrices,
    whitening: Whitening,
}

impl RadialSolver {
    pub fn new(nu: usize, size: usize) -> Result<Self> {
        let matrices = RadialMatrices::new(&RadialBasisSpec::new(nu, size)?);
        let whitening = Whitening::new(&matrices.overlap, DEFAULT_CUTOFF)?;
        Ok(Self {
            matrices,
            whitening,
        })
    }

    pub fn nu(&self) -> usize {
        self.matrices.spec.nu
    }

    /// Ascending energies `E_{nν}(β)`, n = 0, 1, ….
    pub fn energies(&self, beta: f64) -> Result<Vec<f64>> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(self
            .whitening
            .solve(&self.matrices.hamiltonian(beta))?
            .eigenvalues)
    }
}

/// Field-free radial levels for `ν = 0..=nu_max`, ascending. Each `ν > 0`
/// level appears twice, as the even and the odd member of its `±m` pair.
pub fn combined_radial_levels(beta: f64, size: usize, nu_max: usize) -> Result<Vec<LabelledLevel>> {
    let mut levels = Vec::new();
    for nu in 0..=nu_max {
        let energies = RadialSolver::new(nu, size)?.energies(beta)?;
        for (n, &energy) in energies.iter().enumerate() {
            for &parity in Parity::BOTH.iter().filter(|p| nu >= p.min_j()) {
                levels.push(LabelledLevel {
                    label: StateLabel { parity, n, nu },
                    energy,
                });
            }
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.label.cmp(&b.label)));
    Ok(levels)
}

fn lowest_labels(levels: &[LabelledLevel], k: usize) -> Result<Vec<StateLabel>> {
    if levels.len() < k {
        return Err(Error::Range(format!(
            "requested {k} levels but only {} are available",
            levels.len()
        )));
    }
    Ok(levels[..k].iter().map(|l| l.label).collect())
}

fn energy_of(levels: &[LabelledLevel], label: StateLabel) -> Result<f64> {
    levels
        .iter()
        .find(|l| l.label == label)
        .map(|l| l.energy)
        .ok_or_else(|| Error::Range(format!("level {label} is not among the retained states")))
}

/// Energies over `grid` for the `k` lowest labels of each requested sector.
///
/// * `lambda`: one solver per sector at `fixed.r0`; labels are fixed by the
///   zero-field ordering.
/// * `r0`: one solver per grid point. At zero field labels are exact at every
///   point; with a field the levels of a sector keep their order and carry
///   the labels of the first grid point.
/// * `beta`: field-free radial solves on the unit disk with basis size
///   `n_basis`; labels are exact.
pub fn sweep(
    parameter: SweepParameter,
    grid: &[f64],
    fixed: &ModelParams,
    sector: Sector,
    n_basis: usize,
    k: usize,
) -> Result<SweepResult> {
    if k == 0 {
        return Err(Error::Domain("at least one level must be tracked".into()));
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty sweep grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(
            "sweep grid must be finite and strictly ascending".into(),
        ));
    }
    let mut curves = Vec::new();
    for &parity in sector.parities() {
        let mut sector_curves = match parameter {
            SweepParameter::Lambda => sweep_lambda(parity, grid, fixed.r0, n_basis, k)?,
            SweepParameter::R0 => sweep_r0(parity, grid, fixed.lambda, n_basis, k)?,
            SweepParameter::Beta => sweep_beta(parity, grid, n_basis, k)?,
        };
        curves.append(&mut sector_curves);
    }
    let field = |x: f64| match parameter {
        SweepParameter::Lambda => x,
        SweepParameter::R0 => fixed.lambda,
        SweepParameter::Beta => 0.0,
    };
    let events = detect_events(grid, &curves, field);
    Ok(SweepResult {
        parameter,
        grid: grid.to_vec(),
        curves,
        events,
    })
}

fn transpose(labels: &[StateLabel], rows: Vec<Vec<f64>>) -> Vec<Curve> {
    labels
        .iter()
        .enumerate()
        .map(|(c, &label)| Curve {
            label,
            energies: rows.iter().map(|r| r[c]).collect(),
        })
        .collect()
}

fn sweep_lambda(
    parity: Parity,
    grid: &[f64],
    r0: f64,
    n_basis: usize,
    k: usize,
) -> Result<Vec<Curve>> {
    let solver = SectorSolver::new(parity, n_basis, r0)
        .map_err(|e| sweep_error(SweepParameter::Lambda, grid[0], e))?;
    let first = solver
        .labelled_levels(grid[0])
        .map_err(|e| sweep_error(SweepParameter::Lambda, grid[0], e))?;
    let labels = lowest_labels(&first, k)?;
    let rows = grid
        .par_iter()
        .map(|&lambda| {
            let levels = solver.labelled_levels(lambda)?;
            labels
                .iter()
                .map(|&l| energy_of(&levels, l))
                .collect::<Result<Vec<f64>>>()
        })
        .zip(grid.par_iter())
        .map(|(row, &x)| row.map_err(|e| sweep_error(SweepParameter::Lambda, x, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(&labels, rows))
}

fn sweep_r0(
    parity: Parity,
    grid: &[f64],
    lambda: f64,
    n_basis: usize,
    k: usize,
) -> Result<Vec<Curve>> {
    let levels: Vec<Vec<LabelledLevel>> = grid
        .par_iter()
        .map(|&r0| {
            let solver = SectorSolver::new(parity, n_basis, r0)?;
            if lambda == 0.0 || r0 == grid[0] {
                solver.labelled_levels(lambda)
            } else {
                // Only the order matters away from the first point.
                let sol = solver.solve(lambda)?;
                Ok(sol
                    .eigenvalues
                    .iter()
                    .map(|&energy| LabelledLevel {
                        label: StateLabel {
                            parity,
                            n: 0,
                            nu: 0,
                        },
                        energy,
                    })
                    .collect())
            }
        })
        .zip(grid.par_iter())
        .map(|(l, &x)| l.map_err(|e| sweep_error(SweepParameter::R0, x, e)))
        .collect::<Result<Vec<_>>>()?;
    let labels = lowest_labels(&levels[0], k)?;
    let rows = if lambda == 0.0 {
        levels
            .iter()
            .zip(grid)
            .map(|(lv, &x)| {
                labels
                    .iter()
                    .map(|&l| energy_of(lv, l))
                    .collect::<Result<Vec<f64>>>()
                    .map_err(|e| sweep_error(SweepParameter::R0, x, e))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        levels
            .iter()
            .zip(grid)
            .map(|(lv, &x)| {
                if lv.len() < k {
                    return Err(sweep_error(
                        SweepParameter::R0,
                        x,
                        Error::Range(format!("only {} levels retained, {k} requested", lv.len())),
                    ));
                }
                Ok(lv[..k].iter().map(|l| l.energy).collect())
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(transpose(&labels, rows))
}

fn sweep_beta(parity: Parity, grid: &[f64], size: usize, k: usize) -> Result<Vec<Curve>> {
    let err = |e| sweep_error(SweepParameter::Beta, grid[0], e);
    // The k lowest labels at the first point lie within ν < k + min_j.
    let nu_range: Vec<usize> = (parity.min_j()..parity.min_j() + k).collect();
    let solvers: Vec<RadialSolver> = nu_range
        .iter()
        .map(|&nu| RadialSolver::new(nu, size))
        .collect::<Result<_>>()
        .map_err(err)?;
    let mut first = Vec::new();
    for s in &solvers {
        for (n, &energy) in s.energies(grid[0]).map_err(err)?.iter().enumerate() {
            first.push(LabelledLevel {
                label: StateLabel {
                    parity,
                    n,
                    nu: s.nu(),
                },
                energy,
            });
        }
    }
    first.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.label.cmp(&b.label)));
    let labels = lowest_labels(&first, k)?;
    let rows = grid
        .par_iter()
        .map(|&beta| {
            let spectra: Vec<Vec<f64>> = solvers
                .iter()
                .map(|s| s.energies(beta))
                .collect::<Result<_>>()?;
            labels
                .iter()
                .map(|l| {
                    spectra[l.nu - parity.min_j()]
                        .get(l.n)
                        .copied()
                        .ok_or_else(|| Error::Range(format!("level {l} not retained")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .zip(grid.par_iter())
        .map(|(row, &x)| row.map_err(|e| sweep_error(SweepParameter::Beta, x, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(&labels, rows))
}

/// Whether two levels may cross exactly: different parity, or at zero field
/// different `ν`.
fn may_cross(a: StateLabel, b: StateLabel, field: f64) -> bool {
    a.parity != b.parity || (field == 0.0 && a.nu != b.nu)
}

fn touch_tol(e: f64) -> f64 {
    CURVE_TOUCH_TOL * e.abs().max(1.0)
}

fn detect_events(grid: &[f64], curves: &[Curve], field: impl Fn(f64) -> f64) -> Vec<Event> {
    let mut events = Vec::new();
    let m = grid.len();
    for (ia, a) in curves.iter().enumerate() {
        for b in &curves[ia + 1..] {
            let d: Vec<f64> = a
                .energies
                .iter()
                .zip(&b.energies)
                .map(|(x, y)| x - y)
                .collect();
            let sign = |i: usize| {
                if d[i].abs() <= touch_tol(a.energies[i]) {
                    0
                } else if d[i] > 0.0 {
                    1
                } else {
                    -1
                }
            };
            // Exact crossings between levels that may cross.
            for i in 0..m.saturating_sub(1) {
                if !may_cross(a.label, b.label, field(grid[i]))
                    || !may_cross(a.label, b.label, field(grid[i + 1]))
                {
                    continue;
                }
                let (si, sj) = (sign(i), sign(i + 1));
                let location = if si * sj == -1 {
                    let t = d[i] / (d[i] - d[i + 1]);
                    Some((grid[i] + t * (grid[i + 1] - grid[i]), t))
                } else if si == 0 && i > 0 && sign(i - 1) * sj == -1 {
                    Some((grid[i], 0.0))
                } else {
                    None
                };
                if let Some((x, t)) = location {
                    let ea = a.energies[i] + t * (a.energies[i + 1] - a.energies[i]);
                    let eb = b.energies[i] + t * (b.energies[i + 1] - b.energies[i]);
                    events.push(Event {
                        kind: EventKind::Crossing,
                        location: x,
                        labels: (a.label, b.label),
                        gap: 0.0,
                        energy: 0.5 * (ea + eb),
                    });
                }
            }
        }
    }
    // Avoided crossings between adjacent levels of one sector.
    let mut parities: Vec<Parity> = curves.iter().map(|c| c.label.parity).collect();
    parities.dedup();
    for parity in parities {
        let mut same: Vec<&Curve> = curves.iter().filter(|c| c.label.parity == parity).collect();
        if m < 3 || same.len() < 2 {
            continue;
        }
        let mid = m / 2;
        same.sort_by(|x, y| x.energies[mid].total_cmp(&y.energies[mid]));
        for pair in same.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let gap: Vec<f64> = a
                .energies
                .iter()
                .zip(&b.energies)
                .map(|(x, y)| (y - x).abs())
                .collect();
            for i in 1..m - 1 {
                if field(grid[i]) == 0.0 || may_cross(a.label, b.label, field(grid[i])) {
                    continue;
                }
                if !(gap[i] < gap[i - 1] && gap[i] <= gap[i + 1]) {
                    continue;
                }
                let left = gap[..i].iter().copied().fold(0.0, f64::max);
                let right = gap[i + 1..].iter().copied().fold(0.0, f64::max);
                if left.min(right) < AVOIDED_PROMINENCE * gap[i] {
                    continue;
                }
                let (x, g) = parabolic_min(
                    [grid[i - 1], grid[i], grid[i + 1]],
                    [gap[i - 1], gap[i], gap[i + 1]],
                );
                events.push(Event {
                    kind: EventKind::AvoidedCrossing,
                    location: x,
                    labels: (a.label, b.label),
                    gap: g,
                    energy: 0.5 * (a.energies[i] + b.energies[i]),
                });
            }
        }
    }
    events.sort_by(|x, y| x.location.total_cmp(&y.location));
    events
}

/// Vertex of the parabola through three points, kept within the outer two
/// and never below zero.
fn parabolic_min(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if !(curvature > 0.0) {
        return (x[1], y[1]);
    }
    // y = y1 + d1 (t - x1) + c (t - x0)(t - x1)
    let t = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curvature);
    let t = t.clamp(x[0], x[2]);
    let value = y[1] + d1 * (t - x[1]) + curvature * (t - x[0]) * (t - x[1]);
    if value >= 0.0 && value <= y[1] {
        (t, value)
    } else {
        (x[1], y[1])
    }
}

/// Energy of one labelled level at a parameter value.
pub fn labelled_energy(
    label: StateLabel,
    parameter: SweepParameter,
    value: f64,
    fixed: &ModelParams,
    n_basis: usize,
) -> Result<f64> {
    match parameter {
        SweepParameter::Beta => {
            if label.nu < label.parity.min_j() {
                return Err(Error::Domain(format!("invalid label {label}")));
            }
            RadialSolver::new(label.nu, n_basis)?
                .energies(value)?
                .get(label.n)
                .copied()
                .ok_or_else(|| Error::Range(format!("level {label} not retained")))
        }
        SweepParameter::Lambda => {
            let levels =
                SectorSolver::new(label.parity, n_basis, fixed.r0)?.labelled_levels(value)?;
            energy_of(&levels, label)
        }
        SweepParameter::R0 => {
            let levels =
                SectorSolver::new(label.parity, n_basis, value)?.labelled_levels(fixed.lambda)?;
            energy_of(&levels, label)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPoint {
    pub location: f64,
    /// Mean of the two energies at `location`.
    pub energy: f64,
    /// `E_a - E_b` at `location`.
    pub difference: f64,
}

/// Locate the exact crossing of two levels that may cross, by bisection of
/// `E_a - E_b` to `CROSSING_TOL` in the parameter.
pub fn find_crossing(
    a: StateLabel,
    b: StateLabel,
    parameter: SweepParameter,
    bracket: (f64, f64),
    fixed: &ModelParams,
    n_basis: usize,
) -> Result<CrossingPoint> {
    if a == b {
        return Err(Error::Domain(format!("a level cannot cross itself ({a})")));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let allowed = match parameter {
        SweepParameter::Beta => a.nu != b.nu,
        SweepParameter::Lambda => a.parity != b.parity,
        SweepParameter::R0 => may_cross(a, b, fixed.lambda),
    };
    if !allowed {
        return Err(Error::Domain(format!(
            "{a} and {b} share every symmetry over this {parameter} range and do not cross"
        )));
    }
    let diff = |x: f64| -> Result<(f64, f64)> {
        let ea = labelled_energy(a, parameter, x, fixed, n_basis)?;
        let eb = labelled_energy(b, parameter, x, fixed, n_basis)?;
        Ok((ea - eb, 0.5 * (ea + eb)))
    };
    let (mut d_lo, _) = diff(lo)?;
    let (d_hi, _) = diff(hi)?;
    let what = format!("E{a} - E{b}");
    if d_lo == 0.0 {
        return Ok(CrossingPoint {
            location: lo,
            energy: diff(lo)?.1,
            difference: 0.0,
        });
    }
    if d_hi == 0.0 {
        return Ok(CrossingPoint {
            location: hi,
            energy: diff(hi)?.1,
            difference: 0.0,
        });
    }
    if (d_lo < 0.0) == (d_hi < 0.0) {
        return Err(Error::Bracket { what, lo, hi });
    }
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (d_mid, _) = diff(mid)?;
        if d_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (d_mid < 0.0) == (d_lo < 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    let location = 0.5 * (lo + hi);
    let (difference, energy) = diff(location)?;
    Ok(CrossingPoint {
        location,
        energy,
        difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AvoidedCrossing {
    Found {
        location: f64,
        gap: f64,
    },
    /// The gap is smallest at an end of the interval.
    NoEvent {
        location: f64,
        gap: f64,
    },
}

/// Minimize the gap between two same-sector levels at nonzero field.
///
/// The levels are identified by their labels at the lower end of the
/// interval and followed in energy order, which they keep throughout.
pub fn find_avoided_crossing(
    a: StateLabel,
    b: StateLabel,
    parameter: SweepParameter,
    interval: (f64, f64),
    fixed: &ModelParams,
    n_basis: usize,
) -> Result<AvoidedCrossing> {
    if a == b {
        return Err(Error::Domain(format!("identical labels {a}")));
    }
    if a.parity != b.parity {
        return Err(Error::Domain(format!(
            "{a} and {b} lie in different sectors and may cross exactly"
        )));
    }
    let (lo, hi) = interval;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
    }
    match parameter {
        SweepParameter::Beta => {
            return Err(Error::Domain(
                "the radial problem has no field; its levels may cross exactly".into(),
            ))
        }
        SweepParameter::R0 if fixed.lambda == 0.0 => {
            return Err(Error::Domain(
                "at zero field levels of different nu may cross exactly".into(),
            ))
        }
        SweepParameter::Lambda if lo <= 0.0 && hi >= 0.0 => {
            return Err(Error::Domain(
                "the field interval must not contain zero".into(),
            ))
        }
        _ => {}
    }
    let solver_at = |x: f64| match parameter {
        SweepParameter::R0 => SectorSolver::new(a.parity, n_basis, x),
        _ => SectorSolver::new(a.parity, n_basis, fixed.r0),
    };
    let lambda_at = |x: f64| {
        if parameter == SweepParameter::Lambda {
            x
        } else {
            fixed.lambda
        }
    };
    let start = solver_at(lo)?.labelled_levels(lambda_at(lo))?;
    let rank = |l: StateLabel| {
        start
            .iter()
            .position(|x| x.label == l)
            .ok_or_else(|| Error::Range(format!("level {l} not retained at {parameter} = {lo}")))
    };
    let (ra, rb) = (rank(a)?, rank(b)?);
    let gap = |x: f64| -> Result<f64> {
        let e = solver_at(x)?.solve(lambda_at(x))?.eigenvalues;
        let top = ra.max(rb);
        if e.len() <= top {
            return Err(Error::Range(format!(
                "level rank {top} not retained at {parameter} = {x}"
            )));
        }
        Ok((e[rb] - e[ra]).abs())
    };

    let step = (hi - lo) / (AVOIDED_SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..AVOIDED_SCAN_POINTS)
        .map(|i| lo + step * i as f64)
        .collect();
    let gs: Vec<f64> = xs.par_iter().map(|&x| gap(x)).collect::<Result<_>>()?;
    let best = (0..gs.len())
        .min_by(|&i, &j| gs[i].total_cmp(&gs[j]))
        .unwrap_or(0);
    if best == 0 || best == gs.len() - 1 {
        return Ok(AvoidedCrossing::NoEvent {
            location: xs[best],
            gap: gs[best],
        });
    }

    // Golden-section search on the bracketing scan cell.
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut l, mut r) = (xs[best - 1], xs[best + 1]);
    let mut c = r - inv_phi * (r - l);
    let mut d = l + inv_phi * (r - l);
    let (mut gc, mut gd) = (gap(c)?, gap(d)?);
    while r - l > CROSSING_TOL * hi.abs().max(1.0) {
        if gc < gd {
            r = d;
            d = c;
            gd = gc;
            c = r - inv_phi * (r - l);
            gc = gap(c)?;
        } else {
            l = c;
            c = d;
            gc = gd;
            d = l + inv_phi * (r - l);
            gd = gap(d)?;
        }
    }
    let location = 0.5 * (l + r);
    let g = gap(location)?;
    if !(g > 0.0) {
        return Err(Error::Numerical(format!(
            "{a} and {b} touch at {parameter} = {location}"
        )));
    }
    Ok(AvoidedCrossing::Found { location, gap: g })
}

/// `max |E(λ) - E(-λ)|` over the `k` lowest levels of each requested sector.
pub fn check_lambda_parity(
    r0: f64,
    lambda: f64,
    sector: Sector,
    n_basis: usize,
    k: usize,
) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for &parity in sector.parities() {
        let solver = SectorSolver::new(parity, n_basis, r0)?;
        let plus = solver.solve(lambda)?.eigenvalues;
        let minus = solver.solve(-lambda)?.eigenvalues;
        if plus.len() < k || minus.len() < k {
            return Err(Error::Range(format!("fewer than {k} levels retained")));
        }
        for (p, m) in plus.iter().zip(&minus).take(k) {
            worst = worst.max((p - m).abs());
        }
    }
    Ok(worst)
}

/// `E^(odd)_{01}(λ) - E^(even)_{01}(λ)` for each field in the grid.
pub fn stark_splitting(r0: f64, lambda_grid: &[f64], n_basis: usize) -> Result<Vec<f64>> {
    let even = SectorSolver::new(Parity::Even, n_basis, r0)?;
    let odd = SectorSolver::new(Parity::Odd, n_basis, r0)?;
    let e_label = StateLabel {
        parity: Parity::Even,
        n: 0,
        nu: 1,
    };
    let o_label = StateLabel {
        parity: Parity::Odd,
        n: 0,
        nu: 1,
    };
    lambda_grid
        .par_iter()
        .map(|&lambda| {
            let e = energy_of(&even.labelled_levels(lambda)?, e_label)?;
            let o = energy_of(&odd.labelled_levels(lambda)?, o_label)?;
            Ok(o - e)
        })
        .zip(lambda_grid.par_iter())
        .map(|(r, &x)| r.map_err(|e| sweep_error(SweepParameter::Lambda, x, e)))
        .collect()
}

/// Evenly spaced grid from `lo` to `hi` inclusive; `step` is rounded so that
/// it divides the span.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(Error::Domain(format!(
            "invalid grid {lo}..{hi} step {step}"
        )));
    }
    let count = ((hi - lo) / step).round() as usize;
    if count == 0 {
        return Ok(vec![lo]);
    }
    Ok((0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect())
}

/// Parameters of the data behind one of the four standard figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSetup {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub fixed: ModelParams,
    pub sector: Sector,
    pub n_basis: usize,
    pub levels: usize,
}

/// 1: radial levels against β. 2: lowest levels against λ at `r0 = 3/4`.
/// 3 and 4: even and odd levels against `r0` at `λ = 1`.
pub fn figure_setup(figure: u8) -> Result<FigureSetup> {
    let setup = match figure {
        1 => FigureSetup {
            parameter: SweepParameter::Beta,
            grid: uniform_grid(0.0, 1.0, 0.01)?,
            fixed: ModelParams {
                r0: 1.0,
                lambda: 0.0,
            },
            sector: Sector::Even,
            n_basis: 20,
            levels: 6,
        },
        2 => FigureSetup {
            parameter: SweepParameter::Lambda,
            grid: uniform_grid(0.0, 2.0, 0.02)?,
            fixed: ModelParams {
                r0: 0.75,
                lambda: 0.0,
            },
            sector: Sector::Both,
            n_basis: 12,
            levels: 4,
        },
        3 | 4 => FigureSetup {
            parameter: SweepParameter::R0,
            grid: uniform_grid(0.25, 6.0, 0.05)?,
            fixed: ModelParams {
                r0: 0.25,
                lambda: 1.0,
            },
            sector: if figure == 3 {
                Sector::Even
            } else {
                Sector::Odd
            },
            n_basis: 12,
            levels: 6,
        },
        _ => {
            return Err(Error::Domain(format!(
                "unknown figure {figure} (expected 1 to 4)"
            )))
        }
    };
    Ok(setup)
}

pub fn figure_sweep(figure: u8) -> Result<SweepResult> {
    let s = figure_setup(figure)?;
    sweep(
        s.parameter,
        &s.grid,
        &s.fixed,
        s.sector,
        s.n_basis,
        s.levels,
    )
}
