//! Verification suites and table drivers shared by the command-line tool
//! and the acceptance tests. Randomness stays with the caller: every suite
//! takes its parameter draws as input.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::appendix::{verify_conjecture, verify_fund_exp};
use crate::bethe::{
    classify, reconstruction_error, with_solved_theta_plus, Branch, Classification, FitConfig, SectorConfig, TableRow,
};
use crate::boundary::{check_bybe, BoundaryParams};
use crate::fusion::{check_ybe, unitarity_residual, SpinLabel};
use crate::linalg::{c, C64};
use crate::spin1::{calibrate_sector_constant, energy_root_part, hamiltonian_explicit, level_energy_direct};
use crate::transfer::{
    check_asymptotic, check_crossing, check_fusion_hierarchy, check_initial, check_periodicity, check_semiclassical,
    commutator_residual, lambda_of, spectrum, ChainSpec, SpectrumConfig, SpectrumLevel,
};
use crate::{Error, Result};

/// One named check with its measured residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Named tolerances, overridable by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub ybe: f64,
    pub bybe: f64,
    pub unitarity: f64,
    pub commutativity: f64,
    pub hierarchy: f64,
    pub periodicity: f64,
    pub crossing: f64,
    pub initial: f64,
    pub semiclassical: f64,
    pub asymptotic: f64,
    pub fund_exp: f64,
    pub conjecture: f64,
    pub conjecture_ls: f64,
    pub reconstruction: f64,
    pub bae: f64,
    pub energy: f64,
    pub hamiltonian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ybe: 1e-12,
            bybe: 1e-12,
            unitarity: 1e-12,
            commutativity: 1e-11,
            hierarchy: 1e-9,
            periodicity: 1e-10,
            crossing: 1e-10,
            initial: 1e-10,
            semiclassical: 1e-12,
            asymptotic: 1e-8,
            fund_exp: 1e-12,
            conjecture: 1e-13,
            conjecture_ls: 1e-10,
            reconstruction: 1e-8,
            bae: 1e-10,
            energy: 1e-7,
            hamiltonian: 1e-7,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 17] = [
        "ybe",
        "bybe",
        "unitarity",
        "commutativity",
        "hierarchy",
        "periodicity",
        "crossing",
        "initial",
        "semiclassical",
        "asymptotic",
        "fund_exp",
        "conjecture",
        "conjecture_ls",
        "reconstruction",
        "bae",
        "energy",
        "hamiltonian",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "ybe" => &mut self.ybe,
            "bybe" => &mut self.bybe,
            "unitarity" => &mut self.unitarity,
            "commutativity" => &mut self.commutativity,
            "hierarchy" => &mut self.hierarchy,
            "periodicity" => &mut self.periodicity,
            "crossing" => &mut self.crossing,
            "initial" => &mut self.initial,
            "semiclassical" => &mut self.semiclassical,
            "asymptotic" => &mut self.asymptotic,
            "fund_exp" => &mut self.fund_exp,
            "conjecture" => &mut self.conjecture,
            "conjecture_ls" => &mut self.conjecture_ls,
            "reconstruction" => &mut self.reconstruction,
            "bae" => &mut self.bae,
            "energy" => &mut self.energy,
            "hamiltonian" => &mut self.hamiltonian,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|x| *x)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument("tolerances must be positive and finite"));
        }
        match self.slot(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument("unknown tolerance name")),
        }
    }
}

/// One random point in parameter space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Draw {
    pub eta: C64,
    pub boundary: BoundaryParams,
    pub u: C64,
    pub v: C64,
}

pub fn spin_label(s: SpinLabel) -> String {
    if s.twice() % 2 == 0 {
        format!("{}", s.twice() / 2)
    } else {
        format!("{}/2", s.twice())
    }
}

// Collects the worst residual per check name, in first-seen order.
struct Worst {
    checks: Vec<Check>,
}

impl Worst {
    fn new() -> Self {
        Worst { checks: Vec::new() }
    }

    fn push(&mut self, name: String, residual: f64, tolerance: f64) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.residual = c.residual.max(residual),
            None => self.checks.push(Check {
                name,
                residual,
                tolerance,
            }),
        }
    }

    fn push_result(&mut self, name: String, r: Result<f64>, tolerance: f64) {
        self.push(name, r.unwrap_or(f64::INFINITY), tolerance);
    }
}

const HALF: SpinLabel = SpinLabel::HALF;
const ONE: SpinLabel = SpinLabel::ONE;
const THREE_HALVES: SpinLabel = SpinLabel::THREE_HALVES;

/// Yang–Baxter, reflection, unitarity, commutativity and fusion hierarchy,
/// each reported as the worst residual over `draws`. Chain checks use
/// `n_sites` sites.
pub fn identity_suite(draws: &[Draw], n_sites: usize, tol: &Tolerances) -> Vec<Check> {
    let mut w = Worst::new();
    let triples = [(HALF, HALF, HALF), (HALF, HALF, ONE), (HALF, ONE, ONE), (ONE, HALF, HALF)];
    for d in draws {
        for (j, k, s) in triples {
            let name = format!("ybe({},{},{})", spin_label(j), spin_label(k), spin_label(s));
            w.push(name, check_ybe(j, k, s, d.u, d.v, d.eta), tol.ybe);
        }
        for (j, s) in [(HALF, HALF), (HALF, ONE), (ONE, ONE)] {
            let name = format!("bybe({},{})", spin_label(j), spin_label(s));
            w.push(name, check_bybe(j, s, d.u, d.v, d.eta, &d.boundary), tol.bybe);
        }
        w.push("unitarity".into(), unitarity_residual(d.u, d.eta), tol.unitarity);
        for s in [HALF, ONE] {
            let spec = match ChainSpec::new(n_sites, s, d.eta, d.boundary) {
                Ok(spec) => spec,
                Err(_) => continue,
            };
            for jp in [HALF, ONE] {
                let name = format!("commutativity(s={},j'={})", spin_label(s), spin_label(jp));
                w.push_result(name, commutator_residual(&spec, HALF, d.u, jp, d.v), tol.commutativity);
            }
            for j in [ONE, THREE_HALVES] {
                let name = format!("hierarchy(j={},s={})", spin_label(j), spin_label(s));
                w.push_result(name, check_fusion_hierarchy(&spec, j, d.u), tol.hierarchy);
            }
        }
    }
    w.checks
}

/// Rescaled-transfer-matrix properties for `s ∈ {1/2, 1, 3/2}`.
pub fn property_suite(draws: &[Draw], n_sites: usize, tol: &Tolerances) -> Vec<Check> {
    let mut w = Worst::new();
    for d in draws {
        for s in [HALF, ONE, THREE_HALVES] {
            let spec = match ChainSpec::new(n_sites, s, d.eta, d.boundary) {
                Ok(spec) => spec,
                Err(_) => continue,
            };
            let l = spin_label(s);
            w.push_result(format!("periodicity(s={l})"), check_periodicity(&spec, d.u), tol.periodicity);
            w.push_result(format!("crossing(s={l})"), check_crossing(&spec, d.u), tol.crossing);
            w.push_result(format!("initial(s={l})"), check_initial(&spec), tol.initial);
            w.push_result(format!("semiclassical(s={l})"), check_semiclassical(&spec, d.u), tol.semiclassical);
            w.push_result(format!("asymptotic(s={l})"), check_asymptotic(&spec, 12.0), tol.asymptotic);
        }
    }
    w.checks
}

/// Symmetrizer expansion for `n = 1..=6`, the explicit projector relations
/// for `j = 3/2, 2, 5/2`, and least-squares existence at `j = 3`.
pub fn appendix_suite(tol: &Tolerances) -> Vec<Check> {
    let mut w = Worst::new();
    for n in 1..=6 {
        w.push_result(format!("fund_exp(n={n})"), verify_fund_exp(n), tol.fund_exp);
    }
    for twice in [3, 4, 5] {
        let j = SpinLabel::from_twice(twice);
        w.push_result(format!("conjecture(j={})", spin_label(j)), verify_conjecture(j), tol.conjecture);
    }
    w.push_result("conjecture_ls(j=3)".into(), verify_conjecture(SpinLabel::from_twice(6)), tol.conjecture_ls);
    w.checks
}

/// Everything needed to inspect one classified table row.
#[derive(Clone, Debug)]
pub struct RowOutcome {
    pub spec: ChainSpec,
    pub levels: Vec<SpectrumLevel>,
    pub classification: Classification,
}

impl RowOutcome {
    pub fn row(&self) -> TableRow {
        self.classification.row
    }
}

/// Solves the constraint for `θ₊` at the given `k`, then diagonalizes and
/// classifies every level.
pub fn table_row(
    n_sites: usize,
    spin: SpinLabel,
    eta: C64,
    params: &BoundaryParams,
    base: &SectorConfig,
    cfg: &FitConfig,
) -> Result<RowOutcome> {
    let boundary = with_solved_theta_plus(params, base, eta);
    let spec = ChainSpec::new(n_sites, spin, eta, boundary)?;
    classify_spec(spec, base, cfg)
}

/// Diagonalizes and classifies with the boundary parameters as given.
pub fn classify_spec(spec: ChainSpec, base: &SectorConfig, cfg: &FitConfig) -> Result<RowOutcome> {
    let levels = spectrum(&spec, &SpectrumConfig::default())?;
    let classification = classify(&spec, &levels, base, cfg)?;
    Ok(RowOutcome {
        spec,
        levels,
        classification,
    })
}

/// Ten points away from the fit grid and from the singular lines.
pub fn held_out_points() -> Vec<C64> {
    (0..10).map(|i| c(0.21 + 0.07 * i as f64, -0.13 + 0.05 * i as f64)).collect()
}

/// Worst T–Q reconstruction error and worst Bethe-equation residual over
/// every accepted solution.
pub fn solution_quality(outcome: &RowOutcome) -> Result<(f64, f64)> {
    let points = held_out_points();
    let (mut rec, mut bae) = (0f64, 0f64);
    for fits in &outcome.classification.levels {
        let level = &outcome.levels[fits.level_index];
        for sol in [fits.minus.as_ref(), fits.plus.as_ref()].into_iter().flatten() {
            let e = reconstruction_error(&outcome.spec, sol, &points, |u| lambda_of(&outcome.spec, level, u))?;
            rec = rec.max(e);
            bae = bae.max(sol.bae_residual);
        }
    }
    Ok((rec, bae))
}

/// One spin-1 level with its energies.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub level_index: usize,
    pub branch: Branch,
    pub e_direct: C64,
    pub e_bethe: C64,
    /// Sorted `ṽ_j` in canonical form.
    pub roots: Vec<C64>,
}

/// Energies of all classified spin-1 levels.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    /// Sorted ascending by `Re E_direct`.
    pub rows: Vec<EnergyRow>,
    pub c_minus: Option<C64>,
    pub c_plus: Option<C64>,
}

impl EnergyTable {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.e_bethe - r.e_direct).norm())
            .fold(0.0, f64::max)
    }

    pub fn sector_constant(&self, b: Branch) -> Option<C64> {
        match b {
            Branch::Minus => self.c_minus,
            Branch::Plus => self.c_plus,
        }
    }
}

/// Energies for every classified level. `c^{(±)}` is calibrated on the
/// lowest-index level of each sector and reused for the rest; levels that
/// fit both sectors appear once per sector.
pub fn energy_table(outcome: &RowOutcome) -> Result<EnergyTable> {
    let spec = &outcome.spec;
    let h = hamiltonian_explicit(spec)?;
    let mut rows = Vec::new();
    let (mut c_minus, mut c_plus) = (None, None);
    for fits in &outcome.classification.levels {
        let e_direct = level_energy_direct(spec, &h, &outcome.levels[fits.level_index]);
        for sol in [fits.minus.as_ref(), fits.plus.as_ref()].into_iter().flatten() {
            let slot = match sol.sector.branch {
                Branch::Minus => &mut c_minus,
                Branch::Plus => &mut c_plus,
            };
            let constant = match *slot {
                Some(c) => c,
                None => *slot.insert(calibrate_sector_constant(spec, sol, e_direct)?),
            };
            rows.push(EnergyRow {
                level_index: fits.level_index,
                branch: sol.sector.branch,
                e_direct,
                e_bethe: energy_root_part(spec, &sol.roots_v)? + constant,
                roots: sol.roots_vtilde(spec.eta),
            });
        }
    }
    rows.sort_by(|a, b| a.e_direct.re.total_cmp(&b.e_direct.re).then(a.level_index.cmp(&b.level_index)));
    Ok(EnergyTable { rows, c_minus, c_plus })
}
