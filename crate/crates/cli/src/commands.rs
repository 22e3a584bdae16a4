use openxxz_core::bethe::{allowed_k, m_count, Branch, FitConfig, SectorConfig};
use openxxz_core::boundary::BoundaryParams;
use openxxz_core::fusion::SpinLabel;
use openxxz_core::suite::{
    appendix_suite, classify_spec, energy_table, identity_suite, property_suite, spin_label, Check, Draw,
};
use openxxz_core::transfer::{lambda_of, spectrum};
use openxxz_core::{c, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{Cell, Report};

fn complex_in(r: &mut ChaCha8Rng, re: f64, im: f64) -> C64 {
    c(r.gen_range(-re..re), r.gen_range(-im..im))
}

/// `count` random parameter points from `seed`. The anisotropy keeps its
/// imaginary part away from 0 and iπ/2.
pub fn random_draws(seed: u64, count: usize) -> Vec<Draw> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let eta = c(r.gen_range(-0.3..0.3), r.gen_range(0.2..1.2));
            let mut p = || complex_in(&mut r, 0.5, 1.5);
            let boundary = BoundaryParams {
                alpha_minus: p(),
                beta_minus: p(),
                theta_minus: p(),
                alpha_plus: p(),
                beta_plus: p(),
                theta_plus: p(),
            };
            Draw {
                eta,
                boundary,
                u: complex_in(&mut r, 0.6, 0.6),
                v: complex_in(&mut r, 0.6, 0.6),
            }
        })
        .collect()
}

// Worst residual per check name, keeping first-seen order.
fn merge_worst(into: &mut Vec<Check>, checks: Vec<Check>) {
    for ch in checks {
        match into.iter_mut().find(|x| x.name == ch.name) {
            Some(x) => x.residual = x.residual.max(ch.residual),
            None => into.push(ch),
        }
    }
}

/// Identity, property and appendix suites. The configured chain is the
/// first parameter point, followed by `draws` seeded random ones.
pub fn cmd_verify(cfg: &RunConfig, appendix_only: bool) -> Result<Report, String> {
    let mut report = Report::new(&["check", "residual", "tolerance", "passed"]);
    report.meta("seed", cfg.seed as i64);
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    if !appendix_only {
        report.meta("draws", cfg.draws);
        report.meta("n", cfg.n_sites);
        let mut draws = vec![Draw {
            eta: cfg.eta,
            boundary: cfg.chain()?.boundary,
            u: c(0.31, 0.17),
            v: c(-0.22, 0.41),
        }];
        draws.extend(random_draws(cfg.seed, cfg.draws));
        let per_draw: Vec<(Vec<Check>, Vec<Check>)> = draws
            .par_iter()
            .map(|d| {
                let one = std::slice::from_ref(d);
                (identity_suite(one, cfg.n_sites, tol), property_suite(one, cfg.n_sites, tol))
            })
            .collect();
        let (mut identities, mut properties) = (Vec::new(), Vec::new());
        for (i, p) in per_draw {
            merge_worst(&mut identities, i);
            merge_worst(&mut properties, p);
        }
        checks.extend(identities);
        checks.extend(properties);
    }
    checks.extend(appendix_suite(tol));
    for ch in &checks {
        report.ok &= ch.passed();
        report.push(vec![
            ch.name.as_str().into(),
            ch.residual.into(),
            ch.tolerance.into(),
            ch.passed().into(),
        ]);
    }
    Ok(report)
}

fn chain_meta(report: &mut Report, cfg: &RunConfig) {
    report.meta("n", cfg.n_sites);
    report.meta("spin", spin_label(cfg.spin));
    report.meta("eta", cfg.eta);
}

/// Eigenvalues of the rescaled fundamental transfer matrix at `u0`.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report, String> {
    let spec = cfg.chain()?;
    let levels = spectrum(&spec, &cfg.spectrum_config()).map_err(|e| e.to_string())?;
    let mut report = Report::new(&["index", "lambda", "degenerate"]);
    chain_meta(&mut report, cfg);
    report.meta("u0", cfg.u0);
    report.meta("dim", spec.quantum_dim());
    for l in &levels {
        let lambda = lambda_of(&spec, l, cfg.u0).map_err(|e| e.to_string())?;
        report.push(vec![l.index.into(), lambda.into(), l.degenerate_flag.into()]);
    }
    Ok(report)
}

fn fit_config(cfg: &RunConfig) -> FitConfig {
    FitConfig {
        fit_tol: cfg.fit_tol,
        ..FitConfig::default()
    }
}

/// Sector counts per `k`. Rows whose constraint cannot be met are skipped
/// with a note; the report fails on skipped rows and on levels that fit
/// both sectors or neither.
pub fn cmd_classify(cfg: &RunConfig, ks: Option<&[i64]>) -> Result<Report, String> {
    let probe = cfg.chain_with(cfg.boundary)?;
    let ks: Vec<i64> = match ks {
        Some(ks) => ks.to_vec(),
        None => allowed_k(&probe),
    };
    for &k in &ks {
        m_count(&probe, &SectorConfig { k, ..cfg.sector })
            .map_err(|e| format!("k = {k} violates the parity rule: {e}"))?;
    }
    let fit = fit_config(cfg);
    let results: Vec<Result<_, String>> = ks
        .par_iter()
        .map(|&k| {
            let spec = cfg.chain_with(cfg.boundary_for(k)?)?;
            classify_spec(spec, &SectorConfig { k, ..cfg.sector }, &fit)
                .map(|o| o.row())
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut report = Report::new(&["k", "count_minus", "count_plus", "dual_fit_count", "no_fit_count"]);
    chain_meta(&mut report, cfg);
    if let Some(p) = cfg.solve {
        report.meta("solved", p.key());
    }
    for (k, r) in ks.iter().zip(results) {
        match r {
            Ok(row) => {
                report.ok &= row.dual == 0 && row.unclassified == 0;
                report.push(vec![
                    row.k.into(),
                    row.count_minus.into(),
                    row.count_plus.into(),
                    row.dual.into(),
                    row.unclassified.into(),
                ]);
            }
            Err(e) => {
                report.ok = false;
                report.notes.push(format!("k = {k} skipped: {e}"));
            }
        }
    }
    Ok(report)
}

/// Spin-1 energies per level from the Hamiltonian and from the Bethe roots.
pub fn cmd_energies(cfg: &RunConfig) -> Result<Report, String> {
    if cfg.spin != SpinLabel::ONE {
        return Err(format!("energies need spin = 1, got {}", spin_label(cfg.spin)));
    }
    let spec = cfg.chain()?;
    let outcome = classify_spec(spec, &cfg.sector, &fit_config(cfg)).map_err(|e| e.to_string())?;
    let table = energy_table(&outcome).map_err(|e| e.to_string())?;

    let mut report = Report::new(&["level", "sector", "m", "e_direct", "e_bethe", "deviation", "roots"]);
    chain_meta(&mut report, cfg);
    report.meta("k", cfg.sector.k);
    if let Some(cm) = table.c_minus {
        report.meta("c_minus", cm);
    }
    if let Some(cp) = table.c_plus {
        report.meta("c_plus", cp);
    }
    let row = outcome.row();
    if row.unclassified > 0 {
        report.ok = false;
        report.notes.push(format!("{} levels fit neither sector", row.unclassified));
    }
    for r in &table.rows {
        let deviation = (r.e_bethe - r.e_direct).norm();
        report.ok &= deviation <= cfg.tolerances.energy;
        let sector = match r.branch {
            Branch::Minus => "-",
            Branch::Plus => "+",
        };
        report.push(vec![
            r.level_index.into(),
            sector.into(),
            r.roots.len().into(),
            r.e_direct.into(),
            r.e_bethe.into(),
            deviation.into(),
            Cell::ComplexList(r.roots.clone()),
        ]);
    }
    Ok(report)
}
