//! Subcommand implementations.

use crate::config::{FilterSpec, PumpSpec, RunConfig};
use crate::error::CliError;
use crate::output::{sig9, write_json_document, Manifest, Table};
use heraldsim::defaults::COHERENCE_TIME_DEFINITION;
use heraldsim::{
    choose_t, kappa_for_target_h, scan_b, tradeoff_curve, unfiltered_reference, FilterParams,
    FreqGrid, Heralding, SourceParams, TradeoffCurve,
};
use std::path::PathBuf;

fn base_manifest(cfg: &RunConfig, command: &str) -> Manifest {
    let mut m = Manifest::default();
    m.push("tool", "heraldsim");
    m.push("command", command);
    m.push("preset", cfg.preset.unwrap_or("none"));
    m.push_sig9("source.mu_s", cfg.mu_s);
    m.push_sig9("source.mu_i", cfg.mu_i);
    m.push_sig9("source.eta", cfg.eta);
    if let Some(s) = cfg.sigma_hz {
        m.push_sig9("source.sigma_hz", s);
    }
    m.push("numerics.nodes", cfg.numerics.nodes);
    m.push_sig9("numerics.window", cfg.numerics.window);
    m.push("numerics.tol", format!("{:e}", cfg.numerics.tol));
    m.push("numerics.m_cap", cfg.numerics.m_cap);
    m.push("units", "frequencies in sigma, times in 1/sigma");
    m.push("coherence_time_definition", COHERENCE_TIME_DEFINITION);
    m.push(
        "prolate_sign_convention",
        "positive at the smallest positive node",
    );
    m
}

fn manifest_filter(m: &mut Manifest, b: f64, t: f64, unfiltered: bool) {
    m.push_sig9("filter.b", b);
    m.push_sig9("filter.t", t);
    m.push("filter.unfiltered", unfiltered);
}

/// Resolve the filter block into an analyzed configuration. AutoT picks T
/// by the weak-pump protocol; Unfiltered builds the reference setup.
fn resolve_heralding(
    cfg: &RunConfig,
    source: &SourceParams,
    manifest: &mut Manifest,
) -> Result<Heralding, CliError> {
    match cfg.filter {
        FilterSpec::Fixed { b, t } => {
            let filter = FilterParams::new(b, t)?;
            manifest_filter(manifest, b, t, false);
            Ok(Heralding::new(source, &filter, &cfg.numerics)?)
        }
        FilterSpec::AutoT { b } => {
            let chosen = choose_t(source, b, &cfg.grids.t_grid, cfg.h_floor, &cfg.numerics)?;
            manifest_filter(manifest, b, chosen.t_star, false);
            manifest.push_sig9("filter.h_floor", cfg.h_floor);
            Ok(chosen.heralding)
        }
        FilterSpec::Unfiltered => {
            let h = heraldsim::optimizer::unfiltered_heralding(source, &cfg.numerics)?;
            manifest_filter(
                manifest,
                h.basis().filter().b(),
                h.basis().filter().t(),
                true,
            );
            Ok(h)
        }
        FilterSpec::Unset => Err(CliError::config(
            "missing filter block: set filter.b and filter.t, t=auto, or use an \
             unfiltered preset"
                .into(),
        )),
    }
}

/// `report`: full heralding analysis at one pump strength, JSON output.
pub fn cmd_report(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut manifest = base_manifest(cfg, "report");
    let source = cfg.source(0.0)?;
    let heralding = resolve_heralding(cfg, &source, &mut manifest)?;
    let kappa = match cfg.pump {
        PumpSpec::KappaL(k) => {
            manifest.push_sig9("pump.kappa_l", k);
            k
        }
        PumpSpec::TargetH(target) => {
            let k = kappa_for_target_h(
                target,
                heralding.lambda0(),
                heralding.ps1(),
                heralding.ps2(),
            )?;
            manifest.push_sig9("pump.target_h", target);
            manifest.push_sig9("pump.kappa_l", k);
            k
        }
        PumpSpec::Unset => {
            return Err(CliError::config(
                "report needs exactly one of source.kappa_l / source.target_h".into(),
            ))
        }
    };
    let report = heralding.report(kappa)?;
    let body = serde_json::to_value(&report)
        .map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;

    let mut extra = Vec::new();
    if let Some(sigma_hz) = cfg.sigma_hz {
        // SI-scaled convenience block appended next to the canonical
        // sigma-unit values (rates scale by sigma, times by 1/sigma).
        let mut si = serde_json::Map::new();
        let mut put = |k: &str, v: f64| {
            si.insert(k.into(), serde_json::Value::String(sig9(v)));
        };
        put("sigma_hz", sigma_hz);
        put("r_hz", report.r * sigma_hz);
        put("r_weak_hz", report.r_weak * sigma_hz);
        put("t_min_s", report.t_min / sigma_hz);
        put("tau_p_s", report.tau_p / sigma_hz);
        put("tau_s_s", report.tau_s / sigma_hz);
        put("tau_0_s", report.tau_0 / sigma_hz);
        put("b_hz", report.config.b * sigma_hz);
        put("t_s", report.config.t / sigma_hz);
        extra.push(("si".to_string(), serde_json::Value::Object(si)));
    }
    let path = cfg.out_dir.join("report.json");
    write_json_document(&path, &manifest, "report", body, extra)?;
    Ok(vec![path])
}

fn curve_table(cfg: &RunConfig, curve: &TradeoffCurve) -> Table {
    let si = cfg.sigma_hz;
    let mut table = if si.is_some() {
        Table::new(&["kappa_L", "R_sigma_units", "H", "R_hz"])
    } else {
        Table::new(&["kappa_L", "R_sigma_units", "H"])
    };
    for p in &curve.points {
        let mut row = vec![p.kappa_l, p.r, p.h];
        if let Some(s) = si {
            row.push(p.r * s);
        }
        table.rows.push(row);
    }
    table
}

/// `curve`: H versus R over the pump-strength grid, CSV/JSON output.
pub fn cmd_curve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut manifest = base_manifest(cfg, "curve");
    let source = cfg.source(0.0)?;
    let curve = match cfg.filter {
        FilterSpec::Fixed { b, t } => {
            manifest_filter(&mut manifest, b, t, false);
            tradeoff_curve(&source, b, t, &cfg.grids.kappa_grid, &cfg.numerics)?
        }
        FilterSpec::Unfiltered => {
            let c = unfiltered_reference(&source, &cfg.grids.kappa_grid, &cfg.numerics)?;
            manifest_filter(&mut manifest, c.config.b, c.config.t, true);
            c
        }
        FilterSpec::AutoT { .. } | FilterSpec::Unset => {
            let heralding = resolve_heralding(cfg, &source, &mut manifest)?;
            let filter = *heralding.basis().filter();
            tradeoff_curve(
                &source,
                filter.b(),
                filter.t(),
                &cfg.grids.kappa_grid,
                &cfg.numerics,
            )?
        }
    };
    manifest.push_sig9("lambda0", curve.config.lambda0);
    manifest.push_sig9("t_min", curve.config.t_min);
    manifest.push(
        "kappa_grid",
        format!(
            "log,{},{},{}",
            sig9(cfg.grids.kappa_grid[0]),
            sig9(*cfg.grids.kappa_grid.last().unwrap()),
            cfg.grids.kappa_grid.len()
        ),
    );
    let table = curve_table(cfg, &curve);
    let path = table.write(&cfg.out_dir, "curve", cfg.format, &manifest)?;
    Ok(vec![path])
}

/// `scan-b`: the two-stage optimization over the bandwidth grid.
pub fn cmd_scan_b(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut manifest = base_manifest(cfg, "scan-b");
    let source = cfg.source(0.0)?;
    let scan = scan_b(
        &source,
        &cfg.grids.b_grid,
        &cfg.grids.t_grid,
        cfg.target_h,
        cfg.h_floor,
        &cfg.numerics,
    )?;
    manifest.push_sig9("scan.target_h", cfg.target_h);
    manifest.push_sig9("scan.h_floor", cfg.h_floor);
    manifest.push(
        "scan.b_grid",
        format!(
            "{}..{} step {}",
            sig9(cfg.grids.b_grid[0]),
            sig9(*cfg.grids.b_grid.last().unwrap()),
            sig9(cfg.grids.b_grid[1] - cfg.grids.b_grid[0])
        ),
    );
    manifest.push(
        "scan.t_grid",
        format!(
            "{}..{} step {}",
            sig9(cfg.grids.t_grid[0]),
            sig9(*cfg.grids.t_grid.last().unwrap()),
            sig9(cfg.grids.t_grid[1] - cfg.grids.t_grid[0])
        ),
    );
    let skipped: Vec<String> = scan
        .entries
        .iter()
        .filter(|e| e.point.is_none())
        .map(|e| sig9(e.b))
        .collect();
    if !skipped.is_empty() {
        manifest.push("scan.infeasible_b", skipped.join(";"));
    }
    manifest.push_sig9("best.b", scan.best.b);
    manifest.push_sig9("best.r0", scan.best.r0);

    let si = cfg.sigma_hz;
    let mut table = if si.is_some() {
        Table::new(&[
            "B", "T_star", "kappa_L", "R0", "lambda0", "Tmin", "R0_hz", "Tmin_s",
        ])
    } else {
        Table::new(&["B", "T_star", "kappa_L", "R0", "lambda0", "Tmin"])
    };
    for p in scan.feasible() {
        let mut row = vec![p.b, p.t_star, p.kappa_l, p.r0, p.lambda0, p.t_min];
        if let Some(s) = si {
            row.push(p.r0 * s);
            row.push(p.t_min / s);
        }
        table.rows.push(row);
    }
    let path = table.write(&cfg.out_dir, "scan_b", cfg.format, &manifest)?;
    Ok(vec![path])
}

/// `modes`: prolate eigenvalues and mode-function samples.
pub fn cmd_modes(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut manifest = base_manifest(cfg, "modes");
    let source = cfg.source(0.0)?;
    let heralding = resolve_heralding(cfg, &source, &mut manifest)?;
    let basis = heralding.basis();
    manifest.push_sig9("c", basis.c());
    manifest.push("modes_retained", basis.len());
    manifest.push_sig9("chi_trace", basis.chi_trace());

    let mut chi_table = Table::new(&["m", "chi_m"]);
    for (m, &chi) in basis.chi().iter().enumerate() {
        chi_table.rows.push(vec![m as f64, chi]);
    }
    let path_chi = chi_table.write(&cfg.out_dir, "modes", cfg.format, &manifest)?;

    let mut cols: Vec<String> = vec!["nu".to_string()];
    cols.extend((0..basis.len()).map(|m| format!("phi_{m}")));
    let col_refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let mut sample_table = Table::new(&col_refs);
    for (k, &nu) in basis.grid().nodes().iter().enumerate() {
        let mut row = vec![nu];
        row.extend((0..basis.len()).map(|m| basis.modes()[(k, m)]));
        sample_table.rows.push(row);
    }
    let path_samples = sample_table.write(&cfg.out_dir, "mode_samples", cfg.format, &manifest)?;
    Ok(vec![path_chi, path_samples])
}

/// `schmidt`: Schmidt spectrum, K and purity of the two-photon amplitude.
pub fn cmd_schmidt(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut manifest = base_manifest(cfg, "schmidt");
    let source = cfg.source(0.0)?;
    let grid = FreqGrid::gauss_legendre(cfg.numerics.window, cfg.numerics.nodes)?;
    let result = heraldsim::schmidt_decompose(&source, &grid)?;
    manifest.push_sig9("K", result.k);
    manifest.push_sig9("purity", result.purity);

    let mut table = Table::new(&["n", "rho_n"]);
    for (n, &rho) in result.coefficients.iter().enumerate() {
        table.rows.push(vec![n as f64, rho]);
    }
    table.footer.push(("K".to_string(), result.k));
    table.footer.push(("purity".to_string(), result.purity));
    let path = table.write(&cfg.out_dir, "schmidt", cfg.format, &manifest)?;
    Ok(vec![path])
}

/// `presets list` text.
pub fn presets_list() -> String {
    crate::presets::list_text()
}
