//! Subcommand implementations. Each one turns a merged [`RunConfig`] into a
//! [`Table`].

use std::f64::consts::PI;

use clap::ValueEnum;
use herald_core::{
    band_point, bloch_coefficients, calibrate, energy_ratio, frequencies_at, frequency_window, group_velocity, preset,
    sweep_grid, BandPoint, BandSolverOptions, CrystalSpec, Error, Preset, PumpSpec, Quantity, SourceParams,
    SPEED_OF_LIGHT,
};
use rayon::prelude::*;

use crate::config::{axis, Fallback, RunConfig};
use crate::error::CliError;
use crate::table::{log10_or_nan, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "3a")]
    F3a,
    #[value(name = "3b")]
    F3b,
    #[value(name = "4a")]
    F4a,
    #[value(name = "4b")]
    F4b,
    #[value(name = "5a")]
    F5a,
    #[value(name = "5b")]
    F5b,
    #[value(name = "5c")]
    F5c,
    #[value(name = "5d")]
    F5d,
    #[value(name = "6a")]
    F6a,
    #[value(name = "6b")]
    F6b,
    #[value(name = "7a")]
    F7a,
    #[value(name = "7b")]
    F7b,
}

impl Figure {
    pub fn id(&self) -> &'static str {
        match self {
            Figure::F3a => "3a",
            Figure::F3b => "3b",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
            Figure::F5a => "5a",
            Figure::F5b => "5b",
            Figure::F5c => "5c",
            Figure::F5d => "5d",
            Figure::F6a => "6a",
            Figure::F6b => "6b",
            Figure::F7a => "7a",
            Figure::F7b => "7b",
        }
    }
}

/// Recipes listed in `--help`.
pub const FIGURE_HELP: &str = "\
Figure recipes (reproduce-figure <ID>; grids can be overridden with the *_start/*_stop/*_steps keys):
  3a  P(1,1) over r in [0, 1.5] x alpha in [0, 1.5], 61 x 61
  3b  g2(0), perfect herald, same grid as 3a
  4a  P(1,1) over r in [0, 1.5] (301 points), alpha from the preset (0.06)
  4b  g2(0), perfect herald, same grid as 4a
  5a  P_click(0) over r in [0, 1.5] x eta in [0, 1], 61 x 41, alpha = 0.06
  5b  P_click(1), same grid as 5a
  5c  P_click(2), same grid as 5a
  5d  P_click(3), same grid as 5a
  6a  g2(0), click herald, same grid as 5a
  6b  g2(0), click herald, r in [0, 1.5] (301 points) for eta = 0.7, 0.85, 1.0
  7a  bands 4 and 8, omega L/(2 pi c) over L k in [0, pi] (201 points)
  7b  v_g/c of band 4 over L k in [0, pi] (201 points)";

const SWEEP_COLUMNS: &[&str] = &["r", "alpha", "eta", "value", "log10_value", "leakage", "status"];
const BAND_COLUMNS: &[&str] = &["band_index", "k_lambda", "omega_norm", "vg_over_c", "status"];

/// Base parameter set plus the merged configuration on top of it.
pub struct Context {
    pub cfg: RunConfig,
    preset: Preset,
}

fn core(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let context = context.into();
    move |e| CliError::core(context, e)
}

impl Context {
    pub fn new(mut cfg: RunConfig) -> Result<Self, CliError> {
        let name = cfg.preset.clone().unwrap_or_else(|| "paper".to_string());
        let preset = preset(&name).map_err(core("preset"))?;
        cfg.preset = Some(name);
        Ok(Self { cfg, preset })
    }

    fn source(&self, alpha: f64, r: f64, eta: f64) -> Result<SourceParams, CliError> {
        let mut p = SourceParams::new(alpha, r, eta).map_err(core("source parameters"))?;
        if let Some(tol) = self.cfg.tail_tol {
            let cutoff = p.cutoff().with_tail_tol(tol).map_err(core("tail_tol"))?;
            p = p.with_cutoff(cutoff);
        }
        if let Some(k_max) = self.cfg.k_max {
            p = p.with_k_max(k_max).map_err(core("k_max"))?;
        }
        Ok(p)
    }

    fn crystal(&self) -> Result<CrystalSpec, CliError> {
        let c = &self.preset.crystal;
        let cfg = &self.cfg;
        CrystalSpec::new(
            cfg.l_a.unwrap_or(c.l_a()),
            cfg.l_b.unwrap_or(c.l_b()),
            cfg.eps_rel_a.unwrap_or(c.eps_rel_a()),
            cfg.eps_rel_b.unwrap_or(c.eps_rel_b()),
            cfg.total_length.unwrap_or(c.total_length()),
        )
        .map_err(core("crystal"))
    }

    fn pump(&self) -> Result<PumpSpec, CliError> {
        let p = &self.preset.pump;
        let cfg = &self.cfg;
        PumpSpec::new(
            cfg.power.unwrap_or(p.power),
            cfg.beam_radius.unwrap_or(p.beam_radius),
            cfg.chi2.unwrap_or(p.chi2),
            cfg.refr_index.unwrap_or(p.refr_index),
            cfg.omega_s.unwrap_or(p.omega_s),
            cfg.theta.unwrap_or(p.theta),
        )
        .map_err(core("pump"))
    }

    fn r_axis(&self, fallback: Fallback) -> Result<Vec<f64>, CliError> {
        let c = &self.cfg;
        axis("r", c.r, c.r_start, c.r_stop, c.r_steps, fallback)
    }

    fn alpha_axis(&self, fallback: Fallback) -> Result<Vec<f64>, CliError> {
        let c = &self.cfg;
        axis("alpha", c.alpha, c.alpha_start, c.alpha_stop, c.alpha_steps, fallback)
    }

    fn eta_axis(&self, fallback: Fallback) -> Result<Vec<f64>, CliError> {
        let c = &self.cfg;
        axis("eta", c.eta, c.eta_start, c.eta_stop, c.eta_steps, fallback)
    }

    fn eta_is_set(&self) -> bool {
        let c = &self.cfg;
        c.eta.is_some() || c.eta_start.is_some() || c.eta_stop.is_some() || c.eta_steps.is_some()
    }

    fn preset_alpha(&self) -> Fallback {
        Fallback::Value(self.preset.alpha)
    }

    /// Λk grid from `k` or `k_samples`.
    fn k_axis(&self, spec: &CrystalSpec) -> Result<Vec<f64>, CliError> {
        match self.cfg.k {
            Some(k) if (0.0..=PI).contains(&k) => Ok(vec![k / spec.period()]),
            Some(k) => Err(CliError::Config(format!("k is Λk and must lie in [0, π], got {k}"))),
            None => {
                let n = self.cfg.k_samples.unwrap_or(201);
                if n < 2 {
                    return Err(CliError::Config(format!("k_samples must be at least 2, got {n}")));
                }
                Ok(herald_core::linspace(0.0, spec.zone_edge(), n))
            }
        }
    }
}

fn single(name: &str, grid: &[f64]) -> Result<f64, CliError> {
    match grid {
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!("`{name}` must be a single value for this command"))),
    }
}

/// Evaluates a sweep and lays it out as a table. Degenerate cells (g² with
/// no heralded photons) are kept as NaN rows; any other cell failure aborts.
fn sweep_table(ctx: &Context, quantity: Quantity, r: &[f64], second: &[f64], fixed: f64) -> Result<Table, CliError> {
    let (alpha, eta) = match quantity.second_axis() {
        "alpha" => (f64::NAN, fixed),
        _ => (fixed, f64::NAN),
    };
    let probe_alpha = if alpha.is_nan() { second[0] } else { alpha };
    let probe_eta = if eta.is_nan() { second[0] } else { eta };
    let base = ctx.source(probe_alpha, r[0], probe_eta)?;
    let rows = sweep_grid(quantity, r, second, &base).map_err(core("sweep"))?;

    let mut table = Table::new(SWEEP_COLUMNS);
    for row in rows {
        let (a, e) = if alpha.is_nan() { (row.second, eta) } else { (alpha, row.second) };
        let status = match &row.error {
            None => "ok".to_string(),
            Some(msg) => {
                let kind = msg.split(':').next().unwrap_or("error");
                let at = format!("grid point r = {}, alpha = {a}, eta = {e}: {msg}", row.r);
                match kind {
                    "degenerate" => kind.to_string(),
                    "invalid_parameter" => return Err(CliError::Config(at)),
                    _ => return Err(CliError::Grid { kind: kind.to_string(), message: at }),
                }
            }
        };
        let value = row.value.unwrap_or(f64::NAN);
        table.push(vec![
            row.r.into(),
            a.into(),
            e.into(),
            value.into(),
            log10_or_nan(value).into(),
            row.leakage.into(),
            Cell::Text(status),
        ]);
    }
    Ok(table)
}

pub fn herald_prob(ctx: &Context) -> Result<Table, CliError> {
    let r = ctx.r_axis(Fallback::Required)?;
    let alpha = ctx.alpha_axis(ctx.preset_alpha())?;
    let eta = single("eta", &ctx.eta_axis(Fallback::Value(1.0))?)?;
    sweep_table(ctx, Quantity::P11, &r, &alpha, eta)
}

pub fn herald_g2(ctx: &Context) -> Result<Table, CliError> {
    let r = ctx.r_axis(Fallback::Required)?;
    let eta = ctx.eta_axis(Fallback::Value(1.0))?;
    if eta == [1.0] {
        let alpha = ctx.alpha_axis(ctx.preset_alpha())?;
        sweep_table(ctx, Quantity::G2Perfect, &r, &alpha, 1.0)
    } else {
        let alpha = single("alpha", &ctx.alpha_axis(ctx.preset_alpha())?)?;
        sweep_table(ctx, Quantity::G2Click, &r, &eta, alpha)
    }
}

pub fn click(ctx: &Context) -> Result<Table, CliError> {
    let r = ctx.r_axis(Fallback::Required)?;
    let eta = ctx.eta_axis(Fallback::Required)?;
    let alpha = single("alpha", &ctx.alpha_axis(ctx.preset_alpha())?)?;
    sweep_table(ctx, Quantity::PClick(ctx.cfg.n.unwrap_or(1)), &r, &eta, alpha)
}

fn band_table(spec: &CrystalSpec, ks: &[f64], bands: &[usize]) -> Result<Table, CliError> {
    if let Some(&b) = bands.iter().find(|&&b| b == 0) {
        return Err(CliError::Config(format!("band indices start at 1, got {b}")));
    }
    let needed = bands.iter().copied().max().unwrap_or(1);
    let opts = BandSolverOptions::default();
    let per_k: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| {
            let roots = frequencies_at(spec, k, &opts);
            if roots.len() < needed {
                Err(CliError::core(
                    format!("k_lambda = {}", k * spec.period()),
                    Error::RootCount { found: roots.len(), wanted: needed, k },
                ))
            } else {
                Ok(roots)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(BAND_COLUMNS);
    for &band in bands {
        for (&k, roots) in ks.iter().zip(&per_k) {
            let point = BandPoint { k, omega: roots[band - 1], band_index: band };
            let (vg, status) = match group_velocity(spec, &point) {
                Ok(v) => (v / SPEED_OF_LIGHT, "ok"),
                Err(e @ Error::BandEdge(_)) => (f64::NAN, e.kind()),
                Err(e) => return Err(CliError::core(format!("band {band}, k_lambda = {}", k * spec.period()), e)),
            };
            table.push(vec![
                band.into(),
                (k * spec.period()).into(),
                spec.normalized_frequency(point.omega).into(),
                vg.into(),
                status.into(),
            ]);
        }
    }
    Ok(table)
}

pub fn bands(ctx: &Context) -> Result<Table, CliError> {
    let spec = ctx.crystal()?;
    let ks = ctx.k_axis(&spec)?;
    let list: Vec<usize> = match ctx.cfg.band {
        Some(b) => vec![b],
        None => (1..=ctx.cfg.n_bands.unwrap_or(8)).collect(),
    };
    if list.is_empty() {
        return Err(CliError::Config("n_bands must be at least 1".into()));
    }
    band_table(&spec, &ks, &list)
}

pub fn vg(ctx: &Context) -> Result<Table, CliError> {
    let spec = ctx.crystal()?;
    let ks = ctx.k_axis(&spec)?;
    band_table(&spec, &ks, &[ctx.cfg.band.unwrap_or(ctx.preset.band_index)])
}

pub fn energy_ratio_cmd(ctx: &Context) -> Result<Table, CliError> {
    let spec = ctx.crystal()?;
    let band = ctx.cfg.band.unwrap_or(ctx.preset.band_index);
    let k = match ctx.cfg.k {
        None => 0.0,
        Some(_) => ctx.k_axis(&spec)?[0],
    };
    let opts = BandSolverOptions::default();
    let solve = |k: f64| -> Result<_, Error> {
        let point = band_point(&spec, k, band, &opts)?;
        let mode = bloch_coefficients(&spec, &point)?;
        Ok((point, mode))
    };
    let ((point, mode), status) = match solve(k) {
        Ok(v) => (v, "ok"),
        // touching bands: step just off the degenerate point
        Err(Error::DegenerateNullspace { .. }) => {
            let shifted = (k + 1e-6 * spec.zone_edge()).min(spec.zone_edge());
            let shifted = if shifted == k { k - 1e-6 * spec.zone_edge() } else { shifted };
            (solve(shifted).map_err(core(format!("band {band}, shifted k")))?, "shifted_k")
        }
        Err(e) => return Err(CliError::core(format!("band {band}, k_lambda = {}", k * spec.period()), e)),
    };
    let ratio = energy_ratio(&spec, &mode, point.omega).map_err(core("energy ratio"))?;
    let mut table = Table::new(&["band_index", "k_lambda", "omega_norm", "p_a", "p_b", "b_per_a", "status"]);
    table.push(vec![
        band.into(),
        (point.k * spec.period()).into(),
        spec.normalized_frequency(point.omega).into(),
        ratio.p_a.into(),
        ratio.p_b.into(),
        ratio.b_per_a().into(),
        status.into(),
    ]);
    Ok(table)
}

pub fn calibrate_cmd(ctx: &Context) -> Result<Table, CliError> {
    let spec = ctx.crystal()?;
    let pump = ctx.pump()?;
    let band = ctx.cfg.band.unwrap_or(ctx.preset.band_index);
    let zeta = ctx.cfg.zeta.unwrap_or(ctx.preset.zeta_target);
    let report = calibrate(&spec, &pump, band, zeta).map_err(core("calibrate"))?;
    let ceiling = ctx.cfg.vg_ceiling.map(|f| f * SPEED_OF_LIGHT).unwrap_or(report.required_v_g);
    let window = frequency_window(&spec, band, ceiling).map_err(core("frequency window"))?;
    let mut table = Table::new(&[
        "pump_amplitude",
        "zeta",
        "required_vg_over_c",
        "band_index",
        "edge_omega_norm",
        "edge_vg_over_c",
        "p_a",
        "p_b",
        "b_per_a",
        "length",
        "effective_length",
        "squeeze_db",
        "window_vg_over_c",
        "window_k_lambda",
        "delta_omega",
        "delta_nu",
    ]);
    table.push(vec![
        report.pump_amplitude.into(),
        report.zeta_target.into(),
        report.required_v_g_over_c.into(),
        report.band_index.into(),
        report.edge_frequency.into(),
        report.edge_v_g_over_c.into(),
        report.energy_ratio.p_a.into(),
        report.energy_ratio.p_b.into(),
        report.energy_ratio.b_per_a().into(),
        report.length.into(),
        report.effective_length.into(),
        report.squeeze_db.into(),
        (ceiling / SPEED_OF_LIGHT).into(),
        (window.k_max * spec.period()).into(),
        window.delta_omega.into(),
        window.delta_nu.into(),
    ]);
    Ok(table)
}

pub fn reproduce(ctx: &Context, figure: Figure) -> Result<Table, CliError> {
    let r_wide = Fallback::Grid(0.0, 1.5, 61);
    let r_line = Fallback::Grid(0.0, 1.5, 301);
    let eta_wide = Fallback::Grid(0.0, 1.0, 41);
    let alpha = || single("alpha", &ctx.alpha_axis(ctx.preset_alpha())?);
    match figure {
        Figure::F3a | Figure::F3b => {
            let q = if figure == Figure::F3a { Quantity::P11 } else { Quantity::G2Perfect };
            let r = ctx.r_axis(r_wide)?;
            let a = ctx.alpha_axis(Fallback::Grid(0.0, 1.5, 61))?;
            sweep_table(ctx, q, &r, &a, 1.0)
        }
        Figure::F4a | Figure::F4b => {
            let q = if figure == Figure::F4a { Quantity::P11 } else { Quantity::G2Perfect };
            let r = ctx.r_axis(r_line)?;
            sweep_table(ctx, q, &r, &[alpha()?], 1.0)
        }
        Figure::F5a | Figure::F5b | Figure::F5c | Figure::F5d => {
            let n = match figure {
                Figure::F5a => 0,
                Figure::F5b => 1,
                Figure::F5c => 2,
                _ => 3,
            };
            let r = ctx.r_axis(r_wide)?;
            let eta = ctx.eta_axis(eta_wide)?;
            sweep_table(ctx, Quantity::PClick(n), &r, &eta, alpha()?)
        }
        Figure::F6a => {
            let r = ctx.r_axis(r_wide)?;
            let eta = ctx.eta_axis(eta_wide)?;
            sweep_table(ctx, Quantity::G2Click, &r, &eta, alpha()?)
        }
        Figure::F6b => {
            let r = ctx.r_axis(r_line)?;
            let eta = if ctx.eta_is_set() { ctx.eta_axis(Fallback::Required)? } else { vec![0.7, 0.85, 1.0] };
            sweep_table(ctx, Quantity::G2Click, &r, &eta, alpha()?)
        }
        Figure::F7a | Figure::F7b => {
            let spec = ctx.crystal()?;
            let ks = ctx.k_axis(&spec)?;
            let bands = if figure == Figure::F7a {
                vec![ctx.preset.band_index, ctx.preset.pump_band_index]
            } else {
                vec![ctx.preset.band_index]
            };
            band_table(&spec, &ks, &bands)
        }
    }
}
