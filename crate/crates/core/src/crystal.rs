//! Band structure of a one-dimensional two-layer photonic crystal.
//!
//! A unit cell holds layer A (width `l_a`, relative permittivity
//! `eps_rel_a`) followed by layer B. Bloch modes with wavenumber k and
//! angular frequency ω exist where
//!
//! ```text
//! F(k, ω) = cos(Λk) − cos(l_A K_A) cos(l_B K_B)
//!           + (K_A² + K_B²)/(2 K_A K_B) · sin(l_A K_A) sin(l_B K_B) = 0
//! ```
//!
//! with Λ = l_A + l_B and K_j = (ω/c)·√ε_j. Since K_A/K_B does not depend on
//! ω, the coefficient of the sine product is a constant of the crystal and
//! F(k, 0) = cos(Λk) − 1 needs no special case.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Gauss–Legendre order used per layer by [`energy_ratio`].
pub const ENERGY_QUADRATURE_ORDER: usize = 64;

/// Layer geometry and permittivities of the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrystalSpec {
    l_a: f64,
    l_b: f64,
    eps_rel_a: f64,
    eps_rel_b: f64,
    total_length: f64,
}

impl CrystalSpec {
    pub fn new(l_a: f64, l_b: f64, eps_rel_a: f64, eps_rel_b: f64, total_length: f64) -> Result<Self> {
        for (name, v) in [
            ("l_a", l_a),
            ("l_b", l_b),
            ("eps_rel_a", eps_rel_a),
            ("eps_rel_b", eps_rel_b),
            ("total_length", total_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self { l_a, l_b, eps_rel_a, eps_rel_b, total_length })
    }

    pub fn l_a(&self) -> f64 {
        self.l_a
    }

    pub fn l_b(&self) -> f64 {
        self.l_b
    }

    pub fn eps_rel_a(&self) -> f64 {
        self.eps_rel_a
    }

    pub fn eps_rel_b(&self) -> f64 {
        self.eps_rel_b
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Lattice period Λ = l_A + l_B.
    pub fn period(&self) -> f64 {
        self.l_a + self.l_b
    }

    pub fn n_a(&self) -> f64 {
        self.eps_rel_a.sqrt()
    }

    pub fn n_b(&self) -> f64 {
        self.eps_rel_b.sqrt()
    }

    /// Edge of the first Brillouin zone, π/Λ.
    pub fn zone_edge(&self) -> f64 {
        PI / self.period()
    }

    /// (K_A, K_B) at angular frequency ω.
    pub fn layer_wavenumbers(&self, omega: f64) -> (f64, f64) {
        (omega / SPEED_OF_LIGHT * self.n_a(), omega / SPEED_OF_LIGHT * self.n_b())
    }

    /// (K_A² + K_B²)/(2 K_A K_B)
    fn contrast(&self) -> f64 {
        (self.eps_rel_a + self.eps_rel_b) / (2.0 * self.n_a() * self.n_b())
    }

    /// ωΛ/(2πc)
    pub fn normalized_frequency(&self, omega: f64) -> f64 {
        omega * self.period() / (2.0 * PI * SPEED_OF_LIGHT)
    }

    /// Inverse of [`Self::normalized_frequency`].
    pub fn angular_frequency(&self, normalized: f64) -> f64 {
        normalized * 2.0 * PI * SPEED_OF_LIGHT / self.period()
    }
}

/// A solved (k, ω) sample on one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    /// Bloch wavenumber, 1/m
    pub k: f64,
    /// Angular frequency, 1/s
    pub omega: f64,
    /// 1 for the lowest band at this k
    pub band_index: usize,
}

/// Field coefficients of a Bloch mode. Layer A occupies [0, l_A] and layer
/// B occupies [−l_B, 0] in the coordinates of the plane-wave expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochMode {
    pub k_a: f64,
    pub k_b: f64,
    pub c_a_plus: C64,
    pub c_a_minus: C64,
    pub c_b_plus: C64,
    pub c_b_minus: C64,
    /// ‖M v‖ of the returned unit vector
    pub residual: f64,
}

impl BlochMode {
    pub fn coefficients(&self) -> [C64; 4] {
        [self.c_a_plus, self.c_a_minus, self.c_b_plus, self.c_b_minus]
    }
}

/// Relative probabilities of finding the photon in layer A or B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRatio {
    pub p_a: f64,
    pub p_b: f64,
}

impl EnergyRatio {
    /// Normalizes two nonnegative weights to p_a + p_b = 1.
    pub fn from_weights(w_a: f64, w_b: f64) -> Result<Self> {
        let total = w_a + w_b;
        if !(w_a >= 0.0 && w_b >= 0.0 && total > 0.0 && total.is_finite()) {
            return Err(Error::invalid("energy weights", format!("need nonnegative weights with positive sum, got {w_a}, {w_b}")));
        }
        Ok(Self { p_a: w_a / total, p_b: w_b / total })
    }

    /// p_B / p_A, the second entry of the ratio written as 1 : x.
    pub fn b_per_a(&self) -> f64 {
        self.p_b / self.p_a
    }
}

/// Frequency scan settings for the band solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSolverOptions {
    /// Scan ceiling in units of ωΛ/(2πc)
    pub ceiling: f64,
    pub scan_points: usize,
}

impl Default for BandSolverOptions {
    fn default() -> Self {
        Self { ceiling: 3.0, scan_points: 2000 }
    }
}

/// F(k, ω) from the module docs.
pub fn dispersion_residual(k: f64, omega: f64, spec: &CrystalSpec) -> f64 {
    let (ka, kb) = spec.layer_wavenumbers(omega);
    let (a, b) = (spec.l_a * ka, spec.l_b * kb);
    (spec.period() * k).cos() - a.cos() * b.cos() + spec.contrast() * a.sin() * b.sin()
}

/// (∂F/∂k, ∂F/∂ω)
pub fn residual_partials(k: f64, omega: f64, spec: &CrystalSpec) -> (f64, f64) {
    let (ka, kb) = spec.layer_wavenumbers(omega);
    let (a, b) = (spec.l_a * ka, spec.l_b * kb);
    let da = spec.l_a * spec.n_a() / SPEED_OF_LIGHT;
    let db = spec.l_b * spec.n_b() / SPEED_OF_LIGHT;
    let (sa, ca, sb, cb) = (a.sin(), a.cos(), b.sin(), b.cos());
    let gamma = spec.contrast();
    let dk = -spec.period() * (spec.period() * k).sin();
    let dw = da * sa * cb + db * ca * sb + gamma * (da * ca * sb + db * sa * cb);
    (dk, dw)
}

/// Bisection on a sign change of `f` between `lo` and `hi`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Residual below which a stationary point of F counts as a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// All roots ω of F(k, ·) below the scan ceiling, ascending, with double
/// roots (touching bands) listed twice.
pub fn frequencies_at(spec: &CrystalSpec, k: f64, opts: &BandSolverOptions) -> Vec<f64> {
    let f = |w: f64| dispersion_residual(k, w, spec);
    let fw = |w: f64| residual_partials(k, w, spec).1;
    let polish = |w: f64, lo: f64, hi: f64| {
        let (_, d) = residual_partials(k, w, spec);
        if d == 0.0 {
            return w;
        }
        let next = w - f(w) / d;
        if next > lo && next < hi && f(next).abs() < f(w).abs() {
            next
        } else {
            w
        }
    };

    let w_max = spec.angular_frequency(opts.ceiling);
    let n = opts.scan_points.max(2);
    let grid: Vec<f64> = (0..=n).map(|i| w_max * i as f64 / n as f64).collect();

    let mut roots = Vec::new();
    if f(0.0) == 0.0 {
        roots.push(0.0);
    }
    let simple = |lo: f64, hi: f64, roots: &mut Vec<f64>| {
        if (f(lo) < 0.0) != (f(hi) < 0.0) {
            let w = bisect(f, lo, hi);
            roots.push(polish(w, lo, hi));
        }
    };
    for cell in grid.windows(2) {
        let (lo, hi) = (cell[0], cell[1]);
        if (fw(lo) < 0.0) != (fw(hi) < 0.0) {
            let s = bisect(fw, lo, hi);
            let (f_lo, f_s, f_hi) = (f(lo), f(s), f(hi));
            let crosses = (f_lo < 0.0) != (f_s < 0.0) || (f_s < 0.0) != (f_hi < 0.0);
            if !crosses && f_s.abs() <= DOUBLE_ROOT_TOL && s > 0.0 {
                roots.push(s);
                roots.push(s);
                continue;
            }
            simple(lo, s, &mut roots);
            simple(s, hi, &mut roots);
        } else {
            simple(lo, hi, &mut roots);
        }
    }
    roots
}

/// Solves band `band_index` (1-based) at wavenumber `k`.
pub fn band_point(spec: &CrystalSpec, k: f64, band_index: usize, opts: &BandSolverOptions) -> Result<BandPoint> {
    if band_index < 1 {
        return Err(Error::invalid("band_index", "bands are numbered from 1"));
    }
    if !(k >= 0.0 && k <= spec.zone_edge() * (1.0 + 1e-12)) {
        return Err(Error::invalid("k", format!("must lie in [0, π/Λ], got {k}")));
    }
    let roots = frequencies_at(spec, k, opts);
    match roots.get(band_index - 1) {
        Some(&omega) => Ok(BandPoint { k, omega, band_index }),
        None => Err(Error::RootCount { found: roots.len(), wanted: band_index, k }),
    }
}

/// Bands 1..=n_bands sampled on a uniform k grid over [0, π/Λ].
#[derive(Debug, Clone, Serialize)]
pub struct BandStructure {
    pub k: Vec<f64>,
    /// `bands[i]` holds band `i + 1`, one point per entry of `k`
    pub bands: Vec<Vec<BandPoint>>,
}

impl BandStructure {
    pub fn band(&self, band_index: usize) -> Option<&[BandPoint]> {
        self.bands.get(band_index.checked_sub(1)?).map(Vec::as_slice)
    }
}

pub fn solve_bands(spec: &CrystalSpec, k_samples: usize, n_bands: usize) -> Result<BandStructure> {
    solve_bands_with(spec, k_samples, n_bands, &BandSolverOptions::default())
}

pub fn solve_bands_with(spec: &CrystalSpec, k_samples: usize, n_bands: usize, opts: &BandSolverOptions) -> Result<BandStructure> {
    if k_samples < 2 {
        return Err(Error::invalid("k_samples", "need at least 2 samples"));
    }
    if n_bands < 1 {
        return Err(Error::invalid("n_bands", "need at least one band"));
    }
    let edge = spec.zone_edge();
    let k: Vec<f64> = (0..k_samples).map(|i| edge * i as f64 / (k_samples - 1) as f64).collect();
    let per_k: Vec<Vec<f64>> = k
        .par_iter()
        .map(|&kk| {
            let roots = frequencies_at(spec, kk, opts);
            if roots.len() < n_bands {
                Err(Error::RootCount { found: roots.len(), wanted: n_bands, k: kk })
            } else {
                Ok(roots)
            }
        })
        .collect::<Result<_>>()?;
    let bands = (0..n_bands)
        .map(|b| {
            k.iter()
                .zip(&per_k)
                .map(|(&kk, roots)| BandPoint { k: kk, omega: roots[b], band_index: b + 1 })
                .collect()
        })
        .collect();
    Ok(BandStructure { k, bands })
}

/// |dω/dk| at a solved point, by implicit differentiation of F.
pub fn group_velocity(spec: &CrystalSpec, point: &BandPoint) -> Result<f64> {
    let (dk, dw) = residual_partials(point.k, point.omega, spec);
    if (dw * point.omega).abs() <= 1e-9 {
        return Err(Error::BandEdge(format!(
            "∂F/∂ω vanishes at k = {:.6e}, ω = {:.6e} (band {})",
            point.k, point.omega, point.band_index
        )));
    }
    Ok((dk / dw).abs())
}

/// The 4×4 continuity matrix acting on (C_A+, C_A−, C_B+, C_B−).
///
/// The derivative-matching rows are divided by K_A, so every entry is
/// dimensionless; κ = K_B/K_A = n_B/n_A. With this scaling
/// det M = 8κ·e^{ikΛ}·F(k, ω).
pub fn dispersion_matrix(spec: &CrystalSpec, k: f64, omega: f64) -> Matrix4<Complex<f64>> {
    let (ka, kb) = spec.layer_wavenumbers(omega);
    let kappa = C64::new(spec.n_b() / spec.n_a(), 0.0);
    let p = C64::from_polar(1.0, ka * spec.l_a);
    let q = C64::from_polar(1.0, k * spec.period());
    let r = C64::from_polar(1.0, kb * spec.l_b);
    let one = C64::new(1.0, 0.0);
    Matrix4::new(
        one, one, -one, -one,
        one, -one, -kappa, kappa,
        p, one / p, -q / r, -q * r,
        p, -one / p, -kappa * q / r, kappa * q * r,
    )
}

/// Unit-norm null vector of the continuity matrix at a solved band point.
///
/// The global phase makes C_A+ real and positive (or the largest
/// coefficient, if C_A+ vanishes).
pub fn bloch_coefficients(spec: &CrystalSpec, point: &BandPoint) -> Result<BlochMode> {
    if point.omega <= 0.0 {
        return Err(Error::Degenerate("the ω = 0 mode has no plane-wave coefficients".into()));
    }
    let m = dispersion_matrix(spec, point.k, point.omega);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let (smallest, second) = (svd.singular_values[order[0]], svd.singular_values[order[1]]);
    let largest = svd.singular_values[order[3]];
    if second <= 1e-8 * largest {
        return Err(Error::DegenerateNullspace { smallest, second });
    }
    let mut v: Vector4<Complex<f64>> = v_t.row(order[0]).adjoint();

    let pivot = if v[0].norm() > 1e-12 {
        0
    } else {
        (0..4).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap_or(0)
    };
    let phase = v[pivot] / v[pivot].norm();
    v.iter_mut().for_each(|c| *c /= phase);
    v /= C64::new(v.norm(), 0.0);

    let residual = (m * v).norm();
    if residual > 1e-8 {
        return Err(Error::Convergence(format!(
            "null vector residual {residual:.3e} at k = {:.6e}, ω = {:.6e}; the point is not on a band",
            point.k, point.omega
        )));
    }
    let (k_a, k_b) = spec.layer_wavenumbers(point.omega);
    Ok(BlochMode { k_a, k_b, c_a_plus: v[0], c_a_minus: v[1], c_b_plus: v[2], c_b_minus: v[3], residual })
}

/// Cycle-averaged electromagnetic energy in one layer, per unit area and
/// up to the common factor ε₀.
fn layer_energy(n_rel: f64, kj: f64, (cp, cm): (C64, C64), omega: f64, (x0, x1): (f64, f64), order: usize) -> f64 {
    let e_coef = n_rel * n_rel / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
    let b_scale = kj / omega;
    integrate(
        |x| {
            let fwd = cp * C64::from_polar(1.0, kj * x);
            let bwd = cm * C64::from_polar(1.0, -kj * x);
            let e = fwd + bwd;
            let b = (fwd - bwd) * b_scale;
            // <Re(u e^{-iωt})²> = |u|²/2
            0.5 * (e_coef * e.norm_sqr() + b.norm_sqr())
        },
        x0,
        x1,
        order,
    )
}

fn energy_weights(spec: &CrystalSpec, mode: &BlochMode, omega: f64, order: usize) -> (f64, f64) {
    let w_a = layer_energy(spec.n_a(), mode.k_a, (mode.c_a_plus, mode.c_a_minus), omega, (0.0, spec.l_a), order);
    let w_b = layer_energy(spec.n_b(), mode.k_b, (mode.c_b_plus, mode.c_b_minus), omega, (-spec.l_b, 0.0), order);
    (w_a, w_b)
}

/// P_A : P_B from the cycle-averaged field energy in each layer.
///
/// Integrates with [`ENERGY_QUADRATURE_ORDER`] points per layer and
/// fails with [`Error::Quadrature`] if doubling the order moves p_B/p_A by
/// more than 1e-9 (relative).
pub fn energy_ratio(spec: &CrystalSpec, mode: &BlochMode, omega: f64) -> Result<EnergyRatio> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", format!("must be positive, got {omega}")));
    }
    let (w_a, w_b) = energy_weights(spec, mode, omega, ENERGY_QUADRATURE_ORDER);
    let (f_a, f_b) = energy_weights(spec, mode, omega, 2 * ENERGY_QUADRATURE_ORDER);
    let coarse = w_b / w_a;
    let fine = f_b / f_a;
    let change = ((coarse - fine) / fine).abs();
    if change.is_nan() || change > 1e-9 {
        return Err(Error::Quadrature { change });
    }
    EnergyRatio::from_weights(w_a, w_b)
}

/// Slow-light window on one band, starting from k = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyWindow {
    pub band_index: usize,
    /// Largest k with v_g ≤ ceiling, 1/m
    pub k_max: f64,
    /// ω at k = 0, 1/s
    pub omega_edge: f64,
    /// |ω(k_max) − ω(0)|, 1/s
    pub delta_omega: f64,
    /// Δω/2π, Hz
    pub delta_nu: f64,
}

/// Number of k samples used to walk a band in [`frequency_window`].
pub const WINDOW_K_SAMPLES: usize = 4096;

/// Largest interval 0 ≤ k ≤ k_max on band `band_index` where the group
/// velocity stays at or below `vg_ceiling`, and the frequency span it
/// covers. The window is not continued through the k = π/Λ edge.
pub fn frequency_window(spec: &CrystalSpec, band_index: usize, vg_ceiling: f64) -> Result<FrequencyWindow> {
    frequency_window_with(spec, band_index, vg_ceiling, &BandSolverOptions::default())
}

pub fn frequency_window_with(
    spec: &CrystalSpec,
    band_index: usize,
    vg_ceiling: f64,
    opts: &BandSolverOptions,
) -> Result<FrequencyWindow> {
    if !(vg_ceiling > 0.0 && vg_ceiling.is_finite()) {
        return Err(Error::EmptyWindow(format!("group-velocity ceiling must be positive, got {vg_ceiling}")));
    }
    let edge = spec.zone_edge();
    let origin = band_point(spec, 0.0, band_index, opts)?;
    let limit = vg_ceiling * (1.0 + 1e-9);
    let vg_at = |k: f64| -> Result<f64> { group_velocity(spec, &band_point(spec, k, band_index, opts)?) };

    let mut k_end = edge;
    let mut prev = 0.0;
    for i in 1..WINDOW_K_SAMPLES {
        let k = edge * i as f64 / WINDOW_K_SAMPLES as f64;
        if vg_at(k)? > limit {
            if i == 1 {
                return Err(Error::EmptyWindow(format!(
                    "v_g exceeds {vg_ceiling:.6e} m/s already at k = {k:.6e} 1/m on band {band_index}"
                )));
            }
            let (mut lo, mut hi) = (prev, k);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if vg_at(mid)? > limit {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            k_end = lo;
            break;
        }
        prev = k;
    }
    let end = band_point(spec, k_end, band_index, opts)?;
    let delta_omega = (end.omega - origin.omega).abs();
    Ok(FrequencyWindow {
        band_index,
        k_max: k_end,
        omega_edge: origin.omega,
        delta_omega,
        delta_nu: delta_omega / (2.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homogeneous(n: f64) -> CrystalSpec {
        CrystalSpec::new(5e-7, 5e-7, n * n, n * n, 5e-5).unwrap()
    }

    fn paper() -> CrystalSpec {
        CrystalSpec::new(5e-7, 5e-7, 1.0, 4.84, 5e-5).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(CrystalSpec::new(0.0, 1e-7, 1.0, 2.0, 1e-5).is_err());
        assert!(CrystalSpec::new(1e-7, 1e-7, -1.0, 2.0, 1e-5).is_err());
        assert!(CrystalSpec::new(1e-7, 1e-7, 1.0, 2.0, f64::NAN).is_err());
    }

    #[test]
    fn homogeneous_light_line_has_zero_residual() {
        let s = homogeneous(1.7);
        for &w in &[1e14, 7.7e14, 3.1e15] {
            let k = 1.7 * w / SPEED_OF_LIGHT;
            assert!(dispersion_residual(k, w, &s).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_limit() {
        let s = paper();
        let k = 0.3 * s.zone_edge();
        let expect = (s.period() * k).cos() - 1.0;
        assert!((dispersion_residual(k, 0.0, &s) - expect).abs() < 1e-15);
    }

    #[test]
    fn partials_match_finite_differences() {
        let s = paper();
        let (k, w) = (0.37 * s.zone_edge(), s.angular_frequency(1.43));
        let (dk, dw) = residual_partials(k, w, &s);
        let hk = 1e-6 * k;
        let hw = 1e-7 * w;
        let fd_k = (dispersion_residual(k + hk, w, &s) - dispersion_residual(k - hk, w, &s)) / (2.0 * hk);
        let fd_w = (dispersion_residual(k, w + hw, &s) - dispersion_residual(k, w - hw, &s)) / (2.0 * hw);
        assert!((dk - fd_k).abs() < 1e-6 * dk.abs());
        assert!((dw - fd_w).abs() < 1e-6 * dw.abs());
    }

    #[test]
    fn homogeneous_folded_lines() {
        // empty-lattice bands: ω = c|k + 2πm/Λ|/n, sorted
        let n = 1.5;
        let s = homogeneous(n);
        let lattice = 2.0 * PI / s.period();
        for &frac in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let k = frac * s.zone_edge();
            let mut expect: Vec<f64> = (-6i32..=6)
                .map(|m| SPEED_OF_LIGHT * (k + m as f64 * lattice).abs() / n)
                .filter(|&w| s.normalized_frequency(w) < 2.9)
                .collect();
            expect.sort_by(f64::total_cmp);
            let got = frequencies_at(&s, k, &BandSolverOptions::default());
            let got: Vec<f64> = got.into_iter().filter(|&w| s.normalized_frequency(w) < 2.9).collect();
            assert_eq!(got.len(), expect.len(), "k fraction {frac}: {got:?} vs {expect:?}");
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() <= 1e-7 * e.max(1.0), "k fraction {frac}: {g} vs {e}");
            }
        }
    }

    #[test]
    fn roots_have_small_residual() {
        let s = paper();
        for &frac in &[0.0, 0.1, 0.5, 0.99, 1.0] {
            let k = frac * s.zone_edge();
            for w in frequencies_at(&s, k, &BandSolverOptions::default()) {
                assert!(dispersion_residual(k, w, &s).abs() <= 1e-10, "k = {k}, ω = {w}");
            }
        }
    }

    #[test]
    fn root_count_error() {
        let s = paper();
        let err = band_point(&s, 0.0, 30, &BandSolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RootCount { wanted: 30, .. }));
        assert!(solve_bands(&s, 1, 4).is_err());
    }

    #[test]
    fn homogeneous_group_velocity() {
        let n = 2.0;
        let s = homogeneous(n);
        for &frac in &[0.1, 0.5, 0.8] {
            for band in 1..=4 {
                let p = band_point(&s, frac * s.zone_edge(), band, &BandSolverOptions::default()).unwrap();
                let v = group_velocity(&s, &p).unwrap();
                assert!((v - SPEED_OF_LIGHT / n).abs() < 1e-9 * SPEED_OF_LIGHT);
            }
        }
    }

    #[test]
    fn touching_bands_are_band_edge_errors() {
        let s = homogeneous(1.3);
        let p = band_point(&s, 0.0, 2, &BandSolverOptions::default()).unwrap();
        assert!(matches!(group_velocity(&s, &p), Err(Error::BandEdge(_))));
    }

    #[test]
    fn homogeneous_mode_is_single_plane_wave() {
        let s = homogeneous(1.4);
        let p = band_point(&s, 0.3 * s.zone_edge(), 1, &BandSolverOptions::default()).unwrap();
        let mode = bloch_coefficients(&s, &p).unwrap();
        assert!(mode.c_a_minus.norm() < 1e-8);
        assert!(mode.c_b_minus.norm() < 1e-8);
        assert!((mode.c_a_plus - mode.c_b_plus).norm() < 1e-8);
        assert!(mode.c_a_plus.im.abs() < 1e-15 && mode.c_a_plus.re > 0.0);
    }

    #[test]
    fn determinant_is_scaled_residual() {
        let s = paper();
        let kappa = s.n_b() / s.n_a();
        for &(fk, u) in &[(0.1, 0.4), (0.77, 1.9), (0.5, 2.6), (0.0, 1.1)] {
            let k = fk * s.zone_edge();
            let w = s.angular_frequency(u);
            let det = dispersion_matrix(&s, k, w).determinant();
            let expect = C64::from_polar(8.0 * kappa, k * s.period()) * dispersion_residual(k, w, &s);
            assert!((det - expect).norm() < 1e-12 * expect.norm().max(1.0), "{det} vs {expect}");
        }
    }

    #[test]
    fn homogeneous_energy_split_is_even() {
        let s = homogeneous(1.8);
        let p = band_point(&s, 0.4 * s.zone_edge(), 2, &BandSolverOptions::default()).unwrap();
        let mode = bloch_coefficients(&s, &p).unwrap();
        let ratio = energy_ratio(&s, &mode, p.omega).unwrap();
        assert!((ratio.p_a - 0.5).abs() < 1e-12);
        assert!((ratio.p_a + ratio.p_b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn energy_ratio_needs_positive_frequency() {
        let s = paper();
        let p = band_point(&s, 0.4 * s.zone_edge(), 2, &BandSolverOptions::default()).unwrap();
        let mode = bloch_coefficients(&s, &p).unwrap();
        assert!(energy_ratio(&s, &mode, 0.0).is_err());
    }

    #[test]
    fn empty_window_for_zero_ceiling() {
        assert!(matches!(frequency_window(&paper(), 4, 0.0), Err(Error::EmptyWindow(_))));
    }

    #[test]
    fn homogeneous_window_spans_zone() {
        let n = 1.5;
        let s = homogeneous(n);
        let w = frequency_window(&s, 1, SPEED_OF_LIGHT / n).unwrap();
        assert_eq!(w.k_max, s.zone_edge());
        // band 1 ends on a tangency with band 2 here, so the root is only good to ~√ε
        let expect = SPEED_OF_LIGHT / n * s.zone_edge();
        assert!((w.delta_omega - expect).abs() < 1e-7 * expect);
    }
}
