//! Truncated Fock-space amplitudes for one and two bosonic modes.
//!
//! Matrix elements of the displacement and two-mode squeezing operators are
//! evaluated from their closed forms. Factorial ratios and powers of
//! `tanh r` are accumulated in log space so that photon numbers in the
//! hundreds do not overflow; signs and phases are carried separately.

use std::f64::consts::{FRAC_PI_2, TAU};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mathutil::ln_factorial;

/// Default probability tolerance for truncation leakage.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Largest cutoff the adaptive preparation will try.
pub const MAX_N_MAX: usize = 2048;

/// Displacement amplitudes below this magnitude are dropped from the
/// final-state sums. Squeezing matrix elements are bounded by one, so the
/// dropped mass is far below any tolerance used here.
const AMPLITUDE_FLOOR: f64 = 1e-20;

/// Photon-number cap of a truncated Fock basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockCutoff {
    n_max: usize,
    tail_tol: f64,
}

impl FockCutoff {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(Error::invalid("tail_tol", format!("must be positive, got {tail_tol}")));
        }
        Ok(Self { n_max, tail_tol })
    }

    /// Starting cutoff for a squeezing magnitude `r`: 64 up to r = 1, 160 up
    /// to r = 1.5, and a geometric-tail estimate (tanh²ⁿ r < 1e-12) beyond.
    pub fn for_squeezing(r: f64) -> Self {
        let n_max = if r <= 1.0 {
            64
        } else if r <= 1.5 {
            160
        } else {
            let ln_t = r.tanh().ln();
            let n = (12.0 * std::f64::consts::LN_10 / (-2.0 * ln_t)).ceil();
            if n.is_finite() {
                (n as usize + 32).min(MAX_N_MAX)
            } else {
                MAX_N_MAX
            }
        };
        Self { n_max, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Number of basis states per mode.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn doubled(&self) -> Self {
        Self { n_max: 2 * self.n_max, tail_tol: self.tail_tol }
    }

    pub fn with_tail_tol(self, tail_tol: f64) -> Result<Self> {
        Self::new(self.n_max, tail_tol)
    }
}

/// Squeezing parameter ζ = r·e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeSpec {
    r: f64,
    phi: f64,
}

impl SqueezeSpec {
    /// `phi` is wrapped into [0, 2π).
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { r, phi })
    }

    /// ζ = i·r, the squeezer produced by the beam-splitter sandwich.
    pub fn imaginary(r: f64) -> Result<Self> {
        Self::new(r, FRAC_PI_2)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn zeta(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }
}

/// Complex displacement amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplaceSpec {
    delta: C64,
}

impl DisplaceSpec {
    pub fn new(delta: C64) -> Result<Self> {
        if !(delta.re.is_finite() && delta.im.is_finite()) {
            return Err(Error::invalid("delta", "displacement must be finite"));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> C64 {
        self.delta
    }
}

/// Phase of a 50-50 beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamSplitterSpec {
    delta_bs: f64,
}

impl BeamSplitterSpec {
    /// Mixing angle of every beam splitter here.
    pub const MIXING_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

    pub fn new(delta_bs: f64) -> Result<Self> {
        if !delta_bs.is_finite() {
            return Err(Error::invalid("delta_bs", "must be finite"));
        }
        Ok(Self { delta_bs })
    }

    pub fn delta_bs(&self) -> f64 {
        self.delta_bs
    }
}

/// Single-mode ket over photon numbers `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeAmplitudes {
    amp: Vec<C64>,
}

impl SingleModeAmplitudes {
    pub fn new(amp: Vec<C64>) -> Self {
        Self { amp }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.amp
    }

    pub fn n_max(&self) -> usize {
        self.amp.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl std::ops::Index<usize> for SingleModeAmplitudes {
    type Output = C64;

    fn index(&self, n: usize) -> &C64 {
        &self.amp[n]
    }
}

/// Two-mode ket indexed by `(n_a, n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeAmplitudes {
    amp: Array2<C64>,
    cutoff: FockCutoff,
}

impl TwoModeAmplitudes {
    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn n_max(&self) -> usize {
        self.cutoff.n_max
    }

    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amp
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> C64 {
        self.amp[[n_a, n_b]]
    }

    pub fn probability(&self, n_a: usize, n_b: usize) -> f64 {
        self.amp[[n_a, n_b]].norm_sqr()
    }

    /// Joint photon-number distribution |μ(n_a, n_b)|².
    pub fn probabilities(&self) -> Array2<f64> {
        self.amp.mapv(|a| a.norm_sqr())
    }

    /// 1 − Σ|amp|²; can be a few ulps negative from rounding.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }
}

fn displacement_amplitudes(delta: C64, n_max: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n_max + 1];
    let mag = delta.norm();
    if mag == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let ln_mag = mag.ln();
    let arg = delta.arg();
    let base = -0.5 * mag * mag;
    for (m, slot) in out.iter_mut().enumerate() {
        let ln_abs = base + m as f64 * ln_mag - 0.5 * ln_factorial(m);
        *slot = C64::from_polar(ln_abs.exp(), m as f64 * arg);
    }
    out
}

/// ⟨m|D(δ)|0⟩ for m = 0..=n_max.
///
/// Fails with [`Error::Truncation`] if the last retained amplitude carries
/// more than `tail_tol` probability.
pub fn displacement_column(delta: &DisplaceSpec, cutoff: &FockCutoff) -> Result<SingleModeAmplitudes> {
    let amp = displacement_amplitudes(delta.delta, cutoff.n_max);
    let last = amp[cutoff.n_max].norm_sqr();
    if last > cutoff.tail_tol {
        return Err(Error::Truncation { leakage: last, tol: cutoff.tail_tol, n_max: cutoff.n_max });
    }
    Ok(SingleModeAmplitudes { amp })
}

/// Precomputed pieces of the two-mode squeezing closed form.
#[derive(Debug, Clone, Copy)]
struct SqueezeKernel {
    /// `None` at r = 0, where only the zeroth-order term survives.
    ln_tanh: Option<f64>,
    ln_cosh: f64,
    phi: f64,
}

impl SqueezeKernel {
    fn new(sq: &SqueezeSpec) -> Self {
        let ln_tanh = if sq.r == 0.0 { None } else { Some(sq.r.tanh().ln()) };
        // ln cosh r = r + ln(1 + e^{-2r}) − ln 2, stable for large r
        let ln_cosh = sq.r + (-2.0 * sq.r).exp().ln_1p() - std::f64::consts::LN_2;
        Self { ln_tanh, ln_cosh, phi: sq.phi }
    }

    fn element(&self, n_a: usize, n_b: usize, m_a: usize, m_b: usize) -> C64 {
        let shift = n_a as i64 - m_a as i64;
        if shift != n_b as i64 - m_b as i64 {
            return C64::new(0.0, 0.0);
        }
        // n − m = shift on every surviving term, so the phase factors out.
        let lo = shift.max(0) as usize;
        let hi = n_a.min(n_b);
        let common = 0.5 * (ln_factorial(n_a) + ln_factorial(n_b) + ln_factorial(m_a) + ln_factorial(m_b));
        let mut sum = 0.0;
        for n in lo..=hi {
            let m = (n as i64 - shift) as usize;
            let power = n + m;
            let ln_t = match self.ln_tanh {
                Some(lt) => power as f64 * lt,
                None if power == 0 => 0.0,
                None => continue,
            };
            let ln_abs = ln_t - (m_a + m_b + 1 - 2 * m) as f64 * self.ln_cosh + common
                - ln_factorial(n)
                - ln_factorial(m)
                - ln_factorial(n_a - n)
                - ln_factorial(n_b - n);
            let term = ln_abs.exp();
            if n % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        C64::from_polar(sum, shift as f64 * self.phi)
    }
}

/// ⟨n_a, n_b| S_ab(ζ) |m_a, m_b⟩ for S_ab(ζ) = exp(−ζ a†b† + ζ* ab).
///
/// Exactly zero unless n_a − n_b = m_a − m_b.
pub fn two_mode_squeeze_element(n_a: usize, n_b: usize, m_a: usize, m_b: usize, sq: &SqueezeSpec) -> C64 {
    SqueezeKernel::new(sq).element(n_a, n_b, m_a, m_b)
}

/// Output state S_ab(ζ) D_a(β) D_b(−β)|0,0⟩ with β = (α/2)(1 − i).
///
/// With ζ = i·r this is the state leaving the second beam splitter when a
/// coherent beam |α⟩ enters the circuit. Fails with [`Error::Truncation`] if
/// more than `tail_tol` probability falls outside the cutoff.
pub fn prepare_final_state(alpha: f64, sq: &SqueezeSpec, cutoff: &FockCutoff) -> Result<TwoModeAmplitudes> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("must be real, finite and >= 0, got {alpha}")));
    }
    let n_max = cutoff.n_max;
    let beta = C64::new(0.5 * alpha, -0.5 * alpha);
    let d_a = displacement_amplitudes(beta, n_max);
    let d_b = displacement_amplitudes(-beta, n_max);
    let support = d_a.iter().rposition(|a| a.norm() > AMPLITUDE_FLOOR).unwrap_or(0);

    let kernel = SqueezeKernel::new(sq);
    let mut amp = Array2::<C64>::zeros((n_max + 1, n_max + 1));
    for n_a in 0..=n_max {
        let nb_lo = n_a.saturating_sub(support);
        let nb_hi = (n_a + support).min(n_max);
        for n_b in nb_lo..=nb_hi {
            let shift = n_a as i64 - n_b as i64;
            // m_b = m_a − shift must lie in [0, support]
            let ma_lo = shift.max(0) as usize;
            let ma_hi = (support as i64 + shift).min(support as i64) as usize;
            let mut mu = C64::new(0.0, 0.0);
            for (m_a, &da) in d_a.iter().enumerate().take(ma_hi + 1).skip(ma_lo) {
                let m_b = (m_a as i64 - shift) as usize;
                mu += kernel.element(n_a, n_b, m_a, m_b) * da * d_b[m_b];
            }
            amp[[n_a, n_b]] = mu;
        }
    }

    let state = TwoModeAmplitudes { amp, cutoff: *cutoff };
    let deficit = state.norm_deficit();
    if deficit > cutoff.tail_tol {
        return Err(Error::Truncation { leakage: deficit, tol: cutoff.tail_tol, n_max });
    }
    Ok(state)
}

/// [`prepare_final_state`] starting at `start` and doubling the cutoff until
/// the leakage tolerance is met or [`MAX_N_MAX`] is exceeded.
pub fn prepare_final_state_adaptive(alpha: f64, sq: &SqueezeSpec, start: &FockCutoff) -> Result<TwoModeAmplitudes> {
    let mut cutoff = *start;
    loop {
        match prepare_final_state(alpha, sq, &cutoff) {
            Err(Error::Truncation { .. }) if cutoff.n_max * 2 <= MAX_N_MAX => cutoff = cutoff.doubled(),
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cutoff(n: usize) -> FockCutoff {
        FockCutoff::new(n, DEFAULT_TAIL_TOL).unwrap()
    }

    #[test]
    fn cutoff_validation() {
        assert!(FockCutoff::new(0, 1e-8).is_err());
        assert!(FockCutoff::new(4, 0.0).is_err());
        assert!(FockCutoff::new(4, f64::NAN).is_err());
        assert_eq!(FockCutoff::for_squeezing(0.9).n_max(), 64);
        assert_eq!(FockCutoff::for_squeezing(1.5).n_max(), 160);
        assert!(FockCutoff::for_squeezing(2.0).n_max() > 160);
    }

    #[test]
    fn squeeze_spec_wraps_phase() {
        let s = SqueezeSpec::new(0.5, -FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(s.phi(), 1.5 * std::f64::consts::PI, epsilon = 1e-15);
        assert!(SqueezeSpec::new(-0.1, 0.0).is_err());
        assert!(SqueezeSpec::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn displacement_of_zero_is_vacuum() {
        let col = displacement_column(&DisplaceSpec::new(C64::new(0.0, 0.0)).unwrap(), &cutoff(8)).unwrap();
        assert_eq!(col[0], C64::new(1.0, 0.0));
        assert!(col.as_slice()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn displacement_of_one() {
        let col = displacement_column(&DisplaceSpec::new(C64::new(1.0, 0.0)).unwrap(), &cutoff(24)).unwrap();
        let e = (-0.5f64).exp();
        assert_abs_diff_eq!(col[0].re, e, epsilon = 1e-15);
        assert_abs_diff_eq!(col[1].re, e, epsilon = 1e-15);
        assert_abs_diff_eq!(col[2].re, e / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(col[2].re, 0.42888, epsilon = 1e-5);
    }

    #[test]
    fn displacement_truncation_error() {
        let err = displacement_column(&DisplaceSpec::new(C64::new(3.0, 0.0)).unwrap(), &cutoff(4)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn squeeze_vacuum_element_is_sech() {
        for &r in &[0.0, 0.3, 1.5, 4.0] {
            let s = SqueezeSpec::new(r, 0.7).unwrap();
            let v = two_mode_squeeze_element(0, 0, 0, 0, &s);
            assert_abs_diff_eq!(v.re, 1.0 / r.cosh(), epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn squeeze_diagonal_column_matches_series() {
        let r = 0.9;
        let s = SqueezeSpec::imaginary(r).unwrap();
        for n in 0..12 {
            let expect = C64::new(0.0, -r.tanh()).powu(n as u32) / r.cosh();
            let got = two_mode_squeeze_element(n, n, 0, 0, &s);
            assert!((got - expect).norm() < 1e-14, "n = {n}: {got} vs {expect}");
        }
    }

    #[test]
    fn squeeze_selection_rule() {
        let s = SqueezeSpec::new(0.7, 0.3).unwrap();
        assert_eq!(two_mode_squeeze_element(2, 1, 0, 0, &s), C64::new(0.0, 0.0));
        assert_eq!(two_mode_squeeze_element(3, 1, 2, 2, &s), C64::new(0.0, 0.0));
    }

    #[test]
    fn squeeze_identity_at_zero() {
        let s = SqueezeSpec::new(0.0, 1.0).unwrap();
        for n_a in 0..5 {
            for n_b in 0..5 {
                for m_a in 0..5 {
                    for m_b in 0..5 {
                        let v = two_mode_squeeze_element(n_a, n_b, m_a, m_b, &s);
                        let e = if n_a == m_a && n_b == m_b { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(v.re, e, epsilon = 1e-15);
                        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn vacuum_in_vacuum_out() {
        let s = SqueezeSpec::imaginary(0.0).unwrap();
        let st = prepare_final_state(0.0, &s, &cutoff(8)).unwrap();
        assert_eq!(st.amplitude(0, 0), C64::new(1.0, 0.0));
        assert_abs_diff_eq!(st.norm_deficit(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_vacuum_is_diagonal() {
        let r = 0.6;
        let s = SqueezeSpec::imaginary(r).unwrap();
        let st = prepare_final_state(0.0, &s, &cutoff(64)).unwrap();
        for n_a in 0..=20 {
            for n_b in 0..=20 {
                let a = st.amplitude(n_a, n_b);
                if n_a == n_b {
                    let e = C64::new(0.0, -r.tanh()).powu(n_a as u32) / r.cosh();
                    assert!((a - e).norm() < 1e-14);
                } else {
                    assert_eq!(a.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn herald_pair_probability_near_quarter() {
        let s = SqueezeSpec::imaginary(0.883).unwrap();
        let st = prepare_final_state(0.06, &s, &cutoff(64)).unwrap();
        assert!((st.probability(1, 1) - 0.249).abs() < 1e-3);
    }

    #[test]
    fn truncation_reported() {
        let s = SqueezeSpec::imaginary(1.5).unwrap();
        let err = prepare_final_state(0.06, &s, &cutoff(20)).unwrap_err();
        assert!(matches!(err, Error::Truncation { n_max: 20, .. }));
        let st = prepare_final_state_adaptive(0.06, &s, &cutoff(20)).unwrap();
        assert!(st.n_max() >= 80);
        assert!(st.norm_deficit() <= DEFAULT_TAIL_TOL);
    }

    #[test]
    fn rejects_negative_alpha() {
        let s = SqueezeSpec::imaginary(0.5).unwrap();
        assert!(matches!(prepare_final_state(-0.1, &s, &cutoff(8)), Err(Error::InvalidParameter { .. })));
    }
}
