//! Photon-counting statistics of the heralded source.
//!
//! Mode b carries the heralding detector, mode a the emitted photons. With
//! a perfect detector the herald is the projector |1⟩⟨1| on mode b. With an
//! inefficient click detector it is the geometric POVM element
//! M = η Σ_{k≥1} (1−η)^{k−1} |k⟩⟨k|.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{prepare_final_state_adaptive, FockCutoff, SqueezeSpec};

/// Default cap on the heralding photon-number sum.
pub const DEFAULT_K_MAX: usize = 200;

/// Largest admissible neglected click weight.
pub const CLICK_TAIL_TOL: f64 = 1e-10;

/// Source and detector parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceParams {
    alpha: f64,
    r: f64,
    eta: f64,
    cutoff: FockCutoff,
    k_max: usize,
}

impl SourceParams {
    /// Real coherent amplitude `alpha`, squeezing `r`, detector efficiency
    /// `eta`. Cutoff and `k_max` take their defaults.
    pub fn new(alpha: f64, r: f64, eta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be real, finite and >= 0, got {alpha}")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be finite and >= 0, got {r}")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid("eta", format!("must lie in [0, 1], got {eta}")));
        }
        Ok(Self { alpha, r, eta, cutoff: FockCutoff::for_squeezing(r), k_max: DEFAULT_K_MAX })
    }

    pub fn with_cutoff(mut self, cutoff: FockCutoff) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_k_max(mut self, k_max: usize) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::invalid("k_max", "must be at least 1"));
        }
        self.k_max = k_max;
        Ok(self)
    }

    pub fn with_r(self, r: f64) -> Result<Self> {
        let base = Self::new(self.alpha, r, self.eta)?;
        let cutoff = base.cutoff.with_tail_tol(self.cutoff.tail_tol())?;
        Ok(Self { cutoff, k_max: self.k_max, ..base })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self { alpha, ..self }.validated()
    }

    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self { eta, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        Self::new(self.alpha, self.r, self.eta)?;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

/// Probability over emitted photon number n.
///
/// `p` is not renormalized: for a heralded distribution its sum is the
/// heralding probability. `leakage` bounds the probability lost to the
/// Fock truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    pub p: Vec<f64>,
    pub leakage: f64,
}

impl CountDistribution {
    /// Σ p[n].
    pub fn mass(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Σ nˡ p[n], unnormalized.
    pub fn raw_moment(&self, l: i32) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| (n as f64).powi(l) * p).sum()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.p.get(n).copied().unwrap_or(0.0)
    }

    pub fn moments(&self) -> Moments {
        let mean = self.raw_moment(1);
        let second = self.raw_moment(2);
        let mass = self.mass();
        let (norm_mean, norm_second) = if mass > 0.0 { (mean / mass, second / mass) } else { (0.0, 0.0) };
        Moments { mean, second, mass, norm_mean, norm_second }
    }
}

/// First two moments of a count distribution, raw and post-selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    /// Σ n p[n]
    pub mean: f64,
    /// Σ n² p[n]
    pub second: f64,
    /// Σ p[n], the heralding probability
    pub mass: f64,
    /// mean / mass
    pub norm_mean: f64,
    /// second / mass
    pub norm_second: f64,
}

impl Moments {
    /// (⟨n²⟩ − ⟨n⟩)/⟨n⟩² from the raw moments.
    pub fn g2(&self) -> Result<f64> {
        if self.mean <= 0.0 {
            return Err(Error::Degenerate("mean heralded photon number is zero".into()));
        }
        Ok((self.second - self.mean) / (self.mean * self.mean))
    }

    /// Same ratio from the renormalized moments; equals `g2() * mass`.
    pub fn g2_renormalized(&self) -> Result<f64> {
        if self.norm_mean <= 0.0 {
            return Err(Error::Degenerate("mean heralded photon number is zero".into()));
        }
        Ok((self.norm_second - self.norm_mean) / (self.norm_mean * self.norm_mean))
    }
}

/// Joint distribution P(n_a, n_b) of the output state.
#[derive(Debug, Clone)]
pub struct JointTable {
    probs: Array2<f64>,
    leakage: f64,
}

impl JointTable {
    pub fn compute(params: &SourceParams) -> Result<Self> {
        let sq = SqueezeSpec::imaginary(params.r)?;
        let state = prepare_final_state_adaptive(params.alpha, &sq, &params.cutoff)?;
        Ok(Self { probs: state.probabilities(), leakage: state.norm_deficit().max(0.0) })
    }

    pub fn n_max(&self) -> usize {
        self.probs.nrows() - 1
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn probabilities(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a > self.n_max() || n_b > self.n_max() {
            0.0
        } else {
            self.probs[[n_a, n_b]]
        }
    }

    /// P(n, k) for fixed herald count k.
    pub fn herald_column(&self, k: usize) -> CountDistribution {
        let p = (0..=self.n_max()).map(|n| self.get(n, k)).collect();
        CountDistribution { p, leakage: self.leakage }
    }

    /// η Σ_{k=1}^{k_max} (1−η)^{k−1} P(n, k).
    pub fn click(&self, eta: f64, k_max: usize) -> Result<CountDistribution> {
        let n_max = self.n_max();
        let k_top = k_max.min(n_max);
        let residual: f64 = (k_top + 1..=n_max).map(|k| self.probs.column(k).sum()).sum::<f64>() + self.leakage;
        let bound = eta * (1.0 - eta).powi(k_max as i32) * residual;
        if bound >= CLICK_TAIL_TOL {
            return Err(Error::Convergence(format!(
                "click sum truncated at k_max = {k_max} leaves weight bound {bound:.3e} (eta = {eta})"
            )));
        }
        let mut p = vec![0.0; n_max + 1];
        for k in 1..=k_top {
            let w = povm_click_weight(eta, k);
            if w == 0.0 {
                continue;
            }
            for (n, slot) in p.iter_mut().enumerate() {
                *slot += w * self.probs[[n, k]];
            }
        }
        Ok(CountDistribution { p, leakage: self.leakage })
    }

    /// Σ_k (1 − M_k) P(n, k), the complementary "no click" outcome.
    pub fn no_click(&self, eta: f64) -> CountDistribution {
        let n_max = self.n_max();
        let mut p = vec![0.0; n_max + 1];
        for k in 0..=n_max {
            let w = 1.0 - povm_click_weight(eta, k);
            for (n, slot) in p.iter_mut().enumerate() {
                *slot += w * self.probs[[n, k]];
            }
        }
        CountDistribution { p, leakage: self.leakage }
    }
}

/// Diagonal element ⟨k|M|k⟩ of the click POVM element.
pub fn povm_click_weight(eta: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        eta * (1.0 - eta).powi(k as i32 - 1)
    }
}

/// 1 − Σ_{k=1}^{k_max} ⟨k|M|k⟩ = (1−η)^{k_max}.
pub fn povm_weight_deficit(eta: f64, k_max: usize) -> f64 {
    (1.0 - eta).powi(k_max as i32)
}

/// P(n_a, n_b; r, α) = |μ(n_a, n_b)|².
pub fn joint_probability(n_a: usize, n_b: usize, params: &SourceParams) -> Result<f64> {
    let n_max = params.cutoff.n_max();
    if n_a > n_max || n_b > n_max {
        return Err(Error::invalid("n_a/n_b", format!("indices ({n_a}, {n_b}) exceed n_max = {n_max}")));
    }
    Ok(JointTable::compute(params)?.get(n_a, n_b))
}

/// p[n] = P(n, 1): emission statistics given a perfect single-photon herald.
pub fn herald_distribution(params: &SourceParams) -> Result<CountDistribution> {
    Ok(JointTable::compute(params)?.herald_column(1))
}

/// P_click(n; r, α, η).
pub fn click_distribution(params: &SourceParams) -> Result<CountDistribution> {
    JointTable::compute(params)?.click(params.eta, params.k_max)
}

/// g²(0) of the emitted mode with a perfect herald.
///
/// At r = 0 the two modes are independent coherent states and the emitted
/// mode has g² = 1; that value is returned directly.
pub fn g2_perfect(params: &SourceParams) -> Result<f64> {
    if let Some(v) = coherent_g2(params, 1.0) {
        return v;
    }
    herald_distribution(params)?.moments().g2()
}

/// g²(0) of the emitted mode with the click-detector herald.
pub fn g2_click(params: &SourceParams) -> Result<f64> {
    if let Some(v) = coherent_g2(params, params.eta) {
        return v;
    }
    click_distribution(params)?.moments().g2()
}

/// Product-coherent-state answer for r = 0.
pub(crate) fn coherent_g2(params: &SourceParams, eta: f64) -> Option<Result<f64>> {
    if params.r != 0.0 {
        return None;
    }
    if params.alpha == 0.0 || eta == 0.0 {
        return Some(Err(Error::Degenerate("no heralded photons at r = 0 with this input".into())));
    }
    Some(Ok(1.0))
}
