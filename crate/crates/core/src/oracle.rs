//! Brute-force operator exponentials on a truncated two-mode Fock space.
//!
//! Every generator is built from truncated ladder operators and
//! exponentiated directly, with no use of the closed forms in
//! [`crate::fock`]. The generators conserve a photon-number combination
//! (total number, number difference, parity), so the truncated matrix is
//! split into its connected blocks and each block is exponentiated on its
//! own. The result is identical to exponentiating the full dense matrix.

use std::f64::consts::FRAC_PI_4;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{BeamSplitterSpec, SqueezeSpec};

/// Largest interior-element change tolerated when the cutoff is doubled.
pub const ORACLE_TOL: f64 = 1e-8;

/// Generators understood by [`two_mode_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// δ a† − δ* a
    DisplaceA(C64),
    /// δ b† − δ* b
    DisplaceB(C64),
    /// −(ζ/2) a†² + (ζ*/2) a²
    SqueezeA(SqueezeSpec),
    /// −(ζ/2) b†² + (ζ*/2) b²
    SqueezeB(SqueezeSpec),
    /// −ζ a†b† + ζ* ab
    SqueezeAB(SqueezeSpec),
    /// (π/4)(e^{iδ} a†b − e^{−iδ} ab†)
    BeamSplitter(BeamSplitterSpec),
}

/// Dense matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.mapv(|x| x / 2f64.powi(squarings));

    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..64 {
        term = term.dot(&scaled).mapv(|x| x / k as f64);
        result += &term;
        if one_norm(&term) < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Sparse triplets of a generator on the (n_max+1)² two-mode space.
fn generator_entries(generator: &Generator, n_max: usize) -> Vec<(usize, usize, C64)> {
    let dim = n_max + 1;
    let idx = |n_a: usize, n_b: usize| n_a * dim + n_b;
    let sq = |n: usize| (n as f64).sqrt();
    let mut out = Vec::new();
    for n_a in 0..dim {
        for n_b in 0..dim {
            let col = idx(n_a, n_b);
            match *generator {
                Generator::DisplaceA(d) => {
                    if n_a < n_max {
                        out.push((idx(n_a + 1, n_b), col, d * sq(n_a + 1)));
                    }
                    if n_a > 0 {
                        out.push((idx(n_a - 1, n_b), col, -d.conj() * sq(n_a)));
                    }
                }
                Generator::DisplaceB(d) => {
                    if n_b < n_max {
                        out.push((idx(n_a, n_b + 1), col, d * sq(n_b + 1)));
                    }
                    if n_b > 0 {
                        out.push((idx(n_a, n_b - 1), col, -d.conj() * sq(n_b)));
                    }
                }
                Generator::SqueezeA(s) => {
                    let z = s.zeta();
                    if n_a + 2 <= n_max {
                        out.push((idx(n_a + 2, n_b), col, -0.5 * z * sq((n_a + 1) * (n_a + 2))));
                    }
                    if n_a >= 2 {
                        out.push((idx(n_a - 2, n_b), col, 0.5 * z.conj() * sq(n_a * (n_a - 1))));
                    }
                }
                Generator::SqueezeB(s) => {
                    let z = s.zeta();
                    if n_b + 2 <= n_max {
                        out.push((idx(n_a, n_b + 2), col, -0.5 * z * sq((n_b + 1) * (n_b + 2))));
                    }
                    if n_b >= 2 {
                        out.push((idx(n_a, n_b - 2), col, 0.5 * z.conj() * sq(n_b * (n_b - 1))));
                    }
                }
                Generator::SqueezeAB(s) => {
                    let z = s.zeta();
                    if n_a < n_max && n_b < n_max {
                        out.push((idx(n_a + 1, n_b + 1), col, -z * sq(n_a + 1) * sq(n_b + 1)));
                    }
                    if n_a > 0 && n_b > 0 {
                        out.push((idx(n_a - 1, n_b - 1), col, z.conj() * sq(n_a) * sq(n_b)));
                    }
                }
                Generator::BeamSplitter(bs) => {
                    let e = C64::from_polar(FRAC_PI_4, bs.delta_bs());
                    // a†b
                    if n_a < n_max && n_b > 0 {
                        out.push((idx(n_a + 1, n_b - 1), col, e * sq(n_a + 1) * sq(n_b)));
                    }
                    // −ab†
                    if n_a > 0 && n_b < n_max {
                        out.push((idx(n_a - 1, n_b + 1), col, -e.conj() * sq(n_a) * sq(n_b + 1)));
                    }
                }
            }
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[derive(Debug, Clone)]
struct Block {
    states: Vec<usize>,
    matrix: Array2<C64>,
}

/// Block-diagonal operator on a truncated two-mode space.
#[derive(Debug, Clone)]
pub struct OracleOperator {
    n_max: usize,
    blocks: Vec<Block>,
    /// (block, position within block) for every basis state
    location: Vec<(usize, usize)>,
}

impl OracleOperator {
    /// exp(G) for the generator's truncated matrix.
    pub fn exponentiate(generator: &Generator, n_max: usize) -> Self {
        let dim = (n_max + 1) * (n_max + 1);
        let entries = generator_entries(generator, n_max);

        let mut parent: Vec<usize> = (0..dim).collect();
        for &(i, j, _) in &entries {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
        let mut block_of_root = vec![usize::MAX; dim];
        let mut location = vec![(0, 0); dim];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (s, loc) in location.iter_mut().enumerate() {
            let root = find(&mut parent, s);
            if block_of_root[root] == usize::MAX {
                block_of_root[root] = members.len();
                members.push(Vec::new());
            }
            let b = block_of_root[root];
            *loc = (b, members[b].len());
            members[b].push(s);
        }
        let mut gens: Vec<Array2<C64>> = members.iter().map(|m| Array2::zeros((m.len(), m.len()))).collect();
        for &(i, j, v) in &entries {
            let (b, li) = location[i];
            let (_, lj) = location[j];
            gens[b][[li, lj]] += v;
        }
        let blocks = members
            .into_iter()
            .zip(gens)
            .map(|(states, g)| Block { states, matrix: expm(&g) })
            .collect();
        Self { n_max, blocks, location }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.n_max + 1) + n_b
    }

    /// ⟨n_a, n_b| U |m_a, m_b⟩
    pub fn element(&self, n_a: usize, n_b: usize, m_a: usize, m_b: usize) -> C64 {
        let (bi, li) = self.location[self.index(n_a, n_b)];
        let (bj, lj) = self.location[self.index(m_a, m_b)];
        if bi != bj {
            return C64::new(0.0, 0.0);
        }
        self.blocks[bi].matrix[[li, lj]]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block { states: b.states.clone(), matrix: b.matrix.t().mapv(|x| x.conj()) })
            .collect();
        Self { n_max: self.n_max, blocks, location: self.location.clone() }
    }

    /// U·v for a state vector in row-major (n_a, n_b) order.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        let mut out = Array1::<C64>::zeros(v.len());
        for block in &self.blocks {
            let local: Array1<C64> = block.states.iter().map(|&s| v[s]).collect();
            let res = block.matrix.dot(&local);
            for (&s, r) in block.states.iter().zip(res.iter()) {
                out[s] = *r;
            }
        }
        out
    }

    /// The full dense matrix; only sensible for small cutoffs.
    pub fn to_dense(&self) -> Array2<C64> {
        let dim = (self.n_max + 1) * (self.n_max + 1);
        let mut out = Array2::zeros((dim, dim));
        for block in &self.blocks {
            for (li, &i) in block.states.iter().enumerate() {
                for (lj, &j) in block.states.iter().enumerate() {
                    out[[i, j]] = block.matrix[[li, lj]];
                }
            }
        }
        out
    }

    /// Basis vector |n_a, n_b⟩.
    pub fn basis(&self, n_a: usize, n_b: usize) -> Array1<C64> {
        let mut v = Array1::zeros((self.n_max + 1) * (self.n_max + 1));
        v[self.index(n_a, n_b)] = C64::new(1.0, 0.0);
        v
    }
}

/// exp(G) on a two-mode truncation with per-mode cutoff `n_max`, checked
/// against a second evaluation at `2·n_max`.
///
/// Every element with all four photon indices `<= interior` must move by at
/// most [`ORACLE_TOL`] under the doubling, otherwise
/// [`Error::Convergence`] is returned. Requires `n_max >= 2·interior`.
pub fn two_mode_oracle(generator: &Generator, n_max: usize, interior: usize) -> Result<OracleOperator> {
    if n_max < 2 * interior || n_max == 0 {
        return Err(Error::invalid(
            "n_max",
            format!("oracle cutoff {n_max} must be at least twice the largest index under test ({interior})"),
        ));
    }
    let coarse = OracleOperator::exponentiate(generator, n_max);
    let fine = OracleOperator::exponentiate(generator, 2 * n_max);
    let mut worst = 0.0f64;
    for n_a in 0..=interior {
        for n_b in 0..=interior {
            for m_a in 0..=interior {
                for m_b in 0..=interior {
                    let d = (coarse.element(n_a, n_b, m_a, m_b) - fine.element(n_a, n_b, m_a, m_b)).norm();
                    worst = worst.max(d);
                }
            }
        }
    }
    if worst > ORACLE_TOL {
        return Err(Error::Convergence(format!(
            "oracle interior elements moved by {worst:.3e} when the cutoff was doubled from {n_max}"
        )));
    }
    Ok(coarse)
}
