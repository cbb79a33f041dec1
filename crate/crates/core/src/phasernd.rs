//! Discrete phase randomization: how close `R` equally spaced phases come to
//! the continuous phase-randomized coherent state, and how large `R` must be.
//!
//! With `p_n = e^{−α²} α^{2n} / n!`, the discrete mixture is block-diagonal in
//! the residues `n mod R`, which gives the per-pulse fidelity
//! `(Σ_{j<R} √(Σ_k p_{kR+j}²))²`. Factorials are handled in the log domain.

use serde::{Deserialize, Serialize};

use crate::qcore::{c, matrix_fidelity, CMatrix, DensityMatrix, ZERO};
use crate::{Error, Result};

/// Smallest `R` for which the closed-form lower bound is valid (`R ≥ e² + 1`).
pub const MIN_VALID_R: usize = 9;

pub const DEFAULT_FOCK_CUTOFF: usize = 40;

/// Largest tail mass tolerated by the Fock-space oracle.
pub const TAIL_TOL: f64 = 1e-20;

/// Terms of the inner series smaller than this are dropped.
const TERM_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRandConfig {
    pub alpha: f64,
    pub r: usize,
    pub fock_cutoff: usize,
}

impl PhaseRandConfig {
    pub fn new(alpha: f64, r: usize) -> Result<Self> {
        let cfg = Self {
            alpha,
            r,
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidParameter(format!(
                "R = {} must be at least 2",
                self.r
            )));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must be ≥ 0",
                self.alpha
            )));
        }
        let tail = poisson_tail(self.alpha, self.fock_cutoff);
        if tail >= TAIL_TOL {
            return Err(Error::InvalidParameter(format!(
                "Fock cutoff {} leaves tail mass {tail:.3e}",
                self.fock_cutoff
            )));
        }
        Ok(())
    }
}

fn ln_poisson(alpha: f64, n: usize, ln_fact: f64) -> f64 {
    let a2 = alpha * alpha;
    if alpha == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -a2 + 2.0 * n as f64 * alpha.ln() - ln_fact
}

/// `ln n!` for `n = 0..=max`.
fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson mass above `cutoff`.
pub fn poisson_tail(alpha: f64, cutoff: usize) -> f64 {
    let fact = ln_factorials(cutoff + 400);
    ((cutoff + 1)..fact.len())
        .map(|n| ln_poisson(alpha, n, fact[n]).exp())
        .sum()
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln Σ_{j<R} √(Σ_k p_{kR+j}²)`.
fn ln_base(r: usize, alpha: f64) -> f64 {
    let ln_floor = (TERM_FLOOR * TERM_FLOOR).ln();
    let n_max = 200usize.max(4 * r);
    let fact = ln_factorials(n_max);
    let mut per_class = Vec::with_capacity(r);
    for j in 0..r {
        let mut squares = Vec::new();
        let mut n = j;
        let mut past_peak = false;
        while n <= n_max {
            let term = 2.0 * ln_poisson(alpha, n, fact[n]);
            if term < ln_floor && (past_peak || n as f64 > alpha * alpha) {
                break;
            }
            if n as f64 >= alpha * alpha {
                past_peak = true;
            }
            squares.push(term);
            n += r;
        }
        per_class.push(0.5 * log_sum_exp(&squares));
    }
    log_sum_exp(&per_class).min(0.0)
}

/// Per-pulse fidelity between the continuous and `R`-phase mixtures.
pub fn pulse_fidelity(r: usize, alpha: f64) -> Result<f64> {
    if r < 1 {
        return Err(Error::InvalidParameter("R must be positive".into()));
    }
    Ok((2.0 * ln_base(r, alpha)).exp())
}

/// `{Σ_j √(Σ_k [e^{-1}/(kR+j)!]²)}^{2mN}` at `α = 1`.
pub fn fidelity_series(r: usize, m: usize, n: usize) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "R = {r} must be at least 2"
        )));
    }
    Ok((2.0 * (m * n) as f64 * ln_base(r, 1.0)).exp())
}

/// Builds both mixtures in the truncated number basis and evaluates their
/// fidelity directly.
pub fn fock_oracle_fidelity(r: usize, alpha: f64, cutoff: usize) -> Result<f64> {
    if r < 1 {
        return Err(Error::InvalidParameter("R must be positive".into()));
    }
    let tail = poisson_tail(alpha, cutoff);
    if tail >= TAIL_TOL {
        return Err(Error::InvalidParameter(format!(
            "Fock cutoff {cutoff} leaves tail mass {tail:.3e}"
        )));
    }
    let dim = cutoff + 1;
    let fact = ln_factorials(cutoff);
    let amp: Vec<f64> = (0..dim)
        .map(|n| (0.5 * ln_poisson(alpha, n, fact[n])).exp())
        .collect();
    let norm: f64 = amp.iter().map(|a| a * a).sum();

    let mut diag = CMatrix::from_element(dim, dim, ZERO);
    for n in 0..dim {
        diag[(n, n)] = c(amp[n] * amp[n] / norm, 0.0);
    }
    let mut mix = CMatrix::from_element(dim, dim, ZERO);
    for k in 0..r {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / r as f64;
        let v: Vec<_> = (0..dim)
            .map(|n| {
                let (s, co) = (theta * n as f64).sin_cos();
                c(co, s) * (amp[n] / norm.sqrt())
            })
            .collect();
        for a in 0..dim {
            for b in 0..dim {
                mix[(a, b)] += v[a] * v[b].conj() / r as f64;
            }
        }
    }
    let rho_inf = DensityMatrix::new(diag)?;
    let rho_r = DensityMatrix::new(hermitize(mix))?;
    matrix_fidelity(&rho_inf, &rho_r)
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).scale(0.5)
}

/// `1 − 2mN (e/(R−1))^{R−1}`.
pub fn f_min(m: usize, n: usize, r: usize) -> Result<f64> {
    if r < MIN_VALID_R {
        return Err(Error::InvalidParameter(format!(
            "R = {r} is below the validity threshold {MIN_VALID_R}"
        )));
    }
    let k = (r - 1) as f64;
    let ln_term = k * (std::f64::consts::E / k).ln();
    Ok(1.0 - 2.0 * (m * n) as f64 * ln_term.exp())
}

/// `√(1 − F_min)`, the bound on how far acceptance can move.
pub fn shift_bound(m: usize, n: usize, r: usize) -> Result<f64> {
    Ok((1.0 - f_min(m, n, r)?).max(0.0).sqrt())
}

/// `max(9, ⌈ln(32 m N³ f² / (N−1)²) + 1⌉)`.
pub fn required_r(m: usize, n: usize, f: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "N = {n} must be at least 2"
        )));
    }
    if !(f.is_finite() && f >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "f = {f} must be at least 1"
        )));
    }
    let (mf, nf) = (m as f64, n as f64);
    let arg = 32.0 * mf * nf.powi(3) * f * f / ((nf - 1.0) * (nf - 1.0));
    let r = (arg.ln() + 1.0).ceil();
    Ok((r.max(0.0) as usize).max(MIN_VALID_R))
}

/// One row of the sizing table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRow {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub f: f64,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "F_series")]
    pub f_series: f64,
    #[serde(rename = "F_min")]
    pub f_min: f64,
    pub shift_bound: f64,
}

pub fn param_row(m: usize, n: usize, f: f64) -> Result<ParamRow> {
    let r = required_r(m, n, f)?;
    Ok(ParamRow {
        m,
        n,
        f,
        r,
        f_series: fidelity_series(r, m, n)?,
        f_min: f_min(m, n, r)?,
        shift_bound: shift_bound(m, n, r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_limit() {
        let f = pulse_fidelity(DEFAULT_FOCK_CUTOFF, 1.0).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_matches_oracle() {
        for r in 1..=16 {
            let series = pulse_fidelity(r, 1.0).unwrap();
            let oracle = fock_oracle_fidelity(r, 1.0, DEFAULT_FOCK_CUTOFF).unwrap();
            assert!(
                (series - oracle).abs() < 1e-6,
                "R={r}: {series} vs {oracle}"
            );
        }
        let fixed = fock_oracle_fidelity(1, 1.0, DEFAULT_FOCK_CUTOFF).unwrap();
        assert!(fixed < 1.0);
        // Σ p_n² at α = 1 is e^{-2} I₀(2)
        assert!((fixed - 0.308_508_322_553_671).abs() < 1e-7, "{fixed}");
    }

    #[test]
    fn vacuum_limit() {
        let f = fock_oracle_fidelity(2, 1e-4, DEFAULT_FOCK_CUTOFF).unwrap();
        assert!((f - 1.0).abs() < 1e-6);
    }

    #[test]
    fn series_increases_with_r() {
        let mut prev = 0.0;
        for r in 9..=20 {
            let f = fidelity_series(r, 75, 2).unwrap();
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn lower_bound_examples() {
        let v = f_min(75, 2, 9).unwrap();
        assert!((v - (1.0 - 300.0 * (std::f64::consts::E / 8.0).powi(8))).abs() < 1e-12);
        assert!((v - 0.946_70).abs() < 1e-5);
        assert!(f_min(75, 2, 8).is_err());
        assert!(f_min(75, 2, 60).unwrap() > 1.0 - 1e-15);
    }

    #[test]
    fn sizing_examples() {
        assert_eq!(required_r(75, 2, 10.0).unwrap(), 16);
        assert_eq!(
            required_r(8, 100, 1.0).unwrap().max(9),
            required_r(8, 100, 1.0).unwrap()
        );
        assert!(required_r(8, 1, 1.0).is_err());
        let b = shift_bound(75, 2, 16).unwrap();
        assert!(b <= 1.0 / 80.0 + 1e-12);
        let row = param_row(75, 2, 10.0).unwrap();
        assert_eq!(row.r, 16);
        assert!(row.f_series >= row.f_min);
    }

    #[test]
    fn config_validation() {
        assert!(PhaseRandConfig::new(1.0, 1).is_err());
        assert!(PhaseRandConfig::new(1.0, 9).is_ok());
        let mut cfg = PhaseRandConfig::new(1.0, 9).unwrap();
        cfg.fock_cutoff = 10;
        assert!(cfg.validate().is_err());
    }
}
