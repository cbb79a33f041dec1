//! The coherent-light channel: phase-randomized pulse sampling, photon-number
//! reports, the vacuum-count threshold test and its Hoeffding-type bounds.
//!
//! A phase-randomized coherent state is diagonal in the Fock basis, so each
//! pulse is simulated by drawing its photon number from Poisson(α²) together
//! with a uniform polarization angle in `{0, π/2, π, 3π/2}`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest photon number kept by the sampler. The dropped tail is below
/// `1e-35` for `α ≤ 1`.
pub const PHOTON_CUTOFF: usize = 32;

/// Smallest allowed pulse count per repetition.
pub const MIN_PULSES: usize = 8;

/// An angle `value · π/2`, held as an integer mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Angle4(u8);

impl Angle4 {
    pub const ZERO: Angle4 = Angle4(0);

    pub fn new(value: u8) -> Self {
        Angle4(value % 4)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * std::f64::consts::FRAC_PI_2
    }

    pub fn all() -> [Angle4; 4] {
        [Angle4(0), Angle4(1), Angle4(2), Angle4(3)]
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Angle4(rng.gen_range(0..4))
    }
}

impl TryFrom<u8> for Angle4 {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        if v < 4 {
            Ok(Angle4(v))
        } else {
            Err(Error::InvalidParameter(format!(
                "angle index {v} not in 0..4"
            )))
        }
    }
}

impl From<Angle4> for u8 {
    fn from(a: Angle4) -> u8 {
        a.0
    }
}

impl Add for Angle4 {
    type Output = Angle4;
    fn add(self, rhs: Angle4) -> Angle4 {
        Angle4((self.0 + rhs.0) % 4)
    }
}

impl Sub for Angle4 {
    type Output = Angle4;
    fn sub(self, rhs: Angle4) -> Angle4 {
        Angle4((self.0 + 4 - rhs.0) % 4)
    }
}

impl Neg for Angle4 {
    type Output = Angle4;
    fn neg(self) -> Angle4 {
        Angle4((4 - self.0) % 4)
    }
}

impl fmt::Display for Angle4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            1 => write!(f, "π/2"),
            2 => write!(f, "π"),
            _ => write!(f, "3π/2"),
        }
    }
}

/// One pulse: its polarization angle and the photon number it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pulse {
    pub angle: Angle4,
    pub photon_count: u32,
}

/// Pulse count and amplitude of one repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub m: usize,
    pub alpha: f64,
}

impl PulseParams {
    /// Requires `m ≥ 8` and `(8/m)^(1/4) ≤ α ≤ 1`.
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        if m < MIN_PULSES {
            return Err(Error::InvalidParameter(format!(
                "m = {m} pulses per repetition, need m ≥ {MIN_PULSES}"
            )));
        }
        let floor = (8.0 / m as f64).powf(0.25);
        if !(alpha.is_finite() && alpha >= floor && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must satisfy (8/m)^(1/4) = {floor:.6} ≤ alpha ≤ 1"
            )));
        }
        Ok(Self { m, alpha })
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha * self.alpha
    }
}

/// The `m` pulses of repetition `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseBatch {
    pub pulses: Vec<Pulse>,
    pub alpha: f64,
    pub j: usize,
}

impl PulseBatch {
    pub fn m(&self) -> usize {
        self.pulses.len()
    }

    pub fn stats(&self) -> PhotonStats {
        PhotonStats::of(&self.pulses)
    }
}

/// Actual numbers of vacuum and single-photon pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhotonStats {
    pub m0: usize,
    pub m1: usize,
}

impl PhotonStats {
    pub fn of(pulses: &[Pulse]) -> Self {
        let m0 = pulses.iter().filter(|p| p.photon_count == 0).count();
        let m1 = pulses.iter().filter(|p| p.photon_count == 1).count();
        Self { m0, m1 }
    }
}

/// Inverse-CDF sampler for Poisson(λ) truncated at [`PHOTON_CUTOFF`].
#[derive(Debug, Clone)]
pub struct PhotonNumberSampler {
    cdf: [f64; PHOTON_CUTOFF + 1],
}

impl PhotonNumberSampler {
    pub fn new(mean: f64) -> Self {
        let mut pmf = [0.0; PHOTON_CUTOFF + 1];
        let mut term = (-mean).exp();
        for (n, slot) in pmf.iter_mut().enumerate() {
            if n > 0 {
                term *= mean / n as f64;
            }
            *slot = term;
        }
        let total: f64 = pmf.iter().sum();
        let mut cdf = [0.0; PHOTON_CUTOFF + 1];
        let mut acc = 0.0;
        for (slot, p) in cdf.iter_mut().zip(pmf) {
            acc += p / total;
            *slot = acc;
        }
        cdf[PHOTON_CUTOFF] = 1.0;
        Self { cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u) as u32
    }
}

/// Draws one repetition's pulses; each pulse takes an angle draw and then a
/// photon-number draw from `rng`, in pulse order.
pub fn sample_batch<R: Rng + ?Sized>(
    m: usize,
    alpha: f64,
    j: usize,
    rng: &mut R,
) -> Result<PulseBatch> {
    let params = PulseParams::new(m, alpha)?;
    let sampler = PhotonNumberSampler::new(params.mean_photons());
    let pulses = (0..m)
        .map(|_| {
            let angle = Angle4::random(rng);
            let photon_count = sampler.sample(rng);
            Pulse {
                angle,
                photon_count,
            }
        })
        .collect();
    Ok(PulseBatch { pulses, alpha, j })
}

/// A pulse the prover keeps for the cluster computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    /// 1-based pulse index `k`.
    pub k: usize,
    pub angle: Angle4,
}

/// What an honest prover learns and keeps after counting photons.
#[derive(Debug, Clone, PartialEq)]
pub struct QndReport {
    pub counts: Vec<u32>,
    pub survivors: Vec<Survivor>,
    pub m0: usize,
}

/// Honest photon-number readout: reported counts equal the actual ones and
/// every non-vacuum pulse is kept as a single photon at its angle.
pub fn qnd_report(pulses: &[Pulse]) -> QndReport {
    let counts: Vec<u32> = pulses.iter().map(|p| p.photon_count).collect();
    let survivors = survivors_of(pulses, &counts);
    let m0 = counts.iter().filter(|&&n| n == 0).count();
    QndReport {
        counts,
        survivors,
        m0,
    }
}

/// Pulses reported as non-vacuum, in pulse order.
pub fn survivors_of(pulses: &[Pulse], reported: &[u32]) -> Vec<Survivor> {
    pulses
        .iter()
        .zip(reported)
        .enumerate()
        .filter(|(_, (_, &n))| n >= 1)
        .map(|(idx, (p, _))| Survivor {
            k: idx + 1,
            angle: p.angle,
        })
        .collect()
}

/// `m e^(-α²) (1 + α²/2)`.
pub fn vacuum_threshold(m: usize, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    m as f64 * (-a2).exp() * (1.0 + a2 / 2.0)
}

/// True iff the reported vacuum count passes the threshold test.
pub fn threshold_check(m0: usize, m: usize, alpha: f64) -> bool {
    m0 as f64 <= vacuum_threshold(m, alpha)
}

/// `exp(-m e^(-2α²) α⁴ / 2)`: the per-repetition bound on both the honest
/// threshold failure and the malicious case where few pulses carry ≤ 1 photon.
pub fn per_repetition_failure_bound(m: usize, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    (-(m as f64) * (-2.0 * a2).exp() * a2 * a2 / 2.0).exp()
}

/// Union bound `n_reps · exp(-m e^(-2α²) α⁴ / 2)`.
pub fn honest_reject_bound(m: usize, alpha: f64, n_reps: usize) -> f64 {
    n_reps as f64 * per_repetition_failure_bound(m, alpha)
}

/// `m α⁴ / 4`, the guaranteed number of non-vacuum pulses after a pass.
pub fn survivor_lower_bound(m: usize, alpha: f64) -> f64 {
    m as f64 * alpha.powi(4) / 4.0
}

/// Exact probability that an honestly reported batch passes the threshold:
/// `P[Binomial(m, e^(-α²)) ≤ threshold]`, with the truncated photon law.
pub fn exact_threshold_pass_probability(m: usize, alpha: f64) -> f64 {
    let sampler = PhotonNumberSampler::new(alpha * alpha);
    binomial_cdf(m, sampler.cdf[0], vacuum_threshold(m, alpha))
}

/// Exact probability that `m0 + m1` is at most the threshold (the malicious
/// "case (i)" event for one repetition).
pub fn exact_low_photon_probability(m: usize, alpha: f64) -> f64 {
    let sampler = PhotonNumberSampler::new(alpha * alpha);
    binomial_cdf(m, sampler.cdf[1], vacuum_threshold(m, alpha))
}

fn binomial_cdf(m: usize, p: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let kmax = (x.floor() as usize).min(m);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    for k in 0..=kmax {
        if k > 0 {
            ln_choose += ((m - k + 1) as f64).ln() - (k as f64).ln();
        }
        total += (ln_choose + k as f64 * ln_p + (m - k) as f64 * ln_q).exp();
    }
    total.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn angle_arithmetic_is_mod_four() {
        assert_eq!(Angle4::new(3) + Angle4::new(2), Angle4::new(1));
        assert_eq!(-Angle4::new(1), Angle4::new(3));
        assert_eq!(Angle4::new(0) - Angle4::new(1), Angle4::new(3));
        assert!(serde_json::from_str::<Angle4>("4").is_err());
        assert_eq!(serde_json::to_string(&Angle4::new(2)).unwrap(), "2");
    }

    #[test]
    fn parameter_invariants() {
        assert!(PulseParams::new(7, 1.0).is_err());
        assert!(PulseParams::new(8, 1.0).is_ok());
        assert!(PulseParams::new(8, 0.99).is_err());
        assert!(PulseParams::new(75, 1.5).is_err());
        assert!(PulseParams::new(128, 0.5).is_ok());
        assert!(PulseParams::new(128, 0.49).is_err());
    }

    #[test]
    fn photon_statistics_at_unit_amplitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sampler = PhotonNumberSampler::new(1.0);
        let n = 100_000;
        let draws: Vec<u32> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let freq0 = draws.iter().filter(|&&d| d == 0).count() as f64 / n as f64;
        let freq01 = draws.iter().filter(|&&d| d <= 1).count() as f64 / n as f64;
        let mean = draws.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
        let e1 = (-1.0f64).exp();
        let se = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq0 - e1).abs() < 3.29 * se(e1));
        assert!((freq01 - 2.0 * e1).abs() < 3.29 * se(2.0 * e1));
        // Poisson(1) has unit variance
        assert!((mean - 1.0).abs() < 3.29 / (n as f64).sqrt());
    }

    #[test]
    fn angles_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let batch = sample_batch(100_000, 1.0, 0, &mut rng).unwrap();
        let mut counts = [0usize; 4];
        for p in &batch.pulses {
            counts[p.angle.value() as usize] += 1;
        }
        let se = (0.25f64 * 0.75 / 100_000.0).sqrt();
        for c in counts {
            assert!((c as f64 / 100_000.0 - 0.25).abs() < 3.29 * se);
        }
    }

    #[test]
    fn qnd_rules() {
        let pulses = |counts: &[u32]| -> Vec<Pulse> {
            counts
                .iter()
                .enumerate()
                .map(|(k, &n)| Pulse {
                    angle: Angle4::new(k as u8),
                    photon_count: n,
                })
                .collect()
        };
        let vac = qnd_report(&pulses(&[0; 8]));
        assert!(vac.survivors.is_empty());
        assert_eq!(vac.m0, 8);

        let r = qnd_report(&pulses(&[0, 2, 1]));
        assert_eq!(r.m0, 1);
        assert_eq!(
            r.survivors,
            vec![
                Survivor {
                    k: 2,
                    angle: Angle4::new(1)
                },
                Survivor {
                    k: 3,
                    angle: Angle4::new(2)
                }
            ]
        );
        assert_eq!(r.counts, vec![0, 2, 1]);
    }

    #[test]
    fn threshold_examples() {
        let thr = vacuum_threshold(8, 1.0);
        assert!((thr - 12.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(threshold_check(4, 8, 1.0));
        assert!(!threshold_check(5, 8, 1.0));
        assert!(threshold_check(0, 8, 1.0));
    }

    #[test]
    fn bound_values() {
        let v = honest_reject_bound(75, 1.0, 2);
        assert!((v - 2.0 * (-75.0 * (-2.0f64).exp() / 2.0).exp()).abs() < 1e-15);
        assert!((v - 0.0125).abs() < 1e-5);
        let mut prev = 1.0;
        for m in (8..400).step_by(8) {
            let b = per_repetition_failure_bound(m, 1.0);
            assert!(b < prev);
            prev = b;
        }
        assert_eq!(survivor_lower_bound(8, 1.0), 2.0);
        assert_eq!(survivor_lower_bound(75, 1.0), 18.75);
    }

    #[test]
    fn exact_probabilities_respect_bounds() {
        for m in [8usize, 20, 75, 150] {
            let bound = per_repetition_failure_bound(m, 1.0);
            assert!(1.0 - exact_threshold_pass_probability(m, 1.0) <= bound);
            assert!(exact_low_photon_probability(m, 1.0) <= bound);
        }
    }
}
