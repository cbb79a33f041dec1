//! The light-only protocol: `N` repetitions of pulse emission, photon-number
//! reports and I1DC collapse produce the verifier state, after which the
//! qubit-channel protocol runs unchanged.
//!
//! Random streams per trial: stream `j < N` drives repetition `j` (pulses,
//! any forging guesses, I1DC outcomes); stream `N` drives the Bell stage and
//! the term draw.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::{InstanceSpec, LocalHamiltonian};
use crate::i1dc::{phi_from_outcomes, phi_to_hs, plus_amplitudes, I1dcTranscript};
use crate::photonics::{
    per_repetition_failure_bound, sample_batch, threshold_check, vacuum_threshold, Angle4,
    PhotonStats, PulseParams,
};
use crate::protocol1::{
    self, acceptance_given, decide, s_prime, verdict, BellOutcomes, Branch, Estimate,
    MaliciousPovm, QubitChannel, Verdict, VerifierSecret,
};
use crate::qcore::{DensityMatrix, StateVector, C64};
use crate::seeding::stream_rng;
use crate::{Error, Result};

/// Smallest trial count for [`estimate_pacc`].
pub const MIN_ESTIMATE_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForgeStrategy {
    /// Report as many non-vacuum pulses as vacuum as the threshold allows,
    /// starting with real vacuums, then single photons.
    Greedy,
    /// Report every pulse with at most one photon as vacuum.
    AllSingles,
}

/// Prover behaviour in the light-only protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversarySpec {
    Honest {},
    /// Honest apart from teleporting `state` instead of the witness.
    WrongWitness {
        state: StateVector,
    },
    RandomOutcomes {},
    /// Forges vacuum reports so that only multi-photon pulses survive; with
    /// every repetition known it answers optimally, otherwise honestly.
    VacuumForge {
        strategy: ForgeStrategy,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<StateVector>,
    },
    /// Replaces each collapsed qubit by `rho`.
    FixedStateReplace {
        #[serde(with = "qubit_density")]
        rho: DensityMatrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<StateVector>,
    },
    /// With probability `p`, replaces each collapsed qubit by `|0⟩` or `|1⟩`.
    SinglePhotonChannel {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<StateVector>,
    },
}

impl AdversarySpec {
    pub fn name(&self) -> &'static str {
        match self {
            AdversarySpec::Honest {} => "honest",
            AdversarySpec::WrongWitness { .. } => "wrong-witness",
            AdversarySpec::RandomOutcomes {} => "random-outcomes",
            AdversarySpec::VacuumForge { .. } => "vacuum-forge",
            AdversarySpec::FixedStateReplace { .. } => "fixed-state-replace",
            AdversarySpec::SinglePhotonChannel { .. } => "single-photon-channel",
        }
    }

    /// The state the prover teleports when measuring honestly.
    fn teleported<'a>(&'a self, inst: &'a InstanceSpec) -> Result<&'a StateVector> {
        match self {
            AdversarySpec::WrongWitness { state } => Ok(state),
            AdversarySpec::VacuumForge {
                witness: Some(w), ..
            }
            | AdversarySpec::FixedStateReplace {
                witness: Some(w), ..
            }
            | AdversarySpec::SinglePhotonChannel {
                witness: Some(w), ..
            } => Ok(w),
            _ => inst.witness(),
        }
    }

    pub fn validate(&self, inst: &InstanceSpec) -> Result<()> {
        let n = inst.n_qubits();
        if !matches!(self, AdversarySpec::RandomOutcomes {}) {
            let w = self.teleported(inst)?;
            if w.n_qubits() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} state has {} qubits, instance has {n}",
                    self.name(),
                    w.n_qubits()
                )));
            }
        }
        match self {
            AdversarySpec::SinglePhotonChannel { p, .. } if !(0.0..=1.0).contains(p) => Err(
                Error::InvalidParameter(format!("channel strength p = {p} not in [0, 1]")),
            ),
            AdversarySpec::FixedStateReplace { rho, .. } if rho.dim() != 2 => {
                Err(Error::DimensionMismatch {
                    expected: 2,
                    got: rho.dim(),
                })
            }
            _ => Ok(()),
        }
    }
}

mod qubit_density {
    use super::*;
    use crate::qcore::CMatrix;
    use serde::{Deserializer, Serializer};

    type Raw = [[[f64; 2]; 2]; 2];

    pub fn serialize<S: Serializer>(
        rho: &DensityMatrix,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let m = rho.matrix();
        let mut raw: Raw = [[[0.0; 2]; 2]; 2];
        for (r, row) in raw.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = [m[(r, c)].re, m[(r, c)].im];
            }
        }
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<DensityMatrix, D::Error> {
        let raw = Raw::deserialize(d)?;
        let m = CMatrix::from_fn(2, 2, |r, c| C64::new(raw[r][c][0], raw[r][c][1]));
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Everything needed to run and estimate the light-only protocol.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub m: usize,
    pub alpha: f64,
    pub instance: InstanceSpec,
    pub trials: usize,
    pub seed: u64,
    pub adversary: AdversarySpec,
}

impl RunConfig {
    pub fn new(
        instance: InstanceSpec,
        m: usize,
        alpha: f64,
        trials: usize,
        seed: u64,
        adversary: AdversarySpec,
    ) -> Result<Self> {
        let cfg = Self {
            m,
            alpha,
            instance,
            trials,
            seed,
            adversary,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_qubits(&self) -> usize {
        self.instance.n_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        PulseParams::new(self.m, self.alpha)?;
        if self.n_qubits() < 2 {
            return Err(Error::InvalidParameter("N must be at least 2".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        self.instance.validate()?;
        self.adversary.validate(&self.instance)
    }
}

/// A pulse as it appears in a transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub k: usize,
    pub angle: Angle4,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionRecord {
    pub j: usize,
    pub pulses: Vec<PulseRecord>,
    pub reported: Vec<u32>,
    pub m0: usize,
    pub m1: usize,
    pub reported_m0: usize,
    pub threshold_pass: bool,
    pub i1dc: Option<I1dcTranscript>,
    pub h: Option<u8>,
    pub s: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTranscript {
    pub trial: u64,
    pub repetitions: Vec<RepetitionRecord>,
    pub outcomes: Option<BellOutcomes>,
    pub verdict: Verdict,
    /// Some repetition had `m0 + m1` at or below the threshold.
    pub case_i: bool,
}

struct RepetitionOutcome {
    record: RepetitionRecord,
    /// The qubit the prover actually holds.
    physical: Option<[C64; 2]>,
    /// True when the prover knows every surviving angle.
    known: bool,
}

fn run_repetition(cfg: &RunConfig, trial: u64, j: usize) -> Result<RepetitionOutcome> {
    let mut rng = stream_rng(cfg.seed, trial, j as u64);
    let batch = sample_batch(cfg.m, cfg.alpha, j, &mut rng)?;
    let stats = PhotonStats::of(&batch.pulses);
    let threshold = vacuum_threshold(cfg.m, cfg.alpha);

    let mut reported: Vec<u32> = batch.pulses.iter().map(|p| p.photon_count).collect();
    // angles the prover's photons actually carry, indexed by pulse
    let mut held: Vec<Angle4> = batch.pulses.iter().map(|p| p.angle).collect();
    if let AdversarySpec::VacuumForge { strategy, .. } = &cfg.adversary {
        let budget = match strategy {
            ForgeStrategy::AllSingles => usize::MAX,
            ForgeStrategy::Greedy => threshold.floor() as usize,
        };
        let mut used = 0usize;
        for wanted in [0u32, 1] {
            for (k, p) in batch.pulses.iter().enumerate() {
                if p.photon_count != wanted {
                    continue;
                }
                if used < budget {
                    reported[k] = 0;
                    used += 1;
                } else {
                    reported[k] = 1;
                    if wanted == 0 {
                        held[k] = Angle4::random(&mut rng);
                    }
                }
            }
        }
    }

    let reported_m0 = reported.iter().filter(|&&n| n == 0).count();
    let threshold_pass = threshold_check(reported_m0, cfg.m, cfg.alpha);
    let survivors: Vec<usize> = (0..cfg.m).filter(|&k| reported[k] >= 1).collect();
    let known =
        !survivors.is_empty() && survivors.iter().all(|&k| batch.pulses[k].photon_count >= 2);

    let (i1dc, physical, hs) = if survivors.is_empty() {
        if threshold_pass {
            return Err(Error::InvalidParameter(
                "threshold passed with no surviving pulses".into(),
            ));
        }
        (None, None, None)
    } else {
        let sigma: Vec<Angle4> = survivors.iter().map(|&k| batch.pulses[k].angle).collect();
        let sigma_held: Vec<Angle4> = survivors.iter().map(|&k| held[k]).collect();
        let outcomes: Vec<u8> = (1..sigma.len())
            .map(|_| rand::Rng::gen_range(&mut rng, 0..2u8))
            .collect();
        let phi = phi_from_outcomes(&sigma, &outcomes)?;
        let phi_held = phi_from_outcomes(&sigma_held, &outcomes)?;
        let transcript = I1dcTranscript {
            outcomes,
            phi,
            survivor_count: sigma.len(),
        };
        (
            Some(transcript),
            Some(plus_amplitudes(phi_held)),
            Some(phi_to_hs(phi)),
        )
    };

    let pulses = batch
        .pulses
        .iter()
        .enumerate()
        .map(|(k, p)| PulseRecord {
            k: k + 1,
            angle: p.angle,
            n: p.photon_count,
        })
        .collect();
    Ok(RepetitionOutcome {
        record: RepetitionRecord {
            j,
            pulses,
            reported,
            m0: stats.m0,
            m1: stats.m1,
            reported_m0,
            threshold_pass,
            i1dc,
            h: hs.map(|(h, _)| h),
            s: hs.map(|(_, s)| s),
        },
        physical,
        known,
    })
}

/// The `(w, z)` maximizing acceptance when the whole secret is known.
pub fn best_response(secret: &VerifierSecret, h: &LocalHamiltonian) -> Result<BellOutcomes> {
    let n = secret.len();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for code in 0..(1usize << n) {
        let target: Vec<u8> = (0..n).map(|k| ((code >> (n - 1 - k)) & 1) as u8).collect();
        let z: Vec<u8> = target.iter().zip(&secret.s).map(|(t, s)| t ^ s).collect();
        let out = BellOutcomes { w: vec![0; n], z };
        let value = acceptance_given(secret, &out, h)?;
        if value > best.0 {
            best = (value, code);
        }
    }
    let target: Vec<u8> = (0..n)
        .map(|k| ((best.1 >> (n - 1 - k)) & 1) as u8)
        .collect();
    let z = target.iter().zip(&secret.s).map(|(t, s)| t ^ s).collect();
    Ok(BellOutcomes { w: vec![0; n], z })
}

/// Runs trial `trial` end to end.
pub fn run_round(cfg: &RunConfig, trial: u64) -> Result<RoundTranscript> {
    let n = cfg.n_qubits();
    let threshold = vacuum_threshold(cfg.m, cfg.alpha);
    let reps: Vec<RepetitionOutcome> = (0..n)
        .map(|j| run_repetition(cfg, trial, j))
        .collect::<Result<_>>()?;
    let case_i = reps
        .iter()
        .any(|r| ((r.record.m0 + r.record.m1) as f64) <= threshold);
    if reps.iter().any(|r| !r.record.threshold_pass) {
        return Ok(RoundTranscript {
            trial,
            repetitions: reps.into_iter().map(|r| r.record).collect(),
            outcomes: None,
            verdict: Verdict::threshold_reject(),
            case_i,
        });
    }

    let secret = VerifierSecret {
        h: reps.iter().map(|r| r.record.h.expect("passed")).collect(),
        s: reps.iter().map(|r| r.record.s.expect("passed")).collect(),
    };
    let physical: Vec<[C64; 2]> = reps.iter().map(|r| r.physical.expect("passed")).collect();
    let ham = &cfg.instance.hamiltonian;
    let mut rng = stream_rng(cfg.seed, trial, n as u64);
    let outcomes = match &cfg.adversary {
        AdversarySpec::VacuumForge { .. } if reps.iter().all(|r| r.known) => {
            best_response(&secret, ham)?
        }
        adv => induced_povm(adv, &cfg.instance)?.sample(&physical, &mut rng)?,
    };
    let v = verdict(&secret, &outcomes, ham, &mut rng)?;
    Ok(RoundTranscript {
        trial,
        repetitions: reps.into_iter().map(|r| r.record).collect(),
        outcomes: Some(outcomes),
        verdict: v,
        case_i,
    })
}

/// All transcripts, in trial order.
pub fn run_rounds(cfg: &RunConfig) -> Result<Vec<RoundTranscript>> {
    cfg.validate()?;
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_round(cfg, t))
        .collect()
}

/// Aggregate counts of a batch of rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P2Estimate {
    pub pacc: Estimate,
    pub threshold_rejects: usize,
    pub case_i: usize,
    pub accepts_case_i: usize,
    pub accepts_case_ii: usize,
}

impl P2Estimate {
    pub fn from_rounds(rounds: &[RoundTranscript]) -> Self {
        let mut out = Self {
            pacc: Estimate::from_counts(0, rounds.len().max(1)),
            threshold_rejects: 0,
            case_i: 0,
            accepts_case_i: 0,
            accepts_case_ii: 0,
        };
        let mut accepts = 0;
        for r in rounds {
            accepts += usize::from(r.verdict.accepted);
            out.threshold_rejects += usize::from(r.verdict.branch == Branch::ThresholdReject);
            out.case_i += usize::from(r.case_i);
            if r.verdict.accepted {
                if r.case_i {
                    out.accepts_case_i += 1;
                } else {
                    out.accepts_case_ii += 1;
                }
            }
        }
        out.pacc = Estimate::from_counts(accepts, rounds.len());
        out
    }

    /// Fraction of rounds in case (i).
    pub fn p_case_i(&self) -> f64 {
        self.case_i as f64 / self.pacc.trials as f64
    }

    /// Acceptance frequency among case (ii) rounds.
    pub fn p_acc_given_case_ii(&self) -> f64 {
        let rest = self.pacc.trials - self.case_i;
        if rest == 0 {
            0.0
        } else {
            self.accepts_case_ii as f64 / rest as f64
        }
    }
}

/// Mean acceptance with a 99% interval.
pub fn estimate_pacc(cfg: &RunConfig) -> Result<P2Estimate> {
    if cfg.trials < MIN_ESTIMATE_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_ESTIMATE_TRIALS} trials, got {}",
            cfg.trials
        )));
    }
    cfg.validate()?;
    let rounds = run_rounds(cfg)?;
    Ok(P2Estimate::from_rounds(&rounds))
}

/// The qubit-protocol prover this adversary amounts to once the collapsed
/// qubits are in hand.
pub fn induced_povm(adv: &AdversarySpec, inst: &InstanceSpec) -> Result<MaliciousPovm> {
    let n = inst.n_qubits();
    Ok(match adv {
        AdversarySpec::RandomOutcomes {} => MaliciousPovm::RandomOutcomes { n_qubits: n },
        AdversarySpec::Honest {}
        | AdversarySpec::WrongWitness { .. }
        | AdversarySpec::VacuumForge { .. } => MaliciousPovm::HonestBell {
            witness: adv.teleported(inst)?.clone(),
        },
        AdversarySpec::FixedStateReplace { rho, .. } => MaliciousPovm::Channeled {
            witness: adv.teleported(inst)?.clone(),
            channels: vec![QubitChannel::Replace(rho.clone()); n],
        },
        AdversarySpec::SinglePhotonChannel { p, .. } => MaliciousPovm::Channeled {
            witness: adv.teleported(inst)?.clone(),
            channels: vec![QubitChannel::Depolarize(*p); n],
        },
    })
}

/// `b_eff = Tr[ρ_twirl H]` of the induced prover.
pub fn effective_energy(adv: &AdversarySpec, inst: &InstanceSpec) -> Result<f64> {
    protocol1::effective_energy(&inst.hamiltonian, &induced_povm(adv, inst)?)
}

/// `N exp(−m e^{−2α²} α⁴ / 2)`.
pub fn union_bound(n: usize, m: usize, alpha: f64) -> f64 {
    n as f64 * per_repetition_failure_bound(m, alpha)
}

/// `1 − a/2 − N exp(−m e^{−2α²} α⁴ / 2)`.
pub fn completeness_bound(inst: &InstanceSpec, m: usize, alpha: f64) -> f64 {
    1.0 - inst.a / 2.0 - union_bound(inst.n_qubits(), m, alpha)
}

/// `1 − b_eff/2 + N exp(−m e^{−2α²} α⁴ / 2)`.
pub fn soundness_bound(b_eff: f64, n: usize, m: usize, alpha: f64) -> f64 {
    1.0 - b_eff / 2.0 + union_bound(n, m, alpha)
}

/// Checks the estimate against the completeness bound (honest prover) or the
/// soundness bound (every other adversary).
pub fn bound_check(cfg: &RunConfig, est: &Estimate) -> Result<bool> {
    Ok(match cfg.adversary {
        AdversarySpec::Honest {} => {
            est.estimate + est.half_width >= completeness_bound(&cfg.instance, cfg.m, cfg.alpha)
        }
        _ => {
            let b_eff = effective_energy(&cfg.adversary, &cfg.instance)?;
            est.estimate - est.half_width
                <= soundness_bound(b_eff, cfg.n_qubits(), cfg.m, cfg.alpha)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecommendedParams {
    pub alpha: f64,
    pub m: usize,
}

/// `α = 1`, `m = ⌈2e² ln(4N²f)⌉`.
pub fn recommended_params(n: usize, f: f64) -> Result<RecommendedParams> {
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
    let e2 = std::f64::consts::E.powi(2);
    let m = (2.0 * e2 * (4.0 * (n * n) as f64 * f).ln()).ceil() as usize;
    Ok(RecommendedParams {
        alpha: 1.0,
        m: m.max(crate::photonics::MIN_PULSES),
    })
}

/// `(N − 1) / (2Nf)`.
pub fn gap_lower_bound(n: usize, f: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "N = {n} must be at least 2"
        )));
    }
    Ok((n - 1) as f64 / (2.0 * n as f64 * f))
}

/// True when the honest estimate beats the adversary by the guaranteed gap,
/// up to the combined interval width.
pub fn distinguish(honest: &Estimate, adversary: &Estimate, n: usize, f: f64) -> Result<bool> {
    let gap = gap_lower_bound(n, f)?;
    Ok(honest.estimate - adversary.estimate >= gap - (honest.half_width + adversary.half_width))
}

/// Verdict for a round in which the prover answered `outcomes`; exposed for
/// transcript replay.
pub fn replay_verdict(
    secret: &VerifierSecret,
    outcomes: &BellOutcomes,
    pair: (usize, usize),
    h: &LocalHamiltonian,
) -> Result<Verdict> {
    let sp = s_prime(secret, outcomes)?;
    let c = h
        .terms()
        .iter()
        .find(|t| (t.i, t.j) == pair)
        .map(|t| t.c)
        .ok_or_else(|| Error::InvalidParameter(format!("pair {pair:?} is not a term")))?;
    Ok(decide(secret, &sp, pair.0, pair.1, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{singlet, singlet_instance};
    use crate::photonics::exact_threshold_pass_probability;
    use crate::protocol1::exact_pacc_povm;

    fn cfg(adv: AdversarySpec, trials: usize) -> RunConfig {
        RunConfig::new(singlet_instance(10.0).unwrap(), 75, 1.0, trials, 11, adv).unwrap()
    }

    #[test]
    fn recommended_parameters() {
        let p = recommended_params(2, 10.0).unwrap();
        assert_eq!(p.m, 76);
        assert_eq!(p.alpha, 1.0);
        assert!(recommended_params(1, 10.0).is_err());
        let mut prev = 0;
        for n in 2..8 {
            let m = recommended_params(n, 10.0).unwrap().m;
            assert!(m >= prev && m >= 8);
            prev = m;
        }
        assert!(union_bound(2, 76, 1.0) <= 1.0 / 80.0);
    }

    #[test]
    fn gap_values() {
        assert!((gap_lower_bound(2, 10.0).unwrap() - 0.025).abs() < 1e-15);
        assert!((gap_lower_bound(3, 10.0).unwrap() - 1.0 / 30.0).abs() < 1e-15);
        assert!(gap_lower_bound(1, 10.0).is_err());
        assert!(gap_lower_bound(10_000, 10.0).unwrap() < 0.05);
    }

    #[test]
    fn rounds_are_reproducible() {
        let c = cfg(AdversarySpec::Honest {}, 20);
        let a = run_rounds(&c).unwrap();
        let b = run_rounds(&c).unwrap();
        assert_eq!(a, b);
        for r in &a {
            for rep in &r.repetitions {
                assert_eq!(rep.reported_m0, rep.m0);
                if let Some(t) = &rep.i1dc {
                    assert_eq!(phi_to_hs(t.phi), (rep.h.unwrap(), rep.s.unwrap()));
                }
            }
        }
    }

    #[test]
    fn all_singles_forgery_fails_when_photons_are_plentiful() {
        let c = cfg(
            AdversarySpec::VacuumForge {
                strategy: ForgeStrategy::AllSingles,
                witness: None,
            },
            300,
        );
        let thr = vacuum_threshold(75, 1.0);
        for r in run_rounds(&c).unwrap() {
            for rep in &r.repetitions {
                if rep.reported_m0 >= rep.m0 + rep.m1 && (rep.m0 + rep.m1) as f64 > thr {
                    assert_eq!(r.verdict.branch, Branch::ThresholdReject);
                }
            }
        }
    }

    #[test]
    fn random_outcomes_reduce_to_the_qubit_protocol() {
        let c = cfg(AdversarySpec::RandomOutcomes {}, 4000);
        let est = estimate_pacc(&c).unwrap();
        let q = exact_threshold_pass_probability(75, 1.0);
        let povm = induced_povm(&c.adversary, &c.instance).unwrap();
        let exact = q * q * exact_pacc_povm(&c.instance.hamiltonian, &povm).unwrap();
        assert!((est.pacc.estimate - exact).abs() < 4.0 * est.pacc.stderr().max(1e-3));
        assert!(bound_check(&c, &est.pacc).unwrap());
    }

    #[test]
    fn adversary_spec_json() {
        let spec = AdversarySpec::SinglePhotonChannel {
            p: 0.5,
            witness: None,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"single-photon-channel","p":0.5}"#);
        let back: AdversarySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let rho: AdversarySpec = serde_json::from_str(
            r#"{"kind":"fixed-state-replace","rho":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#,
        )
        .unwrap();
        assert!(rho.validate(&singlet_instance(10.0).unwrap()).is_ok());
        assert!(serde_json::from_str::<AdversarySpec>(r#"{"kind":"honest","x":1}"#).is_err());
    }

    #[test]
    fn config_validation() {
        let inst = singlet_instance(10.0).unwrap();
        assert!(RunConfig::new(inst.clone(), 75, 1.5, 10, 0, AdversarySpec::Honest {}).is_err());
        assert!(RunConfig::new(inst.clone(), 7, 1.0, 10, 0, AdversarySpec::Honest {}).is_err());
        let bad = AdversarySpec::WrongWitness {
            state: StateVector::zero(3).unwrap(),
        };
        assert!(RunConfig::new(inst.clone(), 75, 1.0, 10, 0, bad).is_err());
        let ok = AdversarySpec::WrongWitness { state: singlet() };
        assert!(RunConfig::new(inst, 75, 1.0, 10, 0, ok).is_ok());
    }

    #[test]
    fn best_response_wins_every_term() {
        let inst = singlet_instance(10.0).unwrap();
        for idx in 0..16 {
            let secret = VerifierSecret::from_index(2, idx);
            let out = best_response(&secret, &inst.hamiltonian).unwrap();
            assert_eq!(
                acceptance_given(&secret, &out, &inst.hamiltonian).unwrap(),
                1.0
            );
        }
    }
}
