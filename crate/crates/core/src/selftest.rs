//! Fast oracle-equivalence suites run by `veriphoton selftest`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::synth_instance;
use crate::i1dc::{
    all_angle_tuples, hs_to_phi, phi_from_outcomes, phi_to_hs, plus_state,
    run_statevector_exhaustive,
};
use crate::phasernd::{
    f_min, fidelity_series, fock_oracle_fidelity, pulse_fidelity, required_r, shift_bound,
    DEFAULT_FOCK_CUTOFF,
};
use crate::photonics::{
    exact_low_photon_probability, exact_threshold_pass_probability, per_repetition_failure_bound,
    vacuum_threshold, Angle4,
};
use crate::protocol1::{
    brute_force_pacc, exact_pacc_honest, exact_pacc_povm, BellOutcomes, MaliciousPovm, PauliBasis,
    QubitChannel,
};
use crate::protocol2::gap_lower_bound;
use crate::qcore::{DensityMatrix, StateVector};
use crate::Result;

/// A deliberate defect injected to confirm the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Flips the sign convention of the φ formula.
    PhiSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn first_failure(&self) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| !s.passed)
    }
}

type Check = fn(Option<Mutation>) -> Result<std::result::Result<(), String>>;

const SUITES: &[(&str, Check)] = &[
    ("honest-closed-form", honest_closed_form),
    ("povm-calculators", povm_calculators),
    ("soundness-supremum", soundness_supremum),
    ("i1dc-phi-formula", i1dc_phi_formula),
    ("phi-decoding", phi_decoding),
    ("photon-bounds", photon_bounds),
    ("phase-randomization", phase_randomization),
    ("parameter-sizing", parameter_sizing),
];

pub fn run(mutation: Option<Mutation>) -> Report {
    let suites = SUITES
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(mutation) {
                Ok(Ok(())) => (true, "ok".to_string()),
                Ok(Err(msg)) => (false, msg),
                Err(e) => (false, format!("error: {e}")),
            };
            SuiteResult {
                name,
                passed,
                detail,
            }
        })
        .collect();
    Report { suites }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn honest_closed_form(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for seed in 0..6 {
        let inst = synth_instance(2 + seed as usize % 2, seed, 0.1)?;
        let povm = MaliciousPovm::HonestBell {
            witness: inst.witness()?.clone(),
        };
        let brute = brute_force_pacc(&inst.hamiltonian, &povm)?;
        let closed = exact_pacc_honest(&inst)?;
        if (brute - closed).abs() > 1e-9 {
            return Ok(Err(format!(
                "seed {seed}: enumeration {brute} vs closed form {closed}"
            )));
        }
    }
    Ok(Ok(()))
}

fn sample_provers(n: usize, seed: u64) -> Result<Vec<MaliciousPovm>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = StateVector::random(n, &mut rng)?;
    let rho = DensityMatrix::from_pure(&StateVector::random(1, &mut rng)?);
    Ok(vec![
        MaliciousPovm::HonestBell {
            witness: eta.clone(),
        },
        MaliciousPovm::RandomOutcomes { n_qubits: n },
        MaliciousPovm::ProductBasis {
            bases: [PauliBasis::Y, PauliBasis::X, PauliBasis::Z][..n].to_vec(),
        },
        MaliciousPovm::Constant {
            outcomes: BellOutcomes::from_index(n, 3),
        },
        MaliciousPovm::Channeled {
            witness: eta.clone(),
            channels: vec![QubitChannel::Depolarize(0.4); n],
        },
        MaliciousPovm::Channeled {
            witness: eta,
            channels: vec![QubitChannel::Replace(rho); n],
        },
    ])
}

fn povm_calculators(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for seed in 0..3 {
        let n = 2 + seed as usize % 2;
        let inst = synth_instance(n, 100 + seed, 0.1)?;
        for p in sample_provers(n, seed)? {
            let exact = exact_pacc_povm(&inst.hamiltonian, &p)?;
            let brute = brute_force_pacc(&inst.hamiltonian, &p)?;
            if (exact - brute).abs() > 1e-9 {
                return Ok(Err(format!(
                    "{}: twirl {exact} vs enumeration {brute}",
                    p.name()
                )));
            }
        }
    }
    Ok(Ok(()))
}

fn soundness_supremum(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for seed in 0..4 {
        let n = 2 + seed as usize % 2;
        let inst = synth_instance(n, 200 + seed, 0.1)?;
        let ground = inst.hamiltonian.ground_energy()?;
        let sup = 1.0 - ground.energy / 2.0;
        for p in sample_provers(n, seed)? {
            let v = exact_pacc_povm(&inst.hamiltonian, &p)?;
            if v > sup + 1e-9 {
                return Ok(Err(format!("{} reaches {v} above {sup}", p.name())));
            }
        }
        let best = exact_pacc_povm(
            &inst.hamiltonian,
            &MaliciousPovm::HonestBell {
                witness: ground.state,
            },
        )?;
        if (best - sup).abs() > 1e-9 {
            return Ok(Err(format!(
                "ground-state prover {best} differs from {sup}"
            )));
        }
    }
    Ok(Ok(()))
}

fn phi_under(mutation: Option<Mutation>, angles: &[Angle4], outcomes: &[u8]) -> Result<Angle4> {
    match mutation {
        Some(Mutation::PhiSign) => {
            let flipped: Vec<u8> = outcomes.iter().map(|o| o ^ 1).collect();
            phi_from_outcomes(angles, &flipped)
        }
        None => phi_from_outcomes(angles, outcomes),
    }
}

fn i1dc_phi_formula(mutation: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for len in 2..=4 {
        for tuple in all_angle_tuples(len) {
            for b in run_statevector_exhaustive(&tuple)? {
                let expected = 0.5f64.powi(len as i32 - 1);
                if (b.probability - expected).abs() > 1e-12 {
                    return Ok(Err(format!(
                        "branch weight {} for {tuple:?}",
                        b.probability
                    )));
                }
                let phi = phi_under(mutation, &tuple, &b.outcomes)?;
                let f = b.state.fidelity(&plus_state(phi))?;
                if (f - 1.0).abs() > 1e-10 {
                    return Ok(Err(format!(
                        "angles {:?} outcomes {:?}: formula gives {phi}, fidelity {f}",
                        tuple.iter().map(|a| a.value()).collect::<Vec<_>>(),
                        b.outcomes
                    )));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn phi_decoding(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for phi in Angle4::all() {
        let (h, s) = phi_to_hs(phi);
        if hs_to_phi(h, s) != phi {
            return Ok(Err(format!("{phi} does not round-trip")));
        }
    }
    Ok(ensure(phi_to_hs(Angle4::new(2)) == (0, 1), || {
        "π must decode to (0, 1)".into()
    }))
}

fn photon_bounds(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    let thr = vacuum_threshold(8, 1.0);
    if (thr - 12.0 / std::f64::consts::E).abs() > 1e-12 {
        return Ok(Err(format!("threshold {thr}")));
    }
    for m in [8usize, 16, 75, 200] {
        let bound = per_repetition_failure_bound(m, 1.0);
        let fail = 1.0 - exact_threshold_pass_probability(m, 1.0);
        let low = exact_low_photon_probability(m, 1.0);
        if fail > bound || low > bound {
            return Ok(Err(format!(
                "m = {m}: exact {fail}/{low} above bound {bound}"
            )));
        }
    }
    Ok(Ok(()))
}

fn phase_randomization(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    for r in 2..=10 {
        let series = pulse_fidelity(r, 1.0)?;
        let oracle = fock_oracle_fidelity(r, 1.0, DEFAULT_FOCK_CUTOFF)?;
        if (series - oracle).abs() > 1e-6 {
            return Ok(Err(format!("R = {r}: series {series} vs oracle {oracle}")));
        }
    }
    for r in 9..=16 {
        let f = fidelity_series(r, 75, 2)?;
        let lo = f_min(75, 2, r)?;
        if f < lo - 1e-9 {
            return Ok(Err(format!("R = {r}: F = {f} below F_min = {lo}")));
        }
    }
    Ok(Ok(()))
}

fn parameter_sizing(_: Option<Mutation>) -> Result<std::result::Result<(), String>> {
    let r = required_r(75, 2, 10.0)?;
    if r != 16 {
        return Ok(Err(format!("required R = {r}, expected 16")));
    }
    let shift = shift_bound(75, 2, r)?;
    if shift > 1.0 / 80.0 + 1e-12 {
        return Ok(Err(format!("shift bound {shift} exceeds 1/80")));
    }
    let gap = gap_lower_bound(2, 10.0)?;
    Ok(ensure((gap - 0.025).abs() < 1e-15, || format!("gap {gap}")))
}
