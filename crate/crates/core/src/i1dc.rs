//! Interlaced 1D cluster computation: collapses the surviving single photons
//! of one repetition into a single qubit `|+_φ⟩ = (|0⟩ + e^{iφ}|1⟩)/√2`.
//!
//! Two executions are provided. [`run_symbolic`] draws the X outcomes
//! uniformly and evaluates the φ formula over Z₄. [`run_statevector_exhaustive`]
//! and [`run_statevector_sampled`] simulate the chain of `CZ (H ⊗ I)` gates and
//! X measurements on a dense state and serve as the oracle.
//!
//! X-basis outcome `0` is the projection onto `|+⟩`, `1` onto `|−⟩`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::photonics::Angle4;
use crate::qcore::{c, Gate, StateVector, C64};
use crate::{Error, Result};

/// Longest chain the statevector oracle accepts.
pub const MAX_STATEVECTOR_LEN: usize = 12;

/// Outcomes and output angle of one I1DC run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct I1dcTranscript {
    #[serde(rename = "o")]
    pub outcomes: Vec<u8>,
    pub phi: Angle4,
    #[serde(rename = "L")]
    pub survivor_count: usize,
}

/// `φ = Σ_{l<L} (−1)^{o_l + … + o_{L−1}} σ_l + σ_L` over Z₄.
pub fn phi_from_outcomes(angles: &[Angle4], outcomes: &[u8]) -> Result<Angle4> {
    let len = angles.len();
    if len == 0 {
        return Err(Error::InvalidParameter(
            "I1DC needs at least one angle".into(),
        ));
    }
    if outcomes.len() != len - 1 {
        return Err(Error::LengthMismatch(format!(
            "{} angles need {} outcomes, got {}",
            len,
            len - 1,
            outcomes.len()
        )));
    }
    let mut phi = angles[len - 1];
    let mut parity = 0u8;
    for l in (0..len - 1).rev() {
        parity ^= outcomes[l] & 1;
        phi = phi + if parity == 1 { -angles[l] } else { angles[l] };
    }
    Ok(phi)
}

/// Fast path: uniform outcomes, φ from the formula. Draws `L − 1` bits from
/// `rng` in order.
pub fn run_symbolic<R: Rng + ?Sized>(angles: &[Angle4], rng: &mut R) -> Result<I1dcTranscript> {
    if angles.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "I1DC needs L ≥ 2 survivors, got {}",
            angles.len()
        )));
    }
    let outcomes: Vec<u8> = (1..angles.len()).map(|_| rng.gen_range(0..2u8)).collect();
    let phi = phi_from_outcomes(angles, &outcomes)?;
    Ok(I1dcTranscript {
        outcomes,
        phi,
        survivor_count: angles.len(),
    })
}

/// `(|0⟩ + e^{iφ}|1⟩)/√2` as a two-amplitude array.
pub fn plus_amplitudes(phi: Angle4) -> [C64; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phase = match phi.value() {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    [c(r, 0.0), phase * r]
}

pub fn plus_state(phi: Angle4) -> StateVector {
    StateVector::product(&[plus_amplitudes(phi)]).expect("one qubit")
}

/// Decodes φ into the `(h, s)` with `S^h H |s⟩ = |+_φ⟩`.
pub fn phi_to_hs(phi: Angle4) -> (u8, u8) {
    (phi.value() & 1, phi.value() >> 1)
}

/// Inverse of [`phi_to_hs`].
pub fn hs_to_phi(h: u8, s: u8) -> Angle4 {
    Angle4::new((h & 1) | ((s & 1) << 1))
}

/// One measurement branch of the statevector oracle.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub state: StateVector,
}

/// Angle of a single-qubit state that equals some `|+_φ⟩` up to global phase.
pub fn angle_of(state: &StateVector, tol: f64) -> Option<Angle4> {
    if state.n_qubits() != 1 {
        return None;
    }
    Angle4::all().into_iter().find(|&phi| {
        state
            .fidelity(&plus_state(phi))
            .map(|f| (1.0 - f).abs() < tol)
            .unwrap_or(false)
    })
}

fn check_len(angles: &[Angle4]) -> Result<()> {
    if angles.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "I1DC needs L ≥ 2 survivors, got {}",
            angles.len()
        )));
    }
    if angles.len() > MAX_STATEVECTOR_LEN {
        return Err(Error::TooManyQubits {
            what: "I1DC statevector oracle",
            max: MAX_STATEVECTOR_LEN,
            got: angles.len(),
        });
    }
    Ok(())
}

fn initial_state(angles: &[Angle4]) -> Result<StateVector> {
    let qubits: Vec<[C64; 2]> = angles.iter().map(|&a| plus_amplitudes(a)).collect();
    StateVector::product(&qubits)
}

/// Entangles the front qubit with its neighbour and returns the two
/// X-projections `(p, remaining)` for outcomes 0 and 1.
fn step(state: &StateVector) -> Result<[(f64, Option<StateVector>); 2]> {
    let mut s = state.apply_gate(&Gate::h(0))?;
    s.apply_gate_mut(&Gate::cz(0, 1))?;
    let plus = plus_amplitudes(Angle4::new(0));
    let minus = plus_amplitudes(Angle4::new(2));
    Ok([s.project_qubit(0, &plus)?, s.project_qubit(0, &minus)?])
}

/// Enumerates all `2^{L−1}` branches with their exact probabilities.
pub fn run_statevector_exhaustive(angles: &[Angle4]) -> Result<Vec<Branch>> {
    check_len(angles)?;
    let mut frontier = vec![Branch {
        outcomes: Vec::new(),
        probability: 1.0,
        state: initial_state(angles)?,
    }];
    for _ in 1..angles.len() {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for branch in frontier {
            for (o, (p, post)) in step(&branch.state)?.into_iter().enumerate() {
                if let Some(state) = post {
                    let mut outcomes = branch.outcomes.clone();
                    outcomes.push(o as u8);
                    next.push(Branch {
                        outcomes,
                        probability: branch.probability * p,
                        state,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Simulates one run, sampling each X outcome by the Born rule.
pub fn run_statevector_sampled<R: Rng + ?Sized>(angles: &[Angle4], rng: &mut R) -> Result<Branch> {
    check_len(angles)?;
    let mut state = initial_state(angles)?;
    let mut outcomes = Vec::with_capacity(angles.len() - 1);
    let mut probability = 1.0;
    for _ in 1..angles.len() {
        let [(p0, s0), (p1, s1)] = step(&state)?;
        let u: f64 = rng.gen();
        let (o, p, post) = if u < p0 / (p0 + p1) {
            (0u8, p0, s0)
        } else {
            (1u8, p1, s1)
        };
        outcomes.push(o);
        probability *= p;
        state = post.expect("sampled branch has positive weight");
    }
    Ok(Branch {
        outcomes,
        probability,
        state,
    })
}

/// Every tuple in Z₄^len, in lexicographic order.
pub fn all_angle_tuples(len: usize) -> impl Iterator<Item = Vec<Angle4>> {
    (0..4usize.pow(len as u32)).map(move |mut code| {
        let mut tuple = vec![Angle4::ZERO; len];
        for slot in tuple.iter_mut().rev() {
            *slot = Angle4::new((code % 4) as u8);
            code /= 4;
        }
        tuple
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Gate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn angles(v: &[u8]) -> Vec<Angle4> {
        v.iter().map(|&x| Angle4::new(x)).collect()
    }

    #[test]
    fn phi_formula_examples() {
        assert_eq!(
            phi_from_outcomes(&angles(&[3]), &[]).unwrap(),
            Angle4::new(3)
        );
        assert_eq!(
            phi_from_outcomes(&angles(&[1, 1]), &[0]).unwrap(),
            Angle4::new(2)
        );
        assert_eq!(
            phi_from_outcomes(&angles(&[1, 1]), &[1]).unwrap(),
            Angle4::new(0)
        );
        assert!(phi_from_outcomes(&angles(&[1, 1]), &[]).is_err());
        assert!(phi_from_outcomes(&[], &[]).is_err());
    }

    #[test]
    fn two_photon_branches() {
        let branches = run_statevector_exhaustive(&angles(&[0, 0])).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
            assert_eq!(angle_of(&b.state, 1e-10), Some(Angle4::ZERO));
        }
        let branches = run_statevector_exhaustive(&angles(&[1, 1])).unwrap();
        assert_eq!(angle_of(&branches[0].state, 1e-10), Some(Angle4::new(2)));
        assert_eq!(angle_of(&branches[1].state, 1e-10), Some(Angle4::new(0)));
    }

    #[test]
    fn formula_matches_oracle_for_three_photons() {
        for tuple in all_angle_tuples(3) {
            for b in run_statevector_exhaustive(&tuple).unwrap() {
                assert!((b.probability - 0.25).abs() < 1e-12);
                let phi = phi_from_outcomes(&tuple, &b.outcomes).unwrap();
                let f = b.state.fidelity(&plus_state(phi)).unwrap();
                assert!((f - 1.0).abs() < 1e-10, "{tuple:?} {:?}", b.outcomes);
            }
        }
    }

    #[test]
    fn symbolic_with_zero_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in 2..8 {
            let t = run_symbolic(&vec![Angle4::ZERO; len], &mut rng).unwrap();
            assert_eq!(t.phi, Angle4::ZERO);
            assert_eq!(t.outcomes.len(), len - 1);
        }
        assert!(run_symbolic(&[Angle4::ZERO], &mut rng).is_err());
    }

    #[test]
    fn sampled_oracle_agrees_with_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let len = rng.gen_range(2..7);
            let tuple: Vec<Angle4> = (0..len).map(|_| Angle4::random(&mut rng)).collect();
            let b = run_statevector_sampled(&tuple, &mut rng).unwrap();
            let phi = phi_from_outcomes(&tuple, &b.outcomes).unwrap();
            assert_eq!(angle_of(&b.state, 1e-10), Some(phi));
        }
    }

    #[test]
    fn decoding_round_trip() {
        assert_eq!(phi_to_hs(Angle4::new(0)), (0, 0));
        assert_eq!(phi_to_hs(Angle4::new(2)), (0, 1));
        assert_eq!(phi_to_hs(Angle4::new(1)), (1, 0));
        assert_eq!(phi_to_hs(Angle4::new(3)), (1, 1));
        for phi in Angle4::all() {
            let (h, s) = phi_to_hs(phi);
            assert_eq!(hs_to_phi(h, s), phi);
            let mut q = StateVector::basis(1, s as usize).unwrap();
            q.apply_gate_mut(&Gate::h(0)).unwrap();
            if h == 1 {
                q.apply_gate_mut(&Gate::s(0)).unwrap();
            }
            assert!((q.fidelity(&plus_state(phi)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tuple_enumeration() {
        let all: Vec<_> = all_angle_tuples(2).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[1], angles(&[0, 1]));
        assert_eq!(all[4], angles(&[1, 0]));
    }
}
