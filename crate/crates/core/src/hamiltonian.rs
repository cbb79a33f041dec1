//! Two-local XX+YY Hamiltonians and the verification instances built on them.
//!
//! A Hamiltonian is `H = Σ_(i<j) (p_ij/2) [ (I + c_ij X_i X_j)/2 + (I + c_ij Y_i Y_j)/2 ]`
//! with `p_ij ≥ 0`, `Σ p_ij = 1` and `c_ij = ±1`, so `0 ⪯ H ⪯ I`.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::qcore::{c, CMatrix, DensityMatrix, StateVector, C64};
use crate::{Error, Result};

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Tolerance on `Σ p = 1` for values read from a file.
pub const FILE_SUM_TOL: f64 = 1e-9;

/// One `(i, j, p, c)` entry of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub c: i8,
}

impl Term {
    pub fn new(i: usize, j: usize, p: f64, c: i8) -> Self {
        Self { i, j, p, c }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl LocalHamiltonian {
    /// Validates the term list; `Σ p` must equal one to `1e-12`.
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        Self::with_sum_tolerance(n_qubits, terms, 1e-12)
    }

    /// Like [`LocalHamiltonian::new`] but accepts `|Σ p - 1| ≤ tol` and
    /// rescales the weights to sum to one.
    pub fn with_sum_tolerance(n_qubits: usize, mut terms: Vec<Term>, tol: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidHamiltonian(msg));
        if n_qubits < 2 {
            return bad(format!("need at least 2 qubits, got {n_qubits}"));
        }
        if n_qubits > crate::qcore::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                what: "Hamiltonian",
                max: crate::qcore::MAX_QUBITS,
                got: n_qubits,
            });
        }
        if terms.is_empty() {
            return bad("no terms".into());
        }
        let mut seen = BTreeSet::new();
        for t in &terms {
            if !(t.i < t.j && t.j < n_qubits) {
                return bad(format!(
                    "pair ({}, {}) must satisfy i < j < {n_qubits}",
                    t.i, t.j
                ));
            }
            if !seen.insert((t.i, t.j)) {
                return bad(format!("pair ({}, {}) appears twice", t.i, t.j));
            }
            if !(t.p.is_finite() && t.p >= 0.0) {
                return bad(format!(
                    "weight {} of pair ({}, {}) is negative",
                    t.p, t.i, t.j
                ));
            }
            if t.c != 1 && t.c != -1 {
                return bad(format!("sign {} of pair ({}, {}) is not ±1", t.c, t.i, t.j));
            }
        }
        let total: f64 = terms.iter().map(|t| t.p).sum();
        if (total - 1.0).abs() > tol {
            return bad(format!("weights sum to {total}, not 1"));
        }
        if total != 1.0 {
            for t in &mut terms {
                t.p /= total;
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// `Tr H`. The Pauli parts are traceless, so this is `2^(N-1)`.
    pub fn trace(&self) -> f64 {
        let total: f64 = self.terms.iter().map(|t| t.p).sum();
        total * (self.dim() as f64) / 2.0
    }

    /// Real symmetric matrix of `H`.
    pub fn real_matrix(&self) -> Result<DMatrix<f64>> {
        self.check_dense()?;
        let dim = self.dim();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for t in &self.terms {
            let (mi, mj) = (self.mask(t.i), self.mask(t.j));
            for x in 0..dim {
                h[(x, x)] += t.p / 2.0;
                // (XX + YY)|x⟩ = 2|x ⊕ m⟩ when the two bits differ, else 0
                if (x & mi == 0) != (x & mj == 0) {
                    h[(x ^ mi ^ mj, x)] += t.p * t.c as f64 / 2.0;
                }
            }
        }
        Ok(h)
    }

    /// Dense complex matrix of `H`.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        Ok(self.real_matrix()?.map(|v| c(v, 0.0)))
    }

    /// `⟨ψ|H|ψ⟩`, evaluated term by term from Pauli correlators.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        let amps = state.amplitudes();
        let mut e = 0.0;
        for t in &self.terms {
            let flip = self.mask(t.i) | self.mask(t.j);
            let mi = self.mask(t.i);
            let mj = self.mask(t.j);
            let mut xx = C64::new(0.0, 0.0);
            let mut yy = C64::new(0.0, 0.0);
            for (x, a) in amps.iter().enumerate() {
                let y = x ^ flip;
                let prod = amps[y].conj() * a;
                xx += prod;
                // Y⊗Y|b_i b_j⟩ = -|b̄_i b̄_j⟩ if b_i = b_j, else +|b̄_i b̄_j⟩
                let same = (x & mi == 0) == (x & mj == 0);
                yy += if same { -prod } else { prod };
            }
            e += t.p / 2.0 * (1.0 + t.c as f64 * (xx.re + yy.re) / 2.0);
        }
        Ok(e)
    }

    /// `Tr[H ρ]`.
    pub fn energy_mixed(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        rho.expectation(&self.dense_matrix()?)
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::new(self.real_matrix()?);
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Smallest eigenvalue with one eigenvector, plus the largest eigenvalue
    /// and one of its eigenvectors.
    pub fn ground_energy(&self) -> Result<GroundState> {
        let eig = SymmetricEigen::new(self.real_matrix()?);
        let values = &eig.eigenvalues;
        let argmin = (0..values.len())
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("non-empty spectrum");
        let argmax = (0..values.len())
            .max_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("non-empty spectrum");
        let column = |k: usize| -> Result<StateVector> {
            StateVector::normalized(
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .map(|&v| c(v, 0.0))
                    .collect(),
            )
        };
        Ok(GroundState {
            energy: values[argmin],
            state: column(argmin)?,
            max_energy: values[argmax],
            max_state: column(argmax)?,
        })
    }

    /// Draws a pair `(i, j)` with probability `p_ij`.
    pub fn sample_term<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = None;
        for t in &self.terms {
            if t.p <= 0.0 {
                continue;
            }
            last = Some(t);
            acc += t.p;
            if u < acc {
                return (t.i, t.j);
            }
        }
        let t = last.expect("weights sum to one");
        (t.i, t.j)
    }

    fn check_dense(&self) -> Result<()> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "dense Hamiltonian",
                max: MAX_DENSE_QUBITS,
                got: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// Extremal eigenpairs of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub max_energy: f64,
    pub max_state: StateVector,
}

/// A Hamiltonian with its promise thresholds and (optionally) a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub hamiltonian: LocalHamiltonian,
    /// Energy bound satisfied by the honest witness.
    pub a: f64,
    /// Ground-energy bound in the malicious case.
    pub b: f64,
    /// Inverse-gap polynomial value, `b - a ≥ 1/f`.
    pub f: f64,
    pub witness: Option<StateVector>,
}

impl InstanceSpec {
    pub fn new(
        hamiltonian: LocalHamiltonian,
        a: f64,
        b: f64,
        f: f64,
        witness: Option<StateVector>,
    ) -> Result<Self> {
        let inst = Self {
            hamiltonian,
            a,
            b,
            f,
            witness,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        let (a, b, f) = (self.a, self.b, self.f);
        if !(a.is_finite() && b.is_finite() && f.is_finite()) {
            return bad("a, b and f must be finite".into());
        }
        if a < 0.0 || b < 0.0 {
            return bad(format!("a = {a} and b = {b} must be non-negative"));
        }
        if f < 1.0 {
            return bad(format!("f = {f} must be at least 1"));
        }
        let gap = b - a;
        if gap > 1.0 + 1e-12 || gap < 1.0 / f - 1e-12 {
            return bad(format!(
                "need 1 ≥ b - a ≥ 1/f, got b - a = {gap}, 1/f = {}",
                1.0 / f
            ));
        }
        if let Some(w) = &self.witness {
            if w.n_qubits() != self.hamiltonian.n_qubits() {
                return bad(format!(
                    "witness has {} qubits, Hamiltonian has {}",
                    w.n_qubits(),
                    self.hamiltonian.n_qubits()
                ));
            }
            let e = self.hamiltonian.energy(w)?;
            if e > a + 1e-9 {
                return bad(format!("witness energy {e} exceeds a = {a}"));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn witness(&self) -> Result<&StateVector> {
        self.witness.as_ref().ok_or(Error::MissingWitness)
    }

    /// Reads the JSON instance format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("malformed instance JSON: {e}")))?;
        file.try_into()
    }

    pub fn from_path(path: &Path) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile::from(self)).expect("instance serializes")
    }
}

/// On-disk JSON layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub terms: Vec<Term>,
    pub a: f64,
    pub b: f64,
    pub f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<StateVector>,
}

impl TryFrom<InstanceFile> for InstanceSpec {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let h = LocalHamiltonian::with_sum_tolerance(file.n, file.terms, FILE_SUM_TOL)?;
        InstanceSpec::new(h, file.a, file.b, file.f, file.witness)
    }
}

impl From<&InstanceSpec> for InstanceFile {
    fn from(inst: &InstanceSpec) -> Self {
        Self {
            n: inst.n_qubits(),
            terms: inst.hamiltonian.terms().to_vec(),
            a: inst.a,
            b: inst.b,
            f: inst.f,
            witness: inst.witness.clone(),
        }
    }
}

/// Largest qubit count accepted by [`synth_instance`].
pub const MAX_SYNTH_QUBITS: usize = 6;

/// Random instance whose witness is an exact ground state.
///
/// Weights are uniform draws normalized to one and signs are fair coins.
/// `a` is the ground energy, `b = a + min(gap_target, E_max - E0)`, and `f`
/// is the smallest float with `b - a ≥ 1/f`. Draws whose spectral spread is
/// below `gap_target` are retried a bounded number of times.
pub fn synth_instance(n_qubits: usize, seed: u64, gap_target: f64) -> Result<InstanceSpec> {
    if !(2..=MAX_SYNTH_QUBITS).contains(&n_qubits) {
        return Err(Error::InvalidParameter(format!(
            "synthetic instances need 2 ≤ N ≤ {MAX_SYNTH_QUBITS}, got {n_qubits}"
        )));
    }
    if !(gap_target > 0.0 && gap_target <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gap target {gap_target} must lie in (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(LocalHamiltonian, GroundState)> = None;
    for _ in 0..64 {
        let h = random_hamiltonian(n_qubits, &mut rng)?;
        let g = h.ground_energy()?;
        let spread = g.max_energy - g.energy;
        let better = best
            .as_ref()
            .is_none_or(|(_, old)| spread > old.max_energy - old.energy);
        if better {
            best = Some((h, g));
        }
        if spread >= gap_target {
            break;
        }
    }
    let (h, g) = best.expect("at least one draw");
    let spread = g.max_energy - g.energy;
    let gap = gap_target.min(spread).min(1.0);
    let a = g.energy.max(0.0);
    let b = a + gap;
    let d = b - a;
    let mut f = 1.0 / d;
    while d < 1.0 / f {
        f = f.next_up();
    }
    let f = f.max(1.0);
    InstanceSpec::new(h, a, b, f, Some(g.state))
}

fn random_hamiltonian(n_qubits: usize, rng: &mut ChaCha8Rng) -> Result<LocalHamiltonian> {
    let mut terms = Vec::new();
    for i in 0..n_qubits {
        for j in (i + 1)..n_qubits {
            let p: f64 = rng.gen_range(0.05..1.0);
            let c = if rng.gen::<bool>() { 1 } else { -1 };
            terms.push(Term::new(i, j, p, c));
        }
    }
    let total: f64 = terms.iter().map(|t| t.p).sum();
    for t in &mut terms {
        t.p /= total;
    }
    LocalHamiltonian::with_sum_tolerance(n_qubits, terms, 1e-9)
}

/// Single XX+YY term on two qubits: the singlet is its zero-energy ground state
/// when `c = +1`, the symmetric triplet when `c = -1`.
pub fn two_qubit_term(c: i8) -> LocalHamiltonian {
    LocalHamiltonian::new(2, vec![Term::new(0, 1, 1.0, c)]).expect("valid single term")
}

/// `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_amplitudes(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)])
        .expect("normalized")
}

/// The single-term, `c = +1` instance with the singlet as zero-energy witness.
pub fn singlet_instance(f: f64) -> Result<InstanceSpec> {
    InstanceSpec::new(two_qubit_term(1), 0.0, 1.0 / f, f, Some(singlet()))
}

/// Normalized superposition of `low` and `high` with energy exactly `target`
/// (to roundoff), where `low` and `high` are eigenvectors of `h` with energies
/// `e_low ≤ target ≤ e_high`.
pub fn state_with_energy(
    h: &LocalHamiltonian,
    low: &StateVector,
    high: &StateVector,
    target: f64,
) -> Result<StateVector> {
    let e_low = h.energy(low)?;
    let e_high = h.energy(high)?;
    if !(e_low - 1e-12..=e_high + 1e-12).contains(&target) || e_high - e_low < 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "energy {target} outside [{e_low}, {e_high}]"
        )));
    }
    let t = ((target - e_low) / (e_high - e_low)).clamp(0.0, 1.0);
    let (wl, wh) = ((1.0 - t).sqrt(), t.sqrt());
    let amps = low
        .amplitudes()
        .iter()
        .zip(high.amplitudes())
        .map(|(l, hi)| l * wl + hi * wh)
        .collect();
    StateVector::normalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::hermitian_eigen;

    #[test]
    fn single_term_energies() {
        let h = two_qubit_term(1);
        let s01 = StateVector::basis(2, 1).unwrap();
        assert!((h.energy(&s01).unwrap() - 0.5).abs() < 1e-12);
        assert!(h.energy(&singlet()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ground_states_of_single_term() {
        let g = two_qubit_term(1).ground_energy().unwrap();
        assert!(g.energy.abs() < 1e-12);
        assert!(g.state.fidelity(&singlet()).unwrap() > 1.0 - 1e-12);

        let g = two_qubit_term(-1).ground_energy().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let triplet =
            StateVector::from_amplitudes(vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert!(g.energy.abs() < 1e-12);
        assert!(g.state.fidelity(&triplet).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn triangle_is_frustrated() {
        let third = 1.0 / 3.0;
        let h = LocalHamiltonian::new(
            3,
            vec![
                Term::new(0, 1, third, 1),
                Term::new(0, 2, third, 1),
                Term::new(1, 2, third, 1),
            ],
        )
        .unwrap();
        let g = h.ground_energy().unwrap();
        // frozen from an independent numpy diagonalization: 1/3
        assert!((g.energy - 1.0 / 3.0).abs() < 1e-10, "{}", g.energy);
        let residual = {
            let m = h.dense_matrix().unwrap();
            let v = nalgebra::DVector::from_column_slice(g.state.amplitudes());
            (&m * &v - v.scale(g.energy)).norm()
        };
        assert!(residual < 1e-8);
    }

    #[test]
    fn dense_and_correlator_energies_agree() {
        let inst = synth_instance(4, 11, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let s = StateVector::random(4, &mut rng).unwrap();
            let direct = inst.hamiltonian.energy(&s).unwrap();
            let dense = inst.hamiltonian.energy_mixed(&s.density()).unwrap();
            assert!((direct - dense).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_energy_is_half() {
        let inst = synth_instance(3, 2, 0.3).unwrap();
        let h = &inst.hamiltonian;
        let e = h.energy_mixed(&DensityMatrix::maximally_mixed(8)).unwrap();
        let trace: f64 = (0..8).map(|k| h.real_matrix().unwrap()[(k, k)]).sum();
        assert!((e - trace / 8.0).abs() < 1e-12);
        assert!((h.trace() - trace).abs() < 1e-12);
    }

    #[test]
    fn complex_dense_matrix_is_hermitian_with_unit_bounded_spectrum() {
        let inst = synth_instance(3, 9, 0.5).unwrap();
        let (values, _) = hermitian_eigen(&inst.hamiltonian.dense_matrix().unwrap());
        assert!(values[0] >= -1e-10 && values[7] <= 1.0 + 1e-10);
    }

    #[test]
    fn validation_errors() {
        assert!(LocalHamiltonian::new(2, vec![Term::new(0, 1, 0.9, 1)]).is_err());
        assert!(LocalHamiltonian::new(2, vec![Term::new(1, 0, 1.0, 1)]).is_err());
        assert!(LocalHamiltonian::new(2, vec![Term::new(0, 1, 1.0, 0)]).is_err());
        assert!(
            LocalHamiltonian::new(3, vec![Term::new(0, 1, 0.5, 1), Term::new(0, 1, 0.5, 1)])
                .is_err()
        );
        assert!(LocalHamiltonian::new(1, vec![]).is_err());
    }

    #[test]
    fn sampling_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = two_qubit_term(1);
        assert!((0..100).all(|_| h.sample_term(&mut rng) == (0, 1)));
        let h = LocalHamiltonian::new(3, vec![Term::new(0, 1, 0.0, 1), Term::new(1, 2, 1.0, -1)])
            .unwrap();
        assert!((0..1000).all(|_| h.sample_term(&mut rng) == (1, 2)));
    }

    #[test]
    fn two_term_sampling_is_fair() {
        let h = LocalHamiltonian::new(3, vec![Term::new(0, 1, 0.5, 1), Term::new(0, 2, 0.5, -1)])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let hits = (0..n).filter(|_| h.sample_term(&mut rng) == (0, 1)).count();
        let freq = hits as f64 / n as f64;
        // 99.9% normal interval half-width
        assert!((freq - 0.5).abs() < 3.29 * (0.25f64 / n as f64).sqrt());
    }

    #[test]
    fn synth_is_deterministic_and_consistent() {
        let a = synth_instance(2, 42, 0.1).unwrap();
        let b = synth_instance(2, 42, 0.1).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        for n in 2..=5 {
            for seed in 0..4 {
                let inst = synth_instance(n, seed, 0.1).unwrap();
                assert!(inst.b - inst.a <= 1.0);
                assert!(inst.b - inst.a >= 1.0 / inst.f);
                let g = inst.hamiltonian.ground_energy().unwrap();
                let e = inst.hamiltonian.energy(inst.witness().unwrap()).unwrap();
                assert!((e - g.energy).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn instance_json_roundtrip_and_rejection() {
        let inst = synth_instance(3, 7, 0.2).unwrap();
        let back = InstanceSpec::from_json(&inst.to_json()).unwrap();
        assert_eq!(back.hamiltonian.terms(), inst.hamiltonian.terms());
        let bad = r#"{"n":2,"terms":[{"i":0,"j":1,"p":0.99,"c":1}],"a":0,"b":0.1,"f":10}"#;
        assert!(InstanceSpec::from_json(bad).is_err());
        let near = r#"{"n":2,"terms":[{"i":0,"j":1,"p":1.0000000001,"c":1}],"a":0,"b":0.1,"f":10}"#;
        assert!(InstanceSpec::from_json(near).is_ok());
        let extra = r#"{"n":2,"terms":[{"i":0,"j":1,"p":1,"c":1}],"a":0,"b":0.1,"f":10,"x":1}"#;
        assert!(InstanceSpec::from_json(extra).is_err());
    }

    #[test]
    fn instance_invariants_enforced() {
        let h = two_qubit_term(1);
        assert!(InstanceSpec::new(h.clone(), 0.0, 0.05, 10.0, None).is_err());
        assert!(InstanceSpec::new(
            h.clone(),
            0.0,
            0.1,
            10.0,
            Some(StateVector::basis(2, 1).unwrap())
        )
        .is_err());
        assert!(InstanceSpec::new(h, 0.0, 0.1, 10.0, Some(singlet())).is_ok());
    }

    #[test]
    fn state_with_target_energy() {
        let h = two_qubit_term(1);
        let g = h.ground_energy().unwrap();
        let s = state_with_energy(&h, &g.state, &g.max_state, 0.1).unwrap();
        assert!((h.energy(&s).unwrap() - 0.1).abs() < 1e-12);
    }
}
