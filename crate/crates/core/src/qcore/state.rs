use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::gate::{Gate, GateKind};
use super::linalg::{hermitian_deviation, outer, CMatrix};
use super::{bit_of, check_qubits, C64, EXACT_TOL, ZERO};
use crate::{Error, Result};

/// Pure state of `n_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits, "state vector")?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = dim_to_qubits(amps.len())?;
        check_qubits(n_qubits, "state vector")?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = dim_to_qubits(amps.len())?;
        check_qubits(n_qubits, "state vector")?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { n_qubits, amps })
    }

    /// Product state from per-qubit amplitude pairs `(⟨0|q⟩, ⟨1|q⟩)`, qubit 0 first.
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self> {
        check_qubits(qubits.len(), "state vector")?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        for q in qubits {
            let norm = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0] / norm);
                next.push(a * q[1] / norm);
            }
            amps = next;
        }
        Ok(Self {
            n_qubits: qubits.len(),
            amps,
        })
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(n_qubits, "state vector")?;
        let amps = (0..1usize << n_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Complex conjugate in the computational basis.
    pub fn conj(&self) -> StateVector {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn outer(&self) -> CMatrix {
        outer(&self.amps)
    }

    /// Returns the state after applying `gate`.
    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate.kind {
            GateKind::CZ => {
                let mask =
                    bit_of(gate.targets[0], self.n_qubits) | bit_of(gate.targets[1], self.n_qubits);
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if idx & mask == mask {
                        *a = -*a;
                    }
                }
            }
            ref kind => {
                let m = kind.matrix().expect("single-qubit gate");
                self.apply_1q(gate.targets[0], &m);
            }
        }
        Ok(())
    }

    /// Applies a 2×2 matrix to `qubit` without validation.
    pub(crate) fn apply_1q(&mut self, qubit: usize, m: &[[C64; 2]; 2]) {
        let bit = bit_of(qubit, self.n_qubits);
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        check_qubits(n, "tensor product")?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n_qubits: n, amps })
    }

    /// Real expectation value of a Hermitian observable.
    pub fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        if observable.nrows() != self.dim() || observable.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: observable.nrows(),
            });
        }
        let deviation = hermitian_deviation(observable);
        if deviation > 1e-10 {
            return Err(Error::NonHermitian { deviation });
        }
        let mut acc = ZERO;
        for r in 0..self.dim() {
            let mut row = ZERO;
            for col in 0..self.dim() {
                row += observable[(r, col)] * self.amps[col];
            }
            acc += self.amps[r].conj() * row;
        }
        if acc.im.abs() > 1e-10 {
            return Err(Error::NonHermitian {
                deviation: acc.im.abs(),
            });
        }
        Ok(acc.re)
    }

    /// Projects `qubit` onto the single-qubit state `onto` and removes it.
    ///
    /// Returns the outcome probability and, when it is non-zero, the
    /// normalized state of the remaining qubits.
    pub fn project_qubit(
        &self,
        qubit: usize,
        onto: &[C64; 2],
    ) -> Result<(f64, Option<StateVector>)> {
        self.check_qubit(qubit)?;
        let n = self.n_qubits;
        let bit = bit_of(qubit, n);
        let low_mask = bit - 1;
        let rest = n - 1;
        let mut amps = vec![ZERO; 1 << rest];
        for (r, slot) in amps.iter_mut().enumerate() {
            let high = (r & !low_mask) << 1;
            let idx0 = high | (r & low_mask);
            *slot = onto[0].conj() * self.amps[idx0] + onto[1].conj() * self.amps[idx0 | bit];
        }
        finish_projection(rest, amps)
    }

    /// Projects the pair `(a, b)` onto the Bell vector
    /// `(Z^z X^w ⊗ I)(|00⟩+|11⟩)/√2` (Pauli on `a`) and removes both qubits.
    pub fn project_bell(
        &self,
        a: usize,
        b: usize,
        w: u8,
        z: u8,
    ) -> Result<(f64, Option<StateVector>)> {
        self.check_pair(a, b)?;
        let n = self.n_qubits;
        let (ba, bb) = (bit_of(a, n), bit_of(b, n));
        let rest = n - 2;
        let (w, z) = ((w & 1) as usize, (z & 1) as usize);
        // |φ_wz⟩ = [(-1)^{zw} |w,0⟩ + (-1)^{z(1-w)} |1-w,1⟩] / √2
        let s0 = if z * w == 1 { -1.0 } else { 1.0 };
        let s1 = if z * (1 - w) == 1 { -1.0 } else { 1.0 };
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 1 << rest];
        for (r, slot) in amps.iter_mut().enumerate() {
            let base = spread_bits(r, n, ba, bb);
            let i0 = base | if w == 1 { ba } else { 0 };
            let i1 = base | bb | if w == 0 { ba } else { 0 };
            *slot = (self.amps[i0] * s0 + self.amps[i1] * s1) * inv;
        }
        finish_projection(rest, amps)
    }

    /// Born probabilities of the four Bell outcomes on `(a, b)`, indexed `2w + z`.
    pub fn bell_probabilities(&self, a: usize, b: usize) -> Result<[f64; 4]> {
        let mut probs = [0.0; 4];
        for (k, p) in probs.iter_mut().enumerate() {
            *p = self.project_bell(a, b, (k >> 1) as u8, (k & 1) as u8)?.0;
        }
        Ok(probs)
    }

    /// Samples a Bell measurement on `(a, b)`, returning `(w, z)` and the
    /// post-measurement state of the other qubits (order preserved).
    pub fn bell_measure<R: Rng + ?Sized>(
        &self,
        a: usize,
        b: usize,
        rng: &mut R,
    ) -> Result<((u8, u8), StateVector)> {
        let probs = self.bell_probabilities(a, b)?;
        let k = sample_index(&probs, rng);
        let (w, z) = ((k >> 1) as u8, (k & 1) as u8);
        let (_, post) = self.project_bell(a, b, w, z)?;
        Ok((
            (w, z),
            post.expect("sampled outcome has positive probability"),
        ))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::DuplicateTargets);
        }
        Ok(())
    }

    fn check_same_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self> {
        let amps: Vec<C64> = raw.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        // serialized amplitudes are rounded, so accept a looser norm and renormalize
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Self::normalized(amps)
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Self {
        s.amps.iter().map(|a| [a.re, a.im]).collect()
    }
}

pub(crate) fn dim_to_qubits(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Inserts zero bits at positions `ba` and `bb` into the (n-2)-bit index `r`.
fn spread_bits(r: usize, n: usize, ba: usize, bb: usize) -> usize {
    let mut out = 0usize;
    let mut src = 0usize;
    for pos in 0..n {
        let bit = 1 << pos;
        if bit == ba || bit == bb {
            continue;
        }
        if r & (1 << src) != 0 {
            out |= bit;
        }
        src += 1;
    }
    out
}

fn finish_projection(n_qubits: usize, mut amps: Vec<C64>) -> Result<(f64, Option<StateVector>)> {
    let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if prob <= 1e-300 {
        return Ok((0.0, None));
    }
    let norm = prob.sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Ok((prob, Some(StateVector { n_qubits, amps })))
}

/// Inverse-CDF draw from a discrete distribution that sums to one.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = k;
        }
        acc += p;
        if u < acc {
            return k;
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn approx_state(s: &StateVector, expected: &[C64]) {
        for (a, b) in s.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap();
        approx_state(&s, &[c(H, 0.0), c(H, 0.0)]);
    }

    #[test]
    fn s_on_plus() {
        let plus = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap();
        let s = plus.apply_gate(&Gate::s(0)).unwrap();
        approx_state(&s, &[c(H, 0.0), c(0.0, H)]);
    }

    #[test]
    fn cz_on_11() {
        let s = StateVector::basis(2, 3)
            .unwrap()
            .apply_gate(&Gate::cz(0, 1))
            .unwrap();
        approx_state(&s, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::x(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply_gate(&Gate::cz(1, 1)),
            Err(Error::DuplicateTargets)
        ));
        let bad = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            s.apply_gate(&Gate::custom(0, bad)),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = StateVector::zero(2)
            .unwrap()
            .apply_gate(&Gate::x(0))
            .unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn bell_state_measures_to_00() {
        let bell =
            StateVector::normalized(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        let probs = bell.bell_probabilities(0, 1).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let ((w, z), post) = bell.bell_measure(0, 1, &mut rng).unwrap();
            assert_eq!((w, z), (0, 0));
            assert_eq!(post.n_qubits(), 0);
        }
    }

    #[test]
    fn zero_zero_splits_between_phi_plus_and_phi_minus() {
        let probs = StateVector::zero(2)
            .unwrap()
            .bell_probabilities(0, 1)
            .unwrap();
        // |00⟩ = (|φ00⟩ + |φ01⟩)/√2
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);
        assert!(probs[2].abs() < 1e-12 && probs[3].abs() < 1e-12);
    }

    #[test]
    fn bell_rejects_identical_qubits() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.bell_probabilities(1, 1),
            Err(Error::DuplicateTargets)
        ));
    }

    #[test]
    fn bell_on_non_adjacent_pair_leaves_spectator() {
        // |0⟩ ⊗ |1⟩ ⊗ |0⟩ with Bell measurement on (0, 2): spectator stays |1⟩
        let s = StateVector::basis(3, 0b010).unwrap();
        let (p, post) = s.project_bell(0, 2, 0, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(post.unwrap().probabilities(), vec![0.0, 1.0]);
    }

    #[test]
    fn expectation_examples() {
        let z = crate::qcore::linalg::from_2x2(&crate::qcore::pauli::Z);
        let x = crate::qcore::linalg::from_2x2(&crate::qcore::pauli::X);
        assert!((StateVector::zero(1).unwrap().expectation(&z).unwrap() - 1.0).abs() < 1e-12);
        let plus = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-12);
        let xx = x.kronecker(&x);
        let s01 = StateVector::basis(2, 1).unwrap();
        assert!(s01.expectation(&xx).unwrap().abs() < 1e-12);
        let nonherm = CMatrix::from_fn(2, 2, |r, col| {
            if r == 0 && col == 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(matches!(
            plus.expectation(&nonherm),
            Err(Error::NonHermitian { .. })
        ));
        assert!(matches!(
            plus.expectation(&xx),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = StateVector::zero(1)
            .unwrap()
            .tensor(&StateVector::basis(1, 1).unwrap())
            .unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn serde_roundtrip_uses_pairs() {
        let s = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with("[["));
        let back: StateVector = serde_json::from_str(&json).unwrap();
        assert!(s.fidelity(&back).unwrap() > 1.0 - 1e-12);
        assert!(serde_json::from_str::<StateVector>("[[1.0,0.0],[1.0,0.0]]").is_err());
    }
}
