//! The qubit-channel protocol: the verifier sends `⊗ S^{h_k} H |s_k⟩`, the
//! prover answers with Bell outcomes `(w, z)`, and the verifier checks one
//! randomly chosen Hamiltonian term.
//!
//! Register layout for the honest prover: witness qubits `0..N`, verifier
//! qubits `N..2N`; qubit `k` of the witness is Bell-measured against qubit `k`
//! of the verifier state, with the Pauli correction acting on the witness side.
//! Outcome tuples are indexed by `(w_code << N) | z_code`, qubit 0 in the most
//! significant bit of each code.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::{InstanceSpec, LocalHamiltonian};
use crate::i1dc::{hs_to_phi, plus_amplitudes};
use crate::qcore::linalg::{hermitian_eigen, max_abs_diff, outer, tensor_all, trace};
use crate::qcore::{bit_of, c, CMatrix, DensityMatrix, StateVector, C64, ONE, ZERO};
use crate::seeding::stream_rng;
use crate::{Error, Result};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Largest register for the enumeration oracle.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 3;

/// Largest register for the operator-level acceptance calculator.
pub const MAX_EXACT_POVM_QUBITS: usize = 6;

/// Smallest trial count accepted by the Monte Carlo driver.
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierSecret {
    pub h: Vec<u8>,
    pub s: Vec<u8>,
}

impl VerifierSecret {
    pub fn new(h: Vec<u8>, s: Vec<u8>) -> Result<Self> {
        if h.len() != s.len() {
            return Err(Error::LengthMismatch(format!(
                "h has {} bits, s has {}",
                h.len(),
                s.len()
            )));
        }
        if h.iter().chain(&s).any(|&b| b > 1) {
            return Err(Error::InvalidParameter("secret bits must be 0 or 1".into()));
        }
        Ok(Self { h, s })
    }

    /// Draws `h` then `s`, one bit at a time.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let h = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        let s = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        Self { h, s }
    }

    /// The secret with code `h_code << N | s_code`.
    pub fn from_index(n: usize, index: usize) -> Self {
        let (h, s) = split_index(n, index);
        Self { h, s }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellOutcomes {
    pub w: Vec<u8>,
    pub z: Vec<u8>,
}

impl BellOutcomes {
    pub fn new(w: Vec<u8>, z: Vec<u8>) -> Result<Self> {
        if w.len() != z.len() {
            return Err(Error::LengthMismatch(format!(
                "w has {} bits, z has {}",
                w.len(),
                z.len()
            )));
        }
        if w.iter().chain(&z).any(|&b| b > 1) {
            return Err(Error::InvalidParameter(
                "outcome bits must be 0 or 1".into(),
            ));
        }
        Ok(Self { w, z })
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        let (w, z) = split_index(n, index);
        Self { w, z }
    }

    pub fn index(&self) -> usize {
        (bits_to_code(&self.w) << self.w.len()) | bits_to_code(&self.z)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn bits_to_code(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
}

fn code_to_bits(n: usize, code: usize) -> Vec<u8> {
    (0..n).map(|k| ((code >> (n - 1 - k)) & 1) as u8).collect()
}

fn split_index(n: usize, index: usize) -> (Vec<u8>, Vec<u8>) {
    let mask = (1usize << n) - 1;
    (code_to_bits(n, index >> n), code_to_bits(n, index & mask))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    AutoAccept,
    ParityAccept,
    ParityReject,
    ThresholdReject,
}

impl Branch {
    pub fn accepted(self) -> bool {
        matches!(self, Branch::AutoAccept | Branch::ParityAccept)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub branch: Branch,
    pub sampled_pair: Option<(usize, usize)>,
}

impl Verdict {
    pub fn threshold_reject() -> Self {
        Self {
            accepted: false,
            branch: Branch::ThresholdReject,
            sampled_pair: None,
        }
    }
}

/// Single-qubit amplitudes of `S^{h_k} H |s_k⟩` for every `k`.
pub fn verifier_qubits(secret: &VerifierSecret) -> Vec<[C64; 2]> {
    secret
        .h
        .iter()
        .zip(&secret.s)
        .map(|(&h, &s)| plus_amplitudes(hs_to_phi(h, s)))
        .collect()
}

/// `⊗_k S^{h_k} H |s_k⟩`.
pub fn prepare_verifier_state(secret: &VerifierSecret) -> Result<StateVector> {
    StateVector::product(&verifier_qubits(secret))
}

/// Teleportation-style prover: Bell-measures each verifier qubit against the
/// matching witness qubit.
pub fn honest_prover<R: Rng + ?Sized>(
    psi_v: &StateVector,
    eta: &StateVector,
    rng: &mut R,
) -> Result<BellOutcomes> {
    let n = eta.n_qubits();
    if psi_v.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: eta.dim(),
            got: psi_v.dim(),
        });
    }
    let mut state = eta.tensor(psi_v)?;
    let (mut w, mut z) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let ((wk, zk), post) = state.bell_measure(0, n - k, rng)?;
        w.push(wk);
        z.push(zk);
        state = post;
    }
    Ok(BellOutcomes { w, z })
}

/// `s'_k = s_k ⊕ z_k ⊕ h_k w_k`.
pub fn s_prime(secret: &VerifierSecret, out: &BellOutcomes) -> Result<Vec<u8>> {
    if secret.len() != out.len() {
        return Err(Error::LengthMismatch(format!(
            "secret has {} qubits, outcomes have {}",
            secret.len(),
            out.len()
        )));
    }
    Ok((0..secret.len())
        .map(|k| (secret.s[k] ^ out.z[k] ^ (secret.h[k] & out.w[k])) & 1)
        .collect())
}

/// Verdict for a fixed pair `(i, j)` with sign `c`.
pub fn decide(secret: &VerifierSecret, sp: &[u8], i: usize, j: usize, c: i8) -> Verdict {
    let branch = if secret.h[i] != secret.h[j] {
        Branch::AutoAccept
    } else {
        let parity = if (sp[i] ^ sp[j]) == 1 { -1 } else { 1 };
        if parity == -c {
            Branch::ParityAccept
        } else {
            Branch::ParityReject
        }
    };
    Verdict {
        accepted: branch.accepted(),
        branch,
        sampled_pair: Some((i, j)),
    }
}

/// Samples a term and applies the acceptance rule.
pub fn verdict<R: Rng + ?Sized>(
    secret: &VerifierSecret,
    out: &BellOutcomes,
    h: &LocalHamiltonian,
    rng: &mut R,
) -> Result<Verdict> {
    check_size(h, secret.len())?;
    let sp = s_prime(secret, out)?;
    let (i, j) = h.sample_term(rng);
    Ok(decide(secret, &sp, i, j, sign_of(h, i, j)))
}

/// Acceptance probability averaged over the term distribution.
pub fn acceptance_given(
    secret: &VerifierSecret,
    out: &BellOutcomes,
    h: &LocalHamiltonian,
) -> Result<f64> {
    check_size(h, secret.len())?;
    let sp = s_prime(secret, out)?;
    Ok(h.terms()
        .iter()
        .filter(|t| decide(secret, &sp, t.i, t.j, t.c).accepted)
        .map(|t| t.p)
        .sum())
}

fn sign_of(h: &LocalHamiltonian, i: usize, j: usize) -> i8 {
    h.terms()
        .iter()
        .find(|t| t.i == i && t.j == j)
        .map(|t| t.c)
        .expect("sampled pair is a term")
}

fn check_size(h: &LocalHamiltonian, n: usize) -> Result<()> {
    if h.n_qubits() != n {
        return Err(Error::LengthMismatch(format!(
            "Hamiltonian has {} qubits, transcript has {}",
            h.n_qubits(),
            n
        )));
    }
    Ok(())
}

/// `1 − ⟨η|H|η⟩/2`.
pub fn exact_pacc_honest(inst: &InstanceSpec) -> Result<f64> {
    let eta = inst.witness()?;
    Ok(1.0 - inst.hamiltonian.energy(eta)? / 2.0)
}

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    /// Eigenvector for outcome `r` (`0` is the `+1` eigenvector).
    pub fn vector(self, r: u8) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if r & 1 == 0 { 1.0 } else { -1.0 };
        match self {
            PauliBasis::Z if r & 1 == 0 => [ONE, ZERO],
            PauliBasis::Z => [ZERO, ONE],
            PauliBasis::X => [c(h, 0.0), c(sign * h, 0.0)],
            PauliBasis::Y => [c(h, 0.0), c(0.0, sign * h)],
        }
    }
}

/// A single-qubit channel the prover applies to a verifier qubit before
/// measuring honestly.
#[derive(Debug, Clone, PartialEq)]
pub enum QubitChannel {
    Identity,
    /// With probability `p`, replace the qubit by `|0⟩` or `|1⟩` uniformly.
    Depolarize(f64),
    /// Replace the qubit by a fixed state.
    Replace(DensityMatrix),
}

impl QubitChannel {
    pub fn validate(&self) -> Result<()> {
        match self {
            QubitChannel::Identity => Ok(()),
            QubitChannel::Depolarize(p) if (0.0..=1.0).contains(p) => Ok(()),
            QubitChannel::Depolarize(p) => Err(Error::InvalidParameter(format!(
                "depolarizing strength {p} not in [0, 1]"
            ))),
            QubitChannel::Replace(rho) if rho.dim() == 2 => Ok(()),
            QubitChannel::Replace(rho) => Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            }),
        }
    }

    /// Operational unravelling: `(probability, replacement)` where `None`
    /// keeps the incoming qubit.
    pub fn ensemble(&self) -> Result<Vec<(f64, Option<[C64; 2]>)>> {
        Ok(match self {
            QubitChannel::Identity => vec![(1.0, None)],
            QubitChannel::Depolarize(p) => vec![
                (1.0 - p, None),
                (p / 2.0, Some([ONE, ZERO])),
                (p / 2.0, Some([ZERO, ONE])),
            ],
            QubitChannel::Replace(rho) => rho
                .ensemble()?
                .into_iter()
                .map(|(w, s)| (w, Some([s.amplitudes()[0], s.amplitudes()[1]])))
                .collect(),
        })
    }

    pub fn kraus(&self) -> Result<Vec<[[C64; 2]; 2]>> {
        let id = [[ONE, ZERO], [ZERO, ONE]];
        Ok(match self {
            QubitChannel::Identity => vec![id],
            QubitChannel::Depolarize(p) => {
                let keep = c((1.0 - p).sqrt(), 0.0);
                let flip = c((p / 2.0).sqrt(), 0.0);
                let mut ops = vec![[[keep, ZERO], [ZERO, keep]]];
                for (r, col) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let mut k = [[ZERO; 2]; 2];
                    k[r][col] = flip;
                    ops.push(k);
                }
                ops
            }
            QubitChannel::Replace(rho) => {
                let (values, vectors) = hermitian_eigen(rho.matrix());
                let mut ops = Vec::new();
                for (a, &lambda) in values.iter().enumerate() {
                    if lambda <= 0.0 {
                        continue;
                    }
                    let root = lambda.sqrt();
                    for b in 0..2 {
                        let mut k = [[ZERO; 2]; 2];
                        k[0][b] = vectors[(0, a)] * root;
                        k[1][b] = vectors[(1, a)] * root;
                        ops.push(k);
                    }
                }
                ops
            }
        })
    }
}

/// The prover families covered by the exact calculators.
#[derive(Debug, Clone, PartialEq)]
pub enum MaliciousPovm {
    /// Honest Bell measurement against `witness`.
    HonestBell { witness: StateVector },
    /// Uniformly random outcomes, independent of the input.
    RandomOutcomes { n_qubits: usize },
    /// Measures each verifier qubit in a Pauli basis and reports `w = 0`,
    /// `z` = the outcome.
    ProductBasis { bases: Vec<PauliBasis> },
    /// Always reports the same outcomes.
    Constant { outcomes: BellOutcomes },
    /// Applies `channels[k]` to verifier qubit `k`, then measures honestly.
    Channeled {
        witness: StateVector,
        channels: Vec<QubitChannel>,
    },
}

impl MaliciousPovm {
    pub fn n_qubits(&self) -> usize {
        match self {
            MaliciousPovm::HonestBell { witness } => witness.n_qubits(),
            MaliciousPovm::RandomOutcomes { n_qubits } => *n_qubits,
            MaliciousPovm::ProductBasis { bases } => bases.len(),
            MaliciousPovm::Constant { outcomes } => outcomes.len(),
            MaliciousPovm::Channeled { witness, .. } => witness.n_qubits(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MaliciousPovm::HonestBell { .. } => "honest-bell",
            MaliciousPovm::RandomOutcomes { .. } => "random-outcomes",
            MaliciousPovm::ProductBasis { .. } => "product-basis",
            MaliciousPovm::Constant { .. } => "constant",
            MaliciousPovm::Channeled { .. } => "channeled",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits() == 0 {
            return Err(Error::InvalidPovm("empty register".into()));
        }
        if let MaliciousPovm::Channeled { witness, channels } = self {
            if channels.len() != witness.n_qubits() {
                return Err(Error::LengthMismatch(format!(
                    "{} channels for {} qubits",
                    channels.len(),
                    witness.n_qubits()
                )));
            }
            for ch in channels {
                ch.validate()?;
            }
        }
        Ok(())
    }

    /// The operator `Π_wz` on the verifier register.
    pub fn povm_element(&self, out: &BellOutcomes) -> Result<CMatrix> {
        let n = self.n_qubits();
        if out.len() != n {
            return Err(Error::LengthMismatch(format!(
                "outcomes for {} qubits, POVM on {}",
                out.len(),
                n
            )));
        }
        let dim = 1usize << n;
        Ok(match self {
            MaliciousPovm::HonestBell { witness } => honest_element(witness, out),
            MaliciousPovm::RandomOutcomes { .. } => {
                CMatrix::identity(dim, dim).scale(1.0 / (dim * dim) as f64)
            }
            MaliciousPovm::ProductBasis { bases } => {
                if out.w.contains(&1) {
                    CMatrix::zeros(dim, dim)
                } else {
                    let projectors: Vec<[[C64; 2]; 2]> = bases
                        .iter()
                        .zip(&out.z)
                        .map(|(b, &r)| {
                            let v = b.vector(r);
                            [
                                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                                [v[1] * v[0].conj(), v[1] * v[1].conj()],
                            ]
                        })
                        .collect();
                    tensor_all(&projectors)
                }
            }
            MaliciousPovm::Constant { outcomes } => {
                if outcomes == out {
                    CMatrix::identity(dim, dim)
                } else {
                    CMatrix::zeros(dim, dim)
                }
            }
            MaliciousPovm::Channeled { witness, channels } => {
                let mut m = honest_element(witness, out);
                for (q, ch) in channels.iter().enumerate() {
                    if matches!(ch, QubitChannel::Identity) {
                        continue;
                    }
                    let mut acc = CMatrix::zeros(dim, dim);
                    for k in ch.kraus()? {
                        acc += sandwich(&m, q, n, &dagger(&k), &k);
                    }
                    m = acc;
                }
                m
            }
        })
    }

    /// Outcome distribution for a product input, computed by simulating the
    /// prover's measurement. Indexed by [`BellOutcomes::index`].
    pub fn outcome_distribution(&self, qubits: &[[C64; 2]]) -> Result<Vec<f64>> {
        let n = self.n_qubits();
        if qubits.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{} input qubits for a POVM on {}",
                qubits.len(),
                n
            )));
        }
        let size = 1usize << (2 * n);
        let probs = match self {
            MaliciousPovm::HonestBell { witness } => bell_distribution(witness, qubits)?,
            MaliciousPovm::RandomOutcomes { .. } => vec![1.0 / size as f64; size],
            MaliciousPovm::ProductBasis { bases } => {
                let mut probs = vec![0.0; size];
                for (z_code, slot) in probs.iter_mut().enumerate().take(1 << n) {
                    let z = code_to_bits(n, z_code);
                    *slot = bases
                        .iter()
                        .zip(qubits)
                        .zip(&z)
                        .map(|((b, q), &r)| {
                            let v = b.vector(r);
                            (v[0].conj() * q[0] + v[1].conj() * q[1]).norm_sqr()
                        })
                        .product();
                }
                probs
            }
            MaliciousPovm::Constant { outcomes } => {
                let mut probs = vec![0.0; size];
                probs[outcomes.index()] = 1.0;
                probs
            }
            MaliciousPovm::Channeled { witness, channels } => {
                let mut probs = vec![0.0; size];
                let ensembles: Vec<_> = channels
                    .iter()
                    .map(|ch| ch.ensemble())
                    .collect::<Result<_>>()?;
                let mut choice = vec![0usize; n];
                loop {
                    let mut weight = 1.0;
                    let mut input = Vec::with_capacity(n);
                    for k in 0..n {
                        let (p, rep) = ensembles[k][choice[k]];
                        weight *= p;
                        input.push(rep.unwrap_or(qubits[k]));
                    }
                    if weight > 0.0 {
                        for (slot, p) in probs.iter_mut().zip(bell_distribution(witness, &input)?) {
                            *slot += weight * p;
                        }
                    }
                    if !advance(&mut choice, &ensembles) {
                        break;
                    }
                }
                probs
            }
        };
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidPovm(format!(
                "outcome probabilities sum to {total}"
            )));
        }
        Ok(probs)
    }

    /// Samples the prover's answer for a product input.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        qubits: &[[C64; 2]],
        rng: &mut R,
    ) -> Result<BellOutcomes> {
        let n = self.n_qubits();
        if qubits.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{} input qubits for a POVM on {}",
                qubits.len(),
                n
            )));
        }
        match self {
            MaliciousPovm::HonestBell { witness } => {
                honest_prover(&StateVector::product(qubits)?, witness, rng)
            }
            MaliciousPovm::RandomOutcomes { .. } => {
                let w = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
                let z = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
                Ok(BellOutcomes { w, z })
            }
            MaliciousPovm::ProductBasis { bases } => {
                let z = bases
                    .iter()
                    .zip(qubits)
                    .map(|(b, q)| {
                        let v = b.vector(0);
                        let p0 = (v[0].conj() * q[0] + v[1].conj() * q[1]).norm_sqr();
                        u8::from(rng.gen::<f64>() >= p0)
                    })
                    .collect();
                Ok(BellOutcomes { w: vec![0; n], z })
            }
            MaliciousPovm::Constant { outcomes } => Ok(outcomes.clone()),
            MaliciousPovm::Channeled { witness, channels } => {
                let mut input = Vec::with_capacity(n);
                for (ch, q) in channels.iter().zip(qubits) {
                    input.push(apply_channel_sampled(ch, *q, rng)?);
                }
                honest_prover(&StateVector::product(&input)?, witness, rng)
            }
        }
    }
}

/// Draws the channel's output for one input qubit (one uniform draw).
pub fn apply_channel_sampled<R: Rng + ?Sized>(
    ch: &QubitChannel,
    q: [C64; 2],
    rng: &mut R,
) -> Result<[C64; 2]> {
    if matches!(ch, QubitChannel::Identity) {
        return Ok(q);
    }
    let ensemble = ch.ensemble()?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (p, rep) in &ensemble {
        acc += p;
        if u < acc {
            return Ok(rep.unwrap_or(q));
        }
    }
    Ok(ensemble.last().and_then(|(_, r)| *r).unwrap_or(q))
}

type Ensemble = Vec<(f64, Option<[C64; 2]>)>;

fn advance(choice: &mut [usize], ensembles: &[Ensemble]) -> bool {
    for k in (0..choice.len()).rev() {
        choice[k] += 1;
        if choice[k] < ensembles[k].len() {
            return true;
        }
        choice[k] = 0;
    }
    false
}

/// `2^{-N} X^w Z^z |η̄⟩⟨η̄| Z^z X^w`.
fn honest_element(witness: &StateVector, out: &BellOutcomes) -> CMatrix {
    let n = witness.n_qubits();
    let w = bits_to_code(&out.w);
    let z = bits_to_code(&out.z);
    let mut v = vec![ZERO; 1 << n];
    for (x, a) in witness.amplitudes().iter().enumerate() {
        let sign = if (x & z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        v[x ^ w] = a.conj() * sign;
    }
    outer(&v).scale(1.0 / (1usize << n) as f64)
}

fn dagger(m: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// `(L on q) · m · (R on q)`.
fn sandwich(
    m: &CMatrix,
    q: usize,
    n: usize,
    left: &[[C64; 2]; 2],
    right: &[[C64; 2]; 2],
) -> CMatrix {
    let bit = bit_of(q, n);
    let dim = m.nrows();
    let mut tmp = m.clone();
    for r0 in (0..dim).filter(|r| r & bit == 0) {
        let r1 = r0 | bit;
        for col in 0..dim {
            let (a, b) = (m[(r0, col)], m[(r1, col)]);
            tmp[(r0, col)] = left[0][0] * a + left[0][1] * b;
            tmp[(r1, col)] = left[1][0] * a + left[1][1] * b;
        }
    }
    let mut out = tmp.clone();
    for c0 in (0..dim).filter(|c| c & bit == 0) {
        let c1 = c0 | bit;
        for r in 0..dim {
            let (a, b) = (tmp[(r, c0)], tmp[(r, c1)]);
            out[(r, c0)] = a * right[0][0] + b * right[1][0];
            out[(r, c1)] = a * right[0][1] + b * right[1][1];
        }
    }
    out
}

/// Exact Bell-outcome distribution of `η ⊗ ψ`, by recursive projection.
fn bell_distribution(witness: &StateVector, qubits: &[[C64; 2]]) -> Result<Vec<f64>> {
    let n = qubits.len();
    let joint = witness.tensor(&StateVector::product(qubits)?)?;
    let mut probs = vec![0.0; 1 << (2 * n)];
    bell_recurse(&joint, n, 0, 0, 0, 1.0, &mut probs)?;
    Ok(probs)
}

fn bell_recurse(
    state: &StateVector,
    n: usize,
    depth: usize,
    w_code: usize,
    z_code: usize,
    weight: f64,
    probs: &mut [f64],
) -> Result<()> {
    if depth == n {
        probs[(w_code << n) | z_code] += weight;
        return Ok(());
    }
    let remaining = n - depth;
    for k in 0..4u8 {
        let (w, z) = (k >> 1, k & 1);
        let (p, post) = state.project_bell(0, remaining, w, z)?;
        if let Some(post) = post {
            let shift = n - 1 - depth;
            bell_recurse(
                &post,
                n,
                depth + 1,
                w_code | ((w as usize) << shift),
                z_code | ((z as usize) << shift),
                weight * p,
                probs,
            )?;
        }
    }
    Ok(())
}

/// `2^{-N} Σ_{w,z} (X^w Z^z) Π_wz (Z^z X^w)`.
pub fn twirled_state(povm: &MaliciousPovm) -> Result<DensityMatrix> {
    povm.validate()?;
    let n = povm.n_qubits();
    if n > MAX_EXACT_POVM_QUBITS {
        return Err(Error::TooManyQubits {
            what: "exact POVM calculator",
            max: MAX_EXACT_POVM_QUBITS,
            got: n,
        });
    }
    let dim = 1usize << n;
    let mut completeness = CMatrix::zeros(dim, dim);
    let mut rho = CMatrix::zeros(dim, dim);
    for idx in 0..dim * dim {
        let out = BellOutcomes::from_index(n, idx);
        let element = povm.povm_element(&out)?;
        completeness += &element;
        let (w, z) = (idx >> n, idx & (dim - 1));
        for x in 0..dim {
            for y in 0..dim {
                let sign = if ((x & z).count_ones() + (y & z).count_ones()) % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                rho[(x ^ w, y ^ w)] += element[(x, y)] * sign;
            }
        }
    }
    let deviation = max_abs_diff(&completeness, &CMatrix::identity(dim, dim));
    if deviation > 1e-10 {
        return Err(Error::InvalidPovm(format!(
            "elements sum to identity only within {deviation:.3e}"
        )));
    }
    DensityMatrix::new(rho.scale(1.0 / dim as f64))
}

/// `1/2 + Tr[ρ_twirl (I − H)]/2`.
pub fn exact_pacc_povm(h: &LocalHamiltonian, povm: &MaliciousPovm) -> Result<f64> {
    check_size(h, povm.n_qubits())?;
    Ok(1.0 - effective_energy(h, povm)? / 2.0)
}

/// `Tr[ρ_twirl H]`.
pub fn effective_energy(h: &LocalHamiltonian, povm: &MaliciousPovm) -> Result<f64> {
    check_size(h, povm.n_qubits())?;
    let rho = twirled_state(povm)?;
    Ok(trace(&(rho.matrix() * h.dense_matrix()?)).re)
}

/// Enumerates every secret and outcome with Born weights.
pub fn brute_force_pacc(h: &LocalHamiltonian, povm: &MaliciousPovm) -> Result<f64> {
    povm.validate()?;
    let n = povm.n_qubits();
    if n > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "brute-force oracle",
            max: MAX_BRUTE_FORCE_QUBITS,
            got: n,
        });
    }
    check_size(h, n)?;
    let secrets = 1usize << (2 * n);
    let mut total = 0.0;
    for sidx in 0..secrets {
        let secret = VerifierSecret::from_index(n, sidx);
        let probs = povm.outcome_distribution(&verifier_qubits(&secret))?;
        for (oidx, p) in probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let out = BellOutcomes::from_index(n, oidx);
            total += p * acceptance_given(&secret, &out, h)?;
        }
    }
    Ok(total / secrets as f64)
}

/// Accept count with a normal-approximation 99% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub trials: usize,
    pub accepts: usize,
    pub estimate: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn from_counts(accepts: usize, trials: usize) -> Self {
        let p = accepts as f64 / trials as f64;
        Self {
            trials,
            accepts,
            estimate: p,
            half_width: Z99 * Self::stderr_of(p, trials),
        }
    }

    fn stderr_of(p: f64, trials: usize) -> f64 {
        (p * (1.0 - p) / trials as f64).sqrt()
    }

    pub fn stderr(&self) -> f64 {
        Self::stderr_of(self.estimate, self.trials)
    }

    pub fn ci(&self) -> (f64, f64) {
        (
            self.estimate - self.half_width,
            self.estimate + self.half_width,
        )
    }
}

/// One protocol run with its full transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub h: Vec<u8>,
    pub s: Vec<u8>,
    pub w: Vec<u8>,
    pub z: Vec<u8>,
    pub pair: Option<(usize, usize)>,
    pub branch: Branch,
    pub accepted: bool,
}

/// Runs trial `trial` on stream 0 of its seed: secret bits, prover
/// randomness, then the term draw.
pub fn run_round(
    h: &LocalHamiltonian,
    prover: &MaliciousPovm,
    seed: u64,
    trial: u64,
) -> Result<Round> {
    let n = prover.n_qubits();
    check_size(h, n)?;
    let mut rng = stream_rng(seed, trial, 0);
    let secret = VerifierSecret::random(n, &mut rng);
    let out = prover.sample(&verifier_qubits(&secret), &mut rng)?;
    let v = verdict(&secret, &out, h, &mut rng)?;
    Ok(Round {
        h: secret.h,
        s: secret.s,
        w: out.w,
        z: out.z,
        pair: v.sampled_pair,
        branch: v.branch,
        accepted: v.accepted,
    })
}

/// Runs `trials` seeded rounds in parallel, in trial order.
pub fn run_rounds(
    h: &LocalHamiltonian,
    prover: &MaliciousPovm,
    trials: usize,
    seed: u64,
) -> Result<Vec<Round>> {
    prover.validate()?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_round(h, prover, seed, t))
        .collect()
}

pub fn monte_carlo_pacc(
    inst: &InstanceSpec,
    prover: &MaliciousPovm,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let rounds = run_rounds(&inst.hamiltonian, prover, trials, seed)?;
    let accepts = rounds.iter().filter(|r| r.accepted).count();
    Ok(Estimate::from_counts(accepts, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{singlet, singlet_instance, synth_instance, two_qubit_term};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn verifier_state_examples() {
        let plus = prepare_verifier_state(&VerifierSecret::new(vec![0], vec![0]).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.amplitudes()[1] - c(r, 0.0)).norm() < 1e-12);
        let pi = prepare_verifier_state(&VerifierSecret::new(vec![1], vec![0]).unwrap()).unwrap();
        assert!((pi.amplitudes()[1] - c(0.0, r)).norm() < 1e-12);
        let mi = prepare_verifier_state(&VerifierSecret::new(vec![1], vec![1]).unwrap()).unwrap();
        assert!((mi.amplitudes()[1] - c(0.0, -r)).norm() < 1e-12);
    }

    #[test]
    fn s_prime_examples() {
        let sec = |h, s| VerifierSecret::new(vec![h], vec![s]).unwrap();
        let out = |w, z| BellOutcomes::new(vec![w], vec![z]).unwrap();
        assert_eq!(s_prime(&sec(1, 0), &out(1, 0)).unwrap(), vec![1]);
        assert_eq!(s_prime(&sec(0, 1), &out(1, 1)).unwrap(), vec![0]);
        assert_eq!(s_prime(&sec(1, 1), &out(0, 0)).unwrap(), vec![1]);
    }

    #[test]
    fn decision_rules() {
        let mixed = VerifierSecret::new(vec![0, 1], vec![0, 0]).unwrap();
        assert_eq!(decide(&mixed, &[0, 0], 0, 1, 1).branch, Branch::AutoAccept);
        let same = VerifierSecret::new(vec![0, 0], vec![0, 0]).unwrap();
        assert_eq!(decide(&same, &[0, 1], 0, 1, 1).branch, Branch::ParityAccept);
        assert_eq!(decide(&same, &[0, 0], 0, 1, 1).branch, Branch::ParityReject);
        assert!(!Branch::ThresholdReject.accepted());
    }

    #[test]
    fn bell_outcome_distribution_sums_to_one() {
        let eta = StateVector::zero(1).unwrap();
        let povm = MaliciousPovm::HonestBell { witness: eta };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let probs = povm
            .outcome_distribution(&[[c(r, 0.0), c(r, 0.0)]])
            .unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let zero = povm.outcome_distribution(&[[ONE, ZERO]]).unwrap();
        assert!((zero[0] - 0.5).abs() < 1e-12 && (zero[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn honest_closed_form_examples() {
        assert!((exact_pacc_honest(&singlet_instance(10.0).unwrap()).unwrap() - 1.0).abs() < 1e-9);
        let ket00 = StateVector::zero(2).unwrap();
        let inst = InstanceSpec::new(two_qubit_term(1), 0.5, 0.6, 10.0, Some(ket00)).unwrap();
        assert!((exact_pacc_honest(&inst).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn calculators_agree_with_enumeration() {
        for seed in 0..6 {
            let n = 2 + (seed as usize % 2);
            let inst = synth_instance(n, seed, 0.1).unwrap();
            let h = &inst.hamiltonian;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = StateVector::random(n, &mut rng).unwrap();
            let rho = DensityMatrix::from_pure(&StateVector::random(1, &mut rng).unwrap());
            let mut channels = vec![QubitChannel::Identity; n];
            channels[0] = QubitChannel::Replace(rho);
            channels[n - 1] = QubitChannel::Depolarize(0.3);
            let provers = [
                MaliciousPovm::HonestBell {
                    witness: eta.clone(),
                },
                MaliciousPovm::RandomOutcomes { n_qubits: n },
                MaliciousPovm::ProductBasis {
                    bases: vec![PauliBasis::X, PauliBasis::Y, PauliBasis::Z][..n].to_vec(),
                },
                MaliciousPovm::Constant {
                    outcomes: BellOutcomes::from_index(n, 5),
                },
                MaliciousPovm::Channeled {
                    witness: eta.clone(),
                    channels,
                },
            ];
            for p in &provers {
                let exact = exact_pacc_povm(h, p).unwrap();
                let brute = brute_force_pacc(h, p).unwrap();
                assert!(
                    (exact - brute).abs() < 1e-9,
                    "{}: {exact} vs {brute}",
                    p.name()
                );
            }
            let honest = 1.0 - h.energy(&eta).unwrap() / 2.0;
            assert!((exact_pacc_povm(h, &provers[0]).unwrap() - honest).abs() < 1e-9);
            let random = 1.0 - h.trace() / (1u64 << (n + 1)) as f64;
            assert!((exact_pacc_povm(h, &provers[1]).unwrap() - random).abs() < 1e-9);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_exact_on_singlet() {
        let inst = singlet_instance(10.0).unwrap();
        let prover = MaliciousPovm::HonestBell { witness: singlet() };
        let a = monte_carlo_pacc(&inst, &prover, 500, 3).unwrap();
        let b = monte_carlo_pacc(&inst, &prover, 500, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.accepts, 500);
        assert_eq!(a.half_width, 0.0);
        assert!(monte_carlo_pacc(&inst, &prover, 99, 3).is_err());
    }

    #[test]
    fn povm_rejects_bad_channels() {
        let povm = MaliciousPovm::Channeled {
            witness: singlet(),
            channels: vec![QubitChannel::Depolarize(1.5), QubitChannel::Identity],
        };
        assert!(povm.validate().is_err());
        let short = MaliciousPovm::Channeled {
            witness: singlet(),
            channels: vec![QubitChannel::Identity],
        };
        assert!(short.validate().is_err());
    }
}
