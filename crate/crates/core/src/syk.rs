//! Random couplings, Jordan-Wigner Majoranas and the generalized SYK
//! Hamiltonian
//!
//! ```text
//! H = sum_{i<j<k<l} J_ijkl chi_i chi_j chi_k chi_l
//!   + (mu/4) sum_{ijkl} C_ij C_kl chi_i chi_j chi_k chi_l
//! ```
//!
//! with `{chi_i, chi_j} = delta_ij`. Couplings are stored only on canonical
//! ordered index sets; the antisymmetric extension is computed on read.

use std::collections::HashMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Support signatures of the 70 spin interactions for N = 8, qubit 1 first,
/// `0` for identity.
pub const N8_TERM_SIGNATURES: [&str; 70] = [
    "xx00", "xyxy", "xyxz", "xyy0", "xyz0", "xzxy", "xzxz", "xzy0", "xzz0", "x0x0", "x0yy", "x0yz",
    "x0zy", "x0zz", "x00x", "yxyx", "yxzx", "yx0y", "yx0z", "yyx0", "yyyy", "yyyz", "yyzy", "yyzz",
    "yy0x", "yzx0", "yzyy", "yzyz", "yzzy", "yzzz", "yz0x", "y0xy", "y0xz", "y0y0", "y0z0", "zxyx",
    "zxzx", "zx0y", "zx0z", "zyx0", "zyyy", "zyyz", "zyzy", "zyzz", "zy0x", "zzx0", "zzyy", "zzyz",
    "zzzy", "zzzz", "zz0x", "z0xy", "z0xz", "z0y0", "z0z0", "0xx0", "0xyy", "0xyz", "0xzy", "0xzz",
    "0x0x", "0yyx", "0yzx", "0y0y", "0y0z", "0zyx", "0zzx", "0z0y", "0z0z", "00xx",
];

/// Which variance is used for the pair tensor `C_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VarianceConvention {
    /// `var(C_ij) = J^2 / N^2`
    #[default]
    Single,
    /// `var(C_ij) = 2 J^2 / N^2`
    Double,
}

impl VarianceConvention {
    pub fn pair_variance_factor(self) -> f64 {
        match self {
            VarianceConvention::Single => 1.0,
            VarianceConvention::Double => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of Majorana modes, even and at least 4.
    pub n_majorana: usize,
    pub mu: f64,
    /// Four-body energy scale `J_4`.
    pub j4: f64,
    /// Pair scale `J`, dimension energy^(1/2).
    pub j2: f64,
    pub seed: u64,
    #[serde(default)]
    pub convention: VarianceConvention,
}

impl ModelParams {
    pub fn new(n_majorana: usize, mu: f64, seed: u64) -> Self {
        Self {
            n_majorana,
            mu,
            j4: 1.0,
            j2: 1.0,
            seed,
            convention: VarianceConvention::Single,
        }
    }

    pub fn with_convention(mut self, convention: VarianceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_n(self.n_majorana)?;
        if !(self.j4 > 0.0 && self.j4.is_finite()) {
            return Err(Error::Parameter(format!(
                "j4 must be positive, got {}",
                self.j4
            )));
        }
        if !(self.j2 > 0.0 && self.j2.is_finite()) {
            return Err(Error::Parameter(format!(
                "j2 must be positive, got {}",
                self.j2
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::Parameter("mu must be finite".into()));
        }
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.n_majorana / 2
    }

    pub fn quartic_variance(&self) -> f64 {
        let n = self.n_majorana as f64;
        6.0 * self.j4 * self.j4 / (n * n * n)
    }

    pub fn pair_variance(&self) -> f64 {
        let n = self.n_majorana as f64;
        self.convention.pair_variance_factor() * self.j2 * self.j2 / (n * n)
    }
}

fn validate_n(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "number of Majoranas must be even and >= 4, got {n}"
        )));
    }
    if n / 2 > crate::pauli::MAX_QUBITS {
        return Err(Error::Parameter(format!(
            "{n} Majoranas exceed the register limit"
        )));
    }
    Ok(())
}

/// Seed of sample `index` derived from `master`.
///
/// SplitMix64 finaliser applied to `master + (index + 1) * 0x9E3779B97F4A7C15`
/// (wrapping), so streams depend only on `(master, index)` and never on
/// scheduling.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One disorder realisation: `J_ijkl` on `i<j<k<l` and `C_ij` on `i<j`,
/// stored in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub params: ModelParams,
    quadruples: Vec<([usize; 4], f64)>,
    pairs: Vec<([usize; 2], f64)>,
}

/// Sign of the permutation sorting `idx`, and the sorted indices; `None` when
/// an index repeats.
fn sort_with_sign<const K: usize>(mut idx: [usize; K]) -> Option<(f64, [usize; K])> {
    let mut sign = 1.0;
    for i in 0..K {
        for j in 0..K - 1 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            } else if idx[j] == idx[j + 1] {
                return None;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, idx))
}

fn quadruple_rank(n: usize, q: [usize; 4]) -> usize {
    // lexicographic rank among 4-subsets of 0..n
    let mut rank = 0;
    let mut prev = 0;
    for (slot, &v) in q.iter().enumerate() {
        for skipped in prev..v {
            rank += binomial(n - skipped - 1, 3 - slot);
        }
        prev = v + 1;
    }
    rank
}

fn pair_rank(n: usize, p: [usize; 2]) -> usize {
    let [i, j] = p;
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl CouplingSet {
    /// Build from explicit canonical values (lexicographic order).
    pub fn from_values(params: ModelParams, quartic: Vec<f64>, pair: Vec<f64>) -> Result<Self> {
        params.validate()?;
        let n = params.n_majorana;
        if quartic.len() != binomial(n, 4) || pair.len() != binomial(n, 2) {
            return Err(Error::Parameter(format!(
                "expected {} quadruples and {} pairs, got {} and {}",
                binomial(n, 4),
                binomial(n, 2),
                quartic.len(),
                pair.len()
            )));
        }
        let quadruples = quadruple_indices(n).zip(quartic).collect();
        let pairs = pair_indices(n).zip(pair).collect();
        Ok(Self {
            params,
            quadruples,
            pairs,
        })
    }

    pub fn n_majorana(&self) -> usize {
        self.params.n_majorana
    }

    pub fn quadruples(&self) -> &[([usize; 4], f64)] {
        &self.quadruples
    }

    pub fn pairs(&self) -> &[([usize; 2], f64)] {
        &self.pairs
    }

    /// Antisymmetric read of `J_ijkl`.
    pub fn j(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        match sort_with_sign([i, j, k, l]) {
            Some((sign, q)) => sign * self.quadruples[quadruple_rank(self.n_majorana(), q)].1,
            None => 0.0,
        }
    }

    /// Antisymmetric read of `C_ij`.
    pub fn c(&self, i: usize, j: usize) -> f64 {
        match sort_with_sign([i, j]) {
            Some((sign, p)) => sign * self.pairs[pair_rank(self.n_majorana(), p)].1,
            None => 0.0,
        }
    }

    /// Partner realisation `(J, C, mu) -> (-J, C, -mu)`, whose Hamiltonian is
    /// exactly `-H`.
    pub fn negated_partner(&self) -> Self {
        let mut params = self.params;
        params.mu = -params.mu;
        Self {
            params,
            quadruples: self.quadruples.iter().map(|&(q, v)| (q, -v)).collect(),
            pairs: self.pairs.clone(),
        }
    }

    /// Same couplings with a different `mu`.
    pub fn with_mu(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.params.mu = mu;
        out
    }

    pub fn to_json_record(&self) -> CouplingRecord {
        CouplingRecord {
            seed: self.params.seed,
            n: self.params.n_majorana,
            mu: self.params.mu,
            j4: self.params.j4,
            j2: self.params.j2,
            convention: self.params.convention,
            quadruples: self
                .quadruples
                .iter()
                .map(|&([i, j, k, l], v)| (i, j, k, l, v))
                .collect(),
            pairs: self.pairs.iter().map(|&([i, j], v)| (i, j, v)).collect(),
        }
    }
}

/// Serialised form of a [`CouplingSet`]; indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRecord {
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    pub j4: f64,
    pub j2: f64,
    pub convention: VarianceConvention,
    pub quadruples: Vec<(usize, usize, usize, usize, f64)>,
    pub pairs: Vec<(usize, usize, f64)>,
}

impl TryFrom<CouplingRecord> for CouplingSet {
    type Error = Error;

    fn try_from(rec: CouplingRecord) -> Result<Self> {
        let params = ModelParams {
            n_majorana: rec.n,
            mu: rec.mu,
            j4: rec.j4,
            j2: rec.j2,
            seed: rec.seed,
            convention: rec.convention,
        };
        params.validate()?;
        let expected_q: Vec<[usize; 4]> = quadruple_indices(rec.n).collect();
        let expected_p: Vec<[usize; 2]> = pair_indices(rec.n).collect();
        let got_q: Vec<[usize; 4]> = rec
            .quadruples
            .iter()
            .map(|&(i, j, k, l, _)| [i, j, k, l])
            .collect();
        let got_p: Vec<[usize; 2]> = rec.pairs.iter().map(|&(i, j, _)| [i, j]).collect();
        if got_q != expected_q || got_p != expected_p {
            return Err(Error::Parameter(
                "coupling indices are not in canonical order".into(),
            ));
        }
        CouplingSet::from_values(
            params,
            rec.quadruples.iter().map(|q| q.4).collect(),
            rec.pairs.iter().map(|p| p.2).collect(),
        )
    }
}

pub fn quadruple_indices(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |i| {
        (i + 1..n)
            .flat_map(move |j| (j + 1..n).flat_map(move |k| (k + 1..n).map(move |l| [i, j, k, l])))
    })
}

pub fn pair_indices(n: usize) -> impl Iterator<Item = [usize; 2]> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| [i, j]))
}

/// Draw one realisation. Quadruples are drawn first, then pairs, each in
/// lexicographic order, from a ChaCha20 stream seeded with `params.seed`.
pub fn generate_couplings(params: &ModelParams) -> Result<CouplingSet> {
    params.validate()?;
    let n = params.n_majorana;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let quartic = Normal::new(0.0, params.quartic_variance().sqrt()).expect("finite variance");
    let pair = Normal::new(0.0, params.pair_variance().sqrt()).expect("finite variance");
    let q: Vec<f64> = (0..binomial(n, 4))
        .map(|_| quartic.sample(&mut rng))
        .collect();
    let p: Vec<f64> = (0..binomial(n, 2)).map(|_| pair.sample(&mut rng)).collect();
    CouplingSet::from_values(*params, q, p)
}

/// The `N` Majorana operators as Pauli strings on `N/2` qubits:
/// `chi_{2i} = X..X Z_i / sqrt 2`, `chi_{2i+1} = X..X Y_i / sqrt 2` (0-based).
#[derive(Debug, Clone)]
pub struct MajoranaSet {
    pub operators: Vec<PauliString>,
}

impl MajoranaSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, i: usize) -> &PauliString {
        &self.operators[i]
    }
}

/// Jordan-Wigner map for `n` Majoranas. Accepts any even `n >= 2`.
pub fn jordan_wigner(n: usize) -> Result<MajoranaSet> {
    if n < 2 || !n.is_multiple_of(2) || n / 2 > crate::pauli::MAX_QUBITS {
        return Err(Error::Parameter(format!(
            "number of Majoranas must be even and >= 2, got {n}"
        )));
    }
    let q = n / 2;
    let norm = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut operators = Vec::with_capacity(n);
    for site in 0..q {
        let tail = (1u64 << site) - 1;
        let here = 1u64 << site;
        operators.push(PauliString::new(q, tail, here, norm)?);
        operators.push(PauliString::new(q, tail | here, here, norm)?);
    }
    Ok(MajoranaSet { operators })
}

/// Spin Hamiltonian with its identity component split off.
#[derive(Debug, Clone)]
pub struct SykHamiltonian {
    /// Traceless part, canonical order, real coefficients.
    pub terms: PauliSum,
    /// Coefficient of the identity removed from `terms`.
    pub energy_offset: f64,
}

fn accumulate(acc: &mut HashMap<(u64, u64), C64>, p: PauliString) {
    *acc.entry(p.pattern()).or_insert(C64::new(0.0, 0.0)) += p.coefficient();
}

/// Collect accumulated patterns into a real Hermitian sum and the identity
/// coefficient.
fn finish(qubits: usize, acc: HashMap<(u64, u64), C64>) -> Result<(PauliSum, f64)> {
    let identity = acc.get(&(0, 0)).copied().unwrap_or(C64::new(0.0, 0.0));
    let sum = PauliSum::from_terms(
        qubits,
        acc.into_iter()
            .filter(|&(pat, _)| pat != (0, 0))
            .map(|((x, z), c)| PauliString::new(qubits, x, z, c).expect("masks in range")),
    )?
    .pruned(1e-12);
    let scale = sum
        .iter()
        .map(|t| t.coefficient().norm())
        .fold(identity.norm(), f64::max);
    if sum.hermiticity_defect() > 1e-10 * scale.max(1e-300)
        || identity.im.abs() > 1e-10 * scale.max(1e-300)
    {
        return Err(Error::NotHermitian(
            "assembled operator has imaginary coefficients".into(),
        ));
    }
    Ok((sum.real_part(), identity.re))
}

/// Ordered products `chi_i chi_j` for all `i, j`.
fn pair_products(chi: &MajoranaSet) -> Result<Vec<Vec<PauliString>>> {
    let n = chi.len();
    (0..n)
        .map(|i| (0..n).map(|j| chi.get(i).try_mul(chi.get(j))).collect())
        .collect()
}

pub fn build_hamiltonian(c: &CouplingSet) -> Result<SykHamiltonian> {
    let n = c.n_majorana();
    let q = n / 2;
    let chi = jordan_wigner(n)?;
    let pp = pair_products(&chi)?;
    let mut acc: HashMap<(u64, u64), C64> = HashMap::new();

    for &([i, j, k, l], value) in c.quadruples() {
        if value == 0.0 {
            continue;
        }
        let p = pp[i][j].try_mul(&pp[k][l])?;
        accumulate(&mut acc, p.scaled(C64::new(value, 0.0)));
    }

    let mu = c.params.mu;
    if mu != 0.0 {
        for i in 0..n {
            for j in 0..n {
                let cij = c.c(i, j);
                if cij == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let ckl = c.c(k, l);
                        if ckl == 0.0 {
                            continue;
                        }
                        let p = pp[i][j].try_mul(&pp[k][l])?;
                        accumulate(&mut acc, p.scaled(C64::new(0.25 * mu * cij * ckl, 0.0)));
                    }
                }
            }
        }
    }

    if acc.values().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(SykHamiltonian {
            terms: PauliSum::zero(q),
            energy_offset: 0.0,
        });
    }
    let (terms, energy_offset) = finish(q, acc)?;
    Ok(SykHamiltonian {
        terms,
        energy_offset,
    })
}

/// `b = i sum_{ij} C_ij chi_i chi_j` over the full antisymmetric tensor.
pub fn build_boson_operator(c: &CouplingSet) -> Result<PauliSum> {
    let n = c.n_majorana();
    let q = n / 2;
    let chi = jordan_wigner(n)?;
    let mut acc: HashMap<(u64, u64), C64> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let cij = c.c(i, j);
            if cij == 0.0 {
                continue;
            }
            let p = chi.get(i).try_mul(chi.get(j))?;
            accumulate(&mut acc, p.scaled(C64::new(0.0, cij)));
        }
    }
    if acc.values().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(PauliSum::zero(q));
    }
    let (sum, identity) = finish(q, acc)?;
    debug_assert!(identity.abs() < 1e-12);
    Ok(sum)
}

/// `(mean_s |a_s|^2)^(-1/2)` over the terms of `h`.
pub fn coefficient_statistic(h: &PauliSum) -> Result<f64> {
    let mean = mean_square_coefficient(h)?;
    if mean == 0.0 {
        return Err(Error::Domain("all coefficients vanish".into()));
    }
    Ok(mean.powf(-0.5))
}

/// `mean_s |a_s|^2`.
pub fn mean_square_coefficient(h: &PauliSum) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::Domain(
            "coefficient statistic of an empty sum".into(),
        ));
    }
    Ok(h.iter().map(|t| t.coefficient().norm_sqr()).sum::<f64>() / h.len() as f64)
}

/// Lower-case support signature, e.g. `"xx00"` for `X X I I`.
pub fn support_signature(p: &PauliString) -> String {
    p.letters()
        .chars()
        .map(|c| match c {
            'I' => '0',
            other => other.to_ascii_lowercase(),
        })
        .collect()
}

/// Term order of the signature table: letters ranked `x < y < z < 0`,
/// compared from qubit 1. Returns indices into `h.terms()`.
pub fn table_ordering(h: &PauliSum) -> Vec<usize> {
    let key = |p: &PauliString| -> Vec<u8> {
        support_signature(p)
            .bytes()
            .map(|c| match c {
                b'x' => 0,
                b'y' => 1,
                b'z' => 2,
                _ => 3,
            })
            .collect()
    };
    let keys: Vec<Vec<u8>> = h.iter().map(key).collect();
    let mut idx: Vec<usize> = (0..h.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    idx
}
