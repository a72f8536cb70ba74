//! Multi-qubit Pauli words in symplectic form.
//!
//! A [`PauliString`] stores one `(x, z)` bit pair per qubit, with
//! `(0,0)=I`, `(1,0)=X`, `(0,1)=Z` and `(1,1)=Y`, plus an explicit complex
//! coefficient. Qubit 0 is the leftmost letter in the text form and the most
//! significant tensor factor in the dense realisation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::dense::DenseOperator;
use crate::error::{Error, Result};

/// Default largest register realised densely (4096 x 4096).
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Largest register a mask can address.
pub const MAX_QUBITS: usize = 64;

const I_POW: [C64; 4] = [
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 0.0, im: 1.0 },
    C64 { re: -1.0, im: 0.0 },
    C64 { re: 0.0, im: -1.0 },
];

#[inline]
fn i_pow(k: i64) -> C64 {
    I_POW[k.rem_euclid(4) as usize]
}

fn mask_for(qubits: usize) -> u64 {
    if qubits == 64 {
        u64::MAX
    } else {
        (1u64 << qubits) - 1
    }
}

/// Map a qubit-indexed mask (bit i = qubit i) onto basis-index bits, where
/// qubit 0 is the most significant bit of a computational basis index.
fn to_index_bits(mask: u64, qubits: usize) -> u64 {
    if qubits == 0 {
        return 0;
    }
    mask.reverse_bits() >> (64 - qubits)
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' | '0' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A weighted tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    qubits: usize,
    x: u64,
    z: u64,
    coefficient: C64,
}

impl PauliString {
    pub fn new(qubits: usize, x_mask: u64, z_mask: u64, coefficient: C64) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Parameter(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let m = mask_for(qubits);
        if x_mask & !m != 0 || z_mask & !m != 0 {
            return Err(Error::Parameter(format!("masks exceed {qubits} qubits")));
        }
        Ok(Self {
            qubits,
            x: x_mask,
            z: z_mask,
            coefficient,
        })
    }

    pub fn identity(qubits: usize) -> Self {
        Self::new(qubits, 0, 0, C64::new(1.0, 0.0)).expect("valid register size")
    }

    /// `coefficient * letter` on `qubit`, identity elsewhere.
    pub fn single(qubits: usize, qubit: usize, letter: Pauli, coefficient: C64) -> Result<Self> {
        if qubit >= qubits {
            return Err(Error::Parameter(format!(
                "qubit {qubit} out of range for {qubits} qubits"
            )));
        }
        let (x, z) = letter.bits();
        Self::new(
            qubits,
            (x as u64) << qubit,
            (z as u64) << qubit,
            coefficient,
        )
    }

    /// Parse a letter string such as `"XYZI"` (qubit 0 first).
    pub fn from_letters(letters: &str, coefficient: C64) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut n = 0;
        for (i, ch) in letters.chars().enumerate() {
            let p = Pauli::from_letter(ch)
                .ok_or_else(|| Error::Parameter(format!("invalid Pauli letter {ch:?}")))?;
            let (xb, zb) = p.bits();
            if i >= MAX_QUBITS {
                return Err(Error::Parameter("too many qubits".into()));
            }
            x |= (xb as u64) << i;
            z |= (zb as u64) << i;
            n += 1;
        }
        Self::new(n, x, z, coefficient)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn pattern(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }

    pub fn with_coefficient(&self, coefficient: C64) -> Self {
        Self {
            coefficient,
            ..self.clone()
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        self.with_coefficient(self.coefficient * factor)
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn letters(&self) -> String {
        (0..self.qubits).map(|q| self.letter(q).letter()).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.qubits)
            .filter(|&q| (self.x | self.z) >> q & 1 == 1)
            .collect()
    }

    pub fn is_identity_pattern(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::Dimension(format!(
                "Pauli strings on {} and {} qubits",
                self.qubits, other.qubits
            )));
        }
        Ok(())
    }

    /// Exponent `k` in `P_a P_b = i^k P_{a xor b}` for the bare patterns.
    fn product_phase_exponent(&self, other: &Self) -> i64 {
        let mut k = 0i64;
        let active = (self.x | self.z) & (other.x | other.z);
        let mut bits = active;
        while bits != 0 {
            let q = bits.trailing_zeros();
            bits &= bits - 1;
            let (x1, z1) = (self.x >> q & 1, self.z >> q & 1);
            let (x2, z2) = (other.x >> q & 1, other.z >> q & 1);
            k += match (x1, z1) {
                (1, 1) => z2 as i64 - x2 as i64,
                (1, 0) => z2 as i64 * (2 * x2 as i64 - 1),
                (0, 1) => x2 as i64 * (1 - 2 * z2 as i64),
                _ => 0,
            };
        }
        k
    }

    /// Product `self * other` with exact phase tracking.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let phase = i_pow(self.product_phase_exponent(other));
        Ok(Self {
            qubits: self.qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            coefficient: self.coefficient * other.coefficient * phase,
        })
    }

    /// True iff the two patterns commute (even symplectic product).
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_compatible(other)?;
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(s.is_multiple_of(2))
    }

    pub fn dagger(&self) -> Self {
        self.with_coefficient(self.coefficient.conj())
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.qubits > cap {
            return Err(Error::ResourceCap {
                requested: self.qubits,
                cap,
            });
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseOperator> {
        self.check_cap(cap)?;
        let mut out = DenseOperator::zeros(1 << self.qubits);
        self.accumulate_dense(&mut out, C64::new(1.0, 0.0));
        Ok(out)
    }

    /// `out += factor * self` in dense form.
    fn accumulate_dense(&self, out: &mut DenseOperator, factor: C64) {
        let map = IndexAction::new(self);
        let w = self.coefficient * factor;
        for col in 0..out.dim() {
            let (row, phase) = map.act(col);
            let cur = out.get(row, col);
            out.set(row, col, cur + w * phase);
        }
    }

    /// Closed-form unitary `exp(-i a P t)` for a real coefficient `a`.
    pub fn exp_term(&self, t: f64) -> Result<ExpPauli> {
        ExpPauli::new(self, t)
    }
}

/// Action of a bare Pauli pattern on computational basis states:
/// `P |c> = phase(c) |c xor flip>`.
#[derive(Debug, Clone, Copy)]
struct IndexAction {
    flip: u64,
    zbits: u64,
    y_phase: C64,
}

impl IndexAction {
    fn new(p: &PauliString) -> Self {
        Self {
            flip: to_index_bits(p.x, p.qubits),
            zbits: to_index_bits(p.z, p.qubits),
            y_phase: i_pow((p.x & p.z).count_ones() as i64),
        }
    }

    #[inline]
    fn act(&self, col: usize) -> (usize, C64) {
        let sign = if (self.zbits & col as u64).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        ((col as u64 ^ self.flip) as usize, self.y_phase * sign)
    }
}

/// Matrix-free `cos(a t) I - i sin(a t) P`, exact because `P^2 = I`.
#[derive(Debug, Clone)]
pub struct ExpPauli {
    qubits: usize,
    action: IndexAction,
    cos: f64,
    sin: f64,
}

impl ExpPauli {
    pub fn new(term: &PauliString, t: f64) -> Result<Self> {
        let c = term.coefficient();
        if c.im.abs() > 1e-12 * c.re.abs().max(1.0) {
            return Err(Error::NotHermitian(format!(
                "Pauli term coefficient {c} is not real"
            )));
        }
        let angle = c.re * t;
        Ok(Self {
            qubits: term.qubits,
            action: IndexAction::new(term),
            cos: angle.cos(),
            sin: angle.sin(),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    /// `U <- exp(-i a P t) U`, in O(d^2).
    pub fn apply_left(&self, u: &mut DenseOperator) {
        let d = u.dim();
        assert_eq!(
            d,
            1usize << self.qubits,
            "operator dimension does not match register"
        );
        let m = u.as_matrix_mut();
        let minus_i_sin = C64::new(0.0, -self.sin);
        let flip = self.action.flip as usize;
        if flip == 0 {
            // Diagonal pattern: each row is scaled by cos - i sin * phase(row).
            for r in 0..d {
                let (_, ph) = self.action.act(r);
                let f = C64::new(self.cos, 0.0) + minus_i_sin * ph;
                for c in 0..d {
                    m[(r, c)] *= f;
                }
            }
            return;
        }
        for r in 0..d {
            let partner = r ^ flip;
            if partner < r {
                continue;
            }
            // P[r, partner] and P[partner, r].
            let (_, ph_rp) = self.action.act(partner);
            let (_, ph_pr) = self.action.act(r);
            for c in 0..d {
                let ur = m[(r, c)];
                let up = m[(partner, c)];
                m[(r, c)] = ur * self.cos + minus_i_sin * ph_rp * up;
                m[(partner, c)] = up * self.cos + minus_i_sin * ph_pr * ur;
            }
        }
    }

    /// `psi <- exp(-i a P t) psi`.
    pub fn apply_vec(&self, psi: &mut [C64]) {
        assert_eq!(psi.len(), 1usize << self.qubits);
        let old = psi.to_vec();
        let minus_i_sin = C64::new(0.0, -self.sin);
        for v in psi.iter_mut() {
            *v *= self.cos;
        }
        for (c, amp) in old.iter().enumerate() {
            let (r, ph) = self.action.act(c);
            psi[r] += minus_i_sin * ph * amp;
        }
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut u = DenseOperator::identity(1 << self.qubits);
        self.apply_left(&mut u);
        u
    }
}

/// Dense `exp(-i a P t)` for a Hermitian term `a P`.
pub fn exp_pauli_term(term: &PauliString, t: f64) -> Result<DenseOperator> {
    term.check_cap(DEFAULT_DENSE_CAP)?;
    Ok(ExpPauli::new(term, t)?.to_dense())
}

pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.try_mul(b)
}

pub fn commutator_is_zero(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{}{}j)", z.re, sign, z.im.abs())
}

fn parse_complex(s: &str) -> Option<C64> {
    let body = s
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')?
        .strip_suffix('j')?;
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let i = split?;
    let re: f64 = body[..i].parse().ok()?;
    let im: f64 = body[i..].parse().ok()?;
    Some(C64::new(re, im))
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", fmt_complex(self.coefficient), self.letters())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let close = s
            .find(')')
            .ok_or_else(|| Error::Parameter(format!("missing coefficient in {s:?}")))?;
        let coeff = parse_complex(&s[..=close])
            .ok_or_else(|| Error::Parameter(format!("bad coefficient in {s:?}")))?;
        PauliString::from_letters(s[close + 1..].trim(), coeff)
    }
}

/// Canonical sort key: lexicographic on `(z_mask, x_mask)`.
fn canonical_key(x: u64, z: u64) -> (u64, u64) {
    (z, x)
}

/// Sum of Pauli strings on a common register, merged by pattern and kept in
/// canonical `(z_mask, x_mask)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero(qubits: usize) -> Self {
        Self {
            qubits,
            terms: Vec::new(),
        }
    }

    /// Merge terms sharing a pattern. Exactly-zero merged coefficients are
    /// removed; use [`PauliSum::pruned`] for a tolerance.
    pub fn from_terms(qubits: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut acc: BTreeMap<(u64, u64), C64> = BTreeMap::new();
        for t in terms {
            if t.qubit_count() != qubits {
                return Err(Error::Dimension(format!(
                    "term on {} qubits in a {qubits}-qubit sum",
                    t.qubit_count()
                )));
            }
            *acc.entry(canonical_key(t.x, t.z))
                .or_insert(C64::new(0.0, 0.0)) += t.coefficient;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|((z, x), c)| PauliString {
                qubits,
                x,
                z,
                coefficient: c,
            })
            .collect();
        Ok(Self { qubits, terms })
    }

    /// Drop terms whose modulus is at most `rel_tol` times the largest one.
    pub fn pruned(&self, rel_tol: f64) -> Self {
        let max = self
            .terms
            .iter()
            .map(|t| t.coefficient.norm())
            .fold(0.0, f64::max);
        let cut = rel_tol * max;
        Self {
            qubits: self.qubits,
            terms: self
                .terms
                .iter()
                .filter(|t| t.coefficient.norm() > cut)
                .cloned()
                .collect(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliString> {
        self.terms.iter()
    }

    /// Coefficient of the given pattern, zero if absent.
    pub fn coefficient_of(&self, x_mask: u64, z_mask: u64) -> C64 {
        self.terms
            .binary_search_by_key(&canonical_key(x_mask, z_mask), |t| canonical_key(t.x, t.z))
            .map(|i| self.terms[i].coefficient)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Largest imaginary part among coefficients.
    pub fn hermiticity_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Copy with every coefficient made exactly real.
    pub fn real_part(&self) -> Self {
        Self {
            qubits: self.qubits,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coefficient(C64::new(t.coefficient.re, 0.0)))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_terms(self.qubits, self.terms.iter().map(|t| t.scaled(factor)))
            .expect("same register")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::Dimension(format!(
                "sums on {} and {} qubits",
                self.qubits, other.qubits
            )));
        }
        Self::from_terms(
            self.qubits,
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::Dimension(format!(
                "sums on {} and {} qubits",
                self.qubits, other.qubits
            )));
        }
        let mut products = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                products.push(a.try_mul(b)?);
            }
        }
        Self::from_terms(self.qubits, products)
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseOperator> {
        if self.qubits > cap {
            return Err(Error::ResourceCap {
                requested: self.qubits,
                cap,
            });
        }
        let mut out = DenseOperator::zeros(1 << self.qubits);
        for t in &self.terms {
            t.accumulate_dense(&mut out, C64::new(1.0, 0.0));
        }
        Ok(out)
    }
}

impl<'a> IntoIterator for &'a PauliSum {
    type Item = &'a PauliString;
    type IntoIter = std::slice::Iter<'a, PauliString>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}
