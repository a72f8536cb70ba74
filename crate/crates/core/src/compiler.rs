//! Reduction of k-body Pauli rotations to one- and two-body gates.
//!
//! A Z-chain rotation is peeled one qubit at a time with
//!
//! ```text
//! e^{-i t Z_1 Z_2 ... Z_k} = P1 e^{-i t Z_2 ... Z_k} P2
//! P1 = e^{-i pi X_2/4} e^{-i pi Z_1 Z_2/4} e^{-i pi Y_2/4}
//! P2 = e^{-i pi Y_2/4} e^{-i pi Z_1 Z_2/4} e^{ i pi Y_2/2} e^{ i pi X_2/4}
//! ```
//!
//! so each level costs five one-body and two two-body gates. X and Y factors
//! are first rotated onto Z. All gates are `e^{-i angle G}`.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::syk::{build_hamiltonian, generate_couplings, mean_square_coefficient, ModelParams};

const QUARTER: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateAxis {
    X,
    Y,
    Z,
    Zz,
}

/// Why a gate is present; only conjugation gates enter the per-level count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateRole {
    BasisChange,
    Conjugation,
    Core,
}

/// `e^{-i angle G}` with `G` a single Pauli on `qubits[0]` or `Z Z` on
/// `qubits[0], qubits[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub qubits: Vec<usize>,
    pub axis: GateAxis,
    pub angle: f64,
    pub role: GateRole,
}

impl Gate {
    fn one(qubit: usize, axis: GateAxis, angle: f64, role: GateRole) -> Self {
        Self {
            qubits: vec![qubit],
            axis,
            angle,
            role,
        }
    }

    fn zz(a: usize, b: usize, angle: f64, role: GateRole) -> Self {
        Self {
            qubits: vec![a, b],
            axis: GateAxis::Zz,
            angle,
            role,
        }
    }

    pub fn body(&self) -> usize {
        self.qubits.len()
    }

    /// Generator as a unit-coefficient Pauli string on `register` qubits.
    pub fn generator(&self, register: usize) -> Result<PauliString> {
        let unit = C64::new(1.0, 0.0);
        match self.axis {
            GateAxis::X => PauliString::single(register, self.qubits[0], Pauli::X, unit),
            GateAxis::Y => PauliString::single(register, self.qubits[0], Pauli::Y, unit),
            GateAxis::Z => PauliString::single(register, self.qubits[0], Pauli::Z, unit),
            GateAxis::Zz => {
                let z = (1u64 << self.qubits[0]) | (1u64 << self.qubits[1]);
                PauliString::new(register, 0, z, unit)
            }
        }
    }
}

/// Gates in application order; the realised unitary is
/// `e^{i global_phase} G_last ... G_first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub qubits: usize,
    pub gates: Vec<Gate>,
    pub global_phase: f64,
}

#[derive(Debug, Clone, Serialize)]
struct GateRecord<'a> {
    qubits: &'a [usize],
    axis: GateAxis,
    angle: f64,
    order: usize,
    role: GateRole,
}

impl GateSequence {
    pub fn empty(qubits: usize) -> Self {
        Self {
            qubits,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count(&self, body: usize, role: Option<GateRole>) -> usize {
        self.gates
            .iter()
            .filter(|g| g.body() == body && role.is_none_or(|r| g.role == r))
            .count()
    }

    /// Append `other`, which acts after `self`.
    pub fn then(mut self, other: GateSequence) -> Result<Self> {
        if other.qubits != self.qubits {
            return Err(Error::Dimension(format!(
                "{} vs {} qubits",
                self.qubits, other.qubits
            )));
        }
        self.gates.extend(other.gates);
        self.global_phase += other.global_phase;
        Ok(self)
    }

    pub fn dense_product(&self) -> Result<DenseOperator> {
        let d = 1usize << self.qubits;
        let mut u = DenseOperator::identity(d);
        crate::pauli::PauliString::identity(self.qubits).to_dense()?; // cap check
        for g in &self.gates {
            g.generator(self.qubits)?
                .with_coefficient(C64::new(1.0, 0.0))
                .exp_term(g.angle)?
                .apply_left(&mut u);
        }
        Ok(u.scale(C64::from_polar(1.0, self.global_phase)))
    }

    /// `[{qubits, axis, angle, order, role}, ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        let recs: Vec<GateRecord> = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| GateRecord {
                qubits: &g.qubits,
                axis: g.axis,
                angle: g.angle,
                order: i,
                role: g.role,
            })
            .collect();
        serde_json::to_value(recs).expect("gate records serialise")
    }
}

/// Outcome of the brute-force check of the peeling identity on three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainIdentityCheck {
    /// `|Tr(target^dagger P1 core P2)| / 8` at a test angle.
    pub fidelity: f64,
    /// Phase of that overlap.
    pub phase: f64,
    /// Phase of `P2 P1`, i.e. how far `P2` is from `P1^dagger`.
    pub p2_vs_p1_dagger_phase: f64,
    /// Whether the literal gate angles were usable without correction.
    pub verbatim_ok: bool,
}

fn p1_gates(a: usize, b: usize) -> [Gate; 3] {
    use GateRole::Conjugation as C;
    [
        Gate::one(b, GateAxis::Y, QUARTER, C),
        Gate::zz(a, b, QUARTER, C),
        Gate::one(b, GateAxis::X, QUARTER, C),
    ]
}

fn p2_gates(a: usize, b: usize) -> [Gate; 4] {
    use GateRole::Conjugation as C;
    [
        Gate::one(b, GateAxis::X, -QUARTER, C),
        Gate::one(b, GateAxis::Y, -2.0 * QUARTER, C),
        Gate::zz(a, b, QUARTER, C),
        Gate::one(b, GateAxis::Y, QUARTER, C),
    ]
}

fn overlap(a: &DenseOperator, b: &DenseOperator) -> C64 {
    a.as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        / a.dim() as f64
}

/// Verify the peeling identity by dense products; computed once.
pub fn chain_identity_check() -> &'static ChainIdentityCheck {
    static CHECK: OnceLock<ChainIdentityCheck> = OnceLock::new();
    CHECK.get_or_init(|| {
        let t = 0.37;
        let mut seq = GateSequence::empty(3);
        seq.gates.extend(p2_gates(0, 1));
        seq.gates.push(Gate::zz(1, 2, t, GateRole::Core));
        seq.gates.extend(p1_gates(0, 1));
        let got = seq.dense_product().expect("3 qubits");
        let target = PauliString::from_letters("ZZZ", C64::new(1.0, 0.0))
            .unwrap()
            .exp_term(t)
            .unwrap()
            .to_dense();
        let ov = overlap(&target, &got);

        let mut pp = GateSequence::empty(3);
        pp.gates.extend(p1_gates(0, 1));
        pp.gates.extend(p2_gates(0, 1));
        let p2p1 = pp.dense_product().expect("3 qubits").trace() / 8.0;
        ChainIdentityCheck {
            fidelity: ov.norm(),
            phase: ov.arg(),
            p2_vs_p1_dagger_phase: p2p1.arg(),
            verbatim_ok: (ov - C64::new(1.0, 0.0)).norm() < 1e-12,
        }
    })
}

/// Peel the chain on `chain` (ordered qubits) down to a two-body core with
/// angle `angle`.
fn zz_chain_on(chain: &[usize], angle: f64) -> Result<Vec<Gate>> {
    match chain.len() {
        0 => Err(Error::Parameter("empty Z chain".into())),
        1 => Ok(vec![Gate::one(
            chain[0],
            GateAxis::Z,
            angle,
            GateRole::Core,
        )]),
        2 => Ok(vec![Gate::zz(chain[0], chain[1], angle, GateRole::Core)]),
        _ => {
            let check = chain_identity_check();
            if !check.verbatim_ok {
                return Err(Error::Domain(format!(
                    "chain identity failed its self-check: {check:?}"
                )));
            }
            let (a, b) = (chain[0], chain[1]);
            let mut gates: Vec<Gate> = p2_gates(a, b).to_vec();
            gates.extend(zz_chain_on(&chain[1..], angle)?);
            gates.extend(p1_gates(a, b));
            Ok(gates)
        }
    }
}

/// `e^{-i (pi/2) Z_0 ... Z_{k-1} tau}` on `k` qubits.
pub fn decompose_zz_chain(k: usize, tau: f64) -> Result<GateSequence> {
    if k < 2 {
        return Err(Error::Parameter(format!(
            "a Z chain needs at least 2 qubits, got {k}"
        )));
    }
    if k > crate::pauli::MAX_QUBITS {
        return Err(Error::ResourceCap {
            requested: k,
            cap: crate::pauli::MAX_QUBITS,
        });
    }
    let chain: Vec<usize> = (0..k).collect();
    Ok(GateSequence {
        qubits: k,
        gates: zz_chain_on(&chain, std::f64::consts::FRAC_PI_2 * tau)?,
        global_phase: 0.0,
    })
}

/// `e^{-i a P tau}` for a term `a P` with real `a`.
pub fn decompose_general_pauli(term: &PauliString, tau: f64) -> Result<GateSequence> {
    let a = term.coefficient();
    if a.im.abs() > 1e-12 * a.norm().max(1.0) {
        return Err(Error::NotHermitian(format!("coefficient {a} is not real")));
    }
    let q = term.qubit_count();
    let angle = a.re * tau;
    if a.re == 0.0 {
        return Ok(GateSequence::empty(q));
    }
    if term.is_identity_pattern() {
        return Ok(GateSequence {
            qubits: q,
            gates: Vec::new(),
            global_phase: -angle,
        });
    }
    let support = term.support();
    let mut before = Vec::new();
    let mut after = Vec::new();
    for &s in &support {
        match term.letter(s) {
            // X = R Z R^dagger, R = e^{-i pi Y/4}
            Pauli::X => {
                before.push(Gate::one(s, GateAxis::Y, -QUARTER, GateRole::BasisChange));
                after.push(Gate::one(s, GateAxis::Y, QUARTER, GateRole::BasisChange));
            }
            // Y = R Z R^dagger, R = e^{i pi X/4}
            Pauli::Y => {
                before.push(Gate::one(s, GateAxis::X, QUARTER, GateRole::BasisChange));
                after.push(Gate::one(s, GateAxis::X, -QUARTER, GateRole::BasisChange));
            }
            _ => {}
        }
    }
    let mut gates = before;
    gates.extend(zz_chain_on(&support, angle)?);
    gates.extend(after);
    Ok(GateSequence {
        qubits: q,
        gates,
        global_phase: 0.0,
    })
}

/// Native gate cost of one k-body term: `7(k-2)` for `k > 2`, else 1.
pub fn gate_cost(k: usize) -> usize {
    if k > 2 {
        7 * (k - 2)
    } else {
        1
    }
}

/// One product-formula step `prod_s e^{-i a_s S_s dt}` as a gate sequence.
/// The first entry of `ordering` is the leftmost factor and therefore acts
/// last.
pub fn compiled_trotter_step(h: &PauliSum, dt: f64, ordering: &[usize]) -> Result<GateSequence> {
    let mut seq = GateSequence::empty(h.qubit_count());
    for &i in ordering.iter().rev() {
        seq = seq.then(decompose_general_pauli(&h.terms()[i], dt)?)?;
    }
    Ok(seq)
}

/// Gate counts for simulating one disorder sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub n_majorana: usize,
    /// Number of Pauli terms `m`.
    pub terms: usize,
    pub trotter_steps: u64,
    /// Terms by weight: `weight_histogram[k]` terms act on `k` qubits.
    pub weight_histogram: Vec<usize>,
    pub one_body_count: u64,
    pub two_body_count: u64,
    pub per_step_gates: u64,
    pub total_gates: u64,
    /// `mean_s |a_s|^2` of the sample.
    pub mean_square_coefficient: f64,
}

impl ResourceEstimate {
    pub const CSV_HEADER: &'static str = "N,m,n,one_body,two_body,total";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n_majorana,
            self.terms,
            self.trotter_steps,
            self.one_body_count,
            self.two_body_count,
            self.total_gates
        )
    }
}

/// Resources for a Hamiltonian at step count `n`.
pub fn resources_for(h: &PauliSum, n_majorana: usize, steps: u64) -> Result<ResourceEstimate> {
    let mut hist = vec![0usize; h.qubit_count() + 1];
    for t in h.iter() {
        hist[t.weight()] += 1;
    }
    let (mut one, mut two) = (0u64, 0u64);
    for (k, &m) in hist.iter().enumerate() {
        let m = m as u64;
        match k {
            0 => {}
            1 => one += m,
            2 => two += m,
            _ => {
                one += m * 5 * (k as u64 - 2);
                two += m * 2 * (k as u64 - 2);
            }
        }
    }
    let per_step = one + two;
    Ok(ResourceEstimate {
        n_majorana,
        terms: h.len(),
        trotter_steps: steps,
        weight_histogram: hist,
        one_body_count: one * steps,
        two_body_count: two * steps,
        per_step_gates: per_step,
        total_gates: per_step * steps,
        mean_square_coefficient: if h.is_empty() {
            0.0
        } else {
            mean_square_coefficient(h)?
        },
    })
}

/// Cost model with `n = ceil(c |a|^2 tau^2 / epsilon)`, `|a|^2` the mean
/// square coefficient of the drawn Hamiltonian, `c = 1`.
pub fn complexity_estimate(
    params: &ModelParams,
    tau: f64,
    epsilon: f64,
) -> Result<ResourceEstimate> {
    complexity_estimate_with(params, tau, epsilon, 1.0)
}

pub fn complexity_estimate_with(
    params: &ModelParams,
    tau: f64,
    epsilon: f64,
    c: f64,
) -> Result<ResourceEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::Parameter(format!(
            "cost constant must be positive, got {c}"
        )));
    }
    let h = build_hamiltonian(&generate_couplings(params)?)?.terms;
    let a2 = if h.is_empty() {
        0.0
    } else {
        mean_square_coefficient(&h)?
    };
    let steps = ((c * a2 * tau * tau / epsilon).ceil() as u64).max(1);
    resources_for(&h, params.n_majorana, steps)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{trotter_unitary, unitary_fidelity, TrotterPlan};
    use crate::syk::table_ordering;
    use proptest::prelude::*;

    fn direct(term: &PauliString, tau: f64) -> DenseOperator {
        term.exp_term(tau).unwrap().to_dense()
    }

    #[test]
    fn literal_identity_holds() {
        let c = chain_identity_check();
        assert!(c.verbatim_ok, "{c:?}");
        assert!((c.fidelity - 1.0).abs() < 1e-12);
        // P2 is exactly P1^dagger.
        assert!(c.p2_vs_p1_dagger_phase.abs() < 1e-12);
    }

    #[test]
    fn two_body_chain_is_one_gate() {
        let s = decompose_zz_chain(2, 0.4).unwrap();
        assert_eq!(s.len(), 1);
        let target = direct(
            &PauliString::from_letters("ZZ", C64::new(std::f64::consts::FRAC_PI_2, 0.0)).unwrap(),
            0.4,
        );
        assert!(s.dense_product().unwrap().max_abs_diff(&target) < 1e-14);
        assert!(decompose_zz_chain(1, 0.4).is_err());
    }

    #[test]
    fn three_body_chain() {
        let s = decompose_zz_chain(3, 0.7).unwrap();
        assert_eq!(s.count(1, Some(GateRole::Conjugation)), 5);
        assert_eq!(s.count(2, Some(GateRole::Conjugation)), 2);
        assert_eq!(s.count(2, Some(GateRole::Core)), 1);
        let target = direct(
            &PauliString::from_letters("ZZZ", C64::new(std::f64::consts::FRAC_PI_2, 0.0)).unwrap(),
            0.7,
        );
        let f = unitary_fidelity(&target, &s.dense_product().unwrap()).unwrap();
        assert!(f > 1.0 - 1e-10);
    }

    #[test]
    fn chain_counts_follow_the_law() {
        for k in 3..=6 {
            let s = decompose_zz_chain(k, 0.3).unwrap();
            assert_eq!(s.count(1, Some(GateRole::Conjugation)), 5 * (k - 2));
            assert_eq!(s.count(2, Some(GateRole::Conjugation)), 2 * (k - 2));
            assert_eq!(gate_cost(k), 7 * (k - 2));
            let target = direct(
                &PauliString::new(
                    k,
                    0,
                    (1 << k) - 1,
                    C64::new(std::f64::consts::FRAC_PI_2, 0.0),
                )
                .unwrap(),
                0.3,
            );
            assert!((&target - &s.dense_product().unwrap()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_and_degenerate_terms() {
        let x = PauliString::from_letters("X", C64::new(0.8, 0.0)).unwrap();
        let s = decompose_general_pauli(&x, 1.3).unwrap();
        assert_eq!(s.count(1, Some(GateRole::BasisChange)), 2);
        assert!((&s.dense_product().unwrap() - &direct(&x, 1.3)).max_abs() < 1e-14);

        let zero = PauliString::from_letters("XZ", C64::new(0.0, 0.0)).unwrap();
        assert!(decompose_general_pauli(&zero, 1.0).unwrap().is_empty());

        let id = PauliString::from_letters("II", C64::new(0.5, 0.0)).unwrap();
        let s = decompose_general_pauli(&id, 2.0).unwrap();
        assert!(s.is_empty());
        assert!((&s.dense_product().unwrap() - &direct(&id, 2.0)).max_abs() < 1e-15);

        let bad = PauliString::from_letters("X", C64::new(0.0, 1.0)).unwrap();
        assert!(decompose_general_pauli(&bad, 1.0).is_err());
    }

    #[test]
    fn every_term_of_a_sample_compiles() {
        let h = build_hamiltonian(&generate_couplings(&ModelParams::new(8, 5.0, 31)).unwrap())
            .unwrap()
            .terms;
        assert_eq!(h.len(), 70);
        for t in h.iter() {
            let s = decompose_general_pauli(t, 1.7).unwrap();
            assert!(s.gates.iter().all(|g| g.body() <= 2));
            let f = unitary_fidelity(&direct(t, 1.7), &s.dense_product().unwrap()).unwrap();
            assert!(f > 1.0 - 1e-10, "{t}: {f}");
        }
    }

    #[test]
    fn compiled_steps_reproduce_the_product_formula() {
        let h = build_hamiltonian(&generate_couplings(&ModelParams::new(8, 5.0, 32)).unwrap())
            .unwrap()
            .terms;
        let order = table_ordering(&h);
        let (tau, n) = (1.3, 4);
        let step = compiled_trotter_step(&h, tau / n as f64, &order)
            .unwrap()
            .dense_product()
            .unwrap();
        let u = trotter_unitary(&h, &TrotterPlan::new(tau, n).with_ordering(order)).unwrap();
        assert!((&step.pow(n) - &u).max_abs() < 1e-9);
    }

    #[test]
    fn json_export_schema() {
        let v = decompose_zz_chain(3, 0.1).unwrap().to_json();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 8);
        assert_eq!(arr[0]["order"], 0);
        assert_eq!(arr[0]["axis"], "x");
        assert_eq!(arr[2]["axis"], "zz");
        assert_eq!(arr[4]["role"], "core");
        assert!(arr[0]["qubits"].is_array() && arr[0]["angle"].is_number());
    }

    #[test]
    fn complexity_counts() {
        let p = ModelParams::new(8, 5.0, 3);
        let r = complexity_estimate(&p, 1.0, 1e-3).unwrap();
        assert_eq!(r.terms, 70);
        assert_eq!(r.weight_histogram, vec![0, 0, 14, 32, 24]);
        assert_eq!(r.per_step_gates, 574);
        assert_eq!(r.one_body_count + r.two_body_count, r.total_gates);
        // n scales with tau^2
        let r2 = complexity_estimate(&p, 2.0, 1e-3).unwrap();
        let exact = r.mean_square_coefficient / 1e-3;
        assert_eq!(r.trotter_steps, exact.ceil() as u64);
        assert_eq!(r2.trotter_steps, (4.0 * exact).ceil() as u64);
        assert!(complexity_estimate(&p, 1.0, 0.0).is_err());
        assert!(r.csv_row().starts_with("8,70,"));
    }

    #[test]
    fn per_step_cost_grows_as_the_fifth_power() {
        let per_step = |n: usize| {
            complexity_estimate(&ModelParams::new(n, 5.0, 1), 1.0, 1.0)
                .unwrap()
                .per_step_gates as f64
        };
        let small: Vec<f64> = [8, 12, 16].iter().map(|&n| per_step(n)).collect();
        assert_eq!(small, vec![574.0, 7535.0, 39252.0]);
        // At these sizes the subleading terms still inflate the exponent.
        let s_small = log_log_slope(&[8.0, 12.0, 16.0], &small);
        assert!((s_small - 6.11).abs() < 0.01, "{s_small}");
        let large: Vec<f64> = [16, 24, 32].iter().map(|&n| per_step(n)).collect();
        let s_large = log_log_slope(&[16.0, 24.0, 32.0], &large);
        assert!((s_large - 5.0).abs() < 1.0, "{s_large}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn random_terms_compile_exactly(x in 0u64..16, z in 0u64..16, a in -2.0f64..2.0, tau in -3.0f64..3.0) {
            let t = PauliString::new(4, x, z, C64::new(a, 0.0)).unwrap();
            let s = decompose_general_pauli(&t, tau).unwrap();
            prop_assert!(s.gates.iter().all(|g| g.body() <= 2));
            prop_assert!((&s.dense_product().unwrap() - &direct(&t, tau)).max_abs() < 1e-11);
        }
    }
}
