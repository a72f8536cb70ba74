//! Hard-pulse recipes: instantaneous rotations `[theta]_axis^spin`, free
//! evolution `{t}` and isolated coupling blocks `[t_jk]`.
//!
//! A hard pulse is `e^{-i theta sigma / 2}`, so `[pi]` is a spin flip and
//! `[pi/2]` a quarter turn.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{diagonal_evolution, internal_hamiltonian, SpinSystemParams};
use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseAxis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseElement {
    /// `[theta]_axis^spin`, spin 0-based.
    Hard {
        theta: f64,
        axis: PulseAxis,
        spin: usize,
    },
    /// `{t}`: evolution under the (possibly reduced) internal Hamiltonian.
    Free { duration: f64 },
    /// `[t_jk]`: evolution under `pi J_jk Z_j Z_k / 2` alone.
    Coupling { j: usize, k: usize, duration: f64 },
}

impl fmt::Display for PulseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseElement::Hard { theta, axis, spin } => {
                let a = if *axis == PulseAxis::X { 'x' } else { 'y' };
                write!(f, "[{:.4}pi]_{a}^{}", theta / PI, spin + 1)
            }
            PulseElement::Free { duration } => write!(f, "{{{duration:.6e}}}"),
            PulseElement::Coupling { j, k, duration } => {
                write!(f, "[{duration:.6e}]_{}{}", j + 1, k + 1)
            }
        }
    }
}

/// Elements in time order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseRecipe {
    pub name: String,
    pub elements: Vec<PulseElement>,
}

impl PulseRecipe {
    pub fn new(name: &str, elements: Vec<PulseElement>) -> Self {
        Self {
            name: name.into(),
            elements,
        }
    }

    pub fn notation(&self) -> String {
        self.elements
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

/// Which internal terms act during `{t}` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Idealization {
    /// Every shift and coupling.
    Full,
    /// Only the listed couplings (0-based pairs); shifts are dropped.
    Reduced { couplings: Vec<(usize, usize)> },
}

fn hard(theta: f64, axis: PulseAxis, spin: usize) -> PulseElement {
    PulseElement::Hard { theta, axis, spin }
}

fn free(duration: f64) -> PulseElement {
    PulseElement::Free { duration }
}

fn coupling(j: usize, k: usize, duration: f64) -> PulseElement {
    PulseElement::Coupling { j, k, duration }
}

fn zz_rotation(n: usize, spins: &[usize], angle: f64) -> Result<DenseOperator> {
    let z = spins.iter().fold(0u64, |m, &s| m | (1 << s));
    Ok(PauliString::new(n, 0, z, C64::new(1.0, 0.0))?
        .exp_term(angle)?
        .to_dense())
}

fn free_diagonal(params: &SpinSystemParams, mode: &Idealization) -> Result<Vec<f64>> {
    let n = params.spins();
    let h = match mode {
        Idealization::Full => internal_hamiltonian(params)?,
        Idealization::Reduced { couplings } => {
            let mut terms = Vec::new();
            for &(j, k) in couplings {
                if j >= n || k >= n || j == k {
                    return Err(Error::Parameter(format!(
                        "coupling ({j}, {k}) is not a spin pair"
                    )));
                }
                let z = (1u64 << j) | (1u64 << k);
                terms.push(PauliString::new(
                    n,
                    0,
                    z,
                    C64::new(PI * params.j(j, k) / 2.0, 0.0),
                )?);
            }
            PauliSum::from_terms(n, terms)?
        }
    };
    if h.is_empty() {
        return Ok(vec![0.0; 1 << n]);
    }
    let d = h.to_dense()?;
    Ok((0..d.dim()).map(|i| d.get(i, i).re).collect())
}

/// Compose the recipe into a single unitary.
pub fn simulate_recipe(
    recipe: &PulseRecipe,
    params: &SpinSystemParams,
    mode: &Idealization,
) -> Result<DenseOperator> {
    params.validate()?;
    let n = params.spins();
    let diag = free_diagonal(params, mode)?;
    let mut u = DenseOperator::identity(1 << n);
    for el in &recipe.elements {
        let step = match *el {
            PulseElement::Hard { theta, axis, spin } => {
                if spin >= n {
                    return Err(Error::Parameter(format!(
                        "pulse on spin {} of {n}",
                        spin + 1
                    )));
                }
                let p = if axis == PulseAxis::X {
                    Pauli::X
                } else {
                    Pauli::Y
                };
                PauliString::single(n, spin, p, C64::new(1.0, 0.0))?
                    .exp_term(theta / 2.0)?
                    .to_dense()
            }
            PulseElement::Free { duration } => diagonal_evolution(&diag, duration),
            PulseElement::Coupling { j, k, duration } => {
                if j >= n || k >= n || j == k {
                    return Err(Error::Parameter(format!(
                        "coupling block ({}, {}) is not a spin pair",
                        j + 1,
                        k + 1
                    )));
                }
                zz_rotation(n, &[j, k], PI * params.j(j, k) * duration / 2.0)?
            }
        };
        u = &step * &u;
    }
    Ok(u)
}

/// A recipe with the unitary it is meant to realise.
#[derive(Debug, Clone)]
pub struct StandardRecipe {
    pub recipe: PulseRecipe,
    pub target: DenseOperator,
    /// Couplings kept in reduced mode.
    pub targeted_couplings: Vec<(usize, usize)>,
}

impl StandardRecipe {
    pub fn reduced(&self) -> Idealization {
        Idealization::Reduced {
            couplings: self.targeted_couplings.clone(),
        }
    }
}

/// `[pi J_1 tau]_x^1` realising `e^{-i pi J_1 tau X_1 / 2}`.
pub fn single_spin_rotation(
    params: &SpinSystemParams,
    j1_hz: f64,
    tau: f64,
) -> Result<StandardRecipe> {
    let n = params.spins();
    let theta = PI * j1_hz * tau;
    let target = PauliString::single(n, 0, Pauli::X, C64::new(1.0, 0.0))?
        .exp_term(theta / 2.0)?
        .to_dense();
    Ok(StandardRecipe {
        recipe: PulseRecipe::new("one-body", vec![hard(theta, PulseAxis::X, 0)]),
        target,
        targeted_couplings: vec![],
    })
}

/// Four quarter-period blocks interleaved with pi pulses on spins 4 and 3,
/// realising `e^{-i pi J_12 tau Z_1 Z_2 / 2}`.
///
/// Taken literally the sequence has three pi pulses and leaves a net flip of
/// spin 3; `completed` appends the closing `[pi]_y^3`.
pub fn two_body_refocusing(
    params: &SpinSystemParams,
    tau: f64,
    completed: bool,
) -> Result<StandardRecipe> {
    if params.spins() < 4 {
        return Err(Error::Parameter(
            "refocusing recipe needs four spins".into(),
        ));
    }
    let q = tau / 4.0;
    let mut el = vec![
        free(q),
        hard(PI, PulseAxis::Y, 3),
        free(q),
        hard(PI, PulseAxis::Y, 2),
        free(q),
        hard(PI, PulseAxis::Y, 3),
        free(q),
    ];
    if completed {
        el.push(hard(PI, PulseAxis::Y, 2));
    }
    let name = if completed {
        "two-body"
    } else {
        "two-body (literal)"
    };
    Ok(StandardRecipe {
        recipe: PulseRecipe::new(name, el),
        target: zz_rotation(params.spins(), &[0, 1], PI * params.j(0, 1) * tau / 2.0)?,
        targeted_couplings: vec![(0, 1)],
    })
}

/// Conjugate spin `s` into and out of the coupling frame around `inner`.
fn bracket(params: &SpinSystemParams, s: usize, inner: Vec<PulseElement>) -> Vec<PulseElement> {
    let half = 1.0 / (2.0 * params.j(s - 1, s));
    let mut el = vec![
        hard(PI / 2.0, PulseAxis::X, s),
        hard(PI, PulseAxis::Y, s),
        coupling(s - 1, s, half),
        hard(-PI / 2.0, PulseAxis::Y, s),
    ];
    el.extend(inner);
    el.extend([
        hard(-PI / 2.0, PulseAxis::Y, s),
        coupling(s - 1, s, half),
        hard(-PI / 2.0, PulseAxis::X, s),
    ]);
    el
}

/// `e^{-i pi J_123 tau Z_1 Z_2 Z_3 / 2}` from the 1-2 and 2-3 couplings.
pub fn three_body(params: &SpinSystemParams, j123_hz: f64, tau: f64) -> Result<StandardRecipe> {
    if params.spins() < 3 {
        return Err(Error::Parameter(
            "three-body recipe needs three spins".into(),
        ));
    }
    let el = bracket(
        params,
        1,
        vec![coupling(1, 2, j123_hz * tau / params.j(1, 2))],
    );
    Ok(StandardRecipe {
        recipe: PulseRecipe::new("three-body", el),
        target: zz_rotation(params.spins(), &[0, 1, 2], PI * j123_hz * tau / 2.0)?,
        targeted_couplings: vec![(0, 1), (1, 2)],
    })
}

/// `e^{-i pi J_123 tau Z_1 Z_2 Z_3 Z_4 / 2}` by nesting one more bracket.
pub fn four_body(params: &SpinSystemParams, j123_hz: f64, tau: f64) -> Result<StandardRecipe> {
    if params.spins() < 4 {
        return Err(Error::Parameter("four-body recipe needs four spins".into()));
    }
    let core = vec![coupling(2, 3, j123_hz * tau / params.j(2, 3))];
    let el = bracket(params, 1, bracket(params, 2, core));
    Ok(StandardRecipe {
        recipe: PulseRecipe::new("four-body", el),
        target: zz_rotation(params.spins(), &[0, 1, 2, 3], PI * j123_hz * tau / 2.0)?,
        targeted_couplings: vec![(0, 1), (1, 2), (2, 3)],
    })
}
