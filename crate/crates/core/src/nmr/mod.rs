//! Four-spin liquid-state NMR register in the rotating frame.
//!
//! ```text
//! H_int = sum_i (omega_i / 2) Z_i + sum_{i<j} (pi J_ij / 2) Z_i Z_j,  omega_i = 2 pi nu_i
//! H_C   = pi B sum_i (cos phi X_i + sin phi Y_i)
//! ```
//!
//! Frequencies are in Hz, times in seconds, Hamiltonians in rad/s. With this
//! scaling a field held for a quarter cycle (`B t = 1/4`) turns each spin by
//! `pi/2`. Spin `i` (1-based, as in the usual tables) is qubit `i - 1`.

pub mod grape;
pub mod recipe;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub use grape::{
    grape_optimize, random_initial_field, robustness_profile, GrapeOptions, GrapeResult,
    TracePoint, DEFAULT_INIT_SIGMA_HZ,
};
pub use recipe::{simulate_recipe, Idealization, PulseElement, PulseRecipe, StandardRecipe};

/// Default amplitude bound (Hz).
pub const DEFAULT_AMPLITUDE_CAP_HZ: f64 = 1.0e5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSystemParams {
    /// `nu_i = omega_i / 2 pi` in Hz.
    pub chemical_shifts_hz: Vec<f64>,
    /// Symmetric, zero diagonal, Hz.
    pub j_couplings_hz: Vec<Vec<f64>>,
    /// Stored only; dynamics are closed.
    pub t1_s: Option<Vec<f64>>,
    pub t2_s: Option<Vec<f64>>,
    pub amplitude_cap_hz: f64,
}

impl Default for SpinSystemParams {
    /// Crotonic-acid-like four-spin defaults.
    fn default() -> Self {
        let mut j = vec![vec![0.0; 4]; 4];
        for &(a, b, v) in &[
            (0, 1, 41.6),
            (0, 2, 1.4),
            (1, 2, 69.7),
            (0, 3, 7.0),
            (1, 3, 1.2),
            (2, 3, 72.2),
        ] {
            j[a][b] = v;
            j[b][a] = v;
        }
        Self {
            chemical_shifts_hz: vec![2989.0, 25459.0, 21592.0, 29341.0],
            j_couplings_hz: j,
            t1_s: Some(vec![5.7, 5.3, 5.6, 10.2]),
            t2_s: Some(vec![1.02, 0.92, 0.89, 0.94]),
            amplitude_cap_hz: DEFAULT_AMPLITUDE_CAP_HZ,
        }
    }
}

impl SpinSystemParams {
    pub fn spins(&self) -> usize {
        self.chemical_shifts_hz.len()
    }

    pub fn j(&self, a: usize, b: usize) -> f64 {
        self.j_couplings_hz[a][b]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.spins();
        if n == 0 || n > 8 {
            return Err(Error::Parameter(format!("spin count {n} outside 1..=8")));
        }
        if self.j_couplings_hz.len() != n || self.j_couplings_hz.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter(
                "coupling matrix shape does not match spin count".into(),
            ));
        }
        for a in 0..n {
            if self.j(a, a) != 0.0 {
                return Err(Error::Parameter(format!(
                    "nonzero self-coupling on spin {}",
                    a + 1
                )));
            }
            for b in 0..n {
                if self.j(a, b) != self.j(b, a) {
                    return Err(Error::Parameter("coupling matrix is not symmetric".into()));
                }
            }
        }
        let finite = self
            .chemical_shifts_hz
            .iter()
            .chain(self.j_couplings_hz.iter().flatten())
            .all(|v| v.is_finite());
        if !finite || !(self.amplitude_cap_hz > 0.0) {
            return Err(Error::Parameter(
                "non-finite frequency or amplitude cap".into(),
            ));
        }
        Ok(())
    }

    /// Restriction to `spins` (0-based), in that order.
    pub fn subsystem(&self, spins: &[usize]) -> Result<Self> {
        if spins.iter().any(|&s| s >= self.spins()) {
            return Err(Error::Parameter("subsystem spin out of range".into()));
        }
        let pick = |v: &Option<Vec<f64>>| v.as_ref().map(|v| spins.iter().map(|&s| v[s]).collect());
        Ok(Self {
            chemical_shifts_hz: spins.iter().map(|&s| self.chemical_shifts_hz[s]).collect(),
            j_couplings_hz: spins
                .iter()
                .map(|&a| spins.iter().map(|&b| self.j(a, b)).collect())
                .collect(),
            t1_s: pick(&self.t1_s),
            t2_s: pick(&self.t2_s),
            amplitude_cap_hz: self.amplitude_cap_hz,
        })
    }

    /// All frequencies zero.
    pub fn silent(spins: usize) -> Self {
        Self {
            chemical_shifts_hz: vec![0.0; spins],
            j_couplings_hz: vec![vec![0.0; spins]; spins],
            t1_s: None,
            t2_s: None,
            amplitude_cap_hz: DEFAULT_AMPLITUDE_CAP_HZ,
        }
    }
}

fn z_string(n: usize, spins: &[usize], coefficient: f64) -> Result<PauliString> {
    let z = spins.iter().fold(0u64, |m, &s| m | (1 << s));
    PauliString::new(n, 0, z, C64::new(coefficient, 0.0))
}

/// Internal Hamiltonian in rad/s; all terms diagonal.
pub fn internal_hamiltonian(params: &SpinSystemParams) -> Result<PauliSum> {
    params.validate()?;
    let n = params.spins();
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(z_string(n, &[i], PI * params.chemical_shifts_hz[i])?);
    }
    for i in 0..n {
        for j in i + 1..n {
            terms.push(z_string(n, &[i, j], PI * params.j(i, j) / 2.0)?);
        }
    }
    PauliSum::from_terms(n, terms)
}

/// Diagonal of a Z-only Hamiltonian.
#[cfg(test)]
fn diagonal_of(h: &PauliSum) -> Result<Vec<f64>> {
    let d = h.to_dense()?;
    Ok((0..d.dim()).map(|i| d.get(i, i).re).collect())
}

/// `e^{-i H t}` for diagonal `H`.
pub(crate) fn diagonal_evolution(diag: &[f64], t: f64) -> DenseOperator {
    DenseOperator::from_diagonal(
        &diag
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect::<Vec<_>>(),
    )
}

/// Collective `sum_i X_i` and `sum_i Y_i`.
pub(crate) fn collective(n: usize) -> Result<(DenseOperator, DenseOperator)> {
    let one = C64::new(1.0, 0.0);
    let sum = |p: Pauli| -> Result<DenseOperator> {
        PauliSum::from_terms(
            n,
            (0..n)
                .map(|i| PauliString::single(n, i, p, one))
                .collect::<Result<Vec<_>>>()?,
        )?
        .to_dense()
    };
    Ok((sum(Pauli::X)?, sum(Pauli::Y)?))
}

/// Piecewise-constant transmitter field, one shared channel for all spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlField {
    pub slice_duration_s: f64,
    pub amplitudes_hz: Vec<f64>,
    pub phases_rad: Vec<f64>,
}

impl ControlField {
    pub fn zeros(slices: usize, total_duration_s: f64) -> Self {
        Self {
            slice_duration_s: total_duration_s / slices as f64,
            amplitudes_hz: vec![0.0; slices],
            phases_rad: vec![0.0; slices],
        }
    }

    pub fn constant(
        slices: usize,
        total_duration_s: f64,
        amplitude_hz: f64,
        phase_rad: f64,
    ) -> Self {
        Self {
            slice_duration_s: total_duration_s / slices as f64,
            amplitudes_hz: vec![amplitude_hz; slices],
            phases_rad: vec![phase_rad; slices],
        }
    }

    /// From Cartesian components `(B cos phi, B sin phi)` per slice.
    pub fn from_cartesian(slice_duration_s: f64, ux: &[f64], uy: &[f64]) -> Self {
        Self {
            slice_duration_s,
            amplitudes_hz: ux.iter().zip(uy).map(|(x, y)| x.hypot(*y)).collect(),
            phases_rad: ux.iter().zip(uy).map(|(x, y)| y.atan2(*x)).collect(),
        }
    }

    pub fn cartesian(&self) -> (Vec<f64>, Vec<f64>) {
        let ux = self
            .amplitudes_hz
            .iter()
            .zip(&self.phases_rad)
            .map(|(b, p)| b * p.cos())
            .collect();
        let uy = self
            .amplitudes_hz
            .iter()
            .zip(&self.phases_rad)
            .map(|(b, p)| b * p.sin())
            .collect();
        (ux, uy)
    }

    pub fn slices(&self) -> usize {
        self.amplitudes_hz.len()
    }

    pub fn total_duration_s(&self) -> f64 {
        self.slice_duration_s * self.slices() as f64
    }

    pub fn validate(&self, cap_hz: f64) -> Result<()> {
        if self.amplitudes_hz.len() != self.phases_rad.len() || self.slices() == 0 {
            return Err(Error::Parameter(
                "field needs matching, nonempty amplitude and phase lists".into(),
            ));
        }
        if !(self.slice_duration_s > 0.0 && self.slice_duration_s.is_finite()) {
            return Err(Error::Parameter("slice duration must be positive".into()));
        }
        if let Some((j, b)) = self
            .amplitudes_hz
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.abs() <= cap_hz))
        {
            return Err(Error::Parameter(format!(
                "slice {j}: amplitude {b} Hz exceeds the {cap_hz} Hz bound"
            )));
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "slice,amplitude_hz,phase_rad";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for (j, (b, p)) in self.amplitudes_hz.iter().zip(&self.phases_rad).enumerate() {
            s.push_str(&format!("{j},{b},{p}\n"));
        }
        s
    }

    pub fn header_json(&self, reference_note: &str) -> serde_json::Value {
        serde_json::json!({
            "M": self.slices(),
            "slice_duration_s": self.slice_duration_s,
            "reference_note": reference_note,
        })
    }
}

/// Slice Hamiltonians `H_int + s H_C(B_j, phi_j)` share these pieces.
#[derive(Debug, Clone)]
pub(crate) struct ControlModel {
    pub h0: DenseOperator,
    pub sx: DenseOperator,
    pub sy: DenseOperator,
}

impl ControlModel {
    pub fn new(params: &SpinSystemParams) -> Result<Self> {
        let h0 = internal_hamiltonian(params)?;
        let n = params.spins();
        let h0 = if h0.is_empty() {
            DenseOperator::zeros(1 << n)
        } else {
            h0.to_dense()?
        };
        let (sx, sy) = collective(n)?;
        Ok(Self { h0, sx, sy })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// `H_int + pi s (ux S_x + uy S_y)`.
    pub fn slice_hamiltonian(&self, ux: f64, uy: f64, scale: f64) -> DenseOperator {
        let gx = C64::new(PI * scale * ux, 0.0);
        let gy = C64::new(PI * scale * uy, 0.0);
        DenseOperator::from_matrix(
            self.h0.as_matrix() + self.sx.as_matrix() * gx + self.sy.as_matrix() * gy,
        )
    }
}

/// Propagator of `field` with its amplitude multiplied by `rf_scale`.
pub fn control_propagator(
    field: &ControlField,
    params: &SpinSystemParams,
    rf_scale: f64,
) -> Result<DenseOperator> {
    field.validate(params.amplitude_cap_hz)?;
    let model = ControlModel::new(params)?;
    let (ux, uy) = field.cartesian();
    let mut u = DenseOperator::identity(model.dim());
    for j in 0..field.slices() {
        let step = model
            .slice_hamiltonian(ux[j], uy[j], rf_scale)
            .exp_hermitian(field.slice_duration_s);
        u = &step * &u;
    }
    Ok(u)
}

/// `|Tr(V^dagger U)|^2 / d^2`.
pub fn gate_fidelity(target: &DenseOperator, u: &DenseOperator) -> Result<f64> {
    Ok(crate::evolution::unitary_fidelity(target, u)?.powi(2))
}
