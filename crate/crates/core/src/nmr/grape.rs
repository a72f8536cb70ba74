//! Gradient ascent on piecewise-constant controls.
//!
//! The objective is the mean over RF scale factors `s` of
//! `|Tr(V^dagger U_s)|^2 / d^2`. Slice derivatives are exact: with
//! `H = W diag(E) W^dagger`,
//!
//! ```text
//! d e^{-iH dt} = W (G o (W^dagger dH W)) W^dagger
//! G_mn = (e^{-i E_m dt} - e^{-i E_n dt}) / (E_m - E_n),  G_mm = -i dt e^{-i E_m dt}
//! ```
//!
//! Parameters are the Cartesian components `(B cos phi, B sin phi)` of each
//! slice. Steps follow L-BFGS directions under an Armijo backtracking rule,
//! so accepted objectives never decrease.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::{gate_fidelity, ControlField, ControlModel, SpinSystemParams};
use crate::dense::DenseOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeOptions {
    pub max_iter: usize,
    pub fidelity_goal: f64,
    /// RF scale factors averaged in the objective.
    pub rf_scales: Vec<f64>,
    pub lbfgs_memory: usize,
    pub armijo: f64,
    pub shrink: f64,
    /// Length (Hz) of the first trial step.
    pub initial_step_hz: f64,
}

impl Default for GrapeOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            fidelity_goal: 0.99,
            rf_scales: vec![0.95, 1.0, 1.05],
            lbfgs_memory: 8,
            armijo: 1e-4,
            shrink: 0.5,
            initial_step_hz: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
    pub step_size: f64,
}

impl TracePoint {
    pub const CSV_HEADER: &'static str = "iter,objective,step_size";
}

#[derive(Debug, Clone)]
pub struct GrapeResult {
    pub field: ControlField,
    pub objective: f64,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
}

impl GrapeResult {
    pub fn trace_csv(&self) -> String {
        let mut s = format!("{}\n", TracePoint::CSV_HEADER);
        for t in &self.trace {
            s.push_str(&format!("{},{},{}\n", t.iter, t.objective, t.step_size));
        }
        s
    }
}

/// Objective and gradient evaluator for a fixed target and slice layout.
pub struct GrapeProblem {
    model: ControlModel,
    target_dagger: DenseOperator,
    dt: f64,
    slices: usize,
    scales: Vec<f64>,
    cap: f64,
}

struct Slice {
    u: DenseOperator,
    values: Vec<f64>,
    vectors: DenseOperator,
}

impl GrapeProblem {
    pub fn new(
        target: &DenseOperator,
        params: &SpinSystemParams,
        slices: usize,
        dt: f64,
        scales: &[f64],
    ) -> Result<Self> {
        let defect = target.unitarity_defect();
        if defect > 1e-8 {
            return Err(Error::NotUnitary(format!(
                "target deviates from unitarity by {defect:.3e}"
            )));
        }
        let model = ControlModel::new(params)?;
        if target.dim() != model.dim() {
            return Err(Error::Dimension(format!(
                "target {} vs register {}",
                target.dim(),
                model.dim()
            )));
        }
        if scales.is_empty() || slices == 0 || !(dt > 0.0) {
            return Err(Error::Parameter(
                "need at least one RF scale, one slice and dt > 0".into(),
            ));
        }
        Ok(Self {
            model,
            target_dagger: target.dagger(),
            dt,
            slices,
            scales: scales.to_vec(),
            cap: params.amplitude_cap_hz,
        })
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    fn slice(&self, ux: f64, uy: f64, s: f64) -> Slice {
        let eig = self.model.slice_hamiltonian(ux, uy, s).eigh();
        let u = eig.exp_i(self.dt);
        Slice {
            u,
            values: eig.values,
            vectors: eig.vectors,
        }
    }

    fn within_cap(&self, x: &[f64]) -> bool {
        x.chunks(2).all(|c| c[0].hypot(c[1]) <= self.cap)
    }

    /// Objective at one scale and its gradient with respect to `x`
    /// (interleaved `ux_0, uy_0, ux_1, ...`).
    fn single_scale(&self, x: &[f64], s: f64, with_grad: bool) -> (f64, Vec<f64>) {
        let d = self.dim() as f64;
        let slices: Vec<Slice> = (0..self.slices)
            .map(|j| self.slice(x[2 * j], x[2 * j + 1], s))
            .collect();
        let mut fwd = Vec::with_capacity(self.slices + 1);
        fwd.push(DenseOperator::identity(self.dim()));
        for sl in &slices {
            let next = &sl.u * fwd.last().unwrap();
            fwd.push(next);
        }
        let ov = crate::observables::trace_product(&self.target_dagger, fwd.last().unwrap());
        let phi = ov.norm_sqr() / (d * d);
        if !with_grad {
            return (phi, Vec::new());
        }
        let mut grad = vec![0.0; 2 * self.slices];
        let gen = [
            self.model.sx.scale_real(std::f64::consts::PI * s),
            self.model.sy.scale_real(std::f64::consts::PI * s),
        ];
        let mut back = self.target_dagger.clone();
        for j in (0..self.slices).rev() {
            let sl = &slices[j];
            let g = frechet_kernel(&sl.values, self.dt);
            let vd = sl.vectors.dagger();
            // Tr(back dU fwd_j) = Tr((fwd_j back) dU)
            let env = &fwd[j] * &back;
            for (c, dh) in gen.iter().enumerate() {
                let inner = &(&vd * dh) * &sl.vectors;
                let n = inner.dim();
                let hadamard = DenseOperator::from_fn(n, |a, b| inner.get(a, b) * g[a * n + b]);
                let du = &(&sl.vectors * &hadamard) * &vd;
                let dov = crate::observables::trace_product(&env, &du);
                grad[2 * j + c] = 2.0 * (ov.conj() * dov).re / (d * d);
            }
            back = &back * &sl.u;
        }
        (phi, grad)
    }

    /// Mean objective over the RF scales and its gradient.
    pub fn evaluate(&self, x: &[f64], with_grad: bool) -> (f64, Vec<f64>) {
        let parts: Vec<(f64, Vec<f64>)> = self
            .scales
            .par_iter()
            .map(|&s| self.single_scale(x, s, with_grad))
            .collect();
        let k = self.scales.len() as f64;
        let f = parts.iter().map(|p| p.0).sum::<f64>() / k;
        if !with_grad {
            return (f, Vec::new());
        }
        let mut g = vec![0.0; x.len()];
        for (_, pg) in &parts {
            for (a, b) in g.iter_mut().zip(pg) {
                *a += b / k;
            }
        }
        (f, g)
    }

    /// Gradient with respect to `(B_j, phi_j)` instead of Cartesian parts.
    pub fn polar_gradient(&self, field: &ControlField) -> (f64, Vec<f64>) {
        let x = to_vector(field);
        let (f, g) = self.evaluate(&x, true);
        let mut out = vec![0.0; g.len()];
        for j in 0..self.slices {
            let (b, p) = (field.amplitudes_hz[j], field.phases_rad[j]);
            let (gx, gy) = (g[2 * j], g[2 * j + 1]);
            out[2 * j] = p.cos() * gx + p.sin() * gy;
            out[2 * j + 1] = -b * p.sin() * gx + b * p.cos() * gy;
        }
        (f, out)
    }
}

fn frechet_kernel(e: &[f64], dt: f64) -> Vec<C64> {
    let n = e.len();
    let ex: Vec<C64> = e.iter().map(|&v| C64::from_polar(1.0, -v * dt)).collect();
    let mut g = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let de = e[a] - e[b];
            g[a * n + b] = if (de * dt).abs() < 1e-10 {
                C64::new(0.0, -dt) * ex[a]
            } else {
                (ex[a] - ex[b]) / de
            };
        }
    }
    g
}

pub fn to_vector(field: &ControlField) -> Vec<f64> {
    let (ux, uy) = field.cartesian();
    ux.iter().zip(&uy).flat_map(|(a, b)| [*a, *b]).collect()
}

fn from_vector(dt: f64, x: &[f64]) -> ControlField {
    let ux: Vec<f64> = x.iter().step_by(2).copied().collect();
    let uy: Vec<f64> = x.iter().skip(1).step_by(2).copied().collect();
    ControlField::from_cartesian(dt, &ux, &uy)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion for the ascent direction `H g`.
fn lbfgs_direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alpha = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alpha.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alpha.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

/// Maximise the RF-averaged gate fidelity to `target` starting from `init`.
pub fn grape_optimize(
    target: &DenseOperator,
    init: &ControlField,
    params: &SpinSystemParams,
    opts: &GrapeOptions,
) -> Result<GrapeResult> {
    init.validate(params.amplitude_cap_hz)?;
    if !(opts.fidelity_goal > 0.0 && opts.fidelity_goal < 1.0) {
        return Err(Error::Parameter(format!(
            "fidelity goal must lie in (0, 1), got {}",
            opts.fidelity_goal
        )));
    }
    if !(opts.shrink > 0.0 && opts.shrink < 1.0) {
        return Err(Error::Parameter("shrink factor must lie in (0, 1)".into()));
    }
    let problem = GrapeProblem::new(
        target,
        params,
        init.slices(),
        init.slice_duration_s,
        &opts.rf_scales,
    )?;
    let mut x = to_vector(init);
    let (mut f, mut g) = problem.evaluate(&x, true);
    let mut trace = vec![TracePoint {
        iter: 0,
        objective: f,
        step_size: 0.0,
    }];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iter = 0;
    while f < opts.fidelity_goal && iter < opts.max_iter {
        iter += 1;
        let mut dir = lbfgs_direction(&g, &memory);
        let mut slope = dot(&g, &dir);
        if !(slope > 0.0) {
            memory.clear();
            dir = g.clone();
            slope = dot(&g, &g);
        }
        if slope == 0.0 {
            break;
        }
        // First step (and restarts) are scaled to a fixed length.
        let mut alpha = if memory.is_empty() {
            opts.initial_step_hz / dot(&dir, &dir).sqrt()
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect();
            if problem.within_cap(&cand) {
                let (fc, _) = problem.evaluate(&cand, false);
                if fc >= f + opts.armijo * alpha * slope && fc > f {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            alpha *= opts.shrink;
        }
        let Some((xn, _)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };
        let (fnew, gnew) = problem.evaluate(&xn, true);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&gnew).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            memory.push_back((s, y, 1.0 / sy));
            if memory.len() > opts.lbfgs_memory {
                memory.pop_front();
            }
        }
        let step_size = alpha * dot(&dir, &dir).sqrt();
        x = xn;
        f = fnew;
        g = gnew;
        trace.push(TracePoint {
            iter,
            objective: f,
            step_size,
        });
    }
    let improved = trace.len() > 1;
    if !improved && f < opts.fidelity_goal {
        return Err(Error::Convergence {
            iterations: iter,
            best: f,
        });
    }
    Ok(GrapeResult {
        field: from_vector(init.slice_duration_s, &x),
        objective: f,
        converged: f >= opts.fidelity_goal,
        trace,
    })
}

/// Default spread (Hz) of the random initial field.
pub const DEFAULT_INIT_SIGMA_HZ: f64 = 1000.0;

/// Field whose Cartesian components are independent `N(0, sigma^2)` draws.
pub fn random_initial_field(
    slices: usize,
    duration_s: f64,
    sigma_hz: f64,
    seed: u64,
) -> ControlField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let ux: Vec<f64> = (0..slices)
        .map(|_| sigma_hz * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect();
    let uy: Vec<f64> = (0..slices)
        .map(|_| sigma_hz * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect();
    ControlField::from_cartesian(duration_s / slices as f64, &ux, &uy)
}

/// Gate fidelity of `field` at each RF scale factor.
pub fn robustness_profile(
    field: &ControlField,
    target: &DenseOperator,
    params: &SpinSystemParams,
    scales: &[f64],
) -> Result<Vec<(f64, f64)>> {
    scales
        .iter()
        .map(|&s| {
            Ok((
                s,
                gate_fidelity(target, &super::control_propagator(field, params, s)?)?,
            ))
        })
        .collect()
}
