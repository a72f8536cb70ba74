//! Thermal states and the boson pair correlator
//!
//! ```text
//! D(tau) = Tr(e^{-beta H} e^{-iH tau} b e^{iH tau} b) / Tr(e^{-beta H})
//!        = sum_mn p_m |b_mn|^2 e^{-i (E_m - E_n) tau}
//! ```
//!
//! Disorder averages take `|D(tau) / D(0)|` per sample before averaging.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dense::{DenseOperator, HermitianEigen};
use crate::error::{Error, Result};
use crate::evolution::{trotter_unitary, TrotterPlan};
use crate::pauli::PauliSum;
use crate::syk::{build_boson_operator, build_hamiltonian, table_ordering, CouplingSet};

/// Below this `|D(0)|` a sample cannot be normalised.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Gibbs state `e^{-beta H} / Z`.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub beta: f64,
    pub rho: DenseOperator,
    /// Boltzmann weights in the eigenbasis of `H`, ascending energy.
    pub populations: Vec<f64>,
    pub eigen: HermitianEigen,
}

fn check_hermitian(h: &PauliSum) -> Result<()> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(
            "Hamiltonian has imaginary coefficients".into(),
        ));
    }
    Ok(())
}

fn boltzmann(values: &[f64], beta: f64) -> Vec<f64> {
    let d = values.len();
    if beta == 0.0 {
        return vec![1.0 / d as f64; d];
    }
    let e0 = values.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

impl ThermalState {
    pub fn from_eigen(eigen: HermitianEigen, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let populations = boltzmann(&eigen.values, beta);
        let rho = if beta == 0.0 {
            let d = eigen.dim();
            DenseOperator::identity(d).scale_real(1.0 / d as f64)
        } else {
            let v = eigen.vectors.as_matrix();
            let mut scaled = v.clone();
            for (c, &p) in populations.iter().enumerate() {
                let mut col = scaled.column_mut(c);
                col *= C64::new(p, 0.0);
            }
            DenseOperator::from_matrix(scaled * v.adjoint())
        };
        Ok(Self {
            beta,
            rho,
            populations,
            eigen,
        })
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, a: &DenseOperator) -> C64 {
        trace_product(&self.rho, a)
    }
}

/// Gibbs state of `h` at inverse temperature `beta >= 0`.
pub fn thermal_state(h: &PauliSum, beta: f64) -> Result<ThermalState> {
    check_beta(beta)?;
    check_hermitian(h)?;
    ThermalState::from_eigen(h.to_dense()?.eigh(), beta)
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &DenseOperator, b: &DenseOperator) -> C64 {
    let (ma, mb) = (a.as_matrix(), b.as_matrix());
    let d = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += ma[(i, k)] * mb[(k, i)];
        }
    }
    acc
}

/// Spectral form of `D(tau)` for one `(H, b, beta)`; each evaluation is
/// `O(d^2)` after a single diagonalisation.
#[derive(Debug, Clone)]
pub struct SpectralCorrelator {
    energies: Vec<f64>,
    populations: Vec<f64>,
    /// `|b_mn|^2` row-major in the eigenbasis.
    weights: Vec<f64>,
}

impl SpectralCorrelator {
    pub fn new(h: &PauliSum, b: &PauliSum, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        check_hermitian(h)?;
        if b.is_empty() {
            return Err(Error::Domain("boson operator vanishes; D(0) = 0".into()));
        }
        if b.qubit_count() != h.qubit_count() {
            return Err(Error::Dimension(format!(
                "{} vs {} qubits",
                b.qubit_count(),
                h.qubit_count()
            )));
        }
        let eigen = h.to_dense()?.eigh();
        let state = ThermalState::from_eigen(eigen, beta)?;
        Self::from_state(&state, &b.to_dense()?)
    }

    pub fn from_state(state: &ThermalState, b: &DenseOperator) -> Result<Self> {
        let be = state.eigen.to_eigenbasis(b);
        let weights = be.to_row_major().iter().map(|z| z.norm_sqr()).collect();
        Ok(Self {
            energies: state.eigen.values.clone(),
            populations: state.populations.clone(),
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn evaluate(&self, tau: f64) -> C64 {
        let d = self.dim();
        let phases: Vec<C64> = self
            .energies
            .iter()
            .map(|&e| C64::from_polar(1.0, e * tau))
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        for m in 0..d {
            if self.populations[m] == 0.0 {
                continue;
            }
            let row = &self.weights[m * d..(m + 1) * d];
            let inner: C64 = row.iter().zip(&phases).map(|(w, ph)| ph * *w).sum();
            acc += inner * phases[m].conj() * self.populations[m];
        }
        acc
    }

    /// `D(0) = <b^2>`, evaluated through the same sum as [`Self::evaluate`].
    pub fn norm(&self) -> f64 {
        self.evaluate(0.0).re
    }
}

/// `D(tau)` at a single time.
pub fn boson_correlation(h: &PauliSum, b: &PauliSum, beta: f64, tau: f64) -> Result<C64> {
    Ok(SpectralCorrelator::new(h, b, beta)?.evaluate(tau))
}

/// `rho_real = (rho b + b rho)/2`, `rho_imag = -i(rho b - b rho)/2`.
#[derive(Debug, Clone)]
pub struct InitialStatePair {
    pub rho_real: DenseOperator,
    pub rho_imag: DenseOperator,
}

impl InitialStatePair {
    /// `Tr(U rho_real U^dagger b) + i Tr(U rho_imag U^dagger b)` for a
    /// propagator `U = e^{-iH tau}` or an approximation of it.
    pub fn correlation(&self, u: &DenseOperator, b: &DenseOperator) -> C64 {
        let ud = u.dagger();
        let re = trace_product(&(&(u * &self.rho_real) * &ud), b);
        let im = trace_product(&(&(u * &self.rho_imag) * &ud), b);
        C64::new(re.re, 0.0) + C64::new(0.0, im.re)
    }
}

pub fn initial_state_pair(h: &PauliSum, b: &PauliSum, beta: f64) -> Result<InitialStatePair> {
    let state = thermal_state(h, beta)?;
    let bd = b.to_dense()?;
    Ok(initial_state_pair_from(&state.rho, &bd))
}

pub fn initial_state_pair_from(rho: &DenseOperator, b: &DenseOperator) -> InitialStatePair {
    let rb = rho * b;
    let br = b * rho;
    InitialStatePair {
        rho_real: (&rb + &br).scale_real(0.5),
        rho_imag: (&rb - &br).scale(C64::new(0.0, -0.5)),
    }
}

/// How `e^{-iH tau}` is realised inside the correlator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    Exact,
    /// First-order product formula with a fixed step count per time point,
    /// terms in table order.
    Trotter {
        steps: u64,
    },
}

/// `ln tau` on `[-3, 3]`, 30 points.
pub fn default_tau_grid() -> Vec<f64> {
    log_grid(-3.0, 3.0, 30)
}

/// `points` values of `tau` evenly spaced in `ln tau`.
pub fn log_grid(ln_lo: f64, ln_hi: f64, points: usize) -> Vec<f64> {
    crate::evolution::Axis::new(ln_lo, ln_hi, points)
        .values()
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Raw and normalised correlators of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCorrelation {
    pub seed: u64,
    pub values: Vec<C64>,
    pub normalized_abs: Vec<f64>,
}

/// Per-sample correlators and their disorder average.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub beta: f64,
    pub mu: f64,
    pub tau_grid: Vec<f64>,
    pub samples: Vec<SampleCorrelation>,
    /// `avg |D(tau)/D(0)|`.
    pub mean_abs: Vec<f64>,
    /// Standard error of the mean across samples (0 for one sample).
    pub stderr: Vec<f64>,
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `D(tau)` on a grid for one sample.
pub fn sample_correlation(
    c: &CouplingSet,
    beta: f64,
    taus: &[f64],
    mode: EvolutionMode,
) -> Result<SampleCorrelation> {
    let seed = c.params.seed;
    let h = build_hamiltonian(c)?.terms;
    let b = build_boson_operator(c)?;
    if b.is_empty() {
        return Err(Error::DegenerateSample {
            seed,
            reason: "boson operator vanishes".into(),
        });
    }
    let (values, d0) = match mode {
        EvolutionMode::Exact => {
            let corr = SpectralCorrelator::new(&h, &b, beta)?;
            (
                taus.iter().map(|&t| corr.evaluate(t)).collect::<Vec<_>>(),
                corr.evaluate(0.0),
            )
        }
        EvolutionMode::Trotter { steps } => {
            let state = thermal_state(&h, beta)?;
            let bd = b.to_dense()?;
            let rb = &state.rho * &bd;
            let order = table_ordering(&h);
            let d0 = trace_product(&rb, &bd);
            let vals = if h.is_empty() {
                vec![d0; taus.len()]
            } else {
                taus.iter()
                    .map(|&t| {
                        let plan = TrotterPlan::new(t, steps).with_ordering(order.clone());
                        let u = trotter_unitary(&h, &plan)?;
                        // Tr(rho U b U^dagger b)
                        Ok(trace_product(&rb, &(&(&u * &bd) * &u.dagger())))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            (vals, d0)
        }
    };
    if d0.norm() < DEGENERATE_NORM {
        return Err(Error::DegenerateSample {
            seed,
            reason: format!("|D(0)| = {:.3e}", d0.norm()),
        });
    }
    let normalized_abs = values.iter().map(|v| (v / d0).norm()).collect();
    Ok(SampleCorrelation {
        seed,
        values,
        normalized_abs,
    })
}

/// Disorder average over `samples`, normalising each sample before taking
/// the modulus. Samples run in parallel; output order follows the input.
pub fn averaged_correlation(
    samples: &[CouplingSet],
    beta: f64,
    taus: &[f64],
    mode: EvolutionMode,
) -> Result<CorrelationSeries> {
    if samples.is_empty() {
        return Err(Error::Parameter("at least one sample is required".into()));
    }
    if taus.is_empty() {
        return Err(Error::Parameter("empty time grid".into()));
    }
    let per: Vec<SampleCorrelation> = samples
        .par_iter()
        .map(|c| sample_correlation(c, beta, taus, mode))
        .collect::<Result<_>>()?;
    let (mean_abs, stderr) = (0..taus.len())
        .map(|t| mean_and_stderr(per.iter().map(move |s| s.normalized_abs[t])))
        .unzip();
    Ok(CorrelationSeries {
        beta,
        mu: samples[0].params.mu,
        tau_grid: taus.to_vec(),
        samples: per,
        mean_abs,
        stderr,
    })
}

/// Late-time plateau with its sample standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub value: f64,
    pub stderr: f64,
    pub window_points: usize,
}

fn window_len(points: usize, window: f64) -> Result<usize> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Parameter(format!(
            "window fraction must be in (0, 1], got {window}"
        )));
    }
    let k = (window * points as f64 - 1e-9).ceil() as usize;
    if k < 2 {
        return Err(Error::Parameter(format!(
            "late window holds {k} point(s); at least 2 are needed"
        )));
    }
    Ok(k)
}

/// Mean of `avg|D|` over the last `window` fraction of the grid.
pub fn saturation_value(series: &CorrelationSeries, window: f64) -> Result<f64> {
    Ok(saturation(series, window)?.value)
}

/// Plateau estimate; the error bar comes from the spread of per-sample window
/// means.
pub fn saturation(series: &CorrelationSeries, window: f64) -> Result<Saturation> {
    let n = series.tau_grid.len();
    let k = window_len(n, window)?;
    let per_sample = series
        .samples
        .iter()
        .map(move |s| s.normalized_abs[n - k..].iter().sum::<f64>() / k as f64);
    let (value, stderr) = mean_and_stderr(per_sample);
    Ok(Saturation {
        value,
        stderr,
        window_points: k,
    })
}

/// Plateau of a bare curve.
pub fn window_mean(values: &[f64], window: f64) -> Result<f64> {
    let k = window_len(values.len(), window)?;
    Ok(values[values.len() - k..].iter().sum::<f64>() / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub n_majorana: usize,
    pub mu: f64,
    pub saturation: Saturation,
}

/// Plateau over a grid of sizes and `mu`. For each size, sample `i` draws
/// with `sample_seed(master_seed, i)` and is shared across all `mu`.
#[allow(clippy::too_many_arguments)]
pub fn scaling_sweep(
    n_list: &[usize],
    mu_list: &[f64],
    beta: f64,
    samples_per_point: usize,
    master_seed: u64,
    convention: crate::syk::VarianceConvention,
    taus: &[f64],
    mode: EvolutionMode,
    window: f64,
) -> Result<Vec<ScalingPoint>> {
    if samples_per_point == 0 {
        return Err(Error::Parameter(
            "samples_per_point must be positive".into(),
        ));
    }
    let mut out = Vec::new();
    for &n in n_list {
        if n / 2 > crate::pauli::DEFAULT_DENSE_CAP {
            return Err(Error::ResourceCap {
                requested: n / 2,
                cap: crate::pauli::DEFAULT_DENSE_CAP,
            });
        }
        for &mu in mu_list {
            let samples = (0..samples_per_point as u64)
                .map(|i| {
                    let p = crate::syk::ModelParams::new(
                        n,
                        mu,
                        crate::syk::sample_seed(master_seed, i),
                    )
                    .with_convention(convention);
                    crate::syk::generate_couplings(&p)
                })
                .collect::<Result<Vec<_>>>()?;
            let series = averaged_correlation(&samples, beta, taus, mode)?;
            out.push(ScalingPoint {
                n_majorana: n,
                mu,
                saturation: saturation(&series, window)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::syk::{generate_couplings, sample_seed, ModelParams};

    fn sample(n: usize, mu: f64, seed: u64) -> CouplingSet {
        generate_couplings(&ModelParams::new(n, mu, seed)).unwrap()
    }

    #[test]
    fn thermal_state_limits() {
        let c = sample(8, 5.0, 1);
        let h = build_hamiltonian(&c).unwrap().terms;
        let s0 = thermal_state(&h, 0.0).unwrap();
        assert_eq!(s0.rho, DenseOperator::identity(16).scale_real(1.0 / 16.0));
        assert!(thermal_state(&h, -1.0).is_err());

        let z = PauliSum::from_terms(
            1,
            vec![PauliString::from_letters("Z", C64::new(0.5, 0.0)).unwrap()],
        )
        .unwrap();
        let cold = thermal_state(&z, 100.0).unwrap();
        let ground = DenseOperator::from_diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(cold.rho.max_abs_diff(&ground) < 1e-10);

        let hd = h.to_dense().unwrap();
        let mut last = f64::INFINITY;
        for beta in [0.0, 0.5, 1.0, 5.0, 20.0] {
            let s = thermal_state(&h, beta).unwrap();
            assert!((s.rho.trace().re - 1.0).abs() < 1e-12);
            assert!(s.rho.is_hermitian(1e-13));
            assert!(s.rho.eigh().values[0] > -1e-12);
            let e = s.expectation(&hd).re;
            assert!(e <= last + 1e-12);
            last = e;
        }
    }

    #[test]
    fn spectral_sum_matches_dense_chain() {
        let c = sample(6, 5.0, 2);
        let h = build_hamiltonian(&c).unwrap().terms;
        let b = build_boson_operator(&c).unwrap();
        let (hd, bd) = (h.to_dense().unwrap(), b.to_dense().unwrap());
        for beta in [0.0, 1.0, 20.0] {
            let corr = SpectralCorrelator::new(&h, &b, beta).unwrap();
            let rho = thermal_state(&h, beta).unwrap().rho;
            for tau in [0.0, 0.3, 2.0, 11.0] {
                let u = hd.exp_hermitian(tau);
                let chain = trace_product(&(&(&(&rho * &u) * &bd) * &u.dagger()), &bd);
                assert!((corr.evaluate(tau) - chain).norm() < 1e-10);
            }
            let d0 = corr.evaluate(0.0);
            assert!(d0.re > 0.0 && d0.im.abs() < 1e-14);
        }
    }

    #[test]
    fn zero_boson_operator_is_rejected() {
        let c = sample(8, 5.0, 2);
        let h = build_hamiltonian(&c).unwrap().terms;
        assert!(matches!(
            boson_correlation(&h, &PauliSum::zero(4), 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        let zero_c = CouplingSet::from_values(
            c.params,
            c.quadruples().iter().map(|q| q.1).collect(),
            vec![0.0; 28],
        )
        .unwrap();
        match averaged_correlation(&[zero_c], 1.0, &[0.0, 1.0], EvolutionMode::Exact) {
            Err(Error::DegenerateSample { seed, .. }) => assert_eq!(seed, c.params.seed),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infinite_temperature_conjugation_symmetry() {
        let c = sample(8, 5.0, 3);
        let h = build_hamiltonian(&c).unwrap().terms;
        let hn = h.scaled(C64::new(-1.0, 0.0));
        let b = build_boson_operator(&c).unwrap();
        let (p, m) = (
            SpectralCorrelator::new(&h, &b, 0.0).unwrap(),
            SpectralCorrelator::new(&hn, &b, 0.0).unwrap(),
        );
        for tau in default_tau_grid() {
            assert!((p.evaluate(tau).conj() - m.evaluate(tau)).norm() < 1e-11);
        }
    }

    #[test]
    fn initial_state_pair_reproduces_the_correlator() {
        let c = sample(8, 5.0, 4);
        let h = build_hamiltonian(&c).unwrap().terms;
        let b = build_boson_operator(&c).unwrap();
        let (hd, bd) = (h.to_dense().unwrap(), b.to_dense().unwrap());
        let pair0 = initial_state_pair(&h, &b, 0.0).unwrap();
        assert!(pair0.rho_imag.max_abs() < 1e-15);
        for beta in [1.0, 20.0] {
            let pair = initial_state_pair(&h, &b, beta).unwrap();
            assert!(pair.rho_real.is_hermitian(1e-13) && pair.rho_imag.is_hermitian(1e-13));
            let corr = SpectralCorrelator::new(&h, &b, beta).unwrap();
            for tau in [0.1, 0.7, 1.9, 4.2, 15.0] {
                let u = hd.exp_hermitian(tau);
                assert!((pair.correlation(&u, &bd) - corr.evaluate(tau)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn normalisation_and_single_sample() {
        let s = averaged_correlation(
            &[sample(8, 5.0, 5)],
            20.0,
            &[0.0, 1.0, 2.0],
            EvolutionMode::Exact,
        )
        .unwrap();
        assert_eq!(s.mean_abs[0], 1.0);
        assert_eq!(s.samples[0].normalized_abs[0], 1.0);
        assert_eq!(s.stderr, vec![0.0; 3]);
        let t = averaged_correlation(
            &[sample(8, 5.0, 5)],
            20.0,
            &[0.0, 1.0],
            EvolutionMode::Trotter { steps: 4 },
        )
        .unwrap();
        assert_eq!(t.mean_abs[0], 1.0);
    }

    #[test]
    fn bounded_by_one_at_infinite_temperature() {
        let samples: Vec<_> = (0..3).map(|i| sample(8, 5.0, sample_seed(6, i))).collect();
        let s =
            averaged_correlation(&samples, 0.0, &default_tau_grid(), EvolutionMode::Exact).unwrap();
        for smp in &s.samples {
            assert!(smp.normalized_abs.iter().all(|&v| v <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn conserved_boson_has_unit_correlation() {
        // H = 0: b is conserved, |D| = 1 everywhere.
        let c = sample(8, 0.0, 7);
        let zero_j = CouplingSet::from_values(
            c.params,
            vec![0.0; 70],
            c.pairs().iter().map(|p| p.1).collect(),
        )
        .unwrap();
        let taus = default_tau_grid();
        for mode in [EvolutionMode::Exact, EvolutionMode::Trotter { steps: 3 }] {
            let s = averaged_correlation(std::slice::from_ref(&zero_j), 1.0, &taus, mode).unwrap();
            assert!(s.mean_abs.iter().all(|&v| (v - 1.0).abs() < 1e-12));
            assert!((saturation_value(&s, 0.25).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn saturation_window_rules() {
        assert_eq!(window_mean(&[3.0; 8], 0.25).unwrap(), 3.0);
        assert!(window_mean(&[1.0; 4], 0.25).is_err());
        assert!(window_mean(&[1.0; 8], 0.0).is_err());
        assert_eq!(
            window_mean(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 4.0], 0.25).unwrap(),
            3.0
        );
        // 30 points -> ceil(7.5) = 8
        assert_eq!(window_len(30, 0.25).unwrap(), 8);
    }

    #[test]
    fn saturation_is_stable_under_grid_refinement() {
        let c = [sample(8, 5.0, 8)];
        let coarse =
            averaged_correlation(&c, 20.0, &log_grid(-3.0, 3.0, 30), EvolutionMode::Exact).unwrap();
        let fine =
            averaged_correlation(&c, 20.0, &log_grid(-3.0, 3.0, 59), EvolutionMode::Exact).unwrap();
        let (a, b) = (
            saturation_value(&coarse, 0.25).unwrap(),
            saturation_value(&fine, 0.25).unwrap(),
        );
        assert!((a - b).abs() / a < 0.02, "{a} vs {b}");
    }

    #[test]
    fn trotter_engine_agrees_with_exact_on_the_plateau() {
        let c = [sample(6, 5.0, 9)];
        let taus = default_tau_grid();
        let exact = averaged_correlation(&c, 20.0, &taus, EvolutionMode::Exact).unwrap();
        let trot =
            averaged_correlation(&c, 20.0, &taus, EvolutionMode::Trotter { steps: 35 }).unwrap();
        let (a, b) = (
            saturation_value(&exact, 0.25).unwrap(),
            saturation_value(&trot, 0.25).unwrap(),
        );
        assert!((a - b).abs() < 0.02, "{a} vs {b}");
    }

    #[test]
    fn scaling_sweep_shape() {
        let pts = scaling_sweep(
            &[6],
            &[0.0, 5.0],
            20.0,
            2,
            1,
            crate::syk::VarianceConvention::Single,
            &default_tau_grid(),
            EvolutionMode::Exact,
            0.25,
        )
        .unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts
            .iter()
            .all(|p| p.saturation.value > 0.0 && p.saturation.value <= 1.5));
        assert!(scaling_sweep(
            &[26],
            &[0.0],
            0.0,
            1,
            1,
            Default::default(),
            &[1.0, 2.0],
            EvolutionMode::Exact,
            1.0
        )
        .is_err());
    }
}
