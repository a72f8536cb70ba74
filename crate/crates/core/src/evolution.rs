//! Exact and first-order product-formula propagators.
//!
//! ```text
//! U(tau)    = exp(-i H tau)
//! U_n(tau)  = ( prod_s exp(-i a_s S_s tau / n) )^n
//! F(U, V)   = |Tr(U^dagger V)| / d
//! ```

use rayon::prelude::*;

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{ExpPauli, PauliSum};
use num_complex::Complex64 as C64;

/// Evolution time, step count and the order in which the terms of a sum are
/// applied within one step (left to right, as factors of the product).
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub tau: f64,
    pub steps: u64,
    /// Permutation of term indices; `None` keeps the canonical order.
    pub ordering: Option<Vec<usize>>,
}

impl TrotterPlan {
    pub fn new(tau: f64, steps: u64) -> Self {
        Self {
            tau,
            steps,
            ordering: None,
        }
    }

    pub fn with_ordering(mut self, ordering: Vec<usize>) -> Self {
        self.ordering = Some(ordering);
        self
    }

    fn validate(&self, terms: usize) -> Result<Vec<usize>> {
        if self.steps == 0 {
            return Err(Error::Parameter(
                "Trotter step count must be at least 1".into(),
            ));
        }
        if !self.tau.is_finite() {
            return Err(Error::Parameter("evolution time must be finite".into()));
        }
        match &self.ordering {
            None => Ok((0..terms).collect()),
            Some(ord) => {
                let mut seen = vec![false; terms];
                if ord.len() != terms {
                    return Err(Error::Parameter(format!(
                        "ordering has {} entries for {terms} terms",
                        ord.len()
                    )));
                }
                for &i in ord {
                    if i >= terms || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::Parameter("ordering is not a permutation".into()));
                    }
                }
                Ok(ord.clone())
            }
        }
    }
}

fn check_hermitian(h: &PauliSum) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > 1e-12 {
        return Err(Error::NotHermitian(format!(
            "imaginary coefficient of size {defect:.3e}"
        )));
    }
    Ok(())
}

/// `exp(-i H tau)` by diagonalisation.
pub fn exact_unitary(h: &PauliSum, tau: f64) -> Result<DenseOperator> {
    check_hermitian(h)?;
    Ok(h.to_dense()?.exp_hermitian(tau))
}

/// One step `prod_s exp(-i a_s S_s dt)`, each factor applied in closed form.
pub fn trotter_step(h: &PauliSum, dt: f64, ordering: &[usize]) -> Result<DenseOperator> {
    check_hermitian(h)?;
    let d = 1usize << h.qubit_count();
    let factors: Vec<ExpPauli> = ordering
        .iter()
        .map(|&i| {
            let t = &h.terms()[i];
            t.with_coefficient(C64::new(t.coefficient().re, 0.0))
                .exp_term(dt)
        })
        .collect::<Result<_>>()?;
    let mut u = DenseOperator::identity(d);
    // The leftmost factor of the product acts last.
    for f in factors.iter().rev() {
        f.apply_left(&mut u);
    }
    Ok(u)
}

/// First-order product formula `U_n(tau)`.
pub fn trotter_unitary(h: &PauliSum, plan: &TrotterPlan) -> Result<DenseOperator> {
    if h.is_empty() {
        return Err(Error::Parameter(
            "cannot build a product formula for an empty Hamiltonian".into(),
        ));
    }
    let ordering = plan.validate(h.len())?;
    h.to_dense()?; // dimension cap check
    let step = trotter_step(h, plan.tau / plan.steps as f64, &ordering)?;
    Ok(step.pow(plan.steps))
}

/// `|Tr(U^dagger V)| / d`.
pub fn unitary_fidelity(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension(format!("{} vs {}", u.dim(), v.dim())));
    }
    let tr: num_complex::Complex64 = u
        .as_matrix()
        .iter()
        .zip(v.as_matrix().iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(tr.norm() / u.dim() as f64)
}

/// Uniform 1-D grid `[lo, hi]` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => vec![],
            1 => vec![self.lo],
            p => (0..p)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (p - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.points == 0 || !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(Error::Parameter(format!("invalid {what} axis {self:?}")));
        }
        Ok(())
    }
}

/// Default axes: `ln tau` on `[-3, 3]` with 25 points, `log10 n` on
/// `[0, 2.5]` with 51 points so that the grid contains `log10 n = 1.55`.
pub fn default_axes() -> (Axis, Axis) {
    (Axis::new(-3.0, 3.0, 25), Axis::new(0.0, 2.5, 51))
}

/// Step count for a point of the `log10 n` axis.
pub fn steps_for(log10_n: f64) -> u64 {
    (10f64.powf(log10_n).round() as u64).max(1)
}

/// Fidelity on a `(ln tau, log10 n)` grid, row-major with `ln tau` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFidelityGrid {
    pub ln_tau: Vec<f64>,
    pub log10_n: Vec<f64>,
    pub fidelity: Vec<f64>,
}

impl UnitaryFidelityGrid {
    pub fn get(&self, i_tau: usize, i_n: usize) -> f64 {
        self.fidelity[i_tau * self.log10_n.len() + i_n]
    }

    /// Value at the grid point nearest to `(ln_tau, log10_n)`.
    pub fn nearest(&self, ln_tau: f64, log10_n: f64) -> f64 {
        let pick = |xs: &[f64], x: f64| {
            (0..xs.len())
                .min_by(|&a, &b| (xs[a] - x).abs().total_cmp(&(xs[b] - x).abs()))
                .unwrap_or(0)
        };
        self.get(pick(&self.ln_tau, ln_tau), pick(&self.log10_n, log10_n))
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ln_tau.iter().enumerate().flat_map(move |(i, &t)| {
            self.log10_n
                .iter()
                .enumerate()
                .map(move |(j, &n)| (t, n, self.get(i, j)))
        })
    }

    pub const CSV_HEADER: &'static str = "ln_tau,log10_n,fidelity";
}

/// Fidelity between `exp(-i H tau)` and `U_n(tau)` over the grid, with the
/// terms of each step applied in `ordering` (canonical when `None`). One
/// diagonalisation in total; rows run in parallel.
pub fn fidelity_surface(
    h: &PauliSum,
    ordering: Option<&[usize]>,
    ln_tau: Axis,
    log10_n: Axis,
) -> Result<UnitaryFidelityGrid> {
    ln_tau.validate("ln tau")?;
    log10_n.validate("log10 n")?;
    if h.is_empty() {
        return Err(Error::Parameter(
            "cannot build a product formula for an empty Hamiltonian".into(),
        ));
    }
    check_hermitian(h)?;
    let eig = h.to_dense()?.eigh();
    let taus = ln_tau.values();
    let ns = log10_n.values();
    let plan = TrotterPlan {
        tau: 1.0,
        steps: 1,
        ordering: ordering.map(<[usize]>::to_vec),
    };
    let order = plan.validate(h.len())?;
    let rows: Vec<Vec<f64>> = taus
        .par_iter()
        .map(|&lt| -> Result<Vec<f64>> {
            let tau = lt.exp();
            let exact = eig.exp_i(tau);
            ns.iter()
                .map(|&ln| {
                    let steps = steps_for(ln);
                    let step = trotter_step(h, tau / steps as f64, &order)?;
                    unitary_fidelity(&exact, &step.pow(steps))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(UnitaryFidelityGrid {
        ln_tau: taus,
        log10_n: ns,
        fidelity: rows.concat(),
    })
}

/// Frobenius distance `||U - U_n||_F`.
pub fn trotter_error(h: &PauliSum, plan: &TrotterPlan) -> Result<f64> {
    let exact = exact_unitary(h, plan.tau)?;
    let approx = trotter_unitary(h, plan)?;
    Ok((&exact - &approx).frobenius_norm())
}

/// First-order bound on the operator-norm error,
/// `(tau^2 / 2n) sum_{s<t} ||[a_s S_s, a_t S_t]||`, using
/// `||[P, Q]|| = 2 |a_s a_t|` for anticommuting strings.
pub fn first_order_bound(h: &PauliSum, plan: &TrotterPlan) -> Result<f64> {
    let t = h.terms();
    let mut s = 0.0;
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            if !t[a].commutes(&t[b])? {
                s += 2.0 * (t[a].coefficient().re * t[b].coefficient().re).abs();
            }
        }
    }
    Ok(plan.tau * plan.tau / (2.0 * plan.steps as f64) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::syk::{build_hamiltonian, generate_couplings, ModelParams};

    fn sum(q: usize, terms: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_terms(
            q,
            terms
                .iter()
                .map(|(s, c)| PauliString::from_letters(s, C64::new(*c, 0.0)).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let h = sum(1, &[("X", 1.0)]);
        assert!(trotter_unitary(&h, &TrotterPlan::new(1.0, 0)).is_err());
        assert!(trotter_unitary(&PauliSum::zero(1), &TrotterPlan::new(1.0, 1)).is_err());
        assert!(trotter_unitary(&h, &TrotterPlan::new(1.0, 1).with_ordering(vec![0, 0])).is_err());
        let bad = PauliSum::from_terms(
            1,
            vec![PauliString::from_letters("X", C64::new(0.0, 1.0)).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            exact_unitary(&bad, 1.0),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            unitary_fidelity(&DenseOperator::identity(2), &DenseOperator::identity(4)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn commuting_terms_are_exact_for_one_step() {
        let h = sum(
            3,
            &[("ZZI", 0.7), ("IZZ", -0.3), ("ZIZ", 1.1), ("XXX", 0.4)],
        );
        let u = exact_unitary(&h, 2.3).unwrap();
        let v = trotter_unitary(&h, &TrotterPlan::new(2.3, 1)).unwrap();
        assert!(u.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn two_qubit_oracle() {
        // H = 0.5 ZZ + 0.3 XI + 0.2 IX with tau = 0.7, n = 2. Reference
        // fidelity from an independent evaluation.
        let h = sum(2, &[("XI", 0.3), ("IX", 0.2), ("ZZ", 0.5)]);
        let f = unitary_fidelity(
            &exact_unitary(&h, 0.7).unwrap(),
            &trotter_unitary(&h, &TrotterPlan::new(0.7, 2)).unwrap(),
        )
        .unwrap();
        // Hand expansion: U_n = (e^{-i .15 X1} e^{-i .1 X2} e^{-i .25 ZZ} ...)
        // composed explicitly below as a product of 2x2 rotations.
        let x1 = PauliString::from_letters("XI", C64::new(1.0, 0.0))
            .unwrap()
            .to_dense()
            .unwrap();
        let x2 = PauliString::from_letters("IX", C64::new(1.0, 0.0))
            .unwrap()
            .to_dense()
            .unwrap();
        let zz = PauliString::from_letters("ZZ", C64::new(1.0, 0.0))
            .unwrap()
            .to_dense()
            .unwrap();
        let id = DenseOperator::identity(4);
        let rot = |p: &DenseOperator, th: f64| {
            &id.scale_real(th.cos()) - &p.scale(C64::new(0.0, th.sin()))
        };
        let dt = 0.35;
        // canonical order is by (z, x) masks: IX, XI, ZZ
        let step = &(&rot(&x2, 0.2 * dt) * &rot(&x1, 0.3 * dt)) * &rot(&zz, 0.5 * dt);
        let reference = &step * &step;
        let exact = h.to_dense().unwrap().exp_hermitian(0.7);
        let f_ref = unitary_fidelity(&exact, &reference).unwrap();
        assert!((f - f_ref).abs() < 1e-13);
        assert!(f < 1.0 && f > 0.99);
    }

    #[test]
    fn error_halves_when_steps_double() {
        let c = generate_couplings(&ModelParams::new(8, 5.0, 2)).unwrap();
        let h = build_hamiltonian(&c).unwrap().terms;
        let e1 = trotter_error(&h, &TrotterPlan::new(1.0, 40)).unwrap();
        let e2 = trotter_error(&h, &TrotterPlan::new(1.0, 80)).unwrap();
        let ratio = e2 / e1;
        assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn error_respects_first_order_bound() {
        let c = generate_couplings(&ModelParams::new(8, 0.0, 3)).unwrap();
        let h = build_hamiltonian(&c).unwrap().terms;
        let plan = TrotterPlan::new(1.5, 10);
        let op_err = (&exact_unitary(&h, 1.5).unwrap() - &trotter_unitary(&h, &plan).unwrap())
            .operator_norm();
        let bound = first_order_bound(&h, &plan).unwrap();
        assert!(op_err <= bound * 1.0001, "{op_err} > {bound}");
        assert!(op_err * 1000.0 > bound / 1000.0);
    }

    #[test]
    fn ordering_changes_the_product_but_not_the_limit() {
        let h = sum(2, &[("XI", 0.3), ("IX", 0.2), ("ZZ", 0.5), ("YY", -0.4)]);
        let a = trotter_unitary(&h, &TrotterPlan::new(1.0, 3)).unwrap();
        let b = trotter_unitary(
            &h,
            &TrotterPlan::new(1.0, 3).with_ordering(vec![3, 2, 1, 0]),
        )
        .unwrap();
        assert!(a.max_abs_diff(&b) > 1e-6);
        let exact = exact_unitary(&h, 1.0).unwrap();
        let fa = unitary_fidelity(
            &exact,
            &trotter_unitary(&h, &TrotterPlan::new(1.0, 2000)).unwrap(),
        )
        .unwrap();
        assert!(fa > 1.0 - 1e-6);
    }

    #[test]
    fn grid_axes_and_lookup() {
        let (t, n) = default_axes();
        assert_eq!(t.values().len(), 25);
        let ns = n.values();
        assert!(ns.iter().any(|&x| (x - 1.55).abs() < 1e-12));
        assert_eq!(steps_for(1.55), 35);
        assert_eq!(steps_for(0.0), 1);
        let h = sum(2, &[("XI", 0.3), ("ZZ", 0.5)]);
        let g =
            fidelity_surface(&h, None, Axis::new(-1.0, 1.0, 3), Axis::new(0.0, 1.0, 2)).unwrap();
        assert_eq!(g.fidelity.len(), 6);
        assert_eq!(g.rows().count(), 6);
        let direct = unitary_fidelity(
            &exact_unitary(&h, 1f64.exp()).unwrap(),
            &trotter_unitary(&h, &TrotterPlan::new(1f64.exp(), 10)).unwrap(),
        )
        .unwrap();
        assert!((g.nearest(1.0, 1.0) - direct).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_and_group_law() {
        let single = sum(2, &[("XY", 0.8)]);
        let direct = crate::pauli::exp_pauli_term(&single.terms()[0], 0.9).unwrap();
        assert!(exact_unitary(&single, 0.9).unwrap().max_abs_diff(&direct) < 1e-12);
        let h = sum(2, &[("XI", 0.3), ("ZZ", 0.5), ("YX", -0.2)]);
        let a = exact_unitary(&h, 0.4).unwrap();
        let b = exact_unitary(&h, 1.1).unwrap();
        assert!((&a * &b).max_abs_diff(&exact_unitary(&h, 1.5).unwrap()) < 1e-11);
        for n in [1, 7] {
            let u = trotter_unitary(&h, &TrotterPlan::new(0.0, n)).unwrap();
            assert!(u.max_abs_diff(&DenseOperator::identity(4)) < 1e-15);
        }
        assert!(
            trotter_unitary(&h, &TrotterPlan::new(2.0, 9))
                .unwrap()
                .unitarity_defect()
                < 1e-11
        );
    }

    #[test]
    fn fidelity_closed_forms() {
        let id = DenseOperator::identity(2);
        let z = sum(1, &[("Z", 1.0)]);
        for theta in [0.0, 0.4, 2.0, 3.5] {
            // exp(-i theta Z / 2)
            let r = exact_unitary(&z, theta / 2.0).unwrap();
            assert!((unitary_fidelity(&id, &r).unwrap() - (theta / 2.0).cos().abs()).abs() < 1e-14);
        }
        let u = exact_unitary(&sum(2, &[("XY", 0.3), ("ZI", 1.0)]), 0.7).unwrap();
        assert!((unitary_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-14);
        let phased = u.scale(C64::from_polar(1.0, 0.77));
        assert!((unitary_fidelity(&u, &phased).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn anchor_cell_and_short_time_row() {
        let c = generate_couplings(&ModelParams::new(8, 5.0, 0)).unwrap();
        let h = build_hamiltonian(&c).unwrap().terms;
        let order = crate::syk::table_ordering(&h);
        let g = fidelity_surface(
            &h,
            Some(&order),
            Axis::new(-20.0, 2.0, 2),
            Axis::new(1.5, 1.6, 3),
        )
        .unwrap();
        assert!(g.nearest(2.0, 1.55) > 0.99, "{}", g.nearest(2.0, 1.55));
        for j in 0..3 {
            assert!((g.get(0, j) - 1.0).abs() < 1e-9);
        }
        let again = fidelity_surface(
            &h,
            Some(&order),
            Axis::new(-20.0, 2.0, 2),
            Axis::new(1.5, 1.6, 3),
        )
        .unwrap();
        assert_eq!(g, again);
    }
}
