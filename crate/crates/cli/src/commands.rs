//! One function per subcommand. Each writes its data files through an
//! [`OutputDir`] and returns details for the manifest.

use serde_json::{json, Value};
use syk_sim::compiler::{
    chain_identity_check, complexity_estimate, decompose_general_pauli, resources_for, GateRole,
    ResourceEstimate,
};
use syk_sim::evolution::{fidelity_surface, unitary_fidelity, UnitaryFidelityGrid};
use syk_sim::nmr::{
    grape_optimize, random_initial_field, robustness_profile, GrapeOptions, SpinSystemParams,
    TracePoint,
};
use syk_sim::observables::{averaged_correlation, saturation, scaling_sweep, CorrelationSeries};
use syk_sim::syk::{build_hamiltonian, generate_couplings, table_ordering, CouplingSet};
use syk_sim::{PauliString, C64};

use crate::config::{RunConfig, TermOrder};
use crate::output::{Csv, OutputDir};
use crate::CliError;

pub const SAMPLE_HEADER: &str = "sample_seed,beta,mu,tau,re_D,im_D,abs_D_normalized";
pub const AGGREGATE_HEADER: &str = "beta,mu,tau,avg_abs_D,stderr";
pub const SATURATION_HEADER: &str = "beta,mu,saturation,stderr,window_points";
pub const SCALING_HEADER: &str = "N,mu,beta,samples,saturation,stderr";
pub const COEFFICIENT_HEADER: &str = "sample_seed,kind,i,j,k,l,value";
pub const ROBUSTNESS_HEADER: &str = "rf_scale,fidelity";

/// What a command produced beyond its files.
pub struct Outcome {
    pub details: Value,
    /// Deferred failure reported after the files and manifest are written.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(details: Value) -> Self {
        Self {
            details,
            failure: None,
        }
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn sample(cfg: &RunConfig, index: u64) -> Result<CouplingSet, CliError> {
    Ok(generate_couplings(&cfg.model_params(cfg.seed_of(index)))?)
}

pub fn couplings(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let mut seeds = Vec::new();
    for i in 0..cfg.model.samples as u64 {
        let c = sample(cfg, i)?;
        let seed = c.params.seed;
        seeds.push(seed);
        if cfg.emit.json {
            out.write_json(&format!("couplings_{i:03}.json"), &c.to_json_record())?;
        }
        if cfg.emit.csv {
            let mut csv = Csv::new(COEFFICIENT_HEADER);
            for &([a, b, cc, d], v) in c.quadruples() {
                csv.row(&[
                    seed.to_string(),
                    "J".into(),
                    a.to_string(),
                    b.to_string(),
                    cc.to_string(),
                    d.to_string(),
                    f(v),
                ]);
            }
            for &([a, b], v) in c.pairs() {
                csv.row(&[
                    seed.to_string(),
                    "C".into(),
                    a.to_string(),
                    b.to_string(),
                    String::new(),
                    String::new(),
                    f(v),
                ]);
            }
            out.write(&format!("coefficients_{i:03}.csv"), &csv.into_string())?;
        }
    }
    Ok(Outcome::ok(json!({ "sample_seeds": seeds })))
}

pub fn grid_csv(g: &UnitaryFidelityGrid) -> String {
    let mut csv = Csv::new(UnitaryFidelityGrid::CSV_HEADER);
    for (t, n, v) in g.rows() {
        csv.row(&[f(t), f(n), f(v)]);
    }
    csv.into_string()
}

pub fn fidelity(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = sample(cfg, cfg.fidelity.sample_index)?;
    let h = build_hamiltonian(&c)?.terms;
    let order = match cfg.fidelity.ordering {
        TermOrder::Table => Some(table_ordering(&h)),
        TermOrder::Canonical => None,
    };
    let g = fidelity_surface(
        &h,
        order.as_deref(),
        cfg.fidelity.ln_tau.into(),
        cfg.fidelity.log10_n.into(),
    )?;
    out.write("fidelity_surface.csv", &grid_csv(&g))?;
    Ok(Outcome::ok(
        json!({ "sample_seeds": [c.params.seed], "terms": h.len() }),
    ))
}

/// Samples for one `mu`: the base draws with `mu` set, or for negative `mu`
/// with pairing on, their `(-J, C, -mu)` partners.
fn samples_for_mu(base: &[CouplingSet], mu: f64, paired: bool) -> Vec<CouplingSet> {
    base.iter()
        .map(|c| {
            if paired && mu < 0.0 {
                c.with_mu(-mu).negated_partner()
            } else {
                c.with_mu(mu)
            }
        })
        .collect()
}

pub fn correlation_taus(cfg: &RunConfig) -> Vec<f64> {
    let mut taus = if cfg.correlation.include_zero {
        vec![0.0]
    } else {
        vec![]
    };
    taus.extend(cfg.correlation.tau.values());
    taus
}

pub fn correlation(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cc = &cfg.correlation;
    let taus = correlation_taus(cfg);
    let base = (0..cfg.model.samples as u64)
        .map(|i| sample(cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut per = Csv::new(SAMPLE_HEADER);
    let mut agg = Csv::new(AGGREGATE_HEADER);
    let mut sat = Csv::new(SATURATION_HEADER);
    for &beta in &cc.betas {
        for &mu in &cc.mus {
            let series: CorrelationSeries = averaged_correlation(
                &samples_for_mu(&base, mu, cc.pair_negative_mu),
                beta,
                &taus,
                cfg.evolution_mode(),
            )?;
            for s in &series.samples {
                for (k, &t) in taus.iter().enumerate() {
                    let v = s.values[k];
                    per.row(&[
                        s.seed.to_string(),
                        f(beta),
                        f(mu),
                        f(t),
                        f(v.re),
                        f(v.im),
                        f(s.normalized_abs[k]),
                    ]);
                }
            }
            for (k, &t) in taus.iter().enumerate() {
                agg.row(&[
                    f(beta),
                    f(mu),
                    f(t),
                    f(series.mean_abs[k]),
                    f(series.stderr[k]),
                ]);
            }
            let st = saturation(&series, cc.window)?;
            sat.row(&[
                f(beta),
                f(mu),
                f(st.value),
                f(st.stderr),
                st.window_points.to_string(),
            ]);
        }
    }
    if cfg.emit.csv {
        out.write("correlation_samples.csv", &per.into_string())?;
        out.write("correlation_aggregate.csv", &agg.into_string())?;
        out.write("saturation.csv", &sat.into_string())?;
    }
    let seeds: Vec<u64> = base.iter().map(|c| c.params.seed).collect();
    Ok(Outcome::ok(
        json!({ "sample_seeds": seeds, "engine": cfg.engine, "tau_points": taus.len() }),
    ))
}

pub fn scaling(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sc = &cfg.scaling;
    let points = scaling_sweep(
        &sc.n_list,
        &sc.mus,
        sc.beta,
        sc.samples,
        cfg.master_seed,
        cfg.model.convention,
        &sc.tau.values(),
        cfg.evolution_mode(),
        sc.window,
    )?;
    let mut csv = Csv::new(SCALING_HEADER);
    for p in &points {
        csv.row(&[
            p.n_majorana.to_string(),
            f(p.mu),
            f(sc.beta),
            sc.samples.to_string(),
            f(p.saturation.value),
            f(p.saturation.stderr),
        ]);
    }
    out.write("scaling.csv", &csv.into_string())?;
    let seeds: Vec<u64> = (0..sc.samples as u64).map(|i| cfg.seed_of(i)).collect();
    Ok(Outcome::ok(
        json!({ "sample_seeds": seeds, "engine": cfg.engine }),
    ))
}

pub fn resources_csv(rows: &[ResourceEstimate]) -> String {
    let mut s = format!("{}\n", ResourceEstimate::CSV_HEADER);
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn compile(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cb = &cfg.compile;
    let c = sample(cfg, cb.sample_index)?;
    let h = build_hamiltonian(&c)?.terms;
    let order = table_ordering(&h);
    let mut records = Vec::with_capacity(h.len());
    let mut worst = 1.0f64;
    for (pos, &i) in order.iter().enumerate() {
        let term = &h.terms()[i];
        let seq = decompose_general_pauli(term, cb.tau)?;
        let mut rec = json!({
            "position": pos,
            "term": term.to_string(),
            "weight": term.weight(),
            "one_body": seq.count(1, None),
            "two_body": seq.count(2, None),
            "conjugation_one_body": seq.count(1, Some(GateRole::Conjugation)),
            "conjugation_two_body": seq.count(2, Some(GateRole::Conjugation)),
            "basis_change": seq.count(1, Some(GateRole::BasisChange)),
            "global_phase": seq.global_phase,
            "gates": seq.to_json(),
        });
        if cb.verify {
            let fid = unitary_fidelity(&term.exp_term(cb.tau)?.to_dense(), &seq.dense_product()?)?;
            worst = worst.min(fid);
            rec["fidelity"] = json!(fid);
        }
        records.push(rec);
    }
    out.write_json("sequences.json", &records)?;
    let steps =
        complexity_estimate(&cfg.model_params(c.params.seed), cb.tau, cb.epsilon)?.trotter_steps;
    out.write(
        "resources.csv",
        &resources_csv(&[resources_for(&h, c.params.n_majorana, steps)?]),
    )?;
    let mut details = json!({
        "sample_seeds": [c.params.seed],
        "sequences": records.len(),
        "chain_identity_check": chain_identity_check(),
    });
    let mut failure = None;
    if cb.verify {
        details["min_fidelity"] = json!(worst);
        if worst <= 1.0 - 1e-9 {
            failure = Some(CliError::Numerical(format!(
                "compiled sequence fidelity {worst} below 1 - 1e-9"
            )));
        }
    }
    Ok(Outcome { details, failure })
}

pub fn zz_target(spins: usize, angle: f64) -> Result<syk_sim::DenseOperator, CliError> {
    let p = PauliString::from_letters(&"Z".repeat(spins), C64::new(1.0, 0.0))?;
    Ok(p.exp_term(angle / 2.0)?.to_dense())
}

pub fn grape(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let gb = &cfg.grape;
    if gb.slices == 0 || gb.duration_s.is_nan() || gb.duration_s <= 0.0 {
        return Err(CliError::Config(
            "grape.slices and grape.duration_s must be positive".into(),
        ));
    }
    let params = SpinSystemParams::default().subsystem(&gb.spins)?;
    let target = zz_target(gb.spins.len(), gb.zz_angle)?;
    let seed = cfg.seed_of(0);
    let init = random_initial_field(gb.slices, gb.duration_s, gb.init_sigma_hz, seed);
    let opts = GrapeOptions {
        max_iter: gb.max_iter,
        fidelity_goal: gb.fidelity_goal,
        rf_scales: gb.rf_scales.clone(),
        ..GrapeOptions::default()
    };
    let r = grape_optimize(&target, &init, &params, &opts)?;
    let note = format!("ZZ rotation by {} rad on spins {:?}", gb.zz_angle, gb.spins);
    out.write("field.csv", &r.field.to_csv())?;
    out.write_json("field_header.json", &r.field.header_json(&note))?;
    out.write("trace.csv", &r.trace_csv())?;
    let mut prof = Csv::new(ROBUSTNESS_HEADER);
    for (s, v) in robustness_profile(&r.field, &target, &params, &gb.profile_scales)? {
        prof.row(&[f(s), f(v)]);
    }
    out.write("robustness.csv", &prof.into_string())?;
    let iterations = r.trace.last().map_or(0, |t: &TracePoint| t.iter);
    let failure = (!r.converged).then(|| {
        CliError::Convergence(format!(
            "objective {} below goal {} after {iterations} iterations",
            r.objective, gb.fidelity_goal
        ))
    });
    Ok(Outcome {
        details: json!({ "sample_seeds": [seed], "objective": r.objective, "iterations": iterations, "converged": r.converged }),
        failure,
    })
}
