//! The identity battery behind `lv3 verify`.
//!
//! Each check sweeps seeded random samples through one algebraic identity
//! of the system and records the worst residual seen. The report lists
//! every check with its threshold; the process exits 1 if any fails.

use std::path::PathBuf;

use clap::Args;
use lv3_core::integrator::{drift_report, integrate, IntegratorSettings, Termination};
use lv3_core::lax;
use lv3_core::model::{self, sample_sl2};
use lv3_core::poisson::{
    bracket, casimir_residual, ham_vector_field, jacobiator, tensor_from_generator, ScalarField,
};
use lv3_core::sampling::{self, quadratic_in_box, state_in_box};
use lv3_core::State;
use serde::Serialize;

use crate::CliError;

/// Horizon of the conservation run; the reference orbit from (1, 2, 3)
/// escapes to infinity not long after, so the window stays short.
const DRIFT_HORIZON: f64 = 0.2;

/// Coefficient bound for the random quadratics in the bracket agreement
/// check.
const COEFF_BOUND: f64 = 3.0;

#[derive(Args)]
pub struct VerifyArgs {
    /// Point count for the pointwise identity sweeps
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// PRNG seed
    #[arg(long, default_value_t = sampling::DEFAULT_SEED)]
    seed: u64,
    /// Unit-determinant quadruples in the bracket-family sweep
    #[arg(long, default_value_t = 100)]
    sl2_quadruples: usize,
    /// Points per quadruple
    #[arg(long, default_value_t = 1000)]
    sl2_points: usize,
    /// Sampling box half-width
    #[arg(long, default_value_t = 10.0)]
    half_width: f64,
    /// Fixed step for the conservation run
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Config {
    samples: usize,
    seed: u64,
    sl2_quadruples: usize,
    sl2_points: usize,
    half_width: f64,
    dt: f64,
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    paper_ref: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Report {
    subcommand: &'static str,
    config: Config,
    results: Vec<CheckResult>,
    pass: bool,
}

fn check(name: &'static str, paper_ref: &'static str, value: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name,
        paper_ref,
        value,
        threshold,
        pass: value <= threshold,
    }
}

pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    if args.samples == 0 || args.sl2_quadruples == 0 || args.sl2_points == 0 {
        return Err("sample counts must be positive".into());
    }
    if !(args.half_width.is_finite() && args.half_width > 0.0) {
        return Err(format!(
            "--half-width must be finite and positive, got {}",
            args.half_width
        )
        .into());
    }

    let mut rng = sampling::rng_from_seed(args.seed);
    let hamiltonian = model::hamiltonian();
    let casimir = model::casimir();

    let mut realization = 0.0f64;
    let mut annihilation = 0.0f64;
    let mut jacobi = 0.0f64;
    let mut agreement = 0.0f64;
    let mut sextic = 0.0f64;
    let mut quartic = 0.0f64;
    let mut commutator = 0.0f64;
    let mut trace_identity = 0.0f64;
    for _ in 0..args.samples {
        let p = state_in_box(&mut rng, args.half_width);
        let v = p.coords();

        let field_gap = ham_vector_field(&casimir, &hamiltonian, p) - model::lv_field(p);
        realization = realization.max(field_gap.norm_inf());
        annihilation = annihilation.max(casimir_residual(&casimir, p).norm_inf());
        jacobi = jacobi.max(jacobiator(&casimir, p));

        let gen = quadratic_in_box(&mut rng, COEFF_BOUND);
        let f = quadratic_in_box(&mut rng, COEFF_BOUND);
        let g = quadratic_in_box(&mut rng, COEFF_BOUND);
        let direct = bracket(&gen, &f, &g, p);
        let via_tensor = f
            .grad(v)
            .dot(tensor_from_generator(&gen, p).mul_vec(g.grad(v)));
        let scale =
            1.0 + gen.grad(v).norm_inf() * f.grad(v).norm_inf() * g.grad(v).norm_inf();
        agreement = agreement.max((direct - via_tensor).abs() / scale);

        let (df, dg) = model::invariant_identity_residual(p);
        sextic = sextic.max(df.abs() / (1.0 + model::sextic_direct(p).abs()));
        quartic = quartic.max(dg.abs() / (1.0 + model::quartic_direct(p).abs()));

        commutator = commutator.max(lax::lax_residual(p));
        let spec = lax::spectral_invariant(p);
        let spec_scale = 1.0 + spec.reference.abs();
        trace_identity = trace_identity
            .max((spec.value.re - spec.reference).abs() / spec_scale)
            .max(spec.value.im.abs() / spec_scale);
    }

    let mut family = 0.0f64;
    let mut combos = 0.0f64;
    for _ in 0..args.sl2_quadruples {
        let params = sample_sl2(&mut rng);
        let (cab, hcd) = params.fields();
        for _ in 0..args.sl2_points {
            let p = state_in_box(&mut rng, args.half_width);
            let v = p.coords();
            family = family.max(params.realization_residual(p).norm_inf());

            let hv = hamiltonian.eval(v);
            let cv = casimir.eval(v);
            let cab_combo = params.a() * cv + params.b() * hv;
            let hcd_combo = params.c() * cv + params.d() * hv;
            combos = combos
                .max((cab.eval(v) - cab_combo).abs() / (1.0 + cab_combo.abs()))
                .max((hcd.eval(v) - hcd_combo).abs() / (1.0 + hcd_combo.abs()));
        }
    }

    let settings = IntegratorSettings::fixed(args.dt)?;
    let p0 = State::new(1.0, 2.0, 3.0).expect("finite");
    let traj = integrate(model::field_at, p0, DRIFT_HORIZON, &settings);
    if traj.termination != Termination::Completed {
        return Err(format!("conservation run did not complete: {}", traj.termination).into());
    }
    let drift = drift_report(&traj);

    let results = vec![
        check("hamiltonian_realization", "Pi_C grad H = F", realization, 1e-9),
        check("casimir_annihilation", "Pi_C grad C = 0", annihilation, 1e-9),
        check(
            "jacobi_identity",
            "cyclic sum Pi^il d_l Pi^jk = 0",
            jacobi,
            1e-7,
        ),
        check(
            "bracket_tensor_agreement",
            "{f,g} = grad f . Pi grad g",
            agreement,
            1e-12,
        ),
        check(
            "sl2_realization",
            "Pi_{a,b} grad H_{c,d} = F when ad - bc = 1",
            family,
            1e-8,
        ),
        check(
            "sl2_linear_combinations",
            "C_{a,b} = aC + bH and H_{c,d} = cC + dH",
            combos,
            1e-10,
        ),
        check(
            "sextic_identity",
            "CH(C+H) = xyz(x-y)(x-z)(y-z)",
            sextic,
            1e-7,
        ),
        check(
            "quartic_identity",
            "(C^2 + H^2 + (C+H)^2)/2 matches its monomial expansion",
            quartic,
            1e-7,
        ),
        check("lax_commutator", "dL/dt = [L, B] along the flow", commutator, 1e-9),
        check(
            "lax_trace_identity",
            "tr L^2 = 4(H - C)",
            trace_identity,
            1e-9,
        ),
        check("h_drift", "H is constant along the flow", drift.h, 1e-9),
        check("c_drift", "C is constant along the flow", drift.c, 1e-9),
    ];
    let pass = results.iter().all(|r| r.pass);
    let report = Report {
        subcommand: "verify",
        config: Config {
            samples: args.samples,
            seed: args.seed,
            sl2_quadruples: args.sl2_quadruples,
            sl2_points: args.sl2_points,
            half_width: args.half_width,
            dt: args.dt,
        },
        results,
        pass,
    };
    crate::emit_json(&report, args.out.as_deref())?;
    Ok(if pass { 0 } else { 1 })
}
