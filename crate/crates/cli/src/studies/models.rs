//! Model studies: the window-shrinking equation of motion, first-order
//! energy laws with momentum decay, and the discrete action gradient.

use fracvar_core::convergence::fit_tail;
use fracvar_core::limits::{limit_equation_of_motion, ResidualReport, WindowFamily};
use fracvar_core::models::{fractional_energy_term, ChargeModel, FrictionModel, Model};
use fracvar_core::varcalc::{
    action_gradient_fd, canonical_state, discrete_el_residual, el_residual_first_order,
    el_residual_higher_order, LagrangianSpec, Potential,
};
use fracvar_core::{Grid, Trajectory};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Settings, StudyKind, HOST_END};
use crate::error::CliResult;
use crate::paths::{draw_cubic, rng, MixedPath};
use crate::report::{Bound, Cell, Check, Outcome, Table};

const GAMMA_TOLERANCE: f64 = 0.01;
const LAMBDA_TOLERANCE: f64 = 0.05;
const ENERGY_TOLERANCE: f64 = 0.05;
const MIN_ENERGY_SLOPE: f64 = 0.5;
const MOMENTUM_EXPONENT: f64 = 0.5;
const MOMENTUM_TOLERANCE: f64 = 0.1;
const GRADIENT_TOLERANCE: f64 = 1e-6;
const GRADIENT_STEP: f64 = 1e-4;
const FIT_POINTS: usize = 4;

/// Constant driving force of the charge models.
const CHARGE_FORCE: f64 = 1.0;
/// Initial state `(x, x', x'')` of the exact charge solution.
const CHARGE_START: [f64; 3] = [0.0, 0.5, 1.5];

fn host() -> CliResult<Grid> {
    Ok(Grid::new(0.0, HOST_END, 11)?)
}

fn mass(s: &Settings) -> f64 {
    s.mass.expect("model studies carry a mass")
}

fn friction_model(s: &Settings, gamma: f64) -> CliResult<FrictionModel> {
    Ok(FrictionModel::new(
        mass(s),
        gamma,
        Potential::zero(),
        0.0,
        1.0,
    )?)
}

fn charge_model(s: &Settings, lambda: f64) -> CliResult<ChargeModel> {
    Ok(ChargeModel::new(
        mass(s),
        lambda,
        CHARGE_FORCE,
        0.0,
        CHARGE_START,
    )?)
}

fn windows(s: &Settings) -> CliResult<Vec<Grid>> {
    let center = s.center.expect("model studies carry a center");
    let n = s.n_points.expect("model studies carry n_points");
    Settings::list(&s.widths)
        .iter()
        .map(|w| Ok(Grid::new(center - 0.5 * w, center + 0.5 * w, n)?))
        .collect()
}

fn midpoint_family(s: &Settings) -> CliResult<WindowFamily> {
    let center = s.center.expect("model studies carry a center");
    let n = s.n_points.expect("model studies carry n_points");
    Ok(WindowFamily::new(center, Settings::list(&s.widths).to_vec(), 0.5)?.with_points(n)?)
}

fn residual_rows(table: &mut Table, model: &'static str, coefficient: f64, r: &ResidualReport) {
    for (i, w) in r.widths.iter().enumerate() {
        let echo = || vec![Cell::Text(model), coefficient.into(), (*w).into()];
        table.push(
            echo(),
            "effective_coefficient",
            r.effective_coefficients[i],
            Some(coefficient),
        );
        table.push(
            echo(),
            "literal_effective_coefficient",
            r.literal_effective_coefficients[i],
            Some(coefficient),
        );
        table.push(
            echo(),
            "fractional_residual",
            r.fractional_residuals[i],
            Some(r.classical_residual),
        );
        table.push(
            echo(),
            "literal_residual",
            r.literal_residuals[i],
            Some(r.classical_residual),
        );
    }
}

/// Mismatching bits between the first-order residual and the higher-order
/// one with the recoil term switched off.
fn inactive_recoil_mismatches(s: &Settings, x: &Trajectory) -> CliResult<usize> {
    let grid = *x.grid();
    let conservative = LagrangianSpec::new(mass(s), Potential::constant_force(CHARGE_FORCE))?;
    let damped = conservative
        .clone()
        .with_friction(Settings::list(&s.gamma)[0])?;
    let mut mismatches = 0;
    for spec in [conservative, damped] {
        for k in 2..grid.len() - 2 {
            let t = grid.node(k);
            let a = el_residual_first_order(&spec, x, t)?;
            let b = el_residual_higher_order(&spec, x, t)?;
            mismatches += usize::from(a.to_bits() != b.to_bits());
        }
    }
    Ok(mismatches)
}

/// Midpoint equation of motion as windows shrink. Friction runs on the exact
/// damped solution; charge runs on a seeded cubic and on the runaway path.
pub fn el_limit(s: &Settings) -> CliResult<Outcome> {
    let host = host()?;
    let fam = midpoint_family(s)?;
    let gammas = Settings::list(&s.gamma);
    let lambdas = Settings::list(&s.lambda);
    let cubic = draw_cubic(&mut rng(s.seed, StudyKind::ElLimit));
    let cubic_host = Trajectory::from_path(host, cubic.clone())?;

    let friction = gammas
        .par_iter()
        .map(|&gamma| {
            let model = friction_model(s, gamma)?;
            let x = model.reference(HOST_END)?.trajectory(host)?;
            Ok(limit_equation_of_motion(&model.lagrangian()?, &x, &fam)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let charge = lambdas
        .par_iter()
        .map(|&lambda| {
            let spec = LagrangianSpec::new(mass(s), Potential::constant_force(CHARGE_FORCE))?
                .with_recoil(lambda)?;
            let on_cubic = limit_equation_of_motion(&spec, &cubic_host, &fam)?;
            let model = charge_model(s, lambda)?;
            let exact = model.reference()?.trajectory(host)?;
            let on_exact = limit_equation_of_motion(&model.lagrangian()?, &exact, &fam)?;
            Ok((on_cubic, on_exact))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let sampled = Trajectory::from_path(Grid::new(0.0, HOST_END, 129)?, cubic.clone())?;
    let mismatches = inactive_recoil_mismatches(s, &sampled)?;

    let mut table = Table::new(&["model", "coefficient", "width"]);
    let mut results = vec![json!({ "cubic_coefficients": cubic.coeffs })];
    let mut checks = Vec::new();
    for (&gamma, r) in gammas.iter().zip(&friction) {
        residual_rows(&mut table, "friction", gamma, r);
        let effective = r.final_effective_coefficient();
        let rel = ((effective - gamma) / gamma).abs();
        let exponent = r.residual_exponent.unwrap_or(f64::NAN);
        results.push(json!({
            "model": "friction",
            "gamma": gamma,
            "gamma_eff": effective,
            "literal_gamma_eff": r.literal_effective_coefficients.last(),
            "rel_err": rel,
            "residual_exponent": exponent,
        }));
        checks.push(Check::new(
            7,
            format!("friction.gamma_rel_err[gamma={gamma}]"),
            rel,
            Bound::AtMost(GAMMA_TOLERANCE),
        ));
        checks.push(Check::new(
            7,
            format!("friction.residual_exponent[gamma={gamma}]"),
            exponent,
            Bound::Above(0.0),
        ));
    }
    for (&lambda, (on_cubic, on_exact)) in lambdas.iter().zip(&charge) {
        residual_rows(&mut table, "charge_cubic", lambda, on_cubic);
        residual_rows(&mut table, "charge_exact", lambda, on_exact);
        let effective = on_cubic.final_effective_coefficient();
        let rel = ((effective - lambda) / lambda).abs();
        let exponent = on_exact.residual_exponent.unwrap_or(f64::NAN);
        results.push(json!({
            "model": "charge",
            "lambda": lambda,
            "lambda_eff": effective,
            "rel_err": rel,
            "exact_residual_exponent": exponent,
        }));
        checks.push(Check::new(
            8,
            format!("charge.lambda_rel_err[lambda={lambda}]"),
            rel,
            Bound::AtMost(LAMBDA_TOLERANCE),
        ));
        checks.push(Check::new(
            8,
            format!("charge.exact_residual_exponent[lambda={lambda}]"),
            exponent,
            Bound::Above(0.0),
        ));
    }
    results.push(json!({ "inactive_recoil_mismatches": mismatches }));
    checks.push(Check::new(
        8,
        "charge.inactive_recoil_mismatches",
        mismatches as f64,
        Bound::AtMost(0.0),
    ));
    Ok(Outcome {
        settings: s.clone(),
        table,
        results,
        checks,
    })
}

struct EnergyCase {
    label: &'static str,
    coefficient: f64,
    ratios: Vec<f64>,
    full_window_ratios: Vec<f64>,
    momenta: Vec<f64>,
    worst_defect: f64,
}

fn energy_case(
    label: &'static str,
    coefficient: f64,
    model: Model,
    spec: LagrangianSpec,
    x: Trajectory,
    grids: &[Grid],
) -> CliResult<EnergyCase> {
    let mut ratios = Vec::new();
    let mut full_window_ratios = Vec::new();
    let mut momenta = Vec::new();
    let mut worst_defect = 0.0f64;
    for &g in grids {
        let e = fractional_energy_term(&model, &x, g)?;
        ratios.push(e.ratio.unwrap_or(f64::NAN));
        full_window_ratios.push(e.full_window_ratio.unwrap_or(f64::NAN));
        let state = canonical_state(&spec, &x.restricted_to(g)?, g.node(g.len() / 2))?;
        momenta.push(match model {
            Model::Friction(_) => state.p_half,
            Model::Charge(_) => state.p_3half,
        });
        let scaled = state.decomposition_defect().abs() / (1.0 + state.hamiltonian.abs());
        worst_defect = if scaled.is_nan() {
            f64::NAN
        } else {
            worst_defect.max(scaled)
        };
    }
    Ok(EnergyCase {
        label,
        coefficient,
        ratios,
        full_window_ratios,
        momenta,
        worst_defect,
    })
}

/// First-order energy laws and fractional momentum decay on exact model
/// solutions, with the Hamiltonian decomposition checked along the way.
pub fn energy_term(s: &Settings) -> CliResult<Outcome> {
    let host = host()?;
    let grids = windows(s)?;
    let widths = Settings::list(&s.widths);
    let mut jobs: Vec<(&'static str, f64)> = Settings::list(&s.gamma)
        .iter()
        .map(|&g| ("friction", g))
        .collect();
    jobs.extend(Settings::list(&s.lambda).iter().map(|&l| ("charge", l)));
    let cases = jobs
        .par_iter()
        .map(|&(label, c)| {
            if label == "friction" {
                let m = friction_model(s, c)?;
                let x = m.reference(HOST_END)?.trajectory(host)?;
                energy_case(
                    label,
                    c,
                    Model::Friction(m.clone()),
                    m.lagrangian()?,
                    x,
                    &grids,
                )
            } else {
                let m = charge_model(s, c)?;
                let x = m.reference()?.trajectory(host)?;
                energy_case(label, c, Model::Charge(m), m.lagrangian()?, x, &grids)
            }
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(&["model", "coefficient", "width"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    let mut worst_defect = 0.0f64;
    for c in &cases {
        let momentum = if c.label == "friction" {
            "p_half"
        } else {
            "p_3half"
        };
        for (i, w) in widths.iter().enumerate() {
            let echo = || vec![Cell::Text(c.label), c.coefficient.into(), (*w).into()];
            table.push(echo(), "energy_ratio", c.ratios[i], Some(1.0));
            table.push(
                echo(),
                "full_window_energy_ratio",
                c.full_window_ratios[i],
                Some(0.5),
            );
            table.push(echo(), momentum, c.momenta[i], None);
        }
        let deviations: Vec<f64> = c.ratios.iter().map(|r| (r - 1.0).abs()).collect();
        let final_dev = *deviations.last().expect("families are non-empty");
        let slope = fit_tail(widths, &deviations, FIT_POINTS).map_or(f64::NAN, |f| f.exponent);
        let decay = fit_tail(widths, &c.momenta, FIT_POINTS).map_or(f64::NAN, |f| f.exponent);
        worst_defect = if c.worst_defect.is_nan() {
            f64::NAN
        } else {
            worst_defect.max(c.worst_defect)
        };
        let tag = format!(
            "{}={}",
            if c.label == "friction" {
                "gamma"
            } else {
                "lambda"
            },
            c.coefficient
        );
        results.push(json!({
            "model": c.label,
            "coefficient": c.coefficient,
            "final_ratio": c.ratios.last(),
            "final_deviation": final_dev,
            "deviation_slope": slope,
            "momentum": momentum,
            "momentum_exponent": decay,
        }));
        checks.push(Check::new(
            9,
            format!("energy.{}.final_deviation[{tag}]", c.label),
            final_dev,
            Bound::AtMost(ENERGY_TOLERANCE),
        ));
        checks.push(Check::new(
            9,
            format!("energy.{}.deviation_slope[{tag}]", c.label),
            slope,
            Bound::AtLeast(MIN_ENERGY_SLOPE),
        ));
        checks.push(Check::new(
            11,
            format!("momentum.{momentum}.exponent[{tag}]"),
            decay,
            Bound::Within {
                target: MOMENTUM_EXPONENT,
                tolerance: MOMENTUM_TOLERANCE,
            },
        ));
    }
    let limit = 4.0 * f64::EPSILON;
    results.push(json!({ "hamiltonian_max_scaled_defect": worst_defect }));
    checks.push(Check::new(
        11,
        "hamiltonian.max_scaled_defect",
        worst_defect,
        Bound::AtMost(limit),
    ));
    Ok(Outcome {
        settings: s.clone(),
        table,
        results,
        checks,
    })
}

/// Finite-difference action gradient against `-h R` at interior nodes.
pub fn gradient_check(s: &Settings) -> CliResult<Outcome> {
    let path = MixedPath::draw(&mut rng(s.seed, StudyKind::GradientCheck));
    let mut specs: Vec<(&'static str, f64, LagrangianSpec)> = Vec::new();
    for &g in Settings::list(&s.gamma) {
        specs.push((
            "friction",
            g,
            LagrangianSpec::new(mass(s), Potential::harmonic(0.5))?.with_friction(g)?,
        ));
    }
    for &l in Settings::list(&s.lambda) {
        specs.push((
            "charge",
            l,
            LagrangianSpec::new(mass(s), Potential::constant_force(CHARGE_FORCE))?
                .with_recoil(l)?,
        ));
    }
    let jobs: Vec<(usize, usize)> = Settings::list(&s.grid_sizes)
        .iter()
        .flat_map(|&n| (0..specs.len()).map(move |i| (n, i)))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|&(n, i)| -> CliResult<(Vec<f64>, Vec<f64>)> {
            let grid = Grid::new(0.0, 1.0, n)?;
            let x = Trajectory::from_fn(grid, |t| path.value(t))?;
            let spec = &specs[i].2;
            let fd = action_gradient_fd(spec, &x, GRADIENT_STEP)?;
            let h = grid.step();
            let predicted = discrete_el_residual(spec, &x)?
                .iter()
                .map(|r| -h * r)
                .collect();
            Ok((fd, predicted))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(&["lagrangian", "coefficient", "n", "node"]);
    let mut results = vec![json!({ "path": path })];
    let mut checks = Vec::new();
    for (&(n, i), (fd, predicted)) in jobs.iter().zip(&blocks) {
        let (label, coefficient, _) = specs[i];
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for j in 1..n - 1 {
            table.push(
                vec![Cell::Text(label), coefficient.into(), n.into(), j.into()],
                "action_gradient",
                fd[j],
                Some(predicted[j]),
            );
            diff = diff.max((fd[j] - predicted[j]).abs());
            scale = scale.max(predicted[j].abs());
        }
        let rel = diff / scale;
        let tag = format!("{label},coefficient={coefficient},n={n}");
        results.push(
            json!({ "lagrangian": label, "coefficient": coefficient, "n": n, "rel_err": rel }),
        );
        checks.push(Check::new(
            10,
            format!("gradient.rel_err[{tag}]"),
            rel,
            Bound::AtMost(GRADIENT_TOLERANCE),
        ));
    }
    Ok(Outcome {
        settings: s.clone(),
        table,
        results,
        checks,
    })
}
