//! Shrinking-window studies: the Caputo ratio limit and Riemann-Liouville
//! divergence.

use fracvar_core::limits::{caputo_ratio_limit, rl_divergence_diagnostic, WindowFamily};
use fracvar_core::{FractionalOrder, Grid, Trajectory};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Settings, StudyKind, HOST_END};
use crate::error::CliResult;
use crate::paths::{rng, SinePath};
use crate::report::{Bound, Check, Outcome, Table};

const RATIO_TOLERANCE: f64 = 0.02;
const PLACEMENT_GAP: f64 = 0.5;
const EXPONENT_TOLERANCE: f64 = 0.05;
const RL_RATIO_TOLERANCE: f64 = 0.05;

/// The slope or value at the centre must be at least this fraction of its
/// largest possible size for a drawn path to be accepted.
const HYPOTHESIS_MARGIN: f64 = 0.25;

fn host_path(path: SinePath) -> CliResult<Trajectory> {
    Ok(Trajectory::from_path(Grid::new(0.0, HOST_END, 11)?, path)?)
}

fn family(s: &Settings, placement: f64) -> CliResult<WindowFamily> {
    let center = s.center.expect("window studies carry a center");
    let widths = Settings::list(&s.widths).to_vec();
    let n = s.n_points.expect("window studies carry n_points");
    Ok(WindowFamily::new(center, widths, placement)?.with_points(n)?)
}

fn cases(s: &Settings) -> Vec<(f64, f64)> {
    Settings::list(&s.s)
        .iter()
        .flat_map(|&p| Settings::list(&s.alpha).iter().map(move |&a| (p, a)))
        .collect()
}

/// Left over right Caputo derivative against `-(s/(1-s))^(1-α)`.
pub fn ratio_lemma(s: &Settings) -> CliResult<Outcome> {
    let center = s.center.expect("window studies carry a center");
    let path = SinePath::draw_until(&mut rng(s.seed, StudyKind::RatioLemma), |p| {
        p.value(1, center).abs() >= HYPOTHESIS_MARGIN * p.amplitude * p.omega
    });
    let x = host_path(path)?;
    let cases = cases(s);
    let reports = cases
        .par_iter()
        .map(|&(placement, alpha)| {
            Ok(caputo_ratio_limit(
                &x,
                FractionalOrder::new(alpha)?,
                &family(s, placement)?,
            )?)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(&["s", "alpha", "width"]);
    let mut results = vec![json!({ "path": path })];
    let mut checks = Vec::new();
    for r in &reports {
        for (w, ratio) in r.widths.iter().zip(&r.ratios) {
            table.push(
                vec![r.s.into(), r.alpha.into(), (*w).into()],
                "caputo_ratio",
                *ratio,
                Some(r.predicted),
            );
        }
        let measured = *r.ratios.last().expect("families are non-empty");
        results.push(json!({
            "s": r.s,
            "alpha": r.alpha,
            "predicted": r.predicted,
            "measured": measured,
            "deviation": r.final_deviation(),
            "monotone_tail": r.monotone_tail,
        }));
        checks.push(Check::new(
            5,
            format!("ratio.deviation[s={},alpha={}]", r.s, r.alpha),
            r.final_deviation(),
            Bound::AtMost(RATIO_TOLERANCE),
        ));
    }
    // Placement dependence: the limits at s = 1/4 and s = 3/4 must differ.
    for &alpha in Settings::list(&s.alpha) {
        let limit = |p: f64| {
            reports
                .iter()
                .find(|r| r.s == p && r.alpha == alpha)
                .and_then(|r| r.ratios.last().copied())
        };
        if let (Some(quarter), Some(three_quarters)) = (limit(0.25), limit(0.75)) {
            let gap = (quarter - three_quarters).abs();
            results.push(json!({ "alpha": alpha, "placement_gap": gap }));
            checks.push(Check::new(
                5,
                format!("ratio.placement_gap[alpha={alpha}]"),
                gap,
                Bound::Above(PLACEMENT_GAP),
            ));
        }
    }
    Ok(Outcome {
        settings: s.clone(),
        table,
        results,
        checks,
    })
}

/// Riemann-Liouville magnitudes at the placed point and their ratios.
pub fn rl_divergence(s: &Settings) -> CliResult<Outcome> {
    let center = s.center.expect("window studies carry a center");
    let path = SinePath::draw_until(&mut rng(s.seed, StudyKind::RlDivergence), |p| {
        p.value(0, center).abs() >= HYPOTHESIS_MARGIN
    });
    let x = host_path(path)?;
    let cases = cases(s);
    let reports = cases
        .par_iter()
        .map(|&(placement, alpha)| {
            Ok(rl_divergence_diagnostic(
                &x,
                FractionalOrder::new(alpha)?,
                &family(s, placement)?,
            )?)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(&["s", "alpha", "placement", "width"]);
    let mut results = vec![json!({ "path": path })];
    let mut checks = Vec::new();
    for r in &reports {
        for (i, w) in r.widths.iter().enumerate() {
            let echo = || vec![r.s.into(), r.alpha.into(), r.s.into(), (*w).into()];
            table.push(echo(), "left_rl_magnitude", r.left_magnitudes[i], None);
            table.push(echo(), "right_rl_magnitude", r.right_magnitudes[i], None);
        }
        for p in &r.placements {
            for (w, ratio) in r.widths.iter().zip(&p.ratios) {
                table.push(
                    vec![r.s.into(), r.alpha.into(), p.s.into(), (*w).into()],
                    "left_right_rl_ratio",
                    *ratio,
                    Some(p.predicted),
                );
            }
        }
        let tag = format!("s={},alpha={}", r.s, r.alpha);
        let target = -r.alpha;
        let left = r.left_exponent.unwrap_or(f64::NAN);
        let right = r.right_exponent.unwrap_or(f64::NAN);
        let within = Bound::Within {
            target,
            tolerance: EXPONENT_TOLERANCE,
        };
        checks.push(Check::new(
            6,
            format!("rl.left_exponent[{tag}]"),
            left,
            within,
        ));
        checks.push(Check::new(
            6,
            format!("rl.right_exponent[{tag}]"),
            right,
            within,
        ));
        let mut placements = Vec::new();
        for p in &r.placements {
            let last = *p.ratios.last().expect("families are non-empty");
            let rel = ((last - p.predicted) / p.predicted).abs();
            placements.push(
                json!({ "s": p.s, "predicted": p.predicted, "measured": last, "rel_err": rel }),
            );
            checks.push(Check::new(
                6,
                format!("rl.ratio_rel_err[{tag},placement={}]", p.s),
                rel,
                Bound::AtMost(RL_RATIO_TOLERANCE),
            ));
        }
        results.push(json!({
            "s": r.s,
            "alpha": r.alpha,
            "left_exponent": left,
            "right_exponent": right,
            "predicted_exponent": target,
            "placements": placements,
        }));
    }
    Ok(Outcome {
        settings: s.clone(),
        table,
        results,
        checks,
    })
}
