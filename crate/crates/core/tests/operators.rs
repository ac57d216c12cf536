use fracvar_core::convergence::observed_order;
use fracvar_core::fracops::{
    apply, caputo_derivative, caputo_profile, compose_rl_after_caputo_half, gamma,
    integration_by_parts_defect, ordinary_integral, rl_derivative, rl_integral, rl_integral_output,
    OperatorValue,
};
use fracvar_core::{
    AnalyticPack, FracError, FractionalOrder, Grid, OperatorKind, PolynomialPath, Side, Trajectory,
};
use proptest::prelude::*;

fn power(grid: Grid, beta: usize) -> Trajectory {
    let mut c = vec![0.0; beta + 1];
    c[beta] = 1.0;
    Trajectory::from_path(grid, PolynomialPath::new(grid.a(), c)).unwrap()
}

fn cubic(grid: Grid, c: [f64; 4]) -> Trajectory {
    Trajectory::from_fn(grid, |t| c[0] + t * (c[1] + t * (c[2] + t * c[3]))).unwrap()
}

fn value(v: OperatorValue) -> f64 {
    v.value().expect("finite operator value")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_operator_is_linear(
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        p in prop::array::uniform4(-2.0f64..2.0),
        q in prop::array::uniform4(-2.0f64..2.0),
        alpha in 0.05f64..0.95,
        n in 9usize..80,
        node in 1usize..1000,
    ) {
        let grid = Grid::new(-0.5, 1.0, n).unwrap();
        let order = FractionalOrder::new(alpha).unwrap();
        let x1 = cubic(grid, p);
        let x2 = cubic(grid, q);
        let mix = Trajectory::linear_combination(c1, &x1, c2, &x2).unwrap();
        let t = grid.node(1 + node % (n - 2));
        for kind in OperatorKind::ALL {
            let lhs = value(apply(kind, &mix, order, t).unwrap());
            let rhs = c1 * value(apply(kind, &x1, order, t).unwrap())
                + c2 * value(apply(kind, &x2, order, t).unwrap());
            let scale = 1.0 + lhs.abs() + rhs.abs();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * scale, "{kind:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn right_operators_mirror_left_ones(
        p in prop::array::uniform4(-2.0f64..2.0),
        alpha in 0.05f64..0.95,
        n in 5usize..80,
        node in 0usize..1000,
        with_pack in any::<bool>(),
    ) {
        let grid = Grid::new(0.25, 2.0, n).unwrap();
        let order = FractionalOrder::new(alpha).unwrap();
        let x = if with_pack {
            Trajectory::from_path(grid, PolynomialPath::new(0.0, p.to_vec())).unwrap()
        } else {
            cubic(grid, p)
        };
        let mirror = x.reflected();
        let k = node % n;
        let (t, tr) = (grid.node(k), grid.node(n - 1 - k));
        for kind in OperatorKind::ALL.into_iter().filter(|k| k.side == Side::Right) {
            let left = OperatorKind::new(Side::Left, kind.family);
            let r = apply(kind, &x, order, t).unwrap();
            let l = apply(left, &mirror, order, tr).unwrap();
            prop_assert_eq!(r, l);
        }
    }

    #[test]
    fn caputo_annihilates_constants_exactly(c in -1e3f64..1e3, alpha in 0.05f64..0.95, n in 3usize..60) {
        let grid = Grid::new(0.0, 1.0, n).unwrap();
        let pack = AnalyticPack::from_fns(vec![Box::new(move |_| c), Box::new(|_| 0.0)]);
        let x = Trajectory::from_pack(grid, pack).unwrap();
        let order = FractionalOrder::new(alpha).unwrap();
        for side in [Side::Left, Side::Right] {
            for v in caputo_profile(&x, order, side).unwrap() {
                prop_assert_eq!(v.to_bits(), 0.0f64.to_bits());
            }
        }
    }
}

#[test]
fn spec_examples() {
    let g = Grid::new(0.0, 1.0, 129).unwrap();
    let id = power(g, 1);
    let half = FractionalOrder::HALF;
    let pi_sqrt = std::f64::consts::PI.sqrt();
    assert!(
        (rl_integral(&id, half, Side::Left, 1.0).unwrap() - 4.0 / (3.0 * pi_sqrt)).abs() < 1e-12
    );
    assert!((caputo_derivative(&id, half, Side::Left, 1.0).unwrap() - 2.0 / pi_sqrt).abs() < 1e-12);
    assert!(
        (caputo_derivative(&id, half, Side::Right, 0.0).unwrap() + 2.0 / pi_sqrt).abs() < 1e-12
    );
    let one = Trajectory::from_fn(g, |_| 1.0).unwrap();
    assert!(
        (value(rl_derivative(&one, half, Side::Left, 1.0).unwrap()) - 1.0 / pi_sqrt).abs() < 1e-14
    );
    assert!((ordinary_integral(&one, Side::Left, 0.5).unwrap() - 0.5).abs() < 1e-15);
    let zero = Trajectory::from_fn(g, |_| 0.0).unwrap();
    assert_eq!(rl_integral(&zero, half, Side::Left, 0.5).unwrap(), 0.0);
    assert_eq!(
        value(rl_derivative(&zero, half, Side::Right, 0.5).unwrap()),
        0.0
    );
    assert!((gamma(2.5).unwrap() - 0.75 * pi_sqrt).abs() < 1e-12);
}

#[test]
fn endpoint_divergence_and_bad_arguments() {
    let g = Grid::new(0.0, 1.0, 33).unwrap();
    let one = Trajectory::from_fn(g, |_| -2.0).unwrap();
    let half = FractionalOrder::HALF;
    assert_eq!(
        rl_derivative(&one, half, Side::Left, 0.0).unwrap(),
        OperatorValue::Divergent { sign: -1.0 }
    );
    assert!(rl_derivative(&one, half, Side::Right, 1.0)
        .unwrap()
        .is_divergent());
    assert!(matches!(
        rl_derivative(&one, half, Side::Left, 0.0)
            .unwrap()
            .finite(0.0, -2.0),
        Err(FracError::Singular { .. })
    ));
    assert!(matches!(
        rl_integral(&one, half, Side::Left, 1.5),
        Err(FracError::Argument(_))
    ));
    assert!(matches!(
        rl_integral(&one, half, Side::Left, 0.51),
        Err(FracError::Argument(_))
    ));
    assert!(FractionalOrder::new(1.0).is_err());
    assert!(Grid::new(0.0, 1.0, 2).is_err());
}

/// Power-law oracle at n = 4097 on checkpoint nodes away from `a`, both with
/// the analytic derivative and with differences only.
#[test]
fn power_law_oracle() {
    let g = Grid::new(0.0, 1.0, 4097).unwrap();
    for alpha in [0.25, 0.5, 0.75] {
        let order = FractionalOrder::new(alpha).unwrap();
        for beta in [1usize, 2, 3] {
            let b = beta as f64;
            let x = power(g, beta);
            for traj in [x.clone(), x.samples_only()] {
                for t in [0.25f64, 0.5, 0.75, 1.0] {
                    let up = gamma(b + 1.0).unwrap() / gamma(b + alpha + 1.0).unwrap()
                        * t.powf(b + alpha);
                    let down = gamma(b + 1.0).unwrap() / gamma(b - alpha + 1.0).unwrap()
                        * t.powf(b - alpha);
                    let j = rl_integral(&traj, order, Side::Left, t).unwrap();
                    let d = value(rl_derivative(&traj, order, Side::Left, t).unwrap());
                    let c = caputo_derivative(&traj, order, Side::Left, t).unwrap();
                    assert!(((j - up) / up).abs() <= 1e-4, "J α={alpha} β={beta} t={t}");
                    assert!(
                        ((d - down) / down).abs() <= 1e-4,
                        "D α={alpha} β={beta} t={t}"
                    );
                    assert!(
                        ((c - down) / down).abs() <= 1e-4,
                        "C α={alpha} β={beta} t={t}"
                    );
                }
            }
        }
    }
}

#[test]
fn rl_derivative_of_one_at_interior_nodes() {
    let g = Grid::new(0.0, 1.0, 257).unwrap();
    let one = Trajectory::from_fn(g, |_| 1.0).unwrap();
    for alpha in [0.25, 0.5, 0.75] {
        let order = FractionalOrder::new(alpha).unwrap();
        for k in 1..g.len() {
            let t = g.node(k);
            let want = t.powf(-alpha) / gamma(1.0 - alpha).unwrap();
            let got = value(rl_derivative(&one, order, Side::Left, t).unwrap());
            assert!(((got - want) / want).abs() <= 1e-6);
        }
    }
}

fn study_grids() -> Vec<Grid> {
    [65, 129, 257, 513, 1025]
        .iter()
        .map(|&n| Grid::new(0.0, 1.0, n).unwrap())
        .collect()
}

#[test]
fn semigroup_and_composition_orders() {
    let grids = study_grids();
    let h: Vec<f64> = grids.iter().map(Grid::step).collect();
    let mut semigroup = Vec::new();
    let mut composition = Vec::new();
    for g in &grids {
        let x = Trajectory::from_fn(*g, |t| (2.0 * t + 0.3).sin()).unwrap();
        let inner = rl_integral_output(&x, FractionalOrder::HALF, Side::Left).unwrap();
        let twice = rl_integral(&inner, FractionalOrder::HALF, Side::Left, 1.0).unwrap();
        semigroup.push((twice - ordinary_integral(&x, Side::Left, 1.0).unwrap()).abs());
        let c = compose_rl_after_caputo_half(&x, 0.5).unwrap();
        composition.push((c - 2.0 * 1.3f64.cos()).abs());
    }
    assert!(observed_order(&h, &semigroup).unwrap() >= 1.4);
    assert!(observed_order(&h, &composition).unwrap() >= 1.4);
}

#[test]
fn integration_by_parts() {
    let half = FractionalOrder::HALF;
    let g = Grid::new(0.0, 1.0, 2049).unwrap();
    let x = Trajectory::from_fn(g, |t| t * (1.0 - t)).unwrap();
    let y = Trajectory::from_fn(g, |_| 1.0).unwrap();
    assert!(integration_by_parts_defect(&y, &x, half).unwrap() <= 1e-3);
    let zero = Trajectory::from_fn(g, |_| 0.0).unwrap();
    assert_eq!(integration_by_parts_defect(&y, &zero, half).unwrap(), 0.0);
    assert!(matches!(
        integration_by_parts_defect(&y, &y, half),
        Err(FracError::Precondition(_))
    ));

    let grids = study_grids();
    let h: Vec<f64> = grids.iter().map(Grid::step).collect();
    let defects: Vec<f64> = grids
        .iter()
        .map(|g| {
            let x = Trajectory::from_fn(*g, |t| (std::f64::consts::PI * t).sin()).unwrap();
            let y = Trajectory::from_fn(*g, |t| t).unwrap();
            integration_by_parts_defect(&y, &x, half).unwrap()
        })
        .collect();
    assert!(defects.windows(2).all(|p| p[1] < p[0]));
    assert!(observed_order(&h, &defects).unwrap() >= 1.4);
}

/// Order of the product rule on a smooth path, against closed forms.
#[test]
fn quadrature_order_on_smooth_paths() {
    let grids = study_grids();
    let h: Vec<f64> = grids.iter().map(Grid::step).collect();
    for alpha in [0.25, 0.5, 0.75] {
        let order = FractionalOrder::new(alpha).unwrap();
        let errors: Vec<f64> = grids
            .iter()
            .map(|g| {
                // x = t^4: the closed form isolates the quadrature error.
                let x = power(*g, 4);
                let want = 24.0 / gamma(5.0 - alpha).unwrap();
                (caputo_derivative(&x, order, Side::Left, 1.0).unwrap() - want).abs()
            })
            .collect();
        assert!(
            observed_order(&h, &errors).unwrap() >= 2.0 - alpha - 0.1,
            "α = {alpha}"
        );
    }
}
