use approx::assert_relative_eq;
use proptest::prelude::*;
use radhydro_core::driver::{composite_l1_error, sample_reference, time_loop};
use radhydro_core::hyperbolic::{additive_combine, HydroBoundaries, HydroBoundary};
use radhydro_core::parabolic::{parabolic_step, ParabolicConfig, RadiationBoundaries};
use radhydro_core::riemann_rad::{solve_mirrored, solve_p_star, RadCase, RadRiemannInput, RadSide};
use radhydro_core::scenarios::{build_scenario, UnitConstants};
use radhydro_core::thermo::check_admissible;
use radhydro_core::{build_ops, FullState, Mesh1D, OpacityLaw, ReferenceProfile, RunConfig, ScenarioId};

#[test]
fn every_scenario_starts_admissible_and_steps_conservatively() {
    for id in ScenarioId::ALL {
        let scenario = build_scenario(id, 65, None).unwrap();
        for s in &scenario.initial {
            assert!(check_admissible(s, &scenario.params).in_a, "{id}: {s:?}");
        }
        let cfg = RunConfig {
            max_steps: 20,
            check_idp: true,
            ..RunConfig::for_scenario(&scenario)
        };
        let mut steps = 0;
        let out = time_loop(&scenario, &cfg, |d, _| {
            steps += 1;
            assert!(d.dt > 0.0 && d.theta >= 0.0 && d.theta <= 1.0);
            assert!(d.rho_min > 0.0 && d.t_min > 0.0 && d.er_min > 0.0);
            Ok(())
        })
        .unwrap();
        assert_eq!(out.steps, steps);
        assert!(out.max_drift.max_component() <= 1e-11, "{id}: {:?}", out.max_drift);
    }
}

#[test]
fn state_at_rest_in_equilibrium_is_a_fixed_point() {
    let params = UnitConstants::STANDARD.params(OpacityLaw::Constant { sigma: 50.0 });
    let mesh = Mesh1D::new(vec![0.0, 0.1, 0.15, 0.4, 0.45, 1.0]).unwrap();
    let ops = build_ops(&mesh);
    let t = 0.3;
    let state = FullState::from_primitive(2.0, 0.0, t, params.a_r * t.powi(4), &params);
    let u = vec![state; mesh.len()];
    let step = additive_combine(&u, &ops, &params, 1.0, &HydroBoundaries::both(HydroBoundary::Slip), None).unwrap();
    let out = parabolic_step(
        &step.u_h,
        &[t; 6],
        &mesh,
        &ops.mass,
        &RadiationBoundaries::NEUMANN,
        &params,
        step.dt,
        &ParabolicConfig::default(),
    )
    .unwrap();
    for (s, temperature) in out.u.iter().zip(&out.temperature) {
        assert_relative_eq!(s.rho, 2.0, max_relative = 1e-14);
        assert!(s.mom.abs() <= 1e-14);
        assert_relative_eq!(s.e_rad, state.e_rad, max_relative = 1e-12);
        assert_relative_eq!(*temperature, t, max_relative = 1e-12);
    }
}

#[test]
fn reference_written_from_a_run_reproduces_it() {
    let scenario = build_scenario(ScenarioId::Marshak, 33, None).unwrap();
    let cfg = RunConfig {
        t_final: 1e-3,
        ..RunConfig::for_scenario(&scenario)
    };
    let out = time_loop(&scenario, &cfg, |_, _| Ok(())).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reference.csv");
    ReferenceProfile::from_field(&scenario.mesh, &out.u, &scenario.params).write(&path).unwrap();
    let profile = ReferenceProfile::load(&path).unwrap();
    let sampled = sample_reference(&profile, &scenario.mesh, &scenario.params);
    let error = composite_l1_error(&out.u, &sampled, &scenario.mesh).unwrap();
    assert!(error <= 1e-14, "{error}");
}

fn side() -> impl Strategy<Value = RadSide> {
    (-3.0f64..3.0, -20.0f64..20.0, -6.0f64..3.0).prop_map(|(lr, v, lp)| RadSide {
        rho: 10f64.powf(lr),
        v,
        p: 10f64.powf(lp),
    })
}

proptest! {
    #[test]
    fn contact_pressure_zeroes_the_pressure_function(left in side(), right in side()) {
        let input = RadRiemannInput { left, right };
        let sol = solve_p_star(&input);
        if sol.case == RadCase::Vacuum {
            prop_assert_eq!(sol.p_star, 0.0);
            prop_assert!(input.phi(0.0) >= 0.0);
        } else {
            let scale = (input.right.v - input.left.v).abs()
                + (12.0 * left.p / left.rho).sqrt()
                + (12.0 * right.p / right.rho).sqrt();
            prop_assert!(input.phi(sol.p_star).abs() <= 1e-10 * scale);
        }
        prop_assert!(sol.lambda_l_minus <= 0.0 && sol.lambda_r_plus >= 0.0);
        let mirrored = solve_mirrored(&input);
        prop_assert!((mirrored.p_star - sol.p_star).abs() <= 1e-12 * sol.p_star.max(1e-300));
        prop_assert!((mirrored.mu_max - sol.mu_max).abs() <= 1e-12 * sol.mu_max);
    }
}
