use gmch_core::evolution::*;
use gmch_core::flow::*;
use gmch_core::profiles::*;
use gmch_core::spectral::{helmholtz_solve, GridFunction, GridSpec};
use gmch_core::Model;

fn grid(n: usize) -> GridSpec {
    GridSpec::new(25.0, n).unwrap()
}

/// Positive Gaussian momentum; it steepens, and stays resolved at N = 2048
/// only up to about t = 1.5.
fn smooth_data(g: &GridSpec) -> GridFunction {
    let y0 = GridFunction::from_fn(g.clone(), |x: f64| (-x * x).exp()).unwrap();
    helmholtz_solve(&y0)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn zero_data_stays_zero() {
    let g = grid(256);
    let s = Solver::new(SolverConfig::new(2, g.clone())).unwrap();
    let u = GridFunction::zeros(g);
    assert!(s.rhs(&u).unwrap().samples().iter().all(|&v| v == 0.0));
    let r = s.run(u, &mut []).unwrap();
    assert!(r.final_state.u.samples().iter().all(|&v| v == 0.0));
    for rec in &r.records {
        assert_eq!((rec.e, rec.f, rec.m, rec.lhs_3_5), (0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn rhs_for_mch_matches_hand_written_form() {
    // n = 1: u_t = −(u² − u_x²/3)u_x − ∂p∗(2u³/3 + u u_x²) − p∗(u_x³/3).
    let g = grid(1024);
    let u = smooth_data(&g);
    let s = Solver::new(SolverConfig::new(1, g.clone())).unwrap();
    let (a, b) = (u.samples(), u.ux());
    let local: Vec<f64> = a.iter().zip(b).map(|(u, ux)| (u * u - ux * ux / 3.0) * ux).collect();
    let even = GridFunction::new(g.clone(), a.iter().zip(b).map(|(u, ux)| 2.0 * u.powi(3) / 3.0 + u * ux * ux).collect()).unwrap();
    let odd = GridFunction::new(g.clone(), b.iter().map(|ux| ux.powi(3) / 3.0).collect()).unwrap();
    let pe = helmholtz_solve(&even);
    let po = helmholtz_solve(&odd);
    let pe_x = pe.ux();
    let expected: Vec<f64> = (0..g.len()).map(|j| -(local[j] + pe_x[j] + po.samples()[j])).collect();
    let got = s.rhs(&u).unwrap();
    // The solver dealiases, the hand form does not; the data are resolved
    // well inside the two-thirds band.
    assert!(max_diff(got.samples(), &expected) < 1e-12);
    let m = Model::new(1).unwrap();
    assert_eq!(m.transport(), &[1.0 / 3.0]);
    assert_eq!(m.nonlocal(), &[1.0]);
    assert!((m.odd_nonlocal() - 2.0 / 3.0).abs() < 1e-16);
}

#[test]
fn one_step_is_reversible() {
    let g = grid(4096);
    let u0 = smooth_data(&g);
    for n in 1..=3 {
        let s = Solver::new(SolverConfig::new(n, g.clone())).unwrap();
        let dt = s.stable_dt(&u0);
        let st = SolverState::initial(u0.clone());
        let back = s.step_with_dt(&s.step_with_dt(&st, dt).unwrap(), -dt).unwrap();
        assert!(max_diff(back.u.samples(), u0.samples()) <= 1e-10);
    }
}

#[test]
fn smooth_data_conserve_e_and_f() {
    let g = grid(1 << 12);
    let u0 = smooth_data(&g);
    for n in 1..=3 {
        let mut c = SolverConfig::new(n, g.clone());
        c.observe_every = 2;
        let r = Solver::new(c).unwrap().run(u0.clone(), &mut []).unwrap();
        assert_eq!(r.final_state.t, 1.0);
        let (de, df) = relative_drifts(&r.records);
        assert!(de <= 1e-8 && df <= 1e-8, "n={n}: dE={de:e} dF={df:e}");
    }
}

#[test]
fn wide_mollified_peakon_conserves_over_five_time_units() {
    let g = grid(1 << 12);
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let moll = MollifierSpec::for_peakon(&p, 2.0, MollifierShape::Gaussian).unwrap();
    let d = mollified_peakon(&p, &moll, &g).unwrap();
    let mut c = SolverConfig::new(1, g);
    c.t_end = 5.0;
    c.observe_every = 5;
    let r = Solver::new(c).unwrap().run(d.u, &mut []).unwrap();
    let (de, df) = relative_drifts(&r.records);
    assert!(de <= 1e-6 && df <= 1e-4, "dE={de:e} dF={df:e}");
}

#[test]
fn spatial_convergence_against_fine_reference() {
    // Fixed dt so the comparison isolates the spatial error.
    let run = |nn: usize| {
        let g = grid(nn);
        let s = Solver::new(SolverConfig::new(1, g.clone())).unwrap();
        let mut st = SolverState::initial(smooth_data(&g));
        for _ in 0..100 {
            st = s.step_with_dt(&st, 0.01).unwrap();
        }
        st.u.into_samples()
    };
    let reference = run(1 << 13);
    let mut prev = f64::INFINITY;
    for nn in [128usize, 256, 512, 1024, 2048] {
        let u = run(nn);
        let stride = (1 << 13) / nn;
        let err = (0..nn).map(|j| (u[j] - reference[j * stride]).abs()).fold(0.0, f64::max);
        if prev > 1e-12 {
            assert!(prev / err >= 4.0, "N={nn}: {prev:e} -> {err:e}");
        }
        prev = err;
    }
    assert!(prev < 1e-12);
}

/// Mollified peakon of width 2: wide enough to stay resolved for t ≤ 5.
fn wide_peakon(n: u32, g: &GridSpec) -> GridFunction {
    let p = PeakonParams::from_amplitude(n, 1.0).unwrap();
    let moll = MollifierSpec::for_peakon(&p, 2.0, MollifierShape::Gaussian).unwrap();
    mollified_peakon(&p, &moll, g).unwrap().u
}

#[test]
fn positive_momentum_keeps_its_sign() {
    let g = grid(4096);
    for n in 1..=3 {
        let mut runs = Vec::new();
        let mut c = SolverConfig::new(n, g.clone());
        runs.push(Solver::new(c.clone()).unwrap().run(smooth_data(&g), &mut []).unwrap());
        c.t_end = 5.0;
        runs.push(Solver::new(c).unwrap().run(wide_peakon(n, &g), &mut []).unwrap());
        for rec in runs.iter().flat_map(|r| &r.records) {
            assert!(rec.min_y >= -1e-8, "n={n} t={} min y={}", rec.t, rec.min_y);
            assert!(rec.min_u_pm_ux >= -1e-8);
            assert!(rec.lhs_3_5 <= 1e-6 * rec.f.max(1.0));
        }
    }
}

#[test]
fn underresolved_runs_abort_with_last_state() {
    let g = grid(1024);
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let moll = MollifierSpec::for_peakon(&p, 0.2, MollifierShape::Gaussian).unwrap();
    let d = mollified_peakon(&p, &moll, &g).unwrap();
    let mut c = SolverConfig::new(1, g);
    c.resolution_tolerance = Some(1e-10);
    let err = Solver::new(c).unwrap().run(d.u, &mut []).unwrap_err();
    assert_eq!(err.reason, BlowUpReason::Underresolved);
    assert!(err.t < 1.0);
    assert_eq!(err.last.t, err.t);
    assert!(err.last.u.samples().iter().all(|v| v.is_finite()));
    assert_eq!(err.records[0].t, 0.0);
}

#[test]
fn invalid_configs_are_rejected() {
    let g = grid(256);
    assert!(Solver::new(SolverConfig::new(0, g.clone())).is_err());
    let mut c = SolverConfig::new(1, g.clone());
    c.cfl = 0.0;
    assert!(Solver::new(c).is_err());
    let mut c = SolverConfig::new(1, g);
    c.observe_every = 0;
    assert!(Solver::new(c).is_err());
}

#[test]
fn padded_dealiasing_agrees_on_resolved_data() {
    let g = grid(1024);
    let u0 = smooth_data(&g);
    for n in 1..=3 {
        let two = Solver::new(SolverConfig::new(n, g.clone())).unwrap();
        let mut c = SolverConfig::new(n, g.clone());
        c.dealias = Dealias::Padded;
        let pad = Solver::new(c).unwrap();
        let a = two.rhs(&u0).unwrap();
        let b = pad.rhs(&u0).unwrap();
        assert!(max_diff(a.samples(), b.samples()) < 1e-12);
    }
}

fn recorded(n: u32, g: &GridSpec, u0: GridFunction, t_end: f64) -> Trajectory {
    let mut c = SolverConfig::new(n, g.clone());
    c.t_end = t_end;
    let s = Solver::new(c).unwrap();
    let mut rec = TrajectoryRecorder::new(&s);
    s.run(u0, &mut [&mut rec]).unwrap();
    rec.finish()
}

#[test]
fn characteristics_of_zero_data_are_fixed() {
    let g = grid(256);
    let traj = recorded(1, &g, GridFunction::zeros(g.clone()), 0.5);
    let path = flow_map(&traj, 1.5).unwrap();
    assert!(path.iter().all(|s| s.q == 1.5 && s.q_x == 1.0 && s.y_at_q == 0.0));
    assert_eq!(check_momentum_transport(&[(0.0, path)], 1e-3), 0.0);
}

#[test]
fn crest_moves_at_the_effective_speed() {
    let g = grid(2048);
    let p = PeakonParams::from_amplitude(2, 1.0).unwrap();
    let moll = MollifierSpec::for_peakon(&p, 1.0, MollifierShape::Gaussian).unwrap();
    let d = mollified_peakon(&p, &moll, &g).unwrap();
    let traj = recorded(2, &g, d.u.clone(), 0.2);
    let path = flow_map(&traj, 0.0).unwrap();
    let m = d.u.value_at(0.0);
    let speed = (path[1].q - path[0].q) / (path[1].t - path[0].t);
    assert!((speed - m.powi(4)).abs() < 1e-3 * m.powi(4));
}

#[test]
fn momentum_is_transported_along_a_monotone_fan() {
    let g = grid(4096);
    let u0 = wide_peakon(1, &g);
    let traj = recorded(1, &g, u0.clone(), 2.0);
    let mut paths = Vec::new();
    let mut fan = Vec::new();
    for i in 0..16 {
        let x0 = -6.0 + 0.8 * i as f64;
        let path = flow_map(&traj, x0).unwrap();
        assert!(path.iter().all(|s| s.q_x > 0.0));
        let (u, _, uxx) = u0.interpolate(x0);
        paths.push((u - uxx, path.clone()));
        fan.push(path);
    }
    assert!(fan_is_monotone(&fan));
    let worst = check_momentum_transport(&paths, 1e-6);
    assert!(worst <= 1e-3, "{worst:e}");
}

#[test]
fn momentum_zeros_are_preserved() {
    let g = grid(2048);
    let y0 = GridFunction::from_fn(g.clone(), |x: f64| 2.0 * x * x * (-x * x).exp()).unwrap();
    let u0 = helmholtz_solve(&y0);
    let traj = recorded(1, &g, u0, 2.0);
    let path = flow_map(&traj, 0.0).unwrap();
    assert!(path.iter().all(|s| s.y_at_q.abs() <= 1e-8), "{:?}", path.last());
}

#[test]
fn tendency_approaches_rigid_translation_as_width_shrinks() {
    let g = grid(1 << 13);
    for n in 1..=2 {
        let p = PeakonParams::from_amplitude(n, 1.0).unwrap();
        let s = Solver::new(SolverConfig::new(n, g.clone())).unwrap();
        let mut prev = f64::INFINITY;
        for delta in [0.4, 0.2, 0.1, 0.05] {
            let moll = MollifierSpec::for_peakon(&p, delta, MollifierShape::Gaussian).unwrap();
            let u = mollified_peakon(&p, &moll, &g).unwrap().u;
            let rhs = s.rhs(&u).unwrap();
            // Relative to ‖c·u_x‖ on the core: wide data are small, so the
            // absolute deviation is not monotone there.
            let core = |f: &dyn Fn(usize) -> f64| {
                let v: Vec<f64> = (0..g.len()).map(|j| if g.x(j).abs() <= 5.0 { f(j).powi(2) } else { 0.0 }).collect();
                g.integrate(&v).sqrt()
            };
            let l2 = core(&|j| rhs.samples()[j] + p.c() * u.ux()[j]) / core(&|j| p.c() * u.ux()[j]);
            assert!(l2 < prev, "n={n} δ={delta}: {l2:e} after {prev:e}");
            prev = l2;
        }
    }
}
