use proptest::prelude::*;

use gqd_core::closed_form::{
    bdd_closed, bures_monotone_threshold, critical_points, discord_closed, discord_dq, monotonicity_class,
};
use gqd_core::discord::{
    bdd_fidelity_max, hdd_bruteforce, hdd_eigen, tdd_bruteforce, tdd_x_state, MeasurementDirection, ZeroDiscordState,
};
use gqd_core::flow::{classify_cell, kraus_consistency_check, two_qubit_state};
use gqd_core::linalg::{hermitian_eigen, kron, matrix_sqrt_psd, trace_norm};
use gqd_core::reservoir::{kernel, lorentzian_dq_dt, lorentzian_gamma_analytic, lorentzian_q_analytic, KernelFunction};
use gqd_core::sweep::config::{Format, Mode, RunConfig, SweepRange};
use gqd_core::sweep::crosscheck::kernel_quadrature_check;
use gqd_core::sweep::{compute, trajectory};
use gqd_core::tolerances::FLOW_DEADBAND;
use gqd_core::volterra::{derive_rates, solve};
use gqd_core::{
    Category, ComplexMatrix, DensityMatrix, Enhancement, Exec, GammaSign, InitialState, Measure, Monotonicity,
    SolverConfig, SpectralModel, C64,
};

fn complex_entries(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

fn general(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(dim).prop_map(move |v| ComplexMatrix::from_vec(dim, v))
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    general(dim).prop_map(|a| (&a + &a.adjoint()).scale_real(0.5))
}

fn unitary(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(dim).prop_map(|h| hermitian_eigen(&h).unwrap().eigenvectors)
}

/// `A A^dagger / Tr` with `A` of random rank.
fn density4() -> impl Strategy<Value = DensityMatrix> {
    (general(4), 1usize..=4).prop_map(|(a, rank)| {
        let mut v = a.as_slice().to_vec();
        for row in 0..4 {
            for col in rank..4 {
                v[row * 4 + col] = C64::new(0.0, 0.0);
            }
        }
        let a = ComplexMatrix::from_vec(4, v);
        DensityMatrix::normalized(&a * &a.adjoint()).unwrap()
    })
}

fn ball() -> impl Strategy<Value = [f64; 3]> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(r, th, ph)| [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()])
}

fn zero_discord() -> impl Strategy<Value = DensityMatrix> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU, ball(), ball()).prop_map(
        |(p1, th, ph, b1, b2)| {
            let dir = MeasurementDirection::new(th, ph).unwrap();
            ZeroDiscordState::new(p1, dir, b1, b2).unwrap().density().unwrap()
        },
    )
}

fn family() -> impl Strategy<Value = (InitialState, f64)> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a2, q)| (InitialState::new(a2).unwrap(), q))
}

fn identity_defect(v: &ComplexMatrix) -> f64 {
    (&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(v.dim()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigen_reconstructs_hermitian(m in prop_oneof![hermitian(2), hermitian(4)]) {
        let es = hermitian_eigen(&m).unwrap();
        prop_assert!(es.reconstruct().max_abs_diff(&m) < 1e-10);
        prop_assert!(identity_defect(&es.eigenvectors) < 1e-10);
        prop_assert!(es.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sqrt_squares_back(rho in density4()) {
        let r = matrix_sqrt_psd(&rho).unwrap();
        prop_assert!((&r * &r).max_abs_diff(rho.matrix()) < 1e-9);
        prop_assert!(hermitian_eigen(&r).unwrap().eigenvalues.iter().all(|&x| x > -1e-10));
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(m in general(4), h in hermitian(4), u in unitary(4), v in unitary(4)) {
        let moved = &(&u * &m) * &v;
        prop_assert!((trace_norm(&moved) - trace_norm(&m)).abs() < 1e-9);
        let conj = &(&u * &h) * &u.adjoint();
        prop_assert!((trace_norm(&conj) - trace_norm(&h)).abs() < 1e-9);
    }

    #[test]
    fn hellinger_and_bures_vanish_on_zero_discord_states(rho in zero_discord()) {
        prop_assert!(hdd_eigen(&rho).unwrap() < 1e-6);
        prop_assert!(bdd_fidelity_max(&rho, 64).unwrap() < 1e-6);
    }

    #[test]
    fn kraus_matches_direct_state((state, _) in family(), r in 0.0f64..=1.0, phase in 0.0f64..std::f64::consts::TAU) {
        let p = C64::from_polar(r.sqrt(), phase);
        prop_assert!(kraus_consistency_check(state, p).unwrap() < 1e-10);
    }

    #[test]
    fn lorentzian_survival_stays_in_unit_interval(lambda in 0.01f64..5.0, t in 0.0f64..60.0) {
        let q = lorentzian_q_analytic(&SpectralModel::lorentzian(1.0, lambda), t).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn decay_rate_is_log_derivative(lambda in 0.05f64..3.0, t in 0.05f64..6.0) {
        let model = SpectralModel::lorentzian(1.0, lambda);
        let h = 1e-5;
        let q = |t: f64| lorentzian_q_analytic(&model, t).unwrap();
        prop_assume!(q(t - h) > 1e-3 && q(t + h) > 1e-3);
        let fd = -(q(t + h).ln() - q(t - h).ln()) / (2.0 * h);
        prop_assert!((lorentzian_gamma_analytic(&model, t).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn trace_distance_enhanced_exactly_under_backflow(
        a2 in 0.001f64..0.999,
        q in 1e-6f64..(1.0 - 1e-6),
        rate in 1e-8f64..10.0,
        up in any::<bool>(),
    ) {
        let dq = if up { rate } else { -rate };
        let (sign, enh) = classify_cell(InitialState::new(a2).unwrap(), q, dq, FLOW_DEADBAND);
        prop_assert_eq!(enh.tdd == Enhancement::Enhanced, sign == GammaSign::Negative);
    }

    #[test]
    fn every_defined_cell_gets_one_category(a2 in 0.0f64..=1.0, q in -0.1f64..1.1, dq in -10.0f64..10.0) {
        let state = InitialState::new(a2).unwrap();
        let cell = gqd_core::flow::flow_cell(state, 0.0, 1.0, q, dq);
        for m in Measure::ALL {
            let c = cell.category.get(m);
            prop_assert_eq!(c == Category::Undefined, cell.gamma_sign == GammaSign::Undefined);
            prop_assert_eq!(c, Category::of(cell.gamma_sign, cell.enhancement(m)));
        }
    }
}

fn near_boundary(state: InitialState, q: f64) -> bool {
    let cp = critical_points(state);
    [cp.qc1, cp.qc2, cp.qc3, cp.qc4, cp.qc5, cp.qc6, Some(0.0), Some(0.5), Some(1.0)]
        .into_iter()
        .flatten()
        .any(|c| (q - c).abs() < 1e-4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn monotonicity_matches_finite_difference(a2 in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let threshold = bures_monotone_threshold();
        prop_assume!([0.0, 1.0 / 3.0, threshold, 0.5, 1.0].iter().all(|&b| (a2 - b).abs() >= 1e-4));
        let state = InitialState::new(a2).unwrap();
        prop_assume!(!near_boundary(state, q));
        let h = 1e-6;
        for m in Measure::ALL {
            let diff = discord_closed(state, q + h, m).unwrap() - discord_closed(state, q - h, m).unwrap();
            let ok = match monotonicity_class(state, q, m).unwrap() {
                Monotonicity::Increasing => diff > 0.0,
                Monotonicity::Decreasing => diff < 0.0,
                Monotonicity::Stationary => diff.abs() < 1e-12,
            };
            prop_assert!(ok, "{m:?} at alpha^2 = {a2}, q = {q}: diff {diff}");
        }
    }
}

fn local(ua: &ComplexMatrix, ub: &ComplexMatrix) -> ComplexMatrix {
    kron(ua, ub)
}

fn z_phase(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        vec![C64::from_polar(1.0, phi), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, -phi)],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hellinger_eigen_route_matches_direct_search(rho in density4()) {
        let a = hdd_eigen(&rho).unwrap();
        let b = hdd_bruteforce(&rho, 64).unwrap();
        prop_assert!((a - b).abs() < 1e-4, "eigen {a}, search {b}");
    }

    #[test]
    fn bures_closed_form_matches_fidelity_search((state, q) in family()) {
        let rho = two_qubit_state(state, q).unwrap();
        prop_assert!((bdd_closed(state, q).unwrap() - bdd_fidelity_max(&rho, 64).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn local_unitaries_leave_discords_unchanged(rho in density4(), ua in unitary(2), ub in unitary(2)) {
        let moved = rho.conjugate_by(&local(&ua, &ub)).unwrap();
        let (a, b) = (hdd_eigen(&moved).unwrap(), hdd_eigen(&rho).unwrap());
        prop_assert!((a - b).abs() < 1e-8, "hdd {a} vs {b}, spectrum {:?}", hermitian_eigen(rho.matrix()).unwrap().eigenvalues);
        let (c, d) = (bdd_fidelity_max(&moved, 64).unwrap(), bdd_fidelity_max(&rho, 64).unwrap());
        prop_assert!((c - d).abs() < 1e-8, "bdd {c} vs {d}, spectrum {:?}", hermitian_eigen(rho.matrix()).unwrap().eigenvalues);
    }

    #[test]
    fn trace_distance_invariant_under_local_phases((state, q) in family(), pa in -3.2f64..3.2, pb in -3.2f64..3.2) {
        let rho = two_qubit_state(state, q).unwrap();
        let moved = rho.conjugate_by(&local(&z_phase(pa), &z_phase(pb))).unwrap();
        prop_assert!((tdd_x_state(&moved).unwrap() - tdd_x_state(&rho).unwrap()).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn trace_distance_vanishes_on_zero_discord_states(rho in zero_discord()) {
        prop_assert!(tdd_bruteforce(&rho, 20).unwrap() < 1e-6);
    }

    #[test]
    fn trace_distance_search_is_a_tight_upper_bound((state, q) in family()) {
        let rho = two_qubit_state(state, q).unwrap();
        let exact = tdd_x_state(&rho).unwrap();
        let found = tdd_bruteforce(&rho, 20).unwrap();
        prop_assert!(found >= exact - 1e-6);
        prop_assert!(found - exact < 1e-3, "search {found}, exact {exact}");
    }
}

fn any_model() -> impl Strategy<Value = SpectralModel> {
    prop_oneof![
        (0.1f64..2.0, 0.05f64..3.0).prop_map(|(g, l)| SpectralModel::lorentzian(g, l)),
        (0.01f64..1.0, 0.5f64..4.0, 0.5f64..3.0).prop_map(|(e, s, w)| SpectralModel::ohmic(e, s, w)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn solver_amplitude_is_contractive(model in any_model()) {
        let cfg = SolverConfig::default_for(&model, 10.0).unwrap();
        let rec = solve(&kernel(&model).unwrap(), model.omega0(), &cfg).unwrap();
        prop_assert!(rec.p.iter().all(|p| p.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn solver_decay_rate_sign_matches_exact(lambda in 0.05f64..3.0) {
        let model = SpectralModel::lorentzian(1.0, lambda);
        let cfg = SolverConfig::new(20.0, 1e-3).unwrap();
        let rec = derive_rates(solve(&kernel(&model).unwrap(), model.omega0(), &cfg).unwrap());
        for (&t, g) in rec.times.iter().zip(&rec.gamma).skip(1) {
            if let Some(g) = *g {
                let exact = lorentzian_gamma_analytic(&model, t).unwrap();
                prop_assert_eq!(g < 0.0, exact < 0.0, "t = {}, solver {}, exact {}", t, g, exact);
            }
        }
    }

    #[test]
    fn discord_trend_follows_classification(lambda in 0.02f64..3.0, a2 in 0.01f64..0.99) {
        let model = SpectralModel::lorentzian(1.0, lambda);
        let state = InitialState::new(a2).unwrap();
        let delta = 1e-6;
        let (mut defined, mut agree) = (0usize, 0usize);
        for k in 1..=2000 {
            let t = k as f64 * 0.01;
            let q = lorentzian_q_analytic(&model, t).unwrap();
            let (_, enh) = classify_cell(state, q, lorentzian_dq_dt(&model, t).unwrap(), FLOW_DEADBAND);
            let q_next = lorentzian_q_analytic(&model, t + delta).unwrap();
            for m in Measure::ALL {
                let change = discord_closed(state, q_next, m).unwrap() - discord_closed(state, q, m).unwrap();
                let ok = match enh.get(m) {
                    Enhancement::Undefined => continue,
                    Enhancement::Enhanced => change > 0.0,
                    Enhancement::Degraded => change < 0.0,
                    // Inside the dead band: no larger than a rate at its edge allows.
                    Enhancement::Stationary => {
                        change.abs() <= 2.0 * discord_dq(state, q, m).abs() * FLOW_DEADBAND * delta + 1e-15
                    }
                };
                defined += 1;
                agree += usize::from(ok);
            }
        }
        prop_assert!(agree as f64 >= 0.999 * defined as f64, "{agree} of {defined}");
    }

    #[test]
    fn exported_trajectories_are_physical(model in any_model(), a2 in 0.0f64..=1.0) {
        let cfg = SolverConfig::default_for(&model, 10.0).unwrap();
        let table = trajectory(InitialState::new(a2).unwrap(), &model, &cfg, 200).unwrap();
        for r in &table.rows {
            prop_assert!((0.0..=1.0).contains(&r.q));
            prop_assert!(r.d_t >= 0.0 && r.d_l >= 0.0 && r.d_b >= 0.0);
        }
    }
}

/// Lab-frame trapezoid scheme for `c' = -i omega0 c - int_0^t f(t-s) c(s) ds`,
/// solved implicitly for the new point. Returns `|c|^2` on the grid.
fn lab_frame_q(k: &KernelFunction, omega0: f64, t_max: f64, n: usize) -> Vec<f64> {
    let h = t_max / n as f64;
    let table: Vec<C64> = (0..=n).map(|j| k.eval(j as f64 * h)).collect();
    let i = C64::new(0.0, 1.0);
    let mut c = vec![C64::new(1.0, 0.0)];
    let mut g_prev = -i * omega0;
    for m in 1..=n {
        let mut hist = 0.5 * table[m] * c[0];
        for j in 1..m {
            hist += table[m - j] * c[j];
        }
        // g_m = -i omega0 c_m - h (k0 c_m / 2 + hist)
        let a = -i * omega0 - 0.5 * h * table[0];
        let b = -h * hist;
        let cm = (c[m - 1] + 0.5 * h * (g_prev + b)) / (1.0 - 0.5 * h * a);
        g_prev = a * cm + b;
        c.push(cm);
    }
    c.iter().map(|z| z.norm_sqr()).collect()
}

fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().enumerate().map(|(j, &qc)| (4.0 * fine[2 * j] - qc) / 3.0).collect()
}

#[test]
fn rotating_and_lab_frames_agree() {
    let t_max = 5.0;
    let n = 2500;
    for model in [SpectralModel::lorentzian(1.0, 0.3), SpectralModel::ohmic(0.1, 3.0, 2.0)] {
        let k = kernel(&model).unwrap();
        let rot = |n: usize| solve(&k, model.omega0(), &SolverConfig::new(t_max, t_max / n as f64).unwrap()).unwrap().q;
        let rotating = richardson(&rot(n), &rot(2 * n));
        let lab =
            richardson(&lab_frame_q(&k, model.omega0(), t_max, n), &lab_frame_q(&k, model.omega0(), t_max, 2 * n));
        let worst = rotating.iter().zip(&lab).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{model:?}: frames differ by {worst:e}");
    }
}

#[test]
fn kernels_match_quadrature() {
    let check = kernel_quadrature_check(20, 11, Exec::Parallel).unwrap();
    assert!(check.passed, "{check:?}");
}

fn region_config(model: SpectralModel, workers: usize) -> RunConfig {
    let mut cfg = RunConfig::new(Mode::RegionMap);
    cfg.alpha_sq = Some(0.7);
    cfg.spectral = Some(model);
    cfg.sweep = Some(SweepRange { param_name: None, min: 0.1, max: 1.0, steps: 6 });
    cfg.time_samples = 80;
    cfg.workers = workers;
    cfg
}

#[test]
fn output_does_not_depend_on_worker_count() {
    for model in [SpectralModel::lorentzian(1.0, 1.0), SpectralModel::ohmic(0.1, 3.0, 2.0)] {
        let bytes = |workers: usize| {
            let cfg = region_config(model, workers);
            compute(&cfg).unwrap().encode(Format::Csv, &cfg.to_json()).unwrap()
        };
        let one = bytes(1);
        assert!(!one.is_empty());
        assert_eq!(one, bytes(4));
    }
    let mut cfg = RunConfig::new(Mode::CrossCheck);
    let serial = compute(&cfg).unwrap().encode(Format::Csv, &cfg.to_json()).unwrap();
    cfg.workers = 3;
    assert_eq!(serial, compute(&cfg).unwrap().encode(Format::Csv, &cfg.to_json()).unwrap());
}
