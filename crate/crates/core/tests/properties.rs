use std::f64::consts::PI;

use dirac_qca::evolve::gaussian_packet;
use dirac_qca::gates::{solve_gates, verify_gate_identities};
use dirac_qca::linalg::{c, max_diff, unitarity_residual, Mat2};
use dirac_qca::manybody::{build_jw_fields, car_residual, mul};
use dirac_qca::params::{mass_conversion, params_from_mass_ratio, Mover};
use dirac_qca::pathsum::{backward_matrix, enumerate_forward, evolve_by_paths, forward_matrix};
use dirac_qca::spectral::{bloch_matrix, extract_hamiltonian};
use dirac_qca::{Complex64, FieldState, PhysicalUnits, SimulationParams, StepOperator};
use proptest::prelude::*;

fn params(mu: f64, n: usize) -> SimulationParams {
    params_from_mass_ratio(mu, n, PhysicalUnits::natural()).unwrap()
}

fn state_from(values: &[(f64, f64)]) -> FieldState {
    let wires: Vec<Complex64> = values.iter().map(|&(re, im)| c(re, im)).collect();
    FieldState::from_wires(&wires).unwrap()
}

fn random_state(n: usize) -> impl Strategy<Value = FieldState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * n).prop_map(|v| state_from(&v))
}

fn units() -> impl Strategy<Value = PhysicalUnits> {
    (0.1f64..3.0, 0.1f64..3.0, 0.5f64..2.0)
        .prop_map(|(a, t, h)| PhysicalUnits::new(a, t, h).unwrap())
}

/// Partner of `wire` at its gate in the given row, straight from the ring layout.
fn partner(wire: usize, row: usize, n_wires: usize) -> usize {
    if row.is_multiple_of(2) {
        wire ^ 1
    } else if wire.is_multiple_of(2) {
        (wire + n_wires - 1) % n_wires
    } else {
        (wire + 1) % n_wires
    }
}

/// Number of lattice walks from `top` down through `depth` rows to each wire.
fn walk_counts(top: usize, depth: usize, n_wires: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_wires];
    counts[top] = 1;
    for row in (0..depth).rev() {
        let mut next = vec![0u64; n_wires];
        for (w, &cnt) in counts.iter().enumerate() {
            next[w] += cnt;
            next[partner(w, row, n_wires)] += cnt;
        }
        counts = next;
    }
    counts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeta_and_mu_lie_on_unit_circle(mu in 0.0f64..=1.0) {
        let p = params(mu, 4);
        prop_assert!((p.zeta().powi(2) + p.mu().powi(2) - 1.0).abs() <= 1e-15);
        prop_assert!((p.theta().cos() - mu).abs() <= 1e-12);
        prop_assert!((p.theta().sin() - p.zeta()).abs() <= 1e-12);
    }

    #[test]
    fn mass_conversion_is_linear(w1 in 0.0f64..10.0, w2 in 0.0f64..10.0, s in -3.0f64..3.0, u in units()) {
        let lhs = mass_conversion(s * w1 + w2, &u);
        let rhs = s * mass_conversion(w1, &u) + mass_conversion(w2, &u);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn gate_identities_hold(mu in 0.0f64..=1.0) {
        let p = params(mu, 4);
        let gp = solve_gates(&p);
        let report = verify_gate_identities(&gp, &p);
        prop_assert!(report.max_residual() <= 1e-12, "{:?}", report);
        prop_assert!((gp.theta.sin() - p.zeta()).abs() <= 1e-12);
        prop_assert!((gp.theta.cos() - mu).abs() <= 1e-12);
    }

    #[test]
    fn two_step_matrix_is_unitary(mu in 0.0f64..=1.0, n in 2usize..=64) {
        let op = StepOperator::from_params(&params(mu, n));
        prop_assert!(unitarity_residual(&op.dense_matrix()) <= 1e-12);
    }

    #[test]
    fn two_step_commutes_with_translation(mu in 0.0f64..=1.0, s in random_state(12), by in -12isize..12) {
        let op = StepOperator::from_params(&params(mu, 12));
        let a = op.two_step(&s.shifted(by)).unwrap();
        let b = op.two_step(&s).unwrap().shifted(by);
        prop_assert!(a.max_abs_diff(&b) <= 1e-14);
    }

    #[test]
    fn norm_is_preserved(mu in 0.0f64..=1.0, s in random_state(20), steps in 1usize..50) {
        let op = StepOperator::from_params(&params(mu, 20));
        let mut t = s.clone();
        op.evolve(&mut t, steps).unwrap();
        prop_assert!((t.norm_sqr() - s.norm_sqr()).abs() <= 1e-12 * s.norm_sqr());
    }

    #[test]
    fn delta_stays_inside_light_cone(
        mu in 0.0f64..=1.0,
        cell in 0usize..40,
        right in any::<bool>(),
        steps in 1usize..15,
    ) {
        let n = 40;
        let op = StepOperator::from_params(&params(mu, n));
        let mover = if right { Mover::Right } else { Mover::Left };
        let mut s = FieldState::delta(n, cell, mover).unwrap();
        op.evolve(&mut s, steps).unwrap();
        for j in 0..n {
            let d = (j as isize - cell as isize).rem_euclid(n as isize) as usize;
            let ring_dist = d.min(n - d);
            if ring_dist > steps {
                prop_assert_eq!(s.plus[j], c(0.0, 0.0));
                prop_assert_eq!(s.minus[j], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn massless_step_is_signed_translation(s in random_state(16)) {
        let op = StepOperator::from_params(&params(0.0, 16));
        let out = op.two_step(&s).unwrap();
        for j in 0..16 {
            prop_assert_eq!(out.plus[(j + 1) % 16], -s.plus[j]);
            prop_assert_eq!(out.minus[j], -s.minus[(j + 1) % 16]);
        }
    }

    #[test]
    fn paths_match_direct_evolution(mu in 0.0f64..=1.0, s in random_state(8), two_steps in 1usize..=4) {
        let op = StepOperator::from_params(&params(mu, 8));
        let by_paths = evolve_by_paths(&s, &op, 2 * two_steps).unwrap();
        let mut direct = s.clone();
        op.evolve(&mut direct, two_steps).unwrap();
        prop_assert!(by_paths.max_abs_diff(&direct) <= 1e-12);
    }

    #[test]
    fn backward_paths_invert_forward(mu in 0.0f64..=1.0, depth in 1usize..=8) {
        let op = StepOperator::from_params(&params(mu, 6));
        let f = forward_matrix(&op, depth).unwrap();
        let g = backward_matrix(&op, depth).unwrap();
        let id = nalgebra::DMatrix::<Complex64>::identity(12, 12);
        prop_assert!(max_diff(&(&g * &f), &id) <= 1e-12);
        prop_assert!(max_diff(&g, &f.adjoint()) <= 1e-14);
    }

    #[test]
    fn path_counts_follow_lattice_walks(top in 0usize..10, depth in 1usize..=10) {
        let op = StepOperator::from_params(&params(0.3, 5));
        let paths = enumerate_forward(&op, top, depth).unwrap();
        prop_assert_eq!(paths.len(), 1usize << depth);
        let mut counts = vec![0u64; 10];
        for p in &paths {
            counts[p.end_wire()] += 1;
            prop_assert_eq!(p.start_wire(), top);
            prop_assert_eq!(p.depth(), depth);
        }
        prop_assert_eq!(counts, walk_counts(top, depth, 10));
    }

    #[test]
    fn plane_waves_diagonalize_the_step(mu in 0.0f64..=1.0, j in 0usize..16, u0 in (-1.0f64..1.0, -1.0f64..1.0), u1 in (-1.0f64..1.0, -1.0f64..1.0)) {
        let n = 16;
        let p = params(mu, n);
        let op = StepOperator::from_params(&p);
        let kappa = 2.0 * PI * j as f64 / n as f64;
        let k = kappa / (2.0 * p.units().a());
        let wave = |amp: [Complex64; 2]| {
            let phase: Vec<Complex64> = (0..n).map(|x| Complex64::from_polar(1.0, kappa * x as f64)).collect();
            FieldState::from_components(
                phase.iter().map(|e| e * amp[0]).collect(),
                phase.iter().map(|e| e * amp[1]).collect(),
            ).unwrap()
        };
        let u = [c(u0.0, u0.1), c(u1.0, u1.1)];
        let m = bloch_matrix(op.gates(), k, p.units().a());
        let mu_vec = m * nalgebra::Vector2::new(u[0], u[1]);
        let expected = wave([mu_vec[0], mu_vec[1]]);
        let got = op.two_step(&wave(u)).unwrap();
        prop_assert!(got.max_abs_diff(&expected) <= 1e-11);
    }

    #[test]
    fn hamiltonian_reflection_symmetry(mu in 0.0f64..=1.0, k in -2.0f64..2.0, u in units()) {
        let p = params_from_mass_ratio(mu, 4, u).unwrap();
        let gp = solve_gates(&p);
        let sx = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let h = extract_hamiltonian(&gp, k, u.a(), u.tau());
        let hm = extract_hamiltonian(&gp, -k, u.a(), u.tau());
        let diff = hm - sx * h * sx;
        prop_assert!(diff.iter().all(|z| z.norm() <= 1e-12 / u.tau()));
        let bound = 1.0 / (2.0 * u.tau());
        prop_assert!(dirac_qca::linalg::op_norm2(&h) <= bound * (1.0 + 1e-14));
        let herm = h - h.adjoint();
        prop_assert!(herm.iter().all(|z| z.norm() <= 1e-13 / u.tau()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn jordan_wigner_fields_anticommute(q in 2usize..=8) {
        let f = build_jw_fields(q).unwrap();
        prop_assert!(car_residual(&f) <= 1e-12);
    }

    #[test]
    fn ten_wire_fields_anticommute_on_samples(m in 0usize..10, n in 0usize..10) {
        let f = build_jw_fields(10).unwrap();
        let (fm, fn_) = (f.field(m), f.field(n));
        let fn_dag = fn_.adjoint();
        let mut anti_dag = mul(fm, &fn_dag) + mul(&fn_dag, fm);
        if m == n {
            for i in 0..f.dim() {
                anti_dag[(i, i)] -= c(1.0, 0.0);
            }
        }
        let anti = mul(fm, fn_) + mul(fn_, fm);
        prop_assert!(anti_dag.iter().chain(anti.iter()).all(|z| z.norm() <= 1e-12));
    }
}

#[test]
fn packet_spectrum_peaks_at_carrier() {
    let n = 64;
    let p = params(0.4, n);
    let k0 = PI / (8.0 * p.units().a());
    let s = gaussian_packet(&p, 20.0, 4.0, k0, [c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    // plain O(N²) transform with the e^{+iκx} convention of the packet
    let power: Vec<f64> = (0..n)
        .map(|j| {
            let kappa = 2.0 * PI * j as f64 / n as f64;
            s.plus
                .iter()
                .enumerate()
                .map(|(x, z)| z * Complex64::from_polar(1.0, -kappa * x as f64))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    let peak = (0..n)
        .max_by(|&i, &j| power[i].total_cmp(&power[j]))
        .unwrap();
    assert_eq!(peak, n / 8);
}
