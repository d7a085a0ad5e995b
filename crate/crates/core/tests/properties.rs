//! Randomized invariants.

mod common;

use common::{expm_i, pauli_string, phase_distance, Cplx};
use proptest::prelude::*;

use dqs_core::bench::{
    parse_qasm, parse_seconds, to_qasm, write_csv_to, Backend, ExperimentConfig, SeriesMeta, SeriesPoint, TimeGrid,
    TimeSeries,
};
use dqs_core::gatesim::{run_circuit, sample, NoiseSpec};
use dqs_core::models::{product_state, Model, PauliAxis, PauliTerm, SpinOneParams, TimParams};
use dqs_core::qcore::linalg::eigh;
use dqs_core::qcore::matrix::ComplexMatrix;
use dqs_core::qcore::state::fidelity;
use dqs_core::trotter::{circuit_unitary, digital_error, lower_term, Circuit, Gate, NativeSet, TrotterPlan};

fn cm(m: &ComplexMatrix) -> Cplx {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn axis() -> impl Strategy<Value = PauliAxis> {
    prop_oneof![Just(PauliAxis::X), Just(PauliAxis::Y), Just(PauliAxis::Z)]
}

fn axis_char(a: PauliAxis) -> char {
    match a {
        PauliAxis::X => 'X',
        PauliAxis::Y => 'Y',
        PauliAxis::Z => 'Z',
    }
}

/// A random gate of the CNOT native set on three qubits.
fn cnot_gate() -> impl Strategy<Value = Gate> {
    let q = 0usize..3;
    let angle = -10.0f64..10.0;
    prop_oneof![
        (q.clone(), angle.clone()).prop_map(|(q, a)| Gate::rx(q, a)),
        (q.clone(), angle.clone()).prop_map(|(q, a)| Gate::ry(q, a)),
        (q.clone(), angle).prop_map(|(q, a)| Gate::rz(q, a)),
        q.clone().prop_map(Gate::h),
        q.clone().prop_map(Gate::x),
        (q.clone(), 1usize..3).prop_map(|(a, d)| Gate::cnot(a, (a + d) % 3)),
    ]
}

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![
        (-3.0f64..3.0, 0.05f64..2.0).prop_map(|(d, e)| Model::Spin1(SpinOneParams { d, e })),
        (0.05f64..4.0, -2.0f64..2.0).prop_map(|(gamma, b)| Model::Tim(TimParams { gamma, b })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noisy_circuits_stay_physical(
        gates in prop::collection::vec(cnot_gate(), 0..12),
        t1 in 1e-6f64..1e-4,
        ratio in 0.1f64..2.0,
        start in "[01+\\-rl]{3}",
    ) {
        let c = Circuit::from_gates(3, NativeSet::CnotSet, gates).unwrap();
        let ns = NoiseSpec::uniform(3, t1, ratio * t1, 0.02);
        let rho = run_circuit(&c, &product_state(&start).unwrap(), &ns).unwrap().to_density_matrix();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_deviation() < 1e-12);
        prop_assert!(eigh(&rho.hermitian_part()).unwrap().values[0] > -1e-10);
    }

    #[test]
    fn lowering_matches_exponential(
        a in axis(),
        b in axis(),
        pair in prop_oneof![Just((0usize, 1usize)), Just((0, 2)), Just((1, 2))],
        theta in -10.0f64..10.0,
        sqiswap in any::<bool>(),
    ) {
        let set = if sqiswap { NativeSet::SqiswapSet } else { NativeSet::CnotSet };
        let term = PauliTerm::new(1.0, &[(pair.0, a), (pair.1, b)]).unwrap();
        let gates = lower_term(&term, theta, set).unwrap();
        let u = circuit_unitary(&Circuit::from_gates(3, set, gates).unwrap()).unwrap();
        let p = pauli_string(3, &[(pair.0, axis_char(a)), (pair.1, axis_char(b))]);
        prop_assert!(phase_distance(&cm(&u), &expm_i(&p, theta)) < 1e-11);
    }

    #[test]
    fn qasm_round_trip(gates in prop::collection::vec(cnot_gate(), 0..20)) {
        let c = Circuit::from_gates(3, NativeSet::CnotSet, gates).unwrap();
        let text = to_qasm(&c).unwrap();
        let back = parse_qasm(&text).unwrap();
        prop_assert!(circuit_unitary(&back).unwrap().max_abs_diff(&circuit_unitary(&c).unwrap()) < 1e-12);
        prop_assert_eq!(to_qasm(&back).unwrap(), text);
    }

    #[test]
    fn commuting_spin1_has_no_digital_error(
        d in -3.0f64..3.0,
        e in -2.0f64..2.0,
        t in 0.0f64..30.0,
        n in 1usize..6,
    ) {
        let plan = TrotterPlan::new(Model::Spin1(SpinOneParams { d, e }).hamiltonian(), t, n).unwrap();
        prop_assert!(digital_error(&plan).unwrap() < 1e-10);
    }

    #[test]
    fn config_toml_round_trip(
        m in model(),
        steps in 1usize..40,
        shots in 0u64..100_000,
        seed in any::<u64>(),
        t_max in 0.5f64..50.0,
        points in 2usize..200,
        device in any::<bool>(),
    ) {
        let cfg = ExperimentConfig {
            backend: if device { Backend::Device } else { Backend::Gate },
            steps,
            shots,
            seed,
            model: m,
            grid: TimeGrid { t_min: 0.0, t_max, points },
            ..Default::default()
        };
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn csv_is_deterministic(values in prop::collection::vec(-1.0f64..1.0, 1..30), seed in any::<u64>()) {
        let series = TimeSeries {
            meta: SeriesMeta {
                backend: Backend::Gate,
                model: "tim".into(),
                steps: 3,
                t2: Some(1e-3),
                shots: 100,
                seed,
            },
            points: values
                .iter()
                .enumerate()
                .map(|(k, &v)| SeriesPoint { t: k as f64 * 0.1, value: v, stderr: Some(0.01), fidelity: None, leakage: None })
                .collect(),
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv_to(&mut a, std::slice::from_ref(&series)).unwrap();
        write_csv_to(&mut b, std::slice::from_ref(&series)).unwrap();
        prop_assert_eq!(&a, &b);
        let text = String::from_utf8(a).unwrap();
        prop_assert_eq!(text.lines().count(), values.len() + 1);
        for (line, v) in text.lines().skip(1).zip(&values) {
            let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            prop_assert_eq!(parsed, *v);
        }
    }

    #[test]
    fn seconds_parse_exactly(k in 1u32..100_000) {
        prop_assert_eq!(parse_seconds(&format!("{k}us")).unwrap(), format!("{k}e-6").parse::<f64>().unwrap());
        prop_assert_eq!(parse_seconds(&format!("{k}ms")).unwrap(), format!("{k}e-3").parse::<f64>().unwrap());
    }

    #[test]
    fn sampling_counts_and_seeding(shots in 1u64..5000, seed in any::<u64>(), start in "[01+]{2}") {
        let rho = product_state(&start).unwrap();
        let ns = NoiseSpec::ibm_like(2);
        let a = sample(&rho, shots, &ns, seed).unwrap();
        prop_assert_eq!(a.shots(), shots);
        prop_assert_eq!(a.counts().values().sum::<u64>(), shots);
        prop_assert_eq!(a, sample(&rho, shots, &ns, seed).unwrap());
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in "[01+\\-rl]{2}", b in "[01+\\-rl]{2}", t1 in 1e-6f64..1e-4) {
        let c = Circuit::from_gates(2, NativeSet::CnotSet, vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        let rho = run_circuit(&c, &product_state(&a).unwrap(), &NoiseSpec::uniform(2, t1, t1, 0.0)).unwrap();
        let sigma = product_state(&b).unwrap();
        let f1 = fidelity(&rho, &sigma).unwrap();
        let f2 = fidelity(&sigma, &rho).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f1));
    }
}
