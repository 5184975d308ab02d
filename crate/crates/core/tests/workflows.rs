mod common;

use antimark_core::antimark::{
    check_lsam, check_lsam_global, lsam_scaling, pbr_sequence_protocol, theta_sequence_protocol,
    verify_sequence_elimination, LsamTask, SequenceMeasurement, SweepOptions,
};
use antimark_core::ensembles::{catalog, catalog_entries, sequence_ensemble};
use antimark_core::exclusion::{decide_antidist, verify_strong, Decision, DecideOptions, Method};
use antimark_core::locc::{
    bell_computational_protocol, bennett_protocol, build_pairwise_lad_protocol, decide_local_antidist,
    double_sic_protocol, parse_protocol, protocol_to_document, verify_local_protocol,
};
use rand::SeedableRng;

fn opts() -> DecideOptions {
    DecideOptions::default()
}

#[test]
fn catalog_verdicts() {
    use Decision::*;
    let table = [
        ("weak3", No, No),
        ("trine3", Yes, Yes),
        ("bell4", Yes, Yes),
        ("bennett9", Yes, Yes),
        ("duan4", Yes, No),
        ("nl1", Yes, No),
        ("sic4", Yes, Yes),
        ("double_sic_antiparallel", Yes, Yes),
        ("pbr4", Yes, No),
        ("su3", No, No),
    ];
    for (name, global, local) in table {
        let e = catalog(name, &[]).unwrap();
        let g = decide_antidist(&e, &opts()).unwrap();
        assert_eq!(g.decision, global, "{name} global");
        if g.is_yes() {
            assert!(verify_strong(&e, g.povm().unwrap(), 1e-9).unwrap().pass, "{name}");
        }
        assert_eq!(decide_local_antidist(&e, &opts()).unwrap().decision, local, "{name} local");
    }
    assert_eq!(table.len() + 2, catalog_entries().len());
}

#[test]
fn activation_of_su3() {
    let e = catalog("su3", &[]).unwrap();
    let v = decide_antidist(&e, &opts()).unwrap();
    assert!(v.is_no());
    assert!((v.margins[0] + 0.25).abs() < 1e-12);
    let task = LsamTask::new(e, 2, 1).unwrap();
    let g = check_lsam_global(&task, &opts()).unwrap();
    assert!(g.is_yes());
    assert_eq!(g.method, Method::TripleCover);
    assert!(check_lsam(&task, &opts()).unwrap().is_no());
}

#[test]
fn printed_protocols_pass() {
    for (name, p) in [
        ("bell4", bell_computational_protocol()),
        ("bennett9", bennett_protocol()),
        ("double_sic_antiparallel", double_sic_protocol()),
    ] {
        let e = catalog(name, &[]).unwrap();
        let r = verify_local_protocol(&e, &p, 1e-10).unwrap();
        assert!(r.pass, "{name}: {:?}", r.unexcluded);
        let back = parse_protocol(&serde_json::to_string(&protocol_to_document(&p)).unwrap()).unwrap();
        assert!(verify_local_protocol(&e, &back, 1e-10).unwrap().pass);
    }
}

#[test]
fn pairwise_generator_on_random_ensembles() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for dims in [[2usize, 2], [3, 3], [2, 3]] {
        for n in 2..=6.min(dims[0] * dims[1]) {
            let e = common::random_orthogonal(&mut rng, &dims, n);
            let p = build_pairwise_lad_protocol(&e).unwrap();
            assert!(verify_local_protocol(&e, &p, 1e-9).unwrap().pass, "{dims:?} n = {n}");
        }
    }
}

#[test]
fn pbr_sequences() {
    let pbr = catalog("pbr4", &[]).unwrap();
    assert!(check_lsam(&LsamTask::new(pbr.clone(), 1, 1).unwrap(), &opts()).unwrap().is_no());
    let task = LsamTask::new(pbr, 2, 3).unwrap();
    let r = verify_sequence_elimination(&task, &SequenceMeasurement::Local(pbr_sequence_protocol().unwrap()), 1e-10).unwrap();
    assert!(r.pass);
    assert_eq!(r.reachable.iter().filter(|&&x| x).count(), 16);
    assert_eq!(r.min_eliminated, 4);
}

#[test]
fn theta_family_inside_and_outside_the_window() {
    let search = SweepOptions::default().search;
    for t in [0.8, 0.9] {
        let (p, m) = theta_sequence_protocol(t, &search).unwrap();
        assert!(m.completeness_residual <= 1e-8 && m.max_pair_residual <= 1e-9);
        let task = LsamTask::new(catalog("theta4", &[t]).unwrap(), 2, 8).unwrap();
        let r = verify_sequence_elimination(&task, &SequenceMeasurement::Local(p), 1e-9).unwrap();
        assert!(r.pass, "θ = {t}: {}", r.min_eliminated);
    }
    let pi4 = std::f64::consts::FRAC_PI_4;
    let (_, m) = theta_sequence_protocol(pi4, &search).unwrap();
    assert!(!m.synthesized);
    assert!(theta_sequence_protocol(1.0, &search).is_err());
}

#[test]
fn scaling_matches_lifted_counts() {
    use antimark_core::antimark::lift_protocol;
    let e = catalog("double_sic_antiparallel", &[]).unwrap();
    let base = LsamTask::new(e.clone(), 1, 1).unwrap();
    let p = double_sic_protocol();
    let r1 = verify_sequence_elimination(&base, &SequenceMeasurement::Local(p.clone()), 1e-10).unwrap();
    assert_eq!(r1.min_eliminated, 1);
    let lifted = lift_protocol(&p, e.layout().dims(), 1, 2).unwrap();
    let want = lsam_scaling(4, 1, 1, 2).unwrap();
    assert_eq!(want, 3);
    let task = LsamTask::new(e, 2, want).unwrap();
    let r2 = verify_sequence_elimination(&task, &SequenceMeasurement::Local(lifted), 1e-10).unwrap();
    assert_eq!(r2.min_eliminated as u128, want);
}

#[test]
fn sequence_ensembles_have_the_right_size() {
    let e = catalog("duan4", &[]).unwrap();
    for (n, count) in [(1, 4), (2, 12), (3, 24), (4, 24)] {
        assert_eq!(sequence_ensemble(&e, n).unwrap().len(), count);
    }
}
