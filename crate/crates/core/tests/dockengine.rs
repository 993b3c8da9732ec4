mod common;

use std::f64::consts::TAU;

use nalgebra::{Unit, UnitQuaternion};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xscreen_core::dockengine::{
    build_pocket, chem_score, cluster_and_select, cluster_poses, dock_and_score, exhaustive_dock, flatten, geo_score, grid_angle, initial_poses,
    local_search, pose_rmsd, DockError, Pose, ScoringConfig, SearchStats,
};
use xscreen_core::geometry::{apply_rigid, apply_torsions, internal_distance_sum, Conformation, RigidTransform};
use xscreen_core::molmodel::{Atom, Element, Ligand, ProteinAtom, Vec3};
use xscreen_core::synth;
use xscreen_core::workflow::prepare_ligand;

fn random_poses(ligand: &Ligand, n: usize, seed: u64) -> Vec<Pose> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Conformation::of(ligand);
    (0..n)
        .map(|i| {
            let axis = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0));
            let q = UnitQuaternion::from_axis_angle(&Unit::new_normalize(axis), rng.random_range(0.0..TAU));
            let t = Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let transform = RigidTransform::new(q, t);
            Pose {
                restart: i,
                transform,
                torsion_angles: vec![0.0; ligand.torsions.len()],
                conformation: apply_rigid(&base, &transform),
                geo_score: rng.random_range(0..4) as f64,
                chem_score: None,
            }
        })
        .collect()
}

#[test]
fn docking_is_deterministic() {
    let pocket = synth::pocket("p", 9).unwrap();
    let ligand = prepare_ligand("c1ccccc1CCN").unwrap();
    let config = common::quick_scoring();
    let a = dock_and_score(&pocket, &ligand, &config).unwrap();
    let b = dock_and_score(&pocket, &ligand, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.best_score.to_bits(), b.best_score.to_bits());
    assert_eq!(a.rescored.len(), 4);
    assert_eq!(a.smiles, "c1ccccc1CCN");
    assert_eq!(a.best_score, chem_score(&pocket, &ligand, &a.best_pose.conformation));
}

#[test]
fn local_search_climbs_and_counts() {
    let pocket = synth::pocket("p", 4).unwrap();
    let ligand = prepare_ligand("OCCc1ccncc1").unwrap();
    let base = Conformation::of(&ligand);
    let (_, angles) = flatten(&ligand, &base).unwrap();
    let m = ligand.torsions.len();
    let n = ligand.heavy_count() as u64;
    let mut stats = SearchStats::default();
    let starts = initial_poses(&pocket, &ligand, &base, &angles, 6, &mut stats).unwrap();
    assert_eq!(stats.scoring_evals, 6 * n);
    let one_step = ScoringConfig {
        max_iterations: 1,
        ..ScoringConfig::default()
    };
    for start in &starts {
        let mut s = SearchStats::default();
        let pose = local_search(&pocket, &ligand, &base, start, &one_step, &mut s).unwrap();
        assert_eq!(s.scoring_evals, (12 + 2 * m as u64) * n);
        assert!(pose.geo_score >= start.geo_score);

        let mut s = SearchStats::default();
        let pose = local_search(&pocket, &ligand, &base, start, &ScoringConfig::default(), &mut s).unwrap();
        assert!(pose.geo_score >= start.geo_score);
        assert_eq!(s.scoring_evals, s.ls_iterations * (12 + 2 * m as u64) * n);
        let mut evals = 0;
        let expected = apply_rigid(&apply_torsions(&base, &ligand, &pose.torsion_angles).unwrap(), &pose.transform);
        assert_eq!(pose.conformation, expected);
        assert_eq!(geo_score(&pocket, &ligand, &pose.conformation, &mut evals), pose.geo_score);
    }
}

#[test]
fn one_torsion_flattening_matches_the_scan() {
    for s in ["CCCO", "c1ccccc1O", "NCC(=O)O", "FC(F)(F)c1ccccc1", "CC(C)(C)C"] {
        let ligand = prepare_ligand(s).unwrap();
        let base = Conformation::of(&ligand);
        let (flat, angles) = flatten(&ligand, &base).unwrap();
        match ligand.torsions.len() {
            0 => assert_eq!(flat, base),
            1 => {
                let best = (0..36)
                    .map(|k| internal_distance_sum(&apply_torsions(&base, &ligand, &[grid_angle(k)]).unwrap()))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(internal_distance_sum(&flat), best, "{s}");
                assert_eq!(angles.len(), 1);
            }
            m => panic!("{s} has {m} torsions"),
        }
    }
}

#[test]
fn oracle_bounds_the_search_on_a_tiny_ligand() {
    let protein = vec![
        ProteinAtom { element: Element::C, position: Vec3::new(0.0, 0.0, -3.0) },
        ProteinAtom { element: Element::O, position: Vec3::new(3.0, 0.0, 0.0) },
    ];
    let pocket = build_pocket(&protein, Vec3::zeros(), 3.0, 0.5).unwrap();
    let ligand = Ligand::new(
        "ClCl",
        vec![Atom::at(Element::Cl, Vec3::zeros()), Atom::at(Element::Cl, Vec3::new(1.99, 0.0, 0.0))],
        vec![xscreen_core::molmodel::Bond::new(0, 1, xscreen_core::molmodel::BondOrder::Single)],
    );
    let oracle = exhaustive_dock(&pocket, &ligand).unwrap();
    assert_eq!(oracle.geo_score, 2.0);
    let found = dock_and_score(&pocket, &ligand, &ScoringConfig::default()).unwrap();
    assert!(found.top_geo_score <= oracle.geo_score);

    let big = prepare_ligand("CCCCCC").unwrap();
    assert!(matches!(exhaustive_dock(&pocket, &big), Err(DockError::TooLarge(_))));
}

#[test]
fn bad_configuration_is_rejected() {
    let pocket = synth::pocket("p", 1).unwrap();
    let ligand = prepare_ligand("CCO").unwrap();
    for config in [
        ScoringConfig { restarts: 0, ..ScoringConfig::default() },
        ScoringConfig { rescored: 0, ..ScoringConfig::default() },
        ScoringConfig { rmsd_threshold: -1.0, ..ScoringConfig::default() },
    ] {
        assert!(dock_and_score(&pocket, &ligand, &config).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clustering_is_sound(seed in any::<u64>(), n in 1usize..20, threshold in 0.5f64..6.0, top in 1usize..25) {
        let ligand = prepare_ligand("c1ccccc1CO").unwrap();
        let poses = random_poses(&ligand, n, seed);
        let c = cluster_poses(&ligand, &poses, threshold).unwrap();
        for i in 0..n {
            let l = c.leader_of[i];
            prop_assert_eq!(c.leader_of[l], l);
            prop_assert!(pose_rmsd(&ligand, &poses[i], &poses[l]).unwrap() <= threshold);
        }
        for (a, &i) in c.leaders.iter().enumerate() {
            for &j in &c.leaders[..a] {
                prop_assert!(pose_rmsd(&ligand, &poses[i], &poses[j]).unwrap() > threshold);
            }
        }
        let selected = cluster_and_select(&ligand, &poses, threshold, top).unwrap();
        prop_assert_eq!(selected.len(), top.min(n));
        let best = poses.iter().map(|p| p.geo_score).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(selected[0].geo_score, best);
    }
}

#[test]
fn chem_score_is_translation_sensitive_only_near_the_protein() {
    let protein = vec![ProteinAtom { element: Element::O, position: Vec3::zeros() }];
    let pocket = build_pocket(&protein, Vec3::zeros(), 4.0, 1.0).unwrap();
    let ligand = Ligand::new("O", vec![Atom::at(Element::O, Vec3::zeros())], vec![]);
    let at = |x: f64| chem_score(&pocket, &ligand, &Conformation::new(vec![Vec3::new(x, 0.0, 0.0)]));
    assert_eq!(at(20.0), 0.0);
    assert!(at(3.0) > at(4.5));
    assert!(at(1.0) < 0.0);
}
