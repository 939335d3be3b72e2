//! Acceptance suite: one test per criterion, each printing a PASS line once
//! every check in it has gone through. All checks are exact integer
//! computations; the tolerance everywhere is equality.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;

use gis_core::contextual::{
    affine_system, contextual_group, morphism_from_affine, ti_orbit, verify_affine_commutation,
    verify_affine_commutation_on_system,
};
use gis_core::covers::{enumerate_octatonic_covers, translation_fixed_triples};
use gis_core::gis::{
    action_from_gis, canonical_gis, gis_from_action, gis_morphism_from_action_morphism,
    AbstractGroup,
};
use gis_core::groupcore::{
    close_generators, commute_elementwise, conjugate_transfer, dual_group, is_dihedral_of_order,
    is_simply_transitive, setwise_stabilizer, Carrier, FiniteGroup, Perm,
};
use gis_core::netio::{resolve_network, verify_network};
use gis_core::pcmath::{all_affine_maps, ti_group, AffineMap, Modulus, PcSegment};
use gis_core::serial::{build_retro_duality, figures, rich, rich_by_search, RetroSystem};
use gis_core::subdual::{build_m7_m10_network, build_octatonic_table, build_sub_dual, OctatonicId};

const M12: Modulus = Modulus::TWELVE;

fn seg(entries: &[i64]) -> PcSegment {
    PcSegment::new(M12, entries).unwrap()
}

fn parse_seg(text: &str) -> PcSegment {
    PcSegment::parse(text, M12).unwrap()
}

fn report(n: u32, name: &str) {
    println!("[acceptance] criterion {n:02} ({name}): PASS");
}

fn perm_set(group: &FiniteGroup<PcSegment>) -> BTreeSet<Vec<usize>> {
    group
        .elements()
        .iter()
        .map(|e| e.images().to_vec())
        .collect()
}

#[test]
fn criterion_01_contextual_duality() {
    for seed in [seg(&[0, 4, 7]), seg(&[0, 4, 1]), seg(&[0, 4, 10])] {
        let orbit = ti_orbit(&seed).unwrap();
        assert_eq!(orbit.len(), 24, "orbit size for {seed}");
        let ctx = contextual_group(&orbit);
        assert_eq!(ctx.order(), 24, "contextual order for {seed}");
        assert!(is_dihedral_of_order(&ctx, 24), "dihedral for {seed}");
        assert!(is_simply_transitive(&ctx), "simple transitivity for {seed}");
        let ti = orbit.ti_perm_group();
        assert!(commute_elementwise(&ti, &ctx).unwrap());
        assert_eq!(dual_group(&ti).unwrap(), ctx, "dual equality for {seed}");
        assert_eq!(dual_group(&ctx).unwrap(), ti);
    }
    report(1, "contextual duality");
}

#[test]
fn criterion_02_octatonic_tables() {
    let table = build_octatonic_table(OctatonicId::O01).unwrap();

    // Every segment of the table, exactly as in the figure.
    let figure_rows: [(&str, [&str; 4], [&str; 4]); 3] = [
        (
            "0,4,7",
            ["0,4,7", "3,7,10", "6,10,1", "9,1,4"],
            ["7,3,0", "10,6,3", "1,9,6", "4,0,9"],
        ),
        (
            "0,4,1",
            ["0,4,1", "9,1,10", "6,10,7", "3,7,4"],
            ["1,9,0", "10,6,9", "7,3,6", "4,0,3"],
        ),
        (
            "0,4,10",
            ["0,4,10", "3,7,1", "6,10,4", "9,1,7"],
            ["10,6,0", "1,9,3", "4,0,6", "7,3,9"],
        ),
    ];
    for (sys, (seed, t_row, i_row)) in table.iter().zip(&figure_rows) {
        assert_eq!(&sys.seed, &parse_seg(seed));
        let expected_t: BTreeSet<PcSegment> = t_row.iter().map(|s| parse_seg(s)).collect();
        let expected_i: BTreeSet<PcSegment> = i_row.iter().map(|s| parse_seg(s)).collect();
        assert_eq!(
            sys.t_row.iter().cloned().collect::<BTreeSet<_>>(),
            expected_t,
            "T row of {seed}"
        );
        assert_eq!(
            sys.i_row.iter().cloned().collect::<BTreeSet<_>>(),
            expected_i,
            "I row of {seed}"
        );

        // Dual group = {Q_0, Q_3, Q_6, Q_9, P, Q_3 P, Q_6 P, Q_9 P} pointwise.
        let p = sys.orbit.j_perm(1, 3).unwrap();
        let mut expected = BTreeSet::new();
        for i in [0i64, 3, 6, 9] {
            expected.insert(sys.orbit.q_perm(i).images().to_vec());
            expected.insert(sys.orbit.q_perm(i).compose(&p).images().to_vec());
        }
        assert_eq!(perm_set(sys.system.h0()), expected, "dual list of {seed}");
    }

    // The transposed table arises by conjugate transfer along T_1.
    let t1 = AffineMap::transposition(M12, 1);
    let o12 = build_octatonic_table(OctatonicId::O12).unwrap();
    let o12_figure: [([&str; 4], [&str; 4]); 3] = [
        (
            ["1,5,8", "4,8,11", "7,11,2", "10,2,5"],
            ["8,4,1", "11,7,4", "2,10,7", "5,1,10"],
        ),
        (
            ["1,5,2", "10,2,11", "7,11,8", "4,8,5"],
            ["2,10,1", "11,7,10", "8,4,7", "5,1,4"],
        ),
        (
            ["1,5,11", "4,8,2", "7,11,5", "10,2,8"],
            ["11,7,1", "2,10,4", "5,1,7", "8,4,10"],
        ),
    ];
    for ((src, dst), (t_row, i_row)) in table.iter().zip(&o12).zip(&o12_figure) {
        // Transfer the restricted stabilizer action componentwise by T_1.
        let source = src.system.g0_restricted().clone();
        let moved: Vec<PcSegment> = source
            .carrier()
            .elements()
            .iter()
            .map(|y| t1.apply(y).unwrap())
            .collect();
        let target_carrier = Arc::new(Carrier::new(moved).unwrap());
        let f_map: Vec<usize> = source
            .carrier()
            .elements()
            .iter()
            .map(|y| target_carrier.position(&t1.apply(y).unwrap()).unwrap())
            .collect();
        let (conjugated, morphism) =
            conjugate_transfer(&source, Arc::clone(&target_carrier), &f_map).unwrap();
        assert!(morphism.classify().iso);
        // The transferred action is the figure's stabilizer action.
        assert_eq!(&conjugated, dst.system.g0_restricted());
        // Conjugate of the dual = dual of the conjugate, pointwise.
        let dual_direct = dual_group(&conjugated).unwrap();
        assert_eq!(&dual_direct, dst.system.h0_restricted());
        // And the figure rows are exact.
        let expected_t: BTreeSet<PcSegment> = t_row.iter().map(|s| parse_seg(s)).collect();
        let expected_i: BTreeSet<PcSegment> = i_row.iter().map(|s| parse_seg(s)).collect();
        assert_eq!(
            dst.t_row.iter().cloned().collect::<BTreeSet<_>>(),
            expected_t
        );
        assert_eq!(
            dst.i_row.iter().cloned().collect::<BTreeSet<_>>(),
            expected_i
        );
        // The transposed dual lists are again {Q_i, Q_i P} pointwise.
        let p = dst.orbit.j_perm(1, 3).unwrap();
        let mut expected = BTreeSet::new();
        for i in [0i64, 3, 6, 9] {
            expected.insert(dst.orbit.q_perm(i).images().to_vec());
            expected.insert(dst.orbit.q_perm(i).compose(&p).images().to_vec());
        }
        assert_eq!(perm_set(dst.system.h0()), expected);
    }
    report(2, "octatonic tables");
}

#[test]
fn criterion_03_pr_products() {
    let cases = [
        (seg(&[0, 4, 7]), 9i64, 8usize),
        (seg(&[0, 4, 1]), 3, 8),
        (seg(&[0, 4, 10]), 6, 4),
    ];
    for (seed, q, order) in cases {
        let orbit = ti_orbit(&seed).unwrap();
        let p = orbit.j_perm(1, 3).unwrap();
        let r = orbit.j_perm(1, 2).unwrap();
        assert_eq!(p.compose(&r), orbit.q_perm(q), "P*R for {seed}");
        let pr = close_generators(Arc::clone(orbit.carrier()), &[p, r]).unwrap();
        assert_eq!(pr.order(), order, "<P,R> order for {seed}");
        if order == 4 {
            assert!(is_dihedral_of_order(&pr, 4));
            assert!(pr.elements().iter().all(|e| e.order() <= 2), "Klein group");
        } else {
            assert!(is_dihedral_of_order(&pr, 8));
        }
    }
    report(3, "PR products");
}

#[test]
fn criterion_04_lr_identities_and_qbar() {
    let major = ti_orbit(&seg(&[0, 4, 7])).unwrap();
    let l = major.j_perm(2, 3).unwrap();
    let r = major.j_perm(1, 2).unwrap();
    assert_eq!(l.compose(&r), major.q_perm(5));

    let jet = ti_orbit(&seg(&[0, 4, 1])).unwrap();
    let l = jet.j_perm(2, 3).unwrap();
    let r = jet.j_perm(1, 2).unwrap();
    assert_eq!(l.compose(&r), jet.q_perm(11));

    // M7 Qbar_5 = Qbar_5 M7 on the 48-element units={1,5,7,11} system.
    let (system, _) = affine_system(&seg(&[0, 4, 7]), &[1, 5, 7, 11]).unwrap();
    assert_eq!(system.carrier().len(), 48);
    let m7 = AffineMap::multiplication(M12, 7);
    for y in system.carrier().elements() {
        let lhs = m7.apply(&system.op_qbar(5, y).unwrap()).unwrap();
        let rhs = system.op_qbar(5, &m7.apply(y).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "at {y}");
    }
    report(4, "LR identities and Qbar commutation");
}

#[test]
fn criterion_05_affine_commutation_exhaustive() {
    let maps = all_affine_maps(M12);
    assert_eq!(maps.len(), 144);
    let mut j_checks = 0usize;
    for seed in [seg(&[0, 4, 7]), seg(&[0, 4, 1]), seg(&[0, 4, 10])] {
        let orbit = ti_orbit(&seed).unwrap();
        for f in &maps {
            let report = verify_affine_commutation(&orbit, f).unwrap();
            assert!(
                report.pass(),
                "counterexample for {f} on {seed}: {:?}",
                report.counterexample
            );
            j_checks += report.checks;
        }
    }
    assert!(j_checks > 0);

    // W and Qbar on the 48-element affine orbit system, all 144 maps.
    let (system, _) = affine_system(&seg(&[0, 4, 7]), &[1, 5, 7, 11]).unwrap();
    for f in &maps {
        let report = verify_affine_commutation_on_system(&system, f).unwrap();
        assert!(
            report.pass(),
            "counterexample for {f}: {:?}",
            report.counterexample
        );
    }
    report(5, "affine commutation, zero counterexamples");
}

#[test]
fn criterion_06_morphism_classification() {
    let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();

    // (M7, phi) between the 24-element systems is an isomorphism.
    let m7 = morphism_from_affine(
        &orbit,
        &[(2, 3), (1, 2)],
        &AffineMap::multiplication(M12, 7),
    )
    .unwrap();
    assert_eq!(m7.on_sub_orbit.source().carrier().len(), 24);
    assert_eq!(m7.on_sub_orbit.target().carrier().len(), 24);
    let class = m7.on_sub_orbit.classify();
    assert!(class.monic && class.epic && class.iso);

    // (M10, psi) is neither monic nor epic.
    let m10 = morphism_from_affine(
        &orbit,
        &[(2, 3), (1, 2)],
        &AffineMap::multiplication(M12, 10),
    )
    .unwrap();
    let class = m10.on_sub_orbit.classify();
    assert!(!class.monic && !class.epic && !class.iso);

    // aff(7,7) restricted to the PR cover systems is an isomorphism onto the
    // (1,5,2)-class cover.
    let aff77 =
        morphism_from_affine(&orbit, &[(1, 3), (1, 2)], &AffineMap::new(M12, 7, 7)).unwrap();
    assert_eq!(aff77.onto_image.source().carrier().len(), 8);
    assert_eq!(aff77.onto_image.target().carrier().len(), 8);
    assert!(aff77.onto_image.classify().iso);
    let target_seed = aff77.target_orbit.seed().clone();
    assert_eq!(target_seed, seg(&[7, 11, 8]));

    // Three-way equivalences hold in both pictures on every constructed
    // morphism: classify() itself asserts f/phi agreement; additionally the
    // intervallic classification agrees with the transformational one.
    for morphism in [&m7, &m10, &aff77] {
        let am = &morphism.on_sub_orbit;
        let gm = gis_morphism_from_action_morphism(am).unwrap();
        assert_eq!(gm.classify(), am.classify());
    }
    report(6, "morphism classification");
}

#[test]
fn criterion_07_sub_dual_theorem() {
    // The three octatonic systems: building them verifies all six clauses.
    let table = build_octatonic_table(OctatonicId::O01).unwrap();
    assert_eq!(table.len(), 3);

    // The <P,R>-cover system with swapped roles.
    let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();
    let ti = orbit.ti_perm_group();
    let ctx = contextual_group(&orbit);
    let pr = close_generators(
        Arc::clone(orbit.carrier()),
        &[orbit.j_perm(1, 3).unwrap(), orbit.j_perm(1, 2).unwrap()],
    )
    .unwrap();
    let system = build_sub_dual(ctx.clone(), ti.clone(), pr, &seg(&[0, 4, 7])).unwrap();
    assert_eq!(system.sub_carrier().len(), 8);

    // One randomized subgroup of T/I per run; the seed is printed so any
    // failure is reproducible.
    let seed_value: u64 = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap()
        .as_nanos() as u64;
    println!("[acceptance] criterion 07 random seed: {seed_value}");
    let mut state = seed_value | 1;
    let mut next = |bound: usize| -> usize {
        // xorshift64*; plenty for picking test cases.
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        ((state.wrapping_mul(0x2545F4914F6CDD1D) >> 33) as usize) % bound
    };
    let g1 = ti.elements()[next(ti.order())].clone();
    let g2 = ti.elements()[next(ti.order())].clone();
    let g0 = close_generators(Arc::clone(orbit.carrier()), &[g1, g2]).unwrap();
    let base = orbit.carrier().get(next(orbit.carrier().len())).clone();
    let random_system = build_sub_dual(ti, ctx, g0.clone(), &base).unwrap();
    assert_eq!(
        random_system.sub_carrier().len(),
        random_system.g0_restricted().order(),
        "random G_0 of order {}",
        g0.order()
    );
    report(7, "sub dual group theorem, six clauses");
}

#[test]
fn criterion_08_retro_duality() {
    let duality = build_retro_duality(&seg(&[0, 4, 7])).unwrap();
    assert_eq!(duality.system.carrier().len(), 48);
    assert_eq!(duality.ti_retro.order(), 48);
    assert_eq!(duality.plr_retro.order(), 48);
    assert!(is_simply_transitive(&duality.ti_retro));
    assert!(is_simply_transitive(&duality.plr_retro));
    assert!(commute_elementwise(&duality.ti_retro, &duality.plr_retro).unwrap());
    assert_eq!(dual_group(&duality.ti_retro).unwrap(), duality.plr_retro);
    assert_eq!(dual_group(&duality.plr_retro).unwrap(), duality.ti_retro);

    let t6 = duality
        .system
        .affine_perm(&AffineMap::transposition(M12, 6))
        .unwrap();
    let retro = duality.system.retro_perm();
    let expected: BTreeSet<Vec<usize>> = [
        Perm::identity(48).images().to_vec(),
        t6.images().to_vec(),
        retro.images().to_vec(),
        t6.compose(&retro).images().to_vec(),
    ]
    .into_iter()
    .collect();
    let actual: BTreeSet<Vec<usize>> = duality
        .intersection
        .iter()
        .map(|e| e.images().to_vec())
        .collect();
    assert_eq!(actual, expected);
    report(8, "retro duality and intersection");
}

#[test]
fn criterion_09_rich() {
    for root in [seg(&[0, 4, 7]), seg(&[1, 5, 2])] {
        let system = RetroSystem::standard(&root).unwrap();
        for y in system.carrier().elements() {
            assert_eq!(rich(y).unwrap(), rich_by_search(y).unwrap(), "at {y}");
        }
    }
    let mut y = seg(&[3, 8, 0]);
    for expected in [
        seg(&[8, 0, 5]),
        seg(&[0, 5, 9]),
        seg(&[5, 9, 2]),
        seg(&[9, 2, 6]),
    ] {
        y = rich(&y).unwrap();
        assert_eq!(y, expected);
    }
    report(9, "RICH closed form and chain");
}

#[test]
fn criterion_10_network_fixtures() {
    let docs = [
        ("opening theme", figures::opening_theme_network()),
        ("RICH chain", figures::rich_chain_network()),
        ("summary network", figures::summary_network()),
        ("M7/M10 network", build_m7_m10_network()),
    ];
    for (name, doc) in docs {
        let network = resolve_network(doc).unwrap();
        let report = verify_network(&network);
        let affine_edges = report
            .edges
            .iter()
            .filter(|e| e.op.starts_with("aff") || e.op.starts_with('M'))
            .count();
        for check in &report.edges {
            assert!(
                check.pass,
                "{name}: edge {} -{}-> {} computed {:?}",
                check.from, check.op, check.to, check.computed
            );
        }
        for square in &report.squares {
            assert!(square.pass, "{name}: square {:?}", square.corners);
        }
        if name != "RICH chain" {
            assert!(affine_edges > 0, "{name} should contain affine edges");
        }
    }
    // The commuting square of the introduction is present in the summary
    // network and holds.
    let summary = resolve_network(figures::summary_network()).unwrap();
    let summary_report = verify_network(&summary);
    assert_eq!(summary_report.squares.len(), 1);
    assert!(summary_report.squares[0].pass);
    assert_eq!(
        summary_report.squares[0].via_second.as_ref().unwrap(),
        &seg(&[1, 5, 4])
    );
    report(10, "network fixtures verify green");
}

#[test]
fn criterion_11_covers() {
    let reports = enumerate_octatonic_covers(OctatonicId::O01);
    assert_eq!(reports.len(), 56);
    for r in &reports {
        // cover_check itself computed the iff both ways and would have
        // errored on disagreement; re-assert the reported facts.
        assert!(r.simply_transitive);
        assert_eq!(r.stabilizer.len(), 1);
        assert_eq!(r.cover.len(), 8);
    }
    // The set-symmetric chord {0,3,6} is among them.
    let dim: BTreeSet<_> = [0i64, 3, 6].iter().map(|&v| M12.reduce(v)).collect();
    assert!(reports.iter().any(|r| r.subset == dim));
    // I_6 fixes it as a set but lies outside the stabilizer.
    let i6 = AffineMap::inversion(M12, 6);
    let image: BTreeSet<_> = dim.iter().map(|&x| i6.apply_class(x)).collect();
    assert_eq!(image, dim);
    let g0 = setwise_stabilizer(
        &ti_group(M12),
        &gis_core::subdual::octatonic_set(OctatonicId::O01),
    );
    assert!(!g0.contains(&i6));

    let triples = translation_fixed_triples(M12);
    let expected: Vec<BTreeSet<_>> = [[0i64, 4, 8], [1, 5, 9], [2, 6, 10], [3, 7, 11]]
        .iter()
        .map(|t| t.iter().map(|&v| M12.reduce(v)).collect())
        .collect();
    assert_eq!(triples, expected);
    report(11, "octatonic covers and fixed triples");
}

#[test]
fn criterion_12_functor_round_trips() {
    let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();
    let ti = orbit.ti_perm_group();
    let ctx = contextual_group(&orbit);
    let z12_action = action_from_gis(&canonical_gis(&AbstractGroup::cyclic(12)));
    let dihedral8 = {
        let maps: Vec<AffineMap> = ["T0", "T3", "T6", "T9", "I1", "I4", "I7", "I10"]
            .iter()
            .map(|s| AffineMap::parse(s, M12).unwrap())
            .collect();
        action_from_gis(&canonical_gis(
            &AbstractGroup::from_affine_maps(&maps).unwrap(),
        ))
    };

    // Transformational round trip on the triad system.
    for action in [&ti, &ctx] {
        let gis = gis_from_action(action).unwrap();
        assert_eq!(&action_from_gis(&gis), action);
        // Duality is involutive.
        assert_eq!(&dual_group(&dual_group(action).unwrap()).unwrap(), action);
    }
    // Canonical systems: Z_12 and the order-8 dihedral group.
    fn round_trip<P: gis_core::groupcore::Point>(action: &FiniteGroup<P>) {
        let gis = gis_from_action(action).unwrap();
        assert_eq!(&action_from_gis(&gis), action);
        assert_eq!(&dual_group(&dual_group(action).unwrap()).unwrap(), action);
    }
    round_trip(&z12_action);
    round_trip(&dihedral8);
    assert_eq!(z12_action.order(), 12);
    assert_eq!(dihedral8.order(), 8);
    report(12, "functor round trips");
}

#[test]
fn criterion_13_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_gis");
    let dir = tempfile::tempdir().unwrap();
    let fixtures_dir = dir.path().join("fixtures");

    let run = |args: &[&str]| -> (Vec<u8>, i32) {
        let out = Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .env_remove("GIS_MODULUS")
            .output()
            .expect("binary runs");
        (out.stdout, out.status.code().unwrap_or(-1))
    };

    let (first, code) = run(&["fixtures", "-o", fixtures_dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(!first.is_empty());

    let summary = fixtures_dir.join("schoenberg_summary.json");
    let summary = summary.to_str().unwrap();
    let dot_a = dir.path().join("a.dot");
    let dot_b = dir.path().join("b.dot");
    let commands: Vec<Vec<&str>> = vec![
        vec!["contextual", "--seed", "0,4,7"],
        vec!["covers", "--octatonic", "01"],
        vec!["check-network", summary],
    ];
    for args in &commands {
        let (a, code_a) = run(args);
        let (b, code_b) = run(args);
        assert_eq!(code_a, 0, "{args:?}");
        assert_eq!(code_b, 0);
        assert_eq!(a, b, "output of {args:?} is not byte-stable");
        assert!(!a.is_empty());
    }
    let (_, code) = run(&["export-dot", summary, "-o", dot_a.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, code) = run(&["export-dot", summary, "-o", dot_b.to_str().unwrap()]);
    assert_eq!(code, 0);
    let a = std::fs::read(&dot_a).unwrap();
    let b = std::fs::read(&dot_b).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());

    report(13, "CLI determinism");
}
