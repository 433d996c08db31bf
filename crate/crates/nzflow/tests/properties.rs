//! Property tests over seeded random multigraphs: oracle self-consistency,
//! orientation-independence, format round-trips, and end-to-end generator
//! soundness.

use num_bigint::BigUint;
use nzflow::census::count_nz_flows;
use nzflow::connectivity::is_k_edge_connected;
use nzflow::cover::z6_flow_family;
use nzflow::families::random_multigraph;
use nzflow::flow::{is_nowhere_zero, validate_flow, Flow};
use nzflow::format::{parse_graph, serialize_graph};
use nzflow::graph::Multigraph;
use nzflow::group::GroupSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The number of nowhere-zero flows depends only on the group order.
    #[test]
    fn group_order_invariance(seed in 0u64..100_000) {
        let g = random_multigraph(seed);
        let z4 = count_nz_flows(&g, GroupSpec::Cyclic(4)).unwrap();
        let z2x2 = count_nz_flows(&g, GroupSpec::Z2xZ2).unwrap();
        prop_assert_eq!(z4, z2x2);
    }

    /// Reversing a stored edge direction and negating every flow value on it
    /// changes neither validity nor the nowhere-zero property.
    #[test]
    fn orientation_is_irrelevant(seed in 0u64..100_000) {
        let g = random_multigraph(seed);
        let group = GroupSpec::Z2xZ3;
        let flows = nzflow::census::enumerate_nz_flows(&g, group, 8).unwrap();
        prop_assume!(!flows.is_empty());
        let flip = g.edges()[seed as usize % g.m()].id;
        let reversed = Multigraph::from_edges(
            g.n(),
            &g.edges()
                .iter()
                .map(|e| if e.id == flip { (e.head, e.tail) } else { (e.tail, e.head) })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        for f in flows {
            let mut rf = f.clone();
            rf.set(flip, group.neg(f.value(flip).unwrap()));
            prop_assert!(validate_flow(&reversed, &rf).unwrap());
            prop_assert_eq!(is_nowhere_zero(&f), is_nowhere_zero(&rf));
        }
    }

    /// Serialize-then-parse is the identity on canonical text.
    #[test]
    fn graph_format_round_trip(seed in 0u64..100_000) {
        let g = random_multigraph(seed);
        let text = serialize_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&g, &back);
        prop_assert_eq!(serialize_graph(&back), text);
    }

    /// Every census flow validates, is nowhere-zero, and appears once.
    #[test]
    fn census_enumeration_is_sound(seed in 0u64..100_000) {
        let g = random_multigraph(seed);
        let group = GroupSpec::Z2xZ2;
        let flows = nzflow::census::enumerate_nz_flows(&g, group, 2_000).unwrap();
        let mut keys = std::collections::BTreeSet::new();
        for f in &flows {
            prop_assert!(validate_flow(&g, f).unwrap());
            prop_assert!(is_nowhere_zero(f));
            prop_assert!(keys.insert(f.key()));
        }
        if flows.len() < 2_000 {
            let count = count_nz_flows(&g, group).unwrap();
            prop_assert_eq!(BigUint::from(flows.len() as u64), count);
        }
    }

    /// End to end: on 2-edge-connected random inputs the Z6 pipeline emits
    /// distinct valid flows, never more than the census.
    #[test]
    fn z6_pipeline_sound_on_random_graphs(seed in 0u64..100_000) {
        let g = random_multigraph(seed);
        prop_assume!(g.n() >= 2 && is_k_edge_connected(&g, 2));
        let flows = z6_flow_family(&g, 4_000).unwrap();
        let census = count_nz_flows(&g, GroupSpec::Z2xZ3).unwrap();
        prop_assert!(BigUint::from(flows.len() as u64) <= census);
        let mut keys = std::collections::BTreeSet::new();
        for f in &flows {
            prop_assert!(validate_flow(&g, f).unwrap());
            prop_assert!(is_nowhere_zero(f));
            prop_assert!(keys.insert(f.key()));
        }
        let fully_enumerated = flows.len() < 4_000;
        if fully_enumerated {
            // The guarantee applies in full only to complete streams.
            let bound = nzflow::bounds::guaranteed_bound(
                nzflow::bounds::BoundVariant::Z6TwoEc,
                g.n() as u64,
                g.m() as u64,
            );
            prop_assert!(BigUint::from(flows.len() as u64) >= bound);
        }
    }
}

/// Flip families over irregular tree pairs: every flip branch must keep the
/// pair two disjoint spanning trees (the family builder validates each flip
/// internally and errors otherwise).
#[test]
fn flip_family_valid_on_random_structures() {
    use nzflow::connectivity::{is_spanning_tree, pack_two_spanning_trees};
    use nzflow::families::SplitMix64;
    // Random doubled trees expose leaf and degree-(2,2) flips of all shapes.
    for seed in 0..25u64 {
        let mut rng = SplitMix64::new(seed.wrapping_mul(77) + 5);
        let n = 3 + rng.below(5) as usize;
        let mut edges = Vec::new();
        for v in 1..n {
            let parent = rng.below(v as u64) as usize;
            edges.push((parent, v));
        }
        let g = nzflow::families::doubled_tree(n, &edges).unwrap();
        let pair = pack_two_spanning_trees(&g).unwrap();
        let family = nzflow::trees::tree_pair_family(&g, &pair.t1, &pair.t2).unwrap();
        assert!(!family.is_empty(), "seed {seed}");
        for p in &family {
            assert!(is_spanning_tree(&g, &p.t1) && is_spanning_tree(&g, &p.t2));
            assert!(p.t1.is_disjoint(&p.t2));
        }
    }
    // Random 4-edge-connected multigraphs exercise the mirror branches.
    for seed in 0..10u64 {
        let n = 4 + (seed % 3) as usize;
        let (g, _) = nzflow::families::random_k_ec(n, 4, seed + 100).unwrap();
        let pair = pack_two_spanning_trees(&g).expect("4ec graphs pack");
        let family = nzflow::trees::tree_pair_family(&g, &pair.t1, &pair.t2).unwrap();
        for p in &family {
            assert!(is_spanning_tree(&g, &p.t1) && is_spanning_tree(&g, &p.t2));
            assert!(p.t1.is_disjoint(&p.t2));
        }
    }
}

/// Random 3-edge-connected multigraphs run the full Z6 pipeline within the
/// census; random 4-edge-connected ones always admit the Z4 family.
#[test]
fn random_connected_families_end_to_end() {
    for seed in 0..12u64 {
        let n = 4 + (seed % 4) as usize; // 4..=7
        let (g3, _) = nzflow::families::random_k_ec(n, 3, seed).unwrap();
        let flows = z6_flow_family(&g3, 50_000).unwrap();
        let bound = nzflow::bounds::guaranteed_bound(
            nzflow::bounds::BoundVariant::Z6ThreeEc,
            g3.n() as u64,
            g3.m() as u64,
        );
        assert!(BigUint::from(flows.len() as u64) >= bound, "seed {seed}: z6 bound");
        if let Ok(census) = count_nz_flows(&g3, GroupSpec::Z2xZ3) {
            assert!(BigUint::from(flows.len() as u64) <= census, "seed {seed}: z6 census");
        }
        for f in flows.iter().take(25) {
            assert!(validate_flow(&g3, f).unwrap() && is_nowhere_zero(f));
        }

        let (g4, _) = nzflow::families::random_k_ec(n, 4, seed).unwrap();
        let flows4 = nzflow::trees::z4_flow_family(&g4, 50_000)
            .expect("4-edge-connected graphs pack two disjoint spanning trees");
        assert!(flows4.len() >= 2, "seed {seed}: z4 weak bound");
        if let Ok(census) = count_nz_flows(&g4, GroupSpec::Z2xZ2) {
            assert!(BigUint::from(flows4.len() as u64) <= census, "seed {seed}: z4 census");
        }
    }
}

/// Flows transported backwards through a reduction stay valid, nowhere-zero,
/// and pairwise distinct.
#[test]
fn pullback_is_injective_and_sound() {
    for seed in 0..40u64 {
        let g = random_multigraph(seed);
        if g.n() < 3 || !is_k_edge_connected(&g, 2) {
            continue;
        }
        let mut red = nzflow::Reducer::new(g.clone());
        // Contract the first non-loop edge, then suppress any degree-2
        // vertex that appears.
        let e = match g.edges().iter().find(|e| e.tail != e.head) {
            Some(e) => e.id,
            None => continue,
        };
        red.contract_edge(e).unwrap();
        let cur = red.current().clone();
        if let Some(v) = (0..cur.n()).find(|&v| {
            cur.degree(v) == 2 && cur.incident(v).iter().all(|&e| !cur.is_loop(e).unwrap())
        }) {
            red.suppress_deg2(v).unwrap();
        }
        let reduced = red.current().clone();
        let flows: Vec<Flow> =
            match nzflow::census::enumerate_nz_flows(&reduced, GroupSpec::Z2xZ3, 200) {
                Ok(f) => f,
                Err(_) => continue,
            };
        let mut keys = std::collections::BTreeSet::new();
        for f in &flows {
            let back = nzflow::pull_back_flow(f, red.trace()).unwrap();
            assert!(validate_flow(&g, &back).unwrap(), "seed {seed}");
            assert!(keys.insert(back.key()), "seed {seed}: pullback collided");
        }
    }
}

/// Every flow a generator emits appears in the census enumeration.
#[test]
fn generator_streams_are_census_subsets() {
    use std::collections::BTreeSet;
    // Z6 on K4 against the 60-flow census.
    let k4 = nzflow::families::complete(4).unwrap();
    let census: BTreeSet<_> = nzflow::census::enumerate_nz_flows(&k4, GroupSpec::Z2xZ3, 10_000)
        .unwrap()
        .iter()
        .map(|f| f.key())
        .collect();
    for f in z6_flow_family(&k4, 10_000).unwrap() {
        assert!(census.contains(&f.key()));
    }
    // Z4 on the doubled C4.
    let dc4 = nzflow::families::doubled_cycle(4).unwrap();
    let census4: BTreeSet<_> = nzflow::census::enumerate_nz_flows(&dc4, GroupSpec::Z2xZ2, 100_000)
        .unwrap()
        .iter()
        .map(|f| f.key())
        .collect();
    for f in nzflow::trees::z4_flow_family(&dc4, 10_000).unwrap() {
        assert!(census4.contains(&f.key()));
    }
    // Z3 orientations on the tripled triangle, compared as unit flows.
    let tt = nzflow::families::tripled_triangle();
    let census3: BTreeSet<_> = nzflow::census::enumerate_nz_flows(&tt, GroupSpec::Cyclic(3), 10_000)
        .unwrap()
        .iter()
        .map(|f| f.key())
        .collect();
    for o in nzflow::boundary::z3_flow_family(&tt, 10_000).unwrap() {
        assert!(census3.contains(&o.to_flow().key()));
    }
}

/// Three composed lifts on the tripled triangle: every census flow of the
/// reduced graph pulls back to a valid nowhere-zero flow of the original.
#[test]
fn composed_lifts_pull_back_census_flows() {
    let g = nzflow::families::tripled_triangle();
    let mut red = nzflow::Reducer::new(g.clone());
    let picks: Vec<(usize, usize, usize)> = vec![(0, 0, 6), (1, 1, 3), (2, 4, 7)];
    for (v, e1, e2) in picks {
        red.lift_pair(v, e1, e2).unwrap();
    }
    let reduced = red.current().clone();
    let flows = nzflow::census::enumerate_nz_flows(&reduced, GroupSpec::Z2xZ3, 100_000).unwrap();
    assert!(!flows.is_empty());
    let mut keys = std::collections::BTreeSet::new();
    for f in &flows {
        let back = nzflow::pull_back_flow(f, red.trace()).unwrap();
        assert!(validate_flow(&g, &back).unwrap());
        assert!(is_nowhere_zero(&back));
        assert!(keys.insert(back.key()));
    }
}

/// The recursion measure n + m strictly decreases down the Z3 case tree.
#[test]
fn z3_recursion_measure_decreases() {
    let corpus = vec![
        nzflow::families::tripled_triangle(),
        nzflow::families::doubled_complete(4).unwrap(),
        nzflow::families::random_k_ec(5, 6, 11).unwrap().0,
    ];
    fn walk(node: &nzflow::boundary::Z3RecursionNode) {
        for child in &node.children {
            assert!(
                child.n + child.m < node.n + node.m,
                "child ({}, {}) not smaller than parent ({}, {})",
                child.n,
                child.m,
                node.n,
                node.m
            );
            walk(child);
        }
    }
    for g in corpus {
        let (_, root) = nzflow::boundary::z3_flow_family_traced(&g, 10_000).unwrap();
        // The root is a synthetic wrapper holding one node per
        // preorientation; those nodes carry the preprocessed graph size.
        for top in &root.children {
            walk(top);
        }
    }
}
