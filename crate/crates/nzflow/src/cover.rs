//! Anchored chain covers and the Z2xZ3 flow generators built on them: the
//! generic cover construction, the sparse-zero special flow, the cubic
//! toggling family, and the full 6-flow pipeline combining contraction,
//! degree splitting, and the cubic reduction.

use crate::connectivity::{
    self, forest_components, forest_path, leaf_2ec_component,
    require_k_edge_connected,
};
use crate::error::{Error, Result};
use crate::flow::{is_nowhere_zero, validate_flow, Flow};
use crate::graph::{pull_back_flow, EdgeId, Multigraph, Reducer, Vertex};
use crate::group::{GroupElem, GroupSpec};
use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

const Z6: GroupSpec = GroupSpec::Z2xZ3;

/// Shape of one chain of a cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// Single cycle through both endpoints (the first chain is always one).
    Cycle,
    /// Doubled path with subdivisions: at least two cycles in series.
    Proper,
    SingleVertex,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub kind: ChainKind,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    /// `(u, v)` attachment endpoints; equal for a single vertex. The first
    /// chain reuses its cycle's starting vertex for both.
    pub endpoints: (Vertex, Vertex),
}

impl Chain {
    /// Number of cycles inside this chain (its cycle rank).
    pub fn cycle_count(&self) -> usize {
        if self.edges.is_empty() {
            0
        } else {
            self.edges.len() + 1 - self.vertices.len()
        }
    }
}

/// Anchored chain cover: vertex-disjoint chains covering all vertices, the
/// first one a cycle, each later chain tied to the earlier ones by an
/// ordered pair of anchor edges.
#[derive(Clone, Debug)]
pub struct ChainCover {
    pub chains: Vec<Chain>,
    /// `anchors[i]` belongs to `chains[i + 1]`; the first anchor is directed
    /// toward its chain, the second away from it.
    pub anchors: Vec<(EdgeId, EdgeId)>,
    /// Edges in no chain and no anchor (loops always land here).
    pub external: Vec<EdgeId>,
    /// Total number of cycles over all chains.
    pub p: usize,
    /// Maximal anchor subset meeting every vertex an even number of times.
    pub even_anchor_subset: BTreeSet<EdgeId>,
}

impl ChainCover {
    pub fn anchor_edges(&self) -> Vec<EdgeId> {
        self.anchors.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn chain_edge_set(&self) -> BTreeSet<EdgeId> {
        self.chains.iter().flat_map(|c| c.edges.iter().copied()).collect()
    }

    /// Lower bound on generated flows: `2^|X| * 3^p * prod_i c_i`, where
    /// `c_i = 1 + |A' among chain i's anchors|`.
    pub fn certified_bound(&self) -> BigUint {
        let mut out = BigUint::from(1u32) << self.external.len();
        out *= BigUint::from(3u32).pow(self.p as u32);
        for (a1, a2) in &self.anchors {
            let hits = self.even_anchor_subset.contains(a1) as u32
                + self.even_anchor_subset.contains(a2) as u32;
            out *= BigUint::from(1 + hits);
        }
        out
    }
}

/// First cycle (edge ids) of a spanning forest complement inside `edges`,
/// or `None` when `(V, edges)` is a forest. Deterministic: spanning forest
/// greedily by ascending id, first leftover edge closes the cycle.
fn find_cycle_in(g: &Multigraph, edges: &BTreeSet<EdgeId>) -> Option<Vec<EdgeId>> {
    let mut forest: BTreeSet<EdgeId> = BTreeSet::new();
    let mut comp = forest_components(g, &forest);
    for &e in edges {
        let (u, v) = g.endpoints(e).unwrap();
        if u == v {
            return Some(vec![e]);
        }
        if comp[u] == comp[v] {
            let mut cycle = forest_path(g, &forest, u, v);
            cycle.push(e);
            cycle.sort_unstable();
            return Some(cycle);
        }
        forest.insert(e);
        comp = forest_components(g, &forest);
    }
    None
}

/// Closed walk of a cycle as arcs, starting along its lowest-id edge in
/// stored direction.
fn orient_cycle(g: &Multigraph, cycle: &[EdgeId]) -> Vec<(EdgeId, Vertex, Vertex)> {
    let e0 = *cycle.iter().min().unwrap();
    let rec = g.edge(e0).unwrap();
    if rec.tail == rec.head {
        return vec![(e0, rec.tail, rec.head)];
    }
    let start = rec.tail;
    let mut walk = vec![(e0, rec.tail, rec.head)];
    let mut used: BTreeSet<EdgeId> = [e0].into_iter().collect();
    let mut at = rec.head;
    while at != start {
        let next = cycle
            .iter()
            .find(|&&e| !used.contains(&e) && {
                let (a, b) = g.endpoints(e).unwrap();
                a == at || b == at
            })
            .copied()
            .expect("cycle walk must close");
        let to = g.other_end(next, at).unwrap();
        walk.push((next, at, to));
        used.insert(next);
        at = to;
    }
    debug_assert_eq!(walk.len(), cycle.len());
    walk
}

/// Splits a chain's edge set into its cycles. Every chain edge lies on
/// exactly one cycle, so peeling cycles exhausts the set.
fn chain_cycles(g: &Multigraph, chain: &Chain) -> Result<Vec<Vec<EdgeId>>> {
    let mut rest: BTreeSet<EdgeId> = chain.edges.iter().copied().collect();
    let mut out = Vec::new();
    while let Some(cycle) = find_cycle_in(g, &rest) {
        for e in &cycle {
            rest.remove(e);
        }
        out.push(cycle);
    }
    if !rest.is_empty() {
        return Err(Error::Internal("chain is not an edge-disjoint union of cycles".into()));
    }
    Ok(out)
}

/// Shortest non-loop cycle: minimum over edges `e` of (shortest path between
/// the endpoints of `e` avoiding `e`) + 1, scanning ascending edge ids.
fn shortest_cycle(g: &Multigraph) -> Option<Vec<EdgeId>> {
    let mut best: Option<Vec<EdgeId>> = None;
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        // BFS from tail to head avoiding e.
        let mut prev: Vec<Option<EdgeId>> = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[e.tail] = true;
        let mut q = VecDeque::new();
        q.push_back(e.tail);
        'bfs: while let Some(u) = q.pop_front() {
            for f in g.edges() {
                if f.id == e.id || f.tail == f.head {
                    continue;
                }
                let w = if f.tail == u {
                    f.head
                } else if f.head == u {
                    f.tail
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some(f.id);
                    if w == e.head {
                        break 'bfs;
                    }
                    q.push_back(w);
                }
            }
        }
        if !seen[e.head] {
            continue;
        }
        let mut cycle = vec![e.id];
        let mut cur = e.head;
        while cur != e.tail {
            let f = prev[cur].unwrap();
            cycle.push(f);
            cur = g.other_end(f, cur).unwrap();
        }
        cycle.sort_unstable();
        if best.as_ref().map_or(true, |b| cycle.len() < b.len()) {
            best = Some(cycle);
        }
    }
    best
}

/// Maximal subset of `anchors` in which every vertex has even degree,
/// obtained by repeatedly moving a whole cycle of the remainder across.
/// The complement stays acyclic, so at most `n - 1` anchors are left out.
pub fn compute_even_anchor_subset(g: &Multigraph, anchors: &[EdgeId]) -> BTreeSet<EdgeId> {
    let mut rest: BTreeSet<EdgeId> = anchors.iter().copied().collect();
    let mut even = BTreeSet::new();
    while let Some(cycle) = find_cycle_in(g, &rest) {
        for e in cycle {
            rest.remove(&e);
            even.insert(e);
        }
    }
    even
}

/// Builds an anchored chain cover of a 3-edge-connected graph following the
/// constructive existence proof: a shortest cycle seeds the cover, then each
/// round attaches a chain carved out of a leaf 2-edge-connected component of
/// the uncovered remainder. Loops are never placed in chains; they end up
/// external.
pub fn build_anchored_chain_cover(g: &Multigraph) -> Result<ChainCover> {
    require_k_edge_connected(g, 3)?;
    if g.n() < 2 {
        return Err(Error::Precondition("chain cover needs at least two vertices".into()));
    }
    let c1_edges = shortest_cycle(g)
        .ok_or_else(|| Error::Internal("3-edge-connected graph without a cycle".into()))?;
    let mut covered: BTreeSet<Vertex> = BTreeSet::new();
    let mut c1_vertices: BTreeSet<Vertex> = BTreeSet::new();
    for &e in &c1_edges {
        let (u, v) = g.endpoints(e).unwrap();
        c1_vertices.insert(u);
        c1_vertices.insert(v);
    }
    covered.extend(c1_vertices.iter().copied());
    let start = *c1_vertices.iter().min().unwrap();
    let mut chains = vec![Chain {
        kind: ChainKind::Cycle,
        vertices: c1_vertices.into_iter().collect(),
        edges: c1_edges,
        endpoints: (start, start),
    }];
    let mut anchors: Vec<(EdgeId, EdgeId)> = Vec::new();

    while covered.len() < g.n() {
        let q = leaf_2ec_component(g, &covered)?;
        let q_set: BTreeSet<Vertex> = q.iter().copied().collect();
        // Two lowest-id edges from Q into the already covered part.
        let into: Vec<EdgeId> = g
            .edges()
            .iter()
            .filter(|e| {
                (q_set.contains(&e.tail) && covered.contains(&e.head))
                    || (q_set.contains(&e.head) && covered.contains(&e.tail))
            })
            .map(|e| e.id)
            .collect();
        if into.len() < 2 {
            let (_, cut) = connectivity::edge_connectivity(g);
            return Err(Error::NotKEdgeConnected { k: 3, cut });
        }
        let (a1, a2) = (into[0], into[1]);
        let q_end = |e: EdgeId| -> Vertex {
            let (t, h) = g.endpoints(e).unwrap();
            if q_set.contains(&t) {
                t
            } else {
                h
            }
        };
        let (u, v) = (q_end(a1), q_end(a2));
        let chain = if u == v {
            Chain {
                kind: ChainKind::SingleVertex,
                vertices: vec![u],
                edges: Vec::new(),
                endpoints: (u, u),
            }
        } else {
            let edges = minimal_two_path_subgraph(g, &q_set, u, v)?;
            let mut verts: BTreeSet<Vertex> = BTreeSet::new();
            for &e in &edges {
                let (a, b) = g.endpoints(e).unwrap();
                verts.insert(a);
                verts.insert(b);
            }
            let rank = edges.len() + 1 - verts.len();
            Chain {
                kind: if rank == 1 { ChainKind::Cycle } else { ChainKind::Proper },
                vertices: verts.into_iter().collect(),
                edges,
                endpoints: (u, v),
            }
        };
        covered.extend(chain.vertices.iter().copied());
        chains.push(chain);
        anchors.push((a1, a2));
    }

    let chain_edges: BTreeSet<EdgeId> =
        chains.iter().flat_map(|c| c.edges.iter().copied()).collect();
    let anchor_set: BTreeSet<EdgeId> = anchors.iter().flat_map(|&(a, b)| [a, b]).collect();
    let external: Vec<EdgeId> = g
        .edge_ids()
        .into_iter()
        .filter(|e| !chain_edges.contains(e) && !anchor_set.contains(e))
        .collect();
    let p = chains.iter().map(|c| c.cycle_count()).sum();
    let flat: Vec<EdgeId> = anchors.iter().flat_map(|&(a, b)| [a, b]).collect();
    let even_anchor_subset = compute_even_anchor_subset(g, &flat);
    let cover = ChainCover { chains, anchors, external, p, even_anchor_subset };
    validate_cover(g, &cover)?;
    Ok(cover)
}

/// Minimal subgraph of `g[q]` containing two edge-disjoint `u`-`v` paths:
/// take the union of two flow paths, then greedily drop edges (ascending id)
/// while two edge-disjoint paths survive.
fn minimal_two_path_subgraph(
    g: &Multigraph,
    q: &BTreeSet<Vertex>,
    u: Vertex,
    v: Vertex,
) -> Result<Vec<EdgeId>> {
    let inside: Vec<EdgeId> = g
        .edges()
        .iter()
        .filter(|e| e.tail != e.head && q.contains(&e.tail) && q.contains(&e.head))
        .map(|e| e.id)
        .collect();
    let two_paths = |edges: &BTreeSet<EdgeId>| -> bool {
        let sub = subgraph_with_edges(g, edges);
        connectivity::local_edge_connectivity(&sub, u, v) >= 2
    };
    let mut keep: BTreeSet<EdgeId> = inside.iter().copied().collect();
    if !two_paths(&keep) {
        return Err(Error::Internal(format!(
            "leaf block lacks two edge-disjoint paths between {u} and {v}"
        )));
    }
    for e in inside {
        let mut trial = keep.clone();
        trial.remove(&e);
        if two_paths(&trial) {
            keep = trial;
        }
    }
    Ok(keep.into_iter().collect())
}

/// View of `g` keeping every vertex but only the given edges.
fn subgraph_with_edges(g: &Multigraph, edges: &BTreeSet<EdgeId>) -> Multigraph {
    let mut sub = g.clone();
    for e in g.edge_ids() {
        if !edges.contains(&e) {
            sub = sub.delete_edge(e).unwrap().0;
        }
    }
    sub
}

/// Checks every structural invariant of a cover against its graph.
pub fn validate_cover(g: &Multigraph, cover: &ChainCover) -> Result<()> {
    let fail = |msg: String| Err(Error::Internal(format!("invalid chain cover: {msg}")));
    if cover.chains.is_empty() || cover.chains[0].kind != ChainKind::Cycle {
        return fail("first chain must be a cycle".into());
    }
    // Chains partition the vertex set.
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    for c in &cover.chains {
        for &v in &c.vertices {
            if !seen.insert(v) {
                return fail(format!("vertex {v} appears in two chains"));
            }
        }
    }
    if seen.len() != g.n() {
        return fail("chains do not cover every vertex".into());
    }
    // Chain structure: two edge-disjoint endpoint paths, minimal.
    for (i, c) in cover.chains.iter().enumerate() {
        match c.kind {
            ChainKind::SingleVertex => {
                if !c.edges.is_empty() || c.endpoints.0 != c.endpoints.1 {
                    return fail(format!("chain {i} malformed single vertex"));
                }
            }
            _ => {
                let set: BTreeSet<EdgeId> = c.edges.iter().copied().collect();
                let sub = subgraph_with_edges(g, &set);
                let (u, v) = if i == 0 {
                    // The seed cycle: check it is a cycle.
                    if c.edges.len() + 1 != c.vertices.len() + 1 {
                        return fail("first chain is not a single cycle".into());
                    }
                    (c.endpoints.0, c.endpoints.0)
                } else {
                    c.endpoints
                };
                if i > 0 {
                    if connectivity::local_edge_connectivity(&sub, u, v) < 2 {
                        return fail(format!("chain {i} lacks two edge-disjoint paths"));
                    }
                    for &e in &c.edges {
                        let mut trial = set.clone();
                        trial.remove(&e);
                        let tsub = subgraph_with_edges(g, &trial);
                        if connectivity::local_edge_connectivity(&tsub, u, v) >= 2 {
                            return fail(format!("chain {i} is not minimal at edge {e}"));
                        }
                    }
                }
            }
        }
    }
    // Anchor endpoints: near end on the chain, far end strictly earlier.
    let mut earlier: BTreeSet<Vertex> = cover.chains[0].vertices.iter().copied().collect();
    for (i, &(a1, a2)) in cover.anchors.iter().enumerate() {
        let chain = &cover.chains[i + 1];
        if a1 == a2 {
            return fail(format!("chain {} anchors must be distinct", i + 1));
        }
        for (slot, e) in [(0usize, a1), (1, a2)] {
            let (t, h) = g.endpoints(e).unwrap();
            let near = if slot == 0 { chain.endpoints.0 } else { chain.endpoints.1 };
            let far = if t == near {
                h
            } else if h == near {
                t
            } else {
                return fail(format!("anchor {e} misses its chain endpoint"));
            };
            if !earlier.contains(&far) {
                return fail(format!("anchor {e} does not reach an earlier chain"));
            }
        }
        earlier.extend(chain.vertices.iter().copied());
    }
    // External bookkeeping and the edge-count identity
    // m = |X| + (n + p - k) + 2(k - 1).
    let chain_edges = cover.chain_edge_set();
    let anchor_set: BTreeSet<EdgeId> = cover.anchor_edges().into_iter().collect();
    for e in &cover.external {
        if chain_edges.contains(e) || anchor_set.contains(e) {
            return fail(format!("external edge {e} is not external"));
        }
    }
    let k = cover.chains.len();
    if g.m() != cover.external.len() + (g.n() + cover.p - k) + 2 * (k - 1) {
        return fail("edge count identity failed".into());
    }
    // Even anchor subset: evenness and maximality.
    let mut deg = vec![0usize; g.n()];
    for e in &cover.even_anchor_subset {
        let (t, h) = g.endpoints(*e).unwrap();
        deg[t] += 1;
        deg[h] += 1;
    }
    if deg.iter().any(|d| d % 2 == 1) {
        return fail("even anchor subset has an odd vertex".into());
    }
    let rest: BTreeSet<EdgeId> = anchor_set
        .iter()
        .filter(|e| !cover.even_anchor_subset.contains(e))
        .copied()
        .collect();
    if find_cycle_in(g, &rest).is_some() {
        return fail("even anchor subset is not maximal".into());
    }
    Ok(())
}

/// Precomputed orientation data driving the flow generators.
struct GenPlan {
    /// Z2-support: chain edges plus the even anchor subset.
    y_edges: BTreeSet<EdgeId>,
    /// Sign of each directed-subgraph edge relative to stored orientation.
    /// Externals (and loops) are implicitly `+1`.
    externals: Vec<(EdgeId, Vec<(EdgeId, i8)>)>,
    /// Per chain (descending index): correction cycle, anchors, membership
    /// of each anchor in the even subset.
    chain_fixes: Vec<ChainFix>,
    cycle_shifts: Vec<Vec<(EdgeId, i8)>>,
    edge_index: BTreeMap<EdgeId, usize>,
}

struct ChainFix {
    cycle: Vec<(EdgeId, i8)>,
    anchor1: EdgeId,
    anchor2: EdgeId,
    a1_even: bool,
    a2_even: bool,
}

fn arcs_to_signed(g: &Multigraph, arcs: &[(EdgeId, Vertex, Vertex)]) -> Vec<(EdgeId, i8)> {
    arcs.iter()
        .map(|&(e, from, _)| {
            let rec = g.edge(e).unwrap();
            (e, if rec.tail == from { 1 } else { -1 })
        })
        .collect()
}

/// Directed path search over an arc set, ascending edge-id exploration.
fn arc_path(
    arcs: &BTreeMap<EdgeId, (Vertex, Vertex)>,
    allowed: &BTreeSet<EdgeId>,
    from: Vertex,
    to: Vertex,
    n: usize,
) -> Option<Vec<EdgeId>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut prev: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut q = VecDeque::new();
    q.push_back(from);
    while let Some(u) = q.pop_front() {
        for (&e, &(a, b)) in arcs.iter() {
            if a != u || !allowed.contains(&e) || seen[b] {
                continue;
            }
            seen[b] = true;
            prev[b] = Some(e);
            if b == to {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let pe = prev[cur].unwrap();
                    path.push(pe);
                    cur = arcs[&pe].0;
                }
                path.reverse();
                return Some(path);
            }
            q.push_back(b);
        }
    }
    None
}

fn build_plan(g: &Multigraph, cover: &ChainCover) -> Result<GenPlan> {
    let mut arcs: BTreeMap<EdgeId, (Vertex, Vertex)> = BTreeMap::new();
    let mut cycle_shifts_raw: Vec<Vec<(EdgeId, Vertex, Vertex)>> = Vec::new();
    for chain in &cover.chains {
        for cycle in chain_cycles(g, chain)? {
            let walk = orient_cycle(g, &cycle);
            for &(e, a, b) in &walk {
                arcs.insert(e, (a, b));
            }
            cycle_shifts_raw.push(walk);
        }
    }
    // Anchor directions: first toward the chain, second away from it.
    for (i, &(a1, a2)) in cover.anchors.iter().enumerate() {
        let chain = &cover.chains[i + 1];
        let far = |e: EdgeId, near: Vertex| g.other_end(e, near).unwrap();
        arcs.insert(a1, (far(a1, chain.endpoints.0), chain.endpoints.0));
        arcs.insert(a2, (chain.endpoints.1, far(a2, chain.endpoints.1)));
    }
    // Edges usable when routing for chain i: chains 1..=i and anchors 2..=i.
    let mut allowed_through: Vec<BTreeSet<EdgeId>> = Vec::with_capacity(cover.chains.len());
    let mut acc: BTreeSet<EdgeId> = cover.chains[0].edges.iter().copied().collect();
    allowed_through.push(acc.clone());
    for (i, chain) in cover.chains.iter().enumerate().skip(1) {
        acc.extend(chain.edges.iter().copied());
        let (a1, a2) = cover.anchors[i - 1];
        acc.insert(a1);
        acc.insert(a2);
        allowed_through.push(acc.clone());
    }
    let all_allowed = allowed_through.last().unwrap().clone();

    // External edges: value flows tail -> head, compensated along a directed
    // path head -> tail. Loops need no path.
    let mut externals = Vec::new();
    for &e in &cover.external {
        let rec = g.edge(e).unwrap();
        if rec.tail == rec.head {
            externals.push((e, Vec::new()));
            continue;
        }
        let path = arc_path(&arcs, &all_allowed, rec.head, rec.tail, g.n())
            .ok_or(Error::CoverPath { chain: 0 })?;
        let signed = path
            .iter()
            .map(|&pe| {
                let (from, _) = arcs[&pe];
                let prec = g.edge(pe).unwrap();
                (pe, if prec.tail == from { 1i8 } else { -1 })
            })
            .collect();
        externals.push((e, signed));
    }

    // Correction cycle for chain i: anchor1 in, route through the chain,
    // anchor2 out, then back through strictly earlier chains.
    let mut chain_fixes = Vec::new();
    for i in (1..cover.chains.len()).rev() {
        let chain = &cover.chains[i];
        let (a1, a2) = cover.anchors[i - 1];
        let chain_set: BTreeSet<EdgeId> = chain.edges.iter().copied().collect();
        let through = arc_path(&arcs, &chain_set, chain.endpoints.0, chain.endpoints.1, g.n())
            .ok_or(Error::CoverPath { chain: i })?;
        let back = arc_path(
            &arcs,
            &allowed_through[i - 1],
            arcs[&a2].1,
            arcs[&a1].0,
            g.n(),
        )
        .ok_or(Error::CoverPath { chain: i })?;
        let mut cycle_edges = vec![a1];
        cycle_edges.extend(through);
        cycle_edges.push(a2);
        cycle_edges.extend(back);
        let signed = cycle_edges
            .iter()
            .map(|&pe| {
                let (from, _) = arcs[&pe];
                let prec = g.edge(pe).unwrap();
                (pe, if prec.tail == from { 1i8 } else { -1 })
            })
            .collect();
        chain_fixes.push(ChainFix {
            cycle: signed,
            anchor1: a1,
            anchor2: a2,
            a1_even: cover.even_anchor_subset.contains(&a1),
            a2_even: cover.even_anchor_subset.contains(&a2),
        });
    }

    let cycle_shifts = cycle_shifts_raw
        .into_iter()
        .map(|walk| arcs_to_signed(g, &walk))
        .collect();
    let mut y_edges = cover.chain_edge_set();
    y_edges.extend(cover.even_anchor_subset.iter().copied());
    let edge_index = g.edges().iter().enumerate().map(|(i, e)| (e.id, i)).collect();
    Ok(GenPlan { y_edges, externals, chain_fixes, cycle_shifts, edge_index })
}

fn add_along(values: &mut [u8], plan: &GenPlan, path: &[(EdgeId, i8)], amount: u8) {
    for &(e, sign) in path {
        let idx = plan.edge_index[&e];
        let delta = if sign > 0 { amount } else { (3 - amount) % 3 };
        values[idx] = (values[idx] + delta) % 3;
    }
}

fn amount_along_arc(values: &[u8], plan: &GenPlan, e: EdgeId, sign: i8) -> u8 {
    let v = values[plan.edge_index[&e]];
    if sign > 0 {
        v
    } else {
        (3 - v) % 3
    }
}

fn anchor_sign(_plan: &GenPlan, fix: &ChainFix, e: EdgeId) -> i8 {
    fix.cycle
        .iter()
        .find(|&&(pe, _)| pe == e)
        .map(|&(_, s)| s)
        .unwrap_or_else(|| {
            debug_assert!(false, "anchor must lie on its correction cycle");
            1
        })
}

fn assemble_flow(g: &Multigraph, plan: &GenPlan, values: &[u8]) -> Flow {
    let map: BTreeMap<EdgeId, GroupElem> = g
        .edges()
        .iter()
        .map(|e| {
            let z2 = u8::from(plan.y_edges.contains(&e.id));
            let z3 = values[plan.edge_index[&e.id]];
            (e.id, GroupElem { a: z2, b: z3 })
        })
        .collect();
    Flow::new(Z6, map)
}

/// Emits distinct nowhere-zero Z2xZ3 flows from a cover, in lexicographic
/// order of the choice vector (externals ascending, then chain corrections
/// from the last chain down, then cycle shifts), up to `limit`. Fully
/// enumerated, the stream has at least `2^|X| * 3^(p + |A'|/2)` flows.
pub fn generate_from_cover(g: &Multigraph, cover: &ChainCover, limit: usize) -> Result<Vec<Flow>> {
    let plan = build_plan(g, cover)?;
    let mut values = vec![0u8; g.m()];
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    fn recurse(
        g: &Multigraph,
        plan: &GenPlan,
        values: &mut Vec<u8>,
        stage: usize,
        out: &mut Vec<Flow>,
        seen: &mut BTreeSet<Vec<(EdgeId, u8, u8)>>,
        limit: usize,
    ) -> Result<()> {
        if out.len() >= limit {
            return Ok(());
        }
        let ne = plan.externals.len();
        let nf = plan.chain_fixes.len();
        let nc = plan.cycle_shifts.len();
        if stage < ne {
            let (e, ref path) = plan.externals[stage];
            let idx = plan.edge_index[&e];
            for c in [1u8, 2] {
                values[idx] = c;
                add_along(values, plan, path, c);
                recurse(g, plan, values, stage + 1, out, seen, limit)?;
                add_along(values, plan, path, (3 - c) % 3);
                values[idx] = 0;
            }
            return Ok(());
        }
        if stage < ne + nf {
            let fix = &plan.chain_fixes[stage - ne];
            let s1 = anchor_sign(plan, fix, fix.anchor1);
            let s2 = anchor_sign(plan, fix, fix.anchor2);
            let amt1 = amount_along_arc(values, plan, fix.anchor1, s1);
            let amt2 = amount_along_arc(values, plan, fix.anchor2, s2);
            for q in 0u8..3 {
                if (!fix.a1_even && q == amt1) || (!fix.a2_even && q == amt2) {
                    continue;
                }
                add_along(values, plan, &fix.cycle, (3 - q) % 3);
                recurse(g, plan, values, stage + 1, out, seen, limit)?;
                add_along(values, plan, &fix.cycle, q);
            }
            return Ok(());
        }
        if stage < ne + nf + nc {
            let cycle = &plan.cycle_shifts[stage - ne - nf];
            for r in 0u8..3 {
                add_along(values, plan, cycle, r);
                recurse(g, plan, values, stage + 1, out, seen, limit)?;
                add_along(values, plan, cycle, (3 - r) % 3);
            }
            return Ok(());
        }
        let flow = assemble_flow(g, plan, values);
        if !validate_flow(g, &flow)? || !is_nowhere_zero(&flow) {
            return Err(Error::Internal("cover generator produced an invalid flow".into()));
        }
        if seen.insert(flow.key()) {
            out.push(flow);
        }
        Ok(())
    }
    recurse(g, &plan, &mut values, 0, &mut out, &mut seen, limit)?;
    Ok(out)
}

/// One nowhere-zero Z2xZ3 flow whose Z3 part vanishes only on chain edges,
/// on at most a third of them: externals carry 1, every anchor is corrected
/// to a nonzero amount, and each cycle takes the shift minimizing its zeros.
pub fn special_sparse_zero_flow(g: &Multigraph, cover: &ChainCover) -> Result<Flow> {
    let plan = build_plan(g, cover)?;
    let mut values = vec![0u8; g.m()];
    for (e, path) in &plan.externals {
        let idx = plan.edge_index[e];
        values[idx] = 1;
        add_along(&mut values, &plan, path, 1);
    }
    for fix in &plan.chain_fixes {
        let s1 = anchor_sign(&plan, fix, fix.anchor1);
        let s2 = anchor_sign(&plan, fix, fix.anchor2);
        let amt1 = amount_along_arc(&values, &plan, fix.anchor1, s1);
        let amt2 = amount_along_arc(&values, &plan, fix.anchor2, s2);
        let q = (0u8..3)
            .find(|&q| q != amt1 && q != amt2)
            .ok_or_else(|| Error::Internal("no anchor correction available".into()))?;
        add_along(&mut values, &plan, &fix.cycle, (3 - q) % 3);
    }
    for cycle in &plan.cycle_shifts {
        let zeros = |values: &[u8], r: u8| -> usize {
            cycle
                .iter()
                .filter(|&&(e, sign)| {
                    let delta = if sign > 0 { r } else { (3 - r) % 3 };
                    (values[plan.edge_index[&e]] + delta) % 3 == 0
                })
                .count()
        };
        let best = (0u8..3).min_by_key(|&r| (zeros(&values, r), r)).unwrap();
        add_along(&mut values, &plan, cycle, best);
        debug_assert!(zeros(&values, 0) * 3 <= cycle.len());
    }
    let flow = assemble_flow(g, &plan, &values);
    if !validate_flow(g, &flow)? || !is_nowhere_zero(&flow) {
        return Err(Error::Internal("special flow construction failed".into()));
    }
    // Z3 zeros allowed only on chain edges.
    let chain_edges = cover.chain_edge_set();
    let zero_edges: Vec<EdgeId> = flow
        .values()
        .iter()
        .filter(|(_, v)| v.b == 0)
        .map(|(&e, _)| e)
        .collect();
    if zero_edges.iter().any(|e| !chain_edges.contains(e)) {
        return Err(Error::Internal("special flow has a zero off the chains".into()));
    }
    if 3 * zero_edges.len() > chain_edges.len() {
        return Err(Error::Internal("special flow has too many zero edges".into()));
    }
    Ok(flow)
}

/// Structure extracted from a cover of a cubic graph, driving the Z2-toggle
/// family: `K` the cycle-covered vertices, `H` all anchors and externals,
/// `W` the chain edges with nonzero Z3 part in the special flow, and `W'` a
/// maximal subset keeping `H + W'` acyclic.
#[derive(Clone, Debug)]
pub struct CubicAnalysis {
    pub k_vertices: BTreeSet<Vertex>,
    pub j_vertices: BTreeSet<Vertex>,
    pub h_edges: BTreeSet<EdgeId>,
    pub q: usize,
    pub w: BTreeSet<EdgeId>,
    pub w_prime: BTreeSet<EdgeId>,
}

pub fn cubic_analysis(g: &Multigraph, cover: &ChainCover, special: &Flow) -> Result<CubicAnalysis> {
    ensure_cubic(g)?;
    let mut k_vertices: BTreeSet<Vertex> = BTreeSet::new();
    for chain in &cover.chains {
        if chain.cycle_count() > 0 {
            k_vertices.extend(chain.vertices.iter().copied());
        }
    }
    let j_vertices: BTreeSet<Vertex> =
        (0..g.n()).filter(|v| !k_vertices.contains(v)).collect();
    let mut h_edges: BTreeSet<EdgeId> = cover.anchor_edges().into_iter().collect();
    h_edges.extend(cover.external.iter().copied());
    if find_cycle_in(g, &h_edges).is_some() {
        return Err(Error::Internal("anchor/external subgraph must be acyclic in cubic graphs".into()));
    }
    let comp = forest_components(g, &h_edges);
    let q = comp.iter().collect::<BTreeSet<_>>().len();
    let chain_edges = cover.chain_edge_set();
    let w: BTreeSet<EdgeId> = chain_edges
        .iter()
        .filter(|&&e| special.value(e).map(|v| v.b != 0).unwrap_or(false))
        .copied()
        .collect();
    // Greedy forest extension of H by W edges.
    let mut forest: BTreeSet<EdgeId> = h_edges.clone();
    let mut w_prime = BTreeSet::new();
    for &e in &w {
        let (u, v) = g.endpoints(e).unwrap();
        let comp = forest_components(g, &forest);
        if comp[u] != comp[v] {
            forest.insert(e);
            w_prime.insert(e);
        }
    }
    Ok(CubicAnalysis { k_vertices, j_vertices, h_edges, q, w, w_prime })
}

fn ensure_cubic(g: &Multigraph) -> Result<()> {
    if (0..g.n()).all(|v| g.degree(v) == 3) && g.loop_ids().is_empty() {
        Ok(())
    } else {
        Err(Error::NotCubic)
    }
}

/// Flow family for cubic 3-edge-connected graphs: the cover generator plus
/// the Z2-toggling branch, deduplicated. Fully enumerated this yields at
/// least `2^(n/5)` flows.
pub fn cubic_flow_family(g: &Multigraph, limit: usize) -> Result<Vec<Flow>> {
    ensure_cubic(g)?;
    require_k_edge_connected(g, 3)?;
    let cover = build_anchored_chain_cover(g)?;
    let mut out = generate_from_cover(g, &cover, limit)?;
    let mut seen: BTreeSet<_> = out.iter().map(|f| f.key()).collect();
    for f in cubic_toggle_family(g, &cover, limit)? {
        if out.len() >= limit {
            break;
        }
        if seen.insert(f.key()) {
            out.push(f);
        }
    }
    Ok(out)
}

/// The toggling branch alone: exactly `2^|W \ W'|` distinct flows obtained
/// by flipping the Z2 part of the special flow around the unique cycle each
/// leftover `W` edge closes in `H + W'`.
pub fn cubic_toggle_family(
    g: &Multigraph,
    cover: &ChainCover,
    limit: usize,
) -> Result<Vec<Flow>> {
    let special = special_sparse_zero_flow(g, cover)?;
    let analysis = cubic_analysis(g, cover, &special)?;
    let mut base_forest: BTreeSet<EdgeId> = analysis.h_edges.clone();
    base_forest.extend(analysis.w_prime.iter().copied());
    let toggles: Vec<EdgeId> =
        analysis.w.iter().filter(|e| !analysis.w_prime.contains(e)).copied().collect();
    let mut cycles = Vec::with_capacity(toggles.len());
    for &e in &toggles {
        let (u, v) = g.endpoints(e).unwrap();
        let mut cyc = forest_path(g, &base_forest, u, v);
        if cyc.is_empty() && u != v {
            return Err(Error::Internal("toggle edge does not close a cycle".into()));
        }
        cyc.push(e);
        cycles.push(cyc);
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << toggles.len().min(63)) {
        if out.len() >= limit {
            break;
        }
        let mut flow = special.clone();
        let mut flips: BTreeMap<EdgeId, u8> = BTreeMap::new();
        for (i, cyc) in cycles.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &e in cyc {
                    *flips.entry(e).or_insert(0) ^= 1;
                }
            }
        }
        for (e, bit) in flips {
            if bit == 1 {
                let v = flow.value(e).unwrap();
                flow.set(e, GroupElem { a: v.a ^ 1, b: v.b });
            }
        }
        if !validate_flow(g, &flow)? || !is_nowhere_zero(&flow) {
            return Err(Error::Internal("toggled flow is invalid".into()));
        }
        out.push(flow);
    }
    Ok(out)
}

/// Full Z2xZ3 pipeline for 2-edge-connected multigraphs: contract 2-cut
/// edges until 3-edge-connected, split to maximum degree 4, run both the
/// dense cover generator and the cubic reduction branch, and pull every flow
/// back to the input graph. Fully enumerated, a 3-edge-connected input
/// yields at least `2^(n/7)` flows and a 2-edge-connected one at least
/// `2^(2(m-n)/9)`.
pub fn z6_flow_family(g: &Multigraph, limit: usize) -> Result<Vec<Flow>> {
    if g.n() == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    require_k_edge_connected(g, 2)?;
    let mut red = Reducer::new(g.clone());
    // Contract edges sitting in 2-edge-cuts until 3-edge-connected.
    while red.current().n() >= 2 {
        let (lambda, cut) = connectivity::edge_connectivity(red.current());
        debug_assert!(lambda >= 2);
        if lambda >= 3 {
            break;
        }
        let e = *cut.crossing.iter().min().unwrap();
        red.contract_edge(e)?;
    }
    if red.current().n() >= 2 {
        connectivity::split_to_max_degree_in(&mut red, 3, 4)?;
    }
    let cur = red.current().clone();
    let (core, loops) = cur.without_loops();

    let mut core_flows: Vec<Flow> = Vec::new();
    if core.m() == 0 {
        core_flows.push(Flow::new(Z6, BTreeMap::new()));
    } else {
        let cover = build_anchored_chain_cover(&core)?;
        core_flows = generate_from_cover(&core, &cover, limit)?;
        let mut seen: BTreeSet<_> = core_flows.iter().map(|f| f.key()).collect();
        // The cubic reduction removes one degree-4 vertex per round and
        // leaves the degree-3 vertices as the cubic graph, so it only makes
        // sense when some exist; otherwise the dense branch already carries
        // the n4/2 exponent.
        let n3 = (0..core.n()).filter(|&v| core.degree(v) == 3).count();
        if core.n() >= 3
            && n3 >= 2
            && (0..core.n()).all(|v| (3..=4).contains(&core.degree(v)))
        {
            let mut sub = Reducer::new(core.clone());
            connectivity::reduce_deg4_to_cubic(&mut sub)?;
            let cubic = sub.current().clone();
            for f in cubic_flow_family(&cubic, limit)? {
                if core_flows.len() >= limit {
                    break;
                }
                let back = pull_back_flow(&f, sub.trace())?;
                if seen.insert(back.key()) {
                    core_flows.push(back);
                }
            }
        }
    }

    // Re-attach loop values (any nonzero element each), then pull back.
    let loop_values = Z6.nonzero_elements();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    'outer: for f in &core_flows {
        let mut stack: Vec<(usize, Flow)> = vec![(0, f.clone())];
        while let Some((i, partial)) = stack.pop() {
            if i == loops.len() {
                let back = pull_back_flow(&partial, red.trace())?;
                if seen.insert(back.key()) {
                    out.push(back);
                }
                if out.len() >= limit {
                    break 'outer;
                }
                continue;
            }
            for &val in loop_values.iter().rev() {
                let mut next = partial.clone();
                next.set(loops[i], val);
                stack.push((i + 1, next));
            }
        }
    }
    Ok(out)
}
