//! Z2xZ2 flow families from disjoint spanning trees: canonical Z2-flows,
//! the 2^q construction over one tree pair, flips generating exponentially
//! many pairs, and the dense 3^(m-2n+2) family.

use crate::connectivity::{forest_components, is_spanning_tree, pack_two_spanning_trees, TreePair};
use crate::error::{Error, Result};
use crate::flow::{is_nowhere_zero, validate_flow, Flow};
use crate::graph::{EdgeId, Multigraph, Vertex};
use crate::group::{GroupElem, GroupSpec};
use std::collections::{BTreeMap, BTreeSet};

const Z4: GroupSpec = GroupSpec::Z2xZ2;

/// Canonical Z2-flow data for a spanning tree: the unique flow extending the
/// all-ones assignment off the tree, and the tree edges it sets to one.
#[derive(Clone, Debug)]
pub struct CanonicalFlowInfo {
    pub tree: BTreeSet<EdgeId>,
    pub flow: Flow,
    pub ones_on_tree: BTreeSet<EdgeId>,
}

impl CanonicalFlowInfo {
    pub fn q(&self) -> usize {
        self.ones_on_tree.len()
    }
}

/// Solves the unique Z2 values on `tree` given values everywhere else, by
/// leaf elimination. Loops contribute nothing and may carry any value.
fn solve_z2_on_tree(
    g: &Multigraph,
    tree: &BTreeSet<EdgeId>,
    fixed: &BTreeMap<EdgeId, u8>,
) -> BTreeMap<EdgeId, u8> {
    let mut values: BTreeMap<EdgeId, u8> = fixed.clone();
    let mut remaining: BTreeSet<EdgeId> = tree.clone();
    let mut deg = vec![0usize; g.n()];
    for &e in tree {
        let (u, v) = g.endpoints(e).unwrap();
        deg[u] += 1;
        deg[v] += 1;
    }
    while !remaining.is_empty() {
        let mut progressed = false;
        for v in 0..g.n() {
            if deg[v] != 1 {
                continue;
            }
            let e = *remaining
                .iter()
                .find(|&&e| {
                    let (a, b) = g.endpoints(e).unwrap();
                    a == v || b == v
                })
                .unwrap();
            let mut sum = 0u8;
            for er in g.edges() {
                if er.id == e || er.tail == er.head {
                    continue;
                }
                if er.tail == v || er.head == v {
                    sum ^= values.get(&er.id).copied().unwrap_or(0);
                }
            }
            values.insert(e, sum);
            remaining.remove(&e);
            let (a, b) = g.endpoints(e).unwrap();
            deg[a] -= 1;
            deg[b] -= 1;
            progressed = true;
        }
        assert!(progressed, "leaf elimination stalled; not a spanning tree");
    }
    values
}

/// Canonical Z2-flow with respect to a spanning tree.
pub fn canonical_z2_flow(g: &Multigraph, tree: &BTreeSet<EdgeId>) -> Result<CanonicalFlowInfo> {
    if !is_spanning_tree(g, tree) {
        return Err(Error::Precondition("not a spanning tree".into()));
    }
    let group = GroupSpec::Cyclic(2);
    let fixed: BTreeMap<EdgeId, u8> =
        g.edge_ids().into_iter().filter(|e| !tree.contains(e)).map(|e| (e, 1)).collect();
    let values = solve_z2_on_tree(g, tree, &fixed);
    let ones_on_tree: BTreeSet<EdgeId> =
        tree.iter().filter(|e| values[e] == 1).copied().collect();
    let flow = Flow::new(
        group,
        values.into_iter().map(|(e, v)| (e, group.elem(v, 0))).collect(),
    );
    debug_assert!(validate_flow(g, &flow).unwrap());
    Ok(CanonicalFlowInfo { tree: tree.clone(), flow, ones_on_tree })
}

/// The 2^q family over one tree pair: the first coordinate is the canonical
/// flow of `t1`; the second ranges over all extensions of assignments to the
/// ones-on-tree set that are 1 outside `t2` and that set. Returns the flows
/// and `q`.
pub fn flows_from_tree_pair(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
) -> Result<(Vec<Flow>, usize)> {
    flows_from_tree_pair_capped(g, t1, t2, usize::MAX)
}

fn flows_from_tree_pair_capped(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
    cap: usize,
) -> Result<(Vec<Flow>, usize)> {
    if !is_spanning_tree(g, t1) || !is_spanning_tree(g, t2) {
        return Err(Error::Precondition("both edge sets must be spanning trees".into()));
    }
    if !t1.is_disjoint(t2) {
        return Err(Error::Precondition("spanning trees must be edge-disjoint".into()));
    }
    let info = canonical_z2_flow(g, t1)?;
    let x: Vec<EdgeId> = info.ones_on_tree.iter().copied().collect();
    let q = x.len();
    let masks = if q >= 63 { u64::MAX } else { 1u64 << q };
    let mut out = Vec::new();
    for mask in 0u64..masks {
        if out.len() >= cap {
            break;
        }
        let mut fixed: BTreeMap<EdgeId, u8> = BTreeMap::new();
        for (i, &e) in x.iter().enumerate() {
            fixed.insert(e, (mask >> i & 1) as u8);
        }
        for e in g.edge_ids() {
            if !t2.contains(&e) && !fixed.contains_key(&e) {
                fixed.insert(e, 1);
            }
        }
        let second = solve_z2_on_tree(g, t2, &fixed);
        let flow = Flow::new(
            Z4,
            g.edge_ids()
                .into_iter()
                .map(|e| {
                    let a = info.flow.value(e).unwrap().a;
                    (e, GroupElem { a, b: second[&e] })
                })
                .collect(),
        );
        if !validate_flow(g, &flow)? || !is_nowhere_zero(&flow) {
            return Err(Error::Internal("tree-pair flow construction failed".into()));
        }
        out.push(flow);
    }
    Ok((out, q))
}

/// Leaf and degree data used to pick flip vertices.
#[derive(Clone, Debug)]
pub struct FlipAnalysis {
    pub l1: BTreeSet<Vertex>,
    pub l2: BTreeSet<Vertex>,
    pub v4: BTreeSet<Vertex>,
    /// Independent subset of `l1 | l2 | v4` in the union graph, at least a
    /// quarter of it.
    pub x: Vec<Vertex>,
}

fn tree_degree(g: &Multigraph, tree: &BTreeSet<EdgeId>, v: Vertex) -> usize {
    tree.iter()
        .map(|&e| {
            let (a, b) = g.endpoints(e).unwrap();
            (a == v) as usize + (b == v) as usize
        })
        .sum()
}

pub fn flip_analysis(g: &Multigraph, t1: &BTreeSet<EdgeId>, t2: &BTreeSet<EdgeId>) -> FlipAnalysis {
    let l1: BTreeSet<Vertex> = (0..g.n()).filter(|&v| tree_degree(g, t1, v) == 1).collect();
    let l2: BTreeSet<Vertex> = (0..g.n()).filter(|&v| tree_degree(g, t2, v) == 1).collect();
    let v4: BTreeSet<Vertex> = (0..g.n())
        .filter(|&v| tree_degree(g, t1, v) == 2 && tree_degree(g, t2, v) == 2)
        .collect();
    // Union of two forests: every subgraph has a vertex of degree <= 3, so a
    // greedy degeneracy-order coloring uses at most 4 colors.
    let union: BTreeSet<EdgeId> = t1.union(t2).copied().collect();
    let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); g.n()];
    for &e in &union {
        let (u, v) = g.endpoints(e).unwrap();
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    let mut removed = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    for _ in 0..g.n() {
        let v = (0..g.n())
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (adj[v].iter().filter(|&&w| !removed[w]).count(), v))
            .unwrap();
        removed[v] = true;
        order.push(v);
    }
    let mut color = vec![usize::MAX; g.n()];
    for &v in order.iter().rev() {
        let used: BTreeSet<usize> =
            adj[v].iter().filter_map(|&w| (color[w] != usize::MAX).then_some(color[w])).collect();
        color[v] = (0..).find(|c| !used.contains(c)).unwrap();
        assert!(color[v] < 4, "union of two forests must be 4-colorable");
    }
    let candidates: BTreeSet<Vertex> =
        l1.union(&l2).copied().chain(v4.iter().copied()).collect();
    let x = (0..4)
        .map(|c| {
            candidates.iter().filter(|&&v| color[v] == c).copied().collect::<Vec<_>>()
        })
        .max_by_key(|class| class.len())
        .unwrap();
    FlipAnalysis { l1, l2, v4, x }
}

fn forest_label_without(
    g: &Multigraph,
    tree: &BTreeSet<EdgeId>,
    v: Vertex,
) -> Vec<usize> {
    let pruned: BTreeSet<EdgeId> = tree
        .iter()
        .filter(|&&e| {
            let (a, b) = g.endpoints(e).unwrap();
            a != v && b != v
        })
        .copied()
        .collect();
    forest_components(g, &pruned)
}

/// One flip at `v`: the leaf exchange when `v` is a leaf of either tree, or
/// the degree-(2,2) exchange. The result is again a disjoint spanning tree
/// pair.
pub fn flip_at(g: &Multigraph, pair: &TreePair, v: Vertex) -> Result<TreePair> {
    let (t1, t2) = (&pair.t1, &pair.t2);
    let d1 = tree_degree(g, t1, v);
    let d2 = tree_degree(g, t2, v);
    let result = if d1 == 1 {
        leaf_flip(g, t1, t2, v).map(|(a, b)| TreePair { t1: a, t2: b })?
    } else if d2 == 1 {
        leaf_flip(g, t2, t1, v).map(|(b, a)| TreePair { t1: a, t2: b })?
    } else if d1 == 2 && d2 == 2 {
        deg22_flip(g, t1, t2, v)?
    } else {
        return Err(Error::Precondition(format!(
            "vertex {v} is neither a leaf nor of degree two in both trees"
        )));
    };
    if !is_spanning_tree(g, &result.t1)
        || !is_spanning_tree(g, &result.t2)
        || !result.t1.is_disjoint(&result.t2)
    {
        return Err(Error::Internal(format!("flip at {v} broke the tree pair")));
    }
    Ok(result)
}

fn tree_edges_at(g: &Multigraph, tree: &BTreeSet<EdgeId>, v: Vertex) -> Vec<EdgeId> {
    tree.iter()
        .filter(|&&e| {
            let (a, b) = g.endpoints(e).unwrap();
            a == v || b == v
        })
        .copied()
        .collect()
}

fn leaf_flip(
    g: &Multigraph,
    ta: &BTreeSet<EdgeId>,
    tb: &BTreeSet<EdgeId>,
    v: Vertex,
) -> Result<(BTreeSet<EdgeId>, BTreeSet<EdgeId>)> {
    let e1 = tree_edges_at(g, ta, v)[0];
    let u = g.other_end(e1, v)?;
    let label = forest_label_without(g, tb, v);
    let e2 = tree_edges_at(g, tb, v)
        .into_iter()
        .find(|&e| label[g.other_end(e, v).unwrap()] == label[u])
        .ok_or_else(|| Error::Internal("leaf flip found no partner edge".into()))?;
    let mut na = ta.clone();
    na.remove(&e1);
    na.insert(e2);
    let mut nb = tb.clone();
    nb.remove(&e2);
    nb.insert(e1);
    Ok((na, nb))
}

fn deg22_flip(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
    v: Vertex,
) -> Result<TreePair> {
    let es1 = tree_edges_at(g, t1, v);
    let es2 = tree_edges_at(g, t2, v);
    let (mut e1, mut e1p) = (es1[0], es1[1]);
    let (mut e2, mut e2p) = (es2[0], es2[1]);
    let far = |e: EdgeId| g.other_end(e, v).unwrap();
    let lab1 = forest_label_without(g, t1, v);
    let lab2 = forest_label_without(g, t2, v);
    let test_a = lab1[far(e2)] != lab1[far(e2p)];
    let test_b = lab2[far(e1)] != lab2[far(e1p)];
    if test_a && test_b {
        let mut n1 = t1.clone();
        let mut n2 = t2.clone();
        for e in [e1, e1p] {
            n1.remove(&e);
            n2.insert(e);
        }
        for e in [e2, e2p] {
            n2.remove(&e);
            n1.insert(e);
        }
        return Ok(TreePair { t1: n1, t2: n2 });
    }
    // Single exchange, normalized deterministically (checking the e2
    // partner before e2' and likewise on the t1 side).
    if !test_a {
        // far(e2) and far(e2') share a component of t1 - v; steer e1 there,
        // then pick the t2 edge sharing e1's component of t2 - v.
        if lab1[far(e2)] != lab1[far(e1)] {
            std::mem::swap(&mut e1, &mut e1p);
        }
        if lab2[far(e1)] != lab2[far(e2)] {
            std::mem::swap(&mut e2, &mut e2p);
        }
    } else {
        // test_b failed: far(e1) and far(e1') share a component of t2 - v;
        // steer e2 there, then pick the t1 edge sharing e2's component of
        // t1 - v.
        if lab2[far(e2)] != lab2[far(e1)] {
            std::mem::swap(&mut e2, &mut e2p);
        }
        if lab1[far(e1)] != lab1[far(e2)] {
            std::mem::swap(&mut e1, &mut e1p);
        }
    }
    if lab1[far(e1)] != lab1[far(e2)] || lab2[far(e1)] != lab2[far(e2)] {
        return Err(Error::Internal("degree-(2,2) flip found no valid exchange".into()));
    }
    let mut n1 = t1.clone();
    let mut n2 = t2.clone();
    n1.remove(&e1);
    n2.insert(e1);
    n2.remove(&e2);
    n1.insert(e2);
    let _ = (e1p, e2p);
    Ok(TreePair { t1: n1, t2: n2 })
}

fn pair_key(pair: &TreePair) -> (Vec<EdgeId>, Vec<EdgeId>) {
    let a: Vec<EdgeId> = pair.t1.iter().copied().collect();
    let b: Vec<EdgeId> = pair.t2.iter().copied().collect();
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Flip-generated family of disjoint spanning tree pairs: one pair per
/// subset of an independent flip set, deduplicated as unordered pairs.
pub fn tree_pair_family(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
) -> Result<Vec<TreePair>> {
    tree_pair_family_capped(g, t1, t2, usize::MAX)
}

fn tree_pair_family_capped(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
    cap: usize,
) -> Result<Vec<TreePair>> {
    if !is_spanning_tree(g, t1) || !is_spanning_tree(g, t2) || !t1.is_disjoint(t2) {
        return Err(Error::Precondition("need two disjoint spanning trees".into()));
    }
    let analysis = flip_analysis(g, t1, t2);
    let x = analysis.x;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for mask in 0u64..(1u64 << x.len().min(63)) {
        if out.len() >= cap {
            break;
        }
        let mut pair = TreePair { t1: t1.clone(), t2: t2.clone() };
        for (i, &v) in x.iter().enumerate() {
            if mask >> i & 1 == 1 {
                pair = flip_at(g, &pair, v)?;
            }
        }
        if seen.insert(pair_key(&pair)) {
            out.push(pair);
        }
    }
    Ok(out)
}

/// The dense family: `(1,0)` on `t1`, `(0,1)` on `t2`, every leftover edge
/// one of the three nonzero values, then each coordinate repaired on the
/// opposite tree. Exactly `3^(m - 2n + 2)` distinct nowhere-zero flows.
pub fn z4_family_dense(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
) -> Result<Vec<Flow>> {
    z4_family_dense_capped(g, t1, t2, usize::MAX)
}

fn z4_family_dense_capped(
    g: &Multigraph,
    t1: &BTreeSet<EdgeId>,
    t2: &BTreeSet<EdgeId>,
    cap: usize,
) -> Result<Vec<Flow>> {
    if !is_spanning_tree(g, t1) || !is_spanning_tree(g, t2) || !t1.is_disjoint(t2) {
        return Err(Error::Precondition("need two disjoint spanning trees".into()));
    }
    let rest: Vec<EdgeId> = g
        .edge_ids()
        .into_iter()
        .filter(|e| !t1.contains(e) && !t2.contains(e))
        .collect();
    let choices = [(1u8, 0u8), (0, 1), (1, 1)];
    let mut out = Vec::new();
    let mut counters = vec![0usize; rest.len()];
    loop {
        let mut fixed1: BTreeMap<EdgeId, u8> = t1.iter().map(|&e| (e, 1)).collect();
        let mut fixed2: BTreeMap<EdgeId, u8> = t2.iter().map(|&e| (e, 1)).collect();
        for (i, &e) in rest.iter().enumerate() {
            let (a, b) = choices[counters[i]];
            fixed1.insert(e, a);
            fixed2.insert(e, b);
        }
        let first = solve_z2_on_tree(g, t2, &fixed1);
        let second = solve_z2_on_tree(g, t1, &fixed2);
        let flow = Flow::new(
            Z4,
            g.edge_ids()
                .into_iter()
                .map(|e| (e, GroupElem { a: first[&e], b: second[&e] }))
                .collect(),
        );
        if !validate_flow(g, &flow)? || !is_nowhere_zero(&flow) {
            return Err(Error::Internal("dense family produced an invalid flow".into()));
        }
        out.push(flow);
        if out.len() >= cap {
            return Ok(out);
        }
        // Advance the mixed-radix counter.
        let mut i = rest.len();
        loop {
            if i == 0 {
                let keys: BTreeSet<_> = out.iter().map(|f| f.key()).collect();
                if keys.len() != out.len() {
                    return Err(Error::Internal("dense family emitted duplicates".into()));
                }
                return Ok(out);
            }
            i -= 1;
            counters[i] += 1;
            if counters[i] < 3 {
                break;
            }
            counters[i] = 0;
        }
    }
}

/// Combined Z2xZ2 family: the dense branch, the best-q tree-pair branch over
/// the flip family, and the per-pair canonical flows, globally deduplicated.
pub fn z4_flow_family(g: &Multigraph, limit: usize) -> Result<Vec<Flow>> {
    let pair = pack_two_spanning_trees(g).ok_or(Error::NoTreePair)?;
    // The flip family can be exponentially large; scanning a bounded prefix
    // keeps small-limit requests cheap while leaving the public family
    // builder exact.
    let family_cap = limit.saturating_mul(4).clamp(64, 4096);
    let family = tree_pair_family_capped(g, &pair.t1, &pair.t2, family_cap)?;
    let mut out: Vec<Flow> = Vec::new();
    let mut seen: BTreeSet<Vec<(EdgeId, u8, u8)>> = BTreeSet::new();
    let push = |f: Flow, out: &mut Vec<Flow>, seen: &mut BTreeSet<_>| {
        if out.len() < limit && seen.insert(f.key()) {
            out.push(f);
        }
    };
    for f in z4_family_dense_capped(g, &pair.t1, &pair.t2, limit)? {
        push(f, &mut out, &mut seen);
    }
    // Best q over both orientations of every family pair.
    let mut best: Option<(usize, BTreeSet<EdgeId>, BTreeSet<EdgeId>)> = None;
    for p in &family {
        for (a, b) in [(&p.t1, &p.t2), (&p.t2, &p.t1)] {
            let q = canonical_z2_flow(g, a)?.q();
            if best.as_ref().map_or(true, |(bq, _, _)| q > *bq) {
                best = Some((q, a.clone(), b.clone()));
            }
        }
    }
    if let Some((_, a, b)) = best {
        let (flows, _) = flows_from_tree_pair_capped(g, &a, &b, limit)?;
        for f in flows {
            push(f, &mut out, &mut seen);
        }
    }
    for p in &family {
        let f1 = canonical_z2_flow(g, &p.t1)?.flow;
        let f2 = canonical_z2_flow(g, &p.t2)?.flow;
        let combined = Flow::new(
            Z4,
            g.edge_ids()
                .into_iter()
                .map(|e| {
                    (e, GroupElem { a: f1.value(e).unwrap().a, b: f2.value(e).unwrap().a })
                })
                .collect(),
        );
        if !validate_flow(g, &combined)? || !is_nowhere_zero(&combined) {
            return Err(Error::Internal("canonical pair flow is invalid".into()));
        }
        push(combined, &mut out, &mut seen);
    }
    Ok(out)
}
