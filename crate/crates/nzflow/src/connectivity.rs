//! Edge connectivity via unit-capacity max-flow, splittable pairs for
//! connectivity-preserving liftings, disjoint spanning tree packing, and
//! minimally-k-edge-connected utilities. Everything is exact and
//! deterministic: ties break by ascending vertex id, then ascending edge id.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, Reducer, ReductionTrace, Vertex};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Witness for an edge cut: the vertex set on one side and the crossing
/// edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutCertificate {
    pub side: Vec<Vertex>,
    pub crossing: Vec<EdgeId>,
    pub size: usize,
}

impl CutCertificate {
    fn from_side(g: &Multigraph, side: Vec<Vertex>) -> Self {
        let in_side: BTreeSet<Vertex> = side.iter().copied().collect();
        let crossing: Vec<EdgeId> = g
            .edges()
            .iter()
            .filter(|e| in_side.contains(&e.tail) != in_side.contains(&e.head))
            .map(|e| e.id)
            .collect();
        let size = crossing.len();
        CutCertificate { side, crossing, size }
    }
}

/// Two edge-disjoint spanning trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePair {
    pub t1: BTreeSet<EdgeId>,
    pub t2: BTreeSet<EdgeId>,
}

#[derive(Clone, Copy)]
struct Arc {
    to: usize,
    cap: u32,
}

/// Unit-capacity undirected flow network: each non-loop edge becomes a pair
/// of mutually-reverse arcs with capacity 1 each.
struct FlowNet {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet { adj: vec![Vec::new(); nodes], arcs: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, cap_uv: u32, cap_vu: u32) {
        let a = self.arcs.len();
        self.arcs.push(Arc { to: v, cap: cap_uv });
        self.arcs.push(Arc { to: u, cap: cap_vu });
        self.adj[u].push(a);
        self.adj[v].push(a + 1);
    }

    fn from_graph(g: &Multigraph, extra_nodes: usize) -> Self {
        let mut net = FlowNet::new(g.n() + extra_nodes);
        for e in g.edges() {
            if e.tail != e.head {
                net.add(e.tail, e.head, 1, 1);
            }
        }
        net
    }

    /// Edmonds-Karp; augments one unit per path, which is optimal at the
    /// small cut values involved here.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut q = VecDeque::new();
            q.push_back(s);
            while let Some(u) = q.pop_front() {
                if u == t {
                    break;
                }
                for &ai in &self.adj[u] {
                    let arc = self.arcs[ai];
                    if arc.cap > 0 && pred[arc.to].is_none() && arc.to != s {
                        pred[arc.to] = Some(ai);
                        q.push_back(arc.to);
                    }
                }
            }
            if pred[t].is_none() {
                return total;
            }
            let mut v = t;
            while v != s {
                let ai = pred[v].unwrap();
                self.arcs[ai].cap -= 1;
                self.arcs[ai ^ 1].cap += 1;
                v = self.arcs[ai ^ 1].to;
            }
            total += 1;
        }
    }

    /// Vertices reachable from `s` in the residual network.
    fn residual_side(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut q = VecDeque::new();
        seen[s] = true;
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &ai in &self.adj[u] {
                let arc = self.arcs[ai];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    q.push_back(arc.to);
                }
            }
        }
        (0..self.adj.len()).filter(|&v| seen[v]).collect()
    }
}

/// Maximum number of pairwise edge-disjoint `s`-`t` paths.
pub fn local_edge_connectivity(g: &Multigraph, s: Vertex, t: Vertex) -> usize {
    debug_assert_ne!(s, t);
    FlowNet::from_graph(g, 0).max_flow(s, t)
}

/// Min cut separating vertex set `src` from `dst`, with the src-side of a
/// witnessing cut.
pub(crate) fn local_ec_sets(g: &Multigraph, src: &[Vertex], dst: &[Vertex]) -> (usize, Vec<Vertex>) {
    let inf = g.m() as u32 + 1;
    let s = g.n();
    let t = g.n() + 1;
    let mut net = FlowNet::from_graph(g, 2);
    for &u in src {
        net.add(s, u, inf, 0);
    }
    for &v in dst {
        net.add(t, v, 0, inf);
    }
    let value = net.max_flow(s, t);
    let side: Vec<Vertex> = net.residual_side(s).into_iter().filter(|&v| v < g.n()).collect();
    (value, side)
}

/// Global edge connectivity with a witnessing cut certificate. Requires
/// `n >= 2`; a disconnected graph reports 0 with an empty-crossing
/// certificate.
pub fn edge_connectivity(g: &Multigraph) -> (usize, CutCertificate) {
    assert!(g.n() >= 2, "edge connectivity needs at least two vertices");
    if !g.is_connected() {
        let labels = g.component_labels();
        let side: Vec<Vertex> = (0..g.n()).filter(|&v| labels[v] == labels[0]).collect();
        return (0, CutCertificate { side, crossing: Vec::new(), size: 0 });
    }
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for t in 1..g.n() {
        let mut net = FlowNet::from_graph(g, 0);
        let value = net.max_flow(0, t);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            let side = net.residual_side(0);
            best = Some((value, side));
        }
    }
    let (value, side) = best.unwrap();
    let cert = CutCertificate::from_side(g, side);
    debug_assert_eq!(cert.size, value);
    (value, cert)
}

/// True when `g` is k-edge-connected. Graphs on at most one vertex are
/// vacuously k-edge-connected for every k.
pub fn is_k_edge_connected(g: &Multigraph, k: usize) -> bool {
    if g.n() <= 1 {
        return true;
    }
    edge_connectivity(g).0 >= k
}

/// Certificate-carrying variant used by pipeline preconditions.
pub fn require_k_edge_connected(g: &Multigraph, k: usize) -> Result<()> {
    if g.n() <= 1 {
        return Ok(());
    }
    let (value, cut) = edge_connectivity(g);
    if value < k {
        return Err(Error::NotKEdgeConnected { k, cut });
    }
    Ok(())
}

fn bridges_of(g: &Multigraph) -> BTreeSet<EdgeId> {
    let labels = g.component_labels();
    let mut out = BTreeSet::new();
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        let parallel = g.edges().iter().any(|f| {
            f.id != e.id
                && ((f.tail, f.head) == (e.tail, e.head) || (f.tail, f.head) == (e.head, e.tail))
        });
        if parallel {
            continue;
        }
        let (h, _) = g.delete_edge(e.id).unwrap();
        if h.component_labels() != labels {
            out.insert(e.id);
        }
    }
    out
}

/// A leaf 2-edge-connected component of `g - covered`: a block incident with
/// at most one bridge of the remainder, single vertices allowed. Ties break
/// by the lowest vertex id in the block.
pub fn leaf_2ec_component(g: &Multigraph, covered: &BTreeSet<Vertex>) -> Result<Vec<Vertex>> {
    let remaining: Vec<Vertex> = (0..g.n()).filter(|v| !covered.contains(v)).collect();
    if remaining.is_empty() {
        return Err(Error::Precondition("every vertex is already covered".into()));
    }
    // Induced subgraph on the uncovered vertices, original labels kept via a map.
    let mut back = BTreeMap::new();
    for (i, &v) in remaining.iter().enumerate() {
        back.insert(v, i);
    }
    let mut sub = Multigraph::new(remaining.len());
    let mut orig_edge = Vec::new();
    for e in g.edges() {
        if let (Some(&a), Some(&b)) = (back.get(&e.tail), back.get(&e.head)) {
            sub.add_edge(a, b).unwrap();
            orig_edge.push(e.id);
        }
    }
    let bridges = bridges_of(&sub);
    // 2ec blocks = components after removing bridges.
    let mut no_bridges = sub.clone();
    for &b in bridges.iter().rev() {
        let pos = no_bridges.edges().iter().position(|e| e.id == b).unwrap();
        let id = no_bridges.edges()[pos].id;
        no_bridges = no_bridges.delete_edge(id).unwrap().0;
    }
    let block_label = no_bridges.component_labels();
    // Count bridges incident with each block.
    let mut bridge_count: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &b in &bridges {
        let (u, v) = sub.endpoints(b).unwrap();
        *bridge_count.entry(block_label[u]).or_insert(0) += 1;
        *bridge_count.entry(block_label[v]).or_insert(0) += 1;
    }
    let blocks: BTreeSet<Vertex> = block_label.iter().copied().collect();
    let leaf = blocks
        .iter()
        .find(|&&bl| bridge_count.get(&bl).copied().unwrap_or(0) <= 1)
        .copied()
        .ok_or_else(|| Error::Internal("bridge forest has no leaf block".into()))?;
    Ok((0..sub.n())
        .filter(|&v| block_label[v] == leaf)
        .map(|v| remaining[v])
        .collect())
}

fn all_pairs_lambda(g: &Multigraph, skip: Vertex) -> BTreeMap<(Vertex, Vertex), usize> {
    let mut out = BTreeMap::new();
    for s in 0..g.n() {
        if s == skip {
            continue;
        }
        for t in s + 1..g.n() {
            if t == skip {
                continue;
            }
            out.insert((s, t), local_edge_connectivity(g, s, t));
        }
    }
    out
}

fn lift_preserves_all_lambda(g: &Multigraph, v: Vertex, e1: EdgeId, e2: EdgeId) -> Result<bool> {
    let base = all_pairs_lambda(g, v);
    let (lifted, step) = g.lift_pair(v, e1, e2)?;
    let map = step.vertex_map().unwrap();
    for (&(s, t), &lam) in &base {
        let (ls, lt) = (map[s].unwrap(), map[t].unwrap());
        if local_edge_connectivity(&lifted, ls, lt) != lam {
            return Ok(false);
        }
    }
    Ok(true)
}

fn candidate_pairs(g: &Multigraph, v: Vertex) -> Vec<(EdgeId, EdgeId)> {
    let inc: Vec<EdgeId> = g
        .incident(v)
        .into_iter()
        .filter(|&e| !g.is_loop(e).unwrap())
        .collect();
    let mut out = Vec::new();
    for i in 0..inc.len() {
        for j in i + 1..inc.len() {
            out.push((inc[i], inc[j]));
        }
    }
    out
}

/// First pair at `v` (ascending edge ids) whose lifting preserves every
/// local edge connectivity among the other vertices. The splitting lemma
/// guarantees one exists when `deg(v)` is 2 or at least 4 and `v` avoids
/// cut-edges, so failure signals a bug.
pub fn find_splittable_pair(g: &Multigraph, v: Vertex) -> Result<(EdgeId, EdgeId)> {
    find_splittable_pair_filtered(g, v, |_, _| true)
}

/// Same search restricted to pairs accepted by `keep`.
pub fn find_splittable_pair_filtered<F>(g: &Multigraph, v: Vertex, keep: F) -> Result<(EdgeId, EdgeId)>
where
    F: Fn(EdgeId, EdgeId) -> bool,
{
    let deg = g.degree(v);
    if deg != 2 && deg < 4 {
        return Err(Error::Precondition(format!(
            "splitting lemma needs degree 2 or >= 4 at vertex {v}, found {deg}"
        )));
    }
    let bridges = bridges_of(g);
    if g.incident(v).iter().any(|e| bridges.contains(e)) {
        return Err(Error::Precondition(format!("vertex {v} is incident with a cut-edge")));
    }
    for (e1, e2) in candidate_pairs(g, v) {
        if !keep(e1, e2) {
            continue;
        }
        if lift_preserves_all_lambda(g, v, e1, e2)? {
            return Ok((e1, e2));
        }
    }
    Err(Error::MaderViolation { v })
}

/// First pair at `v` whose lifting keeps the whole graph k-edge-connected.
/// Requires non-loop degree at least `k + 2` (loops cross no cut, so they do
/// not help). Pairs with distinct far endpoints are tried before pairs that
/// would collapse into a loop.
pub fn find_splittable_pair_preserving_k(
    g: &Multigraph,
    v: Vertex,
    k: usize,
) -> Result<(EdgeId, EdgeId)> {
    let deg = nonloop_degree(g, v);
    if deg < k + 2 {
        return Err(Error::Precondition(format!(
            "vertex {v} has non-loop degree {deg} < k + 2 = {}",
            k + 2
        )));
    }
    let pairs = candidate_pairs(g, v);
    let loop_creating =
        |&(e1, e2): &(EdgeId, EdgeId)| g.other_end(e1, v).unwrap() == g.other_end(e2, v).unwrap();
    let ordered = pairs
        .iter()
        .filter(|p| !loop_creating(p))
        .chain(pairs.iter().filter(|p| loop_creating(p)));
    for &(e1, e2) in ordered {
        let (lifted, _) = g.lift_pair(v, e1, e2)?;
        if is_k_edge_connected(&lifted, k) {
            return Ok((e1, e2));
        }
    }
    Err(Error::CorollaryViolation { v, k })
}

/// Degree ignoring loops: the number of cut-relevant edge ends at `v`.
pub fn nonloop_degree(g: &Multigraph, v: Vertex) -> usize {
    g.edges()
        .iter()
        .filter(|e| e.tail != e.head)
        .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
        .sum()
}

/// Outcome of a 6-splittability search: either a pair or the small cut that
/// blocks every candidate.
#[derive(Clone, Debug)]
pub enum SplitSearch {
    Pair(EdgeId, EdgeId),
    Blocked(CutCertificate),
}

/// Checks whether lifting `(e1, e2)` at `v` leaves no cut smaller than 6
/// apart from the cut at `v` itself. On failure returns a blocking cut of
/// the original graph, which has at most 7 crossing edges.
pub fn six_splittable_obstruction(
    g: &Multigraph,
    v: Vertex,
    e1: EdgeId,
    e2: EdgeId,
) -> Result<Option<CutCertificate>> {
    let (lifted, step) = g.lift_pair(v, e1, e2)?;
    let map = step.vertex_map().unwrap();
    let others: Vec<Vertex> = (0..g.n()).filter(|&w| w != v).collect();
    if others.len() < 2 {
        return Ok(None);
    }
    let s0 = map[others[0]].unwrap();
    for &t in &others[1..] {
        let lt = map[t].unwrap();
        let mut net = FlowNet::from_graph(&lifted, 0);
        let value = net.max_flow(s0, lt);
        if value < 6 {
            // Map the lifted-side cut back to original vertex labels; take
            // the side not containing v.
            let side_l: BTreeSet<usize> = net.residual_side(s0).into_iter().collect();
            let mut side: Vec<Vertex> =
                (0..g.n()).filter(|&w| side_l.contains(&map[w].unwrap())).collect();
            if side.contains(&v) {
                let complement: Vec<Vertex> =
                    (0..g.n()).filter(|w| !side.contains(w)).collect();
                side = complement;
            }
            let cert = CutCertificate::from_side(g, side);
            debug_assert!(cert.size <= 7);
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Searches edge pairs at `v` (excluding `exclude`, ascending ids) for a
/// 6-splittable pair; if every candidate is blocked, returns the first
/// blocking cut.
pub fn find_6splittable_pair(
    g: &Multigraph,
    v: Vertex,
    exclude: &[EdgeId],
) -> Result<SplitSearch> {
    let mut first_block: Option<CutCertificate> = None;
    let excl: BTreeSet<EdgeId> = exclude.iter().copied().collect();
    for (e1, e2) in candidate_pairs(g, v) {
        if excl.contains(&e1) || excl.contains(&e2) {
            continue;
        }
        match six_splittable_obstruction(g, v, e1, e2)? {
            None => return Ok(SplitSearch::Pair(e1, e2)),
            Some(cert) => {
                if first_block.is_none() {
                    first_block = Some(cert);
                }
            }
        }
    }
    match first_block {
        Some(cert) => Ok(SplitSearch::Blocked(cert)),
        None => Err(Error::Precondition(format!("no candidate pairs at vertex {v}"))),
    }
}

pub(crate) fn forest_components(g: &Multigraph, forest: &BTreeSet<EdgeId>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &e in forest {
        let (u, v) = g.endpoints(e).unwrap();
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    (0..g.n()).map(|v| find(&mut parent, v)).collect()
}

/// Tree path (edge ids) between `a` and `b` inside `forest`; empty when the
/// endpoints are disconnected or equal.
pub(crate) fn forest_path(
    g: &Multigraph,
    forest: &BTreeSet<EdgeId>,
    a: Vertex,
    b: Vertex,
) -> Vec<EdgeId> {
    if a == b {
        return Vec::new();
    }
    let mut prev: Vec<Option<(Vertex, EdgeId)>> = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[a] = true;
    let mut q = VecDeque::new();
    q.push_back(a);
    while let Some(u) = q.pop_front() {
        if u == b {
            break;
        }
        for &e in forest {
            let (x, y) = g.endpoints(e).unwrap();
            let w = if x == u {
                y
            } else if y == u {
                x
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((u, e));
                q.push_back(w);
            }
        }
    }
    if !seen[b] {
        return Vec::new();
    }
    let mut path = Vec::new();
    let mut cur = b;
    while cur != a {
        let (p, e) = prev[cur].unwrap();
        path.push(e);
        cur = p;
    }
    path
}

/// Packs two edge-disjoint spanning trees by matroid-union augmentation over
/// two graphic matroids, processing edges in ascending id order. Returns
/// `None` when no two disjoint spanning trees exist; every 4-edge-connected
/// graph yields a pair.
pub fn pack_two_spanning_trees(g: &Multigraph) -> Option<TreePair> {
    if g.n() == 0 {
        return None;
    }
    let mut forests: [BTreeSet<EdgeId>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        if augment(g, &mut forests, e.id) {
            debug_assert!(forests[0].is_disjoint(&forests[1]));
            debug_assert!(is_forest(g, &forests[0]) && is_forest(g, &forests[1]));
        }
        if forests[0].len() == g.n() - 1 && forests[1].len() == g.n() - 1 {
            break;
        }
    }
    let full = g.n() - 1;
    if forests[0].len() == full && forests[1].len() == full {
        debug_assert!(is_spanning_tree(g, &forests[0]));
        debug_assert!(is_spanning_tree(g, &forests[1]));
        Some(TreePair { t1: forests[0].clone(), t2: forests[1].clone() })
    } else {
        None
    }
}

/// BFS augmentation for the union of two graphic matroids: labels record
/// which circuit an element came from, and a success swaps along the label
/// chain.
fn augment(g: &Multigraph, forests: &mut [BTreeSet<EdgeId>; 2], e0: EdgeId) -> bool {
    let mut label: BTreeMap<EdgeId, (EdgeId, usize)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(e0);
    let mut visited: BTreeSet<EdgeId> = BTreeSet::new();
    visited.insert(e0);
    let comp: [Vec<usize>; 2] =
        [forest_components(g, &forests[0]), forest_components(g, &forests[1])];
    while let Some(x) = queue.pop_front() {
        let (xu, xv) = g.endpoints(x).unwrap();
        for i in 0..2 {
            if forests[i].contains(&x) {
                continue;
            }
            if comp[i][xu] != comp[i][xv] {
                // x fits in forest i directly; swap back along the chain.
                apply_chain(forests, &label, x, i, e0);
                return true;
            }
            for y in forest_path(g, &forests[i], xu, xv) {
                if visited.insert(y) {
                    label.insert(y, (x, i));
                    queue.push_back(y);
                }
            }
        }
    }
    false
}

fn apply_chain(
    forests: &mut [BTreeSet<EdgeId>; 2],
    label: &BTreeMap<EdgeId, (EdgeId, usize)>,
    mut cur: EdgeId,
    mut into: usize,
    e0: EdgeId,
) {
    loop {
        forests[into].insert(cur);
        if cur == e0 {
            break;
        }
        // cur sat on the circuit of forest j created by pred, so it leaves
        // forest j and pred takes its place there.
        let (pred, j) = label[&cur];
        forests[j].remove(&cur);
        into = j;
        cur = pred;
    }
}

fn is_forest(g: &Multigraph, edges: &BTreeSet<EdgeId>) -> bool {
    let comp = forest_components(g, edges);
    let distinct: BTreeSet<usize> = comp.iter().copied().collect();
    g.n() - distinct.len() == edges.len()
}

pub fn is_spanning_tree(g: &Multigraph, edges: &BTreeSet<EdgeId>) -> bool {
    if g.n() == 0 || edges.len() != g.n() - 1 {
        return false;
    }
    if edges.iter().any(|&e| !g.has_edge(e) || g.is_loop(e).unwrap()) {
        return false;
    }
    let comp = forest_components(g, edges);
    comp.iter().all(|&c| c == comp[0])
}

/// Greedy maximal edge set whose removal keeps `g` k-edge-connected,
/// ascending edge id. The remainder is minimally k-edge-connected.
pub fn maximal_removable_set(g: &Multigraph, k: usize) -> Vec<EdgeId> {
    let mut removed = Vec::new();
    let mut cur = g.clone();
    for e in g.edge_ids() {
        let pos = cur.edges().iter().position(|r| r.id == e);
        if pos.is_none() {
            continue;
        }
        let (next, _) = cur.delete_edge(e).unwrap();
        if is_k_edge_connected(&next, k) {
            removed.push(e);
            cur = next;
        }
    }
    removed
}

/// True iff `g` is k-edge-connected and deleting any single edge breaks it.
pub fn is_minimally_k_edge_connected(g: &Multigraph, k: usize) -> bool {
    if !is_k_edge_connected(g, k) {
        return false;
    }
    for e in g.edge_ids() {
        let (h, _) = g.delete_edge(e).unwrap();
        if is_k_edge_connected(&h, k) {
            return false;
        }
    }
    true
}

/// Repeatedly lifts connectivity-preserving pairs at vertices of degree
/// greater than `dmax` until the maximum degree is at most `dmax`,
/// preserving k-edge-connectivity throughout. Requires `dmax >= k`.
pub fn suppress_or_split_to_max_degree(
    g: &Multigraph,
    k: usize,
    dmax: usize,
) -> Result<(Multigraph, ReductionTrace)> {
    if dmax < k {
        return Err(Error::Precondition(format!("dmax = {dmax} must be at least k = {k}")));
    }
    require_k_edge_connected(g, k)?;
    let mut red = Reducer::new(g.clone());
    split_to_max_degree_in(&mut red, k, dmax)?;
    let (out, trace) = red.into_parts();
    Ok((out, trace))
}

/// Worker shared with the flow pipelines so their traces stay composable.
/// Degrees are measured ignoring loops, which no lifting could remove.
pub(crate) fn split_to_max_degree_in(red: &mut Reducer, k: usize, dmax: usize) -> Result<()> {
    loop {
        let g = red.current().clone();
        let v = match (0..g.n()).find(|&v| nonloop_degree(&g, v) > dmax) {
            None => return Ok(()),
            Some(v) => v,
        };
        let (e1, e2) = find_splittable_pair_preserving_k(&g, v, k)?;
        red.lift_pair(v, e1, e2)?;
    }
}

/// Reduces a k-edge-connected graph with degrees in `{k, k+1}`-style bounded
/// form down to a cubic graph by removing each degree-4 vertex with a
/// splittable lift followed by a suppression. Used by the 6-flow pipeline
/// with `k = 3` after splitting to maximum degree 4.
pub(crate) fn reduce_deg4_to_cubic(red: &mut Reducer) -> Result<()> {
    loop {
        let g = red.current().clone();
        let v = match (0..g.n()).find(|&v| g.degree(v) == 4) {
            None => return Ok(()),
            Some(v) => v,
        };
        let (e1, e2) = find_splittable_pair(&g, v)?;
        red.lift_pair(v, e1, e2)?;
        let g2 = red.current().clone();
        let inc = g2.incident(v);
        if inc.len() != 2 {
            return Err(Error::Internal(format!(
                "vertex {v} should have two distinct edges after the lift"
            )));
        }
        let (a, b) = (g2.other_end(inc[0], v)?, g2.other_end(inc[1], v)?);
        if a == b {
            // Would create a loop and a near-bridge; impossible in a
            // 3-edge-connected graph with maximum degree 4.
            return Err(Error::Internal(format!(
                "suppressing vertex {v} would create a loop at {a}"
            )));
        }
        red.suppress_deg2(v)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn cycle_local_connectivity_is_two() {
        let g = families::cycle(5).unwrap();
        for t in 1..5 {
            assert_eq!(local_edge_connectivity(&g, 0, t), 2);
        }
    }

    #[test]
    fn parallel_triple_has_lambda_three() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(local_edge_connectivity(&g, 0, 1), 3);
    }

    #[test]
    fn petersen_pairs_are_three_connected() {
        let g = families::petersen();
        for s in 0..10 {
            for t in s + 1..10 {
                assert_eq!(local_edge_connectivity(&g, s, t), 3);
            }
        }
    }

    #[test]
    fn global_connectivity_values() {
        assert_eq!(edge_connectivity(&families::cycle(6).unwrap()).0, 2);
        assert_eq!(edge_connectivity(&families::complete(7).unwrap()).0, 6);
        assert_eq!(edge_connectivity(&families::doubled_complete(4).unwrap()).0, 6);
    }

    #[test]
    fn certificates_witness_their_value() {
        let g = families::cycle_with_d_doubled(5, 2).unwrap();
        let (value, cert) = edge_connectivity(&g);
        assert_eq!(value, 2);
        assert_eq!(cert.size, 2);
        assert_eq!(cert.crossing.len(), 2);
        assert!(!cert.side.is_empty() && cert.side.len() < g.n());
    }

    #[test]
    fn disconnected_graph_reports_zero() {
        let g = Multigraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let (value, cert) = edge_connectivity(&g);
        assert_eq!(value, 0);
        assert!(cert.crossing.is_empty());
        assert_eq!(cert.side, vec![0, 1]);
    }

    #[test]
    fn leaf_component_of_single_vertex() {
        let g = families::complete(4).unwrap();
        let covered: BTreeSet<Vertex> = [0, 1, 2].into_iter().collect();
        assert_eq!(leaf_2ec_component(&g, &covered).unwrap(), vec![3]);
    }

    #[test]
    fn leaf_component_of_path_is_an_endpoint() {
        // Remainder 0-1-2 is a path; endpoints are the leaf blocks.
        let mut pairs = vec![(0, 1), (1, 2)];
        pairs.extend([(0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]);
        let g = Multigraph::from_edges(5, &pairs).unwrap();
        let covered: BTreeSet<Vertex> = [3, 4].into_iter().collect();
        assert_eq!(leaf_2ec_component(&g, &covered).unwrap(), vec![0]);
    }

    #[test]
    fn leaf_component_prefers_lowest_vertex_block() {
        // Remainder: triangle {0,1,2} bridged to pendant path to 3; both the
        // triangle and {3} are leaves, triangle has the lower minimum id.
        let pairs = vec![
            (0, 1),
            (1, 2),
            (2, 0),
            (2, 3), // bridge in the remainder
            (0, 4),
            (1, 4),
            (3, 4),
            (3, 4),
        ];
        let g = Multigraph::from_edges(5, &pairs).unwrap();
        let covered: BTreeSet<Vertex> = [4].into_iter().collect();
        assert_eq!(leaf_2ec_component(&g, &covered).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn degree_two_vertex_splits_to_its_own_pair() {
        let g = families::cycle(4).unwrap();
        let (e1, e2) = find_splittable_pair(&g, 2).unwrap();
        let inc = g.incident(2);
        assert_eq!(vec![e1, e2], inc);
    }

    #[test]
    fn doubled_triangle_vertices_are_splittable() {
        let g = families::doubled_cycle(3).unwrap();
        for v in 0..3 {
            let (e1, e2) = find_splittable_pair(&g, v).unwrap();
            assert!(lift_preserves_all_lambda(&g, v, e1, e2).unwrap());
        }
    }

    #[test]
    fn k5_returns_first_verifying_pair() {
        let g = families::complete(5).unwrap();
        let (e1, e2) = find_splittable_pair(&g, 0).unwrap();
        // Must be the id-lexicographically first verifying pair.
        for (c1, c2) in candidate_pairs(&g, 0) {
            if (c1, c2) == (e1, e2) {
                break;
            }
            assert!(!lift_preserves_all_lambda(&g, 0, c1, c2).unwrap());
        }
    }

    #[test]
    fn corollary_pair_preserves_global_connectivity() {
        let g = families::tripled_triangle();
        for v in 0..3 {
            let (e1, e2) = find_splittable_pair_preserving_k(&g, v, 3).unwrap();
            let (lifted, _) = g.lift_pair(v, e1, e2).unwrap();
            assert!(is_k_edge_connected(&lifted, 3));
        }
    }

    #[test]
    fn corollary_needs_degree_k_plus_two() {
        let g = families::doubled_complete(4).unwrap();
        assert!(matches!(
            find_splittable_pair_preserving_k(&g, 0, 6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn blown_up_cycle_vertex_splits_for_k2() {
        // C3 with vertex 0 blown to degree 4 by doubling its two edges.
        let g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (2, 0), (2, 0)]).unwrap();
        let (e1, e2) = find_splittable_pair_preserving_k(&g, 0, 2).unwrap();
        let (lifted, _) = g.lift_pair(0, e1, e2).unwrap();
        assert!(is_k_edge_connected(&lifted, 2));
    }

    #[test]
    fn six_splittable_in_k7() {
        let g = families::complete(7).unwrap();
        match find_6splittable_pair(&g, 0, &[]).unwrap() {
            SplitSearch::Pair(e1, e2) => {
                assert!(six_splittable_obstruction(&g, 0, e1, e2).unwrap().is_none());
            }
            SplitSearch::Blocked(_) => panic!("K7 must admit a 6-splittable pair"),
        }
    }

    #[test]
    fn doubled_k4_exhaustive_six_split_check() {
        let g = families::doubled_complete(4).unwrap();
        match find_6splittable_pair(&g, 0, &[]).unwrap() {
            SplitSearch::Pair(e1, e2) => {
                assert!(six_splittable_obstruction(&g, 0, e1, e2).unwrap().is_none());
            }
            SplitSearch::Blocked(cert) => assert!(cert.size <= 7),
        }
    }

    #[test]
    fn k4_packs_two_trees() {
        let g = families::complete(4).unwrap();
        let pair = pack_two_spanning_trees(&g).expect("K4 packs two disjoint trees");
        assert!(is_spanning_tree(&g, &pair.t1));
        assert!(is_spanning_tree(&g, &pair.t2));
        assert!(pair.t1.is_disjoint(&pair.t2));
    }

    #[test]
    fn cycle_cannot_pack_two_trees() {
        assert!(pack_two_spanning_trees(&families::cycle(5).unwrap()).is_none());
    }

    #[test]
    fn doubled_tree_packs_its_two_copies() {
        let g = families::doubled_tree(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let pair = pack_two_spanning_trees(&g).unwrap();
        assert!(is_spanning_tree(&g, &pair.t1) && is_spanning_tree(&g, &pair.t2));
        assert!(pair.t1.is_disjoint(&pair.t2));
    }

    #[test]
    fn four_edge_connected_graphs_always_pack() {
        for g in [
            families::doubled_cycle(4).unwrap(),
            families::doubled_cycle(6).unwrap(),
            families::complete(5).unwrap(),
            families::doubled_complete(3).unwrap(),
        ] {
            assert!(pack_two_spanning_trees(&g).is_some());
        }
    }

    #[test]
    fn removable_set_is_empty_on_minimal_graphs() {
        assert!(maximal_removable_set(&families::cycle(5).unwrap(), 2).is_empty());
        assert!(maximal_removable_set(&families::complete(7).unwrap(), 6).is_empty());
    }

    #[test]
    fn removable_set_leaves_minimally_connected_remainder() {
        let g = families::doubled_cycle(4).unwrap();
        let f = maximal_removable_set(&g, 2);
        assert!(!f.is_empty());
        let mut h = g.clone();
        for e in &f {
            h = h.delete_edge(*e).unwrap().0;
        }
        assert!(is_minimally_k_edge_connected(&h, 2));
    }

    #[test]
    fn minimality_checks() {
        assert!(is_minimally_k_edge_connected(&families::cycle(6).unwrap(), 2));
        assert!(!is_minimally_k_edge_connected(&families::doubled_cycle(4).unwrap(), 2));
        assert!(is_minimally_k_edge_connected(&families::complete(7).unwrap(), 6));
    }

    #[test]
    fn split_to_max_degree_leaves_small_degrees_alone() {
        let g = families::doubled_cycle(3).unwrap(); // degrees 4, 3-ec? it is 4-ec
        let (h, _) = suppress_or_split_to_max_degree(&g, 3, 4).unwrap();
        assert_eq!(h, g);
        let k7 = families::complete(7).unwrap();
        let (h7, _) = suppress_or_split_to_max_degree(&k7, 6, 7).unwrap();
        assert_eq!(h7, k7);
    }

    #[test]
    fn split_tripled_triangle_to_degree_four() {
        let g = families::tripled_triangle();
        let (h, trace) = suppress_or_split_to_max_degree(&g, 3, 4).unwrap();
        assert!(h.max_degree() <= 4);
        assert!(is_k_edge_connected(&h, 3));
        assert_eq!(trace.final_graph().unwrap(), h);
    }
}
