//! Multigraph with loops, parallel edges, and stable edge identifiers, plus
//! the graph surgeries (lift, contract, suppress, clique expansion) and the
//! reduction traces that let flows on a reduced graph be pulled back to the
//! original graph.

use crate::error::{Error, Result};
use crate::flow::Flow;
use std::collections::BTreeMap;

pub type Vertex = usize;
pub type EdgeId = usize;

/// One edge record. `tail == head` encodes a loop; parallel edges are
/// distinct records with distinct ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRec {
    pub id: EdgeId,
    pub tail: Vertex,
    pub head: Vertex,
}

/// Undirected multigraph on vertices `0..n`. Every edge carries a reference
/// orientation `tail -> head`; flow values are interpreted against it, and
/// traversing an edge head-to-tail negates the value. Edge ids are never
/// reused inside one graph value; surgeries allocate fresh ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<EdgeRec>, // sorted by ascending id
    next_id: EdgeId,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, edges: Vec::new(), next_id: 0 }
    }

    /// Builds a graph with edge ids `0..pairs.len()` in input order.
    pub fn from_edges(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Multigraph::new(n);
        for &(u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeRec] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn add_edge(&mut self, tail: Vertex, head: Vertex) -> Result<EdgeId> {
        if tail >= self.n {
            return Err(Error::UnknownVertex(tail));
        }
        if head >= self.n {
            return Err(Error::UnknownVertex(head));
        }
        let id = self.next_id;
        self.next_id += 1;
        self.edges.push(EdgeRec { id, tail, head });
        Ok(id)
    }

    pub fn edge(&self, id: EdgeId) -> Result<&EdgeRec> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map(|i| &self.edges[i])
            .map_err(|_| Error::UnknownEdge(id))
    }

    pub fn has_edge(&self, id: EdgeId) -> bool {
        self.edges.binary_search_by_key(&id, |e| e.id).is_ok()
    }

    pub fn endpoints(&self, id: EdgeId) -> Result<(Vertex, Vertex)> {
        self.edge(id).map(|e| (e.tail, e.head))
    }

    pub fn is_loop(&self, id: EdgeId) -> Result<bool> {
        self.edge(id).map(|e| e.tail == e.head)
    }

    pub fn other_end(&self, id: EdgeId, v: Vertex) -> Result<Vertex> {
        let e = self.edge(id)?;
        if e.tail == v {
            Ok(e.head)
        } else if e.head == v {
            Ok(e.tail)
        } else {
            Err(Error::NotIncident { v, e: id })
        }
    }

    /// Ids of edges incident with `v`, ascending; loops appear once.
    pub fn incident(&self, v: Vertex) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.tail == v || e.head == v)
            .map(|e| e.id)
            .collect()
    }

    /// Degree of `v`; loops count twice.
    pub fn degree(&self, v: Vertex) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn loop_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().filter(|e| e.tail == e.head).map(|e| e.id).collect()
    }

    /// Connected-component label per vertex, labels being the smallest vertex
    /// in each component.
    pub fn component_labels(&self) -> Vec<Vertex> {
        let mut label: Vec<Option<Vertex>> = vec![None; self.n];
        let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        for start in 0..self.n {
            if label[start].is_some() {
                continue;
            }
            let mut stack = vec![start];
            label[start] = Some(start);
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if label[w].is_none() {
                        label[w] = Some(start);
                        stack.push(w);
                    }
                }
            }
        }
        label.into_iter().map(|l| l.unwrap()).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let labels = self.component_labels();
        labels.iter().all(|&l| l == 0)
    }

    /// Rebuilds a graph from explicit records (ids must be strictly
    /// ascending). Used by quotient constructions that keep surviving edge
    /// ids stable.
    pub(crate) fn from_records(n: usize, edges: Vec<EdgeRec>) -> Multigraph {
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(edges.iter().all(|e| e.tail < n && e.head < n));
        let next_id = edges.last().map(|e| e.id + 1).unwrap_or(0);
        Multigraph { n, edges, next_id }
    }

    /// Copy of the graph with all loops removed (other edge ids preserved),
    /// together with the removed loop ids.
    pub fn without_loops(&self) -> (Multigraph, Vec<EdgeId>) {
        let loops = self.loop_ids();
        let mut g = self.clone();
        for &l in &loops {
            g.remove_edge_internal(l).unwrap();
        }
        (g, loops)
    }

    fn remove_edge_internal(&mut self, id: EdgeId) -> Result<EdgeRec> {
        let idx = self
            .edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(id))?;
        Ok(self.edges.remove(idx))
    }

    /// Removes vertex `v` (which must be isolated) and renumbers `w > v` to
    /// `w - 1`. Returns the old-to-new vertex map.
    fn remove_isolated_vertex(&mut self, v: Vertex) -> Vec<Option<Vertex>> {
        debug_assert_eq!(self.degree(v), 0);
        for e in &mut self.edges {
            if e.tail > v {
                e.tail -= 1;
            }
            if e.head > v {
                e.head -= 1;
            }
        }
        self.n -= 1;
        (0..self.n + 1)
            .map(|w| {
                if w == v {
                    None
                } else if w > v {
                    Some(w - 1)
                } else {
                    Some(w)
                }
            })
            .collect()
    }

    /// Lifts the non-loop edge pair `e1`, `e2` incident with `v`: both edges
    /// are removed and one fresh edge joins their far endpoints, oriented
    /// from the far end of `e1` to the far end of `e2`. `v` is deleted iff it
    /// becomes isolated.
    pub fn lift_pair(&self, v: Vertex, e1: EdgeId, e2: EdgeId) -> Result<(Multigraph, SurgeryStep)> {
        if e1 == e2 {
            return Err(Error::Precondition("lift needs two distinct edges".into()));
        }
        for &e in &[e1, e2] {
            if self.is_loop(e)? {
                return Err(Error::LoopLift { v, e });
            }
            self.other_end(e, v)?; // incidence check
        }
        let a = self.other_end(e1, v)?;
        let b = self.other_end(e2, v)?;
        let mut g = self.clone();
        g.remove_edge_internal(e1)?;
        g.remove_edge_internal(e2)?;
        let new_edge = g.add_edge(a, b)?;
        let vertex_map = if g.degree(v) == 0 {
            g.remove_isolated_vertex(v)
        } else {
            identity_map(g.n)
        };
        let step = SurgeryStep::LiftPair { v, e1, e2, new_edge, vertex_map };
        Ok((g, step))
    }

    /// Suppresses a degree-2 vertex: lifts its unique non-loop edge pair and
    /// deletes the vertex. Same flow transport as [`Multigraph::lift_pair`].
    pub fn suppress_deg2(&self, v: Vertex) -> Result<(Multigraph, SurgeryStep)> {
        let inc = self.incident(v);
        if self.degree(v) != 2 || inc.len() != 2 {
            return Err(Error::Precondition(format!(
                "vertex {v} is not a degree-2 vertex with two non-loop edges"
            )));
        }
        let (g, step) = self.lift_pair(v, inc[0], inc[1])?;
        let (e1, e2, new_edge, vertex_map) = match step {
            SurgeryStep::LiftPair { e1, e2, new_edge, vertex_map, .. } => {
                (e1, e2, new_edge, vertex_map)
            }
            _ => unreachable!(),
        };
        Ok((g, SurgeryStep::SuppressDeg2 { v, e1, e2, new_edge, vertex_map }))
    }

    /// Contracts edge `e`: its endpoints merge into the smaller vertex id,
    /// edges parallel to `e` become loops at the merged vertex and are kept.
    /// Contracting a loop degenerates to deleting it.
    pub fn contract_edge(&self, e: EdgeId) -> Result<(Multigraph, SurgeryStep)> {
        let rec = *self.edge(e)?;
        if rec.tail == rec.head {
            return self.delete_edge(e);
        }
        let merged = rec.tail.min(rec.head);
        let gone = rec.tail.max(rec.head);
        let mut g = self.clone();
        g.remove_edge_internal(e)?;
        for er in &mut g.edges {
            if er.tail == gone {
                er.tail = merged;
            }
            if er.head == gone {
                er.head = merged;
            }
        }
        // `gone` is now isolated; renumber.
        let mut vertex_map = g.remove_isolated_vertex(gone);
        vertex_map[gone] = Some(if merged > gone { merged - 1 } else { merged });
        let merged_new = vertex_map[merged].unwrap();
        let step = SurgeryStep::ContractEdge { e, merged: merged_new, vertex_map };
        Ok((g, step))
    }

    pub fn delete_edge(&self, e: EdgeId) -> Result<(Multigraph, SurgeryStep)> {
        let mut g = self.clone();
        g.remove_edge_internal(e)?;
        Ok((g, SurgeryStep::DeleteEdge { e }))
    }

    /// Clique expansion with center `u`: loops at `u` are deleted, every
    /// remaining edge at `u` is subdivided, the subdivision vertices form a
    /// clique, and `u` is deleted.
    pub fn clique_expansion(&self, u: Vertex) -> Result<(Multigraph, SurgeryStep)> {
        if self.n < 2 {
            return Err(Error::Precondition("clique expansion needs at least 2 vertices".into()));
        }
        if u >= self.n {
            return Err(Error::UnknownVertex(u));
        }
        let mut g = self.clone();
        let deleted_loops: Vec<EdgeId> = g
            .edges
            .iter()
            .filter(|e| e.tail == u && e.head == u)
            .map(|e| e.id)
            .collect();
        for &l in &deleted_loops {
            g.remove_edge_internal(l)?;
        }
        let incident: Vec<EdgeRec> = g
            .edges
            .iter()
            .filter(|e| e.tail == u || e.head == u)
            .copied()
            .collect();
        for e in &incident {
            g.remove_edge_internal(e.id)?;
        }
        let vertex_map = g.remove_isolated_vertex(u);
        let base = g.n;
        let d = incident.len();
        g.n += d;
        let new_vertices: Vec<Vertex> = (base..base + d).collect();
        let mut pendant = Vec::with_capacity(d);
        for (i, old) in incident.iter().enumerate() {
            let x = base + i;
            // Keep the far-side orientation sense of the subdivided edge.
            let new_id = if old.tail == u {
                let w = vertex_map[old.head].unwrap();
                g.add_edge(x, w)?
            } else {
                let w = vertex_map[old.tail].unwrap();
                g.add_edge(w, x)?
            };
            pendant.push((old.id, new_id, x));
        }
        let mut clique_edges = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                clique_edges.push(g.add_edge(base + i, base + j)?);
            }
        }
        let step = SurgeryStep::CliqueExpand {
            center: u,
            new_vertices,
            deleted_loops,
            pendant,
            clique_edges,
            vertex_map,
        };
        Ok((g, step))
    }
}

fn identity_map(n: usize) -> Vec<Option<Vertex>> {
    (0..n).map(Some).collect()
}

/// One recorded surgery. `vertex_map` maps vertex ids of the graph before
/// the step to ids after it (`None` for a deleted vertex; a contracted
/// vertex maps onto the merged vertex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurgeryStep {
    LiftPair {
        v: Vertex,
        e1: EdgeId,
        e2: EdgeId,
        new_edge: EdgeId,
        vertex_map: Vec<Option<Vertex>>,
    },
    SuppressDeg2 {
        v: Vertex,
        e1: EdgeId,
        e2: EdgeId,
        new_edge: EdgeId,
        vertex_map: Vec<Option<Vertex>>,
    },
    ContractEdge {
        e: EdgeId,
        merged: Vertex,
        vertex_map: Vec<Option<Vertex>>,
    },
    DeleteEdge {
        e: EdgeId,
    },
    CliqueExpand {
        center: Vertex,
        new_vertices: Vec<Vertex>,
        deleted_loops: Vec<EdgeId>,
        /// `(old edge, new pendant edge, subdivision vertex)`.
        pendant: Vec<(EdgeId, EdgeId, Vertex)>,
        clique_edges: Vec<EdgeId>,
        vertex_map: Vec<Option<Vertex>>,
    },
}

impl SurgeryStep {
    pub fn kind(&self) -> &'static str {
        match self {
            SurgeryStep::LiftPair { .. } => "LiftPair",
            SurgeryStep::SuppressDeg2 { .. } => "SuppressDeg2",
            SurgeryStep::ContractEdge { .. } => "ContractEdge",
            SurgeryStep::DeleteEdge { .. } => "DeleteEdge",
            SurgeryStep::CliqueExpand { .. } => "CliqueExpand",
        }
    }

    pub fn vertex_map(&self) -> Option<&[Option<Vertex>]> {
        match self {
            SurgeryStep::LiftPair { vertex_map, .. }
            | SurgeryStep::SuppressDeg2 { vertex_map, .. }
            | SurgeryStep::ContractEdge { vertex_map, .. }
            | SurgeryStep::CliqueExpand { vertex_map, .. } => Some(vertex_map),
            SurgeryStep::DeleteEdge { .. } => None,
        }
    }

    /// Replays this step on `g`, checking that the outcome matches the
    /// recorded ids exactly.
    fn replay_on(&self, g: &Multigraph) -> Result<Multigraph> {
        let (out, produced) = match self {
            SurgeryStep::LiftPair { v, e1, e2, .. } => g.lift_pair(*v, *e1, *e2)?,
            SurgeryStep::SuppressDeg2 { v, .. } => g.suppress_deg2(*v)?,
            SurgeryStep::ContractEdge { e, .. } => g.contract_edge(*e)?,
            SurgeryStep::DeleteEdge { e } => g.delete_edge(*e)?,
            SurgeryStep::CliqueExpand { center, .. } => g.clique_expansion(*center)?,
        };
        if produced != *self {
            return Err(Error::Internal(format!(
                "trace replay diverged at a {} step",
                self.kind()
            )));
        }
        Ok(out)
    }
}

/// Ordered record of surgeries applied to an original graph. Replaying the
/// steps reproduces every intermediate graph bit-exactly, which is what the
/// flow pullback walks backwards.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    original: Multigraph,
    steps: Vec<SurgeryStep>,
}

impl ReductionTrace {
    pub fn new(original: Multigraph) -> Self {
        ReductionTrace { original, steps: Vec::new() }
    }

    pub fn original(&self) -> &Multigraph {
        &self.original
    }

    pub fn steps(&self) -> &[SurgeryStep] {
        &self.steps
    }

    pub fn push(&mut self, step: SurgeryStep) {
        self.steps.push(step);
    }

    /// Graphs after each step (`len == steps.len()`), validated against the
    /// recorded ids.
    pub fn replay(&self) -> Result<Vec<Multigraph>> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut cur = self.original.clone();
        for step in &self.steps {
            cur = step.replay_on(&cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn final_graph(&self) -> Result<Multigraph> {
        Ok(self.replay()?.pop().unwrap_or_else(|| self.original.clone()))
    }
}

/// Convenience builder that keeps the current graph and its trace in sync.
#[derive(Clone, Debug)]
pub struct Reducer {
    trace: ReductionTrace,
    current: Multigraph,
}

impl Reducer {
    pub fn new(g: Multigraph) -> Self {
        Reducer { trace: ReductionTrace::new(g.clone()), current: g }
    }

    pub fn current(&self) -> &Multigraph {
        &self.current
    }

    pub fn trace(&self) -> &ReductionTrace {
        &self.trace
    }

    pub fn into_parts(self) -> (Multigraph, ReductionTrace) {
        (self.current, self.trace)
    }

    fn record(&mut self, g: Multigraph, step: SurgeryStep) {
        self.current = g;
        self.trace.push(step);
    }

    pub fn lift_pair(&mut self, v: Vertex, e1: EdgeId, e2: EdgeId) -> Result<&SurgeryStep> {
        let (g, step) = self.current.lift_pair(v, e1, e2)?;
        self.record(g, step);
        Ok(self.trace.steps.last().unwrap())
    }

    pub fn suppress_deg2(&mut self, v: Vertex) -> Result<&SurgeryStep> {
        let (g, step) = self.current.suppress_deg2(v)?;
        self.record(g, step);
        Ok(self.trace.steps.last().unwrap())
    }

    pub fn contract_edge(&mut self, e: EdgeId) -> Result<&SurgeryStep> {
        let (g, step) = self.current.contract_edge(e)?;
        self.record(g, step);
        Ok(self.trace.steps.last().unwrap())
    }
}

/// Pulls a flow on the final graph of `trace` back to the original graph.
///
/// Transport rules, walking the steps backwards:
/// - `LiftPair`/`SuppressDeg2`: the new edge's value is copied to both lifted
///   edges. The new edge is oriented far(e1) -> far(e2); an old edge whose
///   stored direction opposes the traversal far(e1) -> v -> far(e2) receives
///   the negated value.
/// - `ContractEdge`: the removed edge's value is reconstructed from
///   Kirchhoff's law at its tail in the pre-step graph.
/// - `DeleteEdge` and `CliqueExpand` do not transport flows and yield an
///   error.
pub fn pull_back_flow(f: &Flow, trace: &ReductionTrace) -> Result<Flow> {
    let graphs = trace.replay()?;
    let final_graph = graphs.last().unwrap_or(trace.original());
    f.check_domain(final_graph)?;
    let mut values: BTreeMap<EdgeId, crate::group::GroupElem> = f.values().clone();
    let group = f.group();
    for (i, step) in trace.steps().iter().enumerate().rev() {
        let before = if i == 0 { trace.original() } else { &graphs[i - 1] };
        match step {
            SurgeryStep::LiftPair { v, e1, e2, new_edge, .. }
            | SurgeryStep::SuppressDeg2 { v, e1, e2, new_edge, .. } => {
                let x = values.remove(new_edge).ok_or(Error::UnknownEdge(*new_edge))?;
                let a = before.other_end(*e1, *v)?;
                let r1 = before.edge(*e1)?;
                let r2 = before.edge(*e2)?;
                // Value x flows a -> v -> b.
                let v1 = if r1.tail == a { x } else { group.neg(x) };
                let v2 = if r2.tail == *v { x } else { group.neg(x) };
                values.insert(*e1, v1);
                values.insert(*e2, v2);
            }
            SurgeryStep::ContractEdge { e, .. } => {
                let rec = before.edge(*e)?;
                let t = rec.tail;
                let mut sum = group.zero();
                for er in before.edges() {
                    if er.id == *e || er.tail == er.head {
                        continue;
                    }
                    if er.head == t {
                        sum = group.add(sum, values[&er.id]);
                    }
                    if er.tail == t {
                        sum = group.sub(sum, values[&er.id]);
                    }
                }
                // Treat e as leaving its tail: in - out - value(e) = 0.
                values.insert(*e, sum);
            }
            SurgeryStep::DeleteEdge { .. } => {
                return Err(Error::PullbackUnsupported("DeleteEdge"));
            }
            SurgeryStep::CliqueExpand { .. } => {
                return Err(Error::PullbackUnsupported("CliqueExpand"));
            }
        }
    }
    let out = Flow::new(group, values);
    if !crate::flow::validate_flow(trace.original(), &out)? {
        return Err(Error::Internal("pulled-back flow violates Kirchhoff's law".into()));
    }
    Ok(out)
}

/// Pulls a chain of traces back in reverse order (last trace first).
pub fn pull_back_flow_chain(f: &Flow, traces: &[&ReductionTrace]) -> Result<Flow> {
    let mut cur = f.clone();
    for t in traces.iter().rev() {
        cur = pull_back_flow(&cur, t)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{is_nowhere_zero, validate_flow};
    use crate::group::GroupSpec;

    fn triangle() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn degrees_count_loops_twice() {
        let g = Multigraph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.loop_ids(), vec![1]);
    }

    #[test]
    fn lift_path_deletes_midpoint() {
        // a - v - b with v = 1.
        let g = Multigraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (h, step) = g.lift_pair(1, 0, 1).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.m(), 1);
        let e = h.edges()[0];
        assert_eq!((e.tail, e.head), (0, 1)); // b renumbered 2 -> 1
        match step {
            SurgeryStep::LiftPair { vertex_map, .. } => {
                assert_eq!(vertex_map, vec![Some(0), None, Some(1)]);
            }
            _ => panic!("wrong step kind"),
        }
    }

    #[test]
    fn lift_parallel_pair_makes_loop() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let (h, _) = g.lift_pair(1, 0, 1).unwrap();
        assert_eq!(h.n(), 1);
        assert_eq!(h.m(), 1);
        assert!(h.is_loop(h.edges()[0].id).unwrap());
    }

    #[test]
    fn lift_in_k4_keeps_vertex_of_degree_one() {
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        let (h, _) = g.lift_pair(0, 0, 1).unwrap();
        assert_eq!(h.n(), 4);
        assert_eq!(h.degree(0), 1);
        // New edge 1-2 parallel to the existing one.
        let pairs: Vec<(usize, usize)> = h
            .edges()
            .iter()
            .map(|e| (e.tail.min(e.head), e.tail.max(e.head)))
            .collect();
        assert_eq!(pairs.iter().filter(|&&p| p == (1, 2)).count(), 2);
    }

    #[test]
    fn lift_rejects_loops_and_non_incident_edges() {
        let g = Multigraph::from_edges(2, &[(0, 0), (0, 1), (0, 1)]).unwrap();
        assert!(matches!(g.lift_pair(0, 0, 1), Err(Error::LoopLift { .. })));
        assert!(matches!(g.lift_pair(1, 1, 0), Err(Error::LoopLift { .. })));
        let h = triangle();
        assert!(matches!(h.lift_pair(0, 0, 1), Err(Error::NotIncident { .. })));
    }

    #[test]
    fn contract_triangle_edge_gives_parallel_pair() {
        let g = triangle();
        let (h, _) = g.contract_edge(0).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.m(), 2);
        assert!(h.edges().iter().all(|e| e.tail != e.head));
    }

    #[test]
    fn contract_one_of_parallel_pair_keeps_loop() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let (h, _) = g.contract_edge(0).unwrap();
        assert_eq!(h.n(), 1);
        assert_eq!(h.m(), 1);
        assert!(h.is_loop(1).unwrap());
    }

    #[test]
    fn contract_loop_records_delete() {
        let g = Multigraph::from_edges(1, &[(0, 0)]).unwrap();
        let (h, step) = g.contract_edge(0).unwrap();
        assert_eq!(h.m(), 0);
        assert!(matches!(step, SurgeryStep::DeleteEdge { e: 0 }));
    }

    #[test]
    fn clique_expansion_of_star() {
        // Star with 3 edges at center 0.
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (h, step) = g.clique_expansion(0).unwrap();
        // 3 leaves + 3 new vertices, 3 pendant + 3 clique edges.
        assert_eq!(h.n(), 6);
        assert_eq!(h.m(), 6);
        match step {
            SurgeryStep::CliqueExpand { new_vertices, clique_edges, .. } => {
                assert_eq!(new_vertices.len(), 3);
                assert_eq!(clique_edges.len(), 3);
            }
            _ => panic!("wrong step kind"),
        }
    }

    #[test]
    fn clique_expansion_drops_loops_first() {
        let g = Multigraph::from_edges(3, &[(0, 0), (0, 1), (0, 2), (1, 2)]).unwrap();
        let (h, step) = g.clique_expansion(0).unwrap();
        match step {
            SurgeryStep::CliqueExpand { new_vertices, deleted_loops, .. } => {
                assert_eq!(new_vertices.len(), 2);
                assert_eq!(deleted_loops, vec![0]);
            }
            _ => panic!("wrong step kind"),
        }
        assert!(h.loop_ids().is_empty());
    }

    #[test]
    fn replay_reproduces_graphs_exactly() {
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let mut red = Reducer::new(g);
        red.contract_edge(4).unwrap();
        let v = red.current().n() - 1;
        let inc = red.current().incident(v);
        red.lift_pair(v, inc[0], inc[1]).unwrap();
        let (final_g, trace) = red.into_parts();
        assert_eq!(trace.final_graph().unwrap(), final_g);
    }

    #[test]
    fn pull_back_through_lift_preserves_validity() {
        // Triangle with doubled edges so lifting keeps it flow-rich.
        let g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)])
            .unwrap();
        let group = GroupSpec::Z2xZ3;
        let mut red = Reducer::new(g.clone());
        red.lift_pair(1, 0, 2).unwrap();
        let reduced = red.current().clone();
        let flows = crate::census::enumerate_nz_flows(&reduced, group, 1_000).unwrap();
        assert!(!flows.is_empty());
        let (_, trace) = red.into_parts();
        let mut seen = std::collections::BTreeSet::new();
        for f in &flows {
            let back = pull_back_flow(f, &trace).unwrap();
            assert!(validate_flow(&g, &back).unwrap());
            assert!(is_nowhere_zero(&back));
            assert!(seen.insert(back.key()), "pullback must be injective");
        }
    }

    #[test]
    fn pull_back_through_two_cut_contraction() {
        // Theta-like graph with a 2-edge-cut {4, 5}: contract edge 4.
        // Vertices 0,1 doubly joined; path 0-2-1 via edges 4,5.
        let g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (2, 1)]).unwrap();
        let group = GroupSpec::Z2xZ3;
        let mut red = Reducer::new(g.clone());
        red.contract_edge(2).unwrap();
        let reduced = red.current().clone();
        let flows = crate::census::enumerate_nz_flows(&reduced, group, 10_000).unwrap();
        let (_, trace) = red.into_parts();
        for f in &flows {
            let back = pull_back_flow(f, &trace).unwrap();
            assert!(validate_flow(&g, &back).unwrap());
            assert!(is_nowhere_zero(&back), "2-cut partner value must stay nonzero");
        }
        // Exact count preservation.
        let before = crate::census::count_nz_flows(&g, group).unwrap();
        let after = crate::census::count_nz_flows(&reduced, group).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn pull_back_rejects_clique_expansion() {
        let g = triangle();
        let (h, step) = g.clique_expansion(0).unwrap();
        let mut trace = ReductionTrace::new(g);
        trace.push(step);
        let f = Flow::new(
            GroupSpec::Cyclic(3),
            h.edge_ids().into_iter().map(|e| (e, GroupSpec::Cyclic(3).elem(1, 0))).collect(),
        );
        assert!(matches!(
            pull_back_flow(&f, &trace),
            Err(Error::PullbackUnsupported("CliqueExpand"))
        ));
    }
}
