//! Exact flow census: exhaustive nowhere-zero flow counting and enumeration
//! over a co-tree basis, plus the flow polynomial by deletion-contraction.
//! This module is the independent oracle the constructive generators are
//! checked against, so it deliberately shares no code path with them.

use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::graph::{EdgeId, Multigraph, Vertex};
use crate::group::{GroupElem, GroupSpec};
use num_bigint::BigUint;
use std::collections::{BTreeMap, HashMap};

/// Enumeration caps. Counting walks `(|G|-1)^rank` assignments, so the rank
/// caps keep runtimes sane; the polynomial cap bounds deletion-contraction.
#[derive(Clone, Copy, Debug)]
pub struct CensusLimits {
    /// Max cycle rank for groups of order <= 4.
    pub max_rank_small: usize,
    /// Max cycle rank for groups of order >= 5.
    pub max_rank_large: usize,
    /// Max edge count for the flow polynomial.
    pub max_poly_edges: usize,
}

impl Default for CensusLimits {
    fn default() -> Self {
        CensusLimits { max_rank_small: 20, max_rank_large: 16, max_poly_edges: 24 }
    }
}

/// Spanning forest and the derived solving schedule for the flow space.
struct CotreeBasis {
    /// Non-loop co-tree edges, ascending id.
    free: Vec<EdgeId>,
    /// Loop edges, ascending id.
    loops: Vec<EdgeId>,
    /// Leaf-elimination schedule over forest edges: for each step, the edge
    /// to solve and the signed incident edges feeding it. A `+1` sign means
    /// the edge is directed into the pivot vertex.
    schedule: Vec<(EdgeId, Vec<(EdgeId, i8)>, i8)>,
    rank: usize,
}

fn cotree_basis(g: &Multigraph) -> CotreeBasis {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut forest: Vec<EdgeId> = Vec::new();
    let mut free = Vec::new();
    let mut loops = Vec::new();
    for e in g.edges() {
        if e.tail == e.head {
            loops.push(e.id);
            continue;
        }
        let (ru, rv) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        if ru == rv {
            free.push(e.id);
        } else {
            parent[ru] = rv;
            forest.push(e.id);
        }
    }
    // Leaf elimination over the forest gives the solve order.
    let mut forest_deg = vec![0usize; n];
    let mut in_forest: BTreeMap<EdgeId, ()> = BTreeMap::new();
    for &e in &forest {
        let (u, v) = g.endpoints(e).unwrap();
        forest_deg[u] += 1;
        forest_deg[v] += 1;
        in_forest.insert(e, ());
    }
    let mut removed: BTreeMap<EdgeId, ()> = BTreeMap::new();
    let mut solved_order = Vec::with_capacity(forest.len());
    let mut pending = forest.len();
    while pending > 0 {
        for v in 0..n {
            if forest_deg[v] != 1 {
                continue;
            }
            // Unique unsolved forest edge at v.
            let eid = g
                .edges()
                .iter()
                .find(|e| {
                    in_forest.contains_key(&e.id)
                        && !removed.contains_key(&e.id)
                        && (e.tail == v || e.head == v)
                })
                .map(|e| e.id)
                .unwrap();
            let rec = g.edge(eid).unwrap();
            let pivot_sign: i8 = if rec.head == v { 1 } else { -1 };
            let mut others = Vec::new();
            for er in g.edges() {
                if er.id == eid || er.tail == er.head {
                    continue;
                }
                if er.head == v {
                    others.push((er.id, 1i8));
                } else if er.tail == v {
                    others.push((er.id, -1i8));
                }
            }
            solved_order.push((eid, others, pivot_sign));
            removed.insert(eid, ());
            let (u, w) = (rec.tail, rec.head);
            forest_deg[u] -= 1;
            forest_deg[w] -= 1;
            pending -= 1;
        }
    }
    let rank = free.len() + loops.len();
    CotreeBasis { free, loops, schedule: solved_order, rank }
}

fn rank_cap(group: GroupSpec, limits: &CensusLimits) -> usize {
    if group.order() <= 4 {
        limits.max_rank_small
    } else {
        limits.max_rank_large
    }
}

/// Solves the forest edges from an assignment on the co-tree, returning
/// `None` when some forest edge is forced to zero (the assignment then
/// yields no nowhere-zero flow).
fn solve_forest(
    basis: &CotreeBasis,
    group: GroupSpec,
    values: &mut Vec<GroupElem>,
    idx_of: &[usize],
    require_nonzero: bool,
) -> bool {
    for (eid, others, pivot_sign) in &basis.schedule {
        let mut sum = group.zero();
        for &(o, s) in others {
            let v = values[idx_of[o]];
            if s > 0 {
                sum = group.add(sum, v);
            } else {
                sum = group.sub(sum, v);
            }
        }
        // pivot_sign * value + sum_others = 0 at the pivot vertex.
        let val = if *pivot_sign > 0 { group.neg(sum) } else { sum };
        if require_nonzero && group.is_zero(val) {
            return false;
        }
        values[idx_of[*eid]] = val;
    }
    true
}

struct Odometer<'a> {
    choices: &'a [GroupElem],
    state: Vec<usize>,
    done: bool,
}

impl<'a> Odometer<'a> {
    fn new(choices: &'a [GroupElem], positions: usize) -> Self {
        Odometer { choices, state: vec![0; positions], done: false }
    }

    fn advance(&mut self) {
        for slot in self.state.iter_mut().rev() {
            *slot += 1;
            if *slot < self.choices.len() {
                return;
            }
            *slot = 0;
        }
        self.done = true;
    }
}

/// Exact nowhere-zero flow count over `group` by co-tree enumeration. Loops
/// factor out as independent `|G| - 1` choices.
pub fn count_nz_flows(g: &Multigraph, group: GroupSpec) -> Result<BigUint> {
    count_nz_flows_with(g, group, &CensusLimits::default(), 1)
}

pub fn count_nz_flows_with(
    g: &Multigraph,
    group: GroupSpec,
    limits: &CensusLimits,
    threads: usize,
) -> Result<BigUint> {
    let basis = cotree_basis(g);
    let cap = rank_cap(group, limits);
    if basis.rank > cap {
        return Err(Error::CensusCap { rank: basis.rank, cap });
    }
    let nonzero = group.nonzero_elements();
    let k = nonzero.len() as u64;
    let positions = basis.free.len();
    let total: u64 = (k as u128).pow(positions as u32).min(u64::MAX as u128) as u64;
    let threads = threads.max(1).min(64);
    let count = if threads == 1 || total < 1024 {
        count_range(g, &basis, group, &nonzero, 0, total)
    } else {
        let chunk = total / threads as u64 + 1;
        let mut partials = vec![0u64; threads];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads {
                let lo = (t as u64 * chunk).min(total);
                let hi = ((t as u64 + 1) * chunk).min(total);
                let basis_ref = &basis;
                let nz = &nonzero;
                handles.push(scope.spawn(move || count_range(g, basis_ref, group, nz, lo, hi)));
            }
            for (t, h) in handles.into_iter().enumerate() {
                partials[t] = h.join().expect("census worker panicked");
            }
        });
        partials.into_iter().sum()
    };
    // Loops contribute an independent nonzero choice each.
    let mut result = BigUint::from(count);
    for _ in 0..basis.loops.len() {
        result *= BigUint::from(k);
    }
    Ok(result)
}

fn count_range(
    g: &Multigraph,
    basis: &CotreeBasis,
    group: GroupSpec,
    nonzero: &[GroupElem],
    lo: u64,
    hi: u64,
) -> u64 {
    let max_id = g.edges().last().map(|e| e.id + 1).unwrap_or(0);
    let mut idx_of = vec![usize::MAX; max_id];
    for (i, e) in g.edges().iter().enumerate() {
        idx_of[e.id] = i;
    }
    let mut values = vec![group.zero(); g.m()];
    let k = nonzero.len() as u64;
    let positions = basis.free.len();
    let mut count = 0u64;
    for linear in lo..hi {
        // Decode the mixed-radix index, most significant digit first.
        let mut rem = linear;
        for p in (0..positions).rev() {
            let digit = (rem % k) as usize;
            rem /= k;
            values[idx_of[basis.free[p]]] = nonzero[digit];
        }
        if solve_forest(basis, group, &mut values, &idx_of, true) {
            count += 1;
        }
    }
    count
}

/// Enumerates nowhere-zero flows in the canonical order: lexicographic over
/// the co-tree assignment vector (ascending edge id, elements in residue
/// order), loops included as free positions.
pub fn enumerate_nz_flows(g: &Multigraph, group: GroupSpec, limit: usize) -> Result<Vec<Flow>> {
    enumerate_nz_flows_with(g, group, limit, &CensusLimits::default())
}

pub fn enumerate_nz_flows_with(
    g: &Multigraph,
    group: GroupSpec,
    limit: usize,
    limits: &CensusLimits,
) -> Result<Vec<Flow>> {
    let basis = cotree_basis(g);
    let cap = rank_cap(group, limits);
    if basis.rank > cap {
        return Err(Error::CensusCap { rank: basis.rank, cap });
    }
    let nonzero = group.nonzero_elements();
    // Loops and cycle edges are both free; enumerate them together in
    // ascending edge-id order.
    let mut free_all: Vec<EdgeId> = basis.free.iter().chain(basis.loops.iter()).copied().collect();
    free_all.sort_unstable();
    let max_id = g.edges().last().map(|e| e.id + 1).unwrap_or(0);
    let mut idx_of = vec![usize::MAX; max_id];
    for (i, e) in g.edges().iter().enumerate() {
        idx_of[e.id] = i;
    }
    let mut values = vec![group.zero(); g.m()];
    let mut out = Vec::new();
    if g.m() == 0 {
        return Ok(out);
    }
    let mut odo = Odometer::new(&nonzero, free_all.len());
    while !odo.done && out.len() < limit {
        for (p, &e) in free_all.iter().enumerate() {
            values[idx_of[e]] = nonzero[odo.state[p]];
        }
        if solve_forest(&basis, group, &mut values, &idx_of, true) {
            let map: BTreeMap<EdgeId, GroupElem> =
                g.edges().iter().map(|e| (e.id, values[idx_of[e.id]])).collect();
            out.push(Flow::new(group, map));
        }
        odo.advance();
    }
    Ok(out)
}

/// Flow polynomial with integer coefficients, low degree first. The empty
/// coefficient vector is the zero polynomial (any graph with a bridge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPolynomial {
    pub coeffs: Vec<i128>,
}

impl FlowPolynomial {
    pub fn zero() -> Self {
        FlowPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        FlowPolynomial { coeffs: vec![1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, k: i128) -> i128 {
        let mut acc = 0i128;
        for &c in self.coeffs.iter().rev() {
            acc = acc * k + c;
        }
        acc
    }

    fn sub(&self, other: &FlowPolynomial) -> FlowPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0i128; len];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0)
                - other.coeffs.get(i).copied().unwrap_or(0);
        }
        FlowPolynomial { coeffs: out }
    }

    /// Multiplies by `(k - 1)`, the loop factor.
    fn times_k_minus_one(&self) -> FlowPolynomial {
        let mut out = vec![0i128; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] -= c;
            out[i + 1] += c;
        }
        FlowPolynomial { coeffs: out }
    }
}

impl std::fmt::Display for FlowPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "k")?,
                1 => write!(f, "{a}k")?,
                _ if a == 1 => write!(f, "k^{i}")?,
                _ => write!(f, "{a}k^{i}")?,
            }
        }
        Ok(())
    }
}

/// Canonical memo key: edge multiset after relabeling vertices by a
/// degree-refined order. Equal keys imply equal graphs up to that relabeling,
/// so the cache is sound; isomorphic graphs may still miss.
fn canon_key(g: &Multigraph) -> (usize, Vec<(usize, usize)>) {
    let n = g.n();
    let mut key: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    for _ in 0..2 {
        let mut next: Vec<(u64, Vec<u64>)> = (0..n).map(|v| (key[v], Vec::new())).collect();
        for e in g.edges() {
            if e.tail == e.head {
                next[e.tail].1.push(u64::MAX); // loops marked distinctly
                continue;
            }
            next[e.tail].1.push(key[e.head]);
            next[e.head].1.push(key[e.tail]);
        }
        let mut sorted: Vec<(u64, Vec<u64>)> = next.clone();
        for s in &mut sorted {
            s.1.sort_unstable();
        }
        let mut uniq: Vec<&(u64, Vec<u64>)> = sorted.iter().collect();
        uniq.sort();
        uniq.dedup();
        for v in 0..n {
            let mut probe = next[v].clone();
            probe.1.sort_unstable();
            key[v] = uniq.binary_search(&&probe).unwrap() as u64;
        }
    }
    let mut order: Vec<Vertex> = (0..n).collect();
    order.sort_by_key(|&v| (key[v], v));
    let mut relabel = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (relabel[e.tail], relabel[e.head]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    (n, edges)
}

fn has_bridge(g: &Multigraph) -> bool {
    let labels = g.component_labels();
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        // Parallel edges are never bridges.
        let parallel = g.edges().iter().any(|f| {
            f.id != e.id
                && ((f.tail, f.head) == (e.tail, e.head) || (f.tail, f.head) == (e.head, e.tail))
        });
        if parallel {
            continue;
        }
        let (h, _) = g.delete_edge(e.id).unwrap();
        if h.component_labels() != labels {
            return true;
        }
    }
    false
}

/// Flow polynomial by deletion-contraction, highest edge id first, memoized
/// on a degree-refined canonical key.
pub fn flow_polynomial(g: &Multigraph) -> Result<FlowPolynomial> {
    flow_polynomial_with(g, &CensusLimits::default())
}

pub fn flow_polynomial_with(g: &Multigraph, limits: &CensusLimits) -> Result<FlowPolynomial> {
    if g.m() > limits.max_poly_edges {
        return Err(Error::PolyCap { m: g.m(), cap: limits.max_poly_edges });
    }
    let mut memo: HashMap<(usize, Vec<(usize, usize)>), FlowPolynomial> = HashMap::new();
    Ok(fp_rec(g, &mut memo))
}

fn fp_rec(
    g: &Multigraph,
    memo: &mut HashMap<(usize, Vec<(usize, usize)>), FlowPolynomial>,
) -> FlowPolynomial {
    if g.m() == 0 {
        return FlowPolynomial::one();
    }
    if has_bridge(g) {
        return FlowPolynomial::zero();
    }
    let key = canon_key(g);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let e = g.edges().last().unwrap().id;
    let result = if g.is_loop(e).unwrap() {
        let (del, _) = g.delete_edge(e).unwrap();
        fp_rec(&del, memo).times_k_minus_one()
    } else {
        let (con, _) = g.contract_edge(e).unwrap();
        let (del, _) = g.delete_edge(e).unwrap();
        fp_rec(&con, memo).sub(&fp_rec(&del, memo))
    };
    memo.insert(key, result.clone());
    result
}
