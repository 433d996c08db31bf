//! Edge-indexed group-valued flows and their validation.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph};
use crate::group::{GroupElem, GroupSpec};
use std::collections::BTreeMap;

/// A flow assigns a group element to every edge, read relative to the edge's
/// stored tail-to-head orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    group: GroupSpec,
    values: BTreeMap<EdgeId, GroupElem>,
}

impl Flow {
    pub fn new(group: GroupSpec, values: BTreeMap<EdgeId, GroupElem>) -> Self {
        Flow { group, values }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn values(&self) -> &BTreeMap<EdgeId, GroupElem> {
        &self.values
    }

    pub fn value(&self, e: EdgeId) -> Option<GroupElem> {
        self.values.get(&e).copied()
    }

    pub fn set(&mut self, e: EdgeId, v: GroupElem) {
        self.values.insert(e, v);
    }

    /// Errors unless the flow is defined on exactly the edge set of `g`.
    pub fn check_domain(&self, g: &Multigraph) -> Result<()> {
        if self.values.len() != g.m() || g.edges().iter().any(|e| !self.values.contains_key(&e.id))
        {
            return Err(Error::DomainMismatch(format!(
                "flow on {} edges, graph has {}",
                self.values.len(),
                g.m()
            )));
        }
        Ok(())
    }

    /// Canonical dedup key: residue tuples by ascending edge id.
    pub fn key(&self) -> Vec<(EdgeId, u8, u8)> {
        self.values.iter().map(|(&e, &v)| (e, v.a, v.b)).collect()
    }

    /// On-disk line format: comma-separated residue tuples in ascending
    /// edge-id order, components joined by `|`.
    pub fn serialize(&self) -> String {
        self.values
            .values()
            .map(|&v| self.group.format_elem(v))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Checks Kirchhoff's law at every vertex. Loops never contribute: they enter
/// and leave the same vertex.
pub fn validate_flow(g: &Multigraph, f: &Flow) -> Result<bool> {
    f.check_domain(g)?;
    let group = f.group();
    let mut net = vec![group.zero(); g.n()];
    for e in g.edges() {
        if e.tail == e.head {
            continue;
        }
        let v = f.value(e.id).unwrap();
        net[e.head] = group.add(net[e.head], v);
        net[e.tail] = group.sub(net[e.tail], v);
    }
    Ok(net.into_iter().all(|x| group.is_zero(x)))
}

pub fn is_nowhere_zero(f: &Flow) -> bool {
    let group = f.group();
    f.values().values().all(|&v| !group.is_zero(v))
}
