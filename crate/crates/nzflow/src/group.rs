//! Finite abelian coefficient groups for flows: cyclic `Z_k` and the two
//! products `Z2xZ2` and `Z2xZ3` that drive the 4-flow and 6-flow
//! constructions.

use crate::error::{Error, Result};
use std::fmt;

/// Descriptor of a supported finite abelian group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupSpec {
    /// Cyclic group of order `k`, `k >= 2`.
    Cyclic(u8),
    Z2xZ2,
    Z2xZ3,
}

/// Group element stored as a residue tuple. The second component is always
/// zero for cyclic groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    pub a: u8,
    pub b: u8,
}

impl GroupSpec {
    /// Component moduli `(m_a, m_b)`; cyclic groups report `(k, 1)`.
    pub fn moduli(&self) -> (u8, u8) {
        match self {
            GroupSpec::Cyclic(k) => (*k, 1),
            GroupSpec::Z2xZ2 => (2, 2),
            GroupSpec::Z2xZ3 => (2, 3),
        }
    }

    pub fn order(&self) -> usize {
        let (ma, mb) = self.moduli();
        ma as usize * mb as usize
    }

    pub fn zero(&self) -> GroupElem {
        GroupElem::default()
    }

    pub fn is_zero(&self, e: GroupElem) -> bool {
        e.a == 0 && e.b == 0
    }

    /// Builds an element from raw residues, reducing modulo the component
    /// moduli.
    pub fn elem(&self, a: u8, b: u8) -> GroupElem {
        let (ma, mb) = self.moduli();
        GroupElem { a: a % ma, b: b % mb }
    }

    pub fn add(&self, x: GroupElem, y: GroupElem) -> GroupElem {
        let (ma, mb) = self.moduli();
        GroupElem { a: (x.a + y.a) % ma, b: (x.b + y.b) % mb }
    }

    pub fn neg(&self, x: GroupElem) -> GroupElem {
        let (ma, mb) = self.moduli();
        GroupElem { a: (ma - x.a) % ma, b: (mb - x.b) % mb }
    }

    pub fn sub(&self, x: GroupElem, y: GroupElem) -> GroupElem {
        self.add(x, self.neg(y))
    }

    /// All elements in canonical (lexicographic residue) order.
    pub fn elements(&self) -> Vec<GroupElem> {
        let (ma, mb) = self.moduli();
        let mut out = Vec::with_capacity(self.order());
        for a in 0..ma {
            for b in 0..mb {
                out.push(GroupElem { a, b });
            }
        }
        out
    }

    /// All nonzero elements in canonical order.
    pub fn nonzero_elements(&self) -> Vec<GroupElem> {
        self.elements().into_iter().filter(|e| !self.is_zero(*e)).collect()
    }

    /// Renders an element in the on-disk flow format: `a` for cyclic groups,
    /// `a|b` for products.
    pub fn format_elem(&self, e: GroupElem) -> String {
        match self {
            GroupSpec::Cyclic(_) => format!("{}", e.a),
            _ => format!("{}|{}", e.a, e.b),
        }
    }

    /// Parses the CLI group names `z2`, `z3`, `z4`, `z6`, `z2xz2`, `z2xz3`.
    pub fn from_name(name: &str) -> Result<GroupSpec> {
        match name {
            "z2" => Ok(GroupSpec::Cyclic(2)),
            "z3" => Ok(GroupSpec::Cyclic(3)),
            "z4" => Ok(GroupSpec::Cyclic(4)),
            "z6" => Ok(GroupSpec::Cyclic(6)),
            "z2xz2" => Ok(GroupSpec::Z2xZ2),
            "z2xz3" => Ok(GroupSpec::Z2xZ3),
            other => Err(Error::Family(format!("unknown group name `{other}`"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(k) => write!(f, "Z{k}"),
            GroupSpec::Z2xZ2 => write!(f, "Z2xZ2"),
            GroupSpec::Z2xZ3 => write!(f, "Z2xZ3"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_moduli() {
        assert_eq!(GroupSpec::Cyclic(5).order(), 5);
        assert_eq!(GroupSpec::Z2xZ2.order(), 4);
        assert_eq!(GroupSpec::Z2xZ3.order(), 6);
    }

    #[test]
    fn arithmetic_wraps_componentwise() {
        let g = GroupSpec::Z2xZ3;
        let x = g.elem(1, 2);
        let y = g.elem(1, 2);
        assert_eq!(g.add(x, y), g.elem(0, 1));
        assert_eq!(g.add(x, g.neg(x)), g.zero());
    }

    #[test]
    fn element_listing_is_full_and_sorted() {
        let g = GroupSpec::Z2xZ3;
        let elems = g.elements();
        assert_eq!(elems.len(), 6);
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        assert_eq!(g.nonzero_elements().len(), 5);
    }

    #[test]
    fn formatting_matches_flow_format() {
        assert_eq!(GroupSpec::Cyclic(3).format_elem(GroupElem { a: 2, b: 0 }), "2");
        assert_eq!(GroupSpec::Z2xZ3.format_elem(GroupElem { a: 1, b: 2 }), "1|2");
    }

    #[test]
    fn group_names_round_trip() {
        assert_eq!(GroupSpec::from_name("z4").unwrap(), GroupSpec::Cyclic(4));
        assert_eq!(GroupSpec::from_name("z2xz3").unwrap(), GroupSpec::Z2xZ3);
        assert!(GroupSpec::from_name("z9x").is_err());
    }
}
