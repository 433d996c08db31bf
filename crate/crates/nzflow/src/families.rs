//! Benchmark graph families with build-time connectivity assertions, plus a
//! deterministic random multigraph source for test corpora.

use crate::connectivity::is_k_edge_connected;
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// A named family with its parameters. Every constructor asserts the
/// family's documented connectivity before returning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Cycle(usize),
    DoubledCycle(usize),
    CycleWithDoubled { n: usize, d: usize },
    TripledTriangle,
    Complete(usize),
    CompleteBipartite(usize, usize),
    Petersen,
    DoubledComplete(usize),
    RandomKEc { n: usize, k: usize, seed: u64 },
}

pub fn make_family(spec: &FamilySpec) -> Result<Multigraph> {
    match *spec {
        FamilySpec::Cycle(n) => cycle(n),
        FamilySpec::DoubledCycle(n) => doubled_cycle(n),
        FamilySpec::CycleWithDoubled { n, d } => cycle_with_d_doubled(n, d),
        FamilySpec::TripledTriangle => Ok(tripled_triangle()),
        FamilySpec::Complete(n) => complete(n),
        FamilySpec::CompleteBipartite(a, b) => complete_bipartite(a, b),
        FamilySpec::Petersen => Ok(petersen()),
        FamilySpec::DoubledComplete(n) => doubled_complete(n),
        FamilySpec::RandomKEc { n, k, seed } => random_k_ec(n, k, seed).map(|(g, _)| g),
    }
}

/// Parses the CLI family grammar: `name` or `name(arg,...)`, e.g.
/// `petersen`, `complete(5)`, `cycle_with_d_doubled(6,2)`,
/// `random_k_ec(5,6)` (seed supplied separately).
pub fn parse_family_spec(text: &str, seed: u64) -> Result<FamilySpec> {
    let text = text.trim();
    let (name, args): (&str, Vec<usize>) = match text.find('(') {
        None => (text, Vec::new()),
        Some(open) => {
            if !text.ends_with(')') {
                return Err(Error::Family(format!("unbalanced parentheses in `{text}`")));
            }
            let name = &text[..open];
            let inner = &text[open + 1..text.len() - 1];
            let mut args = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                args.push(
                    part.parse::<usize>()
                        .map_err(|_| Error::Family(format!("bad integer `{part}` in `{text}`")))?,
                );
            }
            (name, args)
        }
    };
    let arity = |want: usize| -> Result<()> {
        if args.len() == want {
            Ok(())
        } else {
            Err(Error::Family(format!("`{name}` takes {want} argument(s), got {}", args.len())))
        }
    };
    match name {
        "cycle" => {
            arity(1)?;
            Ok(FamilySpec::Cycle(args[0]))
        }
        "doubled_cycle" => {
            arity(1)?;
            Ok(FamilySpec::DoubledCycle(args[0]))
        }
        "cycle_with_d_doubled" => {
            arity(2)?;
            Ok(FamilySpec::CycleWithDoubled { n: args[0], d: args[1] })
        }
        "tripled_triangle" => {
            arity(0)?;
            Ok(FamilySpec::TripledTriangle)
        }
        "complete" => {
            arity(1)?;
            Ok(FamilySpec::Complete(args[0]))
        }
        "complete_bipartite" => {
            arity(2)?;
            Ok(FamilySpec::CompleteBipartite(args[0], args[1]))
        }
        "petersen" => {
            arity(0)?;
            Ok(FamilySpec::Petersen)
        }
        "doubled_complete" => {
            arity(1)?;
            Ok(FamilySpec::DoubledComplete(args[0]))
        }
        "random_k_ec" => {
            arity(2)?;
            Ok(FamilySpec::RandomKEc { n: args[0], k: args[1], seed })
        }
        other => Err(Error::Family(format!("unknown family `{other}`"))),
    }
}

fn assert_connectivity(g: Multigraph, k: usize, what: &str) -> Result<Multigraph> {
    if !is_k_edge_connected(&g, k) {
        return Err(Error::Internal(format!("{what} failed its {k}-edge-connectivity assertion")));
    }
    Ok(g)
}

pub fn cycle(n: usize) -> Result<Multigraph> {
    if n < 3 {
        return Err(Error::Family("cycle needs n >= 3".into()));
    }
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, 2, "cycle")
}

pub fn doubled_cycle(n: usize) -> Result<Multigraph> {
    if n < 3 {
        return Err(Error::Family("doubled_cycle needs n >= 3".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        pairs.push((i, (i + 1) % n));
        pairs.push((i, (i + 1) % n));
    }
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, 4, "doubled_cycle")
}

/// An `n`-cycle with its first `d` edges doubled.
pub fn cycle_with_d_doubled(n: usize, d: usize) -> Result<Multigraph> {
    if n < 3 || d > n {
        return Err(Error::Family("cycle_with_d_doubled needs n >= 3 and d <= n".into()));
    }
    let mut pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..d {
        pairs.push((i, (i + 1) % n));
    }
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, 2, "cycle_with_d_doubled")
}

pub fn tripled_triangle() -> Multigraph {
    let mut pairs = Vec::new();
    for (u, v) in [(0, 1), (1, 2), (2, 0)] {
        for _ in 0..3 {
            pairs.push((u, v));
        }
    }
    let g = Multigraph::from_edges(3, &pairs).unwrap();
    debug_assert!(is_k_edge_connected(&g, 6));
    g
}

pub fn complete(n: usize) -> Result<Multigraph> {
    if n < 2 {
        return Err(Error::Family("complete needs n >= 2".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, n - 1, "complete")
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<Multigraph> {
    if a == 0 || b == 0 {
        return Err(Error::Family("complete_bipartite needs both sides nonempty".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..a {
        for j in 0..b {
            pairs.push((i, a + j));
        }
    }
    assert_connectivity(Multigraph::from_edges(a + b, &pairs)?, a.min(b), "complete_bipartite")
}

pub fn petersen() -> Multigraph {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5)); // outer cycle
    }
    for i in 0..5 {
        pairs.push((5 + i, 5 + (i + 2) % 5)); // inner pentagram
    }
    for i in 0..5 {
        pairs.push((i, 5 + i)); // spokes
    }
    let g = Multigraph::from_edges(10, &pairs).unwrap();
    debug_assert!(is_k_edge_connected(&g, 3));
    g
}

pub fn doubled_complete(n: usize) -> Result<Multigraph> {
    if n < 2 {
        return Err(Error::Family("doubled_complete needs n >= 2".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            pairs.push((i, j));
        }
    }
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, 2 * (n - 1), "doubled_complete")
}

/// A doubled tree: each edge of the given tree twice.
pub fn doubled_tree(n: usize, tree_edges: &[(usize, usize)]) -> Result<Multigraph> {
    let mut pairs = Vec::new();
    for &(u, v) in tree_edges {
        pairs.push((u, v));
        pairs.push((u, v));
    }
    assert_connectivity(Multigraph::from_edges(n, &pairs)?, 2, "doubled_tree")
}

/// Deterministic SplitMix64 stream; keeps the corpus reproducible without
/// pulling in an RNG dependency.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound.max(1)
    }
}

/// Seeded random multigraph with `2 <= n <= 6` and `m <= 12`; loops and
/// parallel edges allowed. The edge budget keeps the cycle rank enumerable,
/// so the census cross-checks stay fast. Used as the oracle-comparison
/// corpus.
pub fn random_multigraph(seed: u64) -> Multigraph {
    let mut rng = SplitMix64::new(seed.wrapping_mul(0x5851f42d4c957f2d).wrapping_add(1));
    let n = 2 + rng.below(5) as usize; // 2..=6
    let m_max = 12.min(n + 7);
    let m = (n - 1) + rng.below((m_max - (n - 1)) as u64 + 1) as usize;
    let mut g = Multigraph::new(n);
    for _ in 0..m {
        let u = rng.below(n as u64) as usize;
        // Small loop probability; otherwise a distinct endpoint.
        let v = if rng.below(8) == 0 { u } else { (u + 1 + rng.below(n as u64 - 1) as usize) % n };
        g.add_edge(u, v).unwrap();
    }
    g
}

/// Seeded random `k`-edge-connected multigraph (no loops). Retries with a
/// growing edge budget until connectivity holds; returns the attempt count.
pub fn random_k_ec(n: usize, k: usize, seed: u64) -> Result<(Multigraph, u32)> {
    if n < 2 || k < 1 {
        return Err(Error::Family("random_k_ec needs n >= 2 and k >= 1".into()));
    }
    let mut rng = SplitMix64::new(seed.wrapping_mul(0xd1342543de82ef95).wrapping_add(3));
    let base_m = (n * k).div_ceil(2);
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::Family(format!(
                "random_k_ec({n},{k}) found no graph after {attempts} attempts"
            )));
        }
        let m = base_m + (attempts as usize / 16);
        let mut g = Multigraph::new(n);
        for _ in 0..m {
            let u = rng.below(n as u64) as usize;
            let v = (u + 1 + rng.below(n as u64 - 1) as usize) % n;
            g.add_edge(u, v).unwrap();
        }
        if is_k_edge_connected(&g, k) {
            return Ok((g, attempts));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::edge_connectivity;

    #[test]
    fn family_connectivity_matches_documentation() {
        assert_eq!(edge_connectivity(&doubled_cycle(5).unwrap()).0, 4);
        let p = petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.m(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
        assert_eq!(edge_connectivity(&p).0, 3);
        let t = tripled_triangle();
        assert_eq!((t.n(), t.m()), (3, 9));
        assert_eq!(edge_connectivity(&t).0, 6);
        assert_eq!(edge_connectivity(&complete(7).unwrap()).0, 6);
        assert_eq!(edge_connectivity(&doubled_complete(4).unwrap()).0, 6);
    }

    #[test]
    fn random_k_ec_is_deterministic_and_connected() {
        let (g1, a1) = random_k_ec(5, 6, 42).unwrap();
        let (g2, a2) = random_k_ec(5, 6, 42).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(a1, a2);
        assert!(is_k_edge_connected(&g1, 6));
    }

    #[test]
    fn random_multigraph_is_deterministic() {
        assert_eq!(random_multigraph(7), random_multigraph(7));
        let g = random_multigraph(11);
        assert!(g.n() >= 2 && g.n() <= 6 && g.m() <= 12);
    }

    #[test]
    fn family_spec_parsing() {
        assert_eq!(parse_family_spec("petersen", 0).unwrap(), FamilySpec::Petersen);
        assert_eq!(parse_family_spec("complete(5)", 0).unwrap(), FamilySpec::Complete(5));
        assert_eq!(
            parse_family_spec("cycle_with_d_doubled(6,2)", 0).unwrap(),
            FamilySpec::CycleWithDoubled { n: 6, d: 2 }
        );
        assert_eq!(
            parse_family_spec("random_k_ec(5,6)", 9).unwrap(),
            FamilySpec::RandomKEc { n: 5, k: 6, seed: 9 }
        );
        assert!(parse_family_spec("no_such", 0).is_err());
        assert!(parse_family_spec("complete(2", 0).is_err());
    }

    #[test]
    fn impossible_parameters_error() {
        assert!(cycle(2).is_err());
        assert!(make_family(&FamilySpec::RandomKEc { n: 2, k: 0, seed: 0 }).is_err());
    }
}
