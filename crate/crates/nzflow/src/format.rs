//! On-disk graph text format: first line `n m`, then `m` lines `tail head`,
//! zero-indexed and whitespace-separated. `#` starts a comment; parallel
//! edges repeat, a loop is `u u`.

use crate::error::{Error, Result};
use crate::graph::Multigraph;

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut g: Option<Multigraph> = None;
    let mut edges_seen = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parse_num = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected a non-negative integer, got `{s}`"),
            })
        };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "header must be `n m`".into(),
                    });
                }
                let n = parse_num(fields[0])?;
                let m = parse_num(fields[1])?;
                header = Some((n, m));
                g = Some(Multigraph::new(n));
            }
            Some((n, m)) => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "edge line must be `tail head`".into(),
                    });
                }
                if edges_seen == m {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("more than {m} edges"),
                    });
                }
                let u = parse_num(fields[0])?;
                let v = parse_num(fields[1])?;
                if u >= n || v >= n {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("vertex id out of range 0..{n}"),
                    });
                }
                g.as_mut().unwrap().add_edge(u, v).unwrap();
                edges_seen += 1;
            }
        }
    }
    match header {
        None => Err(Error::Parse { line: 1, msg: "empty input".into() }),
        Some((_, m)) if edges_seen != m => Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {m} edges, found {edges_seen}"),
        }),
        Some(_) => Ok(g.unwrap()),
    }
}

/// Canonical text form: header then edges by ascending id.
pub fn serialize_graph(g: &Multigraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.tail, e.head));
    }
    out
}
