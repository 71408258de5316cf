//! Immutable sparse directed graph and the PageRank transition operator.
//!
//! The graph is stored as a CSR adjacency structure with node ids `0..n`.
//! Duplicate edges are collapsed at construction, self-loops are kept, and
//! a node is dangling exactly when its (collapsed) successor list is empty.
//! Dangling rows and teleportation are never materialized as edges; both
//! are applied as rank-one corrections.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::Kahan;

#[derive(Clone, Debug)]
pub struct WebGraph {
    node_count: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    dangling: Vec<u32>,
}

impl WebGraph {
    /// Builds a graph from an edge list. Duplicates collapse to one edge;
    /// successor lists come out sorted.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Result<WebGraph, Error> {
        if node_count == 0 {
            return Err(Error::Parse { line: 0, message: "node count must be positive".to_string() });
        }
        // One id past the last node is reserved for the virtual hub used by
        // the augmented-SCC pass.
        if node_count > (u32::MAX - 1) as usize {
            return Err(Error::Parse { line: 0, message: "node count exceeds u32 range".to_string() });
        }
        for &(s, d) in edges {
            if s as usize >= node_count || d as usize >= node_count {
                let id = if s as usize >= node_count { s } else { d };
                return Err(Error::NodeOutOfRange { line: 0, id: id as u64, node_count });
            }
        }

        let mut degree = vec![0usize; node_count];
        for &(s, _) in edges {
            degree[s as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut raw = vec![0u32; edges.len()];
        let mut cursor = offsets.clone();
        for &(s, d) in edges {
            raw[cursor[s as usize]] = d;
            cursor[s as usize] += 1;
        }

        // Sort and dedup each row, compacting into the final buffer.
        let mut targets = Vec::with_capacity(edges.len());
        let mut final_offsets = Vec::with_capacity(node_count + 1);
        final_offsets.push(0);
        for v in 0..node_count {
            let row = &mut raw[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            let mut prev: Option<u32> = None;
            for &t in row.iter() {
                if prev != Some(t) {
                    targets.push(t);
                    prev = Some(t);
                }
            }
            final_offsets.push(targets.len());
        }

        let dangling = (0..node_count)
            .filter(|&v| final_offsets[v] == final_offsets[v + 1])
            .map(|v| v as u32)
            .collect();

        Ok(WebGraph { node_count, offsets: final_offsets, targets, dangling })
    }

    /// Parses the edge-list text format: the first non-comment line is the
    /// node count, every following non-empty line is `src dst`. Lines
    /// starting with `#` are comments; CRLF is accepted.
    pub fn parse_edge_list(bytes: &[u8]) -> Result<WebGraph, Error> {
        let mut node_count: Option<usize> = None;
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut header_line = 0usize;

        for (idx, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
            let line_no = idx + 1;
            let line = trim_ascii(raw_line);
            if line.is_empty() || line[0] == b'#' {
                continue;
            }
            let text = core::str::from_utf8(line).map_err(|_| Error::Parse {
                line: line_no,
                message: "invalid UTF-8".to_string(),
            })?;
            let mut fields = text.split_ascii_whitespace();
            match node_count {
                None => {
                    let n_text = fields.next().expect("non-empty line has a field");
                    if fields.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "header must be a single node count".to_string(),
                        });
                    }
                    let n: usize = n_text.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("invalid node count {n_text:?}"),
                    })?;
                    if n == 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "node count must be positive".to_string(),
                        });
                    }
                    node_count = Some(n);
                    header_line = line_no;
                }
                Some(n) => {
                    let (src, dst) = parse_edge(text, line_no)?;
                    if src as usize >= n {
                        return Err(Error::NodeOutOfRange { line: line_no, id: src, node_count: n });
                    }
                    if dst as usize >= n {
                        return Err(Error::NodeOutOfRange { line: line_no, id: dst, node_count: n });
                    }
                    edges.push((src as u32, dst as u32));
                }
            }
        }

        let n = node_count.ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing header: first non-comment line must be the node count".to_string(),
        })?;
        let _ = header_line;
        WebGraph::from_edges(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of distinct edges after duplicate collapse.
    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn out_degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn is_dangling(&self, v: u32) -> bool {
        self.out_degree(v) == 0
    }

    /// Dangling node ids in ascending order.
    pub fn dangling(&self) -> &[u32] {
        &self.dangling
    }

    /// Computes `x P` into `out`, where dangling rows spread their mass
    /// uniformly over all nodes.
    pub fn apply_p_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), Error> {
        let n = self.node_count;
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        if out.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: out.len() });
        }
        let mut dangling_mass = Kahan::default();
        for &d in &self.dangling {
            dangling_mass.add(x[d as usize]);
        }
        let base = dangling_mass.value() / n as f64;
        for o in out.iter_mut() {
            *o = base;
        }
        for (v, &xv) in x.iter().enumerate() {
            let row = &self.targets[self.offsets[v]..self.offsets[v + 1]];
            if row.is_empty() {
                continue;
            }
            let w = xv / row.len() as f64;
            for &t in row {
                out[t as usize] += w;
            }
        }
        Ok(())
    }

    /// Allocating convenience wrapper around [`WebGraph::apply_p_into`].
    pub fn apply_p(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        let mut out = vec![0.0; self.node_count];
        self.apply_p_into(x, &mut out)?;
        Ok(out)
    }
}

fn trim_ascii(line: &[u8]) -> &[u8] {
    let mut start = 0;
    let mut end = line.len();
    while start < end && line[start].is_ascii_whitespace() {
        start += 1;
    }
    while end > start && line[end - 1].is_ascii_whitespace() {
        end -= 1;
    }
    &line[start..end]
}

fn parse_edge(text: &str, line_no: usize) -> Result<(u64, u64), Error> {
    let mut fields = text.split_ascii_whitespace();
    let src = fields.next();
    let dst = fields.next();
    let extra = fields.next();
    match (src, dst, extra) {
        (Some(s), Some(d), None) => {
            let src = s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id {s:?}"),
            })?;
            let dst = d.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id {d:?}"),
            })?;
            Ok((src, dst))
        }
        _ => Err(Error::Parse {
            line: line_no,
            message: "expected exactly two node ids".to_string(),
        }),
    }
}

/// The Google-matrix action `x -> c xP + (1-c)(x 1)/n 1^T`, keeping the
/// damping factor alongside the graph it applies to.
#[derive(Clone, Copy, Debug)]
pub struct TransitionOperator<'g> {
    graph: &'g WebGraph,
    damping: f64,
}

impl<'g> TransitionOperator<'g> {
    pub fn new(graph: &'g WebGraph, damping: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&damping) {
            return Err(Error::InvalidDamping { value: damping });
        }
        Ok(TransitionOperator { graph, damping })
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn graph(&self) -> &'g WebGraph {
        self.graph
    }

    /// Computes `x G` into `out`. Linear in `x`: the teleportation term is
    /// scaled by the total mass of `x`, so probability vectors stay
    /// probability vectors and the map is exactly the matrix action.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), Error> {
        self.graph.apply_p_into(x, out)?;
        let c = self.damping;
        let mut total = Kahan::default();
        for v in x {
            total.add(*v);
        }
        let teleport = (1.0 - c) * total.value() / self.graph.node_count as f64;
        for o in out.iter_mut() {
            *o = c * *o + teleport;
        }
        Ok(())
    }

    /// Allocating convenience wrapper around [`TransitionOperator::apply_into`].
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        let mut out = vec![0.0; self.graph.node_count()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }
}
