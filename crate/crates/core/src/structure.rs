//! Ergodic structure discovery: bow-tie classification, the extended SCC
//! of the dangling-augmented graph, and the split of Pure OUT into sink
//! ergodic classes plus a transient remainder.
//!
//! Augmentation never materializes dangling edges. A virtual hub node with
//! id `n` stands in for them: every dangling node points at the hub and the
//! hub points at every real node, so a path through `d -> hub -> y`
//! witnesses exactly the augmented edge `d -> y`. The hub is discarded from
//! the results afterwards.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WebGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BowTie {
    /// Largest SCC of the original graph (ties broken toward the smaller
    /// minimum node id).
    pub giant_scc: Vec<u32>,
    /// Nodes that reach the giant SCC but are not reachable from it.
    pub in_component: Vec<u32>,
    /// Nodes reachable from the giant SCC that cannot return to it.
    pub out_component: Vec<u32>,
    /// Everything else: tendrils and disconnected pieces.
    pub other: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureDecomposition {
    /// Largest SCC of the augmented graph; the block whose mass curve the
    /// rest of the crate studies.
    pub escc: Vec<u32>,
    /// Sink SCCs of the augmented graph outside the ESCC, ordered by
    /// descending size then ascending minimum node id. These absorb the
    /// walk as the damping factor approaches one.
    pub ergodic_classes: Vec<Vec<u32>>,
    /// Pure-OUT nodes that are transient: they leak into some ergodic
    /// class and never come back.
    pub transient_out: Vec<u32>,
    /// Node permutation realizing the block-triangular layout: the ergodic
    /// classes first, then the transient remainder, then the ESCC.
    pub ordering: Vec<u32>,
}

impl StructureDecomposition {
    pub fn class_count(&self) -> usize {
        self.ergodic_classes.len()
    }

    pub fn pure_out_size(&self) -> usize {
        self.transient_out.len() + self.ergodic_classes.iter().map(Vec::len).sum::<usize>()
    }
}

const UNVISITED: u32 = u32::MAX;

/// SCCs of the graph, or of the dangling-augmented graph, in reverse
/// topological order of the condensation (sinks first). Each component is
/// sorted ascending. Iterative Tarjan; recursion depth up to n is expected
/// and must not touch the call stack.
pub fn strongly_connected_components(graph: &WebGraph, augmented: bool) -> Vec<Vec<u32>> {
    let n = graph.node_count();
    let hub = n as u32;
    let total = if augmented { n + 1 } else { n };

    let child = |v: u32, k: u32| -> Option<u32> {
        if augmented && v == hub {
            return if (k as usize) < n { Some(k) } else { None };
        }
        let row = graph.successors(v);
        if (k as usize) < row.len() {
            Some(row[k as usize])
        } else if augmented && row.is_empty() && k == 0 {
            Some(hub)
        } else {
            None
        }
    };

    let mut index = vec![UNVISITED; total];
    let mut low = vec![0u32; total];
    let mut on_stack = vec![false; total];
    let mut stack: Vec<u32> = Vec::new();
    let mut dfs: Vec<(u32, u32)> = Vec::new();
    let mut next = 0u32;
    let mut components: Vec<Vec<u32>> = Vec::new();

    for root in 0..total as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        on_stack[root as usize] = true;
        stack.push(root);
        dfs.push((root, 0));

        while let Some(frame) = dfs.last_mut() {
            let v = frame.0;
            if let Some(w) = child(v, frame.1) {
                frame.1 += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = next;
                    low[wi] = next;
                    next += 1;
                    on_stack[wi] = true;
                    stack.push(w);
                    dfs.push((w, 0));
                } else if on_stack[wi] && index[wi] < low[v as usize] {
                    low[v as usize] = index[wi];
                }
            } else {
                dfs.pop();
                if let Some(parent) = dfs.last() {
                    let p = parent.0 as usize;
                    if low[v as usize] < low[p] {
                        low[p] = low[v as usize];
                    }
                }
                if low[v as usize] == index[v as usize] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack holds the component");
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }

    if augmented {
        for comp in components.iter_mut() {
            // The hub has the largest id, so after sorting it can only sit
            // at the tail.
            if comp.last() == Some(&hub) {
                comp.pop();
            }
        }
        components.retain(|c| !c.is_empty());
    }
    components
}

/// Index of the principal component: largest, ties toward the smallest
/// minimum node id. Components are nonempty and disjoint, so this is total
/// and unique.
fn principal_component(components: &[Vec<u32>]) -> usize {
    let mut best = 0;
    for (i, comp) in components.iter().enumerate().skip(1) {
        let cur = &components[best];
        if comp.len() > cur.len() || (comp.len() == cur.len() && comp[0] < cur[0]) {
            best = i;
        }
    }
    best
}

fn forward_reachable(graph: &WebGraph, seeds: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &s in seeds {
        seen[s as usize] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &w in graph.successors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

fn backward_reachable(graph: &WebGraph, seeds: &[u32]) -> Vec<bool> {
    let n = graph.node_count();
    let mut indeg = vec![0usize; n];
    for v in 0..n as u32 {
        for &w in graph.successors(v) {
            indeg[w as usize] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &d in &indeg {
        acc += d;
        offsets.push(acc);
    }
    let mut preds = vec![0u32; acc];
    let mut cursor = offsets.clone();
    for v in 0..n as u32 {
        for &w in graph.successors(v) {
            preds[cursor[w as usize]] = v;
            cursor[w as usize] += 1;
        }
    }

    let mut seen = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &s in seeds {
        seen[s as usize] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &p in &preds[offsets[v as usize]..offsets[v as usize + 1]] {
            if !seen[p as usize] {
                seen[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    seen
}

/// Bow-tie classification of the original graph around its largest SCC.
pub fn bow_tie(graph: &WebGraph) -> BowTie {
    let components = strongly_connected_components(graph, false);
    bow_tie_from(graph, &components)
}

fn bow_tie_from(graph: &WebGraph, components: &[Vec<u32>]) -> BowTie {
    let giant = &components[principal_component(components)];
    let forward = forward_reachable(graph, giant);
    let backward = backward_reachable(graph, giant);
    let mut in_giant = vec![false; graph.node_count()];
    for &v in giant {
        in_giant[v as usize] = true;
    }

    let mut in_component = Vec::new();
    let mut out_component = Vec::new();
    let mut other = Vec::new();
    for v in 0..graph.node_count() as u32 {
        let vi = v as usize;
        if in_giant[vi] {
            continue;
        } else if forward[vi] {
            out_component.push(v);
        } else if backward[vi] {
            in_component.push(v);
        } else {
            other.push(v);
        }
    }
    BowTie { giant_scc: giant.clone(), in_component, out_component, other }
}

/// Splits the graph into the ESCC, the sink ergodic classes of Pure OUT,
/// and the transient remainder, with the permutation that realizes the
/// block-triangular transition layout.
pub fn decompose(graph: &WebGraph) -> StructureDecomposition {
    let components = strongly_connected_components(graph, true);
    let escc_idx = principal_component(&components);

    let n = graph.node_count();
    let mut comp_of = vec![0u32; n];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v as usize] = ci as u32;
        }
    }

    // A component is a sink of the augmented graph when no real edge
    // leaves it and it holds no dangling node (dangling rows reach
    // everything, so any component with one is a sink only if it already
    // is the whole graph, in which case it is the ESCC).
    let mut ergodic_classes: Vec<Vec<u32>> = Vec::new();
    let mut transient_out: Vec<u32> = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        if ci == escc_idx {
            continue;
        }
        let mut sink = true;
        'scan: for &v in comp {
            if graph.is_dangling(v) {
                sink = false;
                break;
            }
            for &w in graph.successors(v) {
                if comp_of[w as usize] != ci as u32 {
                    sink = false;
                    break 'scan;
                }
            }
        }
        if sink {
            ergodic_classes.push(comp.clone());
        } else {
            transient_out.extend_from_slice(comp);
        }
    }
    ergodic_classes.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    transient_out.sort_unstable();

    let escc = components[escc_idx].clone();
    let mut ordering = Vec::with_capacity(n);
    for class in &ergodic_classes {
        ordering.extend_from_slice(class);
    }
    ordering.extend_from_slice(&transient_out);
    ordering.extend_from_slice(&escc);

    StructureDecomposition { escc, ergodic_classes, transient_out, ordering }
}

/// Component-size census over both views of the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Census {
    pub total_nodes: usize,
    pub giant_scc: usize,
    pub in_component: usize,
    pub out_component: usize,
    pub escc: usize,
    pub pure_out: usize,
    pub sccs_in_out: usize,
    pub sccs_in_pure_out: usize,
}

impl Census {
    /// Rows in a fixed order, ready for CSV (`component,size`).
    pub fn rows(&self) -> [(&'static str, usize); 8] {
        [
            ("total_nodes", self.total_nodes),
            ("giant_scc", self.giant_scc),
            ("in_component", self.in_component),
            ("out_component", self.out_component),
            ("escc", self.escc),
            ("pure_out", self.pure_out),
            ("sccs_in_out", self.sccs_in_out),
            ("sccs_in_pure_out", self.sccs_in_pure_out),
        ]
    }
}

pub fn census(graph: &WebGraph) -> Census {
    let n = graph.node_count();
    let components = strongly_connected_components(graph, false);
    let tie = bow_tie_from(graph, &components);
    let dec = decompose(graph);

    let mut in_out = vec![false; n];
    for &v in &tie.out_component {
        in_out[v as usize] = true;
    }
    let mut in_escc = vec![false; n];
    for &v in &dec.escc {
        in_escc[v as usize] = true;
    }

    // Original SCCs never straddle a bow-tie bucket or the ESCC boundary
    // (both are unions of original SCCs), so the first node decides.
    let sccs_in_out = components.iter().filter(|c| in_out[c[0] as usize]).count();
    let sccs_in_pure_out = components.iter().filter(|c| !in_escc[c[0] as usize]).count();

    Census {
        total_nodes: n,
        giant_scc: tie.giant_scc.len(),
        in_component: tie.in_component.len(),
        out_component: tie.out_component.len(),
        escc: dec.escc.len(),
        pure_out: n - dec.escc.len(),
        sccs_in_out,
        sccs_in_pure_out,
    }
}

/// Sizes of the original SCCs lying inside Pure OUT, descending. This is
/// the data behind the Pure-OUT SCC histogram.
pub fn pure_out_scc_sizes(graph: &WebGraph) -> Vec<usize> {
    let components = strongly_connected_components(graph, false);
    let dec = decompose(graph);
    let mut in_escc = vec![false; graph.node_count()];
    for &v in &dec.escc {
        in_escc[v as usize] = true;
    }
    let mut sizes: Vec<usize> = components
        .iter()
        .filter(|c| !in_escc[c[0] as usize])
        .map(Vec::len)
        .collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
