//! Construction of the ZDD characterizing all maximal independent sets of
//! a graph, minimal for the given vertex ordering.
//!
//! The recursion works on the set `U` of vertices left uncovered by some
//! (not necessarily maximal) independent set, together with the position
//! of the next candidate vertex. Taking the candidate removes it and its
//! neighbors from `U`; skipping it advances the candidate. A branch dies
//! as soon as some passed vertex can no longer be covered by any
//! remaining candidate, and succeeds when `U` empties out. States are
//! memoized on `(U, next-candidate)`, and node insertion shares
//! structurally equal subdiagrams, so the result is canonical.

use crate::bitset::BitSet;
use crate::graph::{Graph, VertexOrdering};
use crate::zdd::{NodeId, Zdd};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("node budget {budget} exceeded while building (reached {reached} nodes)")]
    BudgetExceeded { budget: usize, reached: usize },
    #[error("ordering covers {ordering} vertices, graph has {graph}")]
    OrderingMismatch { ordering: usize, graph: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
}

/// Memo key: uncovered set in ordering positions, plus the next candidate
/// position. States reached through different independent sets collide
/// exactly when these agree.
pub fn canonical_key(uncovered: &BitSet, next: usize) -> (BitSet, usize) {
    (uncovered.clone(), next)
}

enum Pending {
    High,
    Low { var: usize, hi: NodeId },
}

struct Frame {
    key: (BitSet, usize),
    pending: Pending,
    low_state: (BitSet, usize),
}

/// Build the ZDD of all maximal independent sets of `g`, with ground-set
/// element `i` meaning the vertex at position `i - 1` of `ord`.
///
/// Node count is capped by `budget`; exceeding it aborts with the partial
/// size. Identical `(graph, ordering)` inputs produce structurally
/// identical diagrams.
pub fn make_mis_zdd(g: &Graph, ord: &VertexOrdering, budget: usize) -> Result<Zdd, BuildError> {
    let n = g.n();
    if n == 0 {
        return Err(BuildError::EmptyGraph);
    }
    if ord.len() != n {
        return Err(BuildError::OrderingMismatch {
            ordering: ord.len(),
            graph: n,
        });
    }
    // Adjacency in ordering positions.
    let padj: Vec<BitSet> = (0..n)
        .map(|p| {
            BitSet::from_iter(
                n,
                g.neighbors(ord.vertex_at(p)).iter().map(|v| ord.position_of(v)),
            )
        })
        .collect();

    let mut zdd = Zdd::new(n);
    let mut memo: HashMap<(BitSet, usize), NodeId> = HashMap::new();

    // Leaf evaluation; `None` means the state needs a real node.
    let leaf = |u: &BitSet, p: usize| -> Option<NodeId> {
        let suffix = {
            let mut s = u.clone();
            s.clear_below(p);
            s
        };
        // A passed uncovered vertex with no neighbor among the remaining
        // candidates can never be covered.
        for q in u.iter() {
            if q >= p {
                break;
            }
            if !padj[q].intersects(&suffix) {
                return Some(NodeId::FALSE);
            }
        }
        if u.is_empty() {
            return Some(NodeId::TRUE);
        }
        None
    };

    // Normalize: next candidate is the first uncovered position >= p.
    let normalize = |u: &BitSet, p: usize| -> usize {
        u.iter().find(|&q| q >= p).unwrap_or(n)
    };

    let root_state = (BitSet::from_iter(n, 0..n), 0usize);
    let mut result: Option<NodeId> = None;

    // Explicit two-phase recursion (graphs with many vertices would
    // overflow the call stack); `result` carries each child value up.
    enum Work {
        Enter((BitSet, usize)),
        Resume(Frame),
    }
    let mut work: Vec<Work> = vec![Work::Enter(root_state)];
    while let Some(item) = work.pop() {
        match item {
            Work::Enter((u, p)) => {
                if let Some(id) = leaf(&u, p) {
                    result = Some(id);
                    continue;
                }
                if let Some(&id) = memo.get(&(u.clone(), p)) {
                    result = Some(id);
                    continue;
                }
                let candidate = p;
                debug_assert!(u.contains(candidate));
                let mut high_u = u.clone();
                high_u.remove(candidate);
                high_u.difference_with(&padj[candidate]);
                let high_next = normalize(&high_u, candidate + 1);
                let low_next = normalize(&u, candidate + 1);
                let low_state = (u.clone(), low_next);
                work.push(Work::Resume(Frame {
                    key: (u, p),
                    pending: Pending::High,
                    low_state,
                }));
                work.push(Work::Enter((high_u, high_next)));
            }
            Work::Resume(mut frame) => {
                let value = result.take().expect("child value available");
                match frame.pending {
                    Pending::High => {
                        let var = frame.key.1 + 1; // candidate position, 1-based
                        frame.pending = Pending::Low { var, hi: value };
                        let low_state = frame.low_state.clone();
                        work.push(Work::Resume(frame));
                        work.push(Work::Enter(low_state));
                    }
                    Pending::Low { var, hi } => {
                        let lo = value;
                        // Zero-suppression and hash-consing live in insert.
                        let id = zdd
                            .insert(var, lo, hi)
                            .expect("construction preserves variable order");
                        if zdd.node_count() > budget {
                            return Err(BuildError::BudgetExceeded {
                                budget,
                                reached: zdd.node_count(),
                            });
                        }
                        memo.insert(frame.key, id);
                        result = Some(id);
                    }
                }
            }
        }
    }
    let root = result.expect("root value computed");
    zdd.set_root(root);
    Ok(zdd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::maximal_path_ordering;
    use num_bigint::BigUint;

    fn build(g: &Graph) -> Zdd {
        let ord = VertexOrdering::identity(g.n());
        make_mis_zdd(g, &ord, usize::MAX).unwrap()
    }

    fn family_of(z: &Zdd) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = z
            .enumerate(usize::MAX)
            .into_iter()
            .map(|s| s.iter().collect())
            .collect();
        sets.sort();
        sets
    }

    #[test]
    fn triangle_has_singleton_maximal_sets() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let z = build(&g);
        assert_eq!(family_of(&z), vec![vec![0], vec![1], vec![2]]);
        z.verify_invariants().unwrap();
        z.verify_canonical().unwrap();
    }

    #[test]
    fn five_cycle_has_five_maximal_sets() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let z = build(&g);
        assert_eq!(z.count_accepted(), BigUint::from(5u32));
        for s in z.enumerate(usize::MAX) {
            assert!(g.is_maximal_independent(&s));
        }
    }

    #[test]
    fn empty_graph_accepts_only_the_full_vertex_set() {
        let g = Graph::from_edges(4, []);
        let z = build(&g);
        assert_eq!(z.count_accepted(), BigUint::from(1u32));
        assert_eq!(family_of(&z), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn isolated_vertex_is_in_every_maximal_set() {
        let g = Graph::from_edges(3, [(0, 1)]);
        let z = build(&g);
        assert_eq!(family_of(&z), vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn single_vertex() {
        let g = Graph::from_edges(1, []);
        let z = build(&g);
        assert_eq!(family_of(&z), vec![vec![0]]);
    }

    #[test]
    fn respects_custom_ordering() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let ord = maximal_path_ordering(&g);
        let z = make_mis_zdd(&g, &ord, usize::MAX).unwrap();
        assert_eq!(z.count_accepted(), BigUint::from(5u32));
        // Members come out in ordering positions; map back to vertices.
        for s in z.enumerate(usize::MAX) {
            let vertices =
                BitSet::from_iter(g.n(), s.iter().map(|p| ord.vertex_at(p)));
            assert!(g.is_maximal_independent(&vertices));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::from_edges(6, [(0, 3), (1, 4), (2, 5)]);
        match make_mis_zdd(&g, &VertexOrdering::identity(6), 3) {
            Err(BuildError::BudgetExceeded { budget: 3, reached }) => {
                assert!(reached > 3);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn ordering_mismatch_is_an_error() {
        let g = Graph::from_edges(3, [(0, 1)]);
        assert!(matches!(
            make_mis_zdd(&g, &VertexOrdering::identity(2), usize::MAX),
            Err(BuildError::OrderingMismatch { .. })
        ));
        let empty = Graph::from_edges(0, []);
        assert!(matches!(
            make_mis_zdd(&empty, &VertexOrdering::identity(0), usize::MAX),
            Err(BuildError::EmptyGraph)
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        let a = build(&g);
        let b = build(&g);
        assert_eq!(a.dump_table(), b.dump_table());
    }

    #[test]
    fn memo_key_semantics() {
        let u = BitSet::from_iter(4, [1, 3]);
        assert_eq!(canonical_key(&u, 2), canonical_key(&u, 2));
        assert_ne!(canonical_key(&u, 2), canonical_key(&u, 3));
        let empty = BitSet::new(4);
        assert_eq!(canonical_key(&empty, 4).0.len(), 0);
    }
}
