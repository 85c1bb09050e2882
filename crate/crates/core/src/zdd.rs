//! Mutable zero-suppressed binary decision diagram over an ordered ground set.
//!
//! A ZDD stores a family of subsets of `{e_1, ..., e_n}` as a DAG. Every
//! internal node tests membership of one element and has a low child
//! (element absent) and a high child (element present). Two terminals
//! accept and reject. The structure here supports the operations a
//! column-generation pricing loop needs: membership evaluation, weighted
//! optimization over the accepted family, exact counting, enumeration,
//! and — the load-bearing piece — in-place removal of a single accepted
//! set (`restrict_set`) in O(n) time with bounded growth.
//!
//! Edges may skip levels ("long edges"); a skipped element present in the
//! queried set forces rejection. Nodes whose high edge would point at the
//! false terminal are never stored (zero-suppression), which keeps sparse
//! families small.

use crate::bitset::BitSet;
use num_bigint::BigUint;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Handle to a node in the arena. Two reserved values denote the terminals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn is_terminal(self) -> bool {
        self.0 <= 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Debug for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            NodeId::FALSE => write!(f, "F"),
            NodeId::TRUE => write!(f, "T"),
            NodeId(i) => write!(f, "#{i}"),
        }
    }
}

// Slot markers stored in `var`. Real variables are 1-based and far below these.
const TERM_MARK: u32 = u32::MAX;
const FREE_MARK: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
struct Node {
    var: u32,
    lo: NodeId,
    hi: NodeId,
    indeg: u32,
}

#[derive(Debug, Error)]
pub enum ZddError {
    #[error("variable index {var} out of range 1..={n}")]
    VarOutOfRange { var: usize, n: usize },
    #[error("child id is not a live node")]
    InvalidChild,
    #[error("variable {var} must precede both children (lo var {lo_var}, hi var {hi_var})")]
    ChildOrder { var: usize, lo_var: usize, hi_var: usize },
    #[error("set is not accepted by the ZDD; cannot restrict it")]
    NotAccepted,
    #[error("weight vector has length {got}, ground set has {expected}")]
    WeightLengthMismatch { expected: usize, got: usize },
}

/// Work/size accounting for one `restrict_set` call.
#[derive(Clone, Copy, Debug, Default)]
pub struct RestrictStats {
    /// Loop steps performed (path walks, duplications, suppression cascade).
    pub steps: usize,
    /// Nodes allocated by the call.
    pub nodes_added: usize,
    /// Nodes deleted by suppression or garbage collection.
    pub nodes_removed: usize,
}

/// ZDD with a flat node arena, a reverse (unique) lookup table for
/// hash-consing, and per-node indegree counts.
///
/// The unique table is kept *sound* at all times: every entry maps a
/// `(var, lo, hi)` triple to a live node carrying exactly that triple.
/// After `restrict_set` calls it may be *incomplete* (canonical form is
/// lost until [`Zdd::reduce`] is called), which is harmless: lookups may
/// miss, never lie.
pub struct Zdd {
    nodes: Vec<Node>,
    free: Vec<u32>,
    unique: HashMap<(u32, NodeId, NodeId), NodeId>,
    root: NodeId,
    n: usize,
    live_internal: usize,
    allocated: u64,
    deleted: u64,
    auto_reduce: Option<(usize, f64)>,
}

impl std::fmt::Debug for Zdd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Zdd")
            .field("n", &self.n)
            .field("root", &self.root)
            .field("nodes", &self.node_count())
            .finish()
    }
}

impl Zdd {
    /// Empty-family ZDD over a ground set of `n` elements.
    pub fn new(n: usize) -> Self {
        let terminal = |_: u32| Node {
            var: TERM_MARK,
            lo: NodeId::FALSE,
            hi: NodeId::FALSE,
            indeg: 0,
        };
        Zdd {
            nodes: vec![terminal(0), terminal(1)],
            free: Vec::new(),
            unique: HashMap::new(),
            root: NodeId::FALSE,
            n,
            live_internal: 0,
            allocated: 0,
            deleted: 0,
            auto_reduce: None,
        }
    }

    /// ZDD accepting either nothing (`false`) or exactly the empty set (`true`).
    pub fn constant(n: usize, accept_empty: bool) -> Self {
        let mut z = Zdd::new(n);
        z.root = if accept_empty { NodeId::TRUE } else { NodeId::FALSE };
        z
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Declare `id` the root. The builder is responsible for it having
    /// indegree zero.
    pub fn set_root(&mut self, id: NodeId) {
        debug_assert!(self.is_live(id));
        self.root = id;
    }

    /// Reachable internal nodes plus the two terminals.
    pub fn node_count(&self) -> usize {
        self.live_internal + 2
    }

    /// Total nodes ever allocated (monotone; used by build budgets).
    pub fn allocations(&self) -> u64 {
        self.allocated
    }

    /// 1-based variable of a node; terminals report `n + 1`.
    pub fn var_of(&self, id: NodeId) -> usize {
        if id.is_terminal() {
            self.n + 1
        } else {
            self.nodes[id.index()].var as usize
        }
    }

    pub fn lo(&self, id: NodeId) -> NodeId {
        self.nodes[id.index()].lo
    }

    pub fn hi(&self, id: NodeId) -> NodeId {
        self.nodes[id.index()].hi
    }

    pub fn indegree(&self, id: NodeId) -> usize {
        self.nodes[id.index()].indeg as usize
    }

    fn is_live(&self, id: NodeId) -> bool {
        id.is_terminal()
            || (id.index() < self.nodes.len() && self.nodes[id.index()].var != FREE_MARK)
    }

    /// Enable reduction whenever the node count exceeds `factor` times the
    /// current size (checked after each `restrict_set`).
    pub fn arm_auto_reduce(&mut self, factor: f64) {
        self.auto_reduce = Some((self.node_count(), factor));
    }

    /// Insert (or find) the node `(var, lo, hi)`.
    ///
    /// Applies the zero-suppression rule: a high edge to the false
    /// terminal yields `lo` directly, allocating nothing. Otherwise the
    /// reverse lookup table is consulted so structurally equal nodes are
    /// shared. Average constant time.
    pub fn insert(&mut self, var: usize, lo: NodeId, hi: NodeId) -> Result<NodeId, ZddError> {
        if var < 1 || var > self.n {
            return Err(ZddError::VarOutOfRange { var, n: self.n });
        }
        if !self.is_live(lo) || !self.is_live(hi) {
            return Err(ZddError::InvalidChild);
        }
        if var >= self.var_of(lo) || var >= self.var_of(hi) {
            return Err(ZddError::ChildOrder {
                var,
                lo_var: self.var_of(lo),
                hi_var: self.var_of(hi),
            });
        }
        if hi == NodeId::FALSE {
            return Ok(lo);
        }
        let key = (var as u32, lo, hi);
        if let Some(&id) = self.unique.get(&key) {
            return Ok(id);
        }
        let node = Node {
            var: var as u32,
            lo,
            hi,
            indeg: 0,
        };
        let id = match self.free.pop() {
            Some(slot) => {
                self.nodes[slot as usize] = node;
                NodeId(slot)
            }
            None => {
                self.nodes.push(node);
                NodeId(self.nodes.len() as u32 - 1)
            }
        };
        self.nodes[lo.index()].indeg += 1;
        self.nodes[hi.index()].indeg += 1;
        self.unique.insert(key, id);
        self.live_internal += 1;
        self.allocated += 1;
        Ok(id)
    }

    fn step(&self, id: NodeId, a: &BitSet) -> NodeId {
        let node = &self.nodes[id.index()];
        if a.contains(node.var as usize - 1) {
            node.hi
        } else {
            node.lo
        }
    }

    fn eval_walk(&self, a: &BitSet) -> (bool, usize) {
        let mut steps = 0usize;
        let mut prev_var = 0usize;
        let mut cur = self.root;
        loop {
            steps += 1;
            let var = self.var_of(cur);
            // Elements skipped since the previous test must be absent.
            if a.any_in_range(prev_var, var - 1) {
                return (false, steps);
            }
            if cur.is_terminal() {
                return (cur == NodeId::TRUE, steps);
            }
            prev_var = var;
            cur = self.step(cur, a);
        }
    }

    /// Does the ZDD accept `a`? Walks the induced path from the root,
    /// rejecting when a long edge skips an element of `a`.
    pub fn evaluate(&self, a: &BitSet) -> bool {
        self.eval_walk(a).0
    }

    /// Topological-order pass computing `f(lo, hi_value_with_weight)` per node.
    /// Children are processed before parents via an explicit DFS stack.
    fn postorder<T: Clone>(
        &self,
        false_val: T,
        true_val: T,
        mut combine: impl FnMut(usize, &T, &T) -> T,
    ) -> Vec<Option<T>> {
        let mut memo: Vec<Option<T>> = vec![None; self.nodes.len()];
        memo[NodeId::FALSE.index()] = Some(false_val);
        memo[NodeId::TRUE.index()] = Some(true_val);
        if self.root.is_terminal() {
            return memo;
        }
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if memo[id.index()].is_some() {
                continue;
            }
            let node = &self.nodes[id.index()];
            if expanded {
                let lo = memo[node.lo.index()].clone().unwrap();
                let hi = memo[node.hi.index()].clone().unwrap();
                memo[id.index()] = Some(combine(node.var as usize, &lo, &hi));
            } else {
                stack.push((id, true));
                if memo[node.lo.index()].is_none() {
                    stack.push((node.lo, false));
                }
                if memo[node.hi.index()].is_none() {
                    stack.push((node.hi, false));
                }
            }
        }
        memo
    }

    /// Maximum-weight accepted set: high edges out of a node with variable
    /// `i` carry weight `w[i-1]`, low edges carry 0, and only paths ending
    /// at the true terminal count. Returns `None` iff the family is empty.
    ///
    /// Ties prefer the low edge, so among equal-weight accepted sets the
    /// one whose characteristic vector is lexicographically smallest in
    /// ground order is returned.
    pub fn max_weight_set(&self, w: &[f64]) -> Result<Option<(BitSet, f64)>, ZddError> {
        if w.len() != self.n {
            return Err(ZddError::WeightLengthMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let memo = self.postorder(f64::NEG_INFINITY, 0.0, |var, &lo, &hi| {
            lo.max(w[var - 1] + hi)
        });
        let root_val = memo[self.root.index()].unwrap();
        if root_val == f64::NEG_INFINITY {
            return Ok(None);
        }
        // Reconstruct the witness, preferring low on ties.
        let mut set = BitSet::new(self.n);
        let mut cur = self.root;
        while !cur.is_terminal() {
            let node = &self.nodes[cur.index()];
            let lo_val = memo[node.lo.index()].unwrap();
            let hi_val = w[node.var as usize - 1] + memo[node.hi.index()].unwrap();
            if lo_val >= hi_val {
                cur = node.lo;
            } else {
                set.insert(node.var as usize - 1);
                cur = node.hi;
            }
        }
        debug_assert_eq!(cur, NodeId::TRUE);
        Ok(Some((set, root_val)))
    }

    /// Exact number of accepted sets.
    pub fn count_accepted(&self) -> BigUint {
        let memo = self.postorder(BigUint::from(0u32), BigUint::from(1u32), |_, lo, hi| {
            lo + hi
        });
        memo[self.root.index()].clone().unwrap()
    }

    /// Up to `limit` accepted sets, low branches first (lexicographically
    /// smallest characteristic vectors first).
    pub fn enumerate(&self, limit: usize) -> Vec<BitSet> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let mut stack = vec![(self.root, BitSet::new(self.n))];
        while let Some((id, prefix)) = stack.pop() {
            if id == NodeId::FALSE {
                continue;
            }
            if id == NodeId::TRUE {
                out.push(prefix);
                if out.len() == limit {
                    break;
                }
                continue;
            }
            let node = &self.nodes[id.index()];
            let mut with = prefix.clone();
            with.insert(node.var as usize - 1);
            stack.push((node.hi, with));
            stack.push((node.lo, prefix));
        }
        out
    }

    // Remove `id`'s unique-table entry if it is the registered owner.
    fn unregister(&mut self, id: NodeId) {
        let node = &self.nodes[id.index()];
        let key = (node.var, node.lo, node.hi);
        if self.unique.get(&key) == Some(&id) {
            self.unique.remove(&key);
        }
    }

    // Delete a node whose indegree reached zero; recursively collect
    // children that become unreferenced. Returns nodes removed.
    fn collect_garbage(&mut self, seeds: Vec<NodeId>, steps: &mut usize) -> usize {
        let mut removed = 0;
        let mut work = seeds;
        while let Some(id) = work.pop() {
            *steps += 1;
            if id.is_terminal()
                || id == self.root
                || self.nodes[id.index()].var == FREE_MARK
                || self.nodes[id.index()].indeg > 0
            {
                continue;
            }
            self.unregister(id);
            let (lo, hi) = {
                let node = &self.nodes[id.index()];
                (node.lo, node.hi)
            };
            for child in [lo, hi] {
                self.nodes[child.index()].indeg -= 1;
                if !child.is_terminal() && self.nodes[child.index()].indeg == 0 {
                    work.push(child);
                }
            }
            self.nodes[id.index()].var = FREE_MARK;
            self.free.push(id.0 as u32);
            self.live_internal -= 1;
            self.deleted += 1;
            removed += 1;
        }
        removed
    }

    /// Remove exactly the set `a` from the accepted family, in place.
    ///
    /// Walks the induced path until the first node with indegree at least
    /// two (the split node), duplicates the remainder of the path with the
    /// duplicate tail ending at the false terminal, and redirects the
    /// split node's parent edge to the duplicate head. When no node on the
    /// path is shared, the path is rewired in place without duplication.
    /// Duplicates whose high child would be the false terminal are
    /// suppressed as they are built, and a suppression that empties a
    /// parent's high edge cascades upward so the zero-suppression
    /// invariant holds afterwards.
    ///
    /// Runs in O(n) and adds at most n nodes. Returns work/size accounting.
    ///
    /// Errors with [`ZddError::NotAccepted`] if `a` is not currently in
    /// the family: the caller's pool and the ZDD have desynchronized.
    pub fn restrict_set(&mut self, a: &BitSet) -> Result<RestrictStats, ZddError> {
        let mut stats = RestrictStats::default();

        // Precondition: the set must currently be accepted.
        let (accepted, eval_steps) = self.eval_walk(a);
        stats.steps += eval_steps;
        if !accepted {
            return Err(ZddError::NotAccepted);
        }

        // Prefix: path nodes with indegree < 2 (ends at the split node or
        // a terminal). Every prefix node's sole parent is its predecessor.
        let mut prefix: Vec<NodeId> = Vec::new();
        let mut cur = self.root;
        while !cur.is_terminal() && self.nodes[cur.index()].indeg < 2 {
            stats.steps += 1;
            prefix.push(cur);
            cur = self.step(cur, a);
        }
        let split = cur;

        // Duplicate the remainder of the path (split node to terminal),
        // bottom-up, with the tail ending at the false terminal. Inserts
        // apply zero-suppression and hash-consing, so duplicates that lose
        // their high edge fold away immediately.
        let mut tail: Vec<NodeId> = Vec::new();
        let mut walk = split;
        while !walk.is_terminal() {
            stats.steps += 1;
            tail.push(walk);
            walk = self.step(walk, a);
        }
        let before_alloc = self.allocated;
        let mut replacement = NodeId::FALSE;
        for &x in tail.iter().rev() {
            stats.steps += 1;
            let node = &self.nodes[x.index()];
            let (var, lo, hi) = (node.var as usize, node.lo, node.hi);
            replacement = if a.contains(var - 1) {
                self.insert(var, lo, replacement)?
            } else {
                self.insert(var, replacement, hi)?
            };
        }
        stats.nodes_added = (self.allocated - before_alloc) as usize;

        // Attach the replacement at the deepest prefix node, suppressing
        // prefix nodes whose high edge would become the false terminal.
        let mut val = replacement;
        let mut gc_seeds: Vec<NodeId> = Vec::new();
        let mut attached = false;
        for j in (0..prefix.len()).rev() {
            stats.steps += 1;
            let y = prefix[j];
            let path_hi = a.contains(self.nodes[y.index()].var as usize - 1);
            let old_target = if path_hi {
                self.nodes[y.index()].hi
            } else {
                self.nodes[y.index()].lo
            };
            if path_hi && val == NodeId::FALSE {
                // y would violate zero-suppression; replace it by its low child.
                let lo = self.nodes[y.index()].lo;
                self.unregister(y);
                for child in [lo, old_target] {
                    self.nodes[child.index()].indeg -= 1;
                    if !child.is_terminal() {
                        gc_seeds.push(child);
                    }
                }
                self.nodes[y.index()].var = FREE_MARK;
                self.free.push(y.0 as u32);
                self.live_internal -= 1;
                self.deleted += 1;
                stats.nodes_removed += 1;
                val = lo;
            } else {
                self.unregister(y);
                {
                    let node = &mut self.nodes[y.index()];
                    if path_hi {
                        node.hi = val;
                    } else {
                        node.lo = val;
                    }
                }
                self.nodes[old_target.index()].indeg -= 1;
                if !old_target.is_terminal() {
                    gc_seeds.push(old_target);
                }
                self.nodes[val.index()].indeg += 1;
                let node = &self.nodes[y.index()];
                let key = (node.var, node.lo, node.hi);
                self.unique.entry(key).or_insert(y);
                attached = true;
                break;
            }
        }
        if !attached {
            // The entire prefix folded away (or the root was a terminal):
            // the replacement becomes the root.
            self.root = val;
        }
        stats.nodes_removed += self.collect_garbage(gc_seeds, &mut stats.steps);

        if let Some((baseline, factor)) = self.auto_reduce {
            if self.node_count() as f64 > baseline as f64 * factor {
                self.reduce();
                self.auto_reduce = Some((self.node_count().max(baseline), factor));
            }
        }
        Ok(stats)
    }

    /// Restore canonical form: merge nodes sharing `(var, lo, hi)`, apply
    /// zero-suppression, drop unreachable nodes, and rebuild indegrees and
    /// the unique table. The accepted family is unchanged; the node count
    /// never increases. Node ids are not stable across this call.
    pub fn reduce(&mut self) {
        let mut fresh = Zdd::new(self.n);
        if self.root.is_terminal() {
            fresh.root = self.root;
        } else {
            let mut map: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
            map[NodeId::FALSE.index()] = Some(NodeId::FALSE);
            map[NodeId::TRUE.index()] = Some(NodeId::TRUE);
            let mut stack = vec![(self.root, false)];
            while let Some((id, expanded)) = stack.pop() {
                if map[id.index()].is_some() {
                    continue;
                }
                let node = &self.nodes[id.index()];
                if expanded {
                    let lo = map[node.lo.index()].unwrap();
                    let hi = map[node.hi.index()].unwrap();
                    let new_id = fresh
                        .insert(node.var as usize, lo, hi)
                        .expect("reduce preserves structural validity");
                    map[id.index()] = Some(new_id);
                } else {
                    stack.push((id, true));
                    stack.push((node.lo, false));
                    stack.push((node.hi, false));
                }
            }
            fresh.root = map[self.root.index()].unwrap();
        }
        fresh.allocated = self.allocated;
        fresh.deleted =
            self.deleted + self.live_internal.saturating_sub(fresh.live_internal) as u64;
        fresh.auto_reduce = self.auto_reduce;
        *self = fresh;
    }

    /// Structural health check used by tests: live set equals the set
    /// reachable from the root, indegrees match stored edges, every live
    /// node respects zero-suppression and variable monotonicity, and the
    /// unique table never lies.
    pub fn verify_invariants(&self) -> Result<(), String> {
        let mut reach = vec![false; self.nodes.len()];
        reach[NodeId::FALSE.index()] = true;
        reach[NodeId::TRUE.index()] = true;
        let mut indeg = vec![0u32; self.nodes.len()];
        if !self.root.is_terminal() {
            if !self.is_live(self.root) {
                return Err("root is not a live node".into());
            }
            if self.nodes[self.root.index()].indeg != 0 {
                return Err("root has nonzero indegree".into());
            }
            let mut stack = vec![self.root];
            reach[self.root.index()] = true;
            while let Some(id) = stack.pop() {
                let node = &self.nodes[id.index()];
                if node.hi == NodeId::FALSE {
                    return Err(format!("zero-suppression violated at {id:?}"));
                }
                for child in [node.lo, node.hi] {
                    if self.var_of(child) <= node.var as usize {
                        return Err(format!("variable order violated at {id:?}"));
                    }
                    indeg[child.index()] += 1;
                    if !child.is_terminal() && !reach[child.index()] {
                        reach[child.index()] = true;
                        stack.push(child);
                    }
                }
            }
        }
        let mut live = 0;
        for (i, node) in self.nodes.iter().enumerate().skip(2) {
            if node.var == FREE_MARK {
                continue;
            }
            live += 1;
            if !reach[i] {
                return Err(format!("node #{i} is live but unreachable"));
            }
            if node.indeg != indeg[i] {
                return Err(format!(
                    "indegree mismatch at #{i}: stored {} recomputed {}",
                    node.indeg, indeg[i]
                ));
            }
        }
        if live != self.live_internal {
            return Err(format!(
                "live count mismatch: stored {} recomputed {live}",
                self.live_internal
            ));
        }
        for (&(var, lo, hi), &id) in &self.unique {
            let node = &self.nodes[id.index()];
            if node.var != var || node.lo != lo || node.hi != hi {
                return Err(format!("unique table entry for {id:?} is stale"));
            }
        }
        Ok(())
    }

    /// No two live nodes share a `(var, lo, hi)` triple (canonical form).
    pub fn verify_canonical(&self) -> Result<(), String> {
        let mut seen = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate().skip(2) {
            if node.var == FREE_MARK {
                continue;
            }
            if let Some(prev) = seen.insert((node.var, node.lo, node.hi), i) {
                return Err(format!("nodes #{prev} and #{i} share a triple"));
            }
        }
        Ok(())
    }

    /// Debug dump: one `id var lo hi indeg` line per live node.
    pub fn dump_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "root {:?} n {}", self.root, self.n);
        for (i, node) in self.nodes.iter().enumerate() {
            if node.var == FREE_MARK {
                continue;
            }
            if i <= 1 {
                let name = if i == 0 { "F" } else { "T" };
                let _ = writeln!(out, "{name} - - - {}", node.indeg);
            } else {
                let _ = writeln!(
                    out,
                    "{} {} {:?} {:?} {}",
                    i, node.var, node.lo, node.hi, node.indeg
                );
            }
        }
        out
    }

    /// DOT export for visualization; solid edges are high, dashed are low.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph zdd {\n  rankdir=TB;\n");
        let _ = writeln!(out, "  f [label=\"0\", shape=box];");
        let _ = writeln!(out, "  t [label=\"1\", shape=box];");
        let name = |id: NodeId| match id {
            NodeId::FALSE => "f".to_string(),
            NodeId::TRUE => "t".to_string(),
            NodeId(i) => format!("n{i}"),
        };
        for (i, node) in self.nodes.iter().enumerate().skip(2) {
            if node.var == FREE_MARK {
                continue;
            }
            let _ = writeln!(out, "  n{i} [label=\"e{}\"];", node.var);
            let _ = writeln!(out, "  n{i} -> {} [style=dashed];", name(node.lo));
            let _ = writeln!(out, "  n{i} -> {};", name(node.hi));
        }
        let _ = writeln!(out, "  root -> {} [style=dotted];", name(self.root));
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, items: &[usize]) -> BitSet {
        BitSet::from_iter(n, items.iter().copied())
    }

    /// The four-set family {∅, {e1,e2}, {e3,e4}, {e1,e2,e3,e4}} over a
    /// ground set of four elements; the smallest ZDD for it has four
    /// internal nodes and uses long edges.
    fn product_family() -> Zdd {
        let mut z = Zdd::new(4);
        let d = z.insert(4, NodeId::FALSE, NodeId::TRUE).unwrap();
        let c = z.insert(3, NodeId::TRUE, d).unwrap();
        let b = z.insert(2, NodeId::FALSE, c).unwrap();
        let a = z.insert(1, c, b).unwrap();
        z.set_root(a);
        z.verify_invariants().unwrap();
        z
    }

    #[test]
    fn insert_zero_suppression_returns_low_child() {
        let mut z = Zdd::new(4);
        let x = z.insert(3, NodeId::TRUE, NodeId::TRUE).unwrap();
        assert_eq!(z.insert(2, x, NodeId::FALSE).unwrap(), x);
        assert_eq!(z.node_count(), 3);
    }

    #[test]
    fn insert_is_idempotent_via_unique_table() {
        let mut z = Zdd::new(4);
        let first = z.insert(2, NodeId::TRUE, NodeId::TRUE).unwrap();
        let second = z.insert(2, NodeId::TRUE, NodeId::TRUE).unwrap();
        assert_eq!(first, second);
        assert_eq!(z.node_count(), 3);
    }

    #[test]
    fn insert_updates_indegrees() {
        let mut z = Zdd::new(4);
        let before = z.indegree(NodeId::TRUE);
        z.insert(1, NodeId::FALSE, NodeId::TRUE).unwrap();
        assert_eq!(z.indegree(NodeId::TRUE), before + 1);
        assert_eq!(z.indegree(NodeId::FALSE), 1);
    }

    #[test]
    fn insert_rejects_bad_input() {
        let mut z = Zdd::new(4);
        assert!(matches!(
            z.insert(0, NodeId::FALSE, NodeId::TRUE),
            Err(ZddError::VarOutOfRange { .. })
        ));
        assert!(matches!(
            z.insert(5, NodeId::FALSE, NodeId::TRUE),
            Err(ZddError::VarOutOfRange { .. })
        ));
        let x = z.insert(2, NodeId::TRUE, NodeId::TRUE).unwrap();
        assert!(matches!(
            z.insert(3, x, NodeId::TRUE),
            Err(ZddError::ChildOrder { .. })
        ));
    }

    #[test]
    fn evaluate_product_family() {
        let z = product_family();
        assert!(z.evaluate(&set(4, &[])));
        assert!(z.evaluate(&set(4, &[0, 1])));
        assert!(z.evaluate(&set(4, &[2, 3])));
        assert!(z.evaluate(&set(4, &[0, 1, 2, 3])));
        // Path ends at the false terminal.
        assert!(!z.evaluate(&set(4, &[2])));
        // A long edge skips e4, which is present.
        assert!(!z.evaluate(&set(4, &[0, 1, 3])));
        assert!(!z.evaluate(&set(4, &[0])));
        assert!(!z.evaluate(&set(4, &[1, 2, 3])));
    }

    #[test]
    fn max_weight_follows_longest_path() {
        let z = product_family();
        let (best, value) = z.max_weight_set(&[-1.0, -1.0, 2.0, 1.0]).unwrap().unwrap();
        assert_eq!(best, set(4, &[2, 3]));
        assert_eq!(value, 3.0);
    }

    #[test]
    fn max_weight_on_trivial_families() {
        let only_empty = Zdd::constant(3, true);
        let (best, value) = only_empty.max_weight_set(&[5.0, 5.0, 5.0]).unwrap().unwrap();
        assert!(best.is_empty());
        assert_eq!(value, 0.0);

        let nothing = Zdd::constant(3, false);
        assert!(nothing.max_weight_set(&[1.0, 1.0, 1.0]).unwrap().is_none());

        let z = product_family();
        assert!(matches!(
            z.max_weight_set(&[1.0]),
            Err(ZddError::WeightLengthMismatch { .. })
        ));
    }

    #[test]
    fn max_weight_breaks_ties_toward_lexicographically_smallest() {
        // {e1} and {e2} both weigh 1; the lex-smaller characteristic
        // vector is {e2} (0,1) over {e1} (1,0).
        let mut z = Zdd::new(2);
        let b = z.insert(2, NodeId::FALSE, NodeId::TRUE).unwrap();
        let a = z.insert(1, b, NodeId::TRUE).unwrap();
        z.set_root(a);
        let (best, value) = z.max_weight_set(&[1.0, 1.0]).unwrap().unwrap();
        assert_eq!(value, 1.0);
        assert_eq!(best, set(2, &[1]));
    }

    #[test]
    fn count_and_enumerate_product_family() {
        let z = product_family();
        assert_eq!(z.count_accepted(), BigUint::from(4u32));
        let mut got = z.enumerate(10);
        got.sort();
        let mut want = vec![
            set(4, &[]),
            set(4, &[0, 1]),
            set(4, &[2, 3]),
            set(4, &[0, 1, 2, 3]),
        ];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(z.enumerate(2).len(), 2);
        assert!(Zdd::constant(4, false).enumerate(10).is_empty());
        assert_eq!(Zdd::constant(4, false).count_accepted(), BigUint::from(0u32));
    }

    #[test]
    fn node_count_product_family() {
        assert_eq!(product_family().node_count(), 6);
        assert_eq!(Zdd::constant(5, false).node_count(), 2);
    }

    #[test]
    fn restrict_splits_at_shared_node() {
        // Removing the full set from the product family: the split node is
        // the shared e3 node; both duplicates fold away by suppression and
        // the e2 node's high edge lands on the true terminal.
        let mut z = Zdd::new(4);
        let d = z.insert(4, NodeId::FALSE, NodeId::TRUE).unwrap();
        let c = z.insert(3, NodeId::TRUE, d).unwrap();
        let b = z.insert(2, NodeId::FALSE, c).unwrap();
        let a = z.insert(1, c, b).unwrap();
        z.set_root(a);
        assert_eq!(z.indegree(c), 2);

        let before = z.node_count();
        let stats = z.restrict_set(&set(4, &[0, 1, 2, 3])).unwrap();
        z.verify_invariants().unwrap();
        assert!(z.evaluate(&set(4, &[])));
        assert!(z.evaluate(&set(4, &[0, 1])));
        assert!(z.evaluate(&set(4, &[2, 3])));
        assert!(!z.evaluate(&set(4, &[0, 1, 2, 3])));
        assert_eq!(z.count_accepted(), BigUint::from(3u32));
        assert!(z.node_count() <= before + 4, "growth bounded by n");
        assert_eq!(z.hi(b), NodeId::TRUE);
        assert!(stats.nodes_added <= 4);
    }

    #[test]
    fn restrict_empty_set_from_empty_only_family() {
        let mut z = Zdd::constant(3, true);
        z.restrict_set(&set(3, &[])).unwrap();
        assert_eq!(z.root(), NodeId::FALSE);
        assert_eq!(z.count_accepted(), BigUint::from(0u32));
        for elems in [&[][..], &[0], &[1, 2]] {
            assert!(!z.evaluate(&set(3, elems)));
        }
    }

    #[test]
    fn restrict_rewires_in_place_when_path_is_unshared() {
        // Family {{e1}}: the whole path is unshared; the root folds to the
        // false terminal and the node is garbage collected.
        let mut z = Zdd::new(2);
        let a = z.insert(1, NodeId::FALSE, NodeId::TRUE).unwrap();
        z.set_root(a);
        let stats = z.restrict_set(&set(2, &[0])).unwrap();
        assert_eq!(z.root(), NodeId::FALSE);
        assert_eq!(z.node_count(), 2);
        assert_eq!(stats.nodes_removed, 1);
        z.verify_invariants().unwrap();
    }

    #[test]
    fn restrict_suppression_cascades_through_low_edge_parent() {
        // Family {{e1}, {e2}}: removing {e2} forces the e2 node to fold
        // away and the root's low edge to land on the false terminal.
        let mut z = Zdd::new(2);
        let b = z.insert(2, NodeId::FALSE, NodeId::TRUE).unwrap();
        let a = z.insert(1, b, NodeId::TRUE).unwrap();
        z.set_root(a);
        z.restrict_set(&set(2, &[1])).unwrap();
        z.verify_invariants().unwrap();
        assert!(z.evaluate(&set(2, &[0])));
        assert!(!z.evaluate(&set(2, &[1])));
        assert_eq!(z.count_accepted(), BigUint::from(1u32));
    }

    #[test]
    fn restrict_rejects_non_member() {
        let mut z = product_family();
        assert!(matches!(
            z.restrict_set(&set(4, &[0])),
            Err(ZddError::NotAccepted)
        ));
        // And the structure is untouched.
        z.verify_invariants().unwrap();
        assert_eq!(z.count_accepted(), BigUint::from(4u32));
    }

    #[test]
    fn restricting_everything_empties_the_family() {
        let mut z = product_family();
        for elems in [&[0usize, 1, 2, 3][..], &[], &[0, 1], &[2, 3]] {
            z.restrict_set(&set(4, elems)).unwrap();
            z.verify_invariants().unwrap();
        }
        assert_eq!(z.count_accepted(), BigUint::from(0u32));
        assert_eq!(z.root(), NodeId::FALSE);
    }

    #[test]
    fn reduce_is_a_fixed_point_on_canonical_input() {
        let mut z = product_family();
        let before = z.node_count();
        z.reduce();
        assert_eq!(z.node_count(), before);
        assert_eq!(z.count_accepted(), BigUint::from(4u32));
        z.verify_invariants().unwrap();
        z.verify_canonical().unwrap();
    }

    #[test]
    fn reduce_preserves_semantics_after_restricts() {
        let mut z = product_family();
        z.restrict_set(&set(4, &[2, 3])).unwrap();
        z.restrict_set(&set(4, &[])).unwrap();
        let count_before = z.count_accepted();
        let nodes_before = z.node_count();
        z.reduce();
        assert_eq!(z.count_accepted(), count_before);
        assert!(z.node_count() <= nodes_before);
        z.verify_invariants().unwrap();
        z.verify_canonical().unwrap();
        assert!(z.evaluate(&set(4, &[0, 1])));
        assert!(z.evaluate(&set(4, &[0, 1, 2, 3])));
        assert!(!z.evaluate(&set(4, &[2, 3])));
        assert!(!z.evaluate(&set(4, &[])));
    }

    #[test]
    fn auto_reduce_triggers_on_growth() {
        let mut z = product_family();
        z.arm_auto_reduce(1.0);
        // Any growth beyond the baseline forces a reduction, so the
        // structure stays canonical after each restrict.
        z.restrict_set(&set(4, &[])).unwrap();
        z.verify_invariants().unwrap();
        z.verify_canonical().unwrap();
        assert_eq!(z.count_accepted(), BigUint::from(3u32));
    }

    #[test]
    fn dumps_render() {
        let z = product_family();
        let table = z.dump_table();
        assert!(table.contains("root"));
        assert_eq!(table.lines().count(), 1 + z.node_count());
        let dot = z.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("style=dashed"));
    }
}
