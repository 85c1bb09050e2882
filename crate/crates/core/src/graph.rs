//! Undirected graphs: DIMACS `.col` parsing, clique-based preprocessing,
//! vertex-ordering heuristics, and greedy coloring for pool seeding.

use crate::bitset::BitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt::Write as _;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Simple undirected graph with per-vertex neighbor sets. Vertices are
/// 0-based internally; the DIMACS boundary is 1-based.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<BitSet>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: edge before the problem line")]
    EdgeBeforeProblem { line: usize },
    #[error("line {line}: malformed problem line")]
    BadProblemLine { line: usize },
    #[error("line {line}: duplicate problem line")]
    DuplicateProblemLine { line: usize },
    #[error("line {line}: malformed edge line")]
    BadEdgeLine { line: usize },
    #[error("line {line}: endpoint {endpoint} out of range 1..={n}")]
    EndpointOutOfRange { line: usize, endpoint: i64, n: usize },
    #[error("line {line}: unrecognized line type")]
    UnknownLine { line: usize },
    #[error("line {line}: non-UTF8 bytes outside a comment")]
    NonUtf8 { line: usize },
    #[error("missing problem line")]
    MissingProblemLine,
}

/// What the parser dropped: duplicate edge lines and self-loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseSummary {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Build from an edge list; duplicate edges and self-loops are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        let mut g = Graph {
            n,
            m: 0,
            adj: vec![BitSet::new(n); n],
        };
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "endpoint out of range");
        if u == v || self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn is_independent(&self, s: &BitSet) -> bool {
        s.iter().all(|v| !self.adj[v].intersects(s))
    }

    /// Independent and not extendable by any further vertex.
    pub fn is_maximal_independent(&self, s: &BitSet) -> bool {
        if !self.is_independent(s) {
            return false;
        }
        (0..self.n).all(|v| s.contains(v) || self.adj[v].intersects(s))
    }

    pub fn is_clique(&self, s: &BitSet) -> bool {
        s.iter()
            .all(|v| s.iter().all(|u| u == v || self.adj[v].contains(u)))
    }

    /// Parse DIMACS `.col`: `c` comment lines (any bytes), one
    /// `p edge <n> <m>` line, and `e <u> <v>` lines with 1-based
    /// endpoints. Duplicate edges and self-loops are dropped and counted.
    pub fn parse_dimacs(input: &[u8]) -> Result<(Graph, ParseSummary), ParseError> {
        let mut graph: Option<Graph> = None;
        let mut summary = ParseSummary::default();
        for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            let trimmed: &[u8] = {
                let start = raw.iter().position(|b| !b.is_ascii_whitespace());
                match start {
                    Some(s) => &raw[s..],
                    None => continue,
                }
            };
            if trimmed[0] == b'c' {
                continue;
            }
            let text = std::str::from_utf8(trimmed).map_err(|_| ParseError::NonUtf8 { line })?;
            let mut fields = text.split_ascii_whitespace();
            match fields.next() {
                Some("p") => {
                    if graph.is_some() {
                        return Err(ParseError::DuplicateProblemLine { line });
                    }
                    let format = fields.next();
                    let n = fields.next().and_then(|s| s.parse::<usize>().ok());
                    let m = fields.next().and_then(|s| s.parse::<usize>().ok());
                    match (format, n, m) {
                        (Some("edge"), Some(n), Some(_)) => {
                            graph = Some(Graph {
                                n,
                                m: 0,
                                adj: vec![BitSet::new(n); n],
                            });
                        }
                        _ => return Err(ParseError::BadProblemLine { line }),
                    }
                }
                Some("e") => {
                    let g = graph
                        .as_mut()
                        .ok_or(ParseError::EdgeBeforeProblem { line })?;
                    let endpoint = |field: Option<&str>| -> Result<usize, ParseError> {
                        let value = field
                            .and_then(|s| s.parse::<i64>().ok())
                            .ok_or(ParseError::BadEdgeLine { line })?;
                        if value < 1 || value > g.n as i64 {
                            return Err(ParseError::EndpointOutOfRange {
                                line,
                                endpoint: value,
                                n: g.n,
                            });
                        }
                        Ok(value as usize - 1)
                    };
                    let u = endpoint(fields.next())?;
                    let v = endpoint(fields.next())?;
                    if u == v {
                        summary.self_loops += 1;
                    } else if !g.add_edge(u, v) {
                        summary.duplicate_edges += 1;
                    }
                }
                _ => return Err(ParseError::UnknownLine { line }),
            }
        }
        graph
            .map(|g| (g, summary))
            .ok_or(ParseError::MissingProblemLine)
    }

    /// Canonical DIMACS text: `p edge n m`, then sorted `e u v` lines
    /// with `u < v`, 1-based.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.n, self.m);
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if u < v {
                    let _ = writeln!(out, "e {} {}", u + 1, v + 1);
                }
            }
        }
        out
    }
}

/// A permutation of the vertices and its inverse.
#[derive(Clone, Debug)]
pub struct VertexOrdering {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl VertexOrdering {
    pub fn new(order: Vec<usize>) -> VertexOrdering {
        let mut pos = vec![usize::MAX; order.len()];
        for (i, &v) in order.iter().enumerate() {
            assert_eq!(pos[v], usize::MAX, "not a permutation");
            pos[v] = i;
        }
        VertexOrdering { order, pos }
    }

    pub fn identity(n: usize) -> VertexOrdering {
        VertexOrdering::new((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Vertex at position `i` (0-based).
    pub fn vertex_at(&self, i: usize) -> usize {
        self.order[i]
    }

    /// Position of vertex `v` (0-based).
    pub fn position_of(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Heuristic clique: greedy growth from each of the `k` highest-degree
/// seeds, keeping the largest clique found, under a small time budget.
/// No optimality claim.
pub fn greedy_clique(g: &Graph) -> BitSet {
    greedy_clique_with(g, 16, Duration::from_millis(50))
}

pub fn greedy_clique_with(g: &Graph, seeds: usize, budget: Duration) -> BitSet {
    let start = Instant::now();
    let mut best = BitSet::new(g.n());
    if g.n() == 0 {
        return best;
    }
    let mut by_degree: Vec<usize> = (0..g.n()).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for &seed in by_degree.iter().take(seeds.max(1)) {
        let mut clique = BitSet::from_iter(g.n(), [seed]);
        let mut candidates = g.neighbors(seed).clone();
        while let Some(pick) = {
            // Largest remaining co-neighborhood, ties toward low index.
            let mut pick = None;
            let mut pick_score = 0usize;
            for v in candidates.iter() {
                let score = g.neighbors(v).intersection_len(&candidates) + 1;
                if pick.is_none() || score > pick_score {
                    pick = Some(v);
                    pick_score = score;
                }
            }
            pick
        } {
            clique.insert(pick);
            candidates.intersect_with(g.neighbors(pick));
        }
        if clique.len() > best.len() {
            best = clique;
        }
        if start.elapsed() > budget {
            break;
        }
    }
    debug_assert!(g.is_clique(&best));
    best
}

/// Result of clique-based vertex removal, with everything needed to map a
/// coloring of the reduced graph back to the original one.
#[derive(Clone, Debug)]
pub struct PreprocessResult {
    pub reduced: Graph,
    /// The clique used for the degree rule, in original labels.
    pub clique: BitSet,
    /// Removed vertices in removal order, with their original neighbor sets.
    pub removed: Vec<(usize, BitSet)>,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

/// Iteratively remove vertices with degree below `|clique|` (recomputing
/// degrees after each removal) until a fixpoint, then relabel the
/// remainder contiguously. A proper coloring of the reduced graph with at
/// least `|clique|` colors extends to the original graph without new
/// colors.
pub fn preprocess(g: &Graph, clique: &BitSet) -> PreprocessResult {
    debug_assert!(g.is_clique(clique));
    let threshold = clique.len();
    let mut alive = BitSet::from_iter(g.n(), 0..g.n());
    let mut degree: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut removed = Vec::new();
    loop {
        let victim = alive.iter().find(|&v| degree[v] < threshold);
        match victim {
            None => break,
            Some(v) => {
                alive.remove(v);
                for u in g.neighbors(v).iter() {
                    degree[u] = degree[u].saturating_sub(1);
                }
                removed.push((v, g.neighbors(v).clone()));
            }
        }
    }
    let new_to_old: Vec<usize> = alive.iter().collect();
    let mut old_to_new = vec![None; g.n()];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old] = Some(new);
    }
    let mut reduced = Graph {
        n: new_to_old.len(),
        m: 0,
        adj: vec![BitSet::new(new_to_old.len()); new_to_old.len()],
    };
    for (new_u, &old_u) in new_to_old.iter().enumerate() {
        for old_v in g.neighbors(old_u).iter() {
            if let Some(new_v) = old_to_new[old_v] {
                if new_u < new_v {
                    reduced.add_edge(new_u, new_v);
                }
            }
        }
    }
    PreprocessResult {
        reduced,
        clique: clique.clone(),
        removed,
        old_to_new,
        new_to_old,
    }
}

impl PreprocessResult {
    /// Extend a proper coloring of the reduced graph (disjoint classes) to
    /// the original graph: removed vertices are re-inserted in reverse
    /// removal order and given a color absent from their neighborhood.
    /// Never needs more than `max(|classes|, |clique|)` colors.
    pub fn extend_coloring(&self, reduced_classes: &[BitSet]) -> Vec<BitSet> {
        let n = self.old_to_new.len();
        let mut classes: Vec<BitSet> = reduced_classes
            .iter()
            .map(|class| BitSet::from_iter(n, class.iter().map(|v| self.new_to_old[v])))
            .collect();
        for &(v, ref nbrs) in self.removed.iter().rev() {
            let free = classes.iter().position(|class| !class.intersects(nbrs));
            match free {
                Some(k) => classes[k].insert(v),
                None => classes.push(BitSet::from_iter(n, [v])),
            }
        }
        classes
    }
}

/// Maximal path decomposition: greedily grow vertex-disjoint maximal paths
/// in the residual graph and concatenate them.
///
/// Each path is seeded at the lowest-index unvisited vertex of maximum
/// residual degree and extended (in both directions) to the lowest-index
/// eligible neighbor until neither endpoint can grow; it is emitted from
/// its lower-index endpoint. Leftover isolated vertices become length-1
/// paths.
pub fn maximal_path_ordering(g: &Graph) -> VertexOrdering {
    let n = g.n();
    let mut visited = BitSet::new(n);
    let mut residual_degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n)
            .filter(|&v| !visited.contains(v))
            .max_by_key(|&v| (residual_degree[v], std::cmp::Reverse(v)))
            .expect("unvisited vertex exists");
        let mut path = std::collections::VecDeque::from([seed]);
        visited.insert(seed);
        let grow = |endpoint: usize, visited: &BitSet| {
            g.neighbors(endpoint).iter().find(|&u| !visited.contains(u))
        };
        // Forward from the seed, then backward.
        while let Some(next) = grow(*path.back().unwrap(), &visited) {
            path.push_back(next);
            visited.insert(next);
        }
        while let Some(prev) = grow(*path.front().unwrap(), &visited) {
            path.push_front(prev);
            visited.insert(prev);
        }
        for &v in &path {
            for u in g.neighbors(v).iter() {
                residual_degree[u] = residual_degree[u].saturating_sub(1);
            }
        }
        if path.back().unwrap() < path.front().unwrap() {
            order.extend(path.into_iter().rev());
        } else {
            order.extend(path);
        }
    }
    VertexOrdering::new(order)
}

/// DSATUR greedy coloring; every color class is then extended to a
/// maximal independent set (classes may overlap after extension, but the
/// underlying assignment stays proper). Returns the extended classes.
pub fn greedy_coloring(g: &Graph) -> Vec<BitSet> {
    dsatur(g, None::<&mut rand_chacha::ChaCha8Rng>)
}

/// DSATUR with randomized tie-breaking, for generating extra pool
/// candidates from the same graph.
pub fn randomized_coloring<R: Rng>(g: &Graph, rng: &mut R) -> Vec<BitSet> {
    dsatur(g, Some(rng))
}

fn dsatur<R: Rng>(g: &Graph, mut rng: Option<&mut R>) -> Vec<BitSet> {
    let n = g.n();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut neighbor_colors: Vec<BitSet> = vec![BitSet::new(n); n];
    let mut classes: Vec<BitSet> = Vec::new();
    for _ in 0..n {
        let best = (0..n)
            .filter(|&v| color[v].is_none())
            .map(|v| (neighbor_colors[v].len(), g.degree(v)))
            .max()
            .unwrap();
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&v| {
                color[v].is_none() && (neighbor_colors[v].len(), g.degree(v)) == best
            })
            .collect();
        let v = match rng.as_deref_mut() {
            Some(rng) => *candidates.choose(rng).unwrap(),
            None => candidates.remove(0),
        };
        let c = (0..classes.len() + 1)
            .find(|&c| !neighbor_colors[v].contains(c))
            .unwrap();
        if c == classes.len() {
            classes.push(BitSet::new(n));
        }
        classes[c].insert(v);
        color[v] = Some(c);
        for u in g.neighbors(v).iter() {
            neighbor_colors[u].insert(c);
        }
    }
    for class in &mut classes {
        maximalize(g, class);
    }
    classes
}

/// Grow an independent set to a maximal one, adding eligible vertices in
/// index order.
pub fn maximalize(g: &Graph, set: &mut BitSet) {
    debug_assert!(g.is_independent(set));
    for v in 0..g.n() {
        if !set.contains(v) && !g.neighbors(v).intersects(set) {
            set.insert(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    #[test]
    fn parse_triangle() {
        let (g, summary) =
            Graph::parse_dimacs(b"c tiny\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(0, 2));
        assert_eq!(summary, ParseSummary::default());
    }

    #[test]
    fn parse_drops_duplicates_and_loops() {
        let (g, summary) =
            Graph::parse_dimacs(b"p edge 2 3\ne 1 2\ne 1 2\ne 2 2\n").unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(summary.duplicate_edges, 1);
        assert_eq!(summary.self_loops, 1);
        // Symmetric duplicates collapse too.
        let (g, summary) = Graph::parse_dimacs(b"p edge 2 2\ne 1 2\ne 2 1\n").unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(summary.duplicate_edges, 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Graph::parse_dimacs(b"c nothing\n"),
            Err(ParseError::MissingProblemLine)
        ));
        assert!(matches!(
            Graph::parse_dimacs(b"e 1 2\np edge 2 1\n"),
            Err(ParseError::EdgeBeforeProblem { line: 1 })
        ));
        assert!(matches!(
            Graph::parse_dimacs(b"p edge x 1\n"),
            Err(ParseError::BadProblemLine { line: 1 })
        ));
        assert!(matches!(
            Graph::parse_dimacs(b"p edge 3 1\ne 1 4\n"),
            Err(ParseError::EndpointOutOfRange { endpoint: 4, .. })
        ));
        assert!(matches!(
            Graph::parse_dimacs(b"p edge 3 1\nq 1 2\n"),
            Err(ParseError::UnknownLine { line: 2 })
        ));
        // Non-UTF8 bytes are fine in comments, fatal elsewhere.
        assert!(Graph::parse_dimacs(b"c \xff\xfe\np edge 1 0\n").is_ok());
        assert!(matches!(
            Graph::parse_dimacs(b"p edge 1 0\ne \xff 1\n"),
            Err(ParseError::NonUtf8 { line: 2 })
        ));
    }

    #[test]
    fn write_parse_fixpoint() {
        let g = cycle(5);
        let text = g.to_dimacs();
        let (back, _) = Graph::parse_dimacs(text.as_bytes()).unwrap();
        assert_eq!(back.to_dimacs(), text);
    }

    #[test]
    fn clique_on_complete_graph_is_everything() {
        let g = complete(5);
        assert_eq!(greedy_clique(&g).len(), 5);
    }

    #[test]
    fn clique_on_cycle_is_an_edge() {
        let g = cycle(5);
        let c = greedy_clique(&g);
        assert_eq!(c.len(), 2);
        assert!(g.is_clique(&c));
    }

    #[test]
    fn preprocess_star_removes_everything() {
        // K_{1,5} with |clique| = 2: leaves have degree 1 and go first,
        // then the stranded center.
        let g = Graph::from_edges(6, (1..6).map(|v| (0, v)));
        let clique = BitSet::from_iter(6, [0, 1]);
        let result = preprocess(&g, &clique);
        assert_eq!(result.reduced.n(), 0);
        assert_eq!(result.removed.len(), 6);
        let full = result.extend_coloring(&[]);
        assert_eq!(full.len(), 2);
        assert!(is_proper_coloring(&g, &full));
    }

    #[test]
    fn preprocess_k5_with_itself_removes_everything() {
        // Every degree is 4 < 5, so the whole clique dissolves; the
        // extension rebuilds a 5-coloring.
        let g = complete(5);
        let clique = BitSet::from_iter(5, 0..5);
        let result = preprocess(&g, &clique);
        assert_eq!(result.reduced.n(), 0);
        let full = result.extend_coloring(&[]);
        assert_eq!(full.len(), 5);
        assert!(is_proper_coloring(&g, &full));
    }

    #[test]
    fn preprocess_keeps_dense_core() {
        // K4 plus a pendant vertex, clique {0,1,2}: only the pendant has
        // degree below 3, so the K4 core survives.
        let mut edges: Vec<(usize, usize)> =
            (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        edges.push((0, 4));
        let g = Graph::from_edges(5, edges);
        let clique = BitSet::from_iter(5, 0..3);
        let result = preprocess(&g, &clique);
        assert_eq!(result.reduced.n(), 4);
        assert_eq!(result.reduced.m(), 6);
        assert_eq!(result.removed.len(), 1);
        let reduced_classes: Vec<BitSet> =
            (0..4).map(|v| BitSet::from_iter(4, [v])).collect();
        let full = result.extend_coloring(&reduced_classes);
        assert_eq!(full.len(), 4);
        assert!(is_proper_coloring(&g, &full));
    }

    fn is_proper_coloring(g: &Graph, classes: &[BitSet]) -> bool {
        let mut seen = BitSet::new(g.n());
        for class in classes {
            if !g.is_independent(class) {
                return false;
            }
            for v in class.iter() {
                if seen.contains(v) {
                    return false;
                }
                seen.insert(v);
            }
        }
        seen.len() == g.n()
    }

    #[test]
    fn path_ordering_on_path_graph() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(maximal_path_ordering(&g).order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn path_ordering_on_disjoint_edges() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert_eq!(maximal_path_ordering(&g).order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn path_ordering_on_empty_graph() {
        let g = Graph::from_edges(3, []);
        assert_eq!(maximal_path_ordering(&g).order(), &[0, 1, 2]);
    }

    #[test]
    fn path_ordering_paths_are_maximal() {
        let g = cycle(7);
        let ordering = maximal_path_ordering(&g);
        // A cycle decomposes into one maximal path spanning everything.
        assert_eq!(ordering.len(), 7);
        let order = ordering.order();
        for w in order.windows(2) {
            assert!(g.has_edge(w[0], w[1]));
        }
    }

    #[test]
    fn dsatur_on_complete_graph() {
        let classes = greedy_coloring(&complete(3));
        assert_eq!(classes.len(), 3);
        for class in &classes {
            assert_eq!(class.len(), 1);
        }
    }

    #[test]
    fn dsatur_on_five_cycle() {
        let g = cycle(5);
        let classes = greedy_coloring(&g);
        assert_eq!(classes.len(), 3);
        for class in &classes {
            assert!(g.is_maximal_independent(class));
        }
    }

    #[test]
    fn randomized_coloring_is_proper_and_maximal() {
        let g = cycle(6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let classes = randomized_coloring(&g, &mut rng);
            for class in &classes {
                assert!(g.is_maximal_independent(class));
            }
        }
    }

    #[test]
    fn ordering_roundtrip() {
        let ord = VertexOrdering::new(vec![2, 0, 1]);
        assert_eq!(ord.vertex_at(0), 2);
        assert_eq!(ord.position_of(2), 0);
        assert_eq!(ord.position_of(1), 2);
    }
}
