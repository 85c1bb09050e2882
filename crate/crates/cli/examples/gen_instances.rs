//! Regenerates the committed files under `instances/`.
//!
//! myciel3/myciel4 are Mycielski graphs (iterated from K2), queen9_9 is
//! the 9x9 queens graph, and rand125_09 is a seeded G(125, 0.9) random
//! graph standing in for a dense 125-vertex benchmark. All constructions
//! are deterministic, so the files can be re-created byte for byte:
//!
//!     cargo run -p zddcolor-cli --example gen_instances

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    fn to_dimacs(&self, comment: &str) -> String {
        let mut edges = self.edges.clone();
        edges.sort();
        edges.dedup();
        let mut out = format!("c {comment}\np edge {} {}\n", self.n, edges.len());
        for (u, v) in edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// Mycielskian: originals keep their edges, shadow i sees the neighbors
/// of original i, and an apex sees every shadow. Triangle-free inputs
/// stay triangle-free while the chromatic number grows by one.
fn mycielskian(g: &EdgeList) -> EdgeList {
    let n = g.n;
    let mut edges = g.edges.clone();
    for &(u, v) in &g.edges {
        edges.push((u.min(n + v), u.max(n + v)));
        edges.push((v.min(n + u), v.max(n + u)));
    }
    for i in 0..n {
        edges.push((n + i, 2 * n));
    }
    EdgeList { n: 2 * n + 1, edges }
}

fn queens(size: usize) -> EdgeList {
    let id = |r: usize, c: usize| r * size + c;
    let mut edges = Vec::new();
    for r1 in 0..size {
        for c1 in 0..size {
            for r2 in 0..size {
                for c2 in 0..size {
                    let (a, b) = (id(r1, c1), id(r2, c2));
                    if a < b
                        && (r1 == r2
                            || c1 == c2
                            || r1.abs_diff(r2) == c1.abs_diff(c2))
                    {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    EdgeList { n: size * size, edges }
}

fn gnp(n: usize, p: f64, seed: u64) -> EdgeList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    EdgeList { n, edges }
}

fn main() -> std::io::Result<()> {
    let k2 = EdgeList { n: 2, edges: vec![(0, 1)] };
    let c5 = mycielskian(&k2);
    let myciel3 = mycielskian(&c5);
    let myciel4 = mycielskian(&myciel3);

    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    std::fs::create_dir_all(&dir)?;
    let write = |name: &str, text: String| -> std::io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(())
    };
    write(
        "myciel3.col",
        myciel3.to_dimacs("Mycielski graph, 2 iterations from K2 (chromatic number 4)"),
    )?;
    write(
        "myciel4.col",
        myciel4.to_dimacs("Mycielski graph, 3 iterations from K2 (chromatic number 5)"),
    )?;
    write(
        "queen9_9.col",
        queens(9).to_dimacs("9x9 queens graph (chromatic number 10)"),
    )?;
    write(
        "rand125_09.col",
        gnp(125, 0.9, 20260810).to_dimacs("G(125, 0.9), ChaCha8 seed 20260810"),
    )?;
    Ok(())
}
