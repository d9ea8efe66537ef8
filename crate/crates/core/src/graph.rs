//! Undirected, connected interaction topologies.
//!
//! Adjacency is stored in compressed sparse row form with every neighbor list
//! sorted ascending, so that drawing a uniform index into a list selects the
//! same neighbor on every platform for the same random stream.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// How a [`Graph`] was built. Only used for labelling and for the complete-graph
/// sampling fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Complete,
    Ring,
    Torus { rows: usize, cols: usize },
    Custom,
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    shape: Shape,
}

impl Graph {
    /// Every node adjacent to the `n - 1` others.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!(
                "complete graph needs n >= 2, got {n}"
            )));
        }
        let adjacency = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Ok(Self::from_sorted(adjacency, Shape::Complete))
    }

    /// Cycle on `n` nodes: `i` is adjacent to `i +- 1 mod n`.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
        }
        let adjacency = (0..n)
            .map(|i| {
                let mut nb = vec![(i + 1) % n, (i + n - 1) % n];
                nb.sort_unstable();
                nb
            })
            .collect();
        Ok(Self::from_sorted(adjacency, Shape::Ring))
    }

    /// Wraparound grid, node `(r, c)` has id `r * cols + c`.
    pub fn torus(rows: usize, cols: usize) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(Error::InvalidSize(format!(
                "torus needs rows, cols >= 3, got {rows}x{cols}"
            )));
        }
        let id = |r: usize, c: usize| r * cols + c;
        let adjacency = (0..rows * cols)
            .map(|v| {
                let (r, c) = (v / cols, v % cols);
                let mut nb = vec![
                    id((r + rows - 1) % rows, c),
                    id((r + 1) % rows, c),
                    id(r, (c + cols - 1) % cols),
                    id(r, (c + 1) % cols),
                ];
                nb.sort_unstable();
                nb
            })
            .collect();
        Ok(Self::from_sorted(adjacency, Shape::Torus { rows, cols }))
    }

    /// Arbitrary topology. Duplicate edges are dropped; self-loops, out-of-range
    /// ids and disconnected graphs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("graph needs n >= 2, got {n}")));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidEdge { u, v, n });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
            nb.dedup();
        }
        let g = Self::from_sorted(adjacency, Shape::Custom);
        let components = g.component_count();
        if components != 1 {
            return Err(Error::NotConnected { components });
        }
        Ok(g)
    }

    /// Parses the edge-list text format: a `n <count>` header line followed by
    /// one whitespace-separated `u v` pair per line. Lines starting with `#` and
    /// blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let mut fields = line.split_whitespace();
            match n {
                None => {
                    if fields.next() != Some("n") {
                        return Err(parse_err("expected header `n <count>`"));
                    }
                    let count = fields
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| parse_err("bad node count"))?;
                    n = Some(count);
                }
                Some(_) => {
                    let mut next = || {
                        fields
                            .next()
                            .and_then(|s| s.parse::<usize>().ok())
                            .ok_or_else(|| parse_err("expected `u v`"))
                    };
                    let u = next()?;
                    let v = next()?;
                    edges.push((u, v));
                }
            }
            if n.is_some() && line.split_whitespace().count() > 2 {
                return Err(parse_err("trailing fields"));
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing `n <count>` header".into(),
        })?;
        Self::from_edges(n, &edges)
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    fn from_sorted(adjacency: Vec<Vec<usize>>, shape: Shape) -> Self {
        let n = adjacency.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for nb in adjacency {
            neighbors.extend(nb.into_iter().map(|v| v as u32));
            offsets.push(neighbors.len());
        }
        Self {
            n,
            offsets,
            neighbors,
            shape,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Uniform neighbor of `i`. Consumes exactly one bounded-uniform draw.
    #[inline]
    pub fn sample_neighbor<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> usize {
        let deg = self.degree(i);
        let k = rng.random_range(0..deg);
        if self.shape == Shape::Complete {
            // sorted list of all ids except i
            if k < i {
                k
            } else {
                k + 1
            }
        } else {
            self.neighbors[self.offsets[i] + k] as usize
        }
    }

    /// Number of connected components, by BFS.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    let v = v as usize;
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Complete => write!(f, "complete"),
            Shape::Ring => write!(f, "ring"),
            Shape::Torus { rows, cols } => write!(f, "torus{rows}x{cols}"),
            Shape::Custom => write!(f, "custom"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_well_formed(g: &Graph) {
        for i in 0..g.node_count() {
            let nb = g.neighbors(i);
            assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted, no duplicates");
            for &j in nb {
                assert_ne!(j as usize, i, "self-loop at {i}");
                assert!(g.has_edge(j as usize, i), "asymmetric edge {i}-{j}");
            }
        }
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn complete_graphs() {
        let g = Graph::complete(2).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        let g = Graph::complete(4).unwrap();
        assert!((0..4).all(|i| g.degree(i) == 3));
        let g = Graph::complete(100).unwrap();
        // n(n-1)/2 by counting unordered pairs directly
        let pairs = (0..100).flat_map(|u| (u + 1..100).map(move |v| (u, v))).count();
        assert_eq!(g.edge_count(), pairs);
        assert_eq!(pairs, 4950);
        assert_well_formed(&g);
        assert!(matches!(Graph::complete(1), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn rings() {
        let g = Graph::ring(3).unwrap();
        assert_eq!(g.edge_count(), 3);
        let g = Graph::ring(100).unwrap();
        assert_eq!(g.edge_count(), 100);
        assert!((0..100).all(|i| g.degree(i) == 2));
        assert_well_formed(&g);
        assert_eq!(Graph::ring(5).unwrap().neighbors(0), &[1, 4]);
        assert!(Graph::ring(2).is_err());
    }

    #[test]
    fn tori() {
        let g = Graph::torus(3, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (9, 18));
        assert!((0..9).all(|i| g.degree(i) == 4));
        assert_well_formed(&g);
        let g = Graph::torus(10, 10).unwrap();
        assert_eq!(g.node_count(), 100);
        assert_well_formed(&g);
        // 4x3: node 0 = (0,0); up (3,0)=9, down (1,0)=3, left (0,2)=2, right (0,1)=1
        let g = Graph::torus(4, 3).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2, 3, 9]);
        assert!(Graph::torus(2, 5).is_err());
        assert!(Graph::torus(5, 2).is_err());
    }

    #[test]
    fn edge_lists() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1)]),
            Err(Error::NotConnected { components: 2 })
        ));
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!((0..4).all(|i| g.degree(i) == 2));
        assert!(matches!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(Error::InvalidEdge { .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(Error::InvalidEdge { .. })
        ));
    }

    #[test]
    fn edge_list_text() {
        let text = "# a path\nn 3\n0 1\n# middle\n1 2\n\n";
        let g = Graph::parse_edge_list(text).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert!(Graph::parse_edge_list("0 1\n").is_err());
        assert!(Graph::parse_edge_list("n 3\n0 x\n").is_err());
        assert!(Graph::parse_edge_list("n 3\n0 1 2\n").is_err());
    }

    #[test]
    fn sampling_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Graph::complete(2).unwrap();
        assert!((0..100).all(|_| g.sample_neighbor(0, &mut rng) == 1));
        let g = Graph::complete(4).unwrap();
        for _ in 0..1000 {
            let j = g.sample_neighbor(2, &mut rng);
            assert!([0, 1, 3].contains(&j));
        }
    }

    #[test]
    fn complete_fast_path_matches_adjacency_lookup() {
        let g = Graph::complete(7).unwrap();
        let custom = Graph::from_edges(
            7,
            &(0..7)
                .flat_map(|u| (u + 1..7).map(move |v| (u, v)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for step in 0..500 {
            let i = step % 7;
            assert_eq!(g.sample_neighbor(i, &mut a), custom.sample_neighbor(i, &mut b));
        }
    }

    #[test]
    fn ring_sampling_is_fair() {
        let g = Graph::ring(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 10_000;
        let ones = (0..draws)
            .filter(|_| {
                let j = g.sample_neighbor(0, &mut rng);
                assert!(j == 1 || j == 4);
                j == 1
            })
            .count();
        let freq = ones as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn sampling_within_five_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000usize;
        for g in [
            Graph::complete(6).unwrap(),
            Graph::torus(4, 5).unwrap(),
            Graph::ring(9).unwrap(),
        ] {
            let i = 3;
            let deg = g.degree(i);
            let mut hist = vec![0usize; g.node_count()];
            for _ in 0..draws {
                hist[g.sample_neighbor(i, &mut rng)] += 1;
            }
            let p = 1.0 / deg as f64;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            for &j in g.neighbors(i) {
                let dev = (hist[j as usize] as f64 - draws as f64 * p).abs();
                assert!(dev < 5.0 * sigma, "neighbor {j}: deviation {dev} vs sigma {sigma}");
            }
            assert_eq!(hist.iter().sum::<usize>(), draws);
        }
    }
}
