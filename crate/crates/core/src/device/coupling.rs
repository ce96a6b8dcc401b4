use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected connectivity graph over physical qubits.
///
/// Edges keep the order they were given in; some routing heuristics depend on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    size: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

const UNREACHABLE: u32 = u32::MAX;

#[derive(Serialize, Deserialize)]
struct CouplingFile {
    size: usize,
    edges: Vec<[usize; 2]>,
}

impl CouplingMap {
    pub fn new(size: usize, edges: Vec<(usize, usize)>) -> Result<CouplingMap> {
        if size == 0 {
            return Err(Error::InvalidCouplingMap("size must be at least 1".into()));
        }
        let mut adj = vec![Vec::new(); size];
        for &(a, b) in &edges {
            if a >= size || b >= size {
                return Err(Error::InvalidCouplingMap(format!("edge ({a},{b}) outside 0..{size}")));
            }
            if a == b {
                return Err(Error::InvalidCouplingMap(format!("self loop on {a}")));
            }
            if !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        let dist = (0..size).map(|s| bfs_dist(&adj, s)).collect();
        Ok(CouplingMap {
            size,
            edges,
            adj,
            dist,
        })
    }

    pub fn line(n: usize) -> CouplingMap {
        CouplingMap::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("line map")
    }

    pub fn ring(n: usize) -> CouplingMap {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        CouplingMap::new(n, edges).expect("ring map")
    }

    /// Row-major `rows x cols` grid.
    pub fn grid(rows: usize, cols: usize) -> CouplingMap {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        CouplingMap::new(rows * cols, edges).expect("grid map")
    }

    /// The 16-qubit two-row ladder of the IBM QX5 device.
    pub fn ibmqx5() -> CouplingMap {
        let edges = [
            (1, 0),
            (1, 2),
            (2, 3),
            (3, 4),
            (3, 14),
            (5, 4),
            (6, 5),
            (6, 7),
            (6, 11),
            (7, 10),
            (8, 7),
            (9, 8),
            (9, 10),
            (11, 10),
            (12, 5),
            (12, 11),
            (12, 13),
            (13, 4),
            (13, 14),
            (15, 0),
            (15, 2),
            (15, 14),
        ];
        CouplingMap::new(16, edges.to_vec()).expect("ibmqx5 map")
    }

    pub fn from_json(text: &str) -> Result<CouplingMap> {
        let f: CouplingFile = serde_json::from_str(text)?;
        CouplingMap::new(f.size, f.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }

    pub fn to_json(&self) -> String {
        let f = CouplingFile {
            size: self.size,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&f).expect("plain data serializes")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn is_connected(&self) -> bool {
        self.dist[0].iter().all(|&d| d != UNREACHABLE)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a < self.size && self.adj[a].binary_search(&b).is_ok()
    }

    pub fn distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        match self.dist[a][b] {
            UNREACHABLE => Err(Error::Disconnected(a, b)),
            d => Ok(d as usize),
        }
    }

    /// Breadth-first shortest path from `a` to `b`, both endpoints included.
    /// Neighbours are explored in ascending order, so the result is deterministic.
    pub fn shortest_path(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        self.check(a)?;
        self.check(b)?;
        let mut parent = vec![usize::MAX; self.size];
        let mut seen = vec![false; self.size];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if !seen[b] {
            return Err(Error::Disconnected(a, b));
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    fn check(&self, p: usize) -> Result<()> {
        if p < self.size {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                qubit: p,
                size: self.size,
            })
        }
    }
}

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![UNREACHABLE; adj.len()];
    d[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v] == UNREACHABLE {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_path() {
        let m = CouplingMap::line(4);
        assert_eq!(m.shortest_path(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(m.distance(0, 3).unwrap(), 3);
        assert_eq!(m.shortest_path(2, 2).unwrap(), vec![2]);
    }

    #[test]
    fn disconnected_pair() {
        let m = CouplingMap::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(!m.is_connected());
        assert_eq!(m.shortest_path(0, 3), Err(Error::Disconnected(0, 3)));
    }

    #[test]
    fn ibmqx5_distances() {
        let m = CouplingMap::ibmqx5();
        assert!(m.is_connected());
        assert_eq!(m.distance(0, 8).unwrap(), 8);
        assert_eq!(m.distance(7, 14).unwrap(), 5);
        assert_eq!(m.distance(8, 7).unwrap(), 1);
        assert_eq!(m.distance(0, 14).unwrap(), 2);
    }

    #[test]
    fn json_round_trip() {
        let m = CouplingMap::grid(2, 3);
        assert_eq!(CouplingMap::from_json(&m.to_json()).unwrap(), m);
        assert!(CouplingMap::from_json(r#"{"size":2,"edges":[[0,2]]}"#).is_err());
    }
}
