//! Seat-to-seat shortest path distances over a roadmap.
//!
//! Small roadmaps run Floyd–Warshall over every node; larger ones run
//! Dijkstra from each seat node instead, which yields the same seat submatrix
//! (up to floating-point summation order) in far less time.
//!
//! # Cache format
//!
//! Little-endian binary: the 8-byte magic `SEATDM01`, a `u64` seat count `n`,
//! a `u8` connected flag, then `n` seat ids each as a `u32` byte length plus
//! UTF-8 bytes, then `n*n` row-major `f64` distances (`+inf` for unreachable).

use crate::floorplan::FloorPlan;
use crate::roadmap::{Roadmap, RoadmapParams};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::{self, Read, Write};

const MAGIC: &[u8; 8] = b"SEATDM01";

/// Node count up to which the cubic all-pairs routine is used.
pub const FLOYD_WARSHALL_MAX_NODES: usize = 400;

/// Symmetric seat distance matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    seat_ids: Vec<String>,
    dist: Vec<f64>,
    connected: bool,
    index: HashMap<String, usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a distance cache file")]
    BadMagic,
    #[error("corrupt distance cache: {0}")]
    Corrupt(&'static str),
}

impl DistanceMatrix {
    /// Builds from a row-major `n×n` buffer, enforcing exact symmetry
    /// (the smaller of the two directions wins) and a zero diagonal.
    pub fn from_rows(seat_ids: Vec<String>, mut dist: Vec<f64>) -> Self {
        let n = seat_ids.len();
        assert_eq!(dist.len(), n * n, "distance buffer must be n*n");
        for i in 0..n {
            dist[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let v = dist[i * n + j].min(dist[j * n + i]);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        let connected = dist.iter().all(|d| d.is_finite());
        let index = seat_ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self {
            seat_ids,
            dist,
            connected,
            index,
        }
    }

    /// Straight-line distances, ignoring obstacles.
    pub fn euclidean(plan: &FloorPlan) -> Self {
        let seats = plan.seats();
        let n = seats.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = seats[i].pos.distance(seats[j].pos);
            }
        }
        Self::from_rows(seats.iter().map(|s| s.id.clone()).collect(), dist)
    }

    pub fn len(&self) -> usize {
        self.seat_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seat_ids.is_empty()
    }

    pub fn seat_ids(&self) -> &[String] {
        &self.seat_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.seat_ids.len() + j]
    }

    pub fn by_id(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.seat_ids.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn write_cache(&self, mut w: impl Write) -> Result<(), CacheError> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&[self.connected as u8])?;
        for id in &self.seat_ids {
            w.write_all(&(id.len() as u32).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
        }
        for d in &self.dist {
            w.write_all(&d.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_cache(mut r: impl Read) -> Result<Self, CacheError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CacheError::BadMagic);
        }
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let n = usize::try_from(u64::from_le_bytes(u64buf)).map_err(|_| CacheError::Corrupt("seat count"))?;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let mut seat_ids = Vec::with_capacity(n);
        for _ in 0..n {
            let mut len = [0u8; 4];
            r.read_exact(&mut len)?;
            let mut bytes = vec![0u8; u32::from_le_bytes(len) as usize];
            r.read_exact(&mut bytes)?;
            seat_ids.push(String::from_utf8(bytes).map_err(|_| CacheError::Corrupt("seat id is not UTF-8"))?);
        }
        let mut dist = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            r.read_exact(&mut u64buf)?;
            dist.push(f64::from_le_bytes(u64buf));
        }
        let m = Self::from_rows(seat_ids, dist);
        if m.connected != (flag[0] == 1) {
            return Err(CacheError::Corrupt("connected flag disagrees with distances"));
        }
        Ok(m)
    }
}

/// Cache key for a plan/parameter pair: hex SHA-256 of the plan hash and the
/// parameter values.
pub fn cache_key(plan: &FloorPlan, params: &RoadmapParams) -> String {
    let mut h = Sha256::new();
    h.update(plan.content_hash().as_bytes());
    h.update((params.max_nodes as u64).to_le_bytes());
    h.update(params.cast_step.to_le_bytes());
    h.update(params.seat_radius.to_le_bytes());
    h.update(params.seed.to_le_bytes());
    hex::encode(h.finalize())
}

/// All-pairs shortest paths over every roadmap node (row-major, `+inf` when
/// unreachable).
pub fn floyd_warshall(roadmap: &Roadmap) -> Vec<f64> {
    let n = roadmap.nodes().len();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in roadmap.edges() {
        let (u, v) = (e.u, e.v);
        if e.weight < d[u * n + v] {
            d[u * n + v] = e.weight;
            d[v * n + u] = e.weight;
        }
    }
    for k in 0..n {
        let row_k: Vec<f64> = d[k * n..(k + 1) * n].to_vec();
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            let row_i = &mut d[i * n..(i + 1) * n];
            for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    d
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths from `source` to every node.
pub fn dijkstra(roadmap: &Roadmap, source: usize) -> Vec<f64> {
    let n = roadmap.nodes().len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: source });
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in roadmap.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    dist
}

/// Shortest walking distances between every pair of seats.
pub fn all_pairs_seat_distances(roadmap: &Roadmap) -> DistanceMatrix {
    let n_nodes = roadmap.nodes().len();
    let s = roadmap.seat_count();
    let ids = roadmap.seat_ids();
    let mut dist = vec![0.0; s * s];
    if n_nodes <= FLOYD_WARSHALL_MAX_NODES {
        let full = floyd_warshall(roadmap);
        for i in 0..s {
            dist[i * s..(i + 1) * s].copy_from_slice(&full[i * n_nodes..i * n_nodes + s]);
        }
    } else {
        let rows: Vec<Vec<f64>> = (0..s)
            .into_par_iter()
            .map(|i| {
                let mut row = dijkstra(roadmap, i);
                row.truncate(s);
                row
            })
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            dist[i * s..(i + 1) * s].copy_from_slice(&row);
        }
    }
    DistanceMatrix::from_rows(ids, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{Seat, SeatKind};
    use crate::geometry::Point;
    use crate::roadmap::NodeOrigin;

    fn line_plan(xs: &[f64]) -> FloorPlan {
        let seats = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Seat {
                id: ["a", "b", "c", "d"][i].to_string(),
                kind: SeatKind::Desk,
                pos: Point::new(x, 0.0),
            })
            .collect();
        FloorPlan::new(10.0, 10.0, vec![], seats).unwrap()
    }

    #[test]
    fn shortest_path_beats_long_direct_edge() {
        // a(0)–b(1)–c(2) plus a detour node far away; direct a–c replaced by
        // a path through an exploration node at (1, 1.5) costs more than 2.
        let plan = line_plan(&[0.0, 1.0, 2.0]);
        let mut rm = Roadmap::with_seats(&plan);
        let x = rm.push_node(Point::new(1.0, 1.5), NodeOrigin::Exploration);
        rm.add_edge(0, 1);
        rm.add_edge(1, 2);
        rm.add_edge(0, x);
        rm.add_edge(x, 2);
        let m = all_pairs_seat_distances(&rm);
        assert!((m.by_id("a", "c").unwrap() - 2.0).abs() < 1e-12);
        assert!(m.is_connected());
    }

    #[test]
    fn single_seat_is_zero_matrix() {
        let plan = line_plan(&[3.0]);
        let rm = Roadmap::with_seats(&plan);
        let m = all_pairs_seat_distances(&rm);
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn unreachable_pairs_are_infinite() {
        let plan = line_plan(&[0.0, 5.0]);
        let rm = Roadmap::with_seats(&plan);
        let m = all_pairs_seat_distances(&rm);
        assert!(m.get(0, 1).is_infinite());
        assert!(!m.is_connected());
    }

    #[test]
    fn cache_round_trip() {
        let plan = line_plan(&[0.0, 1.0, 4.0]);
        let m = DistanceMatrix::euclidean(&plan);
        let mut buf = Vec::new();
        m.write_cache(&mut buf).unwrap();
        assert_eq!(DistanceMatrix::read_cache(buf.as_slice()).unwrap(), m);
        buf[0] = b'X';
        assert!(matches!(DistanceMatrix::read_cache(buf.as_slice()), Err(CacheError::BadMagic)));
    }

    #[test]
    fn cache_key_tracks_params() {
        let plan = line_plan(&[0.0, 1.0]);
        let p = RoadmapParams::for_plan(&plan, 1);
        let mut q = p;
        q.seat_radius *= 2.0;
        assert_ne!(cache_key(&plan, &p), cache_key(&plan, &q));
        assert_eq!(cache_key(&plan, &p), cache_key(&plan, &p));
    }
}
