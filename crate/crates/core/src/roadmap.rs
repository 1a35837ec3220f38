//! The end-effector reachability roadmap: offline construction, file format, and
//! per-query attachment of start and goal poses.

use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{disp_distance, HullPoints, Pose, SE3Segment};
use crate::index::PoseIndex;
use crate::kinematics::{JointConfig, KinematicChain};
use crate::steering::{estimate_ee_velocity_bound, SteeringParams};

pub const ROADMAP_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"JISTRDMP";
/// Upper bound on the DISP spacing of edge waypoints (m).
pub const MAX_EDGE_SPACING: f64 = 0.05;
const VELOCITY_SAMPLES: usize = 200;
const SAMPLE_ATTEMPTS_PER_VERTEX: usize = 100;

/// `⌈ln n⌉`, at least 1.
pub fn neighbor_count(n: usize) -> usize {
    ((n.max(1) as f64).ln().ceil() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadmapEdge {
    pub to: usize,
    /// Number of interpolation pieces between the endpoints.
    pub pieces: u32,
    /// Summed DISP along the edge waypoints.
    pub cost: f64,
}

/// Graph over end-effector poses whose edges are straight SE(3) interpolations.
pub trait PoseGraph {
    fn hull(&self) -> &HullPoints;
    fn vertex_count(&self) -> usize;
    fn pose(&self, v: usize) -> &Pose;
    fn edges(&self, v: usize) -> Vec<RoadmapEdge>;

    /// Waypoints of the edge leaving `u`. Both directions of an edge share the same
    /// waypoints, generated from the lower vertex id.
    fn segment(&self, u: usize, edge: &RoadmapEdge) -> SE3Segment {
        let v = edge.to;
        if u <= v {
            SE3Segment::uniform(*self.pose(u), *self.pose(v), edge.pieces as usize)
        } else {
            SE3Segment::uniform(*self.pose(v), *self.pose(u), edge.pieces as usize).reversed()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadmapMeta {
    pub target_vertices: usize,
    pub rng_seed: u64,
    pub chain_hash: String,
    pub neighbors: usize,
}

#[derive(Debug, Clone)]
pub struct ReachabilityRoadmap {
    pub hull: HullPoints,
    pub vertices: Vec<Pose>,
    /// The sampled configuration behind each vertex.
    pub configs: Vec<JointConfig>,
    pub adjacency: Vec<Vec<RoadmapEdge>>,
    /// Largest observed end-effector DISP rate (m/s).
    pub ee_velocity_bound: f64,
    pub meta: RoadmapMeta,
    index: PoseIndex,
}

impl PartialEq for ReachabilityRoadmap {
    fn eq(&self, other: &Self) -> bool {
        self.hull == other.hull
            && self.vertices == other.vertices
            && self.configs == other.configs
            && self.adjacency == other.adjacency
            && self.ee_velocity_bound == other.ee_velocity_bound
            && self.meta == other.meta
    }
}

impl PoseGraph for ReachabilityRoadmap {
    fn hull(&self) -> &HullPoints {
        &self.hull
    }
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    fn pose(&self, v: usize) -> &Pose {
        &self.vertices[v]
    }
    fn edges(&self, v: usize) -> Vec<RoadmapEdge> {
        self.adjacency[v].clone()
    }
}

/// Waypoint spacing for an edge of endpoint DISP `length`.
pub fn edge_spacing(length: f64, ee_velocity_bound: f64, control_dt: f64) -> f64 {
    (ee_velocity_bound * control_dt)
        .min(MAX_EDGE_SPACING)
        .min(length / 4.0)
}

fn make_edge(hull: &HullPoints, a: &Pose, b: &Pose, to: usize, ee_velocity_bound: f64, dt: f64) -> RoadmapEdge {
    let length = disp_distance(hull, a, b);
    let pieces = if length == 0.0 {
        1
    } else {
        SE3Segment::pieces_for(hull, a, b, edge_spacing(length, ee_velocity_bound, dt))
    };
    let cost = SE3Segment::uniform(*a, *b, pieces).cost(hull);
    RoadmapEdge {
        to,
        pieces: pieces as u32,
        cost,
    }
}

impl ReachabilityRoadmap {
    /// Samples `n` self-collision-free configurations, keeps their end-effector poses,
    /// and joins every vertex to its `⌈ln n⌉` nearest neighbours under DISP.
    pub fn build(chain: &KinematicChain, n: usize, rng_seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::RoadmapTooSmall(n));
        }
        chain.validate()?;
        let params = SteeringParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut configs = Vec::with_capacity(n);
        let mut vertices = Vec::with_capacity(n);
        let mut attempts = 0;
        while configs.len() < n {
            if attempts >= n * SAMPLE_ATTEMPTS_PER_VERTEX {
                return Err(Error::InsufficientSamples {
                    requested: n,
                    achieved: configs.len(),
                });
            }
            attempts += 1;
            let q = chain.sample_config(&mut rng);
            if chain.self_collision(&q)? {
                continue;
            }
            vertices.push(chain.fk_pose(&q)?);
            configs.push(q);
        }
        let ee_velocity_bound =
            estimate_ee_velocity_bound(chain, VELOCITY_SAMPLES, rng_seed ^ 0x5eed_b0b0, &params)?;
        let hull = chain.ee_hull.clone();
        let index = PoseIndex::new(&hull, &vertices);
        let k = neighbor_count(n).min(n - 1);

        let mut neighbor_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for u in 0..n {
            for nb in index.knn(&vertices[u], k, |i| i == u) {
                neighbor_sets[u].push(nb.id);
                neighbor_sets[nb.id].push(u);
            }
        }
        let adjacency = neighbor_sets
            .into_iter()
            .enumerate()
            .map(|(u, mut set)| {
                set.sort_unstable();
                set.dedup();
                set.into_iter()
                    .map(|v| {
                        let (lo, hi) = (u.min(v), u.max(v));
                        let e = make_edge(&hull, &vertices[lo], &vertices[hi], hi, ee_velocity_bound, params.control_dt);
                        RoadmapEdge { to: v, ..e }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            hull,
            vertices,
            configs,
            adjacency,
            ee_velocity_bound,
            meta: RoadmapMeta {
                target_vertices: n,
                rng_seed,
                chain_hash: chain.spec_hash(),
                neighbors: k,
            },
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices without any edge.
    pub fn isolated(&self) -> Vec<usize> {
        (0..self.len()).filter(|v| self.adjacency[*v].is_empty()).collect()
    }

    pub fn index(&self) -> &PoseIndex {
        &self.index
    }

    /// Connects `e_start` and every goal as temporary vertices. The base roadmap is not
    /// modified; the returned attachment is used through [`QueryGraph`].
    pub fn attach_query(&self, e_start: &Pose, goals: &[Pose]) -> Result<QueryAttachment> {
        if goals.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        let n = self.len();
        let k = neighbor_count(n);
        let dt = SteeringParams::default().control_dt;
        let start_id = n;
        let goal_ids: Vec<usize> = (0..goals.len()).map(|i| n + 1 + i).collect();
        let mut poses = Vec::with_capacity(goals.len() + 1);
        poses.push(*e_start);
        poses.extend_from_slice(goals);
        let mut temp_edges: Vec<Vec<RoadmapEdge>> = vec![Vec::new(); poses.len()];
        let mut base_edges: Vec<(usize, RoadmapEdge)> = Vec::new();
        let mut link = |u: usize, v: usize, pose_u: &Pose, pose_v: &Pose, temp: &mut Vec<Vec<RoadmapEdge>>| {
            let (lo, hi) = if u < v { (pose_u, pose_v) } else { (pose_v, pose_u) };
            let e = make_edge(&self.hull, lo, hi, 0, self.ee_velocity_bound, dt);
            for (from, to) in [(u, v), (v, u)] {
                let edge = RoadmapEdge { to, ..e };
                if from >= n {
                    temp[from - n].push(edge);
                } else {
                    base_edges.push((from, edge));
                }
            }
        };

        // Goals join base vertices only.
        for (i, g) in goals.iter().enumerate() {
            for nb in self.index.knn(g, k, |_| false) {
                link(goal_ids[i], nb.id, g, &self.vertices[nb.id], &mut temp_edges);
            }
        }
        // The start may also join goals directly.
        let mut candidates: Vec<(f64, usize)> = self
            .index
            .knn(e_start, k, |_| false)
            .into_iter()
            .map(|nb| (nb.distance, nb.id))
            .collect();
        for (i, g) in goals.iter().enumerate() {
            candidates.push((disp_distance(&self.hull, e_start, g), goal_ids[i]));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        candidates.truncate(k);
        for (_, v) in candidates {
            let pose_v = if v >= n { poses[v - n] } else { self.vertices[v] };
            link(start_id, v, e_start, &pose_v, &mut temp_edges);
        }
        base_edges.sort_by_key(|(from, e)| (*from, e.to));
        Ok(QueryAttachment {
            base_len: n,
            start_vertex_id: start_id,
            goal_vertex_ids: goal_ids,
            poses,
            temp_edges,
            base_edges,
        })
    }

    /// Writes the versioned binary format with a trailing SHA-256 checksum.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Reads a roadmap file and checks it was built for `chain`.
    pub fn load(path: &Path, chain: &KinematicChain) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let roadmap = Self::from_bytes(&bytes)?;
        let expected = chain.spec_hash();
        if roadmap.meta.chain_hash != expected {
            return Err(Error::ChainHashMismatch {
                expected,
                found: roadmap.meta.chain_hash,
            });
        }
        Ok(roadmap)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        w.extend_from_slice(MAGIC);
        w.extend_from_slice(&ROADMAP_FORMAT_VERSION.to_le_bytes());
        put_u64(&mut w, self.len() as u64);
        put_u64(&mut w, self.meta.target_vertices as u64);
        put_u64(&mut w, self.meta.rng_seed);
        put_u64(&mut w, self.meta.neighbors as u64);
        put_f64(&mut w, self.ee_velocity_bound);
        put_u64(&mut w, self.meta.chain_hash.len() as u64);
        w.extend_from_slice(self.meta.chain_hash.as_bytes());
        put_u64(&mut w, self.hull.points().len() as u64);
        for p in self.hull.points() {
            p.iter().for_each(|v| put_f64(&mut w, *v));
        }
        let dof = self.configs.first().map_or(0, JointConfig::len);
        put_u64(&mut w, dof as u64);
        for (pose, q) in self.vertices.iter().zip(&self.configs) {
            pose.translation.iter().for_each(|v| put_f64(&mut w, *v));
            pose.quaternion_wxyz().iter().for_each(|v| put_f64(&mut w, *v));
            q.0.iter().for_each(|v| put_f64(&mut w, *v));
        }
        for edges in &self.adjacency {
            put_u64(&mut w, edges.len() as u64);
            for e in edges {
                put_u64(&mut w, e.to as u64);
                put_u64(&mut w, u64::from(e.pieces));
                put_f64(&mut w, e.cost);
            }
        }
        let digest = Sha256::digest(&w);
        w.extend_from_slice(&digest);
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 4 + 32 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::CorruptFile("missing roadmap header".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::CorruptFile("checksum mismatch".into()));
        }
        let mut r = Reader { buf: body, pos: MAGIC.len() };
        let version = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes"));
        if version != ROADMAP_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: ROADMAP_FORMAT_VERSION,
                found: version,
            });
        }
        let n = r.usize()?;
        let target_vertices = r.usize()?;
        let rng_seed = r.u64()?;
        let neighbors = r.usize()?;
        let ee_velocity_bound = r.f64()?;
        let hash_len = r.usize()?;
        let chain_hash = String::from_utf8(r.take(hash_len)?.to_vec())
            .map_err(|_| Error::CorruptFile("chain hash is not UTF-8".into()))?;
        let m = r.usize()?;
        let hull = HullPoints::new((0..m).map(|_| r.vec3()).collect::<Result<_>>()?)?;
        let dof = r.usize()?;
        let mut vertices = Vec::with_capacity(n.min(1 << 24));
        let mut configs = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            let t = r.vec3()?;
            let (w, x, y, z) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
            let q = Quaternion::new(w, x, y, z);
            if (q.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::CorruptFile("non-unit quaternion".into()));
            }
            vertices.push(Pose::new(t, UnitQuaternion::new_unchecked(q)));
            configs.push(JointConfig((0..dof).map(|_| r.f64()).collect::<Result<_>>()?));
        }
        let mut adjacency = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            let count = r.usize()?;
            let mut edges = Vec::with_capacity(count.min(1 << 16));
            for _ in 0..count {
                let to = r.usize()?;
                let pieces = u32::try_from(r.u64()?).map_err(|_| Error::CorruptFile("piece count".into()))?;
                let cost = r.f64()?;
                if to >= n || pieces == 0 {
                    return Err(Error::CorruptFile(format!("bad edge to {to}")));
                }
                edges.push(RoadmapEdge { to, pieces, cost });
            }
            adjacency.push(edges);
        }
        if r.pos != body.len() {
            return Err(Error::CorruptFile("trailing bytes".into()));
        }
        let index = PoseIndex::new(&hull, &vertices);
        Ok(Self {
            hull,
            vertices,
            configs,
            adjacency,
            ee_velocity_bound,
            meta: RoadmapMeta {
                target_vertices,
                rng_seed,
                chain_hash,
                neighbors,
            },
            index,
        })
    }
}

fn put_u64(w: &mut Vec<u8>, v: u64) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(w: &mut Vec<u8>, v: f64) {
    w.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|e| *e <= self.buf.len())
            .ok_or_else(|| Error::CorruptFile("truncated roadmap".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::CorruptFile("length overflow".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn vec3(&mut self) -> Result<Vector3<f64>> {
        Ok(Vector3::new(self.f64()?, self.f64()?, self.f64()?))
    }
}

/// Temporary start and goal vertices for one query.
///
/// The start gets id `n` and goal `i` gets id `n + 1 + i`, where `n` is the size of the
/// base roadmap.
#[derive(Debug, Clone)]
pub struct QueryAttachment {
    base_len: usize,
    pub start_vertex_id: usize,
    pub goal_vertex_ids: Vec<usize>,
    poses: Vec<Pose>,
    temp_edges: Vec<Vec<RoadmapEdge>>,
    /// Edges from base vertices into temporary ones, sorted by base vertex.
    base_edges: Vec<(usize, RoadmapEdge)>,
}

impl QueryAttachment {
    /// Number of temporary edges (each counted once).
    pub fn added_edge_count(&self) -> usize {
        (self.temp_edges.iter().map(Vec::len).sum::<usize>() + self.base_edges.len()) / 2
    }

    pub fn temp_degree(&self, id: usize) -> usize {
        self.temp_edges[id - self.base_len].len()
    }
}

/// A roadmap viewed together with one query attachment.
pub struct QueryGraph<'a> {
    pub roadmap: &'a ReachabilityRoadmap,
    pub attachment: &'a QueryAttachment,
}

impl<'a> QueryGraph<'a> {
    pub fn new(roadmap: &'a ReachabilityRoadmap, attachment: &'a QueryAttachment) -> Self {
        Self { roadmap, attachment }
    }
}

impl PoseGraph for QueryGraph<'_> {
    fn hull(&self) -> &HullPoints {
        &self.roadmap.hull
    }
    fn vertex_count(&self) -> usize {
        self.attachment.base_len + self.attachment.poses.len()
    }
    fn pose(&self, v: usize) -> &Pose {
        let n = self.attachment.base_len;
        if v < n {
            &self.roadmap.vertices[v]
        } else {
            &self.attachment.poses[v - n]
        }
    }
    fn edges(&self, v: usize) -> Vec<RoadmapEdge> {
        let n = self.attachment.base_len;
        if v >= n {
            return self.attachment.temp_edges[v - n].clone();
        }
        let mut out = self.roadmap.adjacency[v].clone();
        let extra = &self.attachment.base_edges;
        let from = extra.partition_point(|(u, _)| *u < v);
        out.extend(extra[from..].iter().take_while(|(u, _)| *u == v).map(|(_, e)| *e));
        out
    }
}
