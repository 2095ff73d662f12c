//! Piecewise-linear spatial graphs and their underlying multigraphs.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};
use crate::vertex::VertexStar;

/// Consecutive polyline points closer than this are rejected.
pub const MIN_SEGMENT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub pos: Point3,
}

/// An edge drawn as the polyline `ends[0] -> joints... -> ends[1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub ends: [usize; 2],
    pub joints: Vec<Point3>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Start,
    Finish,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Start => End::Finish,
            End::Finish => End::Start,
        }
    }

    fn slot(self) -> usize {
        match self {
            End::Start => 0,
            End::Finish => 1,
        }
    }
}

/// One end of an edge; a loop contributes two of these at its vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

#[derive(Clone, Debug)]
pub struct SpatialGraph {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    incidence: Vec<Vec<EdgeEnd>>,
}

impl PartialEq for SpatialGraph {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.vertices == o.vertices && self.edges == o.edges
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    name: String,
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    pos: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    ends: [String; 2],
    #[serde(default)]
    polyline: Vec<[f64; 3]>,
}

/// Parse and validate a graph document.
pub fn load_graph(json: &str) -> Result<SpatialGraph> {
    SpatialGraph::from_json(json)
}

impl SpatialGraph {
    pub fn new(name: impl Into<String>, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if !v.pos.is_finite() {
                return Err(Error::NonFinite(format!("vertex `{}`", v.id)));
            }
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateId { kind: "vertex", id: v.id.clone() });
            }
        }
        let mut edge_ids = HashMap::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            if edge_ids.insert(e.id.as_str(), k).is_some() {
                return Err(Error::DuplicateId { kind: "edge", id: e.id.clone() });
            }
            for &u in &e.ends {
                if u >= vertices.len() {
                    return Err(Error::DanglingEndpoint { edge: e.id.clone(), vertex: format!("#{u}") });
                }
            }
            if e.joints.iter().any(|p| !p.is_finite()) {
                return Err(Error::NonFinite(format!("edge `{}`", e.id)));
            }
            if e.is_loop() && e.joints.is_empty() {
                return Err(Error::LoopWithoutJoint { edge: e.id.clone() });
            }
            let pts = polyline_of(&vertices, e);
            for (i, w) in pts.windows(2).enumerate() {
                if w[0].dist(w[1]) <= MIN_SEGMENT {
                    return Err(Error::CoincidentPoints { edge: e.id.clone(), index: i });
                }
            }
            incidence[e.ends[0]].push(EdgeEnd { edge: k, end: End::Start });
            incidence[e.ends[1]].push(EdgeEnd { edge: k, end: End::Finish });
        }
        Ok(SpatialGraph { name: name.into(), vertices, edges, vertex_index, incidence })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(json)?;
        let vertices: Vec<Vertex> = doc.vertices.into_iter().map(|v| Vertex { id: v.id, pos: v.pos.into() }).collect();
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in doc.edges {
            let mut ends = [0usize; 2];
            for (slot, id) in e.ends.iter().enumerate() {
                ends[slot] = *index
                    .get(id.as_str())
                    .ok_or_else(|| Error::DanglingEndpoint { edge: e.id.clone(), vertex: id.clone() })?;
            }
            edges.push(Edge { id: e.id, ends, joints: e.polyline.into_iter().map(Vec3::from).collect() });
        }
        SpatialGraph::new(doc.name, vertices, edges)
    }

    /// Canonical JSON: vertices and edges sorted by id, pretty-printed.
    pub fn to_json(&self) -> String {
        let mut vs: Vec<&Vertex> = self.vertices.iter().collect();
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut es: Vec<&Edge> = self.edges.iter().collect();
        es.sort_by(|a, b| a.id.cmp(&b.id));
        let doc = GraphDoc {
            name: self.name.clone(),
            vertices: vs.iter().map(|v| VertexDoc { id: v.id.clone(), pos: v.pos.to_array() }).collect(),
            edges: es
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ends: [self.vertices[e.ends[0]].id.clone(), self.vertices[e.ends[1]].id.clone()],
                    polyline: e.joints.iter().map(|p| p.to_array()).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("graph document serializes");
        s.push('\n');
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges.iter().position(|e| e.id == id).ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Edge-ends incident to vertex `v`, in edge order.
    pub fn incidence(&self, v: usize) -> &[EdgeEnd] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn joint_count(&self) -> usize {
        self.edges.iter().map(|e| e.joints.len()).sum()
    }

    /// All points of edge `k` from its start vertex to its finish vertex.
    pub fn polyline(&self, k: usize) -> Vec<Point3> {
        polyline_of(&self.vertices, &self.edges[k])
    }

    pub fn end_vertex(&self, ee: EdgeEnd) -> usize {
        self.edges[ee.edge].ends[ee.end.slot()]
    }

    /// The polyline point adjacent to the vertex at `ee`.
    pub fn end_neighbor(&self, ee: EdgeEnd) -> Point3 {
        let e = &self.edges[ee.edge];
        match ee.end {
            End::Start => e.joints.first().copied().unwrap_or(self.vertices[e.ends[1]].pos),
            End::Finish => e.joints.last().copied().unwrap_or(self.vertices[e.ends[0]].pos),
        }
    }

    /// Unit tangent pointing from the vertex at `ee` into the edge.
    pub fn end_tangent(&self, ee: EdgeEnd) -> Vec3 {
        let p = self.vertices[self.end_vertex(ee)].pos;
        (self.end_neighbor(ee) - p).normalized().expect("segments are validated nonzero")
    }

    /// The outgoing unit tangents at vertex `v`.
    pub fn tangent_star(&self, v: usize) -> VertexStar {
        let tangents = self.incidence[v].iter().map(|&ee| self.end_tangent(ee)).collect();
        VertexStar::from_unit(self.vertices[v].id.clone(), tangents)
    }

    pub fn tangent_star_by_id(&self, id: &str) -> Result<VertexStar> {
        Ok(self.tangent_star(self.vertex_index(id)?))
    }

    pub fn combinatorial(&self) -> CombinatorialGraph {
        CombinatorialGraph {
            name: self.name.clone(),
            vertices: self.vertices.iter().map(|v| v.id.clone()).collect(),
            edges: self.edges.iter().map(|e| (e.ends[0], e.ends[1])).collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.combinatorial().is_connected()
    }

    /// Replace the joint `index` of `edge` by a new degree-2 vertex.
    pub fn subdivide(&self, edge: &str, index: usize) -> Result<SpatialGraph> {
        let k = self.edge_index(edge)?;
        let e = &self.edges[k];
        if index >= e.joints.len() {
            return Err(Error::JointIndexOutOfRange { edge: edge.to_string(), index, joints: e.joints.len() });
        }
        let mut vertices = self.vertices.clone();
        let vid = fresh_id(&format!("{}~{}", e.id, index), |s| self.vertex_index.contains_key(s));
        vertices.push(Vertex { id: vid, pos: e.joints[index] });
        let mid = vertices.len() - 1;
        let taken = |s: &str| self.edges.iter().any(|x| x.id == s);
        let id_b = fresh_id(&format!("{}.1", e.id), taken);
        let mut edges = self.edges.clone();
        edges[k] = Edge { id: e.id.clone(), ends: [e.ends[0], mid], joints: e.joints[..index].to_vec() };
        edges.push(Edge { id: id_b, ends: [mid, e.ends[1]], joints: e.joints[index + 1..].to_vec() });
        SpatialGraph::new(self.name.clone(), vertices, edges)
    }

    /// Delete joint `index` of edge number `k`, straightening the polyline there.
    pub fn remove_joint(&self, k: usize, index: usize) -> Result<SpatialGraph> {
        let e = self.edges.get(k).ok_or_else(|| Error::UnknownEdge(format!("#{k}")))?;
        if index >= e.joints.len() {
            return Err(Error::JointIndexOutOfRange { edge: e.id.clone(), index, joints: e.joints.len() });
        }
        let mut edges = self.edges.clone();
        edges[k].joints.remove(index);
        SpatialGraph::new(self.name.clone(), self.vertices.clone(), edges)
    }

    /// Delete an edge; its end vertices stay.
    pub fn remove_edge(&self, edge: &str) -> Result<SpatialGraph> {
        let k = self.edge_index(edge)?;
        let mut edges = self.edges.clone();
        edges.remove(k);
        SpatialGraph::new(self.name.clone(), self.vertices.clone(), edges)
    }

    /// Keep only the joints for which `keep(edge, index)` holds.
    pub fn filter_joints(&self, keep: impl Fn(usize, usize) -> bool) -> Result<SpatialGraph> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| Edge {
                id: e.id.clone(),
                ends: e.ends,
                joints: e.joints.iter().enumerate().filter(|&(j, _)| keep(k, j)).map(|(_, &p)| p).collect(),
            })
            .collect();
        SpatialGraph::new(self.name.clone(), self.vertices.clone(), edges)
    }

    /// Apply `f` to every vertex and joint.
    pub fn map_points(&self, f: impl Fn(Point3) -> Point3) -> Result<SpatialGraph> {
        let vertices = self.vertices.iter().map(|v| Vertex { id: v.id.clone(), pos: f(v.pos) }).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), ends: e.ends, joints: e.joints.iter().map(|&p| f(p)).collect() })
            .collect();
        SpatialGraph::new(self.name.clone(), vertices, edges)
    }

    /// Disjoint union, identifying vertices whose positions agree within `tol`.
    /// Ids from `other` are prefixed to keep them unique.
    pub fn union(&self, other: &SpatialGraph, tol: f64) -> Result<SpatialGraph> {
        let mut vertices = self.vertices.clone();
        let mut map = Vec::with_capacity(other.vertices.len());
        for v in &other.vertices {
            match self.vertices.iter().position(|w| w.pos.dist(v.pos) <= tol) {
                Some(i) => map.push(i),
                None => {
                    let id = fresh_id(&format!("b:{}", v.id), |s| vertices.iter().any(|w| w.id == s));
                    vertices.push(Vertex { id, pos: v.pos });
                    map.push(vertices.len() - 1);
                }
            }
        }
        let mut edges = self.edges.clone();
        for e in &other.edges {
            let id = fresh_id(&format!("b:{}", e.id), |s| edges.iter().any(|x| x.id == s));
            edges.push(Edge { id, ends: [map[e.ends[0]], map[e.ends[1]]], joints: e.joints.clone() });
        }
        SpatialGraph::new(format!("{}+{}", self.name, other.name), vertices, edges)
    }

    /// A hash of the geometry, stable across runs; used to seed perturbations.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv::default();
        for v in &self.vertices {
            h.write_vec(v.pos);
        }
        for e in &self.edges {
            h.write(e.ends[0] as u64);
            h.write(e.ends[1] as u64);
            for &p in &e.joints {
                h.write_vec(p);
            }
        }
        h.0
    }
}

fn polyline_of(vertices: &[Vertex], e: &Edge) -> Vec<Point3> {
    let mut pts = Vec::with_capacity(e.joints.len() + 2);
    pts.push(vertices[e.ends[0]].pos);
    pts.extend_from_slice(&e.joints);
    pts.push(vertices[e.ends[1]].pos);
    pts
}

fn fresh_id(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (2..).map(|i| format!("{base}#{i}")).find(|s| !taken(s)).expect("unbounded")
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn write_vec(&mut self, v: Vec3) {
        self.write(v.x.to_bits());
        self.write(v.y.to_bits());
        self.write(v.z.to_bits());
    }
}

/// Incremental construction of a [`SpatialGraph`] by index.
#[derive(Default)]
pub struct GraphBuilder {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GraphBuilder { name: name.into(), ..Default::default() }
    }

    pub fn vertex(&mut self, id: impl Into<String>, pos: Point3) -> usize {
        self.vertices.push(Vertex { id: id.into(), pos });
        self.vertices.len() - 1
    }

    pub fn edge(&mut self, id: impl Into<String>, u: usize, v: usize, joints: Vec<Point3>) -> &mut Self {
        self.edges.push(Edge { id: id.into(), ends: [u, v], joints });
        self
    }

    /// Adds an edge with an automatic id `e<k>`.
    pub fn auto_edge(&mut self, u: usize, v: usize, joints: Vec<Point3>) -> &mut Self {
        let id = format!("e{}", self.edges.len());
        self.edge(id, u, v, joints)
    }

    pub fn pos(&self, v: usize) -> Point3 {
        self.vertices[v].pos
    }

    pub fn build(self) -> Result<SpatialGraph> {
        SpatialGraph::new(self.name, self.vertices, self.edges)
    }
}

/// An abstract multigraph (loops and parallel edges allowed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialGraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl CombinatorialGraph {
    pub fn new(name: impl Into<String>, vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        let mut seen = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if seen.insert(v.as_str(), i).is_some() {
                return Err(Error::DuplicateId { kind: "vertex", id: v.clone() });
            }
        }
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::DanglingEndpoint { edge: format!("e{k}"), vertex: format!("#{}", u.max(v)) });
            }
        }
        Ok(CombinatorialGraph { name: name.into(), vertices, edges })
    }

    /// Vertices named `v0..v{n-1}`.
    pub fn numbered(name: impl Into<String>, n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(name, (0..n).map(|i| format!("v{i}")).collect(), edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    pub fn odd_vertex_count(&self) -> usize {
        self.degrees().iter().filter(|d| *d % 2 == 1).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let r = find(&mut parent, 0);
        (0..n).all(|x| find(&mut parent, x) == r)
    }

    /// Split edge `k` at a new degree-2 vertex; returns the graph and that vertex.
    pub fn subdivide_edge(&self, k: usize, name: &str) -> Result<(CombinatorialGraph, usize)> {
        let &(u, v) = self.edges.get(k).ok_or_else(|| Error::UnknownEdge(format!("#{k}")))?;
        let mut g = self.clone();
        g.vertices.push(name.to_string());
        let p = g.vertices.len() - 1;
        g.edges[k] = (u, p);
        g.edges.push((p, v));
        Ok((g, p))
    }

    /// Disjoint union with `other`, identifying vertex `a` of self with vertex `b` of other.
    pub fn wedge(&self, a: usize, other: &CombinatorialGraph, b: usize) -> Result<CombinatorialGraph> {
        if a >= self.n_vertices() || b >= other.n_vertices() {
            return Err(Error::BadParameter("wedge vertex out of range".into()));
        }
        let mut vertices = self.vertices.clone();
        let mut map = vec![usize::MAX; other.n_vertices()];
        for (i, name) in other.vertices.iter().enumerate() {
            if i == b {
                map[i] = a;
            } else {
                vertices.push(format!("b:{name}"));
                map[i] = vertices.len() - 1;
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(x, y)| (map[x], map[y])));
        CombinatorialGraph::new(format!("{}v{}", self.name, other.name), vertices, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = r#"{
        "name": "theta",
        "vertices": [{"id": "p", "pos": [0, 1, 0]}, {"id": "q", "pos": [0, -1, 0]}],
        "edges": [
            {"id": "a", "ends": ["p", "q"], "polyline": [[1, 0, 0]]},
            {"id": "b", "ends": ["p", "q"], "polyline": []},
            {"id": "c", "ends": ["q", "p"], "polyline": [[-1, 0, 0]]}
        ]
    }"#;

    #[test]
    fn load_and_roundtrip() {
        let g = load_graph(THETA).unwrap();
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.joint_count(), 2);
        let s = g.to_json();
        let g2 = load_graph(&s).unwrap();
        assert_eq!(s, g2.to_json());
    }

    #[test]
    fn tangents_point_into_edges() {
        let g = load_graph(THETA).unwrap();
        let star = g.tangent_star(0);
        let t = star.tangents();
        assert!((t[0] - Vec3::new(1.0, -1.0, 0.0).normalized().unwrap()).norm() < 1e-15);
        assert!((t[1] - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((t[2] - Vec3::new(-1.0, -1.0, 0.0).normalized().unwrap()).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_documents() {
        let dangling = THETA.replace(r#"["q", "p"]"#, r#"["q", "z"]"#);
        assert!(matches!(load_graph(&dangling), Err(Error::DanglingEndpoint { .. })));
        let looped = THETA.replace(r#""ends": ["p", "q"], "polyline": []"#, r#""ends": ["p", "p"], "polyline": []"#);
        assert!(matches!(load_graph(&looped), Err(Error::LoopWithoutJoint { .. })));
        let coincident = THETA.replace("[[1, 0, 0]]", "[[0, 1, 0]]");
        assert!(matches!(load_graph(&coincident), Err(Error::CoincidentPoints { .. })));
        assert!(matches!(load_graph("{\"name\": 3}"), Err(Error::Schema(_))));
        let dup = THETA.replace(r#""id": "b""#, r#""id": "a""#);
        assert!(matches!(load_graph(&dup), Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn subdivide_adds_vertex() {
        let g = load_graph(THETA).unwrap();
        let s = g.subdivide("a", 0).unwrap();
        assert_eq!(s.vertices().len(), 3);
        assert_eq!(s.edges().len(), 4);
        assert_eq!(s.degree(2), 2);
        assert!(matches!(g.subdivide("b", 0), Err(Error::JointIndexOutOfRange { .. })));
        assert!(matches!(g.subdivide("zz", 0), Err(Error::UnknownEdge(_))));
    }

    #[test]
    fn connectivity_is_reported() {
        let g = CombinatorialGraph::numbered("two", 4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        let g = CombinatorialGraph::numbered("path", 3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(g.is_connected());
    }

    #[test]
    fn union_glues_shared_points() {
        let g = load_graph(THETA).unwrap();
        let h = g.map_points(|p| p + Vec3::new(0.0, 2.0, 0.0)).unwrap();
        let u = g.union(&h, 1e-9).unwrap();
        assert_eq!(u.vertices().len(), 3);
        assert_eq!(u.degree(0), 6);
    }
}
