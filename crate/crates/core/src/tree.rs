//! The double point tree: a directed tree with an odd degree per vertex and a
//! fixed-point-free pairing of its edges.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// Vertices and edges are stored densely; ids are kept only for interchange.
///
/// A value of this type is structurally well formed (ids resolve, no
/// duplicates) but not necessarily valid; see [`DoublePointTree::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoublePointTree {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) partner: Vec<Option<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("pairing refers to unknown edge `{0}`")]
    UnknownPairedEdge(String),
    #[error("edge `{0}` appears in more than one pair")]
    PairedTwice(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid double point tree: {0}")]
    Invalid(ValidationReport),
    #[error("merge vertex `{vertex}` has degree {delta}, expected 1")]
    MergeDegree { vertex: String, delta: i64 },
    #[error("integer overflow")]
    Overflow,
}

impl TreeError {
    /// True for malformed input (as opposed to a well-formed but invalid tree
    /// or a failed precondition).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            TreeError::DuplicateVertex(_)
                | TreeError::DuplicateEdge(_)
                | TreeError::DanglingEndpoint { .. }
                | TreeError::UnknownPairedEdge(_)
                | TreeError::PairedTwice(_)
                | TreeError::UnknownVertex(_)
                | TreeError::UnknownEdge(_)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// The tree has no vertices.
    Empty,
    /// The underlying undirected graph contains a cycle (or a loop).
    Cycle,
    /// The underlying undirected graph is not connected.
    Disconnected,
    /// An edge has no conjugate.
    Unpaired,
    /// An edge is its own conjugate.
    SelfPaired,
    /// A vertex has an even degree.
    EvenDelta,
    /// The degrees at the two ends of an edge do not differ by exactly 2.
    DeltaStep,
    /// An edge does not point away from its conjugate.
    Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?}({})", v.rule, v.witness.join(",")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Result of [`DoublePointTree::connected_sum`]: the tree plus the id each
/// vertex and edge of the second summand received.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedSum {
    pub tree: DoublePointTree,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

impl DoublePointTree {
    /// Builds a tree from id-based records, rejecting dangling and duplicate ids.
    pub fn new<V, E, P>(vertices: V, edges: E, pairing: P) -> Result<Self, TreeError>
    where
        V: IntoIterator<Item = (String, i64)>,
        E: IntoIterator<Item = (String, String, String)>,
        P: IntoIterator<Item = (String, String)>,
    {
        let mut vindex = HashMap::new();
        let mut vs = Vec::new();
        for (id, delta) in vertices {
            if vindex.insert(id.clone(), vs.len()).is_some() {
                return Err(TreeError::DuplicateVertex(id));
            }
            vs.push(Vertex { id, delta });
        }
        let mut eindex = HashMap::new();
        let mut es = Vec::new();
        for (id, tail, head) in edges {
            let t = *vindex.get(&tail).ok_or_else(|| TreeError::DanglingEndpoint {
                edge: id.clone(),
                vertex: tail.clone(),
            })?;
            let h = *vindex.get(&head).ok_or_else(|| TreeError::DanglingEndpoint {
                edge: id.clone(),
                vertex: head.clone(),
            })?;
            if eindex.insert(id.clone(), es.len()).is_some() {
                return Err(TreeError::DuplicateEdge(id));
            }
            es.push(Edge { id, tail: t, head: h });
        }
        let mut partner = vec![None; es.len()];
        for (a, b) in pairing {
            let ia = *eindex.get(&a).ok_or(TreeError::UnknownPairedEdge(a.clone()))?;
            let ib = *eindex.get(&b).ok_or(TreeError::UnknownPairedEdge(b.clone()))?;
            if partner[ia].is_some() {
                return Err(TreeError::PairedTwice(a));
            }
            if ia != ib && partner[ib].is_some() {
                return Err(TreeError::PairedTwice(b));
            }
            partner[ia] = Some(ib);
            partner[ib] = Some(ia);
        }
        Ok(DoublePointTree {
            vertices: vs,
            edges: es,
            partner,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_parts(
        vertices: &[(&str, i64)],
        edges: &[(&str, &str, &str)],
        pairing: &[(&str, &str)],
    ) -> Result<Self, TreeError> {
        Self::new(
            vertices.iter().map(|&(id, d)| (id.to_string(), d)),
            edges
                .iter()
                .map(|&(id, t, h)| (id.to_string(), t.to_string(), h.to_string())),
            pairing.iter().map(|&(a, b)| (a.to_string(), b.to_string())),
        )
    }

    /// Trusted constructor for internal producers that maintain the id
    /// invariants themselves.
    pub(crate) fn from_raw(vertices: Vec<Vertex>, edges: Vec<Edge>, partner: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(edges.len(), partner.len());
        DoublePointTree {
            vertices,
            edges,
            partner,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index of the conjugate of edge `e`, if paired.
    pub fn partner(&self, e: usize) -> Option<usize> {
        self.partner[e]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn delta(&self, v: usize) -> i64 {
        self.vertices[v].delta
    }

    /// Number of edges incident to `v` (in either direction).
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    pub fn indegree_at(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.head == v).count()
    }

    /// Number of edges whose head is the vertex with the given id.
    pub fn indegree(&self, id: &str) -> Result<usize, TreeError> {
        let v = self
            .vertex_index(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.to_string()))?;
        Ok(self.indegree_at(v))
    }

    /// Indices of the edges incident to `v`, in edge order.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].tail == v || self.edges[e].head == v)
            .collect()
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.tail == v {
            edge.head
        } else {
            edge.tail
        }
    }

    /// Pairs of conjugate edges, each listed once with the smaller index first.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.edges.len())
            .filter_map(|e| match self.partner[e] {
                Some(p) if p > e => Some((e, p)),
                _ => None,
            })
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().ok
    }

    pub(crate) fn require_valid(&self) -> Result<(), TreeError> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(TreeError::Invalid(report))
        }
    }

    /// Checks every structural rule and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let n = self.vertices.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation {
                rule: Rule::Empty,
                witness: vec![],
            });
            return ValidationReport::from_violations(out);
        }

        for v in &self.vertices {
            if v.delta.rem_euclid(2) != 1 {
                out.push(Violation {
                    rule: Rule::EvenDelta,
                    witness: vec![v.id.clone()],
                });
            }
        }
        for e in &self.edges {
            let step = i128::from(self.vertices[e.tail].delta) - i128::from(self.vertices[e.head].delta);
            if step.abs() != 2 {
                out.push(Violation {
                    rule: Rule::DeltaStep,
                    witness: vec![e.id.clone()],
                });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            match self.partner[i] {
                None => out.push(Violation {
                    rule: Rule::Unpaired,
                    witness: vec![e.id.clone()],
                }),
                Some(p) if p == i => out.push(Violation {
                    rule: Rule::SelfPaired,
                    witness: vec![e.id.clone()],
                }),
                _ => {}
            }
        }

        let mut dsu = Dsu::new(n);
        let mut acyclic = true;
        for e in &self.edges {
            if !dsu.union(e.tail, e.head) {
                acyclic = false;
                out.push(Violation {
                    rule: Rule::Cycle,
                    witness: vec![e.id.clone()],
                });
            }
        }
        let root = dsu.find(0);
        let strays: Vec<String> = {
            let mut seen = HashSet::new();
            seen.insert(root);
            (0..n)
                .filter(|&v| seen.insert(dsu.find(v)))
                .map(|v| self.vertices[v].id.clone())
                .collect()
        };
        let connected = strays.is_empty();
        if !connected {
            out.push(Violation {
                rule: Rule::Disconnected,
                witness: strays,
            });
        }

        if acyclic && connected {
            let rooted = Rooted::new(self);
            for (i, e) in self.edges.iter().enumerate() {
                let p = match self.partner[i] {
                    Some(p) if p != i => p,
                    _ => continue,
                };
                if !rooted.partner_on_tail_side(self, i, p) {
                    out.push(Violation {
                        rule: Rule::Orientation,
                        witness: vec![e.id.clone(), self.edges[p].id.clone()],
                    });
                }
            }
        }
        ValidationReport::from_violations(out)
    }

    /// The same tree with every degree negated.
    pub fn negate(&self) -> Result<DoublePointTree, TreeError> {
        self.require_valid()?;
        let mut t = self.clone();
        for v in &mut t.vertices {
            v.delta = v.delta.checked_neg().ok_or(TreeError::Overflow)?;
        }
        Ok(t)
    }

    /// Glues `t2` onto `self` by identifying `v1` with `v2`; both must have
    /// delta 1. The merged vertex keeps `v1`'s id and `t2`'s colliding ids
    /// are replaced by fresh ones.
    pub fn connected_sum(&self, v1: &str, t2: &DoublePointTree, v2: &str) -> Result<ConnectedSum, TreeError> {
        self.require_valid()?;
        t2.require_valid()?;
        let i1 = self
            .vertex_index(v1)
            .ok_or_else(|| TreeError::UnknownVertex(v1.to_string()))?;
        let i2 = t2
            .vertex_index(v2)
            .ok_or_else(|| TreeError::UnknownVertex(v2.to_string()))?;
        for (t, i) in [(self, i1), (t2, i2)] {
            if t.vertices[i].delta != 1 {
                return Err(TreeError::MergeDegree {
                    vertex: t.vertices[i].id.clone(),
                    delta: t.vertices[i].delta,
                });
            }
        }

        let vertex_ids: HashSet<&str> = self
            .vertices
            .iter()
            .chain(t2.vertices.iter())
            .map(|v| v.id.as_str())
            .collect();
        let edge_ids: HashSet<&str> = self
            .edges
            .iter()
            .chain(t2.edges.iter())
            .map(|e| e.id.as_str())
            .collect();
        let own_vertices: HashSet<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        let own_edges: HashSet<&str> = self.edges.iter().map(|e| e.id.as_str()).collect();

        let mut vertices = self.vertices.clone();
        let mut vertex_map = BTreeMap::new();
        let mut vmap = vec![0usize; t2.vertices.len()];
        let mut taken: HashSet<String> = HashSet::new();
        for (j, v) in t2.vertices.iter().enumerate() {
            if j == i2 {
                vmap[j] = i1;
                vertex_map.insert(v.id.clone(), self.vertices[i1].id.clone());
                continue;
            }
            let id = fresh_if_taken(&v.id, &own_vertices, &vertex_ids, &mut taken);
            vertex_map.insert(v.id.clone(), id.clone());
            vmap[j] = vertices.len();
            vertices.push(Vertex { id, delta: v.delta });
        }

        let mut edges = self.edges.clone();
        let mut partner = self.partner.clone();
        let offset = edges.len();
        let mut edge_map = BTreeMap::new();
        let mut taken: HashSet<String> = HashSet::new();
        for e in &t2.edges {
            let id = fresh_if_taken(&e.id, &own_edges, &edge_ids, &mut taken);
            edge_map.insert(e.id.clone(), id.clone());
            edges.push(Edge {
                id,
                tail: vmap[e.tail],
                head: vmap[e.head],
            });
        }
        partner.extend(t2.partner.iter().map(|p| p.map(|p| p + offset)));

        let tree = DoublePointTree {
            vertices,
            edges,
            partner,
        };
        debug_assert!(tree.is_valid());
        Ok(ConnectedSum {
            tree,
            vertex_map,
            edge_map,
        })
    }

    /// A copy with vertices and edges renamed by the given functions.
    pub fn relabeled(&self, vertex: impl Fn(&str) -> String, edge: impl Fn(&str) -> String) -> DoublePointTree {
        let mut t = self.clone();
        for v in &mut t.vertices {
            v.id = vertex(&v.id);
        }
        for e in &mut t.edges {
            e.id = edge(&e.id);
        }
        t
    }

    /// A copy whose internal vertex and edge order follow the given
    /// permutations (`vperm[new] = old`, `eperm[new] = old`).
    pub fn permuted(&self, vperm: &[usize], eperm: &[usize]) -> DoublePointTree {
        let mut vinv = vec![0; vperm.len()];
        for (new, &old) in vperm.iter().enumerate() {
            vinv[old] = new;
        }
        let mut einv = vec![0; eperm.len()];
        for (new, &old) in eperm.iter().enumerate() {
            einv[old] = new;
        }
        DoublePointTree {
            vertices: vperm.iter().map(|&o| self.vertices[o].clone()).collect(),
            edges: eperm
                .iter()
                .map(|&o| {
                    let e = &self.edges[o];
                    Edge {
                        id: e.id.clone(),
                        tail: vinv[e.tail],
                        head: vinv[e.head],
                    }
                })
                .collect(),
            partner: eperm.iter().map(|&o| self.partner[o].map(|p| einv[p])).collect(),
        }
    }
}

fn fresh_if_taken(id: &str, own: &HashSet<&str>, all: &HashSet<&str>, taken: &mut HashSet<String>) -> String {
    if !own.contains(id) {
        return id.to_string();
    }
    let mut k = 2;
    loop {
        let candidate = format!("{id}~{k}");
        if !all.contains(candidate.as_str()) && !taken.contains(&candidate) {
            taken.insert(candidate.clone());
            return candidate;
        }
        k += 1;
    }
}

/// Generates ids of the form `{prefix}{k}` that do not clash with `used`.
pub(crate) fn fresh_id<'a>(prefix: &str, start: usize, used: impl Iterator<Item = &'a str>) -> String {
    let used: HashSet<&str> = used.collect();
    let mut k = start;
    loop {
        let id = format!("{prefix}{k}");
        if !used.contains(id.as_str()) {
            return id;
        }
        k += 1;
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// The tree rooted at vertex 0 with DFS entry/exit times, for subtree tests.
pub(crate) struct Rooted {
    tin: Vec<usize>,
    tout: Vec<usize>,
    depth: Vec<usize>,
}

impl Rooted {
    /// Requires the underlying graph to be a tree.
    pub(crate) fn new(t: &DoublePointTree) -> Self {
        let n = t.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &t.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut clock = 0;
        let mut stack = vec![(0usize, 0usize)];
        seen[0] = true;
        tin[0] = clock;
        clock += 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if !seen[w] {
                    seen[w] = true;
                    depth[w] = depth[v] + 1;
                    tin[w] = clock;
                    clock += 1;
                    stack.push((w, 0));
                }
            } else {
                tout[v] = clock;
                stack.pop();
            }
        }
        Rooted { tin, tout, depth }
    }

    fn in_subtree(&self, v: usize, root: usize) -> bool {
        self.tin[root] <= self.tin[v] && self.tin[v] < self.tout[root]
    }

    fn child_end(&self, t: &DoublePointTree, e: usize) -> usize {
        let edge = &t.edges[e];
        if self.depth[edge.tail] > self.depth[edge.head] {
            edge.tail
        } else {
            edge.head
        }
    }

    /// Whether edge `p` lies in the component of `tree - e` containing the
    /// tail of `e`.
    pub(crate) fn partner_on_tail_side(&self, t: &DoublePointTree, e: usize, p: usize) -> bool {
        let c = self.child_end(t, e);
        let p_below = self.in_subtree(self.child_end(t, p), c);
        (t.edges[e].tail == c) == p_below
    }

    /// The tail an edge must have so that it points away from `p`.
    pub(crate) fn forced_tail(&self, t: &DoublePointTree, e: usize, p: usize) -> usize {
        let c = self.child_end(t, e);
        let other = t.other_end(e, c);
        if self.in_subtree(self.child_end(t, p), c) {
            c
        } else {
            other
        }
    }
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    delta: i64,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    tail: String,
    head: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeJson {
    vertices: Vec<VertexJson>,
    #[serde(default)]
    edges: Vec<EdgeJson>,
    #[serde(default)]
    pairing: Vec<[String; 2]>,
}

impl Serialize for DoublePointTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id.clone(),
                    delta: v.delta,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.clone(),
                    tail: self.vertices[e.tail].id.clone(),
                    head: self.vertices[e.head].id.clone(),
                })
                .collect(),
            pairing: (0..self.edges.len())
                .filter_map(|e| match self.partner[e] {
                    Some(p) if p >= e => Some([self.edges[e].id.clone(), self.edges[p].id.clone()]),
                    _ => None,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DoublePointTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TreeJson::deserialize(d)?;
        DoublePointTree::new(
            raw.vertices.into_iter().map(|v| (v.id, v.delta)),
            raw.edges.into_iter().map(|e| (e.id, e.tail, e.head)),
            raw.pairing.into_iter().map(|[a, b]| (a, b)),
        )
        .map_err(serde::de::Error::custom)
    }
}
