//! Dual-graph model of a connected nodal curve.
//!
//! Components are vertices carrying a geometric genus and a list of labeled
//! smooth points; nodes are edges (loops and parallel edges allowed). A curve
//! obtained by restricting to a subcurve additionally remembers *ports*: the
//! branches of ambient nodes that became smooth points of the restriction.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Hard limit imposed by the bitset representation of subcurves.
pub const MAX_VERTICES: usize = 64;

/// Soft cap for operations that enumerate every subcurve.
pub const ENUMERATION_CAP: usize = 25;

/// A nonempty set of components, stored as a bitset over vertex indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subcurve(u64);

impl Subcurve {
    pub const EMPTY: Subcurve = Subcurve(0);

    pub fn from_bits(bits: u64) -> Self {
        Subcurve(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        Subcurve(1 << v)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Subcurve(u64::MAX)
        } else {
            Subcurve((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Subcurve(it.into_iter().fold(0, |acc, v| acc | (1 << v)))
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        Subcurve(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Subcurve(self.0 & other.0)
    }

    pub fn minus(self, other: Self) -> Self {
        Subcurve(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        Subcurve(!self.0 & Subcurve::full(n).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// Index-lexicographic key used for reproducible ordering.
    pub fn sort_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.iter().collect())
    }
}

impl fmt::Debug for Subcurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Branch of an ambient node that is a smooth point of this (restricted) curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Port {
    pub edge: String,
    pub end: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
    pub points: Vec<String>,
    pub ports: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [usize; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn other(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// A connected nodal curve given by its genus-weighted dual graph.
#[derive(Debug, Clone)]
pub struct Curve {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    base: Option<String>,
    fingerprint: u64,
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && self.base == other.base
    }
}

impl Eq for Curve {}

#[derive(Debug, Default, Clone)]
pub struct CurveBuilder {
    vertices: Vec<(String, u32)>,
    edges: Vec<(String, String, String)>,
    points: Vec<(String, String)>,
    base: Option<String>,
}

impl CurveBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: &str, genus: u32) -> Self {
        self.vertices.push((id.to_string(), genus));
        self
    }

    pub fn edge(mut self, id: &str, a: &str, b: &str) -> Self {
        self.edges.push((id.to_string(), a.to_string(), b.to_string()));
        self
    }

    pub fn point(mut self, label: &str, on: &str) -> Self {
        self.points.push((label.to_string(), on.to_string()));
        self
    }

    pub fn base(mut self, label: &str) -> Self {
        self.base = Some(label.to_string());
        self
    }

    pub fn build(self) -> Result<Curve> {
        if self.vertices.is_empty() {
            return Err(Error::NoVertices);
        }
        if self.vertices.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices {
                count: self.vertices.len(),
                cap: MAX_VERTICES,
            });
        }
        let mut seen = HashSet::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (id, genus) in self.vertices {
            if !seen.insert(id.clone()) {
                return Err(Error::Duplicate(id));
            }
            vertices.push(Vertex {
                id,
                genus,
                points: Vec::new(),
                ports: Vec::new(),
            });
        }
        let index = |vertices: &[Vertex], id: &str| -> Result<usize> {
            vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| Error::UnknownVertex(id.to_string()))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (id, a, b) in &self.edges {
            if !seen.insert(id.clone()) {
                return Err(Error::Duplicate(id.clone()));
            }
            edges.push(Edge {
                id: id.clone(),
                ends: [index(&vertices, a)?, index(&vertices, b)?],
            });
        }
        for (label, on) in &self.points {
            if !seen.insert(label.clone()) {
                return Err(Error::Duplicate(label.clone()));
            }
            let v = index(&vertices, on)?;
            vertices[v].points.push(label.clone());
        }
        if let Some(b) = &self.base {
            let is_point = vertices.iter().any(|v| v.points.contains(b));
            let is_edge = edges.iter().any(|e| &e.id == b);
            if !is_point && !is_edge {
                return Err(Error::UnknownPoint(b.clone()));
            }
        }
        Curve::from_parts(vertices, edges, self.base)
    }
}

impl Curve {
    pub fn builder() -> CurveBuilder {
        CurveBuilder::new()
    }

    pub(crate) fn from_parts(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        base: Option<String>,
    ) -> Result<Curve> {
        let mut curve = Curve {
            vertices,
            edges,
            base,
            fingerprint: 0,
        };
        if !curve.is_connected_subset(curve.full()) {
            return Err(Error::Disconnected);
        }
        let mut h = DefaultHasher::new();
        curve.vertices.hash_into(&mut h);
        for e in &curve.edges {
            e.id.hash(&mut h);
            e.ends.hash(&mut h);
        }
        curve.fingerprint = h.finish();
        Ok(curve)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn full(&self) -> Subcurve {
        Subcurve::full(self.vertices.len())
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Vertex carrying the labeled smooth point `label`.
    pub fn point_vertex(&self, label: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.points.iter().any(|p| p == label))
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn subcurve(&self, ids: &[&str]) -> Result<Subcurve> {
        let mut s = Subcurve::EMPTY;
        for id in ids {
            s.insert(self.vertex_index(id)?);
        }
        Ok(s)
    }

    pub fn fmt_subcurve(&self, s: Subcurve) -> String {
        let ids: Vec<&str> = s.iter().map(|v| self.vertices[v].id.as_str()).collect();
        format!("{{{}}}", ids.join(","))
    }

    /// Edges incident to `v`; loops appear once.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.ends[0] == v || e.ends[1] == v)
            .map(|(i, _)| i)
    }

    /// Number of edge branches at `v` (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.ends[0] == v) as usize + (e.ends[1] == v) as usize)
            .sum()
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.edges.iter().any(|e| e.is_loop() && e.ends[0] == v)
    }

    pub fn is_internal(&self, e: usize, s: Subcurve) -> bool {
        let [a, b] = self.edges[e].ends;
        s.contains(a) && s.contains(b)
    }

    pub fn is_crossing(&self, e: usize, s: Subcurve) -> bool {
        let [a, b] = self.edges[e].ends;
        s.contains(a) != s.contains(b)
    }

    pub fn internal_edges(&self, s: Subcurve) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.is_internal(e, s))
    }

    pub fn crossing_edges(&self, s: Subcurve) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.is_crossing(e, s))
    }

    /// Connected components of the subgraph induced on `s`.
    pub fn components_of(&self, s: Subcurve) -> Vec<Subcurve> {
        self.components_avoiding(s, &BTreeSet::new())
    }

    /// Connected components of the subgraph induced on `s` once the edges in
    /// `removed` are deleted.
    pub fn components_avoiding(&self, s: Subcurve, removed: &BTreeSet<usize>) -> Vec<Subcurve> {
        let mut left = s;
        let mut out = Vec::new();
        while let Some(start) = left.iter().next() {
            let mut comp = Subcurve::singleton(start);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (i, e) in self.edges.iter().enumerate() {
                    if removed.contains(&i) {
                        continue;
                    }
                    for k in 0..2 {
                        if e.ends[k] == v {
                            let w = e.ends[1 - k];
                            if s.contains(w) && !comp.contains(w) {
                                comp.insert(w);
                                stack.push(w);
                            }
                        }
                    }
                }
            }
            left = left.minus(comp);
            out.push(comp);
        }
        out
    }

    pub fn is_connected_subset(&self, s: Subcurve) -> bool {
        !s.is_empty() && self.components_of(s).len() == 1
    }

    /// χ(O_Y) = |Y| − (internal edges) − Σ g_v.
    pub fn chi_structure(&self, s: Subcurve) -> i64 {
        let genera: i64 = s.iter().map(|v| self.vertices[v].genus as i64).sum();
        s.len() as i64 - self.internal_edges(s).count() as i64 - genera
    }

    /// Arithmetic genus of the full curve.
    pub fn genus(&self) -> i64 {
        1 - self.chi_structure(self.full())
    }

    /// Arithmetic genus g_Y = 1 − χ(O_Y) of a subcurve (the whole curve if `None`).
    pub fn genus_of(&self, sub: Option<Subcurve>) -> Result<i64> {
        let s = sub.unwrap_or_else(|| self.full());
        self.check_nonempty(s)?;
        Ok(1 - self.chi_structure(s))
    }

    /// Number of nodes where `sub` meets its complement.
    pub fn delta(&self, sub: Subcurve) -> Result<i64> {
        self.check_proper(sub)?;
        Ok(self.crossing_edges(sub).count() as i64)
    }

    /// deg(ω|_Y) = 2g_Y − 2 + δ_Y; the full curve gives 2g − 2.
    pub fn omega_degree(&self, sub: Subcurve) -> Result<i64> {
        self.check_nonempty(sub)?;
        let delta = self.crossing_edges(sub).count() as i64;
        Ok(2 * (1 - self.chi_structure(sub)) - 2 + delta)
    }

    /// G-stable: genus at least 2 and the dualizing sheaf has positive degree on
    /// every component.
    pub fn is_gstable(&self) -> bool {
        self.genus() >= 2
            && (0..self.vertices.len()).all(|v| {
                self.omega_degree(Subcurve::singleton(v))
                    .map(|d| d > 0)
                    .unwrap_or(false)
            })
    }

    pub(crate) fn check_nonempty(&self, s: Subcurve) -> Result<()> {
        if s.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        if !s.is_subset(self.full()) {
            return Err(Error::UnknownVertex(format!("{:?}", s)));
        }
        Ok(())
    }

    pub(crate) fn check_proper(&self, s: Subcurve) -> Result<()> {
        self.check_nonempty(s)?;
        if s == self.full() {
            return Err(Error::NotProper);
        }
        Ok(())
    }

    pub(crate) fn check_enumerable(&self) -> Result<()> {
        if self.vertices.len() > ENUMERATION_CAP {
            return Err(Error::TooManyVertices {
                count: self.vertices.len(),
                cap: ENUMERATION_CAP,
            });
        }
        Ok(())
    }

    /// The subcurve `s` as a curve in its own right. Vertex and edge ids are
    /// kept; crossing edges become ports on their endpoint inside `s`.
    pub fn induced(&self, s: Subcurve) -> Result<InducedCurve> {
        self.check_nonempty(s)?;
        let old: Vec<usize> = s.iter().collect();
        let new_index = |v: usize| old.iter().position(|&w| w == v);
        let mut vertices: Vec<Vertex> = old.iter().map(|&v| self.vertices[v].clone()).collect();
        let mut edges = Vec::new();
        let mut edge_map = vec![None; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            match (new_index(e.ends[0]), new_index(e.ends[1])) {
                (Some(a), Some(b)) => {
                    edge_map[i] = Some(edges.len());
                    edges.push(Edge {
                        id: e.id.clone(),
                        ends: [a, b],
                    });
                }
                (Some(a), None) => vertices[a].ports.push(Port {
                    edge: e.id.clone(),
                    end: 0,
                }),
                (None, Some(b)) => vertices[b].ports.push(Port {
                    edge: e.id.clone(),
                    end: 1,
                }),
                (None, None) => {}
            }
        }
        // Restrictions of a connected curve may be disconnected; build without
        // the connectivity check.
        let mut curve = Curve {
            vertices,
            edges,
            base: None,
            fingerprint: 0,
        };
        let mut h = DefaultHasher::new();
        curve.vertices.hash_into(&mut h);
        for e in &curve.edges {
            e.id.hash(&mut h);
            e.ends.hash(&mut h);
        }
        curve.fingerprint = h.finish();
        Ok(InducedCurve {
            curve,
            vertex_map: old,
            edge_map,
        })
    }
}

/// Result of [`Curve::induced`], with index maps back to the ambient curve.
#[derive(Debug, Clone)]
pub struct InducedCurve {
    pub curve: Curve,
    /// new vertex index -> ambient vertex index
    pub vertex_map: Vec<usize>,
    /// ambient edge index -> new edge index (internal edges only)
    pub edge_map: Vec<Option<usize>>,
}

impl InducedCurve {
    pub fn local_vertex(&self, ambient: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&v| v == ambient)
    }

    pub fn local_subcurve(&self, ambient: Subcurve) -> Subcurve {
        Subcurve::from_indices(ambient.iter().filter_map(|v| self.local_vertex(v)))
    }

    pub fn ambient_subcurve(&self, local: Subcurve) -> Subcurve {
        Subcurve::from_indices(local.iter().map(|v| self.vertex_map[v]))
    }
}

trait HashInto {
    fn hash_into(&self, h: &mut DefaultHasher);
}

impl HashInto for Vec<Vertex> {
    fn hash_into(&self, h: &mut DefaultHasher) {
        for v in self {
            v.id.hash(h);
            v.genus.hash(h);
            v.points.hash(h);
            v.ports.hash(h);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn genus_of_fixtures() {
        assert_eq!(fixtures::fix_d().genus(), 2);
        let a = fixtures::fix_a();
        assert_eq!(a.genus(), 3);
        let y = a.subcurve(&["X2", "X4"]).unwrap();
        assert_eq!(a.genus_of(Some(y)).unwrap(), 1);
        assert_eq!(a.genus_of(Some(Subcurve::EMPTY)), Err(Error::EmptySubcurve));
    }

    #[test]
    fn genus_of_disconnected_subcurve_is_one_minus_chi() {
        // two elliptic components: χ(O_Y) = 0, so g_Y = 1 rather than 2
        let a = fixtures::fix_a();
        let y = a.subcurve(&["X3", "X4"]).unwrap();
        assert_eq!(a.chi_structure(y), 0);
        assert_eq!(a.genus_of(Some(y)).unwrap(), 1);
        assert_eq!(a.omega_degree(y).unwrap(), 2);
    }

    #[test]
    fn delta_examples() {
        let a = fixtures::fix_a();
        assert_eq!(a.delta(a.subcurve(&["X2", "X4"]).unwrap()).unwrap(), 2);
        let e = fixtures::fix_e();
        assert_eq!(e.delta(e.subcurve(&["b1"]).unwrap()).unwrap(), 3);
        let b = fixtures::fix_b();
        assert_eq!(b.delta(b.subcurve(&["v1"]).unwrap()).unwrap(), 1);
        assert_eq!(b.delta(b.full()), Err(Error::NotProper));
        assert_eq!(b.delta(Subcurve::EMPTY), Err(Error::EmptySubcurve));
    }

    #[test]
    fn omega_degree_examples() {
        let b = fixtures::fix_b();
        assert_eq!(b.omega_degree(b.subcurve(&["v1"]).unwrap()).unwrap(), 1);
        let e = fixtures::fix_e();
        assert_eq!(e.omega_degree(e.subcurve(&["b1"]).unwrap()).unwrap(), 1);
        for c in fixtures::all() {
            assert_eq!(c.omega_degree(c.full()).unwrap(), 2 * c.genus() - 2);
        }
    }

    #[test]
    fn gstability_examples() {
        assert!(fixtures::fix_a().is_gstable());
        assert!(!fixtures::fix_c().is_gstable());
        assert!(fixtures::fix_e().is_gstable());
        assert!(fixtures::fix_b().is_gstable());
        assert!(fixtures::fix_d().is_gstable());
    }

    #[test]
    fn loops_count_twice_in_valence() {
        let c = Curve::builder()
            .vertex("a", 0)
            .edge("l", "a", "a")
            .build()
            .unwrap();
        assert_eq!(c.valence(0), 2);
        assert_eq!(c.genus(), 1);
        assert!(!c.is_gstable());
    }

    #[test]
    fn builder_rejects_bad_input() {
        assert_eq!(Curve::builder().build(), Err(Error::NoVertices));
        assert_eq!(
            Curve::builder().vertex("a", 0).vertex("a", 1).build(),
            Err(Error::Duplicate("a".into()))
        );
        assert_eq!(
            Curve::builder().vertex("a", 0).vertex("b", 1).build(),
            Err(Error::Disconnected)
        );
        assert_eq!(
            Curve::builder().vertex("a", 0).edge("e", "a", "z").build(),
            Err(Error::UnknownVertex("z".into()))
        );
    }

    #[test]
    fn induced_curve_records_ports() {
        let a = fixtures::fix_a();
        let y = a.subcurve(&["X1", "X3"]).unwrap();
        let ind = a.induced(y).unwrap();
        assert_eq!(ind.curve.num_vertices(), 2);
        assert_eq!(ind.curve.num_edges(), 1);
        let x1 = ind.curve.vertex_index("X1").unwrap();
        let ports: Vec<&str> = ind.curve.vertex(x1).ports.iter().map(|p| p.edge.as_str()).collect();
        assert_eq!(ports, vec!["e1", "e2"]);
        assert_eq!(ind.curve.genus(), 1);
    }
}
