//! Oriented graphs with loops and parallel edges, admissible automorphisms,
//! extraction of Cartan data, and graph-level edge contraction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::{contract_cartan, is_isomorphic, CartanDatum, ContractionPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub target: String,
}

impl Edge {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            id: id.into(),
            source: source.into(),
            target: target.into(),
        }
    }
}

/// A finite quiver. Edge endpoints are stored as vertex indices alongside the ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidQuiver(format!("duplicate vertex `{v}`")));
            }
        }
        let mut ids = HashSet::new();
        let mut ends = Vec::with_capacity(edges.len());
        for e in &edges {
            if !ids.insert(e.id.clone()) {
                return Err(Error::InvalidQuiver(format!("duplicate edge `{}`", e.id)));
            }
            let s = *index
                .get(&e.source)
                .ok_or_else(|| Error::UnknownVertex(e.source.clone()))?;
            let t = *index
                .get(&e.target)
                .ok_or_else(|| Error::UnknownVertex(e.target.clone()))?;
            ends.push((s, t));
        }
        Ok(Quiver { vertices, edges, ends })
    }

    /// Quiver with one vertex per `vertices` entry and edges given as `(id, source, target)`.
    pub fn from_parts(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        Quiver::new(
            vertices.iter().map(|v| v.to_string()).collect(),
            edges.iter().map(|(i, s, t)| Edge::new(*i, *s, *t)).collect(),
        )
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(source, target)` vertex indices of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn source(&self, e: usize) -> usize {
        self.ends[e].0
    }

    pub fn target(&self, e: usize) -> usize {
        self.ends[e].1
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.ends[e].0 == self.ends[e].1
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.ends.iter().filter(|&&(s, t)| s == v && t == v).count()
    }

    /// Symmetric Euler form on vertices: `i·i = 2 - 2 loops(i)`, `i·j = -#edges joining i, j`.
    pub fn vertex_form(&self) -> Vec<Vec<i64>> {
        let n = self.num_vertices();
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(s, t) in &self.ends {
            if s == t {
                m[s][s] -= 2;
            } else {
                m[s][t] -= 1;
                m[t][s] -= 1;
            }
        }
        m
    }

    /// Stable content hash input: vertices and edges in order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&QuiverJson {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            automorphism: None,
        })
        .expect("quiver serializes")
    }
}

/// Vertex and edge permutations. `vperm[v]` is the image of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub vperm: Vec<usize>,
    pub eperm: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

impl Automorphism {
    pub fn identity(q: &Quiver) -> Self {
        Automorphism {
            vperm: (0..q.num_vertices()).collect(),
            eperm: (0..q.num_edges()).collect(),
        }
    }

    pub fn new(q: &Quiver, vperm: Vec<usize>, eperm: Vec<usize>) -> Result<Self> {
        if vperm.len() != q.num_vertices() || !is_permutation(&vperm) {
            return Err(Error::InvalidQuiver("vertex map is not a permutation".into()));
        }
        if eperm.len() != q.num_edges() || !is_permutation(&eperm) {
            return Err(Error::InvalidQuiver("edge map is not a permutation".into()));
        }
        Ok(Automorphism { vperm, eperm })
    }

    /// Builds a permutation pair from id maps; ids missing from a map are fixed.
    pub fn from_maps(q: &Quiver, vmap: &BTreeMap<String, String>, emap: &BTreeMap<String, String>) -> Result<Self> {
        let mut vperm: Vec<usize> = (0..q.num_vertices()).collect();
        for (k, v) in vmap {
            vperm[q.vertex_index(k)?] = q.vertex_index(v)?;
        }
        let mut eperm: Vec<usize> = (0..q.num_edges()).collect();
        for (k, v) in emap {
            eperm[q.edge_index(k)?] = q.edge_index(v)?;
        }
        Automorphism::new(q, vperm, eperm)
    }

    pub fn is_identity(&self) -> bool {
        self.vperm.iter().enumerate().all(|(i, &j)| i == j) && self.eperm.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Vertex orbits in order of their smallest member; each orbit lists `v, a(v), a²(v), ...`.
    pub fn vertex_orbits(&self) -> Vec<Vec<usize>> {
        cycles(&self.vperm)
    }

    pub fn edge_orbits(&self) -> Vec<Vec<usize>> {
        cycles(&self.eperm)
    }

    pub fn edge_orbit_of(&self, e: usize) -> Vec<usize> {
        cycle_of(&self.eperm, e)
    }

    pub fn vertex_orbit_of(&self, v: usize) -> Vec<usize> {
        cycle_of(&self.vperm, v)
    }

    fn to_maps(&self, q: &Quiver) -> AutomorphismJson {
        AutomorphismJson {
            vertices: self
                .vperm
                .iter()
                .enumerate()
                .filter(|(i, j)| i != *j)
                .map(|(i, &j)| (q.vertices[i].clone(), q.vertices[j].clone()))
                .collect(),
            edges: self
                .eperm
                .iter()
                .enumerate()
                .filter(|(i, j)| i != *j)
                .map(|(i, &j)| (q.edges[i].id.clone(), q.edges[j].id.clone()))
                .collect(),
        }
    }
}

fn cycle_of(p: &[usize], start: usize) -> Vec<usize> {
    let mut out = vec![start];
    let mut x = p[start];
    while x != start {
        out.push(x);
        x = p[x];
    }
    out
}

fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for v in 0..p.len() {
        if !seen[v] {
            let c = cycle_of(p, v);
            for &x in &c {
                seen[x] = true;
            }
            out.push(c);
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct AutomorphismJson {
    #[serde(default)]
    vertices: BTreeMap<String, String>,
    #[serde(default)]
    edges: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    automorphism: Option<AutomorphismJson>,
}

/// Parses quiver JSON; the automorphism defaults to the identity.
pub fn parse_quiver(json: &str) -> Result<(Quiver, Automorphism)> {
    let raw: QuiverJson = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let q = Quiver::new(raw.vertices, raw.edges)?;
    let a = match raw.automorphism {
        Some(m) => Automorphism::from_maps(&q, &m.vertices, &m.edges)?,
        None => Automorphism::identity(&q),
    };
    Ok((q, a))
}

pub fn quiver_to_json(q: &Quiver, a: &Automorphism) -> serde_json::Value {
    let raw = QuiverJson {
        vertices: q.vertices.clone(),
        edges: q.edges.clone(),
        automorphism: if a.is_identity() { None } else { Some(a.to_maps(q)) },
    };
    serde_json::to_value(raw).expect("quiver serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdmissibilityViolation {
    SourceMismatch { edge: String },
    TargetMismatch { edge: String },
    EdgeWithinOrbit { edge: String },
}

impl fmt::Display for AdmissibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityViolation::SourceMismatch { edge } => {
                write!(f, "a({edge})' differs from a({edge}')")
            }
            AdmissibilityViolation::TargetMismatch { edge } => {
                write!(f, "a({edge})'' differs from a({edge}'')")
            }
            AdmissibilityViolation::EdgeWithinOrbit { edge } => {
                write!(f, "non-loop edge {edge} has both endpoints in one orbit")
            }
        }
    }
}

pub fn check_admissible(q: &Quiver, a: &Automorphism) -> Vec<AdmissibilityViolation> {
    let mut out = Vec::new();
    let orbit_id = orbit_index(a);
    for (e, edge) in q.edges.iter().enumerate() {
        let (s, t) = q.ends(e);
        let (is, it) = q.ends(a.eperm[e]);
        if is != a.vperm[s] {
            out.push(AdmissibilityViolation::SourceMismatch { edge: edge.id.clone() });
        }
        if it != a.vperm[t] {
            out.push(AdmissibilityViolation::TargetMismatch { edge: edge.id.clone() });
        }
        if s != t && orbit_id[s] == orbit_id[t] {
            out.push(AdmissibilityViolation::EdgeWithinOrbit { edge: edge.id.clone() });
        }
    }
    out
}

/// Vertex index → position of its orbit in [`Automorphism::vertex_orbits`].
fn orbit_index(a: &Automorphism) -> Vec<usize> {
    let mut idx = vec![0; a.vperm.len()];
    for (k, orbit) in a.vertex_orbits().iter().enumerate() {
        for &v in orbit {
            idx[v] = k;
        }
    }
    idx
}

fn require_admissible(q: &Quiver, a: &Automorphism) -> Result<()> {
    if let Some(v) = check_admissible(q, a).first() {
        return Err(Error::InvalidQuiver(format!("automorphism is not admissible: {v}")));
    }
    Ok(())
}

/// Cartan datum over the vertex orbits. Each orbit is labelled by its first vertex id.
pub fn cartan_of(q: &Quiver, a: &Automorphism) -> Result<CartanDatum> {
    require_admissible(q, a)?;
    let orbits = a.vertex_orbits();
    let idx = orbit_index(a);
    let n = orbits.len();
    let labels = orbits.iter().map(|o| q.vertices[o[0]].clone()).collect();
    let phi1: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
    let phi2: Vec<u64> = orbits.iter().map(|o| q.loops_at(o[0]) as u64).collect();
    let mut form = vec![vec![0i64; n]; n];
    for i in 0..n {
        let p1 = phi1[i] as i64;
        form[i][i] = 2 * (p1 - p1 * phi2[i] as i64);
    }
    for e in 0..q.num_edges() {
        let (s, t) = q.ends(e);
        if s != t {
            let (i, j) = (idx[s], idx[t]);
            form[i][j] -= 1;
            form[j][i] -= 1;
        }
    }
    CartanDatum::new(labels, form, phi1, phi2)
}

/// Orbit pair given by any vertex of each orbit, with an optional contraction edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPair {
    pub plus: String,
    pub minus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
}

impl OrbitPair {
    pub fn new(plus: impl Into<String>, minus: impl Into<String>) -> Self {
        OrbitPair {
            plus: plus.into(),
            minus: minus.into(),
            edge: None,
        }
    }

    pub fn with_edge(mut self, edge: impl Into<String>) -> Self {
        self.edge = Some(edge.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssumptionViolation {
    SameOrbit,
    UnequalSizes { plus: usize, minus: usize },
    Crossing { edge: String, other: String },
    Loops { vertex: String },
    NoContractionEdge,
    EdgeNotBetweenOrbits { edge: String },
    EdgeOrbitSize { edge: String, size: usize, expected: usize },
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionViolation::SameOrbit => write!(f, "plus and minus lie in the same orbit"),
            AssumptionViolation::UnequalSizes { plus, minus } => {
                write!(f, "orbit sizes differ: {plus} vs {minus}")
            }
            AssumptionViolation::Crossing { edge, other } => write!(
                f,
                "edges {edge} and {other} share an endpoint but join different vertex pairs"
            ),
            AssumptionViolation::Loops { vertex } => write!(f, "vertex {vertex} carries a loop"),
            AssumptionViolation::NoContractionEdge => {
                write!(f, "no edge joins the two orbits")
            }
            AssumptionViolation::EdgeNotBetweenOrbits { edge } => {
                write!(f, "edge {edge} does not join the two orbits")
            }
            AssumptionViolation::EdgeOrbitSize { edge, size, expected } => {
                write!(f, "edge {edge} has orbit size {size}, expected {expected}")
            }
        }
    }
}

/// Resolved contraction data: orbits after any swap and the chosen edge `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPair {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub edge: usize,
    pub swapped: bool,
}

fn resolve_pair(
    q: &Quiver,
    a: &Automorphism,
    pair: &OrbitPair,
) -> std::result::Result<ResolvedPair, Vec<AssumptionViolation>> {
    let fail = |v: AssumptionViolation| Err(vec![v]);
    let (Ok(p), Ok(m)) = (q.vertex_index(&pair.plus), q.vertex_index(&pair.minus)) else {
        return fail(AssumptionViolation::NoContractionEdge);
    };
    let mut plus = a.vertex_orbit_of(p);
    let mut minus = a.vertex_orbit_of(m);
    if plus.contains(&m) {
        return fail(AssumptionViolation::SameOrbit);
    }
    let joins = |e: usize, from: &[usize], to: &[usize]| {
        let (s, t) = q.ends(e);
        from.contains(&s) && to.contains(&t)
    };
    let mut swapped = false;
    let edge = match &pair.edge {
        Some(id) => {
            let Ok(e) = q.edge_index(id) else {
                return fail(AssumptionViolation::EdgeNotBetweenOrbits { edge: id.clone() });
            };
            if joins(e, &minus, &plus) {
                swapped = true;
            } else if !joins(e, &plus, &minus) {
                return fail(AssumptionViolation::EdgeNotBetweenOrbits { edge: id.clone() });
            }
            e
        }
        None => {
            let forward: Vec<usize> = (0..q.num_edges()).filter(|&e| joins(e, &plus, &minus)).collect();
            let candidates = if forward.is_empty() {
                swapped = true;
                (0..q.num_edges()).filter(|&e| joins(e, &minus, &plus)).collect()
            } else {
                forward
            };
            if candidates.is_empty() {
                return fail(AssumptionViolation::NoContractionEdge);
            }
            let size = plus.len();
            *candidates
                .iter()
                .find(|&&e| a.edge_orbit_of(e).len() == size)
                .unwrap_or(&candidates[0])
        }
    };
    if swapped {
        std::mem::swap(&mut plus, &mut minus);
    }
    Ok(ResolvedPair {
        plus,
        minus,
        edge,
        swapped,
    })
}

/// Checks equal orbit sizes, the no-crossing condition and absence of loops, plus
/// existence of a contraction edge whose `a`-orbit has one edge per vertex.
pub fn check_contraction_assumptions(q: &Quiver, a: &Automorphism, pair: &OrbitPair) -> Vec<AssumptionViolation> {
    let r = match resolve_pair(q, a, pair) {
        Ok(r) => r,
        Err(v) => return v,
    };
    let mut out = Vec::new();
    if r.plus.len() != r.minus.len() {
        out.push(AssumptionViolation::UnequalSizes {
            plus: r.plus.len(),
            minus: r.minus.len(),
        });
    }
    let union: HashSet<usize> = r.plus.iter().chain(&r.minus).copied().collect();
    for &v in r.plus.iter().chain(&r.minus) {
        if q.loops_at(v) > 0 {
            out.push(AssumptionViolation::Loops {
                vertex: q.vertices[v].clone(),
            });
        }
    }
    let inside: Vec<usize> = (0..q.num_edges())
        .filter(|&e| {
            let (s, t) = q.ends(e);
            s != t && union.contains(&s) && union.contains(&t)
        })
        .collect();
    for (x, &h) in inside.iter().enumerate() {
        let (hs, ht) = q.ends(h);
        for &l in &inside[x + 1..] {
            let (ls, lt) = q.ends(l);
            let shares = [ls, lt].iter().any(|v| *v == hs || *v == ht);
            let same = (ls == hs && lt == ht) || (ls == ht && lt == hs);
            if shares && !same {
                out.push(AssumptionViolation::Crossing {
                    edge: q.edges[h].id.clone(),
                    other: q.edges[l].id.clone(),
                });
            }
        }
    }
    let size = a.edge_orbit_of(r.edge).len();
    if size != r.plus.len() {
        out.push(AssumptionViolation::EdgeOrbitSize {
            edge: q.edges[r.edge].id.clone(),
            size,
            expected: r.plus.len(),
        });
    }
    out
}

/// Origin of an edge of the contracted quiver.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Original edge with no endpoint in the removed orbit.
    Kept { edge: usize },
    /// `l₁ h`: from `h'` to `l₁''`, where `l₁` leaves `h''`.
    Post { l1: usize, h: usize },
    /// `h̄ l₂`: from `l₂'` to `h'`, where `l₂ ≠ h` enters `h''`.
    Pre { h: usize, l2: usize },
}

/// Result of a graph-level contraction.
#[derive(Debug, Clone)]
pub struct ContractedQuiver {
    pub quiver: Quiver,
    pub autom: Automorphism,
    /// One entry per edge of `quiver`, indices into the original edge list.
    pub provenance: Vec<Provenance>,
    /// Original vertex index of each new vertex.
    pub vertex_origin: Vec<usize>,
    pub plus_orbit: Vec<usize>,
    pub minus_orbit: Vec<usize>,
    /// The contraction edges `h_k`, as original indices, in the order `e, a(e), ...`.
    pub contraction_edges: Vec<usize>,
    pub swapped: bool,
}

impl ContractedQuiver {
    /// The contraction edge ending at vertex `v` of the removed orbit.
    pub fn edge_into(&self, original: &Quiver, v: usize) -> Option<usize> {
        self.contraction_edges
            .iter()
            .copied()
            .find(|&h| original.target(h) == v)
    }

    /// Counts of kept, post-composite and pre-composite edges.
    pub fn edge_counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for p in &self.provenance {
            match p {
                Provenance::Kept { .. } => c.0 += 1,
                Provenance::Post { .. } => c.1 += 1,
                Provenance::Pre { .. } => c.2 += 1,
            }
        }
        c
    }

    pub fn provenance_json(&self, original: &Quiver) -> serde_json::Value {
        let id = |e: usize| original.edges[e].id.clone();
        let entries: Vec<serde_json::Value> = self
            .quiver
            .edges()
            .iter()
            .zip(&self.provenance)
            .map(|(edge, p)| match p {
                Provenance::Kept { edge: e } => {
                    serde_json::json!({"edge": edge.id, "kind": "kept", "from": [id(*e)]})
                }
                Provenance::Post { l1, h } => {
                    serde_json::json!({"edge": edge.id, "kind": "post", "from": [id(*l1), id(*h)]})
                }
                Provenance::Pre { h, l2 } => {
                    serde_json::json!({"edge": edge.id, "kind": "pre", "from": [id(*h), id(*l2)]})
                }
            })
            .collect();
        serde_json::Value::Array(entries)
    }
}

/// Contracts the `a`-orbit of the chosen edge, removing the orbit `[i₋]`.
pub fn contract_quiver(q: &Quiver, a: &Automorphism, pair: &OrbitPair) -> Result<ContractedQuiver> {
    require_admissible(q, a)?;
    let violations = check_contraction_assumptions(q, a, pair);
    if let Some(v) = violations.first() {
        return Err(Error::Assumptions(v.to_string()));
    }
    let r = resolve_pair(q, a, pair).map_err(|v| Error::Assumptions(v[0].to_string()))?;
    let removed: HashSet<usize> = r.minus.iter().copied().collect();
    let hs = a.edge_orbit_of(r.edge);

    let vertex_origin: Vec<usize> = (0..q.num_vertices()).filter(|v| !removed.contains(v)).collect();
    let mut new_index = vec![usize::MAX; q.num_vertices()];
    for (k, &v) in vertex_origin.iter().enumerate() {
        new_index[v] = k;
    }

    let mut edges = Vec::new();
    let mut provenance = Vec::new();
    for (e, edge) in q.edges.iter().enumerate() {
        let (s, t) = q.ends(e);
        if !removed.contains(&s) && !removed.contains(&t) {
            edges.push(edge.clone());
            provenance.push(Provenance::Kept { edge: e });
        }
    }
    for &h in &hs {
        let (hs_, ht) = q.ends(h);
        for l1 in 0..q.num_edges() {
            if q.source(l1) == ht {
                edges.push(Edge::new(
                    format!("{}*{}", q.edges[l1].id, q.edges[h].id),
                    q.vertices[hs_].clone(),
                    q.vertices[q.target(l1)].clone(),
                ));
                provenance.push(Provenance::Post { l1, h });
            }
        }
    }
    for &h in &hs {
        let (hs_, ht) = q.ends(h);
        for l2 in 0..q.num_edges() {
            if l2 != h && q.target(l2) == ht {
                edges.push(Edge::new(
                    format!("~{}*{}", q.edges[h].id, q.edges[l2].id),
                    q.vertices[q.source(l2)].clone(),
                    q.vertices[hs_].clone(),
                ));
                provenance.push(Provenance::Pre { h, l2 });
            }
        }
    }
    let new_q = Quiver::new(vertex_origin.iter().map(|&v| q.vertices[v].clone()).collect(), edges)?;

    let vperm = vertex_origin.iter().map(|&v| new_index[a.vperm[v]]).collect();
    let pos: HashMap<&Provenance, usize> = provenance.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let eperm = provenance
        .iter()
        .map(|p| {
            let image = match *p {
                Provenance::Kept { edge } => Provenance::Kept { edge: a.eperm[edge] },
                Provenance::Post { l1, h } => Provenance::Post {
                    l1: a.eperm[l1],
                    h: a.eperm[h],
                },
                Provenance::Pre { h, l2 } => Provenance::Pre {
                    h: a.eperm[h],
                    l2: a.eperm[l2],
                },
            };
            pos.get(&image)
                .copied()
                .ok_or_else(|| Error::Assumptions("induced edge map is not closed on composites".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let autom = Automorphism::new(&new_q, vperm, eperm)?;
    Ok(ContractedQuiver {
        quiver: new_q,
        autom,
        provenance,
        vertex_origin,
        plus_orbit: r.plus,
        minus_orbit: r.minus,
        contraction_edges: hs,
        swapped: r.swapped,
    })
}

/// Compares contracting the extracted Cartan datum against extracting the Cartan
/// datum of the contracted graph.
pub fn verify_contraction_commutes(q: &Quiver, a: &Automorphism, pair: &OrbitPair) -> Result<bool> {
    let contracted = contract_quiver(q, a, pair)?;
    let datum = cartan_of(q, a)?;
    let cpair = ContractionPair::new(
        q.vertices[contracted.plus_orbit[0]].clone(),
        q.vertices[contracted.minus_orbit[0]].clone(),
    );
    let via_datum = contract_cartan(&datum, &cpair)?;
    let via_graph = cartan_of(&contracted.quiver, &contracted.autom)?;
    Ok(is_isomorphic(&via_datum, &via_graph).is_some())
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Builds a graph with admissible automorphism realizing `d`: vertices `<label>.<k>`
/// cycled by `a`, loops and edges arranged in full `a`-orbits. Edge `k` of an orbit
/// between `D_i` and `D_j` joins `<i>.<k mod φ1(i)>` to `<j>.<k mod φ1(j)>`.
pub fn realize_graph(d: &CartanDatum) -> Result<(Quiver, Automorphism)> {
    if let Some(v) = crate::cartan::validate_cartan(d).first() {
        return Err(Error::InvalidDatum(v.to_string()));
    }
    let n = d.rank();
    let labels = d.labels();
    let mut vertices = Vec::new();
    let mut vperm = Vec::new();
    let mut base = Vec::with_capacity(n);
    for i in 0..n {
        let p = d.phi1()[i] as usize;
        base.push(vertices.len());
        for k in 0..p {
            vertices.push(format!("{}.{k}", labels[i]));
            vperm.push(base[i] + (k + 1) % p);
        }
    }
    let mut edges = Vec::new();
    let mut eperm = Vec::new();
    let mut push_orbit =
        |edges: &mut Vec<Edge>, prefix: String, size: usize, ends: &dyn Fn(usize) -> (usize, usize)| {
            let start = edges.len();
            for k in 0..size {
                let (s, t) = ends(k);
                edges.push(Edge::new(
                    format!("{prefix}.{k}"),
                    vertices[s].clone(),
                    vertices[t].clone(),
                ));
                eperm.push(start + (k + 1) % size);
            }
        };
    for i in 0..n {
        let p = d.phi1()[i] as usize;
        for r in 0..d.phi2()[i] {
            let b = base[i];
            push_orbit(&mut edges, format!("{}~{r}", labels[i]), p, &|k| (b + k, b + k));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let count = (-d.form()[i][j]) as u64;
            if count == 0 {
                continue;
            }
            let (pi, pj) = (d.phi1()[i], d.phi1()[j]);
            let size = lcm(pi, pj);
            let (bi, bj) = (base[i], base[j]);
            for r in 0..count / size {
                push_orbit(
                    &mut edges,
                    format!("{}-{}.{r}", labels[i], labels[j]),
                    size as usize,
                    &|k| (bi + k % pi as usize, bj + k % pj as usize),
                );
            }
        }
    }
    let q = Quiver::new(vertices, edges)?;
    let a = Automorphism::new(&q, vperm, eperm)?;
    Ok((q, a))
}
