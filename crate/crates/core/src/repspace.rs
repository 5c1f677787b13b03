//! Representation spaces `E_V` of a quiver over `F_q`, the `G_V` action, orbit
//! tables, stable subspaces and extensions, and the point-level contraction map.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffalg::{enumerate_gl, enumerate_graded_subspaces, enumerate_matrices, Bounds, Elem, FMatrix, Field};
use crate::quiver::{contract_quiver, Automorphism, ContractedQuiver, OrbitPair, Provenance, Quiver};

/// Graded dimension: one entry per vertex, in vertex order.
pub type Dim = Vec<usize>;

pub fn dim_add(a: &[usize], b: &[usize]) -> Dim {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All `ω` with `0 <= ω <= ν` componentwise, in lexicographic order.
pub fn dims_below(nu: &[usize]) -> Vec<Dim> {
    let mut out: Vec<Dim> = vec![Vec::new()];
    for &n in nu {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Dimension vector as a `vertex -> n` map.
pub fn dim_to_map(q: &Quiver, dim: &[usize]) -> BTreeMap<String, usize> {
    q.vertices().iter().cloned().zip(dim.iter().copied()).collect()
}

pub fn dim_from_map(q: &Quiver, map: &BTreeMap<String, usize>) -> Result<Dim> {
    let mut d = vec![0; q.num_vertices()];
    for (v, &n) in map {
        d[q.vertex_index(v)?] = n;
    }
    Ok(d)
}

/// A point of `E_V`: one matrix per edge, shaped `dim(target) x dim(source)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RepPoint {
    pub dim: Dim,
    pub mats: Vec<FMatrix>,
}

/// A group element of `G_V`: one invertible matrix per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub mats: Vec<FMatrix>,
}

impl GroupElement {
    pub fn identity(dim: &[usize]) -> Self {
        GroupElement {
            mats: dim.iter().map(|&n| FMatrix::identity(n)).collect(),
        }
    }

    pub fn compose(&self, rhs: &GroupElement, f: &Field) -> Result<GroupElement> {
        let mats = self
            .mats
            .iter()
            .zip(&rhs.mats)
            .map(|(a, b)| a.mul(b, f))
            .collect::<Result<_>>()?;
        Ok(GroupElement { mats })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    offset: usize,
    rows: usize,
    cols: usize,
}

/// Coordinates on `E_V`: points are flat entry vectors (edges in order, each
/// matrix row-major) and are encoded as base-`q` integers, first entry most significant.
#[derive(Debug, Clone)]
pub struct RepSpace {
    quiver: Arc<Quiver>,
    field: Arc<Field>,
    dim: Dim,
    blocks: Vec<Block>,
    len: usize,
}

impl RepSpace {
    pub fn new(quiver: Arc<Quiver>, field: Arc<Field>, dim: Dim) -> Result<Self> {
        if dim.len() != quiver.num_vertices() {
            return Err(Error::DimMismatch(format!(
                "dimension has {} entries for {} vertices",
                dim.len(),
                quiver.num_vertices()
            )));
        }
        let mut blocks = Vec::with_capacity(quiver.num_edges());
        let mut offset = 0;
        for e in 0..quiver.num_edges() {
            let (s, t) = quiver.ends(e);
            let b = Block {
                offset,
                rows: dim[t],
                cols: dim[s],
            };
            offset += b.rows * b.cols;
            blocks.push(b);
        }
        Ok(RepSpace {
            quiver,
            field,
            dim,
            blocks,
            len: offset,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> &Dim {
        &self.dim
    }

    /// Number of field entries of a point.
    pub fn entries(&self) -> usize {
        self.len
    }

    /// `#E_V(F_q)`, saturating.
    pub fn point_count(&self) -> u128 {
        (self.field.q() as u128)
            .checked_pow(self.len as u32)
            .unwrap_or(u128::MAX)
    }

    /// `#G_V(F_q)`, saturating.
    pub fn group_order(&self) -> u128 {
        self.dim
            .iter()
            .map(|&n| self.field.gl_order(n))
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    pub fn check_points(&self, bounds: &Bounds) -> Result<()> {
        bounds.check_points(
            &format!("points of E_V at dim {:?} over F_{}", self.dim, self.field.q()),
            self.point_count(),
        )
    }

    pub fn encode_flat(&self, entries: &[Elem]) -> u64 {
        let q = self.field.q() as u64;
        entries.iter().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    pub fn decode_flat(&self, mut code: u64, out: &mut [Elem]) {
        let q = self.field.q() as u64;
        for slot in out.iter_mut().rev() {
            *slot = (code % q) as Elem;
            code /= q;
        }
    }

    pub fn flatten(&self, x: &RepPoint) -> Result<Vec<Elem>> {
        self.check_shape(x)?;
        let mut out = Vec::with_capacity(self.len);
        for m in &x.mats {
            out.extend_from_slice(m.data());
        }
        Ok(out)
    }

    pub fn unflatten(&self, entries: &[Elem]) -> RepPoint {
        let mats = self
            .blocks
            .iter()
            .map(|b| {
                FMatrix::new(b.rows, b.cols, entries[b.offset..b.offset + b.rows * b.cols].to_vec())
                    .expect("block shape")
            })
            .collect();
        RepPoint {
            dim: self.dim.clone(),
            mats,
        }
    }

    pub fn encode(&self, x: &RepPoint) -> Result<u64> {
        Ok(self.encode_flat(&self.flatten(x)?))
    }

    pub fn decode(&self, code: u64) -> RepPoint {
        let mut buf = vec![0; self.len];
        self.decode_flat(code, &mut buf);
        self.unflatten(&buf)
    }

    pub fn check_shape(&self, x: &RepPoint) -> Result<()> {
        if x.dim != self.dim || x.mats.len() != self.blocks.len() {
            return Err(Error::Shape(format!(
                "point of dim {:?} in space of dim {:?}",
                x.dim, self.dim
            )));
        }
        for (m, b) in x.mats.iter().zip(&self.blocks) {
            if m.rows() != b.rows || m.cols() != b.cols {
                return Err(Error::Shape(format!(
                    "edge matrix {}x{} where {}x{} is required",
                    m.rows(),
                    m.cols(),
                    b.rows,
                    b.cols
                )));
            }
        }
        Ok(())
    }

    pub fn zero_point(&self) -> RepPoint {
        self.unflatten(&vec![0; self.len])
    }

    /// All points in code order.
    pub fn enumerate_points(&self, bounds: &Bounds) -> Result<impl Iterator<Item = RepPoint> + '_> {
        self.check_points(bounds)?;
        let count = self.point_count() as u64;
        Ok((0..count).map(move |c| self.decode(c)))
    }

    /// `(g.x)_h = g_{h''} x_h g_{h'}^{-1}`.
    pub fn act(&self, g: &GroupElement, x: &RepPoint) -> Result<RepPoint> {
        self.check_shape(x)?;
        if g.mats.len() != self.dim.len()
            || g.mats
                .iter()
                .zip(&self.dim)
                .any(|(m, &n)| m.rows() != n || m.cols() != n)
        {
            return Err(Error::Shape("group element does not match the dimension".into()));
        }
        let f = &self.field;
        let inv: Vec<FMatrix> = g.mats.iter().map(|m| m.inverse(f)).collect::<Result<_>>()?;
        let mats = x
            .mats
            .iter()
            .enumerate()
            .map(|(e, m)| {
                let (s, t) = self.quiver.ends(e);
                g.mats[t].mul(m, f)?.mul(&inv[s], f)
            })
            .collect::<Result<_>>()?;
        Ok(RepPoint {
            dim: self.dim.clone(),
            mats,
        })
    }

    /// All elements of `G_V`.
    pub fn enumerate_group(&self, bounds: &Bounds) -> Result<Vec<GroupElement>> {
        bounds.check_group(
            &format!("G_V at dim {:?} over F_{}", self.dim, self.field.q()),
            self.group_order(),
        )?;
        let mut acc = vec![GroupElement { mats: Vec::new() }];
        for &n in &self.dim {
            let gl = enumerate_gl(n, &self.field, bounds)?;
            acc = acc
                .into_iter()
                .flat_map(|g| {
                    gl.iter().map(move |m| {
                        let mut h = g.clone();
                        h.mats.push(m.clone());
                        h
                    })
                })
                .collect();
        }
        Ok(acc)
    }

    fn generators(&self) -> Vec<Generator> {
        let f = &self.field;
        let mut gens = Vec::new();
        for (v, &n) in self.dim.iter().enumerate() {
            if n == 0 {
                continue;
            }
            if f.q() > 2 {
                let z = f.generator();
                gens.push(Generator::Scale {
                    vertex: v,
                    row: 0,
                    z,
                    z_inv: f.inv(z).expect("generator is nonzero"),
                });
            }
            for r in 0..n {
                for s in 0..n {
                    if r != s {
                        for &c in &f.prime_basis() {
                            gens.push(Generator::Transvection {
                                vertex: v,
                                r,
                                s,
                                c,
                                neg_c: f.neg(c),
                            });
                        }
                    }
                }
            }
        }
        gens
    }

    fn apply_generator(&self, g: &Generator, x: &mut [Elem]) {
        let f = &*self.field;
        let v = g.vertex();
        for (e, b) in self.blocks.iter().enumerate() {
            let (s, t) = self.quiver.ends(e);
            let m = &mut x[b.offset..b.offset + b.rows * b.cols];
            if t == v {
                match *g {
                    Generator::Scale { row, z, .. } => {
                        for c in 0..b.cols {
                            m[row * b.cols + c] = f.mul(z, m[row * b.cols + c]);
                        }
                    }
                    Generator::Transvection { r, s: src, c, .. } => {
                        for col in 0..b.cols {
                            let add = f.mul(c, m[src * b.cols + col]);
                            m[r * b.cols + col] = f.add(m[r * b.cols + col], add);
                        }
                    }
                }
            }
            if s == v {
                match *g {
                    Generator::Scale { row, z_inv, .. } => {
                        for r in 0..b.rows {
                            m[r * b.cols + row] = f.mul(z_inv, m[r * b.cols + row]);
                        }
                    }
                    Generator::Transvection {
                        r: rr, s: ss, neg_c, ..
                    } => {
                        for row in 0..b.rows {
                            let add = f.mul(neg_c, m[row * b.cols + rr]);
                            m[row * b.cols + ss] = f.add(m[row * b.cols + ss], add);
                        }
                    }
                }
            }
        }
    }

    /// A fixed group element moving many points, used to sample a second orbit member.
    pub fn sample_group_element(&self) -> GroupElement {
        let f = &self.field;
        let mats = self
            .dim
            .iter()
            .map(|&n| {
                let mut m = FMatrix::identity(n);
                if n >= 2 {
                    m.set(0, n - 1, 1);
                } else if n == 1 {
                    m.set(0, 0, f.generator());
                }
                m
            })
            .collect();
        GroupElement { mats }
    }

    /// The graded subspaces `U` of dimension `omega` stable under `x`, with the
    /// induced quotient and sub representations.
    pub fn stable_subspaces(&self, x: &RepPoint, omega: &[usize], bounds: &Bounds) -> Result<Vec<StableSubspace>> {
        self.check_shape(x)?;
        let f = &*self.field;
        let tau: Dim = self
            .dim
            .iter()
            .zip(omega)
            .map(|(&n, &w)| {
                n.checked_sub(w)
                    .ok_or_else(|| Error::DimMismatch(format!("{omega:?} exceeds {:?}", self.dim)))
            })
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for basis in enumerate_graded_subspaces(&self.dim, omega, f, bounds)? {
            let (p, p_inv) = adapted_bases(&basis, &self.dim, f)?;
            let mut quot = Vec::with_capacity(x.mats.len());
            let mut sub = Vec::with_capacity(x.mats.len());
            let mut stable = true;
            for (e, m) in x.mats.iter().enumerate() {
                let (s, t) = self.quiver.ends(e);
                let y = p_inv[t].mul(m, f)?.mul(&p[s], f)?;
                match y.block_extract(tau[s], tau[t]) {
                    Ok((qm, sm, _)) => {
                        quot.push(qm);
                        sub.push(sm);
                    }
                    Err(_) => {
                        stable = false;
                        break;
                    }
                }
            }
            if stable {
                out.push(StableSubspace {
                    basis,
                    quotient: RepPoint {
                        dim: tau.clone(),
                        mats: quot,
                    },
                    sub: RepPoint {
                        dim: omega.to_vec(),
                        mats: sub,
                    },
                });
            }
        }
        Ok(out)
    }

    /// All points on `V = T ⊕ W` (first `τ` coordinates span `T`) with `W` stable
    /// inducing `x_t` on the quotient and `x_w` on `W`, in order of the mixing blocks.
    pub fn extensions_over(&self, x_t: &RepPoint, x_w: &RepPoint, bounds: &Bounds) -> Result<Vec<RepPoint>> {
        let f = &*self.field;
        let tau = &x_t.dim;
        let omega = &x_w.dim;
        if dim_add(tau, omega) != self.dim {
            return Err(Error::DimMismatch(format!(
                "{tau:?} + {omega:?} differs from {:?}",
                self.dim
            )));
        }
        let mixing_entries: usize = (0..self.quiver.num_edges())
            .map(|e| {
                let (s, t) = self.quiver.ends(e);
                tau[s] * omega[t]
            })
            .sum();
        bounds.check_points("extensions", (f.q() as u128).saturating_pow(mixing_entries as u32))?;
        let mut acc: Vec<Vec<FMatrix>> = vec![Vec::new()];
        for e in 0..self.quiver.num_edges() {
            let (s, t) = self.quiver.ends(e);
            let choices = enumerate_matrices(omega[t], tau[s], f, bounds)?;
            let mut next = Vec::with_capacity(acc.len() * choices.len());
            for prefix in acc {
                for c in &choices {
                    let mut v = prefix.clone();
                    v.push(FMatrix::block_compose(&x_t.mats[e], c, &x_w.mats[e])?);
                    next.push(v);
                }
            }
            acc = next;
        }
        Ok(acc
            .into_iter()
            .map(|mats| RepPoint {
                dim: self.dim.clone(),
                mats,
            })
            .collect())
    }
}

/// Change of basis per vertex: columns are the complement coordinates, then the basis of `U`.
fn adapted_bases(basis: &[FMatrix], dim: &[usize], f: &Field) -> Result<(Vec<FMatrix>, Vec<FMatrix>)> {
    let mut ps = Vec::with_capacity(dim.len());
    let mut invs = Vec::with_capacity(dim.len());
    for (b, &n) in basis.iter().zip(dim) {
        let (_, pivots) = b.rref(f);
        let mut p = FMatrix::zeros(n, n);
        let mut col = 0;
        for c in 0..n {
            if !pivots.contains(&c) {
                p.set(c, col, 1);
                col += 1;
            }
        }
        for r in 0..b.rows() {
            for c in 0..n {
                p.set(c, col + r, b.get(r, c));
            }
        }
        invs.push(p.inverse(f)?);
        ps.push(p);
    }
    Ok((ps, invs))
}

#[derive(Debug, Clone, Copy)]
enum Generator {
    Scale {
        vertex: usize,
        row: usize,
        z: Elem,
        z_inv: Elem,
    },
    Transvection {
        vertex: usize,
        r: usize,
        s: usize,
        c: Elem,
        neg_c: Elem,
    },
}

impl Generator {
    fn vertex(&self) -> usize {
        match *self {
            Generator::Scale { vertex, .. } | Generator::Transvection { vertex, .. } => vertex,
        }
    }
}

/// An `x`-stable graded subspace with its quotient and sub representations.
#[derive(Debug, Clone)]
pub struct StableSubspace {
    /// Reduced row echelon basis per vertex.
    pub basis: Vec<FMatrix>,
    pub quotient: RepPoint,
    pub sub: RepPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMethod {
    /// Sweep the full group if it is within bounds, else close under generators.
    Auto,
    Sweep,
    Closure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub id: u32,
    /// Code of the lexicographically least point.
    pub rep: u64,
    pub size: u64,
}

/// The partition of `E_V(F_q)` into `G_V`-orbits. Orbit ids follow the order of
/// their representatives.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    space: RepSpace,
    orbits: Vec<Orbit>,
    index: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl OrbitTable {
    pub fn compute(space: &RepSpace, bounds: &Bounds, method: OrbitMethod) -> Result<OrbitTable> {
        space.check_points(bounds)?;
        let sweep = match method {
            OrbitMethod::Sweep => true,
            OrbitMethod::Closure => false,
            OrbitMethod::Auto => space.group_order() <= bounds.max_group as u128,
        };
        let count = space.point_count() as u64;
        let mut index = vec![UNSEEN; count as usize];
        let mut orbits = Vec::new();
        if sweep {
            let group = space.enumerate_group(bounds)?;
            for code in 0..count {
                if index[code as usize] != UNSEEN {
                    continue;
                }
                let id = orbits.len() as u32;
                let x = space.decode(code);
                let mut size = 0;
                for g in &group {
                    let c = space.encode(&space.act(g, &x)?)? as usize;
                    if index[c] == UNSEEN {
                        index[c] = id;
                        size += 1;
                    }
                }
                orbits.push(Orbit { id, rep: code, size });
            }
        } else {
            let gens = space.generators();
            let mut buf = vec![0; space.entries()];
            let mut stack = Vec::new();
            for code in 0..count {
                if index[code as usize] != UNSEEN {
                    continue;
                }
                let id = orbits.len() as u32;
                let size = close_orbit(space, &gens, code, id, &mut index, &mut stack, &mut buf);
                orbits.push(Orbit { id, rep: code, size });
            }
        }
        Ok(OrbitTable {
            space: space.clone(),
            orbits,
            index,
        })
    }

    /// Rebuilds a table from its orbit list by closing each representative under generators.
    pub fn from_orbits(space: &RepSpace, orbits: Vec<Orbit>, bounds: &Bounds) -> Result<OrbitTable> {
        space.check_points(bounds)?;
        let count = space.point_count() as u64;
        let mut index = vec![UNSEEN; count as usize];
        let gens = space.generators();
        let mut buf = vec![0; space.entries()];
        let mut stack = Vec::new();
        for (k, o) in orbits.iter().enumerate() {
            if o.id as usize != k || o.rep >= count || index[o.rep as usize] != UNSEEN {
                return Err(Error::Parse(format!("orbit {} is malformed or duplicated", o.id)));
            }
            let size = close_orbit(space, &gens, o.rep, o.id, &mut index, &mut stack, &mut buf);
            if size != o.size {
                return Err(Error::Parse(format!(
                    "orbit {} has size {size}, recorded {}",
                    o.id, o.size
                )));
            }
        }
        if index.contains(&UNSEEN) {
            return Err(Error::Parse("orbits do not cover the space".into()));
        }
        let table = OrbitTable {
            space: space.clone(),
            orbits,
            index,
        };
        if table.orbits.iter().any(|o| table.min_code(o.id) != o.rep) {
            return Err(Error::Parse(
                "representative is not the least point of its orbit".into(),
            ));
        }
        Ok(table)
    }

    fn min_code(&self, id: u32) -> u64 {
        self.index
            .iter()
            .position(|&i| i == id)
            .map(|p| p as u64)
            .unwrap_or(u64::MAX)
    }

    pub fn space(&self) -> &RepSpace {
        &self.space
    }

    pub fn dim(&self) -> &Dim {
        self.space.dim()
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of_code(&self, code: u64) -> u32 {
        self.index[code as usize]
    }

    pub fn orbit_of(&self, x: &RepPoint) -> Result<u32> {
        Ok(self.orbit_of_code(self.space.encode(x)?))
    }

    pub fn rep(&self, id: u32) -> RepPoint {
        self.space.decode(self.orbits[id as usize].rep)
    }

    pub fn size(&self, id: u32) -> u64 {
        self.orbits[id as usize].size
    }

    pub fn id_of_rep(&self, rep: u64) -> Option<u32> {
        self.orbits.binary_search_by_key(&rep, |o| o.rep).ok().map(|i| i as u32)
    }

    /// Codes of every point in orbit `id`.
    pub fn members(&self, id: u32) -> Vec<u64> {
        self.index
            .iter()
            .enumerate()
            .filter(|(_, &i)| i == id)
            .map(|(c, _)| c as u64)
            .collect()
    }

    /// Checks that sizes sum to `#E_V` and divide `#G_V`.
    pub fn check_invariants(&self) -> bool {
        let total: u128 = self.orbits.iter().map(|o| o.size as u128).sum();
        let g = self.space.group_order();
        total == self.space.point_count() && self.orbits.iter().all(|o| g.is_multiple_of(o.size as u128))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = &self.space.quiver;
        serde_json::json!({
            "q": self.space.field.q(),
            "dim": dim_to_map(q, &self.space.dim),
            "orbits": self.orbits.iter().map(|o| {
                let x = self.space.decode(o.rep);
                let mats: BTreeMap<String, Vec<Vec<Elem>>> = q
                    .edges()
                    .iter()
                    .zip(&x.mats)
                    .map(|(e, m)| (e.id.clone(), m.to_rows()))
                    .collect();
                serde_json::json!({"id": o.id, "rep": o.rep.to_string(), "size": o.size, "matrices": mats})
            }).collect::<Vec<_>>(),
        })
    }

    /// Reads the output of [`OrbitTable::to_json`] and rebuilds the point index.
    pub fn from_json(space: &RepSpace, value: &serde_json::Value, bounds: &Bounds) -> Result<OrbitTable> {
        let bad = |m: &str| Error::Parse(format!("orbit table: {m}"));
        if value["q"].as_u64() != Some(space.field.q() as u64) {
            return Err(bad("field differs"));
        }
        let dim_map: BTreeMap<String, usize> =
            serde_json::from_value(value["dim"].clone()).map_err(|e| bad(&e.to_string()))?;
        if dim_from_map(&space.quiver, &dim_map)? != space.dim {
            return Err(bad("dimension differs"));
        }
        let list = value["orbits"].as_array().ok_or_else(|| bad("missing orbits"))?;
        let orbits = list
            .iter()
            .map(|o| {
                Ok(Orbit {
                    id: o["id"].as_u64().ok_or_else(|| bad("id"))? as u32,
                    rep: o["rep"]
                        .as_str()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("rep"))?,
                    size: o["size"].as_u64().ok_or_else(|| bad("size"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        OrbitTable::from_orbits(space, orbits, bounds)
    }
}

fn close_orbit(
    space: &RepSpace,
    gens: &[Generator],
    start: u64,
    id: u32,
    index: &mut [u32],
    stack: &mut Vec<u64>,
    buf: &mut [Elem],
) -> u64 {
    index[start as usize] = id;
    stack.clear();
    stack.push(start);
    let mut size = 0;
    let mut work = vec![0; buf.len()];
    while let Some(c) = stack.pop() {
        size += 1;
        space.decode_flat(c, buf);
        for g in gens {
            work.copy_from_slice(buf);
            space.apply_generator(g, &mut work);
            let n = space.encode_flat(&work);
            if index[n as usize] == UNSEEN {
                index[n as usize] = id;
                stack.push(n);
            }
        }
    }
    size
}

/// The point-level contraction `μ`: data attached to contracting one edge `e`
/// between two vertices, for the identity automorphism.
#[derive(Debug, Clone)]
pub struct PointContraction {
    original: Arc<Quiver>,
    contracted: Arc<Quiver>,
    cq: ContractedQuiver,
    plus: usize,
    minus: usize,
    edge: usize,
}

impl PointContraction {
    pub fn new(q: &Quiver, a: &Automorphism, pair: &OrbitPair) -> Result<Self> {
        if !a.is_identity() {
            return Err(Error::NontrivialAutomorphism);
        }
        let cq = contract_quiver(q, a, pair)?;
        Ok(PointContraction {
            original: Arc::new(q.clone()),
            contracted: Arc::new(cq.quiver.clone()),
            plus: cq.plus_orbit[0],
            minus: cq.minus_orbit[0],
            edge: cq.contraction_edges[0],
            cq,
        })
    }

    pub fn original(&self) -> &Arc<Quiver> {
        &self.original
    }

    pub fn contracted(&self) -> &Arc<Quiver> {
        &self.contracted
    }

    pub fn contracted_quiver(&self) -> &ContractedQuiver {
        &self.cq
    }

    /// Vertex indices `(i₊, i₋)` and the contraction edge `e`, in the original quiver.
    pub fn plus(&self) -> usize {
        self.plus
    }

    pub fn minus(&self) -> usize {
        self.minus
    }

    pub fn edge(&self) -> usize {
        self.edge
    }

    pub fn swapped(&self) -> bool {
        self.cq.swapped
    }

    /// Index of the merged vertex in the contracted quiver.
    pub fn merged(&self) -> usize {
        self.cq
            .vertex_origin
            .iter()
            .position(|&v| v == self.plus)
            .expect("plus survives")
    }

    /// Balanced lift `ν̂ ↦ ν` with `ν_{i₊} = ν_{i₋} = ν̂_{i₀}`.
    pub fn lift_dim(&self, nu_hat: &[usize]) -> Result<Dim> {
        if nu_hat.len() != self.contracted.num_vertices() {
            return Err(Error::DimMismatch(
                "dimension does not match the contracted quiver".into(),
            ));
        }
        let mut d = vec![0; self.original.num_vertices()];
        for (k, &v) in self.cq.vertex_origin.iter().enumerate() {
            d[v] = nu_hat[k];
        }
        d[self.minus] = d[self.plus];
        Ok(d)
    }

    pub fn is_balanced(&self, nu: &[usize]) -> bool {
        nu.len() == self.original.num_vertices() && nu[self.plus] == nu[self.minus]
    }

    /// Inverse of [`PointContraction::lift_dim`] on balanced dimensions.
    pub fn restrict_dim(&self, nu: &[usize]) -> Result<Dim> {
        if !self.is_balanced(nu) {
            return Err(Error::Unbalanced(format!("{nu:?}")));
        }
        Ok(self.cq.vertex_origin.iter().map(|&v| nu[v]).collect())
    }

    pub fn is_heart(&self, x: &RepPoint, f: &Field) -> Result<bool> {
        if !self.is_balanced(&x.dim) {
            return Err(Error::Unbalanced(format!("{:?}", x.dim)));
        }
        Ok(x.mats[self.edge].is_invertible(f))
    }

    /// `x ↦ x̂`: kept edges copy, `l₁h ↦ x_{l₁}x_h`, `h̄l₂ ↦ x_h^{-1}x_{l₂}`.
    pub fn contract_point(&self, x: &RepPoint, f: &Field) -> Result<RepPoint> {
        if !self.is_heart(x, f)? {
            return Err(Error::NotHeart);
        }
        let xe_inv = x.mats[self.edge].inverse(f)?;
        let mats = self
            .cq
            .provenance
            .iter()
            .map(|p| match *p {
                Provenance::Kept { edge } => Ok(x.mats[edge].clone()),
                Provenance::Post { l1, h } => x.mats[l1].mul(&x.mats[h], f),
                Provenance::Pre { l2, .. } => xe_inv.mul(&x.mats[l2], f),
            })
            .collect::<Result<_>>()?;
        Ok(RepPoint {
            dim: self.restrict_dim(&x.dim)?,
            mats,
        })
    }

    /// The heart points over `x̂`, one per choice of invertible `x_e`.
    pub fn fiber_of_contraction(&self, x_hat: &RepPoint, f: &Field, bounds: &Bounds) -> Result<Vec<RepPoint>> {
        let nu = self.lift_dim(&x_hat.dim)?;
        let n = nu[self.plus];
        let mut slot: Vec<Option<usize>> = vec![None; self.original.num_edges()];
        for (k, p) in self.cq.provenance.iter().enumerate() {
            match *p {
                Provenance::Kept { edge } => slot[edge] = Some(k),
                Provenance::Post { l1, .. } => slot[l1] = Some(k),
                Provenance::Pre { l2, .. } => slot[l2] = Some(k),
            }
        }
        let mut out = Vec::new();
        for a in enumerate_gl(n, f, bounds)? {
            let a_inv = a.inverse(f)?;
            let mats = (0..self.original.num_edges())
                .map(|e| {
                    if e == self.edge {
                        return Ok(a.clone());
                    }
                    let k = slot[e].expect("every other edge has a contracted image");
                    let m = &x_hat.mats[k];
                    match self.cq.provenance[k] {
                        Provenance::Kept { .. } => Ok(m.clone()),
                        Provenance::Post { .. } => m.mul(&a_inv, f),
                        Provenance::Pre { .. } => a.mul(m, f),
                    }
                })
                .collect::<Result<_>>()?;
            out.push(RepPoint { dim: nu.clone(), mats });
        }
        Ok(out)
    }

    /// Sweeps every point of `E_ν` (ν the lift of `nu_hat`) and counts heart points
    /// over each contracted point code.
    pub fn fiber_census(&self, nu_hat: &[usize], f: &Arc<Field>, bounds: &Bounds) -> Result<BTreeMap<u64, u64>> {
        let full = RepSpace::new(self.original.clone(), f.clone(), self.lift_dim(nu_hat)?)?;
        let small = RepSpace::new(self.contracted.clone(), f.clone(), nu_hat.to_vec())?;
        let mut census = BTreeMap::new();
        for x in full.enumerate_points(bounds)? {
            if self.is_heart(&x, f)? {
                let c = small.encode(&self.contract_point(&x, f)?)?;
                *census.entry(c).or_insert(0) += 1;
            }
        }
        Ok(census)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Automorphism;

    fn field(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    fn jordan() -> Arc<Quiver> {
        Arc::new(Quiver::from_parts(&["i"], &[("l", "i", "i")]).unwrap())
    }

    fn kronecker() -> Arc<Quiver> {
        Arc::new(Quiver::from_parts(&["p", "m"], &[("e", "p", "m"), ("f", "p", "m")]).unwrap())
    }

    fn m(rows: &[Vec<Elem>]) -> FMatrix {
        FMatrix::from_rows(rows).unwrap()
    }

    fn sizes(t: &OrbitTable) -> Vec<u64> {
        let mut v: Vec<u64> = t.orbits().iter().map(|o| o.size).collect();
        v.sort();
        v
    }

    #[test]
    fn point_counts() {
        let b = Bounds::default();
        let s = RepSpace::new(jordan(), field(2), vec![1]).unwrap();
        assert_eq!(s.enumerate_points(&b).unwrap().count(), 2);
        let s = RepSpace::new(kronecker(), field(2), vec![1, 1]).unwrap();
        assert_eq!(s.enumerate_points(&b).unwrap().count(), 4);
        let s = RepSpace::new(jordan(), field(2), vec![2]).unwrap();
        assert_eq!(s.enumerate_points(&b).unwrap().count(), 16);
    }

    #[test]
    fn encode_round_trip() {
        let s = RepSpace::new(kronecker(), field(3), vec![2, 1]).unwrap();
        for c in [0, 1, 17, 80] {
            assert_eq!(s.encode(&s.decode(c)).unwrap(), c);
        }
    }

    #[test]
    fn action_examples() {
        let f = field(2);
        let s = RepSpace::new(jordan(), f.clone(), vec![2]).unwrap();
        let x = RepPoint {
            dim: vec![2],
            mats: vec![m(&[vec![0, 1], vec![0, 0]])],
        };
        assert_eq!(s.act(&GroupElement::identity(&[2]), &x).unwrap(), x);
        let g = GroupElement {
            mats: vec![m(&[vec![0, 1], vec![1, 0]])],
        };
        assert_eq!(s.act(&g, &x).unwrap().mats[0], m(&[vec![0, 0], vec![1, 0]]));

        let f3 = field(3);
        let s = RepSpace::new(kronecker(), f3, vec![1, 1]).unwrap();
        let x = RepPoint {
            dim: vec![1, 1],
            mats: vec![m(&[vec![1]]), m(&[vec![2]])],
        };
        let g = GroupElement {
            mats: vec![m(&[vec![1]]), m(&[vec![2]])],
        };
        let y = s.act(&g, &x).unwrap();
        assert_eq!(y.mats, vec![m(&[vec![2]]), m(&[vec![1]])]);
    }

    #[test]
    fn action_laws() {
        let f = field(3);
        let s = RepSpace::new(kronecker(), f.clone(), vec![2, 1]).unwrap();
        let b = Bounds::default();
        let group = s.enumerate_group(&b).unwrap();
        let x = s.decode(437);
        for (g, h) in group.iter().step_by(17).zip(group.iter().step_by(23)) {
            let lhs = s.act(g, &s.act(h, &x).unwrap()).unwrap();
            let rhs = s.act(&g.compose(h, &f).unwrap(), &x).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jordan_orbits() {
        let s = RepSpace::new(jordan(), field(2), vec![2]).unwrap();
        let t = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Auto).unwrap();
        assert_eq!(sizes(&t), vec![1, 1, 2, 3, 3, 6]);
        assert!(t.check_invariants());
    }

    #[test]
    fn kronecker_orbits() {
        let s = RepSpace::new(kronecker(), field(3), vec![1, 1]).unwrap();
        let t = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Auto).unwrap();
        assert_eq!(sizes(&t), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn zero_dim_has_one_orbit() {
        let s = RepSpace::new(kronecker(), field(2), vec![0, 0]).unwrap();
        let t = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Auto).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.size(0), 1);
    }

    #[test]
    fn sweep_and_closure_agree() {
        let b = Bounds::default();
        for (q, quiver, dim) in [
            (2, jordan(), vec![2]),
            (3, jordan(), vec![2]),
            (4, jordan(), vec![2]),
            (2, jordan(), vec![3]),
            (2, kronecker(), vec![2, 2]),
            (3, kronecker(), vec![1, 2]),
        ] {
            let s = RepSpace::new(quiver, field(q), dim).unwrap();
            let a = OrbitTable::compute(&s, &b, OrbitMethod::Sweep).unwrap();
            let c = OrbitTable::compute(&s, &b, OrbitMethod::Closure).unwrap();
            assert_eq!(a.orbits(), c.orbits());
            assert_eq!(a.index, c.index);
            assert!(a.check_invariants());
        }
    }

    #[test]
    fn representatives_are_least() {
        let s = RepSpace::new(kronecker(), field(2), vec![2, 1]).unwrap();
        let t = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Auto).unwrap();
        for o in t.orbits() {
            assert_eq!(t.members(o.id)[0], o.rep);
        }
    }

    #[test]
    fn json_round_trip() {
        let b = Bounds::default();
        let s = RepSpace::new(jordan(), field(3), vec![2]).unwrap();
        let t = OrbitTable::compute(&s, &b, OrbitMethod::Auto).unwrap();
        let back = OrbitTable::from_json(&s, &t.to_json(), &b).unwrap();
        assert_eq!(back.orbits(), t.orbits());
        assert_eq!(back.index, t.index);
    }

    #[test]
    fn bounds_are_enforced() {
        let s = RepSpace::new(jordan(), field(3), vec![4]).unwrap();
        let b = Bounds {
            max_points: 1000,
            max_group: 10,
        };
        assert!(matches!(
            OrbitTable::compute(&s, &b, OrbitMethod::Auto),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn stable_subspace_examples() {
        let f = field(2);
        let s = RepSpace::new(jordan(), f.clone(), vec![2]).unwrap();
        let b = Bounds::default();
        let point = |rows: &[Vec<Elem>]| RepPoint {
            dim: vec![2],
            mats: vec![m(rows)],
        };
        let nil = point(&[vec![0, 1], vec![0, 0]]);
        let st = s.stable_subspaces(&nil, &[1], &b).unwrap();
        assert_eq!(st.len(), 1);
        assert_eq!(st[0].basis[0], m(&[vec![1, 0]]));
        assert_eq!(
            s.stable_subspaces(&point(&[vec![0, 0], vec![0, 0]]), &[1], &b)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            s.stable_subspaces(&point(&[vec![1, 0], vec![0, 1]]), &[1], &b)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            s.stable_subspaces(&point(&[vec![0, 1], vec![1, 1]]), &[1], &b)
                .unwrap()
                .len(),
            0
        );
    }

    #[test]
    fn extension_counts() {
        let b = Bounds::default();
        let a1 = Arc::new(Quiver::from_parts(&["i"], &[]).unwrap());
        let s = RepSpace::new(a1.clone(), field(2), vec![2]).unwrap();
        let pt = |q: &Arc<Quiver>, d: Dim| RepSpace::new(q.clone(), field(2), d).unwrap().zero_point();
        assert_eq!(
            s.extensions_over(&pt(&a1, vec![1]), &pt(&a1, vec![1]), &b)
                .unwrap()
                .len(),
            1
        );

        let s = RepSpace::new(jordan(), field(2), vec![2]).unwrap();
        let ext = s
            .extensions_over(&pt(&jordan(), vec![1]), &pt(&jordan(), vec![1]), &b)
            .unwrap();
        assert_eq!(ext.len(), 2);
        assert!(ext.iter().all(|x| s
            .stable_subspaces(x, &[1], &b)
            .unwrap()
            .iter()
            .any(|u| u.basis[0] == m(&[vec![0, 1]]))));

        let s = RepSpace::new(kronecker(), field(2), vec![2, 2]).unwrap();
        let ext = s
            .extensions_over(&pt(&kronecker(), vec![1, 1]), &pt(&kronecker(), vec![1, 1]), &b)
            .unwrap();
        assert_eq!(ext.len(), 4);
    }

    fn contraction() -> PointContraction {
        let q = kronecker();
        PointContraction::new(&q, &Automorphism::identity(&q), &OrbitPair::new("p", "m")).unwrap()
    }

    #[test]
    fn heart_examples() {
        let f = field(2);
        let c = contraction();
        let x = |e: Elem, g: Elem| RepPoint {
            dim: vec![1, 1],
            mats: vec![m(&[vec![e]]), m(&[vec![g]])],
        };
        assert!(c.is_heart(&x(1, 0), &f).unwrap());
        assert!(!c.is_heart(&x(0, 1), &f).unwrap());
        let empty = RepSpace::new(kronecker(), f.clone(), vec![0, 0]).unwrap().zero_point();
        assert!(c.is_heart(&empty, &f).unwrap());
        assert_eq!(c.contract_point(&x(1, 0), &f).unwrap().mats[0], m(&[vec![0]]));
        assert_eq!(c.contract_point(&x(1, 1), &f).unwrap().mats[0], m(&[vec![1]]));
        assert_eq!(c.contract_point(&x(0, 1), &f), Err(Error::NotHeart));
        let unbalanced = RepSpace::new(kronecker(), f.clone(), vec![1, 0]).unwrap().zero_point();
        assert!(matches!(c.is_heart(&unbalanced, &f), Err(Error::Unbalanced(_))));
    }

    #[test]
    fn identity_edge_contracts_to_other_edge() {
        let f = field(2);
        let c = contraction();
        let a = m(&[vec![1, 1], vec![0, 1]]);
        let x = RepPoint {
            dim: vec![2, 2],
            mats: vec![FMatrix::identity(2), a.clone()],
        };
        assert_eq!(c.contract_point(&x, &f).unwrap().mats, vec![a]);
    }

    #[test]
    fn fibers_have_gl_size() {
        let b = Bounds::default();
        let c = contraction();
        for (q, n, expected) in [(2, 1, 1), (3, 1, 2), (2, 2, 6)] {
            let f = field(q);
            let small = RepSpace::new(c.contracted().clone(), f.clone(), vec![n]).unwrap();
            for x_hat in small.enumerate_points(&b).unwrap() {
                let fiber = c.fiber_of_contraction(&x_hat, &f, &b).unwrap();
                assert_eq!(fiber.len(), expected);
                for x in &fiber {
                    assert_eq!(c.contract_point(x, &f).unwrap(), x_hat);
                }
            }
            let census = c.fiber_census(&[n], &f, &b).unwrap();
            assert_eq!(census.len() as u128, small.point_count());
            assert!(census.values().all(|&k| k == expected as u64));
        }
    }

    #[test]
    fn nontrivial_automorphism_is_rejected() {
        let q = Quiver::from_parts(&["u0", "u1", "v0", "v1"], &[("e0", "u0", "v0"), ("e1", "u1", "v1")]).unwrap();
        let a = Automorphism::new(&q, vec![1, 0, 3, 2], vec![1, 0]).unwrap();
        assert_eq!(
            PointContraction::new(&q, &a, &OrbitPair::new("u0", "v0")).unwrap_err(),
            Error::NontrivialAutomorphism
        );
    }
}
