//! Hall algebras `H_Ω` of `G_V`-invariant functions on `E_V(F_q)` with exact
//! `Q(√q)` coefficients: twisted induction product, restriction, coproduct.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ffalg::{Bounds, Field};
use crate::quiver::Quiver;
use crate::repspace::{dim_add, dim_from_map, dim_to_map, dims_below, Dim, OrbitMethod, OrbitTable, RepSpace};
use crate::scalar::SqrtQ;

/// Persistent storage for orbit tables.
pub trait OrbitStore: Send + Sync {
    fn load(&self, space: &RepSpace, bounds: &Bounds) -> Result<Option<OrbitTable>>;
    fn save(&self, table: &OrbitTable) -> Result<()>;
}

/// A PBW index: graded dimension and orbit id.
pub type Key = (Dim, u32);

/// `(quotient orbit, sub orbit) -> [(target orbit, count)]` for a fixed splitting `(τ, ω)`.
pub type PairCounts = HashMap<(u32, u32), Vec<(u32, u64)>>;

/// Hex digest identifying a quiver.
pub fn quiver_hash(q: &Quiver) -> String {
    hex::encode(Sha256::digest(q.canonical_json().as_bytes()))
}

/// `Σ_i τ_i ω_i + Σ_h τ_{h'} ω_{h''}`.
pub fn m_omega(q: &Quiver, tau: &[usize], omega: &[usize]) -> i64 {
    vertex_sum(tau, omega) + edge_sum(q, tau, omega)
}

/// `-Σ_i τ_i ω_i + Σ_h τ_{h'} ω_{h''}`.
pub fn m_star_omega(q: &Quiver, tau: &[usize], omega: &[usize]) -> i64 {
    -vertex_sum(tau, omega) + edge_sum(q, tau, omega)
}

fn vertex_sum(tau: &[usize], omega: &[usize]) -> i64 {
    tau.iter().zip(omega).map(|(a, b)| (a * b) as i64).sum()
}

fn edge_sum(q: &Quiver, tau: &[usize], omega: &[usize]) -> i64 {
    (0..q.num_edges())
        .map(|e| {
            let (s, t) = q.ends(e);
            (tau[s] * omega[t]) as i64
        })
        .sum()
}

/// An element of `H_Ω`, stored by PBW coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallElement {
    context: String,
    q: u32,
    terms: BTreeMap<Key, SqrtQ>,
}

impl HallElement {
    fn empty(context: &str, q: u32) -> Self {
        HallElement {
            context: context.to_string(),
            q,
            terms: BTreeMap::new(),
        }
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn terms(&self) -> &BTreeMap<Key, SqrtQ> {
        &self.terms
    }

    pub fn coeff(&self, key: &Key) -> SqrtQ {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Key, c: &SqrtQ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_default();
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check_context(&self, other: &HallElement) -> Result<()> {
        if self.context != other.context || self.q != other.q {
            return Err(Error::ContextMismatch(format!(
                "{}@{} vs {}@{}",
                self.context, self.q, other.context, other.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HallElement) -> Result<HallElement> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HallElement) -> Result<HallElement> {
        self.add(&other.scale(&SqrtQ::from_int(-1)))
    }

    pub fn scale(&self, c: &SqrtQ) -> HallElement {
        let mut out = HallElement::empty(&self.context, self.q);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.mul(c, self.q));
        }
        out
    }

    /// Graded dimensions carrying nonzero terms.
    pub fn dims(&self) -> Vec<Dim> {
        let mut d: Vec<Dim> = self.terms.keys().map(|(d, _)| d.clone()).collect();
        d.dedup();
        d
    }

    pub fn homogeneous(&self, dim: &[usize]) -> HallElement {
        HallElement {
            context: self.context.clone(),
            q: self.q,
            terms: self
                .terms
                .iter()
                .filter(|((d, _), _)| d.as_slice() == dim)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn with_terms(&self, terms: BTreeMap<Key, SqrtQ>) -> HallElement {
        HallElement {
            context: self.context.clone(),
            q: self.q,
            terms,
        }
    }
}

/// An element of `H_Ω ⊗ H_Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    context: String,
    q: u32,
    terms: BTreeMap<(Key, Key), SqrtQ>,
}

impl TensorElement {
    fn empty(context: &str, q: u32) -> Self {
        TensorElement {
            context: context.to_string(),
            q,
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Key, Key), SqrtQ> {
        &self.terms
    }

    pub fn coeff(&self, left: &Key, right: &Key) -> SqrtQ {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: (Key, Key), c: &SqrtQ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_default();
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        if self.context != other.context || self.q != other.q {
            return Err(Error::ContextMismatch("tensor elements from different algebras".into()));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        let mut neg = other.clone();
        for c in neg.terms.values_mut() {
            *c = c.neg();
        }
        self.add(&neg)
    }
}

/// `H_Ω` over `F_q` for a quiver with the identity automorphism.
pub struct HallAlgebra {
    quiver: Arc<Quiver>,
    field: Arc<Field>,
    bounds: Bounds,
    context: String,
    form: Vec<Vec<i64>>,
    store: Option<Arc<dyn OrbitStore>>,
    tables: Mutex<HashMap<Dim, Arc<OrbitTable>>>,
    splits: Mutex<HashMap<(Dim, Dim), Arc<PairCounts>>>,
    extensions: Mutex<HashMap<(Dim, Dim), Arc<PairCounts>>>,
}

impl std::fmt::Debug for HallAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HallAlgebra({}, F_{})", self.context, self.field.q())
    }
}

impl HallAlgebra {
    pub fn new(quiver: Quiver, q: u64, bounds: Bounds) -> Result<Self> {
        let field = Arc::new(Field::new(q)?);
        let context = quiver_hash(&quiver);
        let form = quiver.vertex_form();
        Ok(HallAlgebra {
            quiver: Arc::new(quiver),
            field,
            bounds,
            context,
            form,
            store: None,
            tables: Mutex::new(HashMap::new()),
            splits: Mutex::new(HashMap::new()),
            extensions: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_store(mut self, store: Arc<dyn OrbitStore>) -> Self {
        self.store = Some(store);
        self
    }

    /// A Hall algebra of another quiver over the same field, bounds and store.
    pub fn sibling(&self, quiver: Quiver) -> Result<HallAlgebra> {
        let mut h = HallAlgebra::new(quiver, self.q() as u64, self.bounds)?;
        h.store = self.store.clone();
        Ok(h)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn space(&self, dim: &[usize]) -> Result<RepSpace> {
        RepSpace::new(self.quiver.clone(), self.field.clone(), dim.to_vec())
    }

    pub fn orbits(&self, dim: &[usize]) -> Result<Arc<OrbitTable>> {
        if let Some(t) = self.tables.lock().expect("table lock").get(dim) {
            return Ok(t.clone());
        }
        let space = self.space(dim)?;
        let loaded = match &self.store {
            Some(s) => s.load(&space, &self.bounds)?,
            None => None,
        };
        let table = match loaded {
            Some(t) => t,
            None => {
                let t = OrbitTable::compute(&space, &self.bounds, OrbitMethod::Auto)?;
                if let Some(s) = &self.store {
                    s.save(&t)?;
                }
                t
            }
        };
        let table = Arc::new(table);
        self.tables
            .lock()
            .expect("table lock")
            .insert(dim.to_vec(), table.clone());
        Ok(table)
    }

    /// The symmetric vertex form `ν·μ`.
    pub fn dot(&self, a: &[usize], b: &[usize]) -> i64 {
        let mut s = 0;
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                s += (x * y) as i64 * self.form[i][j];
            }
        }
        s
    }

    pub fn m_omega(&self, tau: &[usize], omega: &[usize]) -> i64 {
        m_omega(&self.quiver, tau, omega)
    }

    pub fn m_star_omega(&self, tau: &[usize], omega: &[usize]) -> i64 {
        m_star_omega(&self.quiver, tau, omega)
    }

    pub fn zero(&self) -> HallElement {
        HallElement::empty(&self.context, self.q())
    }

    pub fn zero_tensor(&self) -> TensorElement {
        TensorElement::empty(&self.context, self.q())
    }

    pub fn zero_dim(&self) -> Dim {
        vec![0; self.quiver.num_vertices()]
    }

    pub fn unit(&self) -> HallElement {
        let mut u = self.zero();
        u.add_term((self.zero_dim(), 0), &SqrtQ::one());
        u
    }

    /// The characteristic function `P_O` of orbit `orbit` at `dim`.
    pub fn char_function(&self, dim: &[usize], orbit: u32) -> Result<HallElement> {
        let t = self.orbits(dim)?;
        if orbit as usize >= t.len() {
            return Err(Error::UnknownOrbit {
                dim: format!("{dim:?}"),
                orbit: orbit.to_string(),
            });
        }
        let mut f = self.zero();
        f.add_term((dim.to_vec(), orbit), &SqrtQ::one());
        Ok(f)
    }

    /// PBW keys at `dim`.
    pub fn basis_keys(&self, dim: &[usize]) -> Result<Vec<Key>> {
        let t = self.orbits(dim)?;
        Ok((0..t.len() as u32).map(|o| (dim.to_vec(), o)).collect())
    }

    /// PBW keys at every dimension `<= max` per vertex.
    pub fn basis_keys_below(&self, max: &[usize]) -> Result<Vec<Key>> {
        let mut out = Vec::new();
        for d in dims_below(max) {
            out.extend(self.basis_keys(&d)?);
        }
        Ok(out)
    }

    pub fn basis_element(&self, key: &Key) -> Result<HallElement> {
        self.char_function(&key.0, key.1)
    }

    fn check(&self, f: &HallElement) -> Result<()> {
        if f.context != self.context || f.q != self.q() {
            return Err(Error::ContextMismatch(format!(
                "element of {}@{} used with {}@{}",
                f.context,
                f.q,
                self.context,
                self.q()
            )));
        }
        Ok(())
    }

    /// Structure data of `⋆` for target `τ + ω`: for each target orbit rep `y` and
    /// `y`-stable `U` of dimension `ω`, the orbits of `y^{V/U}` and `y^U`.
    pub fn split_table(&self, tau: &[usize], omega: &[usize]) -> Result<Arc<PairCounts>> {
        let key = (tau.to_vec(), omega.to_vec());
        if let Some(t) = self.splits.lock().expect("split lock").get(&key) {
            return Ok(t.clone());
        }
        let nu = dim_add(tau, omega);
        let tn = self.orbits(&nu)?;
        let tt = self.orbits(tau)?;
        let tw = self.orbits(omega)?;
        let space = tn.space();
        let mut table: PairCounts = HashMap::new();
        let g = space.sample_group_element();
        for o in tn.orbits() {
            let y = tn.rep(o.id);
            let local = self.split_counts(space, &y, omega, &tt, &tw)?;
            if cfg!(debug_assertions) {
                let y2 = space.act(&g, &y)?;
                debug_assert_eq!(local, self.split_counts(space, &y2, omega, &tt, &tw)?);
            }
            for (pair, n) in local {
                table.entry(pair).or_default().push((o.id, n));
            }
        }
        let table = Arc::new(table);
        self.splits.lock().expect("split lock").insert(key, table.clone());
        Ok(table)
    }

    fn split_counts(
        &self,
        space: &RepSpace,
        y: &crate::repspace::RepPoint,
        omega: &[usize],
        tt: &OrbitTable,
        tw: &OrbitTable,
    ) -> Result<BTreeMap<(u32, u32), u64>> {
        let mut local = BTreeMap::new();
        for s in space.stable_subspaces(y, omega, &self.bounds)? {
            let a = tt.orbit_of(&s.quotient)?;
            let b = tw.orbit_of(&s.sub)?;
            *local.entry((a, b)).or_insert(0) += 1;
        }
        Ok(local)
    }

    /// Extension data for `τ + ω`: for each pair of representatives, the orbits of
    /// all points inducing them with the last `ω` coordinates stable.
    pub fn extension_table(&self, tau: &[usize], omega: &[usize]) -> Result<Arc<PairCounts>> {
        let key = (tau.to_vec(), omega.to_vec());
        if let Some(t) = self.extensions.lock().expect("extension lock").get(&key) {
            return Ok(t.clone());
        }
        let nu = dim_add(tau, omega);
        let tn = self.orbits(&nu)?;
        let tt = self.orbits(tau)?;
        let tw = self.orbits(omega)?;
        let space = tn.space();
        let mut table: PairCounts = HashMap::new();
        for a in tt.orbits() {
            let xt = tt.rep(a.id);
            for b in tw.orbits() {
                let xw = tw.rep(b.id);
                let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
                for x in space.extensions_over(&xt, &xw, &self.bounds)? {
                    *counts.entry(tn.orbit_of(&x)?).or_insert(0) += 1;
                }
                table.insert((a.id, b.id), counts.into_iter().collect());
            }
        }
        let table = Arc::new(table);
        self.extensions
            .lock()
            .expect("extension lock")
            .insert(key, table.clone());
        Ok(table)
    }

    fn product(&self, f: &HallElement, g: &HallElement, twisted: bool) -> Result<HallElement> {
        self.check(f)?;
        self.check(g)?;
        let q = self.q();
        let mut out = self.zero();
        for ((tau, a), c1) in &f.terms {
            for ((omega, b), c2) in &g.terms {
                let table = self.split_table(tau, omega)?;
                let Some(list) = table.get(&(*a, *b)) else {
                    continue;
                };
                let mut c = c1.mul(c2, q);
                if twisted {
                    c = c.mul(&SqrtQ::q_half_pow(-self.m_omega(tau, omega), q), q);
                }
                let nu = dim_add(tau, omega);
                for &(o, n) in list {
                    out.add_term((nu.clone(), o), &c.scale_int(n as i64));
                }
            }
        }
        Ok(out)
    }

    /// The untwisted induction product `f ⋆ g`.
    pub fn star(&self, f: &HallElement, g: &HallElement) -> Result<HallElement> {
        self.product(f, g, false)
    }

    /// `f ∘ g = q^{-m_Ω(τ,ω)/2} (f ⋆ g)` on homogeneous parts.
    pub fn circ(&self, f: &HallElement, g: &HallElement) -> Result<HallElement> {
        self.product(f, g, true)
    }

    /// `f ⋆ g` by enumerating all `g ∈ G_V` with `g·y` preserving the last
    /// coordinates, divided by the order of their stabilizer.
    pub fn diagram_star_oracle(&self, f: &HallElement, g: &HallElement) -> Result<HallElement> {
        self.check(f)?;
        self.check(g)?;
        let q = self.q();
        let mut out = self.zero();
        for tau in f.dims() {
            for omega in g.dims() {
                let fh = f.homogeneous(&tau);
                let gh = g.homogeneous(&omega);
                let nu = dim_add(&tau, &omega);
                let tn = self.orbits(&nu)?;
                let tt = self.orbits(&tau)?;
                let tw = self.orbits(&omega)?;
                let space = tn.space();
                let group = space.enumerate_group(&self.bounds)?;
                let parabolic: u128 = tau
                    .iter()
                    .zip(&omega)
                    .map(|(&t, &w)| self.field.gl_order(t) * self.field.gl_order(w) * (q as u128).pow((t * w) as u32))
                    .product();
                for o in tn.orbits() {
                    let y = tn.rep(o.id);
                    let mut total = SqrtQ::zero();
                    for gr in &group {
                        let z = space.act(gr, &y)?;
                        let mut quot = Vec::with_capacity(z.mats.len());
                        let mut sub = Vec::with_capacity(z.mats.len());
                        let mut inside = true;
                        for (e, m) in z.mats.iter().enumerate() {
                            let (s, t) = self.quiver.ends(e);
                            match m.block_extract(tau[s], tau[t]) {
                                Ok((qm, sm, _)) => {
                                    quot.push(qm);
                                    sub.push(sm);
                                }
                                Err(_) => {
                                    inside = false;
                                    break;
                                }
                            }
                        }
                        if !inside {
                            continue;
                        }
                        let a = tt.orbit_of(&crate::repspace::RepPoint {
                            dim: tau.clone(),
                            mats: quot,
                        })?;
                        let b = tw.orbit_of(&crate::repspace::RepPoint {
                            dim: omega.clone(),
                            mats: sub,
                        })?;
                        let fa = fh.coeff(&(tau.clone(), a));
                        let gb = gh.coeff(&(omega.clone(), b));
                        total = total.add(&fa.mul(&gb, q));
                    }
                    let value = total.scale_ratio(&1.into(), &num::BigInt::from(parabolic));
                    out.add_term((nu.clone(), o.id), &value);
                }
            }
        }
        Ok(out)
    }

    /// `Res^ν_{τ,ω}(f) = q^{-m*(τ,ω)/2} κ_! ι^* f` for `f` homogeneous of dimension `τ + ω`.
    pub fn res(&self, f: &HallElement, tau: &[usize], omega: &[usize]) -> Result<TensorElement> {
        self.check(f)?;
        let nu = dim_add(tau, omega);
        if let Some(d) = f.dims().into_iter().find(|d| *d != nu) {
            return Err(Error::DimMismatch(format!(
                "restriction to {tau:?} + {omega:?} of an element of dim {d:?}"
            )));
        }
        let q = self.q();
        let mut out = TensorElement::empty(&self.context, q);
        if f.is_zero() {
            return Ok(out);
        }
        let twist = SqrtQ::q_half_pow(-self.m_star_omega(tau, omega), q);
        let table = self.extension_table(tau, omega)?;
        let mut pairs: Vec<_> = table.iter().collect();
        pairs.sort_by_key(|(k, _)| **k);
        for (&(a, b), list) in pairs {
            let mut sum = SqrtQ::zero();
            for &(o, n) in list {
                sum = sum.add(&f.coeff(&(nu.clone(), o)).scale_int(n as i64));
            }
            out.add_term(((tau.to_vec(), a), (omega.to_vec(), b)), &sum.mul(&twist, q));
        }
        Ok(out)
    }

    /// `r(f) = Σ_{τ+ω=ν} Res^ν_{τ,ω}(f)` over all homogeneous parts.
    pub fn coproduct(&self, f: &HallElement) -> Result<TensorElement> {
        self.check(f)?;
        let mut out = TensorElement::empty(&self.context, self.q());
        for nu in f.dims() {
            let part = f.homogeneous(&nu);
            for tau in dims_below(&nu) {
                let omega: Dim = nu.iter().zip(&tau).map(|(n, t)| n - t).collect();
                out = out.add(&self.res(&part, &tau, &omega)?)?;
            }
        }
        Ok(out)
    }

    /// `(f₁⊗f₂)(g₁⊗g₂) = q^{(|f₂|·|g₁|)/2} (f₁∘g₁)⊗(f₂∘g₂)`.
    pub fn tensor_mult(&self, t1: &TensorElement, t2: &TensorElement) -> Result<TensorElement> {
        for t in [t1, t2] {
            if t.context != self.context || t.q != self.q() {
                return Err(Error::ContextMismatch("tensor element from another algebra".into()));
            }
        }
        let q = self.q();
        let mut out = TensorElement::empty(&self.context, q);
        for ((f1, f2), c1) in &t1.terms {
            for ((g1, g2), c2) in &t2.terms {
                let left = self.circ(&self.basis_element(f1)?, &self.basis_element(g1)?)?;
                let right = self.circ(&self.basis_element(f2)?, &self.basis_element(g2)?)?;
                let c = c1.mul(c2, q).mul(&SqrtQ::q_half_pow(self.dot(&f2.0, &g1.0), q), q);
                for (lk, lc) in &left.terms {
                    for (rk, rc) in &right.terms {
                        out.add_term((lk.clone(), rk.clone()), &c.mul(&lc.mul(rc, q), q));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn element_to_json(&self, f: &HallElement) -> Result<serde_json::Value> {
        self.check(f)?;
        let mut terms = Vec::new();
        for ((dim, o), c) in &f.terms {
            let t = self.orbits(dim)?;
            terms.push(serde_json::json!({
                "dim": dim_to_map(&self.quiver, dim),
                "orbit": t.orbits()[*o as usize].rep.to_string(),
                "coeff": c.to_json(),
            }));
        }
        Ok(serde_json::json!({"q": self.q(), "quiver": self.context, "terms": terms}))
    }

    pub fn element_from_json(&self, v: &serde_json::Value) -> Result<HallElement> {
        let bad = |m: &str| Error::Parse(format!("hall element: {m}"));
        if v["q"].as_u64() != Some(self.q() as u64) {
            return Err(Error::ContextMismatch("element was written for another field".into()));
        }
        if let Some(h) = v["quiver"].as_str() {
            if h != self.context {
                return Err(Error::ContextMismatch("element was written for another quiver".into()));
            }
        }
        let mut f = self.zero();
        for t in v["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let dim_map: BTreeMap<String, usize> =
                serde_json::from_value(t["dim"].clone()).map_err(|e| bad(&e.to_string()))?;
            let dim = dim_from_map(&self.quiver, &dim_map)?;
            let rep_str = t["orbit"].as_str().ok_or_else(|| bad("orbit"))?;
            let rep: u64 = rep_str.parse().map_err(|_| bad("orbit"))?;
            let table = self.orbits(&dim)?;
            let id = table.id_of_rep(rep).ok_or_else(|| Error::UnknownOrbit {
                dim: format!("{dim:?}"),
                orbit: rep_str.to_string(),
            })?;
            f.add_term((dim, id), &SqrtQ::from_json(&t["coeff"], self.q())?);
        }
        Ok(f)
    }

    pub fn tensor_to_json(&self, t: &TensorElement) -> Result<serde_json::Value> {
        let mut terms = Vec::new();
        for ((l, r), c) in &t.terms {
            let side = |k: &Key| -> Result<serde_json::Value> {
                let table = self.orbits(&k.0)?;
                Ok(serde_json::json!({
                    "dim": dim_to_map(&self.quiver, &k.0),
                    "orbit": table.orbits()[k.1 as usize].rep.to_string(),
                }))
            };
            terms.push(serde_json::json!({"left": side(l)?, "right": side(r)?, "coeff": c.to_json()}));
        }
        Ok(serde_json::json!({"q": self.q(), "quiver": self.context, "terms": terms}))
    }

    /// Restricts `f` to the terms whose key satisfies `keep`.
    pub fn filter(&self, f: &HallElement, keep: impl Fn(&Key) -> bool) -> HallElement {
        f.with_terms(
            f.terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffalg::FMatrix;
    use num::rational::BigRational;

    fn alg(vertices: &[&str], edges: &[(&str, &str, &str)], q: u64) -> HallAlgebra {
        HallAlgebra::new(Quiver::from_parts(vertices, edges).unwrap(), q, Bounds::default()).unwrap()
    }

    fn a1(q: u64) -> HallAlgebra {
        alg(&["i"], &[], q)
    }

    fn jordan(q: u64) -> HallAlgebra {
        alg(&["i"], &[("l", "i", "i")], q)
    }

    fn kronecker(q: u64) -> HallAlgebra {
        alg(&["p", "m"], &[("e", "p", "m"), ("f", "p", "m")], q)
    }

    fn sqrt(a: (i64, i64), b: (i64, i64), q: u32) -> SqrtQ {
        SqrtQ::new(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
            q,
        )
    }

    #[test]
    fn twist_exponents() {
        let a = a1(2);
        assert_eq!((a.m_omega(&[1], &[1]), a.m_star_omega(&[1], &[1])), (1, -1));
        let j = jordan(2);
        assert_eq!((j.m_omega(&[1], &[1]), j.m_star_omega(&[1], &[1])), (2, 0));
        let k = kronecker(2);
        assert_eq!((k.m_omega(&[1, 1], &[1, 1]), k.m_star_omega(&[1, 1], &[1, 1])), (4, 0));
    }

    #[test]
    fn a1_square_of_generator() {
        let a = a1(2);
        let t1 = a.char_function(&[1], 0).unwrap();
        let p = a.circ(&t1, &t1).unwrap();
        assert_eq!(p.coeff(&(vec![2], 0)), sqrt((0, 1), (3, 2), 2));
        assert_eq!(p.terms().len(), 1);
    }

    /// Classifies 2x2 matrices over F_2 up to similarity.
    fn jordan_class(m: &FMatrix) -> &'static str {
        let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let tr = a ^ d;
        let det = (a & d) ^ (b & c);
        match (m.is_zero(), (a, b, c, d) == (1, 0, 0, 1), tr, det) {
            (true, ..) => "zero",
            (_, true, ..) => "identity",
            (_, _, 1, 1) => "irreducible",
            (_, _, 1, 0) => "split",
            (_, _, 0, 0) => "nilpotent",
            _ => "unipotent",
        }
    }

    fn jordan_values(j: &HallAlgebra, f: &HallElement, expected: &[(&str, (i64, i64))]) {
        let table = j.orbits(&[2]).unwrap();
        for o in table.orbits() {
            let class = jordan_class(&table.rep(o.id).mats[0]);
            let (_, v) = expected.iter().find(|(c, _)| *c == class).unwrap();
            assert_eq!(f.coeff(&(vec![2], o.id)), sqrt(*v, (0, 1), 2), "{class}");
        }
    }

    #[test]
    fn jordan_product_of_zero_loops() {
        let j = jordan(2);
        let z = j.char_function(&[1], 0).unwrap();
        let p = j.circ(&z, &z).unwrap();
        jordan_values(
            &j,
            &p,
            &[
                ("zero", (3, 2)),
                ("identity", (0, 1)),
                ("split", (0, 1)),
                ("nilpotent", (1, 2)),
                ("unipotent", (0, 1)),
                ("irreducible", (0, 1)),
            ],
        );
    }

    #[test]
    fn jordan_product_of_constant_functions() {
        let j = jordan(2);
        let one = j
            .char_function(&[1], 0)
            .unwrap()
            .add(&j.char_function(&[1], 1).unwrap())
            .unwrap();
        let p = j.circ(&one, &one).unwrap();
        jordan_values(
            &j,
            &p,
            &[
                ("zero", (3, 2)),
                ("identity", (3, 2)),
                ("split", (1, 1)),
                ("nilpotent", (1, 2)),
                ("unipotent", (1, 2)),
                ("irreducible", (0, 1)),
            ],
        );
    }

    #[test]
    fn unit_laws() {
        let k = kronecker(2);
        let u = k.unit();
        for key in k.basis_keys(&[1, 1]).unwrap() {
            let f = k.basis_element(&key).unwrap();
            assert_eq!(k.circ(&f, &u).unwrap(), f);
            assert_eq!(k.circ(&u, &f).unwrap(), f);
        }
    }

    #[test]
    fn oracle_examples() {
        let a = a1(2);
        let t1 = a.char_function(&[1], 0).unwrap();
        let o = a.diagram_star_oracle(&t1, &t1).unwrap();
        assert_eq!(o.coeff(&(vec![2], 0)), SqrtQ::from_int(3));
        assert_eq!(o, a.star(&t1, &t1).unwrap());

        let j = jordan(2);
        let z = j.char_function(&[1], 0).unwrap();
        assert_eq!(j.diagram_star_oracle(&z, &z).unwrap(), j.star(&z, &z).unwrap());
        let u = j.unit();
        assert_eq!(j.diagram_star_oracle(&u, &u).unwrap(), u);
    }

    #[test]
    fn restriction_examples() {
        let a = a1(2);
        let t1 = a.char_function(&[1], 0).unwrap();
        let r = a.res(&t1, &[1], &[0]).unwrap();
        assert_eq!(r.terms().len(), 1);
        assert_eq!(r.coeff(&(vec![1], 0), &(vec![0], 0)), SqrtQ::one());

        let t2 = a.char_function(&[2], 0).unwrap();
        let r = a.res(&t2, &[1], &[1]).unwrap();
        assert_eq!(r.coeff(&(vec![1], 0), &(vec![1], 0)), sqrt((0, 1), (1, 1), 2));
        assert!(matches!(a.res(&t2, &[1], &[0]), Err(Error::DimMismatch(_))));

        let j = jordan(2);
        let table = j.orbits(&[2]).unwrap();
        let nil = table
            .orbits()
            .iter()
            .find(|o| jordan_class(&table.rep(o.id).mats[0]) == "nilpotent")
            .unwrap()
            .id;
        let r = j.res(&j.char_function(&[2], nil).unwrap(), &[1], &[1]).unwrap();
        assert_eq!(r.coeff(&(vec![1], 0), &(vec![1], 0)), SqrtQ::one());
    }

    #[test]
    fn coproduct_of_a1_generator() {
        let a = a1(2);
        let t2 = a.char_function(&[2], 0).unwrap();
        let d = a.coproduct(&t2).unwrap();
        assert_eq!(d.terms().len(), 3);
        assert_eq!(d.coeff(&(vec![2], 0), &(vec![0], 0)), SqrtQ::one());
        assert_eq!(d.coeff(&(vec![1], 0), &(vec![1], 0)), sqrt((0, 1), (1, 1), 2));
        assert_eq!(d.coeff(&(vec![0], 0), &(vec![2], 0)), SqrtQ::one());
    }

    #[test]
    fn tensor_products() {
        let a = a1(2);
        let t = |l: usize, r: usize| {
            let mut x = TensorElement::empty(a.context(), 2);
            x.add_term(((vec![l], 0), (vec![r], 0)), &SqrtQ::one());
            x
        };
        let p = a.tensor_mult(&t(1, 0), &t(0, 1)).unwrap();
        assert_eq!(p, t(1, 1));
        let p = a.tensor_mult(&t(1, 1), &t(1, 1)).unwrap();
        // q^{2/2} (θ1∘θ1)⊗(θ1∘θ1) = 2 · (3/√2)² θ2⊗θ2 = 9
        assert_eq!(p.coeff(&(vec![2], 0), &(vec![2], 0)), SqrtQ::from_int(9));
    }

    #[test]
    fn element_json_round_trip() {
        let k = kronecker(3);
        let mut f = k.char_function(&[1, 1], 2).unwrap();
        f.add_term((vec![1, 0], 0), &sqrt((1, 3), (-2, 1), 3));
        let v = k.element_to_json(&f).unwrap();
        assert_eq!(k.element_from_json(&v).unwrap(), f);
        let other = jordan(3);
        assert!(matches!(other.element_from_json(&v), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let a = a1(2);
        let j = jordan(2);
        assert!(matches!(a.circ(&a.unit(), &j.unit()), Err(Error::ContextMismatch(_))));
    }
}
