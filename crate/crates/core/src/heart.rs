//! The heart of a contracted edge: `j_!`, `j^*`, `μ^⋆`, `μ_⋆`, `ψ = j_! μ^⋆` and the
//! splitting of the balanced subalgebra into heart and complement parts.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::BigInt;

use crate::error::{Error, Result};
use crate::hall::{HallAlgebra, HallElement, Key};
use crate::quiver::{Automorphism, OrbitPair};
use crate::repspace::{Dim, PointContraction};
use crate::scalar::SqrtQ;

/// An element of `H^♥`: a function on heart orbits of balanced dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeartElement(HallElement);

impl HeartElement {
    pub fn inner(&self) -> &HallElement {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn coeff(&self, key: &Key) -> SqrtQ {
        self.0.coeff(key)
    }

    pub fn add(&self, other: &HeartElement) -> Result<HeartElement> {
        Ok(HeartElement(self.0.add(&other.0)?))
    }

    pub fn scale(&self, c: &SqrtQ) -> HeartElement {
        HeartElement(self.0.scale(c))
    }
}

/// Orbit data at one balanced dimension `ν` over `ν̂`.
#[derive(Debug, Clone)]
pub struct OrbitMap {
    pub nu: Dim,
    pub nu_hat: Dim,
    /// Whether each orbit of `E_ν` lies in the heart.
    pub heart: Vec<bool>,
    /// The contracted orbit of `μ(rep)` for heart orbits.
    pub image: Vec<Option<u32>>,
    /// Heart orbits over each contracted orbit.
    pub preimages: Vec<Vec<u32>>,
}

impl OrbitMap {
    /// `μ` induces a bijection between heart orbits and contracted orbits.
    pub fn is_bijection(&self) -> bool {
        self.preimages.iter().all(|p| p.len() == 1)
    }
}

/// A contraction `Ω → Ω̂` together with both Hall algebras.
pub struct HallContraction {
    points: PointContraction,
    original: Arc<HallAlgebra>,
    contracted: Arc<HallAlgebra>,
    maps: Mutex<HashMap<Dim, Arc<OrbitMap>>>,
}

impl std::fmt::Debug for HallContraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HallContraction({:?} -> {:?})", self.original, self.contracted)
    }
}

impl HallContraction {
    pub fn new(original: Arc<HallAlgebra>, a: &Automorphism, pair: &OrbitPair) -> Result<Self> {
        let points = PointContraction::new(original.quiver(), a, pair)?;
        let contracted = Arc::new(original.sibling(points.contracted().as_ref().clone())?);
        Ok(HallContraction {
            points,
            original,
            contracted,
            maps: Mutex::new(HashMap::new()),
        })
    }

    pub fn original(&self) -> &Arc<HallAlgebra> {
        &self.original
    }

    pub fn contracted(&self) -> &Arc<HallAlgebra> {
        &self.contracted
    }

    pub fn points(&self) -> &PointContraction {
        &self.points
    }

    /// `ν_{i₋}² φ1(i₋)` for the lift of `ν̂`; `φ1 = 1` for the identity automorphism.
    pub fn twist_exponent(&self, nu: &[usize]) -> i64 {
        let n = nu[self.points.minus()] as i64;
        n * n
    }

    pub fn orbit_map(&self, nu_hat: &[usize]) -> Result<Arc<OrbitMap>> {
        if let Some(m) = self.maps.lock().expect("orbit map lock").get(nu_hat) {
            return Ok(m.clone());
        }
        let nu = self.points.lift_dim(nu_hat)?;
        let big = self.original.orbits(&nu)?;
        let small = self.contracted.orbits(nu_hat)?;
        let f = self.original.field();
        let mut heart = Vec::with_capacity(big.len());
        let mut image = Vec::with_capacity(big.len());
        let mut preimages = vec![Vec::new(); small.len()];
        for o in big.orbits() {
            let x = big.rep(o.id);
            if self.points.is_heart(&x, f)? {
                let t = small.orbit_of(&self.points.contract_point(&x, f)?)?;
                heart.push(true);
                image.push(Some(t));
                preimages[t as usize].push(o.id);
            } else {
                heart.push(false);
                image.push(None);
            }
        }
        let map = Arc::new(OrbitMap {
            nu,
            nu_hat: nu_hat.to_vec(),
            heart,
            image,
            preimages,
        });
        self.maps
            .lock()
            .expect("orbit map lock")
            .insert(nu_hat.to_vec(), map.clone());
        Ok(map)
    }

    fn map_for(&self, nu: &[usize]) -> Result<Arc<OrbitMap>> {
        self.orbit_map(&self.points.restrict_dim(nu)?)
    }

    pub fn is_heart_key(&self, key: &Key) -> Result<bool> {
        Ok(self.map_for(&key.0)?.heart[key.1 as usize])
    }

    /// Heart PBW keys at the lift of `ν̂`.
    pub fn heart_keys(&self, nu_hat: &[usize]) -> Result<Vec<Key>> {
        let m = self.orbit_map(nu_hat)?;
        Ok((0..m.heart.len() as u32)
            .filter(|&o| m.heart[o as usize])
            .map(|o| (m.nu.clone(), o))
            .collect())
    }

    /// Complement PBW keys at the lift of `ν̂`.
    pub fn complement_keys(&self, nu_hat: &[usize]) -> Result<Vec<Key>> {
        let m = self.orbit_map(nu_hat)?;
        Ok((0..m.heart.len() as u32)
            .filter(|&o| !m.heart[o as usize])
            .map(|o| (m.nu.clone(), o))
            .collect())
    }

    /// Wraps a function already supported on heart orbits.
    pub fn heart_element(&self, f: &HallElement) -> Result<HeartElement> {
        let (h, c) = self.complement_split(f)?;
        if !c.is_zero() {
            return Err(Error::NotHeart);
        }
        Ok(h)
    }

    /// Extension by zero off the heart.
    pub fn j_shriek(&self, h: &HeartElement) -> HallElement {
        h.0.clone()
    }

    /// Restriction to the heart.
    pub fn j_star(&self, f: &HallElement) -> Result<HeartElement> {
        Ok(self.complement_split(f)?.0)
    }

    /// `f = j_! j^* f + c` with `c` supported off the heart.
    pub fn complement_split(&self, f: &HallElement) -> Result<(HeartElement, HallElement)> {
        if f.context() != self.original.context() {
            return Err(Error::ContextMismatch("element is not over the original quiver".into()));
        }
        let mut heart = self.original.zero();
        let mut rest = self.original.zero();
        for (k, c) in f.terms() {
            if self.is_heart_key(k)? {
                heart.add_term(k.clone(), c);
            } else {
                rest.add_term(k.clone(), c);
            }
        }
        Ok((HeartElement(heart), rest))
    }

    /// The product of `H^♥`: `j^*(j_! f ∘ j_! g)`.
    pub fn heart_circ(&self, f: &HeartElement, g: &HeartElement) -> Result<HeartElement> {
        self.j_star(&self.original.circ(&f.0, &g.0)?)
    }

    fn pullback(&self, f: &HallElement, twisted: bool) -> Result<HeartElement> {
        if f.context() != self.contracted.context() {
            return Err(Error::ContextMismatch(
                "element is not over the contracted quiver".into(),
            ));
        }
        let q = self.original.q();
        let mut out = self.original.zero();
        for ((nu_hat, o), c) in f.terms() {
            let m = self.orbit_map(nu_hat)?;
            let c = if twisted {
                c.mul(&SqrtQ::q_half_pow(-self.twist_exponent(&m.nu), q), q)
            } else {
                c.clone()
            };
            for &p in &m.preimages[*o as usize] {
                out.add_term((m.nu.clone(), p), &c);
            }
        }
        Ok(HeartElement(out))
    }

    /// The untwisted pullback `μ^*`.
    pub fn mu_star_untwisted(&self, f: &HallElement) -> Result<HeartElement> {
        self.pullback(f, false)
    }

    /// `μ^⋆ = q^{-ν_{i₋}²φ1(i₋)/2} μ^*`.
    pub fn mu_star(&self, f: &HallElement) -> Result<HeartElement> {
        self.pullback(f, true)
    }

    /// The inverse of `μ^⋆`: `q^{ν_{i₋}²φ1(i₋)/2} / #GL(V_{i₋}) · μ_!`, with `μ_!` a
    /// literal sum over the fiber of each contracted representative.
    pub fn mu_lower_star(&self, h: &HeartElement) -> Result<HallElement> {
        let q = self.original.q();
        let f = self.original.field();
        let mut out = self.contracted.zero();
        for nu in h.0.dims() {
            let nu_hat = self.points.restrict_dim(&nu)?;
            let big = self.original.orbits(&nu)?;
            let small = self.contracted.orbits(&nu_hat)?;
            let gl = f.gl_order(nu[self.points.minus()]);
            let scale = SqrtQ::q_half_pow(self.twist_exponent(&nu), q).scale_ratio(&1.into(), &BigInt::from(gl));
            for o in small.orbits() {
                let mut sum = SqrtQ::zero();
                for x in self
                    .points
                    .fiber_of_contraction(&small.rep(o.id), f, self.original.bounds())?
                {
                    sum = sum.add(&h.0.coeff(&(nu.clone(), big.orbit_of(&x)?)));
                }
                out.add_term((nu_hat.clone(), o.id), &sum.mul(&scale, q));
            }
        }
        Ok(out)
    }

    /// `ψ = j_! μ^⋆ : H_Ω̂ → H_Ω`.
    pub fn psi(&self, f: &HallElement) -> Result<HallElement> {
        Ok(self.j_shriek(&self.mu_star(f)?))
    }

    /// `m_Ω̂(τ̂, ω̂) − m_Ω(τ, ω)` for the balanced lifts.
    pub fn twist_defect(&self, tau_hat: &[usize], omega_hat: &[usize]) -> Result<i64> {
        let tau = self.points.lift_dim(tau_hat)?;
        let omega = self.points.lift_dim(omega_hat)?;
        Ok(self.contracted.m_omega(tau_hat, omega_hat) - self.original.m_omega(&tau, &omega))
    }
}
