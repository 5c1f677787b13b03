//! Exhaustive and seeded verification routines returning [`Check`] records.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::hall::{HallAlgebra, HallElement, Key, TensorElement};
use crate::heart::HallContraction;
use crate::report::{Check, CheckBuilder, Status};
use crate::repspace::{dim_add, dims_below, Dim};
use crate::scalar::SqrtQ;

/// Pairs `(τ, ω)` with `τ + ω <= max` per vertex.
pub fn dim_pairs_below(max: &[usize]) -> Vec<(Dim, Dim)> {
    let mut out = Vec::new();
    for nu in dims_below(max) {
        for tau in dims_below(&nu) {
            let omega = nu.iter().zip(&tau).map(|(n, t)| n - t).collect();
            out.push((tau, omega));
        }
    }
    out
}

fn key_json(alg: &HallAlgebra, key: &Key) -> Value {
    let rep = alg
        .orbits(&key.0)
        .map(|t| t.orbits()[key.1 as usize].rep.to_string())
        .unwrap_or_default();
    json!({"dim": key.0, "orbit": rep})
}

fn element_json(alg: &HallAlgebra, f: &HallElement) -> Value {
    alg.element_to_json(f).unwrap_or(Value::Null)
}

fn nonzero(d: &[usize]) -> bool {
    d.iter().any(|&x| x > 0)
}

/// `star` against the literal flag-counting oracle on all PBW pairs with `τ + ω <= max`.
pub fn verify_oracle(alg: &HallAlgebra, max: &[usize]) -> Result<Check> {
    let mut b = CheckBuilder::new("product_oracle", "hall.product_oracle");
    for (tau, omega) in dim_pairs_below(max) {
        for ka in alg.basis_keys(&tau)? {
            for kb in alg.basis_keys(&omega)? {
                let f = alg.basis_element(&ka)?;
                let g = alg.basis_element(&kb)?;
                let lhs = alg.star(&f, &g)?;
                let rhs = alg.diagram_star_oracle(&f, &g)?;
                b.record(lhs == rhs, || {
                    json!({"left": key_json(alg, &ka), "right": key_json(alg, &kb),
                           "subspace_formula": element_json(alg, &lhs), "oracle": element_json(alg, &rhs)})
                });
            }
        }
    }
    Ok(b.finish())
}

/// On a one-vertex quiver without edges, `θ_m ∘ θ_n = q^{-mn/2} [m+n, n]_q θ_{m+n}`.
pub fn verify_gaussian_binomials(alg: &HallAlgebra, max_total: usize) -> Result<Check> {
    let mut b = CheckBuilder::new("gaussian_binomials", "hall.gaussian_binomial");
    let q = alg.q();
    for total in 0..=max_total {
        for m in 0..=total {
            let n = total - m;
            let p = alg.circ(&alg.char_function(&[m], 0)?, &alg.char_function(&[n], 0)?)?;
            let binom = alg.field().gaussian_binomial(total, n) as i64;
            let mut expected = alg.zero();
            expected.add_term(
                (vec![total], 0),
                &SqrtQ::q_half_pow(-((m * n) as i64), q).scale_int(binom),
            );
            b.record(
                p == expected,
                || json!({"m": m, "n": n, "q": q, "product": element_json(alg, &p)}),
            );
        }
    }
    Ok(b.finish())
}

/// Memoized products of PBW basis vectors.
struct ProductCache<'a> {
    alg: &'a HallAlgebra,
    products: HashMap<(Key, Key), HallElement>,
}

impl<'a> ProductCache<'a> {
    fn new(alg: &'a HallAlgebra) -> Self {
        ProductCache {
            alg,
            products: HashMap::new(),
        }
    }

    fn basis(&mut self, a: &Key, b: &Key) -> Result<HallElement> {
        if let Some(p) = self.products.get(&(a.clone(), b.clone())) {
            return Ok(p.clone());
        }
        let p = self
            .alg
            .circ(&self.alg.basis_element(a)?, &self.alg.basis_element(b)?)?;
        self.products.insert((a.clone(), b.clone()), p.clone());
        Ok(p)
    }

    fn mul(&mut self, f: &HallElement, g: &HallElement) -> Result<HallElement> {
        let q = self.alg.q();
        let mut out = self.alg.zero();
        for (ka, ca) in f.terms() {
            for (kb, cb) in g.terms() {
                let c = ca.mul(cb, q);
                for (k, v) in self.basis(ka, kb)?.terms() {
                    out.add_term(k.clone(), &v.mul(&c, q));
                }
            }
        }
        Ok(out)
    }
}

/// `(f∘g)∘h = f∘(g∘h)` on all PBW triples of nonzero dimensions summing to at most `max`.
pub fn verify_associativity(alg: &HallAlgebra, max: &[usize]) -> Result<Check> {
    let mut b = CheckBuilder::new("associativity", "hall.associativity");
    let mut cache = ProductCache::new(alg);
    for (tau, rest) in dim_pairs_below(max) {
        if !nonzero(&tau) || !nonzero(&rest) {
            continue;
        }
        for omega in dims_below(&rest) {
            let sigma: Dim = rest.iter().zip(&omega).map(|(r, w)| r - w).collect();
            if !nonzero(&omega) || !nonzero(&sigma) {
                continue;
            }
            for ka in alg.basis_keys(&tau)? {
                for kb in alg.basis_keys(&omega)? {
                    let ab = cache.basis(&ka, &kb)?;
                    for kc in alg.basis_keys(&sigma)? {
                        let bc = cache.basis(&kb, &kc)?;
                        let lhs = cache.mul(&ab, &alg.basis_element(&kc)?)?;
                        let rhs = cache.mul(&alg.basis_element(&ka)?, &bc)?;
                        b.record(lhs == rhs, || {
                            json!({"f": key_json(alg, &ka), "g": key_json(alg, &kb), "h": key_json(alg, &kc),
                                   "left": element_json(alg, &lhs), "right": element_json(alg, &rhs)})
                        });
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

fn tensor_json(alg: &HallAlgebra, t: &TensorElement) -> Value {
    alg.tensor_to_json(t).unwrap_or(Value::Null)
}

/// `r(f∘g) = r(f)·r(g)` on all PBW pairs with `τ + ω <= max`.
pub fn verify_coproduct_multiplicative(alg: &HallAlgebra, max: &[usize]) -> Result<Check> {
    let mut b = CheckBuilder::new("coproduct_multiplicative", "hall.coproduct_multiplicative");
    let mut deltas: HashMap<Key, TensorElement> = HashMap::new();
    let mut delta = |k: &Key| -> Result<TensorElement> {
        if let Some(d) = deltas.get(k) {
            return Ok(d.clone());
        }
        let d = alg.coproduct(&alg.basis_element(k)?)?;
        deltas.insert(k.clone(), d.clone());
        Ok(d)
    };
    for (tau, omega) in dim_pairs_below(max) {
        for ka in alg.basis_keys(&tau)? {
            for kb in alg.basis_keys(&omega)? {
                let lhs = alg.coproduct(&alg.circ(&alg.basis_element(&ka)?, &alg.basis_element(&kb)?)?)?;
                let rhs = alg.tensor_mult(&delta(&ka)?, &delta(&kb)?)?;
                b.record(lhs == rhs, || {
                    json!({"f": key_json(alg, &ka), "g": key_json(alg, &kb),
                           "coproduct_of_product": tensor_json(alg, &lhs),
                           "product_of_coproducts": tensor_json(alg, &rhs)})
                });
            }
        }
    }
    Ok(b.finish())
}

type Triple = BTreeMap<(Key, Key, Key), SqrtQ>;

fn add_triple(t: &mut Triple, k: (Key, Key, Key), c: &SqrtQ) {
    let e = t.entry(k.clone()).or_default();
    *e = e.add(c);
    if e.is_zero() {
        t.remove(&k);
    }
}

/// `(r⊗1)r = (1⊗r)r` on all PBW vectors of dimension `<= max`.
pub fn verify_coassociativity(alg: &HallAlgebra, max: &[usize]) -> Result<Check> {
    let mut b = CheckBuilder::new("coassociativity", "hall.coassociativity");
    let q = alg.q();
    for key in alg.basis_keys_below(max)? {
        let d = alg.coproduct(&alg.basis_element(&key)?)?;
        let mut left = Triple::new();
        let mut right = Triple::new();
        for ((l, r), c) in d.terms() {
            for ((l1, l2), c2) in alg.coproduct(&alg.basis_element(l)?)?.terms() {
                add_triple(&mut left, (l1.clone(), l2.clone(), r.clone()), &c.mul(c2, q));
            }
            for ((r1, r2), c2) in alg.coproduct(&alg.basis_element(r)?)?.terms() {
                add_triple(&mut right, (l.clone(), r1.clone(), r2.clone()), &c.mul(c2, q));
            }
        }
        b.record(left == right, || {
            let diff: Vec<Value> = left
                .keys()
                .chain(right.keys())
                .filter(|k| left.get(k) != right.get(k))
                .take(4)
                .map(|k| json!([key_json(alg, &k.0), key_json(alg, &k.1), key_json(alg, &k.2)]))
                .collect();
            json!({"f": key_json(alg, &key), "differing_terms": diff})
        });
    }
    Ok(b.finish())
}

/// Contracted PBW keys at every `ν̂ <= max`.
fn contracted_keys(c: &HallContraction, max: &[usize]) -> Result<Vec<Key>> {
    c.contracted().basis_keys_below(max)
}

/// `ψ(f∘g) = ψ(f)∘ψ(g)`, the injectivity certificate `μ_⋆ j^* ψ = id` with
/// `j^* ψ = μ^⋆`, and the twist identity `m_Ω̂ − m_Ω = −2τ_{i₋}ω_{i₋}φ1(i₋)`.
pub fn verify_embedding(c: &HallContraction, max: &[usize]) -> Result<Vec<Check>> {
    let small = c.contracted();
    let big = c.original();
    let minus = c.points().minus();

    let mut hom = CheckBuilder::new("psi_multiplicative", "heart.psi_multiplicative");
    let mut psi_cache: HashMap<Key, HallElement> = HashMap::new();
    let mut big_products = ProductCache::new(big);
    for (tau, omega) in dim_pairs_below(max) {
        for ka in small.basis_keys(&tau)? {
            for kb in small.basis_keys(&omega)? {
                let f = small.basis_element(&ka)?;
                let g = small.basis_element(&kb)?;
                let lhs = c.psi(&small.circ(&f, &g)?)?;
                for k in [&ka, &kb] {
                    if !psi_cache.contains_key(k) {
                        psi_cache.insert(k.clone(), c.psi(&small.basis_element(k)?)?);
                    }
                }
                let rhs = big_products.mul(&psi_cache[&ka], &psi_cache[&kb])?;
                hom.record(lhs == rhs, || {
                    json!({"f": key_json(small, &ka), "g": key_json(small, &kb),
                           "psi_of_product": element_json(big, &lhs), "product_of_psi": element_json(big, &rhs)})
                });
            }
        }
    }

    let mut cert = CheckBuilder::new("injectivity_certificate", "heart.injectivity_certificate");
    for key in contracted_keys(c, max)? {
        let p = small.basis_element(&key)?;
        let restricted = c.j_star(&c.psi(&p)?)?;
        let ok = restricted == c.mu_star(&p)? && c.mu_lower_star(&restricted)? == p;
        cert.record(ok, || json!({"f": key_json(small, &key)}));
    }

    let mut twist = CheckBuilder::new("twist_identity", "heart.twist_identity");
    for (tau, omega) in dim_pairs_below(max) {
        let t = c.points().lift_dim(&tau)?;
        let w = c.points().lift_dim(&omega)?;
        let defect = c.twist_defect(&tau, &omega)?;
        let expected = -2 * (t[minus] * w[minus]) as i64;
        twist.record(
            defect == expected,
            || json!({"tau": tau, "omega": omega, "defect": defect, "expected": expected}),
        );
    }
    Ok(vec![hom.finish(), cert.finish(), twist.finish()])
}

/// Orbit bijection, untwisted transport `j_! μ^*(P_O') = P_O` and the twisted
/// form `ψ(P_O') = q^{-ν_{i₋}²φ1(i₋)/2} P_O`.
pub fn verify_pbw(c: &HallContraction, max: &[usize]) -> Result<Vec<Check>> {
    let small = c.contracted();
    let big = c.original();
    let q = big.q();
    let mut bij = CheckBuilder::new("orbit_bijection", "heart.orbit_bijection");
    let mut plain = CheckBuilder::new("pbw_transport_untwisted", "heart.pbw_transport_untwisted");
    let mut twisted = CheckBuilder::new("pbw_transport_twisted", "heart.pbw_transport_twisted");
    for nu_hat in dims_below(max) {
        let map = c.orbit_map(&nu_hat)?;
        for (o, pre) in map.preimages.iter().enumerate() {
            let key = (nu_hat.clone(), o as u32);
            bij.record(
                pre.len() == 1,
                || json!({"orbit": key_json(small, &key), "heart_preimages": pre.len()}),
            );
            let Some(&target) = pre.first() else {
                continue;
            };
            let p = small.basis_element(&key)?;
            let expected = big.char_function(&map.nu, target)?;
            let got = c.j_shriek(&c.mu_star_untwisted(&p)?);
            plain.record(
                got == expected,
                || json!({"orbit": key_json(small, &key), "image": element_json(big, &got)}),
            );
            let scaled = expected.scale(&SqrtQ::q_half_pow(-c.twist_exponent(&map.nu), q));
            let got = c.psi(&p)?;
            twisted.record(
                got == scaled,
                || json!({"orbit": key_json(small, &key), "image": element_json(big, &got)}),
            );
        }
    }
    Ok(vec![bij.finish(), plain.finish(), twisted.finish()])
}

/// The ideal property of `H^c`, `j^*` as a surjective algebra map with kernel
/// `H^c` and section `j_!`, and `μ^⋆` as an algebra isomorphism onto `H^♥`.
/// Exhaustive over PBW pairs, plus `samples` seeded random combinations.
pub fn verify_ses(c: &HallContraction, max: &[usize], seed: u64, samples: usize) -> Result<Vec<Check>> {
    let small = c.contracted();
    let big = c.original();
    let mut heart_keys = Vec::new();
    let mut comp_keys = Vec::new();
    for nu_hat in dims_below(max) {
        heart_keys.extend(c.heart_keys(&nu_hat)?);
        comp_keys.extend(c.complement_keys(&nu_hat)?);
    }
    let balanced: Vec<Key> = heart_keys.iter().chain(&comp_keys).cloned().collect();
    let fits = |a: &Key, b: &Key| {
        dim_add(&a.0, &b.0)
            .iter()
            .zip(c.points().lift_dim(max).unwrap_or_default())
            .all(|(x, m)| *x <= m)
    };
    let mut products = ProductCache::new(big);

    let mut ideal = CheckBuilder::new("complement_ideal", "heart.ideal");
    for kf in &comp_keys {
        for kg in &balanced {
            if !fits(kf, kg) {
                continue;
            }
            let f = big.basis_element(kf)?;
            let g = big.basis_element(kg)?;
            for (side, p) in [("left", products.mul(&f, &g)?), ("right", products.mul(&g, &f)?)] {
                let ok = c.j_star(&p)?.is_zero();
                ideal.record(ok, || {
                    json!({"complement": key_json(big, kf), "other": key_json(big, kg), "side": side,
                           "product": element_json(big, &p)})
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_combo = |keys: &[Key], rng: &mut ChaCha8Rng| {
        let mut f = big.zero();
        for k in keys {
            f.add_term(k.clone(), &SqrtQ::from_int(rng.gen_range(-3..=3)));
        }
        f
    };
    let top = c.points().lift_dim(max)?;
    let half: Vec<usize> = top.iter().map(|x| x / 2).collect();
    let low_comp: Vec<Key> = comp_keys
        .iter()
        .filter(|k| k.0.iter().zip(&half).all(|(a, b)| a <= b))
        .cloned()
        .collect();
    let low_all: Vec<Key> = balanced
        .iter()
        .filter(|k| k.0.iter().zip(&half).all(|(a, b)| a <= b))
        .cloned()
        .collect();
    for _ in 0..samples {
        let f = random_combo(&low_comp, &mut rng);
        let g = random_combo(&low_all, &mut rng);
        for p in [products.mul(&f, &g)?, products.mul(&g, &f)?] {
            let ok = c.j_star(&p)?.is_zero();
            ideal.record(ok, || json!({"f": element_json(big, &f), "g": element_json(big, &g)}));
        }
    }

    let mut hom = CheckBuilder::new("restriction_algebra_map", "heart.restriction_algebra_map");
    for ka in &balanced {
        for kb in &balanced {
            if !fits(ka, kb) {
                continue;
            }
            let f = big.basis_element(ka)?;
            let g = big.basis_element(kb)?;
            let lhs = c.j_star(&products.mul(&f, &g)?)?;
            let (jf, jg) = (c.j_star(&f)?, c.j_star(&g)?);
            let rhs = c.j_star(&products.mul(&c.j_shriek(&jf), &c.j_shriek(&jg))?)?;
            hom.record(lhs == rhs, || json!({"f": key_json(big, ka), "g": key_json(big, kb)}));
        }
    }

    let mut section = CheckBuilder::new("section", "heart.section");
    let mut kernel = CheckBuilder::new("kernel", "heart.kernel");
    for k in &balanced {
        let p = big.basis_element(k)?;
        let restricted = c.j_star(&p)?;
        let in_heart = c.is_heart_key(k)?;
        kernel.record(restricted.is_zero() != in_heart, || json!({"key": key_json(big, k)}));
        if in_heart {
            section.record(
                c.j_star(&c.j_shriek(&restricted))? == restricted,
                || json!({"key": key_json(big, k)}),
            );
        }
    }

    let mut quotient = CheckBuilder::new("quotient_isomorphism", "heart.quotient_isomorphism");
    for (tau, omega) in dim_pairs_below(max) {
        for ka in small.basis_keys(&tau)? {
            for kb in small.basis_keys(&omega)? {
                let f = small.basis_element(&ka)?;
                let g = small.basis_element(&kb)?;
                let lhs = c.mu_star(&small.circ(&f, &g)?)?;
                let rhs = c.heart_circ(&c.mu_star(&f)?, &c.mu_star(&g)?)?;
                quotient.record(
                    lhs == rhs,
                    || json!({"f": key_json(small, &ka), "g": key_json(small, &kb)}),
                );
            }
        }
    }
    Ok(vec![
        ideal.finish(),
        hom.finish(),
        section.finish(),
        kernel.finish(),
        quotient.finish(),
    ])
}

/// For heart pairs over `(τ̂, ω̂)`, heart extensions over each contracted orbit
/// number `q^{φ1(i₊)τ_{i₊}ω_{i₋}}` times the contracted extensions.
pub fn verify_restriction_fiber_law(c: &HallContraction, tau_hat: &[usize], omega_hat: &[usize]) -> Result<Check> {
    let mut b = CheckBuilder::new("restriction_fiber_law", "heart.restriction_fiber_law");
    let big = c.original();
    let small = c.contracted();
    let f = big.field();
    let bounds = big.bounds();
    let pc = c.points();
    let tau = pc.lift_dim(tau_hat)?;
    let omega = pc.lift_dim(omega_hat)?;
    let nu_hat = dim_add(tau_hat, omega_hat);
    let big_space = big.space(&dim_add(&tau, &omega))?;
    let small_space = small.space(&nu_hat)?;
    let target = small.orbits(&nu_hat)?;
    let factor = (big.q() as u64).pow((tau[pc.plus()] * omega[pc.minus()]) as u32);
    let tt = big.orbits(&tau)?;
    let tw = big.orbits(&omega)?;
    for ka in c.heart_keys(tau_hat)? {
        for kb in c.heart_keys(omega_hat)? {
            let (xt, xw) = (tt.rep(ka.1), tw.rep(kb.1));
            let mut heart: BTreeMap<u32, u64> = BTreeMap::new();
            for x in big_space.extensions_over(&xt, &xw, bounds)? {
                if pc.is_heart(&x, f)? {
                    *heart.entry(target.orbit_of(&pc.contract_point(&x, f)?)?).or_insert(0) += 1;
                }
            }
            let (yt, yw) = (pc.contract_point(&xt, f)?, pc.contract_point(&xw, f)?);
            let mut contracted: BTreeMap<u32, u64> = BTreeMap::new();
            for y in small_space.extensions_over(&yt, &yw, bounds)? {
                *contracted.entry(target.orbit_of(&y)?).or_insert(0) += factor;
            }
            b.record(heart == contracted, || {
                json!({"quotient": key_json(big, &ka), "sub": key_json(big, &kb),
                       "heart_counts": heart.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
                       "scaled_contracted_counts": contracted.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>()})
            });
        }
    }
    Ok(b.finish())
}

/// Compares `(ψ⊗ψ) r_Ω̂` with the heart, balanced part of `r_Ω ψ` on contracted
/// PBW vectors. Reported, not asserted.
pub fn comult_compat(c: &HallContraction, max: &[usize]) -> Result<Check> {
    let small = c.contracted();
    let big = c.original();
    let q = big.q();
    let mut exact = 0u64;
    let mut scaled: BTreeMap<i64, u64> = BTreeMap::new();
    let mut other = 0u64;
    let mut unbalanced = 0u64;
    let mut examples = Vec::new();
    let mut cases = 0u64;
    for key in contracted_keys(c, max)? {
        cases += 1;
        let p = small.basis_element(&key)?;
        let mut lhs = big.zero_tensor();
        for ((l, r), coeff) in small.coproduct(&p)?.terms() {
            let pl = c.psi(&small.basis_element(l)?)?;
            let pr = c.psi(&small.basis_element(r)?)?;
            for (kl, cl) in pl.terms() {
                for (kr, cr) in pr.terms() {
                    lhs.add_term((kl.clone(), kr.clone()), &coeff.mul(&cl.mul(cr, q), q));
                }
            }
        }
        let full = big.coproduct(&c.psi(&p)?)?;
        let mut rhs = big.zero_tensor();
        let mut leftover = false;
        for ((l, r), coeff) in full.terms() {
            let keep = c.points().is_balanced(&l.0)
                && c.points().is_balanced(&r.0)
                && c.is_heart_key(l)?
                && c.is_heart_key(r)?;
            if keep {
                rhs.add_term((l.clone(), r.clone()), coeff);
            } else {
                leftover = true;
            }
        }
        if leftover {
            unbalanced += 1;
        }
        if lhs == rhs {
            exact += 1;
            continue;
        }
        let ratios: Vec<Option<i64>> = lhs
            .terms()
            .keys()
            .chain(rhs.terms().keys())
            .map(|(l, r)| rhs.coeff(l, r).half_power_ratio(&lhs.coeff(l, r), q, 16))
            .collect();
        let uniform = ratios
            .first()
            .copied()
            .flatten()
            .filter(|k| ratios.iter().all(|r| *r == Some(*k)));
        match uniform {
            Some(k) => *scaled.entry(k).or_insert(0) += 1,
            None => other += 1,
        }
        if examples.len() < 3 {
            examples.push(json!({"f": key_json(small, &key), "uniform_half_power": uniform}));
        }
    }
    Ok(Check {
        name: "comultiplication_compatibility".into(),
        anchor: "heart.comultiplication_compatibility".into(),
        status: Status::Info,
        cases,
        witness: None,
        details: Some(json!({
            "exact": exact,
            "uniform_half_power": scaled.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            "nonuniform": other,
            "with_terms_off_heart": unbalanced,
            "examples": examples,
        })),
    })
}
