//! The acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use quiverhall::cartan::{
    build_simply_connected_root_datum, check_psi_identity, contract_cartan, generalized_reflection, validate_cartan,
    weyl_word_search, CartanDatum, ContractionPair,
};
use quiverhall::ffalg::{Bounds, Field};
use quiverhall::hall::HallAlgebra;
use quiverhall::heart::HallContraction;
use quiverhall::quiver::{verify_contraction_commutes, Automorphism, Edge, OrbitPair, Quiver};
use quiverhall::random::{random_admissible_instance, random_datum_with_pair};
use quiverhall::report::{all_passed, Check};
use quiverhall::repspace::{OrbitMethod, OrbitTable, PointContraction, RepSpace};
use quiverhall::verify;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn example_datum() -> CartanDatum {
    CartanDatum::new(
        labels(&["a", "b", "c"]),
        vec![vec![-4, -6, 0], vec![-6, 0, -3], vec![0, -3, -4]],
        vec![2, 3, 1],
        vec![2, 1, 3],
    )
    .unwrap()
}

/// The example datum extended by a contractible pair `p, m` attached to `a` and `b`.
fn example_derived_datum() -> CartanDatum {
    CartanDatum::new(
        labels(&["a", "b", "c", "p", "m"]),
        vec![
            vec![-4, -6, 0, -2, 0],
            vec![-6, 0, -3, 0, -6],
            vec![0, -3, -4, 0, 0],
            vec![-2, 0, 0, 4, -6],
            vec![0, -6, 0, -6, 4],
        ],
        vec![2, 3, 1, 2, 2],
        vec![2, 1, 3, 0, 0],
    )
    .unwrap()
}

fn two_orbit_datum() -> CartanDatum {
    CartanDatum::new(
        labels(&["p", "m"]),
        vec![vec![4, -6], vec![-6, 4]],
        vec![2, 2],
        vec![0, 0],
    )
    .unwrap()
}

fn kronecker() -> Quiver {
    Quiver::from_parts(&["p", "m"], &[("e", "p", "m"), ("f", "p", "m")]).unwrap()
}

fn two_orbit_graph() -> (Quiver, Automorphism) {
    let mut edges = Vec::new();
    for name in ["e", "f", "g"] {
        for k in 0..2 {
            edges.push(Edge::new(format!("{name}{k}"), format!("u{k}"), format!("v{k}")));
        }
    }
    let q = Quiver::new(labels(&["u0", "u1", "v0", "v1"]), edges).unwrap();
    let a = Automorphism::new(&q, vec![1, 0, 3, 2], vec![1, 0, 3, 2, 5, 4]).unwrap();
    (q, a)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn checks_outcome(checks: &[Check]) -> Outcome {
    let cases: u64 = checks.iter().map(|c| c.cases).sum();
    if all_passed(checks) {
        Ok(format!("{} checks, {cases} cases", checks.len()))
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{} {}", c.name, serde_json::to_string(&c.witness).unwrap_or_default()))
            .collect();
        Err(failed.join("; "))
    }
}

fn algebra(q: Quiver, field: u64) -> HallAlgebra {
    HallAlgebra::new(q, field, Bounds::default()).unwrap()
}

fn a1(q: u64) -> HallAlgebra {
    algebra(Quiver::from_parts(&["i"], &[]).unwrap(), q)
}

fn jordan(q: u64) -> HallAlgebra {
    algebra(Quiver::from_parts(&["i"], &[("l", "i", "i")]).unwrap(), q)
}

fn kron_contraction(q: u64) -> HallContraction {
    let quiver = kronecker();
    let a = Automorphism::identity(&quiver);
    let h = Arc::new(algebra(quiver, q));
    HallContraction::new(h, &a, &OrbitPair::new("p", "m").with_edge("e")).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 0..200 {
        let (d, pair) = random_datum_with_pair(&mut rng, 5, 3);
        let c = contract_cartan(&d, &pair).map_err(|e| format!("instance {n}: {e}"))?;
        let v = validate_cartan(&c);
        ensure(v.is_empty(), format!("instance {n}: {:?}", v))?;
    }
    Ok("200 random instances".into())
}

fn criterion_2() -> Outcome {
    let k = kronecker();
    ensure(
        verify_contraction_commutes(&k, &Automorphism::identity(&k), &OrbitPair::new("p", "m"))
            .map_err(|e| e.to_string())?,
        "Kronecker",
    )?;
    let (q, a) = two_orbit_graph();
    ensure(
        verify_contraction_commutes(&q, &a, &OrbitPair::new("u0", "v0")).map_err(|e| e.to_string())?,
        "two-orbit graph",
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 0..100 {
        let (q, a, pair) = random_admissible_instance(&mut rng, 4, 3).map_err(|e| format!("instance {n}: {e}"))?;
        let ok = verify_contraction_commutes(&q, &a, &pair).map_err(|e| format!("instance {n}: {e}"))?;
        ensure(ok, format!("instance {n}: {}", q.canonical_json()))?;
    }
    Ok("2 fixed + 100 random instances".into())
}

fn criterion_3() -> Outcome {
    let fixed = [
        (example_derived_datum(), ContractionPair::new("p", "m")),
        (two_orbit_datum(), ContractionPair::new("p", "m")),
    ];
    for (d, pair) in &fixed {
        let c = check_psi_identity(d, pair).map_err(|e| e.to_string())?;
        ensure(c.holds, format!("{:?}", d.labels()))?;
    }
    ensure(validate_cartan(&example_datum()).is_empty(), "example datum invalid")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 0..100 {
        let (d, pair) = random_datum_with_pair(&mut rng, 5, 3);
        let c = check_psi_identity(&d, &pair).map_err(|e| format!("instance {n}: {e}"))?;
        ensure(c.holds, format!("instance {n}"))?;
    }
    let d = two_orbit_datum();
    let rd = build_simply_connected_root_datum(&d).map_err(|e| e.to_string())?;
    let target = generalized_reflection(&rd, &BTreeMap::from([("m".to_string(), 1), ("p".to_string(), 2)]))
        .map_err(|e| e.to_string())?;
    let found = weyl_word_search(&d, &target, 8).map_err(|e| e.to_string())?;
    ensure(found.is_none(), format!("unexpected word {found:?}"))?;
    Ok("2 fixed + 100 random identities, no word up to depth 8".into())
}

fn sorted_sizes(t: &OrbitTable) -> Vec<u64> {
    let mut v: Vec<u64> = t.orbits().iter().map(|o| o.size).collect();
    v.sort();
    v
}

fn criterion_4() -> Outcome {
    let jordan_q = Arc::new(Quiver::from_parts(&["i"], &[("l", "i", "i")]).unwrap());
    let kron_q = Arc::new(kronecker());
    let b = Bounds::default();
    let mut tables = Vec::new();
    for (q, dim, field) in [
        (&jordan_q, vec![2], 2),
        (&kron_q, vec![1, 1], 3),
        (&jordan_q, vec![3], 2),
        (&kron_q, vec![2, 2], 2),
        (&kron_q, vec![2, 1], 3),
    ] {
        let space = RepSpace::new(q.clone(), Arc::new(Field::new(field).unwrap()), dim).unwrap();
        tables.push(OrbitTable::compute(&space, &b, OrbitMethod::Auto).map_err(|e| e.to_string())?);
    }
    let j = sorted_sizes(&tables[0]);
    ensure(j == vec![1, 1, 2, 3, 3, 6], format!("Jordan sizes {j:?}"))?;
    let k = sorted_sizes(&tables[1]);
    ensure(k == vec![1, 2, 2, 2, 2], format!("Kronecker sizes {k:?}"))?;
    for t in &tables {
        let g = t.space().group_order();
        ensure(
            t.orbits().iter().all(|o| g.is_multiple_of(o.size as u128)),
            format!("orbit size not dividing group order at {:?}", t.dim()),
        )?;
        ensure(
            t.orbits().iter().map(|o| o.size as u128).sum::<u128>() == t.space().point_count(),
            "sizes do not sum to point count",
        )?;
    }
    Ok(format!("{} tables", tables.len()))
}

fn criterion_5() -> Outcome {
    let k = kronecker();
    let pc = PointContraction::new(
        &k,
        &Automorphism::identity(&k),
        &OrbitPair::new("p", "m").with_edge("e"),
    )
    .map_err(|e| e.to_string())?;
    let b = Bounds::default();
    let mut fibers = 0;
    for (nu, q) in [(1usize, 2u64), (2, 2), (1, 3)] {
        let f = Arc::new(Field::new(q).unwrap());
        let census = pc.fiber_census(&[nu], &f, &b).map_err(|e| e.to_string())?;
        let small = RepSpace::new(pc.contracted().clone(), f.clone(), vec![nu]).unwrap();
        ensure(
            census.len() as u128 == small.point_count(),
            "contraction is not surjective",
        )?;
        let gl = f.gl_order(nu) as u64;
        ensure(
            census.values().all(|&c| c == gl),
            format!("fiber size differs from {gl} at dim {nu}, q = {q}"),
        )?;
        fibers += census.len();
    }
    Ok(format!("{fibers} fibers"))
}

fn criterion_6() -> Outcome {
    let checks = vec![
        verify::verify_oracle(&a1(2), &[2]),
        verify::verify_oracle(&jordan(2), &[2]),
        verify::verify_oracle(&algebra(kronecker(), 2), &[2, 2]),
        verify::verify_gaussian_binomials(&a1(2), 4),
        verify::verify_gaussian_binomials(&a1(3), 4),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    checks_outcome(&checks)
}

fn criterion_7() -> Outcome {
    let (a, j, k) = (a1(2), jordan(2), algebra(kronecker(), 2));
    let checks = vec![
        verify::verify_associativity(&a, &[3]),
        verify::verify_associativity(&j, &[3]),
        verify::verify_associativity(&k, &[3, 3]),
        verify::verify_coproduct_multiplicative(&a, &[2]),
        verify::verify_coproduct_multiplicative(&j, &[2]),
        verify::verify_coassociativity(&a, &[2]),
        verify::verify_coassociativity(&j, &[2]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    checks_outcome(&checks)
}

fn criterion_8() -> Outcome {
    let mut checks = Vec::new();
    for q in [2, 3] {
        checks.extend(verify::verify_embedding(&kron_contraction(q), &[2]).map_err(|e| e.to_string())?);
    }
    checks_outcome(&checks)
}

fn criterion_9() -> Outcome {
    checks_outcome(&verify::verify_pbw(&kron_contraction(2), &[2]).map_err(|e| e.to_string())?)
}

fn criterion_10() -> Outcome {
    checks_outcome(&verify::verify_ses(&kron_contraction(2), &[2], 10, 16).map_err(|e| e.to_string())?)
}

fn criterion_11() -> Outcome {
    let c = verify::verify_restriction_fiber_law(&kron_contraction(2), &[1], &[1]).map_err(|e| e.to_string())?;
    checks_outcome(&[c])
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "cartan contraction validity", Duration::from_secs(1), criterion_1),
        (
            2,
            "graph and datum contraction commute",
            Duration::from_secs(5),
            criterion_2,
        ),
        (
            3,
            "Weyl group identity and non-embedding",
            Duration::from_secs(10),
            criterion_3,
        ),
        (4, "orbit bookkeeping", Duration::from_secs(5), criterion_4),
        (5, "contraction fibers", Duration::from_secs(30), criterion_5),
        (
            6,
            "Hall product against oracle and Gaussian binomials",
            Duration::from_secs(120),
            criterion_6,
        ),
        (7, "associativity and bialgebra", Duration::from_secs(300), criterion_7),
        (8, "embedding of Hall algebras", Duration::from_secs(300), criterion_8),
        (9, "PBW transport", Duration::from_secs(60), criterion_9),
        (10, "split short exact sequence", Duration::from_secs(120), criterion_10),
        (11, "restriction fiber law", Duration::from_secs(60), criterion_11),
    ];
    let mut failures = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded time limit {limit:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {n:>2} {}: {name} ({detail}) [{:.2?}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
