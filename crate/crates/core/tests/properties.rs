use std::sync::Arc;

use num::rational::BigRational;
use proptest::prelude::*;
use quiverhall::cartan::{check_psi_identity, contract_cartan, validate_cartan};
use quiverhall::ffalg::{Bounds, FMatrix, Field};
use quiverhall::hall::{HallAlgebra, HallElement};
use quiverhall::quiver::{verify_contraction_commutes, Quiver};
use quiverhall::random::{random_admissible_instance, random_datum_with_pair};
use quiverhall::repspace::{GroupElement, OrbitMethod, OrbitTable, RepSpace};
use quiverhall::scalar::SqrtQ;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar() -> impl Strategy<Value = SqrtQ> {
    (-20i64..20, 1i64..6, -20i64..20, 1i64..6).prop_map(|(a, da, b, db)| {
        SqrtQ::new(
            BigRational::new(a.into(), da.into()),
            BigRational::new(b.into(), db.into()),
            3,
        )
    })
}

fn matrix(q: u64, rows: usize, cols: usize) -> impl Strategy<Value = FMatrix> {
    proptest::collection::vec(0..q as u8, rows * cols).prop_map(move |d| FMatrix::new(rows, cols, d).unwrap())
}

fn kronecker() -> Arc<Quiver> {
    Arc::new(Quiver::from_parts(&["p", "m"], &[("e", "p", "m"), ("f", "p", "m")]).unwrap())
}

fn gl_element(f: &Field, dim: &[usize], seed: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats = dim
        .iter()
        .map(|&n| loop {
            let data = (0..n * n)
                .map(|_| rand::Rng::gen_range(&mut rng, 0..f.q() as u8))
                .collect();
            let m = FMatrix::new(n, n, data).unwrap();
            if m.is_invertible(f) {
                break m;
            }
        })
        .collect();
    GroupElement { mats }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_laws(x in scalar(), y in scalar(), z in scalar()) {
        prop_assert_eq!(x.mul(&y, 3).mul(&z, 3), x.mul(&y.mul(&z, 3), 3));
        prop_assert_eq!(x.mul(&y.add(&z), 3), x.mul(&y, 3).add(&x.mul(&z, 3)));
        prop_assert_eq!(x.mul(&y, 3), y.mul(&x, 3));
        if !x.is_zero() {
            prop_assert_eq!(x.mul(&x.inv(3).unwrap(), 3), SqrtQ::one());
        }
    }

    #[test]
    fn half_powers_add(m in -8i64..8, n in -8i64..8, q in prop::sample::select(vec![2u32, 3, 4, 5, 9])) {
        prop_assert_eq!(
            SqrtQ::q_half_pow(m, q).mul(&SqrtQ::q_half_pow(n, q), q),
            SqrtQ::q_half_pow(m + n, q)
        );
    }

    #[test]
    fn inverse_of_invertible_matrix(q in prop::sample::select(vec![2u64, 3, 4, 5]), m in (0usize..4).prop_flat_map(|n| (Just(n), any::<u64>()))) {
        let f = Field::new(q).unwrap();
        let g = gl_element(&f, &[m.0], m.1).mats.remove(0);
        let inv = g.inverse(&f).unwrap();
        prop_assert_eq!(g.mul(&inv, &f).unwrap(), FMatrix::identity(m.0));
        prop_assert_eq!(inv.mul(&g, &f).unwrap(), FMatrix::identity(m.0));
    }

    #[test]
    fn block_round_trip(
        (qm, mx, sm) in (0usize..3, 0usize..3, 0usize..3, 0usize..3)
            .prop_flat_map(|(a, b, c, d)| (matrix(3, a, b), matrix(3, c, b), matrix(3, c, d)))
    ) {
        let m = FMatrix::block_compose(&qm, &mx, &sm).unwrap();
        let (q2, s2, m2) = m.block_extract(qm.cols(), qm.rows()).unwrap();
        prop_assert_eq!((q2, s2, m2), (qm, sm, mx));
    }

    #[test]
    fn rank_is_transpose_invariant(m in (1usize..4, 1usize..4).prop_flat_map(|(r, c)| matrix(5, r, c))) {
        let f = Field::new(5).unwrap();
        prop_assert_eq!(m.rank(&f), m.transpose().rank(&f));
    }

    #[test]
    fn gaussian_binomial_symmetry(n in 0usize..6, k in 0usize..6, q in prop::sample::select(vec![2u64, 3, 4])) {
        let f = Field::new(q).unwrap();
        prop_assume!(k <= n);
        prop_assert_eq!(f.gaussian_binomial(n, k), f.gaussian_binomial(n, n - k));
    }

    #[test]
    fn codes_round_trip(code in 0u64..3u64.pow(8)) {
        let s = RepSpace::new(kronecker(), Arc::new(Field::new(3).unwrap()), vec![2, 2]).unwrap();
        prop_assert_eq!(s.encode(&s.decode(code)).unwrap(), code);
    }

    #[test]
    fn cartan_contraction_is_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, pair) = random_datum_with_pair(&mut rng, 5, 3);
        prop_assert!(validate_cartan(&contract_cartan(&d, &pair).unwrap()).is_empty());
        prop_assert!(check_psi_identity(&d, &pair).unwrap().holds);
    }

    #[test]
    fn graph_contraction_commutes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (q, a, pair) = random_admissible_instance(&mut rng, 4, 3).unwrap();
        prop_assert!(verify_contraction_commutes(&q, &a, &pair).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orbits_are_group_invariant(code in 0u64..3u64.pow(4), seed in any::<u64>()) {
        let s = RepSpace::new(kronecker(), Arc::new(Field::new(3).unwrap()), vec![2, 1]).unwrap();
        let t = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Closure).unwrap();
        let x = s.decode(code);
        let g = gl_element(s.field(), &[2, 1], seed);
        prop_assert_eq!(t.orbit_of(&s.act(&g, &x).unwrap()).unwrap(), t.orbit_of(&x).unwrap());
    }

    #[test]
    fn sweep_and_closure_agree(dim in prop::sample::select(vec![vec![1usize, 1], vec![2, 1], vec![1, 2]])) {
        let s = RepSpace::new(kronecker(), Arc::new(Field::new(3).unwrap()), dim).unwrap();
        let a = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Sweep).unwrap();
        let b = OrbitTable::compute(&s, &Bounds::default(), OrbitMethod::Closure).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn product_is_bilinear_and_associative(coeffs in proptest::collection::vec(-3i64..4, 9)) {
        let j = HallAlgebra::new(Quiver::from_parts(&["i"], &[("l", "i", "i")]).unwrap(), 2, Bounds::default()).unwrap();
        let combo = |c: &[i64]| -> HallElement {
            let mut f = j.zero();
            f.add_term((vec![0], 0), &SqrtQ::from_int(c[0]));
            f.add_term((vec![1], 0), &SqrtQ::from_int(c[1]));
            f.add_term((vec![1], 1), &SqrtQ::from_int(c[2]));
            f
        };
        let (f, g, h) = (combo(&coeffs[0..3]), combo(&coeffs[3..6]), combo(&coeffs[6..9]));
        let fg_h = j.circ(&j.circ(&f, &g).unwrap(), &h).unwrap();
        let f_gh = j.circ(&f, &j.circ(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(fg_h, f_gh);
        let lhs = j.circ(&f.add(&g).unwrap(), &h).unwrap();
        let rhs = j.circ(&f, &h).unwrap().add(&j.circ(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
