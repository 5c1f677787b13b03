//! Seeded generators of random valid instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cartan::{CartanDatum, ContractionPair};
use crate::error::Result;
use crate::quiver::{realize_graph, Automorphism, Edge, OrbitPair, Quiver};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A valid datum on labels `v0, v1, ...` with rank in `2..=max_rank`, together with
/// a contraction pair `(i₊, i₋)`: equal `φ1`, no loops, `i₊·i₋ < 0`.
pub fn random_datum_with_pair(rng: &mut impl Rng, max_rank: usize, max_phi1: u64) -> (CartanDatum, ContractionPair) {
    let n = rng.gen_range(2..=max_rank.max(2));
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let (p, m) = (idx[0], idx[1]);
    let mut phi1: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_phi1)).collect();
    phi1[m] = phi1[p];
    let mut phi2: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    phi2[p] = 0;
    phi2[m] = 0;
    let mut form = vec![vec![0i64; n]; n];
    for i in 0..n {
        form[i][i] = 2 * (phi1[i] as i64) * (1 - phi2[i] as i64);
        for j in i + 1..n {
            let l = (phi1[i] / gcd(phi1[i], phi1[j]) * phi1[j]) as i64;
            let lo = if (i, j) == (p.min(m), p.max(m)) { 1 } else { 0 };
            let k = rng.gen_range(lo..=2);
            form[i][j] = -k * l;
            form[j][i] = -k * l;
        }
    }
    let d = CartanDatum::new(labels.clone(), form, phi1, phi2).expect("generated datum is well formed");
    (d, ContractionPair::new(labels[p].clone(), labels[m].clone()))
}

/// A realized graph of a random datum with each non-loop edge orbit reversed with
/// probability one half, and the orbit pair of the forced contraction pair.
pub fn random_admissible_instance(
    rng: &mut impl Rng,
    max_rank: usize,
    max_phi1: u64,
) -> Result<(Quiver, Automorphism, OrbitPair)> {
    let (d, pair) = random_datum_with_pair(rng, max_rank, max_phi1);
    let (q, a) = realize_graph(&d)?;
    let mut flip = vec![false; q.num_edges()];
    for orbit in a.edge_orbits() {
        if rng.gen_bool(0.5) {
            for e in orbit {
                flip[e] = true;
            }
        }
    }
    let edges = q
        .edges()
        .iter()
        .zip(&flip)
        .map(|(e, &f)| {
            if f {
                Edge::new(e.id.clone(), e.target.clone(), e.source.clone())
            } else {
                e.clone()
            }
        })
        .collect();
    let q2 = Quiver::new(q.vertices().to_vec(), edges)?;
    let a2 = Automorphism::new(&q2, a.vperm.clone(), a.eperm.clone())?;
    Ok((
        q2,
        a2,
        OrbitPair::new(format!("{}.0", pair.plus), format!("{}.0", pair.minus)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{contract_cartan, validate_cartan};
    use crate::quiver::{check_admissible, check_contraction_assumptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_data_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (d, pair) = random_datum_with_pair(&mut rng, 5, 3);
            assert!(validate_cartan(&d).is_empty());
            assert!(contract_cartan(&d, &pair).is_ok());
        }
    }

    #[test]
    fn generated_graphs_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let (q, a, pair) = random_admissible_instance(&mut rng, 4, 2).unwrap();
            assert!(check_admissible(&q, &a).is_empty());
            assert!(check_contraction_assumptions(&q, &a, &pair).is_empty());
        }
    }
}
