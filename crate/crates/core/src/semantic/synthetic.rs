//! Seeded synthetic vector spaces for index tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::model::EmbeddingModel;
use super::similarity::l2_norm;

/// Gaussian direction scaled to unit length.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = l2_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `n` vectors spread over `clusters` random centroids. A point mixes its
/// centroid (weight `sqrt(cohesion)`) with private noise, so points of the
/// same cluster have cosine near `cohesion`. Tokens are `v00000`, `v00001`, ...
pub fn clustered_model(n: usize, dim: usize, clusters: usize, cohesion: f64, seed: u64) -> EmbeddingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = clusters.max(1);
    let centroids: Vec<Vec<f64>> = (0..clusters).map(|_| unit_vector(&mut rng, dim)).collect();
    let (wc, wn) = (cohesion.sqrt(), (1.0 - cohesion).max(0.0).sqrt());
    let entries = (0..n).map(|i| {
        let c = &centroids[rng.random_range(0..clusters)];
        let noise = unit_vector(&mut rng, dim);
        let v = c.iter().zip(&noise).map(|(a, b)| wc * a + wn * b).collect();
        (format!("v{i:05}"), v)
    });
    EmbeddingModel::from_entries(dim, entries.collect::<Vec<_>>()).expect("synthetic vectors are valid")
}

/// Queries near randomly chosen vocabulary entries: each is the entry's unit
/// direction blended with fresh noise so that the cosine to its origin is
/// about `fidelity`. Returns `(origin id, query vector)` pairs.
pub fn perturbed_queries(model: &EmbeddingModel, count: usize, fidelity: f64, seed: u64) -> Vec<(usize, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = model.dim();
    let wo = fidelity.clamp(0.0, 1.0);
    let wn = (1.0 - wo * wo).max(0.0).sqrt();
    (0..count)
        .map(|_| {
            let id = rng.random_range(0..model.len());
            let origin = model.vector(id);
            let on = l2_norm(origin);
            let noise = unit_vector(&mut rng, dim);
            let q = origin
                .iter()
                .zip(&noise)
                .map(|(o, z)| wo * o / on + wn * z)
                .collect();
            (id, q)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantic::cosine_similarity;

    #[test]
    fn deterministic_and_cohesive() {
        let a = clustered_model(200, 32, 4, 0.7, 5);
        let b = clustered_model(200, 32, 4, 0.7, 5);
        assert_eq!(a.to_text(9), b.to_text(9));
        let qs = perturbed_queries(&a, 20, 0.9, 1);
        let mean: f64 = qs
            .iter()
            .map(|(id, q)| cosine_similarity(a.vector(*id), q).unwrap().value())
            .sum::<f64>()
            / 20.0;
        assert!((mean - 0.9).abs() < 0.05, "{mean}");
    }
}
