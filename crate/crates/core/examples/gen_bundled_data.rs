//! Regenerates `data/model-500x50.txt` from `data/animals.taxonomy`.
//!
//! cargo run -p fif-core --example gen_bundled_data -- data

use std::collections::HashMap;
use std::path::PathBuf;

use fif_core::ontology::Taxonomy;
use fif_core::semantic::EmbeddingModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const DIM: usize = 50;
const TOPICS: [&str; 10] = [
    "vehicle", "food", "music", "sport", "weather", "city", "color", "tool", "plant", "fabric",
];
const PER_TOPIC: usize = 41;
const SUB_SIZE: usize = 8;
const SINGLETONS: usize = 50;
/// Length of the direction shared by every token.
const GLOBAL: f64 = 0.5;

/// Gaussian vector with expected squared length `scale²`.
fn direction(rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let s = scale / (DIM as f64).sqrt();
    (0..DIM)
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            s * x
        })
        .collect()
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let tax = Taxonomy::load(dir.join("animals.taxonomy")).expect("taxonomy");
    let mut rng = ChaCha8Rng::seed_from_u64(20_190_610);
    let global = direction(&mut rng, GLOBAL);
    let mut entries: Vec<(String, Vec<f64>)> = Vec::new();

    // Concepts: shared direction per ancestor below the root, so cosine
    // grows with the depth of the common ancestor.
    let mut own: HashMap<String, Vec<f64>> = HashMap::new();
    for c in tax.concepts() {
        own.insert(c.clone(), direction(&mut rng, 1.0));
    }
    for c in tax.concepts() {
        let mut v = global.clone();
        let mut cur = Some(c.as_str());
        while let Some(x) = cur {
            if x != tax.root() {
                add(&mut v, &own[x]);
            }
            cur = tax.parent(x).unwrap();
        }
        add(&mut v, &direction(&mut rng, 1.0));
        entries.push((c.clone(), v));
    }

    for topic in TOPICS {
        let t = direction(&mut rng, 1.0);
        let subs: Vec<Vec<f64>> = (0..PER_TOPIC.div_ceil(SUB_SIZE)).map(|_| direction(&mut rng, 1.0)).collect();
        for i in 0..PER_TOPIC {
            let sub = (i / SUB_SIZE).min(subs.len() - 1);
            let mut v = global.clone();
            add(&mut v, &t);
            add(&mut v, &subs[sub]);
            add(&mut v, &direction(&mut rng, 1.0));
            entries.push((format!("{topic}_{sub}_{i:02}"), v));
        }
    }

    let fill = 500 - entries.len() - SINGLETONS;
    assert_eq!(fill, 0, "vocabulary must total 500");
    for i in 0..SINGLETONS {
        let mut v = global.clone();
        add(&mut v, &direction(&mut rng, 3f64.sqrt()));
        entries.push((format!("misc_{i:03}"), v));
    }

    let model = EmbeddingModel::from_entries(DIM, entries).expect("valid vectors");
    let out = dir.join("model-500x50.txt");
    std::fs::write(&out, model.to_text(6)).expect("write model");
    println!("wrote {} tokens to {}", model.len(), out.display());
}
