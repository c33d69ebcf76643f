mod common;

use common::{check_micro, micro_case};
use fif_core::forwarder::{CachePolicy, ContentStore, Data, FaceId, Interest, InterestDigest, Pit, PitInsert};
use fif_core::names::Name;
use fif_core::semantic::EmbeddingModel;
use fif_core::time::{SimDuration, SimTime};
use proptest::prelude::*;

fn tiny_model() -> EmbeddingModel {
    EmbeddingModel::from_entries(
        2,
        (0..8).map(|i| {
            let a = i as f64 * 0.4;
            (format!("t{i}"), vec![a.cos(), a.sin()])
        }),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn micro_networks_keep_invariants(case in micro_case()) {
        if let Err(e) = check_micro(&case) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn cs_never_exceeds_capacity(
        cap in 0usize..6,
        policy in prop_oneof![Just(CachePolicy::Lru), Just(CachePolicy::Fifo), Just(CachePolicy::Semantic)],
        ops in prop::collection::vec((0usize..8, 1usize..3, any::<bool>()), 1..60),
    ) {
        let model = tiny_model();
        let mut cs = ContentStore::new(cap, policy);
        for (tok, depth, lookup) in ops {
            let mut comps = vec!["p".to_string(); depth];
            comps.push(format!("t{tok}"));
            let name = Name::new(comps, Some(depth)).unwrap();
            if lookup {
                let mut stats = Default::default();
                cs.lookup(&name, true, 0.5, 3, &model, &mut stats);
            } else {
                cs.insert(Data { name, payload_size: 1, in_reply_to: InterestDigest([0; 32]) }, &model);
            }
            prop_assert!(cs.len() <= cap);
        }
    }

    #[test]
    fn pit_groups_only_identical_names(
        ops in prop::collection::vec((0usize..3, 0u64..4, 0u32..3, 0u64..10), 1..40),
    ) {
        let mut pit = Pit::new(SimDuration::from_millis(5));
        let mut names = std::collections::HashMap::new();
        for (tok, nonce, face, t) in ops {
            let name = Name::parse(&format!("/p/~t{tok}")).unwrap();
            let i = Interest::new(name.clone(), nonce, 4);
            names.insert(i.digest(), name);
            let r = pit.insert(&i, FaceId(face), SimTime(t * 1000));
            if r == PitInsert::Created {
                prop_assert!(pit.get(&i.digest()).is_some());
            }
            for e in pit.iter() {
                for d in &e.downstream {
                    prop_assert_eq!(names.get(&d.digest), Some(&e.name));
                }
                let mut faces: Vec<_> = e.faces().collect();
                faces.sort();
                faces.dedup();
                prop_assert_eq!(faces.len(), e.downstream.len());
            }
        }
    }
}
