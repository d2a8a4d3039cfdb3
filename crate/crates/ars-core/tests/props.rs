//! Property tests for the structural invariants: action laws, encoding
//! injectivity, majority-vote permutation invariance, and end-to-end
//! completeness under arbitrary seeds.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ars_core::action::Action;
use ars_core::ars::{self, Params};
use ars_core::codec;
use ars_core::sigma::{self, Challenge};

/// Members of the tiny backend's acted set.
const TINY_SET: [u64; 10] = [2, 3, 4, 6, 8, 9, 12, 13, 16, 18];

fn group_elem() -> impl Strategy<Value = u64> {
    1u64..11
}

fn set_elem() -> impl Strategy<Value = u64> {
    prop::sample::select(&TINY_SET[..])
}

proptest! {
    #[test]
    fn action_is_homomorphic_and_free(a in group_elem(), b in group_elem(), e in set_elem()) {
        let action = Action::tiny();
        let a = action.scalar_from_u64(a).unwrap();
        let b = action.scalar_from_u64(b).unwrap();
        let e = action.elem_from_u64(e).unwrap();
        let ab = action.compose(&a, &b).unwrap();
        prop_assert_eq!(
            action.act(&ab, &e).unwrap(),
            action.act(&a, &action.act(&b, &e).unwrap()).unwrap()
        );
        prop_assert_eq!(action.act(&action.identity(), &e).unwrap(), e.clone());
        if a != action.identity() {
            prop_assert_ne!(action.act(&a, &e).unwrap(), e);
        }
        // Inversion really inverts.
        let inv = action.invert(&a).unwrap();
        prop_assert_eq!(action.compose(&a, &inv).unwrap(), action.identity());
        prop_assert_eq!(action.invert(&inv).unwrap(), a);
    }

    #[test]
    fn encodings_round_trip_canonically(a in group_elem(), e in set_elem()) {
        let action = Action::tiny();
        let a = action.scalar_from_u64(a).unwrap();
        let e = action.elem_from_u64(e).unwrap();
        let sb = action.encode_scalar(&a);
        prop_assert_eq!(action.encode_scalar(&action.decode_scalar(&sb).unwrap()), sb);
        let eb = action.encode_set(&e);
        prop_assert_eq!(action.encode_set(&action.decode_set(&eb).unwrap()), eb);
    }

    #[test]
    fn maj_is_permutation_invariant(
        votes in prop::collection::vec(prop::option::of(set_elem()), 1..12),
        swaps in prop::collection::vec((0usize..12, 0usize..12), 0..8),
    ) {
        let action = Action::tiny();
        let outs: Vec<_> = votes
            .iter()
            .map(|v| v.map(|x| action.elem_from_u64(x).unwrap()))
            .collect();
        let mut shuffled = outs.clone();
        for (i, j) in swaps {
            let (i, j) = (i % shuffled.len(), j % shuffled.len());
            shuffled.swap(i, j);
        }
        prop_assert_eq!(ars::maj(&outs), ars::maj(&shuffled));
    }

    #[test]
    fn signatures_complete_and_open_for_arbitrary_seeds(
        seed in any::<u64>(),
        lambda in 1u32..4,
        signer in 0usize..2,
    ) {
        let action = Action::tiny();
        let params = Params::new(lambda).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let master = ars::mkeygen(&action, &mut rng);
        let mut members = Vec::new();
        while members.len() < 2 {
            let kp = ars::keygen(&action, &mut rng);
            if kp.public != master.public
                && members.iter().all(|m: &ars::KeyPair| m.public != kp.public)
            {
                members.push(kp);
            }
        }
        let ring: Vec<_> = members.iter().map(|m| m.public.clone()).collect();
        let sig = ars::sign(
            &action,
            &master.public,
            &ring,
            b"prop",
            &members[signer].secret,
            &params,
            &mut rng,
        )
        .unwrap();
        prop_assert!(ars::verify(&action, &master.public, &ring, b"prop", &sig, &params));
        prop_assert_eq!(
            ars::open(&action, &master.secret, &ring, b"prop", &sig, &params).unwrap(),
            Some(ring[signer].clone())
        );
        // Codec round trip on a protocol-generated object.
        let bytes = codec::encode_signature(&action, &sig);
        prop_assert_eq!(codec::decode_signature(&action, &bytes).unwrap(), sig);
    }

    #[test]
    fn transcripts_verify_and_extract_for_arbitrary_seeds(seed in any::<u64>()) {
        let action = Action::tiny();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let e_m = action.elem_from_u64(8).unwrap();
        let s_m = action.scalar_from_u64(3).unwrap();
        let ring = vec![action.elem_from_u64(9).unwrap(), action.elem_from_u64(13).unwrap()];
        let sks = [action.scalar_from_u64(5).unwrap(), action.scalar_from_u64(7).unwrap()];
        let signer = (seed % 2) as usize;
        let (com, st) = sigma::commit(&action, &e_m, &ring, &sks[signer], &mut rng).unwrap();
        let resps = [
            sigma::respond(&st, Challenge::new(1).unwrap()),
            sigma::respond(&st, Challenge::new(2).unwrap()),
            sigma::respond(&st, Challenge::new(3).unwrap()),
            sigma::respond(&st, Challenge::new(4).unwrap()),
        ];
        for (ch, resp) in Challenge::ALL.iter().zip(&resps) {
            prop_assert!(sigma::verify(&action, &e_m, &ring, &com, *ch, resp));
        }
        let (k, s) = sigma::extract(&action, &ring, &com, &resps).unwrap();
        prop_assert_eq!(k, signer);
        prop_assert_eq!(s, sks[signer].clone());
        prop_assert_eq!(
            sigma::open(&action, &s_m, &ring, &com).unwrap(),
            Some(ring[signer].clone())
        );
    }
}
