use std::time::Instant;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use ars_core::action::Action;
use ars_core::ars::{self, Params};

#[test]
#[ignore]
fn probe() {
    let action = Action::realistic();
    let params = Params::new(8).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for n in [1usize, 2, 4] {
        let master = ars::mkeygen(&action, &mut rng);
        let members: Vec<_> = (0..n).map(|_| ars::keygen(&action, &mut rng)).collect();
        let ring: Vec<_> = members.iter().map(|m| m.public.clone()).collect();
        let mut msg = [0u8; 16];

        // warm tables
        let _ = ars::sign(&action, &master.public, &ring, &msg, &members[0].secret, &params, &mut rng).unwrap();

        let trials = 12;
        let mut t_sign = std::time::Duration::ZERO;
        let mut t_verify = std::time::Duration::ZERO;
        let mut t_open = std::time::Duration::ZERO;
        for i in 0..trials {
            rng.fill_bytes(&mut msg);
            let t0 = Instant::now();
            let sig = ars::sign(&action, &master.public, &ring, &msg, &members[i % n].secret, &params, &mut rng).unwrap();
            t_sign += t0.elapsed();
            let t1 = Instant::now();
            assert!(ars::verify(&action, &master.public, &ring, &msg, &sig, &params));
            t_verify += t1.elapsed();
            let t2 = Instant::now();
            let _ = ars::open(&action, &master.secret, &ring, &msg, &sig, &params).unwrap();
            t_open += t2.elapsed();
        }
        println!(
            "n={n}: sign {:?}  verify {:?}  open {:?}  (per trial)",
            t_sign / trials as u32, t_verify / trials as u32, t_open / trials as u32
        );
    }
    // raw op costs
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let base = action.act(&action.sample_group(&mut rng), &action.base_point()).unwrap();
    let exps: Vec<_> = (0..40).map(|_| action.sample_group(&mut rng)).collect();
    let t0 = Instant::now();
    for e in &exps { let _ = action.act(e, &base).unwrap(); }
    println!("cold act: {:?}", t0.elapsed() / 40);
    action.prepare_base(&base);
    let t1 = Instant::now();
    for e in &exps { let _ = action.act(e, &base).unwrap(); }
    println!("warm act: {:?}", t1.elapsed() / 40);
    let t2 = Instant::now();
    action.prepare_base(&action.base_point());
    println!("table build: {:?}", t2.elapsed());
}
