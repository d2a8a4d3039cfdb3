//! The openable OR sigma protocol.
//!
//! A prover holding the witness `s` for one statement `E_k` in a ring
//! `E_1..E_n` commits to blinded copies of every statement together with an
//! opening slot bound to a master public key `E_m`:
//!
//! * `alphas[i] = Δ_i · E_i`, `betas[i] = Δ'_i · alphas[i]`
//! * `gammas = τ({ b · betas[i] })` (sent permuted)
//! * `e_open = Δ_k Δ'_k s · E_m`, `e_check = b · e_open`
//!
//! The four challenges reveal, respectively, the `Δ` vector, the `Δ'`
//! vector, the blinder `b`, and the link `l = Δ_k Δ'_k b s`. Whoever holds
//! the master secret `s_m` recovers the proven statement by locating the
//! unique `i` with `s_m · betas[i] = e_open`.
//!
//! [`simulate`] is the honest-verifier simulator (a perfect one: its
//! transcript distribution equals the prover's, which the test suite checks
//! by full enumeration on the tiny backend), and [`extract`] is the
//! 4-special-soundness extractor whose output always matches the opening.

use rand::{Rng, RngCore};

use crate::action::{Action, GroupElement, SetElement};
use crate::error::{Error, Result};

/// A verifier challenge, one of `{1, 2, 3, 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Challenge(u8);

impl Challenge {
    pub const ALL: [Challenge; 4] = [Challenge(1), Challenge(2), Challenge(3), Challenge(4)];

    pub fn new(value: u8) -> Result<Self> {
        if (1..=4).contains(&value) {
            Ok(Challenge(value))
        } else {
            Err(Error::InvalidChallenge(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn sample(rng: &mut (impl RngCore + ?Sized)) -> Self {
        Challenge(rng.gen_range(1..=4))
    }
}

/// First prover message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    pub alphas: Vec<SetElement>,
    pub betas: Vec<SetElement>,
    /// Blinded third layer, already permuted by the prover's `τ`.
    pub gammas: Vec<SetElement>,
    pub e_open: SetElement,
    pub e_check: SetElement,
}

impl Commitment {
    pub fn ring_size(&self) -> usize {
        self.alphas.len()
    }

    fn shape_ok(&self, n: usize) -> bool {
        self.alphas.len() == n && self.betas.len() == n && self.gammas.len() == n
    }
}

/// Prover state carried from [`commit`] to [`respond`]. Holds secrets;
/// single-owner by construction.
#[derive(Debug, Clone)]
pub struct ProverState {
    pub(crate) deltas: Vec<GroupElement>,
    pub(crate) delta_primes: Vec<GroupElement>,
    pub(crate) blinder: GroupElement,
    pub(crate) link: GroupElement,
    pub(crate) witness_index: usize,
    /// Kept with the rest of the commit randomness; no response reveals it.
    #[allow(dead_code)]
    pub(crate) tau: Vec<usize>,
}

impl ProverState {
    pub fn witness_index(&self) -> usize {
        self.witness_index
    }
}

/// Third prover message; the variant answers exactly one challenge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    /// ch = 1
    Deltas(Vec<GroupElement>),
    /// ch = 2
    DeltaPrimes(Vec<GroupElement>),
    /// ch = 3
    Blinder(GroupElement),
    /// ch = 4
    Link(GroupElement),
}

impl Response {
    /// The challenge value this response answers.
    pub fn challenge_value(&self) -> u8 {
        match self {
            Response::Deltas(_) => 1,
            Response::DeltaPrimes(_) => 2,
            Response::Blinder(_) => 3,
            Response::Link(_) => 4,
        }
    }
}

/// Explicit commit randomness, for enumeration oracles and seeded fixtures.
#[derive(Debug, Clone)]
pub struct CommitRandomness {
    pub deltas: Vec<GroupElement>,
    pub delta_primes: Vec<GroupElement>,
    pub blinder: GroupElement,
    pub tau: Vec<usize>,
}

impl CommitRandomness {
    pub fn sample(action: &Action, n: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        CommitRandomness {
            deltas: (0..n).map(|_| action.sample_group(rng)).collect(),
            delta_primes: (0..n).map(|_| action.sample_group(rng)).collect(),
            blinder: action.sample_group(rng),
            tau: sample_permutation(n, rng),
        }
    }
}

/// Fisher-Yates permutation of `[0, n)`.
pub(crate) fn sample_permutation(n: usize, rng: &mut (impl RngCore + ?Sized)) -> Vec<usize> {
    let mut tau: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        tau.swap(i, j);
    }
    tau
}

fn is_permutation(tau: &[usize], n: usize) -> bool {
    if tau.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &t in tau {
        if t >= n || seen[t] {
            return false;
        }
        seen[t] = true;
    }
    true
}

pub(crate) fn all_distinct(action: &Action, elems: &[SetElement]) -> bool {
    let mut enc: Vec<Vec<u8>> = elems.iter().map(|e| action.encode_set(e)).collect();
    enc.sort_unstable();
    enc.windows(2).all(|w| w[0] != w[1])
}

fn locate_witness(action: &Action, ring: &[SetElement], s: &GroupElement) -> Result<usize> {
    let pk = action.act(s, &action.base_point())?;
    ring.iter().position(|e| *e == pk).ok_or(Error::WitnessNotInRing)
}

/// Generate a commitment and prover state for the statement matched by `s`.
///
/// Randomness with colliding `betas` (which the verifier would reject) is
/// re-sampled, so honest transcripts always verify.
pub fn commit(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    s: &GroupElement,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(Commitment, ProverState)> {
    if !all_distinct(action, ring) {
        return Err(Error::DuplicateStatement);
    }
    let k = locate_witness(action, ring, s)?;
    commit_at(action, e_m, ring, k, s, rng)
}

/// Commit with the witness index already located (one action per call
/// saved; multi-session signing locates once for all sessions).
pub(crate) fn commit_at(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    k: usize,
    s: &GroupElement,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(Commitment, ProverState)> {
    if ring.is_empty() {
        return Err(Error::InvalidElement("empty ring"));
    }
    loop {
        let rand = CommitRandomness::sample(action, ring.len(), rng);
        let (com, st) = commit_located(action, e_m, ring, k, s, &rand)?;
        if all_distinct(action, &com.betas) {
            return Ok((com, st));
        }
    }
}

/// Deterministic commit from explicit randomness. Does not re-sample on
/// `betas` collisions; enumeration oracles rely on seeing the raw map.
pub fn commit_with_randomness(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    s: &GroupElement,
    rand: &CommitRandomness,
) -> Result<(Commitment, ProverState)> {
    let k = locate_witness(action, ring, s)?;
    commit_located(action, e_m, ring, k, s, rand)
}

fn commit_located(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    k: usize,
    s: &GroupElement,
    rand: &CommitRandomness,
) -> Result<(Commitment, ProverState)> {
    let n = ring.len();
    if rand.deltas.len() != n || rand.delta_primes.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: rand.deltas.len() });
    }
    if !is_permutation(&rand.tau, n) {
        return Err(Error::InvalidElement("tau is not a permutation"));
    }

    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    let mut gammas_raw = Vec::with_capacity(n);
    for (i, statement) in ring.iter().enumerate() {
        // All three layers are powers of the ring base, so compose the
        // exponents and act once per layer; fixed-base tables then apply.
        let dd = action.compose(&rand.deltas[i], &rand.delta_primes[i])?;
        let ddb = action.compose(&dd, &rand.blinder)?;
        alphas.push(action.act(&rand.deltas[i], statement)?);
        betas.push(action.act(&dd, statement)?);
        gammas_raw.push(action.act(&ddb, statement)?);
    }
    let dd_k = action.compose(&rand.deltas[k], &rand.delta_primes[k])?;
    let dds = action.compose(&dd_k, s)?;
    let e_open = action.act(&dds, e_m)?;
    let link = action.compose(&dds, &rand.blinder)?;
    let e_check = action.act(&link, e_m)?;

    let gammas = rand.tau.iter().map(|&i| gammas_raw[i].clone()).collect();
    let com = Commitment { alphas, betas, gammas, e_open, e_check };
    let st = ProverState {
        deltas: rand.deltas.clone(),
        delta_primes: rand.delta_primes.clone(),
        blinder: rand.blinder.clone(),
        link,
        witness_index: k,
        tau: rand.tau.clone(),
    };
    Ok((com, st))
}

/// Answer a challenge from the prover state.
pub fn respond(st: &ProverState, ch: Challenge) -> Response {
    match ch.value() {
        1 => Response::Deltas(st.deltas.clone()),
        2 => Response::DeltaPrimes(st.delta_primes.clone()),
        3 => Response::Blinder(st.blinder.clone()),
        _ => Response::Link(st.link.clone()),
    }
}

/// Verify one transcript. Total: malformed inputs yield `false`.
pub fn verify(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    com: &Commitment,
    ch: Challenge,
    resp: &Response,
) -> bool {
    let n = ring.len();
    if n == 0 || !com.shape_ok(n) {
        return false;
    }
    if !all_distinct(action, ring) || !all_distinct(action, &com.betas) {
        return false;
    }
    if resp.challenge_value() != ch.value() {
        return false;
    }
    match resp {
        Response::Deltas(deltas) => {
            deltas.len() == n
                && deltas.iter().zip(ring).zip(&com.alphas).all(|((d, e), a)| {
                    action.act(d, e).map(|x| x == *a).unwrap_or(false)
                })
        }
        Response::DeltaPrimes(dps) => {
            dps.len() == n
                && dps.iter().zip(&com.alphas).zip(&com.betas).all(|((d, a), b)| {
                    action.act(d, a).map(|x| x == *b).unwrap_or(false)
                })
        }
        Response::Blinder(b) => {
            let mut blinded: Vec<Vec<u8>> = Vec::with_capacity(n + 1);
            for beta in &com.betas {
                match action.act(b, beta) {
                    Ok(x) => blinded.push(action.encode_set(&x)),
                    Err(_) => return false,
                }
            }
            let mut gammas: Vec<Vec<u8>> = com.gammas.iter().map(|g| action.encode_set(g)).collect();
            blinded.sort_unstable();
            gammas.sort_unstable();
            blinded == gammas
                && action.act(b, &com.e_open).map(|x| x == com.e_check).unwrap_or(false)
        }
        Response::Link(l) => {
            let check = match action.act(l, e_m) {
                Ok(x) => x == com.e_check,
                Err(_) => return false,
            };
            let gamma_hit = match action.act(l, &action.base_point()) {
                Ok(x) => com.gammas.contains(&x),
                Err(_) => return false,
            };
            check && gamma_hit
        }
    }
}

/// Reveal which ring statement a commitment proves, using the master
/// secret. `None` when the commitment opens nowhere (malformed or
/// adversarial `e_open`).
pub fn open(
    action: &Action,
    s_m: &GroupElement,
    ring: &[SetElement],
    com: &Commitment,
) -> Result<Option<SetElement>> {
    if com.betas.len() != ring.len() {
        return Err(Error::LengthMismatch { expected: ring.len(), got: com.betas.len() });
    }
    // s_m · betas[i] = e_open  <=>  betas[i] = s_m^{-1} · e_open, so one
    // action suffices for the whole scan.
    let target = action.act(&action.invert(s_m)?, &com.e_open)?;
    for (i, beta) in com.betas.iter().enumerate() {
        if *beta == target {
            return Ok(Some(ring[i].clone()));
        }
    }
    Ok(None)
}

/// Explicit simulator randomness, for enumeration oracles.
///
/// For `ch = 1` the response vector is `deltas` and `ds` carries the fresh
/// exponents building `betas` from the base point; for `ch >= 2` the roles
/// flip: `ds` builds `alphas` from the base point and `deltas` plays `Δ'`.
#[derive(Debug, Clone)]
pub struct SimRandomness {
    pub deltas: Vec<GroupElement>,
    pub ds: Vec<GroupElement>,
    pub blinder: GroupElement,
    pub tau: Vec<usize>,
}

impl SimRandomness {
    pub fn sample(action: &Action, n: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        SimRandomness {
            deltas: (0..n).map(|_| action.sample_group(rng)).collect(),
            ds: (0..n).map(|_| action.sample_group(rng)).collect(),
            blinder: action.sample_group(rng),
            tau: sample_permutation(n, rng),
        }
    }
}

/// Honest-verifier simulator. Needs no witness, only the statement `e_k`
/// the transcript should open to. The output always verifies, and opening
/// it with any master secret matching `e_m` yields `e_k`.
pub fn simulate(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    e_k: &SetElement,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(Commitment, Challenge, Response)> {
    let k = ring.iter().position(|e| e == e_k).ok_or(Error::StatementNotInRing)?;
    let ch = Challenge::sample(rng);
    loop {
        let rand = SimRandomness::sample(action, ring.len(), rng);
        let (com, resp) = simulate_with_randomness(action, e_m, ring, k, ch, &rand)?;
        if all_distinct(action, &com.betas) {
            return Ok((com, ch, resp));
        }
    }
}

/// Deterministic simulator from explicit randomness; no re-sampling.
pub fn simulate_with_randomness(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    k: usize,
    ch: Challenge,
    rand: &SimRandomness,
) -> Result<(Commitment, Response)> {
    let n = ring.len();
    if k >= n {
        return Err(Error::StatementNotInRing);
    }
    if rand.deltas.len() != n || rand.ds.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: rand.deltas.len() });
    }
    if !is_permutation(&rand.tau, n) {
        return Err(Error::InvalidElement("tau is not a permutation"));
    }
    let e0 = action.base_point();

    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    if ch.value() == 1 {
        for (i, statement) in ring.iter().enumerate() {
            alphas.push(action.act(&rand.deltas[i], statement)?);
            let dd = action.compose(&rand.deltas[i], &rand.ds[i])?;
            betas.push(action.act(&dd, &e0)?);
        }
    } else {
        for i in 0..n {
            let a = action.act(&rand.ds[i], &e0)?;
            betas.push(action.act(&rand.deltas[i], &a)?);
            alphas.push(a);
        }
    }
    let dk = action.compose(&rand.deltas[k], &rand.ds[k])?;
    let e_open = action.act(&dk, e_m)?;

    let mut gammas_raw = Vec::with_capacity(n);
    for beta in &betas {
        gammas_raw.push(action.act(&rand.blinder, beta)?);
    }
    let gammas: Vec<SetElement> = rand.tau.iter().map(|&i| gammas_raw[i].clone()).collect();

    let (e_check, resp) = match ch.value() {
        1 => (action.act(&rand.blinder, &e_open)?, Response::Deltas(rand.deltas.clone())),
        2 => (action.act(&rand.blinder, &e_open)?, Response::DeltaPrimes(rand.deltas.clone())),
        3 => (action.act(&rand.blinder, &e_open)?, Response::Blinder(rand.blinder.clone())),
        _ => {
            let link = action.compose(&dk, &rand.blinder)?;
            (action.act(&link, e_m)?, Response::Link(link))
        }
    };

    Ok((Commitment { alphas, betas, gammas, e_open, e_check }, resp))
}

/// 4-special-soundness extractor. Given one commitment and verifying
/// responses for all four challenges (in challenge order), returns the
/// ring index `k` the commitment opens to and a witness `s` with
/// `s · E0 = ring[k]`.
pub fn extract(
    action: &Action,
    ring: &[SetElement],
    com: &Commitment,
    responses: &[Response; 4],
) -> Result<(usize, GroupElement)> {
    let (deltas, delta_primes, blinder, link) = match responses {
        [Response::Deltas(d), Response::DeltaPrimes(dp), Response::Blinder(b), Response::Link(l)] => {
            (d, dp, b, l)
        }
        _ => return Err(Error::ProtocolViolation("extractor needs responses for challenges 1..4 in order")),
    };
    if deltas.len() != ring.len() || delta_primes.len() != ring.len() {
        return Err(Error::LengthMismatch { expected: ring.len(), got: deltas.len() });
    }
    let target = action.act(link, &action.base_point())?;
    for (k, beta) in com.betas.iter().enumerate() {
        if action.act(blinder, beta)? == target {
            let mixed = action.compose(&action.compose(&deltas[k], &delta_primes[k])?, blinder)?;
            let s = action.compose(link, &action.invert(&mixed)?)?;
            return Ok((k, s));
        }
    }
    Err(Error::NoMatchingSession)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// Tiny-backend fixture used throughout: E0 = 2, master (8, 3),
    /// ring (9, 13) with secrets (5, 7), witness index 0.
    pub(crate) struct Fixture {
        pub action: Action,
        pub e_m: SetElement,
        pub s_m: GroupElement,
        pub ring: Vec<SetElement>,
        pub sks: Vec<GroupElement>,
    }

    pub(crate) fn fixture() -> Fixture {
        let action = Action::tiny();
        let e_m = action.elem_from_u64(8).unwrap();
        let s_m = action.scalar_from_u64(3).unwrap();
        let ring = vec![action.elem_from_u64(9).unwrap(), action.elem_from_u64(13).unwrap()];
        let sks = vec![action.scalar_from_u64(5).unwrap(), action.scalar_from_u64(7).unwrap()];
        Fixture { action, e_m, s_m, ring, sks }
    }

    fn fixed_randomness(action: &Action) -> CommitRandomness {
        CommitRandomness {
            deltas: vec![action.scalar_from_u64(2).unwrap(), action.scalar_from_u64(4).unwrap()],
            delta_primes: vec![action.scalar_from_u64(3).unwrap(), action.scalar_from_u64(2).unwrap()],
            blinder: action.scalar_from_u64(6).unwrap(),
            tau: vec![0, 1],
        }
    }

    #[test]
    fn commit_matches_hand_computed_fixture() {
        let f = fixture();
        let a = &f.action;
        let (com, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        let elems = |vals: &[u64]| -> Vec<SetElement> {
            vals.iter().map(|&v| a.elem_from_u64(v).unwrap()).collect()
        };
        assert_eq!(com.alphas, elems(&[12, 18]));
        assert_eq!(com.betas, elems(&[3, 2]));
        assert_eq!(com.gammas, elems(&[16, 18]));
        assert_eq!(com.e_open, a.elem_from_u64(4).unwrap());
        assert_eq!(com.e_check, a.elem_from_u64(2).unwrap());
        assert_eq!(st.link, a.scalar_from_u64(4).unwrap());
        assert_eq!(st.witness_index, 0);
    }

    #[test]
    fn respond_returns_the_matching_state_part() {
        let f = fixture();
        let a = &f.action;
        let (_, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        assert_eq!(
            respond(&st, Challenge::new(4).unwrap()),
            Response::Link(a.scalar_from_u64(4).unwrap())
        );
        assert_eq!(
            respond(&st, Challenge::new(3).unwrap()),
            Response::Blinder(a.scalar_from_u64(6).unwrap())
        );
        assert_eq!(Challenge::new(0), Err(Error::InvalidChallenge(0)));
        assert_eq!(Challenge::new(5), Err(Error::InvalidChallenge(5)));
    }

    #[test]
    fn honest_transcripts_verify_for_every_challenge() {
        let f = fixture();
        let a = &f.action;
        let (com, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        for ch in Challenge::ALL {
            let resp = respond(&st, ch);
            assert!(verify(a, &f.e_m, &f.ring, &com, ch, &resp), "ch={}", ch.value());
        }
    }

    #[test]
    fn tampered_check_element_fails_challenge_four() {
        let f = fixture();
        let a = &f.action;
        let (mut com, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let r = a.sample_group(&mut rng);
        let fresh = a.act(&st.blinder, &a.act(&r, &a.base_point()).unwrap()).unwrap();
        com.e_check = fresh;
        let ch = Challenge::new(4).unwrap();
        let resp = respond(&st, ch);
        assert!(!verify(a, &f.e_m, &f.ring, &com, ch, &resp));
    }

    #[test]
    fn open_identifies_the_witness_statement() {
        let f = fixture();
        let a = &f.action;
        let (com, _) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        assert_eq!(open(a, &f.s_m, &f.ring, &com).unwrap(), Some(f.ring[0].clone()));
        // Opening reads only betas and e_open, so permuting gammas is inert.
        let mut permuted = com.clone();
        permuted.gammas.reverse();
        assert_eq!(open(a, &f.s_m, &f.ring, &permuted).unwrap(), Some(f.ring[0].clone()));
    }

    #[test]
    fn open_returns_none_for_decoupled_commitments() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut misses = 0;
        for _ in 0..200 {
            let (mut com, _) = commit(a, &f.e_m, &f.ring, &f.sks[0], &mut rng).unwrap();
            let r = a.sample_group(&mut rng);
            com.e_open = a.act(&r, &a.base_point()).unwrap();
            if open(a, &f.s_m, &f.ring, &com).unwrap().is_none() {
                misses += 1;
            }
        }
        // Collision chance is n/q = 2/11 per trial; none at all would be
        // astronomically unlikely, as would fewer than half misses.
        assert!(misses > 120, "misses = {misses}");
    }

    #[test]
    fn open_checks_ring_length() {
        let f = fixture();
        let a = &f.action;
        let (com, _) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        let short = &f.ring[..1];
        assert_eq!(
            open(a, &f.s_m, short, &com),
            Err(Error::LengthMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn commit_rejects_duplicate_and_foreign_rings() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let dup = vec![f.ring[0].clone(), f.ring[0].clone()];
        assert_eq!(commit(a, &f.e_m, &dup, &f.sks[0], &mut rng).unwrap_err(), Error::DuplicateStatement);
        let foreign = a.scalar_from_u64(9).unwrap();
        assert_eq!(
            commit(a, &f.e_m, &f.ring, &foreign, &mut rng).unwrap_err(),
            Error::WitnessNotInRing
        );
    }

    #[test]
    fn single_statement_ring_opens_to_it() {
        let f = fixture();
        let a = &f.action;
        let ring = vec![f.ring[0].clone()];
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (com, _) = commit(a, &f.e_m, &ring, &f.sks[0], &mut rng).unwrap();
        assert_eq!(open(a, &f.s_m, &ring, &com).unwrap(), Some(ring[0].clone()));
    }

    #[test]
    fn simulated_transcripts_verify_and_open_to_the_target() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..200 {
            for target in 0..2 {
                let (com, ch, resp) =
                    simulate(a, &f.e_m, &f.ring, &f.ring[target], &mut rng).unwrap();
                assert!(verify(a, &f.e_m, &f.ring, &com, ch, &resp));
                assert_eq!(open(a, &f.s_m, &f.ring, &com).unwrap(), Some(f.ring[target].clone()));
            }
        }
    }

    #[test]
    fn simulate_rejects_statements_outside_the_ring() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let outsider = a.elem_from_u64(3).unwrap();
        assert_eq!(
            simulate(a, &f.e_m, &f.ring, &outsider, &mut rng).unwrap_err(),
            Error::StatementNotInRing
        );
    }

    #[test]
    fn extractor_recovers_the_witness_from_the_fixture() {
        let f = fixture();
        let a = &f.action;
        let (com, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        let resps = [
            respond(&st, Challenge::new(1).unwrap()),
            respond(&st, Challenge::new(2).unwrap()),
            respond(&st, Challenge::new(3).unwrap()),
            respond(&st, Challenge::new(4).unwrap()),
        ];
        let (k, s) = extract(a, &f.ring, &com, &resps).unwrap();
        assert_eq!(k, 0);
        assert_eq!(s, f.sks[0]);
    }

    #[test]
    fn extraction_matches_opening_on_honest_commitments() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for trial in 0..500 {
            let signer = trial % 2;
            let (com, st) = commit(a, &f.e_m, &f.ring, &f.sks[signer], &mut rng).unwrap();
            let resps = [
                respond(&st, Challenge::new(1).unwrap()),
                respond(&st, Challenge::new(2).unwrap()),
                respond(&st, Challenge::new(3).unwrap()),
                respond(&st, Challenge::new(4).unwrap()),
            ];
            for (ch, resp) in Challenge::ALL.iter().zip(&resps) {
                assert!(verify(a, &f.e_m, &f.ring, &com, *ch, resp));
            }
            let (k, s) = extract(a, &f.ring, &com, &resps).unwrap();
            assert_eq!(k, signer);
            assert_eq!(a.act(&s, &a.base_point()).unwrap(), f.ring[signer]);
            assert_eq!(open(a, &f.s_m, &f.ring, &com).unwrap(), Some(f.ring[signer].clone()));
        }
    }

    #[test]
    fn tampered_link_response_fails_verification() {
        let f = fixture();
        let a = &f.action;
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let (com, st) = commit(a, &f.e_m, &f.ring, &f.sks[0], &mut rng).unwrap();
        let honest = respond(&st, Challenge::new(4).unwrap());
        let mut hits = 0;
        for _ in 0..50 {
            let r = a.sample_group(&mut rng);
            if Response::Link(r.clone()) == honest {
                continue;
            }
            if verify(a, &f.e_m, &f.ring, &com, Challenge::new(4).unwrap(), &Response::Link(r)) {
                hits += 1;
            }
        }
        assert_eq!(hits, 0);
    }

    #[test]
    fn wrong_variant_or_shape_fails_verification() {
        let f = fixture();
        let a = &f.action;
        let (com, st) =
            commit_with_randomness(a, &f.e_m, &f.ring, &f.sks[0], &fixed_randomness(a)).unwrap();
        let ch1 = Challenge::new(1).unwrap();
        // Response variant must match the challenge.
        assert!(!verify(a, &f.e_m, &f.ring, &com, ch1, &respond(&st, Challenge::new(3).unwrap())));
        // Truncated vector response.
        let short = Response::Deltas(vec![st.deltas[0].clone()]);
        assert!(!verify(a, &f.e_m, &f.ring, &com, ch1, &short));
    }
}
