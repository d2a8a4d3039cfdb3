//! Executable security games and proof machinery: a programmable random
//! oracle with fork-and-replay support, the oracle-programming signer
//! simulator, the witness-independent hybrid transcript generator, an
//! unforgeability game runner, and a forking-lemma rewinder that feeds the
//! 4-special-soundness extractor.
//!
//! Game instances are single-threaded (rewinding mutates oracle state);
//! independent instances can run concurrently.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::action::{Action, GroupElement, SetElement};
use crate::ars::{self, ChallengeOracle, KeyPair, Params, Signature};
use crate::codec;
use crate::error::{Error, Result};
use crate::exec::map_sessions;
use crate::sigma::{self, Challenge, Commitment, Response};

/// A programmable random oracle over signature-challenge queries.
///
/// Answers are memoized by query payload, so identical queries always get
/// identical answers. [`ProgrammableOracle::fork`] erases every answer
/// first drawn at or after a given query index; replayed queries before
/// the fork point hit the memo, later ones draw fresh uniform answers.
pub struct ProgrammableOracle {
    entries: HashMap<Vec<u8>, (usize, Vec<Challenge>)>,
    log: Vec<Vec<u8>>,
    rng: ChaCha20Rng,
}

impl ProgrammableOracle {
    pub fn new(seed: u64) -> Self {
        ProgrammableOracle {
            entries: HashMap::new(),
            log: Vec::new(),
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Number of distinct queries answered so far.
    pub fn query_count(&self) -> usize {
        self.log.len()
    }

    /// The canonical slot key for a `(com⃗, m)` query.
    pub fn slot_key(action: &Action, coms: &[Commitment], msg: &[u8]) -> Vec<u8> {
        codec::signature_challenge_payload(action, coms, msg)
    }

    /// Fix the answer for a not-yet-queried slot.
    pub fn program(
        &mut self,
        action: &Action,
        coms: &[Commitment],
        msg: &[u8],
        answer: Vec<Challenge>,
    ) -> Result<()> {
        let key = Self::slot_key(action, coms, msg);
        if self.entries.contains_key(&key) {
            return Err(Error::OracleCollision);
        }
        self.entries.insert(key.clone(), (self.log.len(), answer));
        self.log.push(key);
        Ok(())
    }

    /// Forget every answer first drawn at or after query index `at`.
    /// Fresh randomness continues from the oracle's stream, so re-asked
    /// queries receive new uniform answers.
    pub fn fork(&mut self, at: usize) {
        self.entries.retain(|_, (idx, _)| *idx < at);
        self.log.truncate(at);
    }

    /// Position of a slot key in the query log, if it has been asked.
    pub fn position_of(&self, key: &[u8]) -> Option<usize> {
        self.entries.get(key).map(|(idx, _)| *idx)
    }

    fn fresh_answer(&mut self, t: usize) -> Vec<Challenge> {
        (0..t).map(|_| Challenge::sample(&mut self.rng)).collect()
    }
}

impl ChallengeOracle for ProgrammableOracle {
    fn challenges(&mut self, action: &Action, coms: &[Commitment], msg: &[u8]) -> Vec<Challenge> {
        let key = Self::slot_key(action, coms, msg);
        if let Some((_, answer)) = self.entries.get(&key) {
            return answer.clone();
        }
        let answer = self.fresh_answer(coms.len());
        self.entries.insert(key.clone(), (self.log.len(), answer.clone()));
        self.log.push(key);
        answer
    }
}

/// Sign without the witness: simulate every session for `pk_target` and
/// program the oracle so challenge re-derivation agrees. The output
/// verifies under the programmed oracle and opens to `pk_target`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_sign(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    msg: &[u8],
    pk_target: &SetElement,
    params: &Params,
    oracle: &mut ProgrammableOracle,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<Signature> {
    if !sigma::all_distinct(action, ring) {
        return Err(Error::DuplicateStatement);
    }
    if !ring.contains(pk_target) {
        return Err(Error::StatementNotInRing);
    }
    let t = params.session_count(ring.len());
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let sessions = map_sessions(t, |j| {
        let mut session_rng = ChaCha20Rng::from_seed(seed);
        session_rng.set_stream(j as u64);
        sigma::simulate(action, mpk, ring, pk_target, &mut session_rng)
    });
    let mut coms = Vec::with_capacity(t);
    let mut challenges = Vec::with_capacity(t);
    let mut responses = Vec::with_capacity(t);
    for session in sessions {
        let (com, ch, resp) = session?;
        coms.push(com);
        challenges.push(ch);
        responses.push(resp);
    }
    oracle.program(action, &coms, msg, challenges.clone())?;
    Ok(Signature { commitments: coms, challenges, responses })
}

/// Explicit randomness for the witness-independence hybrid.
#[derive(Debug, Clone)]
pub struct Hyb2Randomness {
    pub deltas: Vec<GroupElement>,
    pub delta_primes: Vec<GroupElement>,
    pub blinder: GroupElement,
    pub tau: Vec<usize>,
    /// Decoupled opening exponent: `e_open = r · E0`.
    pub r: GroupElement,
    /// Challenge-4 gamma exponents (`gammas[i] = rs[i] · E0`); unused for
    /// other challenges.
    pub rs: Vec<GroupElement>,
}

impl Hyb2Randomness {
    pub fn sample(action: &Action, n: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        Hyb2Randomness {
            deltas: (0..n).map(|_| action.sample_group(rng)).collect(),
            delta_primes: (0..n).map(|_| action.sample_group(rng)).collect(),
            blinder: action.sample_group(rng),
            tau: sigma::sample_permutation(n, rng),
            r: action.sample_group(rng),
            rs: (0..n).map(|_| action.sample_group(rng)).collect(),
        }
    }
}

/// The second hybrid of the witness-indistinguishability argument: the
/// opening slot is decoupled (`e_open = r · E0`) and, for challenge 4, the
/// gamma layer is replaced by fresh exponents with `l = rs[k]`. For
/// challenges 1-3 no field depends on the witness index at all.
pub fn hyb2_transcript(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    s: &GroupElement,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(Commitment, Challenge, Response)> {
    let ch = Challenge::sample(rng);
    let rand = Hyb2Randomness::sample(action, ring.len(), rng);
    let (com, resp) = hyb2_with_randomness(action, e_m, ring, s, ch, &rand)?;
    Ok((com, ch, resp))
}

/// Deterministic hybrid transcript from explicit randomness.
pub fn hyb2_with_randomness(
    action: &Action,
    e_m: &SetElement,
    ring: &[SetElement],
    s: &GroupElement,
    ch: Challenge,
    rand: &Hyb2Randomness,
) -> Result<(Commitment, Response)> {
    let n = ring.len();
    let pk = action.act(s, &action.base_point())?;
    let k = ring.iter().position(|e| *e == pk).ok_or(Error::WitnessNotInRing)?;
    if rand.deltas.len() != n || rand.delta_primes.len() != n || rand.rs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: rand.deltas.len() });
    }

    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    for (i, statement) in ring.iter().enumerate() {
        let dd = action.compose(&rand.deltas[i], &rand.delta_primes[i])?;
        alphas.push(action.act(&rand.deltas[i], statement)?);
        betas.push(action.act(&dd, statement)?);
    }
    let e_open = action.act(&rand.r, &action.base_point())?;

    let (gammas_raw, e_check, resp) = match ch.value() {
        1..=3 => {
            let mut gammas = Vec::with_capacity(n);
            for beta in &betas {
                gammas.push(action.act(&rand.blinder, beta)?);
            }
            let e_check = action.act(&rand.blinder, &e_open)?;
            let resp = match ch.value() {
                1 => Response::Deltas(rand.deltas.clone()),
                2 => Response::DeltaPrimes(rand.delta_primes.clone()),
                _ => Response::Blinder(rand.blinder.clone()),
            };
            (gammas, e_check, resp)
        }
        _ => {
            let mut gammas = Vec::with_capacity(n);
            for r_i in &rand.rs {
                gammas.push(action.act(r_i, &action.base_point())?);
            }
            let link = rand.rs[k].clone();
            let e_check = action.act(&link, e_m)?;
            (gammas, e_check, Response::Link(link))
        }
    };
    let gammas = rand.tau.iter().map(|&i| gammas_raw[i].clone()).collect();
    Ok((Commitment { alphas, betas, gammas, e_open, e_check }, resp))
}

/// A forgery attempt: the master key, ring and message the adversary chose,
/// plus the signature.
#[derive(Debug, Clone)]
pub struct Forgery {
    pub mpk: SetElement,
    pub ring: Vec<SetElement>,
    pub msg: Vec<u8>,
    pub signature: Signature,
}

/// Tracked state of one unforgeability game.
pub struct GameState {
    pub honest: Vec<KeyPair>,
    pub corrupted: Vec<SetElement>,
    /// `(message, encoded signature)` pairs produced by the sign oracle.
    pub sign_log: Vec<(Vec<u8>, Vec<u8>)>,
}

/// Oracle interface handed to an unforgeability-game adversary.
pub struct UfContext<'a> {
    action: &'a Action,
    params: Params,
    master: KeyPair,
    state: GameState,
    oracle: ProgrammableOracle,
    rng: ChaCha20Rng,
}

impl<'a> UfContext<'a> {
    pub fn action(&self) -> &'a Action {
        self.action
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn master_public(&self) -> &SetElement {
        &self.master.public
    }

    /// The game models a colluding manager: the adversary sees the master
    /// secret.
    pub fn master_secret(&self) -> &GroupElement {
        &self.master.secret
    }

    pub fn honest_public_keys(&self) -> Vec<SetElement> {
        self.state.honest.iter().map(|kp| kp.public.clone()).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Query the game's random oracle directly.
    pub fn oracle_challenges(&mut self, coms: &[Commitment], msg: &[u8]) -> Vec<Challenge> {
        self.oracle.challenges(self.action, coms, msg)
    }

    /// The sign oracle: an honest signature by the owner of `signer`, for
    /// any master key and ring of the adversary's choosing.
    pub fn sign(
        &mut self,
        mpk: &SetElement,
        ring: &[SetElement],
        msg: &[u8],
        signer: &SetElement,
    ) -> Result<Signature> {
        let kp = self
            .state
            .honest
            .iter()
            .find(|kp| kp.public == *signer)
            .ok_or(Error::ProtocolViolation("sign oracle only signs for honest keys"))?
            .clone();
        let mut seed = [0u8; 32];
        self.rng.fill_bytes(&mut seed);
        let mut sign_rng = ChaCha20Rng::from_seed(seed);
        let sig = ars::sign_with_oracle(
            self.action,
            mpk,
            ring,
            msg,
            &kp.secret,
            &self.params,
            &mut sign_rng,
            &mut self.oracle,
        )?;
        self.state
            .sign_log
            .push((msg.to_vec(), codec::encode_signature(self.action, &sig)));
        Ok(sig)
    }

    /// The corruption oracle: reveals an honest key and marks it corrupted.
    pub fn corrupt(&mut self, pk: &SetElement) -> Result<GroupElement> {
        let kp = self
            .state
            .honest
            .iter()
            .find(|kp| kp.public == *pk)
            .ok_or(Error::ProtocolViolation("corrupt oracle only knows honest keys"))?;
        if !self.state.corrupted.contains(pk) {
            self.state.corrupted.push(pk.clone());
        }
        Ok(kp.secret.clone())
    }
}

/// An unforgeability-game adversary; interacts only through the context.
pub trait UfAdversary {
    fn run(&mut self, ctx: &mut UfContext) -> Result<Option<Forgery>>;
}

/// Outcome of one unforgeability game.
#[derive(Debug)]
pub struct UfOutcome {
    pub won: bool,
    pub forgery: Option<Forgery>,
    /// What the master opened the forgery to, when one was produced and
    /// verified.
    pub opened: Option<Option<SetElement>>,
}

/// Run the unforgeability game with `n_h` honest keys. The adversary wins
/// iff its forgery is fresh, verifies under the game oracle and master
/// key, and opens to bottom or to an uncorrupted honest key.
pub fn run_unforgeability_game(
    action: &Action,
    adversary: &mut dyn UfAdversary,
    n_h: usize,
    params: &Params,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<UfOutcome> {
    let master = ars::mkeygen(action, rng);
    let mut honest: Vec<KeyPair> = Vec::with_capacity(n_h);
    while honest.len() < n_h {
        let kp = ars::keygen(action, rng);
        if kp.public != master.public && honest.iter().all(|h| h.public != kp.public) {
            honest.push(kp);
        }
    }
    let mut ctx = UfContext {
        action,
        params: *params,
        master,
        state: GameState { honest, corrupted: Vec::new(), sign_log: Vec::new() },
        oracle: ProgrammableOracle::new(rng.next_u64()),
        rng: ChaCha20Rng::seed_from_u64(rng.next_u64()),
    };
    let forgery = adversary.run(&mut ctx)?;

    let Some(forgery) = forgery else {
        return Ok(UfOutcome { won: false, forgery: None, opened: None });
    };
    let encoded = codec::encode_signature(action, &forgery.signature);
    let fresh = !ctx
        .state
        .sign_log
        .iter()
        .any(|(m, s)| *m == forgery.msg && *s == encoded);
    if !fresh
        || forgery.mpk != ctx.master.public
        || !ars::verify_with_oracle(
            action,
            &ctx.master.public,
            &forgery.ring,
            &forgery.msg,
            &forgery.signature,
            &params.clone(),
            &mut ctx.oracle,
        )
    {
        return Ok(UfOutcome { won: false, forgery: Some(forgery), opened: None });
    }
    let opened = ars::open(
        action,
        &ctx.master.secret,
        &forgery.ring,
        &forgery.msg,
        &forgery.signature,
        params,
    )?;
    let won = match &opened {
        None => true,
        Some(pk) => {
            ctx.state.honest.iter().any(|kp| kp.public == *pk)
                && !ctx.state.corrupted.contains(pk)
        }
    };
    Ok(UfOutcome { won, forgery: Some(forgery), opened: Some(opened) })
}

/// A deterministic forging adversary: same tape and same oracle answers
/// imply the same behavior, which is what makes rewinding exact replay.
pub trait ForgingAdversary {
    fn run(
        &self,
        action: &Action,
        tape: &mut ChaCha20Rng,
        oracle: &mut ProgrammableOracle,
    ) -> Option<Forgery>;
}

/// Rewind-budget constant `c` in `c · Q · t · ln t / ε`.
const FORK_BUDGET_CONSTANT: f64 = 8.0;
/// Hard cap on rewinds regardless of the measured success rate.
const FORK_HARD_CAP: usize = 1_000_000;
/// Fresh runs used to measure the adversary's success rate.
const PROBE_RUNS: usize = 16;

/// Successful fork-and-extract result.
#[derive(Debug)]
pub enum ForkReport {
    /// A witness was extracted from four accepting transcripts that share
    /// the commitment of the named session.
    Extracted {
        session: usize,
        ring_index: usize,
        public: SetElement,
        secret: GroupElement,
        rewinds: usize,
    },
    /// Four accepting transcripts with distinct challenges on one session
    /// resisted extraction; a special-soundness violation witness. Must
    /// never occur for the shipped protocol.
    SoundnessViolation {
        session: usize,
        commitment: Box<Commitment>,
        responses: Box<[Response; 4]>,
    },
}

/// The forking rewinder of the improved forking lemma: measure the
/// adversary's success rate, locate the critical oracle query of one
/// successful run, freeze the query prefix, and replay with fresh oracle
/// answers until some parallel session has accepted transcripts for all
/// four challenges, then extract.
pub fn fork_and_extract(
    action: &Action,
    adversary: &dyn ForgingAdversary,
    params: &Params,
    oracle: &mut ProgrammableOracle,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<ForkReport> {
    // Probe with fresh tapes and scratch oracles to estimate epsilon.
    let mut successes = 0usize;
    for _ in 0..PROBE_RUNS {
        let mut scratch = ProgrammableOracle::new(rng.next_u64());
        let mut tape = ChaCha20Rng::seed_from_u64(rng.next_u64());
        if let Some(forgery) = adversary.run(action, &mut tape, &mut scratch) {
            if ars::verify_with_oracle(
                action,
                &forgery.mpk,
                &forgery.ring,
                &forgery.msg,
                &forgery.signature,
                params,
                &mut scratch,
            ) {
                successes += 1;
            }
        }
    }
    if successes == 0 {
        return Err(Error::ForkBudgetExhausted { rewinds: PROBE_RUNS });
    }
    let epsilon = successes as f64 / PROBE_RUNS as f64;

    // Base run on the real oracle: find a successful tape.
    let mut base: Option<(u64, Forgery, usize, usize)> = None;
    for _ in 0..PROBE_RUNS {
        let tape_seed = rng.next_u64();
        let queries_before = oracle.query_count();
        let mut tape = ChaCha20Rng::seed_from_u64(tape_seed);
        if let Some(forgery) = adversary.run(action, &mut tape, oracle) {
            let queries = oracle.query_count() - queries_before;
            if ars::verify_with_oracle(
                action,
                &forgery.mpk,
                &forgery.ring,
                &forgery.msg,
                &forgery.signature,
                params,
                oracle,
            ) {
                base = Some((tape_seed, forgery, queries, queries_before));
                break;
            }
        }
    }
    let Some((tape_seed, base_forgery, query_budget, _)) = base else {
        return Err(Error::ForkBudgetExhausted { rewinds: PROBE_RUNS });
    };

    let key = ProgrammableOracle::slot_key(
        action,
        &base_forgery.signature.commitments,
        &base_forgery.msg,
    );
    let critical = oracle
        .position_of(&key)
        .ok_or(Error::ProtocolViolation("forgery never queried its challenge slot"))?;

    let t = base_forgery.signature.commitments.len();
    let budget = ((FORK_BUDGET_CONSTANT * query_budget.max(1) as f64 * t as f64
        * (t.max(2) as f64).ln())
        / epsilon)
        .ceil() as usize;
    let budget = budget.min(FORK_HARD_CAP);

    // value -> (per-session) index into `accepted`
    let mut per_session: Vec<HashMap<u8, usize>> = vec![HashMap::new(); t];
    let mut accepted: Vec<Signature> = Vec::new();
    let mut distinct_vectors: std::collections::HashSet<Vec<u8>> = std::collections::HashSet::new();

    let absorb = |sig: Signature,
                      per_session: &mut Vec<HashMap<u8, usize>>,
                      accepted: &mut Vec<Signature>,
                      distinct: &mut std::collections::HashSet<Vec<u8>>|
     -> Option<usize> {
        distinct.insert(sig.challenges.iter().map(|c| c.value()).collect());
        let idx = accepted.len();
        accepted.push(sig);
        let mut good = None;
        for (j, session) in per_session.iter_mut().enumerate() {
            let v = accepted[idx].challenges[j].value();
            session.entry(v).or_insert(idx);
            if session.len() == 4 && good.is_none() {
                good = Some(j);
            }
        }
        good
    };

    let mut good_session =
        absorb(base_forgery.signature.clone(), &mut per_session, &mut accepted, &mut distinct_vectors);

    let mut rewinds = 0usize;
    while good_session.is_none() && rewinds < budget {
        rewinds += 1;
        oracle.fork(critical);
        let mut tape = ChaCha20Rng::seed_from_u64(tape_seed);
        let Some(forgery) = adversary.run(action, &mut tape, oracle) else {
            continue;
        };
        let same_slot = ProgrammableOracle::slot_key(
            action,
            &forgery.signature.commitments,
            &forgery.msg,
        ) == key;
        if !same_slot {
            continue;
        }
        if !ars::verify_with_oracle(
            action,
            &forgery.mpk,
            &forgery.ring,
            &forgery.msg,
            &forgery.signature,
            params,
            oracle,
        ) {
            continue;
        }
        good_session =
            absorb(forgery.signature, &mut per_session, &mut accepted, &mut distinct_vectors);
    }

    let Some(session) = good_session else {
        if distinct_vectors.len() >= 4 {
            return Err(Error::NoGoodSession { collected: distinct_vectors.len() });
        }
        return Err(Error::ForkBudgetExhausted { rewinds });
    };

    let commitment = base_forgery.signature.commitments[session].clone();
    let pick = |v: u8| -> Response {
        accepted[per_session[session][&v]].responses[session].clone()
    };
    let responses = [pick(1), pick(2), pick(3), pick(4)];
    match sigma::extract(action, &base_forgery.ring, &commitment, &responses) {
        Ok((ring_index, secret)) => {
            let public = base_forgery.ring[ring_index].clone();
            if action.act(&secret, &action.base_point())? == public {
                Ok(ForkReport::Extracted { session, ring_index, public, secret, rewinds })
            } else {
                Ok(ForkReport::SoundnessViolation {
                    session,
                    commitment: Box::new(commitment),
                    responses: Box::new(responses),
                })
            }
        }
        Err(Error::NoMatchingSession) => Ok(ForkReport::SoundnessViolation {
            session,
            commitment: Box::new(commitment),
            responses: Box::new(responses),
        }),
        Err(e) => Err(e),
    }
}

/// A scripted adversary that owns a ring member's key and signs honestly,
/// padding the query log with dummy oracle queries before and after the
/// critical one.
pub struct HonestSigner {
    pub mpk: SetElement,
    pub ring: Vec<SetElement>,
    pub sk: GroupElement,
    pub params: Params,
    pub pre_queries: usize,
    pub post_queries: usize,
}

impl ForgingAdversary for HonestSigner {
    fn run(
        &self,
        action: &Action,
        tape: &mut ChaCha20Rng,
        oracle: &mut ProgrammableOracle,
    ) -> Option<Forgery> {
        let mut msg = vec![0u8; 16];
        tape.fill_bytes(&mut msg);
        for d in 0..self.pre_queries {
            let mut dummy = msg.clone();
            dummy.extend_from_slice(&[0xFF, d as u8]);
            let _ = oracle.challenges(action, &[], &dummy);
        }
        let signature = ars::sign_with_oracle(
            action,
            &self.mpk,
            &self.ring,
            &msg,
            &self.sk,
            &self.params,
            tape,
            oracle,
        )
        .ok()?;
        for d in 0..self.post_queries {
            let mut dummy = msg.clone();
            dummy.extend_from_slice(&[0xFE, d as u8]);
            let _ = oracle.challenges(action, &[], &dummy);
        }
        Some(Forgery { mpk: self.mpk.clone(), ring: self.ring.clone(), msg, signature })
    }
}

/// One line of the harness's structured result log.
pub fn record_line(game: &str, trial: usize, outcome: &str, rewinds: usize) -> String {
    format!("game={game} trial={trial} outcome={outcome} rewinds={rewinds}")
}
