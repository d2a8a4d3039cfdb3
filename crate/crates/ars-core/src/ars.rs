//! Accountable ring signature: `t = 2λ|S|` parallel sigma sessions bound by
//! the Fiat-Shamir hash, with majority opening and a publicly verifiable
//! opening proof.
//!
//! Per-session randomness is forked deterministically from the caller's
//! RNG (one ChaCha stream per session), so signatures are reproducible
//! from a seed and identical whether sessions run sequentially or on the
//! thread pool.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::action::{Action, GroupElement, SetElement};
use crate::codec;
use crate::error::{Error, Result};
use crate::exec::map_sessions;
use crate::sigma::{self, Challenge, Commitment, Response};

/// Protocol parameters. The session count is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    lambda: u32,
}

impl Params {
    pub fn new(lambda: u32) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ProtocolViolation("lambda must be positive"));
        }
        Ok(Params { lambda })
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// Parallel sessions for a ring of the given size: `t = 2λ|S|`.
    pub fn session_count(&self, ring_size: usize) -> usize {
        2 * self.lambda as usize * ring_size
    }

    /// Judge repetitions per session: `ι = λ`.
    pub fn judge_rounds(&self) -> usize {
        self.lambda as usize
    }
}

/// A member key pair `(pk, sk) = (s·E0, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub public: SetElement,
    pub secret: GroupElement,
}

/// Master key pairs live in the same relation as member key pairs.
pub type MasterKeyPair = KeyPair;

/// Sample a master key pair.
pub fn mkeygen(action: &Action, rng: &mut (impl RngCore + ?Sized)) -> MasterKeyPair {
    keygen(action, rng)
}

/// Sample a member key pair.
pub fn keygen(action: &Action, rng: &mut (impl RngCore + ?Sized)) -> KeyPair {
    let secret = action.sample_group(rng);
    let public = action.act(&secret, &action.base_point()).expect("sampled scalar is in range");
    KeyPair { public, secret }
}

/// The `t`-session signature `(com⃗, ch⃗, resp⃗)`. The challenge vector is
/// stored redundantly; verification re-derives it from the oracle and
/// compares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub commitments: Vec<Commitment>,
    pub challenges: Vec<Challenge>,
    pub responses: Vec<Response>,
}

/// The random oracle the Fiat-Shamir layer queries for session challenges.
/// The default implementation hashes; security games substitute a
/// programmable tape.
pub trait ChallengeOracle {
    fn challenges(&mut self, action: &Action, coms: &[Commitment], msg: &[u8]) -> Vec<Challenge>;
}

/// The standard instantiation: SHA-256 XOF over the encoded transcript.
#[derive(Debug, Default, Clone, Copy)]
pub struct FiatShamir;

impl ChallengeOracle for FiatShamir {
    fn challenges(&mut self, action: &Action, coms: &[Commitment], msg: &[u8]) -> Vec<Challenge> {
        codec::derive_challenges(action, coms, msg)
    }
}

fn fork_rng(seed: &[u8; 32], stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    rng.set_stream(stream);
    rng
}

fn validate_ring(action: &Action, mpk: &SetElement, ring: &[SetElement]) -> Result<()> {
    if ring.is_empty() {
        return Err(Error::InvalidElement("empty ring"));
    }
    if !sigma::all_distinct(action, ring) {
        return Err(Error::DuplicateStatement);
    }
    if !action.validate_set_element(mpk) {
        return Err(Error::InvalidElement("master public key fails membership validation"));
    }
    for pk in ring {
        if !action.validate_set_element(pk) {
            return Err(Error::InvalidElement("ring public key fails membership validation"));
        }
    }
    Ok(())
}

/// Sessions-per-base threshold above which building a fixed-base table is
/// cheaper than acting cold.
const PREPARE_THRESHOLD: usize = 16;

fn prewarm(action: &Action, ring: &[SetElement], mpk: &SetElement, uses_per_base: usize) {
    if uses_per_base < PREPARE_THRESHOLD {
        return;
    }
    for e in ring {
        action.prepare_base(e);
    }
    action.prepare_base(mpk);
    action.prepare_base(&action.base_point());
}

/// Sign `msg` for the ring `ring` under master key `mpk` with the secret
/// key of one ring member.
pub fn sign(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    msg: &[u8],
    sk: &GroupElement,
    params: &Params,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<Signature> {
    sign_with_oracle(action, mpk, ring, msg, sk, params, rng, &mut FiatShamir)
}

#[allow(clippy::too_many_arguments)]
pub fn sign_with_oracle(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    msg: &[u8],
    sk: &GroupElement,
    params: &Params,
    rng: &mut (impl RngCore + ?Sized),
    oracle: &mut dyn ChallengeOracle,
) -> Result<Signature> {
    validate_ring(action, mpk, ring)?;
    let pk = action.act(sk, &action.base_point())?;
    let signer = ring.iter().position(|e| *e == pk).ok_or(Error::WitnessNotInRing)?;
    let t = params.session_count(ring.len());
    prewarm(action, ring, mpk, 3 * t);

    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let sessions = map_sessions(t, |j| {
        let mut session_rng = fork_rng(&seed, j as u64);
        sigma::commit_at(action, mpk, ring, signer, sk, &mut session_rng)
    });
    let mut coms = Vec::with_capacity(t);
    let mut states = Vec::with_capacity(t);
    for session in sessions {
        let (com, st) = session?;
        coms.push(com);
        states.push(st);
    }

    let challenges = oracle.challenges(action, &coms, msg);
    debug_assert_eq!(challenges.len(), t);
    let responses = states
        .iter()
        .zip(&challenges)
        .map(|(st, ch)| sigma::respond(st, *ch))
        .collect();

    Ok(Signature { commitments: coms, challenges, responses })
}

/// Verify a signature. Total: anything malformed is simply invalid.
pub fn verify(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    msg: &[u8],
    sig: &Signature,
    params: &Params,
) -> bool {
    verify_with_oracle(action, mpk, ring, msg, sig, params, &mut FiatShamir)
}

pub fn verify_with_oracle(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    msg: &[u8],
    sig: &Signature,
    params: &Params,
    oracle: &mut dyn ChallengeOracle,
) -> bool {
    if validate_ring(action, mpk, ring).is_err() {
        return false;
    }
    let t = params.session_count(ring.len());
    if sig.commitments.len() != t || sig.challenges.len() != t || sig.responses.len() != t {
        return false;
    }
    if oracle.challenges(action, &sig.commitments, msg) != sig.challenges {
        return false;
    }
    prewarm(action, ring, mpk, t);
    let ok = map_sessions(t, |j| {
        sigma::verify(action, mpk, ring, &sig.commitments[j], sig.challenges[j], &sig.responses[j])
    });
    ok.into_iter().all(|b| b)
}

/// Majority vote over per-session opening results. Strictly greatest count
/// wins; on a tie, bottom dominates if tied, otherwise the tied key with
/// the smallest canonical encoding. Deterministic by construction.
pub fn maj(outs: &[Option<SetElement>]) -> Option<SetElement> {
    let mut counts: HashMap<Option<&SetElement>, usize> = HashMap::new();
    for out in outs {
        *counts.entry(out.as_ref()).or_insert(0) += 1;
    }
    let best = counts.values().copied().max()?;
    let mut tied: Vec<Option<&SetElement>> =
        counts.into_iter().filter(|&(_, c)| c == best).map(|(v, _)| v).collect();
    if tied.iter().any(|v| v.is_none()) {
        return None;
    }
    tied.sort();
    tied.into_iter().next().flatten().cloned()
}

/// Open a signature with the master secret: per-session sigma opening,
/// then majority.
pub fn open(
    action: &Action,
    msk: &GroupElement,
    ring: &[SetElement],
    _msg: &[u8],
    sig: &Signature,
    params: &Params,
) -> Result<Option<SetElement>> {
    let t = params.session_count(ring.len());
    if sig.commitments.len() != t {
        return Err(Error::LengthMismatch { expected: t, got: sig.commitments.len() });
    }
    let outs = map_sessions(t, |j| sigma::open(action, msk, ring, &sig.commitments[j]));
    let outs: Vec<Option<SetElement>> = outs.into_iter().collect::<Result<_>>()?;
    Ok(maj(&outs))
}

/// First message of one judge repetition: the blinded opening slot and the
/// blinded master key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeCommitment {
    pub e_judge: SetElement,
    pub e_bm: SetElement,
}

/// Secret state between `jcommit` and `jrespond`.
#[derive(Debug, Clone)]
pub struct JudgeState {
    b_prime: GroupElement,
    msk: GroupElement,
}

/// One `(jcom, jch, jresp)` triple of an opening proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeEntry {
    pub jcom: JudgeCommitment,
    pub jch: u8,
    pub jresp: GroupElement,
}

/// The `ι × t` proof matrix, stored row-major: entry `(i, j)` sits at
/// `i * sessions + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeProof {
    pub rounds: usize,
    pub sessions: usize,
    pub entries: Vec<JudgeEntry>,
}

impl JudgeProof {
    pub fn entry(&self, round: usize, session: usize) -> &JudgeEntry {
        &self.entries[round * self.sessions + session]
    }
}

pub(crate) fn jcommit_with_blinder(
    action: &Action,
    msk: &GroupElement,
    ring: &[SetElement],
    com: &Commitment,
    b_prime: GroupElement,
) -> Result<(JudgeCommitment, JudgeState)> {
    if com.betas.len() != ring.len() {
        return Err(Error::InvalidElement("commitment shape does not match ring"));
    }
    let e_judge = action.act(&b_prime, &com.e_open)?;
    let e_bm = action.act(&action.compose(&b_prime, msk)?, &action.base_point())?;
    Ok((JudgeCommitment { e_judge, e_bm }, JudgeState { b_prime, msk: msk.clone() }))
}

/// Commit step of one judge repetition for one session commitment.
pub fn jcommit(
    action: &Action,
    msk: &GroupElement,
    ring: &[SetElement],
    com: &Commitment,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(JudgeCommitment, JudgeState)> {
    jcommit_with_blinder(action, msk, ring, com, action.sample_group(rng))
}

/// Respond to a judge challenge bit: `0` reveals the blinder, `1` the
/// blinder composed with the master secret.
pub fn jrespond(action: &Action, state: &JudgeState, jch: u8) -> Result<GroupElement> {
    match jch {
        0 => Ok(state.b_prime.clone()),
        1 => action.compose(&state.b_prime, &state.msk),
        other => Err(Error::InvalidChallenge(other)),
    }
}

/// Verify one judge triple against the claimed opened key `pk`.
#[allow(clippy::too_many_arguments)]
pub fn jverify(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    pk: &SetElement,
    com: &Commitment,
    jcom: &JudgeCommitment,
    jch: u8,
    jresp: &GroupElement,
) -> Result<bool> {
    let k = ring.iter().position(|e| e == pk).ok_or(Error::StatementNotInRing)?;
    if com.betas.len() != ring.len() {
        return Ok(false);
    }
    let ok = match jch {
        0 => {
            action.act(jresp, &com.e_open)? == jcom.e_judge
                && action.act(jresp, mpk)? == jcom.e_bm
        }
        1 => {
            action.act(jresp, &com.betas[k])? == jcom.e_judge
                && action.act(jresp, &action.base_point())? == jcom.e_bm
        }
        other => return Err(Error::InvalidChallenge(other)),
    };
    Ok(ok)
}

/// Open a signature and produce the publicly verifiable proof: `ι`
/// blinded repetitions per session, challenges bound to `(σ, jcoms)` by
/// the judge-domain hash.
#[allow(clippy::too_many_arguments)]
pub fn open_with_proof(
    action: &Action,
    msk: &GroupElement,
    ring: &[SetElement],
    msg: &[u8],
    sig: &Signature,
    params: &Params,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(Option<SetElement>, JudgeProof)> {
    let result = open(action, msk, ring, msg, sig, params)?;
    let t = params.session_count(ring.len());
    let iota = params.judge_rounds();

    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let committed = map_sessions(iota * t, |idx| {
        let mut round_rng = fork_rng(&seed, idx as u64);
        jcommit(action, msk, ring, &sig.commitments[idx % t], &mut round_rng)
    });
    let mut jcoms = Vec::with_capacity(iota * t);
    let mut states = Vec::with_capacity(iota * t);
    for c in committed {
        let (jcom, st) = c?;
        jcoms.push(jcom);
        states.push(st);
    }

    let bits = codec::derive_judge_challenges(action, sig, &jcoms);
    let mut entries = Vec::with_capacity(iota * t);
    for ((jcom, state), jch) in jcoms.into_iter().zip(&states).zip(bits) {
        let jresp = jrespond(action, state, jch)?;
        entries.push(JudgeEntry { jcom, jch, jresp });
    }
    Ok((result, JudgeProof { rounds: iota, sessions: t, entries }))
}

/// Publicly check an opening claim. A session counts only if all `ι` of
/// its repetitions verify; the proof is accepted when at least `λ`
/// sessions count. A bottom claim is always rejected.
pub fn judge(
    action: &Action,
    mpk: &SetElement,
    ring: &[SetElement],
    sig: &Signature,
    claimed: Option<&SetElement>,
    proof: &JudgeProof,
    params: &Params,
) -> bool {
    let Some(pk) = claimed else {
        return false;
    };
    if !ring.contains(pk) {
        return false;
    }
    let t = params.session_count(ring.len());
    let iota = params.judge_rounds();
    if sig.commitments.len() != t
        || proof.sessions != t
        || proof.rounds != iota
        || proof.entries.len() != iota * t
    {
        return false;
    }
    let jcoms: Vec<JudgeCommitment> = proof.entries.iter().map(|e| e.jcom.clone()).collect();
    let bits = codec::derive_judge_challenges(action, sig, &jcoms);
    if bits != proof.entries.iter().map(|e| e.jch).collect::<Vec<u8>>() {
        return false;
    }
    let session_ok = map_sessions(t, |j| {
        (0..iota).all(|i| {
            let entry = proof.entry(i, j);
            jverify(action, mpk, ring, pk, &sig.commitments[j], &entry.jcom, entry.jch, &entry.jresp)
                .unwrap_or(false)
        })
    });
    let passing = session_ok.into_iter().filter(|&b| b).count();
    passing >= params.lambda as usize
}
