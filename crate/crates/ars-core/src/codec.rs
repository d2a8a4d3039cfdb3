//! Canonical byte encodings, the transcript hash, challenge derivation,
//! and the `ARS1` on-disk container.
//!
//! # Encoding conventions
//!
//! * All integers are big-endian with fixed width; set and group elements
//!   use the backend's element widths, counts use `u32`.
//! * A commitment encodes as `n ‖ alphas ‖ betas ‖ gammas ‖ e_open ‖
//!   e_check` (gammas in their permuted transmission order).
//! * A response encodes as a one-byte tag equal to the challenge value it
//!   answers, followed by its scalars.
//! * A signature encodes as `t ‖ com_1 ‖ … ‖ com_t ‖ ch_1 ‖ … ‖ ch_t ‖
//!   resp_1 ‖ … ‖ resp_t`; a judge proof as `ι ‖ t` followed by its
//!   entries in row-major order.
//!
//! # Challenge derivation
//!
//! The random oracle is SHA-256 run as an XOF in counter mode: with
//! `digest = SHA-256(tag ‖ payload)`, output block `i` is
//! `SHA-256(tag ‖ i as u32 ‖ digest)`. Signature challenges (domain tag
//! `0x01`) consume two bits per session MSB-first, mapping bit pairs to
//! `{1,2,3,4}` with no modulo bias; judge challenges (tag `0x02`) consume
//! one bit per proof entry. Tag `0x03` domain-separates key fingerprints.
//!
//! # Container
//!
//! Every file the tooling reads or writes is `"ARS1" ‖ kind ‖ body_len ‖
//! body`, with the body being the canonical encoding of the object.

use sha2::{Digest, Sha256};

use crate::action::{Action, SetElement};
use crate::ars::{JudgeCommitment, JudgeEntry, JudgeProof, Signature};
use crate::error::{Error, Result};
use crate::sigma::{Challenge, Commitment, Response};

pub const TAG_SIGNATURE_CHALLENGES: u8 = 0x01;
pub const TAG_JUDGE_CHALLENGES: u8 = 0x02;
pub const TAG_FINGERPRINT: u8 = 0x03;

/// Challenge sequence for the `t` parallel sessions of one signature.
pub type ChallengeVector = Vec<Challenge>;

/// Digest binding one domain-tagged transcript; seed of the XOF stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptDigest {
    pub bytes: [u8; 32],
    pub domain_tag: u8,
}

pub fn transcript_digest(domain_tag: u8, payload: &[u8]) -> TranscriptDigest {
    let mut h = Sha256::new();
    h.update([domain_tag]);
    h.update(payload);
    TranscriptDigest { bytes: h.finalize().into(), domain_tag }
}

/// Expand a transcript digest to `len` bytes of XOF output.
pub fn xof(digest: &TranscriptDigest, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut counter: u32 = 0;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update([digest.domain_tag]);
        h.update(counter.to_be_bytes());
        h.update(digest.bytes);
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(len);
    out
}

/// Two bits per challenge, MSB-first, value = bits + 1.
pub(crate) fn unpack_challenges(stream: &[u8], t: usize) -> ChallengeVector {
    (0..t)
        .map(|j| {
            let byte = stream[j / 4];
            let shift = 6 - 2 * (j % 4);
            Challenge::new(((byte >> shift) & 0b11) + 1).expect("two bits plus one is in 1..=4")
        })
        .collect()
}

/// One bit per entry, MSB-first.
pub(crate) fn unpack_bits(stream: &[u8], count: usize) -> Vec<u8> {
    (0..count).map(|j| (stream[j / 8] >> (7 - j % 8)) & 1).collect()
}

/// The byte string the signature random oracle is queried on:
/// `encode(com_1) ‖ … ‖ encode(com_t) ‖ m`. Also the programmable
/// oracle's slot key.
pub fn signature_challenge_payload(action: &Action, coms: &[Commitment], msg: &[u8]) -> Vec<u8> {
    let mut payload = Vec::new();
    for com in coms {
        payload.extend_from_slice(&encode_commitment(action, com));
    }
    payload.extend_from_slice(msg);
    payload
}

/// Fiat-Shamir challenge derivation for the parallel-session signature.
pub fn derive_challenges(action: &Action, coms: &[Commitment], msg: &[u8]) -> ChallengeVector {
    let t = coms.len();
    let payload = signature_challenge_payload(action, coms, msg);
    let digest = transcript_digest(TAG_SIGNATURE_CHALLENGES, &payload);
    let stream = xof(&digest, t.div_ceil(4));
    unpack_challenges(&stream, t)
}

/// Fiat-Shamir bit matrix for the judge layer: one bit per `(i, j)` entry,
/// row-major, bound to the full encoded signature and all judge
/// commitments.
pub fn derive_judge_challenges(
    action: &Action,
    sig: &Signature,
    jcoms: &[JudgeCommitment],
) -> Vec<u8> {
    let mut payload = encode_signature(action, sig);
    for jcom in jcoms {
        payload.extend_from_slice(&encode_judge_commitment(action, jcom));
    }
    let digest = transcript_digest(TAG_JUDGE_CHALLENGES, &payload);
    let stream = xof(&digest, jcoms.len().div_ceil(8));
    unpack_bits(&stream, jcoms.len())
}

/// First eight bytes of the tagged SHA-256 of a canonical encoding;
/// the human-facing key fingerprint.
pub fn fingerprint(encoded: &[u8]) -> [u8; 8] {
    let mut h = Sha256::new();
    h.update([TAG_FINGERPRINT]);
    h.update(encoded);
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    out
}

// --- object encodings -------------------------------------------------

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::Decode("truncated input"));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn set_elem(&mut self, action: &Action) -> Result<SetElement> {
        action.decode_set(self.take(action.elem_len())?)
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::Decode("trailing bytes"))
        }
    }
}

/// Sanity bound on decoded counts so hostile length prefixes cannot force
/// huge allocations.
const MAX_COUNT: u32 = 1 << 20;

fn checked_count(v: u32) -> Result<usize> {
    if v == 0 || v > MAX_COUNT {
        return Err(Error::Decode("count out of range"));
    }
    Ok(v as usize)
}

pub fn encode_commitment(action: &Action, com: &Commitment) -> Vec<u8> {
    let n = com.ring_size();
    let mut out = Vec::with_capacity(4 + (3 * n + 2) * action.elem_len());
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for e in com.alphas.iter().chain(&com.betas).chain(&com.gammas) {
        out.extend_from_slice(&action.encode_set(e));
    }
    out.extend_from_slice(&action.encode_set(&com.e_open));
    out.extend_from_slice(&action.encode_set(&com.e_check));
    out
}

fn read_commitment(action: &Action, r: &mut Reader) -> Result<Commitment> {
    let n = checked_count(r.u32()?)?;
    let mut lists = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut list = Vec::with_capacity(n);
        for _ in 0..n {
            list.push(r.set_elem(action)?);
        }
        lists.push(list);
    }
    let gammas = lists.pop().expect("three lists");
    let betas = lists.pop().expect("two lists");
    let alphas = lists.pop().expect("one list");
    let e_open = r.set_elem(action)?;
    let e_check = r.set_elem(action)?;
    Ok(Commitment { alphas, betas, gammas, e_open, e_check })
}

pub fn decode_commitment(action: &Action, bytes: &[u8]) -> Result<Commitment> {
    let mut r = Reader::new(bytes);
    let com = read_commitment(action, &mut r)?;
    r.finish()?;
    Ok(com)
}

pub fn encode_response(action: &Action, resp: &Response) -> Vec<u8> {
    let mut out = vec![resp.challenge_value()];
    match resp {
        Response::Deltas(v) | Response::DeltaPrimes(v) => {
            for s in v {
                out.extend_from_slice(&action.encode_scalar(s));
            }
        }
        Response::Blinder(s) | Response::Link(s) => {
            out.extend_from_slice(&action.encode_scalar(s));
        }
    }
    out
}

fn read_response(action: &Action, r: &mut Reader, n: usize) -> Result<Response> {
    let tag = r.u8()?;
    let scalar_len = action.scalar_len();
    match tag {
        1 | 2 => {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(action.decode_scalar(r.take(scalar_len)?)?);
            }
            Ok(if tag == 1 { Response::Deltas(v) } else { Response::DeltaPrimes(v) })
        }
        3 => Ok(Response::Blinder(action.decode_scalar(r.take(scalar_len)?)?)),
        4 => Ok(Response::Link(action.decode_scalar(r.take(scalar_len)?)?)),
        _ => Err(Error::Decode("unknown response tag")),
    }
}

pub fn decode_response(action: &Action, bytes: &[u8], n: usize) -> Result<Response> {
    let mut r = Reader::new(bytes);
    let resp = read_response(action, &mut r, n)?;
    r.finish()?;
    Ok(resp)
}

pub fn encode_signature(action: &Action, sig: &Signature) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(sig.commitments.len() as u32).to_be_bytes());
    for com in &sig.commitments {
        out.extend_from_slice(&encode_commitment(action, com));
    }
    for ch in &sig.challenges {
        out.push(ch.value());
    }
    for resp in &sig.responses {
        out.extend_from_slice(&encode_response(action, resp));
    }
    out
}

pub fn decode_signature(action: &Action, bytes: &[u8]) -> Result<Signature> {
    let mut r = Reader::new(bytes);
    let t = checked_count(r.u32()?)?;
    let mut commitments = Vec::with_capacity(t);
    for _ in 0..t {
        commitments.push(read_commitment(action, &mut r)?);
    }
    let mut challenges = Vec::with_capacity(t);
    for _ in 0..t {
        challenges.push(Challenge::new(r.u8()?).map_err(|_| Error::Decode("challenge out of range"))?);
    }
    let mut responses = Vec::with_capacity(t);
    for com in &commitments {
        responses.push(read_response(action, &mut r, com.ring_size())?);
    }
    r.finish()?;
    Ok(Signature { commitments, challenges, responses })
}

pub fn encode_judge_commitment(action: &Action, jcom: &JudgeCommitment) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * action.elem_len());
    out.extend_from_slice(&action.encode_set(&jcom.e_judge));
    out.extend_from_slice(&action.encode_set(&jcom.e_bm));
    out
}

pub fn encode_judge_proof(action: &Action, proof: &JudgeProof) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(proof.rounds as u32).to_be_bytes());
    out.extend_from_slice(&(proof.sessions as u32).to_be_bytes());
    for entry in &proof.entries {
        out.extend_from_slice(&encode_judge_commitment(action, &entry.jcom));
        out.push(entry.jch);
        out.extend_from_slice(&action.encode_scalar(&entry.jresp));
    }
    out
}

pub fn decode_judge_proof(action: &Action, bytes: &[u8]) -> Result<JudgeProof> {
    let mut r = Reader::new(bytes);
    let rounds = checked_count(r.u32()?)?;
    let sessions = checked_count(r.u32()?)?;
    let total = rounds
        .checked_mul(sessions)
        .filter(|&x| x <= MAX_COUNT as usize)
        .ok_or(Error::Decode("count out of range"))?;
    let mut entries = Vec::with_capacity(total);
    for _ in 0..total {
        let e_judge = r.set_elem(action)?;
        let e_bm = r.set_elem(action)?;
        let jch = r.u8()?;
        if jch > 1 {
            return Err(Error::Decode("judge challenge bit out of range"));
        }
        let jresp = action.decode_scalar(r.take(action.scalar_len())?)?;
        entries.push(JudgeEntry { jcom: JudgeCommitment { e_judge, e_bm }, jch, jresp });
    }
    r.finish()?;
    Ok(JudgeProof { rounds, sessions, entries })
}

pub fn encode_ring(action: &Action, ring: &[SetElement]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + ring.len() * action.elem_len());
    out.extend_from_slice(&(ring.len() as u32).to_be_bytes());
    for pk in ring {
        out.extend_from_slice(&action.encode_set(pk));
    }
    out
}

pub fn decode_ring(action: &Action, bytes: &[u8]) -> Result<Vec<SetElement>> {
    let mut r = Reader::new(bytes);
    let n = checked_count(r.u32()?)?;
    let mut ring = Vec::with_capacity(n);
    for _ in 0..n {
        ring.push(r.set_elem(action)?);
    }
    r.finish()?;
    Ok(ring)
}

/// An opening result: either a ring member's public key or bottom.
pub fn encode_open_result(action: &Action, result: Option<&SetElement>) -> Vec<u8> {
    match result {
        None => vec![0],
        Some(pk) => {
            let mut out = vec![1];
            out.extend_from_slice(&action.encode_set(pk));
            out
        }
    }
}

pub fn decode_open_result(action: &Action, bytes: &[u8]) -> Result<Option<SetElement>> {
    let mut r = Reader::new(bytes);
    let flag = r.u8()?;
    let result = match flag {
        0 => None,
        1 => Some(r.set_elem(action)?),
        _ => return Err(Error::Decode("unknown open-result flag")),
    };
    r.finish()?;
    Ok(result)
}

// --- the ARS1 container ------------------------------------------------

pub const MAGIC: [u8; 4] = *b"ARS1";

/// Object kind byte of an `ARS1` container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    PublicKey = 1,
    SecretKey = 2,
    Ring = 3,
    Signature = 4,
    JudgeProof = 5,
    OpenResult = 6,
}

impl ObjectKind {
    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => ObjectKind::PublicKey,
            2 => ObjectKind::SecretKey,
            3 => ObjectKind::Ring,
            4 => ObjectKind::Signature,
            5 => ObjectKind::JudgeProof,
            6 => ObjectKind::OpenResult,
            _ => return Err(Error::Decode("unknown object kind")),
        })
    }
}

pub fn write_container(kind: ObjectKind, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(kind as u8);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
    out
}

pub fn read_container(bytes: &[u8]) -> Result<(ObjectKind, &[u8])> {
    if bytes.len() < 9 {
        return Err(Error::Decode("container too short"));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Decode("bad container magic"));
    }
    let kind = ObjectKind::from_byte(bytes[4])?;
    let len = u32::from_be_bytes([bytes[5], bytes[6], bytes[7], bytes[8]]) as usize;
    let body = &bytes[9..];
    if body.len() != len {
        return Err(Error::Decode("container length mismatch"));
    }
    Ok((kind, body))
}

/// Offset-annotated hex dump, sixteen bytes per line.
pub fn hex_dump(bytes: &[u8]) -> String {
    let mut out = String::new();
    for (i, chunk) in bytes.chunks(16).enumerate() {
        out.push_str(&format!("{:08x} ", i * 16));
        for b in chunk {
            out.push_str(&format!(" {b:02x}"));
        }
        out.push('\n');
    }
    out
}
