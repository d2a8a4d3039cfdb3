//! Free-and-transitive group action (hard homogeneous space) backends.
//!
//! The shipped backends realize the action of `(Z/q)^*` on the order-`q`
//! subgroup of `(Z/p)^*` (minus the identity) by exponentiation:
//! `a · E = E^a mod p`, for a safe prime `p = 2q + 1`. The acting group is
//! abelian, acts freely (`a · E = E` forces `a = 1`) and transitively
//! (`E2 = E1^(dlog ratio)` exists and is unique), so the structure matches
//! the abstract contract the protocol layers are written against.
//!
//! Two parameter sets matter in practice:
//!
//! * [`ActionParams::modp_768`] — the default "realistic" backend, the
//!   768-bit MODP safe prime from RFC 2409: real big-integer scale, fast
//!   enough for thousand-trial harness runs. 1024- and 2048-bit variants
//!   ([`ActionParams::modp_1024`], [`ActionParams::modp_2048`]) are
//!   available when throughput matters less than hardness.
//! * [`ActionParams::tiny`] — `p = 23, q = 11`. Everything about this
//!   backend is exhaustively enumerable, which is what the test oracles
//!   (distribution enumeration, brute-force action inversion) need.
//!
//! Group elements are scalars in `[1, q-1]`; set elements are members of
//! `⟨g⟩ \ {1}`. Both encode as fixed-width big-endian integers (width =
//! byte length of `q` resp. `p`), which makes every encoding canonical.
//!
//! # Security contract
//!
//! The protocol layers assume two things of a backend, stated here as
//! contracts rather than checked properties:
//!
//! * recovering `a` from `(E, a · E)` is infeasible (the action inverse
//!   problem), and
//! * `(E, a·E, b·E, ab·E)` is indistinguishable from `(E, a·E, b·E, c·E)`
//!   for uniform `a, b, c` (decisional assumption; anonymity rests on its
//!   parallel extension).
//!
//! For the exponentiation backends both coincide with classical discrete
//! log / DDH in the order-`q` subgroup mod `p`, so they hold only against
//! classical adversaries and only to the strength of the chosen modulus.
//! The tiny backend satisfies neither — it exists so test oracles can
//! enumerate and invert the action exhaustively.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::RngCore;
use rug::integer::Order;
use rug::Assign;
use rug::Integer;

use crate::error::{Error, Result};

/// An element of the acting group `G = (Z/q)^*`, canonically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Integer);

/// An element of the acted set `⟨g⟩ \ {1} ⊂ (Z/p)^*`, canonically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetElement(Integer);

impl GroupElement {
    #[cfg(test)]
    pub(crate) fn repr(&self) -> &Integer {
        &self.0
    }
}

/// Parameters pinning one exponentiation backend.
#[derive(Debug, Clone)]
pub struct ActionParams {
    /// Short tag identifying the backend ("tiny", "modp-1024", "modp-2048").
    pub id: &'static str,
    /// Prime modulus of the ambient group.
    pub p: Integer,
    /// Prime order of the acted subgroup; the acting group is `(Z/q)^*`.
    pub q: Integer,
    /// Generator of the order-`q` subgroup.
    pub g: Integer,
    /// Distinguished base point `E0 ∈ ⟨g⟩ \ {1}`.
    pub e0: Integer,
    /// Nominal classical security level of the backend.
    pub security_level: u32,
}

const MODP_768: &str = "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74\
020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245\
E485B576625E7EC6F44C42E9A63A3620FFFFFFFFFFFFFFFF";

const MODP_1024: &str = "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74\
020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245\
E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7EDEE386BFB5A899FA5AE9F24117C4B1FE6\
49286651ECE65381FFFFFFFFFFFFFFFF";

const MODP_2048: &str = "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74\
020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245\
E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7EDEE386BFB5A899FA5AE9F24117C4B1FE6\
49286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD96\
1C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B\
E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE5\
15D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

impl ActionParams {
    /// Exhaustively enumerable oracle backend: `p = 23, q = 11, g = E0 = 2`.
    pub fn tiny() -> Self {
        ActionParams {
            id: "tiny",
            p: Integer::from(23),
            q: Integer::from(11),
            g: Integer::from(2),
            e0: Integer::from(2),
            security_level: 1,
        }
    }

    /// Default realistic backend: RFC 2409 Oakley group 1 (768-bit safe
    /// prime, `q = (p-1)/2`). `g = 2` generates the quadratic-residue
    /// subgroup since `p ≡ 7 (mod 8)`. Large enough that nothing about it
    /// is enumerable and every big-integer code path is exercised at full
    /// width, small enough for thousand-trial harness runs on small
    /// machines; pick one of the larger groups for real deployments.
    pub fn modp_768() -> Self {
        let p = Integer::from_str_radix(MODP_768, 16).expect("well-formed constant");
        let q = (p.clone() - 1u32) / 2u32;
        ActionParams {
            id: "modp-768",
            p,
            q,
            g: Integer::from(2),
            e0: Integer::from(4),
            security_level: 64,
        }
    }

    /// RFC 2409 Oakley group 2 (1024-bit safe prime, `q = (p-1)/2`).
    pub fn modp_1024() -> Self {
        let p = Integer::from_str_radix(MODP_1024, 16).expect("well-formed constant");
        let q = (p.clone() - 1u32) / 2u32;
        ActionParams {
            id: "modp-1024",
            p,
            q,
            g: Integer::from(2),
            e0: Integer::from(4),
            security_level: 80,
        }
    }

    /// RFC 3526 group 14 (2048-bit safe prime). Same structure as
    /// [`ActionParams::modp_1024`], roughly 8x the per-action cost.
    pub fn modp_2048() -> Self {
        let p = Integer::from_str_radix(MODP_2048, 16).expect("well-formed constant");
        let q = (p.clone() - 1u32) / 2u32;
        ActionParams {
            id: "modp-2048",
            p,
            q,
            g: Integer::from(2),
            e0: Integer::from(4),
            security_level: 112,
        }
    }
}

/// Fixed-base window table: `rows[r][d-1] = base^(d * 256^r) mod p`.
///
/// One exponentiation through the table costs at most one modular
/// multiplication per exponent byte, against ~1.5 multiplications per
/// exponent *bit* for a cold modexp. Building a table costs about five
/// cold exponentiations, so it pays off for bases acted on dozens of
/// times — exactly the ring elements and master key inside a
/// multi-session signing or verification pass.
struct FixedBase {
    rows: Vec<Vec<Integer>>,
}

impl FixedBase {
    fn build(p: &Integer, base: &Integer, exp_bits: u32) -> Self {
        let nrows = exp_bits.div_ceil(8) as usize;
        let mut rows = Vec::with_capacity(nrows);
        let mut cur = base.clone();
        let mut scratch = Integer::with_capacity(2 * p.significant_bits() as usize + 64);
        for _ in 0..nrows {
            let mut row = Vec::with_capacity(255);
            row.push(cur.clone());
            for d in 1..255usize {
                scratch.assign(&row[d - 1] * &cur);
                scratch %= p;
                row.push(scratch.clone());
            }
            scratch.assign(&row[254] * &cur);
            scratch %= p;
            cur.assign(&scratch); // base^(256^(r+1))
            rows.push(row);
        }
        FixedBase { rows }
    }

    fn pow(&self, p: &Integer, exp: &Integer) -> Integer {
        let digits = exp.to_digits::<u8>(Order::LsfLe);
        let mut acc: Option<Integer> = None;
        for (r, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let factor = &self.rows[r][d as usize - 1];
            match acc.as_mut() {
                None => {
                    let mut first = Integer::with_capacity(2 * p.significant_bits() as usize + 64);
                    first.assign(factor);
                    acc = Some(first);
                }
                Some(a) => {
                    *a *= factor;
                    *a %= p;
                }
            }
        }
        acc.unwrap_or_else(|| Integer::from(1))
    }
}

/// One concrete backend instance. Immutable after construction (the
/// fixed-base cache is interior-mutable but purely a memo) and safe to
/// share across threads.
pub struct Action {
    params: ActionParams,
    elem_len: usize,
    scalar_len: usize,
    tables: RwLock<HashMap<Integer, Arc<FixedBase>>>,
}

impl std::fmt::Debug for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Action").field("id", &self.params.id).finish()
    }
}

/// Cap on memoized fixed-base tables; the map is dropped wholesale when
/// it fills so a pathological caller cannot grow it without bound.
const TABLE_CACHE_CAP: usize = 24;

/// Fixed-base tables are only worthwhile for large moduli.
const TABLE_MIN_EXP_BITS: u32 = 256;

impl Action {
    pub fn new(params: ActionParams) -> Result<Self> {
        if params.p < 5 || params.q < 2 {
            return Err(Error::InvalidElement("modulus too small"));
        }
        if params.p.is_probably_prime(24) == rug::integer::IsPrime::No
            || params.q.is_probably_prime(24) == rug::integer::IsPrime::No
        {
            return Err(Error::InvalidElement("p and q must be prime"));
        }
        let pm1 = Integer::from(&params.p - 1u32);
        if !pm1.is_divisible(&params.q) {
            return Err(Error::InvalidElement("q must divide p-1"));
        }
        // g must have exact order q: g != 1 and g^q = 1.
        if params.g <= 1
            || params.g >= params.p
            || params.g.clone().pow_mod(&params.q, &params.p).unwrap() != 1
        {
            return Err(Error::InvalidElement("g must generate an order-q subgroup"));
        }
        let elem_len = params.p.significant_bits().div_ceil(8) as usize;
        let scalar_len = params.q.significant_bits().div_ceil(8) as usize;
        let action = Action {
            params,
            elem_len,
            scalar_len,
            tables: RwLock::new(HashMap::new()),
        };
        let e0 = SetElement(action.params.e0.clone());
        if !action.validate_set_element(&e0) {
            return Err(Error::InvalidElement("E0 must lie in the acted set"));
        }
        Ok(action)
    }

    pub fn tiny() -> Self {
        Action::new(ActionParams::tiny()).expect("tiny parameters are valid")
    }

    pub fn realistic() -> Self {
        Action::new(ActionParams::modp_768()).expect("modp-768 parameters are valid")
    }

    pub fn params(&self) -> &ActionParams {
        &self.params
    }

    pub fn id(&self) -> &'static str {
        self.params.id
    }

    /// Byte width of one encoded set element.
    pub fn elem_len(&self) -> usize {
        self.elem_len
    }

    /// Byte width of one encoded group element.
    pub fn scalar_len(&self) -> usize {
        self.scalar_len
    }

    /// The distinguished base point `E0`.
    pub fn base_point(&self) -> SetElement {
        SetElement(self.params.e0.clone())
    }

    /// The neutral element of the acting group.
    pub fn identity(&self) -> GroupElement {
        GroupElement(Integer::from(1))
    }

    fn check_scalar(&self, a: &GroupElement) -> Result<()> {
        if a.0 < 1 || a.0 >= self.params.q {
            return Err(Error::InvalidElement("scalar out of range"));
        }
        Ok(())
    }

    fn check_elem_range(&self, e: &SetElement) -> Result<()> {
        if e.0 < 2 || e.0 >= self.params.p {
            return Err(Error::InvalidElement("set element out of range"));
        }
        Ok(())
    }

    /// Group law of `G`: multiplication mod `q`.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_scalar(a)?;
        self.check_scalar(b)?;
        Ok(GroupElement(Integer::from(&a.0 * &b.0) % &self.params.q))
    }

    /// Inverse in `G`.
    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_scalar(a)?;
        let inv = a
            .0
            .clone()
            .invert(&self.params.q)
            .map_err(|_| Error::InvalidElement("scalar not invertible"))?;
        Ok(GroupElement(inv))
    }

    /// The action `a · E = E^a mod p`. Consults the fixed-base table cache;
    /// cold bases fall back to a plain modular exponentiation.
    pub fn act(&self, a: &GroupElement, e: &SetElement) -> Result<SetElement> {
        self.check_scalar(a)?;
        self.check_elem_range(e)?;
        if let Some(table) = self.lookup_table(&e.0) {
            return Ok(SetElement(table.pow(&self.params.p, &a.0)));
        }
        let r = e.0.clone().pow_mod(&a.0, &self.params.p).expect("positive exponent");
        Ok(SetElement(r))
    }

    fn lookup_table(&self, base: &Integer) -> Option<Arc<FixedBase>> {
        if self.params.q.significant_bits() < TABLE_MIN_EXP_BITS {
            return None;
        }
        self.tables.read().ok()?.get(base).cloned()
    }

    /// Memoize a fixed-base table for `e`. Worth calling before acting on
    /// the same base a few dozen times or more; harmless otherwise.
    pub fn prepare_base(&self, e: &SetElement) {
        if self.params.q.significant_bits() < TABLE_MIN_EXP_BITS {
            return;
        }
        if let Ok(cache) = self.tables.read() {
            if cache.contains_key(&e.0) {
                return;
            }
        }
        let table = Arc::new(FixedBase::build(
            &self.params.p,
            &e.0,
            self.params.q.significant_bits(),
        ));
        if let Ok(mut cache) = self.tables.write() {
            if cache.len() >= TABLE_CACHE_CAP {
                cache.clear();
            }
            cache.insert(e.0.clone(), table);
        }
    }

    /// Uniform sample from `G = [1, q-1]` by rejection from fixed-width
    /// random integers.
    pub fn sample_group(&self, rng: &mut (impl RngCore + ?Sized)) -> GroupElement {
        let bits = self.params.q.significant_bits();
        let nbytes = bits.div_ceil(8) as usize;
        let top_mask: u8 = if bits.is_multiple_of(8) { 0xff } else { (1u8 << (bits % 8)) - 1 };
        let mut buf = vec![0u8; nbytes];
        loop {
            rng.fill_bytes(&mut buf);
            buf[0] &= top_mask;
            let x = Integer::from_digits(&buf, Order::MsfBe);
            if x >= 1 && x < self.params.q {
                return GroupElement(x);
            }
        }
    }

    /// Membership test for the acted set: `E^q ≡ 1 (mod p)` and `E ≠ 1`.
    /// Total — malformed candidates return `false`, never an error.
    pub fn validate_set_element(&self, e: &SetElement) -> bool {
        if e.0 < 2 || e.0 >= self.params.p {
            return false;
        }
        e.0.clone().pow_mod(&self.params.q, &self.params.p).expect("positive exponent") == 1
    }

    /// Whether the backend is small enough for exhaustive scans.
    pub fn is_enumerable(&self) -> bool {
        self.params.q.significant_bits() <= 20
    }

    /// Brute-force solution of the action inverse problem: the unique `a`
    /// with `a · e1 = e2`. Enumerable backends only.
    pub fn solve_action_brute(&self, e1: &SetElement, e2: &SetElement) -> Result<GroupElement> {
        if !self.is_enumerable() {
            return Err(Error::BackendUnsupported("brute-force inversion needs an enumerable backend"));
        }
        self.check_elem_range(e1)?;
        self.check_elem_range(e2)?;
        let q = self.params.q.to_u64().expect("enumerable q fits in u64");
        for a in 1..q {
            let cand = GroupElement(Integer::from(a));
            if self.act(&cand, e1)? == *e2 {
                return Ok(cand);
            }
        }
        Err(Error::InvalidElement("elements are not in the same orbit"))
    }

    /// Every element of `G`, in ascending order. Enumerable backends only.
    pub fn enumerate_group(&self) -> Result<Vec<GroupElement>> {
        if !self.is_enumerable() {
            return Err(Error::BackendUnsupported("group enumeration needs an enumerable backend"));
        }
        let q = self.params.q.to_u64().expect("enumerable q fits in u64");
        Ok((1..q).map(|a| GroupElement(Integer::from(a))).collect())
    }

    /// Every element of the acted set, as `g^1 .. g^(q-1)`. Enumerable
    /// backends only.
    pub fn enumerate_set(&self) -> Result<Vec<SetElement>> {
        if !self.is_enumerable() {
            return Err(Error::BackendUnsupported("set enumeration needs an enumerable backend"));
        }
        let q = self.params.q.to_u64().expect("enumerable q fits in u64");
        let mut out = Vec::with_capacity(q as usize - 1);
        let mut cur = self.params.g.clone();
        for _ in 1..q {
            out.push(SetElement(cur.clone()));
            cur = cur * &self.params.g % &self.params.p;
        }
        Ok(out)
    }

    /// Canonical fixed-width big-endian encoding of a set element.
    pub fn encode_set(&self, e: &SetElement) -> Vec<u8> {
        int_to_be(&e.0, self.elem_len)
    }

    /// Canonical fixed-width big-endian encoding of a group element.
    pub fn encode_scalar(&self, a: &GroupElement) -> Vec<u8> {
        int_to_be(&a.0, self.scalar_len)
    }

    /// Decode a set element; checks width and range, not subgroup
    /// membership (callers validate keys where that matters).
    pub fn decode_set(&self, bytes: &[u8]) -> Result<SetElement> {
        if bytes.len() != self.elem_len {
            return Err(Error::Decode("set element has wrong width"));
        }
        let x = Integer::from_digits(bytes, Order::MsfBe);
        if x < 2 || x >= self.params.p {
            return Err(Error::Decode("set element out of range"));
        }
        Ok(SetElement(x))
    }

    /// Decode a group element; checks width and range.
    pub fn decode_scalar(&self, bytes: &[u8]) -> Result<GroupElement> {
        if bytes.len() != self.scalar_len {
            return Err(Error::Decode("group element has wrong width"));
        }
        let x = Integer::from_digits(bytes, Order::MsfBe);
        if x < 1 || x >= self.params.q {
            return Err(Error::Decode("group element out of range"));
        }
        Ok(GroupElement(x))
    }

    /// Construct a group element from a small integer (tests, fixtures).
    pub fn scalar_from_u64(&self, v: u64) -> Result<GroupElement> {
        let x = Integer::from(v);
        if x < 1 || x >= self.params.q {
            return Err(Error::InvalidElement("scalar out of range"));
        }
        Ok(GroupElement(x))
    }

    /// Construct a set element from a small integer (tests, fixtures).
    /// Range-checked only.
    pub fn elem_from_u64(&self, v: u64) -> Result<SetElement> {
        let x = Integer::from(v);
        if x < 2 || x >= self.params.p {
            return Err(Error::InvalidElement("set element out of range"));
        }
        Ok(SetElement(x))
    }
}

fn int_to_be(x: &Integer, width: usize) -> Vec<u8> {
    let digits = x.to_digits::<u8>(Order::MsfBe);
    debug_assert!(digits.len() <= width);
    let mut out = vec![0u8; width];
    out[width - digits.len()..].copy_from_slice(&digits);
    out
}
