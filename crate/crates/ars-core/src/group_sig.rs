//! Static group signature: an accountable ring signature with the ring and
//! master fixed at setup. Member identity is roster position (0-based).

use rand::RngCore;

use crate::action::{Action, GroupElement, SetElement};
use crate::ars::{self, Params, Signature};
use crate::error::Result;

/// Group public key: the manager's opening key plus the fixed member
/// roster, in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPublicKey {
    pub mpk: SetElement,
    pub roster: Vec<SetElement>,
}

/// Set up a group of `n` members: one master key pair plus `n` member key
/// pairs. Re-samples on the (tiny-backend) chance of a roster collision.
pub fn gkeygen(
    action: &Action,
    n: usize,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(GroupPublicKey, Vec<GroupElement>, GroupElement)> {
    let master = ars::mkeygen(action, rng);
    let mut roster = Vec::with_capacity(n);
    let mut sks = Vec::with_capacity(n);
    while roster.len() < n {
        let kp = ars::keygen(action, rng);
        if kp.public != master.public && !roster.contains(&kp.public) {
            roster.push(kp.public);
            sks.push(kp.secret);
        }
    }
    Ok((GroupPublicKey { mpk: master.public, roster }, sks, master.secret))
}

pub fn gsign(
    action: &Action,
    gpk: &GroupPublicKey,
    msg: &[u8],
    sk: &GroupElement,
    params: &Params,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<Signature> {
    ars::sign(action, &gpk.mpk, &gpk.roster, msg, sk, params, rng)
}

pub fn gverify(
    action: &Action,
    gpk: &GroupPublicKey,
    msg: &[u8],
    sig: &Signature,
    params: &Params,
) -> bool {
    ars::verify(action, &gpk.mpk, &gpk.roster, msg, sig, params)
}

/// Open to a roster index; bottom when the ARS opening fails or the opened
/// key is (impossibly) off-roster.
pub fn gopen(
    action: &Action,
    gpk: &GroupPublicKey,
    msk: &GroupElement,
    msg: &[u8],
    sig: &Signature,
    params: &Params,
) -> Result<Option<usize>> {
    let opened = ars::open(action, msk, &gpk.roster, msg, sig, params)?;
    Ok(opened.and_then(|pk| gpk.roster.iter().position(|e| *e == pk)))
}
