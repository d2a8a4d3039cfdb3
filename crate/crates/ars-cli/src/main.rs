//! Command-line front end for the accountable ring signature toolkit.
//!
//! All files are `ARS1` containers. Exit codes: 0 success, 1 verification
//! or judge rejection, 2 malformed input, 3 key-relation violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ars_core::action::{Action, GroupElement, SetElement};
use ars_core::ars::{self, Params};
use ars_core::codec::{self, ObjectKind};
use ars_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "ars",
    about = "Accountable ring signatures over a group action: key management, signing, verification, opening with proof, and judging"
)]
struct Cli {
    /// Backend parameters: "realistic" (768-bit safe prime) or "tiny"
    /// (exhaustively enumerable test parameters).
    #[arg(long, global = true, default_value = "realistic")]
    backend: String,

    /// Security parameter; sessions per signature scale as 2*lambda*|ring|.
    #[arg(long, global = true, default_value_t = 8)]
    lambda: u32,

    /// Deterministic RNG seed. Accepted only with --backend tiny, so
    /// production keys cannot be made deterministic by accident.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Hex-dump every container the command writes to stderr.
    #[arg(long, global = true)]
    dump: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a master key pair for opening.
    Mkeygen {
        /// Output path for the master public key.
        #[arg(long)]
        mpk: PathBuf,
        /// Output path for the master secret key.
        #[arg(long)]
        msk: PathBuf,
    },
    /// Generate a member key pair; optionally append the public key to a
    /// ring file (created if absent).
    Keygen {
        /// Output path for the secret key; the public key lands at
        /// `<key>.pub`.
        #[arg(long)]
        key: PathBuf,
        /// Ring file to append the new public key to.
        #[arg(long)]
        ring: Option<PathBuf>,
    },
    /// Sign a message for a ring.
    Sign {
        #[arg(long)]
        mpk: PathBuf,
        #[arg(long)]
        ring: PathBuf,
        /// Message file, read as raw bytes.
        #[arg(long)]
        msg: PathBuf,
        /// Signer's secret key file.
        #[arg(long)]
        key: PathBuf,
        /// Output path for the signature.
        #[arg(long)]
        sig: PathBuf,
    },
    /// Verify a signature. Exits 0 when valid, 1 when not.
    Verify {
        #[arg(long)]
        mpk: PathBuf,
        #[arg(long)]
        ring: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Open a signature with the master secret key, writing the opened
    /// key (or bottom) and a publicly verifiable proof. Prints the opened
    /// key's fingerprint, or "bottom".
    Open {
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        ring: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// Output path for the opening proof.
        #[arg(long)]
        proof: PathBuf,
        /// Output path for the opened public key.
        #[arg(long = "claimed-pk")]
        claimed_pk: PathBuf,
    },
    /// Judge an opening claim. Exits 0 when the proof convinces, 1 when
    /// not.
    Judge {
        #[arg(long)]
        mpk: PathBuf,
        #[arg(long)]
        ring: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// The claimed opened key, as written by `open`.
        #[arg(long = "claimed-pk")]
        claimed_pk: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn key_relation(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn rejected(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

fn from_core(err: CoreError) -> Failure {
    match err {
        CoreError::WitnessNotInRing | CoreError::InvalidElement(_) => {
            Failure::key_relation(err.to_string())
        }
        other => Failure::malformed(other.to_string()),
    }
}

struct Ctx {
    action: Action,
    params: Params,
    rng: ChaCha20Rng,
    dump: bool,
}

impl Ctx {
    fn write(&self, path: &Path, kind: ObjectKind, body: &[u8]) -> Result<(), Failure> {
        let container = codec::write_container(kind, body);
        if self.dump {
            eprintln!("{}:", path.display());
            eprint!("{}", codec::hex_dump(&container));
        }
        fs::write(path, &container)
            .map_err(|e| Failure::malformed(format!("writing {}: {e}", path.display())))
    }

    fn read(&self, path: &Path, want: ObjectKind) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::malformed(format!("reading {}: {e}", path.display())))?;
        let (kind, body) = codec::read_container(&bytes)
            .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
        if kind != want {
            return Err(Failure::malformed(format!(
                "{}: expected {want:?} container, found {kind:?}",
                path.display()
            )));
        }
        Ok(body.to_vec())
    }

    fn read_public_key(&self, path: &Path) -> Result<SetElement, Failure> {
        let body = self.read(path, ObjectKind::PublicKey)?;
        let pk = self.action.decode_set(&body).map_err(from_core)?;
        if !self.action.validate_set_element(&pk) {
            return Err(Failure::key_relation(format!(
                "{}: public key fails membership validation",
                path.display()
            )));
        }
        Ok(pk)
    }

    fn read_secret_key(&self, path: &Path) -> Result<GroupElement, Failure> {
        let body = self.read(path, ObjectKind::SecretKey)?;
        self.action.decode_scalar(&body).map_err(from_core)
    }

    fn read_ring(&self, path: &Path) -> Result<Vec<SetElement>, Failure> {
        let body = self.read(path, ObjectKind::Ring)?;
        let ring = codec::decode_ring(&self.action, &body).map_err(from_core)?;
        for pk in &ring {
            if !self.action.validate_set_element(pk) {
                return Err(Failure::key_relation(format!(
                    "{}: ring key fails membership validation",
                    path.display()
                )));
            }
        }
        Ok(ring)
    }

    fn read_msg(&self, path: &Path) -> Result<Vec<u8>, Failure> {
        fs::read(path).map_err(|e| Failure::malformed(format!("reading {}: {e}", path.display())))
    }
}

fn fingerprint_hex(action: &Action, pk: &SetElement) -> String {
    hex::encode(codec::fingerprint(&action.encode_set(pk)))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let action = match cli.backend.as_str() {
        "realistic" => Action::realistic(),
        "tiny" => Action::tiny(),
        other => return Err(Failure::malformed(format!("unknown backend \"{other}\""))),
    };
    if cli.seed.is_some() && cli.backend != "tiny" {
        return Err(Failure::malformed("--seed is only accepted with --backend tiny"));
    }
    let rng = match cli.seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_entropy(),
    };
    let params = Params::new(cli.lambda).map_err(from_core)?;
    let mut ctx = Ctx { action, params, rng, dump: cli.dump };

    match cli.command {
        Command::Mkeygen { mpk, msk } => {
            let pair = ars::mkeygen(&ctx.action, &mut ctx.rng);
            ctx.write(&msk, ObjectKind::SecretKey, &ctx.action.encode_scalar(&pair.secret))?;
            ctx.write(&mpk, ObjectKind::PublicKey, &ctx.action.encode_set(&pair.public))?;
            println!("{}", fingerprint_hex(&ctx.action, &pair.public));
            Ok(())
        }
        Command::Keygen { key, ring } => {
            let mut existing = match &ring {
                Some(path) if path.exists() => ctx.read_ring(path)?,
                _ => Vec::new(),
            };
            let pair = loop {
                let pair = ars::keygen(&ctx.action, &mut ctx.rng);
                if !existing.contains(&pair.public) {
                    break pair;
                }
            };
            ctx.write(&key, ObjectKind::SecretKey, &ctx.action.encode_scalar(&pair.secret))?;
            let pub_path = match key.extension() {
                Some(ext) => key.with_extension(format!("{}.pub", ext.to_string_lossy())),
                None => key.with_extension("pub"),
            };
            ctx.write(&pub_path, ObjectKind::PublicKey, &ctx.action.encode_set(&pair.public))?;
            if let Some(path) = ring {
                existing.push(pair.public.clone());
                ctx.write(&path, ObjectKind::Ring, &codec::encode_ring(&ctx.action, &existing))?;
            }
            println!("{}", fingerprint_hex(&ctx.action, &pair.public));
            Ok(())
        }
        Command::Sign { mpk, ring, msg, key, sig } => {
            let mpk = ctx.read_public_key(&mpk)?;
            let ring = ctx.read_ring(&ring)?;
            let msg = ctx.read_msg(&msg)?;
            let sk = ctx.read_secret_key(&key)?;
            let signature =
                ars::sign(&ctx.action, &mpk, &ring, &msg, &sk, &ctx.params, &mut ctx.rng)
                    .map_err(from_core)?;
            ctx.write(
                &sig,
                ObjectKind::Signature,
                &codec::encode_signature(&ctx.action, &signature),
            )
        }
        Command::Verify { mpk, ring, msg, sig } => {
            let mpk = ctx.read_public_key(&mpk)?;
            let ring = ctx.read_ring(&ring)?;
            let msg = ctx.read_msg(&msg)?;
            // The signature is the object under test: a file that does not
            // even decode is an invalid signature, not a malformed input.
            let Ok(body) = ctx.read(&sig, ObjectKind::Signature) else {
                return Err(Failure::rejected("signature rejected (undecodable)"));
            };
            let Ok(signature) = codec::decode_signature(&ctx.action, &body) else {
                return Err(Failure::rejected("signature rejected (undecodable)"));
            };
            if ars::verify(&ctx.action, &mpk, &ring, &msg, &signature, &ctx.params) {
                Ok(())
            } else {
                Err(Failure::rejected("signature rejected"))
            }
        }
        Command::Open { msk, ring, msg, sig, proof, claimed_pk } => {
            let msk = ctx.read_secret_key(&msk)?;
            let ring = ctx.read_ring(&ring)?;
            let msg = ctx.read_msg(&msg)?;
            let body = ctx.read(&sig, ObjectKind::Signature)?;
            let signature = codec::decode_signature(&ctx.action, &body)
                .map_err(|e| Failure::malformed(format!("{}: {e}", sig.display())))?;
            let (opened, opening_proof) = ars::open_with_proof(
                &ctx.action,
                &msk,
                &ring,
                &msg,
                &signature,
                &ctx.params,
                &mut ctx.rng,
            )
            .map_err(from_core)?;
            ctx.write(
                &proof,
                ObjectKind::JudgeProof,
                &codec::encode_judge_proof(&ctx.action, &opening_proof),
            )?;
            ctx.write(
                &claimed_pk,
                ObjectKind::OpenResult,
                &codec::encode_open_result(&ctx.action, opened.as_ref()),
            )?;
            match &opened {
                Some(pk) => println!("{}", fingerprint_hex(&ctx.action, pk)),
                None => println!("bottom"),
            }
            Ok(())
        }
        Command::Judge { mpk, ring, sig, claimed_pk, proof } => {
            let mpk = ctx.read_public_key(&mpk)?;
            let ring = ctx.read_ring(&ring)?;
            // Signature, claim and proof are the objects under judgment;
            // undecodable ones are rejected claims rather than usage errors.
            let claim = (|| {
                let body = ctx.read(&sig, ObjectKind::Signature).ok()?;
                let signature = codec::decode_signature(&ctx.action, &body).ok()?;
                let claimed_body = ctx.read(&claimed_pk, ObjectKind::OpenResult).ok()?;
                let claimed = codec::decode_open_result(&ctx.action, &claimed_body).ok()?;
                let proof_body = ctx.read(&proof, ObjectKind::JudgeProof).ok()?;
                let opening_proof = codec::decode_judge_proof(&ctx.action, &proof_body).ok()?;
                Some((signature, claimed, opening_proof))
            })();
            let Some((signature, claimed, opening_proof)) = claim else {
                return Err(Failure::rejected("opening claim rejected (undecodable)"));
            };
            if ars::judge(
                &ctx.action,
                &mpk,
                &ring,
                &signature,
                claimed.as_ref(),
                &opening_proof,
                &ctx.params,
            ) {
                Ok(())
            } else {
                Err(Failure::rejected("opening claim rejected"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
