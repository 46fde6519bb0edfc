use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use latticelab::attacks::{self, Label};
use latticelab::bgv::{self, BgvCiphertext, BgvSecretKey, Circuit};
use latticelab::format::{parse_csv, TextFile};
use latticelab::gaussian::{DiscreteGaussian, GaussianParams};
use latticelab::glyph::{self, GlyphParams, GlyphPublicKey, GlyphSecretKey, GlyphSignature, VerifyOutcome};
use latticelab::lwe::{self, LwePublicKey, LweSecretKey};
use latticelab::plwe::{self, PlweKeyPair, PlweParams, PlwePublicKey};
use latticelab::polyring::{IntPolynomial, RingElement};
use latticelab::{Error, Modulus, SeededRng};

use crate::{Command, SampleKind, Scheme, Verb};

const PLWE_DEFAULT_N: usize = 256;
const PLWE_MODULUS_FLOOR: u64 = 4096;
const BENCH_DEFAULT_N: usize = 64;

enum Failure {
    /// The operation ran and said no: bad input, failed decryption, rejected signature.
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Domain(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn write_file(path: &Path, data: &[u8]) -> Outcome {
    fs::write(path, data).map_err(|e| io_failure(path, e))
}

/// Writes to --out when given, stdout otherwise.
fn emit(out: &Option<PathBuf>, data: &[u8]) -> Outcome {
    match out {
        Some(path) => write_file(path, data),
        None => io::stdout()
            .write_all(data)
            .map_err(|e| Failure::Domain(format!("stdout: {e}"))),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Bits of `bytes`, least significant bit of each byte first.
fn to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| b >> i & 1 == 1)).collect()
}

fn from_bits(bits: &[bool], len: usize) -> Result<Vec<u8>, Failure> {
    if bits.len() < 8 * len {
        return Err(Failure::Domain(format!("ciphertext holds {} bits, need {}", bits.len(), 8 * len)));
    }
    Ok(bits[..8 * len]
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b as u8) << i))
        .collect())
}

fn with_length(text: String, len: usize) -> String {
    text + &format!("bytes={len}\n")
}

fn message_length(text: &str, header: &str) -> Result<usize, Failure> {
    Ok(TextFile::parse(text, header)?.field("bytes")?)
}

/// Runs a validated command and returns its exit code.
pub fn run(cmd: Command) -> i32 {
    let needs_rng = matches!(
        cmd.verb,
        Verb::Keygen(_) | Verb::Encrypt(_) | Verb::Sign(_) | Verb::Sample(_) | Verb::Smear(_) | Verb::Bench(_)
    );
    let rng = match cmd.seed {
        Some(seed) => SeededRng::from_seed(seed),
        None => {
            let rng = SeededRng::from_entropy();
            if needs_rng {
                eprintln!("seed={}", hex::encode(rng.seed()));
            }
            rng
        }
    };
    // one stream per verb, so a shared seed never couples two commands
    let mut rng = rng.derive(cmd.verb_name());
    match dispatch(&cmd, &mut rng) {
        Ok(()) => 0,
        Err(Failure::Domain(msg)) => {
            eprintln!("{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: &Command, rng: &mut SeededRng) -> Outcome {
    let scheme = cmd.scheme;
    match (&cmd.verb, scheme) {
        (Verb::Keygen(_), Some(Scheme::Lwe)) => keygen_lwe(cmd, rng),
        (Verb::Keygen(_), Some(Scheme::Plwe)) => keygen_plwe(cmd, rng),
        (Verb::Keygen(_), Some(Scheme::Glyph)) => keygen_glyph(cmd, rng),
        (Verb::Keygen(_), Some(Scheme::Bgv)) => keygen_bgv(cmd, rng),
        (Verb::Encrypt(a), Some(Scheme::Lwe)) => encrypt_lwe(cmd, &a.key, &a.input, rng),
        (Verb::Encrypt(a), Some(Scheme::Plwe)) => encrypt_plwe(cmd, &a.key, &a.input, rng),
        (Verb::Encrypt(a), Some(Scheme::Bgv)) => encrypt_bgv(cmd, &a.key, &a.input, rng),
        (Verb::Decrypt(a), Some(Scheme::Lwe)) => decrypt_lwe(cmd, &a.key, &a.input),
        (Verb::Decrypt(a), Some(Scheme::Plwe)) => decrypt_plwe(cmd, &a.key, &a.input),
        (Verb::Decrypt(a), Some(Scheme::Bgv)) => decrypt_bgv(cmd, &a.key, &a.input),
        (Verb::Sign(a), _) => sign(cmd, &a.key, &a.input, rng),
        (Verb::Verify(a), _) => verify(&a.key, &a.input, &a.sig),
        (Verb::Scan(a), _) => scan(cmd, a.r_max),
        (Verb::Attack(a), _) => attack(cmd, a),
        (Verb::Smear(a), _) => smear(cmd, a, rng),
        (Verb::BgvEval(a), _) => bgv_eval(cmd, &a.circuit, &a.wires),
        (Verb::Sample(a), None) => sample_gaussian(cmd, a.count, rng),
        (Verb::Sample(a), Some(_)) => sample_plwe(cmd, a, rng),
        (Verb::Bench(_), s) => bench(cmd, s, rng),
        (verb, s) => Err(Failure::Usage(format!("no handler for {verb:?} with {s:?}"))),
    }
}

fn keygen_lwe(cmd: &Command, rng: &mut SeededRng) -> Outcome {
    let p = lwe::derive_params(cmd.n.unwrap_or(BENCH_DEFAULT_N))?;
    let (sk, pk) = lwe::keygen(&p, rng)?;
    let prefix = cmd.out.as_ref().unwrap();
    write_file(&with_suffix(prefix, ".sk"), sk.to_text().as_bytes())?;
    write_file(&with_suffix(prefix, ".pk"), pk.to_text().as_bytes())
}

/// PLWE parameters from --n/--q/--f/--sigma: `xⁿ + 1` with the smallest
/// prime `≡ 1 (mod 2n)` above 4096 unless told otherwise.
fn plwe_params_from_flags(cmd: &Command) -> Result<PlweParams, Failure> {
    let sigma = cmd.sigma.unwrap_or(plwe::DEFAULT_SIGMA);
    Ok(match (&cmd.f, cmd.q) {
        (Some(f), Some(q)) => {
            let f: IntPolynomial = f.parse()?;
            if cmd.n.is_some_and(|n| Some(n) != f.degree()) {
                return Err(Failure::Domain("--n disagrees with the degree of --f".into()));
            }
            PlweParams::new(f, q, sigma, false)?
        }
        (None, Some(q)) => {
            let n = cmd.n.unwrap_or(PLWE_DEFAULT_N);
            PlweParams::new(IntPolynomial::negacyclic(n), q, sigma, false)?
        }
        _ => PlweParams::negacyclic(cmd.n.unwrap_or(PLWE_DEFAULT_N), PLWE_MODULUS_FLOOR, sigma)?,
    })
}

fn keygen_plwe(cmd: &Command, rng: &mut SeededRng) -> Outcome {
    let p = plwe_params_from_flags(cmd)?;
    let kp = plwe::keygen(&p, rng)?;
    let prefix = cmd.out.as_ref().unwrap();
    write_file(&with_suffix(prefix, ".sk"), kp.to_text(&p).as_bytes())?;
    write_file(&with_suffix(prefix, ".pk"), kp.public().to_text(&p).as_bytes())
}

fn keygen_glyph(cmd: &Command, rng: &mut SeededRng) -> Outcome {
    let Verb::Keygen(k) = &cmd.verb else { unreachable!() };
    let rec = GlyphParams::recommended();
    let p = GlyphParams::new(
        cmd.n.unwrap_or(rec.n),
        cmd.q.unwrap_or(rec.q.value()),
        k.b.unwrap_or(rec.b),
        k.k.unwrap_or(rec.k),
        k.secret_bound.unwrap_or(rec.secret_bound),
    )?;
    let (sk, pk) = glyph::keygen(&p, rng)?;
    let prefix = cmd.out.as_ref().unwrap();
    write_file(&with_suffix(prefix, ".sk"), sk.to_text(&pk, &p).as_bytes())?;
    write_file(&with_suffix(prefix, ".pk"), pk.to_text(&p).as_bytes())
}

fn keygen_bgv(cmd: &Command, rng: &mut SeededRng) -> Outcome {
    let Verb::Keygen(k) = &cmd.verb else { unreachable!() };
    let base = bgv::BgvParams::setup(
        k.m.unwrap_or(32),
        k.p.unwrap_or(2),
        k.r.unwrap_or(1),
        k.levels.unwrap_or(3),
        k.growth.unwrap_or(1.0),
    )?;
    let p = bgv::BgvParams::from_chain(
        base.m,
        base.p,
        base.r,
        base.chain.clone(),
        cmd.sigma.unwrap_or(bgv::DEFAULT_SIGMA),
        base.key_sigma,
    )?;
    let sk = bgv::keygen(&p, rng)?;
    let prefix = cmd.out.as_ref().unwrap();
    write_file(&with_suffix(prefix, ".sk"), sk.to_text(&p).as_bytes())
}

fn encrypt_lwe(cmd: &Command, key: &Path, input: &Path, rng: &mut SeededRng) -> Outcome {
    let pk = LwePublicKey::from_text(&read_text(key)?)?;
    let msg = read_bytes(input)?;
    let cts: Vec<_> = to_bits(&msg).into_iter().map(|b| lwe::encrypt_bit(&pk, b, rng)).collect();
    let text = with_length(lwe::ciphertexts_to_text(&cts, &pk.params), msg.len());
    emit(&cmd.out, text.as_bytes())
}

fn decrypt_lwe(cmd: &Command, key: &Path, input: &Path) -> Outcome {
    let sk = LweSecretKey::from_text(&read_text(key)?)?;
    let text = read_text(input)?;
    let (p, cts) = lwe::ciphertexts_from_text(&text)?;
    if p != sk.params {
        return Err(Error::ParamMismatch.into());
    }
    let bits = cts
        .iter()
        .map(|ct| lwe::decrypt_bit(&sk, ct))
        .collect::<latticelab::Result<Vec<_>>>()?;
    emit(&cmd.out, &from_bits(&bits, message_length(&text, lwe::HEADER)?)?)
}

/// Messages are cut into n-bit blocks, the last one zero-padded.
fn encrypt_plwe(cmd: &Command, key: &Path, input: &Path, rng: &mut SeededRng) -> Outcome {
    let (p, pk) = PlwePublicKey::from_text(&read_text(key)?)?;
    let msg = read_bytes(input)?;
    let cts = to_bits(&msg)
        .chunks(p.n())
        .map(|chunk| {
            let mut block = chunk.to_vec();
            block.resize(p.n(), false);
            plwe::encrypt(&pk, &block, &p, rng)
        })
        .collect::<latticelab::Result<Vec<_>>>()?;
    let text = with_length(plwe::ciphertexts_to_text(&cts, &p), msg.len());
    emit(&cmd.out, text.as_bytes())
}

fn same_plwe_params(a: &PlweParams, b: &PlweParams) -> bool {
    a.q() == b.q() && a.ring.poly() == b.ring.poly()
}

fn decrypt_plwe(cmd: &Command, key: &Path, input: &Path) -> Outcome {
    let (p, kp) = PlweKeyPair::from_text(&read_text(key)?)?;
    let text = read_text(input)?;
    let (pc, cts) = plwe::ciphertexts_from_text(&text)?;
    if !same_plwe_params(&p, &pc) {
        return Err(Error::ParamMismatch.into());
    }
    let s = RingElement::from_u64(&pc.ring, kp.s.residues());
    let mut bits = Vec::with_capacity(cts.len() * p.n());
    for ct in &cts {
        bits.extend(plwe::decrypt(&s, ct)?);
    }
    emit(&cmd.out, &from_bits(&bits, message_length(&text, plwe::HEADER)?)?)
}

fn encrypt_bgv(cmd: &Command, key: &Path, input: &Path, rng: &mut SeededRng) -> Outcome {
    let (p, sk) = BgvSecretKey::from_text(&read_text(key)?)?;
    let mut coeffs: Vec<u64> = parse_csv(read_text(input)?.trim())?;
    if coeffs.len() > p.n() {
        return Err(Failure::Domain(format!("plaintext has {} coefficients, ring degree is {}", coeffs.len(), p.n())));
    }
    if let Some(c) = coeffs.iter().find(|&&c| c >= p.t) {
        return Err(Failure::Domain(format!("plaintext coefficient {c} is not reduced mod {}", p.t)));
    }
    coeffs.resize(p.n(), 0);
    let ct = bgv::encrypt(&p.plaintext(&coeffs)?, &sk, &p, rng)?;
    emit(&cmd.out, ct.to_text(&p).as_bytes())
}

fn decrypt_bgv(cmd: &Command, key: &Path, input: &Path) -> Outcome {
    let (p, sk) = BgvSecretKey::from_text(&read_text(key)?)?;
    let (pc, ct) = BgvCiphertext::from_text(&read_text(input)?)?;
    if p != pc {
        return Err(Error::ParamMismatch.into());
    }
    let pt = bgv::decrypt(&ct, &sk, &p)?;
    emit(&cmd.out, format!("{}\n", bgv::plaintext_to_text(&pt)).as_bytes())
}

fn bgv_eval(cmd: &Command, circuit: &Path, wires: &[(String, PathBuf)]) -> Outcome {
    let circuit: Circuit = read_text(circuit)?.parse()?;
    let mut params = None;
    let mut inputs = BTreeMap::new();
    for (name, path) in wires {
        let (p, ct) = BgvCiphertext::from_text(&read_text(path)?)?;
        match &params {
            Some(q) if *q != p => return Err(Error::ParamMismatch.into()),
            Some(_) => {}
            None => params = Some(p),
        }
        inputs.insert(name.clone(), ct);
    }
    let params = params.unwrap();
    for w in circuit.inputs() {
        if !inputs.contains_key(&w) {
            return Err(Failure::Usage(format!("circuit input {w} has no --wire")));
        }
    }
    let wires = bgv::eval_circuit(&circuit, &inputs, &params)?;
    let out = &wires[circuit.output()];
    emit(&cmd.out, out.to_text(&params).as_bytes())
}

fn sign(cmd: &Command, key: &Path, input: &Path, rng: &mut SeededRng) -> Outcome {
    let (p, sk, pk) = GlyphSecretKey::from_text(&read_text(key)?)?;
    let msg = read_bytes(input)?;
    let (sig, iterations) = glyph::sign(&sk, &pk, &msg, &p, rng)?;
    eprintln!("iterations={iterations}");
    emit(&cmd.out, sig.to_text(&p).as_bytes())
}

fn verify(key: &Path, input: &Path, sig: &Path) -> Outcome {
    let (p, pk) = GlyphPublicKey::from_text(&read_text(key)?)?;
    let (ps, sig) = GlyphSignature::from_text(&read_text(sig)?)?;
    if p != ps {
        return Err(Error::ParamMismatch.into());
    }
    match glyph::verify(&pk, &read_bytes(input)?, &sig, &p)? {
        VerifyOutcome::Accept => {
            println!("accept");
            Ok(())
        }
        reject => Err(Failure::Domain(reject.to_string())),
    }
}

fn scan(cmd: &Command, r_max: u64) -> Outcome {
    let f: IntPolynomial = cmd.f.as_deref().unwrap().parse()?;
    let q = Modulus::new(cmd.q.unwrap())?;
    let report = attacks::weakness_scan(&f, q, r_max)?;
    print!("{report}");
    if let Some(path) = &cmd.out {
        write_file(path, report.to_text().as_bytes())?;
    }
    Ok(())
}

fn label_name(l: Label) -> &'static str {
    match l {
        Label::Valid => "valid",
        Label::Random => "random",
    }
}

fn attack(cmd: &Command, a: &crate::AttackArgs) -> Outcome {
    let p = PlweParams::from_text(&read_text(&a.params)?)?;
    let (ps, samples) = plwe::samples_from_text(&read_text(&a.samples)?)?;
    if !same_plwe_params(&p, &ps) {
        return Err(Error::ParamMismatch.into());
    }
    // re-home the samples on the parameter file's ring
    let samples: Vec<_> = samples
        .into_iter()
        .map(|s| plwe::PlweSample {
            a: RingElement::from_u64(&p.ring, s.a.residues()),
            b: RingElement::from_u64(&p.ring, s.b.residues()),
        })
        .collect();
    let verdicts = match a.alg {
        1 => attacks::decide_alg1(&samples, &p, a.t)?,
        _ => {
            let alpha = p.q().elem(a.alpha.unwrap());
            attacks::decide_alg2_with_limit(&samples, &p, alpha, a.t, a.r_max)?
        }
    };
    let mut out = format!("{:<8} {:<8} {}\n", "sample", "label", "survivors");
    for (i, v) in verdicts.iter().enumerate() {
        writeln!(out, "{:<8} {:<8} {}", i, label_name(v.label), v.surviving_secrets).unwrap();
    }
    let valid = verdicts.iter().filter(|v| v.label == Label::Valid).count();
    writeln!(out, "valid={valid} random={}", verdicts.len() - valid).unwrap();
    emit(&cmd.out, out.as_bytes())
}

fn smear(cmd: &Command, a: &crate::SmearArgs, rng: &mut SeededRng) -> Outcome {
    let p = match &a.params {
        Some(path) => PlweParams::from_text(&read_text(path)?)?,
        None => plwe_params_from_flags(cmd)?,
    };
    let alpha = p.q().elem(a.alpha);
    let est = attacks::smearing_estimate(&p, alpha, a.trials, a.t, rng)?;
    emit(&cmd.out, format!("smearing={est:.6}\ntrials={}\n", a.trials).as_bytes())
}

fn sample_gaussian(cmd: &Command, count: usize, rng: &mut SeededRng) -> Outcome {
    let g = DiscreteGaussian::new(GaussianParams::new(cmd.sigma.unwrap_or(plwe::DEFAULT_SIGMA))?)?;
    let mut out = String::new();
    for x in g.sample_vec(count, rng) {
        writeln!(out, "{x}").unwrap();
    }
    emit(&cmd.out, out.as_bytes())
}

fn sample_plwe(cmd: &Command, a: &crate::SampleArgs, rng: &mut SeededRng) -> Outcome {
    let (p, s) = match (&a.key, &a.params) {
        (Some(key), _) => {
            let (p, kp) = PlweKeyPair::from_text(&read_text(key)?)?;
            (p, Some(kp.s))
        }
        (None, Some(path)) => (PlweParams::from_text(&read_text(path)?)?, None),
        (None, None) => (plwe_params_from_flags(cmd)?, None),
    };
    let s = s.unwrap_or_else(|| p.sample_error(rng));
    let samples = (0..a.count)
        .map(|_| match a.kind {
            SampleKind::Oracle => plwe::oracle_sample(&p, &s, rng),
            SampleKind::Uniform => Ok(plwe::uniform_sample_pair(&p, rng)),
        })
        .collect::<latticelab::Result<Vec<_>>>()?;
    emit(&cmd.out, plwe::samples_to_text(&samples, &p).as_bytes())
}

fn micros(start: Instant) -> u128 {
    start.elapsed().as_micros()
}

/// Columns: kind, scheme, item, value. Times are in microseconds.
fn bench(cmd: &Command, scheme: Option<Scheme>, rng: &mut SeededRng) -> Outcome {
    let n = cmd.n.unwrap_or(BENCH_DEFAULT_N);
    let mut rows: Vec<(&str, &str, &str, String)> = Vec::new();
    let mut lwe_size = None;
    let mut plwe_size = None;
    let bits: Vec<bool> = (0..n).map(|_| rng.next_bool()).collect();

    if scheme != Some(Scheme::Plwe) {
        let p = lwe::derive_params(n)?;
        let t = Instant::now();
        let (sk, pk) = lwe::keygen(&p, rng)?;
        rows.push(("time", "lwe", "keygen_us", micros(t).to_string()));
        let t = Instant::now();
        let cts: Vec<_> = bits.iter().map(|&b| lwe::encrypt_bit(&pk, b, rng)).collect();
        rows.push(("time", "lwe", "encrypt_n_bits_us", micros(t).to_string()));
        let t = Instant::now();
        for ct in &cts {
            lwe::decrypt_bit(&sk, ct)?;
        }
        rows.push(("time", "lwe", "decrypt_n_bits_us", micros(t).to_string()));
        rows.push(("size", "lwe", "pk_residues", p.public_key_residues().to_string()));
        rows.push(("size", "lwe", "sk_residues", p.secret_key_residues().to_string()));
        rows.push(("size", "lwe", "ct_residues_n_bits", (n * (p.n + 1)).to_string()));
        lwe_size = Some(p.public_key_residues());
    }
    if scheme != Some(Scheme::Lwe) {
        let p = PlweParams::negacyclic(n, PLWE_MODULUS_FLOOR, cmd.sigma.unwrap_or(plwe::DEFAULT_SIGMA))?;
        let t = Instant::now();
        let kp = plwe::keygen(&p, rng)?;
        rows.push(("time", "plwe", "keygen_us", micros(t).to_string()));
        let t = Instant::now();
        let ct = plwe::encrypt(&kp.public(), &bits, &p, rng)?;
        rows.push(("time", "plwe", "encrypt_n_bits_us", micros(t).to_string()));
        let t = Instant::now();
        plwe::decrypt(&kp.s, &ct)?;
        rows.push(("time", "plwe", "decrypt_n_bits_us", micros(t).to_string()));
        rows.push(("size", "plwe", "pk_residues", p.public_key_residues().to_string()));
        rows.push(("size", "plwe", "sk_residues", p.n().to_string()));
        rows.push(("size", "plwe", "ct_residues_n_bits", (2 * n).to_string()));
        plwe_size = Some(p.public_key_residues());
    }
    if let (Some(l), Some(r)) = (lwe_size, plwe_size) {
        rows.push(("ratio", "lwe/plwe", "pk_residues", format!("{:.2}", l as f64 / r as f64)));
    }

    let mut out = format!("{:<6} {:<9} {:<20} {}\n", "kind", "scheme", "item", "value");
    for (kind, scheme, item, value) in rows {
        writeln!(out, "{kind:<6} {scheme:<9} {item:<20} {value}").unwrap();
    }
    writeln!(out, "n={n}").unwrap();
    emit(&cmd.out, out.as_bytes())
}
