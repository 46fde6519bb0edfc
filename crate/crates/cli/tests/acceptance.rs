//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! limit, prints one PASS/FAIL line each, and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use latticelab::attacks::{self, Label, SmallnessRegion};
use latticelab::bgv::{self, BgvParams, Circuit};
use latticelab::gaussian::{DiscreteGaussian, GaussianParams};
use latticelab::glyph::{self, GlyphParams, RejectReason, VerifyOutcome};
use latticelab::lwe;
use latticelab::numberfield::{complex_roots, discriminant, discriminant_agreement, discriminant_numeric};
use latticelab::plwe::{self, PlweParams, PlweSample};
use latticelab::polyring::{cyclotomic_poly, roots_mod_q, IntPolynomial, RingElement};
use latticelab::zq::{is_prime, next_prime_congruent};
use latticelab::{Error, Modulus, SeededRng};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(label: &str) -> SeededRng {
    SeededRng::from_seed([0x5a; 32]).derive(label)
}

fn random_bits(n: usize, rng: &mut SeededRng) -> Vec<bool> {
    (0..n).map(|_| rng.next_bool()).collect()
}

fn lwe_round_trip() -> Check {
    let p = lwe::derive_params(64).map_err(e2s)?;
    ensure(p.q.value() == 4099 && p.m == 845, || format!("derived q={}, m={}", p.q, p.m))?;
    let mut r = rng("lwe");
    let (sk, pk) = lwe::keygen(&p, &mut r).map_err(e2s)?;
    let trials = 2000;
    let mut failures = 0;
    for _ in 0..trials {
        let z = r.next_bool();
        let ct = lwe::encrypt_bit(&pk, z, &mut r);
        if lwe::decrypt_bit(&sk, &ct).map_err(e2s)? != z {
            failures += 1;
        }
    }
    let rate = failures as f64 / trials as f64;
    ensure(rate <= 0.01, || format!("failure rate {rate}"))?;
    Ok(format!("q=4099 m=845, {failures}/{trials} failures"))
}

fn plwe_round_trip() -> Check {
    let p = PlweParams::negacyclic(256, 1 << 12, 3.2).map_err(e2s)?;
    ensure(p.q().value() == 7681, || format!("q={}", p.q()))?;
    let mut r = rng("plwe");
    let kp = plwe::keygen(&p, &mut r).map_err(e2s)?;
    let mut failures = 0;
    for _ in 0..100 {
        let bits = random_bits(256, &mut r);
        let ct = plwe::encrypt(&kp.public(), &bits, &p, &mut r).map_err(e2s)?;
        if plwe::decrypt(&kp.s, &ct).map_err(e2s)? != bits {
            failures += 1;
        }
    }
    // 100 messages at <= 0.1% leaves no room for a single failure
    ensure(failures == 0, || format!("{failures}/100 messages failed"))?;

    let small = PlweParams::negacyclic(16, 256, 3.2).map_err(e2s)?;
    let half = small.q().value() / 2;
    for _ in 0..1000 {
        let (kp, e) = plwe::keygen_witnessed(&small, &mut r).map_err(e2s)?;
        let bits = random_bits(16, &mut r);
        let (ct, t) = plwe::encrypt_traced(&kp.public(), &bits, &small, &mut r).map_err(e2s)?;
        let lhs = ct.v.sub(&ct.u.mul(&kp.s).map_err(e2s)?).map_err(e2s)?;
        let z = plwe::message_poly(&small, &bits).map_err(e2s)?;
        let rhs = e
            .mul(&t.r)
            .and_then(|x| x.add(&t.e2))
            .and_then(|x| x.sub(&t.e1.mul(&kp.s)?))
            .and_then(|x| x.add(&z.scale(half)))
            .map_err(e2s)?;
        ensure(lhs == rhs, || "v - u·s differs from e·r + e2 - e1·s + ⌊q/2⌋z".into())?;
    }
    Ok("q=7681, 0/100 message failures; identity exact on 1000 instances at n=16".into())
}

/// `x¹⁶ + x + 255` over `F_257`, which vanishes at 1.
fn alg1_instance() -> Result<PlweParams, String> {
    let mut f = vec![0i64; 17];
    f[0] = 255;
    f[1] = 1;
    f[16] = 1;
    PlweParams::new(IntPolynomial::new(f), 257, 1.5, false).map_err(e2s)
}

fn batches(p: &PlweParams, label: &str, count: usize) -> Result<(RingElement, Vec<PlweSample>, Vec<PlweSample>), String> {
    let mut r = rng(&format!("{label}/oracle"));
    let s = p.sample_error(&mut r);
    let valid = (0..count)
        .map(|_| plwe::oracle_sample(p, &s, &mut r))
        .collect::<latticelab::Result<Vec<_>>>()
        .map_err(e2s)?;
    let mut r = rng(&format!("{label}/uniform"));
    let random = (0..count).map(|_| plwe::uniform_sample_pair(p, &mut r)).collect();
    Ok((s, valid, random))
}

fn correct(verdicts: &[attacks::Verdict], want: Label) -> usize {
    verdicts.iter().filter(|v| v.label == want).count()
}

fn alg1_attack() -> Check {
    let p = alg1_instance()?;
    let (s, valid, random) = batches(&p, "alg1", 50)?;
    let v = attacks::decide_alg1(&valid, &p, 3.0).map_err(e2s)?;
    let u = attacks::decide_alg1(&random, &p, 3.0).map_err(e2s)?;
    let (cv, cu) = (correct(&v, Label::Valid), correct(&u, Label::Random));
    ensure(cv >= 45 && cu >= 45, || format!("valid {cv}/50, random {cu}/50"))?;

    let one = p.q().elem(1);
    let region = SmallnessRegion::new(&p, one, 3.0, 1).map_err(e2s)?;
    let planted = s.evaluate(one).value();
    for (i, sample) in valid.iter().enumerate() {
        let survivors = attacks::sample_survivors(sample, one, |x| region.contains(x));
        ensure(survivors.contains(&planted), || format!("planted s(1) eliminated by sample {i}"))?;
    }
    Ok(format!("valid {cv}/50, random {cu}/50, planted s(1) kept by all 50"))
}

fn alg2_degeneration() -> Check {
    let p = alg1_instance()?;
    let (_, valid, random) = batches(&p, "alg2-shared", 50)?;
    let mut shared = Vec::with_capacity(100);
    for (a, b) in valid.into_iter().zip(random) {
        shared.push(a);
        shared.push(b);
    }
    let one = p.q().elem(1);
    let v1 = attacks::decide_alg1(&shared, &p, 3.0).map_err(e2s)?;
    let v2 = attacks::decide_alg2(&shared, &p, one, 3.0).map_err(e2s)?;
    ensure(v1 == v2, || "alpha = 1 verdicts differ from algorithm 1".into())?;

    // x¹⁶ + 3x + 259 vanishes at -1, a root of order 2 mod 257
    let mut f = vec![0i64; 17];
    f[0] = 259;
    f[1] = 3;
    f[16] = 1;
    let p = PlweParams::new(IntPolynomial::new(f), 257, 1.5, false).map_err(e2s)?;
    let alpha = p.q().elem(256);
    let (_, valid, random) = batches(&p, "alg2-order2", 50)?;
    let v = attacks::decide_alg2(&valid, &p, alpha, 3.0).map_err(e2s)?;
    let u = attacks::decide_alg2(&random, &p, alpha, 3.0).map_err(e2s)?;
    let hits = correct(&v, Label::Valid) + correct(&u, Label::Random);
    ensure(hits >= 85, || format!("order-2 accuracy {hits}/100"))?;
    Ok(format!("alpha=1 matches on 100 samples; order-2 accuracy {hits}/100"))
}

fn cyclotomic_immunity() -> Check {
    let mut scanned = 0;
    for m in [16u64, 32] {
        let f = cyclotomic_poly(m);
        let f1 = f.eval_i128(1) as u64;
        let mut q = f1 + 1;
        for _ in 0..20 {
            q = next_prime_congruent(q + 1, 1, m).ok_or("ran out of primes")?;
            let report = attacks::weakness_scan(&f, Modulus::new(q).map_err(e2s)?, 8).map_err(e2s)?;
            ensure(!report.root_one, || format!("root_one reported for Φ_{m} at q={q}"))?;
            scanned += 1;
        }
    }
    Ok(format!("root_one=false on {scanned}/40 (Φ16 and Φ32, 20 primes each)"))
}

fn glyph_recommended_parameters() -> Check {
    let p = GlyphParams::recommended();
    ensure((p.n, p.q.value(), p.b, p.k) == (1024, 59393, 16383, 16), || "preset mismatch".into())?;
    let mut r = rng("glyph");
    let (sk, pk) = glyph::keygen(&p, &mut r).map_err(e2s)?;
    let mut iterations = 0;
    let (mut accepts, mut tamper_rejects, mut norm_rejects) = (0, 0, 0);
    for i in 0..100 {
        let mut msg = vec![0u8; 32];
        msg.iter_mut().for_each(|b| *b = r.next_u64() as u8);
        let (sig, iters) = glyph::sign(&sk, &pk, &msg, &p, &mut r).map_err(e2s)?;
        iterations += iters;
        ensure(sig.z1.inf_norm() <= 16367 && sig.z2.inf_norm() <= 16367, || format!("signature {i} exceeds b-k"))?;
        if glyph::verify(&pk, &msg, &sig, &p).map_err(e2s)? == VerifyOutcome::Accept {
            accepts += 1;
        }
        let mut tampered = msg.clone();
        tampered[i % 32] ^= 1 << (i % 8);
        if glyph::verify(&pk, &tampered, &sig, &p).map_err(e2s)? == VerifyOutcome::Reject(RejectReason::ChallengeMismatch) {
            tamper_rejects += 1;
        }
        let mut inflated = sig.clone();
        let mut coeffs = inflated.z1.centered();
        coeffs[i % p.n] = p.beta as i64 + 1;
        inflated.z1 = RingElement::from_i64(&p.ring, &coeffs);
        if glyph::verify(&pk, &msg, &inflated, &p).map_err(e2s)? == VerifyOutcome::Reject(RejectReason::NormBound) {
            norm_rejects += 1;
        }
    }
    let mean = iterations as f64 / 100.0;
    ensure(accepts == 100 && tamper_rejects == 100 && norm_rejects == 100, || {
        format!("accept {accepts}, tamper reject {tamper_rejects}, norm reject {norm_rejects}")
    })?;
    ensure(mean <= 20.0, || format!("mean iterations {mean}"))?;
    Ok(format!("100/100 accept, 100/100 tamper and norm rejects, mean iterations {mean:.2}"))
}

fn bgv_leveled() -> Check {
    let p = BgvParams::setup(32, 2, 1, 3, 1.0).map_err(e2s)?;
    for w in p.chain.windows(2) {
        let (lo, hi) = (w[0] as u128, w[1] as u128);
        ensure(lo * lo <= hi && 2 * lo <= hi, || format!("chain step {lo} -> {hi}"))?;
    }
    ensure(p.chain.iter().all(|&q| is_prime(q) && q % 2 == 1), || "chain moduli".into())?;
    let mut r = rng("bgv");
    let sk = bgv::keygen(&p, &mut r).map_err(e2s)?;
    let circuit: Circuit = "MUL ab a b\nADD d ab c".parse().map_err(e2s)?;
    let (mut trips, mut circuits, mut capped) = (0, 0, 0);
    for _ in 0..100 {
        let a = p.random_plaintext(&mut r);
        let ca = bgv::encrypt(&a, &sk, &p, &mut r).map_err(e2s)?;
        if bgv::decrypt(&ca, &sk, &p).map_err(e2s)? == a {
            trips += 1;
        }
        let mut plain = BTreeMap::new();
        let mut enc = BTreeMap::new();
        for w in ["a", "b", "c"] {
            let pt = p.random_plaintext(&mut r);
            enc.insert(w.to_string(), bgv::encrypt(&pt, &sk, &p, &mut r).map_err(e2s)?);
            plain.insert(w.to_string(), pt);
        }
        let got = bgv::eval_circuit(&circuit, &enc, &p).map_err(e2s)?;
        let want = bgv::eval_circuit_plain(&circuit, &plain, &p).map_err(e2s)?;
        if bgv::decrypt(&got["d"], &sk, &p).map_err(e2s)? == want["d"] {
            circuits += 1;
        }
        let mut top = ca.clone();
        for _ in 0..p.max_level() {
            top = bgv::mod_switch(&top, &p).map_err(e2s)?;
        }
        if matches!(bgv::he_mul(&top, &top, &p), Err(Error::LevelExceeded { .. })) {
            capped += 1;
        }
    }
    ensure(trips == 100 && circuits == 100 && capped == 100, || {
        format!("round trips {trips}, circuits {circuits}, level cap {capped}")
    })?;
    Ok(format!("chain {:?}; 100/100 round trips, (a·b)+c and level cap", p.chain))
}

fn gaussian_sampler() -> Check {
    let sigma = 3.2f64;
    let g = DiscreteGaussian::new(GaussianParams::new(sigma).map_err(e2s)?).map_err(e2s)?;
    let mut r = rng("gaussian");
    let draws = 1_000_000;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut sum = 0i64;
    for _ in 0..draws {
        let x = g.sample(&mut r);
        sum += x;
        *counts.entry(x).or_default() += 1;
    }
    // oracle: ρ(k) = exp(-k²/2σ²) summed over the 12σ window and normalized
    let tail = (12.0 * sigma).ceil() as i64;
    let rho = |k: i64| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp();
    let z: f64 = (-tail..=tail).map(rho).sum();
    let mut tv = 0.0;
    for k in -tail..=tail {
        let emp = *counts.get(&k).unwrap_or(&0) as f64 / draws as f64;
        tv += (emp - rho(k) / z).abs();
    }
    let outside: u64 = counts.iter().filter(|(k, _)| k.abs() > tail).map(|(_, c)| c).sum();
    tv += outside as f64 / draws as f64;
    tv /= 2.0;
    let mean = sum as f64 / draws as f64;
    ensure(tv <= 0.01 && mean.abs() < 0.02, || format!("TV {tv:.5}, mean {mean:.5}"))?;
    Ok(format!("TV {tv:.5}, mean {mean:+.5}"))
}

fn number_theory() -> Check {
    for m in 1..=64u64 {
        let prod = (1..=m)
            .filter(|d| m % d == 0)
            .fold(IntPolynomial::one(), |acc, d| acc.mul(&cyclotomic_poly(d)));
        let want = IntPolynomial::monomial(1, m as usize).sub(&IntPolynomial::one());
        ensure(prod == want, || format!("product of Φ_d over d | {m} is not x^{m} - 1"))?;
    }
    let mut cases: Vec<(IntPolynomial, String)> = vec![(IntPolynomial::new(vec![1, 0, 1]), "-4".into())];
    for d in [2i64, 3, 5, -2, -3, 7] {
        cases.push((IntPolynomial::new(vec![-d, 0, 1]), (4 * d).to_string()));
    }
    for p in [3u64, 5, 7] {
        let sign = if (p - 1) * (p - 2) / 2 % 2 == 0 { "" } else { "-" };
        cases.push((cyclotomic_poly(p), format!("{sign}{}", p.pow(p as u32 - 2))));
    }
    let mut worst: f64 = 0.0;
    for (f, want) in &cases {
        let exact = discriminant(f).map_err(e2s)?;
        let got = exact.to_string();
        let abs_match = got.trim_start_matches('-') == want.trim_start_matches('-');
        ensure(abs_match && (f.degree() != Some(2) || &got == want), || format!("disc({f}) = {got}, want {want}"))?;
        let e = complex_roots(f, 1e-12).map_err(e2s)?;
        let rel = discriminant_agreement(&exact, discriminant_numeric(&e));
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("disc({f}): numeric path off by {rel:e}"))?;
    }
    let q = Modulus::new(17).map_err(e2s)?;
    let mut roots: Vec<u64> = roots_mod_q(&IntPolynomial::negacyclic(4), q).iter().map(|r| r.value()).collect();
    roots.sort();
    ensure(roots == [2, 8, 9, 15], || format!("roots of x^4+1 mod 17: {roots:?}"))?;
    Ok(format!("m <= 64 products exact; {} discriminants, worst relative gap {worst:.1e}; roots {{2,8,9,15}}", cases.len()))
}

fn size_comparison() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_latticelab"))
        .args(["bench", "--n", "64", "--seed", &"00".repeat(32)])
        .output()
        .map_err(e2s)?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let text = String::from_utf8_lossy(&out.stdout);
    let ratio: f64 = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .find(|c| c.len() == 4 && c[0] == "ratio" && c[2] == "pk_residues")
        .ok_or("bench printed no ratio row")?[3]
        .parse()
        .map_err(e2s)?;
    ensure(ratio >= 100.0, || format!("ratio {ratio}"))?;
    Ok(format!("LWE/PLWE public key ratio {ratio:.2} at n=64"))
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "LWE round-trip", limit: secs(30), run: lwe_round_trip },
        Criterion { id: 2, name: "PLWE round-trip", limit: secs(10), run: plwe_round_trip },
        Criterion { id: 3, name: "Algorithm 1 attack", limit: secs(60), run: alg1_attack },
        Criterion { id: 4, name: "Algorithm 2 degeneration", limit: None, run: alg2_degeneration },
        Criterion { id: 5, name: "Cyclotomic immunity", limit: None, run: cyclotomic_immunity },
        Criterion { id: 6, name: "GLYPH at recommended parameters", limit: secs(120), run: glyph_recommended_parameters },
        Criterion { id: 7, name: "BGV leveled", limit: secs(30), run: bgv_leveled },
        Criterion { id: 8, name: "Gaussian sampler", limit: None, run: gaussian_sampler },
        Criterion { id: 9, name: "Number theory", limit: None, run: number_theory },
        Criterion { id: 10, name: "Size comparison", limit: None, run: size_comparison },
    ];
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let mut result = (c.run)();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, c.limit) {
            if took > limit {
                result = Err(format!("took {took:.2?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("PASS  {:>2}. {}: {detail} [{took:.2?}]", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {}: {why} [{took:.2?}]", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
