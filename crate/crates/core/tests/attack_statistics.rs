//! Batch-level behaviour of the evaluation attacks, measured over many
//! independent batches rather than one seed.

use latticelab::attacks::{self, Label, SmallnessRegion};
use latticelab::plwe::{self, PlweParams};
use latticelab::polyring::IntPolynomial;
use latticelab::SeededRng;

fn instance(constant: i64, linear: i64) -> PlweParams {
    let mut f = vec![0i64; 17];
    f[0] = constant;
    f[1] = linear;
    f[16] = 1;
    PlweParams::new(IntPolynomial::new(f), 257, 1.5, false).unwrap()
}

/// With |Λ|/q ≈ 0.14, the candidate set of a uniform batch after k samples has
/// expected size 257·0.144^k, so only the first two or three verdicts of a
/// batch are wrong. Across 1000 batches of 50 at least 99% reach 45 correct.
#[test]
fn uniform_batches_are_mostly_rejected() {
    let p = instance(255, 1);
    let mut rng = SeededRng::from_u64(2024);
    let batches = 1000;
    let mut good = 0;
    let mut mislabeled = 0;
    for _ in 0..batches {
        let samples: Vec<_> = (0..50).map(|_| plwe::uniform_sample_pair(&p, &mut rng)).collect();
        let v = attacks::decide_alg1(&samples, &p, 3.0).unwrap();
        let wrong = v.iter().filter(|x| x.label == Label::Valid).count();
        mislabeled += wrong;
        if wrong <= 5 {
            good += 1;
        }
    }
    let mean = mislabeled as f64 / batches as f64;
    assert!(good >= 990, "{good}/{batches} batches at >= 90%");
    assert!((2.0..3.5).contains(&mean), "mean mislabels per batch {mean}");
}

/// The planted secret is never dropped by a sample whose error evaluation
/// lands inside the region, checked over 10⁴ oracle samples for both roots.
#[test]
fn planted_secret_is_never_falsely_eliminated() {
    for (p, alpha) in [(instance(255, 1), 1u64), (instance(259, 3), 256)] {
        let alpha = p.q().elem(alpha);
        let region = SmallnessRegion::new(&p, alpha, 3.0, 8).unwrap();
        let mut rng = SeededRng::from_u64(7);
        let s = p.sample_error(&mut rng);
        let planted = s.evaluate(alpha).value();
        let mut inside = 0;
        for _ in 0..10_000 {
            let (sample, e) = plwe::oracle_sample_witnessed(&p, &s, &mut rng).unwrap();
            if region.contains(e.evaluate(alpha).value()) {
                inside += 1;
                let survivors = attacks::sample_survivors(&sample, alpha, |x| region.contains(x));
                assert!(survivors.contains(&planted));
            }
        }
        // t = 3 keeps almost all of the error mass inside
        assert!(inside > 9_900, "{inside}");
    }
}
