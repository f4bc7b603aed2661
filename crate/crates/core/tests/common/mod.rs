#![allow(dead_code)]

use std::f64::consts::E;

use pnormdep::exppoly::{ExpPoly, Term};
use pnormdep::vectors::RealVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rv(x: &[f64]) -> RealVector {
    RealVector::new(x.to_vec()).unwrap()
}

pub fn family(vs: &[&[f64]]) -> Vec<RealVector> {
    vs.iter().map(|v| rv(v)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Curated families with their expected number of equivalence classes.
pub fn curated_families() -> Vec<(&'static str, Vec<RealVector>, usize)> {
    vec![
        ("singleton-1", family(&[&[1.0]]), 1),
        ("singleton-34", family(&[&[3.0, 4.0]]), 1),
        ("singleton-1234", family(&[&[1.0, -2.0, 3.0, -4.0]]), 1),
        ("rescale-pair", family(&[&[1.0, 2.0], &[-2.0, -4.0]]), 1),
        ("rescale-four", family(&[&[2.0, 1.0], &[4.0, 2.0], &[6.0, 3.0], &[1.0, 0.5]]), 1),
        ("permute-sign-pad", family(&[&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0], &[-2.0, 0.0, 1.0, -3.0]]), 1),
        ("axis-vectors", family(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, -3.0]]), 1),
        ("flat-padded", family(&[&[1.0, -1.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, -1.0, 1.0]]), 1),
        ("e-one", family(&[&[E, 1.0], &[1.0, E], &[2.0 * E, 2.0]]), 1),
        ("inequivalent-four", family(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &[3.0, 4.0]]), 4),
        ("basis-plus-diagonal", family(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]), 2),
        ("two-pairs", family(&[&[1.0, 2.0], &[2.0, 1.0], &[1.0, 1.0], &[3.0, 3.0]]), 2),
        ("counts-differ", family(&[&[1.0, 1.0], &[1.0, 1.0, 1.0]]), 2),
        ("ratios-123", family(&[&[1.0, 2.0], &[1.0, 3.0], &[1.0, 4.0]]), 3),
        ("three-dim", family(&[&[1.0, 1.0, 1.0], &[1.0, 2.0, 2.0], &[2.0, 2.0, 1.0]]), 2),
        ("tail-differs", family(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]]), 2),
        ("scalar-and-flat", family(&[&[1.0], &[2.0], &[1.0, 1.0]]), 2),
        ("geometric", family(&[&[0.5, 0.25, 0.125], &[1.0, 1.0, 1.0]]), 2),
        ("three-one", family(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 6.0], &[1.0, 2.0]]), 2),
        ("palindrome", family(&[&[1.0, 2.0, 4.0], &[4.0, 2.0, 1.0], &[1.0, 1.0]]), 2),
        ("flat-counts", family(&[&[1.0, 1.0], &[2.0, 2.0], &[1.0, 1.0, 1.0], &[3.0, 3.0, 3.0]]), 2),
        ("wide-scales", family(&[&[0.1, 0.2], &[10.0, 20.0], &[1.0, 1.0]]), 2),
        ("mixed-five", family(&[&[1.0, 0.0], &[1.0, 2.0], &[2.0, 4.0], &[1.0, 1.0, 1.0], &[5.0]]), 3),
        ("ladder", family(&[&[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]), 3),
        ("long-vectors", family(&[&[1.0, 2.0, 3.0, 4.0, 5.0], &[5.0, 4.0, 3.0, 2.0, 1.0], &[1.0, 1.0, 2.0]]), 2),
    ]
}

/// Pairs with equal non-zero counts, labelled with whether they are equivalent.
pub fn curated_pairs() -> Vec<(RealVector, RealVector, bool)> {
    vec![
        (rv(&[E, 1.0]), rv(&[2.0, 2.0 * E]), true),
        (rv(&[1.0, 2.0]), rv(&[-6.0, 3.0]), true),
        (rv(&[1.0, 2.0, 3.0]), rv(&[0.0, 1.5, -0.5, 1.0]), true),
        (rv(&[0.3, 0.7, 1.1]), rv(&[2.2, 0.6, 1.4]), true),
        (rv(&[1.0, 4.0]), rv(&[1.0, 4.0]), true),
        (rv(&[1.0, 2.0]), rv(&[1.0, 3.0]), false),
        (rv(&[E, 1.0]), rv(&[1.0, 2.0]), false),
        (rv(&[1.0, 2.0, 3.0]), rv(&[1.0, 2.0, 4.0]), false),
        (rv(&[1.0, 1.0, 2.0]), rv(&[1.0, 2.0, 2.0]), false),
        (rv(&[1.0, 5.0]), rv(&[1.0, 0.5]), false),
    ]
}

/// Random exponential sum: `terms` distinct exponents in `[lo, hi]`,
/// multiplicities in `1..=max_mult`.
pub fn random_exppoly(rng: &mut impl Rng, terms: usize, lo: f64, hi: f64, max_mult: u32) -> ExpPoly {
    loop {
        let mut ts: Vec<Term> = (0..terms)
            .map(|_| Term {
                exponent: rng.gen_range(lo..=hi),
                multiplicity: rng.gen_range(1..=max_mult),
            })
            .collect();
        ts.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        if ts.windows(2).all(|w| w[1].exponent - w[0].exponent > 1e-3) {
            return ExpPoly::new(ts).unwrap();
        }
    }
}
