//! Seeded random corpora shared by the integration suites.
#![allow(dead_code)]

use padic_entropy::{BlockEndomorphism, Component, FiniteRankPGroup, Prime, RationalMatrix, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub const PRIMES: [u64; 3] = [2, 3, 5];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn prime(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Rational with numerator and denominator bounded by `height` in absolute value.
pub fn rational(rng: &mut impl Rng, height: i64) -> Q {
    q(rng.gen_range(-height..=height), rng.gen_range(1..=height))
}

/// p-integral rational: denominator coprime to `p`, numerator up to `height`.
pub fn p_integral(rng: &mut impl Rng, p: u64, height: i64) -> Q {
    let mut d = rng.gen_range(1..=height);
    while d % p as i64 == 0 {
        d = rng.gen_range(1..=height);
    }
    q(rng.gen_range(-height..=height), d)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, height: i64) -> RationalMatrix {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| rational(rng, height)).collect())
        .collect();
    RationalMatrix::from_rows(data).unwrap()
}

pub fn random_integral_matrix(rng: &mut impl Rng, n: usize, p: u64, height: i64) -> RationalMatrix {
    let data = (0..n)
        .map(|_| (0..n).map(|_| p_integral(rng, p, height)).collect())
        .collect();
    RationalMatrix::from_rows(data).unwrap()
}

/// The oracle-equivalence corpus: dimension 1..=3, entries of height ≤ p³.
pub fn equivalence_corpus(seed: u64, count: usize) -> Vec<(Prime, RationalMatrix)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = PRIMES[r.gen_range(0..3)];
            let n = r.gen_range(1..=3);
            let h = (p * p * p) as i64;
            (prime(p), random_matrix(&mut r, n, n, h))
        })
        .collect()
}

pub fn random_group(rng: &mut impl Rng, p: u64, max_free: usize, torsion_factors: usize) -> FiniteRankPGroup {
    let torsion = (0..torsion_factors).map(|_| rng.gen_range(1..=3)).collect();
    FiniteRankPGroup::new(
        prime(p),
        rng.gen_range(0..=max_free),
        rng.gen_range(0..=max_free),
        rng.gen_range(0..=max_free),
        torsion,
    )
    .unwrap()
}

/// A random endomorphism satisfying every block constraint of `g`.
pub fn random_endomorphism(rng: &mut impl Rng, g: &FiniteRankPGroup, height: i64) -> BlockEndomorphism {
    use Component::*;
    let p = g.p.get();
    let mut blocks = Vec::new();
    let mut block = |t: Component, s: Component, f: &mut dyn FnMut(usize, usize) -> Q| {
        let (r, c) = (g.component_dim(t), g.component_dim(s));
        if r == 0 || c == 0 {
            return;
        }
        let rows = (0..r).map(|i| (0..c).map(|j| f(i, j)).collect()).collect();
        blocks.push(((t, s), RationalMatrix::from_rows(rows).unwrap()));
    };
    let mut r1 = rng_from(rng);
    block(Zp, Zp, &mut |_, _| p_integral(&mut r1, p, height));
    block(Qp, Zp, &mut |_, _| rational(&mut r1, height));
    block(Qp, Qp, &mut |_, _| rational(&mut r1, height));
    block(Pruefer, Zp, &mut |_, _| rational(&mut r1, height));
    block(Pruefer, Qp, &mut |_, _| rational(&mut r1, height));
    block(Pruefer, Pruefer, &mut |_, _| p_integral(&mut r1, p, height));
    block(Pruefer, Finite, &mut |_, j| {
        let k = g.torsion[j];
        q(r1.gen_range(0..(p as i64).pow(k)), (p as i64).pow(k))
    });
    block(Finite, Zp, &mut |_, _| q(r1.gen_range(-height..=height), 1));
    block(Finite, Finite, &mut |i, j| {
        let shift = g.torsion[i].saturating_sub(g.torsion[j]);
        q(r1.gen_range(-height..=height) * (p as i64).pow(shift), 1)
    });
    BlockEndomorphism::from_blocks(g.clone(), blocks).unwrap()
}

fn rng_from(rng: &mut impl Rng) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

/// Components at every prime of `primes`, each with a random valid endomorphism.
pub fn random_periodic(rng: &mut impl Rng, primes: &[u64]) -> Vec<BlockEndomorphism> {
    primes
        .iter()
        .map(|&p| {
            let t = rng.gen_range(0..=1);
            let g = random_group(rng, p, 2, t);
            random_endomorphism(rng, &g, 12)
        })
        .collect()
}
