#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcp::stochastic::SampleSpace;
use stcp::Tensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense row-major copy built directly from the entry list.
pub fn dense(t: &Tensor) -> Vec<f64> {
    let (n, d) = (t.order(), t.dim());
    let mut out = vec![0.0; d.pow(n as u32)];
    for (idx, v) in t.entries() {
        let flat = idx.iter().fold(0, |acc, &i| acc * d + i);
        out[flat] += v;
    }
    out
}

/// `(A x^{N-1})_i` by looping over every multi-index.
pub fn oracle_vector(t: &Tensor, x: &[f64]) -> Vec<f64> {
    let (n, d) = (t.order(), t.dim());
    let a = dense(t);
    let mut y = vec![0.0; d];
    let mut idx = vec![0usize; n];
    for v in &a {
        let prod: f64 = idx[1..].iter().map(|&j| x[j]).product();
        y[idx[0]] += v * prod;
        for slot in (0..n).rev() {
            idx[slot] += 1;
            if idx[slot] < d {
                break;
            }
            idx[slot] = 0;
        }
    }
    y
}

pub fn oracle_scalar(t: &Tensor, x: &[f64]) -> f64 {
    oracle_vector(t, x).iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn random_tensor(r: &mut ChaCha8Rng, order: usize, dim: usize, density: f64) -> Tensor {
    let mut entries = Vec::new();
    let total = dim.pow(order as u32);
    for flat in 0..total {
        if r.random::<f64>() < density {
            let mut idx = vec![0; order];
            let mut f = flat;
            for slot in (0..order).rev() {
                idx[slot] = f % dim;
                f /= dim;
            }
            entries.push((idx, r.random_range(-1.0..1.0)));
        }
    }
    Tensor::new(order, dim, entries).unwrap()
}

pub fn random_vec(r: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| r.random_range(lo..hi)).collect()
}

/// `sum_k w_k || min(x, A_k x^{N-1} + q_k) ||^2` from the dense oracle.
pub fn direct_min_objective(space: &SampleSpace, x: &[f64]) -> f64 {
    space
        .realizations()
        .iter()
        .map(|r| {
            let y = oracle_vector(&r.tensor, x);
            r.weight
                * y.iter()
                    .zip(&r.q)
                    .zip(x)
                    .map(|((a, q), b)| {
                        let m = (a + q).min(*b);
                        m * m
                    })
                    .sum::<f64>()
        })
        .sum()
}

pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn normalize_l1(x: &[f64]) -> Vec<f64> {
    let s: f64 = x.iter().sum();
    x.iter().map(|c| c / s).collect()
}

/// Order-3 dimension-3 tensor `w * C_lin + |w| * C_abs` of the w-family,
/// built slice by slice.
pub fn example4_1_tensor(w: f64) -> Tensor {
    let (p, m) = (w + w.abs(), w - w.abs());
    let slice0 = [[-2.0 * w, m, 0.0], [m, -2.0 * w, 0.0], [0.0, 0.0, p]];
    let slice1 = [[0.0, 0.0, 0.0], [0.0, p, -2.0 * w], [0.0, -2.0 * w, p]];
    let mut entries = Vec::new();
    for (i, s) in [slice0, slice1].iter().enumerate() {
        for (j, row) in s.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    entries.push((vec![i, j, k], *v));
                }
            }
        }
    }
    Tensor::new(3, 3, entries).unwrap()
}

/// 1-based entry list of the dimension-5 example, converted to 0-based.
pub fn example4_2_tensor() -> Tensor {
    let one_based = [
        ([1, 3, 3], 1.0),
        ([1, 4, 4], -2.0),
        ([1, 5, 5], -3.0),
        ([2, 3, 3], 1.0),
        ([2, 4, 4], -6.0),
        ([2, 5, 5], -3.0),
        ([3, 1, 3], -1.0),
        ([3, 2, 3], -1.0),
        ([4, 1, 4], 2.0),
        ([4, 2, 4], 6.0),
        ([5, 1, 5], 3.0),
        ([5, 2, 5], 3.0),
    ];
    Tensor::new(
        3,
        5,
        one_based
            .iter()
            .map(|(i, v)| (i.iter().map(|k| k - 1).collect(), *v))
            .collect(),
    )
    .unwrap()
}

pub fn zero_q(t: Tensor) -> SampleSpace {
    let d = t.dim();
    SampleSpace::singleton(t, vec![0.0; d]).unwrap()
}

/// `T + 0.2 R` with `T` the identity and `R` random, resampled until the
/// checker accepts it as R0.
pub fn r0_mean(r: &mut ChaCha8Rng, order: usize, dim: usize, opts: &stcp::CheckOptions) -> Tensor {
    loop {
        let candidate = Tensor::identity(order, dim)
            .unwrap()
            .add(&random_tensor(r, order, dim, 0.5).scale(0.2))
            .unwrap();
        if stcp::check_r0(&candidate, opts).verdict == stcp::Verdict::IsR0 {
            return candidate;
        }
    }
}

/// `{ +B, -B }` with `B = I + eps R`: every realization pair cancels, so the
/// mean is zero (not R0) while the space is stochastic R0.
pub fn signed_pair(r: &mut ChaCha8Rng, order: usize, dim: usize, eps: f64) -> SampleSpace {
    let b = Tensor::identity(order, dim)
        .unwrap()
        .add(&random_tensor(r, order, dim, 0.5).scale(eps))
        .unwrap();
    SampleSpace::uniform(vec![(b.clone(), vec![0.0; dim]), (b.scale(-1.0), vec![0.0; dim])]).unwrap()
}

/// `{ +S, -S }` for random `S`: an exactly mean-zero space.
pub fn mean_zero_pair(r: &mut ChaCha8Rng, order: usize, dim: usize) -> SampleSpace {
    let s = random_tensor(r, order, dim, 0.5);
    SampleSpace::uniform(vec![(s.clone(), vec![0.0; dim]), (s.scale(-1.0), vec![0.0; dim])]).unwrap()
}
