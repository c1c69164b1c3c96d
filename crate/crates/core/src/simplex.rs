//! Points on the unit simplex `{x >= 0, sum x = 1}`: lattice grids and
//! seeded random draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Upper bound on generated grid sizes for dimensions without a fixed
/// resolution.
const MAX_GRID_POINTS: u128 = 5_000;

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of lattice points with spacing `1/resolution` in dimension `dim`.
pub fn grid_size(dim: usize, resolution: usize) -> u128 {
    binomial((resolution + dim - 1) as u128, (dim - 1) as u128)
}

/// Largest resolution whose grid stays under the size cap.
pub fn capped_resolution(dim: usize, preferred: usize) -> usize {
    let mut r = preferred.max(1);
    while r > 1 && grid_size(dim, r) > MAX_GRID_POINTS {
        r -= 1;
    }
    r
}

/// All points with coordinates in `{0, 1/r, .., 1}` summing to one, in
/// descending lexicographic order (so `e_1` comes first).
pub fn simplex_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let r = resolution.max(1);
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    fill(&mut counts, 0, r, &mut out, r);
    out
}

fn fill(counts: &mut [usize], slot: usize, remaining: usize, out: &mut Vec<Vec<f64>>, r: usize) {
    if slot + 1 == counts.len() {
        counts[slot] = remaining;
        out.push(counts.iter().map(|&c| c as f64 / r as f64).collect());
        return;
    }
    for c in (0..=remaining).rev() {
        counts[slot] = c;
        fill(counts, slot + 1, remaining - c, out, r);
    }
}

/// Uniform draw on the simplex (normalized exponentials), keyed by
/// `(seed, index)`.
pub fn random_simplex_point(dim: usize, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let e: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Uniform draw on the box `[lo, hi]^dim`, keyed by `(seed, index)`.
pub fn random_box_point(dim: usize, lo: f64, hi: f64, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            lo + (hi - lo) * u
        })
        .collect()
}

pub fn normalize_l1(x: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = x.iter().sum();
    if total > 0.0 && total.is_finite() {
        Some(x.iter().map(|v| v / total).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_and_order() {
        let g = simplex_grid(3, 20);
        assert_eq!(g.len(), 231);
        assert_eq!(g.len() as u128, grid_size(3, 20));
        assert_eq!(g[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(*g.last().unwrap(), vec![0.0, 0.0, 1.0]);
        assert!(g.contains(&vec![0.5, 0.5, 0.0]));
        assert_eq!(grid_size(5, 8), 495);
        assert_eq!(grid_size(4, 10), 286);
        for p in &g {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_points_lie_on_the_simplex() {
        for k in 0..50 {
            let p = random_simplex_point(4, 9, k);
            assert!(p.iter().all(|&c| c >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(random_simplex_point(3, 1, 2), random_simplex_point(3, 1, 2));
    }

    #[test]
    fn resolution_cap() {
        assert_eq!(capped_resolution(3, 20), 20);
        assert!(grid_size(12, capped_resolution(12, 8)) <= 5_000);
    }
}
