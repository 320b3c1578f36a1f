#![allow(dead_code)]

use std::f64::consts::PI;

use psg::grid::{Field, TorusGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform noise in `[-1, 1]` at every node.
pub fn noise(rng: &mut ChaCha8Rng, grid: TorusGrid) -> Field {
    let v = (0..grid.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Field::new(grid, v).unwrap()
}

/// Random trigonometric polynomial of degree at most `modes` per axis, rescaled so
/// that its largest nodal magnitude is exactly `peak`.
pub fn smooth_field(rng: &mut ChaCha8Rng, grid: TorusGrid, modes: usize, peak: f64) -> Field {
    let ky: Vec<usize> = if grid.dim() == 2 { (0..=modes).collect() } else { vec![0] };
    let mut terms = Vec::new();
    for &j in &ky {
        for k in 0..=modes {
            let decay = 1.0 / (1.0 + (k * k + j * j) as f64);
            terms.push((
                k as f64,
                j as f64,
                decay * rng.random_range(-1.0..=1.0),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..2.0 * PI),
            ));
        }
    }
    let f = Field::from_fn(grid, |x, y| {
        terms
            .iter()
            .map(|&(k, j, a, px, py)| a * (k * x + px).cos() * (j * y + py).cos())
            .sum()
    });
    let m = f.max_abs();
    f.map(|v| peak * v / m)
}

/// The randomized suite: `count` smooth 1D data with `‖u⁰‖∞ ≤ π` (every fourth
/// touches π) on 256 nodes, each paired with `κ ∈ [0.2, 1]`.
pub fn random_suite(seed: u64, count: usize) -> Vec<(f64, Field)> {
    let grid = TorusGrid::one_d(256).unwrap();
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let kappa = r.random_range(0.2..=1.0);
            let peak = if i % 4 == 0 { PI } else { r.random_range(0.3..=1.0) * PI };
            let modes = r.random_range(1..=6);
            (kappa, smooth_field(&mut r, grid, modes, peak))
        })
        .collect()
}

pub fn rel_max_err(got: &Field, want: &Field) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(1.0)
}
