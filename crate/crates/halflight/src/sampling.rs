//! Sample-point generation over a chart domain: low-discrepancy Halton
//! sequences for deterministic coverage, seeded uniform random points,
//! and axis-aligned grids. Every generator keeps points strictly
//! interior so finite-difference stencils have room on all sides.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fraction of each side length kept clear at the domain boundary.
const INTERIOR_MARGIN: f64 = 0.05;

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// The `index`-th element of the van der Corput sequence in `base`.
fn van_der_corput(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * f;
        index /= base;
        f /= base as f64;
    }
    result
}

fn into_box(t: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (INTERIOR_MARGIN + (1.0 - 2.0 * INTERIOR_MARGIN) * t)
}

/// `count` Halton points in the interior of `domain`, skipping `skip`
/// leading sequence elements so different callers decorrelate.
pub fn halton_points(domain: &[(f64, f64)], count: usize, skip: u64) -> Vec<Vec<f64>> {
    assert!(
        domain.len() <= HALTON_BASES.len(),
        "chart dimension exceeds the Halton bases on hand"
    );
    (0..count as u64)
        .map(|n| {
            domain
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| into_box(van_der_corput(n + 1 + skip, HALTON_BASES[i]), lo, hi))
                .collect()
        })
        .collect()
}

/// `count` uniform random interior points from a seeded generator;
/// identical seeds give identical points on every platform.
pub fn random_points(domain: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            domain
                .iter()
                .map(|&(lo, hi)| into_box(rng.gen::<f64>(), lo, hi))
                .collect()
        })
        .collect()
}

/// Interior axis-aligned grid with `per_axis` points on each axis.
pub fn grid_points(domain: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    assert!(per_axis >= 1);
    let m = domain.len();
    let total = per_axis.pow(m as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = flat;
        let mut point = Vec::with_capacity(m);
        for &(lo, hi) in domain {
            let step = idx % per_axis;
            idx /= per_axis;
            let t = if per_axis == 1 {
                0.5
            } else {
                step as f64 / (per_axis - 1) as f64
            };
            point.push(into_box(t, lo, hi));
        }
        out.push(point);
    }
    out
}
