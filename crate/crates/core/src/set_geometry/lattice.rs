//! Deterministic low-discrepancy point sets.

use std::f64::consts::PI;

/// Radical inverse of `index` in `base` (Halton coordinate).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while index > 0 {
        f /= b;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// `count` nearly uniform points on the unit sphere S³ ⊂ R⁴
/// (super-Fibonacci spiral).
pub fn sphere3_spiral(count: usize) -> Vec<[f64; 4]> {
    const PHI: f64 = std::f64::consts::SQRT_2;
    const PSI: f64 = 1.533_751_168_755_204_3;
    let n = count as f64;
    (0..count)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n).sqrt();
            let big_r = (1.0 - s / n).sqrt();
            let alpha = 2.0 * PI * s / PHI;
            let beta = 2.0 * PI * s / PSI;
            [
                r * alpha.sin(),
                r * alpha.cos(),
                big_r * beta.sin(),
                big_r * beta.cos(),
            ]
        })
        .collect()
}

/// Vogel sunflower spiral in the closed disc of radius `radius`.
pub(crate) fn sunflower(count: usize, radius: f64, rotation: f64) -> Vec<[f64; 2]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let r = radius * ((k as f64 + 0.5) / count as f64).sqrt();
            let th = k as f64 * golden + rotation;
            [r * th.cos(), r * th.sin()]
        })
        .collect()
}
