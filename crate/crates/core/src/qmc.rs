//! Low-discrepancy point sets on the unit square.

/// Additive-recurrence (R2) sequence based on the plastic number.
///
/// Point `i` is `frac(0.5 + (i + 1) * (1/g, 1/g^2))`; all coordinates lie
/// strictly inside `(0, 1)`.
pub fn r2_points(n: usize) -> Vec<(f64, f64)> {
    const G: f64 = 1.324_717_957_244_746;
    let a1 = 1.0 / G;
    let a2 = 1.0 / (G * G);
    (0..n)
        .map(|i| {
            let k = (i + 1) as f64;
            ((0.5 + a1 * k).fract(), (0.5 + a2 * k).fract())
        })
        .collect()
}
