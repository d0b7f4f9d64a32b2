//! Central finite-difference stencils on uniform grids.
//!
//! 5-point stencils serve the curvature-derivative estimates; 7-point
//! stencils build coordinate jets from sampled tangents (one derivative
//! order higher, so the extra accuracy matters there).

/// First derivative, 5-point, O(h^4). Valid for 2 <= j <= n-3.
pub fn d1_5pt(f: &[f64], h: f64, j: usize) -> f64 {
    (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h)
}

/// Second derivative, 5-point, O(h^4).
pub fn d2_5pt(f: &[f64], h: f64, j: usize) -> f64 {
    (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]) / (12.0 * h * h)
}

/// First derivative, 7-point, O(h^6). Valid for 3 <= j <= n-4.
pub fn d1_7pt(f: &[f64], h: f64, j: usize) -> f64 {
    (-f[j - 3] + 9.0 * f[j - 2] - 45.0 * f[j - 1] + 45.0 * f[j + 1] - 9.0 * f[j + 2] + f[j + 3])
        / (60.0 * h)
}

/// Second derivative, 7-point, O(h^6).
pub fn d2_7pt(f: &[f64], h: f64, j: usize) -> f64 {
    (2.0 * f[j - 3] - 27.0 * f[j - 2] + 270.0 * f[j - 1] - 490.0 * f[j] + 270.0 * f[j + 1]
        - 27.0 * f[j + 2]
        + 2.0 * f[j + 3])
        / (180.0 * h * h)
}

/// Third derivative, 7-point, O(h^4).
pub fn d3_7pt(f: &[f64], h: f64, j: usize) -> f64 {
    (f[j - 3] - 8.0 * f[j - 2] + 13.0 * f[j - 1] - 13.0 * f[j + 1] + 8.0 * f[j + 2] - f[j + 3])
        / (8.0 * h * h * h)
}

/// Checks grid uniformity and returns the common step.
pub fn uniform_step(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let h = grid[1] - grid[0];
    if h <= 0.0 {
        return None;
    }
    let ok = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    ok.then_some(h)
}
