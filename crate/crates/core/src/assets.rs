//! Bundled curve files (also shipped under `curves/` at the repository
//! root), embedded so tests and the CLI are independent of the working
//! directory.

pub const EXAMPLE1_PRINTED: &str = include_str!("../../../curves/example1-printed.curve");
pub const EXAMPLE1_CORRECTED: &str = include_str!("../../../curves/example1-corrected.curve");
pub const EXAMPLE2: &str = include_str!("../../../curves/example2.curve");
pub const GEODESIC_S4: &str = include_str!("../../../curves/geodesic-s4.curve");

/// The integral curve of (1/sqrt(s)) sum_a xi_a for an arbitrary shape:
/// x = y = 0, z_a = (2/sqrt(s)) t.
pub fn geodesic_curve_text(m: usize, s: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "m = {m}\ns = {s}\nlabel = geodesic\nt_min = 0\nt_max = 1\n"
    ));
    let coeff = 2.0 / (s as f64).sqrt();
    for i in 1..=2 * m {
        out.push_str(&format!("c{i} = 0\n"));
    }
    for a in 0..s {
        out.push_str(&format!("c{} = {coeff}*t\n", 2 * m + a + 1));
    }
    out
}
