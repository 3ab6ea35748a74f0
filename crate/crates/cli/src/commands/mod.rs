//! One module per subcommand.

pub mod distortion;
pub mod shapes;
pub mod table;
pub mod train;
pub mod verify;

use orbitmap::{rng, Report, CSV_HEADER};

/// Standard Gaussian points on the named stream.
pub fn gaussian_set(seed: u64, purpose: &str, count: usize, dim: usize) -> Vec<Vec<f64>> {
    rng::gaussian_points(seed, purpose, count, dim)
}

pub const TRAIN_STREAM: &str = "train-set";
pub const TEST_STREAM: &str = "test-set";

/// Header plus one row per `(group, model, n, report)`.
pub fn distortion_csv(rows: &[(String, String, usize, Report)], seed: u64) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for (g, m, n, r) in rows {
        s.push_str(&r.csv_row(g, m, *n, seed));
        s.push('\n');
    }
    s
}
