pub mod approx;
pub mod cluster;
pub mod figures;
pub mod lightning;
pub mod manifest;
pub mod potential;
pub mod quad;

use crate::output::Output;

/// Settings shared by every command.
pub struct Ctx {
    pub out: Output,
    pub nmax: Option<usize>,
    pub min_n: usize,
    pub seed: u64,
}

impl Ctx {
    pub fn nmax_or(&self, default: usize) -> usize {
        self.nmax.unwrap_or(default)
    }

    /// Same settings, writing below `name`.
    pub fn nested(&self, name: &str) -> Ctx {
        Ctx { out: self.out.nested(name), nmax: self.nmax, min_n: self.min_n, seed: self.seed }
    }
}

pub fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}
