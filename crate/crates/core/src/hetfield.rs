//! Uncorrelated Gaussian realizations of the heterogeneous soil parameters.
//!
//! Each cell draws `theta_s`, intrinsic permeability `k` and van Genuchten
//! `n` independently from a normal distribution and clamps the draw to the
//! configured interval. Every parameter uses its own ChaCha20 stream, so a field
//! is a pure function of `(nx, ny, specs, seed)`.

use crate::grid::Grid;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Generator recorded in run metadata so fields can be regenerated.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng::seed_from_u64 (rand_chacha 0.9), stream 0=theta_s 1=k 2=n, Normal via rand_distr 0.5";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid field spec for {param}: {reason}")]
    InvalidSpec { param: &'static str, reason: String },
    #[error("grid must have at least one cell in each direction, got {nx}x{ny}")]
    EmptyGrid { nx: usize, ny: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub mean: f64,
    pub std_dev: f64,
    pub lower_clamp: f64,
    pub upper_clamp: f64,
}

impl FieldSpec {
    pub const fn new(mean: f64, std_dev: f64, lower_clamp: f64, upper_clamp: f64) -> Self {
        Self { mean, std_dev, lower_clamp, upper_clamp }
    }

    fn validate(&self, param: &'static str) -> Result<(), FieldError> {
        let fail = |reason: String| Err(FieldError::InvalidSpec { param, reason });
        let all_finite = [self.mean, self.std_dev, self.lower_clamp, self.upper_clamp]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return fail("all values must be finite".into());
        }
        if self.std_dev < 0.0 {
            return fail(format!("std_dev must be >= 0, got {}", self.std_dev));
        }
        if !(self.lower_clamp < self.upper_clamp) {
            return fail(format!("lower_clamp {} must be below upper_clamp {}", self.lower_clamp, self.upper_clamp));
        }
        if !(self.lower_clamp..=self.upper_clamp).contains(&self.mean) {
            return fail(format!("mean {} outside clamp range", self.mean));
        }
        Ok(())
    }
}

/// Distributions for the three random parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecs {
    pub theta_s: FieldSpec,
    /// Intrinsic permeability, cm².
    pub k_intrinsic: FieldSpec,
    pub n_vg: FieldSpec,
}

impl Default for FieldSpecs {
    fn default() -> Self {
        Self {
            theta_s: FieldSpec::new(0.35, 0.03, 0.25, 0.45),
            k_intrinsic: FieldSpec::new(1.0e-9, 0.3e-9, 0.1e-9, 3.0e-9),
            n_vg: FieldSpec::new(4.0, 0.5, 1.5, 8.0),
        }
    }
}

impl FieldSpecs {
    /// Same means and clamps with zero spread.
    pub fn homogeneous(&self) -> Self {
        let flat = |s: FieldSpec| FieldSpec { std_dev: 0.0, ..s };
        Self { theta_s: flat(self.theta_s), k_intrinsic: flat(self.k_intrinsic), n_vg: flat(self.n_vg) }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        self.theta_s.validate("theta_s")?;
        self.k_intrinsic.validate("k_intrinsic")?;
        self.n_vg.validate("n_vg")?;
        if !(self.theta_s.lower_clamp > 0.0 && self.theta_s.upper_clamp <= 1.0) {
            return Err(FieldError::InvalidSpec {
                param: "theta_s",
                reason: "clamps must lie within (0, 1]".into(),
            });
        }
        if !(self.k_intrinsic.lower_clamp > 0.0) {
            return Err(FieldError::InvalidSpec {
                param: "k_intrinsic",
                reason: "lower_clamp must be positive so k > 0 everywhere".into(),
            });
        }
        if !(self.n_vg.lower_clamp > 1.0) {
            return Err(FieldError::InvalidSpec {
                param: "n_vg",
                reason: "lower_clamp must exceed 1 so n > 1 everywhere".into(),
            });
        }
        Ok(())
    }
}

/// One realization of the heterogeneous parameters on an `nx x ny` cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterField {
    pub nx: usize,
    pub ny: usize,
    pub theta_s: Grid,
    pub k_intrinsic: Grid,
    pub n_vg: Grid,
    pub seed: u64,
    pub specs: FieldSpecs,
}

/// The three exported parameters, in generation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldParam {
    ThetaS,
    KIntrinsic,
    NVg,
}

impl FieldParam {
    pub const ALL: [FieldParam; 3] = [FieldParam::ThetaS, FieldParam::KIntrinsic, FieldParam::NVg];

    pub fn name(self) -> &'static str {
        match self {
            FieldParam::ThetaS => "theta_s",
            FieldParam::KIntrinsic => "k_intrinsic",
            FieldParam::NVg => "n_vg",
        }
    }
}

fn draw(nx: usize, ny: usize, spec: &FieldSpec, seed: u64, stream: u64) -> Grid {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // std_dev was validated finite and non-negative
    let normal = Normal::new(spec.mean, spec.std_dev).expect("validated normal parameters");
    let data = (0..nx * ny)
        .map(|_| normal.sample(&mut rng).clamp(spec.lower_clamp, spec.upper_clamp))
        .collect();
    Grid { nx, ny, data }
}

pub fn sample_field(nx: usize, ny: usize, specs: &FieldSpecs, seed: u64) -> Result<ParameterField, FieldError> {
    if nx == 0 || ny == 0 {
        return Err(FieldError::EmptyGrid { nx, ny });
    }
    specs.validate()?;
    Ok(ParameterField {
        nx,
        ny,
        theta_s: draw(nx, ny, &specs.theta_s, seed, 0),
        k_intrinsic: draw(nx, ny, &specs.k_intrinsic, seed, 1),
        n_vg: draw(nx, ny, &specs.n_vg, seed, 2),
        seed,
        specs: *specs,
    })
}

impl ParameterField {
    /// Homogeneous field at the given values; used for tests and reference runs.
    pub fn uniform(nx: usize, ny: usize, theta_s: f64, k_intrinsic: f64, n_vg: f64) -> Self {
        let spec = |v: f64| FieldSpec::new(v, 0.0, v - v.abs() * 0.5 - 1e-12, v + v.abs() * 0.5 + 1e-12);
        Self {
            nx,
            ny,
            theta_s: Grid::filled(nx, ny, theta_s),
            k_intrinsic: Grid::filled(nx, ny, k_intrinsic),
            n_vg: Grid::filled(nx, ny, n_vg),
            seed: 0,
            specs: FieldSpecs { theta_s: spec(theta_s), k_intrinsic: spec(k_intrinsic), n_vg: spec(n_vg) },
        }
    }

    pub fn param(&self, which: FieldParam) -> &Grid {
        match which {
            FieldParam::ThetaS => &self.theta_s,
            FieldParam::KIntrinsic => &self.k_intrinsic,
            FieldParam::NVg => &self.n_vg,
        }
    }

    /// CSV export of one parameter grid: a `# nx=.. ny=.. seed=..` line then
    /// the row-major values.
    pub fn to_csv(&self, which: FieldParam) -> String {
        format!(
            "# nx={} ny={} seed={} param={}\n{}",
            self.nx,
            self.ny,
            self.seed,
            which.name(),
            self.param(which).to_csv_rows()
        )
    }
}
