//! TOML job configurations. Unknown fields are rejected so typos surface
//! as schema errors naming the offending key.

use num_complex::Complex64;
use qlt::numerics::SeriesKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// taylor | chebyshev | double-chebyshev
    pub kind: String,
    pub eps: f64,
    /// Explicit coefficients; imaginary parts optional.
    pub x_re: Option<Vec<f64>>,
    pub x_im: Option<Vec<f64>>,
    pub y_re: Option<Vec<f64>>,
    pub y_im: Option<Vec<f64>>,
    /// Alternatively, draw coefficients uniformly from [-1, 1].
    pub random: Option<RandomConfig>,
    /// Override the truncation order; for exercising the verified-fail
    /// path, not part of normal operation.
    pub force_k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomConfig {
    pub qubits: usize,
    #[serde(default)]
    pub complex: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write circuit.qasm next to the report (default true).
    #[serde(default = "default_true")]
    pub qasm: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { qasm: true }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Input state for the success-probability measurement:
    /// "uniform" (default) or "basis0".
    pub state: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub scaling: ScalingRange,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingRange {
    pub n_min: usize,
    pub n_max: usize,
    pub eps: Vec<f64>,
}

pub fn parse_kind(s: &str) -> Result<SeriesKind, CliError> {
    match s {
        "taylor" => Ok(SeriesKind::Taylor),
        "chebyshev" => Ok(SeriesKind::Chebyshev),
        "double-chebyshev" => Ok(SeriesKind::DoubleChebyshev),
        other => Err(CliError::Usage(format!(
            "problem.kind: unknown series kind {other:?} (expected taylor, chebyshev or double-chebyshev)"
        ))),
    }
}

fn zip_complex(
    re: &[f64],
    im: Option<&Vec<f64>>,
    field: &str,
) -> Result<Vec<Complex64>, CliError> {
    match im {
        None => Ok(re.iter().map(|&r| Complex64::new(r, 0.0)).collect()),
        Some(im) if im.len() == re.len() => {
            Ok(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
        }
        Some(im) => Err(CliError::Usage(format!(
            "problem.{field}_im has length {} but problem.{field}_re has length {}",
            im.len(),
            re.len()
        ))),
    }
}

/// Materialize the coefficient vectors, drawing from the seeded generator
/// when the config asks for random data.
pub fn coefficients(
    p: &ProblemConfig,
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<Complex64>), CliError> {
    match (&p.x_re, &p.y_re, &p.random) {
        (Some(xr), Some(yr), None) => {
            let x = zip_complex(xr, p.x_im.as_ref(), "x")?;
            let y = zip_complex(yr, p.y_im.as_ref(), "y")?;
            Ok((x, y))
        }
        (None, None, Some(random)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let len = 1usize << random.qubits;
            let draw = |rng: &mut ChaCha8Rng| -> Complex64 {
                if random.complex {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                }
            };
            let x: Vec<Complex64> = (0..len).map(|_| draw(&mut rng)).collect();
            let y: Vec<Complex64> = (0..len).map(|_| draw(&mut rng)).collect();
            Ok((x, y))
        }
        _ => Err(CliError::Usage(
            "problem: provide either x_re/y_re or [problem.random], not both".to_string(),
        )),
    }
}
