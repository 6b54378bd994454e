use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use gpscat::gauss_core::{db_to_r, SqueezerPair};

use crate::error::{CliError, CliResult};

/// Input squeezing, either as an opposed pair at a level in dB or as two
/// explicit parameters.
#[derive(Debug, Clone, Args)]
pub struct SqueezingArgs {
    /// Squeezing level in dB; uses r1 = -r2 = r
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r1", "r2"])]
    pub db: Option<f64>,

    /// Squeezing parameter of the detected mode's input
    #[arg(long, allow_negative_numbers = true, requires = "r2")]
    pub r1: Option<f64>,

    /// Squeezing parameter of the other input
    #[arg(long, allow_negative_numbers = true, requires = "r1")]
    pub r2: Option<f64>,
}

impl SqueezingArgs {
    pub fn pair(&self, default_db: f64) -> CliResult<SqueezerPair> {
        let pair = match (self.db, self.r1, self.r2) {
            (Some(db), _, _) => SqueezerPair::opposed(db_to_r(db)),
            (None, Some(r1), Some(r2)) => SqueezerPair::new(r1, r2),
            _ => SqueezerPair::opposed(db_to_r(default_db)),
        };
        Ok(pair?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; stdout when absent. CSV output also writes scalar
    /// metadata to `<out>.json` (to stderr without --out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Evenly spaced values `lo, lo + step, ...` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-3).floor() as usize;
        (0..=count)
            .map(|i| self.lo + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Grid, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("{t:?} in grid {s:?}: {e}"))
        };
        let grid = Grid {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        if !(grid.lo.is_finite() && grid.hi.is_finite() && grid.step.is_finite()) {
            return Err(format!("grid {s:?} has non-finite bounds"));
        }
        if !(grid.step > 0.0 && grid.hi >= grid.lo) {
            return Err(format!("grid {s:?} is not increasing"));
        }
        if (grid.hi - grid.lo) / grid.step > 1e7 {
            return Err(format!("grid {s:?} has more than 10^7 points"));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

pub fn check_reflectance(r: f64) -> CliResult<f64> {
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(CliError::Usage(format!("--reflectance {r} outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse_and_expand() {
        let g: Grid = "-1:1:0.5".parse().unwrap();
        assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g: Grid = "0:22:0.1".parse().unwrap();
        assert_eq!(g.values().len(), 221);
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:0.1".parse::<Grid>().is_err());
    }
}
