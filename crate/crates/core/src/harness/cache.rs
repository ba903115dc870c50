use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimators::{LyapunovEstimate, VarianceEstimate};

pub const ESTIMATES_FILE: &str = "estimates.txt";

/// Cached `γ̂` and `ϱ̂²` with their standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimates {
    pub gamma: f64,
    pub gamma_se: f64,
    pub rho_sq: f64,
    pub rho_sq_se: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Estimates {
    pub fn from_estimators(g: &LyapunovEstimate, v: &VarianceEstimate) -> Self {
        Estimates {
            gamma: g.gamma_hat,
            gamma_se: g.std_error,
            rho_sq: v.rho_sq,
            rho_sq_se: v.std_error,
            n: g.n,
            samples: g.samples,
            seed: g.seed,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho_sq.max(0.0).sqrt()
    }

    pub fn path(dir: &Path) -> PathBuf {
        dir.join(ESTIMATES_FILE)
    }

    /// Writes `name = value ± error` lines.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(Self::path(dir))?;
        writeln!(f, "gamma = {} ± {}", self.gamma, self.gamma_se)?;
        writeln!(f, "rho_sq = {} ± {}", self.rho_sq, self.rho_sq_se)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "seed = {}", self.seed)?;
        Ok(())
    }

    /// Reads the cache written by [`save`](Self::save); a missing file is reported as
    /// [`Error::MissingEstimates`].
    pub fn load(dir: &Path) -> Result<Self> {
        let path = Self::path(dir);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingEstimates(path)),
            Err(e) => return Err(e.into()),
        };
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Estimates { gamma: f64::NAN, gamma_se: 0.0, rho_sq: f64::NAN, rho_sq_se: 0.0, n: 0, samples: 0, seed: 0 };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Config { line, message: format!("estimates cache: {m}") };
            let (key, value) = content.split_once('=').ok_or_else(|| bad("expected `name = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let (v, e) = match value.split_once('±') {
                Some((v, e)) => (v.trim(), Some(e.trim())),
                None => (value, None),
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
            match key {
                "gamma" => {
                    out.gamma = num(v)?;
                    out.gamma_se = e.map(num).transpose()?.unwrap_or(0.0);
                }
                "rho_sq" => {
                    out.rho_sq = num(v)?;
                    out.rho_sq_se = e.map(num).transpose()?.unwrap_or(0.0);
                }
                "n" => out.n = num(v)? as usize,
                "samples" => out.samples = num(v)? as usize,
                "seed" => out.seed = v.parse().map_err(|_| bad(&format!("`{v}` is not a seed")))?,
                _ => return Err(bad(&format!("unknown entry `{key}`"))),
            }
        }
        if out.gamma.is_nan() || out.rho_sq.is_nan() {
            return Err(Error::Config { line: 0, message: "estimates cache lacks `gamma` or `rho_sq`".into() });
        }
        Ok(out)
    }
}
