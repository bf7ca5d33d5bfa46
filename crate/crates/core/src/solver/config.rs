use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::PartitionChoice;
use crate::spectral::DealiasRule;

/// Initial condition selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// ABC flow with `A = B = C = amplitude` in u, b = 0.
    BeltramiU {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// ABC field with `A = B = C = amplitude` in b, u = 0.
    BeltramiB {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `u = (-2 sin y, 2 sin x, 0)`, `b = (-2 sin 2y + sin z, 2 sin x + sin z, 0)`.
    OrszagTang3d,
    /// Gaussian solenoidal fields supported on shells `q_lo..=q_hi`, rms `amplitude`.
    RandomBand {
        q_lo: i32,
        q_hi: i32,
        amplitude: f64,
        #[serde(default)]
        b_amplitude: Option<f64>,
    },
    /// `b = b0 z + eps * wave`, u the matching eigenmode at wavevector `(0, 0, k)`.
    UniformBPlusWhistler {
        #[serde(default = "one")]
        b0: f64,
        #[serde(default = "two")]
        k: i64,
        #[serde(default = "small")]
        epsilon: f64,
        /// +1 or -1: circular polarization of the perturbation
        #[serde(default = "plus")]
        polarization: i8,
    },
    FromCheckpoint {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}
fn two() -> i64 {
    2
}
fn small() -> f64 {
    1e-3
}
fn plus() -> i8 {
    1
}
fn three() -> f64 {
    3.0
}
fn ten() -> usize {
    10
}
fn yes() -> bool {
    true
}
fn four() -> f64 {
    4.0
}
fn out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub nu: f64,
    pub mu: f64,
    #[serde(default = "one")]
    pub c0: f64,
    /// Sobolev index of the diagnostics.
    #[serde(default = "three")]
    pub s: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub init: InitSpec,
    #[serde(default = "ten")]
    pub diag_every: usize,
    #[serde(default = "yes")]
    pub hall_on: bool,
    #[serde(default)]
    pub seed: u64,
    /// Allows `nu = mu = 0`.
    #[serde(default)]
    pub ideal: bool,
    #[serde(default)]
    pub dealias: DealiasRule,
    #[serde(default)]
    pub partition: PartitionChoice,
    #[serde(default = "one")]
    pub c_adv: f64,
    #[serde(default = "one")]
    pub c_whistler: f64,
    /// Steps between checkpoints; 0 writes only the final state.
    #[serde(default)]
    pub checkpoint_every: usize,
    #[serde(default = "out_dir")]
    pub output_dir: PathBuf,
    /// Exponent of the Lebesgue norm in the embedding-chain diagnostics.
    #[serde(default = "four")]
    pub beta: f64,
    /// Bernstein constant used by the wavenumber bound; measured when absent.
    #[serde(default)]
    pub bernstein_constant: Option<f64>,
    /// Compute the flux breakdown at every record.
    #[serde(default = "yes")]
    pub fluxes: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `m = min(nu, mu)`.
    pub fn m(&self) -> f64 {
        self.nu.min(self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Config(format!("{key}: {why}")));
        if self.ideal {
            if !(self.nu >= 0.0 && self.mu >= 0.0) {
                return bad("nu", "viscosities must be non-negative".into());
            }
        } else {
            if !(self.nu > 0.0 && self.nu.is_finite()) {
                return bad(
                    "nu",
                    format!("must be positive outside ideal mode, got {}", self.nu),
                );
            }
            if !(self.mu > 0.0 && self.mu.is_finite()) {
                return bad(
                    "mu",
                    format!("must be positive outside ideal mode, got {}", self.mu),
                );
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be positive, got {}", self.t_end));
        }
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return bad("n", format!("must be even and >= 8, got {}", self.n));
        }
        if !(self.c0 > 0.0) {
            return bad("c0", format!("must be positive, got {}", self.c0));
        }
        if !(self.s > 0.5) {
            return bad("s", format!("must exceed 1/2, got {}", self.s));
        }
        if self.diag_every == 0 {
            return bad("diag_every", "must be >= 1".into());
        }
        if !(self.c_adv > 0.0 && self.c_whistler > 0.0) {
            return bad("c_adv", "stability constants must be positive".into());
        }
        if !(self.beta > 3.0) {
            return bad("beta", format!("must exceed 3, got {}", self.beta));
        }
        if let Some(cb) = self.bernstein_constant {
            if !(cb > 0.0 && cb.is_finite()) {
                return bad("bernstein_constant", format!("must be positive, got {cb}"));
            }
        }
        match &self.init {
            InitSpec::RandomBand {
                q_lo,
                q_hi,
                amplitude,
                b_amplitude,
            } => {
                if *q_lo < -1 || q_hi < q_lo {
                    return bad(
                        "init.q_lo",
                        format!("need -1 <= q_lo <= q_hi, got {q_lo}, {q_hi}"),
                    );
                }
                if !(*amplitude >= 0.0) || b_amplitude.is_some_and(|a| !(a >= 0.0)) {
                    return bad("init.amplitude", "must be non-negative".into());
                }
            }
            InitSpec::UniformBPlusWhistler {
                k, polarization, ..
            } => {
                if *k <= 0 || *k as usize >= self.n / 2 {
                    return bad("init.k", format!("must lie in 1..n/2, got {k}"));
                }
                if polarization.abs() != 1 {
                    return bad(
                        "init.polarization",
                        format!("must be +1 or -1, got {polarization}"),
                    );
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"nu": 0.1, "mu": 0.1, "n": 16, "dt": 0.01, "t_end": 1.0,
        "init": {"kind": "beltrami_u"}}"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.s, 3.0);
        assert_eq!(cfg.c0, 1.0);
        assert!(cfg.hall_on);
        assert_eq!(cfg.init, InitSpec::BeltramiU { amplitude: 1.0 });
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = BASE.replace("\"t_end\"", "\"t_final\": 2, \"t_end\"");
        let err = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("t_final"), "{err}");
    }

    #[test]
    fn zero_viscosity_needs_ideal_mode() {
        let text = BASE.replace("\"nu\": 0.1", "\"nu\": 0.0");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.starts_with("nu")));
        let ideal = text.replace("\"mu\": 0.1", "\"mu\": 0.0, \"ideal\": true");
        assert!(RunConfig::from_json(&ideal).is_ok());
    }

    #[test]
    fn unknown_init_is_rejected() {
        let text = BASE.replace("beltrami_u", "taylor_green");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config(_))));
    }
}
