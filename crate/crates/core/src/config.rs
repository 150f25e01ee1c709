//! Run settings shared by the command-line front end.
//!
//! A config file holds `key = value` lines; `#` starts a comment. Flags given
//! on the command line override the file, which overrides the defaults below.
//!
//! | key               | default | meaning                                          |
//! |-------------------|---------|--------------------------------------------------|
//! | `n`               | 64      | cells per unit length                            |
//! | `tol`, `gap_tol`  | 1e-5    | relative duality gap target                      |
//! | `max_iters`       | 20000   | iteration cap                                    |
//! | `log_every`       | 100     | iterations between gap evaluations               |
//! | `theta`           | 1       | over-relaxation                                  |
//! | `tau`, `sigma`    | h/√8    | step sizes                                       |
//! | `seed`            | none    | draw the initial u uniformly in the datum range  |
//! | `restart`         | true    | restarted averaging                              |
//! | `parallel`        | true    | rayon kernels when compiled in                   |
//! | `r_div`           | 5/n     | certify: divergence tolerance                    |
//! | `r_feas`          | 1e-12   | certify: feasibility tolerance                   |
//! | `r_pair`          | 5/√n    | certify: relative pairing tolerance              |
//! | `r_sign`          | 0.1     | certify: sign-condition tolerance                |
//! | `jump_thresh`     | 5% of f range | certify: sign check threshold             |
//! | `exclusion_cells` | 4       | radius around flagged boundary points, in cells  |
//! | `hotspot_thresh`  | 15% of f range | scan: oscillation threshold; jump size for `skip_jump_levels` |
//! | `skip_jump_levels`| false   | levelsets: drop polylines inside a jump band     |

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::certify::Tolerances;
use crate::error::{Error, Result};
use crate::solver::SolveConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub n: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub log_every: usize,
    pub theta: f64,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub restart: bool,
    pub parallel: bool,
    pub r_div: Option<f64>,
    pub r_feas: Option<f64>,
    pub r_pair: Option<f64>,
    pub r_sign: Option<f64>,
    pub jump_thresh: Option<f64>,
    pub exclusion_cells: f64,
    pub hotspot_thresh: Option<f64>,
    pub skip_jump_levels: bool,
}

impl Default for Settings {
    fn default() -> Self {
        let s = SolveConfig::default();
        Self {
            n: 64,
            tol: s.gap_tol,
            max_iters: s.max_iters,
            log_every: s.log_every,
            theta: s.theta,
            tau: None,
            sigma: None,
            seed: None,
            restart: s.restart,
            parallel: s.parallel,
            r_div: None,
            r_feas: None,
            r_pair: None,
            r_sign: None,
            jump_thresh: None,
            exclusion_cells: 4.0,
            hotspot_thresh: None,
            skip_jump_levels: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

impl Settings {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, v)?,
            "tol" | "gap_tol" => self.tol = parse(key, v)?,
            "max_iters" => self.max_iters = parse(key, v)?,
            "log_every" => self.log_every = parse(key, v)?,
            "theta" => self.theta = parse(key, v)?,
            "tau" => self.tau = Some(parse(key, v)?),
            "sigma" => self.sigma = Some(parse(key, v)?),
            "seed" => self.seed = Some(parse(key, v)?),
            "restart" => self.restart = parse(key, v)?,
            "parallel" => self.parallel = parse(key, v)?,
            "r_div" => self.r_div = Some(parse(key, v)?),
            "r_feas" => self.r_feas = Some(parse(key, v)?),
            "r_pair" => self.r_pair = Some(parse(key, v)?),
            "r_sign" => self.r_sign = Some(parse(key, v)?),
            "jump_thresh" => self.jump_thresh = Some(parse(key, v)?),
            "exclusion_cells" => self.exclusion_cells = parse(key, v)?,
            "hotspot_thresh" => self.hotspot_thresh = Some(parse(key, v)?),
            "skip_jump_levels" => self.skip_jump_levels = parse(key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Apply every assignment of a config text on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        self.merge_str(&text)
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            max_iters: self.max_iters,
            gap_tol: self.tol,
            theta: self.theta,
            tau: self.tau,
            sigma: self.sigma,
            seed: self.seed,
            log_every: self.log_every,
            restart: self.restart,
            parallel: self.parallel,
            ..SolveConfig::default()
        }
    }

    /// Certification tolerances at resolution `n`.
    pub fn tolerances(&self, n: usize) -> Tolerances {
        let base = Tolerances::grid_scale(n as f64);
        Tolerances {
            r_div: self.r_div.unwrap_or(base.r_div),
            r_feas: self.r_feas.unwrap_or(base.r_feas),
            r_pair: self.r_pair.unwrap_or(base.r_pair),
            r_sign: self.r_sign.unwrap_or(base.r_sign),
            jump_thresh: self.jump_thresh,
            exclusion_cells: self.exclusion_cells,
            ..base
        }
    }
}
