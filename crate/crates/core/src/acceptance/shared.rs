//! Shared expensive artifacts for the verification suite, built once per
//! process.

use std::sync::OnceLock;

use crate::cell::{FhatTable, MinimizeOptions};
use crate::critical::ThetaTable;
use crate::spectral::{lambda0, theta0, SpectralResult};

/// Lazily built shared state: the `fhat` table and the spectral constants.
pub struct SuiteContext {
    fhat: OnceLock<FhatTable>,
    theta0: OnceLock<SpectralResult>,
    lambda0: OnceLock<SpectralResult>,
    thetas: OnceLock<ThetaTable>,
    pub fhat_cache_path: Option<std::path::PathBuf>,
}

static GLOBAL: OnceLock<SuiteContext> = OnceLock::new();

impl SuiteContext {
    pub fn new() -> Self {
        SuiteContext {
            fhat: OnceLock::new(),
            theta0: OnceLock::new(),
            lambda0: OnceLock::new(),
            thetas: OnceLock::new(),
            fhat_cache_path: None,
        }
    }

    /// Process-wide context shared by the test harness and the CLI.
    pub fn global() -> &'static SuiteContext {
        GLOBAL.get_or_init(SuiteContext::new)
    }

    pub fn table_build_options() -> MinimizeOptions {
        MinimizeOptions { seeds: 2, tol_rel: 1e-8, max_iter: 1400, rng_seed: 20_22 }
    }

    pub fn fhat(&self) -> &FhatTable {
        self.fhat.get_or_init(|| {
            if let Some(path) = &self.fhat_cache_path {
                if let Ok(t) = FhatTable::read_csv(path) {
                    return t;
                }
            }
            FhatTable::build_default(&Self::table_build_options())
                .expect("default fhat table build")
        })
    }

    pub fn theta0(&self) -> &SpectralResult {
        self.theta0.get_or_init(|| theta0(1e-9).expect("theta0 solve"))
    }

    pub fn lambda0(&self) -> &SpectralResult {
        self.lambda0.get_or_init(|| lambda0(1e-8).expect("lambda0 solve"))
    }

    /// Half-plane eigenvalues on the 11-point theta grid.
    pub fn theta_table(&self) -> &ThetaTable {
        self.thetas.get_or_init(|| ThetaTable::build(12.0, 84, 1e-7).expect("theta table build"))
    }
}

impl Default for SuiteContext {
    fn default() -> Self {
        Self::new()
    }
}
