use thiserror::Error;

use crate::charfn::QidVerdict;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid distribution: {}", .0.join("; "))]
    InvalidDistribution(Vec<String>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("quadrature step too coarse at z = {z}: required step <= {required_step}")]
    Refinement { z: f64, required_step: f64 },

    #[error("window [{lo}, {hi}] not covered by grid [{grid_lo}, {grid_hi}]")]
    WindowMismatch {
        lo: f64,
        hi: f64,
        grid_lo: f64,
        grid_hi: f64,
    },

    #[error("branch tracking failed: |F| < {tol:e} near z = {z}")]
    BranchTracking { z: f64, tol: f64 },

    #[error("branch tracking needs more than {max_points} grid points")]
    GridLimit { max_points: usize },

    #[error("tail plateau not reached: |F - q| / |q| = {residual:.3e} at the grid ends; extend the grid")]
    PlateauNotReached { residual: f64 },

    #[error("mean motion residual grows with the horizon ({residual:.3e}); increase the horizon")]
    Horizon { residual: f64 },

    #[error("frequency gap {gap:e} below resolution {resolution:e}")]
    Resolution { gap: f64, resolution: f64 },

    #[error("Wiener inversion did not converge (residual {residual:.3e})")]
    Inversion { residual: f64 },

    #[error("atom support is not lattice-supported; extraction needs a lattice")]
    UnsupportedSupport,

    #[error("atom at {location} is not on the lattice (1/{n})Z")]
    OffLattice { location: f64, n: u64 },

    #[error("distribution is not quasi-infinitely divisible ({0})")]
    NotQid(String),

    #[error("distribution is not certified quasi-infinitely divisible (verdict {}, inf|F| estimate {:.3e})", .0.verdict.label(), .0.eps_f)]
    Uncertified(Box<QidVerdict>),

    #[error("dominant-atom condition violated: max mass {max} vs rest {rest}")]
    NotDominant { max: f64, rest: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("realness violated in {what}: imaginary residue {residue:.3e}")]
    Realness { what: &'static str, residue: f64 },

    #[error("weight function rejected: {0}")]
    WeightRejected(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
