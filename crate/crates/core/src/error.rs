use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input matrix deviates from Hermiticity beyond the admission tolerance.
    #[error("matrix is not Hermitian (anti-Hermitian part {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// Jacobi diagonalization failed to reach the off-diagonal tolerance.
    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    EigNotConverged { sweeps: usize, off_norm: f64 },

    /// Propagation requested for a negative time.
    #[error("negative evolution time t = {t}")]
    NegativeTime { t: f64 },

    /// The integrator detected trace drift above the conservation tolerance.
    #[error("trace drift {drift:.3e} at t = {t} exceeds tolerance")]
    TraceDrift { t: f64, drift: f64 },

    /// A non-finite entry appeared during integration.
    #[error("non-finite matrix entry at t = {t}")]
    NonFinite { t: f64 },

    /// A parameter is outside its admissible range.
    #[error("parameter {name} = {value} out of range")]
    ParamOutOfRange { name: &'static str, value: f64 },

    /// Von Neumann entropy requested for a spectrum with a genuinely
    /// negative eigenvalue.
    #[error("entropy undefined on non-positive state (min eigenvalue {min_eigenvalue:.3e})")]
    EntropyUndefined { min_eigenvalue: f64 },

    /// The Werner closed form is only valid for a purely oscillatory
    /// generator (alpha = 0).
    #[error("closed form requires alpha = 0 (got alpha = {alpha}); use the numeric path instead")]
    AlphaNotZero { alpha: f64 },

    /// Time step too coarse for the requested noise correlation time.
    #[error("step dt = {dt} must be smaller than the correlation time 1/mu = {tau}")]
    StepTooCoarse { dt: f64, tau: f64 },

    /// Cross-correlation strength exceeds the on-site strength.
    #[error("cross strength f2 = {f2} exceeds on-site strength g2 = {g2}")]
    CrossDominant { f2: f64, g2: f64 },

    /// Noise paths are not sampled on the integration grid.
    #[error("noise path grid mismatch: {detail}")]
    GridMismatch { detail: String },

    /// The Redfield coefficient set violates the reality/symmetry structure.
    #[error("coefficient matrix violates the correlation symmetry (deviation {deviation:.3e})")]
    AsymmetricCoefficients { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
