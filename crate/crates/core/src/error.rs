use thiserror::Error;

/// Errors raised by the point maps, flows and finite-difference machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The trajectory came closer to the attracting centre than the guard radius.
    #[error("collision guard tripped: r = {r:.3e} < 1e-8")]
    Collision { r: f64 },

    /// Adaptive step size shrank below the representable floor.
    #[error("integrator step size collapsed at t = {t:.6e} (h = {h:.3e})")]
    StepSizeCollapse { t: f64, h: f64 },

    /// The point sits on the fibre over the north pole of the quadric.
    #[error("point on the excluded north-pole fibre (|rho - h| = {gap:.3e})")]
    NorthPole { gap: f64 },

    /// For zeta = -1 the lift is undefined on the momentum sphere p^2 = rho^2.
    #[error("singular momentum: rho^2 + zeta p^2 = {denom:.3e}")]
    SingularMomentum { denom: f64 },

    /// The parabolic lift needs a nonzero momentum (resp. base point).
    #[error("zero momentum or degenerate base point in zero-energy lift")]
    ZeroMomentum,

    /// Energy sign does not match the requested branch.
    #[error("wrong branch: E = {energy:.6e} is incompatible with zeta = {zeta}")]
    WrongBranch { energy: f64, zeta: i8 },

    /// The glued-map radicand zeta r (2 m^2 k - r p^2) is not positive.
    #[error("domain error: glued-map radicand = {radicand:.3e} <= 0")]
    Radicand { radicand: f64 },

    /// Zero-energy points are excluded from the glued S-map machinery.
    #[error("zero energy: |E| = {energy:.3e} lies inside the zero band")]
    ZeroEnergy { energy: f64 },

    /// Hodograph geometry requires L != 0.
    #[error("degenerate hodograph: L = 0 (collision orbit)")]
    DegenerateHodograph,

    /// A tangent delta violates the constraint-tangency precondition.
    #[error("delta not tangent to the constraint manifold (residual {residual:.3e})")]
    TangencyViolation { residual: f64 },

    /// Two algebroid elements live in different fibres.
    #[error("fibre mismatch: e1 = {e1:.6e}, e2 = {e2:.6e}")]
    FibreMismatch { e1: f64, e2: f64 },

    /// sigma_phi must be strictly monotone along an orbit.
    #[error("monotonicity violation in sigma along the orbit (g changed sign?)")]
    NonMonotone,

    /// The 1-D root find for the inverse GLS map failed.
    #[error("root find failed: {0}")]
    RootFind(String),

    /// Catch-all for invalid inputs (bad norms, non-finite values, ...).
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
