//! Small dense linear algebra over 3- and 4-vectors with a zeta-signed
//! metric, canonical 2-form evaluation, finite-difference operators and the
//! embedded Runge-Kutta integrator used throughout the crate.

mod fd;
mod forms;
mod ode;
mod vec;

pub use fd::{gradient_fd, jacobian_fd, poisson_bracket_fd, Mat, BRACKET_SIGN, FD_STEP};
pub use forms::{
    q_delta_residual, two_form_e, two_form_q, two_form_q_unchecked, PhaseDelta, QDelta,
    Q_DELTA_TANGENCY_TOL,
};
pub use ode::{integrate_path, integrate_rk};
pub use vec::{metric_dot, Signature, Vec3, Vec4};
