use crate::error::{Error, Result};
use crate::numerics::vec::{metric_dot, Signature, Vec3, Vec4};

/// Tangent delta on the Kepler side, a carrier for 2-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseDelta {
    pub dr: Vec3,
    pub dp: Vec3,
}

impl PhaseDelta {
    pub const fn new(dr: Vec3, dp: Vec3) -> Self {
        PhaseDelta { dr, dp }
    }

    pub fn to_array(self) -> [f64; 6] {
        let r = self.dr.to_array();
        let p = self.dp.to_array();
        [r[0], r[1], r[2], p[0], p[1], p[2]]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        PhaseDelta::new(Vec3::from_slice(&s[0..3]), Vec3::from_slice(&s[3..6]))
    }
}

/// Tangent delta on the quadric side, in the 4+4 ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QDelta {
    pub d_om: Vec4,
    pub d_w: Vec4,
}

impl QDelta {
    pub const fn new(d_om: Vec4, d_w: Vec4) -> Self {
        QDelta { d_om, d_w }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        QDelta::new(Vec4::from_slice(&s[0..4]), Vec4::from_slice(&s[4..8]))
    }
}

/// Evaluation of the canonical 2-form d(p.dr) of the Kepler phase space on a
/// pair of tangent deltas.
pub fn two_form_e(u: PhaseDelta, v: PhaseDelta) -> f64 {
    u.dp.dot(v.dr) - v.dp.dot(u.dr)
}

/// Tolerance on the linearized constraint residuals of Q-side deltas.
pub const Q_DELTA_TANGENCY_TOL: f64 = 1e-8;

/// Linearized constraint residuals of a Q-side delta at a base point:
/// differential of the quadric equation and of the W.OM pairing.
pub fn q_delta_residual(om: Vec4, w: Vec4, sig: Signature, d: QDelta) -> f64 {
    let quadric = metric_dot(om, d.d_om, sig);
    let pairing = metric_dot(d.d_w, om, sig) + metric_dot(w, d.d_om, sig);
    quadric.abs().max(pairing.abs())
}

/// Ambient evaluation of d(W.dOM) restricted to T*Q. The deltas must be
/// tangent to the constraint manifold of the base point (om, w); covectors
/// are identified through the ambient zeta metric, so the pairing weighs the
/// h components by zeta.
pub fn two_form_q(om: Vec4, w: Vec4, sig: Signature, u: QDelta, v: QDelta) -> Result<f64> {
    for d in [u, v] {
        let res = q_delta_residual(om, w, sig, d);
        if res > Q_DELTA_TANGENCY_TOL {
            return Err(Error::TangencyViolation { residual: res });
        }
    }
    Ok(two_form_q_unchecked(u, v, sig))
}

/// Same pairing without the tangency precondition, for use on deltas already
/// known to be tangent (e.g. produced by the closed-form flows).
pub fn two_form_q_unchecked(u: QDelta, v: QDelta, sig: Signature) -> f64 {
    metric_dot(u.d_w, v.d_om, sig) - metric_dot(v.d_w, u.d_om, sig)
}
