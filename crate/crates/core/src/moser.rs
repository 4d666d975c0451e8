//! Per-energy-level cotangent lifts: the stereographic lift and its inverse,
//! the zero-energy inversion, and their transformed Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kepler::{KeplerParams, PhasePointE};
use crate::numerics::{metric_dot, Signature, Vec3, Vec4};

/// A covector (OM, W) of T*Q_rho embedded in 4-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentQPoint {
    pub om: Vec4,
    pub w: Vec4,
    pub sig: Signature,
    pub rho: f64,
}

impl CotangentQPoint {
    /// Residual of the quadric equation h^2 + zeta |Omu|^2 = rho^2.
    pub fn quadric_residual(&self) -> f64 {
        let z = self.sig.zeta();
        (self.om.h * self.om.h + z * self.om.v3.norm_sq() - self.rho * self.rho).abs()
    }

    /// Residual of the tangency constraint W3 . Omu + zeta W_h h = 0.
    pub fn tangency_residual(&self) -> f64 {
        metric_dot(self.w, self.om, self.sig).abs()
    }

    /// zeta-metric norm of W; the transformed free Hamiltonian.
    pub fn w_norm(&self) -> f64 {
        metric_dot(self.w, self.w, self.sig).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let r2 = self.rho * self.rho;
        if self.quadric_residual() > 1e-10 * r2 {
            return Err(Error::Domain(format!(
                "quadric residual {:.3e} exceeds 1e-10 rho^2",
                self.quadric_residual()
            )));
        }
        if self.tangency_residual() > 1e-10 {
            return Err(Error::TangencyViolation { residual: self.tangency_residual() });
        }
        let w2 = metric_dot(self.w, self.w, self.sig);
        if !(w2 > 0.0) {
            return Err(Error::Domain(format!("nonpositive |W|^2 = {w2:.3e}")));
        }
        Ok(())
    }
}

/// Zero-energy branch point: base point of E \ {O} and a covector, both
/// plain 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentEPoint {
    pub om: Vec3,
    pub w: Vec3,
}

/// The matched quadric scale for an energy level: the unique rho > 0 with
/// E = -zeta rho^2 / (2m).
pub fn rho_for_energy(energy: f64, params: &KeplerParams) -> Result<f64> {
    if energy.abs() <= params.zero_energy_threshold() {
        return Err(Error::ZeroEnergy { energy: energy.abs() });
    }
    Ok((2.0 * params.m * energy.abs()).sqrt())
}

/// Inverse stereographic cotangent lift: (r, p) -> (OM, W) on Q_rho.
pub fn moser_lift_inv(x: PhasePointE, rho: f64, sig: Signature) -> Result<CotangentQPoint> {
    x.check_radius()?;
    let z = sig.zeta();
    let p2 = x.p.norm_sq();
    let denom = rho * rho + z * p2;
    if denom.abs() < 1e-12 * rho * rho {
        return Err(Error::SingularMomentum { denom });
    }
    let rp = x.r.dot(x.p);
    let omu = x.p * (2.0 * rho * rho / denom);
    let h = rho * (p2 - z * rho * rho) / (p2 + z * rho * rho);
    let w3 = x.r * (denom / (2.0 * rho * rho)) - x.p * (z * rp / (rho * rho));
    let wh = z * rp / rho;
    Ok(CotangentQPoint {
        om: Vec4::new(omu, h),
        w: Vec4::new(w3, wh),
        sig,
        rho,
    })
}

/// Stereographic cotangent lift: (OM, W) on Q_rho -> (r, p).
pub fn moser_lift(q: &CotangentQPoint) -> Result<PhasePointE> {
    let gap = (q.rho - q.om.h).abs();
    if gap < 1e-12 * q.rho {
        return Err(Error::NorthPole { gap });
    }
    let p = q.om.v3 * (q.rho / (q.rho - q.om.h));
    let r = q.w.v3 * ((q.rho - q.om.h) / q.rho) + q.om.v3 * (q.w.h / q.rho);
    Ok(PhasePointE::new(r, p))
}

/// The transformed Hamiltonian E o S_rho evaluated directly on T*Q_rho.
pub fn moser_hamiltonian(q: &CotangentQPoint, params: &KeplerParams) -> Result<f64> {
    let gap = (q.rho - q.om.h).abs();
    if gap < 1e-12 * q.rho {
        return Err(Error::NorthPole { gap });
    }
    let w_norm = q.w_norm();
    if !(w_norm > 0.0) {
        return Err(Error::Domain("|W| must be positive".into()));
    }
    let z = q.sig.zeta();
    let rho = q.rho;
    // kinetic part from |Omu|^2 = zeta (rho^2 - h^2); potential from
    // |r| = |rho - h| |W| / rho, which needs the absolute gap so both
    // sheets of the hyperbolic quadric evaluate correctly
    let kinetic = z * rho * rho * (rho + q.om.h) / (2.0 * params.m * (rho - q.om.h));
    let potential = -params.m * params.k * rho / (gap * w_norm);
    Ok(kinetic + potential)
}

/// Cotangent lift of the inversion with pole O and ratio l; involutive, so
/// the same formula serves both directions: (p, r) -> (OM, W) and back.
fn inversion_pair(a: Vec3, b: Vec3, l: f64) -> Result<(Vec3, Vec3)> {
    let a2 = a.norm_sq();
    if a2 < 1e-24 {
        return Err(Error::ZeroMomentum);
    }
    let a_out = a * (l / a2);
    let b_out = b * (a2 / l) - a * (2.0 * b.dot(a) / l);
    Ok((a_out, b_out))
}

/// Zero-energy lift: maps a phase point (r, p) to (OM, W) in T*(E \ {O}).
pub fn parabolic_lift(x: PhasePointE, l: f64) -> Result<CotangentEPoint> {
    let (om, w) = inversion_pair(x.p, x.r, l)?;
    Ok(CotangentEPoint { om, w })
}

/// Inverse direction of the zero-energy lift (the map is involutive).
pub fn parabolic_lift_inv(q: &CotangentEPoint, l: f64) -> Result<PhasePointE> {
    let (p, r) = inversion_pair(q.om, q.w, l)?;
    Ok(PhasePointE::new(r, p))
}

/// E o S_0 = l^2 (|W| - 2 m^2 k / l) / (2 m |W| |OM|^2).
pub fn parabolic_hamiltonian(q: &CotangentEPoint, params: &KeplerParams) -> Result<f64> {
    let w_norm = q.w.norm();
    let om2 = q.om.norm_sq();
    if !(w_norm > 0.0) || !(om2 > 0.0) {
        return Err(Error::ZeroMomentum);
    }
    let l = params.l;
    Ok(l * l * (w_norm - 2.0 * params.m * params.m * params.k / l)
        / (2.0 * params.m * w_norm * om2))
}
