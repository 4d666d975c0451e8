//! Kepler dynamics on T*(E \ {O}), its first integrals and the hodograph
//! geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_rk, PhaseDelta, Signature, Vec3};

/// Radius below which the dynamics is treated as a collision.
pub const COLLISION_RADIUS: f64 = 1e-8;

/// A point (r, p) of the Kepler phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePointE {
    pub r: Vec3,
    pub p: Vec3,
}

impl PhasePointE {
    pub const fn new(r: Vec3, p: Vec3) -> Self {
        PhasePointE { r, p }
    }

    pub fn to_state(self) -> [f64; 6] {
        let r = self.r.to_array();
        let p = self.p.to_array();
        [r[0], r[1], r[2], p[0], p[1], p[2]]
    }

    pub fn from_state(s: &[f64]) -> Self {
        PhasePointE::new(Vec3::from_slice(&s[0..3]), Vec3::from_slice(&s[3..6]))
    }

    pub fn check_radius(self) -> Result<()> {
        let r = self.r.norm();
        if r < COLLISION_RADIUS {
            Err(Error::Collision { r })
        } else {
            Ok(())
        }
    }
}

/// Physical constants m, k together with the fixed quadric scale R and the
/// zero-energy inversion ratio l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerParams {
    pub m: f64,
    pub k: f64,
    pub big_r: f64,
    pub l: f64,
}

impl KeplerParams {
    pub fn new(m: f64, k: f64, big_r: f64, l: f64) -> Result<Self> {
        if !(m > 0.0 && k > 0.0 && big_r > 0.0 && l > 0.0) {
            return Err(Error::Domain("m, k, R, l must all be strictly positive".into()));
        }
        Ok(KeplerParams { m, k, big_r, l })
    }

    /// m = k = R = 1 and l = 2 m^2 k.
    pub fn unit() -> Self {
        KeplerParams { m: 1.0, k: 1.0, big_r: 1.0, l: 2.0 }
    }

    /// Width of the band treated as exactly zero energy.
    pub fn zero_energy_threshold(&self) -> f64 {
        1e-12 * (self.m * self.k).powi(2)
    }
}

impl Default for KeplerParams {
    fn default() -> Self {
        let mut p = KeplerParams::unit();
        p.l = 2.0 * p.m * p.m * p.k;
        p
    }
}

/// The triple (E, L, eps): values of the energy-momentum map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum {
    pub energy: f64,
    pub angular_momentum: Vec3,
    pub eccentricity: Vec3,
}

/// Hodograph circle of a motion: the curve traced by p in momentum space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HodographCircle {
    pub center: Vec3,
    pub radius: f64,
}

/// Branch classification of an energy value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyClass {
    Sign(Signature),
    Zero,
}

/// dr/dt = p/m, dp/dt = -mk r / r^3.
pub fn kepler_vector_field(x: PhasePointE, params: &KeplerParams) -> Result<PhaseDelta> {
    x.check_radius()?;
    let r = x.r.norm();
    Ok(PhaseDelta::new(x.p / params.m, x.r * (-params.m * params.k / (r * r * r))))
}

/// E = p^2/2m - mk/r, L = r x p, eps = -r/r + (p x L)/(m^2 k).
pub fn energy_momentum(x: PhasePointE, params: &KeplerParams) -> Result<EnergyMomentum> {
    x.check_radius()?;
    let r = x.r.norm();
    let energy = x.p.norm_sq() / (2.0 * params.m) - params.m * params.k / r;
    let angular_momentum = x.r.cross(x.p);
    let eccentricity =
        -x.r / r + x.p.cross(angular_momentum) / (params.m * params.m * params.k);
    Ok(EnergyMomentum { energy, angular_momentum, eccentricity })
}

/// zeta = +1 for E < 0, -1 for E > 0, with a distinguished zero band.
pub fn energy_class(energy: f64, params: &KeplerParams) -> EnergyClass {
    if energy.abs() <= params.zero_energy_threshold() {
        EnergyClass::Zero
    } else if energy < 0.0 {
        EnergyClass::Sign(Signature::Elliptic)
    } else {
        EnergyClass::Sign(Signature::Hyperbolic)
    }
}

/// Hodograph circle of the motion through x. Radius m^2 k / |L|; the center
/// is written frame-free so that it reduces to the adapted-frame integration
/// constant c e_y.
pub fn hodograph(x: PhasePointE, params: &KeplerParams) -> Result<HodographCircle> {
    x.check_radius()?;
    let l = x.r.cross(x.p);
    let l_norm = l.norm();
    if l_norm == 0.0 {
        return Err(Error::DegenerateHodograph);
    }
    let m2k = params.m * params.m * params.k;
    let radius = m2k / l_norm;
    let center = x.p - l.cross(x.r) * (m2k / (l.norm_sq() * x.r.norm()));
    Ok(HodographCircle { center, radius })
}

/// Flow of the Kepler vector field realized with the adaptive integrator.
pub fn kepler_flow(x: PhasePointE, t: f64, tol: f64, params: &KeplerParams) -> Result<PhasePointE> {
    let params = *params;
    let field = move |s: &[f64]| -> Result<Vec<f64>> {
        let d = kepler_vector_field(PhasePointE::from_state(s), &params)?;
        Ok(d.to_array().to_vec())
    };
    let out = integrate_rk(field, &x.to_state(), t, tol).map_err(|e| {
        // a radial orbit (L = 0) falling onto the centre stalls the adaptive
        // step before the radius guard trips; report it as the collision it is
        match e {
            Error::StepSizeCollapse { .. } if x.r.cross(x.p).norm() < 1e-10 => {
                Error::Collision { r: 0.0 }
            }
            other => other,
        }
    })?;
    Ok(PhasePointE::from_state(&out))
}

/// Orbital period 2 pi sqrt(m a^3 / k) of a bound orbit, a = -mk/(2E).
pub fn orbital_period(em: &EnergyMomentum, params: &KeplerParams) -> Result<f64> {
    if em.energy >= 0.0 {
        return Err(Error::Domain("period defined only for E < 0".into()));
    }
    let a = -params.m * params.k / (2.0 * em.energy);
    Ok(2.0 * std::f64::consts::PI * (params.m * a.powi(3) / params.k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circular() -> PhasePointE {
        PhasePointE::new(Vec3::EX, Vec3::EY)
    }

    #[test]
    fn field_at_circular_point() {
        let d = kepler_vector_field(circular(), &KeplerParams::unit()).unwrap();
        assert_eq!(d.dr, Vec3::EY);
        assert_eq!(d.dp, -Vec3::EX);
    }

    #[test]
    fn field_at_rest_and_force_homogeneity() {
        let p = KeplerParams::unit();
        let x = PhasePointE::new(Vec3::new(0.0, 2.0, 0.0), Vec3::ZERO);
        let d = kepler_vector_field(x, &p).unwrap();
        assert_eq!(d.dr, Vec3::ZERO);
        assert!((d.dp - Vec3::new(0.0, -0.25, 0.0)).norm() < 1e-15);

        // r -> lambda r scales the force by 1/lambda^2
        let lam = 3.0;
        let x2 = PhasePointE::new(x.r * lam, x.p);
        let d2 = kepler_vector_field(x2, &p).unwrap();
        assert!((d2.dp * (lam * lam) - d.dp).norm() < 1e-14);
    }

    #[test]
    fn first_integrals_circular() {
        let em = energy_momentum(circular(), &KeplerParams::unit()).unwrap();
        assert!((em.energy + 0.5).abs() < 1e-15);
        assert!((em.angular_momentum - Vec3::EZ).norm() < 1e-15);
        assert!(em.eccentricity.norm() < 1e-15);
    }

    #[test]
    fn first_integrals_elliptic() {
        let x = PhasePointE::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.0));
        let em = energy_momentum(x, &KeplerParams::unit()).unwrap();
        assert!((em.energy + 0.32).abs() < 1e-15);
        assert!((em.angular_momentum - Vec3::new(0.0, 0.0, 1.2)).norm() < 1e-15);
        assert!((em.eccentricity - Vec3::new(-0.28, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn first_integrals_hyperbolic() {
        let x = PhasePointE::new(Vec3::EX, Vec3::new(0.0, 2.0, 0.0));
        let em = energy_momentum(x, &KeplerParams::unit()).unwrap();
        assert!((em.energy - 1.0).abs() < 1e-15);
        assert!((em.angular_momentum - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-15);
        assert!((em.eccentricity - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn conservation_along_elliptic_orbit() {
        // independent oracle for the hand-derived first-integral values
        let p = KeplerParams::unit();
        let x0 = PhasePointE::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.0));
        let em0 = energy_momentum(x0, &p).unwrap();
        let period = orbital_period(&em0, &p).unwrap();
        let mut x = x0;
        for _ in 0..8 {
            x = kepler_flow(x, period / 8.0, 1e-11, &p).unwrap();
            let em = energy_momentum(x, &p).unwrap();
            assert!((em.energy - em0.energy).abs() < 1e-9);
            assert!((em.angular_momentum - em0.angular_momentum).norm() < 1e-9);
            assert!((em.eccentricity - em0.eccentricity).norm() < 1e-9);
        }
        assert!((x.r - x0.r).norm() < 1e-8);
    }

    #[test]
    fn energy_class_branches() {
        let p = KeplerParams::unit();
        assert_eq!(energy_class(-0.5, &p), EnergyClass::Sign(Signature::Elliptic));
        assert_eq!(energy_class(1.0, &p), EnergyClass::Sign(Signature::Hyperbolic));
        assert_eq!(energy_class(0.0, &p), EnergyClass::Zero);
        assert_eq!(energy_class(1e-14, &p), EnergyClass::Zero);
    }

    #[test]
    fn hodograph_circular() {
        let h = hodograph(circular(), &KeplerParams::unit()).unwrap();
        assert!(h.center.norm() < 1e-15);
        assert!((h.radius - 1.0).abs() < 1e-15);
        // 2mE = c^2 - R^2
        assert!((2.0 * (-0.5) - (h.center.norm_sq() - h.radius * h.radius)).abs() < 1e-12);
    }

    #[test]
    fn hodograph_elliptic_power_relation() {
        let p = KeplerParams::unit();
        let x = PhasePointE::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.0));
        let h = hodograph(x, &p).unwrap();
        assert!((h.radius - 1.0 / 1.2).abs() < 1e-12);
        // c = (0, -7/30, 0) by hand
        assert!((h.center.norm_sq() - 49.0 / 900.0).abs() < 1e-12, "c^2 = {}", h.center.norm_sq());
        let em = energy_momentum(x, &p).unwrap();
        assert!(
            (2.0 * p.m * em.energy - (h.center.norm_sq() - h.radius * h.radius)).abs() < 1e-12
        );
        // p lies on its own hodograph
        assert!(((x.p - h.center).norm() - h.radius).abs() < 1e-12);
    }

    #[test]
    fn hodograph_constant_along_orbit() {
        let p = KeplerParams::unit();
        let x0 = PhasePointE::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.0));
        let h0 = hodograph(x0, &p).unwrap();
        let em = energy_momentum(x0, &p).unwrap();
        let period = orbital_period(&em, &p).unwrap();
        let mut x = x0;
        for _ in 0..20 {
            x = kepler_flow(x, period / 20.0, 1e-11, &p).unwrap();
            let h = hodograph(x, &p).unwrap();
            assert!((h.center - h0.center).norm() < 1e-8);
            assert!((h.radius - h0.radius).abs() < 1e-8);
        }
    }

    #[test]
    fn hodograph_rejects_collision_orbit() {
        let x = PhasePointE::new(Vec3::EX, Vec3::new(0.5, 0.0, 0.0));
        assert!(matches!(
            hodograph(x, &KeplerParams::unit()),
            Err(Error::DegenerateHodograph)
        ));
    }

    #[test]
    fn circular_orbit_period() {
        let p = KeplerParams::unit();
        let x = kepler_flow(circular(), 2.0 * std::f64::consts::PI, 1e-11, &p).unwrap();
        assert!((x.r - Vec3::EX).norm() < 1e-9);
        assert!((x.p - Vec3::EY).norm() < 1e-9);
    }

    #[test]
    fn l_eps_orthogonal() {
        use rand::{Rng, SeedableRng};
        let p = KeplerParams::unit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = PhasePointE::new(
                Vec3::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Vec3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            );
            let em = energy_momentum(x, &p).unwrap();
            assert!(em.angular_momentum.dot(em.eccentricity).abs() < 1e-12);
            // conic relation |eps|^2 = 1 + 2 E L^2 / (m^3 k^2)
            let lhs = em.eccentricity.norm_sq();
            let rhs = 1.0 + 2.0 * em.energy * em.angular_momentum.norm_sq();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
