//! Momentum maps on both sides of the regularization, the Poisson bracket
//! table for (L, eps), the energy-indexed Lie algebroid of infinitesimal
//! symmetries and its Hamiltonian action on the phase space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gls::{gls_map, DelaunayPoint};
use crate::kepler::{energy_momentum, KeplerParams, PhasePointE};
use crate::moser::{rho_for_energy, CotangentEPoint, CotangentQPoint};
use crate::numerics::{gradient_fd, jacobian_fd, poisson_bracket_fd, Signature, Vec3, Vec4, FD_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPair {
    pub k1: Vec3,
    pub k2: Vec3,
}

/// A point of the symmetry algebroid R x E x E: energy coordinate on the
/// base and a pair of 3-vectors in the fibre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebroidElement {
    pub e: f64,
    pub u1: Vec3,
    pub u2: Vec3,
}

impl AlgebroidElement {
    pub const fn new(e: f64, u1: Vec3, u2: Vec3) -> Self {
        AlgebroidElement { e, u1, u2 }
    }
}

fn k_from(om: Vec4, w: Vec4, sig: Signature) -> MomentumPair {
    let z = sig.zeta();
    MomentumPair {
        k1: om.v3.cross(w.v3),
        k2: (w.v3 * om.h - om.v3 * w.h) * z,
    }
}

/// Momentum map on T*Q_rho for a nonzero energy level.
pub fn momentum_k_q(q: &CotangentQPoint) -> MomentumPair {
    k_from(q.om, q.w, q.sig)
}

/// Momentum map at the fixed scale R (same closed form).
pub fn momentum_k(q: &DelaunayPoint) -> MomentumPair {
    k_from(q.om, q.w, q.sig)
}

/// Momentum map of the zero-energy branch: (OM x W, W).
pub fn momentum_k_zero(q: &CotangentEPoint) -> MomentumPair {
    MomentumPair { k1: q.om.cross(q.w), k2: q.w }
}

/// Kepler-side momentum map J = (p x r, eps).
pub fn momentum_j(x: PhasePointE, params: &KeplerParams) -> Result<MomentumPair> {
    let em = energy_momentum(x, params)?;
    Ok(MomentumPair {
        k1: x.p.cross(x.r),
        k2: em.eccentricity,
    })
}

/// Residuals of K1 o gls = p x r and K2 o gls = (m^2 k / rho) eps.
pub fn intertwine_check(x: PhasePointE, params: &KeplerParams) -> Result<(f64, f64)> {
    let em = energy_momentum(x, params)?;
    let rho = rho_for_energy(em.energy, params)?;
    let k = momentum_k(&gls_map(x, params)?);
    let r1 = (k.k1 - x.p.cross(x.r)).norm();
    let r2 = (k.k2 - em.eccentricity * (params.m * params.m * params.k / rho)).norm();
    Ok((r1, r2))
}

/// Fibrewise bracket of the symmetry algebroid (zero anchor):
/// [(u1,u2),(v1,v2)]_e = (-u1 x v1 + (2e/(m^3 k^2)) u2 x v2,
///                        -u1 x v2 - u2 x v1).
///
/// The sign of the u2 x v1 term is forced by antisymmetry and by the
/// requirement that section Hamiltonians u1.(r x p) + u2.eps realize a Lie
/// algebra homomorphism on the energy level e.
pub fn algebroid_bracket(
    a: &AlgebroidElement,
    b: &AlgebroidElement,
    params: &KeplerParams,
) -> Result<AlgebroidElement> {
    if a.e != b.e {
        return Err(Error::FibreMismatch { e1: a.e, e2: b.e });
    }
    let alpha = 2.0 * a.e / (params.m.powi(3) * params.k * params.k);
    Ok(AlgebroidElement {
        e: a.e,
        u1: -a.u1.cross(b.u1) + a.u2.cross(b.u2) * alpha,
        u2: -a.u1.cross(b.u2) - a.u2.cross(b.u1),
    })
}

/// Hamiltonian of the constant section (u1, u2): u1.(r x p) + u2.eps.
pub fn section_hamiltonian(s: &AlgebroidElement, x: PhasePointE, params: &KeplerParams) -> Result<f64> {
    let em = energy_momentum(x, params)?;
    Ok(s.u1.dot(em.angular_momentum) + s.u2.dot(em.eccentricity))
}

/// Fundamental vector field of a constant section, from the FD gradient of
/// its Hamiltonian through the canonical form: X_f = (df/dp, -df/dr).
pub fn section_field(s: &AlgebroidElement, x: &[f64], params: &KeplerParams) -> Result<Vec<f64>> {
    let h = |y: &[f64]| section_hamiltonian(s, PhasePointE::from_state(y), params);
    let g = gradient_fd(h, x, FD_STEP)?;
    Ok(vec![g[3], g[4], g[5], -g[0], -g[1], -g[2]])
}

/// Norm of [X_a, X_b](x) - X_{[a,b]_e}(x), the action axiom residual, with
/// the Lie bracket of the fundamental fields taken by nested FD.
pub fn action_bracket_check(
    a: &AlgebroidElement,
    b: &AlgebroidElement,
    x: PhasePointE,
    params: &KeplerParams,
) -> Result<f64> {
    let e = energy_momentum(x, params)?.energy;
    if a.e != b.e || (a.e - e).abs() > 1e-9 * (1.0 + e.abs()) {
        return Err(Error::FibreMismatch { e1: a.e, e2: e });
    }
    let state = x.to_state();
    let fa = |y: &[f64]| section_field(a, y, params);
    let fb = |y: &[f64]| section_field(b, y, params);
    // the outer Jacobian differentiates fields that are themselves central
    // differences; a wider step keeps their FD noise from dominating
    let ja = jacobian_fd(&fa, &state, 10.0 * FD_STEP)?;
    let jb = jacobian_fd(&fb, &state, 10.0 * FD_STEP)?;
    let va = fa(&state)?;
    let vb = fb(&state)?;
    let lie: Vec<f64> = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| jb[(i, j)] * va[j] - ja[(i, j)] * vb[j])
                .sum::<f64>()
        })
        .collect();
    // the target is the Hamiltonian field of y -> <J(y), [a,b]_{E(y)}>: the
    // bracket coefficient 2E/(m^3 k^2) rides the local energy, and its
    // gradient contributes the multiple of X_E that closes the axiom
    let c1 = -a.u1.cross(b.u1);
    let c2 = a.u2.cross(b.u2);
    let w2 = -a.u1.cross(b.u2) - a.u2.cross(b.u1);
    let denom = params.m.powi(3) * params.k * params.k;
    let hf = |y: &[f64]| -> Result<f64> {
        let em = energy_momentum(PhasePointE::from_state(y), params)?;
        let coeff = 2.0 * em.energy / denom;
        Ok((c1 + c2 * coeff).dot(em.angular_momentum) + w2.dot(em.eccentricity))
    };
    let g = gradient_fd(hf, &state, FD_STEP)?;
    let target = [g[3], g[4], g[5], -g[0], -g[1], -g[2]];
    Ok(lie
        .iter()
        .zip(target.iter())
        .map(|(l, t)| (l - t) * (l - t))
        .sum::<f64>()
        .sqrt())
}

/// One row of the bracket table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketRow {
    pub name: String,
    pub fd_value: f64,
    pub expected: f64,
    pub residual: f64,
}

/// All 15 brackets among the components of L and eps, checked by central
/// differences against the closed table evaluated with the point's own
/// first integrals:
///   {L_i, L_j}     = -eps_ijk L_k
///   {L_i, eps_j}   = -eps_ijk eps_k
///   {eps_i, eps_j} = (2E/(m^3 k^2)) eps_ijk L_k
pub fn poisson_table_check(x: PhasePointE, params: &KeplerParams) -> Result<Vec<BracketRow>> {
    let em = energy_momentum(x, params)?;
    let state = x.to_state();
    let p = *params;

    let ell = move |i: usize| {
        move |y: &[f64]| -> Result<f64> {
            let pt = PhasePointE::from_state(y);
            Ok(pt.r.cross(pt.p).get(i))
        }
    };
    let eps = move |i: usize| {
        move |y: &[f64]| -> Result<f64> {
            Ok(energy_momentum(PhasePointE::from_state(y), &p)?.eccentricity.get(i))
        }
    };

    let axes = ["x", "y", "z"];
    let mut rows = Vec::with_capacity(15);
    let mut push = |name: String, fd: f64, expected: f64| {
        rows.push(BracketRow { name, fd_value: fd, expected, residual: (fd - expected).abs() });
    };

    let cross_coeff = |i: usize, j: usize, v: Vec3| -> f64 {
        // eps_ijk v_k as the (i x j) component of v
        let mut ei = Vec3::ZERO;
        let mut ej = Vec3::ZERO;
        match i {
            0 => ei.x = 1.0,
            1 => ei.y = 1.0,
            _ => ei.z = 1.0,
        }
        match j {
            0 => ej.x = 1.0,
            1 => ej.y = 1.0,
            _ => ej.z = 1.0,
        }
        ei.cross(ej).dot(v)
    };

    let l_val = em.angular_momentum;
    let e_val = em.eccentricity;
    let two_e = 2.0 * em.energy / (params.m.powi(3) * params.k * params.k);

    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let fd = poisson_bracket_fd(&ell(i), &ell(j), &state, FD_STEP)?;
        push(
            format!("{{L{},L{}}}", axes[i], axes[j]),
            fd,
            -cross_coeff(i, j, l_val),
        );
    }
    for i in 0..3 {
        for j in 0..3 {
            let fd = poisson_bracket_fd(&ell(i), &eps(j), &state, FD_STEP)?;
            push(
                format!("{{L{},e{}}}", axes[i], axes[j]),
                fd,
                -cross_coeff(i, j, e_val),
            );
        }
    }
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let fd = poisson_bracket_fd(&eps(i), &eps(j), &state, FD_STEP)?;
        push(
            format!("{{e{},e{}}}", axes[i], axes[j]),
            fd,
            two_e * cross_coeff(i, j, l_val),
        );
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gls::{delaunay_flow, s_inverse};
    use crate::kepler::kepler_flow;
    use rand::{Rng, SeedableRng};

    fn unit() -> KeplerParams {
        KeplerParams::unit()
    }

    fn circular() -> PhasePointE {
        PhasePointE::new(Vec3::EX, Vec3::EY)
    }

    fn elliptic() -> PhasePointE {
        PhasePointE::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.0))
    }

    #[test]
    fn momentum_k_worked_points() {
        let p = unit();
        let q = s_inverse(circular(), &p, Signature::Elliptic).unwrap();
        let k = momentum_k(&q);
        assert!((k.k1 - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert!(k.k2.norm() < 1e-15);

        let zq = CotangentEPoint { om: Vec3::new(0.0, 2.0, 0.0), w: Vec3::EX };
        let k = momentum_k_zero(&zq);
        assert!((k.k1 - Vec3::new(0.0, 0.0, -2.0)).norm() < 1e-15);
        assert!((k.k2 - Vec3::EX).norm() < 1e-15);
    }

    #[test]
    fn momentum_j_worked_points() {
        let p = unit();
        let j = momentum_j(circular(), &p).unwrap();
        assert!((j.k1 - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert!(j.k2.norm() < 1e-15);
        let j = momentum_j(elliptic(), &p).unwrap();
        assert!((j.k1 - Vec3::new(0.0, 0.0, -1.2)).norm() < 1e-15);
        assert!((j.k2 - Vec3::new(-0.28, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn momentum_k_conserved_along_flow() {
        let p = unit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut n = 0;
        while n < 50 {
            let x = PhasePointE::new(
                Vec3::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Vec3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            );
            let Ok(em) = energy_momentum(x, &p) else { continue };
            if em.energy.abs() < 0.05 || em.angular_momentum.norm() < 0.05 {
                continue;
            }
            let sig = if em.energy < 0.0 { Signature::Elliptic } else { Signature::Hyperbolic };
            let q = s_inverse(x, &p, sig).unwrap();
            let k0 = momentum_k(&q);
            // keep the flow phase moderate: large cosh arguments lose the
            // exact hyperbolic invariants to cancellation
            let lam = p.k * p.k * p.m.powi(3) / (p.big_r.powi(3) * q.w_norm().powi(3));
            for s in [0.3, 1.1, 4.7] {
                let qs = delaunay_flow(&q, s / lam.max(1.0), &p).unwrap();
                let k = momentum_k(&qs);
                assert!((k.k1 - k0.k1).norm() < 1e-10, "dK1 {}", (k.k1 - k0.k1).norm());
                assert!((k.k2 - k0.k2).norm() < 1e-10);
            }
            n += 1;
        }
    }

    #[test]
    fn momentum_j_conserved_along_kepler_flow() {
        let p = unit();
        let j0 = momentum_j(elliptic(), &p).unwrap();
        let mut x = elliptic();
        for _ in 0..10 {
            x = kepler_flow(x, 0.8, 1e-11, &p).unwrap();
            let j = momentum_j(x, &p).unwrap();
            assert!((j.k1 - j0.k1).norm() < 1e-9);
            assert!((j.k2 - j0.k2).norm() < 1e-9);
        }
    }

    #[test]
    fn intertwine_worked_points() {
        let p = unit();
        let (r1, r2) = intertwine_check(circular(), &p).unwrap();
        assert!(r1 < 1e-14 && r2 < 1e-14, "{r1} {r2}");
        // elliptic apsis: K2 = (-0.35, 0, 0) against (m^2 k / 0.8) * (-0.28, 0, 0)
        let q = s_inverse(elliptic(), &p, Signature::Elliptic).unwrap();
        let k = momentum_k(&q);
        assert!((k.k2 - Vec3::new(-0.35, 0.0, 0.0)).norm() < 1e-14);
        let (r1, r2) = intertwine_check(elliptic(), &p).unwrap();
        assert!(r1 < 1e-14 && r2 < 1e-14, "{r1} {r2}");
    }

    #[test]
    fn intertwine_random_both_branches() {
        let p = unit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = [0usize; 2];
        while done[0] < 200 || done[1] < 200 {
            let x = PhasePointE::new(
                Vec3::new(rng.gen_range(0.4..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Vec3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            );
            let Ok(em) = energy_momentum(x, &p) else { continue };
            if em.energy.abs() < 0.05 || em.angular_momentum.norm() < 0.05 {
                continue;
            }
            let idx = if em.energy < 0.0 { 0 } else { 1 };
            if done[idx] >= 200 {
                continue;
            }
            let Ok((r1, r2)) = intertwine_check(x, &p) else { continue };
            assert!(r1 < 1e-8, "r1 {r1}");
            assert!(r2 < 1e-8, "r2 {r2}");
            done[idx] += 1;
        }
    }

    #[test]
    fn algebroid_worked_brackets() {
        let p = unit();
        for e in [-0.5, 0.0, 1.3] {
            let a = AlgebroidElement::new(e, Vec3::EX, Vec3::ZERO);
            let b = AlgebroidElement::new(e, Vec3::EY, Vec3::ZERO);
            let c = algebroid_bracket(&a, &b, &p).unwrap();
            assert!((c.u1 + Vec3::EZ).norm() < 1e-15);
            assert!(c.u2.norm() < 1e-15);
        }
        // se(3) degeneration
        let a = AlgebroidElement::new(0.0, Vec3::ZERO, Vec3::EX);
        let b = AlgebroidElement::new(0.0, Vec3::ZERO, Vec3::EY);
        let c = algebroid_bracket(&a, &b, &p).unwrap();
        assert!(c.u1.norm() < 1e-15 && c.u2.norm() < 1e-15);
        // 2e/(m^3 k^2) = 1 at e = 1/2
        let a = AlgebroidElement::new(0.5, Vec3::ZERO, Vec3::EX);
        let b = AlgebroidElement::new(0.5, Vec3::ZERO, Vec3::EY);
        let c = algebroid_bracket(&a, &b, &p).unwrap();
        assert!((c.u1 - Vec3::EZ).norm() < 1e-15);
        assert!(c.u2.norm() < 1e-15);
    }

    #[test]
    fn algebroid_fibre_mismatch_rejected() {
        let p = unit();
        let a = AlgebroidElement::new(-0.5, Vec3::EX, Vec3::ZERO);
        let b = AlgebroidElement::new(0.5, Vec3::EY, Vec3::ZERO);
        assert!(matches!(
            algebroid_bracket(&a, &b, &p),
            Err(Error::FibreMismatch { .. })
        ));
    }

    fn rand_elem(rng: &mut rand_chacha::ChaCha8Rng, e: f64) -> AlgebroidElement {
        AlgebroidElement::new(
            e,
            Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }

    #[test]
    fn algebroid_antisymmetry_and_jacobi() {
        let p = unit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let e = rng.gen_range(-2.0..2.0);
            let a = rand_elem(&mut rng, e);
            let b = rand_elem(&mut rng, e);
            let c = rand_elem(&mut rng, e);
            let ab = algebroid_bracket(&a, &b, &p).unwrap();
            let ba = algebroid_bracket(&b, &a, &p).unwrap();
            assert!((ab.u1 + ba.u1).norm() < 1e-13);
            assert!((ab.u2 + ba.u2).norm() < 1e-13);
            let j1 = algebroid_bracket(&a, &algebroid_bracket(&b, &c, &p).unwrap(), &p).unwrap();
            let j2 = algebroid_bracket(&b, &algebroid_bracket(&c, &a, &p).unwrap(), &p).unwrap();
            let j3 = algebroid_bracket(&c, &algebroid_bracket(&a, &b, &p).unwrap(), &p).unwrap();
            assert!((j1.u1 + j2.u1 + j3.u1).norm() < 1e-13);
            assert!((j1.u2 + j2.u2 + j3.u2).norm() < 1e-13);
        }
    }

    #[test]
    fn poisson_table_at_worked_points() {
        let p = unit();
        for x in [circular(), elliptic(), PhasePointE::new(Vec3::EX, Vec3::new(0.3, 2.0, 0.1))] {
            let rows = poisson_table_check(x, &p).unwrap();
            assert_eq!(rows.len(), 15);
            for row in &rows {
                assert!(row.residual < 1e-6, "{}: {}", row.name, row.residual);
            }
        }
    }

    #[test]
    fn action_axiom_rotation_subalgebra() {
        let p = unit();
        let e = energy_momentum(circular(), &p).unwrap().energy;
        let a = AlgebroidElement::new(e, Vec3::EX, Vec3::ZERO);
        let b = AlgebroidElement::new(e, Vec3::EY, Vec3::ZERO);
        let r = action_bracket_check(&a, &b, circular(), &p).unwrap();
        assert!(r < 1e-5, "residual {r}");
        let r = action_bracket_check(&a, &a, circular(), &p).unwrap();
        assert!(r < 1e-9, "a=b residual {r}");
    }

    #[test]
    fn action_axiom_eps_closure() {
        let p = unit();
        let x = PhasePointE::new(Vec3::new(1.3, 0.2, -0.4), Vec3::new(0.1, 0.7, 0.2));
        let e = energy_momentum(x, &p).unwrap().energy;
        assert!(e < 0.0);
        let a = AlgebroidElement::new(e, Vec3::ZERO, Vec3::EX);
        let b = AlgebroidElement::new(e, Vec3::ZERO, Vec3::EY);
        let r = action_bracket_check(&a, &b, x, &p).unwrap();
        assert!(r < 1e-5, "residual {r}");
        // mixed element too
        let a = AlgebroidElement::new(e, Vec3::new(0.2, -0.5, 1.0), Vec3::new(0.7, 0.1, -0.3));
        let b = AlgebroidElement::new(e, Vec3::new(-0.9, 0.4, 0.2), Vec3::new(0.0, 0.8, 0.5));
        let r = action_bracket_check(&a, &b, x, &p).unwrap();
        assert!(r < 1e-5, "mixed residual {r}");
    }

    #[test]
    fn section_field_linearity() {
        let p = unit();
        let x = elliptic().to_state();
        let s = AlgebroidElement::new(-0.32, Vec3::new(0.3, -0.2, 0.9), Vec3::new(0.5, 0.1, -0.7));
        let scaled = AlgebroidElement::new(-0.32, s.u1 * 2.5, s.u2 * 2.5);
        let v = section_field(&s, &x, &p).unwrap();
        let w = section_field(&scaled, &x, &p).unwrap();
        for i in 0..6 {
            assert!((w[i] - 2.5 * v[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn section_field_of_l_generates_rotation() {
        // u1 = e_z pairs with Lz; its field at the circular point rotates
        // both r and p about e_z
        let p = unit();
        let v = section_field(
            &AlgebroidElement::new(-0.5, Vec3::EZ, Vec3::ZERO),
            &circular().to_state(),
            &p,
        )
        .unwrap();
        // r = e_x -> dr = e_z x r (up to the table's global sign)
        let dr = Vec3::new(v[0], v[1], v[2]);
        let dp = Vec3::new(v[3], v[4], v[5]);
        assert!(dr.cross(Vec3::EY).norm() < 1e-9, "dr = {dr:?}");
        assert!(dp.cross(Vec3::EX).norm() < 1e-9, "dp = {dp:?}");
    }
}
