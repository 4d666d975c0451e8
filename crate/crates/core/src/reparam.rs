//! Time reparametrization of conformally Hamiltonian fields: the sigma
//! function (closed Kepler form and generic numeric construction), the
//! affinity criterion, the conjugating map Xi, and resampling of solutions
//! onto the reparametrized time.

use crate::error::{Error, Result};
use crate::kepler::{KeplerParams, PhasePointE};
use crate::numerics::{gradient_fd, integrate_rk, FD_STEP};

/// An evaluable vector field on a phase-space domain.
pub trait FieldHandle: Sync {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Flow map by the adaptive integrator; closed-form overrides welcome.
    fn flow(&self, x: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
        integrate_rk(|s| self.eval(s), x, t, tol)
    }
}

/// A plain closure as a field.
pub struct FnField<F: Fn(&[f64]) -> Result<Vec<f64>> + Sync>(pub F);

impl<F: Fn(&[f64]) -> Result<Vec<f64>> + Sync> FieldHandle for FnField<F> {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.0)(x)
    }
}

/// The Kepler field as a FieldHandle over flat 6-component states.
pub struct KeplerField {
    pub params: KeplerParams,
}

impl FieldHandle for KeplerField {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = crate::kepler::kepler_vector_field(PhasePointE::from_state(x), &self.params)?;
        Ok(d.to_array().to_vec())
    }
}

/// Y = g X with a nowhere vanishing factor g.
pub struct ConformalField<'a> {
    pub base: &'a dyn FieldHandle,
    pub factor: &'a (dyn Fn(&[f64]) -> Result<f64> + Sync),
}

impl<'a> FieldHandle for ConformalField<'a> {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = (self.factor)(x)?;
        if g == 0.0 {
            return Err(Error::Domain("conformal factor vanished".into()));
        }
        let v = self.base.eval(x)?;
        Ok(v.into_iter().map(|c| g * c).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaKind {
    ClosedForm,
    Numeric,
}

/// An evaluable (t, x) -> sigma(t, x) whose derivative along solutions of
/// the conformal field equals the factor g.
pub trait SigmaFunction: Sync {
    fn eval(&self, t: f64, x: &[f64]) -> Result<f64>;
    fn kind(&self) -> SigmaKind;
}

/// sigma(t, r, p) = (p.r - 2 E t) / (mk); d sigma / dt = 1/r along orbits.
pub fn sigma_kepler(t: f64, x: PhasePointE, params: &KeplerParams) -> Result<f64> {
    x.check_radius()?;
    let e = crate::kepler::energy_momentum(x, params)?.energy;
    Ok((x.p.dot(x.r) - 2.0 * e * t) / (params.m * params.k))
}

/// The closed Kepler form as a SigmaFunction over flat states.
pub struct KeplerSigma {
    pub params: KeplerParams,
}

impl SigmaFunction for KeplerSigma {
    fn eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        sigma_kepler(t, PhasePointE::from_state(x), &self.params)
    }
    fn kind(&self) -> SigmaKind {
        SigmaKind::ClosedForm
    }
}

/// Generic construction: sigma(t,x) = sigma_t0(Phi_X(t0-t, x))
/// + integral over [t0, t] of g(Phi_X(tau-t, x)) d tau.
pub struct NumericSigma<'a> {
    pub field: &'a dyn FieldHandle,
    pub factor: &'a (dyn Fn(&[f64]) -> Result<f64> + Sync),
    pub sigma_t0: &'a (dyn Fn(&[f64]) -> Result<f64> + Sync),
    pub t0: f64,
    /// RK tolerance; the quadrature tolerance is slaved to it.
    pub tol: f64,
}

pub fn sigma_numeric<'a>(
    sigma_t0: &'a (dyn Fn(&[f64]) -> Result<f64> + Sync),
    factor: &'a (dyn Fn(&[f64]) -> Result<f64> + Sync),
    field: &'a dyn FieldHandle,
    t0: f64,
    tol: f64,
) -> NumericSigma<'a> {
    NumericSigma { field, factor, sigma_t0, t0, tol }
}

impl<'a> SigmaFunction for NumericSigma<'a> {
    fn eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        let back = self.field.flow(x, self.t0 - t, self.tol)?;
        let base = (self.sigma_t0)(&back)?;
        let integrand = |tau: f64| -> Result<f64> {
            let y = self.field.flow(x, tau - t, self.tol)?;
            (self.factor)(&y)
        };
        let quad = adaptive_simpson(&integrand, self.t0, t, self.tol)?;
        Ok(base + quad)
    }
    fn kind(&self) -> SigmaKind {
        SigmaKind::Numeric
    }
}

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol.max(1e-15), 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 {
        return Err(Error::Domain("quadrature recursion limit reached".into()));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Both readings of the affinity criterion, sampled along one orbit.
#[derive(Debug, Clone, Copy)]
pub struct AffinityReport {
    /// max - min of (g - L_X sigma_t0), the recomputed criterion.
    pub defect: f64,
    /// mean of the sampled (g - L_X sigma_t0).
    pub mean: f64,
    /// max - min of L_X (g - sigma_t0), the literal reading.
    pub literal_defect: f64,
}

/// Sample (g - L_X sigma_t0) at n points along the orbit of X from x over
/// [0, T]; the Lie derivative is a finite-difference directional derivative.
pub fn affinity_report(
    factor: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    sigma_t0: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    field: &dyn FieldHandle,
    x: &[f64],
    t_span: f64,
    n: usize,
    tol: f64,
) -> Result<AffinityReport> {
    if n < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let lie = |f: &(dyn Fn(&[f64]) -> Result<f64> + Sync), y: &[f64]| -> Result<f64> {
        let grad = gradient_fd(|z| f(z), y, FD_STEP)?;
        let v = field.eval(y)?;
        Ok(grad.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
    };
    let dt = t_span / (n - 1) as f64;
    let mut y = x.to_vec();
    let mut primary = Vec::with_capacity(n);
    let mut literal = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            y = field.flow(&y, dt, tol)?;
        }
        let g = factor(&y)?;
        primary.push(g - lie(sigma_t0, &y)?);
        literal.push(lie(&|z: &[f64]| Ok(factor(z)? - sigma_t0(z)?), &y)?);
    }
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(AffinityReport {
        defect: spread(&primary),
        mean: primary.iter().sum::<f64>() / n as f64,
        literal_defect: spread(&literal),
    })
}

/// The recomputed affinity defect alone.
pub fn affinity_defect(
    factor: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    sigma_t0: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    field: &dyn FieldHandle,
    x: &[f64],
    t_span: f64,
    n: usize,
    tol: f64,
) -> Result<f64> {
    Ok(affinity_report(factor, sigma_t0, field, x, t_span, n, tol)?.defect)
}

/// Xi(x) = Phi_X(-sigma(0, x), x).
pub fn xi_map(
    x: &[f64],
    sigma: &dyn SigmaFunction,
    field: &dyn FieldHandle,
    tol: f64,
) -> Result<Vec<f64>> {
    let s0 = sigma.eval(0.0, x)?;
    if !s0.is_finite() {
        return Err(Error::Domain("sigma(0, x) is not finite".into()));
    }
    field.flow(x, -s0, tol)
}

/// The time-t slice of the graph map: x -> Phi_X(t - sigma(t, x), x).
/// Reduces to xi_map at t = 0 and carries the flow intertwining in general.
pub fn xi_map_at(
    t: f64,
    x: &[f64],
    sigma: &dyn SigmaFunction,
    field: &dyn FieldHandle,
    tol: f64,
) -> Result<Vec<f64>> {
    let s = sigma.eval(t, x)?;
    if !s.is_finite() {
        return Err(Error::Domain("sigma(t, x) is not finite".into()));
    }
    field.flow(x, t - s, tol)
}

/// Piecewise cubic Hermite interpolant of a curve s -> x(s).
pub struct HermiteCurve {
    s: Vec<f64>,
    x: Vec<Vec<f64>>,
    dx: Vec<Vec<f64>>,
}

impl HermiteCurve {
    pub fn s_range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let n = self.s.len();
        // locate the bracketing segment, clamping at the ends
        let mut i = match self.s.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(j) => j,
            Err(j) => j.saturating_sub(1),
        };
        if i >= n - 1 {
            i = n - 2;
        }
        let h = self.s[i + 1] - self.s[i];
        let th = (s - self.s[i]) / h;
        let t2 = th * th;
        let t3 = t2 * th;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + th;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (0..self.x[i].len())
            .map(|c| {
                h00 * self.x[i][c]
                    + h10 * h * self.dx[i][c]
                    + h01 * self.x[i + 1][c]
                    + h11 * h * self.dx[i + 1][c]
            })
            .collect()
    }
}

/// Build the interpolant of psi(s) = phi(sigma_phi^{-1}(s)) from samples of
/// phi, using the target field for the slopes dpsi/ds = X(psi).
pub fn reparametrized_curve(
    phi: &[(f64, Vec<f64>)],
    sigma: &dyn SigmaFunction,
    field: &dyn FieldHandle,
) -> Result<HermiteCurve> {
    if phi.len() < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let mut s = Vec::with_capacity(phi.len());
    for (t, x) in phi {
        s.push(sigma.eval(*t, x)?);
    }
    let increasing = s[1] > s[0];
    for w in s.windows(2) {
        if (w[1] > w[0]) != increasing || w[1] == w[0] {
            return Err(Error::NonMonotone);
        }
    }
    let mut xs: Vec<Vec<f64>> = phi.iter().map(|(_, x)| x.clone()).collect();
    let mut dxs: Vec<Vec<f64>> = Vec::with_capacity(phi.len());
    for (_, x) in phi {
        dxs.push(field.eval(x)?);
    }
    let mut s = s;
    if !increasing {
        s.reverse();
        xs.reverse();
        dxs.reverse();
    }
    Ok(HermiteCurve { s, x: xs, dx: dxs })
}

/// Resample a solution of the conformal equation onto n equally spaced
/// values of the reparametrized time s.
pub fn reparametrized_solution(
    phi: &[(f64, Vec<f64>)],
    sigma: &dyn SigmaFunction,
    field: &dyn FieldHandle,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let curve = reparametrized_curve(phi, sigma, field)?;
    let (s0, s1) = curve.s_range();
    let n = phi.len();
    Ok((0..n)
        .map(|i| {
            let s = s0 + (s1 - s0) * i as f64 / (n - 1) as f64;
            (s, curve.eval(s))
        })
        .collect())
}
