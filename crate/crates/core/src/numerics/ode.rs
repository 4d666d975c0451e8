use crate::error::{Error, Result};

/// Dormand-Prince 5(4) embedded pair with a PI step-size controller.
///
/// Local error is controlled against `tol` (used for both the absolute and
/// relative parts); the result is deterministic for fixed inputs.
pub fn integrate_rk<F>(field: F, x0: &[f64], t: f64, tol: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if t == 0.0 {
        return Ok(x0.to_vec());
    }
    let dir = t.signum();
    let t_end = t.abs();
    let n = x0.len();

    // Butcher tableau of DOPRI5 (FSAL).
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // 5th-order weights coincide with the last row of A (FSAL).
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        let v = field(x)?;
        debug_assert_eq!(v.len(), n);
        Ok(v)
    };

    let mut x = x0.to_vec();
    let mut tau = 0.0_f64;
    let mut k0 = eval(&x)?;

    // initial step from the field magnitude at x0
    let f_norm = k0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut h = (0.01 * (x_norm.max(1.0) / f_norm.max(1e-8))).min(t_end).max(1e-10);

    // PI controller state
    let mut err_prev = 1.0_f64;
    const ALPHA: f64 = 0.7 / 5.0;
    const BETA: f64 = 0.4 / 5.0;
    const SAFETY: f64 = 0.9;
    const MAX_STEPS: usize = 2_000_000;

    let mut stages = vec![vec![0.0; n]; 7];
    for _ in 0..MAX_STEPS {
        if tau >= t_end {
            return Ok(x);
        }
        if h < 1e-14 * t_end.max(1.0) {
            return Err(Error::StepSizeCollapse { t: dir * tau, h });
        }
        let mut last = tau + h >= t_end;
        if last {
            h = t_end - tau;
        }

        stages[0].copy_from_slice(&k0);
        let mut step_failed_domain = false;
        for s in 1..7 {
            let mut xs = x.clone();
            for j in 0..s {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..n {
                        xs[i] += dir * h * a * stages[j][i];
                    }
                }
            }
            let _ = C[s];
            match eval(&xs) {
                Ok(v) => stages[s] = v,
                Err(Error::Collision { .. }) | Err(Error::Domain(_)) => {
                    // the stage stepped out of the field's domain: retry smaller
                    step_failed_domain = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if step_failed_domain {
            h *= 0.25;
            last = false;
            let _ = last;
            if h < 1e-14 * t_end.max(1.0) {
                return Err(Error::StepSizeCollapse { t: dir * tau, h });
            }
            continue;
        }

        let mut x5 = x.clone();
        let mut err = 0.0_f64;
        for i in 0..n {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for s in 0..7 {
                acc5 += B5[s] * stages[s][i];
                acc4 += B4[s] * stages[s][i];
            }
            x5[i] = x[i] + dir * h * acc5;
            let sc = tol + tol * x[i].abs().max(x5[i].abs());
            let e = dir * h * (acc5 - acc4) / sc;
            err += e * e;
        }
        let err = (err / n as f64).sqrt().max(1e-30);

        if err <= 1.0 {
            tau += h;
            x = x5;
            // FSAL: stage 6 was evaluated at the accepted point
            k0.copy_from_slice(&stages[6]);
            let fac = SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h *= (SAFETY * err.powf(-ALPHA)).clamp(0.1, 1.0);
        }
    }
    Err(Error::Domain("integrator exceeded the step budget".into()))
}

/// Integrate and sample the solution at `n_samples` equally spaced times in
/// [0, t], including both endpoints when n_samples > 1.
pub fn integrate_path<F>(field: F, x0: &[f64], t: f64, tol: f64, n_samples: usize) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Copy,
{
    let mut out = Vec::with_capacity(n_samples.max(1));
    out.push((0.0, x0.to_vec()));
    if n_samples <= 1 || t == 0.0 {
        return Ok(out);
    }
    let dt = t / (n_samples - 1) as f64;
    let mut x = x0.to_vec();
    for i in 1..n_samples {
        x = integrate_rk(field, &x, dt, tol)?;
        out.push((dt * i as f64, x.clone()));
    }
    Ok(out)
}
