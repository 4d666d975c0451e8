use crate::error::Result;

/// Default central-difference step, scale-adapted per coordinate.
pub const FD_STEP: f64 = 1e-5;

/// Global sign of the coordinate Poisson bracket, frozen once against the
/// table entry {Lx, Ly} = -Lz with L = r x p. With this sign the Hamiltonian
/// vector field of a function f is (df/dp, -df/dr) and the Kepler field is
/// the Hamiltonian field of the energy.
pub const BRACKET_SIGN: f64 = -1.0;

/// Small dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn scaled_step(step: f64, xi: f64) -> f64 {
    step * xi.abs().max(1.0)
}

/// Central-difference Jacobian of a point-to-point map; column i holds
/// (map(x + h e_i) - map(x - h e_i)) / (2 h) with h scale-adapted to x_i.
pub fn jacobian_fd<F>(map: F, x: &[f64], step: f64) -> Result<Mat>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut out: Option<Mat> = None;
    for i in 0..n {
        let h = scaled_step(step, x[i]);
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        // divide by the realized spacing, not 2h: the rounded endpoints
        // x_i +- h need not be symmetric
        let span = xp[i] - xm[i];
        let fp = map(&xp)?;
        let fm = map(&xm)?;
        let m = out.get_or_insert_with(|| Mat::zeros(fp.len(), n));
        for r in 0..fp.len() {
            m[(r, i)] = (fp[r] - fm[r]) / span;
        }
        xp[i] = x[i];
        xm[i] = x[i];
    }
    Ok(out.unwrap_or_else(|| Mat::zeros(0, n)))
}

/// Central-difference gradient of a scalar field.
pub fn gradient_fd<F>(f: F, x: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len();
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let h = scaled_step(step, x[i]);
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        grad[i] = (f(&xp)? - f(&xm)?) / (xp[i] - xm[i]);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    Ok(grad)
}

/// Finite-difference Poisson bracket of two scalar fields on a 2n-dimensional
/// phase state (first n coordinates positions, last n momenta), with the
/// frozen global sign `BRACKET_SIGN`.
pub fn poisson_bracket_fd<F, G>(f: F, g: G, x: &[f64], step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len() / 2;
    let df = gradient_fd(&f, x, step)?;
    let dg = gradient_fd(&g, x, step)?;
    let mut acc = 0.0;
    for i in 0..n {
        acc += df[i] * dg[n + i] - df[n + i] * dg[i];
    }
    Ok(BRACKET_SIGN * acc)
}
