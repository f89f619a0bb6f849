//! Linear algebra for the coupled two-head system.
//!
//! Unknowns are interleaved per cell (`2c` water head, `2c + 1` air head).
//! Each cell couples its two unknowns through a dense 2x2 block; neighbouring
//! cells couple only like phases, with the same coefficient in both rows.
//! The system is solved by BiCGSTAB, right-preconditioned with a block
//! diagonal ILU (DILU) that is exact ILU(0) for the five-point stencil.

#[derive(Debug, Clone)]
pub(crate) struct BlockSystem {
    pub nx: usize,
    pub ny: usize,
    /// Row-major 2x2 blocks `[ww, wa, aw, aa]`.
    pub diag: Vec<[f64; 4]>,
    /// Coupling between cell `c` and `c + 1`, per phase `[w, a]`.
    pub east: Vec<[f64; 2]>,
    /// Coupling between cell `c` and `c + nx`.
    pub north: Vec<[f64; 2]>,
}

impl BlockSystem {
    pub fn new(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Self { nx, ny, diag: vec![[0.0; 4]; n], east: vec![[0.0; 2]; n], north: vec![[0.0; 2]; n] }
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let d = &self.diag[c];
                let (xw, xa) = (x[2 * c], x[2 * c + 1]);
                let mut yw = d[0] * xw + d[1] * xa;
                let mut ya = d[2] * xw + d[3] * xa;
                if i + 1 < nx {
                    let e = self.east[c];
                    yw += e[0] * x[2 * (c + 1)];
                    ya += e[1] * x[2 * (c + 1) + 1];
                }
                if i > 0 {
                    let e = self.east[c - 1];
                    yw += e[0] * x[2 * (c - 1)];
                    ya += e[1] * x[2 * (c - 1) + 1];
                }
                if j + 1 < ny {
                    let e = self.north[c];
                    yw += e[0] * x[2 * (c + nx)];
                    ya += e[1] * x[2 * (c + nx) + 1];
                }
                if j > 0 {
                    let e = self.north[c - nx];
                    yw += e[0] * x[2 * (c - nx)];
                    ya += e[1] * x[2 * (c - nx) + 1];
                }
                y[2 * c] = yw;
                y[2 * c + 1] = ya;
            }
        }
    }
}

#[inline]
fn inv2(m: &[f64; 4]) -> Option<[f64; 4]> {
    let det = m[0] * m[3] - m[1] * m[2];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let r = 1.0 / det;
    Some([m[3] * r, -m[1] * r, -m[2] * r, m[0] * r])
}

#[inline]
fn mul2(m: &[f64; 4], v: [f64; 2]) -> [f64; 2] {
    [m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]]
}

pub(crate) struct Dilu {
    inv_diag: Vec<[f64; 4]>,
}

impl Dilu {
    pub fn factor(sys: &BlockSystem) -> Option<Self> {
        let (nx, ny) = (sys.nx, sys.ny);
        let mut inv_diag: Vec<[f64; 4]> = Vec::with_capacity(sys.cells());
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let mut d = sys.diag[c];
                // D_c -= diag(l) * Dinv_nb * diag(l) for west and south neighbours
                let mut sub = |nb: usize, l: [f64; 2]| {
                    let inv: &[f64; 4] = &inv_diag[nb];
                    d[0] -= l[0] * inv[0] * l[0];
                    d[1] -= l[0] * inv[1] * l[1];
                    d[2] -= l[1] * inv[2] * l[0];
                    d[3] -= l[1] * inv[3] * l[1];
                };
                if i > 0 {
                    sub(c - 1, sys.east[c - 1]);
                }
                if j > 0 {
                    sub(c - nx, sys.north[c - nx]);
                }
                inv_diag.push(inv2(&d)?);
            }
        }
        Some(Self { inv_diag })
    }

    pub fn apply(&self, sys: &BlockSystem, r: &[f64], z: &mut [f64]) {
        let (nx, ny) = (sys.nx, sys.ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let mut v = [r[2 * c], r[2 * c + 1]];
                if i > 0 {
                    let l = sys.east[c - 1];
                    v[0] -= l[0] * z[2 * (c - 1)];
                    v[1] -= l[1] * z[2 * (c - 1) + 1];
                }
                if j > 0 {
                    let l = sys.north[c - nx];
                    v[0] -= l[0] * z[2 * (c - nx)];
                    v[1] -= l[1] * z[2 * (c - nx) + 1];
                }
                let y = mul2(&self.inv_diag[c], v);
                z[2 * c] = y[0];
                z[2 * c + 1] = y[1];
            }
        }
        for j in (0..ny).rev() {
            for i in (0..nx).rev() {
                let c = j * nx + i;
                let mut v = [0.0; 2];
                if i + 1 < nx {
                    let u = sys.east[c];
                    v[0] += u[0] * z[2 * (c + 1)];
                    v[1] += u[1] * z[2 * (c + 1) + 1];
                }
                if j + 1 < ny {
                    let u = sys.north[c];
                    v[0] += u[0] * z[2 * (c + nx)];
                    v[1] += u[1] * z[2 * (c + nx) + 1];
                }
                if v != [0.0, 0.0] {
                    let corr = mul2(&self.inv_diag[c], v);
                    z[2 * c] -= corr[0];
                    z[2 * c + 1] -= corr[1];
                }
            }
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LinearReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `sys x = b` from a zero initial guess.
pub(crate) fn bicgstab(
    sys: &BlockSystem,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, LinearReport), String> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((x, LinearReport { iterations: 0, relative_residual: 0.0 }));
    }
    let pre = Dilu::factor(sys).ok_or_else(|| "singular diagonal block in preconditioner".to_string())?;
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let target = rel_tol * b_norm;

    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return Err(format!("BiCGSTAB breakdown (rho = {rho_new:e}) at iteration {it}"));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        pre.apply(sys, &p, &mut p_hat);
        sys.matvec(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 || !denom.is_finite() {
            return Err(format!("BiCGSTAB breakdown (r_hat.v = {denom:e}) at iteration {it}"));
        }
        alpha = rho_new / denom;
        // r now holds s = r - alpha v
        for k in 0..n {
            r[k] -= alpha * v[k];
        }
        if norm(&r) <= target {
            for k in 0..n {
                x[k] += alpha * p_hat[k];
            }
            return Ok((x, LinearReport { iterations: it, relative_residual: norm(&r) / b_norm }));
        }
        pre.apply(sys, &r, &mut s_hat);
        sys.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            return Err(format!("BiCGSTAB breakdown (t.t = {tt:e}) at iteration {it}"));
        }
        omega = dot(&t, &r) / tt;
        for k in 0..n {
            x[k] += alpha * p_hat[k] + omega * s_hat[k];
            r[k] -= omega * t[k];
        }
        let res = norm(&r);
        if res <= target {
            return Ok((x, LinearReport { iterations: it, relative_residual: res / b_norm }));
        }
        if omega == 0.0 {
            return Err(format!("BiCGSTAB stagnation (omega = 0) at iteration {it}"));
        }
        rho = rho_new;
    }
    Err(format!("BiCGSTAB did not reach {rel_tol:e} in {max_iter} iterations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_system(nx: usize, ny: usize, seed: u64) -> BlockSystem {
        let mut s = seed;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let mut sys = BlockSystem::new(nx, ny);
        for c in 0..nx * ny {
            sys.east[c] = [-rnd(), -rnd() * 0.1];
            sys.north[c] = [-rnd(), -rnd() * 0.1];
        }
        for c in 0..nx * ny {
            let off = 4.0;
            let coupling = rnd() * 0.5;
            sys.diag[c] = [off + rnd(), -coupling, -coupling * 0.3, 0.5 + rnd()];
        }
        sys
    }

    #[test]
    fn solves_random_diagonally_dominant_system() {
        let sys = random_system(7, 5, 42);
        let n = 2 * sys.cells();
        let x_true: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        sys.matvec(&x_true, &mut b);
        let (x, rep) = bicgstab(&sys, &b, 1e-13, 500).unwrap();
        assert!(rep.relative_residual <= 1e-13);
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn dilu_is_exact_for_one_dimensional_chain() {
        // a single row has no fill-in, so ILU(0) is the exact LU factorization
        let sys = random_system(9, 1, 7);
        let pre = Dilu::factor(&sys).unwrap();
        let n = 2 * sys.cells();
        let x_true: Vec<f64> = (0..n).map(|k| 1.0 + k as f64).collect();
        let mut b = vec![0.0; n];
        sys.matvec(&x_true, &mut b);
        let mut z = vec![0.0; n];
        pre.apply(&sys, &b, &mut z);
        for (a, e) in z.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-10, "{a} vs {e}");
        }
    }
}
