//! Dormand–Prince 5(4) and a fixed-step BDF2 for `y' = G y`.

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, Triplets};
use crate::C64;
use faer::linalg::solvers::SolveCore;
use faer::{Conj, Mat};

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            max_steps: 50_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive integrator state; `advance_to` lands exactly on each target.
pub struct DormandPrince<'a> {
    g: &'a CsrMatrix,
    ctl: StepControl,
    pub t: f64,
    pub y: Vec<C64>,
    h: f64,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    fresh: bool,
    pub steps: usize,
    pub rejected: usize,
}

impl<'a> DormandPrince<'a> {
    pub fn new(g: &'a CsrMatrix, y0: Vec<C64>, ctl: StepControl) -> Self {
        let n = y0.len();
        let z = || vec![C64::from(0.0); n];
        let norm = g.norm_inf().max(1e-300);
        let h = ctl.h_init.unwrap_or(0.5 / norm);
        Self {
            g,
            ctl,
            t: 0.0,
            y: y0,
            h,
            k: [z(), z(), z(), z(), z(), z(), z()],
            tmp: z(),
            fresh: true,
            steps: 0,
            rejected: 0,
        }
    }

    fn stage(&mut self, h: f64, coeffs: &[(usize, f64)], out: usize) {
        for (i, t) in self.tmp.iter_mut().enumerate() {
            let mut acc = self.y[i];
            for &(s, a) in coeffs {
                acc += self.k[s][i] * (h * a);
            }
            *t = acc;
        }
        let (tmp, k) = (&self.tmp, &mut self.k);
        self.g.matvec_into(tmp, &mut k[out]);
    }

    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if self.fresh {
            let (y, k) = (&self.y, &mut self.k);
            self.g.matvec_into(y, &mut k[0]);
            self.fresh = false;
        }
        while self.t < t_end {
            if self.steps >= self.ctl.max_steps {
                return Err(Error::Integrator(format!("step budget exhausted at t = {}", self.t)));
            }
            let remaining = t_end - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h <= 1e-14 * self.t.abs().max(1.0) && !last {
                return Err(Error::Integrator(format!("step size underflow at t = {}", self.t)));
            }
            self.stage(h, &[(0, A21)], 1);
            self.stage(h, &[(0, A31), (1, A32)], 2);
            self.stage(h, &[(0, A41), (1, A42), (2, A43)], 3);
            self.stage(h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
            self.stage(h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
            // 5th-order solution; its derivative goes to k[6]
            let mut ynew = vec![C64::from(0.0); self.y.len()];
            for (i, v) in ynew.iter_mut().enumerate() {
                *v = self.y[i]
                    + (self.k[0][i] * B1
                        + self.k[2][i] * B3
                        + self.k[3][i] * B4
                        + self.k[4][i] * B5
                        + self.k[5][i] * B6)
                        * h;
            }
            {
                let k = &mut self.k;
                self.g.matvec_into(&ynew, &mut k[6]);
            }
            let mut err: f64 = 0.0;
            for (i, yn) in ynew.iter().enumerate() {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * h;
                let sc = self.ctl.atol + self.ctl.rtol * self.y[i].norm().max(yn.norm());
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                return Err(Error::Integrator(format!("non-finite state at t = {}", self.t)));
            }
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = ynew;
                self.k.swap(0, 6);
                self.steps += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
            } else {
                self.rejected += 1;
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        Ok(())
    }
}

/// Fixed-step BDF2 with a trapezoidal first step. Both implicit systems
/// are factorized once.
pub struct Bdf2 {
    lu_bdf: faer::sparse::linalg::solvers::Lu<usize, C64>,
    lu_tr: faer::sparse::linalg::solvers::Lu<usize, C64>,
    g: CsrMatrix,
    pub h: f64,
    pub t: f64,
    pub y: Vec<C64>,
    prev: Option<Vec<C64>>,
}

fn shifted(g: &CsrMatrix, scale: f64) -> Result<faer::sparse::linalg::solvers::Lu<usize, C64>> {
    let mut t = Triplets::new(g.dim);
    for (r, c, v) in g.iter() {
        t.push(r, c, v * (-scale));
    }
    for i in 0..g.dim {
        t.push(i, i, C64::from(1.0));
    }
    t.into_csr()
        .to_faer()?
        .sp_lu()
        .map_err(|e| Error::Integrator(format!("implicit factorization: {e:?}")))
}

impl Bdf2 {
    pub fn new(g: &CsrMatrix, y0: Vec<C64>, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Integrator("BDF2 step must be > 0".into()));
        }
        Ok(Self {
            lu_bdf: shifted(g, 2.0 * h / 3.0)?,
            lu_tr: shifted(g, 0.5 * h)?,
            g: g.clone(),
            h,
            t: 0.0,
            y: y0,
            prev: None,
        })
    }

    fn solve(lu: &faer::sparse::linalg::solvers::Lu<usize, C64>, rhs: Vec<C64>) -> Vec<C64> {
        let n = rhs.len();
        let mut m = Mat::<C64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place_with_conj(Conj::No, m.as_mut());
        (0..n).map(|i| m[(i, 0)]).collect()
    }

    pub fn step(&mut self) {
        let next = match &self.prev {
            None => {
                let gy = self.g.matvec(&self.y);
                let rhs = self.y.iter().zip(&gy).map(|(a, b)| a + b * (0.5 * self.h)).collect();
                Self::solve(&self.lu_tr, rhs)
            }
            Some(p) => {
                let rhs = self
                    .y
                    .iter()
                    .zip(p)
                    .map(|(a, b)| a * (4.0 / 3.0) - b * (1.0 / 3.0))
                    .collect();
                Self::solve(&self.lu_bdf, rhs)
            }
        };
        self.prev = Some(std::mem::replace(&mut self.y, next));
        self.t += self.h;
    }

    /// Steps until `t_end` is reached; the target must lie on the step lattice.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let n = ((t_end - self.t) / self.h).round();
        if (self.t + n * self.h - t_end).abs() > 1e-9 * self.h.max(t_end.abs()) {
            return Err(Error::Integrator(format!(
                "time {t_end} is not a multiple of the BDF2 step {}",
                self.h
            )));
        }
        for _ in 0..n as usize {
            self.step();
        }
        self.t = t_end;
        Ok(())
    }
}
