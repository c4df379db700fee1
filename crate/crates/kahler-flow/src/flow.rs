use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::moment::{grad_f, moment};
use crate::rep::{CartanSpec, HermitianRep, StatePoint};
use crate::{KahlerError, Result};

const SEMISTABLE_PHI_TOL: f64 = 1e-6;
const XI_SPAN_TOL: f64 = 1e-6;

/// Cap on |generator eigenvalue| * step while a group block is tracked.
/// The error estimator stops seeing coefficients once they fall under
/// atol, yet the polar logarithm still reads their decay rates, so the
/// step must stay small enough that a pure exponential is tracked to
/// ~1e-5 per unit time on its own. The local defect of the fifth order
/// scheme on exp(z) is about z^6/3600, so z = 0.5 keeps the drift of
/// the dead logarithms at the 1e-5 level and the live components are
/// already held far tighter by the relative tolerance.
const STEP_RATE_CAP: f64 = 0.5;
/// Once the singular value spread of a renormalized group block exceeds
/// this ratio, its logarithm is dominated by rounding, so checkpoint
/// recording stops and the limit direction is read from earlier times.
const DEGENERACY_RATIO: f64 = 1e-250;
const H_MIN_FACTOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOpts {
    /// Gradient norm at which the flow counts as converged.
    pub tol_grad: f64,
    /// Time horizon; reaching it without convergence is an error
    /// carrying the partial result.
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Initial step size.
    pub h0: f64,
    /// Integrate the group trajectory alongside the state. Without it
    /// the limit direction is reported as the limit moment value.
    pub track_group: bool,
    /// Accepted steps over which an energy change below
    /// stagnation_delta also counts as converged.
    pub stagnation_window: usize,
    pub stagnation_delta: f64,
}

impl Default for FlowOpts {
    fn default() -> Self {
        FlowOpts {
            tol_grad: 1e-8,
            t_max: 1e4,
            rtol: 1e-9,
            atol: 1e-12,
            h0: 1e-3,
            track_group: true,
            stagnation_window: 100,
            stagnation_delta: 1e-16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub f: f64,
    pub phi_norm: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowResult {
    pub x_inf: StatePoint,
    pub phi_inf: Vec<f64>,
    /// Dominant representative of phi_inf under the declared folding.
    pub beta: Vec<f64>,
    pub m_estimate: f64,
    pub grad_norm_final: f64,
    /// Asymptotic one-parameter direction of the group trajectory,
    /// from the slope of the polar logarithm between the last two
    /// checkpoints. Equals phi_inf when tracking is disabled.
    pub xi_inf: Vec<f64>,
    /// Distance between the slope estimate and the single-time secant;
    /// absent when fewer than two checkpoints were available.
    pub xi_uncertainty: Option<f64>,
    pub t_final: f64,
    pub steps: usize,
    pub rejections: usize,
    pub trajectory: Vec<TrajectorySample>,
    /// Terminal companion group element per part: the renormalized
    /// matrix in row-major [re, im] pairs and the accumulated log of
    /// the removed scales. Empty when tracking is disabled.
    pub group_v: Vec<Vec<[f64; 2]>>,
    pub log_scale_v: f64,
    pub group_e: Vec<Vec<[f64; 2]>>,
    pub log_scale_e: f64,
}

impl FlowResult {
    /// Terminal group blocks as matrices, with their log scales.
    pub fn group_matrices(&self) -> Option<(DMatrix<Complex64>, f64, DMatrix<Complex64>, f64)> {
        if self.group_e.is_empty() {
            return None;
        }
        let unpack = |rows: &[Vec<[f64; 2]>]| {
            let n = rows.len();
            DMatrix::from_fn(n, n, |r, c| {
                let [re, im] = rows[r][c];
                Complex64::new(re, im)
            })
        };
        Some((
            unpack(&self.group_v),
            self.log_scale_v,
            unpack(&self.group_e),
            self.log_scale_e,
        ))
    }
}

struct Layout {
    dv: usize,
    de: usize,
    track: bool,
}

impl Layout {
    fn o_m(&self) -> usize {
        2 * self.dv
    }
    fn o_gv(&self) -> usize {
        2 * (self.dv + self.de)
    }
    fn o_ge(&self) -> usize {
        self.o_gv() + 2 * self.dv * self.dv
    }
    fn len(&self) -> usize {
        if self.track {
            self.o_ge() + 2 * self.de * self.de
        } else {
            self.o_gv()
        }
    }
}

fn read_c(y: &[f64], off: usize, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::new(y[off + 2 * i], y[off + 2 * i + 1]))
        .collect()
}

fn write_c(y: &mut [f64], off: usize, z: &[Complex64]) {
    for (i, c) in z.iter().enumerate() {
        y[off + 2 * i] = c.re;
        y[off + 2 * i + 1] = c.im;
    }
}

fn read_mat(y: &[f64], off: usize, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_vec(n, n, read_c(y, off, n * n))
}

fn state_of(lay: &Layout, y: &[f64]) -> StatePoint {
    StatePoint {
        v: read_c(y, 0, lay.dv),
        m: read_c(y, lay.o_m(), lay.de),
    }
}

fn deriv(rep: &HermitianRep, lay: &Layout, y: &[f64]) -> Result<Vec<f64>> {
    let x = state_of(lay, y);
    let g = grad_f(rep, &x)?;
    let mut dy = vec![0.0; lay.len()];
    let neg_v: Vec<Complex64> = g.v.iter().map(|z| -z).collect();
    let neg_m: Vec<Complex64> = g.m.iter().map(|z| -z).collect();
    write_c(&mut dy, 0, &neg_v);
    write_c(&mut dy, lay.o_m(), &neg_m);
    if lay.track {
        let phi = moment(rep, &x)?;
        let minus_i = Complex64::new(0.0, -1.0);
        if lay.dv > 0 {
            let gen_v = rep.combine_v(&phi) * minus_i;
            let dgv = gen_v * read_mat(y, lay.o_gv(), lay.dv);
            write_c(&mut dy, lay.o_gv(), dgv.as_slice());
        }
        let gen_e = rep.combine_e(&phi) * minus_i;
        let dge = gen_e * read_mat(y, lay.o_ge(), lay.de);
        write_c(&mut dy, lay.o_ge(), dge.as_slice());
    }
    Ok(dy)
}

fn combo(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (w, k) in terms {
        for (o, d) in out.iter_mut().zip(*k) {
            *o += h * w * d;
        }
    }
    out
}

/// Matrix logarithm of a positive Hermitian matrix, with the ratio of
/// extreme eigenvalues reported so degenerate blocks can be rejected.
fn spectral_bound(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = m * Complex64::new(0.0, -1.0);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()))
}

fn hermitian_log(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, f64) {
    if m.nrows() == 0 {
        return (m.clone(), 1.0);
    }
    let eig = m.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let bottom = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    let diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        Complex64::new(l.max(f64::MIN_POSITIVE).ln(), 0.0)
    }));
    let log = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
    (log, bottom / top.max(f64::MIN_POSITIVE))
}

/// Coordinates of the polar logarithm of the group trajectory in the
/// algebra basis, or None once a block is numerically degenerate.
fn group_log_coords(
    rep: &HermitianRep,
    lay: &Layout,
    y: &[f64],
    s_v: f64,
    s_e: f64,
) -> Result<Option<Vec<f64>>> {
    let build = |off: usize, n: usize, s: f64| -> Option<DMatrix<Complex64>> {
        let g = read_mat(y, off, n);
        let (half_log, ratio) = hermitian_log(&(&g * g.adjoint()));
        if ratio < DEGENERACY_RATIO {
            return None;
        }
        let mut l = half_log * Complex64::new(0.5, 0.0);
        for i in 0..n {
            l[(i, i)] += Complex64::new(s, 0.0);
        }
        Some(l)
    };
    let lv = match build(lay.o_gv(), lay.dv, s_v) {
        Some(l) => l,
        None => return Ok(None),
    };
    let le = match build(lay.o_ge(), lay.de, s_e) {
        Some(l) => l,
        None => return Ok(None),
    };
    let minus_i = Complex64::new(0.0, -1.0);
    let scale = (lv.norm().powi(2) + le.norm().powi(2)).sqrt().max(1.0);
    let (coords, residual) = rep.project_onto_span(&(&lv * minus_i), &(&le * minus_i));
    let rel = residual / scale;
    if rel > XI_SPAN_TOL {
        return Err(KahlerError::XiResidual { residual: rel });
    }
    Ok(Some(coords))
}

struct Driver<'a> {
    rep: &'a HermitianRep,
    cartan: &'a CartanSpec,
    opts: &'a FlowOpts,
    lay: Layout,
    y: Vec<f64>,
    t: f64,
    s_v: f64,
    s_e: f64,
    steps: usize,
    rejections: usize,
    trajectory: Vec<TrajectorySample>,
    f_history: Vec<f64>,
    checkpoints: Vec<(f64, Vec<f64>)>,
    group_degenerate: bool,
    next_checkpoint: f64,
    gen_bounds: Vec<f64>,
    stiff_rate: f64,
}

impl<'a> Driver<'a> {
    fn record_sample(&mut self) -> Result<TrajectorySample> {
        let x = state_of(&self.lay, &self.y);
        let phi = moment(self.rep, &x)?;
        let g = grad_f(self.rep, &x)?;
        let phi_norm = phi.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.stiff_rate = phi
            .iter()
            .zip(&self.gen_bounds)
            .map(|(p, b)| p.abs() * b)
            .sum();
        let sample = TrajectorySample {
            t: self.t,
            f: 0.5 * phi_norm * phi_norm,
            phi_norm,
            grad_norm: g.norm(),
        };
        self.trajectory.push(sample.clone());
        self.f_history.push(sample.f);
        Ok(sample)
    }

    fn renormalize(&mut self) {
        let m = read_c(&self.y, self.lay.o_m(), self.lay.de);
        let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scaled: Vec<Complex64> = m.iter().map(|z| z / norm).collect();
        write_c(&mut self.y, self.lay.o_m(), &scaled);
        if self.lay.track {
            for (off, n, s) in [
                (self.lay.o_gv(), self.lay.dv, &mut self.s_v),
                (self.lay.o_ge(), self.lay.de, &mut self.s_e),
            ] {
                if n == 0 {
                    continue;
                }
                let g = read_mat(&self.y, off, n);
                let fro = g.norm();
                if fro > 0.0 {
                    let scaled = g / Complex64::new(fro, 0.0);
                    write_c(&mut self.y, off, scaled.as_slice());
                    *s += fro.ln();
                }
            }
        }
    }

    fn maybe_checkpoint(&mut self, force: bool) -> Result<()> {
        if !self.lay.track || self.group_degenerate || self.t == 0.0 {
            return Ok(());
        }
        if !force && self.t < self.next_checkpoint {
            return Ok(());
        }
        if let Some((last_t, _)) = self.checkpoints.last() {
            if self.t <= last_t * (1.0 + 1e-12) {
                return Ok(());
            }
        }
        match group_log_coords(self.rep, &self.lay, &self.y, self.s_v, self.s_e)? {
            Some(coords) => {
                self.checkpoints.push((self.t, coords));
                self.next_checkpoint = (1.5 * self.t).max(1.0);
            }
            None => {
                self.group_degenerate = true;
            }
        }
        Ok(())
    }

    fn stagnated(&self) -> bool {
        let n = self.f_history.len();
        let w = self.opts.stagnation_window;
        n > w && (self.f_history[n - 1 - w] - self.f_history[n - 1]).abs() < self.opts.stagnation_delta
    }

    fn assemble(&mut self, grad_norm_final: f64) -> Result<FlowResult> {
        self.maybe_checkpoint(true)?;
        let x_inf = state_of(&self.lay, &self.y).renormalized();
        let phi_inf = moment(self.rep, &x_inf)?;
        let m_estimate = phi_inf.iter().map(|c| c * c).sum::<f64>().sqrt();
        let beta = self.cartan.dominant(&phi_inf);
        let (xi_inf, xi_uncertainty) = match self.checkpoints.len() {
            0 => (phi_inf.clone(), None),
            1 => {
                let (t, c) = &self.checkpoints[0];
                (c.iter().map(|v| -v / t).collect(), None)
            }
            n => {
                let (t1, c1) = &self.checkpoints[n - 2];
                let (t2, c2) = &self.checkpoints[n - 1];
                let dt = t2 - t1;
                let xi: Vec<f64> = c1
                    .iter()
                    .zip(c2)
                    .map(|(a, b)| -(b - a) / dt)
                    .collect();
                let unc = xi
                    .iter()
                    .zip(c2)
                    .map(|(x, c)| (x + c / t2).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (xi, Some(unc))
            }
        };
        let pack = |off: usize, n: usize| -> Vec<Vec<[f64; 2]>> {
            let g = read_mat(&self.y, off, n);
            (0..n)
                .map(|r| (0..n).map(|c| [g[(r, c)].re, g[(r, c)].im]).collect())
                .collect()
        };
        let (group_v, group_e) = if self.lay.track {
            (pack(self.lay.o_gv(), self.lay.dv), pack(self.lay.o_ge(), self.lay.de))
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(FlowResult {
            x_inf,
            phi_inf,
            beta,
            m_estimate,
            grad_norm_final,
            xi_inf,
            xi_uncertainty,
            t_final: self.t,
            steps: self.steps,
            rejections: self.rejections,
            trajectory: std::mem::take(&mut self.trajectory),
            group_v,
            log_scale_v: self.s_v,
            group_e,
            log_scale_e: self.s_e,
        })
    }
}

/// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
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
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Gradient flow of the moment norm-square from the given state, with
/// adaptive Runge-Kutta time stepping. The projective part is kept on
/// the unit sphere and the companion group blocks are rescaled each
/// accepted step, with the scale folded back in when the limit
/// direction is read off.
pub fn flow(
    rep: &HermitianRep,
    x: &StatePoint,
    cartan: &CartanSpec,
    opts: &FlowOpts,
) -> Result<FlowResult> {
    rep.validate_state(x)?;
    cartan.validate(rep.d())?;
    let x = x.renormalized();
    let lay = Layout {
        dv: rep.dim_v(),
        de: rep.dim_e(),
        track: opts.track_group,
    };
    let mut y = vec![0.0; lay.len()];
    write_c(&mut y, 0, &x.v);
    write_c(&mut y, lay.o_m(), &x.m);
    if lay.track {
        let id_v = DMatrix::<Complex64>::identity(lay.dv, lay.dv);
        let id_e = DMatrix::<Complex64>::identity(lay.de, lay.de);
        write_c(&mut y, lay.o_gv(), id_v.as_slice());
        write_c(&mut y, lay.o_ge(), id_e.as_slice());
    }

    let gen_bounds: Vec<f64> = (0..rep.d())
        .map(|k| spectral_bound(rep.act_v(k)).max(spectral_bound(rep.act_e(k))))
        .collect();
    let mut driver = Driver {
        rep,
        cartan,
        opts,
        lay,
        y,
        t: 0.0,
        s_v: 0.0,
        s_e: 0.0,
        steps: 0,
        rejections: 0,
        trajectory: Vec::new(),
        f_history: Vec::new(),
        checkpoints: Vec::new(),
        group_degenerate: false,
        next_checkpoint: 1.0,
        gen_bounds,
        stiff_rate: 0.0,
    };

    let start = driver.record_sample()?;
    if start.grad_norm <= opts.tol_grad {
        return driver.assemble(start.grad_norm);
    }

    let mut h = opts.h0;
    loop {
        let k1 = deriv(rep, &driver.lay, &driver.y)?;
        let k2 = deriv(rep, &driver.lay, &combo(&driver.y, h, &[(A[0][0], &k1)]))?;
        let k3 = deriv(
            rep,
            &driver.lay,
            &combo(&driver.y, h, &[(A[1][0], &k1), (A[1][1], &k2)]),
        )?;
        let k4 = deriv(
            rep,
            &driver.lay,
            &combo(
                &driver.y,
                h,
                &[(A[2][0], &k1), (A[2][1], &k2), (A[2][2], &k3)],
            ),
        )?;
        let k5 = deriv(
            rep,
            &driver.lay,
            &combo(
                &driver.y,
                h,
                &[
                    (A[3][0], &k1),
                    (A[3][1], &k2),
                    (A[3][2], &k3),
                    (A[3][3], &k4),
                ],
            ),
        )?;
        let k6 = deriv(
            rep,
            &driver.lay,
            &combo(
                &driver.y,
                h,
                &[
                    (A[4][0], &k1),
                    (A[4][1], &k2),
                    (A[4][2], &k3),
                    (A[4][3], &k4),
                    (A[4][4], &k5),
                ],
            ),
        )?;
        let y5 = combo(
            &driver.y,
            h,
            &[
                (A[5][0], &k1),
                (A[5][1], &k2),
                (A[5][2], &k3),
                (A[5][3], &k4),
                (A[5][4], &k5),
                (A[5][5], &k6),
            ],
        );
        let k7 = deriv(rep, &driver.lay, &y5)?;
        let stages: [&[f64]; 7] = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let y4 = combo(
            &driver.y,
            h,
            &stages
                .iter()
                .enumerate()
                .map(|(i, k)| (B4[i], *k))
                .collect::<Vec<_>>(),
        );

        let mut acc = 0.0;
        for i in 0..y5.len() {
            let scale = opts.atol + opts.rtol * driver.y[i].abs().max(y5[i].abs());
            let d = (y5[i] - y4[i]) / scale;
            acc += d * d;
        }
        let err = (acc / y5.len() as f64).sqrt();

        if err <= 1.0 {
            driver.t += h;
            driver.y = y5;
            driver.steps += 1;
            driver.renormalize();
            let sample = driver.record_sample()?;
            driver.maybe_checkpoint(false)?;
            if sample.grad_norm <= opts.tol_grad || driver.stagnated() {
                return driver.assemble(sample.grad_norm);
            }
            if driver.t >= opts.t_max {
                let partial = driver.assemble(sample.grad_norm)?;
                return Err(KahlerError::NonConverged {
                    t_final: partial.t_final,
                    grad_norm: sample.grad_norm,
                    partial: Box::new(partial),
                });
            }
            let factor = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h *= factor;
            if driver.lay.track && driver.stiff_rate > 0.0 {
                h = h.min(STEP_RATE_CAP / driver.stiff_rate);
            }
        } else {
            driver.rejections += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < H_MIN_FACTOR * driver.t.max(1.0) {
            return Err(KahlerError::StepUnderflow { t: driver.t });
        }
    }
}

/// Whether the flow from the given state reaches a zero of the moment
/// map.
pub fn semistable_flow(
    rep: &HermitianRep,
    x: &StatePoint,
    cartan: &CartanSpec,
    opts: &FlowOpts,
) -> Result<bool> {
    let result = flow(rep, x, cartan, opts)?;
    Ok(result.m_estimate <= SEMISTABLE_PHI_TOL)
}
