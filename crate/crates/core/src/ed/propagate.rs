//! Unitary ramps of the transverse field for the dense model.
//!
//! Each step of length `dt` is taken in the interaction frame of the
//! Hamiltonian at the step midpoint `H_m = V Λ Vᵀ`. There the remaining
//! drive `−δb(s) X` is linear in time, and its first Magnus term is the
//! real antisymmetric matrix
//!
//! `Ω_mn = −2 ḃ X̃_mn J(λ_m − λ_n)`, `J(ω) = (sin ωh − ωh cos ωh)/ω²`,
//!
//! with `X̃ = Vᵀ X V` and `h = dt/2`. The step propagator is
//! `V e^{−iΛh} cay(Ω) e^{−iΛh} Vᵀ`, where the Cayley transform keeps it
//! exactly unitary. The fast phases are integrated exactly, so the step
//! count is set by how quickly the eigenbasis turns rather than by the
//! spectral width.
//!
//! All durations of a sweep share the step midpoints, so one pass over the
//! midpoints advances every duration at once.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::dynamics::{IntegratorSettings, RampProtocol};
use crate::ed::hamiltonian::DenseParts;
use crate::error::{Error, Result};
use crate::numeric::C64;

/// Step count of the first level of the doubling ladder.
pub const BASE_STEPS: usize = 256;
/// Maximum number of step doublings past [`BASE_STEPS`].
pub const MAX_DOUBLINGS: u32 = 9;

const SERIES_CUTOVER: f64 = 0.05;

/// Propagator stored as `[Re U | Im U]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    split: DMatrix<f64>,
    pub steps: usize,
}

impl DenseUnitary {
    fn identity(dim: usize) -> Self {
        let mut split = DMatrix::zeros(dim, 2 * dim);
        split.view_mut((0, 0), (dim, dim)).fill_with_identity();
        DenseUnitary { split, steps: 0 }
    }

    pub fn dim(&self) -> usize {
        self.split.nrows()
    }

    pub fn re(&self) -> DMatrix<f64> {
        self.split.columns(0, self.dim()).into_owned()
    }

    pub fn im(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.split.columns(n, n).into_owned()
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        let (re, im) = (self.re(), self.im());
        DMatrix::from_fn(self.dim(), self.dim(), |r, c| C64::new(re[(r, c)], im[(r, c)]))
    }

    /// `Uᵀ`, the propagator of the time-reversed ramp.
    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut split = DMatrix::zeros(n, 2 * n);
        split.columns_mut(0, n).copy_from(&self.re().transpose());
        split.columns_mut(n, n).copy_from(&self.im().transpose());
        DenseUnitary {
            split,
            steps: self.steps,
        }
    }

    /// `P_ab = |⟨a|U|b⟩|²` between the columns of `from` and of `to`.
    pub fn transition_probabilities(&self, from: &DMatrix<f64>, to: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let left = to.transpose();
        let re = &left * self.re() * from;
        let im = &left * self.im() * from;
        DMatrix::from_fn(n, n, |a, b| re[(a, b)].powi(2) + im[(a, b)].powi(2))
    }

    fn left_mul(&mut self, m: &DMatrix<f64>) {
        self.split = m * &self.split;
    }

    /// Rows scaled by `e^{−iλ_m h} = c_m − i s_m`.
    fn phase(&mut self, cos: &[f64], sin: &[f64]) {
        let n = self.dim();
        for col in 0..n {
            for row in 0..n {
                let (re, im) = (self.split[(row, col)], self.split[(row, col + n)]);
                let (c, s) = (cos[row], sin[row]);
                self.split[(row, col)] = c * re + s * im;
                self.split[(row, col + n)] = c * im - s * re;
            }
        }
    }
}

/// `J(ω)` from `sin ωh` and `cos ωh`, switching to its Taylor series for small `ωh`.
#[inline]
fn drive_integral(omega: f64, h: f64, sin_x: f64, cos_x: f64) -> f64 {
    let x = omega * h;
    if x.abs() < SERIES_CUTOVER {
        let x2 = x * x;
        omega * h * h * h * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0)
    } else {
        (sin_x - x * cos_x) / (omega * omega)
    }
}

/// Advances `u` by one step for a duration-`tau` ramp across `db` in `steps` steps.
fn step(
    u: &mut DenseUnitary,
    overlap: &DMatrix<f64>,
    lambda: &[f64],
    x_tilde: &DMatrix<f64>,
    tau: f64,
    db: f64,
    steps: usize,
) -> Result<()> {
    let n = lambda.len();
    let h = 0.5 * tau / steps as f64;
    let bdot = db / tau;
    let (sin, cos): (Vec<f64>, Vec<f64>) = lambda.iter().map(|l| (l * h).sin_cos()).unzip();

    let mut half_omega = DMatrix::<f64>::zeros(n, n);
    for m in 0..n {
        for k in (m + 1)..n {
            let sin_x = sin[m] * cos[k] - cos[m] * sin[k];
            let cos_x = cos[m] * cos[k] + sin[m] * sin[k];
            let w = -bdot * x_tilde[(m, k)] * drive_integral(lambda[m] - lambda[k], h, sin_x, cos_x);
            half_omega[(m, k)] = w;
            half_omega[(k, m)] = -w;
        }
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let lu = (&identity - &half_omega).lu();

    u.left_mul(overlap);
    u.phase(&cos, &sin);
    let rhs = (&identity + &half_omega) * &u.split;
    u.split = lu
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("integrator", "singular Cayley factor in dense step"))?;
    u.phase(&cos, &sin);
    Ok(())
}

/// Propagators of `H(b) = H0 − b X` with `b` ramped linearly from `b_start`
/// to `b_end`, one per duration, all at the same step count.
pub fn propagate_fixed(
    parts: &DenseParts,
    b_start: f64,
    b_end: f64,
    taus: &[f64],
    steps: usize,
) -> Result<Vec<DenseUnitary>> {
    let dim = parts.dim();
    let db = b_end - b_start;
    let mut states: Vec<DenseUnitary> = taus.iter().map(|_| DenseUnitary::identity(dim)).collect();
    let mut v_prev = DMatrix::<f64>::identity(dim, dim);
    for j in 0..steps {
        let b = b_start + db * (j as f64 + 0.5) / steps as f64;
        let eig = SymmetricEigen::new(parts.at(b));
        let v = eig.eigenvectors;
        let vt = v.transpose();
        let x_tilde = &vt * &parts.x * &v;
        let overlap = &vt * &v_prev;
        let lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        states
            .par_iter_mut()
            .zip(taus.par_iter())
            .try_for_each(|(u, &tau)| step(u, &overlap, &lambda, &x_tilde, tau, db, steps))?;
        v_prev = v;
    }
    for u in states.iter_mut() {
        u.left_mul(&v_prev);
        u.steps = steps;
    }
    Ok(states)
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Propagators refined by step doubling until `observable` changes by at
/// most `tolerance` between consecutive levels.
///
/// `base_steps` overrides [`BASE_STEPS`] for the first level.
pub fn converged_propagators<F>(
    parts: &DenseParts,
    b_start: f64,
    b_end: f64,
    taus: &[f64],
    tolerance: f64,
    base_steps: Option<usize>,
    observable: F,
) -> Vec<Result<DenseUnitary>>
where
    F: Fn(&DenseUnitary) -> DMatrix<f64> + Sync,
{
    let mut steps = base_steps.unwrap_or(BASE_STEPS).max(1);
    let mut results: Vec<Option<Result<DenseUnitary>>> = taus.iter().map(|_| None).collect();
    let mut previous: Vec<Option<DMatrix<f64>>> = taus.iter().map(|_| None).collect();
    for level in 0..=(MAX_DOUBLINGS + 1) {
        let pending: Vec<usize> = (0..taus.len()).filter(|&i| results[i].is_none()).collect();
        if pending.is_empty() {
            break;
        }
        let subset: Vec<f64> = pending.iter().map(|&i| taus[i]).collect();
        match propagate_fixed(parts, b_start, b_end, &subset, steps) {
            Err(e) => {
                for &i in &pending {
                    results[i] = Some(Err(e.clone()));
                }
            }
            Ok(us) => {
                for (&i, u) in pending.iter().zip(us) {
                    let obs = observable(&u);
                    if let Some(prev) = &previous[i] {
                        let discrepancy = max_abs_diff(&obs, prev);
                        if discrepancy <= tolerance {
                            results[i] = Some(Ok(u));
                        } else if level > MAX_DOUBLINGS {
                            results[i] = Some(Err(Error::StepSize {
                                stage: "dense ramp",
                                steps,
                                discrepancy,
                                tolerance,
                            }));
                        }
                    }
                    previous[i] = Some(obs);
                }
            }
        }
        steps *= 2;
    }
    results
        .into_iter()
        .map(|r| r.expect("every duration resolved"))
        .collect()
}

/// Checks that `rho` is a density matrix to `tol`.
pub fn check_density(rho: &DMatrix<C64>, tol: f64) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::invalid("rho", "must be square"));
    }
    let tr = rho.trace();
    if !((tr.re - 1.0).abs() <= tol && tr.im.abs() <= tol) {
        return Err(Error::invalid("rho", format!("trace is {tr}, expected 1")));
    }
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(herm <= tol) {
        return Err(Error::invalid("rho", format!("not Hermitian (deviation {herm:.3e})")));
    }
    let min = SymmetricEigen::new((rho + rho.adjoint()).scale(0.5))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min >= -tol) {
        return Err(Error::invalid("rho", format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Von Neumann evolution of a dense density matrix under a linear ramp of
/// the transverse field.
pub fn evolve_dense(
    rho: &DMatrix<C64>,
    parts: &DenseParts,
    ramp: &RampProtocol,
    settings: &IntegratorSettings,
) -> Result<DMatrix<C64>> {
    ramp.validate()?;
    settings.validate()?;
    if rho.nrows() != parts.dim() {
        return Err(Error::invalid(
            "rho",
            format!("expected dimension {}, got {}", parts.dim(), rho.nrows()),
        ));
    }
    check_density(rho, 1e-10)?;
    let u = converged_propagators(
        parts,
        ramp.h_start,
        ramp.h_end,
        &[ramp.tau],
        settings.tolerance,
        ramp.steps,
        |u| u.split.clone(),
    )
    .pop()
    .expect("one duration")?;
    let u = u.to_complex();
    let out = &u * rho * u.adjoint();
    Ok((&out + out.adjoint()).scale(0.5))
}
