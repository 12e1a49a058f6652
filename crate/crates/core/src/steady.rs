//! Steady-state solver: L vec(rho) = 0 under the unit-trace constraint,
//! transmission coefficient, Fock-truncation certification and peak finding.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_complex::Complex;
use rayon::prelude::*;

use crate::algebra::{expectation, HilbertSpace};
use crate::device::{bose_einstein, joint_annihilation, DeviceParams};
use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, Liouvillian};
use crate::scalar::{real, Scalar};

/// Relative residual bound for an accepted steady-state solve.
const RESIDUAL_TOL: f64 = 1e-8;
/// Tolerances of the density-matrix invariants.
const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = -1e-8;
/// Certification gates.
const CERT_T_TOL: f64 = 1e-4;
const CERT_POP_TOL: f64 = 1e-6;

/// Hermitian, unit-trace, positive-semidefinite state of the joint system.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Scalar> {
    space: HilbertSpace,
    mat: Mat<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn from_matrix(space: HilbertSpace, mat: Mat<Complex<T>>) -> Result<Self> {
        let d = space.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, space dimension is {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { space, mat })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn mat(&self) -> &Mat<Complex<T>> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim() {
            t += self.mat[(i, i)];
        }
        t
    }

    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let diff = self.mat[(i, j)] - self.mat[(j, i)].conj();
                if diff.norm() > worst {
                    worst = diff.norm();
                }
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> T {
        let eigs = self
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("self-adjoint eigensolve on a finite matrix");
        eigs[0]
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness at the
    /// crate-wide tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > real(HERMITICITY_TOL) {
            return Err(Error::Convergence {
                residual: herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = self.trace();
        if (tr - Complex::new(T::one(), T::zero())).norm() > real(TRACE_TOL) {
            return Err(Error::Convergence {
                residual: (tr - Complex::new(T::one(), T::zero()))
                    .norm()
                    .to_f64()
                    .unwrap_or(f64::NAN),
            });
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < real(PSD_TOL) {
            return Err(Error::Convergence {
                residual: min_eig.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Fock populations, traced over the transmon factor.
    pub fn fock_populations(&self) -> Vec<T> {
        let dims = self.space.factor_dims();
        let (levels, fock) = (dims[0], dims[1]);
        let mut pops = vec![T::zero(); fock];
        for l in 0..levels {
            for (n, pop) in pops.iter_mut().enumerate() {
                let idx = l * fock + n;
                *pop += self.mat[(idx, idx)].re;
            }
        }
        pops
    }

    /// Transmon-level populations, traced over the Fock factor.
    pub fn transmon_populations(&self) -> Vec<T> {
        let dims = self.space.factor_dims();
        let (levels, fock) = (dims[0], dims[1]);
        let mut pops = vec![T::zero(); levels];
        for (l, pop) in pops.iter_mut().enumerate() {
            for n in 0..fock {
                let idx = l * fock + n;
                *pop += self.mat[(idx, idx)].re;
            }
        }
        pops
    }
}

/// Grid of probe frequencies with complex transmission values.
#[derive(Clone, Debug)]
pub struct SpectrumResult<T: Scalar> {
    pub probe_frequencies: Vec<T>,
    pub t_values: Vec<Complex<T>>,
    pub params_snapshot: DeviceParams<T>,
    pub qubit_freq: T,
    pub truncation_certified: bool,
}

/// Solves L vec(rho) = 0 with the trace constraint replacing the first
/// scalar equation, then symmetrizes and validates the state.
pub fn solve_steady_state<T: Scalar>(liouvillian: &Liouvillian<T>) -> Result<DensityMatrix<T>> {
    let d = liouvillian.dim();
    let n = d * d;

    let mut triplets: Vec<Triplet<usize, usize, Complex<T>>> = liouvillian
        .matrix()
        .triplet_iter()
        .filter(|t| t.row != 0)
        .map(|t| Triplet::new(t.row, t.col, *t.val))
        .collect();
    for i in 0..d {
        triplets.push(Triplet::new(0, i * d + i, Complex::new(T::one(), T::zero())));
    }
    triplets.sort_by_key(|t| (t.col, t.row));
    let constrained: SparseColMat<usize, Complex<T>> =
        SparseColMat::try_new_from_triplets(n, n, &triplets)
            .expect("indices in range by construction");

    let lu = constrained
        .sp_lu()
        .map_err(|_| Error::NonUniqueSteadyState)?;
    let mut rhs = Mat::<Complex<T>>::zeros(n, 1);
    rhs[(0, 0)] = Complex::new(T::one(), T::zero());
    let x = lu.solve(&rhs);

    let vecd: Vec<Complex<T>> = (0..n).map(|i| x[(i, 0)]).collect();
    if vecd.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonUniqueSteadyState);
    }

    // residual against the unmodified Liouvillian
    let resid = liouvillian.apply(&vecd);
    let resid_norm = resid.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let scale = liouvillian.frobenius_norm();
    if resid_norm > real::<T>(RESIDUAL_TOL) * scale {
        return Err(Error::Convergence {
            residual: (resid_norm / scale).to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut mat = Mat::<Complex<T>>::zeros(d, d);
    for c in 0..d {
        for r in 0..d {
            mat[(r, c)] = vecd[c * d + r];
        }
    }
    // symmetrize before the invariant checks
    let mut sym = Mat::<Complex<T>>::zeros(d, d);
    let half = Complex::new(real::<T>(0.5), T::zero());
    for r in 0..d {
        for c in 0..d {
            sym[(r, c)] = (mat[(r, c)] + mat[(c, r)].conj()) * half;
        }
    }
    let rho = DensityMatrix::from_matrix(liouvillian.space().clone(), sym)?;
    rho.validate()?;
    Ok(rho)
}

/// t = i kappa <a>_ss / epsilon.
pub fn transmission<T: Scalar>(rho: &DensityMatrix<T>, params: &DeviceParams<T>) -> Result<Complex<T>> {
    if params.epsilon <= T::zero() {
        return Err(Error::UndefinedTransmission);
    }
    let a = joint_annihilation(params)?;
    let mean_a = expectation(&a, rho)?;
    let i_kappa = Complex::new(T::zero(), params.kappa);
    Ok(i_kappa * mean_a / Complex::new(params.epsilon, T::zero()))
}

fn solve_t_at<T: Scalar>(params: &DeviceParams<T>, qubit_freq: T, probe: T) -> Result<Complex<T>> {
    let l = build_liouvillian(params, qubit_freq, probe)?;
    let rho = solve_steady_state(&l)?;
    transmission(&rho, params)
}

/// One Liouvillian build + steady-state solve + transmission per grid point.
pub fn spectrum<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    probe_grid: &[T],
) -> Result<SpectrumResult<T>> {
    if probe_grid.is_empty() {
        return Err(Error::InvalidDimension("probe grid is empty".into()));
    }
    if probe_grid.windows(2).any(|w| w[1] <= w[0] || w[1].is_nan() || w[0].is_nan()) {
        return Err(Error::InvalidDimension(
            "probe grid must be strictly increasing".into(),
        ));
    }
    let t_values: Vec<Complex<T>> = probe_grid
        .par_iter()
        .map(|&probe| {
            solve_t_at(params, qubit_freq, probe)
                .map_err(|e| e.at_probe(probe.to_f64().unwrap_or(f64::NAN)))
        })
        .collect::<Result<Vec<_>>>()?;

    for (&probe, t) in probe_grid.iter().zip(&t_values) {
        if t.norm() > T::one() + real(1e-6) {
            return Err(Error::Convergence {
                residual: t.norm().to_f64().unwrap_or(f64::NAN),
            }
            .at_probe(probe.to_f64().unwrap_or(f64::NAN)));
        }
    }

    // certify at the strongest response point
    let mut max_idx = 0usize;
    for (i, t) in t_values.iter().enumerate() {
        if t.norm() > t_values[max_idx].norm() {
            max_idx = i;
        }
    }
    let certified = certify_truncation(params, qubit_freq, probe_grid[max_idx]);

    Ok(SpectrumResult {
        probe_frequencies: probe_grid.to_vec(),
        t_values,
        params_snapshot: params.clone(),
        qubit_freq,
        truncation_certified: certified,
    })
}

/// Re-solves at fock_cutoff + 5; certified when |t| moves by less than 1e-4
/// and the top two Fock populations are each below 1e-6.
pub fn certify_truncation<T: Scalar>(params: &DeviceParams<T>, qubit_freq: T, probe: T) -> bool {
    if params.fock_cutoff < 4 {
        return false;
    }
    let base = match build_liouvillian(params, qubit_freq, probe)
        .and_then(|l| solve_steady_state(&l))
    {
        Ok(rho) => rho,
        Err(_) => return false,
    };
    let pops = base.fock_populations();
    let top_two_small = pops[pops.len() - 1] < real(CERT_POP_TOL)
        && pops[pops.len() - 2] < real(CERT_POP_TOL);
    if !top_two_small {
        return false;
    }
    let t_base = match transmission(&base, params) {
        Ok(t) => t,
        Err(_) => return false,
    };
    let mut enlarged = params.clone();
    enlarged.fock_cutoff += 5;
    let t_big = match solve_t_at(&enlarged, qubit_freq, probe) {
        Ok(t) => t,
        Err(_) => return false,
    };
    (t_base.norm() - t_big.norm()).abs() < real(CERT_T_TOL)
}

/// Default Fock cutoff for a thermal occupation: geometric-tail sizing on top
/// of the max(10, 8 n_th + 8) floor, so that the certification population
/// gate can pass.
pub fn default_fock_cutoff<T: Scalar>(n_th: T) -> usize {
    let n = n_th.to_f64().unwrap_or(0.0).max(0.0);
    let mut cutoff = 10usize.max((8.0 * n + 8.0).ceil() as usize);
    if n > 1e-12 {
        let x = n / (n + 1.0);
        // (1 - x) x^(N-2) < 1e-7 keeps the top two populations an order of
        // magnitude under the certification gate
        let needed = 2.0 + ((1e-7 / (1.0 - x)).ln() / x.ln());
        cutoff = cutoff.max(needed.ceil() as usize);
    }
    cutoff.min(400)
}

/// Default cutoff for a device at its own temperature, evaluated at omega_r.
pub fn auto_fock_cutoff<T: Scalar>(params: &DeviceParams<T>) -> usize {
    default_fock_cutoff(bose_einstein(params.omega_r, params.temperature))
}

/// Default probe grid: 401 points spanning omega_r +- 60 MHz.
pub fn default_probe_grid<T: Scalar>(omega_r: T) -> Vec<T> {
    linspace(omega_r - real(60.0), omega_r + real(60.0), 401)
}

pub fn linspace<T: Scalar>(start: T, stop: T, points: usize) -> Vec<T> {
    if points == 1 {
        return vec![start];
    }
    let step = (stop - start) / T::from_usize(points - 1).unwrap();
    (0..points)
        .map(|i| start + step * T::from_usize(i).unwrap())
        .collect()
}

/// Local maxima of |t| with topographic prominence at least
/// `prominence * max|t|`, refined by parabolic interpolation.
pub fn find_peaks<T: Scalar>(
    freqs: &[T],
    heights: &[T],
    prominence: T,
) -> Vec<(T, T)> {
    assert_eq!(freqs.len(), heights.len());
    let m = heights.len();
    if m < 3 {
        return Vec::new();
    }
    let max_h = heights.iter().cloned().fold(T::zero(), T::max);
    let threshold = prominence * max_h;
    let mut peaks = Vec::new();
    for i in 1..m - 1 {
        if !(heights[i] > heights[i - 1] && heights[i] >= heights[i + 1]) {
            continue;
        }
        if topographic_prominence(heights, i) < threshold {
            continue;
        }
        // parabolic refinement on the three surrounding samples
        let (hm, h0, hp) = (heights[i - 1], heights[i], heights[i + 1]);
        let denom = hm - real::<T>(2.0) * h0 + hp;
        let (freq, height) = if denom.abs() > T::epsilon() {
            let delta = (hm - hp) / (real::<T>(2.0) * denom);
            let step = (freqs[i + 1] - freqs[i - 1]) / real::<T>(2.0);
            (
                freqs[i] + delta * step,
                h0 - (hm - hp) * delta / real::<T>(4.0),
            )
        } else {
            (freqs[i], h0)
        };
        peaks.push((freq, height));
    }
    peaks
}

/// Prominence of the peak at `i`: height above the higher of the two side
/// bases, where each base is the minimum between the peak and the nearest
/// strictly higher sample (or the signal edge).
fn topographic_prominence<T: Scalar>(heights: &[T], i: usize) -> T {
    let h = heights[i];
    let mut left_base = h;
    for j in (0..i).rev() {
        if heights[j] > h {
            break;
        }
        if heights[j] < left_base {
            left_base = heights[j];
        }
    }
    let mut right_base = h;
    for &v in &heights[i + 1..] {
        if v > h {
            break;
        }
        if v < right_base {
            right_base = v;
        }
    }
    h - left_base.max(right_base)
}
