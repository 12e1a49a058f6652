//! Thermal Lindblad Liouvillian as a sparse superoperator over vectorized
//! density matrices.
//!
//! Vectorization is column-stacking throughout: the matrix element (row, col)
//! of rho lives at vector index `col * D + row`, so vec(A rho B) =
//! (B^T kron A) vec(rho).

use std::collections::HashMap;

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex;

use crate::algebra::{annihilation, tensor, HilbertSpace, Operator};
use crate::device::{
    bose_einstein, build_hamiltonian, build_probe, DeviceParams, FrameSpec,
};
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Explicit zero-dropping threshold for sparse assembly.
const DROP_TOL: f64 = 1e-15;

/// Superoperator matrix acting on vectorized density matrices, parameterized
/// by probe frequency. Units: MHz.
#[derive(Clone, Debug)]
pub struct Liouvillian<T: Scalar> {
    space: HilbertSpace,
    probe_frequency: T,
    matrix: SparseColMat<usize, Complex<T>>,
}

impl<T: Scalar> Liouvillian<T> {
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Hilbert-space dimension D; the matrix is D^2 x D^2.
    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn probe_frequency(&self) -> T {
        self.probe_frequency
    }

    pub fn matrix(&self) -> &SparseColMat<usize, Complex<T>> {
        &self.matrix
    }

    /// Applies the superoperator to a vectorized density matrix.
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim() * self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for t in self.matrix.triplet_iter() {
            y[t.row] += *t.val * x[t.col];
        }
        y
    }

    /// Frobenius norm of the superoperator matrix.
    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for t in self.matrix.triplet_iter() {
            acc += t.val.norm_sqr();
        }
        acc.sqrt()
    }
}

/// Accumulates superoperator triplets for terms of the form coeff * A rho B.
pub(crate) struct SuperOpBuilder<T: Scalar> {
    dim: usize,
    entries: Vec<Triplet<usize, usize, Complex<T>>>,
}

impl<T: Scalar> SuperOpBuilder<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// coeff * A rho B, with `ident_left`/`ident_right` selecting the identity
    /// in place of A or B.
    fn sandwich(&mut self, coeff: Complex<T>, a: Option<&Operator<T>>, b: Option<&Operator<T>>) {
        let d = self.dim;
        let drop = real::<T>(DROP_TOL);
        match (a, b) {
            (Some(a), Some(b)) => {
                let an = a.nonzeros(drop);
                let bn = b.nonzeros(drop);
                for &(r2, r1, va) in &an {
                    for &(c1, c2, vb) in &bn {
                        self.entries.push(Triplet::new(
                            c2 * d + r2,
                            c1 * d + r1,
                            coeff * va * vb,
                        ));
                    }
                }
            }
            (Some(a), None) => {
                for (r2, r1, va) in a.nonzeros(drop) {
                    for c in 0..d {
                        self.entries
                            .push(Triplet::new(c * d + r2, c * d + r1, coeff * va));
                    }
                }
            }
            (None, Some(b)) => {
                for (c1, c2, vb) in b.nonzeros(drop) {
                    for r in 0..d {
                        self.entries
                            .push(Triplet::new(c2 * d + r, c1 * d + r, coeff * vb));
                    }
                }
            }
            (None, None) => {
                for i in 0..d * d {
                    self.entries.push(Triplet::new(i, i, coeff));
                }
            }
        }
    }

    /// Adds (rate/2) (2 o rho o† - o†o rho - rho o†o).
    pub fn dissipator(&mut self, op: &Operator<T>, rate: T) -> Result<()> {
        if rate < T::zero() {
            return Err(Error::NegativeRate(rate.to_f64().unwrap_or(-1.0)));
        }
        if rate == T::zero() {
            return Ok(());
        }
        let odag = op.dagger();
        let oo = odag.matmul(op)?;
        let half = Complex::new(rate / real::<T>(2.0), T::zero());
        self.sandwich(Complex::new(rate, T::zero()), Some(op), Some(&odag));
        self.sandwich(-half, Some(&oo), None);
        self.sandwich(-half, None, Some(&oo));
        Ok(())
    }

    /// Adds -i [h, rho].
    pub fn commutator(&mut self, h: &Operator<T>) {
        let minus_i = Complex::new(T::zero(), -T::one());
        self.sandwich(minus_i, Some(h), None);
        self.sandwich(-minus_i, None, Some(h));
    }

    /// Deduplicates, drops below-threshold values and builds the CSC matrix.
    pub fn build(self) -> SparseColMat<usize, Complex<T>> {
        let d2 = self.dim * self.dim;
        let mut acc: HashMap<(usize, usize), Complex<T>> = HashMap::new();
        for t in &self.entries {
            *acc.entry((t.row, t.col))
                .or_insert_with(|| Complex::new(T::zero(), T::zero())) += t.val;
        }
        let drop = real::<T>(DROP_TOL);
        let mut merged: Vec<Triplet<usize, usize, Complex<T>>> = acc
            .into_iter()
            .filter(|(_, v)| v.norm() > drop)
            .map(|((r, c), v)| Triplet::new(r, c, v))
            .collect();
        merged.sort_by_key(|t| (t.col, t.row));
        SparseColMat::try_new_from_triplets(d2, d2, &merged)
            .expect("in-range indices by construction")
    }
}

/// Standalone Lindblad dissipator superoperator (rate/2) D[op].
pub fn dissipator<T: Scalar>(op: &Operator<T>, rate: T) -> Result<SparseColMat<usize, Complex<T>>> {
    let mut b = SuperOpBuilder::new(op.dim());
    b.dissipator(op, rate)?;
    Ok(b.build())
}

/// Summed transmon collapse operator sum_l sqrt(l) |l-1><l| (x) I_fock.
///
/// The sqrt(l) weights are the ratios g_{l-1,l} / g_{g,e} of the ladder
/// coupling choice.
pub fn qubit_collapse<T: Scalar>(params: &DeviceParams<T>) -> Result<Operator<T>> {
    let levels = params.transmon_levels;
    if levels < 2 {
        return Err(Error::InvalidDimension(
            "qubit collapse needs at least two levels".into(),
        ));
    }
    let mut s = Operator::zeros(HilbertSpace::single(levels)?);
    for l in 1..levels {
        s.mat_mut()[(l - 1, l)] = Complex::new(T::from_usize(l).unwrap().sqrt(), T::zero());
    }
    let i_f = Operator::identity(HilbertSpace::single(params.fock_cutoff)?);
    Ok(tensor(&s, &i_f))
}

/// Assembles the full thermal Liouvillian in the probe rotating frame:
/// -i[H_rot + H_p, .] plus the four thermal dissipators.
///
/// The qubit thermal-excitation dissipator uses the adjoint of the summed
/// collapse operator (one coherent dissipator, not one per ladder step).
pub fn build_liouvillian<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    probe_frequency: T,
) -> Result<Liouvillian<T>> {
    params.validate()?;
    if probe_frequency <= T::zero() || probe_frequency.is_nan() {
        return Err(Error::InvalidDimension(
            "probe frequency must be > 0".into(),
        ));
    }
    let space = params.space();
    let d = space.total_dim();

    let h_rot = build_hamiltonian(params, qubit_freq, FrameSpec::Rotating(probe_frequency))?;
    let h_total = h_rot.add(&build_probe(params)?)?;

    let a = tensor(
        &Operator::identity(HilbertSpace::single(params.transmon_levels)?),
        &annihilation::<T>(params.fock_cutoff)?,
    );
    let s_minus = qubit_collapse(params)?;

    let n_th = bose_einstein(params.omega_r, params.temperature);
    let n_th_q = bose_einstein(qubit_freq, params.temperature);

    let mut b = SuperOpBuilder::new(d);
    b.commutator(&h_total);
    b.dissipator(&a, params.kappa * (n_th + T::one()))?;
    b.dissipator(&a.dagger(), params.kappa * n_th)?;
    b.dissipator(&s_minus, params.gamma_q * (n_th_q + T::one()))?;
    b.dissipator(&s_minus.dagger(), params.gamma_q * n_th_q)?;

    Ok(Liouvillian {
        space,
        probe_frequency,
        matrix: b.build(),
    })
}
