//! Finite-dimensional complex operator algebra over a labeled tensor-product
//! Hilbert space, with Fock-space constructors.
//!
//! Basis ordering is fixed crate-wide: transmon factor first, Fock factor
//! second, joint basis index `l * fock_dim + n`.

use faer::Mat;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::steady::DensityMatrix;

/// Ordered tensor-product space. `factor_dims[0]` is the transmon factor,
/// `factor_dims[1]` the Fock factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    factor_dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidDimension("empty factor list".into()));
        }
        for &d in &factor_dims {
            if d < 2 {
                return Err(Error::InvalidDimension(format!(
                    "every factor dimension must be >= 2, got {d}"
                )));
            }
        }
        Ok(Self { factor_dims })
    }

    /// Single-factor space of the given dimension.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }
}

/// Complex square matrix over a [`HilbertSpace`].
///
/// Entries are in linear-frequency MHz for Hamiltonian-valued operators and
/// dimensionless for ladder or projection operators.
#[derive(Clone, Debug)]
pub struct Operator<T: Scalar> {
    space: HilbertSpace,
    mat: Mat<Complex<T>>,
}

impl<T: Scalar> Operator<T> {
    pub fn new(space: HilbertSpace, mat: Mat<Complex<T>>) -> Result<Self> {
        let d = space.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but the space has dimension {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { space, mat })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            mat: Mat::zeros(d, d),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        let mut op = Self::zeros(space);
        for i in 0..d {
            op.mat[(i, i)] = Complex::new(T::one(), T::zero());
        }
        op
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn mat(&self) -> &Mat<Complex<T>> {
        &self.mat
    }

    pub fn mat_mut(&mut self) -> &mut Mat<Complex<T>> {
        &mut self.mat
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.mat[(j, i)].conj();
            }
        }
        Self {
            space: self.space.clone(),
            mat: out,
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.space != rhs.space {
            return Err(Error::DimensionMismatch(
                "operator product requires matching spaces".into(),
            ));
        }
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat * &rhs.mat,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.space != rhs.space {
            return Err(Error::DimensionMismatch(
                "operator sum requires matching spaces".into(),
            ));
        }
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.space != rhs.space {
            return Err(Error::DimensionMismatch(
                "operator difference requires matching spaces".into(),
            ));
        }
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat - &rhs.mat,
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let d = self.dim();
        let mut out = self.mat.clone();
        for j in 0..d {
            for i in 0..d {
                out[(i, j)] *= c;
            }
        }
        Self {
            space: self.space.clone(),
            mat: out,
        }
    }

    /// Maximum elementwise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let diff = self.mat[(i, j)] - self.mat[(j, i)].conj();
                let a = diff.norm();
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim() {
            t += self.mat[(i, i)];
        }
        t
    }

    /// Nonzero entries above `drop_tol` as `(row, col, value)` triplets.
    pub fn nonzeros(&self, drop_tol: T) -> Vec<(usize, usize, Complex<T>)> {
        let d = self.dim();
        let mut out = Vec::new();
        for j in 0..d {
            for i in 0..d {
                let v = self.mat[(i, j)];
                if v.norm() > drop_tol {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Truncated annihilation operator on a Fock ladder of dimension `fock_dim`:
/// entry `sqrt(n)` at row `n-1`, column `n`.
pub fn annihilation<T: Scalar>(fock_dim: usize) -> Result<Operator<T>> {
    if fock_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "Fock dimension must be >= 2, got {fock_dim}"
        )));
    }
    let space = HilbertSpace::single(fock_dim)?;
    let mut op = Operator::zeros(space);
    for n in 1..fock_dim {
        op.mat[(n - 1, n)] = Complex::new(T::from_usize(n).unwrap().sqrt(), T::zero());
    }
    Ok(op)
}

/// Kronecker product. The result's factor list is the concatenation of the
/// operands' factor lists.
pub fn tensor<T: Scalar>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    let da = a.dim();
    let db = b.dim();
    let mut dims = a.space.factor_dims.clone();
    dims.extend_from_slice(&b.space.factor_dims);
    let space = HilbertSpace { factor_dims: dims };
    let mut mat = Mat::zeros(da * db, da * db);
    for ia in 0..da {
        for ja in 0..da {
            let va = a.mat[(ia, ja)];
            if va.norm_sqr() == T::zero() {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    let vb = b.mat[(ib, jb)];
                    if vb.norm_sqr() != T::zero() {
                        mat[(ia * db + ib, ja * db + jb)] = va * vb;
                    }
                }
            }
        }
    }
    Operator { space, mat }
}

/// `trace(op . rho)`.
pub fn expectation<T: Scalar>(op: &Operator<T>, rho: &DensityMatrix<T>) -> Result<Complex<T>> {
    if op.space() != rho.space() {
        return Err(Error::DimensionMismatch(
            "expectation requires operator and state on the same space".into(),
        ));
    }
    let d = op.dim();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..d {
        for j in 0..d {
            acc += op.mat[(i, j)] * rho.mat()[(j, i)];
        }
    }
    Ok(acc)
}
