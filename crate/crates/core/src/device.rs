//! Device physics: parameters, flux-tunable qubit frequency, thermal
//! occupations, Hamiltonian builders, probe drive, Stark/Lamb shifts.
//!
//! All frequencies are stored as linear frequency in MHz; temperatures in mK.

use num_complex::Complex;

use crate::algebra::{annihilation, tensor, HilbertSpace, Operator};
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// h / k_B in mK per GHz.
pub const H_OVER_KB_MK_PER_GHZ: f64 = 47.9924;

/// Physical constants of the coupled device.
///
/// `gamma_q` is a free knob: 10.48 MHz is the sweet-spot relaxation rate,
/// 7.90 MHz the value used for the low-dissipation resonant spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceParams<T: Scalar> {
    /// Resonator frequency (MHz).
    pub omega_r: T,
    /// Qubit-resonator coupling (MHz).
    pub g: T,
    /// Resonator decay rate (MHz).
    pub kappa: T,
    /// Qubit relaxation rate (MHz).
    pub gamma_q: T,
    /// Charging energy (MHz).
    pub e_c: T,
    /// Maximum Josephson energy (MHz).
    pub e_j_max: T,
    /// Number of transmon levels kept (>= 2).
    pub transmon_levels: usize,
    /// Fock-space truncation (>= 2).
    pub fock_cutoff: usize,
    /// Probe strength (MHz).
    pub epsilon: T,
    /// Bath temperature (mK).
    pub temperature: T,
}

/// Frame in which a Hamiltonian is expressed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameSpec<T: Scalar> {
    /// No rotation.
    Lab,
    /// Co-rotating with the probe at the given frequency (MHz).
    Rotating(T),
}

impl<T: Scalar> DeviceParams<T> {
    /// Device constants extracted in the experiment, at the flux sweet spot.
    pub fn paper_defaults() -> Self {
        let kappa = real(1.56);
        Self {
            omega_r: real(3162.0),
            g: real(18.5),
            kappa,
            gamma_q: real(10.48),
            e_c: real(160.0),
            e_j_max: real(22880.0),
            transmon_levels: 5,
            fock_cutoff: 10,
            epsilon: kappa / real::<T>(20.0),
            temperature: real(16.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g < T::zero() {
            return Err(Error::InvalidDimension("g must be >= 0".into()));
        }
        let pos = [
            ("omega_r", self.omega_r),
            ("kappa", self.kappa),
            ("gamma_q", self.gamma_q),
            ("e_c", self.e_c),
            ("e_j_max", self.e_j_max),
        ];
        for (name, v) in pos {
            if v <= T::zero() || v.is_nan() {
                return Err(Error::InvalidDimension(format!(
                    "{name} must be strictly positive"
                )));
            }
        }
        if self.epsilon < T::zero() {
            return Err(Error::NegativeRate(self.epsilon.to_f64().unwrap_or(-1.0)));
        }
        if self.temperature < T::zero() {
            return Err(Error::InvalidDimension(
                "temperature must be >= 0".into(),
            ));
        }
        if self.transmon_levels < 2 || self.transmon_levels > 10 {
            return Err(Error::InvalidDimension(format!(
                "transmon_levels must be in 2..=10, got {}",
                self.transmon_levels
            )));
        }
        if self.fock_cutoff < 2 {
            return Err(Error::InvalidDimension(format!(
                "fock_cutoff must be >= 2, got {}",
                self.fock_cutoff
            )));
        }
        Ok(())
    }

    /// Joint transmon (x) Fock space for this parameter set.
    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(vec![self.transmon_levels, self.fock_cutoff])
            .expect("validated dimensions")
    }

    /// E_J,max |cos(pi flux)| with flux in units of Phi0.
    pub fn josephson_energy(&self, flux: T) -> T {
        self.e_j_max * (T::PI() * flux).cos().abs()
    }

    /// sqrt(8 E_C E_J(flux)) - E_C. Fails where E_J vanishes (half flux).
    pub fn qubit_frequency(&self, flux: T) -> Result<T> {
        let ej = self.josephson_energy(flux);
        // cos(pi/2) is ~1e-17 in floating point, so test relative to E_J,max
        if ej <= self.e_j_max * real(1e-12) {
            return Err(Error::DegenerateQubit);
        }
        Ok((real::<T>(8.0) * self.e_c * ej).sqrt() - self.e_c)
    }

    /// Dressed-qubit shift 2 n g^2/Delta + g^2/Delta relative to the bare
    /// frequency. Dispersive validity (|Delta| >> g) is the caller's
    /// responsibility; see [`DeviceParams::is_dispersive`].
    pub fn stark_lamb_shift(&self, n: T, detuning: T) -> Result<T> {
        if detuning == T::zero() {
            return Err(Error::ZeroDetuning);
        }
        let chi = self.g * self.g / detuning;
        Ok((real::<T>(2.0) * n + T::one()) * chi)
    }

    /// True when |detuning| >= 10 g.
    pub fn is_dispersive(&self, detuning: T) -> bool {
        detuning.abs() >= real::<T>(10.0) * self.g
    }
}

/// Bose-Einstein occupation 1/(exp(h nu / kB T) - 1); exactly 0 at T = 0.
pub fn bose_einstein<T: Scalar>(freq_mhz: T, temperature_mk: T) -> T {
    if temperature_mk <= T::zero() {
        return T::zero();
    }
    let x = real::<T>(H_OVER_KB_MK_PER_GHZ) * freq_mhz / (real::<T>(1000.0) * temperature_mk);
    (x.exp() - T::one()).recip()
}

/// h nu / k_B in mK.
pub fn crossover_temperature<T: Scalar>(freq_mhz: T) -> T {
    real::<T>(H_OVER_KB_MK_PER_GHZ) * freq_mhz / real::<T>(1000.0)
}

/// Transmon projector sum helper: |l><m| on the transmon factor.
fn transmon_elem<T: Scalar>(levels: usize, l: usize, m: usize) -> Operator<T> {
    let mut op = Operator::zeros(HilbertSpace::single(levels).unwrap());
    op.mat_mut()[(l, m)] = Complex::new(T::one(), T::zero());
    op
}

/// H/hbar on the joint space (linear MHz).
///
/// Transmon ladder: sum_l [l w_a - (E_C/2) l (l-1)] |l><l|; resonator
/// w_r a†a; rotating-wave coupling g sqrt(l+1) (|l><l+1| (x) a† + h.c.).
/// In the rotating frame, w_p (a†a + sum_l l |l><l|) is subtracted.
pub fn build_hamiltonian<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    frame: FrameSpec<T>,
) -> Result<Operator<T>> {
    params.validate()?;
    let levels = params.transmon_levels;
    let fock = params.fock_cutoff;
    let a = annihilation::<T>(fock)?;
    let adag = a.dagger();
    let n_fock = adag.matmul(&a)?;
    let i_q = Operator::identity(HilbertSpace::single(levels)?);
    let i_f = Operator::identity(HilbertSpace::single(fock)?);

    let mut h = tensor(&i_q, &n_fock).scale(Complex::new(params.omega_r, T::zero()));

    for l in 0..levels {
        let lf = T::from_usize(l).unwrap();
        let energy = lf * qubit_freq
            - params.e_c / real::<T>(2.0) * lf * (lf - T::one());
        let proj = tensor(&transmon_elem(levels, l, l), &i_f)
            .scale(Complex::new(energy, T::zero()));
        h = h.add(&proj)?;
    }

    for l in 0..levels - 1 {
        let gl = params.g * T::from_usize(l + 1).unwrap().sqrt();
        let term = tensor(&transmon_elem(levels, l, l + 1), &adag)
            .add(&tensor(&transmon_elem(levels, l + 1, l), &a))?
            .scale(Complex::new(gl, T::zero()));
        h = h.add(&term)?;
    }

    if let FrameSpec::Rotating(omega_p) = frame {
        let n_exc = excitation_number(params)?;
        h = h.sub(&n_exc.scale(Complex::new(omega_p, T::zero())))?;
    }
    Ok(h)
}

/// Total excitation number a†a + sum_l l |l><l|.
pub fn excitation_number<T: Scalar>(params: &DeviceParams<T>) -> Result<Operator<T>> {
    let levels = params.transmon_levels;
    let fock = params.fock_cutoff;
    let a = annihilation::<T>(fock)?;
    let n_fock = a.dagger().matmul(&a)?;
    let i_q = Operator::identity(HilbertSpace::single(levels)?);
    let i_f = Operator::identity(HilbertSpace::single(fock)?);
    let mut n = tensor(&i_q, &n_fock);
    for l in 1..levels {
        n = n.add(
            &tensor(&transmon_elem(levels, l, l), &i_f)
                .scale(Complex::new(T::from_usize(l).unwrap(), T::zero())),
        )?;
    }
    Ok(n)
}

/// Probe Hamiltonian (epsilon/2) (a† + a) on the joint space.
pub fn build_probe<T: Scalar>(params: &DeviceParams<T>) -> Result<Operator<T>> {
    if params.epsilon < T::zero() {
        return Err(Error::NegativeRate(params.epsilon.to_f64().unwrap_or(-1.0)));
    }
    let a = annihilation::<T>(params.fock_cutoff)?;
    let x = a.dagger().add(&a)?;
    let i_q = Operator::identity(HilbertSpace::single(params.transmon_levels)?);
    Ok(tensor(&i_q, &x).scale(Complex::new(params.epsilon / real::<T>(2.0), T::zero())))
}

/// Joint-space annihilation operator I (x) a.
pub fn joint_annihilation<T: Scalar>(params: &DeviceParams<T>) -> Result<Operator<T>> {
    let a = annihilation::<T>(params.fock_cutoff)?;
    let i_q = Operator::identity(HilbertSpace::single(params.transmon_levels)?);
    Ok(tensor(&i_q, &a))
}
