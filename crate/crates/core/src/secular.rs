//! Secular-approximation oracle for the resonant strong-coupling regime:
//! dressed-ladder transition rates, steady-state populations, linewidths and
//! the analytic transmission spectrum.

use num_complex::Complex;

use crate::device::{bose_einstein, DeviceParams};
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Tail term below which the population recursion is considered converged.
const TAIL_TOL: f64 = 1e-14;
/// Hard cap on the recursion depth.
const MAX_LADDER: usize = 10_000;

/// Thermal occupations entering the secular rates.
#[derive(Clone, Copy, Debug)]
pub struct SecularRates<T: Scalar> {
    pub n_th: T,
    pub n_th_prime: T,
    pub kappa: T,
    pub gamma_q: T,
}

impl<T: Scalar> SecularRates<T> {
    pub fn from_params(params: &DeviceParams<T>, qubit_freq: T) -> Self {
        Self {
            n_th: bose_einstein(params.omega_r, params.temperature),
            n_th_prime: bose_einstein(qubit_freq, params.temperature),
            kappa: params.kappa,
            gamma_q: params.gamma_q,
        }
    }

    /// gamma_{g,1}: upward rate out of |g,0>.
    pub fn up_from_ground(&self) -> T {
        self.gamma_q / real::<T>(2.0) * self.n_th_prime
            + self.kappa / real::<T>(2.0) * self.n_th
    }

    /// gamma_{1,g}: downward rate from the n = 1 doublet to |g,0>.
    pub fn down_to_ground(&self) -> T {
        self.gamma_q / real::<T>(2.0) * (self.n_th_prime + T::one())
            + self.kappa / real::<T>(2.0) * (self.n_th + T::one())
    }

    /// gamma_{n,n+1} for n >= 1.
    pub fn up(&self, n: usize) -> T {
        assert!(n >= 1);
        let factor = real::<T>(2.0 * n as f64 + 1.0);
        self.gamma_q / real::<T>(4.0) * self.n_th_prime
            + self.kappa / real::<T>(4.0) * self.n_th * factor
    }

    /// gamma_{n,n-1} for n >= 2.
    pub fn down(&self, n: usize) -> T {
        assert!(n >= 2);
        let factor = real::<T>(2.0 * n as f64 - 1.0);
        self.gamma_q / real::<T>(4.0) * (self.n_th_prime + T::one())
            + self.kappa / real::<T>(4.0) * (self.n_th + T::one()) * factor
    }

    /// Linewidth beta of the vacuum transitions |1,eta> -> |g,0>.
    pub fn beta(&self) -> T {
        self.down_to_ground() / real::<T>(2.0) + self.up(1) + self.up_from_ground()
    }

    /// Linewidth alpha_n of the |n+1,eta> -> |n,xi> transitions, n >= 1.
    pub fn alpha(&self, n: usize) -> T {
        assert!(n >= 1);
        if n == 1 {
            self.down(2) + self.up(2) + self.up(1) + self.down_to_ground() / real::<T>(2.0)
        } else {
            self.down(n + 1) + self.up(n + 1) + self.up(n) + self.down(n)
        }
    }
}

/// Steady-state populations of the dressed ladder.
#[derive(Clone, Debug)]
pub struct SecularState<T: Scalar> {
    /// rho_g of |g,0>.
    pub ground: T,
    /// rho_n of each |n,+> (equal to |n,->), n starting at 1.
    pub doublets: Vec<T>,
}

impl<T: Scalar> SecularState<T> {
    pub fn norm_sum(&self) -> T {
        self.ground + real::<T>(2.0) * self.doublets.iter().cloned().sum::<T>()
    }
}

/// Solves the population recursion rho_{n+1} = (gamma_{n,n+1}/gamma_{n+1,n})
/// rho_n with 2 sum rho_n + rho_g = 1, extending the ladder until the tail
/// term drops below 1e-14.
pub fn secular_populations<T: Scalar>(rates: &SecularRates<T>) -> Result<SecularState<T>> {
    let mut relative = Vec::new();
    let mut current = rates.up_from_ground() / rates.down_to_ground();
    relative.push(current);
    let mut n = 1usize;
    while current > real(TAIL_TOL) {
        if n >= MAX_LADDER {
            return Err(Error::NonConvergentTail);
        }
        current = current * rates.up(n) / rates.down(n + 1);
        relative.push(current);
        n += 1;
    }
    let total = T::one() + real::<T>(2.0) * relative.iter().cloned().sum::<T>();
    let ground = T::one() / total;
    let doublets = relative.iter().map(|&r| r * ground).collect();
    Ok(SecularState { ground, doublets })
}

/// Analytic transmission t(omega_p) = i kappa <a>_ss / epsilon from the
/// secular first-order coherences.
pub fn secular_transmission<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    state: &SecularState<T>,
    rates: &SecularRates<T>,
    probe: T,
) -> Result<Complex<T>> {
    if params.epsilon <= T::zero() {
        return Err(Error::UndefinedTransmission);
    }
    let omega = params.omega_r;
    let g = params.g;
    let eps = params.epsilon;
    let _ = qubit_freq;

    let mut mean_a = Complex::new(T::zero(), T::zero());
    let sqrt2 = real::<T>(2.0).sqrt();
    let minus_i = Complex::new(T::zero(), -T::one());

    // vacuum doublet: |1,eta> -> |g,0> at omega + eta g; the drive matrix
    // element is eps/(2 sqrt2) for H_p = (eps/2)(a + a^dag)
    let beta = rates.beta();
    let pop_diff0 = state.ground - state.doublets[0];
    for eta in [T::one(), -T::one()] {
        let omega_trans = omega + eta * g;
        let denom = Complex::new(beta, omega_trans - probe);
        let coherence = minus_i
            * Complex::new(eps / (real::<T>(2.0) * sqrt2) * pop_diff0, T::zero())
            / denom;
        mean_a += coherence / Complex::new(sqrt2, T::zero());
    }

    // higher rungs: |n+1,eta> -> |n,xi>
    for (idx, window) in state.doublets.windows(2).enumerate() {
        let n = idx + 1;
        let pop_diff = window[0] - window[1];
        let alpha = rates.alpha(n);
        let rn = T::from_usize(n).unwrap().sqrt();
        let rn1 = T::from_usize(n + 1).unwrap().sqrt();
        for eta in [T::one(), -T::one()] {
            for xi in [T::one(), -T::one()] {
                let c = rn1 + eta * xi * rn;
                let omega_trans = omega + eta * rn1 * g - xi * rn * g;
                let denom = Complex::new(alpha, omega_trans - probe);
                let coherence =
                    minus_i * Complex::new(c * eps / real::<T>(4.0) * pop_diff, T::zero()) / denom;
                mean_a += coherence * Complex::new(c / real::<T>(2.0), T::zero());
            }
        }
    }

    let i_kappa = Complex::new(T::zero(), params.kappa);
    Ok(i_kappa * mean_a / Complex::new(eps, T::zero()))
}

/// Full analytic spectrum over a probe grid.
pub fn secular_spectrum<T: Scalar>(
    params: &DeviceParams<T>,
    qubit_freq: T,
    probe_grid: &[T],
) -> Result<(SecularState<T>, Vec<Complex<T>>)> {
    let rates = SecularRates::from_params(params, qubit_freq);
    let state = secular_populations(&rates)?;
    let t: Vec<Complex<T>> = probe_grid
        .iter()
        .map(|&p| secular_transmission(params, qubit_freq, &state, &rates, p))
        .collect::<Result<_>>()?;
    Ok((state, t))
}
