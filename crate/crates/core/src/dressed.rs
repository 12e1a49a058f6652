//! Closed-form dressed-state analytics of the coupled qubit-resonator ladder:
//! eigenenergies, mixing angles, resonant transition lines and their relative
//! amplitudes.

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// One dressed level |n, +-> of the coupled ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedLevel<T: Scalar> {
    pub n: usize,
    pub branch_plus: bool,
    /// Energy in MHz, relative to the sigma_z/2 convention of the two-level
    /// model (ground state at -omega_a/2).
    pub energy: T,
}

/// Kind of a resonant transition line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineKind {
    /// |1,+> -> |g,0>, at omega + g.
    VacuumPlus,
    /// |1,-> -> |g,0>, at omega - g.
    VacuumMinus,
    /// |n+1,+> -> |n,+>, at omega + g (sqrt(n+1) - sqrt(n)).
    Inner1,
    /// |n+1,-> -> |n,->, at omega - g (sqrt(n+1) - sqrt(n)).
    Inner2,
    /// |n+1,+> -> |n,->, at omega + g (sqrt(n+1) + sqrt(n)).
    Outer3,
    /// |n+1,-> -> |n,+>, at omega - g (sqrt(n+1) + sqrt(n)).
    Outer4,
}

impl LineKind {
    pub fn label(&self) -> &'static str {
        match self {
            LineKind::VacuumPlus => "vacuum+",
            LineKind::VacuumMinus => "vacuum-",
            LineKind::Inner1 => "1",
            LineKind::Inner2 => "2",
            LineKind::Outer3 => "3",
            LineKind::Outer4 => "4",
        }
    }
}

/// One transition line of the resonant dressed ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionLine<T: Scalar> {
    /// Lower-level excitation number (0 for the vacuum lines).
    pub n: usize,
    pub kind: LineKind,
    pub frequency: T,
    /// The bare C-coefficient sqrt(n+1) +- sqrt(n); spectral heights also
    /// depend on populations, which live in the secular oracle.
    pub relative_amplitude: T,
}

/// Dressed eigenenergies omega_r (n - 1/2) +- (1/2) sqrt(Delta^2 + 4 g^2 n).
pub fn dressed_energies<T: Scalar>(n: usize, omega_r: T, delta: T, g: T) -> Result<(T, T)> {
    if n < 1 {
        return Err(Error::InvalidDimension(
            "dressed levels need n >= 1".into(),
        ));
    }
    let nf = T::from_usize(n).unwrap();
    let base = omega_r * (nf - real::<T>(0.5));
    let half_split = (delta * delta + real::<T>(4.0) * g * g * nf).sqrt() / real::<T>(2.0);
    Ok((base + half_split, base - half_split))
}

/// Mixing angle theta_n = (1/2) atan2(2 g sqrt(n), Delta), in [0, pi/2).
pub fn mixing_angle<T: Scalar>(n: usize, delta: T, g: T) -> T {
    let nf = T::from_usize(n.max(1)).unwrap();
    (real::<T>(2.0) * g * nf.sqrt()).atan2(delta) / real::<T>(2.0)
}

/// Resonant (Delta = 0) transition lines up to lower level `n_max`.
///
/// Vacuum lines sit at omega +- g with unit amplitude (C^0 = 1); each n >= 1
/// contributes four lines. Inner lines carry sqrt(n+1) + sqrt(n), outer lines
/// sqrt(n+1) - sqrt(n).
pub fn transition_lines<T: Scalar>(n_max: usize, omega: T, g: T) -> Result<Vec<TransitionLine<T>>> {
    if n_max < 1 {
        return Err(Error::InvalidDimension("n_max must be >= 1".into()));
    }
    let mut lines = vec![
        TransitionLine {
            n: 0,
            kind: LineKind::VacuumPlus,
            frequency: omega + g,
            relative_amplitude: T::one(),
        },
        TransitionLine {
            n: 0,
            kind: LineKind::VacuumMinus,
            frequency: omega - g,
            relative_amplitude: T::one(),
        },
    ];
    for n in 1..=n_max {
        let rn = T::from_usize(n).unwrap().sqrt();
        let rn1 = T::from_usize(n + 1).unwrap().sqrt();
        let inner = g * (rn1 - rn);
        let outer = g * (rn1 + rn);
        lines.push(TransitionLine {
            n,
            kind: LineKind::Inner1,
            frequency: omega + inner,
            relative_amplitude: rn1 + rn,
        });
        lines.push(TransitionLine {
            n,
            kind: LineKind::Inner2,
            frequency: omega - inner,
            relative_amplitude: rn1 + rn,
        });
        lines.push(TransitionLine {
            n,
            kind: LineKind::Outer3,
            frequency: omega + outer,
            relative_amplitude: rn1 - rn,
        });
        lines.push(TransitionLine {
            n,
            kind: LineKind::Outer4,
            frequency: omega - outer,
            relative_amplitude: rn1 - rn,
        });
    }
    Ok(lines)
}
