//! Energy of a finite modal superposition under the semigroup.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::block::{build_mode_block, energy, evolve_mode, StateVec};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::spectrum::ModeSpectrum;

fn unit_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() < 1.0 {
            return z;
        }
    }
}

/// One state per mode with components uniform in the unit disk, drawn in
/// mode order from a ChaCha8 stream.
pub fn random_initial_data(count: usize, seed: u64) -> Vec<StateVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = unit_disk(&mut rng);
            let v = unit_disk(&mut rng);
            let w = unit_disk(&mut rng);
            let z = unit_disk(&mut rng);
            StateVec::new(u, v, w, z)
        })
        .collect()
}

/// Total energy Σ_n ‖S_n(t)U_n‖²_W at each time.
pub fn energy_history(
    params: &SystemParams,
    spectrum: &ModeSpectrum,
    initial: &[StateVec],
    times: &[f64],
) -> Result<Vec<f64>> {
    if initial.len() != spectrum.len() {
        return Err(Error::param(
            "initial",
            format!("{} states for {} modes", initial.len(), spectrum.len()),
        ));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::param(
            "t",
            format!("times must be finite and nonnegative, got {t}"),
        ));
    }
    let blocks = spectrum
        .sigmas()
        .iter()
        .map(|&s| build_mode_block(params, s))
        .collect::<Result<Vec<_>>>()?;
    // Per-mode energies first, then a fixed-order sum over modes so the
    // result does not depend on thread scheduling.
    let per_mode: Vec<Vec<f64>> = blocks
        .par_iter()
        .zip(initial.par_iter())
        .map(|(b, u0)| {
            times
                .iter()
                .map(|&t| energy(&evolve_mode(b, u0, t), b))
                .collect()
        })
        .collect();
    Ok((0..times.len())
        .map(|k| per_mode.iter().map(|e| e[k]).sum())
        .collect())
}

/// Energy of the initial superposition.
pub fn initial_energy(
    params: &SystemParams,
    spectrum: &ModeSpectrum,
    initial: &[StateVec],
) -> Result<f64> {
    Ok(energy_history(params, spectrum, initial, &[0.0])?[0])
}
