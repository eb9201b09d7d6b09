use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{make_pt_system, rotation_angle_count, BlockForm, ParitySpec, PtSystem};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::spectral::{classify_phase, Phase};

/// Seeded generator for parity specs, block forms and whole systems.
///
/// The stream is ChaCha8 seeded through `seed_from_u64`, so a given seed
/// produces the same draws on every platform. Angles are uniform on
/// `[0, 2π)`, block entries uniform on `[−1, 1)`, with the `B` block further
/// scaled by the coupling factor (1 by default). Draw order for a system is:
/// angles, upper triangle of `A` (row-major), `B` (row-major), upper
/// triangle of `C`.
#[derive(Clone, Debug)]
pub struct SystemSampler {
    rng: ChaCha8Rng,
    coupling: f64,
}

impl SystemSampler {
    pub fn new(seed: u64) -> Self {
        SystemSampler { rng: ChaCha8Rng::seed_from_u64(seed), coupling: 1.0 }
    }

    /// Scales every `B` entry. Small couplings keep PT symmetry unbroken far
    /// more often, which makes rejection sampling of unbroken systems cheap
    /// in higher dimensions.
    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn angles(&mut self, d: usize) -> Vec<f64> {
        (0..rotation_angle_count(d)).map(|_| self.rng.random_range(0.0..TAU)).collect()
    }

    pub fn parity_spec(&mut self, m_plus: usize, m_minus: usize) -> Result<ParitySpec> {
        let angles = self.angles(m_plus + m_minus);
        ParitySpec::new(m_plus, m_minus, angles)
    }

    pub fn blocks(&mut self, m_plus: usize, m_minus: usize) -> Result<BlockForm> {
        let a = self.symmetric(m_plus);
        let g = self.coupling;
        let b = (0..m_plus).map(|_| (0..m_minus).map(|_| g * self.rng.random_range(-1.0..1.0)).collect()).collect();
        let c = self.symmetric(m_minus);
        BlockForm::new(a, b, c)
    }

    fn symmetric(&mut self, n: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = self.rng.random_range(-1.0..1.0);
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        m
    }

    pub fn system(&mut self, m_plus: usize, m_minus: usize) -> Result<PtSystem> {
        let spec = self.parity_spec(m_plus, m_minus)?;
        let blocks = self.blocks(m_plus, m_minus)?;
        make_pt_system(&blocks, &spec)
    }

    /// Draws systems until one is in the unbroken phase.
    pub fn unbroken_system(
        &mut self,
        m_plus: usize,
        m_minus: usize,
        max_attempts: usize,
        tol: f64,
    ) -> Result<PtSystem> {
        for _ in 0..max_attempts {
            let sys = self.system(m_plus, m_minus)?;
            if matches!(classify_phase(&sys, tol)?.phase, Phase::Unbroken) {
                return Ok(sys);
            }
        }
        Err(Error::InvalidArgument(format!(
            "no unbroken ({m_plus}, {m_minus}) system in {max_attempts} draws at coupling {}",
            self.coupling
        )))
    }

    /// Vector with real and imaginary parts uniform on `[−1, 1)`.
    pub fn complex_vector(&mut self, d: usize) -> Vec<C64> {
        (0..d)
            .map(|_| {
                let re = self.rng.random_range(-1.0..1.0);
                let im = self.rng.random_range(-1.0..1.0);
                C64::new(re, im)
            })
            .collect()
    }
}
