//! The generator restricted to a single eigenmode of A.
//!
//! In coordinates (u, v, w, z) with w = u_t and z = v_t the mode-σ block is
//!
//! ```text
//! [ 0        0     1          0        ]
//! [ 0        0     0          1        ]
//! [ -ασ²/m   0     0          -γσ/m    ]    m = 1 + κσ^β
//! [ 0        -ασ   γσ         -δσ^θ    ]
//! ```
//!
//! and the phase-space norm is ‖U‖² = ασ²|u|² + ασ|v|² + m|w|² + |z|².
//! Under D = diag(√weights) the block becomes D·B·D⁻¹ = S − δσ^θ e₄e₄ᵀ with S
//! skew-symmetric; eigenvalues, resolvents and exponentials are computed in
//! that scaled basis and mapped back.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4, CVector4};
use crate::params::SystemParams;

/// Coefficients of one mode in the four fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVec {
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub z: Complex64,
}

impl StateVec {
    pub fn new(u: Complex64, v: Complex64, w: Complex64, z: Complex64) -> Self {
        StateVec { u, v, w, z }
    }

    pub fn real(u: f64, v: f64, w: f64, z: f64) -> Self {
        StateVec::new(u.into(), v.into(), w.into(), z.into())
    }

    pub fn zero() -> Self {
        StateVec::default()
    }

    pub fn to_vector(&self) -> CVector4 {
        CVector4::new(self.u, self.v, self.w, self.z)
    }

    pub fn from_vector(x: &CVector4) -> Self {
        StateVec::new(x[0], x[1], x[2], x[3])
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.u, self.v, self.w, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl std::ops::Add for StateVec {
    type Output = StateVec;
    fn add(self, o: StateVec) -> StateVec {
        StateVec::new(self.u + o.u, self.v + o.v, self.w + o.w, self.z + o.z)
    }
}

impl std::ops::Sub for StateVec {
    type Output = StateVec;
    fn sub(self, o: StateVec) -> StateVec {
        StateVec::new(self.u - o.u, self.v - o.v, self.w - o.w, self.z - o.z)
    }
}

impl std::ops::Mul<Complex64> for StateVec {
    type Output = StateVec;
    fn mul(self, c: Complex64) -> StateVec {
        StateVec::new(self.u * c, self.v * c, self.w * c, self.z * c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeBlock {
    sigma: f64,
    matrix: Matrix4<f64>,
    weights: [f64; 4],
    scaled: Matrix4<f64>,
}

pub fn build_mode_block(params: &SystemParams, sigma: f64) -> Result<ModeBlock> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(
            "sigma",
            format!("must be positive and finite, got {sigma}"),
        ));
    }
    let alpha = params.alpha();
    let gamma = params.gamma();
    let m = params.inertia(sigma);
    let damping = params.damping(sigma);

    let mut b = Matrix4::zeros();
    b[(0, 2)] = 1.0;
    b[(1, 3)] = 1.0;
    b[(2, 0)] = -alpha * sigma * sigma / m;
    b[(2, 3)] = -gamma * sigma / m;
    b[(3, 1)] = -alpha * sigma;
    b[(3, 2)] = gamma * sigma;
    b[(3, 3)] = -damping;

    let weights = [alpha * sigma * sigma, alpha * sigma, m, 1.0];

    let plate = alpha.sqrt() * sigma / m.sqrt();
    let wave = (alpha * sigma).sqrt();
    let coupling = gamma * sigma / m.sqrt();
    let mut k = Matrix4::zeros();
    k[(0, 2)] = plate;
    k[(2, 0)] = -plate;
    k[(1, 3)] = wave;
    k[(3, 1)] = -wave;
    k[(2, 3)] = -coupling;
    k[(3, 2)] = coupling;
    k[(3, 3)] = -damping;

    Ok(ModeBlock {
        sigma,
        matrix: b,
        weights,
        scaled: k,
    })
}

impl ModeBlock {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The generator block in (u, v, w, z) coordinates.
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    /// D·B·D⁻¹ with D = diag(√weights): skew-symmetric up to the damping entry.
    pub fn scaled_matrix(&self) -> &Matrix4<f64> {
        &self.scaled
    }

    pub(crate) fn sqrt_weights(&self) -> [f64; 4] {
        self.weights.map(f64::sqrt)
    }

    /// D·x
    pub(crate) fn to_scaled(&self, x: &StateVec) -> CVector4 {
        let d = self.sqrt_weights();
        let v = x.to_vector();
        CVector4::new(v[0] * d[0], v[1] * d[1], v[2] * d[2], v[3] * d[3])
    }

    /// D⁻¹·y
    pub(crate) fn unscale(&self, y: &CVector4) -> StateVec {
        let d = self.sqrt_weights();
        StateVec::new(y[0] / d[0], y[1] / d[1], y[2] / d[2], y[3] / d[3])
    }

    /// B·x in original coordinates.
    pub fn apply(&self, x: &StateVec) -> StateVec {
        StateVec::from_vector(&(linalg::complexify(&self.matrix) * x.to_vector()))
    }
}

/// ‖U‖_W for the block's weights.
pub fn weighted_norm(state: &StateVec, block: &ModeBlock) -> f64 {
    energy(state, block).sqrt()
}

/// Squared weighted norm ‖U‖²_W (the energy up to the factor ½).
pub fn energy(state: &StateVec, block: &ModeBlock) -> f64 {
    state
        .components()
        .iter()
        .zip(block.weights)
        .map(|(c, w)| w * c.norm_sqr())
        .sum()
}

/// Weighted inner product ⟨x, y⟩_W, linear in the first slot.
pub fn weighted_inner(x: &StateVec, y: &StateVec, block: &ModeBlock) -> Complex64 {
    x.components()
        .iter()
        .zip(y.components())
        .zip(block.weights)
        .map(|((a, b), w)| a * b.conj() * w)
        .sum()
}

/// Re⟨BU, U⟩_W + δσ^θ|z|², evaluated from the unscaled block. Zero up to
/// roundoff.
pub fn dissipativity_defect(state: &StateVec, block: &ModeBlock, params: &SystemParams) -> f64 {
    let bu = block.apply(state);
    weighted_inner(&bu, state, block).re + params.damping(block.sigma) * state.z.norm_sqr()
}

/// Eigenpair of a block in original coordinates, with unit Euclidean
/// eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub value: Complex64,
    pub vector: CVector4,
}

fn by_real_then_imag(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// The four eigenvalues, sorted by real part then imaginary part.
pub fn block_spectrum(block: &ModeBlock) -> Result<[Complex64; 4]> {
    let mut ev = linalg::real_eigenvalues(&block.scaled)
        .ok_or(Error::EigenNonConvergence { sigma: block.sigma })?;
    ev.sort_by(by_real_then_imag);
    Ok(ev)
}

/// Eigenvalues with eigenvectors, sorted as in [`block_spectrum`].
pub fn block_eigenpairs(block: &ModeBlock) -> Result<[Eigenpair; 4]> {
    let (values, scaled_vectors) = scaled_eigenpairs(block)?;
    let d = block.sqrt_weights();
    Ok(std::array::from_fn(|i| {
        let y = scaled_vectors[i];
        let x = CVector4::new(y[0] / d[0], y[1] / d[1], y[2] / d[2], y[3] / d[3]);
        Eigenpair {
            value: values[i],
            vector: x / Complex64::new(x.norm(), 0.0),
        }
    }))
}

fn scaled_eigenpairs(block: &ModeBlock) -> Result<([Complex64; 4], [CVector4; 4])> {
    let values = block_spectrum(block)?;
    let k = linalg::complexify(&block.scaled);
    let vectors = values.map(|lam| {
        let shifted = k - CMatrix4::identity() * lam;
        linalg::null_vector(&shifted)
    });
    Ok((values, vectors))
}

/// Largest real part among the block's eigenvalues.
pub fn block_abscissa(block: &ModeBlock) -> Result<f64> {
    Ok(block_spectrum(block)?
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Eigenvector conditioning above which evolution switches to the series.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionPath {
    Identity,
    Eigen,
    Series,
}

/// exp(tB)·state0.
pub fn evolve_mode(block: &ModeBlock, state0: &StateVec, t: f64) -> StateVec {
    evolve_mode_traced(block, state0, t).0
}

/// [`evolve_mode`] together with the method actually used.
pub fn evolve_mode_traced(
    block: &ModeBlock,
    state0: &StateVec,
    t: f64,
) -> (StateVec, EvolutionPath) {
    assert!(t >= 0.0, "evolution time must be nonnegative, got {t}");
    if t == 0.0 {
        return (*state0, EvolutionPath::Identity);
    }
    let y0 = block.to_scaled(state0);
    if let Ok((values, vectors)) = scaled_eigenpairs(block) {
        let v = CMatrix4::from_columns(&vectors);
        if linalg::condition_number(&v) < EIGEN_CONDITION_LIMIT {
            if let Some(c) = v.lu().solve(&y0) {
                let growth = CVector4::from_iterator(
                    values
                        .iter()
                        .zip(c.iter())
                        .map(|(l, ci)| (l * t).exp() * ci),
                );
                return (block.unscale(&(v * growth)), EvolutionPath::Eigen);
            }
        }
    }
    (evolve_series(block, &y0, t), EvolutionPath::Series)
}

fn evolve_series(block: &ModeBlock, y0: &CVector4, t: f64) -> StateVec {
    let e = linalg::expm_scaling_squaring(&(block.scaled * t));
    block.unscale(&(linalg::complexify(&e) * y0))
}

/// Series path only; exposed so both evolution routes can be compared.
pub fn evolve_mode_series(block: &ModeBlock, state0: &StateVec, t: f64) -> StateVec {
    assert!(t >= 0.0, "evolution time must be nonnegative, got {t}");
    evolve_series(block, &block.to_scaled(state0), t)
}
