//! Time evolution `|a, t) = e^{−iHt}|a, 0)` and drift of inner products
//! along it.

use std::io::Write;

use crate::algebra::{build_weight_matrix, cpt_inner, pt_conjugate, pt_inner, COperator, WeightMatrix};
use crate::construction::{pt_commutator, validate_parity, PtSystem, SystemSampler, TimeReversal, COMMUTATION_TOL};
use crate::error::{Error, Result};
use crate::io::{csv_writer, fmt_f64};
use crate::linalg::{dot, eigendecompose, ComplexMatrix, Propagator, C64, DEFAULT_TOL};

pub const DEFAULT_T_MAX: f64 = 10.0;
pub const DEFAULT_STEPS: usize = 101;
/// Seed for the two random states drawn by [`nonunitarity_demo`].
pub const DEMO_SEED: u64 = 20_040_601;
/// `‖[W, H]‖∞` above this fraction of `‖H‖∞` counts as a genuine failure to
/// commute.
pub const COMMUTATOR_REL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub inner_products: Vec<C64>,
    /// `max |s(t) − s(0)|` over the samples.
    pub max_drift: f64,
}

impl EvolutionTrace {
    fn from_samples(times: Vec<f64>, inner_products: Vec<C64>) -> Self {
        let first = inner_products.first().copied().unwrap_or_default();
        let max_drift = inner_products.iter().map(|z| (z - first).norm()).fold(0.0, f64::max);
        EvolutionTrace { times, inner_products, max_drift }
    }

    /// Columns `t,re_inner,im_inner`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv_writer(writer);
        w.write_record(["t", "re_inner", "im_inner"])?;
        for (t, z) in self.times.iter().zip(&self.inner_products) {
            w.write_record([fmt_f64(*t), fmt_f64(z.re), fmt_f64(z.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

/// `steps` uniform samples of `[0, t_max]`. A zero-length interval collapses
/// to the single sample `t = 0`.
pub fn time_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 time steps, got {steps}")));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be finite and nonnegative, got {t_max}")));
    }
    if t_max == 0.0 {
        return Ok(vec![0.0]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| t_max * k as f64 / last).collect())
}

fn propagator(h: &ComplexMatrix) -> Result<Propagator> {
    Propagator::new(h, DEFAULT_TOL).map_err(|e| match e {
        Error::Defective(k) => {
            Error::ExceptionalPoint(format!("eigenvector basis condition number {k:e}; H is not diagonalizable"))
        }
        other => other,
    })
}

fn check_state(h: &ComplexMatrix, state: &[C64]) -> Result<()> {
    if state.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: state.len() });
    }
    if state.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `e^{−iHt} state`.
pub fn evolve(sys: &PtSystem, state: &[C64], t: f64) -> Result<Vec<C64>> {
    check_state(sys.h(), state)?;
    propagator(sys.h())?.apply(C64::new(0.0, -t), state)
}

fn trace_with(
    h: &ComplexMatrix,
    a: &[C64],
    b: &[C64],
    t_max: f64,
    steps: usize,
    inner: impl Fn(&[C64], &[C64]) -> Result<C64>,
) -> Result<EvolutionTrace> {
    check_state(h, a)?;
    check_state(h, b)?;
    let times = time_grid(t_max, steps)?;
    let prop = propagator(h)?;
    let samples = times
        .iter()
        .map(|&t| {
            let z = C64::new(0.0, -t);
            inner(&prop.apply(z, a)?, &prop.apply(z, b)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionTrace::from_samples(times, samples))
}

/// Samples the CPT inner product `⟨a(t)|b(t)⟩`.
pub fn unitarity_trace(
    sys: &PtSystem,
    c: &COperator,
    a: &[C64],
    b: &[C64],
    t_max: f64,
    steps: usize,
) -> Result<EvolutionTrace> {
    if c.matrix().dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: c.matrix().dim() });
    }
    trace_with(sys.h(), a, b, t_max, steps, |x, y| cpt_inner(x, y, c, sys.p()))
}

/// Samples the indefinite PT inner product `(a(t)|b(t))`.
pub fn pt_unitarity_trace(sys: &PtSystem, a: &[C64], b: &[C64], t_max: f64, steps: usize) -> Result<EvolutionTrace> {
    trace_with(sys.h(), a, b, t_max, steps, |x, y| pt_inner(x, y, sys.p()))
}

/// How the bra side of `(a, t|W|b, t)` is carried forward in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BraEvolution {
    /// `(a, t| = (a, 0| e^{iHt}`, valid when `H` is symmetric.
    #[default]
    Heisenberg,
    /// `(a, t| = [PT e^{−iHt}|a, 0)]ᵀ`, the PT conjugate of the evolved ket.
    PtConjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoVerdict {
    /// `W` fails to commute with `H`, so the weighted inner product is not
    /// conserved.
    Violation,
    /// `[W, H]` is below threshold; no conclusion about unitarity.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonunitarityReport {
    pub trace: EvolutionTrace,
    pub weight: WeightMatrix,
    /// `‖[W, H]‖∞`
    pub commutator_norm: f64,
    /// `COMMUTATOR_REL · ‖H‖∞`
    pub threshold: f64,
    pub verdict: DemoVerdict,
}

/// Builds the weight matrix of a PT-symmetric but possibly asymmetric `H`
/// and samples `(a, t|W|b, t)` for two random states drawn from
/// [`DEMO_SEED`].
pub fn nonunitarity_demo(
    h_asym: &ComplexMatrix,
    p: &ComplexMatrix,
    t_max: f64,
    steps: usize,
) -> Result<NonunitarityReport> {
    let mut sampler = SystemSampler::new(DEMO_SEED);
    let a = sampler.complex_vector(h_asym.dim());
    let b = sampler.complex_vector(h_asym.dim());
    weighted_trace(h_asym, p, &a, &b, t_max, steps, BraEvolution::Heisenberg)
}

/// [`nonunitarity_demo`] with explicit states and bra evolution.
pub fn weighted_trace(
    h: &ComplexMatrix,
    p: &ComplexMatrix,
    a: &[C64],
    b: &[C64],
    t_max: f64,
    steps: usize,
    bra: BraEvolution,
) -> Result<NonunitarityReport> {
    if h.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: p.dim() });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    check_state(h, a)?;
    check_state(h, b)?;
    validate_parity(p, COMMUTATION_TOL)?;
    let h_norm = h.norm_inf();
    let comm = pt_commutator(h, p, TimeReversal::Conjugation)?.max_abs();
    if comm > COMMUTATION_TOL * h.max_abs().max(1.0) {
        return Err(Error::InvalidSystem(format!("P H* P differs from H by {comm:e}")));
    }

    let vecs: Vec<Vec<C64>> = eigendecompose(h, DEFAULT_TOL)?.into_iter().map(|e| e.vector).collect();
    let weight = build_weight_matrix(&vecs, p)?;
    let w = weight.matrix();
    let commutator_norm = w.commutator(h)?.norm_inf();
    let threshold = COMMUTATOR_REL * h_norm;

    let times = time_grid(t_max, steps)?;
    let prop = propagator(h)?;
    let bra0 = pt_conjugate(a, p)?;
    let samples = times
        .iter()
        .map(|&t| {
            let ket = w.mul_vec(&prop.apply(C64::new(0.0, -t), b)?)?;
            let row = match bra {
                BraEvolution::Heisenberg => prop.exp(C64::new(0.0, t)).transpose().mul_vec(&bra0)?,
                BraEvolution::PtConjugate => pt_conjugate(&prop.apply(C64::new(0.0, -t), a)?, p)?,
            };
            Ok(dot(&row, &ket))
        })
        .collect::<Result<Vec<_>>>()?;

    let verdict = if commutator_norm > threshold { DemoVerdict::Violation } else { DemoVerdict::Inconclusive };
    Ok(NonunitarityReport {
        trace: EvolutionTrace::from_samples(times, samples),
        weight,
        commutator_norm,
        threshold,
        verdict,
    })
}
