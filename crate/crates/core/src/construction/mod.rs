//! Parity operators, block-form Hamiltonians and their rotation into general
//! PT-symmetric pairs `(H, P)`, plus the closed-form parameter counts.

pub mod audit;
mod random;

pub use random::SystemSampler;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I, ONE};

/// Tolerance for `H = Hᵀ` when validating a system.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Tolerance for `P H* P = H` and `P² = I` when validating a system.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Signature `(m₊, m₋)` of a parity operator together with the Givens angles
/// of the rotation that carries `P₀` to `P = R P₀ Rᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParitySpecRepr", into = "ParitySpecRepr")]
pub struct ParitySpec {
    m_plus: usize,
    m_minus: usize,
    angles: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ParitySpecRepr {
    signature: [usize; 2],
    angles: Vec<f64>,
}

impl TryFrom<ParitySpecRepr> for ParitySpec {
    type Error = Error;

    fn try_from(r: ParitySpecRepr) -> Result<Self> {
        ParitySpec::new(r.signature[0], r.signature[1], r.angles)
    }
}

impl From<ParitySpec> for ParitySpecRepr {
    fn from(s: ParitySpec) -> Self {
        ParitySpecRepr { signature: [s.m_plus, s.m_minus], angles: s.angles }
    }
}

impl ParitySpec {
    pub fn new(m_plus: usize, m_minus: usize, angles: Vec<f64>) -> Result<Self> {
        check_signature(m_plus, m_minus)?;
        let d = m_plus + m_minus;
        if angles.len() != rotation_angle_count(d) {
            return Err(Error::AngleCount { expected: rotation_angle_count(d), found: angles.len() });
        }
        Ok(ParitySpec { m_plus, m_minus, angles })
    }

    /// Unrotated spec, realizing `P₀` itself.
    pub fn diagonal(m_plus: usize, m_minus: usize) -> Result<Self> {
        Self::new(m_plus, m_minus, vec![0.0; rotation_angle_count(m_plus + m_minus)])
    }

    pub fn m_plus(&self) -> usize {
        self.m_plus
    }

    pub fn m_minus(&self) -> usize {
        self.m_minus
    }

    pub fn dim(&self) -> usize {
        self.m_plus + self.m_minus
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

fn check_signature(m_plus: usize, m_minus: usize) -> Result<()> {
    if m_plus + m_minus == 0 {
        return Err(Error::InvalidSignature { m_plus, m_minus, reason: "dimension must be at least 1" });
    }
    if m_plus + m_minus > crate::linalg::MAX_DIM {
        return Err(Error::InvalidSignature { m_plus, m_minus, reason: "dimension exceeds 64" });
    }
    Ok(())
}

/// Number of Givens angles in a `d`-dimensional rotation, `d(d−1)/2`.
pub fn rotation_angle_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Real blocks of `H₀ = [[A, iB], [iBᵀ, C]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockFormRepr", into = "BlockFormRepr")]
pub struct BlockForm {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct BlockFormRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
}

impl TryFrom<BlockFormRepr> for BlockForm {
    type Error = Error;

    fn try_from(r: BlockFormRepr) -> Result<Self> {
        BlockForm::new(r.a, r.b, r.c)
    }
}

impl From<BlockForm> for BlockFormRepr {
    fn from(f: BlockForm) -> Self {
        BlockFormRepr { a: f.a, b: f.b, c: f.c }
    }
}

impl BlockForm {
    /// `a` is `m₊×m₊` symmetric, `b` is `m₊×m₋`, `c` is `m₋×m₋` symmetric.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<Vec<f64>>) -> Result<Self> {
        let (mp, mm) = (a.len(), c.len());
        check_square_symmetric(&a, "A")?;
        check_square_symmetric(&c, "C")?;
        if mp > 0 && b.len() != mp {
            return Err(Error::InvalidBlocks(format!("B has {} rows, expected {mp}", b.len())));
        }
        if mp == 0 && !b.is_empty() {
            return Err(Error::InvalidBlocks("B must be empty when A is empty".into()));
        }
        if let Some(row) = b.iter().find(|r| r.len() != mm) {
            return Err(Error::InvalidBlocks(format!("B row has {} columns, expected {mm}", row.len())));
        }
        let all = a.iter().chain(&b).chain(&c).flatten();
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBlocks("entries must be finite".into()));
        }
        check_signature(mp, mm)?;
        Ok(BlockForm { a, b, c })
    }

    /// `(m₊, m₋)`.
    pub fn signature(&self) -> (usize, usize) {
        (self.a.len(), self.c.len())
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<f64>] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<f64>] {
        &self.c
    }

    /// Number of free real parameters, `D(D+1)/2`.
    pub fn parameter_count(&self) -> usize {
        let d = self.a.len() + self.c.len();
        d * (d + 1) / 2
    }

    /// Flattened free parameters: upper triangle of `A` (row-major, with
    /// diagonal), all of `B` (row-major), upper triangle of `C`.
    pub fn to_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        push_upper(&self.a, &mut out);
        self.b.iter().for_each(|r| out.extend_from_slice(r));
        push_upper(&self.c, &mut out);
        out
    }

    /// Inverse of [`BlockForm::to_params`].
    pub fn from_params(m_plus: usize, m_minus: usize, params: &[f64]) -> Result<Self> {
        let d = m_plus + m_minus;
        if params.len() != d * (d + 1) / 2 {
            return Err(Error::InvalidBlocks(format!(
                "expected {} parameters, found {}",
                d * (d + 1) / 2,
                params.len()
            )));
        }
        let mut it = params.iter().copied();
        let a = read_upper(m_plus, &mut it);
        let b = (0..m_plus).map(|_| it.by_ref().take(m_minus).collect()).collect();
        let c = read_upper(m_minus, &mut it);
        BlockForm::new(a, b, c)
    }

    /// Sets one block entry; for `A` and `C` the mirrored entry is set too.
    pub fn set_entry(&mut self, block: Block, i: usize, j: usize, value: f64) -> Result<()> {
        let target = match block {
            Block::A => &mut self.a,
            Block::B => &mut self.b,
            Block::C => &mut self.c,
        };
        let ok = target.get(i).and_then(|r| r.get(j)).is_some();
        if !ok {
            return Err(Error::InvalidArgument(format!("{block:?}[{i},{j}] is out of range")));
        }
        target[i][j] = value;
        if block != Block::B {
            target[j][i] = value;
        }
        Ok(())
    }
}

/// Names one of the three real blocks of `H₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    C,
}

fn check_square_symmetric(m: &[Vec<f64>], name: &str) -> Result<()> {
    let n = m.len();
    if let Some(row) = m.iter().find(|r| r.len() != n) {
        return Err(Error::InvalidBlocks(format!("{name} is not square ({} x {})", n, row.len())));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOL * (1.0 + m[i][j].abs()) {
                return Err(Error::InvalidBlocks(format!("{name} is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

fn push_upper(m: &[Vec<f64>], out: &mut Vec<f64>) {
    for (i, row) in m.iter().enumerate() {
        out.extend_from_slice(&row[i..]);
    }
}

fn read_upper(n: usize, it: &mut impl Iterator<Item = f64>) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = it.next().unwrap_or(0.0);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    m
}

/// How a PT system was built, kept alongside it for reproducibility and for
/// sweeping individual block entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub signature: [usize; 2],
    pub angles: Vec<f64>,
    pub blocks: BlockForm,
}

impl Provenance {
    pub fn parity_spec(&self) -> Result<ParitySpec> {
        ParitySpec::new(self.signature[0], self.signature[1], self.angles.clone())
    }
}

/// On-disk form of a system. Unlike [`PtSystem`] it is not validated, so
/// it can also carry the asymmetric Hamiltonians used in the weight-matrix
/// demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub h: ComplexMatrix,
    pub p: ComplexMatrix,
    pub provenance: Option<Provenance>,
    pub seed: Option<u64>,
}

/// A validated pair `(H, P)`: `H` symmetric, `P` a real symmetric involution,
/// and `P H* P = H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemFile", into = "SystemFile")]
pub struct PtSystem {
    h: ComplexMatrix,
    p: ComplexMatrix,
    provenance: Option<Provenance>,
    seed: Option<u64>,
}

impl TryFrom<SystemFile> for PtSystem {
    type Error = Error;

    fn try_from(f: SystemFile) -> Result<Self> {
        let mut sys = PtSystem::new(f.h, f.p)?;
        sys.provenance = f.provenance;
        sys.seed = f.seed;
        Ok(sys)
    }
}

impl From<PtSystem> for SystemFile {
    fn from(s: PtSystem) -> Self {
        SystemFile { h: s.h, p: s.p, provenance: s.provenance, seed: s.seed }
    }
}

impl PtSystem {
    pub fn new(h: ComplexMatrix, p: ComplexMatrix) -> Result<Self> {
        if h.dim() != p.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: p.dim() });
        }
        if !h.is_finite() {
            return Err(Error::NonFinite);
        }
        validate_parity(&p, COMMUTATION_TOL)?;
        let scale = h.max_abs().max(1.0);
        if !h.is_symmetric(SYMMETRY_TOL * scale) {
            return Err(Error::InvalidSystem("H is not symmetric".into()));
        }
        let comm = pt_commutator(&h, &p, TimeReversal::Conjugation)?.max_abs();
        if comm > COMMUTATION_TOL * scale {
            return Err(Error::InvalidSystem(format!("P H* P differs from H by {comm:e}")));
        }
        Ok(PtSystem { h, p, provenance: None, seed: None })
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Checks that `p` is real, symmetric and squares to the identity.
pub fn validate_parity(p: &ComplexMatrix, tol: f64) -> Result<()> {
    if !p.is_real(tol) {
        return Err(Error::InvalidParity("P must be real".into()));
    }
    if !p.is_symmetric(tol) {
        return Err(Error::InvalidParity("P must be symmetric".into()));
    }
    let dev = p.mul(p)?.max_abs_diff(&ComplexMatrix::identity(p.dim()))?;
    if dev > tol {
        return Err(Error::InvalidParity(format!("P² differs from I by {dev:e}")));
    }
    Ok(())
}

/// `P₀ = diag(1, …, 1, −1, …, −1)` with `m_plus` leading `+1` entries.
pub fn make_p0(m_plus: usize, m_minus: usize) -> Result<ComplexMatrix> {
    check_signature(m_plus, m_minus)?;
    let diag: Vec<C64> = (0..m_plus + m_minus).map(|i| if i < m_plus { ONE } else { -ONE }).collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Ordered product of Givens rotations `G(i, j, θᵢⱼ)` over `i < j` in
/// lexicographic order. Each factor acts in the `(i, j)` plane as
/// `[[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn make_rotation(d: usize, angles: &[f64]) -> Result<ComplexMatrix> {
    if d == 0 || d > crate::linalg::MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    if angles.len() != rotation_angle_count(d) {
        return Err(Error::AngleCount { expected: rotation_angle_count(d), found: angles.len() });
    }
    // Right-multiplying by each factor only touches columns i and j.
    let mut r = vec![0.0; d * d];
    for i in 0..d {
        r[i * d + i] = 1.0;
    }
    let mut k = 0;
    for i in 0..d {
        for j in i + 1..d {
            let (s, c) = angles[k].sin_cos();
            k += 1;
            for row in 0..d {
                let ri = r[row * d + i];
                let rj = r[row * d + j];
                r[row * d + i] = c * ri + s * rj;
                r[row * d + j] = -s * ri + c * rj;
            }
        }
    }
    ComplexMatrix::from_row_major(d, r.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// `R M Rᵀ`, symmetrized so that symmetric input stays exactly symmetric.
fn conjugate_by_rotation(r: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = r.mul(m)?.mul(&r.transpose())?;
    out.symmetrize();
    Ok(out)
}

/// `P = R P₀ Rᵀ`.
pub fn make_parity(spec: &ParitySpec) -> Result<ComplexMatrix> {
    let r = make_rotation(spec.dim(), &spec.angles)?;
    conjugate_by_rotation(&r, &make_p0(spec.m_plus, spec.m_minus)?)
}

/// `H₀ = [[A, iB], [iBᵀ, C]]`.
pub fn make_h0(blocks: &BlockForm) -> ComplexMatrix {
    let (mp, mm) = blocks.signature();
    let d = mp + mm;
    let mut h = ComplexMatrix::zeros(d);
    for i in 0..mp {
        for j in 0..mp {
            h[(i, j)] = C64::new(blocks.a[i][j], 0.0);
        }
        for j in 0..mm {
            let ib = I * blocks.b[i][j];
            h[(i, mp + j)] = ib;
            h[(mp + j, i)] = ib;
        }
    }
    for i in 0..mm {
        for j in 0..mm {
            h[(mp + i, mp + j)] = C64::new(blocks.c[i][j], 0.0);
        }
    }
    h
}

/// Rotates `(H₀, P₀)` by the spec's rotation: `H = R H₀ Rᵀ`, `P = R P₀ Rᵀ`.
pub fn make_pt_system(blocks: &BlockForm, spec: &ParitySpec) -> Result<PtSystem> {
    let (mp, mm) = blocks.signature();
    if (mp, mm) != (spec.m_plus, spec.m_minus) {
        return Err(Error::InvalidSignature {
            m_plus: spec.m_plus,
            m_minus: spec.m_minus,
            reason: "blocks and parity spec disagree on the signature",
        });
    }
    let r = make_rotation(spec.dim(), &spec.angles)?;
    let h = conjugate_by_rotation(&r, &make_h0(blocks))?;
    let p = conjugate_by_rotation(&r, &make_p0(mp, mm)?)?;
    let mut sys = PtSystem::new(h, p)?;
    sys.provenance = Some(Provenance { signature: [mp, mm], angles: spec.angles.clone(), blocks: blocks.clone() });
    Ok(sys)
}

/// Free parameters of a parity operator with the given signature:
/// `d(d−1)/2 − m₊(m₊−1)/2 − m₋(m₋−1)/2`.
pub fn count_parity_params(d: usize, m_plus: usize, m_minus: usize) -> Result<usize> {
    if m_plus + m_minus != d {
        return Err(Error::InvalidSignature { m_plus, m_minus, reason: "m_plus + m_minus must equal d" });
    }
    Ok(rotation_angle_count(d) - rotation_angle_count(m_plus) - rotation_angle_count(m_minus))
}

/// Maximal signature: `m₊ = ⌈D/2⌉`, `m₋ = ⌊D/2⌋`.
pub fn maximal_signature(d: usize) -> (usize, usize) {
    (d.div_ceil(2), d / 2)
}

/// Real parameter counts of the most general `D×D` matrices in each class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterCounts {
    pub parity_max: usize,
    pub h0: usize,
    pub pt: usize,
    pub hermitian: usize,
    pub real_symmetric: usize,
}

impl ParameterCounts {
    pub fn as_array(&self) -> [usize; 5] {
        [self.parity_max, self.h0, self.pt, self.hermitian, self.real_symmetric]
    }
}

/// Closed-form counts: `¼D² − ⅛[1 − (−1)^D]`, `½D(D+1)`,
/// `¾D² + ½D − ⅛[1 − (−1)^D]`, `D²`, `½D(D+1)`.
pub fn parameter_table(d: usize) -> ParameterCounts {
    let odd = d % 2;
    ParameterCounts {
        parity_max: (d * d - odd) / 4,
        h0: d * (d + 1) / 2,
        pt: (3 * d * d + 2 * d - odd) / 4,
        hermitian: d * d,
        real_symmetric: d * (d + 1) / 2,
    }
}

/// Choice of time-reversal action when testing PT commutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeReversal {
    /// Entrywise complex conjugation.
    Conjugation,
    /// Conjugation followed by transpose.
    ConjugateTranspose,
}

/// `P T(H) P − H`, which vanishes exactly when `PT` commutes with `H`.
pub fn pt_commutator(h: &ComplexMatrix, p: &ComplexMatrix, t: TimeReversal) -> Result<ComplexMatrix> {
    let th = match t {
        TimeReversal::Conjugation => h.conj(),
        TimeReversal::ConjugateTranspose => h.adjoint(),
    };
    p.mul(&th)?.mul(p)?.sub(h)
}

pub fn pt_commutes(h: &ComplexMatrix, p: &ComplexMatrix, t: TimeReversal, tol: f64) -> Result<bool> {
    Ok(pt_commutator(h, p, t)?.max_abs() <= tol)
}

/// Membership classes for the overlap between Hermitian and PT-symmetric
/// matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixClass {
    RealSymmetric,
    Hermitian,
    PtSymmetric,
    Symmetric,
}

/// Flags every class `m` belongs to, by direct entry comparison.
/// `PtSymmetric` is only tested when a parity operator is supplied.
pub fn classify_matrix(m: &ComplexMatrix, p: Option<&ComplexMatrix>, tol: f64) -> Result<BTreeSet<MatrixClass>> {
    let mut out = BTreeSet::new();
    let symmetric = m.is_symmetric(tol);
    if symmetric {
        out.insert(MatrixClass::Symmetric);
    }
    if m.is_hermitian(tol) {
        out.insert(MatrixClass::Hermitian);
    }
    if symmetric && m.is_real(tol) {
        out.insert(MatrixClass::RealSymmetric);
    }
    if let Some(p) = p {
        if p.dim() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: p.dim() });
        }
        validate_parity(p, tol.max(COMMUTATION_TOL))?;
        if pt_commutes(m, p, TimeReversal::Conjugation, tol)? {
            out.insert(MatrixClass::PtSymmetric);
        }
    }
    Ok(out)
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}
