//! Operators and states on labelled tensor-product spaces.
//!
//! A [`Signature`] lists the dimensions of the tensor legs, first leg most
//! significant (the Kronecker convention). Leg-subscripted operators such as
//! `W₁₃` are produced by [`Signature::apply_on_legs`] and
//! [`Signature::embed`], which are the only places that do index arithmetic
//! across legs.

use crate::error::{Error, Result};
use crate::linalg::{kron, kron_vec, min_eigenvalue, CMatrix, CVector, C64, ZERO};

const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn new(dims: Vec<usize>) -> Self {
        Self(dims)
    }

    pub fn single(dim: usize) -> Self {
        Self(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn legs(&self) -> usize {
        self.0.len()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn concat(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().chain(&other.0).copied().collect())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for i in (0..self.0.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.0[i + 1];
        }
        strides
    }

    fn check_legs(&self, legs: &[usize]) -> Result<()> {
        for (k, &leg) in legs.iter().enumerate() {
            if leg >= self.0.len() {
                return Err(Error::InvalidLegs(format!(
                    "leg {leg} out of range for signature {:?}",
                    self.0
                )));
            }
            if legs[..k].contains(&leg) {
                return Err(Error::InvalidLegs(format!("leg {leg} listed twice")));
            }
        }
        Ok(())
    }

    /// Offsets into the full index space of every multi-index over `legs`
    /// (enumerated with the first listed leg most significant).
    fn leg_offsets(&self, legs: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0];
        for &leg in legs {
            let mut next = Vec::with_capacity(offsets.len() * self.0[leg]);
            for &o in &offsets {
                for x in 0..self.0[leg] {
                    next.push(o + x * strides[leg]);
                }
            }
            offsets = next;
        }
        offsets
    }

    fn complement(&self, legs: &[usize]) -> Vec<usize> {
        (0..self.0.len()).filter(|l| !legs.contains(l)).collect()
    }

    /// Applies `op`, acting on the listed legs in the listed order, to `v`.
    /// Zero entries of `v` are skipped, so sparse inputs stay cheap.
    pub fn apply_on_legs(&self, op: &CMatrix, legs: &[usize], v: &CVector) -> Result<CVector> {
        self.check_legs(legs)?;
        let sub: usize = legs.iter().map(|&l| self.0[l]).product();
        if op.nrows() != sub || op.ncols() != sub {
            return Err(Error::DimensionMismatch {
                expected: sub,
                found: op.nrows(),
            });
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let strides = self.strides();
        let offsets = self.leg_offsets(legs);
        let mut out = CVector::zeros(v.len());
        for (idx, &amp) in v.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let mut col = 0;
            let mut base = idx;
            for &leg in legs {
                let x = (idx / strides[leg]) % self.0[leg];
                col = col * self.0[leg] + x;
                base -= x * strides[leg];
            }
            for (row, &off) in offsets.iter().enumerate() {
                let entry = op[(row, col)];
                if entry != ZERO {
                    out[base + off] += entry * amp;
                }
            }
        }
        Ok(out)
    }

    /// `op` on `legs` applied to every column of `x`.
    pub fn apply_left_on_legs(&self, op: &CMatrix, legs: &[usize], x: &CMatrix) -> Result<CMatrix> {
        let columns = (0..x.ncols())
            .map(|k| self.apply_on_legs(op, legs, &x.column(k).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        if columns.is_empty() {
            return Ok(x.clone());
        }
        Ok(CMatrix::from_columns(&columns))
    }

    /// `Ad(op)` on `legs`: `x ↦ op_legs · x · op_legs*`.
    pub fn conjugate_on_legs(&self, op: &CMatrix, legs: &[usize], x: &CMatrix) -> Result<CMatrix> {
        let left = self.apply_left_on_legs(op, legs, x)?;
        Ok(self
            .apply_left_on_legs(op, legs, &left.adjoint())?
            .adjoint())
    }

    /// Full matrix of `op` acting on `legs`, identity elsewhere.
    pub fn embed(&self, op: &CMatrix, legs: &[usize]) -> Result<CMatrix> {
        self.apply_left_on_legs(op, legs, &CMatrix::identity(self.dim(), self.dim()))
    }

    /// Partial trace of `m` over every leg not in `keep`; the result's legs
    /// follow the order of `keep`.
    pub fn partial_trace(&self, m: &CMatrix, keep: &[usize]) -> Result<(CMatrix, Signature)> {
        self.check_legs(keep)?;
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        let kept = self.leg_offsets(keep);
        let traced = self.leg_offsets(&self.complement(keep));
        let out = CMatrix::from_fn(kept.len(), kept.len(), |i, j| {
            traced
                .iter()
                .map(|&t| m[(kept[i] + t, kept[j] + t)])
                .sum::<C64>()
        });
        Ok((out, self.select(keep)))
    }

    /// Reduced density matrix of the pure state `psi` on the legs in `keep`.
    pub fn reduced_density(&self, psi: &CVector, keep: &[usize]) -> Result<(CMatrix, Signature)> {
        self.check_legs(keep)?;
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        let kept = self.leg_offsets(keep);
        let traced = self.leg_offsets(&self.complement(keep));
        let mut out = CMatrix::zeros(kept.len(), kept.len());
        for &t in &traced {
            for (i, &ki) in kept.iter().enumerate() {
                let a = psi[ki + t];
                if a == ZERO {
                    continue;
                }
                for (j, &kj) in kept.iter().enumerate() {
                    out[(i, j)] += a * psi[kj + t].conj();
                }
            }
        }
        Ok((out, self.select(keep)))
    }

    fn select(&self, legs: &[usize]) -> Signature {
        Signature(legs.iter().map(|&l| self.0[l]).collect())
    }
}

/// Square matrix together with the tensor signature of the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    signature: Signature,
}

impl Operator {
    pub fn new(matrix: CMatrix, signature: Signature) -> Result<Self> {
        let dim = signature.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { matrix, signature })
    }

    /// Single-leg operator.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Signature::single(n))
    }

    pub fn identity(signature: Signature) -> Self {
        let n = signature.dim();
        Self {
            matrix: CMatrix::identity(n, n),
            signature,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Kronecker product with concatenated signatures.
    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator {
            matrix: kron(&self.matrix, &other.matrix),
            signature: self.signature.concat(&other.signature),
        }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
            signature: self.signature.clone(),
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.signature != other.signature {
            return Err(Error::Domain(format!(
                "signature {:?} cannot be composed with {:?}",
                self.signature.dims(),
                other.signature.dims()
            )));
        }
        Ok(Operator {
            matrix: &self.matrix * &other.matrix,
            signature: self.signature.clone(),
        })
    }

    /// This operator placed on `legs` of the larger space `full`.
    pub fn on_legs(&self, legs: &[usize], full: &Signature) -> Result<Operator> {
        let sub: Vec<usize> = legs
            .iter()
            .map(|&l| full.dims().get(l).copied().unwrap_or(0))
            .collect();
        if sub != self.signature.dims() {
            return Err(Error::InvalidLegs(format!(
                "operator signature {:?} does not match legs {legs:?} of {:?}",
                self.signature.dims(),
                full.dims()
            )));
        }
        Ok(Operator {
            matrix: full.embed(&self.matrix, legs)?,
            signature: full.clone(),
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<CVector> {
        if state.signature != self.signature {
            return Err(Error::Domain("state and operator signatures differ".into()));
        }
        Ok(&self.matrix * &state.vector)
    }
}

/// Unit vector with a tensor signature.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    vector: CVector,
    signature: Signature,
}

impl StateVector {
    pub fn new(vector: CVector, signature: Signature) -> Result<Self> {
        if vector.len() != signature.dim() {
            return Err(Error::DimensionMismatch {
                expected: signature.dim(),
                found: vector.len(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        Ok(Self { vector, signature })
    }

    /// Normalises `vector`; fails on the zero vector.
    pub fn normalized(vector: CVector, signature: Signature) -> Result<Self> {
        let norm = vector.norm();
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(vector / C64::from(norm), signature)
    }

    pub fn single(vector: CVector) -> Result<Self> {
        let n = vector.len();
        Self::new(vector, Signature::single(n))
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            vector: kron_vec(&self.vector, &other.vector),
            signature: self.signature.concat(&other.signature),
        }
    }

    pub fn density(&self) -> DensityState {
        DensityState {
            matrix: &self.vector * self.vector.adjoint(),
            signature: self.signature.clone(),
        }
    }

    /// `|⟨self, other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.vector.dotc(&other.vector).norm_sqr()
    }
}

/// Positive semidefinite, unit-trace matrix with a tensor signature.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
    signature: Signature,
}

impl DensityState {
    pub fn new(matrix: CMatrix, signature: Signature) -> Result<Self> {
        let dim = signature.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, signature })
    }

    pub fn single(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Signature::single(n))
    }

    pub fn maximally_mixed(signature: Signature) -> Self {
        let n = signature.dim();
        Self {
            matrix: CMatrix::identity(n, n) / C64::from(n as f64),
            signature,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tensor(&self, other: &DensityState) -> DensityState {
        DensityState {
            matrix: kron(&self.matrix, &other.matrix),
            signature: self.signature.concat(&other.signature),
        }
    }

    /// `tr(ρ X)`.
    pub fn expectation(&self, x: &CMatrix) -> C64 {
        (&self.matrix * x).trace()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        let (matrix, signature) = self.signature.partial_trace(&self.matrix, keep)?;
        Ok(DensityState { matrix, signature })
    }
}

/// Kronecker product of two operators (or, via [`StateVector::tensor`], of
/// two states).
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    a.tensor(b)
}
