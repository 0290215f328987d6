//! Dense complex linear algebra shared by every module: aliases, orthonormal
//! spans, nullspaces, Hermitian eigen-decompositions and seeded random
//! matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance used for orthonormal-span insertion and nullspace rank decisions.
pub const SPAN_TOL: f64 = 1e-8;
/// Tolerance for subspace comparisons (principal angles).
pub const SUBSPACE_TOL: f64 = 1e-9;
/// Eigenvalue clustering tolerance.
pub const CLUSTER_TOL: f64 = 1e-8;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(2πi k/n)`, exact at the quarter turns.
pub fn root_of_unity(k: usize, n: usize) -> C64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
    }
    let theta = std::f64::consts::TAU * k as f64 / n as f64;
    C64::new(theta.cos(), theta.sin())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Basis vector `e_k` of `C^n`.
pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

/// `|i⟩⟨j|` in `M_n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// `‖U*U − 1‖_F`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= tol))
}

/// Column-major vectorisation; the Hilbert–Schmidt inner product becomes the
/// Euclidean one.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Incrementally built orthonormal basis of a subspace of `C^dim`.
#[derive(Clone, Debug)]
pub struct OrthonormalSpan {
    dim: usize,
    vectors: Vec<CVector>,
}

impl OrthonormalSpan {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// Adds the component of `v` orthogonal to the span, if that component is
    /// larger than `tol` relative to `‖v‖`. Returns whether the span grew.
    pub fn insert(&mut self, v: &CVector, tol: f64) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let norm = v.norm();
        if norm <= f64::MIN_POSITIVE {
            return false;
        }
        let mut w = v / C64::from(norm);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &self.vectors {
                let coeff = q.dotc(&w);
                w.axpy(-coeff, q, ONE);
            }
        }
        let r = w.norm();
        if r <= tol {
            return false;
        }
        self.vectors.push(w / C64::from(r));
        true
    }

    /// Norm of the component of `v` orthogonal to the span.
    pub fn residual(&self, v: &CVector) -> f64 {
        let mut w = v.clone();
        for q in &self.vectors {
            let coeff = q.dotc(&w);
            w.axpy(-coeff, q, ONE);
        }
        w.norm()
    }

    /// Basis as the columns of a `dim × len` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        if self.vectors.is_empty() {
            return CMatrix::zeros(self.dim, 0);
        }
        CMatrix::from_columns(&self.vectors)
    }
}

/// Orthonormal basis (as columns) of the nullspace of `a`: right singular
/// vectors whose singular value is at most `tol`.
pub fn nullspace(a: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return identity(cols);
    }
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let columns: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if columns.is_empty() {
        CMatrix::zeros(cols, 0)
    } else {
        CMatrix::from_columns(&columns)
    }
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let h = (m + m.adjoint()) * C64::from(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = if n == 0 {
        CMatrix::zeros(0, 0)
    } else {
        CMatrix::from_columns(
            &order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        )
    };
    (values, vectors)
}

/// Groups eigenvectors of a Hermitian matrix into eigenspaces whose
/// consecutive eigenvalues differ by at most `tol`.
pub fn eigen_clusters(m: &CMatrix, tol: f64) -> Vec<(f64, CMatrix)> {
    let (values, vectors) = hermitian_eigen(m);
    let mut clusters: Vec<(Vec<f64>, Vec<CVector>)> = Vec::new();
    for (k, &value) in values.iter().enumerate() {
        let column = vectors.column(k).into_owned();
        match clusters.last_mut() {
            Some((vals, cols)) if value - vals[vals.len() - 1] <= tol => {
                vals.push(value);
                cols.push(column);
            }
            _ => clusters.push((vec![value], vec![column])),
        }
    }
    clusters
        .into_iter()
        .map(|(vals, cols)| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (mean, CMatrix::from_columns(&cols))
        })
        .collect()
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues
/// are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|v| C64::from(v.max(0.0).sqrt())),
    );
    &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint()
}

/// Orthogonal projection onto the column span of an isometry `q`.
pub fn projector(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

/// Largest principal-angle residual between two subspaces given by
/// orthonormal columns: `max(‖a − P_b a‖_F, ‖b − P_a b‖_F)`. Subspaces of
/// different dimension are at distance at least one.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let ra = (a - b * (b.adjoint() * a)).norm();
    let rb = (b - a * (a.adjoint() * b)).norm();
    let gap = if a.ncols() == b.ncols() { 0.0 } else { 1.0 };
    ra.max(rb).max(gap)
}

/// Orthonormal basis of the intersection of two column spans, obtained from
/// the nullspace of `[a, −b]`.
pub fn subspace_intersection(a: &CMatrix, b: &CMatrix, tol: f64) -> CMatrix {
    let m = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return CMatrix::zeros(m, 0);
    }
    let mut stacked = CMatrix::zeros(m, a.ncols() + b.ncols());
    stacked.columns_mut(0, a.ncols()).copy_from(a);
    stacked.columns_mut(a.ncols(), b.ncols()).copy_from(&(-b));
    let null = nullspace(&stacked, tol);
    let mut span = OrthonormalSpan::new(m);
    for k in 0..null.ncols() {
        let coeffs = null.column(k).rows(0, a.ncols()).into_owned();
        span.insert(&(a * coeffs), SPAN_TOL);
    }
    span.to_matrix()
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_iterator(
        n,
        (0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    )
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = random_vector(rng, n);
    let norm = v.norm();
    v / C64::from(norm)
}

/// Ginibre matrix with independent standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    (&g + g.adjoint()) * C64::from(0.5)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = random_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_iterator(
        n,
        (0..n).map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / C64::from(d.norm())
            } else {
                ONE
            }
        }),
    );
    q * CMatrix::from_diagonal(&phases)
}

/// Full-rank random density matrix `GG*/tr(GG*)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    let p = &g * g.adjoint();
    let tr = p.trace();
    p / tr
}
