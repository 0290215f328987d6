//! Finite-dimensional *-subalgebras of `M_n`: generation by span closure,
//! commutants, centres, factoriality, MASA certification and the central
//! (sector) decomposition.
//!
//! An algebra is stored as a Hilbert–Schmidt orthonormal basis. Subspace
//! comparisons go through principal angles at [`SUBSPACE_TOL`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    eigen_clusters, identity, kron, matrix_unit, nullspace, subspace_distance,
    subspace_intersection, unvectorize, vectorize, CMatrix, OrthonormalSpan, C64, CLUSTER_TOL, I,
    SPAN_TOL, SUBSPACE_TOL,
};

#[derive(Clone, Debug)]
pub struct MatrixStarAlgebra {
    ambient: usize,
    basis: Vec<CMatrix>,
    span: CMatrix,
    generators: Vec<CMatrix>,
}

impl MatrixStarAlgebra {
    fn from_span_builder(ambient: usize, span: OrthonormalSpan, generators: Vec<CMatrix>) -> Self {
        let basis = span
            .vectors()
            .iter()
            .map(|v| unvectorize(v, ambient))
            .collect();
        Self {
            ambient,
            basis,
            span: span.to_matrix(),
            generators,
        }
    }

    /// Smallest unital *-subalgebra of `M_n` containing `generators`.
    ///
    /// The span is grown from `1` by left multiplication with the generators
    /// and their adjoints; each round adds words one letter longer, so the
    /// loop stops after at most `n²` productive rounds.
    pub fn generate(ambient: usize, generators: &[CMatrix]) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::Domain("ambient dimension must be positive".into()));
        }
        for g in generators {
            if g.nrows() != ambient || g.ncols() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: g.nrows().max(g.ncols()),
                });
            }
        }
        let mut letters: Vec<CMatrix> = Vec::new();
        for g in generators {
            if g.norm() > SPAN_TOL {
                letters.push(g.clone());
                if (g - g.adjoint()).norm() > SPAN_TOL {
                    letters.push(g.adjoint());
                }
            }
        }
        let mut span = OrthonormalSpan::new(ambient * ambient);
        span.insert(&vectorize(&identity(ambient)), SPAN_TOL);
        let mut frontier = vec![identity(ambient)];
        let cap = 2 * ambient * ambient;
        let mut rounds = 0;
        while !frontier.is_empty() {
            rounds += 1;
            if rounds > cap {
                return Err(Error::IterationCap { rounds: cap });
            }
            let mut next = Vec::new();
            for b in &frontier {
                for g in &letters {
                    let word = g * b;
                    let norm = word.norm();
                    // words like E₀₁E₀₁ vanish only up to rounding; the relative
                    // test in `insert` would promote that noise to a direction
                    if norm <= SPAN_TOL * g.norm() {
                        continue;
                    }
                    if span.insert(&vectorize(&word), SPAN_TOL) {
                        next.push(word / C64::from(norm));
                    }
                }
            }
            frontier = next;
        }
        Ok(Self::from_span_builder(ambient, span, generators.to_vec()))
    }

    /// Orthonormalised span of `elements`, assumed to already be a unital
    /// *-algebra (e.g. a commutant or a compression `zMz`).
    pub fn from_span(ambient: usize, elements: &[CMatrix]) -> Self {
        let mut span = OrthonormalSpan::new(ambient * ambient);
        let scale = elements.iter().map(|e| e.norm()).fold(0.0, f64::max);
        for e in elements {
            if e.norm() > SPAN_TOL * scale {
                span.insert(&vectorize(e), SPAN_TOL);
            }
        }
        let mut out = Self::from_span_builder(ambient, span, Vec::new());
        out.generators = out.basis.clone();
        out
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        let mut span = OrthonormalSpan::new(n * n);
        for j in 0..n {
            for i in 0..n {
                span.insert(&vectorize(&matrix_unit(n, i, j)), SPAN_TOL);
            }
        }
        let generators = (0..n.saturating_sub(1))
            .map(|i| matrix_unit(n, i, i + 1))
            .collect();
        Self::from_span_builder(n, span, generators)
    }

    /// `C·1`.
    pub fn scalars(n: usize) -> Self {
        let mut span = OrthonormalSpan::new(n * n);
        span.insert(&vectorize(&identity(n)), SPAN_TOL);
        Self::from_span_builder(n, span, Vec::new())
    }

    /// Diagonal matrices `D_n`.
    pub fn diagonal(n: usize) -> Self {
        let units: Vec<CMatrix> = (0..n).map(|i| matrix_unit(n, i, i)).collect();
        let mut out = Self::from_span(n, &units);
        out.generators = units;
        out
    }

    /// `⊕_k M_{d_k} ⊗ 1_{m_k}` in standard block position, from `(d_k, m_k)`.
    pub fn block_diagonal(blocks: &[(usize, usize)]) -> Result<Self> {
        let n: usize = blocks.iter().map(|(d, m)| d * m).sum();
        let mut generators = Vec::new();
        let mut offset = 0;
        for &(d, m) in blocks {
            if d == 0 || m == 0 {
                return Err(Error::Domain("block dimensions must be positive".into()));
            }
            let place = |x: &CMatrix| {
                let mut full = CMatrix::zeros(n, n);
                full.view_mut((offset, offset), (d * m, d * m))
                    .copy_from(&kron(x, &identity(m)));
                full
            };
            generators.push(place(&identity(d)));
            for i in 0..d.saturating_sub(1) {
                generators.push(place(&matrix_unit(d, i, i + 1)));
            }
            offset += d * m;
        }
        Self::generate(n, &generators)
    }

    /// `{u x u* : x ∈ A}`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        let basis: Vec<CMatrix> = self.basis.iter().map(|b| u * b * u.adjoint()).collect();
        let mut out = Self::from_span(self.ambient, &basis);
        out.generators = self
            .generators
            .iter()
            .map(|g| u * g * u.adjoint())
            .collect();
        out
    }

    /// `A ⊗ B` generated by `a ⊗ 1` and `1 ⊗ b`.
    pub fn tensor(&self, other: &MatrixStarAlgebra) -> Result<Self> {
        let (n1, n2) = (self.ambient, other.ambient);
        let mut generators: Vec<CMatrix> = self
            .constraint_set()
            .iter()
            .map(|a| kron(a, &identity(n2)))
            .collect();
        generators.extend(
            other
                .constraint_set()
                .iter()
                .map(|b| kron(&identity(n1), b)),
        );
        Self::generate(n1 * n2, &generators)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// Basis as columns of an `n² × dim` matrix of vectorised elements.
    pub fn span_matrix(&self) -> &CMatrix {
        &self.span
    }

    /// Distance of `x` from the algebra (Hilbert–Schmidt).
    pub fn membership_residual(&self, x: &CMatrix) -> f64 {
        let v = vectorize(x);
        (&v - &self.span * (self.span.adjoint() * &v)).norm()
    }

    pub fn contains(&self, x: &CMatrix) -> bool {
        x.nrows() == self.ambient && self.membership_residual(x) <= SUBSPACE_TOL
    }

    pub fn is_abelian(&self) -> bool {
        self.commutation_residual() <= SUBSPACE_TOL
    }

    /// `max ‖[B_i, B_j]‖_F` over basis pairs.
    pub fn commutation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max((a * b - b * a).norm());
            }
        }
        worst
    }

    /// Largest residual left after projecting a product of two basis
    /// elements, or an adjoint, back onto the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            worst = worst.max(self.membership_residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.membership_residual(&(a * b)));
            }
        }
        worst
    }

    /// Elements whose commutant equals the commutant of the algebra.
    fn constraint_set(&self) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for g in &self.generators {
            out.push(g.clone());
            if (g - g.adjoint()).norm() > SPAN_TOL {
                out.push(g.adjoint());
            }
        }
        out
    }

    /// Seeded random self-adjoint element.
    pub fn random_self_adjoint<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let n = self.ambient;
        let mut h = CMatrix::zeros(n, n);
        for b in &self.basis {
            let r: f64 = rng.sample(StandardNormal);
            let s: f64 = rng.sample(StandardNormal);
            h += (b + b.adjoint()) * C64::from(0.5 * r) + (b - b.adjoint()) * (I * (0.5 * s));
        }
        h
    }
}

/// Subspace distance between two algebras in the same ambient space.
pub fn algebra_distance(a: &MatrixStarAlgebra, b: &MatrixStarAlgebra) -> f64 {
    if a.ambient != b.ambient {
        return f64::INFINITY;
    }
    subspace_distance(&a.span, &b.span)
}

/// `{X : XB = BX for all B ∈ A}`, the nullspace of `X ↦ XB − BX` stacked
/// over a generating set.
pub fn commutant(a: &MatrixStarAlgebra) -> MatrixStarAlgebra {
    let n = a.ambient;
    let constraints = a.constraint_set();
    if constraints.is_empty() {
        return MatrixStarAlgebra::full(n);
    }
    let id = identity(n);
    let mut stacked = CMatrix::zeros(n * n * constraints.len(), n * n);
    for (k, b) in constraints.iter().enumerate() {
        // column-major: vec(XB) = (Bᵀ ⊗ 1) vec X, vec(BX) = (1 ⊗ B) vec X
        let op = kron(&b.transpose(), &id) - kron(&id, b);
        stacked.rows_mut(k * n * n, n * n).copy_from(&op);
    }
    let null = nullspace(&stacked, SPAN_TOL);
    let elements: Vec<CMatrix> = (0..null.ncols())
        .map(|k| unvectorize(&null.column(k).into_owned(), n))
        .collect();
    MatrixStarAlgebra::from_span(n, &elements)
}

fn intersect(a: &MatrixStarAlgebra, b: &MatrixStarAlgebra) -> MatrixStarAlgebra {
    let q = subspace_intersection(&a.span, &b.span, SUBSPACE_TOL);
    let elements: Vec<CMatrix> = (0..q.ncols())
        .map(|k| unvectorize(&q.column(k).into_owned(), a.ambient))
        .collect();
    MatrixStarAlgebra::from_span(a.ambient, &elements)
}

/// `A ∩ A′`.
pub fn center(a: &MatrixStarAlgebra) -> MatrixStarAlgebra {
    intersect(a, &commutant(a))
}

pub fn is_factor(a: &MatrixStarAlgebra) -> bool {
    center(a).dim() == 1
}

/// Maximal abelian subalgebra test relative to `m`: `A` abelian and
/// `A = A′ ∩ M`. The condition `A = A′` is deliberately not used.
pub fn is_masa(a: &MatrixStarAlgebra, m: &MatrixStarAlgebra) -> Result<bool> {
    if a.ambient != m.ambient {
        return Err(Error::DimensionMismatch {
            expected: m.ambient,
            found: a.ambient,
        });
    }
    if let Some(r) = a
        .basis
        .iter()
        .map(|b| m.membership_residual(b))
        .find(|&r| r > SUBSPACE_TOL)
    {
        return Err(Error::NotContained(format!(
            "candidate subalgebra leaves the ambient algebra (residual {r:e})"
        )));
    }
    if !a.is_abelian() {
        return Ok(false);
    }
    let relative = intersect(&commutant(a), m);
    Ok(algebra_distance(a, &relative) <= SUBSPACE_TOL)
}

/// Dimension of `{T : T π_a(x_k) = π_b(x_k) T for all k}` for paired
/// generator images `(π_a(x_k), π_b(x_k))`.
pub fn intertwiner_dimension(pa: &[CMatrix], pb: &[CMatrix]) -> Result<usize> {
    if pa.len() != pb.len() || pa.is_empty() {
        return Err(Error::Domain(
            "intertwiner equation needs matching, non-empty generator images".into(),
        ));
    }
    let (na, nb) = (pa[0].nrows(), pb[0].nrows());
    let mut stacked = CMatrix::zeros(na * nb * pa.len(), na * nb);
    for (k, (a, b)) in pa.iter().zip(pb).enumerate() {
        if a.nrows() != na || a.ncols() != na || b.nrows() != nb || b.ncols() != nb {
            return Err(Error::DimensionMismatch {
                expected: na,
                found: a.nrows(),
            });
        }
        // T is nb × na; vec(T A) = (Aᵀ ⊗ 1_nb) vec T, vec(B T) = (1_na ⊗ B) vec T
        let op = kron(&a.transpose(), &identity(nb)) - kron(&identity(na), b);
        stacked.rows_mut(k * na * nb, na * nb).copy_from(&op);
    }
    Ok(nullspace(&stacked, SPAN_TOL).ncols())
}

/// One minimal central block `z_i M z_i ≅ M_{d_i} ⊗ 1_{m_i}`.
#[derive(Clone, Debug)]
pub struct Sector {
    pub label: usize,
    pub projection: CMatrix,
    pub block_dim: usize,
    pub multiplicity: usize,
}

impl Sector {
    pub fn rank(&self) -> usize {
        self.block_dim * self.multiplicity
    }
}

#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    pub sectors: Vec<Sector>,
    pub center_dim: usize,
    pub seed: u64,
}

impl SectorDecomposition {
    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// `‖Σ z_i − 1‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self
            .sectors
            .first()
            .map(|s| s.projection.nrows())
            .unwrap_or(0);
        let sum = self
            .sectors
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, s| acc + &s.projection);
        (sum - identity(n)).norm()
    }

    /// `max ‖z_i z_j − δ_ij z_i‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.sectors.iter().enumerate() {
            for (j, b) in self.sectors.iter().enumerate() {
                let prod = &a.projection * &b.projection;
                let r = if i == j {
                    (prod - &a.projection).norm()
                } else {
                    prod.norm()
                };
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Minimal central projections from the eigenprojections of a seeded random
/// self-adjoint central element, each compressed block verified to be a
/// factor.
pub fn sector_decompose(m: &MatrixStarAlgebra, seed: u64) -> Result<SectorDecomposition> {
    let n = m.ambient;
    let z = center(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = z.random_self_adjoint(&mut rng);

    let mut sectors = Vec::new();
    for (_, q) in eigen_clusters(&h, CLUSTER_TOL) {
        let projection = &q * q.adjoint();
        let r = q.ncols();
        let central = z.membership_residual(&projection);
        if central > 1e3 * SUBSPACE_TOL {
            return Err(Error::InternalTolerance(format!(
                "eigenprojection is not central (residual {central:e})"
            )));
        }
        let compressed: Vec<CMatrix> = m.basis.iter().map(|b| q.adjoint() * b * &q).collect();
        let block = MatrixStarAlgebra::from_span(r, &compressed);
        if !is_factor(&block) {
            return Err(Error::InternalTolerance(format!(
                "compressed block of rank {r} is not a factor"
            )));
        }
        let block_dim = exact_sqrt(block.dim()).ok_or_else(|| {
            Error::InternalTolerance(format!(
                "block algebra dimension {} is not a square",
                block.dim()
            ))
        })?;
        let multiplicity = exact_sqrt(commutant(&block).dim()).ok_or_else(|| {
            Error::InternalTolerance("block commutant dimension is not a square".into())
        })?;
        if block_dim * multiplicity != r {
            return Err(Error::InternalTolerance(format!(
                "block {block_dim}x{block_dim} with multiplicity {multiplicity} does not fill rank {r}"
            )));
        }
        sectors.push(Sector {
            label: 0,
            projection,
            block_dim,
            multiplicity,
        });
    }
    if sectors.len() != z.dim() {
        return Err(Error::InternalTolerance(format!(
            "{} eigenprojections for a centre of dimension {}",
            sectors.len(),
            z.dim()
        )));
    }
    // order by the first basis index a projection touches, then by size
    let lead = |p: &CMatrix| (0..n).find(|&k| p[(k, k)].re > 1e-6).unwrap_or(n);
    sectors.sort_by_key(|s| (lead(&s.projection), s.block_dim, s.multiplicity));
    for (i, s) in sectors.iter_mut().enumerate() {
        s.label = i;
    }
    Ok(SectorDecomposition {
        sectors,
        center_dim: z.dim(),
        seed,
    })
}

fn exact_sqrt(k: usize) -> Option<usize> {
    let r = (k as f64).sqrt().round() as usize;
    (r * r == k).then_some(r)
}
