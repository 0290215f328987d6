//! Unitary representations of finite abelian groups and their spectral
//! decomposition `U_u = Σ_χ conj(χ(u)) E(χ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{
    eigen_clusters, identity, kron, random_unitary, root_of_unity, unitarity_residual, CMatrix,
    CVector, C64, CLUSTER_TOL, I,
};

const REP_TOL: f64 = 1e-10;
const LABEL_TOL: f64 = 1e-8;

/// `u ↦ U_u`, stored for every group element.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    group: FiniteAbelianGroup,
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl UnitaryRep {
    /// Builds the representation from one unitary per cyclic factor. The
    /// generators must be unitary, commute, and satisfy `G_j^{d_j} = 1`.
    pub fn from_generators(group: &FiniteAbelianGroup, generators: Vec<CMatrix>) -> Result<Self> {
        if generators.len() != group.rank() {
            return Err(Error::RepresentationInvalid(format!(
                "{} generators supplied for a group of rank {}",
                generators.len(),
                group.rank()
            )));
        }
        let dim = generators.first().map(|g| g.nrows()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::RepresentationInvalid(
                "zero-dimensional representation".into(),
            ));
        }
        for (j, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::RepresentationInvalid(format!(
                    "generator {j} is {}x{}, expected {dim}x{dim}",
                    g.nrows(),
                    g.ncols()
                )));
            }
            let r = unitarity_residual(g);
            if r > REP_TOL {
                return Err(Error::RepresentationInvalid(format!(
                    "generator {j} is not unitary (residual {r:e})"
                )));
            }
            let d = group.orders()[j];
            let power = (0..d).fold(identity(dim), |acc, _| acc * g);
            let r = (power - identity(dim)).norm();
            if r > 1e3 * REP_TOL {
                return Err(Error::RepresentationInvalid(format!(
                    "generator {j} does not satisfy G^{d} = 1 (residual {r:e})"
                )));
            }
        }
        for a in 0..generators.len() {
            for b in (a + 1)..generators.len() {
                let r = (&generators[a] * &generators[b] - &generators[b] * &generators[a]).norm();
                if r > REP_TOL {
                    return Err(Error::RepresentationInvalid(format!(
                        "generators {a} and {b} do not commute (residual {r:e})"
                    )));
                }
            }
        }
        let powers: Vec<Vec<CMatrix>> = generators
            .iter()
            .zip(group.orders())
            .map(|(g, &d)| {
                let mut p = vec![identity(dim)];
                for k in 1..d {
                    let next = &p[k - 1] * g;
                    p.push(next);
                }
                p
            })
            .collect();
        let matrices = group
            .elements()
            .map(|u| {
                group
                    .element(u)
                    .iter()
                    .enumerate()
                    .fold(identity(dim), |acc, (j, &k)| acc * &powers[j][k])
            })
            .collect();
        Ok(Self {
            group: group.clone(),
            dim,
            matrices,
        })
    }

    /// Representation whose `k`-th basis vector (in the basis given by the
    /// columns of `basis`, or the standard one) carries character
    /// `labels[k]`, i.e. `U_u e_k = conj(χ_k(u)) e_k`.
    pub fn from_characters(
        group: &FiniteAbelianGroup,
        labels: &[usize],
        basis: Option<&CMatrix>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::RepresentationInvalid(
                "zero-dimensional representation".into(),
            ));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= group.order()) {
            return Err(Error::RepresentationInvalid(format!(
                "character index {bad} out of range"
            )));
        }
        if let Some(q) = basis {
            if q.nrows() != dim || q.ncols() != dim || unitarity_residual(q) > REP_TOL {
                return Err(Error::RepresentationInvalid(
                    "basis change is not a unitary of matching size".into(),
                ));
            }
        }
        let matrices = group
            .elements()
            .map(|u| {
                let diag = CMatrix::from_diagonal(&CVector::from_iterator(
                    dim,
                    labels.iter().map(|&chi| group.character(chi, u).conj()),
                ));
                match basis {
                    Some(q) => q * diag * q.adjoint(),
                    None => diag,
                }
            })
            .collect();
        Ok(Self {
            group: group.clone(),
            dim,
            matrices,
        })
    }

    /// Seeded random representation: random character labels in a Haar-random
    /// basis.
    pub fn random<R: Rng + ?Sized>(
        group: &FiniteAbelianGroup,
        dim: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let labels: Vec<usize> = (0..dim)
            .map(|_| rng.random_range(0..group.order()))
            .collect();
        let q = random_unitary(rng, dim);
        Self::from_characters(group, &labels, Some(&q))
    }

    pub fn trivial(group: &FiniteAbelianGroup, dim: usize) -> Self {
        Self {
            group: group.clone(),
            dim,
            matrices: vec![identity(dim); group.order()],
        }
    }

    /// Left-regular representation `λ_u δ_v = δ_{uv}` on `ℓ²(U)`.
    pub fn regular(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        let matrices = group
            .elements()
            .map(|u| {
                let mut m = CMatrix::zeros(n, n);
                for v in group.elements() {
                    m[(group.op(u, v), v)] = C64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        Self {
            group: group.clone(),
            dim: n,
            matrices,
        }
    }

    /// `u ↦ U_u ⊗ U'_u`.
    pub fn tensor(&self, other: &UnitaryRep) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::Domain(
                "tensor product of representations of different groups".into(),
            ));
        }
        Ok(Self {
            group: self.group.clone(),
            dim: self.dim * other.dim,
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| kron(a, b))
                .collect(),
        })
    }

    /// `n`-fold tensor power, `n ≥ 1`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("tensor power must be at least 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, u: usize) -> &CMatrix {
        &self.matrices[u]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `U_g` for the generator of each cyclic factor.
    pub fn generator_matrices(&self) -> Vec<&CMatrix> {
        (0..self.group.rank())
            .map(|j| &self.matrices[self.group.generator(j)])
            .collect()
    }

    /// `max_{u,v} ‖U_u U_v − U_{uv}‖_F`.
    pub fn homomorphism_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for u in self.group.elements() {
            for v in self.group.elements() {
                let r = (&self.matrices[u] * &self.matrices[v]
                    - &self.matrices[self.group.op(u, v)])
                    .norm();
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Character-labelled orthogonal projections `{E(χ)}`; one slot per element
/// of `Û`, zero outside the support.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    group: FiniteAbelianGroup,
    projections: Vec<CMatrix>,
    support: Vec<usize>,
}

impl SpectralMeasure {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.projections[0].nrows()
    }

    pub fn projection(&self, chi: usize) -> &CMatrix {
        &self.projections[chi]
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// Characters with `E(χ) ≠ 0`, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn multiplicity(&self, chi: usize) -> usize {
        self.projections[chi].trace().re.round() as usize
    }

    /// `Σ_χ conj(χ(u)) E(χ)`.
    pub fn reconstruct(&self, u: usize) -> CMatrix {
        let n = self.dim();
        self.support.iter().fold(CMatrix::zeros(n, n), |acc, &chi| {
            acc + &self.projections[chi] * self.group.character(chi, u).conj()
        })
    }

    /// `max_u ‖U_u − Σ_χ conj(χ(u)) E(χ)‖_F`.
    pub fn reconstruction_residual(&self, rep: &UnitaryRep) -> f64 {
        self.group
            .elements()
            .map(|u| (rep.get(u) - self.reconstruct(u)).norm())
            .fold(0.0, f64::max)
    }
}

/// Spectral decomposition by simultaneous diagonalisation of the generator
/// unitaries through one seeded random Hermitian combination.
pub fn snag_decompose(rep: &UnitaryRep, seed: u64) -> Result<SpectralMeasure> {
    let group = rep.group();
    let n = rep.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generators = rep.generator_matrices();
    let mut h = CMatrix::zeros(n, n);
    for g in &generators {
        let r: f64 = rng.sample(StandardNormal);
        let s: f64 = rng.sample(StandardNormal);
        let sym = *g + g.adjoint();
        let anti = *g - g.adjoint();
        h += sym * C64::from(r) + anti * (I * s);
    }

    let mut projections = vec![CMatrix::zeros(n, n); group.order()];
    for (_, q) in eigen_clusters(&h, CLUSTER_TOL) {
        let r = q.ncols();
        let mut label = Vec::with_capacity(generators.len());
        for (j, g) in generators.iter().enumerate() {
            let block = q.adjoint() * *g * &q;
            let mu = block.trace() / r as f64;
            let off = (&block - identity(r) * mu).norm();
            if off > LABEL_TOL {
                return Err(Error::SpectralMismatch {
                    eigenvalue: format!("{mu} (eigenspace not joint, residual {off:e})"),
                    tolerance: LABEL_TOL,
                });
            }
            let d = group.orders()[j];
            // U_g acts on the χ-eigenspace as conj(χ(g)) = exp(−2πi γ_j / d_j)
            let k = (0..d).find(|&k| (mu - root_of_unity((d - k) % d, d)).norm() <= LABEL_TOL);
            match k {
                Some(k) => label.push(k),
                None => {
                    return Err(Error::SpectralMismatch {
                        eigenvalue: format!("{mu}"),
                        tolerance: LABEL_TOL,
                    })
                }
            }
        }
        let chi = group.index_of(&label)?;
        projections[chi] += &q * q.adjoint();
    }
    let support = (0..group.order())
        .filter(|&chi| projections[chi].trace().re > 0.5)
        .collect();
    Ok(SpectralMeasure {
        group: group.clone(),
        projections,
        support,
    })
}

/// `χ ↦ rank E(χ)`, indexed by the dual-group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicities(Vec<usize>);

impl Multiplicities {
    pub fn get(&self, chi: usize) -> usize {
        self.0[chi]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&chi| self.0[chi] > 0).collect()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn rep_multiplicities(rep: &UnitaryRep, seed: u64) -> Result<Multiplicities> {
    let measure = snag_decompose(rep, seed)?;
    Ok(Multiplicities(
        (0..rep.group().order())
            .map(|chi| measure.multiplicity(chi))
            .collect(),
    ))
}

/// Unitary equivalence up to multiplicity: equal character supports.
pub fn quasi_equivalent(r1: &UnitaryRep, r2: &UnitaryRep, seed: u64) -> Result<bool> {
    if r1.group() != r2.group() {
        return Err(Error::Domain("representations of different groups".into()));
    }
    Ok(rep_multiplicities(r1, seed)?.support() == rep_multiplicities(r2, seed)?.support())
}
