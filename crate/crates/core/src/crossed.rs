//! The crossed product `M ⋊_α U` for the inner action `α_u = Ad(U_u)`, in
//! both pictures on `H ⊗ ℓ²(U)`, and the convolution representation.

use crate::algebra::{algebra_distance, center, is_factor, MatrixStarAlgebra};
use crate::error::{Error, Result};
use crate::kt::coupling_uw;
use crate::linalg::{identity, kron, CMatrix};
use crate::rep::UnitaryRep;

/// Subspace residual allowed between the two pictures.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// `(M ⊗ 1) ∨ {U_u ⊗ λ_u}`.
    Schrodinger,
    /// `Ad(U(W)*)(M ⊗ 1) ∨ (1 ⊗ λ(U))`.
    Heisenberg,
}

impl Picture {
    pub fn as_str(&self) -> &'static str {
        match self {
            Picture::Schrodinger => "schrodinger",
            Picture::Heisenberg => "heisenberg",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrossedProduct {
    algebra: MatrixStarAlgebra,
    picture: Picture,
    system: MatrixStarAlgebra,
    rep: UnitaryRep,
}

impl CrossedProduct {
    pub fn algebra(&self) -> &MatrixStarAlgebra {
        &self.algebra
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn system(&self) -> &MatrixStarAlgebra {
        &self.system
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

fn check_dims(m: &MatrixStarAlgebra, rep: &UnitaryRep) -> Result<()> {
    if m.ambient() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.ambient(),
            found: rep.dim(),
        });
    }
    Ok(())
}

/// Generators `U_g ⊗ λ_g` (or `1 ⊗ λ_g`) over the cyclic generators `g`.
fn translations(rep: &UnitaryRep, coupled: bool) -> Vec<CMatrix> {
    let group = rep.group();
    let lambda = UnitaryRep::regular(group);
    (0..group.rank())
        .map(|j| {
            let g = group.generator(j);
            let system = if coupled {
                rep.get(g).clone()
            } else {
                identity(rep.dim())
            };
            kron(&system, lambda.get(g))
        })
        .collect()
}

pub fn build_schrodinger(m: &MatrixStarAlgebra, rep: &UnitaryRep) -> Result<CrossedProduct> {
    check_dims(m, rep)?;
    let n = rep.group().order();
    let mut generators: Vec<CMatrix> = m
        .generators()
        .iter()
        .map(|x| kron(x, &identity(n)))
        .collect();
    generators.extend(translations(rep, true));
    Ok(CrossedProduct {
        algebra: MatrixStarAlgebra::generate(rep.dim() * n, &generators)?,
        picture: Picture::Schrodinger,
        system: m.clone(),
        rep: rep.clone(),
    })
}

pub fn build_heisenberg(m: &MatrixStarAlgebra, rep: &UnitaryRep) -> Result<CrossedProduct> {
    check_dims(m, rep)?;
    let n = rep.group().order();
    let uw = coupling_uw(rep).matrix().clone();
    let mut generators: Vec<CMatrix> = m
        .generators()
        .iter()
        .map(|x| uw.adjoint() * kron(x, &identity(n)) * &uw)
        .collect();
    generators.extend(translations(rep, false));
    Ok(CrossedProduct {
        algebra: MatrixStarAlgebra::generate(rep.dim() * n, &generators)?,
        picture: Picture::Heisenberg,
        system: m.clone(),
        rep: rep.clone(),
    })
}

/// `M ⊗ λ(U)″`, the uncoupled algebra before the interaction.
pub fn uncoupled_tensor(m: &MatrixStarAlgebra, rep: &UnitaryRep) -> Result<MatrixStarAlgebra> {
    check_dims(m, rep)?;
    let lambda = UnitaryRep::regular(rep.group());
    let translations = MatrixStarAlgebra::generate(
        lambda.dim(),
        &lambda
            .generator_matrices()
            .into_iter()
            .cloned()
            .collect::<Vec<_>>(),
    )?;
    m.tensor(&translations)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Distance between `Ad(U(W)*)` of the Schrödinger algebra and the
    /// Heisenberg algebra.
    pub forward: f64,
    /// Distance between `Ad(U(W))` of the Heisenberg algebra and the
    /// Schrödinger algebra.
    pub backward: f64,
}

impl EquivalenceReport {
    pub fn residual(&self) -> f64 {
        self.forward.max(self.backward)
    }
}

/// Checks that `Ad(U(W)⁻¹)` carries the Schrödinger picture onto the
/// Heisenberg picture and `Ad(U(W))` carries it back.
pub fn alpha_w_equivalence(
    schrodinger: &CrossedProduct,
    heisenberg: &CrossedProduct,
    rep: &UnitaryRep,
) -> Result<EquivalenceReport> {
    if schrodinger.picture != Picture::Schrodinger || heisenberg.picture != Picture::Heisenberg {
        return Err(Error::Domain(
            "expected one crossed product in each picture".into(),
        ));
    }
    let uw = coupling_uw(rep).matrix().clone();
    if uw.nrows() != schrodinger.algebra.ambient() || uw.nrows() != heisenberg.algebra.ambient() {
        return Err(Error::DimensionMismatch {
            expected: schrodinger.algebra.ambient(),
            found: uw.nrows(),
        });
    }
    let report = EquivalenceReport {
        forward: algebra_distance(
            &schrodinger.algebra.conjugate(&uw.adjoint()),
            &heisenberg.algebra,
        ),
        backward: algebra_distance(&heisenberg.algebra.conjugate(&uw), &schrodinger.algebra),
    };
    if report.residual() > EQUIVALENCE_TOL {
        return Err(Error::EquivalenceFailure {
            residual: report.residual(),
        });
    }
    Ok(report)
}

fn check_function(f: &[CMatrix], rep: &UnitaryRep) -> Result<()> {
    if f.len() != rep.group().order() {
        return Err(Error::Domain(format!(
            "function has {} values on a group of order {}",
            f.len(),
            rep.group().order()
        )));
    }
    for x in f {
        if x.nrows() != rep.dim() || x.ncols() != rep.dim() {
            return Err(Error::DimensionMismatch {
                expected: rep.dim(),
                found: x.nrows(),
            });
        }
    }
    Ok(())
}

/// `λ^M(F) = Σ_u (F(u) ⊗ 1)(U_u ⊗ λ_u)`, counting measure.
pub fn convolution_rep(f: &[CMatrix], rep: &UnitaryRep) -> Result<CMatrix> {
    check_function(f, rep)?;
    let group = rep.group();
    let lambda = UnitaryRep::regular(group);
    let n = group.order();
    Ok(group
        .elements()
        .fold(CMatrix::zeros(rep.dim() * n, rep.dim() * n), |acc, u| {
            acc + kron(&(&f[u] * rep.get(u)), lambda.get(u))
        }))
}

/// `(F₁ ∗ F₂)(u) = Σ_v F₁(v) α_v(F₂(v⁻¹u))` with `α_v = Ad(U_v)`.
pub fn convolve(f1: &[CMatrix], f2: &[CMatrix], rep: &UnitaryRep) -> Result<Vec<CMatrix>> {
    check_function(f1, rep)?;
    check_function(f2, rep)?;
    let group = rep.group();
    Ok(group
        .elements()
        .map(|u| {
            group
                .elements()
                .fold(CMatrix::zeros(rep.dim(), rep.dim()), |acc, v| {
                    let inner = &f2[group.difference(u, v)];
                    acc + &f1[v] * rep.get(v) * inner * rep.get(v).adjoint()
                })
        })
        .collect())
}

/// Centre of `M ⊗ A` for a factor `M` and an abelian `A`.
pub fn coupled_center(m: &MatrixStarAlgebra, a: &MatrixStarAlgebra) -> Result<MatrixStarAlgebra> {
    if !is_factor(m) {
        return Err(Error::Precondition("system algebra is not a factor".into()));
    }
    if !a.is_abelian() {
        return Err(Error::Precondition("pointer algebra is not abelian".into()));
    }
    Ok(center(&m.tensor(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::linalg::{random_matrix, CVector, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(orders: &[usize]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(orders).unwrap()
    }

    fn sigma_z_rep() -> UnitaryRep {
        UnitaryRep::from_generators(
            &z(&[2]),
            vec![CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]))],
        )
        .unwrap()
    }

    #[test]
    fn span_dimensions() {
        let g = z(&[3]);
        let triv = UnitaryRep::trivial(&g, 2);
        let s = build_schrodinger(&MatrixStarAlgebra::scalars(2), &triv).unwrap();
        let h = build_heisenberg(&MatrixStarAlgebra::scalars(2), &triv).unwrap();
        assert_eq!((s.dim(), h.dim()), (3, 3));

        let rep = sigma_z_rep();
        let s = build_schrodinger(&MatrixStarAlgebra::full(2), &rep).unwrap();
        let h = build_heisenberg(&MatrixStarAlgebra::full(2), &rep).unwrap();
        assert_eq!((s.dim(), h.dim()), (8, 8));

        let one = UnitaryRep::trivial(&z(&[1]), 3);
        let m = MatrixStarAlgebra::full(3);
        assert_eq!(build_schrodinger(&m, &one).unwrap().dim(), 9);
    }

    #[test]
    fn trivial_rep_pictures_coincide() {
        let g = z(&[2]);
        let triv = UnitaryRep::trivial(&g, 2);
        let m = MatrixStarAlgebra::full(2);
        let s = build_schrodinger(&m, &triv).unwrap();
        let h = build_heisenberg(&m, &triv).unwrap();
        assert!(algebra_distance(s.algebra(), h.algebra()) < 1e-9);
        let r = alpha_w_equivalence(&s, &h, &triv).unwrap();
        assert!(r.residual() < 1e-9);
    }

    #[test]
    fn pictures_are_conjugate() {
        let rep = sigma_z_rep();
        let m = MatrixStarAlgebra::full(2);
        let s = build_schrodinger(&m, &rep).unwrap();
        let h = build_heisenberg(&m, &rep).unwrap();
        assert!(alpha_w_equivalence(&s, &h, &rep).unwrap().residual() < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rep = UnitaryRep::random(&z(&[3]), 3, &mut rng).unwrap();
        let m = MatrixStarAlgebra::full(3);
        let s = build_schrodinger(&m, &rep).unwrap();
        let h = build_heisenberg(&m, &rep).unwrap();
        assert!(alpha_w_equivalence(&s, &h, &rep).unwrap().residual() < 1e-9);
        assert!(alpha_w_equivalence(&h, &s, &rep).is_err());
    }

    #[test]
    fn mismatched_pictures_fail_equivalence() {
        // a Schrödinger algebra against a Heisenberg algebra of a different system
        let rep = sigma_z_rep();
        let s = build_schrodinger(&MatrixStarAlgebra::diagonal(2), &rep).unwrap();
        let h = build_heisenberg(&MatrixStarAlgebra::full(2), &rep).unwrap();
        assert!(matches!(
            alpha_w_equivalence(&s, &h, &rep),
            Err(Error::EquivalenceFailure { .. })
        ));
    }

    #[test]
    fn convolution_examples() {
        let rep = sigma_z_rep();
        let lambda = UnitaryRep::regular(rep.group());
        let zero = CMatrix::zeros(2, 2);
        let unit = vec![identity(2), zero.clone()];
        assert!((convolution_rep(&unit, &rep).unwrap() - identity(4)).norm() < 1e-12);
        let point = vec![zero, identity(2)];
        assert!(
            (convolution_rep(&point, &rep).unwrap() - kron(rep.get(1), lambda.get(1))).norm()
                < 1e-12
        );

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let f1: Vec<CMatrix> = (0..2).map(|_| random_matrix(&mut rng, 2, 2)).collect();
            let f2: Vec<CMatrix> = (0..2).map(|_| random_matrix(&mut rng, 2, 2)).collect();
            let lhs = convolution_rep(&convolve(&f1, &f2, &rep).unwrap(), &rep).unwrap();
            let rhs = convolution_rep(&f1, &rep).unwrap() * convolution_rep(&f2, &rep).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
        assert!(convolution_rep(&[identity(3), identity(3)], &rep).is_err());
    }

    #[test]
    fn center_examples() {
        let c =
            coupled_center(&MatrixStarAlgebra::full(2), &MatrixStarAlgebra::diagonal(2)).unwrap();
        assert_eq!(c.dim(), 2);
        let expected = MatrixStarAlgebra::scalars(2)
            .tensor(&MatrixStarAlgebra::diagonal(2))
            .unwrap();
        assert!(algebra_distance(&c, &expected) < 1e-9);
        let c =
            coupled_center(&MatrixStarAlgebra::full(2), &MatrixStarAlgebra::scalars(3)).unwrap();
        assert_eq!(c.dim(), 1);
        let c =
            coupled_center(&MatrixStarAlgebra::full(3), &MatrixStarAlgebra::diagonal(4)).unwrap();
        assert_eq!(c.dim(), 4);
        assert!(matches!(
            coupled_center(
                &MatrixStarAlgebra::diagonal(2),
                &MatrixStarAlgebra::diagonal(2)
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uncoupled_tensor_dimension() {
        let rep = sigma_z_rep();
        let t = uncoupled_tensor(&MatrixStarAlgebra::full(2), &rep).unwrap();
        assert_eq!(t.dim(), 8);
        assert_eq!(center(&t).dim(), 2);
    }
}
