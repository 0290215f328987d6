//! Kac–Takesaki operators `W` (on `ℓ²(U)⊗ℓ²(U)`) and `V` (on
//! `ℓ²(Û)⊗ℓ²(Û)`), the coupling `U(W)`, its Fourier transform
//! `Ũ(W) = Σ_χ E(χ) ⊗ λ_χ* = Ũ(V)*`, and numerical checks of their defining
//! relations.

use crate::error::{Error, Result};
use crate::group::{DualGroup, FiniteAbelianGroup};
use crate::linalg::{basis_vector, identity, kron, unitarity_residual, CMatrix, CVector, C64};
use crate::operator::{Operator, Signature};
use crate::rep::{snag_decompose, SpectralMeasure, UnitaryRep};

/// Residual threshold for every relation checked here.
pub const RELATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `(Wη)(u, v) = η(v⁻¹u, v)`.
    W,
    /// `(Vη)(γ, χ) = η(γ, γ⁻¹χ)`.
    V,
}

#[derive(Clone, Debug)]
pub struct KTOperator {
    kernel: Kernel,
    group: FiniteAbelianGroup,
    operator: Operator,
}

impl KTOperator {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// The group labelling the basis of each leg (`U` for `W`, `Û` for `V`).
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn matrix(&self) -> &CMatrix {
        self.operator.matrix()
    }

    /// Residual of this operator's pentagonal relation on three legs.
    ///
    /// `W` satisfies `W₁₂W₂₃ = W₂₃W₁₃W₁₂`. Conjugating the adjoint of that
    /// identity by `F⊗F⊗F` gives the relation carried by `V`:
    /// `V₂₃V₁₂ = V₁₂V₁₃V₂₃`.
    pub fn pentagon_residual(&self) -> f64 {
        let n = self.group.order();
        let sig = Signature::new(vec![n, n, n]);
        let k = self.matrix();
        let on =
            |legs: &[usize], v: &CVector| sig.apply_on_legs(k, legs, v).expect("legs in range");
        columnwise_residual(n * n * n, |e| match self.kernel {
            Kernel::W => (
                on(&[0, 1], &on(&[1, 2], e)),
                on(&[1, 2], &on(&[0, 2], &on(&[0, 1], e))),
            ),
            Kernel::V => (
                on(&[1, 2], &on(&[0, 1], e)),
                on(&[0, 1], &on(&[0, 2], &on(&[1, 2], e))),
            ),
        })
    }
}

/// `sqrt(Σ_k ‖L e_k − R e_k‖²)`, the Frobenius norm of `L − R` computed one
/// basis column at a time.
fn columnwise_residual(dim: usize, sides: impl Fn(&CVector) -> (CVector, CVector)) -> f64 {
    (0..dim)
        .map(|k| {
            let (l, r) = sides(&basis_vector(dim, k));
            (l - r).norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

fn permutation(n: usize, image: impl Fn(usize, usize) -> (usize, usize)) -> CMatrix {
    let mut m = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let (x, y) = image(a, b);
            m[(x * n + y, a * n + b)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// `W δ_(a,b) = δ_(ab, b)`.
pub fn kt_w(group: &FiniteAbelianGroup) -> KTOperator {
    let n = group.order();
    let matrix = permutation(n, |a, b| (group.op(a, b), b));
    KTOperator {
        kernel: Kernel::W,
        group: group.clone(),
        operator: Operator::new(matrix, Signature::new(vec![n, n])).expect("square"),
    }
}

/// `V δ_(γ,χ) = δ_(γ, γχ)`, built from its kernel.
pub fn kt_v(dual: &DualGroup) -> KTOperator {
    let g = dual.as_group();
    let n = g.order();
    let matrix = permutation(n, |gamma, chi| (gamma, g.op(gamma, chi)));
    KTOperator {
        kernel: Kernel::V,
        group: g.clone(),
        operator: Operator::new(matrix, Signature::new(vec![n, n])).expect("square"),
    }
}

/// `V = (F⊗F) W* (F⊗F)⁻¹`, built from the primal `W`.
pub fn kt_v_fourier(group: &FiniteAbelianGroup) -> KTOperator {
    let n = group.order();
    let f = group.fourier_matrix();
    let ff = kron(&f, &f);
    let w = kt_w(group);
    let matrix = &ff * w.matrix().adjoint() * ff.adjoint();
    KTOperator {
        kernel: Kernel::V,
        group: group.dual().as_group().clone(),
        operator: Operator::new(matrix, Signature::new(vec![n, n])).expect("square"),
    }
}

/// Left-regular representation `(λ_u η)(v) = η(u⁻¹v)`.
pub fn regular_rep(group: &FiniteAbelianGroup) -> UnitaryRep {
    UnitaryRep::regular(group)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingForm {
    /// `U(W)` on `H ⊗ ℓ²(U)`.
    Position,
    /// `Ũ(W) = (1⊗F) U(W) (1⊗F)⁻¹` on `H ⊗ ℓ²(Û)`.
    Fourier,
    /// `Ũ(V) = Ũ(W)*` on `H ⊗ ℓ²(Û)`.
    Dual,
}

#[derive(Clone, Debug)]
pub struct CouplingOperator {
    form: CouplingForm,
    operator: Operator,
    rep: UnitaryRep,
}

impl CouplingOperator {
    pub fn form(&self) -> CouplingForm {
        self.form
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn matrix(&self) -> &CMatrix {
        self.operator.matrix()
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    /// `Ũ(V) = Ũ(W)*` from a Fourier-form coupling.
    pub fn dual(&self) -> Result<CouplingOperator> {
        if self.form != CouplingForm::Fourier {
            return Err(Error::Domain(
                "Ũ(V) is the adjoint of a Fourier-form coupling".into(),
            ));
        }
        Ok(CouplingOperator {
            form: CouplingForm::Dual,
            operator: self.operator.adjoint(),
            rep: self.rep.clone(),
        })
    }
}

/// `(U(W)ξ)(u) = U_u ξ(u)`: block diagonal over the pointer index.
pub fn coupling_uw(rep: &UnitaryRep) -> CouplingOperator {
    let group = rep.group();
    let (d, n) = (rep.dim(), group.order());
    let mut matrix = CMatrix::zeros(d * n, d * n);
    for u in group.elements() {
        let mut pointer = CMatrix::zeros(n, n);
        pointer[(u, u)] = C64::new(1.0, 0.0);
        matrix += kron(rep.get(u), &pointer);
    }
    CouplingOperator {
        form: CouplingForm::Position,
        operator: Operator::new(matrix, Signature::new(vec![d, n])).expect("square"),
        rep: rep.clone(),
    }
}

/// `Ũ(W) = (1⊗F) U(W) (1⊗F)⁻¹`.
pub fn fourier_coupling(coupling: &CouplingOperator) -> Result<CouplingOperator> {
    if coupling.form != CouplingForm::Position {
        return Err(Error::Domain(
            "Fourier transform applies to a position-form U(W)".into(),
        ));
    }
    let rep = &coupling.rep;
    let f = kron(&identity(rep.dim()), &rep.group().fourier_matrix());
    let matrix = &f * coupling.matrix() * f.adjoint();
    Ok(CouplingOperator {
        form: CouplingForm::Fourier,
        operator: Operator::new(matrix, coupling.operator.signature().clone())?,
        rep: rep.clone(),
    })
}

/// `Σ_χ E(χ) ⊗ λ_χ*`, the spectral form of `Ũ(W)`.
pub fn spectral_coupling(rep: &UnitaryRep, measure: &SpectralMeasure) -> CouplingOperator {
    let dual = rep.group().dual();
    let lambda = UnitaryRep::regular(dual.as_group());
    let (d, n) = (rep.dim(), dual.order());
    let matrix = measure
        .support()
        .iter()
        .fold(CMatrix::zeros(d * n, d * n), |acc, &chi| {
            acc + kron(measure.projection(chi), &lambda.get(chi).adjoint())
        });
    CouplingOperator {
        form: CouplingForm::Fourier,
        operator: Operator::new(matrix, Signature::new(vec![d, n])).expect("square"),
        rep: rep.clone(),
    }
}

/// `U(W)₁₂W₂₃ = W₂₃U(W)₁₃U(W)₁₂` on `H ⊗ ℓ²(U) ⊗ ℓ²(U)`.
pub fn modified_pentagon_residual(rep: &UnitaryRep) -> f64 {
    let (d, n) = (rep.dim(), rep.group().order());
    let sig = Signature::new(vec![d, n, n]);
    let uw = coupling_uw(rep);
    let w = kt_w(rep.group());
    let apply = |m: &CMatrix, legs: &[usize], v: &CVector| {
        sig.apply_on_legs(m, legs, v).expect("legs in range")
    };
    columnwise_residual(sig.dim(), |e| {
        let lhs = apply(uw.matrix(), &[0, 1], &apply(w.matrix(), &[1, 2], e));
        let rhs = apply(
            w.matrix(),
            &[1, 2],
            &apply(uw.matrix(), &[0, 2], &apply(uw.matrix(), &[0, 1], e)),
        );
        (lhs, rhs)
    })
}

/// `max_u ‖U(W)(1⊗λ_u) − (U_u⊗λ_u)U(W)‖_F`.
pub fn intertwining_residual(rep: &UnitaryRep) -> f64 {
    let group = rep.group();
    let lambda = UnitaryRep::regular(group);
    let uw = coupling_uw(rep);
    group
        .elements()
        .map(|u| {
            let lhs = uw.matrix() * kron(&identity(rep.dim()), lambda.get(u));
            let rhs = kron(rep.get(u), lambda.get(u)) * uw.matrix();
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationCheck {
    pub relation: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RelationCheck {
    pub fn new(relation: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            relation: relation.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// Every defining relation of the coupling built from `rep`.
pub fn verify_relations(rep: &UnitaryRep, seed: u64) -> Result<Vec<RelationCheck>> {
    let group = rep.group();
    let w = kt_w(group);
    let v = kt_v(&group.dual());
    let v_fourier = kt_v_fourier(group);
    let uw = coupling_uw(rep);
    let uw_tilde = fourier_coupling(&uw)?;
    let measure = snag_decompose(rep, seed)?;
    let spectral = spectral_coupling(rep, &measure);
    let t = RELATION_TOL;
    Ok(vec![
        RelationCheck::new("unitarity W", unitarity_residual(w.matrix()), t),
        RelationCheck::new("unitarity V", unitarity_residual(v.matrix()), t),
        RelationCheck::new("unitarity U(W)", unitarity_residual(uw.matrix()), t),
        RelationCheck::new("unitarity Ũ(W)", unitarity_residual(uw_tilde.matrix()), t),
        RelationCheck::new("pentagon W12 W23 = W23 W13 W12", w.pentagon_residual(), t),
        RelationCheck::new("pentagon V23 V12 = V12 V13 V23", v.pentagon_residual(), t),
        RelationCheck::new(
            "modified pentagon U(W)12 W23 = W23 U(W)13 U(W)12",
            modified_pentagon_residual(rep),
            t,
        ),
        RelationCheck::new(
            "intertwining U(W)(1⊗λ_u) = (U_u⊗λ_u)U(W)",
            intertwining_residual(rep),
            t,
        ),
        RelationCheck::new(
            "V kernel = (F⊗F)W*(F⊗F)⁻¹",
            (v.matrix() - v_fourier.matrix()).norm(),
            t,
        ),
        RelationCheck::new(
            "Ũ(W) conjugation = Σ E(χ)⊗λ_χ*",
            (uw_tilde.matrix() - spectral.matrix()).norm(),
            t,
        ),
        RelationCheck::new(
            "snag reconstruction",
            measure.reconstruction_residual(rep),
            1e-9,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron_vec, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(orders: &[usize]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(orders).unwrap()
    }

    fn delta2(n: usize, a: usize, b: usize) -> CVector {
        basis_vector(n * n, a * n + b)
    }

    fn sigma_z_rep() -> UnitaryRep {
        let g = z(&[2]);
        UnitaryRep::from_generators(
            &g,
            vec![CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]))],
        )
        .unwrap()
    }

    #[test]
    fn w_kernel_examples() {
        let w2 = kt_w(&z(&[2]));
        assert_eq!(w2.matrix() * delta2(2, 1, 1), delta2(2, 0, 1));
        let w3 = kt_w(&z(&[3]));
        assert_eq!(w3.matrix() * delta2(3, 1, 2), delta2(3, 0, 2));
        for a in 0..3 {
            assert_eq!(w3.matrix() * delta2(3, a, 0), delta2(3, a, 0));
        }
    }

    #[test]
    fn v_kernel_examples() {
        let g = z(&[2, 3]);
        let n = g.order();
        let v = kt_v(&g.dual());
        for gamma in 0..n {
            // copy action
            assert_eq!(v.matrix() * delta2(n, gamma, 0), delta2(n, gamma, gamma));
        }
        for chi in 0..n {
            assert_eq!(v.matrix() * delta2(n, 0, chi), delta2(n, 0, chi));
        }
        let v2 = kt_v(&z(&[2]).dual());
        assert_eq!(v2.matrix() * delta2(2, 1, 1), delta2(2, 1, 0));
    }

    #[test]
    fn v_routes_agree() {
        for orders in [vec![2], vec![3], vec![4], vec![2, 2], vec![2, 3]] {
            let g = z(&orders);
            let r = (kt_v(&g.dual()).matrix() - kt_v_fourier(&g).matrix()).norm();
            assert!(r < 1e-10, "{orders:?}: {r}");
        }
    }

    #[test]
    fn pentagons_hold() {
        for orders in [vec![1], vec![2], vec![3], vec![2, 2], vec![5]] {
            let g = z(&orders);
            assert!(kt_w(&g).pentagon_residual() < 1e-10);
            assert!(kt_v(&g.dual()).pentagon_residual() < 1e-10);
        }
    }

    #[test]
    fn v_does_not_satisfy_the_w_form_for_z3() {
        // V₁₂V₂₃ = V₂₃V₁₃V₁₂ would require 2γ₁ = γ₁ on every triple
        let g = z(&[3]);
        let v = kt_v(&g.dual());
        let sig = Signature::new(vec![3, 3, 3]);
        let on = |legs: &[usize], x: &CVector| sig.apply_on_legs(v.matrix(), legs, x).unwrap();
        let e = basis_vector(27, 9); // (1, 0, 0)
        let lhs = on(&[0, 1], &on(&[1, 2], &e));
        let rhs = on(&[1, 2], &on(&[0, 2], &on(&[0, 1], &e)));
        assert!((lhs - rhs).norm() > 1.0);
    }

    #[test]
    fn regular_rep_examples() {
        let lambda = regular_rep(&z(&[2]));
        assert_eq!(lambda.get(0), &identity(2));
        assert_eq!(
            lambda.get(1),
            &CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
        );
        let l3 = regular_rep(&z(&[3]));
        assert_eq!(l3.get(1) * basis_vector(3, 1), basis_vector(3, 2));
    }

    #[test]
    fn coupling_examples() {
        let g = z(&[2]);
        assert_eq!(
            coupling_uw(&UnitaryRep::trivial(&g, 3)).matrix(),
            &identity(6)
        );
        let uw = coupling_uw(&sigma_z_rep());
        for u in 0..2 {
            let input = kron_vec(&basis_vector(2, 1), &basis_vector(2, u));
            let sign = if u == 0 { ONE } else { -ONE };
            assert_eq!(uw.matrix() * &input, input * sign);
        }
        // standard choice U_u = λ_u: U(W) = Σ_u λ_u ⊗ |δ_u⟩⟨δ_u|
        let g = z(&[3]);
        let lambda = regular_rep(&g);
        let expected = (0..3).fold(CMatrix::zeros(9, 9), |acc, u| {
            let mut p = CMatrix::zeros(3, 3);
            p[(u, u)] = ONE;
            acc + kron(lambda.get(u), &p)
        });
        assert_eq!(coupling_uw(&lambda).matrix(), &expected);
    }

    #[test]
    fn fourier_coupling_examples() {
        let g = z(&[2]);
        let trivial = fourier_coupling(&coupling_uw(&UnitaryRep::trivial(&g, 2))).unwrap();
        assert!((trivial.matrix() - identity(4)).norm() < 1e-12);

        let uv = fourier_coupling(&coupling_uw(&sigma_z_rep()))
            .unwrap()
            .dual()
            .unwrap();
        let ket = |s: usize, p: usize| kron_vec(&basis_vector(2, s), &basis_vector(2, p));
        assert!((uv.matrix() * ket(0, 0) - ket(0, 0)).norm() < 1e-12);
        assert!((uv.matrix() * ket(1, 0) - ket(1, 1)).norm() < 1e-12);
        let h = 1.0 / 2f64.sqrt();
        let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
        let out = uv.matrix() * kron_vec(&plus, &basis_vector(2, 0));
        let expected = (ket(0, 0) + ket(1, 1)) * C64::from(h);
        assert!((out - expected).norm() < 1e-12);
    }

    #[test]
    fn dirac_action_of_uv() {
        // Ũ(V)(ξ⊗|γ⟩) = Σ_χ E(χ)ξ ⊗ |χγ⟩
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = z(&[2, 2]);
        let rep = UnitaryRep::random(&g, 3, &mut rng).unwrap();
        let measure = snag_decompose(&rep, 1).unwrap();
        let uv = fourier_coupling(&coupling_uw(&rep))
            .unwrap()
            .dual()
            .unwrap();
        let xi = crate::linalg::random_unit_vector(&mut rng, 3);
        for gamma in g.elements() {
            let out = uv.matrix() * kron_vec(&xi, &basis_vector(4, gamma));
            let expected = g.elements().fold(CVector::zeros(12), |acc, chi| {
                acc + kron_vec(
                    &(measure.projection(chi) * &xi),
                    &basis_vector(4, g.op(chi, gamma)),
                )
            });
            assert!((out - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn relation_suite_passes_for_random_reps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for orders in [vec![2], vec![3], vec![2, 2], vec![4]] {
            let g = z(&orders);
            let rep = UnitaryRep::random(&g, 3, &mut rng).unwrap();
            for check in verify_relations(&rep, 0).unwrap() {
                assert!(
                    check.pass,
                    "{orders:?} {}: {:e}",
                    check.relation, check.residual
                );
            }
        }
    }

    #[test]
    fn fourier_coupling_rejects_wrong_form() {
        let uw = coupling_uw(&sigma_z_rep());
        let tilde = fourier_coupling(&uw).unwrap();
        assert!(fourier_coupling(&tilde).is_err());
        assert!(uw.dual().is_err());
    }
}
