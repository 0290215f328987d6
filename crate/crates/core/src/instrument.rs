//! The measurement instrument built from the coupling `Ũ(W)` with the pointer
//! prepared at the trivial character `ι`, its POVM, and Naimark dilation.

use crate::algebra::{is_factor, is_masa, MatrixStarAlgebra};
use crate::error::{Error, Result};
use crate::kt::{coupling_uw, fourier_coupling, CouplingOperator};
use crate::linalg::{hermitian_eigen, identity, kron, psd_sqrt, CMatrix, C64, ZERO};
use crate::operator::{DensityState, Signature};
use crate::rep::{snag_decompose, SpectralMeasure, UnitaryRep};

const POVM_TOL: f64 = 1e-10;
/// Probabilities at or below this are treated as zero when conditioning.
pub const CONDITIONING_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Instrument {
    system: MatrixStarAlgebra,
    measured: MatrixStarAlgebra,
    rep: UnitaryRep,
    measure: SpectralMeasure,
    coupling: CouplingOperator,
    masa: bool,
}

impl Instrument {
    /// Instrument for the abelian algebra generated by `rep` inside the
    /// factor `system`.
    pub fn new(system: MatrixStarAlgebra, rep: &UnitaryRep, seed: u64) -> Result<Self> {
        if system.ambient() != rep.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.ambient(),
                found: rep.dim(),
            });
        }
        if !is_factor(&system) {
            return Err(Error::Precondition("system algebra is not a factor".into()));
        }
        let measured = MatrixStarAlgebra::generate(rep.dim(), rep.matrices())?;
        let masa = is_masa(&measured, &system)?;
        let measure = snag_decompose(rep, seed)?;
        let coupling = fourier_coupling(&coupling_uw(rep))?;
        Ok(Self {
            system,
            measured,
            rep: rep.clone(),
            measure,
            coupling,
            masa,
        })
    }

    /// Instrument on the full matrix algebra `B(H)`.
    pub fn on_full_system(rep: &UnitaryRep, seed: u64) -> Result<Self> {
        Self::new(MatrixStarAlgebra::full(rep.dim()), rep, seed)
    }

    /// As [`Instrument::new`], but fails unless the measured algebra is a
    /// maximal abelian subalgebra of the system.
    pub fn new_masa(system: MatrixStarAlgebra, rep: &UnitaryRep, seed: u64) -> Result<Self> {
        let inst = Self::new(system, rep, seed)?;
        if !inst.masa {
            return Err(Error::Precondition(
                "measured algebra is not maximal abelian".into(),
            ));
        }
        Ok(inst)
    }

    pub fn system(&self) -> &MatrixStarAlgebra {
        &self.system
    }

    pub fn measured(&self) -> &MatrixStarAlgebra {
        &self.measured
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn coupling(&self) -> &CouplingOperator {
        &self.coupling
    }

    pub fn is_masa(&self) -> bool {
        self.masa
    }

    pub fn support(&self) -> &[usize] {
        self.measure.support()
    }

    fn dim(&self) -> usize {
        self.rep.dim()
    }

    fn pointer_dim(&self) -> usize {
        self.rep.group().order()
    }

    /// Diagonal projection `χ_Δ` on `ℓ²(Û)`, after checking `Δ ⊆ supp E`.
    fn indicator(&self, delta: &[usize]) -> Result<CMatrix> {
        let n = self.pointer_dim();
        let mut p = CMatrix::zeros(n, n);
        for &chi in delta {
            if !self.support().contains(&chi) {
                return Err(Error::Domain(format!(
                    "character {chi} is outside the spectral support"
                )));
            }
            p[(chi, chi)] = C64::new(1.0, 0.0);
        }
        Ok(p)
    }

    fn check_state(&self, omega: &DensityState) -> Result<()> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        Ok(())
    }

    /// `⟨ι| X |ι⟩` compression of an operator on `H ⊗ ℓ²(Û)`.
    fn compress_at_trivial(&self, x: &CMatrix) -> CMatrix {
        let (h, n) = (self.dim(), self.pointer_dim());
        CMatrix::from_fn(h, h, |i, j| x[(i * n, j * n)])
    }

    /// `I(Δ|ω)(M) = (ω ⊗ ι)(Ũ(W) (M ⊗ χ_Δ) Ũ(W)*)`.
    pub fn apply(&self, omega: &DensityState, delta: &[usize], m: &CMatrix) -> Result<C64> {
        self.check_state(omega)?;
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        let u = self.coupling.matrix();
        let heis = u * kron(m, &self.indicator(delta)?) * u.adjoint();
        Ok((omega.matrix() * self.compress_at_trivial(&heis)).trace())
    }

    /// `p(Δ|ω) = I(Δ|ω)(1)`.
    pub fn probability(&self, omega: &DensityState, delta: &[usize]) -> Result<f64> {
        Ok(self.apply(omega, delta, &identity(self.dim()))?.re)
    }

    /// Unnormalised state change `x ↦ tr₂[(1⊗χ_Δ) Ũ(W)* (x ⊗ |ι⟩⟨ι|) Ũ(W) (1⊗χ_Δ)]`,
    /// defined on arbitrary matrices so it can be probed on matrix units.
    pub fn operation(&self, x: &CMatrix, delta: &[usize]) -> Result<CMatrix> {
        let (h, n) = (self.dim(), self.pointer_dim());
        if x.nrows() != h || x.ncols() != h {
            return Err(Error::DimensionMismatch {
                expected: h,
                found: x.nrows(),
            });
        }
        let mut pointer = CMatrix::zeros(n, n);
        pointer[(0, 0)] = C64::new(1.0, 0.0);
        let p = kron(&identity(h), &self.indicator(delta)?);
        let u = self.coupling.matrix();
        let evolved = &p * u.adjoint() * kron(x, &pointer) * u * &p;
        let (out, _) = Signature::new(vec![h, n]).partial_trace(&evolved, &[0])?;
        Ok(out)
    }

    /// `I(Δ|ω) / p(Δ|ω)` as a density matrix.
    pub fn posterior(&self, omega: &DensityState, delta: &[usize]) -> Result<DensityState> {
        self.check_state(omega)?;
        let p = self.probability(omega, delta)?;
        if p <= CONDITIONING_TOL {
            return Err(Error::Conditioning { probability: p });
        }
        let sigma = self.operation(omega.matrix(), delta)? / C64::from(p);
        let sigma = (&sigma + sigma.adjoint()) * C64::from(0.5);
        DensityState::new(sigma, omega.signature().clone())
    }

    /// Effects `F_χ = ⟨ι| Ũ(W)(1⊗|χ⟩⟨χ|)Ũ(W)* |ι⟩`, one per supported `χ`.
    pub fn povm_effects(&self) -> Result<Povm> {
        let u = self.coupling.matrix();
        let labels = self.support().to_vec();
        let effects = labels
            .iter()
            .map(|&chi| {
                let heis = u * kron(&identity(self.dim()), &self.indicator(&[chi])?) * u.adjoint();
                Ok(self.compress_at_trivial(&heis))
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::with_labels(labels, effects)
    }
}

/// Finite family of effects `0 ⪯ F ⪯ 1` summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    labels: Vec<usize>,
    effects: Vec<CMatrix>,
}

impl Povm {
    /// Effects labelled `0..k`.
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        Self::with_labels((0..effects.len()).collect(), effects)
    }

    pub fn with_labels(labels: Vec<usize>, effects: Vec<CMatrix>) -> Result<Self> {
        if labels.len() != effects.len() {
            return Err(Error::InvalidPovm("label and effect counts differ".into()));
        }
        let dim = match effects.first() {
            Some(f) => f.nrows(),
            None => return Err(Error::InvalidPovm("no effects".into())),
        };
        let mut total = CMatrix::zeros(dim, dim);
        for (label, f) in labels.iter().zip(&effects) {
            if f.nrows() != dim || f.ncols() != dim {
                return Err(Error::InvalidPovm(format!(
                    "effect {label} has the wrong shape"
                )));
            }
            if (f - f.adjoint()).norm() > POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {label} is not Hermitian"
                )));
            }
            let (values, _) = hermitian_eigen(f);
            let (lo, hi) = (values[0], values[values.len() - 1]);
            if lo < -POVM_TOL || hi > 1.0 + POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {label} has spectrum outside [0, 1] ({lo:e}, {hi})"
                )));
            }
            total += f;
        }
        let r = (total - identity(dim)).norm();
        if r > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects sum to 1 only up to {r:e}"
            )));
        }
        Ok(Self { labels, effects })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    /// `tr(ρ F_i)` for every outcome.
    pub fn probabilities(&self, omega: &DensityState) -> Vec<f64> {
        self.effects
            .iter()
            .map(|f| omega.expectation(f).re)
            .collect()
    }
}

/// Isometry `Vξ = Σ_i √F_i ξ ⊗ e_i` with the projective family `1 ⊗ |e_i⟩⟨e_i|`.
#[derive(Clone, Debug)]
pub struct NaimarkDilation {
    isometry: CMatrix,
    projections: Vec<CMatrix>,
}

impl NaimarkDilation {
    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// `‖V*V − 1‖_F`.
    pub fn isometry_residual(&self) -> f64 {
        let n = self.isometry.ncols();
        (self.isometry.adjoint() * &self.isometry - identity(n)).norm()
    }

    /// `max_i ‖V* P_i V − F_i‖_F`.
    pub fn compression_residual(&self, povm: &Povm) -> f64 {
        self.projections
            .iter()
            .zip(povm.effects())
            .map(|(p, f)| (self.isometry.adjoint() * p * &self.isometry - f).norm())
            .fold(0.0, f64::max)
    }
}

pub fn naimark_dilate(povm: &Povm) -> Result<NaimarkDilation> {
    let (h, k) = (povm.dim(), povm.len());
    let mut isometry = CMatrix::from_element(h * k, h, ZERO);
    for (i, f) in povm.effects().iter().enumerate() {
        let (values, _) = hermitian_eigen(f);
        if values[0] < -POVM_TOL {
            return Err(Error::InvalidPovm(format!("effect {i} is not positive")));
        }
        let root = psd_sqrt(f);
        for a in 0..h {
            for b in 0..h {
                isometry[(a * k + i, b)] = root[(a, b)];
            }
        }
    }
    let projections = (0..k)
        .map(|i| {
            let mut e = CMatrix::zeros(k, k);
            e[(i, i)] = C64::new(1.0, 0.0);
            kron(&identity(h), &e)
        })
        .collect();
    Ok(NaimarkDilation {
        isometry,
        projections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::linalg::{c, min_eigenvalue, random_density, CVector, I, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(entries: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(entries.to_vec()))
    }

    fn sigma_z_instrument() -> Instrument {
        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let rep = UnitaryRep::from_generators(&g, vec![diag(&[ONE, -ONE])]).unwrap();
        Instrument::on_full_system(&rep, 0).unwrap()
    }

    fn plus() -> DensityState {
        DensityState::single(CMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap()
    }

    #[test]
    fn born_examples() {
        let inst = sigma_z_instrument();
        assert!(inst.is_masa());
        let all = inst.support().to_vec();
        assert!((inst.apply(&plus(), &all, &identity(2)).unwrap() - ONE).norm() < 1e-12);
        assert!((inst.apply(&plus(), &[0], &identity(2)).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(inst.apply(&plus(), &[0], &sx).unwrap().norm() < 1e-12);
        assert!((inst.probability(&plus(), &[1]).unwrap() - 0.5).abs() < 1e-12);
        let zero = DensityState::single(diag(&[ONE, ZERO])).unwrap();
        assert!((inst.probability(&zero, &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z4_maximally_mixed() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let rep = UnitaryRep::from_generators(&g, vec![diag(&[ONE, I, -ONE, -I])]).unwrap();
        let inst = Instrument::on_full_system(&rep, 0).unwrap();
        let omega = DensityState::maximally_mixed(Signature::single(4));
        for chi in 0..4 {
            assert!((inst.probability(&omega, &[chi]).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn luders_examples() {
        let inst = sigma_z_instrument();
        let post = inst.posterior(&plus(), &[0]).unwrap();
        assert!((post.matrix() - diag(&[ONE, ZERO])).norm() < 1e-12);
        let one = DensityState::single(diag(&[ZERO, ONE])).unwrap();
        assert!((inst.posterior(&one, &[1]).unwrap().matrix() - one.matrix()).norm() < 1e-12);
        let mixed = DensityState::maximally_mixed(Signature::single(2));
        let post = inst.posterior(&mixed, &[0, 1]).unwrap();
        assert!((post.matrix() - mixed.matrix()).norm() < 1e-12);
        assert!(matches!(
            inst.posterior(&one, &[0]),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn domain_errors() {
        let g = FiniteAbelianGroup::new(&[3]).unwrap();
        let inst = Instrument::on_full_system(&UnitaryRep::trivial(&g, 2), 0).unwrap();
        let omega = DensityState::maximally_mixed(Signature::single(2));
        assert!(matches!(
            inst.probability(&omega, &[1]),
            Err(Error::Domain(_))
        ));
        assert!(!inst.is_masa());
        assert!(
            Instrument::new_masa(MatrixStarAlgebra::full(2), &UnitaryRep::trivial(&g, 2), 0)
                .is_err()
        );
        let not_factor = MatrixStarAlgebra::diagonal(2);
        assert!(matches!(
            Instrument::new(not_factor, &UnitaryRep::trivial(&g, 2), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn povm_examples() {
        let p = sigma_z_instrument().povm_effects().unwrap();
        assert!((&p.effects()[0] - diag(&[ONE, ZERO])).norm() < 1e-12);
        assert!((&p.effects()[1] - diag(&[ZERO, ONE])).norm() < 1e-12);

        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let triv = Instrument::on_full_system(&UnitaryRep::trivial(&g, 2), 0).unwrap();
        let p = triv.povm_effects().unwrap();
        assert_eq!(p.len(), 1);
        assert!((&p.effects()[0] - identity(2)).norm() < 1e-12);

        let block = UnitaryRep::from_generators(&g, vec![diag(&[ONE, ONE, -ONE])]).unwrap();
        let p = Instrument::on_full_system(&block, 0)
            .unwrap()
            .povm_effects()
            .unwrap();
        assert!((&p.effects()[0] - diag(&[ONE, ONE, ZERO])).norm() < 1e-12);
        assert!((&p.effects()[1] - diag(&[ZERO, ZERO, ONE])).norm() < 1e-12);
    }

    #[test]
    fn povm_matches_probabilities_and_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let rep = UnitaryRep::random(&g, 4, &mut rng).unwrap();
        let inst = Instrument::on_full_system(&rep, 1).unwrap();
        let povm = inst.povm_effects().unwrap();
        for _ in 0..20 {
            let omega = DensityState::single(random_density(&mut rng, 4)).unwrap();
            let probs = povm.probabilities(&omega);
            for (&chi, p) in povm.labels().iter().zip(probs) {
                let born = omega.expectation(inst.measure().projection(chi)).re;
                assert!((inst.probability(&omega, &[chi]).unwrap() - p).abs() < 1e-10);
                assert!((p - born).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn operation_is_completely_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = FiniteAbelianGroup::new(&[3]).unwrap();
        let rep = UnitaryRep::random(&g, 3, &mut rng).unwrap();
        let inst = Instrument::on_full_system(&rep, 0).unwrap();
        let delta = &inst.support()[..1];
        let h = 3;
        let mut choi = CMatrix::zeros(h * h, h * h);
        for i in 0..h {
            for j in 0..h {
                let mut e = CMatrix::zeros(h, h);
                e[(i, j)] = ONE;
                choi += kron(&e, &inst.operation(&e, delta).unwrap());
            }
        }
        assert!(min_eigenvalue(&choi) > -1e-9);
    }

    #[test]
    fn naimark_examples() {
        let proj = sigma_z_instrument().povm_effects().unwrap();
        let d = naimark_dilate(&proj).unwrap();
        assert!(d.compression_residual(&proj) < 1e-12);
        assert!(d.isometry_residual() < 1e-12);

        let half = identity(2) * c(0.5, 0.0);
        let split = Povm::new(vec![half.clone(), half]).unwrap();
        let d = naimark_dilate(&split).unwrap();
        assert!(d.compression_residual(&split) < 1e-12);

        let trine: Vec<CMatrix> = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let phi = CVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]);
                &phi * phi.adjoint() * c(2.0 / 3.0, 0.0)
            })
            .collect();
        let trine = Povm::new(trine).unwrap();
        let d = naimark_dilate(&trine).unwrap();
        assert!(d.isometry_residual() < 1e-10);
        assert!(d.compression_residual(&trine) < 1e-10);
    }

    #[test]
    fn invalid_povms() {
        assert!(matches!(
            Povm::new(vec![diag(&[c(1.5, 0.0), ONE]), diag(&[c(-0.5, 0.0), ZERO])]),
            Err(Error::InvalidPovm(_))
        ));
        assert!(Povm::new(vec![diag(&[ONE, ZERO])]).is_err());
        assert!(Povm::new(vec![]).is_err());
    }
}
