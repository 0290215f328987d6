//! The `N`-stage amplification cascade
//! `V_{N,N+1}⋯V₂₃ Ũ(V)₁₂ (ξ ⊗ |ι⟩^⊗N)`, its branch structure, the
//! Heisenberg-picture chain and the inverse cascade.

use crate::error::{Error, Result};
use crate::kt::{coupling_uw, fourier_coupling, kt_v};
use crate::linalg::{is_diagonal, kron, CMatrix, CVector, C64};
use crate::operator::{DensityState, Signature, StateVector};
use crate::rep::{snag_decompose, SpectralMeasure, UnitaryRep};

/// Default bound on `dim(H)·|Û|^N` for dense state vectors.
pub const DEFAULT_MAX_DIM: usize = 1 << 14;
/// Dense operators in the Heisenberg chain are limited to this dimension.
pub const OPERATOR_MAX_DIM: usize = 1 << 10;
/// Mass allowed outside the branch form.
pub const BRANCH_TOL: f64 = 1e-9;
const AMPLITUDE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CascadeConfig {
    stages: usize,
    max_dim: usize,
}

impl CascadeConfig {
    pub fn new(stages: usize) -> Result<Self> {
        if stages == 0 {
            return Err(Error::Domain(
                "the cascade needs at least one pointer stage".into(),
            ));
        }
        Ok(Self {
            stages,
            max_dim: DEFAULT_MAX_DIM,
        })
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }
}

/// `|Û|^N`, or `None` on overflow.
fn pointer_space(n: usize, stages: usize) -> Option<usize> {
    u32::try_from(stages).ok().and_then(|s| n.checked_pow(s))
}

/// Index of `|γ⟩^⊗N` in `ℓ²(Û)^⊗N`.
fn repeated_index(gamma: usize, n: usize, stages: usize) -> usize {
    (0..stages).fold(0, |acc, _| acc * n + gamma)
}

#[derive(Clone, Debug)]
pub struct Amplifier {
    rep: UnitaryRep,
    measure: SpectralMeasure,
    uv: CMatrix,
    v: CMatrix,
    config: CascadeConfig,
}

impl Amplifier {
    pub fn new(rep: &UnitaryRep, config: CascadeConfig, seed: u64) -> Result<Self> {
        let measure = snag_decompose(rep, seed)?;
        let uv = fourier_coupling(&coupling_uw(rep))?
            .dual()?
            .matrix()
            .clone();
        let v = kt_v(&rep.group().dual()).matrix().clone();
        Ok(Self {
            rep: rep.clone(),
            measure,
            uv,
            v,
            config,
        })
    }

    pub fn config(&self) -> &CascadeConfig {
        &self.config
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    fn system_dim(&self) -> usize {
        self.rep.dim()
    }

    fn pointer_dim(&self) -> usize {
        self.rep.group().order()
    }

    /// Legs `(sys, p₁, …, p_N)`.
    pub fn signature(&self) -> Signature {
        let mut dims = vec![self.system_dim()];
        dims.extend(std::iter::repeat_n(self.pointer_dim(), self.config.stages));
        Signature::new(dims)
    }

    /// Total dimension, if it fits under the configured cap.
    pub fn dense_dim(&self) -> Result<usize> {
        let dim = pointer_space(self.pointer_dim(), self.config.stages)
            .and_then(|p| p.checked_mul(self.system_dim()));
        match dim {
            Some(d) if d <= self.config.max_dim => Ok(d),
            Some(d) => Err(Error::DimensionCap {
                dim: d,
                cap: self.config.max_dim,
            }),
            None => Err(Error::DimensionCap {
                dim: usize::MAX,
                cap: self.config.max_dim,
            }),
        }
    }

    fn check_input(&self, xi: &StateVector) -> Result<()> {
        if xi.vector().len() != self.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim(),
                found: xi.vector().len(),
            });
        }
        Ok(())
    }

    /// `ξ ⊗ |ι⟩^⊗N`.
    pub fn neutral_input(&self, xi: &StateVector) -> Result<StateVector> {
        self.check_input(xi)?;
        let dim = self.dense_dim()?;
        let block = dim / self.system_dim();
        let mut v = CVector::zeros(dim);
        for (a, &x) in xi.vector().iter().enumerate() {
            v[a * block] = x;
        }
        StateVector::new(v, self.signature())
    }

    /// Dense cascade: `Ũ(V)` on `(sys, p₁)`, then `V` on `(p_k, p_{k+1})`.
    pub fn amplify(&self, xi: &StateVector) -> Result<CascadeState> {
        let sig = self.signature();
        let mut psi = sig.apply_on_legs(&self.uv, &[0, 1], self.neutral_input(xi)?.vector())?;
        for k in 1..self.config.stages {
            psi = sig.apply_on_legs(&self.v, &[k, k + 1], &psi)?;
        }
        Ok(CascadeState {
            state: StateVector::new(psi, sig)?,
            stages: self.config.stages,
        })
    }

    /// Closed-form output `Σ_γ c_γ ξ_γ ⊗ |γ⟩^⊗N`, available for any `N`.
    pub fn amplify_analytic(&self, xi: &StateVector) -> Result<BranchForm> {
        self.check_input(xi)?;
        let branches = self
            .measure
            .support()
            .iter()
            .filter_map(|&gamma| {
                let part = self.measure.projection(gamma) * xi.vector();
                let amplitude = part.norm();
                (amplitude > AMPLITUDE_FLOOR).then(|| Branch {
                    gamma,
                    amplitude,
                    component: part / C64::from(amplitude),
                })
            })
            .collect();
        Ok(BranchForm {
            system_dim: self.system_dim(),
            pointer_dim: self.pointer_dim(),
            stages: self.config.stages,
            branches,
        })
    }

    /// Exact inverse cascade.
    pub fn recover(&self, state: &CascadeState) -> Result<StateVector> {
        let sig = self.signature();
        if state.state.signature() != &sig {
            return Err(Error::Domain("state does not match this cascade".into()));
        }
        let v_inv = self.v.adjoint();
        let mut psi = state.state.vector().clone();
        for k in (1..self.config.stages).rev() {
            psi = sig.apply_on_legs(&v_inv, &[k, k + 1], &psi)?;
        }
        psi = sig.apply_on_legs(&self.uv.adjoint(), &[0, 1], &psi)?;
        StateVector::new(psi, sig)
    }

    /// Reduced state on `H` after the cascade (dense path).
    pub fn decohered_state(&self, xi: &StateVector) -> Result<DensityState> {
        let out = self.amplify(xi)?;
        let (rho, sig) = out
            .state
            .signature()
            .reduced_density(out.state.vector(), &[0])?;
        let rho = (&rho + rho.adjoint()) * C64::from(0.5);
        DensityState::new(rho, sig)
    }

    fn check_observables(&self, a: &CMatrix, fs: &[CMatrix]) -> Result<()> {
        let (h, n) = (self.system_dim(), self.pointer_dim());
        if a.nrows() != h || a.ncols() != h {
            return Err(Error::DimensionMismatch {
                expected: h,
                found: a.nrows(),
            });
        }
        if fs.len() != self.config.stages {
            return Err(Error::Domain(format!(
                "{} pointer observables for {} stages",
                fs.len(),
                self.config.stages
            )));
        }
        for (k, f) in fs.iter().enumerate() {
            if f.nrows() != n || f.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.nrows(),
                });
            }
            if !is_diagonal(f, 1e-12) {
                return Err(Error::Domain(format!(
                    "pointer observable {k} is not a multiplication operator"
                )));
            }
        }
        let dim = self.dense_dim()?;
        if dim > OPERATOR_MAX_DIM {
            return Err(Error::DimensionCap {
                dim,
                cap: OPERATOR_MAX_DIM,
            });
        }
        Ok(())
    }

    /// `Ũ(V)₁₂* V₂₃* ⋯ V*_{N,N+1} (A ⊗ f₁ ⊗ ⋯ ⊗ f_N) V_{N,N+1} ⋯ V₂₃ Ũ(V)₁₂`.
    pub fn heisenberg_chain(&self, a: &CMatrix, fs: &[CMatrix]) -> Result<CMatrix> {
        self.check_observables(a, fs)?;
        let sig = self.signature();
        let mut x = fs.iter().fold(a.clone(), |acc, f| kron(&acc, f));
        let v_inv = self.v.adjoint();
        for k in (1..self.config.stages).rev() {
            x = sig.conjugate_on_legs(&v_inv, &[k, k + 1], &x)?;
        }
        sig.conjugate_on_legs(&self.uv.adjoint(), &[0, 1], &x)
    }

    /// `Ad(Ũ(V)*)(A ⊗ Ad(V*)(f₁ ⊗ Ad(V*)(f₂ ⊗ ⋯)))`, built from the inside out.
    pub fn heisenberg_chain_nested(&self, a: &CMatrix, fs: &[CMatrix]) -> Result<CMatrix> {
        self.check_observables(a, fs)?;
        let n = self.pointer_dim();
        let v_inv = self.v.adjoint();
        let (last, rest) = fs.split_last().expect("at least one stage");
        let mut inner = last.clone();
        for f in rest.iter().rev() {
            let pair = Signature::new(vec![n, n, inner.nrows() / n]);
            let x = kron(f, &inner);
            // V* acts on f's leg and the first leg of the inner block
            inner = pair.conjugate_on_legs(&v_inv, &[0, 1], &x)?;
        }
        let h = self.system_dim();
        let sig = Signature::new(vec![h, n, inner.nrows() / n]);
        sig.conjugate_on_legs(&self.uv.adjoint(), &[0, 1], &kron(a, &inner))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub gamma: usize,
    /// `c_γ = ‖E(γ)ξ‖` for analytic branches; `‖component‖` extracted from a
    /// dense state, with the phase kept in `component`.
    pub amplitude: f64,
    /// Normalised system vector `ξ_γ`.
    pub component: CVector,
}

/// Output of the cascade in the form `Σ_γ c_γ ξ_γ ⊗ |γ⟩^⊗N`.
#[derive(Clone, Debug)]
pub struct BranchForm {
    system_dim: usize,
    pointer_dim: usize,
    stages: usize,
    branches: Vec<Branch>,
}

impl BranchForm {
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn total_weight(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.amplitude * b.amplitude)
            .sum()
    }

    /// `|c_γ|²` indexed by `γ`; every register has this distribution.
    pub fn register_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.pointer_dim];
        for b in &self.branches {
            p[b.gamma] += b.amplitude * b.amplitude;
        }
        p
    }

    /// `Σ_γ |c_γ|² |ξ_γ⟩⟨ξ_γ|`.
    pub fn decohered(&self) -> CMatrix {
        self.branches.iter().fold(
            CMatrix::zeros(self.system_dim, self.system_dim),
            |acc, b| {
                acc + &b.component * b.component.adjoint() * C64::from(b.amplitude * b.amplitude)
            },
        )
    }

    /// Dense vector, if `dim(H)·|Û|^N ≤ max_dim`.
    pub fn densify(&self, max_dim: usize) -> Result<CVector> {
        let block = pointer_space(self.pointer_dim, self.stages);
        let dim = block.and_then(|b| b.checked_mul(self.system_dim));
        let (block, dim) = match (block, dim) {
            (Some(b), Some(d)) if d <= max_dim => (b, d),
            (_, d) => {
                return Err(Error::DimensionCap {
                    dim: d.unwrap_or(usize::MAX),
                    cap: max_dim,
                })
            }
        };
        let mut out = CVector::zeros(dim);
        for b in &self.branches {
            let offset = repeated_index(b.gamma, self.pointer_dim, self.stages);
            for (a, &x) in b.component.iter().enumerate() {
                out[a * block + offset] += x * b.amplitude;
            }
        }
        Ok(out)
    }
}

/// State on `(sys, p₁, …, p_N)`.
#[derive(Clone, Debug)]
pub struct CascadeState {
    state: StateVector,
    stages: usize,
}

impl CascadeState {
    pub fn new(state: StateVector) -> Result<Self> {
        let stages = state.signature().legs().saturating_sub(1);
        if stages == 0 {
            return Err(Error::Shape(
                "a cascade state needs a system leg and pointer legs".into(),
            ));
        }
        let dims = state.signature().dims();
        if dims[1..].iter().any(|&d| d != dims[1]) {
            return Err(Error::Shape(
                "pointer registers must share one dimension".into(),
            ));
        }
        Ok(Self { state, stages })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn vector(&self) -> &CVector {
        self.state.vector()
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    fn dims(&self) -> (usize, usize) {
        let d = self.state.signature().dims();
        (d[0], d[1])
    }

    /// Outcome distribution of pointer register `k` (1-based).
    pub fn register_distribution(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.stages {
            return Err(Error::InvalidLegs(format!(
                "register {k} of {}",
                self.stages
            )));
        }
        let (rho, _) = self
            .state
            .signature()
            .reduced_density(self.vector(), &[k])?;
        Ok(rho.diagonal().iter().map(|z| z.re).collect())
    }

    /// Joint distribution `P[a][b]` of registers `j` and `k`.
    pub fn joint_distribution(&self, j: usize, k: usize) -> Result<Vec<Vec<f64>>> {
        if j == 0 || k == 0 || j > self.stages || k > self.stages {
            return Err(Error::InvalidLegs(format!(
                "registers {j}, {k} of {}",
                self.stages
            )));
        }
        let (rho, _) = self
            .state
            .signature()
            .reduced_density(self.vector(), &[j, k])?;
        let n = self.dims().1;
        Ok((0..n)
            .map(|a| (0..n).map(|b| rho[(a * n + b, a * n + b)].re).collect())
            .collect())
    }

    /// `(γ, ‖v_γ‖, v_γ/‖v_γ‖)` where `v_γ` is the system component paired with
    /// `|γ⟩^⊗N`; fails when more than [`BRANCH_TOL`] of the norm lies outside
    /// those sectors.
    pub fn branch_decompose(&self) -> Result<Vec<Branch>> {
        let (h, n) = self.dims();
        let block = self.vector().len() / h;
        let mut branches = Vec::new();
        let mut inside = 0.0;
        for gamma in 0..n {
            let offset = repeated_index(gamma, n, self.stages);
            let v = CVector::from_iterator(h, (0..h).map(|a| self.vector()[a * block + offset]));
            let amplitude = v.norm();
            inside += amplitude * amplitude;
            if amplitude > AMPLITUDE_FLOOR {
                branches.push(Branch {
                    gamma,
                    amplitude,
                    component: v / C64::from(amplitude),
                });
            }
        }
        let outside = self.vector().norm_squared() - inside;
        if outside > BRANCH_TOL {
            return Err(Error::Shape(format!(
                "state has weight {outside:e} outside the branch form"
            )));
        }
        Ok(branches)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::linalg::{basis_vector, c, identity, random_unit_vector, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sigma_z_amp(stages: usize) -> Amplifier {
        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let rep = UnitaryRep::from_generators(
            &g,
            vec![CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]))],
        )
        .unwrap();
        Amplifier::new(&rep, CascadeConfig::new(stages).unwrap(), 0).unwrap()
    }

    fn plus() -> StateVector {
        let h = 1.0 / 2f64.sqrt();
        StateVector::single(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)])).unwrap()
    }

    #[test]
    fn ghz_output() {
        let amp = sigma_z_amp(2);
        let out = amp.amplify(&plus()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let mut expected = CVector::zeros(8);
        expected[0] = c(h, 0.0); // |0, ι, ι⟩
        expected[7] = c(h, 0.0); // |1, sign, sign⟩
        assert!((out.vector() - expected).norm() < 1e-12);
        let branches = out.branch_decompose().unwrap();
        assert_eq!(branches.len(), 2);
        for b in branches {
            assert!((b.amplitude - h).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_single_branch() {
        let amp = sigma_z_amp(3);
        let xi = StateVector::single(basis_vector(2, 1)).unwrap();
        let out = amp.amplify(&xi).unwrap();
        assert!((out.vector() - basis_vector(16, 15)).norm() < 1e-12);
        let b = out.branch_decompose().unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0].amplitude - 1.0).abs() < 1e-12);
        let back = amp.recover(&out).unwrap();
        assert!((back.vector() - basis_vector(16, 8)).norm() < 1e-12);
    }

    #[test]
    fn one_stage_is_the_coupling() {
        let amp = sigma_z_amp(1);
        let input = amp.neutral_input(&plus()).unwrap();
        let direct = &amp.uv * input.vector();
        assert!((amp.amplify(&plus()).unwrap().vector() - direct).norm() < 1e-12);
    }

    #[test]
    fn flipped_register_is_not_branch_form() {
        let amp = sigma_z_amp(2);
        let out = amp
            .amplify(&StateVector::single(basis_vector(2, 0)).unwrap())
            .unwrap();
        let sig = out.state().signature().clone();
        let flip = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let bad = sig.apply_on_legs(&flip, &[2], out.vector()).unwrap();
        let bad = CascadeState::new(StateVector::new(bad, sig).unwrap()).unwrap();
        assert!(matches!(bad.branch_decompose(), Err(Error::Shape(_))));
    }

    #[test]
    fn decoherence_examples() {
        for n in 1..=3 {
            let rho = sigma_z_amp(n).decohered_state(&plus()).unwrap();
            assert!((rho.matrix() - identity(2) * c(0.5, 0.0)).norm() < 1e-12);
        }
        let rho = sigma_z_amp(2)
            .decohered_state(&StateVector::single(basis_vector(2, 0)).unwrap())
            .unwrap();
        assert!((rho.matrix()[(0, 0)] - ONE).norm() < 1e-12);
        assert!(CascadeConfig::new(0).is_err());
    }

    #[test]
    fn analytic_matches_dense_and_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for orders in [vec![2], vec![3], vec![2, 2]] {
            let g = FiniteAbelianGroup::new(&orders).unwrap();
            let rep = UnitaryRep::random(&g, 3, &mut rng).unwrap();
            for stages in 1..=4 {
                let amp = Amplifier::new(&rep, CascadeConfig::new(stages).unwrap(), 2).unwrap();
                let xi = StateVector::single(random_unit_vector(&mut rng, 3)).unwrap();
                let dense = amp.amplify(&xi).unwrap();
                let analytic = amp.amplify_analytic(&xi).unwrap();
                assert!(
                    (dense.vector() - analytic.densify(DEFAULT_MAX_DIM).unwrap()).norm() < 1e-9
                );
                assert!((dense.vector().norm() - 1.0).abs() < 1e-10);
                assert!((analytic.total_weight() - 1.0).abs() < 1e-10);
                let back = amp.recover(&dense).unwrap();
                let neutral = amp.neutral_input(&xi).unwrap();
                assert!(back.fidelity(&neutral) > 1.0 - 1e-10);
                let rho = amp.decohered_state(&xi).unwrap();
                assert!((rho.matrix() - analytic.decohered()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn pointer_consensus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = FiniteAbelianGroup::new(&[3]).unwrap();
        let rep = UnitaryRep::random(&g, 2, &mut rng).unwrap();
        let amp = Amplifier::new(&rep, CascadeConfig::new(3).unwrap(), 0).unwrap();
        let xi = StateVector::single(random_unit_vector(&mut rng, 2)).unwrap();
        let out = amp.amplify(&xi).unwrap();
        let expected = amp.amplify_analytic(&xi).unwrap().register_distribution();
        for k in 1..=3 {
            let p = out.register_distribution(k).unwrap();
            for (a, b) in p.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        let joint = out.joint_distribution(1, 3).unwrap();
        let off: f64 = (0..3)
            .flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| joint[a][b])
            .sum();
        assert!(off < 1e-10);
    }

    #[test]
    fn heisenberg_duality_and_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let rep = UnitaryRep::random(&g, 2, &mut rng).unwrap();
        let amp = Amplifier::new(&rep, CascadeConfig::new(2).unwrap(), 0).unwrap();
        let a = crate::linalg::random_hermitian(&mut rng, 2);
        let fs: Vec<CMatrix> = (0..2)
            .map(|_| CMatrix::from_diagonal(&crate::linalg::random_vector(&mut rng, 4)))
            .collect();
        let flat = amp.heisenberg_chain(&a, &fs).unwrap();
        let nested = amp.heisenberg_chain_nested(&a, &fs).unwrap();
        assert!((&flat - &nested).norm() < 1e-10);

        let xi = StateVector::single(random_unit_vector(&mut rng, 2)).unwrap();
        let out = amp.amplify(&xi).unwrap();
        let obs = kron(&kron(&a, &fs[0]), &fs[1]);
        let schrodinger = out.vector().dotc(&(&obs * out.vector()));
        let input = amp.neutral_input(&xi).unwrap();
        let heisenberg = input.vector().dotc(&(&flat * input.vector()));
        assert!((schrodinger - heisenberg).norm() < 1e-10);

        // trivial pointer observables leave A ⊗ 1 ⊗ 1 fixed when A commutes with E
        let ones = vec![identity(4); 2];
        let e = amp.measure().projection(amp.measure().support()[0]).clone();
        let trivial = amp.heisenberg_chain(&e, &ones).unwrap();
        assert!((trivial - kron(&kron(&e, &identity(4)), &identity(4))).norm() < 1e-10);
        // and in general only the coupling survives
        let general = amp.heisenberg_chain(&a, &ones).unwrap();
        let coupled = amp.uv.adjoint() * kron(&a, &identity(4)) * &amp.uv;
        assert!((general - kron(&coupled, &identity(4))).norm() < 1e-10);

        // A = 1: spectrum made of products of f-values
        let real: Vec<CMatrix> = fs.iter().map(|f| f.map(|z| C64::from(z.re))).collect();
        let chain = amp.heisenberg_chain(&identity(2), &real).unwrap();
        let (values, _) = crate::linalg::hermitian_eigen(&chain);
        for z in values {
            let hit = (0..4).any(|x| {
                (0..4).any(|y| (real[0][(x, x)].re * real[1][(y, y)].re - z).abs() < 1e-10)
            });
            assert!(hit);
        }

        let off = vec![CMatrix::from_element(4, 4, ONE), identity(4)];
        assert!(matches!(
            amp.heisenberg_chain(&a, &off),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn caps_are_enforced() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let rep = UnitaryRep::trivial(&g, 2);
        let amp = Amplifier::new(&rep, CascadeConfig::new(20).unwrap(), 0).unwrap();
        let xi = StateVector::single(basis_vector(2, 0)).unwrap();
        assert!(matches!(amp.amplify(&xi), Err(Error::DimensionCap { .. })));
        let analytic = amp.amplify_analytic(&xi).unwrap();
        assert_eq!(analytic.branches().len(), 1);
        assert!(analytic.densify(DEFAULT_MAX_DIM).is_err());
    }
}
