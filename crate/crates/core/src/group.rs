//! Finite abelian groups in invariant-factor form, their duals, characters
//! and the unitary Fourier transform `ℓ²(U) → ℓ²(Û)`.
//!
//! Elements are identified with their position in the lexicographic
//! enumeration of tuples `(u_1, …, u_k)`, `0 ≤ u_i < d_i`, first coordinate
//! most significant. That index is the matrix index used everywhere else.

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, CMatrix, CVector, C64};

/// `Z_{d_1} × … × Z_{d_k}` with componentwise addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
    exponent: usize,
}

impl FiniteAbelianGroup {
    pub fn new(orders: &[usize]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidPresentation(
                "empty list of cyclic orders".into(),
            ));
        }
        if let Some(bad) = orders.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidPresentation(format!(
                "cyclic order {bad} is not positive"
            )));
        }
        let mut strides = vec![1; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1];
        }
        let order = orders.iter().product();
        let exponent = orders.iter().fold(1, |acc, &d| lcm(acc, d));
        Ok(Self {
            orders: orders.to_vec(),
            strides,
            order,
            exponent,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// `|U|`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of cyclic factors in the presentation.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// lcm of the cyclic orders.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn element(&self, index: usize) -> Vec<usize> {
        self.orders
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| (index / s) % d)
            .collect()
    }

    pub fn index_of(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.rank() {
            return Err(Error::Domain(format!(
                "element {tuple:?} has {} coordinates, group has {}",
                tuple.len(),
                self.rank()
            )));
        }
        let mut index = 0;
        for ((&x, &d), &s) in tuple.iter().zip(&self.orders).zip(&self.strides) {
            if x >= d {
                return Err(Error::Domain(format!(
                    "coordinate {x} out of range for Z_{d}"
                )));
            }
            index += x * s;
        }
        Ok(index)
    }

    /// Generator of the `j`-th cyclic factor.
    pub fn generator(&self, j: usize) -> usize {
        if self.orders[j] == 1 {
            0
        } else {
            self.strides[j]
        }
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        let mut index = 0;
        for (&d, &s) in self.orders.iter().zip(&self.strides) {
            index += (((a / s) % d + (b / s) % d) % d) * s;
        }
        index
    }

    pub fn inverse(&self, a: usize) -> usize {
        let mut index = 0;
        for (&d, &s) in self.orders.iter().zip(&self.strides) {
            index += ((d - (a / s) % d) % d) * s;
        }
        index
    }

    /// `a · b⁻¹`.
    pub fn difference(&self, a: usize, b: usize) -> usize {
        self.op(a, self.inverse(b))
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.orders
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| d / gcd((a / s) % d, d))
            .fold(1, lcm)
    }

    /// Character `γ(u) = exp(2πi Σ_j γ_j u_j / d_j)` for `γ` indexed in the
    /// dual of this very presentation.
    pub fn character(&self, gamma: usize, u: usize) -> C64 {
        let l = self.exponent;
        let mut k = 0;
        for (&d, &s) in self.orders.iter().zip(&self.strides) {
            let g = (gamma / s) % d;
            let x = (u / s) % d;
            k = (k + (g * x % d) * (l / d)) % l;
        }
        root_of_unity(k, l)
    }

    pub fn dual(&self) -> DualGroup {
        DualGroup {
            group: self.clone(),
        }
    }

    /// Unitary Fourier matrix `F[γ, u] = conj(γ(u)) / √|U|`.
    pub fn fourier_matrix(&self) -> CMatrix {
        let scale = 1.0 / (self.order as f64).sqrt();
        CMatrix::from_fn(self.order, self.order, |g, u| {
            self.character(g, u).conj() * scale
        })
    }

    pub fn fourier(&self, f: &GroupFunction) -> Result<GroupFunction> {
        self.check_len(f)?;
        Ok(GroupFunction(self.fourier_matrix() * &f.0))
    }

    pub fn inverse_fourier(&self, f: &GroupFunction) -> Result<GroupFunction> {
        self.check_len(f)?;
        Ok(GroupFunction(self.fourier_matrix().adjoint() * &f.0))
    }

    /// Invariant mean `(1/|U|) Σ_u f(u)`.
    pub fn haar_mean(&self, f: &GroupFunction) -> Result<C64> {
        self.check_len(f)?;
        Ok(f.0.sum() / self.order as f64)
    }

    /// `f ↦ f(· + g)`.
    pub fn translate(&self, f: &GroupFunction, g: usize) -> Result<GroupFunction> {
        self.check_len(f)?;
        Ok(GroupFunction(CVector::from_fn(self.order, |u, _| {
            f.0[self.op(u, g)]
        })))
    }

    fn check_len(&self, f: &GroupFunction) -> Result<()> {
        if f.0.len() != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: f.0.len(),
            });
        }
        Ok(())
    }
}

/// `Û`, presented with the same cyclic orders; its group law (pointwise
/// product of characters) is the componentwise addition of the labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualGroup {
    group: FiniteAbelianGroup,
}

impl DualGroup {
    /// The dual viewed as an abstract group.
    pub fn as_group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order
    }

    /// Identity character `ι`.
    pub fn trivial(&self) -> usize {
        0
    }

    pub fn label(&self, gamma: usize) -> Vec<usize> {
        self.group.element(gamma)
    }

    pub fn index_of(&self, tuple: &[usize]) -> Result<usize> {
        self.group.index_of(tuple)
    }
}

/// Evaluates `γ(u)` for tuple-valued arguments, checking that both come from
/// matching presentations.
pub fn character_value(
    dual: &DualGroup,
    gamma: &[usize],
    group: &FiniteAbelianGroup,
    u: &[usize],
) -> Result<C64> {
    if dual.group.orders != group.orders {
        return Err(Error::Domain(format!(
            "dual presentation {:?} does not match group presentation {:?}",
            dual.group.orders, group.orders
        )));
    }
    let g = dual.index_of(gamma)?;
    let x = group.index_of(u)?;
    Ok(group.character(g, x))
}

/// A vector in `ℓ²(U)` or `ℓ²(Û)`, one amplitude per element.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction(pub CVector);

impl GroupFunction {
    pub fn new(values: Vec<C64>) -> Self {
        Self(CVector::from_vec(values))
    }

    pub fn delta(order: usize, at: usize) -> Self {
        let mut v = CVector::zeros(order);
        v[at] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn values(&self) -> &CVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Invariant-factor presentations `[d_1 | d_2 | …]` of every abelian group of
/// order at most `max_order`, one per isomorphism type. The trivial group is
/// `[1]`.
pub fn abelian_groups_up_to(max_order: usize) -> Vec<FiniteAbelianGroup> {
    fn extend(prefix: &mut Vec<usize>, remaining: usize, out: &mut Vec<Vec<usize>>) {
        if remaining == 1 {
            out.push(prefix.clone());
            return;
        }
        let last = prefix.last().copied().unwrap_or(1);
        for d in 2..=remaining {
            let rest = remaining / d;
            if remaining.is_multiple_of(d)
                && d.is_multiple_of(last)
                && (rest == 1 || rest.is_multiple_of(d))
            {
                prefix.push(d);
                extend(prefix, rest, out);
                prefix.pop();
            }
        }
    }

    let mut presentations = vec![vec![1]];
    for n in 2..=max_order {
        extend(&mut Vec::new(), n, &mut presentations);
    }
    presentations
        .iter()
        .map(|p| FiniteAbelianGroup::new(p).expect("valid presentation"))
        .collect()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
