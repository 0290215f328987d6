//! Subgroups `H ≤ G` of a finite abelian group, cosets `G/H`, annihilators
//! `H^⊥ ⊆ Ĝ`, characters of `H`, and the sector bundle `G ×_H Ĥ → G/H`.
//!
//! Character values are handled exactly as numerators `k` of
//! `exp(2πi k / e)`, where `e` is the exponent of `G`.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{root_of_unity, CMatrix};

/// `k` with `γ(u) = exp(2πi k / e)`.
fn pairing(group: &FiniteAbelianGroup, gamma: usize, u: usize) -> usize {
    let e = group.exponent();
    let (g, x) = (group.element(gamma), group.element(u));
    group
        .orders()
        .iter()
        .zip(g.iter().zip(&x))
        .map(|(&d, (&a, &b))| a * b * (e / d))
        .sum::<usize>()
        % e
}

/// Sorted elements of the subgroup generated by `generators`.
fn closure(group: &FiniteAbelianGroup, generators: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::from([group.identity()]);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(h) = queue.pop_front() {
        for &g in generators {
            let next = group.op(h, g);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    /// Least element of the coset in the lexicographic order.
    pub representative: usize,
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    group: FiniteAbelianGroup,
    generators: Vec<usize>,
    elements: Vec<usize>,
    cosets: Vec<Coset>,
}

impl SubgroupSpec {
    /// Subgroup generated by element tuples of `group`.
    pub fn from_tuples(group: &FiniteAbelianGroup, generators: &[Vec<usize>]) -> Result<Self> {
        let indices = generators
            .iter()
            .map(|t| {
                group.index_of(t).map_err(|_| {
                    Error::NotSubgroup(format!("generator {t:?} is not an element of the group"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::generated(group, &indices))
    }

    /// Subgroup generated by element indices, which must be in range.
    pub fn generated(group: &FiniteAbelianGroup, generators: &[usize]) -> Self {
        let elements = closure(group, generators);
        Self::from_elements(group, &elements).expect("a closure is a subgroup")
    }

    /// Subgroup given by its full element list, after checking closure.
    pub fn from_elements(group: &FiniteAbelianGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&u| u >= group.order()) {
            return Err(Error::NotSubgroup(format!("element {bad} is out of range")));
        }
        if !set.contains(&group.identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&group.difference(a, b)) {
                    return Err(Error::NotSubgroup(format!("not closed: {a} - {b}")));
                }
            }
        }
        let elements: Vec<usize> = set.into_iter().collect();
        // keep only elements that enlarge the span, so at most log₂|H| remain
        let mut generators = Vec::new();
        let mut span = vec![group.identity()];
        for &u in &elements {
            if span.binary_search(&u).is_err() {
                generators.push(u);
                span = closure(group, &generators);
            }
        }
        Ok(Self::with_elements(group, generators, elements))
    }

    fn with_elements(
        group: &FiniteAbelianGroup,
        generators: Vec<usize>,
        elements: Vec<usize>,
    ) -> Self {
        let mut assigned = vec![false; group.order()];
        let mut cosets = Vec::new();
        for u in group.elements() {
            if assigned[u] {
                continue;
            }
            let mut members: Vec<usize> = elements.iter().map(|&h| group.op(u, h)).collect();
            members.sort_unstable();
            for &m in &members {
                assigned[m] = true;
            }
            cosets.push(Coset {
                representative: members[0],
                elements: members,
            });
        }
        Self {
            group: group.clone(),
            generators,
            elements,
            cosets,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.elements.binary_search(&u).is_ok()
    }

    /// Cosets of `G/H`, ordered by representative.
    pub fn quotient(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    pub fn coset_of(&self, u: usize) -> usize {
        self.cosets
            .iter()
            .position(|c| c.elements.binary_search(&u).is_ok())
            .expect("cosets partition the group")
    }

    /// `H^⊥ = {χ ∈ Ĝ : χ|_H ≡ 1}`, as dual-group indices.
    pub fn annihilator(&self) -> Vec<usize> {
        self.group
            .elements()
            .filter(|&chi| {
                self.elements
                    .iter()
                    .all(|&h| pairing(&self.group, chi, h) == 0)
            })
            .collect()
    }

    /// `χ|_H` as exact values on `self.elements()`.
    pub fn restrict(&self, chi: usize) -> Vec<usize> {
        self.elements
            .iter()
            .map(|&h| pairing(&self.group, chi, h))
            .collect()
    }

    /// Characters of `H`, found by assigning a value to each generator and
    /// keeping the assignments that extend to a homomorphism. Each character
    /// is listed by its exact values on `self.elements()`.
    pub fn dual(&self) -> Vec<Vec<usize>> {
        let e = self.group.exponent();
        let choices: Vec<Vec<usize>> = self
            .generators
            .iter()
            .map(|&x| {
                let ord = self.group.element_order(x);
                (0..ord).map(|k| k * (e / ord)).collect()
            })
            .collect();
        let position = |u: usize| self.elements.binary_search(&u).expect("element of H");
        let mut out = BTreeSet::new();
        let mut odometer = vec![0; choices.len()];
        loop {
            let assignment: Vec<usize> =
                odometer.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if let Some(values) = self.extend_assignment(&assignment, &position) {
                out.insert(values);
            }
            let mut k = 0;
            loop {
                if k == choices.len() {
                    return out.into_iter().collect();
                }
                odometer[k] += 1;
                if odometer[k] < choices[k].len() {
                    break;
                }
                odometer[k] = 0;
                k += 1;
            }
        }
    }

    /// Values of the homomorphism sending generator `i` to `assignment[i]`,
    /// or `None` if the assignment is not well defined on `H`.
    fn extend_assignment(
        &self,
        assignment: &[usize],
        position: &dyn Fn(usize) -> usize,
    ) -> Option<Vec<usize>> {
        let g = &self.group;
        let e = g.exponent();
        let mut values: Vec<Option<usize>> = vec![None; self.elements.len()];
        values[position(g.identity())] = Some(0);
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(h) = queue.pop_front() {
            let base = values[position(h)]?;
            for (&x, &a) in self.generators.iter().zip(assignment) {
                let next = g.op(h, x);
                let value = (base + a) % e;
                match values[position(next)] {
                    Some(v) if v != value => return None,
                    Some(_) => {}
                    None => {
                        values[position(next)] = Some(value);
                        queue.push_back(next);
                    }
                }
            }
        }
        values.into_iter().collect()
    }

    /// `χ(coset)` for `χ ∈ H^⊥`; fails if some `χ` is not constant on a coset.
    pub fn quotient_character_table(&self) -> Result<CMatrix> {
        let e = self.group.exponent();
        let perp = self.annihilator();
        let mut table = CMatrix::zeros(perp.len(), self.cosets.len());
        for (i, &chi) in perp.iter().enumerate() {
            for (j, coset) in self.cosets.iter().enumerate() {
                let k = pairing(&self.group, chi, coset.representative);
                if coset
                    .elements
                    .iter()
                    .any(|&u| pairing(&self.group, chi, u) != k)
                {
                    return Err(Error::Domain(format!(
                        "character {chi} is not constant on coset {j}"
                    )));
                }
                table[(i, j)] = root_of_unity(k, e);
            }
        }
        Ok(table)
    }

    /// Whether translations by `G` act transitively on `G/H`.
    pub fn action_is_transitive(&self) -> bool {
        let mut reached = BTreeSet::from([0]);
        let mut queue = VecDeque::from([0]);
        while let Some(c) = queue.pop_front() {
            let rep = self.cosets[c].representative;
            for j in 0..self.group.rank() {
                let next = self.coset_of(self.group.op(self.group.generator(j), rep));
                if reached.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        reached.len() == self.cosets.len()
    }
}

/// `G ×_H Ĥ → G/H`: one sector per (coset, character of `H`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBundle {
    pub base: Vec<usize>,
    pub fiber: Vec<Vec<usize>>,
    pub total: Vec<(usize, usize)>,
    /// The coset realised as the current vacuum.
    pub selected: usize,
}

impl SectorBundle {
    pub fn base_size(&self) -> usize {
        self.base.len()
    }

    pub fn fiber_size(&self) -> usize {
        self.fiber.len()
    }

    pub fn total_size(&self) -> usize {
        self.total.len()
    }
}

pub fn sector_bundle(spec: &SubgroupSpec, selected: usize) -> Result<SectorBundle> {
    if selected >= spec.index() {
        return Err(Error::Domain(format!(
            "coset {selected} of {}",
            spec.index()
        )));
    }
    let base: Vec<usize> = spec.quotient().iter().map(|c| c.representative).collect();
    let fiber = spec.dual();
    let total = (0..base.len())
        .flat_map(|c| (0..fiber.len()).map(move |f| (c, f)))
        .collect();
    Ok(SectorBundle {
        base,
        fiber,
        total,
        selected,
    })
}

/// Every subgroup of `group`, ordered by size and then by element list.
pub fn all_subgroups(group: &FiniteAbelianGroup) -> Vec<SubgroupSpec> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = VecDeque::from([vec![group.identity()]]);
    found.insert(vec![group.identity()]);
    while let Some(h) = queue.pop_front() {
        for u in group.elements() {
            if h.binary_search(&u).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(u);
            let next = closure(group, &gens);
            if found.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.into_iter()
        .map(|elements| {
            SubgroupSpec::from_elements(group, &elements).expect("closure of generators")
        })
        .collect()
}

/// Exact bookkeeping checks for one subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsbChecks {
    pub lagrange: bool,
    pub annihilator_order: bool,
    pub restriction_surjective: bool,
    pub restriction_kernel: bool,
    pub quotient_pairing: bool,
    pub bundle_total: bool,
    pub transitive: bool,
}

impl SsbChecks {
    pub fn all(&self) -> bool {
        self.lagrange
            && self.annihilator_order
            && self.restriction_surjective
            && self.restriction_kernel
            && self.quotient_pairing
            && self.bundle_total
            && self.transitive
    }
}

pub fn ssb_checks(spec: &SubgroupSpec) -> Result<SsbChecks> {
    let g = spec.group();
    let perp = spec.annihilator();
    let dual_h: BTreeSet<Vec<usize>> = spec.dual().into_iter().collect();
    let image: BTreeSet<Vec<usize>> = g.elements().map(|chi| spec.restrict(chi)).collect();
    let trivial = vec![0; spec.order()];
    let kernel: Vec<usize> = g
        .elements()
        .filter(|&chi| spec.restrict(chi) == trivial)
        .collect();
    let table = spec.quotient_character_table()?;
    let k = spec.index();
    let quotient_pairing = table.nrows() == k
        && (&table * table.adjoint() / crate::linalg::C64::from(k as f64)
            - crate::linalg::identity(k))
        .norm()
            < 1e-10;
    let bundle = sector_bundle(spec, 0)?;
    Ok(SsbChecks {
        lagrange: g.order() == spec.order() * spec.index(),
        annihilator_order: perp.len() == spec.index() && perp.len() * spec.order() == g.order(),
        restriction_surjective: image == dual_h && dual_h.len() == spec.order(),
        restriction_kernel: kernel == perp,
        quotient_pairing,
        bundle_total: bundle.total_size() == g.order()
            && bundle.base_size() * bundle.fiber_size() == g.order(),
        transitive: spec.action_is_transitive(),
    })
}
