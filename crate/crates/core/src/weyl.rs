//! The Weyl group as an explicit finite group of rational matrices, and the
//! subgroups of it that govern focal orbits: stabilizers `W_H`, the
//! centralizer `W^q` of a point modulo the unit lattice, and the reflection
//! subgroup `W^q_0`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{is_integer, RationalMatrix, RationalVector};
use crate::lattice::LatticeBasis;
use crate::root_datum::RootDatum;

pub const DEFAULT_MAX_ORDER: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    pub matrix: RationalMatrix,
    /// Word in the simple reflections (positions in `simple_indices`).
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn act(&self, h: &RationalVector) -> RationalVector {
        self.matrix.mul_vec(h)
    }
}

fn reflection_matrix(datum: &RootDatum, root_index: usize) -> RationalMatrix {
    // r_α(h) = h - α(h) H_α^∨
    let n = datum.rank();
    let coroot = datum.coroot(root_index);
    let columns: Vec<RationalVector> = (0..n)
        .map(|j| {
            let e = RationalVector::unit(n, j);
            &e - &coroot.scale(&datum.evaluate(root_index, &e))
        })
        .collect();
    RationalMatrix::from_columns(n, &columns).expect("square reflection matrix")
}

/// The reflection `r_α` as a Weyl group element, with a word in the simple
/// reflections obtained by conjugating a simple root into `α`.
pub fn reflection(datum: &RootDatum, root_index: usize) -> WeylElement {
    let matrix = reflection_matrix(datum, root_index);
    let simple = datum.simple_indices();
    let positive =
        if datum.positive_indices().contains(&root_index) { root_index } else { datum.negative_of(root_index) };
    let half = crate::exact::rat(1, 2);
    let mut current = datum.root(positive).covector.clone();
    if let Some(j) = datum.find_root(&current.scale(&half)) {
        current = datum.root(j).covector.clone();
    }

    // Walk down in height: some simple s has <α, s> > 0 unless α is simple.
    let mut prefix = Vec::new();
    let word = loop {
        if let Some(pos) = simple.iter().position(|&s| datum.root(s).covector == current) {
            let mut w = prefix.clone();
            w.push(pos);
            w.extend(prefix.iter().rev());
            break w;
        }
        let (pos, s) = simple
            .iter()
            .enumerate()
            .find(|(_, &s)| datum.inner(&current, &datum.root(s).covector).is_positive())
            .map(|(p, &s)| (p, s))
            .expect("a non-simple positive root pairs positively with some simple root");
        current = reflection_matrix(datum, s).mul_vec(&current);
        prefix.push(pos);
    };
    WeylElement { matrix, word }
}

/// A subgroup given by sorted element indices into a [`WeylGroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    pub element_indices: Vec<usize>,
    pub generator_indices: Vec<usize>,
}

impl SubgroupDescriptor {
    pub fn order(&self) -> usize {
        self.element_indices.len()
    }

    pub fn contains(&self, element: usize) -> bool {
        self.element_indices.binary_search(&element).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubgroupDescriptor) -> bool {
        self.element_indices.iter().all(|&e| other.contains(e))
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    rank: usize,
    elements: Vec<WeylElement>,
    generators: Vec<RationalMatrix>,
    /// Index of each simple reflection in `elements`.
    generator_elements: Vec<usize>,
    lookup: HashMap<RationalMatrix, usize>,
}

impl WeylGroup {
    /// Closes the simple reflections under multiplication, breadth first.
    /// Elements come out ordered by word length, then lexicographic word.
    pub fn enumerate(datum: &RootDatum, max_order: usize) -> Result<Self> {
        let rank = datum.rank();
        let generators: Vec<RationalMatrix> =
            datum.simple_indices().iter().map(|&s| reflection_matrix(datum, s)).collect();
        let identity = RationalMatrix::identity(rank);
        let mut elements = vec![WeylElement { matrix: identity.clone(), word: Vec::new() }];
        let mut lookup = HashMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(current) = queue.pop_front() {
            for (g, gen) in generators.iter().enumerate() {
                let product = elements[current].matrix.mul(gen);
                if lookup.contains_key(&product) {
                    continue;
                }
                if elements.len() >= max_order {
                    return Err(Error::GroupTooLarge { limit: max_order, partial: elements.len() });
                }
                let mut word = elements[current].word.clone();
                word.push(g);
                lookup.insert(product.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(WeylElement { matrix: product, word });
            }
        }
        let generator_elements = generators.iter().map(|g| lookup[g]).collect();
        Ok(WeylGroup { rank, elements, generators, generator_elements, lookup })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &WeylElement {
        &self.elements[index]
    }

    pub fn generators(&self) -> &[RationalMatrix] {
        &self.generators
    }

    pub fn generator_elements(&self) -> &[usize] {
        &self.generator_elements
    }

    pub fn index_of(&self, matrix: &RationalMatrix) -> Option<usize> {
        self.lookup.get(matrix).copied()
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        let product = self.elements[a].matrix.mul(&self.elements[b].matrix);
        self.index_of(&product).expect("group is closed under multiplication")
    }

    pub fn inverse(&self, a: usize) -> usize {
        // Simple reflections are involutions, so the reversed word is the inverse.
        let mut m = RationalMatrix::identity(self.rank);
        for &g in self.elements[a].word.iter().rev() {
            m = m.mul(&self.generators[g]);
        }
        self.index_of(&m).expect("group is closed under inversion")
    }

    pub fn act(&self, index: usize, h: &RationalVector) -> RationalVector {
        self.elements[index].act(h)
    }

    /// Index of the reflection in a root.
    pub fn reflection_index(&self, datum: &RootDatum, root_index: usize) -> usize {
        self.index_of(&reflection_matrix(datum, root_index)).expect("root reflections lie in W")
    }

    /// Closure of the given elements under multiplication.
    pub fn generate(&self, generators: &[usize]) -> SubgroupDescriptor {
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let y = self.multiply(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut gens: Vec<usize> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        SubgroupDescriptor { element_indices: seen.into_iter().collect(), generator_indices: gens }
    }

    /// Wraps a set of elements already known to be closed, choosing a small
    /// generating set greedily in element order.
    fn subgroup_from_elements(&self, mut elements: Vec<usize>) -> Result<SubgroupDescriptor> {
        elements.sort_unstable();
        let mut gens = Vec::new();
        let mut span = self.generate(&[]);
        for &e in &elements {
            if !span.contains(e) {
                gens.push(e);
                span = self.generate(&gens);
            }
        }
        if span.element_indices != elements {
            return Err(Error::InternalInvariantViolation("element set is not closed under multiplication".into()));
        }
        Ok(SubgroupDescriptor { element_indices: elements, generator_indices: gens })
    }

    /// `W_H = { w : w h = h }`, cross-checked against the subgroup generated by
    /// reflections in the root hyperplanes through `h`.
    pub fn stabilizer(&self, datum: &RootDatum, h: &RationalVector) -> Result<SubgroupDescriptor> {
        let fixing: Vec<usize> = (0..self.order()).filter(|&i| &self.act(i, h) == h).collect();
        let subgroup = self.subgroup_from_elements(fixing)?;
        let reflections: Vec<usize> = datum
            .positive_indices()
            .filter(|&i| datum.evaluate(i, h).is_zero())
            .map(|i| self.reflection_index(datum, i))
            .collect();
        let generated = self.generate(&reflections);
        if generated.element_indices != subgroup.element_indices {
            return Err(Error::InternalInvariantViolation(format!(
                "stabilizer of {h} has order {} but its root reflections generate {}",
                subgroup.order(),
                generated.order()
            )));
        }
        Ok(SubgroupDescriptor { element_indices: subgroup.element_indices, generator_indices: reflections })
    }

    /// `W^q = { w : w h - h ∈ Γ }`.
    pub fn centralizer_mod_lattice(&self, h: &RationalVector, gamma: &LatticeBasis) -> Result<SubgroupDescriptor> {
        let mut members = Vec::new();
        for i in 0..self.order() {
            let shift = &self.act(i, h) - h;
            if gamma.contains(&shift)? {
                members.push(i);
            }
        }
        self.subgroup_from_elements(members)
    }

    /// `W^q_0`: generated by reflections in the root hyperplanes parallel to
    /// the diagram hyperplanes through `h` (those `α` with `α(h) ∈ ℤ`).
    pub fn parallel_subgroup(&self, datum: &RootDatum, h: &RationalVector) -> SubgroupDescriptor {
        let reflections: Vec<usize> = datum
            .positive_indices()
            .filter(|&i| is_integer(&datum.evaluate(i, h)))
            .map(|i| self.reflection_index(datum, i))
            .collect();
        self.generate(&reflections)
    }

    pub fn is_normal_in(&self, normal: &SubgroupDescriptor, group: &SubgroupDescriptor) -> bool {
        group.element_indices.iter().all(|&g| {
            let g_inv = self.inverse(g);
            normal.element_indices.iter().all(|&n| normal.contains(self.multiply(self.multiply(g, n), g_inv)))
        })
    }

    /// `|sub| / |normal|` after checking containment and normality.
    pub fn quotient_size(&self, sub: &SubgroupDescriptor, normal: &SubgroupDescriptor) -> Result<usize> {
        if !normal.is_subset_of(sub) {
            return Err(Error::InternalInvariantViolation("W^q_0 is not contained in W^q".into()));
        }
        if !self.is_normal_in(normal, sub) {
            return Err(Error::InternalInvariantViolation("W^q_0 is not normal in W^q".into()));
        }
        Ok(sub.order() / normal.order())
    }

    /// Left cosets `g N` of `normal` in `sub`, each a sorted index list, in
    /// order of their smallest element.
    pub fn left_cosets(&self, sub: &SubgroupDescriptor, normal: &SubgroupDescriptor) -> Vec<Vec<usize>> {
        let mut assigned = BTreeSet::new();
        let mut cosets = Vec::new();
        for &g in &sub.element_indices {
            if assigned.contains(&g) {
                continue;
            }
            let mut coset: Vec<usize> = normal.element_indices.iter().map(|&n| self.multiply(g, n)).collect();
            coset.sort_unstable();
            assigned.extend(coset.iter().copied());
            cosets.push(coset);
        }
        cosets
    }

    /// Every element preserves the Gram form and permutes the roots with
    /// multiplicities.
    pub fn check_elements(&self, datum: &RootDatum) -> Result<()> {
        let gram = datum.gram();
        for (i, e) in self.elements.iter().enumerate() {
            if &e.matrix.transpose().mul(&gram.mul(&e.matrix)) != gram {
                return Err(Error::InternalInvariantViolation(format!("element {i} does not preserve the Gram form")));
            }
            if datum.root_permutation(&e.matrix).is_none() {
                return Err(Error::InternalInvariantViolation(format!("element {i} does not permute the roots")));
            }
        }
        Ok(())
    }
}

/// Free-function form of [`WeylGroup::enumerate`].
pub fn enumerate_weyl_group(datum: &RootDatum, max_order: usize) -> Result<WeylGroup> {
    WeylGroup::enumerate(datum, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::root_datum::Root;

    fn v(c: &[i64]) -> RationalVector {
        RationalVector::from_integers(c)
    }

    fn a1xa1() -> RootDatum {
        RootDatum::new(2, vec![Root::new(v(&[1, -1]), 1), Root::new(v(&[1, 1]), 1)], RationalMatrix::identity(2))
            .unwrap()
    }

    fn sphere() -> RootDatum {
        RootDatum::new(1, vec![Root::new(v(&[1]), 1)], RationalMatrix::identity(1)).unwrap()
    }

    fn b2() -> RootDatum {
        RootDatum::new(
            2,
            vec![
                Root::new(v(&[1, 0]), 1),
                Root::new(v(&[0, 1]), 1),
                Root::new(v(&[1, 1]), 1),
                Root::new(v(&[1, -1]), 1),
            ],
            RationalMatrix::identity(2),
        )
        .unwrap()
    }

    #[test]
    fn reflection_matrices() {
        let d = a1xa1();
        let r = reflection(&d, 0);
        assert_eq!(r.matrix, RationalMatrix::from_integer_rows(&[&[0, 1], &[1, 0]]));
        assert_eq!(r.matrix.mul(&r.matrix), RationalMatrix::identity(2));
        let s = reflection(&sphere(), 0);
        assert_eq!(s.matrix, RationalMatrix::from_integer_rows(&[&[-1]]));
    }

    #[test]
    fn reflection_words_for_non_simple_roots() {
        let d = b2();
        let w = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        for i in 0..d.roots().len() {
            let r = reflection(&d, i);
            let mut m = RationalMatrix::identity(2);
            for &g in &r.word {
                m = m.mul(&w.generators()[g]);
            }
            assert_eq!(m, r.matrix, "word {:?} for root {i}", r.word);
        }
    }

    #[test]
    fn group_orders() {
        let g = WeylGroup::enumerate(&a1xa1(), DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(g.order(), 4);
        let minus_id = RationalMatrix::from_integer_rows(&[&[-1, 0], &[0, -1]]);
        assert!(g.index_of(&minus_id).is_some());
        assert_eq!(WeylGroup::enumerate(&sphere(), DEFAULT_MAX_ORDER).unwrap().order(), 2);
        let torus = RootDatum::torus(3, RationalMatrix::identity(3)).unwrap();
        assert_eq!(WeylGroup::enumerate(&torus, DEFAULT_MAX_ORDER).unwrap().order(), 1);
        assert_eq!(WeylGroup::enumerate(&b2(), DEFAULT_MAX_ORDER).unwrap().order(), 8);
    }

    #[test]
    fn enumeration_order_is_by_word() {
        let g = WeylGroup::enumerate(&b2(), DEFAULT_MAX_ORDER).unwrap();
        let words: Vec<Vec<usize>> = g.elements().iter().map(|e| e.word.clone()).collect();
        let mut sorted = words.clone();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        assert_eq!(words, sorted);
        assert!(words[0].is_empty());
    }

    #[test]
    fn group_too_large() {
        match WeylGroup::enumerate(&b2(), 5) {
            Err(Error::GroupTooLarge { limit, partial }) => {
                assert_eq!(limit, 5);
                assert_eq!(partial, 5);
            }
            other => panic!("expected GroupTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn stabilizers() {
        let d = a1xa1();
        let g = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        let h = RationalVector::new(vec![rat(1, 2), rat(1, 2)]);
        let s = g.stabilizer(&d, &h).unwrap();
        assert_eq!(s.order(), 2);
        assert!(s.contains(g.reflection_index(&d, 0)));
        let regular = RationalVector::new(vec![rat(1, 3), int(0)]);
        assert_eq!(g.stabilizer(&d, &regular).unwrap().order(), 1);
        assert_eq!(g.stabilizer(&d, &RationalVector::zeros(2)).unwrap().order(), 4);
    }

    #[test]
    fn centralizers_and_parallel_subgroups() {
        let d = a1xa1();
        let g = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        let z2 = LatticeBasis::new(RationalMatrix::identity(2), d.gram().clone()).unwrap();

        let h = RationalVector::new(vec![rat(1, 2), rat(1, 2)]);
        let wq = g.centralizer_mod_lattice(&h, &z2).unwrap();
        let wq0 = g.parallel_subgroup(&d, &h);
        assert_eq!(wq.order(), 4);
        assert_eq!(wq0.order(), 4);
        assert_eq!(g.quotient_size(&wq, &wq0).unwrap(), 1);

        let h2 = RationalVector::new(vec![rat(-1, 2), int(0)]);
        let wq = g.centralizer_mod_lattice(&h2, &z2).unwrap();
        let minus_id = g.index_of(&RationalMatrix::from_integer_rows(&[&[-1, 0], &[0, -1]])).unwrap();
        assert_eq!(wq.element_indices, vec![0, minus_id]);
        let wq0 = g.parallel_subgroup(&d, &h2);
        assert_eq!(wq0.order(), 1);
        assert_eq!(g.quotient_size(&wq, &wq0).unwrap(), 2);
        assert_eq!(g.left_cosets(&wq, &wq0).len(), 2);

        let zero = RationalVector::zeros(2);
        assert_eq!(g.centralizer_mod_lattice(&zero, &z2).unwrap().order(), 4);
    }

    #[test]
    fn sphere_parallel_subgroups() {
        let d = sphere();
        let g = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(g.parallel_subgroup(&d, &RationalVector::new(vec![rat(1, 2)])).order(), 1);
        assert_eq!(g.parallel_subgroup(&d, &v(&[1])).order(), 2);

        let z = LatticeBasis::new(RationalMatrix::identity(1), d.gram().clone()).unwrap();
        let h = RationalVector::new(vec![rat(1, 2)]);
        let wq = g.centralizer_mod_lattice(&h, &z).unwrap();
        let wq0 = g.parallel_subgroup(&d, &h);
        assert_eq!(g.quotient_size(&wq, &wq0).unwrap(), 2);
    }

    #[test]
    fn quotient_size_rejects_non_subgroup() {
        let d = a1xa1();
        let g = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        let whole = g.generate(g.generator_elements());
        let trivial = g.generate(&[]);
        assert!(matches!(g.quotient_size(&trivial, &whole), Err(Error::InternalInvariantViolation(_))));
    }

    #[test]
    fn elements_preserve_form_and_roots() {
        let d = b2();
        let g = WeylGroup::enumerate(&d, DEFAULT_MAX_ORDER).unwrap();
        g.check_elements(&d).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.multiply(i, g.inverse(i)), 0);
        }
    }
}
