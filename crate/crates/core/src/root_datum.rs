//! Restricted root systems with multiplicities.
//!
//! A root `α` is stored through its dual vector `H_α` (so that
//! `α(H) = ⟨H_α, H⟩` in the Gram form of the torus). For a point `h` stored in
//! π-units the value `⟨H_α, h⟩` is `α(H)/π`, so the Stiefel diagram is the set
//! where some such value is an integer.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, is_integer, Rational, RationalMatrix, RationalVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root {
    pub covector: RationalVector,
    pub multiplicity: u32,
}

impl Root {
    pub fn new(covector: RationalVector, multiplicity: u32) -> Self {
        Root { covector, multiplicity }
    }
}

/// A point where `h` meets the diagram hyperplane `α = level` (π-units).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramCrossing {
    pub root_index: usize,
    pub level: i64,
}

impl DiagramCrossing {
    pub fn is_root_hyperplane(&self) -> bool {
        self.level == 0
    }
}

/// Validated root datum. Roots are ordered positives first, then their
/// negatives in the same order, so `roots[i + positive_count] = -roots[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    rank: usize,
    roots: Vec<Root>,
    gram: RationalMatrix,
    positive_count: usize,
    simple: Vec<usize>,
    span_rank: usize,
}

/// Lexicographic positivity on raw coordinates: first nonzero entry positive.
fn lex_positive(v: &RationalVector) -> bool {
    v.coords().iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
}

impl RootDatum {
    /// Validates a root configuration. `roots` may list only the positive
    /// roots; missing negatives are added with the same multiplicity.
    pub fn new(rank: usize, roots: Vec<Root>, gram: RationalMatrix) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        if gram.rows() != rank || gram.cols() != rank {
            return Err(Error::InvalidInput(format!("gram must be {rank}x{rank}")));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidInput("gram is not symmetric".into()));
        }
        if !gram.is_positive_definite() {
            return Err(Error::InvalidInput("gram is not positive definite".into()));
        }

        let mut by_covector: HashMap<RationalVector, u32> = HashMap::new();
        for (i, root) in roots.iter().enumerate() {
            if root.covector.len() != rank {
                return Err(Error::InvalidRootSystem(format!(
                    "root {i} has {} coordinates, expected {rank}",
                    root.covector.len()
                )));
            }
            if root.covector.is_zero() {
                return Err(Error::InvalidRootSystem(format!("root {i} is zero")));
            }
            if root.multiplicity == 0 {
                return Err(Error::InvalidRootSystem(format!("root {i} has multiplicity 0")));
            }
            if by_covector.insert(root.covector.clone(), root.multiplicity).is_some() {
                return Err(Error::InvalidRootSystem(format!("root {} listed twice", root.covector)));
            }
        }

        let mut positives: Vec<Root> = Vec::new();
        for root in &roots {
            let (pos, neg) = if lex_positive(&root.covector) {
                (root.covector.clone(), -&root.covector)
            } else {
                (-&root.covector, root.covector.clone())
            };
            let m_pos = by_covector.get(&pos).copied();
            let m_neg = by_covector.get(&neg).copied();
            if let (Some(a), Some(b)) = (m_pos, m_neg) {
                if a != b {
                    return Err(Error::InvalidRootSystem(format!(
                        "roots {pos} and {neg} have different multiplicities {a} and {b}"
                    )));
                }
            }
            if !positives.iter().any(|r| r.covector == pos) {
                positives.push(Root::new(pos, root.multiplicity));
            }
        }

        let positive_count = positives.len();
        let negatives: Vec<Root> = positives.iter().map(|r| Root::new(-&r.covector, r.multiplicity)).collect();
        let mut all = positives;
        all.extend(negatives);

        let span_rank = if all.is_empty() {
            0
        } else {
            RationalMatrix::from_columns(rank, &all.iter().map(|r| r.covector.clone()).collect::<Vec<_>>())?.rank()
        };

        let mut datum = RootDatum { rank, roots: all, gram, positive_count, simple: Vec::new(), span_rank };
        datum.check_crystallographic()?;
        datum.simple = datum.find_simple_roots()?;
        Ok(datum)
    }

    fn check_crystallographic(&self) -> Result<()> {
        let lookup: HashMap<&RationalVector, u32> = self.roots.iter().map(|r| (&r.covector, r.multiplicity)).collect();
        for (i, a) in self.roots.iter().enumerate() {
            let aa = self.inner(&a.covector, &a.covector);
            for b in &self.roots {
                let cartan = int(2) * self.inner(&a.covector, &b.covector) / &aa;
                if !is_integer(&cartan) {
                    return Err(Error::InvalidRootSystem(format!(
                        "2<α,β>/<α,α> = {cartan} is not an integer for α = {}, β = {}",
                        a.covector, b.covector
                    )));
                }
                let image = &b.covector - &a.covector.scale(&cartan);
                match lookup.get(&image) {
                    None => {
                        return Err(Error::InvalidRootSystem(format!(
                            "reflection in root {i} ({}) maps {} to {image}, which is not a root",
                            a.covector, b.covector
                        )));
                    }
                    Some(&m) if m != b.multiplicity => {
                        return Err(Error::InvalidRootSystem(format!(
                            "reflection in root {i} maps {} (multiplicity {}) to {image} (multiplicity {m})",
                            b.covector, b.multiplicity
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Simple roots of the reduced system of indivisible positive roots.
    fn find_simple_roots(&self) -> Result<Vec<usize>> {
        let positives = &self.roots[..self.positive_count];
        let is_root = |v: &RationalVector| self.roots.iter().any(|r| &r.covector == v);
        let indivisible: Vec<usize> = (0..self.positive_count)
            .filter(|&i| !is_root(&positives[i].covector.scale(&Rational::new(1.into(), 2.into()))))
            .collect();
        let simple: Vec<usize> = indivisible
            .iter()
            .copied()
            .filter(|&i| {
                let target = &positives[i].covector;
                !indivisible.iter().any(|&j| {
                    j != i && {
                        let rest = target - &positives[j].covector;
                        indivisible.iter().any(|&k| positives[k].covector == rest)
                    }
                })
            })
            .collect();

        if simple.len() != self.span_rank {
            return Err(Error::InvalidRootSystem(format!(
                "found {} simple roots but the roots span a {}-dimensional space",
                simple.len(),
                self.span_rank
            )));
        }
        if !simple.is_empty() {
            let basis = RationalMatrix::from_columns(
                self.rank,
                &simple.iter().map(|&i| self.roots[i].covector.clone()).collect::<Vec<_>>(),
            )?;
            for root in &self.roots {
                let coeffs = basis.solve(&root.covector).ok_or_else(|| {
                    Error::InvalidRootSystem(format!("root {} is not in the span of the simple roots", root.covector))
                })?;
                let integral = coeffs.is_integral();
                let signs_agree = coeffs.coords().iter().all(|c| !c.is_negative())
                    || coeffs.coords().iter().all(|c| !c.is_positive());
                if !integral || !signs_agree {
                    return Err(Error::InvalidRootSystem(format!(
                        "root {} has simple-root coordinates {coeffs}",
                        root.covector
                    )));
                }
            }
        }
        Ok(simple)
    }

    /// The datum of a torus: no roots at all.
    pub fn torus(rank: usize, gram: RationalMatrix) -> Result<Self> {
        Self::new(rank, Vec::new(), gram)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, index: usize) -> &Root {
        &self.roots[index]
    }

    pub fn positive_indices(&self) -> std::ops::Range<usize> {
        0..self.positive_count
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.positive_count]
    }

    /// Indices (into [`roots`](Self::roots)) of the simple roots.
    pub fn simple_indices(&self) -> &[usize] {
        &self.simple
    }

    /// Index of `-roots[index]`.
    pub fn negative_of(&self, index: usize) -> usize {
        if index < self.positive_count {
            index + self.positive_count
        } else {
            index - self.positive_count
        }
    }

    /// Dimension of the span of the roots (the semisimple part of `t`).
    pub fn semisimple_rank(&self) -> usize {
        self.span_rank
    }

    pub fn has_euclidean_factor(&self) -> bool {
        self.span_rank < self.rank
    }

    pub fn inner(&self, a: &RationalVector, b: &RationalVector) -> Rational {
        self.gram.bilinear(a, b)
    }

    pub fn norm_squared(&self, a: &RationalVector) -> Rational {
        self.gram.quadratic(a)
    }

    /// `α(h)/π` for `h` in π-units.
    pub fn evaluate(&self, index: usize, h: &RationalVector) -> Rational {
        self.inner(&self.roots[index].covector, h)
    }

    /// `H_α^∨ = 2 H_α / ⟨α, α⟩`.
    pub fn coroot(&self, index: usize) -> RationalVector {
        let c = &self.roots[index].covector;
        c.scale(&(int(2) / self.norm_squared(c)))
    }

    pub fn diagram_crossings(&self, h: &RationalVector) -> Vec<DiagramCrossing> {
        self.positive_indices()
            .filter_map(|i| {
                let v = self.evaluate(i, h);
                is_integer(&v).then(|| DiagramCrossing {
                    root_index: i,
                    level: num_traits::ToPrimitive::to_i64(&v.to_integer()).expect("diagram level fits in i64"),
                })
            })
            .collect()
    }

    pub fn is_regular(&self, h: &RationalVector) -> bool {
        self.diagram_crossings(h).is_empty()
    }

    /// `Σ m_α` over positive roots with `α(h) ∈ πℤ \ {0}`: the number of
    /// non-root diagram hyperplanes through `h`, counted with multiplicity.
    pub fn nonroot_crossing_multiplicity(&self, h: &RationalVector) -> u64 {
        self.diagram_crossings(h)
            .iter()
            .filter(|c| !c.is_root_hyperplane())
            .map(|c| u64::from(self.roots[c.root_index].multiplicity))
            .sum()
    }

    /// Index of the root whose dual vector is `covector`.
    pub fn find_root(&self, covector: &RationalVector) -> Option<usize> {
        self.roots.iter().position(|r| &r.covector == covector)
    }

    /// Permutation of the roots induced by a linear map of `t`, if the map
    /// permutes them with multiplicities. Dual vectors transform as vectors.
    pub fn root_permutation(&self, matrix: &RationalMatrix) -> Option<Vec<usize>> {
        self.roots
            .iter()
            .map(|r| {
                let image = matrix.mul_vec(&r.covector);
                self.find_root(&image).filter(|&j| self.roots[j].multiplicity == r.multiplicity)
            })
            .collect()
    }
}

/// Free-function form of [`RootDatum::new`].
pub fn build_root_datum(rank: usize, roots: Vec<Root>, gram: RationalMatrix) -> Result<RootDatum> {
    RootDatum::new(rank, roots, gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

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

    #[test]
    fn a1xa1_positive_and_simple_roots() {
        let d = a1xa1();
        let pos: Vec<_> = d.positive_roots().iter().map(|r| r.covector.clone()).collect();
        assert_eq!(pos, vec![v(&[1, -1]), v(&[1, 1])]);
        assert_eq!(d.simple_indices(), &[0, 1]);
        assert_eq!(d.roots().len(), 4);
        assert_eq!(d.root(d.negative_of(0)).covector, v(&[-1, 1]));
    }

    #[test]
    fn sphere_and_torus() {
        let s = sphere();
        assert_eq!(s.positive_roots().len(), 1);
        assert_eq!(s.coroot(0), v(&[2]));

        let t = RootDatum::torus(2, RationalMatrix::identity(2)).unwrap();
        assert!(t.positive_roots().is_empty());
        assert!(t.has_euclidean_factor());
        assert!(t.is_regular(&RationalVector::new(vec![rat(1, 2), int(0)])));
    }

    #[test]
    fn negatives_may_be_listed() {
        let d = RootDatum::new(1, vec![Root::new(v(&[-1]), 3), Root::new(v(&[1]), 3)], RationalMatrix::identity(1))
            .unwrap();
        assert_eq!(d.positive_roots(), &[Root::new(v(&[1]), 3)]);
        let bad = RootDatum::new(1, vec![Root::new(v(&[-1]), 3), Root::new(v(&[1]), 2)], RationalMatrix::identity(1));
        assert!(matches!(bad, Err(Error::InvalidRootSystem(_))));
    }

    #[test]
    fn coroots_of_a1xa1() {
        let d = a1xa1();
        assert_eq!(d.coroot(0), v(&[1, -1]));
        assert_eq!(d.coroot(1), v(&[1, 1]));
        for i in 0..d.roots().len() {
            assert_eq!(d.evaluate(i, &d.coroot(i)), int(2));
        }
    }

    #[test]
    fn crossings() {
        let d = a1xa1();
        let h = RationalVector::new(vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(
            d.diagram_crossings(&h),
            vec![DiagramCrossing { root_index: 0, level: 0 }, DiagramCrossing { root_index: 1, level: 1 }]
        );
        assert!(!d.is_regular(&h));
        let generic = RationalVector::new(vec![rat(1, 3), int(0)]);
        assert!(d.diagram_crossings(&generic).is_empty());
        assert!(d.is_regular(&generic));

        let s = sphere();
        assert_eq!(s.diagram_crossings(&v(&[1])), vec![DiagramCrossing { root_index: 0, level: 1 }]);
    }

    #[test]
    fn rejects_non_crystallographic_pair() {
        let r =
            RootDatum::new(2, vec![Root::new(v(&[1, 0]), 1), Root::new(v(&[1, 2]), 1)], RationalMatrix::identity(2));
        assert!(matches!(r, Err(Error::InvalidRootSystem(_))));
    }

    #[test]
    fn rejects_system_not_closed_under_reflection() {
        // Cartan integers are fine but r_{(1,0)} sends (1,1) to (-1,1).
        let r =
            RootDatum::new(2, vec![Root::new(v(&[1, 0]), 1), Root::new(v(&[1, 1]), 1)], RationalMatrix::identity(2));
        assert!(matches!(r, Err(Error::InvalidRootSystem(_))));
    }

    #[test]
    fn rejects_multiplicities_broken_by_reflection() {
        let roots = vec![
            Root::new(v(&[1, 0]), 1),
            Root::new(v(&[0, 1]), 2),
            Root::new(v(&[1, 1]), 1),
            Root::new(v(&[1, -1]), 1),
        ];
        let r = RootDatum::new(2, roots, RationalMatrix::identity(2));
        assert!(matches!(r, Err(Error::InvalidRootSystem(_))));
    }

    #[test]
    fn accepts_non_reduced_bc2() {
        let roots = vec![
            Root::new(v(&[1, 0]), 4),
            Root::new(v(&[0, 1]), 4),
            Root::new(v(&[2, 0]), 1),
            Root::new(v(&[0, 2]), 1),
            Root::new(v(&[1, 1]), 2),
            Root::new(v(&[1, -1]), 2),
        ];
        let d = RootDatum::new(2, roots, RationalMatrix::identity(2)).unwrap();
        assert_eq!(d.positive_roots().len(), 6);
        let simple: Vec<_> = d.simple_indices().iter().map(|&i| d.root(i).covector.clone()).collect();
        assert_eq!(simple, vec![v(&[0, 1]), v(&[1, -1])]);
    }

    #[test]
    fn rejects_bad_gram() {
        let g = RationalMatrix::from_integer_rows(&[&[1, 2], &[2, 1]]);
        assert!(matches!(RootDatum::torus(2, g), Err(Error::InvalidInput(_))));
    }
}
