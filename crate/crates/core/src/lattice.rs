//! Lattices in the torus: the unit lattice `Γ`, the fundamental lattice
//! `Γ_0` spanned by coroots and the central lattice `Γ_1` of points where
//! every root takes integer values. Also Dirichlet domains, closest
//! vectors and focal equivalents.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    enumerate_lattice_points_in_ball, integer_span_basis, is_integer, smith_form, solve_in_lattice, Rational,
    RationalMatrix, RationalVector, SmithDecomposition, SmithForm,
};
use crate::root_datum::RootDatum;
use crate::weyl::reflection;

/// A lattice in `t` given by a basis (columns, π-units) together with the
/// Gram form used to measure norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    basis: RationalMatrix,
    gram: RationalMatrix,
}

impl LatticeBasis {
    /// The columns of `basis` must be linearly independent.
    pub fn new(basis: RationalMatrix, gram: RationalMatrix) -> Result<Self> {
        if basis.rows() != gram.rows() || !gram.is_square() {
            return Err(Error::InvalidInput("lattice basis and gram dimensions disagree".into()));
        }
        if basis.rank() != basis.cols() {
            return Err(Error::InvalidInput("lattice generators are linearly dependent".into()));
        }
        Ok(LatticeBasis { basis, gram })
    }

    /// The ℤ-span of arbitrary generators, reduced to a basis.
    pub fn from_generators(generators: &[RationalVector], gram: RationalMatrix) -> Result<Self> {
        let basis = integer_span_basis(gram.rows(), generators)?;
        Self::new(basis, gram)
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn generators(&self) -> Vec<RationalVector> {
        self.basis.columns()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    pub fn coordinates(&self, v: &RationalVector) -> Result<Option<Vec<BigInt>>> {
        solve_in_lattice(&self.basis, v)
    }

    pub fn contains(&self, v: &RationalVector) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn point(&self, coords: &[BigInt]) -> RationalVector {
        self.basis.mul_vec(&RationalVector::from_bigints(coords))
    }

    pub fn contains_lattice(&self, other: &LatticeBasis) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_lattice(&self, other: &LatticeBasis) -> Result<bool> {
        Ok(self.contains_lattice(other)? && other.contains_lattice(self)?)
    }

    pub fn norm_squared(&self, v: &RationalVector) -> Rational {
        self.gram.quadratic(v)
    }

    /// All translates `center + γ` with `|center + γ|² ≤ radius_squared`
    /// (`<` when `strict`), sorted by lattice coordinates.
    pub fn translates_in_ball(
        &self,
        center: &RationalVector,
        radius_squared: &Rational,
        strict: bool,
    ) -> Result<Vec<RationalVector>> {
        let coords = enumerate_lattice_points_in_ball(&self.basis, &self.gram, center, radius_squared, strict)?;
        Ok(coords.iter().map(|n| center + &self.point(n)).collect())
    }
}

/// `Γ_0 = ℤ-span { H_α^∨ }` (π-units). Rank-deficient when the space has a
/// euclidean factor.
pub fn fundamental_lattice(datum: &RootDatum) -> LatticeBasis {
    let coroots: Vec<RationalVector> = (0..datum.roots().len()).map(|i| datum.coroot(i)).collect();
    LatticeBasis::from_generators(&coroots, datum.gram().clone()).expect("coroots generate a lattice")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CentralLattice {
    Lattice(LatticeBasis),
    /// The roots do not span `t`, so `Γ_1` contains the center of `t`; the
    /// lattice of the semisimple slice is returned instead.
    NotDiscrete {
        semisimple_slice: LatticeBasis,
    },
}

/// `Γ_1 = { h : α(h) ∈ ℤ for every root }`, the dual of the root lattice
/// inside the span of the roots.
pub fn central_lattice(datum: &RootDatum) -> CentralLattice {
    let covectors: Vec<RationalVector> = datum.roots().iter().map(|r| r.covector.clone()).collect();
    let gram = datum.gram().clone();
    let roots = integer_span_basis(datum.rank(), &covectors).expect("root covectors have the datum's rank");
    let dual = if roots.cols() == 0 {
        roots
    } else {
        let form = roots.transpose().mul(&gram.mul(&roots));
        roots.mul(&form.inverse().expect("root lattice form is positive definite"))
    };
    let lattice = LatticeBasis::new(dual, gram).expect("dual basis is independent");
    if datum.has_euclidean_factor() {
        CentralLattice::NotDiscrete { semisimple_slice: lattice }
    } else {
        CentralLattice::Lattice(lattice)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum LatticeFailure {
    NotFullRank {
        rank: usize,
        expected: usize,
    },
    /// A coroot is missing, so `Γ_0 ⊄ Γ`.
    MissingCoroot {
        root_index: usize,
        coroot: RationalVector,
    },
    /// A generator has a non-integral root value, so `Γ ⊄ Γ_1`.
    RootValueNotIntegral {
        root_index: usize,
        generator: RationalVector,
        #[serde(with = "crate::exact::serde_rational")]
        value: Rational,
    },
    /// A simple reflection moves a generator out of `Γ`.
    NotWeylInvariant {
        simple_index: usize,
        generator: RationalVector,
        image: RationalVector,
    },
}

impl fmt::Display for LatticeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeFailure::NotFullRank { rank, expected } => {
                write!(f, "lattice has rank {rank}, expected {expected}")
            }
            LatticeFailure::MissingCoroot { root_index, coroot } => {
                write!(f, "coroot {coroot} of root {root_index} is not in the lattice (Γ_0 ⊄ Γ)")
            }
            LatticeFailure::RootValueNotIntegral { root_index, generator, value } => {
                write!(f, "root {root_index} takes value {value} on generator {generator} (Γ ⊄ Γ_1)")
            }
            LatticeFailure::NotWeylInvariant { simple_index, generator, image } => {
                write!(f, "simple reflection {simple_index} maps generator {generator} to {image}, outside the lattice")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<LatticeFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `Γ_0 ⊆ Γ ⊆ Γ_1`, full rank and Weyl invariance of a proposed unit
/// lattice. Only the simple reflections are tested, since they generate `W`.
pub fn validate_unit_lattice(datum: &RootDatum, gamma: &LatticeBasis) -> ValidationReport {
    let mut failures = Vec::new();
    if gamma.dim() != datum.rank() || !gamma.is_full_rank() {
        failures.push(LatticeFailure::NotFullRank { rank: gamma.rank(), expected: datum.rank() });
        return ValidationReport { failures };
    }
    for i in datum.positive_indices() {
        let coroot = datum.coroot(i);
        if !gamma.contains(&coroot).unwrap_or(false) {
            failures.push(LatticeFailure::MissingCoroot { root_index: i, coroot });
        }
    }
    let generators = gamma.generators();
    for i in datum.positive_indices() {
        for g in &generators {
            let value = datum.evaluate(i, g);
            if !is_integer(&value) {
                failures.push(LatticeFailure::RootValueNotIntegral { root_index: i, generator: g.clone(), value });
            }
        }
    }
    for (pos, &s) in datum.simple_indices().iter().enumerate() {
        let r = reflection(datum, s);
        for g in &generators {
            let image = r.act(g);
            if !gamma.contains(&image).unwrap_or(false) {
                failures.push(LatticeFailure::NotWeylInvariant { simple_index: pos, generator: g.clone(), image });
            }
        }
    }
    ValidationReport { failures }
}

/// `Γ/Γ_0` together with the coordinate change that reads off labels in the
/// invariant-factor presentation.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    form: SmithForm,
}

impl QuotientPresentation {
    pub fn decomposition(&self) -> SmithDecomposition {
        self.form.decomposition()
    }

    /// Label of a lattice vector given by its `Γ`-coordinates: residues modulo
    /// the non-unit invariant factors, followed by the free coordinates.
    pub fn label(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let n = self.form.cols;
        assert_eq!(coords.len(), n, "coordinate length must equal lattice rank");
        let transformed: Vec<BigInt> =
            (0..n).map(|j| (0..n).map(|i| &coords[i] * &self.form.right[i][j]).sum()).collect();
        let mut label = Vec::new();
        for (j, y) in transformed.into_iter().enumerate() {
            if j < self.form.rank {
                let d = &self.form.diagonal[j];
                if !d.is_one() {
                    label.push(y.mod_floor(d));
                }
            } else {
                label.push(y);
            }
        }
        label
    }
}

/// Presents `Γ/Γ_0` by expressing the `Γ_0` basis in `Γ`-coordinates.
pub fn quotient_presentation(datum: &RootDatum, gamma: &LatticeBasis) -> Result<QuotientPresentation> {
    if !gamma.is_full_rank() || gamma.dim() != datum.rank() {
        return Err(Error::InvalidInput("unit lattice must have full rank".into()));
    }
    let gamma0 = fundamental_lattice(datum);
    let mut relations = Vec::new();
    for g in gamma0.generators() {
        let coords =
            gamma.coordinates(&g)?.ok_or_else(|| Error::InvalidInput(format!("Γ_0 generator {g} is not in Γ")))?;
        relations.push(coords.into_iter().map(Rational::from_integer).collect::<Vec<_>>());
    }
    let matrix = if relations.is_empty() {
        RationalMatrix::zeros(0, datum.rank())
    } else {
        RationalMatrix::from_rows(&relations)?
    };
    Ok(QuotientPresentation { form: smith_form(&matrix)? })
}

/// `π_1(S) = Γ/Γ_0`.
pub fn fundamental_group(datum: &RootDatum, gamma: &LatticeBasis) -> Result<SmithDecomposition> {
    Ok(quotient_presentation(datum, gamma)?.decomposition())
}

/// Minimal norm over `h + Γ` and every translate attaining it.
pub fn closest_vectors(gamma: &LatticeBasis, h: &RationalVector) -> Result<(Rational, Vec<RationalVector>)> {
    if !gamma.is_full_rank() {
        return Err(Error::InvalidInput("closest vectors need a full-rank lattice".into()));
    }
    let candidates = gamma.translates_in_ball(h, &gamma.norm_squared(h), false)?;
    let min = candidates.iter().map(|c| gamma.norm_squared(c)).min().expect("h itself lies in the ball");
    let mut reps: Vec<RationalVector> = candidates.into_iter().filter(|c| gamma.norm_squared(c) == min).collect();
    reps.sort();
    Ok((min, reps))
}

/// Translates `h + γ` with `|h + γ| = |h|`, `h` included, sorted.
pub fn focal_equivalents(gamma: &LatticeBasis, h: &RationalVector) -> Result<Vec<RationalVector>> {
    let norm = gamma.norm_squared(h);
    let mut out: Vec<RationalVector> =
        gamma.translates_in_ball(h, &norm, false)?.into_iter().filter(|c| gamma.norm_squared(c) == norm).collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletRegion {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirichletClassification {
    pub region: DirichletRegion,
    /// Nonzero `γ` with `|h + γ| ≤ |h|`.
    pub witnesses: Vec<RationalVector>,
}

/// Position of `h` relative to the Dirichlet domain of `Γ`.
pub fn dirichlet_classify(gamma: &LatticeBasis, h: &RationalVector) -> Result<DirichletClassification> {
    if !gamma.is_full_rank() {
        return Err(Error::InvalidInput("Dirichlet domain needs a full-rank lattice".into()));
    }
    let norm = gamma.norm_squared(h);
    let mut witnesses = Vec::new();
    let mut shorter = false;
    for point in gamma.translates_in_ball(h, &norm, false)? {
        let shift = &point - h;
        if shift.is_zero() {
            continue;
        }
        if gamma.norm_squared(&point) < norm {
            shorter = true;
        }
        witnesses.push(shift);
    }
    witnesses.sort();
    let region = if shorter {
        DirichletRegion::Exterior
    } else if witnesses.is_empty() {
        DirichletRegion::Interior
    } else {
        DirichletRegion::Boundary
    };
    Ok(DirichletClassification { region, witnesses })
}

/// `max_α |α(h)|` over the positive roots (zero without roots).
pub fn alcove_gauge(datum: &RootDatum, h: &RationalVector) -> Rational {
    datum.positive_indices().map(|i| datum.evaluate(i, h).abs()).max().unwrap_or_else(Rational::zero)
}

/// `h` lies in the open alcove `D_0 = { |α(h)| < 1 }` (π-units).
pub fn in_open_alcove(datum: &RootDatum, h: &RationalVector) -> bool {
    alcove_gauge(datum, h) < Rational::one()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AlcoveCheck {
    pub checked: usize,
    /// Samples where membership in the Dirichlet domain of `Γ_0` and in
    /// the open alcove disagree.
    pub counterexamples: Vec<RationalVector>,
}

impl AlcoveCheck {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Compares the Dirichlet domain of `Γ_0` with the open alcove at each sample.
pub fn dirichlet_equals_alcove_check(datum: &RootDatum, samples: &[RationalVector]) -> Result<AlcoveCheck> {
    let gamma0 = fundamental_lattice(datum);
    if !gamma0.is_full_rank() {
        return Err(Error::InvalidInput("Γ_0 is rank-deficient (euclidean factor)".into()));
    }
    let mut report = AlcoveCheck::default();
    for h in samples {
        let in_dirichlet = dirichlet_classify(&gamma0, h)?.region == DirichletRegion::Interior;
        if in_dirichlet != in_open_alcove(datum, h) {
            report.counterexamples.push(h.clone());
        }
        report.checked += 1;
    }
    Ok(report)
}
