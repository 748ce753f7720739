//! The geodesic engine: `exp_p^{-1}(q)` as a disjoint union of focal orbits,
//! cut and conjugate classification, and minimal geodesics.
//!
//! A target `q = exp_p(H)` is given by any `H` in π-units; the preimage is
//! `W^q`-saturated inside `H + Γ`, and each `W^q`-orbit there is the torus
//! trace of one focal orbit.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::catalog::SpaceSpec;
use crate::error::{Error, Result};
use crate::exact::{rat, Rational, RationalVector, SmithDecomposition};
use crate::lattice::{
    alcove_gauge, closest_vectors, dirichlet_classify, focal_equivalents, fundamental_lattice, in_open_alcove,
    quotient_presentation, DirichletRegion, LatticeBasis, QuotientPresentation,
};
use crate::root_datum::RootDatum;
use crate::weyl::{SubgroupDescriptor, WeylGroup};

fn serialize_labels<S: Serializer>(label: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(label.len()))?;
    for x in label {
        match x.to_i64() {
            Some(n) => seq.serialize_element(&n)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

fn serialize_label_list<S: Serializer>(labels: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One<'a>(&'a [BigInt]);
    impl Serialize for One<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_labels(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(labels.len()))?;
    for l in labels {
        seq.serialize_element(&One(l))?;
    }
    seq.end()
}

/// One focal orbit `F(H + γ)` in `exp_p^{-1}(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FocalOrbitDescriptor {
    /// Lexicographically smallest point of the torus trace.
    pub representative: RationalVector,
    #[serde(with = "crate::exact::serde_rational")]
    pub norm_squared: Rational,
    /// Σ m_α over roots with `α(rep) ∈ ℤ \ {0}`; also the index of `rep`.
    pub dimension: u64,
    #[serde(rename = "components")]
    pub component_count: usize,
    /// The orbit `W^q · rep`, sorted.
    pub torus_intersection: Vec<RationalVector>,
    /// Smallest point of each `W^q_0`-orbit inside the torus trace.
    pub component_representatives: Vec<RationalVector>,
    /// Class of `rep - base` in `Γ/Γ_0`.
    #[serde(serialize_with = "serialize_labels")]
    pub homotopy_label: Vec<BigInt>,
    #[serde(serialize_with = "serialize_label_list")]
    pub component_labels: Vec<Vec<BigInt>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutStatus {
    BeforeCut,
    CutPoint,
    PastCut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateStatus {
    BeforeFirstConjugate,
    FirstConjugate,
    PastFirstConjugate,
}

/// Where `t ↦ exp_p(t H)` stands at `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointClassification {
    pub regularity: Regularity,
    pub cut: CutStatus,
    pub conjugate: ConjugateStatus,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplyConnectedReport {
    /// `Γ = Γ_0`.
    pub lattice_equals_fundamental: bool,
    pub pi1_trivial: bool,
    /// The Dirichlet domain of `Γ` equals the open alcove on every sample;
    /// `None` when `Γ_0` is not of full rank.
    pub dirichlet_equals_alcove: Option<bool>,
    pub samples: usize,
}

impl SimplyConnectedReport {
    /// The three criteria coincide (vacuous with a euclidean factor).
    pub fn consistent(&self) -> bool {
        match self.dirichlet_equals_alcove {
            Some(d) => d == self.lattice_equals_fundamental && d == self.pi1_trivial,
            None => true,
        }
    }
}

/// A space with its Weyl group and lattice data precomputed.
#[derive(Clone, Debug)]
pub struct SymmetricSpace {
    spec: SpaceSpec,
    weyl: WeylGroup,
    gamma0: LatticeBasis,
    quotient: QuotientPresentation,
}

impl SymmetricSpace {
    pub fn new(spec: SpaceSpec, max_order: usize) -> Result<Self> {
        let weyl = WeylGroup::enumerate(&spec.datum, max_order)?;
        let gamma0 = fundamental_lattice(&spec.datum);
        let quotient = quotient_presentation(&spec.datum, &spec.gamma)?;
        Ok(SymmetricSpace { spec, weyl, gamma0, quotient })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn datum(&self) -> &RootDatum {
        &self.spec.datum
    }

    pub fn gamma(&self) -> &LatticeBasis {
        &self.spec.gamma
    }

    pub fn gamma0(&self) -> &LatticeBasis {
        &self.gamma0
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    pub fn fundamental_group(&self) -> SmithDecomposition {
        self.quotient.decomposition()
    }

    fn check_point(&self, h: &RationalVector) -> Result<()> {
        if h.len() != self.datum().rank() {
            return Err(Error::InvalidInput(format!(
                "point {h} has {} coordinates, the torus has rank {}",
                h.len(),
                self.datum().rank()
            )));
        }
        Ok(())
    }

    /// `W^q` for `q = exp_p(h)`.
    pub fn centralizer(&self, h: &RationalVector) -> Result<SubgroupDescriptor> {
        self.check_point(h)?;
        self.weyl.centralizer_mod_lattice(h, self.gamma())
    }

    /// `W^q_0` for `q = exp_p(h)`.
    pub fn reflection_subgroup(&self, h: &RationalVector) -> Result<SubgroupDescriptor> {
        self.check_point(h)?;
        Ok(self.weyl.parallel_subgroup(self.datum(), h))
    }

    fn lattice_label(&self, point: &RationalVector, base: &RationalVector) -> Result<Vec<BigInt>> {
        let shift = point - base;
        let coords = self
            .gamma()
            .coordinates(&shift)?
            .ok_or_else(|| Error::InvalidInput(format!("{point} - {base} is not in the unit lattice")))?;
        Ok(self.quotient.label(&coords))
    }

    fn orbit(&self, group: &SubgroupDescriptor, h: &RationalVector) -> Vec<RationalVector> {
        let set: BTreeSet<RationalVector> = group.element_indices.iter().map(|&w| self.weyl.act(w, h)).collect();
        set.into_iter().collect()
    }

    fn describe(
        &self,
        point: &RationalVector,
        base: &RationalVector,
        wq: &SubgroupDescriptor,
        wq0: &SubgroupDescriptor,
    ) -> Result<FocalOrbitDescriptor> {
        let torus_intersection = self.orbit(wq, point);
        let representative = torus_intersection[0].clone();

        let mut remaining: BTreeSet<RationalVector> = torus_intersection.iter().cloned().collect();
        let mut component_representatives = Vec::new();
        while let Some(first) = remaining.pop_first() {
            for p in self.orbit(wq0, &first) {
                remaining.remove(&p);
            }
            component_representatives.push(first);
        }
        let expected = self.weyl.quotient_size(wq, wq0)?;
        if expected != component_representatives.len() {
            return Err(Error::InternalInvariantViolation(format!(
                "|W^q/W^q_0| = {expected} but the orbit of {point} splits into {} W^q_0-orbits",
                component_representatives.len()
            )));
        }

        let component_labels =
            component_representatives.iter().map(|c| self.lattice_label(c, base)).collect::<Result<Vec<_>>>()?;
        Ok(FocalOrbitDescriptor {
            homotopy_label: self.lattice_label(&representative, base)?,
            norm_squared: self.datum().norm_squared(&representative),
            dimension: self.datum().nonroot_crossing_multiplicity(&representative),
            component_count: component_representatives.len(),
            representative,
            torus_intersection,
            component_representatives,
            component_labels,
        })
    }

    /// The focal orbit through `point`, which must satisfy
    /// `exp_p(point) = exp_p(base)`.
    pub fn focal_orbit(&self, point: &RationalVector, base: &RationalVector) -> Result<FocalOrbitDescriptor> {
        self.check_point(point)?;
        self.check_point(base)?;
        if !self.gamma().contains(&(point - base))? {
            return Err(Error::InvalidInput(format!("{point} and {base} do not exponentiate to the same point")));
        }
        let wq = self.centralizer(base)?;
        let wq0 = self.reflection_subgroup(base)?;
        self.describe(point, base, &wq, &wq0)
    }

    /// Splits `points` (a `W^q`-stable subset of `base + Γ`) into focal orbits,
    /// ordered by norm and then representative.
    fn partition(&self, points: Vec<RationalVector>, base: &RationalVector) -> Result<Vec<FocalOrbitDescriptor>> {
        let wq = self.centralizer(base)?;
        let wq0 = self.reflection_subgroup(base)?;
        let mut remaining: BTreeSet<RationalVector> = points.into_iter().collect();
        let mut out = Vec::new();
        while let Some(first) = remaining.pop_first() {
            let descriptor = self.describe(&first, base, &wq, &wq0)?;
            for p in &descriptor.torus_intersection {
                if p != &first && !remaining.remove(p) {
                    return Err(Error::InternalInvariantViolation(format!(
                        "W^q maps {first} to {p}, outside the enumerated coset points"
                    )));
                }
            }
            out.push(descriptor);
        }
        out.sort_by(|a, b| (&a.norm_squared, &a.representative).cmp(&(&b.norm_squared, &b.representative)));
        Ok(out)
    }

    /// All focal orbits of `exp_p^{-1}(exp_p(base))` with `|H|² ≤ max_norm_squared`.
    pub fn enumerate_preimages(
        &self,
        base: &RationalVector,
        max_norm_squared: &Rational,
    ) -> Result<Vec<FocalOrbitDescriptor>> {
        self.check_point(base)?;
        let points = self.gamma().translates_in_ball(base, max_norm_squared, false)?;
        self.partition(points, base)
    }

    /// The focal orbits of shortest geodesics from `p` to `exp_p(base)`.
    pub fn minimal_geodesics(&self, base: &RationalVector) -> Result<Vec<FocalOrbitDescriptor>> {
        self.check_point(base)?;
        let (_, closest) = closest_vectors(self.gamma(), base)?;
        let points = focal_equivalents(self.gamma(), &closest[0])?;
        self.partition(points, base)
    }

    pub fn focal_equivalents(&self, h: &RationalVector) -> Result<Vec<RationalVector>> {
        self.check_point(h)?;
        focal_equivalents(self.gamma(), h)
    }

    pub fn classify_point(&self, h: &RationalVector) -> Result<PointClassification> {
        self.check_point(h)?;
        let datum = self.datum();
        let regularity = if datum.is_regular(h) { Regularity::Regular } else { Regularity::Singular };
        let cut = match dirichlet_classify(self.gamma(), h)?.region {
            DirichletRegion::Interior => CutStatus::BeforeCut,
            DirichletRegion::Boundary => CutStatus::CutPoint,
            DirichletRegion::Exterior => CutStatus::PastCut,
        };
        // Roots vanish on the center, so the gauge only sees the semisimple part.
        let gauge = alcove_gauge(datum, h);
        let conjugate = if gauge < Rational::one() {
            ConjugateStatus::BeforeFirstConjugate
        } else if gauge.is_one() {
            ConjugateStatus::FirstConjugate
        } else {
            ConjugateStatus::PastFirstConjugate
        };
        Ok(PointClassification { regularity, cut, conjugate, index: datum.nonroot_crossing_multiplicity(h) })
    }

    /// Compares `Γ = Γ_0`, triviality of `π_1` and `D = D_0` (sampled on a grid
    /// over `[-3/2, 3/2]^r`).
    pub fn simply_connected_report(&self) -> Result<SimplyConnectedReport> {
        let lattice_equals_fundamental = self.gamma0.is_full_rank() && self.gamma0.same_lattice(self.gamma())?;
        let pi1_trivial = self.fundamental_group().is_trivial();
        let samples = sample_grid(self.datum().rank(), 2000);
        let dirichlet_equals_alcove = if self.gamma0.is_full_rank() {
            let mut equal = true;
            for h in &samples {
                let interior = dirichlet_classify(self.gamma(), h)?.region == DirichletRegion::Interior;
                if interior != in_open_alcove(self.datum(), h) {
                    equal = false;
                    break;
                }
            }
            Some(equal)
        } else {
            None
        };
        Ok(SimplyConnectedReport {
            lattice_equals_fundamental,
            pi1_trivial,
            dirichlet_equals_alcove,
            samples: samples.len(),
        })
    }
}

/// A uniform rational grid over `[-3/2, 3/2]^rank` with an odd number of
/// points per axis, at most `budget` points overall (but at least 3 per axis).
pub fn sample_grid(rank: usize, budget: usize) -> Vec<RationalVector> {
    if rank == 0 {
        return vec![RationalVector::zeros(0)];
    }
    let mut per_axis = 3usize;
    while (per_axis + 2).checked_pow(rank as u32).is_some_and(|n| n <= budget) {
        per_axis += 2;
    }
    let steps = (per_axis - 1) as i64;
    let axis: Vec<Rational> = (0..=steps).map(|k| rat(3 * (2 * k - steps), 2 * steps)).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(RationalVector::new).collect()
}
