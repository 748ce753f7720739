//! Named spaces and the JSON space-spec format.
//!
//! All presets use the standard inner product on `t` and π-units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, RationalMatrix, RationalVector};
use crate::lattice::{fundamental_lattice, validate_unit_lattice, LatticeBasis};
use crate::root_datum::{Root, RootDatum};

/// A root datum together with a validated unit lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceSpec {
    pub name: String,
    pub datum: RootDatum,
    pub gamma: LatticeBasis,
    pub notes: String,
}

impl SpaceSpec {
    /// Fails with [`Error::InvalidLattice`] unless `Γ_0 ⊆ Γ ⊆ Γ_1` and `Γ` is
    /// full rank and Weyl invariant.
    pub fn new(
        name: impl Into<String>,
        datum: RootDatum,
        gamma: LatticeBasis,
        notes: impl Into<String>,
    ) -> Result<Self> {
        if gamma.gram() != datum.gram() {
            return Err(Error::InvalidLattice("lattice and root datum use different Gram forms".into()));
        }
        let report = validate_unit_lattice(&datum, &gamma);
        if !report.is_valid() {
            let messages: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidLattice(messages.join("; ")));
        }
        Ok(SpaceSpec { name: name.into(), datum, gamma, notes: notes.into() })
    }

    /// The same datum with `Γ` replaced by the span of `generators`.
    pub fn with_lattice(&self, generators: &[RationalVector]) -> Result<Self> {
        if generators.iter().any(|g| g.len() != self.datum.rank()) {
            return Err(Error::InvalidInput(format!("lattice generators must have length {}", self.datum.rank())));
        }
        let gamma = LatticeBasis::from_generators(generators, self.datum.gram().clone())?;
        Self::new(self.name.clone(), self.datum.clone(), gamma, "unit lattice overridden")
    }

    /// `Γ = Γ_0`, i.e. the universal cover of `self` when the space has no
    /// euclidean factor.
    pub fn is_simply_connected_model(&self) -> bool {
        fundamental_lattice(&self.datum).same_lattice(&self.gamma).unwrap_or(false)
    }

    pub fn to_file_format(&self) -> SpaceFile {
        SpaceFile {
            name: Some(self.name.clone()),
            rank: self.datum.rank(),
            gram: self.datum.gram().to_rows().into_iter().map(RationalVector::new).collect(),
            roots: self.datum.positive_roots().to_vec(),
            lattice: Some(self.gamma.generators()),
            notes: (!self.notes.is_empty()).then(|| self.notes.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("space spec serializes")
    }
}

/// On-disk representation of a [`SpaceSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rank: usize,
    /// Rows of the Gram matrix.
    pub gram: Vec<RationalVector>,
    pub roots: Vec<Root>,
    /// Generators of `Γ`; `Γ_0` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<RationalVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl SpaceFile {
    pub fn into_spec(self) -> Result<SpaceSpec> {
        let rows: Vec<_> = self.gram.into_iter().map(RationalVector::into_coords).collect();
        if rows.len() != self.rank || rows.iter().any(|r| r.len() != self.rank) {
            return Err(Error::Schema(format!("gram: expected a {0}x{0} matrix", self.rank)));
        }
        let gram = RationalMatrix::from_rows(&rows)?;
        for (i, root) in self.roots.iter().enumerate() {
            if root.covector.len() != self.rank {
                return Err(Error::Schema(format!("roots[{i}].covector: expected length {}", self.rank)));
            }
        }
        let datum = RootDatum::new(self.rank, self.roots, gram.clone())?;
        let (gamma, default_notes) = match self.lattice {
            Some(generators) => {
                if let Some(i) = generators.iter().position(|g| g.len() != self.rank) {
                    return Err(Error::Schema(format!("lattice[{i}]: expected length {}", self.rank)));
                }
                (LatticeBasis::from_generators(&generators, gram)?, "")
            }
            None => (fundamental_lattice(&datum), "lattice omitted: Γ = Γ_0"),
        };
        let notes = self.notes.unwrap_or_else(|| default_notes.to_string());
        SpaceSpec::new(self.name.unwrap_or_else(|| "custom".into()), datum, gamma, notes)
    }
}

/// Parses and validates a space-spec JSON document.
pub fn from_json(text: &str) -> Result<SpaceSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SpaceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema(format!("{path}: {}", e.into_inner()))
    })?;
    file.into_spec()
}

pub fn from_file(path: impl AsRef<Path>) -> Result<SpaceSpec> {
    from_json(&std::fs::read_to_string(path)?)
}

/// Root datum of a compact group `U` seen as the symmetric space
/// `U × U / Δ`: the tangent torus is mapped to the group torus by `X ↦ 2X`,
/// so each group root is halved, and every root space is a copy of the
/// group's, of dimension 2 for the compact real form.
pub fn compact_group_datum(group_roots: &[RationalVector], gram: RationalMatrix) -> Result<RootDatum> {
    let half = rat(1, 2);
    let roots = group_roots.iter().map(|r| Root::new(r.scale(&half), 2)).collect();
    RootDatum::new(gram.rows(), roots, gram)
}

pub const PRESET_NAMES: &[&str] = &["S2", "RP2", "Gr2R4", "Gr2R4+", "T<n>", "SU2-group", "Gr2Rn:<n>"];

fn v(coords: &[i64]) -> RationalVector {
    RationalVector::from_integers(coords)
}

fn integer_lattice(gram: &RationalMatrix) -> LatticeBasis {
    LatticeBasis::new(RationalMatrix::identity(gram.rows()), gram.clone()).expect("identity basis")
}

fn sphere_datum() -> RootDatum {
    RootDatum::new(1, vec![Root::new(v(&[1]), 1)], RationalMatrix::identity(1)).expect("sphere datum")
}

fn grassmannian_datum() -> RootDatum {
    let roots = vec![Root::new(v(&[1, -1]), 1), Root::new(v(&[1, 1]), 1)];
    RootDatum::new(2, roots, RationalMatrix::identity(2)).expect("A1xA1 datum")
}

fn parse_size(text: &str, name: &str) -> Result<usize> {
    text.parse::<usize>().map_err(|_| Error::NotFound(name.to_string()))
}

/// Looks up a named space.
pub fn preset(name: &str) -> Result<SpaceSpec> {
    match name {
        "S2" => {
            let datum = sphere_datum();
            let gamma = LatticeBasis::new(RationalMatrix::from_integer_rows(&[&[2]]), datum.gram().clone())?;
            SpaceSpec::new(name, datum, gamma, "round 2-sphere of radius 1; antipode at π")
        }
        "RP2" => {
            let datum = sphere_datum();
            let gamma = integer_lattice(datum.gram());
            SpaceSpec::new(name, datum, gamma, "real projective plane, quotient of S2 by the antipodal map")
        }
        "Gr2R4" => {
            let datum = grassmannian_datum();
            let gamma = integer_lattice(datum.gram());
            SpaceSpec::new(name, datum, gamma, "Grassmannian of 2-planes in R^4, root system A1xA1")
        }
        "Gr2R4+" => {
            let datum = grassmannian_datum();
            let gamma = fundamental_lattice(&datum);
            SpaceSpec::new(name, datum, gamma, "oriented 2-planes in R^4 (S2 x S2); simply connected")
        }
        "SU2-group" => {
            let datum = compact_group_datum(&[v(&[2])], RationalMatrix::identity(1))?;
            let gamma = LatticeBasis::new(RationalMatrix::from_integer_rows(&[&[2]]), datum.gram().clone())?;
            SpaceSpec::new(name, datum, gamma, "SU(2) = S^3 as a symmetric space; group roots halved, multiplicity 2")
        }
        _ => {
            if let Some(n) = name.strip_prefix("Tn:").or_else(|| name.strip_prefix('T')) {
                let n = parse_size(n, name)?;
                if n == 0 {
                    return Err(Error::NotFound(name.to_string()));
                }
                let gram = RationalMatrix::identity(n);
                let datum = RootDatum::torus(n, gram.clone())?;
                return SpaceSpec::new(name, datum, integer_lattice(&gram), format!("flat torus R^{n}/Z^{n}"));
            }
            if let Some(n) = name.strip_prefix("Gr2Rn:") {
                let n = parse_size(n, name)?;
                if n <= 4 {
                    return Err(Error::InvalidInput(format!("Gr2Rn:{n} needs n > 4; use Gr2R4 for n = 4")));
                }
                let short = u32::try_from(n - 4).map_err(|_| Error::InvalidInput(format!("n = {n} is too large")))?;
                let roots = vec![
                    Root::new(v(&[1, -1]), 1),
                    Root::new(v(&[1, 1]), 1),
                    Root::new(v(&[1, 0]), short),
                    Root::new(v(&[0, 1]), short),
                ];
                let gram = RationalMatrix::identity(2);
                let datum = RootDatum::new(2, roots, gram.clone())?;
                return SpaceSpec::new(
                    name,
                    datum,
                    integer_lattice(&gram),
                    format!("Grassmannian of 2-planes in R^{n}, type B2; unit lattice Z^2 is provisional"),
                );
            }
            Err(Error::NotFound(name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fundamental_group;
    use num_bigint::BigInt;

    #[test]
    fn presets_validate_and_have_expected_pi1() {
        let cases: &[(&str, &[i64], usize)] = &[
            ("S2", &[], 0),
            ("RP2", &[2], 0),
            ("Gr2R4", &[2], 0),
            ("Gr2R4+", &[], 0),
            ("T3", &[], 3),
            ("Tn:2", &[], 2),
            ("SU2-group", &[], 0),
            ("Gr2Rn:5", &[2], 0),
        ];
        for &(name, factors, free) in cases {
            let space = preset(name).unwrap();
            let pi1 = fundamental_group(&space.datum, &space.gamma).unwrap();
            let expected: Vec<BigInt> = factors.iter().map(|&d| BigInt::from(d)).collect();
            assert_eq!(pi1.invariant_factors, expected, "{name}");
            assert_eq!(pi1.free_rank, free, "{name}");
        }
    }

    #[test]
    fn unknown_presets() {
        for name in ["S3", "T0", "Tx", "", "Gr2Rn:x"] {
            assert!(matches!(preset(name), Err(Error::NotFound(_))), "{name}");
        }
        assert!(matches!(preset("Gr2Rn:4"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn su2_group_is_a_three_sphere() {
        let space = preset("SU2-group").unwrap();
        assert_eq!(space.datum.root(0).covector, v(&[1]));
        assert_eq!(space.datum.root(0).multiplicity, 2);
        assert!(space.is_simply_connected_model());
    }

    #[test]
    fn json_round_trip() {
        for name in ["S2", "RP2", "Gr2R4", "Gr2R4+", "T2", "Gr2Rn:6"] {
            let space = preset(name).unwrap();
            let back = from_json(&space.to_json()).unwrap();
            assert_eq!(back, space, "{name}");
        }
    }

    #[test]
    fn file_without_lattice_uses_fundamental_lattice() {
        let text = r#"{"name":"g","rank":2,"gram":[[1,0],[0,1]],
            "roots":[{"covector":[1,-1],"multiplicity":1},{"covector":["1","1"],"multiplicity":1}]}"#;
        let space = from_json(text).unwrap();
        assert!(space.gamma.same_lattice(&preset("Gr2R4+").unwrap().gamma).unwrap());
    }

    #[test]
    fn rejects_bad_files() {
        let half = r#"{"rank":2,"gram":[[1,0],[0,1]],
            "roots":[{"covector":[1,-1],"multiplicity":1},{"covector":[1,1],"multiplicity":1}],
            "lattice":[["1/2",0],[0,"1/2"]]}"#;
        assert!(matches!(from_json(half), Err(Error::InvalidLattice(_))));

        let missing = r#"{"rank":1,"gram":[[1]]}"#;
        let Err(Error::Schema(msg)) = from_json(missing) else { panic!("expected schema error") };
        assert!(msg.contains("roots"), "{msg}");

        let bad_entry = r#"{"rank":1,"gram":[[1]],"roots":[{"covector":["x"],"multiplicity":1}]}"#;
        let Err(Error::Schema(msg)) = from_json(bad_entry) else { panic!("expected schema error") };
        assert!(msg.contains("roots[0].covector"), "{msg}");

        let bad_root =
            r#"{"rank":1,"gram":[[1]],"roots":[{"covector":[1],"multiplicity":1},{"covector":[3],"multiplicity":1}]}"#;
        assert!(matches!(from_json(bad_root), Err(Error::InvalidRootSystem(_))));
    }

    #[test]
    fn lattice_override() {
        let s2 = preset("S2").unwrap();
        let rp2 = s2.with_lattice(&[v(&[1])]).unwrap();
        assert_eq!(rp2.gamma, preset("RP2").unwrap().gamma);
        assert!(s2.with_lattice(&[v(&[3])]).is_err());
    }
}
