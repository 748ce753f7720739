//! Floating-point models of a few spaces, used only to cross-check the exact
//! engine: closed-form exponential maps in an ambient space and numerical
//! indices from finite-difference Jacobians.
//!
//! Nothing here feeds back into the exact computations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::exact::RationalVector;

/// Equality tolerance for ambient points.
pub const POINT_TOLERANCE: f64 = 1e-9;
/// Singular values below this count towards the kernel of `d exp`.
pub const RANK_TOLERANCE: f64 = 1e-5;
/// Central-difference step.
pub const STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Sphere,
    ProjectivePlane,
    Grassmannian,
    OrientedGrassmannian,
}

impl Model {
    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "S2" => Ok(Model::Sphere),
            "RP2" => Ok(Model::ProjectivePlane),
            "Gr2R4" => Ok(Model::Grassmannian),
            "Gr2R4+" => Ok(Model::OrientedGrassmannian),
            other => Err(Error::NotSupported(format!("no numeric model for `{other}`"))),
        }
    }

    fn torus_rank(self) -> usize {
        match self {
            Model::Sphere | Model::ProjectivePlane => 1,
            Model::Grassmannian | Model::OrientedGrassmannian => 2,
        }
    }

    /// Dimension of the tangent space `s` at `p`.
    fn tangent_dim(self) -> usize {
        match self {
            Model::Sphere | Model::ProjectivePlane => 2,
            Model::Grassmannian | Model::OrientedGrassmannian => 4,
        }
    }

    /// Root covectors and multiplicities, written out independently of the
    /// catalog.
    fn roots(self) -> &'static [(&'static [f64], u64)] {
        match self {
            Model::Sphere | Model::ProjectivePlane => &[(&[1.0], 1)],
            Model::Grassmannian | Model::OrientedGrassmannian => &[(&[1.0, -1.0], 1), (&[1.0, 1.0], 1)],
        }
    }

    /// Embeds a torus vector (already multiplied by π) into `s`.
    fn embed(self, h: &[f64]) -> Vec<f64> {
        match self {
            Model::Sphere | Model::ProjectivePlane => vec![h[0], 0.0],
            // A = diag(θ1, θ2), stored row-major
            Model::Grassmannian | Model::OrientedGrassmannian => vec![h[0], 0.0, 0.0, h[1]],
        }
    }

    /// `exp_p` on all of `s`, as ambient coordinates.
    fn exp_tangent(self, x: &[f64]) -> Vec<f64> {
        match self {
            Model::Sphere => sphere_exp(x).to_vec(),
            Model::ProjectivePlane => {
                let v = sphere_exp(x);
                outer(&v, &v)
            }
            Model::Grassmannian => {
                let (u1, u2) = grassmannian_frame(x);
                let mut p = outer(&u1, &u1);
                for (a, b) in p.iter_mut().zip(outer(&u2, &u2)) {
                    *a += b;
                }
                p
            }
            Model::OrientedGrassmannian => {
                let (u1, u2) = grassmannian_frame(x);
                let mut bivector = Vec::with_capacity(6);
                for i in 0..4 {
                    for j in i + 1..4 {
                        bivector.push(u1[i] * u2[j] - u1[j] * u2[i]);
                    }
                }
                bivector
            }
        }
    }
}

/// `exp_p(X) = cos|X| p + sin|X| X/|X|` on the unit sphere with `p = e3`.
fn sphere_exp(x: &[f64]) -> [f64; 3] {
    let r = x[0].hypot(x[1]);
    let sinc = if r < 1e-12 { 1.0 } else { r.sin() / r };
    [sinc * x[0], sinc * x[1], r.cos()]
}

fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// First two columns of `e^X` for `X = [[0, -Aᵀ], [A, 0]]`, `A` 2×2.
fn grassmannian_frame(a: &[f64]) -> ([f64; 4], [f64; 4]) {
    let mut x = Matrix4::<f64>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            x[(2 + i, j)] = a[2 * i + j];
            x[(j, 2 + i)] = -a[2 * i + j];
        }
    }
    let e = x.exp();
    let col = |c: usize| [e[(0, c)], e[(1, c)], e[(2, c)], e[(3, c)]];
    (col(0), col(1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericPoint {
    pub coordinates: Vec<f64>,
    pub space_tag: String,
}

impl NumericPoint {
    /// Largest coordinate difference.
    pub fn distance(&self, other: &NumericPoint) -> f64 {
        self.coordinates.iter().zip(&other.coordinates).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn scaled(model: Model, h: &RationalVector) -> Result<Vec<f64>> {
    if h.len() != model.torus_rank() {
        return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", model.torus_rank(), h.len())));
    }
    Ok(h.to_f64().into_iter().map(|x| PI * x).collect())
}

/// `exp_p(πh)` in the ambient model of `space_tag`.
pub fn numeric_exp(space_tag: &str, h: &RationalVector) -> Result<NumericPoint> {
    let model = Model::from_tag(space_tag)?;
    let x = model.embed(&scaled(model, h)?);
    Ok(NumericPoint { coordinates: model.exp_tangent(&x), space_tag: space_tag.to_string() })
}

/// Number of roots (with multiplicity) where `|sin(α(πh))| ≤ 1e-9` and
/// `α(h) ≠ 0`.
pub fn numeric_index(space_tag: &str, h: &RationalVector) -> Result<u64> {
    let model = Model::from_tag(space_tag)?;
    let h = h.to_f64();
    if h.len() != model.torus_rank() {
        return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", model.torus_rank(), h.len())));
    }
    Ok(model
        .roots()
        .iter()
        .filter(|(covector, _)| {
            let value: f64 = covector.iter().zip(&h).map(|(a, b)| a * b).sum();
            value.abs() > POINT_TOLERANCE && (PI * value).sin().abs() <= POINT_TOLERANCE
        })
        .map(|(_, m)| m)
        .sum())
}

/// Dimension of the kernel of `d exp_p` at `πh`, from singular values of a
/// central-difference Jacobian on the whole tangent space.
pub fn finite_difference_index(space_tag: &str, h: &RationalVector) -> Result<u64> {
    let model = Model::from_tag(space_tag)?;
    let x = model.embed(&scaled(model, h)?);
    let dim = model.tangent_dim();
    let ambient = model.exp_tangent(&x).len();
    let mut jacobian = DMatrix::<f64>::zeros(ambient, dim);
    for k in 0..dim {
        let (mut plus, mut minus) = (x.clone(), x.clone());
        plus[k] += STEP;
        minus[k] -= STEP;
        let (fp, fm) = (model.exp_tangent(&plus), model.exp_tangent(&minus));
        for i in 0..ambient {
            jacobian[(i, k)] = (fp[i] - fm[i]) / (2.0 * STEP);
        }
    }
    let singular = jacobian.svd(false, false).singular_values;
    Ok(singular.iter().filter(|&&s| s < RANK_TOLERANCE).count() as u64)
}
