//! Elliptic classes: angle pairs, classification, standard lifts, ψ and complex reflections.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::angle::Angle;
use crate::linalg::{
    cis, diag3, eigensystem_3x3, goldman_discriminant, hermitian_pairing, su_normalize, unitary_residual, GroupElement,
    HermitianForm, LinalgError, Mat3, Tolerances, Vec3, C64,
};

/// Half-width of the band around zero where the discriminant alone is not trusted.
pub const DISC_BAND: f64 = 1e-7;
/// Eigenvalues farther than this from the unit circle rule out ellipticity.
const UNIT_MODULUS_TOL: f64 = 1e-6;
/// Maximal distance from a cube root of unity accepted by `layer_product`.
pub const LAYER_SNAP: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsometryError {
    #[error("element does not preserve its form (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("element is not elliptic")]
    NotElliptic,
    #[error("polar vector is null")]
    NullPolarVector,
    #[error("product is not scalar (residual {0:.3e})")]
    NotScalarProduct(f64),
    #[error("product scalar is {0:.3e} away from every cube root of unity")]
    LayerSnap(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Coordinates `(a1 ≥ a2)` of an elliptic class, both in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnglePair {
    a1: Angle,
    a2: Angle,
}

impl AnglePair {
    /// Reduces both angles mod 2π and orders them.
    pub fn new(x: Angle, y: Angle) -> AnglePair {
        let (x, y) = (x.reduce(), y.reduce());
        if x.cmp_value(y).is_lt() {
            AnglePair { a1: y, a2: x }
        } else {
            AnglePair { a1: x, a2: y }
        }
    }

    pub fn from_radians(x: f64, y: f64) -> AnglePair {
        AnglePair::new(Angle::Float(x), Angle::Float(y))
    }

    /// Exact pair `(n1/d1 · π, n2/d2 · π)`.
    pub fn pi_frac(n1: i64, d1: i64, n2: i64, d2: i64) -> AnglePair {
        AnglePair::new(Angle::pi_frac(n1, d1), Angle::pi_frac(n2, d2))
    }

    pub fn a1(&self) -> Angle {
        self.a1
    }

    pub fn a2(&self) -> Angle {
        self.a2
    }

    pub fn radians(&self) -> (f64, f64) {
        (self.a1.to_radians(), self.a2.to_radians())
    }

    /// The class of the inverse element.
    pub fn inverse(&self) -> AnglePair {
        AnglePair::new(-self.a2, -self.a1)
    }

    pub fn is_interior(&self) -> bool {
        let (x, y) = self.radians();
        y > 0.0 && x < 2.0 * PI && x > y
    }

    pub fn is_exact(&self) -> bool {
        self.a1.is_exact() && self.a2.is_exact()
    }
}

impl fmt::Display for AnglePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a1, self.a2)
    }
}

#[derive(Serialize, Deserialize)]
struct AnglePairJson {
    a1: f64,
    a2: f64,
}

impl Serialize for AnglePair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (a1, a2) = self.radians();
        AnglePairJson { a1, a2 }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnglePair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<AnglePair, D::Error> {
        let j = AnglePairJson::deserialize(d)?;
        Ok(AnglePair::from_radians(j.a1, j.a2))
    }
}

/// Circular distance between two angles in radians.
pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Max-coordinate circular distance, minimized over the two matchings.
pub fn pair_distance(p: &AnglePair, q: &AnglePair) -> f64 {
    let (p1, p2) = p.radians();
    let (q1, q2) = q.radians();
    let straight = circular_distance(p1, q1).max(circular_distance(p2, q2));
    let swapped = circular_distance(p1, q2).max(circular_distance(p2, q1));
    straight.min(swapped)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTriple {
    pub alpha: AnglePair,
    pub beta: AnglePair,
    pub gamma: AnglePair,
}

impl ClassTriple {
    pub fn new(alpha: AnglePair, beta: AnglePair, gamma: AnglePair) -> ClassTriple {
        ClassTriple { alpha, beta, gamma }
    }

    pub fn uniform(p: AnglePair) -> ClassTriple {
        ClassTriple { alpha: p, beta: p, gamma: p }
    }

    pub fn pairs(&self) -> [AnglePair; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// `(α1, α2, β1, β2, γ1, γ2)`.
    pub fn angles(&self) -> [Angle; 6] {
        [self.alpha.a1, self.alpha.a2, self.beta.a1, self.beta.a2, self.gamma.a1, self.gamma.a2]
    }

    pub fn radians(&self) -> [f64; 6] {
        self.angles().map(Angle::to_radians)
    }

    pub fn from_radians(x: [f64; 6]) -> ClassTriple {
        ClassTriple {
            alpha: AnglePair::from_radians(x[0], x[1]),
            beta: AnglePair::from_radians(x[2], x[3]),
            gamma: AnglePair::from_radians(x[4], x[5]),
        }
    }

    /// All six angles strictly inside `(0, 2π)` and each pair strictly ordered.
    pub fn is_interior(&self) -> bool {
        self.pairs().iter().all(AnglePair::is_interior)
    }

    pub fn is_exact(&self) -> bool {
        self.pairs().iter().all(AnglePair::is_exact)
    }
}

impl fmt::Display for ClassTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.alpha, self.beta, self.gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorKind {
    Line,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryClass {
    RegularElliptic { angles: AnglePair },
    SpecialElliptic { angles: AnglePair, mirror: MirrorKind },
    Loxodromic,
    Parabolic,
}

impl IsometryClass {
    pub fn angles(&self) -> Option<AnglePair> {
        match self {
            IsometryClass::RegularElliptic { angles } | IsometryClass::SpecialElliptic { angles, .. } => Some(*angles),
            _ => None,
        }
    }

    pub fn is_elliptic(&self) -> bool {
        self.angles().is_some()
    }
}

/// A cube root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "omega^2")]
    OmegaSq,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Omega, Layer::One, Layer::OmegaSq];

    pub fn value(self) -> C64 {
        match self {
            Layer::One => C64::new(1.0, 0.0),
            Layer::Omega => cis(2.0 * PI / 3.0),
            Layer::OmegaSq => cis(4.0 * PI / 3.0),
        }
    }

    /// Layer of `e^{2iπk/3}`.
    pub fn from_third(k: i64) -> Layer {
        match k.rem_euclid(3) {
            0 => Layer::One,
            1 => Layer::Omega,
            _ => Layer::OmegaSq,
        }
    }

    /// Nearest cube root of unity and the distance to it.
    pub fn nearest(u: C64) -> (Layer, f64) {
        Layer::ALL.iter().map(|&l| (l, (u - l.value()).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
    }

    /// Image under ψ: ω and ω² swap.
    pub fn mirror(self) -> Layer {
        match self {
            Layer::One => Layer::One,
            Layer::Omega => Layer::OmegaSq,
            Layer::OmegaSq => Layer::Omega,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::One => "1",
            Layer::Omega => "omega",
            Layer::OmegaSq => "omega^2",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::One => "1",
            Layer::Omega => "ω",
            Layer::OmegaSq => "ω²",
        })
    }
}

/// `diag(e^{i a1}, e^{i a2}, 1)`.
pub fn elliptic_rep(p: &AnglePair) -> GroupElement {
    let (x, y) = p.radians();
    GroupElement::standard(diag3(cis(x), cis(y), C64::new(1.0, 0.0)))
}

/// The determinant-one diagonal lift of a class.
pub fn standard_lift(p: &AnglePair) -> GroupElement {
    let (x, y) = p.radians();
    GroupElement::standard(diag3(cis((2.0 * x - y) / 3.0), cis((2.0 * y - x) / 3.0), cis(-(x + y) / 3.0)))
}

/// ψ(α, β, γ) = (γ⁻¹, β⁻¹, α⁻¹) in class coordinates.
pub fn psi(t: &ClassTriple) -> ClassTriple {
    ClassTriple { alpha: t.gamma.inverse(), beta: t.beta.inverse(), gamma: t.alpha.inverse() }
}

/// Spectral data of an elliptic element.
#[derive(Clone, Debug)]
pub struct EllipticData {
    pub angles: AnglePair,
    /// Eigenvalue on the negative-type eigenvector (unit modulus).
    pub negative_eigenvalue: C64,
    pub negative_vector: Vec3,
    pub positive_vectors: [Vec3; 2],
    /// Set when the spectrum has a repeated eigenvalue.
    pub mirror: Option<MirrorKind>,
}

struct Direction {
    value: C64,
    vector: Vec3,
    norm: f64,
    cluster: usize,
}

pub fn elliptic_data(m: &GroupElement, tol: &Tolerances) -> Result<EllipticData, IsometryError> {
    let es = eigensystem_3x3(m.matrix(), tol).map_err(|_| IsometryError::NotElliptic)?;
    if es.values.iter().any(|z| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL) {
        return Err(IsometryError::NotElliptic);
    }
    let h = m.form().matrix();
    let mut dirs: Vec<Direction> = Vec::with_capacity(3);
    for (ci, cl) in es.clusters.iter().enumerate() {
        let value = {
            let z = cl.iter().map(|&i| es.values[i]).sum::<C64>() / cl.len() as f64;
            z / z.norm()
        };
        let vs: Vec<Vec3> = cl.iter().map(|&i| es.vectors[i]).collect();
        match vs.len() {
            1 => {
                let norm = hermitian_pairing(&vs[0], &vs[0], m.form()).re;
                dirs.push(Direction { value, vector: vs[0], norm, cluster: ci });
            }
            2 => {
                let g = Matrix2::from_fn(|i, j| (vs[i].adjoint() * h * vs[j])[(0, 0)]);
                let eig = g.symmetric_eigen();
                for k in 0..2 {
                    let col = eig.eigenvectors.column(k);
                    let vector = vs[0] * col[0] + vs[1] * col[1];
                    dirs.push(Direction { value, vector, norm: eig.eigenvalues[k], cluster: ci });
                }
            }
            _ => {
                let g = Matrix3::from_fn(|i, j| (vs[i].adjoint() * h * vs[j])[(0, 0)]);
                let eig = g.symmetric_eigen();
                for k in 0..3 {
                    let col = eig.eigenvectors.column(k);
                    let vector = vs[0] * col[0] + vs[1] * col[1] + vs[2] * col[2];
                    dirs.push(Direction { value, vector, norm: eig.eigenvalues[k], cluster: ci });
                }
            }
        }
    }
    let scale = h.norm().max(1.0);
    if dirs.iter().any(|d| d.norm.abs() <= tol.vector_type * scale * d.vector.norm_squared()) {
        return Err(IsometryError::NotElliptic);
    }
    let negatives: Vec<&Direction> = dirs.iter().filter(|d| d.norm < 0.0).collect();
    if negatives.len() != 1 {
        return Err(IsometryError::NotElliptic);
    }
    let neg = negatives[0];
    let pos: Vec<&Direction> = dirs.iter().filter(|d| d.norm > 0.0).collect();
    let arg = |z: C64| (z / neg.value).arg().rem_euclid(2.0 * PI);
    let angles = AnglePair::from_radians(arg(pos[0].value), arg(pos[1].value));
    let mirror = es.clusters.iter().enumerate().find(|(_, cl)| cl.len() >= 2).map(|(ci, _)| {
        if neg.cluster == ci {
            MirrorKind::Line
        } else {
            MirrorKind::Point
        }
    });
    Ok(EllipticData {
        angles,
        negative_eigenvalue: neg.value,
        negative_vector: neg.vector,
        positive_vectors: [pos[0].vector, pos[1].vector],
        mirror,
    })
}

pub fn classify(m: &GroupElement, tol: &Tolerances) -> Result<IsometryClass, IsometryError> {
    let scale = m.matrix().norm().max(1.0).powi(2);
    let r = unitary_residual(m.matrix(), m.form());
    if r > tol.unitary * scale {
        return Err(IsometryError::NotUnitary(r));
    }
    let su = su_normalize(m)?;
    let f = goldman_discriminant(su.matrix().trace());
    if f > DISC_BAND {
        return Ok(IsometryClass::Loxodromic);
    }
    match elliptic_data(m, tol) {
        Ok(d) if f < -DISC_BAND => Ok(IsometryClass::RegularElliptic { angles: d.angles }),
        Ok(d) => Ok(match d.mirror {
            Some(mirror) => IsometryClass::SpecialElliptic { angles: d.angles, mirror },
            None => IsometryClass::RegularElliptic { angles: d.angles },
        }),
        Err(e) if f < -DISC_BAND => Err(e),
        Err(_) => {
            let off_circle = eigensystem_3x3(m.matrix(), tol)
                .map(|es| es.values.iter().any(|z| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL))
                .unwrap_or(false);
            Ok(if off_circle { IsometryClass::Loxodromic } else { IsometryClass::Parabolic })
        }
    }
}

pub fn angle_pair(m: &GroupElement, tol: &Tolerances) -> Result<AnglePair, IsometryError> {
    elliptic_data(m, tol).map(|d| d.angles)
}

/// `z ↦ z + (η − 1)·⟨z, c⟩/⟨c, c⟩·c`.
pub fn complex_reflection(
    c: &Vec3,
    eta: C64,
    h: &HermitianForm,
    tol: &Tolerances,
) -> Result<GroupElement, IsometryError> {
    let cc = hermitian_pairing(c, c, h);
    if cc.norm() <= tol.num * c.norm_squared().max(f64::MIN_POSITIVE) {
        return Err(IsometryError::NullPolarVector);
    }
    let row = c.adjoint() * h.matrix();
    let m = Mat3::identity() + (c * row) * ((eta - C64::new(1.0, 0.0)) / cc);
    Ok(GroupElement::from_parts(m, *h))
}

/// The cube root `u` with `Ã·B̃·C̃ = u·Id` for the standard lifts of a witness triple.
pub fn layer_product(
    a: &GroupElement,
    b: &GroupElement,
    c: &GroupElement,
    tol: &Tolerances,
) -> Result<Layer, IsometryError> {
    let p = a.matrix() * b.matrix() * c.matrix();
    let s = p.trace() / 3.0;
    let r = (p - Mat3::identity() * s).norm();
    if r > tol.unitary * p.norm().max(1.0) {
        return Err(IsometryError::NotScalarProduct(r));
    }
    let mut u = s;
    for g in [a, b, c] {
        let d = elliptic_data(g, tol)?;
        let (x, y) = d.angles.radians();
        u *= cis(-(x + y) / 3.0) / d.negative_eigenvalue;
    }
    let (layer, dist) = Layer::nearest(u);
    if dist > LAYER_SNAP {
        return Err(IsometryError::LayerSnap(dist));
    }
    Ok(layer)
}
