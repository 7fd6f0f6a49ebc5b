//! Horn's problem in U(2) and PU(1,1): membership and explicit solutions.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::angle::Angle;
use crate::isometry::{pair_distance, AnglePair, ClassTriple};
use crate::linalg::{c, cis, Mat2, C64};
use crate::walls::{default_wall_tol, linear_forms, Ijk};

/// Three U(2) classes; shares the chamber and coordinates of a PU(2,1) class triple.
pub type U2Triple = ClassTriple;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HornLowError {
    #[error("triple is not a solution")]
    NoSolution,
    #[error("target {0:.6} not bracketed by the rotation path")]
    BisectionFailure(f64),
    #[error("zero angle has no triangle construction")]
    DegenerateAngle,
    #[error("constructed solution misses the target (residual {0:.3e})")]
    Verification(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum U2Component {
    #[serde(rename = "C_0")]
    C0,
    #[serde(rename = "C_2pi")]
    C2Pi,
    #[serde(rename = "C_4pi")]
    C4Pi,
    #[serde(rename = "C_6pi")]
    C6Pi,
    #[serde(rename = "C_8pi")]
    C8Pi,
}

impl U2Component {
    pub fn sum_over_pi(self) -> i64 {
        match self {
            U2Component::C0 => 0,
            U2Component::C2Pi => 2,
            U2Component::C4Pi => 4,
            U2Component::C6Pi => 6,
            U2Component::C8Pi => 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct U2Membership {
    pub member: bool,
    pub component: Option<U2Component>,
}

/// `(component, σ-bounds)`: each bound is `σ_ijk ≤ level·π`.
fn u2_components() -> [(U2Component, [(&'static str, i64); 4]); 4] {
    [
        (U2Component::C2Pi, [("222", 0), ("112", 2), ("121", 2), ("211", 2)]),
        (U2Component::C4Pi, [("111", 4), ("122", 2), ("212", 2), ("221", 2)]),
        (U2Component::C6Pi, [("222", 2), ("112", 4), ("121", 4), ("211", 4)]),
        (U2Component::C8Pi, [("111", 6), ("122", 4), ("212", 4), ("221", 4)]),
    ]
}

pub fn u2_member(t: &U2Triple) -> U2Membership {
    u2_member_tol(t, default_wall_tol(t))
}

pub fn u2_member_tol(t: &U2Triple, tol: f64) -> U2Membership {
    let v = linear_forms(t);
    let component = if v.s.residual(0).abs() <= tol {
        Some(U2Component::C0)
    } else {
        u2_components().into_iter().find_map(|(comp, bounds)| {
            let on_sphere = v.s.residual(comp.sum_over_pi()).abs() <= tol;
            let inside = bounds.iter().all(|(x, level)| v.sigma(x.parse::<Ijk>().unwrap()).residual(*level) <= tol);
            (on_sphere && inside).then_some(comp)
        })
    };
    U2Membership { member: component.is_some(), component }
}

/// Eigen-angles of a 2×2 unitary matrix, sorted as an angle pair.
pub fn u2_class(m: &Mat2) -> AnglePair {
    let det = m.determinant();
    let half = cis(det.arg() / 2.0);
    let tr = m.trace();
    let cos_phi = (tr * half.conj()).re / 2.0;
    let traceless = m - Mat2::identity() * (tr / 2.0);
    let sin_phi = traceless.norm() / 2f64.sqrt();
    let phi = sin_phi.atan2(cos_phi);
    let mid = det.arg() / 2.0;
    AnglePair::from_radians(mid + phi, mid - phi)
}

pub fn rotation2(t: f64) -> Mat2 {
    let (s, co) = t.sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

pub fn diag2(p: &AnglePair) -> Mat2 {
    let (a1, a2) = p.radians();
    Mat2::new(cis(a1), C64::new(0.0, 0.0), C64::new(0.0, 0.0), cis(a2))
}

/// Rotation path parameter together with the three U(2) factors.
#[derive(Clone, Debug)]
pub struct U2Solution {
    pub t: f64,
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

impl U2Solution {
    pub fn product_residual(&self) -> f64 {
        (self.a * self.b * self.c - Mat2::identity()).norm()
    }
}

/// `A = diag(e^{iα})`, `B = Q(t) diag(e^{iβ}) Q(t)⁻¹`, `C = (AB)⁻¹`, with `t` fixed by bisection.
pub fn u2_construct(t: &U2Triple) -> Result<U2Solution, HornLowError> {
    if !u2_member(t).member {
        return Err(HornLowError::NoSolution);
    }
    let [a1, a2, b1, b2, g1, g2] = t.radians();
    let s = a1 + a2 + b1 + b2 + g1 + g2;
    let turns = (s / (2.0 * PI)).round() as i64;
    // Re(tr(AB)·e^{−iS_ab/2})/2 moves monotonically from cos ψ0 to cos ψ1 along the path.
    let c0 = ((a1 + b1 - a2 - b2) / 2.0).cos();
    let c1 = ((a1 - a2 + b2 - b1) / 2.0).cos();
    let sign = if turns % 2 == 0 { 1.0 } else { -1.0 };
    let target = sign * ((g1 - g2) / 2.0).cos();
    let f = |x: f64| {
        let (s, co) = x.sin_cos();
        co * co * c0 + s * s * c1 - target
    };
    let (lo_v, hi_v) = (f(0.0), f(PI / 2.0));
    const SLACK: f64 = 1e-12;
    if lo_v * hi_v > 0.0 && lo_v.abs().min(hi_v.abs()) > SLACK {
        return Err(HornLowError::BisectionFailure(target));
    }
    let t_star = if lo_v.abs() <= SLACK {
        0.0
    } else if hi_v.abs() <= SLACK {
        PI / 2.0
    } else {
        let (mut lo, mut hi) = (0.0, PI / 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (lo_v > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let (alpha, beta, gamma) = (t.alpha, t.beta, t.gamma);
    let q = rotation2(t_star);
    let a = diag2(&alpha);
    let b = q * diag2(&beta) * q.transpose();
    let cm = (a * b).adjoint();
    let sol = U2Solution { t: t_star, a, b, c: cm };
    let class_err = pair_distance(&u2_class(&sol.c), &gamma);
    if class_err > 1e-8 {
        return Err(HornLowError::Verification(class_err));
    }
    let res = sol.product_residual();
    if res > 1e-9 {
        return Err(HornLowError::Verification(res));
    }
    Ok(sol)
}

/// Rotation angles `(α, β, γ)` of three elliptic elements of PU(1,1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PU11Triple {
    pub alpha: Angle,
    pub beta: Angle,
    pub gamma: Angle,
}

impl PU11Triple {
    pub fn new(alpha: Angle, beta: Angle, gamma: Angle) -> PU11Triple {
        PU11Triple { alpha: alpha.reduce(), beta: beta.reduce(), gamma: gamma.reduce() }
    }

    pub fn from_radians(a: f64, b: f64, g: f64) -> PU11Triple {
        PU11Triple::new(Angle::radians(a), Angle::radians(b), Angle::radians(g))
    }

    pub fn sigma(&self) -> Angle {
        self.alpha + self.beta + self.gamma
    }

    fn default_tol(&self) -> f64 {
        if self.alpha.is_exact() && self.beta.is_exact() && self.gamma.is_exact() {
            1e-9
        } else {
            1e-7
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PU11Membership {
    pub member: bool,
    /// −1 on `{σ ≤ 2π}`, +1 on `{σ ≥ 4π}`.
    pub layer: Option<i8>,
}

pub fn pu11_member(t: &PU11Triple) -> PU11Membership {
    pu11_member_tol(t, t.default_tol())
}

pub fn pu11_member_tol(t: &PU11Triple, tol: f64) -> PU11Membership {
    let s = t.sigma();
    let layer = if s.residual(2) <= tol {
        Some(-1)
    } else if s.residual(4) >= -tol {
        Some(1)
    } else {
        None
    };
    PU11Membership { member: layer.is_some(), layer }
}

/// `J₂ = diag(1, −1)`.
pub fn form_u11() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// Transvection of the disk moving 0 to `p`.
pub fn transvection(p: C64) -> Mat2 {
    let k = 1.0 / (1.0 - p.norm_sqr()).sqrt();
    Mat2::new(c(k, 0.0), p * k, p.conj() * k, c(k, 0.0))
}

/// Rotation by `theta` about `p` in the disk, as an SU(1,1) matrix.
pub fn disk_rotation(p: C64, theta: f64) -> Mat2 {
    let d = Mat2::new(cis(theta / 2.0), c(0.0, 0.0), c(0.0, 0.0), cis(-theta / 2.0));
    transvection(p) * d * transvection(-p)
}

/// Rotation by `theta` about the point at distance `dist` from 0 in direction `dir`.
/// Closed form of `T·diag(e^{iθ/2}, e^{−iθ/2})·T⁻¹`; avoids cancelling large entries.
pub fn disk_rotation_polar(dist: f64, dir: f64, theta: f64) -> Mat2 {
    let (ch, sh) = (dist.cosh(), dist.sinh());
    let (s, co) = (theta / 2.0).sin_cos();
    let is = c(0.0, s);
    Mat2::new(c(co, s * ch), -is * cis(dir) * sh, is * cis(-dir) * sh, c(co, -s * ch))
}

/// Class angle of an elliptic U(1,1) matrix: argument of (positive-type eigenvalue)/(negative-type eigenvalue).
///
/// After normalizing to `N = M/√det = cos(θ/2)·I + i·sin(θ/2)·G` with `J·G` positive definite,
/// `sin²(θ/2)` is the determinant of the traceless part and `tr(−i·J·K)` carries its sign.
/// This avoids the eigenvalues, which are badly conditioned for rotations about far points.
pub fn u11_class(m: &Mat2) -> Option<f64> {
    let n = m / m.determinant().sqrt();
    let half_tr = n.trace() / 2.0;
    let k = n - Mat2::identity() * half_tr;
    let sin_sq = k.determinant().re;
    let scale = n.norm();
    if sin_sq <= 1e-24 * scale * scale {
        // Parabolic or hyperbolic unless the traceless part vanishes.
        return (k.norm() <= 1e-12 * scale).then_some(0.0);
    }
    let orient = (form_u11() * k * c(0.0, -1.0)).trace().re;
    let cos_half = if orient >= 0.0 { half_tr.re } else { -half_tr.re };
    Some((2.0 * sin_sq.sqrt().atan2(cos_half)).rem_euclid(2.0 * PI))
}

#[derive(Clone, Debug)]
pub struct PU11Solution {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
    /// `ABC = scalar·Id`.
    pub scalar: C64,
    /// True when the three rotations share a fixed point.
    pub commuting: bool,
}

impl PU11Solution {
    pub fn product_residual(&self) -> f64 {
        scalar_part(&self.a, &self.b, &self.c).1
    }
}

fn scalar_part(a: &Mat2, b: &Mat2, cm: &Mat2) -> (C64, f64) {
    let m = a * b * cm;
    let s = m.trace() / 2.0;
    (s, (m - Mat2::identity() * s).norm())
}

/// Distance from the incenter to a vertex with triangle angle `v`, and the angle at the
/// incenter between that vertex and the foot of the inradius `r` on an adjacent side.
fn incenter_spoke(v: f64, r: f64) -> (f64, f64) {
    let sinh_d = r.sinh() / (v / 2.0).sin();
    let tanh_d = sinh_d / (1.0 + sinh_d * sinh_d).sqrt();
    let omega = ((v / 2.0).cos() / r.cosh()).atan2(r.tanh() / tanh_d);
    (sinh_d.asinh(), omega)
}

/// Rotations about the vertices of a triangle with angles `α/2, β/2, γ/2` (requires σ < 2π).
///
/// The incenter sits at the origin. Every vertex then satisfies `sin(θ/4)·sinh(d) = sinh(r)`
/// with `r` bounded, so all matrix entries stay O(1) even for nearly ideal triangles.
fn triangle_rotations(al: f64, be: f64, ga: f64) -> Result<PU11Solution, HornLowError> {
    let angles = [al / 2.0, be / 2.0, ga / 2.0];
    let turn = |r: f64| angles.iter().map(|&v| incenter_spoke(v, r).1).sum::<f64>() - PI;
    // The turn decreases from positive at r = 0 towards −π.
    let (mut lo, mut hi) = (0.0, 1.0);
    while turn(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if turn(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    let [(da, wa), (db, wb), (dc, wc)] = angles.map(|v| incenter_spoke(v, r));
    let mut best: Option<(f64, PU11Solution)> = None;
    for sgn in [1.0, -1.0] {
        let ma = disk_rotation_polar(da, 0.0, al);
        let mb = disk_rotation_polar(db, sgn * (wa + wb), be);
        let mc = disk_rotation_polar(dc, -sgn * (wa + wc), ga);
        let (s, res) = scalar_part(&ma, &mb, &mc);
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, PU11Solution { a: ma, b: mb, c: mc, scalar: s, commuting: false }));
        }
    }
    let (res, sol) = best.unwrap();
    if res > 1e-9 {
        return Err(HornLowError::Verification(res));
    }
    Ok(sol)
}

/// Explicit PU(1,1) solution: triangle rotations, or commuting rotations on the boundary levels.
pub fn pu11_construct(t: &PU11Triple) -> Result<PU11Solution, HornLowError> {
    let tol = t.default_tol();
    if !pu11_member_tol(t, tol).member {
        return Err(HornLowError::NoSolution);
    }
    if t.alpha.is_zero() || t.beta.is_zero() || t.gamma.is_zero() {
        return Err(HornLowError::DegenerateAngle);
    }
    let s = t.sigma();
    let (al, be, ga) = (t.alpha.to_radians(), t.beta.to_radians(), t.gamma.to_radians());
    if s.residual(2).abs() <= tol || s.residual(4).abs() <= tol {
        let o = c(0.0, 0.0);
        let (ma, mb, mc) = (disk_rotation(o, al), disk_rotation(o, be), disk_rotation(o, ga));
        let (scalar, _) = scalar_part(&ma, &mb, &mc);
        return Ok(PU11Solution { a: ma, b: mb, c: mc, scalar, commuting: true });
    }
    if s.residual(2) < 0.0 {
        triangle_rotations(al, be, ga)
    } else {
        let two_pi = 2.0 * PI;
        let dual = triangle_rotations(two_pi - be, two_pi - al, two_pi - ga)?;
        // Exact inverse in SU(1,1): J M* J.
        let j = form_u11();
        let inv = |m: &Mat2| j * m.adjoint() * j;
        let (a, b, cm) = (inv(&dual.b), inv(&dual.a), inv(&dual.c));
        let (scalar, res) = scalar_part(&a, &b, &cm);
        if res > 1e-9 {
            return Err(HornLowError::Verification(res));
        }
        Ok(PU11Solution { a, b, c: cm, scalar, commuting: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(n1: i64, d1: i64, n2: i64, d2: i64) -> AnglePair {
        AnglePair::pi_frac(n1, d1, n2, d2)
    }

    #[test]
    fn u2_member_examples() {
        let zero = ClassTriple::uniform(pf(0, 1, 0, 1));
        assert_eq!(u2_member(&zero).component, Some(U2Component::C0));
        let t = ClassTriple::new(pf(1, 1, 0, 1), pf(1, 1, 0, 1), pf(0, 1, 0, 1));
        assert_eq!(u2_member(&t).component, Some(U2Component::C2Pi));
        let t = ClassTriple::new(pf(1, 2, 1, 2), pf(1, 2, 1, 2), pf(1, 1, 1, 1));
        assert_eq!(u2_member(&t).component, Some(U2Component::C4Pi));
    }

    #[test]
    fn u2_construct_examples() {
        let zero = ClassTriple::uniform(pf(0, 1, 0, 1));
        let s = u2_construct(&zero).unwrap();
        assert!((s.a - Mat2::identity()).norm() < 1e-15 && s.product_residual() < 1e-15);

        let t = ClassTriple::new(pf(1, 1, 0, 1), pf(1, 1, 0, 1), pf(0, 1, 0, 1));
        let s = u2_construct(&t).unwrap();
        assert_eq!(s.t, 0.0);
        assert!((s.c - Mat2::identity()).norm() < 1e-12);

        let bad = ClassTriple::new(pf(1, 2, 0, 1), pf(1, 2, 0, 1), pf(3, 2, 1, 2));
        assert_eq!(u2_construct(&bad).unwrap_err(), HornLowError::NoSolution);

        let t = ClassTriple::new(pf(1, 2, 0, 1), pf(1, 1, 1, 2), pf(3, 2, 1, 2));
        let s = u2_construct(&t).unwrap();
        assert!(s.product_residual() < 1e-12);
        assert!(pair_distance(&u2_class(&s.b), &t.beta) < 1e-12);
    }

    #[test]
    fn pu11_member_examples() {
        let q = |n: i64, d: i64| Angle::pi_frac(n, d);
        assert_eq!(pu11_member(&PU11Triple::new(q(1, 2), q(1, 2), q(1, 2))).layer, Some(-1));
        assert!(!pu11_member(&PU11Triple::new(q(1, 1), q(1, 1), q(1, 1))).member);
        assert_eq!(pu11_member(&PU11Triple::new(q(3, 2), q(3, 2), q(3, 2))).layer, Some(1));
    }

    #[test]
    fn pu11_construct_examples() {
        let q = |n: i64, d: i64| Angle::pi_frac(n, d);
        let s = pu11_construct(&PU11Triple::new(q(1, 2), q(1, 2), q(1, 2))).unwrap();
        assert!(!s.commuting && s.product_residual() < 1e-12);
        for m in [s.a, s.b, s.c] {
            assert!((u11_class(&m).unwrap() - PI / 2.0).abs() < 1e-12);
        }
        let s = pu11_construct(&PU11Triple::new(q(2, 3), q(2, 3), q(2, 3))).unwrap();
        assert!(s.commuting);
        assert!((s.scalar + c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(pu11_construct(&PU11Triple::new(q(1, 1), q(1, 1), q(1, 1))).unwrap_err(), HornLowError::NoSolution);
        assert_eq!(
            pu11_construct(&PU11Triple::new(q(0, 1), q(1, 2), q(1, 2))).unwrap_err(),
            HornLowError::DegenerateAngle
        );
    }

    #[test]
    fn pu11_above_four_pi() {
        let t = PU11Triple::from_radians(5.0, 4.5, 5.5);
        let s = pu11_construct(&t).unwrap();
        assert!(s.product_residual() < 1e-10);
        for (m, want) in [(s.a, 5.0), (s.b, 4.5), (s.c, 5.5)] {
            assert!((u11_class(&m).unwrap() - want).abs() < 1e-9);
        }
    }
}
