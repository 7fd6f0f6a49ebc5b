//! Complex 3×3 arithmetic, Hermitian forms and the closed-form eigen solver.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Vec3 = Vector3<C64>;
pub type Mat2 = Matrix2<C64>;

/// Two Cardano roots closer than this are treated as one repeated eigenvalue.
pub const REPEATED_ROOT: f64 = 1e-7;
/// Smallest |det| of the unit eigenvector basis accepted as diagonalizable.
const MIN_INDEPENDENCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub num: f64,
    pub unitary: f64,
    /// Relative to the Frobenius norm of the matrix.
    pub eig: f64,
    /// Relative to ‖v‖².
    pub vector_type: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { num: 1e-10, unitary: 1e-9, eig: 1e-9, vector_type: 1e-9 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not conjugate-symmetric (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix does not preserve the form (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("zero vector has no type")]
    ZeroVector,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("eigen residual {0:.3e} above target")]
    NonConvergence(f64),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn diag3(a: C64, b: C64, d: C64) -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(a, b, d))
}

/// A conjugate-symmetric 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianForm(Mat3);

impl HermitianForm {
    /// Validates conjugate symmetry within `tol` and stores the symmetrized matrix.
    pub fn new(m: Mat3, tol: f64) -> Result<Self, LinalgError> {
        let defect = (m - m.adjoint()).norm();
        if defect > tol * m.norm().max(1.0) {
            return Err(LinalgError::NotHermitian(defect));
        }
        Ok(HermitianForm((m + m.adjoint()).scale(0.5)))
    }

    /// J = diag(1, 1, −1).
    pub fn standard() -> Self {
        HermitianForm(diag3(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn pairing(&self, v: &Vec3, w: &Vec3) -> C64 {
        hermitian_pairing(v, w, self)
    }
}

impl Default for HermitianForm {
    fn default() -> Self {
        HermitianForm::standard()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorType {
    Negative,
    Null,
    Positive,
}

/// ⟨v, w⟩ = w* H v.
pub fn hermitian_pairing(v: &Vec3, w: &Vec3, h: &HermitianForm) -> C64 {
    (w.adjoint() * h.matrix() * v)[(0, 0)]
}

pub fn vector_type(v: &Vec3, h: &HermitianForm, tol: &Tolerances) -> Result<VectorType, LinalgError> {
    let n2 = v.norm_squared();
    if n2 == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let q = hermitian_pairing(v, v, h).re;
    let band = tol.vector_type * n2;
    Ok(if q < -band {
        VectorType::Negative
    } else if q > band {
        VectorType::Positive
    } else {
        VectorType::Null
    })
}

/// Counts (positive, negative, zero) eigenvalues; zero is relative to the largest one.
pub fn signature(h: &HermitianForm, tol: &Tolerances) -> (usize, usize, usize) {
    let eig = h.matrix().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let band = if scale == 0.0 { 0.0 } else { tol.vector_type * scale };
    let mut out = (0, 0, 0);
    for &x in eig.eigenvalues.iter() {
        if x > band {
            out.0 += 1;
        } else if x < -band {
            out.1 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

/// Frobenius residual of `M* H M − H`.
pub fn unitary_residual(m: &Mat3, h: &HermitianForm) -> f64 {
    (m.adjoint() * h.matrix() * m - h.matrix()).norm()
}

/// A matrix together with the form it preserves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    matrix: Mat3,
    form: HermitianForm,
}

impl GroupElement {
    pub fn new(matrix: Mat3, form: HermitianForm, tol: &Tolerances) -> Result<Self, LinalgError> {
        let scale = matrix.norm().max(1.0).powi(2);
        let r = unitary_residual(&matrix, &form);
        if r > tol.unitary * scale {
            return Err(LinalgError::NotUnitary(r));
        }
        let dm = matrix.determinant().norm();
        if (dm - 1.0).abs() > tol.unitary * scale {
            return Err(LinalgError::NotUnitary((dm - 1.0).abs()));
        }
        Ok(GroupElement { matrix, form })
    }

    /// Wraps without validation; callers vouch for unitarity.
    pub fn from_parts(matrix: Mat3, form: HermitianForm) -> Self {
        GroupElement { matrix, form }
    }

    pub fn standard(matrix: Mat3) -> Self {
        GroupElement { matrix, form: HermitianForm::standard() }
    }

    pub fn identity() -> Self {
        GroupElement::standard(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement { matrix: self.matrix * other.matrix, form: self.form }
    }

    /// Inverse through the form: `H⁻¹ M* H`.
    pub fn inverse(&self) -> GroupElement {
        let h = self.form.matrix();
        let matrix = match h.try_inverse() {
            Some(hinv) => hinv * self.matrix.adjoint() * h,
            None => self.matrix.try_inverse().unwrap_or_else(Mat3::zeros),
        };
        GroupElement { matrix, form: self.form }
    }

    /// `q · self · q⁻¹`.
    pub fn conjugate_by(&self, q: &GroupElement) -> GroupElement {
        q.mul(self).mul(&q.inverse())
    }

    pub fn scaled(&self, s: C64) -> GroupElement {
        GroupElement { matrix: self.matrix * s, form: self.form }
    }
}

/// Rescales by the cube root of `det⁻¹` whose argument is `−Arg(det)/3`.
pub fn su_normalize(m: &GroupElement) -> Result<GroupElement, LinalgError> {
    let d = m.matrix().determinant();
    if d.norm() == 0.0 {
        return Err(LinalgError::SingularMatrix);
    }
    let mut arg = d.arg();
    if arg <= -std::f64::consts::PI {
        arg = std::f64::consts::PI;
    }
    let root = C64::from_polar(d.norm().powf(-1.0 / 3.0), -arg / 3.0);
    Ok(m.scaled(root))
}

/// Goldman's discriminant of an SU(2,1) trace: negative exactly on regular elliptics.
pub fn goldman_discriminant(z: C64) -> f64 {
    let n2 = z.norm_sqr();
    n2 * n2 - 8.0 * (z * z * z).re + 18.0 * n2 - 27.0
}

#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: [C64; 3],
    /// Unit (Euclidean) eigenvectors, aligned with `values`.
    pub vectors: [Vec3; 3],
    /// Index groups of repeated eigenvalues.
    pub clusters: Vec<Vec<usize>>,
}

impl Eigensystem {
    pub fn pairs(&self) -> impl Iterator<Item = (C64, Vec3)> + '_ {
        self.values.iter().copied().zip(self.vectors.iter().copied())
    }

    pub fn columns(&self) -> Mat3 {
        Mat3::from_columns(&self.vectors)
    }
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    Vec3::new(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
}

fn poly_eval(coef: &[C64; 3], x: C64) -> (C64, C64) {
    let p = ((x + coef[2]) * x + coef[1]) * x + coef[0];
    let dp = (x * 3.0 + coef[2] * 2.0) * x + coef[1];
    (p, dp)
}

/// Roots of `x³ + c2 x² + c1 x + c0` with `coef = [c0, c1, c2]`.
pub fn cubic_roots(coef: [C64; 3]) -> [C64; 3] {
    let [c0, c1, c2] = coef;
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c2 * c2 * c2 * (2.0 / 27.0) - c2 * c1 / 3.0 + c0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w1 = -q / 2.0 + disc;
    let w2 = -q / 2.0 - disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let mut roots = [C64::new(0.0, 0.0); 3];
    if w.norm() == 0.0 {
        roots = [-shift; 3];
    } else {
        let u = w.powf(1.0 / 3.0);
        let omega = cis(2.0 * std::f64::consts::PI / 3.0);
        let mut uk = u;
        for r in roots.iter_mut() {
            *r = uk - p / (uk * 3.0) - shift;
            uk *= omega;
        }
    }
    for r in roots.iter_mut() {
        let (mut val, _) = poly_eval(&coef, *r);
        for _ in 0..4 {
            let (_, dp) = poly_eval(&coef, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *r - val / dp;
            let (cv, _) = poly_eval(&coef, cand);
            if cv.norm() < val.norm() {
                *r = cand;
                val = cv;
            } else {
                break;
            }
        }
    }
    roots
}

fn char_poly(m: &Mat3) -> [C64; 3] {
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    [-m.determinant(), minors, -tr]
}

fn clusters_of(roots: &[C64; 3], thresh: f64) -> Vec<Vec<usize>> {
    let close = |i: usize, j: usize| (roots[i] - roots[j]).norm() < thresh;
    let (c01, c02, c12) = (close(0, 1), close(0, 2), close(1, 2));
    match (c01, c02, c12) {
        (false, false, false) => vec![vec![0], vec![1], vec![2]],
        (true, false, false) => vec![vec![0, 1], vec![2]],
        (false, true, false) => vec![vec![0, 2], vec![1]],
        (false, false, true) => vec![vec![1, 2], vec![0]],
        _ => vec![vec![0, 1, 2]],
    }
}

fn residual(m: &Mat3, lambda: C64, v: &Vec3) -> f64 {
    (m * v - v * lambda).norm()
}

fn simple_eigenvector(m: &Mat3, lambda: C64, target: f64) -> Option<Vec3> {
    let a = m - Mat3::identity() * lambda;
    let rows: Vec<Vec3> = (0..3).map(|i| a.row(i).transpose()).collect();
    let cands = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
    let best = cands.iter().max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    if best.norm() == 0.0 {
        return None;
    }
    let mut v = best / C64::from(best.norm());
    if residual(m, lambda, &v) <= target {
        return Some(v);
    }
    // Inverse iteration with a tiny shift keeps the solve nonsingular.
    let shift = lambda + C64::new(1e-13, 1e-13) * m.norm().max(1.0);
    let lu = (m - Mat3::identity() * shift).lu();
    for _ in 0..3 {
        let x = lu.solve(&v)?;
        let n = x.norm();
        if !n.is_finite() || n == 0.0 {
            break;
        }
        v = x / C64::from(n);
        if residual(m, lambda, &v) <= target {
            break;
        }
    }
    Some(v)
}

/// Orthonormal basis of `{v : r·v = 0}` (bilinear), i.e. the Hermitian complement of conj(r).
fn kernel_of_row(r: &Vec3) -> [Vec3; 2] {
    let n = r.map(|x| x.conj());
    let n = n / C64::from(n.norm());
    let mut basis = Vec::with_capacity(2);
    for i in 0..3 {
        let mut e = Vec3::zeros();
        e[i] = C64::new(1.0, 0.0);
        let mut v = e - n * n.dotc(&e);
        for b in &basis {
            let b: &Vec3 = b;
            v -= b * b.dotc(&v);
        }
        if v.norm() > 0.5 {
            basis.push(v / C64::from(v.norm()));
        }
        if basis.len() == 2 {
            break;
        }
    }
    [basis[0], basis[1]]
}

/// Eigenpairs of a 3×3 complex matrix: Cardano roots, Newton polish, kernel extraction.
pub fn eigensystem_3x3(m: &Mat3, tol: &Tolerances) -> Result<Eigensystem, LinalgError> {
    let scale = m.norm().max(1.0);
    let target = tol.eig * scale;
    let mut roots = cubic_roots(char_poly(m));
    let mean = m.trace() / 3.0;
    // A triple root splits by about ε^{1/3}; recognise scalar matrices directly.
    let clusters = if (m - Mat3::identity() * mean).norm() <= target {
        vec![vec![0, 1, 2]]
    } else {
        clusters_of(&roots, REPEATED_ROOT * scale)
    };
    let mut vectors = [Vec3::zeros(); 3];
    for cl in &clusters {
        match cl.len() {
            1 => {
                let i = cl[0];
                let v = simple_eigenvector(m, roots[i], target).ok_or(LinalgError::NonConvergence(f64::INFINITY))?;
                let r = residual(m, roots[i], &v);
                if r > target {
                    return Err(LinalgError::NonConvergence(r));
                }
                vectors[i] = v;
            }
            2 => {
                let (i, j) = (cl[0], cl[1]);
                let mean = (roots[i] + roots[j]) / 2.0;
                let spread = (roots[i] - roots[j]).norm();
                let a = m - Mat3::identity() * mean;
                let row = (0..3).map(|k| a.row(k).transpose()).max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
                if row.norm() <= target {
                    return Err(LinalgError::NonConvergence(row.norm()));
                }
                let basis = kernel_of_row(&row);
                let mean = basis.iter().map(|b| b.dotc(&(m * b))).sum::<C64>() / 2.0;
                for b in &basis {
                    let r = residual(m, mean, b);
                    if r > target + spread {
                        return Err(LinalgError::NonConvergence(r));
                    }
                }
                roots[i] = mean;
                roots[j] = mean;
                vectors[i] = basis[0];
                vectors[j] = basis[1];
            }
            _ => {
                let a = m - Mat3::identity() * mean;
                if a.norm() > target + REPEATED_ROOT * scale {
                    return Err(LinalgError::NonConvergence(a.norm()));
                }
                roots = [mean; 3];
                vectors = [Vec3::x(), Vec3::y(), Vec3::z()];
            }
        }
    }
    let independence = Mat3::from_columns(&vectors).determinant().norm();
    if independence < MIN_INDEPENDENCE {
        return Err(LinalgError::NonConvergence(independence));
    }
    Ok(Eigensystem { values: roots, vectors, clusters })
}

/// JSON layout shared by every matrix: row-major rows of `{"re": .., "im": ..}`.
/// Input entries may also be bare reals or `[re, im]` pairs.
pub mod matrix_json {
    use super::{Mat3, C64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize)]
    struct Entry {
        re: f64,
        im: f64,
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum InputEntry {
        Complex { re: f64, im: f64 },
        Pair([f64; 2]),
        Real(f64),
    }

    impl From<InputEntry> for Entry {
        fn from(e: InputEntry) -> Entry {
            match e {
                InputEntry::Complex { re, im } | InputEntry::Pair([re, im]) => Entry { re, im },
                InputEntry::Real(re) => Entry { re, im: 0.0 },
            }
        }
    }

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<Entry>> =
            (0..3).map(|i| (0..3).map(|j| Entry { re: m[(i, j)].re, im: m[(i, j)].im }).collect()).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat3, D::Error> {
        let rows: Vec<Vec<InputEntry>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Entry>> = rows.into_iter().map(|r| r.into_iter().map(Entry::from).collect()).collect();
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(serde::de::Error::custom("expected a 3x3 matrix"));
        }
        Ok(Mat3::from_fn(|i, j| C64::new(rows[i][j].re, rows[i][j].im)))
    }

    /// Parses a bare matrix value.
    pub fn from_value(v: &serde_json::Value) -> Result<Mat3, serde_json::Error> {
        deserialize(v)
    }

    pub fn to_value(m: &Mat3) -> serde_json::Value {
        serialize(m, serde_json::value::Serializer).expect("matrix serialization is infallible")
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            #[serde(with = "matrix_json")]
            matrix: Mat3,
            #[serde(with = "matrix_json")]
            form: Mat3,
        }
        Out { matrix: self.matrix, form: *self.form.matrix() }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pairing_examples() {
        let j = HermitianForm::standard();
        let e3 = Vec3::new(c(0., 0.), c(0., 0.), c(1., 0.));
        let e1 = Vec3::new(c(1., 0.), c(0., 0.), c(0., 0.));
        let null = Vec3::new(c(1., 0.), c(0., 0.), c(1., 0.));
        assert_eq!(hermitian_pairing(&e3, &e3, &j), c(-1., 0.));
        assert_eq!(hermitian_pairing(&e1, &e1, &j), c(1., 0.));
        assert_eq!(hermitian_pairing(&null, &null, &j), c(0., 0.));
        let t = Tolerances::default();
        assert_eq!(vector_type(&e3, &j, &t), Ok(VectorType::Negative));
        assert_eq!(vector_type(&e1, &j, &t), Ok(VectorType::Positive));
        assert_eq!(vector_type(&null, &j, &t), Ok(VectorType::Null));
        assert_eq!(vector_type(&Vec3::zeros(), &j, &t), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn signature_examples() {
        let t = Tolerances::default();
        assert_eq!(signature(&HermitianForm::standard(), &t), (2, 1, 0));
        assert_eq!(signature(&HermitianForm::new(Mat3::zeros(), 1e-12).unwrap(), &t), (0, 0, 3));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Mat3::identity();
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(HermitianForm::new(m, 1e-12), Err(LinalgError::NotHermitian(_))));
    }

    #[test]
    fn su_normalize_examples() {
        let id = GroupElement::identity();
        assert!((su_normalize(&id).unwrap().matrix() - Mat3::identity()).norm() < 1e-15);
        let m = GroupElement::standard(diag3(cis(PI), c(1., 0.), c(1., 0.)));
        let n = su_normalize(&m).unwrap();
        let want = diag3(cis(2.0 * PI / 3.0), cis(-PI / 3.0), cis(-PI / 3.0));
        assert!((n.matrix() - want).norm() < 1e-14);
    }

    #[test]
    fn eigen_diagonal() {
        let m = diag3(cis(2.0 * PI / 3.0), cis(PI / 3.0), c(1., 0.));
        let es = eigensystem_3x3(&m, &Tolerances::default()).unwrap();
        for (l, v) in es.pairs() {
            assert!(residual(&m, l, &v) < 1e-12);
            // Standard basis vectors up to phase.
            assert!((v.iter().map(|x| x.norm()).fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
        let mut args: Vec<f64> = es.values.iter().map(|z| z.arg()).collect();
        args.sort_by(f64::total_cmp);
        assert!(
            (args[0]).abs() < 1e-12 && (args[1] - PI / 3.0).abs() < 1e-12 && (args[2] - 2.0 * PI / 3.0).abs() < 1e-12
        );
    }

    #[test]
    fn eigen_identity_is_triple() {
        let es = eigensystem_3x3(&Mat3::identity(), &Tolerances::default()).unwrap();
        assert_eq!(es.clusters, vec![vec![0, 1, 2]]);
        assert!(es.values.iter().all(|z| (z - c(1., 0.)).norm() < 1e-12));
    }

    #[test]
    fn eigen_repeated_pair() {
        let m = diag3(cis(1.0), cis(1.0), c(1., 0.));
        let es = eigensystem_3x3(&m, &Tolerances::default()).unwrap();
        assert_eq!(es.clusters.len(), 2);
        for (l, v) in es.pairs() {
            assert!(residual(&m, l, &v) < 1e-9);
        }
    }

    #[test]
    fn jordan_block_does_not_converge() {
        let mut m = Mat3::identity();
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(eigensystem_3x3(&m, &Tolerances::default()), Err(LinalgError::NonConvergence(_))));
    }

    #[test]
    fn discriminant_of_identity_is_zero() {
        assert!(goldman_discriminant(c(3.0, 0.0)).abs() < 1e-12);
        assert!(goldman_discriminant(c(1.0, 0.0)) < 0.0);
    }
}
