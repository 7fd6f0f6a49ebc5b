//! Linear forms S, σ_ijk, H_ijk and the catalog of reducible walls and facets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize, Serializer};

use crate::angle::Angle;
use crate::isometry::{ClassTriple, Layer};

/// An index triple `(i, j, k) ∈ {1, 2}³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ijk(u8);

impl Ijk {
    /// Lexicographic order 111, 112, …, 222.
    pub const ALL: [Ijk; 8] = [Ijk(0), Ijk(1), Ijk(2), Ijk(3), Ijk(4), Ijk(5), Ijk(6), Ijk(7)];

    pub fn new(i: u8, j: u8, k: u8) -> Option<Ijk> {
        if [i, j, k].iter().all(|x| (1..=2).contains(x)) {
            Some(Ijk((i - 1) * 4 + (j - 1) * 2 + (k - 1)))
        } else {
            None
        }
    }

    /// Shorthand for literal indices such as `Ijk::of(2, 1, 1)`.
    pub fn of(i: u8, j: u8, k: u8) -> Ijk {
        Ijk::new(i, j, k).expect("indices must be 1 or 2")
    }

    pub fn i(self) -> u8 {
        (self.0 >> 2) + 1
    }

    pub fn j(self) -> u8 {
        ((self.0 >> 1) & 1) + 1
    }

    pub fn k(self) -> u8 {
        (self.0 & 1) + 1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// `(ī, j̄, k̄)`.
    pub fn bar(self) -> Ijk {
        Ijk(7 - self.0)
    }

    /// `(k̄, j̄, ī)`: the index that ψ exchanges with this one.
    pub fn psi_partner(self) -> Ijk {
        let b = self.bar();
        Ijk::of(b.k(), b.j(), b.i())
    }
}

impl fmt::Display for Ijk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.i(), self.j(), self.k())
    }
}

impl FromStr for Ijk {
    type Err = String;
    fn from_str(s: &str) -> Result<Ijk, String> {
        let d: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        match d.as_slice() {
            [i, j, k] => Ijk::new(*i, *j, *k).ok_or_else(|| format!("invalid index triple {s:?}")),
            _ => Err(format!("invalid index triple {s:?}")),
        }
    }
}

impl TryFrom<String> for Ijk {
    type Error = String;
    fn try_from(s: String) -> Result<Ijk, String> {
        s.parse()
    }
}

impl From<Ijk> for String {
    fn from(x: Ijk) -> String {
        x.to_string()
    }
}

/// Evaluated linear forms at a class triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFormValues {
    pub s: Angle,
    pub sigma: [Angle; 8],
    pub h: [Angle; 8],
}

impl LinearFormValues {
    pub fn sigma(&self, x: Ijk) -> Angle {
        self.sigma[x.index()]
    }

    pub fn h(&self, x: Ijk) -> Angle {
        self.h[x.index()]
    }
}

impl Serialize for LinearFormValues {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            #[serde(rename = "S")]
            s: f64,
            sigma: BTreeMap<String, f64>,
            #[serde(rename = "H")]
            h: BTreeMap<String, f64>,
        }
        let map = |v: &[Angle; 8]| Ijk::ALL.iter().map(|x| (x.to_string(), v[x.index()].to_radians())).collect();
        Out { s: self.s.to_radians(), sigma: map(&self.sigma), h: map(&self.h) }.serialize(s)
    }
}

pub fn linear_forms(t: &ClassTriple) -> LinearFormValues {
    let a = t.angles();
    let s: Angle = a.iter().copied().sum();
    let mut sigma = [Angle::ZERO; 8];
    for x in Ijk::ALL {
        sigma[x.index()] = a[(x.i() - 1) as usize] + a[2 + (x.j() - 1) as usize] + a[4 + (x.k() - 1) as usize];
    }
    let mut h = [Angle::ZERO; 8];
    for x in Ijk::ALL {
        h[x.index()] = sigma[x.index()].scale(2) - sigma[x.bar().index()];
    }
    LinearFormValues { s, sigma, h }
}

/// One of the linear forms on T(G)³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Form {
    Sum,
    Sigma(Ijk),
    H(Ijk),
}

impl Form {
    /// Integer coefficients on `(α1, α2, β1, β2, γ1, γ2)`.
    pub fn coefficients(self) -> [i64; 6] {
        let sigma = |x: Ijk| {
            let mut c = [0; 6];
            c[(x.i() - 1) as usize] = 1;
            c[2 + (x.j() - 1) as usize] = 1;
            c[4 + (x.k() - 1) as usize] = 1;
            c
        };
        match self {
            Form::Sum => [1; 6],
            Form::Sigma(x) => sigma(x),
            Form::H(x) => {
                let (p, q) = (sigma(x), sigma(x.bar()));
                std::array::from_fn(|i| 2 * p[i] - q[i])
            }
        }
    }

    pub fn eval(self, v: &LinearFormValues) -> Angle {
        match self {
            Form::Sum => v.s,
            Form::Sigma(x) => v.sigma(x),
            Form::H(x) => v.h(x),
        }
    }

    pub fn eval_radians(self, x: &[f64; 6]) -> f64 {
        self.coefficients().iter().zip(x).map(|(c, v)| *c as f64 * v).sum()
    }

    pub fn gradient_norm(self) -> f64 {
        (self.coefficients().iter().map(|c| c * c).sum::<i64>() as f64).sqrt()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Sum => write!(f, "S"),
            Form::Sigma(x) => write!(f, "sigma_{x}"),
            Form::H(x) => write!(f, "H_{x}"),
        }
    }
}

impl TryFrom<String> for Form {
    type Error = String;
    fn try_from(s: String) -> Result<Form, String> {
        if s == "S" {
            Ok(Form::Sum)
        } else if let Some(r) = s.strip_prefix("sigma_") {
            r.parse().map(Form::Sigma)
        } else if let Some(r) = s.strip_prefix("H_") {
            r.parse().map(Form::H)
        } else {
            Err(format!("unknown form {s:?}"))
        }
    }
}

impl From<Form> for String {
    fn from(f: Form) -> String {
        f.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

/// `form < level·π` or `form > level·π`; closed or strict depending on the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub form: Form,
    pub bound: Bound,
    pub level_over_pi: i64,
}

impl Constraint {
    pub const fn below(form: Form, level_over_pi: i64) -> Constraint {
        Constraint { form, bound: Bound::Below, level_over_pi }
    }

    pub const fn above(form: Form, level_over_pi: i64) -> Constraint {
        Constraint { form, bound: Bound::Above, level_over_pi }
    }

    /// Signed slack: positive when the strict inequality holds.
    pub fn slack(&self, v: &LinearFormValues) -> f64 {
        let r = self.form.eval(v).residual(self.level_over_pi);
        match self.bound {
            Bound::Below => -r,
            Bound::Above => r,
        }
    }

    pub fn slack_radians(&self, x: &[f64; 6]) -> f64 {
        let r = self.form.eval_radians(x) - self.level_over_pi as f64 * std::f64::consts::PI;
        match self.bound {
            Bound::Below => -r,
            Bound::Above => r,
        }
    }

    pub fn holds_strict(&self, v: &LinearFormValues) -> bool {
        self.slack(v) > 0.0
    }

    /// Closed version widened by `tol`.
    pub fn holds_closed(&self, v: &LinearFormValues, tol: f64) -> bool {
        self.slack(v) >= -tol
    }

    pub fn negated(&self) -> Constraint {
        let bound = match self.bound {
            Bound::Below => Bound::Above,
            Bound::Above => Bound::Below,
        };
        Constraint { bound, ..*self }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::Above => ">",
        };
        write!(f, "{} {} {}", self.form, op, Angle::pi_times(self.level_over_pi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    Spherical,
    Hyperbolic,
}

/// A truncated hyperplane `{form = level·π}` cut out by closed truncation inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub kind: WallKind,
    pub ijk: Option<Ijk>,
    pub level_over_pi: i64,
    pub truncation: Vec<Constraint>,
    pub layer: Layer,
    pub interior: bool,
}

impl Wall {
    pub fn form(&self) -> Form {
        match (self.kind, self.ijk) {
            (WallKind::Hyperbolic, Some(x)) => Form::H(x),
            _ => Form::Sum,
        }
    }

    /// `form − level·π`.
    pub fn residual(&self, v: &LinearFormValues) -> f64 {
        self.form().eval(v).residual(self.level_over_pi)
    }

    pub fn truncation_holds(&self, v: &LinearFormValues, tol: f64) -> bool {
        self.truncation.iter().all(|c| c.holds_closed(v, tol))
    }

    pub fn is_active(&self, v: &LinearFormValues, tol: f64) -> bool {
        self.residual(v).abs() <= tol && self.truncation_holds(v, tol)
    }

    /// Layer predicted by the level alone: `e^{−iLπ/3}` for spheres, `e^{iLπ/3}` for hyperbolic walls.
    pub fn layer_from_level(&self) -> Layer {
        match self.kind {
            WallKind::Spherical => Layer::from_third(-self.level_over_pi / 2),
            WallKind::Hyperbolic => Layer::from_third(self.level_over_pi / 2),
        }
    }

    pub fn name(&self) -> String {
        match (self.kind, self.ijk) {
            (WallKind::Hyperbolic, Some(x)) => format!("H_{x}={}", Angle::pi_times(self.level_over_pi)),
            _ => format!("Sigma_{}", Angle::pi_times(self.level_over_pi)),
        }
    }

    /// Same equation and truncation (layer and interior flag are derived data).
    pub fn same_locus(&self, other: &Wall) -> bool {
        let mut a = self.truncation.clone();
        let mut b = other.truncation.clone();
        let key = |c: &Constraint| (c.form.to_string(), c.level_over_pi, c.bound == Bound::Below);
        a.sort_by_key(key);
        b.sort_by_key(key);
        self.kind == other.kind && self.ijk == other.ijk && self.level_over_pi == other.level_over_pi && a == b
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn sphere(level: i64, truncation: Vec<Constraint>, layer: Layer, interior: bool) -> Wall {
    Wall { kind: WallKind::Spherical, ijk: None, level_over_pi: level, truncation, layer, interior }
}

fn hyper(x: Ijk, level: i64, truncation: Option<Constraint>, layer: Layer, interior: bool) -> Wall {
    Wall {
        kind: WallKind::Hyperbolic,
        ijk: Some(x),
        level_over_pi: level,
        truncation: truncation.into_iter().collect(),
        layer,
        interior,
    }
}

fn parse_ijks(s: &str) -> Vec<Ijk> {
    s.split(' ').map(|x| x.parse().unwrap()).collect()
}

fn build_catalog() -> Vec<Wall> {
    use Layer::*;
    let sig = |x: Ijk| Form::Sigma(x);
    let mut w = Vec::with_capacity(27);

    w.push(sphere(
        4,
        vec![
            Constraint::below(sig(Ijk::of(1, 1, 1)), 4),
            Constraint::below(sig(Ijk::of(1, 2, 2)), 2),
            Constraint::below(sig(Ijk::of(2, 1, 2)), 2),
            Constraint::below(sig(Ijk::of(2, 2, 1)), 2),
        ],
        Omega,
        false,
    ));
    w.push(hyper(Ijk::of(2, 2, 2), -4, None, Omega, false));
    for x in parse_ijks("221 212 122 112 121 211 111") {
        let interior = matches!(x.to_string().as_str(), "211" | "121" | "112");
        w.push(hyper(x, 2, Some(Constraint::below(sig(x.bar()), 2)), Omega, interior));
    }

    w.push(sphere(
        6,
        vec![
            Constraint::below(sig(Ijk::of(2, 2, 2)), 2),
            Constraint::below(sig(Ijk::of(1, 1, 2)), 4),
            Constraint::below(sig(Ijk::of(1, 2, 1)), 4),
            Constraint::below(sig(Ijk::of(2, 1, 1)), 4),
        ],
        One,
        true,
    ));
    for x in parse_ijks("222 221 212 122") {
        let interior = x != Ijk::of(2, 2, 2);
        w.push(hyper(x, 0, Some(Constraint::above(sig(x.bar()), 4)), One, interior));
    }
    for x in parse_ijks("111 112 121 211") {
        let interior = x != Ijk::of(1, 1, 1);
        w.push(hyper(x, 6, Some(Constraint::below(sig(x.bar()), 2)), One, interior));
    }

    w.push(sphere(
        8,
        vec![
            Constraint::below(sig(Ijk::of(1, 1, 1)), 6),
            Constraint::below(sig(Ijk::of(1, 2, 2)), 4),
            Constraint::below(sig(Ijk::of(2, 1, 2)), 4),
            Constraint::below(sig(Ijk::of(2, 2, 1)), 4),
        ],
        OmegaSq,
        false,
    ));
    w.push(hyper(Ijk::of(1, 1, 1), 10, None, OmegaSq, false));
    for x in parse_ijks("222 221 212 122 112 121 211") {
        let interior = matches!(x.to_string().as_str(), "122" | "212" | "221");
        w.push(hyper(x, 4, Some(Constraint::above(sig(x.bar()), 4)), OmegaSq, interior));
    }
    w
}

static CATALOG: LazyLock<Vec<Wall>> = LazyLock::new(build_catalog);

/// The 27 reducible walls: 9 per layer, spherical wall first in each layer.
pub fn wall_catalog() -> &'static [Wall] {
    &CATALOG
}

/// Walls whose equation and truncation hold within `tol`, with the equation residual.
pub fn active_walls(t: &ClassTriple, tol: f64) -> Vec<(&'static Wall, f64)> {
    active_walls_at(&linear_forms(t), tol)
}

pub fn active_walls_at(v: &LinearFormValues, tol: f64) -> Vec<(&'static Wall, f64)> {
    wall_catalog().iter().filter(|w| w.is_active(v, tol)).map(|w| (w, w.residual(v))).collect()
}

/// Default band: exact inputs are compared exactly up to 1e-9, floats at 1e-7.
pub fn default_wall_tol(t: &ClassTriple) -> f64 {
    if t.is_exact() {
        1e-9
    } else {
        1e-7
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetType {
    Type1,
    Type2,
    Type3,
    Type4,
    Unclassified,
}

/// `T_ijk(m, n) = {σ_ijk = 2mπ, σ_ī = 2nπ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    pub ijk: Ijk,
    pub m: i64,
    pub n: i64,
    pub facet_type: FacetType,
    pub sphere_level_over_pi: i64,
    pub h_level_over_pi: i64,
    pub hbar_level_over_pi: i64,
    /// Catalog walls carrying the three defining equations (fewer when a level is not a wall level).
    pub walls: Vec<&'static Wall>,
}

fn classify_facet(x: Ijk, m: i64, n: i64) -> FacetType {
    let name = x.to_string();
    let s = name.as_str();
    match (s, m, n) {
        ("122" | "212" | "221" | "211" | "121" | "112", 1, 1) => FacetType::Type1,
        ("211" | "121" | "112" | "122" | "212" | "221", 2, 2) => FacetType::Type2,
        ("111", 2, 1) | ("222", 1, 2) => FacetType::Type3,
        ("211" | "121" | "112", 2, 1) | ("122" | "212" | "221", 1, 2) => FacetType::Type4,
        _ => FacetType::Unclassified,
    }
}

pub fn facet_of(ijk: Ijk, m: i64, n: i64) -> Facet {
    let sphere_level = 2 * (m + n);
    let h_level = 2 * (2 * m - n);
    let hbar_level = 2 * (2 * n - m);
    let walls = wall_catalog()
        .iter()
        .filter(|w| match (w.kind, w.ijk) {
            (WallKind::Spherical, _) => w.level_over_pi == sphere_level,
            (WallKind::Hyperbolic, Some(x)) => {
                (x == ijk && w.level_over_pi == h_level) || (x == ijk.bar() && w.level_over_pi == hbar_level)
            }
            _ => false,
        })
        .collect();
    Facet {
        ijk,
        m,
        n,
        facet_type: classify_facet(ijk, m, n),
        sphere_level_over_pi: sphere_level,
        h_level_over_pi: h_level,
        hbar_level_over_pi: hbar_level,
        walls,
    }
}

/// Facet given by levels `H_ijk = 2·n_h·π`, `H_ī = 2·n_hbar·π`, `S = 2·n_s·π`.
pub fn facet_by_levels(ijk: Ijk, n_h: i64, n_hbar: i64, n_s: i64) -> Option<Facet> {
    let (m3, n3) = (2 * n_h + n_hbar, n_h + 2 * n_hbar);
    if m3 % 3 != 0 || n3 % 3 != 0 || m3 / 3 + n3 / 3 != n_s {
        return None;
    }
    Some(facet_of(ijk, m3 / 3, n3 / 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::AnglePair;

    fn pf(n: i64, d: i64) -> Angle {
        Angle::pi_frac(n, d)
    }

    #[test]
    fn ijk_round_trip() {
        for x in Ijk::ALL {
            assert_eq!(x.to_string().parse::<Ijk>().unwrap(), x);
            assert_eq!(x.bar().bar(), x);
        }
        assert_eq!(Ijk::of(1, 2, 2).bar(), Ijk::of(2, 1, 1));
        assert_eq!(Ijk::of(1, 1, 2).psi_partner(), Ijk::of(1, 2, 2));
        assert!("123".parse::<Ijk>().is_err());
    }

    #[test]
    fn forms_at_pi_pi() {
        let v = linear_forms(&ClassTriple::uniform(AnglePair::pi_frac(1, 1, 1, 1)));
        assert_eq!(v.s, Angle::pi_times(6));
        assert!(v.sigma.iter().all(|&x| x == Angle::pi_times(3)));
        assert!(v.h.iter().all(|&x| x == Angle::pi_times(3)));
    }

    #[test]
    fn forms_at_intersection_example() {
        let t = ClassTriple::new(
            AnglePair::new(pf(3, 4), pf(1, 2)),
            AnglePair::new(pf(2, 3), pf(1, 3)),
            AnglePair::new(pf(2, 3), pf(1, 3)),
        );
        let v = linear_forms(&t);
        assert_eq!(v.h(Ijk::of(1, 1, 2)), Angle::pi_times(2));
        assert_eq!(v.sigma(Ijk::of(2, 2, 1)), pf(3, 2));
        assert_eq!(v.h(Ijk::of(1, 2, 1)), Angle::pi_times(2));
        assert_eq!(v.sigma(Ijk::of(2, 1, 2)), pf(3, 2));
        let act: Vec<String> = active_walls(&t, 1e-9).iter().map(|(w, _)| w.name()).collect();
        assert_eq!(act, vec!["H_112=2pi", "H_121=2pi"]);
    }

    #[test]
    fn forms_at_zero() {
        let v = linear_forms(&ClassTriple::uniform(AnglePair::pi_frac(0, 1, 0, 1)));
        assert!(v.s.is_zero() && v.sigma.iter().all(|x| x.is_zero()) && v.h.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn coefficients_match_evaluation() {
        let t = ClassTriple::from_radians([5.0, 1.0, 4.0, 2.5, 3.0, 0.3]);
        let v = linear_forms(&t);
        let x = t.radians();
        for f in Ijk::ALL.iter().flat_map(|&x| [Form::Sigma(x), Form::H(x)]).chain([Form::Sum]) {
            assert!((f.eval(&v).to_radians() - f.eval_radians(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_counts() {
        let c = wall_catalog();
        assert_eq!(c.len(), 27);
        assert_eq!(c.iter().filter(|w| w.kind == WallKind::Hyperbolic).count(), 24);
        for l in Layer::ALL {
            assert_eq!(c.iter().filter(|w| w.layer == l).count(), 9);
        }
        for w in c {
            assert_eq!(w.layer, w.layer_from_level(), "{w}");
        }
    }

    #[test]
    fn active_on_sigma_six() {
        let t = ClassTriple::uniform(AnglePair::pi_frac(3, 2, 1, 2));
        let act: Vec<String> = active_walls(&t, 1e-9).iter().map(|(w, _)| w.name()).collect();
        assert_eq!(act, vec!["Sigma_6pi"]);
        let t = ClassTriple::uniform(AnglePair::pi_frac(1, 1, 1, 1));
        assert!(active_walls(&t, 1e-9).is_empty());
    }

    #[test]
    fn facet_examples() {
        assert_eq!(facet_of(Ijk::of(1, 2, 2), 1, 1).facet_type, FacetType::Type1);
        assert_eq!(facet_of(Ijk::of(1, 1, 1), 2, 1).facet_type, FacetType::Type3);
        assert_eq!(facet_of(Ijk::of(2, 1, 1), 2, 1).facet_type, FacetType::Type4);
        assert_eq!(facet_of(Ijk::of(1, 1, 1), 3, 0).facet_type, FacetType::Unclassified);
        let f = facet_by_levels(Ijk::of(1, 1, 1), 3, 0, 3).unwrap();
        assert_eq!((f.m, f.n, f.facet_type), (2, 1, FacetType::Type3));
        assert_eq!(f.walls.len(), 3);
        assert!(facet_by_levels(Ijk::of(1, 1, 1), 1, 0, 3).is_none());
    }

    #[test]
    fn wall_json_round_trip() {
        for w in wall_catalog() {
            let s = serde_json::to_string(w).unwrap();
            let back: Wall = serde_json::from_str(&s).unwrap();
            assert_eq!(&back, w);
        }
        let s = serde_json::to_value(&wall_catalog()[2]).unwrap();
        assert_eq!(s["ijk"], "221");
        assert_eq!(s["level_over_pi"], 2);
        assert_eq!(s["layer"], "omega");
    }
}
