//! The five solution polytopes, the 28 cells of the three layers, and membership queries.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use serde::{Serialize, Serializer};

use crate::angle::Angle;
use crate::isometry::{psi, AnglePair, ClassTriple, Layer};
use crate::walls::{active_walls_at, linear_forms, Constraint, Form, Ijk, LinearFormValues, Wall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PolytopeId {
    P4Main,
    P4Spike,
    P6,
    P8Main,
    P8Spike,
}

impl PolytopeId {
    pub const ALL: [PolytopeId; 5] =
        [PolytopeId::P4Main, PolytopeId::P4Spike, PolytopeId::P6, PolytopeId::P8Main, PolytopeId::P8Spike];

    pub fn layer(self) -> Layer {
        match self {
            PolytopeId::P4Main | PolytopeId::P4Spike => Layer::Omega,
            PolytopeId::P6 => Layer::One,
            PolytopeId::P8Main | PolytopeId::P8Spike => Layer::OmegaSq,
        }
    }

    /// Image under ψ.
    pub fn mirror(self) -> PolytopeId {
        match self {
            PolytopeId::P4Main => PolytopeId::P8Main,
            PolytopeId::P4Spike => PolytopeId::P8Spike,
            PolytopeId::P6 => PolytopeId::P6,
            PolytopeId::P8Main => PolytopeId::P4Main,
            PolytopeId::P8Spike => PolytopeId::P4Spike,
        }
    }

    /// Strict inequalities whose conjunction is this polytope.
    pub fn system(self) -> Vec<Constraint> {
        use Constraint as C;
        let h = |s: &str| Form::H(s.parse().unwrap());
        match self {
            PolytopeId::P4Spike => vec![C::below(h("222"), -4)],
            PolytopeId::P4Main => vec![
                C::below(Form::Sum, 4),
                C::below(h("122"), 2),
                C::below(h("212"), 2),
                C::below(h("221"), 2),
                C::above(h("111"), 2),
            ],
            PolytopeId::P6 => vec![C::below(h("222"), 0), C::above(h("111"), 6)],
            PolytopeId::P8Spike => vec![C::above(h("111"), 10)],
            PolytopeId::P8Main => vec![
                C::above(Form::Sum, 8),
                C::above(h("211"), 4),
                C::above(h("121"), 4),
                C::above(h("112"), 4),
                C::below(h("222"), 4),
            ],
        }
    }

    pub fn contains_strict(self, v: &LinearFormValues) -> bool {
        self.system().iter().all(|c| c.holds_strict(v))
    }

    pub fn contains_closed(self, v: &LinearFormValues, tol: f64) -> bool {
        self.system().iter().all(|c| c.holds_closed(v, tol))
    }
}

impl fmt::Display for PolytopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolytopeId::P4Main => "P4_main",
            PolytopeId::P4Spike => "P4_spike",
            PolytopeId::P6 => "P6",
            PolytopeId::P8Main => "P8_main",
            PolytopeId::P8Spike => "P8_spike",
        };
        f.write_str(s)
    }
}

/// Cell label within its layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    /// Signs of the three interior hyperbolic forms against the layer's level, `true` meaning `>`.
    Signs([bool; 3]),
    /// The component cut out by the single spike inequality.
    Spike,
    /// Layer-1 cell bounded by the interior wall `H_ijk = 0`.
    Corner(Ijk),
    Plus,
    Minus,
    /// Cells of the complement; `None` when the complement is a single cell.
    Complement(Option<u8>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub layer: Layer,
    pub kind: CellKind,
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.layer {
            Layer::Omega => 4,
            Layer::One => 6,
            Layer::OmegaSq => 8,
        };
        let sup = match self.kind {
            CellKind::Signs(s) => s.iter().map(|&p| if p { '+' } else { '-' }).collect(),
            CellKind::Spike if self.layer == Layer::OmegaSq => "+".to_string(),
            CellKind::Spike => "-".to_string(),
            CellKind::Corner(x) => x.to_string(),
            CellKind::Plus => "+".to_string(),
            CellKind::Minus => "-".to_string(),
            CellKind::Complement(Some(k)) => format!("c,{k}"),
            CellKind::Complement(None) => "c".to_string(),
        };
        write!(f, "C_{{{level}pi}}^{{{sup}}}")
    }
}

impl Serialize for CellId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    pub id: CellId,
    pub layer: Layer,
    pub full: bool,
    /// Disjunction of conjunctions of strict inequalities.
    pub system: Vec<Vec<Constraint>>,
}

impl CellRecord {
    pub fn contains(&self, v: &LinearFormValues) -> bool {
        self.system.iter().any(|conj| conj.iter().all(|c| c.holds_strict(v)))
    }

    pub fn name(&self) -> String {
        self.id.to_string()
    }
}

fn h(s: &str) -> Form {
    Form::H(s.parse().unwrap())
}

fn build_cells() -> Vec<CellRecord> {
    use Constraint as C;
    let mut out = Vec::with_capacity(28);
    let rec = |layer, kind, full, system| CellRecord { id: CellId { layer, kind }, layer, full, system };
    let sign_patterns = [
        [false, false, false],
        [false, false, true],
        [false, true, false],
        [true, false, false],
        [false, true, true],
        [true, false, true],
        [true, true, false],
        [true, true, true],
    ];

    let p4 = PolytopeId::P4Main.system();
    for s in sign_patterns {
        let mut sys = p4.clone();
        for (form, up) in ["211", "121", "112"].iter().zip(s) {
            sys.push(if up { C::above(h(form), 2) } else { C::below(h(form), 2) });
        }
        out.push(rec(Layer::Omega, CellKind::Signs(s), true, vec![sys]));
    }
    out.push(rec(
        Layer::Omega,
        CellKind::Spike,
        true,
        PolytopeId::P4Spike.system().into_iter().map(|c| vec![c]).collect(),
    ));
    let spike_out = C::above(h("222"), -4);
    out.push(rec(
        Layer::Omega,
        CellKind::Complement(Some(1)),
        false,
        vec![
            vec![spike_out, C::above(Form::Sum, 4)],
            vec![spike_out, C::above(h("122"), 2)],
            vec![spike_out, C::above(h("212"), 2)],
            vec![spike_out, C::above(h("221"), 2)],
        ],
    ));
    out.push(rec(Layer::Omega, CellKind::Complement(Some(2)), false, vec![vec![C::below(h("111"), 2)]]));

    let p6 = PolytopeId::P6.system();
    for (x, xbar) in [("221", "112"), ("212", "121"), ("122", "211")] {
        let mut sys = p6.clone();
        sys.extend([C::below(h(x), 0), C::above(h(xbar), 6)]);
        out.push(rec(Layer::One, CellKind::Corner(x.parse().unwrap()), true, vec![sys]));
    }
    let mut plus = p6.clone();
    plus.extend([C::above(Form::Sum, 6), C::above(h("221"), 0), C::above(h("212"), 0), C::above(h("122"), 0)]);
    out.push(rec(Layer::One, CellKind::Plus, true, vec![plus]));
    let mut minus = p6.clone();
    minus.extend([C::below(Form::Sum, 6), C::below(h("112"), 6), C::below(h("121"), 6), C::below(h("211"), 6)]);
    out.push(rec(Layer::One, CellKind::Minus, true, vec![minus]));
    out.push(rec(
        Layer::One,
        CellKind::Complement(None),
        false,
        vec![vec![C::above(h("222"), 0)], vec![C::below(h("111"), 6)]],
    ));

    let p8 = PolytopeId::P8Main.system();
    for s in sign_patterns {
        let mut sys = p8.clone();
        for (form, up) in ["122", "212", "221"].iter().zip(s) {
            sys.push(if up { C::above(h(form), 4) } else { C::below(h(form), 4) });
        }
        out.push(rec(Layer::OmegaSq, CellKind::Signs(s), true, vec![sys]));
    }
    out.push(rec(Layer::OmegaSq, CellKind::Spike, true, vec![PolytopeId::P8Spike.system()]));
    let spike_out = C::below(h("111"), 10);
    out.push(rec(
        Layer::OmegaSq,
        CellKind::Complement(Some(1)),
        false,
        vec![
            vec![spike_out, C::below(Form::Sum, 8)],
            vec![spike_out, C::below(h("211"), 4)],
            vec![spike_out, C::below(h("121"), 4)],
            vec![spike_out, C::below(h("112"), 4)],
        ],
    ));
    out.push(rec(Layer::OmegaSq, CellKind::Complement(Some(2)), false, vec![vec![C::above(h("222"), 4)]]));
    out
}

static CELLS: LazyLock<Vec<CellRecord>> = LazyLock::new(build_cells);

/// The 28 cells: 11 in layer ω, 6 in layer 1, 11 in layer ω².
pub fn cell_table() -> &'static [CellRecord] {
    &CELLS
}

pub fn cell_record(id: CellId) -> Option<&'static CellRecord> {
    cell_table().iter().find(|r| r.id == id)
}

pub fn find_cell(name: &str) -> Option<&'static CellRecord> {
    cell_table().iter().find(|r| r.name() == name)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellLocation {
    Cell(CellId),
    OnWall(Vec<&'static Wall>),
    /// No strict system matched; would indicate a gap in the cell table.
    Unresolvable,
}

impl CellLocation {
    pub fn cell(&self) -> Option<CellId> {
        match self {
            CellLocation::Cell(c) => Some(*c),
            _ => None,
        }
    }
}

impl Serialize for CellLocation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(1))?;
        match self {
            CellLocation::Cell(c) => m.serialize_entry("cell", &c.to_string())?,
            CellLocation::OnWall(ws) => {
                m.serialize_entry("on_wall", &ws.iter().map(|w| w.name()).collect::<Vec<_>>())?
            }
            CellLocation::Unresolvable => m.serialize_entry("unresolvable", &true)?,
        }
        m.end()
    }
}

pub fn cell_id(t: &ClassTriple, layer: Layer, tol: f64) -> CellLocation {
    cell_id_at(&linear_forms(t), layer, tol)
}

pub fn cell_id_at(v: &LinearFormValues, layer: Layer, tol: f64) -> CellLocation {
    let on: Vec<&Wall> = active_walls_at(v, tol).into_iter().map(|(w, _)| w).filter(|w| w.layer == layer).collect();
    if !on.is_empty() {
        return CellLocation::OnWall(on);
    }
    let mut hits = cell_table().iter().filter(|r| r.layer == layer && r.contains(v));
    match (hits.next(), hits.next()) {
        (Some(r), None) => CellLocation::Cell(r.id),
        _ => CellLocation::Unresolvable,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub interior: bool,
    pub member: bool,
    pub layers: Vec<Layer>,
    pub polytopes: Vec<PolytopeId>,
    pub cell_per_layer: BTreeMap<String, CellLocation>,
    pub boundary_caveat: bool,
    pub forms: LinearFormValues,
}

impl MembershipReport {
    pub fn in_polytope(&self, p: PolytopeId) -> bool {
        self.polytopes.contains(&p)
    }

    pub fn cell(&self, layer: Layer) -> &CellLocation {
        &self.cell_per_layer[layer.as_str()]
    }
}

/// Closure membership with the strict systems relaxed by `tol`.
pub fn polytope_member(t: &ClassTriple, tol: f64) -> MembershipReport {
    let v = linear_forms(t);
    let polytopes: Vec<PolytopeId> = PolytopeId::ALL.into_iter().filter(|p| p.contains_closed(&v, tol)).collect();
    let mut layers: Vec<Layer> = Vec::new();
    for l in Layer::ALL {
        if polytopes.iter().any(|p| p.layer() == l) {
            layers.push(l);
        }
    }
    let cell_per_layer = Layer::ALL.iter().map(|&l| (l.as_str().to_string(), cell_id_at(&v, l, tol))).collect();
    let interior = t.is_interior();
    MembershipReport {
        interior,
        member: !polytopes.is_empty(),
        layers,
        polytopes,
        cell_per_layer,
        boundary_caveat: !interior,
        forms: v,
    }
}

/// Closure membership only, without cell lookup.
pub fn in_solution_set(t: &ClassTriple, tol: f64) -> bool {
    let v = linear_forms(t);
    PolytopeId::ALL.iter().any(|p| p.contains_closed(&v, tol))
}

/// Surjectivity of the momentum map for the pair `(α, β)`.
pub fn surjective_pair(alpha: &AnglePair, beta: &AnglePair) -> bool {
    let s1 = alpha.a1() + beta.a1();
    let s2 = alpha.a2() + beta.a2();
    let first = s1.scale(2) - s2;
    let second = s2.scale(2) - s1;
    first.cmp_value(Angle::pi_times(6)).is_ge() && second.cmp_value(Angle::pi_times(-2)).is_le()
}

/// Whether memberships of `t` and `ψ(t)` correspond under P4 ↔ P8.
pub fn psi_consistency(t: &ClassTriple, tol: f64) -> bool {
    let a = polytope_member(t, tol);
    let b = polytope_member(&psi(t), tol);
    let mut mapped: Vec<PolytopeId> = a.polytopes.iter().map(|p| p.mirror()).collect();
    mapped.sort();
    let mut other = b.polytopes.clone();
    other.sort();
    mapped == other
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n1: i64, d1: i64, n2: i64, d2: i64) -> ClassTriple {
        ClassTriple::uniform(AnglePair::pi_frac(n1, d1, n2, d2))
    }

    #[test]
    fn table_counts() {
        let t = cell_table();
        assert_eq!(t.len(), 28);
        assert_eq!(t.iter().filter(|r| r.full).count(), 23);
        let empty: Vec<String> = t.iter().filter(|r| !r.full).map(|r| r.name()).collect();
        assert_eq!(empty, ["C_{4pi}^{c,1}", "C_{4pi}^{c,2}", "C_{6pi}^{c}", "C_{8pi}^{c,1}", "C_{8pi}^{c,2}"]);
        for (l, n) in [(Layer::Omega, 11), (Layer::One, 6), (Layer::OmegaSq, 11)] {
            assert_eq!(t.iter().filter(|r| r.layer == l).count(), n);
        }
    }

    #[test]
    fn membership_examples() {
        let r = polytope_member(&uniform(7, 4, 3, 4), 1e-9);
        assert!(r.member);
        assert_eq!(r.polytopes, vec![PolytopeId::P6]);
        assert_eq!(r.layers, vec![Layer::One]);
        assert_eq!(r.cell(Layer::One).cell().unwrap().to_string(), "C_{6pi}^{+}");

        let r = polytope_member(&uniform(1, 4, 1, 16), 1e-9);
        assert!(!r.member);
        assert_eq!(r.cell(Layer::Omega).cell().unwrap().to_string(), "C_{4pi}^{c,2}");

        let r = polytope_member(&uniform(3, 2, 1, 2), 1e-9);
        assert!(r.member && r.in_polytope(PolytopeId::P6));
        assert!(matches!(r.cell(Layer::One), CellLocation::OnWall(w) if w.len() == 1 && w[0].name() == "Sigma_6pi"));
    }

    #[test]
    fn on_wall_intersection() {
        let t = ClassTriple::new(
            AnglePair::new(Angle::pi_frac(3, 4), Angle::pi_frac(1, 2)),
            AnglePair::pi_frac(2, 3, 1, 3),
            AnglePair::pi_frac(2, 3, 1, 3),
        );
        match cell_id(&t, Layer::Omega, 1e-9) {
            CellLocation::OnWall(w) => {
                let names: Vec<String> = w.iter().map(|w| w.name()).collect();
                assert_eq!(names, ["H_112=2pi", "H_121=2pi"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn surjective_examples() {
        let near = AnglePair::from_radians(2.0 * std::f64::consts::PI - 0.01, 0.0);
        assert!(surjective_pair(&near, &near));
        assert!(!surjective_pair(&AnglePair::pi_frac(5, 4, 1, 2), &AnglePair::pi_frac(11, 6, 1, 2)));
        let zero = AnglePair::pi_frac(0, 1, 0, 1);
        assert!(!surjective_pair(&zero, &zero));
    }

    #[test]
    fn psi_examples() {
        assert!(psi_consistency(&uniform(7, 4, 3, 4), 1e-9));
        assert!(polytope_member(&uniform(5, 4, 1, 4), 1e-9).in_polytope(PolytopeId::P6));
        assert!(psi_consistency(&uniform(1, 1, 1, 1), 1e-9));
    }
}
