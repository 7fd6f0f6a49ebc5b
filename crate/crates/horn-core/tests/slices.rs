use horn_core::isometry::{AnglePair, Layer};
use horn_core::slice::{rasterize, render_slice, wall_segments, SliceRaster, SliceSpec};

const P4: u8 = 1;
const P6: u8 = 2;
const P8: u8 = 4;

fn counts(r: &SliceRaster) -> [usize; 3] {
    Layer::ALL.map(|l| r.component_count(l))
}

#[test]
fn symmetric_slice() {
    let r = rasterize(&SliceSpec::symmetric());
    assert_eq!(counts(&r), [5, 3, 5]);
}

#[test]
fn fixed_slices() {
    let p = AnglePair::pi_frac;

    let r = rasterize(&SliceSpec::fixed(p(5, 4, 1, 2), p(11, 6, 1, 2)));
    assert_eq!(r.component_count(Layer::One), 6);
    assert!(r.has_polytope(P6) && !r.has_polytope(P4) && !r.has_polytope(P8));

    let r = rasterize(&SliceSpec::fixed(p(6, 5, 4, 5), p(1, 1, 1, 2)));
    assert_eq!(r.component_count(Layer::Omega), 4);
    assert_eq!(r.component_count(Layer::One), 3);

    let r = rasterize(&SliceSpec::fixed(p(11, 6, 5, 3), p(5, 3, 4, 3)));
    assert_eq!(r.component_count(Layer::OmegaSq), 8);
    assert!(r.has_polytope(P8) && !r.has_polytope(P4) && !r.has_polytope(P6));

    let r = rasterize(&SliceSpec::fixed(p(31, 16, 3, 2), p(31, 16, 1, 1)));
    assert_eq!(r.component_count(Layer::One), 2);
    assert_eq!(r.component_count(Layer::OmegaSq), 6);
    assert!(r.overlap(P6 | P8));
}

#[test]
fn rendering_is_deterministic() {
    let spec = SliceSpec::symmetric().with_resolution(120);
    let svg = render_slice(&spec);
    assert_eq!(svg, render_slice(&spec));
    assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"));
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn segment_endpoints_lie_on_their_walls() {
    let spec = SliceSpec::fixed(AnglePair::pi_frac(6, 5, 4, 5), AnglePair::pi_frac(1, 1, 1, 2));
    let px = 2.0 * std::f64::consts::PI / spec.resolution as f64;
    for seg in wall_segments(&spec) {
        for end in [seg.start, seg.end] {
            let d = seg.line.at(end.0, end.1).abs() / seg.line.grad_norm();
            assert!(d <= 0.5 * px, "{} endpoint off its line by {d}", seg.wall);
        }
    }
}
