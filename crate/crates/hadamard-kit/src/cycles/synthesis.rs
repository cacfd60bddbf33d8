//! Cycle synthesis from a winding prescription.
//!
//! Boxes carrying the same nonzero winding are dilated by eps, clipped to a
//! finite rho window, and their rectilinear union boundary is extracted on
//! the (rho, theta) cylinder. Boxes whose closure reaches 0 are closed off
//! by a full band just below the window whose bottom circle is discarded, so
//! the resulting profile winds around the 0 end; the same band (alone)
//! produces the extra small circle around 0 when the prescription at 0 is
//! not already supplied by the box boundaries. The union boundary is mapped
//! through (rho, theta) -> exp(rho + i theta) with arcs discretized finely
//! enough that chords keep clear of every forbidden region.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sets::{Arc, LogPolarBox, StarSet, ANGLE_TOL};

use super::{certify_with, compute_window, Cycle, Path, WindingSpec};

/// Knobs for cycle synthesis.
#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    /// Dilation radius; defaults to 80% of the prescription margin.
    pub eps: Option<f64>,
    /// Upper bound on the angular step of discretized arcs.
    pub max_arc_step: f64,
    /// Probes per box ring during internal certification.
    pub certify_ring: usize,
    /// Halvings of eps attempted when certification fails.
    pub retries: u32,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            eps: None,
            max_arc_step: std::f64::consts::PI / 64.0,
            certify_ring: 64,
            retries: 2,
        }
    }
}

const WINDOW_PAD: f64 = 2.0;
const BAND_HEIGHT: f64 = 0.5;

/// A finite rectangle on the cylinder.
#[derive(Debug, Clone, Copy)]
struct CylRect {
    rlo: f64,
    rhi: f64,
    arc: Arc,
}

/// Build a certified cycle realizing `spec`, encircling the boxes of
/// `around` (whose winding values are read off the prescription's probes).
pub fn synthesize_cycle(spec: &WindingSpec, around: &StarSet, eps: f64) -> Result<Cycle> {
    synthesize_cycle_with(spec, around, eps, &SynthesisOptions::default())
}

pub fn synthesize_cycle_with(
    spec: &WindingSpec,
    around: &StarSet,
    eps: f64,
    opts: &SynthesisOptions,
) -> Result<Cycle> {
    if !(eps > 0.0) {
        return Err(Error::NoMargin("eps must be positive".into()));
    }
    if eps > spec.margin * 2.0 {
        return Err(Error::NoMargin(format!(
            "eps {eps} exceeds twice the prescription margin {}",
            spec.margin
        )));
    }
    let mut eps = eps;
    let mut last = String::new();
    for _ in 0..=opts.retries {
        let cycle = build_once(spec, around, eps, opts)?;
        let report = certify_with(&cycle, spec, opts.certify_ring);
        if report.ok {
            return Ok(cycle);
        }
        last = format!(
            "{} probe violations at eps {eps:.3e} (first at {})",
            report.violations.len(),
            report.violations[0].probe
        );
        eps *= 0.5;
    }
    Err(Error::SynthesisFailed(last))
}

/// Shared cycle valid for every z in the compact K: the single-point set
/// z*S2^-1 is replaced by K*S2^-1.
pub fn shared_cycle(s1: &StarSet, s2: &StarSet, k: &StarSet) -> Result<Cycle> {
    let spec = super::shared_winding_spec(s1, s2, k)?;
    let mut around = s1.clone();
    around
        .boxes
        .extend(k.product(&s2.inverse())?.boxes.iter().copied());
    synthesize_cycle(&spec, &around, spec.margin * 0.8)
}

fn build_once(
    spec: &WindingSpec,
    around: &StarSet,
    eps: f64,
    opts: &SynthesisOptions,
) -> Result<Cycle> {
    let window = compute_window(spec.forbidden.iter(), WINDOW_PAD);

    // winding value of every box to encircle, read off the probe list
    let mut families: HashMap<i64, Vec<LogPolarBox>> = HashMap::new();
    for b in &around.boxes {
        let lambda = spec
            .probes
            .iter()
            .find(|p| {
                let (rho, theta) = crate::sets::cylinder_coords(p.point);
                b.distance(rho, theta) <= 1e-9
            })
            .map(|p| p.required)
            .ok_or_else(|| {
                Error::SynthesisFailed(format!(
                    "no probe determines the winding of box {b:?}"
                ))
            })?;
        families.entry(lambda).or_default().push(*b);
    }

    // requirement at the 0 end, read off probes below the window
    let zero_req = spec
        .probes
        .iter()
        .find(|p| p.point.norm().ln() < window.0 - 0.5)
        .map(|p| p.required)
        .unwrap_or(0);

    // every box reaching an end must be consistent with the end conventions
    for (lambda, boxes) in &families {
        for b in boxes {
            if b.reaches_zero() && *lambda != zero_req {
                return Err(Error::SynthesisFailed(format!(
                    "box reaching 0 carries winding {lambda} but 0 requires {zero_req}"
                )));
            }
            if b.reaches_inf() && *lambda != 0 {
                return Err(Error::SynthesisFailed(format!(
                    "box reaching inf carries winding {lambda}, the far field requires 0"
                )));
            }
        }
    }

    let band_bottom = window.0 - BAND_HEIGHT;
    let mut terms = Vec::new();
    let mut lambdas: Vec<i64> = families.keys().copied().collect();
    if zero_req != 0 && !lambdas.contains(&zero_req) {
        lambdas.push(zero_req);
    }
    lambdas.sort_unstable();

    for lambda in lambdas {
        if lambda == 0 {
            continue;
        }
        let mut rects: Vec<CylRect> = Vec::new();
        for b in families.get(&lambda).map(|v| v.as_slice()).unwrap_or(&[]) {
            let d = b.thicken(eps);
            rects.push(CylRect {
                rlo: d.rho_lo.max(window.0),
                rhi: d.rho_hi.min(window.1),
                arc: d.arc,
            });
        }
        if lambda == zero_req {
            rects.push(CylRect {
                rlo: band_bottom,
                rhi: window.0,
                arc: Arc::Full,
            });
        }
        if rects.is_empty() {
            continue;
        }
        let loops = union_boundary(&rects);
        for lp in loops {
            if lp.iter().all(|(rho, _)| (rho - band_bottom).abs() <= ANGLE_TOL) {
                continue; // open world below: the band's bottom circle is dropped
            }
            let path = discretize_loop(&lp, spec, eps, opts.max_arc_step)?;
            terms.push((path, lambda));
        }
    }
    Ok(Cycle::from_paths(terms))
}

/// Subdivide arcs so that chord sagitta stays below a quarter of the local
/// clearance to the forbidden regions.
fn discretize_loop(
    waypoints: &[(f64, f64)],
    spec: &WindingSpec,
    eps: f64,
    max_step: f64,
) -> Result<Path> {
    let mut points: Vec<Complex64> = Vec::new();
    let n = waypoints.len();
    for i in 0..n - 1 {
        let (r0, t0) = waypoints[i];
        let (r1, t1) = waypoints[i + 1];
        points.push(Complex64::from_polar(r0.exp(), t0));
        if (r0 - r1).abs() > ANGLE_TOL {
            continue; // radial edge: exact chord
        }
        let span = t1 - t0;
        if span.abs() <= ANGLE_TOL {
            continue;
        }
        let clearance = edge_clearance(spec, r0, t0, t1).max(eps.min(1e-3) * 0.25);
        let step = max_step.min((2.0 * clearance).sqrt());
        let pieces = (span.abs() / step).ceil() as usize;
        for k in 1..pieces {
            let t = t0 + span * k as f64 / pieces as f64;
            points.push(Complex64::from_polar(r0.exp(), t));
        }
    }
    points.dedup_by(|a, b| (*a - *b).norm() <= 1e-14);
    if points.len() > 1 && (points[0] - points[points.len() - 1]).norm() <= 1e-14 {
        points.pop();
    }
    Path::new(points)
}

/// Minimal distance from an arc edge to the forbidden regions, sampled at a
/// few parameters.
fn edge_clearance(spec: &WindingSpec, rho: f64, t0: f64, t1: f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..=4 {
        let theta = t0 + (t1 - t0) * k as f64 / 4.0;
        for set in &spec.forbidden {
            best = best.min(set.distance_cyl(rho, theta));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// rectilinear union boundary on the cylinder
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct VertexKey {
    rho_line: usize,
    theta_line: usize,
}

#[derive(Debug, Clone, Copy)]
struct BoundaryEdge {
    from: VertexKey,
    to: VertexKey,
    /// Signed theta span for arc edges; 0 for radial edges.
    d_theta: f64,
}

/// Positively oriented boundary loops of the union of rectangles, as
/// waypoint lists in (rho, unwrapped theta). Interior lies on the left.
fn union_boundary(rects: &[CylRect]) -> Vec<Vec<(f64, f64)>> {
    assert!(!rects.is_empty());

    let mut theta_breaks: Vec<f64> = Vec::new();
    for r in rects {
        if let Arc::Interval { lo, width } = r.arc {
            theta_breaks.push(lo);
            theta_breaks.push((lo + width) % TAU);
        }
    }
    theta_breaks.sort_by(f64::total_cmp);
    theta_breaks.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
    if theta_breaks.is_empty() {
        theta_breaks.push(0.0);
    }
    let m = theta_breaks.len();

    let mut rho_breaks: Vec<f64> = rects.iter().flat_map(|r| [r.rlo, r.rhi]).collect();
    rho_breaks.sort_by(f64::total_cmp);
    rho_breaks.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
    let rows = rho_breaks.len() - 1;

    let col_span = |j: usize| -> f64 {
        if m == 1 {
            TAU
        } else {
            let a = theta_breaks[j];
            let b = theta_breaks[(j + 1) % m];
            let mut s = (b - a) % TAU;
            if s <= 0.0 {
                s += TAU;
            }
            s
        }
    };

    let mut occ = vec![vec![false; m]; rows];
    for (r, row) in occ.iter_mut().enumerate() {
        let rho_mid = 0.5 * (rho_breaks[r] + rho_breaks[r + 1]);
        for (j, cell) in row.iter_mut().enumerate() {
            let theta_mid = theta_breaks[j] + 0.5 * col_span(j);
            *cell = rects.iter().any(|rect| {
                rect.rlo <= rho_mid && rho_mid <= rect.rhi && rect.arc.contains(theta_mid, 1e-13)
            });
        }
    }

    let mut edges: Vec<BoundaryEdge> = Vec::new();
    // theta edges along horizontal rho lines
    for line in 0..=rows {
        for j in 0..m {
            let below = line > 0 && occ[line - 1][j];
            let above = line < rows && occ[line][j];
            if below == above {
                continue;
            }
            let span = col_span(j);
            let (from, to, d_theta) = if above {
                // interior above: traverse against theta
                (
                    VertexKey {
                        rho_line: line,
                        theta_line: (j + 1) % m,
                    },
                    VertexKey {
                        rho_line: line,
                        theta_line: j,
                    },
                    -span,
                )
            } else {
                (
                    VertexKey {
                        rho_line: line,
                        theta_line: j,
                    },
                    VertexKey {
                        rho_line: line,
                        theta_line: (j + 1) % m,
                    },
                    span,
                )
            };
            edges.push(BoundaryEdge { from, to, d_theta });
        }
    }
    // rho edges along vertical theta lines (absent when the circle is uncut)
    if m >= 2 {
        for r in 0..rows {
            for j in 0..m {
                let left = occ[r][(j + m - 1) % m];
                let right = occ[r][j];
                if left == right {
                    continue;
                }
                let (from, to) = if right {
                    // interior on the +theta side: traverse upward
                    (
                        VertexKey {
                            rho_line: r,
                            theta_line: j,
                        },
                        VertexKey {
                            rho_line: r + 1,
                            theta_line: j,
                        },
                    )
                } else {
                    (
                        VertexKey {
                            rho_line: r + 1,
                            theta_line: j,
                        },
                        VertexKey {
                            rho_line: r,
                            theta_line: j,
                        },
                    )
                };
                edges.push(BoundaryEdge {
                    from,
                    to,
                    d_theta: 0.0,
                });
            }
        }
    }

    // stitch directed edges into closed loops; any consistent pairing at
    // degree-4 vertices yields the same 1-cycle
    let mut by_start: HashMap<VertexKey, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        by_start.entry(e.from).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut waypoints = Vec::new();
        let first = edges[start];
        let mut rho = rho_breaks[first.from.rho_line];
        let mut theta = theta_breaks[first.from.theta_line];
        waypoints.push((rho, theta));
        let mut cursor = start;
        loop {
            used[cursor] = true;
            let e = edges[cursor];
            rho = rho_breaks[e.to.rho_line];
            theta += e.d_theta;
            waypoints.push((rho, theta));
            if e.to == first.from {
                break;
            }
            let next = by_start
                .get(&e.to)
                .and_then(|cands| cands.iter().find(|i| !used[**i]))
                .copied();
            match next {
                Some(i) => cursor = i,
                None => break, // numerically impossible; bail out with what we have
            }
        }
        loops.push(waypoints);
    }
    loops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{certify, hadamard_winding_spec, winding_number, Probe};
    use crate::sets::preset;
    use std::f64::consts::PI;

    #[test]
    fn boundary_of_one_rectangle_is_one_ccw_loop() {
        let rects = [CylRect {
            rlo: 0.0,
            rhi: 1.0,
            arc: Arc::interval(0.5, 1.0),
        }];
        let loops = union_boundary(&rects);
        assert_eq!(loops.len(), 1);
        let lp = &loops[0];
        // net theta change over a closed non-wrapping loop is 0
        let dtheta: f64 = lp[lp.len() - 1].1 - lp[0].1;
        assert!(dtheta.abs() < 1e-12);
        assert_eq!(lp.len(), 5);
    }

    #[test]
    fn boundary_of_a_band_is_two_circles() {
        let rects = [CylRect {
            rlo: -0.5,
            rhi: 0.5,
            arc: Arc::Full,
        }];
        let loops = union_boundary(&rects);
        assert_eq!(loops.len(), 2);
        for lp in &loops {
            let wrap = lp[lp.len() - 1].1 - lp[0].1;
            let rho = lp[0].0;
            if rho < 0.0 {
                assert!((wrap + TAU).abs() < 1e-12, "bottom circle runs clockwise");
            } else {
                assert!((wrap - TAU).abs() < 1e-12, "top circle runs anticlockwise");
            }
        }
    }

    #[test]
    fn synthesized_point_loop_certifies() {
        // prescription: wind -1 around {2}; 0 at the ends
        let s = preset("point(2.0, 0.0)").unwrap();
        let spec = WindingSpec {
            probes: vec![
                Probe {
                    point: Complex64::new(2.0, 0.0),
                    required: -1,
                },
                Probe {
                    point: Complex64::from_polar((2.0f64.ln() - 3.0).exp(), 0.5375),
                    required: 0,
                },
                Probe {
                    point: Complex64::from_polar((2.0f64.ln() + 3.0).exp(), 0.5375),
                    required: 0,
                },
            ],
            forbidden: vec![s.clone()],
            margin: 0.2,
        };
        let c = synthesize_cycle(&spec, &s, 0.1).unwrap();
        assert!(certify(&c, &spec).ok);
        assert_eq!(winding_number(&c, Complex64::new(2.0, 0.0)).unwrap(), -1);
        assert_eq!(winding_number(&c, Complex64::new(5.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn synthesized_disk_complement_spec_gives_a_circle_inside() {
        // S1 = C* minus D(0, s): boundary winds +1 strictly inside radius s
        let s1 = preset("disk_complement(2.0)").unwrap();
        let s2 = preset("disk_complement(3.0)").unwrap();
        let z = Complex64::new(1.0, 0.0);
        let spec = hadamard_winding_spec(&s1, &s2, z).unwrap();
        let mut around = s1.clone();
        around
            .boxes
            .extend(s2.inverse().scale(z).boxes.iter().copied());
        let c = synthesize_cycle(&spec, &around, spec.margin * 0.8).unwrap();
        let report = certify(&c, &spec);
        assert!(report.ok, "{:?}", report.violations.first());
        assert_eq!(winding_number(&c, Complex64::new(0.2, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, Complex64::new(5.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn synthesized_log_pair_cycle_certifies() {
        // the hard case: an open-bottom segment set closed off around 0
        let s = preset(&format!("ray({PI}, 1.0)")).unwrap();
        let z = Complex64::new(0.5, 0.0);
        let spec = hadamard_winding_spec(&s, &s, z).unwrap();
        let mut around = s.clone();
        around
            .boxes
            .extend(s.inverse().scale(z).boxes.iter().copied());
        let c = synthesize_cycle(&spec, &around, spec.margin * 0.8).unwrap();
        let report = certify(&c, &spec);
        assert!(report.ok, "{:?}", report.violations.first());
        // the segment from 0 to -1/2 and the 0 end wind +1, the ray winds 0
        assert_eq!(winding_number(&c, Complex64::new(-0.25, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, Complex64::new(1e-4, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, Complex64::new(-3.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&c, Complex64::new(4.0, 4.0)).unwrap(), 0);
    }

    #[test]
    fn bare_zero_requirement_yields_a_lone_circle() {
        // nothing to encircle, but the 0 end demands winding +1
        let spec = WindingSpec {
            probes: vec![
                Probe {
                    point: Complex64::from_polar((-3.0f64).exp(), 0.5375),
                    required: 1,
                },
                Probe {
                    point: Complex64::from_polar(3.0f64.exp(), 0.5375),
                    required: 0,
                },
            ],
            forbidden: vec![StarSet::empty("none")],
            margin: 0.25,
        };
        let around = StarSet::empty("none");
        let c = synthesize_cycle(&spec, &around, 0.1).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(winding_number(&c, Complex64::new(1e-4, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, Complex64::new(5.0, 0.0)).unwrap(), 0);

        // eps outside the admissible range is a margin error
        assert!(matches!(
            synthesize_cycle(&spec, &around, 10.0),
            Err(Error::NoMargin(_))
        ));
        assert!(matches!(
            synthesize_cycle(&spec, &around, 0.0),
            Err(Error::NoMargin(_))
        ));
    }

    #[test]
    fn shared_cycle_covers_an_annulus_of_points() {
        let s1 = preset("point(2.0, 0.0)").unwrap();
        let s2 = preset("point(3.0, 0.0)").unwrap();
        // K = annulus 0.5 <= |z| <= 1
        let k = StarSet::new(
            "K",
            vec![LogPolarBox::new(0.5f64.ln(), 0.0, Arc::Full)],
        );
        let c = shared_cycle(&s1, &s2, &k).unwrap();
        // for each z in K the per-z prescription must hold
        for t in 0..20 {
            let z = Complex64::from_polar(
                0.5 + 0.5 * (t as f64 / 19.0),
                TAU * t as f64 / 20.0,
            );
            let spec = hadamard_winding_spec(&s1, &s2, z).unwrap();
            let report = certify(&c, &spec);
            assert!(report.ok, "z = {z}: {:?}", report.violations.first());
        }
    }

    #[test]
    fn shared_cycle_rejects_touching_compacts() {
        let s1 = preset("point(2.0, 0.0)").unwrap();
        let s2 = preset("point(3.0, 0.0)").unwrap();
        let k = preset("point(6.0, 0.0)").unwrap();
        assert!(matches!(
            shared_cycle(&s1, &s2, &k),
            Err(Error::NoMargin(_))
        ));
    }

    #[test]
    fn degenerate_k_matches_pointwise_class() {
        let s1 = preset("point(2.0, 0.0)").unwrap();
        let s2 = preset("point(3.0, 0.0)").unwrap();
        let z = Complex64::new(0.8, 0.3);
        let k = StarSet::new("K", vec![LogPolarBox::point(z)]);
        let c = shared_cycle(&s1, &s2, &k).unwrap();
        let spec = hadamard_winding_spec(&s1, &s2, z).unwrap();
        assert!(certify(&c, &spec).ok);
    }

    #[test]
    fn pure_zero_prescription_with_circle_at_origin() {
        // lambda(0) = +1 with nothing reaching the 0 end: a lone circle
        let s1 = preset("ray(0.0, 2.0)").unwrap(); // [2, inf): inf in closure
        let s2 = preset("point(3.0, 0.0)").unwrap();
        let z = Complex64::new(1.0, 0.0);
        let spec = hadamard_winding_spec(&s1, &s2, z).unwrap();
        let mut around = s1.clone();
        around
            .boxes
            .extend(s2.inverse().scale(z).boxes.iter().copied());
        let c = synthesize_cycle(&spec, &around, spec.margin * 0.8).unwrap();
        let report = certify(&c, &spec);
        assert!(report.ok, "{:?}", report.violations.first());
        assert_eq!(winding_number(&c, Complex64::new(1.0 / 3.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, Complex64::new(3.0, 0.0)).unwrap(), 0);
    }
}
