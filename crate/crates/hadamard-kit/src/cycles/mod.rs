//! Polygonal 1-cycles in C, robust winding numbers, winding prescriptions
//! for Hadamard-type contours, and certification.
//!
//! A homology class in the complement of the singular data is pinned down by
//! its winding numbers on the components of that data (plus the convention
//! that cycles wind 0 around infinity). Prescriptions are therefore carried
//! as probe lists; synthesis builds a cycle from dilated box boundaries and
//! certification re-checks every probe plus dense per-box rings.

mod synthesis;

pub use synthesis::{shared_cycle, synthesize_cycle, synthesize_cycle_with, SynthesisOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{strongly_convolvable, LogPolarBox, StarSet};

/// Closed polyline: the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    vertices: Vec<Complex64>,
}

impl Path {
    /// At least three vertices, none equal to 0, consecutive ones distinct.
    pub fn new(vertices: Vec<Complex64>) -> Result<Path> {
        if vertices.len() < 3 {
            return Err(Error::SynthesisFailed(format!(
                "path needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            if v.norm() == 0.0 {
                return Err(Error::SynthesisFailed("path vertex at 0".into()));
            }
        }
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            if (a - b).norm() <= 1e-12 {
                return Err(Error::SynthesisFailed(format!(
                    "consecutive vertices {a} and {b} coincide"
                )));
            }
        }
        Ok(Path { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    /// Directed closed segment list.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path { vertices: v }
    }

    fn distance(&self, w: Complex64) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(w, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn point_segment_distance(w: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (w - a).norm();
    }
    let t = ((w - a).re * ab.re + (w - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (w - (a + ab * t)).norm()
}

/// Formal integer combination of closed polylines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cycle {
    pub terms: Vec<(Path, i64)>,
}

impl Cycle {
    pub fn from_paths(terms: Vec<(Path, i64)>) -> Cycle {
        let terms = terms.into_iter().filter(|(_, m)| *m != 0).collect();
        Cycle { terms }
    }

    pub fn empty() -> Cycle {
        Cycle { terms: Vec::new() }
    }

    /// Discretized circle with at least `min_vertices` chords, positively
    /// oriented for `orientation = 1`.
    pub fn circle(center: Complex64, radius: f64, orientation: i64, min_vertices: usize) -> Cycle {
        let n = min_vertices.max(8);
        let mut vertices = Vec::with_capacity(n);
        for k in 0..n {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            vertices.push(center + Complex64::from_polar(radius, theta));
        }
        let path = Path::new(vertices).expect("circle vertices are valid");
        Cycle::from_paths(vec![(path, orientation)])
    }

    pub fn support_distance(&self, w: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(p, _)| p.distance(w))
            .fold(f64::INFINITY, f64::min)
    }

    /// Concatenation (formal sum).
    pub fn add(&self, other: &Cycle) -> Cycle {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Cycle { terms }
    }

    pub fn reversed(&self) -> Cycle {
        Cycle {
            terms: self
                .terms
                .iter()
                .map(|(p, m)| (p.reversed(), *m))
                .collect(),
        }
    }
}

/// Wire form of a cycle:
/// `{ "terms": [ { "multiplicity": int, "vertices": [[re, im], ...] } ] }`.
#[derive(Serialize, Deserialize)]
pub struct CycleRecord {
    terms: Vec<CycleTermRecord>,
}

#[derive(Serialize, Deserialize)]
struct CycleTermRecord {
    multiplicity: i64,
    vertices: Vec<[f64; 2]>,
}

impl CycleRecord {
    pub fn from_cycle(c: &Cycle) -> CycleRecord {
        CycleRecord {
            terms: c
                .terms
                .iter()
                .map(|(p, m)| CycleTermRecord {
                    multiplicity: *m,
                    vertices: p.vertices().iter().map(|v| [v.re, v.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn into_cycle(self) -> Result<Cycle> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let vertices = t
                .vertices
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect();
            terms.push((Path::new(vertices)?, t.multiplicity));
        }
        Ok(Cycle { terms })
    }
}

/// Winding number of the cycle around `w` by summed signed angles with
/// adaptive edge subdivision; the pre-rounding residual must stay below 1/4.
pub fn winding_number(c: &Cycle, w: Complex64) -> Result<i64> {
    if c.support_distance(w) <= 1e-9 {
        return Err(Error::PointOnCycle(w));
    }
    let mut total = 0i64;
    for (path, mult) in &c.terms {
        let mut splits = 1usize;
        loop {
            let mut angle = 0.0f64;
            for (a, b) in path.segments() {
                for k in 0..splits {
                    let t0 = k as f64 / splits as f64;
                    let t1 = (k + 1) as f64 / splits as f64;
                    let p = a + (b - a) * t0;
                    let q = a + (b - a) * t1;
                    angle += ((q - w) / (p - w)).arg();
                }
            }
            let turns = angle / std::f64::consts::TAU;
            let rounded = turns.round();
            if (turns - rounded).abs() < 0.25 {
                total += mult * rounded as i64;
                break;
            }
            splits *= 2;
            if splits > 16 {
                return Err(Error::PointOnCycle(w));
            }
        }
    }
    Ok(total)
}

/// One point with a required winding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub point: Complex64,
    pub required: i64,
}

/// A winding prescription: probes carrying required integers, the regions the
/// cycle support must avoid, and the clearance margin those regions leave.
#[derive(Debug, Clone)]
pub struct WindingSpec {
    pub probes: Vec<Probe>,
    pub forbidden: Vec<StarSet>,
    pub margin: f64,
}

/// Rho window enclosing all finite box data of the given sets, padded by
/// `pad` on each side. Probes beyond the window act as stand-ins for the
/// punctures at 0 and infinity.
pub fn compute_window<'a>(sets: impl IntoIterator<Item = &'a StarSet>, pad: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in sets {
        for r in s.finite_rho_bounds() {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if lo > hi {
        (-pad, pad)
    } else {
        (lo - pad, hi + pad)
    }
}

/// Angle used for the 0-end and far-field stand-in probes.
const PROXY_ANGLE: f64 = 0.5375;

const WINDOW_PAD: f64 = 2.0;

fn box_probe_points(b: &LogPolarBox, window: (f64, f64)) -> Vec<(f64, f64)> {
    let rlo = b.rho_lo.max(window.0);
    let rhi = b.rho_hi.min(window.1);
    let rmid = 0.5 * (rlo + rhi);
    let rins = 0.25 * (rhi - rlo);
    let mut pts = Vec::new();
    match b.arc {
        crate::sets::Arc::Full => {
            for k in 0..4 {
                let theta = PROXY_ANGLE + std::f64::consts::TAU * k as f64 / 4.0;
                pts.push((rmid, theta));
                pts.push((rlo + rins, theta));
                pts.push((rhi - rins, theta));
            }
        }
        crate::sets::Arc::Interval { lo, width } => {
            let tins = 0.25 * width;
            let tmid = lo + 0.5 * width;
            pts.push((rmid, tmid));
            pts.push((rlo + rins, lo + tins));
            pts.push((rlo + rins, lo + width - tins));
            pts.push((rhi - rins, lo + tins));
            pts.push((rhi - rins, lo + width - tins));
        }
    }
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    pts
}

fn probes_for_set(s: &StarSet, required: i64, window: (f64, f64), out: &mut Vec<Probe>) {
    for b in &s.boxes {
        for (rho, theta) in box_probe_points(b, window) {
            out.push(Probe {
                point: Complex64::from_polar(rho.exp(), theta),
                required,
            });
        }
    }
}

/// Smallest gap between boxes that carry different winding requirements.
fn min_separation_between(groups: &[(&StarSet, i64)]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, (sa, la)) in groups.iter().enumerate() {
        for (sb, lb) in groups.iter().skip(i + 1) {
            if la != lb {
                best = best.min(sa.separation(sb));
            }
        }
    }
    best
}

fn build_spec(
    groups: &[(&StarSet, i64)],
    zero_required: i64,
    far_required: i64,
) -> Result<WindingSpec> {
    let window = compute_window(groups.iter().map(|(s, _)| *s), WINDOW_PAD);
    let mut probes = Vec::new();
    for (s, lambda) in groups {
        probes_for_set(s, *lambda, window, &mut probes);
    }
    probes.push(Probe {
        point: Complex64::from_polar((window.0 - 1.0).exp(), PROXY_ANGLE),
        required: zero_required,
    });
    probes.push(Probe {
        point: Complex64::from_polar((window.1 + 1.0).exp(), PROXY_ANGLE),
        required: far_required,
    });
    let sep = min_separation_between(groups);
    let margin = (sep / 4.0).min(0.25);
    if margin <= 4e-9 {
        return Err(Error::NoMargin(format!(
            "winding regions with different requirements are only {sep:.3e} apart"
        )));
    }
    Ok(WindingSpec {
        probes,
        forbidden: groups.iter().map(|(s, _)| (*s).clone()).collect(),
        margin,
    })
}

fn check_point_off_product(s1: &StarSet, s2: &StarSet, z: Complex64) -> Result<StarSet> {
    let product = s1.product(s2)?;
    let dist = product.distance(z);
    if dist <= 4e-9 {
        return Err(Error::PointInProduct(z, dist));
    }
    Ok(product)
}

/// Winding prescription for the generalized Hadamard cycle of the pair
/// (S1, S2) at z: winding `-1 + [inf in closure S1]` on S1, `[inf in closure
/// S1]` on z*S2^-1, `-[0 in closure S1] + [inf in closure S1]` at 0, and 0
/// at the far field.
pub fn hadamard_winding_spec(s1: &StarSet, s2: &StarSet, z: Complex64) -> Result<WindingSpec> {
    if !strongly_convolvable(s1, s2) {
        return Err(Error::NotStronglyConvolvable(
            s1.label.clone(),
            s2.label.clone(),
        ));
    }
    check_point_off_product(s1, s2, z)?;
    let k_set = s2.inverse().scale(z);
    let inf1 = s1.closure_has_inf() as i64;
    let zero1 = s1.closure_has_zero() as i64;
    build_spec(&[(s1, -1 + inf1), (&k_set, inf1)], -zero1 + inf1, 0)
}

/// Shared-cycle variant: z*S2^-1 replaced by K*S2^-1 for a compact K.
pub fn shared_winding_spec(s1: &StarSet, s2: &StarSet, k: &StarSet) -> Result<WindingSpec> {
    if !strongly_convolvable(s1, s2) {
        return Err(Error::NotStronglyConvolvable(
            s1.label.clone(),
            s2.label.clone(),
        ));
    }
    if !k.is_compact() {
        return Err(Error::NoMargin(
            "the shared compact K must have finite rho bounds".into(),
        ));
    }
    if k.is_empty() {
        return Err(Error::NoMargin("the shared compact K is empty".into()));
    }
    let product = s1.product(s2)?;
    let sep = k.separation(&product);
    if sep <= 4e-9 {
        return Err(Error::NoMargin(format!(
            "K touches the product set (separation {sep:.3e})"
        )));
    }
    let k_set = k.product(&s2.inverse())?;
    let inf1 = s1.closure_has_inf() as i64;
    let zero1 = s1.closure_has_zero() as i64;
    build_spec(&[(s1, -1 + inf1), (&k_set, inf1)], -zero1 + inf1, 0)
}

/// Cycle kind from the table of Cauchy / anti-Cauchy prescriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableCell {
    Cc,
    CcPlus,
    Acc,
    AccMinus,
}

/// Choice for the cell where both cc+ and acc- are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableChoice {
    /// Deterministic default: cc+.
    #[default]
    Default,
    /// Take acc- in the ambiguous cell.
    PreferAccMinus,
}

/// Table lookup on the 0/inf membership pattern of the complements.
/// `zero_i`/`inf_i` say whether 0/inf avoid the closure of S_i (i.e. belong
/// to the corresponding open set).
pub fn table_cell(
    zero1: bool,
    inf1: bool,
    zero2: bool,
    inf2: bool,
    choice: TableChoice,
) -> Result<TableCell> {
    use TableCell::*;
    let cell = match (zero1, inf1) {
        (true, true) => match (zero2, inf2) {
            (true, true) => {
                if choice == TableChoice::PreferAccMinus {
                    AccMinus
                } else {
                    CcPlus
                }
            }
            (false, true) => AccMinus,
            (true, false) => CcPlus,
            (false, false) => Acc,
        },
        (false, true) => match (zero2, inf2) {
            (true, true) | (false, true) => AccMinus,
            _ => return Err(Error::TableCaseImpossible),
        },
        (true, false) => match (zero2, inf2) {
            (true, true) | (true, false) => CcPlus,
            _ => return Err(Error::TableCaseImpossible),
        },
        (false, false) => match (zero2, inf2) {
            (true, true) => Cc,
            _ => return Err(Error::TableCaseImpossible),
        },
    };
    Ok(cell)
}

/// Winding prescription for the table-based (Cauchy / anti-Cauchy) cycle.
pub fn pohlen_winding_spec(
    s1: &StarSet,
    s2: &StarSet,
    z: Complex64,
    choice: TableChoice,
) -> Result<WindingSpec> {
    if !strongly_convolvable(s1, s2) {
        return Err(Error::NotStronglyConvolvable(
            s1.label.clone(),
            s2.label.clone(),
        ));
    }
    check_point_off_product(s1, s2, z)?;
    let zero1 = !s1.closure_has_zero();
    let inf1 = !s1.closure_has_inf();
    let zero2 = !s2.closure_has_zero();
    let inf2 = !s2.closure_has_inf();
    let cell = table_cell(zero1, inf1, zero2, inf2, choice)?;
    let k_set = s2.inverse().scale(z);
    let (lambda_k, lambda_s1, lambda_zero) = match cell {
        TableCell::Cc => (1, 0, 0),
        TableCell::CcPlus => (1, 0, 1),
        TableCell::Acc => (0, -1, 0),
        TableCell::AccMinus => (0, -1, -1),
    };
    build_spec(&[(s1, lambda_s1), (&k_set, lambda_k)], lambda_zero, 0)
}

/// One certification failure.
#[derive(Debug, Clone)]
pub struct Violation {
    pub probe: Complex64,
    pub required: i64,
    pub got: Option<i64>,
}

/// Certification report: every probe plus per-box boundary rings.
#[derive(Debug, Clone)]
pub struct CertReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub probes_checked: usize,
}

/// Look up a prescribed winding for each box of `set` from probes lying in it.
fn set_requirement(spec: &WindingSpec, set: &StarSet) -> Option<i64> {
    for p in &spec.probes {
        if set.contains(p.point, 1e-9) {
            return Some(p.required);
        }
    }
    None
}

/// Ring of probes just inside the (window-clipped) box boundary.
fn ring_probes(b: &LogPolarBox, window: (f64, f64), count: usize, inset: f64) -> Vec<Complex64> {
    let rlo = b.rho_lo.max(window.0);
    let rhi = b.rho_hi.min(window.1);
    let (tlo, width) = match b.arc {
        crate::sets::Arc::Full => (0.0, std::f64::consts::TAU),
        crate::sets::Arc::Interval { lo, width } => (lo, width),
    };
    let ri = inset.min(0.5 * (rhi - rlo));
    let ti = inset.min(0.5 * width);
    let (rl, rh) = (rlo + ri, rhi - ri);
    let (tl, th) = (tlo + ti, tlo + width - ti);
    let per_side = (count / 4).max(1);
    let mut out = Vec::with_capacity(4 * per_side);
    for k in 0..per_side {
        let t = k as f64 / per_side as f64;
        out.push((rl + (rh - rl) * t, tl));
        out.push((rh, tl + (th - tl) * t));
        out.push((rh - (rh - rl) * t, th));
        out.push((rl, th - (th - tl) * t));
    }
    out.into_iter()
        .map(|(rho, theta)| Complex64::from_polar(rho.exp(), theta))
        .collect()
}

/// Evaluate the winding number at every prescription probe plus at least
/// `ring_count` extra probes per forbidden box; mismatches are collected,
/// not thrown.
pub fn certify(c: &Cycle, spec: &WindingSpec) -> CertReport {
    certify_with(c, spec, 64)
}

pub fn certify_with(c: &Cycle, spec: &WindingSpec, ring_count: usize) -> CertReport {
    let window = compute_window(spec.forbidden.iter(), WINDOW_PAD);
    let mut checks: Vec<Probe> = spec.probes.clone();
    for set in &spec.forbidden {
        if let Some(required) = set_requirement(spec, set) {
            for b in &set.boxes {
                for point in ring_probes(b, window, ring_count, spec.margin / 2.0) {
                    checks.push(Probe { point, required });
                }
            }
        }
    }
    let mut violations = Vec::new();
    for probe in &checks {
        match winding_number(c, probe.point) {
            Ok(got) if got == probe.required => {}
            Ok(got) => violations.push(Violation {
                probe: probe.point,
                required: probe.required,
                got: Some(got),
            }),
            Err(_) => violations.push(Violation {
                probe: probe.point,
                required: probe.required,
                got: None,
            }),
        }
    }
    CertReport {
        ok: violations.is_empty(),
        violations,
        probes_checked: checks.len(),
    }
}
