//! Closed subsets of C* as finite unions of log-polar boxes.
//!
//! A point z of C* is identified with (rho, theta) = (log|z|, arg z) on the
//! cylinder R x S^1. Multiplication of sets becomes coordinate-wise interval
//! addition, which makes products, inverses and scalings exact. A box may
//! reach rho = -inf (its closure then contains 0) or rho = +inf (closure
//! contains inf); 0 and inf themselves are never members.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Snap tolerance for breakpoint deduplication and endpoint membership.
pub const ANGLE_TOL: f64 = 1e-12;

/// Default membership tolerance in cylinder coordinates.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

fn norm_angle(t: f64) -> f64 {
    let mut a = t % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // -1e-18 % TAU can round to TAU itself
    if a >= TAU {
        a -= TAU;
    }
    a
}

/// An angular footprint on the circle: the whole circle or a closed interval
/// `[theta_lo, theta_lo + width]` taken modulo 2*pi, with `0 <= width < 2*pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arc {
    Full,
    Interval { lo: f64, width: f64 },
}

impl Arc {
    /// Interval arc; widths of 2*pi or more collapse to `Full`.
    pub fn interval(lo: f64, width: f64) -> Arc {
        assert!(width >= 0.0, "arc width must be nonnegative");
        if width >= TAU - ANGLE_TOL {
            Arc::Full
        } else {
            Arc::Interval {
                lo: norm_angle(lo),
                width,
            }
        }
    }

    pub fn point(theta: f64) -> Arc {
        Arc::interval(theta, 0.0)
    }

    pub fn width(&self) -> f64 {
        match self {
            Arc::Full => TAU,
            Arc::Interval { width, .. } => *width,
        }
    }

    /// Angular distance from `theta` to the arc (0 when inside).
    pub fn distance(&self, theta: f64) -> f64 {
        match self {
            Arc::Full => 0.0,
            Arc::Interval { lo, width } => {
                let d = norm_angle(theta - lo);
                if d <= *width {
                    0.0
                } else {
                    (d - width).min(TAU - d)
                }
            }
        }
    }

    pub fn contains(&self, theta: f64, tol: f64) -> bool {
        self.distance(theta) <= tol
    }

    /// Minkowski sum of arcs: widths add, saturating to `Full`.
    pub fn add(&self, other: &Arc) -> Arc {
        match (self, other) {
            (Arc::Full, _) | (_, Arc::Full) => Arc::Full,
            (Arc::Interval { lo: a, width: wa }, Arc::Interval { lo: b, width: wb }) => {
                Arc::interval(a + b, wa + wb)
            }
        }
    }

    /// The arc of inverse points: negation of the interval.
    pub fn neg(&self) -> Arc {
        match self {
            Arc::Full => Arc::Full,
            Arc::Interval { lo, width } => Arc::interval(-(lo + width), *width),
        }
    }

    pub fn rotate(&self, dtheta: f64) -> Arc {
        match self {
            Arc::Full => Arc::Full,
            Arc::Interval { lo, width } => Arc::interval(lo + dtheta, *width),
        }
    }

    /// Widen by `delta` on each side, saturating to `Full`.
    pub fn dilate(&self, delta: f64) -> Arc {
        match self {
            Arc::Full => Arc::Full,
            Arc::Interval { lo, width } => Arc::interval(lo - delta, width + 2.0 * delta),
        }
    }

    fn sort_key(&self) -> (u8, f64, f64) {
        match self {
            Arc::Full => (0, 0.0, TAU),
            Arc::Interval { lo, width } => (1, *lo, *width),
        }
    }

    fn approx_eq(&self, other: &Arc, tol: f64) -> bool {
        match (self, other) {
            (Arc::Full, Arc::Full) => true,
            (Arc::Interval { lo: a, width: wa }, Arc::Interval { lo: b, width: wb }) => {
                norm_angle(a - b).min(TAU - norm_angle(a - b)) <= tol && (wa - wb).abs() <= tol
            }
            _ => false,
        }
    }
}

/// A closed box on the log-polar cylinder:
/// `{z in C* : rho_lo <= log|z| <= rho_hi, arg z in arc}`.
///
/// `rho_lo` may be `-inf` (closure reaches 0) and `rho_hi` may be `+inf`
/// (closure reaches inf). A degenerate box is a single point and is legal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPolarBox {
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub arc: Arc,
}

impl LogPolarBox {
    pub fn new(rho_lo: f64, rho_hi: f64, arc: Arc) -> LogPolarBox {
        assert!(rho_lo <= rho_hi, "rho_lo must not exceed rho_hi");
        assert!(rho_lo < f64::INFINITY && rho_hi > f64::NEG_INFINITY);
        assert!(!rho_lo.is_nan() && !rho_hi.is_nan());
        LogPolarBox {
            rho_lo,
            rho_hi,
            arc,
        }
    }

    /// Degenerate box holding the single point z.
    pub fn point(z: Complex64) -> LogPolarBox {
        assert!(z.norm() > 0.0, "0 is not a point of C*");
        let rho = z.norm().ln();
        LogPolarBox::new(rho, rho, Arc::point(z.arg()))
    }

    pub fn reaches_zero(&self) -> bool {
        self.rho_lo == f64::NEG_INFINITY
    }

    pub fn reaches_inf(&self) -> bool {
        self.rho_hi == f64::INFINITY
    }

    fn rho_distance(&self, rho: f64) -> f64 {
        if rho < self.rho_lo {
            self.rho_lo - rho
        } else if rho > self.rho_hi {
            rho - self.rho_hi
        } else {
            0.0
        }
    }

    /// Cylinder-metric distance from (rho, theta) to the box.
    pub fn distance(&self, rho: f64, theta: f64) -> f64 {
        let dr = self.rho_distance(rho);
        let dt = self.arc.distance(theta);
        (dr * dr + dt * dt).sqrt()
    }

    /// Cylinder-metric gap between two boxes (0 when they intersect).
    pub fn gap(&self, other: &LogPolarBox) -> f64 {
        let dr = if self.rho_hi < other.rho_lo {
            other.rho_lo - self.rho_hi
        } else if other.rho_hi < self.rho_lo {
            self.rho_lo - other.rho_hi
        } else {
            0.0
        };
        let dt = match (&self.arc, &other.arc) {
            (Arc::Full, _) | (_, Arc::Full) => 0.0,
            (Arc::Interval { lo: a, width: wa }, Arc::Interval { lo: b, width: wb }) => {
                let fwd = norm_angle(b - a);
                let bwd = norm_angle(a - b);
                if fwd <= *wa || bwd <= *wb {
                    0.0
                } else {
                    (fwd - wa).min(bwd - wb)
                }
            }
        };
        (dr * dr + dt * dt).sqrt()
    }

    /// Minkowski product of boxes; errors when a factor reaching 0 meets a
    /// factor reaching inf (the product would need 0 * inf).
    pub fn product(&self, other: &LogPolarBox) -> Result<LogPolarBox> {
        if (self.reaches_zero() && other.reaches_inf())
            || (self.reaches_inf() && other.reaches_zero())
        {
            return Err(Error::IndeterminateProduct);
        }
        Ok(LogPolarBox::new(
            self.rho_lo + other.rho_lo,
            self.rho_hi + other.rho_hi,
            self.arc.add(&other.arc),
        ))
    }

    pub fn inverse(&self) -> LogPolarBox {
        LogPolarBox::new(-self.rho_hi, -self.rho_lo, self.arc.neg())
    }

    pub fn scale(&self, rho_shift: f64, dtheta: f64) -> LogPolarBox {
        LogPolarBox::new(
            self.rho_lo + rho_shift,
            self.rho_hi + rho_shift,
            self.arc.rotate(dtheta),
        )
    }

    /// Dilate by `delta`: finite rho ends move outward, the arc widens.
    pub fn thicken(&self, delta: f64) -> LogPolarBox {
        let lo = if self.reaches_zero() {
            f64::NEG_INFINITY
        } else {
            self.rho_lo - delta
        };
        let hi = if self.reaches_inf() {
            f64::INFINITY
        } else {
            self.rho_hi + delta
        };
        LogPolarBox::new(lo, hi, self.arc.dilate(delta))
    }

    fn approx_eq(&self, other: &LogPolarBox, tol: f64) -> bool {
        let end_eq = |a: f64, b: f64| a == b || (a - b).abs() <= tol;
        end_eq(self.rho_lo, other.rho_lo)
            && end_eq(self.rho_hi, other.rho_hi)
            && self.arc.approx_eq(&other.arc, tol)
    }
}

/// Cylinder coordinates of a nonzero complex number.
pub fn cylinder_coords(z: Complex64) -> (f64, f64) {
    assert!(z.norm() > 0.0, "0 has no cylinder coordinates");
    (z.norm().ln(), norm_angle(z.arg()))
}

/// A closed subset of C* given as a finite union of log-polar boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSet {
    pub boxes: Vec<LogPolarBox>,
    pub label: String,
}

impl StarSet {
    pub fn new(label: impl Into<String>, boxes: Vec<LogPolarBox>) -> StarSet {
        StarSet {
            boxes,
            label: label.into(),
        }
    }

    pub fn empty(label: impl Into<String>) -> StarSet {
        StarSet::new(label, Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// True iff 0 lies in the closure of the set in the sphere.
    pub fn closure_has_zero(&self) -> bool {
        self.boxes.iter().any(|b| b.reaches_zero())
    }

    /// True iff inf lies in the closure of the set in the sphere.
    pub fn closure_has_inf(&self) -> bool {
        self.boxes.iter().any(|b| b.reaches_inf())
    }

    /// Cylinder-metric distance from z to the set (+inf for the empty set).
    pub fn distance(&self, z: Complex64) -> f64 {
        if z.norm() == 0.0 {
            // only meaningful through closures; treat as distance to the 0 end
            return if self.closure_has_zero() {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let (rho, theta) = cylinder_coords(z);
        self.distance_cyl(rho, theta)
    }

    pub fn distance_cyl(&self, rho: f64, theta: f64) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.distance(rho, theta))
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership within tolerance `tol` in cylinder coordinates.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.norm() > 0.0 && self.distance(z) <= tol
    }

    /// Minimal gap between this set and another (box-pair minimum).
    pub fn separation(&self, other: &StarSet) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.boxes {
            for b in &other.boxes {
                best = best.min(a.gap(b));
            }
        }
        best
    }

    /// Exact product set {z1 * z2}. Empty factors give the empty set.
    pub fn product(&self, other: &StarSet) -> Result<StarSet> {
        let label = format!("{}*{}", self.label, other.label);
        if self.is_empty() || other.is_empty() {
            return Ok(StarSet::empty(label));
        }
        let mut boxes = Vec::with_capacity(self.boxes.len() * other.boxes.len());
        for a in &self.boxes {
            for b in &other.boxes {
                boxes.push(a.product(b)?);
            }
        }
        let mut s = StarSet::new(label, boxes);
        s.normalize();
        Ok(s)
    }

    /// Exact inverse set {z : 1/z in S}.
    pub fn inverse(&self) -> StarSet {
        let mut s = StarSet::new(
            format!("{}^-1", self.label),
            self.boxes.iter().map(|b| b.inverse()).collect(),
        );
        s.normalize();
        s
    }

    /// Exact scaled set z*S for a nonzero complex z.
    pub fn scale(&self, z: Complex64) -> StarSet {
        assert!(z.norm() > 0.0, "scale factor must be nonzero");
        let (rho, theta) = cylinder_coords(z);
        let mut s = StarSet::new(
            format!("{}*{}", z, self.label),
            self.boxes.iter().map(|b| b.scale(rho, theta)).collect(),
        );
        s.normalize();
        s
    }

    /// Closed `delta`-neighbourhood in the cylinder sup metric.
    pub fn thicken(&self, delta: f64) -> StarSet {
        assert!(delta > 0.0, "thickening radius must be positive");
        StarSet::new(
            self.label.clone(),
            self.boxes.iter().map(|b| b.thicken(delta)).collect(),
        )
    }

    /// All finite rho endpoints appearing in the box list.
    pub fn finite_rho_bounds(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.boxes {
            if !b.reaches_zero() {
                out.push(b.rho_lo);
            }
            if !b.reaches_inf() {
                out.push(b.rho_hi);
            }
        }
        out
    }

    /// True iff every box has finite rho bounds (compact subset of C*).
    pub fn is_compact(&self) -> bool {
        !self.closure_has_zero() && !self.closure_has_inf()
    }

    /// Properness: the boxes do not cover the whole cylinder. Decided exactly
    /// by sweeping rho breakpoints and testing arc coverage on each open slab.
    pub fn is_proper(&self) -> bool {
        let mut breaks = self.finite_rho_bounds();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);

        let mut probes = Vec::new();
        if breaks.is_empty() {
            probes.push(0.0);
        } else {
            probes.push(breaks[0] - 1.0);
            for w in breaks.windows(2) {
                probes.push(0.5 * (w[0] + w[1]));
            }
            probes.push(breaks[breaks.len() - 1] + 1.0);
        }

        for rho in probes {
            let arcs: Vec<Arc> = self
                .boxes
                .iter()
                .filter(|b| b.rho_lo <= rho && rho <= b.rho_hi)
                .map(|b| b.arc)
                .collect();
            if !arcs_cover_circle(&arcs) {
                return true;
            }
        }
        false
    }

    /// Merge boxes with identical arcs and overlapping rho intervals; sort.
    pub fn normalize(&mut self) {
        let tol = ANGLE_TOL;
        let mut boxes = self.boxes.clone();
        let mut changed = true;
        while changed {
            changed = false;
            'outer: for i in 0..boxes.len() {
                for j in (i + 1)..boxes.len() {
                    if boxes[i].arc.approx_eq(&boxes[j].arc, tol)
                        && boxes[i].rho_lo <= boxes[j].rho_hi + tol
                        && boxes[j].rho_lo <= boxes[i].rho_hi + tol
                    {
                        let merged = LogPolarBox::new(
                            boxes[i].rho_lo.min(boxes[j].rho_lo),
                            boxes[i].rho_hi.max(boxes[j].rho_hi),
                            boxes[i].arc,
                        );
                        boxes[i] = merged;
                        boxes.remove(j);
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
        boxes.sort_by(|a, b| {
            let ka = (a.rho_lo, a.rho_hi, a.arc.sort_key());
            let kb = (b.rho_lo, b.rho_hi, b.arc.sort_key());
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        });
        self.boxes = boxes;
    }

    /// Structural comparison up to normalization and tolerance.
    pub fn same_boxes(&self, other: &StarSet, tol: f64) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.normalize();
        b.normalize();
        a.boxes.len() == b.boxes.len()
            && a.boxes
                .iter()
                .zip(b.boxes.iter())
                .all(|(x, y)| x.approx_eq(y, tol))
    }

    /// True iff `self` is covered by the union of `other`'s boxes, decided by
    /// the same exact slab sweep as `is_proper`.
    pub fn is_subset_of(&self, other: &StarSet) -> bool {
        for b in &self.boxes {
            let mut breaks: Vec<f64> = other
                .finite_rho_bounds()
                .into_iter()
                .filter(|r| *r > b.rho_lo && *r < b.rho_hi)
                .collect();
            if b.rho_lo.is_finite() {
                breaks.push(b.rho_lo);
            }
            if b.rho_hi.is_finite() {
                breaks.push(b.rho_hi);
            }
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);

            let mut probes = Vec::new();
            if breaks.is_empty() {
                probes.push(0.0);
            } else {
                if b.reaches_zero() {
                    probes.push(breaks[0] - 1.0);
                }
                probes.extend(breaks.iter().copied());
                for w in breaks.windows(2) {
                    probes.push(0.5 * (w[0] + w[1]));
                }
                if b.reaches_inf() {
                    probes.push(breaks[breaks.len() - 1] + 1.0);
                }
            }

            for rho in probes {
                let arcs: Vec<Arc> = other
                    .boxes
                    .iter()
                    .filter(|ob| ob.rho_lo <= rho + ANGLE_TOL && rho <= ob.rho_hi + ANGLE_TOL)
                    .map(|ob| ob.arc)
                    .collect();
                if !arcs_cover_arc(&arcs, &b.arc) {
                    return false;
                }
            }
        }
        true
    }
}

/// True iff the union of `arcs` covers the whole circle.
pub fn arcs_cover_circle(arcs: &[Arc]) -> bool {
    arcs_cover_span(arcs, 0.0, TAU)
}

/// True iff the union of `arcs` covers the target arc.
fn arcs_cover_arc(arcs: &[Arc], target: &Arc) -> bool {
    match target {
        Arc::Full => arcs_cover_circle(arcs),
        Arc::Interval { lo, width } => arcs_cover_span(arcs, *lo, *width),
    }
}

/// Greedy coverage of the span `[start, start + span]` (mod 2*pi) by closed arcs.
fn arcs_cover_span(arcs: &[Arc], start: f64, span: f64) -> bool {
    if arcs.iter().any(|a| matches!(a, Arc::Full)) {
        return true;
    }
    // unroll each interval relative to `start`, together with a +2*pi copy so
    // that arcs wrapping past the seam stay usable
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for a in arcs {
        if let Arc::Interval { lo, width } = a {
            let s = norm_angle(lo - start);
            iv.push((s, s + width));
            iv.push((s - TAU, s - TAU + width));
        }
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    if span <= ANGLE_TOL {
        // degenerate target: some arc must contain the point itself
        return iv
            .iter()
            .any(|&(lo, hi)| lo <= ANGLE_TOL && hi >= -ANGLE_TOL);
    }
    let mut pos = 0.0;
    loop {
        if pos >= span - ANGLE_TOL {
            return true;
        }
        let mut reach = f64::NEG_INFINITY;
        for &(lo, hi) in &iv {
            if lo <= pos + ANGLE_TOL {
                reach = reach.max(hi);
            }
        }
        if reach <= pos + ANGLE_TOL / 2.0 {
            return false;
        }
        pos = reach;
    }
}

/// Star-eligibility of closed sets: both factors and their product are proper,
/// and the closures never pair 0 with inf.
pub fn star_eligible(s1: &StarSet, s2: &StarSet) -> bool {
    if !m_condition(s1, s2) {
        return false;
    }
    if !s1.is_proper() || !s2.is_proper() {
        return false;
    }
    match s1.product(s2) {
        Ok(p) => p.is_proper(),
        Err(_) => false,
    }
}

/// The closure condition: no box of one factor reaching 0 against a box of
/// the other reaching inf.
fn m_condition(s1: &StarSet, s2: &StarSet) -> bool {
    !(s1.closure_has_zero() && s2.closure_has_inf())
        && !(s1.closure_has_inf() && s2.closure_has_zero())
}

/// Convolvability: S1 cut K*S2^-1 is compact for every compact K. In the box
/// calculus this is exactly the closure condition on 0/inf pairings.
pub fn convolvable(s1: &StarSet, s2: &StarSet) -> bool {
    m_condition(s1, s2)
}

/// Strong convolvability: convolvable with star-eligible closures.
pub fn strongly_convolvable(s1: &StarSet, s2: &StarSet) -> bool {
    convolvable(s1, s2) && star_eligible(s1, s2)
}

// ---------------------------------------------------------------------------
// serialization records
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RhoEnd {
    Num(f64),
    Word(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ArcRecord {
    Word(String),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoxRecord {
    rho: [RhoEnd; 2],
    arc: ArcRecord,
}

/// Wire form of a `StarSet`:
/// `{ "label": str, "boxes": [ { "rho": [lo, hi], "arc": "full" | [lo, width] } ] }`
/// where rho ends are numbers or the strings `"-inf"` / `"+inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarSetRecord {
    pub label: String,
    boxes: Vec<BoxRecord>,
}

fn rho_end_to_f64(e: &RhoEnd) -> Result<f64> {
    match e {
        RhoEnd::Num(v) => {
            if v.is_nan() {
                Err(Error::InvalidConfig("rho bound is NaN".into()))
            } else {
                Ok(*v)
            }
        }
        RhoEnd::Word(w) => match w.as_str() {
            "-inf" => Ok(f64::NEG_INFINITY),
            "+inf" | "inf" => Ok(f64::INFINITY),
            other => Err(Error::InvalidConfig(format!("bad rho bound `{other}`"))),
        },
    }
}

fn f64_to_rho_end(v: f64) -> RhoEnd {
    if v == f64::NEG_INFINITY {
        RhoEnd::Word("-inf".into())
    } else if v == f64::INFINITY {
        RhoEnd::Word("+inf".into())
    } else {
        RhoEnd::Num(v)
    }
}

impl StarSetRecord {
    pub fn from_set(s: &StarSet) -> StarSetRecord {
        StarSetRecord {
            label: s.label.clone(),
            boxes: s
                .boxes
                .iter()
                .map(|b| BoxRecord {
                    rho: [f64_to_rho_end(b.rho_lo), f64_to_rho_end(b.rho_hi)],
                    arc: match b.arc {
                        Arc::Full => ArcRecord::Word("full".into()),
                        Arc::Interval { lo, width } => ArcRecord::Pair([lo, width]),
                    },
                })
                .collect(),
        }
    }

    pub fn into_set(self) -> Result<StarSet> {
        let mut boxes = Vec::with_capacity(self.boxes.len());
        for b in self.boxes {
            let lo = rho_end_to_f64(&b.rho[0])?;
            let hi = rho_end_to_f64(&b.rho[1])?;
            if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidConfig(format!(
                    "bad rho interval [{lo}, {hi}]"
                )));
            }
            let arc = match b.arc {
                ArcRecord::Word(w) if w == "full" => Arc::Full,
                ArcRecord::Word(w) => {
                    return Err(Error::InvalidConfig(format!("bad arc `{w}`")));
                }
                ArcRecord::Pair([lo, width]) => {
                    if !(0.0..TAU).contains(&width) {
                        return Err(Error::InvalidConfig(format!("bad arc width {width}")));
                    }
                    Arc::interval(lo, width)
                }
            };
            boxes.push(LogPolarBox::new(lo, hi, arc));
        }
        Ok(StarSet::new(self.label, boxes))
    }
}

// ---------------------------------------------------------------------------
// named presets
// ---------------------------------------------------------------------------

/// Build a preset set from a spec string such as `ray(3.1415, 1.0)`.
///
/// Available: `ray(angle, r0)`, `segment0(angle, r0)`, `point(re, im)`,
/// `disk_complement(s)`, `punctured_disk(t)`.
pub fn preset(text: &str) -> Result<StarSet> {
    let text = text.trim();
    let (name, rest) = text
        .split_once('(')
        .ok_or_else(|| Error::InvalidConfig(format!("preset `{text}` needs arguments")))?;
    let args_text = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::InvalidConfig(format!("preset `{text}` missing `)`")))?;
    let args: Vec<f64> = if args_text.trim().is_empty() {
        Vec::new()
    } else {
        args_text
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad preset argument `{a}`")))
            })
            .collect::<Result<_>>()?
    };
    let need = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "preset `{}` expects {n} arguments, got {}",
                name.trim(),
                args.len()
            )))
        }
    };
    match name.trim() {
        "ray" => {
            need(2)?;
            let (angle, r0) = (args[0], args[1]);
            if r0 <= 0.0 {
                return Err(Error::InvalidConfig("ray radius must be positive".into()));
            }
            Ok(StarSet::new(
                text,
                vec![LogPolarBox::new(r0.ln(), f64::INFINITY, Arc::point(angle))],
            ))
        }
        "segment0" => {
            need(2)?;
            let (angle, r0) = (args[0], args[1]);
            if r0 <= 0.0 {
                return Err(Error::InvalidConfig(
                    "segment0 radius must be positive".into(),
                ));
            }
            Ok(StarSet::new(
                text,
                vec![LogPolarBox::new(
                    f64::NEG_INFINITY,
                    r0.ln(),
                    Arc::point(angle),
                )],
            ))
        }
        "point" => {
            need(2)?;
            let z = Complex64::new(args[0], args[1]);
            if z.norm() == 0.0 {
                return Err(Error::InvalidConfig("point(0, 0) is not in C*".into()));
            }
            Ok(StarSet::new(text, vec![LogPolarBox::point(z)]))
        }
        "disk_complement" => {
            need(1)?;
            let s = args[0];
            if s <= 0.0 {
                return Err(Error::InvalidConfig(
                    "disk_complement radius must be positive".into(),
                ));
            }
            Ok(StarSet::new(
                text,
                vec![LogPolarBox::new(s.ln(), f64::INFINITY, Arc::Full)],
            ))
        }
        "punctured_disk" => {
            need(1)?;
            let t = args[0];
            if t <= 0.0 {
                return Err(Error::InvalidConfig(
                    "punctured_disk radius must be positive".into(),
                ));
            }
            Ok(StarSet::new(
                text,
                vec![LogPolarBox::new(f64::NEG_INFINITY, t.ln(), Arc::Full)],
            ))
        }
        "factorial" | "sequence" | "discrete_sequence" => Err(Error::UnrepresentableSet(
            "infinite discrete sets (factorial-style sequences) are not finite box unions; \
             truncate to finitely many `point(...)` boxes instead"
                .into(),
        )),
        other => Err(Error::InvalidConfig(format!("unknown preset `{other}`"))),
    }
}
