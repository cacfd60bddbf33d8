//! Hadamard products over synthesized cycles, the residue and commutation
//! identities, shared-cycle grids, and class-level convolution.
//!
//! Two public semantics are exposed: the pointwise product, which integrates
//! `(1/2*pi*i) f1(zeta) f2(z/zeta) dzeta/zeta` over a certified cycle, and
//! the class convolution `[f1] * [f2] = [f1 * f2]` on representatives modulo
//! functions holomorphic on all of C*.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;

use crate::cycles::{
    hadamard_winding_spec, pohlen_winding_spec, shared_winding_spec, synthesize_cycle_with,
    Cycle, SynthesisOptions, TableChoice, WindingSpec,
};
use crate::error::{Error, Result};
use crate::functions::FunctionDef;
use crate::quadrature::{integrate_cycle_with, QuadOptions};
use crate::sets::{strongly_convolvable, LogPolarBox, StarSet};

/// Knobs shared by the product evaluators.
#[derive(Debug, Clone, Copy)]
pub struct ProductOptions {
    pub quad_tol: f64,
    pub max_depth: u32,
    /// Points closer than twice this to the product set are rejected.
    pub margin: Option<f64>,
    /// Synthesis dilation; defaults to 80% of the prescription margin.
    pub eps: Option<f64>,
    pub synthesis: SynthesisOptions,
    /// Worker threads for grid evaluation (1 = sequential).
    pub threads: usize,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions {
            quad_tol: 1e-10,
            max_depth: 24,
            margin: None,
            eps: None,
            synthesis: SynthesisOptions::default(),
            threads: 1,
        }
    }
}

fn quad_options(opts: &ProductOptions) -> QuadOptions {
    QuadOptions {
        tol: opts.quad_tol,
        max_depth: opts.max_depth,
        fail_on_tolerance: true,
    }
}

/// A single product evaluation together with its cycle and error estimate.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub cycle: Cycle,
}

fn reject_near_product(product: &StarSet, z: Complex64, opts: &ProductOptions) -> Result<()> {
    let margin = opts.margin.unwrap_or(1e-3);
    let dist = product.distance(z);
    if dist < 2.0 * margin {
        return Err(Error::PointInProduct(z, dist));
    }
    Ok(())
}

fn around_of(spec: &WindingSpec) -> StarSet {
    let mut around = StarSet::empty("around");
    for s in &spec.forbidden {
        around.boxes.extend(s.boxes.iter().copied());
    }
    around
}

fn integrate_hadamard(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    cycle: &Cycle,
    opts: &ProductOptions,
) -> Result<(Complex64, f64)> {
    let g = |zeta: Complex64| -> Result<Complex64> {
        Ok(f1.eval(zeta)? * f2.eval(z / zeta)? / zeta)
    };
    let r = integrate_cycle_with(g, cycle, &quad_options(opts))?;
    let two_pi = std::f64::consts::TAU;
    Ok((
        r.value / Complex64::new(0.0, two_pi),
        r.error_estimate / two_pi,
    ))
}

fn synthesize_for(spec: &WindingSpec, opts: &ProductOptions) -> Result<Cycle> {
    let eps = opts.eps.unwrap_or(spec.margin * 0.8);
    synthesize_cycle_with(spec, &around_of(spec), eps, &opts.synthesis)
}

/// Generalized Hadamard product at a point.
pub fn hadamard_at(f1: &FunctionDef, f2: &FunctionDef, z: Complex64) -> Result<Complex64> {
    Ok(hadamard_point(f1, f2, z, &ProductOptions::default())?.value)
}

pub fn hadamard_at_with(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    opts: &ProductOptions,
) -> Result<Complex64> {
    Ok(hadamard_point(f1, f2, z, opts)?.value)
}

/// Full result of a pointwise generalized product.
pub fn hadamard_point(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    opts: &ProductOptions,
) -> Result<PointResult> {
    let product = f1.singular.product(&f2.singular)?;
    reject_near_product(&product, z, opts)?;
    let spec = hadamard_winding_spec(&f1.singular, &f2.singular, z)?;
    let cycle = synthesize_for(&spec, opts)?;
    let (value, error_estimate) = integrate_hadamard(f1, f2, z, &cycle, opts)?;
    Ok(PointResult {
        value,
        error_estimate,
        cycle,
    })
}

/// Table-based product of Pohlen type. Functions must vanish at infinity
/// whenever infinity belongs to their domain on the sphere.
pub fn pohlen_at(f1: &FunctionDef, f2: &FunctionDef, z: Complex64) -> Result<Complex64> {
    pohlen_at_with(f1, f2, z, TableChoice::Default, &ProductOptions::default())
}

pub fn pohlen_at_with(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    choice: TableChoice,
    opts: &ProductOptions,
) -> Result<Complex64> {
    if !f1.singular.closure_has_inf() && !f1.vanishes_at_inf {
        return Err(Error::VanishingAtInfinityViolated(f1.name().to_string()));
    }
    if !f2.singular.closure_has_inf() && !f2.vanishes_at_inf {
        return Err(Error::VanishingAtInfinityViolated(f2.name().to_string()));
    }
    let product = f1.singular.product(&f2.singular)?;
    reject_near_product(&product, z, opts)?;
    let spec = pohlen_winding_spec(&f1.singular, &f2.singular, z, choice)?;
    let cycle = synthesize_for(&spec, opts)?;
    Ok(integrate_hadamard(f1, f2, z, &cycle, opts)?.0)
}

/// f1*f2 - f2*f1 at z; equals f1(0) f2(inf) in the closure pattern where
/// that product is defined.
pub fn commutativity_defect(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
) -> Result<Complex64> {
    commutativity_defect_with(f1, f2, z, &ProductOptions::default())
}

pub fn commutativity_defect_with(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    opts: &ProductOptions,
) -> Result<Complex64> {
    let a = hadamard_point(f1, f2, z, opts)?.value;
    let b = hadamard_point(f2, f1, z, opts)?.value;
    Ok(a - b)
}

/// (1/2*pi*i) times the integral of f1(zeta) f2(z/zeta)/zeta over the small
/// positively oriented circle |zeta| = r; equals f1(0) f2(inf) when r is
/// below every relevant scale.
pub fn residue_zero_loop(
    f1: &FunctionDef,
    f2: &FunctionDef,
    z: Complex64,
    r: f64,
) -> Result<Complex64> {
    let g = |zeta: Complex64| -> Result<Complex64> {
        Ok(f1.eval(zeta)? * f2.eval(z / zeta)? / zeta)
    };
    let circle = Cycle::circle(Complex64::new(0.0, 0.0), r, 1, 128);
    let res = integrate_cycle_with(g, &circle, &QuadOptions::default())?;
    Ok(res.value / Complex64::new(0.0, std::f64::consts::TAU))
}

/// Grid of product values sharing one cycle valid on the whole compact K.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub cycle_used: Cycle,
    pub tolerances: Vec<f64>,
}

impl GridResult {
    /// CSV rows `re_z,im_z,re_val,im_val,err_est` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_z,im_z,re_val,im_val,err_est\n");
        for ((z, v), e) in self
            .points
            .iter()
            .zip(self.values.iter())
            .zip(self.tolerances.iter())
        {
            out.push_str(&format!("{},{},{},{},{}\n", z.re, z.im, v.re, v.im, e));
        }
        out
    }
}

fn evaluate_on_cycle(
    f1: &FunctionDef,
    f2: &FunctionDef,
    cycle: &Cycle,
    points: &[Complex64],
    opts: &ProductOptions,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let n = points.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut errors = vec![0.0f64; n];
    if opts.threads <= 1 || n < 2 {
        for i in 0..n {
            let (v, e) = integrate_hadamard(f1, f2, points[i], cycle, opts)?;
            values[i] = v;
            errors[i] = e;
        }
        return Ok((values, errors));
    }
    let workers = opts.threads.min(n);
    let results: Vec<Result<(usize, Complex64, f64)>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let points = &points;
            let opts = &opts;
            handles.push(scope.spawn(move || {
                let mut local = Vec::new();
                let mut i = w;
                while i < n {
                    let r = integrate_hadamard(f1, f2, points[i], cycle, opts)
                        .map(|(v, e)| (i, v, e));
                    local.push(r);
                    i += workers;
                }
                local
            }));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("grid worker panicked"))
            .collect()
    });
    for r in results {
        let (i, v, e) = r?;
        values[i] = v;
        errors[i] = e;
    }
    Ok((values, errors))
}

/// Product values on a grid inside the compact K, all sharing one cycle.
pub fn hadamard_grid(
    f1: &FunctionDef,
    f2: &FunctionDef,
    k: &StarSet,
    grid: &[Complex64],
) -> Result<GridResult> {
    hadamard_grid_with(f1, f2, k, grid, &ProductOptions::default())
}

pub fn hadamard_grid_with(
    f1: &FunctionDef,
    f2: &FunctionDef,
    k: &StarSet,
    grid: &[Complex64],
    opts: &ProductOptions,
) -> Result<GridResult> {
    for &z in grid {
        if !k.contains(z, 1e-9) {
            return Err(Error::GridOutsideWindow(z));
        }
    }
    let spec = shared_winding_spec(&f1.singular, &f2.singular, k)?;
    let cycle = synthesize_for(&spec, opts)?;
    let (values, tolerances) = evaluate_on_cycle(f1, f2, &cycle, grid, opts)?;
    Ok(GridResult {
        points: grid.to_vec(),
        values,
        cycle_used: cycle,
        tolerances,
    })
}

/// Anything that can be evaluated pointwise on C*.
pub trait PointEval: Sync {
    fn eval_at(&self, z: Complex64) -> Result<Complex64>;
}

impl PointEval for FunctionDef {
    fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z)
    }
}

/// Memoizing evaluator of a generalized Hadamard product. Shared cycles can
/// be prepared for compacts; points outside any prepared compact fall back
/// to a fresh per-point cycle with margins adapted to the distance from the
/// product set.
pub struct ProductEvaluator {
    pub f1: FunctionDef,
    pub f2: FunctionDef,
    pub opts: ProductOptions,
    product: StarSet,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
    shared: Mutex<Vec<(StarSet, Cycle)>>,
}

impl ProductEvaluator {
    pub fn new(f1: FunctionDef, f2: FunctionDef, opts: ProductOptions) -> Result<ProductEvaluator> {
        if !strongly_convolvable(&f1.singular, &f2.singular) {
            return Err(Error::NotStronglyConvolvable(
                f1.singular.label.clone(),
                f2.singular.label.clone(),
            ));
        }
        let product = f1.singular.product(&f2.singular)?;
        Ok(ProductEvaluator {
            f1,
            f2,
            opts,
            product,
            cache: Mutex::new(HashMap::new()),
            shared: Mutex::new(Vec::new()),
        })
    }

    /// The product singular set S1*S2.
    pub fn singular_set(&self) -> &StarSet {
        &self.product
    }

    /// Build one shared cycle covering small neighbourhoods of the given
    /// points; later evaluations inside the cover reuse it.
    pub fn prepare_compact(&self, points: &[Complex64], radius: f64) -> Result<()> {
        let mut boxes: Vec<LogPolarBox> = Vec::with_capacity(points.len());
        for &z in points {
            boxes.push(LogPolarBox::point(z));
        }
        let mut k = StarSet::new("compact-cover", boxes);
        k = k.thicken(radius);
        k.normalize();
        let spec = shared_winding_spec(&self.f1.singular, &self.f2.singular, &k)?;
        let cycle = synthesize_for(&spec, &self.opts)?;
        self.shared.lock().unwrap().push((k, cycle));
        Ok(())
    }

    fn eval_uncached(&self, z: Complex64) -> Result<Complex64> {
        {
            let shared = self.shared.lock().unwrap();
            for (k, cycle) in shared.iter() {
                if k.contains(z, 1e-12) {
                    return Ok(integrate_hadamard(&self.f1, &self.f2, z, cycle, &self.opts)?.0);
                }
            }
        }
        let mut opts = self.opts;
        if opts.margin.is_none() {
            // adapt the rejection margin to the actual distance from S1*S2
            let dist = self.product.distance(z);
            opts.margin = Some((dist / 4.0).min(1e-3));
        }
        hadamard_at_with(&self.f1, &self.f2, z, &opts)
    }
}

impl PointEval for ProductEvaluator {
    fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = self.eval_uncached(z)?;
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

/// A class in Hol(C* minus S) / Hol(C*) with a chosen representative.
pub enum ClassRep {
    Function(FunctionDef),
    Product(Box<ProductEvaluator>),
}

pub struct CohomClass {
    pub rep: ClassRep,
    pub set: StarSet,
}

impl CohomClass {
    pub fn from_function(f: FunctionDef) -> CohomClass {
        let set = f.singular.clone();
        CohomClass {
            rep: ClassRep::Function(f),
            set,
        }
    }
}

impl PointEval for CohomClass {
    fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        match &self.rep {
            ClassRep::Function(f) => f.eval(z),
            ClassRep::Product(p) => p.eval_at(z),
        }
    }
}

/// Convolution of classes: the representative of the result is the
/// numerically evaluated generalized Hadamard product of the inputs'
/// representatives, supported on the product set.
pub fn cohom_convolve(a: &CohomClass, b: &CohomClass) -> Result<CohomClass> {
    cohom_convolve_with(a, b, &ProductOptions::default())
}

pub fn cohom_convolve_with(
    a: &CohomClass,
    b: &CohomClass,
    opts: &ProductOptions,
) -> Result<CohomClass> {
    let (f1, f2) = match (&a.rep, &b.rep) {
        (ClassRep::Function(f1), ClassRep::Function(f2)) => (f1.clone(), f2.clone()),
        _ => {
            return Err(Error::InvalidConfig(
                "class convolution needs function representatives".into(),
            ))
        }
    };
    if !strongly_convolvable(&a.set, &b.set) {
        return Err(Error::NotStronglyConvolvable(
            a.set.label.clone(),
            b.set.label.clone(),
        ));
    }
    let set = a.set.product(&b.set)?;
    let eval = ProductEvaluator::new(f1, f2, *opts)?;
    Ok(CohomClass {
        rep: ClassRep::Product(Box::new(eval)),
        set,
    })
}

/// Cut-discontinuity probe: g(x + i eps) - g(x - i eps).
pub fn jump(g: &dyn PointEval, x: f64, eps: f64) -> Result<Complex64> {
    let plus = g.eval_at(Complex64::new(x, eps))?;
    let minus = g.eval_at(Complex64::new(x, -eps))?;
    Ok(plus - minus)
}

// ---------------------------------------------------------------------------
// Morera-moment class-equality test
// ---------------------------------------------------------------------------

struct MomentLoop {
    /// Closed polyline; the moments are integrated with one fixed
    /// Gauss-Kronrod panel per chord (no adaptivity, so evaluator noise can
    /// never trigger runaway bisection).
    points: Vec<Complex64>,
    /// Smallest admissible moment power: circles around 0 skip k = 0, since
    /// 1/z-type tails are themselves holomorphic on C*.
    k_min: usize,
}

fn cluster_boxes(s: &StarSet) -> Vec<Vec<LogPolarBox>> {
    let n = s.boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if s.boxes[i].gap(&s.boxes[j]) < 0.3 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<LogPolarBox>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(s.boxes[i]);
    }
    groups.into_values().collect()
}

fn polyline_circle(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
    // start phase keeps chords asymmetric about the axes, so no quadrature
    // node can land exactly on a horizontal cut
    let phase = 0.2537;
    (0..=n)
        .map(|k| {
            center
                + Complex64::from_polar(
                    radius,
                    phase + std::f64::consts::TAU * k as f64 / n as f64,
                )
        })
        .collect()
}

/// Boundary of a log-polar rectangle as a polyline, arcs subdivided finely.
fn polyline_rect(rlo: f64, rhi: f64, tlo: f64, thi: f64) -> Vec<Complex64> {
    let mut pts = Vec::new();
    let arc_steps = (((thi - tlo) / 0.0211).ceil() as usize).max(8);
    let rho_steps = (((rhi - rlo) / 0.15).ceil() as usize).max(2);
    for k in 0..=rho_steps {
        pts.push(Complex64::from_polar(
            (rlo + (rhi - rlo) * k as f64 / rho_steps as f64).exp(),
            tlo,
        ));
    }
    for k in 1..=arc_steps {
        pts.push(Complex64::from_polar(
            rhi.exp(),
            tlo + (thi - tlo) * k as f64 / arc_steps as f64,
        ));
    }
    for k in 1..=rho_steps {
        pts.push(Complex64::from_polar(
            (rhi - (rhi - rlo) * k as f64 / rho_steps as f64).exp(),
            thi,
        ));
    }
    for k in 1..=arc_steps {
        pts.push(Complex64::from_polar(
            rlo.exp(),
            thi - (thi - tlo) * k as f64 / arc_steps as f64,
        ));
    }
    pts
}

fn moment_loops_for(s: &StarSet) -> Vec<MomentLoop> {
    let mut loops = Vec::new();
    let clusters = cluster_boxes(s);
    for cluster in &clusters {
        let bounded = cluster
            .iter()
            .all(|b| !b.reaches_zero() && !b.reaches_inf());
        if bounded {
            // circle around the whole cluster, not swallowing 0
            let mut pts = Vec::new();
            for b in cluster {
                let (tlo, width) = match b.arc {
                    crate::sets::Arc::Full => (0.0, std::f64::consts::TAU),
                    crate::sets::Arc::Interval { lo, width } => (lo, width),
                };
                for (rho, theta) in [
                    (b.rho_lo, tlo),
                    (b.rho_lo, tlo + width),
                    (b.rho_hi, tlo),
                    (b.rho_hi, tlo + width),
                    ((b.rho_lo + b.rho_hi) / 2.0, tlo + width / 2.0),
                ] {
                    pts.push(Complex64::from_polar(rho.exp(), theta));
                }
            }
            let center = pts.iter().sum::<Complex64>() / pts.len() as f64;
            let r_box = pts
                .iter()
                .map(|p| (p - center).norm())
                .fold(0.0f64, f64::max);
            let clearance = (0.35 * center.norm()).min(0.5 * r_box + 0.45);
            let radius = r_box + clearance.max(0.15 * (1.0 + r_box));
            if radius < center.norm() * 0.97 {
                loops.push(MomentLoop {
                    points: polyline_circle(center, radius, 160),
                    k_min: 0,
                });
                continue;
            }
            // a circle would swallow 0: fall through to a crossing rectangle
        }
        // unbounded (or awkward) cluster: rectangle crossing the cut near its
        // finite end; moments vanish iff the enclosed jump vanishes
        let finite_rhos: Vec<f64> = cluster
            .iter()
            .flat_map(|b| {
                let mut v = Vec::new();
                if !b.reaches_zero() {
                    v.push(b.rho_lo);
                }
                if !b.reaches_inf() {
                    v.push(b.rho_hi);
                }
                v
            })
            .collect();
        if finite_rhos.is_empty() {
            continue;
        }
        let reaches_inf = cluster.iter().any(|b| b.reaches_inf());
        let anchor = if reaches_inf {
            finite_rhos.iter().cloned().fold(f64::INFINITY, f64::min)
        } else {
            finite_rhos.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        };
        let (alo, ahi) = cluster_angle_span(cluster);
        let (rlo, rhi) = if reaches_inf {
            (anchor - 0.45, anchor + 0.9)
        } else {
            (anchor - 0.9, anchor + 0.45)
        };
        // asymmetric angular extensions: no chord straddles the cut
        // symmetrically, so no quadrature node lands exactly on it
        loops.push(MomentLoop {
            points: polyline_rect(rlo, rhi, alo - 0.3517, ahi + 0.4171),
            k_min: 0,
        });
    }
    // one mid-annulus circle when the set reaches an end of the cylinder
    if s.closure_has_zero() || s.closure_has_inf() {
        let bounds = s.finite_rho_bounds();
        if !bounds.is_empty() {
            let lo = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
            loops.push(MomentLoop {
                points: polyline_circle(Complex64::new(0.0, 0.0), (lo - 0.7).exp(), 200),
                k_min: 1,
            });
        }
    }
    loops
}

fn cluster_angle_span(cluster: &[LogPolarBox]) -> (f64, f64) {
    // widest box arc wins; Full arcs are handled as a whole turn
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in cluster {
        match b.arc {
            crate::sets::Arc::Full => return (0.0, std::f64::consts::TAU),
            crate::sets::Arc::Interval { lo: l, width } => {
                lo = lo.min(l);
                hi = hi.max(l + width);
            }
        }
    }
    (lo, hi)
}

/// Fixed (non-adaptive) Gauss-Kronrod moment of (g - h) zeta^k along a
/// closed polyline; also reports the largest |g - h| seen.
fn fixed_moment(
    g: &dyn PointEval,
    h: &dyn PointEval,
    pts: &[Complex64],
    k: usize,
    max_diff: &mut f64,
) -> Result<Complex64> {
    const XGK: [f64; 15] = [
        -0.991455371120812639206854697526329,
        -0.949107912342758524526189684047851,
        -0.864864423359769072789712788640926,
        -0.741531185599394439863864773280788,
        -0.586087235467691130294144838258730,
        -0.405845151377397166906606412076961,
        -0.207784955007898467600689403773245,
        0.0,
        0.207784955007898467600689403773245,
        0.405845151377397166906606412076961,
        0.586087235467691130294144838258730,
        0.741531185599394439863864773280788,
        0.864864423359769072789712788640926,
        0.949107912342758524526189684047851,
        0.991455371120812639206854697526329,
    ];
    const WGK: [f64; 15] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
        0.204432940075298892414161999234649,
        0.190350578064785409913256402421014,
        0.169004726639267902826583426598550,
        0.140653259715525918745189590510238,
        0.104790010322250183839876322541518,
        0.063092092629978553290700663189204,
        0.022935322010529224963732008058970,
    ];
    let mut total = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = Complex64::new(0.0, 0.0);
        for (x, wgt) in XGK.iter().zip(WGK.iter()) {
            let zeta = mid + half * *x;
            let diff = g.eval_at(zeta)? - h.eval_at(zeta)?;
            *max_diff = max_diff.max(diff.norm());
            sum += *wgt * diff * zeta.powi(k as i32);
        }
        total += half * sum;
    }
    Ok(total)
}

/// Morera-moment test for equality of classes modulo Hol(C*): loops around
/// each bounded cluster of S (and cut-crossing loops for unbounded ones)
/// must carry vanishing moments of g - h for k = 0..moments-1.
pub fn class_equal_mod_entire(
    g: &dyn PointEval,
    h: &dyn PointEval,
    s: &StarSet,
    moments: usize,
) -> Result<bool> {
    let loops = moment_loops_for(s);
    for lp in &loops {
        let mut max_diff = 0.0f64;
        for k in lp.k_min..lp.k_min.max(moments) {
            let m = fixed_moment(g, h, &lp.points, k, &mut max_diff)?;
            if m.norm() >= 1e-7 * (1.0 + max_diff) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Localized convolution on a window (U, V): values on grid points of
/// U minus V computed with one shared cycle for a compact cover of the grid.
pub fn localized_product(
    f1: &FunctionDef,
    f2: &FunctionDef,
    u: &StarSet,
    v: &StarSet,
    grid: &[Complex64],
) -> Result<GridResult> {
    localized_product_with(f1, f2, u, v, grid, &ProductOptions::default())
}

pub fn localized_product_with(
    f1: &FunctionDef,
    f2: &FunctionDef,
    u: &StarSet,
    v: &StarSet,
    grid: &[Complex64],
    opts: &ProductOptions,
) -> Result<GridResult> {
    if !strongly_convolvable(&f1.singular, &f2.singular) {
        return Err(Error::NotStronglyConvolvable(
            f1.singular.label.clone(),
            f2.singular.label.clone(),
        ));
    }
    if !u.is_compact() {
        return Err(Error::InvalidConfig(
            "the window U must have compact closure in C*".into(),
        ));
    }
    let product = f1.singular.product(&f2.singular)?;
    if !product.is_empty() && !product.thicken(1e-6).is_subset_of(v) {
        return Err(Error::InvalidConfig(
            "V must contain the product singular set with margin".into(),
        ));
    }
    for &z in grid {
        if !u.contains(z, 1e-9) || v.contains(z, 1e-9) {
            return Err(Error::GridOutsideWindow(z));
        }
    }
    // compact cover of the grid, kept clear of the product set
    let mut d_min = f64::INFINITY;
    for &z in grid {
        d_min = d_min.min(product.distance(z));
    }
    let radius = (0.4 * d_min).min(0.05).max(1e-6);
    let mut k = StarSet::new(
        "grid-cover",
        grid.iter().map(|&z| LogPolarBox::point(z)).collect(),
    );
    k = k.thicken(radius);
    k.normalize();
    let spec = shared_winding_spec(&f1.singular, &f2.singular, &k)?;
    let cycle = synthesize_for(&spec, opts)?;
    let (values, tolerances) = evaluate_on_cycle(f1, f2, &cycle, grid, opts)?;
    Ok(GridResult {
        points: grid.to_vec(),
        values,
        cycle_used: cycle,
        tolerances,
    })
}
