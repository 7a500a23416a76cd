//! Fibers of the orbit map and continuation of lifts along paths.
//!
//! A lift of f ∘ p along a path γ in V is a path w(t) in W with q(w(t)) =
//! f(p(γ(t))). Away from the reflection locus it is followed by an Euler
//! predictor and a Gauss–Newton corrector that must stay within half the
//! fiber gap. Near a reflection hyperplane the fiber collapses, so the lift is
//! continued through the slice model y_W ≈ ρ·y_V and the branch is chosen
//! among the r points of the pseudoreflection orbit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::InvariantBasis;
use crate::poly::NumericMap;
use crate::quasilinear::{component_matching, QuasiError, QuotientMap};
use crate::solve::{levenberg_marquardt_complex, LmOptions};
use crate::strata::{Stratification, StrataError, Subspace};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("invalid path: {0}")]
    Path(String),
    #[error("map weights do not match the invariant bases")]
    WeightMismatch,
    #[error("no fiber point found (best residual {residual:e})")]
    NoFiberPoint { residual: f64 },
    #[error("seed is not over the start of the path (residual {residual:e})")]
    SeedOffFiber { residual: f64 },
    #[error("path comes within {distance:e} of the codimension-two locus at t = {t}")]
    TooCloseToDeepLocus { t: f64, distance: f64 },
    #[error("path meets a reflection hyperplane near-tangentially at t = {t}")]
    NearTangentialWall { t: f64 },
    #[error("step size collapsed at t = {t}")]
    StepCollapse { t: f64 },
    #[error("loop passes through a non-principal fiber at t = {t}")]
    NotPrincipal { t: f64 },
    #[error("component {component} of Y has no target component of the same reflection order")]
    ComponentMismatch { component: usize },
    #[error("tracking lost: endpoint is {mismatch:e} from the nearest fiber point")]
    TrackingLost { mismatch: f64 },
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Quasi(#[from] QuasiError),
}

/// A polyline through waypoints sampled uniformly on each segment.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub waypoints: Vec<Vec<C64>>,
    pub samples_per_segment: usize,
    pub closed: bool,
}

/// JSON form: each coordinate is a pair [re, im].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathFile {
    pub waypoints: Vec<Vec<[f64; 2]>>,
    pub samples_per_segment: usize,
    #[serde(default)]
    pub closed: bool,
}

impl PathSpec {
    pub fn new(
        waypoints: Vec<Vec<C64>>,
        samples_per_segment: usize,
        closed: bool,
    ) -> Result<Self, LiftError> {
        if waypoints.len() < 2 {
            return Err(LiftError::Path("need at least two waypoints".into()));
        }
        if samples_per_segment == 0 {
            return Err(LiftError::Path("samples_per_segment must be positive".into()));
        }
        let dim = waypoints[0].len();
        if let Some(i) = waypoints.iter().position(|w| w.len() != dim) {
            return Err(LiftError::Path(format!(
                "waypoint {} has {} coordinates, expected {}",
                i,
                waypoints[i].len(),
                dim
            )));
        }
        if closed && waypoints.first() != waypoints.last() {
            return Err(LiftError::Path("closed path must end at its first waypoint".into()));
        }
        Ok(Self {
            waypoints,
            samples_per_segment,
            closed,
        })
    }

    /// A closed loop c + r·e^{2πi·turns·s} in one coordinate.
    pub fn circle(center: C64, radius: f64, turns: i32, points_per_turn: usize, samples: usize) -> Self {
        let total = points_per_turn * turns.unsigned_abs().max(1) as usize;
        let step = 2.0 * std::f64::consts::PI * turns as f64 / total as f64;
        let mut waypoints: Vec<Vec<C64>> = (0..total)
            .map(|j| vec![center + C64::from_polar(radius, step * j as f64)])
            .collect();
        waypoints.push(waypoints[0].clone());
        Self {
            waypoints,
            samples_per_segment: samples,
            closed: true,
        }
    }

    pub fn from_file(file: &PathFile) -> Result<Self, LiftError> {
        Self::new(
            file.waypoints
                .iter()
                .map(|w| w.iter().map(|c| C64::new(c[0], c[1])).collect())
                .collect(),
            file.samples_per_segment,
            file.closed,
        )
    }

    pub fn to_file(&self) -> PathFile {
        PathFile {
            waypoints: self
                .waypoints
                .iter()
                .map(|w| w.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
            samples_per_segment: self.samples_per_segment,
            closed: self.closed,
        }
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn segments(&self) -> usize {
        self.waypoints.len() - 1
    }

    /// γ(t) for t ∈ [0, segments].
    pub fn point(&self, t: f64) -> Vec<C64> {
        let s = self.segments();
        let t = t.clamp(0.0, s as f64);
        let i = (t.floor() as usize).min(s - 1);
        let u = t - i as f64;
        self.waypoints[i]
            .iter()
            .zip(&self.waypoints[i + 1])
            .map(|(a, b)| a * (1.0 - u) + b * u)
            .collect()
    }

    pub fn params(&self) -> Vec<f64> {
        let n = self.segments() * self.samples_per_segment;
        (0..=n).map(|i| i as f64 / self.samples_per_segment as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    /// corrector stopping tolerance
    pub tol: f64,
    /// largest accepted |q(w) − z| at a reported sample
    pub residual_tol: f64,
    /// minimum distance from γ to the codimension-two locus
    pub wall_margin: f64,
    /// distance from a reflection hyperplane where the slice model takes over
    pub wall_zone: f64,
    pub max_halvings: u32,
    /// accepted steps between fiber-gap refreshes
    pub gap_refresh: usize,
    pub check_components: bool,
    pub seed: u64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            residual_tol: 1e-8,
            wall_margin: 1e-3,
            wall_zone: 0.1,
            max_halvings: 16,
            gap_refresh: 10,
            check_components: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WallEvent {
    /// sample parameter of closest approach
    pub t: f64,
    /// codimension-one component of Y that was crossed
    pub component: usize,
    pub r: u32,
    pub admissible_branches: usize,
    /// index of the chosen branch when the candidates are ordered by the
    /// argument of their transverse coordinate
    pub chosen_branch: usize,
}

#[derive(Clone, Debug)]
pub struct LiftedPath {
    pub ts: Vec<f64>,
    pub downstairs: Vec<Vec<C64>>,
    pub upstairs: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    /// samples continued by the slice model, exempt from the gap criterion
    pub in_wall_zone: Vec<bool>,
    pub wall_events: Vec<WallEvent>,
}

impl LiftedPath {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn end(&self) -> &[C64] {
        self.upstairs.last().expect("nonempty")
    }
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn act(g: &DMatrix<C64>, w: &[C64]) -> Vec<C64> {
    (g * DVector::from_column_slice(w)).iter().copied().collect()
}

/// Smallest |g·w − w| over g ≠ 1.
pub fn fiber_gap(elements: &[DMatrix<C64>], w: &[C64]) -> f64 {
    elements
        .iter()
        .skip(1)
        .map(|g| dist(&act(g, w), w))
        .fold(f64::INFINITY, f64::min)
}

fn solve_near(q: &NumericMap, z: &[C64], w0: &[C64], opts: LmOptions) -> (Vec<C64>, f64) {
    let target = DVector::from_column_slice(z);
    let out = levenberg_marquardt_complex(
        |w| (q.eval_vec(&DVector::from_column_slice(w)) - &target, q.jacobian(w)),
        w0,
        opts,
    );
    (out.x, out.residual)
}

fn residual(q: &NumericMap, w: &[C64], z: &[C64]) -> f64 {
    dist(&q.eval(w), z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberOptions {
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
}

impl Default for FiberOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            starts: 16,
            seed: 0,
        }
    }
}

/// The fiber q⁻¹(z) as the H-orbit of one solution, deduplicated.
pub fn fiber(basis: &InvariantBasis, z: &[C64], opts: FiberOptions) -> Result<Vec<Vec<C64>>, LiftError> {
    let q = basis.numeric_map();
    if z.len() != q.len() {
        return Err(LiftError::Arity {
            expected: q.len(),
            got: z.len(),
        });
    }
    let dim = basis.rep().dim();
    let dmax = basis.degrees().iter().copied().max().unwrap_or(1).max(1);
    let radius = basis
        .degrees()
        .iter()
        .zip(z)
        .map(|(&d, v)| v.norm().powf(1.0 / d as f64))
        .fold(0.0, f64::max)
        + 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let lm = LmOptions {
        tol: opts.tol,
        max_iter: 120,
    };
    let mut best = (Vec::new(), f64::INFINITY);
    for _ in 0..opts.starts.max(1) {
        let w0: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)))
            .collect();
        let (w, r) = solve_near(q, z, &w0, lm);
        if r < best.1 {
            best = (w, r);
        }
        if best.1 <= opts.tol {
            break;
        }
    }
    if best.1 > opts.tol {
        return Err(LiftError::NoFiberPoint { residual: best.1 });
    }
    // at a point with isotropy the solver stops at distance ~ tol^(1/d)
    let merge = (10.0 * opts.tol.powf(1.0 / dmax as f64)).max(opts.tol.sqrt());
    let mut out: Vec<Vec<C64>> = Vec::new();
    for g in basis.rep().numeric_elements() {
        let p = act(&g, &best.0);
        if out.iter().all(|o| dist(o, &p) > merge) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| {
        let key = |v: &Vec<C64>| v.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>();
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

struct Tracker<'a> {
    q: &'a NumericMap,
    elements: Vec<DMatrix<C64>>,
    opts: TrackOptions,
    gap: f64,
    since_refresh: usize,
}

impl Tracker<'_> {
    fn lm(&self) -> LmOptions {
        LmOptions {
            tol: self.opts.tol,
            max_iter: 40,
        }
    }

    fn refresh(&mut self, w: &[C64]) {
        self.gap = fiber_gap(&self.elements, w);
        self.since_refresh = 0;
    }

    /// Euler predictor from w over z0 toward z1.
    fn predict(&self, w: &[C64], z0: &[C64], z1: &[C64]) -> Vec<C64> {
        let j = self.q.jacobian(w);
        let dz = DVector::from_iterator(z0.len(), z1.iter().zip(z0).map(|(a, b)| a - b));
        match j.svd(true, true).solve(&dz, 1e-12) {
            Ok(dw) => w.iter().zip(dw.iter()).map(|(a, b)| a + b).collect(),
            Err(_) => w.to_vec(),
        }
    }

    /// Moves w over target(t0) to a point over target(t1), halving as needed.
    fn advance(
        &mut self,
        target: &dyn Fn(f64) -> Vec<C64>,
        t0: f64,
        t1: f64,
        w: &[C64],
        depth: u32,
    ) -> Result<Vec<C64>, LiftError> {
        let (z0, z1) = (target(t0), target(t1));
        let pred = self.predict(w, &z0, &z1);
        let (w1, r) = solve_near(self.q, &z1, &pred, self.lm());
        if r <= self.opts.tol && dist(&w1, w) < self.gap / 2.0 {
            self.since_refresh += 1;
            if self.since_refresh >= self.opts.gap_refresh {
                self.refresh(&w1);
            }
            return Ok(w1);
        }
        if depth >= self.opts.max_halvings {
            return Err(LiftError::StepCollapse { t: t0 });
        }
        let tm = 0.5 * (t0 + t1);
        let wm = self.advance(target, t0, tm, w, depth + 1)?;
        self.advance(target, tm, t1, &wm, depth + 1)
    }
}

/// Follows the fiber over a path of Z (given in the coordinates of q).
pub fn track_fiber(
    basis: &InvariantBasis,
    path: &PathSpec,
    start: &[C64],
    opts: TrackOptions,
) -> Result<LiftedPath, LiftError> {
    let q = basis.numeric_map();
    if path.dim() != q.len() {
        return Err(LiftError::Arity {
            expected: q.len(),
            got: path.dim(),
        });
    }
    if start.len() != basis.rep().dim() {
        return Err(LiftError::Arity {
            expected: basis.rep().dim(),
            got: start.len(),
        });
    }
    let ts = path.params();
    let target = |t: f64| path.point(t);
    let r0 = residual(q, start, &target(0.0));
    if r0 > opts.residual_tol {
        return Err(LiftError::SeedOffFiber { residual: r0 });
    }
    let mut tr = Tracker {
        q,
        elements: basis.rep().numeric_elements(),
        opts,
        gap: 0.0,
        since_refresh: 0,
    };
    let mut upstairs = vec![start.to_vec()];
    tr.refresh(start);
    for k in 1..ts.len() {
        if tr.gap < 1e-6 {
            return Err(LiftError::NotPrincipal { t: ts[k - 1] });
        }
        let next = tr.advance(&target, ts[k - 1], ts[k], &upstairs[k - 1], 0)?;
        upstairs.push(next);
    }
    let downstairs: Vec<Vec<C64>> = ts.iter().map(|&t| target(t)).collect();
    let residuals = upstairs
        .iter()
        .zip(&downstairs)
        .map(|(w, z)| residual(q, w, z))
        .collect();
    Ok(LiftedPath {
        in_wall_zone: vec![false; ts.len()],
        ts,
        downstairs,
        upstairs,
        residuals,
        wall_events: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct Monodromy {
    /// index of h with w(1) = h·w(0)
    pub element: usize,
    pub mismatch: f64,
    pub lifted: LiftedPath,
}

/// The deck transformation obtained by lifting a closed loop of Z from `base`.
pub fn monodromy(
    basis: &InvariantBasis,
    lp: &PathSpec,
    base: &[C64],
    opts: TrackOptions,
) -> Result<Monodromy, LiftError> {
    if !lp.closed {
        return Err(LiftError::Path("monodromy needs a closed loop".into()));
    }
    let lifted = track_fiber(basis, lp, base, opts)?;
    let end = lifted.end().to_vec();
    let (element, mismatch) = basis
        .rep()
        .numeric_elements()
        .iter()
        .enumerate()
        .map(|(i, g)| (i, dist(&act(g, base), &end)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("identity");
    if mismatch > opts.residual_tol {
        return Err(LiftError::TrackingLost { mismatch });
    }
    Ok(Monodromy {
        element,
        mismatch,
        lifted,
    })
}

/// Zone radius around hyperplanes at v: capped by a quarter of the distance to V₂.
fn zone_at(strat: &Stratification, v: &[C64], opts: &TrackOptions) -> f64 {
    opts.wall_zone.min(0.25 * strat.distance_to_deep_locus(v))
}

fn nearest_plane<'a>(planes: &'a [Subspace], v: &[C64]) -> Option<(usize, f64)> {
    planes
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.distance(v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Sample parameters refined so consecutive samples near a hyperplane are
/// closer than half the zone radius.
fn refined_params(path: &PathSpec, strat: &Stratification, opts: &TrackOptions) -> Vec<f64> {
    let mut ts = path.params();
    let planes = strat.reflection_locus();
    if planes.is_empty() {
        return ts;
    }
    let mut i = 0;
    while i + 1 < ts.len() {
        let (a, b) = (path.point(ts[i]), path.point(ts[i + 1]));
        let step = dist(&a, &b);
        let near = nearest_plane(planes, &a).map_or(f64::INFINITY, |p| p.1)
            .min(nearest_plane(planes, &b).map_or(f64::INFINITY, |p| p.1));
        let zone = zone_at(strat, &a, opts).min(zone_at(strat, &b, opts));
        if step > zone / 2.0 && near < step + zone && ts[i + 1] - ts[i] > 1e-9 {
            ts.insert(i + 1, 0.5 * (ts[i] + ts[i + 1]));
        } else {
            i += 1;
        }
    }
    ts
}

/// Lifts f ∘ p along γ ⊂ V to W, starting from `seed` over f(p(γ(0))).
pub fn lift_along_path(
    strat_v: &Stratification,
    strat_w: &Stratification,
    f: &QuotientMap,
    path: &PathSpec,
    seed: &[C64],
    opts: TrackOptions,
) -> Result<LiftedPath, LiftError> {
    let (bv, bw) = (strat_v.basis(), strat_w.basis());
    if bv.weights() != f.source_weights() || bw.weights() != f.target_weights() {
        return Err(LiftError::WeightMismatch);
    }
    if path.dim() != bv.rep().dim() {
        return Err(LiftError::Arity {
            expected: bv.rep().dim(),
            got: path.dim(),
        });
    }
    if seed.len() != bw.rep().dim() {
        return Err(LiftError::Arity {
            expected: bw.rep().dim(),
            got: seed.len(),
        });
    }
    let matches = if opts.check_components {
        let m = component_matching(f, strat_v, strat_w, 4, 1e-6, opts.seed)?;
        for c in &m {
            let ok = c.target.is_some_and(|j| {
                strat_w.codim_one()[j].order == strat_v.codim_one()[c.source].order
            });
            if !ok {
                return Err(LiftError::ComponentMismatch { component: c.source });
            }
        }
        Some(m)
    } else {
        None
    };

    let pv = bv.numeric_map();
    let q = bw.numeric_map();
    let fnum = f.numeric();
    let target = |t: f64| fnum.eval(&pv.eval(&path.point(t)));
    let ts = refined_params(path, strat_v, &opts);
    for &t in &ts {
        let d = strat_v.distance_to_deep_locus(&path.point(t));
        if d <= opts.wall_margin {
            return Err(LiftError::TooCloseToDeepLocus { t, distance: d });
        }
    }
    let r0 = residual(q, seed, &target(0.0));
    if r0 > opts.residual_tol {
        return Err(LiftError::SeedOffFiber { residual: r0 });
    }

    let planes_v = strat_v.reflection_locus();
    let planes_w = strat_w.reflection_locus();
    let in_zone = |t: f64| -> Option<usize> {
        let v = path.point(t);
        let (i, d) = nearest_plane(planes_v, &v)?;
        (d < zone_at(strat_v, &v, &opts)).then_some(i)
    };

    let mut tr = Tracker {
        q,
        elements: bw.rep().numeric_elements(),
        opts,
        gap: 0.0,
        since_refresh: 0,
    };
    let mut upstairs = vec![seed.to_vec()];
    let mut zone_flags = vec![false];
    let mut events = Vec::new();
    tr.refresh(seed);
    let mut k = 1;
    while k < ts.len() {
        let prev = upstairs[k - 1].clone();
        let plane = match in_zone(ts[k]) {
            Some(p) if k > 1 || in_zone(ts[0]).is_none() => Some(p),
            _ => None,
        };
        let Some(pi) = plane else {
            if planes_v
                .iter()
                .any(|s| s.distance(&path.point(ts[k])) < 2.0 * opts.wall_zone)
            {
                tr.refresh(&prev);
            }
            let next = tr.advance(&target, ts[k - 1], ts[k], &prev, 0)?;
            upstairs.push(next);
            zone_flags.push(false);
            k += 1;
            continue;
        };

        // slice model through the hyperplane planes_v[pi]
        let hv = &planes_v[pi];
        let comp_v = hv.component.expect("hyperplane");
        let comp_w = matches.as_ref().and_then(|m| m[comp_v].target);
        let candidates: Vec<&Subspace> = planes_w
            .iter()
            .filter(|s| comp_w.is_none_or(|c| s.component == Some(c)))
            .collect();
        let hw = candidates
            .iter()
            .min_by(|a, b| a.distance(&prev).total_cmp(&b.distance(&prev)))
            .copied()
            .ok_or(LiftError::ComponentMismatch { component: comp_v })?;
        let (_, yv0, _) = hv.split(&path.point(ts[k - 1])).expect("hyperplane");
        let (_, yw0, ew) = hw.split(&prev).expect("hyperplane");
        if yv0.norm() < 1e-12 {
            return Err(LiftError::NearTangentialWall { t: ts[k - 1] });
        }
        let rho = yw0 / yv0;
        let s = bw.rep().element(hw.reflection.expect("hyperplane")).embed_numeric();
        let r = strat_w.codim_one()[hw.component.expect("hyperplane")].order;

        let mut end = k;
        while end < ts.len() && in_zone(ts[end]) == Some(pi) {
            end += 1;
        }
        // closest approach and transversality there
        let (jmin, dmin) = (k..end)
            .map(|j| (j, hv.distance(&path.point(ts[j]))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty run");
        let (ja, jb) = (jmin.saturating_sub(1), (jmin + 1).min(ts.len() - 1));
        let (pa, pb) = (path.point(ts[ja]), path.point(ts[jb]));
        let dy = hv.split(&pb).expect("hyperplane").1 - hv.split(&pa).expect("hyperplane").1;
        let dgamma = dist(&pa, &pb);
        let zone_here = zone_at(strat_v, &path.point(ts[jmin]), &opts);
        if dmin < zone_here / 2.0 && dgamma > 0.0 && dy.norm() / dgamma < 0.2 {
            return Err(LiftError::NearTangentialWall { t: ts[jmin] });
        }

        // every zone sample and the first sample past the zone
        let last = end.min(ts.len() - 1);
        let mut chosen_at_exit = (0, 0);
        for j in k..=last {
            let before = upstairs[j - 1].clone();
            let (xw, _, _) = hw.split(&before).expect("hyperplane");
            let (_, yv, _) = hv.split(&path.point(ts[j])).expect("hyperplane");
            let pred: Vec<C64> = xw.iter().zip(&ew).map(|(x, e)| x + rho * yv * e).collect();
            let z = target(ts[j]);
            let (w, res) = solve_near(q, &z, &pred, tr.lm());
            if res > opts.tol {
                return Err(LiftError::StepCollapse { t: ts[j] });
            }
            let mut branches: Vec<Vec<C64>> = Vec::new();
            let mut p = w.clone();
            for _ in 0..r {
                if branches.iter().all(|b| dist(b, &p) > 1e-8) {
                    branches.push(p.clone());
                }
                p = act(&s, &p);
            }
            branches.sort_by(|a, b| {
                let arg = |v: &Vec<C64>| {
                    let a = hw.split(v).expect("hyperplane").1.arg();
                    if a < -1e-12 { a + 2.0 * std::f64::consts::PI } else { a.max(0.0) }
                };
                arg(a).total_cmp(&arg(b))
            });
            let (bi, _) = branches
                .iter()
                .enumerate()
                .map(|(i, b)| (i, dist(b, &pred)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            chosen_at_exit = (bi, branches.len());
            upstairs.push(branches[bi].clone());
            zone_flags.push(j < end);
        }
        events.push(WallEvent {
            t: ts[jmin],
            component: comp_v,
            r,
            admissible_branches: chosen_at_exit.1,
            chosen_branch: chosen_at_exit.0,
        });
        tr.refresh(upstairs.last().expect("nonempty"));
        k = last + 1;
    }

    let downstairs: Vec<Vec<C64>> = ts.iter().map(|&t| target(t)).collect();
    let residuals = upstairs
        .iter()
        .zip(&downstairs)
        .map(|(w, z)| residual(q, w, z))
        .collect();
    Ok(LiftedPath {
        ts,
        downstairs,
        upstairs,
        residuals,
        in_wall_zone: zone_flags,
        wall_events: events,
    })
}
