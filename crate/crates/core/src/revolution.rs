//! Double point trees of spheres of revolution.
//!
//! A generating curve in the half plane r >= 0 runs from the axis back to the
//! axis; rotating it about the z axis gives an immersed sphere. Each planar
//! self-crossing rotates into one circle of double points, whose two preimage
//! circles are the crossing's two curve parameters. The tree is therefore a
//! path (one vertex per curve segment between consecutive crossing
//! parameters), with the two edges of each crossing paired.

pub mod fixtures;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{DoublePointTree, Edge, ValidationReport, Vertex};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Crossings at angles below this are rejected as tangential.
pub const MIN_CROSSING_ANGLE_DEG: f64 = 1.0;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratingCurve {
    /// `[r, z]` pairs; the first and last lie on the axis.
    pub points: Vec<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl GeneratingCurve {
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        GeneratingCurve {
            points,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        GeneratingCurve {
            points,
            tolerance: self.tolerance,
        }
    }

    /// The mirror image under z -> -z.
    pub fn reflected(&self) -> Self {
        GeneratingCurve {
            points: self.points.iter().map(|&[r, z]| [r, -z]).collect(),
            tolerance: self.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarCrossing {
    pub location: [f64; 2],
    /// Arc-length parameters in [0, 1] with `t1 < t2`.
    pub t1: f64,
    pub t2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceSample {
    pub point: [f64; 2],
    pub winding: i64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RevolutionError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("crossing at ({r}, {z}) is within tolerance of a curve vertex")]
    NearVertex { r: f64, z: f64 },
    #[error("crossing at ({r}, {z}) has angle {angle_deg:.4} degrees, below the threshold")]
    Tangential { r: f64, z: f64, angle_deg: f64 },
    #[error("segments {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("crossings at ({0}, {1}) and ({2}, {3}) are too close (triple point or non-generic curve)")]
    Coincident(f64, f64, f64, f64),
    #[error("point ({0}, {1}) is within tolerance of the curve")]
    PointOnCurve(f64, f64),
    #[error("could not find a clean face sample beside segment {0}")]
    DegenerateOffset(usize),
    #[error("winding data yields an invalid tree: {0}")]
    Inconsistent(ValidationReport),
}

type P = [f64; 2];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: P) -> f64 {
    a[0].hypot(a[1])
}

fn dist(a: P, b: P) -> f64 {
    norm(sub(a, b))
}

fn point_segment_distance(p: P, a: P, b: P) -> f64 {
    let d = sub(b, a);
    let len2 = dot(d, d);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = (dot(sub(p, a), d) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * d[0], a[1] + s * d[1]])
}

fn check_curve(curve: &GeneratingCurve) -> Result<(), RevolutionError> {
    let tol = curve.tolerance;
    let bad = |msg: String| Err(RevolutionError::InvalidCurve(msg));
    if !(tol.is_finite() && tol > 0.0) {
        return bad(format!("tolerance must be positive, got {tol}"));
    }
    let pts = &curve.points;
    if pts.len() < 2 {
        return bad("need at least two points".into());
    }
    if pts.iter().flatten().any(|x| !x.is_finite()) {
        return bad("coordinates must be finite".into());
    }
    for (i, end) in [0, pts.len() - 1].into_iter().enumerate() {
        if pts[end][0].abs() > tol {
            let which = if i == 0 { "first" } else { "last" };
            return bad(format!("{which} point must lie on the axis (r = 0)"));
        }
    }
    if (pts[0][1] - pts[pts.len() - 1][1]).abs() <= tol {
        return bad("the two axis points coincide".into());
    }
    if let Some(i) = (1..pts.len() - 1).find(|&i| pts[i][0] <= tol) {
        return bad(format!("interior point {i} must have r > 0"));
    }
    if let Some(i) = (1..pts.len()).find(|&i| dist(pts[i - 1], pts[i]) <= tol) {
        return bad(format!("points {} and {i} coincide", i - 1));
    }
    Ok(())
}

/// Cumulative arc length at each point.
fn arc_lengths(pts: &[P]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in pts.windows(2) {
        acc += dist(w[0], w[1]);
        out.push(acc);
    }
    out
}

/// All transverse self-crossings, sorted by `t1`.
pub fn self_intersections(curve: &GeneratingCurve) -> Result<Vec<PlanarCrossing>, RevolutionError> {
    check_curve(curve)?;
    let tol = curve.tolerance;
    let pts = &curve.points;
    let lengths = arc_lengths(pts);
    let total = lengths[pts.len() - 1];
    let n = pts.len() - 1;

    let bounds: Vec<(f64, f64)> = (0..n)
        .map(|i| (pts[i][0].min(pts[i + 1][0]), pts[i][0].max(pts[i + 1][0])))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| bounds[a].0.total_cmp(&bounds[b].0));

    let min_sin = MIN_CROSSING_ANGLE_DEG.to_radians().sin();
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if bounds[j].0 > bounds[i].1 + tol {
                break;
            }
            if i.abs_diff(j) < 2 {
                continue;
            }
            let (i, j) = (i.min(j), i.max(j));
            let (p, q, r, s) = (pts[i], pts[i + 1], pts[j], pts[j + 1]);
            let (d1, d2) = (sub(q, p), sub(s, r));
            let (l1, l2) = (norm(d1), norm(d2));
            let den = cross(d1, d2);
            let w = sub(r, p);
            if den.abs() <= min_sin * l1 * l2 * 1e-6 {
                // Parallel: only collinear overlap matters.
                if cross(d1, w).abs() / l1 <= tol {
                    let (a0, a1) = (dot(w, d1) / l1, dot(sub(s, p), d1) / l1);
                    if a0.max(a1) >= -tol && a0.min(a1) <= l1 + tol {
                        return Err(RevolutionError::Overlap(i, j));
                    }
                }
                continue;
            }
            let a = cross(w, d2) / den;
            let b = cross(w, d1) / den;
            let (ea, eb) = (tol / l1, tol / l2);
            if a < -ea || a > 1.0 + ea || b < -eb || b > 1.0 + eb {
                continue;
            }
            let location = [p[0] + a * d1[0], p[1] + a * d1[1]];
            let near = |x: f64, e: f64| x <= e || x >= 1.0 - e;
            if near(a, ea) || near(b, eb) {
                return Err(RevolutionError::NearVertex {
                    r: location[0],
                    z: location[1],
                });
            }
            let sin = den.abs() / (l1 * l2);
            if sin < min_sin {
                return Err(RevolutionError::Tangential {
                    r: location[0],
                    z: location[1],
                    angle_deg: sin.asin().to_degrees(),
                });
            }
            out.push(PlanarCrossing {
                location,
                t1: (lengths[i] + a * l1) / total,
                t2: (lengths[j] + b * l2) / total,
            });
        }
    }
    out.sort_by(|x, y| x.t1.total_cmp(&y.t1).then(x.t2.total_cmp(&y.t2)));

    for (k, c) in out.iter().enumerate() {
        for d in &out[k + 1..] {
            if dist(c.location, d.location) <= tol {
                return Err(RevolutionError::Coincident(
                    c.location[0],
                    c.location[1],
                    d.location[0],
                    d.location[1],
                ));
            }
        }
    }
    let mut params: Vec<f64> = out.iter().flat_map(|c| [c.t1, c.t2]).collect();
    params.sort_by(f64::total_cmp);
    if let Some(w) = params.windows(2).find(|w| (w[1] - w[0]) * total <= tol) {
        let p = point_at(pts, &lengths, w[0] * total).0;
        return Err(RevolutionError::NearVertex { r: p[0], z: p[1] });
    }
    Ok(out)
}

/// The curve run from its upper axis point to its lower one. Degrees are
/// computed in this direction, so reversing the input changes nothing.
fn downward(pts: &[P]) -> Vec<P> {
    let mut out = pts.to_vec();
    if pts[0][1] < pts[pts.len() - 1][1] {
        out.reverse();
    }
    out
}

/// The curve followed by its mirror image (r -> -r) traversed backwards.
fn doubled(pts: &[P]) -> Vec<P> {
    pts.iter()
        .copied()
        .chain(pts.iter().rev().map(|&[r, z]| [-r, z]))
        .collect()
}

/// Winding number around `p`, counterclockwise positive.
fn ccw_winding(polygon: &[P], p: P) -> i64 {
    let mut w = 0;
    for k in 0..polygon.len() {
        let (a, b) = (polygon[k], polygon[(k + 1) % polygon.len()]);
        let upward = a[1] <= p[1] && p[1] < b[1];
        let downward = b[1] <= p[1] && p[1] < a[1];
        if upward || downward {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x > p[0] {
                w += if upward { 1 } else { -1 };
            }
        }
    }
    w
}

/// Winding with the sign fixed so the inside of the standard half circle
/// (run from the north pole to the south pole through r > 0) is +1.
fn calibrated(polygon: &[P], p: P, flip: bool) -> i64 {
    let w = -ccw_winding(polygon, p);
    if flip {
        -w
    } else {
        w
    }
}

/// Winding number of the doubled closed curve around `point`.
pub fn doubled_winding(curve: &GeneratingCurve, point: [f64; 2]) -> Result<i64, RevolutionError> {
    check_curve(curve)?;
    let polygon = doubled(&downward(&curve.points));
    let closed = (0..polygon.len()).map(|k| (polygon[k], polygon[(k + 1) % polygon.len()]));
    if point.iter().any(|x| !x.is_finite())
        || closed
            .into_iter()
            .any(|(a, b)| point_segment_distance(point, a, b) <= curve.tolerance)
    {
        return Err(RevolutionError::PointOnCurve(point[0], point[1]));
    }
    Ok(calibrated(&polygon, point, false))
}

/// Position and segment index at arc length `s`.
fn point_at(pts: &[P], lengths: &[f64], s: f64) -> (P, usize) {
    let i = match lengths.binary_search_by(|l| l.partial_cmp(&s).unwrap_or(Ordering::Less)) {
        Ok(i) | Err(i) => i.clamp(1, pts.len() - 1) - 1,
    };
    let seg = lengths[i + 1] - lengths[i];
    let f = ((s - lengths[i]) / seg).clamp(0.0, 1.0);
    let (a, b) = (pts[i], pts[i + 1]);
    ([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])], i)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RevolutionOptions {
    /// Use the opposite normal, which negates every degree.
    pub flip_orientation: bool,
}

pub fn tree_of_revolution(curve: &GeneratingCurve) -> Result<DoublePointTree, RevolutionError> {
    tree_of_revolution_with(curve, RevolutionOptions::default())
}

pub fn tree_of_revolution_with(
    curve: &GeneratingCurve,
    options: RevolutionOptions,
) -> Result<DoublePointTree, RevolutionError> {
    check_curve(curve)?;
    let curve = GeneratingCurve {
        points: downward(&curve.points),
        tolerance: curve.tolerance,
    };
    let crossings = self_intersections(&curve)?;
    let pts = &curve.points;
    let lengths = arc_lengths(pts);
    let total = lengths[pts.len() - 1];

    // (parameter, crossing, is second parameter)
    let mut params: Vec<(f64, usize, bool)> = crossings
        .iter()
        .enumerate()
        .flat_map(|(k, c)| [(c.t1, k, false), (c.t2, k, true)])
        .collect();
    params.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cuts = vec![0.0];
    cuts.extend(params.iter().map(|p| p.0));
    cuts.push(1.0);

    let polygon = doubled(pts);
    let mut vertices = Vec::with_capacity(cuts.len() - 1);
    for s in 0..cuts.len() - 1 {
        let sample = face_samples(
            pts,
            &lengths,
            &polygon,
            cuts[s] * total,
            cuts[s + 1] * total,
            curve.tolerance,
            options.flip_orientation,
        )
        .ok_or(RevolutionError::DegenerateOffset(s))?;
        vertices.push(Vertex {
            id: format!("s{s}"),
            delta: sample[0].winding + sample[1].winding,
        });
    }

    let mut edges = Vec::with_capacity(params.len());
    let mut slot = vec![[0usize; 2]; crossings.len()];
    for (i, &(_, k, second)) in params.iter().enumerate() {
        // Both edges of a pair point away from the interval between them.
        let (tail, head) = if second { (i, i + 1) } else { (i + 1, i) };
        edges.push(Edge {
            id: format!("x{i}"),
            tail,
            head,
        });
        slot[k][usize::from(second)] = i;
    }
    let mut partner = vec![None; params.len()];
    for [a, b] in slot {
        partner[a] = Some(b);
        partner[b] = Some(a);
    }
    let tree = DoublePointTree::from_raw(vertices, edges, partner);
    let report = tree.validate();
    if report.ok {
        Ok(tree)
    } else {
        Err(RevolutionError::Inconsistent(report))
    }
}

/// Samples the faces on either side of the curve piece between arc lengths
/// `lo` and `hi`, at the middle of the longest straight stretch.
fn face_samples(
    pts: &[P],
    lengths: &[f64],
    polygon: &[P],
    lo: f64,
    hi: f64,
    tol: f64,
    flip: bool,
) -> Option<[FaceSample; 2]> {
    let mut best: Option<(f64, usize, f64)> = None;
    for i in 0..pts.len() - 1 {
        let (a, b) = (lengths[i].max(lo), lengths[i + 1].min(hi));
        if b > a && best.is_none_or(|(len, _, _)| b - a > len) {
            best = Some((b - a, i, (a + b) / 2.0));
        }
    }
    let (_, seg, mid) = best?;
    let (p, _) = point_at(pts, lengths, mid);
    let d = sub(pts[seg + 1], pts[seg]);
    let len = norm(d);
    let normal = [-d[1] / len, d[0] / len];

    // Distance from the sample to every other piece of the doubled curve.
    let m = polygon.len();
    let clearance = (0..m)
        .filter(|&k| k != seg)
        .map(|k| point_segment_distance(p, polygon[k], polygon[(k + 1) % m]))
        .fold(f64::INFINITY, f64::min);
    let mut eps = (tol * 1e6).min(clearance / 4.0);
    for _ in 0..30 {
        if eps <= 0.0 {
            return None;
        }
        let side = |s: f64| [p[0] + s * eps * normal[0], p[1] + s * eps * normal[1]];
        let (a, b) = (side(1.0), side(-1.0));
        let (wa, wb) = (calibrated(polygon, a, flip), calibrated(polygon, b, flip));
        if (wa - wb).abs() == 1 {
            return Some([
                FaceSample { point: a, winding: wa },
                FaceSample { point: b, winding: wb },
            ]);
        }
        eps /= 2.0;
    }
    None
}
