//! Programmatic generating curves for the standard examples.
//!
//! The basic pieces are Archimedean spirals around a point on the r axis
//! that start and end on the z axis. A clockwise spiral with m full laps
//! crosses itself m times and gives f_k for k = 2m + 1; its counterclockwise
//! counterpart gives f_k for k = 1 - 2m. Small scaled copies of the
//! counterclockwise spiral, spliced into a larger spiral, give the g_k.

use std::f64::consts::PI;

use super::GeneratingCurve;

/// Points tagged with their spiral angle (`None` on straight pieces).
type Tagged = Vec<(f64, f64, Option<f64>)>;

const CENTRE: f64 = 6.0;
const INNER_RADIUS: f64 = 2.0;
const SAMPLES_PER_LAP: usize = 600;
const TAIL_SAMPLES: usize = 200;

fn curve(points: impl IntoIterator<Item = (f64, f64)>) -> GeneratingCurve {
    GeneratingCurve::new(points.into_iter().map(|(r, z)| [r, z]).collect())
}

/// Straight segment from the last point in direction `d` back to the axis.
fn tail_to_axis(pts: &mut Tagged, d: (f64, f64)) {
    let (r, z, _) = *pts.last().expect("spiral has points");
    let len = -r / d.0;
    for i in 1..=TAIL_SAMPLES {
        let s = len * i as f64 / TAIL_SAMPLES as f64;
        pts.push((r + d.0 * s, z + d.1 * s, None));
    }
    let last = pts.len() - 1;
    pts[last].0 = 0.0;
}

/// Spiral angles from `start` to `end` in `steps` steps. Interior samples
/// sit at half-integer fractions, so no sample lands on a self-crossing
/// (those occur at odd-over-odd fractions).
fn angles(start: f64, end: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..=steps).map(move |i| {
        let f = match i {
            0 => 0.0,
            i if i == steps => 1.0,
            i => (i as f64 - 0.5) / (steps - 1) as f64,
        };
        start + (end - start) * f
    })
}

/// Clockwise spiral with `m` laps around (c, 0), from the upper axis to the
/// lower axis; returns the points and the final spiral angle. A horizontal
/// lead-in at height `c - 1` joins the axis to the top of the outer lap.
fn clockwise(m: usize, c: f64, inner: f64, per_lap: usize) -> (Tagged, f64) {
    let phi0 = PI / 2.0;
    let phi_end = 2.0 * PI * (m as f64 + 1.0) - PI / 4.0;
    let rho0 = c - 1.0;
    let mut pts: Tagged = (0..TAIL_SAMPLES)
        .map(|i| (c * i as f64 / TAIL_SAMPLES as f64, rho0, None))
        .collect();
    pts.extend(angles(phi0, phi_end, per_lap * (m + 1)).map(|phi| {
        let rho = rho0 - (rho0 - inner) * (phi - phi0) / (phi_end - phi0);
        (c - rho * phi.cos(), rho * phi.sin(), Some(phi))
    }));
    tail_to_axis(&mut pts, (-phi_end.cos(), phi_end.sin()));
    (pts, phi_end)
}

/// Counterclockwise spiral with `m` laps around (c, 0), starting at the
/// origin and heading down.
fn counterclockwise(m: usize, c: f64, inner: f64, per_lap: usize) -> (Tagged, f64) {
    let end_angle = PI / 4.0;
    let phi_end = 2.0 * PI * m as f64 + end_angle;
    let mut pts: Tagged = angles(0.0, phi_end, per_lap * (m + 1))
        .map(|phi| {
            let rho = c - (c - inner) * phi / phi_end;
            (c - rho * phi.cos(), -rho * phi.sin(), Some(phi))
        })
        .collect();
    pts[0] = (0.0, 0.0, Some(0.0));
    tail_to_axis(&mut pts, (-end_angle.cos(), -end_angle.sin()));
    (pts, phi_end)
}

/// The round sphere: a half circle sampled with `n` segments.
pub fn half_circle(n: usize) -> GeneratingCurve {
    let mut c = curve((0..=n).map(|i| {
        let t = PI * i as f64 / n as f64;
        (t.sin(), t.cos())
    }));
    c.points[n][0] = 0.0;
    c
}

/// Generating curve of f_k (k odd).
pub fn f_curve(k: i64) -> GeneratingCurve {
    assert!(k % 2 != 0, "k must be odd");
    let m = ((k - 1).unsigned_abs() / 2) as usize;
    let (pts, _) = if k >= 1 {
        clockwise(m, CENTRE, INNER_RADIUS, SAMPLES_PER_LAP)
    } else {
        counterclockwise(m, CENTRE, INNER_RADIUS, SAMPLES_PER_LAP)
    };
    curve(pts.into_iter().map(|(r, z, _)| (r, z)))
}

/// The curve of j, one self-crossing.
pub fn j_curve() -> GeneratingCurve {
    f_curve(3)
}

/// Generating curve of g_k (k odd): the spiral of f_{k'} with the same
/// number of laps and opposite handedness, carrying two small spirals.
pub fn g_curve(k: i64) -> GeneratingCurve {
    assert!(k % 2 != 0, "k must be odd");
    if k == 1 {
        return half_circle(400);
    }
    let m = ((k - 1).unsigned_abs() / 2) as usize;
    let (main, phi_end, side) = if k > 1 {
        let (p, e) = clockwise(m, CENTRE, INNER_RADIUS, SAMPLES_PER_LAP);
        (p, e, 1.0)
    } else {
        let (p, e) = counterclockwise(m, CENTRE, INNER_RADIUS, SAMPLES_PER_LAP);
        (p, e, -1.0)
    };
    with_loops(&main, [phi_end - 1.4 * PI, phi_end - 0.7 * PI], m, side)
}

/// A half circle carrying two small loops: exactly two self-crossings.
pub fn two_lobes() -> GeneratingCurve {
    let (main, phi_end) = clockwise(0, CENTRE, INNER_RADIUS, SAMPLES_PER_LAP);
    with_loops(&main, [phi_end - 0.9 * PI, phi_end - 0.45 * PI], 1, 1.0)
}

/// Splices two scaled counterclockwise spirals with `laps` laps into `main`
/// at the given spiral angles, on the side `side` (+1 left of the direction
/// of travel, -1 right).
fn with_loops(main: &Tagged, targets: [f64; 2], laps: usize, side: f64) -> GeneratingCurve {
    const SCALE: f64 = 0.1;
    let (small, _) = counterclockwise(laps, 1.0, 0.3, 300);
    let small: Vec<(f64, f64)> = small.iter().map(|&(r, z, _)| (r * SCALE, z * SCALE)).collect();

    let mut out = Vec::new();
    let mut next_target = 0;
    let mut i = 0;
    while i < main.len() {
        let (r, z, phi) = main[i];
        let due = next_target < targets.len() && phi.is_some_and(|phi| phi >= targets[next_target]);
        if !due {
            out.push((r, z));
            i += 1;
            continue;
        }
        let (dr, dz) = (main[i + 1].0 - r, main[i + 1].1 - z);
        let len = dr.hypot(dz);
        let t = (dr / len, dz / len);
        let n = (-t.1, t.0);
        // Local r runs along the side normal, local z against the direction
        // of travel.
        for &(lr, lz) in &small {
            out.push((r + side * lr * n.0 - lz * t.0, z + side * lr * n.1 - lz * t.1));
        }
        let end = *out.last().expect("loop has points");
        let advance = (end.0 - r) * t.0 + (end.1 - z) * t.1;
        i += 1;
        while (main[i].0 - r) * t.0 + (main[i].1 - z) * t.1 < advance + 1e-3 {
            i += 1;
        }
        next_target += 1;
    }
    curve(out)
}
