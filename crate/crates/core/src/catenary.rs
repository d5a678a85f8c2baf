//! Catenary curve evaluation and the inverse solver.
//!
//! A uniform flexible cable hanging between two points takes the shape
//! `y = a*cosh((x - x0)/a) + C`. Given the two endpoints and the cable
//! length, [`solve_from_endpoints`] recovers the parameters
//! `{a, x0, C, s1, s2}`; [`end_tensions`] then yields the horizontal and
//! vertical tension at either end (`H = omega*a`, `Tv = omega*s`).

use thiserror::Error;

/// A point in the 2D catenary plane (radial/horizontal abscissa, height).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    /// Abscissa (m).
    pub x: f64,
    /// Ordinate (m).
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Straight-line distance to another point.
    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Physical cable constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherProperties {
    /// Weight per length unit (N/m).
    pub omega: f64,
    /// Total cable length (m).
    pub s_total: f64,
}

impl TetherProperties {
    pub fn new(omega: f64, s_total: f64) -> Self {
        Self { omega, s_total }
    }
}

/// Solved curve parameters for one cable configuration.
///
/// `s1` and `s2` are the arc lengths from the curve's lowest point to the
/// origin-side and UAV-side endpoints; both are stored non-negative and
/// `s1 + s2` equals the cable length whenever the lowest point lies inside
/// the span (the solver rejects configurations where it does not).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenaryParams {
    /// Curve shape parameter (m); always positive.
    pub a: f64,
    /// Abscissa of the curve's lowest point (m).
    pub x0: f64,
    /// Vertical offset between world frame and catenary frame (m).
    pub c: f64,
    /// Arc length from the lowest point to the origin end (m).
    pub s1: f64,
    /// Arc length from the lowest point to the UAV end (m).
    pub s2: f64,
}

/// Horizontal/vertical tension magnitudes at one cable end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionPolar {
    /// Horizontal tension (N); constant along the cable.
    pub h: f64,
    /// Vertical tension (N).
    pub tv: f64,
    /// Total tension (N), `sqrt(h^2 + tv^2)`.
    pub mag: f64,
}

/// Which cable end a tension query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// The ground/anchor side (arc length `s1`).
    Origin,
    /// The vehicle side (arc length `s2`).
    Uav,
}

/// Termination settings for the inverse solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Residual tolerance applied to the curve equations (m).
    pub tol: f64,
    /// Iteration cap for the Newton loop and the bisection fallback.
    pub max_iter: usize,
    /// Height differences below this are treated as a symmetric span (m).
    pub dy_epsilon: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            // Keeping dy_epsilon at the residual tolerance ensures the
            // symmetric shortcut never violates the endpoint equations by
            // more than tol.
            tol: 1e-9,
            max_iter: 100,
            dy_epsilon: 1e-9,
        }
    }
}

/// Inverse-solver failures.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CatenaryError {
    /// No sagging curve exists: the cable is not longer than the chord.
    #[error("tether shorter than chord (s_total = {s_total}, chord = {chord})")]
    TooShort { s_total: f64, chord: f64 },
    /// Endpoints share the same abscissa; the hanging shape is a vertical
    /// fold, not a catenary.
    #[error("endpoints are vertically aligned; no catenary through them")]
    VerticalSpan,
    /// The curve's minimum falls outside the endpoint span, so the
    /// arc-length sum constraint does not describe the physical cable.
    #[error("curve lowest point x0 = {x0} outside span [{x1}, {x2}] (taut configuration)")]
    LowestPointOutsideSpan { x0: f64, x1: f64, x2: f64 },
    /// The quadratic initial guess has no positive real root.
    #[error("no positive real root for the initial guess (inputs outside model validity)")]
    NoPhysicalRoot,
    /// The iteration failed to reach the requested tolerance.
    #[error("solver did not converge within {iterations} iterations (last residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Height of the curve at abscissa `x`: `a*cosh((x - x0)/a) + C`.
pub fn eval_height(params: &CatenaryParams, x: f64) -> f64 {
    params.a * ((x - params.x0) / params.a).cosh() + params.c
}

/// Arc length from the lowest point to abscissa `x`: `a*sinh(|x - x0|/a)`.
pub fn arc_length_from_lowest(params: &CatenaryParams, x: f64) -> f64 {
    params.a * ((x - params.x0).abs() / params.a).sinh()
}

/// Tension at the chosen end: `H = omega*a`, `Tv = omega*s_side`.
pub fn end_tensions(params: &CatenaryParams, tether: &TetherProperties, side: End) -> TensionPolar {
    let s = match side {
        End::Origin => params.s1,
        End::Uav => params.s2,
    };
    let h = tether.omega * params.a;
    let tv = tether.omega * s;
    TensionPolar {
        h,
        tv,
        mag: h.hypot(tv),
    }
}

/// Split the horizontal tension along the world x/y axes for azimuth `beta`.
pub fn decompose_horizontal(h: f64, beta: f64) -> (f64, f64) {
    (beta.cos() * h, beta.sin() * h)
}

/// Recover `(H, beta)` from x/y tension components.
///
/// `beta` is 0 by convention when `H` vanishes.
pub fn compose_horizontal(tx: f64, ty: f64) -> (f64, f64) {
    let h = tx.hypot(ty);
    if h == 0.0 {
        (0.0, 0.0)
    } else {
        (h, ty.atan2(tx))
    }
}

/// Shared pieces of the solve: half-span, height ratio and the scaled
/// arc-sum denominator `s_total*sqrt(1 - (dY/s_total)^2)`.
struct SpanGeometry {
    dx: f64,
    denom: f64,
}

impl SpanGeometry {
    fn new(dx: f64, dy: f64, s_total: f64) -> Self {
        let u = dy / s_total;
        Self {
            dx,
            denom: s_total * (1.0 - u * u).sqrt(),
        }
    }

    /// Scaled residual `(s1 + s2)/s_total - 1` for a trial parameter.
    ///
    /// Algebraically equivalent to the height-difference equation after
    /// eliminating x0, but stays well-conditioned as dY approaches zero
    /// (where the unscaled form degenerates to 0 = 0).
    fn residual(&self, a: f64) -> f64 {
        2.0 * a * (self.dx / a).sinh() / self.denom - 1.0
    }

    fn residual_derivative(&self, a: f64) -> f64 {
        let t = self.dx / a;
        2.0 * (t.sinh() - t * t.cosh()) / self.denom
    }
}

/// Initial estimate for the curve parameter from the 5th-order series
/// expansion of the hyperbolic sine.
///
/// Substituting `alpha = a^2` collapses the expansion of the arc-sum
/// equation to a quadratic in `alpha`; only the positive real root carries
/// physical meaning and its square root is returned.
///
/// `dx` is the half-span `(x2 - x1)/2`.
pub fn initial_guess_a(dx: f64, dy: f64, s_total: f64) -> Result<f64, CatenaryError> {
    let geo = SpanGeometry::new(dx, dy, s_total);
    // Quadratic coefficients in alpha = a^2. The leading coefficient is
    // dY/(2*sinh(atanh(dY/s))) - dx written in its singularity-free form
    // s*sqrt(1 - (dY/s)^2)/2 - dx; the constant term is -dx^5/5!.
    let qa = geo.denom / 2.0 - dx;
    let qb = -dx.powi(3) / 6.0;
    let qc = -dx.powi(5) / 120.0;
    if qa <= 0.0 {
        // Happens exactly when the cable is not longer than the chord.
        return Err(CatenaryError::NoPhysicalRoot);
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(CatenaryError::NoPhysicalRoot);
    }
    let alpha = (-qb + disc.sqrt()) / (2.0 * qa);
    // The negated form also rejects a NaN alpha.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(alpha > 0.0) {
        return Err(CatenaryError::NoPhysicalRoot);
    }
    Ok(alpha.sqrt())
}

/// Solve the curve through `p1` (origin side) and `p2` (UAV side) with
/// cable length `tether.s_total`.
///
/// Newton-Raphson with the analytic derivative runs on the scaled arc-sum
/// residual, starting from the series initial guess; if a Newton step
/// leaves the positive axis or stalls, a bracketing bisection fallback
/// finishes the job. The returned parameters satisfy both endpoint height
/// equations and `s1 + s2 = s_total` within `settings.tol`.
pub fn solve_from_endpoints(
    p1: Point2,
    p2: Point2,
    tether: &TetherProperties,
    settings: &SolverSettings,
) -> Result<CatenaryParams, CatenaryError> {
    let s_total = tether.s_total;
    let chord = p1.distance(&p2);
    if s_total <= chord {
        return Err(CatenaryError::TooShort { s_total, chord });
    }
    // Normalize so the span runs left to right; swap arc labels back later.
    let swapped = p2.x < p1.x;
    let (lo, hi) = if swapped { (p2, p1) } else { (p1, p2) };
    if hi.x - lo.x == 0.0 {
        return Err(CatenaryError::VerticalSpan);
    }

    let dx = (hi.x - lo.x) / 2.0;
    let x_avg = (hi.x + lo.x) / 2.0;
    let mut dy = hi.y - lo.y;
    if dy.abs() < settings.dy_epsilon {
        // Symmetric span: the lowest point is at mid-span exactly.
        dy = 0.0;
    }
    let geo = SpanGeometry::new(dx, dy, s_total);

    let a0 = initial_guess_a(dx, dy, s_total)?;
    // The scaled residual bounds every equation of the system: the arc sum
    // misses s_total by s_total*|F| and the height difference by |dY|*|F|.
    let tol_scaled = settings.tol / s_total;
    let a = newton_with_fallback(&geo, a0, tol_scaled, settings.max_iter)?;

    let x0 = x_avg - a * (dy / s_total).atanh();
    if x0 < lo.x || x0 > hi.x {
        return Err(CatenaryError::LowestPointOutsideSpan {
            x0,
            x1: lo.x,
            x2: hi.x,
        });
    }

    let c = lo.y - a * ((lo.x - x0) / a).cosh();
    let s_lo = a * ((lo.x - x0).abs() / a).sinh();
    let s_hi = a * ((hi.x - x0).abs() / a).sinh();
    let (s1, s2) = if swapped { (s_hi, s_lo) } else { (s_lo, s_hi) };
    Ok(CatenaryParams { a, x0, c, s1, s2 })
}

fn newton_with_fallback(
    geo: &SpanGeometry,
    a0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, CatenaryError> {
    let mut a = a0;
    let mut residual = geo.residual(a);
    for _ in 0..max_iter {
        if residual.abs() <= tol {
            return Ok(a);
        }
        let next = a - residual / geo.residual_derivative(a);
        if !next.is_finite() || next <= 0.0 {
            return bisect(geo, a0, tol, max_iter);
        }
        a = next;
        residual = geo.residual(a);
    }
    if residual.abs() <= tol {
        return Ok(a);
    }
    bisect(geo, a0, tol, max_iter)
}

/// Bracketing fallback around the initial guess. The residual is strictly
/// decreasing in `a`, so widening `[a0/100, 100*a0]` until the signs differ
/// always produces a valid bracket.
fn bisect(geo: &SpanGeometry, a0: f64, tol: f64, max_iter: usize) -> Result<f64, CatenaryError> {
    let mut lo = a0 / 100.0;
    let mut hi = a0 * 100.0;
    let mut guard = 0;
    while geo.residual(lo) < 0.0 {
        lo /= 100.0;
        guard += 1;
        if guard > 60 {
            return Err(CatenaryError::NoConvergence {
                iterations: guard,
                residual: geo.residual(lo),
            });
        }
    }
    guard = 0;
    while geo.residual(hi) > 0.0 {
        hi *= 100.0;
        guard += 1;
        if guard > 60 {
            return Err(CatenaryError::NoConvergence {
                iterations: guard,
                residual: geo.residual(hi),
            });
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..(max_iter * 4) {
        mid = 0.5 * (lo + hi);
        let r = geo.residual(mid);
        if r.abs() <= tol || (hi - lo) <= f64::EPSILON * mid {
            return Ok(mid);
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(CatenaryError::NoConvergence {
        iterations: max_iter * 4,
        residual: geo.residual(mid),
    })
}

/// Number of Newton iterations needed from the series guess; used by the
/// validation suite to bound solver effort.
pub fn newton_iterations(
    p1: Point2,
    p2: Point2,
    tether: &TetherProperties,
    settings: &SolverSettings,
) -> Result<usize, CatenaryError> {
    let (lo, hi) = if p2.x < p1.x { (p2, p1) } else { (p1, p2) };
    let dx = (hi.x - lo.x) / 2.0;
    let dy = hi.y - lo.y;
    let geo = SpanGeometry::new(dx, dy, tether.s_total);
    let mut a = initial_guess_a(dx, dy, tether.s_total)?;
    let tol_scaled = settings.tol / tether.s_total;
    for i in 0..settings.max_iter {
        if geo.residual(a).abs() <= tol_scaled {
            return Ok(i);
        }
        a -= geo.residual(a) / geo.residual_derivative(a);
        if !a.is_finite() || a <= 0.0 {
            return Err(CatenaryError::NoConvergence {
                iterations: i,
                residual: f64::NAN,
            });
        }
    }
    Err(CatenaryError::NoConvergence {
        iterations: settings.max_iter,
        residual: geo.residual(a),
    })
}
