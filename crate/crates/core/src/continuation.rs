//! Analytic continuation of `log f` and of `||v||_p = exp(log f(p) / p)`
//! along polylines in the complex plane.
//!
//! The imaginary part of `log f` is carried as an unwrapped real
//! accumulator, so the monodromy of a closed loop is read off directly as a
//! multiple of `2 pi i`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exppoly::{find_zeros, ExpPoly, Rectangle, Zero, ZeroSearchOptions, SINGULAR_REL};
use crate::vectors::RealVector;

/// Chord angle used to discretize circles.
const CIRCLE_STEP_DEG: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - z).norm()
}

impl Path {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two points".into()));
        }
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::InvalidInput("path point is not finite".into()));
        }
        if points.iter().any(|p| *p == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidInput("path passes through p = 0".into()));
        }
        Ok(Self { points })
    }

    pub fn segment(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn start(&self) -> Complex64 {
        self.points[0]
    }

    pub fn end(&self) -> Complex64 {
        self.points[self.points.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// Joins `other` onto the end of `self`; the endpoints must coincide.
    pub fn concat(&self, other: &Path) -> Result<Self> {
        if self.end() != other.start() {
            return Err(Error::InvalidInput(format!(
                "cannot join path ending at {} to path starting at {}",
                self.end(),
                other.start()
            )));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Self::new(points)
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Smallest distance from any segment to any of `zs`.
    pub fn clearance(&self, zs: &[Complex64]) -> f64 {
        self.points
            .windows(2)
            .flat_map(|w| zs.iter().map(move |&z| segment_distance(w[0], w[1], z)))
            .fold(f64::INFINITY, f64::min)
    }

    /// The loop of the continuation argument: up from the real point
    /// `base_p` to the height of `center`, across to the circle of `radius`
    /// about `center`, `turns` times around it, then back the same way.
    pub fn keyhole(
        base_p: f64,
        center: Complex64,
        radius: f64,
        orientation: Orientation,
        turns: u32,
    ) -> Result<Self> {
        if !(base_p > 0.0 && base_p.is_finite()) {
            return Err(Error::InvalidInput(format!("base point {base_p} must be > 0")));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("loop radius {radius} must be > 0")));
        }
        if radius >= center.im.abs() {
            return Err(Error::InvalidInput(format!(
                "loop of radius {radius} about {center} touches the real axis"
            )));
        }
        if (base_p - center.re).abs() <= radius {
            return Err(Error::InvalidInput(format!(
                "base point {base_p} lies under the loop about {center}"
            )));
        }
        if turns == 0 {
            return Err(Error::InvalidInput("loop needs at least one turn".into()));
        }

        let start_angle = if base_p > center.re { 0.0 } else { PI };
        let corner = Complex64::new(base_p, center.im);
        let per_turn = (360.0 / CIRCLE_STEP_DEG).round() as u32;
        let mut points = vec![Complex64::new(base_p, 0.0), corner];
        let steps = per_turn * turns;
        for k in 0..=steps {
            let theta = start_angle
                + orientation.sign() * 2.0 * PI * f64::from(k) / f64::from(per_turn);
            points.push(center + Complex64::from_polar(radius, theta));
        }
        // Close the circle exactly where it was entered.
        let attach = center + Complex64::from_polar(radius, start_angle);
        points[2] = attach;
        *points.last_mut().unwrap() = attach;
        points.push(corner);
        points.push(Complex64::new(base_p, 0.0));
        Self::new(points)
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationOptions {
    /// Largest step, and the step the tracker starts with.
    pub initial_step: f64,
    /// Continuation gives up once the step falls below this.
    pub min_step: f64,
    /// Zeros of `f` the path must avoid by at least `clearance`.
    pub known_zeros: Vec<Complex64>,
    pub clearance: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-12,
            known_zeros: Vec::new(),
            clearance: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState {
    pub p: Complex64,
    /// Continuous branch of `log f`; `exp(logf) = f(p)`.
    pub logf: Complex64,
    /// `exp(logf / p)`.
    pub norm_value: Complex64,
    pub steps: usize,
}

struct Tracker<'a> {
    f: &'a ExpPoly,
    p: Complex64,
    log_abs: f64,
    arg: f64,
    unwrapped: f64,
    steps: usize,
}

fn principal_arg(f: &ExpPoly, q: Complex64) -> Option<(f64, f64)> {
    let s = f.shifted(q);
    if s.relative_magnitude() < SINGULAR_REL {
        return None;
    }
    let l = Complex64::new(s.shift.re + s.sum.norm().ln(), s.shift.im + s.sum.arg());
    Some((l.re, wrap(l.im)))
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl Tracker<'_> {
    /// Tries to move to `q`; accepts when the argument of `f` turns by less
    /// than pi/2 and agrees with the linear prediction from `f'/f`.
    fn try_step(&mut self, q: Complex64) -> bool {
        let Some((log_abs, arg)) = principal_arg(self.f, q) else {
            return false;
        };
        let delta = wrap(arg - self.arg);
        let predicted = (self.f.log_derivative(self.p) * (q - self.p)).im;
        if delta.abs() >= PI / 2.0 || (delta - predicted).abs() >= PI / 4.0 {
            return false;
        }
        self.p = q;
        self.log_abs = log_abs;
        self.arg = arg;
        self.unwrapped += delta;
        self.steps += 1;
        true
    }
}

pub fn continue_log(f: &ExpPoly, path: &Path, opts: &ContinuationOptions) -> Result<BranchState> {
    if !(opts.initial_step > 0.0 && opts.min_step > 0.0 && opts.min_step <= opts.initial_step) {
        return Err(Error::InvalidInput("step sizes must satisfy 0 < min <= initial".into()));
    }
    if !opts.known_zeros.is_empty() {
        let c = path.clearance(&opts.known_zeros);
        if c < opts.clearance {
            return Err(Error::InvalidInput(format!(
                "path comes within {c:e} of a zero; required clearance {}",
                opts.clearance
            )));
        }
    }

    let start = path.start();
    let (log_abs, arg) = principal_arg(f, start).ok_or_else(|| Error::ContinuationFailed {
        at: start,
        reason: "path starts at a zero".into(),
    })?;
    let mut tr = Tracker {
        f,
        p: start,
        log_abs,
        arg,
        unwrapped: arg,
        steps: 0,
    };

    let mut h = opts.initial_step;
    let mut successes = 0;
    for w in path.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        let mut t = 0.0;
        while t < len {
            let (next_t, q) = if len - t <= h {
                (len, b)
            } else {
                (t + h, a + (b - a) * ((t + h) / len))
            };
            if tr.try_step(q) {
                t = next_t;
                successes += 1;
                if successes >= 4 {
                    h = (2.0 * h).min(opts.initial_step);
                    successes = 0;
                }
            } else {
                h *= 0.5;
                successes = 0;
                if h < opts.min_step {
                    return Err(Error::ContinuationFailed {
                        at: tr.p,
                        reason: format!("step size fell below {:e}", opts.min_step),
                    });
                }
            }
        }
    }

    let logf = Complex64::new(tr.log_abs, tr.unwrapped);
    Ok(BranchState {
        p: tr.p,
        logf,
        norm_value: (logf / tr.p).exp(),
        steps: tr.steps,
    })
}

/// Continued value of `exp(log f(p) / p)` at the end of `path`.
pub fn continue_pnorm(f: &ExpPoly, path: &Path, opts: &ContinuationOptions) -> Result<Complex64> {
    let origin = Complex64::new(0.0, 0.0);
    if path.clearance(&[origin]) == 0.0 {
        return Err(Error::InvalidInput("path passes through p = 0".into()));
    }
    Ok(continue_log(f, path, opts)?.norm_value)
}

/// `||v||_p` for `p > 0`, or the max-norm for `p = +inf`.
pub fn pnorm_at(v: &RealVector, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("norm exponent {p} must be > 0")));
    }
    let max = v.max_abs();
    if p == f64::INFINITY {
        return Ok(max);
    }
    // Dominant term factored out: ||v||_p = max * (sum_j (|v_j|/max)^p)^(1/p).
    let sum: f64 = v.nonzero_magnitudes().map(|x| (x / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// Multiplicative change of `exp(log f(p) / p)` around a keyhole loop.
pub fn loop_factor(
    f: &ExpPoly,
    center: Complex64,
    base_p: f64,
    radius: f64,
    orientation: Orientation,
    turns: u32,
    opts: &ContinuationOptions,
) -> Result<Complex64> {
    let path = Path::keyhole(base_p, center, radius, orientation, turns)?;
    let start = f.evaluate_log(path.start())?;
    let end = continue_log(f, &path, opts)?;
    Ok(((end.logf - start) / base_p).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    /// Ratio of the continued value to the starting value.
    pub measured: Complex64,
    /// `exp(2 pi i m / base_p)`.
    pub predicted: Complex64,
    /// `exp(2 pi i m / z)`, kept for comparison only.
    pub zero_quotient: Complex64,
    pub relative_error: f64,
    pub steps: usize,
}

/// Measures the monodromy of `||v||_p` around the `m`-fold zero `z`, with
/// a counter-clockwise keyhole based at `base_p`.
///
/// The neighbourhood of the loop is searched for zeros first: the circle
/// must enclose exactly `m` of them and every other zero must stay at least
/// `loop_radius / 2` from the path.
pub fn loop_monodromy(
    f: &ExpPoly,
    zero: (Complex64, u32),
    base_p: f64,
    loop_radius: f64,
) -> Result<Monodromy> {
    let (z, m) = zero;
    let path = Path::keyhole(base_p, z, loop_radius, Orientation::CounterClockwise, 1)?;

    let margin = 1.5 * loop_radius;
    let (im_lo, im_hi) = if z.im > 0.0 {
        (-loop_radius, z.im + margin)
    } else {
        (z.im - margin, loop_radius)
    };
    let region = Rectangle::new(
        base_p.min(z.re) - margin,
        base_p.max(z.re) + margin,
        im_lo,
        im_hi,
    )?;
    let found = find_zeros(f, &region, &ZeroSearchOptions::default())?;
    let (inside, others): (Vec<&Zero>, Vec<&Zero>) = found
        .zeros
        .iter()
        .partition(|w| (w.z - z).norm() < loop_radius);
    let enclosed: u32 = inside.iter().map(|w| w.multiplicity).sum();
    if enclosed != m {
        return Err(Error::InvalidInput(format!(
            "loop about {z} encloses {enclosed} zeros, expected {m}"
        )));
    }
    let opts = ContinuationOptions {
        known_zeros: others.iter().map(|w| w.z).collect(),
        clearance: 0.5 * loop_radius,
        ..ContinuationOptions::default()
    };

    let start = f.evaluate_log(path.start())?;
    let end = continue_log(f, &path, &opts)?;
    let measured = ((end.logf - start) / base_p).exp();
    let two_pi_i_m = Complex64::new(0.0, 2.0 * PI * f64::from(m));
    let predicted = (two_pi_i_m / base_p).exp();
    Ok(Monodromy {
        measured,
        predicted,
        zero_quotient: (two_pi_i_m / z).exp(),
        relative_error: (measured - predicted).norm() / predicted.norm(),
        steps: end.steps,
    })
}
