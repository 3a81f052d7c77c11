//! The reduced 2x2 matrix `M_{x,y}`, its eigenvalues, the angle-based
//! choice between them, and the penalized objective.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{inner, BlockMatrix, UnitPair, C64};

/// Wrap an angle into `[0, 2pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `M_{x,y} = [<Ax,x> <By,x>; <Cx,y> <Dy,y>]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reduced2x2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Reduced2x2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    /// Spectral norm from the closed form of the 2x2 singular values.
    pub fn norm(&self) -> f64 {
        let f = self.frobenius_sqr();
        let det = self.det().norm();
        let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
        ((f + disc) / 2.0).sqrt()
    }

    /// `|lambda^2 - (a+d) lambda + (ad - bc)|`.
    pub fn residual(&self, lambda: C64) -> f64 {
        (lambda * lambda - self.trace() * lambda + self.det()).norm()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// The four quadratic and bilinear forms of `block` at `pair`.
pub fn reduce(block: &BlockMatrix, pair: &UnitPair) -> Result<Reduced2x2> {
    if pair.n1() != block.n1() || pair.n2() != block.n2() {
        return Err(Error::DimensionMismatch(format!(
            "pair ({}, {}) against block ({}, {})",
            pair.n1(),
            pair.n2(),
            block.n1(),
            block.n2()
        )));
    }
    let (x, y) = (pair.x(), pair.y());
    Ok(Reduced2x2 {
        a: inner(&block.a().mul_vec(x), x),
        b: inner(&block.b().mul_vec(y), x),
        c: inner(&block.c().mul_vec(x), y),
        d: inner(&block.d().mul_vec(y), y),
    })
}

/// Both roots of `lambda^2 - (a+d) lambda + (ad - bc)`.
///
/// The discriminant is formed as `((a-d)/2)^2 + bc`, the larger root is
/// taken first and the smaller recovered from the product of roots. A
/// double root comes back twice.
pub fn eigen2x2(m: &Reduced2x2) -> [C64; 2] {
    let half_trace = m.trace() * 0.5;
    let half_diff = (m.a - m.d) * 0.5;
    let root = (half_diff * half_diff + m.b * m.c).sqrt();
    // pick the sign that adds the two terms constructively
    let big = if (half_trace.conj() * root).re >= 0.0 { half_trace + root } else { half_trace - root };
    let det = m.det();
    let small = if big == C64::new(0.0, 0.0) { m.trace() - big } else { det / big };
    [big, small]
}

/// The eigenvalue pair ordered by the rotation `e^{i alpha}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSplit {
    /// Larger rotated real part (ties: larger rotated imaginary part).
    pub lambda_alpha: C64,
    pub lambda_alpha_pi: C64,
    pub alpha: f64,
}

pub fn split_by_alpha(eigs: [C64; 2], alpha: f64) -> EigenSplit {
    let alpha = normalize_angle(alpha);
    let rot = C64::from_polar(1.0, alpha);
    let (r0, r1) = (rot * eigs[0], rot * eigs[1]);
    let first_wins = if r0.re != r1.re { r0.re > r1.re } else { r0.im >= r1.im };
    let (lambda_alpha, lambda_alpha_pi) = if first_wins { (eigs[0], eigs[1]) } else { (eigs[1], eigs[0]) };
    EigenSplit { lambda_alpha, lambda_alpha_pi, alpha }
}

/// Square root with its branch cut along the ray `{r e^{i theta0}: r >= 0}`.
///
/// `theta0` is read modulo `2pi` in `(0, 2pi]`; arguments are taken in
/// `(theta0 - 2pi, theta0)`, so `theta0 = pi` is the principal branch and
/// `theta0 = 0` sends `-1` to `i`. `None` when `z` lies on the cut.
pub fn branch_sqrt(z: C64, theta0: f64) -> Option<C64> {
    let mut cut = theta0.rem_euclid(TAU);
    if cut <= 0.0 {
        cut = TAU;
    }
    if z == C64::new(0.0, 0.0) {
        return None;
    }
    let mut phi = z.arg();
    while phi >= cut {
        phi -= TAU;
    }
    while phi <= cut - TAU {
        phi += TAU;
    }
    const CUT_TOL: f64 = 1e-14;
    if cut - phi <= CUT_TOL || phi - (cut - TAU) <= CUT_TOL {
        return None;
    }
    Some(C64::from_polar(z.norm().sqrt(), phi / 2.0))
}

/// `(a+d)/2 +- sqrt(((a-d)/2)^2 + bc)` with the root taken on the branch
/// cut along `theta0` (principal branch for `theta0 = pi`).
pub fn branch_eigenvalues(m: &Reduced2x2, theta0: f64) -> Result<(C64, C64)> {
    let half_diff = (m.a - m.d) * 0.5;
    let radicand = half_diff * half_diff + m.b * m.c;
    let root = branch_sqrt(radicand, theta0).ok_or(Error::RadicandOnCut { radicand, theta0 })?;
    let mean = m.trace() * 0.5;
    Ok((mean + root, mean - root))
}

/// Default cut of [`branch_eigenvalues`]: the negative real axis.
pub const PRINCIPAL_CUT: f64 = PI;

/// Parameters of `f(x,y) = Re l - p (Im(l - lambda0))^2` with `l` the
/// eigenvalue selected by `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveParams {
    alpha: f64,
    pub lambda0: C64,
    penalty: f64,
}

impl ObjectiveParams {
    pub fn new(alpha: f64, lambda0: C64, penalty: f64) -> Result<Self> {
        if !(penalty >= 0.0 && penalty.is_finite()) {
            return Err(Error::InvalidConfig(format!("penalty must be finite and >= 0, got {penalty}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidConfig("alpha must be finite".into()));
        }
        Ok(Self { alpha: normalize_angle(alpha), lambda0, penalty })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// The objective at a given selected eigenvalue.
    pub fn value_at(&self, lambda: C64) -> f64 {
        let dev = (lambda - self.lambda0).im;
        lambda.re - self.penalty * dev * dev
    }

    pub fn select(&self, m: &Reduced2x2) -> C64 {
        split_by_alpha(eigen2x2(m), self.alpha).lambda_alpha
    }
}

pub fn objective(block: &BlockMatrix, pair: &UnitPair, params: &ObjectiveParams) -> Result<f64> {
    let m = reduce(block, pair)?;
    Ok(params.value_at(params.select(&m)))
}
