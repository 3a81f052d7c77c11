//! Boundary-seeking ascent on the product of unit spheres.
//!
//! At a pair `(x, y)` with selected eigenvalue `l` the directional
//! derivative of `f(x,y) = Re l - p (Im(l - lambda0))^2` along tangent
//! vectors `(u, v)` is `Re <T [x; y], [u; v]>` where
//!
//! ```text
//! S  = 1/(2l - a - d) [ (l - d) A   c B ;  b C   (l - a) D ]
//! T  = (S + S^*) + 2 p Im(l - lambda0) i (S - S^*)
//! ```
//!
//! The steepest tangent is the normalized projection of `T [x; y]` onto
//! the tangent spaces `{u : Re <x, u> = 0}`. The step then maximizes `f`
//! along the great circles `cos(s) x + sin(s) u`, `cos(t) y + sin(t) v`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::kernel::{reduce, ObjectiveParams, Reduced2x2};
use crate::linalg::{inner, norm, BlockMatrix, ComplexMatrix, UnitPair, C64};

/// Relative size of `|2l - a - d|` below which `l` is treated as a
/// double root.
const DEGENERATE_TOL: f64 = 1e-14;
/// Projected directions shorter than this count as zero.
const ZERO_GRADIENT_TOL: f64 = 1e-14;

/// The matrices `S`, `S + S^*`, `S - S^*` and `T` of one ascent step.
#[derive(Clone, Debug)]
pub struct AscentOperators {
    pub s: ComplexMatrix,
    pub t_plus: ComplexMatrix,
    pub t_minus: ComplexMatrix,
    pub t: ComplexMatrix,
}

fn check_nondegenerate(m: &Reduced2x2, lambda: C64) -> Result<C64> {
    let den = lambda * 2.0 - m.a - m.d;
    if den.norm() <= DEGENERATE_TOL * (1.0 + m.a.norm() + m.d.norm()) {
        return Err(Error::DegenerateEigenvalue);
    }
    Ok(den)
}

/// Materialize the ascent operators. `lambda` should be an eigenvalue of
/// the reduced matrix at `pair`.
pub fn ascent_operators(
    block: &BlockMatrix,
    pair: &UnitPair,
    lambda: C64,
    params: &ObjectiveParams,
) -> Result<AscentOperators> {
    let m = reduce(block, pair)?;
    let den = check_nondegenerate(&m, lambda)?;
    let k = den.inv();
    let n1 = block.n1();
    let s = ComplexMatrix::from_fn(block.dim(), block.dim(), |i, j| {
        k * match (i < n1, j < n1) {
            (true, true) => (lambda - m.d) * block.a()[(i, j)],
            (true, false) => m.c * block.b()[(i, j - n1)],
            (false, true) => m.b * block.c()[(i - n1, j)],
            (false, false) => (lambda - m.a) * block.d()[(i - n1, j - n1)],
        }
    });
    let s_adj = s.adjoint();
    let t_plus = s.add(&s_adj)?;
    let t_minus = s.sub(&s_adj)?;
    let weight = C64::new(0.0, 2.0 * params.penalty() * (lambda - params.lambda0).im);
    let t = t_plus.add(&t_minus.scaled(weight))?;
    Ok(AscentOperators { s, t_plus, t_minus, t })
}

/// `T [x; y]` split as `(w, z)`, computed with matrix-vector products
/// instead of forming `T`.
pub fn ascent_vector(
    block: &BlockMatrix,
    pair: &UnitPair,
    lambda: C64,
    params: &ObjectiveParams,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let (x, y) = (pair.x(), pair.y());
    let ax = block.a().mul_vec(x);
    let by = block.b().mul_vec(y);
    let cx = block.c().mul_vec(x);
    let dy = block.d().mul_vec(y);
    let m = Reduced2x2 { a: inner(&ax, x), b: inner(&by, x), c: inner(&cx, y), d: inner(&dy, y) };
    let den = check_nondegenerate(&m, lambda)?;
    let k = den.inv();
    let kc = k.conj();

    let a_adj_x = block.a().adjoint_mul_vec(x);
    let c_adj_y = block.c().adjoint_mul_vec(y);
    let b_adj_x = block.b().adjoint_mul_vec(x);
    let d_adj_y = block.d().adjoint_mul_vec(y);

    let weight = C64::new(0.0, 2.0 * params.penalty() * (lambda - params.lambda0).im);
    let combine = |sx: C64, sadjx: C64| (sx + sadjx) + weight * (sx - sadjx);

    let (ld, la) = (lambda - m.d, lambda - m.a);
    let w = (0..x.len())
        .map(|i| {
            let sx = k * (ld * ax[i] + m.c * by[i]);
            let sadjx = kc * (ld.conj() * a_adj_x[i] + m.b.conj() * c_adj_y[i]);
            combine(sx, sadjx)
        })
        .collect();
    let z = (0..y.len())
        .map(|i| {
            let sx = k * (m.b * cx[i] + la * dy[i]);
            let sadjx = kc * (m.c.conj() * b_adj_x[i] + la.conj() * d_adj_y[i]);
            combine(sx, sadjx)
        })
        .collect();
    Ok((w, z))
}

/// Unit tangent vectors `(u, v)` at a pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPair {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl TangentPair {
    /// Largest violation of `Re <x,u> = 0`, `Re <y,v> = 0`, `||u|| = ||v|| = 1`.
    pub fn defect(&self, pair: &UnitPair) -> f64 {
        [
            inner(pair.x(), &self.u).re.abs(),
            inner(pair.y(), &self.v).re.abs(),
            (norm(&self.u) - 1.0).abs(),
            (norm(&self.v) - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Normalized projection of `(w, z)` onto the tangent spaces at `pair`.
pub fn project_to_tangent(pair: &UnitPair, w: &[C64], z: &[C64]) -> Result<TangentPair> {
    let project = |g: &[C64], base: &[C64]| -> Result<Vec<C64>> {
        if g.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroGradient);
        }
        let along = inner(g, base).re;
        let mut p: Vec<C64> = g.iter().zip(base).map(|(gi, bi)| gi - bi * along).collect();
        let np = norm(&p);
        if np <= ZERO_GRADIENT_TOL {
            return Err(Error::ZeroGradient);
        }
        p.iter_mut().for_each(|c| *c /= np);
        Ok(p)
    };
    Ok(TangentPair { u: project(w, pair.x())?, v: project(z, pair.y())? })
}

/// Direction of steepest ascent of the objective at `pair`.
pub fn steepest_tangent(
    block: &BlockMatrix,
    pair: &UnitPair,
    lambda: C64,
    params: &ObjectiveParams,
) -> Result<TangentPair> {
    let (w, z) = ascent_vector(block, pair, lambda, params)?;
    project_to_tangent(pair, &w, &z)
}

/// `d/dt f(cos t x + sin t u, cos t y + sin t v)` at `t = 0`.
pub fn derivative_along(
    block: &BlockMatrix,
    pair: &UnitPair,
    tangent: &TangentPair,
    lambda: C64,
    params: &ObjectiveParams,
) -> Result<f64> {
    let (w, z) = ascent_vector(block, pair, lambda, params)?;
    Ok((inner(&w, &tangent.u) + inner(&z, &tangent.v)).re)
}

/// `(cos s x + sin s u, cos t y + sin t v)`, renormalized to absorb
/// rounding. `s = t = 0` returns the pair unchanged.
pub fn curve_point(pair: &UnitPair, tangent: &TangentPair, s: f64, t: f64) -> UnitPair {
    if s == 0.0 && t == 0.0 {
        return pair.clone();
    }
    let walk = |base: &[C64], dir: &[C64], angle: f64| -> Vec<C64> {
        let (sn, cs) = angle.sin_cos();
        base.iter().zip(dir).map(|(b, d)| b * cs + d * sn).collect()
    };
    UnitPair::normalized(walk(pair.x(), &tangent.u, s), walk(pair.y(), &tangent.v, t))
        .expect("great circle through unit vectors stays away from zero")
}

/// The reduced matrix along the two great circles in closed form: after
/// eight matrix-vector products every `(s, t)` costs O(1).
#[derive(Clone, Debug)]
pub struct CurveModel {
    a: [C64; 3],
    d: [C64; 3],
    b: [C64; 4],
    c: [C64; 4],
    x_norm: [f64; 3],
    y_norm: [f64; 3],
}

impl CurveModel {
    pub fn new(block: &BlockMatrix, pair: &UnitPair, tangent: &TangentPair) -> Self {
        let (x, y, u, v) = (pair.x(), pair.y(), tangent.u.as_slice(), tangent.v.as_slice());
        let ax = block.a().mul_vec(x);
        let au = block.a().mul_vec(u);
        let by = block.b().mul_vec(y);
        let bv = block.b().mul_vec(v);
        let cx = block.c().mul_vec(x);
        let cu = block.c().mul_vec(u);
        let dy = block.d().mul_vec(y);
        let dv = block.d().mul_vec(v);
        Self {
            a: [inner(&ax, x), inner(&ax, u) + inner(&au, x), inner(&au, u)],
            d: [inner(&dy, y), inner(&dy, v) + inner(&dv, y), inner(&dv, v)],
            // coefficients of cos s cos t, cos s sin t, sin s cos t, sin s sin t
            b: [inner(&by, x), inner(&bv, x), inner(&by, u), inner(&bv, u)],
            c: [inner(&cx, y), inner(&cx, v), inner(&cu, y), inner(&cu, v)],
            x_norm: [inner(x, x).re, 2.0 * inner(x, u).re, inner(u, u).re],
            y_norm: [inner(y, y).re, 2.0 * inner(y, v).re, inner(v, v).re],
        }
    }

    pub fn reduced(&self, s: f64, t: f64) -> Reduced2x2 {
        let (ss, cs) = s.sin_cos();
        let (st, ct) = t.sin_cos();
        let quad = |q: &[C64; 3], c: f64, s: f64| q[0] * (c * c) + q[1] * (c * s) + q[2] * (s * s);
        let quad_re = |q: &[f64; 3], c: f64, s: f64| q[0] * c * c + q[1] * c * s + q[2] * s * s;
        let nx2 = quad_re(&self.x_norm, cs, ss);
        let ny2 = quad_re(&self.y_norm, ct, st);
        let nxy = (nx2 * ny2).sqrt();
        let bil = |q: &[C64; 4]| q[0] * (cs * ct) + q[1] * (cs * st) + q[2] * (ss * ct) + q[3] * (ss * st);
        Reduced2x2 {
            a: quad(&self.a, cs, ss) / nx2,
            b: bil(&self.b) / nxy,
            c: bil(&self.c) / nxy,
            d: quad(&self.d, ct, st) / ny2,
        }
    }
}

/// Search parameters of one boundary seek.
#[derive(Clone, Debug, PartialEq)]
pub struct SeekConfig {
    pub i_max: usize,
    /// Coarse samples over `[0, 2pi)` before golden-section refinement.
    pub line_search_grid: usize,
    pub line_search_tol: f64,
    /// Search `(s, t)` jointly instead of along `s = t`.
    pub two_dimensional: bool,
    /// Successive iterates closer than this (max entrywise modulus) count
    /// as a repeat. Zero means exact equality.
    pub repeat_tol: f64,
}

impl Default for SeekConfig {
    fn default() -> Self {
        Self { i_max: 2, line_search_grid: 64, line_search_tol: 1e-6, two_dimensional: false, repeat_tol: 0.0 }
    }
}

impl SeekConfig {
    pub fn with_iterations(i_max: usize) -> Self {
        Self { i_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.i_max < 1 {
            return Err(Error::InvalidConfig("i_max must be at least 1".into()));
        }
        if self.line_search_grid < 8 {
            return Err(Error::InvalidConfig("line_search_grid must be at least 8".into()));
        }
        if !(self.line_search_tol > 0.0) {
            return Err(Error::InvalidConfig("line_search_tol must be positive".into()));
        }
        Ok(())
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `g` on `[lo, hi]`.
fn golden_max(g: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximize a `2pi`-periodic function: `grid` equispaced samples starting
/// at 0, then golden-section refinement around the best one. The result
/// is never worse than the sample at 0, and ties keep the earlier sample.
pub fn maximize_periodic(mut g: impl FnMut(f64) -> f64, grid: usize, tol: f64) -> (f64, f64) {
    let h = TAU / grid as f64;
    let (mut best_s, mut best) = (0.0, g(0.0));
    for k in 1..grid {
        let s = k as f64 * h;
        let v = g(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    let (s, v) = golden_max(&mut g, best_s - h, best_s + h, tol);
    if v > best {
        (crate::kernel::normalize_angle(s), v)
    } else {
        (best_s, best)
    }
}

/// Coarse product grid followed by alternating golden-section sweeps in
/// `s` and `t`.
pub fn maximize_periodic_2d(mut g: impl FnMut(f64, f64) -> f64, grid: usize, tol: f64) -> (f64, f64, f64) {
    let h = TAU / grid as f64;
    let (mut bs, mut bt, mut best) = (0.0, 0.0, g(0.0, 0.0));
    for i in 0..grid {
        for j in 0..grid {
            if i == 0 && j == 0 {
                continue;
            }
            let (s, t) = (i as f64 * h, j as f64 * h);
            let v = g(s, t);
            if v > best {
                best = v;
                bs = s;
                bt = t;
            }
        }
    }
    for _ in 0..32 {
        let before = best;
        let (s, v) = golden_max(&mut |s| g(s, bt), bs - h, bs + h, tol);
        if v > best {
            best = v;
            bs = crate::kernel::normalize_angle(s);
        }
        let (t, v) = golden_max(&mut |t| g(bs, t), bt - h, bt + h, tol);
        if v > best {
            best = v;
            bt = crate::kernel::normalize_angle(t);
        }
        if best <= before {
            break;
        }
    }
    (bs, bt, best)
}

/// Result of a line search along the great circles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchResult {
    pub s: f64,
    pub t: f64,
    pub value: f64,
}

/// Maximize `f` along the curves through `pair` in direction `tangent`.
pub fn line_search(
    block: &BlockMatrix,
    pair: &UnitPair,
    tangent: &TangentPair,
    params: &ObjectiveParams,
    cfg: &SeekConfig,
) -> LineSearchResult {
    let model = CurveModel::new(block, pair, tangent);
    let f = |s: f64, t: f64| {
        let m = model.reduced(s, t);
        if !m.is_finite() {
            return f64::NEG_INFINITY;
        }
        params.value_at(params.select(&m))
    };
    if cfg.two_dimensional {
        let per_axis = (cfg.line_search_grid / 4).max(8);
        let (s, t, value) = maximize_periodic_2d(f, per_axis, cfg.line_search_tol);
        LineSearchResult { s, t, value }
    } else {
        let (s, value) = maximize_periodic(|s| f(s, s), cfg.line_search_grid, cfg.line_search_tol);
        LineSearchResult { s, t: s, value }
    }
}

/// One ascent step: steepest tangent, line search, move. Errors signal
/// the guards (double root, vanishing projected gradient).
pub fn find_boundary(
    block: &BlockMatrix,
    pair: &UnitPair,
    params: &ObjectiveParams,
    cfg: &SeekConfig,
) -> Result<UnitPair> {
    let m = reduce(block, pair)?;
    let lambda = params.select(&m);
    let current = params.value_at(lambda);
    let tangent = steepest_tangent(block, pair, lambda, params)?;
    let step = line_search(block, pair, &tangent, params, cfg);
    let next = curve_point(pair, &tangent, step.s, step.t);
    // the closed-form model and the renormalized vectors differ by rounding
    let reached = params.value_at(params.select(&reduce(block, &next)?));
    if reached < current {
        return Ok(pair.clone());
    }
    Ok(next)
}

fn same_pair(p: &UnitPair, q: &UnitPair, tol: f64) -> bool {
    if tol == 0.0 {
        return p == q;
    }
    let close = |a: &[C64], b: &[C64]| a.iter().zip(b).all(|(u, v)| (u - v).norm() <= tol);
    close(p.x(), q.x()) && close(p.y(), q.y())
}

/// Iterate [`find_boundary`] up to `i_max` times from `start`, returning
/// every iterate. Stops early when an iterate repeats its predecessor;
/// a guard error at step `k` is treated the same way.
pub fn seek_boundary(
    block: &BlockMatrix,
    start: &UnitPair,
    params: &ObjectiveParams,
    cfg: &SeekConfig,
) -> Vec<UnitPair> {
    let mut out: Vec<UnitPair> = Vec::with_capacity(cfg.i_max);
    let mut current = start.clone();
    for i in 0..cfg.i_max.max(1) {
        let next = match find_boundary(block, &current, params, cfg) {
            Ok(p) => p,
            Err(_) if i == 0 => {
                // the start is stationary: it is its own first iterate
                out.push(current);
                return out;
            }
            Err(_) => return out,
        };
        if i > 0 && same_pair(&next, &out[i - 1], cfg.repeat_tol) {
            return out;
        }
        out.push(next.clone());
        current = next;
    }
    out
}
