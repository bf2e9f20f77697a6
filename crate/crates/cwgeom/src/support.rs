//! Support functions on the direction sphere and their two-jets.
//!
//! A convex body is stored as its support function `r(xi)`. Everything the
//! rest of the crate needs is the jet `(r, r_xi, r_xixi, r_xixibar)` at a
//! chart value, from which the normal-line moment `F`, the mean curvature
//! combination `psi` and the shear `sigma` follow algebraically.

use crate::poly::{self, CoefMatrix};
use crate::sphere::{antipodal, from_angles, to_angles, QuadratureGrid, SphereAngles};
use crate::symmetry::PointGroup;
use crate::{C, Error, Result};
use rayon::prelude::*;

/// Two-jet of a support function at a chart value, plus derived quantities.
#[derive(Debug, Clone, Copy)]
pub struct SupportJet {
    pub xi: C,
    pub r: f64,
    pub r_xi: C,
    pub r_xixi: C,
    pub r_xixibar: C,
    /// Moment of the support normal line, `(1+|xi|^2)^2 conj(r_xi) / 2`.
    pub f: C,
    /// Real part of `(1+|xi|^2)^2 r_xixibar / 2`.
    pub psi: f64,
    /// Imaginary residue of `psi`; vanishes for an exact real support function.
    pub psi_im: f64,
    /// Shear `-(1+|xi|^2) (conj(xi) r_xi + (1+|xi|^2) r_xixi / 2)`.
    pub sigma: C,
}

impl SupportJet {
    pub fn from_raw(xi: C, r: f64, r_xi: C, r_xixi: C, r_xixibar: C) -> Self {
        let s = 1.0 + xi.norm_sqr();
        let f = 0.5 * s * s * r_xi.conj();
        let psi_c = 0.5 * s * s * r_xixibar;
        let sigma = -s * (xi.conj() * r_xi + 0.5 * s * r_xixi);
        Self {
            xi,
            r,
            r_xi,
            r_xixi,
            r_xixibar,
            f,
            psi: psi_c.re,
            psi_im: psi_c.im,
            sigma,
        }
    }

    pub fn r_xibar(&self) -> C {
        self.r_xi.conj()
    }
}

/// Raw jet tuple `(r, r_xi, r_xixi, r_xixibar)`.
type RawJet = (f64, C, C, C);

#[derive(Debug, Clone)]
struct JetMatrices {
    p: CoefMatrix,
    p_xi: CoefMatrix,
    p_xixi: CoefMatrix,
    p_xixibar: CoefMatrix,
    q: CoefMatrix,
    q_xi: CoefMatrix,
    q_xixi: CoefMatrix,
    q_xixibar: CoefMatrix,
}

impl JetMatrices {
    fn new(a: &CoefMatrix, b: &CoefMatrix) -> Self {
        let p_xi = a.d_xi();
        let q_xi = b.d_xi();
        Self {
            p_xixi: p_xi.d_xi(),
            p_xixibar: p_xi.d_xibar(),
            q_xixi: q_xi.d_xi(),
            q_xixibar: q_xi.d_xibar(),
            p: a.clone(),
            p_xi,
            q: b.clone(),
            q_xi,
        }
    }

    /// Quotient-rule jet of `P/Q` at a chart value with `|xi| <= 1`.
    fn eval(&self, xi: C) -> RawJet {
        let q = self.q.eval(xi);
        let r = (self.p.eval(xi) / q).re;
        let qx = self.q_xi.eval(xi);
        let r_xi = (self.p_xi.eval(xi) - r * qx) / q;
        let r_xixi = (self.p_xixi.eval(xi) - 2.0 * r_xi * qx - r * self.q_xixi.eval(xi)) / q;
        let r_xixibar = (self.p_xixibar.eval(xi)
            - r_xi * qx.conj()
            - r_xi.conj() * qx
            - r * self.q_xixibar.eval(xi))
            / q;
        (r, r_xi, r_xixi, r_xixibar)
    }
}

/// Support function `P(xi, conj xi) / Q(xi, conj xi)` with hermitian
/// coefficient matrices.
#[derive(Debug, Clone)]
pub struct RationalSupport {
    a: CoefMatrix,
    b: CoefMatrix,
    direct: JetMatrices,
    reversed: JetMatrices,
}

impl RationalSupport {
    /// Validate and precompute. The numerator is zero-padded to the size of
    /// the denominator; a numerator of higher degree is rejected, as is a
    /// non-hermitian matrix or a denominator with zeros on the sphere.
    pub fn new(a: CoefMatrix, b: CoefMatrix) -> Result<Self> {
        if a.size() > b.size() {
            return Err(Error::InvalidParameter(format!(
                "numerator degree {} exceeds denominator degree {}",
                a.size() - 1,
                b.size() - 1
            )));
        }
        let a = a.pad_to(b.size());
        for m in [&a, &b] {
            let dev = m.hermitian_deviation();
            if dev > 1e-12 * m.max_abs().max(1.0) {
                return Err(Error::NotHermitian(dev));
            }
        }
        let rb = b.reversed();
        let scale = b.max_abs();
        let mut min_q = f64::INFINITY;
        for i in 0..=32 {
            let theta = std::f64::consts::PI * i as f64 / 64.0;
            let rho = (0.5 * theta).tan();
            for j in 0..64 {
                let xi = C::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / 64.0);
                min_q = min_q.min(b.eval(xi).norm()).min(rb.eval(xi).norm());
            }
        }
        if min_q <= 1e-9 * scale {
            return Err(Error::DenominatorVanishes(min_q));
        }
        let direct = JetMatrices::new(&a, &b);
        let reversed = JetMatrices::new(&a.reversed(), &rb);
        Ok(Self { a, b, direct, reversed })
    }

    pub fn numerator(&self) -> &CoefMatrix {
        &self.a
    }

    pub fn denominator(&self) -> &CoefMatrix {
        &self.b
    }

    /// Degree `m` of the representation.
    pub fn degree(&self) -> usize {
        self.b.size() - 1
    }

    pub(crate) fn raw_jet(&self, xi: C) -> RawJet {
        if xi.norm_sqr() <= 1.0 {
            self.direct.eval(xi)
        } else {
            // evaluate the reversed representation at u = 1/xi and pull the
            // derivatives back through the substitution
            let u = 1.0 / xi;
            let (g, g_u, g_uu, g_uubar) = self.reversed.eval(u);
            let u2 = u * u;
            let r_xi = -g_u * u2;
            let r_xixi = g_uu * u2 * u2 + 2.0 * g_u * u2 * u;
            let r_xixibar = g_uubar * u.norm_sqr() * u.norm_sqr();
            (g, r_xi, r_xixi, r_xixibar)
        }
    }
}

#[derive(Debug, Clone)]
struct RadialPolys {
    /// p, p', p'', p'''
    p: [Vec<f64>; 4],
    q: [Vec<f64>; 4],
}

impl RadialPolys {
    fn new(p: &[f64], q: &[f64]) -> Self {
        let der = |c: &[f64]| {
            let d1 = poly::derivative(c);
            let d2 = poly::derivative(&d1);
            let d3 = poly::derivative(&d2);
            [c.to_vec(), d1, d2, d3]
        };
        Self { p: der(p), q: der(q) }
    }

    /// `f = p/q` and derivatives up to third order at `u <= 1`.
    fn eval(&self, u: f64) -> [f64; 4] {
        let q: Vec<f64> = self.q.iter().map(|c| poly::eval(c, u)).collect();
        let p: Vec<f64> = self.p.iter().map(|c| poly::eval(c, u)).collect();
        let f = p[0] / q[0];
        let f1 = (p[1] - f * q[1]) / q[0];
        let f2 = (p[2] - 2.0 * f1 * q[1] - f * q[2]) / q[0];
        let f3 = (p[3] - 3.0 * f2 * q[1] - 3.0 * f1 * q[2] - f * q[3]) / q[0];
        [f, f1, f2, f3]
    }
}

/// Rotationally symmetric support function `p(u)/q(u) + shift`, `u = |xi|^2`.
#[derive(Debug, Clone)]
pub struct RotSymSupport {
    p: Vec<f64>,
    q: Vec<f64>,
    shift: f64,
    direct: RadialPolys,
    reversed: RadialPolys,
}

impl RotSymSupport {
    /// Validate and precompute. The denominator must have no zeros on
    /// `u >= 0` (including the limit `u -> inf` through its leading
    /// coefficient) and the numerator degree must not exceed it.
    pub fn new(p: Vec<f64>, q: Vec<f64>, shift: f64) -> Result<Self> {
        let mut q = q;
        while q.len() > 1 && *q.last().unwrap() == 0.0 {
            q.pop();
        }
        if q.is_empty() || poly::max_abs(&q) == 0.0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let mut p = p;
        if p.is_empty() {
            p.push(0.0);
        }
        while p.len() > q.len() && *p.last().unwrap() == 0.0 {
            p.pop();
        }
        if p.len() > q.len() {
            return Err(Error::InvalidParameter(format!(
                "numerator degree {} exceeds denominator degree {}",
                p.len() - 1,
                q.len() - 1
            )));
        }
        p.resize(q.len(), 0.0);
        let scale = poly::max_abs(&q);
        if !poly::roots_nonneg(&q, 1e-9).is_empty() {
            return Err(Error::DenominatorVanishes(0.0));
        }
        let rp: Vec<f64> = p.iter().rev().copied().collect();
        let rq: Vec<f64> = q.iter().rev().copied().collect();
        // the sign-change scan misses touching zeros; back it up with a
        // min-magnitude sweep of both ends of the half-line
        let mut min_q = f64::INFINITY;
        for i in 0..=2048 {
            let u = i as f64 / 2048.0;
            min_q = min_q
                .min(poly::eval(&q, u).abs())
                .min(poly::eval(&rq, u).abs());
        }
        if min_q <= 1e-9 * scale {
            return Err(Error::DenominatorVanishes(min_q));
        }
        let direct = RadialPolys::new(&p, &q);
        let reversed = RadialPolys::new(&rp, &rq);
        Ok(Self { p, q, shift, direct, reversed })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn with_shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.shift = shift;
        out
    }

    /// Radial profile `f(u) = p/q` (without the shift) and derivatives.
    pub fn profile(&self, u: f64) -> [f64; 4] {
        if u <= 1.0 {
            self.direct.eval(u)
        } else {
            let v = 1.0 / u;
            let [g, g1, g2, g3] = self.reversed.eval(v);
            let f1 = -g1 * v * v;
            let f2 = g2 * v.powi(4) + 2.0 * g1 * v.powi(3);
            let f3 = -(g3 * v.powi(6) + 6.0 * g2 * v.powi(5) + 6.0 * g1 * v.powi(4));
            [g, f1, f2, f3]
        }
    }

    /// Support value and radial derivatives in `R = |xi|`.
    pub fn radial(&self, big_r: f64) -> [f64; 4] {
        let u = big_r * big_r;
        let [f, f1, f2, f3] = self.profile(u);
        [
            f + self.shift,
            2.0 * big_r * f1,
            2.0 * f1 + 4.0 * u * f2,
            12.0 * big_r * f2 + 8.0 * big_r.powi(3) * f3,
        ]
    }

    pub(crate) fn raw_jet(&self, xi: C) -> RawJet {
        let u = xi.norm_sqr();
        let [f, f1, f2, _] = self.profile(u);
        let xb = xi.conj();
        (
            f + self.shift,
            f1 * xb,
            f2 * xb * xb,
            C::new(f2 * u + f1, 0.0),
        )
    }
}

/// A support function, possibly wrapped by shift, translation or averaging.
#[derive(Debug, Clone)]
pub enum SupportFunction {
    Rational(RationalSupport),
    RotSym(RotSymSupport),
    Shifted { base: Box<SupportFunction>, c: f64 },
    Translated { base: Box<SupportFunction>, p_z: C, p_t: f64 },
    Averaged { base: Box<SupportFunction>, group: PointGroup },
}

impl SupportFunction {
    /// Full two-jet at a chart value.
    pub fn eval_jet(&self, xi: C) -> Result<SupportJet> {
        let (r, r_xi, r_xixi, r_xixibar) = self.raw_jet(xi)?;
        Ok(SupportJet::from_raw(xi, r, r_xi, r_xixi, r_xixibar))
    }

    /// True when the support function is rotationally symmetric about e3 by
    /// construction, which lets scans reduce to the polar angle.
    pub fn is_rotational(&self) -> bool {
        match self {
            SupportFunction::RotSym(_) => true,
            SupportFunction::Shifted { base, .. } => base.is_rotational(),
            _ => false,
        }
    }

    fn raw_jet(&self, xi: C) -> Result<RawJet> {
        match self {
            SupportFunction::Rational(rs) => Ok(rs.raw_jet(xi)),
            SupportFunction::RotSym(rs) => Ok(rs.raw_jet(xi)),
            SupportFunction::Shifted { base, c } => {
                let (r, r_xi, r_xixi, r_xixibar) = base.raw_jet(xi)?;
                Ok((r + c, r_xi, r_xixi, r_xixibar))
            }
            SupportFunction::Translated { base, p_z, p_t } => {
                let (r, r_xi, r_xixi, r_xixibar) = base.raw_jet(xi)?;
                let s = 1.0 + xi.norm_sqr();
                let xb = xi.conj();
                let u = (2.0 * (p_z.conj() * xi).re + p_t * (1.0 - xi.norm_sqr())) / s;
                let u_xi = (p_z.conj() - 2.0 * p_t * xb - p_z * xb * xb) / (s * s);
                let u_xixi = -2.0 * xb * u_xi / s;
                let u_xixibar = C::new(-2.0 * u / (s * s), 0.0);
                Ok((r + u, r_xi + u_xi, r_xixi + u_xixi, r_xixibar + u_xixibar))
            }
            SupportFunction::Averaged { base, group } => {
                match averaged_jet(base, group, xi) {
                    Err(Error::ChartExit(_)) => {
                        // nudge the direction off the excluded fiber and retry
                        let SphereAngles { theta, phi } = to_angles(xi);
                        let theta = if theta + 1e-6 < std::f64::consts::PI {
                            theta + 1e-6
                        } else {
                            theta - 1e-6
                        };
                        let xi2 = from_angles(SphereAngles { theta, phi })?;
                        averaged_jet(base, group, xi2)
                    }
                    other => other,
                }
            }
        }
    }
}

fn averaged_jet(base: &SupportFunction, group: &PointGroup, xi: C) -> Result<RawJet> {
    let mut r = 0.0;
    let mut r_xi = C::new(0.0, 0.0);
    let mut r_xixi = C::new(0.0, 0.0);
    let mut r_xixibar = C::new(0.0, 0.0);
    for g in group.elements() {
        let x = if g.is_improper() { xi.conj() } else { xi };
        let (alpha, beta) = g.su2();
        let den = -beta.conj() * x + alpha.conj();
        if den.norm() <= 1e-8 * (1.0 + x.norm()) {
            return Err(Error::ChartExit(
                "group element maps the direction to the south pole".into(),
            ));
        }
        let w = (alpha * x + beta) / den;
        let m1 = 1.0 / (den * den);
        let m2 = 2.0 * beta.conj() / (den * den * den);
        let (br, b_xi, b_xixi, b_xixibar) = base.raw_jet(w)?;
        r += br;
        if g.is_improper() {
            r_xi += (b_xi * m1).conj();
            r_xixi += (b_xixi * m1 * m1 + b_xi * m2).conj();
            r_xixibar += b_xixibar.conj() * m1.norm_sqr();
        } else {
            r_xi += b_xi * m1;
            r_xixi += b_xixi * m1 * m1 + b_xi * m2;
            r_xixibar += b_xixibar * m1.norm_sqr();
        }
    }
    let n = group.elements().len() as f64;
    Ok((r / n, r_xi / n, r_xixi / n, r_xixibar / n))
}

/// Width of the body along the axis through `xi`, `r(xi) + r(tau xi)`.
pub fn width_at(s: &SupportFunction, xi: C) -> Result<f64> {
    let tau = antipodal(xi)?;
    Ok(s.eval_jet(xi)?.r + s.eval_jet(tau)?.r)
}

/// Result of a constant-width check over a grid.
#[derive(Debug, Clone, Copy)]
pub struct WidthReport {
    /// Quadrature-weighted mean width.
    pub width: f64,
    /// Largest deviation of a nodal width from the mean.
    pub max_dev: f64,
    /// Largest deviation in the antipodal reflection identity for the
    /// normal-line moment, `F(tau xi) + conj(F(xi)) / conj(xi)^2`.
    pub reflection_dev: f64,
}

/// Check constant width over a quadrature grid.
pub fn check_constant_width(s: &SupportFunction, grid: &QuadratureGrid) -> Result<WidthReport> {
    let rows: Vec<(f64, f64, f64)> = grid
        .nodes
        .par_iter()
        .map(|node| -> Result<(f64, f64, f64)> {
            let jet = s.eval_jet(node.xi)?;
            let tau = antipodal(node.xi)?;
            let jet_tau = s.eval_jet(tau)?;
            let width = jet.r + jet_tau.r;
            let xb2 = node.xi.conj() * node.xi.conj();
            let refl = (jet_tau.f + jet.f.conj() / xb2).norm();
            Ok((node.weight, width, refl))
        })
        .collect::<Result<_>>()?;
    let mass: f64 = rows.iter().map(|r| r.0).sum();
    let width = rows.iter().map(|r| r.0 * r.1).sum::<f64>() / mass;
    let max_dev = rows.iter().fold(0.0_f64, |m, r| m.max((r.1 - width).abs()));
    let reflection_dev = rows.iter().fold(0.0_f64, |m, r| m.max(r.2));
    Ok(WidthReport { width, max_dev, reflection_dev })
}

/// Result of the algebraic constant-width test for rational data.
#[derive(Debug, Clone, Copy)]
pub struct CwCheck {
    pub is_cw: bool,
    /// Reflection factor of the denominator, `+1` or `-1` when consistent.
    pub k: f64,
    /// Implied width.
    pub width: f64,
    /// Largest residual over all coefficient constraints.
    pub max_residual: f64,
}

fn reflection_factor(b: &CoefMatrix) -> Option<f64> {
    let m = b.size() - 1;
    // solve K from the largest entry, then verify every pairing
    let mut best = (0.0, 0usize, 0usize);
    for k in 0..=m {
        for l in 0..=m {
            let v = b.get(k, l).norm();
            if v > best.0 {
                best = (v, k, l);
            }
        }
    }
    if best.0 == 0.0 {
        return None;
    }
    let (_, k, l) = (best.0, best.1, best.2);
    let partner = b.get(m - l, m - k);
    if partner.norm() == 0.0 {
        return None;
    }
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    let kc = b.get(k, l) / (sign * partner);
    if kc.im.abs() > 1e-10 * (1.0 + kc.re.abs()) {
        return None;
    }
    let kv = kc.re;
    let tol = 1e-12 * b.max_abs().max(1.0) * (1.0 + kv.abs());
    for k in 0..=m {
        for l in 0..=m {
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            let res = (b.get(k, l) - kv * sign * b.get(m - l, m - k)).norm();
            if res > tol {
                return None;
            }
        }
    }
    Some(kv)
}

/// Algebraic constant-width test on the coefficient matrices.
///
/// The reflected numerator must combine with the original to a multiple of
/// the denominator: `A[k][l] + (-1)^(k+l) K A[m-l][m-k] = w B[k][l]` for all
/// entries, with `K` the reflection factor of the denominator.
pub fn check_rational_cw(rs: &RationalSupport) -> CwCheck {
    let a = rs.numerator();
    let b = rs.denominator();
    let m = b.size() - 1;
    let fail = CwCheck { is_cw: false, k: 0.0, width: 0.0, max_residual: f64::INFINITY };
    let Some(kv) = reflection_factor(b) else {
        return fail;
    };
    // solve the width from the largest denominator entry
    let mut best = (0.0, 0usize, 0usize);
    for k in 0..=m {
        for l in 0..=m {
            let v = b.get(k, l).norm();
            if v > best.0 {
                best = (v, k, l);
            }
        }
    }
    let (k0, l0) = (best.1, best.2);
    let sign0 = if (k0 + l0) % 2 == 0 { 1.0 } else { -1.0 };
    let wc = (a.get(k0, l0) + sign0 * kv * a.get(m - l0, m - k0)) / b.get(k0, l0);
    if wc.im.abs() > 1e-10 * (1.0 + wc.re.abs()) {
        return fail;
    }
    let w = wc.re;
    let scale = (a.max_abs() + b.max_abs() * (1.0 + w.abs())).max(1.0);
    let mut max_residual = 0.0_f64;
    for k in 0..=m {
        for l in 0..=m {
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            let res = (a.get(k, l) + sign * kv * a.get(m - l, m - k) - w * b.get(k, l)).norm();
            max_residual = max_residual.max(res);
        }
    }
    CwCheck {
        is_cw: max_residual <= 1e-12 * scale,
        k: kv,
        width: w,
        max_residual,
    }
}

/// Complete a partial numerator to a constant-width one over `b`.
///
/// `free` lists assignments `(k, l, value)` for entries whose reflection
/// partner is then determined. Unassigned pairs default the higher-index
/// member to zero. Entries on the anti-diagonal are forced unless the
/// reflection factor cancels there, in which case they stay free.
pub fn make_cw_numerator(
    b: &CoefMatrix,
    free: &[(usize, usize, C)],
    width: f64,
) -> Result<RationalSupport> {
    if width <= 0.0 {
        return Err(Error::InvalidParameter(format!("width {width} must be positive")));
    }
    let m = b.size() - 1;
    let dev = b.hermitian_deviation();
    if dev > 1e-12 * b.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let kv = reflection_factor(b).ok_or_else(|| {
        Error::Unsatisfiable("denominator is not reflection-compatible".into())
    })?;
    let scale = (b.max_abs() * (1.0 + width)).max(1.0);
    let tol = 1e-10 * scale;
    let n = m + 1;
    let mut a: Vec<Vec<Option<C>>> = vec![vec![None; n]; n];

    let assign = |mat: &mut Vec<Vec<Option<C>>>, k: usize, l: usize, v: C| -> Result<()> {
        for (kk, ll, vv) in [(k, l, v), (l, k, v.conj())] {
            if let Some(old) = mat[kk][ll] {
                if (old - vv).norm() > tol {
                    return Err(Error::Unsatisfiable(format!(
                        "conflicting assignments for entry ({kk},{ll})"
                    )));
                }
            }
            mat[kk][ll] = Some(vv);
        }
        Ok(())
    };

    for &(k, l, v) in free {
        if k > m || l > m {
            return Err(Error::InvalidParameter(format!(
                "free entry ({k},{l}) outside degree {m} matrix"
            )));
        }
        if k == l && v.im.abs() > tol {
            return Err(Error::Unsatisfiable(format!(
                "diagonal entry ({k},{k}) must be real"
            )));
        }
        assign(&mut a, k, l, v)?;
    }

    // anti-diagonal entries pair with themselves
    for k in 0..=m {
        let l = m - k;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let factor = 1.0 + sign * kv;
        let rhs = width * b.get(k, l);
        if factor.abs() > 1e-9 {
            assign(&mut a, k, l, rhs / factor)?;
        } else if rhs.norm() > tol {
            return Err(Error::Unsatisfiable(format!(
                "anti-diagonal entry ({k},{l}) requires {rhs} from a cancelling reflection"
            )));
        } else if a[k][l].is_none() {
            assign(&mut a, k, l, C::new(0.0, 0.0))?;
        }
    }

    // remaining entries come in reflection pairs; fill partner or default
    for k in 0..=m {
        for l in 0..=m {
            if k + l == m {
                continue;
            }
            let (pk, pl) = (m - l, m - k);
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            match (a[k][l], a[pk][pl]) {
                (Some(v), Some(p)) => {
                    let res = (v + sign * kv * p - width * b.get(k, l)).norm();
                    if res > tol {
                        return Err(Error::Unsatisfiable(format!(
                            "entries ({k},{l}) and ({pk},{pl}) violate the width constraint by {res:e}"
                        )));
                    }
                }
                (Some(v), None) => {
                    let p = (width * b.get(k, l) - v) * sign / kv;
                    assign(&mut a, pk, pl, p)?;
                }
                (None, Some(p)) => {
                    let v = width * b.get(k, l) - sign * kv * p;
                    assign(&mut a, k, l, v)?;
                }
                (None, None) => {
                    // default: zero the member with the larger index sum
                    if k + l < m {
                        assign(&mut a, pk, pl, C::new(0.0, 0.0))?;
                        assign(&mut a, k, l, width * b.get(k, l))?;
                    }
                }
            }
        }
    }

    let rows: Vec<Vec<C>> = a
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.unwrap_or(C::new(0.0, 0.0))).collect())
        .collect();
    let numerator = CoefMatrix::new(rows)?;
    let rs = RationalSupport::new(numerator, b.clone())?;
    let check = check_rational_cw(&rs);
    if !check.is_cw || (check.width - width).abs() > 1e-9 * (1.0 + width) {
        return Err(Error::Unsatisfiable(format!(
            "completed numerator fails verification (residual {:e})",
            check.max_residual
        )));
    }
    Ok(rs)
}

/// The one-parameter polynomial family
/// `r = (a + b u + (3-b) u^2 + (1-a) u^3) / (1+u)^3 + c`, `u = |xi|^2`.
///
/// It has constant width `1 + 2c` for every `(a, b)`; `a = b - 1` gives a
/// sphere.
pub fn example_family(a: f64, b: f64, c: f64) -> SupportFunction {
    SupportFunction::RotSym(
        RotSymSupport::new(
            vec![a, b, 3.0 - b, 1.0 - a],
            vec![1.0, 3.0, 3.0, 1.0],
            c,
        )
        .expect("family denominator is positive"),
    )
}

/// Round sphere of width `w` centered at the origin.
pub fn sphere_support(w: f64) -> SupportFunction {
    SupportFunction::RotSym(
        RotSymSupport::new(vec![0.5 * w], vec![1.0], 0.0).expect("constant denominator"),
    )
}

/// Add a constant `c` to the support function (outward parallel body).
pub fn shift(s: &SupportFunction, c: f64) -> SupportFunction {
    match s {
        SupportFunction::RotSym(rs) => SupportFunction::RotSym(rs.with_shift(rs.shift() + c)),
        SupportFunction::Shifted { base, c: c0 } => SupportFunction::Shifted {
            base: base.clone(),
            c: c0 + c,
        },
        other => SupportFunction::Shifted { base: Box::new(other.clone()), c },
    }
}

/// Translate the body by `(p_z, p_t)`; the support gains the linear term
/// `<p, n>`.
pub fn translate(s: &SupportFunction, p_z: C, p_t: f64) -> SupportFunction {
    match s {
        SupportFunction::Translated { base, p_z: z0, p_t: t0 } => SupportFunction::Translated {
            base: base.clone(),
            p_z: z0 + p_z,
            p_t: t0 + p_t,
        },
        other => SupportFunction::Translated {
            base: Box::new(other.clone()),
            p_z,
            p_t,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_quadrature;

    fn diag_matrix(d: &[f64]) -> CoefMatrix {
        let n = d.len();
        let mut rows = vec![vec![C::new(0.0, 0.0); n]; n];
        for (k, &v) in d.iter().enumerate() {
            rows[k][k] = C::new(v, 0.0);
        }
        CoefMatrix::new(rows).unwrap()
    }

    fn family_rational(a: f64, b: f64) -> RationalSupport {
        RationalSupport::new(
            diag_matrix(&[a, b, 3.0 - b, 1.0 - a]),
            diag_matrix(&[1.0, 3.0, 3.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn sphere_jet_is_flat() {
        let s = sphere_support(1.0);
        for &xi in &[C::new(0.0, 0.0), C::new(0.4, -0.3), C::new(2.0, 1.0)] {
            let j = s.eval_jet(xi).unwrap();
            assert!((j.r - 0.5).abs() < 1e-14);
            assert!(j.r_xi.norm() < 1e-14);
            assert!(j.f.norm() < 1e-14);
            assert!(j.psi.abs() < 1e-14);
            assert!(j.sigma.norm() < 1e-14);
        }
    }

    #[test]
    fn family_jets_match_finite_differences() {
        let s = example_family(3.0, 2.0, 0.3);
        let h = 1e-5;
        for &xi in &[C::new(0.3, 0.2), C::new(-0.8, 0.5), C::new(1.4, -0.9)] {
            let j = s.eval_jet(xi).unwrap();
            let r = |x: C| s.eval_jet(x).unwrap().r;
            let dx = (r(xi + h) - r(xi - h)) / (2.0 * h);
            let dy = (r(xi + C::new(0.0, h)) - r(xi - C::new(0.0, h))) / (2.0 * h);
            let fd_xi = C::new(dx, -dy) * 0.5;
            assert!((fd_xi - j.r_xi).norm() < 1e-7 * (1.0 + j.r_xi.norm()));
            // second differences need a larger step to stay above roundoff
            let h2 = 1e-4;
            let dxx = (r(xi + h2) - 2.0 * r(xi) + r(xi - h2)) / (h2 * h2);
            let dyy = (r(xi + C::new(0.0, h2)) - 2.0 * r(xi) + r(xi - C::new(0.0, h2))) / (h2 * h2);
            let fd_lap = 0.25 * (dxx + dyy);
            assert!((fd_lap - j.r_xixibar.re).abs() < 1e-6 * (1.0 + j.r_xixibar.norm()));
        }
    }

    #[test]
    fn rational_jets_match_rotsym() {
        let rat = SupportFunction::Rational(family_rational(3.0, 2.0));
        let rot = example_family(3.0, 2.0, 0.0);
        for &xi in &[C::new(0.2, 0.5), C::new(-1.7, 0.4), C::new(0.0, 0.0), C::new(3.0, -2.0)] {
            let a = rat.eval_jet(xi).unwrap();
            let b = rot.eval_jet(xi).unwrap();
            assert!((a.r - b.r).abs() < 1e-12);
            assert!((a.r_xi - b.r_xi).norm() < 1e-12);
            assert!((a.r_xixi - b.r_xixi).norm() < 1e-12);
            assert!((a.r_xixibar - b.r_xixibar).norm() < 1e-12);
        }
    }

    #[test]
    fn eval_is_continuous_across_the_equator() {
        let s = SupportFunction::Rational(family_rational(2.5, 1.5));
        for &phi in &[0.0, 1.0, 2.5, 4.0] {
            let lo = s.eval_jet(C::from_polar(1.0 - 1e-9, phi)).unwrap();
            let hi = s.eval_jet(C::from_polar(1.0 + 1e-9, phi)).unwrap();
            assert!((lo.r - hi.r).abs() < 1e-7);
            assert!((lo.sigma - hi.sigma).norm() < 1e-6);
        }
    }

    #[test]
    fn family_width_is_constant() {
        let s = example_family(3.0, 1.0, 0.25);
        for &xi in &[C::new(0.1, 0.0), C::new(0.9, 1.1), C::new(-0.2, 2.3)] {
            assert!((width_at(&s, xi).unwrap() - 1.5).abs() < 1e-12);
        }
        let grid = build_quadrature(16, 32).unwrap();
        let rep = check_constant_width(&s, &grid).unwrap();
        assert!((rep.width - 1.5).abs() < 1e-12);
        assert!(rep.max_dev < 1e-12);
        assert!(rep.reflection_dev < 1e-10);
    }

    #[test]
    fn antipodal_support_identities() {
        let s = example_family(2.0, 3.5, 0.4);
        let w = 1.8;
        for &xi in &[C::new(0.3, -0.4), C::new(1.2, 0.8), C::new(0.05, 0.02)] {
            let tau = antipodal(xi).unwrap();
            let j = s.eval_jet(xi).unwrap();
            let jt = s.eval_jet(tau).unwrap();
            assert!((jt.r - (w - j.r)).abs() < 1e-10);
            assert!((jt.psi + j.psi).abs() < 1e-10);
            assert!((jt.sigma.norm() - j.sigma.norm()).abs() < 1e-10);
            assert!(j.psi_im.abs() < 1e-10);
        }
    }

    #[test]
    fn nonconstant_width_is_detected() {
        let s = SupportFunction::RotSym(
            RotSymSupport::new(vec![0.5, 0.3, 0.1], vec![1.0, 2.0, 1.0], 0.0).unwrap(),
        );
        let grid = build_quadrature(16, 32).unwrap();
        let rep = check_constant_width(&s, &grid).unwrap();
        assert!(rep.max_dev > 0.01);
    }

    #[test]
    fn rational_cw_check_accepts_family() {
        let check = check_rational_cw(&family_rational(3.0, 3.0));
        assert!(check.is_cw);
        assert!((check.k - 1.0).abs() < 1e-12);
        assert!((check.width - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_cw_check_rejects_perturbation() {
        let rs = RationalSupport::new(
            diag_matrix(&[3.0, 3.1, 0.0, -2.0]),
            diag_matrix(&[1.0, 3.0, 3.0, 1.0]),
        )
        .unwrap();
        assert!(!check_rational_cw(&rs).is_cw);
    }

    #[test]
    fn numerator_completion_defaults() {
        // with no free entries the lower half carries the width
        let rs = make_cw_numerator(&diag_matrix(&[1.0, 3.0, 3.0, 1.0]), &[], 1.0).unwrap();
        let a = rs.numerator();
        for (k, expect) in [(0, 1.0), (1, 3.0), (2, 0.0), (3, 0.0)] {
            assert!((a.get(k, k) - C::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn numerator_completion_matches_family() {
        let (a, b) = (2.7_f64, 1.3_f64);
        let rs = make_cw_numerator(
            &diag_matrix(&[1.0, 3.0, 3.0, 1.0]),
            &[(0, 0, C::new(a, 0.0)), (1, 1, C::new(b, 0.0))],
            1.0,
        )
        .unwrap();
        let m = rs.numerator();
        assert!((m.get(2, 2) - C::new(3.0 - b, 0.0)).norm() < 1e-12);
        assert!((m.get(3, 3) - C::new(1.0 - a, 0.0)).norm() < 1e-12);
        let grid = build_quadrature(12, 24).unwrap();
        let rep = check_constant_width(&SupportFunction::Rational(rs), &grid).unwrap();
        assert!(rep.max_dev < 1e-12);
    }

    #[test]
    fn numerator_completion_rejects_forced_conflicts() {
        // even degree: the center entry is forced to w b / 2
        let b = diag_matrix(&[1.0, 2.0, 1.0]);
        let err = make_cw_numerator(&b, &[(1, 1, C::new(5.0, 0.0))], 1.0);
        assert!(err.is_err());
        let ok = make_cw_numerator(&b, &[(1, 1, C::new(1.0, 0.0))], 1.0);
        assert!(ok.is_ok());
    }

    #[test]
    fn shift_changes_width_only() {
        let s = example_family(3.0, 2.0, 0.0);
        let shifted = shift(&s, 0.2);
        let xi = C::new(0.4, 0.7);
        let j0 = s.eval_jet(xi).unwrap();
        let j1 = shifted.eval_jet(xi).unwrap();
        assert!((j1.r - j0.r - 0.2).abs() < 1e-14);
        assert!((j1.sigma - j0.sigma).norm() < 1e-14);
        assert!((j1.psi - j0.psi).abs() < 1e-14);
        assert!((width_at(&shifted, xi).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn translation_preserves_width() {
        let s = translate(&example_family(3.0, 2.0, 0.1), C::new(0.3, -0.7), 0.45);
        let grid = build_quadrature(16, 32).unwrap();
        let rep = check_constant_width(&s, &grid).unwrap();
        assert!((rep.width - 1.2).abs() < 1e-12);
        assert!(rep.max_dev < 1e-11);
    }

    #[test]
    fn invalid_denominators_are_rejected() {
        // q(u) = 1 - u vanishes at u = 1
        assert!(RotSymSupport::new(vec![1.0], vec![1.0, -1.0], 0.0).is_err());
        // numerator degree above denominator degree
        assert!(RotSymSupport::new(vec![1.0, 1.0], vec![1.0], 0.0).is_err());
        let mut rows = vec![vec![C::new(0.0, 0.0); 2]; 2];
        rows[0][0] = C::new(1.0, 0.0);
        rows[1][1] = C::new(-1.0, 0.0);
        let b = CoefMatrix::new(rows).unwrap();
        assert!(RationalSupport::new(diag_matrix(&[1.0]), b).is_err());
    }

    #[test]
    fn non_hermitian_matrices_are_rejected() {
        let mut rows = vec![vec![C::new(0.0, 0.0); 2]; 2];
        rows[0][0] = C::new(1.0, 0.0);
        rows[0][1] = C::new(0.5, 0.1);
        rows[1][0] = C::new(0.5, 0.1);
        rows[1][1] = C::new(1.0, 0.0);
        let a = CoefMatrix::new(rows).unwrap();
        assert!(matches!(
            RationalSupport::new(a, diag_matrix(&[1.0, 1.0])),
            Err(Error::NotHermitian(_))
        ));
    }
}
