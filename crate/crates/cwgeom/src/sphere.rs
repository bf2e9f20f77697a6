//! Stereographic chart on the direction sphere, rotations acting as Moebius
//! maps, the incidence map from oriented lines to points, and product
//! quadrature rules over the sphere.
//!
//! The chart sends the direction with polar angles `(theta, phi)` to
//! `xi = tan(theta/2) exp(i phi)`, so the north pole is `xi = 0` and the
//! south pole is the point at infinity. Directions themselves are recovered
//! as `n_z = 2 xi / (1 + |xi|^2)`, `n_t = (1 - |xi|^2) / (1 + |xi|^2)`.

use crate::{C, Error, Result};

/// Polar angles of a direction, `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereAngles {
    pub theta: f64,
    pub phi: f64,
}

/// A point of E3 split into its horizontal complex part and vertical part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanPoint {
    pub z: C,
    pub t: f64,
}

impl EuclideanPoint {
    pub fn new(z: C, t: f64) -> Self {
        Self { z, t }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.z.re, self.z.im, self.t]
    }

    pub fn dist(&self, other: &Self) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.t - other.t).powi(2)).sqrt()
    }
}

/// An oriented line, recorded by its direction chart value `xi` and moment `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedLine {
    pub xi: C,
    pub eta: C,
}

/// Chart value of the direction with the given polar angles.
///
/// The south pole `theta = pi` lies outside the chart and is rejected.
pub fn from_angles(angles: SphereAngles) -> Result<C> {
    let SphereAngles { theta, phi } = angles;
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::ChartExit(format!(
            "theta = {theta} outside [0, pi)"
        )));
    }
    Ok(C::from_polar((0.5 * theta).tan(), phi))
}

/// Polar angles of a chart value, with `phi` normalized to `[0, 2 pi)`.
///
/// At `xi = 0` the azimuth is conventionally zero.
pub fn to_angles(xi: C) -> SphereAngles {
    let theta = 2.0 * xi.norm().atan();
    let mut phi = if xi == C::new(0.0, 0.0) { 0.0 } else { xi.arg() };
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    if phi >= 2.0 * std::f64::consts::PI {
        phi = 0.0;
    }
    SphereAngles { theta, phi }
}

/// Chart value of the opposite direction, `tau(xi) = -1 / conj(xi)`.
///
/// The image of the north pole is the south pole, which leaves the chart.
pub fn antipodal(xi: C) -> Result<C> {
    if xi.norm_sqr() == 0.0 {
        return Err(Error::ChartExit("antipode of xi = 0 is the south pole".into()));
    }
    Ok(-1.0 / xi.conj())
}

/// A rotation of E3 stored as a unit quaternion, optionally composed with the
/// reflection that conjugates the chart coordinate first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationElement {
    q: [f64; 4],
    improper: bool,
}

impl RotationElement {
    /// Wrap a quaternion, requiring unit norm to 1e-12 and renormalizing.
    pub fn new(q: [f64; 4], improper: bool) -> Result<Self> {
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "quaternion norm {n} is not 1"
            )));
        }
        Ok(Self {
            q: [q[0] / n, q[1] / n, q[2] / n, q[3] / n],
            improper,
        })
    }

    pub fn identity() -> Self {
        Self { q: [1.0, 0.0, 0.0, 0.0], improper: false }
    }

    /// Rotation by `angle` about a (not necessarily unit) axis.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParameter("zero rotation axis".into()));
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Self::new(
            [c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n],
            false,
        )
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn is_improper(&self) -> bool {
        self.improper
    }

    /// Inverse element (conjugate quaternion for a proper rotation).
    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.q;
        if self.improper {
            // inverse of xi -> M(conj xi) is xi -> Mc^{-1}(conj xi) with
            // conjugated coefficients
            Self { q: [a, b, -c, d], improper: true }
        } else {
            Self { q: [a, -b, -c, -d], improper: false }
        }
    }

    /// Composition `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let o = if self.improper {
            // pulling the conjugation of self past other conjugates its chart
            // action, which flips the sign of q1 and q3
            [other.q[0], -other.q[1], other.q[2], -other.q[3]]
        } else {
            other.q
        };
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = o;
        Self {
            q: [
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ],
            improper: self.improper != other.improper,
        }
    }

    /// SU(2) image `(alpha, beta)` of the quaternion part; the chart action is
    /// `xi -> (alpha xi + beta) / (-conj(beta) xi + conj(alpha))`.
    pub fn su2(&self) -> (C, C) {
        let [a, b, c, d] = self.q;
        (C::new(a, d), C::new(c, -b))
    }

    /// Equality up to the quaternion double cover, ignoring nothing else.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.improper != other.improper {
            return false;
        }
        let d1: f64 = self
            .q
            .iter()
            .zip(&other.q)
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        let d2: f64 = self
            .q
            .iter()
            .zip(&other.q)
            .map(|(x, y)| (x + y) * (x + y))
            .sum();
        d1.sqrt().min(d2.sqrt()) <= tol
    }

    /// Rotate a Euclidean vector by the quaternion action `q v q^(-1)`.
    pub fn rotate_vector(&self, v: [f64; 3]) -> [f64; 3] {
        let [a, b, c, d] = self.q;
        let (x, y, z) = (v[0], v[1], v[2]);
        // quaternion sandwich written out
        let tx = 2.0 * (c * z - d * y);
        let ty = 2.0 * (d * x - b * z);
        let tz = 2.0 * (b * y - c * x);
        [
            x + a * tx + (c * tz - d * ty),
            y + a * ty + (d * tx - b * tz),
            z + a * tz + (b * ty - c * tx),
        ]
    }
}

/// Chart action of a rotation element.
///
/// Directions carried onto the south pole exit the chart; the caller decides
/// how to recover (the averaging evaluator perturbs and retries).
pub fn moebius_rotate(g: &RotationElement, xi: C) -> Result<C> {
    let x = if g.is_improper() { xi.conj() } else { xi };
    let (alpha, beta) = g.su2();
    let den = -beta.conj() * x + alpha.conj();
    if den.norm() <= 1e-12 * (1.0 + x.norm()) {
        return Err(Error::ChartExit(
            "rotation maps the direction to the south pole".into(),
        ));
    }
    Ok((alpha * x + beta) / den)
}

/// Point of the oriented line `(xi, eta)` at signed support distance `r`.
///
/// `r = 0` gives the foot point of the line; moving along the direction of
/// the line adds `r` times the unit direction.
pub fn line_to_point(line: &OrientedLine, r: f64) -> EuclideanPoint {
    let OrientedLine { xi, eta } = *line;
    let s = 1.0 + xi.norm_sqr();
    let z = (2.0 * (eta - eta.conj() * xi * xi) + 2.0 * xi * s * r) / (s * s);
    let t = (-4.0 * (eta * xi.conj()).re + (1.0 - xi.norm_sqr() * xi.norm_sqr()) * r) / (s * s);
    EuclideanPoint::new(z, t)
}

/// One node of a spherical quadrature rule.
#[derive(Debug, Clone, Copy)]
pub struct QuadNode {
    pub xi: C,
    pub theta: f64,
    pub phi: f64,
    /// Weight against the solid-angle measure, so the weights sum to 4 pi.
    pub weight: f64,
}

/// Product rule: Gauss-Legendre in cos(theta) times uniform in phi.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<QuadNode>,
}

impl QuadratureGrid {
    /// Integrate a function of the chart value over the sphere.
    pub fn integrate<F: Fn(C) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.xi)).sum()
    }

    /// Total mass of the rule (4 pi up to roundoff).
    pub fn mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

/// Build the product quadrature grid. Requires `n_theta >= 2`, `n_phi >= 4`.
///
/// Nodes are ordered theta-major with a fixed orientation, so summation
/// order, and therefore output bytes downstream, are reproducible.
pub fn build_quadrature(n_theta: usize, n_phi: usize) -> Result<QuadratureGrid> {
    if n_theta < 2 || n_phi < 4 {
        return Err(Error::InvalidParameter(format!(
            "quadrature grid {n_theta}x{n_phi} below minimum 2x4"
        )));
    }
    let (xs, ws) = gauss_legendre(n_theta);
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in xs.iter().zip(&ws) {
        // x = cos(theta); tan(theta/2) = sqrt((1-x)/(1+x)) is stable for x near 1
        let theta = x.clamp(-1.0, 1.0).acos();
        let rho = ((1.0 - x) / (1.0 + x)).sqrt();
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            nodes.push(QuadNode {
                xi: C::from_polar(rho, phi),
                theta,
                phi,
                weight: w * dphi,
            });
        }
    }
    Ok(QuadratureGrid { n_theta, n_phi, nodes })
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Unit direction of a chart value, as a Euclidean vector.
pub fn direction(xi: C) -> [f64; 3] {
    let s = 1.0 + xi.norm_sqr();
    let z = 2.0 * xi / s;
    [z.re, z.im, (1.0 - xi.norm_sqr()) / s]
}
