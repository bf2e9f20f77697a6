//! Focal sets of the normal line congruence, convexity margins, cusp loci of
//! rotationally symmetric surfaces, and the shrink-to-criticality step.
//!
//! The focal points along the normal line at `xi` sit at parameters
//! `r_pm = -psi +- |sigma|`. The body stays convex while the support value
//! `r` exceeds `r_plus` everywhere; the gap `r - r_plus` is the margin.

use crate::measures::iso_ratio;
use crate::poly;
use crate::sphere::{
    from_angles, line_to_point, to_angles, EuclideanPoint, OrientedLine, QuadratureGrid,
    SphereAngles,
};
use crate::support::{check_constant_width, shift, RotSymSupport, SupportFunction};
use crate::{C, Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Focal parameters along one normal line.
#[derive(Debug, Clone, Copy)]
pub struct FocalData {
    pub r_plus: f64,
    pub r_minus: f64,
    /// Convexity margin `r - r_plus = r + psi - |sigma|`.
    pub margin: f64,
}

/// Focal parameters and margin at a chart value.
pub fn focal_radii(s: &SupportFunction, xi: C) -> Result<FocalData> {
    let jet = s.eval_jet(xi)?;
    let a = jet.sigma.norm();
    Ok(FocalData {
        r_plus: -jet.psi + a,
        r_minus: -jet.psi - a,
        margin: jet.r + jet.psi - a,
    })
}

/// Focal points `(plus, minus)` on the normal line at `xi`.
pub fn focal_points(s: &SupportFunction, xi: C) -> Result<(EuclideanPoint, EuclideanPoint)> {
    let jet = s.eval_jet(xi)?;
    let a = jet.sigma.norm();
    let line = OrientedLine { xi, eta: jet.f };
    Ok((
        line_to_point(&line, -jet.psi + a),
        line_to_point(&line, -jet.psi - a),
    ))
}

/// The two focal branches of a rotationally symmetric surface at radius `R`.
#[derive(Debug, Clone, Copy)]
pub struct RotsymFocal {
    /// Curve branch, at the `theta = 0` representative.
    pub curve: EuclideanPoint,
    /// Branch on the symmetry axis.
    pub axis: EuclideanPoint,
}

/// Closed-form focal branches of a rotationally symmetric support.
///
/// Which branch carries `r_plus` versus `r_minus` depends on the surface;
/// match by distance against `focal_points` when the labels matter.
pub fn rotsym_focal(rs: &RotSymSupport, big_r: f64) -> Result<RotsymFocal> {
    if big_r < 0.0 {
        return Err(Error::InvalidParameter(format!("radius {big_r} must be nonnegative")));
    }
    let [_, dr, d2r, _] = rs.radial(big_r);
    let u = big_r * big_r;
    let curve = EuclideanPoint::new(
        C::new(
            0.5 * (-big_r * (1.0 + u) * d2r + (1.0 - 3.0 * u) * dr),
            0.0,
        ),
        0.25 * (-(1.0 - u * u) * d2r - 2.0 * big_r * (3.0 - u) * dr),
    );
    // -(1+u)^2/(4R) dr stays finite at R = 0 through dr = 2R f'
    let f1 = rs.profile(u)[1];
    let axis = EuclideanPoint::new(C::new(0.0, 0.0), -0.5 * (1.0 + u) * (1.0 + u) * f1);
    Ok(RotsymFocal { curve, axis })
}

/// Both focal branches sampled over the grid, as a point cloud.
pub fn focal_cloud(s: &SupportFunction, grid: &QuadratureGrid) -> Result<Vec<EuclideanPoint>> {
    let pairs: Vec<(EuclideanPoint, EuclideanPoint)> = grid
        .nodes
        .par_iter()
        .map(|node| focal_points(s, node.xi))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (p, m) in pairs {
        out.push(p);
        out.push(m);
    }
    Ok(out)
}

/// OBJ text of the curve branch swept around the axis, with the axis branch
/// appended as bare vertices.
pub fn focal_sweep_obj(rs: &RotSymSupport, n_r: usize, n_phi: usize) -> Result<String> {
    if n_r < 2 || n_phi < 3 {
        return Err(Error::InvalidParameter(format!(
            "focal sweep grid {n_r}x{n_phi} below minimum 2x3"
        )));
    }
    let mut out = String::new();
    for i in 1..=n_r {
        let theta = PI * i as f64 / (n_r + 1) as f64;
        let big_r = (0.5 * theta).tan();
        let f = rotsym_focal(rs, big_r)?;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let z = f.curve.z.re * C::from_polar(1.0, phi);
            writeln!(out, "v {:.9} {:.9} {:.9}", z.re, z.im, f.curve.t).unwrap();
        }
    }
    for i in 0..n_r {
        for j in 0..n_phi {
            // two triangles per quad of the swept strip
            let a = i * n_phi + j + 1;
            let b = i * n_phi + (j + 1) % n_phi + 1;
            if i + 1 < n_r {
                let c = (i + 1) * n_phi + j + 1;
                let d = (i + 1) * n_phi + (j + 1) % n_phi + 1;
                writeln!(out, "f {a} {c} {d}").unwrap();
                writeln!(out, "f {a} {d} {b}").unwrap();
            }
        }
    }
    for i in 1..=n_r {
        let theta = PI * i as f64 / (n_r + 1) as f64;
        let f = rotsym_focal(rs, (0.5 * theta).tan())?;
        writeln!(out, "v {:.9} {:.9} {:.9}", 0.0, 0.0, f.axis.t).unwrap();
    }
    Ok(out)
}

/// CSV rows `R,z,t` of the curve branch followed by the axis branch.
pub fn rotsym_focal_csv(rs: &RotSymSupport, n: usize) -> Result<String> {
    if n < 2 {
        return Err(Error::InvalidParameter("focal section needs at least 2 rows".into()));
    }
    let mut out = String::from("R,z,t\n");
    let mut axis_rows = String::new();
    for i in 0..n {
        let theta = PI * i as f64 / n as f64;
        let big_r = (0.5 * theta).tan();
        let f = rotsym_focal(rs, big_r)?;
        writeln!(out, "{:.9},{:.9},{:.9}", big_r, f.curve.z.re, f.curve.t).unwrap();
        writeln!(axis_rows, "{:.9},{:.9},{:.9}", big_r, 0.0, f.axis.t).unwrap();
    }
    out.push_str(&axis_rows);
    Ok(out)
}

/// Minimum convexity margin over the sphere and where it is attained.
#[derive(Debug, Clone, Copy)]
pub struct MarginReport {
    pub min_margin: f64,
    pub argmin_xi: C,
}

fn margin_at(s: &SupportFunction, xi: C) -> Result<f64> {
    let jet = s.eval_jet(xi)?;
    Ok(jet.r + jet.psi - jet.sigma.norm())
}

fn margin_at_angles(s: &SupportFunction, theta: f64, phi: f64) -> Result<f64> {
    margin_at(s, from_angles(SphereAngles { theta, phi })?)
}

const THETA_MAX: f64 = PI - 1e-9;

/// Global minimum of the margin: grid scan seeded with both poles, then
/// derivative-free refinement (golden section along the polar angle for
/// rotationally symmetric supports, compass search otherwise).
pub fn convexity_margin(s: &SupportFunction, grid: &QuadratureGrid) -> Result<MarginReport> {
    let mut seeds: Vec<(f64, f64, f64)> = grid
        .nodes
        .par_iter()
        .map(|node| -> Result<(f64, f64, f64)> {
            Ok((margin_at(s, node.xi)?, node.theta, node.phi))
        })
        .collect::<Result<_>>()?;
    seeds.push((margin_at(s, C::new(0.0, 0.0))?, 0.0, 0.0));
    let south = C::new(1e8, 0.0);
    seeds.push((margin_at(s, south)?, to_angles(south).theta, 0.0));
    let &(mut best, mut theta, mut phi) = seeds
        .iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();

    let step = (PI / grid.n_theta as f64).max(2.0 * PI / grid.n_phi as f64);
    if s.is_rotational() {
        // golden-section on the polar angle
        phi = 0.0;
        let mut lo = (theta - step).max(0.0);
        let mut hi = (theta + step).min(THETA_MAX);
        let g = 0.5 * (5.0_f64.sqrt() - 1.0);
        let mut t1 = hi - g * (hi - lo);
        let mut t2 = lo + g * (hi - lo);
        let mut m1 = margin_at_angles(s, t1, phi)?;
        let mut m2 = margin_at_angles(s, t2, phi)?;
        while hi - lo > 1e-12 {
            if m1 <= m2 {
                hi = t2;
                t2 = t1;
                m2 = m1;
                t1 = hi - g * (hi - lo);
                m1 = margin_at_angles(s, t1, phi)?;
            } else {
                lo = t1;
                t1 = t2;
                m1 = m2;
                t2 = lo + g * (hi - lo);
                m2 = margin_at_angles(s, t2, phi)?;
            }
        }
        theta = 0.5 * (lo + hi);
        let m = margin_at_angles(s, theta, phi)?;
        if m < best {
            best = m;
        } else {
            // keep the seed when the polish cannot improve it (pole minima)
            let m0 = margin_at_angles(s, lo, phi)?;
            if m0 < best {
                best = m0;
                theta = lo;
            }
        }
    } else {
        // compass search over (theta, phi)
        let mut h = step;
        let mut evals = 0;
        while h > 1e-9 && evals < 100_000 {
            let mut moved = false;
            for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                let t2 = (theta + dt).clamp(0.0, THETA_MAX);
                let p2 = (phi + dp).rem_euclid(2.0 * PI);
                let m = margin_at_angles(s, t2, p2)?;
                evals += 1;
                if m < best {
                    best = m;
                    theta = t2;
                    phi = p2;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
    }
    Ok(MarginReport {
        min_margin: best,
        argmin_xi: from_angles(SphereAngles { theta: theta.min(THETA_MAX), phi })?,
    })
}

/// Result of shrinking a constant-width body to first focal contact.
#[derive(Debug, Clone, Copy)]
pub struct ShrinkReport {
    /// Signed shift from the given body to the critical one.
    pub c_star: f64,
    /// Isoperimetric-type ratio of the critical body.
    pub i_at_limit: f64,
    /// Direction of first contact with the focal set.
    pub argmin_xi: C,
    /// Width of the critical body.
    pub width_at_limit: f64,
}

/// Shrink a constant-width body along its parallel family to the first focal
/// contact.
///
/// The margin is linear in the shift with unit slope, so the critical shift
/// is read off the margin minimum directly; spheres degenerate to a point
/// before losing convexity.
pub fn shrink_limit(s: &SupportFunction, grid: &QuadratureGrid) -> Result<ShrinkReport> {
    let rep = check_constant_width(s, grid)?;
    if rep.max_dev >= 1e-8 {
        return Err(Error::WidthViolation { dev: rep.max_dev, tol: 1e-8 });
    }
    let mg = convexity_margin(s, grid)?;
    let c_star = -mg.min_margin;
    let width_at_limit = rep.width + 2.0 * c_star;
    if width_at_limit <= 1e-9 {
        return Err(Error::DegenerateShrink);
    }
    let critical = shift(s, c_star);
    Ok(ShrinkReport {
        c_star,
        i_at_limit: iso_ratio(&critical, grid)?,
        argmin_xi: mg.argmin_xi,
        width_at_limit,
    })
}

/// Radii `R >= 0` at which the focal curve of a rotationally symmetric
/// surface has cusps.
///
/// The cusp equation `(1+R^2) r''' + 6R r'' + 6 r' = 0` is odd in `R`, so
/// `R = 0` always belongs to the locus; the positive roots come from the
/// exact polynomial numerator of the remaining even factor in `u = R^2`.
pub fn rotsym_cusps(rs: &RotSymSupport) -> Result<Vec<f64>> {
    let p = rs.p();
    let q = rs.q();
    let dp = poly::derivative(p);
    let dq = poly::derivative(q);
    let n1 = poly::sub(&poly::mul(&dp, q), &poly::mul(p, &dq));
    let n2 = poly::sub(
        &poly::mul(&poly::derivative(&n1), q),
        &poly::scale(&poly::mul(&n1, &dq), 2.0),
    );
    let n3 = poly::sub(
        &poly::mul(&poly::derivative(&n2), q),
        &poly::scale(&poly::mul(&n2, &dq), 3.0),
    );
    // (1+R^2) r''' + 6R r'' + 6 r' = (4R/q^4) (2u(1+u) N3 + 3(1+3u) N2 q + 6 N1 q^2)
    let num = poly::add(
        &poly::add(
            &poly::mul(&[0.0, 2.0, 2.0], &n3),
            &poly::mul(&poly::mul(&[3.0, 9.0], &n2), q),
        ),
        &poly::scale(&poly::mul(&n1, &poly::mul(q, q)), 6.0),
    );
    let scale = (poly::max_abs(p) + 1.0) * poly::max_abs(q).powi(3) * q.len().pow(3) as f64;
    if poly::max_abs(&num) <= 1e-12 * scale {
        return Err(Error::DegenerateEquation(
            "cusp equation vanishes identically (umbilic sphere)".into(),
        ));
    }
    let mut roots = vec![0.0];
    for u in poly::roots_nonneg(&num, 1e-9) {
        if u > 1e-13 {
            roots.push(u.sqrt());
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    Ok(roots)
}
