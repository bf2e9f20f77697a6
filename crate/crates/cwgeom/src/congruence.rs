//! Reconstruction of the surface in E3 from a support function, meshing, and
//! plain-text exports.
//!
//! The point of contact of the support plane orthogonal to the direction
//! `xi` lies on the normal line with moment `eta = F(xi)` at parameter
//! `r(xi)` along the line.

use crate::sphere::{line_to_point, EuclideanPoint, OrientedLine};
use crate::support::SupportFunction;
use crate::{C, Error, Result};
use rayon::prelude::*;
use std::fmt::Write as _;

/// Normal line of the support plane orthogonal to `xi`.
pub fn normal_line(s: &SupportFunction, xi: C) -> Result<OrientedLine> {
    Ok(OrientedLine { xi, eta: s.eval_jet(xi)?.f })
}

/// Contact point of the support plane orthogonal to `xi`.
pub fn embed(s: &SupportFunction, xi: C) -> Result<EuclideanPoint> {
    let jet = s.eval_jet(xi)?;
    Ok(line_to_point(&OrientedLine { xi, eta: jet.f }, jet.r))
}

/// Closed-form surface point of the polynomial family, an independent check
/// on `embed`.
pub fn rotsym_parametric(a: f64, b: f64, c: f64, big_r: f64, theta: f64) -> EuclideanPoint {
    let r2 = big_r * big_r;
    let r4 = r2 * r2;
    let den = (1.0 + r2).powi(4);
    let radial = ((a - b + 2.0 * c + 2.0) * (3.0 + r4) * r2
        - (a - b - 2.0 * c) * (1.0 + 3.0 * r4))
        * big_r
        / den;
    let t = ((a - c - 1.0) * r4 * r4
        + (5.0 * a - b - 2.0 * c - 2.0) * r4 * r2
        + (6.0 * b - 9.0) * r4
        + (5.0 * a - b + 2.0 * c) * r2
        + a
        + c)
        / den;
    EuclideanPoint::new(C::from_polar(radial, theta), t)
}

/// Triangulated surface with its generating chart values.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<EuclideanPoint>,
    /// Counterclockwise from outside; indices into `vertices`.
    pub faces: Vec<[usize; 3]>,
    /// Chart value per vertex; infinity marks the south cap.
    pub nodes: Vec<C>,
    /// False when the convexity margin is non-positive somewhere on the grid.
    pub convex: bool,
}

/// Chart value standing in for the south pole in margin probes.
const SOUTH_PROBE: f64 = 1e8;

/// Triangulate the surface on a polar grid.
///
/// Rings sit at `theta_i = i pi / n_theta`; each interior quad is fanned
/// around an embedded center vertex, which keeps the volume of the
/// triangulation second-order accurate. The south cap comes from the
/// antipodal width identity.
pub fn mesh(s: &SupportFunction, n_theta: usize, n_phi: usize) -> Result<SurfaceMesh> {
    if n_theta < 2 || n_phi < 3 {
        return Err(Error::InvalidParameter(format!(
            "mesh grid {n_theta}x{n_phi} below minimum 2x3"
        )));
    }
    let dt = std::f64::consts::PI / n_theta as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi as f64;
    let ring_xi = |theta: f64, phi: f64| C::from_polar((0.5 * theta).tan(), phi);

    let mut nodes = vec![C::new(0.0, 0.0)];
    for i in 1..n_theta {
        for j in 0..n_phi {
            nodes.push(ring_xi(dt * i as f64, dp * j as f64));
        }
    }
    for i in 1..n_theta.saturating_sub(1) {
        for j in 0..n_phi {
            nodes.push(ring_xi(dt * (i as f64 + 0.5), dp * (j as f64 + 0.5)));
        }
    }

    let evaluated: Vec<(EuclideanPoint, f64)> = nodes
        .par_iter()
        .map(|&xi| -> Result<(EuclideanPoint, f64)> {
            let jet = s.eval_jet(xi)?;
            let point = line_to_point(&OrientedLine { xi, eta: jet.f }, jet.r);
            let margin = jet.r + jet.psi - jet.sigma.norm();
            Ok((point, margin))
        })
        .collect::<Result<_>>()?;
    let mut vertices: Vec<EuclideanPoint> = evaluated.iter().map(|e| e.0).collect();
    let mut min_margin = evaluated.iter().fold(f64::INFINITY, |m, e| m.min(e.1));

    // south cap: the contact point of the opposite support plane along e3
    let north = vertices[0];
    let south_jet = s.eval_jet(C::new(SOUTH_PROBE, 0.0))?;
    let width0 = s.eval_jet(C::new(0.0, 0.0))?.r + south_jet.r;
    let south = EuclideanPoint::new(north.z, north.t - width0);
    min_margin = min_margin.min(south_jet.r + south_jet.psi - south_jet.sigma.norm());
    let south_index = vertices.len();
    vertices.push(south);
    nodes.push(C::new(f64::INFINITY, 0.0));

    let rv = |i: usize, j: usize| 1 + (i - 1) * n_phi + (j % n_phi);
    let cv = |i: usize, j: usize| 1 + (n_theta - 1) * n_phi + (i - 1) * n_phi + (j % n_phi);
    let mut faces = Vec::with_capacity(4 * n_theta * n_phi);
    for j in 0..n_phi {
        faces.push([0, rv(1, j), rv(1, j + 1)]);
    }
    for i in 1..n_theta - 1 {
        for j in 0..n_phi {
            let (a, b) = (rv(i, j), rv(i, j + 1));
            let (d, e) = (rv(i + 1, j), rv(i + 1, j + 1));
            let c = cv(i, j);
            faces.push([a, d, c]);
            faces.push([d, e, c]);
            faces.push([e, b, c]);
            faces.push([b, a, c]);
        }
    }
    for j in 0..n_phi {
        faces.push([south_index, rv(n_theta - 1, j + 1), rv(n_theta - 1, j)]);
    }

    Ok(SurfaceMesh {
        vertices,
        faces,
        nodes,
        convex: min_margin > 0.0,
    })
}

/// Wavefront OBJ text for a mesh: `v x y z` lines then 1-based `f i j k`.
pub fn obj_export(mesh: &SurfaceMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 40 + mesh.faces.len() * 16);
    for v in &mesh.vertices {
        let [x, y, z] = v.coords();
        writeln!(out, "v {x:.9} {y:.9} {z:.9}").unwrap();
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

/// OBJ text for a bare point cloud (no faces), used for focal sets.
pub fn obj_points(points: &[EuclideanPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 40);
    for v in points {
        let [x, y, z] = v.coords();
        writeln!(out, "v {x:.9} {y:.9} {z:.9}").unwrap();
    }
    out
}

/// Cross-section of a rotationally symmetric surface in the half-plane
/// `theta = 0`, as CSV rows `R,z,t`.
pub fn cross_section_csv(s: &SupportFunction, n: usize) -> Result<String> {
    if n < 2 {
        return Err(Error::InvalidParameter("cross-section needs at least 2 rows".into()));
    }
    let mut out = String::from("R,z,t\n");
    for i in 0..n {
        let theta = std::f64::consts::PI * i as f64 / n as f64;
        let big_r = (0.5 * theta).tan();
        let p = embed(s, C::new(big_r, 0.0))?;
        writeln!(out, "{:.9},{:.9},{:.9}", big_r, p.z.re, p.t).unwrap();
    }
    Ok(out)
}
