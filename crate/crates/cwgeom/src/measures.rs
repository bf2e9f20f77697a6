//! Integral functionals of constant-width bodies: surface area, Blaschke
//! volume, the isoperimetric-type ratio `I`, the width-deficit integral, and
//! its role as the derivative of `I` under parallel shifts.

use crate::congruence::SurfaceMesh;
use crate::sphere::{antipodal, QuadratureGrid};
use crate::support::SupportFunction;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;

/// Scalar functionals of one body on one grid.
#[derive(Debug, Clone, Copy)]
pub struct MeasureReport {
    pub area: f64,
    pub volume: f64,
    pub width: f64,
    pub ratio_i: f64,
    pub deficit: f64,
    /// Largest nodal width deviation seen while integrating.
    pub width_dev: f64,
}

struct Moments {
    mass: f64,
    area: f64,
    /// First moment of `r + psi`.
    s1: f64,
    width: f64,
    width_dev: f64,
}

fn moments(s: &SupportFunction, grid: &QuadratureGrid) -> Result<Moments> {
    let rows: Vec<(f64, f64, f64, f64)> = grid
        .nodes
        .par_iter()
        .map(|node| -> Result<(f64, f64, f64, f64)> {
            let jet = s.eval_jet(node.xi)?;
            let width = jet.r + s.eval_jet(antipodal(node.xi)?)?.r;
            let rho = jet.r + jet.psi;
            Ok((node.weight, rho * rho - jet.sigma.norm_sqr(), rho, width))
        })
        .collect::<Result<_>>()?;
    let mass: f64 = rows.iter().map(|r| r.0).sum();
    let area: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    let s1: f64 = rows.iter().map(|r| r.0 * r.2).sum();
    let width: f64 = rows.iter().map(|r| r.0 * r.3).sum::<f64>() / mass;
    let width_dev = rows
        .iter()
        .fold(0.0_f64, |m, r| m.max((r.3 - width).abs()));
    Ok(Moments { mass, area, s1, width, width_dev })
}

impl Moments {
    /// `D = integral of |sigma|^2 - (r - w/2 + psi)^2`, expanded in moments.
    fn deficit(&self) -> f64 {
        -self.area + self.width * self.s1 - 0.25 * self.width * self.width * self.mass
    }

    fn volume(&self) -> f64 {
        0.5 * self.width * self.area - std::f64::consts::PI * self.width.powi(3) / 3.0
    }

    fn report(&self) -> MeasureReport {
        let w3 = std::f64::consts::PI * self.width.powi(3);
        MeasureReport {
            area: self.area,
            volume: self.volume(),
            width: self.width,
            ratio_i: 6.0 * self.volume() / w3,
            deficit: self.deficit(),
            width_dev: self.width_dev,
        }
    }
}

/// All functionals in one quadrature pass. No width gate is applied; the
/// volume and ratio come from the Blaschke relation and are meaningful for
/// constant-width bodies.
pub fn measure(s: &SupportFunction, grid: &QuadratureGrid) -> Result<MeasureReport> {
    Ok(moments(s, grid)?.report())
}

/// Surface area, the quadrature of `(r + psi)^2 - |sigma|^2`.
pub fn area(s: &SupportFunction, grid: &QuadratureGrid) -> Result<f64> {
    Ok(moments(s, grid)?.area)
}

/// Blaschke volume `w A / 2 - pi w^3 / 3`. Requires constant width to 1e-8.
pub fn volume_cw(s: &SupportFunction, grid: &QuadratureGrid) -> Result<f64> {
    let m = moments(s, grid)?;
    if m.width_dev >= 1e-8 {
        return Err(Error::WidthViolation { dev: m.width_dev, tol: 1e-8 });
    }
    Ok(m.volume())
}

/// Ratio of the volume to the volume of the sphere of the same width.
pub fn iso_ratio(s: &SupportFunction, grid: &QuadratureGrid) -> Result<f64> {
    let m = moments(s, grid)?;
    if m.width_dev >= 1e-8 {
        return Err(Error::WidthViolation { dev: m.width_dev, tol: 1e-8 });
    }
    Ok(m.report().ratio_i)
}

/// Width-deficit integral `D >= 0`; zero exactly for spheres.
pub fn width_deficit(s: &SupportFunction, grid: &QuadratureGrid) -> Result<f64> {
    Ok(moments(s, grid)?.deficit())
}

/// Derivative of `iso_ratio` along the outward shift, `12 D / (pi w^3)`.
pub fn di_dc(s: &SupportFunction, grid: &QuadratureGrid) -> Result<f64> {
    let m = moments(s, grid)?;
    Ok(12.0 * m.deficit() / (std::f64::consts::PI * m.width.powi(3)))
}

/// Signed volume of a closed triangulated surface by the divergence theorem.
///
/// Every directed edge must be matched by its reverse; open or inconsistently
/// oriented meshes are rejected.
pub fn mesh_volume(mesh: &SurfaceMesh) -> Result<f64> {
    let mut edges: HashMap<(usize, usize), i64> = HashMap::new();
    for f in &mesh.faces {
        for (u, v) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            if u == v || u >= mesh.vertices.len() || v >= mesh.vertices.len() {
                return Err(Error::InvalidParameter(format!(
                    "face references bad edge ({u},{v})"
                )));
            }
            *edges.entry((u.min(v), u.max(v))).or_insert(0) += if u < v { 1 } else { -1 };
        }
    }
    let unmatched = edges.values().filter(|&&c| c != 0).count();
    if unmatched > 0 {
        return Err(Error::OpenMesh(unmatched));
    }
    let mut six_v = 0.0;
    for f in &mesh.faces {
        let a = mesh.vertices[f[0]].coords();
        let b = mesh.vertices[f[1]].coords();
        let c = mesh.vertices[f[2]].coords();
        six_v += a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    Ok(six_v / 6.0)
}
