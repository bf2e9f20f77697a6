//! Finite rotation groups and Minkowski averaging of support functions.

use crate::sphere::{moebius_rotate, to_angles, from_angles, QuadratureGrid, RotationElement, SphereAngles};
use crate::support::SupportFunction;
use crate::{Error, Result};
use rayon::prelude::*;

/// A finite group of rotations acting on the direction sphere.
#[derive(Debug, Clone)]
pub struct PointGroup {
    name: String,
    elements: Vec<RotationElement>,
}

impl PointGroup {
    pub fn new(name: impl Into<String>, elements: Vec<RotationElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("empty point group".into()));
        }
        Ok(Self { name: name.into(), elements })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[RotationElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// True when every pairwise product lands back in the group, up to the
    /// quaternion double cover.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.elements.iter().all(|g| {
            self.elements.iter().all(|h| {
                let gh = g.compose(h);
                self.elements.iter().any(|e| gh.approx_eq(e, tol))
            })
        })
    }

    /// Group acting on a seed rotated by `q`: elements become `q^(-1) g`.
    pub fn oriented(&self, q: &RotationElement) -> Self {
        let inv = q.inverse();
        Self {
            name: self.name.clone(),
            elements: self.elements.iter().map(|g| inv.compose(g)).collect(),
        }
    }
}

/// The twelve rotations preserving a regular tetrahedron inscribed in the
/// cube with vertices `(+-1, +-1, +-1)`.
pub fn tetrahedral_group() -> PointGroup {
    let mut elements = vec![
        RotationElement::identity(),
        RotationElement::new([0.0, 1.0, 0.0, 0.0], false).unwrap(),
        RotationElement::new([0.0, 0.0, 1.0, 0.0], false).unwrap(),
        RotationElement::new([0.0, 0.0, 0.0, 1.0], false).unwrap(),
    ];
    for sb in [0.5_f64, -0.5] {
        for sc in [0.5_f64, -0.5] {
            for sd in [0.5_f64, -0.5] {
                elements.push(RotationElement::new([0.5, sb, sc, sd], false).unwrap());
            }
        }
    }
    PointGroup::new("tetrahedral", elements).unwrap()
}

/// Cyclic group of `n` rotations about the vertical axis.
pub fn cyclic_group(n: usize) -> Result<PointGroup> {
    if n == 0 {
        return Err(Error::InvalidParameter("cyclic group order must be positive".into()));
    }
    let elements = (0..n)
        .map(|k| {
            let half = std::f64::consts::PI * k as f64 / n as f64;
            RotationElement::new([half.cos(), 0.0, 0.0, half.sin()], false).unwrap()
        })
        .collect();
    PointGroup::new(format!("cyclic-{n}"), elements)
}

/// Rotation taking the vertical axis to the cube diagonal `(1,1,1)/sqrt(3)`,
/// the default seed orientation for tetrahedral averaging.
pub fn default_orientation() -> RotationElement {
    let angle = (1.0_f64 / 3.0_f64.sqrt()).acos();
    RotationElement::from_axis_angle([-1.0, 1.0, 0.0], angle).unwrap()
}

/// Minkowski average of the orbit of a body under a point group.
///
/// The result is evaluated functionally: each jet request fans out over the
/// group elements and averages the pulled-back jets of the seed.
pub fn average_support(s: &SupportFunction, group: &PointGroup) -> SupportFunction {
    SupportFunction::Averaged {
        base: Box::new(s.clone()),
        group: group.clone(),
    }
}

/// Largest deviation `|r(g xi) - r(xi)|` over the grid and the group.
pub fn verify_invariance(
    s: &SupportFunction,
    group: &PointGroup,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let devs: Vec<f64> = grid
        .nodes
        .par_iter()
        .map(|node| -> Result<f64> {
            let r0 = s.eval_jet(node.xi)?.r;
            let mut dev = 0.0_f64;
            for g in group.elements() {
                let moved = match moebius_rotate(g, node.xi) {
                    Ok(m) => m,
                    Err(Error::ChartExit(_)) => {
                        // nudge off the excluded fiber, as the averaging does
                        let SphereAngles { theta, phi } = to_angles(node.xi);
                        let xi2 = from_angles(SphereAngles { theta: theta - 1e-6, phi })?;
                        moebius_rotate(g, xi2)?
                    }
                    Err(e) => return Err(e),
                };
                dev = dev.max((s.eval_jet(moved)?.r - r0).abs());
            }
            Ok(dev)
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}
