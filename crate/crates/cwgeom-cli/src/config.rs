//! Scene configuration: JSON description of a support function, quadrature
//! grid, and output destination.

use cwgeom::poly::CoefMatrix;
use cwgeom::{
    average_support, cyclic_group, default_orientation, example_family, make_cw_numerator, shift,
    sphere_support, tetrahedral_group, translate, C, PointGroup, RationalSupport, RotSymSupport,
    RotationElement, SupportFunction,
};
use serde::{Deserialize, Serialize};

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    pub fn to_c(self) -> C {
        match self {
            Num::Real(x) => C::new(x, 0.0),
            Num::Complex([re, im]) => C::new(re, im),
        }
    }
}

/// One prescribed numerator entry for the constant-width completion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FreeEntry {
    pub k: usize,
    pub l: usize,
    pub value: Num,
}

/// Point group selector for averaged supports.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 4]>,
}

impl GroupSpec {
    /// Base group without the seed reorientation.
    pub fn base_group(&self) -> anyhow::Result<PointGroup> {
        match self.group.as_str() {
            "tetrahedral" => Ok(tetrahedral_group()),
            "cyclic" => {
                let n = self
                    .n
                    .ok_or_else(|| anyhow::anyhow!("cyclic group needs an order field n"))?;
                Ok(cyclic_group(n)?)
            }
            other => anyhow::bail!("unknown group {other:?} (expected tetrahedral or cyclic)"),
        }
    }

    /// Group with the seed orientation folded in; `override_q` wins over the
    /// config value, and the tetrahedral group defaults to the diagonal axis.
    pub fn build(&self, override_q: Option<[f64; 4]>) -> anyhow::Result<PointGroup> {
        let base = self.base_group()?;
        let q = override_q.or(self.orientation);
        let rot = match q {
            Some(q) => RotationElement::new(q, false)?,
            None if self.group == "tetrahedral" => default_orientation(),
            None => return Ok(base),
        };
        Ok(base.oriented(&rot))
    }
}

/// JSON form of a support function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupportSpec {
    /// Rotationally symmetric rational family `(a + bu + (3-b)u^2 + (1-a)u^3)/(1+u)^3 + c`.
    Example {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
    },
    /// Round sphere of the given width.
    Sphere { width: f64 },
    /// Rotationally symmetric profile `p(u)/q(u) + shift` in `u = |xi|^2`.
    Rotsym {
        p: Vec<f64>,
        q: Vec<f64>,
        #[serde(default)]
        shift: f64,
    },
    /// Bihomogeneous rational support `P/Q`; either give the numerator or a
    /// width (plus optional free entries) to complete it to constant width.
    Rational {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        numerator: Option<Vec<Vec<Num>>>,
        denominator: Vec<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        free: Vec<FreeEntry>,
    },
    /// Parallel body at signed distance `c`.
    Shift { base: Box<SupportSpec>, c: f64 },
    /// Translate by `[x, y, z]`.
    Translate { base: Box<SupportSpec>, by: [f64; 3] },
    /// Group average of the base support.
    Average {
        base: Box<SupportSpec>,
        group: GroupSpec,
    },
}

fn matrix(rows: &[Vec<Num>]) -> anyhow::Result<CoefMatrix> {
    Ok(CoefMatrix::new(
        rows.iter()
            .map(|r| r.iter().map(|n| n.to_c()).collect())
            .collect(),
    )?)
}

impl SupportSpec {
    /// Construct the support function; `orientation` overrides the group
    /// orientation of every average node.
    pub fn build(&self, orientation: Option<[f64; 4]>) -> anyhow::Result<SupportFunction> {
        Ok(match self {
            SupportSpec::Example { a, b, c } => example_family(*a, *b, *c),
            SupportSpec::Sphere { width } => sphere_support(*width),
            SupportSpec::Rotsym { p, q, shift } => {
                SupportFunction::RotSym(RotSymSupport::new(p.clone(), q.clone(), *shift)?)
            }
            SupportSpec::Rational {
                numerator,
                denominator,
                width,
                free,
            } => {
                let b = matrix(denominator)?;
                let rational = match (numerator, width) {
                    (Some(num), None) => RationalSupport::new(matrix(num)?, b)?,
                    (None, Some(w)) => {
                        let free: Vec<(usize, usize, C)> =
                            free.iter().map(|e| (e.k, e.l, e.value.to_c())).collect();
                        make_cw_numerator(&b, &free, *w)?
                    }
                    (Some(_), Some(_)) => {
                        anyhow::bail!("rational support takes either a numerator or a width, not both")
                    }
                    (None, None) => {
                        anyhow::bail!("rational support needs a numerator or a target width")
                    }
                };
                SupportFunction::Rational(rational)
            }
            SupportSpec::Shift { base, c } => shift(&base.build(orientation)?, *c),
            SupportSpec::Translate { base, by } => {
                translate(&base.build(orientation)?, C::new(by[0], by[1]), by[2])
            }
            SupportSpec::Average { base, group } => {
                average_support(&base.build(orientation)?, &group.build(orientation)?)
            }
        })
    }
}

/// Quadrature grid sizes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

/// Top-level scene description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub support: SupportSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

impl SceneConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("cannot parse config {}: {e}", path.display()))
    }
}
