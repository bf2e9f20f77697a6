//! Command-line driver: measure, shrink, export, symmetrize, check.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{SceneConfig, SupportSpec};
use cwgeom::{
    build_quadrature, check_constant_width, check_rational_cw, congruence, focal, measures,
    shift, shrink_limit, verify_invariance, QuadratureGrid, SupportFunction,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cwgeom", version, about = "Constant-width surface toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Scene config JSON
    #[arg(long)]
    config: PathBuf,
    /// Quadrature grid as NxM (theta x phi), overrides the config
    #[arg(long)]
    grid: Option<String>,
    /// Orientation quaternion "q0,q1,q2,q3" for group averages
    #[arg(long)]
    orientation: Option<String>,
}

#[derive(Args)]
struct OutArg {
    /// Output path prefix, overrides the config
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Area, volume, width, isoperimetric-type ratio, and width deficit
    Measure(Common),
    /// Shrink along the normals to the first focal contact
    Shrink {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        out: OutArg,
    },
    /// Write surface/focal meshes, cross-sections, or cusp radii
    Export {
        /// What to export
        #[arg(value_parser = ["surface", "focal", "cross_section", "cusps"])]
        what: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        out: OutArg,
    },
    /// Average over a point group and validate the result
    Symmetrize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        out: OutArg,
    },
    /// Constant-width validation report
    Check(Common),
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure { code: 4, msg: msg.into() }
    }
}

impl From<cwgeom::Error> for Failure {
    fn from(e: cwgeom::Error) -> Self {
        let code = match e {
            cwgeom::Error::WidthViolation { .. } => 2,
            cwgeom::Error::DegenerateShrink => 3,
            cwgeom::Error::DenominatorVanishes(_)
            | cwgeom::Error::NotHermitian(_)
            | cwgeom::Error::Unsatisfiable(_)
            | cwgeom::Error::InvalidParameter(_) => 4,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        // construction problems surfaced through anyhow keep their exit code
        match e.downcast::<cwgeom::Error>() {
            Ok(lib) => lib.into(),
            Err(e) => Failure::config(format!("{e:#}")),
        }
    }
}

/// Format to 12 significant digits, plain decimal where reasonable.
fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    if !x.is_finite() {
        return "null".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..=14).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = 1 + exp;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
        out.push_str(".0");
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

fn json_line(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("\"{k}\":{v}")).collect();
    format!("{{{}}}", body.join(","))
}

struct Scene {
    cfg: SceneConfig,
    support: SupportFunction,
    grid: QuadratureGrid,
    prefix: String,
}

fn parse_grid(text: &str) -> Result<(usize, usize), Failure> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Failure::config(format!("grid {text:?} is not of the form NxM")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Failure::config(format!("grid size {s:?} is not an integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn parse_orientation(text: &str) -> Result<[f64; 4], Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::config(format!(
            "orientation {text:?} must be four comma-separated components"
        )));
    }
    let mut q = [0.0; 4];
    for (slot, part) in q.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| Failure::config(format!("orientation component {part:?} is not a number")))?;
    }
    Ok(q)
}

fn load_scene(common: &Common, out: Option<&OutArg>) -> Result<Scene, Failure> {
    let cfg = SceneConfig::load(&common.config).map_err(|e| Failure::config(format!("{e:#}")))?;
    let orientation = match &common.orientation {
        Some(text) => Some(parse_orientation(text)?),
        None => None,
    };
    let support = cfg.support.build(orientation)?;
    let (n_theta, n_phi) = match (&common.grid, &cfg.grid) {
        (Some(text), _) => parse_grid(text)?,
        (None, Some(g)) => (g.n_theta, g.n_phi),
        (None, None) => (64, 128),
    };
    for n in [n_theta, n_phi] {
        if !(8..=4096).contains(&n) {
            return Err(Failure::config(format!("grid size {n} outside [8, 4096]")));
        }
    }
    let grid = build_quadrature(n_theta, n_phi)?;
    let prefix = out
        .and_then(|o| o.out.clone())
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "out".into());
    Ok(Scene { cfg, support, grid, prefix })
}

fn write_file(path: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::config(format!("cannot write {path}: {e}")))
}

fn cmd_measure(common: &Common) -> Result<u8, Failure> {
    let scene = load_scene(common, None)?;
    let rep = measures::measure(&scene.support, &scene.grid)?;
    println!(
        "{}",
        json_line(&[
            ("area", fmt12(rep.area)),
            ("volume", fmt12(rep.volume)),
            ("width", fmt12(rep.width)),
            ("ratio_I", fmt12(rep.ratio_i)),
            ("deficit", fmt12(rep.deficit)),
        ])
    );
    if rep.width_dev > 1e-6 {
        eprintln!("width deviation {:e} exceeds 1e-6", rep.width_dev);
        return Ok(2);
    }
    Ok(0)
}

fn cmd_shrink(common: &Common, out: &OutArg) -> Result<u8, Failure> {
    let scene = load_scene(common, Some(out))?;
    let rep = shrink_limit(&scene.support, &scene.grid)?;
    println!(
        "{}",
        json_line(&[
            ("C_star", fmt12(rep.c_star)),
            ("I_at_limit", fmt12(rep.i_at_limit)),
            (
                "argmin",
                format!("[{},{}]", fmt12(rep.argmin_xi.re), fmt12(rep.argmin_xi.im)),
            ),
            ("width_at_limit", fmt12(rep.width_at_limit)),
        ])
    );
    if out.out.is_some() || scene.cfg.output.is_some() {
        let critical_spec = SupportSpec::Shift {
            base: Box::new(scene.cfg.support.clone()),
            c: rep.c_star,
        };
        let critical_cfg = SceneConfig {
            support: critical_spec,
            grid: scene.cfg.grid,
            output: None,
            format: None,
        };
        let text = serde_json::to_string_pretty(&critical_cfg)
            .map_err(|e| Failure::config(e.to_string()))?;
        write_file(&format!("{}_critical.json", scene.prefix), &text)?;
        let critical = shift(&scene.support, rep.c_star);
        let mesh = congruence::mesh(&critical, scene.grid.n_theta, scene.grid.n_phi)?;
        write_file(
            &format!("{}_critical.obj", scene.prefix),
            &congruence::obj_export(&mesh),
        )?;
        let cloud = focal::focal_cloud(&critical, &scene.grid)?;
        write_file(
            &format!("{}_critical_focal.obj", scene.prefix),
            &congruence::obj_points(&cloud),
        )?;
    }
    Ok(0)
}

fn cmd_export(what: &str, common: &Common, out: &OutArg) -> Result<u8, Failure> {
    let scene = load_scene(common, Some(out))?;
    match what {
        "surface" => {
            let mesh = congruence::mesh(&scene.support, scene.grid.n_theta, scene.grid.n_phi)?;
            let path = format!("{}.obj", scene.prefix);
            write_file(&path, &congruence::obj_export(&mesh))?;
            println!("{}", json_line(&[("written", format!("[\"{path}\"]"))]));
        }
        "focal" => {
            let path = format!("{}_focal.obj", scene.prefix);
            let text = match &scene.support {
                SupportFunction::RotSym(rs) => {
                    focal::focal_sweep_obj(rs, scene.grid.n_theta, scene.grid.n_phi)?
                }
                s => congruence::obj_points(&focal::focal_cloud(s, &scene.grid)?),
            };
            write_file(&path, &text)?;
            println!("{}", json_line(&[("written", format!("[\"{path}\"]"))]));
        }
        "cross_section" => {
            let path = format!("{}_section.csv", scene.prefix);
            write_file(
                &path,
                &congruence::cross_section_csv(&scene.support, scene.grid.n_theta)?,
            )?;
            println!("{}", json_line(&[("written", format!("[\"{path}\"]"))]));
        }
        "cusps" => {
            let rs = match &scene.support {
                SupportFunction::RotSym(rs) => rs,
                _ => {
                    return Err(Failure::config(
                        "cusp export needs a rotationally symmetric support",
                    ))
                }
            };
            let roots = focal::rotsym_cusps(rs)?;
            let body: Vec<String> = roots.iter().map(|&r| fmt12(r)).collect();
            println!("[{}]", body.join(","));
            if out.out.is_some() || scene.cfg.output.is_some() {
                write_file(
                    &format!("{}_cusps.json", scene.prefix),
                    &format!("[{}]\n", body.join(",")),
                )?;
            }
        }
        _ => unreachable!("clap restricts the value"),
    }
    Ok(0)
}

fn cmd_symmetrize(common: &Common, out: &OutArg) -> Result<u8, Failure> {
    let scene = load_scene(common, Some(out))?;
    let group_spec = match &scene.cfg.support {
        SupportSpec::Average { group, .. } => group,
        _ => {
            return Err(Failure::config(
                "symmetrize needs a config with an average-type support",
            ))
        }
    };
    let base_group = group_spec.base_group().map_err(|e| Failure::config(e.to_string()))?;
    let rep = check_constant_width(&scene.support, &scene.grid)?;
    let invariance = verify_invariance(&scene.support, &base_group, &scene.grid)?;
    let ratio = measures::measure(&scene.support, &scene.grid)?.ratio_i;
    println!(
        "{}",
        json_line(&[
            ("width", fmt12(rep.width)),
            ("max_dev", fmt12(rep.max_dev)),
            ("invariance_dev", fmt12(invariance)),
            ("ratio_I", fmt12(ratio)),
        ])
    );
    if out.out.is_some() || scene.cfg.output.is_some() {
        let mesh = congruence::mesh(&scene.support, scene.grid.n_theta, scene.grid.n_phi)?;
        write_file(
            &format!("{}_avg.obj", scene.prefix),
            &congruence::obj_export(&mesh),
        )?;
    }
    if rep.max_dev > 1e-6 {
        eprintln!("width deviation {:e} exceeds 1e-6", rep.max_dev);
        return Ok(2);
    }
    Ok(0)
}

fn cmd_check(common: &Common) -> Result<u8, Failure> {
    let scene = load_scene(common, None)?;
    let rep = check_constant_width(&scene.support, &scene.grid)?;
    let mut pairs = vec![
        ("width", fmt12(rep.width)),
        ("max_dev", fmt12(rep.max_dev)),
        ("reflection_dev", fmt12(rep.reflection_dev)),
    ];
    if let SupportFunction::Rational(r) = &scene.support {
        let cw = check_rational_cw(r);
        pairs.push(("is_cw", cw.is_cw.to_string()));
        pairs.push(("residual", fmt12(cw.max_residual)));
    }
    println!("{}", json_line(&pairs));
    if rep.max_dev > 1e-6 {
        eprintln!("width deviation {:e} exceeds 1e-6", rep.max_dev);
        return Ok(2);
    }
    Ok(0)
}

fn run() -> Result<u8, Failure> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Measure(common) => cmd_measure(common),
        Cmd::Shrink { common, out } => cmd_shrink(common, out),
        Cmd::Export { what, common, out } => cmd_export(what, common, out),
        Cmd::Symmetrize { common, out } => cmd_symmetrize(common, out),
        Cmd::Check(common) => cmd_check(common),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
