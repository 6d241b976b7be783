//! Command-line front end: closed-form bounds, mesh generation, spectra,
//! exhaustion sweeps and Barta campaigns.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on an IO or parse error,
//! 3 when the eigensolver fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use exterior_tone::comparison::{exterior_tone_bound, threshold, ComparisonProfile, CurvatureInterval};
use exterior_tone::harness::{
    barta_campaign, exhaustion_sweep, generate, DirichletPolicy, GeneratedSurface, GeneratorSpec, Shape,
};
use exterior_tone::mesh::{
    assemble_laplacian, exterior_region, mean_curvature, off, ImmersedSurface, Point, TriMesh,
};
use exterior_tone::report::{serialize_campaign, serialize_report, sig12, Format};
use exterior_tone::spectral::dirichlet_tone;
use exterior_tone::Error;

#[derive(Debug, Parser)]
#[command(name = "extone", version, about = "Exterior fundamental-tone bounds and discrete Dirichlet spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exterior fundamental-tone lower bound.
    Bound {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Exhaustion radius r_i in (0, r).
        #[arg(long)]
        ri: f64,
    },
    /// Print the mean-curvature threshold (m − ℓ)·C_b(r).
    Threshold {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        r: f64,
    },
    /// Generate a test surface and write it as OFF.
    Generate {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Smallest Dirichlet eigenvalues of an OFF mesh.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Restrict to the exterior of radius r_i about the origin (needs --r).
        #[arg(long)]
        ri: Option<f64>,
        /// Ball radius used with --ri.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Closed-form bounds and discrete exterior tones over a list of radii.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Comma-separated, strictly increasing radii in (0, r).
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        radii: Vec<f64>,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Discrete Barta campaign with radial, ground-state and random test functions.
    Barta {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the exterior of radius r_i instead of the mesh boundary.
        #[arg(long)]
        ri: Option<f64>,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate an OFF mesh and report obtuse-edge counts.
    CheckMesh {
        #[arg(long)]
        input: PathBuf,
        /// Also check strict containment in the ball of this radius about the origin.
        #[arg(long)]
        r: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    #[arg(long)]
    pub r: f64,
    /// Supremum of |H|; defaults to the surface's exact or measured value.
    #[arg(long = "sup-h")]
    pub sup_h: Option<f64>,
}

impl ProfileArgs {
    fn profile(&self, sup_h: f64) -> Result<ComparisonProfile, Error> {
        ComparisonProfile::new(CurvatureInterval::new(self.a, self.b)?, self.r, self.m, self.ell, sup_h)
    }
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// flat_disk, spherical_cap, sphere, catenoid_band, enneper_scaled,
    /// strip_in_cylinder or revolution_accumulating.
    #[arg(long)]
    pub name: String,
    /// Radius of the containing ball (or cylinder).
    #[arg(long = "ball-radius", default_value_t = 1.0)]
    pub ball_radius: f64,
    /// Target maximum edge length.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Disk or sphere radius.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long = "cap-angle")]
    pub cap_angle: Option<f64>,
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long = "parameter-radius")]
    pub parameter_radius: Option<f64>,
    #[arg(long = "width-ratio")]
    pub width_ratio: Option<f64>,
    #[arg(long = "half-height")]
    pub half_height: Option<f64>,
    #[arg(long = "s-cap")]
    pub s_cap: Option<f64>,
    #[arg(long = "spiral-rate")]
    pub spiral_rate: Option<f64>,
}

impl GeneratorArgs {
    pub fn spec(&self) -> Result<GeneratorSpec, Error> {
        let mut spec = GeneratorSpec::default_for(&self.name, self.ball_radius)?;
        if let Some(res) = self.resolution {
            spec.resolution = res;
        }
        spec.shape = match spec.shape {
            Shape::FlatDisk { radius } => Shape::FlatDisk {
                radius: self.radius.unwrap_or(radius),
            },
            Shape::SphericalCap {
                sphere_radius,
                cap_angle,
            } => Shape::SphericalCap {
                sphere_radius: self.radius.unwrap_or(sphere_radius),
                cap_angle: self.cap_angle.unwrap_or(cap_angle),
            },
            Shape::Sphere { radius } => Shape::Sphere {
                radius: self.radius.unwrap_or(radius),
            },
            Shape::CatenoidBand { half_width, scale } => Shape::CatenoidBand {
                half_width: self.half_width.unwrap_or(half_width),
                scale: self.scale.unwrap_or(scale),
            },
            Shape::EnneperScaled {
                parameter_radius,
                scale,
            } => Shape::EnneperScaled {
                parameter_radius: self.parameter_radius.unwrap_or(parameter_radius),
                scale: self.scale.unwrap_or(scale),
            },
            Shape::StripInCylinder {
                width_ratio,
                half_height,
            } => Shape::StripInCylinder {
                width_ratio: self.width_ratio.unwrap_or(width_ratio),
                half_height: self.half_height.unwrap_or(half_height),
            },
            Shape::RevolutionAccumulating { s_cap, spiral_rate } => Shape::RevolutionAccumulating {
                s_cap: self.s_cap.unwrap_or(s_cap),
                spiral_rate: self.spiral_rate.unwrap_or(spiral_rate),
            },
        };
        Ok(spec)
    }
}

/// A surface either generated on the fly or read from OFF (ball about the
/// origin of radius `--r`).
#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with = "name")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug)]
pub struct CliError(pub Error);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(Error::Io(e))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match &self.0 {
            Error::Io(_)
            | Error::Json(_)
            | Error::Parse { .. }
            | Error::InvalidMesh(_)
            | Error::DegenerateFace { .. }
            | Error::NonManifoldEdge(..) => 2,
            Error::Factorization(_) | Error::NoConvergence { .. } | Error::Integration(_) => 3,
            _ => 1,
        }
    }
}

fn read_mesh(path: &Path) -> Result<TriMesh, CliError> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(off::read_off(BufReader::new(file))?)
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<String, CliError> {
    match output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn load_source(source: &SourceArgs, ball_radius: f64) -> Result<GeneratedSurface, CliError> {
    match (&source.input, &source.name) {
        (Some(path), _) => {
            let mesh = read_mesh(path)?;
            let surface = ImmersedSurface::in_ball(mesh, Point::zeros(), ball_radius)?;
            Ok(GeneratedSurface {
                name: "off_input",
                surface,
                exact_h: None,
            })
        }
        (None, Some(name)) => {
            let args = GeneratorArgs {
                name: name.clone(),
                ball_radius,
                resolution: source.resolution,
                radius: source.radius,
                cap_angle: None,
                half_width: None,
                scale: None,
                parameter_radius: None,
                width_ratio: None,
                half_height: None,
                s_cap: None,
                spiral_rate: None,
            };
            Ok(generate(&args.spec()?)?)
        }
        (None, None) => Err(Error::Parameter("give either --input <OFF> or --name <generator>".into()).into()),
    }
}

fn check_radii(radii: &[f64], r: f64) -> Result<(), CliError> {
    if let Some(&bad) = radii.iter().find(|&&x| !(x > 0.0 && x < r)) {
        return Err(Error::Domain(format!(
            "r_i ∉ (0, r) (r_i = {bad}, r = {r}): exhaustion radius must lie inside the ball"
        ))
        .into());
    }
    if let Some(w) = radii.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("radii not strictly increasing ({} then {})", w[0], w[1])).into());
    }
    Ok(())
}

fn surface_sup_h(g: &GeneratedSurface) -> f64 {
    g.exact_h
        .unwrap_or_else(|| mean_curvature(&g.surface, &g.surface.laplacian()).interior_sup)
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Bound { profile, ri } => {
            let p = profile.profile(profile.sup_h.unwrap_or(0.0))?;
            let b = exterior_tone_bound(&p, *ri)?;
            if !b.admissible {
                eprintln!("warning: sup|H| ≥ (m − ℓ)·C_b(r); the bound carries no guarantee");
            }
            Ok(format!("{}\n", b.value))
        }
        Command::Threshold { m, ell, b, r } => {
            if !(*r > 0.0) {
                return Err(Error::Domain(format!("r ≤ 0 (r = {r}): ball radius must be positive")).into());
            }
            Ok(format!("{}\n", threshold(*m, *ell, *b, *r)?))
        }
        Command::Generate { generator, output } => {
            let g = generate(&generator.spec()?)?;
            let mut w = BufWriter::new(File::create(output)?);
            off::write_off(&mut w, &g.surface.mesh)?;
            w.flush()?;
            Ok(format!(
                "{}: {} vertices, {} faces, max edge {}, exact |H| {}\n",
                g.name,
                g.surface.mesh.vertex_count(),
                g.surface.mesh.face_count(),
                sig12(g.surface.mesh.max_edge_length()),
                g.exact_h.map(sig12).unwrap_or_else(|| "unknown".into())
            ))
        }
        Command::Spectrum {
            input,
            k,
            ri,
            r,
            format,
            output,
        } => {
            let mesh = read_mesh(input)?;
            let (lap, dirichlet) = match ri {
                Some(ri) => {
                    let r = r.ok_or_else(|| Error::Parameter("--ri needs the ball radius --r".into()))?;
                    let s = ImmersedSurface::in_ball(mesh, Point::zeros(), r)?;
                    let region = exterior_region(&s, *ri)?;
                    (region.surface.laplacian(), region.dirichlet)
                }
                None => (assemble_laplacian(&mesh), mesh.boundary_vertices()),
            };
            let res = dirichlet_tone(&lap, &dirichlet, *k)?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("index,eigenvalue,residual\n");
                    for (i, (l, r)) in res.eigenvalues.iter().zip(&res.residuals).enumerate() {
                        s.push_str(&format!("{i},{},{}\n", sig12(*l), sig12(*r)));
                    }
                    s
                }
                Format::Json => {
                    let body = serde_json::json!({
                        "eigenvalues": res.eigenvalues.iter().map(|&x| exterior_tone::report::round12(x)).collect::<Vec<_>>(),
                        "residuals": res.residuals.iter().map(|&x| exterior_tone::report::round12(x)).collect::<Vec<_>>(),
                        "free_vertex_count": res.free.len(),
                        "ground_state_signed": res.ground_state_signed,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&body).map_err(Error::from)?)
                }
            };
            emit(text, output)
        }
        Command::Sweep {
            source,
            profile,
            radii,
            format,
            output,
        } => {
            profile.profile(profile.sup_h.unwrap_or(0.0))?;
            check_radii(radii, profile.r)?;
            let g = load_source(source, profile.r)?;
            let sup_h = profile.sup_h.unwrap_or_else(|| surface_sup_h(&g));
            let mut p = profile.profile(sup_h)?;
            p.ell = p.ell.max(g.surface.ell());
            p.validate()?;
            let report = exhaustion_sweep(&g.surface, g.name, &p, radii)?;
            emit(serialize_report(&report, *format)?, output)
        }
        Command::Barta {
            source,
            profile,
            trials,
            seed,
            ri,
            format,
            output,
        } => {
            let p = profile.profile(profile.sup_h.unwrap_or(0.0))?;
            if *trials == 0 {
                return Err(Error::Domain("trials < 1: a campaign needs at least one random trial".into()).into());
            }
            if let Some(r_i) = ri {
                check_radii(&[*r_i], profile.r)?;
            }
            let g = load_source(source, profile.r)?;
            let policy = match ri {
                Some(r_i) => DirichletPolicy::Exterior { r_i: *r_i },
                None => DirichletPolicy::Boundary,
            };
            let summary = barta_campaign(&g.surface, &p, policy, *trials, *seed)?;
            emit(serialize_campaign(&summary, *format)?, output)
        }
        Command::CheckMesh { input, r } => {
            let mesh = read_mesh(input)?;
            let lap = assemble_laplacian(&mesh);
            let mut out = format!(
                "vertices {}\nfaces {}\nboundary_vertices {}\nmax_edge {}\narea {}\nobtuse_edges {}\n",
                mesh.vertex_count(),
                mesh.face_count(),
                mesh.boundary_vertices().len(),
                sig12(mesh.max_edge_length()),
                sig12(mesh.total_area()),
                lap.obtuse_edges
            );
            if let Some(r) = r {
                let s = ImmersedSurface::in_ball(mesh, Point::zeros(), *r)?;
                let h = mean_curvature(&s, &lap);
                out.push_str(&format!("contained true\ninterior_sup_h {}\n", sig12(h.interior_sup)));
            }
            Ok(out)
        }
    }
}
