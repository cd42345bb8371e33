//! Command-line driver: `stereoar render | undistort | fit`.
//!
//! Exit codes are 0 on success, 1 on internal errors and 2 on user or
//! configuration errors. `STEREOAR_THREADS` caps the worker threads used by
//! the parallel stages.

mod fit;
mod render;
mod stats;
mod undistort;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use fit::{format_correspondences, parse_correspondences, CorrespondenceFile};
pub use render::frame_output_path;
pub use stats::RunStats;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USER: i32 = 2;

pub const THREADS_ENV: &str = "STEREOAR_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    User,
    Internal,
}

/// A failed command, classified for the exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn user(error: impl Into<anyhow::Error>) -> Self {
        Self { kind: ErrorKind::User, error: error.into() }
    }

    pub fn internal(error: impl Into<anyhow::Error>) -> Self {
        Self { kind: ErrorKind::Internal, error: error.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::User => EXIT_USER,
            ErrorKind::Internal => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "stereoar", version, about = "Stereoscopic AR rendering over recorded or synthetic camera frames")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render side-by-side stereo frames of a scene.
    Render(RenderArgs),
    /// Undistort one fisheye image into a perspective view.
    Undistort(UndistortArgs),
    /// Fit a projection polynomial to ray/pixel correspondences.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene configuration (TOML).
    #[arg(long)]
    pub scene: PathBuf,
    /// Frame source: a directory of left_NNNNNN.png/right_NNNNNN.png pairs,
    /// or `synthetic`. Defaults to the scene's [source] section.
    #[arg(long)]
    pub input: Option<String>,
    /// Output image (.png or .ppm); sequences get a _NNNNNN suffix.
    #[arg(long, default_value = "stereo.png")]
    pub output: PathBuf,
    /// Render at most this many frames.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Print per-stage timings.
    #[arg(long)]
    pub stats: bool,
    /// Also write each eye before barrel distortion.
    #[arg(long)]
    pub dump_eyes: bool,
    /// Skip barrel distortion.
    #[arg(long)]
    pub no_distortion: bool,
}

#[derive(Debug, Args)]
pub struct UndistortArgs {
    /// Calibration file.
    #[arg(long)]
    pub calib: PathBuf,
    /// Fisheye input image (.png or .ppm).
    #[arg(long)]
    pub input: PathBuf,
    /// Undistorted output image (.png or .ppm).
    #[arg(long)]
    pub output: PathBuf,
    /// Horizontal principal point offset of the virtual view, in pixels.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub nxc: f64,
    /// Vertical principal point offset of the virtual view, in pixels.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub nyc: f64,
    /// Focal distance of the virtual view in pixels; its sign selects the
    /// viewing direction and must match the sign of a0.
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    /// Output width; defaults to the calibrated image width.
    #[arg(long)]
    pub width: Option<u32>,
    /// Output height; defaults to the calibrated image height.
    #[arg(long)]
    pub height: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Correspondence file: lines of `X Y Z u v`, plus optional
    /// `center XC YC` and `size W H` lines.
    #[arg(long)]
    pub correspondences: PathBuf,
    /// Polynomial degree.
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Output calibration file.
    #[arg(long)]
    pub output: PathBuf,
    /// Distortion center `XC,YC`; overrides the file.
    #[arg(long, value_parser = parse_pair::<f64>, allow_hyphen_values = true)]
    pub center: Option<(f64, f64)>,
    /// Image size `WxH`; overrides the file.
    #[arg(long, value_parser = parse_size)]
    pub size: Option<(u32, u32)>,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected A,B, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<T>().map_err(|_| format!("invalid number {v:?}"));
    Ok((p(a)?, p(b)?))
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<u32>().ok().filter(|&n| n > 0).ok_or_else(|| format!("invalid size {v:?}"));
    Ok((p(w)?, p(h)?))
}

/// Reads `STEREOAR_THREADS`: `None` when unset or empty.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::user(anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::user(anyhow::anyhow!("{THREADS_ENV}: {e}"))),
    }
}

/// Runs a parsed command, inside a thread pool of `threads` workers when
/// given.
pub fn execute(cli: Cli, threads: Option<usize>) -> CliResult<()> {
    let run = move || match cli.command {
        Command::Render(a) => render::cmd_render(&a).map(|_| ()),
        Command::Undistort(a) => undistort::cmd_undistort(&a),
        Command::Fit(a) => fit::cmd_fit(&a).map(|_| ()),
    };
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(CliError::internal)?;
            pool.install(run)
        }
        None => run(),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are reported on stderr as one line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USER } else { EXIT_OK };
        }
    };
    let result = threads_from_env().and_then(|threads| execute(cli, threads));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_and_pair_parsers() {
        assert_eq!(parse_size("752x480"), Ok((752, 480)));
        assert!(parse_size("0x4").is_err());
        assert_eq!(parse_pair::<f64>("1.5,-2"), Ok((1.5, -2.0)));
        assert!(parse_pair::<f64>("3").is_err());
    }

    #[test]
    fn usage_errors_exit_with_user_code() {
        assert_eq!(run(["stereoar", "render"]), EXIT_USER);
        assert_eq!(run(["stereoar", "bogus"]), EXIT_USER);
        assert_eq!(run(["stereoar", "--help"]), EXIT_OK);
    }

    #[test]
    fn fit_degree_defaults_to_four() {
        let cli = Cli::try_parse_from(["stereoar", "fit", "--correspondences", "c.txt", "--output", "o.calib"]).unwrap();
        let Command::Fit(a) = cli.command else { panic!() };
        assert_eq!(a.degree, 4);
    }
}
