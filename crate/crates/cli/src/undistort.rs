use anyhow::anyhow;
use stereoar_core::imaging::{load_image, save_image};
use stereoar_core::omnicam::{build_undistortion_lut, load_calibration, remap, VirtualPinhole};

use crate::{CliError, CliResult, UndistortArgs};

pub(crate) fn cmd_undistort(args: &UndistortArgs) -> CliResult<()> {
    let intr = load_calibration::<f64>(&args.calib).map_err(CliError::user)?;
    let image = load_image(&args.input).map_err(CliError::user)?;
    let (cw, ch) = intr.size();
    let size = (args.width.unwrap_or(cw), args.height.unwrap_or(ch));
    let pin = VirtualPinhole { nxc: args.nxc, nyc: args.nyc, z: args.z };
    let lut = build_undistortion_lut(&intr, &pin, size).map_err(CliError::user)?;
    let out = remap(&image, &lut).map_err(|e| CliError::user(anyhow!("{}: {e}", args.input.display())))?;
    save_image(&out, &args.output).map_err(CliError::user)
}
