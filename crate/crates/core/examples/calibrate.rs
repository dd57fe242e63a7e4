//! Fit receiver noise density and C-band chirp to the default anchors and
//! print the parameter file.

use dmtlink::harness::{calibrate, CalibrationTargets};

fn main() -> dmtlink::Result<()> {
    let cal = calibrate(&CalibrationTargets::default())?;
    print!("{}", cal.to_params());
    for (x, residual) in &cal.trace {
        println!("# {x:10.4} {residual:+.4}");
    }
    Ok(())
}
