use std::io::Write;
use std::process::{Command, Stdio};

use park_imaging::{encode_pnm, Image};

use crate::{sort_detections, AnprError, Detection, PlateDetector};

/// Runs a detector in another process.
///
/// The image is written to the child's stdin as binary PGM/PPM; the child
/// prints one JSON [`Detection`] per line (`{"bbox":[x,y,w,h],"angle":..,
/// "score":..}`) and exits 0. This is the slot for learned detectors that are
/// not built into this workspace.
#[derive(Debug, Clone)]
pub struct ExternalDetector {
    pub name: String,
    pub program: String,
    pub args: Vec<String>,
}

impl PlateDetector for ExternalDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn detect(&self, img: &Image) -> Result<Vec<Detection>, AnprError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| AnprError::External(format!("spawn {}: {e}", self.program)))?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            // A child that exits without reading is reported via its status.
            let _ = stdin.write_all(&encode_pnm(img));
        }
        let out = child
            .wait_with_output()
            .map_err(|e| AnprError::External(e.to_string()))?;
        if !out.status.success() {
            return Err(AnprError::External(format!(
                "{} exited with {}: {}",
                self.program,
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let text = String::from_utf8(out.stdout).map_err(|e| AnprError::External(e.to_string()))?;
        let mut dets = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let d: Detection = serde_json::from_str(line).map_err(|e| AnprError::External(format!("bad detection {line:?}: {e}")))?;
            if !d.bbox.fits_within(img.width(), img.height()) || !(0.0..=1.0).contains(&d.score) {
                return Err(AnprError::External(format!("detection out of range: {line}")));
            }
            dets.push(d);
        }
        sort_detections(&mut dets);
        Ok(dets)
    }
}
