use std::fmt;
use std::time::Duration;

use stereoar_core::stereo::FrameTimings;

/// Accumulated wall time per pipeline stage over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub undistort: Duration,
    pub left_pass: Duration,
    pub right_pass: Duration,
    pub distortion: Duration,
    pub compose: Duration,
    pub frames: usize,
    /// Wall time of the whole run.
    pub total: Duration,
}

impl RunStats {
    pub fn add_frame(&mut self, undistort: Duration, t: &FrameTimings) {
        self.undistort += undistort;
        self.left_pass += t.left_pass;
        self.right_pass += t.right_pass;
        self.distortion += t.distortion;
        self.compose += t.compose;
        self.frames += 1;
    }

    /// Frames per second over the total wall time; 0 for an empty run.
    pub fn fps(&self) -> f64 {
        let secs = self.total.as_secs_f64();
        if self.frames == 0 || secs <= 0.0 {
            0.0
        } else {
            self.frames as f64 / secs
        }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl fmt::Display for RunStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frames      {}", self.frames)?;
        writeln!(f, "undistort   {:9.2} ms", ms(self.undistort))?;
        writeln!(f, "left pass   {:9.2} ms", ms(self.left_pass))?;
        writeln!(f, "right pass  {:9.2} ms", ms(self.right_pass))?;
        writeln!(f, "distortion  {:9.2} ms", ms(self.distortion))?;
        writeln!(f, "compose     {:9.2} ms", ms(self.compose))?;
        writeln!(f, "total       {:9.2} ms", ms(self.total))?;
        write!(f, "fps         {:9.2}", self.fps())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fps_is_frames_over_total() {
        let mut s = RunStats::default();
        assert_eq!(s.fps(), 0.0);
        let t = FrameTimings { left_pass: Duration::from_millis(5), ..Default::default() };
        s.add_frame(Duration::from_millis(1), &t);
        s.add_frame(Duration::from_millis(1), &t);
        s.total = Duration::from_millis(500);
        assert_eq!(s.frames, 2);
        assert!((s.fps() - 4.0).abs() < 1e-12);
        assert_eq!(s.left_pass, Duration::from_millis(10));
        assert!(s.to_string().contains("fps"));
    }
}
