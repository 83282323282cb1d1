//! Output plumbing: a stable envelope around each report, printed either as
//! human-oriented text lines or as JSON.

use serde::Serialize;

/// Rounds to nine significant digits so that reports are byte-identical
/// across platforms and rebuilds.  Going through the decimal string makes
/// the result the float nearest to the rounded decimal, which then prints
/// with at most nine digits again.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}")
        .parse()
        .expect("formatted floats parse back")
}

pub fn sig9_vec(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(sig9).collect()
}

/// Text rendering of an already-rounded number: plain decimal in the
/// human-friendly range, scientific notation outside it.
pub fn fnum(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e12).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fnum_vec(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fnum(x)).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    unix_time: Option<u64>,
    report: &'a T,
}

pub struct Emitter {
    pub json: bool,
    pub timestamp: Option<u64>,
}

impl Emitter {
    pub fn new(json: bool, no_timestamp: bool) -> Self {
        let timestamp = (!no_timestamp).then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Emitter { json, timestamp }
    }

    /// Prints one report.  `lines` is the text rendering; `report` the
    /// structured one.  Exactly one of the two is shown.
    pub fn emit<T: Serialize>(&self, command: &str, report: &T, lines: &[String]) {
        let mut buffer = String::new();
        if self.json {
            let envelope = Envelope {
                schema: crate::mapfile::SCHEMA,
                command,
                unix_time: self.timestamp,
                report,
            };
            match serde_json::to_string_pretty(&envelope) {
                Ok(s) => {
                    buffer.push_str(&s);
                    buffer.push('\n');
                }
                Err(e) => {
                    eprintln!("error: cannot serialize report: {e}");
                    std::process::exit(2);
                }
            }
        } else {
            buffer.push_str(&format!("# opmodel {command}\n"));
            if let Some(t) = self.timestamp {
                buffer.push_str(&format!("# generated-unix {t}\n"));
            }
            for line in lines {
                buffer.push_str(line);
                buffer.push('\n');
            }
        }
        use std::io::Write as _;
        let mut out = std::io::stdout().lock();
        if let Err(e) = out.write_all(buffer.as_bytes()).and_then(|()| out.flush()) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                // The consumer closed the pipe; there is nothing left to say.
                std::process::exit(0);
            }
            eprintln!("error: cannot write report: {e}");
            std::process::exit(2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    #[allow(clippy::approx_constant)] // the nine-digit truncation of π is the expected value
    fn rounding_keeps_nine_digits() {
        assert_eq!(sig9(std::f64::consts::PI), 3.14159265);
        assert_eq!(sig9(-1.0 / 3.0), -0.333333333);
        assert_eq!(sig9(123456789123.0), 123456789000.0);
        assert_eq!(sig9(0.000123456789123), 0.000123456789);
        assert_eq!(sig9(2.0f64.powi(-30)), 9.31322575e-10);
        assert_eq!(sig9(0.0), 0.0);
        assert_eq!(sig9(-0.0), 0.0);
        assert_eq!(sig9(1.0), 1.0);
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[1.2345678912345, -9.87654321e-7, 4.0 / 7.0, 1e300, 5e-300] {
            assert_eq!(sig9(sig9(x)), sig9(x));
        }
    }
}
