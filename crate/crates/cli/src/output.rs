//! Numeric formatting and output-path plumbing.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use invstable::Error;

/// Format with a fixed number of significant digits, plain decimal when the
/// magnitude allows it and scientific otherwise. The decimal separator is
/// always `.`, so output re-parses identically everywhere.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if mag < -4 || mag >= digits as i32 {
        format!("{:.*e}", digits - 1, x)
    } else {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Round to the printed precision so JSON carries the same digits as CSV.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    fmt_sig(x, digits).parse().unwrap_or(x)
}

/// Either stdout or a buffered file.
pub enum Sink {
    Stdout(io::Stdout),
    File(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&str>) -> Result<Self, Error> {
        match path {
            None => Ok(Sink::Stdout(io::stdout())),
            Some(p) => File::create(p)
                .map(|f| Sink::File(BufWriter::new(f)))
                .map_err(|e| Error::data(format!("cannot create {p}: {e}"))),
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::Stdout(s) => s,
            Sink::File(f) => f,
        }
    }
}
