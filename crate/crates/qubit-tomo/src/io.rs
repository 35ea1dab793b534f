//! CSV and JSON emission. A path of `-` means stdout.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::sweep::{FitRow, SweepRow};
use crate::Error;

pub const SWEEP_HEADER: [&str; 8] = [
    "protocol",
    "measurement",
    "state_id",
    "N",
    "mean_infidelity",
    "std_error",
    "repetitions",
    "excluded",
];
pub const FIT_HEADER: [&str; 7] = [
    "protocol",
    "measurement",
    "state_id",
    "alpha",
    "alpha_stderr",
    "c",
    "r_squared",
];
pub const PREDICT_HEADER: [&str; 3] = ["N", "predicted_infidelity", "regime"];

pub fn open_output(path: &Path) -> Result<Box<dyn Write>, Error> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout().lock()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(Box::new(BufWriter::new(File::create(path)?)))
}

pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T], header: &[&str]) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    // Written explicitly so that an empty table still carries its schema.
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV with a header row, requiring every column in `header`.
pub fn read_csv<T: DeserializeOwned, R: Read>(input: R, header: &[&str]) -> Result<Vec<T>, Error> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found = r.headers()?.clone();
    for column in header {
        if !found.iter().any(|h| h == *column) {
            return Err(Error::Invalid(format!("missing CSV column `{column}`")));
        }
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<(), Error> {
    write_csv(open_output(path)?, rows, &SWEEP_HEADER)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, Error> {
    read_csv(File::open(path)?, &SWEEP_HEADER)
}

pub fn write_fits(path: &Path, rows: &[FitRow]) -> Result<(), Error> {
    write_csv(open_output(path)?, rows, &FIT_HEADER)
}

pub fn read_fits(path: &Path) -> Result<Vec<FitRow>, Error> {
    read_csv(File::open(path)?, &FIT_HEADER)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), Error> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
