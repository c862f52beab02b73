//! CSV, OBJ and JSON writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{Family, Mesh, ProfileCurve};
use crate::report::SCHEMA_VERSION;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(profile: &ProfileCurve, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", profile.columns.join(","))?;
    for row in &profile.rows {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_obj<W: Write>(mesh: &Mesh, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# {} vertices, {} quads", mesh.vertices.len(), mesh.faces.len())?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        writeln!(w, "v {} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z))?;
        writeln!(w, "# vH {}", fmt_f64(mesh.h[i]))?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    schema: &'static str,
    family: &'a Family,
    columns: &'a [&'static str],
    rows: &'a [Vec<f64>],
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
    writeln!(w)?;
    w.flush()
}

pub fn write_profile_json<W: Write>(profile: &ProfileCurve, w: W) -> std::io::Result<()> {
    let doc = ProfileJson { schema: SCHEMA_VERSION, family: &profile.family, columns: &profile.columns, rows: &profile.rows };
    write_json(&doc, w)
}

fn to_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io)?;
    f(BufWriter::new(file)).map_err(io)
}

pub fn export_csv(profile: &ProfileCurve, path: &Path) -> Result<()> {
    to_file(path, |w| write_csv(profile, w))
}

pub fn export_obj(mesh: &Mesh, path: &Path) -> Result<()> {
    to_file(path, |w| write_obj(mesh, w))
}

pub fn export_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    to_file(path, |w| write_json(report, w))
}

pub fn export_profile_json(profile: &ProfileCurve, path: &Path) -> Result<()> {
    to_file(path, |w| write_profile_json(profile, w))
}

/// Parses a CSV written by [`write_csv`] into its header and rows.
pub fn read_csv(text: &str) -> std::result::Result<(Vec<String>, Vec<Vec<f64>>), std::num::ParseFloatError> {
    let mut lines = text.lines();
    let header = lines.next().map(|h| h.split(',').map(str::to_string).collect()).unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::parse).collect())
        .collect::<std::result::Result<Vec<Vec<f64>>, _>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::planar_grim_reaper;

    #[test]
    fn empty_profile_has_header_only() {
        let p = ProfileCurve::new(Family::Bowl { lambda: 1.0 }, &["r", "phi"]);
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "r,phi\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut p = planar_grim_reaper(0.3, 1.0, 57, 0.01).unwrap();
        p.rows.push(vec![f64::MIN_POSITIVE, -0.0, 1.0 / 3.0, 1e300, -2.5e-310]);
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let (header, rows) = read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(header, p.columns);
        assert_eq!(rows.len(), p.rows.len());
        for (a, b) in rows.iter().zip(&p.rows) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let p = ProfileCurve::new(Family::Bowl { lambda: 1.0 }, &["r"]);
        let path = Path::new("/nonexistent-dir/sub/out.csv");
        let err = export_csv(&p, path).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/sub/out.csv"));
    }
}
