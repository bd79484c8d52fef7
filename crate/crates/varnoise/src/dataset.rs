//! Contour files and the `<root>/<class>/<shape>.<ext>` dataset layout.

use std::fs;
use std::path::{Path, PathBuf};

use varnoise_core::{Contour, Point};

use crate::error::{Error, Result};
use crate::trace;

/// One shape of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeRecord {
    pub class_name: String,
    pub shape_name: String,
    pub contour: Contour,
    pub source: PathBuf,
}

impl ShapeRecord {
    /// `class/shape`, unique within a dataset.
    pub fn id(&self) -> String {
        format!("{}/{}", self.class_name, self.shape_name)
    }
}

/// A file that could not be turned into a shape.
#[derive(Debug)]
pub struct LoadFailure {
    pub path: PathBuf,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct Dataset {
    /// Sorted by class, then shape name.
    pub shapes: Vec<ShapeRecord>,
    pub failures: Vec<LoadFailure>,
}

/// Extensions read as silhouette images.
pub const IMAGE_EXTENSIONS: [&str; 3] = ["pgm", "pbm", "pnm"];

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads `x,y` rows, with an optional `x,y` header, into a CCW contour.
pub fn load_contour_csv(path: impl AsRef<Path>) -> Result<Contour> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_contour_csv(file, path)
}

pub(crate) fn parse_contour_csv(input: impl std::io::Read, path: &Path) -> Result<Contour> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut points: Vec<Point> = Vec::new();
    let mut last_line = 1;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        last_line = line;
        if k == 0 && record.len() == 2 && record[0].eq_ignore_ascii_case("x") && record[1].eq_ignore_ascii_case("y") {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(path, line, format!("expected 2 fields, found {}", record.len())));
        }
        let coord = |field: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(path, line, format!("`{field}` is not a finite number")))
        };
        let p = Point::new(coord(&record[0])?, coord(&record[1])?);
        if points.last() == Some(&p) {
            return Err(parse_error(path, line, "point repeats the previous one"));
        }
        points.push(p);
    }
    if points.len() < 3 {
        return Err(parse_error(
            path,
            last_line,
            format!("a contour needs at least 3 points, found {}", points.len()),
        ));
    }
    if points.first() == points.last() {
        return Err(parse_error(path, last_line, "last point repeats the first one"));
    }
    Contour::new(points).map_err(|source| Error::InvalidContour {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `x,y` with a header; the shortest round-trip decimal per value.
pub fn write_contour_csv(path: impl AsRef<Path>, c: &Contour) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    write_contour(&mut out, c).map_err(|e| Error::csv(path, e))?;
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_contour(out: impl std::io::Write, c: &Contour) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for p in c.points() {
        w.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a contour file by extension: CSV point lists or silhouette images.
pub fn load_shape_file(path: impl AsRef<Path>) -> Result<Contour> {
    let path = path.as_ref();
    match extension(path).as_deref() {
        Some(ext) if IMAGE_EXTENSIONS.contains(&ext) => trace::trace_binary_image(path),
        _ => load_contour_csv(path),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
}

fn is_shape_file(path: &Path) -> bool {
    match extension(path) {
        Some(ext) => ext == "csv" || IMAGE_EXTENSIONS.contains(&ext.as_str()),
        None => false,
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

/// Every shape under `root`, one class per subdirectory. Files that fail to
/// load are collected rather than aborting the scan; other file types are
/// skipped.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<Dataset> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::MissingDataset(root.to_path_buf()));
    }
    let mut dataset = Dataset::default();
    for class_dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let class_name = file_name(&class_dir);
        for file in sorted_entries(&class_dir)? {
            if !file.is_file() || !is_shape_file(&file) {
                log::debug!("skipping {}", file.display());
                continue;
            }
            match load_shape_file(&file) {
                Ok(contour) => dataset.shapes.push(ShapeRecord {
                    class_name: class_name.clone(),
                    shape_name: file
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    contour,
                    source: file,
                }),
                Err(error) => dataset.failures.push(LoadFailure { path: file, error }),
            }
        }
    }
    Ok(dataset)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Contour> {
        parse_contour_csv(text.as_bytes(), Path::new("mem.csv"))
    }

    fn line_of(err: Error) -> u64 {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn square_with_and_without_header() {
        let plain = parse("0,0\n1,0\n1,1\n0,1").unwrap();
        assert_eq!(plain.len(), 4);
        assert!(plain.signed_area() > 0.0);
        assert_eq!(parse("x,y\n0,0\n1,0\n1,1\n0,1\n").unwrap(), plain);
        assert_eq!(parse(" x , y \n0, 0\n1 ,0\n1,1\n0,1").unwrap(), plain);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let c = parse("0,0\n0,1\n1,1\n1,0").unwrap();
        assert!(c.signed_area() > 0.0);
        assert_eq!(c.point(0), Point::new(0.0, 0.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse("0,0\n1,0").unwrap_err()), 2);
        assert_eq!(line_of(parse("x,y\n0,0\n1,zero\n1,1").unwrap_err()), 3);
        assert_eq!(line_of(parse("0,0\n1,0\n1,0\n0,1").unwrap_err()), 3);
        assert_eq!(line_of(parse("0,0\n1,0,2\n1,1").unwrap_err()), 2);
        assert_eq!(line_of(parse("0,0\n1,0\n1,1\nNaN,1").unwrap_err()), 4);
        assert!(matches!(parse("0,0\n1,0\n1,1\n0,0").unwrap_err(), Error::Parse { line: 4, .. }));
        assert!(matches!(parse("0,0\n1,1\n2,2").unwrap_err(), Error::InvalidContour { .. }));
        assert!(matches!(parse("").unwrap_err(), Error::Parse { .. }));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let pts: Vec<Point> = (0..37)
            .map(|i| {
                let t = i as f64 * 0.17;
                Point::new(10.0 * t.cos() + 1e-7, 3.3 * t.sin() - 1.0 / 3.0)
            })
            .collect();
        let c = Contour::new(pts).unwrap();
        let mut buf = Vec::new();
        write_contour(&mut buf, &c).unwrap();
        let back = parse_contour_csv(buf.as_slice(), Path::new("mem.csv")).unwrap();
        assert_eq!(back, c);
    }
}
