#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;

use varnoise::dataset::write_contour_csv;
use varnoise_core::{Contour, Point};

pub fn polygon(vertices: &[(f64, f64)], n: usize) -> Contour {
    let pts = vertices.iter().map(|&(x, y)| Point::new(x, y)).collect();
    Contour::new(pts).unwrap().resample(n).unwrap()
}

/// Regular star with `arms` tips, resampled to `n` points.
pub fn star(arms: usize, outer: f64, inner: f64, n: usize) -> Contour {
    let verts: Vec<(f64, f64)> = (0..2 * arms)
        .map(|i| {
            let t = PI * i as f64 / arms as f64 + PI / 2.0;
            let r = if i % 2 == 0 { outer } else { inner };
            (r * t.cos(), r * t.sin())
        })
        .collect();
    polygon(&verts, n)
}

pub fn regular(sides: usize, radius: f64, n: usize) -> Contour {
    let verts: Vec<(f64, f64)> = (0..sides)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / sides as f64 + 0.3;
            (radius * t.cos(), radius * t.sin())
        })
        .collect();
    polygon(&verts, n)
}

pub fn circle(radius: f64, n: usize) -> Contour {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            Point::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    Contour::new(pts).unwrap()
}

/// Smooth radial blob with lobes.
pub fn blob(lobes: usize, radius: f64, depth: f64, n: usize) -> Contour {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let r = radius * (1.0 + depth * (lobes as f64 * t).cos());
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    Contour::new(pts).unwrap()
}

pub fn square(side: f64, n: usize) -> Contour {
    polygon(&[(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)], n)
}

/// Writes `shapes` as `<root>/<class>/<name>.csv`.
pub fn write_dataset(root: &Path, shapes: &[(&str, &str, Contour)]) {
    for (class, name, c) in shapes {
        let dir = root.join(class);
        std::fs::create_dir_all(&dir).unwrap();
        write_contour_csv(dir.join(format!("{name}.csv")), c).unwrap();
    }
}

/// Binary PGM with `on` pixels white.
pub fn write_pgm(path: &Path, width: usize, height: usize, on: impl Fn(usize, usize) -> bool) {
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    for y in 0..height {
        for x in 0..width {
            bytes.push(if on(x, y) { 255 } else { 0 });
        }
    }
    std::fs::write(path, bytes).unwrap();
}
