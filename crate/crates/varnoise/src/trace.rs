//! Outer boundary of a binary silhouette by Moore-neighbour tracing.

use std::collections::VecDeque;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use image::codecs::pnm::PnmDecoder;
use image::DynamicImage;
use varnoise_core::{Contour, Point};

use crate::error::{Error, Result};

/// Grey values at or above this are foreground.
pub const FOREGROUND_THRESHOLD: u8 = 128;

/// Row-major foreground mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), width * height, "mask size mismatch");
        Mask { width, height, cells }
    }

    /// Mask from rows of text, `#` marking foreground.
    pub fn from_rows(rows: &[&str]) -> Self {
        let width = rows.first().map_or(0, |r| r.len());
        let cells = rows
            .iter()
            .flat_map(|r| r.bytes().map(|b| b == b'#'))
            .collect();
        Mask::new(width, rows.len(), cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// False outside the image.
    pub fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.cells[y as usize * self.width + x as usize]
    }

    fn pixels(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| (x as i64, y as i64)))
    }

    /// Number of 8-connected foreground components.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for (x, y) in self.pixels() {
            let at = y as usize * self.width + x as usize;
            if !self.cells[at] || seen[at] {
                continue;
            }
            count += 1;
            seen[at] = true;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                for (dx, dy) in MOORE {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if self.get(nx, ny) {
                        let k = ny as usize * self.width + nx as usize;
                        if !seen[k] {
                            seen[k] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
        }
        count
    }
}

/// Clockwise on screen (y down), starting west.
const MOORE: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn direction_of(dx: i64, dy: i64) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack pixel is a Moore neighbour")
}

/// Reads a binary-PNM grey image and thresholds it.
pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let image_err = |source| Error::Image {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = PnmDecoder::new(BufReader::new(file)).map_err(image_err)?;
    let grey = DynamicImage::from_decoder(decoder).map_err(image_err)?.into_luma8();
    let (w, h) = grey.dimensions();
    let cells = grey.pixels().map(|p| p.0[0] >= FOREGROUND_THRESHOLD).collect();
    Ok(Mask::new(w as usize, h as usize, cells))
}

/// Boundary pixel centres of the single foreground component, in tracing
/// order. Tracing starts at the first foreground pixel in raster order and
/// stops when the first move out of it is about to repeat (Jacob's
/// criterion). Image rows run down; the returned y axis runs up.
pub fn trace_mask(mask: &Mask) -> std::result::Result<Vec<Point>, String> {
    match mask.components() {
        0 => return Err("image has no foreground".into()),
        1 => {}
        k => return Err(format!("image has {k} foreground components, expected one")),
    }
    let start = mask
        .pixels()
        .find(|&(x, y)| mask.get(x, y))
        .expect("one component");
    // everything west of the first raster pixel is background
    let (mut p, mut back) = (start, 0);
    let mut first_move = None;
    let mut boundary = Vec::new();
    let limit = 8 * mask.width * mask.height + 8;
    loop {
        let next = advance(mask, p, back).ok_or("foreground is a single isolated pixel")?;
        if p == start {
            match first_move {
                Some(m) if m == next => break,
                None => first_move = Some(next),
                Some(_) => {}
            }
        }
        boundary.push(p);
        if boundary.len() > limit {
            return Err("tracing did not close".into());
        }
        (p, back) = next;
    }
    let top = mask.height as f64 - 1.0;
    Ok(boundary
        .into_iter()
        .map(|(x, y)| Point::new(x as f64, top - y as f64))
        .collect())
}

type TraceState = ((i64, i64), usize);

/// Next boundary pixel clockwise from the background neighbour `back` of
/// `p`, with the direction of its own background neighbour.
fn advance(mask: &Mask, p: (i64, i64), back: usize) -> Option<TraceState> {
    let d = (1..=8).map(|k| (back + k) % 8).find(|&d| {
        let (dx, dy) = MOORE[d];
        mask.get(p.0 + dx, p.1 + dy)
    })?;
    let q = (p.0 + MOORE[d].0, p.1 + MOORE[d].1);
    let (bx, by) = MOORE[(d + 7) % 8];
    Some((q, direction_of(p.0 + bx - q.0, p.1 + by - q.1)))
}

/// Traces the silhouette in a binary-PNM image into a CCW contour.
pub fn trace_binary_image(path: impl AsRef<Path>) -> Result<Contour> {
    let path = path.as_ref();
    let trace_err = |message: String| Error::Trace {
        path: path.to_path_buf(),
        message,
    };
    let points = trace_mask(&read_mask(path)?).map_err(trace_err)?;
    let distinct = {
        let mut sorted: Vec<(u64, u64)> = points.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len()
    };
    if distinct < 3 {
        return Err(trace_err(format!("boundary has {distinct} distinct pixels, need at least 3")));
    }
    Contour::new(points).map_err(|e| trace_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_block_has_twelve_boundary_pixels() {
        let mut rows = vec![".........."; 10];
        for r in rows.iter_mut().skip(3).take(4) {
            *r = "...####...";
        }
        let pts = trace_mask(&Mask::from_rows(&rows)).unwrap();
        assert_eq!(pts.len(), 12);
        // oracle: pixels of the block with a 4-neighbour outside it
        let mut expected: Vec<(i64, i64)> = (3..7)
            .flat_map(|y| (3..7).map(move |x| (x, y)))
            .filter(|&(x, y)| x == 3 || x == 6 || y == 3 || y == 6)
            .map(|(x, y)| (x, 9 - y))
            .collect();
        let mut got: Vec<(i64, i64)> = pts.iter().map(|p| (p.x as i64, p.y as i64)).collect();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn l_shape_and_thin_line() {
        let l = Mask::from_rows(&["#...", "#...", "####"]);
        let pts = trace_mask(&l).unwrap();
        // down the column, out along the row and back
        assert_eq!(pts.len(), 9, "{pts:?}");
        // a one-pixel line is walked out and back
        let line = Mask::from_rows(&[".....", ".###.", "....."]);
        assert_eq!(trace_mask(&line).unwrap().len(), 4);
    }

    #[test]
    fn diagonal_and_holes() {
        let diag = Mask::from_rows(&["#...", ".#..", "..#."]);
        assert_eq!(diag.components(), 1);
        assert_eq!(trace_mask(&diag).unwrap().len(), 4);
        let ring = Mask::from_rows(&["#####", "#...#", "#...#", "#####"]);
        assert_eq!(trace_mask(&ring).unwrap().len(), 14);
    }

    #[test]
    fn rejects_bad_masks() {
        assert!(trace_mask(&Mask::from_rows(&["...", "..."])).is_err());
        assert!(trace_mask(&Mask::from_rows(&["#..", "..#"])).is_err());
        assert!(trace_mask(&Mask::from_rows(&["...", ".#.", "..."])).is_err());
    }
}
