//! Deterministic rasterization of condition geometries.
//!
//! Each match id gets a distinct color from a seeded shuffle of a
//! maximally-spaced hue wheel at full value; pose edges use a reserved
//! half-intensity palette that cannot collide with line colors. Lines are
//! drawn 2 px wide with no anti-aliasing so frames are bitwise-comparable.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Canvas, ConditionGeometry, LineSegment};
use crate::video::{Image, LatentVideo};

pub const DEFAULT_PALETTE_SEED: u64 = 17;

/// Reserved pose-edge colors: value 0.6 keeps every channel below 154, while
/// line colors always carry at least one channel at 255.
const POSE_PALETTE: [[u8; 3]; 6] = [
    [153, 38, 38],
    [38, 153, 38],
    [38, 38, 153],
    [153, 153, 38],
    [38, 153, 153],
    [153, 38, 153],
];

/// One rasterized RGB condition frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionFrame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ConditionFrame {
    pub fn black(canvas: Canvas) -> Self {
        Self {
            width: canvas.width,
            height: canvas.height,
            pixels: vec![0; (canvas.width * canvas.height * 3) as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != (width * height * 3) as usize {
            return Err(Error::Structure(format!(
                "pixel buffer length {} does not match {width}x{height} RGB",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    fn put(&mut self, x: i64, y: i64, color: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = ((y as u32 * self.width + x as u32) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&color);
    }

    /// Real-valued view in [0,1], C×H×W.
    pub fn to_image(&self) -> Image {
        let (w, h) = (self.width as usize, self.height as usize);
        let mut data = vec![0.0; 3 * h * w];
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) * 3;
                for c in 0..3 {
                    data[(c * h + y) * w + x] = self.pixels[i + c] as f64 / 255.0;
                }
            }
        }
        Image::from_vec(3, h, w, data).expect("valid image dimensions")
    }
}

/// N rasterized condition frames for one sampling direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSequence {
    frames: Vec<ConditionFrame>,
}

impl ConditionSequence {
    pub fn new(frames: Vec<ConditionFrame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Structure("empty condition sequence".into()))?;
        let (w, h) = (first.width, first.height);
        if frames.iter().any(|f| f.width != w || f.height != h) {
            return Err(Error::Structure(
                "condition frames must share dimensions".into(),
            ));
        }
        Ok(Self { frames })
    }

    /// All-black frames, used for unconditioned runs.
    pub fn blank(canvas: Canvas, n_frames: usize) -> Result<Self> {
        Self::new(vec![ConditionFrame::black(canvas); n_frames])
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[ConditionFrame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &ConditionFrame {
        &self.frames[i]
    }

    /// The sequence flipped along the time dimension.
    pub fn flipped(&self) -> ConditionSequence {
        ConditionSequence {
            frames: self.frames.iter().rev().cloned().collect(),
        }
    }

    /// Real-valued N×3×H×W view in [0,1].
    pub fn to_video(&self) -> Result<LatentVideo> {
        let frames: Vec<Image> = self.frames.iter().map(|f| f.to_image()).collect();
        LatentVideo::from_frames(&frames)
    }
}

fn hsv_to_rgb(h_deg: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h_deg / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}

/// Distinct line colors for a sorted id set: a maximally-spaced hue wheel,
/// shuffled deterministically by `palette_seed`.
pub fn line_palette(n: usize, palette_seed: u64) -> Vec<[u8; 3]> {
    let mut colors: Vec<[u8; 3]> = (0..n)
        .map(|i| hsv_to_rgb(360.0 * i as f64 / n.max(1) as f64, 1.0, 1.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(palette_seed);
    colors.shuffle(&mut rng);
    colors
}

/// 2 px wide integer line walk. Endpoints are rounded to the nearest pixel
/// and the walk is canonicalized to increase along the major axis, so the
/// pixel set does not depend on endpoint order. The companion pixel sits
/// below for shallow lines and to the right for steep ones; out-of-canvas
/// pixels are dropped.
fn draw_segment(frame: &mut ConditionFrame, seg: &LineSegment, color: [u8; 3]) {
    let (mut x0, mut y0) = (seg.p0.x.round() as i64, seg.p0.y.round() as i64);
    let (mut x1, mut y1) = (seg.p1.x.round() as i64, seg.p1.y.round() as i64);

    let x_major = (x1 - x0).abs() >= (y1 - y0).abs();
    if (x_major && x0 > x1) || (!x_major && y0 > y1) {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }

    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;

    loop {
        frame.put(x0, y0, color);
        if x_major {
            frame.put(x0, y0 + 1, color);
        } else {
            frame.put(x0 + 1, y0, color);
        }
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

/// Endpoints clamped into a generous window around the canvas so that
/// off-canvas geometry cannot drive the integer walk over huge ranges.
/// Painting still clips per pixel, so visible output is unaffected.
fn clamp_segment(seg: &LineSegment, canvas: Canvas) -> Option<LineSegment> {
    let w = canvas.width as f64;
    let h = canvas.height as f64;
    let (lo_x, hi_x) = (-2.0 * w - 4.0, 3.0 * w + 4.0);
    let (lo_y, hi_y) = (-2.0 * h - 4.0, 3.0 * h + 4.0);
    let inside = |x: f64, lo: f64, hi: f64| x.clamp(lo, hi);
    let p0 = crate::geometry::Point2::new(
        inside(seg.p0.x, lo_x, hi_x),
        inside(seg.p0.y, lo_y, hi_y),
    );
    let p1 = crate::geometry::Point2::new(
        inside(seg.p1.x, lo_x, hi_x),
        inside(seg.p1.y, lo_y, hi_y),
    );
    if p0 == p1 {
        // Entirely outside on the same side; nothing visible.
        return None;
    }
    Some(LineSegment { p0, p1 })
}

/// Rasterizes one condition geometry. A pure function of
/// `(geometry, palette_seed)`: identical inputs give bitwise-identical frames.
pub fn rasterize(g: &ConditionGeometry, palette_seed: u64) -> ConditionFrame {
    let mut frame = ConditionFrame::black(g.canvas());

    let colors = line_palette(g.lines().len(), palette_seed);
    for ((_, seg), color) in g.lines().iter().zip(colors) {
        if let Some(seg) = clamp_segment(seg, g.canvas()) {
            draw_segment(&mut frame, &seg, color);
        }
    }

    if let Some(pose) = g.pose() {
        for (e, &(a, b)) in pose.edges.iter().enumerate() {
            let (ka, kb) = (&pose.keypoints[a], &pose.keypoints[b]);
            if !(ka.present && kb.present) || ka.position == kb.position {
                continue;
            }
            let seg = LineSegment {
                p0: ka.position,
                p1: kb.position,
            };
            if let Some(seg) = clamp_segment(&seg, g.canvas()) {
                draw_segment(&mut frame, &seg, POSE_PALETTE[e % POSE_PALETTE.len()]);
            }
        }
    }

    frame
}

/// Rasterizes a geometry sequence, one frame per entry. Frames are independent
/// and render in parallel; the output order and bytes do not depend on the
/// thread count.
pub fn rasterize_sequence(
    geometries: &[ConditionGeometry],
    palette_seed: u64,
) -> Result<ConditionSequence> {
    let frames: Vec<ConditionFrame> = geometries
        .par_iter()
        .map(|g| rasterize(g, palette_seed))
        .collect();
    ConditionSequence::new(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Keypoint, Point2, PoseSkeleton};
    use std::collections::BTreeSet;

    fn canvas(w: u32, h: u32) -> Canvas {
        Canvas::new(w, h).unwrap()
    }

    fn seg(x0: f64, y0: f64, x1: f64, y1: f64) -> LineSegment {
        LineSegment::new(Point2::new(x0, y0), Point2::new(x1, y1)).unwrap()
    }

    /// Independent pixel oracle: rounds endpoints, walks the major axis in
    /// increasing order, and picks the minor coordinate nearest the ideal
    /// line using exact rational arithmetic, with midpoint ties resolved
    /// toward the direction of travel. Width-2 companion rule and canvas
    /// clip applied afterwards.
    fn oracle_pixels(s: &LineSegment, w: u32, h: u32) -> BTreeSet<(i64, i64)> {
        let (mut x0, mut y0) = (s.p0.x.round() as i64, s.p0.y.round() as i64);
        let (mut x1, mut y1) = (s.p1.x.round() as i64, s.p1.y.round() as i64);
        let x_major = (x1 - x0).abs() >= (y1 - y0).abs();
        if (x_major && x0 > x1) || (!x_major && y0 > y1) {
            std::mem::swap(&mut x0, &mut x1);
            std::mem::swap(&mut y0, &mut y1);
        }

        let mut set = BTreeSet::new();
        let mut paint = |x: i64, y: i64| {
            for (px, py) in [(x, y), if x_major { (x, y + 1) } else { (x + 1, y) }] {
                if px >= 0 && py >= 0 && px < w as i64 && py < h as i64 {
                    set.insert((px, py));
                }
            }
        };
        // Nearest integer to a + num/den (den > 0), ties toward +/- num sign.
        let nearest = |a: i64, num: i64, den: i64| -> i64 {
            let twice = 2 * num; // compare num/den against k + 1/2 exactly
            let k = num.div_euclid(den);
            let rem2 = 2 * (num - k * den);
            let up = if twice >= 0 {
                rem2 >= den // ties step toward travel when moving up
            } else {
                rem2 > den
            };
            a + k + if up { 1 } else { 0 }
        };
        if x_major {
            let dx = x1 - x0;
            for x in x0..=x1 {
                let y = if dx == 0 {
                    y0
                } else {
                    nearest(y0, (x - x0) * (y1 - y0), dx)
                };
                paint(x, y);
            }
        } else {
            let dy = y1 - y0;
            for y in y0..=y1 {
                let x = nearest(x0, (y - y0) * (x1 - x0), dy);
                paint(x, y);
            }
        }
        set
    }

    #[test]
    fn exhaustive_grid_agreement_with_oracle() {
        // Every non-degenerate segment with endpoints on a 6x6 grid.
        for x0 in 0..6 {
            for y0 in 0..6 {
                for x1 in 0..6 {
                    for y1 in 0..6 {
                        if (x0, y0) == (x1, y1) {
                            continue;
                        }
                        let s = seg(x0 as f64, y0 as f64, x1 as f64, y1 as f64);
                        let g = ConditionGeometry::new(vec![(0, s)], None, canvas(8, 8))
                            .unwrap();
                        let f = rasterize(&g, 0);
                        assert_eq!(
                            lit_pixels(&f),
                            oracle_pixels(&s, 8, 8),
                            "segment ({x0},{y0})-({x1},{y1})"
                        );
                    }
                }
            }
        }
    }

    fn lit_pixels(frame: &ConditionFrame) -> BTreeSet<(i64, i64)> {
        let mut set = BTreeSet::new();
        for y in 0..frame.height() {
            for x in 0..frame.width() {
                if frame.get(x, y) != [0, 0, 0] {
                    set.insert((x as i64, y as i64));
                }
            }
        }
        set
    }

    #[test]
    fn empty_geometry_is_black() {
        let g = ConditionGeometry::empty(canvas(8, 8));
        let f = rasterize(&g, 0);
        assert!(f.pixels().iter().all(|&b| b == 0));
    }

    #[test]
    fn horizontal_segment_matches_pixel_oracle() {
        let s = seg(1.0, 1.0, 5.0, 1.0);
        let g = ConditionGeometry::new(vec![(0, s)], None, canvas(8, 8)).unwrap();
        let f = rasterize(&g, 0);
        assert_eq!(lit_pixels(&f), oracle_pixels(&s, 8, 8));
    }

    #[test]
    fn axis_aligned_and_diagonal_match_pixel_oracle() {
        let cases = [
            seg(2.0, 1.0, 2.0, 9.0),
            seg(1.0, 1.0, 9.0, 9.0),
            seg(9.0, 2.0, 1.0, 7.0),
            seg(0.0, 0.0, 11.0, 3.0),
            seg(3.0, 10.0, 4.0, 0.0),
        ];
        for s in cases {
            let g = ConditionGeometry::new(vec![(0, s)], None, canvas(12, 12)).unwrap();
            let f = rasterize(&g, 3);
            assert_eq!(lit_pixels(&f), oracle_pixels(&s, 12, 12), "{s:?}");
        }
    }

    #[test]
    fn rasterize_is_deterministic() {
        let g = ConditionGeometry::new(
            vec![(0, seg(1.0, 1.0, 20.0, 14.0)), (5, seg(3.0, 17.0, 30.0, 2.0))],
            None,
            canvas(32, 24),
        )
        .unwrap();
        assert_eq!(rasterize(&g, 9).pixels(), rasterize(&g, 9).pixels());
        assert_eq!(rasterize(&g, 9), rasterize(&g, 9));
    }

    #[test]
    fn out_of_canvas_geometry_is_clipped_not_an_error() {
        let g = ConditionGeometry::new(
            vec![(0, seg(-100.0, -50.0, 200.0, 90.0)), (1, seg(1e9, 1e9, 2e9, 2e9))],
            None,
            canvas(16, 16),
        )
        .unwrap();
        let f = rasterize(&g, 0);
        assert_eq!(f.width(), 16);
        // The fully off-canvas segment contributes nothing; the crossing one does.
        assert!(!lit_pixels(&f).is_empty());
    }

    #[test]
    fn distinct_ids_get_distinct_colors() {
        let g = ConditionGeometry::new(
            vec![(0, seg(1.0, 2.0, 10.0, 2.0)), (1, seg(1.0, 10.0, 10.0, 10.0))],
            None,
            canvas(16, 16),
        )
        .unwrap();
        let f = rasterize(&g, 5);
        let c0 = f.get(5, 2);
        let c1 = f.get(5, 10);
        assert_ne!(c0, [0, 0, 0]);
        assert_ne!(c1, [0, 0, 0]);
        assert_ne!(c0, c1);
        // Full-value palette always has a 255 channel.
        assert_eq!(*c0.iter().max().unwrap(), 255);
    }

    #[test]
    fn pose_edges_use_reserved_band() {
        let pose = PoseSkeleton {
            keypoints: vec![
                Keypoint {
                    name: "a".into(),
                    position: Point2::new(2.0, 2.0),
                    present: true,
                },
                Keypoint {
                    name: "b".into(),
                    position: Point2::new(12.0, 2.0),
                    present: true,
                },
                Keypoint {
                    name: "c".into(),
                    position: Point2::new(12.0, 12.0),
                    present: false,
                },
            ],
            edges: vec![(0, 1), (1, 2)],
        };
        let g = ConditionGeometry::new(vec![], Some(pose), canvas(16, 16)).unwrap();
        let f = rasterize(&g, 0);
        let edge_color = f.get(7, 2);
        assert_ne!(edge_color, [0, 0, 0]);
        // Reserved band never reaches channel value 255.
        assert!(edge_color.iter().all(|&c| c < 255));
        // Edge to the absent keypoint is not drawn.
        assert_eq!(f.get(12, 7), [0, 0, 0]);
    }

    #[test]
    fn palette_seed_changes_assignment() {
        let n = 7;
        let a = line_palette(n, 1);
        let b = line_palette(n, 1);
        let c = line_palette(n, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
        // Same color set, different order.
        let mut sa = a.clone();
        let mut sc = c.clone();
        sa.sort();
        sc.sort();
        assert_eq!(sa, sc);
    }

    #[test]
    fn parallel_sequence_matches_serial() {
        let g1 = ConditionGeometry::new(
            vec![(0, seg(1.0, 1.0, 20.0, 14.0))],
            None,
            canvas(32, 24),
        )
        .unwrap();
        let gn = ConditionGeometry::new(
            vec![(0, seg(8.0, 4.0, 28.0, 20.0))],
            None,
            canvas(32, 24),
        )
        .unwrap();
        let (fwd, _) = crate::geometry::build_condition_sequences(
            &g1,
            &gn,
            9,
            &crate::easing::EasingCurve::Linear,
        )
        .unwrap();
        let par = rasterize_sequence(&fwd, 11).unwrap();
        let serial: Vec<ConditionFrame> = fwd.iter().map(|g| rasterize(g, 11)).collect();
        assert_eq!(par.frames(), serial.as_slice());
    }
}
