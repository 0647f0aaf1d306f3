//! Geometric condition construction: matched line segments and optional pose
//! skeletons for the two key frames, plus their frame-wise interpolation.

use serde::{Deserialize, Serialize};

use crate::easing::EasingCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lerp(&self, other: &Point2, s: f64) -> Point2 {
        Point2 {
            x: (1.0 - s) * self.x + s * other.x,
            y: (1.0 - s) * self.y + s * other.y,
        }
    }

    /// Lexicographic order on (x, y), used to canonicalize segment endpoints.
    fn lex_le(&self, other: &Point2) -> bool {
        (self.x, self.y) <= (other.x, other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub p0: Point2,
    pub p1: Point2,
}

impl LineSegment {
    /// Zero-length segments are rejected at ingestion.
    pub fn new(p0: Point2, p1: Point2) -> Result<Self> {
        if !p0.is_finite() || !p1.is_finite() {
            return Err(Error::Domain("segment endpoints must be finite".into()));
        }
        if p0 == p1 {
            return Err(Error::Domain(format!(
                "zero-length segment at ({}, {})",
                p0.x, p0.y
            )));
        }
        Ok(Self { p0, p1 })
    }

    fn swapped(&self) -> LineSegment {
        LineSegment {
            p0: self.p1,
            p1: self.p0,
        }
    }

    fn lerp(&self, other: &LineSegment, s: f64) -> LineSegment {
        LineSegment {
            p0: self.p0.lerp(&other.p0, s),
            p1: self.p1.lerp(&other.p1, s),
        }
    }
}

/// Summed endpoint distance under the direct endpoint assignment.
fn paired_distance(a: &LineSegment, b: &LineSegment) -> f64 {
    a.p0.distance(&b.p0) + a.p1.distance(&b.p1)
}

/// Summed endpoint distance under the best of the two endpoint assignments.
fn match_distance(a: &LineSegment, b: &LineSegment) -> f64 {
    paired_distance(a, b).min(paired_distance(a, &b.swapped()))
}

/// A pair of corresponding segments in the start and end key frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineMatch {
    pub match_id: u32,
    pub seg_start: LineSegment,
    pub seg_end: LineSegment,
}

impl LineMatch {
    /// Removes the 180°-swap ambiguity: orders `seg_start` so p0 is
    /// lexicographically smaller, then picks the `seg_end` endpoint assignment
    /// with the smaller summed endpoint distance.
    pub fn canonicalized(&self) -> LineMatch {
        let seg_start = if self.seg_start.p0.lex_le(&self.seg_start.p1) {
            self.seg_start
        } else {
            self.seg_start.swapped()
        };
        let direct = paired_distance(&seg_start, &self.seg_end);
        let crossed = paired_distance(&seg_start, &self.seg_end.swapped());
        let seg_end = if crossed < direct {
            self.seg_end.swapped()
        } else {
            self.seg_end
        };
        LineMatch {
            match_id: self.match_id,
            seg_start,
            seg_end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub name: String,
    pub position: Point2,
    pub present: bool,
}

/// A pose skeleton: named keypoints plus edges between keypoint indices.
/// Both key frames must share keypoint ordering and edge topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseSkeleton {
    pub keypoints: Vec<Keypoint>,
    pub edges: Vec<(usize, usize)>,
}

impl PoseSkeleton {
    pub fn validate(&self) -> Result<()> {
        for kp in &self.keypoints {
            if !kp.position.is_finite() {
                return Err(Error::Domain(format!(
                    "keypoint \"{}\" has a non-finite position",
                    kp.name
                )));
            }
        }
        for &(a, b) in &self.edges {
            if a >= self.keypoints.len() || b >= self.keypoints.len() {
                return Err(Error::Structure(format!(
                    "pose edge ({a}, {b}) out of range for {} keypoints",
                    self.keypoints.len()
                )));
            }
        }
        Ok(())
    }

    fn same_topology(&self, other: &PoseSkeleton) -> bool {
        self.edges == other.edges
            && self.keypoints.len() == other.keypoints.len()
            && self
                .keypoints
                .iter()
                .zip(&other.keypoints)
                .all(|(a, b)| a.name == b.name)
    }
}

/// Canvas dimensions in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain(format!(
                "canvas dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }
}

/// The geometric condition for one frame: matched lines keyed by id, an
/// optional pose, and the canvas they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionGeometry {
    lines: Vec<(u32, LineSegment)>,
    pose: Option<PoseSkeleton>,
    canvas: Canvas,
}

impl ConditionGeometry {
    /// Lines are stored sorted by match id; duplicate ids are rejected.
    pub fn new(
        mut lines: Vec<(u32, LineSegment)>,
        pose: Option<PoseSkeleton>,
        canvas: Canvas,
    ) -> Result<Self> {
        lines.sort_by_key(|(id, _)| *id);
        for w in lines.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Structure(format!(
                    "duplicate match id {} in condition geometry",
                    w[0].0
                )));
            }
        }
        if let Some(p) = &pose {
            p.validate()?;
        }
        Ok(Self {
            lines,
            pose,
            canvas,
        })
    }

    pub fn empty(canvas: Canvas) -> Self {
        Self {
            lines: Vec::new(),
            pose: None,
            canvas,
        }
    }

    pub fn lines(&self) -> &[(u32, LineSegment)] {
        &self.lines
    }

    pub fn pose(&self) -> Option<&PoseSkeleton> {
        self.pose.as_ref()
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }
}

/// Splits canonicalized matches into the two key-frame geometries.
pub fn key_frame_geometries(
    matches: &[LineMatch],
    start_pose: Option<PoseSkeleton>,
    end_pose: Option<PoseSkeleton>,
    canvas: Canvas,
) -> Result<(ConditionGeometry, ConditionGeometry)> {
    match (&start_pose, &end_pose) {
        (None, None) => {}
        (Some(a), Some(b)) if a.same_topology(b) => {}
        _ => {
            return Err(Error::Structure(
                "start and end poses must share keypoint ordering and edge topology".into(),
            ))
        }
    }
    let mut start_lines = Vec::with_capacity(matches.len());
    let mut end_lines = Vec::with_capacity(matches.len());
    for m in matches {
        let c = m.canonicalized();
        start_lines.push((c.match_id, c.seg_start));
        end_lines.push((c.match_id, c.seg_end));
    }
    Ok((
        ConditionGeometry::new(start_lines, start_pose, canvas)?,
        ConditionGeometry::new(end_lines, end_pose, canvas)?,
    ))
}

/// Linear blend of two key-frame geometries at parameter `s` in [0,1].
///
/// Every segment endpoint and pose keypoint moves to
/// `(1-s)*p_start + s*p_end`. A keypoint absent in either key frame is
/// absent in the result.
pub fn interpolate_geometry(
    g1: &ConditionGeometry,
    g_n: &ConditionGeometry,
    s: f64,
) -> Result<ConditionGeometry> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!(
            "interpolation parameter {s} outside [0,1]"
        )));
    }
    if g1.canvas != g_n.canvas {
        return Err(Error::Structure(format!(
            "canvas mismatch: {:?} vs {:?}",
            g1.canvas, g_n.canvas
        )));
    }
    if g1.lines.len() != g_n.lines.len()
        || g1
            .lines
            .iter()
            .zip(&g_n.lines)
            .any(|((a, _), (b, _))| a != b)
    {
        return Err(Error::Structure(
            "key frames must carry identical match id sets".into(),
        ));
    }

    let lines = g1
        .lines
        .iter()
        .zip(&g_n.lines)
        .map(|((id, seg1), (_, seg_n))| (*id, seg1.lerp(seg_n, s)))
        .collect();

    let pose = match (&g1.pose, &g_n.pose) {
        (None, None) => None,
        (Some(a), Some(b)) => {
            if !a.same_topology(b) {
                return Err(Error::Structure(
                    "pose topology differs between key frames".into(),
                ));
            }
            let keypoints = a
                .keypoints
                .iter()
                .zip(&b.keypoints)
                .map(|(ka, kb)| Keypoint {
                    name: ka.name.clone(),
                    position: ka.position.lerp(&kb.position, s),
                    present: ka.present && kb.present,
                })
                .collect();
            Some(PoseSkeleton {
                keypoints,
                edges: a.edges.clone(),
            })
        }
        _ => {
            return Err(Error::Structure(
                "pose present in only one key frame".into(),
            ))
        }
    };

    Ok(ConditionGeometry {
        lines,
        pose,
        canvas: g1.canvas,
    })
}

/// Frame-wise condition geometries for an N-frame clip.
///
/// `forward[i]` interpolates at `s = curve((i)/(N-1))` for i = 0..N-1, so the
/// first and last entries land exactly on the key frames; `backward` is the
/// forward sequence in reverse order.
pub fn build_condition_sequences(
    g1: &ConditionGeometry,
    g_n: &ConditionGeometry,
    n_frames: usize,
    curve: &EasingCurve,
) -> Result<(Vec<ConditionGeometry>, Vec<ConditionGeometry>)> {
    if n_frames < 2 {
        return Err(Error::Domain(format!(
            "condition sequences need at least 2 frames, got {n_frames}"
        )));
    }
    let mut forward = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let u = i as f64 / (n_frames - 1) as f64;
        let s = curve.eval(u)?;
        forward.push(interpolate_geometry(g1, g_n, s)?);
    }
    let backward: Vec<ConditionGeometry> = forward.iter().rev().cloned().collect();
    Ok((forward, backward))
}

/// Greedy mutual-nearest pairing of two raw segment sets under summed endpoint
/// distance. Pairs farther than `dist_threshold` are excluded; the pairing is
/// injective in both directions. A stand-in for an external line matcher.
pub fn match_lines_naive(
    lines_a: &[LineSegment],
    lines_b: &[LineSegment],
    dist_threshold: f64,
) -> Result<Vec<LineMatch>> {
    if !(dist_threshold > 0.0) {
        return Err(Error::Domain(format!(
            "distance threshold must be positive, got {dist_threshold}"
        )));
    }
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in lines_a.iter().enumerate() {
        for (j, b) in lines_b.iter().enumerate() {
            let d = match_distance(a, b);
            if d <= dist_threshold {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).expect("finite distances"));

    let mut used_a = vec![false; lines_a.len()];
    let mut used_b = vec![false; lines_b.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort();

    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(id, (i, j))| {
            LineMatch {
                match_id: id as u32,
                seg_start: lines_a[i],
                seg_end: lines_b[j],
            }
            .canonicalized()
        })
        .collect())
}
