//! ASCII point-cloud files (xyz, ply), synthetic shapes, and nearest-k crops
//! that split a complete cloud into a partial scan and its missing region.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point3, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// One `x y z` record per line; `#` starts a comment line.
    Xyz,
    /// ASCII PLY with a vertex element carrying x, y, z properties.
    PlyAscii,
}

impl Format {
    /// `.ply` selects PLY; anything else is treated as xyz.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => Format::PlyAscii,
            _ => Format::Xyz,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xyz" => Ok(Format::Xyz),
            "ply" | "ply-ascii" => Ok(Format::PlyAscii),
            other => Err(invalid(format!("unknown point cloud format {other:?}"))),
        }
    }
}

pub fn read_cloud(path: &Path, format: Format) -> Result<PointCloud> {
    let text = fs::read_to_string(path)?;
    parse_cloud(&text, format, path)
}

/// Parses file contents; `origin` only labels error messages.
pub fn parse_cloud(text: &str, format: Format, origin: &Path) -> Result<PointCloud> {
    let points = match format {
        Format::Xyz => parse_xyz(text, origin)?,
        Format::PlyAscii => parse_ply(text, origin)?,
    };
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(PointCloud::new(points).expect("parser only admits finite coordinates"))
}

fn parse_error(origin: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_coord(token: &str, origin: &Path, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_error(origin, line, format!("invalid number {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(origin, line, format!("non-finite coordinate {token:?}")));
    }
    Ok(v)
}

fn parse_xyz(text: &str, origin: &Path) -> Result<Vec<Point3>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(origin, i + 1, format!("expected 3 coordinates, found {}", fields.len())));
        }
        points.push(Point3::new(
            parse_coord(fields[0], origin, i + 1)?,
            parse_coord(fields[1], origin, i + 1)?,
            parse_coord(fields[2], origin, i + 1)?,
        ));
    }
    Ok(points)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
    has_list: bool,
}

fn parse_ply(text: &str, origin: &Path) -> Result<Vec<Point3>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        Some(_) => return Err(parse_error(origin, 1, "missing 'ply' magic")),
        None => return Err(Error::EmptyInput),
    }

    let mut elements: Vec<PlyElement> = Vec::new();
    let mut header_done = false;
    for (i, raw) in lines.by_ref() {
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            Some("format") => {
                if tokens.next() != Some("ascii") {
                    return Err(parse_error(origin, i + 1, "only ascii PLY is supported"));
                }
            }
            Some("comment") | Some("obj_info") | None => {}
            Some("element") => {
                let name = tokens.next().unwrap_or_default().to_string();
                let count = tokens
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| parse_error(origin, i + 1, "malformed element line"))?;
                elements.push(PlyElement {
                    name,
                    count,
                    properties: Vec::new(),
                    has_list: false,
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| parse_error(origin, i + 1, "property before any element"))?;
                let rest: Vec<&str> = tokens.collect();
                match rest.as_slice() {
                    ["list", _, _, name] => {
                        element.has_list = true;
                        element.properties.push(name.to_string());
                    }
                    [_, name] => element.properties.push(name.to_string()),
                    _ => return Err(parse_error(origin, i + 1, "malformed property line")),
                }
            }
            Some("end_header") => {
                header_done = true;
                break;
            }
            Some(other) => return Err(parse_error(origin, i + 1, format!("unexpected header keyword {other:?}"))),
        }
    }
    if !header_done {
        return Err(parse_error(origin, 1, "missing end_header"));
    }

    let mut points = Vec::new();
    for element in &elements {
        if element.name != "vertex" {
            if element.has_list && element.count > 0 && points.is_empty() {
                return Err(parse_error(origin, 1, "list elements before vertices are not supported"));
            }
            for _ in 0..element.count {
                lines.next();
            }
            continue;
        }
        let column = |name: &str| {
            element
                .properties
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| parse_error(origin, 1, format!("vertex element has no {name} property")))
        };
        let (cx, cy, cz) = (column("x")?, column("y")?, column("z")?);
        points.reserve(element.count);
        for _ in 0..element.count {
            let (i, raw) = lines
                .next()
                .ok_or_else(|| parse_error(origin, text.lines().count(), "file ends before all vertices"))?;
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.len() != element.properties.len() {
                return Err(parse_error(
                    origin,
                    i + 1,
                    format!("expected {} values, found {}", element.properties.len(), fields.len()),
                ));
            }
            points.push(Point3::new(
                parse_coord(fields[cx], origin, i + 1)?,
                parse_coord(fields[cy], origin, i + 1)?,
                parse_coord(fields[cz], origin, i + 1)?,
            ));
        }
    }
    Ok(points)
}

/// Renders a cloud in the given format. Coordinates use the shortest
/// decimal form that round-trips exactly, so output bytes are deterministic.
pub fn format_cloud(cloud: &PointCloud, format: Format) -> Result<String> {
    cloud.ensure_non_empty()?;
    let mut out = String::with_capacity(cloud.len() * 32);
    if format == Format::PlyAscii {
        out.push_str("ply\nformat ascii 1.0\n");
        let _ = writeln!(out, "element vertex {}", cloud.len());
        out.push_str("property float x\nproperty float y\nproperty float z\nend_header\n");
    }
    for p in cloud {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    Ok(out)
}

pub fn write_cloud(cloud: &PointCloud, path: &Path, format: Format) -> Result<()> {
    let text = format_cloud(cloud, format)?;
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// Unit sphere surface.
    Sphere,
    /// Surface of the cube `[-1, 1]^3`.
    Box,
    /// Car-like union of a body box and a cabin box, surface only.
    VehicleProxy,
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(ShapeKind::Sphere),
            "box" => Ok(ShapeKind::Box),
            "vehicle" | "vehicle_proxy" => Ok(ShapeKind::VehicleProxy),
            other => Err(invalid(format!("unknown shape {other:?}"))),
        }
    }
}

/// Vehicle proxy body: 4.5 m long (x), 1.8 m wide (y), 1.0 m tall (z),
/// resting on z = 0 and centered on x = y = 0.
pub const VEHICLE_BODY: ([f64; 3], [f64; 3]) = ([-2.25, -0.9, 0.0], [2.25, 0.9, 1.0]);
/// Cabin on top of the body: 2.4 m long, 1.6 m wide, 0.5 m tall, set back
/// 0.3 m from the body center.
pub const VEHICLE_CABIN: ([f64; 3], [f64; 3]) = ([-1.5, -0.8, 1.0], [0.9, 0.8, 1.5]);

/// Uniform point on the surface of an axis-aligned box. `skip_face`
/// excludes one face (axis, upper side) from being drawn.
fn sample_box_surface(rng: &mut ChaCha8Rng, lo: [f64; 3], hi: [f64; 3], skip_face: Option<(usize, bool)>) -> Point3 {
    let e = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let mut faces = Vec::with_capacity(6);
    for axis in 0..3 {
        let area = e[(axis + 1) % 3] * e[(axis + 2) % 3];
        for upper in [false, true] {
            if skip_face != Some((axis, upper)) {
                faces.push((axis, upper, area));
            }
        }
    }
    let total: f64 = faces.iter().map(|f| f.2).sum();
    let mut pick = rng.random::<f64>() * total;
    let mut chosen = faces[faces.len() - 1];
    for f in &faces {
        if pick < f.2 {
            chosen = *f;
            break;
        }
        pick -= f.2;
    }
    let (axis, upper, _) = chosen;
    let mut c = [0.0; 3];
    for (k, v) in c.iter_mut().enumerate() {
        *v = if k == axis {
            if upper {
                hi[k]
            } else {
                lo[k]
            }
        } else {
            lo[k] + rng.random::<f64>() * e[k]
        };
    }
    c.into()
}

fn box_area(lo: [f64; 3], hi: [f64; 3]) -> f64 {
    let e = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    2.0 * (e[0] * e[1] + e[1] * e[2] + e[2] * e[0])
}

/// `n` points on the surface of the named shape, deterministic per seed.
pub fn generate_shape(kind: ShapeKind, n: usize, rng_seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(invalid("shape needs at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut points = Vec::with_capacity(n);
    match kind {
        ShapeKind::Sphere => {
            while points.len() < n {
                let v = Point3::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                );
                let r = v.norm();
                if r > 1e-9 {
                    points.push(v * (1.0 / r));
                }
            }
        }
        ShapeKind::Box => {
            for _ in 0..n {
                points.push(sample_box_surface(&mut rng, [-1.0; 3], [1.0; 3], None));
            }
        }
        ShapeKind::VehicleProxy => {
            let (body_lo, body_hi) = VEHICLE_BODY;
            let (cabin_lo, cabin_hi) = VEHICLE_CABIN;
            let body_area = box_area(body_lo, body_hi);
            let cabin_area = box_area(cabin_lo, cabin_hi);
            while points.len() < n {
                let p = if rng.random::<f64>() * (body_area + cabin_area) < body_area {
                    let p = sample_box_surface(&mut rng, body_lo, body_hi, None);
                    // roof area under the cabin is interior to the union
                    let covered = p.z == body_hi[2]
                        && (cabin_lo[0]..=cabin_hi[0]).contains(&p.x)
                        && (cabin_lo[1]..=cabin_hi[1]).contains(&p.y);
                    if covered {
                        continue;
                    }
                    p
                } else {
                    sample_box_surface(&mut rng, cabin_lo, cabin_hi, Some((2, false)))
                };
                points.push(p);
            }
        }
    }
    PointCloud::new(points)
}

/// A complete cloud split into what a sensor saw and what it missed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialPair {
    pub partial: PointCloud,
    pub missing: PointCloud,
    /// Source indices of `partial`, ascending.
    pub partial_indices: Vec<usize>,
    /// Source indices of `missing`, ascending.
    pub missing_indices: Vec<usize>,
    pub crop_center: Point3,
    pub crop_fraction: f64,
}

/// Removes the `round(crop_fraction * |cloud|)` points nearest `crop_center`
/// (ties by lowest index) as the missing region.
pub fn crop_missing(cloud: &PointCloud, crop_center: Point3, crop_fraction: f64) -> Result<PartialPair> {
    cloud.ensure_non_empty()?;
    if !(crop_fraction > 0.0 && crop_fraction < 1.0) {
        return Err(invalid(format!("crop fraction must lie in (0, 1), got {crop_fraction}")));
    }
    if !crop_center.is_finite() {
        return Err(invalid("crop center must be finite"));
    }
    let k = (crop_fraction * cloud.len() as f64).round() as usize;
    if k >= cloud.len() {
        return Err(invalid(format!(
            "crop fraction {crop_fraction} removes all {} points",
            cloud.len()
        )));
    }

    let mut order: Vec<(f64, usize)> = cloud.iter().map(|p| p.dist2(&crop_center)).zip(0..).collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut is_missing = vec![false; cloud.len()];
    for &(_, i) in &order[..k] {
        is_missing[i] = true;
    }
    let (missing_indices, partial_indices): (Vec<usize>, Vec<usize>) = (0..cloud.len()).partition(|&i| is_missing[i]);

    Ok(PartialPair {
        partial: cloud.gather(&partial_indices),
        missing: cloud.gather(&missing_indices),
        partial_indices,
        missing_indices,
        crop_center,
        crop_fraction,
    })
}

/// Text record of a normalization transform: `translation x y z` and
/// `scale s` lines.
pub fn format_transform(t: &crate::geometry::NormalizationTransform) -> String {
    let c = t.translation();
    format!("translation {} {} {}\nscale {}\n", c.x, c.y, c.z, t.scale())
}

pub fn parse_transform(text: &str, origin: &Path) -> Result<crate::geometry::NormalizationTransform> {
    let mut translation = None;
    let mut scale = None;
    for (i, raw) in text.lines().enumerate() {
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [c, ..] if c.starts_with('#') => {}
            ["translation", x, y, z] => {
                translation = Some(Point3::new(
                    parse_coord(x, origin, i + 1)?,
                    parse_coord(y, origin, i + 1)?,
                    parse_coord(z, origin, i + 1)?,
                ));
            }
            ["scale", s] => scale = Some(parse_coord(s, origin, i + 1)?),
            _ => return Err(parse_error(origin, i + 1, format!("unrecognized transform line {raw:?}"))),
        }
    }
    let translation = translation.ok_or_else(|| parse_error(origin, 0, "missing translation line"))?;
    let scale = scale.ok_or_else(|| parse_error(origin, 0, "missing scale line"))?;
    crate::geometry::NormalizationTransform::new(translation, scale)
}

/// Guess of a path's format, used when the caller gives none.
pub fn infer_format(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| Format::from_path(path))
}
