//! Mesh readers and report writers.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::equilateralize::{EquilateralizeError, GeometricSurface};
use crate::surface::{SimplicialSurface, SurfaceError};

pub const REPORT_SCHEMA: &str = "dias-report/1";

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid surface: {0}")]
    Surface(#[from] SurfaceError),
    #[error("invalid geometry: {0}")]
    Geometry(#[from] EquilateralizeError),
}

impl InputError {
    /// Parse failures are distinct from meshes that parse but are not surfaces.
    pub fn is_parse(&self) -> bool {
        matches!(self, InputError::Io { .. } | InputError::Parse(_))
    }
}

/// A triangle mesh as read from disk, before validation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeshInput {
    pub vertices: usize,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
    /// `[u, v, length]` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<(usize, usize, f64)>>,
}

impl MeshInput {
    pub fn from_surface(surface: &SimplicialSurface) -> Self {
        Self {
            vertices: surface.vertex_count(),
            triangles: surface.triangles().to_vec(),
            positions: None,
            lengths: None,
        }
    }

    pub fn surface(&self) -> Result<SimplicialSurface, InputError> {
        Ok(SimplicialSurface::new(self.vertices, &self.triangles)?)
    }

    /// Geometry from explicit lengths, else from positions.
    pub fn geometry(&self) -> Result<GeometricSurface, InputError> {
        if let Some(lengths) = &self.lengths {
            Ok(GeometricSurface::from_edge_lengths(self.vertices, &self.triangles, lengths)?)
        } else if let Some(points) = &self.positions {
            Ok(GeometricSurface::from_coordinates(points, &self.triangles)?)
        } else {
            Err(InputError::Parse("mesh has neither positions nor edge lengths".into()))
        }
    }
}

pub fn parse_off(text: &str) -> Result<MeshInput, InputError> {
    let err = |m: &str| InputError::Parse(format!("OFF: {m}"));
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    match tokens.next() {
        Some("OFF") => {}
        Some(h) if h.ends_with("OFF") => return Err(err(&format!("unsupported header `{h}`"))),
        _ => return Err(err("missing OFF header")),
    }
    let mut int = |what: &str| -> Result<usize, InputError> {
        tokens
            .next()
            .ok_or_else(|| err(&format!("unexpected end of file reading {what}")))?
            .parse::<usize>()
            .map_err(|_| err(&format!("bad integer for {what}")))
    };
    let nv = int("vertex count")?;
    let nf = int("face count")?;
    let _ne = int("edge count")?;
    drop(int);
    let mut float = |what: &str| -> Result<f64, InputError> {
        tokens
            .next()
            .ok_or_else(|| err(&format!("unexpected end of file reading {what}")))?
            .parse::<f64>()
            .map_err(|_| err(&format!("bad number for {what}")))
    };
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        positions.push([float("vertex")?, float("vertex")?, float("vertex")?]);
    }
    drop(float);
    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let mut next = || -> Result<usize, InputError> {
            tokens
                .next()
                .ok_or_else(|| err("unexpected end of file reading faces"))?
                .parse::<usize>()
                .map_err(|_| err(&format!("bad index in face {f}")))
        };
        let k = next()?;
        if k != 3 {
            return Err(err(&format!("face {f} has {k} vertices, only triangles are supported")));
        }
        triangles.push([next()?, next()?, next()?]);
    }
    Ok(MeshInput {
        vertices: nv,
        triangles,
        positions: Some(positions),
        lengths: None,
    })
}

pub fn parse_json_mesh(text: &str) -> Result<MeshInput, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Parse(format!("JSON: {e}")))
}

/// Reads `.off` files as OFF and anything else as JSON.
pub fn read_mesh(path: &Path) -> Result<MeshInput, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_off = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    if is_off {
        parse_off(&text)
    } else {
        parse_json_mesh(&text)
    }
}

pub fn write_off(surface: &SimplicialSurface, positions: &[[f64; 3]]) -> String {
    let mut out = format!("OFF\n{} {} 0\n", surface.vertex_count(), surface.triangle_count());
    for p in positions {
        writeln!(out, "{} {} {}", format_g12(p[0]), format_g12(p[1]), format_g12(p[2])).unwrap();
    }
    for t in surface.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= P {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON with sorted keys and `%.12g` floats; byte-stable for equal input.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let f = n.as_f64().unwrap();
                out.push_str(&format_g12(f));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(out, x, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn profile_csv(profile: &[u64]) -> String {
    let mut out = String::from("step,mass\n");
    for (i, m) in profile.iter().enumerate() {
        writeln!(out, "{i},{m}").unwrap();
    }
    out
}

/// 800×400 line plot of mass against step.
pub fn profile_svg(profile: &[u64]) -> String {
    let (w, h, margin) = (800.0, 400.0, 40.0);
    let max = profile.iter().copied().max().unwrap_or(0).max(1) as f64;
    let steps = (profile.len().max(2) - 1) as f64;
    let mut points = String::new();
    for (i, &m) in profile.iter().enumerate() {
        let x = margin + (w - 2.0 * margin) * i as f64 / steps;
        let y = h - margin - (h - 2.0 * margin) * m as f64 / max;
        if i > 0 {
            points.push(' ');
        }
        write!(points, "{},{}", format_g12(x), format_g12(y)).unwrap();
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n",
            "  <rect width=\"800\" height=\"400\" fill=\"white\"/>\n",
            "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "  <text x=\"{m}\" y=\"{t}\" font-size=\"12\">max mass {max}</text>\n",
            "  <text x=\"{r}\" y=\"{s}\" font-size=\"12\" text-anchor=\"end\">step {n}</text>\n",
            "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{p}\"/>\n",
            "</svg>\n"
        ),
        m = margin,
        b = h - margin,
        r = w - margin,
        t = margin - 10.0,
        s = h - margin + 20.0,
        max = max as u64,
        n = profile.len().saturating_sub(1),
        p = points,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (8.660254037844386, "8.66025403784"),
            (0.1, "0.1"),
            (260.4964516409763, "260.496451641"),
            (1e-5, "1e-05"),
            (123456789012345.0, "1.23456789012e+14"),
            (2.0, "2"),
            (-0.5, "-0.5"),
            (1e8, "100000000"),
            (0.0001, "0.0001"),
            (999999999999.5, "1e+12"),
        ];
        for (x, expect) in cases {
            assert_eq!(format_g12(x), expect, "{x}");
        }
    }

    #[test]
    fn json_keys_are_sorted_and_floats_fixed() {
        #[derive(Serialize)]
        struct R {
            zeta: f64,
            alpha: u64,
            list: Vec<f64>,
        }
        let s = to_json(&R {
            zeta: 1.0 / 3.0,
            alpha: 4,
            list: vec![0.5, 2.0],
        });
        assert_eq!(s, "{\n  \"alpha\": 4,\n  \"list\": [0.5, 2],\n  \"zeta\": 0.333333333333\n}\n");
    }

    #[test]
    fn off_round_trip() {
        let s = corpus::tetrahedron();
        let pts = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let text = write_off(&s, &pts);
        let mesh = parse_off(&format!("# tetrahedron\n{text}")).unwrap();
        assert_eq!(mesh.triangles, s.triangles());
        assert_eq!(mesh.positions.unwrap()[1], pts[1]);
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        assert!(parse_off("OFF\n4 4 0\n0 0 0\n").unwrap_err().is_parse());
        assert!(parse_off("COFF\n").unwrap_err().is_parse());
        assert!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n").unwrap_err().is_parse());
        assert!(parse_json_mesh("{\"vertices\": 4, \"triangles\": [[0,1]]}").unwrap_err().is_parse());
        let bad = parse_json_mesh("{\"vertices\": 4, \"triangles\": [[0,1,2],[0,1,3],[0,1,2]]}").unwrap();
        assert!(!bad.surface().unwrap_err().is_parse());
    }

    #[test]
    fn json_mesh_round_trip() {
        let s = corpus::klein_bottle();
        let text = serde_json::to_string(&MeshInput::from_surface(&s)).unwrap();
        let back = parse_json_mesh(&text).unwrap().surface().unwrap();
        assert_eq!(back.triangles(), s.triangles());
    }

    #[test]
    fn csv_and_svg() {
        assert_eq!(profile_csv(&[0, 3, 4, 3, 0]), "step,mass\n0,0\n1,3\n2,4\n3,3\n4,0\n");
        let svg = profile_svg(&[0, 3, 4, 3, 0]);
        assert!(svg.contains("width=\"800\" height=\"400\""));
        assert!(svg.contains("points=\"40,360 220,120 400,40"));
    }
}
