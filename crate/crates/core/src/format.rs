//! OFF and OBJ triangle mesh files.
//!
//! Both readers accept triangles only. Written OFF files print coordinates
//! with Rust's shortest round-trip float formatting, so reading them back
//! reproduces the coordinates exactly.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::geom::Point;
use crate::mesh::{Mesh, MeshError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported mesh file extension in `{0}` (expected .off or .obj)")]
    Extension(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T, FormatError> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{token}`")))
}

/// Numbered lines with comments stripped and blank lines dropped.
fn content_lines(reader: impl Read) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    BufReader::new(reader)
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e.into())),
            Ok(text) => {
                let text = text.split('#').next().unwrap_or("").trim().to_string();
                (!text.is_empty()).then_some(Ok((i + 1, text)))
            }
        })
}

pub fn read_off(reader: impl Read) -> Result<Mesh, FormatError> {
    let mut lines = content_lines(reader);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))??;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"OFF") {
        return Err(parse_err(line, "missing OFF header"));
    }
    tokens.remove(0);

    let counts_line;
    let (count_line, counts) = if tokens.is_empty() {
        let (l, text) = lines
            .next()
            .ok_or_else(|| parse_err(line, "missing element counts"))??;
        counts_line = text;
        (l, counts_line.split_whitespace().collect::<Vec<_>>())
    } else {
        (line, tokens)
    };
    if counts.len() < 2 {
        return Err(parse_err(count_line, "expected vertex and face counts"));
    }
    let nv: usize = number(counts[0], count_line, "vertex count")?;
    let nf: usize = number(counts[1], count_line, "face count")?;

    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, text) = lines
            .next()
            .ok_or_else(|| parse_err(count_line, format!("expected {nv} vertices")))??;
        let t: Vec<&str> = text.split_whitespace().collect();
        if t.len() < 2 {
            return Err(parse_err(l, "vertex needs at least two coordinates"));
        }
        let x = number(t[0], l, "coordinate")?;
        let y = number(t[1], l, "coordinate")?;
        let z = match t.get(2) {
            Some(z) => number(z, l, "coordinate")?,
            None => 0.0,
        };
        positions.push(Point::new(x, y, z));
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, text) = lines
            .next()
            .ok_or_else(|| parse_err(count_line, format!("expected {nf} faces")))??;
        let t: Vec<&str> = text.split_whitespace().collect();
        let n: usize = number(t[0], l, "face size")?;
        if n != 3 {
            return Err(parse_err(
                l,
                format!("face with {n} vertices; only triangles are supported"),
            ));
        }
        if t.len() < 4 {
            return Err(parse_err(l, "face lists fewer than 3 indices"));
        }
        triangles.push([
            number(t[1], l, "vertex index")?,
            number(t[2], l, "vertex index")?,
            number(t[3], l, "vertex index")?,
        ]);
    }
    Ok(Mesh::build(positions, triangles)?)
}

fn obj_index(token: &str, line: usize, count: usize) -> Result<usize, FormatError> {
    let head = token.split('/').next().unwrap_or("");
    let i: i64 = number(head, line, "vertex index")?;
    let resolved = match i {
        0 => return Err(parse_err(line, "OBJ indices start at 1")),
        i if i > 0 => i - 1,
        i => count as i64 + i,
    };
    usize::try_from(resolved).map_err(|_| parse_err(line, format!("vertex index {i} out of range")))
}

pub fn read_obj(reader: impl Read) -> Result<Mesh, FormatError> {
    let mut positions = Vec::new();
    let mut triangles = Vec::new();
    for item in content_lines(reader) {
        let (l, text) = item?;
        let mut t = text.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 2 {
                    return Err(parse_err(l, "vertex needs at least two coordinates"));
                }
                let z = match c.get(2) {
                    Some(z) => number(z, l, "coordinate")?,
                    None => 0.0,
                };
                positions.push(Point::new(
                    number(c[0], l, "coordinate")?,
                    number(c[1], l, "coordinate")?,
                    z,
                ));
            }
            Some("f") => {
                let c: Vec<&str> = t.collect();
                if c.len() != 3 {
                    return Err(parse_err(
                        l,
                        format!(
                            "face with {} vertices; only triangles are supported",
                            c.len()
                        ),
                    ));
                }
                triangles.push([
                    obj_index(c[0], l, positions.len())?,
                    obj_index(c[1], l, positions.len())?,
                    obj_index(c[2], l, positions.len())?,
                ]);
            }
            _ => {}
        }
    }
    Ok(Mesh::build(positions, triangles)?)
}

pub fn write_off(mesh: &Mesh, coords: &[Point], mut out: impl Write) -> Result<(), FormatError> {
    mesh.check_coords(coords)?;
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.element_count())?;
    for p in coords {
        writeln!(out, "{} {} {}", p.x, p.y, p.z)?;
    }
    for e in mesh.elements() {
        let [a, b, c] = e.indices();
        writeln!(out, "3 {a} {b} {c}")?;
    }
    Ok(())
}

pub fn off_string(mesh: &Mesh, coords: &[Point]) -> String {
    let mut buf = Vec::new();
    write_off(mesh, coords, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("OFF output is ASCII")
}

/// Reads `.off` or `.obj` by extension (case-insensitive).
pub fn load_mesh(path: &Path) -> Result<Mesh, FormatError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let file = fs::File::open(path)?;
    match ext.as_deref() {
        Some("off") => read_off(file),
        Some("obj") => read_obj(file),
        _ => Err(FormatError::Extension(path.display().to_string())),
    }
}

pub fn save_off(path: &Path, mesh: &Mesh, coords: &[Point]) -> Result<(), FormatError> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    write_off(mesh, coords, &mut file)?;
    file.flush()?;
    Ok(())
}
