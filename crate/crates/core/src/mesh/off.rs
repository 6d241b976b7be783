//! ASCII OFF reader and writer for triangle meshes.
//!
//! ```text
//! OFF
//! V F E
//! x y z        (V lines)
//! 3 i j k      (F lines)
//! ```
//! Blank lines and `#` comments are skipped. Coordinates are written with 17
//! significant digits, which round-trips every `f64`.

use std::io::{BufRead, Write};

use super::{Point, TriMesh};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_off<R: BufRead>(reader: R) -> Result<TriMesh> {
    let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) => {
            let body = l.split('#').next().unwrap_or("").trim().to_string();
            if body.is_empty() {
                None
            } else {
                Some(Ok((i + 1, body)))
            }
        }
        Err(e) => Some(Err(e)),
    });
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some(Ok(x)) => Ok(x),
            Some(Err(e)) => Err(Error::Io(e)),
            None => Err(parse_err(0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (ln, header) = next("OFF header")?;
    // Some writers put the counts on the header line.
    let counts_inline = header.strip_prefix("OFF").map(str::trim);
    let counts = match counts_inline {
        Some("") => next("counts line")?,
        Some(rest) => (ln, rest.to_string()),
        None => return Err(parse_err(ln, format!("expected header \"OFF\", found {header:?}"))),
    };
    let nums: Vec<usize> = counts
        .1
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(counts.0, format!("bad counts line: {e}")))?;
    if nums.len() < 2 {
        return Err(parse_err(counts.0, "counts line needs \"V F E\""));
    }
    let (nv, nf) = (nums[0], nums[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertex line")?;
        let c: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad coordinate: {e}")))?;
        if c.len() != 3 {
            return Err(parse_err(ln, "vertex line needs three coordinates"));
        }
        vertices.push(Point::new(c[0], c[1], c[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = next("face line")?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad face index: {e}")))?;
        if idx.len() < 4 || idx[0] != 3 {
            return Err(parse_err(ln, "only triangular faces \"3 i j k\" are supported"));
        }
        faces.push([idx[1], idx[2], idx[3]]);
    }
    TriMesh::new(vertices, faces)
}

pub fn write_off<W: Write>(mut w: W, mesh: &TriMesh) -> Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} {}", mesh.vertex_count(), mesh.face_count(), mesh.edges().len())?;
    for p in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}
