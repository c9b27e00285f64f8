//! `poly-off` text format: `NV NF`, then `x y` per vertex, then `k i1 .. ik` per
//! face (0-based, counterclockwise). Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use super::PolyMesh;
use crate::error::{Error, Result};
use crate::geometry::pt;

pub fn parse_poly_off(text: &str) -> Result<PolyMesh> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let counts = parse_numbers::<usize>(header)?;
    if counts.len() != 2 {
        return Err(Error::Parse(format!("bad header `{header}`")));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let l = lines.next().ok_or_else(|| Error::Parse("missing vertex line".into()))?;
        let xy = parse_numbers::<f64>(l)?;
        if xy.len() != 2 {
            return Err(Error::Parse(format!("bad vertex line `{l}`")));
        }
        vertices.push(pt(xy[0], xy[1]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let l = lines.next().ok_or_else(|| Error::Parse("missing face line".into()))?;
        let ids = parse_numbers::<usize>(l)?;
        if ids.is_empty() || ids.len() != ids[0] + 1 {
            return Err(Error::Parse(format!("bad face line `{l}`")));
        }
        faces.push(ids[1..].to_vec());
    }
    PolyMesh::new(vertices, faces)
}

fn parse_numbers<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| Error::Parse(format!("bad number `{tok}`"))))
        .collect()
}

pub fn format_poly_off(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", mesh.n_vertices(), mesh.n_faces()).unwrap();
    for p in mesh.vertices() {
        writeln!(s, "{:.17e} {:.17e}", p.x, p.y).unwrap();
    }
    for f in mesh.faces() {
        write!(s, "{}", f.len()).unwrap();
        for v in f {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn read_poly_off(path: impl AsRef<Path>) -> Result<PolyMesh> {
    parse_poly_off(&std::fs::read_to_string(path)?)
}

pub fn write_poly_off(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_poly_off(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let text = "# a unit square\n4 1\n0 0\n1 0\n1 1\n# mid comment\n0 1\n4 0 1 2 3\n";
        let m = parse_poly_off(text).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_faces(), 1);
        let again = parse_poly_off(&format_poly_off(&m)).unwrap();
        assert_eq!(again.faces(), m.faces());
        assert_eq!(again.vertices(), m.vertices());
    }

    #[test]
    fn rejects_short_face_line() {
        assert!(matches!(parse_poly_off("3 1\n0 0\n1 0\n0 1\n4 0 1 2\n"), Err(Error::Parse(_))));
    }
}
