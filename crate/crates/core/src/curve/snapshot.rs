//! Line-oriented polyline text: a `# curve topology=.. n=.. t=..` header,
//! then one `x y z` line per vertex at 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use super::{SpaceCurve, Topology};
use crate::error::{CsfError, Result};
use crate::geom::Vec3;

/// A curve stamped with a time. End conditions are not part of the text
/// format; parsed open curves come back with free ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub curve: SpaceCurve,
    pub time: f64,
}

impl Snapshot {
    pub fn to_text(&self) -> String {
        let v = self.curve.vertices();
        let mut out = String::with_capacity(64 * (v.len() + 1));
        let _ = writeln!(
            out,
            "# curve topology={} n={} t={:.16e}",
            self.curve.topology().label(),
            v.len(),
            self.time
        );
        for p in v {
            let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
        }
        out
    }
}

fn bad(reason: impl Into<String>) -> CsfError {
    CsfError::Parse {
        what: "curve snapshot".into(),
        reason: reason.into(),
    }
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let rest = header
        .strip_prefix("# curve")
        .ok_or_else(|| bad(format!("bad header `{header}`")))?;
    let (mut topo, mut n, mut t) = (None, None, None);
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("bad header field `{field}`")))?;
        match k {
            "topology" => {
                topo = Some(match v {
                    "open" => Topology::open_free(),
                    "closed" => Topology::Closed,
                    _ => return Err(bad(format!("unknown topology `{v}`"))),
                })
            }
            "n" => n = Some(v.parse::<usize>().map_err(|e| bad(format!("n: {e}")))?),
            "t" => t = Some(v.parse::<f64>().map_err(|e| bad(format!("t: {e}")))?),
            _ => return Err(bad(format!("unknown header key `{k}`"))),
        }
    }
    let topo = topo.ok_or_else(|| bad("header lacks topology"))?;
    let n = n.ok_or_else(|| bad("header lacks n"))?;
    let t = t.ok_or_else(|| bad("header lacks t"))?;

    let mut vertices = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        let mut next = || -> Result<f64> {
            it.next()
                .ok_or_else(|| bad(format!("vertex line {i} has fewer than 3 values")))?
                .map_err(|e| bad(format!("vertex line {i}: {e}")))
        };
        let p = Vec3::new(next()?, next()?, next()?);
        if it.next().is_some() {
            return Err(bad(format!("vertex line {i} has more than 3 values")));
        }
        vertices.push(p);
    }
    if vertices.len() != n {
        return Err(bad(format!("header says n={n}, found {} vertices", vertices.len())));
    }
    Ok(Snapshot {
        curve: SpaceCurve::from_parts(vertices, topo)?,
        time: t,
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| CsfError::io(path, e))?;
    parse_snapshot(&text)
}

/// Writes via a temporary sibling and a rename so readers never see a
/// half-written file.
pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    crate::io::write_atomic(path, snap.to_text().as_bytes())
}
