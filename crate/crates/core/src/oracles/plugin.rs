//! External oracle backends over a process boundary.
//!
//! One request per process invocation, written to the child's stdin:
//!
//! ```text
//! <volume|count|ilp> <dim> <rows>
//! <a_1> ... <a_dim> <b>        # one line per row, meaning a·x <= b
//! ```
//!
//! The child answers with a single line on stdout:
//!
//! ```text
//! value <p/q>                  # volume
//! count <n>                    # lattice count
//! point <z_1> ... <z_dim>      # integer point
//! none                         # integer-empty
//! unbounded                    # polytope is unbounded
//! incomplete <message>         # ILP could not decide
//! error <message>
//! ```

use std::io::Write;
use std::process::{Command, Stdio};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};

use super::{IlpOracle, LatticeOracle, OracleSuite, VolumeOracle};
use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, LinearInequality};
use crate::scalar::{parse_fraction, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RequestKind {
    Volume,
    Count,
    Ilp,
}

impl RequestKind {
    fn keyword(self) -> &'static str {
        match self {
            RequestKind::Volume => "volume",
            RequestKind::Count => "count",
            RequestKind::Ilp => "ilp",
        }
    }
}

pub fn encode_request(kind: RequestKind, poly: &HPolyhedron) -> String {
    let mut out = format!("{} {} {}\n", kind.keyword(), poly.dim(), poly.rows().len());
    for r in poly.rows() {
        let cols: Vec<String> = r.coeffs().iter().map(ToString::to_string).collect();
        out.push_str(&format!("{} {}\n", cols.join(" "), r.bound()));
    }
    out
}

pub fn decode_request(text: &str) -> Result<(RequestKind, HPolyhedron)> {
    let bad = |msg: &str| Error::Oracle(format!("malformed request: {msg}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
    let [kind, dim, n] = header.as_slice() else {
        return Err(bad("header"));
    };
    let kind = match *kind {
        "volume" => RequestKind::Volume,
        "count" => RequestKind::Count,
        "ilp" => RequestKind::Ilp,
        _ => return Err(bad("unknown kind")),
    };
    let dim: usize = dim.parse().map_err(|_| bad("dimension"))?;
    let n: usize = n.parse().map_err(|_| bad("row count"))?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let vals = lines
            .next()
            .ok_or_else(|| bad("missing row"))?
            .split_whitespace()
            .map(BigInt::from_str)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("row entry"))?;
        if vals.len() != dim + 1 {
            return Err(bad("row width"));
        }
        let (a, b) = vals.split_at(dim);
        rows.push(LinearInequality::new(a.to_vec(), b[0].clone(), false)?);
    }
    Ok((kind, HPolyhedron::new(dim, rows)?))
}

/// Answers one request with the suite's backends; used by the CLI's plugin server.
pub fn serve_request<F: Field>(text: &str, suite: &OracleSuite<F>) -> String {
    let answer = decode_request(text).and_then(|(kind, poly)| match kind {
        RequestKind::Volume => suite.volume(&poly).map(|v| format!("value {v}")),
        RequestKind::Count => suite.lattice_count(&poly).map(|c| format!("count {c}")),
        RequestKind::Ilp => suite.feasible_point(&poly).map(|p| match p {
            Some(p) => format!("point {p}"),
            None => "none".to_string(),
        }),
    });
    match answer {
        Ok(line) => line,
        Err(Error::UnboundedPolytope) => "unbounded".to_string(),
        Err(Error::IlpIncomplete(msg)) => format!("incomplete {msg}"),
        Err(e) => format!("error {e}"),
    }
}

/// Runs `program args...` once per request.
#[derive(Clone, Debug)]
pub struct ProcessOracle {
    program: String,
    args: Vec<String>,
}

impl ProcessOracle {
    /// Whitespace-separated command line, e.g. `"polycirc oracle-serve"`.
    pub fn from_command_line(cmd: &str) -> Result<Self> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or_else(|| Error::Oracle("empty plugin command".into()))?;
        Ok(ProcessOracle { program, args: parts.collect() })
    }

    fn call(&self, kind: RequestKind, poly: &HPolyhedron) -> Result<String> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Oracle(format!("cannot start `{}`: {e}", self.program)))?;
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(encode_request(kind, poly).as_bytes())?;
        let out = child.wait_with_output()?;
        if !out.status.success() {
            return Err(Error::Oracle(format!("`{}` exited with {}", self.program, out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let line = text.lines().next().unwrap_or("").trim().to_string();
        if line == "unbounded" {
            return Err(Error::UnboundedPolytope);
        }
        if let Some(msg) = line.strip_prefix("incomplete") {
            return Err(Error::IlpIncomplete(msg.trim().to_string()));
        }
        if let Some(msg) = line.strip_prefix("error") {
            return Err(Error::Oracle(msg.trim().to_string()));
        }
        Ok(line)
    }
}

fn expect_prefix<'a>(line: &'a str, prefix: &str) -> Result<&'a str> {
    line.strip_prefix(prefix)
        .map(str::trim)
        .ok_or_else(|| Error::Oracle(format!("unexpected plugin response `{line}`")))
}

impl<F: Field> VolumeOracle<F> for ProcessOracle {
    fn volume(&self, poly: &HPolyhedron) -> Result<F> {
        let line = self.call(RequestKind::Volume, poly)?;
        parse_fraction(expect_prefix(&line, "value")?)
    }
}

impl LatticeOracle for ProcessOracle {
    fn lattice_count(&self, poly: &HPolyhedron) -> Result<BigUint> {
        let line = self.call(RequestKind::Count, poly)?;
        let v = expect_prefix(&line, "count")?;
        BigUint::from_str(v).map_err(|_| Error::InvalidNumber(v.to_string()))
    }
}

impl IlpOracle for ProcessOracle {
    fn feasible_point(&self, poly: &HPolyhedron) -> Result<Option<Vec<BigInt>>> {
        let line = self.call(RequestKind::Ilp, poly)?;
        if line == "none" {
            return Ok(None);
        }
        let coords = expect_prefix(&line, "point")?
            .split_whitespace()
            .map(|t| BigInt::from_str(t).map_err(|_| Error::InvalidNumber(t.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != poly.dim() {
            return Err(Error::Oracle("plugin point has wrong dimension".into()));
        }
        Ok(Some(coords))
    }
}
