use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::game::GameState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    Cycle,
    Path,
}

/// A vertex sequence claimed to be a cycle or path in Walker's graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub vertices: Vec<usize>,
}

impl Certificate {
    pub fn cycle(vertices: Vec<usize>) -> Self {
        Self {
            kind: CertificateKind::Cycle,
            vertices,
        }
    }

    pub fn path(vertices: Vec<usize>) -> Self {
        Self {
            kind: CertificateKind::Path,
            vertices,
        }
    }

    /// Number of edges: the cycle length, or the path length.
    pub fn len(&self) -> usize {
        match self.kind {
            CertificateKind::Cycle => self.vertices.len(),
            CertificateKind::Path => self.vertices.len().saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Consecutive vertex pairs, including the closing pair of a cycle.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let vs = &self.vertices;
        let mut out: Vec<(usize, usize)> = vs.windows(2).map(|w| (w[0], w[1])).collect();
        if self.kind == CertificateKind::Cycle && vs.len() > 1 {
            out.push((vs[vs.len() - 1], vs[0]));
        }
        out
    }
}

/// True iff the certificate is a genuine cycle/path of Walker-owned edges.
pub fn validate_certificate(state: &GameState, cert: &Certificate) -> bool {
    let n = state.n();
    let vs = &cert.vertices;
    let min = match cert.kind {
        CertificateKind::Cycle => 3,
        CertificateKind::Path => 2,
    };
    if vs.len() < min || vs.iter().any(|&v| v >= n) {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in vs {
        if std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    cert.pairs()
        .into_iter()
        .all(|(a, b)| state.board().is_walker(a, b))
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.kind {
            CertificateKind::Cycle => "CYCLE",
            CertificateKind::Path => "PATH",
        })?;
        for v in &self.vertices {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed certificate: {0}")]
pub struct ParseCertificateError(pub String);

impl FromStr for Certificate {
    type Err = ParseCertificateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(' ');
        let kind = match parts.next() {
            Some("CYCLE") => CertificateKind::Cycle,
            Some("PATH") => CertificateKind::Path,
            _ => return Err(ParseCertificateError(s.to_owned())),
        };
        let vertices = parts
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| ParseCertificateError(s.to_owned()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { kind, vertices })
    }
}
