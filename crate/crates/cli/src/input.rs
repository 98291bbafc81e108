//! Command-line input specifications: matrix sources, preconditioner
//! choices, start vectors and right-hand sides.

use std::fmt;
use std::io::{self, BufReader};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use sassenfeld_core::{fdm_matrix, ComplexMatrix, PreconditionerKind, C64};

use crate::mmio;
use crate::report::{GeneratorSpec, InputDescriptor};

/// A Matrix Market file, `-` for standard input, or a generator `fdm:<m>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    File(PathBuf),
    Stdin,
    Fdm(usize),
}

impl FromStr for MatrixSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(Self::Stdin);
        }
        if let Some(m) = s.strip_prefix("fdm:") {
            let m: usize = m
                .parse()
                .map_err(|_| format!("invalid generator order in '{s}'"))?;
            if m == 0 {
                return Err("generator order must be positive".into());
            }
            return Ok(Self::Fdm(m));
        }
        if s.is_empty() {
            return Err("empty matrix path".into());
        }
        Ok(Self::File(PathBuf::from(s)))
    }
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::File(p) => write!(f, "{}", p.display()),
            Self::Stdin => write!(f, "-"),
            Self::Fdm(m) => write!(f, "fdm:{m}"),
        }
    }
}

impl MatrixSource {
    pub fn load(&self) -> anyhow::Result<ComplexMatrix> {
        match self {
            Self::File(path) => mmio::read_matrix(path)
                .with_context(|| format!("reading matrix '{}'", path.display())),
            Self::Stdin => mmio::read_matrix_from(BufReader::new(io::stdin().lock()))
                .context("reading matrix from standard input"),
            Self::Fdm(m) => Ok(fdm_matrix(*m)?),
        }
    }

    pub fn descriptor(&self, order: usize) -> InputDescriptor {
        match self {
            Self::File(p) => InputDescriptor {
                kind: "file".into(),
                path: Some(p.display().to_string()),
                generator: None,
                order,
            },
            Self::Stdin => InputDescriptor {
                kind: "stdin".into(),
                path: None,
                generator: None,
                order,
            },
            Self::Fdm(m) => InputDescriptor {
                kind: "generator".into(),
                path: None,
                generator: Some(GeneratorSpec {
                    name: "fdm".into(),
                    m: *m,
                }),
                order,
            },
        }
    }
}

/// `jacobi`, `gauss-seidel` (alias `gs`) or `file:<matrix source>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecondSpec {
    Kind(PreconditionerKind),
    Custom(MatrixSource),
}

impl FromStr for PrecondSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jacobi" => Ok(Self::Kind(PreconditionerKind::Jacobi)),
            "gauss-seidel" | "gs" => Ok(Self::Kind(PreconditionerKind::GaussSeidel)),
            _ => match s.strip_prefix("file:") {
                Some(rest) => rest.parse().map(Self::Custom),
                None => Err(format!(
                    "unknown preconditioner '{s}' (expected jacobi, gauss-seidel or file:<path>)"
                )),
            },
        }
    }
}

/// Start vector for the iterative estimator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StartVector {
    /// A multiple of the preconditioner's H-matrix witness.
    Auto,
    Ones,
    File(PathBuf),
}

impl FromStr for StartVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => Self::Auto,
            "ones" => Self::Ones,
            "" => return Err("empty start vector path".into()),
            path => Self::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for StartVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => write!(f, "auto"),
            Self::Ones => write!(f, "ones"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// A vector file, or `ones` / `zeros`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VectorSource {
    Ones,
    Zeros,
    File(PathBuf),
}

impl FromStr for VectorSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ones" => Self::Ones,
            "zeros" => Self::Zeros,
            "" => return Err("empty vector path".into()),
            path => Self::File(PathBuf::from(path)),
        })
    }
}

impl VectorSource {
    pub fn load(&self, m: usize) -> anyhow::Result<Vec<C64>> {
        let v = match self {
            Self::Ones => vec![C64::new(1.0, 0.0); m],
            Self::Zeros => vec![C64::new(0.0, 0.0); m],
            Self::File(path) => mmio::read_vector(path)
                .with_context(|| format!("reading vector '{}'", path.display()))?,
        };
        if v.len() != m {
            bail!("vector has length {} but the matrix has order {m}", v.len());
        }
        Ok(v)
    }
}

pub fn real_parts(v: &[C64], what: &str) -> anyhow::Result<Vec<f64>> {
    if let Some(i) = v.iter().position(|x| x.im != 0.0) {
        bail!(
            "{what} must be real, entry {} has imaginary part {}",
            i + 1,
            v[i].im
        );
    }
    Ok(v.iter().map(|x| x.re).collect())
}
