//! Model domains and points.

use crate::error::{BergmanError, Result};
use crate::C64;

/// Symbolic description of a model domain: the unit disk, a circular
/// annulus `{r < |z| < 1}`, or a finite product of one-dimensional factors.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    UnitDisk,
    Annulus { r: f64 },
    Product { factors: Vec<DomainSpec> },
}

impl DomainSpec {
    /// Annulus `{r < |z| < 1}`. Requires `0 < r < 1`.
    pub fn annulus(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) || !r.is_finite() {
            return Err(BergmanError::InvalidDomain(format!(
                "annulus parameter must satisfy 0 < r < 1, got {r}"
            )));
        }
        Ok(DomainSpec::Annulus { r })
    }

    /// Product of one-dimensional factors. Nested products are rejected.
    pub fn product(factors: Vec<DomainSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(BergmanError::InvalidDomain("empty product".into()));
        }
        if factors.iter().any(|f| f.dimension() != 1) {
            return Err(BergmanError::InvalidDomain(
                "product factors must be one-dimensional".into(),
            ));
        }
        Ok(DomainSpec::Product { factors })
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::UnitDisk | DomainSpec::Annulus { .. } => 1,
            DomainSpec::Product { factors } => factors.len(),
        }
    }

    /// One-dimensional factors in order; a 1-D domain is its own factor.
    pub fn factors(&self) -> Vec<&DomainSpec> {
        match self {
            DomainSpec::Product { factors } => factors.iter().collect(),
            d => vec![d],
        }
    }

    /// Open-domain membership test, coordinatewise for products.
    pub fn contains(&self, z: &Point) -> bool {
        if z.dim() != self.dimension() {
            return false;
        }
        match self {
            DomainSpec::UnitDisk => z.coords[0].norm() < 1.0,
            DomainSpec::Annulus { r } => {
                let a = z.coords[0].norm();
                *r < a && a < 1.0
            }
            DomainSpec::Product { factors } => factors
                .iter()
                .zip(&z.coords)
                .all(|(f, c)| f.contains(&Point::scalar(*c))),
        }
    }

    /// Checked membership, as an error for operation preconditions.
    pub fn require_member(&self, z: &Point, what: &str) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(BergmanError::NotInDomain(format!("{what} = {z}")))
        }
    }
}

impl std::fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSpec::UnitDisk => write!(f, "disk"),
            DomainSpec::Annulus { r } => write!(f, "annulus(r={r})"),
            DomainSpec::Product { factors } => {
                write!(f, "product(")?;
                for (i, d) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{d}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A point of a model domain: one complex coordinate per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<C64>,
}

impl Point {
    pub fn new(coords: Vec<C64>) -> Self {
        Point { coords }
    }

    pub fn scalar(z: C64) -> Self {
        Point { coords: vec![z] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The single coordinate of a one-dimensional point.
    pub fn as_scalar(&self) -> C64 {
        debug_assert_eq!(self.coords.len(), 1);
        self.coords[0]
    }
}

impl From<C64> for Point {
    fn from(z: C64) -> Self {
        Point::scalar(z)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(C64::new(x, 0.0))
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
