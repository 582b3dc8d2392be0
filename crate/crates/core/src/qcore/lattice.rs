use std::fmt;

use crate::error::{bail, Result};

/// Default cap on the number of sites for dense state vectors.
pub const DEFAULT_MAX_SITES: usize = 14;
/// Largest cap accepted by [`LatticeSpec::with_cap`].
pub const HARD_MAX_SITES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    OpenChain,
    PeriodicChain,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::OpenChain => "open-chain",
            Geometry::PeriodicChain => "periodic-chain",
        })
    }
}

/// A one-dimensional chain of spin-1/2 sites. The site count plays the role of the volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    n_sites: usize,
    geometry: Geometry,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, geometry: Geometry) -> Result<Self> {
        Self::with_cap(n_sites, geometry, DEFAULT_MAX_SITES)
    }

    pub fn open(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, Geometry::OpenChain)
    }

    pub fn periodic(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, Geometry::PeriodicChain)
    }

    /// Like [`LatticeSpec::new`] with an explicit site cap (at most [`HARD_MAX_SITES`]).
    pub fn with_cap(n_sites: usize, geometry: Geometry, cap: usize) -> Result<Self> {
        if cap > HARD_MAX_SITES {
            bail!(
                Size,
                "site cap {cap} exceeds the hard limit {HARD_MAX_SITES}"
            );
        }
        if n_sites == 0 {
            bail!(Size, "lattice needs at least one site");
        }
        if n_sites > cap {
            bail!(Size, "{n_sites} sites exceed the cap of {cap}");
        }
        Ok(Self { n_sites, geometry })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            bail!(
                Argument,
                "site {site} out of range for {} sites",
                self.n_sites
            );
        }
        Ok(())
    }

    /// Nearest-neighbour bonds. A periodic chain closes the ring only for N ≥ 3,
    /// so no bond is ever listed twice.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut bonds: Vec<_> = (0..n.saturating_sub(1)).map(|k| (k, k + 1)).collect();
        if self.geometry == Geometry::PeriodicChain && n >= 3 {
            bonds.push((n - 1, 0));
        }
        bonds
    }

    /// Lattice distance between two sites (minimum image on a ring).
    pub fn distance(&self, x: usize, y: usize) -> usize {
        let d = x.abs_diff(y);
        match self.geometry {
            Geometry::OpenChain => d,
            Geometry::PeriodicChain => d.min(self.n_sites - d),
        }
    }

    /// Largest distance realised by any pair of sites.
    pub fn max_distance(&self) -> usize {
        match self.geometry {
            Geometry::OpenChain => self.n_sites - 1,
            Geometry::PeriodicChain => self.n_sites / 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_enforced() {
        assert!(LatticeSpec::open(14).is_ok());
        assert!(matches!(LatticeSpec::open(15), Err(crate::Error::Size(_))));
        assert!(LatticeSpec::with_cap(16, Geometry::OpenChain, 16).is_ok());
        assert!(LatticeSpec::with_cap(4, Geometry::OpenChain, 99).is_err());
        assert!(LatticeSpec::open(0).is_err());
    }

    #[test]
    fn bonds_and_distances() {
        let open = LatticeSpec::open(4).unwrap();
        assert_eq!(open.bonds(), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(open.distance(0, 3), 3);
        let ring = LatticeSpec::periodic(4).unwrap();
        assert_eq!(ring.bonds().len(), 4);
        assert_eq!(ring.distance(0, 3), 1);
        assert_eq!(ring.max_distance(), 2);
        assert_eq!(LatticeSpec::periodic(2).unwrap().bonds(), vec![(0, 1)]);
    }
}
