//! Discretized singular spaces.
//!
//! A space is `M` copies ("sheets") of a `D`-dimensional square/cubic grid of
//! linear extent `L`, all sharing one site: the junction. Each sheet's origin
//! is identified with the junction, so the graph has `M·L^D − M + 1` sites and
//! the junction has `2·M·D` neighbours. With `M = 1` the same construction is a
//! plain lattice whose center can carry an on-site potential.
//!
//! Coordinates live in the window `[−⌊L/2⌋, −⌊L/2⌋ + L)` on every axis, so the
//! junction sits at the all-zero coordinate. Under periodic boundaries the
//! window coordinate is already the minimum-image displacement from the
//! junction.
//!
//! Site numbering: the junction is site 0; the remaining sites follow in
//! (sheet, lexicographic coordinate) order.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::InvalidSpec(format!(
                "unknown boundary `{other}` (expected periodic or open)"
            ))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

/// Declarative description of a (possibly singular) space.
///
/// `potential` is the strength `g` (units of `t`) of an attractive on-site
/// potential at the center site; it is only allowed on smooth spaces (`M = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dim: usize,
    pub extent: usize,
    pub degree: usize,
    pub boundary: Boundary,
    pub potential: f64,
}

impl SpaceSpec {
    /// `M` sheets of dimension `D` glued at one point, periodic boundaries.
    pub fn singular(dim: usize, extent: usize, degree: usize) -> Self {
        Self {
            dim,
            extent,
            degree,
            boundary: Boundary::Periodic,
            potential: 0.0,
        }
    }

    /// A single smooth sheet with an attractive potential `g` at its center.
    pub fn with_potential(dim: usize, extent: usize, g: f64) -> Self {
        Self {
            dim,
            extent,
            degree: 1,
            boundary: Boundary::Periodic,
            potential: g,
        }
    }

    pub fn boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidSpec(format!(
                "dimension must be 1, 2 or 3 (got {})",
                self.dim
            )));
        }
        if self.extent < 3 {
            return Err(Error::InvalidSpec(format!(
                "extent must be at least 3 (got {})",
                self.extent
            )));
        }
        if self.degree < 1 {
            return Err(Error::InvalidSpec("degree must be at least 1".into()));
        }
        if !self.potential.is_finite() || self.potential < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "potential strength must be finite and non-negative (got {})",
                self.potential
            )));
        }
        if self.potential > 0.0 && self.degree >= 2 {
            return Err(Error::InvalidSpec(format!(
                "a singular space (degree {}) carries no potential; got g = {}",
                self.degree, self.potential
            )));
        }
        Ok(())
    }

    /// Sites per sheet, `L^D`.
    pub fn sheet_sites(&self) -> usize {
        self.extent.pow(self.dim as u32)
    }

    /// `M·L^D − M + 1`.
    pub fn site_count(&self) -> usize {
        self.degree * self.sheet_sites() - self.degree + 1
    }

    /// Whether this spec describes a singularity rather than a smooth space.
    pub fn is_singular(&self) -> bool {
        self.degree >= 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteGeometry {
    /// `None` for the junction, which belongs to every sheet.
    pub sheet: Option<u32>,
    coords: [i32; 3],
    /// Exact squared distance from the junction.
    pub radius_sq: u32,
    pub radius: f64,
}

impl SiteGeometry {
    fn new(sheet: Option<u32>, coords: [i32; 3]) -> Self {
        let radius_sq = coords.iter().map(|c| (c * c) as u32).sum::<u32>();
        Self {
            sheet,
            coords,
            radius_sq,
            radius: (radius_sq as f64).sqrt(),
        }
    }
}

/// Immutable site graph with per-site geometry.
///
/// Adjacency is stored row-compressed; every neighbour list is sorted.
#[derive(Debug, Clone)]
pub struct SpaceGraph {
    spec: SpaceSpec,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    geometry: Vec<SiteGeometry>,
}

pub const JUNCTION: usize = 0;

impl SpaceGraph {
    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn site_count(&self) -> usize {
        self.geometry.len()
    }

    pub fn junction_site(&self) -> usize {
        JUNCTION
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[self.offsets[site]..self.offsets[site + 1]]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.offsets[site + 1] - self.offsets[site]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn geometry(&self, site: usize) -> &SiteGeometry {
        &self.geometry[site]
    }

    pub fn coords(&self, site: usize) -> &[i32] {
        &self.geometry[site].coords[..self.spec.dim]
    }

    pub fn radius(&self, site: usize) -> f64 {
        self.geometry[site].radius
    }

    /// Row-compressed adjacency `(offsets, neighbours)`.
    pub fn csr(&self) -> (&[usize], &[usize]) {
        (&self.offsets, &self.neighbors)
    }

    /// Site id of `coords` on `sheet`, if it lies inside the window.
    ///
    /// The all-zero coordinate maps to the junction for every sheet.
    pub fn site_at(&self, sheet: usize, coords: &[i32]) -> Option<usize> {
        let layout = Layout::new(&self.spec);
        if sheet >= self.spec.degree || coords.len() != self.spec.dim {
            return None;
        }
        let mut c = [0i32; 3];
        for (d, &x) in coords.iter().enumerate() {
            if x < layout.lo || x >= layout.lo + layout.extent as i32 {
                return None;
            }
            c[d] = x;
        }
        Some(layout.global(sheet, layout.local_index(&c)))
    }

    /// Debug dump: `site_id,sheet,x[,y[,z]],degree`. The junction's sheet is -1.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let axes = ["x", "y", "z"];
        write!(out, "site_id,sheet")?;
        for axis in &axes[..self.spec.dim] {
            write!(out, ",{axis}")?;
        }
        writeln!(out, ",degree")?;
        for site in 0..self.site_count() {
            let sheet = self.geometry[site].sheet.map_or(-1, |s| s as i64);
            write!(out, "{site},{sheet}")?;
            for c in self.coords(site) {
                write!(out, ",{c}")?;
            }
            writeln!(out, ",{}", self.degree(site))?;
        }
        Ok(())
    }
}

/// Index arithmetic for one sheet's coordinate window.
struct Layout {
    dim: usize,
    extent: usize,
    lo: i32,
    origin_local: usize,
    sheet_sites: usize,
    periodic: bool,
}

impl Layout {
    fn new(spec: &SpaceSpec) -> Self {
        let lo = -((spec.extent / 2) as i32);
        let mut layout = Self {
            dim: spec.dim,
            extent: spec.extent,
            lo,
            origin_local: 0,
            sheet_sites: spec.sheet_sites(),
            periodic: spec.boundary == Boundary::Periodic,
        };
        layout.origin_local = layout.local_index(&[0, 0, 0]);
        layout
    }

    fn local_index(&self, c: &[i32; 3]) -> usize {
        c[..self.dim]
            .iter()
            .fold(0, |acc, &x| acc * self.extent + (x - self.lo) as usize)
    }

    fn local_coords(&self, mut index: usize) -> [i32; 3] {
        let mut c = [0i32; 3];
        for d in (0..self.dim).rev() {
            c[d] = (index % self.extent) as i32 + self.lo;
            index /= self.extent;
        }
        c
    }

    fn global(&self, sheet: usize, local: usize) -> usize {
        use std::cmp::Ordering;
        match local.cmp(&self.origin_local) {
            Ordering::Equal => JUNCTION,
            Ordering::Less => 1 + sheet * (self.sheet_sites - 1) + local,
            Ordering::Greater => sheet * (self.sheet_sites - 1) + local,
        }
    }

    /// Neighbour coordinate along `axis` in direction `step`, if it exists.
    fn shift(&self, c: &[i32; 3], axis: usize, step: i32) -> Option<[i32; 3]> {
        let hi = self.lo + self.extent as i32;
        let mut n = *c;
        n[axis] += step;
        if n[axis] < self.lo || n[axis] >= hi {
            if !self.periodic {
                return None;
            }
            n[axis] = if n[axis] < self.lo { hi - 1 } else { self.lo };
        }
        Some(n)
    }

    fn push_neighbors(&self, sheet: usize, c: &[i32; 3], out: &mut Vec<usize>) {
        for axis in 0..self.dim {
            for step in [-1, 1] {
                if let Some(n) = self.shift(c, axis, step) {
                    out.push(self.global(sheet, self.local_index(&n)));
                }
            }
        }
    }
}

pub fn build_space(spec: &SpaceSpec) -> Result<SpaceGraph> {
    spec.validate()?;
    let layout = Layout::new(spec);
    let n = spec.site_count();

    let mut geometry = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n + 1);
    let mut neighbors = Vec::with_capacity(2 * spec.dim * n);
    let mut row = Vec::with_capacity(2 * spec.dim * spec.degree);

    offsets.push(0);
    geometry.push(SiteGeometry::new(None, [0; 3]));
    for sheet in 0..spec.degree {
        layout.push_neighbors(sheet, &[0; 3], &mut row);
    }
    row.sort_unstable();
    neighbors.extend_from_slice(&row);
    offsets.push(neighbors.len());

    for sheet in 0..spec.degree {
        for local in 0..layout.sheet_sites {
            if local == layout.origin_local {
                continue;
            }
            let c = layout.local_coords(local);
            geometry.push(SiteGeometry::new(Some(sheet as u32), c));
            row.clear();
            layout.push_neighbors(sheet, &c, &mut row);
            row.sort_unstable();
            neighbors.extend_from_slice(&row);
            offsets.push(neighbors.len());
        }
    }
    debug_assert_eq!(geometry.len(), n);

    Ok(SpaceGraph {
        spec: *spec,
        offsets,
        neighbors,
        geometry,
    })
}

/// The bonds incident on the junction (or potential) site, as `(junction, neighbour)`.
pub fn junction_bonds(graph: &SpaceGraph) -> Vec<(usize, usize)> {
    let j = graph.junction_site();
    graph.neighbors(j).iter().map(|&n| (j, n)).collect()
}
