//! Structured grids of representative points on the test domains.

use crate::domain::DomainId;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::rng::PointRng;

/// Boundary classification of a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Genuine interior representative point (owns a control volume).
    Interior,
    /// Point on `Γ` owning a boundary control volume whose representative
    /// point lies on its `Γ`-face.
    Gamma,
    /// Data point on the Dirichlet part of the boundary (no control volume).
    Dirichlet,
}

/// Structured `(I+2) x (J+2) x (K+2)` lattice of representative points.
///
/// Index `k = 0` is the `Γ` layer; all other extremal indices carry Dirichlet
/// data points. Identical `(domain, dims, amplitude, seed)` reproduce
/// bit-identical grids.
#[derive(Debug, Clone)]
pub struct RepresentativeGrid {
    pub domain: DomainId,
    pub dims: (usize, usize, usize),
    pub amplitude: f64,
    pub seed: u64,
    points: Vec<Vec3>,
    params: Vec<Vec3>,
    class: Vec<PointClass>,
}

impl RepresentativeGrid {
    pub fn n(&self) -> (usize, usize, usize) {
        (self.dims.0 + 2, self.dims.1 + 2, self.dims.2 + 2)
    }

    #[inline]
    pub fn lin(&self, i: usize, j: usize, k: usize) -> usize {
        let (ni, nj, _) = self.n();
        (k * nj + j) * ni + i
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.points[self.lin(i, j, k)]
    }

    pub fn param(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.params[self.lin(i, j, k)]
    }

    pub fn class(&self, i: usize, j: usize, k: usize) -> PointClass {
        self.class[self.lin(i, j, k)]
    }

    /// Uniform parameter spacing in each direction.
    pub fn spacing(&self) -> [f64; 3] {
        let ranges = self.domain.param_ranges();
        let n = [self.dims.0, self.dims.1, self.dims.2];
        [0, 1, 2].map(|d| (ranges[d].1 - ranges[d].0) / (n[d] + 1) as f64)
    }
}

/// Generates a (possibly perturbed) structured grid on the given domain.
///
/// Points sit at uniform parameter spacing; the perturbation displaces each
/// parameter component by a uniform draw in
/// `(-amplitude * spacing, amplitude * spacing)`, zeroed in directions where
/// the index is extremal so boundary points move only tangentially to the
/// boundary.
pub fn generate_grid(
    domain: DomainId,
    dims: (usize, usize, usize),
    amplitude: f64,
    seed: u64,
) -> Result<RepresentativeGrid> {
    if dims.0 < 2 || dims.1 < 2 || dims.2 < 2 {
        return Err(Error::InvalidDims(dims));
    }
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidAmplitude(amplitude));
    }

    let (ni, nj, nk) = (dims.0 + 2, dims.1 + 2, dims.2 + 2);
    let ranges = domain.param_ranges();
    let spacing = [
        (ranges[0].1 - ranges[0].0) / (dims.0 + 1) as f64,
        (ranges[1].1 - ranges[1].0) / (dims.1 + 1) as f64,
        (ranges[2].1 - ranges[2].0) / (dims.2 + 1) as f64,
    ];

    let mut points = Vec::with_capacity(ni * nj * nk);
    let mut params = Vec::with_capacity(ni * nj * nk);
    let mut class = Vec::with_capacity(ni * nj * nk);

    for k in 0..nk {
        for j in 0..nj {
            for i in 0..ni {
                let idx = [i, j, k];
                let max = [ni - 1, nj - 1, nk - 1];
                let mut rng = PointRng::new(i, j, k, seed);
                let mut w = Vec3::zeros();
                for d in 0..3 {
                    let base = ranges[d].0 + idx[d] as f64 * spacing[d];
                    let extremal = idx[d] == 0 || idx[d] == max[d];
                    let jitter = amplitude * spacing[d] * rng.next_symmetric();
                    w[d] = if extremal { base } else { base + jitter };
                }
                let c = if k == 0 && i >= 1 && i <= dims.0 && j >= 1 && j <= dims.1 {
                    PointClass::Gamma
                } else if i == 0
                    || i == max[0]
                    || j == 0
                    || j == max[1]
                    || k == 0
                    || k == max[2]
                {
                    PointClass::Dirichlet
                } else {
                    PointClass::Interior
                };
                params.push(w);
                points.push(domain.map(w));
                class.push(c);
            }
        }
    }

    Ok(RepresentativeGrid {
        domain,
        dims,
        amplitude,
        seed,
        points,
        params,
        class,
    })
}
