//! Connected-component census of joint level sets {H = h, C = c}.
//!
//! A fiber is rasterized over a cube: a grid cell is marked when the
//! smallest of max(|H - h|, |C - c|) over its eight corners and center
//! drops below a slab thickness scaled by the largest local gradient
//! size, so the marked set thickens the fiber uniformly instead of
//! pinching where the level functions are steep. Face-adjacent marked
//! cells are then merged with union-find. Components that never touch
//! the middle 80% of the box are wall shells of branches that merely
//! leave the cube, and are discarded; what remains is the component
//! count of the fiber itself, stable under grid refinement.
//!
//! Marking is embarrassingly parallel in the z slabs; labeling streams
//! two slabs at a time, so memory stays at O(cells per slab).

use crate::ec::{classify, fiber_seed, ECValue, Stratum};
use crate::integrator::{drift_report, integrate, IntegratorSettings};
use crate::model;
use crate::poisson::State;
use crate::{Error, Result};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSettings {
    /// Half the cube edge; the box is [-half_width, half_width]^3.
    pub half_width: f64,
    pub cells_per_axis: usize,
    /// Override for the slab thickness; None picks 1.5 cell diagonals.
    pub thickness: Option<f64>,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            half_width: 6.0,
            cells_per_axis: 161,
            thickness: None,
        }
    }
}

impl GridSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidGrid("half_width must be positive and finite"));
        }
        if self.cells_per_axis < 41 {
            return Err(Error::InvalidGrid("cells_per_axis must be at least 41"));
        }
        if let Some(t) = self.thickness {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidGrid("thickness must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn cell_side(&self) -> f64 {
        2.0 * self.half_width / self.cells_per_axis as f64
    }

    pub fn effective_thickness(&self) -> f64 {
        self.thickness
            .unwrap_or(1.5 * self.cell_side() * 3.0f64.sqrt())
    }
}

/// Level-set deviation and local gradient scale at one point:
/// (max(|H - h|, |C - c|), max over both gradients of the infinity norm).
#[inline]
fn probe(h: f64, c: f64, x: f64, y: f64, z: f64) -> (f64, f64) {
    let hv = x * y - x * z;
    let cv = y * z - x * y;
    let val = (hv - h).abs().max((cv - c).abs());
    // grad H = (y - z, x, -x), grad C = (-y, z - x, y)
    let g = (y - z).abs().max(x.abs()).max(y.abs()).max((z - x).abs());
    (val, g)
}

fn vertex_plane(h: f64, c: f64, b: f64, s: f64, n: usize, k: usize) -> Vec<(f64, f64)> {
    let z = -b + k as f64 * s;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        let x = -b + i as f64 * s;
        for j in 0..=n {
            let y = -b + j as f64 * s;
            out.push(probe(h, c, x, y, z));
        }
    }
    out
}

fn mark_slab(h: f64, c: f64, b: f64, s: f64, thick: f64, n: usize, k: usize) -> Vec<bool> {
    let p0 = vertex_plane(h, c, b, s, n, k);
    let p1 = vertex_plane(h, c, b, s, n, k + 1);
    let zc = -b + (k as f64 + 0.5) * s;
    let stride = n + 1;
    let mut out = vec![false; n * n];
    for i in 0..n {
        let xc = -b + (i as f64 + 0.5) * s;
        for j in 0..n {
            let yc = -b + (j as f64 + 0.5) * s;
            let (mut vmin, mut gmax) = probe(h, c, xc, yc, zc);
            for plane in [&p0, &p1] {
                for (v, g) in [
                    plane[i * stride + j],
                    plane[(i + 1) * stride + j],
                    plane[i * stride + j + 1],
                    plane[(i + 1) * stride + j + 1],
                ] {
                    vmin = vmin.min(v);
                    gmax = gmax.max(g);
                }
            }
            out[i * n + j] = vmin < thick * (1.0 + gmax);
        }
    }
    out
}

struct DisjointSet {
    parent: Vec<u32>,
    core: Vec<bool>,
}

impl DisjointSet {
    fn new() -> Self {
        DisjointSet {
            parent: Vec::new(),
            core: Vec::new(),
        }
    }

    /// New singleton; labels are 1-based so 0 can mean "unmarked".
    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.core.push(false);
        id + 1
    }

    fn find(&mut self, label: u32) -> u32 {
        let mut i = (label - 1) as usize;
        while self.parent[i] as usize != i {
            let gp = self.parent[self.parent[i] as usize];
            self.parent[i] = gp;
            i = gp as usize;
        }
        i as u32 + 1
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = (self.find(a) - 1) as usize;
        let rb = (self.find(b) - 1) as usize;
        if ra == rb {
            return;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep as u32;
        self.core[keep] = self.core[keep] || self.core[drop];
    }

    fn mark_core(&mut self, label: u32) {
        let r = (self.find(label) - 1) as usize;
        self.core[r] = true;
    }

    fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn count_core_roots(&mut self) -> usize {
        let len = self.parent.len();
        let mut count = 0;
        for i in 0..len {
            let label = i as u32 + 1;
            if self.find(label) == label && self.core[i] {
                count += 1;
            }
        }
        count
    }
}

/// Count connected components of the fiber over `v` inside the grid box.
///
/// Errors with `FiberMissesBox` when no cell is marked at all.
pub fn count_components(v: ECValue, grid: &GridSettings) -> Result<usize> {
    grid.validate()?;
    let n = grid.cells_per_axis;
    let b = grid.half_width;
    let s = grid.cell_side();
    let thick = grid.effective_thickness();

    let marks: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|k| mark_slab(v.h, v.c, b, s, thick, n, k))
        .collect();

    let shell = n / 10;
    let core = shell..(n - shell);

    let mut ds = DisjointSet::new();
    let mut prev: Vec<u32> = vec![0; n * n];
    for (k, mark) in marks.iter().enumerate() {
        let mut cur: Vec<u32> = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                if !mark[idx] {
                    continue;
                }
                let adopt = |label: &mut u32, nb: u32, ds: &mut DisjointSet| {
                    if nb == 0 {
                        return;
                    }
                    if *label == 0 {
                        *label = nb;
                    } else if *label != nb {
                        ds.union(*label, nb);
                    }
                };
                let mut label = 0u32;
                if i > 0 {
                    adopt(&mut label, cur[idx - n], &mut ds);
                }
                if j > 0 {
                    adopt(&mut label, cur[idx - 1], &mut ds);
                }
                adopt(&mut label, prev[idx], &mut ds);
                if label == 0 {
                    label = ds.make_set();
                }
                cur[idx] = label;
                if core.contains(&i) && core.contains(&j) && core.contains(&k) {
                    ds.mark_core(label);
                }
            }
        }
        prev = cur;
    }

    if ds.is_empty() {
        return Err(Error::FiberMissesBox);
    }
    Ok(ds.count_core_roots())
}

/// Census row for a stratum: fiber components, orbits the flow cuts them
/// into, and equilibria sitting on the fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TableRow {
    pub components: usize,
    pub orbits: usize,
    pub equilibria: usize,
}

pub fn table_row(stratum: Stratum) -> TableRow {
    match stratum {
        Stratum::Sigma1Star | Stratum::Sigma2 | Stratum::Sigma3Star => TableRow {
            components: 2,
            orbits: 8,
            equilibria: 2,
        },
        Stratum::Sigma0 => TableRow {
            components: 1,
            orbits: 8,
            equilibria: 1,
        },
        _ => TableRow {
            components: 4,
            orbits: 4,
            equilibria: 0,
        },
    }
}

/// Exact equilibria on the fiber over `v`; nonempty only on the starred
/// strata and at the origin.
pub fn equilibria_on_fiber(v: ECValue) -> Vec<State> {
    let point = |x: f64, y: f64, z: f64| State::new(x, y, z).expect("finite equilibrium");
    match classify(v) {
        Stratum::Sigma1Star => {
            let s = v.c.sqrt();
            vec![point(0.0, s, s), point(0.0, -s, -s)]
        }
        Stratum::Sigma2 => {
            let s = (-v.h).sqrt();
            vec![point(s, 0.0, s), point(-s, 0.0, -s)]
        }
        Stratum::Sigma3Star => {
            let s = v.h.sqrt();
            vec![point(s, s, 0.0), point(-s, -s, 0.0)]
        }
        Stratum::Sigma0 => vec![State::origin()],
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FiberReport {
    pub h: f64,
    pub c: f64,
    pub stratum: Stratum,
    pub level_set_components: usize,
    pub expected_components: usize,
    pub orbit_count: usize,
    pub equilibria: Vec<[f64; 3]>,
    /// False when the numeric count disagrees with the census row.
    pub matches_expected: bool,
}

pub fn fiber_report(v: ECValue, grid: &GridSettings) -> Result<FiberReport> {
    let stratum = classify(v);
    let row = table_row(stratum);
    let counted = count_components(v, grid)?;
    let eqs = equilibria_on_fiber(v);
    let matches_expected = counted == row.components && eqs.len() == row.equilibria;
    Ok(FiberReport {
        h: v.h,
        c: v.c,
        stratum,
        level_set_components: counted,
        expected_components: row.components,
        orbit_count: row.orbits,
        equilibria: eqs.iter().map(|p| p.coords().as_array()).collect(),
        matches_expected,
    })
}

/// Integrate from a seed on the fiber and report the worst deviation of
/// (h, c) from `v` along the trajectory; orbits stay on their fiber, so
/// this should sit at integration-noise level.
pub fn orbit_on_fiber_check(v: ECValue, t_end: f64) -> f64 {
    let seed = fiber_seed(v);
    let settings = IntegratorSettings::adaptive(1e-10, 1e-10).expect("valid settings");
    let traj = integrate(model::field_at, seed, t_end, &settings);
    let seed_dev = {
        let inv = traj.samples[0].invariants;
        (inv.h - v.h).abs().max((inv.c - v.c).abs())
    };
    let drift = drift_report(&traj);
    seed_dev + drift.h.max(drift.c)
}
