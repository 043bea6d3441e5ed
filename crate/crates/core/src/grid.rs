//! Rectangular windows of the complex plane and their cell lattices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::C64;

/// Hard cap on cells per axis.
pub const MAX_RESOLUTION: usize = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Self { re_min, re_max, im_min, im_max };
        w.validate()?;
        Ok(w)
    }

    /// `[-r, r]^2`
    pub fn square(r: f64) -> Self {
        Self { re_min: -r, re_max: r, im_min: -r, im_max: r }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_max <= self.re_min || self.im_max <= self.im_min {
            return Err(Error::Config(format!("window {self:?} must have positive extent")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// A window cut into `nx * ny` cells. Row 0 is the top (largest imaginary part).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(window: Window, nx: usize, ny: usize) -> Result<Self> {
        window.validate()?;
        if nx == 0 || ny == 0 || nx > MAX_RESOLUTION || ny > MAX_RESOLUTION {
            return Err(Error::Config(format!("resolution {nx}x{ny} outside 1..={MAX_RESOLUTION}")));
        }
        Ok(Self { window, nx, ny })
    }

    pub fn square(window: Window, n: usize) -> Result<Self> {
        Self::new(window, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.window.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.window.height() / self.ny as f64
    }

    /// The larger of the two cell extents.
    pub fn cell_size(&self) -> f64 {
        self.dx().max(self.dy())
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.window.re_min + (i as f64 + 0.5) * self.dx(),
            self.window.im_max - (j as f64 + 0.5) * self.dy(),
        )
    }

    pub fn center_of(&self, idx: usize) -> C64 {
        let (i, j) = self.coords(idx);
        self.center(i, j)
    }

    /// Cell containing `z`, if inside the window.
    pub fn locate(&self, z: C64) -> Option<(usize, usize)> {
        if !self.window.contains(z) {
            return None;
        }
        let i = (((z.re - self.window.re_min) / self.dx()) as usize).min(self.nx - 1);
        let j = (((self.window.im_max - z.im) / self.dy()) as usize).min(self.ny - 1);
        Some((i, j))
    }

    pub fn on_edge(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// 4-neighbours inside the grid.
    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.coords(idx);
        let nx = self.nx;
        let cand = [
            (i > 0).then(|| idx - 1),
            (i + 1 < nx).then(|| idx + 1),
            (j > 0).then(|| idx - nx),
            (j + 1 < self.ny).then(|| idx + nx),
        ];
        cand.into_iter().flatten()
    }
}
