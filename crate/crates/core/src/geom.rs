//! Point-set distances on a uniform hash grid.

use std::collections::HashMap;

use crate::poly::C64;

/// Uniform bucket grid for nearest-neighbour queries.
pub struct PointIndex<'a> {
    points: &'a [C64],
    bucket: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl<'a> PointIndex<'a> {
    pub fn new(points: &'a [C64], bucket: f64) -> Self {
        assert!(bucket > 0.0);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (k, z) in points.iter().enumerate() {
            buckets.entry(Self::key_of(*z, bucket)).or_default().push(k as u32);
        }
        Self { points, bucket, buckets }
    }

    fn key_of(z: C64, bucket: f64) -> (i64, i64) {
        ((z.re / bucket).floor() as i64, (z.im / bucket).floor() as i64)
    }

    /// Distance to the nearest indexed point, searching rings out to
    /// `max_rings` buckets; `f64::INFINITY` if nothing is that close.
    pub fn nearest_distance(&self, z: C64, max_rings: i64) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let (ki, kj) = Self::key_of(z, self.bucket);
        let mut best = f64::INFINITY;
        for ring in 0..=max_rings {
            // anything in ring r is at least (r-1)*bucket away
            if best <= (ring as f64 - 1.0).max(0.0) * self.bucket {
                break;
            }
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    if let Some(v) = self.buckets.get(&(ki + di, kj + dj)) {
                        for &k in v {
                            best = best.min((self.points[k as usize] - z).norm());
                        }
                    }
                }
            }
        }
        best
    }

    /// Indices of points within `radius` of `z`.
    pub fn within(&self, z: C64, radius: f64) -> Vec<u32> {
        let rings = (radius / self.bucket).ceil() as i64;
        let (ki, kj) = Self::key_of(z, self.bucket);
        let mut out = Vec::new();
        for di in -rings..=rings {
            for dj in -rings..=rings {
                if let Some(v) = self.buckets.get(&(ki + di, kj + dj)) {
                    out.extend(v.iter().copied().filter(|&k| (self.points[k as usize] - z).norm() <= radius));
                }
            }
        }
        out
    }
}

/// Largest distance from a point of `a` to the set `b`, computed with
/// buckets of size `scale`. Distances beyond `cap_scales * scale` are
/// reported as infinity.
pub fn directed_hausdorff(a: &[C64], b: &[C64], scale: f64, cap_scales: i64) -> f64 {
    use rayon::prelude::*;
    let index = PointIndex::new(b, scale);
    a.par_iter().map(|z| index.nearest_distance(*z, cap_scales)).reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance; see [`directed_hausdorff`].
pub fn hausdorff(a: &[C64], b: &[C64], scale: f64, cap_scales: i64) -> f64 {
    directed_hausdorff(a, b, scale, cap_scales).max(directed_hausdorff(b, a, scale, cap_scales))
}

/// Smallest distance between any point of `a` and any point of `b`.
pub fn min_distance(a: &[C64], b: &[C64], scale: f64) -> f64 {
    use rayon::prelude::*;
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let index = PointIndex::new(b, scale);
    let near = a.par_iter().map(|z| index.nearest_distance(*z, 4)).reduce(|| f64::INFINITY, f64::min);
    if near.is_finite() {
        return near;
    }
    // far apart: brute force
    a.par_iter()
        .map(|z| b.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}
