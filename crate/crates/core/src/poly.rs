//! Complex polynomials: evaluation, composition, critical points, roots and
//! certified escape radii.
//!
//! Coefficients are stored constant term first. Everything is `f64`; the
//! tolerances quoted on each function are the ones the tests hold us to.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Smallest modulus accepted for a leading coefficient.
pub const LEADING_EPS: f64 = 1e-300;
/// Default cap on the degree of an explicitly expanded composite.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

const ROOT_MAX_ITER: usize = 800;
const ROOT_RESTARTS: u64 = 8;
const RADIUS_SAMPLES: usize = 4096;
const RADIUS_MAX_DOUBLINGS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

/// Critical points (roots of the derivative, with multiplicity) and their
/// finite images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    pub critical_points: Vec<C64>,
    pub critical_values_finite: Vec<C64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients `c0..cd`. Trailing coefficients
    /// with modulus at most [`LEADING_EPS`] are dropped; the result must have
    /// degree at least one.
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() <= LEADING_EPS) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Precondition("polynomial must have degree >= 1".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// `z^d`
    pub fn monomial(d: usize, scale: C64) -> Result<Self> {
        let mut c = vec![C64::new(0.0, 0.0); d + 1];
        c[d] = scale;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.degree()]
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        let tol = 1e-14 * self.scale();
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    /// Horner evaluation without the finiteness check. Hot loops use this and
    /// compare the modulus against an escape radius, which also catches
    /// infinities and NaN (NaN compares false, so callers test `!(m <= r)`).
    #[inline]
    pub fn apply(&self, z: C64) -> C64 {
        let mut acc = self.coeffs[self.coeffs.len() - 1];
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation; a non-finite result is reported as [`Error::Overflow`].
    pub fn eval(&self, z: C64) -> Result<C64> {
        let w = self.apply(z);
        if w.re.is_finite() && w.im.is_finite() {
            Ok(w)
        } else {
            Err(Error::Overflow)
        }
    }

    /// Value and first derivative in one Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let n = self.coeffs.len();
        let mut p = self.coeffs[n - 1];
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs[..n - 1].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Derivative. Panics never; a degree-1 input yields a constant, which is
    /// not a valid `Polynomial`, so this returns the raw coefficient list.
    pub fn derivative_coeffs(&self) -> Vec<C64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect()
    }

    pub fn derivative(&self) -> Result<Self> {
        Self::new(self.derivative_coeffs())
    }

    /// `self - w`, used for inverse branches.
    pub fn shifted(&self, w: C64) -> Self {
        let mut c = self.coeffs.clone();
        c[0] -= w;
        Self { coeffs: c }
    }

    fn mul_coeffs(a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// `self ∘ inner` with the default degree cap.
    pub fn compose(&self, inner: &Polynomial) -> Result<Self> {
        self.compose_capped(inner, DEFAULT_DEGREE_CAP)
    }

    pub fn compose_capped(&self, inner: &Polynomial, cap: usize) -> Result<Self> {
        let degree = self.degree() * inner.degree();
        if degree > cap {
            return Err(Error::DegreeOverflow { degree, cap });
        }
        let mut acc = vec![self.leading()];
        for c in self.coeffs.iter().rev().skip(1) {
            acc = Self::mul_coeffs(&acc, &inner.coeffs);
            acc[0] += c;
        }
        Self::new(acc)
    }

    /// Critical points with multiplicity and the finite critical values.
    pub fn critical_data(&self) -> Result<CriticalData> {
        if self.degree() < 2 {
            return Err(Error::Precondition("critical data needs degree >= 2".into()));
        }
        let dp = self.derivative()?;
        let critical_points = dp.roots()?;
        let critical_values_finite = critical_points.iter().map(|&z| self.apply(z)).collect();
        Ok(CriticalData { critical_points, critical_values_finite })
    }

    /// Residual bound a root `r` must satisfy.
    pub fn residual_bound(&self, r: C64) -> f64 {
        1e-9 * self.scale() * r.norm().max(1.0).powi(self.degree() as i32)
    }

    /// All roots with multiplicity (Aberth-Ehrlich simultaneous iteration).
    pub fn roots(&self) -> Result<Vec<C64>> {
        let zero = C64::new(0.0, 0.0);
        // Exact zeros at the origin are split off so the iteration never has
        // to resolve a multiple root at 0.
        let lead_zeros = self.coeffs.iter().take_while(|c| **c == zero).count();
        let mut out = vec![zero; lead_zeros];
        let reduced = &self.coeffs[lead_zeros..];
        match reduced.len() - 1 {
            0 => {}
            1 => out.push(-reduced[0] / reduced[1]),
            2 => {
                let (c, b, a) = (reduced[0], reduced[1], reduced[2]);
                let disc = (b * b - a * c * 4.0).sqrt();
                // pick the sign that avoids cancellation
                let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
                if q == zero {
                    out.push(zero);
                    out.push(zero);
                } else {
                    out.push(q / a);
                    out.push(c / q);
                }
            }
            _ => out.extend(aberth(reduced)?),
        }
        for r in &out {
            let res = self.apply(*r).norm();
            if !(res <= self.residual_bound(*r)) {
                return Err(Error::Numeric(format!(
                    "root {r} residual {res:e} exceeds bound {:e}",
                    self.residual_bound(*r)
                )));
            }
        }
        Ok(out)
    }

    /// Roots of `self(z) = z`.
    pub fn fixed_points(&self) -> Result<Vec<C64>> {
        let mut c = self.coeffs.clone();
        c[1] -= C64::new(1.0, 0.0);
        Polynomial::new(c)?.roots()
    }

    /// Smallest `r` such that the triangle-inequality lower bound gives
    /// `|h(z)| >= 2|z|` for every `|z| >= r`.
    fn growth_radius(&self) -> f64 {
        let d = self.degree();
        let mut a: Vec<f64> = self.coeffs.iter().map(|c| -c.norm()).collect();
        a[d] = -a[d];
        a[1] -= 2.0;
        // one sign change in a => exactly one positive root
        let f = |r: f64| a.iter().rev().fold(0.0, |acc, c| acc * r + c);
        let mut hi = 1.0;
        while f(hi) <= 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi * (1.0 + 1e-9)
    }
}

fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let d = coeffs.len() - 1;
    let p = Polynomial { coeffs: coeffs.to_vec() };
    let lead = coeffs[d].norm();
    // Cauchy-style mean radius for the starting circle.
    let base_radius = (coeffs[0].norm() / lead).powf(1.0 / d as f64).max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_a6e7);
    for attempt in 0..ROOT_RESTARTS {
        let (radius, offset) = if attempt == 0 {
            (base_radius, 0.4)
        } else {
            (base_radius * rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU))
        };
        let mut z: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(radius, offset + std::f64::consts::TAU * k as f64 / d as f64))
            .collect();
        for _ in 0..ROOT_MAX_ITER {
            let mut max_step: f64 = 0.0;
            for k in 0..d {
                let (pv, dpv) = p.eval_with_derivative(z[k]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dpv;
                let mut s = C64::new(0.0, 0.0);
                for j in 0..d {
                    if j != k {
                        s += (z[k] - z[j]).inv();
                    }
                }
                let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
                } else {
                    // coincident iterates; nudge apart
                    z[k] += C64::new(rng.random_range(-1e-6..1e-6), rng.random_range(-1e-6..1e-6)) * radius;
                    max_step = f64::INFINITY;
                }
            }
            if max_step <= 1e-14 {
                break;
            }
        }
        // multiple roots converge linearly and may stall above the step
        // threshold while already meeting the residual bound
        if z.iter().all(|r| p.apply(*r).norm() <= p.residual_bound(*r)) {
            return Ok(z);
        }
    }
    Err(Error::Numeric(format!("root finder did not converge for degree {d}")))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&format_complex(*c))?;
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s.split_whitespace().map(parse_complex).collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        Polynomial::new(coeffs)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a+bi` with 17 significant digits in each part.
pub fn format_complex(c: C64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", c.re, sign, c.im.abs())
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, exponents).
pub fn parse_complex(s: &str) -> Result<C64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad complex literal {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().map_err(|_| bad())?;
                Ok(C64::new(re, num(&body[k..])?))
            }
            None => Ok(C64::new(0.0, num(body)?)),
        }
    } else {
        Ok(C64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// Common escape radius for a generator family: for every generator `h` and
/// every `|z| >= R`, `|h(z)| >= 2|z|`. Validated on 4096 samples of `|z| = R`,
/// doubling `R` on failure.
pub fn escape_radius(gens: &[Polynomial]) -> Result<f64> {
    if gens.is_empty() {
        return Err(Error::Config("empty generator list".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.degree() < 2) {
        return Err(Error::Precondition(format!("generator of degree {} < 2", g.degree())));
    }
    let mut r = gens.iter().map(Polynomial::growth_radius).fold(0.0, f64::max);
    for _ in 0..=RADIUS_MAX_DOUBLINGS {
        if validate_growth(gens, r) {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Config("escape radius validation failed after 60 doublings".into()))
}

/// `|h(z)| >= 2|z|` on 4096 equally spaced points of `|z| = r`, all `h`.
pub fn validate_growth(gens: &[Polynomial], r: f64) -> bool {
    (0..RADIUS_SAMPLES).all(|k| {
        let z = C64::from_polar(r, std::f64::consts::TAU * k as f64 / RADIUS_SAMPLES as f64);
        gens.iter().all(|h| h.apply(z).norm() >= 2.0 * r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn p(re: &[f64]) -> Polynomial {
        Polynomial::from_real(re).unwrap()
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[-1.0, 0.0, 1.0]).eval(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
        assert_eq!(p(&[0.0, 0.0, 1.0]).eval(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(p(&[0.0, 0.0, 0.25]).eval(c(4.0, 0.0)).unwrap(), c(4.0, 0.0));
    }

    #[test]
    fn eval_overflow_is_error() {
        let q = Polynomial::monomial(32, c(1.0, 0.0)).unwrap();
        assert_eq!(q.eval(c(1e100, 0.0)), Err(Error::Overflow));
    }

    #[test]
    fn rejects_constant_and_nonfinite() {
        assert!(Polynomial::from_real(&[1.0]).is_err());
        assert!(Polynomial::from_real(&[1.0, 0.0]).is_err());
        assert!(Polynomial::from_real(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn compose_examples() {
        let z2 = p(&[0.0, 0.0, 1.0]);
        assert_eq!(z2.compose(&z2).unwrap().coeffs(), p(&[0.0, 0.0, 0.0, 0.0, 1.0]).coeffs());
        let g1 = p(&[-1.0, 0.0, 1.0]);
        assert_eq!(g1.compose(&g1).unwrap(), p(&[0.0, 0.0, -2.0, 0.0, 1.0]));
        let g2 = p(&[0.0, 0.0, 0.25]);
        assert_eq!(g2.compose(&g2).unwrap(), p(&[0.0, 0.0, 0.0, 0.0, 1.0 / 64.0]));
    }

    #[test]
    fn compose_degree_cap() {
        let z2 = p(&[0.0, 0.0, 1.0]);
        let z64 = Polynomial::monomial(64, c(1.0, 0.0)).unwrap();
        let z4096 = z64.compose(&z64).unwrap();
        assert_eq!(z4096.degree(), 4096);
        assert_eq!(z4096.compose(&z2), Err(Error::DegreeOverflow { degree: 8192, cap: 4096 }));
    }

    #[test]
    fn critical_data_examples() {
        let cd = p(&[0.0, 0.0, 1.0]).critical_data().unwrap();
        assert_eq!(cd.critical_points, vec![c(0.0, 0.0)]);
        assert_eq!(cd.critical_values_finite, vec![c(0.0, 0.0)]);

        let cd = p(&[-1.0, 0.0, 1.0]).critical_data().unwrap();
        assert!(cd.critical_points[0].norm() < 1e-15);
        assert!((cd.critical_values_finite[0] - c(-1.0, 0.0)).norm() < 1e-15);

        // (z^2-1)^2-1 = z^4 - 2z^2, derivative 4z(z^2-1)
        let cd = p(&[0.0, 0.0, -2.0, 0.0, 1.0]).critical_data().unwrap();
        let pts = sorted(cd.critical_points);
        for (got, want) in pts.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12, "{got}");
        }
        for v in cd.critical_values_finite {
            assert!((v - c(0.0, 0.0)).norm() < 1e-12 || (v - c(-1.0, 0.0)).norm() < 1e-12, "{v}");
        }
    }

    #[test]
    fn critical_data_needs_degree_two() {
        assert!(p(&[1.0, 2.0]).critical_data().is_err());
    }

    #[test]
    fn roots_examples() {
        let r = sorted(p(&[-1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14 && (r[1] - c(1.0, 0.0)).norm() < 1e-14);
        let r = sorted(p(&[1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14 && (r[1] - c(0.0, 1.0)).norm() < 1e-14);
        // (z^2-1)^2 = 1  <=>  z^2 in {0, 2}
        let r = sorted(p(&[0.0, 0.0, -2.0, 0.0, 1.0]).roots().unwrap());
        let want = [-(2f64.sqrt()), 0.0, 0.0, 2f64.sqrt()];
        for (got, w) in r.iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn roots_of_shifted_quartic() {
        let q = p(&[0.0, 0.0, 0.0, 0.0, 1.0 / 64.0]).shifted(c(2.0, 1.0));
        let r = q.roots().unwrap();
        assert_eq!(r.len(), 4);
        for z in r {
            assert!((z.powu(4) / 64.0 - c(2.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn escape_radius_examples() {
        let r = escape_radius(&[p(&[0.0, 0.0, 1.0])]).unwrap();
        assert!(r >= 2.0 && r < 2.0 + 1e-6);
        let r = escape_radius(&[p(&[-1.0, 0.0, 1.0])]).unwrap();
        assert!(r >= 1.0 + 2f64.sqrt() && r < 2.5);
        let gens = [p(&[0.0, 0.0, -2.0, 0.0, 1.0]), p(&[0.0, 0.0, 0.0, 0.0, 1.0 / 64.0])];
        let r = escape_radius(&gens).unwrap();
        // z^4/64 >= 2|z| iff |z|^3 >= 128
        assert!(r >= 128f64.cbrt() && r < 128f64.cbrt() + 1e-6);
        assert!(validate_growth(&gens, r));
    }

    #[test]
    fn escape_radius_rejects_linear() {
        assert!(escape_radius(&[p(&[0.0, 2.0])]).is_err());
        assert!(escape_radius(&[]).is_err());
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), c(0.0, -2.5));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E+2i").unwrap(), c(1e-3, 200.0));
        assert_eq!(parse_complex("-1.5e2-3e-1i").unwrap(), c(-150.0, -0.3));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        let q: Polynomial = "-1 0 1".parse().unwrap();
        assert_eq!(q, p(&[-1.0, 0.0, 1.0]));
        assert!("1 x".parse::<Polynomial>().is_err());
    }

    fn arb_coeff() -> impl Strategy<Value = C64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
        (1..=max_deg).prop_flat_map(|d| {
            (prop::collection::vec(arb_coeff(), d), arb_coeff()).prop_filter_map("leading", |(mut v, lead)| {
                if lead.norm() < 0.1 {
                    return None;
                }
                v.push(lead);
                Polynomial::new(v).ok()
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(q in arb_poly(8)) {
            let back: Polynomial = q.to_string().parse().unwrap();
            prop_assert_eq!(back, q);
        }

        #[test]
        fn compose_agrees_with_nested_eval(a in arb_poly(4), b in arb_poly(4), seed in any::<u64>()) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.degree(), a.degree() * b.degree());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..128 {
                let z = C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
                let direct = a.apply(b.apply(z));
                let expanded = ab.apply(z);
                prop_assert!((direct - expanded).norm() <= 1e-8 * direct.norm().max(1.0));
            }
        }

        #[test]
        fn roots_meet_residual_bound(q in arb_poly(12)) {
            let rs = q.roots().unwrap();
            prop_assert_eq!(rs.len(), q.degree());
            for r in rs {
                prop_assert!(q.apply(r).norm() < q.residual_bound(r));
            }
        }

        #[test]
        fn critical_points_are_roots_of_derivative(q in arb_poly(10)) {
            prop_assume!(q.degree() >= 2);
            let cd = q.critical_data().unwrap();
            let dp = q.derivative().unwrap();
            prop_assert_eq!(cd.critical_points.len(), q.degree() - 1);
            for z in cd.critical_points {
                prop_assert!(dp.apply(z).norm() < 1e-8 * dp.scale() * z.norm().max(1.0).powi(dp.degree() as i32));
            }
        }

        #[test]
        fn escape_radius_growth_holds(q in arb_poly(6), w in arb_poly(6)) {
            prop_assume!(q.degree() >= 2 && w.degree() >= 2);
            let gens = [q, w];
            let r = escape_radius(&gens).unwrap();
            prop_assert!(validate_growth(&gens, r));
            prop_assert!(validate_growth(&gens, 1.7 * r));
        }
    }
}
