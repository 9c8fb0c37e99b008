//! Möbius maps of the Riemann sphere and the generator sets that act on it.
//!
//! Every [`Moebius`] is stored with determinant one. A map is only ever
//! constructed through [`Moebius::new`], which rejects degenerate
//! coefficients, so the remaining operations are total.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Determinants closer to one than this (in each component) are left alone.
const DET_TOLERANCE: f64 = 1e-12;
/// Smallest determinant magnitude accepted as invertible.
const MIN_DET: f64 = 1e-300;
/// Relative discriminant size under which a map is treated as parabolic.
const PARABOLIC_TOLERANCE: f64 = 1e-12;
/// Tolerance for recognising the identity among normalized maps.
const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Tolerance for `g · g⁻¹ = I` when validating a generator set.
const PAIRING_TOLERANCE: f64 = 1e-9;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    Infinity,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self::from_complex(Complex64::new(re, im))
    }

    /// Wraps `z`, sending anything non-finite (including NaN) to infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexPoint::Finite(z)
        } else {
            ComplexPoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ComplexPoint::Finite(z) => Some(z),
            ComplexPoint::Infinity => None,
        }
    }

    /// Chordal distance on the unit-diameter Riemann sphere, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &ComplexPoint) -> f64 {
        match (*self, *other) {
            (ComplexPoint::Infinity, ComplexPoint::Infinity) => 0.0,
            (ComplexPoint::Finite(z), ComplexPoint::Infinity)
            | (ComplexPoint::Infinity, ComplexPoint::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (ComplexPoint::Finite(z), ComplexPoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    /// Euclidean distance between finite points, chordal distance otherwise.
    pub fn distance(&self, other: &ComplexPoint) -> f64 {
        match (*self, *other) {
            (ComplexPoint::Finite(z), ComplexPoint::Finite(w)) => (z - w).norm(),
            _ => self.chordal_distance(other),
        }
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::from_complex(z)
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            ComplexPoint::Infinity => f.write_str("∞"),
        }
    }
}

/// The linear fractional map `z ↦ (m·z + n) / (p·z + q)`, normalized to `det = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    m: Complex64,
    n: Complex64,
    p: Complex64,
    q: Complex64,
}

impl Moebius {
    pub const IDENTITY: Moebius = Moebius {
        m: Complex64::new(1.0, 0.0),
        n: Complex64::new(0.0, 0.0),
        p: Complex64::new(0.0, 0.0),
        q: Complex64::new(1.0, 0.0),
    };

    /// Builds the map from raw coefficients and rescales it to determinant one.
    ///
    /// Coefficients whose determinant is already within `1e-12` of one are
    /// kept bit-for-bit, which makes normalization idempotent.
    pub fn new(m: Complex64, n: Complex64, p: Complex64, q: Complex64) -> Result<Self> {
        let det = m * q - n * p;
        let mag = det.norm();
        if !mag.is_finite() || mag < MIN_DET {
            return Err(Error::Degenerate(mag));
        }
        if (det.re - 1.0).abs() <= DET_TOLERANCE && det.im.abs() <= DET_TOLERANCE {
            return Ok(Self { m, n, p, q });
        }
        let s = det.sqrt();
        Ok(Self {
            m: m / s,
            n: n / s,
            p: p / s,
            q: q / s,
        })
    }

    /// Convenience constructor from `[[m, n], [p, q]]`.
    pub fn from_matrix(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        let [[m, n], [p, q]] = rows;
        Self::new(m, n, p, q)
    }

    pub fn coefficients(&self) -> [[Complex64; 2]; 2] {
        [[self.m, self.n], [self.p, self.q]]
    }

    pub fn det(&self) -> Complex64 {
        self.m * self.q - self.n * self.p
    }

    pub fn trace(&self) -> Complex64 {
        self.m + self.q
    }

    /// Re-runs normalization on an already normalized map.
    pub fn normalized(&self) -> Self {
        Self::new(self.m, self.n, self.p, self.q).expect("normalized maps stay invertible")
    }

    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        match z {
            ComplexPoint::Infinity => {
                if is_zero(self.p) {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::from_complex(self.m / self.p)
                }
            }
            ComplexPoint::Finite(z) => {
                let den = self.p * z + self.q;
                if is_zero(den) {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::from_complex((self.m * z + self.n) / den)
                }
            }
        }
    }

    /// Matrix product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let m = self.m * other.m + self.n * other.p;
        let n = self.m * other.n + self.n * other.q;
        let p = self.p * other.m + self.q * other.p;
        let q = self.p * other.n + self.q * other.q;
        Moebius::new(m, n, p, q).expect("product of invertible maps is invertible")
    }

    /// Adjugate `[[q, −n], [−p, m]]`; exact because the determinant is one.
    pub fn inverse(&self) -> Moebius {
        Moebius::new(self.q, -self.n, -self.p, self.m)
            .expect("adjugate of an invertible map is invertible")
    }

    /// True when the map is `±I` within `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.n.norm() <= tol && self.p.norm() <= tol && (self.m - self.q).norm() <= tol
    }

    /// Coefficient-wise comparison up to the sign ambiguity left after normalization.
    pub fn approx_eq(&self, other: &Moebius, tol: f64) -> bool {
        let diff = |s: f64| {
            [
                self.m - other.m * s,
                self.n - other.n * s,
                self.p - other.p * s,
                self.q - other.q * s,
            ]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
        };
        diff(1.0) <= tol || diff(-1.0) <= tol
    }

    /// Points left in place by the map: one for parabolic maps, two otherwise.
    pub fn fixed_points(&self) -> Result<Vec<ComplexPoint>> {
        if self.is_identity(IDENTITY_TOLERANCE) {
            return Err(Error::IdentityMap);
        }
        let Moebius { m, n, p, q } = *self;
        if is_zero(p) {
            let shift = q - m;
            let scale = m.norm() + q.norm();
            if shift.norm() <= PARABOLIC_TOLERANCE * scale {
                return Ok(vec![ComplexPoint::Infinity]);
            }
            return Ok(vec![
                ComplexPoint::from_complex(n / shift),
                ComplexPoint::Infinity,
            ]);
        }

        // p·z² + b·z + c = 0
        let b = q - m;
        let c = -n;
        let disc = b * b - p * c * 4.0;
        let scale = {
            let s = m.norm() + n.norm() + p.norm() + q.norm();
            s * s
        };
        if disc.norm() <= PARABOLIC_TOLERANCE * scale {
            return Ok(vec![ComplexPoint::from_complex(-b / (p * 2.0))]);
        }
        let mut root = disc.sqrt();
        if (b.conj() * root).re < 0.0 {
            root = -root;
        }
        let big = -(b + root) / 2.0;
        Ok(vec![
            ComplexPoint::from_complex(big / p),
            ComplexPoint::from_complex(c / big),
        ])
    }
}

impl Mul for Moebius {
    type Output = Moebius;

    fn mul(self, rhs: Moebius) -> Moebius {
        self.compose(&rhs)
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m, self.n, self.p, self.q)
    }
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// An ordered list of generators; generator `k` answers to digit `k` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    maps: Vec<Moebius>,
    inverse_of: Vec<u8>,
}

impl GeneratorSet {
    /// `inverse_of[k - 1]` is the digit of generator `k`'s inverse, or 0 when
    /// no inverse is paired.
    pub fn new(maps: Vec<Moebius>, inverse_of: Vec<u8>) -> Result<Self> {
        let m = maps.len();
        if m == 0 || m > u8::MAX as usize {
            return Err(Error::AlphabetSize(m as u64));
        }
        if inverse_of.len() != m {
            return Err(Error::InvalidTable(format!(
                "{} inverse entries for {m} generators",
                inverse_of.len()
            )));
        }
        for (k, &inv) in inverse_of.iter().enumerate() {
            let digit = (k + 1) as u8;
            if inv == 0 {
                continue;
            }
            if inv as usize > m {
                return Err(Error::DigitOutOfRange {
                    digit: inv,
                    position: k,
                    m: m as u8,
                });
            }
            let product = maps[k].compose(&maps[inv as usize - 1]);
            if !product.is_identity(PAIRING_TOLERANCE) {
                return Err(Error::BrokenInversePair {
                    digit,
                    inverse: inv,
                });
            }
        }
        Ok(Self { maps, inverse_of })
    }

    /// The Maskit-slice generators `a = μ + 1/z`, `b = z + 2` with their
    /// inverses, bound to digits 1..=4 as `a, b, A, B`.
    pub fn maskit(mu: Complex64) -> Result<Self> {
        if !(mu.re.is_finite() && mu.im.is_finite()) {
            return Err(Error::Degenerate(f64::NAN));
        }
        let i = Complex64::i();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let a = Moebius::new(-i * mu, -i, -i, zero)?;
        let b = Moebius::new(one, Complex64::new(2.0, 0.0), zero, one)?;
        Self::new(vec![a, b, a.inverse(), b.inverse()], vec![3, 4, 1, 2])
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Generator bound to `digit` (1-based).
    pub fn get(&self, digit: u8) -> &Moebius {
        &self.maps[digit as usize - 1]
    }

    pub fn maps(&self) -> &[Moebius] {
        &self.maps
    }

    pub fn inverse_of(&self, digit: u8) -> u8 {
        self.inverse_of[digit as usize - 1]
    }

    /// `g₁ · g₂ · g₁⁻¹ · g₂⁻¹`, which is `a·b·A·B` for the Maskit set.
    pub fn commutator(&self) -> Result<Moebius> {
        if self.maps.len() < 2 {
            return Err(Error::AlphabetSize(self.maps.len() as u64));
        }
        let (g1, g2) = (self.maps[0], self.maps[1]);
        Ok(g1 * g2 * g1.inverse() * g2.inverse())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(m: Complex64, n: Complex64, p: Complex64, q: Complex64) -> Moebius {
        Moebius::new(m, n, p, q).unwrap()
    }

    fn translation2() -> Moebius {
        mat(c(1., 0.), c(2., 0.), c(0., 0.), c(1., 0.))
    }

    fn swap() -> Moebius {
        mat(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
    }

    fn parabolic_i() -> Moebius {
        mat(c(2., 0.), c(0., -1.), c(0., -1.), c(0., 0.))
    }

    fn close(z: ComplexPoint, re: f64, im: f64) -> bool {
        z.distance(&ComplexPoint::new(re, im)) < 1e-12
    }

    #[test]
    fn apply_examples() {
        assert!(close(
            translation2().apply(ComplexPoint::new(0., 0.)),
            2.,
            0.
        ));
        assert!(close(swap().apply(ComplexPoint::Infinity), 0., 0.));
        assert!(close(
            parabolic_i().apply(ComplexPoint::new(0., 1.)),
            0.,
            1.
        ));
        assert!(translation2().apply(ComplexPoint::Infinity).is_infinite());
        // pole at z = -q/p
        assert!(swap().apply(ComplexPoint::new(0., 0.)).is_infinite());
    }

    #[test]
    fn compose_examples() {
        let back = mat(c(1., 0.), c(-2., 0.), c(0., 0.), c(1., 0.));
        assert!(translation2().compose(&back).is_identity(1e-15));
        assert!(swap().compose(&swap()).is_identity(1e-15));
        let hand = mat(c(2., 0.), c(1., 0.), c(1., 0.), c(0., 0.));
        assert!(translation2().compose(&swap()).approx_eq(&hand, 1e-15));
    }

    #[test]
    fn inverse_examples() {
        let inv = translation2().inverse();
        assert!(inv.approx_eq(&mat(c(1., 0.), c(-2., 0.), c(0., 0.), c(1., 0.)), 0.0));
        assert!(swap().inverse().approx_eq(&swap(), 0.0));
        let expected = [[c(0., 0.), c(0., 1.)], [c(0., 1.), c(2., 0.)]];
        assert_eq!(parabolic_i().inverse().coefficients(), expected);
        assert!(parabolic_i()
            .compose(&parabolic_i().inverse())
            .is_identity(1e-15));
    }

    #[test]
    fn degenerate_rejected() {
        let err = Moebius::new(c(1., 0.), c(2., 0.), c(2., 0.), c(4., 0.)).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(
            translation2().fixed_points().unwrap(),
            vec![ComplexPoint::Infinity]
        );

        let mut swap_fixed: Vec<f64> = swap()
            .fixed_points()
            .unwrap()
            .iter()
            .map(|z| {
                let z = z.finite().unwrap();
                assert!(z.im.abs() < 1e-15);
                z.re
            })
            .collect();
        swap_fixed.sort_by(f64::total_cmp);
        assert_eq!(swap_fixed, vec![-1.0, 1.0]);

        let fixed = parabolic_i().fixed_points().unwrap();
        assert_eq!(fixed.len(), 1);
        assert!(close(fixed[0], 0., 1.));
        assert!(close(parabolic_i().apply(fixed[0]), 0., 1.));
    }

    #[test]
    fn loxodromic_with_finite_and_infinite_fixed_points() {
        // z -> 4z + 3 fixes -1 and infinity
        let m = mat(c(2., 0.), c(1.5, 0.), c(0., 0.), c(0.5, 0.));
        let fixed = m.fixed_points().unwrap();
        assert_eq!(fixed.len(), 2);
        assert!(close(fixed[0], -1., 0.));
        assert!(fixed[1].is_infinite());
    }

    #[test]
    fn identity_has_no_isolated_fixed_points() {
        assert_eq!(Moebius::IDENTITY.fixed_points(), Err(Error::IdentityMap));
    }

    #[test]
    fn maskit_at_two_i() {
        let gens = GeneratorSet::maskit(c(0., 2.)).unwrap();
        assert_eq!(
            gens.get(1).coefficients(),
            [[c(2., 0.), c(0., -1.)], [c(0., -1.), c(0., 0.)]]
        );
        assert_eq!(gens.get(2).coefficients(), translation2().coefficients());
        for digit in 1..=4u8 {
            let inv = gens.inverse_of(digit);
            assert!(gens.get(digit).compose(gens.get(inv)).is_identity(1e-12));
        }
    }

    #[test]
    fn maskit_commutator_is_parabolic() {
        let gens = GeneratorSet::maskit(c(-0.097, 1.838)).unwrap();
        let k = gens.commutator().unwrap();
        assert!((k.trace() + 2.0).norm() < 1e-12, "trace {}", k.trace());
        let fixed = k.fixed_points().unwrap();
        assert_eq!(fixed.len(), 1);
        assert!(k.apply(fixed[0]).distance(&fixed[0]) < 1e-9);
    }

    #[test]
    fn broken_pairing_rejected() {
        let err = GeneratorSet::new(vec![translation2(), swap()], vec![2, 1]).unwrap_err();
        assert!(matches!(err, Error::BrokenInversePair { .. }));
    }

    #[test]
    fn normalization_is_idempotent_bitwise() {
        let m = mat(c(3., 1.), c(0.5, -2.), c(1.25, 0.), c(-1., 4.));
        assert_eq!(m.normalized(), m);
        assert!((m.det() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn chordal_distance_to_infinity() {
        let zero = ComplexPoint::new(0., 0.);
        assert_eq!(zero.chordal_distance(&ComplexPoint::Infinity), 2.0);
        assert_eq!(
            ComplexPoint::Infinity.distance(&ComplexPoint::Infinity),
            0.0
        );
        assert!(ComplexPoint::new(f64::NAN, 0.).is_infinite());
    }
}
