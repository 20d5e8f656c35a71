//! Polynomial basis functions.
//!
//! Two-dimensional sets, one per parity under φ → -φ:
//!
//! ```text
//! even:  r^i (r0 - r) cos(jφ),   j = 0..=N, i = j..=N
//! odd:   r^i (r0 - r) sin(jφ),   j = 1..=N, i = j..=N
//! ```
//!
//! and, for the separable zero-field problem on the unit disk, the radial set
//! `r^(i+ν) (1 - r)`. Functions are left unnormalized.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    /// Smallest angular harmonic in the sector.
    pub fn min_j(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One basis function `r^i (r0 - r) cos(jφ)` or `... sin(jφ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub i: usize,
    pub j: usize,
    pub parity: Parity,
}

impl BasisIndex {
    pub fn new(i: usize, j: usize, parity: Parity) -> Result<Self> {
        if j < parity.min_j() || j > i {
            return Err(Error::Domain(format!(
                "invalid {parity} basis index (i={i}, j={j}): need {} <= j <= i",
                parity.min_j()
            )));
        }
        Ok(Self { i, j, parity })
    }

    pub fn even(i: usize, j: usize) -> Self {
        Self::new(i, j, Parity::Even).expect("valid even index")
    }

    pub fn odd(i: usize, j: usize) -> Self {
        Self::new(i, j, Parity::Odd).expect("valid odd index")
    }

    fn angular(&self, phi: f64) -> f64 {
        let arg = self.j as f64 * phi;
        match self.parity {
            Parity::Even => arg.cos(),
            Parity::Odd => arg.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub n_max: usize,
    pub parity: Parity,
    pub r0: f64,
}

impl BasisSpec {
    pub fn new(n_max: usize, parity: Parity, r0: f64) -> Result<Self> {
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::Domain(format!(
                "r0 must be positive and finite, got {r0}"
            )));
        }
        Ok(Self { n_max, parity, r0 })
    }

    /// `(N+1)(N+2)/2` even functions, `N(N+1)/2` odd ones.
    pub fn size(&self) -> usize {
        let n = self.n_max;
        match self.parity {
            Parity::Even => (n + 1) * (n + 2) / 2,
            Parity::Odd => n * (n + 1) / 2,
        }
    }

    /// Flat ordering: j ascending in the outer loop, i ascending in the inner.
    pub fn enumerate(&self) -> Vec<BasisIndex> {
        let mut out = Vec::with_capacity(self.size());
        for j in self.parity.min_j()..=self.n_max {
            for i in j..=self.n_max {
                out.push(BasisIndex {
                    i,
                    j,
                    parity: self.parity,
                });
            }
        }
        out
    }
}

/// Radial set `r^(i+ν) (1 - r)`, `i = 0..size`, on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialBasisSpec {
    pub nu: usize,
    pub size: usize,
}

impl RadialBasisSpec {
    pub fn new(nu: usize, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Domain("radial basis size must be positive".into()));
        }
        Ok(Self { nu, size })
    }
}

pub fn enumerate(spec: &BasisSpec) -> Vec<BasisIndex> {
    spec.enumerate()
}

pub fn eval(idx: &BasisIndex, r: f64, phi: f64, r0: f64) -> Result<f64> {
    if !(0.0..=r0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, {r0}]")));
    }
    Ok(r.powi(idx.i as i32) * (r0 - r) * idx.angular(phi))
}

pub fn eval_radial(spec: &RadialBasisSpec, i: usize, r: f64) -> Result<f64> {
    if i >= spec.size {
        return Err(Error::Range(format!(
            "radial index {i} >= basis size {}",
            spec.size
        )));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
    }
    Ok(r.powi((i + spec.nu) as i32) * (1.0 - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enumeration_small_sets() {
        let even = BasisSpec::new(1, Parity::Even, 1.0).unwrap().enumerate();
        assert_eq!(
            even,
            vec![
                BasisIndex::even(0, 0),
                BasisIndex::even(1, 0),
                BasisIndex::even(1, 1)
            ]
        );
        let odd = BasisSpec::new(1, Parity::Odd, 1.0).unwrap().enumerate();
        assert_eq!(odd, vec![BasisIndex::odd(1, 1)]);
        assert!(BasisSpec::new(0, Parity::Odd, 1.0)
            .unwrap()
            .enumerate()
            .is_empty());
    }

    #[test]
    fn enumeration_counts() {
        for n in 0..=15 {
            for parity in Parity::BOTH {
                let spec = BasisSpec::new(n, parity, 0.5).unwrap();
                assert_eq!(spec.enumerate().len(), spec.size());
            }
        }
        assert_eq!(
            BasisSpec::new(12, Parity::Even, 1.0)
                .unwrap()
                .enumerate()
                .len(),
            91
        );
        assert_eq!(
            BasisSpec::new(12, Parity::Odd, 1.0)
                .unwrap()
                .enumerate()
                .len(),
            78
        );
    }

    #[test]
    fn indices_are_cartesian_polynomials() {
        for parity in Parity::BOTH {
            let spec = BasisSpec::new(12, parity, 1.0).unwrap();
            assert!(spec
                .enumerate()
                .iter()
                .all(|b| b.i >= b.j && b.j >= parity.min_j()));
            assert_eq!(spec.enumerate(), spec.enumerate());
        }
    }

    #[test]
    fn invalid_indices() {
        assert!(BasisIndex::new(1, 2, Parity::Even).is_err());
        assert!(BasisIndex::new(0, 0, Parity::Odd).is_err());
        assert!(BasisSpec::new(3, Parity::Even, 0.0).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval(&BasisIndex::even(0, 0), 0.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(eval(&BasisIndex::even(1, 1), 0.5, 0.0, 1.0).unwrap(), 0.25);
        assert_eq!(eval(&BasisIndex::odd(3, 2), 0.75, 0.3, 0.75).unwrap(), 0.0);
        assert!(matches!(
            eval(&BasisIndex::even(0, 0), 1.1, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(eval(&BasisIndex::even(0, 0), -0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn eval_radial_examples() {
        let s0 = RadialBasisSpec::new(0, 3).unwrap();
        assert_eq!(eval_radial(&s0, 0, 0.5).unwrap(), 0.5);
        assert_eq!(eval_radial(&s0, 2, 1.0).unwrap(), 0.0);
        let s2 = RadialBasisSpec::new(2, 3).unwrap();
        assert_eq!(eval_radial(&s2, 1, 0.5).unwrap(), 0.0625);
        assert!(eval_radial(&s2, 1, 1.5).is_err());
        assert!(matches!(eval_radial(&s2, 3, 0.5), Err(Error::Range(_))));
    }

    proptest! {
        #[test]
        fn angular_parity(i in 0usize..8, dj in 0usize..8, r in 0.0f64..1.0, phi in -7.0f64..7.0) {
            let j = dj.min(i);
            let e = BasisIndex::even(i, j);
            prop_assert_eq!(eval(&e, r, -phi, 1.0).unwrap(), eval(&e, r, phi, 1.0).unwrap());
            if j >= 1 {
                let o = BasisIndex::odd(i, j);
                prop_assert_eq!(eval(&o, r, -phi, 1.0).unwrap(), -eval(&o, r, phi, 1.0).unwrap());
            }
        }
    }
}
