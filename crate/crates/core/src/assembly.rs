//! Closed-form overlap and Hamiltonian matrix elements.
//!
//! Every integral is taken over the disk `0 <= r <= r0`, `0 <= φ < 2π` with
//! area element `r dr dφ`. A basis function factors as `R_i(r) A_j(φ)` with
//! `R_i = r0 r^i - r^(i+1)`, so each element is an angular integral times a
//! sum of radial moments `∫ r^k dr`. The kinetic term is taken in first
//! derivative form, `1/2 ∫ ∇f·∇g`; the boundary term vanishes because every
//! function carries the factor `(r0 - r)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::basis::{BasisIndex, BasisSpec, Parity, RadialBasisSpec};
use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::scaling::{BetaParams, ModelParams};

/// `∫_0^r0 r^k dr = r0^(k+1) / (k+1)`.
pub fn radial_moment(k: usize, r0: f64) -> f64 {
    let p = k + 1;
    let power = if p > 60 {
        r0.powf(p as f64)
    } else {
        r0.powi(p as i32)
    };
    power / p as f64
}

/// [`radial_moment`] in double-double precision. The combinations of moments
/// below cancel heavily for large powers; the extra word absorbs that.
fn moment_dd(k: usize, r0: Dd) -> Dd {
    let p = k + 1;
    r0.powi(p as u32) / Dd::new(p as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularKind {
    /// `∫ cos(jφ) cos(j'φ)`
    CosCos,
    /// `∫ sin(jφ) sin(j'φ)`
    SinSin,
    /// `∫ cos φ cos(jφ) cos(j'φ)`
    CosWeightedCosCos,
    /// `∫ cos φ sin(jφ) sin(j'φ)`
    CosWeightedSinSin,
}

/// Angular integrals are `{0, 1/2, 1, 2} × π`; this is the multiple of π.
fn cos_cos(j: usize, jp: usize) -> f64 {
    match (j, jp) {
        (0, 0) => 2.0,
        _ if j == jp => 1.0,
        _ => 0.0,
    }
}

fn sin_sin(j: usize, jp: usize) -> f64 {
    if j == jp && j != 0 {
        1.0
    } else {
        0.0
    }
}

fn angular_multiple(kind: AngularKind, j: usize, jp: usize) -> f64 {
    match kind {
        AngularKind::CosCos => cos_cos(j, jp),
        AngularKind::SinSin => sin_sin(j, jp),
        AngularKind::CosWeightedCosCos => 0.5 * (cos_cos(j + 1, jp) + cos_cos(j.abs_diff(1), jp)),
        AngularKind::CosWeightedSinSin => {
            // sin((j-1)φ) vanishes at j = 1 and flips sign at j = 0.
            let lower = match j {
                0 => -sin_sin(1, jp),
                _ => sin_sin(j - 1, jp),
            };
            0.5 * (sin_sin(j + 1, jp) + lower)
        }
    }
}

/// Integrals over one full period of products of harmonics.
///
/// The weighted kinds use `cos φ cos jφ = [cos (j+1)φ + cos (j-1)φ] / 2` and
/// `cos φ sin jφ = [sin (j+1)φ + sin (j-1)φ] / 2`.
pub fn angular_product_integral(kind: AngularKind, j: usize, jp: usize) -> f64 {
    angular_multiple(kind, j, jp) * PI
}

/// Sparse polynomial in r as (power, coefficient) terms.
type Poly = Vec<(i32, Dd)>;

/// `r0 r^p - r^(p+1)`
fn boundary_poly(p: usize, r0: Dd) -> Poly {
    vec![(p as i32, r0), (p as i32 + 1, -Dd::ONE)]
}

/// `d/dr (r0 r^p - r^(p+1))`, zero terms dropped.
fn boundary_poly_derivative(p: usize, r0: Dd) -> Poly {
    let mut out = Vec::with_capacity(2);
    if p > 0 {
        out.push((p as i32 - 1, r0.mul_f64(p as f64)));
    }
    out.push((p as i32, Dd::new(-((p + 1) as f64))));
    out
}

/// `∫_0^r0 f(r) g(r) r^shift dr`
fn radial_integral(f: &Poly, g: &Poly, shift: i32, r0: Dd) -> Dd {
    let mut sum = Dd::ZERO;
    for &(pf, cf) in f {
        for &(pg, cg) in g {
            let k = pf + pg + shift;
            assert!(k >= 0, "divergent radial moment r^{k}");
            sum += cf * cg * moment_dd(k as usize, r0);
        }
    }
    sum
}

fn check_same_sector(a: &BasisIndex, b: &BasisIndex) -> Result<()> {
    if a.parity != b.parity {
        return Err(Error::Domain(format!(
            "matrix element between {} and {} sectors requested",
            a.parity, b.parity
        )));
    }
    Ok(())
}

fn plain_angular(parity: Parity) -> AngularKind {
    match parity {
        Parity::Even => AngularKind::CosCos,
        Parity::Odd => AngularKind::SinSin,
    }
}

fn weighted_angular(parity: Parity) -> AngularKind {
    match parity {
        Parity::Even => AngularKind::CosWeightedCosCos,
        Parity::Odd => AngularKind::CosWeightedSinSin,
    }
}

fn overlap_dd(a: &BasisIndex, b: &BasisIndex, r0: Dd) -> Dd {
    let ang = angular_multiple(plain_angular(a.parity), a.j, b.j);
    if ang == 0.0 {
        return Dd::ZERO;
    }
    (Dd::PI * radial_integral(&boundary_poly(a.i, r0), &boundary_poly(b.i, r0), 1, r0)).mul_f64(ang)
}

fn kinetic_dd(a: &BasisIndex, b: &BasisIndex, r0: Dd) -> Dd {
    if a.j != b.j {
        return Dd::ZERO;
    }
    let j = a.j;
    let radial_part = radial_integral(
        &boundary_poly_derivative(a.i, r0),
        &boundary_poly_derivative(b.i, r0),
        1,
        r0,
    )
    .mul_f64(angular_multiple(plain_angular(a.parity), j, j));
    // ∂_φ swaps cos and sin and brings down a factor j; for j >= 1 both
    // sectors give j² π.
    let angular_part = if j == 0 {
        Dd::ZERO
    } else {
        radial_integral(&boundary_poly(a.i, r0), &boundary_poly(b.i, r0), -1, r0)
            .mul_f64((j * j) as f64)
    };
    (Dd::PI * (radial_part + angular_part)).mul_f64(0.5)
}

fn coulomb_dd(a: &BasisIndex, b: &BasisIndex, r0: Dd) -> Dd {
    let ang = angular_multiple(plain_angular(a.parity), a.j, b.j);
    if ang == 0.0 {
        return Dd::ZERO;
    }
    -(Dd::PI * radial_integral(&boundary_poly(a.i, r0), &boundary_poly(b.i, r0), 0, r0))
        .mul_f64(ang)
}

/// Field term at unit λ: `-<f_a | r cos φ | f_b>`.
fn stark_unit_dd(a: &BasisIndex, b: &BasisIndex, r0: Dd) -> Dd {
    let ang = angular_multiple(weighted_angular(a.parity), a.j, b.j);
    if ang == 0.0 {
        return Dd::ZERO;
    }
    -(Dd::PI * radial_integral(&boundary_poly(a.i, r0), &boundary_poly(b.i, r0), 2, r0))
        .mul_f64(ang)
}

/// `<f_a | f_b>`
pub fn overlap_element(a: &BasisIndex, b: &BasisIndex, r0: f64) -> Result<f64> {
    check_same_sector(a, b)?;
    Ok(overlap_dd(a, b, Dd::new(r0)).to_f64())
}

/// `1/2 ∫ (∂_r f_a ∂_r f_b + r^-2 ∂_φ f_a ∂_φ f_b) r dr dφ`
pub fn kinetic_element(a: &BasisIndex, b: &BasisIndex, r0: f64) -> Result<f64> {
    check_same_sector(a, b)?;
    Ok(kinetic_dd(a, b, Dd::new(r0)).to_f64())
}

/// `-<f_a | 1/r | f_b>`; the measure cancels the singularity.
pub fn coulomb_element(a: &BasisIndex, b: &BasisIndex, r0: f64) -> Result<f64> {
    check_same_sector(a, b)?;
    Ok(coulomb_dd(a, b, Dd::new(r0)).to_f64())
}

/// `-λ <f_a | r cos φ | f_b>`; nonzero only for `|j - j'| = 1`.
pub fn stark_element(a: &BasisIndex, b: &BasisIndex, r0: f64, lambda: f64) -> Result<f64> {
    check_same_sector(a, b)?;
    Ok(stark_unit_dd(a, b, Dd::new(r0)).mul_f64(lambda).to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairSpec {
    Sector(BasisSpec),
    Radial(RadialBasisSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairParams {
    Model(ModelParams),
    Beta(BetaParams),
}

/// Symmetric Hamiltonian and overlap matrices for one basis and parameter point.
///
/// `hamiltonian` and `overlap` are the nearest `f64` matrices. Assembled
/// pairs also carry the double-double values the solver works from.
#[derive(Debug, Clone)]
pub struct MatrixPair {
    pub hamiltonian: DMatrix<f64>,
    pub overlap: DMatrix<f64>,
    pub spec: PairSpec,
    pub params: PairParams,
    precise: Option<(DMatrix<Dd>, DMatrix<Dd>)>,
}

impl MatrixPair {
    /// A pair known only to `f64` precision.
    pub fn from_f64(
        hamiltonian: DMatrix<f64>,
        overlap: DMatrix<f64>,
        spec: PairSpec,
        params: PairParams,
    ) -> Self {
        Self {
            hamiltonian,
            overlap,
            spec,
            params,
            precise: None,
        }
    }

    fn from_dd(
        hamiltonian: DMatrix<Dd>,
        overlap: DMatrix<Dd>,
        spec: PairSpec,
        params: PairParams,
    ) -> Self {
        Self {
            hamiltonian: dd::round(&hamiltonian),
            overlap: dd::round(&overlap),
            spec,
            params,
            precise: Some((hamiltonian, overlap)),
        }
    }

    pub fn dim(&self) -> usize {
        self.overlap.nrows()
    }

    pub fn hamiltonian_dd(&self) -> DMatrix<Dd> {
        match &self.precise {
            Some((h, _)) => h.clone(),
            None => dd::promote(&self.hamiltonian),
        }
    }

    pub fn overlap_dd(&self) -> DMatrix<Dd> {
        match &self.precise {
            Some((_, s)) => s.clone(),
            None => dd::promote(&self.overlap),
        }
    }
}

/// Parameter-independent pieces of a sector: `H(λ) = field_free + λ stark_unit`.
#[derive(Debug, Clone)]
pub struct SectorMatrices {
    pub spec: BasisSpec,
    pub basis: Vec<BasisIndex>,
    pub overlap: DMatrix<Dd>,
    /// Kinetic plus Coulomb.
    pub field_free: DMatrix<Dd>,
    /// Field term at λ = 1.
    pub stark_unit: DMatrix<Dd>,
}

impl SectorMatrices {
    pub fn new(spec: &BasisSpec) -> Result<Self> {
        let basis = spec.enumerate();
        let n = basis.len();
        let r0 = Dd::new(spec.r0);
        let mut overlap = DMatrix::from_element(n, n, Dd::ZERO);
        let mut field_free = DMatrix::from_element(n, n, Dd::ZERO);
        let mut stark_unit = DMatrix::from_element(n, n, Dd::ZERO);
        for (p, a) in basis.iter().enumerate() {
            for (q, b) in basis.iter().enumerate().skip(p) {
                let s = overlap_dd(a, b, r0);
                let h0 = kinetic_dd(a, b, r0) + coulomb_dd(a, b, r0);
                let z = stark_unit_dd(a, b, r0);
                overlap[(p, q)] = s;
                overlap[(q, p)] = s;
                field_free[(p, q)] = h0;
                field_free[(q, p)] = h0;
                stark_unit[(p, q)] = z;
                stark_unit[(q, p)] = z;
            }
        }
        Ok(Self {
            spec: *spec,
            basis,
            overlap,
            field_free,
            stark_unit,
        })
    }

    pub fn hamiltonian(&self, lambda: f64) -> DMatrix<Dd> {
        if lambda == 0.0 {
            return self.field_free.clone();
        }
        self.field_free
            .zip_map(&self.stark_unit, |h, z| h + z.mul_f64(lambda))
    }

    pub fn pair(&self, lambda: f64) -> MatrixPair {
        MatrixPair::from_dd(
            self.hamiltonian(lambda),
            self.overlap.clone(),
            PairSpec::Sector(self.spec),
            PairParams::Model(ModelParams {
                r0: self.spec.r0,
                lambda,
            }),
        )
    }
}

pub fn assemble(spec: &BasisSpec, params: &ModelParams) -> Result<MatrixPair> {
    if spec.r0 != params.r0 {
        return Err(Error::Domain(format!(
            "basis radius {} does not match model radius {}",
            spec.r0, params.r0
        )));
    }
    Ok(SectorMatrices::new(spec)?.pair(params.lambda))
}

/// Field-free radial problem on the unit disk: `H = K + β V`.
#[derive(Debug, Clone)]
pub struct RadialMatrices {
    pub spec: RadialBasisSpec,
    pub overlap: DMatrix<Dd>,
    pub kinetic: DMatrix<Dd>,
    /// `-∫ f g dr`, the Coulomb term at β = 1.
    pub coulomb_unit: DMatrix<Dd>,
}

impl RadialMatrices {
    pub fn new(spec: &RadialBasisSpec) -> Self {
        let n = spec.size;
        let nu = spec.nu;
        let nu2 = (nu * nu) as f64;
        let one = Dd::ONE;
        let mut overlap = DMatrix::from_element(n, n, Dd::ZERO);
        let mut kinetic = DMatrix::from_element(n, n, Dd::ZERO);
        let mut coulomb_unit = DMatrix::from_element(n, n, Dd::ZERO);
        for p in 0..n {
            let f = boundary_poly(p + nu, one);
            let df = boundary_poly_derivative(p + nu, one);
            for q in p..n {
                let g = boundary_poly(q + nu, one);
                let dg = boundary_poly_derivative(q + nu, one);
                let s = radial_integral(&f, &g, 1, one);
                let centrifugal = if nu == 0 {
                    Dd::ZERO
                } else {
                    radial_integral(&f, &g, -1, one).mul_f64(nu2)
                };
                let k = (radial_integral(&df, &dg, 1, one) + centrifugal).mul_f64(0.5);
                let v = -radial_integral(&f, &g, 0, one);
                overlap[(p, q)] = s;
                overlap[(q, p)] = s;
                kinetic[(p, q)] = k;
                kinetic[(q, p)] = k;
                coulomb_unit[(p, q)] = v;
                coulomb_unit[(q, p)] = v;
            }
        }
        Self {
            spec: *spec,
            overlap,
            kinetic,
            coulomb_unit,
        }
    }

    pub fn hamiltonian(&self, beta: f64) -> DMatrix<Dd> {
        if beta == 0.0 {
            return self.kinetic.clone();
        }
        self.kinetic
            .zip_map(&self.coulomb_unit, |k, v| k + v.mul_f64(beta))
    }

    pub fn pair(&self, beta: f64) -> MatrixPair {
        MatrixPair::from_dd(
            self.hamiltonian(beta),
            self.overlap.clone(),
            PairSpec::Radial(self.spec),
            PairParams::Beta(BetaParams { beta }),
        )
    }
}

pub fn assemble_radial(spec: &RadialBasisSpec, params: &BetaParams) -> MatrixPair {
    RadialMatrices::new(spec).pair(params.beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn moments() {
        assert_eq!(radial_moment(0, 1.0), 1.0);
        assert_eq!(radial_moment(1, 1.0), 0.5);
        assert!(close(radial_moment(3, 0.75), 0.0791015625, 1e-15));
        assert!(close(
            radial_moment(70, 1.01),
            1.01f64.powf(71.0) / 71.0,
            1e-14
        ));
    }

    #[test]
    fn angular_examples() {
        use AngularKind::*;
        assert_eq!(angular_product_integral(CosCos, 0, 0), 2.0 * PI);
        assert_eq!(angular_product_integral(CosCos, 3, 3), PI);
        assert_eq!(angular_product_integral(CosCos, 2, 3), 0.0);
        assert_eq!(angular_product_integral(SinSin, 0, 0), 0.0);
        assert_eq!(angular_product_integral(CosWeightedCosCos, 0, 1), PI);
        assert_eq!(angular_product_integral(CosWeightedCosCos, 1, 0), PI);
        assert_eq!(angular_product_integral(CosWeightedCosCos, 1, 2), PI / 2.0);
        assert_eq!(angular_product_integral(CosWeightedSinSin, 1, 2), PI / 2.0);
        assert_eq!(angular_product_integral(CosWeightedSinSin, 2, 1), PI / 2.0);
        assert_eq!(angular_product_integral(CosWeightedSinSin, 1, 1), 0.0);
        assert_eq!(angular_product_integral(CosWeightedCosCos, 2, 2), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let e00 = BasisIndex::even(0, 0);
        assert!(close(
            overlap_element(&e00, &e00, 1.0).unwrap(),
            PI / 6.0,
            1e-15
        ));
        assert_eq!(
            overlap_element(&BasisIndex::even(1, 0), &BasisIndex::even(1, 1), 0.3).unwrap(),
            0.0
        );
        let o11 = BasisIndex::odd(1, 1);
        assert!(close(
            overlap_element(&o11, &o11, 1.0).unwrap(),
            PI / 60.0,
            1e-15
        ));
        assert!(overlap_element(&e00, &o11, 1.0).is_err());
    }

    #[test]
    fn kinetic_examples() {
        let e11 = BasisIndex::even(1, 1);
        assert!(close(
            kinetic_element(&e11, &e11, 1.0).unwrap(),
            PI / 8.0,
            1e-15
        ));
        assert_eq!(
            kinetic_element(&BasisIndex::even(0, 0), &BasisIndex::even(1, 1), 2.0).unwrap(),
            0.0
        );
        let e00 = BasisIndex::even(0, 0);
        assert!(close(
            kinetic_element(&e00, &e00, 1.0).unwrap(),
            PI / 2.0,
            1e-15
        ));
    }

    #[test]
    fn coulomb_examples() {
        let e00 = BasisIndex::even(0, 0);
        assert!(close(
            coulomb_element(&e00, &e00, 1.0).unwrap(),
            -2.0 * PI / 3.0,
            1e-15
        ));
        assert_eq!(
            coulomb_element(&BasisIndex::even(2, 0), &BasisIndex::even(2, 2), 1.0).unwrap(),
            0.0
        );
        let o11 = BasisIndex::odd(1, 1);
        assert!(close(
            coulomb_element(&o11, &o11, 1.0).unwrap(),
            -PI / 30.0,
            1e-15
        ));
    }

    #[test]
    fn stark_examples() {
        let e00 = BasisIndex::even(0, 0);
        let e11 = BasisIndex::even(1, 1);
        assert!(close(
            stark_element(&e00, &e11, 1.0, 1.0).unwrap(),
            -PI / 60.0,
            1e-15
        ));
        assert_eq!(
            stark_element(&e11, &BasisIndex::even(2, 1), 1.0, 0.7).unwrap(),
            0.0
        );
        assert_eq!(stark_element(&e00, &e11, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn assemble_small() {
        let spec = BasisSpec::new(1, Parity::Even, 1.0).unwrap();
        let pair = assemble(&spec, &ModelParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(pair.dim(), 3);
        assert!(close(pair.overlap[(0, 0)], PI / 6.0, 1e-15));
        let spec = BasisSpec::new(1, Parity::Odd, 0.4).unwrap();
        assert_eq!(
            assemble(&spec, &ModelParams::new(0.4, 2.0).unwrap())
                .unwrap()
                .dim(),
            1
        );
        assert!(assemble(&spec, &ModelParams::new(0.5, 2.0).unwrap()).is_err());
    }

    #[test]
    fn assembled_structure() {
        for parity in Parity::BOTH {
            let spec = BasisSpec::new(6, parity, 1.3).unwrap();
            let m = SectorMatrices::new(&spec).unwrap();
            let pair = m.pair(0.8);
            let n = pair.dim();
            for p in 0..n {
                assert!(pair.overlap[(p, p)] > 0.0);
                for q in 0..n {
                    assert_eq!(pair.overlap[(p, q)], pair.overlap[(q, p)]);
                    assert_eq!(pair.hamiltonian[(p, q)], pair.hamiltonian[(q, p)]);
                    let dj = m.basis[p].j.abs_diff(m.basis[q].j);
                    if dj != 0 {
                        assert_eq!(pair.overlap[(p, q)], 0.0);
                        assert_eq!(m.field_free[(p, q)], Dd::ZERO);
                    }
                    if dj != 1 {
                        assert_eq!(m.stark_unit[(p, q)], Dd::ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn hamiltonian_is_linear_in_lambda() {
        let m = SectorMatrices::new(&BasisSpec::new(5, Parity::Even, 2.0).unwrap()).unwrap();
        let h0 = m.hamiltonian(0.0);
        let h1 = m.hamiltonian(1.0);
        for lambda in [-1.7, 0.3, 0.75, 4.0] {
            let direct = m.hamiltonian(lambda);
            let linear = DMatrix::from_fn(h0.nrows(), h0.ncols(), |r, c| {
                h0[(r, c)] + (h1[(r, c)] - h0[(r, c)]).mul_f64(lambda)
            });
            assert_eq!(direct, linear);
        }
    }

    #[test]
    fn radial_single_function() {
        let spec = RadialBasisSpec::new(0, 1).unwrap();
        let pair = assemble_radial(&spec, &BetaParams::new(0.0).unwrap());
        assert!(close(pair.overlap[(0, 0)], 1.0 / 12.0, 1e-15));
        assert!(close(pair.hamiltonian[(0, 0)], 0.25, 1e-15));
        assert!(close(
            pair.hamiltonian[(0, 0)] / pair.overlap[(0, 0)],
            3.0,
            1e-14
        ));

        let spec = RadialBasisSpec::new(1, 1).unwrap();
        let pair = assemble_radial(&spec, &BetaParams::new(0.5).unwrap());
        assert!(pair.hamiltonian[(0, 0)].is_finite() && pair.overlap[(0, 0)] > 0.0);
    }
}
