//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use starkdisk::basis::{BasisIndex, Parity};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
/// Gauss weights on the odd-indexed Kronrod nodes.
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = K15_WEIGHTS[7] * f(c);
    let mut g = G7_WEIGHTS[3] * f(c);
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol.max(1e-15 * k.abs()) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to an absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 40)
}

pub const QUAD_TOL: f64 = 1e-12;

fn angular(parity: Parity, j: usize, phi: f64) -> f64 {
    match parity {
        Parity::Even => (j as f64 * phi).cos(),
        Parity::Odd => (j as f64 * phi).sin(),
    }
}

/// `r^p (r0 - r)`.
fn radial(p: usize, r0: f64, r: f64) -> f64 {
    r.powi(p as i32) * (r0 - r)
}

/// `R'' + R'/r - q² R / r²` for `R = r^p (r0 - r)`.
fn radial_laplacian(p: usize, q: usize, r0: f64, r: f64) -> f64 {
    let (p, q) = (p as i32, q as i32);
    let a = (p * p - q * q) as f64;
    let b = ((p + 1) * (p + 1) - q * q) as f64;
    let first = if a == 0.0 {
        0.0
    } else {
        r0 * a * r.powi(p - 2)
    };
    first - b * r.powi(p - 1)
}

fn angular_integral(a: &BasisIndex, b: &BasisIndex, weight_cos: bool) -> f64 {
    integrate(
        |phi| {
            let w = if weight_cos { phi.cos() } else { 1.0 };
            angular(a.parity, a.j, phi) * angular(b.parity, b.j, phi) * w
        },
        0.0,
        2.0 * PI,
        QUAD_TOL,
    )
}

/// `∫ f_a f_b dA` on the disk of radius r0.
pub fn overlap(a: &BasisIndex, b: &BasisIndex, r0: f64) -> f64 {
    let rad = integrate(
        |r| radial(a.i, r0, r) * radial(b.i, r0, r) * r,
        0.0,
        r0,
        QUAD_TOL,
    );
    rad * angular_integral(a, b, false)
}

/// `-½ ∫ f_a ∇² f_b dA`, the strong form.
pub fn kinetic(a: &BasisIndex, b: &BasisIndex, r0: f64) -> f64 {
    let rad = integrate(
        |r| radial(a.i, r0, r) * radial_laplacian(b.i, b.j, r0, r) * r,
        0.0,
        r0,
        QUAD_TOL,
    );
    -0.5 * rad * angular_integral(a, b, false)
}

/// `-∫ f_a f_b / r dA`.
pub fn coulomb(a: &BasisIndex, b: &BasisIndex, r0: f64) -> f64 {
    let rad = integrate(
        |r| radial(a.i, r0, r) * radial(b.i, r0, r),
        0.0,
        r0,
        QUAD_TOL,
    );
    -rad * angular_integral(a, b, false)
}

/// `-∫ f_a r cos φ f_b dA`, the field term at unit strength.
pub fn stark(a: &BasisIndex, b: &BasisIndex, r0: f64) -> f64 {
    let rad = integrate(
        |r| radial(a.i, r0, r) * radial(b.i, r0, r) * r * r,
        0.0,
        r0,
        QUAD_TOL,
    );
    -rad * angular_integral(a, b, true)
}

/// Radial functions `r^(i+ν) (1 - r)` on the unit disk.
pub fn radial_overlap(nu: usize, i: usize, k: usize) -> f64 {
    integrate(
        |r| radial(i + nu, 1.0, r) * radial(k + nu, 1.0, r) * r,
        0.0,
        1.0,
        QUAD_TOL,
    )
}

pub fn radial_kinetic(nu: usize, i: usize, k: usize) -> f64 {
    -0.5 * integrate(
        |r| radial(i + nu, 1.0, r) * radial_laplacian(k + nu, nu, 1.0, r) * r,
        0.0,
        1.0,
        QUAD_TOL,
    )
}

pub fn radial_coulomb(nu: usize, i: usize, k: usize) -> f64 {
    -integrate(
        |r| radial(i + nu, 1.0, r) * radial(k + nu, 1.0, r),
        0.0,
        1.0,
        QUAD_TOL,
    )
}

/// `|a - b| <= tol · max(1, |b|)`.
pub fn agrees(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Outcome of comparing every closed-form element type against quadrature.
pub struct OracleReport {
    pub comparisons: usize,
    pub worst: f64,
    pub failures: Vec<String>,
}

pub const ORACLE_TOL: f64 = 1e-10;
pub const ORACLE_RADII: [f64; 3] = [0.5, 1.0, 3.0];
pub const ORACLE_MAX_I: usize = 4;

fn indices(parity: Parity) -> Vec<BasisIndex> {
    let mut v = Vec::new();
    for j in parity.min_j()..=ORACLE_MAX_I {
        for i in j..=ORACLE_MAX_I {
            v.push(BasisIndex::new(i, j, parity).unwrap());
        }
    }
    v
}

pub fn element_oracle_suite() -> OracleReport {
    use starkdisk::assembly::{
        coulomb_element, kinetic_element, overlap_element, stark_element, RadialMatrices,
    };
    use starkdisk::basis::RadialBasisSpec;

    let mut report = OracleReport {
        comparisons: 0,
        worst: 0.0,
        failures: Vec::new(),
    };
    let mut check = |what: String, closed: f64, quad: f64| {
        report.comparisons += 1;
        let rel = (closed - quad).abs() / quad.abs().max(1.0);
        report.worst = report.worst.max(rel);
        if !agrees(closed, quad, ORACLE_TOL) {
            report.failures.push(format!(
                "{what}: closed form {closed:e}, quadrature {quad:e}"
            ));
        }
    };
    for r0 in ORACLE_RADII {
        for parity in Parity::BOTH {
            let idx = indices(parity);
            for a in &idx {
                for b in &idx {
                    let tag = |kind: &str| format!("{kind} {a:?} {b:?} r0={r0}");
                    check(
                        tag("S"),
                        overlap_element(a, b, r0).unwrap(),
                        overlap(a, b, r0),
                    );
                    check(
                        tag("K"),
                        kinetic_element(a, b, r0).unwrap(),
                        kinetic(a, b, r0),
                    );
                    check(
                        tag("V"),
                        coulomb_element(a, b, r0).unwrap(),
                        coulomb(a, b, r0),
                    );
                    check(
                        tag("Z"),
                        stark_element(a, b, r0, 1.0).unwrap(),
                        stark(a, b, r0),
                    );
                }
            }
        }
    }
    for nu in 0..=2 {
        let m = RadialMatrices::new(&RadialBasisSpec::new(nu, ORACLE_MAX_I + 1).unwrap());
        for i in 0..=ORACLE_MAX_I {
            for k in 0..=ORACLE_MAX_I {
                let tag = |kind: &str| format!("radial {kind} nu={nu} ({i},{k})");
                check(
                    tag("S"),
                    m.overlap[(i, k)].to_f64(),
                    radial_overlap(nu, i, k),
                );
                check(
                    tag("K"),
                    m.kinetic[(i, k)].to_f64(),
                    radial_kinetic(nu, i, k),
                );
                check(
                    tag("V"),
                    m.coulomb_unit[(i, k)].to_f64(),
                    radial_coulomb(nu, i, k),
                );
            }
        }
    }
    report
}

/// Ground energy of `-½(R'' + R'/r) - β R / r = E R`, `R(1) = 0`, for ν = 0,
/// by shooting from the origin with RK4 and bisecting on E.
pub fn shooting_ground_energy(beta: f64) -> f64 {
    let end_value = |e: f64| -> f64 {
        // Frobenius series R = Σ a_k r^k near the origin.
        let r_start: f64 = 1e-3;
        let mut a = vec![1.0, -2.0 * beta];
        for k in 1..12 {
            let next = (-2.0 * beta * a[k] - 2.0 * e * a[k - 1]) / ((k + 1) * (k + 1)) as f64;
            a.push(next);
        }
        let mut y = 0.0;
        let mut dy = 0.0;
        for (k, &c) in a.iter().enumerate() {
            y += c * r_start.powi(k as i32);
            if k > 0 {
                dy += k as f64 * c * r_start.powi(k as i32 - 1);
            }
        }
        let rhs = |r: f64, y: f64, v: f64| (v, -v / r - 2.0 * beta * y / r - 2.0 * e * y);
        let steps = 20_000;
        let h = (1.0 - r_start) / steps as f64;
        let mut r = r_start;
        for _ in 0..steps {
            let (k1y, k1v) = rhs(r, y, dy);
            let (k2y, k2v) = rhs(r + 0.5 * h, y + 0.5 * h * k1y, dy + 0.5 * h * k1v);
            let (k3y, k3v) = rhs(r + 0.5 * h, y + 0.5 * h * k2y, dy + 0.5 * h * k2v);
            let (k4y, k4v) = rhs(r + h, y + h * k3y, dy + h * k3v);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            r += h;
        }
        y
    };
    // Walk up from far below the free-atom ground level to the first sign change.
    let mut lo = -2.0 * beta * beta - 5.0;
    let f_lo = end_value(lo);
    let mut hi = lo;
    loop {
        hi += 0.25;
        if (end_value(hi) < 0.0) != (f_lo < 0.0) {
            break;
        }
        lo = hi;
        assert!(hi < 100.0, "no ground level found");
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (end_value(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
