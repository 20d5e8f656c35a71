//! Generalized symmetric-definite eigenproblem `H c = E S c`.
//!
//! The overlap of a monomial-type basis is badly conditioned, so instead of a
//! Cholesky factorization the solver equilibrates S to unit diagonal,
//! diagonalizes it, drops directions below a relative cutoff and solves the
//! standard problem for the whitened operator on what remains. The whitening
//! runs in double-double arithmetic, one diagonal block of S at a time; only
//! the final diagonalization of the whitened operator is done in `f64`. All
//! dense diagonalizations use cyclic Jacobi rotations.

use nalgebra::DMatrix;

use crate::assembly::MatrixPair;
use crate::dd::{self, Dd, Real};
use crate::error::{Error, Result};

/// Relative cutoff on the equilibrated overlap spectrum. Sized for the
/// double-double whitening, about eight digits above its unit roundoff.
pub const DEFAULT_CUTOFF: f64 = 1e-24;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_TOL_DD: f64 = 1e-30;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: DMatrix<f64>,
    pub sweeps: usize,
}

fn frobenius<T: Real>(a: &DMatrix<T>, off_only: bool) -> f64 {
    let n = a.nrows();
    let mut sum = T::ZERO;
    for c in 0..n {
        for r in 0..n {
            if !(off_only && r == c) {
                sum = sum + a[(r, c)] * a[(r, c)];
            }
        }
    }
    sum.sqrt().to_f64()
}

/// Index of the largest-magnitude entry; first one wins ties.
pub(crate) fn dominant_index<T: Real>(v: impl Iterator<Item = T>) -> usize {
    let mut best = 0;
    let mut best_abs = T::ZERO;
    for (k, x) in v.enumerate() {
        if x.abs() > best_abs {
            best = k;
            best_abs = x.abs();
        }
    }
    best
}

/// Cyclic Jacobi sweeps on a symmetric matrix. Returns unsorted diagonal,
/// accumulated rotations and the sweep count.
fn jacobi<T: Real>(a: &DMatrix<T>, tol: f64) -> Result<(Vec<T>, DMatrix<T>, usize)> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::from_fn(n, n, |r, c| if r == c { T::ONE } else { T::ZERO });
    let norm = frobenius(a, false);
    let negligible = T::from_f64(1e-4 * T::EPS * norm);
    let rel_negligible = T::from_f64(1e-2 * T::EPS);

    let mut sweeps = 0;
    loop {
        let off = frobenius(&m, true);
        if n < 2 || off <= tol * norm {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
                norm,
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::ZERO {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= negligible || apq.abs() <= rel_negligible * (app * aqq).abs().sqrt()
                {
                    m[(p, q)] = T::ZERO;
                    m[(q, p)] = T::ZERO;
                    continue;
                }
                rotated = true;
                let two = T::from_f64(2.0);
                let theta = (aqq - app) / (two * apq);
                let t = if theta.abs().to_f64() > 1e150 {
                    T::from_f64(0.5) / theta
                } else {
                    let mag = T::ONE / (theta.abs() + (theta * theta + T::ONE).sqrt());
                    if theta < T::ZERO {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::ONE / (t * t + T::ONE).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = T::ZERO;
                m[(q, p)] = T::ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    Ok(((0..n).map(|k| m[(k, k)]).collect(), v, sweeps))
}

/// Ascending order of eigenvalues, ties broken by the index of each
/// eigenvector's dominant component.
fn ascending_order<T: Real, V: Real>(values: &[T], vectors: &DMatrix<V>) -> Vec<usize> {
    let mut keys: Vec<(f64, f64, usize, usize)> = values
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let hi = w.to_f64();
            let lo = (w - T::from_f64(hi)).to_f64();
            (hi, lo, dominant_index(vectors.column(k).iter().copied()), k)
        })
        .collect();
    keys.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    keys.into_iter().map(|k| k.3).collect()
}

/// Cyclic Jacobi diagonalization `A = V diag(w) Vᵀ`.
///
/// Converges when the off-diagonal Frobenius norm drops below `1e-14 ‖A‖_F`,
/// or when a full sweep finds nothing left to rotate. Fails after 100 sweeps.
pub fn symmetric_eig(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Domain(format!(
            "matrix is {}x{}, not square",
            n,
            a.ncols()
        )));
    }
    let norm = a.norm();
    for c in 0..n {
        for r in 0..c {
            let d = (a[(r, c)] - a[(c, r)]).abs();
            if d > 1e-12 * norm {
                return Err(Error::Domain(format!(
                    "matrix not symmetric: |A[{r},{c}] - A[{c},{r}]| = {d:e}"
                )));
            }
        }
    }
    let sym = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            a[(r, c)]
        } else {
            0.5 * (a[(r, c)] + a[(c, r)])
        }
    });
    let (values, vectors, sweeps) = jacobi(&sym, JACOBI_TOL)?;
    let order = ascending_order(&values, &vectors);
    Ok(SymmetricEigen {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
        sweeps,
    })
}

/// Connected components of the nonzero pattern, each sorted, ordered by
/// smallest member.
fn diagonal_blocks(s: &DMatrix<Dd>) -> Vec<Vec<usize>> {
    let n = s.nrows();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut k: usize) -> usize {
        while label[k] != k {
            label[k] = label[label[k]];
            k = label[k];
        }
        k
    }
    for c in 0..n {
        for r in 0..c {
            if s[(r, c)] != Dd::ZERO || s[(c, r)] != Dd::ZERO {
                let a = root(&mut label, r);
                let b = root(&mut label, c);
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let r = root(&mut label, k);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(k);
    }
    blocks
}

/// Map from the original basis onto an orthonormal basis of the retained
/// overlap subspace: `Xᵀ S X = I`. Each column lives on one diagonal block of S.
#[derive(Debug, Clone)]
pub struct Whitening {
    /// n × m.
    transform: DMatrix<Dd>,
    /// Rows of the block each column lives on.
    column_rows: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    /// Largest over smallest retained eigenvalue of the unit-diagonal S.
    pub s_condition: f64,
    pub dropped: usize,
}

impl Whitening {
    pub fn new(overlap: &DMatrix<Dd>, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::Domain(format!(
                "cutoff must lie in (0, 1), got {cutoff}"
            )));
        }
        let n = overlap.nrows();
        if n == 0 || overlap.ncols() != n {
            return Err(Error::DegenerateBasis { dim: n, cutoff });
        }
        let mut scale = Vec::with_capacity(n);
        for k in 0..n {
            let d = overlap[(k, k)];
            if !(d.hi > 0.0) {
                return Err(Error::Domain(format!(
                    "overlap diagonal {k} is not positive: {}",
                    d.hi
                )));
            }
            scale.push(Dd::ONE / d.sqrt());
        }

        let blocks = diagonal_blocks(overlap);
        let mut spectra = Vec::with_capacity(blocks.len());
        for rows in &blocks {
            let b = rows.len();
            let sub = DMatrix::from_fn(b, b, |r, c| {
                scale[rows[r]] * overlap[(rows[r], rows[c])] * scale[rows[c]]
            });
            let (values, vectors, _) = jacobi(&sub, JACOBI_TOL_DD)?;
            let order = ascending_order(&values, &vectors);
            spectra.push((values, vectors, order));
        }
        let s_max = spectra
            .iter()
            .flat_map(|(v, _, _)| v.iter().copied())
            .fold(Dd::ZERO, |a, b| if b > a { b } else { a });
        let threshold = s_max.mul_f64(cutoff);

        let mut columns: Vec<(usize, usize)> = Vec::new();
        let mut s_min = s_max;
        for (bi, (values, _, order)) in spectra.iter().enumerate() {
            for &k in order {
                if values[k] > Dd::ZERO && values[k] >= threshold {
                    columns.push((bi, k));
                    if values[k] < s_min {
                        s_min = values[k];
                    }
                }
            }
        }
        if columns.is_empty() {
            return Err(Error::DegenerateBasis { dim: n, cutoff });
        }
        let m = columns.len();
        let mut transform = DMatrix::from_element(n, m, Dd::ZERO);
        let mut column_rows = Vec::with_capacity(m);
        for (col, &(bi, k)) in columns.iter().enumerate() {
            let rows = &blocks[bi];
            let (values, vectors, _) = &spectra[bi];
            let inv_sqrt = Dd::ONE / values[k].sqrt();
            for (local, &row) in rows.iter().enumerate() {
                transform[(row, col)] = scale[row] * vectors[(local, k)] * inv_sqrt;
            }
            column_rows.push(bi);
        }
        Ok(Self {
            transform,
            column_rows,
            blocks,
            s_condition: (s_max / s_min).to_f64(),
            dropped: n - m,
        })
    }

    pub fn retained(&self) -> usize {
        self.transform.ncols()
    }

    pub fn dim(&self) -> usize {
        self.transform.nrows()
    }

    /// `Xᵀ A X` in double-double, using the block support of the columns of X.
    fn project(&self, a: &DMatrix<Dd>) -> DMatrix<Dd> {
        let n = self.dim();
        let m = self.retained();
        let x = &self.transform;
        let mut ax = DMatrix::from_element(n, m, Dd::ZERO);
        for col in 0..m {
            let support = &self.blocks[self.column_rows[col]];
            for r in 0..n {
                let mut acc = Dd::ZERO;
                for &c in support {
                    let arc = a[(r, c)];
                    if arc != Dd::ZERO {
                        acc += arc * x[(c, col)];
                    }
                }
                ax[(r, col)] = acc;
            }
        }
        let mut out = DMatrix::from_element(m, m, Dd::ZERO);
        for p in 0..m {
            let support = &self.blocks[self.column_rows[p]];
            for q in 0..m {
                let mut acc = Dd::ZERO;
                for &r in support {
                    acc += x[(r, p)] * ax[(r, q)];
                }
                out[(p, q)] = acc;
            }
        }
        out
    }

    /// `X Y` for a whitened-space matrix Y.
    fn lift(&self, y: &DMatrix<f64>) -> DMatrix<Dd> {
        let n = self.dim();
        let m = self.retained();
        let mut c = DMatrix::from_element(n, y.ncols(), Dd::ZERO);
        let mut row_columns: Vec<Vec<usize>> = vec![Vec::new(); n];
        for col in 0..m {
            for &r in &self.blocks[self.column_rows[col]] {
                row_columns[r].push(col);
            }
        }
        for k in 0..y.ncols() {
            for r in 0..n {
                let mut acc = Dd::ZERO;
                for &col in &row_columns[r] {
                    acc += self.transform[(r, col)].mul_f64(y[(col, k)]);
                }
                c[(r, k)] = acc;
            }
        }
        c
    }

    /// The whitened operator `W = Xᵀ H X`, rounded to `f64`, and its
    /// relative asymmetry before symmetrization.
    pub fn whitened(&self, hamiltonian: &DMatrix<Dd>) -> (DMatrix<f64>, f64) {
        let (w, asym) = self.whitened_dd(hamiltonian);
        (dd::round(&w), asym)
    }

    fn whitened_dd(&self, hamiltonian: &DMatrix<Dd>) -> (DMatrix<Dd>, f64) {
        let w = self.project(hamiltonian);
        let m = w.nrows();
        let scale = w
            .iter()
            .map(|x| x.hi.abs())
            .fold(f64::MIN_POSITIVE, f64::max);
        let mut asym = 0.0f64;
        let sym = DMatrix::from_fn(m, m, |r, c| {
            asym = asym.max((w[(r, c)] - w[(c, r)]).to_f64().abs());
            (w[(r, c)] + w[(c, r)]).mul_f64(0.5)
        });
        (sym, asym / scale)
    }

    /// Solve `H c = E S c` on the retained subspace.
    ///
    /// The whitened operator is diagonalized in `f64`; each eigenvalue is then
    /// replaced by the double-double Rayleigh quotient of its eigenvector,
    /// whose error is quadratic in the eigenvector error.
    pub fn solve(&self, hamiltonian: &DMatrix<Dd>) -> Result<EigenSolution> {
        let (w_dd, asym) = self.whitened_dd(hamiltonian);
        let eig = symmetric_eig(&dd::round(&w_dd))?;
        let y = &eig.eigenvectors;
        let m = y.nrows();
        let refined: Vec<Dd> = (0..y.ncols())
            .map(|k| {
                let mut num = Dd::ZERO;
                let mut den = Dd::ZERO;
                for r in 0..m {
                    let yr = y[(r, k)];
                    if yr == 0.0 {
                        continue;
                    }
                    let mut acc = Dd::ZERO;
                    for c in 0..m {
                        let wrc = w_dd[(r, c)];
                        if wrc != Dd::ZERO && y[(c, k)] != 0.0 {
                            acc += wrc.mul_f64(y[(c, k)]);
                        }
                    }
                    num += acc.mul_f64(yr);
                    den += Dd::new(yr).mul_f64(yr);
                }
                num / den
            })
            .collect();
        let order = ascending_order(&refined, y);
        let vectors = DMatrix::from_fn(m, order.len(), |r, c| y[(r, order[c])]);
        let coefficients_dd = self.lift(&vectors);
        Ok(EigenSolution {
            eigenvalues: order.iter().map(|&k| refined[k].to_f64()).collect(),
            coefficients: dd::round(&coefficients_dd),
            coefficients_dd,
            whitened_vectors: vectors,
            s_condition: self.s_condition,
            dropped: self.dropped,
            whitened_asymmetry: asym,
        })
    }
}

/// Result of a generalized solve.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are S-orthonormal eigenvectors in the original basis.
    pub coefficients: DMatrix<f64>,
    /// The same eigenvectors before rounding; the overlap is too badly
    /// conditioned for `f64` coefficients to stay S-orthonormal.
    pub coefficients_dd: DMatrix<Dd>,
    /// Eigenvectors of the whitened operator.
    pub whitened_vectors: DMatrix<f64>,
    pub s_condition: f64,
    pub dropped: usize,
    /// max |W - Wᵀ| / max |W| of the whitened operator before symmetrization.
    pub whitened_asymmetry: f64,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest normalized residual `‖Hc - ESc‖ / ((‖H‖ + |E| ‖S‖) ‖c‖)`.
    pub fn max_residual(&self, pair: &MatrixPair) -> f64 {
        let h = pair.hamiltonian_dd();
        let s = pair.overlap_dd();
        let n = h.nrows();
        let h_norm = frobenius(&h, false);
        let s_norm = frobenius(&s, false);
        let c = &self.coefficients_dd;
        let mut worst = 0.0f64;
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let mut r2 = Dd::ZERO;
            let mut c2 = Dd::ZERO;
            for r in 0..n {
                let mut acc = Dd::ZERO;
                for q in 0..n {
                    acc += (h[(r, q)] - s[(r, q)].mul_f64(e)) * c[(q, k)];
                }
                r2 += acc * acc;
                c2 += c[(r, k)] * c[(r, k)];
            }
            let denom = (h_norm + e.abs() * s_norm) * c2.sqrt().to_f64();
            worst = worst.max(r2.sqrt().to_f64() / denom);
        }
        worst
    }

    /// `max |Cᵀ S C - I|`, evaluated in double-double.
    pub fn orthonormality_error(&self, pair: &MatrixPair) -> f64 {
        let s = pair.overlap_dd();
        let c = &self.coefficients_dd;
        let n = s.nrows();
        let m = c.ncols();
        let mut sc = DMatrix::from_element(n, m, Dd::ZERO);
        for k in 0..m {
            for r in 0..n {
                let mut acc = Dd::ZERO;
                for q in 0..n {
                    if s[(r, q)] != Dd::ZERO {
                        acc += s[(r, q)] * c[(q, k)];
                    }
                }
                sc[(r, k)] = acc;
            }
        }
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let mut acc = Dd::ZERO;
                for r in 0..n {
                    acc += c[(r, a)] * sc[(r, b)];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((acc.to_f64() - target).abs());
            }
        }
        worst
    }
}

pub fn solve_generalized(pair: &MatrixPair, cutoff: f64) -> Result<EigenSolution> {
    Whitening::new(&pair.overlap_dd(), cutoff)?.solve(&pair.hamiltonian_dd())
}

pub fn lowest_k(pair: &MatrixPair, k: usize, cutoff: f64) -> Result<Vec<f64>> {
    let sol = solve_generalized(pair, cutoff)?;
    if k > sol.len() {
        return Err(Error::Range(format!(
            "requested {k} eigenvalues but only {} directions retained",
            sol.len()
        )));
    }
    Ok(sol.eigenvalues[..k].to_vec())
}
