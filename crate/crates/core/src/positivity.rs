//! Moment matrices of the quadratic forms on the quadrant and the half-plane,
//! Hankel and Toeplitz matrices, and an eigenvalue-based PSD test.
//!
//! Rows and columns are indexed in graded-lexicographic order: by m + n
//! ascending, then by m descending. For d = 1 on the quadrant this gives
//! (0,0), (1,0), (0,1), (1,1).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::HerglotzTable;
use crate::sequences::{ExtendedMomentTable, HamburgerTable, MomentTable, HERMITIAN_TOLERANCE};

/// Relative factor applied to the spectral norm to obtain the PSD tolerance.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Hermitian matrix with an index label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    labels: Vec<(i64, i64)>,
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Checks A = A* to 1e-12 relative to the largest entry.
    pub fn new(labels: Vec<(i64, i64)>, data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() || data.nrows() != labels.len() {
            return Err(Error::Range("matrix must be square with one label per row".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = HERMITIAN_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        let n = data.nrows();
        for i in 0..n {
            for j in i..n {
                if (data[(i, j)] - data[(j, i)].conj()).norm() > tol {
                    return Err(Error::Invariant(format!("matrix is not Hermitian at ({i},{j})")));
                }
            }
        }
        Ok(HermitianMatrix { labels, data })
    }

    /// Unlabelled matrix; rows are labelled (i, 0).
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Range("matrix must be square".into()));
        }
        let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new((0..n as i64).map(|i| (i, 0)).collect(), data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            labels: (0..n as i64).map(|i| (i, 0)).collect(),
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dimension(&self) -> usize {
        self.data.nrows()
    }

    pub fn labels(&self) -> &[(i64, i64)] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// v* A v.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let n = self.dimension();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += v[i].conj() * self.data[(i, j)] * v[j];
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Psd,
    NotPsd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub spectral_norm: f64,
    /// Unit vector in the eigenspace of the minimum eigenvalue, present when not PSD.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<[f64; 2]>>,
    /// Label of the basis direction the witness was built from.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_index: Option<[i64; 2]>,
}

impl PsdReport {
    pub fn is_psd(&self) -> bool {
        self.verdict == Verdict::Psd
    }

    pub fn witness_vector(&self) -> Option<Vec<Complex64>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

/// PSD test with tolerance 1e-9 × spectral norm.
///
/// The witness is the normalized projection onto the minimum eigenspace of
/// the basis vector with the largest such projection (first index on ties),
/// rotated so its largest component is real and positive. This makes it
/// independent of the eigensolver's choice of basis.
pub fn is_psd(a: &HermitianMatrix) -> PsdReport {
    let n = a.dimension();
    if n == 0 {
        return PsdReport {
            verdict: Verdict::Psd,
            min_eigenvalue: 0.0,
            tolerance: 0.0,
            spectral_norm: 0.0,
            witness: None,
            witness_index: None,
        };
    }
    let eig = a.data.clone().symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let spectral_norm = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tolerance = PSD_TOLERANCE * spectral_norm;
    if min_eigenvalue >= -tolerance {
        return PsdReport {
            verdict: Verdict::Psd,
            min_eigenvalue,
            tolerance,
            spectral_norm,
            witness: None,
            witness_index: None,
        };
    }

    let cluster = 1e-10 * spectral_norm;
    let basis: Vec<usize> = (0..n).filter(|&k| values[k] - min_eigenvalue <= cluster).collect();
    // Projection of e_i onto the eigenspace: Σ_k conj(V[i,k]) V[:,k].
    let projection_norm2 = |i: usize| -> f64 { basis.iter().map(|&k| eig.eigenvectors[(i, k)].norm_sqr()).sum() };
    let mut best = 0;
    let mut best_norm = projection_norm2(0);
    for i in 1..n {
        let p = projection_norm2(i);
        if p > best_norm * (1.0 + 1e-9) {
            best = i;
            best_norm = p;
        }
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|r| basis.iter().map(|&k| eig.eigenvectors[(r, k)] * eig.eigenvectors[(best, k)].conj()).sum())
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 * (1.0 + 1e-9) { (i, z.norm()) } else { acc })
        .0;
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
        if z.norm() < 1e-15 {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let (m, nn) = a.labels[best];
    PsdReport {
        verdict: Verdict::NotPsd,
        min_eigenvalue,
        tolerance,
        spectral_norm,
        witness: Some(v.iter().map(|z| [z.re, z.im]).collect()),
        witness_index: Some([m, nn]),
    }
}

/// Quadrant indices 0 ≤ m, n ≤ d in graded-lexicographic order.
pub fn quadrant_indices(d: usize) -> Vec<(i64, i64)> {
    let d = d as i64;
    let mut out = Vec::new();
    for total in 0..=2 * d {
        for m in (0..=d).rev() {
            let n = total - m;
            if (0..=d).contains(&n) {
                out.push((m, n));
            }
        }
    }
    out
}

/// Half-plane indices m + n ≥ 0, max(|m|, |n|) ≤ d in graded-lexicographic order.
pub fn halfplane_indices(d: usize) -> Vec<(i64, i64)> {
    let d = d as i64;
    let mut out = Vec::new();
    for total in 0..=2 * d {
        for m in (-d..=d).rev() {
            let n = total - m;
            if (-d..=d).contains(&n) {
                out.push((m, n));
            }
        }
    }
    out
}

/// Gram matrix with entry γ_{m+q, n+p} at ((m,n),(p,q)).
pub fn moment_matrix_quadrant(gamma: &MomentTable, d: usize) -> Result<HermitianMatrix> {
    if 2 * d > gamma.degree() || 4 * d > gamma.max_total() {
        return Err(Error::Range(format!(
            "d = {d} needs a square table of degree ≥ {}, got degree {} with total ≤ {}",
            2 * d,
            gamma.degree(),
            gamma.max_total()
        )));
    }
    gamma.check_hermitian()?;
    let labels = quadrant_indices(d);
    let k = labels.len();
    let data = DMatrix::from_fn(k, k, |i, j| {
        let (m, n) = labels[i];
        let (p, q) = labels[j];
        gamma.get((m + q) as usize, (n + p) as usize).expect("index lies in the table")
    });
    HermitianMatrix::new(labels, data)
}

/// Gram matrix with entry Γ_{m+q, n+p} at ((m,n),(p,q)) over the half-plane indices.
pub fn moment_matrix_halfplane(big: &ExtendedMomentTable, d: usize) -> Result<HermitianMatrix> {
    if 2 * d > big.window() {
        return Err(Error::Range(format!("d = {d} needs window ≥ {}, got {}", 2 * d, big.window())));
    }
    let tol = HERMITIAN_TOLERANCE * (1.0 + big.max_abs());
    if let Some((m, n)) = big
        .indices()
        .find(|&(m, n)| (big.get(m, n).unwrap() - big.get(n, m).unwrap().conj()).norm() > tol)
    {
        return Err(Error::Invariant(format!("extended table is not Hermitian at ({m},{n})")));
    }
    let labels = halfplane_indices(d);
    let k = labels.len();
    let data = DMatrix::from_fn(k, k, |i, j| {
        let (m, n) = labels[i];
        let (p, q) = labels[j];
        big.get(m + q, n + p).expect("index lies in the window")
    });
    HermitianMatrix::new(labels, data)
}

/// H[i][j] = s_{i+j}, 0 ≤ i, j ≤ d.
pub fn hankel(s: &HamburgerTable, d: usize) -> Result<HermitianMatrix> {
    if s.len() < 2 * d + 1 {
        return Err(Error::Range(format!("Hankel matrix of size {} needs {} moments", d + 1, 2 * d + 1)));
    }
    let v = s.to_f64();
    let data = DMatrix::from_fn(d + 1, d + 1, |i, j| Complex64::new(v[i + j], 0.0));
    HermitianMatrix::new((0..=d as i64).map(|i| (i, 0)).collect(), data)
}

/// T[i][j] = s_{i−j}, 0 ≤ i, j ≤ d.
pub fn toeplitz(s: &HerglotzTable, d: usize) -> Result<HermitianMatrix> {
    if s.degree() < d {
        return Err(Error::Range(format!("Toeplitz matrix of size {} needs |n| ≤ {d}", d + 1)));
    }
    let data = DMatrix::from_fn(d + 1, d + 1, |i, j| s.get(i as i64 - j as i64).unwrap());
    HermitianMatrix::new((0..=d as i64).map(|i| (i, 0)).collect(), data)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dimension: usize,
    index: Vec<[i64; 2]>,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dimension();
        MatrixJson {
            dimension: n,
            index: self.labels.iter().map(|&(m, k)| [m, k]).collect(),
            entries: (0..n)
                .map(|i| (0..n).map(|j| [self.data[(i, j)].re, self.data[(i, j)].im]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        let n = raw.dimension;
        if raw.index.len() != n || raw.entries.len() != n || raw.entries.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("matrix shape does not match its dimension"));
        }
        let data = DMatrix::from_fn(n, n, |i, j| Complex64::new(raw.entries[i][j][0], raw.entries[i][j][1]));
        HermitianMatrix::new(raw.index.iter().map(|&[a, b]| (a, b)).collect(), data).map_err(D::Error::custom)
    }
}
