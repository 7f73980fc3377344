//! Dense symmetric eigendecomposition and Laplacian pseudoinverse.
//!
//! Graphs here stay small (a few hundred nodes at most), so the cyclic Jacobi
//! method is used: it is simple, deterministic, and accurate to roundoff.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Square symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Validates finiteness and symmetry (within 1e-12, relative to the largest entry).
    pub fn new(order: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::InvalidConfig(format!(
                "{} entries for a matrix of order {order}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite matrix entry".into()));
        }
        let scale = entries.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let tol = T::from_f64_lossy(1e-12) * scale;
        for i in 0..order {
            for j in i + 1..order {
                if (entries[i * order + j] - entries[j * order + i]).abs() > tol {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { order, entries })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let entries = (0..order * order)
            .map(|k| f(k / order, k % order))
            .collect();
        Self::new(order, entries)
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { T::one() } else { T::zero() })
            .expect("identity is symmetric")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.order + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    /// Plain product `self * other`, returned row-major.
    pub fn matmul(&self, other: &SymmetricMatrix<T>) -> Vec<T> {
        let n = self.order;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<T>,
    /// Row-major `n x n`; column `i` pairs with `eigenvalues[i]`.
    vectors: Vec<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector_entry(&self, row: usize, col: usize) -> T {
        self.vectors[row * self.order() + col]
    }

    pub fn eigenvector(&self, col: usize) -> Vec<T> {
        (0..self.order())
            .map(|r| self.vector_entry(r, col))
            .collect()
    }

    /// `V diag(f(lambda)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Vec<T> {
        let n = self.order();
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc += self.vector_entry(i, k) * weights[k] * self.vector_entry(j, k);
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        out
    }
}

fn off_diagonal_norm<T: Scalar>(a: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            acc += a[i * n + j] * a[i * n + j];
        }
    }
    (acc + acc).sqrt()
}

/// Cyclic Jacobi eigendecomposition.
///
/// Each eigenvector's first entry with magnitude above the Jacobi tolerance is
/// made positive, so output is deterministic for simple eigenvalues.
pub fn eigh<T: Scalar>(a: &SymmetricMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = a.order();
    let mut m = a.entries().to_vec();
    let mut v = SymmetricMatrix::<T>::identity(n).entries;
    let two = T::one() + T::one();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m, n) < T::JACOBI_TOLERANCE {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let tau = (m[q * n + q] - m[p * n + p]) / (two * apq);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = T::zero();
                m[q * n + p] = T::zero();
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m, n) >= T::JACOBI_TOLERANCE {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .expect("finite")
            .then(i.cmp(&j))
    });
    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (col, &src) in order.iter().enumerate() {
        let flip = (0..n)
            .map(|r| v[r * n + src])
            .find(|x| x.abs() > T::JACOBI_TOLERANCE)
            .is_some_and(|x| x < T::zero());
        for r in 0..n {
            let x = v[r * n + src];
            vectors[r * n + col] = if flip { -x } else { x };
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Combinatorial Laplacian `D - A` over all node labels.
pub fn laplacian<T: Scalar>(g: &Graph) -> SymmetricMatrix<T> {
    let n = g.num_nodes();
    let mut entries = vec![T::zero(); n * n];
    for v in 0..n {
        entries[v * n + v] = T::from_usize_lossy(g.degree(v));
        for &u in g.neighbors(v) {
            entries[v * n + u] = -T::one();
        }
    }
    SymmetricMatrix::new(n, entries).expect("adjacency is symmetric")
}

fn connected_spectrum<T: Scalar>(g: &Graph) -> Result<EigenDecomposition<T>> {
    let eig = eigh(&laplacian::<T>(g))?;
    let null = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l <= T::NULL_EIGENVALUE)
        .count();
    if null != 1 {
        return Err(Error::Disconnected);
    }
    Ok(eig)
}

/// Unit eigenvector of the second-smallest Laplacian eigenvalue.
pub fn fiedler_vector<T: Scalar>(g: &Graph) -> Result<Vec<T>> {
    if g.num_nodes() < 2 {
        return Err(Error::InvalidConfig(
            "Fiedler vector needs at least two nodes".into(),
        ));
    }
    Ok(connected_spectrum::<T>(g)?.eigenvector(1))
}

/// Second-smallest Laplacian eigenvalue (algebraic connectivity).
pub fn algebraic_connectivity<T: Scalar>(g: &Graph) -> Result<T> {
    let eig = eigh(&laplacian::<T>(g))?;
    eig.eigenvalues
        .get(1)
        .copied()
        .ok_or_else(|| Error::InvalidConfig("need at least two nodes".into()))
}

/// Moore-Penrose pseudoinverse of the Laplacian of a connected graph.
pub fn laplacian_pseudoinverse<T: Scalar>(g: &Graph) -> Result<SymmetricMatrix<T>> {
    let eig = connected_spectrum::<T>(g)?;
    let entries = eig.reconstruct_with(|l| {
        if l > T::NULL_EIGENVALUE {
            T::one() / l
        } else {
            T::zero()
        }
    });
    SymmetricMatrix::new(g.num_nodes(), entries)
}

/// Effective resistance between `u` and `v` given the Laplacian pseudoinverse.
pub fn effective_resistance<T: Scalar>(pinv: &SymmetricMatrix<T>, u: usize, v: usize) -> T {
    pinv.get(u, u) + pinv.get(v, v) - (pinv.get(u, v) + pinv.get(v, u))
}
