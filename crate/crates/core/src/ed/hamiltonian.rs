use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest chain handled by dense diagonalization.
pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::invalid(
                "boundary",
                format!("expected `open` or `periodic`, got `{other}`"),
            )),
        }
    }
}

/// Field-independent and field-coupled parts of `H(Bx) = H0 − Bx X`, with
/// `H0 = J Σ σᶻσᶻ − Bz Σ σᶻ` diagonal and `X = Σ σˣ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParts {
    pub sites: usize,
    /// Diagonal of `H0` in the product basis.
    pub h0: DVector<f64>,
    pub x: DMatrix<f64>,
}

impl DenseParts {
    pub fn new(sites: usize, j: f64, bz: f64, boundary: Boundary) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&sites) {
            return Err(Error::invalid("L", format!("must lie in 2..={MAX_SITES}, got {sites}")));
        }
        let dim = 1usize << sites;
        let mut bonds: Vec<(usize, usize)> = (0..sites - 1).map(|i| (i, i + 1)).collect();
        // On two sites the wrap-around bond would repeat the only bond.
        if boundary == Boundary::Periodic && sites > 2 {
            bonds.push((sites - 1, 0));
        }
        let spin = |s: usize, i: usize| if s >> i & 1 == 0 { 1.0 } else { -1.0 };
        let h0 = DVector::from_fn(dim, |s, _| {
            let zz: f64 = bonds.iter().map(|&(a, b)| spin(s, a) * spin(s, b)).sum();
            let z: f64 = (0..sites).map(|i| spin(s, i)).sum();
            j * zz - bz * z
        });
        let mut x = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            for i in 0..sites {
                x[(s ^ (1 << i), s)] = 1.0;
            }
        }
        Ok(DenseParts { sites, h0, x })
    }

    pub fn dim(&self) -> usize {
        self.h0.len()
    }

    /// `H0 − bx X`.
    pub fn at(&self, bx: f64) -> DMatrix<f64> {
        let mut h = self.x.scale(-bx);
        for (i, d) in self.h0.iter().enumerate() {
            h[(i, i)] += d;
        }
        h
    }
}

/// Dense Hamiltonian at one transverse field.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseModel {
    pub sites: usize,
    pub j: f64,
    pub bx: f64,
    pub bz: f64,
    pub boundary: Boundary,
    pub matrix: DMatrix<f64>,
}

/// `H = J Σ σᶻ_i σᶻ_{i+1} − Bx Σ σˣ_i − Bz Σ σᶻ_i` in the σᶻ product basis,
/// where bit `i` of the basis index set means spin `i` points down.
pub fn ltim_hamiltonian(sites: usize, j: f64, bx: f64, bz: f64, boundary: Boundary) -> Result<DenseModel> {
    let parts = DenseParts::new(sites, j, bz, boundary)?;
    Ok(DenseModel {
        sites,
        j,
        bx,
        bz,
        boundary,
        matrix: parts.at(bx),
    })
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (energies, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_site_ising_diagonal() {
        let m = ltim_hamiltonian(2, 1.0, 0.0, 0.0, Boundary::Open).unwrap();
        assert_eq!(
            m.matrix,
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]))
        );
    }

    #[test]
    fn free_spins_in_transverse_field() {
        let m = ltim_hamiltonian(2, 0.0, 1.0, 0.0, Boundary::Open).unwrap();
        let (e, _) = sorted_eigen(m.matrix);
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in e.iter().zip(want) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_transverse_field_is_diagonal() {
        let m = ltim_hamiltonian(5, 1.0, 0.0, 0.3, Boundary::Periodic).unwrap();
        assert_eq!(m.matrix, DMatrix::from_diagonal(&m.matrix.diagonal()));
        let fully_up = m.matrix[(0, 0)];
        assert_relative_eq!(fully_up, 5.0 - 0.3 * 5.0, epsilon = 1e-14);
    }

    #[test]
    fn symmetric_and_sized() {
        let m = ltim_hamiltonian(6, 1.0, 0.7, 0.4, Boundary::Open).unwrap();
        assert_eq!(m.matrix.nrows(), 64);
        assert_eq!(m.matrix, m.matrix.transpose());
        assert!(ltim_hamiltonian(1, 1.0, 0.0, 0.0, Boundary::Open).is_err());
        assert!(ltim_hamiltonian(13, 1.0, 0.0, 0.0, Boundary::Open).is_err());
    }

    #[test]
    fn periodic_adds_wrap_bond() {
        let open = ltim_hamiltonian(4, 1.0, 0.0, 0.0, Boundary::Open).unwrap();
        let ring = ltim_hamiltonian(4, 1.0, 0.0, 0.0, Boundary::Periodic).unwrap();
        // All spins up: three bonds versus four.
        assert_eq!(open.matrix[(0, 0)], 3.0);
        assert_eq!(ring.matrix[(0, 0)], 4.0);
    }

    #[test]
    fn eigen_pairs_are_sorted_and_orthonormal() {
        let m = ltim_hamiltonian(4, 1.0, 0.9, 0.3, Boundary::Open).unwrap();
        let (e, v) = sorted_eigen(m.matrix.clone());
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        let d = v.transpose() * &m.matrix * &v;
        for i in 0..16 {
            assert_relative_eq!(d[(i, i)], e[i], epsilon = 1e-12);
        }
        assert!((v.transpose() * &v - DMatrix::identity(16, 16)).amax() < 1e-12);
    }
}
