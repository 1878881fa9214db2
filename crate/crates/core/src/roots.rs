//! Roots of type A_{r-1}, ordered root bases, Hamiltonian-path families and lattice reduction.

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat, rint, Poly, Rat};

/// A weight `sum_i a_i e_i` with `sum_i a_i = 0`, identified with a vector via the standard inner product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<Rat>);

impl WeightVector {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        let sum: Rat = coords.iter().sum();
        if !sum.is_zero() {
            return Err(Error::OutOfRange("weight coordinates must sum to zero".into()));
        }
        Ok(WeightVector(coords))
    }

    pub fn zero(r: usize) -> Self {
        WeightVector(vec![Rat::zero(); r])
    }

    /// The root `alpha^{ij} = e_i - e_j` (0-based indices).
    pub fn root(r: usize, i: usize, j: usize) -> Self {
        let mut v = vec![Rat::zero(); r];
        v[i] += rint(1);
        v[j] -= rint(1);
        WeightVector(v)
    }

    /// `c = (1/r, ..., 1/r, 1/r - 1)`.
    pub fn c_vector(r: usize) -> Self {
        let mut v = vec![rat(1, r as i64); r];
        v[r - 1] -= rint(1);
        WeightVector(v)
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        WeightVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn dot(&self, other: &Self) -> Rat {
        dot(&self.0, &other.0)
    }

    /// `(sigma a)_i = a_{sigma^{-1}(i)}`.
    pub fn permute(&self, sigma: &[usize]) -> Self {
        let mut v = vec![Rat::zero(); self.0.len()];
        for (i, &s) in sigma.iter().enumerate() {
            v[s] = self.0[i].clone();
        }
        WeightVector(v)
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordered basis of `r - 1` roots together with the change of coordinates to `y_k = <beta_k, x>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBasis {
    r: usize,
    roots: Vec<(usize, usize)>,
    /// `section[i][k]`: coefficient of `y_k` in `x_i` on the slice `x_r = 0`.
    section: Vec<Vec<Rat>>,
}

impl RootBasis {
    /// Builds a basis from root index pairs `(i, j)` meaning `e_i - e_j` (0-based).
    pub fn new(r: usize, roots: Vec<(usize, usize)>) -> Result<Self> {
        let n = r.checked_sub(1).ok_or_else(|| Error::OutOfRange("rank must be at least 2".into()))?;
        if roots.len() != n || roots.iter().any(|&(i, j)| i == j || i >= r || j >= r) {
            return Err(Error::OutOfRange(format!("need {n} roots e_i - e_j with distinct indices below {r}")));
        }
        let m: Vec<Vec<Rat>> = roots.iter().map(|&(i, j)| WeightVector::root(r, i, j).0[..n].to_vec()).collect();
        let inv = invert_matrix(&m).ok_or(Error::DependentRoots)?;
        let mut section = inv;
        section.push(vec![Rat::zero(); n]);
        Ok(RootBasis { r, roots, section })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[(usize, usize)] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> WeightVector {
        let (i, j) = self.roots[k];
        WeightVector::root(self.r, i, j)
    }

    pub fn section(&self) -> &[Vec<Rat>] {
        &self.section
    }

    /// Coordinates of `a` in this basis: `a = sum_k c_k beta_k`.
    pub fn coords(&self, a: &WeightVector) -> Vec<Rat> {
        let n = self.roots.len();
        (0..n).map(|k| (0..self.r).map(|i| &self.section[i][k] * &a.0[i]).sum()).collect()
    }

    pub fn from_coords(&self, c: &[Rat]) -> WeightVector {
        let mut acc = WeightVector::zero(self.r);
        for (k, ck) in c.iter().enumerate() {
            acc = acc.add(&self.root(k).scale(ck));
        }
        acc
    }

    /// Components `d_i = <beta_i, a>` of the derivative along `a` in `y` coordinates.
    pub fn dual_direction(&self, a: &WeightVector) -> Vec<Rat> {
        (0..self.roots.len()).map(|k| self.root(k).dot(a)).collect()
    }

    /// Rewrites a translation-invariant polynomial in `x_1..x_r, delta_2..delta_r` in terms of
    /// `y_1..y_{r-1}, delta_2..delta_r`.
    pub fn to_y(&self, p: &Poly) -> Result<Poly> {
        let r = self.r;
        let n = r - 1;
        let nd = p.nvars() - r;
        let shift: Poly = (0..r).fold(Poly::zero(p.nvars()), |acc, i| &acc + &p.deriv(i));
        if !shift.is_zero() {
            return Err(Error::NotRootExpressible);
        }
        let out_n = n + nd;
        let mut images = Vec::with_capacity(p.nvars());
        for i in 0..r {
            let mut coeffs = self.section[i].clone();
            coeffs.resize(out_n, Rat::zero());
            images.push(Poly::linear(out_n, &coeffs));
        }
        for d in 0..nd {
            images.push(Poly::var(out_n, n + d));
        }
        Ok(p.substitute(&images))
    }

    /// `sigma B`: every root index is mapped through `sigma`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Self> {
        RootBasis::new(self.r, self.roots.iter().map(|&(i, j)| (sigma[i], sigma[j])).collect())
    }
}

fn invert_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for row in 0..n {
            if row != col && !a[row][col].is_zero() {
                let f = a[row][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[row].iter_mut().zip(pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `B_sigma = (alpha^{sigma(r-1) sigma(r)}, ..., alpha^{sigma(1) sigma(2)})`; `sigma` is 0-based.
pub fn basis_from_permutation(sigma: &[usize]) -> Result<RootBasis> {
    let r = sigma.len();
    let roots = (0..r - 1).map(|k| (sigma[r - 2 - k], sigma[r - 1 - k])).collect();
    RootBasis::new(r, roots)
}

/// All `B_sigma` with `sigma(1) = m` (1-based `m`), in lexicographic order of `sigma`.
pub fn hamiltonian_family(r: usize, m: usize) -> Result<Vec<RootBasis>> {
    if m == 0 || m > r {
        return Err(Error::OutOfRange(format!("family index {m} outside 1..={r}")));
    }
    let rest: Vec<usize> = (0..r).filter(|&i| i != m - 1).collect();
    let mut out: Vec<RootBasis> = Vec::new();
    for tail in rest.iter().copied().permutations(r - 1) {
        let mut sigma = vec![m - 1];
        sigma.extend(tail);
        let b = basis_from_permutation(&sigma)?;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    Ok(out)
}

/// Splits `a = [a]_B + {a}_B` with `[a]_B` in the root lattice spanned by `B` (floors of coordinates).
pub fn lattice_reduce(a: &WeightVector, basis: &RootBasis) -> (WeightVector, WeightVector) {
    let c = basis.coords(a);
    let floors: Vec<Rat> = c.iter().map(|x| Rat::from_integer(x.numer().div_floor(x.denom()))).collect();
    let int = basis.from_coords(&floors);
    let frac = a.sub(&int);
    (int, frac)
}

/// Orthogonal rational vector `w` with squared norm `q`; `w / sqrt(q)` is a unit vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoVector {
    pub w: Vec<Rat>,
    pub q: Rat,
}

/// Gram-Schmidt without normalisation.
pub fn gram_schmidt(vectors: &[Vec<Rat>]) -> Vec<OrthoVector> {
    let mut out: Vec<OrthoVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for o in &out {
            let f = dot(v, &o.w) / &o.q;
            for (x, y) in w.iter_mut().zip(&o.w) {
                *x -= &f * y;
            }
        }
        let q = dot(&w, &w);
        out.push(OrthoVector { w, q });
    }
    out
}

/// Orthogonal basis of the sum-zero hyperplane from the simple roots `e_i - e_{i+1}`.
pub fn orthonormal_basis(r: usize) -> Vec<OrthoVector> {
    let simple: Vec<Vec<Rat>> = (0..r - 1).map(|i| WeightVector::root(r, i, i + 1).0).collect();
    gram_schmidt(&simple)
}
