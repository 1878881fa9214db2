//! Symmetric functions of the centred coordinates and the generating polynomial `Q`.
//!
//! Polynomials "in x" use the layout `x_1..x_r, delta_2..delta_r`; polynomials "in y" use
//! `y_1..y_{r-1}, delta_2..delta_r`.

use itertools::Itertools;

use crate::error::Result;
use crate::exact::{rat, rint, Poly, Rat};
use crate::roots::{OrthoVector, RootBasis, WeightVector};

/// Number of variables of a polynomial in x.
pub fn x_nvars(r: usize) -> usize {
    2 * r - 1
}

/// Number of variables of a polynomial in y.
pub fn y_nvars(r: usize) -> usize {
    2 * r - 2
}

/// Index of `delta_k` in the x layout.
pub fn x_delta(r: usize, k: usize) -> usize {
    r + k - 2
}

/// Index of `delta_k` in the y layout.
pub fn y_delta(r: usize, k: usize) -> usize {
    r - 1 + k - 2
}

/// Centred coordinates `x_i - (x_1 + ... + x_r)/r`.
pub fn centred(r: usize) -> Vec<Poly> {
    let nv = x_nvars(r);
    let mean = Poly::linear(nv, &vec![rat(1, r as i64); r]);
    (0..r).map(|i| &Poly::var(nv, i) - &mean).collect()
}

/// `tau_k`: the k-th elementary symmetric polynomial of the centred coordinates.
pub fn tau_poly(k: usize, r: usize) -> Poly {
    let nv = x_nvars(r);
    let mut e = vec![Poly::zero(nv); r + 1];
    e[0] = Poly::one(nv);
    for xb in centred(r) {
        for j in (1..=r).rev() {
            let t = &e[j - 1] * &xb;
            e[j] = &e[j] + &t;
        }
    }
    e.swap_remove(k)
}

/// Power sum `sum_i xbar_i^k` of the centred coordinates.
pub fn power_sum(k: u32, r: usize) -> Poly {
    centred(r).iter().fold(Poly::zero(x_nvars(r)), |acc, x| &acc + &x.pow(k))
}

/// Complete homogeneous symmetric polynomial of degree `m` in the first `k` of `nvars` variables.
pub fn complete_homogeneous(m: u32, k: usize, nvars: usize) -> Poly {
    let mut h = Poly::zero(nvars);
    for combo in (0..k).combinations_with_replacement(m as usize) {
        let mut e = smallvec::SmallVec::from_elem(0, nvars);
        for i in combo {
            e[i] += 1;
        }
        h.add_term(e, rint(1));
    }
    h
}

/// `prod_{a<b} (x_{vars[a]} - x_{vars[b]})`.
pub fn vandermonde(vars: &[usize], nvars: usize) -> Poly {
    let mut v = Poly::one(nvars);
    for (a, &i) in vars.iter().enumerate() {
        for &j in &vars[a + 1..] {
            v = &v * &(&Poly::var(nvars, i) - &Poly::var(nvars, j));
        }
    }
    v
}

/// The polynomial `Q(x) = sum_k delta_k tau_k(x)` together with its rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSpec {
    pub r: usize,
    pub q: Poly,
}

impl QSpec {
    pub fn standard(r: usize) -> Self {
        let nv = x_nvars(r);
        let q = (2..=r).fold(Poly::zero(nv), |acc, k| &acc + &(&Poly::var(nv, x_delta(r, k)) * &tau_poly(k, r)));
        QSpec { r, q }
    }

    pub fn in_y(&self, basis: &RootBasis) -> Result<Poly> {
        basis.to_y(&self.q)
    }
}

/// `Q_a`: derivative of `Q` along the vector `a`, written in the y coordinates of `basis`.
pub fn q_directional(q: &QSpec, basis: &RootBasis, a: &WeightVector) -> Result<Poly> {
    basis.to_y(&q.q.directional(a.coords()))
}

/// Same derivative computed in y coordinates as `sum_i <beta_i, a> d/dy_i`.
pub fn q_directional_y(q_y: &Poly, basis: &RootBasis, a: &WeightVector) -> Poly {
    q_y.directional(&basis.dual_direction(a))
}

/// `Hess_B(Q)_{ij} = d/dy_i Q_{beta_j}`, computed from x-derivatives and the basis section.
pub fn hessian_matrix(q: &QSpec, basis: &RootBasis) -> Result<Vec<Vec<Poly>>> {
    let n = basis.len();
    let sec = basis.section();
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        let col: Vec<Rat> = sec.iter().map(|row| row[i].clone()).collect();
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let qj = q.q.directional(basis.root(j).coords());
            row.push(basis.to_y(&qj.directional(&col))?);
        }
        h.push(row);
    }
    Ok(h)
}

pub fn hessian_det(q: &QSpec, basis: &RootBasis) -> Result<Poly> {
    Ok(det(&hessian_matrix(q, basis)?, y_nvars(q.r)))
}

/// Jacobian determinant `det(d Q_{beta_j} / d y_i)` of the map `y -> (Q_{beta_j})_j`.
pub fn measure_jacobian(q_y: &Poly, basis: &RootBasis) -> Poly {
    let n = basis.len();
    let u: Vec<Poly> = (0..n).map(|j| q_directional_y(q_y, basis, &basis.root(j))).collect();
    let m: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| u[j].deriv(i)).collect()).collect();
    det(&m, q_y.nvars())
}

/// Determinant by the Leibniz formula.
pub fn det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    let mut acc = Poly::zero(nvars);
    for perm in (0..n).permutations(n) {
        let inversions =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        let mut term = Poly::one(nvars);
        for (i, &p) in perm.iter().enumerate() {
            term = &term * &m[i][p];
            if term.is_zero() {
                break;
            }
        }
        acc = if inversions % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `Q_{w_a w_b}` and `q_a q_b`: the second derivative along unit vectors is the first divided
/// by the square root of the second.
pub fn ortho_second_derivative(q: &QSpec, ua: &OrthoVector, ub: &OrthoVector) -> (Poly, Rat) {
    (q.q.directional(&ua.w).directional(&ub.w), &ua.q * &ub.q)
}

/// Drops terms with `delta_k` above `caps[k-3]` for `k >= 3`; `first_delta` is the index of `delta_2`.
pub fn truncate_deltas(p: &Poly, first_delta: usize, caps: &[u32]) -> Poly {
    if caps.is_empty() {
        return p.clone();
    }
    p.filter(|e| caps.iter().enumerate().all(|(k, &c)| e[first_delta + 1 + k] <= c as i32))
}

/// Whether `p` is unchanged by `x -> x + t(1, ..., 1)`.
pub fn is_translation_invariant(p: &Poly, r: usize) -> bool {
    (0..r).fold(Poly::zero(p.nvars()), |acc, i| &acc + &p.deriv(i)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::orthonormal_basis;

    #[test]
    fn tau_two_rank_two() {
        // tau_2 = -(x1 - x2)^2 / 4
        let t = tau_poly(2, 2);
        let d = &Poly::var(3, 0) - &Poly::var(3, 1);
        assert_eq!(t, d.pow(2).scale(&rat(-1, 4)));
    }

    #[test]
    fn tau_two_is_minus_half_norm() {
        for r in 2..=4 {
            assert_eq!(tau_poly(2, r), power_sum(2, r).scale(&rat(-1, 2)));
            assert!(tau_poly(1, r).is_zero());
        }
    }

    #[test]
    fn newton_identity_for_tau_three() {
        // 3 e3 = p3 (since e1 = 0)
        for r in 3..=5 {
            assert_eq!(tau_poly(3, r).scale(&rint(3)), power_sum(3, r));
        }
    }

    #[test]
    fn directional_derivative_rank_two() {
        let q = QSpec::standard(2);
        let b = RootBasis::new(2, vec![(0, 1)]).unwrap();
        let d = q_directional(&q, &b, &b.root(0)).unwrap();
        assert_eq!(d, Poly::monomial(2, smallvec::smallvec![1, 1], rint(-1)));
        let c = q_directional(&q, &b, &WeightVector::c_vector(2)).unwrap();
        assert_eq!(c, Poly::monomial(2, smallvec::smallvec![1, 1], rat(-1, 2)));
    }

    #[test]
    fn hessian_equals_measure_jacobian() {
        for r in 2..=4 {
            let q = QSpec::standard(r);
            for b in crate::roots::hamiltonian_family(r, r).unwrap() {
                let qy = q.in_y(&b).unwrap();
                assert_eq!(hessian_det(&q, &b).unwrap(), measure_jacobian(&qy, &b));
            }
        }
    }

    #[test]
    fn ortho_second_derivative_rank_two() {
        let q = QSpec::standard(2);
        let u = &orthonormal_basis(2)[0];
        let (num, qq) = ortho_second_derivative(&q, u, u);
        // Q_uu = num / sqrt(qq) = -delta_2
        assert_eq!(qq, rint(4));
        assert_eq!(num, Poly::var(3, 2).scale(&rint(-2)));
    }

    #[test]
    fn complete_homogeneous_counts() {
        let h = complete_homogeneous(2, 3, 3);
        assert_eq!(h.len(), 6);
        assert_eq!(complete_homogeneous(0, 2, 2), Poly::one(2));
    }
}
