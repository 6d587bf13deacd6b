use nalgebra::DMatrix;
use num_complex::Complex64;

use super::element::{QElement, SparseVector};
use super::monomial::QMonomial;

/// A 2x2 matrix over the algebra.
pub type Mat2 = [[QElement; 2]; 2];

pub fn mat2_identity() -> Mat2 {
    [[QElement::one(), QElement::zero()], [QElement::zero(), QElement::one()]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let entry = |r: usize, c: usize| &(&a[r][0] * &b[0][c]) + &(&a[r][1] * &b[1][c]);
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    let entry = |r: usize, c: usize| &a[r][c] + &b[r][c];
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].adjoint(), a[1][0].adjoint()], [a[0][1].adjoint(), a[1][1].adjoint()]]
}

pub fn mat2_equals(a: &Mat2, b: &Mat2) -> bool {
    (0..2).all(|r| (0..2).all(|c| a[r][c].equals(&b[r][c])))
}

/// The matrix unit `e_{r,c}` of `M_2(C)` inside `M_2(Q_2)`.
pub fn matrix_unit(r: usize, c: usize) -> Mat2 {
    let mut m = [[QElement::zero(), QElement::zero()], [QElement::zero(), QElement::zero()]];
    m[r][c] = QElement::one();
    m
}

fn scale_mat(m: &Mat2, f: impl Fn(&QElement) -> QElement) -> Mat2 {
    [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]]
}

/// Image of `u^n`. Since the image of `u` squares to `u` times the identity,
/// `u^n` goes to `u^(n div 2)` times the image of `u^(n mod 2)`.
fn theta_u_pow(n: i64) -> Mat2 {
    let q = n.div_euclid(2);
    if n.rem_euclid(2) == 0 {
        [[QElement::u_pow(q), QElement::zero()], [QElement::zero(), QElement::u_pow(q)]]
    } else {
        [[QElement::zero(), QElement::u_pow(q + 1)], [QElement::u_pow(q), QElement::zero()]]
    }
}

fn theta_s() -> Mat2 {
    [[QElement::s(), &QElement::u() * &QElement::s()], [QElement::zero(), QElement::zero()]]
}

fn theta_monomial(m: &QMonomial) -> Mat2 {
    let w = m.to_word();
    let s = theta_s();
    let s_star = mat2_adjoint(&s);
    let mut acc = theta_u_pow(w.a);
    for _ in 0..w.i {
        acc = mat2_mul(&acc, &s);
    }
    for _ in 0..w.j {
        acc = mat2_mul(&acc, &s_star);
    }
    mat2_mul(&acc, &theta_u_pow(w.b))
}

/// The embedding of the algebra into its 2x2 matrices determined by
/// `u -> [[0, u], [1, 0]]` and `s -> [[s, u s], [0, 0]]`.
pub fn matrix_embed_theta12(e: &QElement) -> Mat2 {
    let zero = [[QElement::zero(), QElement::zero()], [QElement::zero(), QElement::zero()]];
    match e.exact_terms() {
        Some(terms) => terms.iter().fold(zero, |acc, (m, c)| {
            mat2_add(&acc, &scale_mat(&theta_monomial(m), |x| x.scale_exact(c)))
        }),
        None => e.numeric_terms().iter().fold(zero, |acc, (m, c)| {
            mat2_add(&acc, &scale_mat(&theta_monomial(m), |x| x.scale(*c)))
        }),
    }
}

/// The compression of an element to the basis vectors `-N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    pub window: i64,
    /// `(row, col, value)` sorted by column then row.
    pub entries: Vec<(i64, i64, Complex64)>,
    /// Set when some basis vector of the window is mapped outside it.
    pub boundary_loss: bool,
}

impl TruncatedMatrix {
    pub fn dim(&self) -> usize {
        (2 * self.window + 1) as usize
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for &(row, col, v) in &self.entries {
            m[((row + self.window) as usize, (col + self.window) as usize)] = v;
        }
        m
    }

    /// Eigenvalues of the Hermitian part `(A + A*) / 2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let a = self.to_dense();
        let h = (&a + a.adjoint()).scale(0.5);
        let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }
}

pub fn truncate_matrix(e: &QElement, window: i64) -> TruncatedMatrix {
    let mut entries = Vec::new();
    let mut boundary_loss = false;
    for col in -window..=window {
        let image = e.lambda2_apply(&SparseVector::from([(col, Complex64::new(1.0, 0.0))]));
        for (row, v) in image {
            if row.abs() <= window {
                entries.push((row, col, v));
            } else {
                boundary_loss = true;
            }
        }
    }
    TruncatedMatrix { window, entries, boundary_loss }
}
