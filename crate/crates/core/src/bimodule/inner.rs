use num_complex::Complex64;
use num_traits::Zero;

use super::tensor::{ElementaryTensor, X0Element};
use super::BimoduleError;
use crate::l2grid::GridFunction;
use crate::numbers::PowerOfTwo;
use crate::qalgebra::{QElement, QMonomial};

/// Largest allowed gap between the two formulas when `m1 = m2`, relative to
/// `m1 ||xi1|| ||xi2||`.
pub const CASE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Case {
    /// `m1 <= m2`: coefficients `<xi1, xi2((. + b) / M)>` on `P1 u^-b s_M P2`.
    Expanding,
    /// `m1 >= m2`: coefficients `<xi1, xi2(M . + b)>` on `P1 s*_M u^-b P2`.
    Contracting,
}

/// `h_b = <a, base(. + b sigma)>` for every `b` where the supports meet,
/// with `sigma = 2^-sigma_exp`. Both sides are brought to a common grid on
/// which the shift is a whole number of samples, so the range of `b` comes
/// from the sample ranges and not from a cutoff.
fn shifted_inners(a: &GridFunction, base: &GridFunction, sigma_exp: i32) -> Vec<(i64, Complex64)> {
    if a.is_zero() || base.is_zero() {
        return Vec::new();
    }
    let g = a.spacing_exp().max(base.spacing_exp()).max(sigma_exp).max(0);
    let (a, base) = (a.refine_to(g), base.refine_to(g));
    let step = 1i64 << (g - sigma_exp);
    let (a0, a1) = (a.start_index(), a.end_index());
    let (b0, b1) = (base.start_index(), base.end_index());
    // a_j base_(j + b step) needs j in [a0, a1) and j + b step in [b0, b1)
    let b_lo = (b0 - a1 + 1).div_euclid(step) + i64::from((b0 - a1 + 1).rem_euclid(step) != 0);
    let b_hi = (b1 - a0 - 1).div_euclid(step);
    let h = a.spacing();
    (b_lo..=b_hi)
        .map(|b| {
            let shift = b * step;
            let lo = a0.max(b0 - shift);
            let hi = a1.min(b1 - shift);
            let sum: Complex64 = (lo..hi).map(|j| a.get(j).conj() * base.get(j + shift)).sum();
            (b, sum * h)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

fn pair_terms(t1: &ElementaryTensor, t2: &ElementaryTensor, case: Case) -> Vec<(QMonomial, Complex64)> {
    let e = (t2.m.exponent() - t1.m.exponent()).unsigned_abs();
    let big_m = PowerOfTwo::new(e as i32);
    let p1 = QMonomial::projection(t1.indicator.residue(), t1.indicator.level());
    let p2 = QMonomial::projection(t2.indicator.residue(), t2.indicator.level());
    let weight = t1.m.to_f64();
    let (base, sigma_exp) = match case {
        // xi2((t + b) / M) = base(t + b), base = xi2(. / M)
        Case::Expanding => (t2.xi.scale_argument(big_m.inverse()), 0),
        // xi2(M t + b) = base(t + b / M), base = xi2(M .)
        Case::Contracting => (t2.xi.scale_argument(big_m), e as i32),
    };
    shifted_inners(&t1.xi, &base, sigma_exp)
        .into_iter()
        .filter_map(|(b, v)| {
            let middle = match case {
                Case::Expanding => QMonomial::u_pow(-b).compose(&QMonomial::s_pow(e))?,
                Case::Contracting => QMonomial::s_star_pow(e).compose(&QMonomial::u_pow(-b))?,
            };
            let m = p1.compose(&middle)?.compose(&p2)?;
            Some((m, v * weight))
        })
        .collect()
}

/// The algebra-valued inner product `<phi1, phi2>`, conjugate-linear in
/// `phi1`, as a numeric element.
///
/// Each pair of tensors contributes `m1 sum_b <xi1, xi2((. + b) m1 / m2)>`
/// times `P1 u^-b s_(m2/m1) P2` when `m1 <= m2`, and `m1 sum_b <xi1, xi2(. (m1/m2) + b)>`
/// times `P1 s*_(m1/m2) u^-b P2` when `m1 >= m2`, where `P = u^l e_k u^-l`.
/// When `m1 = m2` both are evaluated and must agree.
pub fn q_inner(phi1: &X0Element, phi2: &X0Element) -> Result<QElement, BimoduleError> {
    let mut terms = Vec::new();
    for t1 in phi1.tensors() {
        for t2 in phi2.tensors() {
            if t1.m < t2.m {
                terms.extend(pair_terms(&t1, &t2, Case::Expanding));
            } else if t1.m > t2.m {
                terms.extend(pair_terms(&t1, &t2, Case::Contracting));
            } else {
                let a = QElement::from_numeric_terms(pair_terms(&t1, &t2, Case::Expanding));
                let b = QElement::from_numeric_terms(pair_terms(&t1, &t2, Case::Contracting));
                let scale = t1.m.to_f64() * t1.xi.norm() * t2.xi.norm();
                let gap = a.distance(&b);
                if gap > CASE_TOLERANCE * scale.max(1.0) {
                    return Err(BimoduleError::UnresolvedConvention(gap));
                }
                terms.extend(a.numeric_terms());
            }
        }
    }
    Ok(QElement::from_numeric_terms(terms))
}
