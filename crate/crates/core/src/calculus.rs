//! Odd functional calculus and the symplectic duality maps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::{spectral, spectral_norm};
use crate::triple::{bergman_operator, d_operator, realify, ComplexLinearOperator, Element, C64};

/// Minimum eigenvalue accepted by [`hermitian_fractional_power`].
pub const MIN_EIGENVALUE: f64 = 1e-13;

const EIGEN_EPS: f64 = 1e-20;
const EIGEN_MAX_ITER: usize = 10_000;

/// An odd scalar function `f(-t) = -f(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum OddFunction {
    Identity,
    /// `t³`
    Cube,
    /// `t / sqrt(1 - t²)` on `(-1, 1)`
    DualityF,
    /// `t / sqrt(1 + t²)` on `R`
    DualityG,
    /// `Σ a_k t^(2k+1)`
    Polynomial(Vec<f64>),
}

impl OddFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            OddFunction::Identity => t,
            OddFunction::Cube => t * t * t,
            OddFunction::DualityF => t / (1.0 - t * t).sqrt(),
            OddFunction::DualityG => t / (1.0 + t * t).sqrt(),
            OddFunction::Polynomial(a) => {
                let t2 = t * t;
                a.iter().rev().fold(0.0, |acc, c| acc * t2 + c) * t
            }
        }
    }

    /// Whether `t` lies in the domain of validity.
    pub fn accepts(&self, t: f64) -> bool {
        match self {
            OddFunction::DualityF => t.abs() < 1.0,
            _ => t.is_finite(),
        }
    }
}

/// Applies `f` to each spectral value of `z`, keeping the tripotents.
pub fn spectral_apply(z: &Element, f: impl Fn(f64) -> C64) -> Result<Element> {
    let dec = spectral(z)?;
    Ok(dec
        .lambdas
        .iter()
        .zip(&dec.tripotents)
        .fold(z.system().zero(), |acc, (&l, e)| acc + e * f(l)))
}

/// The radial map `F(Σ λ_i e_i) = Σ f(λ_i) e_i`.
pub fn radial_map(f: &OddFunction, z: &Element) -> Result<Element> {
    let dec = spectral(z)?;
    if let Some(&bad) = dec.lambdas.iter().find(|&&l| !f.accepts(l)) {
        return Err(Error::DomainOfValidity(bad));
    }
    Ok(dec
        .lambdas
        .iter()
        .zip(&dec.tripotents)
        .fold(z.system().zero(), |acc, (&l, e)| acc + e * f.eval(l)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualityMethod {
    /// Functional calculus on the spectral decomposition.
    Spectral,
    /// `B(z, ±z)^(-1/4) z`.
    Operator,
    /// `(id - ½ D(z, ±z))^(-1/2) z`.
    HalfD,
}

/// `F : Ω -> V`, `F(z) = B(z, z)^(-1/4) z`.
pub fn duality_f(z: &Element, method: DualityMethod) -> Result<Element> {
    let norm = spectral_norm(z);
    if norm >= 1.0 {
        return Err(Error::OutsideDomain(norm));
    }
    match method {
        DualityMethod::Spectral => radial_map(&OddFunction::DualityF, z),
        DualityMethod::Operator => {
            let b = bergman_operator(z, z)?;
            Ok(hermitian_fractional_power(&b, -0.25)?.apply(z))
        }
        DualityMethod::HalfD => {
            let d = d_operator(z, z)?;
            let h = ComplexLinearOperator::identity(d.dim()).0 - d.0 * C64::new(0.5, 0.0);
            Ok(hermitian_fractional_power(&ComplexLinearOperator(h), -0.5)?.apply(z))
        }
    }
}

/// `G : V -> Ω`, `G(z) = B(z, -z)^(-1/4) z`, the inverse of `F`.
pub fn duality_g(z: &Element, method: DualityMethod) -> Result<Element> {
    match method {
        DualityMethod::Spectral => radial_map(&OddFunction::DualityG, z),
        DualityMethod::Operator => {
            let b = bergman_operator(z, &-z)?;
            Ok(hermitian_fractional_power(&b, -0.25)?.apply(z))
        }
        DualityMethod::HalfD => {
            let d = d_operator(z, &-z)?;
            let h = ComplexLinearOperator::identity(d.dim()).0 - d.0 * C64::new(0.5, 0.0);
            Ok(hermitian_fractional_power(&ComplexLinearOperator(h), -0.5)?.apply(z))
        }
    }
}

/// `H^α` for `H` Hermitian positive definite, via eigendecomposition of
/// `(H + H*) / 2`.
///
/// The eigenproblem is solved on the realified matrix with a convergence
/// threshold far below the default, which otherwise leaves errors near
/// `1e-11` when eigenvalues cluster.
pub fn hermitian_fractional_power(h: &ComplexLinearOperator, alpha: f64) -> Result<ComplexLinearOperator> {
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = realify(&sym)
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::NotPositiveDefinite(f64::NAN))?;
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min <= MIN_EIGENVALUE {
        return Err(Error::NotPositiveDefinite(min));
    }
    let powered = eig.eigenvalues.map(|l| l.powf(alpha));
    let v = &eig.eigenvectors;
    let m = v * DMatrix::from_diagonal(&powered) * v.transpose();
    let n = sym.nrows();
    Ok(ComplexLinearOperator(DMatrix::from_fn(n, n, |i, j| {
        C64::new(m[(2 * i, 2 * j)], m[(2 * i + 1, 2 * j)])
    })))
}
