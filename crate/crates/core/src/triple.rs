//! Concrete Hermitian positive Jordan triple systems and their basic operators.
//!
//! Two families are realized:
//!
//! * type `I_{p,q}` (`p <= q`): `V` is the space of complex `p x q` matrices with
//!   `{x,y,z} = x y* z + z y* x`. This covers the disc (`p = q = 1`), the unit
//!   balls (`p = 1`), tube domains (`p = q`) and non-tube domains (`p < q`);
//! * the polydisc `Δ^r`: `V = C^r` with the componentwise product
//!   `{x,y,z}_j = 2 x_j conj(y_j) z_j`.
//!
//! Elements are stored as flat coordinate vectors (row-major for matrices) and
//! every operator is a matrix in that basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    TypeI { p: usize, q: usize },
    Polydisc { r: usize },
}

/// Immutable description of a concrete triple system.
///
/// `a` and `b` are the common dimensions of the Peirce spaces `V_jk` (`j < k`)
/// and `V_0j` relative to a frame. For rank-one type I systems there are no
/// `V_jk` spaces and `a` is recorded as 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TripleSystem {
    family: Family,
    n: usize,
    rank: usize,
    a: usize,
    b: usize,
    tube: bool,
}

impl TripleSystem {
    pub fn type_i(p: usize, q: usize) -> Result<Self> {
        if p == 0 || p > q {
            return Err(Error::InvalidDescriptor(format!(
                "type I requires 1 <= p <= q, got p={p}, q={q}"
            )));
        }
        Ok(Self {
            family: Family::TypeI { p, q },
            n: p * q,
            rank: p,
            a: if p >= 2 { 2 } else { 0 },
            b: q - p,
            tube: p == q,
        })
    }

    pub fn polydisc(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidDescriptor("polydisc requires r >= 1".into()));
        }
        Ok(Self {
            family: Family::Polydisc { r },
            n: r,
            rank: r,
            a: 0,
            b: 0,
            tube: true,
        })
    }

    /// The unit disc, realized as type `I_{1,1}`.
    pub fn disc() -> Self {
        Self::type_i(1, 1).expect("valid")
    }

    /// The unit ball of `C^n`, realized as type `I_{1,n}`.
    pub fn ball(n: usize) -> Result<Self> {
        Self::type_i(1, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Complex dimension of `V`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn is_tube(&self) -> bool {
        self.tube
    }

    /// Type I systems are simple; a polydisc of rank `r > 1` is a product of discs.
    pub fn is_irreducible(&self) -> bool {
        match self.family {
            Family::TypeI { .. } => true,
            Family::Polydisc { r } => r == 1,
        }
    }

    /// `(e|e)` for a minimal tripotent `e`. The trace form is this constant
    /// times the standard Hermitian product of the coordinates.
    pub fn minimal_norm_sq(&self) -> f64 {
        match self.family {
            Family::TypeI { p, q } => (p + q) as f64,
            Family::Polydisc { .. } => 2.0,
        }
    }

    pub fn zero(&self) -> Element {
        Element {
            system: *self,
            coords: DVector::zeros(self.n),
        }
    }

    /// The `m`-th coordinate basis vector.
    pub fn basis(&self, m: usize) -> Element {
        let mut z = self.zero();
        z.coords[m] = C64::new(1.0, 0.0);
        z
    }

    /// Short label used in reports, e.g. `typeI(2,3)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::TypeI { p, q } => format!("typeI({p},{q})"),
            Family::Polydisc { r } => format!("polydisc({r})"),
        }
    }

    fn triple_raw(&self, x: &DVector<C64>, y: &DVector<C64>, z: &DVector<C64>) -> DVector<C64> {
        match self.family {
            Family::TypeI { p, q } => {
                let xm = as_matrix(x, p, q);
                let ym = as_matrix(y, p, q);
                let zm = as_matrix(z, p, q);
                let yh = ym.adjoint();
                let out = &xm * &yh * &zm + &zm * &yh * &xm;
                from_matrix(&out)
            }
            Family::Polydisc { .. } => x.zip_zip_map(y, z, |a, b, c| a * b.conj() * c * 2.0),
        }
    }
}

impl fmt::Display for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn as_matrix(v: &DVector<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(p, q, v.as_slice())
}

fn from_matrix(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// A point of `V` in the native coordinates of its triple system.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    system: TripleSystem,
    coords: DVector<C64>,
}

impl Element {
    pub fn new(system: TripleSystem, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != system.dim() {
            return Err(Error::InvalidShape(format!(
                "expected {} coordinates, got {}",
                system.dim(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            system,
            coords: DVector::from_vec(coords),
        })
    }

    pub(crate) fn from_vector(system: TripleSystem, coords: DVector<C64>) -> Self {
        debug_assert_eq!(coords.len(), system.dim());
        Self { system, coords }
    }

    /// Builds a type I element from a `p x q` matrix.
    pub fn from_matrix(system: TripleSystem, m: &DMatrix<C64>) -> Result<Self> {
        match system.family() {
            Family::TypeI { p, q } if m.nrows() == p && m.ncols() == q => {
                Self::new(system, from_matrix(m).as_slice().to_vec())
            }
            _ => Err(Error::InvalidShape(format!(
                "{}x{} matrix for {}",
                m.nrows(),
                m.ncols(),
                system
            ))),
        }
    }

    /// Real diagonal element `diag(d_1, d_2, ...)` (type I) or `(d_1, d_2, ...)` (polydisc).
    pub fn diagonal(system: TripleSystem, d: &[f64]) -> Result<Self> {
        if d.len() > system.rank() {
            return Err(Error::InvalidShape(format!(
                "{} diagonal entries for rank {}",
                d.len(),
                system.rank()
            )));
        }
        let mut z = system.zero();
        for (j, &v) in d.iter().enumerate() {
            let idx = match system.family() {
                Family::TypeI { q, .. } => j * q + j,
                Family::Polydisc { .. } => j,
            };
            z.coords[idx] = C64::new(v, 0.0);
        }
        if !z.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(z)
    }

    /// Realified coordinates `(x_1, y_1, ..., x_n, y_n)` back to an element.
    pub fn from_real(system: TripleSystem, real: &[f64]) -> Result<Self> {
        if real.len() != 2 * system.dim() {
            return Err(Error::InvalidShape(format!(
                "expected {} real coordinates, got {}",
                2 * system.dim(),
                real.len()
            )));
        }
        let coords = real.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        Self::new(system, coords)
    }

    pub fn system(&self) -> TripleSystem {
        self.system
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut DVector<C64> {
        &mut self.coords
    }

    /// The coordinate matrix of a type I element.
    pub fn to_matrix(&self) -> Option<DMatrix<C64>> {
        match self.system.family() {
            Family::TypeI { p, q } => Some(as_matrix(&self.coords, p, q)),
            Family::Polydisc { .. } => None,
        }
    }

    pub fn to_real(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.coords.len(), self.coords.iter().flat_map(|c| [c.re, c.im]))
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn conj(&self) -> Element {
        Element::from_vector(self.system, self.coords.map(|c| c.conj()))
    }

    /// Norm induced by the trace form, `sqrt((x|x))`.
    pub fn norm(&self) -> f64 {
        (self.system.minimal_norm_sq() * self.coords.norm_squared()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scale(&self, c: C64) -> Element {
        Element::from_vector(self.system, &self.coords * c)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.system == other.system {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $f(self, rhs: &Element) -> Element {
                assert_eq!(self.system, rhs.system, "mixed triple systems");
                Element::from_vector(self.system, &self.coords $op &rhs.coords)
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $f(self, rhs: Element) -> Element {
                &self $op &rhs
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $f(self, rhs: &Element) -> Element {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::from_vector(self.system, -&self.coords)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, rhs: f64) -> Element {
        Element::from_vector(self.system, &self.coords * C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for Element {
    type Output = Element;
    fn mul(self, rhs: f64) -> Element {
        &self * rhs
    }
}

impl Mul<C64> for &Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

impl Mul<C64> for Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

/// A complex-linear operator on `V`, as a matrix acting on flat coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLinearOperator(pub DMatrix<C64>);

impl ComplexLinearOperator {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn apply(&self, v: &Element) -> Element {
        Element::from_vector(v.system, &self.0 * &v.coords)
    }

    pub fn compose(&self, other: &ComplexLinearOperator) -> ComplexLinearOperator {
        Self(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> ComplexLinearOperator {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Distance from self-adjointness, `||A - A*||_F`. The trace form is a
    /// scalar multiple of the coordinate product, so adjoints coincide.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint()).norm()
    }

    pub fn realify(&self) -> DMatrix<f64> {
        realify(&self.0)
    }
}

impl Add for &ComplexLinearOperator {
    type Output = ComplexLinearOperator;
    fn add(self, rhs: &ComplexLinearOperator) -> ComplexLinearOperator {
        ComplexLinearOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexLinearOperator {
    type Output = ComplexLinearOperator;
    fn sub(self, rhs: &ComplexLinearOperator) -> ComplexLinearOperator {
        ComplexLinearOperator(&self.0 - &rhs.0)
    }
}

/// Realification of a complex matrix in the interleaved basis
/// `(x_1, y_1, ..., x_n, y_n)`.
pub fn realify(m: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// An antilinear operator `v -> A conj(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOperator(pub DMatrix<C64>);

impl AntilinearOperator {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn apply(&self, v: &Element) -> Element {
        Element::from_vector(v.system, &self.0 * v.coords.map(|c| c.conj()))
    }

    /// The complex-linear composition `self ∘ other`, i.e. `A conj(B)`.
    pub fn then_after(&self, other: &AntilinearOperator) -> ComplexLinearOperator {
        ComplexLinearOperator(&self.0 * other.0.map(|c| c.conj()))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

fn ensure_same(elems: &[&Element]) -> Result<()> {
    elems.windows(2).try_for_each(|w| w[0].check_same(w[1]))
}

/// `{x, y, z}`: complex-bilinear in `(x, z)`, conjugate-linear in `y`.
pub fn triple_product(x: &Element, y: &Element, z: &Element) -> Result<Element> {
    ensure_same(&[x, y, z])?;
    Ok(Element::from_vector(
        x.system,
        x.system.triple_raw(&x.coords, &y.coords, &z.coords),
    ))
}

fn operator_from_columns(system: TripleSystem, f: impl Fn(&Element) -> Element) -> DMatrix<C64> {
    let n = system.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = f(&system.basis(j));
        m.set_column(j, &col.coords);
    }
    m
}

/// `D(x, y) : z -> {x, y, z}`.
pub fn d_operator(x: &Element, y: &Element) -> Result<ComplexLinearOperator> {
    ensure_same(&[x, y])?;
    let sys = x.system;
    Ok(ComplexLinearOperator(operator_from_columns(sys, |b| {
        Element::from_vector(sys, sys.triple_raw(&x.coords, &y.coords, &b.coords))
    })))
}

/// `Q(x) : y -> ½{x, y, x}`.
pub fn q_operator(x: &Element) -> AntilinearOperator {
    let sys = x.system;
    let m = operator_from_columns(sys, |b| {
        Element::from_vector(
            sys,
            sys.triple_raw(&x.coords, &b.coords, &x.coords) * C64::new(0.5, 0.0),
        )
    });
    AntilinearOperator(m)
}

/// `Q(x, z) : y -> {x, y, z}`, so that `Q(x, x) = 2 Q(x)`.
pub fn q_pair_operator(x: &Element, z: &Element) -> Result<AntilinearOperator> {
    ensure_same(&[x, z])?;
    let sys = x.system;
    Ok(AntilinearOperator(operator_from_columns(sys, |b| {
        Element::from_vector(sys, sys.triple_raw(&x.coords, &b.coords, &z.coords))
    })))
}

/// `B(x, y) = id - D(x, y) + Q(x) Q(y)`.
pub fn bergman_operator(x: &Element, y: &Element) -> Result<ComplexLinearOperator> {
    let d = d_operator(x, y)?;
    let qq = q_operator(x).then_after(&q_operator(y));
    let id = ComplexLinearOperator::identity(x.system.dim());
    Ok(&(&id - &d) + &qq)
}

/// The trace form `(u|v) = tr D(u, v)`.
///
/// For both families this equals `g * sum u_m conj(v_m)` with `g` the
/// squared norm of a minimal tripotent, which is what is evaluated here.
pub fn inner_product(u: &Element, v: &Element) -> Result<C64> {
    ensure_same(&[u, v])?;
    Ok(u.coords.dotc(&v.coords).conj() * u.system.minimal_norm_sq())
}

/// `<x|y> = (i/2)((x|y) - (y|x)) = -Im (x|y)`.
pub fn symplectic_product(x: &Element, y: &Element) -> Result<f64> {
    Ok(-inner_product(x, y)?.im)
}

/// The odd power `z^(2k+1)`, with `z^(1) = z` and `z^(2k+1) = Q(z) z^(2k-1)`.
pub fn odd_power(z: &Element, k: usize) -> Element {
    let sys = z.system;
    let mut p = z.clone();
    for _ in 0..k {
        p = Element::from_vector(
            sys,
            sys.triple_raw(&z.coords, &p.coords, &z.coords) * C64::new(0.5, 0.0),
        );
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit(sys: TripleSystem, i: usize, j: usize) -> Element {
        match sys.family() {
            Family::TypeI { q, .. } => sys.basis(i * q + j),
            Family::Polydisc { .. } => sys.basis(i),
        }
    }

    #[test]
    fn descriptor_constants() {
        let t = TripleSystem::type_i(2, 3).unwrap();
        assert_eq!((t.dim(), t.rank(), t.a(), t.b(), t.is_tube()), (6, 2, 2, 1, false));
        let t = TripleSystem::type_i(2, 2).unwrap();
        assert_eq!((t.a(), t.b(), t.is_tube()), (2, 0, true));
        let p = TripleSystem::polydisc(3).unwrap();
        assert_eq!((p.dim(), p.rank(), p.a(), p.b(), p.is_tube()), (3, 3, 0, 0, true));
        assert!(!p.is_irreducible());
        assert!(TripleSystem::type_i(3, 2).is_err());
        assert!(TripleSystem::polydisc(0).is_err());
    }

    #[test]
    fn disc_triple_product() {
        let d = TripleSystem::disc();
        let one = d.basis(0);
        let t = triple_product(&one, &one, &one).unwrap();
        assert_eq!(t.coords()[0], c(2.0, 0.0));
        let zero = d.zero();
        assert!(triple_product(&zero, &one, &one).unwrap().is_zero());
    }

    #[test]
    fn type_i_unit_matrix_triple() {
        let s = TripleSystem::type_i(2, 2).unwrap();
        let e11 = unit(s, 0, 0);
        let t = triple_product(&e11, &e11, &e11).unwrap();
        assert_eq!(t, &e11 * 2.0);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = TripleSystem::disc().basis(0);
        let b = TripleSystem::polydisc(1).unwrap().basis(0);
        assert!(matches!(triple_product(&a, &a, &b), Err(Error::DomainMismatch)));
        assert!(matches!(inner_product(&a, &b), Err(Error::DomainMismatch)));
    }

    #[test]
    fn d_operator_examples() {
        let d = TripleSystem::disc();
        let one = d.basis(0);
        let op = d_operator(&one, &one).unwrap();
        assert_eq!(op.matrix()[(0, 0)], c(2.0, 0.0));
        assert_eq!(d_operator(&d.zero(), &one).unwrap().norm(), 0.0);

        let s = TripleSystem::type_i(1, 2).unwrap();
        let e = s.basis(0);
        let op = d_operator(&e, &e).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(op.matrix(), &expected);
    }

    #[test]
    fn q_operator_examples() {
        let d = TripleSystem::disc();
        let q = q_operator(&d.basis(0));
        let y = Element::new(d, vec![c(0.3, 0.7)]).unwrap();
        assert_eq!(q.apply(&y).coords()[0], c(0.3, -0.7));
        assert_eq!(q_operator(&d.zero()).norm(), 0.0);

        let s = TripleSystem::type_i(2, 2).unwrap();
        let e11 = unit(s, 0, 0);
        let q = q_operator(&e11);
        assert_eq!(q.apply(&e11), e11);
        // y -> E11 y* E11 picks conj(y_11) E11
        let y = Element::new(s, vec![c(1.0, 2.0), c(3.0, 0.0), c(0.5, 0.5), c(-1.0, 1.0)]).unwrap();
        assert_eq!(q.apply(&y), &e11 * c(1.0, -2.0));
        let qpair = q_pair_operator(&e11, &e11).unwrap();
        assert_eq!(qpair.apply(&y), q.apply(&y) * 2.0);
    }

    #[test]
    fn bergman_examples() {
        let d = TripleSystem::disc();
        let z = Element::new(d, vec![c(0.5, 0.0)]).unwrap();
        let b = bergman_operator(&z, &z).unwrap();
        assert!((b.matrix()[(0, 0)] - c(0.5625, 0.0)).norm() < 1e-15);
        let b0 = bergman_operator(&d.zero(), &d.zero()).unwrap();
        assert_eq!(b0, ComplexLinearOperator::identity(1));

        let s = TripleSystem::type_i(2, 2).unwrap();
        let z = Element::diagonal(s, &[0.5, 0.3]).unwrap();
        let b = bergman_operator(&z, &z).unwrap();
        let mut ev: Vec<f64> = b.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let mut expected = vec![0.5625, 0.8281, 0.6825, 0.6825];
        expected.sort_by(f64::total_cmp);
        for (a, e) in ev.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn inner_product_examples() {
        let d = TripleSystem::disc();
        let one = d.basis(0);
        assert_eq!(inner_product(&one, &one).unwrap(), c(2.0, 0.0));
        assert_eq!(inner_product(&d.zero(), &one).unwrap(), c(0.0, 0.0));
        let s = TripleSystem::type_i(2, 3).unwrap();
        let e11 = s.basis(0);
        assert_eq!(inner_product(&e11, &e11).unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn inner_product_is_trace_of_d() {
        for sys in [TripleSystem::type_i(2, 3).unwrap(), TripleSystem::polydisc(3).unwrap()] {
            let n = sys.dim();
            let u = Element::new(sys, (0..n).map(|m| c(0.1 * m as f64, 0.3 - 0.05 * m as f64)).collect()).unwrap();
            let v = Element::new(
                sys,
                (0..n).map(|m| c(-0.2 + 0.07 * m as f64, 0.11 * m as f64)).collect(),
            )
            .unwrap();
            let tr = d_operator(&u, &v).unwrap().trace();
            assert!((tr - inner_product(&u, &v).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn symplectic_product_examples() {
        let d = TripleSystem::disc();
        let one = d.basis(0);
        let i = one.scale(I);
        assert!((symplectic_product(&one, &i).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(symplectic_product(&i, &i).unwrap(), 0.0);
    }

    #[test]
    fn odd_power_examples() {
        let d = TripleSystem::disc();
        let z = Element::new(d, vec![c(0.5, 0.0)]).unwrap();
        assert!((odd_power(&z, 1).coords()[0] - c(0.125, 0.0)).norm() < 1e-16);
        assert_eq!(odd_power(&z, 0), z);
        let s = TripleSystem::type_i(2, 2).unwrap();
        let z = Element::diagonal(s, &[0.5, 0.3]).unwrap();
        let expected = Element::diagonal(s, &[0.125, 0.027]).unwrap();
        assert!((odd_power(&z, 1) - expected).max_abs() < 1e-16);
        let e = Element::diagonal(s, &[1.0, 1.0]).unwrap();
        assert_eq!(odd_power(&e, 1), e);
    }

    #[test]
    fn realify_matches_complex_action() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-2.0, 0.0)]);
        let v = DVector::from_vec(vec![c(0.2, -0.4), c(1.5, 0.3)]);
        let mv = &m * &v;
        let rv = DVector::from_iterator(4, v.iter().flat_map(|c| [c.re, c.im]));
        let out = realify(&m) * rv;
        for k in 0..2 {
            assert!((out[2 * k] - mv[k].re).abs() < 1e-14);
            assert!((out[2 * k + 1] - mv[k].im).abs() < 1e-14);
        }
    }

    #[test]
    fn shape_and_finiteness_checked() {
        let s = TripleSystem::type_i(2, 2).unwrap();
        assert!(matches!(
            Element::new(s, vec![c(0.0, 0.0); 3]),
            Err(Error::InvalidShape(_))
        ));
        assert!(matches!(
            Element::new(s, vec![c(f64::NAN, 0.0); 4]),
            Err(Error::NonFinite)
        ));
    }
}
