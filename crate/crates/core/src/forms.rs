//! The flat, hyperbolic and Fubini–Study symplectic forms: pointwise
//! evaluation, matrix representations, and their expressions in polar
//! coordinates `z = Σ λ_j e_j`.
//!
//! Matrices use the interleaved realified basis `(x_1, y_1, ..., x_n, y_n)`
//! with `z_m = x_m + i y_m`, so `ω(u, v) = u_rᵀ M v_r`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::peirce::{PeirceIndex, SimultaneousPeirce};
use crate::spectral::{frame_decompose, spectral_norm, Frame};
use crate::triple::{
    bergman_operator, inner_product, q_operator, realify, symplectic_product, AntilinearOperator,
    ComplexLinearOperator, Element, TripleSystem, C64, I,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `ω₀`
    Flat,
    /// `ω₋`, defined on `Ω`
    Hyperbolic,
    /// `ω₊`, defined on `V`
    FubiniStudy,
}

impl FormKind {
    pub fn name(&self) -> &'static str {
        match self {
            FormKind::Flat => "flat",
            FormKind::Hyperbolic => "hyperbolic",
            FormKind::FubiniStudy => "fubini_study",
        }
    }
}

/// Antisymmetric matrix of a two-form at a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormMatrix {
    pub base: Element,
    pub matrix: DMatrix<f64>,
}

impl TwoFormMatrix {
    pub fn eval(&self, u: &Element, v: &Element) -> f64 {
        u.to_real().dot(&(&self.matrix * v.to_real()))
    }

    /// `||M + Mᵀ||_F`.
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.matrix + self.matrix.transpose()).norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.clone().determinant()
    }
}

fn ensure_in_domain(z: &Element) -> Result<()> {
    let norm = spectral_norm(z);
    if norm >= 1.0 {
        Err(Error::OutsideDomain(norm))
    } else {
        Ok(())
    }
}

fn solve(b: &ComplexLinearOperator, u: &Element) -> Result<Element> {
    let x = b
        .matrix()
        .clone()
        .lu()
        .solve(u.coords())
        .ok_or(Error::NotPositiveDefinite(0.0))?;
    Ok(Element::from_vector(u.system(), x))
}

/// `ω₀(u, v) = (i/2)((u|v) - (v|u))`; independent of the base point.
pub fn omega0(z: &Element, u: &Element, v: &Element) -> Result<f64> {
    if z.system() != u.system() {
        return Err(Error::DomainMismatch);
    }
    symplectic_product(u, v)
}

/// `ω₋(z)(u, v) = ω₀(B(z, z)⁻¹ u, v)`.
pub fn omega_minus(z: &Element, u: &Element, v: &Element) -> Result<f64> {
    ensure_in_domain(z)?;
    let b = bergman_operator(z, z)?;
    omega0(z, &solve(&b, u)?, v)
}

/// `ω₊(z)(u, v) = ω₀(B(z, -z)⁻¹ u, v)`.
pub fn omega_plus(z: &Element, u: &Element, v: &Element) -> Result<f64> {
    let b = bergman_operator(z, &-z)?;
    omega0(z, &solve(&b, u)?, v)
}

/// The Bergman metric `h₋(z)(u, v) = (B(z, z)⁻¹ u | v)`.
pub fn metric_h_minus(z: &Element, u: &Element, v: &Element) -> Result<C64> {
    ensure_in_domain(z)?;
    let b = bergman_operator(z, z)?;
    inner_product(&solve(&b, u)?, v)
}

/// `log det B(z, z)` (`Hyperbolic`) or `log det B(z, -z)` (`FubiniStudy`).
pub fn log_det_bergman(z: &Element, kind: FormKind) -> Result<f64> {
    let b = match kind {
        FormKind::Flat => return Ok(0.0),
        FormKind::Hyperbolic => {
            ensure_in_domain(z)?;
            bergman_operator(z, z)?
        }
        FormKind::FubiniStudy => bergman_operator(z, &-z)?,
    };
    let sym = (b.matrix() + b.matrix().adjoint()) * C64::new(0.5, 0.0);
    let chol = sym.cholesky().ok_or_else(|| Error::OutsideDomain(spectral_norm(z)))?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

fn flat_matrix(system: TripleSystem) -> DMatrix<f64> {
    let n = system.dim();
    let basis: Vec<Element> = (0..2 * n)
        .map(|a| {
            let b = system.basis(a / 2);
            if a % 2 == 0 {
                b
            } else {
                b.scale(I)
            }
        })
        .collect();
    DMatrix::from_fn(2 * n, 2 * n, |a, b| {
        symplectic_product(&basis[a], &basis[b]).expect("same system")
    })
}

/// The matrix of the chosen form at `z`, antisymmetrized.
pub fn form_matrix(kind: FormKind, z: &Element) -> Result<TwoFormMatrix> {
    let m0 = flat_matrix(z.system());
    let m = match kind {
        FormKind::Flat => m0,
        FormKind::Hyperbolic | FormKind::FubiniStudy => {
            let b = if kind == FormKind::Hyperbolic {
                ensure_in_domain(z)?;
                bergman_operator(z, z)?
            } else {
                bergman_operator(z, &-z)?
            };
            let inv = b
                .matrix()
                .clone()
                .try_inverse()
                .ok_or(Error::NotPositiveDefinite(0.0))?;
            realify(&inv).transpose() * m0
        }
    };
    let anti = (&m - m.transpose()) * 0.5;
    Ok(TwoFormMatrix {
        base: z.clone(),
        matrix: anti,
    })
}

/// Components of a tangent vector `v` at a regular `z = Σ λ_j e_j` in the
/// polar chart: `v = Σ dλ_j e_j + Σ λ_j (i α_j e_j + v_j0 + Σ_{k≠j} v_jk)`.
///
/// Indices are 0-based here.
#[derive(Clone, Debug)]
pub struct PolarTangentData {
    pub dlambda: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `v_j0 ∈ V_0j`.
    pub v0: Vec<Element>,
    offdiag: Vec<Option<Element>>,
    r: usize,
}

impl PolarTangentData {
    /// `v_jk ∈ V_jk` for `j ≠ k`.
    pub fn v_jk(&self, j: usize, k: usize) -> &Element {
        self.offdiag[j * self.r + k].as_ref().expect("off-diagonal component")
    }
}

/// Polar coordinates at a regular point: the frame, its spectral values and
/// the Peirce projectors needed to split tangent vectors.
pub struct PolarChart {
    system: TripleSystem,
    lambdas: Vec<f64>,
    frame: Frame,
    q_e: AntilinearOperator,
    projectors: Vec<(PeirceIndex, ComplexLinearOperator)>,
}

impl PolarChart {
    /// Requires `min_j λ_j > gap_tol` and `λ_j² - λ_k² > gap_tol` for `j < k`.
    pub fn new(z: &Element, gap_tol: f64) -> Result<Self> {
        let system = z.system();
        let fd = frame_decompose(z)?;
        let l = &fd.lambdas;
        if let Some(&min) = l.last() {
            if min <= gap_tol {
                return Err(Error::DegenerateSpectrum(format!(
                    "smallest spectral value {min} <= {gap_tol}"
                )));
            }
        }
        for w in l.windows(2) {
            if w[0] * w[0] - w[1] * w[1] <= gap_tol {
                return Err(Error::DegenerateSpectrum(format!(
                    "spectral values {} and {} too close",
                    w[0], w[1]
                )));
            }
        }
        let sp = SimultaneousPeirce::new(fd.frame.tripotents())?;
        let q_e = q_operator(&fd.frame.sum(system));
        Ok(Self {
            system,
            lambdas: fd.lambdas,
            frame: fd.frame,
            q_e,
            projectors: sp.all(),
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// `Q(e)` for `e = e_1 + ... + e_r`.
    pub fn q_e(&self) -> &AntilinearOperator {
        &self.q_e
    }

    pub fn split(&self, v: &Element) -> Result<PolarTangentData> {
        if v.system() != self.system {
            return Err(Error::DomainMismatch);
        }
        let r = self.lambdas.len();
        let zero = self.system.zero();
        let mut out = PolarTangentData {
            dlambda: vec![0.0; r],
            alpha: vec![0.0; r],
            v0: vec![zero.clone(); r],
            offdiag: vec![None; r * r],
            r,
        };
        for (idx, p) in &self.projectors {
            let pv = p.apply(v);
            match (idx.j(), idx.k()) {
                (0, 0) => {}
                (0, k) => out.v0[k - 1] = &pv * (1.0 / self.lambdas[k - 1]),
                (j, k) if j == k => {
                    let e = self.frame.get(j - 1);
                    let c = inner_product(&pv, e)? / inner_product(e, e)?.re;
                    out.dlambda[j - 1] = c.re;
                    out.alpha[j - 1] = c.im / self.lambdas[j - 1];
                }
                (j, k) => {
                    let (lj, lk) = (self.lambdas[j - 1], self.lambdas[k - 1]);
                    let qp = self.q_e.apply(&pv);
                    let vjk = (&pv * lj + &qp * lk) * (1.0 / (lj * lj - lk * lk));
                    let vkj = -self.q_e.apply(&vjk);
                    out.offdiag[(j - 1) * r + (k - 1)] = Some(vjk);
                    out.offdiag[(k - 1) * r + (j - 1)] = Some(vkj);
                }
            }
        }
        Ok(out)
    }

    /// Rebuilds the tangent vector from its polar components.
    pub fn reassemble(&self, d: &PolarTangentData) -> Element {
        let r = self.lambdas.len();
        let mut v = self.system.zero();
        for j in 0..r {
            let e = self.frame.get(j);
            let lj = self.lambdas[j];
            v = v + e * C64::new(d.dlambda[j], lj * d.alpha[j]);
            v = v + &d.v0[j] * lj;
            for k in (0..r).filter(|&k| k != j) {
                v = v + d.v_jk(j, k) * lj;
            }
        }
        v
    }

    /// `max_{j<k} max(||Q(e)v_jk + v_kj||, ||Q(e)v_kj + v_jk||)`.
    pub fn frame_constraint_residual(&self, d: &PolarTangentData) -> f64 {
        let r = self.lambdas.len();
        let mut worst: f64 = 0.0;
        for j in 0..r {
            for k in j + 1..r {
                let a = (&self.q_e.apply(d.v_jk(j, k)) + d.v_jk(k, j)).norm();
                let b = (&self.q_e.apply(d.v_jk(k, j)) + d.v_jk(j, k)).norm();
                worst = worst.max(a).max(b);
            }
        }
        worst
    }

    /// `η_jj(v) = (i/2)(e_j | v_j) = ½ (e_j|e_j) α_j`.
    pub fn eta(&self, j: usize, d: &PolarTangentData) -> f64 {
        0.5 * self.frame.get(j).norm().powi(2) * d.alpha[j]
    }

    /// `θ_j0(v, w) = <v_j0 | w_j0>`.
    pub fn theta0(&self, j: usize, v: &PolarTangentData, w: &PolarTangentData) -> f64 {
        symplectic_product(&v.v0[j], &w.v0[j]).expect("same system")
    }

    /// `θ_jk(v, w) = <v_jk | w_jk>` for `j < k`.
    pub fn theta(&self, j: usize, k: usize, v: &PolarTangentData, w: &PolarTangentData) -> f64 {
        symplectic_product(v.v_jk(j, k), w.v_jk(j, k)).expect("same system")
    }

    /// Evaluates the chosen form at the chart's base point through the polar
    /// expression
    /// `Σ c0(λ_j) θ_j0 + Σ_{j<k} c(λ_j, λ_k) θ_jk + 2 Σ ce(λ_j) dλ_j ∧ η_jj`.
    pub fn omega(&self, kind: FormKind, v: &PolarTangentData, w: &PolarTangentData) -> Result<f64> {
        let l = &self.lambdas;
        if kind == FormKind::Hyperbolic {
            if let Some(&top) = l.first() {
                if top >= 1.0 {
                    return Err(Error::OutsideDomain(top));
                }
            }
        }
        let sigma = match kind {
            FormKind::Flat => 0.0,
            FormKind::Hyperbolic => -1.0,
            FormKind::FubiniStudy => 1.0,
        };
        let weight = |t: f64| 1.0 + sigma * t * t;
        let r = l.len();
        let mut total = 0.0;
        for j in 0..r {
            let lj = l[j];
            let c0 = if sigma == 0.0 { lj * lj } else { lj * lj / weight(lj) };
            total += c0 * self.theta0(j, v, w);
            for (k, &lk) in l.iter().enumerate().skip(j + 1) {
                let c = if sigma == 0.0 {
                    lj * lj - lk * lk
                } else {
                    (lj * lj - lk * lk) / (weight(lj) * weight(lk))
                };
                total += c * self.theta(j, k, v, w);
            }
            let ce = if sigma == 0.0 { lj } else { lj / weight(lj).powi(2) };
            let wedge = v.dlambda[j] * self.eta(j, w) - w.dlambda[j] * self.eta(j, v);
            total += 2.0 * ce * wedge;
        }
        Ok(total)
    }
}

pub fn polar_tangent_split(z: &Element, v: &Element, gap_tol: f64) -> Result<PolarTangentData> {
    PolarChart::new(z, gap_tol)?.split(v)
}

pub fn omega_polar(kind: FormKind, z: &Element, v: &Element, w: &Element, gap_tol: f64) -> Result<f64> {
    let chart = PolarChart::new(z, gap_tol)?;
    let (sv, sw) = (chart.split(v)?, chart.split(w)?);
    chart.omega(kind, &sv, &sw)
}

/// Direct evaluation of the chosen form.
pub fn omega(kind: FormKind, z: &Element, u: &Element, v: &Element) -> Result<f64> {
    match kind {
        FormKind::Flat => omega0(z, u, v),
        FormKind::Hyperbolic => omega_minus(z, u, v),
        FormKind::FubiniStudy => omega_plus(z, u, v),
    }
}
