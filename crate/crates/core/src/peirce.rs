//! Peirce projections for tripotents and orthogonal sequences of tripotents,
//! and the operator eigenvalues they predict.

use crate::error::{Error, Result};
use crate::spectral::tripotent_check;
use crate::triple::{d_operator, odd_power, q_operator, ComplexLinearOperator, Element, C64};

/// Tolerance for accepting an input as a tripotent or an orthogonal sequence.
pub const TRIPOTENT_TOL: f64 = 1e-8;
/// Relative projector residual accepted for "v lies in a Peirce space".
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Label `(j, k)`, `0 <= j <= k <= s`, of the simultaneous Peirce space `V_jk`.
/// Index 0 stands for "no tripotent", so `(0, 0)` is `V_00` and `(0, j)` is `V_0j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeirceIndex {
    j: usize,
    k: usize,
}

impl PeirceIndex {
    pub fn new(j: usize, k: usize, s: usize) -> Result<Self> {
        if j > k || k > s {
            return Err(Error::IndexOutOfRange(j, k));
        }
        Ok(Self { j, k })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Every index for a sequence of length `s`, in lexicographic order.
    pub fn all(s: usize) -> Vec<PeirceIndex> {
        (0..=s)
            .flat_map(|j| (j..=s).map(move |k| PeirceIndex { j, k }))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeirceSpace {
    Zero,
    One,
    Two,
}

fn require_tripotent(e: &Element) -> Result<()> {
    if !tripotent_check(e, TRIPOTENT_TOL).is_tripotent {
        return Err(Error::NotATripotent((odd_power(e, 1) - e).norm()));
    }
    Ok(())
}

/// Projectors `(P_0, P_1, P_2)` onto the eigenspaces of `D(e, e)`, as the
/// Lagrange polynomials in `D = D(e, e)` for the eigenvalues `{0, 1, 2}`.
pub fn peirce_projections(e: &Element) -> Result<[ComplexLinearOperator; 3]> {
    require_tripotent(e)?;
    let d = d_operator(e, e)?;
    let n = d.dim();
    let id = ComplexLinearOperator::identity(n);
    let two = ComplexLinearOperator(id.matrix() * C64::new(2.0, 0.0));
    let d_minus_id = &d - &id;
    let d_minus_two = &d - &two;
    let half = C64::new(0.5, 0.0);
    let p2 = ComplexLinearOperator(d.compose(&d_minus_id).matrix() * half);
    let p1 = ComplexLinearOperator(-d.compose(&d_minus_two).matrix());
    let p0 = ComplexLinearOperator(d_minus_id.compose(&d_minus_two).matrix() * half);
    Ok([p0, p1, p2])
}

pub fn peirce_projection(e: &Element, space: PeirceSpace) -> Result<ComplexLinearOperator> {
    let [p0, p1, p2] = peirce_projections(e)?;
    Ok(match space {
        PeirceSpace::Zero => p0,
        PeirceSpace::One => p1,
        PeirceSpace::Two => p2,
    })
}

/// Single-tripotent projectors for a pairwise orthogonal sequence.
pub struct SimultaneousPeirce {
    projections: Vec<[ComplexLinearOperator; 3]>,
    n: usize,
}

impl SimultaneousPeirce {
    pub fn new(tripotents: &[Element]) -> Result<Self> {
        let n = tripotents.first().map(|e| e.system().dim()).unwrap_or(0);
        for (j, e) in tripotents.iter().enumerate() {
            for (k, f) in tripotents.iter().enumerate().skip(j + 1) {
                if d_operator(e, f)?.norm() > TRIPOTENT_TOL {
                    return Err(Error::NotOrthogonal(j, k));
                }
            }
        }
        let projections = tripotents.iter().map(peirce_projections).collect::<Result<Vec<_>>>()?;
        Ok(Self { projections, n })
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    /// Projector onto `V_jk`.
    pub fn projection(&self, idx: PeirceIndex) -> Result<ComplexLinearOperator> {
        let s = self.projections.len();
        if idx.k > s {
            return Err(Error::IndexOutOfRange(idx.j, idx.k));
        }
        let mut out = ComplexLinearOperator::identity(self.n);
        match (idx.j, idx.k) {
            (0, 0) => {
                for p in &self.projections {
                    out = out.compose(&p[0]);
                }
            }
            (0, k) => {
                for (m, p) in self.projections.iter().enumerate() {
                    out = out.compose(if m + 1 == k { &p[1] } else { &p[0] });
                }
            }
            (j, k) if j == k => out = self.projections[j - 1][2].clone(),
            (j, k) => out = self.projections[j - 1][1].compose(&self.projections[k - 1][1]),
        }
        Ok(out)
    }

    /// All `(index, projector)` pairs, lexicographic in the index.
    pub fn all(&self) -> Vec<(PeirceIndex, ComplexLinearOperator)> {
        PeirceIndex::all(self.len())
            .into_iter()
            .map(|idx| {
                let p = self.projection(idx).expect("index in range");
                (idx, p)
            })
            .collect()
    }
}

pub fn simultaneous_projection(tripotents: &[Element], idx: PeirceIndex) -> Result<ComplexLinearOperator> {
    SimultaneousPeirce::new(tripotents)?.projection(idx)
}

/// Complex dimension of the range of a projector (its trace).
pub fn projector_rank(p: &ComplexLinearOperator) -> usize {
    p.trace().re.round().max(0.0) as usize
}

/// Splits `v ∈ V_2(e)` as `v⁺ + v⁻` with `Q(e)v± = ±v±`.
pub fn v2_plus_split(e: &Element, v: &Element) -> Result<(Element, Element)> {
    let p2 = peirce_projection(e, PeirceSpace::Two)?;
    let residual = (&p2.apply(v) - v).norm() / v.norm().max(1.0);
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotInV2(residual));
    }
    let qv = q_operator(e).apply(v);
    Ok(((v + &qv) * 0.5, (v - &qv) * 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// `D(z, z)`
    D,
    /// `Q(z) Q(z)`
    QQ,
    /// `B(z, z)`
    B,
    /// `B(z, -z)`
    BMinus,
}

/// Eigenvalue of the chosen operator at `z = Σ λ_j e_j` on `V_jk`, with `λ_0 = 0`.
pub fn predicted_eigenvalue(lambdas: &[f64], idx: PeirceIndex, which: OperatorKind) -> Result<f64> {
    let lam = |i: usize| -> Result<f64> {
        match i {
            0 => Ok(0.0),
            i if i <= lambdas.len() => Ok(lambdas[i - 1]),
            _ => Err(Error::IndexOutOfRange(idx.j, idx.k)),
        }
    };
    let (a, b) = (lam(idx.j)?.powi(2), lam(idx.k)?.powi(2));
    Ok(match which {
        OperatorKind::D => a + b,
        OperatorKind::QQ => a * b,
        OperatorKind::B => (1.0 - a) * (1.0 - b),
        OperatorKind::BMinus => (1.0 + a) * (1.0 + b),
    })
}
