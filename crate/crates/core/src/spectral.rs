//! Spectral and frame decompositions, tripotent predicates, rank classification
//! and seeded sampling of domain points.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::triple::{d_operator, odd_power, Element, Family, TripleSystem, C64};

/// `z = λ_1 e_1 + ... + λ_s e_s` with `λ_1 > ... > λ_s > 0` and pairwise
/// orthogonal tripotents.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub lambdas: Vec<f64>,
    pub tripotents: Vec<Element>,
}

impl SpectralDecomposition {
    /// `s = rk z`.
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn reconstruct(&self, system: TripleSystem) -> Element {
        self.lambdas
            .iter()
            .zip(&self.tripotents)
            .fold(system.zero(), |acc, (l, e)| acc + e * *l)
    }
}

/// A maximal sequence of pairwise orthogonal minimal tripotents.
#[derive(Clone, Debug)]
pub struct Frame {
    tripotents: Vec<Element>,
}

impl Frame {
    /// Validates minimality and orthogonality within `tol`.
    pub fn new(tripotents: Vec<Element>, tol: f64) -> Result<Self> {
        for (j, e) in tripotents.iter().enumerate() {
            let info = tripotent_check(e, tol);
            if !info.is_tripotent || info.height != 1 {
                return Err(Error::NotATripotent((odd_power(e, 1) - e).norm()));
            }
            for (k, f) in tripotents.iter().enumerate().skip(j + 1) {
                if d_operator(e, f)?.norm() > tol {
                    return Err(Error::NotOrthogonal(j, k));
                }
            }
        }
        Ok(Self { tripotents })
    }

    pub(crate) fn from_parts(tripotents: Vec<Element>) -> Self {
        Self { tripotents }
    }

    pub fn len(&self) -> usize {
        self.tripotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tripotents.is_empty()
    }

    pub fn tripotents(&self) -> &[Element] {
        &self.tripotents
    }

    pub fn get(&self, j: usize) -> &Element {
        &self.tripotents[j]
    }

    /// `e = e_1 + ... + e_r`.
    pub fn sum(&self, system: TripleSystem) -> Element {
        self.tripotents.iter().fold(system.zero(), |acc, e| acc + e)
    }
}

/// `z = Σ λ_j e_j` over a full frame, `λ_1 >= ... >= λ_r >= 0`.
#[derive(Clone, Debug)]
pub struct FrameDecomposition {
    pub lambdas: Vec<f64>,
    pub frame: Frame,
}

/// Tie tolerance used when none is given: `1e-8 * max(1, λ_1)`.
pub fn default_tie_tol(lambda1: f64) -> f64 {
    1e-8 * lambda1.max(1.0)
}

/// One minimal tripotent per frame slot, with its spectral value, sorted by
/// decreasing value. Zero values are completed with orthogonal tripotents.
fn frame_pairs(z: &Element) -> Result<Vec<(f64, Element)>> {
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    let sys = z.system();
    match sys.family() {
        Family::TypeI { .. } => {
            let m = z.to_matrix().expect("type I");
            let svd = m.svd(true, true);
            let u = svd.u.expect("left vectors requested");
            let vt = svd.v_t.expect("right vectors requested");
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
            order
                .into_iter()
                .map(|k| {
                    let e = u.column(k) * vt.row(k);
                    Ok((svd.singular_values[k], Element::from_matrix(sys, &e)?))
                })
                .collect()
        }
        Family::Polydisc { r } => {
            let mut order: Vec<usize> = (0..r).collect();
            let c = z.coords();
            order.sort_by(|&a, &b| c[b].norm().total_cmp(&c[a].norm()));
            Ok(order
                .into_iter()
                .map(|j| {
                    let m = c[j].norm();
                    let phase = if m > 0.0 { c[j] / m } else { C64::new(1.0, 0.0) };
                    (m, sys.basis(j) * phase)
                })
                .collect())
        }
    }
}

/// Spectral decomposition with values closer than `tie_tol` merged and values
/// at or below `tie_tol` dropped. `z = 0` gives the empty decomposition.
pub fn spectral_decompose(z: &Element, tie_tol: f64) -> Result<SpectralDecomposition> {
    let pairs = frame_pairs(z)?;
    let mut lambdas: Vec<f64> = Vec::new();
    let mut tripotents: Vec<Element> = Vec::new();
    let mut group_sizes: Vec<usize> = Vec::new();
    let mut last = f64::INFINITY;
    for (l, e) in pairs {
        if l <= tie_tol {
            break;
        }
        if last - l < tie_tol {
            let k = lambdas.len() - 1;
            lambdas[k] += l;
            group_sizes[k] += 1;
            tripotents[k] = &tripotents[k] + &e;
        } else {
            lambdas.push(l);
            group_sizes.push(1);
            tripotents.push(e);
        }
        last = l;
    }
    for (l, n) in lambdas.iter_mut().zip(&group_sizes) {
        *l /= *n as f64;
    }
    Ok(SpectralDecomposition { lambdas, tripotents })
}

/// Spectral decomposition with the default tie tolerance.
pub fn spectral(z: &Element) -> Result<SpectralDecomposition> {
    let tol = default_tie_tol(spectral_norm(z));
    spectral_decompose(z, tol)
}

pub fn frame_decompose(z: &Element) -> Result<FrameDecomposition> {
    let (lambdas, tripotents) = frame_pairs(z)?.into_iter().unzip();
    Ok(FrameDecomposition {
        lambdas,
        frame: Frame::from_parts(tripotents),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub rank: usize,
    pub regular: bool,
    pub super_regular: bool,
}

/// Rank, regularity and super-regularity.
///
/// Tube-type and rank-one systems: regular implies super-regular. Otherwise
/// `1 - λ_i²` must differ from `(1 - λ_j²)²` by more than `tol` for all `i < j`.
pub fn classify(z: &Element, tol: f64) -> Classification {
    let sys = z.system();
    let dec = match spectral(z) {
        Ok(d) => d,
        Err(_) => {
            return Classification {
                rank: 0,
                regular: false,
                super_regular: false,
            }
        }
    };
    let rank = dec.rank();
    let regular = rank == sys.rank();
    let super_regular = regular
        && (sys.is_tube()
            || sys.rank() == 1
            || dec.lambdas.iter().enumerate().all(|(i, li)| {
                dec.lambdas[i + 1..]
                    .iter()
                    .all(|lj| ((1.0 - li * li) - (1.0 - lj * lj).powi(2)).abs() > tol)
            }));
    Classification {
        rank,
        regular,
        super_regular,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripotentInfo {
    pub is_tripotent: bool,
    /// Number of minimal tripotents in an orthogonal decomposition.
    pub height: usize,
}

pub fn tripotent_check(e: &Element, tol: f64) -> TripotentInfo {
    let residual = (odd_power(e, 1) - e).norm();
    let is_tripotent = !e.is_zero() && residual < tol;
    let height = match frame_pairs(e) {
        Ok(pairs) => pairs.iter().filter(|(l, _)| (l - 1.0).abs() < 0.5).count(),
        Err(_) => 0,
    };
    TripotentInfo { is_tripotent, height }
}

/// Largest spectral value.
pub fn spectral_norm(z: &Element) -> f64 {
    match z.system().family() {
        Family::TypeI { .. } => {
            let m = z.to_matrix().expect("type I");
            m.singular_values().iter().fold(0.0, |a, &b| a.max(b))
        }
        Family::Polydisc { .. } => z.max_abs(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Generic,
    SuperRegular,
    RankOne,
}

/// Tolerance used by the super-regular rejection step.
pub const SUPER_REGULAR_TOL: f64 = 1e-3;
/// Samples stay below `1 - SAMPLE_MARGIN` in spectral norm.
pub const SAMPLE_MARGIN: f64 = 0.05;
pub const MAX_REJECTIONS: usize = 10_000;

/// Seeded generator of points with spectral norm below `radius`.
pub struct DomainSampler {
    system: TripleSystem,
    radius: f64,
    rng: ChaCha8Rng,
}

impl DomainSampler {
    pub fn new(system: TripleSystem, seed: u64, radius: f64) -> Self {
        Self {
            system,
            radius,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn generic(&mut self) -> Element {
        let sys = self.system;
        match sys.family() {
            Family::TypeI { p, q } => {
                let u = random_unitary(&mut self.rng, p);
                let w = random_unitary(&mut self.rng, q);
                let mut s = DMatrix::<C64>::zeros(p, q);
                for j in 0..p {
                    s[(j, j)] = C64::new(self.rng.gen::<f64>() * self.radius, 0.0);
                }
                let m = u * s * w.adjoint();
                Element::from_matrix(sys, &m).expect("finite sample")
            }
            Family::Polydisc { r } => {
                let coords = (0..r)
                    .map(|_| {
                        let rho = self.rng.gen::<f64>() * self.radius;
                        let theta = self.rng.gen::<f64>() * 2.0 * PI;
                        C64::from_polar(rho, theta)
                    })
                    .collect();
                Element::new(sys, coords).expect("finite sample")
            }
        }
    }

    pub fn next(&mut self, mode: SampleMode) -> Result<Element> {
        match mode {
            SampleMode::Generic => Ok(self.generic()),
            SampleMode::RankOne => {
                let z = self.generic();
                let fd = frame_decompose(&z)?;
                Ok(fd.frame.get(0) * fd.lambdas[0])
            }
            SampleMode::SuperRegular => self.next_where(|z| classify(z, SUPER_REGULAR_TOL).super_regular),
        }
    }

    /// Generic samples filtered by `accept`, giving up after
    /// [`MAX_REJECTIONS`] consecutive rejections.
    pub fn next_where(&mut self, accept: impl Fn(&Element) -> bool) -> Result<Element> {
        for _ in 0..MAX_REJECTIONS {
            let z = self.generic();
            if accept(&z) {
                return Ok(z);
            }
        }
        Err(Error::SamplingExhausted(MAX_REJECTIONS))
    }
}

/// Haar-distributed unitary matrix (QR of a complex Gaussian with phase fix).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// `count` deterministic samples with spectral norm `< 1 - SAMPLE_MARGIN`.
pub fn sample_domain(system: TripleSystem, seed: u64, count: usize, mode: SampleMode) -> Result<Vec<Element>> {
    sample_ball(system, seed, count, mode, 1.0 - SAMPLE_MARGIN)
}

/// Like [`sample_domain`] with an explicit spectral-norm bound.
pub fn sample_ball(
    system: TripleSystem,
    seed: u64,
    count: usize,
    mode: SampleMode,
    radius: f64,
) -> Result<Vec<Element>> {
    let mut sampler = DomainSampler::new(system, seed, radius);
    (0..count).map(|_| sampler.next(mode)).collect()
}

/// Real Gram matrix `Re (z^(2i+1) | z^(2j+1))` of the first `count` odd powers.
pub fn odd_power_gram(z: &Element, count: usize) -> DMatrix<f64> {
    let powers: Vec<DVector<f64>> = (0..count).map(|k| odd_power(z, k).to_real()).collect();
    let g = z.system().minimal_norm_sq();
    DMatrix::from_fn(count, count, |i, j| g * powers[i].dot(&powers[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::I;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn disc_spectral() {
        let d = TripleSystem::disc();
        let ph = C64::from_polar(1.0, PI / 4.0);
        let z = Element::new(d, vec![ph * 0.5]).unwrap();
        let s = spectral(&z).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.lambdas[0] - 0.5).abs() < 1e-15);
        assert!((s.tripotents[0].coords()[0] - ph).norm() < 1e-15);
    }

    #[test]
    fn tripotent_has_unit_spectrum() {
        let s = TripleSystem::type_i(2, 3).unwrap();
        let e = s.basis(0) + s.basis(4);
        let dec = spectral(&e).unwrap();
        assert_eq!(dec.lambdas.len(), 1);
        assert!((dec.lambdas[0] - 1.0).abs() < 1e-14);
        assert!((&dec.tripotents[0] - &e).max_abs() < 1e-14);
    }

    #[test]
    fn tied_values_merge() {
        let s = TripleSystem::type_i(2, 2).unwrap();
        let z = Element::diagonal(s, &[0.5, 0.5]).unwrap();
        let dec = spectral(&z).unwrap();
        assert_eq!(dec.rank(), 1);
        assert!((dec.lambdas[0] - 0.5).abs() < 1e-15);
        let id = Element::diagonal(s, &[1.0, 1.0]).unwrap();
        assert!((&dec.tripotents[0] - &id).max_abs() < 1e-14);
    }

    #[test]
    fn zero_has_empty_decomposition() {
        let s = TripleSystem::type_i(2, 3).unwrap();
        assert_eq!(spectral(&s.zero()).unwrap().rank(), 0);
        let fd = frame_decompose(&s.zero()).unwrap();
        assert_eq!(fd.lambdas, vec![0.0, 0.0]);
        assert!(Frame::new(fd.frame.tripotents().to_vec(), 1e-10).is_ok());
    }

    #[test]
    fn frame_of_type_i_2_3() {
        let s = TripleSystem::type_i(2, 3).unwrap();
        let m = DMatrix::from_row_slice(
            2,
            3,
            &[
                c(0.0, 0.0),
                c(0.7, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.2, 0.0),
            ],
        );
        let z = Element::from_matrix(s, &m).unwrap();
        let fd = frame_decompose(&z).unwrap();
        assert!((fd.lambdas[0] - 0.7).abs() < 1e-14 && (fd.lambdas[1] - 0.2).abs() < 1e-14);
        assert!((fd.frame.get(0) - &s.basis(1)).max_abs() < 1e-14);
        assert!((fd.frame.get(1) - &s.basis(5)).max_abs() < 1e-14);
    }

    #[test]
    fn frame_of_polydisc() {
        let s = TripleSystem::polydisc(3).unwrap();
        let z = Element::new(s, vec![c(0.5, 0.0), c(0.0, -0.3), c(0.0, 0.0)]).unwrap();
        let fd = frame_decompose(&z).unwrap();
        assert_eq!(fd.lambdas, vec![0.5, 0.3, 0.0]);
        assert_eq!(fd.frame.get(0), &s.basis(0));
        assert_eq!(fd.frame.get(1), &(s.basis(1) * (-I)));
        assert_eq!(fd.frame.get(2), &s.basis(2));
    }

    #[test]
    fn classify_examples() {
        let d = TripleSystem::disc();
        let z = Element::diagonal(d, &[0.5]).unwrap();
        let cl = classify(&z, 1e-3);
        assert_eq!((cl.rank, cl.regular, cl.super_regular), (1, true, true));

        let tube = TripleSystem::type_i(2, 2).unwrap();
        let z = Element::diagonal(tube, &[0.6, 0.3]).unwrap();
        assert!(classify(&z, 1e-3).super_regular);

        let s = TripleSystem::type_i(2, 3).unwrap();
        let l2 = 0.6;
        let l1 = 0.6 * (2.0f64 - 0.36).sqrt();
        let z = Element::diagonal(s, &[l1, l2]).unwrap();
        let cl = classify(&z, 1e-3);
        assert!(cl.regular && !cl.super_regular);
        // (1 - l1²) == (1 - l2²)² by construction
        assert!(((1.0 - l1 * l1) - (1.0 - l2 * l2).powi(2)).abs() < 1e-14);

        let z = Element::diagonal(s, &[0.7, 0.0]).unwrap();
        let cl = classify(&z, 1e-3);
        assert_eq!((cl.rank, cl.regular, cl.super_regular), (1, false, false));
    }

    #[test]
    fn tripotent_check_examples() {
        let s = TripleSystem::type_i(2, 2).unwrap();
        let id = Element::diagonal(s, &[1.0, 1.0]).unwrap();
        assert_eq!(
            tripotent_check(&id, 1e-10),
            TripotentInfo {
                is_tripotent: true,
                height: 2
            }
        );
        assert!(!tripotent_check(&s.zero(), 1e-10).is_tripotent);
        let d = TripleSystem::disc();
        let e = Element::new(d, vec![C64::from_polar(1.0, 0.7)]).unwrap();
        assert_eq!(
            tripotent_check(&e, 1e-10),
            TripotentInfo {
                is_tripotent: true,
                height: 1
            }
        );
        let half = Element::diagonal(d, &[0.5]).unwrap();
        assert!(!tripotent_check(&half, 1e-10).is_tripotent);
    }

    #[test]
    fn spectral_norm_examples() {
        let s = TripleSystem::type_i(2, 2).unwrap();
        assert_eq!(spectral_norm(&s.zero()), 0.0);
        let d = TripleSystem::disc();
        assert!((spectral_norm(&Element::diagonal(d, &[-0.7]).unwrap()) - 0.7).abs() < 1e-15);
        assert!((spectral_norm(&Element::diagonal(s, &[0.5, 0.3]).unwrap()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampler_is_deterministic() {
        let s = TripleSystem::type_i(2, 3).unwrap();
        let a = sample_domain(s, 7, 5, SampleMode::Generic).unwrap();
        let b = sample_domain(s, 7, 5, SampleMode::Generic).unwrap();
        assert_eq!(a, b);
        let c = sample_domain(s, 8, 5, SampleMode::Generic).unwrap();
        assert_ne!(a, c);
        for z in &a {
            assert!(spectral_norm(z) < 1.0 - SAMPLE_MARGIN);
        }
    }

    #[test]
    fn sampler_modes() {
        for sys in [TripleSystem::type_i(2, 3).unwrap(), TripleSystem::polydisc(3).unwrap()] {
            for z in sample_domain(sys, 3, 20, SampleMode::SuperRegular).unwrap() {
                assert!(classify(&z, SUPER_REGULAR_TOL).super_regular);
            }
            for z in sample_domain(sys, 3, 20, SampleMode::RankOne).unwrap() {
                assert_eq!(classify(&z, SUPER_REGULAR_TOL).rank, 1);
            }
        }
    }

    #[test]
    fn exhausted_sampler_errors() {
        let mut s = DomainSampler::new(TripleSystem::disc(), 1, 0.5);
        assert!(matches!(s.next_where(|_| false), Err(Error::SamplingExhausted(_))));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 3);
        assert!((u.adjoint() * &u - DMatrix::<C64>::identity(3, 3)).norm() < 1e-13);
    }
}
