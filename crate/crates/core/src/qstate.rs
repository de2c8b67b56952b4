//! Single-photon Hilbert space: which arm of the interferometer the photon
//! is in, tensored with its circular polarisation.
//!
//! Basis vectors are ordered `|1,+⟩, |1,−⟩, |2,+⟩, |2,−⟩`. Linear
//! polarisations use real coefficients, `|H⟩ = (|+⟩ + |−⟩)/√2` and
//! `|V⟩ = (|+⟩ − |−⟩)/√2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result, SpectralViolation};
use crate::TOL;

pub const DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    pub const ALL: [Arm; 2] = [Arm::One, Arm::Two];

    pub fn number(self) -> u8 {
        match self {
            Arm::One => 1,
            Arm::Two => 2,
        }
    }
}

/// Circular polarisation, i.e. the sign of the photon's angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    Plus,
    Minus,
}

impl Pol {
    pub const ALL: [Pol; 2] = [Pol::Plus, Pol::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Pol::Plus => 1.0,
            Pol::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub arm: Arm,
    pub pol: Pol,
}

impl BasisLabel {
    pub const ALL: [BasisLabel; DIM] = [
        BasisLabel::new(Arm::One, Pol::Plus),
        BasisLabel::new(Arm::One, Pol::Minus),
        BasisLabel::new(Arm::Two, Pol::Plus),
        BasisLabel::new(Arm::Two, Pol::Minus),
    ];

    pub const fn new(arm: Arm, pol: Pol) -> Self {
        BasisLabel { arm, pol }
    }

    pub fn index(self) -> usize {
        let a = match self.arm {
            Arm::One => 0,
            Arm::Two => 2,
        };
        let p = match self.pol {
            Pol::Plus => 0,
            Pol::Minus => 1,
        };
        a + p
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pol = match self.pol {
            Pol::Plus => '+',
            Pol::Minus => '-',
        };
        write!(f, "|{},{}>", self.arm.number(), pol)
    }
}

/// State vector of one photon.
///
/// The `normalized` flag is set only by constructors that check the norm;
/// results of [`Operator::apply`] and linear combinations are flagged as
/// unnormalized intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket {
    amps: [Complex64; DIM],
    normalized: bool,
}

impl Ket {
    /// Unnormalized ket from raw amplitudes.
    pub fn from_amps(amps: [Complex64; DIM]) -> Self {
        Ket {
            amps,
            normalized: false,
        }
    }

    pub fn from_real(amps: [f64; DIM]) -> Self {
        Self::from_amps(amps.map(|a| Complex64::new(a, 0.0)))
    }

    /// Ket whose amplitudes must already have unit norm.
    pub fn normalized_from(amps: [Complex64; DIM]) -> Result<Self> {
        Ket::from_amps(amps).checked_normalized()
    }

    pub fn zero() -> Self {
        Self::from_amps([ZERO; DIM])
    }

    pub fn basis(label: BasisLabel) -> Self {
        let mut amps = [ZERO; DIM];
        amps[label.index()] = ONE;
        Ket {
            amps,
            normalized: true,
        }
    }

    pub fn amps(&self) -> &[Complex64; DIM] {
        &self.amps
    }

    pub fn amp(&self, label: BasisLabel) -> Complex64 {
        self.amps[label.index()]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_finite(&self) -> bool {
        self.amps
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Sets the normalized flag if the squared norm is 1 within tolerance.
    pub fn checked_normalized(mut self) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        self.normalized = true;
        Ok(self)
    }

    /// Rescales to unit norm. Fails for (numerically) null kets.
    pub fn normalize(&self) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = self.norm();
        if norm < TOL {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Ket {
            amps: self.amps.map(|a| a / norm),
            normalized: true,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_amps(self.amps.map(|a| a * factor))
    }

    /// Largest entrywise deviation between two kets.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Equality up to a global phase, for kets of equal norm.
    pub fn equals_up_to_phase(&self, other: &Ket, tol: f64) -> bool {
        let overlap = inner(other, self);
        if overlap.norm() < TOL {
            return self.norm() < tol && other.norm() < tol;
        }
        let phase = overlap / overlap.norm();
        self.max_abs_diff(&other.scale(phase)) <= tol
    }
}

impl Add for Ket {
    type Output = Ket;

    fn add(self, rhs: Ket) -> Ket {
        let mut amps = self.amps;
        for (a, b) in amps.iter_mut().zip(rhs.amps) {
            *a += b;
        }
        Ket::from_amps(amps)
    }
}

impl Sub for Ket {
    type Output = Ket;

    fn sub(self, rhs: Ket) -> Ket {
        self + rhs.scale(-ONE)
    }
}

/// `⟨bra|ket⟩`, conjugate-linear in the first argument.
pub fn inner(bra: &Ket, ket: &Ket) -> Complex64 {
    bra.amps
        .iter()
        .zip(ket.amps.iter())
        .map(|(b, k)| b.conj() * k)
        .sum()
}

pub fn basis_ket(label: BasisLabel) -> Ket {
    Ket::basis(label)
}

/// 4×4 complex matrix acting on [`Ket`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator {
    m: [[Complex64; DIM]; DIM],
}

impl Operator {
    pub fn from_entries(m: [[Complex64; DIM]; DIM]) -> Self {
        Operator { m }
    }

    pub fn from_real(m: [[f64; DIM]; DIM]) -> Self {
        Operator {
            m: m.map(|row| row.map(|x| Complex64::new(x, 0.0))),
        }
    }

    pub fn zero() -> Self {
        Operator {
            m: [[ZERO; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; DIM])
    }

    pub fn diagonal(d: [f64; DIM]) -> Self {
        let mut op = Self::zero();
        for (i, x) in d.into_iter().enumerate() {
            op.m[i][i] = Complex64::new(x, 0.0);
        }
        op
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &Ket, bra: &Ket) -> Self {
        let mut op = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                op.m[i][j] = ket.amps[i] * bra.amps[j].conj();
            }
        }
        op
    }

    /// Tensor product of a 2×2 path operator with a 2×2 polarisation operator.
    pub fn kron(path: [[Complex64; 2]; 2], pol: [[Complex64; 2]; 2]) -> Self {
        let mut op = Self::zero();
        for (i, row) in op.m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = path[i / 2][j / 2] * pol[i % 2][j % 2];
            }
        }
        op
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn entries(&self) -> &[[Complex64; DIM]; DIM] {
        &self.m
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        let mut out = [ZERO; DIM];
        for (o, row) in out.iter_mut().zip(self.m.iter()) {
            *o = row.iter().zip(ket.amps.iter()).map(|(a, k)| a * k).sum();
        }
        Ket::from_amps(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut op = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                op.m[i][j] = self.m[j][i].conj();
            }
        }
        op
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            m: self.m.map(|row| row.map(|x| x * factor)),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self.m[i][i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zero())
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        *self * *other - *other * *self
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_residual(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    pub fn idempotence_residual(&self) -> f64 {
        (*self * *self).max_abs_diff(self)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() <= TOL
    }

    pub fn is_idempotent(&self) -> bool {
        self.idempotence_residual() <= TOL
    }

    pub fn is_projector(&self) -> bool {
        self.is_hermitian() && self.is_idempotent()
    }
}

impl Mul for Operator {
    type Output = Operator;

    fn mul(self, rhs: Operator) -> Operator {
        let mut op = Operator::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                op.m[i][j] = (0..DIM).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        op
    }
}

impl Mul<&Ket> for &Operator {
    type Output = Ket;

    fn mul(self, rhs: &Ket) -> Ket {
        self.apply(rhs)
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(mut self, rhs: Operator) -> Operator {
        for (a, b) in self.m.iter_mut().flatten().zip(rhs.m.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Operator {
    type Output = Operator;

    fn sub(self, rhs: Operator) -> Operator {
        self + rhs.scale(-ONE)
    }
}

/// Observable given by its spectral decomposition: distinct real eigenvalues,
/// each paired with the projector onto its (possibly degenerate) eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralObservable {
    branches: Vec<(f64, Operator)>,
}

impl SpectralObservable {
    /// Builds an observable and checks its invariants.
    pub fn new(branches: Vec<(f64, Operator)>) -> Result<Self> {
        let obs = Self::new_unchecked(branches);
        obs.validate()?;
        Ok(obs)
    }

    /// Builds an observable without validation; use [`validate_spectral`] to check it.
    pub fn new_unchecked(branches: Vec<(f64, Operator)>) -> Self {
        SpectralObservable { branches }
    }

    pub fn branches(&self) -> &[(f64, Operator)] {
        &self.branches
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.branches.iter().map(|(a, _)| *a)
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Projector onto the eigenspace of `eigenvalue`.
    pub fn projector(&self, eigenvalue: f64) -> Result<&Operator> {
        self.branches
            .iter()
            .find(|(a, _)| (a - eigenvalue).abs() <= TOL)
            .map(|(_, p)| p)
            .ok_or(Error::UnknownEigenvalue(eigenvalue))
    }

    /// `Σ_a a·Π_a`
    pub fn operator(&self) -> Operator {
        self.branches.iter().fold(Operator::zero(), |acc, (a, p)| {
            acc + p.scale(Complex64::new(*a, 0.0))
        })
    }

    pub fn validate(&self) -> std::result::Result<(), SpectralViolation> {
        if self.branches.is_empty() {
            return Err(SpectralViolation::Empty);
        }
        for (i, (a, _)) in self.branches.iter().enumerate() {
            if !a.is_finite() {
                return Err(SpectralViolation::NonFiniteEigenvalue(*a));
            }
            if self.branches[..i].iter().any(|(b, _)| (a - b).abs() <= TOL) {
                return Err(SpectralViolation::DuplicateEigenvalue(*a));
            }
        }
        for (a, p) in &self.branches {
            let residual = p.hermiticity_residual();
            if residual > TOL {
                return Err(SpectralViolation::NotHermitian {
                    eigenvalue: *a,
                    residual,
                });
            }
            let residual = p.idempotence_residual();
            if residual > TOL {
                return Err(SpectralViolation::NotIdempotent {
                    eigenvalue: *a,
                    residual,
                });
            }
        }
        for (i, (a, p)) in self.branches.iter().enumerate() {
            for (b, q) in &self.branches[i + 1..] {
                let residual = (*p * *q).max_abs();
                if residual > TOL {
                    return Err(SpectralViolation::NotOrthogonal {
                        first: *a,
                        second: *b,
                        residual,
                    });
                }
            }
        }
        let sum = self
            .branches
            .iter()
            .fold(Operator::zero(), |acc, (_, p)| acc + *p);
        let residual = sum.max_abs_diff(&Operator::identity());
        if residual > TOL {
            return Err(SpectralViolation::Incomplete { residual });
        }
        Ok(())
    }
}

pub fn validate_spectral(obs: &SpectralObservable) -> std::result::Result<(), SpectralViolation> {
    obs.validate()
}

/// `(|1,+⟩ + |1,−⟩ + |2,+⟩ + |2,−⟩)/2`, i.e. `(|1⟩ + |2⟩)|H⟩/√2`.
pub fn pre_selected() -> Ket {
    Ket {
        amps: [0.5, 0.5, 0.5, 0.5].map(|a| Complex64::new(a, 0.0)),
        normalized: true,
    }
}

/// `(|1,+⟩ + |1,−⟩ + |2,+⟩ − |2,−⟩)/2`, i.e. `(|1⟩|H⟩ + |2⟩|V⟩)/√2`.
pub fn post_selected() -> Ket {
    Ket {
        amps: [0.5, 0.5, 0.5, -0.5].map(|a| Complex64::new(a, 0.0)),
        normalized: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalStates {
    pub pre: Ket,
    pub post: Ket,
}

pub fn canonical_states() -> CanonicalStates {
    CanonicalStates {
        pre: pre_selected(),
        post: post_selected(),
    }
}

/// Path-polarisation product ket with a normalized polarisation part.
pub fn product_ket(arm: Arm, pol: [Complex64; 2]) -> Ket {
    let mut amps = [ZERO; DIM];
    amps[BasisLabel::new(arm, Pol::Plus).index()] = pol[0];
    amps[BasisLabel::new(arm, Pol::Minus).index()] = pol[1];
    Ket::from_amps(amps)
}

/// Linear polarisations in the circular basis.
pub fn horizontal() -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
}

pub fn vertical() -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalObservable {
    /// Photon in arm 1.
    Pi1,
    /// Photon in arm 2.
    Pi2,
    /// Circular polarisation, both arms.
    SigmaZ,
    /// Circular polarisation restricted to arm 1, `Π₁σ_z`.
    SigmaZ1,
    /// Circular polarisation restricted to arm 2, `Π₂σ_z`.
    SigmaZ2,
}

impl CanonicalObservable {
    pub const ALL: [CanonicalObservable; 5] = [
        CanonicalObservable::Pi1,
        CanonicalObservable::Pi2,
        CanonicalObservable::SigmaZ,
        CanonicalObservable::SigmaZ1,
        CanonicalObservable::SigmaZ2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalObservable::Pi1 => "pi1",
            CanonicalObservable::Pi2 => "pi2",
            CanonicalObservable::SigmaZ => "sigma_z",
            CanonicalObservable::SigmaZ1 => "sigma_z1",
            CanonicalObservable::SigmaZ2 => "sigma_z2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }

    pub fn spectral(self) -> SpectralObservable {
        let d = Operator::diagonal;
        let branches = match self {
            CanonicalObservable::Pi1 => vec![
                (1.0, arm_projector(Arm::One)),
                (0.0, arm_projector(Arm::Two)),
            ],
            CanonicalObservable::Pi2 => vec![
                (1.0, arm_projector(Arm::Two)),
                (0.0, arm_projector(Arm::One)),
            ],
            CanonicalObservable::SigmaZ => vec![
                (1.0, d([1.0, 0.0, 1.0, 0.0])),
                (-1.0, d([0.0, 1.0, 0.0, 1.0])),
            ],
            CanonicalObservable::SigmaZ1 => vec![
                (1.0, d([1.0, 0.0, 0.0, 0.0])),
                (-1.0, d([0.0, 1.0, 0.0, 0.0])),
                (0.0, arm_projector(Arm::Two)),
            ],
            CanonicalObservable::SigmaZ2 => vec![
                (1.0, d([0.0, 0.0, 1.0, 0.0])),
                (-1.0, d([0.0, 0.0, 0.0, 1.0])),
                (0.0, arm_projector(Arm::One)),
            ],
        };
        SpectralObservable::new_unchecked(branches)
    }

    pub fn operator(self) -> Operator {
        self.spectral().operator()
    }
}

impl fmt::Display for CanonicalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Π_arm = |arm,+⟩⟨arm,+| + |arm,−⟩⟨arm,−|`
pub fn arm_projector(arm: Arm) -> Operator {
    let mut d = [0.0; DIM];
    for pol in Pol::ALL {
        d[BasisLabel::new(arm, pol).index()] = 1.0;
    }
    Operator::diagonal(d)
}

/// `σ_z = |+⟩⟨+| − |−⟩⟨−|` on polarisation, identity on path.
pub fn sigma_z() -> Operator {
    Operator::diagonal([1.0, -1.0, 1.0, -1.0])
}

pub fn canonical_observables() -> BTreeMap<CanonicalObservable, SpectralObservable> {
    CanonicalObservable::ALL
        .into_iter()
        .map(|o| (o, o.spectral()))
        .collect()
}
