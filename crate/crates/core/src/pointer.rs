//! Von Neumann measurements with Gaussian pointers.
//!
//! A pointer of width `s` has wavefunction `G(x) ∝ exp(−x²/(4s²))`, so `s`
//! is the standard deviation of its position density. Coupling it to a
//! spectral observable with strength `g` displaces the pointer by `g·a` in
//! the branch where the system is in eigenspace `a`. Because the coupling
//! is diagonal per eigenspace, the joint state stays a finite sum of
//! displaced Gaussians and every post-selected quantity has a closed form
//! in terms of the overlaps `⟨G(·−d_j)|G(·−d_i)⟩ = exp(−(d_i−d_j)²/(8s²))`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{inner, Ket, SpectralObservable};
use crate::TOL;

/// Post-selection probabilities below this are treated as zero.
pub const NULL_POSTSELECTION: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Vertical,
    Horizontal,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Vertical => "vertical",
            Axis::Horizontal => "horizontal",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPointer {
    width: f64,
    coupling: f64,
    axis: Axis,
}

impl GaussianPointer {
    pub fn new(axis: Axis, width: f64, coupling: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidPointer("width must be finite and positive"));
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidPointer(
                "coupling must be finite and non-negative",
            ));
        }
        Ok(GaussianPointer {
            width,
            coupling,
            axis,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Displacement per unit eigenvalue.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Unnormalized system component of this branch.
    pub system: Ket,
    /// Pointer displacement, one entry per attached axis.
    pub displacements: Vec<f64>,
}

/// System entangled with zero or more pointers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pointers: Vec<GaussianPointer>,
    branches: Vec<Branch>,
}

impl CoupledState {
    pub fn new(state: &Ket) -> Result<Self> {
        if !state.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sqr: state.norm_sqr(),
            });
        }
        Ok(CoupledState {
            pointers: Vec::new(),
            branches: vec![Branch {
                system: *state,
                displacements: Vec::new(),
            }],
        })
    }

    pub fn pointers(&self) -> &[GaussianPointer] {
        &self.pointers
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.pointers.iter().map(|p| p.axis).collect()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn nonzero_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.system.norm() > TOL)
    }

    /// Sum of branch squared norms; 1 for any sequence of couplings.
    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.system.norm_sqr()).sum()
    }

    /// Attaches a pointer measuring `obs`; every branch splits once per eigenspace.
    pub fn couple(&self, obs: &SpectralObservable, pointer: GaussianPointer) -> Result<Self> {
        obs.validate()?;
        if self.pointers.iter().any(|p| p.axis == pointer.axis) {
            return Err(Error::DuplicateAxis(pointer.axis));
        }
        let branches = self
            .branches
            .iter()
            .flat_map(|b| {
                obs.branches().iter().map(move |(a, proj)| {
                    let mut displacements = b.displacements.clone();
                    displacements.push(pointer.coupling * a);
                    Branch {
                        system: proj.apply(&b.system),
                        displacements,
                    }
                })
            })
            .collect();
        let mut pointers = self.pointers.clone();
        pointers.push(pointer);
        Ok(CoupledState { pointers, branches })
    }
}

pub fn couple(
    state: &CoupledState,
    obs: &SpectralObservable,
    pointer: GaussianPointer,
) -> Result<CoupledState> {
    state.couple(obs, pointer)
}

/// Pointer moments along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMoments {
    pub axis: Axis,
    pub mean: f64,
    pub variance: f64,
}

/// Post-selected pointer state `Σ_i w_i Π_axes G(x_axis − d_i,axis)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerMixture {
    axes: Vec<Axis>,
    widths: Vec<f64>,
    weights: Vec<Complex64>,
    displacements: Vec<Vec<f64>>,
}

/// Normalized pointer wavefunction `(2πs²)^(−1/4) exp(−x²/(4s²))`.
fn gaussian_amplitude(x: f64, width: f64) -> f64 {
    (2.0 * PI * width * width).powf(-0.25) * (-x * x / (4.0 * width * width)).exp()
}

impl PointerMixture {
    pub fn new(
        axes: Vec<Axis>,
        widths: Vec<f64>,
        weights: Vec<Complex64>,
        displacements: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if widths.len() != axes.len() {
            return Err(Error::DimensionMismatch {
                expected: axes.len(),
                got: widths.len(),
            });
        }
        if weights.len() != displacements.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: displacements.len(),
            });
        }
        if let Some(d) = displacements.iter().find(|d| d.len() != axes.len()) {
            return Err(Error::DimensionMismatch {
                expected: axes.len(),
                got: d.len(),
            });
        }
        if widths.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidPointer("width must be finite and positive"));
        }
        Ok(PointerMixture {
            axes,
            widths,
            weights,
            displacements,
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn displacements(&self) -> &[Vec<f64>] {
        &self.displacements
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn axis_index(&self, axis: Axis) -> Option<usize> {
        self.axes.iter().position(|&a| a == axis)
    }

    /// Drops branches whose weight is negligible relative to the largest one.
    pub fn pruned(&self) -> Self {
        let max = self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.weights[i].norm() > max * 1e-15)
            .collect();
        PointerMixture {
            axes: self.axes.clone(),
            widths: self.widths.clone(),
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
            displacements: keep
                .iter()
                .map(|&i| self.displacements[i].clone())
                .collect(),
        }
    }

    /// `⟨G_j|G_i⟩` across all axes.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        let exponent: f64 = self
            .widths
            .iter()
            .enumerate()
            .map(|(a, s)| {
                let delta = self.displacements[i][a] - self.displacements[j][a];
                delta * delta / (8.0 * s * s)
            })
            .sum();
        (-exponent).exp()
    }

    /// `Σ_ij w_i conj(w_j) O_ij f(i, j)` for a symmetric real kernel `f`.
    fn gram_sum(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.len() {
            for j in 0..self.len() {
                total += self.weights[i] * self.weights[j].conj() * (self.overlap(i, j) * f(i, j));
            }
        }
        debug_assert!(
            total.im.abs() <= TOL * total.re.abs().max(1.0),
            "gram sum has imaginary residual {}",
            total.im
        );
        total.re
    }

    /// `∫ |Σ_i w_i G_i|²`, the post-selection probability.
    pub fn normalization(&self) -> f64 {
        self.gram_sum(|_, _| 1.0)
    }

    fn checked_normalization(&self) -> Result<f64> {
        let z = self.normalization();
        if z.is_nan() || z < NULL_POSTSELECTION {
            return Err(Error::NullPostSelection { probability: z });
        }
        Ok(z)
    }

    /// Mean and variance along every axis, in closed form.
    pub fn moments(&self) -> Result<Vec<AxisMoments>> {
        let z = self.checked_normalization()?;
        Ok(self
            .axes
            .iter()
            .enumerate()
            .map(|(a, &axis)| {
                let mid = |i: usize, j: usize| {
                    0.5 * (self.displacements[i][a] + self.displacements[j][a])
                };
                let s2 = self.widths[a] * self.widths[a];
                let mean = self.gram_sum(mid) / z;
                let second = self.gram_sum(|i, j| mid(i, j).powi(2) + s2) / z;
                AxisMoments {
                    axis,
                    mean,
                    variance: second - mean * mean,
                }
            })
            .collect())
    }

    pub fn moments_for(&self, axis: Axis) -> Result<Option<AxisMoments>> {
        Ok(self.moments()?.into_iter().find(|m| m.axis == axis))
    }

    /// Unnormalized pointer wavefunction at `point`.
    pub fn amplitude(&self, point: &[f64]) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.displacements)
            .map(|(w, d)| w * self.branch_amplitude(d, point))
            .sum()
    }

    fn branch_amplitude(&self, displacement: &[f64], point: &[f64]) -> f64 {
        point
            .iter()
            .zip(displacement)
            .zip(&self.widths)
            .map(|((x, d), s)| gaussian_amplitude(x - d, *s))
            .product()
    }

    /// `N Σ_i |w_i|² |G_i(x)|²` with `N` the branch count; bounds `|amplitude|²`
    /// from above by Cauchy-Schwarz.
    pub fn envelope(&self, point: &[f64]) -> f64 {
        let n = self.len() as f64;
        n * self
            .weights
            .iter()
            .zip(&self.displacements)
            .map(|(w, d)| w.norm_sqr() * self.branch_amplitude(d, point).powi(2))
            .sum::<f64>()
    }

    /// Normalized probability density of the pointer position.
    pub fn density(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                got: point.len(),
            });
        }
        let z = self.checked_normalization()?;
        Ok(self.amplitude(point).norm_sqr() / z)
    }
}

/// Projects the coupled state onto `post`, leaving the pointers in a
/// (unnormalized) superposition of displaced Gaussians. Returns the mixture
/// and the probability that post-selection succeeds.
pub fn postselect_pointer(coupled: &CoupledState, post: &Ket) -> Result<(PointerMixture, f64)> {
    let pointers = coupled.pointers();
    let mixture = PointerMixture {
        axes: pointers.iter().map(|p| p.axis).collect(),
        widths: pointers.iter().map(|p| p.width).collect(),
        weights: coupled
            .branches()
            .iter()
            .map(|b| inner(post, &b.system))
            .collect(),
        displacements: coupled
            .branches()
            .iter()
            .map(|b| b.displacements.clone())
            .collect(),
    };
    let probability = mixture.checked_normalization()?;
    Ok((mixture, probability))
}

pub fn mixture_moments(m: &PointerMixture) -> Result<Vec<AxisMoments>> {
    m.moments()
}

pub fn mixture_density(m: &PointerMixture, point: &[f64]) -> Result<f64> {
    m.density(point)
}
