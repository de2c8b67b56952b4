//! Independent reference computations used by the test suites.
//!
//! Nothing here is used by the simulator itself. The brute-force history
//! enumeration does not call into [`crate::postselect`], and the quadrature
//! routines only evaluate [`PointerMixture::density`] on a grid.

use rayon::prelude::*;

use crate::pointer::PointerMixture;
use crate::qstate::{inner, Ket, SpectralObservable};

/// Joint outcome probabilities of a measurement sequence conditioned on
/// post-selection, computed by following every history one collapse at a
/// time: Born factor, renormalize, next measurement, and finally the Born
/// factor of the post-selection. Returns `(eigenvalue tuple, probability)`
/// pairs in enumeration order, or `None` when no history survives.
pub fn brute_force_sequential(
    observables: &[SpectralObservable],
    pre: &Ket,
    post: &Ket,
) -> Option<Vec<(Vec<f64>, f64)>> {
    let mut histories: Vec<(Vec<f64>, f64, Option<Ket>)> = vec![(Vec::new(), 1.0, Some(*pre))];
    for obs in observables {
        let mut next = Vec::new();
        for (values, weight, state) in histories {
            for (a, proj) in obs.branches() {
                let mut values = values.clone();
                values.push(*a);
                let collapsed = state.as_ref().and_then(|s| {
                    let projected = proj.apply(s);
                    let born = projected.norm_sqr();
                    (born > 0.0).then(|| {
                        let norm = born.sqrt();
                        let amps = projected.amps().map(|x| x / norm);
                        (born, Ket::from_amps(amps))
                    })
                });
                match collapsed {
                    Some((born, s)) => next.push((values, weight * born, Some(s))),
                    None => next.push((values, 0.0, None)),
                }
            }
        }
        histories = next;
    }
    let joint: Vec<(Vec<f64>, f64)> = histories
        .into_iter()
        .map(|(values, weight, state)| {
            let p = state.map_or(0.0, |s| weight * inner(post, &s).norm_sqr());
            (values, p)
        })
        .collect();
    let total: f64 = joint.iter().map(|(_, p)| p).sum();
    if total < 1e-24 {
        return None;
    }
    Some(joint.into_iter().map(|(v, p)| (v, p / total)).collect())
}

/// Born-rule probabilities of each eigenvalue in `state`.
pub fn born_probabilities(obs: &SpectralObservable, state: &Ket) -> Vec<(f64, f64)> {
    obs.branches()
        .iter()
        .map(|(a, p)| (*a, inner(state, &p.apply(state)).re))
        .collect()
}

/// Regular grid covering `[lo, hi]` with spacing `step`.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

/// Integration box: displacements ± `pad_widths` standard deviations per axis.
fn bounds(m: &PointerMixture, axis: usize, pad_widths: f64) -> (f64, f64) {
    let s = m.widths()[axis];
    let (lo, hi) = m
        .displacements()
        .iter()
        .map(|d| d[axis])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    (lo - pad_widths * s, hi + pad_widths * s)
}

/// Grid integrals of the normalized density: total mass, and per-axis mean
/// and variance. Sums are rectangle-rule on a step of `s/50` over the
/// displacement range padded by `8s`; rows are summed in a fixed order, so
/// the result does not depend on the thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub mass: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

pub fn quadrature(m: &PointerMixture) -> Quadrature {
    quadrature_with(m, 50.0, 8.0)
}

pub fn quadrature_with(m: &PointerMixture, points_per_width: f64, pad_widths: f64) -> Quadrature {
    let dims = m.axes().len();
    let grids: Vec<Vec<f64>> = (0..dims)
        .map(|a| {
            let (lo, hi) = bounds(m, a, pad_widths);
            grid(lo, hi, m.widths()[a] / points_per_width)
        })
        .collect();
    let cell: f64 = m.widths().iter().map(|s| s / points_per_width).product();
    let density = |p: &[f64]| m.density(p).expect("non-null mixture");

    // [mass, Σ x_a, Σ x_a²] accumulated per row of the first axis.
    let width = 1 + 2 * dims;
    let rows: Vec<Vec<f64>> = match dims {
        1 => grids[0]
            .par_iter()
            .map(|&x| {
                let p = density(&[x]);
                vec![p, p * x, p * x * x]
            })
            .collect(),
        2 => grids[0]
            .par_iter()
            .map(|&x| {
                let mut acc = vec![0.0; width];
                for &y in &grids[1] {
                    let p = density(&[x, y]);
                    acc[0] += p;
                    acc[1] += p * x;
                    acc[2] += p * y;
                    acc[3] += p * x * x;
                    acc[4] += p * y * y;
                }
                acc
            })
            .collect(),
        _ => panic!("quadrature supports one or two axes"),
    };
    let mut total = vec![0.0; width];
    for row in rows {
        for (t, r) in total.iter_mut().zip(row) {
            *t += r;
        }
    }
    let mass = total[0] * cell;
    let means: Vec<f64> = (0..dims).map(|a| total[1 + a] * cell / mass).collect();
    let variances = (0..dims)
        .map(|a| total[1 + dims + a] * cell / mass - means[a] * means[a])
        .collect();
    Quadrature {
        mass,
        means,
        variances,
    }
}

/// Mass of a one-axis density inside `[centre − half_width, centre + half_width]`.
pub fn window_mass(m: &PointerMixture, centre: f64, half_width: f64) -> f64 {
    assert_eq!(m.axes().len(), 1, "window_mass is one-dimensional");
    let step = m.widths()[0] / 50.0;
    let xs = grid(centre - half_width, centre + half_width, step);
    let n = xs.len();
    // Trapezoid rule: the window edges need not sit in the tails.
    xs.iter()
        .enumerate()
        .map(|(k, &x)| {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            w * m.density(&[x]).expect("non-null mixture")
        })
        .sum::<f64>()
        * step
}
