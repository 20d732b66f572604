use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::EulerianOA;
use crate::config::DEFAULT_DELTA;
use crate::error::{Error, Result};
use crate::matrix::{c64, frobenius, hermitian_eigen, identity, kron, zeros, ComplexMatrix};
use crate::oa::OrthogonalArray;
use crate::weyl::{embed, weyl, GroupLabel};

use super::drift::{norm_sum, DriftHamiltonian, FULL_SPACE_CAP};
use super::schedule::{bangbang_schedule, euler_schedule, generator_hamiltonian, Schedule, ScheduleMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum AverageMethod {
    /// Closed form in the eigenbasis of the segment Hamiltonian.
    Exact,
    /// Gauss–Legendre rule of the given order with matrix exponentials.
    Quadrature { order: usize },
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// φ(μ) = (e^{iμΔ} − 1)/(iμΔ), the segment mean of e^{iμτ}.
fn phi(mu: f64, delta: f64) -> Complex64 {
    // e^{ix/2} sin(x/2)/(x/2) avoids the cancellation in e^{ix} − 1
    let half = 0.5 * mu * delta;
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    Complex64::from_polar(sinc, half)
}

fn exact_inner(x: &ComplexMatrix, values: &[f64], vectors: &ComplexMatrix, delta: f64) -> ComplexMatrix {
    let mut xt = vectors.adjoint() * x * vectors;
    for a in 0..values.len() {
        for b in 0..values.len() {
            xt[(a, b)] *= phi(values[a] - values[b], delta);
        }
    }
    vectors * xt * vectors.adjoint()
}

fn quadrature_inner(x: &ComplexMatrix, h: &ComplexMatrix, delta: f64, order: usize) -> ComplexMatrix {
    let (nodes, weights) = gauss_legendre(order);
    let mut acc = zeros(x.nrows());
    for (node, w) in nodes.iter().zip(&weights) {
        let tau = 0.5 * delta * (1.0 + node);
        let u = (h * c64(0.0, -tau)).exp();
        acc += (u.adjoint() * x * u).scale(0.5 * w);
    }
    acc
}

/// `(1/Δ) ∫_0^Δ (u(τ)V)† X (u(τ)V) dτ` with `u(τ) = exp(−i h τ)`.
pub fn segment_average(x: &ComplexMatrix, h: &ComplexMatrix, v: &ComplexMatrix, delta: f64, method: AverageMethod) -> Result<ComplexMatrix> {
    let dim = x.nrows();
    for m in [h, v] {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
        }
    }
    let inner = match method {
        AverageMethod::Exact => {
            let (values, vectors) = hermitian_eigen(h);
            exact_inner(x, &values, &vectors, delta)
        }
        AverageMethod::Quadrature { order } => quadrature_inner(x, h, delta, order),
    };
    Ok(v.adjoint() * inner * v)
}

/// Q_𝒞(X) for one qudit walking the cyclic vertex sequence `vertices` of
/// Z_d × Z_d with square pulses realizing each step.
pub fn single_cycle_average(vertices: &[GroupLabel], d: usize, x: &ComplexMatrix, delta: f64, method: AverageMethod) -> Result<ComplexMatrix> {
    if vertices.is_empty() {
        return Err(Error::InvalidParameter("empty cycle".into()));
    }
    let n = vertices.len();
    let mut v = identity(d);
    let mut acc = zeros(d);
    for j in 0..n {
        let s = vertices[(j + 1) % n].sub(vertices[j], d as u32);
        let h = generator_hamiltonian(&weyl(d, s), delta)?;
        acc += segment_average(x, &h, &v, delta, method)?;
        v = crate::matrix::expm_hermitian(&h, delta) * v;
    }
    Ok(acc.unscale(n as f64))
}

/// F_S(X) = (1/|S|) Σ_s (1/Δ) ∫ u_s† X u_s over the generator list.
pub fn fs_map(generators: &[GroupLabel], d: usize, x: &ComplexMatrix, delta: f64, method: AverageMethod) -> Result<ComplexMatrix> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("empty generating set".into()));
    }
    let mut acc = zeros(d);
    for &s in generators {
        let h = generator_hamiltonian(&weyl(d, s), delta)?;
        acc += segment_average(x, &h, &identity(d), delta, method)?;
    }
    Ok(acc.unscale(generators.len() as f64))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AverageReport {
    pub mode: ScheduleMode,
    pub method: AverageMethod,
    pub segments: usize,
    pub delta: f64,
    /// ‖H̄ − I_S ⊗ H_E‖_F, on the full space when it fits under the cap,
    /// otherwise the triangle bound [`Self::residual_bound`].
    pub residual_norm: f64,
    /// Σ of the per-term norms.
    pub residual_bound: f64,
    pub residual_is_exact: bool,
    /// ‖H̄_term‖_F for each drift term, in input order.
    pub per_term_norms: Vec<f64>,
    /// ‖avg(I ⊗ H_E) − I ⊗ H_E‖_F.
    pub env_passthrough_error: f64,
    pub strength_warning: Option<String>,
    /// Averaged terms on `support ⊗ environment`.
    #[serde(skip)]
    pub term_averages: Vec<ComplexMatrix>,
}

/// Per-qudit control data: the frame at the start of each segment and an
/// index into the distinct segment Hamiltonians.
struct ControlTrack {
    d: usize,
    delta: f64,
    frames: Vec<Vec<ComplexMatrix>>,
    hams: Vec<Vec<usize>>,
    spectra: Vec<(ComplexMatrix, Vec<f64>, ComplexMatrix)>,
}

impl ControlTrack {
    fn new(sched: &Schedule) -> Self {
        let d = sched.d;
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut spectra: Vec<(ComplexMatrix, Vec<f64>, ComplexMatrix)> = Vec::new();
        let mut hams = Vec::with_capacity(sched.segment_count);
        for seg in &sched.segments {
            let row: Vec<usize> = seg
                .hamiltonians
                .iter()
                .map(|h| {
                    let key: Vec<u64> = h.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect();
                    *index.entry(key).or_insert_with(|| {
                        let (values, vectors) = hermitian_eigen(h);
                        spectra.push((h.clone(), values, vectors));
                        spectra.len() - 1
                    })
                })
                .collect();
            hams.push(row);
        }
        let frames = match sched.mode {
            ScheduleMode::BangBang => {
                sched.segments.iter().map(|seg| seg.labels.iter().map(|&l| weyl(d, l)).collect()).collect()
            }
            ScheduleMode::Eulerian => {
                let mut current = vec![identity(d); sched.n];
                let mut frames = Vec::with_capacity(sched.segment_count);
                for row in &hams {
                    frames.push(current.clone());
                    for (k, &h) in row.iter().enumerate() {
                        let (_, values, vectors) = &spectra[h];
                        let u = crate::matrix::spectral_apply(values, vectors, |l| Complex64::from_polar(1.0, -l * sched.delta));
                        current[k] = u * &current[k];
                    }
                }
                frames
            }
        };
        Self { d, delta: sched.delta, frames, hams, spectra }
    }

    /// Averages every block over the schedule on `support ⊗ C^{d_env}`.
    fn average_on_support(&self, support: &[usize], d_env: usize, blocks: &[ComplexMatrix], method: AverageMethod) -> Vec<ComplexMatrix> {
        let t = support.len();
        let env = identity(d_env);
        let dim = self.d.pow(t as u32) * d_env;
        let mut acc = vec![zeros(dim); blocks.len()];
        for (frames, hams) in self.frames.iter().zip(&self.hams) {
            let v = kron(&support.iter().map(|&k| frames[k].clone()).reduce(|a, b| kron(&a, &b)).unwrap(), &env);
            match method {
                AverageMethod::Exact => {
                    let w = kron(&support.iter().map(|&k| self.spectra[hams[k]].2.clone()).reduce(|a, b| kron(&a, &b)).unwrap(), &env);
                    let mut values = vec![0.0; dim];
                    for (idx, val) in values.iter_mut().enumerate() {
                        let sys = idx / d_env;
                        for (pos, &k) in support.iter().enumerate() {
                            let digit = (sys / self.d.pow((t - 1 - pos) as u32)) % self.d;
                            *val += self.spectra[hams[k]].1[digit];
                        }
                    }
                    for (x, a) in blocks.iter().zip(acc.iter_mut()) {
                        *a += v.adjoint() * exact_inner(x, &values, &w, self.delta) * &v;
                    }
                }
                AverageMethod::Quadrature { order } => {
                    let mut h = zeros(self.d.pow(t as u32));
                    for (pos, &k) in support.iter().enumerate() {
                        h += embed(&self.spectra[hams[k]].0, &[pos], t, self.d).expect("support position in range");
                    }
                    let h = kron(&h, &env);
                    for (x, a) in blocks.iter().zip(acc.iter_mut()) {
                        *a += v.adjoint() * quadrature_inner(x, &h, self.delta, order) * &v;
                    }
                }
            }
        }
        let n = self.frames.len() as f64;
        acc.into_iter().map(|a| a.unscale(n)).collect()
    }
}

/// Places an operator on `support ⊗ E` into the full `(C^d)^⊗n ⊗ E` space.
fn embed_with_env(a: &ComplexMatrix, support: &[usize], n: usize, d: usize, d_env: usize) -> Result<ComplexMatrix> {
    let sys_dim = d.pow(support.len() as u32);
    let mut out = zeros(d.pow(n as u32) * d_env);
    for e1 in 0..d_env {
        for e2 in 0..d_env {
            let block = ComplexMatrix::from_fn(sys_dim, sys_dim, |i, j| a[(i * d_env + e1, j * d_env + e2)]);
            if frobenius(&block) == 0.0 {
                continue;
            }
            let mut unit = zeros(d_env);
            unit[(e1, e2)] = c64(1.0, 0.0);
            out += kron(&embed(&block, support, n, d)?, &unit);
        }
    }
    Ok(out)
}

/// First-order average Hamiltonian of `h` under any schedule, term by term.
pub fn average_schedule(sched: &Schedule, h: &DriftHamiltonian, method: AverageMethod) -> Result<AverageReport> {
    if sched.n != h.n || sched.d != h.d {
        return Err(Error::InvalidParameter(format!(
            "schedule is for {} qudits of dimension {}, drift for {} of dimension {}",
            sched.n, sched.d, h.n, h.d
        )));
    }
    if let AverageMethod::Quadrature { order: 0 } = method {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    h.validate(1e-10)?;
    let track = ControlTrack::new(sched);

    let mut by_support: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for (i, term) in h.terms.iter().enumerate() {
        by_support.entry(&term.support).or_default().push(i);
    }
    let groups: Vec<(&[usize], Vec<usize>)> = by_support.into_iter().collect();
    let averaged: Vec<Vec<ComplexMatrix>> = groups
        .par_iter()
        .map(|(support, idx)| {
            let blocks: Vec<ComplexMatrix> = idx.iter().map(|&i| h.terms[i].operator()).collect();
            track.average_on_support(support, h.d_env, &blocks, method)
        })
        .collect();
    let mut term_averages = vec![zeros(0); h.terms.len()];
    for ((_, idx), avgs) in groups.iter().zip(averaged) {
        for (&i, a) in idx.iter().zip(avgs) {
            term_averages[i] = a;
        }
    }

    let env_in = kron(&identity(h.d), &h.env_only);
    let env_out = track.average_on_support(&[0], h.d_env, std::slice::from_ref(&env_in), method).remove(0);
    let env_passthrough_error = frobenius(&(env_out - env_in));

    let per_term_norms: Vec<f64> = term_averages.iter().map(frobenius).collect();
    let residual_bound = norm_sum(&term_averages);
    let residual_is_exact = h.total_dim() <= FULL_SPACE_CAP;
    let residual_norm = if residual_is_exact {
        let mut total = zeros(h.total_dim());
        for (term, a) in h.terms.iter().zip(&term_averages) {
            total += embed_with_env(a, &term.support, h.n, h.d, h.d_env)?;
        }
        frobenius(&total)
    } else {
        residual_bound
    };

    Ok(AverageReport {
        mode: sched.mode,
        method,
        segments: sched.segment_count,
        delta: sched.delta,
        residual_norm,
        residual_bound,
        residual_is_exact,
        per_term_norms,
        env_passthrough_error,
        strength_warning: None,
        term_averages,
    })
}

fn strength_warning(strength: usize, h: &DriftHamiltonian) -> Option<String> {
    (strength < h.max_arity())
        .then(|| format!("array strength {strength} is below the drift arity {}; terms may survive", h.max_arity()))
}

/// `(1/N) Σ_j U_j† H U_j` with `U_j` the tensor Weyl operator of column j.
pub fn bangbang_average(oa: &OrthogonalArray, h: &DriftHamiltonian) -> Result<AverageReport> {
    let sched = bangbang_schedule(oa, DEFAULT_DELTA)?;
    let mut report = average_schedule(&sched, h, AverageMethod::Exact)?;
    report.strength_warning = strength_warning(oa.strength(), h);
    Ok(report)
}

/// First-order average under the bounded-strength schedule of `eoa`.
pub fn eulerian_average(eoa: &EulerianOA, h: &DriftHamiltonian, delta: f64, method: AverageMethod) -> Result<AverageReport> {
    let sched = euler_schedule(eoa, delta)?;
    let mut report = average_schedule(&sched, h, method)?;
    report.strength_warning = strength_warning(eoa.strength(), h);
    Ok(report)
}
