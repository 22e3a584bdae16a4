//! Monodromy and transfer matrices of the open chain, their rescaling,
//! the fusion hierarchy, and spectrum extraction.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::boundary::{fused_kminus, kplus, BoundaryParams};
use crate::fusion::{fused_r, SpinLabel};
use crate::linalg::tensor::{mul_local_right, partial_trace_first};
use crate::linalg::{eig_with, vdot, ComplexMatrix, EigConfig, C64};
use crate::{ch, sh, xi, Error, Result};

/// Lattice size, quantum spin, anisotropy and boundary parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub spin: SpinLabel,
    pub eta: C64,
    pub boundary: BoundaryParams,
    /// Cap on `(2s+1)^N`.
    pub max_dim: usize,
}

impl ChainSpec {
    pub fn new(n_sites: usize, spin: SpinLabel, eta: C64, boundary: BoundaryParams) -> Result<Self> {
        Self::with_cap(n_sites, spin, eta, boundary, crate::DEFAULT_MAX_DIM)
    }

    pub fn with_cap(
        n_sites: usize,
        spin: SpinLabel,
        eta: C64,
        boundary: BoundaryParams,
        max_dim: usize,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidArgument("the chain needs at least one site"));
        }
        if !boundary.is_finite() || !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::NonFinite("chain parameters"));
        }
        let dim = spin.dim().checked_pow(n_sites as u32).unwrap_or(usize::MAX);
        if dim > max_dim {
            return Err(Error::DimensionCap { dim, cap: max_dim });
        }
        Ok(Self {
            n_sites,
            spin,
            eta,
            boundary,
            max_dim,
        })
    }

    /// `(2s+1)^N`.
    pub fn quantum_dim(&self) -> usize {
        self.spin.dim().pow(self.n_sites as u32)
    }

    pub fn with_eta(&self, eta: C64) -> Self {
        Self { eta, ..*self }
    }

    pub fn with_boundary(&self, boundary: BoundaryParams) -> Self {
        Self { boundary, ..*self }
    }

    fn dims(&self, aux: SpinLabel) -> Vec<usize> {
        let mut d = vec![aux.dim()];
        d.extend(core::iter::repeat(self.spin.dim()).take(self.n_sites));
        d
    }
}

/// `T(u) = R_{a,b_N}(u) ⋯ R_{a,b_1}(u)` on `aux ⊗ quantum`.
pub fn monodromy(j: SpinLabel, spec: &ChainSpec, u: C64) -> ComplexMatrix {
    let dims = spec.dims(j);
    let r = fused_r(j, spec.spin, u, spec.eta);
    let total: usize = dims.iter().product();
    (1..=spec.n_sites)
        .rev()
        .fold(ComplexMatrix::identity(total), |acc, site| mul_local_right(&acc, &r, &dims, &[0, site]))
}

/// `T̂(u) = R_{a,b_1}(u) ⋯ R_{a,b_N}(u)`.
pub fn hat_monodromy(j: SpinLabel, spec: &ChainSpec, u: C64) -> ComplexMatrix {
    let dims = spec.dims(j);
    let r = fused_r(j, spec.spin, u, spec.eta);
    let total: usize = dims.iter().product();
    (1..=spec.n_sites).fold(ComplexMatrix::identity(total), |acc, site| mul_local_right(&acc, &r, &dims, &[0, site]))
}

/// Builds `tr_a K⁺ T K⁻ T̂` from the given auxiliary-space pieces.
pub(crate) fn transfer_from_parts(
    spec: &ChainSpec,
    aux_dim: usize,
    r: &ComplexMatrix,
    kminus: &ComplexMatrix,
    kplus: &ComplexMatrix,
) -> ComplexMatrix {
    let mut dims = vec![aux_dim];
    dims.extend(core::iter::repeat(spec.spin.dim()).take(spec.n_sites));
    let total: usize = dims.iter().product();
    let mut x = mul_local_right(&ComplexMatrix::identity(total), kplus, &dims, &[0]);
    for site in (1..=spec.n_sites).rev() {
        x = mul_local_right(&x, r, &dims, &[0, site]);
    }
    x = mul_local_right(&x, kminus, &dims, &[0]);
    for site in 1..=spec.n_sites {
        x = mul_local_right(&x, r, &dims, &[0, site]);
    }
    partial_trace_first(&x, aux_dim)
}

/// `t^{(j,s)}(u)`.
pub fn transfer(j: SpinLabel, spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    let kp = kplus(j, u, spec.eta, &spec.boundary)?;
    let km = fused_kminus(j, u, spec.eta, &spec.boundary);
    let r = fused_r(j, spec.spin, u, spec.eta);
    Ok(transfer_from_parts(spec, j.dim(), &r, &km, &kp))
}

/// `t^{(j,s)}(u)` with `j` given as `2j`; `2j = 0` yields the identity.
pub fn transfer_twice(twice_j: u32, spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    if twice_j == 0 {
        Ok(ComplexMatrix::identity(spec.quantum_dim()))
    } else {
        transfer(SpinLabel::from_twice(twice_j), spec, u)
    }
}

/// `g(u) = Π_{k=1}^{2s−1} sh(u + (s−k+1/2)η)`.
pub fn g_factor(spec: &ChainSpec, u: C64) -> C64 {
    let s = spec.spin.value();
    (1..spec.spin.twice())
        .map(|k| sh(u + spec.eta * (s - k as f64 + 0.5)))
        .fold(C64::one(), |acc, z| acc * z)
}

pub const SAMPLING_GUARD: f64 = 1e-3;

/// `t̃(u) = t^{(1/2,s)}(u) / g(u)^{2N}`.
pub fn rescaled_fundamental(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    if g_factor(spec, u).norm() < SAMPLING_GUARD {
        return removable_point_mean(spec, u);
    }
    rescaled_direct(spec, u)
}

fn rescaled_direct(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    let g = g_factor(spec, u);
    let t = transfer(SpinLabel::HALF, spec, u)?;
    Ok(t.scale(C64::one() / g.powi(2 * spec.n_sites as i32)))
}

/// Radius and node count of the circle used at zeros of `g`.
const REMOVABLE_RADIUS: f64 = 0.04;
const REMOVABLE_NODES: usize = 32;

// t̃ is analytic at the zeros of g; its value there is the mean over a circle.
fn removable_point_mean(spec: &ChainSpec, u: C64) -> Result<ComplexMatrix> {
    let dim = spec.quantum_dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for k in 0..REMOVABLE_NODES {
        let phi = 2.0 * core::f64::consts::PI * (k as f64 + 0.5) / REMOVABLE_NODES as f64;
        let z = u + C64::from_polar(REMOVABLE_RADIUS, phi);
        acc = &acc + &rescaled_direct(spec, z)?;
    }
    Ok(acc.scale_real(1.0 / REMOVABLE_NODES as f64))
}

/// The quantum-determinant coefficient of the fusion hierarchy.
pub fn delta_fn(spec: &ChainSpec, u: C64) -> Result<C64> {
    let eta = spec.eta;
    let den = sh(u * 2.0 - eta) * sh(u * 2.0 + eta);
    if den.norm() < 1e-14 {
        return Err(Error::Pole {
            what: "sh(2u-eta)sh(2u+eta) in delta",
            at: u,
        });
    }
    let s = spec.spin.value();
    let mut prod = C64::one();
    for k in 0..spec.spin.twice() {
        prod *= xi(u + eta * (s - k as f64 - 0.5), eta);
    }
    let p = &spec.boundary;
    let bnd = sh(u + p.alpha_minus)
        * sh(u - p.alpha_minus)
        * ch(u + p.beta_minus)
        * ch(u - p.beta_minus)
        * sh(u + p.alpha_plus)
        * sh(u - p.alpha_plus)
        * ch(u + p.beta_plus)
        * ch(u - p.beta_plus);
    Ok(prod.powi(2 * spec.n_sites as i32) * 16.0 * sh(u * 2.0 - eta * 2.0) * sh(u * 2.0 + eta * 2.0) / den * bnd)
}

/// Relative residual of
/// `t^{(j−1/2)}(u−jη) t^{(1/2)}(u) = t^{(j)}(u−(j−1/2)η) + δ(u) t^{(j−1)}(u−(j+1/2)η)`.
pub fn check_fusion_hierarchy(spec: &ChainSpec, j: SpinLabel, u: C64) -> Result<f64> {
    if j.twice() < 2 {
        return Err(Error::InvalidArgument("fusion hierarchy starts at j = 1"));
    }
    let jv = j.value();
    let eta = spec.eta;
    let lhs = transfer_twice(j.twice() - 1, spec, u - eta * jv)?
        .matmul(&transfer(SpinLabel::HALF, spec, u)?);
    let t_j = transfer(j, spec, u - eta * (jv - 0.5))?;
    let t_jm1 = transfer_twice(j.twice() - 2, spec, u - eta * (jv + 0.5))?;
    let rhs = &t_j + &t_jm1.scale(delta_fn(spec, u)?);
    Ok(lhs.rel_diff(&rhs))
}

/// Relative commutator `‖[t^{(j)}(u), t^{(j')}(u')]‖ / (‖t‖‖t'‖)`.
pub fn commutator_residual(spec: &ChainSpec, j: SpinLabel, u: C64, jp: SpinLabel, up: C64) -> Result<f64> {
    let a = transfer(j, spec, u)?;
    let b = transfer(jp, spec, up)?;
    Ok(a.commutator(&b).norm_fro() / (a.norm_fro() * b.norm_fro()))
}

/// The scalar `t̃(0)` predicted by the initial condition.
pub fn initial_value(spec: &ChainSpec) -> C64 {
    let p = &spec.boundary;
    let s = spec.spin.value();
    -sh(spec.eta * (s + 0.5)).powi(2 * spec.n_sites as i32)
        * 8.0
        * ch(spec.eta)
        * sh(p.alpha_minus)
        * ch(p.beta_minus)
        * sh(p.alpha_plus)
        * ch(p.beta_plus)
}

/// The scalar `t̃(u)` reduces to at `η = 0`.
pub fn semiclassical_value(spec: &ChainSpec, u: C64) -> C64 {
    let p = &spec.boundary;
    let (s2, c2) = (sh(u) * sh(u), ch(u) * ch(u));
    let bracket = -sh(p.alpha_minus) * ch(p.beta_minus) * sh(p.alpha_plus) * ch(p.beta_plus) * c2
        + ch(p.alpha_minus) * sh(p.beta_minus) * ch(p.alpha_plus) * sh(p.beta_plus) * s2
        - ch(p.theta_minus - p.theta_plus) * s2 * c2;
    sh(u).powi(2 * spec.n_sites as i32) * 8.0 * bracket
}

fn scalar_residual(m: &ComplexMatrix, scalar: C64) -> f64 {
    let target = ComplexMatrix::identity(m.rows()).scale(scalar);
    m.rel_diff(&target)
}

/// `‖t̃(0) − t̃₀·1‖ / ‖t̃₀·1‖`.
pub fn check_initial(spec: &ChainSpec) -> Result<f64> {
    Ok(scalar_residual(&rescaled_fundamental(spec, C64::zero())?, initial_value(spec)))
}

/// Semi-classical residual; evaluated with `η` forced to zero.
pub fn check_semiclassical(spec: &ChainSpec, u: C64) -> Result<f64> {
    let spec0 = spec.with_eta(C64::zero());
    Ok(scalar_residual(&rescaled_fundamental(&spec0, u)?, semiclassical_value(&spec0, u)))
}

/// `‖t̃(u)·[−2^{2N+1} e^{−(2N+4)u−(N+2)η} / ch(θ₋−θ₊)] − 1‖ / ‖1‖`.
pub fn check_asymptotic(spec: &ChainSpec, u_large: f64) -> Result<f64> {
    let p = &spec.boundary;
    let cth = ch(p.theta_minus - p.theta_plus);
    if cth.norm() < 1e-14 {
        return Err(Error::InvalidArgument("ch(theta_minus - theta_plus) vanishes"));
    }
    let n = spec.n_sites as f64;
    let u = C64::new(u_large, 0.0);
    let pref = -(2f64).powf(2.0 * n + 1.0) * (-(u * (2.0 * n + 4.0)) - spec.eta * (n + 2.0)).exp() / cth;
    let t = rescaled_fundamental(spec, u)?.scale(pref);
    let id = ComplexMatrix::identity(t.rows());
    Ok((&t - &id).norm_fro() / id.norm_fro())
}

/// `‖t̃(u+iπ) − t̃(u)‖` relative.
pub fn check_periodicity(spec: &ChainSpec, u: C64) -> Result<f64> {
    let a = rescaled_fundamental(spec, u)?;
    let b = rescaled_fundamental(spec, u + C64::new(0.0, core::f64::consts::PI))?;
    Ok(a.rel_diff(&b))
}

/// `‖t̃(−u−η) − t̃(u)‖` relative.
pub fn check_crossing(spec: &ChainSpec, u: C64) -> Result<f64> {
    let a = rescaled_fundamental(spec, u)?;
    let b = rescaled_fundamental(spec, -u - spec.eta)?;
    Ok(a.rel_diff(&b))
}

/// True when `u` sits within [`SAMPLING_GUARD`] of a zero of `sh(2u±η)` or `g(u)`.
pub fn near_singular_point(spec: &ChainSpec, u: C64) -> bool {
    let eta = spec.eta;
    sh(u * 2.0 + eta).norm() < SAMPLING_GUARD
        || sh(u * 2.0 - eta).norm() < SAMPLING_GUARD
        || g_factor(spec, u).norm() < SAMPLING_GUARD
}

/// One simultaneous eigenvector pair of the commuting family.
#[derive(Clone, Debug)]
pub struct SpectrumLevel {
    pub index: usize,
    /// Eigenvalue of `t̃(u₀)`.
    pub lambda0: C64,
    pub right: Vec<C64>,
    pub left: Vec<C64>,
    pub degenerate_flag: bool,
}

impl SpectrumLevel {
    /// `leftᴴ · m · right`.
    pub fn expectation(&self, m: &ComplexMatrix) -> C64 {
        vdot(&self.left, &m.mul_vec(&self.right))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumConfig {
    pub u0: C64,
    /// Offset of the second spectral point used to split clusters.
    pub split_offset: C64,
    /// Perturbation applied to `u0` on retry.
    pub retry_offset: C64,
    /// Relative eigenvalue gap (w.r.t. `‖t̃(u₀)‖`) below which levels form a cluster.
    pub cluster_gap: f64,
    pub eig: EigConfig,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            u0: C64::new(0.83, 0.31),
            split_offset: C64::new(0.23, 0.11),
            retry_offset: C64::new(0.07, 0.0),
            cluster_gap: 1e-7,
            eig: EigConfig::default(),
        }
    }
}

/// Complete eigensystem of `t̃(u₀)`, with clusters of nearly equal eigenvalues
/// re-diagonalized at a second spectral point.
pub fn spectrum(spec: &ChainSpec, cfg: &SpectrumConfig) -> Result<Vec<SpectrumLevel>> {
    let mut u0 = cfg.u0;
    let mut last_err = None;
    for _attempt in 0..3 {
        match spectrum_at(spec, u0, cfg) {
            Ok(levels) if levels.iter().all(|l| !l.degenerate_flag) => return Ok(levels),
            Ok(levels) => last_err = Some(Ok(levels)),
            Err(e) => last_err = Some(Err(e)),
        }
        u0 += cfg.retry_offset;
    }
    last_err.unwrap_or(Err(Error::InvalidArgument("spectrum extraction failed")))
}

fn spectrum_at(spec: &ChainSpec, u0: C64, cfg: &SpectrumConfig) -> Result<Vec<SpectrumLevel>> {
    if near_singular_point(spec, u0) {
        return Err(Error::Pole {
            what: "spectral base point",
            at: u0,
        });
    }
    let t0 = rescaled_fundamental(spec, u0)?;
    let mut eig_cfg = cfg.eig;
    eig_cfg.max_dim = eig_cfg.max_dim.max(spec.max_dim);
    let triples = eig_with(&t0, &eig_cfg)?;
    let mut levels: Vec<SpectrumLevel> = triples
        .into_iter()
        .enumerate()
        .map(|(i, t)| SpectrumLevel {
            index: i,
            lambda0: t.value,
            right: t.right,
            left: t.left,
            degenerate_flag: t.degenerate,
        })
        .collect();

    let scale = t0.norm_fro();
    let clusters = clusters(&levels, cfg.cluster_gap * scale);
    if clusters.iter().any(|c| c.len() > 1) {
        let t1 = rescaled_fundamental(spec, u0 + cfg.split_offset)?;
        for cl in clusters.iter().filter(|c| c.len() > 1) {
            split_cluster(&mut levels, cl, &t1, &eig_cfg)?;
        }
    }
    for (i, l) in levels.iter_mut().enumerate() {
        l.index = i;
    }
    Ok(levels)
}

fn clusters(levels: &[SpectrumLevel], gap: f64) -> Vec<Vec<usize>> {
    let n = levels.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (levels[i].lambda0 - levels[j].lambda0).norm() < gap {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn split_cluster(levels: &mut [SpectrumLevel], idx: &[usize], t1: &ComplexMatrix, cfg: &EigConfig) -> Result<()> {
    let m = idx.len();
    let block = ComplexMatrix::from_fn(m, m, |a, b| levels[idx[a]].expectation_with(t1, &levels[idx[b]]));
    let sub = eig_with(&block, cfg)?;
    let dim = levels[idx[0]].right.len();
    let mut new_right = Vec::with_capacity(m);
    let mut new_left = Vec::with_capacity(m);
    for t in &sub {
        let mut r = vec![C64::zero(); dim];
        let mut l = vec![C64::zero(); dim];
        for (a, &i) in idx.iter().enumerate() {
            for k in 0..dim {
                r[k] += levels[i].right[k] * t.right[a];
                // new leftᴴ = tᴴ_left · Lᴴ  =>  new left = L · t.left
                l[k] += levels[i].left[k] * t.left[a];
            }
        }
        new_right.push((r, t.degenerate));
        new_left.push(l);
    }
    for (slot, (&i, ((r, deg), l))) in idx.iter().zip(new_right.into_iter().zip(new_left)).enumerate() {
        let _ = slot;
        levels[i].right = r;
        levels[i].left = l;
        levels[i].degenerate_flag = deg;
    }
    Ok(())
}

impl SpectrumLevel {
    fn expectation_with(&self, m: &ComplexMatrix, other: &SpectrumLevel) -> C64 {
        vdot(&self.left, &m.mul_vec(&other.right))
    }
}

/// `Λ̃(u)` of one level: `leftᴴ · t̃(u) · right`.
pub fn lambda_of(spec: &ChainSpec, level: &SpectrumLevel, u: C64) -> Result<C64> {
    Ok(level.expectation(&rescaled_fundamental(spec, u)?))
}

/// `Λ̃(u)` of every level, building `t̃(u)` once.
pub fn lambdas_at(spec: &ChainSpec, levels: &[SpectrumLevel], u: C64) -> Result<Vec<C64>> {
    let t = rescaled_fundamental(spec, u)?;
    Ok(levels.iter().map(|l| l.expectation(&t)).collect())
}
