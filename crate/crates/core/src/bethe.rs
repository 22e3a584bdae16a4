//! T–Q solutions of the fundamental transfer-matrix eigenvalues: H-functions,
//! the boundary constraint, Q-polynomial fitting, Bethe equations and sector
//! classification.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::One;

use crate::boundary::BoundaryParams;
use crate::linalg::{null_vector, poly_roots, singular_values, ComplexMatrix, Lu, PolyCoeffs, C64};
use crate::transfer::{lambdas_at, near_singular_point, ChainSpec, SpectrumLevel};
use crate::xprec::{from_dd_slice, Ctx, XC};
use crate::{ch, sh, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn int(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Which of the two T–Q families, labelled (+) and (−).
pub type Branch = Sign;

/// Sign choices and the integer `k` entering the constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectorConfig {
    pub branch: Branch,
    pub eps0: Sign,
    pub eps1: Sign,
    pub eps2: Sign,
    pub eps3: Sign,
    pub k: i64,
}

impl SectorConfig {
    /// All signs `+1`.
    pub fn new(branch: Branch, k: i64) -> Self {
        Self {
            branch,
            eps0: Sign::Plus,
            eps1: Sign::Plus,
            eps2: Sign::Plus,
            eps3: Sign::Plus,
            k,
        }
    }

    pub fn with_signs(branch: Branch, eps: [Sign; 4], k: i64) -> Result<Self> {
        let cfg = Self {
            branch,
            eps0: eps[0],
            eps1: eps[1],
            eps2: eps[2],
            eps3: eps[3],
            k,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps1.int() * self.eps2.int() * self.eps3.int() != 1 {
            return Err(Error::InvalidArgument("eps1*eps2*eps3 must equal +1"));
        }
        Ok(())
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        Self { branch, ..*self }
    }
}

struct Shifts {
    a_m: C64,
    b_m: C64,
    a_p: C64,
    b_p: C64,
}

// Signed boundary parameters as they appear in the (+) form of H̃₁.
fn shifts(sector: &SectorConfig, p: &BoundaryParams) -> Shifts {
    let sg = sector.branch.value();
    Shifts {
        a_m: p.alpha_minus * sg,
        b_m: p.beta_minus * (sg * sector.eps1.value()),
        a_p: p.alpha_plus * (sg * sector.eps2.value()),
        b_p: p.beta_plus * (sg * sector.eps3.value()),
    }
}

fn check_pole(den: C64, what: &'static str, u: C64) -> Result<()> {
    if den.norm() < 1e-14 {
        Err(Error::Pole { what, at: u })
    } else {
        Ok(())
    }
}

/// `H̃₁^{(±)}(u | ε₁, ε₂, ε₃)`.
pub fn h1_tilde(sector: &SectorConfig, spec: &ChainSpec, u: C64) -> Result<C64> {
    let eta = spec.eta;
    let den = sh(u * 2.0 + eta);
    check_pole(den, "sh(2u+eta) in H1", u)?;
    let s = spec.spin.value();
    let x = shifts(sector, &spec.boundary);
    let bulk = sh(u - eta * (s - 0.5)).powi(2 * spec.n_sites as i32);
    Ok(bulk * (-4.0 * sector.eps2.value()) * sh(u * 2.0) / den
        * sh(u + x.a_m + eta)
        * ch(u + x.b_m + eta)
        * sh(u + x.a_p + eta)
        * ch(u + x.b_p + eta))
}

/// `H̃₂^{(±)}(u | ε₁, ε₂, ε₃)`.
pub fn h2_tilde(sector: &SectorConfig, spec: &ChainSpec, u: C64) -> Result<C64> {
    let eta = spec.eta;
    let den = sh(u * 2.0 + eta);
    check_pole(den, "sh(2u+eta) in H2", u)?;
    let s = spec.spin.value();
    let x = shifts(sector, &spec.boundary);
    let bulk = sh(u + eta * (s + 0.5)).powi(2 * spec.n_sites as i32);
    Ok(bulk * (-4.0 * sector.eps2.value()) * sh(u * 2.0 + eta * 2.0) / den
        * sh(u - x.a_m)
        * ch(u - x.b_m)
        * sh(u - x.a_p)
        * ch(u - x.b_p))
}

/// `H₁^{(±)}` before the common `g^{2N}` factor is removed.
pub fn h1(sector: &SectorConfig, spec: &ChainSpec, u: C64) -> Result<C64> {
    let s = spec.spin.value();
    let eta = spec.eta;
    let mut prod = C64::one();
    for k in 0..spec.spin.twice() {
        prod *= sh(u + eta * (s - k as f64 - 0.5));
    }
    let den = sh(u * 2.0 + eta);
    check_pole(den, "sh(2u+eta) in H1", u)?;
    let x = shifts(sector, &spec.boundary);
    Ok(prod.powi(2 * spec.n_sites as i32) * (-4.0 * sector.eps2.value()) * sh(u * 2.0) / den
        * sh(u + x.a_m + eta)
        * ch(u + x.b_m + eta)
        * sh(u + x.a_p + eta)
        * ch(u + x.b_p + eta))
}

/// Reduces `z` modulo `2πi` so that its imaginary part lies in `(−π, π]`.
pub fn reduce_mod_2pi_i(z: C64) -> C64 {
    let two_pi = 2.0 * PI;
    let mut im = z.im - two_pi * ((z.im + PI) / two_pi).floor();
    if im <= -PI {
        im += two_pi;
    }
    C64::new(z.re, im)
}

/// `α₋ + ε₁β₋ + ε₂α₊ + ε₃β₊ − ε₀(θ₋−θ₊) − ηk − (1−ε₂)iπ/2`, reduced mod `2πi`.
pub fn check_constraint(p: &BoundaryParams, sector: &SectorConfig, eta: C64) -> C64 {
    reduce_mod_2pi_i(constraint_lhs_minus_rhs(p, sector, eta))
}

fn constraint_lhs_minus_rhs(p: &BoundaryParams, sector: &SectorConfig, eta: C64) -> C64 {
    let lhs = p.alpha_minus
        + p.beta_minus * sector.eps1.value()
        + p.alpha_plus * sector.eps2.value()
        + p.beta_plus * sector.eps3.value();
    let rhs = (p.theta_minus - p.theta_plus) * sector.eps0.value()
        + eta * sector.k as f64
        + C64::new(0.0, (1.0 - sector.eps2.value()) * PI / 2.0);
    lhs - rhs
}

/// The `θ₊` that makes [`check_constraint`] vanish, all other parameters fixed.
pub fn solve_theta_plus(p: &BoundaryParams, sector: &SectorConfig, eta: C64) -> C64 {
    // residual is linear in θ₊ with slope ε₀
    let r = constraint_lhs_minus_rhs(p, sector, eta);
    p.theta_plus - r * sector.eps0.value()
}

/// `p` with `θ₊` replaced by [`solve_theta_plus`].
pub fn with_solved_theta_plus(p: &BoundaryParams, sector: &SectorConfig, eta: C64) -> BoundaryParams {
    BoundaryParams {
        theta_plus: solve_theta_plus(p, sector, eta),
        ..*p
    }
}

/// `M^{(±)} = sN − 1/2 ∓ k/2`; negative values mean the sector is empty.
pub fn m_count(spec: &ChainSpec, sector: &SectorConfig) -> Result<i64> {
    let twice_m = spec.spin.twice() as i64 * spec.n_sites as i64 - 1 - sector.branch.int() * sector.k;
    if twice_m % 2 != 0 {
        return Err(Error::Parity { twice_m });
    }
    Ok(twice_m / 2)
}

/// `Q(u) = Π sh(u − v_j) sh(u + v_j + η)`.
pub fn q_from_roots(roots_v: &[C64], eta: C64, u: C64) -> C64 {
    roots_v
        .iter()
        .fold(C64::one(), |acc, &v| acc * sh(u - v) * sh(u + v + eta))
}

/// `y = ch(2u + η)`, the variable in which `Q` is a polynomial.
pub fn y_of(u: C64, eta: C64) -> C64 {
    ch(u * 2.0 + eta)
}

/// Puts `ṽ` into the fundamental domain of `ṽ ~ −ṽ ~ ṽ + iπ`:
/// `Re ṽ ≥ 0` and `Im ṽ ∈ (−π/2, π/2]`, with `Im ṽ ≥ 0` when `Re ṽ = 0`.
pub fn canonical_vtilde(z: C64) -> C64 {
    const EDGE: f64 = 1e-9;
    let reduce = |w: C64| {
        let mut im = w.im - PI * ((w.im + PI / 2.0) / PI).floor();
        if im <= -PI / 2.0 + EDGE {
            im += PI;
        }
        C64::new(w.re, im)
    };
    let mut w = reduce(z);
    if w.re < -EDGE || (w.re.abs() <= EDGE && w.im < -EDGE) {
        w = reduce(-w);
    }
    w
}

/// `ṽ = arcch(y)/2` in canonical form.
pub fn vtilde_from_y(y: C64) -> C64 {
    canonical_vtilde(y.acosh() / 2.0)
}

/// A level matched to one T–Q family.
#[derive(Clone, Debug)]
pub struct BetheSolution {
    pub level_index: usize,
    pub sector: SectorConfig,
    pub m: usize,
    /// Monic `q(y)` with `Q(u) = 2^{−M} q(ch(2u+η))`.
    pub q_coeffs: PolyCoeffs,
    /// Bethe roots `v_j`.
    pub roots_v: Vec<C64>,
    /// Low-order corrections to `roots_v` from the extended-precision polish
    /// (zero when it was not needed).
    pub roots_lo: Vec<C64>,
    pub fit_residual: f64,
    pub bae_residual: f64,
}

impl BetheSolution {
    /// `ṽ_j = v_j + η/2` in canonical form, sorted by real then imaginary part.
    pub fn roots_vtilde(&self, eta: C64) -> Vec<C64> {
        let mut out: Vec<C64> = self.roots_v.iter().map(|&v| canonical_vtilde(v + eta / 2.0)).collect();
        sort_roots(&mut out);
        out
    }
}

pub fn sort_roots(r: &mut [C64]) {
    r.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
}

/// Evaluation points for the T–Q fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitGrid {
    pub points: Vec<C64>,
}

/// Radius of the circle in the `y = ch(2u+η)` plane carrying the fit grid.
pub const GRID_RADIUS: f64 = 2.5;
const GRID_PHASE: f64 = 0.37;

/// `u` with `ch(2u + η) = y`.
pub fn u_of_y(y: C64, eta: C64) -> C64 {
    (y.acosh() - eta) / 2.0
}

/// `count` points whose `y = ch(2u+η)` are equally spaced on `|y| = radius`,
/// skipping points next to singularities of `t̃` or the H-functions.
pub fn fit_grid_on(spec: &ChainSpec, count: usize, radius: f64, phase: f64) -> FitGrid {
    let mut points = Vec::with_capacity(count);
    let mut nodes = count;
    while points.len() < count {
        points.clear();
        for t in 0..nodes {
            let phi = phase + 2.0 * PI * t as f64 / nodes as f64;
            let u = u_of_y(C64::from_polar(radius, phi), spec.eta);
            if !near_singular_point(spec, u) {
                points.push(u);
            }
        }
        nodes += 1;
    }
    points.truncate(count);
    FitGrid { points }
}

pub fn fit_grid(spec: &ChainSpec, count: usize) -> FitGrid {
    fit_grid_on(spec, count, GRID_RADIUS, GRID_PHASE)
}

/// Number of grid points used for a fit of degree `m`.
pub fn grid_len(m: usize) -> usize {
    m + 6
}

#[derive(Clone, Copy, Debug)]
pub struct FitConfig {
    /// Acceptance threshold on the normalized fit residual.
    pub fit_tol: f64,
    /// Target BAE residual for Newton refinement.
    pub bae_tol: f64,
    pub max_newton: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            fit_tol: 1e-8,
            bae_tol: 1e-12,
            max_newton: 50,
        }
    }
}

/// H-function values of one sector on a grid, shared by every level.
#[derive(Clone, Debug)]
pub struct SectorSamples {
    pub sector: SectorConfig,
    pub m: usize,
    pub u: Vec<C64>,
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
    pub y0: Vec<C64>,
    pub y_plus: Vec<C64>,
    pub y_minus: Vec<C64>,
}

impl SectorSamples {
    pub fn new(spec: &ChainSpec, sector: &SectorConfig, m: usize, grid: &[C64]) -> Result<Self> {
        let eta = spec.eta;
        let mut s = SectorSamples {
            sector: *sector,
            m,
            u: grid.to_vec(),
            h1: Vec::with_capacity(grid.len()),
            h2: Vec::with_capacity(grid.len()),
            y0: Vec::with_capacity(grid.len()),
            y_plus: Vec::with_capacity(grid.len()),
            y_minus: Vec::with_capacity(grid.len()),
        };
        for &u in grid {
            s.h1.push(h1_tilde(sector, spec, u)?);
            s.h2.push(h2_tilde(sector, spec, u)?);
            s.y0.push(y_of(u, eta));
            s.y_plus.push(y_of(u + eta, eta));
            s.y_minus.push(y_of(u - eta, eta));
        }
        Ok(s)
    }
}

/// Outcome of fitting one level against one sector.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub fit_residual: f64,
    /// `σ_max/σ_min` of the scaled system without its null direction.
    pub condition: f64,
    pub q: Option<PolyCoeffs>,
}

/// Fits `Λ̃ q(y) − H̃₁ q(y₊) − H̃₂ q(y₋) = 0` for the coefficients of `q`.
///
/// `lambdas[i]` is `Λ̃(u_i)` on the sample grid.
pub fn fit_q(samples: &SectorSamples, lambdas: &[C64]) -> Result<FitOutcome> {
    let n = samples.u.len();
    if lambdas.len() != n {
        return Err(Error::InvalidArgument("lambda samples do not match the grid"));
    }
    let m = samples.m;
    if m == 0 {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            num = num.max((lambdas[i] - samples.h1[i] - samples.h2[i]).norm());
            den = den.max(lambdas[i].norm()).max(samples.h1[i].norm()).max(samples.h2[i].norm());
        }
        return Ok(FitOutcome {
            fit_residual: num / den,
            condition: 1.0,
            q: Some(PolyCoeffs::new(vec![C64::one()])),
        });
    }
    let mut a = ComplexMatrix::from_fn(n, m + 1, |i, p| {
        let p = p as i32;
        lambdas[i] * samples.y0[i].powi(p) - samples.h1[i] * samples.y_plus[i].powi(p) - samples.h2[i] * samples.y_minus[i].powi(p)
    });
    // row then column equilibration
    for i in 0..n {
        let r = (0..=m).map(|p| a[(i, p)].norm()).fold(0.0, f64::max);
        if r > 0.0 {
            for p in 0..=m {
                a[(i, p)] /= r;
            }
        }
    }
    let mut col_scale = vec![1.0; m + 1];
    for (p, cs) in col_scale.iter_mut().enumerate() {
        let c = (0..n).map(|i| a[(i, p)].norm()).fold(0.0, f64::max);
        if c > 0.0 {
            *cs = c;
            for i in 0..n {
                a[(i, p)] /= c;
            }
        }
    }
    let sv = singular_values(&a);
    let smax = sv[0];
    if !(smax > 0.0) || !smax.is_finite() {
        return Err(Error::NonFinite("Q-fit system"));
    }
    let smin = *sv.last().unwrap_or(&0.0);
    let second = if sv.len() >= 2 { sv[sv.len() - 2] } else { smax };
    let (nv, _) = null_vector(&a);
    let coeffs: Vec<C64> = nv.iter().zip(&col_scale).map(|(&x, &s)| x / s).collect();
    let lead = coeffs[m];
    let q = if lead.norm() > 0.0 {
        Some(PolyCoeffs::new(coeffs.iter().map(|&c| c / lead).collect()))
    } else {
        None
    };
    Ok(FitOutcome {
        fit_residual: smin / smax,
        condition: smax / second.max(f64::MIN_POSITIVE),
        q,
    })
}

/// Bethe roots `v_j` from a monic `q(y)`.
pub fn roots_from_q(q: &PolyCoeffs, eta: C64) -> Result<Vec<C64>> {
    if q.degree() == 0 {
        return Ok(Vec::new());
    }
    Ok(poly_roots(q)?
        .into_iter()
        .map(|y| vtilde_from_y(y) - eta / 2.0)
        .collect())
}

/// `Λ̃(u)` from the T–Q formula with the given roots.
pub fn lambda_from_roots(spec: &ChainSpec, sector: &SectorConfig, roots_v: &[C64], u: C64) -> Result<C64> {
    let eta = spec.eta;
    let q0 = q_from_roots(roots_v, eta, u);
    if q0.norm() < 1e-300 {
        return Err(Error::Pole {
            what: "Q(u) in the T-Q relation",
            at: u,
        });
    }
    let h1v = h1_tilde(sector, spec, u)?;
    let h2v = h2_tilde(sector, spec, u)?;
    Ok((h1v * q_from_roots(roots_v, eta, u + eta) + h2v * q_from_roots(roots_v, eta, u - eta)) / q0)
}

struct BaeTerms {
    s_eta: C64,
    bshifts: [(C64, bool); 4],
}

fn bae_terms(spec: &ChainSpec, sector: &SectorConfig) -> BaeTerms {
    let x = shifts(sector, &spec.boundary);
    BaeTerms {
        s_eta: spec.eta * spec.spin.value(),
        // (signed parameter, is a sh factor)
        bshifts: [(x.a_m, true), (x.b_m, false), (x.a_p, true), (x.b_p, false)],
    }
}

fn fsh(z: C64, is_sh: bool) -> C64 {
    if is_sh {
        sh(z)
    } else {
        ch(z)
    }
}

// d/dz log f(z): coth for sh, tanh for ch.
fn dlog(z: C64, is_sh: bool) -> C64 {
    if is_sh {
        ch(z) / sh(z)
    } else {
        sh(z) / ch(z)
    }
}

// LHS_j / RHS_j with the common sh(2ṽ+η)/sh(2ṽ−η) factor cancelled.
fn bae_ratios(spec: &ChainSpec, sector: &SectorConfig, vt: &[C64]) -> Vec<C64> {
    let eta = spec.eta;
    let t = bae_terms(spec, sector);
    let n2 = 2 * spec.n_sites as i32;
    let h = eta / 2.0;
    (0..vt.len())
        .map(|j| {
            let v = vt[j];
            let mut lhs = (sh(v + t.s_eta) / sh(v - t.s_eta)).powi(n2);
            for &(c, is_sh) in &t.bshifts {
                lhs *= fsh(v - c - h, is_sh) / fsh(v + c + h, is_sh);
            }
            let mut rhs = C64::one();
            for (k, &w) in vt.iter().enumerate() {
                if k != j {
                    rhs *= sh(v - w + eta) / sh(v - w - eta) * sh(v + w + eta) / sh(v + w - eta);
                }
            }
            lhs / rhs
        })
        .collect()
}

/// `max_j |LHS_j / RHS_j − 1|` of the Bethe equations, with `roots_v` the `v_j`.
pub fn bae_residual(spec: &ChainSpec, sector: &SectorConfig, roots_v: &[C64]) -> f64 {
    let vt: Vec<C64> = roots_v.iter().map(|&v| v + spec.eta / 2.0).collect();
    bae_ratios(spec, sector, &vt)
        .iter()
        .map(|r| {
            let d = (r - C64::one()).norm();
            if d.is_finite() {
                d
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

fn x_fsh(cx: &mut Ctx, z: &XC, is_sh: bool) -> XC {
    if is_sh {
        cx.sh(z)
    } else {
        cx.ch(z)
    }
}

// bae_ratios in 128-bit arithmetic.
fn bae_ratios_x(cx: &mut Ctx, spec: &ChainSpec, sector: &SectorConfig, vt: &[XC]) -> Vec<XC> {
    let t = bae_terms(spec, sector);
    let eta = XC::from_c64(spec.eta);
    let s_eta = XC::from_c64(t.s_eta);
    let h = XC::from_c64(spec.eta / 2.0);
    let shifts: Vec<(XC, bool)> = t.bshifts.iter().map(|&(c, b)| (XC::from_c64(c).add(&h), b)).collect();
    let n2 = 2 * spec.n_sites;
    (0..vt.len())
        .map(|j| {
            let v = &vt[j];
            let base = cx.sh(&v.add(&s_eta)).div(&cx.sh(&v.sub(&s_eta)));
            let mut lhs = XC::one();
            for _ in 0..n2 {
                lhs = lhs.mul(&base);
            }
            for (c, is_sh) in &shifts {
                let num = x_fsh(cx, &v.sub(c), *is_sh);
                let den = x_fsh(cx, &v.add(c), *is_sh);
                lhs = lhs.mul(&num).div(&den);
            }
            let mut rhs = XC::one();
            for (k, w) in vt.iter().enumerate() {
                if k != j {
                    let d = v.sub(w);
                    let a = v.add(w);
                    let f = cx
                        .sh(&d.add(&eta))
                        .div(&cx.sh(&d.sub(&eta)))
                        .mul(&cx.sh(&a.add(&eta)))
                        .div(&cx.sh(&a.sub(&eta)));
                    rhs = rhs.mul(&f);
                }
            }
            lhs.div(&rhs)
        })
        .collect()
}

fn vtilde_x(roots_hi: &[C64], roots_lo: &[C64], eta: C64) -> Vec<XC> {
    let h = XC::from_c64(eta / 2.0);
    from_dd_slice(roots_hi, roots_lo).iter().map(|v| v.add(&h)).collect()
}

/// [`bae_residual`] evaluated in 128-bit arithmetic at the roots `hi + lo`.
pub fn bae_residual_precise(spec: &ChainSpec, sector: &SectorConfig, roots_hi: &[C64], roots_lo: &[C64]) -> f64 {
    let Some(mut cx) = Ctx::new() else {
        return f64::NAN;
    };
    let vt = vtilde_x(roots_hi, roots_lo, spec.eta);
    bae_ratios_x(&mut cx, spec, sector, &vt)
        .iter()
        .map(|r| {
            let d = r.sub(&XC::one()).to_c64().norm();
            if d.is_finite() {
                d
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

/// Jacobian of `F_j = log(LHS_j/RHS_j)` with respect to the `ṽ_k`.
pub fn bae_log_jacobian(spec: &ChainSpec, sector: &SectorConfig, vt: &[C64]) -> ComplexMatrix {
    let eta = spec.eta;
    let t = bae_terms(spec, sector);
    let n2 = 2.0 * spec.n_sites as f64;
    let h = eta / 2.0;
    let coth = |z: C64| ch(z) / sh(z);
    let m = vt.len();
    ComplexMatrix::from_fn(m, m, |j, k| {
        let v = vt[j];
        if j == k {
            let mut d = (coth(v + t.s_eta) - coth(v - t.s_eta)) * n2;
            for &(c, is_sh) in &t.bshifts {
                d += dlog(v - c - h, is_sh) - dlog(v + c + h, is_sh);
            }
            for (l, &w) in vt.iter().enumerate() {
                if l != j {
                    d -= coth(v - w + eta) - coth(v - w - eta) + coth(v + w + eta) - coth(v + w - eta);
                }
            }
            d
        } else {
            let w = vt[k];
            -(-coth(v - w + eta) + coth(v - w - eta) + coth(v + w + eta) - coth(v + w - eta))
        }
    })
}

#[derive(Clone, Debug)]
pub struct Refinement {
    pub roots_v: Vec<C64>,
    /// Low-order parts; the refined roots are `roots_v + roots_lo`.
    pub roots_lo: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Damped Newton iteration on the logarithmic Bethe equations.
pub fn newton_refine(spec: &ChainSpec, sector: &SectorConfig, roots_v: &[C64], cfg: &FitConfig) -> Result<Refinement> {
    let eta = spec.eta;
    let mut vt: Vec<C64> = roots_v.iter().map(|&v| v + eta / 2.0).collect();
    let to_v = |vt: &[C64]| vt.iter().map(|&w| w - eta / 2.0).collect::<Vec<_>>();
    let mut res = bae_residual(spec, sector, roots_v);
    if !res.is_finite() {
        return Err(Error::NonFinite("Bethe equations at the starting roots"));
    }
    let mut iterations = 0;
    while res > cfg.bae_tol && iterations < cfg.max_newton {
        let f: Vec<C64> = bae_ratios(spec, sector, &vt).iter().map(|r| -r.ln()).collect();
        let jac = bae_log_jacobian(spec, sector, &vt);
        let lu = Lu::new(&jac).ok_or(Error::SingularJacobian)?;
        let step = lu.solve(&f);
        if step.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::SingularJacobian);
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<C64> = vt.iter().zip(&step).map(|(&a, &d)| a + d * lambda).collect();
            let r = bae_residual(spec, sector, &to_v(&trial));
            if r.is_finite() && r < res {
                vt = trial;
                res = r;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    let mut out = Refinement {
        roots_lo: vec![C64::new(0.0, 0.0); vt.len()],
        roots_v: to_v(&vt),
        iterations,
        residual: res,
        converged: res <= cfg.bae_tol,
    };
    if !out.converged {
        polish_precise(spec, sector, &mut out, cfg);
    }
    Ok(out)
}

const PRECISE_STEPS: usize = 12;

// Simplified Newton with the f64 Jacobian and 128-bit residuals. Used when
// roots form near-exact strings and the f64 equations stall.
fn polish_precise(spec: &ChainSpec, sector: &SectorConfig, r: &mut Refinement, cfg: &FitConfig) {
    let Some(mut cx) = Ctx::new() else {
        return;
    };
    let eta = spec.eta;
    let h = XC::from_c64(eta / 2.0);
    let mut vt = vtilde_x(&r.roots_v, &r.roots_lo, eta);
    let jac_at = |vt: &[XC]| {
        let hi: Vec<C64> = vt.iter().map(|v| v.to_c64()).collect();
        bae_log_jacobian(spec, sector, &hi)
    };
    let mut best = f64::INFINITY;
    for _ in 0..PRECISE_STEPS {
        let ratios = bae_ratios_x(&mut cx, spec, sector, &vt);
        let f: Vec<C64> = ratios.iter().map(|q| q.sub(&XC::one()).to_c64()).collect();
        let res = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !res.is_finite() || res >= best {
            break;
        }
        best = res;
        let (hi, lo): (Vec<C64>, Vec<C64>) = vt.iter().map(|v| v.sub(&h).to_dd()).unzip();
        r.roots_v = hi;
        r.roots_lo = lo;
        r.residual = res;
        r.iterations += 1;
        if res <= cfg.bae_tol * 1e-3 {
            break;
        }
        let Some(lu) = Lu::new(&jac_at(&vt)) else {
            break;
        };
        let rhs: Vec<C64> = f.iter().map(|z| -z).collect();
        let step = lu.solve(&rhs);
        vt = vt.iter().zip(&step).map(|(v, d)| v.add(&XC::from_c64(*d))).collect();
    }
    r.converged = r.residual <= cfg.bae_tol;
}

/// Result of [`q_fit`]: the fit residual, and the solution if accepted.
#[derive(Clone, Debug)]
pub struct QFit {
    pub fit_residual: f64,
    pub solution: Option<BetheSolution>,
}

/// Fit, root extraction and refinement of one level in one sector.
pub fn q_fit(spec: &ChainSpec, samples: &SectorSamples, level_index: usize, lambdas: &[C64], cfg: &FitConfig) -> Result<QFit> {
    let out = fit_q(samples, lambdas)?;
    let reject = QFit {
        fit_residual: out.fit_residual,
        solution: None,
    };
    if !(out.fit_residual <= cfg.fit_tol) {
        return Ok(reject);
    }
    let q = match out.q {
        Some(q) => q,
        None => return Ok(reject),
    };
    let roots = roots_from_q(&q, spec.eta)?;
    let zero_lo = vec![C64::new(0.0, 0.0); roots.len()];
    let (roots, lo, bae) = if roots.is_empty() {
        (roots, zero_lo, 0.0)
    } else {
        match newton_refine(spec, &samples.sector, &roots, cfg) {
            Ok(r) => (r.roots_v, r.roots_lo, r.residual),
            Err(_) => {
                let r = bae_residual(spec, &samples.sector, &roots);
                (roots, zero_lo, r)
            }
        }
    };
    Ok(QFit {
        fit_residual: out.fit_residual,
        solution: Some(BetheSolution {
            level_index,
            sector: samples.sector,
            m: samples.m,
            q_coeffs: q,
            roots_v: roots,
            roots_lo: lo,
            fit_residual: out.fit_residual,
            bae_residual: bae,
        }),
    })
}

/// Per-level result of [`classify`].
#[derive(Clone, Debug)]
pub struct LevelFits {
    pub level_index: usize,
    pub minus: Option<BetheSolution>,
    pub plus: Option<BetheSolution>,
    /// Fit residuals in the (−) and (+) sectors; `None` for an empty sector.
    pub residuals: [Option<f64>; 2],
}

impl LevelFits {
    pub fn is_dual(&self) -> bool {
        self.minus.is_some() && self.plus.is_some()
    }

    pub fn is_unclassified(&self) -> bool {
        self.minus.is_none() && self.plus.is_none()
    }

    pub fn get(&self, b: Branch) -> Option<&BetheSolution> {
        match b {
            Branch::Minus => self.minus.as_ref(),
            Branch::Plus => self.plus.as_ref(),
        }
    }
}

/// Counts for one value of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub k: i64,
    pub count_minus: usize,
    pub count_plus: usize,
    pub dual: usize,
    pub unclassified: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub levels: Vec<LevelFits>,
    pub row: TableRow,
}

/// Λ̃ samples of every level on the union grid of both sectors.
pub fn sample_levels(spec: &ChainSpec, levels: &[SpectrumLevel], grid: &[C64]) -> Result<Vec<Vec<C64>>> {
    let mut by_level = vec![Vec::with_capacity(grid.len()); levels.len()];
    for &u in grid {
        let vals = lambdas_at(spec, levels, u)?;
        for (l, v) in by_level.iter_mut().zip(vals) {
            l.push(v);
        }
    }
    Ok(by_level)
}

/// Attempts every level in both sectors. `base` fixes the signs and `k`;
/// its branch is ignored.
pub fn classify(spec: &ChainSpec, levels: &[SpectrumLevel], base: &SectorConfig, cfg: &FitConfig) -> Result<Classification> {
    base.validate()?;
    let sectors = [base.with_branch(Branch::Minus), base.with_branch(Branch::Plus)];
    let ms = [m_count(spec, &sectors[0])?, m_count(spec, &sectors[1])?];
    let mut fits: Vec<[Option<BetheSolution>; 2]> = vec![[None, None]; levels.len()];
    let mut residuals = vec![[None, None]; levels.len()];
    for b in 0..2 {
        if ms[b] < 0 {
            continue;
        }
        let m = ms[b] as usize;
        let grid = fit_grid(spec, grid_len(m));
        let samples = SectorSamples::new(spec, &sectors[b], m, &grid.points)?;
        let lambdas = sample_levels(spec, levels, &grid.points)?;
        for (i, lam) in lambdas.iter().enumerate() {
            let f = q_fit(spec, &samples, levels[i].index, lam, cfg)?;
            residuals[i][b] = Some(f.fit_residual);
            fits[i][b] = f.solution;
        }
    }
    let out: Vec<LevelFits> = fits
        .into_iter()
        .zip(residuals)
        .zip(levels)
        .map(|(([minus, plus], residuals), level)| LevelFits {
            level_index: level.index,
            minus,
            plus,
            residuals,
        })
        .collect();
    let row = TableRow {
        k: base.k,
        count_minus: out.iter().filter(|l| l.minus.is_some()).count(),
        count_plus: out.iter().filter(|l| l.plus.is_some()).count(),
        dual: out.iter().filter(|l| l.is_dual()).count(),
        unclassified: out.iter().filter(|l| l.is_unclassified()).count(),
    };
    Ok(Classification { levels: out, row })
}

/// Values of `k` allowed by the parity rule with `|k| ≤ 2sN + 1`.
pub fn allowed_k(spec: &ChainSpec) -> Vec<i64> {
    let kmax = spec.spin.twice() as i64 * spec.n_sites as i64 + 1;
    (-kmax..=kmax)
        .rev()
        .filter(|&k| m_count(spec, &SectorConfig::new(Branch::Plus, k)).is_ok())
        .collect()
}

/// Largest relative deviation between the T–Q eigenvalue of `sol` and
/// `lambda(u)` over the given points.
pub fn reconstruction_error(
    spec: &ChainSpec,
    sol: &BetheSolution,
    points: &[C64],
    mut lambda: impl FnMut(C64) -> Result<C64>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &u in points {
        let exact = lambda(u)?;
        let rec = lambda_from_roots(spec, &sol.sector, &sol.roots_v, u)?;
        let scale = exact.norm().max(f64::MIN_POSITIVE);
        worst = worst.max((rec - exact).norm() / scale);
    }
    Ok(worst)
}
