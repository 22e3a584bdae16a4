//! Projector identities behind the fusion hierarchy: the expansion of the
//! symmetrizer into sums of commuting transpositions, and the relations
//! `P⁺ P⁻ P⁺ = P⁺ P⁻ + Σ_k P⁺_{k,k+1} X^{(k)} P⁻_{k,k+1}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Zero;

use crate::fusion::{symmetrizer, symmetrizer_on, SpinLabel};
use crate::linalg::tensor::{embed, qubit_permutation, transposition};
use crate::linalg::{least_squares_residual, ComplexMatrix};
use crate::{Error, Result};

pub type Rational = Ratio<i128>;

/// Largest `n` accepted by [`verify_fund_exp`].
pub const MAX_FUND_EXP: usize = 6;

/// Nearest f64; exact for the small coefficients used here.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// `a^{(n)}_ℓ` for `ℓ = 0..=⌊n/2⌋`.
pub fn expansion_coeffs(n: usize) -> Vec<Rational> {
    assert!(n >= 1, "expansion_coeffs needs n >= 1");
    let r = |x: i128| Rational::from_integer(x);
    let mut a = vec![r(1)];
    for m in 1..n {
        let get = |l: usize| a.get(l).copied().unwrap_or_else(Rational::zero);
        let half = m / 2;
        let sq = r(((m + 1) * (m + 1)) as i128);
        let mut next = vec![Rational::zero(); (m + 1) / 2 + 1];
        next[0] = (get(0) - r(factorial(m)) * get(1)) / r(m as i128 + 1);
        next[1] = (get(0) / r(factorial(m - 1)) + r(4) * get(1) - r(2) * get(2)) / sq;
        for l in 2..=half {
            let li = l as i128;
            next[l] = (r(3 * li + 1) * get(l) - r(li + 1) * get(l + 1) + r(m as i128 + 2 - 2 * li) * get(l - 1)) / sq;
        }
        if half + 1 >= 2 && half + 1 < next.len() {
            next[half + 1] = r((m - 2 * half) as i128) / sq * get(half);
        }
        a = next;
    }
    a
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `‖P⁺_{1…n} − a₀ − Σ_ℓ a_ℓ Σ_{σ∈S_n} 𝒫_{σ(1)σ(2)}⋯𝒫_{σ(2ℓ−1)σ(2ℓ)}‖_F`.
pub fn verify_fund_exp(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1"));
    }
    if n > MAX_FUND_EXP {
        return Err(Error::DimensionCap {
            dim: 1 << n,
            cap: 1 << MAX_FUND_EXP,
        });
    }
    let coeffs = expansion_coeffs(n);
    let perms = permutations(n);
    let mut acc = ComplexMatrix::identity(1 << n).scale_real(to_f64(&coeffs[0]));
    for (l, a) in coeffs.iter().enumerate().skip(1) {
        // count each involution once, then weight by how many σ produce it
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for s in &perms {
            let mut inv: Vec<usize> = (0..n).collect();
            for pair in s[..2 * l].chunks(2) {
                inv.swap(pair[0], pair[1]);
            }
            *counts.entry(inv).or_default() += 1;
        }
        let a = to_f64(a);
        for (inv, count) in counts {
            acc = &acc + &qubit_permutation(&inv).scale_real(a * count as f64);
        }
    }
    Ok((&symmetrizer(n) - &acc).norm_fro())
}

/// One term `coeff · 𝒫_{a₁b₁} 𝒫_{a₂b₂} ⋯` with 1-based site labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PermTerm {
    pub coeff: Rational,
    pub swaps: Vec<(usize, usize)>,
}

fn term(num: i128, den: i128, swaps: &[(usize, usize)]) -> PermTerm {
    PermTerm {
        coeff: Rational::new(num, den),
        swaps: swaps.to_vec(),
    }
}

/// Operator on `n` qubits of a sum of permutation products.
pub fn perm_sum(n: usize, terms: &[PermTerm]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(1 << n, 1 << n);
    for t in terms {
        let mut op = ComplexMatrix::identity(1 << n);
        for &(a, b) in &t.swaps {
            op = op.matmul(&transposition(n, a - 1, b - 1));
        }
        acc = &acc + &op.scale_real(to_f64(&t.coeff));
    }
    acc
}

/// The explicit `X^{(1)}, …, X^{(2j−1)}` for `j ∈ {3/2, 2, 5/2}`.
pub fn known_x(j: SpinLabel) -> Option<Vec<Vec<PermTerm>>> {
    match j.twice() {
        3 => Some(vec![
            vec![term(1, 3, &[(2, 3)]), term(-1, 3, &[(1, 3)])],
            vec![term(1, 3, &[(1, 2)]), term(-1, 3, &[(1, 3)])],
        ]),
        4 => Some(vec![
            vec![
                term(1, 12, &[(2, 3)]),
                term(-1, 12, &[(1, 3)]),
                term(1, 12, &[(2, 4)]),
                term(-1, 12, &[(1, 4)]),
                term(2, 12, &[(1, 3), (2, 4)]),
                term(-2, 12, &[(1, 4), (2, 3)]),
            ],
            vec![
                term(1, 6, &[(1, 3)]),
                term(-1, 6, &[(1, 2)]),
                term(1, 6, &[(3, 4)]),
                term(-1, 6, &[(2, 4)]),
                term(2, 6, &[(1, 2), (3, 4)]),
                term(-2, 6, &[(1, 3), (2, 4)]),
            ],
            vec![
                term(1, 4, &[(1, 3)]),
                term(-1, 4, &[(1, 4)]),
                term(1, 4, &[(2, 3)]),
                term(-1, 4, &[(2, 4)]),
            ],
        ]),
        5 => Some(vec![
            vec![
                term(3, 5, &[(1, 5), (1, 4)]),
                term(1, 1, &[(1, 5), (2, 4)]),
                term(-2, 5, &[(1, 5), (3, 4)]),
                term(1, 2, &[(3, 5), (1, 4)]),
                term(-1, 10, &[(3, 5), (1, 3)]),
                term(-9, 10, &[(4, 5), (1, 4)]),
                term(-1, 6, &[(4, 5), (1, 3)]),
                term(4, 15, &[(1, 4), (1, 3)]),
            ],
            vec![
                term(1, 5, &[(1, 5), (2, 4)]),
                term(1, 15, &[(1, 5), (1, 3)]),
                term(-2, 5, &[(2, 5), (1, 4)]),
                term(2, 5, &[(2, 5), (2, 4)]),
                term(4, 15, &[(2, 5), (3, 4)]),
                term(-2, 15, &[(2, 5), (1, 3)]),
                term(-7, 15, &[(4, 5), (2, 4)]),
                term(-1, 15, &[(4, 5), (1, 3)]),
                term(2, 15, &[(1, 4), (1, 3)]),
            ],
            vec![
                term(3, 10, &[(1, 5), (1, 4)]),
                term(-3, 10, &[(1, 5), (2, 4)]),
                term(1, 10, &[(2, 5), (1, 4)]),
                term(3, 10, &[(2, 5), (2, 4)]),
                term(-2, 5, &[(3, 5), (1, 4)]),
                term(-1, 5, &[(3, 5), (3, 4)]),
                term(-2, 5, &[(3, 5), (1, 2)]),
            ],
            vec![
                term(-4, 5, &[(1, 5), (1, 4)]),
                term(2, 5, &[(1, 5), (2, 4)]),
                term(2, 5, &[(1, 5), (3, 4)]),
                term(-2, 5, &[(1, 5), (2, 3)]),
            ],
        ]),
        _ => None,
    }
}

fn pair_projectors(n: usize, k: usize) -> (ComplexMatrix, ComplexMatrix) {
    let p = embed(&symmetrizer(2), &vec![2; n], &[k, k + 1]);
    let m = &ComplexMatrix::identity(1 << n) - &p;
    (p, m)
}

/// `P⁺_{1…n−1} P⁻_{1…n} P⁺_{1…n−1} − P⁺_{1…n−2} P⁻_{n−1,n}` on `n = 2j` qubits.
pub fn conjecture_target(j: SpinLabel) -> ComplexMatrix {
    let n = j.qubits();
    let id = ComplexMatrix::identity(1 << n);
    let p_head = symmetrizer_on(n, 0, n - 1);
    let p_minus = &id - &symmetrizer_on(n, 0, n);
    let lhs = p_head.matmul(&p_minus).matmul(&p_head);
    let (_, tail_minus) = pair_projectors(n, n - 2);
    &lhs - &symmetrizer_on(n, 0, n - 2).matmul(&tail_minus)
}

/// Residual of the projector relation for a given set of `X^{(k)}`
/// (index `k − 1`), as operators on `2j` qubits.
pub fn conjecture_residual(j: SpinLabel, xs: &[ComplexMatrix]) -> f64 {
    let n = j.qubits();
    let mut r = conjecture_target(j);
    for (k, x) in xs.iter().enumerate() {
        let (p, m) = pair_projectors(n, k);
        r = &r - &p.matmul(x).matmul(&m);
    }
    r.norm_fro()
}

/// Distinct permutation operators that are products of at most `len`
/// transpositions.
fn transposition_words(n: usize, len: usize) -> Vec<ComplexMatrix> {
    let mut swaps = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            swaps.push((a, b));
        }
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = vec![(0..n).collect::<Vec<usize>>()];
    seen.insert(frontier[0].clone());
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &frontier {
            for &(a, b) in &swaps {
                let mut q = p.clone();
                q.swap(a, b);
                if seen.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    seen.iter().map(|p| qubit_permutation(p)).collect()
}

/// Smallest residual over `X^{(k)}` in the span of products of at most
/// `len` transpositions.
pub fn conjecture_least_squares(j: SpinLabel, len: usize) -> f64 {
    let n = j.qubits();
    let basis = transposition_words(n, len);
    let mut columns = Vec::new();
    for k in 0..n - 1 {
        let (p, m) = pair_projectors(n, k);
        for b in &basis {
            columns.push(p.matmul(b).matmul(&m).as_slice().to_vec());
        }
    }
    least_squares_residual(&columns, conjecture_target(j).as_slice(), 1e-10)
}

/// Word length of the least-squares ansatz. Two transpositions leave a
/// residual of order one at `j = 3`; three suffice.
pub const LEAST_SQUARES_WORD_LEN: usize = 3;

/// The explicit `X^{(k)}` for `j ∈ {3/2, 2, 5/2}`; the least-squares
/// existence residual for any other `1 < j ≤ 3`.
pub fn verify_conjecture(j: SpinLabel) -> Result<f64> {
    let twice = j.twice();
    if !(3..=6).contains(&twice) {
        return Err(Error::InvalidArgument("verify_conjecture needs 3/2 <= j <= 3"));
    }
    match known_x(j) {
        Some(x) => {
            let n = j.qubits();
            let xs: Vec<ComplexMatrix> = x.iter().map(|t| perm_sum(n, t)).collect();
            Ok(conjecture_residual(j, &xs))
        }
        None => Ok(conjecture_least_squares(j, LEAST_SQUARES_WORD_LEN)),
    }
}

/// `S + 𝒫_{k,k+1} S 𝒫_{k,k+1}` (0-based `k`), which commutes with the swap
/// and so drops out of `P⁺_{k,k+1} X P⁻_{k,k+1}`.
pub fn swap_symmetric_part(n: usize, k: usize, s: &ComplexMatrix) -> ComplexMatrix {
    let p = transposition(n, k, k + 1);
    s + &p.matmul(s).matmul(&p)
}
