use openxxz_core::linalg::{
    det, eig, eigenvalues, kron, null_vector, poly_roots, singular_values, ComplexMatrix, PolyCoeffs,
};
use openxxz_core::{c, C64};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| c(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |d| ComplexMatrix::from_vec(rows, cols, d))
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

// Greedy multiset distance; fine for well-separated roots.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut rest = b.to_vec();
    let mut worst = 0f64;
    for &x in a {
        let (i, d) = rest
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        rest.remove(i);
    }
    worst
}

#[test]
fn kron_examples() {
    assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
    let (a, b) = (c(2.0, 1.0), c(-0.5, 3.0));
    let d = kron(&ComplexMatrix::diag(&[a, b]), &ComplexMatrix::identity(2));
    assert_eq!(d, ComplexMatrix::diag(&[a, a, b, b]));
    let e00 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let out = kron(&sigma_x(), &sigma_x()).mul_vec(&e00);
    assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
}

#[test]
fn eig_examples() {
    let vals = sorted(eigenvalues(&sigma_x()).unwrap());
    assert!((vals[0] - c(-1.0, 0.0)).norm() < 1e-14 && (vals[1] - c(1.0, 0.0)).norm() < 1e-14);
    let vals = eigenvalues(&ComplexMatrix::identity(3)).unwrap();
    assert_eq!(vals.len(), 3);
    assert!(vals.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-14));
    let zero = eig(&ComplexMatrix::zeros(4, 4)).unwrap();
    assert!(zero.iter().all(|t| t.right.iter().chain(&t.left).all(|z| z.re.is_finite() && z.im.is_finite())));

    let (v1, v2) = (c(0.7, -1.3), c(-2.1, 0.4));
    let companion = ComplexMatrix::from_vec(2, 2, vec![v1 + v2, -(v1 * v2), c(1.0, 0.0), c(0.0, 0.0)]);
    let vals = eigenvalues(&companion).unwrap();
    assert!(multiset_distance(&vals, &[v1, v2]) < 1e-12);
}

#[test]
fn null_vector_examples() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
    let (v, r) = null_vector(&a);
    assert!(r < 1e-15);
    assert!(v[0].norm() < 1e-15 && (v[1].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn poly_roots_examples() {
    let roots = sorted(poly_roots(&PolyCoeffs::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])).unwrap());
    assert!((roots[0] + 1.0).norm() < 1e-14 && (roots[1] - 1.0).norm() < 1e-14);
    let z = c(0.3, -2.0);
    let roots = poly_roots(&PolyCoeffs::new(vec![-z, c(1.0, 0.0)])).unwrap();
    assert!((roots[0] - z).norm() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in matrix(2, 2), b in matrix(3, 2), m in matrix(2, 3)) {
        let left = kron(&kron(&a, &b), &m);
        let right = kron(&a, &kron(&b, &m));
        prop_assert_eq!(left.rows(), 12);
        prop_assert!(left.rel_diff(&right) < 1e-15);
    }

    #[test]
    fn eigenpairs_reconstruct(a in matrix(5, 5)) {
        let triples = eig(&a).unwrap();
        prop_assert_eq!(triples.len(), 5);
        let norm = a.norm_fro();
        let mut sum = c(0.0, 0.0);
        let mut prod = c(1.0, 0.0);
        for t in &triples {
            let ar = a.mul_vec(&t.right);
            let res: f64 = ar.iter().zip(&t.right).map(|(x, r)| (x - t.value * r).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-10 * norm);
            let la = a.vec_h_mul(&t.left);
            let res: f64 = la.iter().zip(&t.left).map(|(x, l)| (x - t.value * l.conj()).norm_sqr()).sum::<f64>().sqrt();
            let lnorm: f64 = t.left.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-10 * norm * lnorm);
            sum += t.value;
            prod *= t.value;
        }
        prop_assert!((sum - a.trace()).norm() <= 1e-10 * norm);
        let d = det(&a);
        prop_assert!((prod - d).norm() <= 1e-9 * d.norm().max(1.0));
    }

    #[test]
    fn poly_roots_invert_expansion(roots in prop::collection::vec(complex(), 1..=8)) {
        // keep the drawn roots separated so the comparison is well conditioned
        let sep = roots.iter().enumerate().flat_map(|(i, a)| roots[i + 1..].iter().map(move |b| (a - b).norm())).fold(f64::MAX, f64::min);
        prop_assume!(sep > 0.3);
        let p = PolyCoeffs::from_roots(&roots);
        let found = poly_roots(&p).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        prop_assert!(multiset_distance(&found, &roots) < 1e-10);
        for r in &found {
            prop_assert!(p.eval(*r).norm() <= 1e-10 * p.max_coeff());
        }
    }

    #[test]
    fn null_vector_residual_is_smallest_singular_value(a in matrix(6, 4)) {
        let (v, r) = null_vector(&a);
        let av: f64 = a.mul_vec(&v).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((av - r).abs() < 1e-12 * a.norm_fro());
        let smin = singular_values(&a).into_iter().fold(f64::MAX, f64::min);
        prop_assert!((r - smin).abs() < 1e-10 * a.norm_fro());
    }

    #[test]
    fn null_vector_finds_constructed_kernel(b in matrix(6, 4), k in prop::collection::vec(complex(), 4)) {
        let kn: f64 = k.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(kn > 0.1);
        let unit: Vec<C64> = k.iter().map(|x| x / kn).collect();
        // P = I − k kᴴ removes `unit` from the row space
        let p = ComplexMatrix::from_fn(4, 4, |i, j| {
            let id = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            id - unit[i] * unit[j].conj()
        });
        let a = b.matmul(&p);
        let (_, r_full) = null_vector(&b);
        let (v, r) = null_vector(&a);
        prop_assert!(r <= 1e-12 * a.norm_fro().max(1.0));
        prop_assert!(r <= r_full + 1e-12);
        let overlap = v.iter().zip(&unit).map(|(x, y)| y.conj() * x).fold(c(0.0, 0.0), |s, z| s + z);
        prop_assert!((overlap.norm() - 1.0).abs() < 1e-8);
    }
}
