use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unitarity::matkernel::{ginibre, haar_unitary, hermitian_eig, hs_inner, polar, svd};
use unitarity::ComplexMatrix;

fn random_matrix(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rank >= dim {
        ginibre(dim, dim, &mut rng)
    } else {
        &ginibre(dim, rank, &mut rng) * &ginibre(rank, dim, &mut rng)
    }
}

fn nuclear_norm(a: &ComplexMatrix) -> f64 {
    svd(a).unwrap().singular_values.iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn polar_reconstructs(dim in 1usize..=8, rank in 1usize..=8, seed: u64) {
        let a = random_matrix(dim, rank, seed);
        let p = polar(&a).unwrap();
        let w = p.unitary_part.matrix();
        prop_assert!(w.unitarity_residual() < 1e-10);
        prop_assert!(p.psd_part.hermiticity_residual() < 1e-10 * a.frobenius_norm().max(1.0));
        let eig = hermitian_eig(&p.psd_part).unwrap();
        prop_assert!(eig.values.iter().all(|&l| l > -1e-10 * a.frobenius_norm().max(1.0)));
        let rec = w * &p.psd_part;
        prop_assert!(rec.distance(&a).unwrap() < 1e-10 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn nuclear_norm_bounds_unitary_overlap(dim in 1usize..=8, rank in 1usize..=8, seed: u64) {
        let a = random_matrix(dim, rank, seed);
        let nuc = nuclear_norm(&a);
        let v = haar_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed ^ 0x5555)).unwrap();
        prop_assert!(hs_inner(v.matrix(), &a).unwrap().norm() <= nuc * (1.0 + 1e-12));
        // attained by the polar unitary
        let w = polar(&a).unwrap().unitary_part;
        prop_assert!((hs_inner(w.matrix(), &a).unwrap().norm() - nuc).abs() < 1e-10 * nuc.max(1.0));
    }

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..=8, seed: u64) {
        let g = random_matrix(dim, dim, seed);
        let h = &g + &g.adjoint();
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(eig.vectors.unitarity_residual() < 1e-10);
        let rec = &(&eig.vectors * &ComplexMatrix::from_real_diag(&eig.values)) * &eig.vectors.adjoint();
        prop_assert!(rec.distance(&h).unwrap() < 1e-10 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn svd_reconstructs(rows in 1usize..=8, cols in 1usize..=8, seed: u64) {
        let a = ginibre(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = svd(&a).unwrap();
        let mut sigma = ComplexMatrix::zeros(rows, cols);
        for (i, &x) in s.singular_values.iter().enumerate() {
            sigma[(i, i)] = unitarity::C64::new(x, 0.0);
        }
        let rec = &(&s.u * &sigma) * &s.v.adjoint();
        prop_assert!(rec.distance(&a).unwrap() < 1e-10 * a.frobenius_norm());
        prop_assert!(s.u.unitarity_residual() < 1e-10 && s.v.unitarity_residual() < 1e-10);
    }
}
