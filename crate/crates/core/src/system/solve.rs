use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use crate::{Error, Result};

use super::assembly::SparseSystem;

/// Relative residual accepted after the direct solve.
pub const RESIDUAL_LIMIT: f64 = 1e-9;
const REFINEMENT_STEPS: usize = 3;

/// Direct sparse LU solve with residual check and a few steps of iterative refinement.
pub fn solve_linear(system: &SparseSystem) -> Result<Vec<f64>> {
    solve_triplets(system.n, &system.triplets, &system.rhs)
}

pub fn solve_triplets(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {n}×{n}, right-hand side has {} entries", rhs.len())));
    }
    if let Some(&(i, j, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
        return Err(Error::DimensionMismatch(format!("entry ({i}, {j}) outside a {n}×{n} matrix")));
    }
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let entries: Vec<Triplet<usize, usize, f64>> = triplets.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
        .map_err(|e| Error::SingularSystem(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::SingularSystem(format!("{e:?}")))?;
    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let sol = lu.solve(&b);
    let mut x: Vec<f64> = (0..n).map(|i| sol[i]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem("factorization produced non-finite values".into()));
    }
    let residual = |x: &[f64]| {
        let mut r = rhs.to_vec();
        for &(i, j, v) in triplets {
            r[i] -= v * x[j];
        }
        r
    };
    let mut r = residual(&x);
    let mut rel = norm(&r) / bnorm;
    for _ in 0..REFINEMENT_STEPS {
        if rel <= 1e-14 {
            break;
        }
        let rc = Col::<f64>::from_fn(n, |i| r[i]);
        let dx = lu.solve(&rc);
        let candidate: Vec<f64> = (0..n).map(|i| x[i] + dx[i]).collect();
        let rn = residual(&candidate);
        let rel_n = norm(&rn) / bnorm;
        if !(rel_n < rel) {
            break;
        }
        x = candidate;
        r = rn;
        rel = rel_n;
    }
    if !(rel <= RESIDUAL_LIMIT) {
        return Err(Error::ResidualTooLarge { residual: rel, limit: RESIDUAL_LIMIT });
    }
    Ok(x)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
