//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, and its Fréchet derivative.

use crate::{AdError, Matrix};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

/// `exp(A)` for a square matrix.
pub fn expm(a: &Matrix) -> Result<Matrix, AdError> {
    if !a.is_square() {
        return Err(AdError::Shape(format!("exp of a {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(AdError::NonFinite("exp input".into()));
    }
    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, coeffs);
            return pade_solve(&u, &v);
        }
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(2f64.powi(-s));
    let (u, v) = pade13(&scaled);
    let mut r = pade_solve(&u, &v)?;
    for _ in 0..s {
        r = r.mul_unchecked(&r);
    }
    Ok(r)
}

fn pade_low(a: &Matrix, b: &[f64]) -> (Matrix, Matrix) {
    let n = a.rows();
    let a2 = a.mul_unchecked(a);
    let mut u = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    u.add_scaled_identity(b[1]);
    v.add_scaled_identity(b[0]);
    let mut power = a2.clone();
    let mut k = 2;
    while k < b.len() {
        v.add_assign(&power.scale(b[k]));
        u.add_assign(&power.scale(b[k + 1]));
        k += 2;
        if k < b.len() {
            power = power.mul_unchecked(&a2);
        }
    }
    (a.mul_unchecked(&u), v)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let b = &B13;
    let a2 = a.mul_unchecked(a);
    let a4 = a2.mul_unchecked(&a2);
    let a6 = a4.mul_unchecked(&a2);
    let combo = |c6: f64, c4: f64, c2: f64| {
        let mut m = a6.scale(c6);
        m.add_assign(&a4.scale(c4));
        m.add_assign(&a2.scale(c2));
        m
    };
    let mut inner_u = a6.mul_unchecked(&combo(b[13], b[11], b[9]));
    inner_u.add_assign(&combo(b[7], b[5], b[3]));
    inner_u.add_scaled_identity(b[1]);
    let u = a.mul_unchecked(&inner_u);
    let mut v = a6.mul_unchecked(&combo(b[12], b[10], b[8]));
    v.add_assign(&combo(b[6], b[4], b[2]));
    v.add_scaled_identity(b[0]);
    (u, v)
}

fn pade_solve(u: &Matrix, v: &Matrix) -> Result<Matrix, AdError> {
    let p = v.zip_map(u, |v, u| v + u);
    let q = v.zip_map(u, |v, u| v - u);
    q.solve(&p)
}

/// Fréchet derivative `L_exp(A, E)`, read off the upper-right block of
/// `exp([[A, E], [0, A]])`.
pub fn expm_frechet(a: &Matrix, e: &Matrix) -> Result<Matrix, AdError> {
    if !a.is_square() || a.shape() != e.shape() {
        return Err(AdError::Shape(format!(
            "Fréchet derivative at {}x{} in direction {}x{}",
            a.rows(),
            a.cols(),
            e.rows(),
            e.cols()
        )));
    }
    let n = a.rows();
    let mut big = Matrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            big.set(r, c, a.get(r, c));
            big.set(n + r, n + c, a.get(r, c));
            big.set(r, n + c, e.get(r, c));
        }
    }
    Ok(expm(&big)?.block(0, n, n, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.sub(b).unwrap().frobenius_norm() <= tol * b.frobenius_norm().max(1.0)
    }

    #[test]
    fn exp_of_zero_is_exactly_identity() {
        for n in [1, 2, 5, 14] {
            assert_eq!(expm(&Matrix::zeros(n, n)).unwrap(), Matrix::identity(n));
        }
    }

    #[test]
    fn rotation_generator() {
        for t in [0.01, 0.3, 1.0, 2.5, 7.0] {
            let a = Matrix::from_rows(&[vec![0.0, -t], vec![t, 0.0]]).unwrap();
            let expected =
                Matrix::from_rows(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap();
            assert!(close(&expm(&a).unwrap(), &expected, 1e-13), "t={t}");
        }
    }

    #[test]
    fn nilpotent_and_diagonal() {
        let a = Matrix::from_rows(&[vec![0.0, 3.0], vec![0.0, 0.0]]).unwrap();
        let e = Matrix::from_rows(&[vec![1.0, 3.0], vec![0.0, 1.0]]).unwrap();
        assert!(close(&expm(&a).unwrap(), &e, 1e-15));
        let d = Matrix::from_rows(&[vec![-4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let e = Matrix::from_rows(&[vec![(-4f64).exp(), 0.0], vec![0.0, 9f64.exp()]]).unwrap();
        assert!(close(&expm(&d).unwrap(), &e, 1e-14));
    }

    #[test]
    fn frechet_of_commuting_direction() {
        // L(A, A) = A exp(A)
        let a = Matrix::from_rows(&[vec![0.2, -1.0], vec![0.7, 0.1]]).unwrap();
        let l = expm_frechet(&a, &a).unwrap();
        let expected = a.matmul(&expm(&a).unwrap()).unwrap();
        assert!(close(&l, &expected, 1e-13));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(matches!(expm(&Matrix::zeros(2, 3)), Err(AdError::Shape(_))));
    }
}
