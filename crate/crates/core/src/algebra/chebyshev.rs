use super::Scalar;

/// Chebyshev polynomial of the second kind `U_j(x)`, with `U_{-1} = 0`,
/// `U_0 = 1` and `U_{j+1} = 2x U_j - U_{j-1}`.
pub fn chebyshev_u<T: Scalar>(j: i64, x: &T) -> T {
    assert!(j >= -1, "U_j is defined for j >= -1");
    if j == -1 {
        return T::zero();
    }
    let two_x = x.clone() + x.clone();
    let mut prev = T::zero();
    let mut cur = T::one();
    for _ in 0..j {
        let next = two_x.clone() * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    cur
}
