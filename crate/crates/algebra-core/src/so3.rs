pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `ad(ω)*Π = −ω×Π` on so(3)* ≅ ℝ³.
pub fn so3_ad_star(omega: [f64; 3], pi: [f64; 3]) -> [f64; 3] {
    let c = cross(omega, pi);
    [-c[0], -c[1], -c[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_vectors_give_zero() {
        let v = [0.3, -1.2, 2.0];
        assert_eq!(so3_ad_star(v, v), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_axes() {
        assert_eq!(so3_ad_star([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), [0.0, 0.0, -1.0]);
    }
}
