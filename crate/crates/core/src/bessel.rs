//! Bessel functions of the first kind and their zeros.

/// J_m(x) for integer order `m ≥ 0`.
#[inline]
pub fn jn(m: u32, x: f64) -> f64 {
    match m {
        0 => libm::j0(x),
        1 => libm::j1(x),
        _ => libm::jn(m as i32, x),
    }
}

#[inline]
pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

/// First `count` positive zeros of J_m, ascending.
pub fn zeros(m: u32, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    // All positive zeros of J_m exceed m; consecutive zeros are more than
    // 2.4 apart, so a 0.1 scan cannot skip a sign change.
    let step = 0.1;
    let mut x = (m as f64).max(0.05);
    let mut fx = jn(m, x);
    while out.len() < count {
        let x1 = x + step;
        let f1 = jn(m, x1);
        if fx == 0.0 {
            out.push(x);
        } else if fx.signum() != f1.signum() {
            out.push(refine(m, x, x1));
        }
        x = x1;
        fx = f1;
    }
    out
}

fn refine(m: u32, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = jn(m, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = jn(m, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_zeros() {
        let z0 = zeros(0, 3);
        assert!((z0[0] - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((z0[1] - 5.520_078_110_286_311).abs() < 1e-13);
        assert!((zeros(1, 1)[0] - 3.831_705_970_207_512).abs() < 1e-13);
        assert!((zeros(2, 1)[0] - 5.135_622_301_840_683).abs() < 1e-13);
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.3, 2.0, 7.5, 30.0] {
            let lhs = jn(0, x) + jn(2, x);
            let rhs = 2.0 / x * jn(1, x);
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }
}
