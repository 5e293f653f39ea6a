//! Integer-order Bessel functions of the first kind.
//!
//! All orders `0..=kmax` at a fixed argument come out of one pass of Miller's
//! backward recurrence, normalised with `J_0 + 2 sum J_2k = 1`. The Koopman
//! builder needs whole rows of orders at each argument, so this is the main entry.

/// `J_k(x)` for `k = 0..=kmax`.
pub fn bessel_j_orders(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (kmax as f64).max(ax);
    let mut start = (top + 12.0 * top.cbrt() + 40.0).ceil() as usize;
    start += start % 2;

    let mut j_next = 0.0_f64; // J_{k+1}
    let mut j_cur = 1e-300_f64; // J_k, arbitrary seed
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let j_prev = (2.0 * k as f64 / ax) * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let km1 = k - 1;
        if km1 <= kmax {
            out[km1] = j_cur;
        }
        if km1 % 2 == 0 && km1 > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e200 {
            let s = 1e-200;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for any integer order, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let k = n.unsigned_abs() as usize;
    let v = bessel_j_orders(k, x)[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j_orders(0, x)[0]
}

/// Signed-order lookup into a table produced by [`bessel_j_orders`].
#[inline]
pub(crate) fn signed_lookup(table: &[f64], n: i64) -> f64 {
    let k = n.unsigned_abs() as usize;
    let v = table[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracle: J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt,
    // evaluated with the trapezoid rule, which is spectrally accurate for a
    // periodic analytic integrand.
    fn integral_oracle(n: i64, x: f64) -> f64 {
        let pts = 2 * ((x.abs() as usize) + n.unsigned_abs() as usize) + 200;
        let h = std::f64::consts::TAU / pts as f64;
        (0..pts)
            .map(|i| {
                let t = i as f64 * h;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum::<f64>()
            / pts as f64
    }

    #[test]
    fn reference_values() {
        // J0 at the couplings used in the Bessel-limit checks.
        let cases = [(0.1, 0.99750156), (0.5, 0.93846981), (1.0, 0.76519769), (1.5, 0.51182767)];
        for (x, want) in cases {
            assert!((bessel_j0(x) - want).abs() < 5e-9, "J0({x})");
        }
        assert!((bessel_j(1, 2.0) - 0.5767248077568734).abs() < 1e-14);
        assert!((bessel_j(5, 10.0) - (-0.23406152818679365)).abs() < 1e-13);
    }

    #[test]
    fn matches_integral_oracle_across_orders() {
        for &x in &[0.3, 1.0, 7.5, 33.0, 90.0, 250.0, 450.0] {
            let tab = bessel_j_orders(120, x);
            for n in [0usize, 1, 2, 5, 17, 60, 119] {
                let o = integral_oracle(n as i64, x);
                assert!((tab[n] - o).abs() < 1e-12, "x={x} n={n}: {} vs {o}", tab[n]);
            }
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn symmetry_relations(n in -30i64..30, x in -60.0f64..60.0) {
            let j = bessel_j(n, x);
            let sign = if n.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            prop_assert!((bessel_j(-n, x) - sign * j).abs() < 1e-13);
            prop_assert!((bessel_j(n, -x) - sign * j).abs() < 1e-13);
        }

        #[test]
        fn addition_identity(x in 0.0f64..80.0) {
            // sum_n J_n(x)^2 = 1
            let tab = bessel_j_orders((x as usize) + 80, x);
            let s: f64 = tab[0] * tab[0] + 2.0 * tab[1..].iter().map(|v| v * v).sum::<f64>();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
