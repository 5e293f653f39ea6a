//! Inner and outer radii of the eigenvalue annulus predicted from the
//! singular values of the channel with the trivial pair removed.

use crate::quantum::channel::trivial_mode;
use crate::quantum::factored::FactoredChannel;
use crate::quantum::ChannelMatrix;
use crate::{Error, Result, C64};
use faer::Mat;
use serde::Serialize;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct RingRadii {
    pub r_o: f64,
    pub r_in: f64,
    pub sigma_min: f64,
    /// True when some deflated singular value fell below the cutoff, which
    /// forces `r_in = 0`.
    pub rank_deficient: bool,
}

/// `r_o^2 = sum s^2 / (N^2 - 1)` and `r_in^-2 = sum s^-2 / (N^2 - 1)` over
/// the `N^2 - 1` singular values on the complement of the trivial mode.
pub fn radii_from_singular_values(n: usize, deflated: &[f64]) -> RingRadii {
    let d = (n * n) as f64 - 1.0;
    let smax = deflated.iter().copied().fold(0.0, f64::max);
    let smin = deflated.iter().copied().fold(f64::INFINITY, f64::min);
    let r_o = (deflated.iter().map(|s| s * s).sum::<f64>() / d).sqrt().min(1.0);
    let rank_deficient = smax == 0.0 || smin < RANK_CUTOFF * smax;
    let r_in = if rank_deficient {
        0.0
    } else {
        (d / deflated.iter().map(|s| 1.0 / (s * s)).sum::<f64>()).sqrt().min(r_o)
    };
    RingRadii { r_o, r_in, sigma_min: if smin.is_finite() { smin } else { 0.0 }, rank_deficient }
}

/// Radii of a dense channel from the SVD of `M - c c^dagger`. That matrix
/// annihilates `c`; the one singular value belonging to it is dropped.
pub fn ring_radii(m: &ChannelMatrix) -> Result<RingRadii> {
    let t = trivial_mode(m.n);
    let d = m.dimension();
    let mt = Mat::from_fn(d, d, |i, j| m.matrix[(i, j)] - t[i] * t[j].conj());
    let mut s = mt.singular_values().map_err(|e| Error::Solver(format!("channel SVD: {e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    s.pop();
    Ok(radii_from_singular_values(m.n, &s))
}

/// Same radii for the factored channel. The local rotation is unitary, so
/// the singular values are the moduli of the dephasing entries; the trivial
/// mode takes one of the unit diagonal ones.
pub fn ring_radii_factored(f: &FactoredChannel) -> RingRadii {
    let mut s = f.singular_values();
    let k = s.iter().position(|x| (x - 1.0).abs() < 1e-12).unwrap_or(0);
    s.remove(k);
    radii_from_singular_values(f.n, &s)
}

/// Fraction of `values` with `r_in - pad <= |z| <= r_o + pad`.
pub fn annulus_occupancy(values: &[C64], radii: &RingRadii, pad: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let lo = radii.r_in - pad;
    let hi = radii.r_o + pad;
    values.iter().filter(|z| (lo..=hi).contains(&z.norm())).count() as f64 / values.len() as f64
}

/// Annulus spanned by the central `1 - 2 q` fraction of the moduli.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct OccupiedAnnulus {
    pub inner: f64,
    pub outer: f64,
    pub area: f64,
}

pub fn occupied_annulus(values: &[C64], q: f64) -> Result<OccupiedAnnulus> {
    if values.is_empty() || !(0.0..0.5).contains(&q) {
        return Err(Error::invalid("need values and a quantile in [0, 0.5)"));
    }
    let mut r: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    r.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let x = p * (r.len() - 1) as f64;
        let (i, f) = (x.floor() as usize, x.fract());
        if i + 1 < r.len() {
            r[i] * (1.0 - f) + r[i + 1] * f
        } else {
            r[i]
        }
    };
    let (inner, outer) = (at(q), at(1.0 - q));
    Ok(OccupiedAnnulus { inner, outer, area: std::f64::consts::PI * (outer * outer - inner * inner) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::channel::channel_from_unitary;
    use crate::quantum::{coupled_unitary, swap_operator};
    use crate::spectral::entangle::coupled_entangling_power;
    use crate::SystemParams;

    #[test]
    fn dual_unitary_has_zero_radius() {
        let m = channel_from_unitary(&swap_operator(4)).unwrap();
        let r = ring_radii(&m).unwrap();
        assert!(r.r_o < 1e-12 && r.r_in == 0.0 && r.rank_deficient);
    }

    #[test]
    fn factored_matches_svd_and_ep() {
        let p = SystemParams::new(3.0, 1.0, 0.6).unwrap();
        let m = channel_from_unitary(&coupled_unitary(6, &p).unwrap()).unwrap();
        let f = FactoredChannel::build(6, &p).unwrap();
        let (a, b) = (ring_radii(&m).unwrap(), ring_radii_factored(&f));
        assert!((a.r_o - b.r_o).abs() < 1e-12);
        assert!((a.r_in - b.r_in).abs() < 1e-10);
        assert!(b.r_in <= b.r_o);
        assert!((b.r_o - (1.0 - coupled_entangling_power(6, 0.6)).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn outer_radius_ignores_alpha() {
        let r = |a: f64| ring_radii_factored(&FactoredChannel::build(60, &SystemParams::new(a, a, 0.1).unwrap()).unwrap());
        assert!((r(2.0).r_o - r(6.0).r_o).abs() < 1e-10);
    }

    #[test]
    fn occupancy_basics() {
        let rr = RingRadii { r_o: 0.5, r_in: 0.2, sigma_min: 0.1, rank_deficient: false };
        let on: Vec<C64> = (0..10).map(|k| C64::from_polar(0.5, k as f64)).collect();
        assert_eq!(annulus_occupancy(&on, &rr, 0.0), 1.0);
        assert_eq!(annulus_occupancy(&[C64::new(0.9, 0.0)], &rr, 0.02), 0.0);
        let a = occupied_annulus(&on, 0.05).unwrap();
        assert!(a.area.abs() < 1e-12);
    }
}
