use serde::{Deserialize, Serialize};

/// How the values of a [`PhaseSpaceField`] were scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Values exactly as computed.
    Raw,
    /// Divided by the maximum absolute value.
    MaxAbs,
}

/// A scalar field sampled at the centres of a G x G grid on the unit torus.
///
/// Cell `(i, j)` sits at `q = (i + 1/2)/G`, `p = (j + 1/2)/G` and is stored at
/// `values[j * G + i]`, so q runs fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceField {
    pub g: usize,
    pub values: Vec<f64>,
    pub normalization: Normalization,
    pub params: serde_json::Value,
}

impl PhaseSpaceField {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(g: usize, f: F) -> Self {
        let mut values = Vec::with_capacity(g * g);
        for j in 0..g {
            for i in 0..g {
                values.push(f(Self::center(g, i), Self::center(g, j)));
            }
        }
        Self { g, values, normalization: Normalization::Raw, params: serde_json::Value::Null }
    }

    #[inline]
    pub fn center(g: usize, i: usize) -> f64 {
        (i as f64 + 0.5) / g as f64
    }

    #[inline]
    pub fn at(&self, iq: usize, jp: usize) -> f64 {
        self.values[jp * self.g + iq]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Grid cell holding the smallest value, as `(q, p)` of its centre.
    pub fn argmin(&self) -> (f64, f64) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        (Self::center(self.g, k % self.g), Self::center(self.g, k / self.g))
    }

    /// Share of the total value carried by cells within `radius` of `(q0, p0)`,
    /// with distances measured on the torus.
    pub fn mass_within(&self, q0: f64, p0: f64, radius: f64) -> f64 {
        let total: f64 = self.values.iter().sum();
        let mut inside = 0.0;
        for j in 0..self.g {
            for i in 0..self.g {
                let dq = torus_dist(Self::center(self.g, i), q0);
                let dp = torus_dist(Self::center(self.g, j), p0);
                if dq * dq + dp * dp <= radius * radius {
                    inside += self.at(i, j);
                }
            }
        }
        inside / total
    }

    pub fn normalized_max_abs(mut self) -> Self {
        let m = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > 0.0 {
            for v in &mut self.values {
                *v /= m;
            }
        }
        self.normalization = Normalization::MaxAbs;
        self
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }
}

pub(crate) fn torus_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_q_fastest() {
        let f = PhaseSpaceField::from_fn(4, |q, p| q + 10.0 * p);
        assert_eq!(f.values[1], 0.375 + 1.25);
        assert_eq!(f.at(0, 1), 0.125 + 3.75);
    }

    #[test]
    fn disc_mass_of_uniform_field() {
        let f = PhaseSpaceField::from_fn(200, |_, _| 1.0);
        let m = f.mass_within(0.0, 0.0, 0.15);
        assert!((m - std::f64::consts::PI * 0.0225).abs() < 2e-3);
    }
}
