//! Scalar diagnostics of a process and the shared derivative/integration
//! helpers they are built on.
//!
//! All time derivatives are central finite differences on the sampling grid
//! (one-sided at the two ends). Integrals of positive parts are trapezoids
//! over each sign-constant stretch, with sign changes placed by linear
//! interpolation inside the cell.

mod blp;
mod nonunital_nm;
mod nonunitality;

pub use blp::{blp_measure, blp_sigma, trace_distance_trace};
pub use nonunital_nm::{distance_trace_at_tau, nonunital_nm_measure, trajectory_states};
pub use nonunitality::{nonunitality_measure, purity_trace};

use serde::Serialize;

/// One maximal interval on which the integrand was positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contribution {
    pub start: f64,
    pub end: f64,
    pub integral: f64,
}

/// What achieved the reported maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Maximizer {
    None,
    /// Bloch vectors of the initial pair.
    StatePair { rho1: Vec<f64>, rho2: Vec<f64> },
    /// Bloch vector of the initial state.
    InitialState { bloch: Vec<f64> },
    /// Trajectory time `τ` of the probe state `E_τ(𝟙/d)`.
    TrajectoryTime { tau: f64 },
}

/// A sampled curve sharing the report's time axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Series {
            name: name.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: String,
    /// Sum of `contributions`.
    pub value: f64,
    pub contributions: Vec<Contribution>,
    pub maximizer: Maximizer,
    pub times: Vec<f64>,
    pub trace: Vec<Series>,
    /// Truncation and heuristic-maximization notes.
    pub caveats: Vec<String>,
}

impl MeasureReport {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.trace
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
    }
}

/// Result of [`positive_part_integral`].
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub contributions: Vec<Contribution>,
}

/// `∫ max(f, 0) dt` from samples, trapezoid on positive stretches.
pub fn positive_part_integral(times: &[f64], values: &[f64]) -> Integral {
    assert_eq!(times.len(), values.len(), "times and values differ in length");
    let mut contributions = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let (f0, f1) = (values[k - 1], values[k]);
        let h = t1 - t0;
        match (f0 > 0.0, f1 > 0.0) {
            (true, true) => {
                let seg = open.get_or_insert((t0, 0.0));
                seg.1 += 0.5 * h * (f0 + f1);
            }
            (true, false) => {
                let tc = t0 + h * f0 / (f0 - f1);
                let (start, acc) = open.take().unwrap_or((t0, 0.0));
                contributions.push(Contribution {
                    start,
                    end: tc,
                    integral: acc + 0.5 * f0 * (tc - t0),
                });
            }
            (false, true) => {
                let tc = t0 + h * (-f0) / (f1 - f0);
                open = Some((tc, 0.5 * f1 * (t1 - tc)));
            }
            (false, false) => {}
        }
    }
    if let Some((start, acc)) = open {
        contributions.push(Contribution {
            start,
            end: *times.last().unwrap(),
            integral: acc,
        });
    }
    let value = contributions.iter().fold(0.0, |acc, c| acc + c.integral);
    Integral {
        value,
        contributions,
    }
}

/// Allocation-free value of [`positive_part_integral`].
pub(crate) fn positive_part_value(times: &[f64], values: &[f64]) -> f64 {
    let mut total = 0.0;
    for k in 1..times.len() {
        let h = times[k] - times[k - 1];
        let (f0, f1) = (values[k - 1], values[k]);
        total += match (f0 > 0.0, f1 > 0.0) {
            (true, true) => 0.5 * h * (f0 + f1),
            (true, false) => 0.5 * f0 * h * f0 / (f0 - f1),
            (false, true) => 0.5 * f1 * h * f1 / (f1 - f0),
            (false, false) => 0.0,
        };
    }
    total
}

/// Central differences, one-sided at the ends.
pub fn central_difference(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    central_difference_into(times, values, &mut out);
    out
}

pub(crate) fn central_difference_into(times: &[f64], values: &[f64], out: &mut [f64]) {
    let n = values.len();
    assert!(n >= 2 && times.len() == n && out.len() == n);
    out[0] = (values[1] - values[0]) / (times[1] - times[0]);
    out[n - 1] = (values[n - 1] - values[n - 2]) / (times[n - 1] - times[n - 2]);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1]);
    }
}

/// Positive-part integral of the derivative of a sampled curve.
pub(crate) fn increase_integral(times: &[f64], values: &[f64], deriv: &mut [f64]) -> f64 {
    central_difference_into(times, values, deriv);
    positive_part_value(times, deriv)
}

pub(crate) fn heuristic_caveats(t_max: f64, what: &str) -> Vec<String> {
    vec![
        format!("time integral truncated at t_max = {t_max}"),
        format!("lower bound (heuristic max) over {what}"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn positive_part_of_sine() {
        // ∫_0^{2π} max(sin, 0) = 2
        let t = linspace(0.0, 2.0 * std::f64::consts::PI, 2001);
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let i = positive_part_integral(&t, &v);
        assert!((i.value - 2.0).abs() < 1e-5);
        assert_eq!(i.contributions.len(), 1);
        assert!((i.contributions[0].end - std::f64::consts::PI).abs() < 1e-9);
        assert!((positive_part_value(&t, &v) - i.value).abs() < 1e-14);
    }

    #[test]
    fn crossing_inside_a_cell() {
        // Linear f from -1 to 1 on [0, 1]: positive area 0.25, crossing at 0.5.
        let i = positive_part_integral(&[0.0, 1.0], &[-1.0, 1.0]);
        assert_eq!(i.contributions, vec![Contribution { start: 0.5, end: 1.0, integral: 0.25 }]);
        let i = positive_part_integral(&[0.0, 1.0, 2.0], &[1.0, -1.0, -3.0]);
        assert_eq!(i.contributions, vec![Contribution { start: 0.0, end: 0.5, integral: 0.25 }]);
    }

    #[test]
    fn value_equals_sum_of_contributions() {
        let t = linspace(0.0, 30.0, 3001);
        let v: Vec<f64> = t.iter().map(|x| (3.0 * x).cos() * (-0.1 * x).exp() + 0.2).collect();
        let i = positive_part_integral(&t, &v);
        let sum: f64 = i.contributions.iter().map(|c| c.integral).sum();
        assert!((i.value - sum).abs() < 1e-10);
        assert!(i.value >= 0.0);
    }

    #[test]
    fn non_positive_integrand() {
        let i = positive_part_integral(&[0.0, 1.0, 2.0], &[0.0, -1.0, 0.0]);
        assert_eq!(i.value, 0.0);
        assert!(i.contributions.is_empty());
    }

    #[test]
    fn differences_of_quadratic() {
        let t = linspace(0.0, 1.0, 11);
        let v: Vec<f64> = t.iter().map(|x| x * x).collect();
        let d = central_difference(&t, &v);
        for i in 1..10 {
            assert!((d[i] - 2.0 * t[i]).abs() < 1e-12);
        }
        assert!((d[0] - 0.1).abs() < 1e-12);
    }
}
