//! Literal transcriptions of the published closed-form ξ expressions and
//! a comparison against the engine.
//!
//! The formulas are kept exactly as printed, including where they disagree
//! with the engine; [`compare_closed_forms`] is where disagreements show up.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::spin::Frame;
use crate::states::{canonical_squeezed, config_from_amplitudes, product, ConfigKind, CoupledState, Spin1State};

use super::{squeezing_report, FramePolicy};

/// Engine and closed form agree when `|Δ| ≤ MATCH_TOL`.
pub const MATCH_TOL: f64 = 1e-10;

/// State families with a printed closed-form ξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ClosedFormFamily<T> {
    /// Product of two canonical squeezed qutrits.
    ProductPair { theta1: T, theta2: T },
    /// Coherent `|+1⟩` times a canonical squeezed qutrit.
    CoherentTimesSqueezed { theta: T },
    Config1 { c11: T, c22: T, c33: T },
    Config2 { c11: T, c13: T, c22: T },
    Config3 { c12: T, c21: T, c23: T },
}

impl<T: Real> ClosedFormFamily<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormFamily::ProductPair { .. } => "ProductPair",
            ClosedFormFamily::CoherentTimesSqueezed { .. } => "CoherentTimesSqueezed",
            ClosedFormFamily::Config1 { .. } => "Config1",
            ClosedFormFamily::Config2 { .. } => "Config2",
            ClosedFormFamily::Config3 { .. } => "Config3",
        }
    }

    pub fn params(&self) -> String {
        let f = |x: T| format!("{:.6}", x.as_f64());
        match *self {
            ClosedFormFamily::ProductPair { theta1, theta2 } => {
                format!("theta1={};theta2={}", f(theta1), f(theta2))
            }
            ClosedFormFamily::CoherentTimesSqueezed { theta } => format!("theta={}", f(theta)),
            ClosedFormFamily::Config1 { c11, c22, c33 } => {
                format!("c11={};c22={};c33={}", f(c11), f(c22), f(c33))
            }
            ClosedFormFamily::Config2 { c11, c13, c22 } => {
                format!("c11={};c13={};c22={}", f(c11), f(c13), f(c22))
            }
            ClosedFormFamily::Config3 { c12, c21, c23 } => {
                format!("c12={};c21={};c23={}", f(c12), f(c21), f(c23))
            }
        }
    }

    /// The state the closed form describes (normalized).
    pub fn state(&self) -> Result<CoupledState<T>> {
        match *self {
            ClosedFormFamily::ProductPair { theta1, theta2 } => Ok(product(
                &canonical_squeezed(theta1)?,
                &canonical_squeezed(theta2)?,
            )),
            ClosedFormFamily::CoherentTimesSqueezed { theta } => {
                Ok(product(&Spin1State::basis(0), &canonical_squeezed(theta)?))
            }
            ClosedFormFamily::Config1 { c11, c22, c33 } => {
                config_from_amplitudes(ConfigKind::One, [re(c11), re(c22), re(c33)])
            }
            ClosedFormFamily::Config2 { c11, c13, c22 } => {
                config_from_amplitudes(ConfigKind::Two, [re(c11), re(c13), re(c22)])
            }
            ClosedFormFamily::Config3 { c12, c21, c23 } => {
                config_from_amplitudes(ConfigKind::Three, [re(c12), re(c21), re(c23)])
            }
        }
    }
}

fn ratio<T: Real>(num: T, den: T) -> Result<T> {
    if den.abs() <= T::lit(1e-12) {
        Err(Error::ZeroDenominator)
    } else {
        Ok(num / den)
    }
}

/// Printed closed-form ξ for a family.
pub fn closed_form_xi<T: Real>(family: &ClosedFormFamily<T>) -> Result<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    // (1 + cos θ)/(3 + cos θ) and |√(2(1 + cos θ))/(3 + cos θ)|
    let var_term = |th: T| (one + th.cos()) / (three + th.cos());
    let mean_term = |th: T| ((two * (one + th.cos())).max(T::zero()).sqrt() / (three + th.cos())).abs();
    match *family {
        ClosedFormFamily::ProductPair { theta1, theta2 } => ratio(
            var_term(theta1) + var_term(theta2),
            mean_term(theta1) + mean_term(theta2),
        ),
        ClosedFormFamily::CoherentTimesSqueezed { theta } => {
            ratio(one + var_term(theta), one + mean_term(theta))
        }
        ClosedFormFamily::Config1 { c11, c22, c33 } => ratio(
            c11 * c11 + two * c22 * c22 + c33 * c33 - two * (c11 * c22 - c22 * c33),
            (c11 * c11 - c33 * c33).abs(),
        ),
        ClosedFormFamily::Config2 { c11, c13, c22 } => ratio(
            c11 * c11 + c13 * c13 + two * c22 * c22 - c11 * c13 + two * c13 * c22 - two * c22 * c11,
            (c11 * c11 + c13 * c13).abs() + (c11 * c11 - c13 * c13).abs(),
        ),
        ClosedFormFamily::Config3 { c12, c21, c23 } => ratio(
            three * c12 * c12 + three * c21 * c21 + three * c23 * c23 - two * c21 * c23
                + four * c12 * c21
                - four * c12 * c23,
            c12.abs().powi(2) + (c21 * c21 - c23 * c23).abs(),
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiscrepancyFlag {
    Match,
    Mismatch,
    Undefined,
}

impl fmt::Display for DiscrepancyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscrepancyFlag::Match => "MATCH",
            DiscrepancyFlag::Mismatch => "MISMATCH",
            DiscrepancyFlag::Undefined => "UNDEFINED",
        })
    }
}

/// One closed-form-versus-engine comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyRecord<T> {
    pub family: ClosedFormFamily<T>,
    pub closed_form: Option<T>,
    pub engine: Option<T>,
    pub abs_diff: Option<T>,
    pub rel_diff: Option<T>,
    pub frames_used: Option<(Frame<T>, Frame<T>)>,
    pub flag: DiscrepancyFlag,
}

/// Evaluates both routes; a vanishing denominator on either side is recorded
/// as `Undefined` rather than returned as an error.
pub fn compare_closed_forms<T: Real>(
    family: &ClosedFormFamily<T>,
    policy: &FramePolicy<T>,
) -> DiscrepancyRecord<T> {
    let closed_form = closed_form_xi(family).ok();
    let report = family.state().ok().map(|s| squeezing_report(&s, policy));
    let engine = report.as_ref().filter(|r| r.valid).map(|r| r.xi);
    let frames_used = report.as_ref().map(|r| (r.frame1, r.frame2));
    let (abs_diff, rel_diff, flag) = match (closed_form, engine) {
        (Some(cf), Some(en)) => {
            let d = (cf - en).abs();
            let rel = d / en.abs().max(T::min_positive_value());
            let flag = if d <= T::lit(MATCH_TOL) {
                DiscrepancyFlag::Match
            } else {
                DiscrepancyFlag::Mismatch
            };
            (Some(d), Some(rel), flag)
        }
        _ => (None, None, DiscrepancyFlag::Undefined),
    };
    DiscrepancyRecord {
        family: *family,
        closed_form,
        engine,
        abs_diff,
        rel_diff,
        frames_used,
        flag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezing::FrameGauge;

    #[test]
    fn product_pair_values() {
        let v = closed_form_xi(&ClosedFormFamily::ProductPair { theta1: 0.0f64, theta2: 0.0 }).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        for &th in &[0.2f64, 1.0, 2.5] {
            let v = closed_form_xi(&ClosedFormFamily::ProductPair { theta1: th, theta2: th }).unwrap();
            assert!((v - (th / 2.0).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn config1_slice_value() {
        let v = closed_form_xi(&ClosedFormFamily::Config1 { c11: 0.8f64, c22: 0.0, c33: 0.6 }).unwrap();
        assert!((v - 1.0 / 0.28).abs() < 1e-13);
        let rec = compare_closed_forms(
            &ClosedFormFamily::Config1 { c11: 0.8, c22: 0.0, c33: 0.6 },
            &FramePolicy::MeanSpinAligned(FrameGauge::Lab),
        );
        assert_eq!(rec.flag, DiscrepancyFlag::Match, "{rec:?}");
    }

    #[test]
    fn zero_denominators() {
        assert!(matches!(
            closed_form_xi(&ClosedFormFamily::Config1 { c11: 0.6, c22: 0.3, c33: 0.6 }),
            Err(Error::ZeroDenominator)
        ));
        let rec = compare_closed_forms(
            &ClosedFormFamily::Config1 { c11: 0.6, c22: 0.3, c33: 0.6 },
            &FramePolicy::optimized(),
        );
        assert_eq!(rec.flag, DiscrepancyFlag::Undefined);
        assert!(rec.abs_diff.is_none());
    }

    #[test]
    fn homogeneous_of_degree_zero() {
        let fams = [
            ClosedFormFamily::Config1 { c11: 0.3f64, c22: 0.5, c33: -0.7 },
            ClosedFormFamily::Config2 { c11: 0.3f64, c13: 0.5, c22: -0.7 },
            ClosedFormFamily::Config3 { c12: 0.3f64, c21: 0.5, c23: -0.7 },
        ];
        for f in fams {
            let scaled = match f {
                ClosedFormFamily::Config1 { c11, c22, c33 } => ClosedFormFamily::Config1 { c11: 2.5 * c11, c22: 2.5 * c22, c33: 2.5 * c33 },
                ClosedFormFamily::Config2 { c11, c13, c22 } => ClosedFormFamily::Config2 { c11: 2.5 * c11, c13: 2.5 * c13, c22: 2.5 * c22 },
                ClosedFormFamily::Config3 { c12, c21, c23 } => ClosedFormFamily::Config3 { c12: 2.5 * c12, c21: 2.5 * c21, c23: 2.5 * c23 },
                other => other,
            };
            let a = closed_form_xi(&f).unwrap();
            let b = closed_form_xi(&scaled).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn coherent_times_squeezed_printed_form_differs_from_engine() {
        // u = cos(θ/2) = 1/3: the engine gives (1+3u²)/(1+u)² = 3/4,
        // the printed form (1+2u²)/(1+u+u²) = 11/13
        let theta = 2.0 * (1.0f64 / 3.0).acos();
        let fam = ClosedFormFamily::CoherentTimesSqueezed { theta };
        let rec = compare_closed_forms(&fam, &FramePolicy::MeanSpinAligned(FrameGauge::Xz));
        assert!((rec.engine.unwrap() - 0.75).abs() < 1e-12);
        assert!((rec.closed_form.unwrap() - 11.0 / 13.0).abs() < 1e-12);
        assert_eq!(rec.flag, DiscrepancyFlag::Mismatch);
    }
}
