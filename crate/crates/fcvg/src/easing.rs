//! Easing curves: monotone maps from normalized frame position to
//! interpolation parameter, with s(0)=0 and s(1)=1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A timing curve for condition interpolation.
///
/// `EaseIn` is the quadratic s = u², `EaseOut` its mirror s = 1-(1-u)², and
/// `Piecewise` linearly interpolates user control points. All kinds satisfy
/// s(0)=0, s(1)=1 and are monotone non-decreasing on [0,1]; `Piecewise`
/// enforces this at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec", into = "CurveSpec")]
pub enum EasingCurve {
    Linear,
    EaseIn,
    EaseOut,
    Piecewise(Vec<(f64, f64)>),
}

impl EasingCurve {
    /// Validated piecewise curve. Control points must be (0,0) .. (1,1) with
    /// strictly increasing u and non-decreasing s.
    pub fn piecewise(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(
                "piecewise curve needs at least the two endpoint control points".into(),
            ));
        }
        let first = points[0];
        let last = points[points.len() - 1];
        if first != (0.0, 0.0) || last != (1.0, 1.0) {
            return Err(Error::Domain(format!(
                "piecewise control points must start at (0,0) and end at (1,1), got {first:?} .. {last:?}"
            )));
        }
        for w in points.windows(2) {
            let (u0, s0) = w[0];
            let (u1, s1) = w[1];
            if !(u0.is_finite() && s0.is_finite() && u1.is_finite() && s1.is_finite()) {
                return Err(Error::Domain("non-finite control point".into()));
            }
            if u1 <= u0 {
                return Err(Error::Domain(format!(
                    "control point u values must be strictly increasing, got {u0} then {u1}"
                )));
            }
            if s1 < s0 {
                return Err(Error::Domain(format!(
                    "control point s values must be non-decreasing, got {s0} then {s1}"
                )));
            }
        }
        Ok(EasingCurve::Piecewise(points))
    }

    /// Evaluates s(u). Errors if u is outside [0,1].
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("easing parameter {u} outside [0,1]")));
        }
        Ok(match self {
            EasingCurve::Linear => u,
            EasingCurve::EaseIn => u * u,
            EasingCurve::EaseOut => {
                let r = 1.0 - u;
                1.0 - r * r
            }
            EasingCurve::Piecewise(points) => {
                // Last window whose left point is <= u; u is in range by the check above.
                let w = points
                    .windows(2)
                    .rev()
                    .find(|w| w[0].0 <= u)
                    .expect("validated control points cover [0,1]");
                let (u0, s0) = w[0];
                let (u1, s1) = w[1];
                let f = (u - u0) / (u1 - u0);
                s0 + f * (s1 - s0)
            }
        })
    }

    /// The curve traversed backwards: s'(u) = 1 - s(1-u).
    ///
    /// Running a sequence with the reversed curve and swapped endpoints mirrors
    /// the original sequence.
    pub fn reversed(&self) -> EasingCurve {
        match self {
            EasingCurve::Linear => EasingCurve::Linear,
            EasingCurve::EaseIn => EasingCurve::EaseOut,
            EasingCurve::EaseOut => EasingCurve::EaseIn,
            EasingCurve::Piecewise(points) => EasingCurve::Piecewise(
                points
                    .iter()
                    .rev()
                    .map(|&(u, s)| (1.0 - u, 1.0 - s))
                    .collect(),
            ),
        }
    }
}

/// Serialized form: `{"kind": "linear"}`, `{"kind": "ease_in"}`,
/// `{"kind": "ease_out"}`, or
/// `{"kind": "piecewise", "control_points": [[u, s], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control_points: Option<Vec<(f64, f64)>>,
}

impl TryFrom<CurveSpec> for EasingCurve {
    type Error = Error;

    fn try_from(spec: CurveSpec) -> Result<Self> {
        match (spec.kind.as_str(), spec.control_points) {
            ("linear", None) => Ok(EasingCurve::Linear),
            ("ease_in", None) => Ok(EasingCurve::EaseIn),
            ("ease_out", None) => Ok(EasingCurve::EaseOut),
            ("piecewise", Some(points)) => EasingCurve::piecewise(points),
            ("piecewise", None) => Err(Error::Domain(
                "piecewise curve requires control_points".into(),
            )),
            (kind, Some(_)) => Err(Error::Domain(format!(
                "control_points are only valid for kind \"piecewise\", not \"{kind}\""
            ))),
            (kind, None) => Err(Error::Domain(format!("unknown easing kind \"{kind}\""))),
        }
    }
}

impl From<EasingCurve> for CurveSpec {
    fn from(curve: EasingCurve) -> Self {
        match curve {
            EasingCurve::Linear => CurveSpec {
                kind: "linear".into(),
                control_points: None,
            },
            EasingCurve::EaseIn => CurveSpec {
                kind: "ease_in".into(),
                control_points: None,
            },
            EasingCurve::EaseOut => CurveSpec {
                kind: "ease_out".into(),
                control_points: None,
            },
            EasingCurve::Piecewise(points) => CurveSpec {
                kind: "piecewise".into(),
                control_points: Some(points),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<EasingCurve> {
        vec![
            EasingCurve::Linear,
            EasingCurve::EaseIn,
            EasingCurve::EaseOut,
            EasingCurve::piecewise(vec![(0.0, 0.0), (0.3, 0.1), (0.7, 0.9), (1.0, 1.0)]).unwrap(),
        ]
    }

    #[test]
    fn linear_midpoint() {
        assert_eq!(EasingCurve::Linear.eval(0.5).unwrap(), 0.5);
    }

    #[test]
    fn endpoints_fixed_for_all_kinds() {
        for curve in all_kinds() {
            assert_eq!(curve.eval(0.0).unwrap(), 0.0, "{curve:?}");
            assert_eq!(curve.eval(1.0).unwrap(), 1.0, "{curve:?}");
        }
    }

    #[test]
    fn ease_in_is_quadratic() {
        assert_eq!(EasingCurve::EaseIn.eval(0.5).unwrap(), 0.25);
    }

    #[test]
    fn ease_out_mirrors_ease_in() {
        let u = 0.3;
        let a = EasingCurve::EaseOut.eval(u).unwrap();
        let b = 1.0 - EasingCurve::EaseIn.eval(1.0 - u).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(EasingCurve::Linear.eval(-0.1).is_err());
        assert!(EasingCurve::Linear.eval(1.1).is_err());
        assert!(EasingCurve::Linear.eval(f64::NAN).is_err());
    }

    #[test]
    fn piecewise_validation() {
        assert!(EasingCurve::piecewise(vec![(0.0, 0.0)]).is_err());
        assert!(EasingCurve::piecewise(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(EasingCurve::piecewise(vec![(0.0, 0.0), (0.9, 1.1), (1.0, 1.0)]).is_err());
        assert!(EasingCurve::piecewise(vec![(0.0, 0.0), (0.5, 0.8), (0.5, 0.9), (1.0, 1.0)])
            .is_err());
    }

    #[test]
    fn piecewise_interpolates_linearly() {
        let c = EasingCurve::piecewise(vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)]).unwrap();
        assert!((c.eval(0.25).unwrap() - 0.1).abs() < 1e-15);
        assert!((c.eval(0.75).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_u() {
        for curve in all_kinds() {
            let mut prev = 0.0;
            for k in 0..=100 {
                let s = curve.eval(k as f64 / 100.0).unwrap();
                assert!(s >= prev, "{curve:?} decreased at {k}");
                prev = s;
            }
        }
    }

    #[test]
    fn reversed_mirrors() {
        for curve in all_kinds() {
            let rev = curve.reversed();
            for k in 0..=20 {
                let u = k as f64 / 20.0;
                let a = rev.eval(u).unwrap();
                let b = 1.0 - curve.eval(1.0 - u).unwrap();
                assert!((a - b).abs() < 1e-12, "{curve:?} at {u}");
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        for curve in all_kinds() {
            let json = serde_json::to_string(&curve).unwrap();
            let back: EasingCurve = serde_json::from_str(&json).unwrap();
            assert_eq!(curve, back);
        }
        assert!(serde_json::from_str::<EasingCurve>("{\"kind\":\"bounce\"}").is_err());
    }
}
