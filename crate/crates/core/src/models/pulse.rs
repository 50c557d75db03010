//! Real pulse envelopes `Ω(t)` with finite support and closed-form areas.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default sech half-width in units of `1/β`.
pub const SECH_HALF_WIDTH: f64 = 10.0;

/// Gudermannian function `gd(x) = 2·atan(tanh(x/2)) = ∫₀ˣ sech`.
pub fn gudermannian(x: f64) -> f64 {
    2.0 * (0.5 * x).tanh().atan()
}

/// Pulse envelope. Values are non-negative inside the window and zero
/// outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnvelopeSpec", into = "EnvelopeSpec")]
pub enum PulseEnvelope {
    /// Constant `amplitude` on `[start, end]`.
    Square { amplitude: f64, start: f64, end: f64 },
    /// `scale · β · sech(β (t − center))` on `|t − center| ≤ half_width`.
    Sech { beta: f64, center: f64, half_width: f64, scale: f64 },
    /// Consecutive constant segments starting at `start`.
    PiecewiseConstant { start: f64, durations: Vec<f64>, values: Vec<f64> },
}

impl PulseEnvelope {
    pub fn square(amplitude: f64, start: f64, end: f64) -> Result<Self> {
        let e = Self::Square { amplitude, start, end };
        e.validate()?;
        Ok(e)
    }

    /// Square pulse of the given amplitude with area exactly π, starting at `start`.
    pub fn square_pi(amplitude: f64, start: f64) -> Result<Self> {
        if !(amplitude > 0.0) {
            return Err(Error::Model(format!("square pulse amplitude must be positive, got {amplitude}")));
        }
        Self::square(amplitude, start, start + PI / amplitude)
    }

    /// `β sech(β(t − t₀))` truncated at `|β(t − t₀)| ≤ 10`.
    pub fn sech(beta: f64, center: f64) -> Result<Self> {
        Self::sech_with_half_width(beta, center, SECH_HALF_WIDTH / beta)
    }

    pub fn sech_with_half_width(beta: f64, center: f64, half_width: f64) -> Result<Self> {
        let e = Self::Sech { beta, center, half_width, scale: 1.0 };
        e.validate()?;
        Ok(e)
    }

    /// Truncated sech rescaled so the windowed area is exactly π.
    pub fn sech_renormalized(beta: f64, center: f64) -> Result<Self> {
        let half_width = SECH_HALF_WIDTH / beta;
        let scale = PI / (2.0 * gudermannian(beta * half_width));
        let e = Self::Sech { beta, center, half_width, scale };
        e.validate()?;
        Ok(e)
    }

    pub fn piecewise_constant(start: f64, durations: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let e = Self::PiecewiseConstant { start, durations, values };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Model(format!("pulse field `{name}` must be finite")))
            }
        };
        match self {
            Self::Square { amplitude, start, end } => {
                finite(*amplitude, "amplitude")?;
                finite(*start, "start")?;
                finite(*end, "end")?;
                if *amplitude < 0.0 {
                    return Err(Error::Model("square pulse amplitude must be non-negative".into()));
                }
                if end <= start {
                    return Err(Error::Model("square pulse window must have end > start".into()));
                }
            }
            Self::Sech { beta, center, half_width, scale } => {
                finite(*beta, "beta")?;
                finite(*center, "center")?;
                finite(*half_width, "half_width")?;
                finite(*scale, "scale")?;
                if *beta <= 0.0 {
                    return Err(Error::Model("sech pulse beta must be positive".into()));
                }
                if *half_width <= 0.0 {
                    return Err(Error::Model("sech pulse half_width must be positive".into()));
                }
                if *scale < 0.0 {
                    return Err(Error::Model("sech pulse scale must be non-negative".into()));
                }
            }
            Self::PiecewiseConstant { start, durations, values } => {
                finite(*start, "start")?;
                if durations.is_empty() || durations.len() != values.len() {
                    return Err(Error::Model(
                        "piecewise-constant pulse needs equally many (non-zero) durations and values".into(),
                    ));
                }
                if durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                    return Err(Error::Model("piecewise-constant durations must be positive".into()));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::Model("piecewise-constant values must be non-negative".into()));
                }
            }
        }
        Ok(())
    }

    /// Support window `[start, end]`.
    pub fn window(&self) -> (f64, f64) {
        match self {
            Self::Square { start, end, .. } => (*start, *end),
            Self::Sech { center, half_width, .. } => (center - half_width, center + half_width),
            Self::PiecewiseConstant { start, durations, .. } => (*start, start + durations.iter().sum::<f64>()),
        }
    }

    pub fn duration(&self) -> f64 {
        let (a, b) = self.window();
        b - a
    }

    pub fn value(&self, t: f64) -> f64 {
        let (a, b) = self.window();
        if t < a || t > b {
            return 0.0;
        }
        match self {
            Self::Square { amplitude, .. } => *amplitude,
            Self::Sech { beta, center, scale, .. } => scale * beta / (beta * (t - center)).cosh(),
            Self::PiecewiseConstant { start, durations, values } => {
                let mut edge = *start;
                for (d, v) in durations.iter().zip(values) {
                    edge += d;
                    if t <= edge {
                        return *v;
                    }
                }
                *values.last().expect("validated non-empty")
            }
        }
    }

    /// `∫_{start}^{t} Ω(t′) dt′`, clamped to the window.
    pub fn cumulative_area(&self, t: f64) -> f64 {
        let (a, b) = self.window();
        let t = t.clamp(a, b);
        match self {
            Self::Square { amplitude, start, .. } => amplitude * (t - start),
            Self::Sech { beta, center, half_width, scale } => {
                scale * (gudermannian(beta * (t - center)) + gudermannian(beta * half_width))
            }
            Self::PiecewiseConstant { start, durations, values } => {
                let mut edge = *start;
                let mut area = 0.0;
                for (d, v) in durations.iter().zip(values) {
                    let seg_end = edge + d;
                    if t <= seg_end {
                        return area + v * (t - edge);
                    }
                    area += v * d;
                    edge = seg_end;
                }
                area
            }
        }
    }

    /// Area over the whole window.
    pub fn area(&self) -> f64 {
        self.cumulative_area(self.window().1)
    }

    /// `∫_{a}^{b} Ω dt` restricted to the window.
    pub fn area_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.cumulative_area(b) - self.cumulative_area(a)
    }

    /// Area the untruncated envelope carries outside the window. Non-zero
    /// only for the sech kind.
    pub fn tail_area(&self) -> f64 {
        match self {
            Self::Sech { beta, half_width, scale, .. } => scale * (PI - 2.0 * gudermannian(beta * half_width)),
            _ => 0.0,
        }
    }

    /// Untruncated envelope mass inside `[a, b]`, ignoring the window.
    /// Used to quantify overlap between neighbouring pulses.
    pub fn untruncated_area_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Self::Sech { beta, center, scale, .. } => {
                scale * (gudermannian(beta * (b - center)) - gudermannian(beta * (a - center)))
            }
            _ => self.area_between(a, b),
        }
    }

    /// Same envelope shifted in time by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        match self.clone() {
            Self::Square { amplitude, start, end } => Self::Square { amplitude, start: start + dt, end: end + dt },
            Self::Sech { beta, center, half_width, scale } => Self::Sech { beta, center: center + dt, half_width, scale },
            Self::PiecewiseConstant { start, durations, values } => {
                Self::PiecewiseConstant { start: start + dt, durations, values }
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Square { .. } => "square",
            Self::Sech { .. } => "sech",
            Self::PiecewiseConstant { .. } => "piecewise-constant",
        }
    }
}

/// Flat serialized form of [`PulseEnvelope`].
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renormalize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub durations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn required<T>(value: Option<T>, kind: &str, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("{kind} pulse requires field `{field}`")))
}

impl TryFrom<EnvelopeSpec> for PulseEnvelope {
    type Error = Error;

    fn try_from(s: EnvelopeSpec) -> Result<Self> {
        let kind = s.kind.as_str();
        match kind {
            "square" => {
                let amplitude = required(s.amplitude, kind, "amplitude")?;
                let start = s.start.unwrap_or(0.0);
                match s.end {
                    Some(end) => Self::square(amplitude, start, end),
                    None => Self::square_pi(amplitude, start),
                }
            }
            "sech" => {
                let beta = required(s.beta, kind, "beta")?;
                let center = s.center.unwrap_or(0.0);
                let half_width = s.half_width.unwrap_or(SECH_HALF_WIDTH / beta);
                let scale = match (s.scale, s.renormalize.unwrap_or(false)) {
                    (Some(scale), _) => scale,
                    (None, true) => PI / (2.0 * gudermannian(beta * half_width)),
                    (None, false) => 1.0,
                };
                let e = Self::Sech { beta, center, half_width, scale };
                e.validate()?;
                Ok(e)
            }
            "piecewise-constant" => Self::piecewise_constant(
                s.start.unwrap_or(0.0),
                required(s.durations, kind, "durations")?,
                required(s.values, kind, "values")?,
            ),
            other => Err(Error::UnsupportedEnvelope(other.to_string())),
        }
    }
}

impl From<PulseEnvelope> for EnvelopeSpec {
    fn from(e: PulseEnvelope) -> Self {
        match e {
            PulseEnvelope::Square { amplitude, start, end } => EnvelopeSpec {
                kind: "square".into(),
                amplitude: Some(amplitude),
                start: Some(start),
                end: Some(end),
                ..Default::default()
            },
            PulseEnvelope::Sech { beta, center, half_width, scale } => EnvelopeSpec {
                kind: "sech".into(),
                beta: Some(beta),
                center: Some(center),
                half_width: Some(half_width),
                scale: Some(scale),
                ..Default::default()
            },
            PulseEnvelope::PiecewiseConstant { start, durations, values } => EnvelopeSpec {
                kind: "piecewise-constant".into(),
                start: Some(start),
                durations: Some(durations),
                values: Some(values),
                ..Default::default()
            },
        }
    }
}

/// Area of an envelope described by its serialized form.
pub fn pulse_area(spec: &EnvelopeSpec) -> Result<f64> {
    Ok(PulseEnvelope::try_from(spec.clone())?.area())
}
