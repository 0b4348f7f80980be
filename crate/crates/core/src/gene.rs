//! The eight parameters defining one network instance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Model parameters of one FitzHugh-Nagumo reaction-diffusion network.
///
/// `ka` only scales image input at initialization; it never enters the
/// update loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gene {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub c: f64,
    pub du: f64,
    pub dv: f64,
    pub dt: f64,
    pub ka: f64,
}

impl Default for Gene {
    fn default() -> Self {
        Self {
            a: -0.3,
            b: 1.3,
            eps: -0.1,
            c: 1.0,
            du: 0.06,
            dv: 1.0,
            dt: 0.1,
            ka: 1.0,
        }
    }
}

/// Length of the kernel parameter vector.
pub const KERNEL_PARAMS: usize = 7;

impl Gene {
    /// Kernel parameter vector `[dt, a, b, eps, c, du, dv]`.
    pub fn to_vector(&self) -> [f64; KERNEL_PARAMS] {
        [self.dt, self.a, self.b, self.eps, self.c, self.du, self.dv]
    }

    /// Inverse of [`Gene::to_vector`]; `ka` is supplied separately.
    pub fn from_vector(pars: [f64; KERNEL_PARAMS], ka: f64) -> Self {
        let [dt, a, b, eps, c, du, dv] = pars;
        Self {
            a,
            b,
            eps,
            c,
            du,
            dv,
            dt,
            ka,
        }
    }

    pub fn get(&self, field: GeneField) -> f64 {
        match field {
            GeneField::A => self.a,
            GeneField::B => self.b,
            GeneField::Eps => self.eps,
            GeneField::C => self.c,
            GeneField::Du => self.du,
            GeneField::Dv => self.dv,
            GeneField::Dt => self.dt,
            GeneField::Ka => self.ka,
        }
    }

    pub fn set(&mut self, field: GeneField, value: f64) {
        let slot = match field {
            GeneField::A => &mut self.a,
            GeneField::B => &mut self.b,
            GeneField::Eps => &mut self.eps,
            GeneField::C => &mut self.c,
            GeneField::Du => &mut self.du,
            GeneField::Dv => &mut self.dv,
            GeneField::Dt => &mut self.dt,
            GeneField::Ka => &mut self.ka,
        };
        *slot = value;
    }

    pub fn with(mut self, field: GeneField, value: f64) -> Self {
        self.set(field, value);
        self
    }

    /// Fields violating the gene invariants, paired with the reason.
    pub fn violations(&self) -> Vec<(GeneField, &'static str)> {
        let mut out = Vec::new();
        for field in GeneField::ALL {
            if !self.get(field).is_finite() {
                out.push((field, "not finite"));
            }
        }
        for field in [GeneField::Dt, GeneField::Du, GeneField::Dv] {
            let x = self.get(field);
            if x.is_finite() && x < 0.0 {
                out.push((field, "negative"));
            }
        }
        out
    }

    /// `dt * max(du, dv)` above this makes the explicit scheme prone to
    /// diffusive instability.
    pub const STABILITY_LIMIT: f64 = 0.25;

    /// Advisory message when the diffusion step exceeds [`Self::STABILITY_LIMIT`].
    pub fn stability_advisory(&self) -> Option<String> {
        let k = self.dt * self.du.max(self.dv);
        (k > Self::STABILITY_LIMIT).then(|| {
            format!(
                "dt*max(du,dv) = {k} exceeds {}; explicit diffusion may be unstable",
                Self::STABILITY_LIMIT
            )
        })
    }
}

/// Named gene field, used by sweeps, flags and the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneField {
    A,
    B,
    Eps,
    C,
    Du,
    Dv,
    Dt,
    Ka,
}

impl GeneField {
    pub const ALL: [GeneField; 8] = [
        GeneField::A,
        GeneField::B,
        GeneField::Eps,
        GeneField::C,
        GeneField::Du,
        GeneField::Dv,
        GeneField::Dt,
        GeneField::Ka,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneField::A => "a",
            GeneField::B => "b",
            GeneField::Eps => "eps",
            GeneField::C => "c",
            GeneField::Du => "du",
            GeneField::Dv => "dv",
            GeneField::Dt => "dt",
            GeneField::Ka => "ka",
        }
    }
}

impl fmt::Display for GeneField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown gene parameter `{0}` (expected one of a, b, eps, c, du, dv, dt, ka)")]
pub struct UnknownField(pub String);

impl FromStr for GeneField {
    type Err = UnknownField;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        GeneField::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| UnknownField(s.to_string()))
    }
}

impl fmt::Display for Gene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} b={} eps={} c={} Du={} Dv={} dt={} ka={}",
            self.a, self.b, self.eps, self.c, self.du, self.dv, self.dt, self.ka
        )
    }
}
