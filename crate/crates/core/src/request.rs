//! Model requests, per-role defaults and the content-addressed cache key.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::digest::{sha256_hex, FieldHasher};

/// Pipeline role a request is issued for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Describer,
    Aggregator,
    Reasoner,
    Translator,
}

impl Role {
    pub const ALL: [Role; 4] = [
        Role::Describer,
        Role::Aggregator,
        Role::Reasoner,
        Role::Translator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Describer => "describer",
            Role::Aggregator => "aggregator",
            Role::Reasoner => "reasoner",
            Role::Translator => "translator",
        }
    }

    /// Sampling temperature used by the reference ensemble.
    pub fn default_temperature(self) -> Temperature {
        match self {
            Role::Describer | Role::Aggregator => Temperature::from_milli(1500),
            Role::Reasoner => Temperature::from_milli(200),
            Role::Translator => Temperature::from_milli(0),
        }
    }

    pub fn default_model(self) -> &'static str {
        match self {
            Role::Describer => "gemini-2.5-flash",
            Role::Aggregator | Role::Translator => "gemini-1.5-pro",
            Role::Reasoner => "gemini-2.5-pro",
        }
    }

    /// Output token budget. The reasoner only needs a letter.
    pub fn default_max_output(self) -> u32 {
        match self {
            Role::Describer | Role::Aggregator => 1024,
            Role::Reasoner => 8,
            Role::Translator => 2048,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Role::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or(())
    }
}

/// Sampling temperature in `[0, 2]`, held in thousandths so digests do not
/// depend on float formatting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Temperature(u16);

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("temperature {0} outside [0, 2]")]
pub struct TemperatureOutOfRange(pub f64);

impl Temperature {
    pub const MAX_MILLI: u16 = 2000;

    /// Panics when `milli` exceeds 2000.
    pub const fn from_milli(milli: u16) -> Self {
        assert!(milli <= Self::MAX_MILLI);
        Temperature(milli)
    }

    pub fn new(value: f64) -> Result<Self, TemperatureOutOfRange> {
        if !(0.0..=2.0).contains(&value) {
            return Err(TemperatureOutOfRange(value));
        }
        Ok(Temperature((value * 1000.0 + 0.5) as u16))
    }

    pub fn milli(self) -> u16 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 1000;
        let mut frac = self.0 % 1000;
        if frac == 0 {
            return write!(f, "{whole}.0");
        }
        let mut width = 3;
        while frac.is_multiple_of(10) {
            frac /= 10;
            width -= 1;
        }
        write!(f, "{whole}.{frac:0width$}")
    }
}

impl Serialize for Temperature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Temperature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Temperature::new(v).map_err(serde::de::Error::custom)
    }
}

/// A role-tagged generation request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRequest {
    pub role: Role,
    pub model_id: String,
    pub prompt_text: String,
    pub image_bytes: Option<Arc<[u8]>>,
    pub temperature: Temperature,
    pub max_output: u32,
    /// Distinguishes deliberate resamples of an otherwise identical request.
    pub sample_index: u32,
}

impl ModelRequest {
    pub fn new(role: Role, model_id: impl Into<String>, prompt_text: impl Into<String>) -> Self {
        Self {
            role,
            model_id: model_id.into(),
            prompt_text: prompt_text.into(),
            image_bytes: None,
            temperature: role.default_temperature(),
            max_output: role.default_max_output(),
            sample_index: 0,
        }
    }

    pub fn with_image(mut self, bytes: Arc<[u8]>) -> Self {
        self.image_bytes = Some(bytes);
        self
    }

    pub fn with_temperature(mut self, t: Temperature) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_max_output(mut self, n: u32) -> Self {
        self.max_output = n;
        self
    }

    pub fn image_digest(&self) -> Option<String> {
        self.image_bytes.as_deref().map(sha256_hex)
    }

    /// Content address of this request: SHA-256 over length-prefixed
    /// (model_id, prompt_text, image digest or empty, temperature in
    /// thousandths, max_output), plus the resample index when non-zero.
    /// Lowercase hex.
    pub fn cache_key(&self) -> String {
        let image = self.image_digest().unwrap_or_default();
        let mut h = FieldHasher::new("mcqa/model-request/v1");
        h.bytes(self.model_id.as_bytes())
            .bytes(self.prompt_text.as_bytes())
            .bytes(image.as_bytes())
            .u32(self.temperature.milli() as u32)
            .u32(self.max_output);
        if self.sample_index > 0 {
            h.u32(self.sample_index);
        }
        h.finish_hex()
    }
}
