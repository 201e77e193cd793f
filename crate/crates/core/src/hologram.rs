//! Power-only hologram formation `H = |O ± R|²` and port arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::{ComplexField, RealField};
use crate::reference::ReferenceWaveSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Port {
    Sum,
    Difference,
    /// Signed result of port differencing or background subtraction.
    Combined,
}

impl Port {
    pub fn name(&self) -> &'static str {
        match self {
            Port::Sum => "sum",
            Port::Difference => "difference",
            Port::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HologramMeta {
    pub frequency_ghz: f64,
    pub z0_mm: f64,
    pub reference: ReferenceWaveSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hologram {
    data: RealField,
    port: Port,
    meta: HologramMeta,
}

impl Hologram {
    pub fn new(data: RealField, port: Port, meta: HologramMeta) -> Result<Self> {
        data.grid()
            .ensure_same(meta.reference.grid(), "hologram vs reference spec")?;
        if port != Port::Combined {
            if let Some(i) = data.samples().iter().position(|&v| v < 0.0) {
                return Err(HoloError::InvalidParameter(format!(
                    "{} port hologram has a negative power sample at index {i}",
                    port.name()
                )));
            }
        }
        Ok(Self { data, port, meta })
    }

    pub fn data(&self) -> &RealField {
        &self.data
    }

    pub fn port(&self) -> Port {
        self.port
    }

    pub fn meta(&self) -> &HologramMeta {
        &self.meta
    }
}

/// Samplewise `|O + R|²` (sum port) or `|O − R|²` (difference port).
pub fn record(
    object: &ComplexField,
    reference: &ComplexField,
    port: Port,
    meta: HologramMeta,
) -> Result<Hologram> {
    object.grid().ensure_same(reference.grid(), "object vs reference")?;
    let sign = match port {
        Port::Sum => 1.0,
        Port::Difference => -1.0,
        Port::Combined => {
            return Err(HoloError::InvalidParameter(
                "a single recording is either the sum or the difference port".into(),
            ))
        }
    };
    let samples = object
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(&o, &r)| (o + r * sign).norm_sqr())
        .collect();
    Hologram::new(RealField::new(*object.grid(), samples)?, port, meta)
}

fn ensure_compatible(a: &Hologram, b: &Hologram, what: &str) -> Result<()> {
    a.data.grid().ensure_same(b.data.grid(), what)?;
    if a.meta != b.meta {
        return Err(HoloError::HologramMismatch(format!(
            "{what}: acquisition metadata differs"
        )));
    }
    Ok(())
}

/// `H₊ − H₋ = 4·Re(O·R*)`; the |O|² and |R|² terms cancel.
pub fn combine_ports(h_plus: &Hologram, h_minus: &Hologram) -> Result<Hologram> {
    if h_plus.port != Port::Sum || h_minus.port != Port::Difference {
        return Err(HoloError::HologramMismatch(format!(
            "expected sum and difference ports, got {} and {}",
            h_plus.port.name(),
            h_minus.port.name()
        )));
    }
    ensure_compatible(h_plus, h_minus, "port combination")?;
    let data = h_plus.data.zip_with(&h_minus.data, |p, m| p - m)?;
    Hologram::new(data, Port::Combined, h_plus.meta)
}

pub fn subtract_background(h: &Hologram, background: &Hologram) -> Result<Hologram> {
    if h.port != background.port {
        return Err(HoloError::HologramMismatch(format!(
            "background recorded on the {} port, hologram on the {} port",
            background.port.name(),
            h.port.name()
        )));
    }
    ensure_compatible(h, background, "background subtraction")?;
    let data = h.data.zip_with(&background.data, |a, b| a - b)?;
    Hologram::new(data, Port::Combined, h.meta)
}

/// Additive white Gaussian noise at `snr_db` relative to the mean-square
/// hologram value. `f64::INFINITY` leaves the hologram untouched.
///
/// Sum/difference power readings are floored at zero after noise is added.
pub fn add_noise(h: &Hologram, snr_db: f64, seed: u64) -> Result<Hologram> {
    if snr_db == f64::INFINITY {
        return Ok(h.clone());
    }
    if !snr_db.is_finite() {
        return Err(HoloError::InvalidParameter(format!(
            "noise SNR must be finite or +inf, got {snr_db} dB"
        )));
    }
    let signal_power = h.data.sum_sqr() / h.data.samples().len() as f64;
    let sigma = (signal_power / 10f64.powf(snr_db / 10.0)).sqrt();
    if sigma == 0.0 {
        return Ok(h.clone());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| HoloError::InvalidParameter(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = h.port != Port::Combined;
    let samples = h
        .data
        .samples()
        .iter()
        .map(|&v| {
            let noisy = v + normal.sample(&mut rng);
            if floor {
                noisy.max(0.0)
            } else {
                noisy
            }
        })
        .collect();
    let data = RealField::new(*h.data.grid(), samples)?;
    Hologram::new(data, h.port, h.meta)
}
