use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::config::{amplitude, SystemConfig};
use crate::error::{check_len, Result};
use crate::numerics::{trace_gram, CMatrix, CVector, C64};

/// Beamformer and RIS configuration decoded from a raw action vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedAction {
    /// The raw action this was decoded from.
    pub raw: Vec<f64>,
    /// Beamformer `G`, M × K, on the power boundary (or zero).
    pub beamformer: CMatrix,
    /// Phases in `[0, 2π)`.
    pub phases: Vec<f64>,
    /// Lossless unit-modulus reflection vector `φ̂`.
    pub unit: CVector,
    /// True-model reflection vector `φ` with entries `β(φ_l)·e^{jφ_l}`.
    pub lossy: CVector,
    /// Explorer-scaled reflection vector `φ_β̂`, when a scaling was applied.
    pub scaled: Option<CVector>,
}

impl DecodedAction {
    /// Attaches per-element multipliers: `φ_β̂,l = multipliers[l]·φ̂_l`.
    pub fn with_scaling(mut self, multipliers: &[f64]) -> Result<Self> {
        check_len("DecodedAction::with_scaling", self.unit.len(), multipliers.len())?;
        self.scaled = Some(CVector::from_vec(
            self.unit.iter().zip(multipliers).map(|(z, s)| z * *s).collect(),
        ));
        Ok(self)
    }
}

/// Maps `[Re G, Im G interleaved (column-major over users) | (x_l, y_l) pairs]`
/// onto the feasible set: `tr(GGᴴ) = P_t` and unit-modulus reflections.
///
/// A zero beamformer part stays zero; a zero phase pair decodes to `1 + 0j`.
pub fn decode_action(raw: &[f64], cfg: &SystemConfig) -> Result<DecodedAction> {
    check_len("decode_action", cfg.action_dim(), raw.len())?;
    let (k, m, l) = (cfg.users, cfg.antennas, cfg.elements);
    let mut g = CMatrix::zeros(m, k);
    for user in 0..k {
        for ant in 0..m {
            let idx = 2 * (user * m + ant);
            g[(ant, user)] = C64::new(raw[idx], raw[idx + 1]);
        }
    }
    let power = trace_gram(&g);
    if power > 0.0 {
        g.scale_real(libm::sqrt(cfg.power_watts() / power));
    }

    let pairs = &raw[2 * m * k..];
    let mut phases = Vec::with_capacity(l);
    let mut unit = Vec::with_capacity(l);
    let mut lossy = Vec::with_capacity(l);
    for pair in pairs.chunks_exact(2) {
        let z = C64::new(pair[0], pair[1]);
        let modulus = z.norm();
        let (u, phase) = if modulus > 0.0 && modulus.is_finite() {
            let mut p = libm::atan2(pair[1], pair[0]);
            if p < 0.0 {
                p += TAU;
            }
            if p >= TAU {
                p = 0.0;
            }
            (z / modulus, p)
        } else {
            (C64::new(1.0, 0.0), 0.0)
        };
        phases.push(phase);
        unit.push(u);
        lossy.push(u * amplitude(phase, cfg));
    }
    Ok(DecodedAction {
        raw: raw.to_vec(),
        beamformer: g,
        phases,
        unit: CVector::from_vec(unit),
        lossy: CVector::from_vec(lossy),
        scaled: None,
    })
}

/// Raw encoding of an already-feasible `(G, φ̂)` pair.
pub fn encode_action(beamformer: &CMatrix, unit: &CVector) -> Vec<f64> {
    let mut raw = Vec::with_capacity(2 * beamformer.rows() * beamformer.cols() + 2 * unit.len());
    for user in 0..beamformer.cols() {
        for ant in 0..beamformer.rows() {
            let z = beamformer[(ant, user)];
            raw.push(z.re);
            raw.push(z.im);
        }
    }
    for z in unit.iter() {
        raw.push(z.re);
        raw.push(z.im);
    }
    raw
}
