use alloc::vec::Vec;

use super::config::{Scenario, SystemConfig};
use crate::error::{check_len, Result};
use crate::numerics::{diag_times, sample_cn, CMatrix, CVector, SeededRng};

/// One frozen channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// BS → RIS channel `H`, L × M.
    pub bs_ris: CMatrix,
    /// RIS → user channels `h_k`, length L each.
    pub ris_user: Vec<CVector>,
    /// Cascaded channels `D_k = diag(h_k)·H`.
    pub cascaded: Vec<CMatrix>,
    /// Estimation errors `E_k`.
    pub errors: Vec<CMatrix>,
    /// Estimates `D̂_k = D_k + E_k`.
    pub estimates: Vec<CMatrix>,
}

impl ChannelSet {
    /// Assembles the derived matrices from the primitive draws.
    pub fn from_parts(bs_ris: CMatrix, ris_user: Vec<CVector>, errors: Vec<CMatrix>) -> Result<Self> {
        check_len("ChannelSet errors", ris_user.len(), errors.len())?;
        let mut cascaded = Vec::with_capacity(ris_user.len());
        let mut estimates = Vec::with_capacity(ris_user.len());
        for (h, e) in ris_user.iter().zip(&errors) {
            let d = diag_times(h, &bs_ris)?;
            check_len("ChannelSet error rows", d.rows(), e.rows())?;
            check_len("ChannelSet error cols", d.cols(), e.cols())?;
            estimates.push(d.add(e)?);
            cascaded.push(d);
        }
        Ok(Self {
            bs_ris,
            ris_user,
            cascaded,
            errors,
            estimates,
        })
    }

    pub fn users(&self) -> usize {
        self.ris_user.len()
    }

    /// Cascaded channels as known to the agent of `scenario`.
    pub fn known(&self, scenario: Scenario) -> &[CMatrix] {
        match scenario {
            Scenario::Golden => &self.cascaded,
            Scenario::Mismatch => &self.estimates,
        }
    }

    /// Checks dimensions against `cfg`.
    pub fn check_dims(&self, cfg: &SystemConfig) -> Result<()> {
        check_len("ChannelSet users", cfg.users, self.users())?;
        check_len("ChannelSet H rows", cfg.elements, self.bs_ris.rows())?;
        check_len("ChannelSet H cols", cfg.antennas, self.bs_ris.cols())?;
        Ok(())
    }
}

/// Draws `H`, `h_k` from CN(0, 1) and, under mismatch, `E_k` from CN(0, σ_e²).
pub fn generate_channels(cfg: &SystemConfig, rng: &mut SeededRng) -> Result<ChannelSet> {
    cfg.validate()?;
    let (k, m, l) = (cfg.users, cfg.antennas, cfg.elements);
    let bs_ris = CMatrix::from_row_major(l, m, sample_cn(rng, 1.0, l * m)?.into_vec())?;
    let ris_user = (0..k).map(|_| sample_cn(rng, 1.0, l)).collect::<Result<Vec<_>>>()?;
    let errors = (0..k)
        .map(|_| match cfg.scenario {
            Scenario::Golden => Ok(CMatrix::zeros(l, m)),
            Scenario::Mismatch => CMatrix::from_row_major(l, m, sample_cn(rng, cfg.error_variance, l * m)?.into_vec()),
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelSet::from_parts(bs_ris, ris_user, errors)
}
