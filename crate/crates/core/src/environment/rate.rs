use alloc::vec::Vec;

use super::config::LogBase;
use crate::error::{check_len, Error, Result};
use crate::numerics::{row_vec_mat, sq_norm, CMatrix, CVector};

/// Per-user received power `‖φᵀ D_k G‖²`.
pub fn received_powers(phi: &CVector, channels: &[CMatrix], beamformer: &CMatrix) -> Result<Vec<f64>> {
    check_len("received_powers users", beamformer.cols(), channels.len())?;
    channels
        .iter()
        .map(|d| {
            let through_ris = row_vec_mat(phi, d)?;
            Ok(sq_norm(&row_vec_mat(&through_ris, beamformer)?))
        })
        .collect()
}

/// Sum rate `Σ_k log(1 + P_k / (Σ_{j≠k} P_j + σ_w²))` with `P_k = ‖φᵀ D_k G‖²`.
///
/// The same kernel yields the true rate (φ, D_k), the mismatch rate
/// (φ̂, D̂_k) and the explorer-perturbed rate (φ_β̂, D̂_k).
pub fn sum_rate(
    phi: &CVector,
    channels: &[CMatrix],
    beamformer: &CMatrix,
    noise_power: f64,
    log_base: LogBase,
) -> Result<f64> {
    if !(noise_power > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "noise power must be > 0, got {noise_power}"
        )));
    }
    let powers = received_powers(phi, channels, beamformer)?;
    let mut total = 0.0;
    for (k, p) in powers.iter().enumerate() {
        let interference: f64 = powers.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, q)| q).sum();
        total += log_base.log1p(p / (interference + noise_power));
    }
    Ok(total)
}
