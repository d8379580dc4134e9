//! Single-transmitter link model.
//!
//! Fading is Rayleigh (exponential power, unit mean) and constant over a
//! cycle, so the instantaneous SINR on channel `c` is
//! `Gamma_T * d^-alpha * x / Lambda_c` with `x ~ Exp(1)`. Decoding of one RU
//! carrying `b` bits is modelled by a hard threshold at the Shannon SINR for
//! rate `b / tau`; [`exact_error_prob`] instead averages the finite
//! blocklength error function over the fading distribution.

use statrs::function::erf::erfc;

use crate::error::{LinkError, QuadratureError};
use crate::params::SystemParams;
use crate::quadrature::{self, QuadratureOptions};

/// Fading samples above this value carry less than `e^-40` probability mass.
pub const FADING_CUTOFF: f64 = 40.0;

/// Linear SINR needed to carry `bits` in one RU.
pub fn snr_threshold(bits: f64, params: &SystemParams) -> f64 {
    debug_assert!(bits >= 0.0);
    (bits / params.symbols_per_ru()).exp2() - 1.0
}

/// Average received SNR `Gamma_T d^-alpha / Lambda`.
pub fn mean_snr(distance: f64, interf: f64, params: &SystemParams) -> f64 {
    params.transmit_snr * distance.powf(-params.pathloss_exp) / interf
}

/// Probability that one RU carrying `bits` is decoded.
pub fn decode_prob(bits: f64, distance: f64, interf: f64, params: &SystemParams) -> f64 {
    (-snr_threshold(bits, params) / mean_snr(distance, interf, params)).exp()
}

/// Packet success probability when all RUs sit on the same channel and hence
/// see the same fading realisation: the worst loaded RU decides.
pub fn same_channel_packet_prob(bit_split: &[f64], distance: f64, interf: f64, params: &SystemParams) -> f64 {
    assert!(!bit_split.is_empty(), "a packet occupies at least one RU");
    let max_bits = bit_split.iter().copied().fold(0.0, f64::max);
    decode_prob(max_bits, distance, interf, params)
}

/// Fewest RUs on one channel that push the packet success above the
/// reliability target, using the closed-form inverse of [`decode_prob`].
///
/// Saturates at `u32::MAX`; callers compare the result against their slot
/// budget.
pub fn min_rus(distance: f64, interf: f64, params: &SystemParams) -> u32 {
    let rho = params.reliability;
    assert!(rho > 0.0 && rho < 1.0, "reliability must be in (0, 1)");
    let q = params.symbols_per_ru();
    // -Gamma_T ln(rho) / (Lambda d^alpha) = -ln(rho) * mean SNR
    let per_ru = (-rho.ln() * mean_snr(distance, interf, params)).ln_1p() / std::f64::consts::LN_2;
    assert!(per_ru > 0.0, "reliability target unreachable for rho < 1");
    let r = (params.packet_bits / q / per_ru).ceil();
    if r >= u32::MAX as f64 {
        u32::MAX
    } else {
        (r as u32).max(1)
    }
}

/// [`min_rus`] restricted to demands that fit in one cycle.
pub fn feasible_rus(distance: f64, interf: f64, params: &SystemParams) -> Option<u32> {
    let r = min_rus(distance, interf, params);
    (r <= params.cycle_slots).then_some(r)
}

/// Gaussian tail function `Q(z) = P[N(0,1) > z]`.
pub fn q_function(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Finite blocklength error probability of one RU carrying `bits` at
/// instantaneous SINR `sinr`, with the channel dispersion evaluated at that
/// SINR.
pub fn instantaneous_error(bits: f64, sinr: f64, params: &SystemParams) -> f64 {
    if sinr <= 0.0 {
        return 1.0;
    }
    let q = params.symbols_per_ru();
    // 1 - (1+s)^-2 written to stay accurate for small s.
    let dispersion = sinr * (2.0 + sinr) / ((1.0 + sinr) * (1.0 + sinr));
    let z = (q * sinr.ln_1p() - bits * std::f64::consts::LN_2) / (dispersion * q).sqrt();
    q_function(z)
}

/// Error probability of one RU averaged over exponential fading, by adaptive
/// quadrature on `[0, FADING_CUTOFF]`.
pub fn exact_error_prob(bits: f64, distance: f64, interf: f64, params: &SystemParams) -> Result<f64, QuadratureError> {
    if bits <= 0.0 {
        return Ok(0.0);
    }
    let snr = mean_snr(distance, interf, params);
    let integrand = |x: f64| instantaneous_error(bits, snr * x, params) * (-x).exp();

    // Geometric ladder of breakpoints around the threshold crossing.
    let knee = snr_threshold(bits, params) / snr;
    let mut breakpoints = vec![0.0];
    let mut x = knee / 64.0;
    while x < FADING_CUTOFF {
        breakpoints.push(x);
        x *= 2.0;
    }
    breakpoints.push(FADING_CUTOFF);

    let opts = QuadratureOptions { abs_tol: 1e-13, rel_tol: 1e-9, max_intervals: 4000 };
    let r = quadrature::integrate(integrand, &breakpoints, opts)?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Fewest RUs reaching the reliability target when the per-RU error is the
/// exact fading average ([`exact_error_prob`]) instead of the threshold model.
pub fn min_rus_exact(distance: f64, interf: f64, params: &SystemParams) -> Result<u32, LinkError> {
    let target = 1.0 - params.reliability;
    let limit = params.cycle_slots;
    let ok = |r: u32| -> Result<bool, LinkError> {
        let psi = exact_error_prob(params.packet_bits / r as f64, distance, interf, params)?;
        Ok(psi < target)
    };
    let mut r = min_rus(distance, interf, params).saturating_sub(2).clamp(1, limit);
    if ok(r)? {
        while r > 1 && ok(r - 1)? {
            r -= 1;
        }
        return Ok(r);
    }
    while r < limit {
        r += 1;
        if ok(r)? {
            return Ok(r);
        }
    }
    Err(LinkError::Unreachable { limit })
}
