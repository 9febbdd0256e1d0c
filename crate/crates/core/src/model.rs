//! XY-chain model data: momentum grid, quasiparticle dispersion, Bogoliubov
//! angles, group velocities and the revival-time estimate.
//!
//! The chain is
//! `H = -1/2 sum_l [ (1+eta)/2 sx sx + (1-eta)/2 sy sy + h sz ]`
//! with cyclic boundary `sigma_{N+1} = (-1)^q sigma_1`. Momenta are quantized
//! as `k_n = pi (2n + 1 - q) / N`, the dispersion is
//! `Lambda_k = sqrt(eps_k^2 + eta^2 sin^2 k)` with `eps_k = h - cos k`, and
//! the Bogoliubov angle is `theta_k = atan[eta sin k / (eps_k + Lambda_k)]`.
//! All energies and times are in the natural units of the Hamiltonian
//! (coupling = 1, hbar = 1).

use crate::error::{QuenchError, Result};

/// Chain parameters for one XY Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Number of sites.
    pub n_sites: usize,
    /// Anisotropy parameter (1 = Ising, 0 = isotropic XX).
    pub eta: f64,
    /// Uniform transverse field.
    pub h: f64,
    /// Boundary sector: 0 periodic, 1 antiperiodic.
    pub q: u8,
}

impl ModelParams {
    pub fn new(n_sites: usize, eta: f64, h: f64, q: u8) -> Result<Self> {
        if n_sites < 2 {
            return Err(QuenchError::InvalidParams(format!(
                "need at least 2 sites, got {n_sites}"
            )));
        }
        if q > 1 {
            return Err(QuenchError::InvalidParams(format!("q must be 0 or 1, got {q}")));
        }
        if !eta.is_finite() || !h.is_finite() {
            return Err(QuenchError::InvalidParams("eta and h must be finite".into()));
        }
        Ok(Self { n_sites, eta, h, q })
    }
}

/// Dispersion data at a single momentum.
#[derive(Clone, Copy, Debug)]
pub struct Dispersion {
    /// `eps_k = h - cos k`.
    pub epsilon: f64,
    /// Quasiparticle energy `Lambda_k >= 0`.
    pub lambda: f64,
    /// Bogoliubov angle.
    pub theta: f64,
}

/// One momentum of the quantized grid.
#[derive(Clone, Copy, Debug)]
pub struct MomentumMode {
    /// Momentum in (-pi, pi].
    pub k: f64,
    /// Dispersion of the owning Hamiltonian at `k`.
    pub disp: Dispersion,
    /// True when the grid contains a distinct partner at `-k`.
    /// False exactly for k = 0 and k = pi.
    pub paired: bool,
}

/// Evaluate `(eps_k, Lambda_k, theta_k)` for arbitrary real momentum.
///
/// At `sin k = 0` the arctangent form is 0/0 when `eps_k < 0`; the angle is
/// fixed to 0 for `eps_k >= 0` and pi/2 for `eps_k < 0`, the continuum limit
/// of the formula.
pub fn dispersion(k: f64, eta: f64, h: f64) -> Dispersion {
    let sk = k.sin();
    let epsilon = h - k.cos();
    let lambda = f64::hypot(epsilon, eta * sk);
    let theta = if sk == 0.0 || eta == 0.0 {
        if epsilon >= 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2
        }
    } else {
        // eps + Lambda >= 0 always, so atan2 stays in [-pi/2, pi/2].
        f64::atan2(eta * sk, epsilon + lambda)
    };
    Dispersion { epsilon, lambda, theta }
}

/// The full quantized momentum grid of `params`, all `N` momenta.
///
/// Momenta are reduced to (-pi, pi]. Pairing is decided in integer
/// arithmetic (`2n + 1 - q ≡ 0 or N (mod 2N)`), so paired partners are
/// bit-exact negatives of each other. For unpaired modes the dispersion is
/// evaluated with `sin k` exactly zero.
pub fn momentum_grid(params: &ModelParams) -> Vec<MomentumMode> {
    let n = params.n_sites as i64;
    let mut modes = Vec::with_capacity(params.n_sites);
    for idx in 0..n {
        let m = (2 * idx + 1 - params.q as i64).rem_euclid(2 * n);
        let unpaired = m == 0 || m == n;
        let m_signed = if m > n { m - 2 * n } else { m };
        let k = std::f64::consts::PI * (m_signed as f64 / n as f64);
        let disp = if unpaired {
            // sin k = 0 exactly; hit the convention branch regardless of
            // floating-point sin(pi) residue.
            let epsilon = params.h - if m == 0 { 1.0 } else { -1.0 };
            Dispersion {
                epsilon,
                lambda: epsilon.abs(),
                theta: if epsilon >= 0.0 { 0.0 } else { std::f64::consts::FRAC_PI_2 },
            }
        } else {
            dispersion(k, params.eta, params.h)
        };
        modes.push(MomentumMode { k, disp, paired: !unpaired });
    }
    modes.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap());
    modes
}

/// The paired momenta with k in (0, pi), ascending.
pub fn paired_positive(modes: &[MomentumMode]) -> Vec<MomentumMode> {
    modes.iter().filter(|m| m.paired && m.k > 0.0).copied().collect()
}

/// Analytic group velocity `v_g(k) = |sin k (eps_k + eta^2 cos k)| / Lambda_k`.
///
/// Where `Lambda_k = 0` (gapless point) the limit value is returned.
pub fn group_velocity(k: f64, eta: f64, h: f64) -> f64 {
    let d = dispersion(k, eta, h);
    let num = (k.sin() * (d.epsilon + eta * eta * k.cos())).abs();
    if d.lambda > 0.0 {
        num / d.lambda
    } else {
        // Lambda = 0 requires eta sin k = 0 and eps = 0. For eta != 0 that is
        // k in {0, pi} with h = +/-1, where v -> |eta|; for eta = 0 the limit
        // along the band is |sin k|.
        if eta == 0.0 {
            k.sin().abs()
        } else {
            eta.abs()
        }
    }
}

/// A stationary (locally maximal) value of the group velocity.
#[derive(Clone, Copy, Debug)]
pub struct StationaryPoint {
    pub k: f64,
    pub v: f64,
}

/// Sampled group-velocity profile over (0, pi) with refined extrema.
#[derive(Clone, Debug)]
pub struct VelocityProfile {
    /// Sample momenta, ascending in (0, pi).
    pub k_grid: Vec<f64>,
    /// `v_g` at each sample.
    pub v_of_k: Vec<f64>,
    /// Maximal group velocity.
    pub v_max: f64,
    /// Momentum attaining `v_max`.
    pub k_star: f64,
    /// All refined local maxima of `v_g`, ascending in k.
    pub stationary_points: Vec<StationaryPoint>,
}

const GAPLESS_EXCLUSION: f64 = 1e-8;
const GOLDEN_REL_TOL: f64 = 1e-10;

/// Scan `v_g` on a dense grid of (0, pi) and refine every local maximum by
/// golden-section search.
///
/// The grid excludes a 1e-8 neighborhood of the interval ends, where the
/// critical Hamiltonians (|h| = 1) are gapless; `v_g` is continuous up to the
/// ends so the supremum is still attained to refinement tolerance.
pub fn group_velocity_profile(eta: f64, h: f64, resolution: usize) -> Result<VelocityProfile> {
    if resolution < 100 {
        return Err(QuenchError::InvalidParams(format!(
            "resolution must be >= 100, got {resolution}"
        )));
    }
    let lo = GAPLESS_EXCLUSION;
    let hi = std::f64::consts::PI - GAPLESS_EXCLUSION;
    let step = (hi - lo) / (resolution - 1) as f64;
    let k_grid: Vec<f64> = (0..resolution).map(|i| lo + i as f64 * step).collect();
    let v_of_k: Vec<f64> = k_grid.iter().map(|&k| group_velocity(k, eta, h)).collect();

    // Degeneracy check: where the dispersion closes, compare one-sided limits.
    for (i, &k) in k_grid.iter().enumerate() {
        if dispersion(k, eta, h).lambda < 1e-12 {
            let left = group_velocity(k - step * 0.5, eta, h);
            let right = group_velocity(k + step * 0.5, eta, h);
            if (left - right).abs() > 1e-6 * left.abs().max(1.0) {
                return Err(QuenchError::DegenerateVelocityProfile { k, left, right });
            }
            let _ = i;
        }
    }

    let f = |k: f64| group_velocity(k, eta, h);
    let mut stationary = Vec::new();
    for i in 0..resolution {
        let is_peak = (i == 0 && v_of_k[0] >= v_of_k[1])
            || (i == resolution - 1 && v_of_k[i] >= v_of_k[i - 1])
            || (i > 0 && i < resolution - 1 && v_of_k[i] >= v_of_k[i - 1] && v_of_k[i] > v_of_k[i + 1]);
        if is_peak {
            let a = if i == 0 { lo } else { k_grid[i - 1] };
            let b = if i == resolution - 1 { hi } else { k_grid[i + 1] };
            let (k_ref, v_ref) = golden_max(f, a, b, GOLDEN_REL_TOL);
            // Keep whichever of grid sample / refined point is higher.
            if v_ref >= v_of_k[i] {
                stationary.push(StationaryPoint { k: k_ref, v: v_ref });
            } else {
                stationary.push(StationaryPoint { k: k_grid[i], v: v_of_k[i] });
            }
        }
    }
    // Collapse refinements that converged to the same extremum.
    stationary.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap());
    stationary.dedup_by(|b, a| (a.k - b.k).abs() < 1e-6 && (a.v - b.v).abs() < 1e-8);

    let best = stationary
        .iter()
        .copied()
        .max_by(|a, b| a.v.partial_cmp(&b.v).unwrap())
        .expect("grid always yields at least one local maximum");

    Ok(VelocityProfile {
        k_grid,
        v_of_k,
        v_max: best.v,
        k_star: best.k,
        stationary_points: stationary,
    })
}

/// Convenience: `v_max` at default scan resolution (1e5 points).
pub fn max_group_velocity(eta: f64, h: f64) -> Result<f64> {
    Ok(group_velocity_profile(eta, h, 100_000)?.v_max)
}

/// Revival-time estimate `T_rev = N / (2 v_max)`.
pub fn revival_time_estimate(n_sites: usize, v_max: f64) -> Result<f64> {
    if v_max <= 0.0 {
        return Err(QuenchError::ZeroVelocity);
    }
    Ok(n_sites as f64 / (2.0 * v_max))
}

/// Golden-section maximization of `f` on `[a, b]` to relative tolerance
/// `tol` on the argument. Returns (argmax, max).
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < tol * (a.abs() + b.abs()).max(1e-3) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm >= fc && fm >= fd {
        (mid, fm)
    } else if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
