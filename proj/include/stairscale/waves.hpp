#pragma once

// Dispersion laws for the lossy wave equation, classical and deformed by the
// scaling exponents (alpha, beta), power-law fits of the attenuation, and the
// harmonic-oscillator replica residual.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace stairscale {

struct DispersionParams {
    double c = 1.0;          // wave speed
    double nu_tilde = 1.0;   // deformed viscosity scale
    double alpha = 1.0;      // temporal scaling exponent, (0,1]
    double beta = 1.0;       // spatial scaling exponent, (0,1]

    void validate() const;
};

/// k^beta = k_r - i k_i; the attenuation part is stored as k_i >= 0.
struct ComplexWavenumber {
    double kbeta_real = 0.0;
    double kbeta_imag = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double rsq = 0.0;
    double omega_min = 0.0;
    double omega_max = 0.0;
};

/// omega = c |k|^(beta/alpha).
[[nodiscard]] double replica_dispersion(double k, const DispersionParams& p);

/// Root of omega^2 = c^2 k^2 + i omega nu k^2, i.e. k = omega / sqrt(c^2 + i omega nu)
/// on the principal branch. The imaginary part of the result is the
/// attenuation magnitude (>= 0), the conjugate of the principal root.
[[nodiscard]] std::complex<double> lossy_dispersion_classical(double omega, double c, double nu);

/// k^beta = omega^alpha ((1 - i z) / (1 + z^2))^(1/2) with z = (nu~ omega)^alpha.
[[nodiscard]] ComplexWavenumber lossy_dispersion_deformed(double omega, const DispersionParams& p);

/// n log-spaced points from lo to hi inclusive.
[[nodiscard]] Eigen::ArrayXd log_grid(double lo, double hi, Eigen::Index n);

struct DispersionSweep {
    Eigen::ArrayXd omega;
    Eigen::ArrayXd kbeta_real;
    Eigen::ArrayXd kbeta_imag;
};

/// Deformed law over a grid. Points are independent, so `threads > 1` splits
/// the grid into contiguous chunks with bit-identical results.
[[nodiscard]] DispersionSweep sweep_deformed(const Eigen::ArrayXd& omega, const DispersionParams& p,
                                             unsigned threads = 1);

/// Least-squares line through (log omega, log value).
[[nodiscard]] PowerLawFit fit_power_law(const Eigen::ArrayXd& omega, const Eigen::ArrayXd& value);

struct AttenuationPrefactors {
    /// k_i ~ (nu~^alpha / 2) omega^(2 alpha) for nu~ omega << 1.
    double small_regime = 0.0;
    /// Large nu~ omega prefactor as usually quoted: nu~^(-alpha/2) sin(pi alpha / 4).
    double large_regime_stated = 0.0;
    /// Large-regime prefactor from expanding the closed form on the principal
    /// branch: nu~^(-alpha/2) sin(pi / 4).
    double large_regime_closed_form = 0.0;
};

[[nodiscard]] AttenuationPrefactors attenuation_prefactors(const DispersionParams& p);

struct OscillatorReplica {
    std::vector<std::pair<double, double>> trajectory;  // (T_N, X)
    double analytic_residual = 0.0;
    double fd_residual = 0.0;
    double fd_spacing = 0.0;  // stencil width in T_N
};

/// X = sin(T_N), T_N = N log N T for T in [0,1] at `steps` nodes, checked
/// against X'' + X + 1/log N = 0.
[[nodiscard]] OscillatorReplica oscillator_replica(double N, int steps);

}  // namespace stairscale
