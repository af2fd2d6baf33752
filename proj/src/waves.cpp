#include "stairscale/waves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "stairscale/error.hpp"

namespace stairscale {

void DispersionParams::validate() const {
    if (!(c > 0.0)) {
        throw Error(ErrorCode::Parameter, "wave speed c must be positive");
    }
    if (!(nu_tilde > 0.0)) {
        throw Error(ErrorCode::Parameter, "deformed viscosity scale must be positive");
    }
    if (!(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0)) {
        throw Error(ErrorCode::Parameter, "scaling exponents alpha and beta must lie in (0,1]");
    }
}

double replica_dispersion(double k, const DispersionParams& p) {
    p.validate();
    if (p.alpha == p.beta) {
        return p.c * std::fabs(k);
    }
    return p.c * std::pow(std::fabs(k), p.beta / p.alpha);
}

std::complex<double> lossy_dispersion_classical(double omega, double c, double nu) {
    if (!(omega > 0.0) || !(c > 0.0) || !(nu >= 0.0)) {
        throw Error(ErrorCode::Domain, "classical dispersion needs omega > 0, c > 0, nu >= 0");
    }
    if (nu == 0.0) {
        return {omega / c, 0.0};
    }
    const std::complex<double> k = omega / std::sqrt(std::complex<double>(c * c, omega * nu));
    return std::conj(k);
}

ComplexWavenumber lossy_dispersion_deformed(double omega, const DispersionParams& p) {
    if (!(omega > 0.0)) {
        throw Error(ErrorCode::Domain, "deformed dispersion needs omega > 0");
    }
    p.validate();
    const double z = std::pow(p.nu_tilde * omega, p.alpha);
    const std::complex<double> ratio = std::complex<double>(1.0, -z) / (1.0 + z * z);
    const std::complex<double> kb = std::pow(omega, p.alpha) * std::sqrt(ratio);
    return {kb.real(), -kb.imag()};
}

Eigen::ArrayXd log_grid(double lo, double hi, Eigen::Index n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw Error(ErrorCode::Parameter, "log grid needs 0 < lo < hi and at least 2 points");
    }
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(n, std::log10(lo), std::log10(hi));
    grid = Eigen::pow(10.0, grid);
    grid(0) = lo;
    grid(n - 1) = hi;
    return grid;
}

DispersionSweep sweep_deformed(const Eigen::ArrayXd& omega, const DispersionParams& p, unsigned threads) {
    p.validate();
    DispersionSweep sweep;
    sweep.omega = omega;
    sweep.kbeta_real.resize(omega.size());
    sweep.kbeta_imag.resize(omega.size());
    const auto fill = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i) {
            const auto k = lossy_dispersion_deformed(omega(i), p);
            sweep.kbeta_real(i) = k.kbeta_real;
            sweep.kbeta_imag(i) = k.kbeta_imag;
        }
    };
    const auto n = omega.size();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<Eigen::Index>(n, 1)));
    if (threads == 1) {
        fill(0, n);
        return sweep;
    }
    // Validate on the calling thread so worker lambdas cannot throw.
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(omega(i) > 0.0)) {
            throw Error(ErrorCode::Domain, "deformed dispersion needs omega > 0");
        }
    }
    std::vector<std::thread> workers;
    const Eigen::Index chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const Eigen::Index begin = t * chunk;
        const Eigen::Index end = std::min(n, begin + chunk);
        if (begin < end) {
            workers.emplace_back(fill, begin, end);
        }
    }
    for (auto& w : workers) {
        w.join();
    }
    return sweep;
}

PowerLawFit fit_power_law(const Eigen::ArrayXd& omega, const Eigen::ArrayXd& value) {
    if (omega.size() != value.size()) {
        throw Error(ErrorCode::Precondition, "fit needs matching omega and value columns");
    }
    if (omega.size() < 3) {
        throw Error(ErrorCode::Precondition, "fit needs at least 3 samples");
    }
    if ((omega <= 0.0).any() || (value <= 0.0).any() || !omega.allFinite() || !value.allFinite()) {
        throw Error(ErrorCode::Domain, "power-law fit needs positive finite samples");
    }
    const Eigen::Index n = omega.size();
    const Eigen::VectorXd lx = omega.log().matrix();
    const Eigen::VectorXd ly = value.log().matrix();
    Eigen::MatrixXd design(n, 2);
    design.col(0).setOnes();
    design.col(1) = lx;
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(ly);

    const Eigen::VectorXd resid = ly - design * coef;
    const double ss_res = resid.squaredNorm();
    const double ss_tot = (ly.array() - ly.mean()).matrix().squaredNorm();

    PowerLawFit fit;
    fit.exponent = coef(1);
    fit.prefactor = std::exp(coef(0));
    fit.rsq = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    fit.omega_min = omega.minCoeff();
    fit.omega_max = omega.maxCoeff();
    return fit;
}

AttenuationPrefactors attenuation_prefactors(const DispersionParams& p) {
    p.validate();
    AttenuationPrefactors pf;
    pf.small_regime = 0.5 * std::pow(p.nu_tilde, p.alpha);
    const double large = std::pow(p.nu_tilde, -0.5 * p.alpha);
    pf.large_regime_stated = large * std::sin(std::numbers::pi * p.alpha / 4.0);
    pf.large_regime_closed_form = large * std::sin(std::numbers::pi / 4.0);
    return pf;
}

OscillatorReplica oscillator_replica(double N, int steps) {
    if (!(N >= 3.0) || !std::isfinite(N)) {
        throw Error(ErrorCode::Precondition, "oscillator replica needs N >= 3");
    }
    if (steps < 16) {
        throw Error(ErrorCode::Precondition, "oscillator replica needs at least 16 steps");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double log_n = std::log(N);
    const double offset = 1.0 / log_n;
    const double time_scale = N * log_n;

    OscillatorReplica out;
    out.trajectory.reserve(static_cast<std::size_t>(steps));
    // The trajectory nodes are far apart in T_N; the discrete check uses a
    // stencil that resolves one period with `steps` points.
    const double h = two_pi / steps;
    const double half = std::sin(0.5 * h);
    const double stencil = -4.0 * half * half / (h * h);  // (2 cos h - 2) / h^2
    out.fd_spacing = h;
    for (int i = 0; i < steps; ++i) {
        const double T = static_cast<double>(i) / (steps - 1);
        const double tn = time_scale * T;
        const double X = std::sin(tn);
        out.trajectory.emplace_back(tn, X);

        const double exact_second = -X;
        out.analytic_residual = std::max(out.analytic_residual, std::fabs(exact_second + X + offset));

        // sin(t +- h) by angle addition so the large phase cancels exactly.
        const double second = X * stencil;
        out.fd_residual = std::max(out.fd_residual, std::fabs(second + X + offset));
    }
    return out;
}

}  // namespace stairscale
