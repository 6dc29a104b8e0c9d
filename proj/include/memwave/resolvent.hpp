#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "memwave/errors.hpp"
#include "memwave/kernels.hpp"
#include "memwave/volterra.hpp"

namespace memwave {

/// Resolvent of a kernel: the measure A delta_0 + r with K * (A delta_0 + r) = 1.
struct ResolventRepr {
    double A = 0.0;
    double dt = 0.0;
    int n_steps = 0;

    std::vector<double> r;   ///< samples at t_0..t_N (r[0] is +inf for singular r)
    std::vector<double> r_t; ///< derivative samples; empty when not available/needed

    bool closed_form = false;
    bool singular_at_zero = false;

    std::function<double(double)> r_fn;  ///< pointwise r(t), t > 0
    std::function<double(double)> R1_fn; ///< int_0^t r
    std::function<double(double)> R2_fn; ///< int_0^t R1 (null -> build numerically)
    std::function<double(double)> R3_fn; ///< int_0^t R2 (null -> build numerically)
};

namespace detail {

/// r(t) = sum_i c_i t^{e_i}, every e_i > -1; iterated integrals stay power sums.
inline ResolventRepr power_resolvent(double A, std::vector<std::pair<double, double>> powers,
                                     double dt, int n_steps) {
    ResolventRepr res;
    res.A = A;
    res.dt = dt;
    res.n_steps = n_steps;
    res.closed_form = true;
    for (const auto& [c, e] : powers)
        if (e < 0.0) res.singular_at_zero = true;
    auto eval = [powers](int order) {
        return [powers, order](double t) {
            if (t <= 0.0) return 0.0;
            double s = 0.0;
            for (const auto& [c, e] : powers) {
                double cc = c, ee = e;
                for (int m = 0; m < order; ++m) {
                    cc /= (ee + 1.0);
                    ee += 1.0;
                }
                s += cc * std::pow(t, ee);
            }
            return s;
        };
    };
    res.r_fn = eval(0);
    res.R1_fn = eval(1);
    res.R2_fn = eval(2);
    res.R3_fn = eval(3);
    res.r.resize(n_steps + 1);
    res.r[0] = res.singular_at_zero ? std::numeric_limits<double>::infinity() : res.r_fn(1e-300);
    if (!res.singular_at_zero) {
        // constant-plus-positive-power sums have a finite limit at 0+
        double v = 0.0;
        for (const auto& [c, e] : powers)
            if (e == 0.0) v += c;
        res.r[0] = v;
    }
    for (int n = 1; n <= n_steps; ++n) res.r[n] = res.r_fn(n * dt);
    bool constant = true;
    for (const auto& [c, e] : powers)
        if (e != 0.0) constant = false;
    if (constant) res.r_t.assign(n_steps + 1, 0.0);
    return res;
}

inline void fill_rt_by_differences(ResolventRepr& res) {
    const int N = res.n_steps;
    res.r_t.assign(N + 1, 0.0);
    if (N < 1) return;
    const double dt = res.dt;
    res.r_t[0] = (res.r[1] - res.r[0]) / dt;
    for (int n = 1; n < N; ++n) res.r_t[n] = (res.r[n + 1] - res.r[n - 1]) / (2.0 * dt);
    res.r_t[N] = (res.r[N] - res.r[N - 1]) / dt;
}

inline void attach_sample_interpolators(ResolventRepr& res) {
    const double dt = res.dt;
    const int N = res.n_steps;
    const std::vector<double> samples = res.r;
    res.r_fn = [samples, dt, N](double t) {
        if (t <= 0.0) return samples.front();
        const double u = t / dt;
        const int j = std::min((int)u, N - 1);
        const double w = u - j;
        return samples[j] * (1.0 - w) + samples[j + 1] * w;
    };
    std::vector<double> cum(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) cum[n] = cum[n - 1] + 0.5 * dt * (samples[n] + samples[n - 1]);
    res.R1_fn = [cum, samples, dt, N](double t) {
        if (t <= 0.0) return 0.0;
        const double u = std::min(t / dt, (double)N);
        const int j = std::min((int)u, N - 1);
        const double h = t - j * dt;
        const double rj = samples[j], rj1 = samples[j + 1];
        const double rt = rj + (rj1 - rj) * (h / dt);
        return cum[j] + 0.5 * h * (rj + rt);
    };
}

/// March the differentiated identity k(0) r + k' * r = -A k' for a smooth
/// density with finite nonzero k(0+). Product-trapezoid; the k'-panel moments
/// are exact (differences of k).
inline ResolventRepr smooth_density_resolvent(const Kernel& k, double dt, int n_steps) {
    const double k0 = k.density_limit0();
    const double A = 1.0 / k0;
    ResolventRepr res;
    res.A = A;
    res.dt = dt;
    res.n_steps = n_steps;
    res.r.resize(n_steps + 1);
    ConvWeights dw;
    dw.dt = dt;
    dw.w.resize(n_steps + 1);
    double prev = k0;
    for (int d = 0; d <= n_steps; ++d) {
        const double next = k.density((d + 1) * dt);
        dw.w[d] = next - prev;
        prev = next;
    }
    const double denom = k0 + 0.5 * dw.w[0];
    if (!(std::abs(denom) > 1e-300))
        throw numeric_error("resolvent: degenerate step coefficient in the numeric march");
    std::vector<double>& r = res.r;
    double d0 = k.density_derivative(0.0);
    if (!std::isfinite(d0)) d0 = k.density_derivative(dt * 1e-6);
    r[0] = -A * d0 / k0; // from the identity at t = 0

    for (int n = 1; n <= n_steps; ++n) {
        double tail = 0.5 * dw.w[0] * r[n - 1];
        for (int j = 1; j < n; ++j) tail += dw.w[n - j] * 0.5 * (r[j] + r[j - 1]);
        r[n] = (-A * k.density_derivative(n * dt) - tail) / denom;
    }
    fill_rt_by_differences(res);
    attach_sample_interpolators(res);
    return res;
}

/// March B r + k * r = 1 for a kernel with point mass B > 0 and integrable
/// density (the resolvent is then purely regular, A = 0, r(0) = 1/B).
inline ResolventRepr point_mass_resolvent(const Kernel& k, double dt, int n_steps) {
    const double B = k.point_mass;
    ResolventRepr res;
    res.A = 0.0;
    res.dt = dt;
    res.n_steps = n_steps;
    res.r.resize(n_steps + 1);
    ConvWeights kw = conv_weights(k, dt, n_steps);
    const double w0 = kw.identity || kw.w.empty() ? 0.0 : kw.w[0];
    const double denom = B + 0.5 * w0;
    std::vector<double>& r = res.r;
    r[0] = 1.0 / B;
    for (int n = 1; n <= n_steps; ++n) {
        double tail = 0.5 * w0 * r[n - 1];
        for (int j = 1; j < n; ++j) tail += kw.w[n - j] * 0.5 * (r[j] + r[j - 1]);
        r[n] = (1.0 - tail) / denom;
    }
    fill_rt_by_differences(res);
    attach_sample_interpolators(res);
    return res;
}

} // namespace detail

/// Compute the resolvent of a kernel on a uniform grid. Closed forms for the
/// dirac, exponential, abel, mittag_leffler, and abel_tempered families; the
/// polynomial family and smooth custom densities use the differentiated
/// second-kind march.
inline ResolventRepr resolvent(const Kernel& k, double dt, int n_steps) {
    if (!(dt > 0.0) || n_steps < 1) throw kernel_error("resolvent: need dt > 0 and N >= 1");
    switch (k.family) {
        case kernel_family::dirac:
            return detail::power_resolvent(0.0, {{1.0, 0.0}}, dt, n_steps);
        case kernel_family::exponential:
            return detail::power_resolvent(1.0, {{k.beta, 0.0}}, dt, n_steps);
        case kernel_family::abel:
            return detail::power_resolvent(
                0.0, {{1.0 / std::tgamma(1.0 - k.alpha), -k.alpha}}, dt, n_steps);
        case kernel_family::mittag_leffler: {
            const double g1a = std::tgamma(1.0 - k.alpha);
            if (k.beta < 1.0) {
                return detail::power_resolvent(
                    0.0,
                    {{g1a / std::tgamma(1.0 - k.beta), -k.beta},
                     {g1a / std::tgamma(1.0 + k.alpha - k.beta), k.alpha - k.beta}},
                    dt, n_steps);
            }
            return detail::power_resolvent(
                g1a, {{g1a / std::tgamma(k.alpha), k.alpha - 1.0}}, dt, n_steps);
        }
        case kernel_family::abel_tempered: {
            const double a = k.alpha, b = k.beta;
            const double g1a = std::tgamma(1.0 - a);
            ResolventRepr res;
            res.A = 0.0;
            res.dt = dt;
            res.n_steps = n_steps;
            res.closed_form = true;
            res.singular_at_zero = true;
            res.r_fn = [a, b, g1a](double t) {
                if (t <= 0.0) return std::numeric_limits<double>::infinity();
                return std::pow(t, -a) * std::exp(-b * t) / g1a +
                       std::pow(b, a) * reg_lower_gamma(1.0 - a, b * t);
            };
            res.R1_fn = [a, b](double t) {
                if (t <= 0.0) return 0.0;
                const double P1 = reg_lower_gamma(1.0 - a, b * t);
                const double P2 = reg_lower_gamma(2.0 - a, b * t);
                return std::pow(b, a - 1.0) * P1 +
                       std::pow(b, a) * (t * P1 - (1.0 - a) / b * P2);
            };
            res.r.resize(n_steps + 1);
            res.r[0] = std::numeric_limits<double>::infinity();
            for (int n = 1; n <= n_steps; ++n) res.r[n] = res.r_fn(n * dt);
            return res;
        }
        case kernel_family::polynomial:
            return detail::smooth_density_resolvent(k, dt, n_steps);
        case kernel_family::custom: {
            if (k.point_mass > 0.0) {
                if (!k.custom_density)
                    return detail::power_resolvent(0.0, {{1.0 / k.point_mass, 0.0}}, dt, n_steps);
                return detail::point_mass_resolvent(k, dt, n_steps);
            }
            const double k0 = k.custom_density ? k.custom_density(dt * 1e-9) : 0.0;
            if (!std::isfinite(k0) || !(k0 > 0.0)) {
                throw kernel_error(
                    "resolvent: custom kernel with density(0+) zero or infinite has no supported "
                    "numeric scheme; supply the resolvent explicitly");
            }
            return detail::smooth_density_resolvent(k, dt, n_steps);
        }
    }
    throw kernel_error("resolvent: unknown kernel family");
}

/// Max over grid nodes of |(K * K~)(t_n) - 1|, evaluated with an independent
/// graded Gauss quadrature (exact-moment caps at both endpoints). This checks
/// the resolvent itself, not the production convolution tables.
inline double resolvent_identity_max_residual(const Kernel& k, const ResolventRepr& res, double T,
                                              int n_checks) {
    const auto& rule = gauss_legendre(12);
    const double dt = T / n_checks;
    double worst = 0.0;
    const bool density_zero = (k.family == kernel_family::dirac) ||
                              (k.family == kernel_family::custom && !k.custom_density);
    for (int n = 1; n <= n_checks; ++n) {
        const double tn = n * dt;
        double val = k.point_mass * res.r_fn(tn) + res.A * (density_zero ? 0.0 : k.density(tn));
        if (!density_zero) {
            const double cap = tn * 1e-7;
            double I = res.R1_fn(cap) * k.density(tn - 0.5 * cap);
            I += k.density_cumulative(cap) * res.r_fn(tn - 0.5 * cap);
            double a = cap;
            const double half = 0.5 * tn;
            while (a < half) {
                const double b = std::min(2.0 * a, half);
                I += gauss_panel([&](double s) { return k.density(tn - s) * res.r_fn(s); }, a, b,
                                 rule);
                I += gauss_panel([&](double s) { return k.density(tn - s) * res.r_fn(s); }, tn - b,
                                 tn - a, rule);
                a = b;
            }
            val += I;
        }
        worst = std::max(worst, std::abs(val - 1.0));
    }
    return worst;
}

} // namespace memwave
