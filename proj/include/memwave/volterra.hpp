#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "memwave/errors.hpp"
#include "memwave/kernels.hpp"

namespace memwave {

/// Collocation rule for the discrete convolution with exact-moment weights.
///   right_endpoint: (g*y)_n = sum_{j=1..n} w[n-j] y_j          (first order,
///                   singularity-safe: y_0 and the t=0 node never enter)
///   averaged:       (g*y)_n = sum_{j=1..n} w[n-j] (y_j+y_{j-1})/2  (second
///                   order for C^1 kernel parts; midpoint correction)
enum class conv_rule { right_endpoint, averaged };

struct VolterraTerm {
    double coeff = 0.0;
    ConvWeights weights;
};

/// Linear second-kind Volterra operator c0 x + sum_i coeff_i (w_i * x) = f,
/// marched forward by collocation at the right endpoints of subintervals.
struct VolterraOp {
    double c0 = 0.0;
    std::vector<VolterraTerm> terms;
    conv_rule rule = conv_rule::right_endpoint;
    double dt = 0.0;
    int n_steps = 0;

    /// Coefficient of x[n] in the per-step solve (instantaneous parts).
    double step_coefficient() const {
        double s = c0;
        for (const auto& t : terms) {
            if (t.weights.identity) {
                s += t.coeff;
            } else if (!t.weights.w.empty()) {
                s += t.coeff * (rule == conv_rule::averaged ? 0.5 * t.weights.w[0] : t.weights.w[0]);
            }
        }
        return s;
    }

    /// Coefficient of x[0] in the equation at t = 0 (all convolutions vanish).
    double instantaneous_coefficient() const {
        double s = c0;
        for (const auto& t : terms)
            if (t.weights.identity) s += t.coeff;
        return s;
    }
};

/// History part of the discrete convolution at step n: every contribution of
/// x[0..n-1], excluding the implicit x[n] weight. Identity (delta) tables
/// contribute nothing here.
inline double convolve_tail(const ConvWeights& cw, const std::vector<double>& x, int n,
                            conv_rule rule = conv_rule::right_endpoint) {
    if (n < 1 || cw.identity || cw.w.empty()) return 0.0;
    const std::vector<double>& w = cw.w;
    double s = 0.0;
    if (rule == conv_rule::right_endpoint) {
        for (int j = 1; j < n; ++j) s += w[n - j] * x[j];
    } else {
        for (int j = 1; j < n; ++j) s += w[n - j] * 0.5 * (x[j] + x[j - 1]);
        s += 0.5 * w[0] * x[n - 1];
    }
    return s;
}

/// Full discrete convolution value (g*x)(t_n), including the x[n] term.
inline double convolve_at(const ConvWeights& cw, const std::vector<double>& x, int n,
                          conv_rule rule = conv_rule::right_endpoint) {
    if (cw.identity) return n >= 0 ? x[n] : 0.0;
    if (n < 1) return 0.0;
    double s = convolve_tail(cw, x, n, rule);
    s += (rule == conv_rule::averaged ? 0.5 * cw.w[0] : cw.w[0]) * x[n];
    return s;
}

/// March the collocation system forward: at each step the history sums move to
/// the right-hand side and x[n] solves a scalar linear equation. Deterministic
/// and linear in f.
inline std::vector<double> march(const VolterraOp& op, const std::vector<double>& f) {
    const int N = op.n_steps;
    if ((int)f.size() != N + 1) throw solver_error("march: forcing length must be n_steps + 1");
    const double denom = op.step_coefficient();
    if (!(std::abs(denom) > 1e-300) || !std::isfinite(denom)) {
        std::ostringstream os;
        os << "march: degenerate per-step coefficient c0 + sum coeff*w[0] = " << denom;
        throw solver_error(os.str());
    }
    std::vector<double> x(N + 1, 0.0);
    const double inst = op.instantaneous_coefficient();
    x[0] = (op.rule == conv_rule::averaged && std::abs(inst) > 1e-300) ? f[0] / inst : 0.0;
    for (int n = 1; n <= N; ++n) {
        double rhs = f[n];
        for (const auto& term : op.terms) {
            if (term.weights.identity) continue; // instantaneous, inside denom
            rhs -= term.coeff * convolve_tail(term.weights, x, n, op.rule);
        }
        x[n] = rhs / denom;
    }
    return x;
}

/// Cumulative integral of samples with the rule matching the march.
inline std::vector<double> cumulative(const std::vector<double>& x, double dt, conv_rule rule) {
    std::vector<double> c(x.size(), 0.0);
    if (rule == conv_rule::averaged) {
        for (std::size_t n = 1; n < x.size(); ++n) c[n] = c[n - 1] + 0.5 * dt * (x[n] + x[n - 1]);
    } else {
        for (std::size_t n = 1; n < x.size(); ++n) c[n] = c[n - 1] + dt * x[n];
    }
    return c;
}

} // namespace memwave
