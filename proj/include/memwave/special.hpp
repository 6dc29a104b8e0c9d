#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include "memwave/errors.hpp"

namespace memwave {

inline constexpr double pi_v = 3.14159265358979323846264338327950288;

/// 1/Gamma(x) for any real x; exactly zero at the poles x = 0, -1, -2, ...
inline double rgamma(double x) {
    if (x > 0.5) {
        if (x > 170.0) return 0.0; // Gamma overflows; reciprocal underflows
        return 1.0 / std::tgamma(x);
    }
    // reflection: 1/Gamma(x) = sin(pi x) * Gamma(1 - x) / pi
    const double s = std::sin(pi_v * x);
    if (s == 0.0) return 0.0;
    const double g = std::lgamma(1.0 - x);
    const double v = s / pi_v * std::exp(g);
    return std::isfinite(v) ? v : 0.0;
}

struct gauss_rule {
    std::vector<double> x; // nodes on (-1, 1)
    std::vector<double> w;
};

/// Gauss-Legendre rule, cached per point count. Nodes by Newton on P_n.
inline const gauss_rule& gauss_legendre(int n) {
    static std::map<int, gauss_rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    gauss_rule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi_v * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Integrate f over (a, b) with an n-point Gauss-Legendre panel.
template <typename F>
double gauss_panel(F&& f, double a, double b, const gauss_rule& rule) {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(m + h * rule.x[i]);
    return h * s;
}

namespace detail {

inline double incgamma_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double incgamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a), a > 0, x >= 0.
inline double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw numeric_error("reg_lower_gamma: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? detail::incgamma_series(a, x) : 1.0 - detail::incgamma_cf(a, x);
}

namespace detail {

template <typename F>
long double simpson_rec(F& f, long double a, long double b, long double fa, long double fm,
                        long double fb, long double whole, long double tol, long double tol_floor,
                        int depth, long double& err_accum) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const long double flm = f(lm), frm = f(rm);
    const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    const long double delta = left + right - whole;
    const long double tol_eff = std::max(tol, tol_floor);
    if (std::abs(delta) <= 15.0L * tol_eff || depth <= 0) {
        err_accum += std::abs(delta) / 15.0L;
        return left + right + delta / 15.0L;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, tol_floor, depth - 1, err_accum) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, tol_floor, depth - 1, err_accum);
}

/// Adaptive Simpson in long double with a relative tolerance against a sampled
/// magnitude scale and a roundoff floor. Returns the integral and reports the
/// accumulated leaf error estimate through `err_estimate`.
template <typename F>
long double adaptive_simpson(F f, long double a, long double b, long double rel_tol, int max_depth,
                             long double& err_estimate) {
    long double mag = 0.0L;
    for (int i = 0; i < 33; ++i)
        mag = std::max(mag, std::abs(f(a + (b - a) * (i + 0.5L) / 33.0L)));
    const long double scale = std::max(mag * (b - a), (long double)1e-300);
    const long double tol = rel_tol * scale;
    const long double tol_floor = 1e-18L * scale;
    const long double m = 0.5L * (a + b);
    const long double fa = f(a), fm = f(m), fb = f(b);
    const long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
    err_estimate = 0.0L;
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, tol_floor, max_depth, err_estimate);
}

/// Branch-cut integral for E_{a,b}(-x), 0 < a < 1, x > 0, b < 1 + a.
/// Collapsing the Hankel representation onto the negative real axis gives
///   E_{a,b}(-x) = (1/pi) int_0^inf e^{-r} r^{a-b} N(r) / D(r) dr,
///   N = sin(th)(x + r^a cos(pi a)) - cos(th) r^a sin(pi a),  th = pi (1 + a - b),
///   D = (x + r^a cos(pi a))^2 + (r^a sin(pi a))^2.
inline double ml_branch_cut(double a, double b, double x) {
    const long double th = pi_v * (1.0L + (long double)a - b);
    const long double sth = std::sin((double)th), cth = std::cos((double)th);
    const long double cpa = std::cos(pi_v * a), spa = std::sin(pi_v * a);
    auto f = [&](long double r) -> long double {
        if (r <= 0.0L) return 0.0L;
        const long double ra = std::pow((double)r, a);
        const long double u = (long double)x + ra * cpa;
        const long double den = u * u + ra * spa * ra * spa;
        const long double num = sth * u - cth * ra * spa;
        return std::exp((double)-r) * std::pow((double)r, a - b) * num / den;
    };
    // flatten the r^{a-b} endpoint with r = u^m when b > a
    int m = 1;
    if (b > a) m = std::min(8, (int)std::ceil(2.5 / (1.0 + a - b)));
    auto g = [&](long double u) -> long double {
        if (u <= 0.0L) return 0.0L;
        long double r = u;
        for (int k = 1; k < m; ++k) r *= u;
        return f(r) * m * std::pow((double)u, m - 1);
    };
    const long double rmax = 60.0L;
    const long double umax = std::pow(60.0, 1.0 / m);
    bool converged = true;
    const long double val =
        adaptive_simpson(g, 0.0L, umax, 1e-14L, 36, converged) / (long double)pi_v;
    (void)rmax;
    if (!converged) {
        std::ostringstream os;
        os << "mittag_leffler_eval: branch-cut quadrature did not converge for alpha=" << a
           << ", beta=" << b << ", z=" << -x;
        throw numeric_error(os.str());
    }
    return (double)val;
}

} // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z <= 0,
/// 0 < alpha <= 1, beta > 0. Relative accuracy target 1e-10.
///
/// Power series (long double, cancellation-guarded) where it is reliable; the
/// tail expansion -sum_k z^{-k}/Gamma(beta - alpha k) when its own error
/// estimate meets the target; otherwise the real-line branch-cut integral.
inline double mittag_leffler_eval(double alpha, double beta, double z) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw kernel_error("mittag_leffler_eval: requires 0 < alpha <= 1");
    if (!(beta > 0.0)) throw kernel_error("mittag_leffler_eval: requires beta > 0");
    if (z > 0.0) throw kernel_error("mittag_leffler_eval: only z <= 0 is supported");
    if (z == 0.0) return rgamma(beta);
    if (alpha == 1.0 && beta == 1.0) return std::exp(z);

    // power series with cancellation guard
    {
        long double sum = 0.0L, max_term = 0.0L, zk = 1.0L;
        bool ok = false;
        for (int k = 0; k < 4000; ++k) {
            const long double t = zk * (long double)rgamma(alpha * k + beta);
            sum += t;
            max_term = std::max(max_term, std::abs(t));
            zk *= (long double)z;
            if (k > 4 && std::abs(t) < 1e-25L * std::max(1.0L, std::abs(sum))) {
                ok = true;
                break;
            }
        }
        if (ok && max_term <= 1e6L * std::abs(sum) && std::abs(sum) > 1e-280L)
            return (double)sum;
    }

    // second-parameter reduction: E_{a,B+a}(z) = (E_{a,B}(z) - 1/Gamma(B)) / z
    if (beta > 1.0) {
        double b = beta;
        int shifts = 0;
        while (b > 1.0) {
            b -= alpha;
            ++shifts;
        }
        double v = mittag_leffler_eval(alpha, b, z);
        for (int s = 0; s < shifts; ++s) {
            v = (v - rgamma(b)) / z;
            b += alpha;
        }
        return v;
    }

    // tail expansion, accepted only when the first omitted term is negligible
    const double x = -z;
    {
        const int K = 10;
        double s = 0.0, zinv = 1.0 / z;
        double zk = zinv;
        for (int k = 1; k <= K; ++k) {
            s -= zk * rgamma(beta - alpha * k);
            zk *= zinv;
        }
        const double est = std::abs(zk * rgamma(beta - alpha * (K + 1))) + std::pow(x, -(K + 1));
        if (x >= 10.0 && std::abs(s) > 0.0 && est <= 1e-11 * std::abs(s)) return s;
    }

    if (alpha < 1.0) return detail::ml_branch_cut(alpha, beta, x);

    std::ostringstream os;
    os << "mittag_leffler_eval: no convergent scheme for alpha=" << alpha << ", beta=" << beta
       << ", z=" << z;
    throw numeric_error(os.str());
}

} // namespace memwave
