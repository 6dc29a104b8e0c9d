#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memwave/errors.hpp"
#include "memwave/special.hpp"

namespace memwave {

enum class kernel_family { dirac, exponential, abel, abel_tempered, mittag_leffler, polynomial, custom };

inline const char* family_name(kernel_family f) {
    switch (f) {
        case kernel_family::dirac: return "dirac";
        case kernel_family::exponential: return "exponential";
        case kernel_family::abel: return "abel";
        case kernel_family::abel_tempered: return "abel_tempered";
        case kernel_family::mittag_leffler: return "mittag_leffler";
        case kernel_family::polynomial: return "polynomial";
        case kernel_family::custom: return "custom";
    }
    return "?";
}

/// A memory kernel: point mass at 0 plus a locally integrable density on t > 0.
struct Kernel {
    kernel_family family = kernel_family::dirac;
    double point_mass = 0.0;
    double alpha = 0.0; ///< abel / abel_tempered / mittag_leffler order
    double beta = 0.0;  ///< exponential / abel_tempered rate, mittag_leffler second order
    double p = 0.0;     ///< polynomial decay exponent

    std::function<double(double)> custom_density;
    std::function<double(double)> custom_density_deriv; // optional

    /// Regular-part density k(t), t > 0.
    double density(double t) const {
        switch (family) {
            case kernel_family::dirac: return 0.0;
            case kernel_family::exponential: return std::exp(-beta * t);
            case kernel_family::abel: return std::pow(t, alpha - 1.0) / std::tgamma(alpha);
            case kernel_family::abel_tempered:
                return std::pow(t, alpha - 1.0) * std::exp(-beta * t) / std::tgamma(alpha);
            case kernel_family::mittag_leffler:
                return std::pow(t, beta - 1.0) * mittag_leffler_eval(alpha, beta, -std::pow(t, alpha)) /
                       std::tgamma(1.0 - alpha);
            case kernel_family::polynomial: return std::pow(1.0 + t, -p);
            case kernel_family::custom: return custom_density ? custom_density(t) : 0.0;
        }
        return 0.0;
    }

    /// d/dt of the density (closed forms; finite differences for custom kernels
    /// supplied without a derivative).
    double density_derivative(double t) const {
        switch (family) {
            case kernel_family::dirac: return 0.0;
            case kernel_family::exponential: return -beta * std::exp(-beta * t);
            case kernel_family::abel:
                return (alpha - 1.0) * std::pow(t, alpha - 2.0) / std::tgamma(alpha);
            case kernel_family::abel_tempered:
                return std::exp(-beta * t) * std::pow(t, alpha - 2.0) * ((alpha - 1.0) - beta * t) /
                       std::tgamma(alpha);
            case kernel_family::mittag_leffler: {
                // d/dt [t^{b-1} E_{a,b}(-t^a)] = t^{b-2} E_{a,b-1}(-t^a), with
                // E_{a,0}(z) = z E_{a,a}(z).
                const double z = -std::pow(t, alpha);
                const double e = (beta == 1.0) ? z * mittag_leffler_eval(alpha, alpha, z)
                                               : mittag_leffler_eval(alpha, beta - 1.0, z);
                return std::pow(t, beta - 2.0) * e / std::tgamma(1.0 - alpha);
            }
            case kernel_family::polynomial: return -p * std::pow(1.0 + t, -p - 1.0);
            case kernel_family::custom:
                if (custom_density_deriv) return custom_density_deriv(t);
                if (custom_density) {
                    const double h = std::max(1e-6, 1e-6 * t);
                    return (custom_density(t + h) - custom_density(std::max(t - h, t * 0.5))) /
                           (t - h > 0 ? 2 * h : h + h * 0.5);
                }
                return 0.0;
        }
        return 0.0;
    }

    /// Cumulative integral of the density, int_0^t k(s) ds (exact per family).
    double density_cumulative(double t) const {
        if (t <= 0.0) return 0.0;
        switch (family) {
            case kernel_family::dirac: return 0.0;
            case kernel_family::exponential: return -std::expm1(-beta * t) / beta;
            case kernel_family::abel: return std::pow(t, alpha) / std::tgamma(alpha + 1.0);
            case kernel_family::abel_tempered:
                return std::pow(beta, -alpha) * reg_lower_gamma(alpha, beta * t);
            case kernel_family::mittag_leffler:
                return std::pow(t, beta) *
                       mittag_leffler_eval(alpha, beta + 1.0, -std::pow(t, alpha)) /
                       std::tgamma(1.0 - alpha);
            case kernel_family::polynomial:
                return (1.0 - std::pow(1.0 + t, 1.0 - p)) / (p - 1.0);
            case kernel_family::custom: {
                if (!custom_density) return 0.0;
                const auto& rule = gauss_legendre(16);
                // graded panels toward 0 to accommodate integrable singularities
                double total = 0.0, a = t * 1e-12;
                total += custom_density(a * 0.5) * a;
                while (a < t) {
                    const double b = std::min(2.0 * a, t);
                    total += gauss_panel([&](double s) { return custom_density(s); }, a, b, rule);
                    a = b;
                }
                return total;
            }
        }
        return 0.0;
    }

    /// k(0+); may be +infinity (abel-type) or 0.
    double density_limit0() const {
        switch (family) {
            case kernel_family::dirac: return 0.0;
            case kernel_family::exponential: return 1.0;
            case kernel_family::abel:
            case kernel_family::abel_tempered:
                return std::numeric_limits<double>::infinity();
            case kernel_family::mittag_leffler:
                return beta < 1.0 ? std::numeric_limits<double>::infinity()
                                  : 1.0 / std::tgamma(1.0 - alpha);
            case kernel_family::polynomial: return 1.0;
            case kernel_family::custom:
                return custom_density ? custom_density(1e-12) : 0.0;
        }
        return 0.0;
    }

    bool has_closed_fourier() const {
        switch (family) {
            case kernel_family::dirac:
            case kernel_family::exponential:
            case kernel_family::abel:
            case kernel_family::abel_tempered:
            case kernel_family::mittag_leffler:
                return true;
            default: return false;
        }
    }

    /// Fourier transform K_hat(omega) = point_mass + int_0^inf k(t) e^{-i omega t} dt
    /// (closed forms only; omega > 0).
    std::complex<double> fourier(double omega) const {
        using cplx = std::complex<double>;
        switch (family) {
            case kernel_family::dirac: return cplx(point_mass, 0.0);
            case kernel_family::exponential: return 1.0 / cplx(beta, omega);
            case kernel_family::abel: return std::pow(cplx(0.0, omega), -alpha);
            case kernel_family::abel_tempered: return std::pow(cplx(beta, omega), -alpha);
            case kernel_family::mittag_leffler: {
                const cplx iw(0.0, omega);
                return std::pow(iw, alpha - beta) /
                       (std::tgamma(1.0 - alpha) * (std::pow(iw, alpha) + 1.0));
            }
            default:
                throw numeric_error("fourier: no closed form for this kernel family");
        }
    }

    std::string spec_string() const {
        std::ostringstream os;
        os.precision(17);
        switch (family) {
            case kernel_family::dirac: os << "dirac()"; break;
            case kernel_family::exponential: os << "exponential(beta=" << beta << ")"; break;
            case kernel_family::abel: os << "abel(alpha=" << alpha << ")"; break;
            case kernel_family::abel_tempered:
                os << "abel_tempered(alpha=" << alpha << ",beta=" << beta << ")";
                break;
            case kernel_family::mittag_leffler:
                os << "mittag_leffler(alpha=" << alpha << ",beta=" << beta << ")";
                break;
            case kernel_family::polynomial: os << "polynomial(p=" << p << ")"; break;
            case kernel_family::custom: os << "custom()"; break;
        }
        return os.str();
    }
};

inline Kernel make_dirac() {
    Kernel k;
    k.family = kernel_family::dirac;
    k.point_mass = 1.0;
    return k;
}

inline Kernel make_exponential(double beta) {
    if (!(beta > 0.0)) {
        std::ostringstream os;
        os << "exponential kernel requires beta > 0 (got beta=" << beta << ")";
        throw kernel_error(os.str());
    }
    Kernel k;
    k.family = kernel_family::exponential;
    k.beta = beta;
    return k;
}

inline Kernel make_abel(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "abel kernel requires 0 < alpha < 1 (got alpha=" << alpha << ")";
        throw kernel_error(os.str());
    }
    Kernel k;
    k.family = kernel_family::abel;
    k.alpha = alpha;
    return k;
}

inline Kernel make_abel_tempered(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "abel_tempered kernel requires 0 < alpha < 1 (got alpha=" << alpha << ")";
        throw kernel_error(os.str());
    }
    if (!(beta > 0.0)) {
        std::ostringstream os;
        os << "abel_tempered kernel requires beta > 0 (got beta=" << beta << ")";
        throw kernel_error(os.str());
    }
    Kernel k;
    k.family = kernel_family::abel_tempered;
    k.alpha = alpha;
    k.beta = beta;
    return k;
}

inline Kernel make_mittag_leffler(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0 && alpha <= beta && beta <= 1.0)) {
        std::ostringstream os;
        os << "mittag_leffler kernel requires 0 < alpha <= beta <= 1 with alpha < 1 (got alpha="
           << alpha << ", beta=" << beta << ")";
        throw kernel_error(os.str());
    }
    Kernel k;
    k.family = kernel_family::mittag_leffler;
    k.alpha = alpha;
    k.beta = beta;
    return k;
}

inline Kernel make_polynomial(double p) {
    if (!(p > 1.0)) {
        std::ostringstream os;
        os << "polynomial kernel requires p > 1 (got p=" << p << ")";
        throw kernel_error(os.str());
    }
    Kernel k;
    k.family = kernel_family::polynomial;
    k.p = p;
    return k;
}

inline Kernel make_custom(double point_mass, std::function<double(double)> density,
                          std::function<double(double)> density_deriv = nullptr) {
    if (point_mass < 0.0) throw kernel_error("custom kernel requires point_mass >= 0");
    Kernel k;
    k.family = kernel_family::custom;
    k.point_mass = point_mass;
    k.custom_density = std::move(density);
    k.custom_density_deriv = std::move(density_deriv);
    return k;
}

namespace detail {

inline std::vector<std::pair<std::string, double>> parse_arg_list(const std::string& args,
                                                                  const std::string& where) {
    std::vector<std::pair<std::string, double>> out;
    std::size_t pos = 0;
    while (pos < args.size()) {
        std::size_t comma = args.find(',', pos);
        if (comma == std::string::npos) comma = args.size();
        std::string item = args.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw kernel_error("kernel spec '" + where + "': expected name=value, got '" + item + "'");
        std::string name = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        strip(name);
        strip(value);
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            out.emplace_back(name, v);
        } catch (const std::exception&) {
            throw kernel_error("kernel spec '" + where + "': bad numeric value '" + value + "'");
        }
        pos = comma + 1;
    }
    return out;
}

} // namespace detail

/// Parse the kernel grammar family(name=value,...), e.g. "exponential(beta=2.0)".
inline Kernel parse_kernel_spec(const std::string& spec) {
    const auto open = spec.find('(');
    const auto close = spec.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw kernel_error("kernel spec '" + spec + "': expected family(name=value,...)");
    std::string fam = spec.substr(0, open);
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    };
    strip(fam);
    const auto args = detail::parse_arg_list(spec.substr(open + 1, close - open - 1), spec);
    auto get = [&](const char* name) -> double {
        for (const auto& [n, v] : args)
            if (n == name) return v;
        throw kernel_error("kernel spec '" + spec + "': missing parameter '" + name + "'");
    };
    auto expect_count = [&](std::size_t n) {
        if (args.size() != n)
            throw kernel_error("kernel spec '" + spec + "': wrong number of parameters");
    };
    if (fam == "dirac") {
        expect_count(0);
        return make_dirac();
    }
    if (fam == "exponential") {
        expect_count(1);
        return make_exponential(get("beta"));
    }
    if (fam == "abel") {
        expect_count(1);
        return make_abel(get("alpha"));
    }
    if (fam == "abel_tempered") {
        expect_count(2);
        return make_abel_tempered(get("alpha"), get("beta"));
    }
    if (fam == "mittag_leffler") {
        expect_count(2);
        return make_mittag_leffler(get("alpha"), get("beta"));
    }
    if (fam == "polynomial") {
        expect_count(1);
        return make_polynomial(get("p"));
    }
    throw kernel_error("kernel spec '" + spec + "': unknown family '" + fam + "'");
}

/// Product-integration weights for a kernel part on a uniform grid:
/// w[d] = int_{t_d}^{t_{d+1}} g(s) ds, exact subinterval moments.
/// The discrete convolution (g * y)(t_n) is sum_{j=1..n} w[n-j] y(t_j) for the
/// right-endpoint piecewise-constant rule (see volterra.hpp for the averaged
/// second-order variant).
struct ConvWeights {
    double dt = 0.0;
    std::vector<double> w;
    bool identity = false; ///< delta kernel: (g * y) = y, empty weight table

    int panels() const { return (int)w.size(); }
};

/// Weights from an exact cumulative integral C(t) = int_0^t g.
template <typename F>
ConvWeights weights_from_cumulative(F&& cumulative, double dt, int n_steps) {
    ConvWeights cw;
    cw.dt = dt;
    cw.w.resize(n_steps + 1);
    double prev = 0.0;
    for (int d = 0; d <= n_steps; ++d) {
        const double next = cumulative((d + 1) * dt);
        cw.w[d] = next - prev;
        prev = next;
    }
    return cw;
}

/// Trapezoid panel moments from samples g[0..N] (smooth kernel parts only).
inline ConvWeights weights_from_samples(const std::vector<double>& g, double dt) {
    ConvWeights cw;
    cw.dt = dt;
    if (g.size() < 2) return cw;
    cw.w.resize(g.size() - 1);
    for (std::size_t d = 0; d + 1 < g.size(); ++d) cw.w[d] = 0.5 * dt * (g[d] + g[d + 1]);
    return cw;
}

/// Product-integration weights of a kernel's density part. Dirac yields the
/// identity table (convolution with delta_0 is the identity).
inline ConvWeights conv_weights(const Kernel& k, double dt, int n_steps) {
    if (!(dt > 0.0) || n_steps < 1) throw kernel_error("conv_weights: need dt > 0 and N >= 1");
    if (k.family == kernel_family::dirac) {
        ConvWeights cw;
        cw.dt = dt;
        cw.identity = true;
        return cw;
    }
    return weights_from_cumulative([&](double t) { return k.density_cumulative(t); }, dt, n_steps);
}

} // namespace memwave
