#include "spgs/nonlinearity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "spgs/error.hpp"
#include "spgs/optimize.hpp"

namespace spgs {

namespace {

std::string describe(double mu, double q, double cw) {
    std::ostringstream os;
    os << "f(s) = " << cw << " s^5 + " << mu << " s^" << (q - 1.0);
    return os.str();
}

} // namespace

double canonical_kappa(double mu, double q, double cw) {
    // (f(s) - s/2)/s^5 = cw + mu s^(q-6) - s^(-4)/2 is unimodal in s > 0.
    auto ratio = [&](double log_s) {
        const double s = std::exp(log_s);
        return cw + mu * std::pow(s, q - 6.0) - 0.5 * std::pow(s, -4.0);
    };
    const ScalarExtremum best = golden_section_max(ratio, std::log(1e-6), std::log(1e6), 1e-14, 400);
    return best.value;
}

Nonlinearity Nonlinearity::canonical(double mu, double q, double cw) {
    if (!std::isfinite(mu) || mu <= 0.0) fail(ErrorCode::invalid_argument, "mu must be positive");
    if (!std::isfinite(q) || q <= 2.0 || q >= 6.0) fail(ErrorCode::invalid_argument, "q must lie in (2, 6)");
    if (!std::isfinite(cw) || cw < 0.0 || cw > 1.0) {
        fail(ErrorCode::invalid_argument, "critical_weight must lie in [0, 1]");
    }
    auto impl = std::make_shared<Impl>();
    impl->f = [=](double s) { return s <= 0.0 ? 0.0 : cw * std::pow(s, 5) + mu * std::pow(s, q - 1.0); };
    impl->primitive = [=](double s) {
        return s <= 0.0 ? 0.0 : cw * std::pow(s, 6) / 6.0 + mu * std::pow(s, q) / q;
    };
    impl->derivative = [=](double s) {
        return s <= 0.0 ? 0.0 : 5.0 * cw * std::pow(s, 4) + mu * (q - 1.0) * std::pow(s, q - 2.0);
    };
    impl->mu = mu;
    impl->q = q;
    impl->critical_weight = cw;
    impl->kappa = canonical_kappa(mu, q, cw);
    impl->canonical = true;
    impl->name = describe(mu, q, cw);
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::custom(ScalarFn f, std::optional<ScalarFn> primitive, std::optional<ScalarFn> derivative,
                                  double mu, double q, double cw, double kappa, std::string name) {
    require(static_cast<bool>(f), "custom nonlinearity needs an evaluator");
    auto impl = std::make_shared<Impl>();
    impl->f = f;
    if (primitive && *primitive) {
        impl->primitive = *primitive;
    } else {
        impl->primitive = [f](double s) {
            if (s == 0.0) return 0.0;
            return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, s, 12, 1e-13);
        };
    }
    if (derivative && *derivative) {
        impl->derivative = *derivative;
    } else {
        impl->derivative = [f](double s) {
            const double step = 1e-6 * std::max(1.0, std::abs(s));
            return (f(s + step) - f(s - step)) / (2.0 * step);
        };
    }
    impl->mu = mu;
    impl->q = q;
    impl->critical_weight = cw;
    impl->kappa = kappa;
    impl->canonical = false;
    impl->name = std::move(name);
    return Nonlinearity(std::move(impl));
}

Nonlinearity Nonlinearity::with_kappa(double kappa) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->kappa = kappa;
    return Nonlinearity(std::move(impl));
}

bool HypothesisReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

HypothesisReport check_hypotheses(const Nonlinearity& nl, int samples) {
    require(samples >= 100, "hypothesis ladder needs at least 100 samples");
    const double lo = -8.0;
    const double hi = 4.0;
    std::vector<double> ladder(samples);
    for (int k = 0; k < samples; ++k) ladder[k] = std::pow(10.0, lo + (hi - lo) * k / (samples - 1));

    HypothesisReport report;

    {
        HypothesisCheck c{"f1_zero_on_negatives", true, 0.0, 0.0, ""};
        for (double s : ladder) {
            const double v = std::abs(nl.f(-s));
            if (v > c.worst_value) {
                c.worst_value = v;
                c.worst_sample = -s;
            }
        }
        c.passed = c.worst_value == 0.0;
        c.detail = c.passed ? "f vanishes on every negative sample" : "f(s) != 0 for some s < 0";
        report.checks.push_back(c);
    }

    {
        // f(s)/s must decay toward 0 along the bottom four decades.
        HypothesisCheck c{"f1_small_s_limit", true, ladder.front(), 0.0, ""};
        std::vector<double> ratios;
        for (double s : ladder) {
            if (s > 1e-4) break;
            ratios.push_back(std::abs(nl.f(s) / s));
        }
        const double at_bottom = ratios.front();
        const double at_top = ratios.back();
        bool non_increasing = true;
        for (std::size_t k = 1; k < ratios.size(); ++k) {
            if (ratios[k] < ratios[k - 1] * (1.0 - 1e-12)) non_increasing = false;
        }
        c.worst_value = at_bottom;
        c.passed = at_bottom <= 1e-6 || (non_increasing && at_bottom <= 0.5 * at_top);
        std::ostringstream os;
        os << "|f(s)/s| = " << at_bottom << " at s = 1e-8 versus " << at_top << " at s = 1e-4";
        c.detail = os.str();
        report.checks.push_back(c);
    }

    {
        // The canonical family has the closed-form limit critical_weight. Otherwise the limsup can
        // only be sampled; the far decade [1e11, 1e12] must sit at or below 1 + 1e-3.
        HypothesisCheck c{"f2_critical_limsup", true, 0.0, -std::numeric_limits<double>::infinity(), ""};
        std::ostringstream os;
        if (nl.is_canonical()) {
            c.worst_value = nl.critical_weight();
            c.worst_sample = std::numeric_limits<double>::infinity();
            os << "lim f(s)/s^5 = critical_weight = " << c.worst_value;
        } else {
            for (int k = 0; k <= 20; ++k) {
                const double s = std::pow(10.0, 11.0 + k / 20.0);
                const double v = nl.f(s) / std::pow(s, 5);
                if (v > c.worst_value) {
                    c.worst_value = v;
                    c.worst_sample = s;
                }
            }
            os << "max f(s)/s^5 over [1e11, 1e12] = " << c.worst_value;
        }
        c.passed = c.worst_value <= 1.0 + 1e-3;
        c.detail = os.str();
        report.checks.push_back(c);
    }

    {
        HypothesisCheck c{"f3_lower_bound", true, 0.0, std::numeric_limits<double>::infinity(), ""};
        for (double s : ladder) {
            const double bound = nl.mu() * std::pow(s, nl.q() - 1.0);
            const double margin = (nl.f(s) - bound) / std::max(bound, std::numeric_limits<double>::min());
            if (margin < c.worst_value) {
                c.worst_value = margin;
                c.worst_sample = s;
            }
        }
        c.passed = c.worst_value >= -1e-12;
        std::ostringstream os;
        os << "min relative margin of f(s) - mu s^(q-1) = " << c.worst_value << " at s = " << c.worst_sample;
        c.detail = os.str();
        report.checks.push_back(c);
    }

    {
        HypothesisCheck c{"growth_bound", true, 0.0, std::numeric_limits<double>::infinity(), ""};
        for (double s : ladder) {
            const double bound = 0.5 * s + nl.kappa() * std::pow(s, 5);
            const double margin = (bound - nl.f(s)) / bound;
            if (margin < c.worst_value) {
                c.worst_value = margin;
                c.worst_sample = s;
            }
        }
        c.passed = c.worst_value >= -1e-12;
        std::ostringstream os;
        os << "min relative margin of s/2 + kappa s^5 - f(s) = " << c.worst_value << " at s = " << c.worst_sample
           << " (kappa = " << nl.kappa() << ")";
        c.detail = os.str();
        report.checks.push_back(c);
    }

    return report;
}

} // namespace spgs
