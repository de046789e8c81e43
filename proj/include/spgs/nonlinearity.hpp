#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spgs {

/// A nonlinearity f with primitive F(s) = int_0^s f and derivative f'.
///
/// Declared parameters: mu and q of the lower bound f(s) >= mu s^(q-1), the
/// weight of the critical s^5 term, and kappa of f(s) <= s/2 + kappa s^5.
/// Immutable and cheap to copy.
class Nonlinearity {
public:
    using ScalarFn = std::function<double(double)>;

    /// f(s) = critical_weight * s_+^5 + mu * s_+^(q-1), with the smallest valid kappa.
    static Nonlinearity canonical(double mu, double q, double critical_weight);

    /// User-supplied f. A missing primitive is integrated by adaptive
    /// Gauss-Kronrod; a missing derivative becomes a centered difference with
    /// step 1e-6 * max(1, |s|).
    static Nonlinearity custom(ScalarFn f, std::optional<ScalarFn> primitive, std::optional<ScalarFn> derivative,
                               double mu, double q, double critical_weight, double kappa, std::string name);

    double f(double s) const { return impl_->f(s); }
    double F(double s) const { return impl_->primitive(s); }
    double fprime(double s) const { return impl_->derivative(s); }
    double G(double s) const { return F(s) - 0.5 * s * s; }

    double mu() const noexcept { return impl_->mu; }
    double q() const noexcept { return impl_->q; }
    double critical_weight() const noexcept { return impl_->critical_weight; }
    double kappa() const noexcept { return impl_->kappa; }
    bool is_canonical() const noexcept { return impl_->canonical; }
    const std::string& name() const noexcept { return impl_->name; }

    /// Copy with a different declared kappa (the evaluators are shared).
    Nonlinearity with_kappa(double kappa) const;

private:
    struct Impl {
        ScalarFn f;
        ScalarFn primitive;
        ScalarFn derivative;
        double mu = 0.0;
        double q = 0.0;
        double critical_weight = 0.0;
        double kappa = 0.0;
        bool canonical = false;
        std::string name;
    };
    explicit Nonlinearity(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const Impl> impl_;
};

/// max over s > 0 of (f(s) - s/2) / s^5 for the canonical family, by
/// golden-section search in log s.
double canonical_kappa(double mu, double q, double critical_weight);

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double worst_sample = 0.0;
    double worst_value = 0.0;
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;

    bool all_passed() const;
    const HypothesisCheck* find(const std::string& name) const;
};

/// Samples f on a logarithmic ladder over [1e-8, 1e4] (and its mirror on the
/// negative axis) and records pass/fail per hypothesis together with the worst
/// sample. Never throws on a failed hypothesis.
HypothesisReport check_hypotheses(const Nonlinearity& nl, int samples = 400);

} // namespace spgs
