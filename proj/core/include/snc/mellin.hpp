#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace snc {

/// Mellin transform of a positive random variable, s -> E[X^{s-1}],
/// carried in log scale so that deep negative orders stay representable.
/// Immutable once constructed; evaluation is pure.
class MellinFn {
  public:
    MellinFn() = default;
    MellinFn(std::function<double(double)> log_eval, std::string domain_note)
        : log_eval_(std::move(log_eval)), domain_note_(std::move(domain_note)) {}

    /// E[X^{s-1}]; +inf when the log evaluation overflows.
    double operator()(double s) const { return std::exp(log_eval_(s)); }

    /// log E[X^{s-1}].
    double log_eval(double s) const { return log_eval_(s); }

    const std::string& domain_note() const { return domain_note_; }
    bool valid() const { return static_cast<bool>(log_eval_); }

  private:
    std::function<double(double)> log_eval_;
    std::string domain_note_;
};

/// Detailed result of an alternating-sum evaluation. `cancellation` is
/// sum|term| / |sum|; a warning marks evaluations where more than six
/// digits were lost and the hypergeometric route should be preferred.
struct SumEval {
    double value = 0.0;
    double log_value = 0.0;
    double cancellation = 1.0;
    int lost_digits = 0;
    bool cancellation_warning = false;
};

}  // namespace snc
