#include "synchrony_lab/error.hpp"

#include <fmt/format.h>

namespace synchrony_lab {

DegenerateConvention::DegenerateConvention(double beta, double k)
    : Error("degenerate_convention",
            fmt::format("(1 + beta*k)^2 - beta^2 <= 0 for beta={} k={}", beta, k)),
      beta_(beta),
      k_(k) {}

ConventionOutOfRange::ConventionOutOfRange(double k_prime)
    : Error("convention_out_of_range",
            fmt::format("induced synchrony parameter k'={} leaves [-1, 1]", k_prime)) {}

ChartMismatch::ChartMismatch(const std::string& expected, const std::string& actual)
    : Error("chart_mismatch",
            fmt::format("event lives in chart '{}' but '{}' was expected", actual, expected)) {}

UnresolvableChase::UnresolvableChase(double signal_speed, double beta)
    : Error("unresolvable_chase",
            fmt::format("signal of speed {} never reaches a node receding at beta={}",
                        signal_speed, beta)) {}

}  // namespace synchrony_lab
