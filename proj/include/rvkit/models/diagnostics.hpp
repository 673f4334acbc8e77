#pragma once

#include <span>

#include "rvkit/models/types.hpp"

namespace rvkit {

struct TestResult {
    double stat = 0.0;
    double pvalue = 1.0;
};

/// Ljung-Box Q on `lags` autocorrelations against chi-square(lags).
TestResult ljung_box(std::span<const double> u, int lags = kDiagnosticLags);
/// Engle's LM test: T R^2 of u_t^2 on a constant and `lags` own lags, against chi-square(lags).
TestResult arch_lm(std::span<const double> u, int lags = kDiagnosticLags);

/// LB on u and u^2 plus ARCH-LM. Throws InsufficientDataError when |u| <= lags + 1.
DiagnosticsReport diagnostics(std::span<const double> u, int lags = kDiagnosticLags);

/// Two-sided standard normal p-value.
double normal_two_sided_p(double z);

}  // namespace rvkit
