#include "rvkit/models/diagnostics.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "rvkit/common/errors.hpp"

namespace rvkit {

namespace {

double chi2_sf(double x, int dof) {
    if (!(x > 0.0)) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

}  // namespace

double normal_two_sided_p(double z) {
    if (std::isnan(z)) return NAN;
    boost::math::normal nd;
    return 2.0 * boost::math::cdf(boost::math::complement(nd, std::fabs(z)));
}

TestResult ljung_box(std::span<const double> u, int lags) {
    const auto n = static_cast<Eigen::Index>(u.size());
    const Eigen::Map<const Eigen::VectorXd> x(u.data(), n);
    const Eigen::VectorXd c = x.array() - x.mean();
    const double denom = c.squaredNorm();
    if (!(denom > 1e-24 * x.squaredNorm())) return {};
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        const double rho = c.tail(n - k).dot(c.head(n - k)) / denom;
        q += rho * rho / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    return {q, chi2_sf(q, lags)};
}

TestResult arch_lm(std::span<const double> u, int lags) {
    const auto n = static_cast<Eigen::Index>(u.size());
    const Eigen::Index rows = n - lags;
    Eigen::VectorXd y(rows);
    Eigen::MatrixXd x(rows, lags + 1);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const Eigen::Index s = t + lags;
        y(t) = u[static_cast<std::size_t>(s)] * u[static_cast<std::size_t>(s)];
        x(t, 0) = 1.0;
        for (int k = 1; k <= lags; ++k) {
            const double v = u[static_cast<std::size_t>(s - k)];
            x(t, k) = v * v;
        }
    }
    const double tss = (y.array() - y.mean()).square().sum();
    if (!(tss > 1e-24 * y.squaredNorm())) return {};
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd b = qr.solve(y);
    const double rss = (y - x * b).squaredNorm();
    const double r2 = std::max(0.0, 1.0 - rss / tss);
    const double stat = static_cast<double>(rows) * r2;
    return {stat, chi2_sf(stat, lags)};
}

DiagnosticsReport diagnostics(std::span<const double> u, int lags) {
    if (u.size() <= static_cast<std::size_t>(lags) + 1) {
        throw InsufficientDataError("diagnostics: need more than " + std::to_string(lags + 1) + " residuals");
    }
    std::vector<double> u2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
    const auto lb = ljung_box(u, lags);
    const auto lb2 = ljung_box(u2, lags);
    const auto arch = arch_lm(u, lags);
    return {lb.stat, lb.pvalue, lb2.stat, lb2.pvalue, arch.stat, arch.pvalue};
}

}  // namespace rvkit
