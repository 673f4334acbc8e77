#include "rvkit/measures/multivariate.hpp"

#include <fmt/format.h>

#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rvkit {

namespace {

// Column-pair sums in a fixed order so that mirrored entries are bitwise equal.
Eigen::MatrixXd cross_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, bool symmetric) {
    const Eigen::Index n = a.cols();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = symmetric ? i : 0; j < n; ++j) {
            double s = 0;
            for (Eigen::Index k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
            out(i, j) = s;
            if (symmetric) out(j, i) = s;
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd realized_covariance(const Eigen::MatrixXd& returns) {
    if (returns.rows() == 0 || returns.cols() == 0) throw std::invalid_argument("realized_covariance: empty panel");
    return cross_sum(returns, returns, true);
}

std::optional<Eigen::MatrixXd> bipower_covariance(const Eigen::MatrixXd& r) {
    if (r.cols() == 0) throw std::invalid_argument("bipower_covariance: empty panel");
    const Eigen::Index m = r.rows();
    const Eigen::Index n = r.cols();
    if (m < 2) return std::nullopt;
    // mu_1^-2 / 4 with mu_1^2 = 2 / pi.
    constexpr double scale = std::numbers::pi / 2.0 / 4.0;
    Eigen::MatrixXd bc(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double s = 0;
            for (Eigen::Index k = 1; k < m; ++k) {
                const double plus = std::fabs(r(k - 1, i) + r(k - 1, j)) * std::fabs(r(k, i) + r(k, j));
                const double minus = std::fabs(r(k - 1, i) - r(k - 1, j)) * std::fabs(r(k, i) - r(k, j));
                s += plus - minus;
            }
            bc(i, j) = bc(j, i) = scale * s;
        }
    }
    return bc;
}

Semicovariances semicovariances(const Eigen::MatrixXd& returns) {
    if (returns.rows() == 0 || returns.cols() == 0) throw std::invalid_argument("semicovariances: empty panel");
    const Eigen::MatrixXd pos = returns.cwiseMax(0.0);
    const Eigen::MatrixXd neg = (returns.array() > 0.0).select(0.0, returns);
    Semicovariances out{cross_sum(pos, pos, true), cross_sum(neg, neg, true), cross_sum(pos, neg, false), {}};
    out.np = out.pn.transpose();
    return out;
}

namespace {

constexpr std::array<std::string_view, 6> kCovNames{"rcov", "rbpcov", "rscov_p", "rscov_n", "rscov_mp", "rscov_mn"};

}  // namespace

const std::array<std::string_view, 6>& covariance_names() { return kCovNames; }

const Eigen::MatrixXd* CovarianceSet::get(std::string_view name) const {
    if (name == "rcov") return &rcov;
    if (name == "rbpcov") return &rbpcov;
    if (name == "rscov_p") return &rscov_p;
    if (name == "rscov_n") return &rscov_n;
    if (name == "rscov_mp") return &rscov_mp;
    if (name == "rscov_mn") return &rscov_mn;
    return nullptr;
}

CovarianceSet covariance_set(const SynchronizedPanel& panel) {
    CovarianceSet out;
    out.date = panel.date;
    out.symbols = panel.symbols;
    out.rcov = realized_covariance(panel.returns);
    const auto n = panel.returns.cols();
    out.rbpcov = bipower_covariance(panel.returns).value_or(Eigen::MatrixXd::Constant(n, n, NAN));
    auto s = semicovariances(panel.returns);
    out.rscov_p = std::move(s.pp);
    out.rscov_n = std::move(s.nn);
    out.rscov_mp = std::move(s.pn);
    out.rscov_mn = std::move(s.np);
    return out;
}

void write_covariance_csv(std::ostream& out, std::span<const CovarianceSet> days, bool header) {
    if (header) out << "date,asset_i,asset_j,measure,value\n";
    for (const auto& d : days) {
        const auto date = format_date(d.date);
        for (auto name : kCovNames) {
            const auto& mat = *d.get(name);
            for (Eigen::Index i = 0; i < mat.rows(); ++i) {
                for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                    out << fmt::format("{},{},{},{},{:.17g}\n", date, d.symbols[static_cast<std::size_t>(i)],
                                       d.symbols[static_cast<std::size_t>(j)], name, mat(i, j));
                }
            }
        }
    }
}

}  // namespace rvkit
