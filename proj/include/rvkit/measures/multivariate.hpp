#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rvkit/sampling/grid.hpp"

namespace rvkit {

struct Semicovariances {
    Eigen::MatrixXd pp;  ///< positive-positive
    Eigen::MatrixXd nn;  ///< negative-negative
    Eigen::MatrixXd pn;  ///< positive rows, negative columns
    Eigen::MatrixXd np;  ///< negative rows, positive columns
};

/// Sum of outer products of the return rows. Throws std::invalid_argument on an empty panel.
Eigen::MatrixXd realized_covariance(const Eigen::MatrixXd& returns);

/// Bipower covariance via the polarisation identity; nullopt when fewer than two intervals.
std::optional<Eigen::MatrixXd> bipower_covariance(const Eigen::MatrixXd& returns);

/// Sign decomposition; zero returns belong to the negative part.
Semicovariances semicovariances(const Eigen::MatrixXd& returns);

/// One day of covariance matrices over a panel.
struct CovarianceSet {
    Date date{};
    std::vector<std::string> symbols;
    Eigen::MatrixXd rcov;
    Eigen::MatrixXd rbpcov;
    Eigen::MatrixXd rscov_p;
    Eigen::MatrixXd rscov_n;
    Eigen::MatrixXd rscov_mp;
    Eigen::MatrixXd rscov_mn;

    /// Matrix by output name; nullptr for unknown names.
    [[nodiscard]] const Eigen::MatrixXd* get(std::string_view name) const;
};

const std::array<std::string_view, 6>& covariance_names();

CovarianceSet covariance_set(const SynchronizedPanel& panel);

/// Long format: date,asset_i,asset_j,measure,value with a header row, full matrices.
void write_covariance_csv(std::ostream& out, std::span<const CovarianceSet> days, bool header = true);

}  // namespace rvkit
