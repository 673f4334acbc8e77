#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/diagnostics.hpp"
#include "rvkit/models/forecast.hpp"
#include "rvkit/models/har.hpp"
#include "rvkit/models/mem.hpp"
#include "rvkit/models/optimizer.hpp"

using namespace rvkit;

namespace {

std::vector<double> simulate_mem11(std::mt19937_64& rng, std::size_t n, double w, double a, double b, double shape) {
    std::gamma_distribution<double> eps(shape, 1.0 / shape);
    std::vector<double> y(n);
    double mu = w / (1.0 - a - b);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = mu * eps(rng);
        mu = w + a * y[t] + b * mu;
    }
    return y;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST(Models, FamilyNames) {
    EXPECT_EQ(parse_model_family("AMEM(2,1)"), ModelFamily::amem21);
    EXPECT_EQ(parse_model_family("har-q"), ModelFamily::harq);
    EXPECT_EQ(parse_model_family("mem"), ModelFamily::mem11);
    EXPECT_FALSE(parse_model_family("garch"));
    EXPECT_EQ(quarticity_for("rv5_ss"), "rq5_ss");
    EXPECT_EQ(quarticity_for("bv5"), "rq5");
    EXPECT_EQ(quarticity_for("rk"), "rq1");
    EXPECT_EQ(quarticity_for("rv1"), "rq1");
}

TEST(Models, Annualize) {
    EXPECT_EQ(annualize(0.0), 0.0);
    EXPECT_NEAR(annualize(1.0 / 252.0), 100.0, 1e-12);
    EXPECT_NEAR(annualize(0.0004 / 252.0), 2.0, 1e-12);
    EXPECT_THROW(annualize(-1e-9), std::domain_error);
}

TEST(Har, RampComponents) {
    std::vector<double> y(40);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = static_cast<double>(t);
    const auto d = build_har_design(y, ModelFamily::har);
    ASSERT_EQ(d.x.rows(), 40 - 22);
    for (Eigen::Index r = 0; r < d.x.rows(); ++r) {
        const double t = static_cast<double>(r + 22);
        EXPECT_DOUBLE_EQ(d.x(r, 0), 1.0);
        EXPECT_DOUBLE_EQ(d.x(r, 1), t - 1.0);
        EXPECT_DOUBLE_EQ(d.x(r, 2), t - 3.5);
        // Seventeen lags t-6..t-22 scaled by 1/16: (17/16)(t - 14).
        EXPECT_NEAR(d.x(r, 3), 17.0 * (t - 14.0) / 16.0, 1e-12);
        EXPECT_DOUBLE_EQ(d.target(r), t);
    }
}

TEST(Har, ConstantSeriesAndConstantQuarticity) {
    std::vector<double> y(30, 2.5);
    std::vector<double> rq(30, 4.0);
    const auto d = build_har_design(y, ModelFamily::harq, rq);
    EXPECT_DOUBLE_EQ(d.rq_sqrt_mean, 2.0);
    for (Eigen::Index r = 0; r < d.x.rows(); ++r) {
        EXPECT_DOUBLE_EQ(d.x(r, 1), 2.5);
        EXPECT_DOUBLE_EQ(d.x(r, 2), 2.5);
        EXPECT_NEAR(d.x(r, 3), 2.5 * 17.0 / 16.0, 1e-15);
        EXPECT_EQ(d.x(r, 4), 0.0);
    }
}

TEST(Har, TooShortNamesMinimum) {
    std::vector<double> y(22, 1.0);
    try {
        build_har_design(y, ModelFamily::har);
        FAIL();
    } catch (const InsufficientDataError& e) {
        EXPECT_NE(std::string(e.what()).find("23"), std::string::npos);
    }
}

TEST(Har, NeweyWestLagRule) {
    EXPECT_EQ(newey_west_lags(750), 6);
    EXPECT_EQ(newey_west_lags(100), 4);
    EXPECT_EQ(newey_west_lags(728), 6);
    EXPECT_EQ(newey_west_lags(5000), 9);
}

TEST(Har, NeweyWestZeroLagIsWhite) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(200, 3);
    Eigen::VectorXd e(200);
    for (int i = 0; i < 200; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = z(rng);
        x(i, 2) = z(rng);
        e(i) = z(rng) * (1.0 + std::fabs(x(i, 1)));
    }
    const Eigen::MatrixXd inv = (x.transpose() * x).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 200; ++i) meat += e(i) * e(i) * x.row(i).transpose() * x.row(i);
    const Eigen::MatrixXd white = inv * meat * inv;
    const Eigen::MatrixXd nw = newey_west_cov(x, e, 0);
    EXPECT_LT((nw - white).cwiseAbs().maxCoeff(), 1e-12 * white.cwiseAbs().maxCoeff());

    const Eigen::MatrixXd nw6 = newey_west_cov(x, e, 6);
    EXPECT_EQ((nw6 - nw6.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nw6);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Har, NeweyWestSingular) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 2);
    EXPECT_THROW(newey_west_cov(x, Eigen::VectorXd::Ones(10), 2), NumericalError);
}

TEST(Har, NeweyWestMatchesClassicalWhenHomoskedastic) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    const int n = 20000;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = z(rng);
        e(i) = z(rng);
    }
    const Eigen::MatrixXd classical = e.squaredNorm() / n * (x.transpose() * x).inverse();
    const Eigen::MatrixXd nw = newey_west_cov(x, e, newey_west_lags(n));
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(nw(i, i) / classical(i, i), 1.0, 0.1);
}

TEST(Har, NoiselessRecovery) {
    // Exact HAR recursion from random initial lags; the transient identifies every coefficient.
    const Eigen::VectorXd truth = vec({0.05, 0.35, 0.3, 0.2});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    ModelData data;
    data.y.resize(900);
    for (std::size_t t = 0; t < 22; ++t) data.y[t] = u(rng);
    for (std::size_t t = 22; t < data.y.size(); ++t) {
        double wk = 0.0, mo = 0.0;
        for (std::size_t i = 2; i <= 5; ++i) wk += data.y[t - i];
        for (std::size_t i = 6; i <= 22; ++i) mo += data.y[t - i];
        data.y[t] = truth(0) + truth(1) * data.y[t - 1] + truth(2) * wk / 4.0 + truth(3) * mo / 16.0;
    }
    const auto fit = fit_har(data, ModelFamily::har);
    EXPECT_LE((fit.params - truth).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Har, FitShapes) {
    std::mt19937_64 rng(21);
    std::gamma_distribution<double> g(4.0, 0.25);
    ModelData data;
    data.y.resize(800);
    for (std::size_t t = 0; t < 22; ++t) data.y[t] = 1.0;
    for (std::size_t t = 22; t < data.y.size(); ++t) {
        double wk = 0.0, mo = 0.0;
        for (std::size_t i = 2; i <= 5; ++i) wk += data.y[t - i];
        for (std::size_t i = 6; i <= 22; ++i) mo += data.y[t - i];
        data.y[t] = (0.1 + 0.3 * data.y[t - 1] + 0.3 * wk / 4.0 + 0.2 * mo / 16.0) * g(rng);
    }
    const auto fit = fit_har(data, ModelFamily::har);
    EXPECT_EQ(fit.params.size(), 4);
    EXPECT_EQ(fit.hac_lags, newey_west_lags(800 - 22));
    EXPECT_EQ(fit.residuals.size(), 800u - 22u);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_GE(fit.p_values(i), 0.0);
        EXPECT_LE(fit.p_values(i), 1.0);
        EXPECT_GT(fit.std_errors(i), 0.0);
    }
    // Residuals orthogonal to every column.
    const auto design = build_har_design(data.y, ModelFamily::har);
    const Eigen::Map<const Eigen::VectorXd> e(fit.residuals.data(), static_cast<Eigen::Index>(fit.residuals.size()));
    const Eigen::VectorXd xe = design.x.transpose() * e;
    for (Eigen::Index j = 0; j < xe.size(); ++j) {
        EXPECT_LE(std::fabs(xe(j)) / (design.x.col(j).norm() * e.norm()), 1e-10);
    }

    ModelData shortd;
    shortd.y.assign(data.y.begin(), data.y.begin() + 749);
    EXPECT_THROW(fit_har(shortd, ModelFamily::har), InsufficientDataError);
}

TEST(Har, RankDeficient) {
    ModelData data;
    data.y.assign(800, 1.0);
    EXPECT_THROW(fit_har(data, ModelFamily::har), NumericalError);
}

TEST(Mem, FilterHandExample) {
    const std::vector<double> y{2.0, 1.0};
    const auto path = mem_filter(ModelFamily::mem11, vec({0.1, 0.5, 0.4}), y, {}, 0.0);
    EXPECT_NEAR(path.mu[0], 1.0, 1e-15);
    EXPECT_NEAR(path.mu[1], 1.5, 1e-15);
}

TEST(Mem, AsymmetricWithZeroGammaMatchesSymmetric) {
    std::mt19937_64 rng(8);
    const auto y = simulate_mem11(rng, 300, 0.2, 0.3, 0.6, 5.0);
    std::vector<bool> neg(y.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = (i * 7) % 3 == 0;
    const auto a = mem_filter(ModelFamily::mem11, vec({0.2, 0.3, 0.6}), y, neg, 1.0);
    const auto b = mem_filter(ModelFamily::amem11, vec({0.2, 0.3, 0.6, 0.0}), y, neg, 1.0);
    const auto c = mem_filter(ModelFamily::amem21, vec({0.2, 0.3, 0.0, 0.6, 0.0}), y, neg, 1.0);
    EXPECT_EQ(a.mu, b.mu);
    EXPECT_EQ(a.mu, c.mu);
}

TEST(Mem, AsymmetricTermUsesNegativeDays) {
    const std::vector<double> y{1.0, 2.0, 3.0};
    const std::vector<bool> neg{false, true, false};
    const auto p = mem_filter(ModelFamily::amem11, vec({0.1, 0.2, 0.5, 0.4}), y, neg, 0.0);
    const double mu0 = 0.1 / (1.0 - 0.2 - 0.5 - 0.2);
    EXPECT_NEAR(p.mu[0], mu0, 1e-14);
    EXPECT_NEAR(p.mu[1], 0.1 + 0.2 * 1.0 + 0.5 * mu0, 1e-14);
    EXPECT_NEAR(p.mu[2], 0.1 + 0.2 * 2.0 + 0.4 * 2.0 + 0.5 * p.mu[1], 1e-14);
}

TEST(Mem, PresampleLagForSecondOrder) {
    const std::vector<double> y{1.0, 2.0, 3.0};
    const std::vector<bool> neg(3, false);
    const Eigen::VectorXd th = vec({0.1, 0.2, 0.1, 0.5, 0.0});
    const auto p = mem_filter(ModelFamily::amem21, th, y, neg, 7.0);
    const double mu0 = 0.1 / (1.0 - 0.8);
    EXPECT_NEAR(p.mu[1], 0.1 + 0.2 * 1.0 + 0.1 * 7.0 + 0.5 * mu0, 1e-14);
    EXPECT_NEAR(p.mu[2], 0.1 + 0.2 * 2.0 + 0.1 * 1.0 + 0.5 * p.mu[1], 1e-14);
}

TEST(Mem, AnalyticGradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(99);
    const auto y = simulate_mem11(rng, 400, 1.0, 0.3, 0.5, 4.0);
    std::vector<bool> neg(y.size());
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = coin(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto fam : {ModelFamily::mem11, ModelFamily::amem11, ModelFamily::amem21}) {
        int checked = 0;
        while (checked < 10) {
            Eigen::VectorXd th;
            if (fam == ModelFamily::mem11) th = vec({0.2 + u(rng), 0.4 * u(rng), 0.5 * u(rng)});
            if (fam == ModelFamily::amem11) th = vec({0.2 + u(rng), 0.3 * u(rng), 0.5 * u(rng), 0.3 * u(rng)});
            if (fam == ModelFamily::amem21) th = vec({0.2 + u(rng), 0.3 * u(rng), 0.1 * u(rng), 0.5 * u(rng), 0.2 * u(rng)});
            if (!mem_admissible(fam, th)) continue;
            ++checked;
            Eigen::VectorXd g;
            mem_loglik(fam, th, y, neg, 1.2, &g);
            for (Eigen::Index i = 0; i < th.size(); ++i) {
                const double h = 1e-6 * std::max(1.0, std::fabs(th(i)));
                Eigen::VectorXd tp = th, tm = th;
                tp(i) += h;
                tm(i) -= h;
                const double fd =
                    (mem_loglik(fam, tp, y, neg, 1.2) - mem_loglik(fam, tm, y, neg, 1.2)) / (2.0 * h);
                EXPECT_LE(std::fabs(fd - g(i)), 1e-5 * std::max(1.0, std::fabs(g(i))))
                    << to_string(fam) << " param " << i;
            }
        }
    }
}

TEST(Mem, ConstraintSets) {
    EXPECT_TRUE(mem_admissible(ModelFamily::mem11, vec({0.1, 0.3, 0.6})));
    EXPECT_FALSE(mem_admissible(ModelFamily::mem11, vec({0.1, 0.5, 0.5})));
    EXPECT_FALSE(mem_admissible(ModelFamily::mem11, vec({0.0, 0.3, 0.6})));
    EXPECT_FALSE(mem_admissible(ModelFamily::amem11, vec({0.1, 0.3, 0.5, -0.01})));
    EXPECT_FALSE(mem_admissible(ModelFamily::amem11, vec({0.1, 0.3, 0.5, 0.4})));
    // AMEM(2,1): negative alpha2 allowed while alpha2 + alpha1 beta1 >= 0.
    EXPECT_TRUE(mem_admissible(ModelFamily::amem21, vec({0.5, 0.5, -0.35, 0.75, 0.02})));
    EXPECT_FALSE(mem_admissible(ModelFamily::amem21, vec({0.5, 0.5, -0.4, 0.75, 0.02})));
    EXPECT_FALSE(mem_admissible(ModelFamily::amem21, vec({0.5, 0.1, 0.0, 0.5, -0.2})));
    // Jacobian agrees with finite differences of the constraint values.
    const Eigen::VectorXd th = vec({0.5, 0.4, -0.2, 0.6, 0.1});
    const Eigen::MatrixXd j = mem_constraint_jacobian(ModelFamily::amem21, th);
    for (Eigen::Index i = 0; i < th.size(); ++i) {
        Eigen::VectorXd tp = th, tm = th;
        tp(i) += 1e-6;
        tm(i) -= 1e-6;
        const Eigen::VectorXd fd = (mem_constraints(ModelFamily::amem21, tp) - mem_constraints(ModelFamily::amem21, tm)) / 2e-6;
        EXPECT_LT((fd - j.col(i)).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Optimizer, SmallQpHitsBound) {
    // min (d0-1)^2 + (d1-2)^2 with d0 + d1 <= 1.
    Eigen::MatrixXd b = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd g = vec({-2.0, -4.0});
    Eigen::MatrixXd a(1, 2);
    a << -1.0, -1.0;
    Eigen::VectorXd rhs = vec({-1.0});
    Eigen::VectorXd d, lam;
    ASSERT_TRUE(solve_small_qp(b, g, a, rhs, d, lam));
    EXPECT_NEAR(d(0), 0.0, 1e-12);
    EXPECT_NEAR(d(1), 1.0, 1e-12);
    EXPECT_NEAR(lam(0), 2.0, 1e-12);
}

TEST(Optimizer, ConstrainedQuadratic) {
    SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = vec({2.0 * (x(0) - 2.0), 4.0 * (x(1) + 1.0)});
        return (x(0) - 2.0) * (x(0) - 2.0) + 2.0 * (x(1) + 1.0) * (x(1) + 1.0);
    };
    ConstraintSet c;
    c.value = [](const Eigen::VectorXd& x) { return vec({x(1), 1.0 - x(0) - x(1)}); };
    c.jacobian = [](const Eigen::VectorXd&) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, -1.0, -1.0;
        return j;
    };
    const auto r = sqp_minimize(f, c, vec({0.2, 0.2}), Eigen::MatrixXd::Identity(2, 2));
    ASSERT_TRUE(r.converged) << r.message;
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
    EXPECT_NEAR(r.x(1), 0.0, 1e-6);
}

TEST(Mem, FitRecoversAndNests) {
    std::mt19937_64 rng(2024);
    ModelData data;
    data.y = simulate_mem11(rng, 3000, 2.0, 0.5, 0.4, 8.0);
    data.negative.resize(data.y.size());
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < data.negative.size(); ++i) data.negative[i] = coin(rng);

    const auto mem = fit_mem(data, ModelFamily::mem11);
    ASSERT_EQ(mem.params.size(), 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double truth = std::array{2.0, 0.5, 0.4}[static_cast<std::size_t>(i)];
        EXPECT_LT(std::fabs(mem.params(i) - truth), 4.0 * mem.std_errors(i)) << mem.param_names[static_cast<std::size_t>(i)];
    }
    EXPECT_TRUE(mem_admissible(ModelFamily::mem11, mem.params));
    EXPECT_GT(*mem.sigma2_hat, 0.0);

    MemFitOptions pinned;
    pinned.pins = {std::nullopt, std::nullopt, std::nullopt, 0.0};
    const auto nested = fit_mem(data, ModelFamily::amem11, "rv5", pinned);
    EXPECT_NEAR(*nested.loglik, *mem.loglik, 1e-6 * std::fabs(*mem.loglik));
    EXPECT_TRUE(std::isnan(nested.std_errors(3)));

    const auto free = fit_mem(data, ModelFamily::amem11);
    EXPECT_GE(*free.loglik, *mem.loglik - 1e-6 * std::fabs(*mem.loglik));
    EXPECT_TRUE(mem_admissible(ModelFamily::amem11, free.params, 1e-10));

    MemFitOptions no_a2;
    no_a2.pins = {std::nullopt, std::nullopt, 0.0, std::nullopt, std::nullopt};
    const auto am21 = fit_mem(data, ModelFamily::amem21, "rv5", no_a2);
    EXPECT_NEAR(*am21.loglik, *free.loglik, 1e-6 * std::fabs(*free.loglik));
}

TEST(Mem, RejectsZerosAndShortWindows) {
    ModelData data;
    data.y.assign(800, 1.0);
    data.y[10] = 0.0;
    try {
        fit_mem(data, ModelFamily::mem11);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("floor"), std::string::npos);
    }
    data.y.assign(749, 1.0);
    EXPECT_THROW(fit_mem(data, ModelFamily::mem11), InsufficientDataError);
}

TEST(Diagnostics, AlternatingAndConstant) {
    std::vector<double> alt(200);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    const auto d = diagnostics(alt);
    EXPECT_LT(d.lb_pvalue, 1e-10);
    EXPECT_GT(d.lb_stat, 0.0);
    EXPECT_EQ(d.lb2_pvalue, 1.0);

    std::vector<double> c(200, 0.3);
    const auto k = diagnostics(c);
    EXPECT_EQ(k.lb_stat, 0.0);
    EXPECT_EQ(k.lb_pvalue, 1.0);
    EXPECT_EQ(k.lb2_pvalue, 1.0);
    EXPECT_EQ(k.arch_pvalue, 1.0);
    EXPECT_THROW(diagnostics(std::vector<double>(6, 1.0)), InsufficientDataError);
}

TEST(Diagnostics, LjungBoxHandComputed) {
    const std::vector<double> u{1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 2.0, 1.0};
    const double mean = 3.0;
    double den = 0.0;
    for (double v : u) den += (v - mean) * (v - mean);
    double q = 0.0;
    const int n = 8;
    for (int k = 1; k <= 2; ++k) {
        double num = 0.0;
        for (int t = k; t < n; ++t) num += (u[static_cast<std::size_t>(t)] - mean) * (u[static_cast<std::size_t>(t - k)] - mean);
        q += (num / den) * (num / den) / (n - k);
    }
    q *= n * (n + 2);
    const auto r = ljung_box(u, 2);
    EXPECT_NEAR(r.stat, q, 1e-12);
    EXPECT_NEAR(r.pvalue, std::exp(-q / 2.0), 1e-12);  // chi-square(2) survival function
}

TEST(Diagnostics, ArchDetectsClustering) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<double> u(2000);
    double h = 1.0, prev = 0.0;
    for (auto& v : u) {
        h = 0.2 + 0.7 * prev * prev;
        v = std::sqrt(h) * z(rng);
        prev = v;
    }
    EXPECT_LT(diagnostics(u).arch_pvalue, 1e-6);
}

TEST(Forecast, QuantilesAndLosses) {
    EXPECT_DOUBLE_EQ(empirical_quantile({3.0, 1.0, 2.0, 4.0}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(empirical_quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.025), 1.1);
    const std::vector<double> y{1.0, 2.0, 3.0};
    EXPECT_EQ(mse_loss(y, y), 0.0);
    EXPECT_EQ(*qlike_loss(y, y), 0.0);
    const std::vector<double> f{1.5, 1.5, 2.0};
    EXPECT_GT(*qlike_loss(y, f), 0.0);
    EXPECT_FALSE(qlike_loss(y, std::vector<double>{1.0, -1.0, 2.0}));
}

TEST(Forecast, MemSequentialOneStep) {
    std::mt19937_64 rng(6);
    ModelData data;
    data.y = simulate_mem11(rng, 830, 2.0, 0.3, 0.6, 10.0);
    ModelData window;
    window.y.assign(data.y.begin(), data.y.begin() + 800);
    const auto fit = fit_mem(window, ModelFamily::mem11);
    const auto fc = forecast(fit, data);
    EXPECT_EQ(fc.horizon, 22u);
    const auto path = mem_filter(ModelFamily::mem11, fit.params, data.y, {}, fit.y_mean);
    for (std::size_t h = 0; h < fc.horizon; ++h) {
        EXPECT_DOUBLE_EQ(fc.point[h], path.mu[800 + h]);
        EXPECT_LE(fc.ci_low[h], fc.point[h]);
        EXPECT_GE(fc.ci_high[h], fc.point[h]);
        EXPECT_EQ(fc.actuals[h], data.y[800 + h]);
    }
    ModelData few = window;
    few.y.insert(few.y.end(), data.y.begin() + 800, data.y.begin() + 803);
    EXPECT_THROW(forecast(fit, few), InsufficientDataError);
}

TEST(Forecast, DegenerateInnovationsGiveZeroWidth) {
    ModelFit fit;
    fit.spec = {ModelFamily::mem11, "rv5"};
    fit.params = vec({0.1, 0.5, 0.4});
    fit.n_obs = 10;
    fit.residuals.assign(10, 0.0);
    fit.y_mean = 1.0;
    ModelData data;
    data.y.assign(16, 1.0);
    const auto fc = forecast(fit, data);
    EXPECT_EQ(fc.horizon, 6u);
    for (std::size_t h = 0; h < fc.horizon; ++h) {
        EXPECT_EQ(fc.ci_low[h], fc.point[h]);
        EXPECT_EQ(fc.ci_high[h], fc.point[h]);
    }
}

TEST(Forecast, HarLowerBoundTruncatedAtZero) {
    ModelFit fit;
    fit.spec = {ModelFamily::har, "rv5"};
    fit.params = vec({0.0, 0.1, 0.0, 0.0});
    fit.n_obs = 30;
    fit.residuals = {-5.0, -4.0, 0.0, 1.0, 2.0};
    ModelData data;
    data.y.assign(40, 1.0);
    const auto fc = forecast(fit, data);
    EXPECT_EQ(fc.horizon, 10u);
    for (std::size_t h = 0; h < fc.horizon; ++h) {
        EXPECT_DOUBLE_EQ(fc.point[h], 0.1);
        EXPECT_EQ(fc.ci_low[h], 0.0);
        EXPECT_GT(fc.ci_high[h], fc.point[h]);
    }
}

TEST(Forecast, Summary) {
    std::vector<ModelFit> fits(3);
    for (int i = 0; i < 3; ++i) {
        fits[static_cast<std::size_t>(i)].param_names = {"omega", "alpha1"};
        fits[static_cast<std::size_t>(i)].params = vec({1.0 + i, 0.5});
        fits[static_cast<std::size_t>(i)].p_values = vec({i == 0 ? 0.01 : 0.2, 0.001});
    }
    const auto s = summarize_fits(fits);
    EXPECT_EQ(s.at("omega").n, 3u);
    EXPECT_DOUBLE_EQ(s.at("omega").mean, 2.0);
    EXPECT_DOUBLE_EQ(s.at("omega").std, 1.0);
    EXPECT_DOUBLE_EQ(s.at("omega").median, 2.0);
    EXPECT_NEAR(s.at("omega").pct_significant, 100.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(s.at("alpha1").pct_significant, 100.0);
}
