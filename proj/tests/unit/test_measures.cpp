#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rvkit/measures/multivariate.hpp"
#include "rvkit/measures/univariate.hpp"
#include "test_support.hpp"

namespace rvkit {
namespace {

using namespace testing;
constexpr double kPi = std::numbers::pi;

// Independent previous-tick construction: scan every tick for each grid instant.
std::vector<double> oracle_grid(const std::vector<TimedPrice>& p, Millis start, Millis end, Millis step) {
    std::vector<double> out;
    for (Millis t = start; t <= end; t += step) {
        double v = p.front().price;
        for (const auto& x : p) {
            if (x.time > t) break;
            v = x.price;
        }
        out.push_back(v);
    }
    return out;
}

double oracle_rv(const std::vector<double>& prices) {
    double s = 0;
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const double r = std::log(prices[i] / prices[i - 1]);
        s += r * r;
    }
    return s;
}

TEST(Range, Examples) {
    auto r = range_measures(10, 10, 10, 10, {});
    EXPECT_EQ(r.pr, 0.0);
    EXPECT_EQ(r.gkr, 0.0);
    const double e = std::exp(1.0);
    r = range_measures(e, 1.0, 2.0, 2.0, std::vector<PriceRange>{{e, 1.0}});
    EXPECT_NEAR(r.pr, 0.360674, 1e-6);
    EXPECT_NEAR(r.gkr, 0.5, 1e-15);
    EXPECT_NEAR(r.rr, 0.360674, 1e-6);
    EXPECT_THROW(range_measures(1, 2, 1, 1, {}), std::invalid_argument);
}

TEST(Returns, HandEvaluatedExample) {
    const std::vector<double> r{0.01, -0.02, 0.01};
    const auto m = return_based_measures(r);
    ASSERT_TRUE(m);
    EXPECT_NEAR(m->rv, 6.0e-4, 1e-18);
    EXPECT_NEAR(m->rq, 1.8e-7, 1e-20);
    EXPECT_NEAR(m->bv, kPi / 2 * 4.0e-4, 1e-18);
    EXPECT_NEAR(m->rsp, 2.0e-4, 1e-18);
    EXPECT_NEAR(m->rsn, 4.0e-4, 1e-18);
    ASSERT_TRUE(m->medrv && m->minrv);
    EXPECT_NEAR(*m->medrv, kPi / (6 - 4 * std::sqrt(3.0) + kPi) * 3 * 1.0e-4, 1e-18);
    EXPECT_NEAR(*m->medrv, 4.2581e-4, 1e-8);
    EXPECT_NEAR(*m->minrv, kPi / (kPi - 2) * 1.5 * 2.0e-4, 1e-18);
    EXPECT_NEAR(*m->minrv, 8.2558e-4, 1e-8);
}

TEST(Returns, ZeroAndShortSeries) {
    const auto z = return_based_measures(std::vector<double>(50, 0.0));
    EXPECT_EQ(z->rv + z->rq + z->bv + z->rsp + z->rsn + *z->medrv + *z->minrv, 0.0);
    const auto two = return_based_measures(std::vector<double>{0.01, 0.02});
    ASSERT_TRUE(two);
    EXPECT_FALSE(two->medrv);
    EXPECT_TRUE(two->minrv);
    EXPECT_FALSE(return_based_measures(std::vector<double>{0.01}));
}

TEST(Returns, SymmetryProperties) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z(0, 0.001);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> r(5 + rng() % 400);
        for (auto& x : r) x = z(rng);
        const auto a = *return_based_measures(r);
        std::vector<double> neg(r), rev(r.rbegin(), r.rend());
        for (auto& x : neg) x = -x;
        const auto b = *return_based_measures(neg);
        const auto c = *return_based_measures(rev);
        EXPECT_EQ(a.rv, b.rv);
        EXPECT_EQ(a.bv, b.bv);
        EXPECT_EQ(*a.medrv, *b.medrv);
        EXPECT_EQ(a.rsp, b.rsn);
        EXPECT_EQ(a.rsn, b.rsp);
        EXPECT_NEAR(a.rsp + a.rsn, a.rv, 1e-12 * a.rv);
        for (auto [x, y] : {std::pair{a.rv, c.rv}, {a.rq, c.rq}, {a.bv, c.bv}, {a.rsp, c.rsp}, {a.rsn, c.rsn},
                            {*a.medrv, *c.medrv}, {*a.minrv, *c.minrv}}) {
            EXPECT_NEAR(x, y, 1e-13 * std::fabs(x));
        }
    }
}

TEST(Parzen, Shape) {
    EXPECT_EQ(parzen_kernel(0.0), 1.0);
    EXPECT_EQ(parzen_kernel(1.0), 0.0);
    EXPECT_DOUBLE_EQ(parzen_kernel(0.5), 0.25);
    EXPECT_DOUBLE_EQ(1 - 6 * 0.25 + 6 * 0.125, 2 * 0.125);
    EXPECT_EQ(parzen_kernel(1.7), 0.0);
    double prev = 1.0;
    for (double x = 0.0; x <= 1.0; x += 1e-3) {
        EXPECT_LE(parzen_kernel(x), prev + 1e-15);
        prev = parzen_kernel(x);
    }
    EXPECT_NEAR(parzen_kernel(0.5 - 1e-9), parzen_kernel(0.5 + 1e-9), 1e-8);
    EXPECT_THROW(parzen_kernel(-0.1), std::invalid_argument);
}

TEST(Kernel, ConstantAndBandwidthOne) {
    EXPECT_NEAR(kParzenCStar, 3.5134, 5e-5);
    const std::vector<double> r{0.01, -0.005, 0.003, 0.002, -0.004};
    const auto k = realized_kernel(r, 0.0, 1e-4);
    EXPECT_EQ(k.bandwidth, 1);
    double g0 = 0;
    double g1 = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        g0 += r[i] * r[i];
        if (i > 0) g1 += r[i] * r[i - 1];
    }
    EXPECT_NEAR(k.rk, g0 + 0.5 * g1, 1e-18);
}

TEST(Kernel, BandwidthFormulaAndClamp) {
    std::vector<double> r(10000, 0.0);
    r[3] = 0.001;
    auto k = realized_kernel(r, 1e-8, 1e-4);
    const double hstar = kParzenCStar * std::pow(1e-4, 0.4) * std::pow(10000.0, 0.6);
    EXPECT_NEAR(k.bandwidth_star, hstar, 1e-12);
    EXPECT_EQ(k.bandwidth, std::lround(hstar));
    k = realized_kernel(std::vector<double>{0.1, 0.2, 0.3}, 1.0, 1e-6);
    EXPECT_EQ(k.bandwidth, 2);
}

TEST(NoiseVariance, Examples) {
    std::vector<double> base(201, 100.0);
    for (std::size_t i = 1; i < base.size(); i += 2) base[i] = 100.5;  // 200 non-zero returns
    std::vector<double> sparse_base(base.begin(), base.begin() + 101);
    const std::vector<double> coarse{1.0, std::exp(0.02)};
    EXPECT_NEAR(noise_variance(sparse_base, coarse), 4e-4 / 200, 1e-20);
    EXPECT_EQ(noise_variance(std::vector<double>(100, 5.0), std::vector<double>(3, 5.0)), 0.0);
    std::vector<double> dbl_base(sparse_base), dbl_coarse(coarse);
    for (auto& v : dbl_base) v *= 2;
    for (auto& v : dbl_coarse) v *= 2;
    EXPECT_NEAR(noise_variance(dbl_base, dbl_coarse), noise_variance(sparse_base, coarse), 1e-20);
}

TEST(NoiseVariance, HundredNonZeroReturns) {
    std::vector<double> base(101);
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = 100.0 + (i % 2 == 0 ? 0.0 : 0.01);
    EXPECT_NEAR(noise_variance(base, std::vector<double>{1.0, std::exp(0.02)}), 2e-6, 1e-20);
}

TEST(SparseIv, MatchesOffsetGridOracle) {
    std::mt19937_64 rng(3);
    const auto s = brownian_day(rng, 1e-4, 2300ms);
    const auto prices = session_prices(s, PriceView::cleaned);
    const auto session = stock_session();
    const auto base = previous_tick_grid(prices, hms(0, 0, 1), session);
    const double fast = sparse_iv(base->prices, 1200, 1200);
    double sum = 0;
    for (int j = 0; j < 1200; ++j) sum += oracle_rv(oracle_grid(prices, session.open + hms(0, 0, j), session.close, hms(0, 20)));
    EXPECT_NEAR(fast, sum / 1200, 1e-14 * fast);
    const double single = sparse_iv(base->prices, 1200, 1);
    EXPECT_NEAR(single, oracle_rv(oracle_grid(prices, session.open, session.close, hms(0, 20))), 1e-15);
}

TEST(SparseIv, LinearLogPriceAndShortSession) {
    // Constant per-second return c: every complete 20-minute return equals 1200c.
    const double c = 1e-6;
    std::vector<double> p(5001);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 50.0 * std::exp(c * static_cast<double>(i));
    double oracle = 0;
    for (std::size_t j = 0; j < 1200; ++j) {
        for (std::size_t i = j + 1200; i < p.size(); i += 1200) oracle += std::pow(std::log(p[i] / p[i - 1200]), 2);
    }
    EXPECT_NEAR(sparse_iv(p, 1200, 1200), oracle / 1200, 1e-14 * oracle / 1200);
    EXPECT_NEAR(sparse_iv(p, 1200, 1200), (5001.0 - 1200.0) * std::pow(1200 * c, 2) / 1200, 1e-15);
    std::vector<double> shortp(p.begin(), p.begin() + 600);
    EXPECT_NEAR(sparse_iv(shortp, 1200, 1200), 599 * c * c, 1e-20);
    EXPECT_EQ(sparse_iv(std::vector<double>(3000, 7.0), 1200, 1200), 0.0);
}

TEST(Jitter, EndpointAverages) {
    const auto j = jitter_endpoints(std::vector<double>{1, 3, 5, 7, 9}, 2);
    EXPECT_EQ(j, (std::vector<double>{2, 3, 5, 7, 8}));
}

TEST(Subsampled, BitIdenticalToIndependentGrids) {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = brownian_day(rng, 1e-4, Millis{700 + static_cast<int>(rng() % 20000)});
        const auto prices = session_prices(s, PriceView::cleaned);
        const auto session = stock_session();
        const auto grids = subsample_grids(prices, session);
        double sum = 0;
        for (int j = 0; j < 5; ++j) sum += oracle_rv(oracle_grid(prices, session.open + hms(0, j), session.close, hms(0, 5)));
        EXPECT_EQ(*subsampled_measure(grids, ReturnMeasure::rv), sum / 5);
    }
}

TEST(Subsampled, DegenerateCases) {
    const auto s = stock_day(std::vector<double>(3000, 20.0), 7000ms);
    const auto grids = subsample_grids(s, stock_session());
    for (auto which : {ReturnMeasure::rv, ReturnMeasure::rq, ReturnMeasure::bv, ReturnMeasure::rsp,
                       ReturnMeasure::rsn, ReturnMeasure::medrv, ReturnMeasure::minrv}) {
        EXPECT_EQ(*subsampled_measure(grids, which), 0.0);
    }
    std::mt19937_64 rng(2);
    const auto b = brownian_day(rng, 1e-4);
    const auto one = subsample_grids(b, stock_session(), PriceView::cleaned, hms(0, 5), hms(0, 1), 1);
    const auto g5 = previous_tick_grid(b, hms(0, 5), stock_session());
    EXPECT_EQ(*subsampled_measure(one, ReturnMeasure::bv), bipower_variation(log_returns(*g5)));
    EXPECT_FALSE(subsampled_measure({}, ReturnMeasure::rv));
}

TEST(DailyRow, ConstantDay) {
    const auto s = stock_day(std::vector<double>(3000, 20.0), 7000ms);
    const auto d = daily_row(s, stock_session());
    ASSERT_TRUE(d);
    EXPECT_EQ(d->open, 20.0);
    EXPECT_EQ(d->high, 20.0);
    EXPECT_EQ(d->low, 20.0);
    EXPECT_EQ(d->close, 20.0);
    for (auto name : measure_names()) EXPECT_EQ(*d->get(name), 0.0) << name;
    EXPECT_EQ(d->volume, 300000);
    EXPECT_EQ(d->trades, 3000);
}

TEST(DailyRow, CloseSkipsOddLots) {
    std::mt19937_64 rng(9);
    auto s = brownian_day(rng, 1e-4, 5000ms);
    const double last_round = s.records[s.size() - 13].price;
    for (std::size_t i = s.size() - 12; i < s.size(); ++i) {
        s.records[i].odd_lot = true;
        s.records[i].volume = 10;
    }
    s.records[0].odd_lot = true;
    const auto d = daily_row(s, stock_session());
    ASSERT_TRUE(d);
    EXPECT_EQ(d->close, last_round);
    EXPECT_EQ(d->open, s.records[1].price);
    double hi = 0;
    double lo = 1e9;
    for (const auto& r : s.records) {
        hi = std::max(hi, r.price);
        lo = std::min(lo, r.price);
    }
    EXPECT_EQ(d->high, hi);
    EXPECT_EQ(d->low, lo);
    EXPECT_GE(d->high, std::max(d->open, d->close));
    EXPECT_LE(d->low, std::min(d->open, d->close));
}

TEST(DailyRow, IdentitiesAndScaleInvariance) {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        auto s = brownian_day(rng, 2e-4, Millis{1000 + static_cast<int>(rng() % 9000)});
        const auto d = *daily_row(s, stock_session());
        EXPECT_NEAR(d.rsp1 + d.rsn1, d.rv1, 1e-12 * d.rv1);
        EXPECT_NEAR(d.rsp5 + d.rsn5, d.rv5, 1e-12 * d.rv5);
        EXPECT_NEAR(d.rsp5_ss + d.rsn5_ss, d.rv5_ss, 1e-12 * d.rv5_ss);
        for (auto& r : s.records) r.price *= 3.7;
        const auto e = *daily_row(s, stock_session());
        for (auto name : measure_names()) EXPECT_NEAR(*d.get(name), *e.get(name), 1e-9 * std::fabs(*d.get(name)) + 1e-18) << name;
    }
}

TEST(DailyRow, IneligibleDay) {
    EXPECT_FALSE(daily_row(stock_day(std::vector<double>(30, 1.0), 60000ms), stock_session()));
    TickSeries empty{"X", ymd(2024, 3, 11), AssetClass::stock, {}};
    EXPECT_FALSE(daily_row(empty, stock_session()));
}

TEST(DailyRow, NameTable) {
    EXPECT_EQ(measure_names().size(), 25u);
    EXPECT_EQ(measure_names().front(), "pr");
    EXPECT_EQ(measure_names().back(), "rk");
    DailyMeasures d;
    EXPECT_TRUE(d.set("medrv5_ss", 1.5));
    EXPECT_EQ(*d.get("medrv5_ss"), 1.5);
    EXPECT_FALSE(d.get("nope"));
    EXPECT_TRUE(is_measure_name("rq5"));
    EXPECT_FALSE(is_measure_name("rq2"));
}

Eigen::MatrixXd random_panel(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n) {
    std::normal_distribution<double> z(0, 1e-3);
    Eigen::MatrixXd r(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = z(rng);
    return r;
}

TEST(Covariance, Examples) {
    Eigen::MatrixXd r(2, 2);
    r << 0.01, 0.02, -0.02, 0.01;
    EXPECT_NEAR(realized_covariance(r)(0, 1), 0.0, 1e-20);
    Eigen::MatrixXd same(3, 2);
    same << 0.01, 0.01, -0.03, -0.03, 0.02, 0.02;
    const auto rc = realized_covariance(same);
    EXPECT_DOUBLE_EQ(rc(0, 0), rc(0, 1));
    EXPECT_DOUBLE_EQ(rc(1, 1), rc(1, 0));
    EXPECT_THROW(realized_covariance(Eigen::MatrixXd(0, 2)), std::invalid_argument);
    EXPECT_FALSE(bipower_covariance(Eigen::MatrixXd::Ones(1, 2)));
    EXPECT_NEAR(std::sqrt(2 / kPi), 0.7979, 5e-5);
}

TEST(Covariance, UnivariateDegeneracyAndDiagonalIdentity) {
    std::mt19937_64 rng(31);
    const auto r = random_panel(rng, 390, 4);
    const auto rc = realized_covariance(r);
    const auto bc = *bipower_covariance(r);
    const auto s = semicovariances(r);
    for (Eigen::Index i = 0; i < 4; ++i) {
        std::vector<double> col(r.col(i).data(), r.col(i).data() + r.rows());
        const auto m = *return_based_measures(col);
        EXPECT_NEAR(rc(i, i), m.rv, 1e-15 * m.rv);
        EXPECT_EQ(bc(i, i), m.bv);
        EXPECT_NEAR(s.pp(i, i), m.rsp, 1e-15 * m.rsp);
        EXPECT_NEAR(s.nn(i, i), m.rsn, 1e-15 * m.rsn);
        EXPECT_EQ(s.pn(i, i), 0.0);
        EXPECT_EQ(s.np(i, i), 0.0);
    }
}

TEST(Covariance, DecompositionSymmetryPsdAndPermutation) {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 30; ++rep) {
        auto r = random_panel(rng, 50 + static_cast<Eigen::Index>(rng() % 400), 2 + static_cast<Eigen::Index>(rng() % 5));
        r(0, 0) = 0.0;
        const auto rc = realized_covariance(r);
        const auto s = semicovariances(r);
        const Eigen::MatrixXd sum = s.pp + s.nn + s.pn + s.np;
        EXPECT_LE((sum - rc).cwiseAbs().maxCoeff(), 1e-12 * rc.cwiseAbs().maxCoeff());
        EXPECT_EQ(s.pn, s.np.transpose());
        EXPECT_EQ(rc, rc.transpose());
        EXPECT_EQ(s.pp, s.pp.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rc);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.pp).eigenvalues().minCoeff(), -1e-12);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.nn).eigenvalues().minCoeff(), -1e-12);

        const Eigen::Index n = r.cols();
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
        perm.setIdentity();
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (Eigen::Index i = 0; i < n; ++i) perm.indices()[i] = idx[static_cast<std::size_t>(i)];
        const Eigen::MatrixXd rp = r * perm.transpose();
        const auto sp = semicovariances(rp);
        const Eigen::MatrixXd P = perm;
        EXPECT_LE((realized_covariance(rp) - P * rc * P.transpose()).cwiseAbs().maxCoeff(), 1e-18);
        EXPECT_LE((*bipower_covariance(rp) - P * *bipower_covariance(r) * P.transpose()).cwiseAbs().maxCoeff(), 1e-18);
        EXPECT_LE((sp.pn - P * s.pn * P.transpose()).cwiseAbs().maxCoeff(), 1e-18);
    }
}

TEST(Covariance, AllPositiveReturns) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(10, 3, 0.001);
    r(4, 1) = 0.003;
    const auto s = semicovariances(r);
    EXPECT_EQ(s.nn.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.pn.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.np.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.pp, realized_covariance(r));
}

TEST(Covariance, IndependentColumnsBipowerNearZero) {
    std::mt19937_64 rng(33);
    double mean_off = 0;
    double mean_diag = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto bc = *bipower_covariance(random_panel(rng, 390, 2));
        mean_off += bc(0, 1) / reps;
        mean_diag += bc(0, 0) / reps;
    }
    EXPECT_LT(std::fabs(mean_off), 0.05 * mean_diag);
}

TEST(Covariance, SetAndCsv) {
    SynchronizedPanel panel;
    panel.date = ymd(2024, 3, 11);
    panel.symbols = {"A", "B"};
    panel.returns.resize(3, 2);
    panel.returns << 0.01, -0.01, 0.02, 0.0, -0.01, 0.01;
    const auto set = covariance_set(panel);
    EXPECT_EQ(set.rscov_mp, semicovariances(panel.returns).pn);
    std::ostringstream out;
    const std::vector<CovarianceSet> days{set};
    write_covariance_csv(out, days);
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "date,asset_i,asset_j,measure,value");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 6 * 4);
    EXPECT_NE(text.find("2024-03-11,A,B,rcov,"), std::string::npos);
}

}  // namespace
}  // namespace rvkit
