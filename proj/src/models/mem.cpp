#include "rvkit/models/mem.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/diagnostics.hpp"
#include "rvkit/models/optimizer.hpp"

namespace rvkit {

namespace {

// Positions of each coefficient in theta; -1 when the family lacks it.
struct Layout {
    int omega = 0;
    int alpha1 = 1;
    int alpha2 = -1;
    int beta1 = 2;
    int gamma1 = -1;
    int size = 3;
};

Layout layout(ModelFamily f) {
    switch (f) {
        case ModelFamily::mem11: return {0, 1, -1, 2, -1, 3};
        case ModelFamily::amem11: return {0, 1, -1, 2, 3, 4};
        case ModelFamily::amem21: return {0, 1, 2, 3, 4, 5};
        default: throw std::invalid_argument("not a MEM family");
    }
}

double at(const Eigen::VectorXd& th, int i) { return i < 0 ? 0.0 : th(i); }

void check_size(ModelFamily f, const Eigen::VectorXd& th) {
    if (th.size() != layout(f).size) throw std::invalid_argument("MEM parameter vector has the wrong length");
}

}  // namespace

std::vector<std::string> mem_param_names(ModelFamily family) {
    switch (family) {
        case ModelFamily::mem11: return {"omega", "alpha1", "beta1"};
        case ModelFamily::amem11: return {"omega", "alpha1", "beta1", "gamma1"};
        case ModelFamily::amem21: return {"omega", "alpha1", "alpha2", "beta1", "gamma1"};
        default: throw std::invalid_argument("not a MEM family");
    }
}

double mem_persistence(ModelFamily family, const Eigen::VectorXd& theta) {
    const auto l = layout(family);
    check_size(family, theta);
    return at(theta, l.alpha1) + at(theta, l.alpha2) + at(theta, l.beta1) + 0.5 * at(theta, l.gamma1);
}

Eigen::VectorXd mem_constraints(ModelFamily family, const Eigen::VectorXd& th) {
    const auto l = layout(family);
    check_size(family, th);
    const double w = th(l.omega), a1 = th(l.alpha1), b = th(l.beta1);
    const double pers = mem_persistence(family, th);
    switch (family) {
        case ModelFamily::mem11: {
            Eigen::VectorXd c(5);
            c << w - kOmegaFloor, a1, b, kPersistenceCap - b, kPersistenceCap - pers;
            return c;
        }
        case ModelFamily::amem11: {
            Eigen::VectorXd c(6);
            c << w - kOmegaFloor, a1, th(l.gamma1), b, kPersistenceCap - b, kPersistenceCap - pers;
            return c;
        }
        default: {
            const double a2 = th(l.alpha2), g = th(l.gamma1);
            Eigen::VectorXd c(8);
            c << w - kOmegaFloor, a1, a1 + g, b, kPersistenceCap - b, a2 + a1 * b, a2 + (a1 + g) * b,
                kPersistenceCap - pers;
            return c;
        }
    }
}

Eigen::MatrixXd mem_constraint_jacobian(ModelFamily family, const Eigen::VectorXd& th) {
    const auto l = layout(family);
    check_size(family, th);
    const int n = l.size;
    Eigen::RowVectorXd pers = Eigen::RowVectorXd::Zero(n);
    pers(l.alpha1) = 1.0;
    pers(l.beta1) = 1.0;
    if (l.alpha2 >= 0) pers(l.alpha2) = 1.0;
    if (l.gamma1 >= 0) pers(l.gamma1) = 0.5;
    auto unit = [n](int i, double v = 1.0) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
        r(i) = v;
        return r;
    };
    std::vector<Eigen::RowVectorXd> rows;
    rows.push_back(unit(l.omega));
    rows.push_back(unit(l.alpha1));
    if (family == ModelFamily::amem11) rows.push_back(unit(l.gamma1));
    if (family == ModelFamily::amem21) {
        Eigen::RowVectorXd r = unit(l.alpha1);
        r(l.gamma1) = 1.0;
        rows.push_back(r);
    }
    rows.push_back(unit(l.beta1));
    rows.push_back(unit(l.beta1, -1.0));
    if (family == ModelFamily::amem21) {
        const double a1 = th(l.alpha1), b = th(l.beta1), g = th(l.gamma1);
        Eigen::RowVectorXd r1 = unit(l.alpha2);
        r1(l.alpha1) = b;
        r1(l.beta1) = a1;
        rows.push_back(r1);
        Eigen::RowVectorXd r2 = unit(l.alpha2);
        r2(l.alpha1) = b;
        r2(l.gamma1) = b;
        r2(l.beta1) = a1 + g;
        rows.push_back(r2);
    }
    rows.push_back(-pers);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) jac.row(static_cast<Eigen::Index>(i)) = rows[i];
    return jac;
}

bool mem_admissible(ModelFamily family, const Eigen::VectorXd& theta, double tol) {
    const Eigen::VectorXd c = mem_constraints(family, theta);
    // omega > 0 and persistence < 1 are strict; the floor and cap already sit inside them.
    return (c.array() >= -tol).all() && theta(0) > 0.0 && mem_persistence(family, theta) < 1.0;
}

MemPath mem_filter(ModelFamily family, const Eigen::VectorXd& th, std::span<const double> y,
                   const std::vector<bool>& negative, double presample_y, bool with_gradient) {
    const auto l = layout(family);
    check_size(family, th);
    const bool asym = l.gamma1 >= 0;
    if (asym && negative.size() < y.size()) {
        throw std::invalid_argument("mem_filter: asymmetric models need a return sign for every observation");
    }
    const double w = th(l.omega), a1 = th(l.alpha1), a2 = at(th, l.alpha2), b = th(l.beta1), g = at(th, l.gamma1);
    const double denom = 1.0 - mem_persistence(family, th);
    if (!(denom > 0.0)) throw NumericalError("mem_filter: persistence must be below 1");

    MemPath path;
    const std::size_t n = y.size();
    path.mu.resize(n);
    if (with_gradient) path.dmu = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), l.size);
    if (n == 0) return path;

    path.mu[0] = w / denom;
    if (with_gradient) {
        const double d2 = w / (denom * denom);
        path.dmu(0, l.omega) = 1.0 / denom;
        path.dmu(0, l.alpha1) = d2;
        path.dmu(0, l.beta1) = d2;
        if (l.alpha2 >= 0) path.dmu(0, l.alpha2) = d2;
        if (l.gamma1 >= 0) path.dmu(0, l.gamma1) = 0.5 * d2;
    }
    for (std::size_t t = 1; t < n; ++t) {
        const double y1 = y[t - 1];
        const double y2 = t >= 2 ? y[t - 2] : presample_y;
        const double yneg = asym && negative[t - 1] ? y1 : 0.0;
        const double mu_prev = path.mu[t - 1];
        path.mu[t] = w + a1 * y1 + a2 * y2 + b * mu_prev + g * yneg;
        if (with_gradient) {
            const auto ti = static_cast<Eigen::Index>(t);
            path.dmu.row(ti) = b * path.dmu.row(ti - 1);
            path.dmu(ti, l.omega) += 1.0;
            path.dmu(ti, l.alpha1) += y1;
            path.dmu(ti, l.beta1) += mu_prev;
            if (l.alpha2 >= 0) path.dmu(ti, l.alpha2) += y2;
            if (l.gamma1 >= 0) path.dmu(ti, l.gamma1) += yneg;
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (!(path.mu[t] > 0.0)) {
            throw NumericalError("mem_filter: non-positive conditional mean at t=" + std::to_string(t));
        }
    }
    return path;
}

double mem_loglik(ModelFamily family, const Eigen::VectorXd& theta, std::span<const double> y,
                  const std::vector<bool>& negative, double presample_y, Eigen::VectorXd* grad) {
    MemPath path;
    try {
        path = mem_filter(family, theta, y, negative, presample_y, grad != nullptr);
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
    double ll = 0.0;
    if (grad != nullptr) grad->setZero(theta.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double eps = y[t] / path.mu[t];
        ll += std::log(eps) - eps + 1.0;
        if (grad != nullptr) *grad += ((eps - 1.0) / path.mu[t]) * path.dmu.row(static_cast<Eigen::Index>(t)).transpose();
    }
    return ll;
}

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

Eigen::VectorXd start_values(ModelFamily family, double ybar, double alpha1, double beta1,
                             const std::vector<std::optional<double>>& pins) {
    const auto l = layout(family);
    Eigen::VectorXd th = Eigen::VectorXd::Zero(l.size);
    th(l.alpha1) = alpha1;
    th(l.beta1) = beta1;
    for (int i = 0; i < l.size; ++i) {
        if (pins[static_cast<std::size_t>(i)]) th(i) = *pins[static_cast<std::size_t>(i)];
    }
    if (!pins[static_cast<std::size_t>(l.omega)]) th(l.omega) = ybar * (1.0 - mem_persistence(family, th));
    return th;
}

struct Problem {
    ModelFamily family;
    std::span<const double> y;
    const std::vector<bool>* negative;
    double presample;
    std::vector<int> free;
    Eigen::VectorXd base;
    std::vector<int> rows;  // constraints that involve a free parameter

    Eigen::VectorXd expand(const Eigen::VectorXd& x) const {
        Eigen::VectorXd th = base;
        for (std::size_t i = 0; i < free.size(); ++i) th(free[i]) = x(static_cast<Eigen::Index>(i));
        return th;
    }
    Eigen::VectorXd shrink(const Eigen::VectorXd& th) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(free.size()));
        for (std::size_t i = 0; i < free.size(); ++i) x(static_cast<Eigen::Index>(i)) = th(free[i]);
        return x;
    }
};

// Expected information (1/T) sum mu^-2 dmu dmu' on the free block, used as the first Hessian model.
Eigen::MatrixXd information(const Problem& p, const Eigen::VectorXd& th) {
    const auto path = mem_filter(p.family, th, p.y, *p.negative, p.presample, true);
    const auto k = static_cast<Eigen::Index>(p.free.size());
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index t = 0; t < path.dmu.rows(); ++t) {
        Eigen::VectorXd d(k);
        for (Eigen::Index i = 0; i < k; ++i) d(i) = path.dmu(t, p.free[static_cast<std::size_t>(i)]);
        info += d * d.transpose() / (path.mu[static_cast<std::size_t>(t)] * path.mu[static_cast<std::size_t>(t)]);
    }
    return info;
}

SqpResult run(const Problem& p, const Eigen::VectorXd& th0, const MemFitOptions& opt) {
    const double n = static_cast<double>(p.y.size());
    SmoothObjective f = [&p, n](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        Eigen::VectorXd full(p.base.size());
        const double ll = mem_loglik(p.family, p.expand(x), p.y, *p.negative, p.presample, &full);
        if (!std::isfinite(ll)) return std::numeric_limits<double>::infinity();
        g = -p.shrink(full) / n;
        return -ll / n;
    };
    ConstraintSet c;
    c.value = [&p](const Eigen::VectorXd& x) {
        const Eigen::VectorXd all = mem_constraints(p.family, p.expand(x));
        Eigen::VectorXd out(static_cast<Eigen::Index>(p.rows.size()));
        for (std::size_t i = 0; i < p.rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = all(p.rows[i]);
        return out;
    };
    c.jacobian = [&p](const Eigen::VectorXd& x) {
        const Eigen::MatrixXd all = mem_constraint_jacobian(p.family, p.expand(x));
        Eigen::MatrixXd out(static_cast<Eigen::Index>(p.rows.size()), static_cast<Eigen::Index>(p.free.size()));
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
            for (std::size_t j = 0; j < p.free.size(); ++j) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = all(p.rows[i], p.free[j]);
            }
        }
        return out;
    };
    Eigen::MatrixXd b0 = information(p, th0) / n;
    const double ridge = 1e-10 * std::max(b0.trace() / static_cast<double>(b0.rows()), 1e-12);
    b0.diagonal().array() += ridge;
    SqpOptions so;
    so.max_iterations = opt.max_iterations;
    so.rel_tolerance = opt.rel_tolerance;
    return sqp_minimize(f, c, p.shrink(th0), b0, so);
}

}  // namespace

ModelFit fit_mem_unchecked(const ModelData& data, ModelFamily family, const std::string& measure,
                           const MemFitOptions& opt) {
    const auto l = layout(family);
    const std::span<const double> y(data.y);
    if (y.size() < static_cast<std::size_t>(kDiagnosticLags) + 2) {
        throw InsufficientDataError("fit_mem: series too short");
    }
    for (double v : y) {
        if (v == 0.0) {
            throw std::invalid_argument(
                "fit_mem: the series contains zeros; choose a strictly positive measure or floor it before fitting");
        }
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("fit_mem: the series must be positive and finite");
    }
    const bool asym = l.gamma1 >= 0;
    if (asym && data.negative.size() < y.size()) {
        throw std::invalid_argument("fit_mem: asymmetric models need return signs aligned with y");
    }
    std::vector<std::optional<double>> pins = opt.pins;
    pins.resize(static_cast<std::size_t>(l.size));

    Problem p{family, y, &data.negative, mean_of(y), {}, {}, {}};
    for (int i = 0; i < l.size; ++i) {
        if (!pins[static_cast<std::size_t>(i)]) p.free.push_back(i);
    }
    if (p.free.empty()) throw std::invalid_argument("fit_mem: every parameter is pinned");
    const Eigen::MatrixXd jac_shape = mem_constraint_jacobian(family, Eigen::VectorXd::Constant(l.size, 0.3));
    for (Eigen::Index r = 0; r < jac_shape.rows(); ++r) {
        bool involves = false;
        for (int j : p.free) involves = involves || jac_shape(r, j) != 0.0;
        if (involves) p.rows.push_back(static_cast<int>(r));
    }

    Eigen::VectorXd th0 = opt.start ? *opt.start : start_values(family, p.presample, 0.1, 0.6, pins);
    for (int i = 0; i < l.size; ++i) {
        if (pins[static_cast<std::size_t>(i)]) th0(i) = *pins[static_cast<std::size_t>(i)];
    }
    if (!mem_admissible(family, th0)) throw std::invalid_argument("fit_mem: starting values are not admissible");
    p.base = th0;

    bool retried = false;
    SqpResult res = run(p, th0, opt);
    if (!res.converged) {
        spdlog::warn("{} fit did not converge ({}); retrying from a perturbed start", to_string(family), res.message);
        std::mt19937 rng(opt.retry_seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::VectorXd th1 = start_values(family, p.presample, 0.05 + 0.25 * u(rng), 0.3 + 0.5 * u(rng), pins);
        if (!mem_admissible(family, th1)) th1 = th0;
        p.base = th1;
        res = run(p, th1, opt);
        retried = true;
        if (!res.converged) {
            throw NumericalError(std::string("MEM estimation did not converge after a perturbed restart: ") + res.message);
        }
    }

    // The relative-change stop can fire on the flat omega-beta ridge before the BFGS model has
    // learned its curvature; restart from the solution with the information matrix there.
    for (int polish = 0; polish < 5; ++polish) {
        p.base = p.expand(res.x);
        SqpResult again = run(p, p.base, opt);
        if (!again.converged || !(again.f < res.f)) break;
        const double gain = (res.f - again.f) * static_cast<double>(y.size());
        again.iterations += res.iterations;
        res = std::move(again);
        if (gain < 1e-8) break;
    }

    Eigen::VectorXd th = p.expand(res.x);
    // Snap rounding-level violations of simple bounds back onto the bound.
    for (int i : {l.alpha1, l.beta1, l.gamma1}) {
        if (i >= 0 && !(family == ModelFamily::amem21 && i == l.gamma1) && th(i) < 0.0 && th(i) > -1e-10) th(i) = 0.0;
    }
    if (!mem_admissible(family, th, 1e-10)) throw NumericalError("fit_mem: estimate violates the parameter constraints");

    const auto path = mem_filter(family, th, y, data.negative, p.presample, true);
    ModelFit fit;
    fit.spec = {family, measure};
    fit.param_names = mem_param_names(family);
    fit.params = th;
    fit.n_obs = y.size();
    fit.iterations = res.iterations;
    fit.retried = retried;
    fit.y_mean = p.presample;
    fit.pinned.resize(static_cast<std::size_t>(l.size));
    for (int i = 0; i < l.size; ++i) fit.pinned[static_cast<std::size_t>(i)] = pins[static_cast<std::size_t>(i)].has_value();

    double ll = 0.0;
    double s2 = 0.0;
    fit.residuals.resize(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double eps = y[t] / path.mu[t];
        ll += std::log(eps) - eps + 1.0;
        fit.residuals[t] = eps - 1.0;
        s2 += (eps - 1.0) * (eps - 1.0);
    }
    s2 /= static_cast<double>(y.size());
    fit.loglik = ll;
    fit.sigma2_hat = s2;
    fit.fitted = path.mu;
    fit.fitted_offset = 0;

    p.base = th;
    const Eigen::MatrixXd info = information(p, th);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    fit.covariance = Eigen::MatrixXd::Constant(l.size, l.size, NAN);
    fit.std_errors = Eigen::VectorXd::Constant(l.size, NAN);
    fit.z_stats = Eigen::VectorXd::Constant(l.size, NAN);
    fit.p_values = Eigen::VectorXd::Constant(l.size, NAN);
    if (lu.isInvertible()) {
        const Eigen::MatrixXd v = s2 * lu.inverse();
        for (std::size_t i = 0; i < p.free.size(); ++i) {
            for (std::size_t j = 0; j < p.free.size(); ++j) {
                fit.covariance(p.free[i], p.free[j]) = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            const int k = p.free[i];
            fit.std_errors(k) = std::sqrt(std::max(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)), 0.0));
            fit.z_stats(k) = th(k) / fit.std_errors(k);
            fit.p_values(k) = normal_two_sided_p(fit.z_stats(k));
        }
    } else {
        spdlog::warn("{} fit: information matrix is singular; standard errors unavailable", to_string(family));
    }
    fit.diagnostics = diagnostics(fit.residuals);
    return fit;
}

ModelFit fit_mem(const ModelData& data, ModelFamily family, const std::string& measure, const MemFitOptions& opt) {
    if (data.y.size() < kMinEstimationObs) {
        throw InsufficientDataError("estimation requires at least " + std::to_string(kMinEstimationObs) +
                                    " observations, got " + std::to_string(data.y.size()));
    }
    return fit_mem_unchecked(data, family, measure, opt);
}

}  // namespace rvkit
