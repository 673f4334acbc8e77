#include "rvkit/models/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rvkit {

namespace {

// Calls `visit` with every subset of {0..m-1} of size <= limit, smallest subsets first.
template <class Visit>
bool for_each_subset(int m, int limit, Visit&& visit) {
    std::vector<int> idx;
    for (int size = 0; size <= limit; ++size) {
        idx.resize(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            if (visit(idx)) return true;
            int k = size - 1;
            while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - size + k) --k;
            if (k < 0) break;
            ++idx[static_cast<std::size_t>(k)];
            for (int j = k + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return false;
}

}  // namespace

bool solve_small_qp(const Eigen::MatrixXd& b, const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                    const Eigen::VectorXd& rhs, Eigen::VectorXd& d, Eigen::VectorXd& lambda) {
    const auto n = static_cast<int>(g.size());
    const auto m = static_cast<int>(a.rows());
    const double scale = m > 0 ? 1.0 + rhs.cwiseAbs().maxCoeff() : 1.0;
    const int limit = std::min(n, m);
    return for_each_subset(m, limit, [&](const std::vector<int>& act) {
        const auto k = static_cast<int>(act.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
        Eigen::VectorXd r(n + k);
        kkt.topLeftCorner(n, n) = b;
        r.head(n) = -g;
        for (int i = 0; i < k; ++i) {
            const auto row = a.row(act[static_cast<std::size_t>(i)]);
            kkt.block(n + i, 0, 1, n) = row;
            kkt.block(0, n + i, n, 1) = -row.transpose();
            r(n + i) = rhs(act[static_cast<std::size_t>(i)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) return false;
        const Eigen::VectorXd sol = lu.solve(r);
        const Eigen::VectorXd dd = sol.head(n);
        for (int i = 0; i < k; ++i) {
            if (sol(n + i) < -1e-12) return false;
        }
        if (m > 0 && ((a * dd - rhs).array() < -1e-10 * scale).any()) return false;
        d = dd;
        lambda = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < k; ++i) lambda(act[static_cast<std::size_t>(i)]) = sol(n + i);
        return true;
    });
}

SqpResult sqp_minimize(const SmoothObjective& f, const ConstraintSet& c, Eigen::VectorXd x0,
                       const Eigen::MatrixXd& b0, const SqpOptions& opt) {
    SqpResult res;
    const auto n = x0.size();
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd g(n);
    double fx = f(x, g);
    if (!std::isfinite(fx)) {
        res.x = x;
        res.f = fx;
        res.message = "objective is not finite at the starting point";
        return res;
    }
    if ((c.value(x).array() < -opt.feasibility_tolerance).any()) {
        res.x = x;
        res.f = fx;
        res.message = "starting point violates the constraints";
        return res;
    }
    Eigen::MatrixXd bmat = b0;
    bool fresh_b = true;
    bool small_last = false;
    Eigen::VectorXd lambda;

    for (int it = 1; it <= opt.max_iterations; ++it) {
        res.iterations = it;
        const Eigen::VectorXd cv = c.value(x);
        const Eigen::MatrixXd jac = c.jacobian(x);
        Eigen::VectorXd d;
        if (!solve_small_qp(bmat, g, jac, -cv, d, lambda)) {
            res.message = "quadratic subproblem has no solution";
            break;
        }
        if (d.norm() <= 1e-12 * (1.0 + x.norm())) {
            res.converged = true;
            res.message = "step below tolerance";
            break;
        }
        const double slope = g.dot(d);
        double t = 1.0;
        Eigen::VectorXd xt;
        Eigen::VectorXd gt(n);
        double ft = std::numeric_limits<double>::infinity();
        bool accepted = false;
        while (t > 1e-12) {
            xt = x + t * d;
            if (!(c.value(xt).array() < -opt.feasibility_tolerance).any()) {
                ft = f(xt, gt);
                if (std::isfinite(ft) && ft <= fx + 1e-4 * t * std::min(slope, 0.0)) {
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!fresh_b) {
                bmat = b0;
                fresh_b = true;
                continue;
            }
            res.message = "line search failed";
            break;
        }

        const Eigen::VectorXd s = xt - x;
        const Eigen::VectorXd yv = (gt - c.jacobian(xt).transpose() * lambda) - (g - jac.transpose() * lambda);
        const Eigen::VectorXd bs = bmat * s;
        const double sbs = s.dot(bs);
        const double sy = s.dot(yv);
        if (sbs > 0.0) {
            Eigen::VectorXd r = yv;
            if (sy < 0.2 * sbs) {
                const double theta = 0.8 * sbs / (sbs - sy);
                r = theta * yv + (1.0 - theta) * bs;
            }
            const double sr = s.dot(r);
            if (sr > 0.0) {
                bmat += r * r.transpose() / sr - bs * bs.transpose() / sbs;
                bmat = (bmat + bmat.transpose()) / 2.0;
                fresh_b = false;
            }
        }

        const double rel = std::fabs(ft - fx) / std::max(std::fabs(fx), 1e-12);
        x = xt;
        fx = ft;
        g = gt;
        const bool small = rel < opt.rel_tolerance;
        if (small && (t == 1.0 || small_last)) {
            res.converged = true;
            res.message = "relative change below tolerance";
            break;
        }
        small_last = small;
    }
    if (!res.converged && res.message.empty()) res.message = "iteration limit reached";
    res.x = x;
    res.f = fx;
    res.lambda = lambda.size() == 0 ? Eigen::VectorXd::Zero(c.value(x).size()) : lambda;
    return res;
}

}  // namespace rvkit
