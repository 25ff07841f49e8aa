#include "lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace gbnn::detail {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool all_finite(std::span<const double> v) {
    return std::ranges::all_of(v, [](double x) { return std::isfinite(x); });
}

struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

struct Trial {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

class LineSearch {
public:
    LineSearch(const Objective& f, std::span<const double> x, std::span<const double> d,
               double f0, double slope0, std::size_t max_evals)
        : f_(f), x_(x), d_(d), f0_(f0), slope0_(slope0), max_evals_(max_evals) {}

    std::size_t evaluations() const { return evals_; }

    /// Returns true and fills `out` with a step satisfying the strong Wolfe
    /// conditions, or at least sufficient decrease when the budget runs out.
    bool run(double alpha0, Trial& out) {
        Trial prev{0.0, f0_, slope0_, {}, {}};
        double alpha = alpha0;
        for (std::size_t i = 0; evals_ < max_evals_; ++i) {
            Trial cur = evaluate(alpha);
            if (!std::isfinite(cur.value)) {
                // Overshot into a non-finite region; retreat towards prev.
                alpha = prev.alpha + 0.25 * (alpha - prev.alpha);
                continue;
            }
            if (cur.value > f0_ + kArmijo * alpha * slope0_ || (i > 0 && cur.value >= prev.value)) {
                return zoom(std::move(prev), std::move(cur), out);
            }
            if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev), out);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return accept_if_decrease(prev, out);
    }

private:
    Trial evaluate(double alpha) {
        ++evals_;
        Trial t;
        t.alpha = alpha;
        t.x.resize(x_.size());
        t.g.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) t.x[i] = x_[i] + alpha * d_[i];
        t.value = f_(t.x, t.g);
        if (!all_finite(t.g)) t.value = std::numeric_limits<double>::infinity();
        t.slope = std::isfinite(t.value) ? dot(t.g, d_) : 0.0;
        return t;
    }

    bool accept_if_decrease(Trial& candidate, Trial& out) {
        if (candidate.alpha > 0.0 && candidate.value < f0_) {
            out = std::move(candidate);
            return true;
        }
        return false;
    }

    bool zoom(Trial lo, Trial hi, Trial& out) {
        while (evals_ < max_evals_) {
            const double width = hi.alpha - lo.alpha;
            // Minimizer of the quadratic through lo (value, slope) and hi (value),
            // kept away from the bracket ends.
            double alpha = lo.alpha + 0.5 * width;
            const double denom = 2.0 * (hi.value - lo.value - lo.slope * width);
            if (std::isfinite(hi.value) && denom > 0.0) {
                const double step = -lo.slope * width * width / denom;
                const double lo_edge = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(width);
                const double hi_edge = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(width);
                alpha = std::clamp(lo.alpha + step, lo_edge, hi_edge);
            }
            if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;

            Trial cur = evaluate(alpha);
            if (!std::isfinite(cur.value) || cur.value > f0_ + kArmijo * alpha * slope0_ ||
                cur.value >= lo.value) {
                hi = std::move(cur);
                continue;
            }
            if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
            lo = std::move(cur);
        }
        return accept_if_decrease(lo, out);
    }

    const Objective& f_;
    std::span<const double> x_;
    std::span<const double> d_;
    double f0_;
    double slope0_;
    std::size_t max_evals_;
    std::size_t evals_ = 0;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options) {
    const std::size_t n = x0.size();
    LbfgsResult result;
    result.x = std::move(x0);

    std::vector<double> g(n);
    double fx = f(result.x, g);
    result.evaluations = 1;
    result.initial_value = fx;
    result.value = fx;
    if (!std::isfinite(fx) || !all_finite(g)) {
        result.finite = false;
        return result;
    }

    std::deque<Pair> memory;
    std::vector<double> d(n);
    std::vector<double> alpha_buf;
    std::size_t small_steps = 0;

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const double gnorm = std::sqrt(dot(g, g));
        if (gnorm <= 1e-14) break;

        // Two-loop recursion: d = -H g.
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        alpha_buf.assign(memory.size(), 0.0);
        for (std::size_t k = memory.size(); k-- > 0;) {
            const Pair& p = memory[k];
            alpha_buf[k] = p.rho * dot(p.s, d);
            for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * p.y[i];
        }
        if (!memory.empty()) {
            const Pair& last = memory.back();
            const double gamma = 1.0 / (last.rho * dot(last.y, last.y));
            for (double& v : d) v *= gamma;
        }
        for (std::size_t k = 0; k < memory.size(); ++k) {
            const Pair& p = memory[k];
            const double beta = p.rho * dot(p.y, d);
            for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * p.s[i];
        }

        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            memory.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -gnorm * gnorm;
        }
        const double alpha0 = memory.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

        LineSearch search(f, result.x, d, fx, slope, options.max_line_search);
        Trial step;
        const bool ok = search.run(alpha0, step);
        result.evaluations += search.evaluations();
        if (!ok) break;

        Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            pair.s[i] = step.x[i] - result.x[i];
            pair.y[i] = step.g[i] - g[i];
        }
        const double sy = dot(pair.s, pair.y);
        if (sy > 1e-12 * dot(pair.y, pair.y) && sy > 0.0) {
            pair.rho = 1.0 / sy;
            memory.push_back(std::move(pair));
            if (memory.size() > options.history) memory.pop_front();
        }

        const double improvement = fx - step.value;
        const double scale = std::max(std::abs(fx), std::numeric_limits<double>::min());
        result.x = std::move(step.x);
        g = std::move(step.g);
        fx = step.value;
        result.value = fx;
        result.iterations = iter + 1;

        if (improvement < options.tolerance * scale) {
            if (++small_steps >= 2) break;
        } else {
            small_steps = 0;
        }
    }
    return result;
}

}  // namespace gbnn::detail
