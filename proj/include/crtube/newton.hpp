#pragma once

#include "crtube/error.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace crtube {

struct NewtonOptions
{
    double tolerance = 1e-12;  ///< absolute bound on |F| at the returned root
    int max_iterations = 50;
    double min_slope = 1e-10;  ///< |F'| below this raises SingularJacobian
    int max_halvings = 30;
};

/// Damped scalar Newton iteration. `fn(x)` returns the pair (F(x), F'(x)).
/// A step is halved until |F| decreases; the trace of iterates is attached to
/// NewtonNoConvergence.
template <class Fn>
double newton_solve(Fn&& fn, double x0, const NewtonOptions& opts = {})
{
    std::vector<double> trace{x0};
    double x = x0;
    auto [f, df] = fn(x);
    for (int it = 0; it <= opts.max_iterations; ++it) {
        if (std::abs(f) <= opts.tolerance) {
            return x;
        }
        if (it == opts.max_iterations) {
            break;
        }
        if (!(std::abs(df) >= opts.min_slope)) {
            throw SingularJacobian("|F'(" + std::to_string(x) + ")| = " + std::to_string(std::abs(df)));
        }
        // a trial point outside the function's domain counts as a non-decrease
        auto probe = [&](double at) -> std::pair<double, double> {
            try {
                return fn(at);
            } catch (const DomainError&) {
                return {INFINITY, 0.0};
            }
        };
        double step = f / df;
        double candidate = x - step;
        auto next = probe(candidate);
        for (int h = 0; h < opts.max_halvings && !(std::abs(next.first) < std::abs(f)); ++h) {
            step *= 0.5;
            candidate = x - step;
            next = probe(candidate);
        }
        if (!std::isfinite(next.first)) {
            break;
        }
        if (candidate == x) {
            // no representable progress left; accept if within a few ulps of the bound
            if (std::abs(f) <= 16.0 * opts.tolerance) {
                return x;
            }
            break;
        }
        x = candidate;
        f = next.first;
        df = next.second;
        trace.push_back(x);
    }
    throw NewtonNoConvergence(std::move(trace), "residual " + std::to_string(std::abs(f)) + " above "
                                                    + std::to_string(opts.tolerance));
}

} // namespace crtube
