#pragma once

// Seeded invariant checks for the jet kernel, the expression language and the
// conic solutions, runnable from the command line.

#include "crtube/conic.hpp"
#include "crtube/expr.hpp"
#include "crtube/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace crtube {

struct SelftestResult
{
    int checks = 0;
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
};

namespace detail {

class selftest_runner
{
public:
    explicit selftest_runner(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    void expect_close(const std::string& what, double got, double want, double rel)
    {
        ++result_.checks;
        const double err = std::abs(got - want);
        if (!(err <= rel * std::max(1.0, std::abs(want)))) {
            result_.failures.push_back(what + ": got " + std::to_string(got) + ", expected "
                                       + std::to_string(want));
        }
    }

    void expect(const std::string& what, bool ok)
    {
        ++result_.checks;
        if (!ok) {
            result_.failures.push_back(what);
        }
    }

    SelftestResult take() { return std::move(result_); }

private:
    std::mt19937_64 rng_;
    SelftestResult result_;
};

inline void selftest_jet(selftest_runner& t)
{
    for (int trial = 0; trial < 20; ++trial) {
        std::array<double, Jet1::size> a{}, b{};
        for (auto& x : a) x = t.uniform(-1.0, 1.0);
        for (auto& x : b) x = t.uniform(-1.0, 1.0);
        b[0] = t.uniform(1.0, 2.0);
        const Jet1 f(a), g(b);

        // truncated polynomial product
        const Jet1 prod = f * g;
        for (int k = 0; k <= jet_max_order; ++k) {
            double want = 0.0;
            for (int i = 0; i <= k; ++i) {
                want += a[i] * b[k - i];
            }
            t.expect_close("polynomial product coefficient " + std::to_string(k), prod.coeff(k), want, 1e-13);
        }

        // Leibniz rule at order 3
        double leibniz = 0.0;
        const int binom3[] = {1, 3, 3, 1};
        for (int i = 0; i <= 3; ++i) {
            leibniz += binom3[i] * f.derivative(i) * g.derivative(3 - i);
        }
        t.expect_close("Leibniz order 3", prod.derivative(3), leibniz, 1e-12);

        // division undoes multiplication
        const Jet1 back = prod / g;
        for (int k = 0; k <= jet_max_order; ++k) {
            t.expect_close("div(mul(f, g), g) coefficient " + std::to_string(k), back.coeff(k), a[k], 1e-12);
        }
    }

    // closed-form derivatives of order 4 and 5
    for (int trial = 0; trial < 10; ++trial) {
        const double x0 = t.uniform(0.2, 1.5);
        const Jet1 x = Jet1::variable(x0);
        const Jet1 e = exp(x);
        t.expect_close("exp order 5", e.derivative(5), std::exp(x0), 1e-10);
        const Jet1 l = log(x);
        t.expect_close("log order 4", l.derivative(4), -6.0 / std::pow(x0, 4), 1e-10);
        t.expect_close("log order 5", l.derivative(5), 24.0 / std::pow(x0, 5), 1e-10);
        const Jet1 r = 1.0 / (1.0 + x);
        t.expect_close("rational order 5", r.derivative(5), -120.0 / std::pow(1.0 + x0, 6), 1e-10);
    }

    // central differences against orders <= 3, Richardson-extrapolated
    const auto f = [](double x) { return std::exp(std::sin(x)) / (2.0 + x * x); };
    for (int trial = 0; trial < 5; ++trial) {
        const double x0 = t.uniform(-1.0, 1.0);
        const Jet1 xj = Jet1::variable(x0);
        const Jet1 fj = exp(sin(xj)) / (2.0 + xj * xj);
        const auto d1 = [&](double h) { return (f(x0 + h) - f(x0 - h)) / (2 * h); };
        const auto d2 = [&](double h) { return (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h); };
        const auto d3 = [&](double h) {
            return (f(x0 + 2 * h) - 2 * f(x0 + h) + 2 * f(x0 - h) - f(x0 - 2 * h)) / (2 * h * h * h);
        };
        const double h = 1e-3;
        t.expect_close("FD order 1", fj.derivative(1), (4 * d1(h / 2) - d1(h)) / 3, 1e-5);
        t.expect_close("FD order 2", fj.derivative(2), (4 * d2(h / 2) - d2(h)) / 3, 1e-5);
        const double h3 = 1e-2;
        t.expect_close("FD order 3", fj.derivative(3), (4 * d3(h3 / 2) - d3(h3)) / 3, 1e-5);
    }
}

inline void selftest_expr(selftest_runner& t)
{
    const char* sources[] = {
        "t1^2/(2*(1 - t2))",
        "(t1 + C)*log((t1 + C)/(C - t2)) - (t1 + t2)",
        "-t1^2 + sqrt(1 + t2)*exp(t1/3)",
        "sin(t1)*cos(t2) - pow(2 + t1, 1.5)",
        "t1*t2/(1 + t1^2 + t2^2)",
    };
    const expr::Params params{{"C", 1.0}};
    for (const char* src : sources) {
        const expr::Expr e = expr::parse(src, {"t1", "t2"});
        const std::string once = e.to_string();
        t.expect(std::string("print/parse fixed point for ") + src,
                 expr::parse(once, {"t1", "t2"}).to_string() == once);
        for (int trial = 0; trial < 5; ++trial) {
            const std::array<double, 2> at{t.uniform(-0.3, 0.3), t.uniform(-0.3, 0.3)};
            const double value = expr::evaluate(e, at, params);
            const Jet2 j = expr::eval_jet<2>(e, at, params);
            t.expect_close(std::string("jet value of ") + src, j.value(), value, 1e-14);
            const double h = 1e-5;
            const std::array<double, 2> hi{at[0] + h, at[1]}, lo{at[0] - h, at[1]};
            const double fd = (expr::evaluate(e, hi, params) - expr::evaluate(e, lo, params)) / (2 * h);
            t.expect_close(std::string("d/dt1 of ") + src, j.derivative(1, 0), fd, 1e-6);
        }
    }
}

inline void selftest_conic(selftest_runner& t)
{
    int tested = 0;
    while (tested < 100) {
        const double a0 = t.uniform(0.5, 1.5), a1 = t.uniform(-0.5, 0.5), a2 = t.uniform(-0.5, 0.5);
        const ConicPoly P(a0, a1, a2);
        if (std::min({P(-0.3), P(0.0), P(0.3)}) <= 0.1 || (a2 > 0 && -a1 / (2 * a2) > -0.3 && -a1 / (2 * a2) < 0.3
                                                            && P(-a1 / (2 * a2)) <= 0.1)) {
            continue;
        }
        ++tested;
        const int sign = tested % 2 ? 1 : -1;
        const auto p = p_from_conic(P, sign);
        const double v = t.uniform(-0.3, 0.3);
        const Jet1 pj = p->jet(v);
        t.expect("Monge residual of a conic solution vanishes", monge1d_residual(pj).normalized() < 1e-9);

        if (sign > 0) {
            // 9 (p'''/(p'')^(5/3))'' = (p'')^(-11/3) times the Monge numerator
            const Jet1 second = partial(partial(pj));
            const Jet1 g = partial(second) / pow(second, 5.0 / 3.0);
            const double lhs = 9.0 * g.derivative(2);
            const double rhs = monge1d_residual(pj).raw / std::pow(second.value(), 11.0 / 3.0);
            t.expect_close("antiderivative identity", lhs, rhs, 1e-8);
        }
    }

    for (int trial = 0; trial < 50; ++trial) {
        const ConicPoly P(t.uniform(0.5, 1.5), t.uniform(-0.5, 0.5), t.uniform(-0.5, 0.5));
        const ConicPoly Q(t.uniform(0.5, 1.5), t.uniform(-0.5, 0.5), t.uniform(-0.5, 0.5));
        const double tau = t.uniform(-0.3, 0.3);
        const PQIdentity id = pq_identity_residuals(P, Q, tau);
        const double w = P(tau) * Q.d1(tau) - P.d1(tau) * Q(tau);
        const double cubic = 8.0 * w * w * w;
        ++tested;
        const double err = std::abs((id.r1.raw - id.r2.raw) - cubic);
        t.expect("r1 - r2 = 8 (PQ' - P'Q)^3", err <= 1e-12 * std::max({id.r1.scale, id.r2.scale, 1e-300}));

        double best = 0.0;
        for (int k = -3; k <= 3; ++k) {
            const PQIdentity s = pq_identity_residuals(P, Q, 0.1 * k);
            best = std::max({best, std::abs(s.r1.raw) - 1e-6 * s.r1.scale, std::abs(s.r2.raw) - 1e-6 * s.r2.scale});
        }
        t.expect("Q != cP leaves a nonzero identity residual", best > 0.0);
    }
}

} // namespace detail

/// Runs the jet, expression and conic invariant checks.
inline SelftestResult run_selftest(std::uint64_t seed = 20240607)
{
    detail::selftest_runner t(seed);
    detail::selftest_jet(t);
    detail::selftest_expr(t);
    detail::selftest_conic(t);
    return t.take();
}

} // namespace crtube
