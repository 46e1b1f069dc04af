// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "crtube/crtube.hpp"
#include "fd_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace crtube;

namespace {

struct Outcome
{
    bool ok = true;
    std::string detail;
};

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Outcome conic_pairs()
{
    const auto start = std::chrono::steady_clock::now();
    const ResidualReport r = verify_theorem21(100, 42);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double monge = r.summary.at("monge_norm").max_abs;
    const double theta = r.summary.at("theta21_norm").max_abs;
    return {r.errors.empty() && monge < 1e-8 && theta < 1e-8 && r.pass() && seconds < 30.0,
            "100 trials, " + std::to_string(r.points.size()) + " points, max monge " + sci(monge) + ", max theta21 "
                + sci(theta) + ", " + sci(seconds) + " s"};
}

Outcome counterexample()
{
    const Example31 ex = example31(1.0);
    const ResidualReport r = verify_counterexample(ex.spec, GridSpec{});
    const double theta = r.summary.at("theta21_norm").max_abs;

    const std::array<double, 2> origin{0.0, 0.0};
    const double monge
        = monge_residual_t1(SurfacePoint{0.0, 0.0, expr::eval_jet<2>(ex.rho_closed_form, origin, ex.params)});

    const auto f = [&](double x) {
        const std::array<double, 2> pt{x, 0.0};
        return expr::evaluate(ex.rho_closed_form, pt, ex.params);
    };
    const double h = 0.04;
    const double r2 = fd::fd_derivative(f, 0.0, 2, h), r3 = fd::fd_derivative(f, 0.0, 3, h);
    const double r4 = fd::fd_derivative(f, 0.0, 4, h), r5 = fd::fd_derivative(f, 0.0, 5, h);
    const double fd = 9 * r5 * r2 * r2 - 45 * r4 * r3 * r2 + 40 * r3 * r3 * r3;

    return {r.errors.empty() && theta < 1e-8 && std::abs(monge + 4.0) < 1e-8 && std::abs(fd + 4.0) < 1e-3,
            "max theta21 " + sci(theta) + ", monge(0,0) " + sci(monge) + ", finite differences " + sci(fd)};
}

Outcome direct_formula()
{
    Outcome out;
    for (const char* p : {"exp(v) - 1", "v^2/2 + v^3/6"}) {
        Prop32Options opts;
        const ResidualReport r = verify_prop32(CounterexampleSpec(function_of_v(p), 1.0), GridSpec{}, opts);
        out.ok = out.ok && r.errors.empty() && r.verdicts.at("value_agreement") && r.verdicts.at("jet_agreement");
        out.detail += std::string(out.detail.empty() ? "" : "; ") + p + ": value "
                      + sci(r.meta.at("max_value_difference").get<double>()) + ", jet "
                      + sci(r.meta.at("max_jet_difference").get<double>());
    }
    return out;
}

Outcome closed_forms()
{
    const CounterexampleSpec spec = example31(1.0).spec;
    double zeta_err = 0.0, chi_err = 0.0;
    for (int k = -40; k <= 40; ++k) {
        if (k == 0) {
            continue;
        }
        const double s = 0.01 * k;
        zeta_err = std::max(zeta_err, std::abs(zeta(spec, s) - std::log(1 - s)));
        chi_err = std::max(chi_err, std::abs(chi(spec, s) - ((s - 1) / s * std::log(1 - s) - 1)));
    }
    const double chi0 = chi(spec, 0.0);
    const double slope = fd::fd_derivative([&](double t) { return chi(spec, t); }, 0.0, 1, 1e-2);
    return {zeta_err < 1e-10 && chi_err < 1e-10 && chi0 == 0.0 && std::abs(slope + 0.5) < 1e-6,
            "zeta " + sci(zeta_err) + ", chi " + sci(chi_err) + ", chi(0) " + sci(chi0) + ", chi'(0) " + sci(slope)};
}

Outcome identities()
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lead(0.5, 1.5), coef(-0.5, 0.5), u(-0.3, 0.3);
    const auto conic = [&] {
        const double a0 = lead(rng);
        const double a1 = coef(rng);
        const double a2 = coef(rng);
        return ConicPoly(a0, a1, a2);
    };

    double cubic = 0.0;
    for (int i = 0; i < 50; ++i) {
        const ConicPoly P = conic(), Q = conic();
        const double tau = u(rng);
        const PQIdentity id = pq_identity_residuals(P, Q, tau);
        const double w = P(tau) * Q.d1(tau) - P.d1(tau) * Q(tau);
        cubic = std::max(cubic, std::abs(id.r1.raw - id.r2.raw - 8 * w * w * w) / (id.r1.scale + id.r2.scale));
    }

    double monge = 0.0;
    for (int i = 0; i < 100;) {
        const ConicPoly P = conic();
        if (std::min({P(-0.3), P(0.0), P(0.3)}) <= 0.2) {
            continue;
        }
        monge = std::max(monge, monge1d_residual(p_from_conic(P, i % 2 ? 1 : -1)->jet(u(rng))).normalized());
        ++i;
    }

    const PQFamily fam(function_of_v("0.4*v + v^2/2 + v^3/6 + sin(v)^4/5"),
                       function_of_v("v + v^2/4 - v^3/7 + exp(v/3) - 1"));
    double expansion = 0.0;
    for (int i = 0; i < 50; ++i) {
        const VWPoint vw{0.6 * u(rng), 0.6 * u(rng)};
        const TPoint t = t_from_vw(fam, vw);
        const double direct = monge_residual_t1(rho_jet_from_pq(fam, t.t1, t.t2, vw.v).surface);
        expansion = std::max(expansion, std::abs(monge_t1_from_final1(fam, vw) - direct) / std::max(1.0, std::abs(direct)));
    }
    return {cubic < 1e-12 && monge < 1e-9 && expansion < 1e-8,
            "cubic " + sci(cubic) + ", conic monge " + sci(monge) + ", w-expansion " + sci(expansion)};
}

Outcome kernel()
{
    detail::selftest_runner t(20240607);
    detail::selftest_jet(t);
    const SelftestResult r = t.take();
    return {r.ok(), std::to_string(r.checks) + " jet checks, " + std::to_string(r.failures.size()) + " failures"
                        + (r.ok() ? "" : " (first: " + r.failures.front() + ")")};
}

Outcome flat_tube()
{
    const GridSpec grid;
    const ConicPoly one(1, 0, 0);
    const PQFamily fam(p_from_conic(one), q_from_conic(one));
    double worst_rho = 0.0, worst = 0.0, min_rho11 = 1e300, min_S = 1e300;
    std::size_t points = 0;
    bool ok = true;
    for (int i = 0; i < grid.t1_n; ++i) {
        for (int j = 0; j < grid.t2_n; ++j) {
            const double t1 = grid.t1_at(i), t2 = grid.t2_at(j);
            try {
                const SurfacePoint sp = rho_jet_from_pq(fam, t1, t2).surface;
                worst_rho = std::max(worst_rho, std::abs(sp.rho.value() - t1 * t1 / (2 * (1 - t2))));
                const PointQuantities q = analyze_point(sp);
                worst = std::max({worst, std::abs(q.ma.raw), std::abs(q.theta21.raw), std::abs(q.monge_t1.raw)});
                min_rho11 = std::min(min_rho11, q.rho11);
                min_S = std::min(min_S, std::abs(q.S));
                ++points;
            } catch (const Error&) {
                ok = false;
            }
        }
    }
    return {ok && points == grid.size() && worst_rho < 1e-11 && worst < 1e-11 && min_rho11 > 0 && min_S > 0,
            std::to_string(points) + " points, rho error " + sci(worst_rho) + ", max residual " + sci(worst)
                + ", min rho11 " + sci(min_rho11) + ", min |S| " + sci(min_S)};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"random proportional conic pairs are flat", conic_pairs},
        {"exponential counterexample: flat Theta, Monge -4 at origin", counterexample},
        {"direct formula agrees with the (p, q) construction", direct_formula},
        {"closed forms of zeta and chi", closed_forms},
        {"algebraic identities", identities},
        {"jet kernel", kernel},
        {"flat tube sanity", flat_tube},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.ok;
        std::printf("[%s] %zu. %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
