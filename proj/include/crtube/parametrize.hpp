#pragma once

// Solutions of the homogeneous Monge-Ampere equation parametrized by a pair of
// univariate functions (p, q) with p(0) = q(0) = 0 and q' > 0:
//
//   v = rho_1(t1, t2),  w = t2,  p(v) = rho_2,  t1 = q(v) - w p'(v),
//   rho(t1(v, w), w) = v q(v) - int_0^v q + w (p(v) - v p'(v)).

#include "crtube/error.hpp"
#include "crtube/jet.hpp"
#include "crtube/jet_newton.hpp"
#include "crtube/newton.hpp"
#include "crtube/residual.hpp"
#include "crtube/surface.hpp"
#include "crtube/univariate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace crtube {

class PQFamily
{
public:
    PQFamily(Univariate p, Univariate q) : p_(std::move(p)), q_(std::move(q))
    {
        if (!p_ || !q_) {
            throw InvalidParameter("PQFamily needs both p and q");
        }
        const double p0 = p_->value(0.0);
        const double q0 = q_->value(0.0);
        if (std::abs(p0) > 1e-12 || std::abs(q0) > 1e-12) {
            throw InvalidParameter("PQFamily requires p(0) = q(0) = 0, got p(0) = " + std::to_string(p0)
                                   + ", q(0) = " + std::to_string(q0));
        }
    }

    const UnivariateFunction& p() const noexcept { return *p_; }
    const UnivariateFunction& q() const noexcept { return *q_; }

    std::string describe() const { return "p(v) = " + p_->describe() + ", q(v) = " + q_->describe(); }

private:
    Univariate p_;
    Univariate q_;
};

struct VWPoint
{
    double v = 0.0;
    double w = 0.0;
};

struct TPoint
{
    double t1 = 0.0;
    double t2 = 0.0;
};

/// t1 = q(v) - w p'(v), t2 = w.
inline TPoint t_from_vw(const PQFamily& fam, VWPoint pt)
{
    const Jet1 pj = fam.p().jet(pt.v);
    return {fam.q().value(pt.v) - pt.w * pj.derivative(1), pt.w};
}

/// Linearization of the inverse at the origin.
inline double default_v_guess(const PQFamily& fam, double t1, double t2)
{
    const Jet1 pj = fam.p().jet(0.0);
    const Jet1 qj = fam.q().jet(0.0);
    const double slope = qj.derivative(1) - t2 * pj.derivative(2);
    return std::abs(slope) > 1e-10 ? t1 / slope : 0.0;
}

/// Solves q(v) - t2 p'(v) = t1 for v by damped Newton.
inline VWPoint vw_from_t(const PQFamily& fam, double t1, double t2, std::optional<double> v_guess = {})
{
    NewtonOptions opts;
    opts.tolerance = 1e-12 * (1.0 + std::abs(t1));
    const double v = newton_solve(
        [&](double x) {
            const Jet1 pj = fam.p().jet(x);
            const Jet1 qj = fam.q().jet(x);
            return std::pair{qj.value() - t2 * pj.derivative(1) - t1, qj.derivative(1) - t2 * pj.derivative(2)};
        },
        v_guess.value_or(default_v_guess(fam, t1, t2)), opts);
    return {v, t2};
}

/// rho(t1(v, w), w) = v q(v) - int_0^v q + w (p(v) - v p'(v)).
inline double rho_value(const PQFamily& fam, VWPoint pt)
{
    const Jet1 pj = fam.p().jet(pt.v);
    const double pv = pj.value();
    const double dp = pj.derivative(1);
    return pt.v * fam.q().value(pt.v) - fam.q().integral(pt.v) + pt.w * (pv - pt.v * dp);
}

struct PQPoint
{
    SurfacePoint surface;
    VWPoint vw;
};

/// Order-5 jet of rho at (t1, t2). The jet of v = rho_1 is obtained by Newton
/// iteration in jet arithmetic on q(V) - t2 p'(V) - t1 = 0; then rho_1 = V,
/// rho_2 = p(V) and the constant term comes from rho_value.
inline PQPoint rho_jet_from_pq(const PQFamily& fam, double t1, double t2, std::optional<double> v_guess = {})
{
    const VWPoint vw = vw_from_t(fam, t1, t2, v_guess);
    const double v0 = vw.v;
    const Jet1 pj = fam.p().jet(v0);
    const Jet1 qj = fam.q().jet(v0);
    const Jet1 dp = partial(pj);
    const Jet1 ddp = partial(dp);
    const Jet1 dq = partial(qj);

    const double jacobian = dq.value() - t2 * ddp.value();
    if (!(jacobian > 0.0)) {
        throw LeviRankViolation("q' - w p'' = " + std::to_string(jacobian) + " at (t1, t2) = ("
                                + std::to_string(t1) + ", " + std::to_string(t2) + ")");
    }

    const Jet2 T1 = Jet2::variable(t1, 1);
    const Jet2 T2 = Jet2::variable(t2, 2);
    const int order = std::min(qj.order(), dp.order());

    const Jet2 V = solve_implicit_jet<2>(
        v0, order, [&](const Jet2& x) { return compose(qj, v0, x) - T2 * compose(dp, v0, x) - T1; },
        [&](const Jet2& x) { return compose(dq, v0, x) - T2 * compose(ddp, v0, x); });
    const Jet2 P2 = compose(pj, v0, V);

    std::array<double, Jet2::size> c{};
    for (std::size_t i = 1; i < Jet2::size; ++i) {
        const auto& e = Jet2::layout::entries[i];
        if (e.j >= 1) {
            c[i] = V.coeff(e.j - 1, e.k) / e.j;
        } else {
            c[i] = P2.coeff(0, e.k - 1) / e.k;
        }
    }
    c[0] = rho_value(fam, vw);
    return {SurfacePoint{t1, t2, Jet2(c, order + 1)}, vw};
}

/// The four ODE residuals obtained by collecting powers of w in the t1-Monge
/// equation, in the order: Monge equation in p, the two mixed equations, Monge
/// equation in a primitive of q.
inline std::array<Residual, 4> final1_residuals(const PQFamily& fam, double v)
{
    const Jet1 pj = fam.p().jet(v);
    const Jet1 qj = fam.q().jet(v);
    const double p2 = pj.derivative(2), p3 = pj.derivative(3), p4 = pj.derivative(4), p5 = pj.derivative(5);
    const double q1 = qj.derivative(1), q2 = qj.derivative(2), q3 = qj.derivative(3), q4 = qj.derivative(4);
    return {
        Residual::of({9 * p5 * p2 * p2, -45 * p4 * p3 * p2, 40 * p3 * p3 * p3}),
        Residual::of({6 * p5 * p2 * q1, 3 * p2 * p2 * q4, -15 * p4 * p3 * q1, -15 * p4 * p2 * q2,
                      -15 * p3 * p2 * q3, 40 * p3 * p3 * q2}),
        Residual::of({3 * p5 * q1 * q1, 6 * p2 * q4 * q1, -15 * p4 * q2 * q1, -15 * p3 * q3 * q1,
                      -15 * p2 * q3 * q2, 40 * p3 * q2 * q2}),
        Residual::of({9 * q4 * q1 * q1, -45 * q3 * q2 * q1, 40 * q2 * q2 * q2}),
    };
}

/// The t1-Monge residual recombined from the four ODE residuals:
///   -(q' - w p'')^-9 [R4 - 3 w R3 + 3 w^2 R2 - w^3 R1].
inline double monge_t1_from_final1(const PQFamily& fam, VWPoint pt)
{
    const auto r = final1_residuals(fam, pt.v);
    const Jet1 pj = fam.p().jet(pt.v);
    const Jet1 qj = fam.q().jet(pt.v);
    const double d = qj.derivative(1) - pt.w * pj.derivative(2);
    const double w = pt.w;
    const double bracket = r[3].raw - 3 * w * r[2].raw + 3 * w * w * r[1].raw - w * w * w * r[0].raw;
    return -bracket / std::pow(d, 9);
}

struct FirstcurResult
{
    bool is_const = false;
    double ratio = 0.0;    ///< mean of q'/p'' over the samples
    double max_dev = 0.0;  ///< largest deviation from the mean
};

/// Checks q'/p'' = const on the sample points.
inline FirstcurResult firstcur_check(const PQFamily& fam, std::span<const double> sample_vs)
{
    if (sample_vs.empty()) {
        throw InvalidParameter("firstcur_check needs at least one sample");
    }
    std::vector<double> ratios;
    ratios.reserve(sample_vs.size());
    for (double v : sample_vs) {
        const double p2 = fam.p().jet(v).derivative(2);
        if (!(std::abs(p2) > 1e-12)) {
            throw TwoDegeneracyViolation("p''(" + std::to_string(v) + ") = " + std::to_string(p2));
        }
        ratios.push_back(fam.q().jet(v).derivative(1) / p2);
    }
    FirstcurResult out;
    for (double r : ratios) {
        out.ratio += r;
    }
    out.ratio /= static_cast<double>(ratios.size());
    for (double r : ratios) {
        out.max_dev = std::max(out.max_dev, std::abs(r - out.ratio));
    }
    out.is_const = out.max_dev < 1e-9 * (1.0 + std::abs(out.ratio));
    return out;
}

} // namespace crtube
