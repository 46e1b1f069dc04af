#pragma once

// Pointwise differential quantities of a tube graphing function rho(t1, t2),
// given as an order-5 bivariate jet, and the residuals of
//   - the homogeneous Monge-Ampere equation rho11 rho22 - rho12^2 = 0,
//   - the Theta^2_21 condition,
//   - the Monge equation in t1: 9 rho^(V) rho11^2 - 45 rho^(IV) rho111 rho11 + 40 rho111^3 = 0.

#include "crtube/error.hpp"
#include "crtube/jet.hpp"
#include "crtube/residual.hpp"

#include <cmath>
#include <string>

namespace crtube {

/// Default guard for rho11 > 0 and S != 0.
inline constexpr double default_rank_epsilon = 1e-8;

struct SurfacePoint
{
    double t1 = 0.0;
    double t2 = 0.0;
    Jet2 rho;  ///< jet of rho expanded at (t1, t2)
};

struct PointQuantities
{
    double rho11 = 0.0;
    double rho12 = 0.0;
    double rho22 = 0.0;
    double rho111 = 0.0;
    double rho4 = 0.0;  ///< d^4 rho / dt1^4
    double rho5 = 0.0;  ///< d^5 rho / dt1^5
    double S = 0.0;     ///< (rho12 / rho11)_1
    double S1 = 0.0;    ///< S_1
    Residual ma;
    Residual theta21;
    Residual monge_t1;
};

namespace detail {

inline std::string at_point(const SurfacePoint& p)
{
    return "at (t1, t2) = (" + std::to_string(p.t1) + ", " + std::to_string(p.t2) + ")";
}

// S and S_1 as jets, built from the rho jet.
struct s_jets
{
    Jet2 rho11;
    Jet2 rho12;
    Jet2 rho111;
    Jet2 S;
    Jet2 S1;
};

inline s_jets build_s_jets(const SurfacePoint& p)
{
    s_jets out;
    const Jet2 rho1 = partial(p.rho, 1);
    out.rho11 = partial(rho1, 1);
    out.rho12 = partial(rho1, 2);
    out.rho111 = partial(out.rho11, 1);
    if (!(out.rho11.value() > 0.0)) {
        throw LeviRankViolation("rho11 = " + std::to_string(out.rho11.value()) + " " + at_point(p));
    }
    out.S = partial(out.rho12 / out.rho11, 1);
    out.S1 = partial(out.S, 1);
    return out;
}

inline void check_guards(const SurfacePoint& p, double rho11, double S, double eps)
{
    if (!(rho11 > eps)) {
        throw LeviRankViolation("rho11 = " + std::to_string(rho11) + " " + at_point(p));
    }
    if (!(std::abs(S) > eps)) {
        throw TwoDegeneracyViolation("S = " + std::to_string(S) + " " + at_point(p));
    }
}

} // namespace detail

inline Residual monge_ampere_terms(const SurfacePoint& p)
{
    const double r11 = p.rho.derivative(2, 0);
    const double r12 = p.rho.derivative(1, 1);
    const double r22 = p.rho.derivative(0, 2);
    return Residual::of({r11 * r22, -r12 * r12});
}

/// rho11 rho22 - rho12^2.
inline double monge_ampere_residual(const SurfacePoint& p)
{
    return monge_ampere_terms(p).raw;
}

inline Residual monge_t1_terms(const SurfacePoint& p)
{
    const double r11 = p.rho.derivative(2, 0);
    const double r111 = p.rho.derivative(3, 0);
    const double r4 = p.rho.derivative(4, 0);
    const double r5 = p.rho.derivative(5, 0);
    return Residual::of({9.0 * r5 * r11 * r11, -45.0 * r4 * r111 * r11, 40.0 * r111 * r111 * r111});
}

/// Left-hand side of the Monge equation with respect to t1.
inline double monge_residual_t1(const SurfacePoint& p)
{
    return monge_t1_terms(p).raw;
}

/// Evaluates rho's second and higher t1-derivatives, S and S_1, and checks the
/// Levi-rank (rho11 > eps) and 2-nondegeneracy (|S| > eps) guards.
/// The theta21 field is left empty; see theta21_terms.
inline PointQuantities check_rank_conditions(const SurfacePoint& p, double eps = default_rank_epsilon)
{
    PointQuantities q;
    q.rho11 = p.rho.derivative(2, 0);
    q.rho12 = p.rho.derivative(1, 1);
    q.rho22 = p.rho.derivative(0, 2);
    q.rho111 = p.rho.derivative(3, 0);
    q.rho4 = p.rho.derivative(4, 0);
    q.rho5 = p.rho.derivative(5, 0);
    detail::check_guards(p, q.rho11, 1.0, eps);
    const auto s = detail::build_s_jets(p);
    q.S = s.S.value();
    q.S1 = s.S1.value();
    detail::check_guards(p, q.rho11, q.S, eps);
    q.ma = monge_ampere_terms(p);
    q.monge_t1 = monge_t1_terms(p);
    return q;
}

/// Terms of the Theta^2_21 condition
///   2 sqrt(rho11) [rho12 X_1 - rho11 X_2] - 2 sqrt(rho11) [rho12 Y_1 - rho11 Y_2] - 11 S_1 rho11 - S rho111
/// with X = S_1 / (sqrt(rho11) S) and Y = rho111 / rho11^(3/2). X and Y are
/// carried as jets so that their first partials come out exactly.
inline Residual theta21_terms(const SurfacePoint& p, double eps = default_rank_epsilon)
{
    const auto s = detail::build_s_jets(p);
    const double r11 = s.rho11.value();
    const double r12 = s.rho12.value();
    detail::check_guards(p, r11, s.S.value(), eps);

    const Jet2 root = sqrt(s.rho11);
    const Jet2 x = s.S1 / (root * s.S);
    const Jet2 y = s.rho111 / pow(s.rho11, 1.5);
    const double x1 = partial(x, 1).value();
    const double x2 = partial(x, 2).value();
    const double y1 = partial(y, 1).value();
    const double y2 = partial(y, 2).value();

    const double w = 2.0 * std::sqrt(r11);
    return Residual::of({
        w * r12 * x1,
        -w * r11 * x2,
        -w * r12 * y1,
        w * r11 * y2,
        -11.0 * s.S1.value() * r11,
        -s.S.value() * s.rho111.value(),
    });
}

inline double theta21_residual(const SurfacePoint& p, double eps = default_rank_epsilon)
{
    return theta21_terms(p, eps).raw;
}

/// All quantities at once; throws on a guard violation.
inline PointQuantities analyze_point(const SurfacePoint& p, double eps = default_rank_epsilon)
{
    PointQuantities q = check_rank_conditions(p, eps);
    q.theta21 = theta21_terms(p, eps);
    return q;
}

} // namespace crtube
