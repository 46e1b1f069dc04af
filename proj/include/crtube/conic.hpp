#pragma once

// The single-variable Monge equation 9 f^(V) (f'')^2 - 45 f^(IV) f''' f'' + 40 (f''')^3 = 0
// and its closed-form solutions f'' = +-P^(-3/2) with deg P <= 2, plus the
// polynomial identities that pin Q to a multiple of P.

#include "crtube/error.hpp"
#include "crtube/jet.hpp"
#include "crtube/parametrize.hpp"
#include "crtube/quadrature.hpp"
#include "crtube/residual.hpp"
#include "crtube/univariate.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <string>

namespace crtube {

/// P(tau) = a0 + a1 tau + a2 tau^2 with P(0) = a0 > 0.
class ConicPoly
{
public:
    ConicPoly(double a0, double a1, double a2) : a_{a0, a1, a2}
    {
        if (!(a0 > 0.0)) {
            throw InvalidParameter("conic polynomial needs P(0) > 0, got " + std::to_string(a0));
        }
    }

    double a0() const noexcept { return a_[0]; }
    double a1() const noexcept { return a_[1]; }
    double a2() const noexcept { return a_[2]; }

    double operator()(double tau) const noexcept { return a_[0] + tau * (a_[1] + tau * a_[2]); }
    double d1(double tau) const noexcept { return a_[1] + 2.0 * a_[2] * tau; }
    double d2() const noexcept { return 2.0 * a_[2]; }

    /// Exact Taylor expansion at tau.
    Jet1 jet(double tau) const
    {
        std::array<double, Jet1::size> c{};
        c[0] = (*this)(tau);
        c[1] = d1(tau);
        c[2] = a_[2];
        return Jet1(c);
    }

    ConicPoly scaled(double c) const { return ConicPoly(c * a_[0], c * a_[1], c * a_[2]); }

    std::string describe() const
    {
        return std::to_string(a_[0]) + " + " + std::to_string(a_[1]) + "*t + " + std::to_string(a_[2]) + "*t^2";
    }

private:
    std::array<double, 3> a_;
};

/// Monge residual of f from its order-5 jet.
inline Residual monge1d_residual(const Jet1& f)
{
    const double f2 = f.derivative(2), f3 = f.derivative(3), f4 = f.derivative(4), f5 = f.derivative(5);
    return Residual::of({9 * f5 * f2 * f2, -45 * f4 * f3 * f2, 40 * f3 * f3 * f3});
}

/// Panel width for the quadratures that recover p', p, q from p'' and q'.
inline constexpr double conic_panel_width = 0.05;

namespace detail {

// P^(-3/2) with a domain guard.
inline double conic_power(const ConicPoly& P, double tau)
{
    const double value = P(tau);
    if (!(value > 0.0)) {
        throw DomainError("conic polynomial " + P.describe() + " is " + std::to_string(value) + " at "
                          + std::to_string(tau));
    }
    return 1.0 / (value * std::sqrt(value));
}

inline Jet1 conic_power_jet(const ConicPoly& P, double tau)
{
    const Jet1 pj = P.jet(tau);
    if (!(pj.value() > 0.0)) {
        throw DomainError("conic polynomial " + P.describe() + " is " + std::to_string(pj.value()) + " at "
                          + std::to_string(tau));
    }
    return pow(pj, -1.5);
}

} // namespace detail

/// p with p'' = sign * P^(-3/2), p(0) = 0, p'(0) = pprime0. Values of p and p'
/// come from Gauss-Legendre quadrature of p'' (the repeated integral folded
/// into one weighted integral); orders >= 2 come from the analytic jet of p''.
class ConicP final : public UnivariateFunction
{
public:
    ConicP(ConicPoly P, int sign, double pprime0) : P_(P), sign_(sign), pprime0_(pprime0)
    {
        if (sign != 1 && sign != -1) {
            throw InvalidParameter("conic branch sign must be +1 or -1");
        }
    }

    double second(double u) const { return sign_ * detail::conic_power(P_, u); }

    double first_derivative(double v) const
    {
        return pprime0_ + integrate_gl16([this](double u) { return second(u); }, 0.0, v, conic_panel_width);
    }

    double value(double v) const override
    {
        return pprime0_ * v
               + integrate_gl16([&](double u) { return (v - u) * second(u); }, 0.0, v, conic_panel_width);
    }

    double integral(double v) const override
    {
        return 0.5 * pprime0_ * v * v
               + integrate_gl16([&](double u) { return 0.5 * (v - u) * (v - u) * second(u); }, 0.0, v,
                                conic_panel_width);
    }

    Jet1 jet(double v) const override
    {
        const Jet1 pp = sign_ * detail::conic_power_jet(P_, v);
        std::array<double, Jet1::size> c{};
        c[0] = value(v);
        c[1] = first_derivative(v);
        for (int k = 2; k <= jet_max_order; ++k) {
            c[k] = pp.coeff(k - 2) / (k * (k - 1));
        }
        return Jet1(c);
    }

    std::string describe() const override
    {
        return "p'' = " + std::string(sign_ > 0 ? "+" : "-") + "(" + P_.describe() + ")^(-3/2), p'(0) = "
               + std::to_string(pprime0_);
    }

    const ConicPoly& poly() const noexcept { return P_; }
    int sign() const noexcept { return sign_; }

private:
    ConicPoly P_;
    int sign_;
    double pprime0_;
};

/// q with q' = Q^(-3/2), q(0) = 0.
class ConicQ final : public UnivariateFunction
{
public:
    explicit ConicQ(ConicPoly Q) : Q_(Q) {}

    double first(double u) const { return detail::conic_power(Q_, u); }

    double value(double v) const override
    {
        return integrate_gl16([this](double u) { return first(u); }, 0.0, v, conic_panel_width);
    }

    double integral(double v) const override
    {
        return integrate_gl16([&](double u) { return (v - u) * first(u); }, 0.0, v, conic_panel_width);
    }

    Jet1 jet(double v) const override
    {
        const Jet1 qp = detail::conic_power_jet(Q_, v);
        std::array<double, Jet1::size> c{};
        c[0] = value(v);
        for (int k = 1; k <= jet_max_order; ++k) {
            c[k] = qp.coeff(k - 1) / k;
        }
        return Jet1(c);
    }

    std::string describe() const override { return "q' = (" + Q_.describe() + ")^(-3/2)"; }

    const ConicPoly& poly() const noexcept { return Q_; }

private:
    ConicPoly Q_;
};

inline Univariate p_from_conic(const ConicPoly& P, int sign = 1, double pprime0 = 0.0)
{
    return std::make_shared<ConicP>(P, sign, pprime0);
}

inline Univariate q_from_conic(const ConicPoly& Q)
{
    return std::make_shared<ConicQ>(Q);
}

struct PQIdentity
{
    Residual r1;
    Residual r2;
};

/// The two polynomial identities that the mixed ODEs reduce to once p'' and q'
/// are of conic form. Their difference is 8 (P Q' - P' Q)^3.
inline PQIdentity pq_identity_residuals(const ConicPoly& P, const ConicPoly& Q, double tau)
{
    const double p = P(tau), dp = P.d1(tau), ddp = P.d2();
    const double q = Q(tau), dq = Q.d1(tau), ddq = Q.d2();
    const double p2 = p * p, p3 = p2 * p, q2 = q * q, q3 = q2 * q;
    PQIdentity out;
    out.r1 = Residual::of({7 * p3 * dq * dq * dq, -6 * p3 * ddq * dq * q, -dp * dp * dp * q3,
                           9 * dp * dp * p * dq * q2, -6 * ddp * dp * p * q3, -15 * dp * p2 * dq * dq * q,
                           6 * dp * p2 * ddq * q2, 6 * ddp * p2 * dq * q2});
    out.r2 = Residual::of({7 * dp * dp * dp * q3, -6 * ddp * dp * p * q3, -p3 * dq * dq * dq,
                           9 * dp * p2 * dq * dq * q, -6 * p3 * ddq * dq * q, -15 * dp * dp * p * dq * q2,
                           6 * ddp * p2 * dq * q2, 6 * dp * p2 * ddq * q2});
    return out;
}

/// The four ODE residuals for p from (P, sign) and q from Q, at v.
inline std::array<Residual, 4> final1_from_conics(const ConicPoly& P, const ConicPoly& Q, int sign, double v)
{
    return final1_residuals(PQFamily(p_from_conic(P, sign), q_from_conic(Q)), v);
}

} // namespace crtube
