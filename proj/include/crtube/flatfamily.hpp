#pragma once

// Tube hypersurfaces with vanishing Theta^2_21 built from a single function p:
// the (p, q) family with q = C (p' - p'(0)), whose graphing function is
// rho = (w - C) (p(v) - v p'(v)) in the (v, w) chart, and
// the same surface written directly in (t1, t2):
//
//   rho~(t1, t2) = (t1 + p'(0) t2) chi((t1 + p'(0) t2) / (t2 - C)),
//   chi(tau) = (1 / tau) int_0^tau zeta,  zeta = inverse of v -> p'(0) - p'(v).

#include "crtube/error.hpp"
#include "crtube/expr.hpp"
#include "crtube/jet.hpp"
#include "crtube/jet_newton.hpp"
#include "crtube/newton.hpp"
#include "crtube/parametrize.hpp"
#include "crtube/quadrature.hpp"
#include "crtube/surface.hpp"
#include "crtube/univariate.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

namespace crtube {

/// A seed function p together with the constant C. The constructor checks
/// p(0) = 0, that p'' keeps one sign and stays away from zero on
/// [-check_radius, check_radius], and that C has the sign of p''.
class CounterexampleSpec
{
public:
    CounterexampleSpec(Univariate p, double C, double check_radius = 0.3, int samples = 25)
        : p_(std::move(p)), C_(C), radius_(check_radius)
    {
        if (!p_) {
            throw InvalidParameter("counterexample needs a function p");
        }
        const Jet1 at0 = p_->jet(0.0);
        if (std::abs(at0.value()) > 1e-12) {
            throw InvalidParameter("p(0) must vanish, got " + std::to_string(at0.value()));
        }
        pprime0_ = at0.derivative(1);
        ppp0_ = at0.derivative(2);
        if (!(std::abs(ppp0_) > 1e-8)) {
            throw TwoDegeneracyViolation("p''(0) = " + std::to_string(ppp0_));
        }
        if (!(C_ * ppp0_ > 0.0)) {
            throw InvalidParameter("C = " + std::to_string(C_) + " must have the sign of p''(0) = "
                                   + std::to_string(ppp0_));
        }
        for (int i = 0; i < samples; ++i) {
            const double v = samples == 1 ? 0.0 : -radius_ + 2.0 * radius_ * i / (samples - 1);
            const double second = p_->jet(v).derivative(2);
            if (!(second * ppp0_ > 0.0) || !(std::abs(second) > 1e-8)) {
                throw TwoDegeneracyViolation("p''(" + std::to_string(v) + ") = " + std::to_string(second));
            }
        }
    }

    const UnivariateFunction& p() const noexcept { return *p_; }
    const Univariate& p_ptr() const noexcept { return p_; }
    double C() const noexcept { return C_; }
    double pprime0() const noexcept { return pprime0_; }
    double psecond0() const noexcept { return ppp0_; }
    double check_radius() const noexcept { return radius_; }

private:
    Univariate p_;
    double C_;
    double radius_;
    double pprime0_ = 0.0;
    double ppp0_ = 0.0;
};

/// q(v) = C (p'(v) - p'(0)).
class DerivedQ final : public UnivariateFunction
{
public:
    DerivedQ(Univariate p, double C) : p_(std::move(p)), C_(C), pprime0_(p_->jet(0.0).derivative(1)) {}

    Jet1 jet(double v) const override { return C_ * (partial(p_->jet(v)) - pprime0_); }

    double value(double v) const override { return C_ * (p_->jet(v).derivative(1) - pprime0_); }

    double integral(double v) const override { return C_ * (p_->value(v) - pprime0_ * v); }

    std::string describe() const override
    {
        return std::to_string(C_) + " * (d/dv[" + p_->describe() + "] - " + std::to_string(pprime0_) + ")";
    }

private:
    Univariate p_;
    double C_;
    double pprime0_;
};

inline PQFamily flat_pq_family(const CounterexampleSpec& spec)
{
    return PQFamily(spec.p_ptr(), std::make_shared<DerivedQ>(spec.p_ptr(), spec.C()));
}

/// rho in the (v, w) chart: (w - C)(p(v) - v p'(v)).
inline double rho_prop31(const CounterexampleSpec& spec, double v, double w)
{
    const Jet1 pj = spec.p().jet(v);
    return (w - spec.C()) * (pj.value() - v * pj.derivative(1));
}

namespace detail {

inline double zeta_newton(const CounterexampleSpec& spec, double sigma)
{
    const double a = spec.pprime0();
    NewtonOptions opts;
    opts.tolerance = 1e-13 * (1.0 + std::abs(sigma) + std::abs(a));
    try {
        return newton_solve(
            [&](double v) {
                const Jet1 pj = spec.p().jet(v);
                return std::pair{a - pj.derivative(1) - sigma, -pj.derivative(2)};
            },
            -sigma / spec.psecond0(), opts);
    } catch (const SingularJacobian& e) {
        throw RangeError("sigma = " + std::to_string(sigma) + " leaves the monotone branch: " + e.what());
    } catch (const NewtonNoConvergence& e) {
        throw RangeError("sigma = " + std::to_string(sigma) + " has no root on the monotone branch: " + e.what());
    } catch (const DomainError& e) {
        throw RangeError("sigma = " + std::to_string(sigma) + ": " + e.what());
    }
}

} // namespace detail

/// zeta(sigma): the root v of p'(0) - p'(v) = sigma on the branch through 0.
/// Throws RangeError when p'' changes sign between 0 and the root.
inline double zeta(const CounterexampleSpec& spec, double sigma)
{
    const double v = detail::zeta_newton(spec, sigma);
    constexpr int checks = 16;
    for (int i = 1; i <= checks; ++i) {
        const double u = v * i / checks;
        double second = 0.0;
        try {
            second = spec.p().jet(u).derivative(2);
        } catch (const DomainError& e) {
            throw RangeError("sigma = " + std::to_string(sigma) + ": " + e.what());
        }
        if (!(second * spec.psecond0() > 0.0)) {
            throw RangeError("sigma = " + std::to_string(sigma) + " leaves the monotone branch: p''("
                             + std::to_string(u) + ") = " + std::to_string(second));
        }
    }
    return v;
}

/// Order-4 jet of zeta at sigma0.
inline Jet1 zeta_jet(const CounterexampleSpec& spec, double sigma0)
{
    const double v0 = zeta(spec, sigma0);
    const Jet1 dp = partial(spec.p().jet(v0));
    const Jet1 ddp = partial(dp);
    const Jet1 S = Jet1::variable(sigma0);
    const double a = spec.pprime0();
    return solve_implicit_jet<1>(
        v0, dp.order(), [&](const Jet1& x) { return a - compose(dp, v0, x) - S; },
        [&](const Jet1& x) { return -compose(ddp, v0, x); });
}

inline constexpr double zeta_panel_width = 0.05;

/// Z(tau) = int_0^tau zeta.
inline double zeta_primitive(const CounterexampleSpec& spec, double tau)
{
    return integrate_gl16([&](double s) { return zeta(spec, s); }, 0.0, tau, zeta_panel_width);
}

/// Order-5 jet of Z at tau0.
inline Jet1 zeta_primitive_jet(const CounterexampleSpec& spec, double tau0)
{
    const Jet1 z = zeta_jet(spec, tau0);
    std::array<double, Jet1::size> c{};
    c[0] = zeta_primitive(spec, tau0);
    for (int k = 1; k <= z.order() + 1; ++k) {
        c[k] = z.coeff(k - 1) / k;
    }
    return Jet1(c, z.order() + 1);
}

/// chi(tau) = Z(tau) / tau, replaced by its linearization chi'(0) tau for
/// |tau| <= tau_switch.
inline double chi(const CounterexampleSpec& spec, double tau, double tau_switch = 1e-5)
{
    if (std::abs(tau) <= tau_switch) {
        return -tau / (2.0 * spec.psecond0());
    }
    return zeta_primitive(spec, tau) / tau;
}

/// The chi argument (t1 + p'(0) t2) / (t2 - C).
inline double chi_argument(const CounterexampleSpec& spec, double t1, double t2)
{
    const double denom = t2 - spec.C();
    if (denom == 0.0) {
        throw DomainError("t2 = C = " + std::to_string(spec.C()));
    }
    return (t1 + spec.pprime0() * t2) / denom;
}

/// rho~(t1, t2) = A chi(A / (t2 - C)) with A = t1 + p'(0) t2. `chi_offset` is
/// added to chi and exists only to build perturbed negative controls.
inline double tilde_rho(const CounterexampleSpec& spec, double t1, double t2, double chi_offset = 0.0)
{
    const double tau = chi_argument(spec, t1, t2);
    try {
        return (t1 + spec.pprime0() * t2) * (chi(spec, tau) + chi_offset);
    } catch (const RangeError& e) {
        throw DomainError(std::string("chi argument out of range: ") + e.what());
    }
}

/// Order-5 jet of rho~ at (t1, t2), computed as (t2 - C) Z(B) with
/// B = (t1 + p'(0) t2) / (t2 - C), which has no removable singularity at B = 0.
/// With chi_offset != 0 the term chi_offset (t1 + p'(0) t2) is added.
inline SurfacePoint tilde_rho_jet(const CounterexampleSpec& spec, double t1, double t2, double chi_offset = 0.0)
{
    const double b0 = chi_argument(spec, t1, t2);
    const Jet2 T1 = Jet2::variable(t1, 1);
    const Jet2 T2 = Jet2::variable(t2, 2);
    const Jet2 A = T1 + spec.pprime0() * T2;
    const Jet2 B = A / (T2 - spec.C());
    Jet1 Z;
    try {
        Z = zeta_primitive_jet(spec, b0);
    } catch (const RangeError& e) {
        throw DomainError(std::string("chi argument out of range: ") + e.what());
    }
    Jet2 rho = (T2 - spec.C()) * compose(Z, b0, B);
    if (chi_offset != 0.0) {
        rho += chi_offset * A;
    }
    return {t1, t2, rho};
}

/// The explicit instance p(v) = e^v - 1 with C > 0, where zeta(sigma) = log(1 - sigma)
/// and rho~ has a closed form.
struct Example31
{
    double C = 1.0;
    expr::Expr rho_closed_form;
    expr::Params params;
    CounterexampleSpec spec;
    bool expect_theta21_flat = true;
    bool expect_monge_flat = false;
};

inline constexpr const char* example31_rho_source = "(t1 + C)*log((t1 + C)/(C - t2)) - (t1 + t2)";
inline constexpr const char* example31_p_source = "exp(v) - 1";

inline Example31 example31(double C = 1.0)
{
    if (!(C > 0.0)) {
        throw InvalidParameter("the example needs C > 0, got " + std::to_string(C));
    }
    return Example31{C, expr::parse(example31_rho_source, {"t1", "t2"}), expr::Params{{"C", C}},
                     CounterexampleSpec(function_of_v(example31_p_source), C)};
}

} // namespace crtube
