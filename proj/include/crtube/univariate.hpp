#pragma once

#include "crtube/error.hpp"
#include "crtube/expr.hpp"
#include "crtube/jet.hpp"
#include "crtube/quadrature.hpp"

#include <array>
#include <memory>
#include <string>
#include <utility>

namespace crtube {

/// A smooth function of one variable that can be expanded as an order-5 jet.
class UnivariateFunction
{
public:
    virtual ~UnivariateFunction() = default;

    virtual Jet1 jet(double v) const = 0;
    virtual std::string describe() const = 0;

    virtual double value(double v) const { return jet(v).value(); }

    /// Integral over [0, v]. The default is composite Gauss-Legendre with
    /// panels of width at most 0.1.
    virtual double integral(double v) const
    {
        return integrate_gl16([this](double x) { return value(x); }, 0.0, v, 0.1);
    }
};

using Univariate = std::shared_ptr<const UnivariateFunction>;

/// A univariate function given by an expression in the variable `v`.
class ExprFunction final : public UnivariateFunction
{
public:
    ExprFunction(expr::Expr e, expr::Params params) : expr_(std::move(e)), params_(std::move(params))
    {
        if (expr_.vars().size() != 1) {
            throw InvalidParameter("univariate expression must declare exactly one variable");
        }
        expr::require_bound(expr_, params_);
    }

    Jet1 jet(double v) const override
    {
        const std::array<double, 1> at{v};
        return expr::eval_jet<1>(expr_, at, params_);
    }

    double value(double v) const override
    {
        const std::array<double, 1> at{v};
        return expr::evaluate(expr_, at, params_);
    }

    std::string describe() const override { return expr_.source(); }

    const expr::Expr& expression() const noexcept { return expr_; }

private:
    expr::Expr expr_;
    expr::Params params_;
};

inline Univariate function_of_v(std::string_view src, const expr::Params& params = {})
{
    return std::make_shared<ExprFunction>(expr::parse(src, {"v"}), params);
}

} // namespace crtube
