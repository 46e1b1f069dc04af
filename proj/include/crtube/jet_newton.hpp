#pragma once

#include "crtube/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace crtube {

/// Jet of the implicitly defined function V with equation(V) = 0 and
/// V(expansion point) = root, where `root` already solves the scalar equation.
/// `derivative(V)` is the jet of d(equation)/dV; it may be valid to a lower
/// order than the equation, which only slows convergence: the fixed point
/// still solves the equation up to `order`.
template <int Vars, class Equation, class Derivative>
Jet<Vars> solve_implicit_jet(double root, int order, Equation&& equation, Derivative&& derivative)
{
    Jet<Vars> v = Jet<Vars>::constant(root).with_order(order);
    for (int it = 0; it < 12; ++it) {
        Jet<Vars> delta = equation(v).with_order(order) / derivative(v).with_order(order);
        delta.set_coeff(0, 0, 0.0);
        v -= delta;
        double step = 0.0;
        double size = 1.0;
        for (std::size_t i = 0; i < Jet<Vars>::size; ++i) {
            step = std::max(step, std::abs(delta.coeffs()[i]));
            size = std::max(size, std::abs(v.coeffs()[i]));
        }
        if (step <= 1e-16 * size) {
            break;
        }
    }
    return v.with_order(order);
}

} // namespace crtube
