#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace crtube {

/// Composite 16-point Gauss-Legendre rule on [a, b] with equal panels no wider
/// than `max_panel_width` (at least one panel). Oriented: swapping a and b flips
/// the sign.
template <class F>
double integrate_gl16(F&& f, double a, double b, double max_panel_width)
{
    if (a == b) {
        return 0.0;
    }
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_panel_width)));
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = i + 1 == panels ? b : lo + h;
        sum += boost::math::quadrature::gauss<double, 16>::integrate(f, lo, hi);
    }
    return sum;
}

} // namespace crtube
