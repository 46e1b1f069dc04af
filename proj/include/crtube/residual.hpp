#pragma once

#include <cmath>
#include <initializer_list>

namespace crtube {

/// A residual kept together with its scale: the sum of absolute values of the
/// individual terms that were added up to form it.
struct Residual
{
    double raw = 0.0;
    double scale = 0.0;

    /// |raw| / scale, dimensionless; 0 when every term vanishes.
    double normalized() const noexcept { return scale > 0.0 ? std::abs(raw) / scale : 0.0; }

    static Residual of(std::initializer_list<double> terms) noexcept
    {
        Residual r;
        for (double t : terms) {
            r.raw += t;
            r.scale += std::abs(t);
        }
        return r;
    }
};

} // namespace crtube
