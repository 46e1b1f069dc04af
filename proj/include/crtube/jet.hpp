#pragma once

// Truncated Taylor arithmetic in one and two variables, fixed maximal order 5.
//
// Coefficients are stored normalized by factorials: for a univariate jet
// c[k] = f^(k)(a) / k!, and for a bivariate jet c(j,k) = d^(j+k) f / dt1^j dt2^k / (j! k!).
// Every jet also carries the highest order up to which its coefficients are
// meaningful. Arithmetic propagates the minimum order of its operands, and
// partial differentiation lowers it by one, so asking for a derivative that
// was never computed fails loudly instead of returning a silent zero.

#include "crtube/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace crtube {

inline constexpr int jet_max_order = 5;

namespace detail {

inline constexpr std::array<double, jet_max_order + 1> factorial = {1, 1, 2, 6, 24, 120};

template <int Vars>
struct jet_layout
{
    static_assert(Vars == 1 || Vars == 2, "jets exist in one or two variables");

    static constexpr std::size_t size = Vars == 1 ? jet_max_order + 1
                                                  : (jet_max_order + 1) * (jet_max_order + 2) / 2;

    struct entry
    {
        int j;
        int k;
        int degree;
    };

    // Graded order: degree 0, then degree 1 as (1,0),(0,1), and so on.
    static constexpr std::size_t index(int j, int k) noexcept
    {
        if constexpr (Vars == 1) {
            return static_cast<std::size_t>(j);
        } else {
            const int d = j + k;
            return static_cast<std::size_t>(d * (d + 1) / 2 + k);
        }
    }

    static constexpr std::array<entry, size> entries = [] {
        std::array<entry, size> out{};
        for (int d = 0; d <= jet_max_order; ++d) {
            for (int k = 0; k <= (Vars == 1 ? 0 : d); ++k) {
                const int j = d - k;
                out[index(j, k)] = entry{j, k, d};
            }
        }
        return out;
    }();

    // product[a][b] = index of the monomial entries[a] * entries[b], or -1 when
    // the product falls beyond the maximal order.
    static constexpr std::array<std::array<int, size>, size> product = [] {
        std::array<std::array<int, size>, size> out{};
        for (std::size_t a = 0; a < size; ++a) {
            for (std::size_t b = 0; b < size; ++b) {
                const auto& ea = entries[a];
                const auto& eb = entries[b];
                out[a][b] = ea.degree + eb.degree > jet_max_order
                                ? -1
                                : static_cast<int>(index(ea.j + eb.j, ea.k + eb.k));
            }
        }
        return out;
    }();
};

} // namespace detail

template <int Vars>
class Jet
{
public:
    using layout = detail::jet_layout<Vars>;
    static constexpr std::size_t size = layout::size;
    static constexpr int vars = Vars;

    Jet() = default;

    explicit Jet(const std::array<double, size>& coeffs, int order = jet_max_order)
        : c_(coeffs), order_(order)
    {
        clear_above_order();
    }

    static Jet constant(double c)
    {
        Jet out;
        out.c_[0] = c;
        return out;
    }

    /// The coordinate function t_index expanded at `a` (index is 1-based).
    static Jet variable(double a, int index = 1)
    {
        if (index < 1 || index > Vars) {
            throw InvalidParameter("jet variable index " + std::to_string(index) + " out of range");
        }
        Jet out;
        out.c_[0] = a;
        out.c_[index == 1 ? layout::index(1, 0) : layout::index(0, 1)] = 1.0;
        return out;
    }

    int order() const noexcept { return order_; }
    double value() const noexcept { return c_[0]; }
    const std::array<double, size>& coeffs() const noexcept { return c_; }

    double coeff(int j, int k = 0) const
    {
        check_multi_index(j, k);
        return c_[layout::index(j, k)];
    }

    void set_coeff(int j, int k, double value)
    {
        check_multi_index(j, k);
        c_[layout::index(j, k)] = value;
    }

    /// Raw partial derivative d^(j+k)/dt1^j dt2^k at the expansion point.
    double derivative(int j, int k = 0) const
    {
        return coeff(j, k) * detail::factorial[static_cast<std::size_t>(j)]
               * detail::factorial[static_cast<std::size_t>(k)];
    }

    /// Reinterpret the jet as valid up to `order`. Lowering truncates; raising
    /// treats the unknown higher coefficients as zero and is only sound inside
    /// fixed-point iterations whose result is truncated back afterwards.
    Jet with_order(int order) const
    {
        Jet out = *this;
        out.order_ = order;
        out.clear_above_order();
        return out;
    }

    bool is_finite() const noexcept
    {
        for (double x : c_) {
            if (!std::isfinite(x)) {
                return false;
            }
        }
        return true;
    }

    Jet operator-() const
    {
        Jet out = *this;
        for (double& x : out.c_) {
            x = -x;
        }
        return out;
    }

    Jet& operator+=(const Jet& rhs)
    {
        for (std::size_t i = 0; i < size; ++i) {
            c_[i] += rhs.c_[i];
        }
        merge_order(rhs.order_);
        return *this;
    }

    Jet& operator-=(const Jet& rhs)
    {
        for (std::size_t i = 0; i < size; ++i) {
            c_[i] -= rhs.c_[i];
        }
        merge_order(rhs.order_);
        return *this;
    }

    Jet& operator*=(const Jet& rhs)
    {
        *this = *this * rhs;
        return *this;
    }

    Jet& operator/=(const Jet& rhs)
    {
        *this = *this / rhs;
        return *this;
    }

    Jet& operator+=(double s)
    {
        c_[0] += s;
        return *this;
    }

    Jet& operator-=(double s)
    {
        c_[0] -= s;
        return *this;
    }

    Jet& operator*=(double s)
    {
        for (double& x : c_) {
            x *= s;
        }
        return *this;
    }

    Jet& operator/=(double s)
    {
        for (double& x : c_) {
            x /= s;
        }
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a /= s; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet out;
        out.order_ = a.order_ < b.order_ ? a.order_ : b.order_;
        for (std::size_t i = 0; i < size; ++i) {
            if (a.c_[i] == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < size; ++j) {
                const int target = layout::product[i][j];
                if (target >= 0) {
                    out.c_[static_cast<std::size_t>(target)] += a.c_[i] * b.c_[j];
                }
            }
        }
        out.clear_above_order();
        return out;
    }

    friend Jet operator/(double s, const Jet& b) { return Jet::constant(s) / b; }

private:
    void check_multi_index(int j, int k) const
    {
        if (j < 0 || k < 0 || (Vars == 1 && k != 0) || j + k > jet_max_order) {
            throw InvalidParameter("jet multi-index (" + std::to_string(j) + "," + std::to_string(k)
                                   + ") out of range");
        }
        if (j + k > order_) {
            throw OrderExceeded("requested order " + std::to_string(j + k)
                                + " from a jet valid to order " + std::to_string(order_));
        }
    }

    void merge_order(int other)
    {
        if (other < order_) {
            order_ = other;
            clear_above_order();
        }
    }

    void clear_above_order()
    {
        for (std::size_t i = 0; i < size; ++i) {
            if (layout::entries[i].degree > order_) {
                c_[i] = 0.0;
            }
        }
    }

    std::array<double, size> c_{};
    int order_ = jet_max_order;
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

/// Absolute threshold below which a divisor's constant term counts as zero.
inline constexpr double default_division_epsilon = 1e-300;

namespace detail {

using series = std::array<double, jet_max_order + 1>;

inline series series_div(const series& x, const series& y, int n)
{
    series q{};
    for (int k = 0; k <= n; ++k) {
        double acc = x[k];
        for (int j = 1; j <= k; ++j) {
            acc -= y[j] * q[k - j];
        }
        q[k] = acc / y[0];
    }
    return q;
}

inline series series_exp(const series& a, int n)
{
    series e{};
    e[0] = std::exp(a[0]);
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += j * a[j] * e[k - j];
        }
        e[k] = acc / k;
    }
    return e;
}

inline series series_log(const series& a, int n)
{
    series l{};
    l[0] = std::log(a[0]);
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j < k; ++j) {
            acc += j * l[j] * a[k - j];
        }
        l[k] = (a[k] - acc / k) / a[0];
    }
    return l;
}

inline series series_sqrt(const series& a, int n)
{
    series y{};
    y[0] = std::sqrt(a[0]);
    for (int k = 1; k <= n; ++k) {
        double acc = a[k];
        for (int j = 1; j < k; ++j) {
            acc -= y[j] * y[k - j];
        }
        y[k] = acc / (2.0 * y[0]);
    }
    return y;
}

// y = a^r satisfies a y' = r a' y.
inline series series_pow(const series& a, double r, int n)
{
    series y{};
    y[0] = std::pow(a[0], r);
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += ((r + 1.0) * j - k) * a[j] * y[k - j];
        }
        y[k] = acc / (k * a[0]);
    }
    return y;
}

inline void series_sincos(const series& a, int n, series& s, series& c)
{
    s = {};
    c = {};
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= n; ++k) {
        double as = 0.0;
        double ac = 0.0;
        for (int j = 1; j <= k; ++j) {
            as += j * a[j] * c[k - j];
            ac += j * a[j] * s[k - j];
        }
        s[k] = as / k;
        c[k] = -ac / k;
    }
}

inline void require_positive(double c0, const char* fn)
{
    if (!(c0 > 0.0)) {
        throw DomainError(std::string(fn) + " of a jet with constant term " + std::to_string(c0));
    }
}

} // namespace detail

/// Taylor composition f(inner) where `outer` is the jet of f expanded at `at`,
/// which must coincide with inner's constant term.
template <int Vars>
Jet<Vars> compose(const Jet1& outer, double at, const Jet<Vars>& inner)
{
    if (std::abs(at - inner.value()) > 1e-12 * (1.0 + std::abs(at))) {
        throw ExpansionPointMismatch("outer jet expanded at " + std::to_string(at)
                                     + " but inner value is " + std::to_string(inner.value()));
    }
    Jet<Vars> h = inner;
    h.set_coeff(0, 0, 0.0);
    const int order = outer.order() < inner.order() ? outer.order() : inner.order();
    Jet<Vars> out = Jet<Vars>::constant(outer.coeff(order)).with_order(order);
    for (int k = order - 1; k >= 0; --k) {
        out = out * h;
        out += outer.coeff(k);
    }
    return out.with_order(order);
}

namespace detail {

// Apply a univariate series map directly to a Jet1, or via composition to a Jet2.
template <int Vars, class SeriesFn>
Jet<Vars> apply_series(const Jet<Vars>& x, SeriesFn&& fn)
{
    if constexpr (Vars == 1) {
        return Jet1(fn(x.coeffs(), x.order()), x.order());
    } else {
        const Jet1 outer(fn(Jet1::variable(x.value()).coeffs(), jet_max_order));
        return compose(outer, x.value(), x);
    }
}

} // namespace detail

template <int Vars>
Jet<Vars> divide(const Jet<Vars>& a, const Jet<Vars>& b, double eps)
{
    if (!(std::abs(b.value()) >= eps)) {
        throw DivisionBySingularJet("divisor constant term " + std::to_string(b.value()));
    }
    if constexpr (Vars == 1) {
        const int n = a.order() < b.order() ? a.order() : b.order();
        return Jet1(detail::series_div(a.coeffs(), b.coeffs(), n), n);
    } else {
        const Jet1 one = Jet1::constant(1.0);
        const Jet2 recip = detail::apply_series(b, [&](const detail::series& s, int n) {
            return detail::series_div(one.coeffs(), s, n);
        });
        return a * recip;
    }
}

template <int Vars>
Jet<Vars> operator/(const Jet<Vars>& a, const Jet<Vars>& b)
{
    return divide(a, b, default_division_epsilon);
}

template <int Vars>
Jet<Vars> exp(const Jet<Vars>& x)
{
    if (!std::isfinite(x.value())) {
        throw DomainError("exp of a non-finite jet");
    }
    return detail::apply_series(x, detail::series_exp);
}

template <int Vars>
Jet<Vars> log(const Jet<Vars>& x)
{
    detail::require_positive(x.value(), "log");
    return detail::apply_series(x, detail::series_log);
}

template <int Vars>
Jet<Vars> sqrt(const Jet<Vars>& x)
{
    detail::require_positive(x.value(), "sqrt");
    return detail::apply_series(x, detail::series_sqrt);
}

template <int Vars>
Jet<Vars> pow(const Jet<Vars>& x, double r)
{
    detail::require_positive(x.value(), "pow");
    return detail::apply_series(x, [r](const detail::series& s, int n) {
        return detail::series_pow(s, r, n);
    });
}

template <int Vars>
Jet<Vars> sin(const Jet<Vars>& x)
{
    return detail::apply_series(x, [](const detail::series& a, int n) {
        detail::series s, c;
        detail::series_sincos(a, n, s, c);
        return s;
    });
}

template <int Vars>
Jet<Vars> cos(const Jet<Vars>& x)
{
    return detail::apply_series(x, [](const detail::series& a, int n) {
        detail::series s, c;
        detail::series_sincos(a, n, s, c);
        return c;
    });
}

/// x^n by repeated multiplication; negative n goes through one division.
template <int Vars>
Jet<Vars> ipow(const Jet<Vars>& x, int n)
{
    Jet<Vars> out = Jet<Vars>::constant(1.0).with_order(x.order());
    for (int i = 0; i < (n < 0 ? -n : n); ++i) {
        out = out * x;
    }
    return n < 0 ? Jet<Vars>::constant(1.0) / out : out;
}

/// Partial derivative with respect to t_var (1-based). The result is valid to
/// one order less than its argument.
template <int Vars>
Jet<Vars> partial(const Jet<Vars>& x, int var = 1)
{
    if (var < 1 || var > Vars) {
        throw InvalidParameter("partial: variable index " + std::to_string(var) + " out of range");
    }
    if (x.order() < 1) {
        throw OrderExceeded("cannot differentiate a jet of order " + std::to_string(x.order()));
    }
    using layout = typename Jet<Vars>::layout;
    std::array<double, Jet<Vars>::size> c{};
    for (std::size_t i = 0; i < Jet<Vars>::size; ++i) {
        const auto& e = layout::entries[i];
        if (e.degree >= jet_max_order) {
            continue;
        }
        if (var == 1) {
            c[i] = (e.j + 1) * x.coeffs()[layout::index(e.j + 1, e.k)];
        } else {
            c[i] = (e.k + 1) * x.coeffs()[layout::index(e.j, e.k + 1)];
        }
    }
    return Jet<Vars>(c, x.order() - 1);
}

} // namespace crtube
