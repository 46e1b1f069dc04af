#include "crtube/jet.hpp"

#include "fd_oracle.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

using namespace crtube;

namespace {

Jet1 jet1(std::array<double, 6> c)
{
    return Jet1(c);
}

void expect_coeffs(const Jet1& x, const std::array<double, 6>& want, double tol)
{
    for (int k = 0; k < 6; ++k) {
        EXPECT_NEAR(x.coeff(k), want[k], tol * std::max(1.0, std::abs(want[k]))) << "coefficient " << k;
    }
}

std::array<double, 6> random_coeffs(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 6> c{};
    for (auto& x : c) {
        x = u(rng);
    }
    return c;
}

} // namespace

TEST(JetConstruction, ConstantHasNoHigherCoefficients)
{
    expect_coeffs(Jet1::constant(0.0), {0, 0, 0, 0, 0, 0}, 0.0);
    const Jet2 c = Jet2::constant(3.5);
    EXPECT_EQ(c.coeff(0, 0), 3.5);
    for (std::size_t i = 1; i < Jet2::size; ++i) {
        EXPECT_EQ(c.coeffs()[i], 0.0);
    }
}

TEST(JetConstruction, UnitConstantIsMultiplicativeIdentity)
{
    const Jet1 x = jet1({0.3, -1.2, 0.5, 2.0, -0.7, 0.1});
    expect_coeffs(Jet1::constant(1.0) * x, {0.3, -1.2, 0.5, 2.0, -0.7, 0.1}, 0.0);
}

TEST(JetConstruction, Variables)
{
    expect_coeffs(Jet1::variable(0.0), {0, 1, 0, 0, 0, 0}, 0.0);
    const Jet2 t1 = Jet2::variable(2.0, 1);
    EXPECT_EQ(t1.coeff(0, 0), 2.0);
    EXPECT_EQ(t1.coeff(1, 0), 1.0);
    EXPECT_EQ(t1.coeff(0, 1), 0.0);
    const double a = 1.7;
    const Jet1 v = Jet1::variable(a);
    expect_coeffs(v * v, {a * a, 2 * a, 1, 0, 0, 0}, 1e-15);
}

TEST(JetArithmetic, SquareOfOnePlusH)
{
    const Jet1 x = jet1({1, 1, 0, 0, 0, 0});
    expect_coeffs(x * x, {1, 2, 1, 0, 0, 0}, 0.0);
}

TEST(JetArithmetic, SelfDivisionIsOne)
{
    const Jet1 x = jet1({0.8, -0.3, 1.1, 0.4, -2.0, 0.9});
    expect_coeffs(x / x, {1, 0, 0, 0, 0, 0}, 1e-15);
}

TEST(JetArithmetic, ProductOfCoordinatesIsMixedMonomial)
{
    const Jet2 p = Jet2::variable(0.0, 1) * Jet2::variable(0.0, 2);
    for (std::size_t i = 0; i < Jet2::size; ++i) {
        const auto& e = Jet2::layout::entries[i];
        EXPECT_EQ(p.coeffs()[i], e.j == 1 && e.k == 1 ? 1.0 : 0.0);
    }
}

TEST(JetArithmetic, DivisionBySingularJetThrows)
{
    const Jet1 zero = jet1({0, 1, 0, 0, 0, 0});
    EXPECT_THROW(Jet1::constant(1.0) / zero, DivisionBySingularJet);
    EXPECT_THROW(divide(Jet1::constant(1.0), jet1({1e-5, 1, 0, 0, 0, 0}), 1e-3), DivisionBySingularJet);
}

TEST(JetElementary, ExpSeries)
{
    expect_coeffs(exp(Jet1::variable(0.0)), {1, 1, 1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120}, 1e-15);
}

TEST(JetElementary, MercatorSeries)
{
    expect_coeffs(log(Jet1::variable(1.0)), {0, 1, -1.0 / 2, 1.0 / 3, -1.0 / 4, 1.0 / 5}, 1e-15);
}

TEST(JetElementary, HalfPowerOfPerfectSquare)
{
    expect_coeffs(pow(jet1({4, 4, 1, 0, 0, 0}), 0.5), {2, 1, 0, 0, 0, 0}, 1e-15);
    expect_coeffs(sqrt(jet1({4, 4, 1, 0, 0, 0})), {2, 1, 0, 0, 0, 0}, 1e-15);
}

TEST(JetElementary, DomainErrors)
{
    const Jet1 neg = jet1({-1, 1, 0, 0, 0, 0});
    EXPECT_THROW(log(neg), DomainError);
    EXPECT_THROW(sqrt(neg), DomainError);
    EXPECT_THROW(pow(neg, 1.5), DomainError);
    EXPECT_THROW(log(Jet1::constant(0.0)), DomainError);
}

TEST(JetElementary, SinCosPythagoras)
{
    const Jet2 x = Jet2::variable(0.4, 1) * Jet2::variable(-0.3, 2) + Jet2::variable(0.4, 1);
    const Jet2 one = sin(x) * sin(x) + cos(x) * cos(x);
    EXPECT_NEAR(one.value(), 1.0, 1e-15);
    for (std::size_t i = 1; i < Jet2::size; ++i) {
        EXPECT_NEAR(one.coeffs()[i], 0.0, 1e-14);
    }
}

TEST(JetElementary, ClosedFormHighOrderDerivatives)
{
    for (double x0 : {0.3, 0.9, 1.6}) {
        const Jet1 x = Jet1::variable(x0);
        EXPECT_NEAR(exp(x).derivative(4), std::exp(x0), 1e-10 * std::exp(x0));
        EXPECT_NEAR(exp(x).derivative(5), std::exp(x0), 1e-10 * std::exp(x0));
        const double l4 = -6.0 / std::pow(x0, 4), l5 = 24.0 / std::pow(x0, 5);
        EXPECT_NEAR(log(x).derivative(4), l4, 1e-10 * std::abs(l4));
        EXPECT_NEAR(log(x).derivative(5), l5, 1e-10 * std::abs(l5));
        const double r4 = 24.0 / std::pow(1 + x0, 5), r5 = -120.0 / std::pow(1 + x0, 6);
        EXPECT_NEAR((1.0 / (1.0 + x)).derivative(4), r4, 1e-10 * std::abs(r4));
        EXPECT_NEAR((1.0 / (1.0 + x)).derivative(5), r5, 1e-10 * std::abs(r5));
    }
}

TEST(JetCompose, IdentityOuterReturnsInner)
{
    const Jet2 inner = exp(Jet2::variable(0.2, 1)) * Jet2::variable(0.5, 2);
    const Jet2 out = compose(Jet1::variable(inner.value()), inner.value(), inner);
    for (std::size_t i = 0; i < Jet2::size; ++i) {
        EXPECT_NEAR(out.coeffs()[i], inner.coeffs()[i], 1e-15);
    }
}

TEST(JetCompose, ExpOfVariableMatchesSeries)
{
    const Jet1 e = exp(Jet1::variable(0.0));
    const Jet1 c = compose(e, 0.0, Jet1::variable(0.0));
    expect_coeffs(c, {1, 1, 1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120}, 1e-15);
}

TEST(JetCompose, LogOfOnePlusT1)
{
    const Jet1 outer = log(Jet1::variable(1.0));
    const Jet2 out = compose(outer, 1.0, 1.0 + Jet2::variable(0.0, 1));
    EXPECT_NEAR(out.coeff(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(out.coeff(2, 0), -0.5, 1e-15);
    EXPECT_NEAR(out.coeff(5, 0), 0.2, 1e-15);
    EXPECT_EQ(out.coeff(1, 1), 0.0);
}

TEST(JetCompose, MismatchedExpansionPointThrows)
{
    EXPECT_THROW(compose(Jet1::variable(1.0), 1.0, Jet1::variable(1.1)), ExpansionPointMismatch);
}

TEST(JetOrder, PartialLowersOrderAndGuardsExtraction)
{
    const Jet2 x = exp(Jet2::variable(0.1, 1) + 2.0 * Jet2::variable(0.2, 2));
    const Jet2 dx = partial(x, 2);
    EXPECT_EQ(dx.order(), 4);
    EXPECT_NEAR(dx.derivative(3, 1), 4.0 * std::exp(0.5), 1e-12);
    EXPECT_THROW(dx.derivative(5, 0), OrderExceeded);
}

TEST(JetProperties, RandomPolynomialProductsAreExact)
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_coeffs(rng);
        const auto b = random_coeffs(rng);
        const Jet1 prod = jet1(a) * jet1(b);
        const Jet1 sum = jet1(a) + jet1(b);
        const Jet1 diff = jet1(a) - jet1(b);
        for (int k = 0; k < 6; ++k) {
            double want = 0.0;
            for (int i = 0; i <= k; ++i) {
                want += a[i] * b[k - i];
            }
            EXPECT_NEAR(prod.coeff(k), want, 1e-13 * std::max(1.0, std::abs(want)));
            EXPECT_EQ(sum.coeff(k), a[k] + b[k]);
            EXPECT_EQ(diff.coeff(k), a[k] - b[k]);
        }
    }
}

TEST(JetProperties, LeibnizAtOrderThree)
{
    std::mt19937_64 rng(102);
    for (int trial = 0; trial < 50; ++trial) {
        const Jet1 f = jet1(random_coeffs(rng));
        const Jet1 g = jet1(random_coeffs(rng));
        const double want = f.derivative(0) * g.derivative(3) + 3 * f.derivative(1) * g.derivative(2)
                            + 3 * f.derivative(2) * g.derivative(1) + f.derivative(3) * g.derivative(0);
        EXPECT_NEAR((f * g).derivative(3), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(JetProperties, DivisionUndoesMultiplication)
{
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> lead(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_coeffs(rng);
        auto b = random_coeffs(rng);
        b[0] = lead(rng);
        const Jet1 back = (jet1(a) * jet1(b)) / jet1(b);
        expect_coeffs(back, a, 1e-12);
    }
}

TEST(JetProperties, FiniteDifferencesAgreeUpToOrderThree)
{
    const auto f = [](double x) { return std::exp(std::sin(x)) / (2.0 + x * x); };
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> at(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double x0 = at(rng);
        const Jet1 x = Jet1::variable(x0);
        const Jet1 fj = exp(sin(x)) / (2.0 + x * x);
        for (int n = 1; n <= 3; ++n) {
            const double fd = fd::fd_derivative(f, x0, n, n == 3 ? 1e-2 : 1e-3);
            EXPECT_NEAR(fj.derivative(n), fd, 1e-5 * std::max(1.0, std::abs(fd))) << "order " << n;
        }
    }
}

TEST(JetProperties, BivariateMixedPartialsMatchFiniteDifferences)
{
    const auto f = [](double a, double b) { return std::log(2.0 + a + a * b) * std::exp(b); };
    const Jet2 t1 = Jet2::variable(0.1, 1), t2 = Jet2::variable(-0.2, 2);
    const Jet2 fj = log(2.0 + t1 + t1 * t2) * exp(t2);
    for (int j = 0; j <= 2; ++j) {
        for (int k = 0; j + k <= 3; ++k) {
            const double fd = fd::fd_partial(f, 0.1, -0.2, j, k, 1e-2);
            EXPECT_NEAR(fj.derivative(j, k), fd, 1e-5 * std::max(1.0, std::abs(fd))) << j << "," << k;
        }
    }
}
