#include <gtest/gtest.h>

#include <cmath>

#include "vesselkit/error.hpp"
#include "vesselkit/expr.hpp"
#include "vesselkit/jet.hpp"

using namespace vesselkit;

namespace {

double sech2d(double t) { return 1.0 / (std::cosh(t) * std::cosh(t)); }

// central differences of a scalar function, used as an independent check on derivatives
double fd(const std::function<double(double)>& f, double t, int k) {
    const double h = 1e-3;
    if (k == 1) return (f(t + h) - f(t - h)) / (2 * h);
    if (k == 2) return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
    return (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h * h * h);
}

} // namespace

TEST(Jet, ProductAndQuotientOfPolynomials) {
    const Jet x = Jet::variable(2.0, 6);
    const Jet p = x * x + 1.0;   // t^2 + 1
    const Jet q = p / (x + 3.0); // (t^2+1)/(t+3)
    EXPECT_NEAR(std::abs(p.value() - 5.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.derivative_value(1) - 4.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.derivative_value(2) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.derivative_value(3)), 0.0, 1e-15);
    // d/dt (t^2+1)/(t+3) = (t^2 + 6t - 1)/(t+3)^2 = 15/25 at t = 2
    EXPECT_NEAR(std::abs(q.derivative_value(1) - 0.6), 0.0, 1e-14);
    EXPECT_NEAR(std::abs((q * (x + 3.0)).derivative_value(4)), 0.0, 1e-13);
}

TEST(Jet, ExpSinCosTanh) {
    const double t0 = 0.37;
    const Jet x = Jet::variable(t0, 8);
    const Jet e = exp(x), s = sin(x), c = cos(x), th = tanh(x);
    for (std::size_t k = 0; k <= 8; ++k) {
        EXPECT_NEAR(std::abs(e.derivative_value(k) - std::exp(t0)), 0.0, 1e-12);
        EXPECT_NEAR(s.derivative_value(k).real(), std::sin(t0 + static_cast<double>(k) * std::acos(0.0)), 1e-12);
    }
    EXPECT_NEAR(std::abs(s.derivative_value(3) + std::cos(t0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(c.derivative_value(2) + std::cos(t0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(th.derivative_value(1) - sech2d(t0)), 0.0, 1e-14);
    const auto tf = [](double t) { return std::tanh(t); };
    EXPECT_NEAR(th.derivative_value(2).real(), fd(tf, t0, 2), 1e-5);
    EXPECT_NEAR(th.derivative_value(3).real(), fd(tf, t0, 3), 1e-4);
    EXPECT_NEAR(std::abs(sech2(x).value() - sech2d(t0)), 0.0, 1e-15);
}

TEST(Jet, EvaluateIsTaylorPolynomial) {
    const Jet e = exp(Jet::variable(0.0, 20));
    EXPECT_NEAR(std::abs(e.evaluate(0.5) - std::exp(0.5)), 0.0, 1e-14);
}

TEST(Jet, DerivativeThenIntegrateRoundTrips) {
    const Jet th = tanh(Jet::variable(0.2, 10));
    const Jet back = th.derivative().integrate(th.value());
    for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(std::abs(back.coeff(k) - th.coeff(k)), 0.0, 1e-13);
}

TEST(Expr, StringShorthand) {
    const auto f = parse_expr("-1 - tanh");
    const Jet j = f(0.4, 3);
    EXPECT_NEAR(j.value().real(), -1.0 - std::tanh(0.4), 1e-15);
    EXPECT_NEAR(j.derivative_value(1).real(), -sech2d(0.4), 1e-14);
    EXPECT_NEAR(real_value(parse_expr("2*sech2 + 0.5"), 0.1), 2 * sech2d(0.1) + 0.5, 1e-15);
    EXPECT_NEAR(real_value(parse_expr("-tanh"), 0.3), -std::tanh(0.3), 1e-15);
}

TEST(Expr, ObjectForms) {
    const nlohmann::json spec = {{"kind", "sum"},
                                 {"terms",
                                  {{{"kind", "tanh"}, {"amp", 2.0}, {"rate", 3.0}, {"shift", 0.1}},
                                   {{"kind", "sin"}, {"amp", 1.0}, {"freq", 2.0}, {"phase", 0.5}},
                                   {{"kind", "exp"}, {"amp", {0.0, 1.0}}, {"rate", -1.0}},
                                   {{"kind", "ratio"}, {"num", {1.0}}, {"den", {1.0, 0.0, 1.0}}},
                                   {{"kind", "const"}, {"value", 4.0}}}}};
    const auto f = parse_expr(spec);
    const double t = 0.7;
    const std::complex<double> want = 2 * std::tanh(3 * (t - 0.1)) + std::sin(2 * t + 0.5) +
                                      std::complex<double>(0, 1) * std::exp(-t) + 1 / (1 + t * t) + 4.0;
    EXPECT_NEAR(std::abs(f(t, 0).value() - want), 0.0, 1e-14);
    const auto re = [&](double s) { return f(s, 0).value().real(); };
    EXPECT_NEAR(f(t, 2).derivative_value(1).real(), fd(re, t, 1), 1e-5);
}

TEST(Expr, UnknownFormsRejected) {
    for (const nlohmann::json bad : {nlohmann::json("cosh"), nlohmann::json("2*"), nlohmann::json("tanh tanh"),
                                     nlohmann::json{{"kind", "bessel"}},
                                     nlohmann::json{{"kind", "tanh"}, {"speed", 1.0}},
                                     nlohmann::json{{"kind", "sum"}, {"terms", nlohmann::json::array()}}}) {
        try {
            parse_expr(bad);
            ADD_FAILURE() << bad.dump();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid) << bad.dump();
        }
    }
}
