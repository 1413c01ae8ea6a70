#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vesselkit {

// Truncated Taylor series in s = t - t0: c[k] = f^(k)(t0) / k!.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::vector<std::complex<double>> coeffs) : c_(std::move(coeffs)) {}

    static Jet constant(std::complex<double> v, std::size_t order);
    static Jet variable(double t0, std::size_t order);

    std::size_t order() const { return c_.empty() ? 0 : c_.size() - 1; }
    bool empty() const { return c_.empty(); }
    const std::vector<std::complex<double>>& coeffs() const { return c_; }
    std::complex<double> coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    std::complex<double> value() const { return coeff(0); }
    // k-th derivative at t0
    std::complex<double> derivative_value(std::size_t k) const;
    std::complex<double> evaluate(double s) const;

    Jet derivative() const;
    Jet integrate(std::complex<double> c0) const;
    Jet truncate(std::size_t order) const;
    Jet conj() const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(std::complex<double> s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, std::complex<double> s) { return a *= s; }
    friend Jet operator*(std::complex<double> s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, std::complex<double> s);
    friend Jet operator+(std::complex<double> s, Jet a) { return a + s; }
    friend Jet operator-(Jet a, std::complex<double> s) { return a + (-s); }
    friend Jet operator-(std::complex<double> s, const Jet& a) { return -a + s; }

private:
    std::vector<std::complex<double>> c_;
};

Jet exp(const Jet& f);
Jet sin(const Jet& f);
Jet cos(const Jet& f);
Jet tanh(const Jet& f);
Jet sech2(const Jet& f);

} // namespace vesselkit
