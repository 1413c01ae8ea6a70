#include "vesselkit/jet.hpp"

#include <algorithm>
#include <cmath>

#include "vesselkit/error.hpp"

namespace vesselkit {

using cd = std::complex<double>;

Jet Jet::constant(cd v, std::size_t order) {
    std::vector<cd> c(order + 1, 0.0);
    c[0] = v;
    return Jet(std::move(c));
}

Jet Jet::variable(double t0, std::size_t order) {
    std::vector<cd> c(order + 1, 0.0);
    c[0] = t0;
    if (order >= 1) c[1] = 1.0;
    return Jet(std::move(c));
}

cd Jet::derivative_value(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return coeff(k) * f;
}

cd Jet::evaluate(double s) const {
    cd acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * s + c_[k];
    return acc;
}

Jet Jet::derivative() const {
    if (c_.size() <= 1) return Jet(std::vector<cd>{0.0});
    std::vector<cd> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Jet(std::move(d));
}

Jet Jet::integrate(cd c0) const {
    std::vector<cd> d(c_.size() + 1);
    d[0] = c0;
    for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Jet(std::move(d));
}

Jet Jet::truncate(std::size_t order) const {
    std::vector<cd> d(c_.begin(), c_.begin() + static_cast<long>(std::min(c_.size(), order + 1)));
    return Jet(std::move(d));
}

Jet Jet::conj() const {
    std::vector<cd> d(c_);
    for (auto& z : d) z = std::conj(z);
    return Jet(std::move(d));
}

Jet Jet::operator-() const {
    Jet r(*this);
    for (auto& z : r.c_) z = -z;
    return r;
}

namespace {

std::size_t common(const std::vector<cd>& a, const std::vector<cd>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "empty jet in arithmetic");
    return std::min(a.size(), b.size());
}

} // namespace

Jet& Jet::operator+=(const Jet& o) {
    const std::size_t n = common(c_, o.c_);
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    const std::size_t n = common(c_, o.c_);
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(cd s) {
    for (auto& z : c_) z *= s;
    return *this;
}

Jet operator+(Jet a, cd s) {
    if (a.c_.empty()) a.c_.push_back(0.0);
    a.c_[0] += s;
    return a;
}

Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t n = common(a.c_, b.c_);
    std::vector<cd> r(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i <= k; ++i) r[k] += a.c_[i] * b.c_[k - i];
    return Jet(std::move(r));
}

Jet operator/(const Jet& a, const Jet& b) {
    const std::size_t n = common(a.c_, b.c_);
    if (b.c_[0] == cd(0.0)) throw Error(ErrorKind::SingularOperator, "jet division by a zero value");
    std::vector<cd> q(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc = a.c_[k];
        for (std::size_t i = 1; i <= k; ++i) acc -= b.c_[i] * q[k - i];
        q[k] = acc / b.c_[0];
    }
    return Jet(std::move(q));
}

Jet exp(const Jet& f) {
    const auto& c = f.coeffs();
    std::vector<cd> y(c.size(), 0.0);
    y[0] = std::exp(c[0]);
    for (std::size_t k = 1; k < c.size(); ++k) {
        cd acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * c[j] * y[k - j];
        y[k] = acc / static_cast<double>(k);
    }
    return Jet(std::move(y));
}

namespace {

void sin_cos(const Jet& f, std::vector<cd>& s, std::vector<cd>& co) {
    const auto& c = f.coeffs();
    s.assign(c.size(), 0.0);
    co.assign(c.size(), 0.0);
    s[0] = std::sin(c[0]);
    co[0] = std::cos(c[0]);
    for (std::size_t k = 1; k < c.size(); ++k) {
        cd as = 0.0, ac = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            as += static_cast<double>(j) * c[j] * co[k - j];
            ac -= static_cast<double>(j) * c[j] * s[k - j];
        }
        s[k] = as / static_cast<double>(k);
        co[k] = ac / static_cast<double>(k);
    }
}

} // namespace

Jet sin(const Jet& f) {
    std::vector<cd> s, c;
    sin_cos(f, s, c);
    return Jet(std::move(s));
}

Jet cos(const Jet& f) {
    std::vector<cd> s, c;
    sin_cos(f, s, c);
    return Jet(std::move(c));
}

Jet tanh(const Jet& f) {
    // y' = f' (1 - y^2)
    const auto& c = f.coeffs();
    std::vector<cd> y(c.size(), 0.0), u(c.size(), 0.0);
    y[0] = std::tanh(c[0]);
    auto u_at = [&](std::size_t m) {
        cd acc = m == 0 ? cd(1.0) : cd(0.0);
        for (std::size_t i = 0; i <= m; ++i) acc -= y[i] * y[m - i];
        return acc;
    };
    u[0] = u_at(0);
    for (std::size_t k = 1; k < c.size(); ++k) {
        cd acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * c[j] * u[k - j];
        y[k] = acc / static_cast<double>(k);
        u[k] = u_at(k);
    }
    return Jet(std::move(y));
}

Jet sech2(const Jet& f) {
    const Jet t = tanh(f);
    return 1.0 - t * t;
}

} // namespace vesselkit
