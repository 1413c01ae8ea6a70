#include "vesselkit/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "vesselkit/error.hpp"

namespace vesselkit {

using cd = std::complex<double>;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, "expression: " + msg); }

cd number(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    bad(std::string(what) + " must be a number or [re, im]");
}

double real_number(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + " must be a real number");
    return j.get<double>();
}

void only_keys(const json& j, std::set<std::string> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown field '" + it.key() + "'");
}

template <class F>
ScalarFunction scaled_shifted(cd amp, double rate, double shift, F fn) {
    return [=](double t, std::size_t order) {
        const Jet arg = (Jet::variable(t, order) - shift) * rate;
        return fn(arg) * amp;
    };
}

ScalarFunction named(const std::string& name, cd amp) {
    if (name == "tanh") return scaled_shifted(amp, 1.0, 0.0, [](const Jet& a) { return tanh(a); });
    if (name == "sech2") return scaled_shifted(amp, 1.0, 0.0, [](const Jet& a) { return sech2(a); });
    if (name == "sin") return scaled_shifted(amp, 1.0, 0.0, [](const Jet& a) { return sin(a); });
    if (name == "exp") return scaled_shifted(amp, 1.0, 0.0, [](const Jet& a) { return exp(a); });
    bad("unknown function '" + name + "'");
}

ScalarFunction constant(cd v) {
    return [v](double, std::size_t order) { return Jet::constant(v, order); };
}

ScalarFunction sum(std::vector<ScalarFunction> terms) {
    return [terms](double t, std::size_t order) {
        Jet acc = Jet::constant(0.0, order);
        for (const auto& f : terms) acc += f(t, order);
        return acc;
    };
}

ScalarFunction polynomial_ratio(std::vector<cd> num, std::vector<cd> den) {
    return [num, den](double t, std::size_t order) {
        auto poly = [&](const std::vector<cd>& c) {
            const Jet x = Jet::variable(t, order);
            Jet acc = Jet::constant(0.0, order);
            for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
            return acc;
        };
        const Jet d = poly(den);
        if (std::abs(d.value()) < 1e-300) throw Error(ErrorKind::SingularOperator, "ratio denominator vanishes", t);
        return poly(num) / d;
    };
}

ScalarFunction parse_string(const std::string& src) {
    std::size_t i = 0;
    auto skip = [&] {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    };
    std::vector<ScalarFunction> terms;
    bool first = true;
    for (;;) {
        skip();
        if (i >= src.size()) break;
        double sign = 1.0;
        if (src[i] == '+' || src[i] == '-') {
            sign = src[i] == '-' ? -1.0 : 1.0;
            ++i;
            skip();
        } else if (!first) {
            bad("expected '+' or '-' in '" + src + "'");
        }
        first = false;
        double coef = 1.0;
        bool have_number = false;
        if (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) {
            std::size_t used = 0;
            coef = std::stod(src.substr(i), &used);
            i += used;
            have_number = true;
            skip();
            if (i < src.size() && src[i] == '*') {
                ++i;
                skip();
            } else {
                terms.push_back(constant(sign * coef));
                continue;
            }
        }
        std::size_t j = i;
        while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])))) ++j;
        if (j == i) bad(have_number ? "expected a function name after '*'" : "empty term in '" + src + "'");
        terms.push_back(named(src.substr(i, j - i), sign * coef));
        i = j;
    }
    if (terms.empty()) bad("empty expression");
    return sum(std::move(terms));
}

} // namespace

ScalarFunction parse_expr(const json& spec) {
    if (spec.is_number() || (spec.is_array() && spec.size() == 2)) return constant(number(spec, "constant"));
    if (spec.is_string()) return parse_string(spec.get<std::string>());
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
        bad("expected a string, a number or an object with a 'kind'");
    const std::string kind = spec["kind"];
    if (kind == "const") {
        only_keys(spec, {"kind", "value"});
        return constant(number(spec.at("value"), "value"));
    }
    if (kind == "tanh" || kind == "sech2") {
        only_keys(spec, {"kind", "amp", "rate", "shift"});
        const cd amp = spec.contains("amp") ? number(spec["amp"], "amp") : cd(1.0);
        const double rate = spec.contains("rate") ? real_number(spec["rate"], "rate") : 1.0;
        const double shift = spec.contains("shift") ? real_number(spec["shift"], "shift") : 0.0;
        if (kind == "tanh") return scaled_shifted(amp, rate, shift, [](const Jet& a) { return tanh(a); });
        return scaled_shifted(amp, rate, shift, [](const Jet& a) { return sech2(a); });
    }
    if (kind == "sin") {
        only_keys(spec, {"kind", "amp", "freq", "phase"});
        const cd amp = spec.contains("amp") ? number(spec["amp"], "amp") : cd(1.0);
        const double freq = spec.contains("freq") ? real_number(spec["freq"], "freq") : 1.0;
        const double phase = spec.contains("phase") ? real_number(spec["phase"], "phase") : 0.0;
        return [=](double t, std::size_t order) { return sin(Jet::variable(t, order) * freq + phase) * amp; };
    }
    if (kind == "exp") {
        only_keys(spec, {"kind", "amp", "rate"});
        const cd amp = spec.contains("amp") ? number(spec["amp"], "amp") : cd(1.0);
        const double rate = spec.contains("rate") ? real_number(spec["rate"], "rate") : 1.0;
        return [=](double t, std::size_t order) { return exp(Jet::variable(t, order) * rate) * amp; };
    }
    if (kind == "ratio") {
        only_keys(spec, {"kind", "num", "den"});
        auto coeffs = [&](const char* key) {
            if (!spec.contains(key) || !spec[key].is_array() || spec[key].empty())
                bad(std::string("ratio needs a non-empty '") + key + "' array");
            std::vector<cd> c;
            for (const auto& v : spec[key]) c.push_back(number(v, key));
            return c;
        };
        return polynomial_ratio(coeffs("num"), coeffs("den"));
    }
    if (kind == "sum") {
        only_keys(spec, {"kind", "terms"});
        if (!spec.contains("terms") || !spec["terms"].is_array() || spec["terms"].empty())
            bad("sum needs a non-empty 'terms' array");
        std::vector<ScalarFunction> terms;
        for (const auto& t : spec["terms"]) terms.push_back(parse_expr(t));
        return sum(std::move(terms));
    }
    bad("unknown kind '" + kind + "'");
}

double real_value(const ScalarFunction& f, double t) { return f(t, 0).value().real(); }

} // namespace vesselkit
