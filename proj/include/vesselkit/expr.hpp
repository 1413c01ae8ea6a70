#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "vesselkit/jet.hpp"

namespace vesselkit {

// f(t) and its Taylor coefficients at t up to the given order.
using ScalarFunction = std::function<Jet(double t, std::size_t order)>;

// Small closed vocabulary: const, tanh, sech2, sin, exp, ratio (of polynomials) and sums of these.
// Accepted forms:
//   "-tanh", "1 - 2*sech2", "0.5"
//   {"kind":"tanh","amp":a,"rate":k,"shift":s}      a tanh(k (t - s))
//   {"kind":"sech2","amp":a,"rate":k,"shift":s}     a sech^2(k (t - s))
//   {"kind":"sin","amp":a,"freq":k,"phase":p}       a sin(k t + p)
//   {"kind":"exp","amp":a,"rate":k}                 a exp(k t)
//   {"kind":"ratio","num":[c0,c1,..],"den":[..]}    polynomials in t, ascending
//   {"kind":"const","value":c}
//   {"kind":"sum","terms":[...]}
// Amplitudes and constants may be complex, written [re, im].
ScalarFunction parse_expr(const nlohmann::json& spec);

double real_value(const ScalarFunction& f, double t);

} // namespace vesselkit
