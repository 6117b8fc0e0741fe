// Exact rational scalar used throughout. All probabilities, allocation
// weights, LP coefficients and report values are cpp_rational; nothing on a
// decision path ever touches floating point.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace interim {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Malformed input (files, descriptions, precondition violations). CLI exit 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configured size cap was exceeded (state space, subset enumeration,
// rational magnitude). CLI exit 3.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses "p", "-p/q" or "p/q" with q > 0 after normalization.
Rational parse_rational(const std::string& text);

// Canonical form: "p" when the denominator is 1, else "p/q" reduced, q > 0.
std::string to_string(const Rational& value);

// Larger of the numerator/denominator bit lengths; input to the magnitude guard.
std::size_t rational_bits(const Rational& value);

inline void check_magnitude(const Rational& value, std::size_t max_bits) {
    if (max_bits > 0 && rational_bits(value) > max_bits)
        throw CapExceeded("rational magnitude guard tripped (" +
                          std::to_string(rational_bits(value)) + " bits > " +
                          std::to_string(max_bits) + ")");
}

} // namespace interim
