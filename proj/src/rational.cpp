#include "interim/rational.hpp"

namespace interim {

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(BigInt(text));
        }
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw InputError("rational with zero denominator: " + text);
        return Rational(num, den);
    } catch (const std::exception& e) {
        throw InputError("cannot parse rational '" + text + "': " + e.what());
    }
}

std::string to_string(const Rational& value) {
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::size_t rational_bits(const Rational& value) {
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    std::size_t nb = num == 0 ? 1 : boost::multiprecision::msb(abs(num)) + 1;
    std::size_t db = boost::multiprecision::msb(den) + 1;
    return nb > db ? nb : db;
}

} // namespace interim
