#include "cuntzlab/rational.hpp"

#include "cuntzlab/errors.hpp"

namespace cuntzlab {

Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational make_rational(long num, long den) {
    return make_rational(BigInt(num), BigInt(den));
}

Rational rational_from_string(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return make_rational(BigInt(text), BigInt(1));
        }
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        return make_rational(num, den);
    } catch (const std::invalid_argument&) {
        throw ValidationError("malformed rational literal: \"" + text + "\"");
    }
}

std::string rational_to_string(const Rational& value) {
    if (value.get_den() == 1) return value.get_num().get_str();
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string bigint_to_string(const BigInt& value) { return value.get_str(); }

BigInt bigint_from_string(const std::string& text) {
    try {
        return BigInt(text);
    } catch (const std::invalid_argument&) {
        throw ValidationError("malformed integer literal: \"" + text + "\"");
    }
}

double to_double(const Rational& value) { return value.get_d(); }

} // namespace cuntzlab
