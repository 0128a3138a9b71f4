#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace meanharm {

// Exact arbitrary-precision rational, the coefficient type of every
// symbolic object in the library. Floats appear only in moment tables
// for irrational data and in Monte-Carlo estimates.
using Rational = mpq_class;
using BigInt = mpz_class;

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;
using DVec = std::vector<double>;
using DMat = std::vector<DVec>;

inline double to_double(const Rational& q) { return q.get_d(); }

/// num/den in canonical form (the two-argument mpq_class constructor does
/// not canonicalize on its own).
inline Rational make_ratio(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("make_ratio: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Parse "num", "num/den" or a plain decimal like "2.5" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos)
            throw std::invalid_argument("rational literal mixes '.' and '/': " + text);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("bad decimal literal: " + text);
        BigInt num(digits, 10);
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    Rational q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + text);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
}

/// Canonical text form: "num" when the denominator is 1, else "num/den".
inline std::string rational_str(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline BigInt factorial(unsigned k) {
    BigInt f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace meanharm
