#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/multiindex.hpp"
#include "meanharm/rational.hpp"

namespace meanharm {

/**
 * Multivariate polynomial with exact rational coefficients.
 *
 * Terms are kept in a canonical graded-lex ordered map with no stored
 * zero coefficients, so two equal polynomials have identical term maps
 * and the zero polynomial is the empty map. Values are immutable in
 * spirit: every operation returns a fresh polynomial.
 */
class Polynomial {
public:
    using TermMap = std::map<MultiIndex, Rational, GrlexLess>;

    explicit Polynomial(int n = 1) : n_(check_dim(n)) {}

    Polynomial(int n, const Rational& constant) : n_(check_dim(n)) {
        if (constant != 0) terms_[MultiIndex(static_cast<std::size_t>(n), 0)] = constant;
    }

    static Polynomial monomial(const MultiIndex& alpha, const Rational& c = 1) {
        Polynomial p(static_cast<int>(alpha.size()));
        if (c != 0) p.terms_[alpha] = c;
        return p;
    }

    /// Variable x_i (0-based index).
    static Polynomial variable(int n, int i) {
        if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
        MultiIndex a(static_cast<std::size_t>(n), 0);
        a[static_cast<std::size_t>(i)] = 1;
        return monomial(a);
    }

    int dimension() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    int degree() const {
        if (terms_.empty()) return 0; // degree of the zero polynomial, by convention
        return order(terms_.rbegin()->first);
    }

    Rational coefficient(const MultiIndex& alpha) const {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void set_coefficient(const MultiIndex& alpha, const Rational& c) {
        if (static_cast<int>(alpha.size()) != n_)
            throw std::invalid_argument("term dimension mismatch");
        if (c == 0)
            terms_.erase(alpha);
        else
            terms_[alpha] = c;
    }

    Polynomial operator-() const {
        Polynomial r(n_);
        for (const auto& [a, c] : terms_) r.terms_[a] = -c;
        return r;
    }

    Polynomial operator+(const Polynomial& o) const {
        check_same_dim(o);
        Polynomial r = *this;
        for (const auto& [a, c] : o.terms_) {
            Rational s = r.coefficient(a) + c;
            r.set_coefficient(a, s);
        }
        return r;
    }

    Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

    Polynomial operator*(const Polynomial& o) const {
        check_same_dim(o);
        Polynomial r(n_);
        for (const auto& [a, ca] : terms_)
            for (const auto& [b, cb] : o.terms_) {
                MultiIndex ab = add(a, b);
                Rational s = r.coefficient(ab) + ca * cb;
                r.set_coefficient(ab, s);
            }
        return r;
    }

    Polynomial operator*(const Rational& c) const {
        Polynomial r(n_);
        if (c == 0) return r;
        for (const auto& [a, ca] : terms_) r.terms_[a] = ca * c;
        return r;
    }

    bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    /// Partial derivative D^alpha p, exact. Falling-factorial coefficients.
    Polynomial derivative(const MultiIndex& alpha) const {
        if (static_cast<int>(alpha.size()) != n_)
            throw std::invalid_argument("derivative: dimension mismatch");
        Polynomial r(n_);
        for (const auto& [beta, c] : terms_) {
            bool ok = true;
            Rational factor = c;
            MultiIndex gamma(beta.size());
            for (std::size_t i = 0; i < beta.size(); ++i) {
                if (beta[i] < alpha[i]) { ok = false; break; }
                gamma[i] = beta[i] - alpha[i];
                for (int k = beta[i]; k > beta[i] - alpha[i]; --k) factor *= k;
            }
            if (!ok) continue;
            Rational s = r.coefficient(gamma) + factor;
            r.set_coefficient(gamma, s);
        }
        return r;
    }

    /// Laplacian of p.
    Polynomial laplacian() const {
        Polynomial r(n_);
        for (int i = 0; i < n_; ++i) {
            MultiIndex a(static_cast<std::size_t>(n_), 0);
            a[static_cast<std::size_t>(i)] = 2;
            r = r + derivative(a);
        }
        return r;
    }

    Rational evaluate(const std::vector<Rational>& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("evaluate: point dimension mismatch");
        Rational sum = 0;
        for (const auto& [a, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < a.size(); ++i)
                for (int k = 0; k < a[i]; ++k) t *= x[i];
            sum += t;
        }
        return sum;
    }

    double evaluate(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("evaluate: point dimension mismatch");
        double sum = 0;
        for (const auto& [a, c] : terms_) {
            double t = to_double(c);
            for (std::size_t i = 0; i < a.size(); ++i)
                for (int k = 0; k < a[i]; ++k) t *= x[i];
            sum += t;
        }
        return sum;
    }

    /// Canonical text form, degree descending and x1-dominant terms first
    /// within a degree: "x1^2 - 3*x2^2 + 4*x1".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<MultiIndex, Rational>> ordered(terms_.begin(), terms_.end());
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
            int dl = order(l.first), dr = order(r.first);
            if (dl != dr) return dl > dr;
            return l.first > r.first;
        });
        std::ostringstream os;
        bool first = true;
        for (const auto& [a, c] : ordered) {
            Rational abs_c = c < 0 ? Rational(-c) : c;
            if (first) {
                if (c < 0) os << "-";
                first = false;
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            bool has_vars = order(a) > 0;
            if (abs_c != 1 || !has_vars) {
                os << rational_str(abs_c);
                if (has_vars) os << "*";
            }
            bool first_var = true;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] == 0) continue;
                if (!first_var) os << "*";
                first_var = false;
                os << "x" << (i + 1);
                if (a[i] > 1) os << "^" << a[i];
            }
        }
        return os.str();
    }

    static Polynomial parse(const std::string& text, int n);

private:
    static int check_dim(int n) {
        if (n < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
        return n;
    }
    void check_same_dim(const Polynomial& o) const {
        if (n_ != o.n_) throw std::invalid_argument("polynomial dimension mismatch");
    }

    int n_;
    TermMap terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

/// D^alpha p as a free function.
inline Polynomial derivative(const Polynomial& p, const MultiIndex& alpha) {
    return p.derivative(alpha);
}

/// l-fold Laplacian, l >= 1.
inline Polynomial laplacian_iter(const Polynomial& p, int l) {
    if (l < 1) throw std::invalid_argument("laplacian_iter: l must be >= 1");
    Polynomial r = p;
    for (int k = 0; k < l; ++k) r = r.laplacian();
    return r;
}

/// Gradient dot product sum_i (d_i p)(d_i q), exact.
inline Polynomial grad_dot(const Polynomial& p, const Polynomial& q) {
    if (p.dimension() != q.dimension())
        throw std::invalid_argument("grad_dot: dimension mismatch");
    int n = p.dimension();
    Polynomial r(n);
    for (int i = 0; i < n; ++i) {
        MultiIndex e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = 1;
        r = r + p.derivative(e) * q.derivative(e);
    }
    return r;
}

namespace detail {

// Tokenizer/parser for the polynomial text format: signed sums of terms
// "c*x1^a1*x2^a2"; aliases x,y,z accepted for n <= 3.
class PolyParser {
public:
    PolyParser(const std::string& text, int n) : s_(text), n_(n) {}

    Polynomial run() {
        Polynomial result(n_);
        skip_ws();
        if (eof()) throw std::invalid_argument("empty polynomial");
        bool expect_term = true;
        int sign = 1;
        while (!eof()) {
            if (expect_term) {
                result = result + parse_term() * Rational(sign);
                expect_term = false;
                sign = 1;
            } else {
                char c = peek();
                if (c == '+') { ++pos_; expect_term = true; }
                else if (c == '-') { ++pos_; sign = -1; expect_term = true; }
                else throw std::invalid_argument("unexpected character in polynomial: " + std::string(1, c));
                skip_ws();
            }
            skip_ws();
        }
        if (expect_term) throw std::invalid_argument("polynomial ends with dangling sign");
        return result;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    void skip_ws() { while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_; }

    Polynomial parse_term() {
        skip_ws();
        Rational coeff = 1;
        MultiIndex expo(static_cast<std::size_t>(n_), 0);
        bool saw_factor = false;
        int sign = 1;
        while (!eof() && (peek() == '-' || peek() == '+')) {
            if (peek() == '-') sign = -sign;
            ++pos_;
            skip_ws();
        }
        for (;;) {
            skip_ws();
            if (eof()) break;
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                coeff *= parse_number();
                saw_factor = true;
            } else if (c == 'x' || c == 'y' || c == 'z') {
                auto [var, exp] = parse_var();
                expo[static_cast<std::size_t>(var)] += exp;
                saw_factor = true;
            } else if (c == '*') {
                ++pos_;
                continue;
            } else {
                break;
            }
        }
        if (!saw_factor) throw std::invalid_argument("empty term in polynomial");
        return Polynomial::monomial(expo, coeff * sign);
    }

    Rational parse_number() {
        std::size_t start = pos_;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
        std::string num = s_.substr(start, pos_ - start);
        skip_ws();
        if (!eof() && peek() == '/') {
            ++pos_;
            skip_ws();
            std::size_t dstart = pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            if (dstart == pos_) throw std::invalid_argument("missing denominator");
            num += "/" + s_.substr(dstart, pos_ - dstart);
        }
        return parse_rational(num);
    }

    std::pair<int, int> parse_var() {
        char c = peek();
        ++pos_;
        int var = -1;
        if (c == 'x') {
            if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                std::size_t start = pos_;
                while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
                var = std::stoi(s_.substr(start, pos_ - start)) - 1;
            } else {
                var = 0;
            }
        } else if (c == 'y') {
            var = 1;
        } else {
            var = 2;
        }
        if (var < 0 || var >= n_)
            throw std::invalid_argument("variable index out of range for dimension " + std::to_string(n_));
        if ((c == 'y' || c == 'z') && n_ > 3)
            throw std::invalid_argument("aliases x,y,z are only valid for dimension <= 3");
        int exp = 1;
        skip_ws();
        if (!eof() && peek() == '^') {
            ++pos_;
            skip_ws();
            std::size_t start = pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            if (start == pos_) throw std::invalid_argument("missing exponent");
            exp = std::stoi(s_.substr(start, pos_ - start));
        }
        return {var, exp};
    }

    const std::string& s_;
    int n_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Polynomial Polynomial::parse(const std::string& text, int n) {
    return detail::PolyParser(text, check_dim(n)).run();
}

} // namespace meanharm
