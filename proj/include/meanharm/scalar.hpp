#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "meanharm/rational.hpp"

namespace meanharm {

/**
 * Number tower for moment values: either an exact rational or a float
 * with a conservative absolute error bound. Error bounds add under
 * addition and propagate first-order (plus the cross term) under
 * multiplication. Exact values stay exact as long as every operand is
 * exact.
 */
class Scalar {
public:
    Scalar() : exact_(true), q_(0) {}
    Scalar(const Rational& q) : exact_(true), q_(q) {}
    Scalar(int v) : exact_(true), q_(v) {}

    static Scalar approx(double value, double abs_error) {
        if (!(abs_error >= 0) || !std::isfinite(value) || !std::isfinite(abs_error))
            throw std::invalid_argument("Scalar::approx: bad value or error bound");
        Scalar s;
        s.exact_ = false;
        s.q_ = 0;
        s.v_ = value;
        s.err_ = abs_error;
        return s;
    }

    bool is_exact() const { return exact_; }

    const Rational& rat() const {
        if (!exact_) throw std::logic_error("Scalar: rational view of an approximate value");
        return q_;
    }

    double value() const { return exact_ ? to_double(q_) : v_; }
    double abs_error() const { return exact_ ? 0.0 : err_; }

    bool is_zero() const { return exact_ ? q_ == 0 : (v_ == 0.0 && err_ == 0.0); }

    /// True when the sign cannot be decided from the error band.
    bool sign_ambiguous() const { return !exact_ && std::abs(v_) <= err_ && !(v_ == 0 && err_ == 0); }

    bool is_positive() const { return exact_ ? q_ > 0 : v_ - err_ > 0; }

    Scalar operator-() const {
        if (exact_) return Scalar(Rational(-q_));
        return approx(-v_, err_);
    }

    Scalar operator+(const Scalar& o) const {
        if (exact_ && o.exact_) return Scalar(Rational(q_ + o.q_));
        return approx(value() + o.value(), abs_error() + o.abs_error());
    }

    Scalar operator-(const Scalar& o) const { return *this + (-o); }

    Scalar operator*(const Scalar& o) const {
        if (exact_ && o.exact_) return Scalar(Rational(q_ * o.q_));
        double a = value(), b = o.value(), ea = abs_error(), eb = o.abs_error();
        return approx(a * b, std::abs(a) * eb + std::abs(b) * ea + ea * eb);
    }

    Scalar operator/(const Scalar& o) const {
        if (exact_ && o.exact_) {
            if (o.q_ == 0) throw std::domain_error("Scalar: division by exact zero");
            return Scalar(Rational(q_ / o.q_));
        }
        double a = value(), b = o.value(), ea = abs_error(), eb = o.abs_error();
        if (std::abs(b) <= eb)
            throw std::domain_error("Scalar: division by a sign-ambiguous value");
        double r = a / b;
        double err = (ea + std::abs(r) * eb) / (std::abs(b) - eb);
        return approx(r, err);
    }

    bool operator==(const Scalar& o) const {
        if (exact_ && o.exact_) return q_ == o.q_;
        return equals_within(o);
    }

    /// Exact==exact compares exactly; any approximate side compares
    /// within the combined error band.
    bool equals_within(const Scalar& o) const {
        if (exact_ && o.exact_) return q_ == o.q_;
        return std::abs(value() - o.value()) <= abs_error() + o.abs_error();
    }

    std::string str() const {
        if (exact_) return rational_str(q_);
        return std::to_string(v_) + " +/- " + std::to_string(err_);
    }

private:
    bool exact_;
    Rational q_;
    double v_ = 0.0;
    double err_ = 0.0;
};

inline Scalar operator*(const Rational& c, const Scalar& s) { return Scalar(c) * s; }

} // namespace meanharm
