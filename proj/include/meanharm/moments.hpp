#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/gammafn.hpp"
#include "meanharm/multiindex.hpp"
#include "meanharm/norms.hpp"
#include "meanharm/polynomial.hpp"
#include "meanharm/rng.hpp"
#include "meanharm/scalar.hpp"

namespace meanharm {

/// Exact integral of x^alpha over a simplex: affine map to the standard
/// simplex, multinomial expansion, Dirichlet closed form
/// int_T t^beta dt = prod(beta_i!) / (n + |beta|)!.
inline Rational integrate_monomial_over_simplex(const Simplex& s, const MultiIndex& alpha) {
    std::size_t n = s.vertices[0].size();
    if (alpha.size() != n) throw std::invalid_argument("simplex integral: dimension mismatch");
    Rational jac = s.edge_det();
    if (jac < 0) jac = -jac;

    // x_j(t) = v0_j + sum_i t_i (v_i - v0)_j as a linear polynomial in t
    Polynomial integrand(static_cast<int>(n), Rational(1));
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] == 0) continue;
        Polynomial lin(static_cast<int>(n), s.vertices[0][j]);
        for (std::size_t i = 0; i < n; ++i) {
            MultiIndex e(n, 0);
            e[i] = 1;
            lin = lin + Polynomial::monomial(e, s.vertices[i + 1][j] - s.vertices[0][j]);
        }
        for (int k = 0; k < alpha[j]; ++k) integrand = integrand * lin;
    }

    Rational total = 0;
    for (const auto& [beta, c] : integrand.terms()) {
        Rational w(1);
        for (int b : beta) w *= Rational(factorial(static_cast<unsigned>(b)));
        w /= Rational(factorial(static_cast<unsigned>(n + static_cast<std::size_t>(order(beta)))));
        total += c * w;
    }
    return jac * total;
}

/// Exact integral of a polynomial over a simplex.
inline Rational integrate_polynomial_over_simplex(const Simplex& s, const Polynomial& p) {
    Rational total = 0;
    for (const auto& [alpha, c] : p.terms())
        total += c * integrate_monomial_over_simplex(s, alpha);
    return total;
}

namespace detail {

// normalized l^2 ball moment: prod_i (alpha_i - 1)!! / 2^{alpha_i/2} over
// prod_{t=1..|alpha|/2} (n + 2t)/2; all pi factors cancel.
inline Rational l2_moment_exact(int n, const MultiIndex& alpha) {
    Rational m = 1;
    for (int a : alpha) {
        int k = a / 2;
        BigInt num = 1;
        for (int i = 1; i <= a; i += 2) num *= i; // (a-1)!!
        m *= make_ratio(num, BigInt(1) << k);
    }
    int big_k = order(alpha) / 2;
    for (int t = 1; t <= big_k; ++t) m /= make_ratio(n + 2 * t, 2);
    return m;
}

inline Rational l1_moment_exact(int n, const MultiIndex& alpha) {
    Rational m(factorial(static_cast<unsigned>(n)));
    for (int a : alpha) m *= Rational(factorial(static_cast<unsigned>(a)));
    m /= Rational(factorial(static_cast<unsigned>(order(alpha) + n)));
    return m;
}

inline Rational linf_moment_exact(const MultiIndex& alpha) {
    Rational m = 1;
    for (int a : alpha) m /= Rational(a + 1);
    return m;
}

} // namespace detail

/// Volume of the l^p unit ball; exact for p in {1, inf}, Gamma-valued otherwise.
inline Scalar lp_ball_volume(const NormSpec& spec) {
    if (!spec.is_lp()) throw std::invalid_argument("lp_ball_volume: not an lp ball");
    int n = spec.dim();
    if (spec.is_inf()) return Scalar(Rational(BigInt(1) << n));
    const Rational& p = spec.p();
    if (p == 1) return Scalar(make_ratio(BigInt(1) << n, factorial(static_cast<unsigned>(n))));
    double pd = to_double(p);
    Scalar g1 = gamma_scalar(1.0 / pd);
    Scalar v = Scalar(1);
    for (int i = 0; i < n; ++i) v = v * g1;
    Scalar denom = gamma_scalar((n + pd) / pd);
    Scalar scale = Scalar::approx(std::pow(2.0 / pd, n), std::pow(2.0 / pd, n) * 1e-15);
    return scale * v / denom;
}

/**
 * Normalized l^p ball moment M_alpha = avg_{B(0,1)} y^alpha dy.
 * Exact rational for p in {1, 2, inf}; Gamma-valued with a propagated
 * error bound otherwise. Any odd exponent short-circuits to exact zero.
 */
inline Scalar lp_moment(const NormSpec& spec, const MultiIndex& alpha) {
    if (!spec.is_lp()) throw std::invalid_argument("lp_moment: not an lp ball");
    if (static_cast<int>(alpha.size()) != spec.dim())
        throw std::invalid_argument("lp_moment: dimension mismatch");
    for (int a : alpha)
        if (a % 2 != 0) return Scalar(Rational(0));
    int n = spec.dim();
    if (spec.is_inf()) return Scalar(detail::linf_moment_exact(alpha));
    const Rational& p = spec.p();
    if (p == 1) return Scalar(detail::l1_moment_exact(n, alpha));
    if (p == 2) return Scalar(detail::l2_moment_exact(n, alpha));

    double pd = to_double(p);
    // M = prod_i Gamma((a_i+1)/p) / Gamma(1/p)^n * Gamma((n+p)/p) / Gamma((|a|+n+p)/p)
    Scalar num = Scalar(1);
    for (int a : alpha) num = num * gamma_scalar((a + 1) / pd);
    Scalar g1 = gamma_scalar(1.0 / pd);
    Scalar den = Scalar(1);
    for (int i = 0; i < n; ++i) den = den * g1;
    Scalar m = num / den;
    m = m * gamma_scalar((n + pd) / pd);
    m = m / gamma_scalar((order(alpha) + n + pd) / pd);
    return m;
}

/// Convenience overload matching the (p, n, alpha) call shape.
inline Scalar lp_moment(const Rational& p, int n, const MultiIndex& alpha) {
    return lp_moment(NormSpec::lp(p, n), alpha);
}

/// Exact normalized moment of a polytope ball via fan triangulation.
inline Scalar polytope_moment(const NormSpec& spec, const MultiIndex& alpha) {
    if (!spec.is_polytope()) throw std::invalid_argument("polytope_moment: not a polytope ball");
    auto simplices = spec.triangulate();
    Rational vol = 0, integral = 0;
    for (const auto& s : simplices) {
        vol += s.volume();
        integral += integrate_monomial_over_simplex(s, alpha);
    }
    return Scalar(Rational(integral / vol));
}

/// Monte-Carlo normalized moment: rejection sampling from [-1,1]^n with a
/// 4-sigma error bound; bitwise deterministic for a fixed seed.
inline Scalar mc_moment(const NormSpec& spec, const MultiIndex& alpha, std::size_t samples,
                        std::uint64_t seed) {
    if (samples < 10000) throw std::invalid_argument("mc_moment: need at least 1e4 samples");
    if (static_cast<int>(alpha.size()) != spec.dim())
        throw std::invalid_argument("mc_moment: dimension mismatch");
    int n = spec.dim();
    QVec bb = spec.bounding_box();
    DVec half(bb.size());
    for (std::size_t i = 0; i < bb.size(); ++i) half[i] = to_double(bb[i]);

    const std::size_t batch_size = 1 << 16;
    std::size_t accepted = 0;
    double sum = 0, sum_sq = 0;
    DVec pt(static_cast<std::size_t>(n));
    for (std::size_t done = 0, batch = 0; done < samples; ++batch) {
        std::size_t count = std::min(batch_size, samples - done);
        Rng rng = Rng::substream(seed, batch);
        for (std::size_t k = 0; k < count; ++k) {
            for (int i = 0; i < n; ++i)
                pt[static_cast<std::size_t>(i)] = rng.next_in(-half[static_cast<std::size_t>(i)],
                                                              half[static_cast<std::size_t>(i)]);
            if (spec.gauge(pt) >= 1.0) continue;
            ++accepted;
            double v = 1.0;
            for (int i = 0; i < n; ++i)
                for (int e = 0; e < alpha[static_cast<std::size_t>(i)]; ++e)
                    v *= pt[static_cast<std::size_t>(i)];
            sum += v;
            sum_sq += v * v;
        }
        done += count;
    }
    if (accepted < samples / 1000)
        throw std::runtime_error("mc_moment: acceptance rate below 1e-3, degenerate body (accepted " +
                                 std::to_string(accepted) + " of " + std::to_string(samples) + ")");
    double mean = sum / static_cast<double>(accepted);
    double var = sum_sq / static_cast<double>(accepted) - mean * mean;
    if (var < 0) var = 0;
    double stderr_ = std::sqrt(var / static_cast<double>(accepted));
    return Scalar::approx(mean, 4.0 * stderr_);
}

/**
 * Table of normalized unit-ball moments M_alpha for |alpha| <= max_order,
 * plus the unnormalized ball volume. Built once, immutable afterwards.
 * Exact whenever the ball admits exact moments (polytopes, p in {1,2,inf}).
 */
class MomentTable {
public:
    using EntryMap = std::map<MultiIndex, Scalar, GrlexLess>;

    static MomentTable build(const NormSpec& norm, int max_order) {
        if (max_order < 0) throw std::invalid_argument("MomentTable: negative order");
        if (max_order % 2 != 0) ++max_order;
        MomentTable t;
        t.norm_ = norm;
        t.max_order_ = max_order;
        t.exact_ = true;
        if (norm.is_polytope()) {
            auto simplices = norm.triangulate();
            Rational vol = 0;
            for (const auto& s : simplices) vol += s.volume();
            t.volume_ = Scalar(vol);
            for (const auto& alpha : indices_up_to_degree(norm.dim(), max_order)) {
                if (order(alpha) % 2 != 0 || (norm.axis_symmetric() && !all_even(alpha))) {
                    t.entries_.emplace(alpha, Scalar(Rational(0)));
                    continue;
                }
                Rational integral = 0;
                for (const auto& s : simplices) integral += integrate_monomial_over_simplex(s, alpha);
                t.entries_.emplace(alpha, Scalar(Rational(integral / vol)));
            }
        } else {
            t.volume_ = lp_ball_volume(norm);
            for (const auto& alpha : indices_up_to_degree(norm.dim(), max_order)) {
                Scalar m = lp_moment(norm, alpha);
                if (!m.is_exact()) t.exact_ = false;
                t.entries_.emplace(alpha, std::move(m));
            }
        }
        return t;
    }

    /// Assemble a table from explicit entries (used for scaled/synthetic tables).
    static MomentTable from_entries(const NormSpec& norm, int max_order, EntryMap entries,
                                    Scalar volume) {
        MomentTable t;
        t.norm_ = norm;
        t.max_order_ = max_order;
        t.entries_ = std::move(entries);
        t.volume_ = std::move(volume);
        t.exact_ = true;
        for (const auto& [a, s] : t.entries_)
            if (!s.is_exact()) t.exact_ = false;
        return t;
    }

    const NormSpec& norm() const { return norm_; }
    int dim() const { return norm_.dim(); }
    int max_order() const { return max_order_; }
    bool exact() const { return exact_; }
    const Scalar& volume() const { return volume_; }
    const EntryMap& entries() const { return entries_; }

    const Scalar& moment(const MultiIndex& alpha) const {
        if (order(alpha) > max_order_)
            throw std::invalid_argument("MomentTable: order " + std::to_string(order(alpha)) +
                                        " exceeds table max_order " + std::to_string(max_order_));
        auto it = entries_.find(alpha);
        if (it == entries_.end())
            throw std::invalid_argument("MomentTable: missing entry");
        return it->second;
    }

    /// A_alpha in volume-normalized form: multinomial(alpha) * M_alpha.
    Scalar coefficient_A(const MultiIndex& alpha) const {
        return Rational(multinomial(alpha)) * moment(alpha);
    }

private:
    MomentTable() : norm_(NormSpec::lp(2, 1)), volume_(Rational(0)) {}

    NormSpec norm_;
    int max_order_ = 0;
    EntryMap entries_;
    Scalar volume_;
    bool exact_ = true;
};

/// Gamma ratio f(p) = Gamma(3/p)^2 / (Gamma(5/p) Gamma(1/p)); equals 1/3
/// exactly at p = 2 and is strictly increasing on [1, inf).
inline double f_ratio(double p) {
    if (!(p >= 1)) throw std::invalid_argument("f_ratio: p must be >= 1");
    double g3 = gamma_value(3.0 / p);
    return g3 * g3 / (gamma_value(5.0 / p) * gamma_value(1.0 / p));
}

/// Closed-form derivative of f via digamma.
inline double f_ratio_derivative(double p) {
    return f_ratio(p) * (-6.0 * digamma(3.0 / p) + 5.0 * digamma(5.0 / p) + digamma(1.0 / p)) /
           (p * p);
}

struct FRatioScan {
    std::vector<std::pair<double, double>> values; // (p, f(p))
    bool strictly_increasing = true;
    std::optional<double> crossing_third; // p with f(p) = 1/3, when bracketed by the grid
};

inline FRatioScan f_ratio_scan(const std::vector<double>& grid) {
    FRatioScan out;
    for (double p : grid) out.values.emplace_back(p, f_ratio(p));
    for (std::size_t i = 1; i < out.values.size(); ++i)
        if (!(out.values[i].second > out.values[i - 1].second)) out.strictly_increasing = false;
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        double fa = out.values[i - 1].second - 1.0 / 3.0;
        double fb = out.values[i].second - 1.0 / 3.0;
        if (fa == 0) { out.crossing_third = out.values[i - 1].first; break; }
        if (fa < 0 && fb >= 0) {
            double lo = out.values[i - 1].first, hi = out.values[i].first;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                (f_ratio(mid) < 1.0 / 3.0 ? lo : hi) = mid;
            }
            out.crossing_third = 0.5 * (lo + hi);
            break;
        }
    }
    return out;
}

struct EllipticityCertificate {
    Scalar min_eigenvalue;
    bool positive = false;
};

/// Minimum eigenvalue of the order-2 symbol matrix S_ii = A_{2e_i},
/// S_ik = A_{e_i+e_k}/2; strict positivity certifies strong ellipticity
/// of the j = 2 operator.
inline EllipticityCertificate ellipticity_certificate(const MomentTable& table) {
    if (table.max_order() < 2)
        throw std::invalid_argument("ellipticity_certificate: table must cover order 2");
    int n = table.dim();
    std::vector<std::vector<Scalar>> s(static_cast<std::size_t>(n),
                                       std::vector<Scalar>(static_cast<std::size_t>(n), Scalar(0)));
    bool off_diag_zero = true, diag_exact = true;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            MultiIndex a(static_cast<std::size_t>(n), 0);
            a[static_cast<std::size_t>(i)] += 1;
            a[static_cast<std::size_t>(k)] += 1;
            Scalar v = table.coefficient_A(a);
            if (i != k) {
                v = v / Scalar(2);
                if (!v.is_zero()) off_diag_zero = false;
            } else if (!v.is_exact()) {
                diag_exact = false;
            }
            s[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
        }
    }
    EllipticityCertificate cert{Scalar(0), false};
    if (off_diag_zero && diag_exact) {
        Rational best = s[0][0].rat();
        for (int i = 1; i < n; ++i)
            if (s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].rat() < best)
                best = s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].rat();
        cert.min_eigenvalue = Scalar(best);
    } else {
        DMat sd(static_cast<std::size_t>(n), DVec(static_cast<std::size_t>(n)));
        double scale = 0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                sd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                    s[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].value();
                scale = std::max(scale, std::abs(sd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]));
            }
        DVec eig = linalg::sym_eigenvalues(sd);
        cert.min_eigenvalue = Scalar::approx(eig[0], 1e-12 * scale * n + 1e-300);
    }
    cert.positive = cert.min_eigenvalue.is_positive();
    return cert;
}

} // namespace meanharm
