#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/kernel.hpp"
#include "meanharm/moments.hpp"
#include "meanharm/polynomial.hpp"
#include "meanharm/rng.hpp"

namespace meanharm {

/**
 * Polynomial with Scalar coefficients: the candidate type for
 * verification, covering both exact kernel members and the float
 * members produced by the SVD path. Supports just enough calculus for
 * the Pizzetti sum.
 */
class ScalarPoly {
public:
    using TermMap = std::map<MultiIndex, Scalar, GrlexLess>;

    explicit ScalarPoly(int n = 1) : n_(n) {}

    ScalarPoly(const Polynomial& p) : n_(p.dimension()) {
        for (const auto& [a, c] : p.terms()) terms_.emplace(a, Scalar(c));
    }

    static ScalarPoly from_vector(const std::vector<MultiIndex>& basis,
                                  const std::vector<Scalar>& coef) {
        if (basis.size() != coef.size()) throw std::invalid_argument("ScalarPoly: shape mismatch");
        if (basis.empty()) throw std::invalid_argument("ScalarPoly: empty basis");
        ScalarPoly p(static_cast<int>(basis[0].size()));
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (!coef[i].is_zero()) p.terms_.emplace(basis[i], coef[i]);
        return p;
    }

    int dimension() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_exact() const {
        for (const auto& [a, c] : terms_)
            if (!c.is_exact()) return false;
        return true;
    }

    Polynomial to_polynomial() const {
        Polynomial p(n_);
        for (const auto& [a, c] : terms_) p.set_coefficient(a, c.rat());
        return p;
    }

    int degree() const {
        int d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, order(a));
        return d;
    }

    ScalarPoly derivative(const MultiIndex& alpha) const {
        ScalarPoly r(n_);
        for (const auto& [beta, c] : terms_) {
            bool ok = true;
            BigInt factor = 1;
            MultiIndex gamma(beta.size());
            for (std::size_t i = 0; i < beta.size(); ++i) {
                if (beta[i] < alpha[i]) { ok = false; break; }
                gamma[i] = beta[i] - alpha[i];
                for (int k = beta[i]; k > beta[i] - alpha[i]; --k) factor *= k;
            }
            if (!ok) continue;
            Scalar term = Rational(factor) * c;
            auto [it, fresh] = r.terms_.try_emplace(gamma, Scalar(0));
            it->second = it->second + term;
        }
        return r;
    }

    ScalarPoly multiply(const Polynomial& w) const {
        if (w.dimension() != n_) throw std::invalid_argument("ScalarPoly: dimension mismatch");
        ScalarPoly r(n_);
        for (const auto& [a, ca] : terms_)
            for (const auto& [b, cb] : w.terms()) {
                MultiIndex ab = add(a, b);
                Scalar t = ca * Scalar(cb);
                auto [it, fresh] = r.terms_.try_emplace(ab, Scalar(0));
                it->second = it->second + t;
            }
        return r;
    }

    Scalar evaluate(const QVec& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("ScalarPoly: point dimension mismatch");
        Scalar sum(0);
        for (const auto& [a, c] : terms_) {
            Rational m = 1;
            for (std::size_t i = 0; i < a.size(); ++i)
                for (int k = 0; k < a[i]; ++k) m *= x[i];
            sum = sum + m * c;
        }
        return sum;
    }

    double evaluate(const DVec& x) const {
        double sum = 0;
        for (const auto& [a, c] : terms_) {
            double t = c.value();
            for (std::size_t i = 0; i < a.size(); ++i)
                for (int k = 0; k < a[i]; ++k) t *= x[i];
            sum += t;
        }
        return sum;
    }

    std::string str() const {
        if (is_exact()) return to_polynomial().str();
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << it->second.value() << "*[";
            for (std::size_t i = 0; i < it->first.size(); ++i) os << (i ? " " : "") << it->first[i];
            os << "]";
        }
        return first ? "0" : os.str();
    }

private:
    int n_;
    TermMap terms_;
};

/**
 * Finite Pizzetti sum: the exact weighted ball mean of a polynomial,
 *   avg_{B(x,r)} f = sum_{j=0}^{deg f} (r^j / j!) sum_{|a|=j} binom(|a|,a) M_a D^a f(x).
 * Exact rational for exact inputs; the table must cover deg f.
 */
inline Scalar pizzetti_mean(const ScalarPoly& f, const MomentTable& table, const QVec& x,
                            const Rational& r) {
    int deg = f.degree();
    if (deg > table.max_order())
        throw std::invalid_argument("pizzetti_mean: table order " + std::to_string(table.max_order()) +
                                    " below polynomial degree " + std::to_string(deg));
    Scalar total(0);
    Rational r_pow = 1; // r^j / j!
    for (int j = 0; j <= deg; ++j) {
        if (j > 0) r_pow *= r / Rational(j);
        Scalar inner(0);
        bool any = false;
        for (const auto& alpha : indices_of_degree(static_cast<int>(x.size()), j)) {
            const Scalar& m = table.moment(alpha);
            if (m.is_zero()) continue;
            Scalar d = f.derivative(alpha).evaluate(x);
            if (d.is_zero()) continue;
            inner = inner + Rational(multinomial(alpha)) * m * d;
            any = true;
        }
        if (any) total = total + r_pow * inner;
    }
    return total;
}

inline Scalar pizzetti_mean(const Polynomial& f, const MomentTable& table, const QVec& x,
                            const Rational& r) {
    return pizzetti_mean(ScalarPoly(f), table, x, r);
}

/// Weighted ball mean avg uw / avg w via two Pizzetti sums. The table must
/// cover deg u + deg w; the weight mean must be decisively positive.
inline Scalar weighted_mean(const ScalarPoly& u, const Polynomial& w, const MomentTable& table,
                            const QVec& x, const Rational& r) {
    Scalar num = pizzetti_mean(u.multiply(w), table, x, r);
    Scalar den = pizzetti_mean(ScalarPoly(w), table, x, r);
    if (den.is_zero() || den.sign_ambiguous() || !den.is_positive())
        throw std::domain_error("weighted_mean: weight mean not positive on the ball at the probe");
    return num / den;
}

/// Exact weighted mean over a translated, scaled polytope ball: integrate
/// u*w and w over x + r*K simplex by simplex.
inline Rational exact_polytope_mean(const Polynomial& u, const Polynomial& w, const NormSpec& spec,
                                    const QVec& x, const Rational& r) {
    if (!spec.is_polytope())
        throw std::invalid_argument("exact_polytope_mean: norm ball is not a polytope");
    if (r <= 0) throw std::invalid_argument("exact_polytope_mean: radius must be positive");
    Polynomial uw = u * w;
    Rational num = 0, den = 0;
    for (const auto& s : spec.triangulate()) {
        QMat verts = s.vertices;
        for (auto& v : verts)
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + r * v[i];
        Simplex moved(std::move(verts));
        num += integrate_polynomial_over_simplex(moved, uw);
        den += integrate_polynomial_over_simplex(moved, w);
    }
    if (den == 0) throw std::domain_error("exact_polytope_mean: weight integral vanishes");
    return num / den;
}

class WeightNotPositiveError : public std::runtime_error {
public:
    explicit WeightNotPositiveError(const std::string& what) : std::runtime_error(what) {}
};

/// Monte-Carlo weighted ball mean with a 4-sigma delta-method error bound
/// for the ratio estimator; deterministic per (seed, probe, batch).
inline Scalar mc_mean(const ScalarPoly& u, const Polynomial& w, const NormSpec& spec, const QVec& x,
                      const Rational& r, std::size_t samples, std::uint64_t seed,
                      std::uint64_t probe_index = 0) {
    if (samples < 10000) throw std::invalid_argument("mc_mean: need at least 1e4 samples");
    int n = spec.dim();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("mc_mean: point dimension mismatch");
    double rd = to_double(r);
    DVec xd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xd[i] = to_double(x[i]);
    QVec bb = spec.bounding_box();
    DVec half(bb.size());
    for (std::size_t i = 0; i < bb.size(); ++i) half[i] = rd * to_double(bb[i]);

    const std::size_t batch_size = 1 << 16;
    std::size_t accepted = 0;
    double sum_y = 0, sum_x = 0, sum_yy = 0, sum_xx = 0, sum_xy = 0;
    DVec pt(static_cast<std::size_t>(n)), local(static_cast<std::size_t>(n));
    for (std::size_t done = 0, batch = 0; done < samples; ++batch) {
        std::size_t count = std::min(batch_size, samples - done);
        Rng rng = Rng::substream(seed, probe_index, batch);
        for (std::size_t k = 0; k < count; ++k) {
            for (int i = 0; i < n; ++i) {
                local[static_cast<std::size_t>(i)] = rng.next_in(-half[static_cast<std::size_t>(i)],
                                                                 half[static_cast<std::size_t>(i)]);
                pt[static_cast<std::size_t>(i)] = xd[static_cast<std::size_t>(i)] +
                                                  local[static_cast<std::size_t>(i)];
            }
            if (spec.gauge(local) >= rd) continue;
            double wv = w.evaluate(pt);
            if (!(wv > 0)) {
                std::ostringstream os;
                os << "mc_mean: weight not positive at sample (";
                for (std::size_t i = 0; i < pt.size(); ++i) os << (i ? ", " : "") << pt[i];
                os << "), value " << wv;
                throw WeightNotPositiveError(os.str());
            }
            double uv = u.evaluate(pt);
            double y = uv * wv;
            ++accepted;
            sum_y += y;
            sum_x += wv;
            sum_yy += y * y;
            sum_xx += wv * wv;
            sum_xy += y * wv;
        }
        done += count;
    }
    if (accepted < samples / 1000)
        throw std::runtime_error("mc_mean: acceptance rate below 1e-3 (accepted " +
                                 std::to_string(accepted) + " of " + std::to_string(samples) + ")");
    double m = static_cast<double>(accepted);
    double ybar = sum_y / m, xbar = sum_x / m;
    double ratio = ybar / xbar;
    double var_y = sum_yy / m - ybar * ybar;
    double var_x = sum_xx / m - xbar * xbar;
    double cov = sum_xy / m - ybar * xbar;
    double var_ratio = (var_y - 2.0 * ratio * cov + ratio * ratio * var_x) / (m * xbar * xbar);
    if (var_ratio < 0) var_ratio = 0;
    return Scalar::approx(ratio, 4.0 * std::sqrt(var_ratio));
}

/// Axis-aligned rational box modeling the domain; admissibility of a
/// probe means the ball's bounding cube lies inside the box.
struct Box {
    QVec lo, hi;

    static Box cube(int n, const Rational& half_width) {
        Box b;
        b.lo.assign(static_cast<std::size_t>(n), -half_width);
        b.hi.assign(static_cast<std::size_t>(n), half_width);
        return b;
    }

    bool admissible(const NormSpec& spec, const QVec& x, const Rational& r) const {
        if (r <= 0) return false;
        QVec c = spec.bounding_box();
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] - r * c[i] < lo[i]) return false;
            if (x[i] + r * c[i] > hi[i]) return false;
        }
        return true;
    }
};

struct Probe {
    QVec x;
    Rational r;

    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << rational_str(x[i]);
        os << "; r=" << rational_str(r) << ")";
        return os.str();
    }
};

enum class Oracle { Pizzetti, Mc, ExactPolytope };

inline std::string oracle_name(Oracle o) {
    switch (o) {
        case Oracle::Pizzetti: return "pizzetti";
        case Oracle::Mc: return "mc";
        case Oracle::ExactPolytope: return "exact";
    }
    return "?";
}

inline Oracle oracle_from_name(const std::string& s) {
    if (s == "pizzetti") return Oracle::Pizzetti;
    if (s == "mc") return Oracle::Mc;
    if (s == "exact" || s == "exact-polytope") return Oracle::ExactPolytope;
    throw std::invalid_argument("unknown oracle: " + s);
}

struct ProbeResult {
    Probe probe;
    Scalar claimed;  // u(x)
    Scalar measured; // ball mean per the oracle
    double tolerance = 0;
    bool pass = false;
};

struct VerificationReport {
    std::string candidate;
    std::string weight;
    std::string norm;
    std::string oracle;
    std::vector<ProbeResult> probes;
    bool pass = true;
};

struct McOptions {
    std::size_t samples = 1000000;
    std::uint64_t seed = 0;
};

/**
 * Definition-level check of strong harmonicity: compare u(x) against the
 * weighted ball mean at every probe, using the chosen oracle. Probes must
 * be admissible in the domain box. A probe passes when the discrepancy is
 * within the oracle's reported error (zero for exact oracles).
 */
inline VerificationReport verify_strongly_harmonic(const ScalarPoly& u, const Polynomial& w,
                                                   const NormSpec& spec,
                                                   const std::vector<Probe>& probes, Oracle oracle,
                                                   const Box& box, const McOptions& mc = {}) {
    for (const auto& p : probes)
        if (!box.admissible(spec, p.x, p.r))
            throw std::invalid_argument("inadmissible probe " + p.str() +
                                        ": ball bounding cube leaves the domain box");
    std::optional<MomentTable> table;
    if (oracle == Oracle::Pizzetti) {
        int need = u.degree() + w.degree();
        table = MomentTable::build(spec, need);
    }

    VerificationReport rep;
    rep.candidate = u.str();
    rep.weight = w.str();
    rep.norm = spec.str();
    rep.oracle = oracle_name(oracle);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const Probe& p = probes[i];
        ProbeResult res;
        res.probe = p;
        res.claimed = u.evaluate(p.x);
        switch (oracle) {
            case Oracle::Pizzetti:
                res.measured = weighted_mean(u, w, *table, p.x, p.r);
                break;
            case Oracle::Mc:
                res.measured = mc_mean(u, w, spec, p.x, p.r, mc.samples, mc.seed, i);
                break;
            case Oracle::ExactPolytope:
                if (!u.is_exact())
                    throw std::invalid_argument("exact oracle requires an exact candidate");
                res.measured = Scalar(exact_polytope_mean(u.to_polynomial(), w, spec, p.x, p.r));
                break;
        }
        res.tolerance = res.measured.abs_error() + res.claimed.abs_error();
        if (res.claimed.is_exact() && res.measured.is_exact())
            res.pass = res.claimed.rat() == res.measured.rat();
        else
            res.pass = std::abs(res.measured.value() - res.claimed.value()) <= res.tolerance;
        rep.pass = rep.pass && res.pass;
        rep.probes.push_back(std::move(res));
    }
    return rep;
}

inline VerificationReport verify_strongly_harmonic(const Polynomial& u, const Polynomial& w,
                                                   const NormSpec& spec,
                                                   const std::vector<Probe>& probes, Oracle oracle,
                                                   const Box& box, const McOptions& mc = {}) {
    return verify_strongly_harmonic(ScalarPoly(u), w, spec, probes, oracle, box, mc);
}

struct IteratedWeightResult {
    int l = 0;
    Polynomial weight;
    bool applicable = false;
    std::string note;
    std::optional<VerificationReport> report;

    IteratedWeightResult() : weight(1, Rational(0)) {}
};

/**
 * Verify u against the weight tower w, Lap w, Lap^2 w, ..., Lap^{l_max} w
 * (Euclidean metric). Levels whose weight vanishes identically, or whose
 * positivity spot-checks fail on every probe ball, are reported as
 * inapplicable rather than failed.
 */
inline std::vector<IteratedWeightResult> iterated_weight_check(const ScalarPoly& u,
                                                               const Polynomial& w, int l_max,
                                                               const NormSpec& spec,
                                                               const std::vector<Probe>& probes,
                                                               Oracle oracle, const Box& box,
                                                               const McOptions& mc = {}) {
    std::vector<IteratedWeightResult> out;
    Polynomial wl = w;
    for (int l = 0; l <= l_max; ++l) {
        if (l > 0) wl = wl.laplacian();
        IteratedWeightResult res;
        res.l = l;
        res.weight = wl;
        if (wl.is_zero()) {
            res.note = "weight identically zero";
            out.push_back(std::move(res));
            continue;
        }
        // positivity spot checks: ball center plus seeded interior samples
        std::vector<Probe> usable;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const Probe& p = probes[i];
            bool positive = wl.evaluate(p.x) > 0;
            DVec xd(p.x.size());
            for (std::size_t k = 0; k < p.x.size(); ++k) xd[k] = to_double(p.x[k]);
            double rd = to_double(p.r);
            Rng rng = Rng::substream(0xA11CE5EEDULL + static_cast<std::uint64_t>(l), i);
            DVec pt(p.x.size());
            for (int s = 0; s < 32 && positive; ++s) {
                DVec local(p.x.size());
                for (std::size_t k = 0; k < p.x.size(); ++k) local[k] = rng.next_in(-rd, rd);
                if (spec.gauge(local) >= rd) continue;
                for (std::size_t k = 0; k < p.x.size(); ++k) pt[k] = xd[k] + local[k];
                if (!(wl.evaluate(pt) > 0)) positive = false;
            }
            if (positive) usable.push_back(p);
        }
        if (usable.empty()) {
            res.note = "weight not positive on any probed ball";
            out.push_back(std::move(res));
            continue;
        }
        try {
            res.report = verify_strongly_harmonic(u, wl, spec, usable, oracle, box, mc);
            res.applicable = true;
            if (usable.size() < probes.size())
                res.note = std::to_string(probes.size() - usable.size()) +
                           " probe(s) skipped for weight positivity";
        } catch (const WeightNotPositiveError& e) {
            res.note = std::string("weight positivity failed during sampling: ") + e.what();
        } catch (const std::domain_error& e) {
            res.note = std::string("weight mean not positive: ") + e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace meanharm
