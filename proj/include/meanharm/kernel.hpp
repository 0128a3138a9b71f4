#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/linalg.hpp"
#include "meanharm/pde.hpp"

namespace meanharm {

/// Raised on the SVD path when the spectral gap between retained and
/// discarded singular values is too small to trust the rank decision.
class AmbiguousRankError : public std::runtime_error {
public:
    AmbiguousRankError(double gap_, double threshold_)
        : std::runtime_error("ambiguous numerical rank: spectral gap " + std::to_string(gap_) +
                             " is below the required " + std::to_string(threshold_) +
                             "; increase moment precision"),
          gap(gap_) {}
    double gap;
};

inline constexpr double kSvdRankTol = 1e-9;   // relative rank threshold tau
inline constexpr double kSvdGapRequired = 1e3;

/**
 * Canonical basis of the polynomial solution space of an assembled
 * system. Vectors are rows in reduced row echelon form over the
 * graded-lex column basis with monic pivots, so equal spaces produce
 * identical bases.
 */
struct KernelBasis {
    int dimension = 0;
    std::vector<MultiIndex> column_basis;
    std::vector<std::vector<Scalar>> vectors;
    bool exact = true;
    double spectral_gap = std::numeric_limits<double>::infinity();
    std::optional<NormSpec> norm;
    Polynomial weight;
    int degree = 0;
    std::vector<int> j_list;

    KernelBasis() : weight(1, Rational(1)) {}

    std::vector<Polynomial> polynomials() const {
        if (!exact) throw std::logic_error("KernelBasis: exact polynomials of an approximate basis");
        std::vector<Polynomial> out;
        int n = column_basis.empty() ? weight.dimension()
                                     : static_cast<int>(column_basis[0].size());
        for (const auto& v : vectors) {
            Polynomial p(n);
            for (std::size_t c = 0; c < column_basis.size(); ++c)
                if (!v[c].is_zero()) p.set_coefficient(column_basis[c], v[c].rat());
            out.push_back(std::move(p));
        }
        return out;
    }

    std::vector<Rational> coefficient_vector(const Polynomial& p) const {
        std::vector<Rational> v(column_basis.size(), Rational(0));
        for (const auto& [a, c] : p.terms()) {
            auto it = std::find(column_basis.begin(), column_basis.end(), a);
            if (it == column_basis.end())
                throw std::invalid_argument("polynomial degree exceeds the basis degree budget");
            v[static_cast<std::size_t>(it - column_basis.begin())] = c;
        }
        return v;
    }

    /// Exact membership for exact bases; least-squares residual test
    /// against `tol` otherwise.
    bool contains(const Polynomial& p, double tol = 1e-8) const {
        std::vector<Rational> v = coefficient_vector(p);
        if (exact) {
            // reduce by the RREF rows
            for (std::size_t r = 0; r < vectors.size(); ++r) {
                std::size_t piv = pivot_of(r);
                Rational f = v[piv];
                if (f == 0) continue;
                for (std::size_t c = 0; c < v.size(); ++c) v[c] -= f * vectors[r][c].rat();
            }
            return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
        }
        // project onto an orthonormalization of the float span
        DMat basis;
        for (const auto& row : vectors) {
            DVec d(row.size());
            for (std::size_t c = 0; c < row.size(); ++c) d[c] = row[c].value();
            basis.push_back(std::move(d));
        }
        DVec x(v.size());
        double norm_x = 0;
        for (std::size_t c = 0; c < v.size(); ++c) {
            x[c] = to_double(v[c]);
            norm_x += x[c] * x[c];
        }
        norm_x = std::sqrt(norm_x);
        if (norm_x == 0) return true;
        for (auto& b : basis) {
            for (std::size_t k = 0; k < basis.size(); ++k) {
                if (&basis[k] == &b) break;
                double d = 0;
                for (std::size_t c = 0; c < b.size(); ++c) d += b[c] * basis[k][c];
                for (std::size_t c = 0; c < b.size(); ++c) b[c] -= d * basis[k][c];
            }
            double nb = 0;
            for (double c : b) nb += c * c;
            nb = std::sqrt(nb);
            if (nb > 1e-14)
                for (double& c : b) c /= nb;
            else
                for (double& c : b) c = 0;
        }
        for (const auto& b : basis) {
            double d = 0;
            for (std::size_t c = 0; c < x.size(); ++c) d += x[c] * b[c];
            for (std::size_t c = 0; c < x.size(); ++c) x[c] -= d * b[c];
        }
        double res = 0;
        for (double c : x) res += c * c;
        return std::sqrt(res) <= tol * norm_x;
    }

private:
    std::size_t pivot_of(std::size_t r) const {
        for (std::size_t c = 0; c < vectors[r].size(); ++c)
            if (!vectors[r][c].is_zero()) return c;
        throw std::logic_error("KernelBasis: zero row in canonical basis");
    }
};

/// Same span test: equal dimensions plus membership both ways.
inline bool same_span(const KernelBasis& a, const KernelBasis& b, double tol = 1e-8) {
    if (a.dimension != b.dimension) return false;
    if (a.exact && b.exact) {
        for (const auto& p : a.polynomials())
            if (!b.contains(p)) return false;
        for (const auto& p : b.polynomials())
            if (!a.contains(p)) return false;
        return true;
    }
    // fall back to float membership of whichever side has exact polynomials
    const KernelBasis& ex = a.exact ? a : b;
    const KernelBasis& ap = a.exact ? b : a;
    if (!ex.exact) throw std::invalid_argument("same_span: need one exact side for mixed comparison");
    for (const auto& p : ex.polynomials())
        if (!ap.contains(p, tol)) return false;
    return true;
}

/**
 * Kernel of an assembled system. Exact matrices go through fraction-free
 * elimination and back-substitution; approximate matrices go through an
 * SVD with relative rank threshold kSvdRankTol, and the spectral gap
 * (smallest retained over largest discarded singular value) must reach
 * kSvdGapRequired or the rank is declared ambiguous.
 */
inline KernelBasis kernel_basis(const PdeSystemMatrix& m) {
    KernelBasis kb;
    kb.column_basis = m.column_basis;
    kb.norm = m.norm;
    kb.weight = m.weight;
    kb.degree = m.degree;
    kb.j_list = m.j_list;
    std::size_t k = m.n_cols();

    if (m.exact) {
        QMat a(m.n_rows(), QVec(k));
        for (std::size_t i = 0; i < m.n_rows(); ++i)
            for (std::size_t j = 0; j < k; ++j) a[i][j] = m.rows[i][j].rat();
        linalg::Rref r = linalg::rref(a);
        QMat null_vecs = linalg::nullspace(r, k);
        linalg::Rref canon = linalg::rref(null_vecs);
        kb.dimension = static_cast<int>(null_vecs.size());
        for (const auto& row : canon.mat) {
            std::vector<Scalar> v;
            v.reserve(k);
            for (const auto& q : row) v.emplace_back(q);
            kb.vectors.push_back(std::move(v));
        }
        return kb;
    }

    kb.exact = false;
    DMat a(m.n_rows(), DVec(k));
    for (std::size_t i = 0; i < m.n_rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) a[i][j] = m.rows[i][j].value();
    linalg::Svd svd = linalg::jacobi_svd(a);
    double sigma_max = svd.sigma.empty() ? 0.0 : svd.sigma[0];
    std::size_t rank = 0;
    while (rank < svd.sigma.size() && svd.sigma[rank] > kSvdRankTol * sigma_max && sigma_max > 0)
        ++rank;
    if (rank > 0 && rank < svd.sigma.size()) {
        double largest_discarded = svd.sigma[rank];
        kb.spectral_gap = largest_discarded > 0 ? svd.sigma[rank - 1] / largest_discarded
                                                : std::numeric_limits<double>::infinity();
    }
    if (kb.spectral_gap < kSvdGapRequired) throw AmbiguousRankError(kb.spectral_gap, kSvdGapRequired);

    DMat null_rows;
    for (std::size_t j = rank; j < svd.sigma.size(); ++j) null_rows.push_back(svd.v_cols[j]);
    linalg::FloatRref canon = linalg::float_rref(std::move(null_rows), 1e-9);
    kb.dimension = static_cast<int>(k - rank);
    if (canon.rank != kb.dimension)
        throw AmbiguousRankError(kb.spectral_gap, kSvdGapRequired);
    for (const auto& row : canon.mat) {
        double scale = 0;
        for (double c : row) scale = std::max(scale, std::abs(c));
        std::vector<Scalar> v;
        v.reserve(k);
        for (double c : row) v.push_back(Scalar::approx(c, 1e-12 * scale));
        kb.vectors.push_back(std::move(v));
    }
    return kb;
}

/**
 * End-to-end space of strongly harmonic polynomials of degree <= D for
 * the ball `norm` and polynomial weight w: builds the moment table at
 * the terminating order, assembles the general system with the default
 * equation list, and solves for the kernel.
 */
inline KernelBasis harmonic_space(const NormSpec& norm, const Polynomial& w, int degree) {
    std::vector<int> j_list = default_j_list(degree, w);
    MomentTable table = MomentTable::build(norm, j_list.back());
    PdeSystemMatrix m = assemble_general(w, table, j_list, degree);
    return kernel_basis(m);
}

struct StabilizationScan {
    std::vector<std::pair<int, int>> dims; // (D, dimension)
    bool stabilized = false;               // last three dimensions equal
};

/// Kernel dimension as a function of the ansatz degree; the empirical
/// finite-dimensionality probe.
inline StabilizationScan stabilization_scan(const NormSpec& norm, const Polynomial& w, int d_from,
                                            int d_to) {
    if (d_from > d_to) throw std::invalid_argument("stabilization_scan: bad degree range");
    StabilizationScan out;
    for (int d = d_from; d <= d_to; ++d)
        out.dims.emplace_back(d, harmonic_space(norm, w, d).dimension);
    if (out.dims.size() >= 3) {
        std::size_t s = out.dims.size();
        out.stabilized = out.dims[s - 1].second == out.dims[s - 2].second &&
                         out.dims[s - 2].second == out.dims[s - 3].second;
    }
    return out;
}

} // namespace meanharm
