#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/moments.hpp"
#include "meanharm/multiindex.hpp"
#include "meanharm/polynomial.hpp"
#include "meanharm/scalar.hpp"

namespace meanharm {

struct PdeRowTag {
    int j;            // equation index
    MultiIndex gamma; // output monomial the row matches against zero
};

/**
 * Linear system on polynomial coefficient vectors: a coefficient vector c
 * over `column_basis` lies in the kernel iff u = sum c_beta x^beta
 * satisfies every assembled equation as a polynomial identity. Rows that
 * are identically zero are dropped (their tags carry no constraint).
 */
struct PdeSystemMatrix {
    std::vector<MultiIndex> column_basis; // graded-lex monomials, |beta| <= degree
    std::vector<std::vector<Scalar>> rows;
    std::vector<PdeRowTag> row_tags;
    std::optional<NormSpec> norm;
    Polynomial weight;
    int degree = 0;
    std::vector<int> j_list;
    bool exact = true;

    PdeSystemMatrix() : weight(1, Rational(1)) {}

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return column_basis.size(); }

    bool has_rows_for_equation(int j) const {
        return std::any_of(row_tags.begin(), row_tags.end(),
                           [j](const PdeRowTag& t) { return t.j == j; });
    }

    /// Debug CSV: "j,gamma,entries..." with exact entries as num/den.
    std::string to_csv() const {
        std::ostringstream os;
        os << "j,gamma";
        for (const auto& b : column_basis) {
            os << ",";
            for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
        }
        os << "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            os << row_tags[r].j << ",";
            for (std::size_t i = 0; i < row_tags[r].gamma.size(); ++i)
                os << (i ? " " : "") << row_tags[r].gamma[i];
            for (const auto& v : rows[r]) os << "," << v.str();
            os << "\n";
        }
        return os.str();
    }
};

/// Default equation list: all even j from 2 through D + deg(w), rounded up
/// to even; the Pizzetti expansion of polynomial data terminates there.
inline std::vector<int> default_j_list(int degree, const Polynomial& w) {
    int top = degree + w.degree();
    if (top % 2 != 0) ++top;
    std::vector<int> j_list;
    for (int j = 2; j <= top; j += 2) j_list.push_back(j);
    if (j_list.empty()) j_list.push_back(2);
    return j_list;
}

namespace detail {

// Collects rows from per-column residual polynomials with Scalar
// coefficients, one row per (equation, output monomial) with any nonzero
// entry, ordered by (j, graded-lex gamma).
class RowAccumulator {
public:
    RowAccumulator(int j, std::size_t n_cols) : j_(j), n_cols_(n_cols) {}

    void add(const MultiIndex& gamma, std::size_t col, const Scalar& value) {
        if (value.is_zero()) return;
        auto [it, fresh] = rows_.try_emplace(gamma, std::vector<Scalar>(n_cols_, Scalar(0)));
        it->second[col] = it->second[col] + value;
    }

    void flush(PdeSystemMatrix& m) const {
        for (const auto& [gamma, row] : rows_) {
            if (std::all_of(row.begin(), row.end(), [](const Scalar& s) { return s.is_zero(); }))
                continue;
            m.rows.push_back(row);
            m.row_tags.push_back({j_, gamma});
            for (const auto& s : row)
                if (!s.is_exact()) m.exact = false;
        }
    }

private:
    int j_;
    std::size_t n_cols_;
    std::map<MultiIndex, std::vector<Scalar>, GrlexLess> rows_;
};

} // namespace detail

/**
 * General weighted system: for each j in j_list the equation
 *   sum_{|alpha|=j} A_alpha ( D^alpha(u w) - u D^alpha w ) = 0
 * as a polynomial identity in the coefficients of u, deg u <= D.
 * Exact whenever the moment table is exact.
 */
inline PdeSystemMatrix assemble_general(const Polynomial& w, const MomentTable& table,
                                        std::vector<int> j_list, int degree) {
    if (j_list.empty()) throw std::invalid_argument("assemble_general: empty j_list");
    int n = table.dim();
    if (w.dimension() != n) throw std::invalid_argument("assemble_general: weight dimension mismatch");
    int max_j = *std::max_element(j_list.begin(), j_list.end());
    if (max_j > table.max_order())
        throw std::invalid_argument("assemble_general: moment table covers order " +
                                    std::to_string(table.max_order()) + " but equation j=" +
                                    std::to_string(max_j) + " is requested");

    PdeSystemMatrix m;
    m.column_basis = indices_up_to_degree(n, degree);
    m.norm = table.norm();
    m.weight = w;
    m.degree = degree;
    m.j_list = j_list;

    for (int j : j_list) {
        detail::RowAccumulator acc(j, m.column_basis.size());
        auto alphas = indices_of_degree(n, j);
        for (std::size_t col = 0; col < m.column_basis.size(); ++col) {
            Polynomial xb = Polynomial::monomial(m.column_basis[col]);
            Polynomial xbw = xb * w;
            for (const auto& alpha : alphas) {
                Scalar a_coef = table.coefficient_A(alpha);
                if (a_coef.is_zero()) continue;
                Polynomial residual = xbw.derivative(alpha) - xb * w.derivative(alpha);
                for (const auto& [gamma, c] : residual.terms())
                    acc.add(gamma, col, a_coef * Scalar(c));
            }
        }
        acc.flush(m);
    }
    return m;
}

/// Unweighted specialization: the system
/// sum_{|alpha|=j} A_alpha D^alpha u = 0.
inline PdeSystemMatrix assemble_fl(const MomentTable& table, std::vector<int> j_list, int degree) {
    return assemble_general(Polynomial(table.dim(), Rational(1)), table, std::move(j_list), degree);
}

/**
 * Bose system for the Euclidean metric and weight w:
 *   Delta u . Delta^j w + 2 grad u . grad(Delta^j w) = 0 for j = 0..l.
 * Fully rational, no moment table involved.
 */
inline PdeSystemMatrix assemble_bose(const Polynomial& w, int l, int degree) {
    if (l < 0) throw std::invalid_argument("assemble_bose: l must be >= 0");
    int n = w.dimension();
    PdeSystemMatrix m;
    m.column_basis = indices_up_to_degree(n, degree);
    m.weight = w;
    m.degree = degree;
    for (int j = 0; j <= l; ++j) m.j_list.push_back(j);

    Polynomial wj = w; // Delta^j w
    for (int j = 0; j <= l; ++j) {
        if (j > 0) wj = wj.laplacian();
        detail::RowAccumulator acc(j, m.column_basis.size());
        for (std::size_t col = 0; col < m.column_basis.size(); ++col) {
            Polynomial xb = Polynomial::monomial(m.column_basis[col]);
            Polynomial eq = xb.laplacian() * wj + Rational(2) * grad_dot(xb, wj);
            for (const auto& [gamma, c] : eq.terms()) acc.add(gamma, col, Scalar(c));
        }
        acc.flush(m);
    }
    return m;
}

/// Iterated-Laplacian system Delta^l(u w) = u Delta^l w for l = 1..l_max.
inline PdeSystemMatrix assemble_iterated_laplace(const Polynomial& w, int l_max, int degree) {
    if (l_max < 1) throw std::invalid_argument("assemble_iterated_laplace: l_max must be >= 1");
    int n = w.dimension();
    PdeSystemMatrix m;
    m.column_basis = indices_up_to_degree(n, degree);
    m.weight = w;
    m.degree = degree;
    for (int l = 1; l <= l_max; ++l) m.j_list.push_back(l);

    for (int l = 1; l <= l_max; ++l) {
        Polynomial wl = laplacian_iter(w, l);
        detail::RowAccumulator acc(l, m.column_basis.size());
        for (std::size_t col = 0; col < m.column_basis.size(); ++col) {
            Polynomial xb = Polynomial::monomial(m.column_basis[col]);
            Polynomial eq = laplacian_iter(xb * w, l) - xb * wl;
            for (const auto& [gamma, c] : eq.terms()) acc.add(gamma, col, Scalar(c));
        }
        acc.flush(m);
    }
    return m;
}

} // namespace meanharm
