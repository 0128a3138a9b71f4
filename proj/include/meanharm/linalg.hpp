#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "meanharm/rational.hpp"

namespace meanharm {
namespace linalg {

/// Determinant of a square rational matrix (plain elimination; matrices here are tiny).
inline Rational det(QMat a) {
    std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("det: matrix not square");
    Rational d = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            d = -d;
        }
        d *= a[col][col];
        for (std::size_t i = col + 1; i < n; ++i) {
            if (a[i][col] == 0) continue;
            Rational f = a[i][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
        }
    }
    return d;
}

struct Rref {
    QMat mat;                   // reduced row echelon form, zero rows dropped
    std::vector<int> pivot_cols;
    int rank = 0;
};

/*
 * Reduced row echelon form via fraction-free (Bareiss) forward
 * elimination on an integer-scaled copy, followed by rational
 * back-substitution. Pivots are chosen left-to-right, first nonzero row,
 * so the result is deterministic. Exactness of the Bareiss division is
 * asserted rather than assumed.
 */
inline Rref rref(const QMat& a_in) {
    Rref out;
    std::size_t m = a_in.size();
    if (m == 0) return out;
    std::size_t k = a_in[0].size();

    // scale each row to integers
    std::vector<std::vector<BigInt>> z(m, std::vector<BigInt>(k));
    for (std::size_t i = 0; i < m; ++i) {
        if (a_in[i].size() != k) throw std::invalid_argument("rref: ragged matrix");
        BigInt lcm = 1;
        for (const auto& q : a_in[i]) {
            BigInt den = q.get_den();
            BigInt g;
            mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
            lcm = lcm / g * den;
        }
        for (std::size_t j = 0; j < k; ++j) {
            Rational q = a_in[i][j] * Rational(lcm);
            q.canonicalize();
            z[i][j] = q.get_num();
        }
    }

    BigInt prev = 1;
    std::size_t r = 0;
    for (std::size_t col = 0; col < k && r < m; ++col) {
        std::size_t piv = r;
        while (piv < m && z[piv][col] == 0) ++piv;
        if (piv == m) continue;
        if (piv != r) std::swap(z[piv], z[r]);
        for (std::size_t i = r + 1; i < m; ++i) {
            for (std::size_t j = col + 1; j < k; ++j) {
                BigInt num = z[i][j] * z[r][col] - z[i][col] * z[r][j];
                BigInt q_, rem;
                mpz_tdiv_qr(q_.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
                if (rem != 0) throw std::logic_error("rref: Bareiss division not exact");
                z[i][j] = q_;
            }
            z[i][col] = 0;
        }
        prev = z[r][col];
        out.pivot_cols.push_back(static_cast<int>(col));
        ++r;
    }
    out.rank = static_cast<int>(r);

    // back-substitution over rationals, pivots normalized to 1
    QMat red(r, QVec(k, Rational(0)));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < k; ++j) red[i][j] = Rational(z[i][j]);
    for (std::size_t i = r; i-- > 0;) {
        std::size_t pc = static_cast<std::size_t>(out.pivot_cols[i]);
        Rational inv = red[i][pc];
        for (std::size_t j = pc; j < k; ++j) red[i][j] /= inv;
        for (std::size_t i2 = 0; i2 < i; ++i2) {
            Rational f = red[i2][pc];
            if (f == 0) continue;
            for (std::size_t j = pc; j < k; ++j) red[i2][j] -= f * red[i][j];
        }
    }
    out.mat = std::move(red);
    return out;
}

/// Basis of the right nullspace from an RREF, one vector per free column,
/// in free-column order.
inline QMat nullspace(const Rref& r, std::size_t ncols) {
    std::vector<bool> is_pivot(ncols, false);
    for (int c : r.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
    QMat basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        QVec v(ncols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < r.mat.size(); ++i)
            v[static_cast<std::size_t>(r.pivot_cols[i])] = -r.mat[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve A x = b for a consistent system with full column rank (exact).
inline QVec solve_exact(const QMat& a, const QVec& b) {
    std::size_t m = a.size();
    if (m == 0 || m != b.size()) throw std::invalid_argument("solve_exact: shape mismatch");
    std::size_t k = a[0].size();
    QMat aug(m, QVec(k + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug[i][j] = a[i][j];
        aug[i][k] = b[i];
    }
    Rref r = rref(aug);
    QVec x(k, Rational(0));
    for (std::size_t i = 0; i < r.mat.size(); ++i) {
        std::size_t pc = static_cast<std::size_t>(r.pivot_cols[i]);
        if (pc == k) throw std::domain_error("solve_exact: inconsistent system");
        x[pc] = r.mat[i][k];
    }
    // verify (full column rank callers get exact solutions; anything else is a bug upstream)
    for (std::size_t i = 0; i < m; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < k; ++j) s += a[i][j] * x[j];
        if (s != b[i]) throw std::domain_error("solve_exact: system has no solution");
    }
    return x;
}

struct FloatRref {
    DMat mat;
    std::vector<int> pivot_cols;
    int rank = 0;
};

/// Gauss-Jordan on floats with per-column partial pivoting; columns whose
/// remaining entries are below tol (relative to the matrix max) are free.
inline FloatRref float_rref(DMat a, double rel_tol = 1e-9) {
    FloatRref out;
    std::size_t m = a.size();
    if (m == 0) return out;
    std::size_t k = a[0].size();
    double biggest = 0;
    for (const auto& row : a)
        for (double v : row) biggest = std::max(biggest, std::abs(v));
    if (biggest == 0) return out;
    double tol = rel_tol * biggest;

    std::size_t r = 0;
    for (std::size_t col = 0; col < k && r < m; ++col) {
        std::size_t piv = r;
        double best = std::abs(a[r][col]);
        for (std::size_t i = r + 1; i < m; ++i)
            if (std::abs(a[i][col]) > best) {
                best = std::abs(a[i][col]);
                piv = i;
            }
        if (best <= tol) continue;
        std::swap(a[piv], a[r]);
        double inv = 1.0 / a[r][col];
        for (std::size_t j = col; j < k; ++j) a[r][j] *= inv;
        a[r][col] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) continue;
            double f = a[i][col];
            if (f == 0) continue;
            for (std::size_t j = col; j < k; ++j) a[i][j] -= f * a[r][j];
            a[i][col] = 0.0;
        }
        out.pivot_cols.push_back(static_cast<int>(col));
        ++r;
    }
    a.resize(r);
    out.mat = std::move(a);
    out.rank = static_cast<int>(r);
    return out;
}

struct Svd {
    std::vector<double> sigma; // descending
    DMat v_cols;               // v_cols[j] is the right singular vector for sigma[j]
};

/// One-sided Jacobi SVD; adequate and robust for the small dense systems
/// assembled here. Returns all k singular values (zeros included when m < k).
inline Svd jacobi_svd(const DMat& a_in) {
    std::size_t m = a_in.size();
    std::size_t k = m == 0 ? 0 : a_in[0].size();
    // column-major work copy
    DMat w(k, DVec(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) w[j][i] = a_in[i][j];
    DMat v(k, DVec(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) v[j][j] = 1.0;

    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += w[p][i] * w[p][i];
                    aqq += w[q][i] * w[q][i];
                    apq += w[p][i] * w[q][i];
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0) continue;
                rotated = true;
                double zeta = (aqq - app) / (2.0 * apq);
                double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double cs = 1.0 / std::sqrt(1.0 + t * t);
                double sn = cs * t;
                for (std::size_t i = 0; i < m; ++i) {
                    double wp = w[p][i], wq = w[q][i];
                    w[p][i] = cs * wp - sn * wq;
                    w[q][i] = sn * wp + cs * wq;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    double vp = v[p][i], vq = v[q][i];
                    v[p][i] = cs * vp - sn * vq;
                    v[q][i] = sn * vp + cs * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    std::vector<double> norms(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < m; ++i) s += w[j][i] * w[j][i];
        norms[j] = std::sqrt(s);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    Svd out;
    out.sigma.resize(k);
    out.v_cols.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        out.sigma[j] = norms[idx[j]];
        out.v_cols[j] = v[idx[j]];
    }
    return out;
}

/// Eigenvalues of a small symmetric matrix by classic Jacobi rotations.
inline DVec sym_eigenvalues(DMat s) {
    std::size_t n = s.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += s[i][j] * s[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(s[p][q]) < 1e-300) continue;
                double zeta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double cs = 1.0 / std::sqrt(1.0 + t * t);
                double sn = cs * t;
                for (std::size_t i = 0; i < n; ++i) {
                    double sp = s[p][i], sq = s[q][i];
                    s[p][i] = cs * sp - sn * sq;
                    s[q][i] = sn * sp + cs * sq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double sp = s[i][p], sq = s[i][q];
                    s[i][p] = cs * sp - sn * sq;
                    s[i][q] = sn * sp + cs * sq;
                }
            }
        }
    }
    DVec eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = s[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace linalg
} // namespace meanharm
