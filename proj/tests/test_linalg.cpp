#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meanharm/linalg.hpp"
#include "meanharm/rng.hpp"

using namespace meanharm;

namespace {

// random rank-deficient matrix as a product of (m x r) and (r x k)
QMat random_low_rank(Rng& rng, std::size_t m, std::size_t k, std::size_t r) {
    QMat left(m, QVec(r)), right(r, QVec(k));
    for (auto& row : left)
        for (auto& q : row) q = make_ratio(static_cast<long>(rng.next_below(11)) - 5,
                                           1 + static_cast<long>(rng.next_below(3)));
    for (auto& row : right)
        for (auto& q : row) q = make_ratio(static_cast<long>(rng.next_below(11)) - 5,
                                           1 + static_cast<long>(rng.next_below(3)));
    QMat a(m, QVec(k, Rational(0)));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t t = 0; t < r; ++t) a[i][j] += left[i][t] * right[t][j];
    return a;
}

} // namespace

TEST_CASE("bareiss rref: rank-nullity and exact annihilation on random matrices") {
    Rng rng(271828);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t m = 2 + rng.next_below(6);
        std::size_t k = 2 + rng.next_below(7);
        std::size_t r = 1 + rng.next_below(std::min(m, k));
        QMat a = random_low_rank(rng, m, k, r);
        linalg::Rref red = linalg::rref(a);
        CHECK(red.rank <= static_cast<int>(r));
        QMat null_vecs = linalg::nullspace(red, k);
        CHECK(static_cast<int>(null_vecs.size()) == static_cast<int>(k) - red.rank);
        for (const auto& v : null_vecs) {
            for (std::size_t i = 0; i < m; ++i) {
                Rational s = 0;
                for (std::size_t j = 0; j < k; ++j) s += a[i][j] * v[j];
                CHECK(s == 0);
            }
        }
        // pivots are monic and isolated in their columns
        for (std::size_t i = 0; i < red.mat.size(); ++i) {
            std::size_t pc = static_cast<std::size_t>(red.pivot_cols[i]);
            CHECK(red.mat[i][pc] == 1);
            for (std::size_t i2 = 0; i2 < red.mat.size(); ++i2)
                if (i2 != i) CHECK(red.mat[i2][pc] == 0);
        }
    }
}

TEST_CASE("rref is idempotent") {
    Rng rng(99991);
    for (int rep = 0; rep < 20; ++rep) {
        QMat a = random_low_rank(rng, 4, 6, 2 + rng.next_below(2));
        linalg::Rref once = linalg::rref(a);
        linalg::Rref twice = linalg::rref(once.mat);
        CHECK(once.mat == twice.mat);
        CHECK(once.pivot_cols == twice.pivot_cols);
    }
}

TEST_CASE("jacobi svd agrees with the normal-matrix eigenvalue route") {
    Rng rng(1618);
    for (int rep = 0; rep < 25; ++rep) {
        std::size_t m = 2 + rng.next_below(6);
        std::size_t k = 2 + rng.next_below(5);
        DMat a(m, DVec(k));
        for (auto& row : a)
            for (auto& v : row) v = rng.next_in(-2, 2);
        linalg::Svd svd = linalg::jacobi_svd(a);
        // sigma^2 match the eigenvalues of A^T A
        DMat ata(k, DVec(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t t = 0; t < m; ++t) ata[i][j] += a[t][i] * a[t][j];
        DVec eig = linalg::sym_eigenvalues(ata); // ascending
        REQUIRE(svd.sigma.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            double sq = svd.sigma[i] * svd.sigma[i];
            CHECK(sq == doctest::Approx(eig[k - 1 - i]).epsilon(1e-9).scale(1.0));
        }
        // right singular vectors are orthonormal
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double dot = 0;
                for (std::size_t c = 0; c < k; ++c) dot += svd.v_cols[i][c] * svd.v_cols[j][c];
                CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
            }
    }
}

TEST_CASE("svd kernel vectors annihilate the matrix") {
    Rng rng(5150);
    // rank-2 float matrix with a guaranteed kernel
    DMat a(5, DVec(6, 0.0));
    DVec u1(6), u2(6);
    for (auto& v : u1) v = rng.next_in(-1, 1);
    for (auto& v : u2) v = rng.next_in(-1, 1);
    for (std::size_t i = 0; i < 5; ++i) {
        double c1 = rng.next_in(-1, 1), c2 = rng.next_in(-1, 1);
        for (std::size_t j = 0; j < 6; ++j) a[i][j] = c1 * u1[j] + c2 * u2[j];
    }
    linalg::Svd svd = linalg::jacobi_svd(a);
    for (std::size_t idx = 2; idx < 6; ++idx) {
        for (std::size_t i = 0; i < 5; ++i) {
            double dot = 0;
            for (std::size_t j = 0; j < 6; ++j) dot += a[i][j] * svd.v_cols[idx][j];
            CHECK(std::abs(dot) < 1e-12);
        }
    }
}

TEST_CASE("solve_exact recovers planted solutions") {
    Rng rng(8080);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t k = 2 + rng.next_below(3);
        std::size_t m = k + rng.next_below(3);
        QMat a = random_low_rank(rng, m, k, k); // full column rank w.h.p.
        if (linalg::rref(a).rank != static_cast<int>(k)) continue;
        QVec x(k);
        for (auto& q : x) q = make_ratio(static_cast<long>(rng.next_below(9)) - 4, 3);
        QVec b(m, Rational(0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j) b[i] += a[i][j] * x[j];
        CHECK(linalg::solve_exact(a, b) == x);
    }
}
