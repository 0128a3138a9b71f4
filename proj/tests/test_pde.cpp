#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meanharm/pde.hpp"
#include "oracles.hpp"

using namespace meanharm;

namespace {

Polynomial P(const std::string& s, int n = 2) { return Polynomial::parse(s, n); }

// dense, tag-indexed view of a j-block
std::map<MultiIndex, std::vector<Scalar>, GrlexLess> block_of(const PdeSystemMatrix& m, int j) {
    std::map<MultiIndex, std::vector<Scalar>, GrlexLess> out;
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        if (m.row_tags[r].j == j) out.emplace(m.row_tags[r].gamma, m.rows[r]);
    return out;
}

} // namespace

TEST_CASE("column basis size is binom(n+D, n)") {
    MomentTable t = MomentTable::build(NormSpec::lp(2, 2), 6);
    CHECK(assemble_fl(t, {2}, 6).n_cols() == 28);
    MomentTable t3 = MomentTable::build(NormSpec::lp_inf(3), 6);
    CHECK(assemble_fl(t3, {2, 4, 6}, 6).n_cols() == 84);
}

TEST_CASE("j=2 block is proportional to the Laplacian for any lp ball") {
    for (const NormSpec& spec : {NormSpec::lp(2, 2), NormSpec::lp(1, 2), NormSpec::lp_inf(2),
                                 NormSpec::lp(4, 2)}) {
        MomentTable t = MomentTable::build(spec, 2);
        PdeSystemMatrix m = assemble_fl(t, {2}, 3);
        Scalar c = t.coefficient_A({2, 0}); // the proportionality constant
        auto block = block_of(m, 2);
        CHECK(!block.empty());
        for (const auto& [gamma, row] : block) {
            for (std::size_t col = 0; col < m.column_basis.size(); ++col) {
                Polynomial lap = Polynomial::monomial(m.column_basis[col]).laplacian();
                Rational expect = lap.coefficient(gamma);
                if (c.is_exact())
                    CHECK(row[col].value() == doctest::Approx(to_double(Rational(c.rat() * expect))));
                else
                    CHECK(row[col].value() == doctest::Approx(c.value() * to_double(expect)));
            }
        }
    }
}

TEST_CASE("cube j=4 operator has mixed-to-pure ratio 10/3") {
    MomentTable t = MomentTable::build(NormSpec::lp_inf(2), 4);
    CHECK(t.coefficient_A({4, 0}).rat() == make_ratio(1, 5));
    CHECK(t.coefficient_A({2, 2}).rat() == make_ratio(2, 3));
    CHECK(t.coefficient_A({2, 2}).rat() / t.coefficient_A({4, 0}).rat() == make_ratio(10, 3));

    PdeSystemMatrix m = assemble_fl(t, {4}, 4);
    auto block = block_of(m, 4);
    MultiIndex constant{0, 0};
    REQUIRE(block.count(constant));
    const auto& row = block[constant];
    auto col_of = [&](const MultiIndex& b) {
        return static_cast<std::size_t>(
            std::find(m.column_basis.begin(), m.column_basis.end(), b) - m.column_basis.begin());
    };
    CHECK(row[col_of({4, 0})].rat() == make_ratio(24, 5)); // (1/5) * 4!
    CHECK(row[col_of({0, 4})].rat() == make_ratio(24, 5));
    CHECK(row[col_of({2, 2})].rat() == make_ratio(8, 3)); // (2/3) * 2! * 2!
}

TEST_CASE("euclidean j=4 operator is proportional to the bilaplacian") {
    MomentTable t = MomentTable::build(NormSpec::lp(2, 2), 4);
    CHECK(t.coefficient_A({2, 2}).rat() / t.coefficient_A({4, 0}).rat() == 2);
}

TEST_CASE("fl assembly on the diamond equals the lp(1) assembly entry by entry") {
    MomentTable td = MomentTable::build(diamond_polytope(2), 6);
    MomentTable t1 = MomentTable::build(NormSpec::lp(1, 2), 6);
    PdeSystemMatrix md = assemble_fl(td, {2, 4}, 6);
    PdeSystemMatrix m1 = assemble_fl(t1, {2, 4}, 6);
    REQUIRE(md.n_rows() == m1.n_rows());
    for (std::size_t r = 0; r < md.n_rows(); ++r) {
        CHECK(md.row_tags[r].j == m1.row_tags[r].j);
        CHECK(md.row_tags[r].gamma == m1.row_tags[r].gamma);
        for (std::size_t c = 0; c < md.n_cols(); ++c)
            CHECK(md.rows[r][c].rat() == m1.rows[r][c].rat());
    }
}

TEST_CASE("odd j blocks vanish for symmetric balls") {
    MomentTable t = MomentTable::build(NormSpec::lp(2, 2), 4);
    PdeSystemMatrix m = assemble_fl(t, {3}, 4);
    CHECK(m.n_rows() == 0);
    CHECK_FALSE(m.has_rows_for_equation(3));
    PdeSystemMatrix mixed = assemble_fl(t, {2, 3}, 4);
    CHECK(mixed.has_rows_for_equation(2));
    CHECK_FALSE(mixed.has_rows_for_equation(3));
}

TEST_CASE("bose system: hand-eliminated example w = 2+x") {
    PdeSystemMatrix m = assemble_bose(P("2 + x"), 0, 2);
    // independent route: plain Gauss nullity on the assembled rows
    QMat rows;
    for (const auto& r : m.rows) {
        QVec q;
        for (const auto& s : r) q.push_back(s.rat());
        rows.push_back(q);
    }
    CHECK(test_oracle::gauss_nullity(rows, m.n_cols()) == 3);
    // the hand basis satisfies the equation (2+x) Lap u + 2 u_x = 0 directly
    for (const auto& s : {"1", "y", "x^2 - 3*y^2 + 4*x"}) {
        Polynomial u = P(s);
        Polynomial residual = P("2 + x") * u.laplacian() + Rational(2) * grad_dot(u, P("x"));
        CHECK(residual.is_zero());
    }
}

TEST_CASE("bose with w = 1: only the Laplacian row block survives") {
    PdeSystemMatrix m = assemble_bose(P("1"), 3, 4);
    CHECK(m.has_rows_for_equation(0));
    for (int j = 1; j <= 3; ++j) CHECK_FALSE(m.has_rows_for_equation(j));
}

TEST_CASE("bose with w = x^2+y^2+1: the j=1 block encodes 4 Lap u") {
    PdeSystemMatrix m = assemble_bose(P("x^2 + y^2 + 1"), 1, 2);
    auto block = block_of(m, 1);
    CHECK(!block.empty());
    for (const auto& [gamma, row] : block) {
        for (std::size_t col = 0; col < m.column_basis.size(); ++col) {
            Polynomial lap = Polynomial::monomial(m.column_basis[col]).laplacian();
            CHECK(row[col].rat() == Rational(4) * lap.coefficient(gamma));
        }
    }
}

TEST_CASE("iterated laplace: membership of the bose example") {
    Polynomial u = P("x^2 - 3*y^2 + 4*x"), w = P("2 + x");
    CHECK(((u * w).laplacian() - u * w.laplacian()).is_zero());
}

TEST_CASE("iterated laplace kernels match bose kernels (gauss-rank route)") {
    auto nullity = [](const PdeSystemMatrix& m) {
        QMat rows;
        for (const auto& r : m.rows) {
            QVec q;
            for (const auto& s : r) q.push_back(s.rat());
            rows.push_back(q);
        }
        return test_oracle::gauss_nullity(rows, m.n_cols());
    };
    CHECK(nullity(assemble_iterated_laplace(P("1"), 1, 4)) == nullity(assemble_bose(P("1"), 0, 4)));
    CHECK(nullity(assemble_iterated_laplace(P("2 + x"), 2, 4)) ==
          nullity(assemble_bose(P("2 + x"), 1, 4)));
}

TEST_CASE("default j list") {
    CHECK(default_j_list(6, P("1")) == std::vector<int>{2, 4, 6});
    CHECK(default_j_list(4, P("2 + x")) == std::vector<int>{2, 4, 6}); // 5 rounds up
    CHECK(default_j_list(1, P("1")) == std::vector<int>{2});
}

TEST_CASE("assembly determinism and CSV export") {
    MomentTable t = MomentTable::build(NormSpec::lp_inf(2), 6);
    PdeSystemMatrix a = assemble_fl(t, {2, 4}, 4);
    PdeSystemMatrix b = assemble_fl(t, {2, 4}, 4);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.to_csv().find("24/5") != std::string::npos);
}

TEST_CASE("insufficient moment order is rejected with the required order") {
    MomentTable t = MomentTable::build(NormSpec::lp(2, 2), 2);
    try {
        assemble_fl(t, {2, 4}, 4);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("j=4") != std::string::npos);
    }
}

TEST_CASE("scale invariance: scaling one j block leaves the nullity unchanged") {
    MomentTable t = MomentTable::build(NormSpec::lp_inf(2), 6);
    MomentTable::EntryMap scaled_entries = t.entries();
    for (auto& [alpha, m] : scaled_entries)
        if (order(alpha) == 4) m = Rational(make_ratio(7, 3)) * m;
    MomentTable scaled = MomentTable::from_entries(t.norm(), t.max_order(), scaled_entries, t.volume());

    auto nullity = [](const PdeSystemMatrix& m) {
        QMat rows;
        for (const auto& r : m.rows) {
            QVec q;
            for (const auto& s : r) q.push_back(s.rat());
            rows.push_back(q);
        }
        return test_oracle::gauss_nullity(rows, m.n_cols());
    };
    PdeSystemMatrix base = assemble_fl(t, {2, 4, 6}, 6);
    PdeSystemMatrix mod = assemble_fl(scaled, {2, 4, 6}, 6);
    CHECK(nullity(base) == nullity(mod));
}

TEST_CASE("euclidean j-block is a positive multiple of the iterated-laplacian block") {
    // for the l2 ball, sum_{|a|=j} A_a D^a = c_j Lap^{j/2} with
    // c_j = A_{(j,0)}; checked row-by-row on a nonconstant weight
    Polynomial w = P("2 + x");
    MomentTable t = MomentTable::build(NormSpec::lp(2, 2), 6);
    PdeSystemMatrix gen = assemble_general(w, t, {4}, 4);
    PdeSystemMatrix iter = assemble_iterated_laplace(w, 2, 4);
    Rational c4 = t.coefficient_A({4, 0}).rat();
    CHECK(c4 == make_ratio(1, 8));
    auto gen_block = block_of(gen, 4);
    auto iter_block = block_of(iter, 2);
    REQUIRE(!gen_block.empty());
    REQUIRE(gen_block.size() == iter_block.size());
    for (const auto& [gamma, grow] : gen_block) {
        REQUIRE(iter_block.count(gamma));
        const auto& irow = iter_block[gamma];
        for (std::size_t col = 0; col < grow.size(); ++col)
            CHECK(grow[col].rat() == c4 * irow[col].rat());
    }
}
