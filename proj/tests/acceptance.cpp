// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned in the code below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meanharm/json_io.hpp"
#include "meanharm/meanvalue.hpp"

using namespace meanharm;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str(), seconds);
    std::fflush(stdout);
}

double run_timed(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Polynomial P(const std::string& s, int n = 2) { return Polynomial::parse(s, n); }

std::vector<Polynomial> eight_basis_2d() {
    return {P("1"),
            P("x"),
            P("y"),
            P("x*y"),
            P("x^2 - y^2"),
            P("x*y^2 - 1/3*x^3"),
            P("x^2*y - 1/3*y^3"),
            P("x*y^3 - x^3*y")};
}

NormSpec norm_case(int i) {
    switch (i) {
        case 0: return NormSpec::lp(1, 2);
        case 1: return NormSpec::lp(3, 2);
        case 2: return NormSpec::lp(4, 2);
        default: return NormSpec::lp_inf(2);
    }
}

std::string norm_case_name(int i) {
    switch (i) {
        case 0: return "p=1";
        case 1: return "p=3";
        case 2: return "p=4";
        default: return "p=inf";
    }
}

KernelBasis eight_span_basis(const std::vector<MultiIndex>& columns) {
    KernelBasis reference;
    reference.column_basis = columns;
    reference.dimension = 8;
    QMat rows;
    for (const auto& u : eight_basis_2d()) rows.push_back(reference.coefficient_vector(u));
    linalg::Rref canon = linalg::rref(rows);
    for (const auto& r : canon.mat) {
        std::vector<Scalar> v;
        for (const auto& q : r) v.emplace_back(q);
        reference.vectors.push_back(std::move(v));
    }
    return reference;
}

// residual of a float vector outside the span of exact rows (both over the
// same column basis), relative to the vector norm
double span_residual(const QMat& span_rows, const DVec& v) {
    DMat basis;
    for (const auto& row : span_rows) {
        DVec d(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) d[c] = to_double(row[c]);
        basis.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            double dot = 0;
            for (std::size_t c = 0; c < basis[i].size(); ++c) dot += basis[i][c] * basis[k][c];
            for (std::size_t c = 0; c < basis[i].size(); ++c) basis[i][c] -= dot * basis[k][c];
        }
        double nb = 0;
        for (double c : basis[i]) nb += c * c;
        nb = std::sqrt(nb);
        for (double& c : basis[i]) c /= nb;
    }
    DVec x = v;
    double norm_x = 0;
    for (double c : x) norm_x += c * c;
    norm_x = std::sqrt(norm_x);
    for (const auto& b : basis) {
        double dot = 0;
        for (std::size_t c = 0; c < x.size(); ++c) dot += x[c] * b[c];
        for (std::size_t c = 0; c < x.size(); ++c) x[c] -= dot * b[c];
    }
    double res = 0;
    for (double c : x) res += c * c;
    return std::sqrt(res) / norm_x;
}

std::vector<KernelBasis> g_c1_bases; // reused by criterion 5

void criterion_1() {
    bool pass = true;
    std::ostringstream detail;
    detail << "eight-dimensional spaces at D=6 for";
    double total = 0;
    for (int i = 0; i < 4; ++i) {
        NormSpec spec = norm_case(i);
        KernelBasis kb;
        double secs = run_timed([&] { kb = harmonic_space(spec, P("1"), 6); });
        total += secs;
        bool ok = kb.dimension == 8 && secs < 10.0;
        for (const auto& u : eight_basis_2d())
            if (!kb.contains(u, 1e-8)) ok = false;
        if (kb.exact) {
            KernelBasis reference = eight_span_basis(kb.column_basis);
            for (const auto& u : kb.polynomials())
                if (!reference.contains(u)) ok = false;
        } else {
            if (!(kb.spectral_gap > 1e3)) ok = false;
            QMat reference_rows;
            for (const auto& u : eight_basis_2d()) reference_rows.push_back(kb.coefficient_vector(u));
            for (const auto& vec : kb.vectors) {
                DVec v(vec.size());
                for (std::size_t c = 0; c < vec.size(); ++c) v[c] = vec[c].value();
                if (span_residual(reference_rows, v) > 1e-8) ok = false;
            }
        }
        detail << " " << norm_case_name(i) << (ok ? ":ok" : ":FAIL");
        if (!kb.exact) detail << "(gap " << std::scientific << kb.spectral_gap << std::defaultfloat << ")";
        pass = pass && ok;
        g_c1_bases.push_back(kb);
    }
    detail << "; span equals the reference eight-polynomial basis both ways";
    report(1, pass, detail.str(), total);
}

void criterion_2() {
    bool pass = true;
    std::ostringstream detail;
    std::vector<int> dims;
    double secs = run_timed([&] {
        for (int d = 2; d <= 6; ++d)
            dims.push_back(harmonic_space(NormSpec::lp(2, 2), P("1"), d).dimension);
    });
    std::vector<int> expect = {5, 7, 9, 11, 13};
    pass = dims == expect && secs < 10.0;

    // classical-count oracle: brute-force nullity of Delta on the monomial basis
    for (int d = 2; d <= 6 && pass; ++d) {
        std::vector<std::pair<int, int>> monos;
        for (int deg = 0; deg <= d; ++deg)
            for (int a = deg; a >= 0; --a) monos.emplace_back(a, deg - a);
        QMat rows(monos.size(), QVec(monos.size(), Rational(0)));
        auto index_of = [&](int a, int b) {
            for (std::size_t k = 0; k < monos.size(); ++k)
                if (monos[k] == std::make_pair(a, b)) return k;
            return monos.size();
        };
        for (std::size_t col = 0; col < monos.size(); ++col) {
            auto [a, b] = monos[col];
            if (a >= 2) rows[index_of(a - 2, b)][col] += Rational(a * (a - 1));
            if (b >= 2) rows[index_of(a, b - 2)][col] += Rational(b * (b - 1));
        }
        linalg::Rref r = linalg::rref(rows);
        int oracle_dim = static_cast<int>(monos.size()) - r.rank;
        if (oracle_dim != dims[static_cast<std::size_t>(d - 2)]) pass = false;
    }

    std::ostringstream ds;
    for (int d : dims) ds << d << " ";
    report(2, pass, "euclidean contrast D=2..6 dims " + ds.str() + "(no stabilization), oracle agrees",
           secs);
}

void criterion_3() {
    // The spec's literal D=6 inherits a disproven default-degree choice; the
    // space contains degree-9 members, so the criterion is gated on the
    // stabilized degree and the literal D=6 truncation is reported alongside.
    bool pass = true;
    StabilizationScan scan;
    double secs = run_timed(
        [&] { scan = stabilization_scan(NormSpec::lp_inf(3), Polynomial(3, 1), 6, 11); });
    std::vector<std::pair<int, int>> expect = {{6, 39}, {7, 44}, {8, 47}, {9, 48}, {10, 48}, {11, 48}};
    pass = scan.dims == expect && scan.stabilized && secs < 120.0;
    long isometry = (1L << 3) * 6; // 2^3 * 3!
    pass = pass && isometry == 48;
    std::ostringstream detail;
    detail << "cube ball n=3: dimension 48 exactly from the stabilized degree (D=9..11), isometry "
              "count 2^3*3! = "
           << isometry << "; literal D=6 truncation gives " << scan.dims[0].second
           << " (degree-9 members exist; see decisions ledger)";
    report(3, pass, detail.str(), secs);
}

void criterion_4() {
    bool pass = true;
    double secs = run_timed([&] {
        if (std::abs(f_ratio(2) - 1.0 / 3.0) > 1e-12) pass = false;
        if (std::abs(f_ratio(1) - 1.0 / 6.0) > 1e-12) pass = false;
        std::vector<double> grid;
        for (int i = 10; i <= 100; ++i) grid.push_back(i / 10.0);
        grid.push_back(20);
        grid.push_back(50);
        grid.push_back(100);
        FRatioScan scan = f_ratio_scan(grid);
        if (!scan.strictly_increasing) pass = false;
        for (double p : grid) {
            double h = 1e-5;
            double numeric =
                p == 1.0 ? (-3 * f_ratio(p) + 4 * f_ratio(p + h) - f_ratio(p + 2 * h)) / (2 * h)
                         : (f_ratio(p + h) - f_ratio(p - h)) / (2 * h);
            if (std::abs(numeric - f_ratio_derivative(p)) > 1e-6) pass = false;
        }
    });
    report(4, pass && secs < 1.0,
           "f(2)=1/3 and f(1)=1/6 within 1e-12, strict increase on the grid, f' matches the "
           "digamma form within 1e-6",
           secs);
}

void criterion_5() {
    bool pass = true;
    std::ostringstream detail;
    Box box = Box::cube(2, 2);
    double secs = run_timed([&] {
        // p in {1, 3, 4, inf} bases from criterion 1, plus p = 2 exactness
        std::vector<std::pair<std::string, KernelBasis>> cases;
        for (int i = 0; i < 4; ++i) cases.emplace_back(norm_case_name(i), g_c1_bases[static_cast<std::size_t>(i)]);
        cases.emplace_back("p=2", harmonic_space(NormSpec::lp(2, 2), P("1"), 6));

        for (int i = 0; i < 5; ++i) {
            const NormSpec spec = i < 4 ? norm_case(i) : NormSpec::lp(2, 2);
            const KernelBasis& kb = cases[static_cast<std::size_t>(i)].second;
            std::vector<Probe> probes = random_admissible_probes(spec, box, 10, 20250808 + i);
            bool exact_expected = kb.exact;
            double worst = 0;
            for (std::size_t m = 0; m < kb.vectors.size(); ++m) {
                ScalarPoly u = ScalarPoly::from_vector(kb.column_basis, kb.vectors[m]);
                VerificationReport rep =
                    verify_strongly_harmonic(u, P("1"), spec, probes, Oracle::Pizzetti, box);
                if (!rep.pass) pass = false;
                for (const auto& pr : rep.probes) {
                    double diff = std::abs(pr.measured.value() - pr.claimed.value());
                    worst = std::max(worst, diff);
                    if (exact_expected) {
                        if (!(pr.claimed.is_exact() && pr.measured.is_exact() &&
                              pr.claimed.rat() == pr.measured.rat()))
                            pass = false;
                    } else if (diff > 1e-10) {
                        pass = false;
                    }
                }
            }
            detail << cases[static_cast<std::size_t>(i)].first
                   << (exact_expected ? ":exact" : ":<=1e-10") << " ";

            // the exact polytope oracle agrees by rational equality for p in {1, inf}
            if (i == 0 || i == 3) {
                NormSpec body = i == 0 ? diamond_polytope(2) : cube_polytope(2);
                for (const auto& u : kb.polynomials())
                    for (const auto& probe : probes)
                        if (exact_polytope_mean(u, P("1"), body, probe.x, probe.r) !=
                            u.evaluate(probe.x))
                            pass = false;
            }
        }
    });
    report(5, pass && secs < 30.0,
           "mean-value round trip at 10 random rational probes per basis member: " + detail.str() +
               "+ polytope-quadrature equality for p in {1, inf}",
           secs);
}

void criterion_6() {
    bool pass = true;
    std::ostringstream detail;
    double secs = run_timed([&] {
        for (const std::string& ws : {"1", "2 + x", "1 + x^2 + y^2"}) {
            Polynomial w = P(ws);
            int d = 4;
            std::vector<int> j_list = default_j_list(d, w);
            int l_iter = j_list.back() / 2;
            KernelBasis kb_bose = kernel_basis(assemble_bose(w, l_iter - 1, d));
            KernelBasis kb_iter = kernel_basis(assemble_iterated_laplace(w, l_iter, d));
            MomentTable table = MomentTable::build(NormSpec::lp(2, 2), j_list.back());
            KernelBasis kb_gen = kernel_basis(assemble_general(w, table, j_list, d));
            bool equal = kb_bose.dimension == kb_iter.dimension &&
                         kb_iter.dimension == kb_gen.dimension;
            // canonical RREF sets must be identical vector-by-vector
            for (std::size_t r = 0; equal && r < kb_bose.vectors.size(); ++r)
                for (std::size_t c = 0; c < kb_bose.vectors[r].size(); ++c)
                    if (kb_bose.vectors[r][c].rat() != kb_iter.vectors[r][c].rat() ||
                        kb_iter.vectors[r][c].rat() != kb_gen.vectors[r][c].rat())
                        equal = false;
            detail << "w=" << w.str() << " dim " << kb_bose.dimension << (equal ? " ok; " : " MISMATCH; ");
            pass = pass && equal;
        }
        // hand-eliminated oracle at D=2
        KernelBasis kb = harmonic_space(NormSpec::lp(2, 2), P("2 + x"), 2);
        std::vector<Polynomial> hand = {P("1"), P("y"), P("x^2 - 3*y^2 + 4*x")};
        bool ok = kb.dimension == 3;
        for (const auto& u : hand)
            if (!kb.contains(u)) ok = false;
        KernelBasis hand_kb;
        hand_kb.column_basis = kb.column_basis;
        hand_kb.dimension = 3;
        QMat rows;
        for (const auto& u : hand) rows.push_back(hand_kb.coefficient_vector(u));
        linalg::Rref canon = linalg::rref(rows);
        for (const auto& r : canon.mat) {
            std::vector<Scalar> v;
            for (const auto& q : r) v.emplace_back(q);
            hand_kb.vectors.push_back(std::move(v));
        }
        for (const auto& u : kb.polynomials())
            if (!hand_kb.contains(u)) ok = false;
        detail << "w=2+x at D=2 equals the hand basis" << (ok ? "" : " MISMATCH");
        pass = pass && ok;
    });
    report(6, pass && secs < 10.0, "bose / iterated-laplacian / general(l2) kernels coincide: " + detail.str(),
           secs);
}

void criterion_7() {
    int bracketed = 0;
    const int cases = 50;
    double secs = run_timed([&] {
        Rng rng(777);
        Box box = Box::cube(2, 2);
        QMat hex_verts = {{1, 0},  {make_ratio(1, 2), 1},   {make_ratio(-1, 2), 1},
                          {-1, 0}, {make_ratio(-1, 2), -1}, {make_ratio(1, 2), -1}};
        std::vector<NormSpec> norms = {diamond_polytope(2),     cube_polytope(2),
                                       NormSpec::polytope(2, hex_verts), NormSpec::lp(1, 2),
                                       NormSpec::lp(2, 2),      NormSpec::lp_inf(2)};
        for (int rep = 0; rep < cases; ++rep) {
            const NormSpec& spec = norms[static_cast<std::size_t>(rep) % norms.size()];
            Polynomial u(2), w(2, 2); // w = 2 + small terms stays positive on the box
            for (const auto& a : indices_up_to_degree(2, 3)) {
                long cu = static_cast<long>(rng.next_below(9)) - 4;
                if (cu != 0) u.set_coefficient(a, make_ratio(cu, 2));
                if (order(a) > 0 && order(a) <= 2 && rng.next_below(2) == 0)
                    w.set_coefficient(a, make_ratio(1, 16 * (1 + order(a))));
            }
            Probe p;
            p.x = QVec{make_ratio(static_cast<long>(rng.next_below(9)) - 4, 8),
                       make_ratio(static_cast<long>(rng.next_below(9)) - 4, 8)};
            p.r = make_ratio(1 + static_cast<long>(rng.next_below(3)), 8);
            if (!box.admissible(spec, p.x, p.r)) {
                ++bracketed; // should not happen with these grids
                continue;
            }
            MomentTable table = MomentTable::build(spec, u.degree() + w.degree());
            Scalar exact = weighted_mean(ScalarPoly(u), w, table, p.x, p.r);
            Scalar mc = mc_mean(ScalarPoly(u), w, spec, p.x, p.r, 1000000,
                                static_cast<std::uint64_t>(rep));
            double err = mc.abs_error() + exact.abs_error();
            if (std::abs(mc.value() - exact.value()) <= err) ++bracketed;
        }
    });
    bool pass = bracketed >= 48 && secs < 120.0;
    report(7, pass,
           "oracle concordance: MC(1e6) bracketed the exact weighted mean within 4 sigma in " +
               std::to_string(bracketed) + "/50 seeded cases (>= 48 required)",
           secs);
}

void criterion_8() {
    bool pass = true;
    std::ostringstream detail;
    double secs = run_timed([&] {
        auto check_exact = [&](const NormSpec& spec, const Rational& expect, const std::string& name) {
            EllipticityCertificate c = ellipticity_certificate(MomentTable::build(spec, 2));
            bool ok = c.positive && c.min_eigenvalue.is_exact() && c.min_eigenvalue.rat() == expect;
            detail << name << "=" << rational_str(expect) << (ok ? " " : " FAIL ");
            pass = pass && ok;
        };
        check_exact(NormSpec::lp(2, 2), make_ratio(1, 4), "l2");
        check_exact(NormSpec::lp_inf(2), make_ratio(1, 3), "linf");
        check_exact(NormSpec::lp(1, 2), make_ratio(1, 6), "l1");
        for (const NormSpec& spec :
             {NormSpec::lp(3, 2), NormSpec::lp(4, 2), NormSpec::lp_inf(3)}) {
            EllipticityCertificate c = ellipticity_certificate(MomentTable::build(spec, 2));
            if (!c.positive) {
                pass = false;
                detail << spec.str() << " NOT POSITIVE ";
            }
        }
    });
    report(8, pass && secs < 1.0,
           "ellipticity certificates strictly positive for all criteria 1-3 balls, exact values " +
               detail.str(),
           secs);
}

void criterion_9() {
    bool pass = true;
    std::string note;
    double secs = run_timed([&] {
        Polynomial w = P("x^4 + y^4 + 1");
        KernelBasis kb = harmonic_space(NormSpec::lp(2, 2), w, 4);
        if (kb.dimension < 1) pass = false;
        Box box = Box::cube(2, 2);
        // probe balls kept away from the origin so Lap w = 12x^2 + 12y^2 > 0
        std::vector<Probe> probes = {Probe{QVec{1, 1}, make_ratio(1, 4)},
                                     Probe{QVec{make_ratio(-3, 4), make_ratio(3, 4)}, make_ratio(1, 8)},
                                     Probe{QVec{make_ratio(7, 8), make_ratio(-5, 8)}, make_ratio(1, 8)}};
        McOptions mc;
        mc.samples = 1000000;
        mc.seed = 99;
        int verified = 0;
        for (const auto& u : kb.polynomials()) {
            auto res = iterated_weight_check(ScalarPoly(u), w, 1, NormSpec::lp(2, 2), probes,
                                             Oracle::Mc, box, mc);
            if (!(res[1].applicable && res[1].report && res[1].report->pass)) pass = false;
            ++verified;
        }
        note = "dim " + std::to_string(kb.dimension) + ", " + std::to_string(verified) +
               " member(s) verified against the weight Lap w via MC within 4 sigma";
    });
    report(9, pass && secs < 60.0, "iterated weights for w = x^4 + y^4 + 1: " + note, secs);
}

} // namespace

int main() {
    std::printf("acceptance suite: strongly harmonic function artifact\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0)
        std::printf("all 9 criteria passed\n");
    else
        std::printf("%d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
