#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanharm/linalg.hpp"
#include "meanharm/multiindex.hpp"
#include "meanharm/rational.hpp"
#include "meanharm/scalar.hpp"

namespace meanharm {

/// Non-degenerate simplex with exact rational vertices (n+1 points in R^n).
struct Simplex {
    QMat vertices;

    explicit Simplex(QMat verts) : vertices(std::move(verts)) {
        std::size_t n = vertices.empty() ? 0 : vertices[0].size();
        if (vertices.size() != n + 1)
            throw std::invalid_argument("Simplex: need n+1 vertices in R^n");
        if (edge_det() == 0) throw std::invalid_argument("Simplex: degenerate vertex set");
    }

    Rational edge_det() const {
        std::size_t n = vertices[0].size();
        QMat e(n, QVec(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) e[i][j] = vertices[i + 1][j] - vertices[0][j];
        return linalg::det(e);
    }

    Rational volume() const {
        Rational d = edge_det();
        if (d < 0) d = -d;
        return d / Rational(factorial(static_cast<unsigned>(vertices[0].size())));
    }
};

namespace geom {

// Hyperplane normal through d points in R^d via cofactor expansion of the
// (d-1) x d edge matrix; zero vector when the points are affinely dependent.
inline QVec hyperplane_normal(const QMat& pts) {
    std::size_t d = pts[0].size();
    if (pts.size() != d) throw std::invalid_argument("hyperplane_normal: need d points");
    if (d == 1) return {Rational(1)};
    QMat e(d - 1, QVec(d));
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = 0; j < d; ++j) e[i][j] = pts[i + 1][j] - pts[0][j];
    QVec normal(d);
    for (std::size_t col = 0; col < d; ++col) {
        QMat minor(d - 1, QVec(d - 1));
        for (std::size_t i = 0; i + 1 < d; ++i) {
            std::size_t jj = 0;
            for (std::size_t j = 0; j < d; ++j) {
                if (j == col) continue;
                minor[i][jj++] = e[i][j];
            }
        }
        Rational c = linalg::det(minor);
        normal[col] = (col % 2 == 0) ? c : Rational(-c);
    }
    return normal;
}

inline Rational dot(const QVec& a, const QVec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct Facet {
    std::vector<std::size_t> members; // indices of points on the facet
    QVec normal;                      // outward
    Rational offset;                  // <normal, x> = offset on the facet, interior side <
};

// Brute-force facet enumeration of a full-dimensional point set in R^d:
// every d-subset spanning a hyperplane with all points on one side is a
// supporting hyperplane; coplanar subsets collapse onto one facet. Fine
// for the small vertex counts of symmetric bodies in d <= 4.
inline std::vector<Facet> enumerate_facets(const QMat& pts, const QVec& interior) {
    std::size_t n_pts = pts.size();
    std::size_t d = pts[0].size();
    std::map<QVec, Facet> found; // keyed by normalized (normal | offset)

    auto visit = [&](const std::vector<std::size_t>& sel) {
        QMat sub(d);
        for (std::size_t i = 0; i < d; ++i) sub[i] = pts[sel[i]];
        QVec normal = hyperplane_normal(sub);
        bool zero = std::all_of(normal.begin(), normal.end(), [](const Rational& q) { return q == 0; });
        if (zero) return;
        Rational offset = dot(normal, sub[0]);
        bool above = false, below = false;
        for (std::size_t i = 0; i < n_pts; ++i) {
            Rational s = dot(normal, pts[i]) - offset;
            if (s > 0) above = true;
            else if (s < 0) below = true;
            if (above && below) return;
        }
        Rational side = dot(normal, interior) - offset;
        if (side == 0) return; // hyperplane through the interior point cannot support
        if (side > 0) {
            for (auto& q : normal) q = -q;
            offset = -offset;
        }
        // canonical key: scale so the vector (normal | offset) is integral and primitive
        QVec key = normal;
        key.push_back(offset);
        BigInt lcm = 1;
        for (const auto& q : key) {
            BigInt den = q.get_den(), g;
            mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
            lcm = lcm / g * den;
        }
        BigInt gcd = 0;
        for (auto& q : key) {
            q *= Rational(lcm);
            q.canonicalize();
            BigInt num = q.get_num(), g;
            mpz_gcd(g.get_mpz_t(), gcd.get_mpz_t(), num.get_mpz_t());
            gcd = g;
        }
        if (gcd != 0)
            for (auto& q : key) q /= Rational(gcd);
        if (found.count(key)) return;
        Facet f;
        f.normal = normal;
        f.offset = offset;
        for (std::size_t i = 0; i < n_pts; ++i)
            if (dot(normal, pts[i]) == offset) f.members.push_back(i);
        found.emplace(std::move(key), std::move(f));
    };

    // iterate d-subsets in lexicographic order
    std::vector<std::size_t> idx(d);
    auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == d) {
            visit(idx);
            return;
        }
        for (std::size_t i = start; i < n_pts; ++i) {
            idx[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    if (d == 1) {
        // the two extreme points are the facets
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < n_pts; ++i) {
            if (pts[i][0] < pts[lo][0]) lo = i;
            if (pts[i][0] > pts[hi][0]) hi = i;
        }
        Facet fl{{lo}, {Rational(-1)}, -pts[lo][0]};
        Facet fh{{hi}, {Rational(1)}, pts[hi][0]};
        return {fl, fh};
    }
    rec(rec, 0, 0);

    std::vector<Facet> out;
    for (auto& [k, f] : found) out.push_back(std::move(f));
    return out;
}

/// Express points lying on a (d-1)-flat of R^d in exact local coordinates.
inline QMat affine_coords(const QMat& pts) {
    std::size_t d = pts[0].size();
    const QVec& p0 = pts[0];
    // greedy independent edge basis
    QMat basis; // columns as rows here: basis[j] is the j-th basis vector in R^d
    for (std::size_t i = 1; i < pts.size() && basis.size() < d - 1; ++i) {
        QVec e(d);
        for (std::size_t j = 0; j < d; ++j) e[j] = pts[i][j] - p0[j];
        QMat test = basis;
        test.push_back(e);
        if (linalg::rref(test).rank == static_cast<int>(test.size())) basis.push_back(std::move(e));
    }
    if (basis.size() != d - 1)
        throw std::invalid_argument("affine_coords: points do not span a (d-1)-flat");
    // B t = p - p0 with B the d x (d-1) matrix of basis columns
    QMat b_mat(d, QVec(d - 1));
    for (std::size_t j = 0; j < d - 1; ++j)
        for (std::size_t i = 0; i < d; ++i) b_mat[i][j] = basis[j][i];
    QMat coords;
    for (const auto& p : pts) {
        QVec rhs(d);
        for (std::size_t j = 0; j < d; ++j) rhs[j] = p[j] - p0[j];
        coords.push_back(linalg::solve_exact(b_mat, rhs));
    }
    return coords;
}

// Recursive first-vertex triangulation of a full-dimensional convex point
// set given in local coordinates; emits index tuples into `pts_idx`.
inline void triangulate_rec(const std::vector<std::size_t>& pts_idx, const QMat& coords,
                            std::vector<std::vector<std::size_t>>& out) {
    std::size_t d = coords[0].size();
    if (d == 1) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < coords.size(); ++i) {
            if (coords[i][0] < coords[lo][0]) lo = i;
            if (coords[i][0] > coords[hi][0]) hi = i;
        }
        out.push_back({pts_idx[lo], pts_idx[hi]});
        return;
    }
    // deterministic apex: lexicographically smallest local coordinate
    std::size_t apex = 0;
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (coords[i] < coords[apex]) apex = i;
    QVec centroid(d, Rational(0));
    for (const auto& c : coords)
        for (std::size_t j = 0; j < d; ++j) centroid[j] += c[j];
    for (auto& q : centroid) q /= Rational(static_cast<int>(coords.size()));
    auto facets = enumerate_facets(coords, centroid);
    for (const auto& f : facets) {
        if (std::find(f.members.begin(), f.members.end(), apex) != f.members.end()) continue;
        QMat sub_pts(f.members.size());
        std::vector<std::size_t> sub_idx(f.members.size());
        for (std::size_t i = 0; i < f.members.size(); ++i) {
            sub_pts[i] = coords[f.members[i]];
            sub_idx[i] = pts_idx[f.members[i]];
        }
        std::vector<std::vector<std::size_t>> sub_simplices;
        triangulate_rec(sub_idx, affine_coords(sub_pts), sub_simplices);
        for (auto& s : sub_simplices) {
            s.insert(s.begin(), pts_idx[apex]);
            out.push_back(std::move(s));
        }
    }
}

} // namespace geom

/**
 * Unit ball description of a norm-induced metric: either an l^p ball
 * (1 <= p <= inf, p rational) or an origin-symmetric full-dimensional
 * convex polytope given by its vertices. Immutable after construction;
 * construction validates everything so later operations cannot fail on
 * a malformed ball.
 */
class NormSpec {
public:
    static NormSpec lp(const Rational& p, int n) {
        if (p < 1) throw std::invalid_argument("lp norm requires p >= 1");
        if (n < 1 || n > 8) throw std::invalid_argument("lp norm supports 1 <= n <= 8");
        NormSpec s;
        s.n_ = n;
        s.p_ = p;
        return s;
    }

    static NormSpec lp_inf(int n) {
        if (n < 1 || n > 8) throw std::invalid_argument("lp norm supports 1 <= n <= 8");
        NormSpec s;
        s.n_ = n;
        s.inf_ = true;
        return s;
    }

    static NormSpec polytope(int n, QMat vertices) {
        if (n < 1 || n > 4) throw std::invalid_argument("polytope balls support 1 <= n <= 4");
        NormSpec s;
        s.n_ = n;
        s.is_polytope_ = true;
        for (const auto& v : vertices)
            if (static_cast<int>(v.size()) != n)
                throw std::invalid_argument("polytope vertex of wrong dimension");
        std::sort(vertices.begin(), vertices.end());
        vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
        if (vertices.size() < 2) throw std::invalid_argument("polytope needs at least 2 vertices");
        s.vertices_ = std::move(vertices);
        s.validate_polytope();
        return s;
    }

    int dim() const { return n_; }
    bool is_polytope() const { return is_polytope_; }
    bool is_lp() const { return !is_polytope_; }
    bool is_inf() const { return inf_; }
    const Rational& p() const {
        if (is_polytope_ || inf_) throw std::logic_error("NormSpec: no finite p");
        return p_;
    }
    const QMat& vertices() const { return vertices_; }

    /// Facet normals a_f with the ball = { x : <a_f, x> <= 1 for all f } (polytope only).
    const QMat& facet_normals() const {
        if (!is_polytope_) throw std::logic_error("NormSpec: facets of a non-polytope ball");
        return facet_normals_;
    }

    bool axis_symmetric() const { return axis_symmetric_; }

    /// Per-axis half-width c_i of the tight bounding box prod [-c_i, c_i].
    QVec bounding_box() const {
        QVec c(static_cast<std::size_t>(n_), Rational(1));
        if (is_polytope_) {
            for (std::size_t i = 0; i < static_cast<std::size_t>(n_); ++i) {
                Rational m = 0;
                for (const auto& v : vertices_) {
                    Rational a = v[i] < 0 ? Rational(-v[i]) : v[i];
                    if (a > m) m = a;
                }
                c[i] = m;
            }
        }
        return c;
    }

    /// Minkowski functional of the unit ball; exact for polytopes and
    /// p in {1, inf}, float otherwise.
    Scalar gauge(const QVec& v) const {
        check_point(v.size());
        if (is_polytope_) {
            Rational best = 0;
            for (const auto& a : facet_normals_) {
                Rational s = geom::dot(a, v);
                if (s > best) best = s;
            }
            return Scalar(best);
        }
        if (inf_) {
            Rational best = 0;
            for (const auto& x : v) {
                Rational a = x < 0 ? Rational(-x) : x;
                if (a > best) best = a;
            }
            return Scalar(best);
        }
        if (p_ == 1) {
            Rational s = 0;
            for (const auto& x : v) s += x < 0 ? Rational(-x) : x;
            return Scalar(s);
        }
        DVec dv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dv[i] = to_double(v[i]);
        double g = gauge(dv);
        return Scalar::approx(g, 1e-14 * std::abs(g));
    }

    double gauge(const DVec& v) const {
        check_point(v.size());
        if (is_polytope_) {
            double best = 0;
            for (const auto& a : facet_normals_d_) {
                double s = 0;
                for (std::size_t i = 0; i < v.size(); ++i) s += a[i] * v[i];
                if (s > best) best = s;
            }
            return best;
        }
        if (inf_) {
            double best = 0;
            for (double x : v) best = std::max(best, std::abs(x));
            return best;
        }
        double pd = to_double(p_);
        if (p_ == 1) {
            double s = 0;
            for (double x : v) s += std::abs(x);
            return s;
        }
        if (p_ == 2) {
            double s = 0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
        }
        double s = 0;
        for (double x : v) s += std::pow(std::abs(x), pd);
        return std::pow(s, 1.0 / pd);
    }

    /// Open-ball membership gauge(point - center) < r; exact whenever the
    /// gauge is exact or p is an integer.
    bool contains(const QVec& center, const Rational& r, const QVec& point) const {
        if (r <= 0) throw std::invalid_argument("contains: radius must be positive");
        check_point(center.size());
        check_point(point.size());
        QVec d(point.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = point[i] - center[i];
        if (is_polytope_ || inf_ || p_ == 1) {
            Scalar g = gauge(d);
            return g.rat() < r;
        }
        if (is_integer(p_)) {
            // compare sum |d_i|^p < r^p exactly
            unsigned pi = static_cast<unsigned>(p_.get_num().get_ui());
            Rational lhs = 0;
            for (const auto& x : d) {
                Rational a = x < 0 ? Rational(-x) : x;
                Rational pw = 1;
                for (unsigned k = 0; k < pi; ++k) pw *= a;
                lhs += pw;
            }
            Rational rhs = 1;
            for (unsigned k = 0; k < pi; ++k) rhs *= r;
            return lhs < rhs;
        }
        DVec dd(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) dd[i] = to_double(d[i]);
        return gauge(dd) < to_double(r);
    }

    bool contains(const DVec& center, double r, const DVec& point) const {
        DVec d(point.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = point[i] - center[i];
        return gauge(d) < r;
    }

    /// Fan triangulation of a polytope ball: origin-coned simplices with
    /// disjoint interiors whose union is the ball.
    std::vector<Simplex> triangulate() const {
        if (!is_polytope_) throw std::logic_error("triangulate: not a polytope ball");
        std::vector<Simplex> out;
        QVec origin(static_cast<std::size_t>(n_), Rational(0));
        if (n_ == 1) {
            for (const auto& f : facets_)
                out.push_back(Simplex(QMat{origin, vertices_[f.members[0]]}));
            return out;
        }
        for (const auto& f : facets_) {
            QMat sub_pts(f.members.size());
            std::vector<std::size_t> sub_idx(f.members.size());
            for (std::size_t i = 0; i < f.members.size(); ++i) {
                sub_pts[i] = vertices_[f.members[i]];
                sub_idx[i] = f.members[i];
            }
            std::vector<std::vector<std::size_t>> facet_simplices;
            geom::triangulate_rec(sub_idx, geom::affine_coords(sub_pts), facet_simplices);
            for (const auto& s : facet_simplices) {
                QMat verts{origin};
                for (std::size_t i : s) verts.push_back(vertices_[i]);
                Simplex simplex(std::move(verts));
                if (simplex.edge_det() != 0) out.push_back(std::move(simplex));
            }
        }
        return out;
    }

    std::string str() const {
        if (is_polytope_)
            return "polytope(" + std::to_string(vertices_.size()) + " vertices, n=" + std::to_string(n_) + ")";
        if (inf_) return "lp:inf(n=" + std::to_string(n_) + ")";
        return "lp:" + rational_str(p_) + "(n=" + std::to_string(n_) + ")";
    }

    bool operator==(const NormSpec& o) const {
        return n_ == o.n_ && is_polytope_ == o.is_polytope_ && inf_ == o.inf_ &&
               p_ == o.p_ && vertices_ == o.vertices_;
    }

private:
    NormSpec() = default;

    void check_point(std::size_t sz) const {
        if (static_cast<int>(sz) != n_)
            throw std::invalid_argument("NormSpec: point dimension mismatch");
    }

    void validate_polytope() {
        // symmetry about the origin
        std::set<QVec> vset(vertices_.begin(), vertices_.end());
        for (const auto& v : vertices_) {
            QVec neg(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
            if (!vset.count(neg))
                throw std::invalid_argument("polytope vertices are not symmetric about the origin");
        }
        // full-dimensionality
        QMat edges;
        for (std::size_t i = 1; i < vertices_.size(); ++i) {
            QVec e(vertices_[i].size());
            for (std::size_t j = 0; j < e.size(); ++j) e[j] = vertices_[i][j] - vertices_[0][j];
            edges.push_back(std::move(e));
        }
        if (linalg::rref(edges).rank != n_)
            throw std::invalid_argument("polytope is not full-dimensional");

        QVec origin(static_cast<std::size_t>(n_), Rational(0));
        facets_ = geom::enumerate_facets(vertices_, origin);
        for (auto& f : facets_) {
            if (f.offset <= 0)
                throw std::invalid_argument("origin is not strictly inside the polytope");
            QVec a(f.normal.size());
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.normal[i] / f.offset;
            facet_normals_.push_back(a);
            DVec ad(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) ad[i] = to_double(a[i]);
            facet_normals_d_.push_back(std::move(ad));
        }

        axis_symmetric_ = true;
        for (int axis = 0; axis < n_ && axis_symmetric_; ++axis) {
            for (const auto& v : vertices_) {
                QVec w = v;
                w[static_cast<std::size_t>(axis)] = -w[static_cast<std::size_t>(axis)];
                if (!vset.count(w)) {
                    axis_symmetric_ = false;
                    break;
                }
            }
        }
    }

    int n_ = 1;
    bool is_polytope_ = false;
    bool inf_ = false;
    Rational p_ = 2;
    QMat vertices_;
    std::vector<geom::Facet> facets_;
    QMat facet_normals_;   // scaled so <a, x> <= 1
    DMat facet_normals_d_; // double mirror for hot loops
    bool axis_symmetric_ = true;
};

/// The cross-polytope (l^1 ball) in R^n.
inline NormSpec diamond_polytope(int n) {
    QMat verts;
    for (int i = 0; i < n; ++i)
        for (int s : {1, -1}) {
            QVec v(static_cast<std::size_t>(n), Rational(0));
            v[static_cast<std::size_t>(i)] = s;
            verts.push_back(std::move(v));
        }
    return NormSpec::polytope(n, std::move(verts));
}

/// The cube (l^inf ball) in R^n.
inline NormSpec cube_polytope(int n) {
    QMat verts;
    for (int mask = 0; mask < (1 << n); ++mask) {
        QVec v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = (mask >> i & 1) ? 1 : -1;
        verts.push_back(std::move(v));
    }
    return NormSpec::polytope(n, std::move(verts));
}

} // namespace meanharm
