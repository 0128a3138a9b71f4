#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "meanharm/rational.hpp"

namespace meanharm {

// Multi-index alpha in N^n: exponent tuple driving differentiation and
// moment lookup. The dimension is the runtime length of the tuple.
using MultiIndex = std::vector<int>;

inline int order(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

inline bool all_even(const MultiIndex& a) {
    return std::all_of(a.begin(), a.end(), [](int e) { return e % 2 == 0; });
}

inline MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw std::invalid_argument("multi-index dimension mismatch");
    MultiIndex c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

/// Multinomial coefficient |alpha|! / (alpha_1! ... alpha_n!), always a positive integer.
inline BigInt multinomial(const MultiIndex& a) {
    BigInt m = factorial(static_cast<unsigned>(order(a)));
    for (int e : a) m /= factorial(static_cast<unsigned>(e));
    return m;
}

// Graded lexicographic comparison: lower total degree first; within a
// degree, lexicographically larger exponent tuples first, so that for
// n = 2 the listing order is 1; x, y; x^2, xy, y^2; x^3, x^2 y, ...
struct GrlexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        int da = order(a), db = order(b);
        if (da != db) return da < db;
        return a > b; // lexicographically larger tuple comes first
    }
};

inline void enumerate_exact_degree(int n, int degree, std::vector<MultiIndex>& out) {
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    // recursive lexicographic-descending walk
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    if (n == 0) return;
    rec(rec, 0, degree);
}

/// All multi-indices with |alpha| = degree, in graded-lex listing order.
inline std::vector<MultiIndex> indices_of_degree(int n, int degree) {
    std::vector<MultiIndex> out;
    enumerate_exact_degree(n, degree, out);
    return out;
}

/// All multi-indices with |alpha| <= degree, graded-lex listing order.
inline std::vector<MultiIndex> indices_up_to_degree(int n, int degree) {
    std::vector<MultiIndex> out;
    for (int d = 0; d <= degree; ++d) enumerate_exact_degree(n, d, out);
    return out;
}

} // namespace meanharm
