#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "meanharm/kernel.hpp"
#include "meanharm/meanvalue.hpp"
#include "meanharm/moments.hpp"
#include "meanharm/norms.hpp"

namespace meanharm {

using json = nlohmann::json;

inline json scalar_to_json(const Scalar& s) {
    if (s.is_exact()) return json{{"exact", rational_str(s.rat())}};
    return json{{"approx", s.value()}, {"err", s.abs_error()}};
}

inline json norm_to_json(const NormSpec& spec) {
    json j;
    j["n"] = spec.dim();
    if (spec.is_polytope()) {
        j["kind"] = "polytope";
        json verts = json::array();
        for (const auto& v : spec.vertices()) {
            json row = json::array();
            for (const auto& c : v) row.push_back(rational_str(c));
            verts.push_back(row);
        }
        j["vertices"] = verts;
    } else {
        j["kind"] = "lp";
        j["p"] = spec.is_inf() ? "inf" : rational_str(spec.p());
    }
    return j;
}

/// Accepts {"n":2,"vertices":[["1","0"],...]} with or without a "kind" tag.
inline NormSpec polytope_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("vertices"))
        throw std::invalid_argument("polytope JSON needs \"n\" and \"vertices\"");
    int n = j.at("n").get<int>();
    QMat verts;
    for (const auto& row : j.at("vertices")) {
        QVec v;
        for (const auto& c : row) v.push_back(parse_rational(c.get<std::string>()));
        verts.push_back(std::move(v));
    }
    return NormSpec::polytope(n, std::move(verts));
}

inline NormSpec norm_from_json(const json& j) {
    if (j.value("kind", "polytope") == "polytope") return polytope_from_json(j);
    int n = j.at("n").get<int>();
    std::string p = j.at("p").get<std::string>();
    if (p == "inf") return NormSpec::lp_inf(n);
    return NormSpec::lp(parse_rational(p), n);
}

/// CLI norm syntax: "lp:<p>" with p a decimal/rational or "inf", or
/// "polytope:<file.json>".
inline NormSpec parse_norm_arg(const std::string& arg, int n) {
    if (arg.rfind("lp:", 0) == 0) {
        std::string p = arg.substr(3);
        if (p == "inf" || p == "oo") return NormSpec::lp_inf(n);
        return NormSpec::lp(parse_rational(p), n);
    }
    if (arg.rfind("polytope:", 0) == 0) {
        std::string path = arg.substr(9);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open polytope file: " + path);
        json j;
        in >> j;
        return polytope_from_json(j);
    }
    throw std::invalid_argument("norm must be lp:<p>, lp:inf or polytope:<file>: " + arg);
}

inline json moment_table_to_json(const MomentTable& t) {
    json j;
    j["norm"] = norm_to_json(t.norm());
    j["max_order"] = t.max_order();
    j["volume"] = scalar_to_json(t.volume());
    json entries = json::array();
    for (const auto& [alpha, m] : t.entries()) {
        if (m.is_zero()) continue;
        json e;
        e["alpha"] = alpha;
        e["value"] = scalar_to_json(m);
        entries.push_back(e);
    }
    j["entries"] = entries;
    return j;
}

inline std::string basis_string(const KernelBasis& kb, std::size_t row) {
    if (kb.exact) {
        Polynomial p(static_cast<int>(kb.column_basis[0].size()));
        for (std::size_t c = 0; c < kb.column_basis.size(); ++c)
            if (!kb.vectors[row][c].is_zero()) p.set_coefficient(kb.column_basis[c], kb.vectors[row][c].rat());
        return p.str();
    }
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (std::size_t c = 0; c < kb.column_basis.size(); ++c) {
        double v = kb.vectors[row][c].value();
        if (v == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << v << "*";
        bool any = false;
        for (std::size_t i = 0; i < kb.column_basis[c].size(); ++i) {
            if (kb.column_basis[c][i] == 0) continue;
            if (any) os << "*";
            any = true;
            os << "x" << (i + 1);
            if (kb.column_basis[c][i] > 1) os << "^" << kb.column_basis[c][i];
        }
        if (!any) os << "1";
    }
    return first ? "0" : os.str();
}

inline json kernel_basis_to_json(const KernelBasis& kb) {
    json j;
    j["dimension"] = kb.dimension;
    json basis = json::array();
    for (std::size_t r = 0; r < kb.vectors.size(); ++r) basis.push_back(basis_string(kb, r));
    j["basis"] = basis;
    if (kb.norm) j["norm"] = norm_to_json(*kb.norm);
    j["weight"] = kb.weight.str();
    j["degree"] = kb.degree;
    j["j_list"] = kb.j_list;
    j["exact"] = kb.exact;
    if (!kb.exact) {
        if (std::isfinite(kb.spectral_gap))
            j["spectral_gap"] = kb.spectral_gap;
        else
            j["spectral_gap"] = "inf";
    }
    int n = kb.column_basis.empty() ? 0 : static_cast<int>(kb.column_basis[0].size());
    long isometries = 1;
    for (int i = 1; i <= n; ++i) isometries *= i;
    j["isometry_count"] = (1L << n) * isometries; // 2^n n!, reported metadata only
    return j;
}

inline json probe_result_to_json(const ProbeResult& r) {
    json j;
    json x = json::array();
    for (const auto& c : r.probe.x) x.push_back(rational_str(c));
    j["x"] = x;
    j["r"] = rational_str(r.probe.r);
    j["claimed"] = scalar_to_json(r.claimed);
    j["measured"] = scalar_to_json(r.measured);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

inline json report_to_json(const VerificationReport& rep) {
    json j;
    j["candidate"] = rep.candidate;
    j["weight"] = rep.weight;
    j["norm"] = rep.norm;
    j["oracle"] = rep.oracle;
    j["pass"] = rep.pass;
    json probes = json::array();
    for (const auto& p : rep.probes) probes.push_back(probe_result_to_json(p));
    j["probes"] = probes;
    return j;
}

struct ProbeFile {
    std::vector<Probe> probes;
    std::optional<Box> box;
};

inline ProbeFile probes_from_json(const json& j) {
    ProbeFile out;
    for (const auto& pj : j.at("probes")) {
        Probe p;
        for (const auto& c : pj.at("x")) p.x.push_back(parse_rational(c.get<std::string>()));
        p.r = parse_rational(pj.at("r").get<std::string>());
        out.probes.push_back(std::move(p));
    }
    if (j.contains("box")) {
        Box b;
        for (const auto& c : j.at("box").at("lo")) b.lo.push_back(parse_rational(c.get<std::string>()));
        for (const auto& c : j.at("box").at("hi")) b.hi.push_back(parse_rational(c.get<std::string>()));
        out.box = b;
    }
    return out;
}

/// Seeded admissible rational probes inside the box (denominator-8 grid).
inline std::vector<Probe> random_admissible_probes(const NormSpec& spec, const Box& box,
                                                   std::size_t count, std::uint64_t seed) {
    std::vector<Probe> out;
    Rng rng = Rng::substream(seed, 0x9e0b5);
    int n = spec.dim();
    std::size_t guard = 0;
    while (out.size() < count) {
        if (++guard > 100000) throw std::runtime_error("cannot find admissible probes in the box");
        Probe p;
        p.x.resize(static_cast<std::size_t>(n));
        for (auto& c : p.x) c = make_ratio(static_cast<long>(rng.next_below(17)) - 8, 8);
        p.r = make_ratio(1 + static_cast<long>(rng.next_below(4)), 8);
        if (box.admissible(spec, p.x, p.r)) out.push_back(std::move(p));
    }
    return out;
}

} // namespace meanharm
