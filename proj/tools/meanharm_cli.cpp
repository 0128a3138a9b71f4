// meanharm: mean-value harmonic function toolkit over norm-induced metrics
// and polynomial-weighted Lebesgue measures.
//
// Subcommands: moments, basis, verify, pizzetti, scan, fp, bose.
// Exit codes: 0 success/pass, 1 verification or equivalence failure,
// 2 usage/config error, 3 ambiguous numerical rank.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "meanharm/json_io.hpp"

using namespace meanharm;

namespace {

struct CommonArgs {
    std::string norm = "lp:2";
    int n = 2;
    std::string weight = "1";
    std::string output;
};

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream out(output_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file: " + output_path);
        out << text;
    }
}

void emit_json(const json& j, const std::string& output_path) {
    emit(j.dump(2) + "\n", output_path);
}

int parsed_degree(int requested, int n) {
    if (requested > 0) return requested;
    return n <= 2 ? 6 : 10; // degree-9 members exist for n = 3 cubes; keep slack
}

std::vector<int> parse_j_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw std::invalid_argument("empty j-list");
    return out;
}

std::pair<int, int> parse_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos)
        throw std::invalid_argument("degree range must look like 2..6: " + text);
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

int cmd_moments(const CommonArgs& common, int max_order) {
    NormSpec spec = parse_norm_arg(common.norm, common.n);
    MomentTable table = MomentTable::build(spec, max_order);
    emit_json(moment_table_to_json(table), common.output);
    return 0;
}

int cmd_basis(const CommonArgs& common, int degree, const std::string& j_list_arg,
              const std::string& dump_matrix) {
    NormSpec spec = parse_norm_arg(common.norm, common.n);
    Polynomial w = Polynomial::parse(common.weight, spec.dim());
    int d = parsed_degree(degree, spec.dim());
    std::vector<int> j_list = j_list_arg.empty() ? default_j_list(d, w) : parse_j_list(j_list_arg);
    int max_j = *std::max_element(j_list.begin(), j_list.end());
    MomentTable table = MomentTable::build(spec, max_j);
    PdeSystemMatrix matrix = assemble_general(w, table, j_list, d);
    for (int j : j_list)
        if (!matrix.has_rows_for_equation(j))
            std::cerr << "warning: equation j=" << j
                      << " contributes no constraints (vanishing moments for this ball)\n";
    if (!dump_matrix.empty()) {
        std::ofstream out(dump_matrix, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open matrix dump file: " + dump_matrix);
        out << matrix.to_csv();
    }
    KernelBasis kb = kernel_basis(matrix);
    emit_json(kernel_basis_to_json(kb), common.output);
    return 0;
}

int cmd_verify(const CommonArgs& common, const std::string& candidate, const std::string& oracle_arg,
               const std::string& probes_file, std::size_t random_probes, std::uint64_t seed,
               std::size_t samples, const std::string& box_arg) {
    NormSpec spec = parse_norm_arg(common.norm, common.n);
    Polynomial u = Polynomial::parse(candidate, spec.dim());
    Polynomial w = Polynomial::parse(common.weight, spec.dim());
    Oracle oracle = oracle_from_name(oracle_arg);

    Box box = Box::cube(spec.dim(), parse_rational(box_arg));
    std::vector<Probe> probes;
    if (!probes_file.empty()) {
        std::ifstream in(probes_file);
        if (!in) throw std::invalid_argument("cannot open probes file: " + probes_file);
        json j;
        in >> j;
        ProbeFile pf = probes_from_json(j);
        probes = pf.probes;
        if (pf.box) box = *pf.box;
    } else {
        probes = random_admissible_probes(spec, box, random_probes, seed);
    }

    McOptions mc;
    mc.samples = samples;
    mc.seed = seed;
    VerificationReport rep = verify_strongly_harmonic(ScalarPoly(u), w, spec, probes, oracle, box, mc);
    json out = report_to_json(rep);
    out["seed"] = seed;
    emit_json(out, common.output);
    return rep.pass ? 0 : 1;
}

int cmd_pizzetti(const CommonArgs& common, const std::string& poly, const std::string& at,
                 const std::string& radius) {
    NormSpec spec = parse_norm_arg(common.norm, common.n);
    Polynomial u = Polynomial::parse(poly, spec.dim());
    Polynomial w = Polynomial::parse(common.weight, spec.dim());
    QVec x;
    {
        std::stringstream ss(at);
        std::string c;
        while (std::getline(ss, c, ',')) x.push_back(parse_rational(c));
    }
    if (static_cast<int>(x.size()) != spec.dim())
        throw std::invalid_argument("--at must list exactly n coordinates");
    Rational r = parse_rational(radius);
    if (r <= 0) throw std::invalid_argument("--r must be positive");
    MomentTable table = MomentTable::build(spec, u.degree() + w.degree());
    Scalar mean = weighted_mean(ScalarPoly(u), w, table, x, r);
    json out;
    out["norm"] = norm_to_json(spec);
    out["weight"] = w.str();
    out["poly"] = u.str();
    json xj = json::array();
    for (const auto& c : x) xj.push_back(rational_str(c));
    out["x"] = xj;
    out["r"] = rational_str(r);
    out["mean"] = scalar_to_json(mean);
    emit_json(out, common.output);
    return 0;
}

int cmd_scan(const CommonArgs& common, const std::string& degrees) {
    NormSpec spec = parse_norm_arg(common.norm, common.n);
    Polynomial w = Polynomial::parse(common.weight, spec.dim());
    auto [from, to] = parse_range(degrees);
    StabilizationScan scan = stabilization_scan(spec, w, from, to);
    std::ostringstream os;
    os << "degree,dimension\n";
    for (const auto& [d, dim] : scan.dims) os << d << "," << dim << "\n";
    os << "# stabilized: " << (scan.stabilized ? "true" : "false") << "\n";
    emit(os.str(), common.output);
    return 0;
}

int cmd_fp(const std::string& grid_arg, const std::string& output) {
    std::vector<double> grid;
    if (grid_arg.empty()) {
        for (int i = 10; i <= 100; ++i) grid.push_back(i / 10.0);
        grid.push_back(20);
        grid.push_back(50);
        grid.push_back(100);
    } else {
        std::stringstream ss(grid_arg);
        std::string c;
        while (std::getline(ss, c, ',')) grid.push_back(std::stod(c));
    }
    FRatioScan scan = f_ratio_scan(grid);
    std::ostringstream os;
    os.precision(17);
    os << "p,f_p,f_prime_closed\n";
    for (const auto& [p, f] : scan.values) os << p << "," << f << "," << f_ratio_derivative(p) << "\n";
    os << "# strictly_increasing: " << (scan.strictly_increasing ? "true" : "false") << "\n";
    if (scan.crossing_third) os << "# crossing_of_one_third: " << *scan.crossing_third << "\n";
    emit(os.str(), output);
    return 0;
}

int cmd_bose(const std::string& weight, int l, int degree, const std::string& output) {
    Polynomial w = Polynomial::parse(weight, 2);
    int d = degree > 0 ? degree : 4;
    std::vector<int> j_list = default_j_list(d, w);
    int l_iter = j_list.back() / 2;
    int l_bose = l >= 0 ? l : l_iter - 1;

    KernelBasis kb_bose = kernel_basis(assemble_bose(w, l_bose, d));
    KernelBasis kb_iter = kernel_basis(assemble_iterated_laplace(w, l_iter, d));
    MomentTable table = MomentTable::build(NormSpec::lp(2, 2), j_list.back());
    KernelBasis kb_gen = kernel_basis(assemble_general(w, table, j_list, d));

    bool equal = same_span(kb_bose, kb_iter) && same_span(kb_iter, kb_gen);
    json out;
    out["weight"] = w.str();
    out["degree"] = d;
    out["l_bose"] = l_bose;
    out["l_iterated"] = l_iter;
    out["j_list_general"] = j_list;
    out["dim_bose"] = kb_bose.dimension;
    out["dim_iterated"] = kb_iter.dimension;
    out["dim_general_l2"] = kb_gen.dimension;
    out["kernels_equal"] = equal;
    json basis = json::array();
    for (std::size_t r = 0; r < kb_bose.vectors.size(); ++r) basis.push_back(basis_string(kb_bose, r));
    out["basis"] = basis;
    emit_json(out, output);
    return equal ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-value harmonic function toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    int max_order = 4;
    int degree = 0;
    std::string j_list_arg, dump_matrix, candidate, oracle_arg = "pizzetti";
    std::string probes_file, box_arg = "2", degrees = "2..6", grid_arg, poly, at, radius = "1";
    std::size_t random_probes = 10, samples = 1000000;
    std::uint64_t seed = 0;
    int bose_l = -1;

    auto add_common = [&](CLI::App* cmd, bool with_weight = true) {
        cmd->add_option("--norm", common.norm, "lp:<p>, lp:inf or polytope:<file.json>");
        cmd->add_option("--n", common.n, "dimension (ignored for polytope files)");
        if (with_weight) cmd->add_option("--weight", common.weight, "weight polynomial");
        cmd->add_option("--output", common.output, "write output to a file instead of stdout");
    };

    CLI::App* moments = app.add_subcommand("moments", "normalized unit-ball moment table (JSON)");
    add_common(moments, false);
    moments->add_option("--max-order", max_order, "highest |alpha| in the table");

    CLI::App* basis = app.add_subcommand("basis", "kernel basis of the mean-value system (JSON)");
    add_common(basis);
    basis->add_option("--degree", degree, "ansatz degree (default 6, or 10 for n >= 3)");
    basis->add_option("--j-list", j_list_arg, "comma-separated equation orders, default 2..D+deg(w)");
    basis->add_option("--dump-matrix", dump_matrix, "write the assembled system as CSV");

    CLI::App* verify = app.add_subcommand("verify", "strong-harmonicity verification (JSON report)");
    add_common(verify);
    verify->add_option("--candidate", candidate, "polynomial to verify")->required();
    verify->add_option("--oracle", oracle_arg, "pizzetti | mc | exact");
    verify->add_option("--probes", probes_file, "probes JSON file");
    verify->add_option("--random-probes", random_probes, "number of seeded random probes");
    verify->add_option("--seed", seed, "RNG seed (default 0, echoed in output)");
    verify->add_option("--samples", samples, "MC samples per probe");
    verify->add_option("--box", box_arg, "domain box half-width (rational)");

    CLI::App* pizzetti = app.add_subcommand("pizzetti", "weighted ball mean of a polynomial (JSON)");
    add_common(pizzetti);
    pizzetti->add_option("--poly", poly, "polynomial to average")->required();
    pizzetti->add_option("--at", at, "comma-separated rational center")->required();
    pizzetti->add_option("--r", radius, "rational radius");

    CLI::App* scan = app.add_subcommand("scan", "kernel dimension vs ansatz degree (CSV)");
    add_common(scan);
    scan->add_option("--degrees", degrees, "range like 2..6");

    CLI::App* fp = app.add_subcommand("fp", "gamma-ratio f(p) table (CSV)");
    fp->add_option("--grid", grid_arg, "comma-separated p values (default 1,1.1,...,10,20,50,100)");
    fp->add_option("--output", common.output, "write output to a file instead of stdout");

    CLI::App* bose = app.add_subcommand("bose", "equivalence of the weighted-euclidean systems (JSON)");
    bose->add_option("--weight", common.weight, "weight polynomial");
    bose->add_option("--l", bose_l, "bose equation count (default from degree)");
    bose->add_option("--degree", degree, "ansatz degree (default 4)");
    bose->add_option("--output", common.output, "write output to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (moments->parsed()) return cmd_moments(common, max_order);
        if (basis->parsed()) return cmd_basis(common, degree, j_list_arg, dump_matrix);
        if (verify->parsed())
            return cmd_verify(common, candidate, oracle_arg, probes_file, random_probes, seed,
                              samples, box_arg);
        if (pizzetti->parsed()) return cmd_pizzetti(common, poly, at, radius);
        if (scan->parsed()) return cmd_scan(common, degrees);
        if (fp->parsed()) return cmd_fp(grid_arg, common.output);
        if (bose->parsed()) return cmd_bose(common.weight, bose_l, degree, common.output);
    } catch (const AmbiguousRankError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
