#include "stnet/bargmann.hpp"
#include "stnet/graph.hpp"
#include "stnet/recoupling.hpp"
#include "stnet/semiclassical.hpp"
#include "stnet/st_basis.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stnet;
using nlohmann::json;

namespace {

struct Output {
    std::string format = "text";
    bool as_float = false;

    std::string num(const BigRational& q) const {
        if (!as_float) return to_string(q);
        return fmt(q.get_d());
    }
    std::string num(const Surd& s) const { return as_float ? fmt(s.to_double()) : s.to_string(); }
    static std::string fmt(double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
    bool json() const { return format == "json"; }
    bool csv() const { return format == "csv"; }
};

Spins4 spins4(const std::vector<std::string>& s) {
    if (s.size() != 4) throw std::invalid_argument("expected four spins, got " + std::to_string(s.size()));
    Spins4 j;
    for (int i = 0; i < 4; ++i) j[i] = parse_spin(s[i]);
    return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
    return out;
}

std::array<TwiceSpin, 10> edge_spins_arg(const std::vector<std::string>& edges, bool all_half) {
    std::array<TwiceSpin, 10> e{};
    if (all_half) {
        if (!edges.empty()) throw std::invalid_argument("--all-half and --edges are exclusive");
        e.fill(1);
        return e;
    }
    if (edges.size() != 10) throw std::invalid_argument("--edges needs ten spins in the order 01 02 03 04 12 13 14 23 24 34");
    for (int i = 0; i < 10; ++i) e[i] = parse_spin(edges[i]);
    return e;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
}

void print_matrix(const Output& out, const Spins4& j, const std::vector<STPair>& labels, const RationalMatrix& m,
                  const std::string& schema) {
    if (out.json()) {
        json rows = json::array(), lab = json::array(), spins = json::array();
        for (auto& r : m) {
            json row = json::array();
            for (auto& x : r) row.push_back(out.num(x));
            rows.push_back(row);
        }
        for (auto [S, T] : labels) lab.push_back({format_spin(S), format_spin(T)});
        for (auto x : j) spins.push_back(format_spin(x));
        std::cout << json{{"schema", schema}, {"spins", spins}, {"labels", lab}, {"matrix", rows}}.dump() << "\n";
        return;
    }
    if (out.csv()) {
        std::cout << "label";
        for (auto [S, T] : labels) std::cout << ",\"" << format_spin(S) << "," << format_spin(T) << "\"";
        std::cout << "\n";
        for (std::size_t r = 0; r < m.size(); ++r) {
            std::cout << "\"" << format_spin(labels[r].first) << "," << format_spin(labels[r].second) << "\"";
            for (auto& x : m[r]) std::cout << "," << out.num(x);
            std::cout << "\n";
        }
        return;
    }
    std::cout << "[";
    for (std::size_t r = 0; r < m.size(); ++r) {
        std::cout << (r ? ",[" : "[");
        for (std::size_t c = 0; c < m[r].size(); ++c) std::cout << (c ? "," : "") << out.num(m[r][c]);
        std::cout << "]";
    }
    std::cout << "]\n";
}

void print_scalar(const Output& out, const std::string& key, const std::string& value) {
    if (out.json())
        std::cout << json{{key, value}}.dump() << "\n";
    else
        std::cout << value << "\n";
}

SimplexLabels st_labels(const std::array<TwiceSpin, 10>& edge, const std::string& st) {
    auto parts = split(st, ',');
    if (parts.size() != 5) throw std::invalid_argument("--st needs five S:T pairs separated by ','");
    SimplexLabels l;
    l.edge = edge;
    for (int a = 0; a < 5; ++a) {
        auto p = split(parts[a], ':');
        if (p.size() != 2) throw std::invalid_argument("--st entry " + std::to_string(a) + " must read S:T");
        l.st[a] = {parse_spin(p[0]), parse_spin(p[1])};
    }
    l.validate();
    return l;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-network evaluation in the |S,T> intertwiner basis"};
    app.require_subcommand(1);
    Output out;
    std::uint64_t seed = 1;
    int threads = 1;
    double budget = 0;
    app.add_option("--format", out.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_flag("--float", out.as_float, "Print exact values as decimals with 17 significant digits");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--threads", threads, "Worker threads for library calls")->check(CLI::PositiveNumber);
    app.add_option("--budget", budget, "Time budget in seconds (0 for none)")->check(CLI::NonNegativeNumber);

    auto* symbol = app.add_subcommand("symbol", "Exact 6j, 15j or 20j symbols");
    std::string kind;
    std::vector<std::string> six, edges;
    std::string st, S_list;
    bool all_half = false;
    symbol->add_option("kind", kind)->required()->check(CLI::IsMember({"6j", "15j", "20j"}));
    symbol->add_option("spins", six, "Six spins of {a b c; d e f}");
    symbol->add_option("--edges", edges, "Ten edge spins of the 4-simplex")->expected(10);
    symbol->add_flag("--all-half", all_half, "All ten edge spins one half");
    symbol->add_option("--st", st, "Five S:T pairs separated by ',' (20j)");
    symbol->add_option("--s", S_list, "Five S values separated by ',' (15j)");

    auto* gram = app.add_subcommand("gram", "Gram matrix of the |S,T> basis");
    std::vector<std::string> gram_spins;
    gram->add_option("spins", gram_spins)->required()->expected(4);

    auto* projector = app.add_subcommand("projector", "Orthogonal projector onto the kernel of the Plucker relations");
    std::vector<std::string> proj_spins;
    projector->add_option("spins", proj_spins)->required()->expected(4);

    auto* graph = app.add_subcommand("graph", "Cycles, loops and amplitudes of a graph file");
    std::string graph_mode, graph_file, method = "loops";
    graph->add_option("mode", graph_mode)->required()->check(CLI::IsMember({"cycles", "loops", "amplitude"}));
    graph->add_option("file", graph_file)->required();
    graph->add_option("--method", method, "Amplitude route")->check(CLI::IsMember({"loops", "cycles", "oracle"}));

    auto* geometry = app.add_subcommand("geometry", "Closure solves and geometric checks");
    std::string geo_mode, geo_file, k_list;
    geometry->add_option("mode", geo_mode)->required()->check(CLI::IsMember({"solve", "check"}));
    geometry->add_option("file", geo_file, "Geometry JSON (check)");
    geometry->add_option("--k", k_list, "k01,k02,k03,k12,k13,k23 (solve)");

    auto* scan = app.add_subcommand("scan", "Asymptotic trend table");
    std::string lambda_range = "1..4", base_name = "all-half";
    scan->add_option("--lambda", lambda_range, "Range a..b of scaling factors");
    scan->add_option("--base", base_name)->check(CLI::IsMember({"all-half"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*symbol) {
            if (kind == "6j") {
                if (six.size() != 6) throw std::invalid_argument("6j needs six spins");
                std::array<TwiceSpin, 6> s;
                for (int i = 0; i < 6; ++i) s[i] = parse_spin(six[i]);
                require_6j_admissible(s[0], s[1], s[2], s[3], s[4], s[5]);
                print_scalar(out, "6j", out.num(wigner_6j(s[0], s[1], s[2], s[3], s[4], s[5])));
            } else if (kind == "15j") {
                auto e = edge_spins_arg(edges, all_half);
                auto parts = split(S_list, ',');
                if (parts.size() != 5) throw std::invalid_argument("--s needs five S values separated by ','");
                std::array<TwiceSpin, 5> S;
                for (int a = 0; a < 5; ++a) S[a] = parse_spin(parts[a]);
                print_scalar(out, "15j", out.num(fifteen_j(e, S)));
            } else {
                SimplexLabels l = st_labels(edge_spins_arg(edges, all_half), st);
                print_scalar(out, "20j", out.num(twenty_j(l)));
            }
        } else if (*gram) {
            Spins4 j = spins4(gram_spins);
            GramMatrix g = gram_matrix(j);
            print_matrix(out, j, g.labels, g.entries, "stnet.gram/1");
        } else if (*projector) {
            Spins4 j = spins4(proj_spins);
            print_matrix(out, j, gram_matrix(j).labels, projector_matrix(j), "stnet.projector/1");
        } else if (*graph) {
            std::vector<KMatrix> corners;
            AmplitudeGraph g = graph_from_json(read_json(graph_file), graph_mode == "amplitude" ? &corners : nullptr);
            if (graph_mode == "cycles")
                print_scalar(out, "cycles", std::to_string(enumerate_simple_cycles(g).size()));
            else if (graph_mode == "loops")
                print_scalar(out, "loops", std::to_string(enumerate_simple_loops(g).size()));
            else {
                if (corners.empty()) throw std::invalid_argument(graph_file + ": corners: required for amplitude");
                BigRational v = method == "loops"    ? amplitude_loops(g, corners)
                                : method == "cycles" ? racah_cycles(g, corners)
                                                     : contract_graph_oracle(g, corners);
                print_scalar(out, "amplitude", out.num(v));
            }
        } else if (*geometry) {
            if (geo_mode == "solve") {
                auto parts = split(k_list, ',');
                if (parts.size() != 6) throw std::invalid_argument("--k needs six values k01,k02,k03,k12,k13,k23");
                Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
                int p = 0;
                for (int i = 0; i < 4; ++i)
                    for (int j = i + 1; j < 4; ++j, ++p) {
                        std::size_t used = 0;
                        double v = std::stod(parts[p], &used);
                        if (used != parts[p].size()) throw std::invalid_argument("--k entry " + std::to_string(p) + " is not a number");
                        k(i, j) = k(j, i) = v;
                    }
                ClosureOptions opt;
                opt.seed = seed;
                ClosureSolution s = solve_closure(k, opt);
                json j = spinors_to_json(s.z);
                j["residual"] = s.residual;
                j["geometric"] = s.geometric;
                j["restarts"] = s.restarts_used;
                if (s.geometric) j["tetrahedron"] = tetrahedron_to_json(framed_tet_from_spinors(s.z));
                std::cout << j.dump(2) << "\n";
                if (!s.geometric) return 3;
            } else {
                if (geo_file.empty()) throw std::invalid_argument("geometry check needs a JSON file");
                json in = read_json(geo_file);
                std::string schema = in.value("schema", "");
                json report;
                if (schema == "stnet.tetrahedron/1" || schema == "stnet.spinors/1") {
                    SpinorQuad z = schema == "stnet.spinors/1" ? spinors_from_json(in)
                                                                : spinors_from_framed_tet(tetrahedron_from_json(in));
                    ThreeTermResiduals r = three_term_residuals(z);
                    report = {{"closure", closure_residual(z)},
                              {"spherical", r.spherical},
                              {"three_term_first", r.first},
                              {"three_term_second", r.second}};
                } else if (schema == "stnet.simplex/1") {
                    TwistedSimplexGeometry g = simplex_from_json(in);
                    json faces = json::array();
                    for (auto& f : shape_matching_check(g))
                        faces.push_back({{"a", f.a}, {"b", f.b}, {"residual", f.residual}, {"matched", f.matched}});
                    TwistedAction act = twisted_action(g);
                    report = {{"gluing", gluing_residual(g)},
                              {"closure", simplex_closure_residual(g)},
                              {"xi_spread", xi_spread(g)},
                              {"dihedral_4d", dihedral_4d_check(g).max_residual},
                              {"shape_matching", faces},
                              {"action", act.split_form},
                              {"action_corner_form", act.corner_form}};
                } else {
                    throw std::invalid_argument(geo_file + ": schema: expected stnet.tetrahedron/1, stnet.spinors/1 or stnet.simplex/1");
                }
                std::cout << report.dump(2) << "\n";
            }
        } else if (*scan) {
            auto ends = split(lambda_range, '.');
            if (ends.size() != 3 || !ends[1].empty()) throw std::invalid_argument("--lambda must read a..b");
            int lo = std::stoi(ends[0]), hi = std::stoi(ends[2]);
            if (lo < 1 || hi < lo) throw std::invalid_argument("--lambda needs 1 <= a <= b");
            std::vector<int> lambdas;
            for (int l = lo; l <= hi; ++l) lambdas.push_back(l);
            ScanResult r = asymptotic_scan(all_half_base(), lambdas, budget, threads);
            auto yes = [](bool b) { return b ? "yes" : "no"; };
            if (out.json()) {
                json rows = json::array();
                for (auto& w : r.rows)
                    rows.push_back({{"lambda", w.lambda},
                                    {"twenty_j", out.num(w.twenty_j)},
                                    {"fifteen_j", out.num(w.fifteen_j)},
                                    {"scale", out.num(w.scale)},
                                    {"ratio", w.ratio},
                                    {"gram_offdiag", w.gram_offdiag},
                                    {"stirling", w.stirling}});
                std::cout << json{{"schema", "stnet.scan/1"},
                                  {"rows", rows},
                                  {"skipped", r.skipped},
                                  {"gram_decreasing", r.verdicts.gram_decreasing},
                                  {"ratio_to_one", r.verdicts.ratio_to_one},
                                  {"stirling_decreasing", r.verdicts.stirling_decreasing}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << "lambda,twenty_j,fifteen_j,scale,ratio,gram_offdiag,stirling\n";
                for (auto& w : r.rows)
                    std::cout << w.lambda << "," << out.num(w.twenty_j) << "," << out.num(w.fifteen_j) << ","
                              << out.num(w.scale) << "," << Output::fmt(w.ratio) << "," << Output::fmt(w.gram_offdiag)
                              << "," << Output::fmt(w.stirling) << "\n";
                if (!out.csv()) {
                    if (r.skipped) std::cout << "# skipped " << r.skipped << " rows (budget)\n";
                    std::cout << "# gram off-diagonal strictly decreasing: " << yes(r.verdicts.gram_decreasing) << "\n"
                              << "# ratio approaches 1 monotonically: " << yes(r.verdicts.ratio_to_one) << "\n"
                              << "# Stirling log-ratio strictly decreasing: " << yes(r.verdicts.stirling_decreasing)
                              << "\n";
                }
            }
        }
    } catch (const AdmissibilityError& e) {
        std::cerr << "inadmissible: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "geometry: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
