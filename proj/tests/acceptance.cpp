// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance                     exit 1 if any criterion fails
//   acceptance --known-red 7,11    exit 1 only if a criterion outside the list fails

#include "oracle_helpers.hpp"
#include "stnet/bargmann.hpp"
#include "stnet/free_cycles.hpp"
#include "stnet/graph.hpp"
#include "stnet/recoupling.hpp"
#include "stnet/semiclassical.hpp"
#include "stnet/st_basis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace stnet;
using testing_support::all_spins;
using testing_support::as_poly;

namespace {

// Pinned tolerances.
constexpr double kClosureResidual = 1e-10;
constexpr double kClosureK = 1e-8;
constexpr double kThreeTerm = 1e-9;
constexpr double kGauge = 1e-10;
constexpr double kForms = 1e-9;
constexpr double kXiSpread = 1e-9;
constexpr double kDihedral = 1e-8;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Tally {
    std::size_t checks = 0, failures = 0;
    std::string first;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && failures++ == 0) first = what;
    }
    Outcome outcome(const std::string& summary) const {
        std::ostringstream os;
        os << summary << "; " << checks << " checks";
        if (failures) os << ", " << failures << " failed (first: " << first << ")";
        return {failures == 0, os.str()};
    }
};

std::string label(const Spins4& j) {
    std::string s = "(";
    for (int i = 0; i < 4; ++i) s += (i ? "," : "") + format_spin(j[i]);
    return s + ")";
}

// Wigner 3j from the Racah single sum, as an exact surd.
Surd three_j(int j1, int j2, int j3, int m1, int m2, int m3) {
    if (m1 + m2 + m3 != 0) return Surd();
    for (auto [j, m] : {std::pair{j1, m1}, {j2, m2}, {j3, m3}})
        if (std::abs(m) > j || (j + m) % 2) return Surd();
    if ((j1 + j2 + j3) % 2 || j3 > j1 + j2 || j1 > j2 + j3 || j2 > j1 + j3) return Surd();
    auto f = [](int twice) { return BigRational(factorial(twice / 2)); };
    BigRational sq = f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3) / f(j1 + j2 + j3 + 2) * f(j1 + m1) *
                     f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3);
    BigRational sum = 0;
    for (int k = 0; k <= j1 + j2 + j3; k += 2) {
        int d[6] = {k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2};
        bool ok = true;
        for (int x : d) ok &= x >= 0;
        if (!ok) continue;
        BigRational den = 1;
        for (int x : d) den *= f(x);
        sum += BigRational(parity_sign(k / 2)) / den;
    }
    if (sum == 0) return Surd();
    int phase = parity_sign((j1 - j2 - m3) / 2);
    return Surd(sum * phase) * Surd::signed_sqrt(1, sq);
}

// {j1 j2 j3; j4 j5 j6} as a sum over magnetic numbers of four 3j symbols.
Surd six_j_oracle(int j1, int j2, int j3, int j4, int j5, int j6) {
    std::map<BigInt, BigRational> by_radicand;
    for (int m1 = -j1; m1 <= j1; m1 += 2)
        for (int m2 = -j2; m2 <= j2; m2 += 2) {
            int m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            for (int m4 = -j4; m4 <= j4; m4 += 2)
                for (int m5 = -j5; m5 <= j5; m5 += 2) {
                    int m6 = m5 - m1;
                    if (std::abs(m6) > j6 || (j6 + m6) % 2) continue;
                    Surd a = three_j(j1, j2, j3, -m1, -m2, -m3);
                    Surd b = three_j(j1, j5, j6, m1, -m5, m6);
                    Surd c = three_j(j4, j2, j6, m4, m2, -m6);
                    Surd d = three_j(j4, j5, j3, -m4, m5, m3);
                    Surd t = a * b * c * d;
                    if (t.is_zero()) continue;
                    int phase = parity_sign((j1 - m1 + j2 - m2 + j3 - m3 + j4 - m4 + j5 - m5 + j6 - m6) / 2);
                    by_radicand[t.radicand()] += t.coefficient() * phase;
                }
        }
    std::erase_if(by_radicand, [](auto& kv) { return kv.second == 0; });
    if (by_radicand.empty()) return Surd();
    if (by_radicand.size() > 1) throw std::logic_error("6j oracle produced mixed radicands");
    return Surd(by_radicand.begin()->second, by_radicand.begin()->first);
}

SimplexLabels random_simplex_labels(std::mt19937_64& rng, int max_twice) {
    std::uniform_int_distribution<int> spin(0, max_twice);
    for (;;) {
        std::array<TwiceSpin, 10> e;
        for (auto& x : e) x = spin(rng);
        std::vector<SimplexLabels> all;
        try {
            all = simplex_assignments(e);
        } catch (const AdmissibilityError&) {
            continue;
        }
        if (all.empty()) continue;
        return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    }
}

std::vector<std::vector<KMatrix>> trivalent_labellings(const AmplitudeGraph& g, int max_twice) {
    std::vector<std::vector<KMatrix>> out;
    std::vector<int> spins(g.edge_count());
    std::function<void(int)> rec = [&](int e) {
        if (e == g.edge_count()) {
            std::vector<KMatrix> ks;
            for (int v = 0; v < g.vertex_count(); ++v) {
                int a = spins[g.edge_at(v, 0)], b = spins[g.edge_at(v, 1)], c = spins[g.edge_at(v, 2)];
                if ((a + b + c) % 2 || c > a + b || a > b + c || b > a + c) return;
                KMatrix k(3);
                k.set(0, 1, (a + b - c) / 2);
                k.set(0, 2, (a - b + c) / 2);
                k.set(1, 2, (-a + b + c) / 2);
                ks.push_back(k);
            }
            out.push_back(ks);
            return;
        }
        for (int s = 0; s <= max_twice; ++s) {
            spins[e] = s;
            rec(e + 1);
        }
    };
    rec(0);
    return out;
}

Outcome gram_exactness() {
    Tally t;
    Spins4 half{1, 1, 1, 1};
    GramMatrix g = gram_matrix(half);
    t.expect(g.labels == std::vector<STPair>{{0, 2}, {2, 0}, {2, 2}}, "label order");
    t.expect(g.entries == RationalMatrix{{4, 2, -2}, {2, 4, 2}, {-2, 2, 4}}, "matrix entries");
    t.expect(exact_rank(g.entries) == 2, "rank");
    for (std::size_t a = 0; a < g.labels.size(); ++a)
        for (std::size_t b = 0; b < g.labels.size(); ++b) {
            auto pa = st_state_poly({half, g.labels[a].first, g.labels[a].second});
            auto pb = st_state_poly({half, g.labels[b].first, g.labels[b].second});
            t.expect(bargmann_inner(pa, pb) == g.entries[a][b], "oracle entry");
        }
    return t.outcome("Gram (1/2,1/2,1/2,1/2) = [[4,2,-2],[2,4,2],[-2,2,4]], rank 2");
}

Outcome projector_idempotence() {
    Tally t;
    for (auto& j : all_spins(2)) {
        RationalMatrix p = projector_matrix(j);
        t.expect(matmul(p, p) == p, "P^2 = P at " + label(j));
    }
    return t.outcome("P^2 = P for all j_i <= 1");
}

Outcome channel_sums() {
    Tally t;
    for (auto& j : all_spins(3)) {
        GramMatrix g = gram_matrix(j);
        int twiceJ = j[0] + j[1] + j[2] + j[3];
        std::vector<STVector> S(twiceJ + 1), T(twiceJ + 1), U(twiceJ + 1);
        for (int x = 0; x <= twiceJ; ++x) {
            S[x] = channel_vector(j, Channel::S, x);
            T[x] = channel_vector(j, Channel::T, x);
            U[x] = channel_vector(j, Channel::U, x);
        }
        for (int x = 0; x <= twiceJ; ++x)
            for (int y = 0; y <= twiceJ; ++y) {
                std::string at = label(j) + " " + std::to_string(x) + "," + std::to_string(y);
                BigRational ss = gram_overlap(g, S[x], S[y]);
                BigRational delta = x == y ? triangle_delta_sq(j[0], j[1], x) * triangle_delta_sq(j[2], j[3], x) /
                                                 BigRational(x + 1)
                                           : BigRational(0);
                t.expect(ss == delta, "<S|S'> at " + at);
                t.expect(ss == overlap_same_channel(j, Channel::S, x, y), "SS' at " + at);
                t.expect(gram_overlap(g, T[x], T[y]) == overlap_same_channel(j, Channel::T, x, y), "TT' at " + at);
                t.expect(gram_overlap(g, U[x], U[y]) == overlap_same_channel(j, Channel::U, x, y), "UU' at " + at);
                BigRational st = gram_overlap(g, S[x], T[y]);
                t.expect(st == overlap_s_t(j, x, y), "ST at " + at);
                t.expect(gram_overlap(g, S[x], U[y]) == overlap_s_u(j, x, y), "SU at " + at);
                t.expect(gram_overlap(g, T[x], U[y]) == overlap_t_u(j, x, y), "TU at " + at);
                Surd six = wigner_6j(j[0], j[1], x, j[3], j[2], y);
                t.expect(six == six_j_oracle(j[0], j[1], x, j[3], j[2], y), "6j oracle at " + at);
                Surd closed = overlap_s_t_surd(j, x, y);
                t.expect(closed.is_rational() && closed.coefficient() == st, "6j overlap at " + at);
            }
        for (auto [s, tt] : g.labels) {
            STVector e{{{s, tt}, 1}};
            for (int x = 0; x <= twiceJ; ++x) {
                t.expect(gram_overlap(g, S[x], e) == overlap_s_st(j, x, s, tt), "S|S,T> at " + label(j));
                t.expect(gram_overlap(g, T[x], e) == overlap_t_st(j, x, s, tt), "T|S,T> at " + label(j));
            }
        }
    }
    return t.outcome("S/T/U/|S,T> overlaps by channel sums = closed forms, 6j = 3j-sum oracle, j_i <= 3/2");
}

Outcome r_identities() {
    Tally t;
    for (int N = 0; N <= 4; ++N)
        for (int s = 0; s <= 6; ++s)
            for (int tt = 0; tt <= 6; ++tt) {
                Spins4 j{6, 6 + s % 2, 6 + tt % 2, 6 + (s + tt) % 2};
                int sign_st = parity_sign(raw_k(j, s, tt).k23);
                for (int S = s; S <= s + 2 * N; S += 2) {
                    BigInt sum = 0;
                    for (int T = tt; T <= tt + 2 * N; T += 2) sum += r_coeff(s, tt, S, T, N);
                    t.expect(sum == (S == s ? 1 : 0), "sum_T R");
                }
                for (int T = tt; T <= tt + 2 * N; T += 2) {
                    BigInt sum = 0;
                    for (int S = s; S <= s + 2 * N; S += 2) sum += parity_sign(raw_k(j, S, T).k23) * r_coeff(s, tt, S, T, N);
                    t.expect(sum == (T == tt ? sign_st : 0), "signed sum_S R");
                }
            }
    return t.outcome("sum_T R = delta and signed sum_S R for N <= 4, offsets <= 6");
}

Outcome plucker_algebra() {
    Tally t;
    auto annihilated = [](const Spins4& j, const GramMatrix& g, const STVector& v) {
        for (auto& lab : g.labels) {
            BigRational s = 0;
            for (auto& [st, c] : v)
                if (c != 0) s += c * scalar_product_st({j, lab.first, lab.second}, {j, st.first, st.second});
            if (s != 0) return false;
        }
        return true;
    };
    int fundamental = 0, power = 0;
    for (auto& j : all_spins(3)) {
        GramMatrix g = gram_matrix(j);
        for (auto [S, T] : admissible_st_range(j)) {
            STVector v = fundamental_relation_vector({j, S, T});
            bool fits = true;
            for (auto& [st, c] : v)
                if (c != 0 && !is_admissible({j, st.first, st.second})) fits = false;
            if (!fits) continue;
            t.expect(as_poly(j, v).is_zero(), "fundamental polynomial at " + label(j));
            t.expect(annihilated(j, g, v), "fundamental Gram at " + label(j));
            ++fundamental;
        }
        for (int N = 1; N <= 2; ++N) {
            Spins4 js = j;
            bool ok = true;
            for (auto& x : js) ok &= (x -= N) >= 0;
            if (!ok) continue;
            for (auto [s, tt] : admissible_st_range(js)) {
                STVector v = plucker_null_vector(j, s, tt, N);
                t.expect(as_poly(j, v).is_zero(), "power polynomial at " + label(j));
                t.expect(annihilated(j, g, v), "power Gram at " + label(j));
                ++power;
            }
        }
    }
    return t.outcome(std::to_string(fundamental) + " fundamental and " + std::to_string(power) +
                     " power relations vanish, j_i <= 3/2");
}

Outcome cycle_counts() {
    Tally t;
    t.expect(enumerate_simple_cycles(AmplitudeGraph::complete(4)).size() == 7, "K4 cycles");
    t.expect(enumerate_simple_cycles(AmplitudeGraph::complete(5)).size() == 37, "K5 cycles");
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        SimplexLabels l = random_simplex_labels(rng, 4);
        auto corners = l.corners();
        std::array<int, 17> p;
        for (auto& x : p) x = std::uniform_int_distribution<int>(0, 3)(rng);
        auto a = free_cycle_m_values(corners, p);
        t.expect(a.M.size() == 37, "37 M values");
        t.expect(corners_from_m(a.M) == corners, "corner reconstruction");
    }
    return t.outcome("K4 -> 7, K5 -> 37, 1000 corner reconstructions from M");
}

Outcome three_way_twenty_j() {
    Tally t;
    AmplitudeGraph k5 = AmplitudeGraph::complete(5);
    SimplexLabels half;
    half.edge.fill(1);
    std::map<std::array<TwiceSpin, 5>, BigRational> sums;
    int racah_differs = 0, oracle_differs = 0, count = 0;
    for (auto& l : simplex_assignments(half.edge)) {
        BigRational a = twenty_j(l), b = twenty_j_racah(l), c = contract_graph_oracle(k5, l.corners());
        racah_differs += a != b;
        oracle_differs += a != c;
        t.expect(a == c, "twenty_j = oracle");
        t.expect(b == c, "twenty_j_racah = oracle");
        std::array<TwiceSpin, 5> S;
        for (int v = 0; v < 5; ++v) S[v] = l.st[v].first;
        sums[S] += a;
        ++count;
    }
    for (auto& [S, v] : sums) t.expect(v == fifteen_j(half.edge, S), "sum_T = fifteen_j");
    return t.outcome(std::to_string(count) + " assignments; twenty_j vs oracle differ in " +
                     std::to_string(oracle_differs) + ", twenty_j_racah vs twenty_j differ in " +
                     std::to_string(racah_differs));
}

Outcome tetrahedral_consistency() {
    Tally t;
    auto k4 = AmplitudeGraph::complete(4);
    RacahEvaluator cyc(k4, enumerate_simple_cycles(k4), Disjointness::Vertices);
    RacahEvaluator lp(k4, enumerate_simple_loops(k4), Disjointness::Edges);
    auto all = trivalent_labellings(k4, 2);
    for (auto& ks : all) {
        BigRational o = contract_graph_oracle(k4, ks);
        t.expect(lp(ks) == o, "amplitude_loops = oracle");
        t.expect(cyc(ks) == o, "racah_cycles = oracle");
    }
    return t.outcome(std::to_string(all.size()) + " tetrahedral labellings with spins <= 1");
}

Outcome semiclassical_closure() {
    Tally t;
    std::mt19937_64 rng(7);
    double worst_res = 0, worst_k = 0, worst_three = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix4d k = k_from_spinors(spinors_from_framed_tet(random_tetrahedron(rng)));
        ClosureSolution s = solve_closure(k);
        double dk = (k_from_spinors(s.z) - k).cwiseAbs().maxCoeff();
        worst_res = std::max(worst_res, s.residual);
        worst_k = std::max(worst_k, dk);
        t.expect(s.residual < kClosureResidual, "closure residual");
        t.expect(dk < kClosureK, "k reconstruction");
    }
    for (int trial = 0; trial < 100; ++trial) {
        ThreeTermResiduals r = three_term_residuals(spinors_from_framed_tet(random_tetrahedron(rng)));
        worst_three = std::max({worst_three, r.spherical, r.first, r.second});
        t.expect(r.spherical < kThreeTerm && r.first < kThreeTerm && r.second < kThreeTerm, "three-term residuals");
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "max residual %.2e, max |dk| %.2e, max three-term %.2e", worst_res, worst_k,
                  worst_three);
    return t.outcome(buf);
}

Outcome twisted_action_checks() {
    Tally t;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-3, 3);
    double worst_gauge = 0, worst_forms = 0, worst_xi = 0, worst_dihedral = 0;
    for (int trial = 0; trial < 20; ++trial) {
        TwistedSimplexGeometry g = simplex_from_embedding(random_simplex_vertices(rng), rng);
        SimplexAngles angles = simplex_angles(g);
        TwistedAction before = twisted_action(g, angles);
        double theta[5][5] = {};
        for (int a = 0; a < 5; ++a)
            for (int i = a + 1; i < 5; ++i) {
                theta[a][i] = u(rng);
                theta[i][a] = -theta[a][i];
            }
        worst_xi = std::max(worst_xi, xi_spread(g));
        worst_dihedral = std::max(worst_dihedral, dihedral_4d_check(g).max_residual);
        gauge_transform(g, angles, theta);
        TwistedAction after = twisted_action(g, angles);
        worst_gauge = std::max(worst_gauge, std::abs(after.split_form - before.split_form));
        worst_forms = std::max({worst_forms, std::abs(before.split_form - before.corner_form),
                                std::abs(after.split_form - after.corner_form)});
    }
    t.expect(worst_gauge < kGauge, "gauge invariance");
    t.expect(worst_forms < kForms, "theorem form = corner form");
    t.expect(worst_xi < kXiSpread, "xi independent of i");
    t.expect(worst_dihedral < kDihedral, "4d dihedral relation");
    char buf[200];
    std::snprintf(buf, sizeof buf, "gauge %.2e, forms %.2e, xi spread %.2e, dihedral %.2e", worst_gauge, worst_forms,
                  worst_xi, worst_dihedral);
    return t.outcome(buf);
}

Outcome asymptotic_trends() {
    Tally t;
    ScanResult r = asymptotic_scan(all_half_base(), {1, 2, 3, 4});
    std::ostringstream os;
    os << "gram off-diagonal";
    for (auto& w : r.rows) os << " " << w.gram_offdiag;
    os << "; ratio";
    for (auto& w : r.rows) os << " " << w.ratio;
    t.expect(r.rows.size() == 4, "all four rows");
    t.expect(r.verdicts.gram_decreasing, "Gram off-diagonal strictly decreasing");
    t.expect(r.verdicts.ratio_to_one, "ratio approaches 1 monotonically");
    return t.outcome(os.str());
}

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known_red;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--known-red" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string part; std::getline(ss, part, ',');) known_red.insert(std::stoi(part));
        } else {
            std::cerr << "usage: acceptance [--known-red 7,11]\n";
            return 2;
        }
    }
    std::vector<Criterion> criteria = {
        {1, "Gram exactness", 1, gram_exactness},
        {2, "projector idempotence", 10, projector_idempotence},
        {3, "channel sums", 120, channel_sums},
        {4, "R-coefficient identities", 1, r_identities},
        {5, "Plucker algebra", 60, plucker_algebra},
        {6, "cycle counts and M reconstruction", 10, cycle_counts},
        {7, "three-way 20j agreement", 1800, three_way_twenty_j},
        {8, "tetrahedral-graph consistency", 60, tetrahedral_consistency},
        {9, "semiclassical closure", 60, semiclassical_closure},
        {10, "twisted action", 60, twisted_action_checks},
        {11, "asymptotic trends", 1800, asymptotic_trends},
    };
    int unexpected = 0, failed = 0;
    for (auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; over the time limit";
        }
        char head[96];
        std::snprintf(head, sizeof head, "%s %2d %-36s %8.3fs (limit %gs)", o.pass ? "PASS" : "FAIL", c.id,
                      c.name.c_str(), secs, c.limit_s);
        std::cout << head << "  " << o.detail << std::endl;
        if (!o.pass) {
            ++failed;
            if (!known_red.count(c.id)) ++unexpected;
        }
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass";
    if (!known_red.empty()) std::cout << "; " << unexpected << " failures outside the known-red list";
    std::cout << "\n";
    return known_red.empty() ? (failed ? 1 : 0) : (unexpected ? 1 : 0);
}
