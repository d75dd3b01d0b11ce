#include "stnet/free_cycles.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <sstream>

namespace stnet {

namespace {

std::vector<int> digits(const std::string& name) {
    std::vector<int> v;
    int used = 0;
    for (char c : name) {
        int d = c - '0';
        if (d < 1 || d > 5 || (used & (1 << d)))
            throw std::invalid_argument("cycle name '" + name + "' must list distinct vertices 1..5");
        used |= 1 << d;
        v.push_back(d);
    }
    if (v.size() < 3) throw std::invalid_argument("cycle name '" + name + "' needs at least three vertices");
    return v;
}

std::string canonical(const std::string& name) {
    std::vector<int> v = digits(name);
    std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    if (v[1] > v.back()) std::reverse(v.begin() + 1, v.end());
    std::string out;
    for (int x : v) out += static_cast<char>('0' + x);
    return out;
}

// Slot of neighbour u at vertex v on complete(5), both 1-based.
int slot(int v, int u) { return u < v ? u - 1 : u - 2; }

const char* const kDependent = R"(
123 = k3_12 -p1-p2-p12-p13
145 = k1_45 -p6-p5-p16-p17
124 = k4_12 -p1-p6-p16-p15
234 = k2_34 -p1-p8-p12-p16
125 = k5_12 -p2-p6-p14-p17
235 = k2_35 -p2-p7-p13-p17
134 = k1_34 -p1-p4-p13-p15
245 = k2_45 -p9-p6-p14-p15
135 = k1_35 -p2-p3-p12-p14
345 = k4_35 -p7-p3-p10-p11
1234 = k3_24 -k2_34 +p1+p8+p12+p16-p7-p10-p17
1243 = k3_14 -k1_34 +p1+p4+p13+p15-p3-p14-p11
1245 = k5_14 -k1_45 +p6+p5+p16+p17-p3-p10-p12
1254 = k5_24 -k2_45 +p9+p6+p14+p15-p7-p11-p13
12354 = k4_15 -k1_45 +k2_45 -k5_24 +p7+p5+p11+p16+p17-p4-p14-p15-p9
12453 = k4_25 -k2_45 +k1_45 -k5_14 +p9+p3+p10+p14+p15-p5-p8-p16-p17
12435 = k4_23 -k2_34 +k1_34 -k3_14 +p8+p3+p12+p16+p11-p4-p9-p13-p15
12534 = k4_13 -k1_34 +k2_34 -k3_24 +p4+p7+p13+p15+p10-p5-p8-p12-p16
1235 = k3_25 -k2_35 +k1_45 -k4_15 +k5_24 -k2_45 +p2+p13+p9+p4+p14+p15-p8-p5-p11-2p16
1253 = k5_23 -k2_35 +k1_34 -k4_13 +k3_24 -k2_34 +p8+p5+p12+p16+p2+p17-p9-p4-p10-2p15
)";

struct KRef {
    int vertex, slot_lo, slot_hi;  // 0-based vertex, slots on complete(5)
};

struct Formula {
    std::string cycle;
    std::vector<std::pair<int, KRef>> k;
    std::array<int, 17> p{};
};

const std::vector<Formula>& formulas() {
    static const std::vector<Formula> fs = [] {
        std::vector<Formula> out;
        std::istringstream in(kDependent);
        std::string line;
        const std::regex term(R"(([+-]?)\s*(\d*)(k(\d)_(\d)(\d)|p(\d+)))");
        while (std::getline(in, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            Formula f;
            f.cycle = canonical(std::string(line.begin(), line.begin() + line.find(' ')));
            std::string rhs = line.substr(eq + 1);
            for (std::sregex_iterator it(rhs.begin(), rhs.end(), term), end; it != end; ++it) {
                const auto& m = *it;
                int c = m[2].length() ? std::stoi(m[2]) : 1;
                if (m[1] == "-") c = -c;
                if (m[7].matched) {
                    f.p[std::stoi(m[7]) - 1] += c;
                } else {
                    int v = std::stoi(m[4]), a = std::stoi(m[5]), b = std::stoi(m[6]);
                    f.k.push_back({c, KRef{v - 1, slot(v, a), slot(v, b)}});
                }
            }
            out.push_back(std::move(f));
        }
        return out;
    }();
    return fs;
}

}  // namespace

const std::vector<std::string>& simplex_cycle_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (int len = 3; len <= 5; ++len) {
            std::vector<int> perm(len);
            std::function<void(int, int)> rec = [&](int pos, int used) {
                if (pos == len) {
                    if (perm[0] == *std::min_element(perm.begin(), perm.end()) && perm[1] < perm.back()) {
                        std::string s;
                        for (int x : perm) s += static_cast<char>('0' + x);
                        out.push_back(s);
                    }
                    return;
                }
                for (int v = 1; v <= 5; ++v)
                    if (!(used & (1 << v))) {
                        perm[pos] = v;
                        rec(pos + 1, used | (1 << v));
                    }
            };
            rec(0, 0);
        }
        return out;
    }();
    return names;
}

const std::vector<std::string>& simplex_free_cycles() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const char* s : {"1324", "1325", "1345", "1354", "1435", "1425", "2345", "2354", "2435", "12345",
                              "12543", "13245", "13254", "13425", "13524", "14235", "14325"})
            out.push_back(canonical(s));
        return out;
    }();
    return names;
}

std::vector<Corner> simplex_cycle_corners(const std::string& name) {
    std::vector<int> v = digits(name);
    std::size_t n = v.size();
    std::vector<Corner> out;
    for (std::size_t i = 0; i < n; ++i) {
        int c = v[i], a = v[(i + n - 1) % n], b = v[(i + 1) % n];
        int sa = slot(c, a), sb = slot(c, b);
        out.push_back({c - 1, std::min(sa, sb), std::max(sa, sb)});
    }
    return out;
}

FreeCycleAssignment free_cycle_m_values(const std::vector<KMatrix>& corners, const std::array<int, 17>& p) {
    FreeCycleAssignment out;
    out.p = p;
    const auto& free = simplex_free_cycles();
    for (int i = 0; i < 17; ++i) out.M[free[i]] = p[i];
    for (const auto& f : formulas()) {
        int m = 0;
        for (auto& [c, r] : f.k) m += c * corners[r.vertex](r.slot_lo, r.slot_hi);
        for (int i = 0; i < 17; ++i) m += f.p[i] * p[i];
        out.M[f.cycle] = m;
    }
    out.valid = std::all_of(out.M.begin(), out.M.end(), [](auto& kv) { return kv.second >= 0; });
    return out;
}

std::vector<KMatrix> corners_from_m(const std::map<std::string, int>& M) {
    std::array<std::array<std::array<int, 4>, 4>, 5> sum{};
    for (auto& [name, m] : M)
        for (auto& c : simplex_cycle_corners(name)) sum[c.vertex][c.slot_lo][c.slot_hi] += m;
    std::vector<KMatrix> out(5, KMatrix(4));
    for (int v = 0; v < 5; ++v)
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                if (sum[v][a][b] < 0) throw std::invalid_argument("M values give a negative corner label");
                out[v].set(a, b, sum[v][a][b]);
            }
    return out;
}

const std::vector<std::string>& sign_cycles(SignRule rule) {
    static const std::vector<std::string> derived = {
        "123",  "124",  "125",  "134",  "135",  "145",   "234",   "235",   "245",
        "345",  "1243", "1253", "1254", "1324", "1325",  "1354",  "1425",  "1435",
        "2354", "2435", "12345", "12453", "12534", "13254", "13425", "14235"};
    static const std::vector<std::string> five = {"1234", "1235", "1245", "12354", "12435"};
    return rule == SignRule::Derived ? derived : five;
}

BigRational twenty_j_racah(const SimplexLabels& labels, SignRule rule, bool prune, FreeCycleStats* stats) {
    labels.validate();
    std::vector<KMatrix> k = labels.corners();
    const auto& fs = formulas();
    const auto& free = simplex_free_cycles();
    std::size_t F = fs.size();

    std::vector<int> constant(F, 0);
    for (std::size_t f = 0; f < F; ++f)
        for (auto& [c, r] : fs[f].k) constant[f] += c * k[r.vertex](r.slot_lo, r.slot_hi);

    std::array<int, 17> ub{};
    for (int i = 0; i < 17; ++i) {
        ub[i] = 1 << 30;
        for (auto& c : simplex_cycle_corners(free[i])) ub[i] = std::min(ub[i], k[c.vertex](c.slot_lo, c.slot_hi));
    }
    // Largest amount the unassigned parameters i.. can still add to formula f.
    std::vector<std::array<int, 18>> headroom(F);
    for (std::size_t f = 0; f < F; ++f) {
        headroom[f][17] = 0;
        for (int i = 16; i >= 0; --i) headroom[f][i] = headroom[f][i + 1] + std::max(fs[f].p[i], 0) * ub[i];
    }

    std::vector<int> sign_of_free(17, 0), sign_of_dep(F, 0);
    for (auto& name : sign_cycles(rule)) {
        std::string c = canonical(name);
        for (int i = 0; i < 17; ++i)
            if (free[i] == c) sign_of_free[i] = 1;
        for (std::size_t f = 0; f < F; ++f)
            if (fs[f].cycle == c) sign_of_dep[f] = 1;
    }

    BigRational total = 0;
    FreeCycleStats local;
    std::vector<int> partial = constant;
    std::array<int, 17> p{};
    std::function<void(int)> rec = [&](int i) {
        ++local.visited;
        if (i == 17) {
            int N = 0, s = 0;
            BigInt denom = 1;
            for (int x = 0; x < 17; ++x) {
                N += p[x];
                s += sign_of_free[x] * p[x];
                denom *= factorial(p[x]);
            }
            for (std::size_t f = 0; f < F; ++f) {
                if (partial[f] < 0) return;
                N += partial[f];
                s += sign_of_dep[f] * partial[f];
                denom *= factorial(partial[f]);
            }
            ++local.valid;
            BigRational term(factorial(N + 1), denom);
            term.canonicalize();
            total += parity_sign(N + s) * term;
            return;
        }
        for (int v = 0; v <= ub[i]; ++v) {
            p[i] = v;
            bool ok = true;
            for (std::size_t f = 0; f < F; ++f) {
                partial[f] += fs[f].p[i] * v;
                if (prune && partial[f] + headroom[f][i + 1] < 0) ok = false;
            }
            if (ok) rec(i + 1);
            for (std::size_t f = 0; f < F; ++f) partial[f] -= fs[f].p[i] * v;
        }
        p[i] = 0;
    };
    rec(0);
    if (stats) *stats = local;
    return total;
}

}  // namespace stnet
