#include "stnet/recoupling.hpp"

#include <algorithm>
#include <functional>
#include <mutex>

namespace stnet {

namespace {

bool triad(TwiceSpin a, TwiceSpin b, TwiceSpin c) {
    return a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c <= a + b && a <= b + c && b <= a + c;
}

int half(int twice) { return twice / 2; }

}  // namespace

BigRational triangle_delta_sq(TwiceSpin a, TwiceSpin b, TwiceSpin c) {
    if (!triad(a, b, c)) return 0;
    BigRational q(factorial(half(a + b + c) + 1),
                  factorial(half(a - b + c)) * factorial(half(b - a + c)) * factorial(half(a + b - c)));
    q.canonicalize();
    return q;
}

BigRational racah_6j_sum(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f) {
    if (!triad(a, b, c) || !triad(a, e, f) || !triad(d, b, f) || !triad(d, e, c)) return 0;
    int t1 = half(a + b + c), t2 = half(a + e + f), t3 = half(d + b + f), t4 = half(d + e + c);
    int u1 = half(a + b + d + e), u2 = half(a + c + d + f), u3 = half(b + c + e + f);
    int lo = std::max({t1, t2, t3, t4}), hi = std::min({u1, u2, u3});
    BigRational s = 0;
    for (int t = lo; t <= hi; ++t) {
        BigRational term(factorial(t + 1), factorial(t - t1) * factorial(t - t2) * factorial(t - t3) *
                                               factorial(t - t4) * factorial(u1 - t) * factorial(u2 - t) *
                                               factorial(u3 - t));
        term.canonicalize();
        s += parity_sign(t) * term;
    }
    return s;
}

void require_6j_admissible(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f) {
    for (TwiceSpin x : {a, b, c, d, e, f})
        if (x < 0) throw AdmissibilityError("spins must be non-negative");
    for (auto [x, y, z] : {std::array{a, b, c}, std::array{a, e, f}, std::array{d, b, f}, std::array{d, e, c}}) {
        std::string name = "triad (" + format_spin(x) + ", " + format_spin(y) + ", " + format_spin(z) + ")";
        if ((x + y + z) % 2) throw AdmissibilityError(name + " has a half-integer sum");
        if (z > x + y || x > y + z || y > x + z) throw AdmissibilityError(name + " violates the triangle inequality");
    }
}

Surd wigner_6j(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f) {
    BigRational r = racah_6j_sum(a, b, c, d, e, f);
    if (r == 0) return Surd();
    BigRational deltas = triangle_delta_sq(a, b, c) * triangle_delta_sq(a, e, f) * triangle_delta_sq(d, b, f) *
                         triangle_delta_sq(d, e, c);
    return Surd::signed_sqrt(sgn(r), r * r / deltas);
}

STVector channel_vector(const Spins4& j, Channel c, TwiceSpin x) {
    STVector v;
    for (auto [S, T] : admissible_st_range(j)) {
        RawK k = raw_k(j, S, T);
        TwiceSpin U = j[0] + j[1] + j[2] + j[3] - S - T;
        switch (c) {
            case Channel::S:
                if (S == x) v[{S, T}] = 1;
                break;
            case Channel::T:
                if (T == x) v[{S, T}] = parity_sign(k.k23);
                break;
            case Channel::U:
                if (U == x) v[{S, T}] = parity_sign(k.k24 + k.k34);
                break;
        }
    }
    return v;
}

BigRational gram_overlap(const GramMatrix& g, const STVector& v, const STVector& w) {
    std::map<STPair, std::size_t> index;
    for (std::size_t i = 0; i < g.labels.size(); ++i) index[g.labels[i]] = i;
    BigRational out = 0;
    for (auto& [a, ca] : v)
        for (auto& [b, cb] : w) {
            auto ia = index.find(a), ib = index.find(b);
            if (ia == index.end() || ib == index.end())
                throw AdmissibilityError("gram_overlap: label outside the admissible range");
            out += ca * cb * g.entries[ia->second][ib->second];
        }
    return out;
}

BigRational gram_overlap(const Spins4& j, const STVector& v, const STVector& w) {
    return gram_overlap(gram_matrix(j), v, w);
}

BigRational overlap_same_channel(const Spins4& j, Channel c, TwiceSpin x, TwiceSpin y) {
    if (x != y) return 0;
    static constexpr int pairs[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    const int* p = pairs[static_cast<int>(c)];
    return triangle_delta_sq(j[p[0]], j[p[1]], x) * triangle_delta_sq(j[p[2]], j[p[3]], x) / BigRational(x + 1);
}

BigRational overlap_s_sprime(const Spins4& j, TwiceSpin S, TwiceSpin Sp) {
    return overlap_same_channel(j, Channel::S, S, Sp);
}

namespace {

// (-1)^N / N! * (J-N+1)! / (J-2N+1)!
BigRational alpha_coeff(int J, int N) {
    BigRational q(factorial(J - N + 1), factorial(N) * factorial(J - 2 * N + 1));
    q.canonicalize();
    return parity_sign(N) * q;
}

int min_spin(const Spins4& j) { return *std::min_element(j.begin(), j.end()); }

Spins4 reduced(const Spins4& j, int N) {
    Spins4 r = j;
    for (auto& x : r) x -= N;
    return r;
}

}  // namespace

BigRational overlap_s_st(const Spins4& j, TwiceSpin Sp, TwiceSpin S, TwiceSpin T) {
    STLabel target{j, S, T};
    if (!is_admissible(target)) throw AdmissibilityError("overlap_s_st: (S,T) is not admissible");
    int J = target.twiceJ() / 2;
    BigRational out = 0;
    for (int N = 0; N <= min_spin(j); ++N) {
        Spins4 js = reduced(j, N);
        BigRational inner = 0;
        for (auto [s, t] : admissible_st_range(js)) {
            if (s != Sp) continue;
            BigInt r = r_coeff(s, t, S, T, N);
            if (r != 0) inner += BigRational(r) * norm_squared(STLabel{js, s, t});
        }
        if (inner != 0) out += alpha_coeff(J, N) * inner;
    }
    return out;
}

BigRational overlap_t_st(const Spins4& j, TwiceSpin Tp, TwiceSpin S, TwiceSpin T) {
    STLabel target{j, S, T};
    if (!is_admissible(target)) throw AdmissibilityError("overlap_t_st: (S,T) is not admissible");
    int J = target.twiceJ() / 2;
    BigRational out = 0;
    for (int N = 0; N <= min_spin(j); ++N) {
        Spins4 js = reduced(j, N);
        BigRational inner = 0;
        for (auto [s, t] : admissible_st_range(js)) {
            if (t != Tp) continue;
            BigInt r = r_coeff(s, t, S, T, N);
            if (r != 0) inner += parity_sign(raw_k(j, s, t).k23) * BigRational(r) * norm_squared(STLabel{js, s, t});
        }
        if (inner != 0) out += alpha_coeff(J, N) * inner;
    }
    return out;
}

BigRational overlap_s_t_series(const Spins4& j, TwiceSpin S, TwiceSpin T) {
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    if (twiceJ % 2) throw AdmissibilityError("sum of spins j1+j2+j3+j4 is not an integer");
    int J = twiceJ / 2;
    BigRational out = 0;
    for (int N = 0; N <= min_spin(j); ++N) {
        STLabel l{reduced(j, N), S, T};
        if (is_admissible(l)) out += alpha_coeff(J, N) * norm_squared(l);
    }
    return parity_sign(raw_k(j, S, T).k23) * out;
}

BigRational overlap_s_t(const Spins4& j, TwiceSpin S, TwiceSpin T) {
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    BigRational r = racah_6j_sum(j[0], j[1], S, j[3], j[2], T);
    if (r == 0) return 0;
    return parity_sign(twiceJ / 2 + raw_k(j, S, T).k23) * r;
}

BigRational overlap_s_u(const Spins4& j, TwiceSpin S, TwiceSpin U) {
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    BigRational r = racah_6j_sum(j[0], j[1], S, j[2], j[3], U);
    if (r == 0) return 0;
    RawK k = raw_k(j, S, twiceJ - S - U);
    return parity_sign(twiceJ / 2 + k.k24 + k.k34) * r;
}

BigRational overlap_t_u(const Spins4& j, TwiceSpin T, TwiceSpin U) {
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    BigRational r = racah_6j_sum(j[0], j[2], T, j[1], j[3], U);
    if (r == 0) return 0;
    RawK k = raw_k(j, twiceJ - T - U, T);
    return parity_sign(twiceJ / 2 + k.k23 + k.k24 + k.k34) * r;
}

Surd overlap_s_t_surd(const Spins4& j, TwiceSpin S, TwiceSpin T) {
    Surd six = wigner_6j(j[0], j[1], S, j[3], j[2], T);
    if (six.is_zero()) return Surd();
    BigRational d = triangle_delta_sq(j[0], j[1], S) * triangle_delta_sq(j[2], j[3], S) *
                    triangle_delta_sq(j[0], j[2], T) * triangle_delta_sq(j[1], j[3], T);
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    Surd pref = Surd::signed_sqrt(parity_sign(twiceJ / 2 + raw_k(j, S, T).k23), d);
    return pref * six;
}

int SimplexLabels::edge_index(int a, int b) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b > 4 || a == b) throw std::invalid_argument("simplex edge needs two distinct vertices in 0..4");
    return a * (9 - a) / 2 + (b - a - 1);
}

Spins4 SimplexLabels::vertex_spins(int a) const {
    Spins4 out{};
    int i = 0;
    for (int b = 0; b < 5; ++b)
        if (b != a) out[i++] = spin(a, b);
    return out;
}

std::vector<KMatrix> SimplexLabels::corners() const {
    std::vector<KMatrix> out;
    for (int a = 0; a < 5; ++a) out.push_back(k_from_st(vertex_label(a)));
    return out;
}

void SimplexLabels::validate() const {
    for (int a = 0; a < 5; ++a) {
        try {
            k_from_st(vertex_label(a));
        } catch (const AdmissibilityError& e) {
            throw AdmissibilityError("vertex " + std::to_string(a + 1) + ": " + e.what());
        }
    }
}

SimplexLabels SimplexLabels::scaled(int lambda) const {
    SimplexLabels s = *this;
    for (auto& x : s.edge) x *= lambda;
    for (auto& [S, T] : s.st) {
        S *= lambda;
        T *= lambda;
    }
    return s;
}

std::vector<SimplexLabels> simplex_assignments(const std::array<TwiceSpin, 10>& edge) {
    SimplexLabels base;
    base.edge = edge;
    std::array<std::vector<STPair>, 5> ranges;
    for (int a = 0; a < 5; ++a) ranges[a] = admissible_st_range(base.vertex_spins(a));
    std::vector<SimplexLabels> out;
    std::function<void(int)> rec = [&](int a) {
        if (a == 5) {
            out.push_back(base);
            return;
        }
        for (auto st : ranges[a]) {
            base.st[a] = st;
            rec(a + 1);
        }
    };
    rec(0);
    return out;
}

const AmplitudeGraph& split_simplex_graph() {
    static const AmplitudeGraph g = [] {
        std::vector<std::string> names;
        for (int a = 1; a <= 5; ++a) {
            names.push_back(std::to_string(a) + "L");
            names.push_back(std::to_string(a) + "R");
        }
        // Neighbour position i < 2 sits on the L half, otherwise on R.
        auto end = [](int a, int b) {
            int pos = b < a ? b : b - 1;
            return pos < 2 ? EdgeEnd{2 * a, pos} : EdgeEnd{2 * a + 1, pos - 1};
        };
        std::vector<GraphEdge> edges;
        for (int a = 0; a < 5; ++a) edges.push_back({{2 * a + 1, 0}, {2 * a, 2}});
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b) edges.push_back({end(a, b), end(b, a)});
        return AmplitudeGraph(names, edges);
    }();
    return g;
}

namespace {

KMatrix trivalent_k(TwiceSpin x, TwiceSpin y, TwiceSpin z, int vertex) {
    if (!triad(x, y, z))
        throw AdmissibilityError("vertex " + std::to_string(vertex + 1) + ": (" + format_spin(x) + ", " +
                                 format_spin(y) + ", " + format_spin(z) + ") violates the triangle conditions");
    KMatrix k(3);
    k.set(0, 1, (x + y - z) / 2);
    k.set(0, 2, (x - y + z) / 2);
    k.set(1, 2, (-x + y + z) / 2);
    return k;
}

const RacahEvaluator& split_evaluator() {
    static const RacahEvaluator ev(split_simplex_graph(), enumerate_simple_cycles(split_simplex_graph()),
                                   Disjointness::Vertices);
    return ev;
}

std::mutex fifteen_mutex;
std::map<std::pair<std::array<TwiceSpin, 10>, std::array<TwiceSpin, 5>>, BigRational> fifteen_cache;

}  // namespace

BigRational fifteen_j(const std::array<TwiceSpin, 10>& edge, const std::array<TwiceSpin, 5>& S) {
    auto key = std::make_pair(edge, S);
    {
        std::lock_guard<std::mutex> lock(fifteen_mutex);
        auto it = fifteen_cache.find(key);
        if (it != fifteen_cache.end()) return it->second;
    }
    SimplexLabels l;
    l.edge = edge;
    std::vector<KMatrix> corners;
    for (int a = 0; a < 5; ++a) {
        Spins4 j = l.vertex_spins(a);
        corners.push_back(trivalent_k(j[0], j[1], S[a], a));
        corners.push_back(trivalent_k(S[a], j[2], j[3], a));
    }
    BigRational v = split_evaluator()(corners);
    std::lock_guard<std::mutex> lock(fifteen_mutex);
    fifteen_cache.emplace(key, v);
    return v;
}

BigRational twenty_j(const SimplexLabels& labels) {
    labels.validate();
    std::array<std::vector<std::pair<TwiceSpin, BigRational>>, 5> expansion;
    for (int a = 0; a < 5; ++a) {
        Spins4 j = labels.vertex_spins(a);
        auto [S, T] = labels.st[a];
        int twiceJ = j[0] + j[1] + j[2] + j[3];
        for (TwiceSpin Sp = 0; Sp <= twiceJ; ++Sp) {
            BigRational norm = overlap_same_channel(j, Channel::S, Sp, Sp);
            if (norm == 0) continue;
            BigRational c = overlap_s_st(j, Sp, S, T);
            if (c != 0) expansion[a].emplace_back(Sp, c / norm);
        }
    }
    BigRational total = 0;
    std::array<TwiceSpin, 5> Sp{};
    std::function<void(int, const BigRational&)> rec = [&](int a, const BigRational& w) {
        if (a == 5) {
            total += w * fifteen_j(labels.edge, Sp);
            return;
        }
        for (auto& [s, c] : expansion[a]) {
            Sp[a] = s;
            rec(a + 1, w * c);
        }
    };
    rec(0, BigRational(1));
    return total;
}

Surd normalized_twenty_j(const SimplexLabels& labels) {
    BigRational v = twenty_j(labels);
    BigRational norms = 1;
    for (int a = 0; a < 5; ++a) norms *= norm_squared(labels.vertex_label(a));
    return Surd::signed_sqrt(sgn(v), v * v / norms);
}

BigRational twenty_to_fifteen_scale(const SimplexLabels& labels) {
    labels.validate();
    BigRational out = 1;
    for (int a = 0; a < 5; ++a) {
        STLabel l = labels.vertex_label(a);
        out *= norm_squared(l) / overlap_same_channel(l.j, Channel::S, l.S, l.S);
    }
    return out;
}

}  // namespace stnet
