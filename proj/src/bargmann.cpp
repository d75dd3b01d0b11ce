#include "stnet/bargmann.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace stnet {

SpinorPolynomial SpinorPolynomial::constant(int slots, const BigRational& c) {
    SpinorPolynomial p(slots);
    p.add_term(Monomial(2 * slots, 0), c);
    return p;
}

SpinorPolynomial SpinorPolynomial::bracket(int slots, int i, int j) {
    SpinorPolynomial p(slots);
    Monomial m(2 * slots, 0);
    m[2 * i] = 1;
    m[2 * j + 1] = 1;
    p.add_term(m, 1);
    m.assign(2 * slots, 0);
    m[2 * j] = 1;
    m[2 * i + 1] = 1;
    p.add_term(m, -1);
    return p;
}

void SpinorPolynomial::add_term(const Monomial& m, const BigRational& c) {
    if (static_cast<int>(m.size()) != 2 * n_) throw std::invalid_argument("monomial has wrong number of slots");
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

SpinorPolynomial SpinorPolynomial::operator+(const SpinorPolynomial& o) const {
    SpinorPolynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

SpinorPolynomial SpinorPolynomial::operator-(const SpinorPolynomial& o) const { return *this + o * BigRational(-1); }

SpinorPolynomial SpinorPolynomial::operator*(const SpinorPolynomial& o) const {
    if (n_ != o.n_) throw std::invalid_argument("slot count mismatch in polynomial product");
    SpinorPolynomial r(n_);
    Monomial m(2 * n_);
    for (auto& [a, ca] : terms_)
        for (auto& [b, cb] : o.terms_) {
            for (int i = 0; i < 2 * n_; ++i) m[i] = a[i] + b[i];
            r.add_term(m, ca * cb);
        }
    return r;
}

SpinorPolynomial SpinorPolynomial::operator*(const BigRational& c) const {
    SpinorPolynomial r(n_);
    if (c == 0) return r;
    r.terms_ = terms_;
    for (auto& [m, v] : r.terms_) v *= c;
    return r;
}

SpinorPolynomial SpinorPolynomial::pow(int e) const {
    SpinorPolynomial r = constant(n_, 1), base = *this;
    for (; e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
    }
    return r;
}

SpinorPolynomial SpinorPolynomial::permute_slots(const std::vector<int>& perm) const {
    SpinorPolynomial r(n_);
    for (auto& [m, c] : terms_) {
        Monomial out(2 * n_);
        for (int i = 0; i < n_; ++i) {
            out[2 * perm[i]] = m[2 * i];
            out[2 * perm[i] + 1] = m[2 * i + 1];
        }
        r.add_term(out, c);
    }
    return r;
}

SpinorPolynomial SpinorPolynomial::conjugate_map() const {
    SpinorPolynomial r(n_);
    for (auto& [m, c] : terms_) {
        Monomial out(2 * n_);
        int sign = 1;
        for (int i = 0; i < n_; ++i) {
            out[2 * i] = m[2 * i + 1];
            out[2 * i + 1] = m[2 * i];
            if (m[2 * i] % 2) sign = -sign;
        }
        r.add_term(out, c * sign);
    }
    return r;
}

SpinorPolynomial SpinorPolynomial::apply_E(int i, int j) const {
    SpinorPolynomial r(n_);
    for (auto& [m, c] : terms_)
        for (int comp = 0; comp < 2; ++comp) {
            int e = m[2 * j + comp];
            if (e == 0) continue;
            Monomial out = m;
            --out[2 * j + comp];
            ++out[2 * i + comp];
            r.add_term(out, c * e);
        }
    return r;
}

std::vector<int> SpinorPolynomial::slot_degrees() const {
    std::vector<int> deg(n_, -2);
    for (auto& [m, c] : terms_)
        for (int s = 0; s < n_; ++s) {
            int d = m[2 * s] + m[2 * s + 1];
            if (deg[s] == -2) deg[s] = d;
            else if (deg[s] != d) deg[s] = -1;
        }
    for (auto& d : deg)
        if (d == -2) d = 0;
    return deg;
}

BigRational SpinorPolynomial::evaluate_exact(const std::vector<std::array<BigRational, 2>>& z) const {
    BigRational total = 0;
    for (auto& [m, c] : terms_) {
        BigRational t = c;
        for (int s = 0; s < n_; ++s) {
            for (int e = 0; e < m[2 * s]; ++e) t *= z[s][0];
            for (int e = 0; e < m[2 * s + 1]; ++e) t *= z[s][1];
        }
        total += t;
    }
    return total;
}

SpinorPolynomial basis_state_poly(const KMatrix& k) {
    int n = k.n();
    SpinorPolynomial p = SpinorPolynomial::constant(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (k(i, j) > 0) p = p * SpinorPolynomial::bracket(n, i, j).pow(k(i, j)) * BigRational(1, factorial(k(i, j)));
    return p;
}

SpinorPolynomial st_state_poly(const STLabel& label) { return basis_state_poly(k_from_st(label)); }

namespace {

bool triangle_ok(int a, int b, int c) {
    return (a + b + c) % 2 == 0 && c <= a + b && a <= b + c && b <= a + c && a >= 0 && b >= 0 && c >= 0;
}

// Three-valent state with twice-spins (a, b, c) on slots 0, 1, 2.
SpinorPolynomial trivalent(int a, int b, int c) {
    KMatrix k(3);
    k.set(0, 1, (a + b - c) / 2);
    k.set(0, 2, (a - b + c) / 2);
    k.set(1, 2, (-a + b + c) / 2);
    return basis_state_poly(k);
}

// Contracts (x, y, w) at the target end with (w, u, v) at the source end;
// `order` places x, y, u, v onto the four output slots.
SpinorPolynomial channel(int x, int y, int u, int v, int w, const std::vector<std::pair<int, int>>& order) {
    if (!triangle_ok(x, y, w) || !triangle_ok(w, u, v)) return SpinorPolynomial(4);
    return contract_slots(trivalent(w, u, v), 0, trivalent(x, y, w), 2, order);
}

}  // namespace

SpinorPolynomial s_channel_poly(const Spins4& j, TwiceSpin S) {
    return channel(j[0], j[1], j[2], j[3], S, {{1, 0}, {1, 1}, {0, 1}, {0, 2}});
}

SpinorPolynomial t_channel_poly(const Spins4& j, TwiceSpin T) {
    return channel(j[0], j[2], j[1], j[3], T, {{1, 0}, {0, 1}, {1, 1}, {0, 2}});
}

SpinorPolynomial u_channel_poly(const Spins4& j, TwiceSpin U) {
    return channel(j[0], j[3], j[1], j[2], U, {{1, 0}, {0, 1}, {0, 2}, {1, 1}});
}

BigRational bargmann_inner(const SpinorPolynomial& f, const SpinorPolynomial& g) {
    if (f.slots() != g.slots()) throw std::invalid_argument("slot count mismatch in inner product");
    BigRational total = 0;
    const auto& small = f.terms().size() <= g.terms().size() ? f.terms() : g.terms();
    const auto& large = f.terms().size() <= g.terms().size() ? g.terms() : f.terms();
    for (auto& [m, c] : small) {
        auto it = large.find(m);
        if (it == large.end()) continue;
        BigInt w = 1;
        for (int e : m) w *= factorial(e);
        total += c * it->second * BigRational(w);
    }
    return total;
}

SpinorPolynomial contract_slots(const SpinorPolynomial& source, int ss, const SpinorPolynomial& target, int ts,
                                const std::vector<std::pair<int, int>>& order) {
    SpinorPolynomial r(static_cast<int>(order.size()));
    std::unordered_map<long long, std::vector<const std::pair<const SpinorPolynomial::Monomial, BigRational>*>> by_end;
    auto key = [](int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); };
    for (auto& t : target.terms()) by_end[key(t.first[2 * ts + 1], t.first[2 * ts])].push_back(&t);
    SpinorPolynomial::Monomial out(2 * order.size());
    for (auto& [m1, c1] : source.terms()) {
        int a = m1[2 * ss], b = m1[2 * ss + 1];
        auto it = by_end.find(key(a, b));
        if (it == by_end.end()) continue;
        // target end has (c, d) = (b, a)
        BigRational w(factorial(a) * factorial(b));
        if (b % 2) w = -w;
        for (auto* t : it->second) {
            const auto& m2 = t->first;
            for (std::size_t o = 0; o < order.size(); ++o) {
                const auto& m = order[o].first == 0 ? m1 : m2;
                out[2 * o] = m[2 * order[o].second];
                out[2 * o + 1] = m[2 * order[o].second + 1];
            }
            r.add_term(out, c1 * t->second * w);
        }
    }
    return r;
}

BigRational contract_graph_oracle(const AmplitudeGraph& g, const std::vector<KMatrix>& corners, int budget) {
    edge_spins(g, corners);
    int degree = 0;
    for (auto& k : corners) degree += k.degree();
    if (degree > budget)
        throw BudgetExceeded("oracle contraction needs total bracket degree " + std::to_string(degree) +
                             ", budget is " + std::to_string(budget));
    std::vector<SpinorPolynomial> states;
    for (auto& k : corners) states.push_back(basis_state_poly(k));
    return contract_graph_oracle(g, states, budget);
}

BigRational contract_graph_oracle(const AmplitudeGraph& g, const std::vector<SpinorPolynomial>& states, int budget) {
    int V = g.vertex_count();
    if (static_cast<int>(states.size()) != V) throw std::invalid_argument("one state per vertex is required");
    int degree = 0;
    for (int v = 0; v < V; ++v) {
        if (states[v].slots() != g.valence(v))
            throw std::invalid_argument("state of vertex '" + g.name(v) + "' has wrong slot count");
        int d = 0;
        for (int s : states[v].slot_degrees()) d += std::max(s, 0);
        degree += d / 2;
    }
    if (degree > budget)
        throw BudgetExceeded("oracle contraction needs total bracket degree " + std::to_string(degree) +
                             ", budget is " + std::to_string(budget));

    // Slots of v whose edge leads to an earlier vertex; monomials are grouped
    // by their exponents on those slots.
    struct Back {
        int slot, other, other_slot;
        bool v_is_source;
    };
    std::vector<std::vector<Back>> back(V);
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        if (ed.source.vertex > ed.target.vertex)
            back[ed.source.vertex].push_back({ed.source.slot, ed.target.vertex, ed.target.slot, true});
        else
            back[ed.target.vertex].push_back({ed.target.slot, ed.source.vertex, ed.source.slot, false});
    }
    using Mono = SpinorPolynomial::Monomial;
    using Entry = std::pair<const Mono*, const BigRational*>;
    std::vector<std::map<std::vector<int>, std::vector<Entry>>> groups(V);
    for (int v = 0; v < V; ++v)
        for (auto& [m, c] : states[v].terms()) {
            std::vector<int> key;
            for (auto& b : back[v]) {
                key.push_back(m[2 * b.slot]);
                key.push_back(m[2 * b.slot + 1]);
            }
            groups[v][key].push_back({&m, &c});
        }

    std::vector<const Mono*> chosen(V, nullptr);
    BigRational total = 0;
    std::function<void(int, const BigRational&)> rec = [&](int v, const BigRational& acc) {
        if (v == V) {
            total += acc;
            return;
        }
        std::vector<int> key;
        BigRational w = acc;
        for (auto& b : back[v]) {
            const Mono& om = *chosen[b.other];
            int p = om[2 * b.other_slot], q = om[2 * b.other_slot + 1];
            // source (a, b) pairs with target (b, a)
            key.push_back(q);
            key.push_back(p);
            w *= BigRational(factorial(p) * factorial(q));
            int target_alpha = b.v_is_source ? p : q;
            if (target_alpha % 2) w = -w;
        }
        auto it = groups[v].find(key);
        if (it == groups[v].end()) return;
        for (auto& [m, c] : it->second) {
            chosen[v] = m;
            rec(v + 1, w * *c);
        }
        chosen[v] = nullptr;
    };
    rec(0, BigRational(1));
    return total;
}

TruncatedSeries TruncatedSeries::constant(int degree, const BigRational& c) {
    TruncatedSeries s(degree);
    if (c != 0) s.terms_[Key{}] = c;
    return s;
}

TruncatedSeries TruncatedSeries::variable(int degree, int pair, bool bar) {
    TruncatedSeries s(degree);
    if (degree >= 1) {
        Key k{};
        k[pair + (bar ? 6 : 0)] = 1;
        s.terms_[k] = 1;
    }
    return s;
}

BigRational TruncatedSeries::coefficient(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? BigRational(0) : it->second;
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    TruncatedSeries r(std::min(degree_, o.degree_));
    auto put = [&](const Key& k, const BigRational& c) {
        int d = 0;
        for (int e : k) d += e;
        if (d > r.degree_) return;
        auto& slot = r.terms_[k];
        slot += c;
        if (slot == 0) r.terms_.erase(k);
    };
    for (auto& [k, c] : terms_) put(k, c);
    for (auto& [k, c] : o.terms_) put(k, c);
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const { return *this + o * BigRational(-1); }

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    TruncatedSeries r(std::min(degree_, o.degree_));
    for (auto& [a, ca] : terms_) {
        int da = 0;
        for (int e : a) da += e;
        for (auto& [b, cb] : o.terms_) {
            int d = da;
            for (int e : b) d += e;
            if (d > r.degree_) continue;
            Key k;
            for (int i = 0; i < 12; ++i) k[i] = a[i] + b[i];
            auto& slot = r.terms_[k];
            slot += ca * cb;
            if (slot == 0) r.terms_.erase(k);
        }
    }
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const BigRational& c) const {
    TruncatedSeries r(degree_);
    if (c == 0) return r;
    r.terms_ = terms_;
    for (auto& [k, v] : r.terms_) v *= c;
    return r;
}

namespace {

// R(tau) = t12 t34 - t13 t24 + t14 t23 in (12,13,14,23,24,34) indexing.
TruncatedSeries pluecker_series(int degree, bool bar) {
    auto v = [&](int p) { return TruncatedSeries::variable(degree, p, bar); };
    return v(0) * v(5) - v(1) * v(4) + v(2) * v(3);
}

}  // namespace

TruncatedSeries genfun_gram_series(int degree) {
    TruncatedSeries x(degree);
    for (int p = 0; p < 6; ++p)
        x = x + TruncatedSeries::variable(degree, p, true) * TruncatedSeries::variable(degree, p, false);
    TruncatedSeries y = x - pluecker_series(degree, true) * pluecker_series(degree, false);
    // (1 - y)^{-2} = sum_n (n+1) y^n
    TruncatedSeries total = TruncatedSeries::constant(degree, 1), power = TruncatedSeries::constant(degree, 1);
    for (int n = 1; 2 * n <= degree; ++n) {
        power = power * y;
        total = total + power * BigRational(n + 1);
    }
    return total;
}

BigRational genfun_gram_entry(const TruncatedSeries& s, const STLabel& a, const STLabel& b) {
    KMatrix ka = k_from_st(a), kb = k_from_st(b);
    if (ka.degree() + kb.degree() > s.degree())
        throw std::invalid_argument("series truncated below the requested coefficient degree");
    TruncatedSeries::Key key{};
    static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int p = 0; p < 6; ++p) {
        key[p] = kb(pairs[p][0], pairs[p][1]);
        key[p + 6] = ka(pairs[p][0], pairs[p][1]);
    }
    return s.coefficient(key);
}

std::complex<double> gram_determinant(const std::array<std::complex<double>, 6>& tau) {
    Eigen::Matrix4cd T = Eigen::Matrix4cd::Zero();
    static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int p = 0; p < 6; ++p) {
        T(pairs[p][0], pairs[p][1]) = tau[p];
        T(pairs[p][1], pairs[p][0]) = -tau[p];
    }
    return (Eigen::Matrix4cd::Identity() + T * T.conjugate()).determinant();
}

double gram_determinant_closed(const std::array<std::complex<double>, 6>& tau) {
    double sum = 0;
    for (auto& t : tau) sum += std::norm(t);
    std::complex<double> R = tau[0] * tau[5] - tau[1] * tau[4] + tau[2] * tau[3];
    double base = 1 - sum + std::norm(R);
    return base * base;
}

}  // namespace stnet
