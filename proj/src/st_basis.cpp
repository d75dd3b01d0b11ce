#include "stnet/st_basis.hpp"

#include <algorithm>
#include <cstdlib>

namespace stnet {

TwiceSpin parse_spin(const std::string& s) {
    auto fail = [&] { throw std::invalid_argument("cannot parse spin '" + s + "'"); };
    if (s.empty()) fail();
    auto slash = s.find('/');
    auto to_int = [&](const std::string& part) {
        if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) fail();
        return std::stoi(part);
    };
    if (slash == std::string::npos) return 2 * to_int(s);
    if (s.substr(slash + 1) != "2") fail();
    return to_int(s.substr(0, slash));
}

std::string format_spin(TwiceSpin twice) {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

void KMatrix::set(int i, int j, int v) {
    if (i == j) throw std::invalid_argument("KMatrix diagonal is fixed at zero");
    if (v < 0) throw std::invalid_argument("KMatrix entries must be non-negative");
    k_[i * n_ + j] = v;
    k_[j * n_ + i] = v;
}

std::vector<TwiceSpin> KMatrix::twice_spins() const {
    std::vector<TwiceSpin> out(n_, 0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out[i] += (*this)(i, j);
    return out;
}

int KMatrix::degree() const {
    int d = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) d += (*this)(i, j);
    return d;
}

RawK raw_k(const Spins4& j, TwiceSpin S, TwiceSpin T) {
    TwiceSpin U = j[0] + j[1] + j[2] + j[3] - S - T;
    int d12 = j[0] + j[1] - S, d34 = j[2] + j[3] - S;
    int d13 = j[0] + j[2] - T, d24 = j[1] + j[3] - T;
    int d14 = j[0] + j[3] - U, d23 = j[1] + j[2] - U;
    bool integral = d12 % 2 == 0 && d34 % 2 == 0 && d13 % 2 == 0 && d24 % 2 == 0 &&
                    d14 % 2 == 0 && d23 % 2 == 0;
    auto h = [](int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); };
    return RawK{h(d12), h(d13), h(d14), h(d23), h(d24), h(d34), integral};
}

namespace {

void require_admissible(const STLabel& l) {
    for (int x : l.j)
        if (x < 0) throw AdmissibilityError("negative spin");
    if (l.twiceJ() % 2) throw AdmissibilityError("sum of spins j1+j2+j3+j4 is not an integer");
    if (l.S < 0 || l.T < 0) throw AdmissibilityError("channel spins must be non-negative");
    RawK k = raw_k(l.j, l.S, l.T);
    if (!k.integral) throw AdmissibilityError("parity: j1+j2+S must be an integer");
    if (l.U() < 0) throw AdmissibilityError("U = J-S-T < 0");
    if (k.k12 < 0) throw AdmissibilityError("k12 = j1+j2-S < 0");
    if (k.k34 < 0) throw AdmissibilityError("k34 = j3+j4-S < 0");
    if (k.k13 < 0) throw AdmissibilityError("k13 = j1+j3-T < 0");
    if (k.k24 < 0) throw AdmissibilityError("k24 = j2+j4-T < 0");
    if (k.k14 < 0) throw AdmissibilityError("k14 = j1+j4-U < 0");
    if (k.k23 < 0) throw AdmissibilityError("k23 = j2+j3-U < 0");
}

}  // namespace

bool is_admissible(const STLabel& l) {
    if (l.twiceJ() % 2 || l.S < 0 || l.T < 0 || l.U() < 0) return false;
    RawK k = raw_k(l.j, l.S, l.T);
    return k.integral && k.nonnegative();
}

KMatrix k_from_st(const STLabel& label) {
    require_admissible(label);
    RawK r = raw_k(label.j, label.S, label.T);
    KMatrix k(4);
    k.set(0, 1, r.k12);
    k.set(0, 2, r.k13);
    k.set(0, 3, r.k14);
    k.set(1, 2, r.k23);
    k.set(1, 3, r.k24);
    k.set(2, 3, r.k34);
    return k;
}

STLabel st_from_k(const KMatrix& k) {
    if (k.n() != 4) throw std::invalid_argument("st_from_k needs valence 4");
    auto tj = k.twice_spins();
    STLabel l;
    std::copy(tj.begin(), tj.end(), l.j.begin());
    l.S = tj[0] + tj[1] - 2 * k(0, 1);
    l.T = tj[0] + tj[2] - 2 * k(0, 2);
    TwiceSpin U = tj[0] + tj[3] - 2 * k(0, 3);
    if (tj[2] + tj[3] - 2 * k(2, 3) != l.S) throw std::invalid_argument("inconsistent k: S from k12 and k34 differ");
    if (tj[1] + tj[3] - 2 * k(1, 3) != l.T) throw std::invalid_argument("inconsistent k: T from k13 and k24 differ");
    if (tj[1] + tj[2] - 2 * k(1, 2) != U) throw std::invalid_argument("inconsistent k: U from k14 and k23 differ");
    if (l.S + l.T + U != l.twiceJ()) throw std::invalid_argument("inconsistent k: S+T+U != J");
    return l;
}

std::vector<STPair> admissible_st_range(const Spins4& j) {
    int twiceJ = j[0] + j[1] + j[2] + j[3];
    if (twiceJ % 2) throw AdmissibilityError("sum of spins j1+j2+j3+j4 is not an integer");
    std::vector<STPair> out;
    for (TwiceSpin S = 0; S <= twiceJ; ++S)
        for (TwiceSpin T = 0; S + T <= twiceJ; ++T)
            if (is_admissible(STLabel{j, S, T})) out.emplace_back(S, T);
    return out;
}

BigInt k_factorial_product(const STLabel& l) {
    RawK r = raw_k(l.j, l.S, l.T);
    return factorial(r.k12) * factorial(r.k13) * factorial(r.k14) * factorial(r.k23) *
           factorial(r.k24) * factorial(r.k34);
}

BigRational norm_squared(const STLabel& label) {
    require_admissible(label);
    BigRational q(factorial(label.twiceJ() / 2 + 1), k_factorial_product(label));
    q.canonicalize();
    return q;
}

BigInt r_coeff(TwiceSpin s, TwiceSpin t, TwiceSpin S, TwiceSpin T, int N) {
    if (N < 0) throw std::invalid_argument("r_coeff needs N >= 0");
    int a2 = s - S + 2 * N, b2 = t - T + 2 * N;
    if (a2 % 2 || b2 % 2) return 0;
    int a = a2 / 2, b = b2 / 2, c = N - a - b;
    if (a < 0 || b < 0 || c < 0) return 0;
    BigInt v = factorial(N) / (factorial(a) * factorial(b) * factorial(c));
    return parity_sign(b) * v;
}

BigRational scalar_product_st(const STLabel& a, const STLabel& b) {
    if (a.j != b.j) throw std::invalid_argument("scalar_product_st: external spins differ");
    require_admissible(a);
    require_admissible(b);
    BigRational out = 0;
    if (a == b) out += norm_squared(a);
    int J = a.twiceJ() / 2;
    int nmax = *std::min_element(a.j.begin(), a.j.end());
    for (int N = 1; N <= nmax; ++N) {
        Spins4 js = a.j;
        for (auto& x : js) x -= N;
        for (auto [s, t] : admissible_st_range(js)) {
            BigInt ra = r_coeff(s, t, a.S, a.T, N);
            if (ra == 0) continue;
            BigInt rb = r_coeff(s, t, b.S, b.T, N);
            if (rb == 0) continue;
            BigRational term(factorial(J - N + 1) * ra * rb,
                             factorial(N) * k_factorial_product(STLabel{js, s, t}));
            term.canonicalize();
            out += parity_sign(N) * term;
        }
    }
    return out;
}

GramMatrix gram_matrix(const Spins4& j) {
    GramMatrix g;
    g.j = j;
    g.labels = admissible_st_range(j);
    std::size_t n = g.labels.size();
    g.entries.assign(n, std::vector<BigRational>(n));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x; y < n; ++y) {
            BigRational v = scalar_product_st(STLabel{j, g.labels[x].first, g.labels[x].second},
                                              STLabel{j, g.labels[y].first, g.labels[y].second});
            g.entries[x][y] = v;
            g.entries[y][x] = v;
        }
    return g;
}

RationalMatrix projector_matrix(const Spins4& j) {
    GramMatrix g = gram_matrix(j);
    RationalMatrix p = g.entries;
    for (std::size_t y = 0; y < g.labels.size(); ++y) {
        BigRational n = norm_squared(STLabel{j, g.labels[y].first, g.labels[y].second});
        for (auto& row : p) row[y] /= n;
    }
    return p;
}

int intertwiner_dimension(const Spins4& j) {
    if ((j[0] + j[1] + j[2] + j[3]) % 2) return 0;
    int hi = std::min(j[0] + j[1], j[2] + j[3]);
    int lo = std::max(std::abs(j[0] - j[1]), std::abs(j[2] - j[3]));
    if (hi < lo || (hi - lo) % 2) return 0;
    return (hi - lo) / 2 + 1;
}

STVector fundamental_relation_vector(const STLabel& l) {
    RawK k = raw_k(l.j, l.S, l.T);
    STVector v;
    v[{l.S - 2, l.T}] += BigRational((k.k12 + 1) * (k.k34 + 1));
    v[{l.S, l.T - 2}] += BigRational(-(k.k13 + 1) * (k.k24 + 1));
    v[{l.S, l.T}] += BigRational(k.k14 * k.k23);
    return v;
}

namespace {

BigRational casimir_part(TwiceSpin x) { return ratio(x * (x + 2), 4); }

}  // namespace

STVector apply_j1j2(const STLabel& l) {
    require_admissible(l);
    RawK k = raw_k(l.j, l.S, l.T);
    STVector v;
    BigRational diag = casimir_part(l.S) - casimir_part(l.j[0]) - casimir_part(l.j[1]) -
                       BigRational(k.k14 * k.k23 + k.k13 * k.k24);
    v[{l.S, l.T}] = diag / 2;
    BigRational down = ratio((k.k13 + 1) * (k.k24 + 1), 2), up = ratio((k.k14 + 1) * (k.k23 + 1), 2);
    if (is_admissible(STLabel{l.j, l.S, l.T - 2})) v[{l.S, l.T - 2}] = down;
    if (is_admissible(STLabel{l.j, l.S, l.T + 2})) v[{l.S, l.T + 2}] = up;
    return v;
}

STVector apply_j1j3(const STLabel& l) {
    require_admissible(l);
    // Swapping slots 2 and 3 maps |S,T> to (-1)^{k23}|T,S> and J1.J3 to J1.J2.
    Spins4 swapped{l.j[0], l.j[2], l.j[1], l.j[3]};
    STVector inner = apply_j1j2(STLabel{swapped, l.T, l.S});
    int k23 = raw_k(l.j, l.S, l.T).k23;
    STVector v;
    for (auto& [st, c] : inner) {
        TwiceSpin S2 = st.second, T2 = st.first;
        int k23b = raw_k(l.j, S2, T2).k23;
        v[{S2, T2}] = parity_sign(k23 + k23b) * c;
    }
    return v;
}

std::map<STPair, BigInt> plucker_power_coeffs(TwiceSpin s, TwiceSpin t, int N) {
    std::map<STPair, BigInt> out;
    for (int a = 0; a <= N; ++a)
        for (int b = 0; a + b <= N; ++b) {
            TwiceSpin S = s + 2 * (N - a), T = t + 2 * (N - b);
            out[{S, T}] = r_coeff(s, t, S, T, N);
        }
    return out;
}

STVector plucker_null_vector(const Spins4& j, TwiceSpin s, TwiceSpin t, int N) {
    STVector v;
    for (auto& [st, r] : plucker_power_coeffs(s, t, N)) {
        STLabel l{j, st.first, st.second};
        if (!is_admissible(l)) continue;
        v[st] = BigRational(r * k_factorial_product(l));
    }
    return v;
}

}  // namespace stnet
