#pragma once

#include "stnet/exact.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stnet {

// All spins are stored as twice-spins (2j), so half-integers stay integral.
using TwiceSpin = int;
using Spins4 = std::array<TwiceSpin, 4>;

class AdmissibilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parses "n" or "n/2" into a twice-spin.
TwiceSpin parse_spin(const std::string& s);
std::string format_spin(TwiceSpin twice);

// Symmetric matrix of non-negative exponents k_ij, zero diagonal.
class KMatrix {
public:
    KMatrix() = default;
    explicit KMatrix(int n) : n_(n), k_(static_cast<std::size_t>(n * n), 0) {}

    int n() const { return n_; }
    int operator()(int i, int j) const { return k_[i * n_ + j]; }
    void set(int i, int j, int v);

    // Row sums, i.e. the twice-spins 2j_i.
    std::vector<TwiceSpin> twice_spins() const;
    // Total degree J = sum_{i<j} k_ij.
    int degree() const;
    bool operator==(const KMatrix& o) const = default;

private:
    int n_ = 0;
    std::vector<int> k_;
};

struct STLabel {
    Spins4 j{};
    TwiceSpin S = 0;
    TwiceSpin T = 0;

    // Twice of J = sum_i j_i.
    int twiceJ() const { return j[0] + j[1] + j[2] + j[3]; }
    TwiceSpin U() const { return twiceJ() - S - T; }
    bool operator==(const STLabel&) const = default;
    auto operator<=>(const STLabel&) const = default;
};

using STPair = std::pair<TwiceSpin, TwiceSpin>;

// The six exponents of a label, possibly negative; `integral` is false when
// a parity mismatch makes some k half-integral.
struct RawK {
    int k12, k13, k14, k23, k24, k34;
    bool integral;
    bool nonnegative() const {
        return k12 >= 0 && k13 >= 0 && k14 >= 0 && k23 >= 0 && k24 >= 0 && k34 >= 0;
    }
};
RawK raw_k(const Spins4& j, TwiceSpin S, TwiceSpin T);

KMatrix k_from_st(const STLabel& label);
STLabel st_from_k(const KMatrix& k);
bool is_admissible(const STLabel& label);
std::vector<STPair> admissible_st_range(const Spins4& j);

BigRational norm_squared(const STLabel& label);
BigInt r_coeff(TwiceSpin s, TwiceSpin t, TwiceSpin S, TwiceSpin T, int N);
BigRational scalar_product_st(const STLabel& a, const STLabel& b);

struct GramMatrix {
    Spins4 j{};
    std::vector<STPair> labels;
    RationalMatrix entries;
};

GramMatrix gram_matrix(const Spins4& j);
RationalMatrix projector_matrix(const Spins4& j);
int intertwiner_dimension(const Spins4& j);

using STVector = std::map<STPair, BigRational>;

// Coefficients of the three-term Plücker relation around (S,T); labels
// outside the admissible range are kept.
STVector fundamental_relation_vector(const STLabel& label);

// J1.J2 and J1.J3 acting on |S,T>, expanded in the same basis.
STVector apply_j1j2(const STLabel& label);
STVector apply_j1j3(const STLabel& label);

// R^{(s,t)}_{(S,T)}(N) for all (S,T) reached from (s,t).
std::map<STPair, BigInt> plucker_power_coeffs(TwiceSpin s, TwiceSpin t, int N);

// The null vector sum_{S,T} R(N) prod k(S,T)! |S,T> at spins j.
STVector plucker_null_vector(const Spins4& j, TwiceSpin s, TwiceSpin t, int N);

// Prod_{i<j} k_ij! for a label, assuming admissibility.
BigInt k_factorial_product(const STLabel& label);

}  // namespace stnet
