#pragma once

#include "stnet/exact.hpp"
#include "stnet/graph.hpp"
#include "stnet/st_basis.hpp"

#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

namespace stnet {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact polynomial in the components (alpha_i, beta_i) of n spinor slots.
// A monomial key stores (a_0, b_0, a_1, b_1, ...).
class SpinorPolynomial {
public:
    using Monomial = std::vector<int>;

    SpinorPolynomial() = default;
    explicit SpinorPolynomial(int slots) : n_(slots) {}

    static SpinorPolynomial constant(int slots, const BigRational& c);
    // [z_i|z_j> = alpha_i beta_j - alpha_j beta_i
    static SpinorPolynomial bracket(int slots, int i, int j);

    int slots() const { return n_; }
    const std::map<Monomial, BigRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Monomial& m, const BigRational& c);

    SpinorPolynomial operator+(const SpinorPolynomial& o) const;
    SpinorPolynomial operator-(const SpinorPolynomial& o) const;
    SpinorPolynomial operator*(const SpinorPolynomial& o) const;
    SpinorPolynomial operator*(const BigRational& c) const;
    SpinorPolynomial pow(int e) const;
    bool operator==(const SpinorPolynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

    // Relabels slot i as perm[i].
    SpinorPolynomial permute_slots(const std::vector<int>& perm) const;
    // Formal image under (alpha, beta) -> (-conj beta, conj alpha), coefficients real.
    SpinorPolynomial conjugate_map() const;
    // E_ij = z_i . d/dz_j
    SpinorPolynomial apply_E(int i, int j) const;
    // Degree (a_i + b_i) per slot, or -1 if not homogeneous in that slot.
    std::vector<int> slot_degrees() const;

    template <class Num>
    Num evaluate(const std::vector<std::array<Num, 2>>& z) const {
        Num total{};
        for (auto& [m, c] : terms_) {
            Num t = Num(c.get_d());
            for (int s = 0; s < n_; ++s) {
                for (int e = 0; e < m[2 * s]; ++e) t *= z[s][0];
                for (int e = 0; e < m[2 * s + 1]; ++e) t *= z[s][1];
            }
            total += t;
        }
        return total;
    }
    BigRational evaluate_exact(const std::vector<std::array<BigRational, 2>>& z) const;

private:
    int n_ = 0;
    std::map<Monomial, BigRational> terms_;
};

// prod_{i<j} [z_i|z_j>^{k_ij} / k_ij!
SpinorPolynomial basis_state_poly(const KMatrix& k);
// |S,T> on four slots.
SpinorPolynomial st_state_poly(const STLabel& label);
// Orthogonal-channel states built by contracting two three-valent states.
SpinorPolynomial s_channel_poly(const Spins4& j, TwiceSpin S);
SpinorPolynomial t_channel_poly(const Spins4& j, TwiceSpin T);
SpinorPolynomial u_channel_poly(const Spins4& j, TwiceSpin U);

// Monomials integrate to a!b! per slot; coefficients are real.
BigRational bargmann_inner(const SpinorPolynomial& f, const SpinorPolynomial& g);

// Integrates one slot of `source` against one slot of `target`, with the
// source end carrying w and the target end carrying the conjugate spinor.
// Remaining slots are listed as (0=source,1=target, slot) in output order.
SpinorPolynomial contract_slots(const SpinorPolynomial& source, int source_slot,
                                const SpinorPolynomial& target, int target_slot,
                                const std::vector<std::pair<int, int>>& output_order);

// Budget counts the total bracket degree summed over vertices.
BigRational contract_graph_oracle(const AmplitudeGraph& g, const std::vector<KMatrix>& corners,
                                  int degree_budget = 40);
BigRational contract_graph_oracle(const AmplitudeGraph& g,
                                  const std::vector<SpinorPolynomial>& vertex_states,
                                  int degree_budget = 40);

// Multivariate series in tau_ij and conj tau_ij (i<j, four slots), truncated
// at a total degree.
class TruncatedSeries {
public:
    using Key = std::array<int, 12>;

    explicit TruncatedSeries(int degree) : degree_(degree) {}
    static TruncatedSeries constant(int degree, const BigRational& c);
    // Pair index p in (12,13,14,23,24,34) order; bar selects the conjugate.
    static TruncatedSeries variable(int degree, int pair, bool bar);

    int degree() const { return degree_; }
    const std::map<Key, BigRational>& terms() const { return terms_; }
    BigRational coefficient(const Key& k) const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const BigRational& c) const;

private:
    int degree_;
    std::map<Key, BigRational> terms_;
};

// (1 - sum |tau_ij|^2 + |R(tau)|^2)^{-2} with R = t12 t34 + t13 t42 + t14 t23.
TruncatedSeries genfun_gram_series(int degree);
// Coefficient of prod conj(tau)^{k(a)} tau^{k(b)}.
BigRational genfun_gram_entry(const TruncatedSeries& s, const STLabel& a, const STLabel& b);

// det(1 + T conj(T)) for the antisymmetric 4x4 matrix of tau values, and
// the closed quartic form; both in floating point.
std::complex<double> gram_determinant(const std::array<std::complex<double>, 6>& tau);
double gram_determinant_closed(const std::array<std::complex<double>, 6>& tau);

}  // namespace stnet
