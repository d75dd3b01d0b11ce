#pragma once

#include "stnet/exact.hpp"
#include "stnet/graph.hpp"
#include "stnet/st_basis.hpp"

#include <array>
#include <vector>

namespace stnet {

// (j1+j2+j3+1)! / ((j1-j2+j3)! (j2-j1+j3)! (j1+j2-j3)!), zero off-triangle.
BigRational triangle_delta_sq(TwiceSpin a, TwiceSpin b, TwiceSpin c);

// Single Racah sum of {a b c; d e f} without triangle prefactors.
BigRational racah_6j_sum(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f);
// Throws AdmissibilityError naming the first triad of {a b c; d e f} that fails.
void require_6j_admissible(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f);
Surd wigner_6j(TwiceSpin a, TwiceSpin b, TwiceSpin c, TwiceSpin d, TwiceSpin e, TwiceSpin f);

enum class Channel { S, T, U };

// Coefficients of |S>, |T> or |U> in the |S,T> basis.
STVector channel_vector(const Spins4& j, Channel c, TwiceSpin x);
// <v|w> through the Gram matrix.
BigRational gram_overlap(const GramMatrix& g, const STVector& v, const STVector& w);
BigRational gram_overlap(const Spins4& j, const STVector& v, const STVector& w);

// Closed forms.
BigRational overlap_same_channel(const Spins4& j, Channel c, TwiceSpin x, TwiceSpin y);
BigRational overlap_s_sprime(const Spins4& j, TwiceSpin S, TwiceSpin Sp);
BigRational overlap_s_st(const Spins4& j, TwiceSpin Sp, TwiceSpin S, TwiceSpin T);
BigRational overlap_t_st(const Spins4& j, TwiceSpin Tp, TwiceSpin S, TwiceSpin T);
// <S|T> through the N-sum of reduced norms.
BigRational overlap_s_t_series(const Spins4& j, TwiceSpin S, TwiceSpin T);
// Overlaps between orthogonal channels in terms of the 6j symbol.
BigRational overlap_s_t(const Spins4& j, TwiceSpin S, TwiceSpin T);
BigRational overlap_s_u(const Spins4& j, TwiceSpin S, TwiceSpin U);
BigRational overlap_t_u(const Spins4& j, TwiceSpin T, TwiceSpin U);
// Same values with the 6j and triangle factors kept symbolic.
Surd overlap_s_t_surd(const Spins4& j, TwiceSpin S, TwiceSpin T);

// Labels of the 4-simplex: spins on the ten edges ab (a<b, vertices 0..4)
// and one (S,T) per vertex. At vertex a the four spins are ordered by
// neighbour index.
struct SimplexLabels {
    std::array<TwiceSpin, 10> edge{};
    std::array<STPair, 5> st{};

    static int edge_index(int a, int b);
    TwiceSpin spin(int a, int b) const { return edge[edge_index(a, b)]; }
    Spins4 vertex_spins(int a) const;
    STLabel vertex_label(int a) const { return {vertex_spins(a), st[a].first, st[a].second}; }
    // Corner labels on AmplitudeGraph::complete(5).
    std::vector<KMatrix> corners() const;
    void validate() const;
    SimplexLabels scaled(int lambda) const;
    bool operator==(const SimplexLabels&) const = default;
};

// All (S,T) assignments on the 4-simplex with the given edge spins.
std::vector<SimplexLabels> simplex_assignments(const std::array<TwiceSpin, 10>& edge);

// Splits every vertex of K5 into two three-valent vertices joined by an
// internal edge carrying S.
const AmplitudeGraph& split_simplex_graph();

// Contraction of the five |S_a> states.
BigRational fifteen_j(const std::array<TwiceSpin, 10>& edge, const std::array<TwiceSpin, 5>& S);
// Contraction of the five |S_a,T_a> states by expanding each in |S'_a>.
BigRational twenty_j(const SimplexLabels& labels);
Surd normalized_twenty_j(const SimplexLabels& labels);
// prod_a ||S_a,T_a||^2 / <S_a|S_a>
BigRational twenty_to_fifteen_scale(const SimplexLabels& labels);

}  // namespace stnet
