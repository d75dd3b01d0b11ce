#pragma once

#include "stnet/exact.hpp"
#include "stnet/graph.hpp"
#include "stnet/recoupling.hpp"

#include <array>
#include <string>
#include <vector>

namespace stnet {

// The 37 cycles of the 4-simplex named by vertex sequences over 1..5,
// rotated to start at the smallest vertex and oriented so the second
// vertex is smaller than the last.
const std::vector<std::string>& simplex_cycle_names();
// The 17 free cycles p_1..p_17 in order.
const std::vector<std::string>& simplex_free_cycles();
// Corners of a named cycle on AmplitudeGraph::complete(5).
std::vector<Corner> simplex_cycle_corners(const std::string& name);

struct FreeCycleAssignment {
    std::array<int, 17> p{};
    std::map<std::string, int> M;  // all 37 values by cycle name
    bool valid = false;
};

FreeCycleAssignment free_cycle_m_values(const std::vector<KMatrix>& corners, const std::array<int, 17>& p);
// Corner labels rebuilt from the M values.
std::vector<KMatrix> corners_from_m(const std::map<std::string, int>& M);

// Cycles whose multiplicity enters the sign s of (-1)^{N+s}.
enum class SignRule {
    Derived,    // the 26 cycles whose corner-bracket monomial is odd
    FiveCycle,  // M1234 + M1235 + M1245 + M12354 + M12435
};
const std::vector<std::string>& sign_cycles(SignRule rule);

struct FreeCycleStats {
    std::size_t visited = 0;
    std::size_t valid = 0;
};

BigRational twenty_j_racah(const SimplexLabels& labels, SignRule rule = SignRule::Derived, bool prune = true,
                           FreeCycleStats* stats = nullptr);

}  // namespace stnet
