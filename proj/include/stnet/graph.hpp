#pragma once

#include "stnet/exact.hpp"
#include "stnet/st_basis.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stnet {

struct EdgeEnd {
    int vertex = 0;
    int slot = 0;
    bool operator==(const EdgeEnd&) const = default;
};

// Oriented edge; the source end carries w and the target end its conjugate.
struct GraphEdge {
    EdgeEnd source;
    EdgeEnd target;
    bool operator==(const GraphEdge&) const = default;
};

// Directed multigraph without self-loops whose vertices carry an explicit
// slot order. Corner brackets [z_a|z_b> at a vertex follow that order.
class AmplitudeGraph {
public:
    AmplitudeGraph() = default;
    AmplitudeGraph(std::vector<std::string> names, std::vector<GraphEdge> edges);

    // K_n with edges a->b for a<b and slots ordered by neighbour index.
    static AmplitudeGraph complete(int n);

    int vertex_count() const { return static_cast<int>(names_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int valence(int v) const { return static_cast<int>(slots_[v].size()); }
    const std::string& name(int v) const { return names_[v]; }
    const std::vector<std::string>& names() const { return names_; }
    const GraphEdge& edge(int e) const { return edges_[e]; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    int edge_at(int v, int slot) const { return slots_[v][slot]; }
    int slot_of(int e, int v) const;
    int other_end(int e, int v) const;

    bool operator==(const AmplitudeGraph& o) const { return names_ == o.names_ && edges_ == o.edges_; }

private:
    std::vector<std::string> names_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<int>> slots_;
};

// Checks that every edge sees the same twice-spin from both ends; returns
// the edge spins.
std::vector<TwiceSpin> edge_spins(const AmplitudeGraph& g, const std::vector<KMatrix>& corners);

struct Corner {
    int vertex;
    int slot_lo;
    int slot_hi;
    auto operator<=>(const Corner&) const = default;
};

// Closed walk: vertices[i] --edges[i]--> vertices[i+1 mod n].
struct Walk {
    std::vector<int> vertices;
    std::vector<int> edges;
};

struct WalkCorners {
    int sign;  // sign of the corner-bracket monomial in A_c
    std::vector<Corner> corners;
};

WalkCorners walk_corners(const AmplitudeGraph& g, const Walk& w);

std::vector<Walk> enumerate_simple_cycles(const AmplitudeGraph& g);
std::vector<Walk> enumerate_simple_loops(const AmplitudeGraph& g);

enum class Disjointness { Vertices, Edges };

// All non-empty sets of pairwise disjoint walks, as sorted index lists.
std::vector<std::vector<int>> enumerate_unions(const std::vector<Walk>& walks, Disjointness d);

struct RacahStats {
    std::size_t walks = 0;
    std::size_t unions = 0;
    std::size_t active_unions = 0;
    std::size_t solutions = 0;
};

// Sum over non-negative {M_U} with sum_U M_U * corners(U) = k of
// (-1)^N (N+1)! prod sign_U^{M_U} / prod M_U!.
BigRational racah_sum(const AmplitudeGraph& g, const std::vector<KMatrix>& corners,
                      const std::vector<Walk>& walks, Disjointness d, RacahStats* stats = nullptr);

BigRational racah_cycles(const AmplitudeGraph& g, const std::vector<KMatrix>& corners,
                         RacahStats* stats = nullptr);
BigRational amplitude_loops(const AmplitudeGraph& g, const std::vector<KMatrix>& corners,
                            RacahStats* stats = nullptr);

// Reusable solver for many corner labellings on one graph.
class RacahEvaluator {
public:
    RacahEvaluator(const AmplitudeGraph& g, std::vector<Walk> walks, Disjointness d);
    BigRational operator()(const std::vector<KMatrix>& corners, RacahStats* stats = nullptr) const;
    std::size_t union_count() const { return unions_.size(); }

private:
    struct UnionData {
        int sign;
        std::vector<std::pair<int, int>> counts;  // corner index, multiplicity
    };
    const AmplitudeGraph* g_;
    std::vector<Walk> walks_;
    std::map<Corner, int> corner_index_;
    std::vector<UnionData> unions_;
};

// JSON: {"schema": "stnet.graph/1", "vertices": [...], "edges": [{"source":
// [v, slot], "target": [v, slot]}], "corners": {"v": [[k..]..]}}.
nlohmann::json graph_to_json(const AmplitudeGraph& g, const std::vector<KMatrix>* corners = nullptr);
AmplitudeGraph graph_from_json(const nlohmann::json& j, std::vector<KMatrix>* corners = nullptr);

}  // namespace stnet
