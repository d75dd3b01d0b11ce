#include "stnet/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace stnet {

AmplitudeGraph::AmplitudeGraph(std::vector<std::string> names, std::vector<GraphEdge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
    int V = vertex_count();
    std::vector<std::map<int, int>> by_slot(V);
    auto place = [&](const EdgeEnd& end, int e) {
        if (end.vertex < 0 || end.vertex >= V) throw std::invalid_argument("edge endpoint out of range");
        if (end.slot < 0) throw std::invalid_argument("negative slot index");
        if (!by_slot[end.vertex].emplace(end.slot, e).second)
            throw std::invalid_argument("slot " + std::to_string(end.slot) + " of vertex '" +
                                        names_[end.vertex] + "' used twice");
    };
    for (int e = 0; e < edge_count(); ++e) {
        if (edges_[e].source.vertex == edges_[e].target.vertex)
            throw std::invalid_argument("self-loops are not supported");
        place(edges_[e].source, e);
        place(edges_[e].target, e);
    }
    slots_.resize(V);
    for (int v = 0; v < V; ++v) {
        int expect = 0;
        for (auto [slot, e] : by_slot[v]) {
            if (slot != expect++) throw std::invalid_argument("slots of vertex '" + names_[v] + "' are not contiguous");
            slots_[v].push_back(e);
        }
    }
}

AmplitudeGraph AmplitudeGraph::complete(int n) {
    std::vector<std::string> names;
    for (int v = 0; v < n; ++v) names.push_back(std::to_string(v + 1));
    std::vector<GraphEdge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.push_back({{a, b - 1}, {b, a}});
    return AmplitudeGraph(std::move(names), std::move(edges));
}

int AmplitudeGraph::slot_of(int e, int v) const {
    const auto& ed = edges_[e];
    if (ed.source.vertex == v) return ed.source.slot;
    if (ed.target.vertex == v) return ed.target.slot;
    throw std::invalid_argument("edge not incident to vertex");
}

int AmplitudeGraph::other_end(int e, int v) const {
    const auto& ed = edges_[e];
    if (ed.source.vertex == v) return ed.target.vertex;
    if (ed.target.vertex == v) return ed.source.vertex;
    throw std::invalid_argument("edge not incident to vertex");
}

std::vector<TwiceSpin> edge_spins(const AmplitudeGraph& g, const std::vector<KMatrix>& corners) {
    if (static_cast<int>(corners.size()) != g.vertex_count())
        throw std::invalid_argument("one corner block per vertex is required");
    for (int v = 0; v < g.vertex_count(); ++v)
        if (corners[v].n() != g.valence(v))
            throw std::invalid_argument("corner block of vertex '" + g.name(v) + "' has wrong size");
    std::vector<TwiceSpin> out;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        TwiceSpin a = corners[ed.source.vertex].twice_spins()[ed.source.slot];
        TwiceSpin b = corners[ed.target.vertex].twice_spins()[ed.target.slot];
        if (a != b)
            throw AdmissibilityError("edge " + std::to_string(e) + " carries spin " + format_spin(a) +
                                     " at its source and " + format_spin(b) + " at its target");
        out.push_back(a);
    }
    return out;
}

WalkCorners walk_corners(const AmplitudeGraph& g, const Walk& w) {
    WalkCorners out{-1, {}};
    std::size_t n = w.edges.size();
    for (std::size_t i = 0; i < n; ++i)
        if (g.edge(w.edges[i]).source.vertex == w.vertices[i]) out.sign = -out.sign;
    for (std::size_t i = 0; i < n; ++i) {
        int v = w.vertices[(i + 1) % n];
        int in = g.slot_of(w.edges[i], v), outs = g.slot_of(w.edges[(i + 1) % n], v);
        if (in > outs) out.sign = -out.sign;
        out.corners.push_back({v, std::min(in, outs), std::max(in, outs)});
    }
    return out;
}

namespace {

std::vector<Walk> enumerate_closed_trails(const AmplitudeGraph& g, bool vertex_simple) {
    std::vector<Walk> out;
    std::vector<char> used(g.edge_count(), 0), visited(g.vertex_count(), 0);
    Walk cur;
    for (int e0 = 0; e0 < g.edge_count(); ++e0) {
        int start = g.edge(e0).source.vertex;
        cur.vertices = {start};
        cur.edges = {e0};
        used[e0] = 1;
        visited[start] = 1;
        std::function<void(int)> dfs = [&](int v) {
            if (vertex_simple) visited[v] = 1;
            cur.vertices.push_back(v);
            for (int s = 0; s < g.valence(v); ++s) {
                int e = g.edge_at(v, s);
                if (e <= e0 || used[e]) continue;
                int u = g.other_end(e, v);
                if (u == start) {
                    Walk w = cur;
                    w.edges.push_back(e);
                    out.push_back(std::move(w));
                    if (vertex_simple) continue;
                }
                if (vertex_simple && visited[u]) continue;
                used[e] = 1;
                cur.edges.push_back(e);
                dfs(u);
                cur.edges.pop_back();
                used[e] = 0;
            }
            cur.vertices.pop_back();
            if (vertex_simple) visited[v] = 0;
        };
        dfs(g.edge(e0).target.vertex);
        used[e0] = 0;
        visited[start] = 0;
    }
    return out;
}

}  // namespace

std::vector<Walk> enumerate_simple_cycles(const AmplitudeGraph& g) { return enumerate_closed_trails(g, true); }
std::vector<Walk> enumerate_simple_loops(const AmplitudeGraph& g) { return enumerate_closed_trails(g, false); }

std::vector<std::vector<int>> enumerate_unions(const std::vector<Walk>& walks, Disjointness d) {
    std::vector<std::vector<std::uint64_t>> masks;
    std::size_t words = 1;
    for (auto& w : walks) {
        const auto& ids = d == Disjointness::Vertices ? w.vertices : w.edges;
        for (int x : ids) words = std::max<std::size_t>(words, x / 64 + 1);
    }
    for (auto& w : walks) {
        std::vector<std::uint64_t> m(words, 0);
        const auto& ids = d == Disjointness::Vertices ? w.vertices : w.edges;
        for (int x : ids) m[x / 64] |= std::uint64_t(1) << (x % 64);
        masks.push_back(std::move(m));
    }
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<std::uint64_t> occ(words, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        for (std::size_t i = from; i < walks.size(); ++i) {
            bool clash = false;
            for (std::size_t k = 0; k < words; ++k) clash |= (occ[k] & masks[i][k]) != 0;
            if (clash) continue;
            for (std::size_t k = 0; k < words; ++k) occ[k] |= masks[i][k];
            cur.push_back(static_cast<int>(i));
            out.push_back(cur);
            rec(i + 1);
            cur.pop_back();
            for (std::size_t k = 0; k < words; ++k) occ[k] &= ~masks[i][k];
        }
    };
    rec(0);
    return out;
}

RacahEvaluator::RacahEvaluator(const AmplitudeGraph& g, std::vector<Walk> walks, Disjointness d)
    : g_(&g), walks_(std::move(walks)) {
    std::vector<WalkCorners> data;
    for (auto& w : walks_) {
        data.push_back(walk_corners(g, w));
        for (auto& c : data.back().corners) corner_index_.emplace(c, 0);
    }
    int idx = 0;
    for (auto& [c, i] : corner_index_) i = idx++;
    for (auto& u : enumerate_unions(walks_, d)) {
        UnionData ud{1, {}};
        std::map<int, int> cnt;
        for (int w : u) {
            ud.sign *= data[w].sign;
            for (auto& c : data[w].corners) ++cnt[corner_index_.at(c)];
        }
        ud.counts.assign(cnt.begin(), cnt.end());
        unions_.push_back(std::move(ud));
    }
}

BigRational RacahEvaluator::operator()(const std::vector<KMatrix>& corners, RacahStats* stats) const {
    const AmplitudeGraph& g = *g_;
    edge_spins(g, corners);
    std::vector<int> target(corner_index_.size(), 0);
    for (int v = 0; v < g.vertex_count(); ++v)
        for (int a = 0; a < g.valence(v); ++a)
            for (int b = a + 1; b < g.valence(v); ++b) {
                int k = corners[v](a, b);
                if (k == 0) continue;
                auto it = corner_index_.find(Corner{v, a, b});
                if (it == corner_index_.end()) return 0;
                target[it->second] = k;
            }

    std::vector<int> active;
    for (std::size_t u = 0; u < unions_.size(); ++u) {
        bool ok = true;
        for (auto [c, m] : unions_[u].counts) ok &= m <= target[c];
        if (ok) active.push_back(static_cast<int>(u));
    }
    std::vector<int> coverage(target.size(), 0);
    for (int u : active)
        for (auto [c, m] : unions_[u].counts) ++coverage[c];
    for (std::size_t c = 0; c < target.size(); ++c)
        if (target[c] > 0 && coverage[c] == 0) return 0;

    // Unions touching scarcely covered corners first.
    auto key = [&](int u) {
        int best = 1 << 30;
        for (auto [c, m] : unions_[u].counts) best = std::min(best, coverage[c]);
        return best;
    };
    std::stable_sort(active.begin(), active.end(), [&](int x, int y) { return key(x) < key(y); });

    std::size_t P = active.size(), C = target.size();
    std::vector<std::vector<int>> later(P + 1, std::vector<int>(C, 0));
    for (std::size_t p = P; p-- > 0;) {
        later[p] = later[p + 1];
        for (auto [c, m] : unions_[active[p]].counts) ++later[p][c];
    }
    // Corners that must be settled once position p is passed.
    std::vector<std::vector<int>> closes(P);
    for (std::size_t c = 0; c < C; ++c) {
        if (target[c] == 0) continue;
        for (std::size_t p = 0; p < P; ++p)
            if (later[p][c] > 0 && later[p + 1][c] == 0) closes[p].push_back(static_cast<int>(c));
    }

    BigRational total = 0;
    std::size_t solutions = 0;
    std::vector<int> residual = target;
    BigInt denom = 1;
    std::function<void(std::size_t, int, int)> rec = [&](std::size_t p, int N, int sign) {
        if (p == P) {
            for (int r : residual)
                if (r != 0) return;
            ++solutions;
            BigRational term(factorial(N + 1), denom);
            term.canonicalize();
            if ((sign * parity_sign(N)) < 0) total -= term;
            else total += term;
            return;
        }
        const auto& u = unions_[active[p]];
        int mmax = 1 << 30;
        for (auto [c, m] : u.counts) mmax = std::min(mmax, residual[c] / m);
        int mmin = 0;
        for (auto [c, m] : u.counts)
            if (later[p + 1][c] == 0) {
                if (residual[c] % m) return;
                mmin = std::max(mmin, residual[c] / m);
            }
        for (int m = mmin; m <= mmax; ++m) {
            for (auto [c, cm] : u.counts) residual[c] -= m * cm;
            bool ok = true;
            for (int c : closes[p]) ok &= residual[c] == 0;
            if (ok) {
                BigInt saved = denom;
                denom *= factorial(m);
                rec(p + 1, N + m, (u.sign < 0 && (m % 2)) ? -sign : sign);
                denom = std::move(saved);
            }
            for (auto [c, cm] : u.counts) residual[c] += m * cm;
        }
    };
    rec(0, 0, 1);
    if (stats) {
        stats->walks = walks_.size();
        stats->unions = unions_.size();
        stats->active_unions = P;
        stats->solutions = solutions;
    }
    return total;
}

BigRational racah_sum(const AmplitudeGraph& g, const std::vector<KMatrix>& corners, const std::vector<Walk>& walks,
                      Disjointness d, RacahStats* stats) {
    return RacahEvaluator(g, walks, d)(corners, stats);
}

BigRational racah_cycles(const AmplitudeGraph& g, const std::vector<KMatrix>& corners, RacahStats* stats) {
    return racah_sum(g, corners, enumerate_simple_cycles(g), Disjointness::Vertices, stats);
}

BigRational amplitude_loops(const AmplitudeGraph& g, const std::vector<KMatrix>& corners, RacahStats* stats) {
    return racah_sum(g, corners, enumerate_simple_loops(g), Disjointness::Edges, stats);
}

nlohmann::json graph_to_json(const AmplitudeGraph& g, const std::vector<KMatrix>* corners) {
    nlohmann::json j;
    j["schema"] = "stnet.graph/1";
    j["vertices"] = g.names();
    j["edges"] = nlohmann::json::array();
    for (auto& e : g.edges())
        j["edges"].push_back({{"source", {e.source.vertex, e.source.slot}}, {"target", {e.target.vertex, e.target.slot}}});
    if (corners) {
        nlohmann::json c = nlohmann::json::object();
        for (int v = 0; v < g.vertex_count(); ++v) {
            nlohmann::json rows = nlohmann::json::array();
            for (int a = 0; a < (*corners)[v].n(); ++a) {
                nlohmann::json row = nlohmann::json::array();
                for (int b = 0; b < (*corners)[v].n(); ++b) row.push_back((*corners)[v](a, b));
                rows.push_back(row);
            }
            c[g.name(v)] = rows;
        }
        j["corners"] = c;
    }
    return j;
}

AmplitudeGraph graph_from_json(const nlohmann::json& j, std::vector<KMatrix>* corners) {
    if (!j.is_object()) throw std::invalid_argument("graph JSON must be an object");
    if (j.value("schema", std::string()) != "stnet.graph/1")
        throw std::invalid_argument("graph JSON: field 'schema' must be \"stnet.graph/1\"");
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw std::invalid_argument("graph JSON: field 'vertices' must be an array of names");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw std::invalid_argument("graph JSON: field 'edges' must be an array");
    std::vector<std::string> names = j["vertices"].get<std::vector<std::string>>();
    std::map<std::string, int> index;
    for (std::size_t v = 0; v < names.size(); ++v)
        if (!index.emplace(names[v], static_cast<int>(v)).second)
            throw std::invalid_argument("graph JSON: duplicate vertex name '" + names[v] + "'");
    std::vector<GraphEdge> edges;
    for (std::size_t e = 0; e < j["edges"].size(); ++e) {
        const auto& je = j["edges"][e];
        auto end = [&](const char* field) {
            if (!je.contains(field) || !je[field].is_array() || je[field].size() != 2)
                throw std::invalid_argument("graph JSON: edges[" + std::to_string(e) + "]." + field +
                                            " must be [vertex, slot]");
            return EdgeEnd{je[field][0].get<int>(), je[field][1].get<int>()};
        };
        edges.push_back({end("source"), end("target")});
    }
    AmplitudeGraph g(names, edges);
    if (corners) {
        corners->clear();
        if (!j.contains("corners")) throw std::invalid_argument("graph JSON: field 'corners' is required here");
        for (int v = 0; v < g.vertex_count(); ++v) {
            const auto& name = g.name(v);
            if (!j["corners"].contains(name))
                throw std::invalid_argument("graph JSON: corners missing for vertex '" + name + "'");
            const auto& rows = j["corners"][name];
            int n = g.valence(v);
            if (!rows.is_array() || static_cast<int>(rows.size()) != n)
                throw std::invalid_argument("graph JSON: corners['" + name + "'] must be a " + std::to_string(n) +
                                            "x" + std::to_string(n) + " matrix");
            KMatrix k(n);
            for (int a = 0; a < n; ++a) {
                if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != n)
                    throw std::invalid_argument("graph JSON: corners['" + name + "'][" + std::to_string(a) +
                                                "] has wrong length");
                for (int b = 0; b < n; ++b) {
                    int x = rows[a][b].get<int>();
                    if (a == b && x != 0)
                        throw std::invalid_argument("graph JSON: corners['" + name + "'] diagonal must be 0");
                    if (b > a) {
                        if (rows[b][a].get<int>() != x)
                            throw std::invalid_argument("graph JSON: corners['" + name + "'] is not symmetric");
                        if (x) k.set(a, b, x);
                    }
                }
            }
            corners->push_back(std::move(k));
        }
        edge_spins(g, *corners);
    }
    return g;
}

}  // namespace stnet
