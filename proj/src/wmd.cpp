#include "dqd/wmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace dqd {

namespace {

struct Bag {
    std::vector<const std::vector<double>*> vectors;
    std::vector<double> weights;      // sums to 1
    std::vector<long long> counts;    // raw token counts
};

// Normalized bag of in-table tokens. Ordered map keeps construction
// deterministic regardless of token order.
Bag make_bag(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : tokens) {
        if (table.find(t)) ++counts[t];
    }
    Bag bag;
    double total = 0.0;
    for (const auto& [tok, n] : counts) total += static_cast<double>(n);
    for (const auto& [tok, n] : counts) {
        bag.vectors.push_back(table.find(tok));
        bag.weights.push_back(static_cast<double>(n) / total);
        bag.counts.push_back(static_cast<long long>(n));
    }
    return bag;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// One-sided greedy assignment: each source word moves its whole mass to
// its nearest target word.
double one_sided(const Bag& from, const Bag& to) {
    double cost = 0.0;
    for (std::size_t i = 0; i < from.vectors.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < to.vectors.size(); ++j) {
            best = std::min(best, euclidean(*from.vectors[i], *to.vectors[j]));
        }
        cost += from.weights[i] * best;
    }
    return cost;
}

}  // namespace

double relaxed_wmd(const std::vector<std::string>& tokens1,
                   const std::vector<std::string>& tokens2,
                   const EmbeddingTable& table) {
    Bag b1 = make_bag(tokens1, table);
    Bag b2 = make_bag(tokens2, table);
    if (b1.vectors.empty() || b2.vectors.empty()) return 0.0;
    return std::max(one_sided(b1, b2), one_sided(b2, b1));
}

namespace {

// Min-cost max-flow with integer capacities (successive shortest paths,
// Bellman-Ford per augmentation). Integer units guarantee termination.
struct McmfEdge {
    int to;
    long long capacity;
    double cost;
    std::size_t rev;  // index of the reverse edge in graph[to]
};

class Mcmf {
public:
    explicit Mcmf(int nodes) : graph_(nodes) {}

    void add_edge(int from, int to, long long capacity, double cost) {
        graph_[from].push_back({to, capacity, cost, graph_[to].size()});
        graph_[to].push_back({from, 0, -cost, graph_[from].size() - 1});
    }

    // Pushes as much flow as possible from s to t, returns total cost.
    // Successive shortest paths with Johnson potentials: reduced costs are
    // clamped at zero so floating-point noise cannot produce negative
    // residual cycles, and Dijkstra's predecessor tree is always acyclic.
    double run(int s, int t) {
        double total_cost = 0.0;
        std::size_t n = graph_.size();
        std::vector<double> potential(n, 0.0);
        for (;;) {
            std::vector<double> dist(n, std::numeric_limits<double>::infinity());
            std::vector<int> prev_node(n, -1);
            std::vector<int> prev_edge(n, -1);
            std::vector<bool> done(n, false);
            dist[s] = 0.0;
            for (;;) {
                int u = -1;
                for (std::size_t v = 0; v < n; ++v) {
                    if (!done[v] && std::isfinite(dist[v]) &&
                        (u < 0 || dist[v] < dist[u])) {
                        u = static_cast<int>(v);
                    }
                }
                if (u < 0) break;
                done[u] = true;
                for (std::size_t k = 0; k < graph_[u].size(); ++k) {
                    const McmfEdge& e = graph_[u][k];
                    if (e.capacity <= 0 || done[e.to]) continue;
                    double reduced =
                        std::max(0.0, e.cost + potential[u] - potential[e.to]);
                    double nd = dist[u] + reduced;
                    if (nd < dist[e.to]) {
                        dist[e.to] = nd;
                        prev_node[e.to] = u;
                        prev_edge[e.to] = static_cast<int>(k);
                    }
                }
            }
            if (!std::isfinite(dist[t])) break;
            for (std::size_t v = 0; v < n; ++v) {
                if (std::isfinite(dist[v])) potential[v] += dist[v];
            }

            long long bottleneck = std::numeric_limits<long long>::max();
            for (int v = t; v != s; v = prev_node[v]) {
                bottleneck = std::min(bottleneck,
                                      graph_[prev_node[v]][prev_edge[v]].capacity);
            }
            for (int v = t; v != s; v = prev_node[v]) {
                McmfEdge& e = graph_[prev_node[v]][prev_edge[v]];
                e.capacity -= bottleneck;
                graph_[e.to][e.rev].capacity += bottleneck;
                total_cost += static_cast<double>(bottleneck) * e.cost;
            }
        }
        return total_cost;
    }

private:
    std::vector<std::vector<McmfEdge>> graph_;
};

// Transport with integer token counts: supplies scaled by the total count
// of the other side so both sides carry the same integer mass, cost
// normalized back at the end.
double solve_transport(const std::vector<long long>& supply_counts,
                       const std::vector<long long>& demand_counts,
                       const std::vector<std::vector<double>>& cost) {
    std::size_t n = supply_counts.size();
    std::size_t m = demand_counts.size();
    long long total_s = 0, total_d = 0;
    for (long long c : supply_counts) total_s += c;
    for (long long c : demand_counts) total_d += c;

    // node layout: 0 = source, rows [1, n], cols [n+1, n+m], sink n+m+1
    Mcmf mcmf(static_cast<int>(n + m + 2));
    int source = 0, sink = static_cast<int>(n + m + 1);
    for (std::size_t i = 0; i < n; ++i) {
        mcmf.add_edge(source, static_cast<int>(1 + i), supply_counts[i] * total_d, 0.0);
    }
    for (std::size_t j = 0; j < m; ++j) {
        mcmf.add_edge(static_cast<int>(n + 1 + j), sink, demand_counts[j] * total_s, 0.0);
    }
    long long mass = total_s * total_d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            mcmf.add_edge(static_cast<int>(1 + i), static_cast<int>(n + 1 + j), mass,
                          cost[i][j]);
        }
    }
    return mcmf.run(source, sink) / static_cast<double>(mass);
}

}  // namespace

double exact_wmd_small(const std::vector<std::string>& tokens1,
                       const std::vector<std::string>& tokens2,
                       const EmbeddingTable& table) {
    Bag b1 = make_bag(tokens1, table);
    Bag b2 = make_bag(tokens2, table);
    if (b1.vectors.empty() || b2.vectors.empty()) return 0.0;
    if (b1.vectors.size() > 8 || b2.vectors.size() > 8) {
        throw std::runtime_error("exact_wmd_small: more than 8 unique in-table tokens");
    }
    // Canonical side order so the result is bitwise symmetric: swapping the
    // arguments transposes the transport problem, which is mathematically
    // equal but would sum floating-point terms in a different order.
    auto key = [&table](const std::vector<std::string>& tokens) {
        std::vector<std::string> kept;
        for (const auto& t : tokens) {
            if (table.find(t)) kept.push_back(t);
        }
        std::sort(kept.begin(), kept.end());
        return kept;
    };
    if (key(tokens2) < key(tokens1)) std::swap(b1, b2);
    std::vector<std::vector<double>> cost(b1.vectors.size(),
                                          std::vector<double>(b2.vectors.size()));
    for (std::size_t i = 0; i < b1.vectors.size(); ++i) {
        for (std::size_t j = 0; j < b2.vectors.size(); ++j) {
            cost[i][j] = euclidean(*b1.vectors[i], *b2.vectors[j]);
        }
    }
    return solve_transport(b1.counts, b2.counts, cost);
}

}  // namespace dqd
