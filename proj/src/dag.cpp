#include "ddqncd/dag.hpp"

#include <algorithm>
#include <string>

#include "ddqncd/errors.hpp"

namespace ddqncd {

class DagEditor {
public:
    static void set(Dag& g, int i, int j, bool on) { g.set(i, j, on); }
};

namespace {

bool kahn_acyclic(int p, const auto& has_edge) {
    std::vector<int> indeg(p, 0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (has_edge(i, j)) ++indeg[j];
    std::vector<int> stack;
    for (int v = 0; v < p; ++v)
        if (indeg[v] == 0) stack.push_back(v);
    int seen = 0;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        ++seen;
        for (int v = 0; v < p; ++v)
            if (has_edge(u, v) && --indeg[v] == 0) stack.push_back(v);
    }
    return seen == p;
}

// Does a path from `from` to `to` exist, optionally ignoring the direct edge from -> to?
bool reaches(const Dag& g, int from, int to, bool skip_direct) {
    const int p = g.p();
    std::vector<std::uint8_t> seen(p, 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < p; ++v) {
            if (!g.has_edge(u, v) || seen[v]) continue;
            if (skip_direct && u == from && v == to) continue;
            if (v == to) return true;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

}  // namespace

Dag::Dag(int p) : p_(p), cells_(static_cast<std::size_t>(p) * p, 0) {
    if (p < 0) throw MalformedGraph("node count must be non-negative");
}

void Dag::set(int i, int j, bool on) {
    auto& c = cells_[static_cast<std::size_t>(i) * p_ + j];
    if (c != 0 && !on) --edges_;
    if (c == 0 && on) ++edges_;
    c = on ? 1 : 0;
}

Dag Dag::from_matrix(const std::vector<std::vector<int>>& adj) {
    const int p = static_cast<int>(adj.size());
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (adj[i].size() == adj.size() && adj[i][j] != 0 && adj[i][j] != 1)
                throw MalformedGraph("adjacency entry (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") is not 0/1");
    if (!is_acyclic(adj)) throw MalformedGraph("adjacency matrix contains a directed cycle");
    Dag g(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (adj[i][j]) g.set(i, j, true);
    return g;
}

Dag Dag::from_edges(int p, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(p, std::vector<int>(p, 0));
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= p || j >= p)
            throw MalformedGraph("edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
        adj[i][j] = 1;
    }
    return from_matrix(adj);
}

std::vector<int> Dag::parents(int j) const {
    std::vector<int> out;
    for (int i = 0; i < p_; ++i)
        if (has_edge(i, j)) out.push_back(i);
    return out;
}

std::vector<int> Dag::children(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (has_edge(i, j)) out.push_back(j);
    return out;
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j)
            if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

std::vector<std::vector<int>> Dag::to_matrix() const {
    std::vector<std::vector<int>> m(p_, std::vector<int>(p_, 0));
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j) m[i][j] = has_edge(i, j) ? 1 : 0;
    return m;
}

std::uint64_t Dag::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ULL;
    };
    for (int s = 0; s < 4; ++s) mix(static_cast<std::uint8_t>((p_ >> (8 * s)) & 0xff));
    for (auto c : cells_) mix(c);
    return h;
}

std::string_view to_string(EditOp op) {
    switch (op) {
        case EditOp::Add: return "Add";
        case EditOp::Remove: return "Remove";
        case EditOp::Reverse: return "Reverse";
    }
    return "?";
}

std::string_view to_string(Rejection r) {
    switch (r) {
        case Rejection::EdgeExists: return "EdgeExists";
        case Rejection::EdgeAbsent: return "EdgeAbsent";
        case Rejection::WouldCycle: return "WouldCycle";
        case Rejection::BudgetExceeded: return "BudgetExceeded";
        case Rejection::SelfLoop: return "SelfLoop";
    }
    return "?";
}

EditRejected::EditRejected(Rejection r)
    : std::invalid_argument("edge edit rejected: " + std::string(to_string(r))), reason_(r) {}

ActionIndex encode(const EdgeEdit& e, int p) { return static_cast<int>(e.op) * p * p + e.i * p + e.j; }

EdgeEdit decode(ActionIndex idx, int p) {
    const int pp = p * p;
    return EdgeEdit{static_cast<EditOp>(idx / pp), (idx % pp) / p, idx % p};
}

bool is_acyclic(const std::vector<std::vector<int>>& adj) {
    const int p = static_cast<int>(adj.size());
    for (int i = 0; i < p; ++i) {
        if (static_cast<int>(adj[i].size()) != p)
            throw MalformedGraph("adjacency matrix is not square (row " + std::to_string(i) + " has " +
                                 std::to_string(adj[i].size()) + " entries, expected " + std::to_string(p) + ")");
        if (adj[i][i] != 0) throw MalformedGraph("nonzero diagonal at node " + std::to_string(i));
    }
    return kahn_acyclic(p, [&adj](int i, int j) { return adj[i][j] != 0; });
}

std::optional<Rejection> check_edit(const Dag& g, const EdgeEdit& e, int budget) {
    if (e.i == e.j) return Rejection::SelfLoop;
    switch (e.op) {
        case EditOp::Add:
            if (g.has_edge(e.i, e.j)) return Rejection::EdgeExists;
            if (reaches(g, e.j, e.i, false)) return Rejection::WouldCycle;
            if (g.edge_count() + 1 > budget) return Rejection::BudgetExceeded;
            return std::nullopt;
        case EditOp::Remove:
            if (!g.has_edge(e.i, e.j)) return Rejection::EdgeAbsent;
            return std::nullopt;
        case EditOp::Reverse:
            if (!g.has_edge(e.i, e.j)) return Rejection::EdgeAbsent;
            if (reaches(g, e.i, e.j, true)) return Rejection::WouldCycle;
            return std::nullopt;
    }
    return Rejection::SelfLoop;
}

EditResult apply_edit(const Dag& g, const EdgeEdit& e, int budget) {
    if (auto why = check_edit(g, e, budget)) return *why;
    Dag out = g;
    switch (e.op) {
        case EditOp::Add: DagEditor::set(out, e.i, e.j, true); break;
        case EditOp::Remove: DagEditor::set(out, e.i, e.j, false); break;
        case EditOp::Reverse:
            DagEditor::set(out, e.i, e.j, false);
            DagEditor::set(out, e.j, e.i, true);
            break;
    }
    return out;
}

std::vector<std::uint8_t> reachability(const Dag& g) {
    const int p = g.p();
    std::vector<std::uint8_t> reach(static_cast<std::size_t>(p) * p, 0);
    // Fill in reverse topological order so every child's row is complete first.
    auto order = topological_order(g);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        auto* row = &reach[static_cast<std::size_t>(u) * p];
        row[u] = 1;
        for (int v = 0; v < p; ++v) {
            if (!g.has_edge(u, v)) continue;
            const auto* child = &reach[static_cast<std::size_t>(v) * p];
            for (int w = 0; w < p; ++w) row[w] |= child[w];
        }
    }
    return reach;
}

std::vector<int> topological_order(const Dag& g) {
    const int p = g.p();
    std::vector<int> indeg(p, 0);
    for (auto [i, j] : g.edges()) ++indeg[j];
    std::vector<int> order;
    order.reserve(p);
    std::vector<std::uint8_t> done(p, 0);
    // p is small in every use here; a linear scan for the smallest ready node is fine.
    for (int k = 0; k < p; ++k) {
        int next = -1;
        for (int v = 0; v < p; ++v)
            if (!done[v] && indeg[v] == 0) {
                next = v;
                break;
            }
        if (next < 0) throw MalformedGraph("graph has a cycle");
        done[next] = 1;
        order.push_back(next);
        for (int v = 0; v < p; ++v)
            if (g.has_edge(next, v)) --indeg[v];
    }
    return order;
}

std::vector<bool> valid_action_mask(const Dag& g, int budget) {
    const int p = g.p();
    const int pp = p * p;
    std::vector<bool> mask(static_cast<std::size_t>(action_count(p)), false);
    if (p == 0) return mask;
    const auto reach = reachability(g);
    auto R = [&](int a, int b) { return reach[static_cast<std::size_t>(a) * p + b] != 0; };
    const bool can_add = g.edge_count() + 1 <= budget;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            const int cell = i * p + j;
            if (!g.has_edge(i, j)) {
                // Adding i -> j closes a cycle iff j already reaches i.
                mask[cell] = can_add && !R(j, i);
                continue;
            }
            mask[pp + cell] = true;
            // Reversing i -> j closes a cycle iff some other child of i reaches j.
            bool other_path = false;
            for (int c = 0; c < p && !other_path; ++c)
                if (c != j && g.has_edge(i, c) && R(c, j)) other_path = true;
            mask[2 * pp + cell] = !other_path;
        }
    }
    return mask;
}

bool markov_equivalent(const Dag& a, const Dag& b) {
    if (a.p() != b.p()) return false;
    const int p = a.p();
    auto adjacent = [](const Dag& g, int i, int j) { return g.has_edge(i, j) || g.has_edge(j, i); };
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (adjacent(a, i, j) != adjacent(b, i, j)) return false;
        }
    }
    auto collider = [&](const Dag& g, int x, int c, int y) {
        return g.has_edge(x, c) && g.has_edge(y, c) && !adjacent(g, x, y);
    };
    for (int c = 0; c < p; ++c) {
        for (int x = 0; x < p; ++x) {
            for (int y = x + 1; y < p; ++y) {
                if (x == c || y == c) continue;
                if (collider(a, x, c, y) != collider(b, x, c, y)) return false;
            }
        }
    }
    return true;
}

}  // namespace ddqncd
