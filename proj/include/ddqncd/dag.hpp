#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ddqncd {

// Directed acyclic graph over p nodes stored as a dense 0/1 adjacency
// matrix; has_edge(i, j) means i -> j. Instances always satisfy the DAG
// invariants (zero diagonal, acyclic); the only ways to obtain a Dag are the
// validating factories and apply_edit.
class Dag {
public:
    explicit Dag(int p = 0);

    // Throws MalformedGraph unless `adj` is square, has a zero diagonal,
    // holds only 0/1 and is acyclic.
    static Dag from_matrix(const std::vector<std::vector<int>>& adj);
    static Dag from_edges(int p, const std::vector<std::pair<int, int>>& edges);

    int p() const { return p_; }
    bool has_edge(int i, int j) const { return cells_[static_cast<std::size_t>(i) * p_ + j] != 0; }
    int edge_count() const { return edges_; }

    std::vector<int> parents(int j) const;
    std::vector<int> children(int i) const;
    std::vector<std::pair<int, int>> edges() const;
    std::vector<std::vector<int>> to_matrix() const;
    const std::vector<std::uint8_t>& cells() const { return cells_; }

    // FNV-1a over (p, cells); stable across runs.
    std::uint64_t hash() const;

    friend bool operator==(const Dag& a, const Dag& b) { return a.p_ == b.p_ && a.cells_ == b.cells_; }

private:
    friend class DagEditor;
    void set(int i, int j, bool on);

    int p_ = 0;
    int edges_ = 0;
    std::vector<std::uint8_t> cells_;
};

enum class EditOp : int { Add = 0, Remove = 1, Reverse = 2 };

std::string_view to_string(EditOp op);

struct EdgeEdit {
    EditOp op = EditOp::Add;
    int i = 0;
    int j = 0;

    friend bool operator==(const EdgeEdit&, const EdgeEdit&) = default;
};

// Flat index into the 3p^2 action head: idx = op*p^2 + i*p + j.
// Diagonal indices (i == j) exist but are never valid.
using ActionIndex = int;

constexpr int action_count(int p) { return 3 * p * p; }
ActionIndex encode(const EdgeEdit& e, int p);
EdgeEdit decode(ActionIndex idx, int p);

enum class Rejection { EdgeExists, EdgeAbsent, WouldCycle, BudgetExceeded, SelfLoop };

std::string_view to_string(Rejection r);

using EditResult = std::variant<Dag, Rejection>;

// Thrown by operations whose precondition is a legal edit.
class EditRejected : public std::invalid_argument {
public:
    explicit EditRejected(Rejection r);
    Rejection reason() const { return reason_; }

private:
    Rejection reason_;
};

// Acyclicity of a raw matrix. Throws MalformedGraph on non-square input or a
// nonzero diagonal.
bool is_acyclic(const std::vector<std::vector<int>>& adj);

// First violated constraint of `e` on `g`, or nullopt when the edit is legal.
std::optional<Rejection> check_edit(const Dag& g, const EdgeEdit& e, int budget);

// Returns the edited graph or the reason it was refused; `g` is untouched.
EditResult apply_edit(const Dag& g, const EdgeEdit& e, int budget);

// mask[idx] is true iff apply_edit(g, decode(idx), budget) succeeds.
std::vector<bool> valid_action_mask(const Dag& g, int budget);

// Reflexive-transitive closure: reach[a*p + b] iff a == b or a path a ~> b exists.
std::vector<std::uint8_t> reachability(const Dag& g);

// Same skeleton and same v-structures (a -> c <- b with a, b nonadjacent).
// Markov-equivalent graphs receive identical BIC scores on every dataset.
bool markov_equivalent(const Dag& a, const Dag& b);

// Topological order of a valid Dag (Kahn, smallest ready index first).
std::vector<int> topological_order(const Dag& g);

}  // namespace ddqncd
