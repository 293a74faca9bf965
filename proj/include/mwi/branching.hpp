// Branch trees grown from measurement-like interactions: Born weights,
// the naive count measure, and the per-branch entropy ledger.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mwi/errors.hpp"
#include "mwi/numeric.hpp"
#include "mwi/schmidt.hpp"

namespace mwi::branching {

using NodeId = std::uint32_t;

inline constexpr std::size_t kDefaultMaxLeaves = std::size_t(1) << 20;

struct BranchNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    int label = -1;                // outcome index in the parent's split; -1 for root
    double lam = 1.0;              // Born weight relative to the parent
    double log_weight = 0.0;       // ln of the cumulative weight; survives deep trees
    double weight = 1.0;           // cumulative weight (may underflow to 0 on extreme paths)
    double rel_entropy = 0.0;      // S_i = -lam ln lam
    double rescaled_entropy = 0.0; // S^R: entropy of the subtree conditioned on this node
    std::vector<NodeId> children;
};

class BranchTree {
public:
    explicit BranchTree(std::size_t max_leaves = kDefaultMaxLeaves)
        : max_leaves_(max_leaves) {
        nodes_.push_back(BranchNode{});
        leaf_count_ = 1;
    }

    std::size_t size() const { return nodes_.size(); }
    std::size_t leaf_count() const { return leaf_count_; }
    std::size_t max_leaves() const { return max_leaves_; }
    NodeId root() const { return 0; }

    const BranchNode& node(NodeId id) const {
        if (id >= nodes_.size()) throw StructureError("branch tree: no such node");
        return nodes_[id];
    }

    bool is_leaf(NodeId id) const { return node(id).children.empty(); }

    std::vector<NodeId> leaves() const {
        std::vector<NodeId> out;
        out.reserve(leaf_count_);
        for (const auto& n : nodes_)
            if (n.children.empty()) out.push_back(n.id);
        return out;
    }

    // Outcome labels along the path from the root to `id` (root excluded).
    std::vector<int> path_labels(NodeId id) const {
        std::vector<int> labels;
        for (NodeId at = node(id).id; nodes_[at].parent; at = *nodes_[at].parent)
            labels.push_back(nodes_[at].label);
        std::reverse(labels.begin(), labels.end());
        return labels;
    }

    // Split a leaf into one child per nonzero outcome weight. Weights must
    // be nonnegative and sum to 1 within 1e-9. A zero-weight outcome
    // produces no node: that branch does not exist.
    void branch_step(NodeId leaf, std::span<const double> outcome_weights) {
        if (leaf >= nodes_.size()) throw StructureError("branch_step: no such node");
        if (!nodes_[leaf].children.empty())
            throw StructureError("branch_step: node is not a leaf");
        double sum = 0.0;
        std::size_t nonzero = 0;
        for (double w : outcome_weights) {
            if (!(w >= 0.0)) throw ContractViolation("branch_step: weights must be nonnegative");
            sum += w;
            if (w > 0.0) ++nonzero;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ContractViolation("branch_step: weights must sum to 1");
        if (nonzero == 0) throw ContractViolation("branch_step: all weights are zero");
        if (leaf_count_ + nonzero - 1 > max_leaves_)
            throw CapacityError("branch_step: leaf budget exceeded");

        double split_entropy = 0.0;
        const double parent_logw = nodes_[leaf].log_weight;
        const double parent_w = nodes_[leaf].weight;
        for (std::size_t i = 0; i < outcome_weights.size(); ++i) {
            const double w = outcome_weights[i];
            if (w <= 0.0) continue;
            BranchNode child;
            child.id = static_cast<NodeId>(nodes_.size());
            child.parent = leaf;
            child.label = static_cast<int>(i);
            child.lam = w;
            child.log_weight = parent_logw + std::log(w);
            child.weight = parent_w * w;
            child.rel_entropy = (w < 1.0) ? -w * std::log(w) : 0.0;
            child.rescaled_entropy = 0.0;
            split_entropy += child.rel_entropy;
            nodes_[leaf].children.push_back(child.id);
            nodes_.push_back(std::move(child));
        }
        leaf_count_ += nonzero - 1;

        // Seen from an ancestor A, the split adds (w_leaf / w_A) * S_split
        // to the entropy of A's conditional leaf distribution.
        for (std::optional<NodeId> at = leaf; at; at = nodes_[*at].parent)
            nodes_[*at].rescaled_entropy +=
                std::exp(parent_logw - nodes_[*at].log_weight) * split_entropy;
    }

private:
    std::size_t max_leaves_;
    std::size_t leaf_count_ = 0;
    std::vector<BranchNode> nodes_;
};

using LeafPredicate = std::function<bool(std::span<const int>)>;

// Born measure of the event: sum of cumulative weights over matching leaves.
inline double born_measure(const BranchTree& tree, const LeafPredicate& pred) {
    if (tree.size() == 0) throw StructureError("born_measure: empty tree");
    KahanSum total;
    for (NodeId id : tree.leaves()) {
        const auto labels = tree.path_labels(id);
        if (pred(labels)) total.add(tree.node(id).weight);
    }
    return total.value();
}

// Graham's naive measure: matching leaves / total leaves.
inline double count_measure(const BranchTree& tree, const LeafPredicate& pred) {
    if (tree.size() == 0) throw StructureError("count_measure: empty tree");
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    for (NodeId id : tree.leaves()) {
        ++n;
        const auto labels = tree.path_labels(id);
        if (pred(labels)) ++m;
    }
    if (n == 0) throw StructureError("count_measure: tree has no leaves");
    return static_cast<double>(m) / static_cast<double>(n);
}

struct LedgerEntry {
    NodeId id = 0;
    double lam = 1.0;
    double rel_entropy = 0.0;      // S_i
    double rescaled_entropy = 0.0; // S^R relative to this node's creation
    double children_sum = 0.0;     // sum of S_i over direct children
};

struct EntropyLedger {
    std::vector<LedgerEntry> entries; // indexed by node id
    double leaf_entropy = 0.0;        // entropy of the full leaf distribution
};

inline EntropyLedger entropy_ledger(const BranchTree& tree) {
    EntropyLedger ledger;
    ledger.entries.resize(tree.size());
    for (NodeId id = 0; id < tree.size(); ++id) {
        const BranchNode& n = tree.node(id);
        LedgerEntry e;
        e.id = id;
        e.lam = n.lam;
        e.rel_entropy = n.rel_entropy;
        e.rescaled_entropy = n.rescaled_entropy;
        for (NodeId c : n.children) e.children_sum += tree.node(c).rel_entropy;
        ledger.entries[id] = e;
    }
    ledger.leaf_entropy = tree.node(tree.root()).rescaled_entropy;
    return ledger;
}

struct MeasurementStep {
    schmidt::MeasurementModel model;
    std::vector<schmidt::Complex> amplitudes;
};

// Chain of measurement-like interactions: step t splits every current leaf
// by that step's Born weights |c_i|^2. After each act of branching the
// per-branch conditional state is the factorized |Phi>_i (x) |Psi>_i.
inline BranchTree grow_from_measurements(std::span<const MeasurementStep> steps,
                                         std::size_t max_leaves = kDefaultMaxLeaves) {
    BranchTree tree(max_leaves);
    for (const auto& step : steps) {
        // runs the full interaction once; validates the model and amplitudes
        (void)schmidt::apply_measurement(step.model, step.amplitudes);

        double n = 0.0;
        for (const auto& z : step.amplitudes) n += std::norm(z);
        std::vector<double> weights(step.amplitudes.size());
        for (std::size_t i = 0; i < weights.size(); ++i)
            weights[i] = std::norm(step.amplitudes[i]) / n;

        for (NodeId leaf : tree.leaves()) tree.branch_step(leaf, weights);
    }
    return tree;
}

} // namespace mwi::branching
