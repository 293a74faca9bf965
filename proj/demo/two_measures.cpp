// Walkthrough: after ten binary experiments the wave function splits into
// 1024 branches. The Born measure and the naive branch-count measure then
// disagree about how likely "all first outcomes" is.

#include <cstdio>
#include <span>

#include "mwi/branching.hpp"
#include "mwi/fhg.hpp"

using namespace mwi;

int main() {
    const double p = 0.9;
    const int trials = 10;

    branching::BranchTree tree;
    for (int t = 0; t < trials; ++t) {
        const double w[2] = {p, 1.0 - p};
        for (auto leaf : tree.leaves()) tree.branch_step(leaf, w);
    }

    const auto all_first = [](std::span<const int> path) {
        for (int x : path)
            if (x != 0) return false;
        return true;
    };
    std::printf("leaves: %zu\n", tree.leaf_count());
    std::printf("born measure  (all first): %.9f\n", branching::born_measure(tree, all_first));
    std::printf("count measure (all first): %.9f\n", branching::count_measure(tree, all_first));

    std::printf("\nm  branch_count  count_mass    born_mass\n");
    for (const auto& row : fhg::graham_table(p, trials))
        std::printf("%-2u %-13llu %-13.6e %-13.6e\n", row.m,
                    static_cast<unsigned long long>(row.branch_count), row.count_mass,
                    row.born_mass);
    return 0;
}
