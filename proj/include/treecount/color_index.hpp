#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "treecount/templates.hpp"

namespace treecount {

// Largest supported template; C(20,10) = 184756 keeps every table index and
// binomial comfortably inside 64 (and in fact 32) bits.
inline constexpr int kMaxTemplateSize = 20;

// The combinadic index system: a sorted color set {c_1 < ... < c_h} drawn
// from {0..k-1} maps to C(c_1,1) + C(c_2,2) + ... + C(c_h,h), a bijection
// onto [0, C(k,h)). Single-color sets map to their color value.
class ColorIndexer {
public:
    explicit ColorIndexer(int k) : k_(k) {
        if (k < 1 || k > kMaxTemplateSize)
            throw std::invalid_argument("color count k must be in [1, " +
                                        std::to_string(kMaxTemplateSize) + "]");
        binom_.assign(static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(k + 1), 0);
        for (int a = 0; a <= k; ++a) {
            at(a, 0) = 1;
            for (int b = 1; b <= a; ++b)
                at(a, b) = (b == a) ? 1 : at(a - 1, b - 1) + at(a - 1, b);
        }
    }

    int k() const { return k_; }

    std::int64_t binom(int a, int b) const {
        if (b < 0 || b > a) return 0;
        return binom_[static_cast<std::size_t>(a) * static_cast<std::size_t>(k_ + 1) +
                      static_cast<std::size_t>(b)];
    }

    std::int64_t num_sets(int h) const { return binom(k_, h); }

    std::int64_t index_of(std::span<const int> colors) const {
        std::int64_t idx = 0;
        int prev = -1;
        int pos = 0;
        for (int c : colors) {
            ++pos;
            if (c <= prev || c >= k_)
                throw std::invalid_argument("color set must be strictly increasing in [0, k)");
            idx += binom(c, pos);
            prev = c;
        }
        return idx;
    }

    // Inverse of index_of: unranks `index` into the h colors, largest first
    // internally, returned sorted ascending.
    std::vector<int> set_of(std::int64_t index, int h) const {
        if (h < 0 || h > k_ || index < 0 || index >= num_sets(h))
            throw std::invalid_argument("color set index out of range");
        std::vector<int> colors(static_cast<std::size_t>(h));
        int c = k_ - 1;
        for (int pos = h; pos >= 1; --pos) {
            while (binom(c, pos) > index) --c;
            colors[static_cast<std::size_t>(pos - 1)] = c;
            index -= binom(c, pos);
            --c;
        }
        return colors;
    }

private:
    std::int64_t& at(int a, int b) {
        return binom_[static_cast<std::size_t>(a) * static_cast<std::size_t>(k_ + 1) +
                      static_cast<std::size_t>(b)];
    }

    int k_;
    std::vector<std::int64_t> binom_;
};

// Precomputed color-set splits for one internal plan node. Two views over
// the same pairs:
//   - by parent column I_s: the C(|T_s|,|T_s,a|) (I_s,a, I_s,p) pairs, in
//     lexicographic order of the chosen active subset;
//   - grouped by passive column I_s,p: its l = C(k-|T_s,p|, |T_s,a|)
//     (I_s, I_s,a) partners, sorted by I_s. The pruned and vectorized
//     engines walk this view so each passive column is touched once.
struct SplitTable {
    int parent_size = 0, active_size = 0, passive_size = 0;
    std::int32_t parent_cols = 0, active_cols = 0, passive_cols = 0;
    int pairs_per_parent = 0;     // C(|T_s|, |T_s,a|)
    int partners_per_passive = 0; // l = C(k - |T_s,p|, |T_s,a|)

    // [I_s * pairs_per_parent + p]
    std::vector<std::int32_t> active_index, passive_index;
    // [I_s,p * partners_per_passive + q]
    std::vector<std::int32_t> grouped_parent, grouped_active;
};

inline SplitTable build_split_table(int parent_size, int active_size,
                                    const ColorIndexer& indexer) {
    const int k = indexer.k();
    const int passive_size = parent_size - active_size;
    if (active_size < 1 || passive_size < 1)
        throw std::invalid_argument("split requires nonempty active and passive children");
    if (parent_size > k) throw std::invalid_argument("sub-template larger than color count");

    SplitTable st;
    st.parent_size = parent_size;
    st.active_size = active_size;
    st.passive_size = passive_size;
    st.parent_cols = static_cast<std::int32_t>(indexer.num_sets(parent_size));
    st.active_cols = static_cast<std::int32_t>(indexer.num_sets(active_size));
    st.passive_cols = static_cast<std::int32_t>(indexer.num_sets(passive_size));
    st.pairs_per_parent = static_cast<int>(indexer.binom(parent_size, active_size));
    st.partners_per_passive = static_cast<int>(indexer.binom(k - passive_size, active_size));

    st.active_index.resize(static_cast<std::size_t>(st.parent_cols) *
                           static_cast<std::size_t>(st.pairs_per_parent));
    st.passive_index.resize(st.active_index.size());

    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> groups(
        static_cast<std::size_t>(st.passive_cols));

    std::vector<int> active(static_cast<std::size_t>(active_size));
    std::vector<int> passive(static_cast<std::size_t>(passive_size));
    std::vector<int> choose(static_cast<std::size_t>(active_size));
    for (std::int32_t is = 0; is < st.parent_cols; ++is) {
        const std::vector<int> parent = indexer.set_of(is, parent_size);
        // lexicographic enumeration of the active positions within parent
        for (int i = 0; i < active_size; ++i) choose[static_cast<std::size_t>(i)] = i;
        int pair = 0;
        while (true) {
            std::size_t ai = 0, pi = 0;
            for (int pos = 0, ci = 0; pos < parent_size; ++pos) {
                if (ci < active_size && choose[static_cast<std::size_t>(ci)] == pos) {
                    active[ai++] = parent[static_cast<std::size_t>(pos)];
                    ++ci;
                } else {
                    passive[pi++] = parent[static_cast<std::size_t>(pos)];
                }
            }
            const auto ia = static_cast<std::int32_t>(indexer.index_of(active));
            const auto ip = static_cast<std::int32_t>(indexer.index_of(passive));
            const std::size_t slot =
                static_cast<std::size_t>(is) * static_cast<std::size_t>(st.pairs_per_parent) +
                static_cast<std::size_t>(pair);
            st.active_index[slot] = ia;
            st.passive_index[slot] = ip;
            groups[static_cast<std::size_t>(ip)].emplace_back(is, ia);
            ++pair;

            int move = active_size - 1;
            while (move >= 0 &&
                   choose[static_cast<std::size_t>(move)] == parent_size - active_size + move)
                --move;
            if (move < 0) break;
            ++choose[static_cast<std::size_t>(move)];
            for (int j = move + 1; j < active_size; ++j)
                choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

    st.grouped_parent.reserve(static_cast<std::size_t>(st.passive_cols) *
                              static_cast<std::size_t>(st.partners_per_passive));
    st.grouped_active.reserve(st.grouped_parent.capacity());
    for (auto& grp : groups) {
        std::sort(grp.begin(), grp.end());
        if (static_cast<int>(grp.size()) != st.partners_per_passive)
            throw std::logic_error("split group size mismatch");
        for (auto [is, ia] : grp) {
            st.grouped_parent.push_back(is);
            st.grouped_active.push_back(ia);
        }
    }
    return st;
}

inline SplitTable build_split_table(const PlanNode& node, const PartitionPlan& plan,
                                    const ColorIndexer& indexer) {
    if (node.is_leaf()) throw std::invalid_argument("leaf nodes have no split table");
    return build_split_table(node.size, plan.node(node.active_child).size, indexer);
}

// Split tables for every internal node, indexed by node id (empty entries
// for leaves). Built once per plan and shared across iterations.
inline std::vector<SplitTable> build_plan_splits(const PartitionPlan& plan,
                                                 const ColorIndexer& indexer) {
    std::vector<SplitTable> splits(plan.nodes.size());
    for (const PlanNode& node : plan.nodes)
        if (!node.is_leaf())
            splits[static_cast<std::size_t>(node.id)] = build_split_table(node, plan, indexer);
    return splits;
}

}  // namespace treecount
