#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

#include "trajdp/geo.hpp"

namespace trajdp {

struct SearchStats {
    size_t cells_visited{0};
    size_t seg_distances{0};
    // optional per-cell count of segment distance computations
    std::map<uint64_t, size_t>* per_cell{nullptr};
};

struct SearchHit {
    Segment seg;
    double d{0.0};
};

// Exact top-K by (distance, traj, index, seq) over an explicit segment list.
std::vector<SearchHit> knn_linear(Vec2 q, const std::vector<Segment>& segments, size_t k);

// Multi-resolution grid over [0,1]^2. Level h has 2^(h-1) cells per side;
// level 1 is the single root cell. Segments live at their best-fit cell, the
// deepest level where both endpoints share a cell.
class HierarchicalGrid {
public:
    explicit HierarchicalGrid(int levels);

    int levels() const { return levels_; }
    int finest_granularity() const { return 1 << (levels_ - 1); }
    size_t size() const { return size_; }

    struct CellId {
        int level{1};
        int ix{0};
        int iy{0};
        auto operator<=>(const CellId&) const = default;
    };

    static uint64_t key_of(CellId id) {
        return (static_cast<uint64_t>(id.level) << 58) |
               (static_cast<uint64_t>(static_cast<uint32_t>(id.ix)) << 29) |
               static_cast<uint64_t>(static_cast<uint32_t>(id.iy));
    }
    static CellId id_of(uint64_t key) {
        return {static_cast<int>(key >> 58), static_cast<int>((key >> 29) & 0x1fffffff),
                static_cast<int>(key & 0x1fffffff)};
    }

    CellId best_fit_cell(const Segment& s) const;

    // 0 if q lies in the closed coverage, else distance to the nearest edge.
    static double min_dist(Vec2 q, CellId id);

    void insert(const Segment& s);
    // Throws if the segment is not indexed.
    void remove(const Segment& s);

    std::vector<Segment> all_segments() const;

    std::vector<SearchHit> knn_bud(Vec2 q, size_t k, SearchStats* stats = nullptr) const;
    std::vector<SearchHit> knn_topdown(Vec2 q, size_t k, SearchStats* stats = nullptr) const;
    std::vector<SearchHit> knn_bottomup(Vec2 q, size_t k, SearchStats* stats = nullptr) const;

    // Yields indexed segments in ascending (distance, traj, index, seq) order
    // until the callback returns false.
    void for_each_ascending(Vec2 q, const std::function<bool(const Segment&, double)>& yield) const;

    // Same cells holding the same segment multisets.
    bool structurally_equal(const HierarchicalGrid& other) const;

    // Cells with at least one stored segment, for structural checks.
    std::map<uint64_t, std::vector<Segment>> cell_contents() const;

private:
    // Cells live in a slot pool linked by indices, so searches never touch
    // the key hash map; segments hang off their cell as an intrusive list
    // into a second pool. Keeps the hot path allocation- and hash-free.
    struct Cell {
        uint64_t key{0};
        int32_t parent{-1};
        std::array<int32_t, 4> kids{};
        uint8_t nkids{0};
        int32_t seg_head{-1};
        mutable uint32_t epoch{0};
    };
    struct SegNode {
        Segment s;
        int32_t next{-1};
    };

    struct KeyHash {
        size_t operator()(uint64_t k) const {
            k ^= k >> 33;
            k *= 0xff51afd7ed558ccdULL;
            k ^= k >> 33;
            return static_cast<size_t>(k);
        }
    };

    int32_t locate_start(Vec2 q) const;
    void prune_upward(int32_t slot);
    int32_t alloc_cell(uint64_t key);
    template <typename F>
    void each_seg(const Cell& cell, F&& f) const {
        for (int32_t n = cell.seg_head; n != -1; n = spool_[n].next) f(spool_[n].s);
    }

    int levels_;
    size_t size_{0};
    std::unordered_map<uint64_t, int32_t, KeyHash> cellmap_;
    std::vector<Cell> cpool_;
    int32_t cell_free_{-1};  // freelist threaded through Cell::parent
    std::vector<SegNode> spool_;
    int32_t seg_free_{-1};
    mutable uint32_t epoch_{0};
    mutable std::vector<std::pair<double, int32_t>> stack_scratch_;
    mutable std::vector<std::pair<double, int32_t>> kids_scratch_;
    mutable std::vector<std::pair<double, int32_t>> pq_scratch_;
};

// Single-level uniform grid at the finest granularity; each segment is stored
// in every cell it crosses. Search expands Chebyshev rings around the query.
class UniformGrid {
public:
    explicit UniformGrid(int granularity) : g_(granularity) {}

    void insert(const Segment& s);
    void remove(const Segment& s);
    size_t size() const { return size_; }

    std::vector<SearchHit> knn(Vec2 q, size_t k) const;

private:
    void cover_cells(const Segment& s, std::vector<uint64_t>& out) const;

    int g_;
    size_t size_{0};
    std::unordered_map<uint64_t, std::vector<Segment>> cells_;
};

}  // namespace trajdp
