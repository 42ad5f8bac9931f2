#include "trajdp/hg_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace trajdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded candidate set ordered by the shared (dist, traj, index, seq) key.
class CandidateHeap {
public:
    explicit CandidateHeap(size_t k) : k_(k) {}

    bool full() const { return heap_.size() >= k_; }
    double theta() const { return full() ? heap_.front().d : kInf; }

    void offer(const Segment& s, double d) {
        if (!full()) {
            heap_.push_back({s, d});
            std::push_heap(heap_.begin(), heap_.end(), worse_first);
            return;
        }
        const SearchHit& top = heap_.front();
        if (d > top.d) return;
        if (!seg_closer(d, s, top.d, top.seg)) return;
        if (heap_.size() == 1) {
            heap_.front() = {s, d};
            return;
        }
        std::pop_heap(heap_.begin(), heap_.end(), worse_first);
        heap_.back() = {s, d};
        std::push_heap(heap_.begin(), heap_.end(), worse_first);
    }

    std::vector<SearchHit> sorted() && {
        std::sort(heap_.begin(), heap_.end(), [](const SearchHit& a, const SearchHit& b) {
            return seg_closer(a.d, a.seg, b.d, b.seg);
        });
        return std::move(heap_);
    }

private:
    static bool worse_first(const SearchHit& a, const SearchHit& b) {
        return seg_closer(a.d, a.seg, b.d, b.seg);  // max-heap on the key
    }

    size_t k_;
    std::vector<SearchHit> heap_;
};

using CellEntry = std::pair<double, int32_t>;  // (min distance, cell slot)
using CellQueue = std::priority_queue<CellEntry, std::vector<CellEntry>, std::greater<>>;

uint64_t pack_cell(int32_t ix, int32_t iy) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(ix)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(iy));
}

int32_t cell_coord(double v, int g) {
    auto c = static_cast<int32_t>(std::floor(v * g));
    return std::clamp(c, int32_t{0}, static_cast<int32_t>(g - 1));
}

}  // namespace

std::vector<SearchHit> knn_linear(Vec2 q, const std::vector<Segment>& segments, size_t k) {
    CandidateHeap heap(k);
    for (const Segment& s : segments) heap.offer(s, point_segment_distance(q, s));
    return std::move(heap).sorted();
}

HierarchicalGrid::HierarchicalGrid(int levels) : levels_(levels) {
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    cellmap_.reserve(1 << 13);
    cpool_.reserve(1 << 13);
    spool_.reserve(1 << 12);
    alloc_cell(key_of({1, 0, 0}));
}

int32_t HierarchicalGrid::alloc_cell(uint64_t key) {
    int32_t slot;
    if (cell_free_ != -1) {
        slot = cell_free_;
        cell_free_ = cpool_[slot].parent;
        cpool_[slot] = Cell{};
    } else {
        slot = static_cast<int32_t>(cpool_.size());
        cpool_.emplace_back();
    }
    cpool_[slot].key = key;
    cellmap_[key] = slot;
    return slot;
}

HierarchicalGrid::CellId HierarchicalGrid::best_fit_cell(const Segment& s) const {
    const int g = finest_granularity();
    const uint32_t ax = cell_coord(s.a.x, g), ay = cell_coord(s.a.y, g);
    const uint32_t bx = cell_coord(s.b.x, g), by = cell_coord(s.b.y, g);
    const uint32_t diff = (ax ^ bx) | (ay ^ by);
    const int shift = diff == 0 ? 0 : std::bit_width(diff);
    const int level = levels_ - shift;
    return {level, static_cast<int>(ax >> shift), static_cast<int>(ay >> shift)};
}

double HierarchicalGrid::min_dist(Vec2 q, CellId id) {
    const double w = 1.0 / (1 << (id.level - 1));
    const double lo_x = id.ix * w, hi_x = lo_x + w;
    const double lo_y = id.iy * w, hi_y = lo_y + w;
    const double dx = std::max({lo_x - q.x, 0.0, q.x - hi_x});
    const double dy = std::max({lo_y - q.y, 0.0, q.y - hi_y});
    return std::sqrt(dx * dx + dy * dy);
}

void HierarchicalGrid::insert(const Segment& s) {
    CellId id = best_fit_cell(s);
    uint64_t key = key_of(id);
    auto it = cellmap_.find(key);
    bool created = it == cellmap_.end();
    int32_t slot = created ? alloc_cell(key) : it->second;
    int32_t node;
    if (seg_free_ != -1) {
        node = seg_free_;
        seg_free_ = spool_[node].next;
        spool_[node] = {s, cpool_[slot].seg_head};
    } else {
        node = static_cast<int32_t>(spool_.size());
        spool_.push_back({s, cpool_[slot].seg_head});
    }
    cpool_[slot].seg_head = node;
    ++size_;
    // materialize the ancestor chain for a fresh cell
    while (created && id.level > 1) {
        const CellId parent_id{id.level - 1, id.ix / 2, id.iy / 2};
        const uint64_t parent_key = key_of(parent_id);
        auto pit = cellmap_.find(parent_key);
        created = pit == cellmap_.end();
        const int32_t pslot = created ? alloc_cell(parent_key) : pit->second;
        cpool_[pslot].kids[cpool_[pslot].nkids++] = slot;
        cpool_[slot].parent = pslot;
        id = parent_id;
        slot = pslot;
    }
}

void HierarchicalGrid::remove(const Segment& s) {
    const auto it = cellmap_.find(key_of(best_fit_cell(s)));
    if (it == cellmap_.end()) throw std::runtime_error("remove: segment cell not indexed");
    const int32_t slot = it->second;
    int32_t* link = &cpool_[slot].seg_head;
    while (*link != -1) {
        SegNode& n = spool_[*link];
        if (n.s.seq == s.seq && n.s.traj == s.traj) {
            const int32_t freed = *link;
            *link = n.next;
            n.next = seg_free_;
            seg_free_ = freed;
            --size_;
            prune_upward(slot);
            return;
        }
        link = &n.next;
    }
    throw std::runtime_error("remove: segment not indexed");
}

void HierarchicalGrid::prune_upward(int32_t slot) {
    while (true) {
        Cell& cell = cpool_[slot];
        if (cell.seg_head != -1 || cell.nkids != 0) return;
        if (cell.parent == -1) return;  // keep the root
        const int32_t parent = cell.parent;
        cellmap_.erase(cell.key);
        cell.parent = cell_free_;
        cell_free_ = slot;
        Cell& pc = cpool_[parent];
        for (uint8_t i = 0; i < pc.nkids; ++i) {
            if (pc.kids[i] == slot) {
                pc.kids[i] = pc.kids[--pc.nkids];
                break;
            }
        }
        slot = parent;
    }
}

std::vector<Segment> HierarchicalGrid::all_segments() const {
    std::vector<Segment> out;
    out.reserve(size_);
    for (const auto& [key, slot] : cellmap_) {
        each_seg(cpool_[slot], [&](const Segment& s) { out.push_back(s); });
    }
    return out;
}

int32_t HierarchicalGrid::locate_start(Vec2 q) const {
    // descend through the kid arrays instead of the key map
    int32_t slot = 0;  // root occupies slot 0 and is never freed
    int level = 1;
    while (level < levels_) {
        const int child_g = 1 << level;
        const uint64_t child_key =
            key_of({level + 1, cell_coord(q.x, child_g), cell_coord(q.y, child_g)});
        const Cell& cell = cpool_[slot];
        int32_t next = -1;
        for (uint8_t i = 0; i < cell.nkids; ++i) {
            if (cpool_[cell.kids[i]].key == child_key) {
                next = cell.kids[i];
                break;
            }
        }
        if (next == -1) break;
        slot = next;
        ++level;
    }
    return slot;
}

std::vector<SearchHit> HierarchicalGrid::knn_topdown(Vec2 q, size_t k, SearchStats* stats) const {
    CandidateHeap heap(k);
    const uint32_t epoch = ++epoch_;
    CellQueue pq;
    pq.push({0.0, 0});  // root occupies slot 0
    while (!pq.empty()) {
        const auto [d, slot] = pq.top();
        pq.pop();
        const Cell& cell = cpool_[slot];
        if (cell.epoch == epoch) continue;
        if (heap.full() && d > heap.theta()) break;
        cell.epoch = epoch;
        if (stats) ++stats->cells_visited;
        each_seg(cell, [&](const Segment& s) {
            if (stats) {
                ++stats->seg_distances;
                if (stats->per_cell) ++(*stats->per_cell)[cell.key];
            }
            heap.offer(s, point_segment_distance(q, s));
        });
        for (uint8_t i = 0; i < cell.nkids; ++i) {
            const double kd = min_dist(q, id_of(cpool_[cell.kids[i]].key));
            if (heap.full() && kd > heap.theta()) continue;  // sound: theta only shrinks
            pq.push({kd, cell.kids[i]});
        }
    }
    return std::move(heap).sorted();
}

std::vector<SearchHit> HierarchicalGrid::knn_bottomup(Vec2 q, size_t k, SearchStats* stats) const {
    CandidateHeap heap(k);
    const uint32_t epoch = ++epoch_;
    auto& stack = stack_scratch_;
    auto& kids = kids_scratch_;
    stack.clear();
    stack.push_back({0.0, locate_start(q)});
    while (!stack.empty()) {
        const auto [d, slot] = stack.back();
        stack.pop_back();
        const Cell& cell = cpool_[slot];
        if (cell.epoch == epoch) continue;
        if (heap.full() && d > heap.theta()) continue;
        cell.epoch = epoch;
        if (stats) ++stats->cells_visited;
        each_seg(cell, [&](const Segment& s) {
            if (stats) {
                ++stats->seg_distances;
                if (stats->per_cell) ++(*stats->per_cell)[cell.key];
            }
            heap.offer(s, point_segment_distance(q, s));
        });
        // parent first, then children, so finer cells pop earlier
        if (cell.parent != -1 && cpool_[cell.parent].epoch != epoch) {
            stack.push_back({min_dist(q, id_of(cpool_[cell.parent].key)), cell.parent});
        }
        kids.clear();
        for (uint8_t i = 0; i < cell.nkids; ++i) {
            const Cell& kid = cpool_[cell.kids[i]];
            if (kid.epoch != epoch) {
                const double kd = min_dist(q, id_of(kid.key));
                if (heap.full() && kd > heap.theta()) continue;
                kids.push_back({kd, cell.kids[i]});
            }
        }
        std::sort(kids.begin(), kids.end(), std::greater<>());
        stack.insert(stack.end(), kids.begin(), kids.end());
    }
    return std::move(heap).sorted();
}

std::vector<SearchHit> HierarchicalGrid::knn_bud(Vec2 q, size_t k, SearchStats* stats) const {
    CandidateHeap heap(k);
    const uint32_t epoch = ++epoch_;
    auto& stack = stack_scratch_;
    auto& kids = kids_scratch_;
    auto& pq = pq_scratch_;
    stack.clear();
    pq.clear();
    auto pq_push = [&pq](CellEntry e) {
        pq.push_back(e);
        std::push_heap(pq.begin(), pq.end(), std::greater<>());
    };
    auto pq_pop = [&pq]() {
        CellEntry e = pq.front();
        std::pop_heap(pq.begin(), pq.end(), std::greater<>());
        pq.pop_back();
        return e;
    };
    const int32_t root = 0;
    const int32_t start = locate_start(q);
    bool root_access = start == root;
    if (root_access) {
        pq_push({0.0, root});
    } else {
        stack.push_back({0.0, start});
    }
    while (!stack.empty() || !pq.empty()) {
        CellEntry cur;
        if (!root_access) {
            cur = stack.back();
            stack.pop_back();
        } else {
            cur = pq_pop();
        }
        const Cell& cell = cpool_[cur.second];
        if (cell.epoch == epoch) continue;
        if (heap.full() && cur.first > heap.theta()) {
            if (root_access) break;
            continue;
        }
        cell.epoch = epoch;
        if (stats) ++stats->cells_visited;
        each_seg(cell, [&](const Segment& s) {
            if (stats) {
                ++stats->seg_distances;
                if (stats->per_cell) ++(*stats->per_cell)[cell.key];
            }
            heap.offer(s, point_segment_distance(q, s));
        });
        if (!root_access && cell.parent != -1) {
            const Cell& pc = cpool_[cell.parent];
            if (pc.epoch != epoch) {
                if (pc.parent == -1) {
                    // switch phases: the queue replaces the stack
                    root_access = true;
                    pq_push({0.0, cell.parent});
                    for (const CellEntry& e : stack) pq_push(e);
                    stack.clear();
                } else {
                    stack.push_back({min_dist(q, id_of(pc.key)), cell.parent});
                }
            }
        }
        kids.clear();
        for (uint8_t i = 0; i < cell.nkids; ++i) {
            const Cell& kid = cpool_[cell.kids[i]];
            if (kid.epoch != epoch) {
                const double kd = min_dist(q, id_of(kid.key));
                if (heap.full() && kd > heap.theta()) continue;
                kids.push_back({kd, cell.kids[i]});
            }
        }
        if (!root_access) {
            std::sort(kids.begin(), kids.end(), std::greater<>());
            stack.insert(stack.end(), kids.begin(), kids.end());
        } else {
            for (const CellEntry& e : kids) pq_push(e);
        }
    }
    return std::move(heap).sorted();
}

void HierarchicalGrid::for_each_ascending(
    Vec2 q, const std::function<bool(const Segment&, double)>& yield) const {
    CellQueue cell_pq;
    cell_pq.push({0.0, 0});  // root occupies slot 0
    auto hit_later = [](const SearchHit& a, const SearchHit& b) {
        return seg_closer(b.d, b.seg, a.d, a.seg);  // min-heap on the key
    };
    std::priority_queue<SearchHit, std::vector<SearchHit>, decltype(hit_later)> seg_pq(hit_later);
    while (true) {
        while (!cell_pq.empty() && (seg_pq.empty() || cell_pq.top().first <= seg_pq.top().d)) {
            const int32_t slot = cell_pq.top().second;
            cell_pq.pop();
            const Cell& cell = cpool_[slot];
            each_seg(cell, [&](const Segment& s) {
                seg_pq.push({s, point_segment_distance(q, s)});
            });
            for (uint8_t i = 0; i < cell.nkids; ++i) {
                cell_pq.push({min_dist(q, id_of(cpool_[cell.kids[i]].key)), cell.kids[i]});
            }
        }
        if (seg_pq.empty()) return;
        const SearchHit hit = seg_pq.top();
        seg_pq.pop();
        if (!yield(hit.seg, hit.d)) return;
    }
}

std::map<uint64_t, std::vector<Segment>> HierarchicalGrid::cell_contents() const {
    std::map<uint64_t, std::vector<Segment>> out;
    for (const auto& [key, slot] : cellmap_) {
        std::vector<Segment> segs;
        each_seg(cpool_[slot], [&](const Segment& s) { segs.push_back(s); });
        std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
            return std::tie(a.traj, a.index, a.seq) < std::tie(b.traj, b.index, b.seq);
        });
        out[key] = std::move(segs);
    }
    return out;
}

bool HierarchicalGrid::structurally_equal(const HierarchicalGrid& other) const {
    if (levels_ != other.levels_ || size_ != other.size_) return false;
    const auto lhs = cell_contents();
    const auto rhs = other.cell_contents();
    if (lhs.size() != rhs.size()) return false;
    auto rit = rhs.begin();
    for (const auto& [key, segs] : lhs) {
        if (rit->first != key || rit->second.size() != segs.size()) return false;
        for (size_t i = 0; i < segs.size(); ++i) {
            const Segment& a = segs[i];
            const Segment& b = rit->second[i];
            if (a.traj != b.traj || a.index != b.index || a.a.x != b.a.x || a.a.y != b.a.y ||
                a.b.x != b.b.x || a.b.y != b.b.y) {
                return false;
            }
        }
        ++rit;
    }
    return true;
}

void UniformGrid::cover_cells(const Segment& s, std::vector<uint64_t>& out) const {
    out.clear();
    const double w = 1.0 / g_;
    const int32_t ix0 = cell_coord(std::min(s.a.x, s.b.x), g_);
    const int32_t ix1 = cell_coord(std::max(s.a.x, s.b.x), g_);
    const double dx = s.b.x - s.a.x;
    for (int32_t ix = ix0; ix <= ix1; ++ix) {
        double t0 = 0.0, t1 = 1.0;
        if (dx != 0.0) {
            const double ta = (ix * w - s.a.x) / dx;
            const double tb = ((ix + 1) * w - s.a.x) / dx;
            t0 = std::clamp(std::min(ta, tb), 0.0, 1.0);
            t1 = std::clamp(std::max(ta, tb), 0.0, 1.0);
            if (t0 > t1) continue;
        }
        const double ya = s.a.y + t0 * (s.b.y - s.a.y);
        const double yb = s.a.y + t1 * (s.b.y - s.a.y);
        int32_t iy0 = cell_coord(std::min(ya, yb), g_) - 1;
        int32_t iy1 = cell_coord(std::max(ya, yb), g_) + 1;
        iy0 = std::max(iy0, 0);
        iy1 = std::min<int32_t>(iy1, g_ - 1);
        for (int32_t iy = iy0; iy <= iy1; ++iy) out.push_back(pack_cell(ix, iy));
    }
}

void UniformGrid::insert(const Segment& s) {
    std::vector<uint64_t> keys;
    cover_cells(s, keys);
    for (uint64_t key : keys) cells_[key].push_back(s);
    ++size_;
}

void UniformGrid::remove(const Segment& s) {
    std::vector<uint64_t> keys;
    cover_cells(s, keys);
    for (uint64_t key : keys) {
        auto it = cells_.find(key);
        if (it == cells_.end()) throw std::runtime_error("UG remove: cell missing");
        auto& segs = it->second;
        auto sit = std::find_if(segs.begin(), segs.end(), [&](const Segment& c) {
            return c.seq == s.seq && c.traj == s.traj;
        });
        if (sit == segs.end()) throw std::runtime_error("UG remove: segment missing");
        *sit = segs.back();
        segs.pop_back();
        if (segs.empty()) cells_.erase(it);
    }
    --size_;
}

std::vector<SearchHit> UniformGrid::knn(Vec2 q, size_t k) const {
    CandidateHeap heap(k);
    std::unordered_set<uint64_t> seen;
    const double w = 1.0 / g_;
    const int32_t qx = cell_coord(q.x, g_), qy = cell_coord(q.y, g_);
    auto visit = [&](int32_t ix, int32_t iy) {
        if (ix < 0 || iy < 0 || ix >= g_ || iy >= g_) return;
        auto it = cells_.find(pack_cell(ix, iy));
        if (it == cells_.end()) return;
        for (const Segment& s : it->second) {
            const uint64_t id = (static_cast<uint64_t>(s.traj) << 40) ^ s.seq;
            if (!seen.insert(id).second) continue;
            heap.offer(s, point_segment_distance(q, s));
        }
    };
    for (int32_t r = 0; r < g_; ++r) {
        if (heap.full() && (r - 1) * w > heap.theta()) break;
        if (r == 0) {
            visit(qx, qy);
            continue;
        }
        for (int32_t ix = qx - r; ix <= qx + r; ++ix) {
            visit(ix, qy - r);
            visit(ix, qy + r);
        }
        for (int32_t iy = qy - r + 1; iy <= qy + r - 1; ++iy) {
            visit(qx - r, iy);
            visit(qx + r, iy);
        }
    }
    return std::move(heap).sorted();
}

}  // namespace trajdp
