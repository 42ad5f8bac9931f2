#include "trajdp/modifier.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <memory>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "trajdp/rng.hpp"

namespace trajdp {
namespace {

// Live segment store behind a search strategy.
class SegIndex {
public:
    virtual ~SegIndex() = default;
    virtual void insert(const Segment& s) = 0;
    virtual void remove(const Segment& s) = 0;
    virtual SearchHit nearest(Vec2 q) = 0;
    virtual void ascending(Vec2 q, const std::function<bool(const Segment&, double)>& f) = 0;
};

class LinearIndex : public SegIndex {
public:
    void insert(const Segment& s) override {
        slot_[s.seq] = segs_.size();
        segs_.push_back(s);
    }
    void remove(const Segment& s) override {
        auto it = slot_.find(s.seq);
        if (it == slot_.end()) throw std::runtime_error("linear remove: segment missing");
        const size_t pos = it->second;
        slot_.erase(it);
        if (pos + 1 != segs_.size()) {
            segs_[pos] = segs_.back();
            slot_[segs_[pos].seq] = pos;
        }
        segs_.pop_back();
    }
    SearchHit nearest(Vec2 q) override { return knn_linear(q, segs_, 1).at(0); }
    void ascending(Vec2 q, const std::function<bool(const Segment&, double)>& f) override {
        std::vector<SearchHit> hits;
        hits.reserve(segs_.size());
        for (const Segment& s : segs_) hits.push_back({s, point_segment_distance(q, s)});
        std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
            return seg_closer(a.d, a.seg, b.d, b.seg);
        });
        for (const SearchHit& h : hits) {
            if (!f(h.seg, h.d)) return;
        }
    }

private:
    std::vector<Segment> segs_;
    std::unordered_map<uint64_t, size_t> slot_;
};

class UGIndex : public SegIndex {
public:
    explicit UGIndex(int g) : ug_(g) {}
    void insert(const Segment& s) override {
        ug_.insert(s);
        mirror_.insert(s);
    }
    void remove(const Segment& s) override {
        ug_.remove(s);
        mirror_.remove(s);
    }
    SearchHit nearest(Vec2 q) override { return ug_.knn(q, 1).at(0); }
    void ascending(Vec2 q, const std::function<bool(const Segment&, double)>& f) override {
        mirror_.ascending(q, f);
    }

private:
    UniformGrid ug_;
    LinearIndex mirror_;
};

class HGIndex : public SegIndex {
public:
    HGIndex(int levels, Strategy s) : hg_(levels), strategy_(s) {}
    void insert(const Segment& s) override { hg_.insert(s); }
    void remove(const Segment& s) override { hg_.remove(s); }
    SearchHit nearest(Vec2 q) override {
        switch (strategy_) {
            case Strategy::HGTopDown:
                return hg_.knn_topdown(q, 1).at(0);
            case Strategy::HGBottomUp:
                return hg_.knn_bottomup(q, 1).at(0);
            default:
                return hg_.knn_bud(q, 1).at(0);
        }
    }
    void ascending(Vec2 q, const std::function<bool(const Segment&, double)>& f) override {
        hg_.for_each_ascending(q, f);
    }

private:
    HierarchicalGrid hg_;
    Strategy strategy_;
};

std::unique_ptr<SegIndex> make_index(Strategy s, int granularity) {
    if (!std::has_single_bit(static_cast<unsigned>(granularity))) {
        throw std::invalid_argument("granularity must be a power of two");
    }
    switch (s) {
        case Strategy::Linear:
            return std::make_unique<LinearIndex>();
        case Strategy::UG:
            return std::make_unique<UGIndex>(granularity);
        default:
            return std::make_unique<HGIndex>(std::bit_width(static_cast<unsigned>(granularity)), s);
    }
}

struct LocHash {
    size_t operator()(Location loc) const {
        return mix64((static_cast<uint64_t>(static_cast<uint32_t>(loc.cx)) << 32) |
                     static_cast<uint64_t>(static_cast<uint32_t>(loc.cy)));
    }
};

// Doubly linked points in a flat array; erased slots are left as tombstones.
struct Node {
    TrajPoint p;
    uint64_t seg{0};  // seq of the segment starting at this point, 0 if none
    int32_t prev{-1};
    int32_t next{-1};
};

struct SegRec {
    int32_t left{-1};  // -1 once removed
    uint32_t traj{0};
    uint32_t index{0};
};

struct TState {
    std::string oid;
    std::vector<Node> nodes;
    int32_t head{-1};
    int32_t tail{-1};
    size_t count{0};
    std::unordered_map<Location, std::vector<int32_t>, LocHash> occ;
    uint32_t next_index{0};
};

// Linked-point view of one or more trajectories sharing a segment index,
// keeping occurrence lists and location->trajectory postings in sync.
class Editor {
public:
    // track_posting enables the location->trajectories map used by
    // dataset-level edits; per-trajectory runs skip it. Occurrence and
    // posting lists only cover the tracked locations, the ones edits can
    // ever query; nullptr tracks everything.
    Editor(std::vector<Trajectory*> trajs, int g, SegIndex& idx, bool track_posting,
           const std::unordered_set<Location, LocHash>* tracked = nullptr)
        : g_(g), idx_(idx), posting_on_(track_posting), tracked_(tracked),
          states_(trajs.size()) {
        size_t total_points = 0;
        for (const Trajectory* t : trajs) total_points += t->points.size();
        segs_.reserve(total_points + 256);
        for (size_t t = 0; t < trajs.size(); ++t) {
            TState& st = states_[t];
            const auto& pts = trajs[t]->points;
            st.oid = trajs[t]->object_id;
            st.nodes.reserve(pts.size() + 64);
            for (size_t i = 0; i < pts.size(); ++i) {
                st.nodes.push_back({pts[i], 0, static_cast<int32_t>(i) - 1,
                                    i + 1 < pts.size() ? static_cast<int32_t>(i) + 1 : -1});
                if (is_tracked(pts[i].loc)) {
                    st.occ[pts[i].loc].push_back(static_cast<int32_t>(i));
                    if (posting_on_) posting_[pts[i].loc].insert(static_cast<uint32_t>(t));
                }
            }
            st.head = pts.empty() ? -1 : 0;
            st.tail = pts.empty() ? -1 : static_cast<int32_t>(pts.size()) - 1;
            st.count = pts.size();
            st.next_index = static_cast<uint32_t>(pts.size());
            for (size_t i = 0; i + 1 < pts.size(); ++i) {
                add_segment(static_cast<uint32_t>(t), static_cast<int32_t>(i));
            }
        }
    }

    size_t num_trajs() const { return states_.size(); }
    size_t num_points(uint32_t t) const { return states_[t].count; }
    Location front_loc(uint32_t t) const { return states_[t].nodes[states_[t].head].p.loc; }

    bool contains(uint32_t t, Location q) const {
        const auto& occ = states_[t].occ;
        auto it = occ.find(q);
        return it != occ.end() && !it->second.empty();
    }
    const std::set<uint32_t>* posting(Location q) const {
        auto it = posting_.find(q);
        return it == posting_.end() ? nullptr : &it->second;
    }

    Trajectory materialize(uint32_t t) const {
        const TState& st = states_[t];
        Trajectory out;
        out.object_id = st.oid;
        out.points.reserve(st.count);
        for (int32_t n = st.head; n != -1; n = st.nodes[n].next) out.points.push_back(st.nodes[n].p);
        return out;
    }

    size_t position_of(uint32_t t, int32_t node) const {
        const TState& st = states_[t];
        size_t pos = 0;
        for (int32_t n = st.head; n != node; n = st.nodes[n].next) ++pos;
        return pos;
    }

    // Smallest-loss occurrence of q; the earliest-recorded wins ties.
    std::pair<int32_t, double> min_delete(uint32_t t, Location q) {
        const auto& vec = states_[t].occ.at(q);
        int32_t best = vec.front();
        double best_loss = delete_loss(t, best);
        for (size_t i = 1; i < vec.size(); ++i) {
            const double l = delete_loss(t, vec[i]);
            if (l < best_loss) {
                best = vec[i];
                best_loss = l;
            }
        }
        return {best, best_loss};
    }

    double delete_loss(uint32_t t, int32_t node) const {
        const TState& st = states_[t];
        const Node& n = st.nodes[node];
        const Vec2 q = cell_center(n.p.loc, g_);
        if (n.prev == -1 && n.next == -1) return 0.0;
        if (n.prev == -1) return dist(q, cell_center(st.nodes[n.next].p.loc, g_));
        if (n.next == -1) return dist(q, cell_center(st.nodes[n.prev].p.loc, g_));
        return point_segment_distance(q, cell_center(st.nodes[n.prev].p.loc, g_),
                                      cell_center(st.nodes[n.next].p.loc, g_));
    }

    void delete_at(uint32_t t, int32_t node) {
        TState& st = states_[t];
        const Node n = st.nodes[node];
        if (n.prev != -1) remove_segment(t, st.nodes[n.prev].seg);
        if (n.next != -1) remove_segment(t, n.seg);
        if (is_tracked(n.p.loc)) {
            auto& vec = st.occ.at(n.p.loc);
            vec.erase(std::find(vec.begin(), vec.end(), node));
            if (vec.empty() && posting_on_) {
                posting_.at(n.p.loc).erase(t);
                if (posting_.at(n.p.loc).empty()) posting_.erase(n.p.loc);
            }
        }
        if (n.prev != -1) st.nodes[n.prev].next = n.next;
        if (n.next != -1) st.nodes[n.next].prev = n.prev;
        if (st.head == node) st.head = n.next;
        if (st.tail == node) st.tail = n.prev;
        --st.count;
        if (n.prev != -1 && n.next != -1) add_segment(t, n.prev);
    }

    void insert_after_segment(uint32_t t, uint64_t seq, Location q) {
        TState& st = states_[t];
        const int32_t left = segs_[seq - 1].left;
        const int32_t right = st.nodes[left].next;
        remove_segment(t, seq);
        const double tm = 0.5 * (st.nodes[left].p.t + st.nodes[right].p.t);
        const int32_t node = static_cast<int32_t>(st.nodes.size());
        st.nodes.push_back({{q, tm}, 0, left, right});
        st.nodes[left].next = node;
        st.nodes[right].prev = node;
        ++st.count;
        add_segment(t, left);
        add_segment(t, node);
        record_point(t, q, node);
    }

    // Degenerate hosts: an empty trajectory gets a first point at t=0, a
    // single-point trajectory gets q appended after it.
    double insert_append(uint32_t t, Location q) {
        TState& st = states_[t];
        const int32_t node = static_cast<int32_t>(st.nodes.size());
        if (st.count == 0) {
            st.nodes.push_back({{q, 0.0}, 0, -1, -1});
            st.head = st.tail = node;
            st.count = 1;
            record_point(t, q, node);
            return 0.0;
        }
        const int32_t last = st.tail;
        const double loss = dist(cell_center(q, g_), cell_center(st.nodes[last].p.loc, g_));
        st.nodes.push_back({{q, st.nodes[last].p.t}, 0, last, -1});
        st.nodes[last].next = node;
        st.tail = node;
        ++st.count;
        record_point(t, q, node);
        add_segment(t, last);
        return loss;
    }

    int32_t seg_left(uint64_t seq) const { return segs_[seq - 1].left; }
    int32_t head(uint32_t t) const { return states_[t].head; }
    int32_t next_node(uint32_t t, int32_t node) const { return states_[t].nodes[node].next; }
    Location loc_of(uint32_t t, int32_t node) const { return states_[t].nodes[node].p.loc; }

private:
    bool is_tracked(Location q) const { return tracked_ == nullptr || tracked_->count(q) > 0; }

    void record_point(uint32_t t, Location q, int32_t node) {
        if (!is_tracked(q)) return;
        states_[t].occ[q].push_back(node);
        if (posting_on_) posting_[q].insert(t);
    }

    Segment segment_from(uint32_t t, int32_t left, uint32_t index, uint64_t seq) const {
        const TState& st = states_[t];
        return {cell_center(st.nodes[left].p.loc, g_),
                cell_center(st.nodes[st.nodes[left].next].p.loc, g_), t, index, seq};
    }

    void add_segment(uint32_t t, int32_t left) {
        TState& st = states_[t];
        const uint64_t seq = segs_.size() + 1;
        const uint32_t index = st.next_index++;
        st.nodes[left].seg = seq;
        segs_.push_back({left, t, index});
        idx_.insert(segment_from(t, left, index, seq));
    }

    void remove_segment(uint32_t t, uint64_t seq) {
        SegRec& rec = segs_[seq - 1];
        idx_.remove(segment_from(t, rec.left, rec.index, seq));
        states_[t].nodes[rec.left].seg = 0;
        rec.left = -1;
    }

    int g_;
    SegIndex& idx_;
    bool posting_on_;
    const std::unordered_set<Location, LocHash>* tracked_;
    std::vector<TState> states_;
    std::vector<SegRec> segs_;
    std::map<Location, std::set<uint32_t>> posting_;
};

}  // namespace

ModifyResult intra_modify(Trajectory& traj, uint32_t traj_id, const PerturbedPF& pf,
                          int granularity, Strategy strategy, StepObserver* observer) {
    auto idx = make_index(strategy, granularity);
    std::unordered_set<Location, LocHash> tracked;
    tracked.reserve(pf.entries.size());
    for (const PFEntry& entry : pf.entries) tracked.insert(entry.loc);
    Editor ed({&traj}, granularity, *idx, false, &tracked);
    ModifyResult res;
    for (const PFEntry& entry : pf.entries) {
        const Location q = entry.loc;
        const Vec2 qc = cell_center(q, granularity);
        int delta = entry.f_star - entry.f;
        for (; delta > 0; --delta) {
            Trajectory before;
            if (observer) before = ed.materialize(0);
            double loss;
            size_t pos = 0;
            if (ed.num_points(0) >= 2) {
                const SearchHit hit = idx->nearest(qc);
                ++res.searches;
                loss = hit.d;
                if (observer) pos = ed.position_of(0, ed.seg_left(hit.seg.seq));
                ed.insert_after_segment(0, hit.seg.seq, q);
            } else {
                loss = ed.insert_append(0, q);
            }
            res.loss += loss;
            ++res.insertions;
            if (observer) observer->on_edit(traj_id, before, {EditKind::Insert, q, traj_id, pos, loss});
        }
        for (; delta < 0; ++delta) {
            Trajectory before;
            if (observer) before = ed.materialize(0);
            const auto [node, loss] = ed.min_delete(0, q);
            const size_t pos = observer ? ed.position_of(0, node) : 0;
            ed.delete_at(0, node);
            res.loss += loss;
            ++res.deletions;
            if (observer) observer->on_edit(traj_id, before, {EditKind::Delete, q, traj_id, pos, loss});
        }
    }
    traj = ed.materialize(0);
    return res;
}

ModifyResult inter_modify(std::vector<Trajectory>& dataset, const PerturbedTF& tf,
                          int granularity, Strategy strategy, StepObserver* observer) {
    auto idx = make_index(strategy, granularity);
    std::vector<Trajectory*> ptrs;
    ptrs.reserve(dataset.size());
    for (Trajectory& t : dataset) ptrs.push_back(&t);
    std::unordered_set<Location, LocHash> tracked;
    tracked.reserve(tf.entries.size());
    for (const auto& [q, counts] : tf.entries) tracked.insert(q);
    Editor ed(std::move(ptrs), granularity, *idx, true, &tracked);
    ModifyResult res;

    // decreases first, so insertions search a smaller index
    for (const auto& [q, counts] : tf.entries) {
        const int delta = counts.first - counts.second;
        for (int j = 0; j < delta; ++j) {
            const std::set<uint32_t>* hosts = ed.posting(q);
            if (!hosts || hosts->empty()) {
                res.clamps.push_back({0, q, delta, j, true});
                break;
            }
            uint32_t best_t = 0;
            double best_loss = std::numeric_limits<double>::infinity();
            for (uint32_t t : *hosts) {
                const double l = complete_deletion_loss(q, ed.materialize(t), granularity);
                if (l < best_loss) {
                    best_loss = l;
                    best_t = t;
                }
            }
            // remove every occurrence front to back
            for (int32_t node = ed.head(best_t); node != -1;) {
                const int32_t nx = ed.next_node(best_t, node);
                if (ed.loc_of(best_t, node) == q) {
                    Trajectory before;
                    if (observer) before = ed.materialize(best_t);
                    const double loss = ed.delete_loss(best_t, node);
                    const size_t pos = observer ? ed.position_of(best_t, node) : 0;
                    ed.delete_at(best_t, node);
                    res.loss += loss;
                    ++res.deletions;
                    if (observer) {
                        observer->on_edit(best_t, before, {EditKind::Delete, q, best_t, pos, loss});
                    }
                }
                node = nx;
            }
        }
    }

    for (const auto& [q, counts] : tf.entries) {
        const int delta = counts.second - counts.first;
        const Vec2 qc = cell_center(q, granularity);
        for (int j = 0; j < delta; ++j) {
            // cheapest multi-point host lacking q, via ascending enumeration
            bool found_seg = false;
            SearchHit seg_hit{};
            idx->ascending(qc, [&](const Segment& s, double d) {
                if (ed.contains(s.traj, q)) return true;
                seg_hit = {s, d};
                found_seg = true;
                return false;
            });
            ++res.searches;
            // single-point trajectories hold no segments; treat them as
            // append candidates with loss equal to the point distance
            bool found_single = false;
            uint32_t single_t = 0;
            double single_loss = std::numeric_limits<double>::infinity();
            for (uint32_t t = 0; t < ed.num_trajs(); ++t) {
                if (ed.num_points(t) != 1 || ed.contains(t, q)) continue;
                const double l = dist(qc, cell_center(ed.front_loc(t), granularity));
                if (l < single_loss) {
                    single_loss = l;
                    single_t = t;
                    found_single = true;
                }
            }
            if (!found_seg && !found_single) {
                res.clamps.push_back({0, q, delta, j, true});
                break;
            }
            const bool use_single =
                found_single &&
                (!found_seg || single_loss < seg_hit.d ||
                 (single_loss == seg_hit.d && single_t < seg_hit.seg.traj));
            const uint32_t host = use_single ? single_t : seg_hit.seg.traj;
            Trajectory before;
            if (observer) before = ed.materialize(host);
            double loss;
            size_t pos = 0;
            if (use_single) {
                loss = ed.insert_append(host, q);
            } else {
                loss = seg_hit.d;
                if (observer) pos = ed.position_of(host, ed.seg_left(seg_hit.seg.seq));
                ed.insert_after_segment(host, seg_hit.seg.seq, q);
            }
            res.loss += loss;
            ++res.insertions;
            if (observer) observer->on_edit(host, before, {EditKind::Insert, q, host, pos, loss});
        }
    }

    for (size_t t = 0; t < dataset.size(); ++t) {
        dataset[t] = ed.materialize(static_cast<uint32_t>(t));
    }
    return res;
}

}  // namespace trajdp
