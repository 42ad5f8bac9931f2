#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trajdp/geo.hpp"

namespace trajdp {

struct ReadResult {
    std::vector<RawSample> samples;
    size_t malformed{0};
};

// Parses `obj_id,timestamp,lon,lat` CSV; malformed rows are counted and
// skipped. Throws on unreadable file or bad header.
ReadResult read_samples(const std::string& path);

struct IngestStats {
    size_t rejected{0};       // outside the bounding box
    size_t out_of_order{0};   // objects whose samples needed re-sorting
};

// Groups samples per object (ascending object id), time-sorts, normalizes
// into the box and snaps to grid cells.
std::vector<Trajectory> build_dataset(const std::vector<RawSample>& samples, const BBox& bbox,
                                      int granularity, IngestStats* stats = nullptr);

BBox compute_bbox(const std::vector<RawSample>& samples);

// Writes cell centers mapped back through the box; timestamps keep full
// precision so the file round-trips through build_dataset exactly.
void write_dataset(const std::string& path, const std::vector<Trajectory>& dataset,
                   const BBox& bbox, int granularity);

// Synthetic corpus: every object walks a shared ring whose extremes pin the
// bounding box, with busy sub-arcs repeated for stable frequent pairs, a set
// of listed ring cells skipped by every tenth object (giving them small
// positive signature weight), and one unique interior cell per object
// visited several times (its planted signature).
std::vector<Trajectory> generate_corpus(size_t objects, size_t avg_len, uint64_t seed,
                                        int granularity);

}  // namespace trajdp
