#include <doctest.h>

#include <algorithm>
#include <set>

#include "trajdp/signature.hpp"

using namespace trajdp;

namespace {

const Location A{1, 1}, B{2, 2}, C{3, 3}, D{4, 4}, E{5, 5};

Trajectory make(std::vector<Location> locs) {
    Trajectory t;
    double ts = 0.0;
    for (Location l : locs) t.points.push_back({l, ts++});
    return t;
}

// three trajectories with hand-computed weights
std::vector<Trajectory> toy() {
    return {make({A, B, A, C}), make({A, D}), make({E, D})};
}

}  // namespace

TEST_CASE("pf counts occurrences, tf counts trajectories") {
    const auto dataset = toy();
    const PFCounts pf = compute_pf(dataset[0]);
    CHECK(pf.at(A) == 2);
    CHECK(pf.at(B) == 1);
    CHECK(pf.size() == 3);

    const TFDistribution tf = compute_tf(dataset);
    CHECK(tf.at(A) == 2);  // repeats inside one trajectory count once
    CHECK(tf.at(B) == 1);
    CHECK(tf.at(D) == 2);
    CHECK(tf.at({9, 9}) == 0);
}

TEST_CASE("weights and rank order with frozen values") {
    const auto dataset = toy();
    const TFDistribution tf = compute_tf(dataset);

    const auto r0 = weigh_and_rank(compute_pf(dataset[0]), tf, 4, 3);
    REQUIRE(r0.size() == 3);
    // B and C tie at (1/4)ln(3); ascending location breaks it
    CHECK(r0[0].loc == B);
    CHECK(r0[0].weight == doctest::Approx(0.27465307216702745));
    CHECK(r0[1].loc == C);
    CHECK(r0[2].loc == A);
    CHECK(r0[2].weight == doctest::Approx(0.2027325540540822));  // (2/4)ln(3/2)

    const auto r2 = weigh_and_rank(compute_pf(dataset[2]), tf, 2, 3);
    CHECK(r2[0].loc == E);
    CHECK(r2[0].weight == doctest::Approx(0.5493061443340549));  // (1/2)ln(3)
    CHECK(r2[1].loc == D);
}

TEST_CASE("equal weight ties fall back to pf then location") {
    // same weight via pf/len * ln ratio: pf 2 of 4 vs pf 1 of 2, same tf
    TFDistribution tf;
    tf.counts[{0, 0}] = 1;
    tf.counts[{5, 0}] = 1;
    PFCounts pf;
    pf[{0, 0}] = 2;
    pf[{5, 0}] = 2;
    const auto r = weigh_and_rank(pf, tf, 4, 3);
    CHECK(r[0].loc == Location{0, 0});  // weights and pf equal, location decides
    pf[{5, 0}] = 4;
    tf.counts[{5, 0}] = 3;
    const auto r2 = weigh_and_rank(pf, tf, 8, 9);  // (2/8)ln9 == (4/8)ln3
    CHECK(r2[0].loc == Location{5, 0});  // same weight, higher pf wins
    CHECK(r2[0].weight == doctest::Approx(r2[1].weight));
}

TEST_CASE("extract_signatures pools top-m into the candidate set") {
    const auto dataset = toy();
    const SignatureResult sig = extract_signatures(dataset, 2);
    CHECK(sig.signatures.m == 2);
    REQUIRE(sig.signatures.ranked.size() == 3);
    CHECK(sig.candidates.points == std::set<Location>{A, B, C, D, E});

    const SignatureResult sig1 = extract_signatures(dataset, 1);
    CHECK(sig1.candidates.points == std::set<Location>{B, A, E});
}

TEST_CASE("point list keeps top-m plus candidates, stops at 2m") {
    const auto dataset = toy();
    const SignatureResult sig = extract_signatures(dataset, 2);
    Rng rng(1);
    const auto list = select_point_list(sig.signatures.ranked[0], sig.candidates.points.size() > 0
                                            ? sig.candidates
                                            : CandidateSet{},
                                        2, rng);
    // all three ranked points qualify (top-2 plus candidate A), no fill needed
    CHECK(list == std::vector<Location>{B, C, A});
}

TEST_CASE("point list fills randomly from excluded points") {
    std::vector<WeightedPoint> ranked;
    for (int i = 0; i < 6; ++i) ranked.push_back({{i, 0}, 1, 6.0 - i});
    CandidateSet cands;
    cands.points = {{0, 0}, {1, 0}};
    Rng rng(99);
    const auto list = select_point_list(ranked, cands, 2, rng);
    REQUIRE(list.size() == 4);
    CHECK(list[0] == Location{0, 0});
    CHECK(list[1] == Location{1, 0});
    std::set<Location> fill{list[2], list[3]};
    CHECK(fill.size() == 2);
    for (Location l : fill) CHECK((l.cx >= 2 && l.cx <= 5));

    Rng rng2(99);
    CHECK(select_point_list(ranked, cands, 2, rng2) == list);  // seed-reproducible
}

TEST_CASE("point list never exceeds 2m") {
    std::vector<WeightedPoint> ranked;
    CandidateSet cands;
    for (int i = 0; i < 30; ++i) {
        ranked.push_back({{i, 0}, 1, 30.0 - i});
        cands.points.insert({i, 0});
    }
    Rng rng(5);
    const auto list = select_point_list(ranked, cands, 3, rng);
    REQUIRE(list.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(list[i] == Location{i, 0});  // walk order
}
