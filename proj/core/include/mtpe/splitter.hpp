#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mtpe/corpus.hpp"

namespace mtpe {

// SplitMix64 step; used to derive per-bucket substream seeds and run ids.
std::uint64_t splitmix64(std::uint64_t x);

// Uniform draw in [0, n) from raw mt19937_64 output via rejection
// sampling. mt19937_64 output is pinned by the standard, so splits are
// reproducible across platforms (std::uniform_int_distribution is not).
std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t n);

// Seeded Fisher-Yates over ids.
void deterministic_shuffle(std::vector<std::string>& ids, std::uint64_t seed);

struct BucketAudit {
    int bucket = 0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
};

struct DatasetSplit {
    double ratio = 0.9;  // train fraction
    std::uint64_t seed = 0;
    std::vector<LengthBucket> buckets;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<BucketAudit> bucket_audit;
};

// Length-stratified partition: within each bucket, ids are sorted,
// shuffled with a seed-derived substream, and the first
// round-half-up((1-ratio)*|bucket|) go to test. Deterministic in
// (segments, ratio, seed, buckets).
DatasetSplit stratified_split(const std::vector<LabeledSegment>& segments, double ratio,
                              std::uint64_t seed, const std::vector<LengthBucket>& buckets);

struct BucketShare {
    int bucket = 0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    double test_share = 0.0;  // test_count / bucket total
    bool flagged = false;     // |test_count - expected| > 1
};

// Recounts the split against the corpus; flags buckets whose test count
// strays more than one segment from round-half-up((1-ratio)*|bucket|).
std::vector<BucketShare> verify_distribution(const DatasetSplit& split,
                                             const std::vector<LabeledSegment>& segments,
                                             const std::vector<LengthBucket>& buckets);

struct SubsamplePlan {
    std::vector<std::size_t> sizes;  // strictly ascending
    std::uint64_t seed = 0;
};

struct Subsample {
    std::size_t size = 0;
    std::vector<std::string> train_ids;
};

// Nested, bucket-proportional training subsets: every smaller set is a
// subset of every larger one; the test set is untouched.
std::vector<Subsample> subsample_train(const DatasetSplit& split, const SubsamplePlan& plan,
                                       const std::vector<LabeledSegment>& segments);

std::string split_to_json(const DatasetSplit& split);
DatasetSplit split_from_json(const std::string& text);
void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

}  // namespace mtpe
