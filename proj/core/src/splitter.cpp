#include "mtpe/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mtpe/errors.hpp"

namespace mtpe {

using ordered_json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t n) {
    if (n == 0) throw ValidationError("bounded_rand: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t v = gen();
    while (v < threshold) v = gen();
    return v % n;
}

void deterministic_shuffle(std::vector<std::string>& ids, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_rand(gen, i));
        std::swap(ids[i - 1], ids[j]);
    }
}

namespace {

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::uint64_t bucket_seed(std::uint64_t seed, int bucket_index) {
    return splitmix64(seed + static_cast<std::uint64_t>(bucket_index) + 1);
}

// id lists per bucket, sorted ascending, with duplicate detection
std::map<int, std::vector<std::string>> group_by_bucket(
    const std::vector<LabeledSegment>& segments) {
    std::map<int, std::vector<std::string>> grouped;
    std::unordered_set<std::string> seen;
    for (const auto& seg : segments) {
        if (!seen.insert(seg.unit.id).second)
            throw ValidationError("duplicate id '" + seg.unit.id + "' in corpus");
        grouped[seg.length_bucket].push_back(seg.unit.id);
    }
    for (auto& [bucket, ids] : grouped) std::sort(ids.begin(), ids.end());
    return grouped;
}

}  // namespace

DatasetSplit stratified_split(const std::vector<LabeledSegment>& segments, double ratio,
                              std::uint64_t seed, const std::vector<LengthBucket>& buckets) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ValidationError("split ratio must be in (0, 1)");
    if (segments.empty()) throw ValidationError("cannot split an empty corpus");
    validate_buckets(buckets);

    DatasetSplit split;
    split.ratio = ratio;
    split.seed = seed;
    split.buckets = buckets;

    auto grouped = group_by_bucket(segments);
    for (auto& [bucket, ids] : grouped) {
        deterministic_shuffle(ids, bucket_seed(seed, bucket));
        const std::size_t n_test =
            round_half_up((1.0 - ratio) * static_cast<double>(ids.size()));
        BucketAudit audit;
        audit.bucket = bucket;
        audit.test_count = n_test;
        audit.train_count = ids.size() - n_test;
        split.bucket_audit.push_back(audit);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i < n_test)
                split.test_ids.push_back(std::move(ids[i]));
            else
                split.train_ids.push_back(std::move(ids[i]));
        }
    }
    return split;
}

std::vector<BucketShare> verify_distribution(const DatasetSplit& split,
                                             const std::vector<LabeledSegment>& segments,
                                             const std::vector<LengthBucket>& buckets) {
    std::unordered_map<std::string, int> bucket_of;
    for (const auto& seg : segments) bucket_of[seg.unit.id] = seg.length_bucket;

    std::map<int, BucketShare> shares;
    for (const auto& b : buckets) shares[b.index].bucket = b.index;

    auto tally = [&](const std::vector<std::string>& ids, bool is_test) {
        for (const auto& id : ids) {
            auto it = bucket_of.find(id);
            if (it == bucket_of.end())
                throw ValidationError("split refers to unknown id '" + id + "'");
            auto& share = shares[it->second];
            if (is_test)
                ++share.test_count;
            else
                ++share.train_count;
        }
    };
    tally(split.train_ids, false);
    tally(split.test_ids, true);

    std::vector<BucketShare> out;
    for (auto& [bucket, share] : shares) {
        const std::size_t total = share.train_count + share.test_count;
        if (total > 0) {
            share.test_share = static_cast<double>(share.test_count) / total;
            const auto expected =
                static_cast<long long>(std::floor((1.0 - split.ratio) * total + 0.5));
            const auto actual = static_cast<long long>(share.test_count);
            share.flagged = std::llabs(actual - expected) > 1;
        }
        out.push_back(share);
    }
    return out;
}

std::vector<Subsample> subsample_train(const DatasetSplit& split, const SubsamplePlan& plan,
                                       const std::vector<LabeledSegment>& segments) {
    if (plan.sizes.empty()) throw ValidationError("subsample plan has no sizes");
    for (std::size_t i = 1; i < plan.sizes.size(); ++i)
        if (plan.sizes[i] <= plan.sizes[i - 1])
            throw ValidationError("subsample sizes must be strictly ascending");
    if (plan.sizes.back() > split.train_ids.size())
        throw ValidationError("subsample size " + std::to_string(plan.sizes.back()) +
                              " exceeds train size " + std::to_string(split.train_ids.size()));

    std::unordered_map<std::string, int> bucket_of;
    for (const auto& seg : segments) bucket_of[seg.unit.id] = seg.length_bucket;

    std::map<int, std::vector<std::string>> per_bucket;
    for (const auto& id : split.train_ids) {
        auto it = bucket_of.find(id);
        if (it == bucket_of.end())
            throw ValidationError("split refers to unknown id '" + id + "'");
        per_bucket[it->second].push_back(id);
    }
    for (auto& [bucket, ids] : per_bucket) {
        std::sort(ids.begin(), ids.end());
        deterministic_shuffle(ids, bucket_seed(plan.seed, bucket));
    }

    // One deterministic priority sequence; each subsample is a prefix, so
    // nestedness is structural. At every step the bucket with the largest
    // quota deficit (proportional share minus drawn count) emits its next id.
    const double total = static_cast<double>(split.train_ids.size());
    struct BucketState {
        int bucket;
        const std::vector<std::string>* ids;
        std::size_t next = 0;
        double share = 0.0;
    };
    std::vector<BucketState> states;
    for (const auto& [bucket, ids] : per_bucket)
        states.push_back({bucket, &ids, 0, static_cast<double>(ids.size()) / total});

    std::vector<std::string> sequence;
    sequence.reserve(split.train_ids.size());
    for (std::size_t step = 1; sequence.size() < split.train_ids.size(); ++step) {
        BucketState* best = nullptr;
        double best_deficit = -std::numeric_limits<double>::infinity();
        for (auto& st : states) {
            if (st.next >= st.ids->size()) continue;
            const double deficit =
                st.share * static_cast<double>(step) - static_cast<double>(st.next);
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = &st;
            }
        }
        sequence.push_back((*best->ids)[best->next++]);
    }

    std::vector<Subsample> out;
    for (std::size_t size : plan.sizes) {
        Subsample sub;
        sub.size = size;
        sub.train_ids.assign(sequence.begin(),
                             sequence.begin() + static_cast<std::ptrdiff_t>(size));
        out.push_back(std::move(sub));
    }
    return out;
}

std::string split_to_json(const DatasetSplit& split) {
    ordered_json doc;
    doc["ratio"] = split.ratio;
    doc["seed"] = split.seed;
    doc["buckets"] = ordered_json::array();
    for (const auto& b : split.buckets) {
        ordered_json jb;
        jb["index"] = b.index;
        jb["lower"] = b.lower;
        if (b.upper)
            jb["upper"] = *b.upper;
        else
            jb["upper"] = nullptr;
        doc["buckets"].push_back(std::move(jb));
    }
    doc["train_ids"] = split.train_ids;
    doc["test_ids"] = split.test_ids;
    doc["bucket_audit"] = ordered_json::array();
    for (const auto& a : split.bucket_audit) {
        ordered_json ja;
        ja["bucket"] = a.bucket;
        ja["train_count"] = a.train_count;
        ja["test_count"] = a.test_count;
        doc["bucket_audit"].push_back(std::move(ja));
    }
    return doc.dump(2) + "\n";
}

DatasetSplit split_from_json(const std::string& text) {
    ordered_json doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object())
        throw ValidationError("split file is not valid JSON");
    DatasetSplit split;
    try {
        split.ratio = doc.at("ratio").get<double>();
        split.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& jb : doc.at("buckets")) {
            LengthBucket b;
            b.index = jb.at("index").get<int>();
            b.lower = jb.at("lower").get<int>();
            if (!jb.at("upper").is_null()) b.upper = jb.at("upper").get<int>();
            split.buckets.push_back(b);
        }
        split.train_ids = doc.at("train_ids").get<std::vector<std::string>>();
        split.test_ids = doc.at("test_ids").get<std::vector<std::string>>();
        if (doc.contains("bucket_audit")) {
            for (const auto& ja : doc["bucket_audit"]) {
                BucketAudit a;
                a.bucket = ja.at("bucket").get<int>();
                a.train_count = ja.at("train_count").get<std::size_t>();
                a.test_count = ja.at("test_count").get<std::size_t>();
                split.bucket_audit.push_back(a);
            }
        }
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("split file schema error: ") + e.what());
    }
    return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << split_to_json(split);
}

DatasetSplit load_split(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return split_from_json(buf.str());
}

}  // namespace mtpe
