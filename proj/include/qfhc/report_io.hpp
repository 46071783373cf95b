#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfhc/constructor.hpp"
#include "qfhc/criterion.hpp"
#include "qfhc/density.hpp"

namespace qfhc {

using Json = nlohmann::ordered_json;

Json to_json(const CoeffVector& v);
Json to_json(const SpaceSpec& s);
Json to_json(const WeightSeq& w);
Json to_json(const SeriesProbe& p);
Json to_json(const Verdict& v);
Json to_json(const CriterionReport& r);
Json to_json(const SalasReport& r);
Json to_json(const DensityEstimate& d, bool with_profile = false);
Json to_json(const GrowthBound& g);
Json to_json(const JSetFamily& f, bool with_classes = false);
Json to_json(const JSetReport& r);
Json to_json(const NkSelection& s);
Json to_json(const ConstructionPlan& p);
Json to_json(const OrbitBoundReport& r, bool with_checks = false);
// Summary only; the times go to hit_set_csv.
Json to_json(const HitResult& h);

// "m,partial,block"
std::string checkpoints_csv(const SeriesProbe& p);
// "n"
std::string hit_set_csv(const HitSet& h);
// "k,m,exponent,distance,bound,edge,ok"
std::string orbit_bound_csv(const OrbitBoundReport& r);
// One {"n","exponent","distance","hit"} object per line.
std::string orbit_jsonl(const std::vector<OrbitEvent>& events);

// Shortest text that reads back to the same double.
std::string format_double(double x);

// Writes through a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qfhc
