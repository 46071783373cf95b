#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfhc/report_io.hpp"

namespace qfhc::cli {

// Raised for malformed or invalid configs; what() carries "line L: ...".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VectorSpec {
  // (index, re, im) triples
  std::vector<std::tuple<Index, double, double>> entries;
  bool operator==(const VectorSpec&) const = default;
  CoeffVector build() const;
};

struct WeightConfig {
  std::string family = "bergman";  // constant|bergman|log|root|tmu|table|bilateral_table
  Scalar lambda = 2.0;
  Scalar mu = 1.0;
  int p = 1;
  std::vector<Scalar> values;
  Scalar fallback = 1.0;
  std::vector<std::tuple<Index, double, double>> bilateral;
  Scalar positive = 2.0;
  Scalar nonpositive = 0.5;
  bool operator==(const WeightConfig&) const = default;
  WeightSeq build() const;
};

struct SpaceConfig {
  std::string kind = "lp";  // lp|c0|entire|linf_weakstar
  double p = 2.0;
  int rmax = 8;
  std::string domain = "unilateral";
  bool operator==(const SpaceConfig&) const = default;
  SpaceSpec build() const;
};

struct Config {
  std::string scenario = "criterion";
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::string out = "qfhc_out";
  int q = 1;
  Index horizon = 10000;
  double tol = 1e-8;
  double divergence_threshold = 1e6;
  int max_exp = 20;
  SpaceConfig space;
  WeightConfig weights;

  struct Criterion {
    std::string check = "qfhc";  // qfhc|unilateral|bilateral|weakstar|hc|salas|tmu
    std::vector<Index> indices = {1, 2, 3, 4, 5};
    Index kmax = 5;
    bool operator==(const Criterion&) const = default;
  } criterion;

  struct Construct {
    int canonical = 3;  // used when vectors is empty
    std::vector<VectorSpec> vectors;
    std::vector<double> epsilon;  // empty = 2^{-k}
    std::uint64_t support_cap = 5'000'000;
    Index scan_limit = Index{1} << 20;
    bool operator==(const Construct&) const = default;
  } construct;

  struct Density {
    std::vector<Index> times;
    std::string hits_file;
    Index burn_in = 0;  // 0 = default
    bool operator==(const Density&) const = default;
  } density;

  struct JSets {
    std::vector<Index> nseq = {10, 20, 30, 40, 50, 60, 70, 80};
    bool operator==(const JSets&) const = default;
  } jsets;

  struct Orbit {
    std::string source = "construct";  // construct|vector
    VectorSpec x;
    std::string target = "ball";  // ball|modulus|modulus_ball
    int target_index = 1;         // which constructed x_k is the center
    VectorSpec center;            // used when non-empty
    double radius = 0.5;
    Index coordinate = 1;
    std::string mode = "linear";  // linear|powers
    Scalar rotation = 1.0;
    int power = 1;
    bool log_events = true;
    bool operator==(const Orbit&) const = default;
  } orbit;

  struct WeakStar {
    int functionals = 3;
    double eps = 0.5;
    int targets = 1;  // first n constructed targets
    bool operator==(const WeakStar&) const = default;
  } weakstar;

  struct Sweep {
    std::string family = "root";
    std::vector<int> p = {1, 2, 3};
    std::vector<Scalar> lambda;
    std::vector<Scalar> mu;
    std::vector<int> q = {1, 2, 3, 4, 5};
    std::string check = "unilateral";
    std::vector<Index> indices = {0, 1, 2, 3, 4};
    std::uint64_t max_points = 4096;
    bool operator==(const Sweep&) const = default;
  } sweep;

  bool operator==(const Config&) const = default;
};

// Strict parse: unknown keys and wrong types are errors.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
Json to_json(const Config& c);
void validate(const Config& c);

// Runs the scenario, writing artifacts under c.out and a summary to `log`.
// Returns 0 on completion, 2 when refused or violations were found.
int run(const Config& c, std::ostream& log);

}  // namespace qfhc::cli
