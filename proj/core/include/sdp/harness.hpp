#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdp/domain.hpp"
#include "sdp/rangequery.hpp"

namespace sdp {

enum class Protocol { kHad, kCM, kRR, kRappor, kRange };

Protocol protocol_from_string(const std::string& name);
std::string protocol_name(Protocol p);

struct DataSpec {
  enum class Kind { kUniform, kZipf, kPointMass, kFile };
  Kind kind = Kind::kUniform;
  double zipf_a = 1.0;
  DomainElement point = 1;
  std::string path;

  // "uniform" | "zipf(a)" | "point-mass(j)" | "file:path"
  static DataSpec parse(const std::string& text);
  std::string to_string() const;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::kHad;
  std::uint64_t n = 100;
  std::uint64_t domain_size = 16;  // B (per dimension for range)
  std::uint32_t dims = 1;
  std::uint32_t k = 1;
  double eps = 1.0;
  double delta = 1e-6;
  double beta = 0.2;
  std::uint64_t seed = 1;
  std::uint64_t public_seed = 1;
  DataSpec data;
  std::uint32_t trials = 20;
  bool one_sided = false;
  bool noiseless = false;
  bool strict_paper = false;
  RangeFO range_fo = RangeFO::kCountMin;
  std::uint32_t range_queries = 50;
  std::string query_file;
  double c_amp = 1.0;
  double c_util = 1.0;
  std::string dump_messages_path;  // hadamard wire dump, trial 0
  std::string per_query_path;      // query,estimate,truth,abs_error CSV
  std::string dump_sketch_path;    // count-min sketch dump, trial 0
};

struct TrialStats {
  std::uint32_t trial = 0;
  double max_error = 0.0;
  double mean_error = 0.0;
  double messages_per_user = 0.0;
  double bits_per_user = 0.0;
  bool within_bound = true;
  double wall_ms = 0.0;
};

struct ExperimentReport {
  std::string schema_version = "sdp-report-1";
  ExperimentConfig config;
  double error_bound = 0.0;  // per-protocol accuracy bound, 0 when n/a
  std::vector<TrialStats> trials;
  double median_max_error = 0.0;
  double mean_max_error = 0.0;
  double max_max_error = 0.0;
  double bound_hold_rate = 1.0;
};

// Synthetic or file-backed data; deterministic given the seed. Uniform
// and zipf draw k distinct elements per user; zipf uses inverse-CDF over
// [B] with exponent a.
Dataset generate_data(const DataSpec& spec, std::uint64_t n,
                      std::uint64_t domain_size, std::uint32_t k,
                      std::uint64_t seed);

std::vector<std::vector<DomainElement>> generate_points(
    const DataSpec& spec, std::uint64_t n, std::uint64_t per_dim_size,
    std::uint32_t dims, std::uint64_t seed);

// Query workload: from the config's query file ("lo1,hi1;lo2,hi2;..."
// per line) or random boxes derived from the trial seed.
std::vector<RangeQuery> load_query_file(const std::string& path,
                                        std::uint64_t per_dim_size,
                                        std::uint32_t dims);

// randomize -> shuffle -> analyze, trials times, with derived per-trial
// seeds; reports max/mean error against the exact histogram (or exact
// range counts) and exact message accounting.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string report_to_json(const ExperimentReport& report,
                           bool mask_timing = false);
std::string report_to_csv(const ExperimentReport& report,
                          bool mask_timing = false);

// Writes the report in "json" or "csv" format. I/O failures surface as
// FormatError.
void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& path);

}  // namespace sdp
