// sdp: simulator for shuffled-model private frequency estimation, range
// counting, heavy hitters and quantile M-estimation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdp/applications.hpp"
#include "sdp/error.hpp"
#include "sdp/harness.hpp"
#include "sdp/privacy.hpp"

namespace {

struct CommonFlags {
  std::uint64_t n = 1000;
  std::uint64_t domain_size = 64;
  std::uint32_t dims = 1;
  std::uint32_t k = 1;
  double eps = 1.0;
  double delta = 1e-6;
  double beta = 0.2;
  std::uint64_t seed = 1;
  std::uint64_t public_seed = 1;
  std::string data = "uniform";
  std::uint32_t trials = 20;
  std::string out;
  std::string format = "json";
  bool one_sided = false;
  bool noiseless = false;
  bool strict_paper = false;
  std::string dump_messages;
  std::string per_query;
  std::string dump_sketch;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--n", f->n, "number of users");
  cmd->add_option("--B", f->domain_size, "domain size (per dimension)");
  cmd->add_option("--d", f->dims, "dimensions (range protocol)");
  cmd->add_option("--k", f->k, "elements per user");
  cmd->add_option("--eps", f->eps, "shuffled epsilon");
  cmd->add_option("--delta", f->delta, "shuffled delta");
  cmd->add_option("--beta", f->beta, "failure probability");
  cmd->add_option("--seed", f->seed, "private randomness seed");
  cmd->add_option("--public-seed", f->public_seed, "public randomness seed");
  cmd->add_option("--data", f->data,
                  "uniform | zipf(a) | point-mass(j) | file:path");
  cmd->add_option("--trials", f->trials, "independent replications");
  cmd->add_option("--out", f->out, "output path (default stdout)");
  cmd->add_option("--format", f->format, "json | csv");
  cmd->add_flag("--one-sided", f->one_sided,
                "count-min query without gamma*n subtraction");
  cmd->add_flag("--noiseless", f->noiseless, "noise-free debugging mode");
  cmd->add_flag("--strict-paper", f->strict_paper,
                "use the looser (log2 2B)^d sparsity for the hadamard range route");
  cmd->add_option("--dump-messages", f->dump_messages,
                  "write hadamard messages as hex lines (trial 0)");
  cmd->add_option("--per-query", f->per_query,
                  "write query,estimate,truth,abs_error CSV (trial 0)");
  cmd->add_option("--dump-sketch", f->dump_sketch,
                  "write the count-min sketch dump (trial 0)");
}

void apply_seed_env(CommonFlags* f) {
  if (const char* env = std::getenv("SDP_SEED")) {
    f->seed = std::stoull(env);
  }
}

void write_output(const std::string& body, const std::string& out) {
  if (out.empty()) {
    std::cout << body << '\n';
    return;
  }
  std::ofstream file(out);
  if (!file) throw sdp::FormatError("cannot open output path: " + out);
  file << body << '\n';
}

int cmd_run(const CommonFlags& f, const std::string& protocol,
            const std::string& range_fo, std::uint32_t range_queries,
            const std::string& query_file, double c_amp, double c_util) {
  sdp::ExperimentConfig cfg;
  cfg.protocol = sdp::protocol_from_string(protocol);
  cfg.n = f.n;
  cfg.domain_size = f.domain_size;
  cfg.dims = f.dims;
  cfg.k = f.k;
  cfg.eps = f.eps;
  cfg.delta = f.delta;
  cfg.beta = f.beta;
  cfg.seed = f.seed;
  cfg.public_seed = f.public_seed;
  cfg.data = sdp::DataSpec::parse(f.data);
  cfg.trials = f.trials;
  cfg.one_sided = f.one_sided;
  cfg.noiseless = f.noiseless;
  cfg.strict_paper = f.strict_paper;
  cfg.range_fo =
      range_fo == "had" ? sdp::RangeFO::kHadamard : sdp::RangeFO::kCountMin;
  cfg.range_queries = range_queries;
  cfg.query_file = query_file;
  cfg.c_amp = c_amp;
  cfg.c_util = c_util;
  cfg.dump_messages_path = f.dump_messages;
  cfg.per_query_path = f.per_query;
  cfg.dump_sketch_path = f.dump_sketch;

  const sdp::ExperimentReport report = sdp::run_experiment(cfg);
  if (f.out.empty()) {
    std::cout << (f.format == "csv" ? sdp::report_to_csv(report)
                                    : sdp::report_to_json(report))
              << '\n';
  } else {
    sdp::emit_report(report, f.format, f.out);
    std::cerr << "report written to " << f.out << '\n';
  }
  return 0;
}

int cmd_params(const CommonFlags& f, double c_amp, double c_util) {
  nlohmann::json j;
  j["had"] = {{"rho", sdp::had_rho(f.eps, f.delta, f.k)},
              {"tau", static_cast<std::uint64_t>(std::ceil(
                  std::log2(static_cast<double>(std::max<std::uint64_t>(
                      2, f.n)))))}};
  const sdp::CMDerivedParams cm = sdp::cm_params(
      f.n, f.domain_size, f.k, f.eps, f.delta, f.beta, c_util);
  j["cm"] = {{"tau", cm.rows},
             {"s", cm.buckets},
             {"gamma", cm.gamma},
             {"gamma_clamped", cm.gamma_clamped}};
  const double limit = sdp::amplification_regime_limit(f.n, f.delta);
  nlohmann::json amp = {{"eps_local_limit", limit}, {"c_amp", c_amp}};
  try {
    const double inv =
        sdp::invert_amplified_epsilon(f.eps, f.n, f.delta, c_amp);
    amp["eps_local_for_target"] = inv;
    amp["amplified_check"] = sdp::amplified_epsilon(inv, f.n, f.delta, c_amp);
  } catch (const sdp::ParameterError& e) {
    amp["error"] = e.what();
  }
  j["amplification"] = amp;
  write_output(j.dump(2), f.out);
  return 0;
}

int cmd_hh(const CommonFlags& f, double threshold, bool strict) {
  const sdp::Dataset data = sdp::generate_data(
      sdp::DataSpec::parse(f.data), f.n, f.domain_size, f.k, f.seed);
  sdp::HeavyHitterOptions opts;
  opts.strict = strict;
  opts.one_sided = f.one_sided;
  const sdp::HeavyHitterResult res = sdp::heavy_hitters(
      data, threshold, sdp::PrivacyParams{f.eps, f.delta, f.beta}, f.seed,
      opts);
  nlohmann::json j;
  j["items"] = nlohmann::json::array();
  for (const auto& item : res.items) {
    j["items"].push_back({{"element", item.element},
                          {"estimate", item.estimate}});
  }
  j["params"] = {{"threshold", threshold},
                 {"levels", res.levels},
                 {"per_level_error_floor", res.per_level_error_floor},
                 {"n", f.n},
                 {"B", f.domain_size},
                 {"eps", f.eps},
                 {"delta", f.delta},
                 {"beta", f.beta},
                 {"seed", f.seed}};
  j["error_metrics"] = {{"node_expansions", res.node_expansions}};
  if (!res.warning.empty()) j["warning"] = res.warning;
  write_output(j.dump(2), f.out);
  return 0;
}

int cmd_quantile(const CommonFlags& f, std::uint32_t kq, std::uint32_t q,
                 const std::string& values_file) {
  sdp::QuantileSpec spec;
  spec.k = kq;
  spec.q = q;
  if (!values_file.empty()) {
    std::ifstream in(values_file);
    if (!in) throw sdp::FormatError("cannot open values file: " + values_file);
    double v = 0.0;
    while (in >> v) spec.values.push_back(v);
  } else {
    sdp::RandomStream rng(f.seed, 0, sdp::StreamRole::kDataGen);
    for (std::uint64_t i = 0; i < f.n; ++i) {
      spec.values.push_back(rng.uniform_double());
    }
  }
  const sdp::QuantileResult res = sdp::m_estimate_quantile(
      spec, sdp::PrivacyParams{f.eps, f.delta, f.beta}, f.seed, f.noiseless);
  nlohmann::json j;
  j["value"] = res.value;
  j["params"] = {{"k", kq},        {"q", q},
                 {"n", spec.values.size()}, {"buckets", res.num_buckets},
                 {"eps", f.eps},   {"delta", f.delta},
                 {"beta", f.beta}, {"noiseless", f.noiseless},
                 {"seed", f.seed}};
  j["error_metrics"] = {
      {"objective_at_value",
       sdp::quantile_objective(spec.values, res.value, kq, q)}};
  write_output(j.dump(2), f.out);
  return 0;
}

int cmd_sq(const CommonFlags& f, double tolerance) {
  // Indicator-predicate family q_j(x) = 1[x = j]: the SQ reduction
  // specialized to frequency estimation.
  const sdp::Dataset data = sdp::generate_data(
      sdp::DataSpec::parse(f.data), f.n, f.domain_size, 1, f.seed);
  std::vector<std::int64_t> samples;
  samples.reserve(data.users.size());
  for (const auto& u : data.users) {
    samples.push_back(static_cast<std::int64_t>(u.elements.at(0)));
  }
  sdp::SQSpec<std::int64_t> spec;
  spec.sparsity = 1;
  spec.tolerance = tolerance;
  for (std::uint64_t j = 1; j <= f.domain_size; ++j) {
    spec.predicates.push_back(
        [j](const std::int64_t& x) { return x == static_cast<std::int64_t>(j); });
  }
  const sdp::SQResult res = sdp::simulate_sq(
      spec, samples, sdp::PrivacyParams{f.eps, f.delta, f.beta}, f.seed);
  nlohmann::json j;
  j["answers"] = res.answers;
  j["params"] = {{"B", f.domain_size}, {"n", f.n},
                 {"k", 1},             {"tolerance", tolerance},
                 {"eps", f.eps},       {"delta", f.delta},
                 {"beta", f.beta},     {"seed", f.seed}};
  if (!res.warning.empty()) j["warning"] = res.warning;
  write_output(j.dump(2), f.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shuffled-model differential privacy simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string protocol = "had";
  std::string range_fo = "cm";
  std::uint32_t range_queries = 50;
  std::string query_file;
  double c_amp = 1.0;
  double c_util = 1.0;
  CLI::App* run = app.add_subcommand("run", "run a protocol experiment");
  add_common(run, &run_flags);
  run->add_option("--protocol", protocol, "had | cm | rr | rappor | range");
  run->add_option("--range-fo", range_fo,
                  "frequency oracle behind the range protocol: cm | had");
  run->add_option("--range-queries", range_queries,
                  "random boxes per trial when no query file is given");
  run->add_option("--queries", query_file,
                  "query file, lines of lo1,hi1;lo2,hi2;...");
  run->add_option("--c-amp", c_amp, "amplification bound constant");
  run->add_option("--c-util", c_util, "count-min utility floor constant");

  CommonFlags params_flags;
  CLI::App* params = app.add_subcommand(
      "params", "print derived protocol parameters as JSON");
  add_common(params, &params_flags);
  params->add_option("--c-amp", c_amp, "amplification bound constant");
  params->add_option("--c-util", c_util, "count-min utility floor constant");

  CommonFlags hh_flags;
  double threshold = 100.0;
  bool hh_strict = false;
  CLI::App* hh = app.add_subcommand("hh", "heavy hitters via prefix tree");
  add_common(hh, &hh_flags);
  hh->add_option("--threshold", threshold, "heavy hitter count threshold");
  hh->add_flag("--strict", hh_strict,
               "refuse thresholds at or below the error floor");

  CommonFlags quantile_flags;
  std::uint32_t kq = 1, qq = 2;
  std::string values_file;
  CLI::App* quantile =
      app.add_subcommand("quantile", "M-estimate the k-th q-quantile");
  add_common(quantile, &quantile_flags);
  quantile->add_option("--kq", kq, "quantile numerator k");
  quantile->add_option("--q", qq, "quantile denominator q");
  quantile->add_option("--values", values_file,
                       "file of reals in [0,1], one per line");

  CommonFlags sq_flags;
  double tolerance = 0.1;
  CLI::App* sq = app.add_subcommand(
      "sq", "simulate an indicator-family sparse SQ algorithm");
  add_common(sq, &sq_flags);
  sq->add_option("--tolerance", tolerance, "SQ tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      apply_seed_env(&run_flags);
      return cmd_run(run_flags, protocol, range_fo, range_queries, query_file,
                     c_amp, c_util);
    }
    if (params->parsed()) {
      apply_seed_env(&params_flags);
      return cmd_params(params_flags, c_amp, c_util);
    }
    if (hh->parsed()) {
      apply_seed_env(&hh_flags);
      return cmd_hh(hh_flags, threshold, hh_strict);
    }
    if (quantile->parsed()) {
      apply_seed_env(&quantile_flags);
      return cmd_quantile(quantile_flags, kq, qq, values_file);
    }
    if (sq->parsed()) {
      apply_seed_env(&sq_flags);
      return cmd_sq(sq_flags, tolerance);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
