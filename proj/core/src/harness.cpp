#include "sdp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sdp/baselines.hpp"
#include "sdp/countmin.hpp"
#include "sdp/error.hpp"
#include "sdp/hadamard.hpp"
#include "sdp/privacy.hpp"

namespace sdp {

Protocol protocol_from_string(const std::string& name) {
  if (name == "had") return Protocol::kHad;
  if (name == "cm") return Protocol::kCM;
  if (name == "rr") return Protocol::kRR;
  if (name == "rappor") return Protocol::kRappor;
  if (name == "range") return Protocol::kRange;
  throw ParameterError("unknown protocol: " + name);
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kHad: return "had";
    case Protocol::kCM: return "cm";
    case Protocol::kRR: return "rr";
    case Protocol::kRappor: return "rappor";
    case Protocol::kRange: return "range";
  }
  return "?";
}

DataSpec DataSpec::parse(const std::string& text) {
  DataSpec spec;
  if (text == "uniform") {
    spec.kind = Kind::kUniform;
    return spec;
  }
  if (text.rfind("zipf(", 0) == 0 && text.back() == ')') {
    spec.kind = Kind::kZipf;
    spec.zipf_a = std::stod(text.substr(5, text.size() - 6));
    return spec;
  }
  if (text.rfind("point-mass(", 0) == 0 && text.back() == ')') {
    spec.kind = Kind::kPointMass;
    spec.point = static_cast<DomainElement>(
        std::stoul(text.substr(11, text.size() - 12)));
    return spec;
  }
  if (text.rfind("file:", 0) == 0) {
    spec.kind = Kind::kFile;
    spec.path = text.substr(5);
    return spec;
  }
  throw ParameterError("bad data spec: " + text +
                       " (want uniform | zipf(a) | point-mass(j) | file:path)");
}

std::string DataSpec::to_string() const {
  switch (kind) {
    case Kind::kUniform: return "uniform";
    case Kind::kZipf: return "zipf(" + std::to_string(zipf_a) + ")";
    case Kind::kPointMass:
      return "point-mass(" + std::to_string(point) + ")";
    case Kind::kFile: return "file:" + path;
  }
  return "?";
}

namespace {

std::vector<double> zipf_cumulative(std::uint64_t domain_size, double a) {
  std::vector<double> cum(domain_size);
  double total = 0.0;
  for (std::uint64_t j = 1; j <= domain_size; ++j) {
    total += std::pow(static_cast<double>(j), -a);
    cum[j - 1] = total;
  }
  return cum;
}

DomainElement draw_from(const DataSpec& spec,
                        const std::vector<double>& zipf_cum,
                        std::uint64_t domain_size, RandomStream& rng) {
  switch (spec.kind) {
    case DataSpec::Kind::kUniform:
      return static_cast<DomainElement>(rng.uniform_below(domain_size) + 1);
    case DataSpec::Kind::kZipf: {
      const double u = rng.uniform_double() * zipf_cum.back();
      const auto it =
          std::upper_bound(zipf_cum.begin(), zipf_cum.end(), u);
      return static_cast<DomainElement>(
          std::min<std::uint64_t>(domain_size,
                                  (it - zipf_cum.begin()) + 1));
    }
    case DataSpec::Kind::kPointMass:
      return spec.point;
    case DataSpec::Kind::kFile:
      break;
  }
  throw ParameterError("draw_from: file data is not synthesized");
}

}  // namespace

Dataset generate_data(const DataSpec& spec, std::uint64_t n,
                      std::uint64_t domain_size, std::uint32_t k,
                      std::uint64_t seed) {
  if (spec.kind == DataSpec::Kind::kFile) {
    return read_dataset_file(spec.path, domain_size, k);
  }
  if (spec.kind == DataSpec::Kind::kPointMass &&
      (spec.point < 1 || spec.point > domain_size)) {
    throw DomainError("point-mass element outside [1, B]");
  }
  if (k > domain_size) throw ParameterError("generate_data: k > B");
  std::vector<double> zipf_cum;
  if (spec.kind == DataSpec::Kind::kZipf) {
    zipf_cum = zipf_cumulative(domain_size, spec.zipf_a);
  }
  Dataset ds;
  ds.domain_size = domain_size;
  ds.sparsity = k;
  ds.users.reserve(n);
  RandomStream rng(seed, 0, StreamRole::kDataGen);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<DomainElement> elems;
    const std::uint32_t want =
        spec.kind == DataSpec::Kind::kPointMass ? 1 : k;
    while (elems.size() < want) {
      const DomainElement e = draw_from(spec, zipf_cum, domain_size, rng);
      if (std::find(elems.begin(), elems.end(), e) == elems.end()) {
        elems.push_back(e);
      }
    }
    ds.users.emplace_back(std::move(elems));
  }
  return ds;
}

std::vector<std::vector<DomainElement>> generate_points(
    const DataSpec& spec, std::uint64_t n, std::uint64_t per_dim_size,
    std::uint32_t dims, std::uint64_t seed) {
  if (spec.kind == DataSpec::Kind::kFile) {
    return read_points_file(spec.path, per_dim_size, dims);
  }
  std::vector<double> zipf_cum;
  if (spec.kind == DataSpec::Kind::kZipf) {
    zipf_cum = zipf_cumulative(per_dim_size, spec.zipf_a);
  }
  std::vector<std::vector<DomainElement>> points;
  points.reserve(n);
  RandomStream rng(seed, 0, StreamRole::kDataGen);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<DomainElement> p(dims);
    for (std::uint32_t d = 0; d < dims; ++d) {
      p[d] = draw_from(spec, zipf_cum, per_dim_size, rng);
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<RangeQuery> load_query_file(const std::string& path,
                                        std::uint64_t per_dim_size,
                                        std::uint32_t dims) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open query file: " + path);
  std::vector<RangeQuery> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    RangeQuery q;
    std::stringstream ss(line);
    std::string box;
    while (std::getline(ss, box, ';')) {
      const auto comma = box.find(',');
      if (comma == std::string::npos) {
        throw FormatError("query line " + std::to_string(lineno) +
                          ": want lo,hi per dimension");
      }
      q.lo.push_back(std::stoull(box.substr(0, comma)));
      q.hi.push_back(std::stoull(box.substr(comma + 1)));
    }
    if (q.lo.size() != dims) {
      throw FormatError("query line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dims) + " dimensions");
    }
    for (std::uint32_t p = 0; p < dims; ++p) {
      if (q.lo[p] < 1 || q.hi[p] > per_dim_size || q.lo[p] > q.hi[p]) {
        throw DomainError("query line " + std::to_string(lineno) +
                          ": box outside domain");
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

struct TrialOutcome {
  double max_error = 0.0;
  double mean_error = 0.0;
  double messages_per_user = 0.0;
  double bits_per_user = 0.0;
  bool within_bound = true;
};

// Artifact sinks, wired up for trial 0 only.
struct TrialIO {
  std::ofstream* dump_messages = nullptr;
  std::ofstream* per_query = nullptr;
  std::ofstream* sketch = nullptr;
};

void write_per_query(std::ofstream* out, const CountVector& estimates,
                     const CountVector& truth) {
  if (out == nullptr) return;
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    *out << (j + 1) << ',' << estimates[j] << ',' << truth[j] << ','
         << std::abs(estimates[j] - truth[j]) << '\n';
  }
}

void error_stats(const CountVector& estimates, const CountVector& truth,
                 std::size_t compare_len, TrialOutcome* out) {
  double max_err = 0.0, sum_err = 0.0;
  for (std::size_t j = 0; j < compare_len; ++j) {
    const double e = std::abs(estimates[j] - truth[j]);
    max_err = std::max(max_err, e);
    sum_err += e;
  }
  out->max_error = max_err;
  out->mean_error = sum_err / static_cast<double>(compare_len);
}

std::uint32_t ceil_log2_u64(std::uint64_t v) {
  std::uint32_t b = 0;
  while ((1ULL << b) < v) ++b;
  return b;
}

double had_bound(const HadParams& p, double beta) {
  const double t = 3.0 * std::log(2.0 * static_cast<double>(p.domain_size) /
                                  beta);
  return std::sqrt(t * std::max(t, static_cast<double>(p.rho) +
                                       static_cast<double>(p.k)));
}

double cm_bound(const CMParams& p, double beta) {
  if (p.gamma == 0.0) return 0.0;
  const double xi = std::sqrt(
      3.0 * std::log(4.0 * 2.0 * static_cast<double>(p.domain_size) *
                     static_cast<double>(p.buckets) *
                     static_cast<double>(p.rows) / beta));
  return xi * std::sqrt(p.gamma * static_cast<double>(p.n));
}

// Collision-free verification for the noiseless Hadamard mode: every
// payload message must decode to its own element and nothing else in
// [1, B].
bool had_crafted_ok(const std::vector<std::vector<HadMessage>>& per_user,
                    const Dataset& ds, const HadParams& p) {
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    // Element order matches randomize_had: sorted input, then augmented.
    std::vector<std::uint64_t> elems(ds.users[u].elements.begin(),
                                     ds.users[u].elements.end());
    for (std::uint64_t j = p.domain_size + 1; elems.size() < p.k; ++j) {
      elems.push_back(j);
    }
    for (std::size_t m = 0; m < per_user[u].size(); ++m) {
      const std::vector<std::uint32_t> hits =
          had_kernel_elements(per_user[u][m], p);
      for (std::uint32_t j : hits) {
        if (j <= ds.domain_size && j != elems[m]) return false;
      }
    }
  }
  return true;
}

TrialOutcome run_had_trial(const ExperimentConfig& cfg, const Dataset& data,
                           const CountVector& truth, std::uint64_t trial_seed,
                           double* bound_out, const TrialIO& io) {
  HadParams p;
  p.n = data.num_users();
  p.domain_size = pad_domain(cfg.domain_size);
  p.k = cfg.k;
  if (cfg.noiseless) {
    p.rho = 0;
    p.tau = 2 * p.symbol_bits() + 8;
  } else {
    p.rho = had_rho(cfg.eps, cfg.delta, cfg.k);
    p.tau = std::max<std::uint32_t>(
        1, static_cast<std::uint32_t>(std::ceil(std::log2(
               static_cast<double>(std::max<std::uint64_t>(2, p.n))))));
  }
  *bound_out = cfg.noiseless ? 0.0 : had_bound(p, cfg.beta);

  HadRawAccumulator acc(p);
  std::uint64_t emitted = 0;
  if (cfg.noiseless) {
    // Craft a collision-free instance: redraw until no payload message
    // decodes to a foreign element of [1, B].
    std::vector<std::vector<HadMessage>> per_user(data.num_users());
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 100 && !ok; ++attempt) {
      const std::uint64_t s = detail::mix64(trial_seed ^ (attempt + 1));
      for (std::size_t u = 0; u < data.users.size(); ++u) {
        per_user[u] = randomize_had(data.users[u], p, s, u);
      }
      ok = had_crafted_ok(per_user, data, p);
    }
    if (!ok) {
      throw ParameterError(
          "noiseless hadamard: could not craft a collision-free instance");
    }
    for (const auto& msgs : per_user) {
      emitted += msgs.size();
      for (const HadMessage& m : msgs) acc.add(m);
    }
  } else {
    for (std::size_t u = 0; u < data.users.size(); ++u) {
      const std::vector<HadMessage> msgs =
          randomize_had(data.users[u], p, trial_seed, u);
      emitted += msgs.size();
      for (const HadMessage& m : msgs) {
        if (io.dump_messages != nullptr) {
          *io.dump_messages << had_message_to_hex(m, p) << '\n';
        }
        acc.add(m);
      }
    }
  }

  CountVector estimates;
  if (cfg.noiseless) {
    const auto& raw = acc.raw_counts();
    estimates.assign(raw.begin(), raw.end());
  } else {
    estimates = debias_had(acc.raw_counts(), p);
  }

  TrialOutcome out;
  error_stats(estimates, truth, truth.size(), &out);
  write_per_query(io.per_query, estimates, truth);
  out.messages_per_user =
      static_cast<double>(emitted) / static_cast<double>(p.n);
  out.bits_per_user = out.messages_per_user *
                      static_cast<double>(p.tau) *
                      static_cast<double>(p.symbol_bits());
  out.within_bound = cfg.noiseless ? out.max_error == 0.0
                                   : out.max_error <= *bound_out;
  return out;
}

// For the noiseless Count-Min mode: every element of [1, B] needs one
// row where no other present element lands in its bucket.
bool cm_crafted_ok(const CMParams& p, const HashFamily& family,
                   const CountVector& truth) {
  std::vector<std::vector<std::uint32_t>> occupancy(
      p.rows, std::vector<std::uint32_t>(p.buckets + 1, 0));
  for (std::uint64_t j = 1; j <= p.domain_size; ++j) {
    if (truth[j - 1] > 0) {
      for (std::uint32_t t = 1; t <= p.rows; ++t) {
        ++occupancy[t - 1][family.eval(t, static_cast<DomainElement>(j))];
      }
    }
  }
  for (std::uint64_t j = 1; j <= p.domain_size; ++j) {
    const std::uint32_t self = truth[j - 1] > 0 ? 1 : 0;
    bool clean = false;
    for (std::uint32_t t = 1; t <= p.rows && !clean; ++t) {
      clean = occupancy[t - 1][family.eval(t, static_cast<DomainElement>(j))] ==
              self;
    }
    if (!clean) return false;
  }
  return true;
}

TrialOutcome run_cm_trial(const ExperimentConfig& cfg, const Dataset& data,
                          const CountVector& truth, std::uint64_t trial_seed,
                          std::uint64_t trial_public_seed, double* bound_out,
                          const TrialIO& io) {
  const CMDerivedParams derived =
      cm_params(data.num_users(), cfg.domain_size, cfg.k, cfg.eps, cfg.delta,
                cfg.beta, cfg.c_util);
  CMParams p;
  p.n = data.num_users();
  p.domain_size = cfg.domain_size;
  p.rows = derived.rows;
  p.buckets = derived.buckets;
  p.k = cfg.k;
  p.gamma = cfg.noiseless ? 0.0 : derived.gamma;
  p.one_sided = cfg.one_sided;
  *bound_out = cm_bound(p, cfg.beta);

  std::uint64_t family_seed = trial_public_seed;
  if (cfg.noiseless) {
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 100 && !ok; ++attempt) {
      family_seed = detail::mix64(trial_public_seed ^ attempt);
      ok = cm_crafted_ok(p, HashFamily(p.rows, p.buckets, family_seed), truth);
    }
    if (!ok) {
      throw ParameterError(
          "noiseless countmin: could not craft collision-free hashes");
    }
  }
  const HashFamily family(p.rows, p.buckets, family_seed);

  CMSketchAccumulator acc(p, family);
  for (std::size_t u = 0; u < data.users.size(); ++u) {
    acc.add_user(data.users[u], trial_seed, u);
  }
  const std::uint64_t emitted = acc.messages_emitted();
  const CMSketch sketch = acc.finalize();

  CountVector estimates(cfg.domain_size);
  for (std::uint64_t j = 1; j <= cfg.domain_size; ++j) {
    estimates[j - 1] =
        query_cm(sketch, static_cast<DomainElement>(j), p, family);
  }
  if (io.sketch != nullptr) write_sketch(*io.sketch, sketch, p);

  TrialOutcome out;
  error_stats(estimates, truth, truth.size(), &out);
  write_per_query(io.per_query, estimates, truth);
  out.messages_per_user =
      static_cast<double>(emitted) / static_cast<double>(p.n);
  out.bits_per_user =
      out.messages_per_user *
      (ceil_log2_u64(p.rows) + ceil_log2_u64(p.buckets));
  // One-sided estimates overshoot by design; the two-sided bound applies
  // to the subtracted estimator.
  out.within_bound =
      cfg.one_sided || cfg.noiseless ? true : out.max_error <= *bound_out;
  return out;
}

TrialOutcome run_rr_trial(const ExperimentConfig& cfg, const Dataset& data,
                          const CountVector& truth, std::uint64_t trial_seed,
                          double eps_local, const TrialIO& io) {
  const std::uint64_t n = data.num_users();
  std::vector<std::uint64_t> counts(cfg.domain_size, 0);
  for (std::size_t u = 0; u < data.users.size(); ++u) {
    if (data.users[u].size() != 1) {
      throw ParameterError("rr baseline: users must hold exactly one element");
    }
    const DomainElement x = data.users[u].elements[0];
    if (cfg.noiseless) {
      ++counts[x - 1];
    } else {
      RandomStream rng(trial_seed, u, StreamRole::kPayload);
      ++counts[randomize_rr(x, cfg.domain_size, eps_local, rng) - 1];
    }
  }
  CountVector estimates;
  if (cfg.noiseless) {
    estimates.assign(counts.begin(), counts.end());
  } else {
    estimates = analyze_rr_counts(counts, n, cfg.domain_size, eps_local);
  }
  TrialOutcome out;
  error_stats(estimates, truth, truth.size(), &out);
  write_per_query(io.per_query, estimates, truth);
  out.messages_per_user = 1.0;
  out.bits_per_user = ceil_log2_u64(cfg.domain_size);
  return out;
}

TrialOutcome run_rappor_trial(const ExperimentConfig& cfg,
                              const Dataset& data, const CountVector& truth,
                              std::uint64_t trial_seed, double eps_local,
                              const TrialIO& io) {
  if (cfg.domain_size > (1ULL << 20)) {
    throw ParameterError(
        "rappor baseline: refusing B > 2^20 (message size is B bits per "
        "user)");
  }
  const std::uint64_t n = data.num_users();
  std::vector<std::uint64_t> colsums(cfg.domain_size, 0);
  for (std::size_t u = 0; u < data.users.size(); ++u) {
    if (data.users[u].size() != 1) {
      throw ParameterError(
          "rappor baseline: users must hold exactly one element");
    }
    const DomainElement x = data.users[u].elements[0];
    if (cfg.noiseless) {
      ++colsums[x - 1];
    } else {
      RandomStream rng(trial_seed, u, StreamRole::kPayload);
      randomize_rappor_bits(x, cfg.domain_size, eps_local, rng,
                            [&](std::uint64_t j) { ++colsums[j - 1]; });
    }
  }
  CountVector estimates;
  if (cfg.noiseless) {
    estimates.assign(colsums.begin(), colsums.end());
  } else {
    estimates = analyze_rappor_columns(colsums, n, cfg.domain_size, eps_local);
  }
  TrialOutcome out;
  error_stats(estimates, truth, truth.size(), &out);
  write_per_query(io.per_query, estimates, truth);
  out.messages_per_user = 1.0;
  out.bits_per_user = static_cast<double>(cfg.domain_size);
  return out;
}

TrialOutcome run_range_trial(const ExperimentConfig& cfg,
                             std::uint64_t trial_seed,
                             std::uint64_t trial_public_seed,
                             double* bound_out, const TrialIO& io) {
  RangeProtocolParams rp;
  rp.per_dim_size = pad_domain(cfg.domain_size);
  rp.dims = cfg.dims;
  rp.fo = cfg.range_fo;
  rp.privacy = PrivacyParams{cfg.eps, cfg.delta, cfg.beta};
  rp.strict_paper = cfg.strict_paper;
  rp.one_sided = cfg.one_sided;
  rp.public_seed = trial_public_seed;
  rp.c_util = cfg.c_util;

  const std::vector<std::vector<DomainElement>> points = generate_points(
      cfg.data, cfg.n, cfg.domain_size, cfg.dims,
      detail::mix64(trial_seed ^ 0xda7aULL));
  rp.n = points.size();
  rp.validate();

  std::vector<RangeQuery> queries;
  if (!cfg.query_file.empty()) {
    queries = load_query_file(cfg.query_file, cfg.domain_size, cfg.dims);
  } else {
    RandomStream qrng(trial_seed, 1, StreamRole::kDataGen);
    for (std::uint32_t i = 0; i < cfg.range_queries; ++i) {
      RangeQuery q;
      for (std::uint32_t d = 0; d < cfg.dims; ++d) {
        std::uint64_t a = qrng.uniform_below(cfg.domain_size) + 1;
        std::uint64_t b = qrng.uniform_below(cfg.domain_size) + 1;
        q.lo.push_back(std::min(a, b));
        q.hi.push_back(std::max(a, b));
      }
      queries.push_back(std::move(q));
    }
  }

  std::uint64_t emitted = 0;
  std::unique_ptr<FrequencyOracle> fo;
  if (cfg.noiseless) {
    fo = build_exact_range_oracle(points, rp);
  } else if (rp.fo == RangeFO::kCountMin) {
    const CMParams p = rp.cm_protocol_params();
    const HashFamily family = rp.make_family();
    CMSketchAccumulator acc(p, family);
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::vector<DomainElement> elems;
      for (std::uint64_t idx :
           column_support_d(points[i], rp.per_dim_size, rp.dims)) {
        elems.push_back(static_cast<DomainElement>(idx));
      }
      acc.add_user(UserInput(std::move(elems)), trial_seed, i);
    }
    emitted = acc.messages_emitted();
    fo = std::make_unique<CMOracle>(acc.finalize(), p, family);
  } else {
    fo = build_range_oracle(points, rp, trial_seed);
    const HadParams hp = rp.had_params();
    emitted = points.size() * (hp.k + hp.rho);
  }

  const std::vector<double> answers =
      analyze_range(*fo, queries, rp.per_dim_size, rp.dims);
  const std::vector<double> truth = exact_range_counts(points, queries);

  double fo_bound = 0.0;
  if (!cfg.noiseless) {
    fo_bound = rp.fo == RangeFO::kCountMin
                   ? cm_bound(rp.cm_protocol_params(), cfg.beta)
                   : had_bound(rp.had_params(), cfg.beta);
  }
  double max_a = 0.0;
  TrialOutcome out;
  double sum_err = 0.0;
  out.within_bound = true;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const double err = std::abs(answers[i] - truth[i]);
    if (io.per_query != nullptr) {
      std::string box;
      for (std::uint32_t d = 0; d < cfg.dims; ++d) {
        if (d > 0) box += ';';
        box += std::to_string(queries[i].lo[d]) + ',' +
               std::to_string(queries[i].hi[d]);
      }
      *io.per_query << '"' << box << '"' << ',' << answers[i] << ','
                    << truth[i] << ',' << err << '\n';
    }
    out.max_error = std::max(out.max_error, err);
    sum_err += err;
    const double a = static_cast<double>(
        range_decomposition_d(queries[i], rp.per_dim_size, rp.dims).size());
    max_a = std::max(max_a, a);
    if (err > fo_bound * a && !cfg.noiseless) out.within_bound = false;
    if (cfg.noiseless && err != 0.0) out.within_bound = false;
  }
  out.mean_error =
      queries.empty() ? 0.0 : sum_err / static_cast<double>(queries.size());
  *bound_out = fo_bound * max_a;

  out.messages_per_user = static_cast<double>(emitted) /
                          static_cast<double>(std::max<std::uint64_t>(1, rp.n));
  if (rp.fo == RangeFO::kCountMin) {
    const CMParams p = rp.cm_protocol_params();
    out.bits_per_user = out.messages_per_user *
                        (ceil_log2_u64(p.rows) + ceil_log2_u64(p.buckets));
  } else {
    const HadParams hp = rp.had_params();
    out.bits_per_user = out.messages_per_user * hp.tau * hp.symbol_bits();
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw ParameterError("run_experiment: trials >= 1");
  ExperimentReport report;
  report.config = config;

  double eps_local = 0.0;
  if ((config.protocol == Protocol::kRR ||
       config.protocol == Protocol::kRappor) &&
      !config.noiseless) {
    eps_local = invert_amplified_epsilon(config.eps, config.n, config.delta,
                                         config.c_amp);
    if (eps_local <= 0) {
      throw ParameterError("baseline: amplification inversion gave eps_local "
                           "<= 0; raise eps or n");
    }
  }

  std::ofstream dump, per_query, sketch;
  if (!config.dump_messages_path.empty() &&
      config.protocol == Protocol::kHad) {
    dump.open(config.dump_messages_path);
    if (!dump) {
      throw FormatError("cannot open dump file: " + config.dump_messages_path);
    }
  }
  if (!config.per_query_path.empty()) {
    per_query.open(config.per_query_path);
    if (!per_query) {
      throw FormatError("cannot open per-query file: " +
                        config.per_query_path);
    }
    per_query << "query,estimate,truth,abs_error\n";
  }
  if (!config.dump_sketch_path.empty() && config.protocol == Protocol::kCM) {
    sketch.open(config.dump_sketch_path);
    if (!sketch) {
      throw FormatError("cannot open sketch dump file: " +
                        config.dump_sketch_path);
    }
  }

  for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed =
        detail::mix64(config.seed ^ (0x9d2c5680ULL + trial));
    const std::uint64_t trial_public_seed =
        detail::mix64(config.public_seed ^ (0x38495ab5ULL + trial));

    TrialIO io;
    if (trial == 0) {
      io.dump_messages = dump.is_open() ? &dump : nullptr;
      io.per_query = per_query.is_open() ? &per_query : nullptr;
      io.sketch = sketch.is_open() ? &sketch : nullptr;
    }

    const auto t0 = std::chrono::steady_clock::now();
    TrialOutcome outcome;
    double bound = 0.0;
    if (config.protocol == Protocol::kRange) {
      outcome =
          run_range_trial(config, trial_seed, trial_public_seed, &bound, io);
    } else {
      const Dataset data =
          generate_data(config.data, config.n, config.domain_size, config.k,
                        detail::mix64(trial_seed ^ 0xda7aULL));
      const CountVector truth = exact_histogram(data);
      switch (config.protocol) {
        case Protocol::kHad:
          outcome =
              run_had_trial(config, data, truth, trial_seed, &bound, io);
          break;
        case Protocol::kCM:
          outcome = run_cm_trial(config, data, truth, trial_seed,
                                 trial_public_seed, &bound, io);
          break;
        case Protocol::kRR:
          outcome =
              run_rr_trial(config, data, truth, trial_seed, eps_local, io);
          break;
        case Protocol::kRappor:
          outcome = run_rappor_trial(config, data, truth, trial_seed,
                                     eps_local, io);
          break;
        case Protocol::kRange:
          break;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();

    TrialStats stats;
    stats.trial = trial;
    stats.max_error = outcome.max_error;
    stats.mean_error = outcome.mean_error;
    stats.messages_per_user = outcome.messages_per_user;
    stats.bits_per_user = outcome.bits_per_user;
    stats.within_bound = outcome.within_bound;
    stats.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.trials.push_back(stats);
    report.error_bound = bound;
  }

  std::vector<double> maxes;
  double hold = 0.0, sum = 0.0;
  for (const TrialStats& t : report.trials) {
    maxes.push_back(t.max_error);
    sum += t.max_error;
    if (t.within_bound) hold += 1.0;
  }
  std::sort(maxes.begin(), maxes.end());
  report.median_max_error = maxes[maxes.size() / 2];
  report.mean_max_error = sum / static_cast<double>(maxes.size());
  report.max_max_error = maxes.back();
  report.bound_hold_rate = hold / static_cast<double>(report.trials.size());
  return report;
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return nlohmann::json{
      {"protocol", protocol_name(c.protocol)},
      {"n", c.n},
      {"B", c.domain_size},
      {"d", c.dims},
      {"k", c.k},
      {"eps", c.eps},
      {"delta", c.delta},
      {"beta", c.beta},
      {"seed", c.seed},
      {"public_seed", c.public_seed},
      {"data", c.data.to_string()},
      {"trials", c.trials},
      {"one_sided", c.one_sided},
      {"noiseless", c.noiseless},
      {"strict_paper", c.strict_paper},
      {"range_fo", c.range_fo == RangeFO::kCountMin ? "cm" : "had"},
      {"c_amp", c.c_amp},
      {"c_util", c.c_util},
  };
}

}  // namespace

std::string report_to_json(const ExperimentReport& report, bool mask_timing) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["config"] = config_to_json(report.config);
  j["error_bound"] = report.error_bound;
  j["trials"] = nlohmann::json::array();
  for (const TrialStats& t : report.trials) {
    j["trials"].push_back({
        {"trial", t.trial},
        {"max_error", t.max_error},
        {"mean_error", t.mean_error},
        {"messages_per_user", t.messages_per_user},
        {"bits_per_user", t.bits_per_user},
        {"within_bound", t.within_bound},
        {"wall_ms", mask_timing ? 0.0 : t.wall_ms},
    });
  }
  j["summary"] = {
      {"median_max_error", report.median_max_error},
      {"mean_max_error", report.mean_max_error},
      {"max_max_error", report.max_max_error},
      {"bound_hold_rate", report.bound_hold_rate},
  };
  return j.dump(2);
}

std::string report_to_csv(const ExperimentReport& report, bool mask_timing) {
  std::ostringstream out;
  out << "# " << report.schema_version << '\n';
  out << "# config " << config_to_json(report.config).dump() << '\n';
  out << "# error_bound " << report.error_bound << '\n';
  out << "trial,max_error,mean_error,messages_per_user,bits_per_user,"
         "within_bound,wall_ms\n";
  for (const TrialStats& t : report.trials) {
    out << t.trial << ',' << t.max_error << ',' << t.mean_error << ','
        << t.messages_per_user << ',' << t.bits_per_user << ','
        << (t.within_bound ? 1 : 0) << ','
        << (mask_timing ? 0.0 : t.wall_ms) << '\n';
  }
  return out.str();
}

void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& path) {
  std::string body;
  if (format == "json") {
    body = report_to_json(report);
  } else if (format == "csv") {
    body = report_to_csv(report);
  } else {
    throw ParameterError("emit_report: format must be json or csv");
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open report path: " + path);
  out << body;
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace sdp
