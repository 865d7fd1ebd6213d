// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tarstop: planners, stopping rules and replication experiments from the
// command line. Data goes to CSV (stdout or --out); every file output gets a
// <out>.manifest.json sidecar recording how to reproduce it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tarstop/tarstop.hpp"

namespace {

using namespace tarstop;

constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kDomain = 3,
  kData = 4,
  kIo = 5,
  kTrivialPlan = 6,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) {
      throw UsageError(std::string("malformed value '") + item + "' in " + flag);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_sizes(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (long long v : parse_list<long long>(text, "--sizes")) {
    if (v < 1) throw UsageError("--sizes entries must be positive");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

/// Output sink: a file (with manifest) when --out is set, stdout otherwise.
class Output {
 public:
  Output(std::string command, const CLI::App& app, std::uint64_t seed, std::string path)
      : command_(std::move(command)), seed_(seed), path_(std::move(path)), started_(utc_now()) {
    for (const CLI::Option* opt : app.get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
      std::string value;
      if (opt->count() > 0) {
        value = opt->as<std::string>();
      } else {
        value = opt->get_default_str();
        if (value.empty()) continue;
      }
      params_[opt->get_name()] = value;
    }
  }

  bool to_file() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

  void write(const std::string& suffix, const std::string& content) {
    if (!to_file()) {
      std::cout << content;
      return;
    }
    const std::string target = path_ + suffix;
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + target);
    out << content;
    if (!out) throw std::ios_base::failure("write failed: " + target);
    written_.push_back(target);
  }

  void finish() {
    if (!to_file()) return;
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["parameters"] = params_;
    m["master_seed"] = seed_;
    m["tool_version"] = kToolVersion;
    m["outputs"] = written_;
    m["started_at"] = started_;
    m["finished_at"] = utc_now();
    const std::string target = path_ + ".manifest.json";
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + target);
    out << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::string path_;
  std::string started_;
  std::map<std::string, std::string> params_;
  std::vector<std::string> written_;
};

void guard_not_input(const std::string& out, const std::string& input) {
  if (out.empty() || input.empty()) return;
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(out, ec) && fs::equivalent(out, input, ec)) {
    throw std::ios_base::failure("--out would overwrite the input record " + input);
  }
}

// ---- record sources ---------------------------------------------------------

struct RecordSource {
  std::string record_path;
  std::string model = "";
  std::uint64_t N = 0;
  double prevalence = 0.01;
  double decay = 5.0;
  std::uint64_t batch_size = 0;
  std::uint64_t record_seed = 0;
  bool record_seed_set = false;

  void add_flags(CLI::App* cmd, bool allow_file) {
    if (allow_file) cmd->add_option("--record", record_path, "Record JSON file");
    cmd->add_option("--model", model, "Synthetic family: uniform, geometric, all-relevant");
    cmd->add_option("--N", N, "Synthetic collection size");
    cmd->add_option("--prevalence", prevalence, "Synthetic prevalence")->capture_default_str();
    cmd->add_option("--decay", decay, "Geometric decay rate")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Batch size (0 = rank granularity)");
    cmd->add_option_function<std::uint64_t>(
        "--record-seed",
        [this](const std::uint64_t& v) {
          record_seed = v;
          record_seed_set = true;
        },
        "Seed for the synthetic record (default: --seed)");
  }

  SyntheticModel synthetic_model() const {
    const auto family = parse_family(model);
    if (!family) throw UsageError("unknown --model '" + model + "'");
    if (N == 0) throw UsageError("--N is required with --model");
    return {*family, N, prevalence, decay};
  }

  RankRecord load(std::uint64_t seed) const {
    if (record_path.empty() == model.empty()) {
      throw UsageError("give exactly one record source: --record or --model");
    }
    if (!record_path.empty()) {
      auto rec = read_record_file(record_path);
      if (batch_size == 0) return rec;
      return RankRecord(rec.collection_size(),
                        {rec.positive_ranks().begin(), rec.positive_ranks().end()}, batch_size);
    }
    return gen_synthetic(synthetic_model(), record_seed_set ? record_seed : seed, batch_size);
  }
};

// ---- plan -----------------------------------------------------------------

struct PlanArgs {
  std::uint64_t r = 0;
  double recall = 0.8;
  double alpha = 0.05;
  int digits = 3;
};

int cmd_plan(const PlanArgs& a) {
  const Probability t{a.recall}, alpha{a.alpha};
  const auto plan = qbcb_index(a.r, t, alpha);
  std::cout << "r,j,trivial,lcb,plugin,ucb,confidence\n";
  std::cout << plan.sample_size << ',' << plan.index << ',' << (plan.trivial ? "true" : "false");
  if (plan.estimates) {
    const auto& e = *plan.estimates;
    std::cout << ',' << fixed(e.lcb.value(), a.digits) << ',' << fixed(e.plugin.value(), a.digits)
              << ',' << fixed(e.ucb.value(), a.digits) << ','
              << fixed(e.confidence.value(), a.digits);
  } else {
    std::cout << ",,,," << fixed(plan.confidence.value(), a.digits);
  }
  std::cout << '\n';
  if (plan.trivial) {
    std::cerr << "trivial plan: only [1, N] has " << fixed(1.0 - a.alpha, 3)
              << " confidence at r = " << a.r
              << "; minimum r = " << min_sample_nontrivial(t, alpha) << "\n";
    return kTrivialPlan;
  }
  return kOk;
}

// ---- table ----------------------------------------------------------------

struct TableArgs {
  double recall = 0.8;
  double alpha = 0.05;
  std::optional<std::string> sizes;
  std::string ceilings;
  std::string starred;
  int digits = 3;
  std::string out;
};

int cmd_table(const TableArgs& a, const CLI::App& app) {
  const Probability t{a.recall}, alpha{a.alpha};
  std::vector<std::uint64_t> sizes;
  if (a.sizes) {
    sizes = parse_sizes(*a.sizes);
  } else {
    const auto ceilings = a.ceilings.empty() ? ceiling_grid(0.99, 0.86, 0.01)
                                             : parse_list<double>(a.ceilings, "--ceilings");
    for (auto r : min_samples_for_ucb_ceilings(ceilings, t, alpha)) {
      if (std::find(sizes.begin(), sizes.end(), r) == sizes.end()) sizes.push_back(r);
    }
  }
  const auto starred = a.starred.empty() ? std::vector<std::uint64_t>{} : parse_sizes(a.starred);
  std::ostringstream os;
  os << "r,j,starred,lcb,plugin,ucb\n";
  for (const auto& row : table_rows(t, alpha, sizes, starred)) {
    os << row.sample_size << ',' << row.index << ',' << (row.starred ? "*" : "") << ','
       << fixed(row.estimates.lcb.value(), a.digits) << ','
       << fixed(row.estimates.plugin.value(), a.digits) << ','
       << fixed(row.estimates.ucb.value(), a.digits) << '\n';
  }
  Output out("table", app, 0, a.out);
  out.write("", os.str());
  out.finish();
  return kOk;
}

// ---- bias-demo ------------------------------------------------------------

struct BiasArgs {
  std::uint64_t N = 0;
  std::uint64_t n = 0;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

int cmd_bias_demo(const BiasArgs& a) {
  const double closed = pet_expected_recall_all_relevant(a.N, a.n);
  // Second route: E[D_(n/2)] / N summed from the order-statistic pmf.
  long double expect = 0.0L;
  for (std::uint64_t v = 1; v <= a.N; ++v) {
    expect += static_cast<long double>(v) *
              order_stat_pmf({a.N, a.n, a.n / 2, v}).value();
  }
  const double via_pmf = static_cast<double>(expect / static_cast<long double>(a.N));

  const auto record = gen_synthetic({SyntheticFamily::AllRelevant, a.N, 1.0, 1.0}, 0);
  const auto summary =
      replicate(record, RuleConfig::pet(a.n, Probability{0.5}), a.reps, a.seed, a.threads);
  long double sum = 0.0L, sq = 0.0L;
  for (const auto& row : summary.per_rep) {
    const long double x = row.outcome.achieved_recall.value();
    sum += x;
    sq += x * x;
  }
  const long double m = sum / static_cast<long double>(a.reps);
  const double var = a.reps > 1 ? static_cast<double>((sq - sum * m) / (a.reps - 1)) : 0.0;
  const double se = std::sqrt(std::max(0.0, var) / static_cast<double>(a.reps));
  const double diff = std::abs(static_cast<double>(m) - closed);
  const bool pass = diff <= 3.0 * se + 1e-12;

  std::cout << "closed_form_expected_recall," << fixed(closed, 6) << '\n'
            << "pmf_expected_recall," << fixed(via_pmf, 6) << '\n'
            << "monte_carlo_mean," << fixed(static_cast<double>(m), 6) << '\n'
            << "monte_carlo_se," << fixed(se, 6) << '\n'
            << "reps," << a.reps << '\n'
            << "below_goal," << (static_cast<double>(m) < 0.5 ? "true" : "false") << '\n'
            << "agreement_within_3se," << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kCheckFailed;
}

// ---- simulate -------------------------------------------------------------

struct RuleArgs {
  std::string rule = "qbcb";
  double recall = 0.8;
  double alpha = 0.05;
  std::uint64_t r = 0;
  std::uint64_t n = 0;

  RuleConfig config() const {
    const auto kind = parse_rule_kind(rule);
    if (!kind) throw UsageError("unknown --rule '" + rule + "'");
    if (*kind != RuleKind::Target && r == 0) throw UsageError("--r is required");
    RuleConfig c{*kind, Probability{recall}, Probability{alpha}, r, n};
    if (*kind == RuleKind::Target && r == 0) c.sample_positives = kTargetSetSize;
    return c;
  }
};

struct SimulateArgs {
  RecordSource source;
  RuleArgs rule;
  std::uint64_t reps = 0;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;
};

std::string stats_row(const char* name, const BoxplotStats& s) {
  std::ostringstream os;
  os << name << ',' << s.count << ',' << exact(s.q1) << ',' << exact(s.median) << ','
     << exact(s.q3) << ',' << exact(s.mean) << ',' << exact(s.whisker_lo) << ','
     << exact(s.whisker_hi) << ',' << s.outliers.size() << '\n';
  return os.str();
}

int cmd_simulate(const SimulateArgs& a, const CLI::App& app) {
  guard_not_input(a.out, a.source.record_path);
  const auto record = a.source.load(a.seed);
  const auto config = a.rule.config();
  const auto summary = replicate(record, config, a.reps, a.seed, a.threads);

  std::ostringstream rows;
  rows << "rep,seed,stop_rank,stop_batch,recall,sample_pos,sample_neg,review_pos,review_neg,"
          "phase2_penalty,total_cost\n";
  for (const auto& row : summary.per_rep) {
    const auto& o = row.outcome;
    rows << row.rep << ',' << row.seed << ','
         << (o.stopped() ? std::to_string(*o.stop_rank) : std::string("NO_STOP")) << ','
         << o.stop_batch << ',' << exact(o.achieved_recall.value()) << ',' << o.cost.sample_pos
         << ',' << o.cost.sample_neg << ',' << o.cost.review_pos << ',' << o.cost.review_neg
         << ',' << o.cost.phase2_penalty << ',' << o.cost.total << '\n';
  }
  std::ostringstream stats;
  stats << "metric,count,q1,median,q3,mean,whisker_lo,whisker_hi,outliers\n"
        << stats_row("recall", summary.recall_stats) << stats_row("total_cost", summary.cost_stats);

  Output out("simulate", app, a.seed, a.out);
  out.write("", rows.str());
  if (out.to_file()) out.write(".summary.csv", stats.str());
  out.finish();

  std::ostream& report = out.to_file() ? std::cout : std::cerr;
  report << "rule," << to_string(config.rule) << '\n'
         << "positives_in_record," << record.positive_count() << '\n'
         << "coverage," << fixed(summary.coverage(), 6) << '\n';
  if (config.rule == RuleKind::Qbcb) {
    const double floor = coverage_floor(config.alpha.value(), a.reps);
    report << "coverage_floor," << fixed(floor, 6) << '\n'
           << "coverage_band," << (summary.coverage() >= floor ? "PASS" : "FAIL") << '\n';
  }
  report << "no_stop," << summary.no_stop_count << '\n';
  if (summary.no_stop_count > 0) {
    report << "warning: " << summary.no_stop_count << " of " << a.reps
           << " replications reached the end of the collection without stopping (NO_STOP)\n";
  }
  if (!out.to_file()) report << stats.str();
  return kOk;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  RecordSource source;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& a, const CLI::App& app) {
  if (a.source.model.empty()) throw UsageError("gen requires --model");
  const auto record = a.source.load(a.seed);
  Output out("gen", app, a.seed, a.out);
  out.write("", format_record(record));
  out.finish();
  return kOk;
}

// ---- cost-dynamics --------------------------------------------------------

struct DynamicsArgs {
  RecordSource source;
  double recall = 0.8;
  double alpha = 0.05;
  std::string sizes = "14,30,129,457";
  std::uint64_t reps = 100;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 0;
};

int cmd_cost_dynamics(const DynamicsArgs& a, const CLI::App& app) {
  guard_not_input(a.out, a.source.record_path);
  const Probability t{a.recall}, alpha{a.alpha};
  const auto record = a.source.load(a.seed);
  if (record.batch_size() == 0) {
    throw DomainError("cost-dynamics requires batches: record has batch_size 0 (use --batch-size)");
  }
  const auto sizes = parse_sizes(a.sizes);
  for (auto r : sizes) {
    if (qbcb_index(r, t, alpha).trivial) {
      throw DomainError("sample size " + std::to_string(r) +
                        " gives a trivial QBCB plan; minimum r = " +
                        std::to_string(min_sample_nontrivial(t, alpha)));
    }
  }
  const auto dyn = cost_dynamics(record, t, sizes, a.reps, a.seed, alpha, a.threads);

  std::ostringstream curve;
  curve << "batch,stop_rank,recall,review_pos,review_neg,phase2_penalty_proxy,review_total\n";
  for (const auto& p : dyn.curve) {
    curve << p.batch << ',' << p.stop_rank << ',' << exact(p.recall.value()) << ','
          << p.review_pos << ',' << p.review_neg << ',' << p.phase2_penalty << ','
          << p.review_total << '\n';
  }
  std::ostringstream markers;
  markers << "sample_size,j,worst_rep,worst_seed,stop_batch,total_cost,sample_cost,"
             "mean_sample_cost\n";
  for (const auto& m : dyn.markers) {
    markers << m.sample_size << ',' << m.stop_index << ',' << m.worst_rep << ',' << m.worst_seed
            << ',' << m.stop_batch << ',' << m.total_cost << ',' << m.sample_cost << ','
            << exact(m.mean_sample_cost) << '\n';
  }
  Output out("cost-dynamics", app, a.seed, a.out);
  out.write("", curve.str());
  if (out.to_file()) {
    out.write(".markers.csv", markers.str());
  } else {
    std::cout << '\n' << markers.str();
  }
  out.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stopping rules and sample-size planning for one-phase technology-assisted review"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "QBCB stopping index and recall estimates");
  plan_cmd->add_option("--r", plan.r, "Positive sample size")->required()->check(CLI::PositiveNumber);
  plan_cmd->add_option("--recall", plan.recall, "Recall goal")->capture_default_str();
  plan_cmd->add_option("--alpha", plan.alpha, "1 - confidence")->capture_default_str();
  plan_cmd->add_option("--digits", plan.digits, "Decimals in output")->capture_default_str();

  TableArgs table;
  auto* table_cmd = app.add_subcommand("table", "QBCB stopping-point table");
  table_cmd->add_option("--recall", table.recall, "Recall goal")->capture_default_str();
  table_cmd->add_option("--alpha", table.alpha, "1 - confidence")->capture_default_str();
  table_cmd->add_option("--sizes", table.sizes, "Comma-separated sample sizes");
  table_cmd->add_option("--ceilings", table.ceilings,
                        "Comma-separated upper-bound ceilings (default 0.99..0.86 by 0.01)");
  table_cmd->add_option("--starred", table.starred,
                        "Sizes that also get a j* = j - 1 row");
  table_cmd->add_option("--digits", table.digits, "Decimals in output")->capture_default_str();
  table_cmd->add_option("--out", table.out, "Output CSV path");

  BiasArgs bias;
  auto* bias_cmd = app.add_subcommand("bias-demo", "PET bias on an all-relevant collection");
  bias_cmd->add_option("--N", bias.N, "Collection size (even)")->required()->check(CLI::PositiveNumber);
  bias_cmd->add_option("--n", bias.n, "Sample size (even)")->required()->check(CLI::PositiveNumber);
  bias_cmd->add_option("--reps", bias.reps, "Replications")->capture_default_str()->check(CLI::PositiveNumber);
  bias_cmd->add_option("--seed", bias.seed, "Master seed")->capture_default_str();
  bias_cmd->add_option("--threads", bias.threads, "Worker threads (0 = all cores)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Replicate a stopping rule over random samples");
  sim.source.add_flags(sim_cmd, true);
  sim_cmd->add_option("--rule", sim.rule.rule, "pet, qpet, qbcb, target, countdown")->capture_default_str();
  sim_cmd->add_option("--recall", sim.rule.recall, "Recall goal")->capture_default_str();
  sim_cmd->add_option("--alpha", sim.rule.alpha, "1 - confidence (QBCB)")->capture_default_str();
  sim_cmd->add_option("--r", sim.rule.r, "Positive sample size")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n", sim.rule.n, "Countdown sample total (default: realized draws)");
  sim_cmd->add_option("--reps", sim.reps, "Replications")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output CSV path");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic record");
  gen.source.add_flags(gen_cmd, false);
  gen_cmd->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output record path");

  DynamicsArgs dyn;
  auto* dyn_cmd = app.add_subcommand("cost-dynamics", "Per-batch cost curve and worst QBCB stops");
  dyn.source.add_flags(dyn_cmd, true);
  dyn_cmd->add_option("--recall", dyn.recall, "Recall goal")->capture_default_str();
  dyn_cmd->add_option("--alpha", dyn.alpha, "1 - confidence")->capture_default_str();
  dyn_cmd->add_option("--sizes", dyn.sizes, "Comma-separated sample sizes")->capture_default_str();
  dyn_cmd->add_option("--reps", dyn.reps, "Replications per size")->capture_default_str()->check(CLI::PositiveNumber);
  dyn_cmd->add_option("--seed", dyn.seed, "Master seed")->capture_default_str();
  dyn_cmd->add_option("--out", dyn.out, "Output CSV path");
  dyn_cmd->add_option("--threads", dyn.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
    if (*plan_cmd) return cmd_plan(plan);
    if (*table_cmd) return cmd_table(table, *table_cmd);
    if (*bias_cmd) return cmd_bias_demo(bias);
    if (*sim_cmd) return cmd_simulate(sim, *sim_cmd);
    if (*gen_cmd) return cmd_gen(gen, *gen_cmd);
    if (*dyn_cmd) return cmd_cost_dynamics(dyn, *dyn_cmd);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const ConfigError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const ReplicationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
