#include "optboost/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <limits>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv_format.hpp"
#include "optboost/diagnostics.hpp"
#include "optboost/geometry.hpp"
#include "optboost/stumps.hpp"

namespace optboost {

using nlohmann::json;

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

bool filesystem_safe(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           c == '.';
  });
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc,
             {"run_id", "dataset", "split", "init", "rounds", "equivalence_eps",
              "tie_tol", "include_constant", "snapshots", "checkpoints_per_decade",
              "margin_rounds", "diagnostics", "cycle", "support_vectors",
              "output_dir"},
             "config");

  ExperimentConfig cfg;
  cfg.config_hash = fnv1a_hex(doc.dump());
  cfg.run_id = get_or<std::string>(doc, "run_id", "");
  if (!filesystem_safe(cfg.run_id)) {
    throw ConfigError("run_id must be nonempty and use only [A-Za-z0-9._-]");
  }

  if (!doc.contains("dataset")) throw ConfigError("config needs a dataset");
  const json& ds = doc.at("dataset");
  check_keys(ds, {"path", "label_column", "label_mapping"}, "dataset");
  const auto path = get_or<std::string>(ds, "path", "");
  if (path.empty()) throw ConfigError("dataset.path is required");
  cfg.dataset.path = base_dir / path;
  if (ds.contains("label_column")) {
    const json& col = ds.at("label_column");
    if (col.is_string()) {
      cfg.dataset.label_column = col.get<std::string>();
    } else if (col.is_number_unsigned()) {
      cfg.dataset.label_column = col.get<std::size_t>();
    } else {
      throw ConfigError("dataset.label_column must be a name or an index");
    }
  }
  if (ds.contains("label_mapping")) {
    cfg.dataset.label_mapping.clear();
    for (const auto& [raw, value] : ds.at("label_mapping").items()) {
      if (!value.is_number_integer() || (value.get<int>() != 1 && value.get<int>() != -1)) {
        throw ConfigError("label_mapping values must be -1 or 1");
      }
      cfg.dataset.label_mapping[raw] = value.get<int>();
    }
  }

  if (doc.contains("split")) {
    const json& sp = doc.at("split");
    check_keys(sp, {"test_fraction", "seed"}, "split");
    cfg.split = SplitSpec{get_or<double>(sp, "test_fraction", 0.5),
                          get_or<std::uint64_t>(sp, "seed", 0)};
  }

  if (doc.contains("init")) {
    const json& in = doc.at("init");
    check_keys(in, {"mode", "seed"}, "init");
    const auto mode = get_or<std::string>(in, "mode", "uniform");
    if (mode == "uniform") {
      cfg.init = UniformInit{};
    } else if (mode == "random_simplex") {
      cfg.init = RandomSimplexInit{get_or<std::uint64_t>(in, "seed", 0)};
    } else {
      throw ConfigError("init.mode must be 'uniform' or 'random_simplex'");
    }
  }

  cfg.rounds = get_or<std::size_t>(doc, "rounds", 0);
  if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");
  cfg.equivalence_eps = get_or<double>(doc, "equivalence_eps", cfg.equivalence_eps);
  if (!(cfg.equivalence_eps >= 0.0)) throw ConfigError("equivalence_eps must be >= 0");
  cfg.tie_tol = get_or<double>(doc, "tie_tol", cfg.tie_tol);
  if (!(cfg.tie_tol >= 0.0)) throw ConfigError("tie_tol must be >= 0");
  cfg.include_constant = get_or<bool>(doc, "include_constant", false);

  if (doc.contains("snapshots")) {
    const json& sn = doc.at("snapshots");
    check_keys(sn, {"dense_until", "per_decade"}, "snapshots");
    cfg.snapshots.dense_until = get_or<std::size_t>(sn, "dense_until", 1000);
    cfg.snapshots.per_decade = get_or<std::size_t>(sn, "per_decade", 20);
  }
  cfg.checkpoints_per_decade =
      get_or<std::size_t>(doc, "checkpoints_per_decade", cfg.checkpoints_per_decade);
  cfg.margin_rounds = get_or<std::vector<std::size_t>>(doc, "margin_rounds", cfg.margin_rounds);

  if (doc.contains("diagnostics")) {
    const json& dg = doc.at("diagnostics");
    check_keys(dg,
               {"tie_gap", "margins", "support_vectors", "cycles", "birkhoff",
                "test_error", "dump_matrix", "dump_segments"},
               "diagnostics");
    auto& t = cfg.diagnostics;
    t.tie_gap = get_or<bool>(dg, "tie_gap", t.tie_gap);
    t.margins = get_or<bool>(dg, "margins", t.margins);
    t.support_vectors = get_or<bool>(dg, "support_vectors", t.support_vectors);
    t.cycles = get_or<bool>(dg, "cycles", t.cycles);
    t.birkhoff = get_or<bool>(dg, "birkhoff", t.birkhoff);
    t.test_error = get_or<bool>(dg, "test_error", t.test_error);
    t.dump_matrix = get_or<bool>(dg, "dump_matrix", t.dump_matrix);
    t.dump_segments = get_or<bool>(dg, "dump_segments", t.dump_segments);
  }
  if (doc.contains("cycle")) {
    const json& cy = doc.at("cycle");
    check_keys(cy, {"tol", "max_period"}, "cycle");
    cfg.cycle_tol = get_or<double>(cy, "tol", cfg.cycle_tol);
    cfg.cycle_max_period = get_or<std::size_t>(cy, "max_period", cfg.cycle_max_period);
  }
  if (doc.contains("support_vectors")) {
    const json& sv = doc.at("support_vectors");
    check_keys(sv, {"weight_tol", "margin_tol"}, "support_vectors");
    cfg.support_weight_tol = get_or<double>(sv, "weight_tol", cfg.support_weight_tol);
    cfg.support_margin_tol = get_or<double>(sv, "margin_tol", cfg.support_margin_tol);
  }
  cfg.output_dir = base_dir / get_or<std::string>(doc, "output_dir", cfg.run_id);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::vector<std::size_t> checkpoint_rounds(const ExperimentConfig& config) {
  const std::size_t T = config.rounds;
  std::set<std::size_t> rounds;
  for (std::size_t t : SnapshotSchedule{0, config.checkpoints_per_decade}.rounds_up_to(T)) {
    rounds.insert(t);
  }
  for (std::size_t t : config.margin_rounds) {
    if (t >= 1 && t <= T) rounds.insert(t);
  }
  rounds.insert(std::max<std::size_t>(T / 2, 1));
  rounds.insert(std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(T))), 1));
  rounds.insert(T);
  return {rounds.begin(), rounds.end()};
}

namespace {

std::string fmt(double v) { return detail::format_double(v); }

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

// run_id,T,metric,key,value
class LongCsv {
 public:
  LongCsv(const std::filesystem::path& path, std::string run_id)
      : out_(path, std::ios::binary), run_id_(std::move(run_id)) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "run_id,T,metric,key,value\n";
  }
  void add(std::size_t T, const std::string& metric, const std::string& key,
           const std::string& value) {
    out_ << run_id_ << ',' << T << ',' << metric << ',' << key << ',' << value << '\n';
  }
  void add(std::size_t T, const std::string& metric, const std::string& key, double v) {
    add(T, metric, key, fmt(v));
  }

 private:
  std::ofstream out_;
  std::string run_id_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_rounds(const std::filesystem::path& path, const Trajectory& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,selected_row,eps_t,alpha_t,tie_gap,merged_away,min_row_error\n";
  for (const auto& r : tr.rounds) {
    out << r.t << ',' << r.selected_row << ',' << fmt(r.eps) << ',' << fmt(r.alpha)
        << ',' << (r.tie_gap ? fmt(*r.tie_gap) : std::string()) << ','
        << r.merged_away << ',' << fmt(r.min_row_error) << '\n';
  }
}

json halt_json(const HaltReason& halt) {
  json j{{"reason", to_string(halt.kind)}, {"t", halt.t}};
  if (halt.kind == HaltReason::Kind::kZeroError) j["row"] = halt.row;
  return j;
}

json stump_json(const Stump& h) {
  return {{"feature_index", h.feature},
          {"threshold", number_or_string(h.threshold)},
          {"polarity", h.polarity}};
}

const Checkpoint* find_checkpoint(const std::vector<Checkpoint>& cps, std::size_t T) {
  for (const auto& cp : cps) {
    if (cp.T == T) return &cp;
  }
  return nullptr;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  ExperimentOutcome outcome;
  outcome.output_dir = config.output_dir;
  fs::create_directories(config.output_dir);
  const fs::path dir = config.output_dir;

  Dataset data = load_csv(config.dataset.path, config.dataset.label_column,
                          config.dataset.label_mapping);
  std::optional<Dataset> test;
  if (config.split) {
    auto parts = split(data, config.split->test_fraction, config.split->seed);
    data = std::move(parts.first);
    test = std::move(parts.second);
  }

  json summary;
  summary["run_id"] = config.run_id;
  summary["config_hash"] = config.config_hash;
  summary["dataset"] = {{"train_examples", data.size()},
                        {"features", data.num_features()},
                        {"test_examples", test ? test->size() : 0}};

  const auto stumps = enumerate_stumps(data, {config.include_constant});
  DichotomyMatrix matrix;
  try {
    matrix = build_matrix(data, stumps);
  } catch (const PerfectHypothesisError& e) {
    outcome.exit_code = kExitHalted;
    outcome.halt = {HaltReason::Kind::kZeroError, 0, 1};
    json halt{{"reason", "zero_error"}, {"t", 1}, {"perfect_stump", stump_json(e.stump())}};
    summary["halt"] = halt;
    summary["rounds_completed"] = 0;
    summary["matrix"] = {{"stumps", stumps.size()}, {"rows", 0}};
    write_rounds(dir / "rounds.csv", Trajectory{});
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    json error{{"status", "zero_error"}, {"message", e.what()},
               {"perfect_stump", stump_json(e.stump())}};
    write_text(dir / "error.json", error.dump(2) + "\n");
    return outcome;
  }
  summary["matrix"] = {{"stumps", stumps.size()}, {"rows", matrix.rows()}};
  if (config.diagnostics.dump_matrix) {
    write_matrix_csv(matrix, dir / "matrix.csv");
    write_representatives_json(matrix, dir / "representatives.json");
  }

  RunOptions options;
  options.rounds = config.rounds;
  options.tie_tol = config.tie_tol;
  if (config.diagnostics.tie_gap) options.equivalence_eps = config.equivalence_eps;
  options.snapshots = config.snapshots;
  options.checkpoints = checkpoint_rounds(config);
  if (config.diagnostics.cycles) options.tail_length = 4 * config.cycle_max_period + 1;

  const WeightVector w1 = init_weight(config.init, data.size());
  RunResult result = run(matrix, w1, options);
  const Trajectory& tr = result.trajectory;
  outcome.halt = result.halt;
  outcome.exit_code = result.halt.completed() ? kExitCompleted : kExitHalted;

  write_rounds(dir / "rounds.csv", tr);
  summary["halt"] = halt_json(result.halt);
  summary["rounds_completed"] = tr.rounds_completed();
  summary["min_row_error"] = {{"overall", number_or_string(tr.min_error_overall)},
                              {"after_burn_in", number_or_string(tr.min_error_after_burn_in)},
                              {"burn_in", tr.burn_in}};

  LongCsv diag(dir / "diagnostics.csv", config.run_id);
  const bool have_rounds = tr.rounds_completed() > 0;

  if (have_rounds && config.diagnostics.margins) {
    std::set<std::size_t> dump_rounds(config.margin_rounds.begin(), config.margin_rounds.end());
    dump_rounds.insert(config.rounds);
    std::vector<MarginSnapshot> snaps;
    for (const auto& cp : tr.checkpoints) snaps.push_back(margins(cp));
    for (const auto& snap : snaps) {
      if (!dump_rounds.count(snap.T)) continue;
      const std::string tag = "_T" + std::to_string(snap.T) + ".csv";
      LongCsv mcsv(dir / ("margins" + tag), config.run_id);
      for (std::size_t i = 0; i < snap.beta.size(); ++i) {
        mcsv.add(snap.T, "beta", std::to_string(i), snap.beta[i]);
      }
      mcsv.add(snap.T, "min_margin", "all", snap.min_margin);
      LongCsv hcsv(dir / ("histogram" + tag), config.run_id);
      for (std::size_t k = 0; k < snap.histogram.size(); ++k) {
        hcsv.add(snap.T, "histogram", fmt(histogram_bin_lower(k)),
                 std::to_string(snap.histogram[k]));
      }
    }
    if (!snaps.empty()) {
      for (const auto& [T, mm] : min_margin_trace(snaps)) diag.add(T, "min_margin", "all", mm);
    }
    const auto final_snap = margins(tr);
    summary["min_margin"] = final_snap.min_margin;

    const Checkpoint* late = find_checkpoint(
        tr.checkpoints, static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(config.rounds))));
    if (result.halt.completed() && late) {
      const auto late_snap = margins(*late);
      double drift = 0.0;
      for (std::size_t i = 0; i < final_snap.beta.size(); ++i) {
        drift = std::max(drift, std::abs(final_snap.beta[i] - late_snap.beta[i]));
      }
      summary["margin_drift_from_0.9T"] = drift;
    }

    if (config.diagnostics.support_vectors && result.halt.completed()) {
      const auto sv = support_vectors(tr.final_weight, final_snap, data.labels(),
                                      config.support_weight_tol, config.support_margin_tol);
      summary["support_vectors"] = {
          {"support_set", sv.support_set},
          {"by_weight", sv.by_weight},
          {"by_margin", sv.by_margin},
          {"criteria_agree", sv.criteria_agree},
          {"has_positive", sv.has_positive},
          {"has_negative", sv.has_negative},
          {"min_margin", sv.min_margin},
          {"weighted_margin", sv.weighted_margin},
          {"weighted_margin_gap", std::abs(sv.weighted_margin - sv.min_margin)}};
      for (std::size_t i = 0; i < sv.final_weight.size(); ++i) {
        diag.add(tr.rounds_completed(), "final_weight", std::to_string(i), sv.final_weight[i]);
        diag.add(tr.rounds_completed(), "margin_distance", std::to_string(i),
                 sv.margin_distance[i]);
      }
    }
  }

  if (have_rounds) {
    const auto freqs = selection_frequencies(tr.current_checkpoint());
    json fj = json::array();
    for (const auto& f : freqs) {
      fj.push_back({{"row", f.row}, {"count", f.count},
                    {"count_fraction", f.count_fraction},
                    {"mass_fraction", f.mass_fraction}});
      diag.add(tr.rounds_completed(), "selection_count_fraction", std::to_string(f.row),
               f.count_fraction);
      diag.add(tr.rounds_completed(), "selection_mass_fraction", std::to_string(f.row),
               f.mass_fraction);
    }
    summary["selection_frequencies"] = fj;
    const Checkpoint* half = find_checkpoint(tr.checkpoints, std::max<std::size_t>(config.rounds / 2, 1));
    if (result.halt.completed() && half) {
      summary["frequency_l1_from_half"] = frequency_l1(tr.current_checkpoint(), *half);
    }

    const auto unique = unique_hypothesis_trace(tr);
    json uj = json::array();
    for (const auto& cp : tr.checkpoints) {
      const std::size_t count = unique[cp.T - 1].second;
      uj.push_back({cp.T, count});
      diag.add(cp.T, "unique_hypotheses", "all", std::to_string(count));
    }
    summary["unique_hypothesis_trace"] = uj;

    if (config.diagnostics.birkhoff) {
      std::vector<double> alphas;
      alphas.reserve(tr.rounds.size());
      for (const auto& r : tr.rounds) alphas.push_back(r.alpha);
      const auto avg = birkhoff_average(alphas);
      json bj = json::array();
      for (const auto& c : avg.checkpoints) {
        bj.push_back({{"T", c.T}, {"mean", c.mean}, {"drift", c.drift}});
        diag.add(c.T, "birkhoff_alpha_mean", "all", c.mean);
        diag.add(c.T, "birkhoff_alpha_drift", "all", c.drift);
      }
      summary["birkhoff_alpha"] = bj;
    }

    if (config.diagnostics.tie_gap) {
      const std::size_t n = tr.rounds.size();
      double min_late_gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = n / 2; k < n; ++k) {
        if (tr.rounds[k].tie_gap) min_late_gap = std::min(min_late_gap, *tr.rounds[k].tie_gap);
      }
      summary["tie_gap"] = {{"equivalence_eps", config.equivalence_eps},
                            {"min_over_final_half", number_or_string(min_late_gap)}};
    }
  }

  if (config.diagnostics.cycles) {
    json cj{{"found", false}, {"tol", config.cycle_tol}, {"max_period", config.cycle_max_period}};
    if (auto cycle = cycle_detect(tr.tail, config.cycle_tol, config.cycle_max_period)) {
      cj["found"] = true;
      cj["start"] = cycle->start;
      cj["period"] = cycle->period;
      cj["replay_distance"] = number_or_string(
          cycle_replay_distance(matrix, tr.tail.back().w, cycle->period, config.tie_tol));
    }
    summary["cycle"] = cj;
  }

  if (test && config.diagnostics.test_error && have_rounds) {
    LongCsv tcsv(dir / "test_error.csv", config.run_id);
    for (const auto& p : generalization_curve(tr.checkpoints, *test, matrix.representatives())) {
      tcsv.add(p.T, "test_error", "all", p.error);
      tcsv.add(p.T, "zero_scores", "all", std::to_string(p.zero_scores));
    }
  }

  if (config.diagnostics.dump_segments) {
    write_text(dir / "segments.json",
               segments_to_json(a_inverse(matrix, tr.final_weight.values())) + "\n");
  }

  write_text(dir / "summary.json", summary.dump(2) + "\n");
  if (!result.halt.completed()) {
    json error{{"status", to_string(result.halt.kind)}, {"halt", halt_json(result.halt)}};
    write_text(dir / "error.json", error.dump(2) + "\n");
  }
  return outcome;
}

std::string inspect(const std::filesystem::path& output_dir) {
  std::ifstream in(output_dir / "summary.json");
  if (!in) throw ConfigError("no summary.json in " + output_dir.string());
  json s;
  try {
    s = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary.json is not valid JSON: ") + e.what());
  }
  std::ostringstream out;
  out << "run_id:            " << s.value("run_id", "?") << '\n'
      << "config_hash:       " << s.value("config_hash", "?") << '\n'
      << "halt:              " << s["halt"].value("reason", "?") << " at t="
      << s["halt"].value("t", 0) << '\n'
      << "rounds_completed:  " << s.value("rounds_completed", 0) << '\n'
      << "matrix rows:       " << s["matrix"].value("rows", 0) << " (from "
      << s["matrix"].value("stumps", 0) << " stumps)\n";
  if (s.contains("min_margin")) out << "min_margin:        " << s["min_margin"].dump() << '\n';
  if (s.contains("margin_drift_from_0.9T")) {
    out << "margin drift:      " << s["margin_drift_from_0.9T"].dump() << '\n';
  }
  if (s.contains("min_row_error")) {
    out << "min row error:     " << s["min_row_error"]["after_burn_in"].dump()
        << " after burn-in " << s["min_row_error"]["burn_in"].dump() << '\n';
  }
  if (s.contains("support_vectors")) {
    const auto& sv = s["support_vectors"];
    out << "support vectors:   " << sv["support_set"].size()
        << " (criteria agree: " << sv["criteria_agree"].dump() << ")\n";
  }
  if (s.contains("selection_frequencies")) {
    out << "rows selected:     " << s["selection_frequencies"].size() << '\n';
  }
  if (s.contains("cycle")) {
    const auto& c = s["cycle"];
    out << "cycle:             "
        << (c.value("found", false)
                ? "period " + c["period"].dump() + " from t=" + c["start"].dump()
                : std::string("none"))
        << '\n';
  }
  return out.str();
}

}  // namespace optboost
