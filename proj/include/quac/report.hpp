#pragma once

// Flat-file renderings of experiment records. Per-trial CSV rows carry every
// field aggregates are computed from, so re-aggregating a CSV reproduces
// the in-memory summary exactly. Wall time is kept out of the CSV so that
// identical specs produce byte-identical files.

#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/error.hpp"
#include "quac/harness.hpp"

namespace quac {

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace detail

inline const char* kTrialCsvHeader =
    "dataset,algorithm,graph_eps,trial,skipped,skip_reason,success,iterations,converged,ari,inertia,"
    "det_criterion,graph_vertices,components,evolutions,lloyd_monotone";

inline void write_trials_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw InputError("report: no records");
  os << kTrialCsvHeader << '\n';
  for (const auto& r : records)
    for (const auto& t : r.trials)
      os << detail::csv_escape(r.dataset_name()) << ',' << to_string(r.spec.algorithm) << ','
         << detail::fmt(r.graph_eps) << ',' << t.trial << ',' << int(t.skipped) << ','
         << detail::csv_escape(t.skip_reason) << ',' << int(t.success) << ',' << t.iterations << ','
         << int(t.converged) << ',' << detail::fmt(t.ari) << ',' << detail::fmt(t.inertia) << ','
         << detail::fmt(t.det_criterion) << ',' << t.graph_vertices << ',' << t.components << ','
         << t.evolutions << ',' << int(t.lloyd_monotone) << '\n';
}

/// Groups rows by (dataset, algorithm, graph_eps) in first-seen order and
/// recomputes each group's aggregate.
inline std::vector<ExperimentRecord> read_trials_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrialCsvHeader) throw InputError("trials csv: unexpected header");
  std::vector<ExperimentRecord> out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> group;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = detail::csv_split(line);
    if (c.size() != 16) throw InputError("trials csv: wrong column count on line " + std::to_string(line_no));
    try {
      const auto key = std::make_tuple(c[0], c[1], c[2]);
      auto it = group.find(key);
      if (it == group.end()) {
        ExperimentRecord r;
        r.spec.dataset = {{"generator", c[0]}};
        r.spec.algorithm = parse_algorithm(c[1]);
        r.graph_eps = std::stod(c[2]);
        r.spec.graph_eps = {r.graph_eps};
        out.push_back(std::move(r));
        it = group.emplace(key, out.size() - 1).first;
      }
      TrialRecord t;
      t.trial = std::stoull(c[3]);
      t.skipped = c[4] == "1";
      t.skip_reason = c[5];
      t.success = c[6] == "1";
      t.iterations = std::stoi(c[7]);
      t.converged = c[8] == "1";
      t.ari = std::stod(c[9]);
      t.inertia = std::stod(c[10]);
      t.det_criterion = std::stod(c[11]);
      t.graph_vertices = std::stoull(c[12]);
      t.components = std::stoull(c[13]);
      t.evolutions = std::stoull(c[14]);
      t.lloyd_monotone = c[15] == "1";
      out[it->second].trials.push_back(std::move(t));
    } catch (const std::logic_error&) {
      throw InputError("trials csv: unparsable value on line " + std::to_string(line_no));
    }
  }
  if (out.empty()) throw InputError("trials csv: no rows");
  for (auto& r : out) {
    r.spec.trials = r.trials.size();
    r.summary = aggregate(r.trials);
  }
  return out;
}

inline nlohmann::json to_json(const SummaryStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}};
}

inline nlohmann::json to_json(const Aggregate& a) {
  return {{"trials", a.trials},
          {"completed", a.completed},
          {"skipped", a.skipped},
          {"successes", a.successes},
          {"success_rate", a.success_rate},
          {"wilson_95", {a.wilson_low, a.wilson_high}},
          {"iterations_success", to_json(a.iterations_success)},
          {"iterations_failure", to_json(a.iterations_failure)},
          {"ari", {{"mean", a.ari_mean},
                   {"min", a.ari_min},
                   {"q1", a.ari_q1},
                   {"median", a.ari_median},
                   {"q3", a.ari_q3},
                   {"max", a.ari_max}}}};
}

inline nlohmann::json to_json(const TrialRecord& t) {
  nlohmann::json j = {{"trial", t.trial},
                      {"skipped", t.skipped},
                      {"success", t.success},
                      {"iterations", t.iterations},
                      {"converged", t.converged},
                      {"ari", t.ari},
                      {"inertia", t.inertia},
                      {"det_criterion", t.det_criterion},
                      {"graph_vertices", t.graph_vertices},
                      {"components", t.components},
                      {"evolutions", t.evolutions},
                      {"lloyd_monotone", t.lloyd_monotone},
                      {"wall_seconds", t.wall_seconds}};
  if (t.skipped) j["skip_reason"] = t.skip_reason;
  return j;
}

inline nlohmann::json to_json(const ExperimentRecord& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  return {{"spec", to_json(r.spec)}, {"graph_eps", r.graph_eps}, {"summary", to_json(r.summary)}, {"trials", trials}};
}

inline nlohmann::json to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) j.push_back(to_json(r));
  return j;
}

inline std::string percent(double x, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << 100.0 * x << '%';
  return os.str();
}

inline std::string mean_pm(const SummaryStats& s) {
  if (s.count == 0) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s.mean << "+-" << s.stddev;
  return os.str();
}

/// Success rate and iteration counts, one block per dataset.
inline std::string table2_text(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw InputError("report: no records");
  std::ostringstream os;
  os << std::left << std::setw(10) << "Algorithm" << std::setw(10) << "eps" << std::setw(26) << "Success Rate (95% CI)"
     << std::setw(30) << "# Iterations when Successful" << "# Iterations when Failed\n";
  std::string current;
  for (const auto& r : records) {
    if (r.dataset_name() != current) {
      current = r.dataset_name();
      os << "[" << current << "]\n";
    }
    std::ostringstream rate;
    rate << percent(r.summary.success_rate) << " (" << percent(r.summary.wilson_low, 1) << "-"
         << percent(r.summary.wilson_high, 1) << ")";
    os << std::setw(10) << to_string(r.spec.algorithm) << std::setw(10) << detail::fmt(r.graph_eps)
       << std::setw(26) << rate.str() << std::setw(30) << mean_pm(r.summary.iterations_success)
       << mean_pm(r.summary.iterations_failure) << '\n';
  }
  return os.str();
}

inline std::string table1_text(const std::vector<PartitionScore>& parts) {
  if (parts.empty()) throw InputError("report: no partitions");
  std::ostringstream os;
  os << std::left << std::setw(14) << "" << std::setw(20) << "Inertia" << "|S_W|\n" << std::fixed << std::setprecision(3);
  for (const auto& p : parts) os << std::setw(14) << p.name << std::setw(20) << p.inertia << p.det_criterion << '\n';
  return os.str();
}

/// One row per (dataset, algorithm, eps): ARI five-number summary.
inline void write_boxplot_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw InputError("report: no records");
  os << "dataset,algorithm,graph_eps,completed,skipped,ari_min,ari_q1,ari_median,ari_q3,ari_max,ari_mean\n";
  for (const auto& r : records) {
    const auto& a = r.summary;
    os << detail::csv_escape(r.dataset_name()) << ',' << to_string(r.spec.algorithm) << ',' << detail::fmt(r.graph_eps)
       << ',' << a.completed << ',' << a.skipped << ',' << detail::fmt(a.ari_min) << ',' << detail::fmt(a.ari_q1) << ','
       << detail::fmt(a.ari_median) << ',' << detail::fmt(a.ari_q3) << ',' << detail::fmt(a.ari_max) << ','
       << detail::fmt(a.ari_mean) << '\n';
  }
}

/// One row per (dataset, algorithm, eps): success rate with Wilson bounds.
inline void write_lineplot_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw InputError("report: no records");
  os << "dataset,algorithm,graph_eps,completed,successes,success_rate,wilson_low,wilson_high\n";
  for (const auto& r : records) {
    const auto& a = r.summary;
    os << detail::csv_escape(r.dataset_name()) << ',' << to_string(r.spec.algorithm) << ',' << detail::fmt(r.graph_eps)
       << ',' << a.completed << ',' << a.successes << ',' << detail::fmt(a.success_rate) << ','
       << detail::fmt(a.wilson_low) << ',' << detail::fmt(a.wilson_high) << '\n';
  }
}

/// Per-vertex probabilities, one column per QCI iteration.
inline void write_snapshots_csv(std::ostream& os, const std::vector<QciSnapshot>& snaps, const LabeledDataset& sample) {
  if (snaps.empty()) throw InputError("report: no snapshots");
  os << "id,x,y,label";
  for (std::size_t i = 0; i < snaps.size(); ++i) os << ",p" << (i + 1);
  os << '\n';
  for (std::size_t r = 0; r < sample.size(); ++r) {
    const VertexId id = sample.cloud.id(r);
    os << id << ',' << detail::fmt(sample.cloud.point(r)(0)) << ','
       << detail::fmt(sample.cloud.dim() > 1 ? sample.cloud.point(r)(1) : 0.0) << ',' << sample.truth[r];
    for (const auto& s : snaps) os << ',' << detail::fmt(s.outcome.distribution.probability(id));
    os << '\n';
  }
}

}  // namespace quac
