#include "dynint/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dynint {
namespace {

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  throw std::runtime_error(std::string("unexpected end of input reading ") +
                           what);
}

}  // namespace

void write_graph_text(std::ostream& os, const GraphSequence& g) {
  os << g.n_individuals() << ' ' << g.horizon() << '\n';
  for (int t = 0; t < g.horizon(); ++t) {
    const auto edges = g.edges(t);
    os << t + 1 << ' ' << edges.size();
    for (const Edge& e : edges) os << ' ' << e.a + 1 << ' ' << e.b + 1;
    os << '\n';
  }
}

GraphSequence read_graph_text(std::istream& is) {
  std::istringstream header(next_line(is, "graph header"));
  int n = 0;
  int horizon = 0;
  if (!(header >> n >> horizon) || n < 1 || horizon < 1) {
    throw std::runtime_error("graph header must be 'N T' with N, T >= 1");
  }
  std::vector<std::vector<Edge>> edges(horizon);
  for (int r = 0; r < horizon; ++r) {
    std::istringstream line(next_line(is, "graph round"));
    int t = 0;
    long m = -1;
    if (!(line >> t >> m) || t != r + 1 || m < 0) {
      throw std::runtime_error("round line " + std::to_string(r + 1) +
                               " must start with 't m'");
    }
    for (long e = 0; e < m; ++e) {
      int a = 0;
      int b = 0;
      if (!(line >> a >> b)) {
        throw std::runtime_error("round " + std::to_string(t) +
                                 " lists fewer pairs than declared");
      }
      edges[r].push_back({a - 1, b - 1});
    }
  }
  return GraphSequence(n, horizon, std::move(edges));
}

void write_design_text(std::ostream& os, const VerticalDesign& d) {
  os << d.n_individuals() << ' ' << d.horizon() << ' ' << d.block_len()
     << '\n';
  for (int k = 0; k < d.n_time_blocks(); ++k) {
    os << k + 1 << ':';
    const auto& p = d.partition(k);
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (b > 0) os << " |";
      for (int i : p[b]) os << ' ' << i + 1;
    }
    os << '\n';
  }
}

VerticalDesign read_design_text(std::istream& is) {
  std::istringstream header(next_line(is, "design header"));
  int n = 0;
  int horizon = 0;
  int block_len = 0;
  if (!(header >> n >> horizon >> block_len)) {
    throw std::runtime_error("design header must be 'N T block_len'");
  }
  const int blocks = time_block_count(horizon, block_len);
  std::vector<Partition> parts;
  for (int k = 0; k < blocks; ++k) {
    const std::string line = next_line(is, "design block");
    const auto colon = line.find(':');
    if (colon == std::string::npos ||
        std::stoi(line.substr(0, colon)) != k + 1) {
      throw std::runtime_error("design block line " + std::to_string(k + 1) +
                               " must start with 'k:'");
    }
    Partition p(1);
    std::istringstream body(line.substr(colon + 1));
    std::string tok;
    while (body >> tok) {
      if (tok == "|") {
        p.emplace_back();
      } else {
        p.back().push_back(std::stoi(tok) - 1);
      }
    }
    parts.push_back(std::move(p));
  }
  return VerticalDesign(n, horizon, block_len, std::move(parts));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& config_hash,
                     const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "# config_hash=" << config_hash << '\n';
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_assignments_csv(const std::filesystem::path& path,
                           const std::string& hash, const AssignmentMatrix& w) {
  CsvWriter csv(path, hash, {"i", "t", "w"});
  for (int i = 0; i < w.n_individuals(); ++i) {
    for (int t = 0; t < w.horizon(); ++t) {
      csv.cell(i + 1).cell(t + 1).cell(w.at(i, t)).end_row();
    }
  }
}

void write_cluster_arms_csv(const std::filesystem::path& path,
                            const std::string& hash, const VerticalDesign& d,
                            const AssignmentMatrix& w) {
  CsvWriter csv(path, hash, {"cluster", "time_block", "spatial_block", "arm"});
  const auto arms = w.cluster_arms();
  for (int c = 0; c < d.n_clusters(); ++c) {
    const ClusterKey& key = d.key(c);
    csv.cell(c + 1)
        .cell(key.time_block + 1)
        .cell(key.spatial_block + 1)
        .cell(static_cast<int>(arms[c]))
        .end_row();
  }
}

void write_outcomes_csv(const std::filesystem::path& path,
                        const std::string& hash, const OutcomePanel& y) {
  CsvWriter csv(path, hash, {"i", "t", "y", "state"});
  for (int i = 0; i < y.n_individuals(); ++i) {
    for (int t = 0; t < y.horizon(); ++t) {
      csv.cell(i + 1).cell(t + 1).cell(y.y(i, t));
      if (y.has_states()) {
        csv.cell(y.state(i, t) + 1);
      } else {
        csv.cell(std::string());
      }
      csv.end_row();
    }
  }
}

void write_ht_csv(const std::filesystem::path& path, const std::string& hash,
                  const HtReport& report) {
  CsvWriter csv(path, hash, {"i", "t", "term", "p", "m"});
  for (int i = 0; i < report.n_individuals; ++i) {
    for (int t = 0; t < report.horizon; ++t) {
      const std::size_t c = static_cast<std::size_t>(i) * report.horizon + t;
      csv.cell(i + 1)
          .cell(t + 1)
          .cell(report.terms[c])
          .cell(report.exposure_probs[c])
          .cell(report.exposure_counts[c])
          .end_row();
    }
  }
}

void write_cd_csv(const std::filesystem::path& path, const std::string& hash,
                  const BoundReport& report) {
  CsvWriter csv(path, hash, {"k", "i", "cd"});
  const int n = report.params.n_individuals;
  const int blocks = n > 0 ? static_cast<int>(report.cd.size()) / n : 0;
  for (int k = 0; k < blocks; ++k) {
    for (int i = 0; i < n; ++i) {
      csv.cell(k + 1).cell(i + 1).cell(report.cd_at(k, i)).end_row();
    }
  }
}

nlohmann::json to_json(const HtReport& report) {
  return {{"r", report.radius},
          {"estimate", report.estimate},
          {"min_p", report.min_probability()},
          {"max_m", report.max_count()},
          {"degenerate", report.any_degenerate()}};
}

nlohmann::json to_json(const BoundReport& report) {
  const auto& p = report.params;
  return {{"params",
           {{"block_len", p.block_len},
            {"r", p.radius},
            {"t_mix", p.t_mix},
            {"sigma", p.sigma},
            {"N", p.n_individuals},
            {"T", p.horizon},
            {"constants",
             {{"bias", p.constants.bias},
              {"covariance", p.constants.covariance},
              {"variance", p.constants.variance},
              {"mse", p.constants.mse}}}}},
          {"cd_avg", report.cd_avg},
          {"cd_max", report.cd_max},
          {"p_min", report.p_min},
          {"m_max", report.m_max},
          {"bias_bound", report.bias_bound},
          {"variance_bound", report.variance_bound},
          {"mse_bound", report.mse_bound},
          {"mse_regime", report.mse_regime}};
}

nlohmann::json to_json(const MomentReport& report) {
  nlohmann::json doc = {{"mode", to_string(report.mode)},
                        {"r", report.radius},
                        {"mean_estimate", report.mean_estimate},
                        {"variance", report.variance},
                        {"true_ate", report.true_ate},
                        {"bias", report.bias},
                        {"mse", report.mse()}};
  if (report.mode == OracleMode::kExact) {
    doc["variance_lotc"] = report.variance_lotc;
    doc["expected_conditional_variance"] = report.expected_conditional_variance;
    doc["variance_of_conditional_mean"] = report.variance_of_conditional_mean;
    doc["groups"] = report.n_groups;
    doc["max_group_clusters"] = report.max_group_clusters;
    doc["assignments"] = report.assignments;
  } else {
    doc["replications"] = report.replications;
    doc["se_mean"] = report.se_mean;
    doc["se_variance"] = report.se_variance;
    doc["rao_blackwell"] = report.rao_blackwell;
  }
  return doc;
}

nlohmann::json to_json(const LedgerRow& row) {
  return {{"name", row.name},           {"measured", row.measured},
          {"bound", row.bound},         {"margin", row.margin},
          {"verdict", to_string(row.verdict)},
          {"checked", row.checked},     {"violations", row.violations},
          {"detail", row.detail}};
}

nlohmann::json to_json(const Ledger& ledger) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : ledger.rows) rows.push_back(to_json(r));
  return {{"mode", to_string(ledger.mode)},
          {"all_pass", ledger.all_pass()},
          {"bounds", to_json(ledger.bounds)},
          {"moments", to_json(ledger.moments)},
          {"rows", rows}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace dynint
