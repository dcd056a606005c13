#ifndef DYNINT_IO_HPP_
#define DYNINT_IO_HPP_

// Text and CSV/JSON exports. All files use 1-based individuals and rounds.

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynint/analysis.hpp"
#include "dynint/design.hpp"
#include "dynint/env.hpp"
#include "dynint/estimator.hpp"
#include "dynint/graphs.hpp"
#include "dynint/oracle.hpp"

namespace dynint {

// Header "N T", then one line per round: "t m i1 j1 ... im jm".
void write_graph_text(std::ostream& os, const GraphSequence& g);
GraphSequence read_graph_text(std::istream& is);

// "N T block_len", then one line per time block: "k: 1 2 | 3 4".
void write_design_text(std::ostream& os, const VerticalDesign& d);
VerticalDesign read_design_text(std::istream& is);

// Shortest text that reads back to the same double.
std::string format_double(double v);

// CSV with a leading "# config_hash=<hash>" comment and a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            const std::vector<std::string>& header);

  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_assignments_csv(const std::filesystem::path& path,
                           const std::string& hash, const AssignmentMatrix& w);
void write_cluster_arms_csv(const std::filesystem::path& path,
                            const std::string& hash, const VerticalDesign& d,
                            const AssignmentMatrix& w);
void write_outcomes_csv(const std::filesystem::path& path,
                        const std::string& hash, const OutcomePanel& y);
void write_ht_csv(const std::filesystem::path& path, const std::string& hash,
                  const HtReport& report);
void write_cd_csv(const std::filesystem::path& path, const std::string& hash,
                  const BoundReport& report);

nlohmann::json to_json(const HtReport& report);  // summary only
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const MomentReport& report);  // no pair table
nlohmann::json to_json(const LedgerRow& row);
nlohmann::json to_json(const Ledger& ledger);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace dynint

#endif  // DYNINT_IO_HPP_
