#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cgla/offload.hpp"
#include "cgla/packing.hpp"
#include "cgla/perfmodel.hpp"
#include "cgla/workload.hpp"

namespace cgla {

enum class Format { Csv, Markdown, Json };
Format parse_format(std::string_view text);

/// A rectangular table of already formatted cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const Table& table);
std::string render_markdown(const Table& table);

Table trace_table(const WorkloadTrace& trace);
Table coverage_table(const CoverageTable& coverage);
Table assignment_table(const Assignment& assignment);
Table assignment_detail_table(const WorkloadTrace& trace, const Assignment& assignment);
Table burst_sweep_table(const std::vector<BurstSweepRow>& rows);
Table report_table(const SimReport& report);
Table lmm_sweep_table(const std::vector<LmmSweepRow>& rows);
Table comparison_table(const Comparison& comparison);

using json = nlohmann::ordered_json;

json to_json(const WorkloadTrace& trace);
json to_json(const CoverageTable& coverage);
json to_json(const Assignment& assignment);
json to_json(const std::vector<BurstSweepRow>& rows);
json to_json(const SimReport& report);
json to_json(const std::vector<LmmSweepRow>& rows);
json to_json(const Comparison& comparison);

/// Inverses of the to_json overloads above. Throw ValidationError on a
/// malformed document.
WorkloadTrace trace_from_json(const json& j);
CoverageTable coverage_from_json(const json& j);
SimReport report_from_json(const json& j);
std::vector<LmmSweepRow> lmm_sweep_from_json(const json& j);
Comparison comparison_from_json(const json& j);

/// Pretty JSON text with a trailing newline.
std::string dump(const json& j);

}  // namespace cgla
