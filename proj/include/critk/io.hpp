#pragma once
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critk/game.hpp"
#include "critk/graph.hpp"
#include "critk/select.hpp"

namespace critk {

// RFC-4180 field quoting (only when the value needs it) and shortest
// round-trip double formatting; all emitters below build on these two so
// equal runs produce byte-identical files.
std::string csv_field(std::string_view raw);
std::string format_double(double v);
std::vector<std::string> split_csv_line(std::string_view line);  // quote-aware

// Allocation interchange CSV: header node,value or node,value,stderr; the
// node column carries graph names.
void write_allocation_csv(std::ostream& os, const Graph& g, const Allocation& alloc);
void write_allocation_csv_file(const std::string& path, const Graph& g,
                               const Allocation& alloc);
Allocation read_allocation_csv(std::istream& is, const Graph& g);
Allocation read_allocation_csv_file(const std::string& path, const Graph& g);

// Selection CSV: header rank,node,phase (phase in {primary, fallback}).
void write_selection_csv(std::ostream& os, const Graph& g, const Selection& sel);
void write_selection_csv_file(const std::string& path, const Graph& g,
                              const Selection& sel);

// Audit trail: one JSON object per step — step, node, phase, value (when the
// method has one), skipped[{node,blocker,reason}], discounts[{node,old,new}].
void write_audit_jsonl(std::ostream& os, const Graph& g, const Selection& sel);
void write_audit_jsonl_file(const std::string& path, const Graph& g, const Selection& sel);

struct ResultRow {
    std::string method;
    int k = 0;
    std::vector<std::string> chosen;  // node names in pick order
    double spread_mean = 0.0;
    double spread_stderr = 0.0;
    std::uint64_t nu_calls = 0;
    std::uint64_t ms = 0;
    std::uint64_t sim_seed = 0;
    std::uint64_t perm_seed = 0;
    std::uint64_t tie_seed = 0;
};

inline constexpr std::string_view kResultHeader =
    "method,k,chosen,spread_mean,spread_stderr,nu_calls,ms,sim_seed,perm_seed,tie_seed";

void write_result_csv(std::ostream& os, std::span<const ResultRow> rows);
void write_result_csv_file(const std::string& path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_result_csv(std::istream& is);
std::vector<ResultRow> read_result_csv_file(const std::string& path);

}  // namespace critk
