#include "critk/io.hpp"

#include <charconv>
#include <optional>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "critk/errors.hpp"

namespace critk {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view text, std::size_t line_no) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        line_error(line_no, "bad number '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view text, std::size_t line_no) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        line_error(line_no, "bad count '" + std::string(text) + "'");
    return v;
}

int parse_int(std::string_view text, std::size_t line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        line_error(line_no, "bad integer '" + std::string(text) + "'");
    return v;
}

// Line-based reader shared by the CSV parsers; strips trailing '\r'.
std::vector<std::string> read_lines(std::istream& is) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path + "'");
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read '" + path + "'");
    return is;
}

std::string join_semicolon(std::span<const std::string> parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ';';
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_semicolon(std::string_view text) {
    std::vector<std::string> parts;
    if (text.empty()) return parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(';', start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            return parts;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::string csv_field(std::string_view raw) {
    const bool needs_quotes =
        raw.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(raw);
    std::string out;
    out.reserve(raw.size() + 2);
    out += '"';
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("cannot format double");
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                continue;
            }
            cur += c;
            ++i;
            continue;
        }
        if (c == '"' && cur.empty()) {
            quoted = true;
            ++i;
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            ++i;
            continue;
        }
        cur += c;
        ++i;
    }
    if (quoted) throw ParseError("unterminated quoted CSV field");
    fields.push_back(std::move(cur));
    return fields;
}

void write_allocation_csv(std::ostream& os, const Graph& g, const Allocation& alloc) {
    const bool with_stderr = !alloc.std_err.empty();
    os << (with_stderr ? "node,value,stderr" : "node,value") << '\n';
    for (std::size_t i = 0; i < alloc.nodes.size(); ++i) {
        os << csv_field(g.name_of(alloc.nodes[i])) << ',' << format_double(alloc.value[i]);
        if (with_stderr) os << ',' << format_double(alloc.std_err[i]);
        os << '\n';
    }
}

void write_allocation_csv_file(const std::string& path, const Graph& g,
                               const Allocation& alloc) {
    auto os = open_out(path);
    write_allocation_csv(os, g, alloc);
    if (!os.good()) throw Error("write failed for '" + path + "'");
}

Allocation read_allocation_csv(std::istream& is, const Graph& g) {
    const std::vector<std::string> lines = read_lines(is);
    if (lines.empty()) throw ParseError("empty allocation CSV");
    bool with_stderr = false;
    if (lines[0] == "node,value,stderr")
        with_stderr = true;
    else if (lines[0] != "node,value")
        line_error(1, "expected header node,value[,stderr], got '" + lines[0] + "'");

    Allocation alloc;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.num_nodes()), 0);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::size_t line_no = li + 1;
        std::vector<std::string> fields = split_csv_line(lines[li]);
        const std::size_t want = with_stderr ? 3 : 2;
        if (fields.size() != want)
            line_error(line_no, "expected " + std::to_string(want) + " fields, got " +
                                    std::to_string(fields.size()));
        const std::optional<int> found = g.find(fields[0]);
        if (!found) throw LookupError("line " + std::to_string(line_no) +
                                      ": unknown node '" + fields[0] + "'");
        const int node = *found;
        if (seen[node]) throw StructureError("line " + std::to_string(line_no) +
                                             ": duplicate node '" + fields[0] + "'");
        seen[node] = 1;
        alloc.nodes.push_back(node);
        alloc.value.push_back(parse_double(fields[1], line_no));
        if (with_stderr) alloc.std_err.push_back(parse_double(fields[2], line_no));
    }
    return alloc;
}

Allocation read_allocation_csv_file(const std::string& path, const Graph& g) {
    auto is = open_in(path);
    return read_allocation_csv(is, g);
}

void write_selection_csv(std::ostream& os, const Graph& g, const Selection& sel) {
    os << "rank,node,phase\n";
    for (const AuditStep& st : sel.audit)
        os << st.step << ',' << csv_field(g.name_of(st.node)) << ',' << phase_name(st.phase)
           << '\n';
}

void write_selection_csv_file(const std::string& path, const Graph& g,
                              const Selection& sel) {
    auto os = open_out(path);
    write_selection_csv(os, g, sel);
    if (!os.good()) throw Error("write failed for '" + path + "'");
}

void write_audit_jsonl(std::ostream& os, const Graph& g, const Selection& sel) {
    for (const AuditStep& st : sel.audit) {
        ordered_json j;
        j["step"] = st.step;
        j["node"] = g.name_of(st.node);
        j["phase"] = phase_name(st.phase);
        if (st.has_value) j["value"] = st.value;
        ordered_json skipped = ordered_json::array();
        for (const SkipRecord& s : st.skipped) {
            ordered_json rec;
            rec["node"] = g.name_of(s.node);
            rec["blocker"] = g.name_of(s.blocker);
            rec["reason"] = s.reason;
            skipped.push_back(std::move(rec));
        }
        j["skipped"] = std::move(skipped);
        ordered_json discounts = ordered_json::array();
        for (const DiscountRecord& d : st.discounts) {
            ordered_json rec;
            rec["node"] = g.name_of(d.node);
            rec["old"] = d.old_value;
            rec["new"] = d.new_value;
            discounts.push_back(std::move(rec));
        }
        j["discounts"] = std::move(discounts);
        os << j.dump() << '\n';
    }
}

void write_audit_jsonl_file(const std::string& path, const Graph& g, const Selection& sel) {
    auto os = open_out(path);
    write_audit_jsonl(os, g, sel);
    if (!os.good()) throw Error("write failed for '" + path + "'");
}

void write_result_csv(std::ostream& os, std::span<const ResultRow> rows) {
    os << kResultHeader << '\n';
    for (const ResultRow& r : rows) {
        os << csv_field(r.method) << ',' << r.k << ',' << csv_field(join_semicolon(r.chosen))
           << ',' << format_double(r.spread_mean) << ',' << format_double(r.spread_stderr)
           << ',' << r.nu_calls << ',' << r.ms << ',' << r.sim_seed << ',' << r.perm_seed
           << ',' << r.tie_seed << '\n';
    }
}

void write_result_csv_file(const std::string& path, std::span<const ResultRow> rows) {
    auto os = open_out(path);
    write_result_csv(os, rows);
    if (!os.good()) throw Error("write failed for '" + path + "'");
}

std::vector<ResultRow> read_result_csv(std::istream& is) {
    const std::vector<std::string> lines = read_lines(is);
    if (lines.empty() || lines[0] != kResultHeader)
        throw ParseError("missing result CSV header");
    std::vector<ResultRow> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::size_t line_no = li + 1;
        std::vector<std::string> f = split_csv_line(lines[li]);
        if (f.size() != 10)
            line_error(line_no, "expected 10 fields, got " + std::to_string(f.size()));
        ResultRow r;
        r.method = f[0];
        r.k = parse_int(f[1], line_no);
        r.chosen = split_semicolon(f[2]);
        r.spread_mean = parse_double(f[3], line_no);
        r.spread_stderr = parse_double(f[4], line_no);
        r.nu_calls = parse_u64(f[5], line_no);
        r.ms = parse_u64(f[6], line_no);
        r.sim_seed = parse_u64(f[7], line_no);
        r.perm_seed = parse_u64(f[8], line_no);
        r.tie_seed = parse_u64(f[9], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultRow> read_result_csv_file(const std::string& path) {
    auto is = open_in(path);
    return read_result_csv(is);
}

}  // namespace critk
