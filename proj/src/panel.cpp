#include "dsc/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "dsc/error.hpp"

namespace dsc {
namespace {

// Splits one CSV record. Quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// Splits text into lines, tolerating CRLF and a missing final newline.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(std::move(cur));
    }
    return lines;
}

double parse_double_field(const std::string& s, size_t line_no, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw_data("line " + std::to_string(line_no) + ": cannot parse " + what + " \"" + s + "\"");
    return v;
}

long parse_int_field(const std::string& s, size_t line_no, const std::string& what) {
    long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw_data("line " + std::to_string(line_no) + ": cannot parse " + what + " \"" + s + "\"");
    return v;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw_data("input is missing column \"" + name + "\"");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int MicroPanel::unit_index(const std::string& name) const {
    for (size_t i = 0; i < units.size(); ++i)
        if (units[i] == name) return static_cast<int>(i);
    return -1;
}

void MicroPanel::add(const std::string& unit, int period, double outcome) {
    if (period < 1) throw_data("period index " + std::to_string(period) + " is not positive");
    int u = unit_index(unit);
    if (u < 0) {
        u = num_units();
        units.push_back(unit);
        samples.emplace_back();
    }
    if (static_cast<int>(samples[u].size()) < period) samples[u].resize(period);
    samples[u][period - 1].push_back(outcome);
    t_max = std::max(t_max, period);
}

void MicroPanel::finalize() {
    for (auto& per_unit : samples) per_unit.resize(t_max);
}

bool MicroPanel::has_cell(int unit, int period) const {
    if (unit < 0 || unit >= num_units() || period < 1 || period > t_max) return false;
    return !samples[unit][period - 1].empty();
}

const std::vector<double>& MicroPanel::cell(int unit, int period) const {
    if (unit < 0 || unit >= num_units())
        throw_internal("unit index " + std::to_string(unit) + " out of range");
    if (period < 1 || period > t_max)
        throw_data("period " + std::to_string(period) + " outside panel range 1.." +
                   std::to_string(t_max));
    const auto& s = samples[unit][period - 1];
    if (s.empty())
        throw_data("unit \"" + units[unit] + "\" has no observations in period " +
                   std::to_string(period));
    return s;
}

long MicroPanel::total_count(int unit) const {
    if (unit < 0 || unit >= num_units())
        throw_internal("unit index " + std::to_string(unit) + " out of range");
    long n = 0;
    for (const auto& cell : samples[unit]) n += static_cast<long>(cell.size());
    return n;
}

std::vector<std::pair<std::string, int>> MicroPanel::missing_cells() const {
    std::vector<std::pair<std::string, int>> out;
    for (int u = 0; u < num_units(); ++u)
        for (int t = 1; t <= t_max; ++t)
            if (samples[u][t - 1].empty()) out.emplace_back(units[u], t);
    return out;
}

std::string MicroPanel::to_csv(const PanelSchema& schema) const {
    std::string out = csv_escape(schema.unit_col) + "," + csv_escape(schema.period_col) + "," +
                      csv_escape(schema.outcome_col) + "\n";
    for (int u = 0; u < num_units(); ++u) {
        const std::string unit = csv_escape(units[u]);
        for (int t = 1; t <= static_cast<int>(samples[u].size()); ++t) {
            for (double v : samples[u][t - 1]) {
                out += unit;
                out += ',';
                out += std::to_string(t);
                out += ',';
                out += format_double(v);
                out += '\n';
            }
        }
    }
    return out;
}

std::string MicroPanel::summary_json() const {
    std::string out = "{\n  \"periods\": " + std::to_string(t_max) + ",\n  \"units\": [";
    for (int u = 0; u < num_units(); ++u) {
        if (u) out += ",";
        out += "\n    {\"unit\": \"" + units[u] + "\", \"total\": " + std::to_string(total_count(u)) +
               ", \"counts\": [";
        for (int t = 1; t <= t_max; ++t) {
            if (t > 1) out += ",";
            out += std::to_string(samples[u][t - 1].size());
        }
        out += "]}";
    }
    out += "\n  ],\n  \"missing_cells\": [";
    const auto missing = missing_cells();
    for (size_t i = 0; i < missing.size(); ++i) {
        if (i) out += ",";
        out += "\n    {\"unit\": \"" + missing[i].first +
               "\", \"period\": " + std::to_string(missing[i].second) + "}";
    }
    out += missing.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

MicroPanel parse_long_csv(const std::string& text, const PanelSchema& schema) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw_data("input is empty");
    const std::vector<std::string> header = split_csv_line(lines[0]);
    const int unit_c = find_column(header, schema.unit_col);
    const int period_c = find_column(header, schema.period_col);
    const int outcome_c = find_column(header, schema.outcome_col);

    MicroPanel panel;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const size_t line_no = i + 1;
        const std::vector<std::string> fields = split_csv_line(lines[i]);
        const int need = std::max({unit_c, period_c, outcome_c}) + 1;
        if (static_cast<int>(fields.size()) < need)
            throw_data("line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(need) + " fields, got " + std::to_string(fields.size()));
        const std::string& unit = fields[unit_c];
        if (unit.empty()) throw_data("line " + std::to_string(line_no) + ": empty unit id");
        const long period = parse_int_field(fields[period_c], line_no, "period");
        if (period < 1)
            throw_data("line " + std::to_string(line_no) + ": period must be >= 1, got " +
                       std::to_string(period));
        const double outcome = parse_double_field(fields[outcome_c], line_no, "outcome");
        panel.add(unit, static_cast<int>(period), outcome);
    }
    if (panel.num_units() == 0) throw_data("no observations");
    panel.finalize();
    return panel;
}

std::vector<EmploymentSpell> parse_spells_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw_data("input is empty");
    const std::vector<std::string> header = split_csv_line(lines[0]);
    const int person_c = find_column(header, "person_id");
    const int unit_c = find_column(header, "unit_id");
    const int start_c = find_column(header, "start_date");
    const int end_c = find_column(header, "end_date");
    const int title_c = find_column(header, "title_level");

    std::vector<EmploymentSpell> spells;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const size_t line_no = i + 1;
        const std::vector<std::string> fields = split_csv_line(lines[i]);
        const int need = std::max({person_c, unit_c, start_c, end_c, title_c}) + 1;
        if (static_cast<int>(fields.size()) < need)
            throw_data("line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(need) + " fields, got " + std::to_string(fields.size()));
        EmploymentSpell s;
        s.person_id = fields[person_c];
        s.unit_id = fields[unit_c];
        if (s.person_id.empty() || s.unit_id.empty())
            throw_data("line " + std::to_string(line_no) + ": empty person or unit id");
        const auto start = parse_date(fields[start_c]);
        if (!start)
            throw_data("line " + std::to_string(line_no) + ": cannot parse start_date \"" +
                       fields[start_c] + "\"");
        s.start = *start;
        if (!fields[end_c].empty()) {
            const auto end = parse_date(fields[end_c]);
            if (!end)
                throw_data("line " + std::to_string(line_no) + ": cannot parse end_date \"" +
                           fields[end_c] + "\"");
            if (*end < s.start)
                throw_data("line " + std::to_string(line_no) + ": end_date precedes start_date");
            s.end = *end;
        }
        if (!fields[title_c].empty()) {
            const long level = parse_int_field(fields[title_c], line_no, "title_level");
            if (level < 1 || level > 10)
                throw_data("line " + std::to_string(line_no) + ": title_level must be in 1..10, got " +
                           std::to_string(level));
            s.title_level = static_cast<int>(level);
        }
        spells.push_back(std::move(s));
    }
    if (spells.empty()) throw_data("no observations");
    return spells;
}

std::vector<DateRange> quarters_from_boundaries(const std::vector<Date>& boundaries) {
    if (boundaries.size() < 2) throw_usage("need at least two quarter boundary dates");
    std::vector<DateRange> quarters;
    for (size_t i = 0; i + 1 < boundaries.size(); ++i) {
        if (!(boundaries[i] < boundaries[i + 1]))
            throw_usage("quarter boundaries must be strictly increasing");
        quarters.push_back({boundaries[i], boundaries[i + 1].add_days(-1)});
    }
    return quarters;
}

TenureObservations compute_tenure(const std::vector<EmploymentSpell>& spells,
                                  const DateRange& quarter) {
    // Group by (person, unit) preserving first-appearance order for
    // deterministic output.
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<const EmploymentSpell*>> groups;
    for (const auto& s : spells) {
        auto key = std::make_pair(s.person_id, s.unit_id);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(&s);
    }

    TenureObservations out;
    for (const auto& key : keys) {
        const auto& group = groups[key];
        // Latest activity at this unit; an ongoing spell counts as open-ended.
        bool active_ever = false;
        bool reaches_quarter = false;
        for (const auto* s : group) {
            if (s->start > quarter.end) continue;
            active_ever = true;
            if (!s->end || *s->end >= quarter.start) reaches_quarter = true;
        }
        long excluded = 0;
        for (const auto* s : group)
            if (s->start > quarter.end) ++excluded;
        out.excluded_future_start += excluded;
        if (!active_ever || !reaches_quarter) continue;

        double days = 0.0;
        for (const auto* s : group) {
            if (s->start > quarter.end) continue;
            const bool ongoing = !s->end || *s->end > quarter.end;
            const long d = ongoing ? quarter.end.day_diff(s->start) : s->end->day_diff(s->start);
            if (d < 0) throw_internal("computed negative tenure");
            days += static_cast<double>(d);
        }
        out.observations.emplace_back(key.second, days);
    }
    return out;
}

std::vector<std::pair<std::string, double>> quarterly_title(
    const std::vector<EmploymentSpell>& spells, const DateRange& quarter) {
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, int> best;
    for (const auto& s : spells) {
        if (!s.title_level) continue;
        const bool overlaps = s.start <= quarter.end && (!s.end || *s.end >= quarter.start);
        if (!overlaps) continue;
        auto key = std::make_pair(s.person_id, s.unit_id);
        auto [it, inserted] = best.try_emplace(key, *s.title_level);
        if (inserted) keys.push_back(key);
        else it->second = std::max(it->second, *s.title_level);
    }
    std::vector<std::pair<std::string, double>> out;
    out.reserve(keys.size());
    for (const auto& key : keys)
        out.emplace_back(key.second, static_cast<double>(best[key]));
    return out;
}

SpellPanelResult spells_to_panel(const std::vector<EmploymentSpell>& spells,
                                 const std::vector<DateRange>& quarters, SpellOutcome outcome) {
    if (quarters.empty()) throw_usage("no quarters defined");
    SpellPanelResult res;
    for (size_t q = 0; q < quarters.size(); ++q) {
        const int period = static_cast<int>(q) + 1;
        if (outcome == SpellOutcome::Tenure) {
            TenureObservations obs = compute_tenure(spells, quarters[q]);
            res.excluded_future_start += obs.excluded_future_start;
            for (const auto& [unit, days] : obs.observations) res.panel.add(unit, period, days);
        } else {
            for (const auto& [unit, level] : quarterly_title(spells, quarters[q]))
                res.panel.add(unit, period, level);
        }
    }
    if (res.panel.num_units() == 0) throw_data("no observations");
    res.panel.t_max = static_cast<int>(quarters.size());
    res.panel.finalize();
    return res;
}

DonorFilterResult filter_donors(const MicroPanel& panel, const std::string& treated,
                                double min_share) {
    if (min_share < 0.0 || min_share > 1.0) throw_usage("min_share must be in [0, 1]");
    const int treated_idx = panel.unit_index(treated);
    if (treated_idx < 0) throw_data("treated unit \"" + treated + "\" not found in panel");
    const double threshold = min_share * static_cast<double>(panel.total_count(treated_idx));

    DonorFilterResult out;
    out.panel.t_max = panel.t_max;
    int kept_donors = 0;
    for (int u = 0; u < panel.num_units(); ++u) {
        const bool keep = u == treated_idx ||
                          static_cast<double>(panel.total_count(u)) >= threshold;
        if (!keep) {
            out.dropped.push_back(panel.units[u]);
            continue;
        }
        if (u != treated_idx) ++kept_donors;
        out.panel.units.push_back(panel.units[u]);
        out.panel.samples.push_back(panel.samples[u]);
    }
    if (kept_donors < 2) throw_data("insufficient donor pool");
    return out;
}

}  // namespace dsc
