#ifndef DSC_PANEL_HPP
#define DSC_PANEL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsc/dates.hpp"

namespace dsc {

// Column names and period calendar for long-format ingestion.
struct PanelSchema {
    std::string unit_col = "unit";
    std::string period_col = "period";
    std::string outcome_col = "outcome";
    // Consecutive quarter boundaries: K+1 strictly increasing dates define K
    // periods, period k spanning [boundary k, boundary k+1 - 1 day].
    std::vector<Date> quarter_boundaries;
};

// Micro panel: for every unit and integer period 1..T, the raw outcome
// sample. Cells with no observations are kept and reported as missing rather
// than dropped.
struct MicroPanel {
    std::vector<std::string> units;  // first-appearance order
    int t_max = 0;
    // samples[u][t-1] holds the cell for unit u, period t.
    std::vector<std::vector<std::vector<double>>> samples;

    int num_units() const { return static_cast<int>(units.size()); }
    int unit_index(const std::string& name) const;
    void add(const std::string& unit, int period, double outcome);
    // Pads every unit out to t_max so cell lookups are uniform.
    void finalize();

    bool has_cell(int unit, int period) const;
    // Throws a data error naming the unit and period when the cell is empty.
    const std::vector<double>& cell(int unit, int period) const;
    long total_count(int unit) const;
    std::vector<std::pair<std::string, int>> missing_cells() const;

    std::string to_csv(const PanelSchema& schema) const;
    std::string summary_json() const;
};

MicroPanel parse_long_csv(const std::string& text, const PanelSchema& schema);

// One employment episode of a person at a unit. An absent end date means the
// episode is ongoing; an absent title level means the episode is untitled.
struct EmploymentSpell {
    std::string person_id;
    std::string unit_id;
    Date start;
    std::optional<Date> end;
    std::optional<int> title_level;  // 1..10
};

// Columns: person_id, unit_id, start_date, end_date (empty = ongoing),
// title_level (empty = untitled); dates ISO-8601.
std::vector<EmploymentSpell> parse_spells_csv(const std::string& text);

// Turns K+1 boundary dates into K consecutive period ranges.
std::vector<DateRange> quarters_from_boundaries(const std::vector<Date>& boundaries);

struct TenureObservations {
    // One (unit, tenure-in-days) observation per person employed at the unit
    // during the quarter.
    std::vector<std::pair<std::string, double>> observations;
    long excluded_future_start = 0;  // spells starting after the quarter end
};

// Days of accumulated tenure per person-unit as of the end of the quarter:
// ongoing episodes count start..quarter end, finished episodes count their
// full length, and multiple episodes at the same unit sum. People whose last
// episode at the unit ended before the quarter started are skipped.
TenureObservations compute_tenure(const std::vector<EmploymentSpell>& spells,
                                  const DateRange& quarter);

// Highest title level each person held at the unit among spells overlapping
// the quarter; people with no titled overlapping spell are omitted.
std::vector<std::pair<std::string, double>> quarterly_title(
    const std::vector<EmploymentSpell>& spells, const DateRange& quarter);

enum class SpellOutcome { Tenure, Title };

struct SpellPanelResult {
    MicroPanel panel;
    long excluded_future_start = 0;
};

// Builds the per-quarter panel from raw spells, one period per quarter.
SpellPanelResult spells_to_panel(const std::vector<EmploymentSpell>& spells,
                                 const std::vector<DateRange>& quarters, SpellOutcome outcome);

struct DonorFilterResult {
    MicroPanel panel;
    std::vector<std::string> dropped;
};

// Keeps the treated unit plus donors with total observation count at least
// min_share times the treated count.
DonorFilterResult filter_donors(const MicroPanel& panel, const std::string& treated,
                                double min_share);

}  // namespace dsc

#endif
