#pragma once

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rscusum/csv.hpp"
#include "rscusum/errors.hpp"
#include "rscusum/trajectory.hpp"

namespace rscusum {

enum class Sex { male, female };

inline std::string to_string(Sex sex) { return sex == Sex::male ? "M" : "F"; }

inline Sex parse_sex(const std::string& text) {
    if (text == "M" || text == "m") return Sex::male;
    if (text == "F" || text == "f") return Sex::female;
    throw ParseError("unknown sex code '" + text + "' (expected M or F)");
}

// Demographic variables that determine the population hazard. Attained
// age and calendar time both advance with follow-up time (the Lexis
// diagonal).
struct Demographics {
    Sex sex = Sex::male;
    double age_at_entry = 0.0;          // years
    double entry_calendar_time = 0.0;   // decimal calendar years, e.g. 2010.5
};

// Population mortality rates on a rectangular (sex, age, year) grid of
// 1-year cells; the hazard is constant within a cell, so cumulative
// hazards along a follow-up trajectory are exact band sums. Immutable
// after construction and safely shareable across threads.
class LifeTable {
public:
    LifeTable(int age_min, int age_max, int year_min, int year_max)
        : age_min_(age_min),
          age_max_(age_max),
          year_min_(year_min),
          year_max_(year_max),
          rates_(2 * span_age() * span_year(),
                 std::numeric_limits<double>::quiet_NaN()) {
        if (age_min < 0 || age_max < age_min || year_max < year_min)
            throw ValidationError("life table: bad age/year span");
    }

    static LifeTable load(std::istream& in) {
        csv::Table table = csv::read(in);
        int c_sex = table.require_column("sex");
        int c_age = table.require_column("age");
        int c_year = table.require_column("year");
        int c_rate = table.require_column("rate");

        struct Cell {
            Sex sex;
            int age, year;
            double rate;
        };
        std::vector<Cell> cells;
        int age_lo = 0, age_hi = 0, year_lo = 0, year_hi = 0;
        bool first = true;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::size_t line = table.line_numbers[r];
            const auto& row = table.rows[r];
            Cell cell{};
            cell.sex = parse_sex(row[c_sex]);
            cell.age = static_cast<int>(csv::parse_int(row[c_age], line));
            cell.year = static_cast<int>(csv::parse_int(row[c_year], line));
            cell.rate = csv::parse_double(row[c_rate], line);
            if (!(cell.rate >= 0.0) || !std::isfinite(cell.rate))
                throw ValidationError("line " + std::to_string(line) +
                                      ": rate must be finite and >= 0, got " + row[c_rate]);
            if (first) {
                age_lo = age_hi = cell.age;
                year_lo = year_hi = cell.year;
                first = false;
            } else {
                age_lo = std::min(age_lo, cell.age);
                age_hi = std::max(age_hi, cell.age);
                year_lo = std::min(year_lo, cell.year);
                year_hi = std::max(year_hi, cell.year);
            }
            cells.push_back(cell);
        }
        if (cells.empty()) throw ValidationError("life table: no data rows");

        LifeTable lt(age_lo, age_hi, year_lo, year_hi);
        for (const auto& cell : cells) {
            double& slot = lt.rates_[lt.index(cell.sex, cell.age, cell.year)];
            if (!std::isnan(slot))
                throw ValidationError("duplicate life-table cell (" + to_string(cell.sex) +
                                      ", " + std::to_string(cell.age) + ", " +
                                      std::to_string(cell.year) + ")");
            slot = cell.rate;
        }
        // rectangular coverage: every cell inside the span must be present
        for (Sex sex : {Sex::male, Sex::female})
            for (int age = age_lo; age <= age_hi; ++age)
                for (int year = year_lo; year <= year_hi; ++year)
                    if (std::isnan(lt.rates_[lt.index(sex, age, year)]))
                        throw ValidationError("life table coverage hole at (" +
                                              to_string(sex) + ", " + std::to_string(age) +
                                              ", " + std::to_string(year) + ")");
        return lt;
    }

    // Builds a table from a rate function; used for synthetic tables.
    static LifeTable build(int age_min, int age_max, int year_min, int year_max,
                           const std::function<double(Sex, int, int)>& rate_fn) {
        LifeTable lt(age_min, age_max, year_min, year_max);
        for (Sex sex : {Sex::male, Sex::female})
            for (int age = age_min; age <= age_max; ++age)
                for (int year = year_min; year <= year_max; ++year) {
                    double rate = rate_fn(sex, age, year);
                    if (!(rate >= 0.0) || !std::isfinite(rate))
                        throw ValidationError("life table: generated rate invalid");
                    lt.rates_[lt.index(sex, age, year)] = rate;
                }
        return lt;
    }

    void save(std::ostream& out) const {
        out << "sex,age,year,rate\n";
        for (Sex sex : {Sex::male, Sex::female})
            for (int age = age_min_; age <= age_max_; ++age)
                for (int year = year_min_; year <= year_max_; ++year)
                    out << to_string(sex) << ',' << age << ',' << year << ','
                        << csv::format_double(rate(sex, age, year)) << '\n';
    }

    double rate(Sex sex, int age, int year) const {
        if (age < age_min_ || age > age_max_ || year < year_min_ || year > year_max_)
            throw RangeError("life table lookup outside span: cell (" + to_string(sex) +
                             ", " + std::to_string(age) + ", " + std::to_string(year) +
                             "); table covers ages [" + std::to_string(age_min_) + ", " +
                             std::to_string(age_max_) + "], years [" +
                             std::to_string(year_min_) + ", " + std::to_string(year_max_) +
                             "]");
        return rates_[index(sex, age, year)];
    }

    // Hazard at follow-up time t for an individual; piecewise constant
    // and right-continuous in t, with the cell picked by the floors of
    // attained age and attained calendar time.
    double population_hazard(const Demographics& z, double t) const {
        double age = z.age_at_entry + t;
        double year = z.entry_calendar_time + t;
        return rate(z.sex, static_cast<int>(std::floor(age)),
                    static_cast<int>(std::floor(year)));
    }

    // Exact integral of population_hazard over [0, t].
    double cumulative_population_hazard(const Demographics& z, double t) const {
        if (t < 0.0) throw RangeError("cumulative population hazard: negative time");
        return population_trajectory(z, t).cumulative(t);
    }

    // The individual's population hazard as a step trajectory on
    // [0, horizon], with breaks at every integer age and calendar-year
    // crossing along the Lexis diagonal.
    Trajectory population_trajectory(const Demographics& z, double horizon) const {
        if (!(horizon >= 0.0)) throw RangeError("population trajectory: bad horizon");
        std::vector<double> breaks{0.0};
        std::vector<double> levels;
        double t = 0.0;
        while (t < horizon) {
            levels.push_back(population_hazard(z, t));
            double next_age = next_integer_crossing(z.age_at_entry + t) - z.age_at_entry;
            double next_year =
                next_integer_crossing(z.entry_calendar_time + t) - z.entry_calendar_time;
            double next = std::min({next_age, next_year, horizon});
            // If rounding lands a crossing at or before t, emit a
            // vanishing band rather than stalling.
            if (!(next > t)) next = std::nextafter(t, std::numeric_limits<double>::max());
            breaks.push_back(next);
            t = next;
        }
        if (levels.empty()) {
            levels.push_back(population_hazard(z, 0.0));
            breaks.push_back(std::numeric_limits<double>::min());
        }
        return Trajectory::step(breaks, levels);
    }

    // Largest follow-up horizon with valid lookups for this individual.
    double support_horizon(const Demographics& z) const {
        double by_age = static_cast<double>(age_max_) + 1.0 - z.age_at_entry;
        double by_year = static_cast<double>(year_max_) + 1.0 - z.entry_calendar_time;
        return std::max(0.0, std::min(by_age, by_year));
    }

    int age_min() const { return age_min_; }
    int age_max() const { return age_max_; }
    int year_min() const { return year_min_; }
    int year_max() const { return year_max_; }

private:
    static double next_integer_crossing(double x) {
        double next = std::floor(x) + 1.0;
        return next;
    }

    int span_age() const { return age_max_ - age_min_ + 1; }
    int span_year() const { return year_max_ - year_min_ + 1; }

    std::size_t index(Sex sex, int age, int year) const {
        std::size_t s = sex == Sex::male ? 0 : 1;
        return (s * span_age() + static_cast<std::size_t>(age - age_min_)) * span_year() +
               static_cast<std::size_t>(year - year_min_);
    }

    int age_min_, age_max_, year_min_, year_max_;
    std::vector<double> rates_;
};

}  // namespace rscusum
