#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rscusum/csv.hpp"
#include "rscusum/errors.hpp"
#include "rscusum/trajectory.hpp"

namespace rscusum {

// Covariate values after dummy coding, in schema order.
using CovariateVector = std::vector<double>;

// Piecewise-constant baseline excess hazard: level exp(log_levels[k]) on
// [cut_points[k], cut_points[k+1]). Evaluation beyond the last cut point
// is refused; extending the last band is an explicit, visible act (see
// ExcessHazardModel::with_extended_last_band).
struct PiecewiseBaseline {
    std::vector<double> cut_points;  // size K+1, cut_points[0] == 0, strictly increasing
    std::vector<double> log_levels;  // size K

    void validate() const {
        if (log_levels.empty() || cut_points.size() != log_levels.size() + 1)
            throw ValidationError("piecewise baseline: need K >= 1 bands and K+1 cut points");
        if (cut_points.front() != 0.0)
            throw ValidationError("piecewise baseline: first cut point must be 0");
        for (std::size_t i = 1; i < cut_points.size(); ++i)
            if (!(cut_points[i] > cut_points[i - 1]))
                throw ValidationError("piecewise baseline: cut points not strictly increasing");
        for (double chi : log_levels)
            if (!std::isfinite(chi))
                throw ValidationError("piecewise baseline: non-finite log level");
    }
};

// Weibull baseline excess hazard h0(t) = shape * scale * t^(shape-1),
// i.e. cumulative scale * t^shape.
struct WeibullBaseline {
    double shape = 1.0;
    double scale = 1.0;

    void validate() const {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw ValidationError("weibull baseline: shape and scale must be > 0");
    }
};

// Dummy coding of categorical covariates against declared reference
// levels. Coefficients are ordered variable by variable, with one slot
// per non-reference level.
struct CovariateSchema {
    struct Variable {
        std::string name;
        std::string reference;
        std::vector<std::string> levels;  // non-reference levels, coefficient order
    };

    std::vector<Variable> variables;

    std::size_t coefficient_count() const {
        std::size_t n = 0;
        for (const auto& v : variables) n += v.levels.size();
        return n;
    }

    std::vector<std::string> coefficient_names() const {
        std::vector<std::string> names;
        for (const auto& v : variables)
            for (const auto& level : v.levels) names.push_back(v.name + "=" + level);
        return names;
    }

    // One observed level per variable -> dummy-coded vector.
    CovariateVector encode(const std::vector<std::string>& observed) const {
        if (observed.size() != variables.size())
            throw ValidationError("covariate encoding: expected " +
                                  std::to_string(variables.size()) + " values, got " +
                                  std::to_string(observed.size()));
        CovariateVector x;
        x.reserve(coefficient_count());
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto& var = variables[v];
            bool found = observed[v] == var.reference;
            for (const auto& level : var.levels) {
                bool match = observed[v] == level;
                x.push_back(match ? 1.0 : 0.0);
                found = found || match;
            }
            if (!found)
                throw ValidationError("covariate '" + var.name + "': unknown level '" +
                                      observed[v] + "'");
        }
        return x;
    }
};

// In-control proportional excess hazard model
// h_E0(t, x) = h0(t) * exp(beta . x).
class ExcessHazardModel {
public:
    using Baseline = std::variant<PiecewiseBaseline, WeibullBaseline>;

    ExcessHazardModel(Baseline baseline, std::vector<double> coefficients,
                      CovariateSchema schema)
        : baseline_(std::move(baseline)),
          coefficients_(std::move(coefficients)),
          schema_(std::move(schema)) {
        std::visit([](const auto& b) { b.validate(); }, baseline_);
        if (coefficients_.size() != schema_.coefficient_count())
            throw ValidationError("model: coefficient count does not match schema");
        for (double beta : coefficients_)
            if (!std::isfinite(beta)) throw ValidationError("model: non-finite coefficient");
    }

    const Baseline& baseline() const { return baseline_; }
    const std::vector<double>& coefficients() const { return coefficients_; }
    const CovariateSchema& schema() const { return schema_; }

    bool piecewise() const { return std::holds_alternative<PiecewiseBaseline>(baseline_); }

    // Follow-up time beyond which the baseline is undefined.
    double support_end() const {
        if (const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_))
            return pw->cut_points.back();
        return std::numeric_limits<double>::infinity();
    }

    double linear_predictor(const CovariateVector& x) const {
        if (x.size() != coefficients_.size())
            throw ValidationError("covariate vector length " + std::to_string(x.size()) +
                                  " does not match model coefficient count " +
                                  std::to_string(coefficients_.size()));
        double lp = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) lp += coefficients_[i] * x[i];
        return lp;
    }

    double baseline_hazard(double t) const {
        if (const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_))
            return std::exp(pw->log_levels[band_index(*pw, t)]);
        const auto& wb = std::get<WeibullBaseline>(baseline_);
        if (t < 0.0) throw RangeError("baseline hazard at negative time");
        if (t == 0.0 && wb.shape < 1.0)
            throw RangeError("weibull baseline hazard is infinite at t = 0 for shape < 1");
        return wb.shape * wb.scale * std::pow(t, wb.shape - 1.0);
    }

    double cumulative_baseline_hazard(double t) const {
        if (t < 0.0) throw RangeError("cumulative baseline hazard at negative time");
        if (const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_)) {
            if (!(t <= pw->cut_points.back()))
                throw RangeError("cumulative baseline hazard beyond last cut point (t = " +
                                 std::to_string(t) + ")");
            double cum = 0.0;
            for (std::size_t k = 0; k < pw->log_levels.size(); ++k) {
                double lo = pw->cut_points[k];
                double hi = std::min(t, pw->cut_points[k + 1]);
                if (hi <= lo) break;
                cum += std::exp(pw->log_levels[k]) * (hi - lo);
            }
            return cum;
        }
        const auto& wb = std::get<WeibullBaseline>(baseline_);
        return wb.scale * std::pow(t, wb.shape);
    }

    double excess_hazard(const CovariateVector& x, double t) const {
        return baseline_hazard(t) * std::exp(linear_predictor(x));
    }

    double cumulative_excess_hazard(const CovariateVector& x, double t) const {
        return cumulative_baseline_hazard(t) * std::exp(linear_predictor(x));
    }

    Trajectory baseline_trajectory() const {
        if (const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_)) {
            std::vector<double> levels(pw->log_levels.size());
            for (std::size_t k = 0; k < levels.size(); ++k)
                levels[k] = std::exp(pw->log_levels[k]);
            return Trajectory::step(pw->cut_points, levels);
        }
        const auto& wb = std::get<WeibullBaseline>(baseline_);
        return Trajectory::power_law(wb.scale, wb.shape);
    }

    Trajectory excess_trajectory(const CovariateVector& x) const {
        return baseline_trajectory().scaled(std::exp(linear_predictor(x)));
    }

    // The device for accelerated-time charts with k > 1: keep the last
    // band's level but let it run to `new_end`.
    ExcessHazardModel with_extended_last_band(double new_end) const {
        const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_);
        if (!pw) throw ConfigError("extend last band: model baseline is not piecewise");
        if (!(new_end > pw->cut_points.back()))
            throw ConfigError("extend last band: new end must exceed current support " +
                              std::to_string(pw->cut_points.back()));
        PiecewiseBaseline extended = *pw;
        extended.cut_points.back() = new_end;
        return ExcessHazardModel(extended, coefficients_, schema_);
    }

    void save(std::ostream& out) const {
        out << "rscusum-model v1\n";
        out << "[baseline]\n";
        if (const auto* pw = std::get_if<PiecewiseBaseline>(&baseline_)) {
            out << "kind = piecewise\n";
            out << "cut_points =";
            for (double c : pw->cut_points) out << ' ' << csv::format_double(c);
            out << "\nlog_levels =";
            for (double chi : pw->log_levels) out << ' ' << csv::format_double(chi);
            out << '\n';
        } else {
            const auto& wb = std::get<WeibullBaseline>(baseline_);
            out << "kind = weibull\n";
            out << "shape = " << csv::format_double(wb.shape) << '\n';
            out << "scale = " << csv::format_double(wb.scale) << '\n';
        }
        std::size_t coef = 0;
        for (const auto& var : schema_.variables) {
            out << "\n[covariate " << var.name << "]\n";
            out << "reference = " << var.reference << '\n';
            for (const auto& level : var.levels)
                out << "level " << level << " = " << csv::format_double(coefficients_[coef++])
                    << '\n';
        }
    }

    static ExcessHazardModel load(std::istream& in);

private:
    static std::size_t band_index(const PiecewiseBaseline& pw, double t) {
        if (t < 0.0) throw RangeError("baseline hazard at negative time");
        if (!(t < pw->cut_points.back()))
            throw RangeError("baseline hazard beyond last cut point (t = " +
                             std::to_string(t) + ", support ends at " +
                             std::to_string(pw->cut_points.back()) + ")");
        std::size_t lo = 0, hi = pw->log_levels.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (pw->cut_points[mid] <= t)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    Baseline baseline_;
    std::vector<double> coefficients_;
    CovariateSchema schema_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
}

inline std::vector<double> parse_number_list(const std::string& text, std::size_t line) {
    std::vector<double> values;
    std::istringstream iss(text);
    std::string token;
    while (iss >> token) values.push_back(csv::parse_double(token, line));
    return values;
}

}  // namespace detail

inline ExcessHazardModel ExcessHazardModel::load(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::string section;
    std::string kind;
    PiecewiseBaseline pw;
    WeibullBaseline wb;
    bool have_shape = false, have_scale = false;
    CovariateSchema schema;
    std::vector<double> coefficients;

    while (std::getline(in, line)) {
        ++line_no;
        std::string text = detail::trim(line);
        if (text.empty() || text[0] == '#') continue;
        if (line_no == 1 && text.rfind("rscusum-model", 0) == 0) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": unterminated section");
            section = detail::trim(text.substr(1, text.size() - 2));
            if (section.rfind("covariate ", 0) == 0) {
                CovariateSchema::Variable var;
                var.name = detail::trim(section.substr(10));
                if (var.name.empty())
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": covariate section without a name");
                schema.variables.push_back(var);
            } else if (section != "baseline") {
                throw ParseError("line " + std::to_string(line_no) + ": unknown section [" +
                                 section + "]");
            }
            continue;
        }
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(text.substr(0, eq));
        std::string value = detail::trim(text.substr(eq + 1));
        if (section == "baseline") {
            if (key == "kind")
                kind = value;
            else if (key == "cut_points")
                pw.cut_points = detail::parse_number_list(value, line_no);
            else if (key == "log_levels")
                pw.log_levels = detail::parse_number_list(value, line_no);
            else if (key == "shape") {
                wb.shape = csv::parse_double(value, line_no);
                have_shape = true;
            } else if (key == "scale") {
                wb.scale = csv::parse_double(value, line_no);
                have_scale = true;
            } else {
                throw ParseError("line " + std::to_string(line_no) + ": unknown baseline key '" +
                                 key + "'");
            }
        } else if (section.rfind("covariate ", 0) == 0) {
            auto& var = schema.variables.back();
            if (key == "reference") {
                var.reference = value;
            } else if (key.rfind("level ", 0) == 0) {
                var.levels.push_back(detail::trim(key.substr(6)));
                coefficients.push_back(csv::parse_double(value, line_no));
            } else {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unknown covariate key '" + key + "'");
            }
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": key outside a section");
        }
    }

    if (kind == "piecewise") return ExcessHazardModel(pw, coefficients, schema);
    if (kind == "weibull") {
        if (!have_shape || !have_scale)
            throw ParseError("weibull baseline requires shape and scale");
        return ExcessHazardModel(wb, coefficients, schema);
    }
    throw ParseError("model file: missing or unknown baseline kind '" + kind + "'");
}

}  // namespace rscusum
