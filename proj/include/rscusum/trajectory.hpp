#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rscusum/errors.hpp"

namespace rscusum {

// Piecewise analytic hazard function along one individual's follow-up
// clock. Each piece covers [start, end) with
//
//     h(t) = power_coef * power * t^(power-1) + linear_coef
//     H(t) = cum_start + power_coef * (t^power - start^power)
//                      + linear_coef * (t - start)
//
// which is closed under the chart's alternatives: piecewise-constant
// baselines are pure steps (power_coef = 0), Weibull baselines are pure
// power pieces, and proportional scaling, additive shifts with
// truncation, linear time acceleration and mid-follow-up splices all map
// pieces to pieces. Hazard, cumulative hazard and the inverse of the
// cumulative hazard are therefore exact (the only iterative case is a
// power piece with a nonzero additive part, where the inverse is found
// by safeguarded Newton on a monotone function).
class Trajectory {
public:
    struct Piece {
        double start;
        double end;
        double power_coef;
        double power;
        double linear_coef;
        double cum_start;

        double hazard_at(double t) const {
            if (power_coef == 0.0) return linear_coef;
            return power_coef * power * std::pow(t, power - 1.0) + linear_coef;
        }
        double cumulative_at(double t) const {
            double value = cum_start + linear_coef * (t - start);
            if (power_coef != 0.0)
                value += power_coef * (std::pow(t, power) - std::pow(start, power));
            return value;
        }
    };

    Trajectory() = default;

    // Step hazard: breaks.size() == levels.size() + 1, breaks.front() == 0;
    // breaks.back() is the support end (may be +inf).
    static Trajectory step(const std::vector<double>& breaks,
                           const std::vector<double>& levels) {
        if (breaks.size() != levels.size() + 1 || breaks.empty() || breaks.front() != 0.0)
            throw ValidationError("step trajectory: breaks must start at 0 and bracket levels");
        Trajectory traj;
        double cum = 0.0;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (!(breaks[i + 1] > breaks[i]))
                throw ValidationError("step trajectory: breaks not strictly increasing");
            if (!(levels[i] >= 0.0))
                throw ValidationError("step trajectory: negative hazard level");
            traj.pieces_.push_back({breaks[i], breaks[i + 1], 0.0, 1.0, levels[i], cum});
            if (std::isfinite(breaks[i + 1]))
                cum += levels[i] * (breaks[i + 1] - breaks[i]);
        }
        return traj;
    }

    static Trajectory constant(double rate) {
        return step({0.0, std::numeric_limits<double>::infinity()}, {rate});
    }

    // Power-law hazard with H(t) = coef * t^power on [0, support_end).
    static Trajectory power_law(double coef, double power,
                                double support_end = std::numeric_limits<double>::infinity()) {
        if (!(coef >= 0.0) || !(power > 0.0))
            throw ValidationError("power-law trajectory: require coef >= 0 and power > 0");
        Trajectory traj;
        if (power == 1.0) {
            traj.pieces_.push_back({0.0, support_end, 0.0, 1.0, coef, 0.0});
        } else {
            traj.pieces_.push_back({0.0, support_end, coef, power, 0.0, 0.0});
        }
        return traj;
    }

    double support_end() const {
        return pieces_.empty() ? 0.0 : pieces_.back().end;
    }

    bool is_step() const {
        for (const auto& p : pieces_)
            if (p.power_coef != 0.0) return false;
        return true;
    }

    const std::vector<Piece>& pieces() const { return pieces_; }

    // Interior piece starts (excludes 0 and the support end).
    std::vector<double> boundaries() const {
        std::vector<double> out;
        for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].start);
        return out;
    }

    // Right-continuous hazard; t must lie in [0, support_end).
    double hazard(double t) const {
        const Piece& p = piece_at(t);
        if (t == 0.0 && p.power_coef > 0.0 && p.power < 1.0)
            throw RangeError("hazard is infinite at t = 0 for shape < 1");
        return p.hazard_at(t);
    }

    // Exact integral of the hazard over [0, t]; t may equal the support end.
    double cumulative(double t) const {
        if (t < 0.0) throw RangeError("cumulative hazard: negative time");
        if (t == 0.0) return 0.0;
        if (!(t <= support_end()))
            throw RangeError("cumulative hazard: t beyond support end");
        if (std::isinf(t)) return piece_limit(pieces_.back());
        const Piece& p = (t == support_end()) ? pieces_.back() : piece_at(t);
        return p.cumulative_at(t);
    }

    // inf{ t : H(t) >= target }; +inf when the support's total mass is
    // smaller than the target.
    double invert(double target) const {
        if (target <= 0.0) return 0.0;
        for (const auto& p : pieces_) {
            double cum_end = std::isfinite(p.end) ? p.cumulative_at(p.end)
                                                  : piece_limit(p);
            if (cum_end < target) continue;
            return solve_in_piece(p, target);
        }
        return std::numeric_limits<double>::infinity();
    }

    Trajectory scaled(double factor) const {
        if (!(factor >= 0.0)) throw ValidationError("hazard scale factor must be >= 0");
        Trajectory traj;
        for (const auto& p : pieces_)
            traj.pieces_.push_back({p.start, p.end, p.power_coef * factor, p.power,
                                    p.linear_coef * factor, p.cum_start * factor});
        return traj;
    }

    // h'(t) = k * h(k t), i.e. H'(t) = H(k t); support shrinks to end/k.
    Trajectory time_accelerated(double k) const {
        if (!(k > 0.0)) throw ValidationError("time acceleration factor must be > 0");
        Trajectory traj;
        for (const auto& p : pieces_) {
            double coef = p.power_coef * std::pow(k, p.power);
            traj.pieces_.push_back({p.start / k, p.end / k, coef, p.power,
                                    p.linear_coef * k, p.cum_start});
        }
        return traj;
    }

    // max(0, h(t) + gamma), splitting power pieces at the sign change.
    Trajectory shifted_clamped(double gamma) const {
        Trajectory traj;
        double cum = 0.0;
        for (const auto& p : pieces_) {
            double shifted = p.linear_coef + gamma;
            if (p.power_coef == 0.0) {
                append_piece(traj, cum, p.start, p.end, 0.0, 1.0, std::max(0.0, shifted));
                continue;
            }
            if (shifted >= 0.0) {
                append_piece(traj, cum, p.start, p.end, p.power_coef, p.power, shifted);
                continue;
            }
            // h(t) + gamma = power_coef*power*t^(power-1) + shifted crosses
            // zero at exactly one point because the power part is monotone.
            double cross = std::pow(-shifted / (p.power_coef * p.power),
                                    1.0 / (p.power - 1.0));
            if (p.power < 1.0) {
                // decreasing hazard: positive before the crossing
                double mid = std::clamp(cross, p.start, p.end);
                if (mid > p.start)
                    append_piece(traj, cum, p.start, mid, p.power_coef, p.power, shifted);
                if (mid < p.end) append_piece(traj, cum, mid, p.end, 0.0, 1.0, 0.0);
            } else {
                // increasing hazard: positive after the crossing
                double mid = std::clamp(cross, p.start, p.end);
                if (mid > p.start) append_piece(traj, cum, p.start, mid, 0.0, 1.0, 0.0);
                if (mid < p.end)
                    append_piece(traj, cum, mid, p.end, p.power_coef, p.power, shifted);
            }
        }
        return traj;
    }

    // This trajectory on [0, s), `after` from s on, with the cumulative
    // hazard continuous at the splice point.
    Trajectory spliced_at(double s, const Trajectory& after) const {
        if (!(s >= 0.0)) throw ValidationError("splice time must be >= 0");
        if (s == 0.0) return after;
        if (!(s <= support_end()))
            throw SupportError("splice time beyond in-control support");
        Trajectory traj;
        double cum = 0.0;
        for (const auto& p : pieces_) {
            if (p.start >= s) break;
            append_piece(traj, cum, p.start, std::min(p.end, s), p.power_coef, p.power,
                         p.linear_coef);
        }
        if (!(s < after.support_end()))
            throw SupportError("splice time beyond out-of-control support");
        for (const auto& p : after.pieces_) {
            if (p.end <= s) continue;
            append_piece(traj, cum, std::max(p.start, s), p.end, p.power_coef, p.power,
                         p.linear_coef);
        }
        return traj;
    }

private:
    static void append_piece(Trajectory& traj, double& cum, double start, double end,
                             double power_coef, double power, double linear_coef) {
        if (!(end > start)) return;
        traj.pieces_.push_back({start, end, power_coef, power, linear_coef, cum});
        if (std::isfinite(end)) {
            cum += linear_coef * (end - start);
            if (power_coef != 0.0)
                cum += power_coef * (std::pow(end, power) - std::pow(start, power));
        } else {
            cum = std::numeric_limits<double>::infinity();
        }
    }

    static double piece_limit(const Piece& p) {
        // cumulative hazard as t -> inf on an unbounded final piece
        if (p.power_coef > 0.0 || p.linear_coef > 0.0)
            return std::numeric_limits<double>::infinity();
        return p.cum_start;
    }

    const Piece& piece_at(double t) const {
        if (t < 0.0) throw RangeError("hazard evaluation at negative time");
        if (pieces_.empty() || !(t < support_end()))
            throw RangeError("hazard evaluation beyond support end (t = " +
                             std::to_string(t) + ", support ends at " +
                             std::to_string(support_end()) + ")");
        // binary search over piece starts
        std::size_t lo = 0, hi = pieces_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (pieces_[mid].start <= t)
                lo = mid;
            else
                hi = mid - 1;
        }
        return pieces_[lo];
    }

    static double solve_in_piece(const Piece& p, double target) {
        double r = target - p.cum_start;
        if (r <= 0.0) return p.start;
        if (p.power_coef == 0.0) return p.start + r / p.linear_coef;
        if (p.linear_coef == 0.0)
            return std::pow(r / p.power_coef + std::pow(p.start, p.power), 1.0 / p.power);
        // both terms present: Newton with bisection safeguard
        double lo = p.start;
        double hi = std::isfinite(p.end) ? p.end : guess_upper(p, r);
        double t = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            double f = p.cumulative_at(t) - target;
            if (f > 0.0)
                hi = t;
            else
                lo = t;
            double h = p.hazard_at(t);
            double step_to = (h > 0.0) ? t - f / h : 0.5 * (lo + hi);
            t = (step_to > lo && step_to < hi) ? step_to : 0.5 * (lo + hi);
            if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
        }
        return t;
    }

    static double guess_upper(const Piece& p, double r) {
        double hi = std::max(p.start, 1.0);
        while (p.cumulative_at(hi) < p.cum_start + r) hi *= 2.0;
        return hi;
    }

    std::vector<Piece> pieces_;
};

}  // namespace rscusum
