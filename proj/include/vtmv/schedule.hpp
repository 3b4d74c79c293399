#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vtmv/errors.hpp"

namespace vtmv {

/// Piecewise-constant coefficient schedule.
///
/// Segment k covers [breakpoints[k], breakpoints[k+1]); the last segment
/// extends to +infinity. A single segment models a constant coefficient.
template <typename T>
class Schedule {
public:
    Schedule() = default;

    explicit Schedule(T constant) : breakpoints_{0.0}, values_{std::move(constant)} {}

    Schedule(std::vector<double> breakpoints, std::vector<T> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (breakpoints_.empty()) {
            throw StructuralError("schedule: at least one segment is required");
        }
        if (breakpoints_.size() != values_.size()) {
            throw StructuralError("schedule: " + std::to_string(breakpoints_.size()) +
                                  " breakpoints but " + std::to_string(values_.size()) + " values");
        }
        if (breakpoints_.front() != 0.0) {
            throw StructuralError("schedule: first breakpoint must be 0");
        }
        for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
            if (!(breakpoints_[k] > breakpoints_[k - 1])) {
                throw StructuralError("schedule: breakpoints must be strictly increasing");
            }
        }
    }

    [[nodiscard]] std::size_t segments() const noexcept { return values_.size(); }
    [[nodiscard]] bool is_constant() const noexcept { return values_.size() == 1; }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const T> values() const noexcept { return values_; }

    [[nodiscard]] std::size_t segment_index(double t) const {
        if (!(t >= 0.0)) throw DomainError("schedule: time must be >= 0");
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    [[nodiscard]] const T& at(double t) const { return values_[segment_index(t)]; }

    /// Start of segment k and its (possibly infinite) end.
    [[nodiscard]] double segment_start(std::size_t k) const { return breakpoints_[k]; }

    /// Exact integral of f(value) over [t0, t1], summed segment by segment.
    template <typename F>
    [[nodiscard]] double integrate(double t0, double t1, F&& f) const {
        if (!(t0 >= 0.0)) throw DomainError("integral: lower limit must be >= 0");
        if (t0 > t1) throw DomainError("integral: lower limit exceeds upper limit");
        double total = 0.0;
        std::size_t k = segment_index(t0);
        double lo = t0;
        while (lo < t1) {
            const double hi = k + 1 < breakpoints_.size() ? std::min(breakpoints_[k + 1], t1) : t1;
            total += (hi - lo) * f(values_[k]);
            lo = hi;
            ++k;
        }
        return total;
    }

private:
    std::vector<double> breakpoints_;
    std::vector<T> values_;
};

using ScalarSchedule = Schedule<double>;

/// Sorted union of breakpoints of several schedules.
template <typename... S>
std::vector<double> merge_breakpoints(const S&... schedules) {
    std::vector<double> out;
    (out.insert(out.end(), schedules.breakpoints().begin(), schedules.breakpoints().end()), ...);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace vtmv
