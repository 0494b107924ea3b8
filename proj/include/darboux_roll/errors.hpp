#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace darboux_roll {

enum class ErrorKind {
    DegenerateChart,
    NonOrthogonalChart,
    ChartSingularity,
    GoalTangentSingularity,
    ZeroBeta,
    StepTooLarge,
    InvalidArgument,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DegenerateChart: return "DegenerateChart";
    case ErrorKind::NonOrthogonalChart: return "NonOrthogonalChart";
    case ErrorKind::ChartSingularity: return "ChartSingularity";
    case ErrorKind::GoalTangentSingularity: return "GoalTangentSingularity";
    case ErrorKind::ZeroBeta: return "ZeroBeta";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class KinematicsError : public std::runtime_error {
public:
    KinematicsError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace darboux_roll
