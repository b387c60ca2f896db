#pragma once

#include <stdexcept>
#include <string>

namespace futurecone {

enum class Errc {
    VariantMismatch,
    InadmissibleControl,
    BudgetExhausted,
    UnsupportedAnalytic,
    NonpositiveHorizon,
    InvalidResolution,
    BadWindow,
    TimeMismatch,
    NoOverlap,
    GridMismatch,
    NoGuarantee,
    EmptyPolicies,
    UnsatisfiableDistribution,
    ConfigError,
    EmptyTrajectory,
    DegenerateCloud,
    SchemaError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace futurecone
