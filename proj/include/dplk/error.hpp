#pragma once

#include <stdexcept>
#include <string>

namespace dplk {

// Malformed input: syntax errors, invariant violations, vocabulary mismatch.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured size or blow-up limit was exceeded.
class GuardError : public std::runtime_error {
public:
    GuardError(const std::string& guard, const std::string& detail)
        : std::runtime_error("guard " + guard + " exceeded: " + detail), guard_(guard) {}
    const std::string& guard() const { return guard_; }

private:
    std::string guard_;
};

// An internal invariant failed. Always a defect.
class DefectError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Reads DPLK_BUDGET if set, otherwise returns fallback.
long long budget_from_env(long long fallback);

}  // namespace dplk
