#pragma once

#include "pathdep/functional.hpp"
#include "pathdep/rng.hpp"
#include "pathdep/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pathdep {

// Growth, Lipschitz and smoothness hypotheses spot-checked by Monte Carlo.
// C1/C2 concern the skeleton ODE right-hand side, C3-C5 the SDE coefficients,
// C6-C8 the generalized role assignment.
enum class Condition { C1, C2, C3, C4, C5, C6, C7, C8 };

std::string condition_name(Condition c);

struct ConditionViolation {
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double t = 0.0;
    std::size_t sample = 0;
};

struct ConditionReport {
    std::string condition;
    std::size_t samples = 0;
    std::vector<ConditionViolation> violations;
    std::string note;  // set when declared constants are missing
    bool passed() const { return violations.empty(); }
};

// Replacements for the declared constants, used to probe how the checker
// reacts to too-optimistic declarations.
struct ConditionOverrides {
    std::optional<double> growth_c;
    std::optional<double> growth_kappa;
    std::optional<double> lipschitz;
};

ConditionReport check_condition(const SdeModel& model, Condition which,
                                std::size_t samples, GaussianStream& rng,
                                const ConditionOverrides& overrides = {});

ConditionReport check_condition(const RoleAssignment& roles, Condition which,
                                std::size_t samples, GaussianStream& rng,
                                const ConditionOverrides& overrides = {});

}  // namespace pathdep
