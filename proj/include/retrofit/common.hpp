// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace retrofit {

inline constexpr const char* version = "1.0.0";

// Error taxonomy. Exit codes used by the CLI are attached to the types so
// that every throw site maps onto a stable process status:
//   ConfigError  -> 2   (bad or inconsistent inputs)
//   DomainError  -> 3   (arguments outside a function's mathematical domain)
//   NumericError -> 4   (iteration failed to converge, non-finite result)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 2;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 3;
};

// Raised when a quantity that only exists in one investment regime (e.g. the
// dual free boundary, which requires a strictly negative retrofit premium) is
// requested in the other regime.  A regime error is a domain error.
struct RegimeError : DomainError {
    using DomainError::DomainError;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 4;
};

// Investment regimes.  ImmediateInvest: retrofitting now dominates waiting
// (non-negative premium, or disposable capital already at/above the
// threshold).  Waiting: the optimal policy is to delay until the threshold is
// first reached.  PostInvest: the retrofit has been carried out.
// Counterfactual: the agent never retrofits (reference policy).
enum class Regime { ImmediateInvest, Waiting, PostInvest, Counterfactual };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::ImmediateInvest: return "immediate";
        case Regime::Waiting:         return "waiting";
        case Regime::PostInvest:      return "post_invest";
        case Regime::Counterfactual:  return "counterfactual";
    }
    return "unknown";
}

} // namespace retrofit
