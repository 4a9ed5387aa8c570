#pragma once

#include "efxw/model.hpp"
#include "efxw/welfare.hpp"

#include <optional>
#include <string>

namespace efxw {

enum class SolveStatus { Found, NoPositiveWelfare, InfeasibleObjective };

inline std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Found: return "found";
    case SolveStatus::NoPositiveWelfare: return "no-positive-welfare";
    case SolveStatus::InfeasibleObjective: return "infeasible-objective";
    }
    return "unknown";
}

struct SolverResult {
    std::optional<Allocation> allocation;
    UtilityProfile profile;  // utilities of `allocation`; all zeros when there is none
    ScoreKey key;
    SolveStatus status = SolveStatus::Found;
    std::string note;
};

/// Result for a known allocation; status follows from its key.
inline SolverResult make_result(const Instance& inst, Allocation alloc, const PExponent& p, EgalitarianOrder order) {
    SolverResult r;
    r.profile = utilities(inst, alloc);
    r.key = score_key(r.profile, p, order);
    r.status = r.key.is_zero_welfare() ? SolveStatus::NoPositiveWelfare : SolveStatus::Found;
    r.allocation = std::move(alloc);
    return r;
}

/// Result without an allocation, carrying the welfare-0 key.
inline SolverResult make_empty_result(const Instance& inst, const PExponent& p, EgalitarianOrder order,
                                      SolveStatus status, std::string note = {}) {
    SolverResult r;
    r.profile.assign(static_cast<std::size_t>(inst.n()), Rational(0));
    r.key = score_key(r.profile, p, order);
    r.status = status;
    r.note = std::move(note);
    return r;
}

}  // namespace efxw
