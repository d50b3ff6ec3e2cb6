#pragma once

// Report type shared by the theorem verifiers: premise checks gate the
// conclusion check unless falsification mode asks for it regardless.

#include <optional>
#include <string>
#include <vector>

#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"

namespace mfreg {

struct TheoremReport {
  std::string theorem_id;
  std::vector<CheckReport> premise_checks;
  std::optional<CheckReport> conclusion_check;
  ExtReal bound_claimed = ExtReal::infinity();
  ExtReal bound_measured = ExtReal(0.0);
  bool premises_hold = false;
  bool conclusion_holds = false;
  bool bound_holds = false;
  bool falsification = false;
  double tau_zero = 0;
  json details = json::object();
  std::vector<std::string> notes;

  // Premises verified at resolution imply conclusion and bound.
  bool implication_ok() const { return !premises_hold || (conclusion_holds && bound_holds); }

  json to_json() const {
    json prem = json::array();
    for (const auto& c : premise_checks) prem.push_back(c.to_json());
    json j = {{"theorem_id", theorem_id},
              {"premise_checks", prem},
              {"premises_hold", premises_hold},
              {"conclusion_check", conclusion_check ? conclusion_check->to_json() : json(nullptr)},
              {"conclusion_holds", conclusion_holds},
              {"bound_claimed", num(bound_claimed)},
              {"bound_measured", num(bound_measured)},
              {"bound_holds", bound_holds},
              {"falsification", falsification},
              {"tau_zero", num(tau_zero)}};
    if (!details.empty()) j["details"] = details;
    if (!notes.empty()) j["notes"] = notes;
    return j;
  }
};

inline bool all_hold(const std::vector<CheckReport>& v) {
  for (const auto& c : v)
    if (!c.holds) return false;
  return true;
}

// measured <= claimed (1 + slack), with an absolute floor for zero moduli.
inline bool within_bound(ExtReal measured, ExtReal claimed, double slack) {
  if (claimed.is_inf()) return true;
  if (measured.is_inf()) return false;
  return measured.value() <= claimed.value() * (1 + slack) + 1e-9;
}

// Positive check constant for a claimed bound (checks need L > 0).
inline double check_constant(ExtReal claimed, double slack) {
  return std::max(claimed.value() * (1 + slack), 1e-9);
}

// A CheckReport for inequalities that are not one of the nine properties.
inline CheckReport custom_check(std::string name, bool holds, double L, json witness, json config = json::object()) {
  CheckReport r;
  r.property = std::move(name);
  r.holds = holds;
  r.L = L;
  r.witness = holds ? json(nullptr) : std::move(witness);
  r.config = std::move(config);
  return r;
}

}  // namespace mfreg
