#pragma once

// Report rendering. CSV is the authoritative machine-readable output; the
// markdown tables are a human-readable view of the same values using the
// conventions "inf"/"∞" for the reject-all threshold and "--" for values
// that do not exist (precision with nothing accepted, the confidence cutoff
// under reject-all).

#include <map>
#include <string>
#include <vector>

#include "riskcal/calibration.hpp"
#include "riskcal/conformal.hpp"
#include "riskcal/matcher.hpp"
#include "riskcal/record.hpp"

namespace riskcal {

// Columns: group,alpha,tau,p_min,rejection_pct,acceptance_rate,precision,
// n_cal,n_test. tau is "inf" under reject-all; p_min and precision are "--"
// when absent; all other numbers use shortest round-trip formatting.
std::string sweep_csv(const std::map<GroupKey, std::vector<SweepRow>>& sweep);

// One markdown table per group, rows sorted by alpha.
std::string sweep_markdown(
    const std::map<GroupKey, std::vector<SweepRow>>& sweep);

// Columns: group,n,brier,ece,tau,p_min,rejection_pct,acceptance_rate,
// precision,n_cal,n_test,status. status is "ok" or "unsupported" (no
// calibration records); unsupported rows render threshold columns as "--".
std::string calibrate_csv(const std::map<GroupKey, GroupCalibration>& groups);

std::string calibrate_markdown(
    const std::map<GroupKey, GroupCalibration>& groups);

// Columns: kind,precision,recall,f1,tp,fp,fn,no_predictions with one row
// for entities and one for relations. The CSV keeps numeric zeros plus the
// flag; the markdown view renders flagged metrics as "--".
std::string match_csv(const Prf& entities, const Prf& relations);

std::string match_markdown(const Prf& entities, const Prf& relations,
                           const std::vector<std::string>& warnings);

// Reliability curve CSVs are produced per group by curve_to_csv; this maps
// a group label to a safe filename fragment (path separators and other
// non-portable characters become '_').
std::string sanitize_group_filename(const std::string& label);

// Cell-level helpers shared by both renderers, exposed for tests.
std::string tau_cell_csv(const Threshold& tau);
std::string tau_cell_markdown(const Threshold& tau);
std::string p_min_cell_csv(const Threshold& tau);
std::string p_min_cell_markdown(const Threshold& tau);

}  // namespace riskcal
