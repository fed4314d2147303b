#include "riskcal/report.hpp"

#include <sstream>

#include "riskcal/confidence.hpp"
#include "riskcal/format.hpp"

namespace riskcal {

namespace {

constexpr const char* kAbsent = "--";

std::string opt_csv(const std::optional<double>& value) {
  return value.has_value() ? format_double(*value) : kAbsent;
}

std::string opt_markdown(const std::optional<double>& value, int digits) {
  return value.has_value() ? format_fixed(*value, digits) : kAbsent;
}

// Test-set cells; a group can lack test records entirely, in which case
// there is nothing to report.
struct MetricCells {
  std::string rejection, coverage, precision;
};

MetricCells metric_cells_csv(const EvalMetrics& m) {
  if (m.n_test == 0) return {kAbsent, kAbsent, kAbsent};
  return {format_double(m.rejection_pct), format_double(m.acceptance_rate),
          opt_csv(m.precision)};
}

MetricCells metric_cells_markdown(const EvalMetrics& m) {
  if (m.n_test == 0) return {kAbsent, kAbsent, kAbsent};
  return {format_fixed(m.rejection_pct, 1), format_fixed(m.acceptance_rate, 3),
          opt_markdown(m.precision, 3)};
}

std::string prf_cell_markdown(const Prf& prf, double value) {
  return prf.no_predictions ? kAbsent : format_fixed(value, 3);
}

}  // namespace

std::string tau_cell_csv(const Threshold& tau) {
  return tau.reject_all() ? "inf" : format_double(tau.value);
}

std::string tau_cell_markdown(const Threshold& tau) {
  return tau.reject_all() ? "∞" : format_fixed(tau.value, 2);
}

std::string p_min_cell_csv(const Threshold& tau) {
  if (tau.reject_all()) return kAbsent;
  return format_double(sigmoid(tau.value));
}

std::string p_min_cell_markdown(const Threshold& tau) {
  if (tau.reject_all()) return kAbsent;
  const double p = sigmoid(tau.value);
  if (p > 0.999) return ">.999";
  std::string cell = format_fixed(p, 3);
  if (cell.size() > 1 && cell[0] == '0') cell.erase(0, 1);  // ".380" style
  return cell;
}

std::string sweep_csv(const std::map<GroupKey, std::vector<SweepRow>>& sweep) {
  std::ostringstream out;
  out << "group,alpha,tau,p_min,rejection_pct,acceptance_rate,precision,"
         "n_cal,n_test\n";
  for (const auto& [key, rows] : sweep) {
    for (const auto& row : rows) {
      const MetricCells cells = metric_cells_csv(row.metrics);
      out << key.label() << ',' << format_double(row.alpha) << ','
          << tau_cell_csv(row.threshold) << ','
          << p_min_cell_csv(row.threshold) << ',' << cells.rejection << ','
          << cells.coverage << ',' << cells.precision << ',' << row.n_cal
          << ',' << row.n_test << '\n';
    }
  }
  return out.str();
}

std::string sweep_markdown(
    const std::map<GroupKey, std::vector<SweepRow>>& sweep) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [key, rows] : sweep) {
    if (!first) out << '\n';
    first = false;
    out << "## group " << key.label();
    if (!rows.empty()) {
      out << " (n_cal=" << rows.front().n_cal
          << ", n_test=" << rows.front().n_test << ")";
    }
    out << "\n\n";
    out << "| alpha | tau | p_min | Rej.% | Cov. | Prec. |\n";
    out << "|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
      const MetricCells cells = metric_cells_markdown(row.metrics);
      out << "| " << format_double(row.alpha) << " | "
          << tau_cell_markdown(row.threshold) << " | "
          << p_min_cell_markdown(row.threshold) << " | " << cells.rejection
          << " | " << cells.coverage << " | " << cells.precision << " |\n";
    }
  }
  return out.str();
}

std::string calibrate_csv(const std::map<GroupKey, GroupCalibration>& groups) {
  std::ostringstream out;
  out << "group,n,brier,ece,tau,p_min,rejection_pct,acceptance_rate,"
         "precision,n_cal,n_test,status\n";
  for (const auto& [key, g] : groups) {
    const bool unsupported = g.status == GroupStatus::kUnsupported;
    MetricCells cells{kAbsent, kAbsent, kAbsent};
    if (!unsupported && g.metrics.has_value()) {
      cells = metric_cells_csv(*g.metrics);
    }
    out << key.label() << ',' << g.n_records << ','
        << format_double(g.summary.brier) << ','
        << format_double(g.summary.ece) << ','
        << (unsupported ? kAbsent : tau_cell_csv(g.threshold)) << ','
        << (unsupported ? kAbsent : p_min_cell_csv(g.threshold)) << ','
        << cells.rejection << ',' << cells.coverage << ',' << cells.precision
        << ',' << g.n_cal << ',' << g.n_test << ','
        << (unsupported ? "unsupported" : "ok") << '\n';
  }
  return out.str();
}

std::string calibrate_markdown(
    const std::map<GroupKey, GroupCalibration>& groups) {
  std::ostringstream out;
  if (!groups.empty()) {
    out << "## calibration (alpha="
        << format_double(groups.begin()->second.threshold.alpha) << ")\n\n";
  }
  out << "| group | n | Brier | ECE | tau | p_min | Rej.% | Cov. | Prec. | "
         "status |\n";
  out << "|:---|---:|---:|---:|---:|---:|---:|---:|---:|:---|\n";
  for (const auto& [key, g] : groups) {
    const bool unsupported = g.status == GroupStatus::kUnsupported;
    MetricCells cells{kAbsent, kAbsent, kAbsent};
    if (!unsupported && g.metrics.has_value()) {
      cells = metric_cells_markdown(*g.metrics);
    }
    out << "| " << key.label() << " | " << g.n_records << " | "
        << format_fixed(g.summary.brier, 3) << " | "
        << format_fixed(g.summary.ece, 3) << " | "
        << (unsupported ? kAbsent : tau_cell_markdown(g.threshold)) << " | "
        << (unsupported ? kAbsent : p_min_cell_markdown(g.threshold)) << " | "
        << cells.rejection << " | " << cells.coverage << " | "
        << cells.precision << " | " << (unsupported ? "unsupported" : "ok")
        << " |\n";
  }
  return out.str();
}

std::string match_csv(const Prf& entities, const Prf& relations) {
  std::ostringstream out;
  out << "kind,precision,recall,f1,tp,fp,fn,no_predictions\n";
  const auto row = [&out](const char* kind, const Prf& prf) {
    out << kind << ',' << format_double(prf.precision) << ','
        << format_double(prf.recall) << ',' << format_double(prf.f1) << ','
        << prf.tp << ',' << prf.fp << ',' << prf.fn << ','
        << (prf.no_predictions ? 1 : 0) << '\n';
  };
  row("entity", entities);
  row("relation", relations);
  return out.str();
}

std::string match_markdown(const Prf& entities, const Prf& relations,
                           const std::vector<std::string>& warnings) {
  std::ostringstream out;
  out << "| kind | Prec. | Rec. | F1 | TP | FP | FN |\n";
  out << "|:---|---:|---:|---:|---:|---:|---:|\n";
  const auto row = [&out](const char* kind, const Prf& prf) {
    out << "| " << kind << " | " << prf_cell_markdown(prf, prf.precision)
        << " | " << prf_cell_markdown(prf, prf.recall) << " | "
        << prf_cell_markdown(prf, prf.f1) << " | " << prf.tp << " | "
        << prf.fp << " | " << prf.fn << " |\n";
  };
  row("entity", entities);
  row("relation", relations);
  if (!warnings.empty()) {
    out << '\n';
    for (const auto& warning : warnings) {
      out << "- warning: " << warning << '\n';
    }
  }
  return out.str();
}

std::string sanitize_group_filename(const std::string& label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                      c == '_';
    out.push_back(safe ? c : '_');
  }
  return out;
}

}  // namespace riskcal
