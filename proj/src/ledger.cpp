#include "rvm2d/ledger.hpp"

#include <cmath>
#include <stdexcept>

#include "rvm2d/parallel.hpp"

namespace rvm {

const LedgerRow& ConservationLedger::append(double t, double mass, double field_energy,
                                            double kinetic, double gauss_linf) {
  if (!rows_.empty() && t < rows_.back().t)
    throw std::invalid_argument("ConservationLedger: time must be nondecreasing");
  if (!std::isfinite(mass) || !std::isfinite(field_energy) || !std::isfinite(kinetic))
    throw std::invalid_argument("ConservationLedger: non-finite entry");
  rows_.push_back({t, mass, field_energy, kinetic, field_energy + kinetic, gauss_linf});
  return rows_.back();
}

double ConservationLedger::mass_drift() const {
  if (rows_.size() < 2) return 0.0;
  return rows_.back().mass - rows_.front().mass;
}

double ConservationLedger::energy_drift_rel() const {
  if (rows_.size() < 2) return 0.0;
  double t0 = rows_.front().total;
  double scale = std::abs(t0) > 1e-300 ? std::abs(t0) : 1.0;
  double worst = 0.0;
  for (const auto& r : rows_) worst = std::max(worst, std::abs(r.total - t0) / scale);
  return worst;
}

double weighted_mass(const std::vector<double>& w, double norm) {
  std::vector<double> parts(chunk_count_for(w.size()), 0.0);
  parallel_chunks(w.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += w[i];
    parts[c] = s;
  });
  return norm * tree_sum(std::move(parts));
}

double weighted_kinetic(const std::vector<double>& p1, const std::vector<double>& p2,
                        const std::vector<double>& w, double norm) {
  std::vector<double> parts(chunk_count_for(w.size()), 0.0);
  parallel_chunks(w.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i)
      s += w[i] * std::sqrt(1.0 + p1[i] * p1[i] + p2[i] * p2[i]);
    parts[c] = s;
  });
  return norm * tree_sum(std::move(parts));
}

}  // namespace rvm
