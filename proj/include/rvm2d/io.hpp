#pragma once

#include <string>
#include <vector>

#include "rvm2d/fields.hpp"
#include "rvm2d/gs_decomposition.hpp"
#include "rvm2d/ledger.hpp"
#include "rvm2d/markers.hpp"
#include "rvm2d/support.hpp"

namespace rvm {

// One apex line of the decomposition report.
struct DecompositionRow {
  double t = 0.0, x1 = 0.0, x2 = 0.0;
  double kt = 0.0, ks1 = 0.0, ks2 = 0.0;
  double err_t = 0.0, err_s1 = 0.0, err_s2 = 0.0;
  double eps[4] = {0.0, 0.0, 0.0, 0.0};
  double A_split = 0.0, B_split = 0.0, C_split = 0.0;
};

DecompositionRow to_row(const DecompositionResult& r);

// All text artifacts print doubles with %.17g (round-trip exact) and are
// written in binary mode so identical runs produce identical bytes.
std::string fmt_g17(double v);

void write_text_file(const std::string& path, const std::string& content);

// ledger.csv: t,mass,field_energy,kinetic,total,gauss_linf,Ptilde,P2,P
// (rows and support samples are matched by position).
void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows,
                      const std::vector<SupportSample>& support);

// envelope.csv: t,Ptilde,P2,P
void write_envelope_csv(const std::string& path,
                        const std::vector<SupportSample>& support);
std::vector<SupportSample> read_envelope_csv(const std::string& path);

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionRow>& rows);
std::vector<DecompositionRow> read_decomposition_csv(const std::string& path);

// Binary snapshots.  Field files carry the magic "RVM2", marker files
// "RVP2"; both store little-endian doubles in layout order.
void write_field_snapshot(const std::string& path, const FieldState& f);
void write_marker_snapshot(const std::string& path, const MarkerEnsemble& m);

struct FieldSnapshot {
  int nx = 0, ny = 0;
  double half_width = 0.0, dt = 0.0, time = 0.0;
  Grid2D e1, e2, b;
};
FieldSnapshot read_field_snapshot(const std::string& path);

struct MarkerSnapshot {
  double normalization = 0.0, time = 0.0;
  std::vector<double> x1, x2, p1, p2, w;
};
MarkerSnapshot read_marker_snapshot(const std::string& path);

}  // namespace rvm
