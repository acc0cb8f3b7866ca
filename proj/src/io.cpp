#include "rvm2d/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rvm {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DecompositionRow to_row(const DecompositionResult& r) {
  DecompositionRow row;
  row.t = r.t;
  row.x1 = r.x.x;
  row.x2 = r.x.y;
  row.kt = r.KT.value;
  row.ks1 = r.KS1.total.value;
  row.ks2 = r.KS2.total.value;
  row.err_t = r.KT.error;
  row.err_s1 = r.KS1.total.error;
  row.err_s2 = r.KS2.total.error;
  for (int k = 0; k < 4; ++k) row.eps[k] = r.KS2.eps_psi[k];
  row.A_split = r.splits.A_split;
  row.B_split = r.splits.B_split;
  row.C_split = r.splits.C_split;
  return row;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::string& expect_header,
                                          std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expect_header)
    throw std::runtime_error(path + ":1: unexpected header '" + line + "'");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad number '" + cell + "'");
      }
    }
    if (row.size() != columns)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(columns) +
                               " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char kLedgerHeader[] =
    "t,mass,field_energy,kinetic,total,gauss_linf,Ptilde,P2,P";
const char kEnvelopeHeader[] = "t,Ptilde,P2,P";
const char kDecompHeader[] =
    "t,x1,x2,K_T,K_S1,K_S2,err_T,err_S1,err_S2,eps1,eps2,eps3,eps4,"
    "A_split,B_split,C_split";

}  // namespace

void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows,
                      const std::vector<SupportSample>& support) {
  if (rows.size() != support.size())
    throw std::invalid_argument("write_ledger_csv: row/support count mismatch");
  std::ostringstream o;
  o << kLedgerHeader << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LedgerRow& r = rows[i];
    const SupportSample& s = support[i];
    o << fmt_g17(r.t) << ',' << fmt_g17(r.mass) << ',' << fmt_g17(r.field_energy)
      << ',' << fmt_g17(r.kinetic) << ',' << fmt_g17(r.total) << ','
      << fmt_g17(r.gauss_linf) << ',' << fmt_g17(s.ptilde) << ','
      << fmt_g17(s.p2) << ',' << fmt_g17(s.P) << "\n";
  }
  write_text_file(path, o.str());
}

void write_envelope_csv(const std::string& path,
                        const std::vector<SupportSample>& support) {
  std::ostringstream o;
  o << kEnvelopeHeader << "\n";
  for (const SupportSample& s : support)
    o << fmt_g17(s.t) << ',' << fmt_g17(s.ptilde) << ',' << fmt_g17(s.p2) << ','
      << fmt_g17(s.P) << "\n";
  write_text_file(path, o.str());
}

std::vector<SupportSample> read_envelope_csv(const std::string& path) {
  std::vector<SupportSample> out;
  for (const std::vector<double>& r : read_csv(path, kEnvelopeHeader, 4)) {
    SupportSample s;
    s.t = r[0];
    s.ptilde = r[1];
    s.p2 = r[2];
    s.P = r[3];
    out.push_back(s);
  }
  return out;
}

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionRow>& rows) {
  std::ostringstream o;
  o << kDecompHeader << "\n";
  for (const DecompositionRow& r : rows) {
    o << fmt_g17(r.t) << ',' << fmt_g17(r.x1) << ',' << fmt_g17(r.x2) << ','
      << fmt_g17(r.kt) << ',' << fmt_g17(r.ks1) << ',' << fmt_g17(r.ks2) << ','
      << fmt_g17(r.err_t) << ',' << fmt_g17(r.err_s1) << ',' << fmt_g17(r.err_s2);
    for (int k = 0; k < 4; ++k) o << ',' << fmt_g17(r.eps[k]);
    o << ',' << fmt_g17(r.A_split) << ',' << fmt_g17(r.B_split) << ','
      << fmt_g17(r.C_split) << "\n";
  }
  write_text_file(path, o.str());
}

std::vector<DecompositionRow> read_decomposition_csv(const std::string& path) {
  std::vector<DecompositionRow> out;
  for (const std::vector<double>& r : read_csv(path, kDecompHeader, 16)) {
    DecompositionRow d;
    d.t = r[0]; d.x1 = r[1]; d.x2 = r[2];
    d.kt = r[3]; d.ks1 = r[4]; d.ks2 = r[5];
    d.err_t = r[6]; d.err_s1 = r[7]; d.err_s2 = r[8];
    for (int k = 0; k < 4; ++k) d.eps[k] = r[9 + k];
    d.A_split = r[13]; d.B_split = r[14]; d.C_split = r[15];
    out.push_back(d);
  }
  return out;
}

namespace {

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), (std::streamsize)n);
}

void get_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), (std::streamsize)n);
  if ((std::size_t)in.gcount() != n)
    throw std::runtime_error("truncated snapshot " + path);
}

void put_doubles(std::ofstream& out, const std::vector<double>& v) {
  put_bytes(out, v.data(), v.size() * sizeof(double));
}

void get_doubles(std::ifstream& in, std::vector<double>& v, std::size_t n,
                 const std::string& path) {
  v.resize(n);
  get_bytes(in, v.data(), n * sizeof(double), path);
}

}  // namespace

void write_field_snapshot(const std::string& path, const FieldState& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  put_bytes(out, "RVM2", 4);
  std::int32_t nx = f.nx(), ny = f.ny();
  put_bytes(out, &nx, 4);
  put_bytes(out, &ny, 4);
  double meta[3] = {f.half_width(), f.dt(), f.time()};
  put_bytes(out, meta, sizeof meta);
  put_doubles(out, f.e1.a);
  put_doubles(out, f.e2.a);
  put_doubles(out, f.b.a);
  if (!out) throw std::runtime_error("write failed for " + path);
}

FieldSnapshot read_field_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  get_bytes(in, magic, 4, path);
  if (std::memcmp(magic, "RVM2", 4) != 0)
    throw std::runtime_error(path + ": not a field snapshot (bad magic)");
  FieldSnapshot s;
  std::int32_t nx, ny;
  get_bytes(in, &nx, 4, path);
  get_bytes(in, &ny, 4, path);
  if (nx < 1 || ny < 1 || (long)nx * ny > (1L << 30))
    throw std::runtime_error(path + ": implausible grid size");
  s.nx = nx;
  s.ny = ny;
  double meta[3];
  get_bytes(in, meta, sizeof meta, path);
  s.half_width = meta[0];
  s.dt = meta[1];
  s.time = meta[2];
  s.e1 = Grid2D(nx, ny);
  s.e2 = Grid2D(nx, ny);
  s.b = Grid2D(nx, ny);
  get_doubles(in, s.e1.a, (std::size_t)nx * ny, path);
  get_doubles(in, s.e2.a, (std::size_t)nx * ny, path);
  get_doubles(in, s.b.a, (std::size_t)nx * ny, path);
  return s;
}

void write_marker_snapshot(const std::string& path, const MarkerEnsemble& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  put_bytes(out, "RVP2", 4);
  std::uint64_t n = m.size();
  put_bytes(out, &n, 8);
  double meta[2] = {m.normalization, m.time()};
  put_bytes(out, meta, sizeof meta);
  put_doubles(out, m.x1);
  put_doubles(out, m.x2);
  put_doubles(out, m.p1);
  put_doubles(out, m.p2);
  put_doubles(out, m.w);
  if (!out) throw std::runtime_error("write failed for " + path);
}

MarkerSnapshot read_marker_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  get_bytes(in, magic, 4, path);
  if (std::memcmp(magic, "RVP2", 4) != 0)
    throw std::runtime_error(path + ": not a marker snapshot (bad magic)");
  std::uint64_t n;
  get_bytes(in, &n, 8, path);
  if (n > (1ULL << 32))
    throw std::runtime_error(path + ": implausible marker count");
  MarkerSnapshot s;
  double meta[2];
  get_bytes(in, meta, sizeof meta, path);
  s.normalization = meta[0];
  s.time = meta[1];
  get_doubles(in, s.x1, n, path);
  get_doubles(in, s.x2, n, path);
  get_doubles(in, s.p1, n, path);
  get_doubles(in, s.p2, n, path);
  get_doubles(in, s.w, n, path);
  return s;
}

}  // namespace rvm
