#include "rvm2d/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rvm2d/deposit.hpp"
#include "rvm2d/gs_decomposition.hpp"
#include "rvm2d/history.hpp"
#include "rvm2d/plots.hpp"
#include "rvm2d/source.hpp"

namespace fs = std::filesystem;

namespace rvm {

void check_time_levels(const FieldState& fields, const MarkerEnsemble& m,
                       double slack) {
  const double tol = slack * std::max(1.0, std::abs(fields.time()));
  if (std::abs(fields.time() - m.time()) > tol)
    throw std::runtime_error(
        "mismatched time levels between E, B, f: fields at t=" +
        std::to_string(fields.time()) + ", markers at t=" +
        std::to_string(m.time()));
}

namespace {

double grid_mean(const Grid2D& g) {
  double s = 0.0;
  for (double v : g.a) s += v;
  return s / (double)g.a.size();
}

// sup over nodes of |E| + |B|, each component on its own subgrid
double field_sup(const FieldState& f) {
  double e1m = 0.0, e2m = 0.0, bm = 0.0;
  for (double v : f.e1.a) e1m = std::max(e1m, std::abs(v));
  for (double v : f.e2.a) e2m = std::max(e2m, std::abs(v));
  for (double v : f.b.a) bm = std::max(bm, std::abs(v));
  return std::hypot(e1m, e2m) + bm;
}

std::string snap_name(const char* prefix, long step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06ld.%s", prefix, step, ext);
  return buf;
}

// Split scales for an apex: explicit override wins, then the h-minimizer if
// its window is feasible at the measured support, else the caller falls back
// to the single-pass (degenerate) evaluation.
bool choose_splits(const RunConfig& cfg, double t, double P, double P2,
                   AngularSplit& out) {
  if (cfg.split_A > 0.0) {
    out.t = t;
    out.P = P;
    out.P2 = P2;
    out.A_split = cfg.split_A;
    out.B_split = cfg.split_B;
    out.C_split = cfg.split_C;
    out.alpha = P2 / out.A_split;
    out.beta = P2 / out.B_split;
    out.gamma = P2 / out.C_split;
    out.validate(cfg.w + cfg.ratio_slack);
    return true;
  }
  if (!(P >= 2.0) || !(P2 > 0.0)) return false;
  try {
    out = optimize_splits(t, P, P2, cfg.ratio_slack);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

}  // namespace

RunArtifacts run_simulation(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);

  RunArtifacts art;
  art.dir = out_dir;
  art.envelope = SupportEnvelope(cfg.w);
  std::set<std::string> breached;
  auto breach = [&](const std::string& name, const std::string& detail) {
    if (breached.insert(name).second)
      art.breaches.push_back(name + ": " + detail);
  };

  write_text_file(out_dir + "/effective.cfg", cfg.echo());

  const double dt = cfg.dt();
  const double L = cfg.half_width;

  MarkerEnsemble m = sample_profile(cfg.profile, cfg.markers, cfg.seed);
  FieldState fields(cfg.nx, cfg.ny, L, dt);
  Grid2D rho(cfg.nx, cfg.ny), j1(cfg.nx, cfg.ny), j2(cfg.nx, cfg.ny);

  deposit_charge(m, L, rho);
  // Periodic boxes must carry zero net charge; the uniform background that
  // neutralizes the marker charge is folded into the Gauss-law right side.
  const double bg = grid_mean(rho);
  fields.init_from_charge(rho);
  const double sup_K0 = field_sup(fields);

  FieldHistory fhist(cfg.nx, cfg.ny, L, 1);
  auto phist = std::make_shared<ParticleHistory>(cfg.history_marker_stride);
  fhist.record(fields);
  phist->record(m);

  double mass0 = 0.0;
  auto diagnose = [&](bool first) {
    check_time_levels(fields, m);
    deposit_charge(m, L, rho);
    Grid2D rho_adj = rho;
    for (double& v : rho_adj.a) v -= bg;
    const double gauss = fields.gauss_residual(rho_adj);
    const double mass = weighted_mass(m.w, m.normalization);
    const double fe = fields.energy();
    const double kin = weighted_kinetic(m.p1, m.p2, m.w, m.normalization);
    art.ledger.append(m.time(), mass, fe, kin, gauss);
    art.envelope.update(m.time(), m.p1, m.p2, m.w);
    if (first) mass0 = mass;
    if (mass != mass0)
      breach("mass-drift", "weighted mass changed at t=" +
                               std::to_string(m.time()));
    if (gauss > 1e-8)
      breach("gauss", "Gauss residual " + std::to_string(gauss) + " at t=" +
                          std::to_string(m.time()));
    if (!std::isfinite(fe) || !std::isfinite(kin))
      breach("non-finite", "energy became non-finite at t=" +
                               std::to_string(m.time()));
  };

  auto dump = [&](long step) {
    write_field_snapshot(out_dir + "/" + snap_name("fields", step, "rvm2"),
                         fields);
    write_marker_snapshot(out_dir + "/" + snap_name("markers", step, "rvp2"),
                          m);
  };

  diagnose(true);
  dump(0);
  desynchronize_momenta(m, fields);

  std::vector<double> x1b, x2b;
  for (long n = 0; n < cfg.steps; ++n) {
    try {
      push_markers(m, fields, dt, &x1b, &x2b);
    } catch (const std::runtime_error& e) {
      breach("non-finite", e.what());
      break;
    }
    deposit_current(m, x1b, x2b, L, dt, j1, j2);
    fields.step(j1, j2);

    const long k = n + 1;
    if (k % cfg.diag_every == 0 || k == cfg.steps) diagnose(false);
    if (k % cfg.history_stride == 0 || k == cfg.steps) {
      fhist.record(fields);
      phist->record(m);
    }
    if ((cfg.dump_every > 0 && k % cfg.dump_every == 0) || k == cfg.steps)
      dump(k);
  }

  // |p(t)| <= |p(0)| + sum dt |K| per marker; the only unaccounted kick is
  // the leapfrog start-up half step, bounded by (dt/2) sup|K(0)|.
  if (m.size() > 0 && cfg.steps > 0) {
    const double slack =
        0.5 * dt * sup_K0 + 1e-9 * (1.0 + m.time() + sup_K0);
    const InequalityReport rep = verify_momentum_inequality(m, slack);
    if (rep.violations > 0)
      breach("momentum-inequality",
             std::to_string(rep.violations) + " markers exceeded the force "
             "integral bound, worst margin " +
                 std::to_string(rep.worst_margin) + " at index " +
                 std::to_string(rep.worst_index));
  }

  // decomposition apexes against the recorded histories
  if (!cfg.apexes.empty()) {
    const SupportSample last = art.envelope.samples().back();
    MarkerSource src(phist, fields.dx());
    FieldModel fmodel = model_from_history(fhist);
    for (const ApexSpec& apex : cfg.apexes) {
      try {
        AngularSplit sp;
        const bool have =
            choose_splits(cfg, apex.t, last.P, last.p2, sp);
        DecomposeOptions opt;
        opt.rel = cfg.quad_rel;
        opt.splits = have ? &sp : nullptr;
        DecompositionResult res =
            decompose_apex(apex.t, apex.x, src, fmodel, opt);
        art.decomposition.push_back(to_row(res));
      } catch (const std::exception& e) {
        breach("decompose", std::string("apex t=") + std::to_string(apex.t) +
                                " failed: " + e.what());
      }
    }
    write_decomposition_csv(out_dir + "/decomposition.csv",
                            art.decomposition);
  }

  write_ledger_csv(out_dir + "/ledger.csv", art.ledger.rows(),
                   art.envelope.samples());
  write_envelope_csv(out_dir + "/envelope.csv", art.envelope.samples());

  std::ostringstream summary;
  summary << "steps=" << cfg.steps << " dt=" << fmt_g17(dt) << " t_end="
          << fmt_g17(m.time()) << "\n";
  summary << "mass_drift=" << fmt_g17(art.ledger.mass_drift()) << "\n";
  summary << "energy_drift_rel=" << fmt_g17(art.ledger.energy_drift_rel())
          << "\n";
  if (art.breaches.empty()) {
    summary << "invariants=ok\n";
  } else {
    for (const std::string& b : art.breaches) summary << "breach=" << b << "\n";
  }
  write_text_file(out_dir + "/run_summary.txt", summary.str());

  if (cfg.emit_plots) emit_plots(out_dir);
  return art;
}

DecompositionRow decompose_from_artifacts(const std::string& run_dir,
                                          const ApexSpec& apex, double rel) {
  std::vector<fs::path> fsnaps, msnaps;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("fields_", 0) == 0 && entry.path().extension() == ".rvm2")
      fsnaps.push_back(entry.path());
    if (name.rfind("markers_", 0) == 0 && entry.path().extension() == ".rvp2")
      msnaps.push_back(entry.path());
  }
  if (fsnaps.empty() || msnaps.empty())
    throw std::runtime_error(
        "decompose: no snapshots in " + run_dir +
        " (rerun with dump.every > 0 to persist the histories)");
  std::sort(fsnaps.begin(), fsnaps.end());
  std::sort(msnaps.begin(), msnaps.end());

  std::unique_ptr<FieldHistory> fhist;
  double mesh = 1.0;
  for (const fs::path& p : fsnaps) {
    const FieldSnapshot s = read_field_snapshot(p.string());
    if (!fhist) {
      fhist = std::make_unique<FieldHistory>(s.nx, s.ny, s.half_width, 1);
      mesh = 2.0 * s.half_width / s.nx;
    }
    FieldState f(s.nx, s.ny, s.half_width, s.dt);
    f.e1 = s.e1;
    f.e2 = s.e2;
    f.b = s.b;
    f.set_time(s.time);
    fhist->record(f);
  }
  auto phist = std::make_shared<ParticleHistory>(1);
  for (const fs::path& p : msnaps) {
    const MarkerSnapshot s = read_marker_snapshot(p.string());
    MarkerEnsemble me;
    me.x1 = s.x1;
    me.x2 = s.x2;
    me.p1 = s.p1;
    me.p2 = s.p2;
    me.w = s.w;
    me.normalization = s.normalization;
    me.t = s.time;
    phist->record(me);
  }

  if (fhist->t_end() + 1e-9 < apex.t || phist->t_end() + 1e-9 < apex.t)
    throw std::runtime_error(
        "decompose: snapshots end at t=" + std::to_string(fhist->t_end()) +
        ", before the apex t=" + std::to_string(apex.t));

  // measured support at the apex, for the split choice
  AngularSplit sp;
  bool have = false;
  const std::string env_path = run_dir + "/envelope.csv";
  if (fs::exists(env_path)) {
    double P = 0.0, P2 = 0.0;
    for (const SupportSample& s : read_envelope_csv(env_path))
      if (s.t <= apex.t + 1e-12) {
        P = s.P;
        P2 = s.p2;
      }
    if (P >= 2.0 && P2 > 0.0) {
      try {
        sp = optimize_splits(apex.t, P, P2);
        have = true;
      } catch (const std::domain_error&) {
      }
    }
  }

  MarkerSource src(phist, mesh);
  FieldModel fmodel = model_from_history(*fhist);
  DecomposeOptions opt;
  opt.rel = rel;
  opt.splits = have ? &sp : nullptr;
  return to_row(decompose_apex(apex.t, apex.x, src, fmodel, opt));
}

VerifyReport verify_run(const std::string& run_dir) {
  VerifyReport rep;
  const RunConfig cfg = load_config(run_dir + "/effective.cfg");

  const std::vector<SupportSample> samples =
      read_envelope_csv(run_dir + "/envelope.csv");
  SupportEnvelope env(cfg.w);
  for (const SupportSample& s : samples)
    env.update_measured(s.t, s.ptilde, s.p2);

  rep.fit = envelope_verdict(env);
  rep.ratio_ok = env.ratio_ok(cfg.ratio_slack);

  std::ostringstream text;
  text << "envelope verdict: " << to_string(rep.fit.verdict) << "\n";
  text << "  " << rep.fit.detail << "\n";
  text << "  c_fit=" << fmt_g17(rep.fit.c_fit)
       << " T_start=" << fmt_g17(rep.fit.T_start) << "\n";
  text << "support ratio check (P2 <= P^{w+delta}): "
       << (rep.ratio_ok ? "ok" : "VIOLATED") << "\n";

  const std::string dec_path = run_dir + "/decomposition.csv";
  if (fs::exists(dec_path)) {
    const std::vector<DecompositionRow> rows = read_decomposition_csv(dec_path);
    double c_kt = 0.0, c_ks1 = 0.0, c_ks2 = 0.0;
    int used = 0;
    for (const DecompositionRow& r : rows) {
      double P = 0.0, P2 = 0.0;
      for (const SupportSample& s : samples)
        if (s.t <= r.t + 1e-12) {
          P = s.P;
          P2 = s.p2;
        }
      if (!(P >= 2.0) || !(P2 > 0.0) || !(r.t > 1.05)) continue;  // formula window
      ++used;
      const AngularSplit none{};
      c_kt = std::max(c_kt, r.kt / bound_formula("kt").value(r.t, P, P2, none));
      c_ks1 =
          std::max(c_ks1, r.ks1 / bound_formula("ks1").value(r.t, P, P2, none));
      c_ks2 = std::max(
          c_ks2, r.ks2 / bound_formula("ks2_final").value(r.t, P, P2, none));
    }
    if (used > 0) {
      rep.c_fit = {{"kt", c_kt}, {"ks1", c_ks1}, {"ks2_final", c_ks2}};
      text << "decomposition fits over " << used << " apexes:\n";
      for (const auto& [id, c] : rep.c_fit)
        text << "  c_fit[" << id << "]=" << fmt_g17(c) << "\n";
    } else {
      text << "decomposition present but no apex inside the formula window\n";
    }
  }

  rep.ok = rep.ratio_ok &&
           rep.fit.verdict != EnvelopeVerdict::kFailStability &&
           rep.fit.verdict != EnvelopeVerdict::kFailAbsorption;
  text << (rep.ok ? "verify: ok\n" : "verify: FAILED\n");
  rep.text = text.str();

  write_text_file(run_dir + "/verify_report.txt", rep.text);
  std::ostringstream csv;
  csv << "formula,c_fit\n";
  csv << "envelope," << fmt_g17(rep.fit.c_fit) << "\n";
  for (const auto& [id, c] : rep.c_fit) csv << id << ',' << fmt_g17(c) << "\n";
  write_text_file(run_dir + "/verify_cfit.csv", csv.str());
  return rep;
}

}  // namespace rvm
