#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvm2d/config.hpp"
#include "rvm2d/io.hpp"
#include "rvm2d/plots.hpp"
#include "rvm2d/runner.hpp"

namespace fs = std::filesystem;
using namespace rvm;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "rvm2d_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// small, causally closed box: 3 steps of dt = 0.9/sqrt(2) inside L = 4
RunConfig tiny_cfg() {
  RunConfig cfg;
  cfg.nx = 8;
  cfg.ny = 8;
  cfg.half_width = 4.0;
  cfg.steps = 3;
  cfg.markers = 500;
  cfg.profile.kind = "uniform-rectangle";
  cfg.profile.spatial_radius = 1.0;
  cfg.profile.a1 = 0.5;
  cfg.profile.a2 = 0.25;
  cfg.profile.amplitude = 0.1;
  cfg.seed = 7;
  cfg.quad_rel = 0.1;
  cfg.emit_plots = false;
  return cfg;
}

}  // namespace

TEST_CASE("config: parse, field mapping, echo fixed point") {
  const std::string text =
      "# reference run\n"
      "grid.nx = 8\n"
      "grid.ny=8\n"
      "grid.half_width=4\n"
      "time.dt_safety=0.9\n"
      "time.steps=3\n"
      "markers.count=500\n"
      "profile.kind=uniform-rectangle\n"
      "profile.spatial_radius=1\n"
      "profile.a1=0.5\n"
      "profile.a2=0.25\n"
      "profile.amplitude=0.1\n"
      "seed=7\n"
      "dump.every=0   # first/last only\n"
      "diag.every=1\n"
      "decompose.apex=1.0,0.5,-0.5\n"
      "quad.rel=0.1\n"
      "support.w=0.25\n"
      "support.ratio_slack=0.05\n"
      "history.stride=1\n"
      "history.marker_stride=1\n"
      "plots.emit=false\n";
  std::istringstream in(text);
  RunConfig cfg = parse_config(in, "cfg");
  CHECK(cfg.nx == 8);
  CHECK(cfg.ny == 8);
  CHECK(cfg.half_width == 4.0);
  CHECK(cfg.dt_safety == 0.9);
  CHECK(cfg.steps == 3);
  CHECK(cfg.markers == 500);
  CHECK(cfg.profile.kind == "uniform-rectangle");
  CHECK(cfg.profile.a1 == 0.5);
  CHECK(cfg.profile.a2 == 0.25);
  CHECK(cfg.seed == 7);
  CHECK(cfg.w == 0.25);
  REQUIRE(cfg.apexes.size() == 1);
  CHECK(cfg.apexes[0].t == 1.0);
  CHECK(cfg.apexes[0].x.x == 0.5);
  CHECK(cfg.apexes[0].x.y == -0.5);
  CHECK(!cfg.emit_plots);
  CHECK(cfg.dt() == doctest::Approx(0.9 / std::sqrt(2.0)).epsilon(1e-15));

  // echo is parseable and a fixed point
  const std::string echoed = cfg.echo();
  std::istringstream in2(echoed);
  RunConfig cfg2 = parse_config(in2, "echo");
  CHECK(cfg2.echo() == echoed);
}

TEST_CASE("config: parse failures carry file and line") {
  auto parse = [](const std::string& text) {
    return [text]() {
      std::istringstream in(text);
      parse_config(in, "cfg");
    };
  };
  CHECK(message_of(parse("grid.nx 4\n")) == "cfg:1: expected key=value");
  CHECK(message_of(parse("grid.nz=4\n")) == "cfg:1: unknown key 'grid.nz'");
  CHECK(message_of(parse("grid.half_width=abc\n")) ==
        "cfg:1: expected a number, got 'abc'");
  CHECK(message_of(parse("# c\n\ngrid.nx=x\n")) ==
        "cfg:3: expected an integer, got 'x'");
  CHECK(message_of(parse("seed=\n")) == "cfg:1: empty value for key 'seed'");
  CHECK(message_of(parse("=5\n")) == "cfg:1: empty key");
  CHECK(message_of(parse("decompose.apex=1.0,2.0\n")) ==
        "cfg:1: expected 't,x1,x2', got '1.0,2.0'");
  CHECK(message_of(parse("plots.emit=maybe\n")) ==
        "cfg:1: expected a boolean, got 'maybe'");
  CHECK_THROWS_AS(load_config("/nonexistent/rvm2d.cfg"), std::runtime_error);
}

TEST_CASE("config: validation names the violated rule") {
  RunConfig cfg = tiny_cfg();
  CHECK_NOTHROW(cfg.validate());

  RunConfig bad = cfg;
  bad.dt_safety = 1.5;
  CHECK(message_of([&] { bad.validate(); }).find("config rule 'cfl'") == 0);

  bad = cfg;
  bad.steps = 100;  // 100 * 0.636 + 1 well past L = 4
  CHECK(message_of([&] { bad.validate(); }).find("'no-wrap'") !=
        std::string::npos);

  bad = cfg;
  bad.nx = 2;
  CHECK(message_of([&] { bad.validate(); }).find("'grid'") !=
        std::string::npos);

  bad = cfg;
  bad.apexes.push_back({50.0, Vec2{0.0, 0.0}});
  CHECK(message_of([&] { bad.validate(); }).find("'apex'") !=
        std::string::npos);

  bad = cfg;
  bad.split_A = 3.0;  // B and C missing
  CHECK(message_of([&] { bad.validate(); }).find("'split'") !=
        std::string::npos);

  bad = cfg;
  bad.quad_rel = 1.0;
  CHECK(message_of([&] { bad.validate(); }).find("'quad'") !=
        std::string::npos);

  bad = cfg;
  bad.profile.kind = "nope";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("io: text artifacts round-trip through %.17g") {
  const fs::path dir = scratch("io_text");

  std::vector<SupportSample> sup;
  sup.push_back({0.0, 0.1, 1.0 / 3.0, 0.1 + std::pow(1.0 / 3.0, 3.0)});
  sup.push_back({0.7, M_PI, 0.5, M_PI + 0.125});
  sup.push_back({1.4, 1e-17, 3.0, 27.0 + 1e-17});
  const std::string env_path = (dir / "envelope.csv").string();
  write_envelope_csv(env_path, sup);
  const std::vector<SupportSample> back = read_envelope_csv(env_path);
  REQUIRE(back.size() == sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) {
    CHECK(back[i].t == sup[i].t);
    CHECK(back[i].ptilde == sup[i].ptilde);
    CHECK(back[i].p2 == sup[i].p2);
    CHECK(back[i].P == sup[i].P);
  }

  std::vector<DecompositionRow> rows(2);
  for (int i = 0; i < 2; ++i) {
    DecompositionRow& r = rows[i];
    r.t = 1.0 + i;
    r.x1 = 0.1 * i;
    r.x2 = -0.2 * i;
    r.kt = std::sqrt(2.0) + i;
    r.ks1 = std::exp(1.0) * (i + 1);
    r.ks2 = 1.0 / 7.0 + i;
    r.err_t = 1e-5;
    r.err_s1 = 2e-5;
    r.err_s2 = 3e-5;
    for (int k = 0; k < 4; ++k) r.eps[k] = 0.01 * (k + 1) + i;
    r.A_split = 10.0 + i;
    r.B_split = 5.0 + i;
    r.C_split = 20.0 + i;
  }
  const std::string dec_path = (dir / "decomposition.csv").string();
  write_decomposition_csv(dec_path, rows);
  const std::vector<DecompositionRow> dback = read_decomposition_csv(dec_path);
  REQUIRE(dback.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(dback[i].t == rows[i].t);
    CHECK(dback[i].kt == rows[i].kt);
    CHECK(dback[i].ks1 == rows[i].ks1);
    CHECK(dback[i].ks2 == rows[i].ks2);
    CHECK(dback[i].err_s2 == rows[i].err_s2);
    for (int k = 0; k < 4; ++k) CHECK(dback[i].eps[k] == rows[i].eps[k]);
    CHECK(dback[i].C_split == rows[i].C_split);
  }

  // ledger writer pairs rows with support samples by position
  std::vector<LedgerRow> lrows(2);
  lrows[0] = {0.0, 1.0, 2.0, 3.0, 5.0, 1e-12};
  lrows[1] = {0.5, 1.0, 2.1, 2.9, 5.0, 2e-12};
  CHECK_THROWS_AS(
      write_ledger_csv((dir / "ledger.csv").string(), lrows, sup),
      std::invalid_argument);
  write_ledger_csv((dir / "ledger.csv").string(), lrows,
                   {sup.begin(), sup.begin() + 2});
  const std::string ledger = slurp((dir / "ledger.csv").string());
  CHECK(ledger.rfind("t,mass,field_energy,kinetic,total,gauss_linf,Ptilde,P2,P\n",
                     0) == 0);

  // malformed inputs are rejected with positions
  write_text_file((dir / "bad1.csv").string(), "wrong\n1,2,3,4\n");
  CHECK(message_of([&] { read_envelope_csv((dir / "bad1.csv").string()); })
            .find("unexpected header") != std::string::npos);
  write_text_file((dir / "bad2.csv").string(), "t,Ptilde,P2,P\n1,2,x,4\n");
  CHECK(message_of([&] { read_envelope_csv((dir / "bad2.csv").string()); })
            .find(":2: bad number 'x'") != std::string::npos);
  write_text_file((dir / "bad3.csv").string(), "t,Ptilde,P2,P\n1,2,3\n");
  CHECK(message_of([&] { read_envelope_csv((dir / "bad3.csv").string()); })
            .find("expected 4 columns, got 3") != std::string::npos);
  write_text_file((dir / "bad4.csv").string(), "");
  CHECK(message_of([&] { read_envelope_csv((dir / "bad4.csv").string()); })
            .find("empty file") != std::string::npos);
}

TEST_CASE("io: binary snapshots restore fields and markers bit-exactly") {
  const fs::path dir = scratch("io_bin");

  FieldState f(6, 4, 2.0, 0.1);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 6; ++i) {
      f.e1.at(i, j) = 0.1 * i + j;
      f.e2.at(i, j) = std::sin(i + 2.0 * j);
      f.b.at(i, j) = 1.0 / (1 + i + j);
    }
  f.set_time(1.5);
  const std::string fpath = (dir / "fields_000001.rvm2").string();
  write_field_snapshot(fpath, f);
  const FieldSnapshot fs2 = read_field_snapshot(fpath);
  CHECK(fs2.nx == 6);
  CHECK(fs2.ny == 4);
  CHECK(fs2.half_width == 2.0);
  CHECK(fs2.dt == 0.1);
  CHECK(fs2.time == 1.5);
  CHECK(fs2.e1.a == f.e1.a);
  CHECK(fs2.e2.a == f.e2.a);
  CHECK(fs2.b.a == f.b.a);

  MarkerEnsemble m;
  m.push_back(0.25, -0.5, 1.0, -2.0, 0.125);
  m.push_back(1.0 / 3.0, 0.7, 0.0, 0.1, 0.25);
  m.t = 0.75;
  const std::string mpath = (dir / "markers_000001.rvp2").string();
  write_marker_snapshot(mpath, m);
  const MarkerSnapshot ms = read_marker_snapshot(mpath);
  CHECK(ms.time == 0.75);
  CHECK(ms.normalization == m.normalization);
  CHECK(ms.x1 == m.x1);
  CHECK(ms.x2 == m.x2);
  CHECK(ms.p1 == m.p1);
  CHECK(ms.p2 == m.p2);
  CHECK(ms.w == m.w);

  // wrong magic and truncation are named failures
  CHECK(message_of([&] { read_field_snapshot(mpath); })
            .find("not a field snapshot (bad magic)") != std::string::npos);
  CHECK(message_of([&] { read_marker_snapshot(fpath); })
            .find("not a marker snapshot (bad magic)") != std::string::npos);
  const std::string trunc = (dir / "short.rvm2").string();
  write_text_file(trunc, std::string("RVM2\x06\x00\x00\x00", 8));
  CHECK(message_of([&] { read_field_snapshot(trunc); })
            .find("truncated snapshot") != std::string::npos);
}

TEST_CASE("runner: zero-step run emits the full artifact set") {
  const fs::path dir = scratch("run_zero");
  RunConfig cfg = tiny_cfg();
  cfg.steps = 0;
  cfg.emit_plots = true;

  RunArtifacts art = run_simulation(cfg, dir.string());
  CHECK(art.exit_code() == 0);
  CHECK(art.breaches.empty());
  REQUIRE(art.ledger.rows().size() == 1);
  const LedgerRow& row = art.ledger.rows()[0];
  CHECK(row.t == 0.0);
  CHECK(row.mass > 0.0);
  CHECK(row.gauss_linf <= 1e-10);
  CHECK(row.total == doctest::Approx(row.field_energy + row.kinetic));
  REQUIRE(art.envelope.samples().size() == 1);
  const SupportSample& s = art.envelope.samples()[0];
  CHECK(s.ptilde <= std::hypot(cfg.profile.a1, cfg.profile.a2) + 1e-12);
  CHECK(s.P == doctest::Approx(s.ptilde + std::pow(s.p2, 3.0)));

  CHECK(fs::exists(dir / "effective.cfg"));
  CHECK(slurp((dir / "effective.cfg").string()) == cfg.echo());
  CHECK(fs::exists(dir / "ledger.csv"));
  CHECK(fs::exists(dir / "envelope.csv"));
  CHECK(fs::exists(dir / "fields_000000.rvm2"));
  CHECK(fs::exists(dir / "markers_000000.rvp2"));
  CHECK(fs::exists(dir / "run_summary.txt"));
  CHECK(fs::exists(dir / "plot_ledger.py"));
  CHECK(fs::exists(dir / "plot_envelope.py"));
  CHECK(!fs::exists(dir / "plot_decomposition.py"));  // no apexes requested
  CHECK(!fs::exists(dir / "decomposition.csv"));
  CHECK(slurp((dir / "run_summary.txt").string()).find("invariants=ok") !=
        std::string::npos);

  // zero-weight sampling nodes are pruned, so the ensemble is at most the
  // requested count (the spatial disk fills pi/4 of its bounding box here)
  const MarkerSnapshot ms =
      read_marker_snapshot((dir / "markers_000000.rvp2").string());
  CHECK(ms.x1.size() <= cfg.markers);
  CHECK(ms.x1.size() > cfg.markers / 2);
  CHECK(*std::min_element(ms.w.begin(), ms.w.end()) > 0.0);
}

TEST_CASE("runner: identical configs produce identical artifact bytes") {
  RunConfig cfg = tiny_cfg();
  const fs::path a = scratch("run_det_a");
  const fs::path b = scratch("run_det_b");
  RunArtifacts ra = run_simulation(cfg, a.string());
  RunArtifacts rb = run_simulation(cfg, b.string());
  CHECK(ra.exit_code() == 0);
  CHECK(rb.exit_code() == 0);
  CHECK(slurp((a / "ledger.csv").string()) == slurp((b / "ledger.csv").string()));
  CHECK(slurp((a / "envelope.csv").string()) ==
        slurp((b / "envelope.csv").string()));
  CHECK(slurp((a / "run_summary.txt").string()) ==
        slurp((b / "run_summary.txt").string()));
  CHECK(slurp((a / "fields_000003.rvm2").string()) ==
        slurp((b / "fields_000003.rvm2").string()));

  // a different seed moves the markers
  RunConfig other = cfg;
  other.seed = 8;
  const fs::path c = scratch("run_det_c");
  run_simulation(other, c.string());
  CHECK(slurp((a / "ledger.csv").string()) != slurp((c / "ledger.csv").string()));
}

TEST_CASE("runner: ledger rows track the leapfrog diagnostics cadence") {
  RunConfig cfg = tiny_cfg();
  cfg.diag_every = 2;  // rows at t0, step 2, and the forced final step
  const fs::path dir = scratch("run_cadence");
  RunArtifacts art = run_simulation(cfg, dir.string());
  REQUIRE(art.ledger.rows().size() == 3);
  CHECK(art.ledger.rows()[0].t == 0.0);
  CHECK(art.ledger.rows()[1].t == doctest::Approx(2.0 * cfg.dt()));
  CHECK(art.ledger.rows()[2].t == doctest::Approx(3.0 * cfg.dt()));
  CHECK(art.ledger.mass_drift() == 0.0);

  check_time_levels(FieldState(4, 4, 1.0, 0.1), MarkerEnsemble{});
  FieldState off(4, 4, 1.0, 0.1);
  off.set_time(0.1);
  CHECK(message_of([&] { check_time_levels(off, MarkerEnsemble{}); })
            .find("mismatched time levels") != std::string::npos);
}

TEST_CASE("runner: apex decomposition artifacts and snapshot replay") {
  RunConfig cfg = tiny_cfg();
  cfg.dump_every = 1;
  cfg.apexes.push_back({1.0, Vec2{0.0, 0.0}});
  cfg.emit_plots = true;
  const fs::path dir = scratch("run_apex");
  RunArtifacts art = run_simulation(cfg, dir.string());
  CHECK(art.exit_code() == 0);
  REQUIRE(art.decomposition.size() == 1);
  const DecompositionRow& row = art.decomposition[0];
  CHECK(row.t == 1.0);
  CHECK(std::isfinite(row.kt));
  CHECK(std::isfinite(row.ks1));
  CHECK(std::isfinite(row.ks2));
  CHECK(row.kt >= 0.0);
  CHECK(row.ks1 >= 0.0);
  CHECK(row.ks2 >= 0.0);
  CHECK(row.A_split > 0.0);  // degenerate fallback still reports its scales

  CHECK(fs::exists(dir / "decomposition.csv"));
  CHECK(fs::exists(dir / "plot_decomposition.py"));
  const std::vector<DecompositionRow> back =
      read_decomposition_csv((dir / "decomposition.csv").string());
  REQUIRE(back.size() == 1);
  CHECK(back[0].kt == row.kt);
  CHECK(back[0].ks1 == row.ks1);
  CHECK(back[0].ks2 == row.ks2);

  // replay from the dumped snapshots lands near the in-run evaluation
  DecompositionRow replay =
      decompose_from_artifacts(dir.string(), cfg.apexes[0], 0.1);
  CHECK(replay.t == 1.0);
  CHECK(std::isfinite(replay.kt));
  CHECK(std::isfinite(replay.ks2));
  CHECK(replay.kt == doctest::Approx(row.kt).epsilon(0.3));

  CHECK(message_of([&] {
          decompose_from_artifacts(dir.string(), ApexSpec{50.0, Vec2{}}, 0.1);
        }).find("snapshots end at") != std::string::npos);

  const fs::path empty = scratch("run_apex_empty");
  CHECK(message_of([&] {
          decompose_from_artifacts(empty.string(), cfg.apexes[0], 0.1);
        }).find("decompose: no snapshots") != std::string::npos);
}

TEST_CASE("plots: emitted beside the artifacts they read") {
  const fs::path dir = scratch("plots");
  CHECK(message_of([&] { emit_plots(dir.string()); })
            .find("missing artifact ledger.csv") != std::string::npos);
  write_text_file((dir / "ledger.csv").string(), "x\n");
  CHECK(message_of([&] { emit_plots(dir.string()); })
            .find("missing artifact envelope.csv") != std::string::npos);
  write_text_file((dir / "envelope.csv").string(), "x\n");
  emit_plots(dir.string());
  CHECK(fs::exists(dir / "plot_ledger.py"));
  CHECK(fs::exists(dir / "plot_envelope.py"));
  CHECK(!fs::exists(dir / "plot_decomposition.py"));

  const std::string env_script = slurp((dir / "plot_envelope.py").string());
  CHECK(env_script.find("measured sup |p|") != std::string::npos);
  CHECK(env_script.find("ti ** 8 * p2i ** 3") != std::string::npos);

  write_text_file((dir / "decomposition.csv").string(), "x\n");
  emit_plots(dir.string());
  CHECK(fs::exists(dir / "plot_decomposition.py"));
  CHECK(slurp((dir / "plot_decomposition.py").string())
            .find("decomposition.png") != std::string::npos);
}

TEST_CASE("verify: offline report over stored artifacts") {
  RunConfig cfg = tiny_cfg();
  cfg.apexes.push_back({1.5, Vec2{0.2, 0.0}});
  const fs::path dir = scratch("run_verify");
  RunArtifacts art = run_simulation(cfg, dir.string());
  REQUIRE(art.exit_code() == 0);

  VerifyReport rep = verify_run(dir.string());
  CHECK(rep.ok);
  CHECK(rep.ratio_ok);
  // a short cold run cannot open the fit window
  CHECK(rep.fit.verdict == EnvelopeVerdict::kInconclusive);
  CHECK(rep.text.find("envelope verdict: INCONCLUSIVE") != std::string::npos);
  CHECK(rep.text.find("no apex inside the formula window") !=
        std::string::npos);
  CHECK(rep.text.find("verify: ok") != std::string::npos);
  CHECK(fs::exists(dir / "verify_report.txt"));
  CHECK(fs::exists(dir / "verify_cfit.csv"));
  CHECK(slurp((dir / "verify_cfit.csv").string()).rfind("formula,c_fit\n", 0) ==
        0);
  CHECK(slurp((dir / "verify_report.txt").string()) == rep.text);
}
