#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cdlab/config.hpp"
#include "cdlab/errors.hpp"
#include "cdlab/model_problem.hpp"
#include "cdlab/output.hpp"
#include "cdlab/run.hpp"

using namespace cdlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cdlab_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config(FormulationKind kind = FormulationKind::GlsDynamic) {
  RunConfig c = preset_config("paper-16");
  c.formulation = kind;
  c.end_time = 0.25;
  c.snapshot_times = {0.0, 0.25};
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("block profile branches") {
  const BlockIC ic;
  CHECK(block_ic_value(ic, 0.5, 0.5) == 1.0);
  CHECK(block_ic_value(ic, 0.5 + ic.l1(), 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(block_profile(ic, ic.l2()) == 0.0);
  CHECK(block_profile(ic, 0.4) == 0.0);
  CHECK(block_profile(ic, 0.5 * (ic.l0() + ic.l1())) == doctest::Approx(1.0 - 0.125).epsilon(1e-15));
  CHECK(block_fits_mesh(ic, SplineSpace2D(2, 16, 16)));
  CHECK(block_fits_mesh(ic, SplineSpace2D(2, 64, 64)));
  CHECK_FALSE(block_fits_mesh(ic, SplineSpace2D(2, 10, 10)));
}

TEST_CASE("presets and derived step") {
  const RunConfig c = preset_config("paper-32");
  CHECK(c.mesh_x == 32);
  CHECK(c.formulation == FormulationKind::GlsDynamic);
  CHECK(c.diffusivity == 5e-4);
  const ResolvedRun r = resolve(c);
  CHECK(r.dt == doctest::Approx(0.015625).epsilon(1e-15));
  CHECK(r.steps == 64);
  CHECK(r.inverse_constant == 36.0);
  CHECK_THROWS_AS(preset_config("paper-20"), ValidationError);

  RunConfig odd = c;
  odd.end_time = 0.1;
  odd.snapshot_times = {0.1};
  const ResolvedRun ro = resolve(odd);
  CHECK(ro.steps == 7);
  CHECK(ro.steps * ro.dt == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("validation lists every problem") {
  RunConfig c;
  c.mesh_x = 2;
  c.degree = 3;
  c.dt = 0.1;  // together with cfl
  c.end_time = -1.0;
  c.r_switch = 3;
  c.output_every = 0;
  try {
    validate(c);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() >= 6);
  }
  RunConfig d;
  d.formulation = FormulationKind::DynamicOrthogonal;
  d.diffusivity = 0.0;
  CHECK_THROWS_AS(validate(d), ValidationError);
}

TEST_CASE("JSON configuration") {
  const auto doc = nlohmann::json::parse(R"({
    "formulation": "supgs", "mesh": [16, 32], "degree": 2, "velocity": [1.0, 0.5],
    "diffusivity": 1e-3, "cfl": 0.25, "end_time": 0.5,
    "alpha": {"preset": "energy-decaying", "alpha_f": 0.75},
    "initial_condition": {"type": "block", "n": 2, "h_c": 0.0625},
    "output": {"dir": "somewhere", "every": 2, "snapshots": [0.0, 0.5]}
  })");
  const RunConfig c = config_from_json(doc);
  CHECK(c.formulation == FormulationKind::SupgStatic);
  CHECK(c.mesh_x == 16);
  CHECK(c.mesh_y == 32);
  CHECK(c.velocity.y() == 0.5);
  CHECK(c.alpha.alpha_f == 0.75);
  CHECK(c.output_every == 2);
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back.mesh_y == 32);
  CHECK(back.formulation == c.formulation);
  CHECK(config_to_json(back) == config_to_json(c));

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"mesh": 16, "colour": 1})")), ValidationError);
  try {
    config_from_json(nlohmann::json::parse(R"({"mesh": "big", "cfl": -1, "formulation": "xyz"})"));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() >= 2);
  }
  const RunConfig p = config_from_json(nlohmann::json::parse(R"({"preset": "paper-64", "formulation": "do"})"));
  CHECK(p.mesh_x == 64);
  CHECK(p.formulation == FormulationKind::DynamicOrthogonal);
}

TEST_CASE("ledger CSV format") {
  LedgerRow r;
  r.step = 3;
  r.time = 1.0 / 3.0;
  r.energy_total = 0.1;
  std::ostringstream out;
  write_ledger_csv(out, std::vector<LedgerRow>{r});
  const std::string s = out.str();
  CHECK(s.rfind("step,t,", 0) == 0);
  CHECK(s.find("\n3,0.33333333333333331,") != std::string::npos);
  CHECK(count_lines(s) == 2);
}

TEST_CASE("VTK and SVG writers") {
  const SplineSpace2D s(2, 4, 4);
  const std::vector<double> c(16, 1.0);
  const std::vector<CellArray> cells = {{"d", std::vector<double>(16, 0.5)}};
  std::ostringstream vtk;
  write_field_vtk(vtk, s, c, cells, "test");
  const std::string v = vtk.str();
  CHECK(v.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(v.find("DIMENSIONS 17 17 1") != std::string::npos);
  CHECK(v.find("POINT_DATA 289") != std::string::npos);
  CHECK(v.find("CELL_DATA 256") != std::string::npos);
  const std::vector<CellArray> bad = {{"d", std::vector<double>(3, 0.0)}};
  std::ostringstream sink;
  CHECK_THROWS_AS(write_field_vtk(sink, s, c, bad, "x"), ValidationError);

  std::ostringstream svg;
  const std::vector<PlotSeries> ser = {{"a<b", {0, 1, 2}, {1, 0.5, 0.25}}};
  write_line_plot_svg(svg, "t", "x", "y", ser);
  CHECK(svg.str().find("<polyline") != std::string::npos);
  CHECK(svg.str().find("a&lt;b") != std::string::npos);
  CHECK(svg.str().rfind("</svg>\n") != std::string::npos);

  CHECK(time_label(0.625) == "0.625");
  CHECK(time_label(1.0) == "1");
  CHECK(time_label(0.0) == "0");
}

TEST_CASE("emitted artifacts") {
  const fs::path dir = scratch("emit");
  const RunConfig c = small_config();
  const RunResult r = run(c);
  emit_outputs(r, dir);
  for (const char* f : {"ledger.csv", "field_0.vtk", "field_0.25.vtk", "energy.svg", "dissipation.svg", "meta.json"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(count_lines(slurp(dir / "ledger.csv")) == static_cast<std::size_t>(r.resolved.steps) + 1);
  const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
  CHECK(meta["dt"].get<double>() == doctest::Approx(0.03125));
  CHECK(meta["version"] == kVersion);
  CHECK(meta.contains("tau_reference_element"));

  RunConfig thin = c;
  thin.output_every = 2;
  RunResult rt = r;
  rt.config = thin;
  emit_outputs(rt, dir / "thin");
  CHECK(count_lines(slurp(dir / "thin" / "ledger.csv")) == static_cast<std::size_t>(r.resolved.steps / 2) + 1);

  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  CHECK_THROWS_AS(emit_outputs(r, blocker / "sub"), std::runtime_error);
  fs::remove_all(dir);
  fs::remove(blocker);
}

TEST_CASE("runs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunConfig c = small_config(FormulationKind::DynamicOrthogonal);
  emit_outputs(run(c), a);
  emit_outputs(run(c), b);
  CHECK(slurp(a / "ledger.csv") == slurp(b / "ledger.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("profile returns to its start after one period") {
  RunConfig c = preset_config("paper-32");
  const RunResult r = run(c);
  REQUIRE(r.snapshots.size() == 4);
  const SplineSpace2D s = make_space(c);
  // Centre of the region above half the maximum: the plateau makes the argmax ambiguous.
  auto peak = [&](const Eigen::VectorXd& phi) {
    constexpr int kSamples = 128;
    std::vector<double> v(kSamples * kSamples);
    for (int j = 0; j < kSamples; ++j) {
      for (int i = 0; i < kSamples; ++i) {
        v[j * kSamples + i] = s.evaluate_field({phi.data(), static_cast<std::size_t>(phi.size())},
                                               (i + 0.5) / kSamples, (j + 0.5) / kSamples);
      }
    }
    const double half = 0.5 * *std::max_element(v.begin(), v.end());
    Eigen::Vector2d sum{0, 0};
    int count = 0;
    for (int j = 0; j < kSamples; ++j) {
      for (int i = 0; i < kSamples; ++i) {
        if (v[j * kSamples + i] < half) continue;
        sum += Eigen::Vector2d((i + 0.5) / kSamples, (j + 0.5) / kSamples);
        ++count;
      }
    }
    return Eigen::Vector2d(sum / count);
  };
  const Eigen::Vector2d p0 = peak(r.snapshots.front().phi);
  const Eigen::Vector2d p1 = peak(r.snapshots.back().phi);
  CHECK(std::abs(p0.x() - p1.x()) <= 1.0 / 32.0);
  CHECK(std::abs(p0.y() - p1.y()) <= 1.0 / 32.0);
  CHECK(r.rows.size() == 64);
  for (std::size_t n = 1; n < r.rows.size(); ++n) CHECK(r.rows[n].energy_total < r.rows[n - 1].energy_total);
}

}
