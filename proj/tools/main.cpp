// Batch front end: scene ingestion, task dispatch, structured reports.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dgeom/scene.hpp"

namespace {

using dgeom::Json;
using dgeom::RunOptions;
using dgeom::Scene;
using dgeom::SceneError;

int emit(const Json& result, const std::string& out_path) {
  std::string text = result.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
  return 0;
}

// single-operation subcommands share this: build one task, run it, print it
int run_single(const std::string& scene_path, Json task, const RunOptions& opt,
               const char* verdict_key) {
  Scene scene = dgeom::load_scene(scene_path);
  Json result = dgeom::run_task(scene, task, opt);
  std::cout << result.dump(2) << "\n";
  if (verdict_key && result.contains(verdict_key) && result.at(verdict_key).is_boolean())
    return result.at(verdict_key).get<bool>() ? 0 : 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact engine for derived-geometry standard models"};
  app.require_subcommand(1);

  std::string scene_path, out_path, task_name;
  RunOptions opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scene", scene_path, "scene file (JSON)")->required();
    cmd->add_flag("--emit-certificates", opt.emit_certificates,
                  "include remainder polynomials and witness matrices in output");
    cmd->add_option("--max-degree", opt.max_degree, "localization cap for atlas checks");
    cmd->add_option("--seed", opt.seed, "seed for randomized property tasks");
  };

  auto* run = app.add_subcommand("run", "run every task in a scene and report");
  add_common(run);
  run->add_option("--task", opt.task_filter, "run only the named task");
  run->add_option("--jobs", opt.jobs, "run tasks concurrently");
  run->add_option("--out", out_path, "write the report to a file instead of stdout");

  std::string arg1, arg2, arg3, arg4;
  auto* validate = app.add_subcommand("validate", "validate a named 1- or 2-morphism");
  add_common(validate);
  validate->add_option("entity", arg1)->required();

  auto* comp = app.add_subcommand("compose", "compose two named 1-morphisms");
  add_common(comp);
  comp->add_option("g", arg1)->required();
  comp->add_option("f", arg2)->required();

  auto* etale = app.add_subcommand("etale", "pointwise etale check at a witness set");
  add_common(etale);
  etale->add_option("morphism", arg1)->required();
  etale->add_option("witnesses", arg2)->required();

  auto* classify = app.add_subcommand("classify", "classify a morphism or corner map");
  add_common(classify);
  classify->add_option("entity", arg1)->required();
  classify->add_option("witnesses", arg2);

  auto* fiber = app.add_subcommand("fiber", "fibre product of two models over R^d");
  add_common(fiber);
  fiber->add_option("x", arg1)->required();
  fiber->add_option("gx", arg2)->required();
  fiber->add_option("y", arg3)->required();
  fiber->add_option("gy", arg4)->required();

  auto* count = app.add_subcommand("count", "signed count over a witness set");
  add_common(count);
  count->add_option("oriented", arg1)->required();
  count->add_option("witnesses", arg2)->required();

  auto* corner = app.add_subcommand("corner", "corner-model or corner-map report");
  add_common(corner);
  corner->add_option("entity", arg1)->required();

  auto* atlas = app.add_subcommand("atlas-check", "validate gluing data");
  add_common(atlas);
  atlas->add_option("atlas", arg1)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      auto t0 = std::chrono::steady_clock::now();
      Scene scene = dgeom::load_scene(scene_path);
      dgeom::Report rep = dgeom::run_scene(scene, opt);
      auto t1 = std::chrono::steady_clock::now();
      // timing goes to stderr so the report itself is byte-stable
      std::cerr << "elapsed_ms="
                << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
      emit(rep.doc, out_path);
      return rep.pass ? 0 : 1;
    }
    if (validate->parsed()) {
      Scene scene = dgeom::load_scene(scene_path);
      Json task;
      if (scene.one_mors.count(arg1)) {
        task = Json{{"op", "validate_one_mor"}, {"morphism", arg1}};
      } else if (scene.two_mors.count(arg1)) {
        task = Json{{"op", "validate_two_mor"}, {"two", arg1}};
      } else {
        throw SceneError("no morphism named '" + arg1 + "'");
      }
      Json result = dgeom::run_task(scene, task, opt);
      std::cout << result.dump(2) << "\n";
      return result.value("pass", false) ? 0 : 1;
    }
    if (comp->parsed())
      return run_single(scene_path, Json{{"op", "compose_one"}, {"g", arg1}, {"f", arg2}}, opt,
                        "pass");
    if (etale->parsed())
      return run_single(scene_path,
                        Json{{"op", "etale"}, {"morphism", arg1}, {"witnesses", arg2}}, opt,
                        "etale");
    if (classify->parsed()) {
      Scene scene = dgeom::load_scene(scene_path);
      Json task;
      if (scene.corner_maps.count(arg1)) {
        task = Json{{"op", "classify_corner_map"}, {"map", arg1}};
      } else {
        task = Json{{"op", "classify_morphism"}, {"morphism", arg1}};
        if (!arg2.empty()) task["witnesses"] = arg2;
      }
      Json result = dgeom::run_task(scene, task, opt);
      std::cout << result.dump(2) << "\n";
      return 0;
    }
    if (fiber->parsed())
      return run_single(
          scene_path,
          Json{{"op", "fibre_product"}, {"x", arg1}, {"gx", arg2}, {"y", arg3}, {"gy", arg4}},
          opt, nullptr);
    if (count->parsed())
      return run_single(scene_path,
                        Json{{"op", "signed_count"}, {"oriented", arg1}, {"witnesses", arg2}}, opt,
                        nullptr);
    if (corner->parsed()) {
      Scene scene = dgeom::load_scene(scene_path);
      Json result;
      if (scene.corner_maps.count(arg1)) {
        result = dgeom::run_task(scene, Json{{"op", "classify_corner_map"}, {"map", arg1}}, opt);
      } else if (scene.corner_models.count(arg1)) {
        Json b = dgeom::run_task(scene, Json{{"op", "boundary"}, {"model", arg1}}, opt);
        Json c = dgeom::run_task(scene, Json{{"op", "corners"}, {"model", arg1}}, opt);
        result = Json{{"boundary", b}, {"corners", c}};
      } else {
        throw SceneError("no corner entity named '" + arg1 + "'");
      }
      std::cout << result.dump(2) << "\n";
      return 0;
    }
    if (atlas->parsed())
      return run_single(scene_path, Json{{"op", "atlas_check"}, {"atlas", arg1}}, opt, "pass");
  } catch (const SceneError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
