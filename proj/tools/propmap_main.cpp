#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "propmap/job.hpp"

using nlohmann::json;

namespace {

int emit(const json& job) {
  propmap::JobResult result = propmap::run_job(job);
  const std::string text = result.report.dump(2) + "\n";
  if (job.contains("out") && job["out"].is_string()) {
    std::ofstream out(job["out"].get<std::string>());
    if (!out) {
      std::cerr << "cannot open output file " << job["out"] << "\n";
      return 1;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return result.exit_code;
}

json base_job(const std::string& command, std::uint64_t seed, const std::string& out) {
  json job;
  job["command"] = command;
  if (seed != 0) job["seed"] = seed;
  if (!out.empty()) job["out"] = out;
  return job;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proper-map classification toolkit"};
  app.require_subcommand(0, 1);

  std::uint64_t seed = 0;
  std::string out_path;
  std::string job_path;
  app.add_option("--seed", seed, "seed for the generic-position retries");
  app.add_option("--out", out_path, "write the JSON report to this file");
  app.add_option("--job", job_path, "run a JSON job file instead of subcommand flags");

  // classify m n k
  auto* classify = app.add_subcommand("classify", "stability report and classifying group");
  int m = 0, n = 1, k = 2;
  classify->add_option("m", m, "base dimension")->required();
  classify->add_option("n", n, "fiber/domain dimension")->required();
  classify->add_option("k", k, "codomain dimension")->required();

  // normalize --map ...
  auto* normalize = app.add_subcommand("normalize", "radialize a proper map");
  std::string norm_map;
  double window = 64.0;
  std::vector<double> radii;
  normalize->add_option("--map", norm_map, "map expression")->required();
  normalize->add_option("--window", window, "escape search window");
  normalize->add_option("--radii", radii, "certificate levels")->delimiter(',');

  // invariant <name> ...
  auto* invariant = app.add_subcommand("invariant", "compute a proper-homotopy invariant");
  std::string inv_name, inv_map, inv_sphere;
  long inv_samples = 0;
  double inv_window = 64.0;
  std::vector<double> inv_value;
  invariant->add_option("name", inv_name, "winding|degree2|hopf|end_signs|class")->required();
  invariant->add_option("--map", inv_map, "map expression");
  invariant->add_option("--sphere-map", inv_sphere, "sphere-map expression");
  invariant->add_option("--samples", inv_samples, "winding sample count");
  invariant->add_option("--window", inv_window, "escape window");
  invariant->add_option("--value", inv_value, "regular value")->delimiter(',');

  // pontryagin {extract|realizable}; construct runs via --job
  auto* pont = app.add_subcommand("pontryagin", "framed preimage operations");
  auto* extract = pont->add_subcommand("extract", "framed points or traced fibers");
  std::string ext_map, ext_csv;
  std::vector<double> ext_value;
  double ext_box = 8.0;
  extract->add_option("--map", ext_map, "map expression")->required();
  extract->add_option("--value", ext_value, "regular value")->delimiter(',')->required();
  extract->add_option("--box", ext_box, "search box half-width");
  extract->add_option("--csv-out", ext_csv, "write fiber polylines as CSV");
  auto* realizable = pont->add_subcommand("realizable", "1-d realizability with witness");
  std::string signs;
  realizable->add_option("signs", signs, "sign sequence, e.g. +-+")->required();
  auto* construct = pont->add_subcommand("construct", "collapse map from framed points (use --job)");

  // counterexamples
  auto* counter = app.add_subcommand("counterexamples", "run the counterexample certifications");
  std::vector<std::string> items;
  double trace_step = 0.0;
  counter->add_option("--items", items, "subset of items to run")->delimiter(',');
  counter->add_option("--trace-step", trace_step, "fiber tracing step override");

  // sign sequences like "++" confuse subcommand matching; shield them
  std::vector<std::string> raw(argv, argv + argc);
  for (size_t i = 0; i + 1 < raw.size(); ++i)
    if (raw[i] == "realizable" && raw[i + 1] != "--") {
      raw.insert(raw.begin() + static_cast<long>(i) + 1, "--");
      break;
    }
  std::vector<char*> args;
  args.reserve(raw.size());
  for (auto& s : raw) args.push_back(s.data());
  CLI11_PARSE(app, static_cast<int>(args.size()), args.data());

  if (!job_path.empty()) {
    std::ifstream in(job_path);
    if (!in) {
      std::cerr << "cannot open job file " << job_path << "\n";
      return 2;
    }
    json job;
    try {
      in >> job;
    } catch (const std::exception& e) {
      std::cerr << "invalid JSON in job file: " << e.what() << "\n";
      return 2;
    }
    if (!job.contains("seed") && seed != 0) job["seed"] = seed;
    if (!job.contains("out") && !out_path.empty()) job["out"] = out_path;
    return emit(job);
  }

  if (classify->parsed()) {
    json job = base_job("classify", seed, out_path);
    job["m"] = m;
    job["n"] = n;
    job["k"] = k;
    return emit(job);
  }
  if (normalize->parsed()) {
    json job = base_job("normalize", seed, out_path);
    job["map"] = norm_map;
    job["window"] = window;
    if (!radii.empty()) job["radii"] = radii;
    return emit(job);
  }
  if (invariant->parsed()) {
    json job = base_job("invariant", seed, out_path);
    job["name"] = inv_name;
    if (!inv_map.empty()) job["map"] = inv_map;
    if (!inv_sphere.empty()) job["sphere_map"] = inv_sphere;
    if (inv_samples > 0) job["samples"] = inv_samples;
    job["window"] = inv_window;
    if (!inv_value.empty()) job["value"] = inv_value;
    return emit(job);
  }
  if (pont->parsed()) {
    if (extract->parsed()) {
      json job = base_job("pontryagin-extract", seed, out_path);
      job["map"] = ext_map;
      job["value"] = ext_value;
      job["box"] = ext_box;
      if (!ext_csv.empty()) job["csv_out"] = ext_csv;
      return emit(job);
    }
    if (realizable->parsed()) {
      json job = base_job("pontryagin-realizable", seed, out_path);
      job["signs"] = signs;
      return emit(job);
    }
    if (construct->parsed()) {
      std::cerr << "pontryagin construct takes its framed-point data from a job file; "
                   "use --job <file> with command \"pontryagin-construct\"\n";
      return 2;
    }
    std::cerr << pont->help();
    return 2;
  }
  if (counter->parsed()) {
    json job = base_job("counterexamples", seed, out_path);
    if (!items.empty()) job["items"] = items;
    if (trace_step > 0.0) job["trace_step"] = trace_step;
    return emit(job);
  }

  std::cout << app.help();
  return 0;
}
