#include "commands.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <map>
#include <thread>

#include "scsc/error.hpp"

namespace scsc::cli {
namespace fs = std::filesystem;
using io::Json;

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(std::string(name) + " stage failed: " + e.what());
  }
}

Json base_parameters(const char* command) {
  return Json{{"tool", "scsc"}, {"version", kVersion}, {"command", command}};
}

// Parameters recorded by whatever produced `input`, or an empty object.
Json upstream_parameters(const fs::path& input) {
  io::FileManifest manifest;
  if (!io::read_manifest(input, manifest)) return Json::object();
  return manifest.parameters;
}

Json seed_of(const Json& upstream) {
  if (upstream.contains("seed")) return upstream["seed"];
  return nullptr;
}

const char* method_name(linalg::EigenMethod m) {
  switch (m) {
    case linalg::EigenMethod::full_ql: return "full-ql";
    case linalg::EigenMethod::inverse_iteration: return "inverse-iteration";
    default: return "auto";
  }
}

void write_adjacency_file(const AdjacencyMatrix& a, const fs::path& path, const std::string& metric,
                          bool minimum_image, Json parameters) {
  io::write_matrix(a.values(), path, io::matrix_format_for(path));
  io::FileManifest manifest;
  manifest.format = io::kMatrixFormat;
  manifest.payload = Json{{"n", a.n()},
                          {"encoding", io::matrix_format_for(path) == io::MatrixFormat::bin ? "bin" : "csv"},
                          {"metric", metric},
                          {"minimum_image", minimum_image},
                          {"crc32", io::file_crc32(path)}};
  manifest.parameters = std::move(parameters);
  io::write_manifest(path, manifest);
}

void write_tree_file(const ColoringTree& tree, const SpectralBasis& basis, const fs::path& path,
                     const io::TreeWriteOptions& options, Json parameters) {
  io::write_tree(tree, path, io::TreeFormat::json, options);
  io::FileManifest manifest;
  manifest.format = io::kTreeFormat;
  manifest.payload = Json{{"n", tree.n()},
                          {"depth", tree.depth()},
                          {"nodes", tree.nodes().size()},
                          {"leaves", tree.leaves().size()},
                          {"eigenvalues", basis.eigenvalues()},
                          {"crc32", io::file_crc32(path)}};
  manifest.parameters = std::move(parameters);
  io::write_manifest(path, manifest);
}

void write_export_file(const ColoringTree& tree, const fs::path& path, io::TreeFormat format,
                       const std::string& format_name, Json parameters) {
  io::write_tree(tree, path, format);
  io::FileManifest manifest;
  manifest.format = "scsc-" + format_name;
  manifest.payload = Json{{"n", tree.n()}, {"depth", tree.depth()}, {"crc32", io::file_crc32(path)}};
  manifest.parameters = std::move(parameters);
  io::write_manifest(path, manifest);
}

Json tree_parameters(const TreeOptions& options, linalg::EigenMethod method) {
  return Json{{"depth", options.depth},
              {"min_population", options.min_population},
              {"z_min", options.z_min},
              {"eigensolver", method_name(method)}};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const SimulationConfig& config, const fs::path& out_path, std::ostream& err) {
  err << "simulating " << experiment_name(config.experiment) << " with " << config.n << " states\n";
  const TrajectoryEnsemble ensemble = simulate(config);
  io::write_trajectories(ensemble, out_path, simulation_parameters(config));
  err << "wrote " << out_path.string() << " (" << ensemble.n_states() << " states x " << ensemble.n_times()
      << " times)\n";
  return 0;
}

int cmd_adjacency(const fs::path& input, const std::string& metric, const fs::path& out_path, bool minimum_image,
                  unsigned threads, std::ostream& err) {
  const bool is_trajectory = io::looks_like_trajectory_csv(input);
  const Json upstream = upstream_parameters(input);
  std::optional<AdjacencyMatrix> a;
  if (metric == "traj-std") {
    if (!is_trajectory) {
      throw UsageError("metric traj-std needs a trajectory CSV; '" + input.string() + "' is not one");
    }
    const TrajectoryEnsemble ensemble = io::read_trajectories(input);
    err << "computing " << ensemble.n_states() << " x " << ensemble.n_states() << " trajectory dissimilarities\n";
    DissimilarityOptions options;
    options.minimum_image = minimum_image;
    options.threads = threads;
    options.on_warning = [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
    a = build_trajectory_adjacency(ensemble, options);
  } else {
    if (is_trajectory) {
      throw UsageError("metric js-sqrt needs a transition matrix; '" + input.string() + "' holds trajectories");
    }
    if (minimum_image) throw UsageError("--minimum-image applies only to metric traj-std");
    const TransitionMatrix transitions = io::read_transition(input);
    err << "computing " << transitions.n() << " x " << transitions.n() << " Jensen-Shannon distances\n";
    a = build_transition_adjacency(transitions, threads);
  }
  Json parameters = base_parameters("adjacency");
  parameters["seed"] = seed_of(upstream);
  parameters["metric"] = metric;
  parameters["minimum_image"] = minimum_image;
  parameters["source"] = input.filename().string();
  parameters["upstream"] = upstream;
  write_adjacency_file(*a, out_path, metric, minimum_image, std::move(parameters));
  err << "wrote " << out_path.string() << '\n';
  return 0;
}

int cmd_cluster(const fs::path& input, const TreeOptions& options, linalg::EigenMethod method, bool include_members,
                const fs::path& out_path, std::ostream& out, std::ostream& err) {
  if (io::looks_like_trajectory_csv(input)) {
    throw UsageError("cluster needs an adjacency matrix; '" + input.string() + "' holds trajectories");
  }
  const AdjacencyMatrix a = io::read_adjacency(input);
  if (options.depth > a.n()) {
    throw UsageError("--depth " + std::to_string(options.depth) + " exceeds the state count " +
                     std::to_string(a.n()));
  }
  err << "solving the generalized eigenproblem for " << a.n() << " states\n";
  const SpectralBasis basis = solve_generalized(a, options.depth, method);
  const ColoringTree tree = build_tree(basis, a, options);
  const Json upstream = upstream_parameters(input);
  Json parameters = base_parameters("cluster");
  parameters["seed"] = seed_of(upstream);
  parameters.update(tree_parameters(options, method));
  parameters["source"] = input.filename().string();
  parameters["upstream"] = upstream;
  write_tree_file(tree, basis, out_path, {include_members}, std::move(parameters));
  print_tree_summary(tree, out);
  return 0;
}

int cmd_export(const fs::path& input, const std::string& format, const fs::path& out_path, std::ostream& err) {
  static const std::map<std::string, io::TreeFormat> kFormats{
      {"newick", io::TreeFormat::newick}, {"svg", io::TreeFormat::svg}, {"branch-csv", io::TreeFormat::branch_csv}};
  const auto it = kFormats.find(format);
  if (it == kFormats.end()) throw UsageError("unknown export format '" + format + "'");
  const ColoringTree tree = io::read_tree(input);
  const Json upstream = upstream_parameters(input);
  Json parameters = base_parameters("export");
  parameters["seed"] = seed_of(upstream);
  parameters["source"] = input.filename().string();
  write_export_file(tree, out_path, it->second, format, std::move(parameters));
  err << "wrote " << out_path.string() << '\n';
  return 0;
}

int cmd_pipeline(const PipelineConfig& config, const fs::path& out_dir, std::ostream& out) {
  const PipelineResult result = run_pipeline(config, out);
  run_stage("export", [&] {
    write_pipeline_outputs(config, result, out_dir);
    return 0;
  });
  out << "artifacts written to " << out_dir.string() << '\n';
  return 0;
}

void add_threads(CLI::App* app, unsigned& threads) {
  app->add_option("--threads", threads, "Worker threads (0 = all cores); never changes output")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
}

void add_simulation_options(CLI::App* app, SimulationConfig& config, Experiment experiment,
                            std::string& variant) {
  app->add_option("--n", config.n, "Number of states")->capture_default_str()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  app->add_option("--seed", config.seed, "PRNG seed")->capture_default_str();
  switch (experiment) {
    case Experiment::quadgyre:
      app->add_option("--t-end", config.t_end, "Advection time (dimensionless)")
          ->capture_default_str()
          ->check(CLI::PositiveNumber);
      app->add_option("--steps", config.steps, "Stored time steps (default 401)")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
      app->add_option("--variant", variant, "verbatim or divfree")
          ->capture_default_str()
          ->check(CLI::IsMember({"verbatim", "divfree"}));
      app->add_option("--substeps", config.substeps, "RK steps per stored interval")
          ->capture_default_str()
          ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 16));
      break;
    case Experiment::bickley:
      app->add_option("--days", config.days, "Advection time in days")->capture_default_str()->check(CLI::PositiveNumber);
      app->add_option("--steps", config.steps, "Stored time steps (default 601)")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
      app->add_option("--substeps", config.substeps, "RK steps per stored interval")
          ->capture_default_str()
          ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 16));
      break;
    case Experiment::noise:
      app->add_option("--t", config.noise_times, "Time steps per trajectory")
          ->capture_default_str()
          ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
      break;
  }
  add_threads(app, config.threads);
}

const std::map<std::string, linalg::EigenMethod>& eigen_methods() {
  static const std::map<std::string, linalg::EigenMethod> kMethods{
      {"auto", linalg::EigenMethod::automatic},
      {"full-ql", linalg::EigenMethod::full_ql},
      {"inverse-iteration", linalg::EigenMethod::inverse_iteration}};
  return kMethods;
}

void add_tree_options(CLI::App* app, TreeOptions& tree, std::string& method, bool& no_members) {
  app->add_option("--depth", tree.depth, "Number of eigenvectors (bits)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  app->add_option("--min-population", tree.min_population, "Do not split nodes smaller than this")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  app->add_option("--z-min", tree.z_min, "Do not split when the split z is below this")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--eigensolver", method, "auto, full-ql or inverse-iteration")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "full-ql", "inverse-iteration"}));
  app->add_flag("--no-members", no_members, "Omit member lists from the tree JSON");
}

}  // namespace

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::quadgyre: return "quadgyre";
    case Experiment::bickley: return "bickley";
    case Experiment::noise: return "noise";
  }
  return "?";
}

std::size_t SimulationConfig::stored_steps() const {
  if (steps != 0) return steps;
  return experiment == Experiment::bickley ? 601 : 401;
}

TrajectoryEnsemble simulate(const SimulationConfig& config) {
  const unsigned threads = resolve_threads(config.threads);
  if (config.experiment == Experiment::noise) return noise_ensemble(config.n, config.noise_times, config.seed, threads);
  FlowSpec flow;
  Rect domain{};
  if (config.experiment == Experiment::quadgyre) {
    QuadEddyParams params;
    params.variant = config.variant;
    flow.model = params;
    flow.t1 = config.t_end;
    domain = QuadEddyParams::domain;
  } else {
    BickleyParams params;
    flow.model = params;
    flow.t1 = config.days * kSecondsPerDay;
    domain = params.domain();
  }
  flow.n_steps = config.stored_steps();
  IntegratorOptions options;
  options.substeps = config.substeps;
  options.threads = threads;
  return advect(flow, seed_uniform(config.n, domain, config.seed), options);
}

Json simulation_parameters(const SimulationConfig& config) {
  Json j = base_parameters("simulate");
  j["experiment"] = experiment_name(config.experiment);
  j["n"] = config.n;
  j["seed"] = config.seed;
  switch (config.experiment) {
    case Experiment::quadgyre: {
      const QuadEddyParams p;
      j["t_end"] = config.t_end;
      j["steps"] = config.stored_steps();
      j["substeps"] = config.substeps;
      j["variant"] = config.variant == QuadEddyVariant::verbatim ? "verbatim" : "divfree";
      j["model"] = Json{{"amplitude", p.amplitude}, {"epsilon", p.epsilon}, {"omega", p.omega}};
      j["integrator"] = "cash-karp-rk5-fixed";
      j["prng"] = "mt19937_64";
      break;
    }
    case Experiment::bickley: {
      const BickleyParams p;
      j["days"] = config.days;
      j["steps"] = config.stored_steps();
      j["substeps"] = config.substeps;
      j["model"] = Json{{"jet_speed", p.jet_speed},
                        {"length_scale", p.length_scale},
                        {"r0", p.r0},
                        {"phase_speed_factor", p.phase_speed_factor},
                        {"epsilon", p.epsilon},
                        {"period_x", p.period_x},
                        {"y_range", {p.y_min, p.y_max}}};
      j["integrator"] = "cash-karp-rk5-fixed";
      j["prng"] = "mt19937_64";
      break;
    }
    case Experiment::noise:
      j["t"] = config.noise_times;
      j["prng"] = "mt19937_64";
      break;
  }
  return j;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log) {
  const unsigned threads = resolve_threads(config.simulation.threads);
  log << "pipeline " << experiment_name(config.simulation.experiment) << ": n = " << config.simulation.n
      << ", seed = " << config.simulation.seed << ", depth = " << config.tree.depth << '\n';
  TrajectoryEnsemble ensemble = run_stage("simulate", [&] { return simulate(config.simulation); });
  AdjacencyMatrix adjacency = run_stage("adjacency", [&] {
    DissimilarityOptions options;
    options.minimum_image = config.minimum_image;
    options.threads = threads;
    options.on_warning = [&log](const std::string& msg) { log << "warning: " << msg << '\n'; };
    return build_trajectory_adjacency(ensemble, options);
  });
  SpectralBasis basis = run_stage("cluster", [&] {
    if (config.tree.depth > adjacency.n()) {
      throw UsageError("--depth " + std::to_string(config.tree.depth) + " exceeds the state count " +
                       std::to_string(adjacency.n()));
    }
    return solve_generalized(adjacency, config.tree.depth, config.eigen_method);
  });
  ColoringTree tree = run_stage("cluster", [&] { return build_tree(basis, adjacency, config.tree); });
  print_tree_summary(tree, log);
  return PipelineResult{std::move(ensemble), std::move(adjacency), std::move(basis), std::move(tree)};
}

void write_pipeline_outputs(const PipelineConfig& config, const PipelineResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const Json sim = simulation_parameters(config.simulation);
  const Json seed = config.simulation.seed;

  io::write_trajectories(result.ensemble, out_dir / "trajectories.csv", sim);

  Json adj_params = base_parameters("pipeline");
  adj_params["seed"] = seed;
  adj_params["metric"] = "traj-std";
  adj_params["minimum_image"] = config.minimum_image;
  adj_params["source"] = "trajectories.csv";
  write_adjacency_file(result.adjacency, out_dir / "adjacency.bin", "traj-std", config.minimum_image, adj_params);

  Json tree_params = base_parameters("pipeline");
  tree_params["seed"] = seed;
  tree_params.update(tree_parameters(config.tree, config.eigen_method));
  tree_params["source"] = "adjacency.bin";
  write_tree_file(result.tree, result.basis, out_dir / "tree.json", {config.include_members}, tree_params);

  Json export_params = base_parameters("pipeline");
  export_params["seed"] = seed;
  export_params["source"] = "tree.json";
  write_export_file(result.tree, out_dir / "tree.nwk", io::TreeFormat::newick, "newick", export_params);
  write_export_file(result.tree, out_dir / "tree.svg", io::TreeFormat::svg, "svg", export_params);
  write_export_file(result.tree, out_dir / "branches.csv", io::TreeFormat::branch_csv, "branch-csv", export_params);

  static const char* const kFiles[] = {"trajectories.csv", "adjacency.bin", "tree.json",
                                       "tree.nwk",         "tree.svg",      "branches.csv"};
  Json files = Json::array();
  for (const char* name : kFiles) {
    for (const fs::path& p : {out_dir / name, io::sidecar_path(out_dir / name)}) {
      files.push_back(Json{{"path", p.filename().string()}, {"bytes", fs::file_size(p)}, {"crc32", io::file_crc32(p)}});
    }
  }
  Json manifest = base_parameters("pipeline");
  manifest["experiment"] = experiment_name(config.simulation.experiment);
  manifest["seed"] = seed;
  manifest["simulation"] = sim;
  manifest["adjacency"] = Json{{"metric", "traj-std"}, {"minimum_image", config.minimum_image}};
  manifest["tree"] = tree_parameters(config.tree, config.eigen_method);
  manifest["files"] = std::move(files);
  io::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

void print_tree_summary(const ColoringTree& tree, std::ostream& out) {
  const auto flags = out.flags();
  for (std::size_t d = 1; d <= tree.depth(); ++d) {
    const auto level = tree.level(d);
    out << "depth " << d << ": " << level.size() << " occupied code" << (level.size() == 1 ? "" : "s") << '\n';
    for (std::size_t index : level) {
      const TreeNode& node = tree.node(index);
      out << "  " << std::left << std::setw(static_cast<int>(tree.depth()) + 2) << node.code.str() << std::right
          << std::setw(8) << node.population() << "  z = " << io::format_double(node.z_length)
          << (node.converged ? "  converged" : "") << '\n';
    }
  }
  const auto leaves = tree.leaves();
  out << "leaves:";
  for (std::size_t index : leaves) out << ' ' << tree.node(index).code.str() << '(' << tree.node(index).population() << ')';
  out << '\n';
  out.flags(flags);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simultaneous coherent structure coloring", "scsc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a trajectory ensemble");
  simulate_cmd->require_subcommand(1);
  SimulationConfig sim_config;
  std::string variant = "divfree";
  fs::path sim_out;
  std::map<std::string, Experiment> sim_kind;
  for (Experiment e : {Experiment::quadgyre, Experiment::bickley, Experiment::noise}) {
    auto* sub = simulate_cmd->add_subcommand(experiment_name(e), std::string("Simulate the ") + experiment_name(e) + " ensemble");
    add_simulation_options(sub, sim_config, e, variant);
    sub->add_option("-o,--output", sim_out, "Trajectory CSV to write")->required();
  }

  // adjacency
  auto* adjacency_cmd = app.add_subcommand("adjacency", "Build a dissimilarity matrix");
  fs::path adj_in;
  fs::path adj_out;
  std::string metric = "traj-std";
  bool minimum_image = false;
  unsigned adj_threads = 0;
  adjacency_cmd->add_option("input", adj_in, "Trajectory CSV or transition matrix")->required()->check(CLI::ExistingFile);
  adjacency_cmd->add_option("--metric", metric, "traj-std or js-sqrt")
      ->capture_default_str()
      ->check(CLI::IsMember({"traj-std", "js-sqrt"}));
  adjacency_cmd->add_option("-o,--output", adj_out, "Matrix file (.bin binary, otherwise CSV)")->required();
  adjacency_cmd->add_flag("--minimum-image", minimum_image, "Nearest periodic image for periodic dimensions");
  add_threads(adjacency_cmd, adj_threads);

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Build the sCSC dendrogram from an adjacency matrix");
  fs::path cluster_in;
  fs::path cluster_out;
  TreeOptions cluster_tree;
  std::string cluster_method = "auto";
  bool cluster_no_members = false;
  cluster_cmd->add_option("input", cluster_in, "Adjacency matrix (.bin or CSV)")->required()->check(CLI::ExistingFile);
  add_tree_options(cluster_cmd, cluster_tree, cluster_method, cluster_no_members);
  cluster_cmd->add_option("-o,--output", cluster_out, "Tree JSON to write")->required();

  // export
  auto* export_cmd = app.add_subcommand("export", "Render a tree as Newick, SVG or branch CSV");
  fs::path export_in;
  fs::path export_out;
  std::string export_format;
  export_cmd->add_option("input", export_in, "Tree JSON")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--format", export_format, "newick, svg or branch-csv")
      ->required()
      ->check(CLI::IsMember({"newick", "svg", "branch-csv"}));
  export_cmd->add_option("-o,--output", export_out, "Output file")->required();

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "simulate, adjacency, cluster and export in one run");
  pipeline_cmd->require_subcommand(1);
  PipelineConfig pipe_config;
  std::string pipe_variant = "divfree";
  std::string pipe_method = "auto";
  bool pipe_no_members = false;
  fs::path out_dir;
  for (Experiment e : {Experiment::quadgyre, Experiment::bickley, Experiment::noise}) {
    auto* sub = pipeline_cmd->add_subcommand(experiment_name(e), std::string("Full pipeline on ") + experiment_name(e));
    add_simulation_options(sub, pipe_config.simulation, e, pipe_variant);
    add_tree_options(sub, pipe_config.tree, pipe_method, pipe_no_members);
    if (e != Experiment::noise) {
      sub->add_flag("--minimum-image", pipe_config.minimum_image, "Nearest periodic image for periodic dimensions");
    }
    sub->add_option("--out-dir", out_dir, "Directory for all artifacts")->required();
  }

  std::vector<const char*> argv;
  argv.push_back("scsc");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (simulate_cmd->parsed()) {
      for (Experiment e : {Experiment::quadgyre, Experiment::bickley, Experiment::noise}) {
        if (simulate_cmd->get_subcommand(experiment_name(e))->parsed()) sim_config.experiment = e;
      }
      sim_config.variant = variant == "verbatim" ? QuadEddyVariant::verbatim : QuadEddyVariant::divergence_free;
      return cmd_simulate(sim_config, sim_out, err);
    }
    if (adjacency_cmd->parsed()) {
      return cmd_adjacency(adj_in, metric, adj_out, minimum_image, resolve_threads(adj_threads), err);
    }
    if (cluster_cmd->parsed()) {
      return cmd_cluster(cluster_in, cluster_tree, eigen_methods().at(cluster_method), !cluster_no_members,
                         cluster_out, out, err);
    }
    if (export_cmd->parsed()) return cmd_export(export_in, export_format, export_out, err);
    if (pipeline_cmd->parsed()) {
      for (Experiment e : {Experiment::quadgyre, Experiment::bickley, Experiment::noise}) {
        if (pipeline_cmd->get_subcommand(experiment_name(e))->parsed()) pipe_config.simulation.experiment = e;
      }
      pipe_config.simulation.variant =
          pipe_variant == "verbatim" ? QuadEddyVariant::verbatim : QuadEddyVariant::divergence_free;
      pipe_config.eigen_method = eigen_methods().at(pipe_method);
      pipe_config.include_members = !pipe_no_members;
      return cmd_pipeline(pipe_config, out_dir, out);
    }
  } catch (const UsageError& e) {
    err << "scsc: usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "scsc: error: " << e.what() << '\n';
    return 1;
  }
  err << "scsc: usage error: no subcommand given\n";
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace scsc::cli
