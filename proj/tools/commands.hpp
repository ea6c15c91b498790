#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scsc/adjacency.hpp"
#include "scsc/error.hpp"
#include "scsc/flows.hpp"
#include "scsc/io.hpp"
#include "scsc/spectral.hpp"
#include "scsc/tree.hpp"

namespace scsc::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Bad flag combinations detected after parsing; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Experiment { quadgyre, bickley, noise };

const char* experiment_name(Experiment e);

struct SimulationConfig {
  Experiment experiment = Experiment::quadgyre;
  std::size_t n = 3000;
  std::uint64_t seed = 1;
  double t_end = 40.0;  // quadgyre, dimensionless
  double days = 40.0;   // bickley
  std::size_t steps = 0;  // 0 picks 401 (quadgyre) or 601 (bickley)
  std::size_t noise_times = 2000;
  QuadEddyVariant variant = QuadEddyVariant::divergence_free;
  std::size_t substeps = 10;
  unsigned threads = 1;

  std::size_t stored_steps() const;
};

TrajectoryEnsemble simulate(const SimulationConfig& config);
/// Everything that determines the ensemble; thread count is left out.
io::Json simulation_parameters(const SimulationConfig& config);

struct PipelineConfig {
  SimulationConfig simulation;
  TreeOptions tree;
  bool minimum_image = false;
  bool include_members = true;
  linalg::EigenMethod eigen_method = linalg::EigenMethod::automatic;
};

struct PipelineResult {
  TrajectoryEnsemble ensemble;
  AdjacencyMatrix adjacency;
  SpectralBasis basis;
  ColoringTree tree;
};

/// simulate -> adjacency -> spectral -> tree, all in memory. Stage
/// failures are rethrown with the stage named.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log);

/// Writes trajectories, adjacency, tree and exports plus manifest.json.
void write_pipeline_outputs(const PipelineConfig& config, const PipelineResult& result,
                            const std::filesystem::path& out_dir);

/// Depth-by-depth occupancy table.
void print_tree_summary(const ColoringTree& tree, std::ostream& out);

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace scsc::cli
