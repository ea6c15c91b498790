#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "scsc/adjacency.hpp"
#include "scsc/matrix.hpp"
#include "scsc/tree.hpp"

namespace scsc::io {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::uint32_t crc32(std::span<const unsigned char> bytes);
std::uint32_t file_crc32(const std::filesystem::path& path);

/// Metadata sidecar written next to data files as `<file>.meta.json`.
struct FileManifest {
  std::string format;
  int version = 1;
  Json payload = Json::object();     // dimensions, counts, crc32 of the data file
  Json parameters = Json::object();  // generator settings, seed, tool version

  Json to_json() const;
  static FileManifest from_json(const Json& j);
};

std::filesystem::path sidecar_path(const std::filesystem::path& data_path);
void write_manifest(const std::filesystem::path& data_path, const FileManifest& manifest);
/// Returns false when no sidecar exists.
bool read_manifest(const std::filesystem::path& data_path, FileManifest& manifest);

inline constexpr const char* kTrajectoryFormat = "scsc-trajectories";
inline constexpr const char* kMatrixFormat = "scsc-matrix";
inline constexpr const char* kTreeFormat = "scsc-tree";

/// CSV with header `state,t,x,y[,z]`. Rows may come in any order; every state
/// must carry the same set of time stamps. Periods come from the sidecar, if
/// present, whose checksum must match the file.
TrajectoryEnsemble read_trajectories(const std::filesystem::path& path);

/// Writes the CSV sorted by (state, t) plus a sidecar recording periods,
/// checksum and `parameters`.
void write_trajectories(const TrajectoryEnsemble& ensemble, const std::filesystem::path& path,
                        const Json& parameters = Json::object());

std::string trajectories_to_csv(const TrajectoryEnsemble& ensemble);
TrajectoryEnsemble trajectories_from_csv(const std::string& text,
                                         std::vector<std::optional<double>> periods = {});

enum class MatrixFormat { csv, bin };

/// `.bin` selects the binary format, anything else CSV.
MatrixFormat matrix_format_for(const std::filesystem::path& path);

/// Binary layout: "SCSCMAT1", uint64 LE n, n*n float64 LE row-major, then
/// uint32 LE CRC-32 of the n field and the values. CSV: n lines of n
/// comma-separated values, no header.
Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
void write_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);

std::string matrix_to_bytes(const Matrix& m, MatrixFormat format);
Matrix matrix_from_bytes(const std::string& bytes, MatrixFormat format);

AdjacencyMatrix read_adjacency(const std::filesystem::path& path);
TransitionMatrix read_transition(const std::filesystem::path& path);

/// True when the file starts with the trajectory CSV header.
bool looks_like_trajectory_csv(const std::filesystem::path& path);

enum class TreeFormat { json, newick, svg, branch_csv };

struct TreeWriteOptions {
  bool include_members = true;
};

std::string tree_to_json(const ColoringTree& tree, const TreeWriteOptions& options = {});
ColoringTree tree_from_json(const std::string& text);
/// Codes label the nodes and z lengths are the branch lengths.
std::string tree_to_newick(const ColoringTree& tree);
std::string tree_to_svg(const ColoringTree& tree);
/// `code,population,z_length,converged` for every non-root node.
std::string tree_to_branch_csv(const ColoringTree& tree);

void write_tree(const ColoringTree& tree, const std::filesystem::path& path, TreeFormat format,
                const TreeWriteOptions& options = {});
ColoringTree read_tree(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace scsc::io
