#include <doctest.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "scsc/error.hpp"
#include "scsc/io.hpp"
#include "scsc/spectral.hpp"
#include "temp_dir.hpp"

using namespace scsc;
namespace fs = std::filesystem;

namespace {

std::span<const unsigned char> bytes_of(const std::string& s) {
  return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1e3);
  Matrix m(n, n);
  for (auto& v : m.data()) v = g(rng);
  return m;
}

ColoringTree sample_tree(std::size_t n, std::size_t depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto d = oracle::random_adjacency(n, rng);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d[i][j];
  const auto a = validate_adjacency(m);
  return build_tree(solve_generalized(a, depth), a, {depth, 1, 0.0});
}

TrajectoryEnsemble sample_ensemble(std::size_t n, std::size_t nt, std::size_t nd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1e6);
  std::vector<double> pos(n * nt * nd);
  for (auto& p : pos) p = g(rng);
  std::vector<double> times(nt);
  for (std::size_t t = 0; t < nt; ++t) times[t] = 0.1 * static_cast<double>(t) + 1e-3;
  return TrajectoryEnsemble(n, nt, nd, pos, times);
}

std::size_t count_nodes(const oracle::NewickNode& n) {
  std::size_t c = 1;
  for (const auto& ch : n.children) c += count_nodes(ch);
  return c;
}

void compare_newick(const oracle::NewickNode& nw, const ColoringTree& tree, std::size_t index) {
  const auto& node = tree.node(index);
  REQUIRE(nw.children.size() == node.children.size());
  if (node.parent) {
    CHECK(nw.label == node.code.str());
    CHECK(nw.has_length);
    CHECK(nw.length == node.z_length);
  }
  for (std::size_t c = 0; c < node.children.size(); ++c) compare_newick(nw.children[c], tree, node.children[c]);
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(4.0) == "4");
  CHECK(io::format_double(-2.5e-300) == "-2.5e-300");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::bit_cast<double>(rng());
    if (!std::isfinite(v)) continue;
    const std::string text = io::format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
  }
}

TEST_CASE("CRC-32 matches a bitwise implementation") {
  const std::string check = "123456789";
  CHECK(io::crc32(bytes_of(check)) == 0xCBF43926u);
  std::mt19937_64 rng(2);
  std::string blob(10007, '\0');
  for (auto& c : blob) c = static_cast<char>(rng());
  CHECK(io::crc32(bytes_of(blob)) ==
        oracle::crc32_bitwise(reinterpret_cast<const unsigned char*>(blob.data()), blob.size()));
}

TEST_CASE("binary matrix layout and round trip") {
  Matrix m = random_matrix(5, 3);
  m(0, 0) = -0.0;
  m(1, 1) = 5e-324;
  m(2, 2) = 1.7976931348623157e308;
  const std::string bytes = io::matrix_to_bytes(m, io::MatrixFormat::bin);
  REQUIRE(bytes.size() == 8 + 8 + 25 * 8 + 4);
  CHECK(bytes.substr(0, 8) == "SCSCMAT1");
  CHECK(static_cast<unsigned char>(bytes[8]) == 5);
  for (int k = 9; k < 16; ++k) CHECK(bytes[static_cast<std::size_t>(k)] == 0);
  double first;
  std::uint64_t raw = 0;
  for (int b = 7; b >= 0; --b) raw = (raw << 8) | static_cast<unsigned char>(bytes[16 + static_cast<std::size_t>(b)]);
  first = std::bit_cast<double>(raw);
  CHECK(std::signbit(first));
  std::uint32_t stored = 0;
  for (int b = 3; b >= 0; --b) stored = (stored << 8) | static_cast<unsigned char>(bytes[bytes.size() - 4 + static_cast<std::size_t>(b)]);
  CHECK(stored == oracle::crc32_bitwise(reinterpret_cast<const unsigned char*>(bytes.data()) + 8, bytes.size() - 12));

  const Matrix back = io::matrix_from_bytes(bytes, io::MatrixFormat::bin);
  REQUIRE(back.rows() == 5);
  for (std::size_t k = 0; k < 25; ++k)
    CHECK(std::bit_cast<std::uint64_t>(back.data()[k]) == std::bit_cast<std::uint64_t>(m.data()[k]));
}

TEST_CASE("binary matrix corruption is detected") {
  const std::string good = io::matrix_to_bytes(random_matrix(4, 9), io::MatrixFormat::bin);
  for (std::size_t pos : {std::size_t{8}, std::size_t{20}, good.size() - 5, good.size() - 1}) {
    std::string bad = good;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    CHECK_THROWS_AS(io::matrix_from_bytes(bad, io::MatrixFormat::bin), ValidationError);
  }
  std::string flipped = good;
  flipped[40] = static_cast<char>(flipped[40] ^ 1);
  try {
    io::matrix_from_bytes(flipped, io::MatrixFormat::bin);
    FAIL("corruption accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("CRC") != std::string::npos);
  }
  std::string magic = good;
  magic[0] = 'X';
  CHECK_THROWS_WITH_AS(io::matrix_from_bytes(magic, io::MatrixFormat::bin), doctest::Contains("magic"), ValidationError);
  CHECK_THROWS_WITH_AS(io::matrix_from_bytes(good.substr(0, good.size() - 8), io::MatrixFormat::bin),
                       doctest::Contains("size mismatch"), ValidationError);
  CHECK_THROWS_AS(io::matrix_from_bytes("SCSC", io::MatrixFormat::bin), ValidationError);
}

TEST_CASE("CSV matrices") {
  const Matrix m = random_matrix(6, 4);
  const std::string text = io::matrix_to_bytes(m, io::MatrixFormat::csv);
  CHECK(io::matrix_from_bytes(text, io::MatrixFormat::csv) == m);
  CHECK(io::matrix_from_bytes("0,1\r\n1,0\r\n", io::MatrixFormat::csv)(0, 1) == 1.0);
  CHECK_THROWS_WITH_AS(io::matrix_from_bytes("0,1\n1,abc\n", io::MatrixFormat::csv),
                       doctest::Contains("row 2, column 2"), ValidationError);
  CHECK_THROWS_AS(io::matrix_from_bytes("0,1\n1\n", io::MatrixFormat::csv), ValidationError);
  CHECK_THROWS_AS(io::matrix_from_bytes("", io::MatrixFormat::csv), ValidationError);
  CHECK(io::matrix_format_for("a/b.bin") == io::MatrixFormat::bin);
  CHECK(io::matrix_format_for("a/b.csv") == io::MatrixFormat::csv);
}

TEST_CASE("matrix files and adjacency validation on read") {
  TempDir dir("io-matrix");
  Matrix sym(3, 3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) sym(i, i) = 0.0;
  for (const char* name : {"a.bin", "a.csv"}) {
    io::write_matrix(sym, dir / name, io::matrix_format_for(name));
    CHECK(io::read_adjacency(dir / name).values() == sym);
  }
  Matrix asym = sym;
  asym(0, 1) = 0.9;
  io::write_matrix(asym, dir / "bad.bin", io::MatrixFormat::bin);
  CHECK_THROWS_AS(io::read_adjacency(dir / "bad.bin"), EntryError);
  CHECK_THROWS_AS(io::read_matrix(dir / "missing.bin", io::MatrixFormat::bin), IoError);
}

TEST_CASE("trajectory CSV round trip preserves everything") {
  TempDir dir("io-traj");
  for (std::size_t nd : {2u, 3u}) {
    const auto raw = sample_ensemble(7, 9, nd, 10 + nd);
    std::vector<double> pos(raw.positions().begin(), raw.positions().end());
    std::vector<double> times(raw.times().begin(), raw.times().end());
    std::vector<std::optional<double>> periods(nd);
    periods[0] = 2e7;
    const TrajectoryEnsemble e(7, 9, nd, pos, times, periods);
    const fs::path path = dir / ("t" + std::to_string(nd) + ".csv");
    io::write_trajectories(e, path, io::Json{{"seed", 4}});
    CHECK(io::looks_like_trajectory_csv(path));
    const TrajectoryEnsemble back = io::read_trajectories(path);
    CHECK(back == e);
    io::FileManifest manifest;
    REQUIRE(io::read_manifest(path, manifest));
    CHECK(manifest.format == io::kTrajectoryFormat);
    CHECK(manifest.parameters["seed"] == 4);
    CHECK(manifest.payload["crc32"].get<std::uint32_t>() == io::file_crc32(path));
  }
}

TEST_CASE("trajectory CSV parsing rules") {
  const std::string ok = "state,t,x,y\n1,0,5,6\n0,1,3,4\n0,0,1,2\n1,1,7,8\n";
  const auto e = io::trajectories_from_csv(ok);
  CHECK(e.n_states() == 2);
  CHECK(e.n_times() == 2);
  CHECK(e.position(0, 0, 0) == 1.0);
  CHECK(e.position(1, 1, 1) == 8.0);
  for (const auto& p : e.periods()) CHECK(!p);

  CHECK_THROWS_WITH_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1,2\n0,1,a,2\n"),
                       doctest::Contains("row 3, column 3"), ValidationError);
  CHECK_THROWS_WITH_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1,2\n0,1,1,2\n1,0,1,2\n"),
                       doctest::Contains("state 1"), ValidationError);
  CHECK_THROWS_WITH_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1,2\n0,1,1,2\n1,0,1,2\n1,2,1,2\n"),
                       doctest::Contains("state"), ValidationError);
  CHECK_THROWS_WITH_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1,2\n0,0,1,2\n"),
                       doctest::Contains("duplicate"), ValidationError);
  CHECK_THROWS_WITH_AS(io::trajectories_from_csv("0,0,1,2\n"), doctest::Contains("header"), ValidationError);
  CHECK_THROWS_AS(io::trajectories_from_csv(""), ValidationError);
  CHECK_THROWS_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1\n"), ValidationError);
  // a state id with no rows leaves a gap
  CHECK_THROWS_AS(io::trajectories_from_csv("state,t,x,y\n0,0,1,2\n0,1,1,2\n2,0,1,2\n2,1,1,2\n"), ValidationError);
}

TEST_CASE("sidecar checksum guards the trajectory file") {
  TempDir dir("io-sidecar");
  const auto e = sample_ensemble(3, 4, 2, 1);
  const fs::path path = dir / "t.csv";
  io::write_trajectories(e, path);
  std::string text = io::read_file(path);
  text[text.size() - 2] = text[text.size() - 2] == '1' ? '2' : '1';
  io::write_file(path, text);
  CHECK_THROWS_WITH_AS(io::read_trajectories(path), doctest::Contains("checksum"), ValidationError);
  fs::remove(io::sidecar_path(path));
  CHECK_NOTHROW(io::read_trajectories(path));
}

TEST_CASE("tree JSON round trip") {
  const ColoringTree t = sample_tree(40, 5, 3);
  const std::string json = io::tree_to_json(t);
  CHECK(io::tree_from_json(json) == t);
  const std::string slim = io::tree_to_json(t, {false});
  CHECK(slim.find("members") == std::string::npos);
  CHECK(io::tree_from_json(slim) == t);
  const auto j = io::Json::parse(json);
  CHECK(j["depth"] == 5);
  CHECK(j["n"] == 40);
  CHECK(j["nodes"][0]["code"] == "");
  CHECK(j["codes"].size() == 40);
  for (const auto& node : j["nodes"]) {
    CHECK(node.contains("z_length"));
    CHECK(node.contains("converged"));
    CHECK(node.contains("population"));
  }
  CHECK(io::tree_to_json(io::tree_from_json(json)) == json);

  io::Json broken = j;
  broken["nodes"][1]["population"] = 999;
  CHECK_THROWS_AS(io::tree_from_json(broken.dump()), ValidationError);
  CHECK_THROWS_AS(io::tree_from_json("{nonsense"), ValidationError);
  broken = j;
  broken["codes"][0] = "012";
  CHECK_THROWS_AS(io::tree_from_json(broken.dump()), ValidationError);
}

TEST_CASE("Newick export") {
  TreeNode root, c0, c1;
  root.members = {0, 1};
  c0.code = {"0"};
  c0.members = {0};
  c0.z_length = 4.0;
  c1.code = {"1"};
  c1.members = {1};
  c1.z_length = 4.0;
  const ColoringTree two(1, {root, c0, c1}, {BitCode{"0"}, BitCode{"1"}});
  CHECK(io::tree_to_newick(two) == "(0:4,1:4);\n");

  const ColoringTree t = sample_tree(50, 6, 8);
  const auto parsed = oracle::NewickParser(io::tree_to_newick(t)).parse();
  CHECK(count_nodes(parsed) == t.nodes().size());
  compare_newick(parsed, t, 0);
}

TEST_CASE("branch CSV and SVG") {
  const ColoringTree t = sample_tree(30, 4, 5);
  const std::string csv = io::tree_to_branch_csv(t);
  CHECK(csv.rfind("code,population,z_length,converged\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == t.nodes().size());
  const auto& first = t.node(1);
  const std::string row = first.code.str() + "," + std::to_string(first.population()) + "," +
                          io::format_double(first.z_length) + "," + (first.converged ? "true" : "false") + "\n";
  CHECK(csv.find(row) != std::string::npos);

  const std::string svg = io::tree_to_svg(t);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg == io::tree_to_svg(t));
  std::size_t segments = 0;
  for (std::size_t pos = svg.find("data-code="); pos != std::string::npos; pos = svg.find("data-code=", pos + 1))
    ++segments;
  std::size_t drawn = 0;
  for (const auto& seg : dendrogram_geometry(t).segments) drawn += !(seg.from == seg.to);
  CHECK(segments == drawn);
  CHECK(svg.find(">z (") != std::string::npos);

  TempDir dir("io-tree");
  io::write_tree(t, dir / "t.json", io::TreeFormat::json);
  CHECK(io::read_tree(dir / "t.json") == t);
  io::write_tree(t, dir / "t.svg", io::TreeFormat::svg);
  CHECK(io::read_file(dir / "t.svg") == svg);
}
