#include "scsc/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scsc/error.hpp"

namespace scsc::io {
namespace fs = std::filesystem;

namespace {

constexpr char kMatrixMagic[8] = {'S', 'C', 'S', 'C', 'M', 'A', 'T', '1'};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Lines without trailing '\r'; a final empty line is dropped.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

bool parse_double(std::string_view cell, double& value) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_index(std::string_view cell, std::size_t& value) {
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

[[noreturn]] void cell_error(std::size_t line, std::size_t column, std::string_view cell) {
  std::ostringstream msg;
  msg << "non-numeric cell '" << cell << "' at row " << line << ", column " << column;
  throw ValidationError(msg.str());
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

std::span<const unsigned char> as_bytes(std::string_view s) {
  return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

Json periods_to_json(const std::vector<std::optional<double>>& periods) {
  Json out = Json::array();
  for (const auto& p : periods) out.push_back(p ? Json(*p) : Json(nullptr));
  return out;
}

void append_newick(const ColoringTree& tree, std::size_t index, std::string& out) {
  const auto& node = tree.node(index);
  if (!node.children.empty()) {
    out.push_back('(');
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      if (c) out.push_back(',');
      append_newick(tree, node.children[c], out);
    }
    out.push_back(')');
  }
  if (node.parent) {
    out += node.code.str();
    out.push_back(':');
    out += format_double(node.z_length);
  }
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("failed to format a double");
  return std::string(buf, ptr);
}

std::uint32_t crc32(std::span<const unsigned char> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = ::crc32(crc, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t file_crc32(const fs::path& path) { return crc32(as_bytes(read_file(path))); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Json FileManifest::to_json() const {
  return Json{{"format", format}, {"version", version}, {"payload", payload}, {"parameters", parameters}};
}

FileManifest FileManifest::from_json(const Json& j) {
  FileManifest m;
  try {
    m.format = j.at("format").get<std::string>();
    m.version = j.at("version").get<int>();
    if (j.contains("payload")) m.payload = j.at("payload");
    if (j.contains("parameters")) m.parameters = j.at("parameters");
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed metadata sidecar: ") + e.what());
  }
  return m;
}

fs::path sidecar_path(const fs::path& data_path) { return fs::path(data_path.string() + ".meta.json"); }

void write_manifest(const fs::path& data_path, const FileManifest& manifest) {
  write_file(sidecar_path(data_path), manifest.to_json().dump(2) + "\n");
}

bool read_manifest(const fs::path& data_path, FileManifest& manifest) {
  const auto side = sidecar_path(data_path);
  if (!fs::exists(side)) return false;
  Json j;
  try {
    j = Json::parse(read_file(side));
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse '" + side.string() + "': " + e.what());
  }
  manifest = FileManifest::from_json(j);
  return true;
}

std::string trajectories_to_csv(const TrajectoryEnsemble& ens) {
  if (ens.n_dims() < 2 || ens.n_dims() > 3) throw ValidationError("trajectory CSV supports 2 or 3 dimensions");
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  std::string out = "state,t";
  for (std::size_t d = 0; d < ens.n_dims(); ++d) (out += ',') += kAxes[d];
  out += '\n';
  std::vector<std::string> times;
  times.reserve(ens.n_times());
  for (double t : ens.times()) times.push_back(format_double(t));
  out.reserve(ens.n_states() * ens.n_times() * (12 + 22 * ens.n_dims()));
  char buf[32];
  for (std::size_t s = 0; s < ens.n_states(); ++s) {
    const auto [sp, sec] = std::to_chars(buf, buf + sizeof buf, s);
    const std::string_view state(buf, static_cast<std::size_t>(sp - buf));
    for (std::size_t t = 0; t < ens.n_times(); ++t) {
      out += state;
      out += ',';
      out += times[t];
      for (std::size_t d = 0; d < ens.n_dims(); ++d) {
        out += ',';
        char num[32];
        const auto [ptr, ec] = std::to_chars(num, num + sizeof num, ens.position(s, t, d));
        out.append(num, ptr);
      }
      out += '\n';
    }
  }
  return out;
}

TrajectoryEnsemble trajectories_from_csv(const std::string& text, std::vector<std::optional<double>> periods) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ValidationError("trajectory CSV is empty (missing header)");
  const auto header = split(lines[0], ',');
  std::size_t n_dims = 0;
  if (header.size() >= 4 && header[0] == "state" && header[1] == "t" && header[2] == "x" && header[3] == "y") {
    n_dims = 2;
    if (header.size() == 5 && header[4] == "z") n_dims = 3;
    else if (header.size() != 4) n_dims = 0;
  }
  if (n_dims == 0) throw ValidationError("trajectory CSV must start with header 'state,t,x,y[,z]'");

  struct Row {
    std::size_t state;
    double t;
    std::size_t line;
    std::array<double, 3> pos;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto cells = split(lines[li], ',');
    if (cells.size() != 2 + n_dims) {
      std::ostringstream msg;
      msg << "row " << li + 1 << " has " << cells.size() << " cells, expected " << 2 + n_dims;
      throw ValidationError(msg.str());
    }
    Row r{};
    r.line = li + 1;
    if (!parse_index(cells[0], r.state)) cell_error(li + 1, 1, cells[0]);
    if (!parse_double(cells[1], r.t)) cell_error(li + 1, 2, cells[1]);
    for (std::size_t d = 0; d < n_dims; ++d) {
      if (!parse_double(cells[2 + d], r.pos[d])) cell_error(li + 1, 3 + d, cells[2 + d]);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw ValidationError("trajectory CSV has no data rows");
  const bool sorted = std::is_sorted(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.state != b.state ? a.state < b.state : a.t < b.t;
  });
  if (!sorted) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.state != b.state ? a.state < b.state : a.t < b.t;
    });
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].state == rows[k - 1].state && rows[k].t == rows[k - 1].t) {
      std::ostringstream msg;
      msg << "duplicate sample for state " << rows[k].state << " at t = " << format_double(rows[k].t) << " (row "
          << rows[k].line << ")";
      throw ValidationError(msg.str());
    }
  }
  std::set<double> grid_set;
  for (const auto& r : rows) grid_set.insert(r.t);
  const std::vector<double> grid(grid_set.begin(), grid_set.end());
  const std::size_t n_times = grid.size();
  const std::size_t n_states = rows.back().state + 1;
  if (rows.size() != n_states * n_times) {
    // Find the first state whose time stamps differ from the common grid.
    std::size_t row = 0;
    for (std::size_t s = 0; s < n_states; ++s) {
      std::size_t k = 0;
      while (row < rows.size() && rows[row].state == s) {
        if (k >= n_times || rows[row].t != grid[k]) break;
        ++row;
        ++k;
      }
      if (k != n_times || (row < rows.size() && rows[row].state == s)) {
        std::ostringstream msg;
        msg << "ragged time grid: state " << s << " does not carry all " << n_times << " time stamps";
        throw ValidationError(msg.str());
      }
    }
    throw ValidationError("ragged time grid");
  }
  std::vector<double> positions(n_states * n_times * n_dims);
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t k = 0; k < n_times; ++k) {
      const Row& r = rows[s * n_times + k];
      if (r.state != s || r.t != grid[k]) {
        std::ostringstream msg;
        msg << "ragged time grid: state " << (r.state != s ? std::min(r.state, s) : s)
            << " does not carry all " << n_times << " time stamps (row " << r.line << ")";
        throw ValidationError(msg.str());
      }
      for (std::size_t d = 0; d < n_dims; ++d) positions[(s * n_times + k) * n_dims + d] = r.pos[d];
    }
  }
  return TrajectoryEnsemble(n_states, n_times, n_dims, std::move(positions), grid, std::move(periods));
}

TrajectoryEnsemble read_trajectories(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<std::optional<double>> periods;
  FileManifest manifest;
  if (read_manifest(path, manifest)) {
    if (manifest.format != kTrajectoryFormat || manifest.version != 1) {
      throw ValidationError("unrecognized trajectory sidecar format '" + manifest.format + "' version " +
                            std::to_string(manifest.version));
    }
    if (manifest.payload.contains("crc32") && manifest.payload["crc32"].get<std::uint32_t>() != crc32(as_bytes(text))) {
      throw ValidationError("checksum mismatch between '" + path.string() + "' and its sidecar");
    }
    if (manifest.payload.contains("periods")) {
      for (const auto& p : manifest.payload["periods"]) {
        periods.push_back(p.is_null() ? std::nullopt : std::optional<double>(p.get<double>()));
      }
    }
  }
  return trajectories_from_csv(text, std::move(periods));
}

void write_trajectories(const TrajectoryEnsemble& ensemble, const fs::path& path, const Json& parameters) {
  const std::string csv = trajectories_to_csv(ensemble);
  write_file(path, csv);
  FileManifest manifest;
  manifest.format = kTrajectoryFormat;
  manifest.payload = Json{{"n_states", ensemble.n_states()},
                          {"n_times", ensemble.n_times()},
                          {"n_dims", ensemble.n_dims()},
                          {"periods", periods_to_json(ensemble.periods())},
                          {"crc32", crc32(as_bytes(csv))}};
  manifest.parameters = parameters;
  write_manifest(path, manifest);
}

MatrixFormat matrix_format_for(const fs::path& path) {
  return path.extension() == ".bin" ? MatrixFormat::bin : MatrixFormat::csv;
}

std::string matrix_to_bytes(const Matrix& m, MatrixFormat format) {
  if (!m.square()) throw ValidationError("only square matrices are serialized");
  const std::size_t n = m.rows();
  std::string out;
  if (format == MatrixFormat::csv) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j) out += ',';
        out += format_double(m(i, j));
      }
      out += '\n';
    }
    return out;
  }
  out.reserve(8 + 8 + 8 * n * n + 4);
  out.append(kMatrixMagic, sizeof kMatrixMagic);
  put_u64(out, n);
  for (double v : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  const std::uint32_t crc = crc32(as_bytes(std::string_view(out).substr(8)));
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((crc >> (8 * b)) & 0xff));
  return out;
}

Matrix matrix_from_bytes(const std::string& bytes, MatrixFormat format) {
  if (format == MatrixFormat::csv) {
    const auto lines = lines_of(bytes);
    std::vector<std::string_view> rows;
    for (auto l : lines) {
      if (!l.empty()) rows.push_back(l);
    }
    const std::size_t n = rows.size();
    if (n == 0) throw ValidationError("matrix CSV is empty");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto cells = split(rows[i], ',');
      if (cells.size() != n) {
        std::ostringstream msg;
        msg << "matrix CSV row " << i + 1 << " has " << cells.size() << " values, expected " << n;
        throw ValidationError(msg.str());
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!parse_double(cells[j], m(i, j))) cell_error(i + 1, j + 1, cells[j]);
      }
    }
    return m;
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMatrixMagic, 8) != 0) {
    throw ValidationError("bad magic: not an SCSCMAT1 matrix file");
  }
  if (bytes.size() < 16) throw ValidationError("size mismatch: matrix file truncated before the dimension field");
  const std::uint64_t n = get_u64(p + 8);
  const std::uint64_t max_n = (bytes.size() - 20) / 8;
  if (n == 0 || n > max_n / n + 1 || 20 + 8 * n * n != bytes.size()) {
    std::ostringstream msg;
    msg << "size mismatch: header declares n = " << n << " but the file holds " << bytes.size() << " bytes";
    throw ValidationError(msg.str());
  }
  const std::size_t payload_end = 16 + 8 * n * n;
  std::uint32_t stored = 0;
  for (int b = 3; b >= 0; --b) stored = (stored << 8) | p[payload_end + b];
  const std::uint32_t actual = crc32({p + 8, payload_end - 8});
  if (stored != actual) throw ValidationError("CRC mismatch: matrix payload is corrupted");
  Matrix m(n, n);
  auto data = m.data();
  for (std::size_t k = 0; k < n * n; ++k) data[k] = std::bit_cast<double>(get_u64(p + 16 + 8 * k));
  return m;
}

Matrix read_matrix(const fs::path& path, MatrixFormat format) { return matrix_from_bytes(read_file(path), format); }

void write_matrix(const Matrix& m, const fs::path& path, MatrixFormat format) {
  write_file(path, matrix_to_bytes(m, format));
}

AdjacencyMatrix read_adjacency(const fs::path& path) {
  return validate_adjacency(read_matrix(path, matrix_format_for(path)));
}

TransitionMatrix read_transition(const fs::path& path) {
  return TransitionMatrix(read_matrix(path, matrix_format_for(path)));
}

bool looks_like_trajectory_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string first;
  std::getline(in, first);
  return first.starts_with("state,t,");
}

std::string tree_to_json(const ColoringTree& tree, const TreeWriteOptions& options) {
  Json nodes = Json::array();
  for (const auto& node : tree.nodes()) {
    Json j{{"code", node.code.str()},
           {"population", node.population()},
           {"z_length", node.z_length},
           {"converged", node.converged}};
    if (options.include_members) j["members"] = node.members;
    nodes.push_back(std::move(j));
  }
  Json codes = Json::array();
  for (const auto& c : tree.codes()) codes.push_back(c.str());
  const Json out{{"depth", tree.depth()}, {"n", tree.n()}, {"nodes", std::move(nodes)}, {"codes", std::move(codes)}};
  return out.dump(2) + "\n";
}

ColoringTree tree_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    const std::size_t depth = j.at("depth").get<std::size_t>();
    const std::size_t n = j.at("n").get<std::size_t>();
    std::vector<BitCode> codes;
    for (const auto& c : j.at("codes")) codes.push_back({c.get<std::string>()});
    if (codes.size() != n) throw ValidationError("tree JSON 'codes' length does not match 'n'");
    for (const auto& c : codes) {
      if (c.size() != depth || c.bits.find_first_not_of("01") != std::string::npos) {
        throw ValidationError("tree JSON code '" + c.str() + "' is not a " + std::to_string(depth) + "-bit code");
      }
    }
    std::vector<TreeNode> nodes;
    for (const auto& jn : j.at("nodes")) {
      TreeNode node;
      node.code = {jn.at("code").get<std::string>()};
      node.z_length = jn.at("z_length").get<double>();
      if (jn.contains("members")) {
        node.members = jn.at("members").get<std::vector<std::size_t>>();
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (codes[i].starts_with(node.code)) node.members.push_back(i);
        }
      }
      if (node.members.size() != jn.at("population").get<std::size_t>()) {
        throw ValidationError("tree JSON node '" + node.code.str() + "' population disagrees with its members");
      }
      nodes.push_back(std::move(node));
    }
    return ColoringTree(depth, std::move(nodes), std::move(codes));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed tree JSON: ") + e.what());
  }
}

std::string tree_to_newick(const ColoringTree& tree) {
  std::string out;
  append_newick(tree, 0, out);
  out += ";\n";
  return out;
}

std::string tree_to_branch_csv(const ColoringTree& tree) {
  std::string out = "code,population,z_length,converged\n";
  for (const auto& node : tree.nodes()) {
    if (!node.parent) continue;
    out += node.code.str() + ',' + std::to_string(node.population()) + ',' + format_double(node.z_length) + ',' +
           (node.converged ? "true" : "false") + '\n';
  }
  return out;
}

std::string tree_to_svg(const ColoringTree& tree) {
  const DendrogramLayout layout = dendrogram_geometry(tree);
  const double span_x = layout.max_corner.x - layout.min_corner.x;
  const double span_y = layout.max_corner.y - layout.min_corner.y;
  const double extent = std::max({span_x, span_y, 1e-300});
  const double draw = 800.0;
  const double margin = 70.0;
  const double scale = span_x > 0.0 || span_y > 0.0 ? draw / extent : 1.0;
  const double width = span_x * scale + 2 * margin;
  const double height = span_y * scale + 2 * margin;
  auto px = [&](double x) { return margin + (x - layout.min_corner.x) * scale; };
  auto py = [&](double y) { return margin + (layout.max_corner.y - y) * scale; };
  const double max_stroke = 40.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
      << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(height) << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "  <g stroke=\"black\" stroke-linecap=\"round\">\n";
  for (const auto& seg : layout.segments) {
    if (seg.from == seg.to) continue;
    svg << "    <line x1=\"" << fixed(px(seg.from.x)) << "\" y1=\"" << fixed(py(seg.from.y)) << "\" x2=\""
        << fixed(px(seg.to.x)) << "\" y2=\"" << fixed(py(seg.to.y)) << "\" stroke-width=\""
        << fixed(std::max(0.5, seg.width * max_stroke)) << "\" data-code=\"" << seg.label << "\" data-population=\""
        << seg.population << "\"/>\n";
  }
  svg << "  </g>\n  <g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& seg : layout.segments) {
    if (seg.from == seg.to) continue;
    svg << "    <text x=\"" << fixed(px(seg.to.x) + 4) << "\" y=\"" << fixed(py(seg.to.y)) << "\">" << seg.label
        << "</text>\n";
    svg << "    <text x=\"" << fixed(px(seg.to.x) + 4) << "\" y=\"" << fixed(py(seg.to.y) + 12)
        << "\" fill=\"red\">" << seg.population << "</text>\n";
  }
  svg << "  </g>\n";
  // Axes in z units along the left and bottom edges.
  const double x0 = margin * 0.5;
  const double y0 = height - margin * 0.5;
  svg << "  <g stroke=\"gray\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "    <line x1=\"" << fixed(px(layout.min_corner.x)) << "\" y1=\"" << fixed(y0) << "\" x2=\""
      << fixed(px(layout.max_corner.x)) << "\" y2=\"" << fixed(y0) << "\"/>\n";
  svg << "    <line x1=\"" << fixed(x0) << "\" y1=\"" << fixed(py(layout.max_corner.y)) << "\" x2=\"" << fixed(x0)
      << "\" y2=\"" << fixed(py(layout.min_corner.y)) << "\"/>\n";
  svg << "    <text x=\"" << fixed(width / 2) << "\" y=\"" << fixed(height - 8) << "\" text-anchor=\"middle\">z ("
      << fixed(span_x) << " across)</text>\n";
  svg << "    <text x=\"12\" y=\"" << fixed(height / 2) << "\" transform=\"rotate(-90 12 " << fixed(height / 2)
      << ")\" text-anchor=\"middle\">z (" << fixed(span_y) << " deep)</text>\n";
  svg << "  </g>\n</svg>\n";
  return svg.str();
}

void write_tree(const ColoringTree& tree, const fs::path& path, TreeFormat format, const TreeWriteOptions& options) {
  switch (format) {
    case TreeFormat::json:
      write_file(path, tree_to_json(tree, options));
      return;
    case TreeFormat::newick:
      write_file(path, tree_to_newick(tree));
      return;
    case TreeFormat::svg:
      write_file(path, tree_to_svg(tree));
      return;
    case TreeFormat::branch_csv:
      write_file(path, tree_to_branch_csv(tree));
      return;
  }
}

ColoringTree read_tree(const fs::path& path) { return tree_from_json(read_file(path)); }

}  // namespace scsc::io
