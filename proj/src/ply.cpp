#include <tcdm/ply.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <tcdm/error.hpp>

namespace tcdm {
namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY support assumes a little-endian host");

enum class ScalarType { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::int8;
  if (name == "uchar" || name == "uint8") return ScalarType::uint8;
  if (name == "short" || name == "int16") return ScalarType::int16;
  if (name == "ushort" || name == "uint16") return ScalarType::uint16;
  if (name == "int" || name == "int32") return ScalarType::int32;
  if (name == "uint" || name == "uint32") return ScalarType::uint32;
  if (name == "float" || name == "float32") return ScalarType::float32;
  if (name == "double" || name == "float64") return ScalarType::float64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType type) {
  switch (type) {
    case ScalarType::int8:
    case ScalarType::uint8: return 1;
    case ScalarType::int16:
    case ScalarType::uint16: return 2;
    case ScalarType::int32:
    case ScalarType::uint32:
    case ScalarType::float32: return 4;
    case ScalarType::float64: return 8;
  }
  return 0;
}

template <typename T>
double read_as(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return static_cast<double>(value);
}

double read_scalar(const char* p, ScalarType type) {
  switch (type) {
    case ScalarType::int8: return read_as<std::int8_t>(p);
    case ScalarType::uint8: return read_as<std::uint8_t>(p);
    case ScalarType::int16: return read_as<std::int16_t>(p);
    case ScalarType::uint16: return read_as<std::uint16_t>(p);
    case ScalarType::int32: return read_as<std::int32_t>(p);
    case ScalarType::uint32: return read_as<std::uint32_t>(p);
    case ScalarType::float32: return read_as<float>(p);
    case ScalarType::float64: return read_as<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  bool has_list = false;
};

struct Header {
  PlyEncoding encoding = PlyEncoding::ascii;
  std::vector<Element> elements;
  std::size_t payload_offset = 0;
  std::size_t line_count = 0;  // header lines, for ASCII error line numbers
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(std::string_view origin, const std::string& what) {
  throw InputError(std::string(origin) + ": " + what);
}

Header parse_header(std::string_view bytes, std::string_view origin) {
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  for (std::size_t line_no = 1;; ++line_no) {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) fail(origin, "malformed header: missing end_header");
    std::string_view line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    header.line_count = line_no;

    const auto tokens = split_ws(line);
    if (line_no == 1) {
      if (tokens.size() != 1 || tokens[0] != "ply") fail(origin, "malformed header: line 1 is not 'ply'");
      continue;
    }
    if (tokens.empty()) continue;
    const auto keyword = tokens[0];
    const std::string where = "malformed header at line " + std::to_string(line_no);

    if (keyword == "end_header") {
      if (!saw_format) fail(origin, where + ": no format line");
      header.payload_offset = pos;
      return header;
    }
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      if (tokens.size() != 3) fail(origin, where + ": bad format line");
      if (tokens[1] == "ascii") {
        header.encoding = PlyEncoding::ascii;
      } else if (tokens[1] == "binary_little_endian") {
        header.encoding = PlyEncoding::binary_le;
      } else if (tokens[1] == "binary_big_endian") {
        fail(origin, "binary_big_endian payloads are not supported");
      } else {
        fail(origin, where + ": unknown format '" + std::string(tokens[1]) + "'");
      }
      saw_format = true;
      continue;
    }
    if (keyword == "element") {
      if (tokens.size() != 3) fail(origin, where + ": bad element line");
      Element element;
      element.name = std::string(tokens[1]);
      const auto [ptr, ec] = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), element.count);
      if (ec != std::errc() || ptr != tokens[2].data() + tokens[2].size()) fail(origin, where + ": bad element count");
      header.elements.push_back(std::move(element));
      continue;
    }
    if (keyword == "property") {
      if (header.elements.empty()) fail(origin, where + ": property before any element");
      auto& element = header.elements.back();
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (tokens.size() != 5) fail(origin, where + ": bad list property");
        element.has_list = true;
        element.properties.push_back({std::string(tokens[4]), ScalarType::uint8});
        continue;
      }
      if (tokens.size() != 3) fail(origin, where + ": bad property line");
      const auto type = parse_scalar_type(tokens[1]);
      if (!type) fail(origin, where + ": unknown property type '" + std::string(tokens[1]) + "'");
      element.properties.push_back({std::string(tokens[2]), *type});
      continue;
    }
    fail(origin, where + ": unknown keyword '" + std::string(keyword) + "'");
  }
}

struct VertexLayout {
  int x = -1, y = -1, z = -1, r = -1, g = -1, b = -1;
};

VertexLayout locate(const Element& vertex, std::string_view origin) {
  if (vertex.has_list) fail(origin, "vertex element has a list property");
  VertexLayout layout;
  for (int i = 0; i < static_cast<int>(vertex.properties.size()); ++i) {
    const auto& name = vertex.properties[i].name;
    if (name == "x") layout.x = i;
    else if (name == "y") layout.y = i;
    else if (name == "z") layout.z = i;
    else if (name == "red" || name == "r" || name == "diffuse_red") layout.r = i;
    else if (name == "green" || name == "g" || name == "diffuse_green") layout.g = i;
    else if (name == "blue" || name == "b" || name == "diffuse_blue") layout.b = i;
  }
  if (layout.x < 0 || layout.y < 0 || layout.z < 0) fail(origin, "missing coordinate property (x, y, z)");
  if (layout.r < 0 || layout.g < 0 || layout.b < 0) fail(origin, "missing color property (red, green, blue)");
  return layout;
}

Point make_point(const std::vector<double>& values, const VertexLayout& layout, std::string_view origin, const std::string& where) {
  Point p;
  p.position = Vec3(values[layout.x], values[layout.y], values[layout.z]);
  p.color = Vec3(values[layout.r], values[layout.g], values[layout.b]);
  if (!p.position.allFinite()) fail(origin, where + ": non-finite coordinate");
  for (int c = 0; c < 3; ++c) {
    if (!(p.color[c] >= 0.0 && p.color[c] <= 255.0)) fail(origin, where + ": color component outside [0, 255]");
  }
  return p;
}

}  // namespace

PointCloud parse_ply(std::string_view bytes, std::string_view origin) {
  const Header header = parse_header(bytes, origin);

  std::size_t vertex_slot = header.elements.size();
  std::size_t skip_bytes = 0;
  std::size_t skip_lines = 0;
  for (std::size_t e = 0; e < header.elements.size(); ++e) {
    const auto& element = header.elements[e];
    if (element.name == "vertex") {
      vertex_slot = e;
      break;
    }
    if (element.has_list && header.encoding == PlyEncoding::binary_le) {
      fail(origin, "list-valued element '" + element.name + "' precedes vertex data");
    }
    std::size_t row = 0;
    for (const auto& prop : element.properties) row += scalar_size(prop.type);
    skip_bytes += row * element.count;
    skip_lines += element.count;
  }
  if (vertex_slot == header.elements.size()) fail(origin, "missing vertex element");

  const Element& vertex = header.elements[vertex_slot];
  const VertexLayout layout = locate(vertex, origin);
  const std::size_t nprops = vertex.properties.size();

  PointCloud cloud;
  cloud.points.reserve(vertex.count);
  std::vector<double> values(nprops);

  if (header.encoding == PlyEncoding::binary_le) {
    std::size_t row = 0;
    for (const auto& prop : vertex.properties) row += scalar_size(prop.type);
    std::size_t offset = header.payload_offset + skip_bytes;
    for (std::size_t i = 0; i < vertex.count; ++i) {
      if (offset + row > bytes.size()) fail(origin, "truncated payload at vertex " + std::to_string(i));
      const char* p = bytes.data() + offset;
      for (std::size_t k = 0; k < nprops; ++k) {
        values[k] = read_scalar(p, vertex.properties[k].type);
        p += scalar_size(vertex.properties[k].type);
      }
      cloud.points.push_back(make_point(values, layout, origin, "vertex " + std::to_string(i)));
      offset += row;
    }
    return cloud;
  }

  std::size_t pos = header.payload_offset;
  std::size_t line_no = header.line_count;
  auto next_line = [&](std::string_view& line) {
    // Blank lines between rows are tolerated.
    while (pos < bytes.size()) {
      std::size_t eol = bytes.find('\n', pos);
      if (eol == std::string_view::npos) eol = bytes.size();
      line = bytes.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!split_ws(line).empty()) return true;
    }
    return false;
  };

  std::string_view line;
  for (std::size_t i = 0; i < skip_lines; ++i) {
    if (!next_line(line)) fail(origin, "truncated payload before vertex data");
  }
  for (std::size_t i = 0; i < vertex.count; ++i) {
    if (!next_line(line)) fail(origin, "truncated payload at vertex " + std::to_string(i));
    const std::string where = "line " + std::to_string(line_no);
    const auto tokens = split_ws(line);
    if (tokens.size() < nprops) fail(origin, where + ": expected " + std::to_string(nprops) + " values");
    for (std::size_t k = 0; k < nprops; ++k) {
      const auto tok = tokens[k];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc::result_out_of_range) {
        v = tok.front() == '-' ? -HUGE_VAL : HUGE_VAL;
      } else if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        fail(origin, where + ": cannot parse value '" + std::string(tok) + "'");
      }
      values[k] = v;
    }
    cloud.points.push_back(make_point(values, layout, origin, where));
  }
  return cloud;
}

PointCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = std::move(buffer).str();
  return parse_ply(bytes, path.string());
}

void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyEncoding encoding) {
  validate(cloud);
  bool integral_colors = true;
  for (const auto& p : cloud.points) {
    for (int c = 0; c < 3; ++c) integral_colors = integral_colors && p.color[c] == std::floor(p.color[c]);
  }
  const char* color_type = integral_colors ? "uchar" : "double";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot open file for writing");

  out << "ply\n"
      << (encoding == PlyEncoding::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property " << color_type << " red\n"
      << "property " << color_type << " green\n"
      << "property " << color_type << " blue\n"
      << "end_header\n";

  if (encoding == PlyEncoding::ascii) {
    char buf[32];
    for (const auto& p : cloud.points) {
      for (int c = 0; c < 3; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.position[c]);
        out << buf << ' ';
      }
      for (int c = 0; c < 3; ++c) {
        if (integral_colors) {
          out << static_cast<int>(p.color[c]);
        } else {
          std::snprintf(buf, sizeof(buf), "%.17g", p.color[c]);
          out << buf;
        }
        out << (c == 2 ? '\n' : ' ');
      }
    }
  } else {
    for (const auto& p : cloud.points) {
      out.write(reinterpret_cast<const char*>(p.position.data()), 3 * sizeof(double));
      if (integral_colors) {
        const std::uint8_t rgb[3] = {static_cast<std::uint8_t>(p.color[0]), static_cast<std::uint8_t>(p.color[1]),
                                     static_cast<std::uint8_t>(p.color[2])};
        out.write(reinterpret_cast<const char*>(rgb), 3);
      } else {
        out.write(reinterpret_cast<const char*>(p.color.data()), 3 * sizeof(double));
      }
    }
  }
  if (!out) throw InputError(path.string() + ": write failed");
}

}  // namespace tcdm
