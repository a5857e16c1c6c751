#include "mwshape/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s, const std::filesystem::path& path) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw std::runtime_error(path.string() + ": not a number '" + s + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ContractError("table has no column '" + name + "'");
}

void write_table(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "\t" : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ContractError("write_table: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty table");
  t.columns = split_tabs(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != t.columns.size())
      throw std::runtime_error(path.string() + ": row width differs from header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, path));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_map(const std::filesystem::path& path, const Map2D& map) {
  if (map.values.size() != map.row_axis.size() * map.column_axis.size())
    throw ContractError("write_map: value count does not match axes");
  auto out = open_out(path);
  out << map.row_label << '\\' << map.column_label;
  for (double c : map.column_axis) out << '\t' << format_number(c);
  out << '\n';
  for (std::size_t r = 0; r < map.row_axis.size(); ++r) {
    out << format_number(map.row_axis[r]);
    for (std::size_t c = 0; c < map.column_axis.size(); ++c) out << '\t' << format_number(map.at(r, c));
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Map2D read_map(const std::filesystem::path& path) {
  auto in = open_in(path);
  Map2D m;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty map");
  auto head = split_tabs(line);
  const auto slash = head[0].find('\\');
  if (slash == std::string::npos) throw std::runtime_error(path.string() + ": malformed map header");
  m.row_label = head[0].substr(0, slash);
  m.column_label = head[0].substr(slash + 1);
  for (std::size_t i = 1; i < head.size(); ++i) m.column_axis.push_back(parse_number(head[i], path));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != m.column_axis.size() + 1)
      throw std::runtime_error(path.string() + ": map row width differs from header");
    m.row_axis.push_back(parse_number(cells[0], path));
    for (std::size_t i = 1; i < cells.size(); ++i) m.values.push_back(parse_number(cells[i], path));
  }
  return m;
}

std::string sha256_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest initialisation failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace mwshape
