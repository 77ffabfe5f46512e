#include "coarse/io.hpp"

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ResourceError("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ResourceError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---- CSV tables

namespace {

constexpr std::string_view kMagic = "# coarse-lab";

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void check_cell(std::string_view cell) {
  if (cell.find_first_of(" ,\n\r") != std::string_view::npos)
    throw DomainError("CSV cell contains a separator: '" + std::string(cell) + "'");
}

}  // namespace

Table::Table(std::string kind, std::vector<std::string> cols) : columns(std::move(cols)) {
  meta["schema_version"] = std::to_string(kSchemaVersion);
  meta["kind"] = std::move(kind);
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw DomainError("row width does not match the header");
  for (const auto& c : cells) check_cell(c);
  rows.push_back(std::move(cells));
}

std::string Table::render() const {
  std::string out(kMagic);
  // schema_version and kind first, the rest in key order.
  out += " schema_version=" + meta.at("schema_version") + " kind=" + meta.at("kind");
  for (const auto& [k, v] : meta) {
    if (k == "schema_version" || k == "kind") continue;
    check_cell(k);
    check_cell(v);
    out += " " + k + "=" + v;
  }
  out += "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

Table Table::parse(std::string_view text) {
  std::vector<std::string> lines;
  for (auto& l : split(text, '\n'))
    if (!l.empty()) lines.push_back(std::move(l));
  if (lines.size() < 2 || !lines[0].starts_with(kMagic)) throw DomainError("not a coarse-lab CSV file");
  Table t;
  for (const auto& field : split(std::string_view(lines[0]).substr(kMagic.size()), ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw DomainError("bad metadata field '" + field + "'");
    t.meta[field.substr(0, eq)] = field.substr(eq + 1);
  }
  if (!t.meta.count("kind")) throw DomainError("CSV metadata lacks kind");
  if (t.meta["schema_version"] != std::to_string(kSchemaVersion))
    throw DomainError("unsupported schema_version '" + t.meta["schema_version"] + "'");
  t.columns = split(lines[1], ',');
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != t.columns.size()) throw DomainError("CSV row " + std::to_string(i + 1) + " has the wrong width");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw DomainError("missing column '" + std::string(name) + "'");
}

json load_document(const fs::path& path) {
  const auto text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw DomainError(path.string() + ": " + e.what());
    }
    check_schema(j, path.string());
    return j;
  }
  const auto t = Table::parse(text);
  json j;
  for (const auto& [k, v] : t.meta) j[k] = v;
  j["schema_version"] = kSchemaVersion;
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    j["rows"].push_back(std::move(r));
  }
  return j;
}

void check_schema(const json& j, std::string_view what) {
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw DomainError(std::string(what) + ": missing or unsupported schema_version");
  if (!j.contains("kind") || !j["kind"].is_string()) throw DomainError(std::string(what) + ": missing kind");
}

// ---- partitions and couples

json subset_keys(const FiniteSubset& s) {
  json out = json::array();
  const auto& g = s.ambient->group();
  for (Index i : s.members) out.push_back(g.format(s.ambient->element(i)));
  return out;
}

namespace {

std::vector<Index> indices_of(const Ball& b, const json& keys) {
  std::vector<Index> out;
  for (const auto& k : keys) {
    auto idx = b.find(b.group().parse(k.get<std::string>()));
    if (!idx) throw DomainError("element " + k.get<std::string>() + " lies outside the stored ambient radius");
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

json to_json(const Partition& p, const DecompositionReport& report) {
  const auto& g = p.ambient->group();
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "partition";
  j["group"] = g.name();
  j["method"] = p.method;
  j["ambient_radius"] = p.ambient->radius();
  j["window_radius"] = p.window_radius;
  j["scale"] = p.scale;
  j["colors"] = p.colors;
  j["K"] = to_string(p.stretch);
  j["pieces"] = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) j["pieces"].push_back(subset_keys(p.piece(i)));
  j["color"] = p.color;
  std::vector<bool> clipped(p.clipped.begin(), p.clipped.end());
  j["clipped"] = clipped;
  json v;
  v["valid"] = report.valid;
  v["invariants_ok"] = report.invariants_ok;
  v["max_piece_diameter"] = report.max_piece_diameter;
  v["diameter_exact"] = report.diameter_exact;
  v["min_same_color_gap"] = report.min_same_color_gap ? json(*report.min_same_color_gap) : json(nullptr);
  v["gap_exact"] = report.gap_exact;
  v["problem"] = report.problem;
  j["verification"] = v;
  return j;
}

Partition partition_from_json(const json& j, std::size_t cap) {
  check_schema(j, "partition");
  if (field<std::string>(j, "kind") != "partition") throw DomainError("not a partition document");
  const auto g = GroupModel::from_name(field<std::string>(j, "group"));
  Partition p;
  p.ambient = Ball::build(g, field<int>(j, "ambient_radius"), cap);
  p.method = field<std::string>(j, "method");
  p.window_radius = field<int>(j, "window_radius");
  p.scale = field<int>(j, "scale");
  p.colors = field<int>(j, "colors");
  p.stretch = parse_rational(field<std::string>(j, "K"));
  for (const auto& piece : field<json>(j, "pieces")) p.pieces.push_back(indices_of(*p.ambient, piece));
  p.color = field<std::vector<int>>(j, "color");
  for (bool c : field<std::vector<bool>>(j, "clipped")) p.clipped.push_back(c ? 1 : 0);
  if (p.color.size() != p.pieces.size() || p.clipped.size() != p.pieces.size())
    throw DomainError("partition arrays disagree in length");
  return p;
}

json to_json(const FolnerCouple& c) {
  json j;
  j["n"] = c.n;
  j["C"] = to_string(c.C);
  j["F_prime"] = subset_keys(c.f_prime);
  j["F"] = subset_keys(c.f);
  j["ratio"] = to_string(c.ratio);
  j["diam_F"] = c.diam_f.value;
  j["diam_F_exact"] = c.diam_f.exact;
  j["diam_F_prime"] = c.diam_piece.value;
  j["diam_F_prime_exact"] = c.diam_piece.exact;
  j["bound"] = to_string(c.claimed_bound);
  j["observed_bound"] = c.observed_bound;
  j["piece"] = c.piece;
  j["color"] = c.color;
  return j;
}

FolnerCouple couple_from_json(const json& j, std::size_t cap) {
  check_schema(j, "couple");
  const auto g = GroupModel::from_name(field<std::string>(j, "group"));
  auto ambient = Ball::build(g, field<int>(j, "ambient_radius"), cap);
  const auto& c = field<json>(j, "couple");
  FolnerCouple out;
  out.f_prime = FiniteSubset::of(ambient, indices_of(*ambient, field<json>(c, "F_prime")));
  out.f = FiniteSubset::of(ambient, indices_of(*ambient, field<json>(c, "F")));
  out.n = field<int>(c, "n");
  out.C = parse_rational(field<std::string>(c, "C"));
  out.ratio = parse_rational(field<std::string>(c, "ratio"));
  out.diam_f = {field<int>(c, "diam_F"), field<bool>(c, "diam_F_exact")};
  out.diam_piece = {field<int>(c, "diam_F_prime"), field<bool>(c, "diam_F_prime_exact")};
  out.claimed_bound = parse_rational(field<std::string>(c, "bound"));
  out.observed_bound = field<int>(c, "observed_bound");
  out.piece = field<std::size_t>(c, "piece");
  out.color = field<int>(c, "color");
  return out;
}

}  // namespace coarse
