#include "frontlab/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace frontlab {

std::string format_double(double v) {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TableWriter::TableWriter(const std::string& path, const std::vector<std::string>& columns)
    : ncols_(columns.size()) {
  auto* f = new std::ofstream(path);
  if (!*f) throw std::runtime_error("cannot open output file: " + path);
  out_ = f;
  for (size_t i = 0; i < columns.size(); ++i)
    (*f) << columns[i] << (i + 1 < columns.size() ? "\t" : "\n");
}

void TableWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw std::invalid_argument("table row width mismatch");
  auto* f = static_cast<std::ofstream*>(out_);
  for (size_t i = 0; i < values.size(); ++i)
    (*f) << format_double(values[i]) << (i + 1 < values.size() ? "\t" : "\n");
}

TableWriter::~TableWriter() { delete static_cast<std::ofstream*>(out_); }

void write_key_values(const std::string& path, const std::map<std::string, std::string>& kv,
                      const std::string& comment) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  if (!comment.empty()) f << "# " << comment << "\n";
  for (const auto& [k, v] : kv) f << k << "=" << v << "\n";
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    kv[line.substr(b, eq - b)] = line.substr(eq + 1, e - eq);
  }
  return kv;
}

void write_snapshot_text(const std::string& path, const Field& f, double time) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "# t=" << format_double(time) << "\n";
  out << "x";
  for (int c = 0; c < f.components(); ++c) out << "\tc" << c;
  out << "\n";
  for (int j = 0; j < f.size(); ++j) {
    out << format_double(f.grid.x(j));
    for (int c = 0; c < f.components(); ++c) out << "\t" << format_double(f[c][j]);
    out << "\n";
  }
}

namespace {
constexpr char kMagic[8] = {'F', 'L', 'S', 'N', 'A', 'P', '0', '1'};
}

void write_snapshot_binary(const std::string& path, const Field& f, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  const uint32_t version = 1, n = f.size(), ncomp = f.components(), reserved = 0;
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&ncomp), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(&time), 8);
  for (int c = 0; c < f.components(); ++c)
    out.write(reinterpret_cast<const char*>(f[c].data()), sizeof(double) * n);
  // grid descriptor trails the payload so the snapshot is self-contained
  const double half_length = f.grid.half_length;
  out.write(reinterpret_cast<const char*>(&half_length), 8);
}

Field read_snapshot_binary(const std::string& path, double& time) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("corrupt snapshot (bad magic): " + path);
  uint32_t version, n, ncomp, reserved;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&ncomp), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  in.read(reinterpret_cast<char*>(&time), 8);
  if (!in || version != 1 || n == 0 || ncomp == 0 || ncomp > 8)
    throw std::runtime_error("corrupt snapshot (bad header): " + path);
  GridSpec g;
  g.points = static_cast<int>(n);
  Field f(g, static_cast<int>(ncomp));
  for (uint32_t c = 0; c < ncomp; ++c) {
    in.read(reinterpret_cast<char*>(f[c].data()), sizeof(double) * n);
    if (!in) throw std::runtime_error("corrupt snapshot (truncated payload): " + path);
  }
  double half_length = 0.0;
  in.read(reinterpret_cast<char*>(&half_length), 8);
  if (in && half_length > 0.0) f.grid.half_length = half_length;
  return f;
}

}  // namespace frontlab
