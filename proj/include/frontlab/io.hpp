#pragma once

#include <map>
#include <string>
#include <vector>

#include "frontlab/grid.hpp"

namespace frontlab {

/// Tab-separated columnar text with a one-line header.
class TableWriter {
 public:
  TableWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  ~TableWriter();

 private:
  void* out_;
  size_t ncols_;
};

/// Full-precision decimal formatting (round-trips through stod).
std::string format_double(double v);

void write_key_values(const std::string& path,
                      const std::map<std::string, std::string>& kv,
                      const std::string& comment = "");
std::map<std::string, std::string> read_key_values(const std::string& path);

/// Per-snapshot columnar text: x then one column per component.
void write_snapshot_text(const std::string& path, const Field& f, double time);

/// Binary snapshot: 32-byte header (8-byte magic "FLSNAP01", u32 version,
/// u32 N, u32 components, u32 reserved, f64 time), then components * N
/// little-endian doubles.
void write_snapshot_binary(const std::string& path, const Field& f, double time);
Field read_snapshot_binary(const std::string& path, double& time);

}  // namespace frontlab
