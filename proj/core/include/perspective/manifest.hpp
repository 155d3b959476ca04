#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace persp {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Reproducibility record of one run: content hashes of inputs and outputs,
/// the resolved configuration, tool version and seed. Timestamps are the
/// only run-dependent fields.
class Manifest {
 public:
  explicit Manifest(std::string command);

  // Paths are recorded relative to `base` when they live under it.
  void set_base(std::filesystem::path base) { base_ = std::move(base); }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  // Must be a JSON document.
  void set_config(std::string config_json) { config_ = std::move(config_json); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void fail(std::string stage, std::string message);

  bool failed() const noexcept { return failed_stage_.has_value(); }
  const std::vector<std::string>& outputs() const noexcept { return output_names_; }

  std::string to_json(bool with_timestamps = true) const;
  // Writes to a temporary sibling and renames it into place.
  void write(const std::filesystem::path& path) const;

 private:
  struct Entry {
    std::string path;
    std::string sha256;
  };

  std::string relative(const std::filesystem::path& path) const;

  std::string command_;
  std::string started_at_;
  std::optional<std::filesystem::path> base_;
  std::vector<Entry> inputs_;
  std::vector<Entry> outputs_;
  std::vector<std::string> output_names_;
  std::string config_ = "{}";
  std::optional<std::uint64_t> seed_;
  std::optional<std::string> failed_stage_;
  std::string failure_;
};

// ISO-8601 UTC, second resolution.
std::string utc_timestamp();

// Writes `contents` atomically (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace persp
