#include "perspective/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "perspective/error.hpp"
#include "perspective/version.hpp"

namespace persp {
namespace {

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error("sha256 final failed");
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out.push_back(kDigits[md[i] >> 4]);
      out.push_back(kDigits[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for hashing");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

Manifest::Manifest(std::string command) : command_(std::move(command)), started_at_(utc_timestamp()) {}

std::string Manifest::relative(const std::filesystem::path& path) const {
  if (base_) {
    auto rel = path.lexically_relative(*base_);
    if (!rel.empty() && rel.native().rfind("..", 0) != 0) return rel.generic_string();
  }
  return path.generic_string();
}

void Manifest::add_input(const std::filesystem::path& path) { inputs_.push_back({relative(path), sha256_file(path)}); }

void Manifest::add_output(const std::filesystem::path& path) {
  outputs_.push_back({relative(path), sha256_file(path)});
  output_names_.push_back(outputs_.back().path);
}

void Manifest::fail(std::string stage, std::string message) {
  failed_stage_ = std::move(stage);
  failure_ = std::move(message);
}

std::string Manifest::to_json(bool with_timestamps) const {
  using nlohmann::json;
  auto entries = [](const std::vector<Entry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back(json{{"path", e.path}, {"sha256", e.sha256}});
    return a;
  };
  json j{{"tool", "perspective"},
         {"version", PERSPECTIVE_VERSION},
         {"command", command_},
         {"status", failed_stage_ ? "FAILED" : "OK"},
         {"config", json::parse(config_)},
         {"seed", seed_ ? json(*seed_) : json(nullptr)},
         {"inputs", entries(inputs_)},
         {"outputs", entries(outputs_)}};
  if (failed_stage_) j["failure"] = json{{"stage", *failed_stage_}, {"message", failure_}};
  if (with_timestamps) {
    j["started_at"] = started_at_;
    j["finished_at"] = utc_timestamp();
  }
  return j.dump(2) + "\n";
}

void Manifest::write(const std::filesystem::path& path) const { write_file_atomic(path, to_json()); }

}  // namespace persp
