#include "natpert/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/harvest.hpp"
#include "natpert/version.hpp"

namespace natpert::manifest {

using ordered_json = nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open input for hashing: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    if (ctx) EVP_MD_CTX_free(ctx);
    raise(ErrorCode::Io, "sha256 init failed");
  }
  char buf[1 << 16];
  while (in.good()) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

RunManifest make_manifest(const std::string& command, const std::string& config_json,
                          std::uint64_t seed, const std::vector<std::string>& input_paths,
                          const std::string& started_at, const std::string& finished_at) {
  RunManifest m;
  m.command = command;
  m.config_json = config_json;
  m.seed = seed;
  for (const std::string& path : input_paths) m.input_digests[path] = sha256_file(path);
  m.tool_version = kVersion;
  m.started_at = started_at.empty() ? harvest::now_iso8601() : started_at;
  m.finished_at = finished_at.empty() ? harvest::now_iso8601() : finished_at;
  return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& out_file) {
  ordered_json j;
  j["command"] = m.command;
  if (!m.config_json.empty()) {
    try {
      j["config"] = ordered_json::parse(m.config_json);
    } catch (const std::exception&) {
      j["config"] = m.config_json;  // keep as string when not valid JSON
    }
  } else {
    j["config"] = ordered_json::object();
  }
  j["seed"] = m.seed;
  ordered_json inputs = ordered_json::object();
  for (const auto& [path, digest] : m.input_digests) inputs[path] = digest;
  j["inputs"] = std::move(inputs);
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write manifest: " + out_file.string());
  out << j.dump(2) << '\n';
}

}  // namespace natpert::manifest
