#pragma once

// Layout: u64 little-endian header length, UTF-8 JSON header, then the raw
// little-endian f64 values of every parameter in header order.
//   {"format": "gcan-checkpoint", "version": 1, "meta": {...},
//    "params": [{"name", "shape", "offset", "count"}, ...]}
// offset/count are in doubles from the start of the data section.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "gcan/train/params.hpp"

namespace gcan {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline void save_checkpoint(const ParamStore& store, const std::string& path, const nlohmann::json& meta = {}) {
  nlohmann::json header = {{"format", "gcan-checkpoint"}, {"version", 1}, {"meta", meta}};
  header["params"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& p : store) {
    header["params"].push_back({{"name", p.name}, {"shape", p.shape}, {"offset", offset}, {"count", p.size()}});
    offset += p.size();
  }
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : store) {
    out.write(reinterpret_cast<const char*>(p.value.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

inline nlohmann::json read_checkpoint_header(std::ifstream& in, const std::string& path) {
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1u << 30)) throw Error(ErrorCode::parse_error, path + ": bad checkpoint header");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw Error(ErrorCode::parse_error, path + ": truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
  if (header.value("format", std::string()) != "gcan-checkpoint") {
    throw Error(ErrorCode::parse_error, path + ": not a checkpoint");
  }
  return header;
}

/// Loads values into an already-built store; names and shapes must match.
/// Returns the stored meta object.
inline nlohmann::json load_checkpoint(ParamStore& store, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  const nlohmann::json header = read_checkpoint_header(in, path);
  const auto& params = header.at("params");
  if (params.size() != store.size()) {
    throw Error(ErrorCode::shape_mismatch, path + ": checkpoint has " + std::to_string(params.size()) +
                                               " buffers, model has " + std::to_string(store.size()));
  }
  std::size_t k = 0;
  for (auto& p : store) {
    const auto& h = params[k++];
    if (h.at("name").get<std::string>() != p.name || h.at("shape").get<std::vector<std::size_t>>() != p.shape) {
      throw Error(ErrorCode::shape_mismatch, path + ": buffer " + h.at("name").get<std::string>() + " does not match " + p.name);
    }
    in.read(reinterpret_cast<char*>(p.value.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    if (!in) throw Error(ErrorCode::parse_error, path + ": truncated data for " + p.name);
  }
  return header.value("meta", nlohmann::json::object());
}

/// Header only, e.g. to rebuild the model a checkpoint came from.
inline nlohmann::json checkpoint_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  return read_checkpoint_header(in, path).value("meta", nlohmann::json::object());
}

}  // namespace gcan
