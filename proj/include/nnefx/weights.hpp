#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "nnefx/ast.hpp"
#include "nnefx/tensor.hpp"

namespace nnefx {

using WeightStore = std::map<std::string, Tensor>;

namespace detail {

// Weight labels become file names; keep them inside the directory.
inline void check_label(const std::string& label) {
  if (label.empty()) throw Error(ErrorKind::IoError, "empty weight label");
  for (char c : label) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) throw Error(ErrorKind::IoError, "weight label '" + label + "' has illegal character");
  }
  if (label == "." || label == ".." || label.front() == '.')
    throw Error(ErrorKind::IoError, "weight label '" + label + "' not allowed");
}

inline void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

}  // namespace detail

// Binary tensor file: "NWT1", u32 LE rank, rank x u32 LE dims, then
// row-major little-endian float32 payload.
inline std::string encode_tensor(const Tensor& tensor) {
  std::string out = "NWT1";
  detail::put_u32(out, static_cast<uint32_t>(tensor.rank()));
  for (int64_t d : tensor.shape()) detail::put_u32(out, static_cast<uint32_t>(d));
  static_assert(sizeof(float) == 4);
  size_t payload = static_cast<size_t>(tensor.size()) * 4;
  size_t head = out.size();
  out.resize(head + payload);
  std::memcpy(out.data() + head, tensor.data(), payload);
  return out;
}

inline Tensor decode_tensor(const std::string& bytes, const std::string& origin) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorKind::ShapeMismatch, origin + ": " + why);
  };
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8 || bytes.compare(0, 4, "NWT1") != 0) throw fail("bad magic, expected NWT1");
  uint32_t rank = detail::get_u32(p + 4);
  if (rank > 8) throw fail("rank " + std::to_string(rank) + " out of range");
  if (bytes.size() < 8 + 4ull * rank) throw fail("truncated header");
  Shape shape;
  int64_t count = 1;
  for (uint32_t i = 0; i < rank; ++i) {
    uint32_t d = detail::get_u32(p + 8 + 4 * i);
    if (d == 0) throw fail("zero dimension");
    shape.push_back(static_cast<int64_t>(d));
    count *= d;
  }
  size_t expected = 8 + 4 * static_cast<size_t>(rank) + 4 * static_cast<size_t>(count);
  if (bytes.size() != expected)
    throw fail("payload holds " + std::to_string((bytes.size() - 8 - 4 * rank) / 4) +
               " floats, header needs " + std::to_string(count));
  std::vector<float> data(static_cast<size_t>(count));
  std::memcpy(data.data(), bytes.data() + 8 + 4 * rank, static_cast<size_t>(count) * 4);
  return Tensor(std::move(shape), std::move(data));
}

inline void write_tensor_file(const std::filesystem::path& path, const Tensor& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  std::string bytes = encode_tensor(tensor);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path.string());
}

inline Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingWeight, path.string() + " not readable");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes, path.string());
}

// Loads <label>.nwt for every `variable` declaration and shape-checks each
// file against the declared shape.
inline WeightStore load_weights(const std::filesystem::path& directory, const NnefProgram& program) {
  WeightStore store;
  for (const auto& instr : program.instructions) {
    if (instr.op != Op::Variable) continue;
    const std::string& label = instr.str_arg(1);
    detail::check_label(label);
    if (store.count(label)) continue;  // replicated declarations load once
    std::filesystem::path path = directory / (label + ".nwt");
    if (!std::filesystem::exists(path))
      throw Error(ErrorKind::MissingWeight, "no weight file for label '" + label + "' (" + path.string() + ")");
    Tensor tensor = read_tensor_file(path);
    const IntList& declared = instr.ints_arg(0);
    if (tensor.shape() != declared)
      throw Error(ErrorKind::ShapeMismatch,
                  "weight '" + label + "' declared " + shape_to_string(declared) +
                      " but file holds " + shape_to_string(tensor.shape()));
    store.emplace(label, std::move(tensor));
  }
  return store;
}

}  // namespace nnefx
