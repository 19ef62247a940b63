// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/npy.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "semvid/errors.hpp"

namespace semvid {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string header_field(const std::string& header, const std::string& key,
                         const std::string& path) {
  std::string needle = "'" + key + "'";
  std::size_t pos = header.find(needle);
  if (pos == std::string::npos) {
    throw IoError(path + ": npy header missing field '" + key + "'");
  }
  pos = header.find(':', pos + needle.size());
  if (pos == std::string::npos) {
    throw IoError(path + ": npy header field '" + key + "' has no value");
  }
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (pos < header.size() && header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string::npos) {
      throw IoError(path + ": npy header field '" + key + "' unterminated");
    }
    return header.substr(pos + 1, end - pos - 1);
  }
  if (pos < header.size() && header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) {
      throw IoError(path + ": npy header field '" + key + "' unterminated");
    }
    return header.substr(pos, end - pos + 1);
  }
  while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  std::string value = header.substr(pos, end - pos);
  while (!value.empty() && value.back() == ' ') value.pop_back();
  return value;
}

std::vector<std::size_t> parse_shape(const std::string& tuple,
                                     const std::string& path) {
  std::vector<std::size_t> shape;
  std::string inner = tuple.substr(1, tuple.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t start = item.find_first_not_of(' ');
    if (start == std::string::npos) continue;  // trailing comma in 1-tuples
    std::size_t stop = item.find_last_not_of(' ');
    item = item.substr(start, stop - start + 1);
    if (item.empty()) continue;
    for (char c : item) {
      if (c < '0' || c > '9') {
        throw IoError(path + ": npy header field 'shape' has non-integer '" +
                      item + "'");
      }
    }
    shape.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  return shape;
}

}  // namespace

NpyArray read_npy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");

  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) {
    throw IoError(path + ": not an npy file (bad magic)");
  }
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  if (!in) throw IoError(path + ": truncated npy version field");
  if (version[0] != 1 || version[1] != 0) {
    throw IoError(path + ": unsupported npy version " +
                  std::to_string(version[0]) + "." + std::to_string(version[1]) +
                  " (need 1.0)");
  }
  unsigned char len_bytes[2];
  in.read(reinterpret_cast<char*>(len_bytes), 2);
  if (!in) throw IoError(path + ": truncated npy header length");
  std::size_t header_len = static_cast<std::size_t>(len_bytes[0]) |
                           (static_cast<std::size_t>(len_bytes[1]) << 8);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError(path + ": truncated npy header");

  std::string descr = header_field(header, "descr", path);
  if (descr != "<f4") {
    throw IoError(path + ": npy header field 'descr' is '" + descr +
                  "' (only '<f4' is supported)");
  }
  std::string order = header_field(header, "fortran_order", path);
  if (order != "False") {
    throw IoError(path + ": npy header field 'fortran_order' is '" + order +
                  "' (only C order is supported)");
  }
  std::string shape_str = header_field(header, "shape", path);
  if (shape_str.size() < 2 || shape_str.front() != '(' || shape_str.back() != ')') {
    throw IoError(path + ": npy header field 'shape' is malformed: " + shape_str);
  }

  NpyArray out;
  out.shape = parse_shape(shape_str, path);
  std::size_t count = out.size();
  out.data.resize(count);
  in.read(reinterpret_cast<char*>(out.data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw IoError(path + ": npy payload shorter than shape implies (" +
                  std::to_string(in.gcount()) + " of " +
                  std::to_string(count * sizeof(float)) + " bytes)");
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw IoError(path + ": npy payload longer than shape implies");
  }
  return out;
}

void write_npy(const std::string& path, const std::vector<std::size_t>& shape,
               const std::vector<float>& data) {
  std::size_t count = 1;
  for (std::size_t s : shape) count *= s;
  if (count != data.size()) {
    throw ValidationError("write_npy: shape implies " + std::to_string(count) +
                          " elements, got " + std::to_string(data.size()));
  }

  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
    if (i + 1 < shape.size()) dict += " ";
  }
  dict += "), }";
  // Pad so that magic + version + length field + header is a multiple of 64.
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t padded = (unpadded + 63) / 64 * 64;
  dict.append(padded - unpadded, ' ');
  dict += '\n';

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(kMagic, 6);
  unsigned char version[2] = {1, 0};
  out.write(reinterpret_cast<const char*>(version), 2);
  std::size_t header_len = dict.size();
  unsigned char len_bytes[2] = {static_cast<unsigned char>(header_len & 0xff),
                                static_cast<unsigned char>(header_len >> 8)};
  out.write(reinterpret_cast<const char*>(len_bytes), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw IoError(path + ": write failed");
}

Matrix as_matrix(const NpyArray& a, const std::string& what) {
  if (a.shape.size() != 2) {
    throw IoError(what + ": expected rank-2 array, got rank " +
                  std::to_string(a.shape.size()));
  }
  Matrix m;
  m.rows = a.shape[0];
  m.cols = a.shape[1];
  m.data = a.data;
  return m;
}

Tensor3 as_tensor3(const NpyArray& a, const std::string& what) {
  if (a.shape.size() != 3) {
    throw IoError(what + ": expected rank-3 array, got rank " +
                  std::to_string(a.shape.size()));
  }
  Tensor3 t;
  t.frames = a.shape[0];
  t.patches = a.shape[1];
  t.dim = a.shape[2];
  t.data = a.data;
  return t;
}

void write_npy(const std::string& path, const Matrix& m) {
  write_npy(path, {m.rows, m.cols}, m.data);
}

void write_npy(const std::string& path, const Tensor3& t) {
  write_npy(path, {t.frames, t.patches, t.dim}, t.data);
}

}  // namespace semvid
