#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "safe/core/matrix.hpp"

namespace safe::backend {

// Tensor container layout:
//   u64 little-endian header length L
//   L bytes of JSON: {"dtype":"f32","order":"row-major","shape":[...]}
//   prod(shape) little-endian IEEE-754 float32 values
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> values;

  std::size_t element_count() const;
};

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

// Values are stored as f32; reading back yields the rounded values.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, std::span<const double> v);
Vector read_vector(const std::filesystem::path& path);

}  // namespace safe::backend
