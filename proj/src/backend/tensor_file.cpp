#include "safe/backend/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include "json.hpp"

#include "safe/core/error.hpp"

namespace safe::backend {
namespace {

constexpr std::uint64_t kMaxHeaderBytes = 1 << 20;

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

}  // namespace

std::size_t Tensor::element_count() const {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (tensor.values.size() != tensor.element_count()) {
    throw Error("tensor shape does not match its value count");
  }
  const std::string header = nlohmann::json{{"dtype", "f32"}, {"order", "row-major"}, {"shape", tensor.shape}}.dump();
  std::string blob;
  blob.reserve(8 + header.size() + 4 * tensor.values.size());
  const std::uint64_t len = header.size();
  for (int i = 0; i < 8; ++i) blob.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
  blob += header;
  for (float f : tensor.values) put_u32_le(blob, std::bit_cast<std::uint32_t>(f));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write tensor file " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error("short write to tensor file " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open tensor file " + path.string());
  unsigned char len_bytes[8];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 8)) throw FormatError("tensor file truncated: " + path.string());
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= std::uint64_t{len_bytes[i]} << (8 * i);
  if (len == 0 || len > kMaxHeaderBytes) throw FormatError("tensor header length out of range: " + path.string());

  std::string header(len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(len))) {
    throw FormatError("tensor header truncated: " + path.string());
  }
  Tensor t;
  try {
    const auto j = nlohmann::json::parse(header);
    if (j.at("dtype").get<std::string>() != "f32") throw FormatError("unsupported tensor dtype in " + path.string());
    if (j.contains("order") && j["order"].get<std::string>() != "row-major") {
      throw FormatError("unsupported tensor order in " + path.string());
    }
    t.shape = j.at("shape").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad tensor header in " + path.string() + ": " + e.what());
  }

  const std::size_t count = t.element_count();
  std::string payload(4 * count, '\0');
  if (!in.read(payload.data(), static_cast<std::streamsize>(payload.size()))) {
    throw FormatError("tensor payload truncated: " + path.string());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in tensor file " + path.string());
  t.values.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < count; ++i) t.values[i] = std::bit_cast<float>(get_u32_le(p + 4 * i));
  return t;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  Tensor t{{m.rows, m.cols}, {}};
  t.values.assign(m.data.begin(), m.data.end());
  write_tensor(path, t);
}

Matrix read_matrix(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (t.shape.size() != 2) throw FormatError("expected a 2-d tensor in " + path.string());
  Matrix m(t.shape[0], t.shape[1]);
  std::copy(t.values.begin(), t.values.end(), m.data.begin());
  return m;
}

void write_vector(const std::filesystem::path& path, std::span<const double> v) {
  Tensor t{{v.size()}, {}};
  t.values.assign(v.begin(), v.end());
  write_tensor(path, t);
}

Vector read_vector(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (t.shape.size() != 1) throw FormatError("expected a 1-d tensor in " + path.string());
  return Vector(t.values.begin(), t.values.end());
}

}  // namespace safe::backend
