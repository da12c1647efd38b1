#include "safe/sae/model.hpp"

#include <fstream>

#include "json.hpp"

#include "safe/backend/tensor_file.hpp"
#include "safe/core/error.hpp"
#include "safe/core/log.hpp"

namespace safe::sae {

SaeModel::SaeModel(Matrix w_enc, Vector b_enc, Matrix w_dec, Vector b_dec, Nonlinearity nonlinearity,
                   Vector jump_thresholds)
    : w_enc_(std::move(w_enc)),
      b_enc_(std::move(b_enc)),
      w_dec_(std::move(w_dec)),
      b_dec_(std::move(b_dec)),
      nonlinearity_(nonlinearity),
      jump_thresholds_(std::move(jump_thresholds)) {
  const std::size_t m = w_enc_.rows;
  const std::size_t n = w_enc_.cols;
  if (m == 0 || n == 0) throw DimensionError("SAE encoder is empty");
  if (w_enc_.data.size() != m * n || w_dec_.data.size() != w_dec_.rows * w_dec_.cols) {
    throw DimensionError("SAE matrix storage does not match its shape");
  }
  if (b_enc_.size() != m) throw DimensionError("b_enc must have M entries");
  if (w_dec_.rows != n || w_dec_.cols != m) throw DimensionError("W_dec must be [n x M]");
  if (b_dec_.size() != n) throw DimensionError("b_dec must have n entries");
  if (nonlinearity_ == Nonlinearity::jump_relu && jump_thresholds_.size() != m) {
    throw DimensionError("jump_relu needs one threshold per feature");
  }
  if (nonlinearity_ == Nonlinearity::relu && !jump_thresholds_.empty()) {
    throw Error("relu SAE must not carry jump thresholds");
  }
  if (m <= n) throw Error("SAE needs more features than input width (M > n)");
  if (m < 4 * n) {
    log_message(LogLevel::debug, "SAE has M=" + std::to_string(m) + " < 4n=" + std::to_string(4 * n));
  }
}

Vector pre_activation(const SaeModel& model, std::span<const double> x) {
  if (x.size() != model.input_width()) {
    throw DimensionError("SAE input width " + std::to_string(model.input_width()) + ", got " +
                         std::to_string(x.size()));
  }
  const Matrix& w = model.w_enc();
  Vector out(model.b_enc());
  for (std::size_t j = 0; j < w.rows; ++j) {
    const auto row = w.row(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * x[i];
    out[j] += acc;
  }
  return out;
}

Vector encode(const SaeModel& model, std::span<const double> x) {
  Vector f = pre_activation(model, x);
  if (model.nonlinearity() == Nonlinearity::relu) {
    for (double& v : f) v = v > 0.0 ? v : 0.0;
  } else {
    const Vector& theta = model.jump_thresholds();
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = f[j] > theta[j] ? f[j] : 0.0;
  }
  return f;
}

Vector decode(const SaeModel& model, std::span<const double> f) {
  if (f.size() != model.feature_count()) {
    throw DimensionError("SAE feature width " + std::to_string(model.feature_count()) + ", got " +
                         std::to_string(f.size()));
  }
  const Matrix& w = model.w_dec();
  Vector out(model.b_dec());
  for (std::size_t i = 0; i < w.rows; ++i) {
    const auto row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * f[j];
    out[i] += acc;
  }
  return out;
}

namespace {

std::filesystem::path sibling(const std::filesystem::path& manifest, const std::string& rel) {
  return manifest.parent_path() / rel;
}

}  // namespace

SaeModel SaeModel::load(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot open SAE manifest " + manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad SAE manifest " + manifest.string() + ": " + e.what());
  }
  try {
    const auto& t = j.at("tensors");
    const std::string nl = j.value("nonlinearity", "relu");
    Nonlinearity kind;
    if (nl == "relu") {
      kind = Nonlinearity::relu;
    } else if (nl == "jump_relu") {
      kind = Nonlinearity::jump_relu;
    } else {
      throw FormatError("unknown nonlinearity '" + nl + "' in " + manifest.string());
    }
    Matrix w_enc = backend::read_matrix(sibling(manifest, t.at("w_enc").get<std::string>()));
    Vector b_enc = backend::read_vector(sibling(manifest, t.at("b_enc").get<std::string>()));
    Matrix w_dec = backend::read_matrix(sibling(manifest, t.at("w_dec").get<std::string>()));
    Vector b_dec = backend::read_vector(sibling(manifest, t.at("b_dec").get<std::string>()));
    Vector theta;
    if (kind == Nonlinearity::jump_relu) theta = backend::read_vector(sibling(manifest, t.at("threshold").get<std::string>()));
    if (j.contains("d_in") && j["d_in"].get<std::size_t>() != w_enc.cols) {
      throw DimensionError("manifest d_in disagrees with W_enc");
    }
    if (j.contains("d_sae") && j["d_sae"].get<std::size_t>() != w_enc.rows) {
      throw DimensionError("manifest d_sae disagrees with W_enc");
    }
    return SaeModel(std::move(w_enc), std::move(b_enc), std::move(w_dec), std::move(b_dec), kind, std::move(theta));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad SAE manifest " + manifest.string() + ": " + e.what());
  }
}

void SaeModel::save(const std::filesystem::path& manifest) const {
  const std::string stem = manifest.stem().string();
  nlohmann::json tensors{{"w_enc", stem + ".w_enc.tensor"},
                         {"b_enc", stem + ".b_enc.tensor"},
                         {"w_dec", stem + ".w_dec.tensor"},
                         {"b_dec", stem + ".b_dec.tensor"}};
  backend::write_matrix(sibling(manifest, stem + ".w_enc.tensor"), w_enc_);
  backend::write_vector(sibling(manifest, stem + ".b_enc.tensor"), b_enc_);
  backend::write_matrix(sibling(manifest, stem + ".w_dec.tensor"), w_dec_);
  backend::write_vector(sibling(manifest, stem + ".b_dec.tensor"), b_dec_);
  if (nonlinearity_ == Nonlinearity::jump_relu) {
    tensors["threshold"] = stem + ".threshold.tensor";
    backend::write_vector(sibling(manifest, stem + ".threshold.tensor"), jump_thresholds_);
  }
  nlohmann::json j{{"format", "safe-sae-v1"},
                   {"d_in", input_width()},
                   {"d_sae", feature_count()},
                   {"nonlinearity", nonlinearity_ == Nonlinearity::relu ? "relu" : "jump_relu"},
                   {"tensors", tensors}};
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw Error("cannot write SAE manifest " + manifest.string());
  out << j.dump(2) << '\n';
}

}  // namespace safe::sae
