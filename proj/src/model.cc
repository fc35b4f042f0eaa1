#include "csviu/model.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "csviu/errors.h"

namespace csviu {
namespace {

using nlohmann::json;

// Python's json module emits bare NaN / Infinity tokens. Quote them so the
// strict parser accepts the document and validation can report the field.
std::string quote_nonfinite_tokens(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    bool replaced = false;
    for (std::string_view token : {"-Infinity", "Infinity", "NaN"}) {
      if (text.substr(i, token.size()) == token) {
        out += '"';
        out += token;
        out += '"';
        i += token.size() - 1;
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(c);
  }
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(quote_nonfinite_tokens(text));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file does not parse as JSON: ") +
                          e.what());
  }
}

double number_from(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  throw ValidationError("field '" + field + "' contains a non-numeric entry");
}

Matrix matrix_from(const json& v, const std::string& field) {
  if (v.is_number() || v.is_string()) {
    Matrix out(1, 1);
    out(0, 0) = number_from(v, field);
    return out;
  }
  if (!v.is_array() || v.empty()) {
    throw ValidationError("field '" + field +
                          "' must be a number or a non-empty array");
  }
  if (!v.front().is_array()) {
    Matrix out(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) {
      out(0, static_cast<Eigen::Index>(j)) = number_from(v[j], field);
    }
    return out;
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v.front().size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      throw ValidationError("field '" + field + "' is a ragged array");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number_from(v[i][j], field);
    }
  }
  return out;
}

void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                   const char* field) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream msg;
    msg << "dimension mismatch in '" << field << "': expected " << rows << "x"
        << cols << ", got " << M.rows() << "x" << M.cols();
    throw ValidationError(msg.str());
  }
}

void require_finite(const Matrix& M, const char* field) {
  if (!M.allFinite()) {
    throw ValidationError(std::string("non-finite entry in '") + field + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

SystemModel SystemModel::deterministic(Matrix A, Matrix B, Matrix C, Matrix D) {
  SystemModel model;
  const auto n = A.rows();
  const auto m = B.cols();
  model.A = std::move(A);
  model.B = std::move(B);
  model.C = std::move(C);
  model.D = std::move(D);
  model.sigma = Matrix::Zero(n, 1);
  model.sigma_x = Matrix::Zero(n, n);
  model.sigma_bar_x = Matrix::Zero(n, n);
  model.sigma_u = Matrix::Zero(n, m);
  model.sigma_bar_u = Matrix::Zero(n, m);
  return model;
}

void validate(const SystemModel& model) {
  const auto n = model.A.rows();
  const auto m = model.B.cols();
  const auto p = model.C.rows();
  if (n == 0) throw ValidationError("field 'A' is empty");
  if (m == 0) throw ValidationError("field 'B' has no columns");
  if (p == 0) throw ValidationError("field 'C' has no rows");
  if (model.sigma.cols() == 0) throw ValidationError("field 'sigma' is empty");
  require_shape(model.A, n, n, "A");
  require_shape(model.B, n, m, "B");
  require_shape(model.C, p, n, "C");
  require_shape(model.D, p, m, "D");
  require_shape(model.sigma, n, model.sigma.cols(), "sigma");
  require_shape(model.sigma_x, n, n, "sigma_x");
  require_shape(model.sigma_bar_x, n, n, "sigma_bar_x");
  require_shape(model.sigma_u, n, m, "sigma_u");
  require_shape(model.sigma_bar_u, n, m, "sigma_bar_u");
  require_finite(model.A, "A");
  require_finite(model.B, "B");
  require_finite(model.C, "C");
  require_finite(model.D, "D");
  require_finite(model.sigma, "sigma");
  require_finite(model.sigma_x, "sigma_x");
  require_finite(model.sigma_bar_x, "sigma_bar_x");
  require_finite(model.sigma_u, "sigma_u");
  require_finite(model.sigma_bar_u, "sigma_bar_u");
}

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian:
      return "gaussian";
    case NoiseKind::rademacher:
      return "rademacher";
    case NoiseKind::uniform:
      return "uniform";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "rademacher") return NoiseKind::rademacher;
  if (name == "uniform" || name == "uniform-scaled") return NoiseKind::uniform;
  throw ValidationError("unknown noise kind '" + std::string(name) + "'");
}

void validate(const CriterionConfig& config) {
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) {
    throw ValidationError("criterion alpha must be positive");
  }
  if (config.horizon_kappa && *config.horizon_kappa < 0) {
    throw ValidationError("criterion kappa must be nonnegative");
  }
  if (config.paths <= 0) throw ValidationError("criterion paths must be >= 1");
  if (!(config.tol_fixed_point > 0.0) || !(config.tol_sor > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  if (config.max_iters <= 0) {
    throw ValidationError("max_iters must be positive");
  }
  if (!(config.sor_omega > 0.0 && config.sor_omega < 2.0)) {
    throw ValidationError("relaxation omega must lie in (0, 2)");
  }
}

SystemModel parse_model(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw ValidationError("model file must be an object");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!doc.contains(key)) {
      throw ValidationError(std::string("missing required field '") + key +
                            "'");
    }
  }
  SystemModel model;
  model.A = matrix_from(doc["A"], "A");
  model.B = matrix_from(doc["B"], "B");
  model.C = matrix_from(doc["C"], "C");
  model.D = matrix_from(doc["D"], "D");
  const auto n = model.A.rows();
  const auto m = model.B.cols();
  auto optional_matrix = [&](const char* key, Eigen::Index rows,
                             Eigen::Index cols) {
    return doc.contains(key) ? matrix_from(doc[key], key)
                             : Matrix(Matrix::Zero(rows, cols));
  };
  model.sigma = optional_matrix("sigma", n, n);
  model.sigma_x = optional_matrix("sigma_x", n, n);
  model.sigma_bar_x = optional_matrix("sigma_bar_x", n, n);
  model.sigma_u = optional_matrix("sigma_u", n, m);
  model.sigma_bar_u = optional_matrix("sigma_bar_u", n, m);
  validate(model);
  return model;
}

SystemModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path));
}

CriterionConfig parse_criterion(std::string_view json_text) {
  const json doc = parse_json(json_text);
  CriterionConfig config;
  if (!doc.is_object() || !doc.contains("criterion")) return config;
  const json& c = doc["criterion"];
  if (!c.is_object()) throw ValidationError("'criterion' must be an object");
  try {
    if (c.contains("alpha")) config.alpha = c["alpha"].get<double>();
    if (c.contains("kappa")) {
      const json& k = c["kappa"];
      if (k.is_string() && k.get<std::string>() == "infinite") {
        config.horizon_kappa.reset();
      } else {
        config.horizon_kappa = k.get<int>();
      }
    }
    if (c.contains("paths")) config.paths = c["paths"].get<int>();
    if (c.contains("seed")) config.seed = c["seed"].get<std::uint64_t>();
    if (c.contains("omega")) config.sor_omega = c["omega"].get<double>();
    if (c.contains("max_iters")) config.max_iters = c["max_iters"].get<int>();
    if (c.contains("noise")) {
      config.noise = noise_kind_from_string(c["noise"].get<std::string>());
    }
    if (c.contains("tolerances")) {
      const json& t = c["tolerances"];
      if (t.contains("fixed_point")) {
        config.tol_fixed_point = t["fixed_point"].get<double>();
      }
      if (t.contains("sor")) config.tol_sor = t["sor"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed 'criterion' object: ") +
                          e.what());
  }
  validate(config);
  return config;
}

CriterionConfig load_criterion(const std::filesystem::path& path) {
  return parse_criterion(read_file(path));
}

SignVector sign_vector(const Vector& x) {
  SignVector s(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s[i] = (x[i] > 0.0) - (x[i] < 0.0);
  }
  return s;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no:
      return "no";
    case Verdict::yes:
      return "yes";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

Verdict strictly_less(double value, double bound, double margin) {
  if (!std::isfinite(value)) return Verdict::no;
  if (value < bound - margin) return Verdict::yes;
  if (value > bound + margin) return Verdict::no;
  return Verdict::indeterminate;
}

}  // namespace csviu
