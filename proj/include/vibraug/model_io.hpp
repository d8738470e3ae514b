#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vibraug/chemio.hpp"
#include "vibraug/error.hpp"
#include "vibraug/featurize.hpp"
#include "vibraug/fileio.hpp"
#include "vibraug/forest.hpp"
#include "vibraug/gbr.hpp"
#include "vibraug/neuralnet.hpp"
#include "vibraug/svr.hpp"
#include "vibraug/tree.hpp"

// Text persistence for trained models. One self-contained file carries the
// model parameters, the feature scaler they were trained behind, and the
// target normalization, so evaluation needs nothing but the file and a test
// set. Numbers are written with enough digits to round-trip exactly.

namespace vibraug::model_io {

struct SavedModel {
  std::string kind;    // dnn | rf | gbr | svr
  std::string target;  // label column the model predicts
  int feature_dim = 0;
  long train_size = 0;
  double target_min = 0.0;  // normalization applied to the target during
  double target_max = 1.0;  // training; identity when (0, 1)
  featurize::Scaler scaler;
  std::variant<neuralnet::MlpModel, forest::ForestModel, gbr::GbrModel, svr::SvrModel>
      model;
};

namespace detail {

using chemio::detail::format_value;
using chemio::detail::parse_int;
using chemio::detail::parse_real;
using chemio::detail::split_lines;
using chemio::detail::tokens;

inline void write_tree(std::string& out, const tree::Tree& t) {
  out += "tree " + std::to_string(t.nodes.size()) + "\n";
  for (const auto& nd : t.nodes) {
    out += std::to_string(nd.feature);
    out += ' ';
    out += format_value(nd.threshold);
    out += ' ';
    out += std::to_string(nd.left);
    out += ' ';
    out += std::to_string(nd.right);
    out += ' ';
    out += format_value(nd.value);
    out += '\n';
  }
}

inline void write_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_value(m(r, c));
    }
    out += '\n';
  }
}

inline void write_vector(std::string& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_value(v[i]);
  }
  out += '\n';
}

struct Cursor {
  std::vector<chemio::detail::Line> lines;
  std::size_t at = 0;

  explicit Cursor(std::string_view text) : lines(split_lines(text)) {}

  bool done() const { return at >= lines.size(); }

  const chemio::detail::Line& next(const char* what) {
    if (done()) throw ParseError(std::string("unexpected end of model file, expected ") + what,
                                 lines.empty() ? 1 : lines.back().number);
    return lines[at++];
  }

  std::vector<std::string_view> fields(const char* what, std::size_t count) {
    const auto& ln = next(what);
    auto tk = tokens(ln.text);
    if (tk.size() != count)
      throw ParseError(std::string("malformed ") + what + " at line " +
                           std::to_string(ln.number),
                       ln.number);
    return tk;
  }

  std::vector<std::string_view> keyed(const char* key, std::size_t extra) {
    auto tk = fields(key, extra + 1);
    if (tk[0] != key)
      throw ParseError(std::string("expected '") + key + "' at line " +
                           std::to_string(lines[at - 1].number),
                       lines[at - 1].number);
    tk.erase(tk.begin());
    return tk;
  }

  long line() const { return at == 0 ? 1 : lines[at - 1].number; }
};

inline tree::Tree read_tree(Cursor& cur) {
  auto head = cur.keyed("tree", 1);
  const long count = parse_int(head[0], cur.line(), "node count");
  if (count < 1) throw ParseError("tree must have at least one node", cur.line());
  tree::Tree t;
  t.nodes.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    auto tk = cur.fields("tree node", 5);
    tree::TreeNode nd;
    nd.feature = static_cast<int>(parse_int(tk[0], cur.line(), "node feature"));
    nd.threshold = parse_real(tk[1], cur.line(), "node threshold");
    nd.left = static_cast<int>(parse_int(tk[2], cur.line(), "node left"));
    nd.right = static_cast<int>(parse_int(tk[3], cur.line(), "node right"));
    nd.value = parse_real(tk[4], cur.line(), "node value");
    if (nd.feature >= 0 && (nd.left < 0 || nd.right < 0 || nd.left >= count || nd.right >= count))
      throw ParseError("split node with invalid children at line " +
                           std::to_string(cur.line()),
                       cur.line());
    t.nodes.push_back(nd);
  }
  return t;
}

inline Eigen::MatrixXd read_matrix(Cursor& cur, Eigen::Index rows, Eigen::Index cols,
                                   const char* what) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    auto tk = cur.fields(what, static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = parse_real(tk[static_cast<std::size_t>(c)], cur.line(), what);
  }
  return m;
}

inline Eigen::VectorXd read_vector(Cursor& cur, Eigen::Index size, const char* what) {
  auto tk = cur.fields(what, static_cast<std::size_t>(size));
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i)
    v[i] = parse_real(tk[static_cast<std::size_t>(i)], cur.line(), what);
  return v;
}

}  // namespace detail

inline std::string serialize_model(const SavedModel& m) {
  using detail::format_value;
  std::string out = "vibraug-model 1\n";
  out += "kind " + m.kind + "\n";
  out += "target " + m.target + "\n";
  out += "feature_dim " + std::to_string(m.feature_dim) + "\n";
  out += "train_size " + std::to_string(m.train_size) + "\n";
  out += "target_scale " + format_value(m.target_min) + " " + format_value(m.target_max) +
         "\n";
  out += "scaler\n";
  out += m.scaler.serialize();
  out += "body\n";

  if (const auto* dnn = std::get_if<neuralnet::MlpModel>(&m.model)) {
    out += "dims " + std::to_string(dnn->dims.size());
    for (int d : dnn->dims) out += " " + std::to_string(d);
    out += "\n";
    for (int l = 0; l < dnn->layers(); ++l) {
      const auto lu = static_cast<std::size_t>(l);
      out += "layer " + std::to_string(l) + "\n";
      detail::write_matrix(out, dnn->weights[lu]);
      detail::write_vector(out, dnn->biases[lu]);
    }
  } else if (const auto* rf = std::get_if<forest::ForestModel>(&m.model)) {
    out += "trees " + std::to_string(rf->trees.size()) + "\n";
    for (const auto& t : rf->trees) detail::write_tree(out, t);
  } else if (const auto* gb = std::get_if<gbr::GbrModel>(&m.model)) {
    out += "baseline " + format_value(gb->baseline) + "\n";
    out += "learning_rate " + format_value(gb->learning_rate) + "\n";
    out += "stages " + std::to_string(gb->trees.size()) + "\n";
    for (const auto& t : gb->trees) detail::write_tree(out, t);
  } else {
    const auto& sv = std::get<svr::SvrModel>(m.model);
    out += "gamma " + format_value(sv.gamma) + "\n";
    out += "bias " + format_value(sv.bias) + "\n";
    out += "converged " + std::string(sv.converged ? "1" : "0") + "\n";
    out += "support_vectors " + std::to_string(sv.support_vectors.rows()) + " " +
           std::to_string(sv.support_vectors.cols()) + "\n";
    if (sv.beta.size() > 0) {
      detail::write_vector(out, sv.beta);
      detail::write_matrix(out, sv.support_vectors);
    }
  }
  out += "end\n";
  return out;
}

inline SavedModel parse_model(std::string_view text) {
  detail::Cursor cur(text);
  {
    auto tk = cur.fields("header", 2);
    if (tk[0] != "vibraug-model" || tk[1] != "1")
      throw ParseError("not a vibraug model file", 1);
  }
  SavedModel m;
  {
    auto tk = cur.keyed("kind", 1);
    m.kind = std::string(tk[0]);
    if (m.kind != "dnn" && m.kind != "rf" && m.kind != "gbr" && m.kind != "svr")
      throw ParseError("unknown model kind '" + m.kind + "'", cur.line());
  }
  m.target = std::string(cur.keyed("target", 1)[0]);
  m.feature_dim =
      static_cast<int>(detail::parse_int(cur.keyed("feature_dim", 1)[0], cur.line(),
                                         "feature_dim"));
  if (m.feature_dim < 1) throw ParseError("feature_dim must be positive", cur.line());
  m.train_size = detail::parse_int(cur.keyed("train_size", 1)[0], cur.line(), "train_size");
  {
    auto tk = cur.keyed("target_scale", 2);
    m.target_min = detail::parse_real(tk[0], cur.line(), "target_scale min");
    m.target_max = detail::parse_real(tk[1], cur.line(), "target_scale max");
  }

  // The scaler section spans its own header plus one row per dimension.
  cur.keyed("scaler", 0);
  {
    auto head = cur.fields("scaler dims", 2);
    const long sd = detail::parse_int(head[1], cur.line(), "scaler dims");
    if (std::string_view(head[0]) != "dims" || sd < 1)
      throw ParseError("malformed scaler section at line " + std::to_string(cur.line()),
                       cur.line());
    std::string block = "dims " + std::to_string(sd) + "\n";
    for (long d = 0; d < sd; ++d) {
      const auto& ln = cur.next("scaler row");
      block += std::string(ln.text) + "\n";
    }
    m.scaler = featurize::Scaler::deserialize(block);
    if (m.scaler.dims() != m.feature_dim)
      throw ParseError("scaler dimension does not match feature_dim", cur.line());
  }

  cur.keyed("body", 0);
  if (m.kind == "dnn") {
    const auto& ln = cur.next("network dims");
    auto tk = detail::tokens(ln.text);
    if (tk.size() < 2 || tk[0] != "dims")
      throw ParseError("malformed network dims", cur.line());
    const long nd = detail::parse_int(tk[1], cur.line(), "dims count");
    if (nd < 2 || tk.size() != static_cast<std::size_t>(nd) + 2)
      throw ParseError("network dims count mismatch", cur.line());
    neuralnet::MlpModel net;
    for (long k = 0; k < nd; ++k)
      net.dims.push_back(static_cast<int>(
          detail::parse_int(tk[static_cast<std::size_t>(k) + 2], cur.line(), "layer dim")));
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
      auto lt = cur.keyed("layer", 1);
      if (detail::parse_int(lt[0], cur.line(), "layer index") != static_cast<long>(l))
        throw ParseError("layers out of order at line " + std::to_string(cur.line()),
                         cur.line());
      const auto rows = static_cast<Eigen::Index>(net.dims[l + 1]);
      const auto cols = static_cast<Eigen::Index>(net.dims[l]);
      net.weights.push_back(detail::read_matrix(cur, rows, cols, "weight row"));
      net.biases.push_back(detail::read_vector(cur, rows, "bias row"));
    }
    if (net.input_dim() != m.feature_dim)
      throw ParseError("network input does not match feature_dim", cur.line());
    m.model = std::move(net);
  } else if (m.kind == "rf") {
    const long count = detail::parse_int(cur.keyed("trees", 1)[0], cur.line(), "tree count");
    if (count < 1) throw ParseError("forest must have at least one tree", cur.line());
    forest::ForestModel rf;
    rf.feature_dim = m.feature_dim;
    for (long k = 0; k < count; ++k) rf.trees.push_back(detail::read_tree(cur));
    m.model = std::move(rf);
  } else if (m.kind == "gbr") {
    gbr::GbrModel gb;
    gb.feature_dim = m.feature_dim;
    gb.baseline = detail::parse_real(cur.keyed("baseline", 1)[0], cur.line(), "baseline");
    gb.learning_rate =
        detail::parse_real(cur.keyed("learning_rate", 1)[0], cur.line(), "learning_rate");
    const long count = detail::parse_int(cur.keyed("stages", 1)[0], cur.line(), "stage count");
    if (count < 0) throw ParseError("negative stage count", cur.line());
    for (long k = 0; k < count; ++k) gb.trees.push_back(detail::read_tree(cur));
    m.model = std::move(gb);
  } else {
    svr::SvrModel sv;
    sv.feature_dim = m.feature_dim;
    sv.gamma = detail::parse_real(cur.keyed("gamma", 1)[0], cur.line(), "gamma");
    sv.bias = detail::parse_real(cur.keyed("bias", 1)[0], cur.line(), "bias");
    sv.converged =
        detail::parse_int(cur.keyed("converged", 1)[0], cur.line(), "converged") != 0;
    auto tk = cur.keyed("support_vectors", 2);
    const long nsv = detail::parse_int(tk[0], cur.line(), "support vector count");
    const long w = detail::parse_int(tk[1], cur.line(), "support vector width");
    if (nsv < 0 || (nsv > 0 && w != m.feature_dim))
      throw ParseError("support vector shape mismatch", cur.line());
    if (nsv > 0) {
      sv.beta = detail::read_vector(cur, nsv, "beta");
      sv.support_vectors = detail::read_matrix(cur, nsv, w, "support vector row");
    } else {
      sv.beta.resize(0);
      sv.support_vectors.resize(0, m.feature_dim);
    }
    m.model = std::move(sv);
  }

  cur.keyed("end", 0);
  if (!cur.done())
    throw ParseError("trailing content at line " + std::to_string(cur.lines[cur.at].number),
                     cur.lines[cur.at].number);
  return m;
}

inline void save_model(const std::filesystem::path& path, const SavedModel& m) {
  fileio::atomic_write_file(path, serialize_model(m));
}

inline SavedModel load_model(const std::filesystem::path& path) {
  return parse_model(fileio::read_file(path));
}

// Predictions in the (possibly normalized) target space the model was
// trained in.
inline Eigen::VectorXd predict(const SavedModel& m, const Eigen::MatrixXd& x) {
  if (const auto* dnn = std::get_if<neuralnet::MlpModel>(&m.model))
    return neuralnet::predict(*dnn, x);
  if (const auto* rf = std::get_if<forest::ForestModel>(&m.model)) return rf->predict(x);
  if (const auto* gb = std::get_if<gbr::GbrModel>(&m.model)) return gb->predict(x);
  return std::get<svr::SvrModel>(m.model).predict(x);
}

inline double normalize_target(double y, double lo, double hi) {
  return hi > lo ? (y - lo) / (hi - lo) : 0.0;
}

}  // namespace vibraug::model_io
