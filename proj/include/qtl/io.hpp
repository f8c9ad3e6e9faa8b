#pragma once

// File formats.
//
// Density matrix:  {"dims": [..], "re": [[..]], "im": [[..]], "report": {..}?}
// Channel spec:    {"protocol": "two-channel-bell", "n": 2,
//                   "W": {"re": .., "im": ..}, "V": {..},
//                   "corrections": "weyl" | "ghz-standard" | "identity" | [{"re", "im"}, ..]}
// W and V default to the identity when absent.
//
// Matrices are row-major; real and imaginary parts are separate arrays and
// doubles are written with round-trip precision. CSV output uses 12
// significant digits.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtl/bases.hpp"
#include "qtl/channels.hpp"
#include "qtl/metrics.hpp"
#include "qtl/optimizer.hpp"
#include "qtl/tensor.hpp"

namespace qtl::io {

using json = nlohmann::json;

inline constexpr int kCsvDigits = 12;

// ---------------------------------------------------------------------------
// Matrices

inline json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw ValidationError(field, "expected an object with \"re\" and \"im\"");
  }
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw ValidationError(field, "\"re\" and \"im\" must be non-empty arrays of equal length");
  }
  const auto rows = static_cast<Index>(re.size());
  const auto cols = static_cast<Index>(re.at(0).size());
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& rr = re.at(static_cast<std::size_t>(i));
    const json& ii = im.at(static_cast<std::size_t>(i));
    if (!rr.is_array() || !ii.is_array() || static_cast<Index>(rr.size()) != cols ||
        static_cast<Index>(ii.size()) != cols) {
      throw ValidationError(field, "row " + std::to_string(i) + " has the wrong length");
    }
    for (Index k = 0; k < cols; ++k) {
      const json& a = rr.at(static_cast<std::size_t>(k));
      const json& b = ii.at(static_cast<std::size_t>(k));
      if (!a.is_number() || !b.is_number()) throw ValidationError(field, "entries must be numbers");
      m(i, k) = Complex(a.get<double>(), b.get<double>());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("syntax", "'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Density matrices

inline json density_to_json(const DensityMatrix& rho) {
  json j = matrix_to_json(rho.matrix());
  j["dims"] = rho.dims();
  return j;
}

inline DensityMatrix density_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("format", "density matrix must be a JSON object");
  if (!j.contains("dims") || !j.at("dims").is_array()) throw ValidationError("dims", "missing \"dims\" array");
  Dims dims;
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_integer() || d.get<long long>() < 1) throw ValidationError("dims", "dimensions must be positive integers");
    dims.push_back(d.get<Index>());
  }
  ComplexMatrix m = matrix_from_json(j, "matrix");
  return DensityMatrix(std::move(m), std::move(dims));
}

inline DensityMatrix load_density(const std::string& path) { return density_from_json(read_json_file(path)); }

inline void save_density(const std::string& path, const DensityMatrix& rho, const json& report = nullptr) {
  json j = density_to_json(rho);
  if (!report.is_null()) j["report"] = report;
  write_json_file(path, j);
}

// ---------------------------------------------------------------------------
// Channel specs

inline json channel_spec_to_json(const ChannelSpec& spec) {
  json corrections = json::array();
  for (const auto& t : spec.corrections().ops()) corrections.push_back(matrix_to_json(t));
  return {{"protocol", to_string(spec.protocol())},
          {"n", spec.n()},
          {"W", matrix_to_json(spec.w())},
          {"V", matrix_to_json(spec.v())},
          {"corrections", std::move(corrections)}};
}

inline ChannelSpec channel_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("format", "channel spec must be a JSON object");
  if (!j.contains("protocol") || !j.at("protocol").is_string()) throw ValidationError("protocol", "missing protocol");
  if (!j.contains("n") || !j.at("n").is_number_integer()) throw ValidationError("n", "missing integer n");
  const Protocol protocol = protocol_from_string(j.at("protocol").get<std::string>());
  const int n = j.at("n").get<int>();
  if (n < 2) throw ValidationError("n", "local dimension must be at least 2");
  const Index d = static_cast<Index>(n) * n;
  const ComplexMatrix w = j.contains("W") ? matrix_from_json(j.at("W"), "W") : ComplexMatrix::Identity(d, d);
  const ComplexMatrix v = j.contains("V") ? matrix_from_json(j.at("V"), "V") : ComplexMatrix::Identity(d, d);

  const json c = j.contains("corrections") ? j.at("corrections") : json(is_bell(protocol) ? "weyl" : "ghz-standard");
  auto family = [&]() -> CorrectionFamily {
    if (c.is_string()) {
      const auto name = c.get<std::string>();
      if (name == "weyl") return CorrectionFamily::weyl(protocol, n);
      if (name == "ghz-standard") {
        if (protocol != Protocol::two_channel_ghz) throw ValidationError("corrections", "ghz-standard needs the GHZ protocol");
        return CorrectionFamily::ghz_standard(n);
      }
      if (name == "identity") return CorrectionFamily::identity(protocol, n);
      throw ValidationError("corrections", "unknown correction family '" + name + "'");
    }
    if (!c.is_array()) throw ValidationError("corrections", "expected a family name or an array of matrices");
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < c.size(); ++k) ops.push_back(matrix_from_json(c[k], "corrections"));
    return CorrectionFamily(protocol, n, std::move(ops));
  }();
  return ChannelSpec(protocol, n, w, v, std::move(family));
}

inline ChannelSpec load_channel_spec(const std::string& path) { return channel_spec_from_json(read_json_file(path)); }

inline void save_channel_spec(const std::string& path, const ChannelSpec& spec) {
  write_json_file(path, channel_spec_to_json(spec));
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(kCsvDigits) << x;
  return os.str();
}

inline void write_df_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "n,seed,F1,F2,dF,f1_opt,f2_opt,iters_f1,iters_f2\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.seed << ',' << format_number(r.f1) << ',' << format_number(r.f2) << ','
        << format_number(r.df) << ',' << format_number(r.f1_opt) << ',' << format_number(r.f2_opt) << ','
        << r.iters_f1 << ',' << r.iters_f2 << '\n';
  }
}

inline void write_trace_csv(std::ostream& out, const std::vector<std::vector<TracePoint>>& traces) {
  out << "restart,iteration,value,grad_norm\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (std::size_t i = 0; i < traces[r].size(); ++i) {
      out << r << ',' << i << ',' << format_number(traces[r][i].value) << ','
          << format_number(traces[r][i].grad_norm) << '\n';
    }
  }
}

template <class Writer, class Data>
void write_csv_file(const std::string& path, Writer writer, const Data& data) {
  std::ostringstream os;
  writer(os, data);
  write_text_file(path, os.str());
}

// ---------------------------------------------------------------------------
// Basis dumps

enum class BasisFamily { bell, ghz, weyl };

inline BasisFamily basis_family_from_string(const std::string& s) {
  if (s == "bell") return BasisFamily::bell;
  if (s == "ghz") return BasisFamily::ghz;
  if (s == "weyl") return BasisFamily::weyl;
  throw ValidationError("family", "unknown basis family '" + s + "'");
}

namespace detail {

inline json vector_to_json(const ComplexVector& v) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

/// Largest |<a_i, a_j> - delta_ij scale| over the Gram matrix of `cols`.
inline double gram_residual(const ComplexMatrix& cols, double scale) {
  const ComplexMatrix gram = cols.adjoint() * cols;
  return (gram - scale * ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Every element of the family plus its orthogonality residual. Bell and GHZ
/// states are listed with their labels; Weyl matrices come with the table
/// tr(U_a^dagger U_b) / n.
inline json basis_dump(BasisFamily family, int n) {
  qtl::detail::require_local_dim(n, "basis_dump");
  json out;
  json elements = json::array();
  if (family == BasisFamily::bell || family == BasisFamily::weyl) {
    const auto idx = WeylIndex::all(n);
    const Index d = static_cast<Index>(n) * n;
    ComplexMatrix stacked(d, d);
    std::vector<ComplexMatrix> ops;
    for (const auto& i : idx) {
      if (family == BasisFamily::bell) {
        const ComplexVector v = bell_state(i).amplitudes();
        stacked.col(i.flat()) = v;
        elements.push_back({{"s", i.s}, {"t", i.t}, {"state", detail::vector_to_json(v)}});
      } else {
        ops.push_back(weyl_u(i));
        elements.push_back({{"s", i.s}, {"t", i.t}, {"matrix", matrix_to_json(ops.back())}});
      }
    }
    if (family == BasisFamily::bell) {
      out["family"] = "bell";
      out["orthonormality_residual"] = detail::gram_residual(stacked, 1.0);
    } else {
      ComplexMatrix table(d, d);
      for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
          table(a, b) = (ops[static_cast<std::size_t>(a)].adjoint() * ops[static_cast<std::size_t>(b)]).trace() /
                        static_cast<double>(n);
        }
      }
      out["family"] = "weyl";
      out["trace_orthogonality"] = matrix_to_json(table);
      out["orthogonality_residual"] = (table - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    }
  } else {
    const auto idx = GhzIndex::all(n);
    const Index d = static_cast<Index>(n) * n * n;
    ComplexMatrix stacked(d, d);
    for (const auto& i : idx) {
      const ComplexVector v = ghz_state(i).amplitudes();
      stacked.col(i.flat()) = v;
      elements.push_back({{"r", i.r}, {"m", i.m}, {"s", i.s}, {"state", detail::vector_to_json(v)}});
    }
    out["family"] = "ghz";
    out["orthonormality_residual"] = detail::gram_residual(stacked, 1.0);
  }
  out["n"] = n;
  out["count"] = elements.size();
  out["elements"] = std::move(elements);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline json fef_report_to_json(const FefReport& r) {
  return {{"kind", to_string(r.kind)},         {"n", r.n},
          {"value", r.value},                  {"optimal_fidelity", r.optimal_fidelity},
          {"useful", r.useful},                {"iterations", r.iterations},
          {"converged", r.converged},          {"lower_bound", true}};
}

inline json maximizers_to_json(const FefReport& r) {
  json ms = json::array();
  for (const auto& m : r.maximizers) ms.push_back(matrix_to_json(m));
  json j = fef_report_to_json(r);
  j["maximizers"] = std::move(ms);
  return j;
}

}  // namespace qtl::io
