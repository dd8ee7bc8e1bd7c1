#include <charconv>
#include <cmath>
#include <json.hpp>
#include <stdexcept>
#include <system_error>

#include "pairstat/serialization.hpp"

namespace pairstat {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string to_json(const DensityMatrix& rho) {
  std::string out = R"({"basis": ["HH", "HV", "VH", "VV"], "re": [)";
  auto rows = [&](auto part) {
    for (int r = 0; r < 4; ++r) {
      out += r == 0 ? "[" : ", [";
      for (int c = 0; c < 4; ++c) {
        if (c) out += ", ";
        out += format_number(part(rho(r, c)));
      }
      out += "]";
    }
  };
  rows([](Complex z) { return z.real(); });
  out += R"(], "im": [)";
  rows([](Complex z) { return z.imag(); });
  out += "]}";
  return out;
}

DensityMatrix density_matrix_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid density-matrix JSON: ") + e.what());
  }
  const auto basis = doc.value("basis", nlohmann::json::array());
  if (basis != nlohmann::json({"HH", "HV", "VH", "VV"})) {
    throw std::invalid_argument("density-matrix JSON must use basis [HH, HV, VH, VV]");
  }
  DensityMatrix::Entries e;
  try {
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (re.size() != 4 || im.size() != 4) throw std::invalid_argument("expected 4 rows");
    for (int r = 0; r < 4; ++r) {
      if (re[r].size() != 4 || im[r].size() != 4) throw std::invalid_argument("expected 4 columns");
      for (int c = 0; c < 4; ++c) e[r * 4 + c] = Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("invalid density-matrix JSON: ") + ex.what());
  }
  return DensityMatrix::from_entries(e);
}

std::array<double, 16> rates_from_json(std::string_view text) {
  std::array<double, 16> r{};
  try {
    const auto doc = nlohmann::json::parse(text);
    const auto& arr = doc.at("r");
    if (!arr.is_array() || arr.size() != 16) {
      throw std::invalid_argument("\"r\" must hold exactly 16 numbers");
    }
    for (std::size_t k = 0; k < 16; ++k) {
      r[k] = arr[k].get<double>();
      if (!std::isfinite(r[k]) || r[k] < 0.0) {
        throw std::invalid_argument("rates must be finite and >= 0");
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("invalid rate-vector JSON: ") + ex.what());
  }
  return r;
}

}  // namespace pairstat
