#pragma once

#include <complex>
#include <string_view>
#include <vector>

namespace ek {

enum class CurveSource { window_empirical, dyadic_empirical, theoretical };

inline std::string_view to_string(CurveSource s) {
  switch (s) {
    case CurveSource::window_empirical: return "window-empirical";
    case CurveSource::dyadic_empirical: return "dyadic-empirical";
    case CurveSource::theoretical: return "theoretical";
  }
  return "unknown";
}

// A characteristic function sampled on a strictly increasing tau grid.
struct CharCurve {
  std::vector<double> taus;
  std::vector<std::complex<double>> values;
  CurveSource source = CurveSource::theoretical;
};

// A complex quantity together with an error scale whose meaning is stated by
// the producing operation (standard error, tail bound, relative remainder).
struct ComplexEstimate {
  std::complex<double> value;
  double error = 0.0;
};

}  // namespace ek
