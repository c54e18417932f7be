#pragma once

/// \file
/// Growth certificates: (N, d, t) with |f| <= d r^N for sampled r > t.

#include <string>
#include <vector>

namespace logrowth {

enum class CertificateMode { Ray, Cone, Unary };

inline std::string to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::Ray: return "ray";
    case CertificateMode::Cone: return "cone";
    case CertificateMode::Unary: return "unary";
  }
  return "?";
}

struct CertificateSample {
  double r;
  double abs_f;
  double bound;
};

struct GrowthCertificate {
  long N = 0;
  double d = 1.0;
  double t = 0.0;
  std::vector<CertificateSample> samples;
  bool validated = false;
  CertificateMode mode = CertificateMode::Ray;
  /// "symbolic" (prepared form) or "numeric" (window slopes).
  std::string route;
};

}  // namespace logrowth
