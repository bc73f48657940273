#include "cstrata/detail/modular.hpp"

#include "cstrata/error.hpp"

namespace cstrata {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::PrecisionTooLarge: return "PrecisionTooLarge";
    case ErrorKind::BackendMismatch: return "BackendMismatch";
    case ErrorKind::NonIntegralBreakPoint: return "NonIntegralBreakPoint";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::PrecisionTooSmall: return "PrecisionTooSmall";
    case ErrorKind::NotIsogeny: return "NotIsogeny";
    case ErrorKind::RankCapExceeded: return "RankCapExceeded";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::NoSplit: return "NoSplit";
    case ErrorKind::NoStabilization: return "NoStabilization";
    case ErrorKind::MalformedSystem: return "MalformedSystem";
    case ErrorKind::NotIsogenyAtPoint: return "NotIsogenyAtPoint";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace cstrata

namespace cstrata::detail {

PolyQuotient::PolyQuotient(Modulus mod, const std::vector<u64>& monic)
    : mod_(mod), deg_(static_cast<int>(monic.size()) - 1), f_(monic) {
  if (deg_ < 1 || deg_ > kMaxDegree) fail(ErrorKind::TooLarge, "quotient degree out of range");
  for (auto& c : f_) c = mod_.reduce(c);
  if (f_.back() != mod_.reduce(1)) fail(ErrorKind::InvalidInput, "modulus polynomial must be monic");
  neg_f_.resize(deg_);
  for (int i = 0; i < deg_; ++i) neg_f_[i] = mod_.neg(f_[i]);
}

void PolyQuotient::add(const Coeffs& a, const Coeffs& b, Coeffs& out) const {
  for (int i = 0; i < deg_; ++i) out[i] = mod_.add(a[i], b[i]);
}

void PolyQuotient::sub(const Coeffs& a, const Coeffs& b, Coeffs& out) const {
  for (int i = 0; i < deg_; ++i) out[i] = mod_.sub(a[i], b[i]);
}

void PolyQuotient::neg(const Coeffs& a, Coeffs& out) const {
  for (int i = 0; i < deg_; ++i) out[i] = mod_.neg(a[i]);
}

void PolyQuotient::scale(const Coeffs& a, u64 k, Coeffs& out) const {
  for (int i = 0; i < deg_; ++i) out[i] = mod_.mul(a[i], k);
}

void PolyQuotient::mul(const Coeffs& a, const Coeffs& b, Coeffs& out) const {
  const int d = deg_;
  if (d == 1) {
    out[0] = mod_.mul(a[0], b[0]);
    return;
  }
  u64 t[2 * kMaxDegree];
  if (mod_.is_pow2()) {
    // Wrapping arithmetic mod 2^64 is a ring map onto Z/2^s; mask once at the end.
    for (int i = 0; i < 2 * d - 1; ++i) t[i] = 0;
    for (int i = 0; i < d; ++i) {
      const u64 ai = a[i];
      if (ai == 0) continue;
      for (int j = 0; j < d; ++j) t[i + j] += ai * b[j];
    }
    for (int k = 2 * d - 2; k >= d; --k) {
      const u64 c = t[k];
      if (c == 0) continue;
      for (int i = 0; i < d; ++i) t[k - d + i] += c * neg_f_[i];
    }
    for (int i = 0; i < d; ++i) out[i] = mod_.reduce(t[i]);
    return;
  }
  for (int i = 0; i < 2 * d - 1; ++i) t[i] = 0;
  for (int i = 0; i < d; ++i) {
    const u64 ai = a[i];
    if (ai == 0) continue;
    for (int j = 0; j < d; ++j) t[i + j] = mod_.add(t[i + j], mod_.mul(ai, b[j]));
  }
  for (int k = 2 * d - 2; k >= d; --k) {
    const u64 c = t[k];
    if (c == 0) continue;
    for (int i = 0; i < d; ++i) t[k - d + i] = mod_.add(t[k - d + i], mod_.mul(c, neg_f_[i]));
  }
  for (int i = 0; i < d; ++i) out[i] = t[i];
}

void PolyQuotient::eval_poly(const std::vector<u64>& poly, const Coeffs& y, Coeffs& out) const {
  Coeffs acc{};
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    Coeffs tmp;
    mul(acc, y, tmp);
    tmp[0] = mod_.add(tmp[0], mod_.reduce(*it));
    acc = tmp;
  }
  out = acc;
}

}  // namespace cstrata::detail
