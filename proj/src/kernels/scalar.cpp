#include "licchavi/kernels/kernels.hpp"

#include <cmath>

namespace licchavi::kernels {

PackedDataset pack(const Dataset& data, Eigen::Index d) {
  PackedDataset p;
  p.d = d;
  p.n = data.size();
  p.columns.resize(static_cast<std::size_t>(d) * p.n);
  p.answers.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto& qa = data.items[i];
    require_dimension(qa.query, d, "pack");
    for (Eigen::Index j = 0; j < d; ++j) {
      p.columns[static_cast<std::size_t>(j) * p.n + i] = qa.query[j];
    }
    p.answers[i] = qa.answer;
  }
  return p;
}

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

namespace scalar {
namespace {

void margins(const PackedDataset& x, const double* theta, double* z) {
  for (std::size_t i = 0; i < x.n; ++i) z[i] = 0.0;
  for (Eigen::Index j = 0; j < x.d; ++j) {
    const double t = theta[j];
    const double* col = x.column(j).data();
    for (std::size_t i = 0; i < x.n; ++i) z[i] += col[i] * t;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void transpose_times(const PackedDataset& x, const double* r, double* out) {
  for (Eigen::Index j = 0; j < x.d; ++j) out[j] = dot(x.column(j).data(), r, x.n);
}

void weighted_gram(const PackedDataset& x, const double* w, double* out) {
  const auto d = x.d;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double* cj = x.column(j).data();
    for (Eigen::Index k = j; k < d; ++k) {
      const double* ck = x.column(k).data();
      double s = 0.0;
      if (w == nullptr) {
        for (std::size_t i = 0; i < x.n; ++i) s += cj[i] * ck[i];
      } else {
        for (std::size_t i = 0; i < x.n; ++i) s += w[i] * cj[i] * ck[i];
      }
      out[j + k * d] = s;
      out[k + j * d] = s;
    }
  }
}

void logistic_terms(const double* z, const double* y, std::size_t n, double* resid,
                    double* curv) {
  for (std::size_t i = 0; i < n; ++i) {
    // Branch on sign so exp never overflows.
    const double e = std::exp(-std::abs(z[i]));
    const double sig = z[i] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    resid[i] = sig - (y[i] > 0.0 ? 1.0 : 0.0);
    if (curv != nullptr) curv[i] = e / ((1.0 + e) * (1.0 + e));
  }
}

}  // namespace

const KernelTable kTable{&margins, &transpose_times, &weighted_gram, &logistic_terms, &dot};

}  // namespace scalar
}  // namespace licchavi::kernels
