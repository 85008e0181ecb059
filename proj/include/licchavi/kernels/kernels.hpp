#pragma once

// Data-parallel reductions over a packed dataset.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once at startup from cpuid; setting
// LICCHAVI_KERNELS=scalar in the environment forces the reference path.
// Results of the two paths agree to rounding (summation order differs), and
// each path is deterministic.

#include "licchavi/core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace licchavi::kernels {

/// Column-major (structure-of-arrays) copy of a dataset: query coordinate j
/// of item i lives at columns[j * n + i].
struct PackedDataset {
  Eigen::Index d = 0;
  std::size_t n = 0;
  std::vector<double> columns;
  std::vector<double> answers;

  std::span<const double> column(Eigen::Index j) const {
    return {columns.data() + static_cast<std::size_t>(j) * n, n};
  }
};

PackedDataset pack(const Dataset& data, Eigen::Index d);

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

struct KernelTable {
  /// z_i = Σ_j x_ij θ_j
  void (*margins)(const PackedDataset& x, const double* theta, double* z);
  /// out_j = Σ_i x_ij r_i
  void (*transpose_times)(const PackedDataset& x, const double* r, double* out);
  /// out (d×d, column-major) = Σ_i w_i x_i x_iᵀ ; w == nullptr means w_i = 1
  void (*weighted_gram)(const PackedDataset& x, const double* w, double* out);
  /// resid_i = σ(z_i) − 1{y_i = +1}, curv_i = σ(z_i)(1 − σ(z_i))
  void (*logistic_terms)(const double* z, const double* y, std::size_t n, double* resid,
                         double* curv);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

bool isa_available(Isa isa);
const KernelTable& table(Isa isa);
Isa active_isa();
const KernelTable& active();

namespace scalar {
extern const KernelTable kTable;
}
#if defined(LICCHAVI_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace licchavi::kernels
