// SPDX-License-Identifier: Apache-2.0
//
// Common numeric aliases and the device topology shared by every module.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oafmtl {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using CRowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when a numerical routine cannot produce a result it can certify.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Device layout: task k owns devices [offset(k), offset(k) + M[k]) in the
/// flat device index space.
struct Topology {
  std::vector<int> devices_per_task;

  int tasks() const { return static_cast<int>(devices_per_task.size()); }
  int devices(int k) const { return devices_per_task.at(k); }
  int total() const {
    int n = 0;
    for (int m : devices_per_task) n += m;
    return n;
  }
  int offset(int k) const {
    int n = 0;
    for (int l = 0; l < k; ++l) n += devices_per_task[l];
    return n;
  }
  int flat(int k, int i) const { return offset(k) + i; }
  /// Task that owns flat device index `dev`.
  int task_of(int dev) const {
    for (int k = 0; k < tasks(); ++k) {
      if (dev < devices_per_task[k]) return k;
      dev -= devices_per_task[k];
    }
    throw std::out_of_range("device index outside topology");
  }
};

/// Binary participation flags, one per device in flat order.
using Selection = std::vector<std::uint8_t>;

inline Selection all_selected(const Topology& topo) {
  return Selection(static_cast<std::size_t>(topo.total()), 1);
}

/// Bitstring with device 0 first, e.g. "110111".
std::string to_bitstring(const Selection& s);

}  // namespace oafmtl
