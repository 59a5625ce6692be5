#pragma once

#include <stdexcept>

#include "dronesim/types.hpp"

namespace dronesim {

class NnlsIterationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NnlsResult {
  Vec4 x = Vec4::Zero();
  int iterations = 0;
};

/// Lawson-Hanson active-set solve of min ||A x - b||_2 subject to x >= 0.
/// Throws NnlsIterationError past `max_iterations` outer+inner passes.
NnlsResult nnls_solve(const Mat4& a, const Vec4& b, int max_iterations = 100);

}  // namespace dronesim
