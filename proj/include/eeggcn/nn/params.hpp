#pragma once

#include <string>
#include <vector>

#include "eeggcn/linalg.hpp"

namespace eeggcn::nn {

struct TensorSlot {
  std::string name;
  Index offset = 0;
  Index rows = 0;
  Index cols = 0;
  bool regularized = false;  // weights yes, biases no

  Index size() const { return rows * cols; }
};

// All trainable tensors live in one flat vector, row-major per tensor, in
// declaration order. Gradients and optimizer moments share the layout.
class ParamLayout {
 public:
  std::size_t add(std::string name, Index rows, Index cols, bool regularized);
  const std::vector<TensorSlot>& slots() const { return slots_; }
  const TensorSlot& slot(std::size_t i) const { return slots_.at(i); }
  Index total() const { return total_; }

  friend bool operator==(const ParamLayout&, const ParamLayout&);

 private:
  std::vector<TensorSlot> slots_;
  Index total_ = 0;
};

bool operator==(const TensorSlot& a, const TensorSlot& b);

using TensorView = Eigen::Map<RowMatrix>;
using ConstTensorView = Eigen::Map<const RowMatrix>;

inline TensorView view(Vector& flat, const TensorSlot& s) {
  return TensorView(flat.data() + s.offset, s.rows, s.cols);
}
inline ConstTensorView view(const Vector& flat, const TensorSlot& s) {
  return ConstTensorView(flat.data() + s.offset, s.rows, s.cols);
}

struct ModelParams {
  ParamLayout layout;
  Vector values;

  TensorView tensor(std::size_t i) { return view(values, layout.slot(i)); }
  ConstTensorView tensor(std::size_t i) const { return view(values, layout.slot(i)); }
};

}  // namespace eeggcn::nn
