#include "eeggcn/nn/params.hpp"

namespace eeggcn::nn {

std::size_t ParamLayout::add(std::string name, Index rows, Index cols, bool regularized) {
  slots_.push_back({std::move(name), total_, rows, cols, regularized});
  total_ += rows * cols;
  return slots_.size() - 1;
}

bool operator==(const TensorSlot& a, const TensorSlot& b) {
  return a.name == b.name && a.offset == b.offset && a.rows == b.rows && a.cols == b.cols &&
         a.regularized == b.regularized;
}

bool operator==(const ParamLayout& a, const ParamLayout& b) {
  return a.total_ == b.total_ && a.slots_ == b.slots_;
}

}  // namespace eeggcn::nn
