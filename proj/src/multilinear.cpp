#include "mixext/multilinear.hpp"

namespace mixext {

MultilinearForm<double> to_double(const MultilinearForm<Rational>& form) {
  std::vector<double> data;
  data.reserve(form.coeffs.size());
  for (const auto& c : form.coeffs.data()) data.push_back(c.get_d());
  return MultilinearForm<double>{form.owner, form.blocks,
                                 Tensor<double>(form.coeffs.shape(), std::move(data))};
}

}  // namespace mixext
