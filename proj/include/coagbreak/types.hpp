// Shared scalar and dense-array aliases for the solver core.
#ifndef COAGBREAK_TYPES_HPP
#define COAGBREAK_TYPES_HPP

#include <Eigen/Core>

namespace coagbreak {

using Real = double;
using Vec = Eigen::Array<Real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

inline constexpr const char* kVersion = "0.1.0";

} // namespace coagbreak

#endif
