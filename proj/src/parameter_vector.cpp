#include "fedsim/parameter_vector.hpp"

#include <cmath>

namespace fedsim {

bool ParameterVector::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double ParameterVector::l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

double ParameterVector::l2_distance(const ParameterVector& other) const {
    double s = 0.0;
    const std::size_t n = values_.size() < other.values_.size() ? values_.size() : other.values_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values_[i] - other.values_[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace fedsim
