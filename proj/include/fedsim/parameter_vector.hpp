#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedsim {

// Flat model parameter container. The dimension is fixed at construction;
// entries are mutable. Layout conventions live with Model (layer-major,
// each layer's weights before its biases).
class ParameterVector {
public:
    ParameterVector() = default;
    explicit ParameterVector(std::size_t dim) : values_(dim, 0.0) {}
    explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {}
    ParameterVector(std::initializer_list<double> values) : values_(values) {}

    std::size_t dim() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return {values_.data(), values_.size()}; }
    std::span<double> values() { return {values_.data(), values_.size()}; }

    bool all_finite() const;
    double l2_norm() const;
    double l2_distance(const ParameterVector& other) const;

    bool operator==(const ParameterVector& other) const = default;

private:
    std::vector<double> values_;
};

}  // namespace fedsim
