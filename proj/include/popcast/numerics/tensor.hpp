#pragma once

#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace popcast::numerics {

/// Allocates on 64-byte boundaries. Vectorized kernels peel loops according to
/// the start address, so a fixed alignment keeps results bit-identical from one
/// allocation to the next.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t kAlignment{64};

    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

/// Dense row-major array of doubles, rank 0 to 3. Matrix views treat the last
/// axis as columns and fold the leading axes into rows.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    /// Throws std::invalid_argument on a size mismatch, rank > 3 or non-finite data.
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor scalar(double v) { return Tensor({}, std::vector<double>{v}); }
    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
        return Tensor({rows, cols}, fill);
    }
    static Tensor row(std::vector<double> values);

    [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return shape_.empty() ? 1 : shape_.back(); }
    [[nodiscard]] std::size_t rows() const noexcept { return cols() == 0 ? 0 : size() / cols(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    [[nodiscard]] bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    [[nodiscard]] bool all_finite() const;
    void fill(double v);

    [[nodiscard]] std::string shape_string() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double, AlignedAllocator<double>> data_;
};

}  // namespace popcast::numerics
