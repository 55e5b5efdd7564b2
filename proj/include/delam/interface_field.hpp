#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace delam {

class Mesh2D;

/// Binary delamination variable on the facet chain: 1 = bonded, 0 = broken.
/// Binary values are enforced on construction, so the [0,1] indicator never
/// has to be evaluated.
class InterfaceField {
public:
    InterfaceField() = default;
    InterfaceField(std::vector<std::uint8_t> values, std::vector<double> lengths);

    /// Throws std::invalid_argument if any value is outside {0, 1}.
    static InterfaceField from_ints(const std::vector<int>& values, std::vector<double> lengths);
    static InterfaceField constant(const Mesh2D& mesh, bool bonded);
    static InterfaceField constant(std::vector<double> lengths, bool bonded);

    int size() const { return static_cast<int>(values_.size()); }
    bool bonded(int i) const { return values_[static_cast<std::size_t>(i)] != 0; }
    int operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    void set(int i, bool bonded) { values_[static_cast<std::size_t>(i)] = bonded ? 1 : 0; }

    const std::vector<std::uint8_t>& values() const { return values_; }
    const std::vector<double>& lengths() const { return lengths_; }

    /// Measure of the bonded set.
    double bonded_length() const;
    int bonded_count() const;
    /// Componentwise z <= other.
    bool is_below(const InterfaceField& other) const;

    friend bool operator==(const InterfaceField& a, const InterfaceField& b) { return a.values_ == b.values_; }

private:
    std::vector<std::uint8_t> values_;
    std::vector<double> lengths_;
};

void require_same_chain(const InterfaceField& a, const InterfaceField& b, const char* what);

}  // namespace delam
