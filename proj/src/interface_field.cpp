#include "delam/interface_field.hpp"

#include <string>

#include "delam/geometry.hpp"

namespace delam {

InterfaceField::InterfaceField(std::vector<std::uint8_t> values, std::vector<double> lengths)
    : values_(std::move(values)), lengths_(std::move(lengths))
{
    if (values_.size() != lengths_.size())
        throw std::invalid_argument("InterfaceField: values and lengths differ in size");
    for (auto v : values_) {
        if (v > 1)
            throw std::invalid_argument("InterfaceField: non-binary value " + std::to_string(v));
    }
}

InterfaceField InterfaceField::from_ints(const std::vector<int>& values, std::vector<double> lengths)
{
    std::vector<std::uint8_t> bits;
    bits.reserve(values.size());
    for (int v : values) {
        if (v != 0 && v != 1)
            throw std::invalid_argument("InterfaceField: non-binary value " + std::to_string(v));
        bits.push_back(static_cast<std::uint8_t>(v));
    }
    return {std::move(bits), std::move(lengths)};
}

InterfaceField InterfaceField::constant(const Mesh2D& mesh, bool bonded)
{
    return constant(mesh.facet_lengths(), bonded);
}

InterfaceField InterfaceField::constant(std::vector<double> lengths, bool bonded)
{
    std::vector<std::uint8_t> bits(lengths.size(), bonded ? 1 : 0);
    return {std::move(bits), std::move(lengths)};
}

double InterfaceField::bonded_length() const
{
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        total += values_[i] * lengths_[i];
    return total;
}

int InterfaceField::bonded_count() const
{
    int n = 0;
    for (auto v : values_)
        n += v;
    return n;
}

bool InterfaceField::is_below(const InterfaceField& other) const
{
    require_same_chain(*this, other, "is_below");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > other.values_[i])
            return false;
    }
    return true;
}

void require_same_chain(const InterfaceField& a, const InterfaceField& b, const char* what)
{
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": interface fields have different facet counts (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

}  // namespace delam
