#include "delam/ext_real.hpp"

#include <cstdio>

namespace delam {

std::string ExtReal::to_string() const
{
    if (infinite_)
        return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
}

}  // namespace delam
